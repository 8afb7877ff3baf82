"""
Exact Linear Algebra over Q(sqrt5)
==================================

Gaussian elimination on small dense matrices of GoldenNum entries: reduced row
echelon form, null space and square solves. Used by the renormalisation
solver, whose fixed space must be exactly one-dimensional, and by the
attractor-hull computation.
"""

from typing import List, Sequence, Tuple

import numpy as np

from .golden import GoldenNum, as_golden

Matrix = List[List[GoldenNum]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[as_golden(v) for v in row] for row in rows]


def to_float_array(matrix: Sequence[Sequence[GoldenNum]]) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in matrix], dtype=float)


def row_reduce(matrix: Sequence[Sequence[GoldenNum]]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(map(as_golden, row)) for row in matrix]
    if not rows:
        return [], []
    n_rows, n_cols = len(rows), len(rows[0])
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot = next((i for i in range(r, n_rows) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [v * inv for v in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c]:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def nullspace(matrix: Sequence[Sequence[GoldenNum]]) -> List[List[GoldenNum]]:
    """Basis of {x : A x = 0}, one vector per free column."""
    reduced, pivots = row_reduce(matrix)
    n_cols = len(matrix[0]) if matrix else 0
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [GoldenNum(0)] * n_cols
        vec[f] = GoldenNum(1)
        for row, p in zip(reduced, pivots):
            vec[p] = -row[f]
        basis.append(vec)
    return basis


def solve(
    matrix: Sequence[Sequence[GoldenNum]], rhs: Sequence[GoldenNum]
) -> List[GoldenNum]:
    """Unique solution of a square nonsingular system."""
    n = len(matrix)
    augmented = [list(row) + [as_golden(b)] for row, b in zip(matrix, rhs)]
    reduced, pivots = row_reduce(augmented)
    if pivots != list(range(n)):
        raise ValueError("singular system")
    return [reduced[i][n] for i in range(n)]
