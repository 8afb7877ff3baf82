"""
Chart Data Preparation
======================

Chart configurations are plain dicts with ``type``, ``data`` and ``layout``
keys so the same description can be rendered or inspected in tests.
``render_chart`` draws them as static SVG with matplotlib.

Chart types:

* ``bar``    - Bragg intensities over k (vertical sticks)
* ``disk``   - 2D product spectra, disk area proportional to intensity
* ``strips`` - window approximants, one row of intervals per letter
"""

from typing import Any, Dict, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from .diffraction import Spectrum  # noqa: E402
from .window_ifs import WindowApprox  # noqa: E402

SVG_SALT = "fibochain"


def get_color_scheme(style: str = "print") -> Dict[str, str]:
    color_schemes = {
        "print": {
            "primary": "#1f3b73",
            "a": "#1f3b73",
            "b": "#c0392b",
            "axis": "#333333",
        },
        "mono": {
            "primary": "#222222",
            "a": "#222222",
            "b": "#777777",
            "axis": "#222222",
        },
    }
    return color_schemes.get(style, color_schemes["print"])


def prepare_spectrum_chart(spectrum: Spectrum, title: str = "Bragg spectrum") -> Dict[str, Any]:
    """Stick chart of I(k) for the non-negative half of the spectrum."""
    if len(spectrum) == 0:
        return {"error": "No peaks above threshold"}
    k = spectrum.positions
    keep = k >= 0
    return {
        "type": "bar",
        "data": {"x": k[keep].tolist(), "y": spectrum.intensities[keep].tolist()},
        "layout": {"title": title, "x_title": "k", "y_title": "I(k)"},
    }


def prepare_disk_chart(frame: pd.DataFrame, title: str = "Product spectrum") -> Dict[str, Any]:
    if frame.empty:
        return {"error": "No peaks above threshold"}
    return {
        "type": "disk",
        "data": {
            "x": frame["k1"].tolist(),
            "y": frame["k2"].tolist(),
            "size": frame["I"].tolist(),
        },
        "layout": {"title": title, "x_title": "k1", "y_title": "k2"},
    }


def prepare_window_chart(approx: WindowApprox, title: Optional[str] = None) -> Dict[str, Any]:
    rows = {x: approx.intervals[x].tolist() for x in approx.letters}
    return {
        "type": "strips",
        "data": {"rows": rows},
        "layout": {
            "title": title or f"Window approximants, depth {approx.depth}",
            "x_title": "internal space",
        },
    }


def _draw_bar(ax, data, colors):
    ax.vlines(data["x"], 0.0, data["y"], colors=colors["primary"], linewidth=1.0)
    ax.set_ylim(bottom=0.0)


def _draw_disk(ax, data, colors):
    size = np.asarray(data["size"], dtype=float)
    # scatter sizes are areas
    ax.scatter(data["x"], data["y"], s=size / size.max() * 200.0, c=colors["primary"], linewidths=0)
    ax.set_aspect("equal")


def _draw_strips(ax, data, colors):
    rows = data["rows"]
    for i, (letter, intervals) in enumerate(rows.items()):
        spans = [(lo, hi - lo) for lo, hi in intervals]
        ax.broken_barh(spans, (i - 0.3, 0.6), facecolors=colors.get(letter, colors["primary"]))
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(list(rows))


_DRAWERS = {"bar": _draw_bar, "disk": _draw_disk, "strips": _draw_strips}


def render_chart(chart_config: Dict[str, Any], path, style: str = "print") -> None:
    """Write the chart as a deterministic SVG document."""
    if "error" in chart_config:
        raise ValueError(chart_config["error"])
    chart_type = chart_config.get("type", "bar")
    layout = chart_config.get("layout", {})
    colors = get_color_scheme(style)

    plt.rcParams["svg.hashsalt"] = SVG_SALT
    fig, ax = plt.subplots(figsize=(8, 3) if chart_type != "disk" else (6, 6))
    try:
        _DRAWERS.get(chart_type, _draw_bar)(ax, chart_config.get("data", {}), colors)
        ax.set_title(layout.get("title", ""))
        ax.set_xlabel(layout.get("x_title", ""))
        if layout.get("y_title"):
            ax.set_ylabel(layout["y_title"])
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
    finally:
        plt.close(fig)
