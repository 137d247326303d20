"""Preset figure data sets and their rendering.

Figures 1-5 plot the macroscopic flip weight A(M) = P(macro 01) + P(macro
10) against the copy count M for families of single-setting rows
(p00, p01, p10, p11); figure 6 is the surface F(p1, y) whose sign decides
the information-causality necessary test for the five-vertex mixture
family.  Each preset writes one CSV (the canonical output) and, unless
suppressed, one PNG rendered from the same data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .ic import fig6_grid
from .macro import MAJORITY, coarse_grain_row

DEFAULT_M_GRID = tuple(range(2, 101, 2))


@dataclass(frozen=True)
class CurveFamily:
    title: str
    curves: tuple[tuple[str, tuple[float, float, float, float]], ...]


def _half(x: float) -> float:
    return (1.0 - x) / 2.0


FIGURE_PRESETS: dict[int, CurveFamily] = {
    1: CurveFamily(
        "A(M) for rows (0, b, 1-b, 0)",
        (
            ("b=0.5", (0.0, 0.5, 0.5, 0.0)),
            ("b=0.4", (0.0, 0.4, 0.6, 0.0)),
            ("b=0.8", (0.0, 0.8, 0.2, 0.0)),
        ),
    ),
    2: CurveFamily(
        "A(M) for rows (a, b, b, 0), b=(1-a)/2",
        (
            ("a=0.4", (0.4, _half(0.4), _half(0.4), 0.0)),
            ("a=0.5", (0.5, _half(0.5), _half(0.5), 0.0)),
            ("a=0.6", (0.6, _half(0.6), _half(0.6), 0.0)),
        ),
    ),
    3: CurveFamily(
        "A(M) for rows (0, b, b, g), b=(1-g)/2",
        (
            ("g=0.6", (0.0, _half(0.6), _half(0.6), 0.6)),
            ("g=0.5", (0.0, _half(0.5), _half(0.5), 0.5)),
            ("g=0.4", (0.0, _half(0.4), _half(0.4), 0.4)),
        ),
    ),
    4: CurveFamily(
        "A(M) for rows (a, 0, 1-2a, a)",
        (
            ("a=0.2", (0.2, 0.0, 0.6, 0.2)),
            ("a=0.25", (0.25, 0.0, 0.5, 0.25)),
            ("a=0.3", (0.3, 0.0, 0.4, 0.3)),
        ),
    ),
    5: CurveFamily(
        "A(M) for rows (a, b, b, a), b=(1-2a)/2",
        (
            ("a=0.2", (0.2, 0.3, 0.3, 0.2)),
            ("a=0.25", (0.25, 0.25, 0.25, 0.25)),
            ("a=0.3", (0.3, 0.2, 0.2, 0.3)),
        ),
    ),
}


def figure_data(
    figure_id: int, M_values: Optional[Sequence[int]] = None
) -> tuple[list[str], list[list[float]]]:
    """(header, rows) for one preset; exact engine, majority voting.

    Figures 1-5: columns M then one A(M) column per curve.
    Figure 6: columns p1, y, F on the default 200x200 grid.
    """
    if figure_id == 6:
        header = ["p1", "y", "F"]
        rows = [[p1, y, f] for p1, y, f in fig6_grid()]
        return header, rows
    preset = FIGURE_PRESETS.get(figure_id)
    if preset is None:
        from .errors import BadParams

        raise BadParams(f"figure id must be 1..6, got {figure_id}")
    ms = list(M_values) if M_values is not None else list(DEFAULT_M_GRID)
    header = ["M"] + [label for label, _ in preset.curves]
    rows = []
    for m in ms:
        row = [float(m)]
        for _, dist in preset.curves:
            out = coarse_grain_row(dist, m, MAJORITY)
            row.append(float(out[1] + out[2]))
        rows.append(row)
    return header, rows


def render_figure(
    figure_id: int,
    header: Sequence[str],
    rows: Sequence[Sequence[float]],
    path: Path,
) -> None:
    """Render a preset's data to a PNG (Agg backend, metadata-stripped)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if figure_id == 6:
        p1 = sorted({r[0] for r in rows})
        y = sorted({r[1] for r in rows})
        grid = [[0.0] * len(y) for _ in p1]
        index = {v: i for i, v in enumerate(p1)}
        yindex = {v: i for i, v in enumerate(y)}
        for r in rows:
            grid[index[r[0]]][yindex[r[1]]] = r[2]
        im = ax.imshow(
            grid,
            origin="lower",
            aspect="auto",
            extent=(y[0], y[-1], p1[0], p1[-1]),
            cmap="RdBu_r",
            vmin=-max(abs(r[2]) for r in rows),
            vmax=max(abs(r[2]) for r in rows),
        )
        ax.contour(
            y, p1, grid, levels=[0.0], colors="black", linewidths=1.0
        )
        fig.colorbar(im, ax=ax, label="F")
        ax.set_xlabel("y")
        ax.set_ylabel("p1")
        ax.set_title("F(p1, y); the test passes where F <= 0")
    else:
        for j, label in enumerate(header[1:], start=1):
            ax.plot([r[0] for r in rows], [r[j] for r in rows], label=label)
        ax.set_xlabel("M")
        ax.set_ylabel("A(M)")
        ax.set_ylim(-0.02, 1.02)
        ax.set_title(FIGURE_PRESETS[figure_id].title)
        ax.legend()
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)
