"""Information-causality necessary condition for 2-2-2 no-signaling boxes.

For a shared box used in the standard two-bit random-access coding
protocol, information causality requires

    E1^2 + E2^2 <= 1,

with E_i = 2 Q_i - 1 and the success probabilities

    Q1 = (P(a=b|00) + P(a=b|10)) / 2,
    Q2 = (P(a=b|01) + P(a!=b|11)) / 2.

The test is necessary only: passing it never certifies a box as quantum.
The Q definitions presume the canonical facet orientation, so the report
also carries the maximum of the left-hand side over the input relabelings
(output flips only change the sign of E_i and are irrelevant); figures and
the ``satisfied`` flag use the raw canonical convention.

For the five-vertex mixture family (class V) the condition reduces to the
sign of  F := p1^2 - 2(p3+p5)(p2+p4), which, with y = p3+p5 and the
normalization of the weights, is the two-variable polynomial

    F(p1, y) = p1^2 - 2y + 2 p1 y + 2 y^2.

``cross_check_class_v`` verifies the box route and the polynomial route
against each other (they are algebraically identical); a mismatch means an
implementation bug, never a data condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .boxes import Box, class_generator, setting_index
from .errors import MismatchDetected, OutOfRange

EPS_IC = 1e-9


@dataclass(frozen=True)
class IcReport:
    """Outcome of the necessary test; ``lhs`` is E1^2 + E2^2."""

    q1: float
    q2: float
    e1: float
    e2: float
    lhs: float
    satisfied: bool
    lhs_relabel_max: float


def _q_values(box: Box) -> tuple[float, float]:
    t = box.table

    def p_equal(x: int, y: int) -> float:
        r = t[setting_index(x, y)]
        return float(r[0] + r[3])

    q1 = 0.5 * (p_equal(0, 0) + p_equal(1, 0))
    q2 = 0.5 * (p_equal(0, 1) + (1.0 - p_equal(1, 1)))
    return q1, q2


def ic_necessary(box: Box, tol: float = EPS_IC) -> IcReport:
    """Evaluate the necessary condition on a box (raw facet convention)."""
    q1, q2 = _q_values(box)
    e1, e2 = 2.0 * q1 - 1.0, 2.0 * q2 - 1.0
    lhs = e1 * e1 + e2 * e2

    relabel_max = lhs
    for fx in (0, 1):
        for fy in (0, 1):
            if fx == 0 and fy == 0:
                continue
            perm = [setting_index(x ^ fx, y ^ fy) for x in (0, 1) for y in (0, 1)]
            relabeled = Box(box.table[perm])
            rq1, rq2 = _q_values(relabeled)
            rlhs = (2 * rq1 - 1) ** 2 + (2 * rq2 - 1) ** 2
            relabel_max = max(relabel_max, rlhs)

    return IcReport(
        q1=q1,
        q2=q2,
        e1=e1,
        e2=e2,
        lhs=lhs,
        satisfied=lhs <= 1.0 + tol,
        lhs_relabel_max=relabel_max,
    )


def class_v_F(p1: float, y: float) -> float:
    """F(p1, y) = p1^2 - 2y + 2 p1 y + 2 y^2; F <= 0 iff the class-V box
    with PR weight p1 and y = p3 + p5 passes the necessary test."""
    if not (0.0 <= p1 <= 1.0):
        raise OutOfRange(f"p1 must be in [0, 1], got {p1}")
    if not (0.0 <= y <= 1.0):
        raise OutOfRange(f"y must be in [0, 1], got {y}")
    return p1 * p1 - 2.0 * y + 2.0 * p1 * y + 2.0 * y * y


def fig6_grid(
    p1_range: tuple[float, float] = (0.0, math.sqrt(2.0) - 1.0),
    y_range: tuple[float, float] = (0.0, 1.0),
    steps: tuple[int, int] = (200, 200),
) -> list[tuple[float, float, float]]:
    """Evaluate F on a rectangular grid, row-major in p1 then y.

    ``steps`` counts the grid intervals per axis; both endpoints are
    included (so an axis yields steps+1 values; a degenerate range yields
    one).  The default window spans the PR weights below the Tsirelson
    crossover, where the sign structure of F is the interesting part.
    """
    (p_lo, p_hi), (y_lo, y_hi) = p1_range, y_range
    np1, ny = steps

    def axis(lo: float, hi: float, n: int) -> list[float]:
        if hi < lo:
            raise OutOfRange(f"range ({lo}, {hi}) is reversed")
        if n < 1 or hi == lo:
            return [lo]
        return [lo + (hi - lo) * i / n for i in range(n + 1)]

    grid = []
    for p1 in axis(p_lo, p_hi, np1):
        for y in axis(y_lo, y_hi, ny):
            grid.append((p1, y, class_v_F(p1, y)))
    return grid


def cross_check_class_v(
    params: Sequence[float], strict: bool = True, tol: float = EPS_IC
) -> tuple[IcReport, float]:
    """Evaluate the class-V box route and the F-polynomial route together.

    Builds the box from (p1..p5), runs :func:`ic_necessary` on it, computes
    F = p1^2 - 2(p3+p5)(p2+p4) from the weights, and verifies that
    lhs - 1 equals F within ``tol``.  Disagreement raises
    :class:`MismatchDetected` (a bug signal, not a data condition).
    """
    p = [float(v) for v in params]
    if len(p) != 5:
        raise OutOfRange(f"class V takes 5 weights, got {len(p)}")
    report = ic_necessary(class_generator("V", p, strict=strict).box)
    f_value = p[0] * p[0] - 2.0 * (p[2] + p[4]) * (p[1] + p[3])
    if abs((report.lhs - 1.0) - f_value) > tol:
        raise MismatchDetected(
            f"box route gives lhs-1 = {report.lhs - 1.0!r}, "
            f"weight route gives F = {f_value!r}"
        )
    return report, f_value
