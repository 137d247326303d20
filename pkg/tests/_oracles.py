"""Independent oracles and generators shared by the test modules.

Everything here recomputes results from first principles (outcome-string
enumeration, direct lattice search, closed formulas via ``math.comb``)
without going through the package's enumeration or LP code paths, so
agreement is meaningful.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

import macrobell as mb

SETTINGS = ((0, 0), (0, 1), (1, 0), (1, 1))


# ---------------------------------------------------------------------------
# random box generators
# ---------------------------------------------------------------------------

def vertex_tables() -> list[np.ndarray]:
    return [v.table for v in mb.all_local_vertices()] + [
        mb.pr_box(k).table for k in range(8)
    ]


def random_ns_box(rng: np.random.Generator, alpha: float = 0.7) -> mb.Box:
    """Random point of the no-signaling polytope (Dirichlet over vertices)."""
    w = rng.dirichlet(np.ones(24) * alpha)
    return mb.make_box(sum(wi * t for wi, t in zip(w, vertex_tables())))


def random_local_box(rng: np.random.Generator, alpha: float = 0.7) -> mb.Box:
    w = rng.dirichlet(np.ones(16) * alpha)
    return mb.make_box(
        sum(wi * t for wi, t in zip(w, vertex_tables()[:16]))
    )


def random_rational_ns_row(rng: np.random.Generator, denom: int = 32) -> list[Fraction]:
    """A rational outcome row: rational mixture of vertex rows (setting 1,1)."""
    raw = rng.integers(0, denom, size=24)
    if raw.sum() == 0:
        raw[0] = 1
    weights = [Fraction(int(x), int(raw.sum())) for x in raw]
    rows = [
        [Fraction(v).limit_denominator(2) for v in t[3]] for t in vertex_tables()
    ]
    out = [Fraction(0)] * 4
    for w, r in zip(weights, rows):
        for i in range(4):
            out[i] += w * r[i]
    assert sum(out) == 1
    return out


# ---------------------------------------------------------------------------
# brute-force coarse-graining over all 4^M outcome strings
# ---------------------------------------------------------------------------

def _vote_weight(rule: mb.VotingRule, n0: int, m: int) -> float:
    """Rule semantics re-derived from the rule's fields (not its methods)."""
    if rule.kind == "majority":
        return 1.0 if n0 >= m - n0 else 0.0
    if rule.kind == "threshold":
        return 1.0 if n0 >= rule.threshold else 0.0
    if n0 == m:
        return 1.0
    if n0 == 0:
        return 0.0
    return {"zero_wins": 1.0, "one_wins": 0.0, "fair_coin": 0.5}[rule.tie_policy]


def brute_force_row(row, m: int, rule: mb.VotingRule = mb.MAJORITY) -> np.ndarray:
    """Exact macro distribution by enumerating all 4^m per-copy strings."""
    row = np.asarray(row, dtype=float)
    digits = np.array(list(itertools.product(range(4), repeat=m)))
    probs = np.prod(row[digits], axis=1)
    n0a = (digits <= 1).sum(axis=1)  # cells 0, 1 have a = 0
    n0b = ((digits == 0) | (digits == 2)).sum(axis=1)  # cells 0, 2 have b = 0
    out = np.zeros(4)
    for p, na, nb in zip(probs, n0a, n0b):
        if p == 0.0:
            continue
        wa = _vote_weight(rule, int(na), m)
        wb = _vote_weight(rule, int(nb), m)
        out += p * np.array(
            [wa * wb, wa * (1 - wb), (1 - wa) * wb, (1 - wa) * (1 - wb)]
        )
    return out


def brute_force_setting(box: mb.Box, m: int, setting, rule=mb.MAJORITY) -> np.ndarray:
    return brute_force_row(box.row(*setting), m, rule)


# ---------------------------------------------------------------------------
# closed formulas computed independently (math.comb only)
# ---------------------------------------------------------------------------

def central_flip_weight(m: int, b: float, d: float) -> float:
    """1 - C(m, m/2) (b d)^(m/2) scaled by (b+d)^m, via exact binomials."""
    return (b + d) ** m - math.comb(m, m // 2) * (b * d) ** (m // 2)


def pr_macro_chsh(m: int) -> float:
    """Exact even-M macro CHSH of the canonical PR box under majority."""
    return 2.0 + 2.0 * (1.0 - math.comb(m, m // 2) / 2.0**m)


# ---------------------------------------------------------------------------
# coarse lattice search for distance to the local polytope
# ---------------------------------------------------------------------------

_LATTICE_CACHE: dict[int, np.ndarray] = {}


def _lattice_boxes(q: int) -> np.ndarray:
    """All lattice mixtures (weights k/q over the 16 vertices) as flat tables."""
    if q not in _LATTICE_CACHE:
        comps = np.array(list(_compositions(q, 16)), dtype=float) / q
        tables = np.stack([t.reshape(16) for t in vertex_tables()[:16]])
        _LATTICE_CACHE[q] = comps @ tables
    return _LATTICE_CACHE[q]


def lattice_local_distance(box: mb.Box, q: int = 6) -> float:
    """Min over all weight vectors with entries k/q of the max-abs table error.

    Exhaustive over compositions of q into 16 parts; coarse but entirely
    independent of the LP.
    """
    mixtures = _lattice_boxes(q)
    return float(np.min(np.max(np.abs(mixtures - box.table.reshape(16)), axis=1)))


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest
