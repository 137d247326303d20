"""Membership tests and decompositions for the local and no-signaling sets.

The local polytope L is the convex hull of the 16 deterministic vertices;
in the 2-2-2 scenario its nontrivial facets are exactly the 8 signed CHSH
expressions (see ``boxes.FACET_SIGNS``), so locality is decidable both by a
feasibility LP over the vertices and by direct facet evaluation.  The LP is
the primary route; decompositions double as machine-checkable certificates.

``decompose_ns`` writes a no-signaling box as a convex combination of the 16
local vertices plus a single extremal nonlocal box ("PR_k") on the most
violated facet (the canonical PR box when nothing is violated), minimizing
the nonlocal weight.  That minimum equals max(0, (max_violation - 2) / 2) in
this polytope, which the test suite checks against dense mixture grids.

All verdicts carry the tolerance they were computed with.  Everything here
is a pure function of immutable inputs; LP scratch state is local to each
call.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import boxes
from .boxes import Box, EPS_PROB, FACET_SIGNS, LOCAL_VERTEX_IDS, chsh
from .errors import LpNumericalFailure, NotNoSignaling
from .simplex import solve_lp

EPS_LP = 1e-8
"""Default tolerance for LP-backed verdicts and certificates."""

TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class DecompositionCertificate:
    """Either a convex decomposition or a violated-facet witness.

    ``kind`` is one of "LocalDecomposition", "NsDecomposition",
    "FacetViolation".  For decompositions ``weights`` maps vertex
    identifiers to weights; for violations ``facet_id`` indexes
    ``boxes.FACET_SIGNS`` and ``violation_amount`` is (facet value - 2).
    """

    kind: str
    weights: Optional[dict[str, float]] = None
    facet_id: Optional[int] = None
    violation_amount: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "weights": self.weights,
            "facet": self.facet_id,
            "violation": self.violation_amount,
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json())

    def reconstruct(self) -> Box:
        """Rebuild the box encoded by a decomposition certificate."""
        if self.weights is None:
            raise NotNoSignaling("a FacetViolation certificate encodes no box")
        acc = np.zeros((4, 4))
        for name, w in self.weights.items():
            acc += w * boxes.vertex_by_id(name).table
        return Box(acc)


@dataclass(frozen=True)
class MembershipVerdict:
    """Outcome of a membership test.

    ``worst_violation`` is the largest constraint residual found (marginal
    mismatch for no-signaling tests, facet overshoot for locality tests);
    nonpositive values mean every constraint held.  Locality verdicts carry
    a certificate: a decomposition when inside, a facet witness when not.
    No-signaling verdicts report the residual directly and carry no
    certificate.
    """

    in_set: bool
    certificate: Optional[DecompositionCertificate]
    tolerance_used: float
    worst_violation: float
    detail: str = ""


# ---------------------------------------------------------------------------
# no-signaling membership (direct constraint checks)
# ---------------------------------------------------------------------------

def is_no_signaling(box_table, tol: float = EPS_PROB) -> MembershipVerdict:
    """Check positivity, normalization and no-signaling of a raw table.

    Accepts a Box or anything convertible to a 4x4 float array.  Never
    raises on constraint failure; the verdict carries the worst residual.
    """
    t = box_table.table if isinstance(box_table, Box) else np.array(box_table, float)
    if t.shape != (4, 4) or not np.all(np.isfinite(t)):
        return MembershipVerdict(False, None, tol, math.inf, "not a finite 4x4 table")

    neg = max(0.0, float(np.max(-t)), float(np.max(t - 1.0)))
    norm = float(np.max(np.abs(t.sum(axis=1) - 1.0)))
    sig_kind, sig = boxes._worst_signaling(t)

    worst = max(neg, norm, sig)
    if neg > tol:
        detail = f"entry outside [0,1] by {neg:.3g}"
    elif norm > tol:
        detail = f"row normalization off by {norm:.3g}"
    elif sig > tol:
        detail = f"signaling: {sig_kind} differs by {sig:.3g}"
    else:
        detail = f"worst marginal mismatch {sig:.3g}"
    return MembershipVerdict(worst <= tol, None, tol, worst, detail)


# ---------------------------------------------------------------------------
# locality membership (LP over the 16 deterministic vertices)
# ---------------------------------------------------------------------------

def _coords(table: np.ndarray) -> np.ndarray:
    """Eight numbers that determine a no-signaling box.

    Alice's P(a=0|X) for X=0,1 (read off the Y=0 rows), Bob's P(b=0|Y) for
    Y=0,1 (read off the X=0 rows), and the four joints P(00|XY).
    """
    return np.array(
        [
            table[0, 0] + table[0, 1],  # P(a=0|X=0)
            table[2, 0] + table[2, 1],  # P(a=0|X=1)
            table[0, 0] + table[0, 2],  # P(b=0|Y=0)
            table[1, 0] + table[1, 2],  # P(b=0|Y=1)
            table[0, 0],
            table[1, 0],
            table[2, 0],
            table[3, 0],
        ]
    )


def _vertex_tables() -> list[np.ndarray]:
    return [v.table for v in boxes.all_local_vertices()]


def _facet_violation(box: Box) -> tuple[int, float]:
    """(facet id, value - 2) of the most violated facet; lowest id on ties."""
    values = FACET_SIGNS @ box.correlators()
    best = int(np.argmax(values))
    # argmax already returns the first maximal index, i.e. the lowest facet id
    return best, float(values[best] - 2.0)


def is_local(box: Box, tol: float = EPS_LP) -> MembershipVerdict:
    """Decide membership in the local polytope by LP feasibility.

    Feasible: the verdict carries the weight vector over the 16 vertices.
    Infeasible: it carries the most violated CHSH facet and the amount.
    """
    vertices = _vertex_tables()
    A = np.zeros((9, 16))
    for j, vt in enumerate(vertices):
        A[:8, j] = _coords(vt)
        A[8, j] = 1.0
    b = np.concatenate([_coords(box.table), [1.0]])

    res = solve_lp(np.zeros(16), A, b)
    if res.status == "optimal":
        weights = {LOCAL_VERTEX_IDS[j]: float(res.x[j]) for j in range(16)}
        cert = DecompositionCertificate("LocalDecomposition", weights=weights)
        facet, violation = _facet_violation(box)
        return MembershipVerdict(
            True, cert, tol, violation, f"decomposed over {sum(w > tol for w in res.x)} vertices"
        )
    facet, violation = _facet_violation(box)
    cert = DecompositionCertificate(
        "FacetViolation", facet_id=facet, violation_amount=violation
    )
    return MembershipVerdict(
        False, cert, tol, violation, f"facet {facet} violated by {violation:.6g}"
    )


def decompose_ns(box: Box, tol: float = EPS_LP) -> DecompositionCertificate:
    """Decompose a no-signaling box over the 16 local vertices plus one PR box.

    The PR component sits on the most violated facet (canonical PR_0 when no
    facet is violated) and its weight is minimized, making the certificate
    unique and equal to max(0, (max_violation - 2)/2).
    """
    ns = is_no_signaling(box.table)
    if not ns.in_set:
        raise NotNoSignaling(ns.detail)

    facet, violation = _facet_violation(box)
    pr_id = f"PR_{facet if violation > 0 else 0}"
    pr_table = boxes.vertex_by_id(pr_id).table

    vertices = _vertex_tables()
    A = np.zeros((9, 17))
    for j, vt in enumerate(vertices):
        A[:8, j] = _coords(vt)
        A[8, j] = 1.0
    A[:8, 16] = _coords(pr_table)
    A[8, 16] = 1.0
    b = np.concatenate([_coords(box.table), [1.0]])

    c = np.zeros(17)
    c[16] = 1.0
    res = solve_lp(c, A, b)
    if res.status != "optimal":
        raise LpNumericalFailure(
            f"no-signaling decomposition LP reported {res.status}"
        )

    weights = {LOCAL_VERTEX_IDS[j]: float(res.x[j]) for j in range(16)}
    weights[pr_id] = float(res.x[16])
    cert = DecompositionCertificate(
        "NsDecomposition",
        weights=weights,
        facet_id=facet if violation > 0 else None,
        violation_amount=violation if violation > 0 else None,
    )

    err = float(np.max(np.abs(cert.reconstruct().table - box.table)))
    if err > tol:
        raise LpNumericalFailure(f"decomposition reconstruction error {err:.3g} > {tol:g}")
    return cert


def tsirelson_check(box: Box, tol: float = EPS_PROB) -> bool:
    """True iff max CHSH violation <= 2*sqrt(2) + tol.

    Necessary for quantum realizability, nowhere near sufficient; no box is
    labeled quantum on the strength of this test.
    """
    return chsh(box).max_violation <= TSIRELSON_BOUND + tol
