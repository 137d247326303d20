"""Single-pair correlation boxes for the 2-2-2 scenario.

A *box* is the conditional joint distribution P(ab|XY) of one correlated
pair: two parties, two settings (X, Y in {0,1}) and two outcomes
(a, b in {0,1}).  It is stored as a 4x4 table:

* rows are setting pairs (X,Y) in the fixed order (0,0), (0,1), (1,0), (1,1);
* columns are outcome pairs (a,b) in the same order (0,0), (0,1), (1,0), (1,1).

A valid box satisfies, within a tolerance ``tol`` (default ``EPS_PROB``):

1. every entry lies in [0, 1];
2. every row sums to 1;
3. no-signaling: each party's outcome marginal is independent of the other
   party's setting.

Validation never repairs a table; the worst offending constraint is named in
the raised error.

The module also provides the canonical constructors (the maximally nonlocal
``pr_box``, the 16 deterministic vertices of the local polytope, the five
mixture families ``class_generator`` I..V), convex mixtures, and CHSH
evaluation.  The CHSH value is computed both from the correlators

    S = <00> + <01> + <10> - <11>,     <XY> = sum (-1)^(a xor b) P(ab|XY)

and from the flip weights A_XY := P(01|XY) + P(10|XY) via
S = 2 + 2(A_11 - A_00 - A_01 - A_10); the two routes are checked against
each other on every call.

Facet enumeration order (fixed; certificates depend on it)
----------------------------------------------------------
The local polytope has 8 nontrivial facets, each a signed CHSH expression
S_k = sum_XY c_XY <XY> <= 2.  They are indexed as:

================  =====================================
k                 sign pattern (c_00, c_01, c_10, c_11)
================  =====================================
0 (canonical)     (+, +, +, -)
1                 (+, +, -, +)
2                 (+, -, +, +)
3                 (-, +, +, +)
4..7              negations of 0..3
================  =====================================

Indices 1..3 arise from relabeling the inputs (Y -> 1-Y, X -> 1-X, both);
4..7 from additionally flipping one output.  ``PR_k`` denotes the extremal
no-signaling box reaching S_k = 4; ``PR_0`` is the canonical PR box
(P = 1/2 when a xor b = XY, else 0).

Boxes are immutable values and every function here is pure, so concurrent
use needs no coordination.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    BadFamily,
    BadParams,
    NegativeEntry,
    NegativeWeight,
    RowNotNormalized,
    SignalingDetected,
    WeightsNotNormalized,
)

EPS_PROB = 1e-9
"""Default probability tolerance for validation."""

SETTINGS = ((0, 0), (0, 1), (1, 0), (1, 1))
"""Row order: setting pairs (X, Y)."""

OUTCOMES = ((0, 0), (0, 1), (1, 0), (1, 1))
"""Column order: outcome pairs (a, b)."""

#: Signed coefficient patterns of the 8 CHSH facets, in the documented order.
FACET_SIGNS = np.array(
    [
        [1, 1, 1, -1],
        [1, 1, -1, 1],
        [1, -1, 1, 1],
        [-1, 1, 1, 1],
        [-1, -1, -1, 1],
        [-1, -1, 1, -1],
        [-1, 1, -1, -1],
        [1, -1, -1, -1],
    ],
    dtype=float,
)


def setting_index(x: int, y: int) -> int:
    return 2 * x + y


def outcome_index(a: int, b: int) -> int:
    return 2 * a + b


@dataclass(frozen=True, eq=False)
class Box:
    """Immutable 4x4 probability table P(ab|XY).

    Construct through :func:`make_box` (validating) or the named
    constructors.  Equality is entry-wise within 1e-12; boxes are not
    hashable (no canonical hashing of float tables).
    """

    table: np.ndarray

    def __post_init__(self) -> None:
        t = np.array(self.table, dtype=float, copy=True)
        if t.shape != (4, 4):
            raise BadParams(f"box table must be 4x4, got shape {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Box):
            return NotImplemented
        return bool(np.max(np.abs(self.table - other.table)) <= 1e-12)

    __hash__ = None  # type: ignore[assignment]

    def row(self, x: int, y: int) -> np.ndarray:
        """Outcome distribution for setting pair (X, Y)."""
        return self.table[setting_index(x, y)]

    def alice_marginal(self, x: int, y: int) -> np.ndarray:
        """(P(a=0|X; Y), P(a=1|X; Y)) computed from the row for (X, Y)."""
        r = self.row(x, y)
        return np.array([r[0] + r[1], r[2] + r[3]])

    def bob_marginal(self, x: int, y: int) -> np.ndarray:
        r = self.row(x, y)
        return np.array([r[0] + r[2], r[1] + r[3]])

    def a_coefficients(self) -> np.ndarray:
        """A_XY = P(01|XY) + P(10|XY) for the four settings in row order."""
        return self.table[:, 1] + self.table[:, 2]

    def correlators(self) -> np.ndarray:
        """<XY> = 1 - 2 A_XY for the four settings in row order."""
        return 1.0 - 2.0 * self.a_coefficients()


def make_box(table: Sequence[Sequence[float]], tol: float = EPS_PROB) -> Box:
    """Validate a 4x4 table and wrap it in a :class:`Box`.

    Checks positivity, row normalization and no-signaling, each within
    ``tol``.  Raises the error naming the worst offender; never
    renormalizes or repairs.
    """
    t = np.array(table, dtype=float)
    if t.shape != (4, 4):
        raise BadParams(f"box table must be 4x4, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise BadParams("box table contains non-finite entries")

    low = float(np.min(t))
    if low < -tol:
        r, c = np.unravel_index(int(np.argmin(t)), t.shape)
        raise NegativeEntry(
            f"entry P({OUTCOMES[c][0]}{OUTCOMES[c][1]}|{SETTINGS[r][0]}{SETTINGS[r][1]})"
            f" = {t[r, c]:.3g} is negative beyond tol={tol:g}"
        )
    high = float(np.max(t))
    if high > 1.0 + tol:
        r, c = np.unravel_index(int(np.argmax(t)), t.shape)
        raise NegativeEntry(
            f"entry P({OUTCOMES[c][0]}{OUTCOMES[c][1]}|{SETTINGS[r][0]}{SETTINGS[r][1]})"
            f" = {t[r, c]:.3g} exceeds 1 beyond tol={tol:g}"
        )

    sums = t.sum(axis=1)
    worst_row = int(np.argmax(np.abs(sums - 1.0)))
    if abs(sums[worst_row] - 1.0) > tol:
        x, y = SETTINGS[worst_row]
        raise RowNotNormalized(
            f"row (X,Y)=({x},{y}) sums to {sums[worst_row]:.12g}, not 1 within tol={tol:g}"
        )

    kind, amount = _worst_signaling(t)
    if amount > tol:
        raise SignalingDetected(f"{kind} differs by {amount:.3g} (> tol={tol:g})")

    return Box(t)


def _worst_signaling(t: np.ndarray) -> tuple[str, float]:
    """Largest marginal mismatch across the 8 no-signaling constraints."""
    worst = ("", 0.0)
    for x in (0, 1):
        pa0 = t[setting_index(x, 0), 0] + t[setting_index(x, 0), 1]
        pa1 = t[setting_index(x, 1), 0] + t[setting_index(x, 1), 1]
        d = abs(pa0 - pa1)
        if d > worst[1]:
            worst = (f"Alice marginal P(a=0|X={x}) across Y", d)
    for y in (0, 1):
        pb0 = t[setting_index(0, y), 0] + t[setting_index(0, y), 2]
        pb1 = t[setting_index(1, y), 0] + t[setting_index(1, y), 2]
        d = abs(pb0 - pb1)
        if d > worst[1]:
            worst = (f"Bob marginal P(b=0|Y={y}) across X", d)
    return worst


# ---------------------------------------------------------------------------
# canonical constructors
# ---------------------------------------------------------------------------

def _xor_box_table(target) -> np.ndarray:
    """Table with P = 1/2 on outcomes satisfying a xor b = target(X, Y)."""
    t = np.zeros((4, 4))
    for (x, y) in SETTINGS:
        g = target(x, y)
        for (a, b) in OUTCOMES:
            if (a ^ b) == g:
                t[setting_index(x, y), outcome_index(a, b)] = 0.5
    return t


def pr_box(facet: int = 0) -> Box:
    """Extremal no-signaling box maximally violating facet ``facet`` (S = 4).

    ``pr_box()`` is the canonical PR box: P(ab|XY) = 1/2 if a xor b = XY,
    0 otherwise.
    """
    if facet not in range(8):
        raise BadParams(f"facet index must be 0..7, got {facet}")
    fx, fy = ((0, 0), (0, 1), (1, 0), (1, 1))[facet % 4]
    flip = 1 if facet >= 4 else 0
    return Box(_xor_box_table(lambda x, y: ((x ^ fx) & (y ^ fy)) ^ flip))


def deterministic_vertex(family: int, r: int, flip_b: bool = False) -> Box:
    """Deterministic box from one of the four canonical families.

    family 1: a = r,       b = r
    family 2: a = X xor r, b = r
    family 3: a = r,       b = Y xor r
    family 4: a = X xor r, b = Y xor r xor 1

    All eight (family, r) boxes sit on the canonical CHSH facet (S_0 = 2).
    ``flip_b`` XORs Bob's output, producing the complementary eight vertices
    that complete the 16 extreme points of the local polytope.
    """
    if family not in (1, 2, 3, 4):
        raise BadFamily(f"family must be 1..4, got {family!r}")
    if r not in (0, 1):
        raise BadFamily(f"r must be a bit, got {r!r}")

    def a_of(x: int) -> int:
        return (x ^ r) if family in (2, 4) else r

    def b_of(y: int) -> int:
        if family == 3:
            out = y ^ r
        elif family == 4:
            out = y ^ r ^ 1
        else:
            out = r
        return out ^ (1 if flip_b else 0)

    t = np.zeros((4, 4))
    for (x, y) in SETTINGS:
        t[setting_index(x, y), outcome_index(a_of(x), b_of(y))] = 1.0
    return Box(t)


#: Identifiers of the 16 local vertices, in the documented enumeration order.
LOCAL_VERTEX_IDS = tuple(
    f"{letter}{family}_{r}"
    for letter in ("D", "E")
    for family in (1, 2, 3, 4)
    for r in (0, 1)
)

PR_VERTEX_IDS = tuple(f"PR_{k}" for k in range(8))


def all_local_vertices() -> list[Box]:
    """The 16 deterministic extreme points of the local polytope.

    Order matches :data:`LOCAL_VERTEX_IDS`: D1_0 .. D4_1 then the
    Bob-output-flipped counterparts E1_0 .. E4_1.
    """
    out = []
    for flip in (False, True):
        for family in (1, 2, 3, 4):
            for r in (0, 1):
                out.append(deterministic_vertex(family, r, flip_b=flip))
    return out


def vertex_by_id(name: str) -> Box:
    """Resolve a vertex identifier ("D2_1", "E4_0", "PR", "PR_3") to its box."""
    if name == "PR":
        return pr_box()
    if name.startswith("PR_"):
        try:
            return pr_box(int(name[3:]))
        except ValueError:
            raise BadParams(f"unknown vertex identifier {name!r}") from None
    if len(name) == 4 and name[0] in "DE" and name[2] == "_":
        try:
            family, r = int(name[1]), int(name[3])
        except ValueError:
            raise BadParams(f"unknown vertex identifier {name!r}") from None
        return deterministic_vertex(family, r, flip_b=(name[0] == "E"))
    raise BadParams(f"unknown vertex identifier {name!r}")


def uniform_box() -> Box:
    """The white-noise box: every entry 1/4."""
    return Box(np.full((4, 4), 0.25))


# ---------------------------------------------------------------------------
# mixtures
# ---------------------------------------------------------------------------

BoxLike = Union[Box, str]


@dataclass(frozen=True)
class MixtureSpec:
    """Convex combination specification: (weight, box-or-vertex-id) pairs."""

    components: tuple[tuple[float, BoxLike], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(
            (float(w), c) for w, c in self.components
        ))


def mix(spec: MixtureSpec, tol: float = EPS_PROB) -> Box:
    """Entry-wise convex combination of the spec's components.

    Weights must be nonnegative and sum to 1 within ``tol``; the result is
    validated like any other box.
    """
    if not spec.components:
        raise BadParams("mixture needs at least one component")
    weights = [w for w, _ in spec.components]
    for w in weights:
        if w < -tol:
            raise NegativeWeight(f"mixture weight {w:.6g} is negative")
    total = sum(weights)
    if abs(total - 1.0) > tol:
        raise WeightsNotNormalized(f"mixture weights sum to {total:.12g}, not 1")

    acc = np.zeros((4, 4))
    for w, comp in spec.components:
        box = vertex_by_id(comp) if isinstance(comp, str) else comp
        acc += w * box.table
    return make_box(acc, tol=tol)


def mix_boxes(components: Sequence[tuple[float, BoxLike]], tol: float = EPS_PROB) -> Box:
    """Shorthand for ``mix(MixtureSpec(tuple(components)))``."""
    return mix(MixtureSpec(tuple(components)), tol=tol)


# ---------------------------------------------------------------------------
# the five named mixture families
# ---------------------------------------------------------------------------

CLASS_IDS = ("I", "II", "III", "IV", "V")

_CLASS_COMPONENTS: dict[str, tuple[str, ...]] = {
    "I": ("PR", "D1_0"),
    "II": ("PR", "D2_0"),
    "III": ("PR", "D1_0", "D1_1"),
    "IV": ("PR", "D2_0", "D2_1"),
    "V": ("PR", "D1_0", "D2_0", "D3_0", "D4_0"),
}


@dataclass(frozen=True)
class ClassBox:
    """A class-generator result: the box plus its single-copy CHSH value.

    The leading weight p (the PR fraction) fixes the single-copy CHSH value
    at 2 + 2p for every class.
    """

    class_id: str
    params: tuple[float, ...]
    box: Box
    predicted_chsh: float


def class_generator(
    class_id: str, params: Sequence[float], strict: bool = True
) -> ClassBox:
    """Build one of the five named PR/vertex mixture families.

    ``params`` is the weight list: (p,) for classes I and II (complement
    goes to the deterministic vertex), (p1, p2, p3) for III and IV,
    (p1..p5) for V.  With ``strict`` (default) every weight must lie
    strictly inside (0, 1); ``strict=False`` admits boundary weights.
    """
    cid = str(class_id).upper()
    if cid not in _CLASS_COMPONENTS:
        raise BadParams(f"class id must be one of {CLASS_IDS}, got {class_id!r}")
    comps = _CLASS_COMPONENTS[cid]

    p = [float(v) for v in params]
    if cid in ("I", "II"):
        if len(p) != 1:
            raise BadParams(f"class {cid} takes a single weight, got {len(p)}")
        p = [p[0], 1.0 - p[0]]
    if len(p) != len(comps):
        raise BadParams(f"class {cid} takes {len(comps)} weights, got {len(p)}")
    if abs(sum(p) - 1.0) > EPS_PROB:
        raise BadParams(f"class {cid} weights sum to {sum(p):.12g}, not 1")
    for v in p:
        if strict and not (0.0 < v < 1.0):
            raise BadParams(
                f"class {cid} weight {v:.6g} not strictly inside (0,1); "
                "pass strict=False to allow boundary weights"
            )
        if not strict and not (-EPS_PROB <= v <= 1.0 + EPS_PROB):
            raise BadParams(f"class {cid} weight {v:.6g} outside [0,1]")

    box = mix_boxes(list(zip(p, comps)))
    return ClassBox(cid, tuple(float(v) for v in params), box, 2.0 + 2.0 * p[0])


# ---------------------------------------------------------------------------
# CHSH
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChshReport:
    """CHSH strength of a box.

    ``canonical_value`` is |S_0| of the canonical facet; ``symmetrized_values``
    are the signed values S_0..S_7 of all eight facets in the documented
    order; ``max_violation`` is their maximum.  Local boxes have
    max_violation <= 2; the algebraic maximum is 4.
    """

    canonical_value: float
    symmetrized_values: tuple[float, ...]
    max_violation: float
    a_coefficients: tuple[float, ...]
    correlators: tuple[float, ...] = field(default=())


def chsh(box: Box) -> ChshReport:
    """Evaluate CHSH via both the correlator and flip-weight routes.

    The two routes are algebraically identical for a normalized table and
    must agree to 1e-12; a mismatch indicates an internal bug.
    """
    a = box.a_coefficients()
    corr = 1.0 - 2.0 * a
    s0_corr = corr[0] + corr[1] + corr[2] - corr[3]
    s0_flip = 2.0 + 2.0 * (a[3] - a[0] - a[1] - a[2])
    if abs(s0_corr - s0_flip) > 1e-12:
        raise AssertionError(
            f"CHSH evaluation routes disagree: {s0_corr!r} vs {s0_flip!r}"
        )
    sym = FACET_SIGNS @ corr
    return ChshReport(
        canonical_value=abs(s0_corr),
        symmetrized_values=tuple(float(v) for v in sym),
        max_violation=float(np.max(sym)),
        a_coefficients=tuple(float(v) for v in a),
        correlators=tuple(float(v) for v in corr),
    )


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def box_to_json(box: Box) -> dict:
    """Serialize to the wire format {"P": [[...4 rows of 4...]]}."""
    return {"P": [[float(v) for v in row] for row in box.table]}


def box_from_json(obj: dict, tol: float = EPS_PROB) -> Box:
    """Parse the wire format; extra keys are rejected."""
    if not isinstance(obj, dict):
        raise BadParams(f"box JSON must be an object, got {type(obj).__name__}")
    extra = set(obj) - {"P"}
    if extra:
        raise BadParams(f"box JSON has unexpected keys: {sorted(extra)}")
    if "P" not in obj:
        raise BadParams('box JSON must have a "P" key')
    return make_box(obj["P"], tol=tol)
