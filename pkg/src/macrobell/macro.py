"""Exact macroscopic coarse-graining of M independent copies of a box.

Setup: a source emits M independent pairs, all correlated according to one
source box.  Each party applies the same setting to every particle of its
beam and only counts how many land in each of its two detectors (n0 + n1 =
M per side).  A voting rule turns the counts into one macroscopic bit per
side, yielding a new 2-2-2 box indexed by the original settings.

For a fixed setting the M per-copy outcomes follow a multinomial over the
four cells of that row, so the macroscopic distribution is an exact sum
over outcome tallies (k00, k01, k10, k11), k00+k01+k10+k11 = M:

    P(macro a, b) = sum_tallies  M!/(k00! k01! k10! k11!) * prod P(ab)^k
                    routed by the voting rule applied to
                    Alice's n0 = k00+k01 and Bob's n0 = k00+k10.

The enumerator walks only the tallies supported by nonzero cells (a row
with z zero cells costs O(M^(3-z)) terms), evaluates each term in log
space (every term is a probability, so exp never overflows), and reduces
with numpy pairwise summation in a fixed chunk order (chunked along the
first support cell), so results are bit-identical across runs.

Voting rules
------------
* majority: n0 >= n1 -> macro 0, otherwise 1.  Ties (even M only) go to 0.
* threshold t: macro 0 iff n0 >= t (1 <= t <= M); majority is the special
  case t = ceil(M/2).
* unanimous: macro 0 iff n1 = 0, macro 1 iff n0 = 0; a mixed beam is
  resolved by the tie policy (default fair_coin: the mixed beam contributes
  1/2 to each macro outcome).  This rule is experimental: the notion of
  "intermediate" voting admits several readings and only this one is
  implemented.

An exact-rational mode (`coarse_grain_row_exact`) re-does the sum in
`fractions.Fraction` arithmetic for rational source rows; the test suite
uses it as a second oracle for M <= 60.

`closed_form_case` provides independent per-row sums for seven structured
rows (one or two cells empty), derived directly from the majority
conditions and evaluated with exact integer multinomial coefficients; they
must and do agree with the general enumerator.  Note for the two-cell row
(0, b, d, 0): the sum telescopes to (b+d)^M - C(M, M/2)(bd)^(M/2) with a
*binomial* middle coefficient.  A plausible misreading M!/(M/2)! happens to
coincide with C(M, M/2) at M = 2 (both give 2) but diverges from M = 4 on
(12 vs 6); the brute-force enumerator confirms the binomial form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Literal, NamedTuple, Optional, Sequence

import numpy as np

from .boxes import Box, OUTCOMES, SETTINGS, chsh, make_box, setting_index
from .errors import BadParams, OddM, TraceTooShort

TiePolicy = Literal["zero_wins", "one_wins", "fair_coin"]


@dataclass(frozen=True)
class VotingRule:
    """Rule mapping one side's detector count n0 (out of M) to a macro bit."""

    kind: Literal["majority", "threshold", "unanimous"]
    threshold: Optional[int] = None
    tie_policy: TiePolicy = "zero_wins"

    def __post_init__(self) -> None:
        if self.kind == "majority":
            if self.tie_policy != "zero_wins":
                raise BadParams("majority voting fixes the tie policy to zero_wins")
        elif self.kind == "threshold":
            if self.threshold is None or int(self.threshold) < 1:
                raise BadParams("threshold voting needs an integer threshold >= 1")
        elif self.kind == "unanimous":
            if self.tie_policy not in ("zero_wins", "one_wins", "fair_coin"):
                raise BadParams(f"unknown tie policy {self.tie_policy!r}")
        else:
            raise BadParams(f"unknown voting rule {self.kind!r}")

    @staticmethod
    def majority() -> "VotingRule":
        return VotingRule("majority")

    @staticmethod
    def with_threshold(t: int) -> "VotingRule":
        return VotingRule("threshold", threshold=int(t))

    @staticmethod
    def unanimous(tie_policy: TiePolicy = "fair_coin") -> "VotingRule":
        return VotingRule("unanimous", tie_policy=tie_policy)

    def validate_for(self, M: int) -> None:
        if self.kind == "threshold" and not (1 <= int(self.threshold) <= M):
            raise BadParams(
                f"threshold {self.threshold} outside 1..{M} for M={M}"
            )

    def weight_zero(self, n0: int, M: int) -> float:
        """Probability that this side's macro bit is 0 given n0 zeros out of M."""
        return float(self.weight_zero_array(np.array([n0]), M)[0])

    def weight_zero_array(self, n0: np.ndarray, M: int) -> np.ndarray:
        self.validate_for(M)
        n0 = np.asarray(n0)
        if self.kind == "majority":
            return (2 * n0 >= M).astype(float)
        if self.kind == "threshold":
            return (n0 >= int(self.threshold)).astype(float)
        mixed = {"zero_wins": 1.0, "one_wins": 0.0, "fair_coin": 0.5}[self.tie_policy]
        return np.where(n0 == M, 1.0, np.where(n0 == 0, 0.0, mixed))

    def weight_zero_fraction(self, n0: int, M: int) -> Fraction:
        self.validate_for(M)
        if self.kind == "majority":
            return Fraction(1) if 2 * n0 >= M else Fraction(0)
        if self.kind == "threshold":
            return Fraction(1) if n0 >= int(self.threshold) else Fraction(0)
        if n0 == M:
            return Fraction(1)
        if n0 == 0:
            return Fraction(0)
        return {
            "zero_wins": Fraction(1),
            "one_wins": Fraction(0),
            "fair_coin": Fraction(1, 2),
        }[self.tie_policy]


MAJORITY = VotingRule.majority()


class OutcomeTally(NamedTuple):
    """Counts of pairs landing in each joint outcome for one setting."""

    k00: int
    k01: int
    k10: int
    k11: int

    @property
    def total(self) -> int:
        return self.k00 + self.k01 + self.k10 + self.k11

    @property
    def alice_n0(self) -> int:
        return self.k00 + self.k01

    @property
    def bob_n0(self) -> int:
        return self.k00 + self.k10


@dataclass(frozen=True)
class MacroBox:
    """Coarse-grained box for M copies of ``source`` under ``rule``."""

    box: Box
    M: int
    rule: VotingRule
    source: Box


class TracePoint(NamedTuple):
    M: int
    i_chsh: float
    a_values: tuple[float, float, float, float]


@dataclass(frozen=True)
class LimitLabel:
    """Macroscopic-limit verdict from the tail of a CHSH trace.

    ``macro_local`` when the last ``window`` values stay at or below 2
    (within tol), ``macro_maximal`` when they sit at 4 (within tol),
    ``indeterminate`` otherwise.
    """

    label: Literal["macro_local", "macro_maximal", "indeterminate"]
    trace: tuple[tuple[int, float], ...]
    final_value: float


# ---------------------------------------------------------------------------
# exact enumerator
# ---------------------------------------------------------------------------

def _logfact(M: int) -> np.ndarray:
    """log k! for k = 0..M."""
    lf = np.zeros(M + 1)
    if M >= 1:
        lf[1:] = np.cumsum(np.log(np.arange(1, M + 1, dtype=float)))
    return lf


def _pairs_summing_at_most(rem: int) -> tuple[np.ndarray, np.ndarray]:
    """All (i, j) with i, j >= 0 and i + j <= rem, ordered by i then j."""
    counts = rem + 1 - np.arange(rem + 1)
    i = np.repeat(np.arange(rem + 1), counts)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    j = np.arange(counts.sum()) - np.repeat(starts, counts)
    return i, j


def _support(row: np.ndarray) -> list[int]:
    cells = []
    for idx, p in enumerate(row):
        if p > 0.0:
            cells.append(idx)
        elif p < -1e-12:
            raise BadParams(f"row entry {p:.3g} is negative")
    return cells


def _tally_chunks(M: int, ncells: int) -> Iterator[tuple[np.ndarray, ...]]:
    """Yield per-cell count arrays covering all compositions of M.

    Chunked along the first support cell, in ascending order, so the
    accumulation order is fixed and results reproduce bit for bit.
    """
    if ncells == 1:
        yield (np.array([M]),)
    elif ncells == 2:
        k0 = np.arange(M + 1)
        yield (k0, M - k0)
    elif ncells == 3:
        k0, k1 = _pairs_summing_at_most(M)
        yield (k0, k1, M - k0 - k1)
    else:
        for k0 in range(M + 1):
            k1, k2 = _pairs_summing_at_most(M - k0)
            yield (np.full(k1.shape, k0), k1, k2, M - k0 - k1 - k2)


def coarse_grain_row(row, M: int, rule: VotingRule = MAJORITY) -> np.ndarray:
    """Macro outcome distribution for one setting row under M copies.

    ``row`` is the 4-entry outcome distribution (p00, p01, p10, p11) of a
    single setting; the return value is the 4-entry macro distribution in
    the same outcome order.
    """
    row = np.asarray(row, dtype=float)
    if row.shape != (4,):
        raise BadParams(f"setting row must have 4 entries, got shape {row.shape}")
    if abs(float(row.sum()) - 1.0) > 1e-9:
        raise BadParams(f"setting row sums to {row.sum():.12g}, not 1")
    if M < 1:
        raise BadParams(f"copy count M must be >= 1, got {M}")
    rule.validate_for(M)

    cells = _support(row)
    logp = np.log(row[cells])
    a_zero = np.array([1 if OUTCOMES[c][0] == 0 else 0 for c in cells])
    b_zero = np.array([1 if OUTCOMES[c][1] == 0 else 0 for c in cells])
    lf = _logfact(M)

    out = np.zeros(4)
    for counts in _tally_chunks(M, len(cells)):
        logterm = np.full(counts[0].shape, lf[M])
        n0a = np.zeros(counts[0].shape, dtype=np.int64)
        n0b = np.zeros(counts[0].shape, dtype=np.int64)
        for c in range(len(cells)):
            k = counts[c]
            logterm += k * logp[c] - lf[k]
            if a_zero[c]:
                n0a += k
            if b_zero[c]:
                n0b += k
        term = np.exp(logterm)  # a probability: logterm <= 0, exp is safe
        wa = rule.weight_zero_array(n0a, M)
        wb = rule.weight_zero_array(n0b, M)
        out[0] += np.sum(term * wa * wb)
        out[1] += np.sum(term * wa * (1.0 - wb))
        out[2] += np.sum(term * (1.0 - wa) * wb)
        out[3] += np.sum(term * (1.0 - wa) * (1.0 - wb))
    return out


def coarse_grain_setting(
    source: Box, M: int, setting: tuple[int, int], rule: VotingRule = MAJORITY
) -> np.ndarray:
    """Macro outcome distribution of ``source`` at one setting pair (X, Y)."""
    x, y = setting
    if (x, y) not in SETTINGS:
        raise BadParams(f"setting must be a pair of bits, got {setting!r}")
    return coarse_grain_row(source.row(x, y), M, rule)


def macro_box(source: Box, M: int, rule: VotingRule = MAJORITY) -> MacroBox:
    """Coarse-grain all four settings and validate the result as a box."""
    table = np.stack([
        coarse_grain_setting(source, M, s, rule) for s in SETTINGS
    ])
    return MacroBox(box=make_box(table), M=M, rule=rule, source=source)


# ---------------------------------------------------------------------------
# exact-rational second oracle
# ---------------------------------------------------------------------------

def coarse_grain_row_exact(
    row: Sequence[Fraction], M: int, rule: VotingRule = MAJORITY
) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """`coarse_grain_row` in exact Fraction arithmetic.

    Intended for rational source rows and moderate M (cost grows like the
    float enumerator but with big-rational arithmetic; practical to M ~ 60
    on dense rows).  The four outputs sum to exactly 1.
    """
    fr = [Fraction(v) for v in row]
    if len(fr) != 4:
        raise BadParams("setting row must have 4 entries")
    if sum(fr) != 1:
        raise BadParams(f"setting row sums to {sum(fr)}, not 1")
    if M < 1:
        raise BadParams(f"copy count M must be >= 1, got {M}")
    rule.validate_for(M)

    cells = [i for i, p in enumerate(fr) if p > 0]
    out = [Fraction(0)] * 4

    def visit(counts: list[int]) -> None:
        tally = [0, 0, 0, 0]
        for c, k in zip(cells, counts):
            tally[c] = k
        t = OutcomeTally(*tally)
        coef = 1
        rem = M
        for k in counts[:-1]:
            coef *= math.comb(rem, k)
            rem -= k
        prob = Fraction(coef)
        for c, k in zip(cells, counts):
            prob *= fr[c] ** k
        wa = rule.weight_zero_fraction(t.alice_n0, M)
        wb = rule.weight_zero_fraction(t.bob_n0, M)
        out[0] += prob * wa * wb
        out[1] += prob * wa * (1 - wb)
        out[2] += prob * (1 - wa) * wb
        out[3] += prob * (1 - wa) * (1 - wb)

    def rec(idx: int, left: int, counts: list[int]) -> None:
        if idx == len(cells) - 1:
            visit(counts + [left])
            return
        for k in range(left + 1):
            rec(idx + 1, left - k, counts + [k])

    if cells:
        rec(0, M, [])
    return tuple(out)  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# structured-row sums (independent cross-checks of the enumerator)
# ---------------------------------------------------------------------------

def _multinomial(M: int, counts: Sequence[int]) -> float:
    """Exact integer multinomial coefficient, as a float.

    Falls back to log space when the exact integer exceeds float range
    (only relevant for M in the high hundreds).
    """
    v = 1
    rem = M
    for k in counts[:-1]:
        v *= math.comb(rem, k)
        rem -= k
    try:
        return float(v)
    except OverflowError:
        lf = math.lgamma
        return math.exp(lf(M + 1) - sum(lf(k + 1) for k in counts))


def _check_case_params(params: Sequence[float], n: int, case_id: int) -> list[float]:
    p = [float(v) for v in params]
    if len(p) != n:
        raise BadParams(f"case {case_id} takes {n} parameters, got {len(p)}")
    if any(v < 0.0 for v in p):
        raise BadParams(f"case {case_id} parameters must be nonnegative")
    if abs(sum(p) - 1.0) > 1e-9:
        raise BadParams(f"case {case_id} parameters sum to {sum(p):.12g}, not 1")
    return p


def closed_form_case(case_id: int, params: Sequence[float], M: int) -> float:
    """Flip weight A = P(macro 01) + P(macro 10) for a structured row.

    The seven cases cover rows with fixed zero cells, majority voting, even
    M.  Parameters are the nonzero cells in row order:

    1: (p00, p11)            -> A = 0 for every M
    2: (p01, p10)            -> A = (b+d)^M - C(M, M/2) (bd)^(M/2)
    3: (p00, p01, p10)
    4: (p01, p10, p11)
    5: (p00, p10, p11)
    6: (p00, p01, p11)
    7: (p00, p01, p10, p11)  full row

    Each sum enumerates exactly the tallies where the two majority votes
    disagree (ties count as 0), so the values agree with the general
    enumerator to float precision.
    """
    if M < 2:
        raise BadParams(f"M must be >= 2, got {M}")
    if M % 2 != 0:
        raise OddM(f"closed-form case sums require even M, got {M}")
    H = M // 2

    if case_id == 1:
        _check_case_params(params, 2, 1)
        # only cells 00 and 11 are populated: both sides share the same
        # count, so the votes always agree
        return 0.0

    if case_id == 2:
        b, d = _check_case_params(params, 2, 2)
        # votes differ unless the two counts tie at exactly M/2
        return (b + d) ** M - _multinomial(M, (H, H)) * (b * d) ** H

    if case_id == 3:
        a, b, d = _check_case_params(params, 3, 3)
        # disagreement iff Bob's n0 = k00+k10 < M/2 (then Alice's n0 =
        # M - k10 >= M/2 automatically), or symmetrically k10 > M/2
        total = 0.0
        for k in range(H):
            for j in range(H - k):
                i = M - k - j
                total += _multinomial(M, (k, i, j)) * a**k * (
                    b**i * d**j + b**j * d**i
                )
        return total

    if case_id == 4:
        b, d, g = _check_case_params(params, 3, 4)
        # Alice counts only cell 01, Bob only cell 10; the 11 cell (m) eats
        # probability without voting weight, so the tie boundary j = M/2 - m
        # still disagrees and must be included
        total = 0.0
        for m in range(M + 1):
            jmax = min(H - 1, H - m)
            for j in range(jmax + 1):
                i = M - m - j
                total += _multinomial(M, (i, j, m)) * g**m * (
                    b**i * d**j + b**j * d**i
                )
        return total

    if case_id == 5:
        a, d, g = _check_case_params(params, 3, 5)
        # Alice's n0 is k00 alone; Bob's n0 = k00 + k10 dominates it, so
        # disagreement means a = 1, b = 0: k00 < M/2 and k00 + k10 >= M/2
        total = 0.0
        for k in range(H):
            for j in range(H + 1):
                total += _multinomial(M, (k, M - k - j, j)) * a**k * g**j * d ** (
                    M - k - j
                )
        return total

    if case_id == 6:
        a, b, g = _check_case_params(params, 3, 6)
        # mirror image of case 5 with the parties swapped
        total = 0.0
        for k in range(H):
            for m in range(H + 1):
                total += _multinomial(M, (k, M - k - m, m)) * a**k * g**m * b ** (
                    M - k - m
                )
        return total

    if case_id == 7:
        a, b, d, g = _check_case_params(params, 4, 7)
        # generic row: Alice's n0 = k00 + k01, Bob's n0 = k00 + k10;
        # j <= M/2 - max(k + 1, m) encodes "Bob below threshold, Alice at or
        # above it" for k = k00, m = k11
        total = 0.0
        for k in range(H):
            for m in range(H + 1):
                jmax = min(H - 1 - k, H - m)
                for j in range(jmax + 1):
                    i = M - k - m - j
                    total += _multinomial(M, (k, i, j, m)) * a**k * g**m * (
                        b**i * d**j + b**j * d**i
                    )
        return total

    raise BadParams(f"case id must be 1..7, got {case_id!r}")


# ---------------------------------------------------------------------------
# traces and the macroscopic-limit verdict
# ---------------------------------------------------------------------------

def macro_chsh_trace(
    source: Box, M_values: Sequence[int], rule: VotingRule = MAJORITY
) -> list[TracePoint]:
    """CHSH strength of the macro box for each M, reported as the maximum
    over the 8 facet symmetrizations, plus the per-setting flip weights."""
    ms = list(M_values)
    if not ms:
        raise BadParams("M_values must be nonempty")
    if any(m2 < m1 for m1, m2 in zip(ms, ms[1:])):
        raise BadParams("M_values must be sorted ascending")
    out = []
    for m in ms:
        mb = macro_box(source, m, rule)
        rep = chsh(mb.box)
        out.append(TracePoint(int(m), rep.max_violation, rep.a_coefficients))
    return out


def limit_classify(
    trace: Sequence[TracePoint], window: int, tol: float
) -> LimitLabel:
    """Label the macroscopic limit from the last ``window`` trace values."""
    if window < 1:
        raise BadParams(f"window must be >= 1, got {window}")
    if len(trace) < window:
        raise TraceTooShort(
            f"trace has {len(trace)} points, need at least {window}"
        )
    tail = [float(p.i_chsh) for p in trace[-window:]]
    if all(v <= 2.0 + tol for v in tail):
        label = "macro_local"
    elif all(v >= 4.0 - tol for v in tail):
        label = "macro_maximal"
    else:
        label = "indeterminate"
    return LimitLabel(
        label=label,
        trace=tuple((int(p.M), float(p.i_chsh)) for p in trace),
        final_value=tail[-1],
    )
