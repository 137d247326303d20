"""Seeded sampling estimator of the macroscopic box.

This is the independent statistical oracle for the exact engine in
``macro``, and the only practical route for very large copy counts.  Each
experiment draws one outcome tally for one setting directly from the
multinomial via sequential binomial conditionals (three binomial draws and
up to two tie coins, O(1) memory per experiment), applies the voting rule,
and records the macroscopic outcome.

Randomness comes from the counter-based generator in ``rng``: setting s
uses substream s, and experiment t consumes the uniforms at counters
t*8 + 0..4 (three binomial stages, then Alice's and Bob's tie coins; the
remaining slots of the stride are reserved).  Because every draw is
addressed by (seed, setting, trial), partitioning trials across workers
cannot change the result, and identical seeds reproduce bit for bit.

Binomial draws invert the exact CDF (smallest k with F(k) > u), built from
a log-factorial table; experiments with the same remaining count share one
table per stage.  For counts beyond 2^16 the table is restricted to a
+-12 sigma window around the mode (missing tail mass < 1e-25, folded into
the window deterministically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .boxes import Box, FACET_SIGNS, SETTINGS
from .errors import BadParams
from .macro import MAJORITY, VotingRule

_STRIDE = 8
_FULL_TABLE_MAX = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    """Empirical macro distributions, one row per setting.

    ``distribution[s]`` are exact empirical frequencies (integer counts over
    ``trials``, so each row sums to exactly 1);
    ``stderr[s, o] = sqrt(p(1-p)/trials)``.
    """

    distribution: np.ndarray
    stderr: np.ndarray
    trials: int
    seed: int
    M: int
    rule: VotingRule


def _logfact(n: int) -> np.ndarray:
    lf = np.zeros(n + 1)
    if n >= 1:
        lf[1:] = np.cumsum(np.log(np.arange(1, n + 1, dtype=float)))
    return lf


def _binomial_cdf_table(n: int, p: float, lf: np.ndarray) -> tuple[int, np.ndarray]:
    """(offset, cdf) of Bin(n, p) over a window covering all relevant mass."""
    if n <= _FULL_TABLE_MAX:
        lo, hi = 0, n
    else:
        mode = int((n + 1) * p)
        half = int(12.0 * math.sqrt(n * p * (1.0 - p))) + 8
        lo, hi = max(0, mode - half), min(n, mode + half)
    k = np.arange(lo, hi + 1)
    logpmf = (
        lf[n]
        - lf[k]
        - lf[n - k]
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    cdf = np.cumsum(np.exp(logpmf))
    cdf /= cdf[-1]
    return lo, cdf


def _binomial_quantiles(u: np.ndarray, n: np.ndarray, p: float, lf: np.ndarray) -> np.ndarray:
    """Exact-CDF inversion of Bin(n_i, p) at u_i, vectorized by unique n."""
    out = np.zeros(u.shape, dtype=np.int64)
    if p <= 0.0:
        return out
    if p >= 1.0:
        return n.astype(np.int64)
    for nv in np.unique(n):
        nv = int(nv)
        sel = n == nv
        if nv == 0:
            continue
        lo, cdf = _binomial_cdf_table(nv, p, lf)
        out[sel] = lo + np.searchsorted(cdf, u[sel], side="right")
    return out


def _sample_setting(
    row: np.ndarray,
    M: int,
    rule: VotingRule,
    seed: int,
    stream: int,
    t0: int,
    t1: int,
    lf: np.ndarray,
) -> np.ndarray:
    """Macro outcome counts (length 4) for trials t0..t1-1 of one setting."""
    trials = t1 - t0
    base = np.arange(t0, t1, dtype=np.uint64) * np.uint64(_STRIDE)

    def u(offset: int) -> np.ndarray:
        return rng.uniforms(seed, stream, base + np.uint64(offset))

    p0, p1, p2, p3 = (float(v) for v in row)
    nfull = np.full(trials, M, dtype=np.int64)
    k0 = _binomial_quantiles(u(0), nfull, p0, lf)
    rem = nfull - k0
    q1 = p1 / (1.0 - p0) if p0 < 1.0 else 0.0
    k1 = _binomial_quantiles(u(1), rem, min(max(q1, 0.0), 1.0), lf)
    rem2 = rem - k1
    tail = p2 + p3
    q2 = p2 / tail if tail > 0.0 else 0.0
    k2 = _binomial_quantiles(u(2), rem2, min(max(q2, 0.0), 1.0), lf)

    n0a = k0 + k1
    n0b = k0 + k2
    wa = rule.weight_zero_array(n0a, M)
    wb = rule.weight_zero_array(n0b, M)
    a = (u(3) >= wa).astype(np.int64)  # P(a = 0) = wa
    b = (u(4) >= wb).astype(np.int64)
    return np.bincount(2 * a + b, minlength=4)


def sample_macro(
    source: Box,
    M: int,
    rule: VotingRule = MAJORITY,
    trials: int = 10_000,
    seed: int = 0,
) -> McEstimate:
    """Estimate the macro box of ``source`` by independent experiments.

    For each of the four settings, ``trials`` experiments each draw a tally
    of M copies from the source row and vote it down to one macro outcome.
    Identical arguments reproduce identical output.
    """
    if trials < 1:
        raise BadParams(f"trials must be >= 1, got {trials}")
    if M < 1:
        raise BadParams(f"copy count M must be >= 1, got {M}")
    rule.validate_for(M)

    lf = _logfact(M)
    dist = np.zeros((4, 4))
    for s, (x, y) in enumerate(SETTINGS):
        counts = _sample_setting(
            source.row(x, y), M, rule, seed, s, 0, trials, lf
        )
        dist[s] = counts / float(trials)
    stderr = np.sqrt(dist * (1.0 - dist) / float(trials))
    return McEstimate(
        distribution=dist, stderr=stderr, trials=trials, seed=seed, M=M, rule=rule
    )


def mc_chsh(
    source: Box,
    M: int,
    rule: VotingRule = MAJORITY,
    trials: int = 10_000,
    seed: int = 0,
) -> tuple[float, float]:
    """Sampled macro CHSH value (max over the 8 facets) and its stderr.

    The error bar propagates the per-setting flip-weight variances through
    the facet expression (all coefficients are +-1, so the variance is the
    same for every facet): stderr^2 = sum_s 4 A_s (1 - A_s) / trials.
    """
    est = sample_macro(source, M, rule, trials, seed)
    a_hat = est.distribution[:, 1] + est.distribution[:, 2]
    values = FACET_SIGNS @ (1.0 - 2.0 * a_hat)
    var = float(np.sum(4.0 * a_hat * (1.0 - a_hat) / est.trials))
    return float(np.max(values)), math.sqrt(var)
