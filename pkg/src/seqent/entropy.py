"""Shannon entropy primitives and plug-in entropy-rate estimation.

Block censuses count every sliding m-window of a word, with blocks packed
into 64-bit integers (m * bits-per-symbol <= 64 enforced) so censuses at
n = 10^6 stay cheap. All entropies are in nats. The entropy-rate estimator
of record is the slope H_m - H_{m-1}; the ratio H_m / m is reported for
diagnostics only.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import Alphabet, Word

PACK_BITS_LIMIT = 64


class CensusMismatchWarning(UserWarning):
    """Joint and marginal censuses disagree beyond the boundary-window allowance."""


def shannon_h(t):
    """The entropy summand: 0 at t = 0, else -t log t. Requires 0 <= t <= 1."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"argument must lie in [0, 1], got {t}")
    if t == 0.0:
        return 0.0
    return -t * math.log(t)


def max_entropy_geometric(p):
    """Largest entropy of an N-valued distribution with mean 1/p (geometric case)."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return (shannon_h(p) + shannon_h(1.0 - p)) / p


@dataclass(frozen=True)
class BlockCensus:
    """Sliding-window counts of all length-m blocks of a word.

    codes holds the packed block values in sorted order; counts the matching
    occurrence counts. total = n - m + 1 windows.
    """

    m: int
    total: int
    codes: np.ndarray
    counts: np.ndarray
    alphabet: Alphabet

    def block_of(self, code):
        """Unpack a census code back into its symbol tuple."""
        bits = self.alphabet.bits_per_symbol
        mask = (1 << bits) - 1
        code = int(code)
        out = [0] * self.m
        for i in range(self.m - 1, -1, -1):
            out[i] = code & mask
            code >>= bits
        return tuple(out)

    def as_dict(self):
        return {self.block_of(c): int(k) for c, k in zip(self.codes, self.counts)}


def _pack_windows(arr, m, bits):
    n = arr.size
    codes = np.zeros(n - m + 1, dtype=np.uint64)
    a = arr.astype(np.uint64)
    shift = np.uint64(bits)
    for i in range(m):
        codes = (codes << shift) | a[i : n - m + 1 + i]
    return codes


def block_census(w, m):
    """Count every window w[j..j+m) for 1 <= m <= |w|."""
    if not isinstance(w, Word):
        raise TypeError("expected a Word")
    m = int(m)
    if m < 1 or m > len(w):
        raise ValueError(f"block length must satisfy 1 <= m <= {len(w)}, got {m}")
    bits = w.alphabet.bits_per_symbol
    if m * bits > PACK_BITS_LIMIT:
        raise ValueError(
            f"m * bits_per_symbol = {m * bits} exceeds the {PACK_BITS_LIMIT}-bit packing limit"
        )
    codes, counts = np.unique(_pack_windows(w.symbols, m, bits), return_counts=True)
    return BlockCensus(m=m, total=len(w) - m + 1, codes=codes, counts=counts, alphabet=w.alphabet)


def empirical_entropy(census):
    """Plug-in block entropy: sum of shannon_h(count / total) over the census."""
    if census.total < 1:
        raise ValueError("census is empty")
    c = census.counts.astype(float)
    p = c / census.total
    return float(-(p * np.log(p)).sum())


@dataclass(frozen=True)
class EntropyEstimate:
    """Plug-in entropy-rate estimate from a single word.

    slope = H_m - H_{m-1} is the primary estimator; flagged marks block
    lengths beyond the undersampling guard m <= log n / (2 log l).
    """

    m: int
    h_m: float
    ratio: float
    slope: float
    n: int
    flagged: bool


def undersampling_guard(n, alphabet_size):
    """Largest recommended block length for a plug-in census of n symbols."""
    if alphabet_size < 2:
        return math.inf
    return math.log(n) / (2.0 * math.log(alphabet_size))


def estimate_entropy_rate(w, m):
    """Slope estimate of the entropy rate of the process behind w.

    Beyond the undersampling guard the estimate is flagged, not rejected:
    the plug-in value collapses toward log(total)/m there.
    """
    m = int(m)
    if m + 1 > len(w):
        raise ValueError(f"need |w| >= m + 1, got |w| = {len(w)}, m = {m}")
    h_m = empirical_entropy(block_census(w, m))
    h_prev = empirical_entropy(block_census(w, m - 1)) if m > 1 else 0.0
    return EntropyEstimate(
        m=m,
        h_m=h_m,
        ratio=h_m / m,
        slope=h_m - h_prev,
        n=len(w),
        flagged=m > undersampling_guard(len(w), w.alphabet.size),
    )


def conditional_entropy(joint, marginal):
    """Conditional entropy of the last symbol given the first m-1, from censuses.

    Computed as sum_Q mu(Q) H_{mu_Q}(last symbol) by grouping the joint
    census on block prefixes; this equals H_m minus the entropy of the
    prefix-marginalized joint census exactly. The independently supplied
    marginal census is only cross-checked: a total-variation gap beyond the
    single boundary window (1/total) raises CensusMismatchWarning.
    """
    if marginal.m != joint.m - 1:
        raise ValueError("marginal census must have block length m - 1")
    bits = joint.alphabet.bits_per_symbol
    prefixes = joint.codes >> np.uint64(bits)
    # joint codes are sorted, so equal prefixes are adjacent
    uniq, starts = np.unique(prefixes, return_index=True)
    group_sums = np.add.reduceat(joint.counts, starts).astype(float)
    c = joint.counts.astype(float)
    N = float(joint.total)
    sums_per_block = np.repeat(group_sums, np.diff(np.append(starts, len(c))))
    h_cond = float((c * (np.log(sums_per_block) - np.log(c))).sum() / N)

    # cross-check the supplied marginal against the prefix marginal
    marg = dict(zip(marginal.codes.tolist(), marginal.counts.tolist()))
    tv = 0.0
    for code, s in zip(uniq.tolist(), group_sums.tolist()):
        tv += abs(s / N - marg.get(code, 0) / marginal.total)
        marg[code] = 0
    tv += sum(v / marginal.total for v in marg.values())
    if tv / 2.0 > 1.0 / N + 1e-12:
        warnings.warn(
            f"marginal census deviates from the joint's prefix marginal (TV = {tv / 2.0:.3g})",
            CensusMismatchWarning,
        )
    return h_cond
