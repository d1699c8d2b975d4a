"""Pseudometrics on equal-length words.

dbar_n is the per-letter Hamming distance. fbar_n is the edit pseudodistance
1 - LCS/n: the density of character deletions needed to reduce both words to
a common subsequence. The hat-f form replaces the single value with a match
certificate: two index sets of prescribed lower density on which the words
agree symbol for symbol.

LCS lengths are computed bit-parallel: the DP row lives in one Python big
integer (64 columns per machine word under the hood) and each text row costs
a handful of word-wide operations. Certificates come from a Hirschberg-style
divide and conquer over those rows, so memory stays O(n) even at n = 10^6.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Word


class CertificateError(ValueError):
    """A match certificate is structurally malformed (distinct from 'does not verify')."""


@dataclass(frozen=True)
class MatchCertificate:
    """Index sets I into u and I_prime into w witnessing a common subsequence."""

    I: tuple
    I_prime: tuple

    def __post_init__(self):
        I = tuple(int(i) for i in self.I)
        Ip = tuple(int(i) for i in self.I_prime)
        if len(I) != len(Ip):
            raise CertificateError("index lists must have equal length")
        for name, idx in (("I", I), ("I_prime", Ip)):
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise CertificateError(f"{name} is not strictly increasing")
            if idx and idx[0] < 0:
                raise CertificateError(f"{name} contains a negative index")
        object.__setattr__(self, "I", I)
        object.__setattr__(self, "I_prime", Ip)

    def __len__(self):
        return len(self.I)


@dataclass(frozen=True)
class DistanceProfile:
    """dbar_n / fbar_n values along prefix checkpoints plus tail-max limsup estimates."""

    checkpoints: tuple  # of (n, dbar_n, fbar_n)
    limsup_estimate_d: float
    limsup_estimate_f: float


def _check_pair(u, w):
    if not isinstance(u, Word) or not isinstance(w, Word):
        raise TypeError("expected Word arguments")
    if len(u) != len(w):
        raise ValueError(f"words must have equal length, got {len(u)} and {len(w)}")
    if len(u) == 0:
        raise ValueError("words must be non-empty")


def hamming_dn(u, w):
    """Per-letter Hamming distance of two equal-length non-empty words."""
    _check_pair(u, w)
    n = len(u)
    return int(np.count_nonzero(u.symbols != w.symbols)) / n


def _match_masks(arr):
    """Per-symbol bit masks over a word: bit j set iff arr[j] == symbol."""
    masks = {}
    for s in np.unique(arr):
        packed = np.packbits(arr == s, bitorder="little")
        masks[int(s)] = int.from_bytes(packed.tobytes(), "little")
    return masks


def _lcs_bits(a, b, masks=None):
    """Final bit-parallel DP state for LCS(a, prefixes of b).

    Returns the integer V whose zero bits among bits < j count LCS(a, b[:j]).
    """
    nb = len(b)
    full = (1 << nb) - 1
    if masks is None:
        masks = _match_masks(b)
    V = full
    for s in a.tolist():
        M = masks.get(int(s))
        if M is None:
            continue
        U = V & M
        V = ((V + U) | (V - U)) & full
    return V


def lcs_length(u_arr, w_arr):
    """LCS length of two symbol arrays (bit-parallel, value only)."""
    if len(u_arr) == 0 or len(w_arr) == 0:
        return 0
    V = _lcs_bits(u_arr, w_arr)
    return len(w_arr) - V.bit_count()


def _row_lengths(a, b):
    """LCS(a, b[:j]) for j = 0..len(b) as an int array (one bit-parallel sweep)."""
    nb = len(b)
    V = _lcs_bits(a, b)
    nbytes = (nb + 7) // 8
    raw = np.frombuffer(V.to_bytes(nbytes, "little"), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")[:nb]
    out = np.zeros(nb + 1, dtype=np.int64)
    np.cumsum(bits == 0, out=out[1:])
    return out


# below this DP-table area the baseline quadratic backtrack beats the
# divide-and-conquer overhead
_DP_AREA = 4096


def _backtrack_pairs(a, b, i0, j0, pairs):
    """Baseline quadratic LCS with certificate backtracking (small inputs).

    Deterministic: a match is taken whenever it is optimal, ties between the
    remaining moves prefer stepping in a.
    """
    al, bl = a.tolist(), b.tolist()
    na, nb = len(al), len(bl)
    L = [[0] * (nb + 1) for _ in range(na + 1)]
    for i in range(1, na + 1):
        ai = al[i - 1]
        row, prev = L[i], L[i - 1]
        for j in range(1, nb + 1):
            if ai == bl[j - 1]:
                row[j] = prev[j - 1] + 1
            else:
                rj, pj = row[j - 1], prev[j]
                row[j] = rj if rj >= pj else pj
    out = []
    i, j = na, nb
    while i > 0 and j > 0:
        if al[i - 1] == bl[j - 1] and L[i][j] == L[i - 1][j - 1] + 1:
            out.append((i0 + i - 1, j0 + j - 1))
            i -= 1
            j -= 1
        elif L[i - 1][j] >= L[i][j - 1]:
            i -= 1
        else:
            j -= 1
    pairs.extend(reversed(out))


def _hirschberg(a, b, i0, j0, pairs):
    """Append matched (i, j) pairs of an optimal common subsequence of a, b.

    Splits a at its midpoint and b at the leftmost column where the forward
    and backward LCS rows sum to the optimum, recursing on both halves; space
    stays O(n). Subproblems small enough for a full DP table fall through to
    the baseline backtrack. Fixed split and tie rules make certificates
    deterministic.
    """
    na, nb = len(a), len(b)
    if na == 0 or nb == 0:
        return
    if na * nb <= _DP_AREA or na == 1 or nb == 1:
        _backtrack_pairs(a, b, i0, j0, pairs)
        return
    mid = na // 2
    left = _row_lengths(a[:mid], b)
    right = _row_lengths(a[mid:][::-1], b[::-1])
    k = int(np.argmax(left + right[::-1]))
    _hirschberg(a[:mid], b[:k], i0, j0, pairs)
    _hirschberg(a[mid:], b[k:], i0 + mid, j0 + k, pairs)


def edit_fn(u, w):
    """fbar_n of two equal-length words plus an optimal match certificate.

    The value is 1 - k/n with k the LCS length; the certificate's index
    lists witness one optimal common subsequence.
    """
    _check_pair(u, w)
    n = len(u)
    pairs = []
    _hirschberg(u.symbols, w.symbols, 0, 0, pairs)
    cert = MatchCertificate(tuple(i for i, _ in pairs), tuple(j for _, j in pairs))
    return 1.0 - len(cert) / n, cert


def edit_fn_fast(u, w):
    """fbar_n value only (bit-parallel, no certificate)."""
    _check_pair(u, w)
    n = len(u)
    return 1.0 - lcs_length(u.symbols, w.symbols) / n


def distance_profile(u, w, checkpoints):
    """Evaluate dbar_n and fbar_n on prefixes at each checkpoint.

    The limsup estimates are the maxima over the final third of the
    checkpoint list (tail-max convention: a finite-data surrogate for the
    limit superior, which needs infinite data).
    """
    if not isinstance(u, Word) or not isinstance(w, Word):
        raise TypeError("expected Word arguments")
    cps = [int(c) for c in checkpoints]
    if not cps:
        raise ValueError("checkpoint list must be non-empty")
    limit = min(len(u), len(w))
    if any(b <= a for a, b in zip(cps, cps[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if cps[0] < 1 or cps[-1] > limit:
        raise ValueError(f"checkpoints must lie in [1, {limit}]")

    ua, wa = u.symbols[: cps[-1]], w.symbols[: cps[-1]]
    mism = np.cumsum(ua != wa)
    dvals = [int(mism[c - 1]) / c for c in cps]

    # one bit-parallel sweep; snapshot the DP state at each checkpoint row
    fvals = []
    masks = _match_masks(wa)
    full = (1 << len(wa)) - 1
    V = full
    want = {c: None for c in cps}
    for i, s in enumerate(ua.tolist(), start=1):
        M = masks.get(int(s))
        if M is not None:
            U = V & M
            V = ((V + U) | (V - U)) & full
        if i in want:
            mask = (1 << i) - 1
            want[i] = i - (V & mask).bit_count()
    fvals = [1.0 - want[c] / c for c in cps]

    tail = math.ceil(len(cps) / 3)
    return DistanceProfile(
        checkpoints=tuple(zip(cps, dvals, fvals)),
        limsup_estimate_d=max(dvals[-tail:]),
        limsup_estimate_f=max(fvals[-tail:]),
    )


def verify_hat_f_certificate(u, w, cert, eps, checkpoints=None):
    """Check a hat-f certificate: matches hold and index densities are >= 1 - eps.

    Densities |I ∩ [0, n)| / n are evaluated at the given checkpoints
    (default: the full word lengths) and minimized. Malformed certificates
    (out-of-range indices) raise CertificateError rather than returning False.
    """
    if not isinstance(cert, MatchCertificate):
        raise CertificateError("expected a MatchCertificate")
    I = np.asarray(cert.I, dtype=np.int64)
    Ip = np.asarray(cert.I_prime, dtype=np.int64)
    if I.size and (I[-1] >= len(u) or Ip[-1] >= len(w)):
        raise CertificateError("certificate index out of bounds")
    if I.size and not np.array_equal(u.symbols[I], w.symbols[Ip]):
        return False
    cps_u = [len(u)] if checkpoints is None else [int(c) for c in checkpoints]
    cps_w = [len(w)] if checkpoints is None else cps_u
    if any(c < 1 for c in cps_u):
        raise ValueError("checkpoints must be >= 1")
    tol = 1e-12
    for idx, cps in ((I, cps_u), (Ip, cps_w)):
        for n in cps:
            density = int(np.searchsorted(idx, n, side="left")) / n
            if density < (1.0 - eps) - tol:
                return False
    return True
