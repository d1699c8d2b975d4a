"""Controlled perturbations producing close word pairs, and masked product words.

The substitution channel resamples positions and moves a word a prescribed
Hamming density away. The deletion-insertion channel edits the index
structure instead: it is nearly invisible to the edit pseudodistance but can
push the Hamming distance to 1, and it returns a match certificate for the
surviving positions. The proof-triple construction splits a zero-free word
into its masked products along an index set: the matched part z, the
complementary part zbar, and the indicator word y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Alphabet, Word, make_rng
from .entropy import shannon_h
from .metrics import MatchCertificate


@dataclass(frozen=True)
class ChannelSpec:
    """A named perturbation: kind in {substitution, indel}, rate in [0, 1]."""

    kind: str
    rate: float
    seed: int

    def __post_init__(self):
        if self.kind not in ("substitution", "indel"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must lie in [0, 1], got {self.rate}")

    def apply(self, x):
        if self.kind == "substitution":
            return substitute_channel(x, self.rate, self.seed)
        return indel_channel(x, self.rate, self.seed)


def _uniform_symbols(rng, n, l):
    """n uniform symbols in [0, l) from uniform doubles."""
    return np.minimum((rng.random(n) * l).astype(np.int64), l - 1)


def substitute_channel(x, eps, seed):
    """Resample each position with probability eps, uniformly over the other symbols.

    Returns the perturbed word and the changed index set; the per-letter
    Hamming distance to x equals len(changed) / n exactly.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    n = len(x)
    l = x.alphabet.size
    rng = make_rng(seed)
    hit = rng.random(n) < eps
    if l < 2:
        return Word(x.symbols, x.alphabet), np.empty(0, dtype=np.int64)
    offsets = 1 + _uniform_symbols(rng, n, l - 1)
    resampled = (x.symbols.astype(np.int64) + offsets) % l
    out = np.where(hit, resampled, x.symbols).astype(x.alphabet.dtype())
    return Word(out, x.alphabet), np.flatnonzero(hit).astype(np.int64)


def indel_channel(x, eps, seed):
    """Delete symbols at rate eps/2, insert uniform symbols at rate eps/2.

    The output is truncated or padded (with uniform symbols) back to |x| so
    equal-length pseudometrics apply. The certificate pairs each surviving
    source position with its output position; its density is 1 - eps - o(1),
    so fbar_n(x, y) <= 1 - len(cert)/n while the Hamming distance is
    typically much larger.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    n = len(x)
    l = x.alphabet.size
    rng = make_rng(seed)
    keep = rng.random(n) >= eps / 2.0
    ins = rng.random(n) < eps / 2.0
    ins_syms = _uniform_symbols(rng, n, l)

    idx_keep = np.flatnonzero(keep)
    idx_ins = np.flatnonzero(ins)
    # within a slot an insertion lands before the surviving source symbol
    keys = np.concatenate([2 * idx_ins, 2 * idx_keep + 1])
    syms = np.concatenate([ins_syms[idx_ins], x.symbols[idx_keep].astype(np.int64)])
    src = np.concatenate([np.full(idx_ins.size, -1, dtype=np.int64), idx_keep])
    order = np.argsort(keys, kind="stable")
    stream_syms = syms[order]
    stream_src = src[order]

    if stream_syms.size < n:
        deficit = n - stream_syms.size
        stream_syms = np.concatenate([stream_syms, _uniform_symbols(rng, deficit, l)])
        stream_src = np.concatenate([stream_src, np.full(deficit, -1, dtype=np.int64)])
    y = Word(stream_syms[:n].astype(x.alphabet.dtype()), x.alphabet)
    out_pos = np.flatnonzero(stream_src[:n] >= 0)
    cert = MatchCertificate(
        I=tuple(stream_src[out_pos].tolist()),
        I_prime=tuple(out_pos.tolist()),
    )
    return y, cert


@dataclass(frozen=True)
class ProofTriple:
    """Indicator word y of an index set plus the masked products z and zbar.

    z carries x on the set and 0 elsewhere; zbar the reverse. Because x
    never uses symbol 0, z + zbar reconstructs x symbolwise.
    """

    y: Word
    z: Word
    zbar: Word

    def merge(self):
        merged = self.z.symbols.astype(np.int64) + self.zbar.symbols.astype(np.int64)
        return Word(merged, self.z.alphabet)


def build_proof_triple(x, matched):
    """Split a zero-free word along an index set into (y, z, zbar).

    matched may be a MatchCertificate (its I side is used) or any iterable
    of positions into x.
    """
    if isinstance(matched, MatchCertificate):
        positions = np.asarray(matched.I, dtype=np.int64)
    else:
        positions = np.asarray(sorted(int(i) for i in matched), dtype=np.int64)
    n = len(x)
    if positions.size and (positions[0] < 0 or positions[-1] >= n):
        raise ValueError("matched position out of range")
    if n and int(x.symbols.min()) == 0:
        raise ValueError("word must not use symbol 0 (reserved for the mask)")
    y_arr = np.zeros(n, dtype=np.uint8)
    y_arr[positions] = 1
    xs = x.symbols.astype(np.int64)
    z_arr = np.where(y_arr == 1, xs, 0)
    zbar_arr = np.where(y_arr == 0, xs, 0)
    return ProofTriple(
        y=Word(y_arr, Alphabet(2)),
        z=Word(z_arr, x.alphabet),
        zbar=Word(zbar_arr, x.alphabet),
    )


def budget(eps, l):
    """Auditable entropy modulus for an eps-close pair over an l-symbol alphabet.

    Sums the explicit O(eps) terms of the continuity argument, applied once
    per sequence (hence the factor 2): the indicator-joining overhead, the
    complementary-part bound, the entry-time (geometric) bound, and the
    point-mass split. An empirical upper-bound heuristic, not a theorem.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if l < 2:
        raise ValueError("alphabet size must be >= 2")
    h2 = shannon_h(eps) + shannon_h(1.0 - eps)
    eps_log_l = eps * math.log(l)
    return 2.0 * (h2 + (h2 + eps_log_l) + h2 / (1.0 - eps) + eps_log_l)
