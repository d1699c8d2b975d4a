"""Return times, induced names, adapted-name coding, and the entropy product check.

A marked set E is a union of 1-cylinders: the positions whose symbol lies in
a chosen subset S of the alphabet. Inducing on E splits a word into return
words (maximal blocks ending at a marked position), whose sequence is the
induced system's name over a countable alphabet. The adapted-name codec
realizes the finitary isomorphism between that name and the base word:
each return word sits at its entry position and zeros fill the gaps, so
decoding just re-inflates each id by |return word| - 1 zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Alphabet, Word
from .entropy import estimate_entropy_rate, undersampling_guard


class NotVisitedError(ValueError):
    """The marked set is not visited often enough for the requested operation."""


class StructureError(ValueError):
    """An adapted name violates the zero-run layout (corrupt or truncated)."""


@dataclass(frozen=True)
class MarkedSet:
    """Positions whose symbol belongs to a non-empty subset of the alphabet."""

    symbols: frozenset
    alphabet: Alphabet

    def __post_init__(self):
        syms = frozenset(int(s) for s in self.symbols)
        if not syms:
            raise ValueError("marked symbol set must be non-empty")
        if any(s not in self.alphabet for s in syms):
            raise ValueError("marked symbol outside the alphabet")
        object.__setattr__(self, "symbols", syms)

    def mask(self):
        m = np.zeros(self.alphabet.size, dtype=bool)
        m[list(self.symbols)] = True
        return m

    def positions(self, w):
        return np.flatnonzero(self.mask()[w.symbols])


class PackedReturnWords(NamedTuple):
    ids: np.ndarray          # induced name over dense ids; overflow id = len(lexicon)
    lexicon: tuple           # lexicon[i] = symbol tuple of return word with id i
    overflow_mass: float     # fraction of return words longer than r_max
    alphabet: Alphabet       # id alphabet (lexicon plus overflow slot)


@dataclass(frozen=True)
class InducedName:
    """Entry positions and return structure of a word relative to a marked set.

    Return word k covers positions (entry[k-1], entry[k]]: everything after
    the previous entry up to and including the k-th, so exactly its last
    symbol is marked.
    """

    word: Word
    entry_positions: np.ndarray
    return_times: np.ndarray
    base_length: int

    def return_word(self, k):
        lo = int(self.entry_positions[k]) + 1
        hi = int(self.entry_positions[k + 1]) + 1
        return Word(self.word.symbols[lo:hi], self.word.alphabet)

    @property
    def return_words(self):
        return [self.return_word(k) for k in range(len(self.return_times))]

    def return_time_census(self):
        return ReturnTimeCensus.from_return_times(self.return_times)

    def marked_density(self):
        """Empirical density of the marked set over the whole word."""
        return len(self.entry_positions) / self.base_length

    def packed_ids(self, r_max):
        """Induced name over dense integer ids, truncating long return words.

        Return words longer than r_max collapse into a single overflow id;
        everything else gets a stable id (sorted packed-code order). The
        packing prepends a sentinel high bit so words of different lengths
        never collide.
        """
        r_max = int(r_max)
        if r_max < 1:
            raise ValueError("r_max must be >= 1")
        times = self.return_times
        K = len(times)
        if K == 0:
            raise NotVisitedError("no return words to pack")
        bits = self.word.alphabet.bits_per_symbol
        short = times <= r_max
        if bits * (r_max + 1) <= 64:
            codes = self._pack_codes_fast(bits, r_max)
        else:
            codes = self._pack_codes_slow(short)
        uniq = np.unique(codes[short])
        ids = np.searchsorted(uniq, codes).astype(np.int64)
        overflow_id = len(uniq)
        ids[~short] = overflow_id
        lexicon = tuple(_unpack_code(int(c), bits) for c in uniq)
        mass = float(np.count_nonzero(~short)) / K
        return PackedReturnWords(
            ids=ids,
            lexicon=lexicon,
            overflow_mass=mass,
            alphabet=Alphabet(overflow_id + 1),
        )

    def _pack_codes_fast(self, bits, r_max):
        """Vectorized sentinel-led packing of every return word into a uint64."""
        entries = self.entry_positions
        span0 = int(entries[0]) + 1
        span = self.word.symbols[span0 : int(entries[-1]) + 1].astype(np.uint64)
        pos = np.arange(span0, int(entries[-1]) + 1, dtype=np.int64)
        nxt = entries[np.searchsorted(entries, pos, side="left")]
        dist = np.minimum(nxt - pos, 63 // bits)  # clamp: long words are discarded anyway
        weights = np.uint64(1) << (dist.astype(np.uint64) * np.uint64(bits))
        starts = (entries[:-1] + 1 - span0).astype(np.int64)
        codes = np.add.reduceat(span * weights, starts)
        sentinel = np.uint64(1) << (
            np.minimum(self.return_times, 63 // bits).astype(np.uint64) * np.uint64(bits)
        )
        return codes + sentinel

    def _pack_codes_slow(self, short):
        """Per-word packing into Python ints (alphabets too wide for uint64)."""
        bits = self.word.alphabet.bits_per_symbol
        codes = np.zeros(len(self.return_times), dtype=object)
        for k in range(len(self.return_times)):
            if not short[k]:
                continue
            code = 1
            for s in self.return_word(k).symbols.tolist():
                code = (code << bits) | int(s)
            codes[k] = code
        return codes


def _unpack_code(code, bits):
    mask = (1 << bits) - 1
    out = []
    while code > 1:
        out.append(code & mask)
        code >>= bits
    return tuple(reversed(out))


def induce(w, marked):
    """Entry positions, return times, and return words of w relative to marked.

    Needs at least two marked positions; the stretch before the first entry
    and after the last is not part of any return word.
    """
    if not isinstance(w, Word):
        raise TypeError("expected a Word")
    entries = marked.positions(w)
    if entries.size < 2:
        raise NotVisitedError(
            f"marked set visited {entries.size} time(s); need >= 2 for induction"
        )
    return InducedName(
        word=w,
        entry_positions=entries,
        return_times=np.diff(entries),
        base_length=len(w),
    )


@dataclass(frozen=True)
class ReturnTimeCensus:
    """Empirical distribution of return times (the return-time partition masses)."""

    times: np.ndarray
    counts: np.ndarray
    total: int

    @classmethod
    def from_return_times(cls, return_times):
        times, counts = np.unique(np.asarray(return_times), return_counts=True)
        return cls(times=times, counts=counts, total=int(counts.sum()))

    def masses(self):
        return self.counts / self.total

    def mass(self, t):
        i = np.searchsorted(self.times, t)
        if i < len(self.times) and self.times[i] == t:
            return int(self.counts[i]) / self.total
        return 0.0

    def mean_return(self):
        return float((self.times * self.counts).sum()) / self.total


class KacResult(NamedTuple):
    mean_return: float
    kac_residual: float


def kac_check(rtc, mu_e_hat):
    """Empirical mean return time against 1 / mu(E) (the Kac identity)."""
    if rtc.total < 1:
        raise ValueError("return-time census is empty")
    if mu_e_hat <= 0:
        raise ValueError("mu_e_hat must be positive")
    mean = rtc.mean_return()
    return KacResult(mean_return=mean, kac_residual=abs(mean - 1.0 / mu_e_hat))


@dataclass(frozen=True)
class AdaptedName:
    """A word over {0} + return-word ids, one id at each entry position.

    lexicon[i - 1] holds the symbol tuple of the return word with id i;
    id 0 is the filler symbol between entries.
    """

    symbols: np.ndarray
    lexicon: tuple
    base_alphabet: Alphabet

    def __len__(self):
        return int(self.symbols.size)

    def __eq__(self, other):
        if not isinstance(other, AdaptedName):
            return NotImplemented
        return (
            self.base_alphabet == other.base_alphabet
            and self.lexicon == other.lexicon
            and np.array_equal(self.symbols, other.symbols)
        )


def encode_adapted_name(name, marked):
    """Place each return word's id at its entry position and 0 elsewhere.

    The block ending at the first entry absorbs the unmarked prefix, so the
    output covers positions 0 through the last entry. Ids are assigned in
    first-seen order starting at 1.
    """
    if not isinstance(name, Word):
        raise TypeError("expected a Word")
    entries = marked.positions(name)
    if entries.size < 1:
        raise NotVisitedError("name never visits the marked set")
    ids = {}
    out = np.zeros(int(entries[-1]) + 1, dtype=np.int64)
    prev = -1
    for e in entries.tolist():
        block = tuple(int(s) for s in name.symbols[prev + 1 : e + 1])
        if block not in ids:
            ids[block] = len(ids) + 1
        out[e] = ids[block]
        prev = e
    return AdaptedName(
        symbols=out,
        lexicon=tuple(ids),
        base_alphabet=name.alphabet,
    )


def decode_adapted_name(adapted):
    """Reconstruct the base word by splicing each id's return word over its zero-run.

    Every nonzero symbol at position j with return word a must be preceded
    by exactly |a| - 1 zeros since the previous nonzero symbol, and nothing
    may trail the last one; any violation raises StructureError.
    """
    if not isinstance(adapted, AdaptedName):
        raise TypeError("expected an AdaptedName")
    syms = adapted.symbols
    lexicon = adapted.lexicon
    out = np.zeros(len(syms), dtype=adapted.base_alphabet.dtype())
    cursor = 0
    hits = np.flatnonzero(syms)
    if hits.size == 0:
        raise StructureError("adapted name contains no return-word ids")
    for j in hits.tolist():
        sid = int(syms[j])
        if not 1 <= sid <= len(lexicon):
            raise StructureError(f"unknown return-word id {sid} at position {j}")
        block = lexicon[sid - 1]
        if j - cursor != len(block) - 1:
            raise StructureError(
                f"zero-run before position {j} has length {j - cursor}, "
                f"expected {len(block) - 1}"
            )
        out[cursor : j + 1] = block
        cursor = j + 1
    if cursor != len(syms):
        raise StructureError(f"{len(syms) - cursor} trailing zero(s) after the last id")
    return Word(out, adapted.base_alphabet)


@dataclass(frozen=True)
class AbramovResult:
    """Entropy product check: h_base against mu(E) * h_induced."""

    h_base: float
    h_induced: float
    mu_e_hat: float
    residual: float
    overflow_mass: float
    alpha_hat: float
    flagged: bool


def _longest_unmarked_run(w, marked):
    """(start, length) of the longest run of unmarked symbols in w."""
    unmarked = ~marked.mask()[w.symbols]
    if not unmarked.any():
        return 0, 0
    padded = np.concatenate(([False], unmarked, [False])).astype(np.int8)
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    k = int(np.argmax(ends - starts))
    return int(starts[k]), int(ends[k] - starts[k])


def abramov_check(w, marked, m, r_max=32, dirac_threshold=0.5):
    """Compare the base entropy slope with mu(E) times the induced slope.

    The induced name is estimated over its realized return-word alphabet at
    block length min(m, 4), further capped by that alphabet's undersampling
    guard: id alphabets run to r_max * |alphabet| symbols, where block length
    4 can be far past coverage and the plug-in slope collapses. Return words
    longer than r_max fold into an overflow symbol whose mass above 1% flags
    the result. A run of unmarked symbols longer than dirac_threshold * n is
    excised first and reported as alpha_hat (the point-mass share of the
    empirical measure). When every position is marked the induction is
    trivial and the residual is exactly 0.
    """
    if not isinstance(w, Word):
        raise TypeError("expected a Word")
    n = len(w)
    start, run = _longest_unmarked_run(w, marked)
    alpha_hat = 0.0
    if run > dirac_threshold * n:
        alpha_hat = run / n
        w = Word(np.delete(w.symbols, slice(start, start + run)), w.alphabet)

    base = estimate_entropy_rate(w, m)
    ind = induce(w, marked)
    mu_e = ind.marked_density()
    if mu_e == 1.0:
        # trivial induction: the induced system is the base system
        return AbramovResult(
            h_base=base.slope,
            h_induced=base.slope,
            mu_e_hat=1.0,
            residual=0.0,
            overflow_mass=0.0,
            alpha_hat=alpha_hat,
            flagged=False,
        )
    min_len = 10 * w.alphabet.size**m
    if len(ind.return_times) < min_len:
        raise ValueError(
            f"induced word has {len(ind.return_times)} return words; "
            f"need >= {min_len} for estimation sanity"
        )
    packed = ind.packed_ids(r_max)
    guard = undersampling_guard(len(packed.ids), packed.alphabet.size)
    m_ind = max(1, min(m, 4, math.floor(guard)))
    bits = packed.alphabet.bits_per_symbol
    while m_ind > 1 and m_ind * bits > 64:
        m_ind -= 1
    induced_word = Word(packed.ids, packed.alphabet)
    h_ind = estimate_entropy_rate(induced_word, m_ind).slope
    return AbramovResult(
        h_base=base.slope,
        h_induced=h_ind,
        mu_e_hat=mu_e,
        residual=abs(base.slope - mu_e * h_ind),
        overflow_mass=packed.overflow_mass,
        alpha_hat=alpha_hat,
        flagged=packed.overflow_mass > 0.01,
    )
