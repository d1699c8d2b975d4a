"""Alphabets, words, process specifications, and reproducible path generation.

Symbols are the integers 0..l-1 for an alphabet of size l. Words are
immutable, backed by read-only numpy arrays. Every random draw flows
through numpy's Philox counter-based generator keyed by a 64-bit seed,
and only `Generator.random()` doubles are consumed, so equal
(spec, n, seed) inputs reproduce bit-identical words across platforms.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

MAX_SEED = 2**64 - 1

# probability vectors must sum to 1 within this
PROB_ATOL = 1e-12
# a supplied stationary vector must satisfy pi @ P == pi within this
STATIONARY_ATOL = 1e-10


def make_rng(seed):
    """Philox generator for a 64-bit seed; the single entry point for randomness."""
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return np.random.Generator(np.random.Philox(key=int(seed)))


def derive_seed(root, *tags):
    """Derive a child seed from a root seed and string/int tags (blake2b-based)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(root)).encode())
    for t in tags:
        h.update(b"/")
        h.update(str(t).encode())
    return int.from_bytes(h.digest(), "big")


@dataclass(frozen=True)
class Alphabet:
    """Finite symbol set {0, ..., size-1}."""

    size: int

    def __post_init__(self):
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise ValueError(f"alphabet size must be a positive integer, got {self.size}")

    @property
    def bits_per_symbol(self):
        """Bits needed to pack one symbol (at least 1)."""
        return max(1, int(self.size - 1).bit_length())

    def dtype(self):
        if self.size <= 2**8:
            return np.uint8
        if self.size <= 2**16:
            return np.uint16
        return np.uint32

    def __contains__(self, symbol):
        return 0 <= symbol < self.size


class Word:
    """Immutable finite symbol sequence over an alphabet."""

    __slots__ = ("symbols", "alphabet")

    def __init__(self, symbols, alphabet):
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(alphabet)
        arr = np.asarray(symbols, dtype=alphabet.dtype())
        if arr.ndim != 1:
            arr = arr.reshape(-1)
        if arr.size and int(arr.max(initial=0)) >= alphabet.size:
            raise ValueError(
                f"symbol {int(arr.max())} out of range for alphabet of size {alphabet.size}"
            )
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "symbols", arr)
        object.__setattr__(self, "alphabet", alphabet)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def from_string(cls, text, alphabet=None):
        """Parse a word from decimal digit characters, e.g. "100101"."""
        syms = [int(ch) for ch in text]
        if alphabet is None:
            alphabet = Alphabet(max(syms, default=0) + 1)
        return cls(syms, alphabet)

    def to_string(self):
        if self.alphabet.size > 10:
            raise ValueError("to_string needs alphabet size <= 10 (one digit per symbol)")
        return "".join(str(int(s)) for s in self.symbols)

    def prefix(self, n):
        return Word(self.symbols[:n], self.alphabet)

    def __len__(self):
        return int(self.symbols.size)

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return Word(self.symbols[idx], self.alphabet)
        return int(self.symbols[idx])

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.symbols, other.symbols)

    def __hash__(self):
        return hash((self.alphabet, self.symbols.tobytes()))

    def __repr__(self):
        if len(self) <= 32 and self.alphabet.size <= 10:
            return f"Word({self.to_string()!r}, l={self.alphabet.size})"
        return f"Word(<{len(self)} symbols>, l={self.alphabet.size})"


def _validate_prob_vector(p, what, atol=PROB_ATOL):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{what} must be a non-empty 1-d vector")
    if np.any(p < 0):
        raise ValueError(f"{what} has negative entries")
    if abs(float(p.sum()) - 1.0) > atol:
        raise ValueError(f"{what} sums to {p.sum()!r}, expected 1 within {atol}")
    return p


class ProcessSpec:
    """Base class for stationary process descriptions."""

    @property
    def alphabet(self):
        raise NotImplementedError

    def is_ergodic(self):
        return True


@dataclass(frozen=True)
class IID(ProcessSpec):
    """Independent draws from a fixed distribution over the alphabet."""

    p: tuple

    def __post_init__(self):
        p = _validate_prob_vector(self.p, "IID probability vector")
        object.__setattr__(self, "p", tuple(float(x) for x in p))

    @property
    def alphabet(self):
        return Alphabet(len(self.p))


@dataclass(frozen=True)
class Markov(ProcessSpec):
    """Stationary finite Markov chain; paths start from the stationary vector."""

    transition: tuple
    pi: tuple = None

    def __post_init__(self):
        P = np.asarray(self.transition, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
            raise ValueError("transition matrix must be square and non-empty")
        for i in range(P.shape[0]):
            _validate_prob_vector(P[i], f"transition row {i}")
        if self.pi is None:
            pi = _stationary_vector(P)
        else:
            pi = _validate_prob_vector(self.pi, "stationary vector", atol=1e-9)
        resid = float(np.abs(pi @ P - pi).max())
        if resid > STATIONARY_ATOL:
            raise ValueError(f"pi @ P != pi (residual {resid:.3e} > {STATIONARY_ATOL})")
        object.__setattr__(self, "transition", tuple(tuple(float(x) for x in row) for row in P))
        object.__setattr__(self, "pi", tuple(float(x) for x in pi))

    @property
    def alphabet(self):
        return Alphabet(len(self.pi))

    def transition_matrix(self):
        return np.asarray(self.transition, dtype=float)

    def stationary_vector(self):
        return np.asarray(self.pi, dtype=float)


def _stationary_vector(P):
    """Solve pi @ P = pi, sum(pi) = 1 by least squares."""
    l = P.shape[0]
    A = np.vstack([P.T - np.eye(l), np.ones((1, l))])
    b = np.zeros(l + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    s = pi.sum()
    if s <= 0:
        raise ValueError("failed to compute a stationary vector")
    return pi / s


@dataclass(frozen=True)
class Periodic(ProcessSpec):
    """Deterministic repetition of a fixed word."""

    word: tuple
    alphabet_size: int = None

    def __post_init__(self):
        w = tuple(int(s) for s in self.word)
        if len(w) == 0:
            raise ValueError("periodic word must be non-empty")
        size = self.alphabet_size if self.alphabet_size is not None else max(w) + 1
        if any(not 0 <= s < size for s in w):
            raise ValueError("periodic word symbol out of range")
        object.__setattr__(self, "word", w)
        object.__setattr__(self, "alphabet_size", int(size))

    @property
    def alphabet(self):
        return Alphabet(self.alphabet_size)


@dataclass(frozen=True)
class Mixture(ProcessSpec):
    """Convex combination of ergodic components (a non-ergodic process)."""

    weights: tuple
    components: tuple

    def __post_init__(self):
        w = _validate_prob_vector(self.weights, "mixture weights")
        if np.any(w <= 0):
            raise ValueError("mixture weights must lie in (0, 1]")
        comps = tuple(self.components)
        if len(comps) != len(w) or len(comps) == 0:
            raise ValueError("weights and components must be non-empty and equal in number")
        for c in comps:
            if isinstance(c, Mixture):
                raise ValueError("nested mixtures are not supported; flatten the components")
            if not isinstance(c, ProcessSpec):
                raise TypeError(f"component {c!r} is not a ProcessSpec")
        sizes = {c.alphabet.size for c in comps}
        if len(sizes) != 1:
            raise ValueError(f"components use different alphabet sizes: {sorted(sizes)}")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "components", comps)

    @property
    def alphabet(self):
        return self.components[0].alphabet

    def is_ergodic(self):
        first = self.components[0]
        return all(c == first for c in self.components)


def analytic_entropy(spec):
    """Entropy rate of a process spec in nats per symbol.

    IID: -sum p log p. Markov: -sum_i pi_i sum_j P_ij log P_ij.
    Periodic: 0. Mixture: the weight-average of component entropies
    (entropy is affine over mixtures).
    """
    if isinstance(spec, IID):
        p = np.asarray(spec.p)
        nz = p[p > 0]
        return float(-(nz * np.log(nz)).sum())
    if isinstance(spec, Markov):
        P = spec.transition_matrix()
        pi = spec.stationary_vector()
        h = 0.0
        for i in range(P.shape[0]):
            row = P[i]
            nz = row[row > 0]
            h += pi[i] * float(-(nz * np.log(nz)).sum())
        return h
    if isinstance(spec, Periodic):
        return 0.0
    if isinstance(spec, Mixture):
        return float(sum(w * analytic_entropy(c) for w, c in zip(spec.weights, spec.components)))
    raise TypeError(f"unknown process spec {spec!r}")


def _categorical(rng, p, n):
    """n draws from distribution p using inverse-CDF on uniform doubles."""
    cum = np.cumsum(np.asarray(p, dtype=float))
    cum[-1] = 1.0
    u = rng.random(n)
    return np.searchsorted(cum, u, side="right")


def _sample_into(spec, n, rng):
    """Sample n symbols of an ergodic spec into a fresh array, consuming rng."""
    l = spec.alphabet.size
    dtype = spec.alphabet.dtype()
    if n == 0:
        return np.empty(0, dtype=dtype)
    if isinstance(spec, Periodic):
        period = np.asarray(spec.word, dtype=dtype)
        reps = -(-n // len(period))
        return np.tile(period, reps)[:n]
    if isinstance(spec, IID):
        return _categorical(rng, spec.p, n).astype(dtype)
    if isinstance(spec, Markov):
        # cumulative rows as plain lists: the per-step scan below beats numpy
        # scalar indexing for small alphabets
        C = np.cumsum(spec.transition_matrix(), axis=1)
        C[:, -1] = 1.0
        crows = C.tolist()
        cpi = np.cumsum(spec.stationary_vector()).tolist()
        cpi[-1] = 1.0
        u = rng.random(n).tolist()
        out = np.empty(n, dtype=dtype)
        s = 0
        u0 = u[0]
        while u0 > cpi[s]:
            s += 1
        out[0] = s
        for j in range(1, n):
            uj = u[j]
            row = crows[s]
            s = 0
            while uj > row[s]:
                s += 1
            out[j] = s
        return out
    raise TypeError(f"cannot sample from {spec!r}")


def sample_path(spec, n, seed):
    """Length-n realization of an ergodic spec; frequency-typical as n grows.

    Mixtures with two or more distinct components are rejected: their sample
    paths are typical for a single component, never for the mixture. Use
    quasi_generic_path for those.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if isinstance(spec, Mixture):
        if not spec.is_ergodic():
            raise ValueError(
                "sample_path rejects mixtures with >= 2 distinct components; "
                "use quasi_generic_path"
            )
        spec = spec.components[0]
    rng = make_rng(seed)
    return Word(_sample_into(spec, n, rng), spec.alphabet)


def quasi_generic_path(spec, n, block_schedule=32, seed=0):
    """Concatenated-block realization whose block frequencies converge to a mixture's.

    Round j hands component i a freshly sampled block of ceil(w_i * j * L)
    symbols, L = block_schedule. Block lengths grow without bound while every
    prefix's composition converges to the weight vector, so empirical m-block
    frequencies over prefixes approach sum_i w_i mu_i(block). Natural
    evaluation checkpoints are the round boundaries.
    """
    if not isinstance(spec, Mixture):
        raise ValueError("quasi_generic_path expects a Mixture spec")
    if block_schedule < 1:
        raise ValueError("block_schedule must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = make_rng(seed)
    dtype = spec.alphabet.dtype()
    chunks = []
    total = 0
    j = 1
    while total < n:
        for w_i, comp in zip(spec.weights, spec.components):
            length = math.ceil(w_i * j * block_schedule)
            chunks.append(_sample_into(comp, length, rng))
            total += length
        j += 1
    if not chunks:
        return Word(np.empty(0, dtype=dtype), spec.alphabet)
    return Word(np.concatenate(chunks)[:n], spec.alphabet)
