"""Word serialization and process-spec config files.

Words travel either as raw bytes (one symbol per byte, alphabet size <= 256)
or as run-length text: whitespace-separated SYMxCOUNT tokens, e.g.
"0x5 1x3 0x2". Process specs are JSON objects with a "kind" discriminator:

    {"kind": "iid", "p": [0.5, 0.5]}
    {"kind": "markov", "transition": [[0.9, 0.1], [0.2, 0.8]], "pi": [...]}
    {"kind": "periodic", "word": "01"}            # or a symbol list
    {"kind": "mixture", "weights": [...], "components": [...]}

"pi" is optional for markov (computed when omitted); "alphabet_size" is
optional for periodic.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import IID, Alphabet, Markov, Mixture, Periodic, Word


def write_word_bytes(w, path):
    if w.alphabet.size > 256:
        raise ValueError("raw byte serialization needs alphabet size <= 256")
    Path(path).write_bytes(w.symbols.astype(np.uint8).tobytes())


def read_word_bytes(path, alphabet_size=None):
    data = Path(path).read_bytes()
    arr = np.frombuffer(data, dtype=np.uint8)
    if alphabet_size is None:
        alphabet_size = int(arr.max(initial=0)) + 1
    return Word(arr, Alphabet(alphabet_size))


def word_to_rle(w):
    if len(w) == 0:
        return ""
    syms = w.symbols
    change = np.flatnonzero(syms[1:] != syms[:-1]) + 1
    starts = np.concatenate([[0], change])
    ends = np.concatenate([change, [len(w)]])
    return " ".join(f"{int(syms[a])}x{int(b - a)}" for a, b in zip(starts, ends))


def word_from_rle(text, alphabet_size=None):
    syms = []
    for token in text.split():
        sym_s, _, count_s = token.partition("x")
        if not count_s:
            raise ValueError(f"bad run-length token {token!r}, expected SYMxCOUNT")
        sym, count = int(sym_s), int(count_s)
        if count < 1:
            raise ValueError(f"run count must be >= 1 in token {token!r}")
        syms.extend([sym] * count)
    if alphabet_size is None:
        alphabet_size = max(syms, default=0) + 1
    return Word(syms, Alphabet(alphabet_size))


def write_word_rle(w, path):
    Path(path).write_text(word_to_rle(w) + "\n")


def read_word_rle(path, alphabet_size=None):
    return word_from_rle(Path(path).read_text(), alphabet_size)


def write_word(w, path, fmt=None):
    fmt = fmt or ("rle" if str(path).endswith((".rle", ".txt")) else "bytes")
    if fmt == "rle":
        write_word_rle(w, path)
    elif fmt == "bytes":
        write_word_bytes(w, path)
    else:
        raise ValueError(f"unknown word format {fmt!r}")


def read_word(path, alphabet_size=None, fmt=None):
    fmt = fmt or ("rle" if str(path).endswith((".rle", ".txt")) else "bytes")
    if fmt == "rle":
        return read_word_rle(path, alphabet_size)
    if fmt == "bytes":
        return read_word_bytes(path, alphabet_size)
    raise ValueError(f"unknown word format {fmt!r}")


def process_spec_from_dict(d):
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError("process spec must be an object with a 'kind' field")
    kind = d["kind"]
    if kind == "iid":
        return IID(p=tuple(d["p"]))
    if kind == "markov":
        return Markov(
            transition=tuple(tuple(row) for row in d["transition"]),
            pi=tuple(d["pi"]) if d.get("pi") is not None else None,
        )
    if kind == "periodic":
        word = d["word"]
        if isinstance(word, str):
            word = [int(ch) for ch in word]
        return Periodic(word=tuple(word), alphabet_size=d.get("alphabet_size"))
    if kind == "mixture":
        return Mixture(
            weights=tuple(d["weights"]),
            components=tuple(process_spec_from_dict(c) for c in d["components"]),
        )
    raise ValueError(f"unknown process spec kind {kind!r}")


def process_spec_to_dict(spec):
    if isinstance(spec, IID):
        return {"kind": "iid", "p": list(spec.p)}
    if isinstance(spec, Markov):
        return {
            "kind": "markov",
            "transition": [list(row) for row in spec.transition],
            "pi": list(spec.pi),
        }
    if isinstance(spec, Periodic):
        return {"kind": "periodic", "word": list(spec.word), "alphabet_size": spec.alphabet_size}
    if isinstance(spec, Mixture):
        return {
            "kind": "mixture",
            "weights": list(spec.weights),
            "components": [process_spec_to_dict(c) for c in spec.components],
        }
    raise TypeError(f"unknown process spec {spec!r}")


def load_process_spec(path):
    with open(path) as f:
        return process_spec_from_dict(json.load(f))
