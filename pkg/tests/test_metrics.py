import numpy as np
import pytest

from seqent import (
    Alphabet,
    CertificateError,
    MatchCertificate,
    Word,
    distance_profile,
    edit_fn,
    edit_fn_fast,
    hamming_dn,
    make_rng,
    verify_hat_f_certificate,
)
from seqent.channels import substitute_channel

import oracles


def _random_word(rng, n, l=2):
    return Word(np.minimum((rng.random(n) * l).astype(int), l - 1), Alphabet(l))


def alternating(k, first):
    # prefix of length 2k of (01)^inf or (10)^inf
    other = 1 - first
    return Word([first, other] * k, Alphabet(2))


def test_hamming_examples():
    w = Word.from_string("111")
    assert hamming_dn(w, w) == 0.0
    assert hamming_dn(Word.from_string("101"), Word.from_string("110")) == pytest.approx(2 / 3)
    u = Word.from_string("0110")
    comp = Word([1 - s for s in u.symbols], Alphabet(2))
    assert hamming_dn(u, comp) == 1.0


def test_hamming_errors():
    with pytest.raises(ValueError):
        hamming_dn(Word.from_string("01"), Word.from_string("011"))
    empty = Word([], Alphabet(2))
    with pytest.raises(ValueError):
        hamming_dn(empty, empty)


def test_edit_fn_identity():
    w = Word.from_string("01101")
    value, cert = edit_fn(w, w)
    assert value == 0.0
    assert cert.I == tuple(range(5))
    assert cert.I_prime == tuple(range(5))


def test_edit_fn_simple_swap():
    u = Word.from_string("12", Alphabet(3))
    w = Word.from_string("21", Alphabet(3))
    value, cert = edit_fn(u, w)
    assert value == 0.5
    assert len(cert) == 1
    assert u[cert.I[0]] == w[cert.I_prime[0]]


def test_edit_fn_alternating_prefixes():
    for k in (1, 2, 3, 5, 8):
        u, w = alternating(k, 0), alternating(k, 1)
        value, cert = edit_fn(u, w)
        assert len(cert) == 2 * k - 1
        assert value == pytest.approx(1 / (2 * k), abs=1e-15)
        assert oracles.lcs_dp(u.symbols, w.symbols) == 2 * k - 1


def test_edit_fn_matches_dp_oracle_on_random_words():
    rng = make_rng(101)
    for _ in range(200):
        n = 1 + int(rng.random() * 24)
        l = 2 + int(rng.random() * 3)
        u, w = _random_word(rng, n, l), _random_word(rng, n, l)
        value, cert = edit_fn(u, w)
        k = oracles.lcs_dp(u.symbols, w.symbols)
        assert len(cert) == k
        assert value == pytest.approx(1 - k / n, abs=1e-15)
        # certificate is a genuine common subsequence
        assert np.array_equal(u.symbols[list(cert.I)], w.symbols[list(cert.I_prime)])


def test_edit_fn_fast_equals_edit_fn():
    rng = make_rng(77)
    for _ in range(100):
        n = 1 + int(rng.random() * 64)
        u, w = _random_word(rng, n), _random_word(rng, n)
        assert edit_fn_fast(u, w) == edit_fn(u, w)[0]


def test_edit_fn_deterministic_certificates():
    rng = make_rng(5)
    u, w = _random_word(rng, 50, 3), _random_word(rng, 50, 3)
    assert edit_fn(u, w) == edit_fn(u, w)


def test_metric_axioms_randomized():
    rng = make_rng(303)
    for _ in range(50):
        n = 2 + int(rng.random() * 16)
        u, w, v = (_random_word(rng, n) for _ in range(3))
        assert hamming_dn(u, w) == hamming_dn(w, u)
        assert edit_fn_fast(u, w) == edit_fn_fast(w, u)
        assert hamming_dn(u, u) == 0.0
        assert edit_fn_fast(u, u) == 0.0
        # domination and triangle
        assert edit_fn_fast(u, w) <= hamming_dn(u, w) + 1e-15
        assert hamming_dn(u, w) <= hamming_dn(u, v) + hamming_dn(v, w) + 1e-15
        assert edit_fn_fast(u, w) <= edit_fn_fast(u, v) + edit_fn_fast(v, w) + 1e-15


def test_fbar_triangle_exhaustive_small():
    # all 2^24 triples of binary words at n = 8, via the oracle LCS matrix;
    # integer form of the inequality avoids float noise entirely
    n = 8
    deletions = n - oracles.lcs_all_pairs_binary(n).astype(np.int16)
    for lo in range(0, 1 << n, 64):
        hi = lo + 64
        lhs = deletions[lo:hi, None, :]
        rhs = deletions[lo:hi, :, None] + deletions[None, :, :]
        assert (lhs <= rhs).all()


def test_insertion_robustness():
    # dropping one symbol and re-aligning moves fbar by <= 1/n while dbar can hit 1
    rng = make_rng(21)
    for _ in range(20):
        n = 8 + int(rng.random() * 56)
        x = _random_word(rng, n)
        y = Word(np.concatenate([x.symbols[1:], x.symbols[:1]]), x.alphabet)
        assert edit_fn_fast(x, y) <= 1 / n + 1e-15
    u, w = alternating(8, 0), alternating(8, 1)
    assert hamming_dn(u, w) == 1.0
    assert edit_fn_fast(u, w) == pytest.approx(1 / 16, abs=1e-15)


def test_distance_profile_identical():
    w = Word.from_string("0110100110")
    prof = distance_profile(w, w, [2, 5, 10])
    assert all(d == 0.0 and f == 0.0 for _, d, f in prof.checkpoints)
    assert prof.limsup_estimate_d == 0.0
    assert prof.limsup_estimate_f == 0.0


def test_distance_profile_alternating():
    k = 32
    u, w = alternating(k, 0), alternating(k, 1)
    cps = [2, 8, 16, 32, 64]
    prof = distance_profile(u, w, cps)
    for n, d, f in prof.checkpoints:
        assert d == 1.0
        assert f == pytest.approx(1 / n, abs=1e-15)
    assert prof.limsup_estimate_d == 1.0
    # tail max over the last two checkpoints
    assert prof.limsup_estimate_f == pytest.approx(1 / 32, abs=1e-15)


def test_distance_profile_checkpoints_match_pairwise_values():
    rng = make_rng(99)
    u, w = _random_word(rng, 120, 3), _random_word(rng, 120, 3)
    cps = [3, 17, 50, 120]
    prof = distance_profile(u, w, cps)
    for n, d, f in prof.checkpoints:
        assert d == hamming_dn(u.prefix(n), w.prefix(n))
        assert f == pytest.approx(edit_fn_fast(u.prefix(n), w.prefix(n)), abs=1e-15)


def test_distance_profile_substitution_limsup():
    eps = 0.1
    x = _random_word(make_rng(1), 10_000)
    y, changed = substitute_channel(x, eps, 2)
    prof = distance_profile(x, y, [2500, 5000, 7500, 10_000])
    sigma = (eps * (1 - eps) / 2500) ** 0.5
    assert prof.limsup_estimate_d <= eps + 3 * sigma
    assert prof.limsup_estimate_f <= prof.limsup_estimate_d


def test_distance_profile_errors():
    w = Word.from_string("0101")
    with pytest.raises(ValueError):
        distance_profile(w, w, [])
    with pytest.raises(ValueError):
        distance_profile(w, w, [2, 2])
    with pytest.raises(ValueError):
        distance_profile(w, w, [1, 5])


def test_verify_hat_f_identity():
    w = Word.from_string("0110")
    cert = MatchCertificate(tuple(range(4)), tuple(range(4)))
    assert verify_hat_f_certificate(w, w, cert, 0.0)


def test_verify_hat_f_density_threshold():
    u = Word.from_string("12", Alphabet(3))
    w = Word.from_string("21", Alphabet(3))
    cert = MatchCertificate((0,), (1,))  # the matched "1"
    assert verify_hat_f_certificate(u, w, cert, 0.5)
    assert not verify_hat_f_certificate(u, w, cert, 0.4)


def test_verify_hat_f_mismatch_is_false():
    u = Word.from_string("12", Alphabet(3))
    w = Word.from_string("21", Alphabet(3))
    cert = MatchCertificate((0,), (0,))  # u[0]=1 vs w[0]=2
    assert verify_hat_f_certificate(u, w, cert, 0.9) is False


def test_malformed_certificates_raise():
    with pytest.raises(CertificateError):
        MatchCertificate((1, 0), (0, 1))
    with pytest.raises(CertificateError):
        MatchCertificate((0, 1), (0,))
    u = Word.from_string("01")
    cert = MatchCertificate((5,), (0,))
    with pytest.raises(CertificateError):
        verify_hat_f_certificate(u, u, cert, 0.5)


def test_certificate_soundness_of_edit_fn():
    rng = make_rng(404)
    for _ in range(50):
        n = 2 + int(rng.random() * 40)
        u, w = _random_word(rng, n, 3), _random_word(rng, n, 3)
        value, cert = edit_fn(u, w)
        assert verify_hat_f_certificate(u, w, cert, value)


def test_verify_hat_f_with_checkpoints():
    u = Word.from_string("0011")
    w = Word.from_string("0011")
    cert = MatchCertificate((2, 3), (2, 3))
    # full-length density is 1/2, but at checkpoint 2 it is 0
    assert verify_hat_f_certificate(u, w, cert, 0.5)
    assert not verify_hat_f_certificate(u, w, cert, 0.5, checkpoints=[2, 4])
