import math
import random
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import bleu_oracle, cross_entropy_oracle, inception_oracle, lcs_oracle, rouge_oracle

from structprompt.errors import DegenerateRow, EmptyInput, LengthMismatch
from structprompt.metrics import (
    DistributionSequence,
    ZeroProbabilityWarning,
    aggregate_seeds,
    bleu,
    corpus_bleu,
    corpus_rouge_l,
    exact_match,
    inception_score,
    lcs_length,
    parse_mean_std,
    rouge_l,
    token_cross_entropy,
)

WORDS = "a b c d e".split()


def _random_dist(rng, n, k):
    rows = []
    for _ in range(n):
        w = [rng.random() + 1e-3 for _ in range(k)]
        s = math.fsum(w)
        row = [x / s for x in w]
        row[-1] = 1.0 - math.fsum(row[:-1])
        rows.append(row)
    return rows


def test_ce_perfect_prediction_is_zero():
    pred = DistributionSequence(("a", "b"), ((1.0, 0.0), (0.0, 1.0)))
    assert token_cross_entropy(["a", "b"], pred) == 0.0


def test_ce_uniform():
    pred = DistributionSequence(tuple("wxyz"), ((0.25,) * 4,) * 2)
    assert abs(token_cross_entropy("w z", pred) - 2 * math.log(4)) <= 1e-9


def test_ce_against_oracle():
    rng = random.Random(3)
    for _ in range(100):
        n, k = rng.randint(1, 8), rng.randint(2, 6)
        vocab = [f"t{i}" for i in range(k)]
        rows = _random_dist(rng, n, k)
        ref = [rng.choice(vocab) for _ in range(n)]
        got = token_cross_entropy(ref, DistributionSequence(vocab, rows))
        assert got == pytest.approx(cross_entropy_oracle(ref, vocab, rows), rel=1e-9)


def test_ce_zero_probability_warns():
    pred = DistributionSequence(("a", "b"), ((0.0, 1.0),))
    with pytest.warns(ZeroProbabilityWarning):
        assert token_cross_entropy(["a"], pred) == math.inf


def test_ce_length_mismatch():
    pred = DistributionSequence(("a",), ((1.0,),))
    with pytest.raises(LengthMismatch):
        token_cross_entropy(["a", "a"], pred)


def test_ce_rejects_bad_rows():
    with pytest.raises(ValueError):
        DistributionSequence(("a", "b"), ((0.5, 0.6),))
    with pytest.raises(ValueError):
        DistributionSequence(("a", "a"), ((0.5, 0.5),))


def test_ce_decreases_toward_reference():
    rng = random.Random(11)
    vocab = list("abcd")
    ref = [rng.choice(vocab) for _ in range(6)]
    base = _random_dist(rng, 6, 4)
    onehot = [[1.0 if v == t else 0.0 for v in vocab] for t in ref]
    last = math.inf
    for lam in np.linspace(0, 1, 11):
        rows = [[(1 - lam) * p + lam * q for p, q in zip(r, o)] for r, o in zip(base, onehot)]
        rows = [r[:-1] + [1.0 - math.fsum(r[:-1])] for r in rows]
        ce = token_cross_entropy(ref, DistributionSequence(vocab, rows))
        assert ce < last
        last = ce
    assert last == pytest.approx(0.0, abs=1e-12)


def test_bleu_identity_and_disjoint():
    s = "add a purple cube at the center"
    assert bleu(s, s) == 1.0
    assert bleu("x y z w", "a b c d") == 0.0


def test_bleu_short_candidate():
    assert bleu("the cat sat", "the cat sat down") == pytest.approx(0.716531310573789, rel=1e-12)
    assert bleu("the cat sat", "the cat sat down") == pytest.approx(math.exp(-1 / 3), rel=1e-12)


def test_bleu_empty_candidate():
    assert bleu("", "a b") == 0.0


def test_bleu_against_oracle():
    rng = random.Random(5)
    for _ in range(100):
        c = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 9)))
        r = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 9)))
        assert bleu(c, r) == pytest.approx(bleu_oracle(c, r), rel=1e-9, abs=0)


def test_corpus_bleu_single_pair_matches_sentence():
    c, r = "a b c d e a", "a b c d a"
    assert corpus_bleu([c], [r]) == pytest.approx(bleu(c, r), rel=1e-12)
    assert corpus_bleu(["a b c d"] * 3, ["a b c d"] * 3) == 1.0
    with pytest.raises(EmptyInput):
        corpus_bleu([], [])


def test_rouge_example():
    p, r, f = rouge_l("a c d", "a b c d")
    assert (p, r) == (1.0, 0.75)
    assert f == pytest.approx(6 / 7, rel=1e-12)


def test_rouge_identity_and_disjoint():
    assert rouge_l("x y", "x y") == (1.0, 1.0, 1.0)
    assert rouge_l("x y", "z w") == (0.0, 0.0, 0.0)


def test_rouge_against_oracle():
    rng = random.Random(9)
    for _ in range(100):
        c = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 8)))
        r = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 8)))
        assert lcs_length(c.split(), r.split()) == lcs_oracle(c.split(), r.split())
        for got, want in zip(rouge_l(c, r), rouge_oracle(c, r)):
            assert got == pytest.approx(want, rel=1e-9, abs=0)


@given(st.lists(st.sampled_from(WORDS), max_size=8), st.lists(st.sampled_from(WORDS), min_size=1, max_size=8))
def test_scores_bounded(c, r):
    assert 0.0 <= bleu(c, r) <= 1.0
    assert all(0.0 <= x <= 1.0 for x in rouge_l(c, r))


def test_corpus_rouge_and_exact_match():
    assert corpus_rouge_l(["a b", "x"], ["a b", "y"]) == 0.5
    assert exact_match(["a", "b"], ["a", "c"]) == 0.5
    with pytest.raises(ValueError):
        exact_match(["a"], [])


def test_is_uniform_rows():
    assert inception_score(np.full((7, 5), 0.2)).mean == pytest.approx(1.0, abs=1e-12)


def test_is_balanced_one_hot():
    assert inception_score(np.eye(10)).mean == pytest.approx(10.0, rel=1e-12)
    assert inception_score(np.tile(np.eye(10), (3, 1))).mean == pytest.approx(10.0, rel=1e-12)


def test_is_against_oracle():
    rng = random.Random(21)
    for _ in range(100):
        rows = _random_dist(rng, 20, 5)
        got = inception_score(rows).mean
        assert got == pytest.approx(inception_oracle(rows), rel=1e-9)
        assert got >= 1.0 - 1e-12


def test_is_row_order_invariant():
    rng = random.Random(1)
    rows = _random_dist(rng, 30, 4)
    shuffled = rows[:]
    rng.shuffle(shuffled)
    assert inception_score(rows).mean == pytest.approx(inception_score(shuffled).mean, rel=1e-12)


def test_is_splits():
    m = np.vstack([np.eye(4), np.full((4, 4), 0.25)])
    v = inception_score(m, splits=2)
    assert v.per_seed == pytest.approx((4.0, 1.0))
    assert v.mean == pytest.approx(2.5)
    with pytest.raises(ValueError):
        inception_score(m, splits=9)


@pytest.mark.parametrize(
    "m",
    [[[0.5, 0.4]], [[1.2, -0.2]], [[float("nan"), 1.0]], [], [[1.0]] * 0],
)
def test_is_degenerate(m):
    with pytest.raises(DegenerateRow):
        inception_score(m)


def test_aggregate_seeds():
    v = aggregate_seeds([1, 2, 3])
    assert (v.mean, v.std) == (2.0, 1.0)
    assert aggregate_seeds([0.446] * 3).std == 0.0
    one = aggregate_seeds([0.5])
    assert one.single and one.std == 0.0
    with pytest.raises(EmptyInput):
        aggregate_seeds([])


def test_format_round_trip():
    v = aggregate_seeds([0.470, 0.477, 0.472])
    text = v.format()
    assert text == "0.473 ± 0.004"
    mean, std = parse_mean_std(text)
    assert abs(mean - v.mean) <= 5e-4 and abs(std - v.std) <= 5e-4
    with pytest.raises(ValueError):
        parse_mean_std("0.4 +- 0.1")


def test_no_stray_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        token_cross_entropy(["a"], DistributionSequence(("a",), ((1.0,),)))
