import math
import random

import numpy as np
import pytest

from corpusforge.evalharness.metrics import (
    accuracy_with_stderr,
    byte_ppl,
    byte_ppl_by_lang,
    linear_cka,
)
from oracles import oracle_linear_cka


def test_constant_scores_have_zero_stderr():
    report = accuracy_with_stderr([1.0] * 40, seed=1)
    assert report.score == 1.0
    assert report.stderr == 0.0
    assert report.n == 40


def test_multiple_choice_scale_stderr():
    # 45 of 127 correct: the binomial stderr is ~0.042
    scores = [1.0] * 45 + [0.0] * 82
    report = accuracy_with_stderr(scores, bootstrap_iters=1000, seed=7)
    assert report.score == pytest.approx(45 / 127, abs=1e-12)
    assert report.stderr == pytest.approx(0.042, abs=0.005)


def test_bernoulli_half_matches_closed_form():
    rng = random.Random(13)
    scores = [float(rng.random() < 0.5) for _ in range(1000)]
    report = accuracy_with_stderr(scores, bootstrap_iters=1000, seed=3)
    closed_form = math.sqrt(0.25 / 1000)
    assert abs(report.stderr - closed_form) / closed_form < 0.10


def test_bootstrap_deterministic_per_seed():
    scores = [1.0, 0.0, 1.0, 1.0, 0.0]
    a = accuracy_with_stderr(scores, seed=11)
    b = accuracy_with_stderr(scores, seed=11)
    c = accuracy_with_stderr(scores, seed=12)
    assert a.stderr == b.stderr
    assert a.stderr != c.stderr


def test_empty_scores_rejected():
    with pytest.raises(ValueError):
        accuracy_with_stderr([])


# -- byte perplexity -------------------------------------------------------


def uniform_byte_doc(n_bytes, doc_id="d"):
    lp = -8 * math.log(2)  # ln(1/256)
    return {
        "id": doc_id,
        "lang": "liv",
        "byte_count": n_bytes,
        "token_logprobs": [lp] * n_bytes,  # byte-aligned tokens
    }


def test_uniform_byte_model_is_exactly_256():
    assert byte_ppl([uniform_byte_doc(4)]) == 256.0
    assert byte_ppl([uniform_byte_doc(8, "a"), uniform_byte_doc(8, "b")]) == 256.0


def test_perfect_model_is_exactly_1():
    doc = {"id": "p", "lang": "vro", "byte_count": 12, "token_logprobs": [0.0, 0.0, 0.0]}
    assert byte_ppl([doc]) == 1.0


def test_three_document_hand_summed_fixture():
    docs = [
        {"id": "a", "lang": "kpv", "byte_count": 7, "token_logprobs": [-1.0, -2.0]},
        {"id": "b", "lang": "kpv", "byte_count": 3, "token_logprobs": [-0.5]},
        {"id": "c", "lang": "kpv", "byte_count": 10, "token_logprobs": [-3.25, -0.25, -1.0]},
    ]
    # NLL 8.0 over 20 bytes
    assert byte_ppl(docs) == pytest.approx(math.exp(0.4), abs=1e-12)


def test_per_language_pooling():
    out = byte_ppl_by_lang([uniform_byte_doc(4), {**uniform_byte_doc(4), "lang": "vro"}])
    assert out == {"liv": 256.0, "vro": 256.0}


def test_zero_bytes_rejected():
    with pytest.raises(ValueError):
        byte_ppl([{"id": "z", "lang": "liv", "byte_count": 0, "token_logprobs": [-1.0]}])
    with pytest.raises(ValueError):
        byte_ppl([])


def test_positive_or_nonfinite_logprobs_rejected():
    with pytest.raises(ValueError):
        byte_ppl([{"id": "p", "lang": "liv", "byte_count": 2, "token_logprobs": [0.1]}])
    with pytest.raises(ValueError):
        byte_ppl([{"id": "q", "lang": "liv", "byte_count": 2, "token_logprobs": [float("-inf")]}])


def test_increasing_any_logprob_strictly_lowers_perplexity():
    base = {"id": "m", "lang": "liv", "byte_count": 9, "token_logprobs": [-1.5, -2.0, -0.75]}
    improved = {**base, "token_logprobs": [-1.5, -1.0, -0.75]}
    assert byte_ppl([improved]) < byte_ppl([base])


# -- linear CKA ----------------------------------------------------------------


def test_cka_self_similarity_is_one():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(40, 12))
    assert linear_cka(x, x) == pytest.approx(1.0, abs=1e-9)


def test_cka_orthogonal_invariance():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(30, 10))
    q, _ = np.linalg.qr(rng.normal(size=(10, 10)))
    assert linear_cka(x, x @ q) == pytest.approx(1.0, abs=1e-6)


def test_cka_isotropic_scaling_invariance():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(25, 8))
    y = rng.normal(size=(25, 6))
    base = linear_cka(x, y)
    assert linear_cka(3.7 * x, y) == pytest.approx(base, abs=1e-9)
    assert linear_cka(x, 0.01 * y) == pytest.approx(base, abs=1e-9)


def test_cka_symmetry():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(20, 5))
    y = rng.normal(size=(20, 9))
    assert linear_cka(x, y) == pytest.approx(linear_cka(y, x), abs=1e-9)


def test_cka_small_fixture_matches_double_loop_oracle():
    rng = np.random.default_rng(9)
    x = rng.normal(size=(5, 3))
    y = rng.normal(size=(5, 4))
    assert linear_cka(x, y) == pytest.approx(oracle_linear_cka(x.tolist(), y.tolist()), abs=1e-9)


def test_cka_input_validation():
    rng = np.random.default_rng(10)
    x = rng.normal(size=(10, 3))
    with pytest.raises(ValueError, match="row counts"):
        linear_cka(x, rng.normal(size=(11, 3)))
    with pytest.raises(ValueError, match="zero-variance"):
        linear_cka(x, np.ones((10, 3)))
    bad = x.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError, match="NaN"):
        linear_cka(bad, x)
    with pytest.raises(ValueError, match="at least 2 rows"):
        linear_cka(x[:1], x[:1])
