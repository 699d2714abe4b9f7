import math

import numpy as np
import pytest

from teluref.mlp import (
    EmptyDatasetError,
    MentionPairClassifier,
    MlpConfig,
    ModelFormatError,
    NonFiniteGradientError,
    NonFiniteInputError,
    StaleCacheError,
    adam_step,
    backward,
    bce_loss,
    forward,
    init_model,
    load_model,
    predict_pair,
    predict_proba_matrix,
    save_model,
    train,
)
from teluref.sampling import PairDataset

SMALL = MlpConfig(input_dim=10, hidden1=12, hidden2=8, dropout_prob=0.0,
                  batch_size=4, epochs=1, seed=0)


def numeric_gradients(model, X, y, h=1e-5):
    """Central finite differences of the batch-mean loss, every coordinate."""
    grads = {}
    for name, param in model.parameters().items():
        param = np.atleast_1d(np.asarray(param))
        grad = np.zeros_like(param)
        it = np.nditer(param, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            original = param[idx]
            param[idx] = original + h
            loss_plus = bce_loss(forward(model, X)[0], y)
            param[idx] = original - h
            loss_minus = bce_loss(forward(model, X)[0], y)
            param[idx] = original
            grad[idx] = (loss_plus - loss_minus) / (2 * h)
        grads[name] = grad
    return grads


def max_relative_error(analytic, numeric):
    worst = 0.0
    for name in numeric:
        a = np.atleast_1d(np.asarray(analytic[name])).ravel()
        n = numeric[name].ravel()
        scale = np.maximum(np.abs(a), np.abs(n))
        live = scale > 1e-8  # coordinates dead under relu agree at ~0 by construction
        if live.any():
            worst = max(worst, float((np.abs(a - n)[live] / scale[live]).max()))
    return worst


# --- init -----------------------------------------------------------------------

def test_init_deterministic():
    a = init_model(MlpConfig(seed=123))
    b = init_model(MlpConfig(seed=123))
    for name in a.parameters():
        np.testing.assert_array_equal(a.parameters()[name], b.parameters()[name])


def test_init_he_uniform_bounds():
    model = init_model(MlpConfig(seed=5))
    assert np.abs(model.w1).max() <= math.sqrt(6.0 / 226)
    assert np.abs(model.w2).max() <= math.sqrt(6.0 / 512)
    assert np.abs(model.w_out).max() <= math.sqrt(6.0 / 128)


def test_init_biases_zero_and_moments_zero():
    model = init_model(MlpConfig(seed=5))
    assert np.all(model.b1 == 0.0) and np.all(model.b2 == 0.0)
    for v in model.adam_m.values():
        assert np.all(np.asarray(v) == 0.0)
    assert model.adam_t == 0


# --- forward ----------------------------------------------------------------------

def test_zero_weights_output_half():
    model = init_model(SMALL)
    model.w1[:] = 0; model.b1[:] = 0; model.w2[:] = 0; model.b2[:] = 0; model.w_out[:] = 0
    probs, _ = forward(model, np.random.default_rng(0).standard_normal((3, 10)))
    np.testing.assert_allclose(probs, 0.5)


def test_eval_mode_deterministic():
    model = init_model(SMALL)
    x = np.random.default_rng(1).standard_normal((5, 10))
    p1, _ = forward(model, x)
    p2, _ = forward(model, x)
    np.testing.assert_array_equal(p1, p2)


def test_nonfinite_input_rejected():
    model = init_model(SMALL)
    bad = np.zeros((1, 10))
    bad[0, 3] = np.nan
    with pytest.raises(NonFiniteInputError):
        forward(model, bad)


def test_probabilities_strictly_inside_unit_interval():
    model = init_model(MlpConfig(input_dim=20, hidden1=16, hidden2=8, seed=3))
    x = np.random.default_rng(3).standard_normal((10_000, 20)) * 50
    probs = predict_proba_matrix(model, x)
    assert np.all(probs > 0.0) and np.all(probs < 1.0)


def test_inverted_dropout_expectation_matches_eval():
    # relu must stay in its linear region for the expectation to be exact, so
    # use positive weights and positive inputs. Tiling one input into a large
    # batch draws an independent mask per row in a single forward pass.
    rng = np.random.default_rng(7)
    cfg = MlpConfig(input_dim=6, hidden1=10, hidden2=8, dropout_prob=0.5, seed=7)
    model = init_model(cfg)
    model.w1 = np.abs(model.w1)
    model.w2 = np.abs(model.w2)
    x = np.abs(rng.standard_normal(6)) + 0.1

    _, eval_cache = forward(model, x)
    draws = 200_000
    _, cache = forward(model, np.tile(x, (draws, 1)), dropout_rng=rng, dropout_prob=0.5)
    mc_mean = cache.h2d.mean(axis=0, keepdims=True)
    np.testing.assert_allclose(mc_mean, eval_cache.h2d, rtol=0.02)


def test_first_layer_dropout_expectation_exact_for_any_model():
    rng = np.random.default_rng(9)
    model = init_model(SMALL)
    x = rng.standard_normal(10)
    _, eval_cache = forward(model, x)
    draws = 200_000
    _, cache = forward(model, np.tile(x, (draws, 1)), dropout_rng=rng, dropout_prob=0.5)
    mc_mean = cache.h1d.mean(axis=0, keepdims=True)
    np.testing.assert_allclose(mc_mean, eval_cache.h1d, atol=0.02)


# --- loss --------------------------------------------------------------------------

def test_bce_at_uniform_prediction():
    assert bce_loss([0.5], [1.0]) == pytest.approx(math.log(2), abs=1e-12)
    assert bce_loss([0.5], [0.0]) == pytest.approx(math.log(2), abs=1e-12)


def test_bce_near_perfect_prediction():
    assert bce_loss([1.0 - 1e-12], [1.0]) == pytest.approx(0.0, abs=1e-10)


def test_bce_hand_computed_batch():
    expected = (-math.log(0.9) - math.log(0.8)) / 2
    assert bce_loss([0.9, 0.2], [1, 0]) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(0.164252, abs=1e-6)


def test_bce_nonnegative():
    rng = np.random.default_rng(2)
    p = rng.uniform(1e-9, 1 - 1e-9, size=500)
    y = rng.integers(0, 2, size=500)
    assert bce_loss(p, y) >= 0.0


# --- backward -----------------------------------------------------------------------

def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    for draw in range(3):
        cfg = MlpConfig(input_dim=10, hidden1=12, hidden2=8, dropout_prob=0.0,
                        seed=100 + draw)
        model = init_model(cfg)
        X = rng.standard_normal((4, 10))
        y = rng.integers(0, 2, size=4).astype(float)
        probs, cache = forward(model, X)
        analytic = backward(model, cache, y)
        numeric = numeric_gradients(model, X, y)
        assert max_relative_error(analytic, numeric) < 1e-4


def test_output_gradient_is_prob_minus_label():
    cfg = MlpConfig(input_dim=10, hidden1=12, hidden2=8, dropout_prob=0.0,
                    seed=4, output_bias=True)
    model = init_model(cfg)
    x = np.zeros((1, 10))
    for label in (0.0, 1.0):
        probs, cache = forward(model, x)
        grads = backward(model, cache, [label])
        assert float(grads["b_out"]) == pytest.approx(float(probs[0]) - label, abs=1e-12)


def test_relu_passes_gradient_when_all_positive():
    cfg = MlpConfig(input_dim=4, hidden1=3, hidden2=3, dropout_prob=0.0, seed=8)
    model = init_model(cfg)
    model.b1[:] = 10.0  # guarantee positive pre-activations
    model.b2[:] = 10.0
    x = np.random.default_rng(0).standard_normal((2, 4)) * 0.01
    _, cache = forward(model, x)
    assert np.all(cache.z1 > 0) and np.all(cache.z2 > 0)
    grads = backward(model, cache, [1.0, 0.0])
    # with relu open everywhere the b2 gradient equals the w_out-weighted delta
    delta = (cache.probs - np.array([1.0, 0.0])) / 2
    np.testing.assert_allclose(grads["b2"], delta.sum() * model.w_out, atol=1e-12)


def test_stale_cache_rejected():
    model = init_model(SMALL)
    x = np.random.default_rng(1).standard_normal((2, 10))
    probs, cache = forward(model, x)
    grads = backward(model, cache, [1.0, 0.0])
    adam_step(model, grads, SMALL)
    with pytest.raises(StaleCacheError):
        backward(model, cache, [1.0, 0.0])


# --- adam --------------------------------------------------------------------------

def test_adam_zero_gradients_change_nothing():
    model = init_model(SMALL)
    before = {k: np.array(v, copy=True) for k, v in model.parameters().items()}
    grads = {k: np.zeros_like(np.atleast_1d(v)) for k, v in model.parameters().items()}
    adam_step(model, grads, SMALL)
    for name, value in model.parameters().items():
        np.testing.assert_array_equal(np.atleast_1d(value), np.atleast_1d(before[name]))


def test_adam_single_step_hand_computed():
    # fresh state, g = 1 everywhere: m-hat = v-hat = 1, step = -lr/(1 + eps)
    model = init_model(SMALL)
    before = np.array(model.w_out, copy=True)
    grads = {name: np.ones_like(np.atleast_1d(p)) for name, p in model.parameters().items()}
    adam_step(model, grads, SMALL)
    delta = model.w_out - before
    expected = -SMALL.learning_rate / (1.0 + SMALL.adam_epsilon)
    np.testing.assert_allclose(delta, expected, rtol=1e-9)


def test_adam_step_counter():
    model = init_model(SMALL)
    grads = {name: np.ones_like(np.atleast_1d(p)) for name, p in model.parameters().items()}
    adam_step(model, grads, SMALL)
    adam_step(model, grads, SMALL)
    assert model.adam_t == 2


def test_adam_rejects_nonfinite_gradients():
    model = init_model(SMALL)
    grads = {name: np.full_like(np.atleast_1d(p), np.nan)
             for name, p in model.parameters().items()}
    with pytest.raises(NonFiniteGradientError):
        adam_step(model, grads, SMALL)


# --- training ------------------------------------------------------------------------

def blob_dataset(n=200, dim=226, seed=0):
    rng = np.random.default_rng(seed)
    half = n // 2
    pos = rng.standard_normal((half, dim)) * 0.5 + 0.6
    neg = rng.standard_normal((n - half, dim)) * 0.5 - 0.6
    vectors = np.vstack([pos, neg])
    labels = np.concatenate([np.ones(half, bool), np.zeros(n - half, bool)])
    return PairDataset(vectors=vectors, labels=labels)


def test_one_epoch_of_256_samples_is_two_steps():
    cfg = MlpConfig(input_dim=20, hidden1=8, hidden2=4, batch_size=128,
                    epochs=1, dropout_prob=0.0, seed=0)
    ds = PairDataset(
        vectors=np.random.default_rng(0).standard_normal((256, 20)),
        labels=np.random.default_rng(1).integers(0, 2, 256).astype(bool),
    )
    model, report = train(init_model(cfg), ds, cfg)
    assert model.adam_t == 2
    assert report.epochs_run == 1


def test_separable_blobs_reach_high_accuracy():
    cfg = MlpConfig(epochs=50, seed=0)
    ds = blob_dataset()
    model, report = train(init_model(cfg), ds, cfg)
    preds = predict_proba_matrix(model, ds.vectors) > 0.5
    accuracy = float((preds == ds.labels).mean())
    assert accuracy >= 0.99
    assert report.epoch_losses[-1] < report.epoch_losses[0]


def test_training_is_byte_deterministic():
    cfg = MlpConfig(input_dim=226, hidden1=32, hidden2=16, epochs=3, seed=9)
    ds = blob_dataset(n=120)
    first, _ = train(init_model(cfg), ds, cfg)
    second, _ = train(init_model(cfg), ds, cfg)
    assert save_model(first) == save_model(second)


def test_empty_dataset_rejected():
    cfg = MlpConfig(input_dim=4, hidden1=2, hidden2=2)
    empty = PairDataset(vectors=np.zeros((0, 4)), labels=np.zeros(0, bool))
    with pytest.raises(EmptyDatasetError):
        train(init_model(cfg), empty, cfg)


# --- persistence and prediction ----------------------------------------------------

def test_save_load_predict_bitwise_stable():
    cfg = MlpConfig(input_dim=30, hidden1=16, hidden2=8, epochs=2, seed=2)
    ds = blob_dataset(n=80, dim=30, seed=2)
    model, _ = train(init_model(cfg), ds, cfg)
    reloaded = load_model(save_model(model))
    x = np.random.default_rng(5).standard_normal(30)
    assert predict_pair(reloaded, x) == predict_pair(model, x)
    assert save_model(reloaded) == save_model(model)


def test_checkpoint_preserves_adam_state():
    cfg = MlpConfig(input_dim=10, hidden1=4, hidden2=4, epochs=1,
                    batch_size=8, seed=3, dropout_prob=0.0)
    ds = blob_dataset(n=32, dim=10, seed=3)
    model, _ = train(init_model(cfg), ds, cfg)
    restored = load_model(save_model(model, include_adam=True))
    assert restored.adam_t == model.adam_t
    for name in model.parameters():
        np.testing.assert_array_equal(
            np.atleast_1d(restored.adam_m[name]), np.atleast_1d(model.adam_m[name])
        )


def test_model_format_errors():
    with pytest.raises(ModelFormatError):
        load_model(b"not json at all")
    with pytest.raises(ModelFormatError):
        load_model(b'{"version": 99}')
    model = init_model(SMALL)
    import json as _json
    broken = _json.loads(save_model(model))
    broken["w1"] = [[0.0]]
    with pytest.raises(ModelFormatError):
        load_model(_json.dumps(broken))


def test_zero_model_predicts_half_everywhere():
    model = init_model(SMALL)
    for name in ("w1", "b1", "w2", "b2", "w_out"):
        getattr(model, name)[:] = 0.0
    x = np.random.default_rng(0).standard_normal((50, 10))
    np.testing.assert_allclose(predict_proba_matrix(model, x), 0.5)


# --- estimator front end --------------------------------------------------------------

def test_classifier_fit_predict_roundtrip(tmp_path):
    ds = blob_dataset(n=100, dim=20, seed=1)
    clf = MentionPairClassifier(hidden1=16, hidden2=8, epochs=20, seed=1,
                                dropout_prob=0.0, batch_size=32)
    clf.fit(ds.vectors, ds.labels)
    proba = clf.predict_proba(ds.vectors)
    assert proba.shape == (100, 2)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    assert clf.score(ds.vectors, ds.labels) >= 0.95

    path = tmp_path / "model.json"
    clf.save(path)
    again = MentionPairClassifier.load(path)
    np.testing.assert_array_equal(
        again.predict_proba(ds.vectors), clf.predict_proba(ds.vectors)
    )


def test_classifier_params_protocol():
    clf = MentionPairClassifier(hidden1=64)
    params = clf.get_params()
    assert params["hidden1"] == 64 and params["dropout_prob"] == 0.5
    clf.set_params(hidden1=32, epochs=7)
    assert clf.hidden1 == 32 and clf.epochs == 7
    with pytest.raises(ValueError):
        clf.set_params(nonexistent=1)
