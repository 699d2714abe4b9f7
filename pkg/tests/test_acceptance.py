"""Acceptance suite: one test per release criterion.

Each test prints an ``ACCEPTANCE <name>: PASS`` line once its assertions
hold (run with ``pytest -s tests/test_acceptance.py`` to see them live).
Tolerances and time budgets are pinned here, not calibrated elsewhere.
"""

import itertools
import sys
import time

import numpy as np

from teluref.corpus import corpus_stats
from teluref.evaluate import precision_recall_f1
from teluref.mlp import (
    MlpConfig,
    backward,
    bce_loss,
    forward,
    init_model,
    save_model,
)
from teluref.pipeline import (
    NON_EMBEDDING_BLOCKS,
    ExperimentConfig,
    run_experiment,
    train_on_conversations,
)
from teluref.sampling import (
    PairDataset,
    SmoteConfig,
    false_pair_count,
    smote_oversample,
    true_pair_count,
)
from teluref.ssf import Gender, Number, Person, parse_ssf_document

VERB_LINE = "unnADu\tVM\t<fs af='unDu,v,m,sg,3,,A,A' name=\"unnaaDu\">"


def announce(name):
    print(f"ACCEPTANCE {name}: PASS", file=sys.stderr)


def test_ssf_fidelity():
    """The canonical verb line decodes exactly, in under a millisecond."""
    parse_ssf_document(VERB_LINE)  # warm up
    best = min(
        _timed(lambda: parse_ssf_document(VERB_LINE))[0] for _ in range(5)
    )
    token = parse_ssf_document(VERB_LINE)[0][0]
    assert token.fs.root == "unDu"
    assert token.fs.category == "v"
    assert token.fs.morph.gender is Gender.MALE
    assert token.fs.morph.number is Number.SINGULAR
    assert token.fs.morph.person is Person.THIRD
    assert best < 1e-3, f"parse took {best * 1e3:.3f} ms"
    announce("ssf-fidelity")


def _timed(fn):
    start = time.perf_counter()
    result = fn()
    return time.perf_counter() - start, result


def test_pair_count_oracle():
    """Closed forms equal brute-force enumeration for all 2<=n<=12, 0<=k<=n."""
    start = time.perf_counter()
    for n in range(2, 13):
        for k in range(0, n + 1):
            chain = set(range(k))
            true = false = 0
            for a, b in itertools.combinations(range(n), 2):
                if a in chain and b in chain:
                    true += 1
                else:
                    false += 1
            assert true_pair_count(n, k) == true
            assert false_pair_count(n, k) == false
    assert time.perf_counter() - start < 1.0
    announce("pair-count-oracle")


def test_oversampling_arithmetic():
    """642/1818 balances to 3636; every synthetic row is a verified convex
    combination of two gold minority rows to 1e-9."""
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    vectors = np.vstack([
        rng.standard_normal((642, 226)) + 1.0,
        rng.standard_normal((1818, 226)),
    ])
    labels = np.concatenate([np.ones(642, bool), np.zeros(1818, bool)])
    dataset = PairDataset(vectors=vectors, labels=labels)

    out = smote_oversample(dataset, SmoteConfig(k_neighbors=5, seed=42))
    assert out.n_true == 1818 and out.n_false == 1818
    assert len(out) == 3636

    # independent recomputation of every synthetic row from the trace log
    gold_count = len(dataset)
    assert len(out.synthesis_log) == 3636 - gold_count
    for offset, trace in enumerate(out.synthesis_log):
        x = dataset.vectors[trace.base_index]
        x2 = dataset.vectors[trace.neighbor_index]
        s = out.vectors[gold_count + offset]
        assert 0.0 <= trace.lam <= 1.0
        assert np.max(np.abs(s - (x + trace.lam * (x2 - x)))) < 1e-9
        assert np.all(s >= np.minimum(x, x2) - 1e-9)
        assert np.all(s <= np.maximum(x, x2) + 1e-9)
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    announce("oversampling-arithmetic")


def test_gradient_check():
    """Analytic gradients match central differences (h=1e-5, float64,
    dropout off) to max relative error < 1e-4 over 10 random draws."""
    start = time.perf_counter()
    h = 1e-5
    worst = 0.0
    for draw in range(10):
        cfg = MlpConfig(input_dim=12, hidden1=14, hidden2=9, dropout_prob=0.0,
                        seed=1000 + draw)
        model = init_model(cfg)
        rng = np.random.default_rng(2000 + draw)
        X = rng.standard_normal((4, 12))
        y = rng.integers(0, 2, size=4).astype(float)
        _, cache = forward(model, X)
        analytic = backward(model, cache, y)
        for name, param in model.parameters().items():
            param = np.atleast_1d(np.asarray(param))
            it = np.nditer(param, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                original = param[idx]
                param[idx] = original + h
                loss_plus = bce_loss(forward(model, X)[0], y)
                param[idx] = original - h
                loss_minus = bce_loss(forward(model, X)[0], y)
                param[idx] = original
                numeric = (loss_plus - loss_minus) / (2 * h)
                a = float(np.atleast_1d(analytic[name])[idx])
                scale = max(abs(a), abs(numeric))
                if scale > 1e-8:  # dead-relu coordinates agree at zero
                    worst = max(worst, abs(a - numeric) / scale)
    elapsed = time.perf_counter() - start
    assert worst < 1e-4, f"max relative error {worst:.2e}"
    assert elapsed < 30.0, f"took {elapsed:.2f}s"
    announce("gradient-check")


def test_training_determinism(synth_corpus):
    """Two identically-seeded full training runs produce byte-identical models."""
    start = time.perf_counter()
    convs, table = synth_corpus
    cfg = ExperimentConfig(
        sampling="over", seed=11, test_fraction=0.2,
        mlp=MlpConfig(hidden1=64, hidden2=32, epochs=5, seed=11),
    )
    blobs = []
    for _ in range(2):
        model, _, _ = train_on_conversations(convs[:12], table, cfg)
        blobs.append(save_model(model))
    assert blobs[0] == blobs[1]
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0, f"took {elapsed:.2f}s"
    announce("training-determinism")


def test_end_to_end_learning(synth_corpus):
    """Full-feature F1 >= 0.85 on held-out conversations within 50 epochs,
    and the gender block strictly beats the embeddings-only baseline averaged
    over 5 seeds (the synthetic corpus keys chains to morphology)."""
    convs, table = synth_corpus
    stats = corpus_stats(convs)
    assert stats["conversations"] >= 40
    assert 300 <= stats["mentions"] <= 500

    start = time.perf_counter()
    cfg = ExperimentConfig(
        sampling="over", seed=3, test_fraction=0.2, mlp=MlpConfig(epochs=25, seed=3)
    )
    report, _ = run_experiment(convs, table, cfg)
    elapsed = time.perf_counter() - start
    assert report.f1 >= 0.85, f"full-feature F1 {report.f1:.3f}"
    assert elapsed < 120.0, f"took {elapsed:.2f}s"

    baseline_scores = []
    gender_scores = []
    for seed in range(5):
        seed_cfg = ExperimentConfig(
            sampling="over", seed=seed, test_fraction=0.2,
            mlp=MlpConfig(epochs=20, seed=seed),
        )
        baseline, _ = run_experiment(convs, table, seed_cfg,
                                     ablate=NON_EMBEDDING_BLOCKS)
        gender, _ = run_experiment(
            convs, table, seed_cfg,
            ablate=tuple(b for b in NON_EMBEDDING_BLOCKS if b != "gender"),
        )
        baseline_scores.append(baseline.f1)
        gender_scores.append(gender.f1)
    assert np.mean(baseline_scores) < np.mean(gender_scores), (
        f"baseline {np.mean(baseline_scores):.3f} vs gender {np.mean(gender_scores):.3f}"
    )
    announce("end-to-end-learning")


def test_sampling_comparison(synth_corpus):
    """Mean F1 over 5 seeds: oversampling >= undersampling on the imbalanced
    synthetic corpus; both run sets finish inside 5 minutes."""
    convs, table = synth_corpus
    stats = corpus_stats(convs)
    assert stats["false_pairs"] >= 3 * stats["true_pairs"]

    start = time.perf_counter()
    scores = {"over": [], "under": []}
    for seed in range(5):
        for strategy in ("over", "under"):
            cfg = ExperimentConfig(
                sampling=strategy, seed=seed, test_fraction=0.2,
                mlp=MlpConfig(epochs=20, seed=seed),
            )
            report, _ = run_experiment(convs, table, cfg)
            scores[strategy].append(report.f1)
    elapsed = time.perf_counter() - start
    assert np.mean(scores["over"]) >= np.mean(scores["under"]), (
        f"over {np.mean(scores['over']):.3f} vs under {np.mean(scores['under']):.3f}"
    )
    assert elapsed < 300.0, f"took {elapsed:.2f}s"
    announce("sampling-comparison")


def test_metric_identities():
    """P/R/F1 match hand-computed values exactly on 10 confusion tables,
    including the zero-denominator conventions."""
    tables = [
        (5, 0, 5, 0),    # perfect
        (0, 0, 4, 3),    # all negative: P undefined, R = 0
        (0, 3, 4, 0),    # no true labels: R undefined
        (0, 0, 7, 0),    # nothing positive anywhere: both undefined
        (45, 9, 0, 5),   # P = 45/54, R = 0.9
        (1, 1, 1, 1),
        (10, 5, 85, 0),
        (7, 0, 90, 3),
        (2, 8, 80, 10),
        (100, 1, 1, 100),
    ]
    for tp, fp, tn, fn in tables:
        probs = np.array([0.9] * (tp + fp) + [0.1] * (tn + fn))
        labels = np.array(
            [True] * tp + [False] * fp + [False] * tn + [True] * fn
        )
        report = precision_recall_f1(probs, labels, threshold=0.5)
        assert (report.tp, report.fp, report.tn, report.fn) == (tp, fp, tn, fn)
        expected_p = tp / (tp + fp) if tp + fp else 0.0
        expected_r = tp / (tp + fn) if tp + fn else 0.0
        assert report.precision == expected_p
        assert report.recall == expected_r
        assert report.precision_defined == (tp + fp > 0)
        assert report.recall_defined == (tp + fn > 0)
        if expected_p + expected_r > 0 and tp + fp and tp + fn:
            expected_f1 = 2 * expected_p * expected_r / (expected_p + expected_r)
            assert report.f1 == expected_f1
        else:
            assert report.f1 == 0.0 and not report.f1_defined
    announce("metric-identities")
