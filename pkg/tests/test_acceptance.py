"""Acceptance suite.

One test per acceptance criterion, each printing a PASS line with its
measured values (run pytest with -s or check captured output). Tolerances
are pinned inline; the end-to-end sweep criteria run against the bundled
synthetic corpus through the command-line interface.
"""

from __future__ import annotations

import os
import random
import time
from importlib.resources import files

import numpy as np
import pytest
from scipy.optimize import minimize
from scipy.stats import spearmanr

from oracles import (
    bf_logreg_grad_fd,
    bf_logreg_loss,
    bf_overlap_pct,
    bf_tfidf_fit,
    bf_tfidf_transform,
)
from redacteval import attacker, tfidf
from redacteval.cli import main
from redacteval.corpus import Document
from redacteval.diversity import TfidfEmbedder, estimate_k, surviving_predictions
from redacteval.errors import DataError
from redacteval.gibberish import GibberishParams, is_gibberish, word_overlap_pct
from redacteval.oracle import Prediction, ReconstructionSet

BUNDLED_CORPUS = str(files("redacteval.data").joinpath("synthetic_corpus.jsonl"))

ORIGINAL_SENTENCE = "he was stationed at singapore"
REDACTED_SENTENCE = "he was stationed at <mask>"
TOP_COMPLETIONS = [
    ("he was stationed at the", 0.62),
    ("he was stationed at:", 0.58),
    ("he was stationed at Gettysburg", 0.49),
    ("he was stationed at Ft.", 0.48),
    ("he was stationed at Knox", 0.47),
]
HEAVY_REDACTION_PREDICTION = "Singapore singapore"

WORD_POOL = ["ape", "bat", "cat", "dog", "eel", "fox", "gnu", "hen", "ibis", "jay"]


def test_c1_exact_verdict_suite(english_detector):
    """C1: the five known completions classify non-gibberish and the
    degenerate heavy-redaction prediction classifies gibberish, all
    verdicts matching a hand-enumerated oracle; runtime under 1 s."""
    started = time.perf_counter()
    params = GibberishParams(max_overlap_pct=20.0)

    for text, _ in TOP_COMPLETIONS:
        expected_overlap = bf_overlap_pct(ORIGINAL_SENTENCE, text)
        assert word_overlap_pct(ORIGINAL_SENTENCE, text) == pytest.approx(expected_overlap)
        assert expected_overlap == pytest.approx(80.0)  # 4 of 5 unique words kept
        assert is_gibberish(ORIGINAL_SENTENCE, text, params, english_detector) is False

    overlap = word_overlap_pct(ORIGINAL_SENTENCE, HEAVY_REDACTION_PREDICTION)
    assert overlap == pytest.approx(20.0)  # only "singapore" of 5 unique words
    assert overlap <= params.max_overlap_pct
    assert is_gibberish(
        ORIGINAL_SENTENCE, HEAVY_REDACTION_PREDICTION, params, english_detector
    ) is True

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    print(f"\nACCEPTANCE C1 exact-verdict suite: PASS ({elapsed * 1000:.0f} ms)")


def test_c2_overlap_rule_properties():
    """C2: identity, threshold monotonicity and order/duplication
    invariance over 1000 randomized cases, zero violations."""
    rng = random.Random(1234)
    violations = 0
    for _ in range(1000):
        si_words = [rng.choice(WORD_POOL) for _ in range(rng.randint(1, 8))]
        sp_words = [rng.choice(WORD_POOL) for _ in range(rng.randint(0, 10))]
        si = " ".join(si_words)
        sp = " ".join(sp_words)
        c_lo, c_hi = sorted((rng.uniform(0, 100), rng.uniform(0, 100)))

        if word_overlap_pct(si, si) != 100.0 or (c_lo < 100.0 and word_overlap_pct(si, si) <= c_lo):
            violations += 1
        pct = word_overlap_pct(si, sp)
        if not 0.0 <= pct <= 100.0:
            violations += 1
        if (pct <= c_lo) and not (pct <= c_hi):  # monotone in the threshold
            violations += 1
        shuffled = list(sp_words)
        rng.shuffle(shuffled)
        duplicated = shuffled + [rng.choice(shuffled)] if shuffled else shuffled
        if word_overlap_pct(si, " ".join(shuffled)) != pct:
            violations += 1
        if word_overlap_pct(si, " ".join(duplicated)) != pct:
            violations += 1
        if pct != bf_overlap_pct(si, sp):
            violations += 1
    assert violations == 0
    print("\nACCEPTANCE C2 overlap-rule properties: PASS (1000 cases, 0 violations)")


def test_c3_tfidf_brute_force_equivalence():
    """C3: fit/transform match an independent brute-force implementation
    within 1e-9 per component on small corpora over a 6-word alphabet."""
    alphabet = ["apri", "brol", "crum", "dren", "enta", "flug"]
    rng = random.Random(99)
    checked = 0
    for _ in range(400):
        texts = [
            " ".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
            for _ in range(rng.randint(1, 5))
        ]
        min_df = rng.choice([0.1, 0.2, 0.4, 0.6, 1.0])
        stop = set(rng.sample(alphabet, rng.randint(0, 2)))
        docs = [Document(id=f"d{i}", text=t, label="x") for i, t in enumerate(texts)]

        vocab_bf, idf_bf = bf_tfidf_fit(texts, min_df, stop)
        if not vocab_bf:
            with pytest.raises(DataError):
                tfidf.fit(docs, min_df=min_df, stopwords=frozenset(stop))
            continue
        model = tfidf.fit(docs, min_df=min_df, stopwords=frozenset(stop))
        assert model.words() == vocab_bf
        for w in vocab_bf:
            assert abs(model.idf[model.vocabulary[w]] - idf_bf[w]) <= 1e-9
        for text in texts:
            dense = tfidf.to_dense(tfidf.transform(model, text), model.n_features)
            expected = np.array(bf_tfidf_transform(text, vocab_bf, idf_bf))
            assert np.max(np.abs(dense - expected)) <= 1e-9
        checked += 1
    assert checked >= 300
    print(f"\nACCEPTANCE C3 tfidf brute-force equivalence: PASS ({checked} corpora, 1e-9)")


def test_c4_logistic_regression_checks():
    """C4: analytic gradient vs central finite differences (rel err
    <= 1e-4) on randomized 5x4 instances, non-increasing loss, separable
    toy reaching training accuracy 1.0 within 500 epochs; under 30 s."""
    started = time.perf_counter()
    rng = np.random.default_rng(4242)

    worst_rel = 0.0
    for _ in range(20):
        x = rng.normal(size=(5, 4))
        y_idx = rng.integers(0, 3, size=5)
        weights = rng.normal(scale=0.7, size=(3, 4))
        bias = rng.normal(scale=0.7, size=3)
        l2 = float(rng.uniform(0.0, 0.2))
        onehot = np.zeros((5, 3))
        onehot[np.arange(5), y_idx] = 1.0
        _, grad_w, grad_b = attacker._loss_and_grads(weights, bias, x, onehot, l2)
        fd_w, fd_b = bf_logreg_grad_fd(weights, bias, x, y_idx, l2)
        rel = np.linalg.norm(
            np.concatenate([(grad_w - fd_w).ravel(), grad_b - fd_b])
        ) / np.linalg.norm(np.concatenate([fd_w.ravel(), fd_b]))
        worst_rel = max(worst_rel, rel)
        assert rel <= 1e-4

    # non-increasing loss across accepted steps, including an oversized
    # initial step that forces backtracking
    x = rng.normal(size=(30, 6))
    labels = [f"c{int(i)}" for i in rng.integers(0, 3, size=30)]
    model = attacker.train(x, labels, step=64.0, max_epochs=300)
    assert all(b <= a + 1e-15 for a, b in zip(model.loss_history, model.loss_history[1:]))

    # linearly separable toy set: class keyword check first, then accuracy
    docs = [Document(id=f"a{i}", text=f"alpha pad{i % 3}", label="A") for i in range(6)]
    docs += [Document(id=f"b{i}", text=f"beta pad{i % 3}", label="B") for i in range(6)]
    toy_model = tfidf.fit(docs, min_df=0.1, stopwords=frozenset())
    features = tfidf.transform_matrix(toy_model, [d.text for d in docs])
    toy_labels = [d.label for d in docs]
    direction = np.zeros(toy_model.n_features)
    direction[toy_model.vocabulary["alpha"]] = 1.0
    direction[toy_model.vocabulary["beta"]] = -1.0
    signs = np.array([1.0 if y == "A" else -1.0 for y in toy_labels])
    assert np.all((features @ direction) * signs > 0)  # separability oracle
    clf = attacker.train(features, toy_labels, max_epochs=500)
    predictions = [attacker.predict(clf, row) for row in features]
    assert predictions == toy_labels

    # trained loss agrees with an independent minimizer on a tiny instance
    x6 = rng.normal(size=(6, 3))
    y6 = ["u", "v", "w", "u", "v", "w"]
    y6_idx = np.array([0, 1, 2, 0, 1, 2])
    l2 = 0.05
    fitted = attacker.train(x6, y6, l2=l2, max_epochs=20000, step=2.0, tol=1e-12)

    def objective(flat):
        return bf_logreg_loss(flat[:9].reshape(3, 3), flat[9:], x6, y6_idx, l2)

    reference = minimize(objective, np.zeros(12), method="L-BFGS-B",
                         options={"gtol": 1e-12, "maxiter": 20000})
    assert abs(fitted.loss_history[-1] - reference.fun) <= 1e-6

    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    print(
        f"\nACCEPTANCE C4 logistic-regression checks: PASS "
        f"(worst gradient rel err {worst_rel:.2e}, {elapsed:.1f} s)"
    )


SWEEP_SEED = 0
N_CLASSES = 4


@pytest.fixture(scope="module")
def sweep_run(tmp_path_factory):
    """One full sweep over the bundled synthetic corpus via the CLI:
    grid 0,10,...,100, N=100 predictions, fixed seed, single worker."""
    out_dir = tmp_path_factory.mktemp("acceptance_sweep") / "run1"
    argv = ["sweep", "--corpus", BUNDLED_CORPUS, "--seed", str(SWEEP_SEED),
            "--n", "100", "--out", str(out_dir), "--dataset-name", "synthetic"]
    started = time.perf_counter()
    code = main(argv)
    elapsed = time.perf_counter() - started
    assert code == 0
    rows = []
    lines = (out_dir / "report.csv").read_text().splitlines()
    for line in lines[1:]:
        _, x, privacy, accuracy, n_docs, seed = line.split(",")
        rows.append((float(x), float(privacy), float(accuracy), int(n_docs), int(seed)))
    return {"out_dir": out_dir, "rows": rows, "elapsed": elapsed, "argv": argv}


def test_c5_synthetic_sweep_trends(sweep_run):
    """C5: 4-class 400/100 synthetic corpus, unigram stub oracle, N=100,
    grid 0..100 step 10. Endpoint and monotonicity assertions at the
    pinned tolerances; runtime under 5 minutes single-worker."""
    rows = sweep_run["rows"]
    assert len(rows) == 11
    xs = [r[0] for r in rows]
    privacy = [r[1] for r in rows]
    accuracy = [r[2] for r in rows]
    assert xs == [float(x) for x in range(0, 101, 10)]
    assert all(r[3] == 100 for r in rows)  # 100 scored test documents per level

    chance = 1.0 / N_CLASSES
    assert accuracy[0] >= 0.9
    assert chance - 0.1 <= accuracy[-1] <= chance + 0.1
    assert privacy[0] <= 0.2
    assert privacy[-1] >= 0.8
    rho_privacy = spearmanr(xs, privacy).statistic
    rho_accuracy = spearmanr(xs, accuracy).statistic
    assert rho_privacy >= 0.9
    assert rho_accuracy <= -0.9
    assert sweep_run["elapsed"] < 300.0
    print(
        f"\nACCEPTANCE C5 synthetic sweep trends: PASS "
        f"(acc {accuracy[0]:.2f}->{accuracy[-1]:.2f}, privacy {privacy[0]:.2f}->"
        f"{privacy[-1]:.2f}, spearman {rho_privacy:.3f}/{rho_accuracy:.3f}, "
        f"{sweep_run['elapsed']:.0f} s)"
    )


def test_c6_determinism_and_worker_independence(sweep_run, tmp_path_factory):
    """C6: identical seed reproduces byte-identical report and detail
    files; --workers 4 produces the same bytes as a single worker."""
    base = sweep_run["out_dir"]
    rerun_dir = tmp_path_factory.mktemp("acceptance_sweep") / "rerun"
    argv = [a if a != str(base) else str(rerun_dir) for a in sweep_run["argv"]]
    assert main(argv) == 0
    assert (rerun_dir / "report.csv").read_bytes() == (base / "report.csv").read_bytes()
    assert (rerun_dir / "details.csv").read_bytes() == (base / "details.csv").read_bytes()

    workers_dir = tmp_path_factory.mktemp("acceptance_sweep") / "workers4"
    argv = [a if a != str(base) else str(workers_dir) for a in sweep_run["argv"]]
    assert main(argv + ["--workers", "4"]) == 0
    assert (workers_dir / "report.csv").read_bytes() == (base / "report.csv").read_bytes()
    assert (workers_dir / "details.csv").read_bytes() == (base / "details.csv").read_bytes()
    print("\nACCEPTANCE C6 determinism and worker independence: PASS (byte-identical)")


def test_c7_diversity_estimator_properties(english_detector, tiny_model):
    """C7: k bounded by survivor count, non-increasing in tau, never
    increased by duplication - 500 randomized cases plus the hand-traced
    two-pair geometry."""
    from redacteval.diversity import cluster_count

    # hand-traced case: two tight pairs, far apart, threshold between
    a1 = np.array([1.0, 0.01, 0.0, 0.0])
    a2 = np.array([1.0, -0.01, 0.0, 0.0])
    b1 = np.array([0.0, 0.0, 1.0, 0.01])
    b2 = np.array([0.0, 0.0, 1.0, -0.01])
    assert cluster_count([a1, a2, b1, b2], tau=0.3) == 2

    embedder = TfidfEmbedder(tiny_model)
    params = GibberishParams(max_overlap_pct=20.0, score_threshold=-100.0)
    vocab = ["a", "b", "c", "qq", "zz"]
    rng = random.Random(777)
    violations = 0
    for _ in range(500):
        original = Document(
            id="d", text=" ".join(rng.choice(["a", "b", "c"]) for _ in range(rng.randint(1, 4))),
            label="x",
        )
        texts = [
            " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 4)))
            for _ in range(rng.randint(1, 10))
        ]
        preds = tuple(Prediction(text=t, confidence=1.0) for t in texts)
        recs = ReconstructionSet("r <mask>", preds, len(preds))
        tau_lo, tau_hi = sorted((rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0)))
        survivors = surviving_predictions(recs, original, params, english_detector)
        k_lo = estimate_k(recs, original, params, english_detector, embedder, tau_lo)
        k_hi = estimate_k(recs, original, params, english_detector, embedder, tau_hi)
        if k_lo > len(survivors) or k_hi > len(survivors):
            violations += 1
        if k_hi > k_lo:  # larger threshold merges more, never less
            violations += 1
        if survivors:
            dup = ReconstructionSet(
                "r <mask>", preds + (rng.choice(survivors),), len(preds) + 1
            )
            k_dup = estimate_k(dup, original, params, english_detector, embedder, tau_lo)
            if k_dup > k_lo:
                violations += 1
    assert violations == 0
    print("\nACCEPTANCE C7 diversity estimator properties: PASS (500 cases + hand trace)")


@pytest.mark.skipif(
    not os.environ.get("REDACTEVAL_REAL_MODEL"),
    reason="optional integration smoke test; set REDACTEVAL_REAL_MODEL=<model> to run",
)
def test_c8_real_model_smoke(english_detector):
    """C8 (optional, non-gating): a real transformer backend produces a
    grammatical top completion for the canonical redacted sentence."""
    from redacteval.oracle import TransformerOracle, huggingface_backend

    oracle = TransformerOracle(
        backend=huggingface_backend(os.environ["REDACTEVAL_REAL_MODEL"]), name="hf"
    )
    recs = oracle.reconstruct(REDACTED_SENTENCE, n=5)
    assert recs.predictions
    params = GibberishParams(max_overlap_pct=20.0)
    top = recs.predictions[0]
    assert is_gibberish(ORIGINAL_SENTENCE, top.text, params, english_detector) is False
    print(f"\nACCEPTANCE C8 real-model smoke: PASS (top-1: {top.text!r})")
