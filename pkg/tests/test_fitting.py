"""Tests for the least-squares fitter and the (L, m, q) grid search."""

import math

import numpy as np
import pytest

import chaoscv.fitting as fitting
from chaoscv import (
    FitConfig,
    FitDivergedError,
    GeneratorSpec,
    NetworkParams,
    Signal,
    Triplet,
    fit,
    generate,
    grid_search,
    multi_start_fit,
    predict,
)
from chaoscv.network import flatten_params
from chaoscv.signals import LaggedDataset, build_lagged, standardize


def logistic_dataset(n=400, L=1, m=1, seed=1):
    sig = generate(GeneratorSpec(kind="logistic", n=n, seed=seed, transient_skip=50))
    std, _, _ = standardize(sig)
    return build_lagged(std, L, m)


def test_triplet_validation():
    with pytest.raises(ValueError):
        Triplet(0, 1, 1)
    t = Triplet(2, 3, 4)
    assert (t.L, t.m, t.q) == (2, 3, 4)


def test_fit_self_realizable_targets():
    rng = np.random.default_rng(7)
    truth = NetworkParams(
        0.8 * rng.normal(size=(3, 2)), 0.3 * rng.normal(size=3), rng.normal(size=3), 0.2
    )
    X = rng.normal(size=(300, 2))
    ds = LaggedDataset(inputs=X, targets=predict(truth, X), L=1, m=2)
    result = fit(ds, q=3, seed=0)
    assert result.sse < 1e-8 * len(ds)
    assert result.converged


def test_fit_constant_targets_bias_solution():
    rng = np.random.default_rng(8)
    ds = LaggedDataset(
        inputs=rng.normal(size=(100, 2)), targets=np.full(100, 0.7), L=1, m=2
    )
    result = fit(ds, q=2, seed=0)
    assert result.sse < 1e-12
    preds = predict(result.params, ds.inputs)
    np.testing.assert_allclose(preds, 0.7, atol=1e-6)


def test_fit_white_noise_sse_bounded_by_variance():
    rng = np.random.default_rng(9)
    y = rng.normal(size=250)
    ds = LaggedDataset(inputs=rng.normal(size=(250, 3)), targets=y, L=1, m=3)
    for q in (1, 4):
        result = fit(ds, q=q, seed=3)
        assert 0.0 <= result.sse <= ((y - y.mean()) ** 2).sum() + 1e-9


def test_fit_monotone_descent_and_cap():
    ds = logistic_dataset(m=2)
    trace = []
    result = fit(ds, q=4, seed=2, callback=lambda i, sse: trace.append(sse))
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert result.iterations <= FitConfig().max_iterations
    assert result.sse == trace[-1]


def test_fit_iteration_cap_flags_not_converged():
    ds = logistic_dataset(m=2)
    result = fit(ds, q=4, seed=2, config=FitConfig(max_iterations=3))
    assert result.iterations == 3
    assert not result.converged


def test_fit_deterministic():
    ds = logistic_dataset(m=2)
    a = fit(ds, q=3, seed=5)
    b = fit(ds, q=3, seed=5)
    np.testing.assert_array_equal(
        flatten_params(a.params), flatten_params(b.params)
    )
    assert a.sse == b.sse and a.iterations == b.iterations


def test_fit_diverged_on_non_finite_objective():
    ds = LaggedDataset(
        inputs=np.ones((50, 1)), targets=np.full(50, 1e200), L=1, m=1
    )
    with pytest.raises(FitDivergedError):
        fit(ds, q=1, seed=0)


def test_multi_start_single_equals_fit():
    ds = logistic_dataset()
    single = fit(ds, q=3, seed=42)
    multi = multi_start_fit(ds, q=3, n_starts=1, base_seed=42)
    assert multi.sse == single.sse and multi.seed == single.seed


def test_multi_start_never_worse():
    ds = logistic_dataset()
    one = multi_start_fit(ds, q=3, n_starts=1, base_seed=42)
    five = multi_start_fit(ds, q=3, n_starts=5, base_seed=42)
    assert five.sse <= one.sse


def test_multi_start_all_diverged(monkeypatch):
    def always_diverges(*args, **kwargs):
        raise FitDivergedError("boom")

    monkeypatch.setattr(fitting, "fit", always_diverges)
    ds = logistic_dataset()
    with pytest.raises(FitDivergedError, match="no admissible fit"):
        multi_start_fit(ds, q=2, n_starts=3, base_seed=0)


def test_grid_search_single_triplet():
    sig = generate(GeneratorSpec(kind="logistic", n=300, seed=2, transient_skip=50))
    best, results = grid_search(sig, bounds=(1, 1, 1), n_starts=2, base_seed=1)
    assert len(results) == 1
    assert best is results[0]
    assert best.triplet == Triplet(1, 1, 1)


def test_grid_search_logistic_positive_lambda():
    sig = generate(GeneratorSpec(kind="logistic", n=400, seed=2, transient_skip=50))
    best, results = grid_search(sig, bounds=(1, 2, 3), n_starts=2, base_seed=1)
    assert best.lambda_hat > 0  # oracle: ln 2 for r=4
    assert best.p_value > 0.9


def test_grid_search_ar1_negative_lambda():
    sig = generate(
        GeneratorSpec(kind="ar1", parameters={"phi": 0.5, "sigma": 1.0}, n=800, seed=3)
    )
    best, _ = grid_search(sig, bounds=(1, 2, 3), n_starts=2, base_seed=1)
    assert best.lambda_hat < 0  # oracle: ln 0.5


def test_grid_search_reports_uniform_max_rule():
    sig = generate(GeneratorSpec(kind="logistic", n=300, seed=4, transient_skip=50))
    best, results = grid_search(sig, bounds=(2, 2, 2), n_starts=2, base_seed=1)
    assert best.lambda_hat == max(r.lambda_hat for r in results)
    # every feasible triplet evaluated exactly once
    assert sorted((r.triplet.L, r.triplet.m, r.triplet.q) for r in results) == [
        (L, m, q) for L in (1, 2) for m in (1, 2) for q in (1, 2)
    ]


def test_grid_search_too_short():
    # T=3 leaves no triplet with both an embedding and M >= 2 chain points
    sig = Signal("y", "", np.arange(3.0))
    with pytest.raises(ValueError, match="signal too short"):
        grid_search(sig, bounds=(2, 4, 2), n_starts=1, base_seed=0)


def test_grid_search_affine_invariance():
    sig = generate(GeneratorSpec(kind="logistic", n=300, seed=5, transient_skip=50))
    scaled = Signal(sig.id, sig.label, 2.5 * sig.samples + 3.0)
    a, _ = grid_search(sig, bounds=(1, 2, 2), n_starts=2, base_seed=9)
    b, _ = grid_search(scaled, bounds=(1, 2, 2), n_starts=2, base_seed=9)
    # standardization maps both to the same series up to float rounding
    assert abs(a.lambda_hat - b.lambda_hat) < 1e-6
    assert abs(a.p_value - b.p_value) < 1e-6
    assert a.triplet == b.triplet


def test_grid_search_deterministic():
    sig = generate(GeneratorSpec(kind="logistic", n=300, seed=6, transient_skip=50))
    a, _ = grid_search(sig, bounds=(1, 2, 2), n_starts=2, base_seed=0)
    b, _ = grid_search(sig, bounds=(1, 2, 2), n_starts=2, base_seed=0)
    assert a.lambda_hat == b.lambda_hat and a.sse == b.sse


def test_grid_search_result_fields_consistent():
    sig = generate(GeneratorSpec(kind="logistic", n=300, seed=7, transient_skip=50))
    best, results = grid_search(sig, bounds=(1, 2, 2), n_starts=2, base_seed=0)
    for r in results:
        assert r.signal_id == sig.id
        assert abs(r.lambda_hat - r.local_rates.mean()) < 1e-10
        usable = len(sig) - r.triplet.m * r.triplet.L
        assert r.M == math.floor(usable ** (2.0 / 3.0))
        assert 0.0 <= r.p_value <= 1.0
