"""Nonlinear least-squares estimation and the (L, m, q) model grid search.

The objective is the sum of squared one-step prediction errors of the tanh
network over a lagged dataset. Minimization is a damped Gauss-Newton
(Levenberg-Marquardt) iteration on the analytic residual Jacobian, with
multi-start initialization to cover the nonconvex landscape.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

import numpy as np

from .lyapunov import (
    ChaosTestResult,
    default_evaluation_count,
    hypothesis_test,
    lyapunov_stabilized,
)
from .network import NetworkParams, flatten_params, unflatten_params
from .signals import LaggedDataset, Signal, build_lagged, standardize


@dataclass(frozen=True)
class Triplet:
    """Model complexity: delay L, embedding dimension m, hidden units q."""

    L: int
    m: int
    q: int

    def __post_init__(self):
        if min(self.L, self.m, self.q) < 1:
            raise ValueError("triplet components must be >= 1")


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings (see the CLI for the matching flags)."""

    tol_g: float = 1e-6
    tol_f: float = 1e-10
    max_iterations: int = 500


@dataclass(frozen=True)
class FitResult:
    params: NetworkParams
    sse: float
    iterations: int
    converged: bool
    seed: int


class FitDivergedError(RuntimeError):
    """Raised when the objective became non-finite; carries the last finite
    iterate when one exists."""

    def __init__(self, message: str, last_result: FitResult | None = None):
        super().__init__(message)
        self.last_result = last_result


def _initial_params(dataset: LaggedDataset, q: int, rng) -> NetworkParams:
    # Small uniform hidden layer avoids tanh saturation on standardized
    # data; the linear output layer is then solved exactly.
    m = dataset.m
    scale = 0.5 / math.sqrt(m)
    W = rng.uniform(-scale, scale, size=(q, m))
    b = rng.uniform(-scale, scale, size=q)
    H = np.tanh(dataset.inputs @ W.T + b)
    design = np.column_stack([H, np.ones(len(dataset))])
    coef, *_ = np.linalg.lstsq(design, dataset.targets, rcond=None)
    return NetworkParams(W, b, coef[:q], float(coef[q]))


def fit(
    dataset: LaggedDataset,
    q: int,
    seed: int,
    config: FitConfig = FitConfig(),
    callback=None,
) -> FitResult:
    """Fit the network by damped Gauss-Newton from one seeded start.

    Stops at a local minimum: gradient inf-norm <= tol_g, or relative SSE
    decrease <= tol_f over an accepted iteration, or no damping level
    yields descent. Hitting the iteration cap marks ``converged=False``.
    ``callback(iteration, sse)`` is invoked after each accepted step.
    Deterministic given (dataset, q, seed, config).
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    X = dataset.inputs
    y = dataset.targets
    n, m = X.shape
    rng = np.random.default_rng(seed)
    theta = flatten_params(_initial_params(dataset, q, rng))

    # raw-array views of theta; H (hidden activations) is carried between
    # iterations so each trial costs a single tanh evaluation
    def split(t):
        return t[: q * m].reshape(q, m), t[q * m : q * m + q], t[q * m + q : q * m + 2 * q], t[-1]

    def evaluate(t):
        W, b, a, a0 = split(t)
        # non-finite objectives are detected and rejected by the caller
        with np.errstate(over="ignore", invalid="ignore"):
            H = np.tanh(X @ W.T + b)
            r = y - (H @ a + a0)
            return H, r, float(r @ r)

    H, residual, sse = evaluate(theta)
    if not math.isfinite(sse):
        raise FitDivergedError("non-finite objective at initialization")

    mu = None
    iterations = 0
    converged = False
    eye = np.eye(theta.size)
    PT = np.empty((theta.size, n))  # transposed residual Jacobian, filled in place
    PT[-1] = 1.0
    Xt = np.ascontiguousarray(X.T)
    while iterations < config.max_iterations:
        a = split(theta)[2]
        AGt = (a * (1.0 - H * H)).T
        np.multiply(AGt[:, None, :], Xt[None, :, :], out=PT[: q * m].reshape(q, m, n))
        PT[q * m : q * m + q] = AGt
        PT[q * m + q : q * m + 2 * q] = H.T
        grad = PT @ residual  # -(1/2) * dS/dtheta
        if 2.0 * float(np.abs(grad).max()) <= config.tol_g:
            converged = True
            break
        A = PT @ PT.T
        if mu is None:
            mu = 1e-3 * max(float(A.diagonal().max()), 1e-12)

        accepted = False
        for _ in range(50):
            try:
                delta = np.linalg.solve(A + mu * eye, grad)
            except np.linalg.LinAlgError:
                mu *= 4.0
                continue
            theta_new = theta + delta
            H_new, residual_new, sse_new = evaluate(theta_new)
            if math.isfinite(sse_new) and sse_new < sse:
                accepted = True
                break
            mu *= 4.0
        iterations += 1
        if not accepted:
            # no damping level decreases S: local minimum at working precision
            converged = True
            break
        decrease = (sse - sse_new) / max(sse, 1e-300)
        theta, H, residual, sse = theta_new, H_new, residual_new, sse_new
        mu = max(mu / 3.0, 1e-15)
        if callback is not None:
            callback(iterations, sse)
        if decrease <= config.tol_f:
            converged = True
            break

    return FitResult(
        params=unflatten_params(theta, m, q),
        sse=sse,
        iterations=iterations,
        converged=converged,
        seed=seed,
    )


def multi_start_fit(
    dataset: LaggedDataset,
    q: int,
    n_starts: int,
    base_seed: int,
    config: FitConfig = FitConfig(),
) -> FitResult:
    """Best (lowest-SSE) of ``n_starts`` independent fits seeded
    base_seed, base_seed+1, ..."""
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    best: FitResult | None = None
    for k in range(n_starts):
        try:
            result = fit(dataset, q, base_seed + k, config)
        except FitDivergedError:
            continue
        if best is None or result.sse < best.sse:
            best = result
    if best is None:
        raise FitDivergedError("no admissible fit: all starts diverged")
    return best


def grid_search(
    signal: Signal,
    bounds: tuple[int, int, int],
    n_starts: int = 5,
    base_seed: int = 42,
    config: FitConfig = FitConfig(),
    dither: float = 1e-3,
) -> tuple[ChaosTestResult, list[ChaosTestResult]]:
    """Fit every feasible (L, m, q) triplet and report the largest exponent.

    The signal is standardized first (the exponent is invariant under
    affine rescaling; raw plant units saturate the tanh layer), then a
    seeded Gaussian conditioning dither of scale ``dither`` is added. The
    estimator's regression assumes observations with a noise density;
    an exactly deterministic signal leaves the fitted map unconstrained
    off its attractor, which manufactures spurious expansion in redundant
    embeddings. The dither restores that assumption at a scale far below
    any real dynamics; set 0.0 to disable. Triplets with too few samples
    for the embedding or the chain are skipped. The reported result
    maximizes lambda_hat; ties prefer smaller m, then q, then L. Returns
    (best, per-triplet results in evaluation order).
    """
    L_max, m_max, q_max = bounds
    if min(L_max, m_max, q_max) < 1:
        raise ValueError("bounds must be >= 1")
    if dither < 0:
        raise ValueError("dither must be >= 0")
    std_signal, _, _ = standardize(signal)
    if dither > 0:
        jitter_rng = np.random.default_rng([base_seed, 0xD17])
        jittered = std_signal.samples + dither * jitter_rng.standard_normal(
            len(std_signal)
        )
        std_signal = replace(std_signal, samples=jittered)
    T = len(std_signal)

    results: list[ChaosTestResult] = []
    for L, m in itertools.product(range(1, L_max + 1), range(1, m_max + 1)):
        if T <= m * L:
            continue
        M = default_evaluation_count(T - m * L)
        if M < 2:
            continue
        dataset = build_lagged(std_signal, L, m)
        for q in range(1, q_max + 1):
            fit_result = multi_start_fit(dataset, q, n_starts, base_seed, config)
            estimate = lyapunov_stabilized(fit_result.params, std_signal, L, m, M)
            outcome = hypothesis_test(estimate.lambda_hat, estimate.local_rates, 0.05)
            results.append(
                ChaosTestResult(
                    signal_id=signal.id,
                    label=signal.label,
                    lambda_hat=estimate.lambda_hat,
                    p_value=outcome.p_value,
                    triplet=Triplet(L, m, q),
                    sse=fit_result.sse,
                    M=M,
                    se=outcome.se,
                    local_rates=estimate.local_rates,
                    clamped_steps=estimate.clamped_steps,
                )
            )

    if not results:
        raise ValueError(
            f"signal too short: no feasible (L, m, q) within bounds {bounds}"
        )
    best = min(
        results,
        key=lambda r: (-r.lambda_hat, r.triplet.m, r.triplet.q, r.triplet.L),
    )
    return best, results
