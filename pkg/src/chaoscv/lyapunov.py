"""Largest-Lyapunov-exponent estimation and the chaos hypothesis test.

The exponent of a fitted model is the log of the largest singular value of
the chained companion Jacobians, per sample step. Two evaluation paths are
provided: a literal product (overflow-prone, kept as a cross-check oracle)
and a stabilized accumulation safe for arbitrarily long chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from .network import NetworkParams, input_gradient, input_gradients
from .signals import Signal, build_lagged

if TYPE_CHECKING:  # pragma: no cover
    from .fitting import Triplet

# Stand-in log-rate for an exactly singular Jacobian chain.
_SINGULAR_LOG = math.log(1e-300)


@dataclass(frozen=True)
class ChaosTestResult:
    """Chaos test output for one signal.

    ``lambda_hat`` is in per-sample natural-log units and equals the mean
    of ``local_rates``. ``clamped_steps`` counts chain steps where an
    exactly singular Jacobian product forced the log-rate clamp.
    """

    signal_id: str
    label: str
    lambda_hat: float
    p_value: float
    triplet: "Triplet | None"
    sse: float
    M: int
    se: float
    local_rates: np.ndarray | None = None
    clamped_steps: int = 0


class LyapunovEstimate(NamedTuple):
    lambda_hat: float
    local_rates: np.ndarray
    M: int
    clamped_steps: int


class TestOutcome(NamedTuple):
    p_value: float
    se: float
    reject: bool
    degenerate: bool


def companion_jacobian(params: NetworkParams, lags) -> np.ndarray:
    """m x m one-step Jacobian of the embedded map at one lag vector.

    First row holds the partial derivatives of the fitted map with respect
    to the lags (most recent first); the rows below shift the state.
    """
    grad = input_gradient(params, lags)
    m = grad.size
    J = np.zeros((m, m))
    J[0] = grad
    if m > 1:
        J[np.arange(1, m), np.arange(m - 1)] = 1.0
    return J


def _companion_stack(grads: np.ndarray) -> np.ndarray:
    """Stack of companion Jacobians from an (n, m) array of map gradients."""
    n, m = grads.shape
    J = np.zeros((n, m, m))
    J[:, 0, :] = grads
    if m > 1:
        J[:, np.arange(1, m), np.arange(m - 1)] = 1.0
    return J


def _check_chain(jacobians) -> list[np.ndarray]:
    chain = [np.asarray(J, dtype=float) for J in jacobians]
    if not chain:
        raise ValueError("empty Jacobian chain")
    m = chain[0].shape[0]
    for J in chain:
        if J.shape != (m, m):
            raise ValueError("all Jacobians must be square with equal size")
    return chain


def lyapunov_direct(jacobians) -> float:
    """Literal evaluation: ln(v1) / (2M) with v1 the largest eigenvalue of
    ``P.T @ P`` and ``P`` the ordered chain product.

    Overflows for long or strongly expanding/contracting chains; use only
    as a small-M oracle for the stabilized path.
    """
    chain = _check_chain(jacobians)
    M = len(chain) + 1
    P = np.eye(chain[0].shape[0])
    with np.errstate(over="ignore", invalid="ignore"):
        for J in chain:
            P = J @ P
    if not np.all(np.isfinite(P)):
        raise ValueError("non-finite Jacobian product: use the stabilized path")
    v1 = float(np.linalg.eigvalsh(P.T @ P)[-1])
    if v1 <= 0.0:
        raise ValueError("singular Jacobian product: use the stabilized path")
    return math.log(v1) / (2 * M)


def _log_sigma_max(Ut: np.ndarray, scales: np.ndarray) -> float:
    """ln of the largest singular value of ``Ut @ diag(exp(scales))``."""
    cmax = float(scales.max())
    if cmax == -math.inf:
        return -math.inf
    weighted = Ut * np.exp(scales - cmax)
    smax = float(np.linalg.svd(weighted, compute_uv=False)[0])
    if smax == 0.0:
        return -math.inf
    return cmax + math.log(smax)


def _stabilized_log_growth(chain: list[np.ndarray]) -> tuple[np.ndarray, int]:
    """Per-step increments of ln sigma_max of the running chain product.

    Maintains an orthonormal direction set Q by QR re-factorization after
    each Jacobian application and accumulates the triangular R-product
    with per-column log scales, so the increments telescope to the exact
    ln sigma_max of the full product without overflow or underflow.
    Singular steps are clamped to ln(1e-300) and counted.
    """
    m = chain[0].shape[0]
    Q = np.eye(m)
    Ut = np.eye(m)  # unit-column triangular factor of the R-product
    scales = np.zeros(m)  # per-column log scales
    rates = np.empty(len(chain))
    log_prev = 0.0
    clamped = 0
    for k, J in enumerate(chain):
        Qn, R = np.linalg.qr(J @ Q)
        sign = np.where(np.diagonal(R) < 0.0, -1.0, 1.0)
        Q = Qn * sign
        Ut = (R * sign[:, None]) @ Ut
        norms = np.linalg.norm(Ut, axis=0)
        nz = norms > 0.0
        log_norms = np.full(m, -math.inf)
        log_norms[nz] = np.log(norms[nz])
        scales = scales + log_norms
        Ut = np.where(nz, Ut / np.where(nz, norms, 1.0), 0.0)
        log_cur = _log_sigma_max(Ut, scales)
        rate = log_cur - log_prev
        if not math.isfinite(rate):
            rate = _SINGULAR_LOG
            clamped += 1
        rates[k] = rate
        log_prev = log_cur
    return rates, clamped


def lyapunov_qr(jacobians) -> float:
    """Stabilized equivalent of :func:`lyapunov_direct` on a Jacobian chain."""
    chain = _check_chain(jacobians)
    rates, _ = _stabilized_log_growth(chain)
    return float(rates.sum()) / (len(chain) + 1)


def default_evaluation_count(n_usable: int) -> int:
    """Number of chain evaluation points: floor(n ** (2/3)).

    The epsilon absorbs float-pow slip at perfect cubes (8 ** (2/3)
    evaluates to 3.9999... in doubles).
    """
    return int(math.floor(n_usable ** (2.0 / 3.0) + 1e-9))


def lyapunov_stabilized(
    params: NetworkParams, signal: Signal, L: int, m: int, M: int
) -> LyapunovEstimate:
    """Largest Lyapunov exponent of a fitted model along a signal.

    The chain runs over the last M valid embedding instants of the signal
    (in temporal order), applying the companion Jacobian at the first M-1
    of them. The result is expressed per sample step: the raw chain growth
    is divided by M*L since each sample's derivative enters a consecutive-
    instant chain L times. ``local_rates`` are pre-scaled by (M-1)/(M*L)
    so their mean equals ``lambda_hat``.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    dataset = build_lagged(signal, L, m)
    if M > len(dataset):
        raise ValueError(
            f"M={M} exceeds the {len(dataset)} valid embedding instants"
        )
    lag_rows = dataset.inputs[len(dataset) - M : len(dataset) - 1]
    grads = input_gradients(params, lag_rows)
    chain = list(_companion_stack(grads))
    raw, clamped = _stabilized_log_growth(chain)
    lambda_hat = float(raw.sum()) / (M * L)
    local_rates = raw * ((M - 1) / (M * L))
    return LyapunovEstimate(lambda_hat, local_rates, M, clamped)


def _norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def hypothesis_test(lambda_hat: float, local_rates, alpha: float) -> TestOutcome:
    """One-tailed test of the chaos null hypothesis (lambda >= 0).

    The standard error of the mean uses the Newey-West HAC estimator with
    Bartlett weights and bandwidth floor(K ** (1/3)), since local rates
    are serially correlated. ``p = Phi(lambda_hat / se)``: values near 1
    retain chaos, small values reject it. ``reject`` is ``p < alpha``.

    When every local rate is identical the variance degenerates; then p is
    1 for lambda_hat >= 0 and 0 otherwise, with ``degenerate`` flagged.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    rates = np.asarray(local_rates, dtype=float)
    K = rates.size
    if K < 2:
        raise ValueError("need at least 2 local rates")
    centered = rates - rates.mean()
    gamma0 = float(centered @ centered) / K
    bandwidth = int(math.floor(K ** (1.0 / 3.0) + 1e-9))
    long_run = gamma0
    for j in range(1, bandwidth + 1):
        gamma_j = float(centered[j:] @ centered[:-j]) / K
        long_run += 2.0 * (1.0 - j / (bandwidth + 1.0)) * gamma_j
    if long_run <= 0.0:
        p = 1.0 if lambda_hat >= 0.0 else 0.0
        return TestOutcome(p, 0.0, p < alpha, True)
    se = math.sqrt(long_run / K)
    p = _norm_cdf(lambda_hat / se)
    return TestOutcome(p, se, p < alpha, False)
