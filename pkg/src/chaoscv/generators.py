"""Reference signal generators with known chaotic character.

Each chaotic map ships an independent analytic-derivative Lyapunov oracle
so the network-based estimator can be validated against ground truth.
Randomness comes from numpy's default PCG64 generator with explicit
seeding; observation noise is added after trajectory generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .signals import Signal

KINDS = ("logistic", "henon", "lorenz", "ar1", "sine", "iid_noise")

_DEFAULTS: dict[str, dict[str, float]] = {
    "logistic": {"r": 4.0, "x0": 0.3},
    "henon": {"a": 1.4, "b": 0.3, "x0": 0.1, "y0": 0.0},
    # initial condition sits on the attractor so short demos diverge fast
    "lorenz": {
        "sigma": 10.0,
        "rho": 28.0,
        "beta": 8.0 / 3.0,
        "h": 0.01,
        "stride": 5.0,
        "x0": -15.4,
        "y0": -11.2,
        "z0": 40.1,
    },
    "ar1": {"phi": 0.5, "sigma": 1.0, "x0": 0.0},
    "sine": {"amplitude": 1.0, "period": 50.0, "phase": 0.0},
    "iid_noise": {"std": 1.0},
}


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one reference signal.

    ``parameters`` overrides the kind's documented defaults; unknown keys
    are rejected. ``noise_std`` is additive observation noise applied to
    the finished trajectory; ``transient_skip`` drops leading samples.
    """

    kind: str
    parameters: Mapping[str, float] = field(default_factory=dict)
    n: int = 1000
    seed: int = 0
    noise_std: float = 0.0
    transient_skip: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; choose from {KINDS}")
        unknown = set(self.parameters) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ValueError(
                f"unknown parameter(s) {sorted(unknown)} for kind {self.kind!r}"
            )
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")
        if self.transient_skip < 0:
            raise ValueError("transient_skip must be >= 0")
        object.__setattr__(self, "parameters", dict(self.parameters))

    def resolved(self) -> dict[str, float]:
        """Kind defaults merged with the explicit overrides."""
        merged = dict(_DEFAULTS[self.kind])
        merged.update(self.parameters)
        return merged

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": self.resolved(),
            "n": self.n,
            "seed": self.seed,
            "noise_std": self.noise_std,
            "transient_skip": self.transient_skip,
        }


def _logistic_orbit(r: float, x0: float, n: int) -> np.ndarray:
    if not 0.0 < x0 < 1.0:
        raise ValueError("logistic initial condition must lie in (0, 1)")
    if not 0.0 < r <= 4.0:
        raise ValueError("logistic r must lie in (0, 4]")
    out = np.empty(n)
    x = x0
    for i in range(n):
        out[i] = x
        x = r * x * (1.0 - x)
    return out


def _henon_orbit(a: float, b: float, x0: float, y0: float, n: int) -> np.ndarray:
    out = np.empty(n)
    x, y = x0, y0
    for i in range(n):
        out[i] = x
        x, y = 1.0 - a * x * x + y, b * x
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError("Henon orbit diverged; initial condition outside basin")
    return out


def lorenz_rhs(state: np.ndarray, sigma: float, rho: float, beta: float) -> np.ndarray:
    x, y, z = state
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


def lorenz_trajectory(
    n_steps: int,
    h: float = 0.01,
    sigma: float = 10.0,
    rho: float = 28.0,
    beta: float = 8.0 / 3.0,
    initial=(-15.4, -11.2, 40.1),
) -> np.ndarray:
    """Fixed-step RK4 integration; returns states at steps 0..n_steps."""
    if h <= 0:
        raise ValueError("RK4 step h must be positive")
    state = np.asarray(initial, dtype=float).copy()
    out = np.empty((n_steps + 1, 3))
    out[0] = state
    for i in range(n_steps):
        k1 = lorenz_rhs(state, sigma, rho, beta)
        k2 = lorenz_rhs(state + 0.5 * h * k1, sigma, rho, beta)
        k3 = lorenz_rhs(state + 0.5 * h * k2, sigma, rho, beta)
        k4 = lorenz_rhs(state + h * k3, sigma, rho, beta)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = state
    return out


def _lorenz_samples(p: dict[str, float], n: int) -> np.ndarray:
    stride = int(p["stride"])
    if stride < 1:
        raise ValueError("lorenz stride must be >= 1")
    traj = lorenz_trajectory(
        (n - 1) * stride,
        h=p["h"],
        sigma=p["sigma"],
        rho=p["rho"],
        beta=p["beta"],
        initial=(p["x0"], p["y0"], p["z0"]),
    )
    return traj[::stride, 0].copy()


def generate(spec: GeneratorSpec) -> Signal:
    """Produce the signal described by ``spec``; bit-deterministic."""
    p = spec.resolved()
    total = spec.n + spec.transient_skip
    rng = np.random.default_rng(spec.seed)

    if spec.kind == "logistic":
        samples = _logistic_orbit(p["r"], p["x0"], total)
    elif spec.kind == "henon":
        samples = _henon_orbit(p["a"], p["b"], p["x0"], p["y0"], total)
    elif spec.kind == "lorenz":
        samples = _lorenz_samples(p, total)
    elif spec.kind == "ar1":
        if p["sigma"] < 0:
            raise ValueError("ar1 innovation sigma must be >= 0")
        innovations = rng.normal(0.0, p["sigma"], size=total)
        samples = np.empty(total)
        x = p["x0"]
        for i in range(total):
            x = p["phi"] * x + innovations[i]
            samples[i] = x
    elif spec.kind == "sine":
        if p["period"] <= 0:
            raise ValueError("sine period must be positive")
        t = np.arange(total, dtype=float)
        samples = p["amplitude"] * np.sin(2.0 * math.pi * t / p["period"] + p["phase"])
    else:  # iid_noise
        if p["std"] < 0:
            raise ValueError("iid_noise std must be >= 0")
        samples = rng.normal(0.0, p["std"], size=total)

    if spec.noise_std > 0.0:
        samples = samples + rng.normal(0.0, spec.noise_std, size=total)
    samples = samples[spec.transient_skip :]
    return Signal(id=spec.kind, label=spec.kind, samples=samples)


def oracle_lambda(spec: GeneratorSpec, n_iterations: int = 100_000) -> float:
    """Ground-truth largest Lyapunov exponent from the true system.

    logistic: orbit average of ln|r(1-2x)|. henon: tangent-vector growth
    under the exact 2x2 Jacobians. ar1: ln|phi|. lorenz: variational
    (Benettin) integration of the true ODE, converted to per-sample units
    via the sampling stride. Units are per emitted sample in every case.
    """
    p = spec.resolved()
    if spec.kind == "logistic":
        n = max(spec.n, n_iterations)
        orbit = _logistic_orbit(p["r"], p["x0"], n + 1000)[1000:]
        return float(np.mean(np.log(np.abs(p["r"] * (1.0 - 2.0 * orbit)))))
    if spec.kind == "henon":
        n = max(spec.n, n_iterations)
        x, y = p["x0"], p["y0"]
        for _ in range(1000):
            x, y = 1.0 - p["a"] * x * x + y, p["b"] * x
        v = np.array([1.0, 0.0])
        total = 0.0
        for _ in range(n):
            v = np.array([-2.0 * p["a"] * x * v[0] + v[1], p["b"] * v[0]])
            norm = float(np.linalg.norm(v))
            total += math.log(norm)
            v /= norm
            x, y = 1.0 - p["a"] * x * x + y, p["b"] * x
        return total / n
    if spec.kind == "ar1":
        return math.log(abs(p["phi"]))
    if spec.kind == "lorenz":
        return _lorenz_oracle(p, n_steps=max(50_000, spec.n))
    raise ValueError(f"no Lyapunov oracle for kind {spec.kind!r}")


def _lorenz_jacobian(state, sigma, rho, beta) -> np.ndarray:
    x, y, z = state
    return np.array(
        [
            [-sigma, sigma, 0.0],
            [rho - z, -1.0, -x],
            [y, x, -beta],
        ]
    )


def _lorenz_oracle(p: dict[str, float], n_steps: int) -> float:
    """Benettin method: joint RK4 of the state and one tangent vector."""
    sigma, rho, beta, h = p["sigma"], p["rho"], p["beta"], p["h"]

    def rhs(joint):
        state, v = joint[:3], joint[3:]
        return np.concatenate(
            [
                lorenz_rhs(state, sigma, rho, beta),
                _lorenz_jacobian(state, sigma, rho, beta) @ v,
            ]
        )

    joint = np.array([p["x0"], p["y0"], p["z0"], 1.0, 0.0, 0.0])
    total = 0.0
    for _ in range(n_steps):
        k1 = rhs(joint)
        k2 = rhs(joint + 0.5 * h * k1)
        k3 = rhs(joint + 0.5 * h * k2)
        k4 = rhs(joint + h * k3)
        joint = joint + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        norm = float(np.linalg.norm(joint[3:]))
        total += math.log(norm)
        joint[3:] /= norm
    lambda_continuous = total / (n_steps * h)
    return lambda_continuous * h * int(p["stride"])
