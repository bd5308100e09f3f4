"""Multi-signal orchestration: grid search and chaos test over a batch.

Per-signal failures (dead sensors, constant columns, too-short series) are
collected rather than aborting the batch; plant datasets routinely contain
them.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import asdict, dataclass, fields

from .fitting import FitConfig, FitDivergedError, grid_search
from .lyapunov import ChaosTestResult
from .signals import Signal


@dataclass(frozen=True)
class RunConfig:
    """End-to-end analysis settings; mirrored one-to-one by the CLI flags."""

    l_max: int = 3
    m_max: int = 6
    q_max: int = 8
    alpha: float = 0.05
    n_starts: int = 5
    base_seed: int = 42
    tol_g: float = 1e-6
    tol_f: float = 1e-10
    max_iterations: int = 500
    dither: float = 1e-3

    def __post_init__(self):
        if min(self.l_max, self.m_max, self.q_max) < 1:
            raise ValueError("bounds l_max, m_max, q_max must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.dither < 0:
            raise ValueError("dither must be >= 0")

    def fit_config(self) -> FitConfig:
        return FitConfig(
            tol_g=self.tol_g, tol_f=self.tol_f, max_iterations=self.max_iterations
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, mapping) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ValueError(f"unknown config key(s): {sorted(unknown)}")
        return cls(**dict(mapping))


def analyze_signal(signal: Signal, config: RunConfig = RunConfig()) -> ChaosTestResult:
    """Grid-search one signal and return the reported chaos test result."""
    best, _ = grid_search(
        signal,
        bounds=(config.l_max, config.m_max, config.q_max),
        n_starts=config.n_starts,
        base_seed=config.base_seed,
        config=config.fit_config(),
        dither=config.dither,
    )
    return best


def _analyze_or_fail(args):
    signal, config = args
    try:
        return "ok", analyze_signal(signal, config)
    except (ValueError, FitDivergedError) as exc:
        return "err", (signal.id, str(exc))


def analyze_signals(
    signals, config: RunConfig = RunConfig(), jobs: int = 1
) -> tuple[list[ChaosTestResult], list[tuple[str, str]]]:
    """Analyze a batch; returns (results, failures) in input order.

    ``jobs > 1`` fans signals out over processes; assembly order stays the
    input column order regardless of completion order.
    """
    signals = list(signals)
    work = [(s, config) for s in signals]
    if jobs > 1 and len(signals) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_analyze_or_fail, work))
    else:
        outcomes = [_analyze_or_fail(w) for w in work]

    results: list[ChaosTestResult] = []
    failures: list[tuple[str, str]] = []
    for status, payload in outcomes:
        if status == "ok":
            results.append(payload)
        else:
            failures.append(payload)
    return results, failures
