"""Chaos detection in noisy scalar time series and chaos-based ranking of
candidate controlled variables.

The estimator fits a single-hidden-layer tanh network to a delay embedding
of each signal, accumulates the fitted map's companion Jacobians into the
largest Lyapunov exponent, and attaches a one-tailed p-value for the chaos
null hypothesis. Candidate controlled variables are then ranked by the
lambda*p product.
"""

from .fitting import (
    FitConfig,
    FitDivergedError,
    FitResult,
    Triplet,
    fit,
    grid_search,
    multi_start_fit,
)
from .generators import KINDS, GeneratorSpec, generate, lorenz_trajectory, oracle_lambda
from .lyapunov import (
    ChaosTestResult,
    LyapunovEstimate,
    TestOutcome,
    companion_jacobian,
    hypothesis_test,
    lyapunov_direct,
    lyapunov_qr,
    lyapunov_stabilized,
)
from .network import (
    NetworkParams,
    forward,
    input_gradient,
    parameter_gradient,
    predict,
)
from .pipeline import RunConfig, analyze_signal, analyze_signals
from .selection import (
    CRITERIA,
    RankedSelection,
    RankedVariable,
    rank,
    rank_ascending_p,
    rank_combined,
    rank_product,
)
from .signals import (
    LaggedDataset,
    Signal,
    build_lagged,
    load_csv,
    parse_csv,
    signals_to_csv,
    standardize,
    suggest_embedding_dim,
)

__version__ = "0.1.0"

__all__ = [
    "ChaosTestResult",
    "CRITERIA",
    "FitConfig",
    "FitDivergedError",
    "FitResult",
    "GeneratorSpec",
    "KINDS",
    "LaggedDataset",
    "LyapunovEstimate",
    "NetworkParams",
    "RankedSelection",
    "RankedVariable",
    "RunConfig",
    "Signal",
    "TestOutcome",
    "Triplet",
    "analyze_signal",
    "analyze_signals",
    "build_lagged",
    "companion_jacobian",
    "fit",
    "forward",
    "generate",
    "grid_search",
    "hypothesis_test",
    "input_gradient",
    "load_csv",
    "lorenz_trajectory",
    "lyapunov_direct",
    "lyapunov_qr",
    "lyapunov_stabilized",
    "multi_start_fit",
    "oracle_lambda",
    "parameter_gradient",
    "parse_csv",
    "predict",
    "rank",
    "rank_ascending_p",
    "rank_combined",
    "rank_product",
    "signals_to_csv",
    "standardize",
    "suggest_embedding_dim",
    "__version__",
]
