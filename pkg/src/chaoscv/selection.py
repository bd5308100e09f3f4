"""Controlled-variable ranking from per-signal chaos test results.

Three criteria: descending lambda*p product (chaotic variables first),
ascending p-value (for processes with no positive exponent), and their
combination. Ties always break by signal_id string ascending so output
is deterministic regardless of input order.
"""

from __future__ import annotations

from dataclasses import dataclass

CRITERIA = ("product", "ascending_p", "combined")


@dataclass(frozen=True)
class RankedVariable:
    signal_id: str
    label: str
    lambda_hat: float
    p_value: float
    score: float  # lambda_hat * p_value
    rank: int


@dataclass(frozen=True)
class RankedSelection:
    criterion: str
    entries: tuple[RankedVariable, ...]
    filtered_out: tuple[tuple[str, str], ...]  # (signal_id, reason)


def _check_inputs(results) -> list:
    results = list(results)
    if not results:
        raise ValueError("results must be nonempty")
    seen = set()
    for r in results:
        if r.signal_id in seen:
            raise ValueError(f"duplicate signal_id {r.signal_id!r}")
        seen.add(r.signal_id)
    return results


def _entry(r, rank: int) -> RankedVariable:
    return RankedVariable(
        signal_id=r.signal_id,
        label=r.label,
        lambda_hat=r.lambda_hat,
        p_value=r.p_value,
        score=r.lambda_hat * r.p_value,
        rank=rank,
    )


def _finalize(criterion, ordered, filtered, top_n) -> RankedSelection:
    if top_n is not None:
        if top_n < 0:
            raise ValueError("top_n must be >= 0")
        for r in ordered[top_n:]:
            filtered.append((r.signal_id, "truncated by top_n"))
        ordered = ordered[:top_n]
    entries = tuple(_entry(r, i + 1) for i, r in enumerate(ordered))
    return RankedSelection(criterion, entries, tuple(filtered))


def rank_product(results, filter_nonpositive: bool = True, top_n: int | None = None) -> RankedSelection:
    """Rank by lambda*p descending.

    With ``filter_nonpositive`` (the recommended reduction), entries
    with lambda <= 0 or p = 0 move to ``filtered_out``.
    """
    results = _check_inputs(results)
    kept, filtered = [], []
    for r in results:
        if filter_nonpositive and r.lambda_hat <= 0.0:
            filtered.append((r.signal_id, "lambda <= 0"))
        elif filter_nonpositive and r.p_value == 0.0:
            filtered.append((r.signal_id, "p = 0"))
        else:
            kept.append(r)
    kept.sort(key=lambda r: (-(r.lambda_hat * r.p_value), r.signal_id))
    return _finalize("product", kept, filtered, top_n)


def rank_ascending_p(results) -> RankedSelection:
    """Rank by p-value ascending (least probable that lambda < 0 first)."""
    results = _check_inputs(results)
    ordered = sorted(results, key=lambda r: (r.p_value, r.signal_id))
    return _finalize("ascending_p", ordered, [], None)


def rank_combined(results, top_n: int | None = None) -> RankedSelection:
    """Positive-lambda block by lambda*p descending, then the rest by p
    ascending."""
    results = _check_inputs(results)
    positive = [r for r in results if r.lambda_hat > 0.0]
    rest = [r for r in results if r.lambda_hat <= 0.0]
    positive.sort(key=lambda r: (-(r.lambda_hat * r.p_value), r.signal_id))
    rest.sort(key=lambda r: (r.p_value, r.signal_id))
    return _finalize("combined", positive + rest, [], top_n)


def rank(results, criterion: str, top_n: int | None = None, filter_nonpositive: bool = True) -> RankedSelection:
    """Dispatch by criterion name; see :data:`CRITERIA`."""
    if criterion == "product":
        return rank_product(results, filter_nonpositive=filter_nonpositive, top_n=top_n)
    if criterion == "ascending_p":
        return rank_ascending_p(results)
    if criterion == "combined":
        return rank_combined(results, top_n=top_n)
    raise ValueError(f"unknown criterion {criterion!r}; choose from {CRITERIA}")
