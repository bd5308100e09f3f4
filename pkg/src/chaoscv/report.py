"""JSON serialization of results/selections and the plain-text report tables."""

from __future__ import annotations

import numpy as np

from .fitting import Triplet
from .lyapunov import ChaosTestResult
from .selection import RankedSelection, RankedVariable


def result_to_dict(result: ChaosTestResult, include_local_rates: bool = False) -> dict:
    d = {
        "signal_id": result.signal_id,
        "label": result.label,
        "lambda_hat": result.lambda_hat,
        "p_value": result.p_value,
        "triplet": (
            {"L": result.triplet.L, "m": result.triplet.m, "q": result.triplet.q}
            if result.triplet is not None
            else None
        ),
        "sse": result.sse,
        "M": result.M,
        "se": result.se,
        "clamped_steps": result.clamped_steps,
    }
    if include_local_rates and result.local_rates is not None:
        d["local_rates"] = np.asarray(result.local_rates).tolist()
    return d


def result_from_dict(d: dict) -> ChaosTestResult:
    """Parse one result row; tolerates minimal hand-built fixtures that
    carry only identity, lambda and p."""
    triplet = d.get("triplet")
    rates = d.get("local_rates")
    return ChaosTestResult(
        signal_id=str(d["signal_id"]),
        label=str(d.get("label", d["signal_id"])),
        lambda_hat=float(d["lambda_hat"]),
        p_value=float(d["p_value"]),
        triplet=Triplet(**triplet) if triplet else None,
        sse=float(d.get("sse", float("nan"))),
        M=int(d.get("M", 0)),
        se=float(d.get("se", float("nan"))),
        local_rates=np.asarray(rates, dtype=float) if rates is not None else None,
        clamped_steps=int(d.get("clamped_steps", 0)),
    )


def selection_to_dict(selection: RankedSelection) -> dict:
    return {
        "criterion": selection.criterion,
        "entries": [
            {
                "signal_id": e.signal_id,
                "label": e.label,
                "lambda_hat": e.lambda_hat,
                "p_value": e.p_value,
                "score": e.score,
                "rank": e.rank,
            }
            for e in selection.entries
        ],
        "filtered_out": [
            {"signal_id": sid, "reason": reason} for sid, reason in selection.filtered_out
        ],
    }


def selection_from_dict(d: dict) -> RankedSelection:
    entries = tuple(
        RankedVariable(
            signal_id=e["signal_id"],
            label=e.get("label", e["signal_id"]),
            lambda_hat=float(e["lambda_hat"]),
            p_value=float(e["p_value"]),
            score=float(e["score"]),
            rank=int(e["rank"]),
        )
        for e in d["entries"]
    )
    filtered = tuple((f["signal_id"], f["reason"]) for f in d.get("filtered_out", []))
    return RankedSelection(d["criterion"], entries, filtered)


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    def fmt(cells):
        return "  ".join(c.ljust(w) if i == 0 or i == 1 else c.rjust(w)
                         for i, (c, w) in enumerate(zip(cells, widths))).rstrip()
    lines = [fmt(header), fmt(["-" * w for w in widths])]
    lines.extend(fmt(r) for r in rows)
    return "\n".join(lines)


def format_results_table(results) -> str:
    """Per-signal chaos test table: Symbol, Abbrev., lambda, p."""
    rows = [
        [r.signal_id, r.label, f"{r.lambda_hat:.4f}", f"{r.p_value:.4f}"]
        for r in results
    ]
    return _table(["Symbol", "Abbrev.", "lambda", "p"], rows)


def format_selection_table(selection: RankedSelection) -> str:
    """Ranking table: Symbol, Abbrev., lambda, p, lambda*p.

    Appends the interpretation note that larger lambda*p values call for
    the more robust control loops.
    """
    rows = [
        [
            e.signal_id,
            e.label,
            f"{e.lambda_hat:.5f}",
            f"{e.p_value:.5f}",
            f"{e.score:.5f}",
        ]
        for e in selection.entries
    ]
    table = _table(["Symbol", "Abbrev.", "lambda", "p", "lambda*p"], rows)
    note = (
        "Note: variables with larger lambda*p warrant the more robust "
        "control loops."
    )
    return table + "\n" + note
