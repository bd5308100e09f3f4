"""Scalar time-series container, CSV ingestion, and delay-embedding construction."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace

import numpy as np


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Signal:
    """One named scalar time series.

    Attributes
    ----------
    id : str
        Short symbol, e.g. ``"y10"``.
    label : str
        Free-text abbreviation, e.g. ``"FP"``.
    samples : np.ndarray
        Ordered sample values; finite, length >= 1. Stored read-only.
    sample_period : float
        Time units per step (default 1.0).
    """

    id: str
    label: str
    samples: np.ndarray
    sample_period: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "samples", _readonly(self.samples))
        if self.samples.ndim != 1 or self.samples.size < 1:
            raise ValueError("samples must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError(f"signal {self.id!r} contains non-finite samples")
        if not self.sample_period > 0:
            raise ValueError("sample_period must be positive")

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class LaggedDataset:
    """Delay-embedded regression problem.

    Row t of ``inputs`` holds ``(x[t-L], x[t-2L], ..., x[t-mL])`` -- most
    recent lag first -- and ``targets[t]`` holds ``x[t]``.
    """

    inputs: np.ndarray
    targets: np.ndarray
    L: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "inputs", _readonly(self.inputs))
        object.__setattr__(self, "targets", _readonly(self.targets))
        if self.inputs.ndim != 2 or self.inputs.shape[1] != self.m:
            raise ValueError("inputs must have shape (n, m)")
        if self.targets.shape != (self.inputs.shape[0],):
            raise ValueError("targets length must match inputs row count")
        if self.inputs.shape[0] < 1:
            raise ValueError("empty lagged dataset")

    def __len__(self) -> int:
        return int(self.targets.size)


def _parse_rows(reader, columns, source: str) -> list[Signal]:
    header = next(reader, None)
    if header is None:
        raise ValueError(f"{source}: empty file, expected a header row")
    header = [name.strip() for name in header]
    seen = set()
    for name in header:
        if name in seen:
            raise ValueError(f"{source}: duplicate column {name!r} in header")
        seen.add(name)

    selected = list(columns) if columns else list(header)
    missing = [name for name in selected if name not in seen]
    if missing:
        raise ValueError(f"{source}: selected column(s) not in header: {missing}")
    positions = {name: header.index(name) for name in selected}

    rows = list(reader)
    # tolerate blank line(s) at EOF
    while rows and all(cell.strip() == "" for cell in rows[-1]):
        rows.pop()
    if not rows:
        raise ValueError(f"{source}: no data rows")

    data = {name: np.empty(len(rows)) for name in selected}
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise ValueError(
                f"{source}: row {i} has {len(row)} cells, expected {len(header)}"
            )
        for name in selected:
            cell = row[positions[name]].strip()
            try:
                value = float(cell)
            except ValueError:
                value = float("nan")
            if not np.isfinite(value):
                raise ValueError(
                    f"{source}: non-numeric cell {cell!r} at row {i}, column {name!r}"
                )
            data[name][i - 1] = value

    return [Signal(id=name, label=name, samples=data[name]) for name in selected]


def load_csv(path, columns=None) -> list[Signal]:
    """Load one Signal per column from a headered CSV file.

    Parameters
    ----------
    path : str or Path
        UTF-8 CSV file: one header row of unique names, one column per
        signal, one row per sample instant.
    columns : sequence of str, optional
        Column names to load. Empty or None selects every column.
        Unselected columns (e.g. a time axis) are never parsed.

    Raises
    ------
    FileNotFoundError
        Missing file.
    ValueError
        Duplicate header name, unknown selection, ragged row, or a cell
        that does not parse as a finite real number (reported with its
        1-based data row and column name).
    """
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_rows(csv.reader(fh), columns, str(path))


def parse_csv(text: str, columns=None, source: str = "<csv>") -> list[Signal]:
    """Same as :func:`load_csv` but reads CSV content from a string."""
    return _parse_rows(csv.reader(io.StringIO(text)), columns, source)


def signals_to_csv(signals) -> str:
    """Render signals of equal length to the standard CSV schema."""
    lengths = {len(s) for s in signals}
    if len(lengths) != 1:
        raise ValueError("signals must share one length to form a CSV")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([s.id for s in signals])
    for row in zip(*(s.samples for s in signals)):
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def standardize(signal: Signal) -> tuple[Signal, float, float]:
    """Center and scale a signal to zero mean and unit (ddof=1) deviation.

    Returns the standardized signal plus the removed mean and deviation
    for traceability. A constant signal has nothing to test and raises
    ``ValueError("degenerate signal ...")``.
    """
    x = signal.samples
    if x.size < 2:
        raise ValueError("standardize requires at least 2 samples")
    mean = float(x.mean())
    std = float(x.std(ddof=1))
    if std == 0.0:
        raise ValueError(f"degenerate signal {signal.id!r}: constant samples")
    out = replace(signal, samples=(x - mean) / std)
    return out, mean, std


def build_lagged(signal: Signal, L: int, m: int) -> LaggedDataset:
    """Build the lagged regression matrix for delay L and dimension m.

    For each target index t in [m*L, T) the input row is
    ``(x[t-L], x[t-2L], ..., x[t-mL])``, most recent lag first. Raises
    ``ValueError`` when ``T <= m*L`` (signal too short for embedding).
    """
    if L < 1 or m < 1:
        raise ValueError("L and m must be >= 1")
    x = signal.samples
    T = x.size
    if T <= m * L:
        raise ValueError(
            f"signal too short for embedding: T={T} <= m*L={m * L}"
        )
    t = np.arange(m * L, T)
    inputs = np.column_stack([x[t - j * L] for j in range(1, m + 1)])
    return LaggedDataset(inputs=inputs, targets=x[t], L=L, m=m)


def suggest_embedding_dim(
    signal: Signal, L: int, m_max: int, rel_threshold: float = 0.01
) -> int:
    """Spectral-rank heuristic for the embedding dimension.

    Builds the lagged matrix X at dimension ``m_max`` and counts the
    eigenvalues of ``X.T @ X`` above ``rel_threshold`` times the largest
    one, clamped to [1, m_max]. Advisory only -- the grid search makes
    the final choice.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    dataset = build_lagged(signal, L, m_max)
    X = dataset.inputs
    evals = np.linalg.eigvalsh(X.T @ X)
    count = int(np.sum(evals > rel_threshold * evals[-1]))
    return min(max(count, 1), m_max)
