"""RMSE, weighted cuRMSE, and molecule-level bootstrap intervals.

Two weighted variants are exposed because the defining formula and its
published worked example disagree:

* :func:`cu_rmse` -- the formula as printed: weights multiply the squared
  error, the denominator is the pair count n. Two records with error 0.6
  and weight 0.5 give sqrt((0.5*0.36 + 0.5*0.36)/2) = 0.424.
* :func:`cu_rmse_error_weighted` -- the arithmetic of the worked example,
  which weights the error before squaring and prints 0.3 for the same two
  records.

Reports always name which function produced a number.
"""

from __future__ import annotations

import numpy as np
from dataclasses import dataclass, replace

from .rounding import format_fixed


class EmptyInput(ValueError):
    pass


class WeightOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class EvalPair:
    """One prediction: molecule key, predicted and observed log S, weight."""

    molecule_key: str
    predicted: float
    observed: float
    weight: float = 1.0


@dataclass(frozen=True)
class MetricReport:
    metric_name: str
    point: float
    ci_halfwidth: float
    n_records: int
    n_molecules: int
    formatted: str


def _arrays(pairs: list[EvalPair]) -> tuple[np.ndarray, np.ndarray]:
    if not pairs:
        raise EmptyInput("no evaluation pairs")
    deltas = np.array([p.predicted - p.observed for p in pairs], dtype=float)
    weights = np.array([p.weight for p in pairs], dtype=float)
    if not (np.all(np.isfinite(deltas)) and np.all(np.isfinite(weights))):
        raise ValueError("evaluation pairs must be finite")
    return deltas, weights


def _check_weights(weights: np.ndarray) -> None:
    if np.any(weights <= 0.0) or np.any(weights > 1.0):
        raise WeightOutOfRange("weights must lie in (0, 1]")


def _rmse(deltas: np.ndarray) -> float:
    return float(np.sqrt(np.mean(deltas * deltas)))


def _cu_rmse(deltas: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(np.sum(weights * deltas * deltas) / deltas.size))


def _cu_rmse_error_weighted(deltas: np.ndarray, weights: np.ndarray) -> float:
    scaled = weights * deltas
    return float(np.sqrt(np.sum(scaled * scaled) / deltas.size))


def rmse(pairs: list[EvalPair]) -> float:
    """Plain root-mean-square error over the pairs."""
    deltas, _ = _arrays(pairs)
    return _rmse(deltas)


def cu_rmse(pairs: list[EvalPair]) -> float:
    """Weighted RMSE, weights on the squared errors, divided by n."""
    deltas, weights = _arrays(pairs)
    _check_weights(weights)
    return _cu_rmse(deltas, weights)


def cu_rmse_error_weighted(pairs: list[EvalPair]) -> float:
    """Variant matching the published worked example: weights applied to
    the error before squaring."""
    deltas, weights = _arrays(pairs)
    _check_weights(weights)
    return _cu_rmse_error_weighted(deltas, weights)


METRICS = {
    "rmse": rmse,
    "curmse": cu_rmse,
    "curmse_error_weighted": cu_rmse_error_weighted,
}

_ARRAY_METRICS = {
    "rmse": lambda d, w: _rmse(d),
    "curmse": _cu_rmse,
    "curmse_error_weighted": _cu_rmse_error_weighted,
}


def bootstrap_ci(
    pairs: list[EvalPair], metric: str = "rmse", b: int = 1000, seed: int = 0
) -> MetricReport:
    """Molecule-level bootstrap: all records of a molecule resample together.

    The point value is the metric on the original pairs (seed-independent);
    the halfwidth is the sample standard deviation of the metric across
    ``b`` resamples of the molecules, drawn with replacement back to the
    original molecule count.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    if b < 100:
        raise ValueError(f"resample count must be >= 100, got {b}")
    deltas, weights = _arrays(pairs)
    if metric != "rmse":
        _check_weights(weights)

    groups: dict[str, list[int]] = {}
    for i, p in enumerate(pairs):
        groups.setdefault(p.molecule_key, []).append(i)
    index_arrays = [np.array(ix) for ix in groups.values()]
    m = len(index_arrays)

    fn = _ARRAY_METRICS[metric]
    point = fn(deltas, weights)
    rng = np.random.default_rng(seed)
    values = np.empty(b)
    for r in range(b):
        chosen = rng.integers(0, m, size=m)
        take = np.concatenate([index_arrays[c] for c in chosen])
        values[r] = fn(deltas[take], weights[take])
    halfwidth = float(np.std(values, ddof=1))

    report = MetricReport(
        metric_name=metric,
        point=point,
        ci_halfwidth=halfwidth,
        n_records=len(pairs),
        n_molecules=m,
        formatted="",
    )
    return replace(report, formatted=format_report(report))


def format_report(r: MetricReport) -> str:
    """Two-decimal "point ± halfwidth" cell, ties rounded away from zero."""
    return f"{format_fixed(r.point, 2)} ± {format_fixed(r.ci_halfwidth, 2)}"
