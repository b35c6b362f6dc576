"""Polyak subgradient method with trace recording and rate estimation.

The step from x uses the known minimal value of the objective:

    x_next = x - (f(x) - min_value) / |zeta|^2 * zeta,   zeta a subgradient,

which needs no step-size tuning.  For noiseless phase retrieval the minimum
is 0; corrupted problems have unknown positive minima, so the value is
configurable.  The loop stops on a value tolerance, a relative-distance
tolerance (when the signal is known), a vanishing subgradient, or the
iteration cap; tolerances set to 0 / None are disabled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import objective

CONVERGED = "converged"
MAX_ITERS = "max_iters"
ZERO_SUBGRADIENT = "zero_subgradient"


@dataclass(frozen=True)
class SolverConfig:
    min_value: float = 0.0
    max_iters: int = 2000
    tol_value: float = 0.0
    tol_dist: float | None = None


@dataclass(frozen=True)
class PolyakStep:
    """One evaluated step; ``next_x`` is None when the subgradient vanished."""

    next_x: np.ndarray | None
    f_value: float
    subgrad_norm: float


@dataclass(frozen=True)
class TraceRecord:
    k: int
    f_value: float
    subgrad_norm: float
    step_length: float
    rel_dist: float | None = None


@dataclass
class SolveTrace:
    records: list[TraceRecord] = field(default_factory=list)
    final_x: np.ndarray | None = None
    status: str = MAX_ITERS

    @property
    def iterations(self):
        return len(self.records)


def polyak_step(problem, x, min_value=0.0):
    """Evaluate f and a subgradient at x and take one Polyak step."""
    x = np.asarray(x, dtype=np.float64)
    f = objective.value(problem, x)
    zeta = objective.subgradient(problem, x)
    gn = float(np.linalg.norm(zeta))
    if gn == 0.0:
        return PolyakStep(next_x=None, f_value=f, subgrad_norm=0.0)
    return PolyakStep(next_x=x - ((f - min_value) / gn**2) * zeta, f_value=f, subgrad_norm=gn)


def _rel_dist(x, xbar, nb):
    return min(np.linalg.norm(x - xbar), np.linalg.norm(x + xbar)) / nb


def run(problem, x0, cfg):
    """Iterate Polyak steps from x0 until a stopping rule fires.

    One trace record is written per evaluated iterate; ``step_length`` is the
    norm of the attempted step, (f - min_value) / |zeta| (NaN when the
    subgradient vanished).  ``rel_dist`` is min(|x-xbar|, |x+xbar|) / |xbar|
    and is present only when the problem stores the signal.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    if x.shape != (problem.d,):
        raise ValueError(f"x0 has shape {x.shape}, expected ({problem.d},)")
    xbar = problem.truth
    nb = np.linalg.norm(xbar) if xbar is not None else 0.0
    trace = SolveTrace()
    for k in range(cfg.max_iters):
        step = polyak_step(problem, x, cfg.min_value)
        rel = _rel_dist(x, xbar, nb) if xbar is not None and nb > 0 else None
        length = (step.f_value - cfg.min_value) / step.subgrad_norm if step.subgrad_norm > 0 else math.nan
        trace.records.append(
            TraceRecord(k=k, f_value=step.f_value, subgrad_norm=step.subgrad_norm,
                        step_length=length, rel_dist=rel)
        )
        if cfg.tol_value > 0.0 and step.f_value <= cfg.tol_value:
            trace.status = CONVERGED
            break
        if cfg.tol_dist is not None and rel is not None and rel <= cfg.tol_dist:
            trace.status = CONVERGED
            break
        if step.next_x is None:
            trace.status = ZERO_SUBGRADIENT
            break
        x = step.next_x
    else:
        trace.status = MAX_ITERS
    trace.final_x = x
    return trace


def geometric_rate_estimate(trace, window=50):
    """Per-step geometric contraction factor of rel_dist over the final window.

    Returns exp of the mean log-ratio of consecutive relative distances, i.e.
    the window-average rate; values below 1 indicate linear convergence.
    Requires at least window + 1 trailing records with positive rel_dist.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    rels = [r.rel_dist for r in trace.records]
    if len(rels) < window + 1:
        raise ValueError(f"trace has {len(rels)} records, need {window + 1}")
    tail = rels[-(window + 1):]
    if any(r is None or r <= 0.0 for r in tail):
        raise ValueError("rate estimate needs positive rel_dist over the whole window")
    logs = [math.log(tail[i + 1] / tail[i]) for i in range(window)]
    return math.exp(sum(logs) / window)
