"""Spectral initialization via shifted power iteration.

The initial point is r_hat * w_hat, where r_hat^2 is the mean measurement and
w_hat is the unit eigenvector of the smallest eigenvalue of

    X_init = sum over selected i of a_i a_i^T,

selection keeping indices with b_i <= r_hat^2 / 2 (small measurements, so the
selected rows are nearly orthogonal to the signal and its direction shows up
in the bottom of the spectrum).  X_init is applied matrix-free as
A^T (mask * (A v)), so sketch ensembles never materialize rows.  The smallest
eigenpair comes from power iteration on sigma I - X_init with the shift
sigma exceeding the largest eigenvalue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import apply, apply_adjoint, rng_for

_TAG_POWER_START = 20


@dataclass(frozen=True)
class PowerConfig:
    max_iters: int = 5000
    tol: float = 1e-8
    seed: int = 0


@dataclass(frozen=True)
class EigenResult:
    w: np.ndarray
    eigenvalue_estimate: float
    iters: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class InitReport:
    x0: np.ndarray
    r_hat: float
    n_selected: int
    power_iters: int
    residual: float


def _check_finite(v):
    if not np.all(np.isfinite(v)):
        raise FloatingPointError("operator produced non-finite values")
    return v


def min_eigenvector(op, d, cfg=PowerConfig()):
    """Smallest eigenpair of a symmetric PSD operator given as a callable.

    Runs 10 preliminary power iterations on ``op`` to bound the top
    eigenvalue, shifts by 1.1x that bound, and power-iterates on
    sigma I - op from a seeded random unit vector.  Stops when the Rayleigh
    residual |op w - (w' op w) w| falls below tol * (1 + top-eigenvalue
    bound).  The sign is normalized so the largest-magnitude coordinate is
    nonnegative.
    """
    rng = rng_for(cfg.seed, _TAG_POWER_START)
    w = rng.standard_normal(d)
    w /= np.linalg.norm(w)

    v = w.copy()
    lam_max = 0.0
    for _ in range(10):
        ov = _check_finite(op(v))
        nv = np.linalg.norm(ov)
        if nv == 0.0:
            lam_max = 0.0
            break
        lam_max = nv
        v = ov / nv
    sigma = 1.1 * lam_max

    scale = 1.0 + lam_max
    iters = 0
    converged = False
    opw = _check_finite(op(w))
    lam = float(w @ opw)
    residual = float(np.linalg.norm(opw - lam * w))
    while iters < cfg.max_iters:
        if residual <= cfg.tol * scale:
            converged = True
            break
        u = sigma * w - opw
        nu = np.linalg.norm(u)
        if nu == 0.0:
            # w is an exact eigenvector of the shifted operator
            converged = True
            break
        w = u / nu
        iters += 1
        opw = _check_finite(op(w))
        lam = float(w @ opw)
        residual = float(np.linalg.norm(opw - lam * w))
    else:
        converged = residual <= cfg.tol * scale

    i = int(np.argmax(np.abs(w)))
    if w[i] < 0:
        w = -w
    return EigenResult(w=w, eigenvalue_estimate=lam, iters=iters, residual=residual,
                       converged=converged)


def selection_mask(b):
    """0/1 mask of the indices entering X_init.

    Uses the rule b_i <= mean(b) / 2; if that selects nothing (possible for
    degenerate b with all entries equal), falls back to the ceil(m/2) smallest
    entries so the operator stays nonzero.
    """
    b = np.asarray(b, dtype=np.float64)
    m = b.shape[0]
    mask = b <= 0.5 * b.mean()
    if not mask.any():
        mask = np.zeros(m, dtype=bool)
        mask[np.argsort(b, kind="stable")[: math.ceil(m / 2)]] = True
    return mask.astype(np.float64)


def spectral_init(problem, cfg=PowerConfig()):
    """Initial point r_hat * w_hat for the subgradient method.

    Degenerate measurements (mean b <= 0, e.g. the zero signal) return the
    zero vector with n_selected = m and residual 0.
    """
    b = problem.b
    m = problem.m
    r2 = float(b.mean())
    if r2 <= 0.0:
        return InitReport(x0=np.zeros(problem.d), r_hat=0.0, n_selected=m,
                          power_iters=0, residual=0.0)
    mask = selection_mask(b)
    ens = problem.ensemble

    def op(v):
        return apply_adjoint(ens, mask * apply(ens, v))

    eig = min_eigenvector(op, problem.d, cfg)
    return InitReport(x0=math.sqrt(r2) * eig.w, r_hat=math.sqrt(r2),
                      n_selected=int(mask.sum()), power_iters=eig.iters,
                      residual=eig.residual)
