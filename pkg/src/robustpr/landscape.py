"""Closed-form population landscape of robust phase retrieval.

For Gaussian measurements, the population objective

    F(x) = E_a |<a, x>^2 - <a, xbar>^2|

depends on x only through the two extreme eigenvalues (y1, y2) of the
rank-two matrix X = x x^T - xbar xbar^T, via the norm

    zeta(y1, y2) = E |v1 y1 + v2 y2|,   v1, v2 i.i.d. chi-squared(1),

which has the closed form implemented below.  This module provides the
rank-two eigen decomposition, zeta and its partial derivatives, the
population objective and gradient, the critical ring radius c solving
c/(1+c^2) + arctan(c) = pi/4, Monte Carlo cross-checks for all closed forms,
and the dimensionless scores that test whether a candidate point sits near
the stationary set {0, +-xbar} union {x perp xbar, |x| = c |xbar|}.

Stationary points of the subsampled objective concentrate near that set at
rate (d/m)^(1/4); ``certify_stationary`` reports how far a candidate is from
each piece in those units, and ``graph_closeness_audit`` pairs empirical
stationary points with nearby small-gradient points of the population
objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import densify, rng_for
from .objective import weak_convexity_probe

NEAR_SIGNAL = "near_signal"
NEAR_ZERO = "near_zero"
NEAR_ORTHOGONAL_RING = "near_orthogonal_ring"
UNEXPLAINED = "unexplained"

# Relative threshold on the orthogonal component below which x is treated as
# collinear with xbar; the rank-two reduction is ill-conditioned past it.
COLLINEAR_TOL = 1e-10

_TAG_MC_POPULATION = 30
_TAG_MC_SPECTRAL = 31
_TAG_MC_CORRUPT_MASK = 32
_TAG_MC_CORRUPT_XI = 33


class NonsmoothPointError(Exception):
    """The population objective is not differentiable at the requested point."""


@dataclass(frozen=True)
class RankTwoSpectrum:
    """Extreme eigenpairs of x x^T - xbar xbar^T.

    Eigenvectors are present only for nonzero eigenvalues.  ``collinear``
    marks x parallel to xbar (at most one nonzero eigenvalue); ``degenerate``
    marks x in {+-xbar}, where the matrix vanishes.
    """

    lambda_max: float
    lambda_min: float
    e_max: np.ndarray | None
    e_min: np.ndarray | None
    collinear: bool
    degenerate: bool


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_err: float


@dataclass(frozen=True)
class LandscapeCertificate:
    """Dimensionless closeness scores of a candidate stationary point.

    ``block1_score`` vanishes near {0, +-xbar}; the two block2 scores vanish
    on the orthogonal ring.  ``scale`` = (d/m)^(1/4) is the rate at which
    scores of true empirical stationary points shrink; the verdict picks the
    block with the smallest score/scale, or ``unexplained`` when every
    normalized score exceeds the threshold.
    """

    block1_score: float
    block2_ratio_score: float
    block2_angle_score: float
    scale: float
    verdict: str


@dataclass(frozen=True)
class AuditPair:
    """A grid-stationary point of the empirical objective and its population partner."""

    x_s: np.ndarray
    x_p_near: np.ndarray
    subgrad_norm: float
    pop_grad_norm: float
    dist: float
    radius: float


def rank_two_spectrum(x, xbar):
    """Closed-form extreme eigenpairs of X = x x^T - xbar xbar^T.

    Decomposes x = alpha xbar + v with v perp xbar and solves the symmetric
    2x2 eigenproblem on span(xbar, v); when the orthogonal part is
    negligible the single nonzero eigenvalue is |x|^2 - |xbar|^2.
    """
    x = np.asarray(x, dtype=np.float64)
    xbar = np.asarray(xbar, dtype=np.float64)
    nb2 = float(xbar @ xbar)
    if nb2 == 0.0:
        raise ValueError("xbar must be nonzero")
    nb = math.sqrt(nb2)
    nx2 = float(x @ x)
    nx = math.sqrt(nx2)
    alpha = float(x @ xbar) / nb2
    v = x - alpha * xbar
    nv = float(np.linalg.norm(v))

    if nv <= COLLINEAR_TOL * nx or nx == 0.0:
        # nx2 and nb2 come from the same dot-product path, so x = +-xbar
        # lands on s == 0 exactly
        s = nx2 - nb2
        if s == 0.0:
            return RankTwoSpectrum(0.0, 0.0, None, None, collinear=True, degenerate=True)
        if s > 0.0:
            return RankTwoSpectrum(s, 0.0, xbar / nb, None, collinear=True, degenerate=False)
        return RankTwoSpectrum(0.0, s, None, xbar / nb, collinear=True, degenerate=False)

    # 2x2 restriction to the orthonormal pair (xbar/nb, v/nv):
    #     [[(alpha^2 - 1) nb^2, alpha nb nv], [alpha nb nv, nv^2]]
    m00 = (alpha * alpha - 1.0) * nb2
    m01 = alpha * nb * nv
    m11 = nv * nv
    tr = m00 + m11
    disc = math.hypot(m00 - m11, 2.0 * m01)
    lam1 = 0.5 * (tr + disc)
    lamd = 0.5 * (tr - disc)

    def back(lam):
        a, b = m01, lam - m00
        a2, b2 = lam - m11, m01
        if math.hypot(a2, b2) > math.hypot(a, b):
            a, b = a2, b2
        e = a * (xbar / nb) + b * (v / nv)
        return e / np.linalg.norm(e)

    return RankTwoSpectrum(lam1, lamd, back(lam1), back(lamd),
                           collinear=False, degenerate=False)


def zeta(y1, y2):
    """E |v1 y1 + v2 y2| for i.i.d. chi-squared(1) weights, y1 >= 0 >= y2.

    Interior closed form:
        (4/pi) [ (y1+y2) arctan(sqrt(-y1/y2)) + sqrt(-y1 y2) ] - (y1+y2),
    with continuous boundary values zeta(y1, 0) = y1 and zeta(0, y2) = -y2.
    """
    if y1 < 0.0 or y2 > 0.0:
        raise ValueError(f"need y1 >= 0 >= y2, got ({y1}, {y2})")
    if y2 == 0.0:
        return float(y1)
    if y1 == 0.0:
        return float(-y2)
    t = y1 + y2
    return (4.0 / math.pi) * (t * math.atan(math.sqrt(-y1 / y2)) + math.sqrt(-y1 * y2)) - t


def _zeta_d1(y1, y2):
    # Simplified from the quotient form; equals the partial of zeta in y1.
    return (4.0 / math.pi) * (math.sqrt(-y1 * y2) / (y1 - y2)
                              + math.atan(math.sqrt(-y1 / y2))) - 1.0


def zeta_grad(y1, y2):
    """Partial derivatives of zeta on the strict interior y1 > 0 > y2.

    The y2-partial uses the exchange symmetry zeta(y1, y2) = zeta(-y2, -y1)
    of the underlying expectation, so a single formula is the source of
    truth.  Boundary points are kinks: requesting them raises
    NonsmoothPointError.
    """
    if y1 <= 0.0 or y2 >= 0.0:
        raise NonsmoothPointError(f"zeta is not differentiable at ({y1}, {y2})")
    return _zeta_d1(y1, y2), -_zeta_d1(-y2, -y1)


def population_value(x, xbar):
    """Population objective E |<a,x>^2 - <a,xbar>^2| via the rank-two spectrum."""
    spec = rank_two_spectrum(x, xbar)
    return zeta(max(spec.lambda_max, 0.0), min(spec.lambda_min, 0.0))


def population_gradient(x, xbar):
    """Gradient of the population objective where it is differentiable.

    Chain rule through the simple extreme eigenvalues:

        grad = 2 [d1 <e_max, x> e_max + d2 <e_min, x> e_min],

    the factor 2 coming from the differential of x -> x x^T.  At x = 0 the
    gradient is the zero vector; all other collinear points (including
    +-xbar) are kinks and raise NonsmoothPointError.
    """
    x = np.asarray(x, dtype=np.float64)
    spec = rank_two_spectrum(x, xbar)
    if np.linalg.norm(x) == 0.0:
        return np.zeros(x.shape[0])
    if spec.collinear:
        raise NonsmoothPointError("population objective is nonsmooth at collinear points")
    d1, d2 = zeta_grad(spec.lambda_max, spec.lambda_min)
    return 2.0 * (d1 * float(spec.e_max @ x) * spec.e_max
                  + d2 * float(spec.e_min @ x) * spec.e_min)


def omega(c):
    """Left side c/(1+c^2) + arctan(c) of the ring-radius equation."""
    return c / (1.0 + c * c) + math.atan(c)


def _bisect_omega(target, lo=0.0, hi=2.0, tol=1e-12):
    # omega is strictly increasing on [0, inf); plain bisection is
    # unconditionally convergent and reproducible.
    flo = omega(lo) - target
    if flo > 0.0:
        raise ValueError("bisection bracket does not contain the root")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if omega(mid) - target <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_ratio():
    """Radius of the extraneous stationary ring, relative to |xbar|.

    The unique root c (about 0.4416) of c/(1+c^2) + arctan(c) = pi/4; points
    x perp xbar with |x| = c |xbar| are exactly the stationary points of the
    population objective outside {0, +-xbar}.
    """
    return _bisect_omega(math.pi / 4.0, lo=0.0, hi=1.0)


def ratio_band(eps):
    """Ring radii (c1, c2) bracketing where |d1| <= eps along rays y1 = c^2 (-y2).

    Solves omega(c1) = (pi/4)(1 - eps) and omega(c2) = (pi/4)(1 + eps); the
    band width obeys c2 - c1 <= 5 pi eps for eps < 1/2.
    """
    if not 0.0 <= eps < 0.5:
        raise ValueError(f"eps must lie in [0, 1/2), got {eps}")
    c1 = _bisect_omega(math.pi / 4.0 * (1.0 - eps))
    c2 = _bisect_omega(math.pi / 4.0 * (1.0 + eps))
    return c1, c2


def stationary_set_distance(x, xbar):
    """Distance from x to {0} U {+-xbar} U {x perp xbar : |x| = c |xbar|}."""
    x = np.asarray(x, dtype=np.float64)
    xbar = np.asarray(xbar, dtype=np.float64)
    nb = float(np.linalg.norm(xbar))
    if nb == 0.0:
        raise ValueError("xbar must be nonzero")
    c = critical_ratio()
    par = float(x @ xbar) / nb
    x_perp = x - (par / nb) * xbar
    n_perp = float(np.linalg.norm(x_perp))
    ring = math.hypot(par, n_perp - c * nb) if n_perp > 0 else math.hypot(par, c * nb)
    return min(float(np.linalg.norm(x)),
               float(np.linalg.norm(x - xbar)),
               float(np.linalg.norm(x + xbar)),
               ring)


def _mc_mean(samples):
    n = samples.shape[0]
    se = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MCEstimate(mean=float(samples.mean()), std_err=se)


def mc_population_value(x, xbar, n, seed):
    """Monte Carlo estimate of E_a |<a,x>^2 - <a,xbar>^2| over Gaussian a."""
    if n < 1:
        raise ValueError("n must be positive")
    x = np.asarray(x, dtype=np.float64)
    xbar = np.asarray(xbar, dtype=np.float64)
    rng = rng_for(seed, _TAG_MC_POPULATION)
    a = rng.standard_normal((int(n), x.shape[0]))
    return _mc_mean(np.abs((a @ x) ** 2 - (a @ xbar) ** 2))


def _chi2_pair(n, seed):
    rng = rng_for(seed, _TAG_MC_SPECTRAL)
    v1 = rng.standard_normal(int(n)) ** 2
    v2 = rng.standard_normal(int(n)) ** 2
    return v1, v2


def mc_spectral_value(lambda1, lambda_d, n, seed):
    """Monte Carlo estimate of E |v1 lambda1 + v2 lambda_d|, v_i chi-squared(1)."""
    if n < 1:
        raise ValueError("n must be positive")
    v1, v2 = _chi2_pair(n, seed)
    return _mc_mean(np.abs(v1 * lambda1 + v2 * lambda_d))


def mc_corrupted_population_value(x, xbar, p_fail, scale, n, seed, kind="gaussian"):
    """Monte Carlo value of the population objective under sparse corruption.

    Samples |v1 l1 + v2 ld - delta xi| with (l1, ld) the rank-two eigenvalues,
    delta Bernoulli(p_fail), and xi drawn at the given scale.  The chi-squared
    pair uses the same stream as ``mc_spectral_value``, so p_fail = 0
    reproduces that estimate exactly.
    """
    if not 0.0 <= p_fail < 1.0:
        raise ValueError(f"p_fail must lie in [0, 1), got {p_fail}")
    if n < 1:
        raise ValueError("n must be positive")
    spec = rank_two_spectrum(x, xbar)
    v1, v2 = _chi2_pair(n, seed)
    core = v1 * spec.lambda_max + v2 * spec.lambda_min
    delta = rng_for(seed, _TAG_MC_CORRUPT_MASK).random(int(n)) < p_fail
    rng = rng_for(seed, _TAG_MC_CORRUPT_XI)
    if kind == "gaussian":
        xi = scale * rng.standard_normal(int(n))
    elif kind == "uniform":
        xi = rng.uniform(-scale, scale, size=int(n))
    else:
        raise ValueError(f"unknown noise kind {kind!r}")
    return _mc_mean(np.abs(core - delta * xi))


def certify_stationary(x, xbar, d, m, threshold=10.0):
    """Score a candidate point against the stationary-set geometry.

    Stationary points of the subsampled objective satisfy (up to constants)

        block1_score <= (d/m)^(1/4)      near {0, +-xbar}, or
        both block2 scores <= (d/m)^(1/4)  near the orthogonal ring,

    so each score is reported in units of scale = (d/m)^(1/4).  The verdict
    picks the better-explained block (block1 splits into near_zero /
    near_signal by which point is closer); it is ``unexplained`` when every
    normalized score exceeds ``threshold``.  The constants hidden in the
    bound are not quantified, so treat scores as evidence, not a test.
    """
    if m < 1:
        raise ValueError("m must be positive")
    x = np.asarray(x, dtype=np.float64)
    xbar = np.asarray(xbar, dtype=np.float64)
    nb = float(np.linalg.norm(xbar))
    if nb == 0.0:
        raise ValueError("xbar must be nonzero")
    scale = (d / m) ** 0.25
    nx = float(np.linalg.norm(x))
    dminus = float(np.linalg.norm(x - xbar))
    dplus = float(np.linalg.norm(x + xbar))
    block1 = nx * dminus * dplus / nb**3
    if nx == 0.0:
        return LandscapeCertificate(block1_score=block1, block2_ratio_score=math.inf,
                                    block2_angle_score=math.inf, scale=scale,
                                    verdict=NEAR_ZERO)
    c = critical_ratio()
    ratio = abs(nx / nb - c) / (1.0 + nb / nx)
    with np.errstate(over="ignore"):
        # overflow for absurd candidates surfaces as inf scores; callers that
        # serialize certificates treat that as a numerical failure
        angle = (abs(float(x @ xbar)) / (nx * nb)) * (nx / nb)
    n1 = block1 / scale
    n2 = max(ratio, angle) / scale
    if min(n1, n2) > threshold:
        verdict = UNEXPLAINED
    elif n1 <= n2:
        verdict = NEAR_ZERO if nx < min(dminus, dplus) else NEAR_SIGNAL
    else:
        verdict = NEAR_ORTHOGONAL_RING
    return LandscapeCertificate(block1_score=block1, block2_ratio_score=ratio,
                                block2_angle_score=angle, scale=scale, verdict=verdict)


# ---------------------------------------------------------------------------
# Vectorized planar evaluation (grids in d = 2)
# ---------------------------------------------------------------------------

def population_grid(xbar, x1, x2):
    """Population value and gradient norm on a planar grid (vectorized).

    ``x1`` and ``x2`` are broadcastable coordinate arrays; returns (F, G) of
    the same shape.  G is NaN at nonsmooth collinear cells, 0 at the origin
    and at cells that coincide with the minimizers +-xbar (where 0 is a
    subgradient), and the smooth-gradient norm elsewhere.  Matches the
    pointwise ``population_value`` / ``population_gradient`` on smooth cells.
    """
    xbar = np.asarray(xbar, dtype=np.float64)
    if xbar.shape != (2,):
        raise ValueError("population_grid expects a planar signal")
    nb2 = float(xbar @ xbar)
    if nb2 == 0.0:
        raise ValueError("xbar must be nonzero")
    nb = math.sqrt(nb2)
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)

    alpha = (x1 * xbar[0] + x2 * xbar[1]) / nb2
    v1 = x1 - alpha * xbar[0]
    v2 = x2 - alpha * xbar[1]
    nv = np.hypot(v1, v2)
    nx = np.hypot(x1, x2)
    collinear = nv <= COLLINEAR_TOL * nx

    m00 = (alpha * alpha - 1.0) * nb2
    m01 = alpha * nb * nv
    m11 = nv * nv
    tr = m00 + m11
    disc = np.hypot(m00 - m11, 2.0 * m01)
    lam1 = 0.5 * (tr + disc)
    lamd = 0.5 * (tr - disc)

    with np.errstate(invalid="ignore", divide="ignore"):
        root = np.sqrt(np.maximum(-lam1 * lamd, 0.0))
        f_interior = (4.0 / math.pi) * (tr * np.arctan(np.sqrt(-lam1 / lamd)) + root) - tr
        d1 = (4.0 / math.pi) * (root / (lam1 - lamd) + np.arctan(np.sqrt(-lam1 / lamd))) - 1.0
        d2 = 1.0 - (4.0 / math.pi) * (root / (lam1 - lamd) + np.arctan(np.sqrt(-lamd / lam1)))

        # Unit eigenvector for lam1 in the (xbar/nb, v/nv) basis, stable branch.
        a_first, b_first = m01, lam1 - m00
        a_alt, b_alt = lam1 - m11, m01
        use_alt = np.hypot(a_alt, b_alt) > np.hypot(a_first, b_first)
        a = np.where(use_alt, a_alt, a_first)
        b = np.where(use_alt, b_alt, b_first)
        norm = np.hypot(a, b)
        a = np.where(norm > 0, a / norm, 1.0)
        b = np.where(norm > 0, b / norm, 0.0)
        # Coordinates of x in that basis are (alpha nb, nv); the eigenbasis is
        # orthonormal, so the gradient norm is the hypot of its coefficients.
        xc = alpha * nb
        g1 = 2.0 * d1 * (a * xc + b * nv)
        gd = 2.0 * d2 * (-b * xc + a * nv)
        g_interior = np.hypot(g1, gd)

    s = nx * nx - nb2
    f = np.where(collinear, np.abs(s), f_interior)
    g = np.where(collinear, np.nan, g_interior)
    g = np.where(nx == 0.0, 0.0, g)
    # Exact minimizers: 0 is a subgradient there, report distance 0.
    at_signal = collinear & (np.abs(nx - nb) <= 1e-9 * nb)
    g = np.where(at_signal, 0.0, g)
    return f, g


def grid_local_minima(values, max_value=math.inf):
    """Indices (i, j) of interior cells no larger than all 8 neighbors.

    NaN cells are treated as +inf (they never qualify and never block a
    neighbor).  Cells on the border are not eligible.  Adjacent cells with
    exactly equal values are reported once.
    """
    g = np.where(np.isfinite(values), values, math.inf)
    rows, cols = g.shape
    out = []
    for i in range(1, rows - 1):
        for j in range(1, cols - 1):
            v = g[i, j]
            if v > max_value or not math.isfinite(v):
                continue
            window = g[i - 1:i + 2, j - 1:j + 2]
            if v <= window.min():
                if any(abs(i - pi) <= 1 and abs(j - pj) <= 1 and g[pi, pj] == v
                       for pi, pj in out):
                    continue
                out.append((i, j))
    return out


def _empirical_grids(problem, pts):
    """Objective value and subgradient norm of f_S at the given (N, 2) points."""
    rows = densify(problem.ensemble)
    b = problem.b
    m = rows.shape[0]
    n = pts.shape[0]
    f = np.empty(n)
    gn = np.empty(n)
    chunk = max(1, int(2e6) // max(m, 1))
    for start in range(0, n, chunk):
        p = pts[start:start + chunk]
        ax = rows @ p.T
        resid = ax * ax - b[:, None]
        f[start:start + chunk] = np.mean(np.abs(resid), axis=0)
        z = (2.0 / m) * (rows.T @ (np.sign(resid) * ax))
        gn[start:start + chunk] = np.hypot(z[0], z[1])
    return f, gn


def _ratio_at(problem, pts, f_pop_at):
    f_emp, _ = _empirical_grids(problem, pts)
    xbar = problem.truth
    denom = (np.linalg.norm(pts - xbar, axis=1)
             * np.linalg.norm(pts + xbar, axis=1))
    ok = denom > 1e-12 * float(xbar @ xbar)
    out = np.zeros(pts.shape[0])
    out[ok] = np.abs(f_emp[ok] - f_pop_at[ok]) / denom[ok]
    return out


def _deviation_ratio_max(problem, pts, f_emp, f_pop, cell):
    """Estimate sup |f_S - F| / (|x-xbar| |x+xbar|) over the scanned box.

    A plain grid max has a negative bias for a sup, so the top cells are
    refined with two rounds of local sub-grids.
    """
    xbar = problem.truth
    denom = (np.linalg.norm(pts - xbar, axis=1)
             * np.linalg.norm(pts + xbar, axis=1))
    ok = denom > 1e-12 * float(xbar @ xbar)
    ratio = np.where(ok, np.abs(f_emp - f_pop) / np.where(ok, denom, 1.0), 0.0)
    best = float(ratio.max())
    centers = pts[np.argsort(ratio)[-10:]]
    span = cell
    for _ in range(2):
        offs = np.linspace(-span, span, 9)
        o1, o2 = np.meshgrid(offs, offs, indexing="ij")
        locals_ = np.concatenate([c[None, :] + np.column_stack([o1.ravel(), o2.ravel()])
                                  for c in centers])
        f_loc, _ = population_grid(xbar, locals_[:, 0], locals_[:, 1])
        r = _ratio_at(problem, locals_, f_loc)
        if r.max() > best:
            best = float(r.max())
        centers = locals_[np.argsort(r)[-10:]]
        span /= 4.0
    return best


def graph_closeness_audit(problem, grid_half_width, grid_n, *,
                          max_subgrad_norm=math.inf, probe_triples=100,
                          probe_seed=0, ball_resolution=41):
    """Pair grid-stationary points of f_S with nearby near-critical points of F.

    Scans a planar grid of half-width ``grid_half_width`` around the origin,
    finds interior local minima of the empirical subgradient norm (optionally
    only those below ``max_subgrad_norm``), then searches a ball around each
    for the point minimizing the population gradient norm.  The ball radius

        sqrt(4 dhat / (rho_hat + 2 dhat)) * sqrt(|x - xbar| |x + xbar|)

    uses dhat, the largest observed ratio |f_S - F| / (|x-xbar| |x+xbar|)
    over the grid, and rho_hat from the weak-convexity probe; both are
    empirical stand-ins for the uniform constants in the comparison bound, so
    the output is an audit, not a proof.

    Besides the smooth ball sub-grid, the exact stationary set of F (the
    origin, the minimizers +-xbar, and the two ring points) competes as
    candidate partners with subdifferential distance 0: the kinks at +-xbar
    carry a zero subgradient that no smooth-gradient sample can see.
    """
    if problem.d != 2:
        raise ValueError("graph closeness audit is restricted to planar problems")
    if problem.truth is None:
        raise ValueError("audit requires a problem with a known signal")
    if grid_n < 3:
        raise ValueError("grid_n must be at least 3")
    xbar = problem.truth
    axis = np.linspace(-grid_half_width, grid_half_width, grid_n)
    g1, g2 = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([g1.ravel(), g2.ravel()])

    f_emp, sub_norm = _empirical_grids(problem, pts)
    f_pop, _ = population_grid(xbar, g1, g2)
    f_pop = f_pop.ravel()

    dhat = _deviation_ratio_max(problem, pts, f_emp, f_pop,
                                cell=float(axis[1] - axis[0]))
    rho_hat = weak_convexity_probe(problem, probe_triples, 1.0,
                                   probe_seed).rho_hat
    shrink = math.sqrt(4.0 * dhat / (rho_hat + 2.0 * dhat)) if dhat > 0 else 0.0

    nb = float(np.linalg.norm(xbar))
    perp = np.array([-xbar[1], xbar[0]]) / nb
    c = critical_ratio()
    exact_stationary = [np.zeros(2), np.array(xbar), -np.array(xbar),
                        c * nb * perp, -c * nb * perp]

    pairs = []
    for i, j in grid_local_minima(sub_norm.reshape(grid_n, grid_n),
                                  max_value=max_subgrad_norm):
        x_s = np.array([axis[i], axis[j]])
        radius = shrink * math.sqrt(np.linalg.norm(x_s - xbar)
                                    * np.linalg.norm(x_s + xbar))
        if radius > 0:
            loc = np.linspace(-radius, radius, ball_resolution)
            l1, l2 = np.meshgrid(x_s[0] + loc, x_s[1] + loc, indexing="ij")
            _, gnorm = population_grid(xbar, l1, l2)
            inside = np.hypot(l1 - x_s[0], l2 - x_s[1]) <= radius
            gnorm = np.where(inside, gnorm, np.nan)
        else:
            l1, l2 = np.array([[x_s[0]]]), np.array([[x_s[1]]])
            _, gnorm = population_grid(xbar, l1, l2)
        best_x, best_g = None, math.inf
        finite = np.isfinite(gnorm)
        if finite.any():
            flat = np.nanargmin(np.where(finite, gnorm, np.nan))
            best_x = np.array([l1.ravel()[flat], l2.ravel()[flat]])
            best_g = float(gnorm.ravel()[flat])
        for point in exact_stationary:
            if np.linalg.norm(point - x_s) <= radius and best_g > 0.0:
                best_x, best_g = point, 0.0
        if best_x is None:
            continue
        pairs.append(AuditPair(
            x_s=x_s, x_p_near=best_x,
            subgrad_norm=float(sub_norm[i * grid_n + j]),
            pop_grad_norm=best_g,
            dist=float(np.linalg.norm(best_x - x_s)),
            radius=radius,
        ))
    return pairs
