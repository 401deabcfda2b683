"""Remainder functional C_p and the four optimization-defined remainder constants.

For complex vectors xi, eta and p > 1,

    C_p(xi, eta) = |xi|^p - |xi-eta|^p - p |xi-eta|^(p-2) Re((xi-eta) . conj(eta)),

with the continuous extension C_p(xi, xi) = |xi|^p (for 1 < p < 2 the literal
third term is 0/0 at xi = eta).  C_p is nonnegative, homogeneous of degree p,
and C_2(xi, eta) = |eta|^2 exactly.

The remainder constants are extrema of quotients of the shared numerator

    N(s, t) = ((1+s)^2 + t^2)^(p/2) - 1 - p s

over polar coordinates (s, t) = r (cos theta, sin theta), r > 0:

    cp_pge2 (p >= 2):  inf N / (s^2 + t^2)^(p/2)
    c1_inf (1<p<2):    inf N / ((|u|+1)^(p-2) (s^2 + t^2)),  |u| = sqrt((1+s)^2+t^2)
    c2_sup (1<p<2):    sup of the c1_inf quotient
    c3_min (1<p<2):    min of  inf_{r>=1} N / (s^2+t^2)^(p/2)  and
                               inf_{0<r<1} N / (s^2 + t^2)

Every quotient tends to 1 along each ray as r -> infinity, and as r -> 0 the
c1/c2 quotient tends to (p/2^(p-1)) (1 + (p-2) cos^2 theta).  The theta-range
of that limit gives elementary enclosures: the infimum is at most
p(p-1)/2^(p-1) and the supremum at least p/2^(p-1).  These directional limits
enter the search as explicit candidates, so the reported extremum can never
miss a value approached only at the ends of the radius range.

The search itself is a dense polar grid (with an exact r = 1 ring for the
c3_min branch seam) followed by Nelder-Mead refinement restarted from the
best grid cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar

__all__ = [
    "KINDS",
    "CpObjectiveKind",
    "ConstantEstimate",
    "SearchSettings",
    "cp_value",
    "cp_value_batch",
    "objective",
    "stated_range",
    "find_constant",
    "sandwich_check",
]

KINDS = ("cp_pge2", "c1_inf", "c2_sup", "c3_min")


@dataclass(frozen=True)
class CpObjectiveKind:
    """Which constant is being computed, and for which p."""

    kind: str
    p: float

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "cp_pge2":
            if self.p < 2.0:
                raise ValueError("cp_pge2 requires p >= 2")
        elif not 1.0 < self.p < 2.0:
            raise ValueError(f"{self.kind} requires 1 < p < 2")


@dataclass(frozen=True)
class ConstantEstimate:
    """Search outcome: the extremal value, its argument, and a conservative
    enclosure assembled from the grid scan plus the refinement."""

    value: float
    argmin_s: float
    argmin_t: float
    grid_resolution: int
    refined: bool
    bracket: Tuple[float, float]


@dataclass(frozen=True)
class SearchSettings:
    theta_samples: int = 720
    radius_decades: int = 6
    radius_per_decade: int = 40
    refine_iters: int = 200
    restarts: int = 5

    def __post_init__(self) -> None:
        if self.theta_samples < 8 or self.radius_decades < 1 or self.radius_per_decade < 2:
            raise ValueError("search grid settings out of range")
        if self.refine_iters < 0 or self.restarts < 0:
            raise ValueError("refinement settings out of range")


def cp_value_batch(xi: np.ndarray, eta: np.ndarray, p: float) -> np.ndarray:
    """C_p for a batch of vector pairs; xi, eta of shape (N,) or (N, d)."""
    if p <= 1.0:
        raise ValueError("p must be > 1")
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if xi.shape != eta.shape:
        raise ValueError("xi and eta must have the same shape")
    if xi.ndim == 1:
        xi = xi[:, None]
        eta = eta[:, None]
    diff = xi - eta
    t = np.linalg.norm(diff, axis=1)
    a = np.linalg.norm(xi, axis=1)
    re = np.real(np.einsum("ij,ij->i", diff, np.conj(eta)))
    out = a**p
    pos = t > 0.0
    # p t^(p-2) Re(...) is written p t^(p-1) (Re(...)/t): |Re(...)/t| <= |eta|,
    # so the factor stays finite for every p > 1 as t -> 0
    out[pos] = out[pos] - t[pos] ** p - p * t[pos] ** (p - 1.0) * (re[pos] / t[pos])
    return out


def cp_value(xi, eta, p: float) -> float:
    """C_p(xi, eta) for a single pair of complex scalars or vectors."""
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    eta = np.atleast_1d(np.asarray(eta, dtype=complex))
    if xi.shape != eta.shape:
        raise ValueError("xi and eta must have the same length")
    return float(cp_value_batch(xi[None, :], eta[None, :], p)[0])


def _numerator(p: float, s: np.ndarray, r2: np.ndarray) -> np.ndarray:
    """N(s, t) = (1 + g)^(p/2) - 1 - p s with g = 2 s + r^2.

    Written as (p/2) r^2 + [(1+g)^(p/2) - 1 - (p/2) g] with the bracket
    summed as a binomial series for small |g|: near the axis with r -> 0 the
    direct form cancels to eps * |g| absolute error while N itself is of
    order r^2, so the split keeps full relative precision (and makes the
    p = 2 quotient exactly 1 at machine level).
    """
    a = 0.5 * p
    g = 2.0 * s + r2
    out = np.empty_like(g)

    small = np.abs(g) <= 0.1
    gs = g[small]
    coef = a * (a - 1.0) / 2.0
    power = gs * gs
    total = coef * power
    c = coef
    for j in range(2, 40):
        c = c * (a - j) / (j + 1.0)
        power = power * gs
        term = c * power
        total = total + term
        if not np.any(np.abs(term) > 1e-17 * (np.abs(total) + 1e-300)):
            break
    out[small] = a * r2[small] + total

    gl = g[~small]
    with np.errstate(invalid="ignore"):
        direct = np.power(np.maximum(1.0 + gl, 0.0), a) - 1.0
    out[~small] = direct - p * s[~small]
    return out


def _quotient(kind: CpObjectiveKind, s: np.ndarray, t: np.ndarray, r2: Optional[np.ndarray] = None) -> np.ndarray:
    if r2 is None:
        r2 = s * s + t * t
    p = kind.p
    num = _numerator(p, s, r2)
    if kind.kind == "cp_pge2":
        den = r2 ** (0.5 * p)
    elif kind.kind in ("c1_inf", "c2_sup"):
        mod_u = np.sqrt(np.maximum(1.0 + 2.0 * s + r2, 0.0))
        den = (mod_u + 1.0) ** (p - 2.0) * r2
    else:
        den = np.where(r2 >= 1.0, r2 ** (0.5 * p), r2)
    return num / den


def objective(kind: CpObjectiveKind, s: float, t: float) -> float:
    """The remainder quotient at a single point (s, t) != (0, 0)."""
    if s == 0.0 and t == 0.0:
        raise ValueError("(s, t) = (0, 0) is excluded from the quotient domain")
    return float(_quotient(kind, np.asarray([s], dtype=float), np.asarray([t], dtype=float))[0])


def stated_range(kind: CpObjectiveKind) -> Tuple[float, float]:
    """Closed-form enclosure (lo, hi) for the constant; hi may be +inf.

    For c1_inf/c2_sup the finite endpoints are the theta-extrema of the
    shared r -> 0 limit (p/2^(p-1)) (1 + (p-2) cos^2 theta); for c3_min the
    endpoint p(p-1)/2 is the analogous limit of the inner branch.
    """
    p = kind.p
    if kind.kind == "cp_pge2":
        return (0.0, 1.0)
    if kind.kind == "c1_inf":
        return (0.0, p * (p - 1.0) / 2 ** (p - 1.0))
    if kind.kind == "c2_sup":
        return (p / 2 ** (p - 1.0), np.inf)
    return (0.0, p * (p - 1.0) / 2.0)


def _limit_candidates(kind: CpObjectiveKind) -> List[float]:
    """Directional limit values of the quotient at r -> 0 and r -> infinity.

    Every quotient tends to 1 along each ray as r -> infinity.  As r -> 0:
    the cp_pge2 quotient diverges for p > 2 (and is identically 1 at p = 2);
    the c1/c2 quotient tends to (p/2^(p-1)) (1 + (p-2) cos^2 theta), whose
    theta-extrema are the stated_range endpoints; the c3_min inner branch
    tends to (p/2) (1 + (p-2) cos^2 theta) with theta-minimum p(p-1)/2.
    """
    p = kind.p
    limits = [1.0]
    if kind.kind == "cp_pge2":
        if p == 2.0:
            limits.append(1.0)
    elif kind.kind == "c1_inf":
        limits.append(p * (p - 1.0) / 2 ** (p - 1.0))
    elif kind.kind == "c2_sup":
        limits.append(p / 2 ** (p - 1.0))
    else:
        limits.append(p * (p - 1.0) / 2.0)
    return limits


def _refine_point(kind: CpObjectiveKind, sign: float, s0: float, t0: float, iters: int) -> Tuple[float, float, float]:
    def score(st: np.ndarray) -> float:
        if st[0] == 0.0 and st[1] == 0.0:
            return np.inf
        q = _quotient(kind, np.asarray([st[0]]), np.asarray([st[1]]))[0]
        if not np.isfinite(q):
            return np.inf
        return sign * float(q)

    res = minimize(
        score,
        np.asarray([s0, t0], dtype=float),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": iters, "maxfev": 4 * iters},
    )
    return float(res.fun), float(res.x[0]), float(res.x[1])


def find_constant(kind: CpObjectiveKind, settings: Optional[SearchSettings] = None) -> ConstantEstimate:
    """Global polar-grid search plus simplex refinement for one constant.

    The returned bracket is [value - slack, grid_best + span] for infima
    (mirrored for c2_sup). Any sampled quotient value bounds an infimum from
    above, so the grid end is rigorous up to `span`: the quotient probed one
    half grid cell away from the reported argument. That allowance covers any
    independent sampling at this resolution or finer, no matter how the other
    grid happens to align with the true extremum.
    """
    if settings is None:
        settings = SearchSettings()
    sign = -1.0 if kind.kind == "c2_sup" else 1.0

    theta = np.linspace(0.0, 2.0 * np.pi, settings.theta_samples, endpoint=False)
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    d = settings.radius_decades
    n_r = 2 * d * settings.radius_per_decade + 1
    radii = np.geomspace(10.0 ** (-d), 10.0**d, n_r)
    # exact ring at r = 1 so the c3_min branch seam is always sampled
    radii = np.append(radii, 1.0)

    def scan(radii_block: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        s = radii_block[:, None] * cos_t[None, :]
        t = radii_block[:, None] * sin_t[None, :]
        r2 = (radii_block**2)[:, None] * np.ones_like(cos_t)[None, :]
        return s, t, sign * _quotient(kind, s, t, r2)

    s_grid, t_grid, score_grid = scan(radii)

    # supremum searches extend outward while the best cell sits in the top decade
    extensions = 0
    r_hi = 10.0**d
    while kind.kind == "c2_sup" and extensions < 6:
        flat = int(np.argmin(score_grid))
        best_r = np.sqrt(s_grid.ravel()[flat] ** 2 + t_grid.ravel()[flat] ** 2)
        if best_r < r_hi / 10.0:
            break
        new_radii = np.geomspace(r_hi, r_hi * 100.0, 2 * settings.radius_per_decade + 1)[1:]
        s_n, t_n, sc_n = scan(new_radii)
        s_grid = np.vstack([s_grid, s_n])
        t_grid = np.vstack([t_grid, t_n])
        score_grid = np.vstack([score_grid, sc_n])
        r_hi *= 100.0
        extensions += 1

    flat_scores = score_grid.ravel()
    order = np.argsort(flat_scores)
    grid_best_score = float(flat_scores[order[0]])
    starts = [int(i) for i in order[: max(settings.restarts, 1)]]
    if kind.kind == "c3_min":
        # make sure both branch regions and the seam contribute a start
        r_flat = np.sqrt(s_grid.ravel() ** 2 + t_grid.ravel() ** 2)
        for region in (r_flat >= 1.0, r_flat < 1.0):
            idx = np.where(region)[0]
            if idx.size:
                starts.append(int(idx[np.argmin(flat_scores[idx])]))

    best_score = grid_best_score
    best_s = float(s_grid.ravel()[order[0]])
    best_t = float(t_grid.ravel()[order[0]])
    refined = False
    if settings.refine_iters > 0:
        for i in dict.fromkeys(starts):
            f, s_r, t_r = _refine_point(
                kind, sign, float(s_grid.ravel()[i]), float(t_grid.ravel()[i]), settings.refine_iters
            )
            if f < best_score:
                best_score, best_s, best_t = f, s_r, t_r
        refined = True
        if kind.kind == "c3_min":
            # 1-d refinement along the unit circle, where the two branches meet
            circle = minimize_scalar(
                lambda th: float(_quotient(kind, np.asarray([np.cos(th)]), np.asarray([np.sin(th)]))[0]),
                bounds=(0.0, 2.0 * np.pi),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if float(circle.fun) < best_score:
                best_score = float(circle.fun)
                best_s, best_t = float(np.cos(circle.x)), float(np.sin(circle.x))

    for lim in _limit_candidates(kind):
        if sign * lim < best_score:
            best_score = sign * lim
            refined = False

    # probe one half grid cell around the reported argument; the worst of the
    # probes bounds how far any equally fine sampling can sit from the extremum
    span = 0.0
    r_arg = float(np.hypot(best_s, best_t))
    if r_arg > 0.0 and np.isfinite(best_score):
        th_arg = float(np.arctan2(best_t, best_s))
        h_log = np.log(10.0) / (2.0 * settings.radius_per_decade)
        h_th = np.pi / settings.theta_samples
        for dr in (-h_log, 0.0, h_log):
            for dth in (-h_th, 0.0, h_th):
                if dr == 0.0 and dth == 0.0:
                    continue
                rr = r_arg * np.exp(dr)
                tt = th_arg + dth
                q = sign * float(_quotient(kind, np.asarray([rr * np.cos(tt)]), np.asarray([rr * np.sin(tt)]))[0])
                if np.isfinite(q):
                    span = max(span, q - best_score)

    value = sign * best_score
    grid_best = sign * grid_best_score
    slack = 1e-11 * (1.0 + abs(value))
    rigor = 1e-15 * (1.0 + abs(grid_best))
    if kind.kind == "c2_sup":
        bracket = (grid_best - span - rigor, value + slack)
    else:
        bracket = (value - slack, grid_best + span + rigor)
    return ConstantEstimate(
        value=value,
        argmin_s=best_s,
        argmin_t=best_t,
        grid_resolution=settings.theta_samples,
        refined=refined,
        bracket=bracket,
    )


def sandwich_check(p: float, c1: float, c2: float) -> bool:
    """c1 <= c2 with both inside their stated_range enclosures."""
    lo1, hi1 = stated_range(CpObjectiveKind("c1_inf", p))
    lo2, hi2 = stated_range(CpObjectiveKind("c2_sup", p))
    return bool(c1 <= c2 and lo1 < c1 <= hi1 and lo2 <= c2 < hi2)
