"""Optimal lower bounds of guessing moments against (conditional) Rényi entropy.

The lower boundary of the attainable ``(H_alpha, G_rho)`` region is traced by
one-parameter pmf families (see ``distributions``):

* ``alpha = 1``: ``q(x) ∝ gamma**(x**rho)`` with ``gamma`` in (0, 1],
* ``0 < alpha < 1``: ``q(x) ∝ (1 + gamma (x**rho - 1))**(alpha' - 1)``, ``gamma`` in [0, inf),
* ``alpha > 1``: ``q(x) ∝ (1 - gamma x**rho)_+**(alpha' - 1)``, ``gamma`` in (0, 2**-rho],
* ``alpha = inf``: the closed-form min-entropy region.

The closed-form curves are evaluated from log-weights normalized so that the
first weight is 1 and all weights tend to 1 at the uniform corner.  Written
that way, ``H``, ``G - 1``, ``log M - H`` and ``G_rho(M) - G`` each keep
relative accuracy at whichever corner they vanish.

Entropies are in nats.  Also here: the first-order small-leakage bound, the
binary and min-entropy examples, the random-probing region and the older
baselines used for comparison plots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .distributions import (
    NEAR_ONE,
    OrderParams,
    Pmf,
    gibbs_family_high_alpha,
    gibbs_family_low_alpha,
    truncated_geometric,
)
from .entropies import EntropyValue, renyi_array
from .guesswork import (
    guessing_moment_array,
    rank_moment_variance,
    rank_power_prefix,
    rank_powers,
    uniform_moment,
)

LN2 = math.log(2.0)
CHECK_RTOL = 1e-9
BISECT_MAX_ITER = 200


class BoundError(ArithmeticError):
    """A bound could not be evaluated reliably."""


class MonotonicityError(BoundError):
    """A parametric curve was not monotone where inversion needs it to be."""


class CurveConsistencyError(BoundError):
    """A closed-form curve point disagreed with its generating pmf."""


@dataclass(frozen=True)
class CurvePoint:
    """One point of an optimal lower-bound curve.

    ``gamma`` is the family parameter (``mu`` for the hyperbolic form, ``K``
    for the min-entropy curve); ``deltaH = log M - H`` in nats and
    ``deltaG = G_rho(M) - G``.
    """

    gamma: float
    H: EntropyValue
    G: float
    deltaH: float
    deltaG: float

    def __post_init__(self):
        if self.deltaH < -1e-10 or self.deltaG < -1e-10 or self.G < 1 - 1e-10:
            raise ValueError(f"curve point out of range: {self}")

    def as_row(self) -> dict:
        return {
            "param": self.gamma,
            "H_nats": self.H.nats,
            "H_bits": self.H.bits,
            "G": self.G,
            "deltaH_nats": self.deltaH,
            "deltaG": self.deltaG,
        }


def _regime(params: OrderParams) -> str:
    if params.is_min_entropy:
        return "min"
    if params.is_shannon:
        return "shannon"
    return "low" if params.alpha < 1 else "high"


@dataclass(frozen=True)
class BoundSpec:
    """Support size, orders, and the sampling plan of the curve parameter.

    ``lo``/``hi`` bound the natural parameter gamma (``K`` for alpha = inf).
    Defaults: alpha = 1 samples ``-ln gamma`` log-spaced on
    ``[1e-6, 40/(2**rho - 1)]``; alpha < 1 samples gamma log-spaced on
    ``[1e-9, 1e6]``; alpha > 1 samples gamma log-spaced up to half of
    ``2**-rho`` and then with ``2**-rho - gamma`` log-spaced down to
    ``1e-9 * 2**-rho``; alpha = inf samples H evenly.
    """

    M: int
    params: OrderParams
    size: int = 512
    lo: float | None = None
    hi: float | None = None
    regime: str = field(init=False)

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"bounds need M >= 2, got {self.M!r}")
        if int(self.size) != self.size or self.size < 2:
            raise ValueError("a curve grid needs at least 2 points")
        object.__setattr__(self, "regime", _regime(self.params))
        lo, hi = self._default_range()
        if not lo < hi:
            raise ValueError(f"empty parameter range [{lo}, {hi}]")
        if self.lo is not None or self.hi is not None:
            if not self._inside(lo) or not self._inside(hi):
                raise ValueError(f"parameter range [{lo}, {hi}] leaves the open domain")

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def rho(self) -> float:
        return self.params.rho

    def _default_range(self):
        rho = self.rho
        if self.regime == "shannon":
            d = {"lo": math.exp(-40.0 / (2.0**rho - 1.0)), "hi": math.exp(-1e-6)}
        elif self.regime == "low":
            d = {"lo": 1e-9, "hi": 1e6}
        elif self.regime == "high":
            d = {"lo": 1e-9, "hi": 2.0**-rho * (1 - 1e-9)}
        else:
            d = {"lo": 1.0 / self.M, "hi": 1.0}
        return (d["lo"] if self.lo is None else self.lo, d["hi"] if self.hi is None else self.hi)

    def _inside(self, g):
        if self.regime == "shannon":
            return 0 < g < 1
        if self.regime == "low":
            return 0 < g < math.inf
        if self.regime == "high":
            return 0 < g < 2.0**-self.rho
        return 1.0 / self.M <= g <= 1.0

    def internal_grid(self) -> np.ndarray:
        """Grid in the internal parameter, ordered from the Dirac corner to the uniform corner.

        Internal parameter: ``-ln gamma`` (alpha = 1), ``ln gamma`` (alpha != 1),
        ``K`` (alpha = inf).
        """
        lo, hi = self._default_range()
        n = self.size
        if self.regime == "shannon":
            return np.geomspace(-math.log(lo), -math.log(hi), n)
        if self.regime == "low":
            return np.linspace(math.log(hi), math.log(lo), n)
        if self.regime == "high":
            if self.lo is not None or self.hi is not None:
                return np.linspace(math.log(hi), math.log(lo), n)
            top = 2.0**-self.rho
            n1 = n // 2
            gap = np.geomspace(top * 1e-9, top / 2, n - n1 + 1)[:-1]
            near_uniform = np.geomspace(top / 2, lo, n1)
            return np.log(np.concatenate([top - gap, near_uniform]))
        h = np.linspace(-math.log(hi), -math.log(lo), n)
        return np.exp(-h)

    def gamma_grid(self) -> np.ndarray:
        """The same grid expressed in the natural parameter."""
        t = self.internal_grid()
        return np.exp(-t) if self.regime == "shannon" else (t if self.regime == "min" else np.exp(t))


def _log1mexp(x):
    """``log(1 - exp(-x))`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > LN2, np.log1p(-np.exp(-x)), np.log(-np.expm1(-x)))


def _family_log_weights(M: int, regime: str, alpha: float, rho: float, t) -> np.ndarray:
    """Log-weights of the equality-case pmfs; ``[..., 0] == 0`` and all tend to 0 at the uniform end."""
    t = np.asarray(t, dtype=float)[..., None]
    ranks = rank_powers(M, float(rho))
    excess = ranks - 1.0
    if regime == "shannon":
        with np.errstate(invalid="ignore"):
            return np.where(excess > 0, -t * excess, 0.0)
    shape = 1.0 / (alpha - 1.0)  # alpha' - 1
    if regime == "low":
        with np.errstate(divide="ignore"):
            return shape * np.logaddexp(0.0, t + np.log(excess))
    gamma = np.exp(t)
    alive = gamma < np.arange(1, M + 1, dtype=float) ** (-rho)
    alive[..., 0] = True
    with np.errstate(divide="ignore"):
        base = np.log1p(-np.where(alive, gamma * ranks, 0.0))
    return np.where(alive, shape * (base - np.log1p(-gamma)), -np.inf)


SERIES_CUTOFF = 1e-3


def _divergence_terms(e, x, alpha):
    """Per-symbol terms of ``log M - H_alpha(q)`` with ``x = M q`` and ``e = x - 1``.

    ``e`` should be accurate where it is small and ``x`` where it is not.

    For alpha = 1 the term is ``(1+e) log(1+e) - e``; otherwise it is
    ``(1+e)**alpha - 1 - alpha e``.  Both are O(e**2) with a fixed sign, so
    their mean keeps full relative accuracy near the uniform corner where a
    difference of entropies would cancel.
    """
    e = np.asarray(e, dtype=float)
    scale = np.abs(e) * max(1.0, alpha)
    small = scale < SERIES_CUTOFF
    es = np.where(small, e, 0.0)
    series = np.zeros_like(e)
    power = es * es
    if alpha == 1.0:
        for k in range(2, 10):
            series += (-1) ** k * power / (k * (k - 1))
            power = power * es
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = np.where(x <= 0, 1.0, x * np.log(x) - (x - 1))
    else:
        coef = alpha * (alpha - 1) / 2
        for k in range(2, 10):
            series += coef * power
            coef *= (alpha - k) / (k + 1)
            power = power * es
        with np.errstate(divide="ignore"):
            direct = x**alpha - 1 - alpha * (x - 1)
    return np.where(small, series, direct)


def _family_stats(M: int, regime: str, alpha: float, rho: float, t):
    """``(H, deltaH, G, deltaG)`` along an equality-case family.

    These are the parametric closed forms reorganized around the normalized
    weights ``w``.  For instance, with ``a_i = 1 + gamma (i**rho - 1)``,
    ``gamma**-1 (sum a**alpha' / sum a**(alpha'-1) - 1)`` equals
    ``sum w (i**rho - 1) / sum w`` for ``w = a**(alpha'-1)``.
    """
    ell = _family_log_weights(M, regime, alpha, rho, t)
    ranks = rank_powers(M, float(rho))
    excess = ranks - 1.0
    gm = uniform_moment(M, rho)
    a = 1.0 if regime == "shannon" else alpha
    with np.errstate(invalid="ignore", over="ignore"):
        w = np.exp(ell)
        u = np.expm1(ell)
        rest = w[..., 1:].sum(axis=-1)
        total = 1.0 + rest
        G = 1.0 + (w * excess).sum(axis=-1) / total
        dG = -(u * (ranks - gm)).sum(axis=-1) / total
        u_mean = u.mean(axis=-1, keepdims=True)
        # M q - 1 from differences of expm1 values: accurate near uniform
        e = (u - u_mean) / (1.0 + u_mean)
        x = M * w / total[..., None]
        div = _divergence_terms(e, x, a).mean(axis=-1)
        logm = math.log(M)
        if regime == "shannon":
            wl = np.where(w > 0, w * ell, 0.0).sum(axis=-1) / total
            H = np.log1p(rest) - wl
            dH_div = div
        else:
            a_ell = alpha * ell
            H = (np.log1p(np.exp(a_ell[..., 1:]).sum(axis=-1)) - alpha * np.log1p(rest)) / (1.0 - alpha)
            dH_div = np.log1p(div) / (alpha - 1.0)
        # each form is used on the half of the curve where it does not cancel
        dH = np.where(H >= logm / 2, dH_div, logm - H)
    return H, dH, G, dG


def _make_point(M, gamma, H, dH, G, dG) -> CurvePoint:
    logm = math.log(M)
    H = min(max(float(H), 0.0), logm)
    return CurvePoint(float(gamma), EntropyValue(H), float(G), max(float(dH), 0.0), max(float(dG), 0.0))


def _uniform_point(M, rho, gamma) -> CurvePoint:
    return CurvePoint(float(gamma), EntropyValue(math.log(M)), uniform_moment(M, rho), 0.0, 0.0)


def _dirac_point(M, rho, gamma) -> CurvePoint:
    return CurvePoint(float(gamma), EntropyValue(0.0), 1.0, math.log(M), uniform_moment(M, rho) - 1.0)


def _endpoint_gammas(spec: BoundSpec):
    """(Dirac-corner gamma, uniform-corner gamma) for the family of a BoundSpec."""
    return {
        "shannon": (0.0, 1.0),
        "low": (math.inf, 0.0),
        "high": (2.0**-spec.rho, 0.0),
        "min": (1.0, 1.0 / spec.M),
    }[spec.regime]


def _with_endpoints(spec, points, endpoints):
    if not endpoints:
        return points
    g_dirac, g_unif = _endpoint_gammas(spec)
    return [_dirac_point(spec.M, spec.rho, g_dirac), *points, _uniform_point(spec.M, spec.rho, g_unif)]


def generating_pmf(params: OrderParams, M: int, gamma: float) -> Pmf:
    """Equality-case pmf whose ``(H_alpha, G_rho)`` is the curve point at ``gamma``."""
    regime = _regime(params)
    if regime == "shannon":
        return Pmf.dirac(M) if gamma == 0 else truncated_geometric(gamma, params.rho, M)
    if regime == "low":
        return Pmf.dirac(M) if math.isinf(gamma) else gibbs_family_low_alpha(gamma, params, M)
    if regime == "high":
        if gamma == 0:
            return Pmf.uniform(M)
        if gamma >= 2.0**-params.rho:
            return Pmf.dirac(M)
        return gibbs_family_high_alpha(gamma, params, M)
    k = float(gamma)
    m = min(int(math.floor(1.0 / k + 1e-12)), M)
    p = np.zeros(M)
    p[:m] = k
    if m < M:
        p[m] = max(1.0 - m * k, 0.0)
    return Pmf.from_weights(p)


def _close(a, b, rtol=CHECK_RTOL):
    return abs(a - b) <= rtol * max(abs(a), abs(b))


# --- alpha = rho = 1 ----------------------------------------------------------


def _log_sinhc(x):
    """``log(sinh(x)/x)`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    series = x2 / 6 - x2 * x2 / 180 + x2**3 / 2835
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        mid = np.log(np.sinh(x) / x)
        big = x - LN2 + np.log1p(-np.exp(-2 * x)) - np.log(x)
    return np.where(x < 1e-2, series, np.where(x < 20, mid, big))


def _coth_gap(M, mu):
    """``M coth(M mu) - coth(mu)`` for ``mu > 0``."""
    mu = np.asarray(mu, dtype=float)
    x = M * mu
    series = (
        (M**2 - 1) * mu / 3
        - (M**4 - 1) * mu**3 / 45
        + 2 * (M**6 - 1) * mu**5 / 945
        - (M**8 - 1) * mu**7 / 4725
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = M / np.tanh(x) - 1 / np.tanh(mu)
    return np.where(x < 1e-2, series, direct)


def _delta_shannon_from_mu(M, mu):
    """Hyperbolic form of the alpha = rho = 1 curve: ``(deltaG, deltaH)``."""
    dG = 0.5 * _coth_gap(M, mu)
    dH = _log_sinhc(mu) - _log_sinhc(M * mu) + 2 * mu * dG
    return dG, dH


def _shannon_from_s(M, s):
    """Geometric form of the alpha = rho = 1 curve at ``gamma = exp(-s)``: ``(G, H)``."""
    s = np.asarray(s, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        g_minus_1 = 1.0 / np.expm1(s) - M / np.expm1(M * s)
    H = _log1mexp(M * s) - _log1mexp(s) + s * g_minus_1
    return 1.0 + g_minus_1, H


def curve_shannon(spec: BoundSpec, endpoints: bool = True) -> list[CurvePoint]:
    """Optimal lower bound of ``G(X|Y)`` against ``H(X|Y)`` (alpha = rho = 1).

    Uses ``G = 1/(1-gamma) - M gamma**M / (1-gamma**M)`` with the matching
    entropy for gamma <= 0.99 and the hyperbolic ``mu = -ln(gamma)/2`` form
    above that, so the uniform corner ``(log M, (M+1)/2)`` is approached
    without 0/0.  Points run from the Dirac corner to the uniform corner.
    """
    if spec.regime != "shannon" or spec.rho != 1:
        raise ValueError("curve_shannon needs alpha = 1 and rho = 1")
    M = spec.M
    s = spec.internal_grid()
    points = []
    G_geo, H_geo = _shannon_from_s(M, s)
    dG_hyp, dH_hyp = _delta_shannon_from_mu(M, s / 2)
    gm, logm = (M + 1) / 2, math.log(M)
    for k, sk in enumerate(s):
        if sk > -math.log(0.99):
            G, H = G_geo[k], H_geo[k]
            dG, dH = gm - G, logm - H
        else:
            dG, dH = dG_hyp[k], dH_hyp[k]
            G, H = gm - dG, logm - dH
        points.append(_make_point(M, math.exp(-sk), H, dH, G, dG))
    return _with_endpoints(spec, points, endpoints)


def curve_delta_shannon(spec: BoundSpec, mu_grid) -> list[CurvePoint]:
    """The alpha = rho = 1 curve in advantage coordinates, parameterized by ``mu > 0``.

    ``deltaG = (M coth(M mu) - coth(mu))/2`` and
    ``deltaH = log(M sinh(mu)/sinh(M mu)) + 2 mu deltaG``; same curve as
    ``curve_shannon`` under ``gamma = exp(-2 mu)``.
    """
    if spec.regime != "shannon" or spec.rho != 1:
        raise ValueError("curve_delta_shannon needs alpha = 1 and rho = 1")
    mu = np.asarray(mu_grid, dtype=float)
    if np.any(~(mu > 0)):
        raise ValueError("mu must be positive")
    M = spec.M
    dG, dH = _delta_shannon_from_mu(M, mu)
    gm, logm = (M + 1) / 2, math.log(M)
    return [_make_point(M, m, logm - h, h, gm - g, g) for m, g, h in zip(mu, dG, dH)]


# --- general rho, alpha ---------------------------------------------------------


def _family_curve(spec: BoundSpec, verify: bool) -> list[CurvePoint]:
    t = spec.internal_grid()
    H, dH, G, dG = _family_stats(spec.M, spec.regime, spec.alpha, spec.rho, t)
    gammas = spec.gamma_grid()
    points = [_make_point(spec.M, *row) for row in zip(gammas, H, dH, G, dG)]
    if verify:
        for pt in points:
            _verify_point(spec, pt)
    return points


def _verify_point(spec: BoundSpec, pt: CurvePoint) -> None:
    q = generating_pmf(spec.params, spec.M, pt.gamma).probs
    alpha = 1.0 if spec.regime == "shannon" else spec.alpha
    h = float(renyi_array(q, alpha))
    g = float(guessing_moment_array(q, spec.rho))
    if not (_close(h, pt.H.nats) and _close(g, pt.G)):
        raise CurveConsistencyError(
            f"curve point gamma={pt.gamma!r} gives (H, G)=({pt.H.nats!r}, {pt.G!r}) "
            f"but its pmf gives ({h!r}, {g!r}) for M={spec.M}, {spec.params}"
        )


def curve_rho_shannon(spec: BoundSpec, endpoints: bool = True, verify: bool = False) -> list[CurvePoint]:
    """Optimal lower bound of ``G_rho(X|Y)`` against Shannon ``H(X|Y)``.

    ``G = sum i**rho gamma**(i**rho) / sum gamma**(i**rho)`` and
    ``H = log sum gamma**(i**rho) - G log gamma`` for gamma in (0, 1];
    gamma = 1 is the uniform corner ``(log M, G_rho(M))``.
    """
    if spec.regime != "shannon":
        raise ValueError("curve_rho_shannon needs alpha = 1")
    return _with_endpoints(spec, _family_curve(spec, verify), endpoints)


def curve_rho_alpha(spec: BoundSpec, endpoints: bool = True, verify: bool = True) -> list[CurvePoint]:
    """Optimal lower bound of ``G_rho(X|Y)`` against ``H_alpha(X|Y)`` for any order.

    alpha = 1 dispatches to ``curve_rho_shannon`` and alpha = inf to
    ``curve_minentropy``.  With ``verify`` (the default) every point is
    recomputed from its generating pmf and a mismatch beyond 1e-9 relative
    raises ``CurveConsistencyError``.
    """
    if spec.regime == "shannon":
        return curve_rho_shannon(spec, endpoints, verify)
    if spec.regime == "min":
        return curve_minentropy(spec)
    return _with_endpoints(spec, _family_curve(spec, verify), endpoints)


def curve_minentropy(spec: BoundSpec) -> list[CurvePoint]:
    """Lower boundary of the (H_inf, G_rho) region, sampled evenly in H; ``gamma`` holds K."""
    if spec.regime != "min":
        raise ValueError("curve_minentropy needs alpha = inf")
    M, rho = spec.M, spec.rho
    gm = uniform_moment(M, rho)
    K = spec.internal_grid()
    H = -np.log(K)
    G = _minentropy_lower(M, rho, K)
    return [_make_point(M, k, h, math.log(M) - h, g, gm - g) for k, h, g in zip(K, H, G)]


def curve(spec: BoundSpec, endpoints: bool = True) -> list[CurvePoint]:
    """Dispatch to the right curve for ``spec.params``."""
    if spec.regime == "shannon" and spec.rho == 1:
        return curve_shannon(spec, endpoints)
    return curve_rho_alpha(spec, endpoints)


# --- inversion ------------------------------------------------------------------


def _z_bracket(regime, rho):
    # bisection runs on z: log(-ln gamma) for alpha = 1, ln gamma otherwise
    if regime == "shannon":
        return -40.0, 40.0
    if regime == "low":
        return -40.0, 40.0
    return -40.0, -rho * LN2


def _stats_z(M, regime, alpha, rho, z):
    t = np.exp(z) if regime == "shannon" else z
    return _family_stats(M, regime, alpha, rho, t)


@lru_cache(maxsize=256)
def _assert_monotone(M, regime, alpha, rho):
    lo, hi = _z_bracket(regime, rho)
    z = np.linspace(lo, hi, 401)
    _, dH, _, dG = _stats_z(M, regime, alpha, rho, z)
    for name, v in (("deltaH", dH), ("deltaG", dG)):
        steps = np.diff(v)
        worst = steps.min()
        if worst < -1e-12 * (1 + np.abs(v).max()):
            raise MonotonicityError(
                f"{name} is not monotone along the curve for M={M}, alpha={alpha}, rho={rho} "
                f"(step {worst:.3e} at z={z[np.argmin(steps)]:.4f})"
            )
    return True


def _invert(M: int, params: OrderParams, dH_target):
    """Curve values ``(G, deltaG)`` at given ``deltaH`` targets.

    The returned point is the bracket end on the high-leakage side, so it
    never lies above the exact curve by more than rounding.
    """
    regime = _regime(params)
    rho = params.rho
    alpha = 1.0 if regime == "shannon" else params.alpha
    target = np.atleast_1d(np.asarray(dH_target, dtype=float))
    logm = math.log(M)
    gm = uniform_moment(M, rho)
    G = np.empty_like(target)
    dG = np.empty_like(target)
    if regime == "min":
        K = np.clip(np.exp(target) / M, 1.0 / M, 1.0)
        G[:] = _minentropy_lower(M, rho, K)
        return G, gm - G

    at_unif = target <= 0
    at_dirac = target >= logm
    G[at_unif], dG[at_unif] = gm, 0.0
    G[at_dirac], dG[at_dirac] = 1.0, gm - 1.0
    inner = ~(at_unif | at_dirac)
    if not inner.any():
        return G, dG
    _assert_monotone(M, regime, alpha, rho)
    tgt = target[inner]
    lo, hi = _z_bracket(regime, rho)

    def dh_at(z):
        return _stats_z(M, regime, alpha, rho, np.asarray([z]))[1][0]

    while dh_at(lo) > tgt.min() and lo > -2000:
        lo *= 2
    if regime != "high":
        while dh_at(hi) < tgt.max() and hi < 1e6:
            hi = 2 * hi if hi > 0 else 1.0
    z_lo = np.full(tgt.shape, lo)
    z_hi = np.full(tgt.shape, hi)
    dh_lo, dh_hi = dh_at(lo), dh_at(hi)
    below = tgt <= dh_lo
    above = tgt >= dh_hi
    if (below.any() and dh_lo > 1e-20) or (above.any() and logm - dh_hi > 1e-12):
        raise BoundError(f"could not bracket deltaH targets for M={M}, {params}")

    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (z_lo + z_hi)
        live = (mid > z_lo) & (mid < z_hi)
        if not live.any():
            break
        dh_mid = _stats_z(M, regime, alpha, rho, mid)[1]
        up = dh_mid < tgt
        z_lo = np.where(live & up, mid, z_lo)
        z_hi = np.where(live & ~up, mid, z_hi)

    _, _, g_hi, dg_hi = _stats_z(M, regime, alpha, rho, z_hi)
    g_hi = np.where(above, 1.0, g_hi)
    dg_hi = np.where(above, gm - 1.0, dg_hi)
    if below.any():
        _, _, g_lo, dg_lo = _stats_z(M, regime, alpha, rho, np.asarray([lo]))
        g_hi = np.where(below, g_lo[0], g_hi)
        dg_hi = np.where(below, dg_lo[0], dg_hi)
    G[inner], dG[inner] = g_hi, dg_hi
    return G, dG


def _check_entropy_range(M, H):
    logm = math.log(M)
    H = np.asarray(H, dtype=float)
    if np.any(H < -1e-12) or np.any(H > logm + 1e-12) or np.any(np.isnan(H)):
        raise ValueError(f"entropy must lie in [0, log M] = [0, {logm}] nats")
    return H


def lower_bound_many(M: int, params: OrderParams, H_targets) -> np.ndarray:
    """Vectorized ``lower_bound_at`` over an array of entropies (nats)."""
    H = _check_entropy_range(M, H_targets)
    return _invert(M, params, math.log(M) - H)[0].reshape(H.shape)


def lower_bound_at(spec: BoundSpec, H_target: float) -> float:
    """Smallest attainable ``G_rho(X|Y)`` given ``H_alpha(X|Y) = H_target`` nats.

    The curve is inverted by bisection on its parameter after checking
    numerically that it is monotone.
    """
    return float(lower_bound_many(spec.M, spec.params, float(H_target)))


def advantage_bound(M: int, params: OrderParams, deltaH) -> np.ndarray:
    """Largest attainable guessing advantage given the information advantage ``deltaH`` (nats)."""
    dH = np.asarray(deltaH, dtype=float)
    if np.any(dH < -1e-12) or np.any(dH > math.log(M) + 1e-12):
        raise ValueError("deltaH must lie in [0, log M]")
    return _invert(M, params, dH)[1].reshape(dH.shape)


# --- first order ----------------------------------------------------------------


def first_order_coefficient(M: int, params: OrderParams) -> float:
    """``sqrt(2 (G_{2rho}(M) - G_rho(M)**2) / alpha)``; 0 for alpha = inf."""
    if params.is_min_entropy:
        return 0.0
    alpha = 1.0 if params.is_shannon else params.alpha
    return math.sqrt(2.0 * rank_moment_variance(M, params.rho) / alpha)


def first_order_bound(M: int, params: OrderParams, deltaH):
    """Small-leakage bound ``deltaG <~ c sqrt(deltaH)`` (deltaH in nats)."""
    dH = np.asarray(deltaH, dtype=float)
    if np.any(dH < 0):
        raise ValueError("deltaH must be non-negative")
    out = first_order_coefficient(M, params) * np.sqrt(dH)
    return float(out) if out.ndim == 0 else out


def first_order_expansion(M: int, params: OrderParams, gamma: float):
    """Leading Taylor terms ``(deltaG, deltaH)`` of the curve about its uniform end.

    For alpha != 1: ``deltaG ~ gamma |1-alpha'| V`` and
    ``deltaH ~ |alpha'(1-alpha')|/2 V gamma**2`` with
    ``V = G_{2rho}(M) - G_rho(M)**2``.  For alpha = 1, with ``s = -ln gamma``:
    ``deltaG ~ s V`` and ``deltaH ~ V s**2 / 2``.
    """
    V = rank_moment_variance(M, params.rho)
    if params.is_shannon:
        s = -math.log(gamma)
        return s * V, V * s * s / 2
    ap = params.alpha_conjugate
    return gamma * abs(1 - ap) * V, abs(ap * (1 - ap)) / 2 * V * gamma**2


# --- binary example -------------------------------------------------------------


class Interval(NamedTuple):
    lower: float
    upper: float


def binary_entropy(p: float, alpha: float) -> float:
    """``h_alpha(p)``: Rényi entropy of a Bernoulli(p) pmf, in nats."""
    return float(renyi_array(np.array([1.0 - p, p]), alpha))


def binary_entropy_inverse(H: float, alpha: float) -> float:
    """Inverse of ``h_alpha`` restricted to ``[0, 1/2]``, by bisection."""
    if not -1e-12 <= H <= LN2 + 1e-12:
        raise ValueError("binary entropy must lie in [0, log 2]")
    if H <= 0:
        return 0.0
    if H >= LN2:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if binary_entropy(mid, alpha) < H:
            lo = mid
        else:
            hi = mid
    return lo


def _chord_ratio(alpha, H, M):
    """``(exp(c H) - 1) / (M**c - 1)`` with ``c = (1-alpha)/alpha``; ``H / log M`` at alpha = 1."""
    if abs(alpha - 1.0) <= NEAR_ONE:
        return H / math.log(M)
    c = -1.0 if math.isinf(alpha) else (1.0 - alpha) / alpha
    return math.expm1(c * H) / math.expm1(c * math.log(M))


def binary_bounds(params: OrderParams, H_alpha: float) -> Interval:
    """Lower and upper bounds of ``G_rho(X|Y)`` for binary ``X`` given ``H_alpha(X|Y)``.

    Lower: ``1 + (2**rho - 1) h_alpha^{-1}(H)``.  Upper: the chord
    ``1 + (2**rho - 1)/2 (exp(c H) - 1)/(2**c - 1)``, ``c = (1-alpha)/alpha``
    (``H / log 2`` in place of the ratio at alpha = 1).
    """
    alpha = 1.0 if params.is_shannon else params.alpha
    if not -1e-12 <= H_alpha <= LN2 + 1e-12:
        raise ValueError("H_alpha must lie in [0, log 2] for binary X")
    H = min(max(H_alpha, 0.0), LN2)
    step = 2.0**params.rho - 1.0
    lower = 1.0 + step * binary_entropy_inverse(H, alpha)
    upper = 1.0 + step / 2 * _chord_ratio(alpha, H, 2)
    return Interval(lower, upper)


def binary_first_order(params: OrderParams, deltaH: float) -> Interval:
    """First-order ``(lower, upper)`` bounds on the binary guessing advantage.

    Upper: ``(2**rho - 1) sqrt(deltaH / (2 alpha))``.  Lower:
    ``(2**rho - 1)/2 * c 2**c / (2**c - 1) * deltaH`` with ``c = (1-alpha)/alpha``;
    its alpha -> 1 limit is ``(2**rho - 1)/2 * deltaH / ln 2``.
    """
    step = 2.0**params.rho - 1.0
    alpha = 1.0 if params.is_shannon else params.alpha
    upper = 0.0 if math.isinf(alpha) else step * math.sqrt(deltaH / (2 * alpha))
    if alpha == 1.0:
        slope = 1.0 / LN2
    else:
        c = -1.0 if math.isinf(alpha) else (1.0 - alpha) / alpha
        slope = c * 2.0**c / (2.0**c - 1.0)
    return Interval(step / 2 * slope * deltaH, upper)


# --- min-entropy example ----------------------------------------------------------


def _minentropy_lower(M, rho, K):
    K = np.asarray(K, dtype=float)
    prefix = rank_power_prefix(M, float(rho))
    m = np.minimum(np.floor(1.0 / K + 1e-12), M).astype(int)
    rem = np.where(m < M, np.clip(1.0 - K * m, 0.0, None), 0.0)
    nxt = np.minimum(m + 1, M).astype(float) ** rho
    return K * prefix[m] + rem * nxt


def _check_K(M, H_inf):
    if not -1e-12 <= H_inf <= math.log(M) + 1e-12:
        raise ValueError(f"min-entropy must lie in [0, log M], got {H_inf!r}")
    K = math.exp(-H_inf)
    return min(max(K, 1.0 / M), 1.0)


def minentropy_bounds(M: int, rho: float, H_inf: float) -> Interval:
    """Region of ``G_rho(X|Y)`` given min-entropy ``H_inf(X|Y)`` (nats).

    With ``K = exp(-H_inf)`` and ``m = floor(1/K)``: lower is
    ``K sum_{i<=m} i**rho + (1 - K m)(m + 1)**rho`` and upper is
    ``1 + M/(M-1) (G_rho(M) - 1)(1 - K)``.
    """
    K = _check_K(M, H_inf)
    lower = float(_minentropy_lower(M, rho, K))
    upper = 1.0 + M / (M - 1) * (uniform_moment(M, rho) - 1.0) * (1.0 - K)
    return Interval(lower, upper)


def minentropy_bounds_rho1(M: int, H_inf: float) -> Interval:
    """rho = 1 form: ``(m + 1)(1 - m K / 2) <= G <= 1 + M (1 - K) / 2``."""
    K = _check_K(M, H_inf)
    m = min(math.floor(1.0 / K + 1e-12), M)
    return Interval((m + 1) * (1 - m * K / 2), 1 + M * (1 - K) / 2)


def maxleakage_advantage_bounds(M: int, I_inf: float, first_order: bool = False) -> Interval:
    """Guessing advantage of a uniform secret given maximal leakage ``I_inf`` (nats).

    Exact form ``[(e**I - 1)/2, (M-1)(e**I - 1)/2]``, valid for
    ``I_inf <= log(M/(M-1))``; ``first_order`` replaces ``e**I - 1`` by ``I``.
    """
    if not 0 <= I_inf <= math.log(M / (M - 1)) + 1e-12:
        raise ValueError("maximal leakage must lie in [0, log(M/(M-1))]")
    x = I_inf if first_order else math.expm1(I_inf)
    return Interval(x / 2, (M - 1) * x / 2)


# --- random probing -------------------------------------------------------------


def random_probing_bounds(M: int, alpha: float, H_alpha: float) -> Interval:
    """Region of ``G(K|Y)`` in the random probing model given ``H_alpha(K|Y)`` (nats).

    The chord ``1 + (M-1)/2 (exp(c H) - 1)/(M**c - 1)`` (``c = (1-alpha)/alpha``)
    is an upper bound for alpha >= 1/2 and a lower bound for alpha <= 1/2; the
    curve ``(1 + exp H)/2`` plays the other role.  At alpha = 1/2 they
    coincide; at alpha = 1 the chord is ``1 + (M-1)/2 H/log M``.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    logm = math.log(M)
    if not -1e-12 <= H_alpha <= logm + 1e-12:
        raise ValueError("H_alpha must lie in [0, log M]")
    H = min(max(H_alpha, 0.0), logm)
    chord = 1.0 + (M - 1) / 2 * _chord_ratio(alpha, H, M)
    curve_val = (1.0 + math.exp(H)) / 2
    if alpha == 0.5:
        return Interval(curve_val, curve_val)
    return Interval(curve_val, chord) if alpha > 0.5 else Interval(chord, curve_val)


# --- baselines ------------------------------------------------------------------

BASELINES = ("massey", "rioul", "arikan", "mceliece_yu")


def baseline_bounds(M: int, H: float, which: str, rho: float = 1.0, alpha: float | None = None) -> float:
    """Earlier bounds, for comparison plots (``H`` in nats).

    * ``massey``: ``G >= 2**(H_bits - 2) + 1`` when ``H >= 2`` bits, else the
      trivial ``G >= 1`` (Massey 1994).
    * ``rioul``: ``G >= exp(H)/e + 1/2``, clamped to >= 1 (Rioul 2022,
      "Variations on a theme by Massey").
    * ``arikan``: ``G_rho >= (1 + ln M)**-rho exp(rho H_{1/(1+rho)})``, clamped
      to >= 1; ``H`` must be the order ``1/(1+rho)`` entropy (Arikan 1996).
    * ``mceliece_yu``: upper bound ``G <= 1 + (M-1) H / (2 log M)`` for
      alpha = rho = 1 (McEliece and Yu 1995).
    """
    logm = math.log(M)
    if not -1e-12 <= H <= logm + 1e-12:
        raise ValueError("H must lie in [0, log M]")
    H = min(max(H, 0.0), logm)
    if which == "massey":
        bits = H / LN2
        return 2.0 ** (bits - 2) + 1 if bits >= 2 else 1.0
    if which == "rioul":
        return max(1.0, math.exp(H - 1.0) + 0.5)
    if which == "arikan":
        if alpha is not None and abs(alpha - 1.0 / (1.0 + rho)) > 1e-12:
            raise ValueError("Arikan's bound is stated for alpha = 1/(1+rho)")
        return max(1.0, (1.0 + logm) ** (-rho) * math.exp(rho * H))
    if which == "mceliece_yu":
        return 1.0 + (M - 1) * H / (2.0 * logm)
    raise ValueError(f"unknown baseline {which!r}; choose from {BASELINES}")
