"""Rényi and Arimoto entropies, the K_alpha norm functional and the Rényi-Gibbs bound.

Everything is computed in nats.  ``alpha = 1`` (or within ``NEAR_ONE`` of it)
goes through the Shannon formulas and ``alpha = inf`` through the min-entropy
formulas; neither is obtained as a numerical limit.

The array helpers (``*_array``) accept pmfs along the last axis with any
leading batch shape and skip validation; the public functions take
``Pmf``/``DiscreteChannel`` objects.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

from .distributions import NEAR_ONE, DiscreteChannel, Pmf, _probs

LN2 = math.log(2.0)


class NearShannonWarning(UserWarning):
    """alpha was close enough to 1 to be evaluated as Shannon entropy."""


@dataclass(frozen=True)
class EntropyValue:
    """Entropy in nats, with bits available for display."""

    nats: float

    def __post_init__(self):
        v = float(self.nats)
        if v < -1e-12 or math.isnan(v):
            raise ValueError(f"entropy cannot be negative: {v!r}")
        object.__setattr__(self, "nats", max(v, 0.0))

    @property
    def bits(self) -> float:
        return self.nats / LN2

    def __float__(self):
        return self.nats


def entropy_kind(alpha: float) -> str:
    """Classify an order as ``'shannon'``, ``'min'`` or ``'renyi'``."""
    if not alpha > 0 or math.isnan(alpha):
        raise ValueError(f"entropy order must be > 0, got {alpha!r}")
    if math.isinf(alpha):
        return "min"
    if alpha == 1:
        return "shannon"
    if abs(alpha - 1.0) <= NEAR_ONE:
        warnings.warn(
            f"alpha={alpha!r} is within {NEAR_ONE} of 1; using Shannon entropy",
            NearShannonWarning,
            stacklevel=3,
        )
        return "shannon"
    return "renyi"


def _split_max(p: np.ndarray):
    """Largest entry ``m``, the mass ``r`` of the others, and the other entries.

    ``r`` is summed from the other entries rather than taken as ``1 - m``,
    so ``log m = log1p(-r)`` stays accurate for nearly deterministic pmfs.
    """
    k = np.argmax(p, axis=-1)[..., None]
    m = np.take_along_axis(p, k, axis=-1)[..., 0]
    rest = p.copy()
    np.put_along_axis(rest, k, 0.0, axis=-1)
    r = rest.sum(axis=-1)
    with np.errstate(divide="ignore"):
        log_m = np.where(m >= 0.5, np.log1p(-np.minimum(r, 1.0)), np.log(m))
    return m, log_m, rest


def log_power_sum_array(p: np.ndarray, alpha: float) -> np.ndarray:
    """``log sum p**alpha`` over the last axis, finite ``alpha > 0``."""
    p = np.asarray(p, dtype=float)
    m, log_m, rest = _split_max(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rest > 0, rest / m[..., None], 0.0)
        tail = np.where(ratio > 0, ratio**alpha, 0.0).sum(axis=-1)
    return alpha * log_m + np.log1p(tail)


def shannon_array(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    m, log_m, rest = _split_max(p)
    return -m * log_m + entr(rest).sum(axis=-1)


def renyi_array(p: np.ndarray, alpha: float) -> np.ndarray:
    """Rényi entropy (nats) of each pmf along the last axis."""
    kind = entropy_kind(alpha)
    if kind == "shannon":
        return shannon_array(p)
    if kind == "min":
        return -_split_max(np.asarray(p, dtype=float))[1]
    return log_power_sum_array(p, alpha) / (1.0 - alpha)


def norm_array(p: np.ndarray, alpha: float) -> np.ndarray:
    """``||p||_alpha`` along the last axis (``max p`` at ``alpha = inf``)."""
    if math.isinf(alpha):
        return np.exp(_split_max(np.asarray(p, dtype=float))[1])
    return np.exp(log_power_sum_array(p, alpha) / alpha)


def conditional_renyi_array(weights: np.ndarray, posteriors: np.ndarray, alpha: float) -> np.ndarray:
    """Arimoto conditional entropy for batched channels.

    ``weights`` has shape ``(..., n_out)`` and ``posteriors`` ``(..., n_out, M)``.
    """
    weights = np.asarray(weights, dtype=float)
    kind = entropy_kind(alpha)
    if kind == "shannon":
        return np.sum(weights * shannon_array(posteriors), axis=-1)
    k = np.sum(weights * norm_array(posteriors, alpha), axis=-1)
    if kind == "min":
        return -np.log(k)
    return alpha / (1.0 - alpha) * np.log(k)


def renyi_entropy(p: Pmf, alpha: float) -> EntropyValue:
    """Rényi entropy ``-alpha' log ||p||_alpha`` of a pmf.

    >>> round(renyi_entropy(Pmf([0.5, 0.25, 0.25]), 2).nats, 6)
    0.980829
    """
    return EntropyValue(float(renyi_array(_probs(p), alpha)))


def k_alpha(p: Pmf, alpha: float) -> float:
    """The alpha-norm ``||p||_alpha`` (equal to ``exp((1-alpha)/alpha H_alpha)``)."""
    if entropy_kind(alpha) == "shannon":
        raise ValueError("K_alpha is identically 1 at alpha = 1")
    return float(norm_array(_probs(p), alpha))


def conditional_k_alpha(ch: DiscreteChannel, alpha: float) -> float:
    """Expected posterior alpha-norm ``E_y ||p_{X|y}||_alpha``."""
    if entropy_kind(alpha) == "shannon":
        raise ValueError("K_alpha is identically 1 at alpha = 1")
    return float(ch.weights @ norm_array(ch.posteriors, alpha))


def conditional_renyi(ch: DiscreteChannel, alpha: float) -> EntropyValue:
    """Arimoto's conditional entropy ``-alpha' log E_y ||p_{X|y}||_alpha``."""
    return EntropyValue(float(conditional_renyi_array(ch.weights, ch.posteriors, alpha)))


def info_advantage(ch: DiscreteChannel, alpha: float) -> float:
    """``log M - H_alpha(X|Y)`` in nats; the alpha-information when the prior is uniform."""
    return math.log(ch.M) - conditional_renyi(ch, alpha).nats


def _log_q_stats(p, q, alpha):
    pp, qq = _probs(p), _probs(q)
    if pp.size != qq.size:
        raise ValueError("p and q must share the same support size")
    if entropy_kind(alpha) != "renyi":
        raise ValueError("the Rényi-Gibbs bound needs a finite alpha != 1")
    on = pp > 0
    if np.any(qq[on] == 0):
        return None
    # log E_p q^(alpha-1) and log sum q^alpha
    lp = np.log(pp[on]) + (alpha - 1.0) * np.log(qq[on])
    top = lp.max()
    log_e = top + math.log(np.exp(lp - top).sum())
    return log_e, float(log_power_sum_array(qq, alpha))


def gibbs_rhs(p: Pmf, q: Pmf, alpha: float) -> float:
    """Right side of the Rényi-Gibbs inequality ``-alpha' log E_p[q_alpha(X)**(1/alpha')]``.

    ``q_alpha`` is the escort of ``q``.  The value is at least
    ``renyi_entropy(p, alpha)`` with equality iff ``p == q``.  When ``q``
    vanishes somewhere ``p`` does not, ``+inf`` is returned (the inequality
    holds trivially) instead of raising.
    """
    stats = _log_q_stats(p, q, alpha)
    if stats is None:
        return math.inf
    log_e, log_sq = stats
    ap = alpha / (alpha - 1.0)
    return -ap * (log_e - (alpha - 1.0) / alpha * log_sq)


def gibbs_rhs_direct(p: Pmf, q: Pmf, alpha: float) -> float:
    """Same bound written with ``q`` itself: ``(1-alpha) H_alpha(q) - alpha' log E_p q**(alpha-1)``."""
    stats = _log_q_stats(p, q, alpha)
    if stats is None:
        return math.inf
    log_e, log_sq = stats
    ap = alpha / (alpha - 1.0)
    h_q = log_sq / (1.0 - alpha)
    return (1.0 - alpha) * h_q - ap * log_e


def gibbs_k_rhs(p: Pmf, q: Pmf, alpha: float) -> float:
    """``E_p q**(alpha-1) / ||q||_alpha**(alpha-1)``.

    ``k_alpha(p)`` is <= this for ``alpha < 1`` and >= it for ``alpha > 1``.
    """
    pp, qq = _probs(p), _probs(q)
    if pp.size != qq.size:
        raise ValueError("p and q must share the same support size")
    if entropy_kind(alpha) != "renyi":
        raise ValueError("the Rényi-Gibbs bound needs a finite alpha != 1")
    on = pp > 0
    if alpha < 1 and np.any(qq[on] == 0):
        return math.inf
    hit = on & (qq > 0)
    e = math.fsum(pp[hit] * qq[hit] ** (alpha - 1.0))
    return e / math.exp((alpha - 1.0) / alpha * float(log_power_sum_array(qq, alpha)))
