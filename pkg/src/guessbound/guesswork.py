"""Optimal guessing moments and the guessing advantage."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import DiscreteChannel, Pmf, _check_support_size, _probs


@dataclass(frozen=True)
class GuessingMoment:
    """``E[rank**rho]`` under the optimal (most-likely-first) guessing order."""

    value: float
    rho: float

    def __post_init__(self):
        if not self.value >= 1.0 - 1e-12:
            raise ValueError(f"a guessing moment is at least 1, got {self.value!r}")

    def __float__(self):
        return float(self.value)


def _check_rho(rho):
    if not rho > 0 or not math.isfinite(rho):
        raise ValueError(f"rho must be a positive finite number, got {rho!r}")


@lru_cache(maxsize=64)
def rank_powers(M: int, rho: float) -> np.ndarray:
    """``[1**rho, 2**rho, ..., M**rho]`` (read-only, cached)."""
    r = np.arange(1, M + 1, dtype=float) ** rho
    r.setflags(write=False)
    return r


@lru_cache(maxsize=64)
def rank_power_prefix(M: int, rho: float) -> np.ndarray:
    """Prefix sums ``S[k] = sum_{i<=k} i**rho`` for ``k = 0..M`` (compensated)."""
    r = rank_powers(M, rho)
    out = np.empty(M + 1)
    out[0] = 0.0
    total = 0.0
    comp = 0.0
    for k, x in enumerate(r, start=1):
        # Kahan summation; M up to ~1e6 without drift
        y = x - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[k] = total
    out.setflags(write=False)
    return out


def guessing_moment_array(p: np.ndarray, rho: float) -> np.ndarray:
    """Optimal guessing moment of each pmf along the last axis."""
    p = np.asarray(p, dtype=float)
    ordered = -np.sort(-p, axis=-1)
    return ordered @ rank_powers(p.shape[-1], float(rho))


def conditional_guessing_moment_array(weights, posteriors, rho: float) -> np.ndarray:
    """``E_y G_rho(X|Y=y)`` for batched channels, shapes as in ``conditional_renyi_array``."""
    return np.sum(np.asarray(weights) * guessing_moment_array(posteriors, rho), axis=-1)


def guessing_moment(p: Pmf, rho: float = 1.0) -> GuessingMoment:
    """``min_sigma E[sigma(X)**rho]``, reached by guessing values in decreasing probability.

    >>> round(guessing_moment(Pmf([0.2, 0.5, 0.3])).value, 12)
    1.7
    """
    _check_rho(rho)
    return GuessingMoment(float(guessing_moment_array(_probs(p), rho)), rho)


def conditional_guessing_moment(ch: DiscreteChannel, rho: float = 1.0) -> GuessingMoment:
    _check_rho(rho)
    return GuessingMoment(float(conditional_guessing_moment_array(ch.weights, ch.posteriors, rho)), rho)


@lru_cache(maxsize=256)
def uniform_moment(M: int, rho: float = 1.0) -> float:
    """``G_rho(M) = (1/M) sum_{i=1}^M i**rho``, the no-leakage moment of a uniform secret."""
    _check_support_size(M)
    _check_rho(rho)
    if rho == 1:
        return (M + 1) / 2
    if rho == 2:
        return (M + 1) * (2 * M + 1) / 6
    return math.fsum(rank_powers(M, float(rho))) / M


def rank_moment_variance(M: int, rho: float = 1.0) -> float:
    """``G_{2rho}(M) - G_rho(M)**2``, the variance of ``K**rho`` for uniform ``K``."""
    r = rank_powers(M, float(rho))
    mean = uniform_moment(M, rho)
    return math.fsum((r - mean) ** 2) / M


def guessing_advantage(ch: DiscreteChannel, rho: float = 1.0) -> float:
    """``G_rho(M) - G_rho(X|Y)``; negative values are possible for non-uniform priors."""
    return uniform_moment(ch.M, rho) - conditional_guessing_moment(ch, rho).value
