"""Finite pmfs, side-information channels and the equality-case pmf families.

Support points are 1-based ``{1, ..., M}`` in every public signature; the
arrays underneath are ordinary 0-based numpy vectors.  ``0**alpha`` is taken
as 0 and ``0 * log 0`` as 0 throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

SUM_TOL = 1e-12
NEAR_ONE = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _normalize_log(logw: np.ndarray) -> np.ndarray:
    """Turn unnormalized log-weights (last axis) into probabilities."""
    logw = np.asarray(logw, dtype=float)
    top = np.max(logw, axis=-1, keepdims=True)
    w = np.exp(logw - top)
    return w / np.sum(w, axis=-1, keepdims=True)


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability vector over ``{1, ..., M}``."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("a pmf needs a non-empty 1-D probability vector")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise ValueError("pmf entries must be finite and non-negative")
        total = math.fsum(p)
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"pmf entries sum to {total!r}, not 1")
        object.__setattr__(self, "probs", _frozen(p))

    @property
    def M(self) -> int:
        return self.probs.size

    def __len__(self):
        return self.probs.size

    def __call__(self, x: int) -> float:
        """Probability of the support point ``x`` (1-based)."""
        if not 1 <= x <= self.M:
            raise IndexError(f"support point {x} outside 1..{self.M}")
        return float(self.probs[x - 1])

    def __repr__(self):
        return f"Pmf({np.array2string(self.probs, precision=6)})"

    @classmethod
    def uniform(cls, M: int) -> "Pmf":
        _check_support_size(M)
        return cls(np.full(M, 1.0 / M))

    @classmethod
    def dirac(cls, M: int, x: int = 1) -> "Pmf":
        _check_support_size(M)
        p = np.zeros(M)
        p[x - 1] = 1.0
        return cls(p)

    @classmethod
    def from_weights(cls, weights) -> "Pmf":
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or not np.any(w > 0):
            raise ValueError("weights must be non-negative with positive total")
        return cls(w / math.fsum(w))

    def to_json(self) -> str:
        return json.dumps([float(format(x, ".17g")) for x in self.probs])

    @classmethod
    def from_json(cls, text: str) -> "Pmf":
        return cls(np.array(json.loads(text), dtype=float))


@dataclass(frozen=True, eq=False)
class DiscreteChannel:
    """Conditional view of (X, Y): output weights and one posterior per output.

    ``weights[y]`` is P(Y = y) and ``posteriors[y]`` the pmf of X given Y = y.
    """

    weights: np.ndarray
    posteriors: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        post = np.array(self.posteriors, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("channel needs at least one output")
        if post.ndim != 2 or post.shape[0] != w.size or post.shape[1] == 0:
            raise ValueError("posteriors must have shape (n_outputs, M)")
        if np.any(w < 0) or abs(math.fsum(w) - 1.0) > SUM_TOL:
            raise ValueError("output weights must be a probability vector")
        if np.any(post < 0) or not np.all(np.isfinite(post)):
            raise ValueError("posterior entries must be finite and non-negative")
        sums = np.array([math.fsum(row) for row in post])
        if np.any(np.abs(sums - 1.0) > SUM_TOL):
            raise ValueError("every posterior must sum to 1")
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "posteriors", _frozen(post))

    @classmethod
    def from_outputs(cls, outputs) -> "DiscreteChannel":
        """Build from an iterable of ``(weight, Pmf)`` pairs."""
        outputs = list(outputs)
        if not outputs:
            raise ValueError("channel needs at least one output")
        sizes = {p.M for _, p in outputs}
        if len(sizes) != 1:
            raise ValueError("all posteriors must share the same support size")
        return cls(np.array([w for w, _ in outputs]), np.stack([p.probs for _, p in outputs]))

    @classmethod
    def no_leakage(cls, prior: Pmf) -> "DiscreteChannel":
        return cls(np.ones(1), prior.probs[None, :])

    @property
    def M(self) -> int:
        return self.posteriors.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.weights.size

    @property
    def outputs(self) -> list:
        return [(float(w), Pmf(p)) for w, p in zip(self.weights, self.posteriors)]

    def marginal(self) -> Pmf:
        """Prior of X obtained by averaging the posteriors."""
        p = self.weights @ self.posteriors
        return Pmf(p / math.fsum(p))


@dataclass(frozen=True)
class OrderParams:
    """Entropy order ``alpha`` (``math.inf`` allowed) and guessing order ``rho``."""

    alpha: float
    rho: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0) or math.isnan(self.alpha):
            raise ValueError(f"alpha must be > 0, got {self.alpha!r}")
        if not (self.rho > 0) or not math.isfinite(self.rho):
            raise ValueError(f"rho must be a positive finite number, got {self.rho!r}")

    @property
    def alpha_conjugate(self) -> float:
        """Hölder conjugate alpha/(alpha-1); nan at alpha = 1, 1 at alpha = inf."""
        if math.isinf(self.alpha):
            return 1.0
        if self.alpha == 1:
            return math.nan
        return self.alpha / (self.alpha - 1.0)

    @property
    def is_shannon(self) -> bool:
        return abs(self.alpha - 1.0) <= NEAR_ONE

    @property
    def is_min_entropy(self) -> bool:
        return math.isinf(self.alpha)


def _check_support_size(M):
    if int(M) != M or M < 1:
        raise ValueError(f"support size must be a positive integer, got {M!r}")


def _probs(p) -> np.ndarray:
    return p.probs if isinstance(p, Pmf) else Pmf(p).probs


def sort_decreasing(p: Pmf) -> Pmf:
    """Rearrange ``p`` so the most likely value comes first (ties keep index order)."""
    probs = _probs(p)
    return Pmf(probs[np.argsort(-probs, kind="stable")])


def escort(p: Pmf, alpha: float) -> Pmf:
    """Escort distribution proportional to ``p**alpha``."""
    if not alpha > 0 or math.isinf(alpha):
        raise ValueError("escort order must be a positive finite number")
    probs = _probs(p)
    with np.errstate(divide="ignore"):
        logp = np.log(probs)
    return Pmf(_normalize_log(alpha * logp))


def truncated_geometric(gamma: float, rho: float, M: int) -> Pmf:
    """Pmf proportional to ``gamma ** (x**rho)`` on ``{1..M}``.

    Evaluated from log-weights, so ``gamma ** (M**rho)`` may underflow to 0
    without producing NaN.  ``gamma = 1`` gives the uniform pmf.
    """
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma!r}")
    _check_support_size(M)
    ranks = np.arange(1, M + 1, dtype=float) ** rho
    return Pmf(_normalize_log((ranks - 1.0) * math.log(gamma)))


def gibbs_family_low_alpha(gamma: float, params: OrderParams, M: int) -> Pmf:
    """Equality-case pmf for ``0 < alpha < 1``: ``(1 + gamma (x**rho - 1)) ** (alpha' - 1)``.

    ``gamma = 0`` is uniform; the pmf tends to a Dirac mass as gamma grows.
    """
    if not 0 < params.alpha < 1:
        raise ValueError("the low-alpha family needs 0 < alpha < 1")
    if not 0 <= gamma < math.inf:
        raise ValueError(f"gamma must lie in [0, inf), got {gamma!r}")
    _check_support_size(M)
    excess = np.arange(1, M + 1, dtype=float) ** params.rho - 1.0
    with np.errstate(divide="ignore"):
        # log(1 + gamma*excess) without overflow for huge gamma
        log_base = np.logaddexp(0.0, math.log(gamma) + np.log(excess)) if gamma > 0 else np.zeros(M)
    return Pmf(_normalize_log((params.alpha_conjugate - 1.0) * log_base))


def gibbs_family_high_alpha(gamma: float, params: OrderParams, M: int) -> Pmf:
    """Equality-case pmf for ``alpha > 1``: ``(1 - gamma x**rho)_+ ** (alpha' - 1)``.

    Indices with ``gamma x**rho >= 1`` get probability 0, so for
    ``gamma >= 2**-rho`` the result is the Dirac mass at 1.
    """
    if not params.alpha > 1 or math.isinf(params.alpha):
        raise ValueError("the high-alpha family needs 1 < alpha < inf")
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma!r}")
    _check_support_size(M)
    idx = np.arange(1, M + 1, dtype=float)
    alive = gamma < idx ** (-params.rho)
    alive[0] = True
    base = np.where(alive, 1.0 - gamma * idx ** params.rho, 1.0)
    logw = np.where(alive, (params.alpha_conjugate - 1.0) * np.log(base), -np.inf)
    return Pmf(_normalize_log(logw))


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _simplex_rows(rng, shape) -> np.ndarray:
    # normalized i.i.d. exponentials are uniform on the simplex
    e = rng.exponential(size=shape)
    return e / e.sum(axis=-1, keepdims=True)


def random_pmf(M: int, seed=None) -> Pmf:
    """Pmf drawn uniformly from the probability simplex (deterministic given ``seed``)."""
    _check_support_size(M)
    return Pmf(_simplex_rows(_rng(seed), (M,)))


def random_channel(M: int, n_outputs: int, seed=None) -> DiscreteChannel:
    """Channel with simplex-uniform output weights and simplex-uniform posteriors."""
    _check_support_size(M)
    if int(n_outputs) != n_outputs or n_outputs < 1:
        raise ValueError("n_outputs must be a positive integer")
    rng = _rng(seed)
    weights = _simplex_rows(rng, (n_outputs,))
    return DiscreteChannel(weights, _simplex_rows(rng, (n_outputs, M)))


def random_channel_batch(M: int, count: int, max_outputs: int, seed=None, concentrations=(1.0,)):
    """Many random channels at once as padded arrays.

    Returns ``(weights, posteriors)`` with shapes ``(count, max_outputs)`` and
    ``(count, max_outputs, M)``.  Each channel gets a random number of live
    outputs in ``1..max_outputs``; padded outputs carry zero weight.  Each
    channel draws its posteriors from a symmetric Dirichlet whose
    concentration is picked from ``concentrations`` (1 is simplex-uniform,
    small values give sparse, near-Dirac posteriors).
    """
    rng = _rng(seed)
    n_live = rng.integers(1, max_outputs + 1, size=count)
    live = np.arange(max_outputs)[None, :] < n_live[:, None]
    w = rng.exponential(size=(count, max_outputs)) * live
    w /= w.sum(axis=1, keepdims=True)
    conc = np.asarray(concentrations, dtype=float)[rng.integers(0, len(concentrations), size=count)]
    raw = rng.gamma(conc[:, None, None], size=(count, max_outputs, M))
    total = raw.sum(axis=-1, keepdims=True)
    dead = total[..., 0] == 0
    raw[dead, 0] = 1.0
    total[dead] = 1.0
    return w, raw / total
