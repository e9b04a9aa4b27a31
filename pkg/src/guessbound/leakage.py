"""Concrete side channels: noisy Hamming weight and random probing.

For the Hamming weight model ``Y = w_H(K) + N`` with ``N ~ N(0, sigma**2)``
and ``K`` uniform over ``n``-bit words, every key of weight ``w`` has the
same posterior, so integrands only loop over the ``n + 1`` weight classes.
Each integrand is written in terms of the joint density
``j_w(y) = phi_sigma(y - w) / M`` of a single key, which avoids dividing by
the output density ``f_Y``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate
from scipy.special import gammaln, logsumexp

from .distributions import DiscreteChannel, _rng
from .entropies import EntropyValue, entropy_kind
from .guesswork import GuessingMoment, _check_rho, rank_power_prefix, uniform_moment

TAIL_SIGMAS = 12.0
QUAD_RTOL = 1e-9
QUAD_ATOL = 1e-12


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested accuracy."""


@dataclass(frozen=True)
class HammingWeightModel:
    """``Y = HW(K) + N`` with ``K`` uniform on ``{0,1}**n`` and Gaussian noise of std ``sigma``."""

    n: int
    sigma: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"bit width n must be a positive integer, got {self.n!r}")
        if not self.sigma > 0 or not math.isfinite(self.sigma):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")

    @property
    def M(self) -> int:
        return 2**self.n

    def log_class_sizes(self) -> np.ndarray:
        w = np.arange(self.n + 1)
        return gammaln(self.n + 1) - gammaln(w + 1) - gammaln(self.n - w + 1)

    def class_sizes(self) -> np.ndarray:
        return np.array([math.comb(self.n, w) for w in range(self.n + 1)], dtype=float)

    def log_joint(self, y: float) -> np.ndarray:
        """``log j_w(y)`` for every weight ``w``."""
        z = (y - np.arange(self.n + 1)) / self.sigma
        return -0.5 * z * z - math.log(self.sigma * math.sqrt(2 * math.pi)) - self.n * math.log(2)

    def breakpoints(self) -> np.ndarray:
        """Panel edges: tie points between weights plus a few noise scales around each weight."""
        lo, hi = -TAIL_SIGMAS * self.sigma, self.n + TAIL_SIGMAS * self.sigma
        w = np.arange(self.n + 1, dtype=float)
        pts = [np.array([lo, hi]), np.arange(2 * self.n + 1) / 2.0]
        for k in (1, 2, 4, 8):
            pts += [w - k * self.sigma, w + k * self.sigma]
        edges = np.unique(np.concatenate(pts))
        return edges[(edges >= lo) & (edges <= hi)]


def _integrate(fn, model: HammingWeightModel, what: str) -> float:
    """Sum of adaptive Gauss-Kronrod integrals over the fixed panels."""
    edges = model.breakpoints()
    values, errors = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            try:
                v, e = integrate.quad(fn, a, b, epsabs=QUAD_ATOL / len(edges), epsrel=QUAD_RTOL / 10, limit=200)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"{what}: panel [{a}, {b}] failed for {model}: {exc}") from None
            values.append(v)
            errors.append(e)
    total = math.fsum(values)
    err = math.fsum(errors)
    if err > QUAD_ATOL + QUAD_RTOL * abs(total):
        raise QuadratureError(f"{what}: error estimate {err:.3e} too large for value {total!r} ({model})")
    return total


def hw_conditional_k_alpha(model: HammingWeightModel, alpha: float) -> float:
    """``E_y ||p_{K|y}||_alpha`` (``E_y max_k p(k|y)`` at alpha = inf)."""
    log_c = model.log_class_sizes()
    if math.isinf(alpha):
        return _integrate(lambda y: math.exp(model.log_joint(y).max()), model, "K_inf")

    def integrand(y):
        return math.exp(logsumexp(log_c + alpha * model.log_joint(y)) / alpha)

    return _integrate(integrand, model, f"K_{alpha}")


def hw_conditional_entropy(model: HammingWeightModel, alpha: float) -> EntropyValue:
    """Arimoto conditional entropy ``H_alpha(K|Y)`` in nats."""
    kind = entropy_kind(alpha)
    if kind == "shannon":
        log_c = model.log_class_sizes()
        sizes = model.class_sizes()

        def integrand(y):
            lj = model.log_joint(y)
            log_f = logsumexp(log_c + lj)
            return float(np.sum(sizes * np.exp(lj) * (log_f - lj)))

        value = _integrate(integrand, model, "H_1")
    else:
        k = hw_conditional_k_alpha(model, alpha)
        value = -math.log(k) if kind == "min" else alpha / (1.0 - alpha) * math.log(k)
    return EntropyValue(min(value, model.n * math.log(2)))


def _class_ranks(model: HammingWeightModel, y: float) -> np.ndarray:
    """Number of keys guessed before each weight class at output ``y``."""
    w = np.arange(model.n + 1)
    # closest weight first; ties go to the smaller weight
    order = np.lexsort((w, np.abs(y - w)))
    before = np.empty(model.n + 1, dtype=int)
    before[order] = np.concatenate([[0], np.cumsum(model.class_sizes()[order].astype(int))[:-1]])
    return before


def hw_conditional_guesswork(model: HammingWeightModel, rho: float = 1.0) -> GuessingMoment:
    """``G_rho(K|Y)`` with keys guessed class by class in decreasing posterior order."""
    _check_rho(rho)
    prefix = rank_power_prefix(model.M, float(rho))
    sizes = model.class_sizes().astype(int)

    def integrand(y):
        before = _class_ranks(model, y)
        span = prefix[before + sizes] - prefix[before]
        return float(np.exp(model.log_joint(y)) @ span)

    return GuessingMoment(max(_integrate(integrand, model, f"G_{rho}"), 1.0), rho)


def hw_info_advantage(model: HammingWeightModel, alpha: float) -> float:
    """``log M - H_alpha(K|Y)`` in nats."""
    return max(model.n * math.log(2) - hw_conditional_entropy(model, alpha).nats, 0.0)


def hw_guessing_advantage(model: HammingWeightModel, rho: float = 1.0) -> float:
    return uniform_moment(model.M, rho) - hw_conditional_guesswork(model, rho).value


def hw_noiseless_guesswork(n: int, rho: float = 1.0) -> float:
    """``G_rho(K|HW(K))``: within a class of size ``C`` the ranks are ``1..C``."""
    prefix = rank_power_prefix(2**n, float(rho))
    return math.fsum(prefix[math.comb(n, w)] for w in range(n + 1)) / 2**n


def hw_noiseless_entropy(n: int) -> float:
    """``H(K|HW(K)) = sum_w C(n,w)/2**n log C(n,w)`` in nats."""
    return math.fsum(math.comb(n, w) * math.log(math.comb(n, w)) for w in range(n + 1)) / 2**n


@dataclass(frozen=True)
class RandomProbingModel:
    """``Y = (Z, f_Z(K))``: a random state ``Z`` picks a deterministic leakage table.

    ``states`` is a sequence of ``(prob, table)`` with ``table[k-1]`` the
    label leaked for key ``k``.
    """

    states: tuple

    def __post_init__(self):
        states = tuple((float(p), tuple(t)) for p, t in self.states)
        if not states:
            raise ValueError("random probing model needs at least one state")
        sizes = {len(t) for _, t in states}
        if len(sizes) != 1 or 0 in sizes:
            raise ValueError("every table must be non-empty and cover the same key set")
        probs = [p for p, _ in states]
        if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError("state probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "states", states)

    @property
    def M(self) -> int:
        return len(self.states[0][1])


def preimage_sizes(table) -> np.ndarray:
    """Sizes ``M_o`` of the preimages of every label of a leakage table."""
    _, counts = np.unique(np.asarray(table), return_counts=True)
    return counts


def probing_channel(model: RandomProbingModel) -> DiscreteChannel:
    """Exact channel of a uniform key through the probing model.

    Output ``(z, o)`` has weight ``P(z) M_{z,o} / M`` and a uniform
    posterior on the preimage of ``o`` under ``f_z``.
    """
    M = model.M
    weights, posteriors = [], []
    for prob, table in model.states:
        labels = np.asarray(table)
        for lab in np.unique(labels):
            hit = labels == lab
            size = int(hit.sum())
            weights.append(prob * size / M)
            posteriors.append(np.where(hit, 1.0 / size, 0.0))
    return DiscreteChannel(np.array(weights), np.array(posteriors))


def _probing_values(sizes_by_state, probs, M, alpha):
    """Exact ``(H_alpha(K|Y), G(K|Y))`` from preimage sizes.

    A uniform posterior over ``m`` keys has ``||.||_alpha = m**(1/alpha - 1)``,
    entropy ``log m`` and guessing moment ``(m + 1)/2``.
    """
    kind = entropy_kind(alpha)
    G = math.fsum(p * math.fsum(m * (m + 1) / 2 for m in s) for p, s in zip(probs, sizes_by_state)) / M
    if kind == "shannon":
        H = math.fsum(p * math.fsum(m * math.log(m) for m in s) for p, s in zip(probs, sizes_by_state)) / M
    else:
        power = -1.0 if kind == "min" else 1.0 / alpha - 1.0
        K = math.fsum(p * math.fsum(m * m**power for m in s) for p, s in zip(probs, sizes_by_state)) / M
        H = -math.log(K) if kind == "min" else alpha / (1.0 - alpha) * math.log(K)
    return min(max(H, 0.0), math.log(M)), G


def probing_values(model: RandomProbingModel, alpha: float):
    """``(H_alpha(K|Y), G(K|Y))`` of the probing model, from preimage sizes alone."""
    sizes = [preimage_sizes(t) for _, t in model.states]
    return _probing_values(sizes, [p for p, _ in model.states], model.M, alpha)


def random_probing_model(M: int, n_states: int, n_range: int, seed=None) -> RandomProbingModel:
    """Random state distribution with i.i.d. uniform leakage tables into ``{1..n_range}``."""
    rng = _rng(seed)
    probs = rng.exponential(size=n_states)
    probs /= probs.sum()
    tables = rng.integers(1, n_range + 1, size=(n_states, M))
    return RandomProbingModel(tuple((p, tuple(int(v) for v in t)) for p, t in zip(probs, tables)))


def random_function_scatter(M: int, n_range: int, count: int, seed=None, alpha: float = 1.0) -> np.ndarray:
    """Exact ``(H_alpha(K|Y), G(K|Y))`` for ``Y = f(K)`` with ``count`` random functions.

    Each ``f: {1..M} -> {1..n_range}`` has i.i.d. uniform values.  Returns an
    array of shape ``(count, 2)``.
    """
    if int(count) != count or count < 1:
        raise ValueError("count must be a positive integer")
    if int(n_range) != n_range or n_range < 1:
        raise ValueError("n_range must be a positive integer")
    rng = _rng(seed)
    tables = rng.integers(1, n_range + 1, size=(count, M))
    out = np.empty((count, 2))
    for k, t in enumerate(tables):
        out[k] = _probing_values([preimage_sizes(t)], [1.0], M, alpha)
    return out


def load_model_config(source):
    """Build a model from ``{"hw": {...}}`` or ``{"probing": {"states": [...]}}``.

    ``source`` may be a dict, a JSON string or a path to a JSON file.
    """
    if isinstance(source, dict):
        doc = source
    elif isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        doc = json.loads(Path(source).read_text())
    else:
        doc = json.loads(source)
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ValueError('model config must have exactly one key: "hw" or "probing"')
    if "hw" in doc:
        cfg = doc["hw"]
        return HammingWeightModel(int(cfg["n"]), float(cfg["sigma"]))
    if "probing" in doc:
        states = doc["probing"]["states"]
        return RandomProbingModel(tuple((float(s["prob"]), tuple(s["table"])) for s in states))
    raise ValueError(f"unknown model kind {next(iter(doc))!r}")
