"""Self-check suites behind ``guessbound verify``.

Each suite returns a ``SuiteResult`` with a check count, the smallest
slack left after each check's tolerance (negative means violated) and the
parameters of the worst case.  The report contains no timings, so a fixed
seed gives byte-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import (
    BoundSpec,
    binary_bounds,
    curve_delta_shannon,
    curve_rho_alpha,
    curve_shannon,
    generating_pmf,
    lower_bound_many,
)
from .distributions import OrderParams, _rng, random_channel_batch
from .entropies import conditional_renyi_array, gibbs_rhs, renyi_array
from .guesswork import conditional_guessing_moment_array, guessing_moment_array
from .leakage import probing_values, random_probing_model

ALPHAS = (1 / 3, 0.5, 1.0, 2.0, math.inf)
RHOS = (0.5, 1.0, 2.0)
TIGHT_ALPHAS = (1 / 3, 0.5, 2.0, 4.0)


@dataclass
class SuiteResult:
    name: str
    checks: int
    worst: float
    where: str

    @property
    def passed(self) -> bool:
        return self.worst >= 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<12} {status}  checks={self.checks:<7d} worst_slack={self.worst:+.3e}  at {self.where}"


class _Worst:
    def __init__(self):
        self.value = math.inf
        self.where = "-"
        self.count = 0

    def add(self, margins, where):
        margins = np.atleast_1d(np.asarray(margins, dtype=float))
        self.count += margins.size
        k = int(np.argmin(margins))
        if margins[k] < self.value:
            self.value = float(margins[k])
            self.where = where(k) if callable(where) else where


def suite_gibbs(count: int, seed: int) -> SuiteResult:
    """Rényi-Gibbs inequality on random triples plus its equality case ``q = p``."""
    rng = _rng(seed)
    w = _Worst()
    for k in range(count):
        M = int(rng.integers(2, 9))
        alpha = float(rng.choice([0.2, 1 / 3, 0.5, 0.8, 1.5, 2.0, 4.0]))
        p = rng.dirichlet(np.ones(M))
        q = rng.dirichlet(np.ones(M))
        h = float(renyi_array(p, alpha))
        w.add(gibbs_rhs(p, q, alpha) - h + 1e-10, f"seed={seed} trial={k} M={M} alpha={alpha}")
        w.add(1e-10 - abs(gibbs_rhs(p, p, alpha) - h), f"seed={seed} trial={k} M={M} alpha={alpha} (q=p)")
    return SuiteResult("gibbs", w.count, w.value, w.where)


def suite_soundness(count: int, seed: int) -> SuiteResult:
    """Random channels never fall below the optimal lower bound."""
    w = _Worst()
    for M in (2, 4, 8, 16):
        weights, post = random_channel_batch(M, count, 8, seed=seed + M, concentrations=(1.0, 0.3, 0.1))
        for alpha in ALPHAS:
            H = np.clip(conditional_renyi_array(weights, post, alpha), 0.0, math.log(M))
            for rho in RHOS:
                G = conditional_guessing_moment_array(weights, post, rho)
                L = lower_bound_many(M, OrderParams(alpha, rho), H)
                w.add(G - L + 1e-9, lambda k, M=M, a=alpha, r=rho: f"seed={seed + M} channel={k} M={M} alpha={a:g} rho={r:g}")
    return SuiteResult("soundness", w.count, w.value, w.where)


def suite_tightness(size: int, perturb: float = 0.0) -> SuiteResult:
    """Each curve point is reproduced by its generating pmf (relative margin)."""
    w = _Worst()
    for alpha in TIGHT_ALPHAS:
        for rho in RHOS:
            for M in (2, 8, 32):
                params = OrderParams(alpha, rho)
                spec = BoundSpec(M, params, size=size)
                pts = curve_rho_alpha(spec, endpoints=False, verify=False)
                for pt in pts:
                    q = generating_pmf(params, M, pt.gamma).probs
                    h = float(renyi_array(q, alpha))
                    g = float(guessing_moment_array(q, rho))
                    G = pt.G - perturb
                    rel = max(abs(h - pt.H.nats) / max(h, pt.H.nats, 1e-300), abs(g - G) / g)
                    w.add(1e-9 - rel, f"M={M} alpha={alpha:g} rho={rho:g} gamma={pt.gamma!r}")
    return SuiteResult("tightness", w.count, w.value, w.where)


def suite_equality(count: int, seed: int) -> SuiteResult:
    """Equality cases: probing at alpha = 1/2, both Shannon forms, the binary curve."""
    rng = _rng(seed)
    w = _Worst()
    M = 32
    for k in range(count):
        model = random_probing_model(M, int(rng.integers(1, 4)), int(rng.integers(1, 2 * M)), seed=rng)
        H, G = probing_values(model, 0.5)
        gap = (M + 1) / 2 - G - M / 2 * (-math.expm1(-(math.log(M) - H)))
        w.add(1e-10 - abs(gap), f"seed={seed} model={k} (probing alpha=1/2)")
    for M in (2, 8, 256):
        spec = BoundSpec(M, OrderParams(1.0, 1.0))
        mu = np.geomspace(1e-4, 10, 41)
        a = curve_delta_shannon(spec, mu)
        b = curve_shannon(BoundSpec(M, OrderParams(1.0, 1.0), lo=math.exp(-20), hi=math.exp(-2e-4), size=41), endpoints=False)
        for pa, pb in zip(a, b[::-1]):
            rel = max(abs(pa.deltaG - pb.deltaG) / pb.deltaG, abs(pa.deltaH - pb.deltaH) / pb.deltaH)
            w.add(1e-9 - rel, f"M={M} mu={pa.gamma!r} (Shannon forms)")
    for alpha in TIGHT_ALPHAS:
        params = OrderParams(alpha, 1.0)
        pts = [p for p in curve_rho_alpha(BoundSpec(2, params, size=64), endpoints=False, verify=False) if p.deltaH > 1e-6]
        for pt in pts:
            rel = abs(binary_bounds(params, pt.H.nats).lower - pt.G) / pt.G
            w.add(1e-9 - rel, f"alpha={alpha:g} gamma={pt.gamma!r} (binary curve)")
    return SuiteResult("equality", w.count, w.value, w.where)


def run_all(seed: int = 0, count: int = 2000, size: int = 128, perturb: float = 0.0) -> list[SuiteResult]:
    """Run every suite; ``perturb`` lowers every curve point (harness self-test only)."""
    return [
        suite_gibbs(count, seed),
        suite_soundness(count, seed),
        suite_tightness(size, perturb),
        suite_equality(max(count // 10, 10), seed),
    ]


def report(results) -> str:
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    lines.append(f"overall      {'PASS' if ok else 'FAIL'}")
    return "\n".join(lines) + "\n"
