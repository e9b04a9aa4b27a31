import math

import numpy as np
import pytest
from _oracles import exhaustive_min_guess_given_max, mp_family_point

import guessbound.bounds as bounds
from guessbound.bounds import (
    BoundSpec,
    CurveConsistencyError,
    MonotonicityError,
    advantage_bound,
    baseline_bounds,
    binary_bounds,
    binary_entropy,
    binary_first_order,
    curve,
    curve_delta_shannon,
    curve_minentropy,
    curve_rho_alpha,
    curve_rho_shannon,
    curve_shannon,
    first_order_bound,
    first_order_coefficient,
    first_order_expansion,
    generating_pmf,
    lower_bound_at,
    lower_bound_many,
    maxleakage_advantage_bounds,
    minentropy_bounds,
    minentropy_bounds_rho1,
    random_probing_bounds,
)
from guessbound.distributions import DiscreteChannel, OrderParams, Pmf, random_channel_batch
from guessbound.entropies import conditional_renyi_array, renyi_entropy
from guessbound.guesswork import conditional_guessing_moment_array, guessing_moment, uniform_moment

SHANNON = OrderParams(1.0, 1.0)
H_THIRD = -(1 / 3 * math.log(1 / 3) + 2 / 3 * math.log(2 / 3))


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def test_boundspec_validation():
    with pytest.raises(ValueError):
        BoundSpec(1, SHANNON)
    with pytest.raises(ValueError):
        BoundSpec(4, SHANNON, size=1)
    with pytest.raises(ValueError):
        BoundSpec(4, SHANNON, lo=0.5, hi=1.0)
    with pytest.raises(ValueError):
        BoundSpec(4, OrderParams(2.0, 1.0), lo=0.1, hi=0.6)
    g = BoundSpec(4, OrderParams(2.0, 1.0)).gamma_grid()
    assert np.all((g > 0) & (g < 0.5))


@pytest.mark.parametrize("M", [2, 8, 256])
def test_curve_shannon_corners(M):
    pts = curve_shannon(BoundSpec(M, SHANNON))
    assert pts[-1].H.nats == math.log(M) and pts[-1].G == (M + 1) / 2
    assert pts[0].H.nats == 0 and pts[0].G == 1
    H = [p.H.nats for p in pts]
    assert all(b >= a for a, b in zip(H, H[1:]))


def test_curve_shannon_half():
    pt = curve_shannon(BoundSpec(2, SHANNON, lo=0.5, hi=0.6, size=2), endpoints=False)[0]
    assert abs(pt.gamma - 0.5) <= 1e-15
    assert abs(pt.H.bits - 0.9182958340544896) <= 1e-12
    assert abs(pt.G - 4 / 3) <= 1e-12


def test_curve_shannon_matches_oracle():
    for M in (2, 8, 256):
        for pt in curve_shannon(BoundSpec(M, SHANNON, size=64), endpoints=False)[::7]:
            H, G, dH, dG = mp_family_point(1, 1, M, pt.gamma)
            assert rel(pt.H.nats, H) <= 1e-9 and rel(pt.G, G) <= 1e-9
            assert rel(pt.deltaH, dH) <= 1e-9 and rel(pt.deltaG, dG) <= 1e-9


def test_curve_delta_shannon_examples():
    spec = BoundSpec(8, SHANNON)
    far = curve_delta_shannon(spec, [50.0])[0]
    assert abs(far.deltaG - 3.5) <= 1e-12 and abs(far.deltaH - math.log(8)) <= 1e-12
    near = curve_delta_shannon(spec, [1e-9])[0]
    assert near.deltaG <= 1e-7 and near.deltaH <= 1e-15
    a = curve_delta_shannon(spec, [0.1])[0]
    b = curve_shannon(BoundSpec(8, SHANNON, lo=math.exp(-0.2), hi=math.exp(-0.1), size=2), endpoints=False)[0]
    assert abs(b.gamma - math.exp(-0.2)) <= 1e-15
    assert rel(a.deltaG, b.deltaG) <= 1e-9 and rel(a.deltaH, b.deltaH) <= 1e-9
    with pytest.raises(ValueError):
        curve_delta_shannon(spec, [0.0])


def test_reparameterization_identity():
    for M in (2, 5, 64):
        spec = BoundSpec(M, SHANNON, lo=math.exp(-30), hi=math.exp(-1e-5), size=97)
        pts = curve_shannon(spec, endpoints=False)
        mu = [-math.log(p.gamma) / 2 for p in pts]
        for a, b in zip(curve_delta_shannon(spec, mu), pts):
            assert rel(a.deltaG, b.deltaG) <= 1e-9 and rel(a.deltaH, b.deltaH) <= 1e-9


def test_curve_rho_shannon():
    a = curve_shannon(BoundSpec(16, SHANNON))
    b = curve_rho_shannon(BoundSpec(16, SHANNON))
    for p, q in zip(a, b):
        assert abs(p.H.nats - q.H.nats) <= 1e-12 and abs(p.G - q.G) <= 1e-12 * q.G
    spec = BoundSpec(5, OrderParams(1.0, 2.0))
    end = curve_rho_shannon(spec)[-1]
    assert end.G == uniform_moment(5, 2.0) and end.H.nats == math.log(5)
    pt = curve_rho_shannon(BoundSpec(3, OrderParams(1.0, 2.0), lo=0.5, hi=0.7, size=2), endpoints=False)[0]
    H, G, _, _ = mp_family_point(1, 2, 3, 0.5)
    assert rel(pt.H.nats, H) <= 1e-12 and rel(pt.G, G) <= 1e-12


def test_curve_rho_alpha_examples():
    for params in (OrderParams(0.5, 1.5), OrderParams(3.0, 0.5)):
        pts = curve_rho_alpha(BoundSpec(8, params))
        assert pts[-1].gamma == 0.0 and pts[-1].G == uniform_moment(8, params.rho)
        assert pts[0].H.nats == 0.0 and pts[0].G == 1.0
    for rho in (0.5, 1, 2):
        params = OrderParams(2.5, rho)
        for g in (2.0**-rho, 0.9):
            q = generating_pmf(params, 6, g)
            assert renyi_entropy(q, 2.5).nats == 0 and guessing_moment(q, rho).value == 1
    spec = BoundSpec(4, OrderParams(2.0, 1.0), lo=0.25, hi=0.3, size=2)
    pt = curve_rho_alpha(spec, endpoints=False)[-1]
    assert abs(pt.gamma - 0.25) <= 1e-15
    assert rel(pt.G, 5 / 3) <= 1e-12 and rel(pt.H.nats, math.log(36 / 14)) <= 1e-12
    q = Pmf([1 / 2, 1 / 3, 1 / 6, 0])
    assert rel(pt.H.nats, renyi_entropy(q, 2).nats) <= 1e-9 and rel(pt.G, guessing_moment(q).value) <= 1e-9


@pytest.mark.parametrize("alpha", [0.2, 1 / 3, 0.5, 0.8, 1.25, 2.0, 4.0, 10.0])
@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_curve_rho_alpha_matches_oracle(alpha, rho):
    for M in (2, 8, 32):
        pts = curve_rho_alpha(BoundSpec(M, OrderParams(alpha, rho), size=48), endpoints=False)
        for pt in pts[::5]:
            H, G, dH, dG = mp_family_point(alpha, rho, M, pt.gamma)
            assert rel(pt.H.nats, H) <= 1e-9 and rel(pt.G, G) <= 1e-9
            assert rel(pt.deltaH, dH) <= 1e-8 and rel(pt.deltaG, dG) <= 1e-8


def test_curve_dispatch():
    assert curve(BoundSpec(4, OrderParams(math.inf, 1.0), size=5))[0].G == 1.0
    assert len(curve(BoundSpec(4, SHANNON, size=5))) == 7
    assert len(curve_rho_alpha(BoundSpec(4, OrderParams(1.0, 2.0), size=5))) == 7


def test_consistency_check_raises(monkeypatch):
    real = bounds._family_stats

    def skewed(*a):
        H, dH, G, dG = real(*a)
        return H, dH, G * (1 + 1e-6), dG

    monkeypatch.setattr(bounds, "_family_stats", skewed)
    with pytest.raises(CurveConsistencyError):
        curve_rho_alpha(BoundSpec(4, OrderParams(2.0, 1.0), size=8))


def test_monotonicity_assertion(monkeypatch):
    real = bounds._family_stats

    def wiggly(M, regime, alpha, rho, t):
        H, dH, G, dG = real(M, regime, alpha, rho, t)
        return H, dH + 0.01 * np.sin(40 * np.asarray(t)), G, dG

    monkeypatch.setattr(bounds, "_family_stats", wiggly)
    with pytest.raises(MonotonicityError):
        bounds._assert_monotone.__wrapped__(8, "low", 0.5, 1.0)


def test_lower_bound_at_examples():
    spec = BoundSpec(2, SHANNON)
    assert lower_bound_at(spec, math.log(2)) == 1.5
    assert lower_bound_at(spec, 0.0) == 1.0
    assert abs(lower_bound_at(spec, H_THIRD) - 4 / 3) <= 1e-12
    with pytest.raises(ValueError):
        lower_bound_at(spec, math.log(2) + 1e-6)
    with pytest.raises(ValueError):
        lower_bound_at(spec, -1e-6)


@pytest.mark.parametrize("alpha", [1 / 3, 0.5, 1.0, 2.0, 4.0, math.inf])
@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0])
def test_inversion_round_trip(alpha, rho):
    params = OrderParams(alpha, rho)
    pts = curve(BoundSpec(16, params, size=64))
    # from H only away from the uniform corner: there H carries an absolute
    # rounding error that the infinite slope of the curve amplifies
    far = [p for p in pts if p.deltaH > 1e-6]
    G = lower_bound_many(16, params, np.array([p.H.nats for p in far]))
    for g, p in zip(G, far):
        assert abs(g - p.G) <= 1e-9 * p.G
    dG = advantage_bound(16, params, np.array([p.deltaH for p in pts]))
    for g, p in zip(dG, pts):
        assert abs(g - p.deltaG) <= 1e-9 * max(p.deltaG, 1e-300) + 1e-15


def test_first_order():
    assert first_order_bound(8, OrderParams(2.0), 0.0) == 0.0
    for M in (2, 8, 256):
        for a in (0.5, 1.0, 3.0):
            c = first_order_coefficient(M, OrderParams(a, 1.0))
            assert rel(c, math.sqrt((M * M - 1) / (6 * a))) <= 1e-12
    assert rel(first_order_coefficient(2, SHANNON), math.sqrt(0.5)) <= 1e-15
    assert binary_first_order(SHANNON, 0.01).upper == pytest.approx(math.sqrt(0.5) * 0.1, rel=1e-15)
    assert first_order_coefficient(8, OrderParams(math.inf)) == 0.0


def test_first_order_expansion_leading_terms():
    for params in (OrderParams(0.5, 1.0), OrderParams(2.0, 2.0), SHANNON):
        g = 1 - 1e-5 if params.is_shannon else 1e-5
        dG, dH = first_order_expansion(8, params, g)
        H, G, exact_dH, exact_dG = mp_family_point(params.alpha, params.rho, 8, g)
        assert rel(dG, exact_dG) <= 1e-3 and rel(dH, exact_dH) <= 1e-3


def test_first_order_within_two_percent():
    for alpha in (1 / 3, 0.5, 2.0, 4.0):
        for rho in (0.5, 1.0, 2.0):
            for M in (2, 8, 32):
                params = OrderParams(alpha, rho)
                c = first_order_coefficient(M, params)
                pts = [p for p in curve_rho_alpha(BoundSpec(M, params), endpoints=False) if 1e-14 < p.deltaH < 1e-4]
                assert pts
                for p in pts:
                    assert abs(p.deltaG / (c * math.sqrt(p.deltaH)) - 1) <= 0.02


def test_binary_examples():
    for rho in (0.5, 1.0, 2.0):
        for alpha in (0.5, 1.0, 2.0):
            lo, hi = binary_bounds(OrderParams(alpha, rho), math.log(2))
            assert abs(lo - (1 + (2**rho - 1) / 2)) <= 1e-12 and abs(hi - lo) <= 1e-12
            assert binary_bounds(OrderParams(alpha, rho), 0.0).lower == 1.0
    lo, _ = binary_bounds(OrderParams(2.0, 1.0), -math.log(5 / 8))
    assert abs(lo - 1.25) <= 1e-12
    assert abs(binary_entropy(0.25, 2.0) + math.log(5 / 8)) <= 1e-15
    with pytest.raises(ValueError):
        binary_bounds(SHANNON, 0.8)


def test_binary_upper_is_sound():
    rng = np.random.default_rng(1)
    for alpha in (1 / 3, 0.5, 1.0, 2.0, 4.0):
        w, post = random_channel_batch(2, 2000, 4, seed=rng)
        H = np.clip(conditional_renyi_array(w, post, alpha), 0, math.log(2))
        G = conditional_guessing_moment_array(w, post, 1.0)
        for h, g in zip(H, G):
            lo, hi = binary_bounds(OrderParams(alpha, 1.0), float(h))
            assert lo - 1e-9 <= g <= hi + 1e-9


def test_binary_first_order_limit():
    lo1 = binary_first_order(SHANNON, 1e-3).lower
    lo_near = binary_first_order(OrderParams(1 + 1e-4, 1.0), 1e-3).lower
    assert abs(lo1 - lo_near) <= 1e-6
    assert abs(lo1 - 0.5 * 1e-3 / math.log(2)) <= 1e-15


def test_minentropy_examples():
    assert minentropy_bounds(5, 1.5, 0.0) == (1.0, 1.0)
    for M in (2, 4, 9):
        lo, hi = minentropy_bounds(M, 1.0, math.log(M))
        assert abs(lo - (M + 1) / 2) <= 1e-12 and abs(hi - (M + 1) / 2) <= 1e-12
    lo, hi = minentropy_bounds(4, 1.0, -math.log(0.4))
    assert abs(lo - 1.8) <= 1e-12 and abs(hi - 2.2) <= 1e-12
    assert abs(exhaustive_min_guess_given_max(4, 0.4) - 1.8) <= 1e-12
    r1 = minentropy_bounds_rho1(4, -math.log(0.4))
    assert abs(r1.lower - 1.8) <= 1e-12 and abs(r1.upper - 2.2) <= 1e-12
    with pytest.raises(ValueError):
        minentropy_bounds(4, 1.0, math.log(4) + 1e-3)


def test_minentropy_rho1_forms_agree():
    for M in (3, 8, 50):
        for h in np.linspace(0, math.log(M), 23):
            a, b = minentropy_bounds(M, 1.0, float(h)), minentropy_bounds_rho1(M, float(h))
            assert abs(a.lower - b.lower) <= 1e-12 * M and abs(a.upper - b.upper) <= 1e-12 * M


def test_minentropy_matches_exhaustive_search():
    for K in (0.3, 0.45, 0.6, 0.8):
        for rho in (1.0, 2.0):
            lo = minentropy_bounds(4, rho, -math.log(K)).lower
            assert abs(exhaustive_min_guess_given_max(4, K, rho, steps=60) - lo) <= 1e-9


def test_maxleakage():
    lo, hi = maxleakage_advantage_bounds(8, 0.05)
    assert abs(lo - math.expm1(0.05) / 2) <= 1e-16 and abs(hi - 7 * math.expm1(0.05) / 2) <= 1e-15
    assert maxleakage_advantage_bounds(8, 0.05, first_order=True) == (0.025, 7 * 0.025)
    with pytest.raises(ValueError):
        maxleakage_advantage_bounds(8, 1.0)


def test_minentropy_curve_vs_large_alpha():
    for M in (2, 8, 32):
        for rho in (0.5, 1.0, 2.0):
            for p in curve_rho_alpha(BoundSpec(M, OrderParams(1e6, rho)), endpoints=False):
                assert abs(p.G - minentropy_bounds(M, rho, p.H.nats).lower) <= 1e-4
    pts = curve_minentropy(BoundSpec(8, OrderParams(math.inf, 1.0), size=9))
    assert pts[0].H.nats == 0 and pts[0].G == 1.0
    assert abs(pts[-1].H.nats - math.log(8)) <= 1e-15 and abs(pts[-1].G - 4.5) <= 1e-14


def test_baselines():
    for M in (2, 16, 256):
        assert abs(baseline_bounds(M, math.log(M), "mceliece_yu") - (M + 1) / 2) <= 1e-12
    assert baseline_bounds(256, 0.0, "massey") == 1.0
    assert baseline_bounds(256, 0.0, "rioul") == 1.0
    assert baseline_bounds(256, 3 * math.log(2), "massey") == 3.0
    ratio = 128.5 / baseline_bounds(256, math.log(256), "rioul")
    assert 1.3 < ratio < 1.4
    assert baseline_bounds(16, 2.5, "arikan", rho=1.0, alpha=0.5) == pytest.approx(math.exp(2.5) / (1 + math.log(16)))
    assert baseline_bounds(16, 1.0, "arikan", rho=1.0, alpha=0.5) == 1.0
    with pytest.raises(ValueError):
        baseline_bounds(16, 1.0, "arikan", rho=1.0, alpha=1.0)
    with pytest.raises(ValueError):
        baseline_bounds(16, 1.0, "guess")


def test_mceliece_yu_sandwich():
    for M in (2, 4, 8, 16):
        w, post = random_channel_batch(M, 3000, 6, seed=M, concentrations=(1.0, 0.2))
        H = np.clip(conditional_renyi_array(w, post, 1.0), 0, math.log(M))
        G = conditional_guessing_moment_array(w, post, 1.0)
        L = lower_bound_many(M, SHANNON, H)
        U = np.array([baseline_bounds(M, float(h), "mceliece_yu") for h in H])
        assert np.all(L <= G + 1e-9) and np.all(G <= U + 1e-9)


def test_random_probing_bounds():
    for M in (4, 32):
        for alpha in (0.25, 0.5, 1.0, 2.0, math.inf):
            assert random_probing_bounds(M, alpha, 0.0) == pytest.approx((1.0, 1.0), abs=1e-12)
            lo, hi = random_probing_bounds(M, alpha, math.log(M))
            assert abs(lo - (M + 1) / 2) <= 1e-12 and abs(hi - (M + 1) / 2) <= 1e-12
        for h in (0.3, 1.0, 1.3):
            lo, hi = random_probing_bounds(M, 0.5, h)
            assert lo == hi == (1 + math.exp(h)) / 2
            assert abs(lo - (1 + (M - 1) / 2 * math.expm1(h) / (M - 1))) <= 1e-12
            lo, hi = random_probing_bounds(M, 1.0, h)
            assert abs(hi - (1 + (M - 1) / 2 * h / math.log(M))) <= 1e-12 and lo <= hi
            lo, hi = random_probing_bounds(M, 0.25, h)
            assert lo <= hi + 1e-12


def test_soundness_small_sweep():
    for M in (2, 4, 8, 16):
        w, post = random_channel_batch(M, 1500, 8, seed=100 + M, concentrations=(1.0, 0.3, 0.1))
        for alpha in (1 / 3, 0.5, 1.0, 2.0, math.inf):
            H = np.clip(conditional_renyi_array(w, post, alpha), 0, math.log(M))
            for rho in (0.5, 1.0, 2.0):
                G = conditional_guessing_moment_array(w, post, rho)
                assert np.min(G - lower_bound_many(M, OrderParams(alpha, rho), H)) >= -1e-9


def test_equality_channels_sit_on_curve():
    # a channel whose posteriors are all the same generating pmf lies on the curve
    for params in (OrderParams(0.5, 1.0), OrderParams(2.0, 2.0), OrderParams(1.0, 0.5)):
        for p in curve(BoundSpec(6, params, size=20))[1:-1:4]:
            q = generating_pmf(params, 6, p.gamma)
            ch = DiscreteChannel([0.5, 0.5], [q.probs, q.probs[::-1]])
            h = float(conditional_renyi_array(ch.weights, ch.posteriors, params.alpha))
            g = float(conditional_guessing_moment_array(ch.weights, ch.posteriors, params.rho))
            assert abs(g - lower_bound_many(6, params, h)) <= 1e-9 * g
