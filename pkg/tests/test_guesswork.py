import math

import numpy as np
import pytest
from _oracles import brute_force_guessing, mp_uniform_moment

from guessbound.distributions import DiscreteChannel, Pmf, random_channel, random_pmf
from guessbound.guesswork import (
    conditional_guessing_moment,
    guessing_advantage,
    guessing_moment,
    rank_moment_variance,
    rank_power_prefix,
    uniform_moment,
)


def test_guessing_moment_examples():
    assert guessing_moment(Pmf.uniform(9)).value == 5.0
    for rho in (0.5, 1, 3):
        assert guessing_moment(Pmf.dirac(6, 4), rho).value == 1.0
    assert abs(guessing_moment(Pmf([0.2, 0.5, 0.3])).value - 1.7) <= 1e-15
    assert abs(brute_force_guessing([0.2, 0.5, 0.3]) - 1.7) <= 1e-15
    with pytest.raises(ValueError):
        guessing_moment(Pmf.uniform(3), 0.0)


def test_ties_and_permutation_invariance():
    p = np.array([0.1, 0.3, 0.3, 0.2, 0.1])
    rng = np.random.default_rng(0)
    ref = guessing_moment(Pmf(p), 1.3).value
    for _ in range(20):
        assert guessing_moment(Pmf(rng.permutation(p)), 1.3).value == ref


def test_brute_force_small():
    for seed in range(200):
        M = 2 + seed % 5
        p = random_pmf(M, seed=seed)
        for rho in (0.5, 1.0, 2.0):
            assert abs(guessing_moment(p, rho).value - brute_force_guessing(p.probs, rho)) <= 1e-12


def test_conditional_examples():
    p = Pmf([0.1, 0.6, 0.3])
    assert conditional_guessing_moment(DiscreteChannel.no_leakage(p)).value == guessing_moment(p).value
    perfect = DiscreteChannel(np.full(5, 0.2), np.eye(5))
    assert conditional_guessing_moment(perfect, 2.0).value == 1.0
    ch = DiscreteChannel([0.5, 0.5], [[1, 0, 0], [1 / 3, 1 / 3, 1 / 3]])
    assert abs(conditional_guessing_moment(ch).value - 1.5) <= 1e-15


def test_uniform_moment():
    assert uniform_moment(2, 2) == 2.5
    assert uniform_moment(256, 1) == 128.5
    assert abs(uniform_moment(8, 1.5) - float(mp_uniform_moment(8, 1.5))) <= 1e-14
    for M in (3, 17, 1000):
        assert abs(uniform_moment(M, 2) - float(mp_uniform_moment(M, 2))) <= 1e-12 * M**2


def test_prefix_sums_large_M():
    M = 2**20
    pre = rank_power_prefix(M, 1.0)
    assert pre[-1] == M * (M + 1) / 2
    assert abs(pre[-1] / M - float(mp_uniform_moment(M, 1.0))) <= 1e-12 * M


def test_guessing_advantage():
    assert guessing_advantage(DiscreteChannel.no_leakage(Pmf.uniform(7))) == 0.0
    perfect = DiscreteChannel(np.full(256, 1 / 256), np.eye(256))
    assert guessing_advantage(perfect) == 127.5


def test_conditioning_helps_the_guesser():
    for seed in range(300):
        ch = random_channel(6, 3, seed=seed)
        for rho in (0.5, 1.0, 2.0):
            assert conditional_guessing_moment(ch, rho).value <= guessing_moment(ch.marginal(), rho).value + 1e-10


def test_monotone_in_rho():
    for seed in range(100):
        p = random_pmf(5, seed=seed)
        vals = [guessing_moment(p, r).value for r in (0.25, 0.5, 1, 2, 3)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("M", [2, 8, 256])
def test_rank_variance_rho1(M):
    assert abs(rank_moment_variance(M, 1.0) - (M * M - 1) / 12) <= 1e-12 * M * M
    assert abs(uniform_moment(M, 2) - uniform_moment(M, 1) ** 2 - (M * M - 1) / 12) <= 1e-12 * M * M
    assert math.isclose(rank_moment_variance(M, 1.0), (M * M - 1) / 12, rel_tol=1e-14)
