"""Guessing moments versus Rényi entropies: optimal bounds and leakage models."""

from .distributions import (
    DiscreteChannel,
    OrderParams,
    Pmf,
    escort,
    gibbs_family_high_alpha,
    gibbs_family_low_alpha,
    random_channel,
    random_pmf,
    sort_decreasing,
    truncated_geometric,
)
from .entropies import (
    EntropyValue,
    NearShannonWarning,
    conditional_k_alpha,
    conditional_renyi,
    gibbs_rhs,
    info_advantage,
    k_alpha,
    renyi_entropy,
)
from .guesswork import (
    GuessingMoment,
    conditional_guessing_moment,
    guessing_advantage,
    guessing_moment,
    uniform_moment,
)

__version__ = "0.1.0"
