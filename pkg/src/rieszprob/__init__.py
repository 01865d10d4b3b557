"""Measure-free probability on finite-dimensional Riesz spaces.

Conditional expectations, independence, variance and Bernoulli processes on
weighted atom spaces, with exact rational identities and float limit
experiments.
"""

from .bernoulli import (
    BernoulliProcess,
    BlowupError,
    level_projection,
    lln_deviation,
    make_bernoulli,
    partial_sum,
    payoff_closed_form,
    payoff_distribution,
    poisson_limit,
    poisson_scheme,
    process_variance,
    q_j_projection,
    weak_lln_term,
)
from .conditional import (
    CondExp,
    Partition,
    RangeError,
    apply,
    check_averaging,
    commutes,
    conditional_jensen_check,
    is_in_range,
    radon_nikodym,
)
from .independence import (
    IndependenceError,
    are_independent_projections,
    are_independent_subspaces,
    extend_with_independent_events,
    generated_partition,
    pairwise_product_rule,
)
from .lattice import (
    BandProjection,
    Element,
    IncompatibleElementsError,
    Space,
    band_projection_of,
    e_norm,
    exp_neg,
    exp_neg_limit,
    functional_calculus,
    lattice_combine,
    multiply,
)
from .stats import VarianceReport, bienayme, cross_term, tchebichev, variance

__version__ = "0.1.0"
