import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszprob import (
    BlowupError,
    CondExp,
    Partition,
    RangeError,
    Space,
    e_norm,
    level_projection,
    lln_deviation,
    make_bernoulli,
    partial_sum,
    payoff_distribution,
    poisson_limit,
    poisson_scheme,
    process_variance,
    q_j_projection,
    weak_lln_term,
)
from rieszprob.bernoulli import martingale_means_hold, q_family_partitions_identity


def one_atom(p, exact=True):
    base = Space([1], exact=exact)
    T = CondExp.expectation(base)
    return base, T, base.constant(p)


def two_blocks(p1, p2, weights=(1, 2, 3)):
    base = Space(list(weights))
    T = CondExp(Partition(base, [0, 0, 1]))
    return base, T, base.element([p1, p1, p2])


def enumerate_level(n, p, j):
    """Sum of outcome probabilities over {0,1}^n with exactly j ones."""
    total = F(0)
    for eps in itertools.product((0, 1), repeat=n):
        if sum(eps) == j:
            w = F(1)
            for bit in eps:
                w *= p if bit else 1 - p
            total += w
    return total


def test_enumeration_oracle_sanity():
    assert enumerate_level(2, F(1, 2), 1) == F(1, 2)
    assert sum(enumerate_level(5, F(1, 3), j) for j in range(6)) == 1


def test_make_bernoulli_examples():
    base, T, f = one_atom(F(1, 2))
    proc = make_bernoulli(base, T, f, 1)
    assert proc.realized_space.atom_count == 2
    assert proc.projections[0].mask.tolist() == (proc.counts == 1).tolist()

    agg = make_bernoulli(base, T, f, 10, "aggregated")
    assert agg.realized_space.atom_count == 11
    assert agg.realized_space.weights.tolist() == [F(math.comb(10, j), 1024) for j in range(11)]
    assert sum(agg.realized_space.weights) == 1


def test_make_bernoulli_errors():
    base, T, f = one_atom(F(1, 2))
    with pytest.raises(BlowupError):
        make_bernoulli(base, T, f, 21)
    with pytest.raises(ValueError):
        make_bernoulli(base, T, base.constant(2), 3)
    with pytest.raises(ValueError):
        make_bernoulli(base, T, f, 3, "sparse")
    base2 = Space.uniform(2)
    with pytest.raises(RangeError):
        make_bernoulli(base2, CondExp.expectation(base2), base2.element([0, 1]), 2)


def test_partial_sum_examples():
    base, T, f = one_atom(F(1, 2))
    proc = make_bernoulli(base, T, f, 1)
    assert partial_sum(proc) == proc.projections[0].indicator()
    certain = make_bernoulli(*one_atom(F(1)), 4)
    assert partial_sum(certain) == certain.realized_space.constant(4)
    for rep in ("full", "aggregated"):
        proc = make_bernoulli(*one_atom(F(1, 3)), 5, rep)
        assert proc.cond(partial_sum(proc)) == proc.realized_space.constant(F(5, 3))


def test_payoff_examples():
    proc = make_bernoulli(*one_atom(F(1, 2)), 2)
    assert payoff_distribution(proc, 1) == proc.realized_space.constant(F(1, 2))
    proc = make_bernoulli(*one_atom(F(1)), 3)
    assert payoff_distribution(proc, 3) == proc.realized_space.unit()
    with pytest.raises(ValueError):
        payoff_distribution(proc, 4)


@pytest.mark.parametrize("rep", ["full", "aggregated"])
def test_payoff_two_blocks_n6(rep):
    base, T, f = two_blocks(F(1, 3), F(2, 3))
    proc = make_bernoulli(base, T, f, 6, rep)
    got = proc.to_base(payoff_distribution(proc, 2))
    expected = [enumerate_level(6, F(1, 3), 2)] * 2 + [enumerate_level(6, F(2, 3), 2)]
    assert got.tolist() == expected
    assert expected == [F(80, 243), F(80, 243), F(20, 243)]


def test_full_and_aggregated_agree_n8():
    base, T, f = two_blocks(F(1, 4), F(3, 5))
    full = make_bernoulli(base, T, f, 8, "full")
    agg = make_bernoulli(base, T, f, 8, "aggregated")
    for j in range(9):
        assert full.to_base(payoff_distribution(full, j)) == agg.to_base(payoff_distribution(agg, j))


def test_level_distribution_sums_to_unit():
    base, T, f = two_blocks(F(1, 3), F(1, 2))
    for rep, n in (("full", 7), ("aggregated", 40)):
        proc = make_bernoulli(base, T, f, n, rep)
        total = proc.realized_space.zero()
        for j in range(n + 1):
            total = total + payoff_distribution(proc, j)
        assert total == proc.realized_space.unit()


def test_level_projection_matches_counts():
    proc = make_bernoulli(*two_blocks(F(1, 3), F(2, 3)), 5)
    for j in range(6):
        assert level_projection(proc, j).mask.tolist() == [int(c) == j for c in proc.counts]


def test_q_j_examples():
    proc = make_bernoulli(*one_atom(F(1, 2)), 1)
    P1 = proc.projections[0]
    assert q_j_projection(proc, 0) == P1.complement()
    assert q_j_projection(proc, 1) == P1

    proc = make_bernoulli(*one_atom(F(1, 2)), 3)
    qs = [q_j_projection(proc, j) for j in range(4)]
    assert q_family_partitions_identity(qs)
    S = partial_sum(proc)
    for j, Q in enumerate(qs):
        assert Q(S) == Q.indicator().scale(j)


@pytest.mark.parametrize("n", range(1, 7))
def test_q_j_equals_level_set_oracle(n):
    proc = make_bernoulli(*one_atom(F(2, 5)), n)
    masks = np.array([P.mask for P in proc.projections]).T
    for j in range(n + 1):
        oracle = [int(row.sum()) == j for row in masks]
        assert q_j_projection(proc, j).mask.tolist() == oracle


def test_q_j_guards():
    with pytest.raises(ValueError):
        q_j_projection(make_bernoulli(*one_atom(F(1, 2)), 3, "aggregated"), 1)
    with pytest.raises(BlowupError):
        q_j_projection(make_bernoulli(*one_atom(F(1, 2)), 9), 1)


def test_process_variance_examples():
    proc = make_bernoulli(*one_atom(F(1, 2)), 2)
    assert process_variance(proc) == proc.realized_space.constant(F(1, 2))
    for p in (F(0), F(1)):
        proc = make_bernoulli(*one_atom(p), 5)
        assert process_variance(proc) == proc.realized_space.zero()
    for rep in ("full", "aggregated"):
        proc = make_bernoulli(*one_atom(F(1, 3)), 7, rep)
        assert process_variance(proc) == proc.realized_space.constant(F(14, 9))


def test_lln_examples():
    for p in (F(0), F(1)):
        chk = lln_deviation(make_bernoulli(*one_atom(p), 6, "aggregated"), F(1, 10))
        assert chk.holds and chk.lhs == chk.lhs.space.zero()
    chk = lln_deviation(make_bernoulli(*one_atom(F(1, 2)), 4, "aggregated"), F(1, 4))
    assert chk.lhs == chk.lhs.space.constant(F(1, 8))
    assert chk.bound == chk.lhs.space.unit()
    assert chk.holds


def test_lln_decays_float():
    lhs = []
    for n in (10, 100, 1000, 10000):
        chk = lln_deviation(make_bernoulli(*one_atom(0.5, exact=False), n, "aggregated"), 0.1)
        assert chk.holds
        lhs.append(float(chk.lhs.coords[0]))
    assert all(b < a for a, b in zip(lhs, lhs[1:]))
    assert lhs[0] == pytest.approx(0.34375, rel=1e-12)


def test_weak_lln_examples():
    for p in (F(0), F(1)):
        proc = make_bernoulli(*one_atom(p), 3, "aggregated")
        assert weak_lln_term(proc) == proc.realized_space.zero()
    proc = make_bernoulli(*one_atom(F(1, 2)), 2, "aggregated")
    assert weak_lln_term(proc) == proc.realized_space.constant(F(1, 4))


def test_weak_lln_decay_float():
    vals = []
    for n in (10, 100, 1000, 10000):
        v = float(weak_lln_term(make_bernoulli(*one_atom(0.5, exact=False), n, "aggregated")).coords[0])
        assert v <= math.sqrt(0.25 / n) + 1e-10
        vals.append(v)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_martingale_means():
    assert martingale_means_hold(make_bernoulli(*two_blocks(F(1, 3), F(3, 4)), 4))


def test_poisson_examples():
    base, T, _ = one_atom(F(1))
    assert poisson_scheme(base, T, base.zero(), 5, 0) == base.unit()
    assert poisson_scheme(base, T, base.unit(), 2, 1, "full") == base.constant(F(1, 2))
    assert poisson_limit(base.zero(), 0) == base.unit()
    assert poisson_limit(base.zero(), 3) == base.zero()
    fbase = Space([1.0], exact=False)
    assert float(poisson_limit(fbase.unit(), 2).coords[0]) == pytest.approx(math.exp(-1) / 2, rel=1e-15)


def test_poisson_large_n_float():
    base = Space([1.0], exact=False)
    T = CondExp.expectation(base)
    val = poisson_scheme(base, T, base.unit(), 10_000, 1)
    assert abs(float(val.coords[0]) - math.exp(-1)) < 1e-4


def test_poisson_errors():
    base, T, _ = one_atom(F(1))
    with pytest.raises(ValueError):
        poisson_scheme(base, T, base.constant(3), 2, 1)
    with pytest.raises(ValueError):
        poisson_scheme(base, T, base.unit(), 2, 3)
    with pytest.raises(ValueError):
        poisson_limit(base.constant(-1), 1)


def test_float_aggregated_weights_normalised():
    base = Space([0.3, 0.7], exact=False)
    T = CondExp(Partition.discrete(base))
    proc = make_bernoulli(base, T, base.element([0.5, 0.01]), 10_000, "aggregated")
    for b, W in enumerate((0.3, 0.7)):
        assert proc.realized_space.weights[proc.t_block == b].sum() == pytest.approx(W, abs=1e-12)


@given(
    st.fractions(0, 1, max_denominator=5),
    st.fractions(0, 1, max_denominator=5),
    st.integers(1, 9),
)
def test_representations_agree(p1, p2, n):
    base, T, f = two_blocks(p1, p2)
    full = make_bernoulli(base, T, f, n, "full")
    agg = make_bernoulli(base, T, f, n, "aggregated")
    for j in range(n + 1):
        assert full.to_base(payoff_distribution(full, j)) == agg.to_base(payoff_distribution(agg, j))
    assert full.to_base(process_variance(full)) == agg.to_base(process_variance(agg))
    assert full.to_base(weak_lln_term(full)) == agg.to_base(weak_lln_term(agg))


def test_poisson_block_valued_g_converges():
    base = Space([1.0, 2.0, 1.0], exact=False)
    T = CondExp(Partition(base, [0, 1, 2]))
    g = base.element([0.5, 2.0, 4.0])
    for j in range(6):
        limit = poisson_limit(g, j)
        gaps = [e_norm(poisson_scheme(base, T, g, n, j) - limit) for n in (100, 1000, 10000)]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-4
