from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from rieszprob import CondExp, Partition, Space

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


rationals = st.fractions(min_value=-8, max_value=8, max_denominator=7)
positive_rationals = st.fractions(min_value=Fraction(1, 7), max_value=9, max_denominator=7)
probabilities = st.fractions(min_value=0, max_value=1, max_denominator=6)


@st.composite
def spaces(draw, max_atoms=8, min_atoms=1):
    m = draw(st.integers(min_atoms, max_atoms))
    return Space(draw(st.lists(positive_rationals, min_size=m, max_size=m)))


@st.composite
def operators(draw, max_atoms=8, max_blocks=4, min_atoms=1):
    """A conditional expectation on a random space."""
    sp = draw(spaces(max_atoms=max_atoms, min_atoms=min_atoms))
    r = draw(st.integers(1, min(max_blocks, sp.atom_count)))
    block_of = draw(st.lists(st.integers(0, r - 1), min_size=sp.atom_count, max_size=sp.atom_count))
    return CondExp(Partition(sp, block_of))


def elements_of(space, values=rationals):
    return st.lists(values, min_size=space.atom_count, max_size=space.atom_count).map(space.element)


def block_constant_of(T, values=rationals):
    n = T.partition.n_blocks
    return st.lists(values, min_size=n, max_size=n).map(
        lambda vs: T.space.element([vs[b] for b in T.partition.block_of])
    )


def matrix_of(T):
    """Dense matrix of ``T`` built straight from the averaging formula."""
    w = T.space.weights
    blk = T.partition.block_of
    m = T.space.atom_count
    rows = []
    for i in range(m):
        den = sum(w[k] for k in range(m) if blk[k] == blk[i])
        rows.append([w[j] / den if blk[j] == blk[i] else Fraction(0) for j in range(m)])
    return rows


def matvec(M, coords):
    return [sum(a * b for a, b in zip(row, coords)) for row in M]


@pytest.fixture
def F():
    return Fraction
