"""Bernoulli processes: payoff distribution, variance, laws of large numbers, Poisson limit.

A process is realised in one of two ways.  The ``full`` representation
builds the product space with ``2^n`` outcomes per base atom and carries the
band projections ``P_k`` themselves.  The ``aggregated`` representation keeps
one atom per (``T``-block, success count) pair, which is enough for any
statistic that is a function of ``S_n`` and scales to ``n = 10^4``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import _kernels
from .conditional import CondExp, Partition, RangeError
from .independence import (
    IndependentExtension,
    Provenance,
    _check_probability_element,
    extend_with_independent_events,
    generated_partition,
)
from .lattice import BandProjection, Element, Space, _check_same, band_projection_of, exp_neg, multiply
from .stats import variance

MAX_FULL_N = 20
MAX_PERMUTATION_N = 8
REPRESENTATIONS = ("full", "aggregated")


class BlowupError(ValueError):
    """The requested full representation would be too large to build."""


class BoundCheck(NamedTuple):
    lhs: Element
    bound: Element
    holds: bool


@dataclass(frozen=True, eq=False)
class BernoulliProcess:
    base: Space
    T: CondExp
    f: Element
    n: int
    representation: str
    realized_space: Space
    cond: CondExp
    counts: np.ndarray
    t_block: np.ndarray
    base_atom: np.ndarray | None = None
    projections: tuple[BandProjection, ...] | None = None
    provenance: Provenance | None = None

    def lift(self, x: Element) -> Element:
        """Carry a base element into the realised space.

        The aggregated space forgets atoms inside a ``T``-block, so there only
        elements of ``R(T)`` can be lifted.
        """
        _check_same(self.base, x.space)
        if self.base_atom is not None:
            return Element(self.realized_space, x.coords[self.base_atom])
        values = np.array(self.T.partition.block_values(x), dtype=self.base.dtype)
        return Element(self.realized_space, values[self.t_block])

    def block_values(self, x: Element) -> tuple:
        """Per-``T``-block values of an element of ``R(T')``."""
        _check_same(self.realized_space, x.space)
        if not self.cond.partition.is_constant(x):
            raise RangeError("element is not in the range of the realised conditional expectation")
        first = [int(np.flatnonzero(self.t_block == b)[0]) for b in range(self.T.partition.n_blocks)]
        return tuple(x.coords[i] for i in first)

    def to_base(self, x: Element) -> Element:
        """Pull an element of ``R(T')`` back to the base space."""
        values = np.array(self.block_values(x), dtype=self.base.dtype)
        return Element(self.base, values[self.T.partition.block_of])


def make_bernoulli(base: Space, T: CondExp, f: Element, n: int, representation: str = "full") -> BernoulliProcess:
    """Build a Bernoulli process with conditional success probability ``f``."""
    _check_same(base, T.space)
    _check_same(base, f.space)
    if representation not in REPRESENTATIONS:
        raise ValueError(f"representation must be one of {REPRESENTATIONS}, got {representation!r}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    _check_probability_element(T, f)

    if representation == "full":
        if n > MAX_FULL_N:
            raise BlowupError(f"full representation needs 2^{n} outcomes per atom; limit is n <= {MAX_FULL_N}")
        ext = extend_with_independent_events(base, T, f, n)
        proc = _from_extension(ext, f, n)
        e = proc.realized_space.unit()
        lifted = proc.lift(f)
        for P in proc.projections:
            if not proc.cond(P(e)).agrees(lifted):
                raise ArithmeticError("constructed events do not have conditional mean f")
    else:
        proc = _aggregated(base, T, f, n)
        if not proc.cond(partial_sum(proc)).agrees(proc.lift(f).scale(n)):
            raise ArithmeticError("aggregated process does not have conditional mean n f")
    return proc


def _from_extension(ext: IndependentExtension, f: Element, n: int) -> BernoulliProcess:
    counts = ext.outcomes.sum(axis=1).astype(np.int64)
    t_block = ext.base_cond.partition.block_of[ext.base_atom]
    return BernoulliProcess(
        base=ext.base,
        T=ext.base_cond,
        f=f,
        n=n,
        representation="full",
        realized_space=ext.space,
        cond=ext.cond,
        counts=counts,
        t_block=t_block,
        base_atom=ext.base_atom,
        projections=ext.projections,
        provenance=ext.provenance,
    )


def _binomial_weights_exact(n: int, p: Fraction) -> list:
    q = 1 - p
    return [math.comb(n, j) * p**j * q ** (n - j) for j in range(n + 1)]


def _binomial_weights_float(n: int, p: float) -> np.ndarray:
    logpmf = _kernels.log_binomial_pmf(n, p)
    pmf = np.exp(logpmf - logpmf.max())
    return pmf / pmf.sum()


def _aggregated(base: Space, T: CondExp, f: Element, n: int) -> BernoulliProcess:
    part = T.partition
    probs = part.block_values(f)
    weights, counts, t_block = [], [], []
    for b in range(part.n_blocks):
        W = T.block_weights[b]
        if base.exact:
            pmf = _binomial_weights_exact(n, probs[b])
        else:
            pmf = _binomial_weights_float(n, float(probs[b]))
        for j in range(n + 1):
            # the product, not pmf[j], decides: W * pmf[j] can underflow to zero
            w = W * pmf[j]
            if w > 0:
                weights.append(w)
                counts.append(j)
                t_block.append(b)
    space = Space(weights if base.exact else np.array(weights, dtype=np.float64), exact=base.exact)
    t_block = np.array(t_block, dtype=np.int64)
    return BernoulliProcess(
        base=base,
        T=T,
        f=f,
        n=n,
        representation="aggregated",
        realized_space=space,
        cond=CondExp(Partition(space, t_block)),
        counts=np.array(counts, dtype=np.int64),
        t_block=t_block,
    )


def partial_sum(proc: BernoulliProcess) -> Element:
    """``S_n = sum_k P_k e``, the number of successes on each atom."""
    space = proc.realized_space
    if space.exact:
        coords = np.array([Fraction(int(c)) for c in proc.counts], dtype=object)
    else:
        coords = proc.counts.astype(np.float64)
    return Element(space, coords)


def level_projection(proc: BernoulliProcess, j: int) -> BandProjection:
    """``P_{S_n = je} = (I - P_{(S_n - je)^+})(I - P_{(S_n - je)^-})``.

    Checked against the direct mask ``{S_n == j}``.
    """
    if not 0 <= j <= proc.n:
        raise ValueError(f"level j={j} outside 0..{proc.n}")
    space = proc.realized_space
    d = partial_sum(proc) - space.constant(j)
    P = band_projection_of(d.pos()).complement().compose(band_projection_of(d.neg()).complement())
    if not np.array_equal(P.mask, proc.counts == j):
        raise ArithmeticError(f"band recipe for level {j} disagrees with the direct level set")
    return P


def payoff_closed_form(proc: BernoulliProcess, j: int) -> Element:
    """``C(n,j) f^j (e - f)^(n-j)``, lifted into the realised space."""
    n = proc.n
    if not 0 <= j <= n:
        raise ValueError(f"level j={j} outside 0..{n}")
    f = proc.f
    if f.space.exact:
        e = f.space.unit()
        value = (f**j * (e - f) ** (n - j)).scale(math.comb(n, j))
    else:
        log_c = math.log(math.comb(n, j))

        def term(p: float) -> float:
            if (j > 0 and p == 0.0) or (j < n and p == 1.0):
                return 0.0
            s = log_c
            if j > 0:
                s += j * math.log(p)
            if j < n:
                s += (n - j) * math.log1p(-p)
            return math.exp(s)

        value = Element(f.space, np.array([term(p) for p in f.coords], dtype=np.float64))
    return proc.lift(value)


def payoff_distribution(proc: BernoulliProcess, j: int) -> Element:
    """``T' P_{S_n = je} e``, asserted equal to the binomial closed form."""
    lhs = proc.cond(level_projection(proc, j).indicator())
    if not lhs.agrees(payoff_closed_form(proc, j)):
        raise ArithmeticError(f"payoff distribution at level {j} disagrees with the binomial formula")
    return lhs


def q_j_projection(proc: BernoulliProcess, j: int) -> BandProjection:
    """Level band built by summing products over every permutation of the events.

    Each permutation ``s`` contributes ``P_{s(1)}...P_{s(j)}(I-P_{s(j+1)})...(I-P_{s(n)})``;
    the sum counts each outcome ``j!(n-j)!`` times, so dividing by that gives a mask.
    """
    if proc.representation != "full":
        raise ValueError("Q_j needs the full representation")
    n = proc.n
    if n > MAX_PERMUTATION_N:
        raise BlowupError(f"Q_j enumerates n! permutations; limit is n <= {MAX_PERMUTATION_N}")
    if not 0 <= j <= n:
        raise ValueError(f"level j={j} outside 0..{n}")
    masks = [P.mask for P in proc.projections]
    total = np.zeros(proc.realized_space.atom_count, dtype=np.int64)
    for perm in itertools.permutations(range(n)):
        m = np.ones_like(masks[0])
        for k in perm[:j]:
            m = m & masks[k]
        for k in perm[j:]:
            m = m & ~masks[k]
        total += m
    multiplicity = math.factorial(j) * math.factorial(n - j)
    if np.any(total % multiplicity):
        raise ArithmeticError("permutation sum is not a multiple of j!(n-j)!")
    quotient = total // multiplicity
    if np.any(quotient > 1):
        raise ArithmeticError("permutation sum does not reduce to a band projection")
    Q = BandProjection(proc.realized_space, quotient.astype(bool))
    if Q != level_projection(proc, j):
        raise ArithmeticError(f"Q_{j} differs from the level band of S_n")
    S = partial_sum(proc)
    if Q(S) != Q.indicator().scale(j):
        raise ArithmeticError(f"Q_{j} S_n != {j} Q_{j} e")
    return Q


def q_family_partitions_identity(qs: list[BandProjection]) -> bool:
    """``Q_i Q_j = 0`` for ``i != j`` and ``sum Q_i = I``."""
    disjoint = all(a.is_disjoint(b) for a, b in itertools.combinations(qs, 2))
    cover = np.sum([q.mask.astype(np.int64) for q in qs], axis=0)
    return disjoint and bool(np.all(cover == 1))


def process_variance(proc: BernoulliProcess) -> Element:
    """``var(S_n)``, asserted equal to ``n f (e - f)``."""
    var = variance(proc.cond, partial_sum(proc)).variance
    f = proc.f
    expected = proc.lift(multiply(f, f.space.unit() - f).scale(proc.n))
    if not var.agrees(expected):
        raise ArithmeticError("var(S_n) disagrees with n f (e - f)")
    return var


def lln_deviation(proc: BernoulliProcess, eps) -> BoundCheck:
    """``T' P_{(|S_n/n - f| - eps e)^+} e`` against ``f(e - f) / (n eps^2)``."""
    space = proc.realized_space
    eps = space.scalar(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = proc.n
    S = partial_sum(proc)
    f = proc.lift(proc.f)
    e = space.unit()
    P = band_projection_of((abs(S / n - f) - e.scale(eps)).pos())
    P_scaled = band_projection_of((abs(S - f.scale(n)) - e.scale(n * eps)).pos())
    if P != P_scaled:
        raise ArithmeticError("deviation bands of S_n/n and S_n disagree")
    lhs = proc.cond(P.indicator())
    bound = multiply(f, e - f) / (n * eps * eps)
    return BoundCheck(lhs, bound, lhs.dominated_by(bound))


def weak_lln_term(proc: BernoulliProcess) -> Element:
    """``T' |f - S_n/n|``."""
    return proc.cond(abs(proc.lift(proc.f) - partial_sum(proc) / proc.n))


def martingale_means_hold(proc: BernoulliProcess) -> bool:
    """``T_{i-1} P_i e = f`` where ``T_{i-1}`` conditions on ``R(T)`` and the first ``i-1`` events."""
    if proc.representation != "full":
        raise ValueError("needs the full representation")
    lifted = proc.lift(proc.f)
    past: list[Element] = []
    for P in proc.projections:
        Ti = CondExp(generated_partition(proc.cond, *past)) if past else proc.cond
        fi = P.indicator()
        if not Ti(fi).agrees(lifted):
            return False
        past.append(fi)
    return True


def poisson_scheme(
    base: Space, T: CondExp, g: Element, n: int, j: int, representation: str = "aggregated"
) -> Element:
    """Row ``n`` of the triangular array: level-``j`` payoff with success element ``g/n``.

    Returned as an element of the base space.
    """
    if not T.partition.is_constant(g):
        raise RangeError("g must lie in the range of T")
    if not (g.is_positive() and g <= base.constant(n)):
        raise ValueError("need 0 <= g <= n e so that g/n is a probability element")
    if not 0 <= j <= n:
        raise ValueError(f"level j={j} outside 0..{n}")
    proc = make_bernoulli(base, T, g / n, n, representation)
    return proc.to_base(payoff_distribution(proc, j))


def poisson_limit(g: Element, j: int) -> Element:
    """``(g^j / j!) e^{-g}``."""
    if not g.is_positive():
        raise ValueError("g must be positive")
    if j < 0:
        raise ValueError("j must be nonnegative")
    return multiply(g**j / math.factorial(j), exp_neg(g))
