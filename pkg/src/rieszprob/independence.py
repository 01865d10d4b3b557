"""T-conditional independence, and a product construction that produces it.

Subspaces are partitions refining ``T``'s partition.  The subspace
generated by ``R(T)`` and some elements is the coarsest such partition on
which those elements are constant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .conditional import (
    CondExp,
    IdentityCheck,
    Partition,
    RangeError,
    common_refinement,
    composes_to,
    radon_nikodym,
)
from .lattice import BandProjection, Element, Space, _check_same, multiply

# Exhaustive family checks cost 3^n subspace comparisons.
MAX_FAMILY_CHECK = 4


class IndependenceError(ValueError):
    """An operation needing T-conditional independence got dependent inputs."""


def generated_partition(T: CondExp, *elements: Element) -> Partition:
    """Partition for the closed Riesz subspace generated by ``R(T)`` and ``elements``."""
    keys = [T.partition.block_of.tolist()]
    for x in elements:
        _check_same(T.space, x.space)
        keys.append(x.coords.tolist())
    return Partition(T.space, list(zip(*keys)))


def are_independent_projections(T: CondExp, P: BandProjection, Q: BandProjection) -> bool:
    """``TPTQw = TPQw = TQTPw`` for every block indicator ``w`` of ``T``."""
    _check_same(T.space, P.space)
    _check_same(T.space, Q.space)
    PQ = P.compose(Q)
    for b in range(T.partition.n_blocks):
        w = T.partition.block_indicator(b)
        mid = T(PQ(w))
        if not T(P(T(Q(w)))).agrees(mid) or not T(Q(T(P(w)))).agrees(mid):
            return False
    return True


def are_independent_projections_e(T: CondExp, P: BandProjection, Q: BandProjection) -> bool:
    """The same factorisation tested on ``e`` alone."""
    e = T.space.unit()
    mid = T(P(Q(e)))
    return T(P(T(Q(e)))).agrees(mid) and T(Q(T(P(e)))).agrees(mid)


def _check_refines(T: CondExp, F: Partition, name: str) -> None:
    if not F.refines(T.partition):
        raise RangeError(f"{name} does not contain the range of T")


def are_independent_subspaces(T: CondExp, F1: Partition, F2: Partition) -> bool:
    """``T1 T2 = T = T2 T1`` for the conditional expectations onto ``F1`` and ``F2``.

    Cross-checked against ``T_i f = T f`` for ``f`` ranging over the block
    indicators of the other subspace; the two tests must agree.
    """
    _check_refines(T, F1, "F1")
    _check_refines(T, F2, "F2")
    T1 = radon_nikodym(T, F1)
    T2 = radon_nikodym(T, F2)
    by_composition = composes_to(T1, T2, T) and composes_to(T2, T1, T)
    by_action = all(
        Ti(F.block_indicator(b)).agrees(T(F.block_indicator(b)))
        for Ti, F in ((T1, F2), (T2, F1))
        for b in range(F.n_blocks)
    )
    if by_composition != by_action:
        raise ArithmeticError("composition and action tests for independence disagree")
    return by_composition


def disjoint_index_pairs(n: int):
    """All ordered pairs of nonempty disjoint subsets of ``range(n)``."""
    for labels in itertools.product((0, 1, 2), repeat=n):
        a = tuple(i for i, s in enumerate(labels) if s == 1)
        b = tuple(i for i, s in enumerate(labels) if s == 2)
        if a and b:
            yield a, b


def are_independent_family(T: CondExp, partitions: Sequence[Partition]) -> bool:
    """Every pair of joins over disjoint index sets is independent.

    Exhaustive, so limited to families of at most ``MAX_FAMILY_CHECK``.
    """
    n = len(partitions)
    if n > MAX_FAMILY_CHECK:
        raise ValueError(f"exhaustive family check is limited to {MAX_FAMILY_CHECK} members, got {n}")
    for F in partitions:
        _check_refines(T, F, "family member")
    for a, b in disjoint_index_pairs(n):
        Fa = common_refinement([partitions[i] for i in a])
        Fb = common_refinement([partitions[i] for i in b])
        if not are_independent_subspaces(T, Fa, Fb):
            return False
    return True


@dataclass(frozen=True, eq=False)
class Provenance:
    """Token certifying that ``projections`` were built independent under ``cond``."""

    cond: CondExp
    projections: tuple[BandProjection, ...]

    def certifies(self, T: CondExp, partitions: Sequence[Partition]) -> bool:
        """True iff each partition is coarser than a distinct factor's generated subspace."""
        if T is not self.cond or len(partitions) > len(self.projections):
            return False
        factors = [generated_partition(T, P.indicator()) for P in self.projections]
        used: set[int] = set()
        for F in partitions:
            match = next(
                (k for k, G in enumerate(factors) if k not in used and G.refines(F)),
                None,
            )
            if match is None:
                return False
            used.add(match)
        return True


@dataclass(frozen=True, eq=False)
class IndependentExtension:
    """Product space carrying ``n`` independent events over a base space.

    Atom ``a`` of ``space`` is base atom ``base_atom[a]`` together with the
    outcome row ``outcomes[a]`` (one bool per event).
    """

    base: Space
    base_cond: CondExp
    space: Space
    cond: CondExp
    projections: tuple[BandProjection, ...]
    base_atom: np.ndarray
    outcomes: np.ndarray
    provenance: Provenance = field(repr=False)

    def lift(self, x: Element) -> Element:
        _check_same(self.base, x.space)
        return Element(self.space, x.coords[self.base_atom])


def _check_probability_element(T: CondExp, f: Element) -> None:
    if not T.partition.is_constant(f):
        raise RangeError("success element must lie in the range of T")
    if not (f.is_positive() and f <= f.space.unit()):
        raise ValueError("success element must satisfy 0 <= f <= e")


def extend_with_independent_events(base: Space, T: CondExp, f: Element, n: int) -> IndependentExtension:
    """Product space ``atoms x {0,1}^n`` with events ``P_k = {eps_k = 1}``.

    Atom ``(i, eps)`` gets weight ``w_i prod_k p_i^eps_k (1-p_i)^(1-eps_k)``
    with ``p = f``; zero-weight atoms are dropped.  The new operator averages
    over all product atoms sharing a ``T``-block.
    """
    _check_same(base, T.space)
    _check_same(base, f.space)
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    _check_probability_element(T, f)

    n = int(n)
    n_out = 1 << n
    bits = ((np.arange(n_out)[:, None] >> np.arange(n)) & 1).astype(bool)
    successes = bits.sum(axis=1)

    base_atoms, rows, weights = [], [], []
    for i in range(base.atom_count):
        p = f.coords[i]
        w = base.weights[i]
        if base.exact:
            per_j = [w * p**j * (1 - p) ** (n - j) for j in range(n + 1)]
        else:
            per_j = [w * p**j * (1.0 - p) ** (n - j) for j in range(n + 1)]
        wi = np.array(per_j, dtype=base.dtype)[successes]
        keep = np.flatnonzero(wi > 0)
        base_atoms.append(np.full(len(keep), i, dtype=np.int64))
        rows.append(keep)
        weights.append(wi[keep])

    base_atom = np.concatenate(base_atoms)
    outcomes = bits[np.concatenate(rows)]
    space = Space(np.concatenate(weights), exact=base.exact)
    cond = CondExp(Partition(space, T.partition.block_of[base_atom]))
    projections = tuple(BandProjection(space, outcomes[:, k]) for k in range(n))
    base_atom.flags.writeable = False
    outcomes.flags.writeable = False
    return IndependentExtension(
        base=base,
        base_cond=T,
        space=space,
        cond=cond,
        projections=projections,
        base_atom=base_atom,
        outcomes=outcomes,
        provenance=Provenance(cond, projections),
    )


def pairwise_product_rule(
    T: CondExp, f: Element, g: Element, F_f: Partition, F_g: Partition
) -> IdentityCheck:
    """``T(fg)`` against ``Tf·Tg`` for elements of independent subspaces."""
    if not F_f.is_constant(f) or not F_g.is_constant(g):
        raise RangeError("f and g must lie in F_f and F_g respectively")
    if not are_independent_subspaces(T, F_f, F_g):
        raise IndependenceError("F_f and F_g are not T-conditionally independent (T_f T_g = T = T_g T_f fails)")
    lhs = T(multiply(f, g))
    rhs = multiply(T(f), T(g))
    return IdentityCheck(lhs, rhs, lhs.agrees(rhs))
