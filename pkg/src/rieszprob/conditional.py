"""Conditional expectation operators as weighted block averages.

A :class:`Partition` of the atoms stands for the Riesz subspace of
block-constant elements; partitions refining ``T``'s partition are exactly
the closed Riesz subspaces containing the range of ``T``.  A
:class:`CondExp` averages each coordinate over its block with the space
weights.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .lattice import BandProjection, Element, Space, _check_same, multiply


class RangeError(ValueError):
    """An element or subspace is not where an operation needs it to be."""


def _canonical_labels(keys: Sequence) -> np.ndarray:
    """Relabel arbitrary hashable keys to 0..r-1 by first appearance."""
    seen: dict = {}
    out = np.empty(len(keys), dtype=np.int64)
    for i, k in enumerate(keys):
        out[i] = seen.setdefault(k, len(seen))
    return out


class Partition:
    """A partition of the atoms of ``space`` into nonempty blocks.

    Block indices are canonicalised by order of first appearance, so two
    partitions with the same blocks compare equal.
    """

    __slots__ = ("space", "block_of", "n_blocks", "_blocks")

    def __init__(self, space: Space, block_of: Iterable[int]):
        keys = list(block_of)
        if len(keys) != space.atom_count:
            raise ValueError(f"block_of has length {len(keys)}, space has {space.atom_count} atoms")
        labels = _canonical_labels(keys)
        labels.flags.writeable = False
        self.space = space
        self.block_of = labels
        self.n_blocks = int(labels.max()) + 1
        self._blocks = None

    @classmethod
    def from_blocks(cls, space: Space, blocks: Iterable[Iterable[int]]) -> Partition:
        block_of = [-1] * space.atom_count
        for b, block in enumerate(blocks):
            for i in block:
                if block_of[i] != -1:
                    raise ValueError(f"atom {i} appears in two blocks")
                block_of[i] = b
        if -1 in block_of:
            raise ValueError(f"atom {block_of.index(-1)} is not covered by any block")
        return cls(space, block_of)

    @classmethod
    def trivial(cls, space: Space) -> Partition:
        """One block; its averaging operator is the plain expectation."""
        return cls(space, [0] * space.atom_count)

    @classmethod
    def discrete(cls, space: Space) -> Partition:
        """Every atom its own block; its averaging operator is the identity."""
        return cls(space, range(space.atom_count))

    @property
    def blocks(self) -> tuple[np.ndarray, ...]:
        if self._blocks is None:
            self._blocks = tuple(np.flatnonzero(self.block_of == b) for b in range(self.n_blocks))
        return self._blocks

    def refines(self, other: Partition) -> bool:
        """True iff every block of ``self`` sits inside a block of ``other``."""
        _check_same(self.space, other.space)
        return all(len(set(other.block_of[blk].tolist())) == 1 for blk in self.blocks)

    def common_refinement(self, other: Partition) -> Partition:
        """Coarsest partition refining both (the subspace they generate together)."""
        _check_same(self.space, other.space)
        return Partition(self.space, list(zip(self.block_of.tolist(), other.block_of.tolist())))

    def is_constant(self, x: Element) -> bool:
        _check_same(self.space, x.space)
        return all(len(set(x.coords[blk].tolist())) == 1 for blk in self.blocks)

    def block_indicator(self, b: int) -> Element:
        return self.space.indicator(self.block_of == b)

    def block_values(self, x: Element) -> tuple:
        """Value of a block-constant ``x`` on each block."""
        if not self.is_constant(x):
            raise RangeError("element is not constant on the blocks")
        return tuple(x.coords[blk[0]] for blk in self.blocks)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return (self.space is other.space or self.space == other.space) and bool(
            np.array_equal(self.block_of, other.block_of)
        )

    __hash__ = None

    def __repr__(self):
        return f"Partition({[blk.tolist() for blk in self.blocks]})"


def common_refinement(partitions: Sequence[Partition]) -> Partition:
    if not partitions:
        raise ValueError("need at least one partition")
    out = partitions[0]
    for p in partitions[1:]:
        out = out.common_refinement(p)
    return out


class CondExp:
    """Block-wise weighted averaging ``(Tx)_i = sum_{k~i} w_k x_k / sum_{k~i} w_k``.

    Strictly positive and satisfies ``Te = e`` because all weights are > 0.
    """

    __slots__ = ("partition", "space", "block_weights")

    def __init__(self, partition: Partition):
        self.partition = partition
        self.space = partition.space
        w = self.space.weights
        if self.space.exact:
            sums = np.zeros(partition.n_blocks, dtype=object)
            np.add.at(sums, partition.block_of, w)
        else:
            sums = np.bincount(partition.block_of, weights=w, minlength=partition.n_blocks)
        self.block_weights = sums

    @classmethod
    def expectation(cls, space: Space) -> CondExp:
        return cls(Partition.trivial(space))

    @classmethod
    def identity(cls, space: Space) -> CondExp:
        return cls(Partition.discrete(space))

    def apply(self, x: Element) -> Element:
        _check_same(self.space, x.space)
        part = self.partition
        if self.space.exact:
            sums = np.zeros(part.n_blocks, dtype=object)
            np.add.at(sums, part.block_of, self.space.weights * x.coords)
            return Element(self.space, (sums / self.block_weights)[part.block_of])
        out = _kernels.block_average(x.coords, self.space.weights, part.block_of, part.n_blocks)
        return Element(self.space, out)

    __call__ = apply

    def __repr__(self):
        return f"CondExp({self.partition!r})"


def apply(T: CondExp, x: Element) -> Element:
    return T.apply(x)


def is_in_range(T: CondExp, x: Element) -> bool:
    """True iff ``x`` is constant on every block of ``T``."""
    return T.partition.is_constant(x)


def radon_nikodym(T: CondExp, F: Partition) -> CondExp:
    """The conditional expectation with range ``F`` commuting with ``T``.

    ``F`` must refine ``T``'s partition.  With the ambient weights fixed the
    block average over ``F`` is the unique operator with ``TP f = TP T_F f``
    for every band projection ``P`` whose mask is constant on ``F``-blocks.
    """
    if not F.refines(T.partition):
        raise RangeError("range of T is not contained in F: F does not refine T's partition")
    if F == T.partition:
        return T
    return CondExp(F)


class IdentityCheck(NamedTuple):
    lhs: Element
    rhs: Element
    equal: bool


def check_averaging(T: CondExp, f: Element, g: Element) -> IdentityCheck:
    """``T(fg)`` against ``g·Tf`` for block-constant ``g``."""
    if not is_in_range(T, g):
        raise RangeError("g must lie in the range of T for the averaging identity")
    lhs = T(multiply(f, g))
    rhs = multiply(g, T(f))
    return IdentityCheck(lhs, rhs, lhs.agrees(rhs))


def composes_to(A: CondExp, B: CondExp, C: CondExp) -> bool:
    """True iff ``A∘B == C`` on every atom indicator (enough by linearity)."""
    space = A.space
    _check_same(space, B.space)
    _check_same(space, C.space)
    for i in range(space.atom_count):
        x = space.atom(i)
        if not A(B(x)).agrees(C(x)):
            return False
    return True


def commutes(T: CondExp, S: CondExp) -> bool:
    """True iff ``TS = T = ST`` on a spanning basis."""
    return composes_to(T, S, T) and composes_to(S, T, T)


def conditional_jensen_check(S: CondExp, f: Element) -> bool:
    """``(S|f|)^2 <= S(f^2)`` componentwise."""
    s_abs = S(abs(f))
    return multiply(s_abs, s_abs).dominated_by(S(multiply(f, f)))


def characterization_holds(T: CondExp, TF: CondExp, f: Element) -> bool:
    """``T P f == T P T_F f`` for every union of ``F``-blocks ``P``.

    Enumerates all ``2^r`` masks constant on the ``r`` blocks of ``TF``.
    """
    part = TF.partition
    tf = TF(f)
    for bits in range(1 << part.n_blocks):
        chosen = np.array([(bits >> b) & 1 for b in range(part.n_blocks)], dtype=bool)
        P = BandProjection(T.space, chosen[part.block_of])
        if not T(P(f)).agrees(T(P(tf))):
            return False
    return True
