"""Variance, Tchebichev's inequality and Bienaymé's equality under a conditional expectation.

Every element of a finite atom space has its square in the domain of ``T``,
so the L²(T) membership condition is always satisfied and is not checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .conditional import CondExp, IdentityCheck, RangeError
from .independence import (
    MAX_FAMILY_CHECK,
    IndependenceError,
    Provenance,
    are_independent_family,
    generated_partition,
)
from .lattice import Element, band_projection_of, multiply


@dataclass(frozen=True, eq=False)
class VarianceReport:
    """Conditional mean, second moment and variance of ``f``.

    ``variance`` is ``T((f - Tf)^2)``; construction fails unless it also
    equals ``Tf^2 - (Tf)^2`` and is positive.
    """

    f: Element
    mean: Element
    second_moment: Element
    variance: Element

    def __post_init__(self):
        alt = self.second_moment - multiply(self.mean, self.mean)
        if not self.variance.agrees(alt):
            raise ArithmeticError("T(f - Tf)^2 and Tf^2 - (Tf)^2 disagree")
        if not self.variance.space.zero().dominated_by(self.variance):
            raise ArithmeticError("variance has a negative coordinate")


def variance(T: CondExp, f: Element) -> VarianceReport:
    mean = T(f)
    centred = f - mean
    return VarianceReport(
        f=f,
        mean=mean,
        second_moment=T(multiply(f, f)),
        variance=T(multiply(centred, centred)),
    )


class InequalityCheck(NamedTuple):
    lhs: Element
    rhs: Element
    holds: bool


def tchebichev(T: CondExp, f: Element, eps) -> InequalityCheck:
    """``T P_{(f - eps e)^+} e <= T(f^2) / eps^2`` for ``f >= 0``."""
    space = f.space
    eps = space.scalar(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not f.is_positive():
        raise ValueError("Tchebichev's inequality needs f >= 0")
    P = band_projection_of((f - space.unit().scale(eps)).pos())
    lhs = T(P.indicator())
    rhs = T(multiply(f, f)) / (eps * eps)
    return InequalityCheck(lhs, rhs, lhs.dominated_by(rhs))


def cross_term(T: CondExp, f: Element, g: Element) -> Element:
    """``T[(f - Tf)(g - Tg)]``; zero for independent ``f``, ``g``."""
    return T(multiply(f - T(f), g - T(g)))


def bienayme(
    T: CondExp,
    fs: Sequence[Element],
    Fs: Sequence | None = None,
    *,
    provenance: Provenance | None = None,
    check_independence: bool = True,
) -> IdentityCheck:
    """``var(sum f_k)`` against ``sum var(f_k)``.

    ``Fs`` are subspaces (partitions) containing ``R(T)`` with ``f_k`` in
    ``Fs[k]``; by default the generated ones.  Independence is confirmed by
    ``provenance`` when given, otherwise by exhaustive check, which only
    scales to ``MAX_FAMILY_CHECK`` elements.
    """
    if not fs:
        raise ValueError("need at least one element")
    if Fs is None:
        Fs = [generated_partition(T, f) for f in fs]
    if len(Fs) != len(fs):
        raise ValueError("fs and Fs must have the same length")
    for f, F in zip(fs, Fs):
        if not F.is_constant(f) or not F.refines(T.partition):
            raise RangeError("each f_k must lie in its subspace, which must contain R(T)")

    if check_independence and len(fs) > 1:
        if provenance is not None and provenance.certifies(T, Fs):
            pass
        elif len(fs) > MAX_FAMILY_CHECK:
            raise IndependenceError(
                f"cannot certify independence of {len(fs)} elements without a construction provenance"
            )
        elif not are_independent_family(T, Fs):
            raise IndependenceError("the family is not T-conditionally independent; Bienaymé's equality does not apply")

    total = fs[0]
    for f in fs[1:]:
        total = total + f
    lhs = variance(T, total).variance
    rhs = variance(T, fs[0]).variance
    for f in fs[1:]:
        rhs = rhs + variance(T, f).variance
    return IdentityCheck(lhs, rhs, lhs.agrees(rhs))
