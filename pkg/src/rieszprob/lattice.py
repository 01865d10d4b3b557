"""Finite-dimensional Riesz spaces: scalar functions on a set of weighted atoms.

A :class:`Space` fixes ``m`` atoms with strictly positive weights and one of
two scalar regimes.  Exact spaces hold :class:`fractions.Fraction` values in
numpy object arrays, so every identity can be checked with ``==``.
Approximate spaces hold float64 and are reserved for limit experiments.

Order, lattice operations and the f-algebra product are all componentwise;
the all-ones vector is both the weak order unit and the multiplicative unit.
Band projections are atom masks.  Elements are immutable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational, Real
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels

# Coordinates at or below this count as zero when forming bands in the float regime.
ZERO_TOL = 1e-12
# Agreement tolerance for float-regime identity checks.
FLOAT_RTOL = 1e-9
FLOAT_ATOL = 1e-12


class IncompatibleElementsError(ValueError):
    """Raised when operands live in different spaces."""


def to_fraction(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Accepts ints, rationals, decimal strings and ``"p/q"`` strings.  Floats
    are rejected so approximate values never leak silently into exact spaces.
    """
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (float, np.floating)):
        raise TypeError(f"float {value!r} given to an exact space; pass a Fraction or a string")
    raise TypeError(f"cannot interpret {value!r} as an exact scalar")


def to_float(value) -> float:
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    if isinstance(value, Real):
        return float(value)
    raise TypeError(f"cannot interpret {value!r} as a float scalar")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Space:
    """``m`` weighted atoms; the concrete Dedekind complete Riesz space on them."""

    __slots__ = ("weights", "exact", "labels", "__weakref__")

    def __init__(self, weights: Iterable, *, exact: bool = True, labels: Sequence[str] | None = None):
        if not exact and isinstance(weights, np.ndarray) and weights.dtype == np.float64:
            arr = weights.copy()
        else:
            weights = list(weights)
            conv = to_fraction if exact else to_float
            arr = np.empty(len(weights), dtype=object if exact else np.float64)
            for i, w in enumerate(weights):
                arr[i] = conv(w)
        if arr.ndim != 1 or len(arr) == 0:
            raise ValueError("a space needs at least one atom")
        if not np.all(arr > 0):
            raise ValueError("atom weights must be strictly positive")
        if not exact and not np.all(np.isfinite(arr)):
            raise ValueError("atom weights must be finite")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != len(arr):
                raise ValueError("labels must match the atom count")
        self.weights = _freeze(arr)
        self.exact = bool(exact)
        self.labels = labels

    @classmethod
    def uniform(cls, m: int, *, exact: bool = True) -> Space:
        return cls([1] * m, exact=exact)

    @property
    def atom_count(self) -> int:
        return len(self.weights)

    @property
    def dtype(self):
        return object if self.exact else np.float64

    def scalar(self, value):
        return to_fraction(value) if self.exact else to_float(value)

    def element(self, coords: Iterable) -> Element:
        coords = list(coords)
        if len(coords) != self.atom_count:
            raise ValueError(f"expected {self.atom_count} coordinates, got {len(coords)}")
        arr = np.empty(len(coords), dtype=self.dtype)
        for i, c in enumerate(coords):
            arr[i] = self.scalar(c)
        return Element(self, arr)

    def constant(self, value) -> Element:
        arr = np.empty(self.atom_count, dtype=self.dtype)
        arr[:] = self.scalar(value)
        return Element(self, arr)

    def unit(self) -> Element:
        """The weak order unit ``e``."""
        return self.constant(1)

    def zero(self) -> Element:
        return self.constant(0)

    def indicator(self, mask) -> Element:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.atom_count,):
            raise ValueError(f"expected a mask of length {self.atom_count}")
        arr = np.empty(self.atom_count, dtype=self.dtype)
        arr[:] = self.scalar(0)
        arr[mask] = self.scalar(1)
        return Element(self, arr)

    def atom(self, i: int) -> Element:
        coords = [0] * self.atom_count
        coords[i] = 1
        return self.element(coords)

    def approximate(self) -> Space:
        """Float64 twin of this space (same atoms and weights)."""
        if not self.exact:
            return self
        return Space([float(w) for w in self.weights], exact=False, labels=self.labels)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Space):
            return NotImplemented
        return (
            self.exact == other.exact
            and self.atom_count == other.atom_count
            and bool(np.all(self.weights == other.weights))
        )

    def __hash__(self):
        return hash((self.exact, self.atom_count))

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"Space(m={self.atom_count}, {kind})"


def _check_same(a: Space, b: Space) -> None:
    if a is not b and a != b:
        raise IncompatibleElementsError(f"elements belong to different spaces: {a!r} vs {b!r}")


class Element:
    """An immutable vector of scalars indexed by the atoms of ``space``.

    ``*`` between elements is the f-algebra product; ``|`` and ``&`` are join
    and meet; ``<=`` is the componentwise (partial) order and returns a bool.
    """

    __slots__ = ("space", "coords")

    def __init__(self, space: Space, coords: np.ndarray):
        if coords.shape != (space.atom_count,):
            raise ValueError(f"coords length {coords.shape} does not match atom count {space.atom_count}")
        if coords.dtype != space.dtype:
            coords = coords.astype(space.dtype)
        if coords.flags.writeable:
            coords = _freeze(coords.copy())
        self.space = space
        self.coords = coords

    def _new(self, coords: np.ndarray) -> Element:
        return Element(self.space, coords)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, Element):
            _check_same(self.space, other.space)
            return other.coords
        raise TypeError(f"expected Element, got {type(other).__name__}")

    # linear structure
    def __add__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self._new(self.coords + self._other(other))

    def __sub__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self._new(self.coords - self._other(other))

    def __neg__(self):
        return self._new(-self.coords)

    def scale(self, c) -> Element:
        return self._new(self.coords * self.space.scalar(c))

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        if isinstance(other, (Real, str)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (Real, str)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, c):
        if isinstance(c, Element):
            return NotImplemented
        c = self.space.scalar(c)
        if c == 0:
            raise ZeroDivisionError("division of an element by zero")
        return self._new(self.coords / c)

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("only nonnegative integer powers are defined")
        if self.space.exact:
            return self._new(np.array([c ** int(k) for c in self.coords], dtype=object))
        return self._new(self.coords ** int(k))

    # lattice structure
    def __or__(self, other):
        return lattice_combine(self, other, "join")

    def __and__(self, other):
        return lattice_combine(self, other, "meet")

    def __abs__(self):
        return self | (-self)

    def pos(self) -> Element:
        """Positive part ``x ∨ 0``."""
        return self | self.space.zero()

    def neg(self) -> Element:
        """Negative part ``(-x) ∨ 0``."""
        return (-self) | self.space.zero()

    def __le__(self, other):
        return bool(np.all(self.coords <= self._other(other)))

    def __ge__(self, other):
        return bool(np.all(self.coords >= self._other(other)))

    def is_positive(self) -> bool:
        return bool(np.all(self.coords >= 0))

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if self.space is not other.space and self.space != other.space:
            return False
        return bool(np.all(self.coords == other.coords))

    __hash__ = None

    def agrees(self, other: Element) -> bool:
        """Exact equality in exact spaces, ``allclose`` in float spaces."""
        theirs = self._other(other)
        if self.space.exact:
            return bool(np.all(self.coords == theirs))
        return bool(np.allclose(self.coords, theirs, rtol=FLOAT_RTOL, atol=FLOAT_ATOL))

    def dominated_by(self, other: Element) -> bool:
        """``self <= other``, with float slack in the approximate regime."""
        theirs = self._other(other)
        if self.space.exact:
            return bool(np.all(self.coords <= theirs))
        slack = FLOAT_ATOL + FLOAT_RTOL * np.abs(theirs)
        return bool(np.all(self.coords <= theirs + slack))

    def approximate(self) -> Element:
        space = self.space.approximate()
        return Element(space, np.array([float(c) for c in self.coords], dtype=np.float64))

    def tolist(self) -> list:
        return list(self.coords)

    def __len__(self):
        return len(self.coords)

    def __repr__(self):
        shown = [str(c) for c in self.coords[:8]]
        if len(self.coords) > 8:
            shown.append(f"... ({len(self.coords)} atoms)")
        return f"Element([{', '.join(shown)}])"


class BandProjection:
    """Projection onto the band of atoms selected by ``mask``."""

    __slots__ = ("space", "mask")

    def __init__(self, space: Space, mask):
        mask = np.array(mask, dtype=bool)
        if mask.shape != (space.atom_count,):
            raise ValueError("mask length must match the atom count")
        self.space = space
        self.mask = _freeze(mask)

    @classmethod
    def identity(cls, space: Space) -> BandProjection:
        return cls(space, np.ones(space.atom_count, dtype=bool))

    @classmethod
    def zero(cls, space: Space) -> BandProjection:
        return cls(space, np.zeros(space.atom_count, dtype=bool))

    def apply(self, x: Element) -> Element:
        _check_same(self.space, x.space)
        return Element(x.space, np.where(self.mask, x.coords, x.space.scalar(0)).astype(x.space.dtype))

    __call__ = apply

    def compose(self, other: BandProjection) -> BandProjection:
        _check_same(self.space, other.space)
        return BandProjection(self.space, self.mask & other.mask)

    def __mul__(self, other):
        if isinstance(other, BandProjection):
            return self.compose(other)
        return NotImplemented

    def complement(self) -> BandProjection:
        """``I - P``."""
        return BandProjection(self.space, ~self.mask)

    def indicator(self) -> Element:
        """``Pe``."""
        return self.space.indicator(self.mask)

    def is_disjoint(self, other: BandProjection) -> bool:
        _check_same(self.space, other.space)
        return not bool(np.any(self.mask & other.mask))

    def __eq__(self, other):
        if not isinstance(other, BandProjection):
            return NotImplemented
        return (self.space is other.space or self.space == other.space) and bool(np.all(self.mask == other.mask))

    __hash__ = None

    def __repr__(self):
        return f"BandProjection({np.flatnonzero(self.mask).tolist()})"


def lattice_combine(x: Element, y: Element, kind: str) -> Element:
    """Componentwise ``join`` (sup) or ``meet`` (inf) of two elements."""
    _check_same(x.space, y.space)
    if kind == "join":
        coords = np.maximum(x.coords, y.coords)
    elif kind == "meet":
        coords = np.minimum(x.coords, y.coords)
    else:
        raise ValueError(f"kind must be 'join' or 'meet', got {kind!r}")
    return Element(x.space, coords)


def multiply(x: Element, y: Element) -> Element:
    """f-algebra product; ``e`` is the unit."""
    _check_same(x.space, y.space)
    return Element(x.space, x.coords * y.coords)


def band_projection_of(u: Element) -> BandProjection:
    """Band projection onto the band generated by ``u >= 0``, i.e. its support."""
    if not u.is_positive():
        raise ValueError("band generator must be positive")
    if u.space.exact:
        mask = np.array([c > 0 for c in u.coords], dtype=bool)
    else:
        mask = u.coords > ZERO_TOL
    return BandProjection(u.space, mask)


def e_norm(x: Element):
    """``inf{λ >= 0 : |x| <= λe}``, the max absolute coordinate."""
    if x.space.exact:
        return max(abs(c) for c in x.coords)
    return float(np.max(np.abs(x.coords)))


def functional_calculus(
    phi: Callable[[float], float], g: Element, domain: tuple[float, float] | None = None
) -> Element:
    """Apply ``phi`` to every coordinate of ``g``.

    ``domain`` is a closed interval the coordinates must lie in.  In an
    exact space the values ``phi`` returns are converted to rationals, floats
    by their exact binary expansion.
    """
    if domain is not None:
        lo, hi = domain
        bad = [c for c in g.coords if not lo <= c <= hi]
        if bad:
            raise ValueError(f"coordinates {bad} lie outside the domain [{lo}, {hi}]")
    if g.space.exact:
        out = np.array([Fraction(phi(c)) for c in g.coords], dtype=object)
    else:
        out = np.array([phi(c) for c in g.coords], dtype=np.float64)
    return Element(g.space, out)


def exp_neg(g: Element) -> Element:
    """``e^{-g}`` by functional calculus."""
    return functional_calculus(lambda t: math.exp(-t), g)


def exp_neg_limit(g: Element, n: int) -> Element:
    """``(e - g/n)^n`` as an ``n``-fold f-algebra product."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("n must be a positive integer")
    if e_norm(g) > n:
        raise ValueError(f"e_norm(g) = {e_norm(g)} exceeds n = {n}; e - g/n would not be positive")
    base = g.space.unit() - g / n
    if g.space.exact:
        out = g.space.unit()
        for _ in range(int(n)):
            out = out * base
        return out
    return Element(g.space, _kernels.repeated_power(base.coords, int(n)))
