"""Seeded random instances for the exact verification battery."""

from __future__ import annotations

import random
from fractions import Fraction

from .conditional import CondExp, Partition
from .lattice import Element, Space


def rng_for(seed: int, name: str) -> random.Random:
    """Independent, reproducible stream per named check."""
    return random.Random(f"{seed}/{name}")


def rational(rng: random.Random, lo: int = -6, hi: int = 6, max_den: int = 6) -> Fraction:
    return Fraction(rng.randint(lo * max_den, hi * max_den), rng.randint(1, max_den))


def probability(rng: random.Random, max_den: int = 6) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(0, den), den)


def space(rng: random.Random, max_atoms: int = 8, min_atoms: int = 1) -> Space:
    m = rng.randint(min_atoms, max_atoms)
    return Space([Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in range(m)])


def partition(rng: random.Random, sp: Space, max_blocks: int = 4) -> Partition:
    m = sp.atom_count
    r = rng.randint(1, min(m, max_blocks))
    atoms = list(range(m))
    rng.shuffle(atoms)
    block_of = [0] * m
    for b, i in enumerate(atoms[:r]):
        block_of[i] = b
    for i in atoms[r:]:
        block_of[i] = rng.randrange(r)
    return Partition(sp, block_of)


def refinement(rng: random.Random, part: Partition) -> Partition:
    """Random partition refining ``part`` (each block split at random)."""
    keys = []
    for i in range(part.space.atom_count):
        keys.append((int(part.block_of[i]), rng.randrange(2)))
    return Partition(part.space, keys)


def element(rng: random.Random, sp: Space) -> Element:
    return sp.element([rational(rng) for _ in range(sp.atom_count)])


def positive_element(rng: random.Random, sp: Space) -> Element:
    return sp.element([abs(rational(rng)) for _ in range(sp.atom_count)])


def block_constant(rng: random.Random, T: CondExp, values=None) -> Element:
    if values is None:
        values = [rational(rng) for _ in range(T.partition.n_blocks)]
    return T.space.element([values[b] for b in T.partition.block_of])


def probability_element(rng: random.Random, T: CondExp, choices=None) -> Element:
    """Block-constant element with values in [0, 1]."""
    n_blocks = T.partition.n_blocks
    if choices is None:
        values = [probability(rng) for _ in range(n_blocks)]
    else:
        values = [rng.choice(choices) for _ in range(n_blocks)]
    return block_constant(rng, T, values)


def base_with_blocks(rng: random.Random, n_blocks: int = 2, max_atoms_per_block: int = 2) -> CondExp:
    """Small base space with exactly ``n_blocks`` conditioning blocks."""
    block_of = []
    for b in range(n_blocks):
        block_of.extend([b] * rng.randint(1, max_atoms_per_block))
    sp = Space([Fraction(rng.randint(1, 9), rng.randint(1, 4)) for _ in block_of])
    return CondExp(Partition(sp, block_of))
