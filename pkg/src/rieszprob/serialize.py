"""JSON encodings for spaces, elements, operators, reports and process descriptors.

Exact scalars are written as ``"p/q"`` strings (``"p"`` for integers) so they
round-trip losslessly; float scalars are plain JSON numbers.
"""

from __future__ import annotations

from fractions import Fraction

from .bernoulli import BernoulliProcess, make_bernoulli
from .conditional import CondExp, Partition
from .lattice import Element, Space
from .stats import VarianceReport


def scalar_to_json(x):
    if isinstance(x, (Fraction, int)):
        return str(Fraction(x))
    return float(x)


def space_to_json(space: Space) -> dict:
    return {
        "exact": space.exact,
        "weights": [scalar_to_json(w) for w in space.weights],
        "labels": list(space.labels) if space.labels is not None else None,
    }


def space_from_json(data: dict) -> Space:
    return Space(data["weights"], exact=data.get("exact", True), labels=data.get("labels"))


def element_to_json(x: Element) -> list:
    return [scalar_to_json(c) for c in x.coords]


def element_from_json(space: Space, data: list) -> Element:
    return space.element(data)


def partition_to_json(part: Partition) -> dict:
    return {"block_of": part.block_of.tolist()}


def condexp_to_json(T: CondExp) -> dict:
    return {"space": space_to_json(T.space), "block_of": T.partition.block_of.tolist()}


def condexp_from_json(data: dict) -> CondExp:
    space = space_from_json(data["space"])
    return CondExp(Partition(space, data["block_of"]))


def variance_report_to_json(report: VarianceReport) -> dict:
    return {
        "f": element_to_json(report.f),
        "mean": element_to_json(report.mean),
        "second_moment": element_to_json(report.second_moment),
        "variance": element_to_json(report.variance),
    }


def process_to_json(proc: BernoulliProcess) -> dict:
    return {
        "base": space_to_json(proc.base),
        "block_of": proc.T.partition.block_of.tolist(),
        "f": element_to_json(proc.f),
        "n": proc.n,
        "representation": proc.representation,
    }


def process_from_json(data: dict) -> BernoulliProcess:
    """Build a process from its descriptor; raises ``KeyError``/``ValueError`` on bad input."""
    base = space_from_json(data["base"])
    T = CondExp(Partition(base, data["block_of"]))
    f = base.element(data["f"])
    return make_bernoulli(base, T, f, int(data["n"]), data.get("representation", "full"))
