"""Convergence experiments behind ``rieszprob converge``.

All experiments run in the float regime on a one-atom base space, where
``T`` is the plain expectation and every statistic is a multiple of ``e``;
``exp-limit`` is the exception and accepts a vector ``g``.  Each experiment
returns CSV rows plus the list of rows that broke one of its assertions.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field

from .bernoulli import lln_deviation, make_bernoulli, payoff_distribution, poisson_limit, weak_lln_term
from .conditional import CondExp
from .config import ConfigError, boolean, fraction, fraction_list, int_list
from .lattice import Space, e_norm, exp_neg, exp_neg_limit

log = logging.getLogger(__name__)

EXPERIMENTS = ("lln", "weak-lln", "poisson", "exp-limit")
HEADERS = {
    "lln": ("n", "eps", "lhs", "bound", "gap"),
    "weak-lln": ("n", "eps", "lhs", "bound", "gap"),
    "poisson": ("n", "j", "lhs", "limit", "gap"),
    "exp-limit": ("n", "j", "lhs", "limit", "gap"),
}
DEFAULTS = {
    "lln": {"n": "10, 100, 1000, 10000", "p": "1/2", "eps": "1/10"},
    "weak-lln": {"n": "10, 100, 1000, 10000", "p": "1/2"},
    "poisson": {"n": "100, 1000, 10000", "g": "1", "j": "0..5", "tolerance": "1e-4"},
    "exp-limit": {"n": ", ".join(str(2**k) for k in range(1, 11)), "g": "1"},
}
# Slack on the weak-law envelope comparison.
ENVELOPE_TOL = 1e-10


@dataclass
class ExperimentResult:
    experiment: str
    rows: list[dict] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=HEADERS[self.experiment], lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _grid(params: dict) -> list[int]:
    ns = int_list(params["n"], "n")
    if not ns or any(n < 1 for n in ns):
        raise ConfigError("n grid must be a nonempty list of positive integers")
    if ns != sorted(set(ns)):
        raise ConfigError("n grid must be strictly increasing")
    return ns


def _probability(params: dict) -> float:
    p = fraction(params["p"], "p")
    if not 0 <= p <= 1:
        raise ConfigError(f"p must lie in [0, 1], got {p}")
    return float(p)


def _one_atom():
    space = Space([1.0], exact=False)
    return space, CondExp.expectation(space)


def _decreasing(values: list[float], strict: bool) -> list[int]:
    """Indices ``i`` where ``values[i]`` fails to drop below ``values[i-1]``."""
    bad = []
    for i in range(1, len(values)):
        if values[i] > values[i - 1] or (strict and values[i] == values[i - 1]):
            bad.append(i)
    return bad


def run_lln(params: dict) -> ExperimentResult:
    ns, p = _grid(params), _probability(params)
    eps = fraction(params["eps"], "eps")
    if eps <= 0:
        raise ConfigError("eps must be positive")
    space, T = _one_atom()
    res = ExperimentResult("lln")
    for n in ns:
        check = lln_deviation(make_bernoulli(space, T, space.constant(p), n, "aggregated"), float(eps))
        lhs, bound = float(check.lhs.coords[0]), float(check.bound.coords[0])
        res.rows.append({"n": n, "eps": str(eps), "lhs": lhs, "bound": bound, "gap": bound - lhs})
        if not check.holds:
            res.failures.append(f"n={n}: deviation {lhs!r} exceeds bound {bound!r}")
    if boolean(params.get("monotone", "true"), "monotone") and 0 < p < 1:
        lhs = [r["lhs"] for r in res.rows]
        for i in _decreasing(lhs, strict=True):
            res.failures.append(f"n={ns[i]}: deviation {lhs[i]!r} did not decrease from {lhs[i - 1]!r}")
    if "max_ratio" in params:
        ratio = float(fraction(params["max_ratio"], "max_ratio"))
        first, last = res.rows[0]["lhs"], res.rows[-1]["lhs"]
        if last > ratio * first:
            res.failures.append(f"n={ns[-1]}: deviation {last!r} is above {ratio} x the n={ns[0]} value {first!r}")
    return res


def run_weak_lln(params: dict) -> ExperimentResult:
    ns, p = _grid(params), _probability(params)
    space, T = _one_atom()
    res = ExperimentResult("weak-lln")
    for n in ns:
        value = float(weak_lln_term(make_bernoulli(space, T, space.constant(p), n, "aggregated")).coords[0])
        envelope = math.sqrt(p * (1.0 - p) / n)
        res.rows.append({"n": n, "eps": None, "lhs": value, "bound": envelope, "gap": envelope - value})
        if value > envelope + ENVELOPE_TOL:
            res.failures.append(f"n={n}: T|f - S_n/n| = {value!r} above sqrt(p(1-p)/n) = {envelope!r}")
    if boolean(params.get("monotone", "true"), "monotone") and 0 < p < 1:
        vals = [r["lhs"] for r in res.rows]
        for i in _decreasing(vals, strict=True):
            res.failures.append(f"n={ns[i]}: {vals[i]!r} did not decrease from {vals[i - 1]!r}")
    return res


def run_poisson(params: dict) -> ExperimentResult:
    ns = _grid(params)
    g = fraction(params["g"], "g")
    js = int_list(params["j"], "j")
    tol = float(fraction(params.get("tolerance", "1e-4"), "tolerance"))
    if g < 0:
        raise ConfigError("g must be nonnegative")
    if g > ns[0]:
        raise ConfigError(f"g = {g} exceeds the smallest n = {ns[0]}; g/n would not be a probability")
    if not js or any(j < 0 for j in js):
        raise ConfigError("j must be a nonempty list of nonnegative integers")
    space, T = _one_atom()
    g_el = space.constant(float(g))
    limits = {j: poisson_limit(g_el, j) for j in js}
    res = ExperimentResult("poisson")
    gaps: dict[int, list[float]] = {j: [] for j in js}
    for n in ns:
        proc = make_bernoulli(space, T, g_el / n, n, "aggregated")
        for j in js:
            value = proc.to_base(payoff_distribution(proc, j)) if j <= n else space.zero()
            gap = e_norm(value - limits[j])
            gaps[j].append(gap)
            res.rows.append(
                {"n": n, "j": j, "lhs": float(value.coords[0]), "limit": float(limits[j].coords[0]), "gap": gap}
            )
    for j in js:
        if gaps[j][-1] >= tol:
            res.failures.append(f"n={ns[-1]}, j={j}: gap {gaps[j][-1]!r} not below {tol}")
        if boolean(params.get("monotone", "true"), "monotone"):
            for i in _decreasing(gaps[j], strict=False):
                res.failures.append(f"n={ns[i]}, j={j}: gap {gaps[j][i]!r} grew from {gaps[j][i - 1]!r}")
    return res


def run_exp_limit(params: dict) -> ExperimentResult:
    ns = _grid(params)
    gs = fraction_list(params["g"], "g")
    if not gs or any(x < 0 for x in gs):
        raise ConfigError("g must be a nonempty list of nonnegative values")
    space = Space([1.0] * len(gs), exact=False)
    g = space.element([float(x) for x in gs])
    res = ExperimentResult("exp-limit")
    if e_norm(g) > 1:
        note = f"e_norm(g) = {e_norm(g)} lies outside [-1, 1]; evaluated componentwise regardless"
        res.notes.append(note)
        log.warning(note)
    if e_norm(g) > ns[0]:
        raise ConfigError(f"e_norm(g) exceeds the smallest n = {ns[0]}")
    target = exp_neg(g)
    gaps = []
    for n in ns:
        approx = exp_neg_limit(g, n)
        gap = e_norm(approx - target)
        gaps.append(gap)
        res.rows.append({"n": n, "j": 0, "lhs": e_norm(approx), "limit": e_norm(target), "gap": gap})
    if boolean(params.get("monotone", "true"), "monotone") and any(x > 0 for x in gs):
        for i in _decreasing(gaps, strict=True):
            res.failures.append(f"n={ns[i]}: gap {gaps[i]!r} did not decrease from {gaps[i - 1]!r}")
    return res


RUNNERS = {"lln": run_lln, "weak-lln": run_weak_lln, "poisson": run_poisson, "exp-limit": run_exp_limit}


def run_experiment(name: str, overrides: dict | None = None) -> ExperimentResult:
    if name not in RUNNERS:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    params = dict(DEFAULTS[name])
    params.update({k: v for k, v in (overrides or {}).items() if k not in ("experiment", "out")})
    return RUNNERS[name](params)
