"""The exact-identity battery behind ``rieszprob verify``.

Each check draws its instances from its own stream derived from one seed,
so reports are reproducible byte for byte.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import instances as inst
from .bernoulli import (
    BernoulliProcess,
    lln_deviation,
    make_bernoulli,
    martingale_means_hold,
    partial_sum,
    payoff_distribution,
    process_variance,
    q_family_partitions_identity,
    q_j_projection,
    weak_lln_term,
)
from .conditional import (
    CondExp,
    characterization_holds,
    check_averaging,
    commutes,
    conditional_jensen_check,
    radon_nikodym,
)
from .independence import (
    IndependenceError,
    extend_with_independent_events,
    generated_partition,
    pairwise_product_rule,
)
from .lattice import Element
from .stats import bienayme, cross_term, tchebichev

THIRDS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))
MAX_REPORTED_FAILURES = 5
DEFAULT_TRIALS = 25


@dataclass
class CheckResult:
    name: str
    statement: str
    instances: int = 0
    passed: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.instances > 0 and self.passed == self.instances

    def record(self, ok: bool, detail: str = "") -> None:
        self.instances += 1
        if ok:
            self.passed += 1
        elif len(self.failures) < MAX_REPORTED_FAILURES:
            self.failures.append(detail or f"instance {self.instances - 1}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "statement": self.statement,
            "instances": self.instances,
            "passed": self.passed,
            "status": "pass" if self.ok else "fail",
            "failures": self.failures,
        }


def _run(result: CheckResult, trials: int, body: Callable[[int], bool]) -> CheckResult:
    for t in range(trials):
        try:
            ok = bool(body(t))
            detail = f"instance {t}: identity failed"
        except (ArithmeticError, ValueError) as exc:
            ok = False
            detail = f"instance {t}: {type(exc).__name__}: {exc}"
        result.record(ok, detail)
    return result


def _element_in(rng: random.Random, part, space) -> Element:
    values = [inst.rational(rng) for _ in range(part.n_blocks)]
    return space.element([values[b] for b in part.block_of])


def _process(rng: random.Random, n: int, representation: str) -> BernoulliProcess:
    T = inst.base_with_blocks(rng, 2)
    f = inst.probability_element(rng, T, THIRDS)
    return make_bernoulli(T.space, T, f, n, representation)


# -- individual checks ---------------------------------------------------------


def check_averaging_identity(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "averaging")
    res = CheckResult("averaging", "T(fg) = g.Tf for every g in R(T)")

    def body(_):
        sp = inst.space(rng)
        T = CondExp(inst.partition(rng, sp))
        return check_averaging(T, inst.element(rng, sp), inst.block_constant(rng, T)).equal

    return _run(res, trials, body)


def check_jensen(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "conditional_jensen")
    res = CheckResult("conditional_jensen", "(S|f|)^2 <= S(f^2)")

    def body(_):
        sp = inst.space(rng)
        S = CondExp(inst.partition(rng, sp))
        return conditional_jensen_check(S, inst.element(rng, sp))

    return _run(res, trials, body)


def check_tchebichev(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "tchebichev")
    res = CheckResult("tchebichev", "T P_{(f - eps e)^+} e <= T(f^2) / eps^2 for f >= 0")

    def body(_):
        sp = inst.space(rng)
        T = CondExp(inst.partition(rng, sp))
        eps = rng.choice((Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)))
        return tchebichev(T, inst.positive_element(rng, sp), eps).holds

    return _run(res, trials, body)


def check_radon_nikodym(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "radon_nikodym")
    res = CheckResult("radon_nikodym", "T P f = T P T_F f for every band P with Pe in F; T T_F = T = T_F T")

    def body(_):
        sp = inst.space(rng)
        T = CondExp(inst.partition(rng, sp))
        TF = radon_nikodym(T, inst.refinement(rng, T.partition))
        return commutes(T, TF) and characterization_holds(T, TF, inst.element(rng, sp))

    return _run(res, trials, body)


def check_product_rule(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "product_rule")
    res = CheckResult("product_rule", "T(fg) = Tf.Tg and T[(f - Tf)(g - Tg)] = 0 for independent f, g")

    def body(_):
        T = CondExp(inst.partition(rng, inst.space(rng, max_atoms=3), max_blocks=2))
        f = inst.probability_element(rng, T)
        ext = extend_with_independent_events(T.space, T, f, rng.randint(2, 3))
        a, b = rng.sample(range(len(ext.projections)), 2)
        Fa = generated_partition(ext.cond, ext.projections[a].indicator())
        Fb = generated_partition(ext.cond, ext.projections[b].indicator())
        x = _element_in(rng, Fa, ext.space)
        y = _element_in(rng, Fb, ext.space)
        ok = pairwise_product_rule(ext.cond, x, y, Fa, Fb).equal
        return ok and cross_term(ext.cond, x, y) == ext.space.zero()

    return _run(res, trials, body)


def check_bienayme(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "bienayme")
    res = CheckResult("bienayme", "var(sum f_k) = sum var(f_k) for independent families, n = 2..6")

    def body(_):
        T = CondExp(inst.partition(rng, inst.space(rng, max_atoms=2), max_blocks=2))
        f = inst.probability_element(rng, T)
        ext = extend_with_independent_events(T.space, T, f, rng.randint(2, 6))
        Fs = [generated_partition(ext.cond, P.indicator()) for P in ext.projections]
        fs = [_element_in(rng, F, ext.space) for F in Fs]
        return bienayme(ext.cond, fs, Fs, provenance=ext.provenance).equal

    return _run(res, trials, body)


def check_bienayme_counterexample(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "bienayme_dependent")
    res = CheckResult(
        "bienayme_dependent",
        "repeated copies of one nondegenerate event are rejected and violate the equality",
    )

    def body(_):
        T = inst.base_with_blocks(rng, 1, 1)
        p = rng.choice(THIRDS)
        proc = make_bernoulli(T.space, T, T.space.constant(p), 1, "full")
        P = proc.projections[0]
        n = rng.randint(2, 4)
        fs = [P.indicator()] * n
        try:
            bienayme(proc.cond, fs)
            rejected = False
        except IndependenceError:
            rejected = True
        violated = not bienayme(proc.cond, fs, check_independence=False).equal
        return rejected and violated

    return _run(res, trials, body)


def _exact_bernoulli_identities(proc: BernoulliProcess) -> bool:
    e = proc.realized_space.unit()
    if not proc.cond(partial_sum(proc)) == proc.lift(proc.f).scale(proc.n):
        return False
    total = proc.realized_space.zero()
    for j in range(proc.n + 1):
        total = total + payoff_distribution(proc, j)
    process_variance(proc)
    return total == e


def check_bernoulli_full(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "bernoulli_full")
    res = CheckResult("bernoulli_full", "TS_n = nf, binomial payoff law summing to e, var(S_n) = nf(e-f); full space")
    return _run(res, trials, lambda _: _exact_bernoulli_identities(_process(rng, rng.randint(1, 8), "full")))


def check_bernoulli_aggregated(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "bernoulli_aggregated")
    res = CheckResult("bernoulli_aggregated", "same identities on the count-aggregated space, n <= 60")
    return _run(res, trials, lambda _: _exact_bernoulli_identities(_process(rng, rng.randint(1, 60), "aggregated")))


def check_q_j(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "q_j")
    res = CheckResult("q_j", "permutation-sum Q_j equals the level band of S_n; Q_j partition the identity")

    def body(_):
        proc = _process(rng, rng.randint(1, 5), "full")
        qs = [q_j_projection(proc, j) for j in range(proc.n + 1)]
        return q_family_partitions_identity(qs)

    return _run(res, trials, body)


def s_n_statistics(proc: BernoulliProcess, eps=Fraction(1, 4)) -> dict:
    """Per-block values of every S_n statistic the two representations must share."""
    return {
        "mean": proc.block_values(proc.cond(partial_sum(proc))),
        "payoff": [proc.block_values(payoff_distribution(proc, j)) for j in range(proc.n + 1)],
        "variance": proc.block_values(process_variance(proc)),
        "lln": proc.block_values(lln_deviation(proc, eps).lhs),
        "weak_lln": proc.block_values(weak_lln_term(proc)),
    }


def check_representation_agreement(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "representation_agreement")
    res = CheckResult("representation_agreement", "full and aggregated spaces give identical S_n statistics")

    def body(_):
        T = inst.base_with_blocks(rng, 2)
        f = inst.probability_element(rng, T)
        n = rng.randint(1, 8)
        full = make_bernoulli(T.space, T, f, n, "full")
        agg = make_bernoulli(T.space, T, f, n, "aggregated")
        return s_n_statistics(full) == s_n_statistics(agg)

    return _run(res, trials, body)


def check_lln_bound(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "lln_bound")
    res = CheckResult("lln_bound", "T P_{(|S_n/n - f| - eps e)^+} e <= f(e-f)/(n eps^2)")

    def body(_):
        proc = _process(rng, rng.randint(1, 40), "aggregated")
        eps = rng.choice((Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)))
        return lln_deviation(proc, eps).holds

    return _run(res, trials, body)


def check_martingale_means(seed: int, trials: int) -> CheckResult:
    rng = inst.rng_for(seed, "martingale_means")
    res = CheckResult("martingale_means", "T_{i-1} P_i e = f given R(T) and the earlier events")
    return _run(res, trials, lambda _: martingale_means_hold(_process(rng, rng.randint(1, 4), "full")))


CHECKS: tuple[Callable[[int, int], CheckResult], ...] = (
    check_averaging_identity,
    check_jensen,
    check_tchebichev,
    check_radon_nikodym,
    check_product_rule,
    check_bienayme,
    check_bienayme_counterexample,
    check_bernoulli_full,
    check_bernoulli_aggregated,
    check_q_j,
    check_representation_agreement,
    check_lln_bound,
    check_martingale_means,
)


def check_configured(procs: list[tuple[str, BernoulliProcess]]) -> CheckResult:
    res = CheckResult("configured_processes", "mean, payoff law, variance and Q_j on configured processes")
    for name, proc in procs:
        try:
            ok = _exact_bernoulli_identities(proc) if proc.realized_space.exact else True
            for j in range(proc.n + 1):
                payoff_distribution(proc, j)
            process_variance(proc)
            if proc.representation == "full" and proc.n <= 8:
                ok = ok and q_family_partitions_identity([q_j_projection(proc, j) for j in range(proc.n + 1)])
            res.record(ok, f"{name}: identity failed")
        except (ArithmeticError, ValueError) as exc:
            res.record(False, f"{name}: {type(exc).__name__}: {exc}")
    return res


def run_suite(seed: int, trials: int, processes: list[tuple[str, BernoulliProcess]] = ()) -> dict:
    """Run every check and assemble the JSON-ready report."""
    if trials < 1:
        raise ValueError("trials must be positive")
    results = [check(seed, trials) for check in CHECKS]
    if processes:
        results.append(check_configured(list(processes)))
    return {
        "seed": seed,
        "trials": trials,
        "checks": [r.to_json() for r in results],
        "all_passed": all(r.ok for r in results),
    }
