"""Oracle suites run by ``morrey-embed selftest``."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Optional

from .classifier import Relation, classify, gamma, gamma_max_form
from .counterexamples import (
    CrossCheck,
    gen_sparse_hierarchical,
    placement_violations,
    sparse_gamma,
)
from .dyadic import CoeffSeq
from .params import INF, Scale, Setting, SpaceParams, space_from_json
from .seqnorm import NormParams, brute_force_norm, seq_norm
from .suite import load_suite

P_VALUES = [Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(3, 2),
            Fraction(2), Fraction(3), Fraction(4), INF]


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.checked} checks"


def random_rational(rng: random.Random, lo: int, hi: int, den: int = 8) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_space(rng: random.Random, scale: Scale = Scale.B, d: int = 1,
                 setting: Setting = Setting.DOMAIN) -> SpaceParams:
    """A valid space; p = inf and tau = 0 are drawn often to exercise the conventions."""
    ps = [p for p in P_VALUES if not (scale is Scale.F and p is INF)]
    p = rng.choice(ps)
    q = rng.choice(P_VALUES)
    tau = Fraction(0) if rng.random() < 0.3 else random_rational(rng, 0, 3)
    if rng.random() < 0.2 and p is not INF:
        tau = 1 / Fraction(p)
    return SpaceParams(scale, random_rational(rng, -3, 3), p, q, tau, d, setting)


def gamma_suite(n: int = 10_000, seed: int = 0) -> SuiteResult:
    res = SuiteResult("gamma form equivalence")
    rng = random.Random(seed)
    for _ in range(n):
        a, b = random_space(rng), random_space(rng)
        res.checked += 1
        g1, g2 = gamma(a, b).gamma, gamma_max_form(a, b)
        if g1 != g2:
            res.failures.append(f"{a.label()} -> {b.label()}: piecewise {g1}, max form {g2}")
    return res


def random_sequence(rng: random.Random, d: int, depth: int = 3, max_entries: int = 6) -> CoeffSeq:
    entries = {}
    for _ in range(rng.randint(1, max_entries)):
        j = rng.randint(0, depth)
        side = 2 ** j
        m = tuple(rng.randint(-side, side - 1) if rng.random() < 0.2 else rng.randrange(side)
                  for _ in range(d))
        i = rng.randint(1, 2 ** d - 1)
        entries[(i, j, m)] = rng.choice([1.0, -1.0]) * rng.uniform(0.1, 2.0)
    return CoeffSeq(d, entries)


def random_norm_params(rng: random.Random, d: int) -> NormParams:
    scale = rng.choice([Scale.B, Scale.F])
    ps = [p for p in P_VALUES if not (scale is Scale.F and p is INF)]
    return NormParams(random_rational(rng, -2, 2, 4), random_rational(rng, 0, 1, 4),
                      rng.choice(ps), rng.choice(P_VALUES), d, None, scale)


def norm_matches(t: CoeffSeq, np_: NormParams, rtol: float = 1e-12) -> Optional[str]:
    fast = seq_norm(t, np_).value
    slow = brute_force_norm(t, np_).value
    if abs(fast - slow) > rtol * max(abs(slow), 1e-300):
        return f"{np_.to_json()} on {len(t)} entries: optimized {fast!r}, brute force {slow!r}"
    return None


def norms_suite(n: int = 200, seed: int = 0) -> SuiteResult:
    res = SuiteResult("norm oracle equivalence")
    rng = random.Random(seed)
    for k in range(n):
        d = 1 if k % 2 == 0 else 2
        t = random_sequence(rng, d)
        np_ = random_norm_params(rng, d)
        res.checked += 1
        msg = norm_matches(t, np_)
        if msg:
            res.failures.append(msg)
    return res


def placement_suite(max_depth: int = 8) -> SuiteResult:
    res = SuiteResult("sparse placement caps")
    for tau1 in (Fraction(1, 8), Fraction(1, 4)):
        for nu0 in (-1, -2, -4):
            gam = sparse_gamma(0, 2, tau1, 1, max_depth, 2)
            seq = gen_sparse_hierarchical(2, tau1, 1, nu0, gam, max_depth)
            res.checked += 1
            bad = placement_violations(seq, 2, tau1, nu0)
            if bad:
                res.failures.append(f"p1 tau1 = {2 * tau1}, nu0 = {nu0}: {len(bad)} overloaded cubes")
    return res


def rule_cases_text(path: Optional[str] = None) -> str:
    if path is not None:
        return Path(path).read_text()
    return resources.files("morrey_embed.data").joinpath("rule_cases.json").read_text()


def rules_suite(path: Optional[str] = None) -> SuiteResult:
    """Reference verdicts, each tied to the rule that must decide it."""
    res = SuiteResult("rule reference cases")
    cases = json.loads(rule_cases_text(path))["cases"]
    for case in cases:
        v = classify(space_from_json(case["src"]), space_from_json(case["tgt"]))
        res.checked += 1
        deciding = v.trace[-1].rule_id if v.trace else "unknown"
        if v.relation is not Relation(case["relation"]) or deciding != case["rule_id"]:
            res.failures.append(f"rule {case['rule_id']} ({case['name']}): expected {case['relation']}, "
                                f"got {v.relation.value} via {deciding}")
    return res


def scenarios_suite(jobs: int = 1) -> SuiteResult:
    res = SuiteResult("counterexample scenarios")
    for sc in load_suite():
        result = sc.run(jobs=jobs)
        res.checked += 1
        if result.report.cross_check is CrossCheck.INCONSISTENT:
            rep = result.report
            res.failures.append(f"scenario {sc.name}: {result.relation.value} with alpha {rep.alpha:.12g} "
                                f"(predicted {rep.predicted})")
    return res


SUITES: dict = {
    "gamma": lambda opts: gamma_suite(),
    "norms": lambda opts: norms_suite(),
    "placement": lambda opts: placement_suite(),
    "rules": lambda opts: rules_suite(opts.get("rule_cases")),
    "scenarios": lambda opts: scenarios_suite(opts.get("jobs", 1)),
}


def run_selftest(only: Optional[list] = None, rule_cases: Optional[str] = None, jobs: int = 1,
                 emit: Callable[[str], None] = print) -> bool:
    names = list(SUITES) if not only else only
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    opts = {"rule_cases": rule_cases, "jobs": jobs}
    ok = True
    for name in names:
        res = SUITES[name](opts)
        emit(res.line())
        for msg in res.failures:
            emit(f"  failed: {msg}")
        ok = ok and res.passed
    emit("selftest: " + ("PASS" if ok else "FAIL"))
    return ok


__all__ = ["run_selftest", "SUITES", "SuiteResult", "random_space", "random_sequence",
           "random_norm_params", "norm_matches"]
