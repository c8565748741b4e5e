"""Parameter-grid sweeps and the classifier consistency battery."""

from __future__ import annotations

import csv
import io
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .classifier import Relation, Verdict, classify, gamma
from .params import (
    INF,
    ParamError,
    Scale,
    Setting,
    SpaceParams,
    as_ext,
    canonical,
    format_rational,
    normalize_coincidence,
    parse_rational,
)

DEFAULT_CAP = 100_000

CSV_COLUMNS = ["scale", "setting", "d", "s1", "p1", "q1", "tau1", "s2", "p2", "q2", "tau2",
               "gamma", "branch", "relation", "rule_id", "citation"]


class GridCapExceeded(ParamError):
    pass


def _default_s() -> list:
    return [format_rational(Fraction(k, 2)) for k in range(-4, 5)]


@dataclass
class GridSpec:
    """Value lists for a sweep. Each (scale, setting) block pairs every grid space
    with every other one; the source smoothness runs over ``s`` (target s = 0),
    plus the limiting value d*gamma when ``limiting`` is set."""

    s: list = field(default_factory=_default_s)
    p: list = field(default_factory=lambda: ["1/2", "1", "2", "inf"])
    q: list = field(default_factory=lambda: ["1/2", "1", "2", "inf"])
    tau: list = field(default_factory=lambda: ["0", "1/4", "1/2", "1", "2"])
    scales: list = field(default_factory=lambda: ["B", "F"])
    settings: list = field(default_factory=lambda: ["domain", "rn"])
    d: int = 1
    cap: int = DEFAULT_CAP
    limiting: bool = True

    @classmethod
    def from_json(cls, obj: dict) -> "GridSpec":
        known = {"s", "p", "q", "tau", "scales", "settings", "d", "cap", "limiting"}
        unknown = set(obj) - known
        if unknown:
            raise ParamError(f"unknown grid fields {sorted(unknown)}")
        spec = cls(**obj)
        spec.validate()
        return spec

    def validate(self) -> None:
        for name in ("s", "tau"):
            for v in getattr(self, name):
                parse_rational(str(v))
        for name in ("p", "q"):
            for v in getattr(self, name):
                as_ext(str(v))
        for sc in self.scales:
            Scale(sc)
        for st in self.settings:
            Setting(st)

    def spaces(self, scale: Scale) -> list:
        out = []
        for p in self.p:
            pe = as_ext(str(p))
            if scale is Scale.F and pe.is_inf:
                continue
            for q in self.q:
                for tau in self.tau:
                    out.append((pe, as_ext(str(q)), parse_rational(str(tau))))
        return out

    def s_values(self) -> list:
        return [parse_rational(str(v)) for v in self.s]

    def block_size(self, scale: Scale) -> int:
        n = len(self.spaces(scale))
        return n * n * (len(self.s) + (1 if self.limiting else 0))

    def blocks(self) -> list:
        return [(Scale(sc), Setting(st)) for sc in self.scales for st in self.settings]

    def check_cap(self) -> None:
        for scale, setting in self.blocks():
            size = self.block_size(scale)
            if size > self.cap:
                raise GridCapExceeded(
                    f"block {scale.value}/{setting.value} has up to {size} pairs, cap is {self.cap}")


_VERDICTS: dict = {}


def cached_relation(src: SpaceParams, tgt: SpaceParams) -> Relation:
    key = (src, tgt)
    rel = _VERDICTS.get(key)
    if rel is None:
        rel = _VERDICTS[key] = classify(src, tgt).relation
    return rel


def block_pairs(grid: GridSpec, scale: Scale, setting: Setting) -> list:
    d = grid.d
    spaces = [SpaceParams(scale, 0, p, q, t, d, setting) for p, q, t in grid.spaces(scale)]
    svals = grid.s_values()
    out = []
    for src in spaces:
        for tgt in spaces:
            values = list(svals)
            if grid.limiting:
                lim = d * gamma(canonical(src), canonical(tgt)).gamma
                lim += canonical(tgt).s - canonical(src).s
                if lim not in values:
                    values.append(lim)
            for s1 in values:
                out.append((src.with_(s=s1), tgt))
    return out


def row_of(src: SpaceParams, tgt: SpaceParams, verdict: Verdict) -> list:
    step = verdict.trace[-1] if verdict.trace and verdict.relation is not Relation.UNKNOWN else None
    return [src.scale.value, src.setting.value, str(src.d),
            format_rational(src.s), str(src.p), str(src.q), format_rational(src.tau),
            format_rational(tgt.s), str(tgt.p), str(tgt.q), format_rational(tgt.tau),
            str(verdict.gamma), verdict.gamma.branch.value, verdict.relation.value,
            verdict.rule_id, step.citation if step else "unknown"]


def _classify_block(args) -> list:
    grid, scale, setting = args
    rows = []
    for src, tgt in block_pairs(grid, scale, setting):
        verdict = classify(src, tgt)
        _VERDICTS[(src, tgt)] = verdict.relation
        rows.append(row_of(src, tgt, verdict))
    return rows


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.checked} checked, {len(self.violations)} violations"


@dataclass
class AtlasReport:
    rows: list
    checks: list = field(default_factory=list)

    def summary(self) -> Counter:
        return Counter(row[CSV_COLUMNS.index("relation")] for row in self.rows)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(self.rows)
        return buf.getvalue()

    def summary_lines(self) -> list:
        counts = self.summary()
        lines = [f"rows: {len(self.rows)}"]
        lines += [f"{rel.value}: {counts.get(rel.value, 0)}" for rel in Relation]
        lines += [c.line() for c in self.checks]
        lines.append("battery: " + ("PASS" if self.passed else "FAIL"))
        return lines


def run_table(grid: GridSpec, jobs: int = 1, battery: bool = True, seed: int = 0) -> AtlasReport:
    grid.validate()
    grid.check_cap()
    tasks = [(grid, scale, setting) for scale, setting in grid.blocks()]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_classify_block, tasks))
        # seed the parent's cache so the battery does not classify the sweep again
        rel_col = CSV_COLUMNS.index("relation")
        for (_, scale, setting), part in zip(tasks, parts):
            for pair, row in zip(block_pairs(grid, scale, setting), part):
                _VERDICTS[pair] = Relation(row[rel_col])
    else:
        parts = [_classify_block(t) for t in tasks]
    rows = [row for part in parts for row in part]
    report = AtlasReport(rows)
    if battery:
        report.checks = run_battery(grid, seed=seed)
    return report


# consistency battery

def compatible(a: Relation, b: Relation) -> bool:
    """Never one continuous verdict against a NotContinuous one."""
    if Relation.UNKNOWN in (a, b):
        return True
    return a.is_continuous == b.is_continuous


def _grid_spaces(grid: GridSpec, scale: Scale, setting: Setting) -> list:
    svals = grid.s_values()
    return [SpaceParams(scale, s, p, q, t, grid.d, setting)
            for p, q, t in grid.spaces(scale) for s in svals]


def _same_scale_aliases(sp: SpaceParams) -> list:
    return [a for a in normalize_coincidence(sp) if a.scale is sp.scale]


def check_coincidence(grid: GridSpec) -> CheckResult:
    res = CheckResult("coincidence invariance")
    for scale, setting in grid.blocks():
        for src, tgt in block_pairs(grid, scale, setting):
            base = cached_relation(src, tgt)
            alts = []
            sa, ta = _same_scale_aliases(src), _same_scale_aliases(tgt)
            if len(sa) > 1 or len(ta) > 1:
                alts += [(a, b) for a in sa for b in ta if (a, b) != (src, tgt)]
            if scale is Scale.F:
                ba = [a for a in normalize_coincidence(src) if a.scale is Scale.B]
                bb = [b for b in normalize_coincidence(tgt) if b.scale is Scale.B]
                alts += [(a, b) for a in ba for b in bb]
            for a, b in alts:
                res.checked += 1
                other = cached_relation(a, b)
                if not compatible(base, other):
                    res.violations.append(f"{src.label()} -> {tgt.label()} is {base.value}, "
                                          f"alias {a.label()} -> {b.label()} is {other.value}")
    return res


def check_transitivity(grid: GridSpec, samples: int = 1000, seed: int = 0) -> CheckResult:
    res = CheckResult("transitivity guard")
    rng = random.Random(seed)
    blocks = grid.blocks()
    half = Fraction(1, 2)
    # small grids may hold few continuous chains, so the number of draws is bounded
    for _ in range(200 * samples):
        if res.checked >= samples:
            break
        scale, setting = blocks[rng.randrange(len(blocks))]
        bases = grid.spaces(scale)
        a, b, c = (SpaceParams(scale, 0, *rng.choice(bases), grid.d, setting) for _ in range(3))
        a = a.with_(s=rng.choice(grid.s_values()))
        b = b.with_(s=a.s - grid.d * _limit_gap(a, b) - rng.choice([0, half]))
        c = c.with_(s=b.s - grid.d * _limit_gap(b, c) - rng.choice([0, half]))
        vab, vbc = cached_relation(a, b), cached_relation(b, c)
        if not (vab.is_continuous and vbc.is_continuous):
            continue
        res.checked += 1
        vac = cached_relation(a, c)
        if vac is Relation.NOT_CONTINUOUS:
            res.violations.append(f"{a.label()} -> {b.label()} -> {c.label()} but A -> C is NotContinuous")
    return res


def _limit_gap(src: SpaceParams, tgt: SpaceParams) -> Fraction:
    """gamma expressed relative to the given smoothness (Large spaces shift s)."""
    cs, ct = canonical(src), canonical(tgt)
    return gamma(cs, ct).gamma + ((ct.s - tgt.s) - (cs.s - src.s)) / src.d


def _expect_continuous(res: CheckResult, src: SpaceParams, tgt: SpaceParams, label: str) -> None:
    res.checked += 1
    rel = cached_relation(src, tgt)
    if not rel.is_continuous:
        res.violations.append(f"{label}: {src.label()} -> {tgt.label()} is {rel.value}")


def check_elementary(grid: GridSpec) -> CheckResult:
    res = CheckResult("elementary embeddings")
    eps = [Fraction(1, 4), Fraction(1, 2), Fraction(1)]
    for scale in (Scale(s) for s in grid.scales):
        for sp in _grid_spaces(grid, scale, Setting.DOMAIN):
            for q2 in (as_ext(str(v)) for v in grid.q):
                for e in eps:
                    _expect_continuous(res, sp.with_(s=sp.s + e), sp.with_(q=q2), "elem-0-t")
                if sp.q <= q2:
                    _expect_continuous(res, sp, sp.with_(q=q2), "elem-1-t")
            top = SpaceParams(Scale.B, sp.s + sp.d * (sp.tau - sp.inv_p), INF, INF, 0, sp.d, sp.setting)
            sources = [sp] if scale is Scale.B else [
                a for a in normalize_coincidence(sp) if a.scale is Scale.B]
            for a in sources:
                _expect_continuous(res, a, top, "010319")
            if scale is Scale.F and sp.tau == sp.inv_p and not sp.q.is_inf:
                # B^{s,1/p}_{p,min(p,q)} -> F^{s,1/p}_{p,q} = B^{s,1/q}_{q,q} -> B^{s,1/p}_{p,max(p,q)}
                mid = SpaceParams(Scale.B, sp.s, sp.q, sp.q, sp.q.inv(), sp.d, sp.setting)
                low = SpaceParams(Scale.B, sp.s, sp.p, min(sp.p, sp.q), sp.tau, sp.d, sp.setting)
                high = SpaceParams(Scale.B, sp.s, sp.p, max(sp.p, sp.q), sp.tau, sp.d, sp.setting)
                _expect_continuous(res, low, mid, "elem-tau")
                _expect_continuous(res, mid, high, "elem-tau")
    return res


def check_tau_monotone(grid: GridSpec) -> CheckResult:
    res = CheckResult("tau monotonicity on domains")
    taus = sorted({parse_rational(str(t)) for t in grid.tau})
    for scale in (Scale(s) for s in grid.scales):
        for p, q, _ in grid.spaces(scale):
            if _ == taus[0]:
                for t1 in taus:
                    for t2 in taus:
                        if t2 <= t1:
                            src = SpaceParams(scale, 0, p, q, t1, grid.d, Setting.DOMAIN)
                            _expect_continuous(res, src, src.with_(tau=t2), "tau-monotone")
    return res


def check_rn_restricts(grid: GridSpec) -> CheckResult:
    """A continuous embedding on R^n restricts to a continuous one on domains."""
    res = CheckResult("R^n to domain restriction")
    if "rn" not in grid.settings:
        return res
    for scale in (Scale(s) for s in grid.scales):
        for src, tgt in block_pairs(grid, scale, Setting.RN):
            rel = cached_relation(src, tgt)
            if not rel.is_continuous:
                continue
            res.checked += 1
            dom = cached_relation(src.with_(setting=Setting.DOMAIN), tgt.with_(setting=Setting.DOMAIN))
            if dom is Relation.NOT_CONTINUOUS:
                res.violations.append(f"{src.label()} -> {tgt.label()} continuous on R^n only")
    return res


def run_battery(grid: GridSpec, samples: int = 1000, seed: int = 0) -> list:
    return [
        check_coincidence(grid),
        check_transitivity(grid, samples, seed),
        check_elementary(grid),
        check_tau_monotone(grid),
        check_rn_restricts(grid),
    ]
