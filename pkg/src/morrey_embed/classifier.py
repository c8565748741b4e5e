"""Rule engine for continuity and compactness of tau-space embeddings.

``classify(src, tgt)`` decides the embedding A^{s1,tau1}_{p1,q1} -> A^{s2,tau2}_{p2,q2}
on a bounded Lipschitz domain or on R^n. Arithmetic is exact. Whenever the known
sufficient and necessary conditions do not meet, the verdict is ``Unknown``
together with the conditions that were checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

from .anchors import citation
from .params import (
    ExtRational,
    NamedKind,
    NamedSpace,
    ParamError,
    RegionTag,
    Scale,
    Setting,
    SpaceParams,
    canonical,
    format_rational,
    product_convention,
    ratio_convention,
    region_of,
    resolve_named,
)


class QueryError(ParamError):
    """The pair of spaces is not a valid embedding query."""


class NotBesovMorreyEndpoint(QueryError):
    pass


class InternalConsistencyError(RuntimeError):
    """Two independent encodings of the same rule disagree."""


class Relation(str, Enum):
    COMPACT = "Compact"
    CONTINUOUS_NOT_COMPACT = "ContinuousNotCompact"
    NOT_CONTINUOUS = "NotContinuous"
    UNKNOWN = "Unknown"

    @property
    def is_continuous(self) -> bool:
        return self in (Relation.COMPACT, Relation.CONTINUOUS_NOT_COMPACT)


class GammaBranch(str, Enum):
    TAU2_LARGE = "Tau2Large"
    TAU1_LARGE = "Tau1Large"
    MODERATE_TAU2 = "BothModerate_Tau2Branch"
    MODERATE_TAU1 = "BothModerate_Tau1Branch"
    MODERATE_ZERO = "BothModerate_Zero"


@dataclass(frozen=True)
class GammaValue:
    gamma: Fraction
    branch: GammaBranch

    def __str__(self) -> str:
        return format_rational(self.gamma)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Fraction, int, ExtRational)):
        return format_rational(value)
    return str(value)


@dataclass
class RuleApplication:
    rule_id: str
    citation: str
    bound_values: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"rule_id": self.rule_id, "citation": self.citation,
                "values": {k: _fmt(v) for k, v in self.bound_values.items()}}


def rule(rule_id: str, **values) -> RuleApplication:
    return RuleApplication(rule_id, citation(rule_id), values)


@dataclass
class UnknownDetail:
    sufficient_failed: list = field(default_factory=list)
    necessary_satisfied: list = field(default_factory=list)
    not_covered: bool = False

    def to_json(self) -> dict:
        if self.not_covered:
            return {"NotCovered": True}
        return {"sufficient_failed": list(self.sufficient_failed),
                "necessary_satisfied": list(self.necessary_satisfied)}


@dataclass
class Verdict:
    relation: Relation
    trace: list = field(default_factory=list)
    unknown_detail: Optional[UnknownDetail] = None
    gamma: Optional[GammaValue] = None
    src: Optional[SpaceParams] = None
    tgt: Optional[SpaceParams] = None
    normalized_src: Optional[SpaceParams] = None
    normalized_tgt: Optional[SpaceParams] = None

    @property
    def rule_id(self) -> str:
        """The deciding rule (last entry of the trace), or 'unknown'."""
        if self.relation is Relation.UNKNOWN or not self.trace:
            return "unknown"
        return self.trace[-1].rule_id

    def to_json(self, with_trace: bool = True) -> dict:
        out = {"relation": self.relation.value}
        if self.gamma is not None:
            out["gamma"] = str(self.gamma)
            out["branch"] = self.gamma.branch.value
        if self.unknown_detail is not None:
            out["unknown_detail"] = self.unknown_detail.to_json()
        out["rule_id"] = self.rule_id
        if with_trace:
            out["trace"] = [step.to_json() for step in self.trace]
            if self.src is not None:
                out["src"] = self.src.to_json()
                out["tgt"] = self.tgt.to_json()
            if self.normalized_src is not None:
                out["normalized_src"] = self.normalized_src.to_json()
                out["normalized_tgt"] = self.normalized_tgt.to_json()
        return out


@dataclass(frozen=True)
class EmbeddingQuery:
    src: SpaceParams
    tgt: SpaceParams

    def __post_init__(self):
        check_query(self.src, self.tgt)


def check_query(src: SpaceParams, tgt: SpaceParams) -> None:
    if src.scale is not tgt.scale:
        raise QueryError("source and target must both be B-type or both F-type")
    if src.d != tgt.d:
        raise QueryError("source and target must have the same dimension")
    if src.setting is not tgt.setting:
        raise QueryError("source and target must have the same setting")


# gamma

def _ratio_tau(p1: ExtRational, tau1: Fraction, p2: ExtRational) -> Fraction:
    """(p1/p2) * tau1 read as (p1 tau1)/p2, so the p = inf, tau = 0 convention applies."""
    pt = product_convention(p1, tau1)
    if not pt.is_inf:
        return pt.value * p2.inv()
    # p1 = inf with tau1 > 0 (a large-region source)
    if p2.is_inf:
        return ratio_convention(p1, p2).value * tau1
    raise ParamError("(p1/p2) tau1 is infinite")


def gamma(src: SpaceParams, tgt: SpaceParams) -> GammaValue:
    """Critical exponent in its piecewise form."""
    i1, i2 = src.inv_p, tgt.inv_p
    t1, t2 = src.tau, tgt.tau
    if t2 >= i2:
        return GammaValue(i1 - t1 - i2 + t2, GammaBranch.TAU2_LARGE)
    if t1 >= i1:
        return GammaValue(i1 - t1, GammaBranch.TAU1_LARGE)
    a = i1 - t1 - i2 + t2
    b = i1 - t1 - i2 + _ratio_tau(src.p, t1, tgt.p)
    if max(a, b) <= 0:
        return GammaValue(Fraction(0), GammaBranch.MODERATE_ZERO)
    if a >= b:
        return GammaValue(a, GammaBranch.MODERATE_TAU2)
    return GammaValue(b, GammaBranch.MODERATE_TAU1)


def gamma_max_form(src: SpaceParams, tgt: SpaceParams) -> Fraction:
    """Critical exponent from the three-term maximum, evaluated independently."""
    i1, i2 = src.inv_p, tgt.inv_p
    t1, t2 = src.tau, tgt.tau
    pos = lambda x: x if x > 0 else Fraction(0)
    pt1 = product_convention(src.p, t1)
    one_minus = Fraction(0) if pt1.is_inf else pos(1 - pt1.value)
    first = pos(t2 - i2) - pos(t1 - i1)
    second = i1 - t1 - i2 + t2
    third = i1 - t1 - min(i2 - t2, i2 * one_minus)
    return max(first, second, third)


# helpers for q comparisons

def _times(factor: ExtRational, q: ExtRational) -> ExtRational:
    if factor == 0:
        return ExtRational(0)
    return factor * q


def _min1(x: ExtRational) -> ExtRational:
    return x if x < 1 else ExtRational(1)


@dataclass
class _Ctx:
    src: SpaceParams
    tgt: SpaceParams
    g: GammaValue

    def __post_init__(self):
        s, t = self.src, self.tgt
        self.d = s.d
        self.i1, self.i2 = s.inv_p, t.inv_p
        self.t1, self.t2 = s.tau, t.tau
        self.p1, self.p2 = s.p, t.p
        self.q1, self.q2 = s.q, t.q
        self.s1, self.s2 = s.s, t.s
        self.diff = (s.s - t.s) / s.d
        self.e1 = self.i1 - self.t1 - self.i2 + self.t2
        self.r1, self.r2 = region_of(s), region_of(t)

    @property
    def e2(self) -> Fraction:
        return self.i1 - self.t1 - self.i2 + _ratio_tau(self.p1, self.t1, self.p2)

    def base_values(self) -> dict:
        return {"gamma": self.g.gamma, "(s1-s2)/d": self.diff}


def _verdict(relation: Relation, *steps, detail: Optional[UnknownDetail] = None) -> Verdict:
    return Verdict(relation, list(steps), detail)


CNC = Relation.CONTINUOUS_NOT_COMPACT
NOT = Relation.NOT_CONTINUOUS
UNK = Relation.UNKNOWN


# bounded domains, limiting case

def classify_domain_tau2large(src: SpaceParams, tgt: SpaceParams) -> Verdict:
    ctx = _limiting_ctx(src, tgt, Setting.DOMAIN)
    if ctx.r2 is not RegionTag.LARGE:
        raise QueryError("target is not in the large region")
    return _domain_tau2large(ctx)


def _domain_tau2large(ctx: _Ctx) -> Verdict:
    return _verdict(CNC, rule("domain.target_large", **ctx.base_values()))


def classify_domain_tau1large(src: SpaceParams, tgt: SpaceParams) -> Verdict:
    ctx = _limiting_ctx(src, tgt, Setting.DOMAIN)
    if ctx.r1 is not RegionTag.LARGE or ctx.r2 is RegionTag.LARGE:
        raise QueryError("needs a large-region source and a target outside the large region")
    return _domain_tau1large(ctx)


def _domain_tau1large(ctx: _Ctx) -> Verdict:
    rel = CNC if ctx.q2.is_inf else NOT
    return _verdict(rel, rule("domain.source_large", q2=ctx.q2, **ctx.base_values()))


def classify_classical(src: SpaceParams, tgt: SpaceParams) -> Verdict:
    ctx = _limiting_ctx(src, tgt, Setting.DOMAIN)
    if ctx.t1 != 0 or ctx.t2 != 0:
        raise QueryError("classical rules need tau1 = tau2 = 0")
    return _domain_classical(ctx)


def _domain_classical(ctx: _Ctx) -> Verdict:
    gap = ctx.i1 - ctx.i2
    if ctx.src.scale is Scale.F:
        ok = gap > 0 or ctx.q1 <= ctx.q2
        step = rule("domain.classical_f", **{"1/p1-1/p2": gap, "q1": ctx.q1, "q2": ctx.q2})
    else:
        ok = ctx.q1 <= ctx.q2
        step = rule("domain.classical_b", q1=ctx.q1, q2=ctx.q2)
    return _verdict(CNC if ok else NOT, step)


def classify_domain_B_moderate(src: SpaceParams, tgt: SpaceParams) -> Verdict:
    ctx = _limiting_ctx(src, tgt, Setting.DOMAIN)
    _require_moderate(ctx, Scale.B)
    return _domain_b_moderate(ctx)


def _require_moderate(ctx: _Ctx, scale: Scale) -> None:
    if ctx.src.scale is not scale:
        raise QueryError(f"needs scale {scale.value}")
    if RegionTag.LARGE in (ctx.r1, ctx.r2):
        raise QueryError("needs both spaces outside the large region")
    if ctx.t1 + ctx.t2 == 0:
        raise QueryError("tau1 = tau2 = 0 is handled by the classical rules")


def _domain_b_moderate(ctx: _Ctx) -> Verdict:
    g = ctx.g.gamma
    e1, e2 = ctx.e1, ctx.e2
    ratio = ratio_convention(ctx.p1, ctx.p2)
    pt1 = product_convention(ctx.p1, ctx.t1)
    pt2 = product_convention(ctx.p2, ctx.t2)
    q1, q2 = ctx.q1, ctx.q2
    values = dict(ctx.base_values(), e_tau2=e1, e_tau1=e2, q1=q1, q2=q2)
    tau2_branch = g == e1 and e1 > 0
    sufficient = [
        ("domain.b.product_order", tau2_branch and pt1 < pt2),
        ("domain.b.equal_tau", tau2_branch and ctx.t1 == ctx.t2),
        ("domain.b.ratio_tau", tau2_branch and ctx.t1 != ctx.t2 and ctx.t1 != 0
         and ratio == ExtRational(ctx.t2 / ctx.t1) and q1 <= _times(ratio, q2)),
        ("domain.b.ratio_branch", g == e2 and e2 > 0 and q1 <= _times(ratio, q2)),
        ("domain.b.equal_smoothness", ctx.s1 == ctx.s2 and q1 <= _times(_min1(ratio), q2)),
    ]
    held = [rid for rid, ok in sufficient if ok]
    if held:
        return _verdict(CNC, *[rule(rid, **values) for rid in held])
    necessary_applies = g == 0 or (g == e2 and e2 > 0)
    if necessary_applies and q1 > q2:
        return _verdict(NOT, rule("domain.b.necessary_q", **values))
    detail = UnknownDetail([rid for rid, _ in sufficient],
                           ["domain.b.necessary_q"] if necessary_applies else [])
    return _verdict(UNK, rule("domain.b.gap", **values), detail=detail)


def classify_domain_F_moderate(src: SpaceParams, tgt: SpaceParams) -> Verdict:
    ctx = _limiting_ctx(src, tgt, Setting.DOMAIN)
    _require_moderate(ctx, Scale.F)
    return _domain_f_moderate(ctx)


def _domain_f_moderate(ctx: _Ctx) -> Verdict:
    q1, q2 = ctx.q1, ctx.q2
    values = dict(ctx.base_values(), q1=q1, q2=q2)
    b1 = ctx.r1 is RegionTag.BOUNDARY
    b2 = ctx.r2 is RegionTag.BOUNDARY
    if b1 and b2:
        return _verdict(CNC if q1 <= q2 else NOT, rule("domain.f.boundary_both", **values))
    if b1:
        if q1 <= q2:
            return _verdict(CNC, rule("domain.f.boundary_source", **values))
        bound = max(ctx.p2, q2)
        if q1 > bound:
            return _verdict(NOT, rule("domain.f.boundary_source_necessary", **values))
        detail = UnknownDetail(["domain.f.boundary_source"], ["domain.f.boundary_source_necessary"])
        return _verdict(UNK, rule("domain.f.gap", **values), detail=detail)
    if b2:
        return _verdict(CNC, rule("domain.f.boundary_target", **values))
    lhs, rhs = ctx.i1 - ctx.i2, ctx.t1 - ctx.t2
    values.update({"1/p1-1/p2": lhs, "tau1-tau2": rhs})
    if lhs > rhs:
        return _verdict(CNC, rule("domain.f.interior_p", **values))
    if q1 <= _times(_min1(ratio_convention(ctx.p1, ctx.p2)), q2):
        return _verdict(CNC, rule("domain.f.interior_q", **values))
    if q1 > q2:
        return _verdict(NOT, rule("domain.f.interior_necessary", **values))
    detail = UnknownDetail(["domain.f.interior_p", "domain.f.interior_q"],
                           ["domain.f.interior_necessary"])
    return _verdict(UNK, rule("domain.f.gap", **values), detail=detail)


def _domain_limiting(ctx: _Ctx) -> Verdict:
    if ctx.r2 is RegionTag.LARGE:
        return _domain_tau2large(ctx)
    if ctx.r1 is RegionTag.LARGE:
        return _domain_tau1large(ctx)
    if ctx.t1 == 0 and ctx.t2 == 0:
        return _domain_classical(ctx)
    if ctx.src.scale is Scale.B:
        return _domain_b_moderate(ctx)
    return _domain_f_moderate(ctx)


def _limiting_ctx(src: SpaceParams, tgt: SpaceParams, setting: Setting) -> _Ctx:
    check_query(src, tgt)
    if src.setting is not setting:
        raise QueryError(f"needs setting {setting.value}")
    n1, n2 = canonical(src), canonical(tgt)
    ctx = _Ctx(n1, n2, gamma(n1, n2))
    if setting is Setting.DOMAIN and ctx.diff != ctx.g.gamma:
        raise QueryError("not a limiting case: (s1-s2)/d != gamma")
    return ctx


# whole space

def classify_rn(src: SpaceParams, tgt: SpaceParams) -> Verdict:
    check_query(src, tgt)
    if src.setting is not Setting.RN:
        raise QueryError("needs setting rn")
    n1, n2 = canonical(src), canonical(tgt)
    return _rn(_Ctx(n1, n2, gamma(n1, n2)), src.scale)


def _rn(ctx: _Ctx, scale: Scale) -> Verdict:
    # dispatch on the scale of the query: a collapsed large space is B-typed either way
    if scale is Scale.B:
        return _rn_b(ctx)
    return _rn_f(ctx)


def _cont(ok: bool) -> Relation:
    return CNC if ok else NOT


def _rn_b(ctx: _Ctx) -> Verdict:
    E, x = ctx.e1, ctx.diff
    values = {"exponent": E, "(s1-s2)/d": x}
    if ctx.r2 is RegionTag.LARGE:
        return _verdict(_cont(x >= E), rule("rn.b.target_large", **values))
    if ctx.r1 is RegionTag.LARGE:
        ok = ((x > E and ctx.t2 >= ctx.i2) or (x == E and ctx.t2 > ctx.i2)
              or (x == E and ctx.t2 == ctx.i2 and ctx.q2.is_inf))
        return _verdict(_cont(ok), rule("rn.b.source_large", **values))
    # both moderate
    lhs, rhs = ctx.t1 * ctx.i2, ctx.t2 * ctx.i1
    st = (ctx.s1 - ctx.s2) * (ctx.t1 - ctx.t2)
    q1, q2 = ctx.q1, ctx.q2
    values.update({"tau1/p2": lhs, "tau2/p1": rhs, "q1": q1, "q2": q2})
    pt1 = product_convention(ctx.p1, ctx.t1)
    pt2 = product_convention(ctx.p2, ctx.t2)
    if x == E:
        sub_cases = (
            (st != 0 and lhs < rhs)
            or (st != 0 and lhs == rhs and ctx.t1 * ctx.q2.inv() <= ctx.t2 * ctx.q1.inv())
            or (st == 0 and q1 <= q2
                and not (ctx.s1 == ctx.s2 and pt1 == 1 and pt2 == 1 and ctx.p1 < ctx.p2))
        )
    else:
        sub_cases = x > E
    if E >= 0 and lhs <= rhs and sub_cases:
        return _verdict(CNC, rule("rn.b.moderate_sufficient", **values))
    # the classical tau = 0 limiting case needs q1 <= q2, so the equal-tau rule is kept to tau > 0
    if x == E and E > 0 and ctx.t1 == ctx.t2 > 0:
        return _verdict(CNC, rule("rn.b.equal_tau", **values))
    necessary = E >= 0 and lhs <= rhs and x >= E and (ctx.s1 != ctx.s2 or q1 <= q2)
    if not necessary:
        return _verdict(NOT, rule("rn.b.moderate_necessary", **values))
    e2 = ctx.e2
    if x == e2 and e2 > 0 and q1 > q2:
        return _verdict(NOT, rule("rn.b.ratio_branch_necessary", **values))
    detail = UnknownDetail(["rn.b.moderate_sufficient", "rn.b.equal_tau"],
                           ["rn.b.moderate_necessary"]
                           + (["rn.b.ratio_branch_necessary"] if x == e2 and e2 > 0 else []))
    return _verdict(UNK, rule("rn.b.gap", **values), detail=detail)


def _rn_f(ctx: _Ctx) -> Verdict:
    E, x = ctx.e1, ctx.diff
    values = {"exponent": E, "(s1-s2)/d": x}
    large1, large2 = ctx.r1 is RegionTag.LARGE, ctx.r2 is RegionTag.LARGE
    if large1 and large2:
        return _verdict(_cont(x >= E), rule("rn.f.both_large", **values))
    if large2:
        return _verdict(_cont(x >= E), rule("rn.f.target_large", **values))
    if large1:
        return _verdict(UNK, rule("rn.f.not_covered", **values), detail=UnknownDetail(not_covered=True))
    b1, b2 = ctx.r1 is RegionTag.BOUNDARY, ctx.r2 is RegionTag.BOUNDARY
    if b1 and b2:
        a1 = SpaceParams(Scale.B, ctx.s1, ctx.q1, ctx.q1, ctx.q1.inv(), ctx.d, Setting.RN)
        a2 = SpaceParams(Scale.B, ctx.s2, ctx.q2, ctx.q2, ctx.q2.inv(), ctx.d, Setting.RN)
        inner = _rn_b(_Ctx(a1, a2, gamma(a1, a2)))
        inner.trace.insert(0, rule("coincide.f_boundary", side="both"))
        return inner
    if b1 or b2:
        return _verdict(UNK, rule("rn.f.not_covered", **values), detail=UnknownDetail(not_covered=True))
    lhs, rhs = ctx.t1 * ctx.i2, ctx.t2 * ctx.i1
    values.update({"tau1/p2": lhs, "tau2/p1": rhs, "q1": ctx.q1, "q2": ctx.q2})
    smooth = x > E or (x == E and (ctx.s1 != ctx.s2 or ctx.q1 <= ctx.q2))
    ok = E >= 0 and lhs <= rhs and smooth
    return _verdict(_cont(ok), rule("rn.f.interior", **values))


# dispatcher

def classify(src: SpaceParams, tgt: SpaceParams) -> Verdict:
    """Decide the embedding src -> tgt."""
    check_query(src, tgt)
    n1, n2 = canonical(src), canonical(tgt)
    pre = []
    for side, orig, norm in (("src", src, n1), ("tgt", tgt, n2)):
        if norm != orig:
            pre.append(rule("coincide.large", side=side, s=norm.s))
    g = gamma(n1, n2)
    ctx = _Ctx(n1, n2, g)
    if src.setting is Setting.RN:
        verdict = _rn(ctx, src.scale)
    elif ctx.diff > g.gamma:
        verdict = _verdict(Relation.COMPACT, rule("domain.compact", **ctx.base_values()))
    elif ctx.diff < g.gamma:
        verdict = _verdict(NOT, rule("domain.below_threshold", **ctx.base_values()))
    else:
        verdict = _domain_limiting(ctx)
    verdict.trace = pre + verdict.trace
    # report gamma of the pair as given; the comparison with (s1-s2)/d is coincidence invariant
    verdict.gamma = g if (n1 is src and n2 is tgt) else gamma(src, tgt)
    verdict.src, verdict.tgt = src, tgt
    verdict.normalized_src, verdict.normalized_tgt = n1, n2
    return verdict


def classify_query(query: EmbeddingQuery) -> Verdict:
    return classify(query.src, query.tgt)


# Besov-Morrey endpoints

def _is_hoelder(ns: NamedSpace) -> bool:
    return ns.p.is_inf and ns.u.is_inf


def classify_besov_morrey(src: NamedSpace, tgt: NamedSpace) -> Verdict:
    """Embeddings between N^s_{u,p,q} and B^s_{inf,q} = N^s_{inf,inf,q} on domains."""
    for ns in (src, tgt):
        if ns.kind is not NamedKind.BESOV_MORREY:
            raise NotBesovMorreyEndpoint("not a Besov-Morrey endpoint query")
    if src.d != tgt.d or src.setting is not Setting.DOMAIN or tgt.setting is not Setting.DOMAIN:
        raise NotBesovMorreyEndpoint("not a Besov-Morrey endpoint query")
    d = src.d
    if _is_hoelder(tgt):
        x = (src.s - tgt.s) / d
        bound = src.u.inv()
        values = {"(s1-s2)/d": x, "1/u1": bound, "q1": src.q, "q2": tgt.q}
        step = rule("nn.to_hoelder", **values)
        if x > bound:
            return _verdict(Relation.COMPACT, step)
        return _verdict(CNC if (x == bound and src.q <= tgt.q) else NOT, step)
    if _is_hoelder(src):
        values = {"s1": src.s, "s2": tgt.s, "q1": src.q, "q2": tgt.q}
        step = rule("nn.from_hoelder", **values)
        if src.s > tgt.s:
            return _verdict(Relation.COMPACT, step)
        return _verdict(CNC if (src.s == tgt.s and src.q <= tgt.q) else NOT, step)
    raise NotBesovMorreyEndpoint("not a Besov-Morrey endpoint query")


# hybrid spaces

def hybrid_same_r_table(s1, s2, p1, p2, q1, q2, r) -> tuple:
    """Explicit equal-r table on domains (B scale).

    Returns (label, rule_id) where label is 'continuous', 'not_continuous' or 'gap'.
    """
    ratio = Fraction(p1.value) / Fraction(p2.value)
    if r > 0:
        return ("continuous" if s1 >= s2 else "not_continuous"), "hybrid.r_positive"
    if r == 0:
        if q2.is_inf:
            return ("continuous" if s1 >= s2 else "not_continuous"), "hybrid.r_zero_q2_inf"
        if q1.is_inf:
            return ("continuous" if s1 > s2 else "not_continuous"), "hybrid.r_zero_q1_inf"
        if s1 > s2 or (s1 == s2 and q1 <= _times(_min1(ExtRational(ratio)), q2)):
            return "continuous", "hybrid.r_zero_finite"
        if s1 > s2 or (s1 == s2 and q1 <= q2):
            return "gap", "hybrid.r_zero_finite"
        return "not_continuous", "hybrid.r_zero_finite"
    if p1 >= p2:
        ok = s1 > s2 or (s1 == s2 and q1 <= q2)
        return ("continuous" if ok else "not_continuous"), "hybrid.r_negative_p_ge"
    edge = r * (ratio - 1)
    diff = s1 - s2
    if diff > edge or (diff == edge and q1 <= _times(ExtRational(ratio), q2)):
        return "continuous", "hybrid.r_negative_p_lt"
    if diff == edge and q1 <= q2:
        return "gap", "hybrid.r_negative_p_lt"
    return "not_continuous", "hybrid.r_negative_p_lt"


def classify_hybrid(src: NamedSpace, tgt: NamedSpace) -> Verdict:
    """Translate hybrid spaces to tau-spaces, classify, and cross-check equal r."""
    for ns in (src, tgt):
        if ns.kind is not NamedKind.HYBRID:
            raise QueryError("both spaces must be hybrid spaces")
    verdict = classify(resolve_named(src), resolve_named(tgt))
    r = src.r
    in_table = (src.r == tgt.r and src.scale is Scale.B and src.setting is Setting.DOMAIN
                and r > -src.d * min(src.p.inv(), tgt.p.inv()))
    if not in_table:
        return verdict
    label, rid = hybrid_same_r_table(src.s, tgt.s, src.p, tgt.p, src.q, tgt.q, r)
    check = rule(rid, r=r, s1=src.s, s2=tgt.s, q1=src.q, q2=tgt.q)
    rel = verdict.relation
    if label != "gap" and rel is not UNK and rel.is_continuous != (label == "continuous"):
        raise InternalConsistencyError(
            f"hybrid table says {label} but rule engine says {rel.value} (rule {verdict.rule_id})")
    if rel is UNK and label != "gap":
        verdict.relation = CNC if label == "continuous" else NOT
        verdict.unknown_detail = None
    verdict.trace.append(check)
    return verdict
