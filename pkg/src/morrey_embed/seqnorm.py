"""Quasi-norms of the sequence spaces b^{s,tau}_{p,q} and f^{s,tau}_{p,q}.

The supremum over dyadic cubes P runs over the finite candidate set of
:func:`dyadic.candidate_cubes`. Block sums are aggregated per level and summed
with ``math.fsum``; the f-norm integrand is integrated exactly on the tree of
support cubes, grouping all points that share the same ancestor chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .dyadic import (
    CoeffSeq,
    DyadicCube,
    bounding_levels,
    candidate_cubes,
    contains,
    orthant_groups,
)
from .params import ExtRational, ParamError, Scale, as_ext, parse_rational

BRUTE_FORCE_LIMIT = 10_000


class NormOverflow(ArithmeticError):
    """A norm left the double range; ``J`` is the truncation level involved."""

    def __init__(self, message: str, J: int):
        super().__init__(f"{message} (J={J})")
        self.J = J


@dataclass(frozen=True)
class NormParams:
    s: Fraction
    tau: Fraction
    p: ExtRational
    q: ExtRational
    d: int = 1
    restriction: Optional[DyadicCube] = None
    scale: Scale = Scale.B

    def __post_init__(self):
        object.__setattr__(self, "s", parse_rational(self.s))
        object.__setattr__(self, "tau", parse_rational(self.tau))
        object.__setattr__(self, "p", as_ext(self.p))
        object.__setattr__(self, "q", as_ext(self.q))
        object.__setattr__(self, "scale", Scale(self.scale))
        if self.p == 0 or self.q == 0:
            raise ParamError("p and q must be positive")
        if self.tau < 0:
            raise ParamError("tau must be >= 0")
        if self.restriction is not None:
            if self.restriction.j > 0:
                raise ParamError("the restriction cube must have level <= 0")
            if self.restriction.d != self.d:
                raise ParamError("restriction cube has the wrong dimension")

    @classmethod
    def from_space(cls, sp, restriction: Optional[DyadicCube] = None) -> "NormParams":
        return cls(sp.s, sp.tau, sp.p, sp.q, sp.d, restriction, sp.scale)

    def to_json(self) -> dict:
        out = {"scale": self.scale.value, "s": str(self.s), "tau": str(self.tau),
               "p": str(self.p), "q": str(self.q), "d": self.d}
        if self.restriction is not None:
            out["restrict"] = self.restriction.to_json()
        return out


@dataclass
class NormResult:
    value: float
    argmax_cube: Optional[DyadicCube]
    candidates_evaluated: int

    def to_json(self) -> dict:
        return {"value": float(f"{self.value:.12g}"),
                "argmax_cube": None if self.argmax_cube is None else self.argmax_cube.to_json(),
                "candidates_evaluated": self.candidates_evaluated}


def _fl(x: ExtRational) -> float:
    return math.inf if x.is_inf else float(x.value)


def _pow2(exponent) -> float:
    return 2.0 ** float(exponent)


def _finish(value: float, J: int) -> float:
    if not math.isfinite(value):
        raise NormOverflow("norm is not finite in double precision", J)
    return value


def _pick(best, cube: DyadicCube, value: float):
    if best is None or value > best[1]:
        return (cube, value)
    return best


# b-norm

class _BesovEval:
    """Evaluates |P|^{-tau}(sum_j 2^{jcq} sum_i [sum_m |t|^p]^{q/p})^{1/q} per cube."""

    def __init__(self, t: CoeffSeq, np_: NormParams):
        self.t, self.np = t, np_
        self.p, self.q = _fl(np_.p), _fl(np_.q)
        self.c = np_.s + Fraction(np_.d, 2) - np_.d * np_.p.inv()
        self.dtau = np_.d * np_.tau
        self.J = t.finest_level

    def level_term(self, i: int, j: int, values: list) -> float:
        """Contribution of block (i, j) before the 1/q power (q = inf: the block sup)."""
        p, q = self.p, self.q
        if math.isinf(p):
            block = max(values)
            return _pow2(j * self.c) * block if math.isinf(q) else (_pow2(j * self.c) * block) ** q
        s = math.fsum(v ** p for v in values)
        if math.isinf(q):
            return _pow2(j * self.c) * s ** (1.0 / p)
        return _pow2(j * self.c * self.np.q.value) * s ** (q / p)

    def value(self, level: int, blocks: dict) -> float:
        terms = [self.level_term(i, j, vals) for (i, j), vals in sorted(blocks.items())]
        if not terms:
            return 0.0
        weight = _pow2(level * self.dtau)
        if math.isinf(self.q):
            return _finish(weight * max(terms), self.J)
        return _finish(weight * math.fsum(terms) ** (1.0 / self.q), self.J)


def _blocks_inside(entries: list, P: DyadicCube) -> dict:
    blocks: dict = {}
    for (i, j, m), v in entries:
        if contains(P, DyadicCube(j, m)):
            blocks.setdefault((i, j), []).append(abs(v))
    return blocks


def _index_by_ancestor(t: CoeffSeq, stop: int) -> dict:
    """level -> {ancestor cube -> {(i, j) -> [|t|]}} for levels finest..stop."""
    index: dict = {}
    for (i, j, m), v in t.items():
        cube = DyadicCube(j, m)
        for level in range(j, stop - 1, -1):
            anc = cube.ancestor(level)
            index.setdefault(anc, {}).setdefault((i, j), []).append(abs(v))
    return index


def _orthant_total(t: CoeffSeq, ev) -> float:
    """An upper bound for the inner sum over a whole orthant (no tau weight)."""
    best = 0.0
    for group in orthant_groups(t.support_cubes()).values():
        keys = {(c.j, c.m) for c in group}
        blocks: dict = {}
        for (i, j, m), v in t.items():
            if (j, m) in keys:
                blocks.setdefault((i, j), []).append(abs(v))
        best = max(best, ev.value(0, blocks))
    return best


def _restrict(cubes: list, restriction: Optional[DyadicCube]) -> list:
    if restriction is None:
        return cubes
    inside = [c for c in cubes if contains(restriction, c)]
    if restriction not in inside:
        inside.append(restriction)
    return inside


def besov_seq_norm(t: CoeffSeq, np_: NormParams) -> NormResult:
    """The b^{s,tau}_{p,q} quasi-norm (sup over P, optionally P inside a restriction cube)."""
    _check_dims(t, np_)
    if not t.entries:
        return NormResult(0.0, None, 0)
    ev = _BesovEval(t, np_)
    total = _orthant_total(t, ev)
    first = candidate_cubes(t, np_.tau, total)
    index = _index_by_ancestor(t, first.stop_level)
    best = None
    for cube in _restrict(t.support_cubes(), np_.restriction):
        best = _pick(best, cube, ev.value(cube.j, index.get(cube) or _blocks_inside(list(t.items()), cube)))
    cands = candidate_cubes(t, np_.tau, total, best[1])
    cubes = _restrict(cands.cubes, np_.restriction)
    best = None
    entries = None
    for cube in cubes:
        blocks = index.get(cube)
        if blocks is None:
            entries = entries if entries is not None else list(t.items())
            blocks = _blocks_inside(entries, cube)
        best = _pick(best, cube, ev.value(cube.j, blocks))
    return NormResult(best[1], best[0], len(cubes))


def _check_dims(t: CoeffSeq, np_: NormParams) -> None:
    if t.d != np_.d:
        raise ParamError(f"sequence has d={t.d} but parameters have d={np_.d}")


# f-norm

class _TLEval:
    def __init__(self, t: CoeffSeq, np_: NormParams):
        if np_.p.is_inf:
            raise ParamError("the f-norm requires p < inf")
        self.t, self.np = t, np_
        self.p, self.q = _fl(np_.p), _fl(np_.q)
        self.d = np_.d
        self.dtau = np_.d * np_.tau
        self.sd = np_.s + Fraction(np_.d, 2)
        self.J = t.finest_level
        weights: dict = {}
        for (i, j, m), v in t.items():
            weights.setdefault(DyadicCube(j, m), []).append(self.weight(j, abs(v)))
        self.weights = weights

    def weight(self, j: int, v: float) -> float:
        if math.isinf(self.q):
            return _pow2(j * self.sd) * v
        return _pow2(j * self.sd * self.np.q.value) * v ** self.q

    def combine(self, acc: tuple) -> float:
        if not acc:
            return 0.0
        if math.isinf(self.q):
            return max(acc) ** self.p
        return math.fsum(acc) ** (self.p / self.q)


def _tree(nodes: list) -> dict:
    children: dict = {}
    node_set = set(nodes)
    for cube in nodes:
        par = cube.parent()
        if par in node_set:
            children.setdefault(par, []).append(cube)
    return children


def _tl_value(ev: _TLEval, P: DyadicCube, children: dict) -> float:
    pieces = []
    full = 2 ** ev.d
    stack = [(P, ())]
    while stack:
        node, acc = stack.pop()
        own = ev.weights.get(node)
        if own:
            acc = acc + tuple(own)
        kids = children.get(node, ())
        free = full - len(kids)
        if free and acc:
            pieces.append(free * math.ldexp(1.0, -(node.j + 1) * ev.d) * ev.combine(acc))
        for kid in sorted(kids):
            stack.append((kid, acc))
    integral = math.fsum(pieces)
    if integral == 0.0:
        return 0.0
    return _finish(_pow2(P.j * ev.dtau) * integral ** (1.0 / ev.p), ev.J)


def tl_seq_norm(t: CoeffSeq, np_: NormParams) -> NormResult:
    """The f^{s,tau}_{p,q} quasi-norm; requires p < inf."""
    _check_dims(t, np_)
    ev = _TLEval(t, np_)
    if not t.entries:
        return NormResult(0.0, None, 0)
    cands = candidate_cubes(t, np_.tau, 0.0)
    children = _tree(cands.cubes)
    cubes = _restrict(cands.cubes, np_.restriction)
    if np_.restriction is not None and np_.restriction not in children:
        children = _tree(sorted(set(cands.cubes) | {np_.restriction}))
    best = None
    for cube in cubes:
        best = _pick(best, cube, _tl_value(ev, cube, children))
    return NormResult(best[1], best[0], len(cubes))


def seq_norm(t: CoeffSeq, np_: NormParams) -> NormResult:
    if np_.scale is Scale.F:
        return tl_seq_norm(t, np_)
    return besov_seq_norm(t, np_)


# brute-force oracle

def _brute_candidates(t: CoeffSeq, np_: NormParams, level_floor: int) -> list:
    support = t.support_cubes()
    cubes = []
    for level in range(level_floor, t.finest_level + 1):
        for cube in bounding_levels(support, level):
            if np_.restriction is None or contains(np_.restriction, cube):
                cubes.append(cube)
                if len(cubes) > BRUTE_FORCE_LIMIT:
                    raise ParamError(f"brute force guard: more than {BRUTE_FORCE_LIMIT} cubes")
    return cubes


def brute_force_norm(t: CoeffSeq, np_: NormParams, level_floor: int = -8) -> NormResult:
    """Exhaustive enumeration over every cube from ``level_floor`` to the finest level
    meeting the bounding box of the support. Verification oracle only."""
    _check_dims(t, np_)
    if not t.entries:
        return NormResult(0.0, None, 0)
    cubes = _brute_candidates(t, np_, level_floor)
    entries = list(t.items())
    p, q = _fl(np_.p), _fl(np_.q)
    dtau = np_.d * np_.tau
    best = None
    if np_.scale is Scale.B:
        c = np_.s + Fraction(np_.d, 2) - np_.d * np_.p.inv()
        for P in cubes:
            blocks: dict = {}
            for (i, j, m), v in entries:
                if contains(P, DyadicCube(j, m)):
                    blocks.setdefault((i, j), []).append(abs(v))
            level_terms = []
            for (i, j), vals in sorted(blocks.items()):
                block = max(vals) if math.isinf(p) else math.fsum(v ** p for v in vals) ** (1.0 / p)
                level_terms.append(2.0 ** float(j * c) * block)
            if not level_terms:
                value = 0.0
            elif math.isinf(q):
                value = max(level_terms)
            else:
                value = math.fsum(x ** q for x in level_terms) ** (1.0 / q)
            best = _pick(best, P, 2.0 ** float(P.j * dtau) * value)
        return NormResult(best[1], best[0], len(cubes))
    if np_.p.is_inf:
        raise ParamError("the f-norm requires p < inf")
    sd = np_.s + Fraction(np_.d, 2)
    finest = t.finest_level
    cells = list(bounding_levels(t.support_cubes(), finest))
    for P in cubes:
        pieces = []
        for cell in cells:
            if not contains(P, cell):
                continue
            terms = [2.0 ** float(j * sd) * abs(v) for (i, j, m), v in entries
                     if contains(DyadicCube(j, m), cell) and contains(P, DyadicCube(j, m))]
            if not terms:
                continue
            if math.isinf(q):
                local = max(terms) ** p
            else:
                local = math.fsum(x ** q for x in terms) ** (p / q)
            pieces.append(cell.volume * local)
        integral = math.fsum(pieces)
        value = 2.0 ** float(P.j * dtau) * integral ** (1.0 / p) if integral else 0.0
        best = _pick(best, P, value)
    return NormResult(best[1], best[0], len(cubes))


# level-uniform sequences

@dataclass
class LevelUniformSeq:
    """t_{i,j,m} = mantissa_j * 2^{exponent_j} on every Q_{j,m} inside ``root``.

    Norms are evaluated in closed form with exact rational exponents, so very deep
    truncations (2^J entries) cost O(J^2).
    """

    d: int
    root: DyadicCube
    levels: list  # index j -> (Fraction exponent, float mantissa >= 0)
    i: int = 1

    def __post_init__(self):
        if self.root.d != self.d or self.root.j < 0:
            raise ParamError("root must be a cube of level >= 0 in dimension d")
        self.levels = [(Fraction(e), float(a)) for e, a in self.levels]

    @property
    def J(self) -> int:
        return len(self.levels) - 1

    def coeff(self, j: int) -> float:
        e, a = self.levels[j]
        return a * 2.0 ** float(e)

    def expand(self, limit: int = 200_000) -> CoeffSeq:
        entries = {}
        count = 0
        for j in range(self.root.j, self.J + 1):
            value = self.coeff(j)
            if value == 0.0:
                continue
            shift = j - self.root.j
            count += 2 ** (shift * self.d)
            if count > limit:
                raise ParamError("expansion too large")
            ranges = [range(x << shift, (x + 1) << shift) for x in self.root.m]
            positions = [()]
            for r in ranges:
                positions = [pre + (x,) for pre in positions for x in r]
            for m in positions:
                entries[(self.i, j, m)] = value
        return CoeffSeq(self.d, entries)


def level_uniform_norm(seq: LevelUniformSeq, np_: NormParams) -> NormResult:
    """Closed-form norm of a level-uniform sequence (all cubes inside the root agree)."""
    if seq.d != np_.d:
        raise ParamError("dimension mismatch")
    d, jr = seq.d, seq.root.j
    q_inf = np_.q.is_inf
    qv = None if q_inf else np_.q.value
    inv_p = np_.p.inv()
    if np_.scale is Scale.F and np_.p.is_inf:
        raise ParamError("the f-norm requires p < inf")
    best = None
    for L in range(jr, seq.J + 1):
        exact, floats = [], []
        for j in range(max(L, 0), seq.J + 1):
            e, a = seq.levels[j]
            if a == 0.0:
                continue
            if np_.scale is Scale.B:
                c = np_.s + Fraction(d, 2) - d * inv_p
                ex = j * c + e + (j - L) * d * inv_p
            else:
                ex = j * (np_.s + Fraction(d, 2)) + e
            exact.append(ex)
            floats.append(a)
        if not exact:
            value = 0.0
        else:
            if np_.scale is Scale.B:
                lead = L * d * np_.tau
            else:
                lead = L * d * (np_.tau - inv_p)
            if q_inf:
                top = max(range(len(exact)), key=lambda k: (exact[k], floats[k]))
                value = 2.0 ** float(lead + exact[top]) * max(
                    2.0 ** float(ex - exact[top]) * a for ex, a in zip(exact, floats))
            else:
                top = max(exact)
                s = math.fsum(2.0 ** float((ex - top) * qv) * a ** float(qv)
                              for ex, a in zip(exact, floats))
                value = 2.0 ** float(lead + top) * s ** (1.0 / float(qv))
        cube = DyadicCube(L, tuple(x << (L - jr) for x in seq.root.m))
        best = _pick(best, cube, _finish(value, seq.J))
    return NormResult(best[1], best[0], seq.J - jr + 1)


def norm_of(seq, np_: NormParams) -> NormResult:
    if isinstance(seq, LevelUniformSeq):
        return level_uniform_norm(seq, np_)
    return seq_norm(seq, np_)


# mixed norms on dyadic step functions

class MixedVariant(str, Enum):
    LQLP = "LqLp"
    LPLQ = "LpLq"


@dataclass
class StepFnSeq:
    """g_0, ..., g_J; each g_j maps pairwise disjoint dyadic cubes to values."""

    d: int
    levels: list = field(default_factory=list)

    def __post_init__(self):
        for j, g in enumerate(self.levels):
            if any(cube.d != self.d for cube in g):
                raise ParamError("cube of wrong dimension")
            top = min((c.j for c in g), default=0)
            for cube in g:
                for anc in cube.ancestors(top):
                    if anc in g:
                        raise ParamError(f"overlapping cubes {anc} and {cube} in g_{j}")

    @property
    def J(self) -> int:
        return len(self.levels) - 1

    def grid_level(self) -> int:
        return max((c.j for g in self.levels for c in g), default=0)

    def on_grid(self, level: Optional[int] = None) -> dict:
        """cell -> list of values g_0(cell), ..., g_J(cell) on the common refinement."""
        level = self.grid_level() if level is None else level
        cells: dict = {}
        for j, g in enumerate(self.levels):
            for cube, value in g.items():
                if value == 0.0:
                    continue
                shift = level - cube.j
                ranges = [range(x << shift, (x + 1) << shift) for x in cube.m]
                positions = [()]
                for r in ranges:
                    positions = [pre + (x,) for pre in positions for x in r]
                for m in positions:
                    cells.setdefault(DyadicCube(level, m), [0.0] * (self.J + 1))[j] = float(value)
        return cells

    def scaled(self, c: float) -> "StepFnSeq":
        return StepFnSeq(self.d, [{k: c * v for k, v in g.items()} for g in self.levels])


def _mixed_value(cells: list, level: int, J: int, p: float, q: float, d: int, dtau, variant) -> float:
    start = max(level, 0)
    weight = 2.0 ** float(level * dtau)
    if variant is MixedVariant.LQLP:
        per_j = []
        for j in range(start, J + 1):
            if math.isinf(p):
                norm = max((abs(vals[j]) for _, vals in cells), default=0.0)
            else:
                s = math.fsum(vol * abs(vals[j]) ** p for vol, vals in cells)
                norm = s ** (1.0 / p)
            per_j.append(norm)
        if not per_j:
            return 0.0
        inner = max(per_j) if math.isinf(q) else math.fsum(x ** q for x in per_j) ** (1.0 / q)
        return weight * inner
    locals_ = []
    for vol, vals in cells:
        tail = [abs(v) for v in vals[start:]]
        if not tail:
            continue
        local = max(tail) if math.isinf(q) else math.fsum(v ** q for v in tail) ** (1.0 / q)
        locals_.append((vol, local))
    if not locals_:
        return 0.0
    if math.isinf(p):
        return weight * max(v for _, v in locals_)
    return weight * math.fsum(vol * v ** p for vol, v in locals_) ** (1.0 / p)


def _subcell_value(vals: list, level: int, p: ExtRational, q: float, d: int, tau: Fraction) -> float:
    tail = [abs(v) for v in vals[level:]]
    if not tail:
        return 0.0
    inner = max(tail) if math.isinf(q) else math.fsum(v ** q for v in tail) ** (1.0 / q)
    return 2.0 ** float(level * d * (tau - p.inv())) * inner


def mixed_norm(g: StepFnSeq, p, q, tau, variant, brute_floor: Optional[int] = None) -> NormResult:
    """sup_P |P|^{-tau} of the l_q(L_p(P)) or L_p(P)(l_q) norm of {g_j}_{j >= max(j_P, 0)}.

    Cubes finer than the common grid are handled in closed form. With
    ``brute_floor`` every cube from that level up to the grid level meeting the
    bounding box is enumerated instead (verification oracle).
    """
    p, q, tau = as_ext(p), as_ext(q), parse_rational(tau)
    variant = MixedVariant(variant)
    pf, qf = _fl(p), _fl(q)
    d = g.d
    level = g.grid_level()
    if brute_floor is not None:
        # refine down to level J so that no cube needs the closed form
        level = max(level, g.J)
    grid = g.on_grid(level)
    if not grid:
        return NormResult(0.0, None, 0)
    dtau = d * tau
    vol = math.ldexp(1.0, -level * d)
    cells = sorted(grid)
    if brute_floor is None:
        index: dict = {}
        stops = []
        for group in orthant_groups(cells).values():
            stop = min(0, level)
            while len({c.ancestor(stop) for c in group}) > 1:
                stop -= 1
            stops.append(stop)
            for cell in group:
                for lv in range(level, stop - 1, -1):
                    index.setdefault(cell.ancestor(lv), []).append(cell)
        candidates = sorted(index)
    else:
        index = {}
        candidates = []
        for lv in range(brute_floor, level + 1):
            for cube in bounding_levels(cells, lv):
                members = [c for c in cells if contains(cube, c)]
                index[cube] = members
                candidates.append(cube)
                if len(candidates) > BRUTE_FORCE_LIMIT:
                    raise ParamError("brute force guard exceeded")
    best = None
    for cube in candidates:
        members = [(vol, grid[c]) for c in index[cube]]
        value = _mixed_value(members, cube.j, g.J, pf, qf, d, dtau, variant) if members else 0.0
        best = _pick(best, cube, value)
    count = len(candidates)
    for cell in cells if brute_floor is None else ():
        for lv in range(level + 1, g.J + 1):
            sub = DyadicCube(lv, tuple(x << (lv - level) for x in cell.m))
            best = _pick(best, sub, _subcell_value(grid[cell], lv, p, qf, d, tau))
            count += 1
    return NormResult(_finish(best[1], g.J), best[0], count)


@dataclass(frozen=True)
class SmoothingParams:
    D1: Fraction
    D2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "D1", parse_rational(self.D1))
        object.__setattr__(self, "D2", parse_rational(self.D2))
        if self.D1 <= 0 or self.D2 <= 0:
            raise ParamError("D1 and D2 must be positive")


def smooth(g: StepFnSeq, sp: SmoothingParams) -> StepFnSeq:
    """G_j = sum_{nu <= j} 2^{-(j-nu)D2} g_nu + sum_{nu > j} 2^{-(nu-j)D1} g_nu."""
    level = g.grid_level()
    grid = g.on_grid(level)
    J = g.J
    down = [2.0 ** float(-k * sp.D2) for k in range(J + 1)]
    up = [2.0 ** float(-k * sp.D1) for k in range(J + 1)]
    out = [dict() for _ in range(J + 1)]
    for cell, vals in grid.items():
        for j in range(J + 1):
            terms = [down[j - nu] * vals[nu] for nu in range(j + 1)]
            terms += [up[nu - j] * vals[nu] for nu in range(j + 1, J + 1)]
            value = math.fsum(terms)
            if value != 0.0:
                out[j][cell] = value
    return StepFnSeq(g.d, out)


# dense batches on the unit interval

def dense_batch_norm(levels: list, np_: NormParams) -> np.ndarray:
    """Norms of a batch of d = 1 sequences supported in [0,1), wavelet index 1.

    ``levels[j]`` is an array of shape (batch, 2^j) holding t_{1,j,m}. Cubes
    coarser than [0,1) never win (tau >= 0 and the inner sum is unchanged), so
    the supremum runs over the levels 0..J only.
    """

    if np_.d != 1:
        raise ParamError("dense batches are implemented for d = 1")
    J = len(levels) - 1
    arrs = [np.abs(np.asarray(a, dtype=float)) for a in levels]
    batch = arrs[0].shape[0]
    p, q = _fl(np_.p), _fl(np_.q)
    dtau = float(np_.tau)
    best = np.zeros(batch)
    if np_.scale is Scale.B:
        c = np_.s + Fraction(1, 2) - np_.p.inv()
        for L in range(J + 1):
            acc = np.zeros((batch, 2 ** L))
            for j in range(L, J + 1):
                blocks = arrs[j].reshape(batch, 2 ** L, 2 ** (j - L))
                if math.isinf(p):
                    s = blocks.max(axis=2)
                    term = 2.0 ** float(j * c) * s
                else:
                    s = (blocks ** p).sum(axis=2)
                    term = 2.0 ** float(j * c) * s ** (1.0 / p)
                if math.isinf(q):
                    acc = np.maximum(acc, term)
                else:
                    acc = acc + term ** q
            inner = acc if math.isinf(q) else acc ** (1.0 / q)
            best = np.maximum(best, 2.0 ** (L * dtau) * inner.max(axis=1))
        return best
    if math.isinf(p):
        raise ParamError("the f-norm requires p < inf")
    sd = np_.s + Fraction(1, 2)
    cells = 2 ** J
    weights = []
    for j in range(J + 1):
        scaled = 2.0 ** float(j * sd) * arrs[j]
        w = scaled if math.isinf(q) else scaled ** q
        weights.append(np.repeat(w, 2 ** (J - j), axis=1))
    acc = np.zeros((batch, cells))
    for L in range(J, -1, -1):
        acc = np.maximum(acc, weights[L]) if math.isinf(q) else acc + weights[L]
        local = acc ** p if math.isinf(q) else acc ** (p / q)
        integral = (local.reshape(batch, 2 ** L, 2 ** (J - L)) / cells).sum(axis=2)
        best = np.maximum(best, 2.0 ** (L * dtau) * (integral ** (1.0 / p)).max(axis=1))
    return best


def dense_to_coeffseq(levels: list, index: int = 0) -> CoeffSeq:
    """One member of a dense batch as a sparse sequence."""
    entries = {}
    for j, arr in enumerate(levels):
        for m, value in enumerate(arr[index]):
            if value != 0.0:
                entries[(1, j, (m,))] = float(value)
    return CoeffSeq(1, entries)
