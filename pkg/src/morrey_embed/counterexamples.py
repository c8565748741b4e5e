"""Extremal coefficient families and the norm-ratio growth harness.

Each family is a one-parameter set of truncated sequences. The harness
computes source and target norms per truncation level J, fits the growth of
their ratio and compares it with the classifier verdict for the pair.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from .classifier import Relation
from .dyadic import CoeffSeq, DyadicCube, unit_cube
from .params import ParamError, as_ext, parse_rational
from .seqnorm import (
    LevelUniformSeq,
    NormOverflow,
    NormParams,
    dense_batch_norm,
    norm_of,
)

GROWTH_THRESHOLD = 0.15
RATE_TOLERANCE = 0.1


class PlacementError(ParamError):
    """The hierarchical placement cannot respect the per-cube caps."""


class FamilyKind(str, Enum):
    LEVEL_DIAGONAL = "LevelDiagonal"
    UNIT_COLUMN = "UnitColumn"
    SPARSE_HIERARCHICAL = "SparseHierarchical"
    RANDOM = "Random"


class CrossCheck(str, Enum):
    CONSISTENT = "Consistent"
    INCONSISTENT = "Inconsistent"
    EXPLORATORY = "Exploratory"


def harmonic_gamma(J: int, q2) -> list:
    """gamma_j = (j+1)^{-1/q2}: in l_{q1} but not l_{q2} when q1 > q2."""
    q2 = as_ext(q2)
    if q2.is_inf:
        return [1.0] * (J + 1)
    return [(j + 1) ** (-1.0 / float(q2.value)) for j in range(J + 1)]


def harmonic_number(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, n + 1))


def gen_level_diagonal(s1, d: int, J: int, gamma_seq: Optional[list] = None, q2=2) -> LevelUniformSeq:
    """t_{1,j,m} = 2^{-j(s1+d/2)} gamma_j on every Q_{j,m} inside [0,1)^d."""
    s1 = parse_rational(s1)
    gamma_seq = harmonic_gamma(J, q2) if gamma_seq is None else list(gamma_seq)
    if len(gamma_seq) != J + 1 or any(g <= 0 for g in gamma_seq):
        raise ParamError("gamma_seq needs J+1 positive values")
    levels = [(-j * (s1 + Fraction(d, 2)), g) for j, g in enumerate(gamma_seq)]
    return LevelUniformSeq(d, unit_cube(d), levels)


def gen_unit_column(s2, d: int, J: int) -> LevelUniformSeq:
    """t_{1,j,m} = 2^{-j(s2+d/2)} on every Q_{j,m} inside Q_{0,0}."""
    s2 = parse_rational(s2)
    levels = [(-j * (s2 + Fraction(d, 2)), 1.0) for j in range(J + 1)]
    return LevelUniformSeq(d, unit_cube(d), levels)


def floor_pow2(x: Fraction) -> int:
    """floor(2^x) for a rational x >= 0, exactly."""
    x = Fraction(x)
    if x < 0:
        raise ParamError("exponent must be >= 0")
    num, den = x.numerator, x.denominator
    target = 1 << num
    k = int(2.0 ** float(x))
    while k ** den > target:
        k -= 1
    while (k + 1) ** den <= target:
        k += 1
    return k


def placement_cap(level_j: int, mu: int, d: int, a: Fraction) -> int:
    """Most marks at level j allowed inside one cube of level mu <= j."""
    return floor_pow2(d * (level_j - mu) * a)


def _place(cube: DyadicCube, count: int, level_j: int, d: int, a: Fraction, out: list) -> None:
    if count == 0:
        return
    cap = placement_cap(level_j, cube.j, d, a)
    if count > cap:
        raise PlacementError(f"{count} marks exceed the cap {cap} in {cube}")
    if cube.j == level_j:
        out.append(cube)
        return
    kids = cube.children()
    base, extra = divmod(count, len(kids))
    for idx, kid in enumerate(kids):
        _place(kid, base + (1 if idx < extra else 0), level_j, d, a, out)


def sparse_root(d: int, nu0: int) -> DyadicCube:
    return DyadicCube(nu0, (0,) * d)


def gen_sparse_hierarchical(p1, tau1, d: int, nu0: int, gamma_seq: list, J: int) -> CoeffSeq:
    """Sparse marks spread over Q_{nu0,0} so that no sub-cube is overloaded.

    At level j the family carries k = floor(2^{d(j-nu0)p1 tau1}) coefficients equal
    to gamma_j, placed top-down with an even split so that every cube of level mu
    holds at most floor(2^{d(j-mu)p1 tau1}) of them.
    """
    p1, tau1 = as_ext(p1), parse_rational(tau1)
    if p1.is_inf:
        raise ParamError("the sparse family needs p1 < inf")
    a = p1.value * tau1
    if not 0 < a < 1:
        raise ParamError("the sparse family needs 0 < p1*tau1 < 1")
    if nu0 >= 0:
        raise ParamError("nu0 must be negative")
    if len(gamma_seq) != J + 1:
        raise ParamError("gamma_seq needs J+1 values")
    root = sparse_root(d, nu0)
    entries = {}
    for j in range(J + 1):
        k = placement_cap(j, nu0, d, a)
        marks: list = []
        _place(root, k, j, d, a, marks)
        for cube in marks:
            entries[(1, j, cube.m)] = float(gamma_seq[j])
    return CoeffSeq(d, entries)


def sparse_gamma(s1, p1, tau1, d: int, J: int, q2) -> list:
    """gamma_j with {2^{j(s1+d/2-d/p1+d tau1)} gamma_j} = {(j+1)^{-1/q2}}."""
    s1, tau1, p1 = parse_rational(s1), parse_rational(tau1), as_ext(p1)
    rate = s1 + Fraction(d, 2) - d * p1.inv() + d * tau1
    base = harmonic_gamma(J, q2)
    return [2.0 ** float(-j * rate) * g for j, g in enumerate(base)]


def est1_bound(s1, p1, q1, tau1, d: int, gamma_seq: list) -> float:
    """The l_{q1} norm of {2^{j(s1+d/2-d/p1+d tau1)} gamma_j}."""
    s1, tau1, p1, q1 = parse_rational(s1), parse_rational(tau1), as_ext(p1), as_ext(q1)
    rate = s1 + Fraction(d, 2) - d * p1.inv() + d * tau1
    vals = [2.0 ** float(j * rate) * g for j, g in enumerate(gamma_seq)]
    if q1.is_inf:
        return max(vals)
    qf = float(q1.value)
    return math.fsum(v ** qf for v in vals) ** (1.0 / qf)


def placement_violations(seq: CoeffSeq, p1, tau1, nu0: int) -> list:
    """Every (level j, sub-cube) whose number of marks exceeds its cap."""
    d = seq.d
    a = as_ext(p1).value * parse_rational(tau1)
    root = sparse_root(d, nu0)
    bad = []
    by_level: dict = {}
    for (_, j, m) in seq.entries:
        by_level.setdefault(j, []).append(DyadicCube(j, m))
    for j, cubes in sorted(by_level.items()):
        for mu in range(nu0, j + 1):
            counts: dict = {}
            for cube in cubes:
                anc = cube.ancestor(mu)
                counts[anc] = counts.get(anc, 0) + 1
            cap = placement_cap(j, mu, d, a)
            for anc, n in counts.items():
                if n > cap or not root.contains(anc):
                    bad.append((j, anc, n, cap))
    return bad


def gen_random(depth: int, density: float, seed: int, d: int = 1, all_branches: bool = False) -> CoeffSeq:
    """Reproducible random sparse sequence inside [0,1)^d up to level ``depth``."""
    if not 0 < density <= 1:
        raise ParamError("density must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    branches = range(1, 2 ** d) if all_branches else (1,)
    entries = {}
    for j in range(depth + 1):
        side = 2 ** j
        for flat in range(side ** d):
            m = tuple((flat // side ** axis) % side for axis in range(d))
            for i in branches:
                keep = rng.random() < density
                value = rng.uniform(-1.0, 1.0)
                if keep:
                    entries[(i, j, m)] = value
    return CoeffSeq(d, entries)


def random_dense_batch(depth: int, density: float, rng, batch: int) -> list:
    """A batch of d = 1 random sequences as per-level arrays (for dense_batch_norm)."""
    levels = []
    for j in range(depth + 1):
        vals = rng.uniform(-1.0, 1.0, size=(batch, 2 ** j))
        mask = rng.random((batch, 2 ** j)) < density
        levels.append(vals * mask)
    return levels


@dataclass
class Family:
    kind: FamilyKind
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = FamilyKind(self.kind)

    def axis(self) -> str:
        """x-axis of the growth fit."""
        if self.kind in (FamilyKind.LEVEL_DIAGONAL, FamilyKind.SPARSE_HIERARCHICAL):
            if self.params.get("gamma", "harmonic") == "geometric":
                return "J"
            return "logH"
        return "logJ"

    def build(self, J: int):
        p = self.params
        d = int(p.get("d", 1))
        if self.kind is FamilyKind.LEVEL_DIAGONAL:
            gam = self._gamma(J)
            return gen_level_diagonal(p.get("s1", "0"), d, J, gam)
        if self.kind is FamilyKind.UNIT_COLUMN:
            return gen_unit_column(p.get("s2", "0"), d, J)
        if self.kind is FamilyKind.SPARSE_HIERARCHICAL:
            gam = sparse_gamma(p.get("s1", "0"), p["p1"], p["tau1"], d, J, p.get("q2", "2"))
            return gen_sparse_hierarchical(p["p1"], p["tau1"], d, int(p.get("nu0", -2)), gam, J)
        raise ParamError("random families are evaluated as batches")

    def _gamma(self, J: int) -> list:
        kind = self.params.get("gamma", "harmonic")
        if kind == "geometric":
            r = float(parse_rational(self.params.get("ratio", "1/2")))
            return [r ** j for j in range(J + 1)]
        return harmonic_gamma(J, self.params.get("q2", "2"))

    def to_json(self) -> dict:
        return {"kind": self.kind.value, **{k: v for k, v in self.params.items()}}

    @classmethod
    def from_json(cls, obj: dict) -> "Family":
        obj = dict(obj)
        kind = obj.pop("kind")
        return cls(FamilyKind(kind), obj)


@dataclass
class RatioReport:
    rows: list  # (J, src_norm, tgt_norm, ratio)
    alpha: float
    residual: float
    predicted: Optional[float]
    axis: str
    verdict: Optional[Relation] = None
    cross_check: CrossCheck = CrossCheck.EXPLORATORY

    @property
    def consistent(self) -> Optional[bool]:
        if self.cross_check is CrossCheck.EXPLORATORY:
            return None
        return self.cross_check is CrossCheck.CONSISTENT

    def to_json(self) -> dict:
        g = lambda x: None if x is None else float(f"{x:.12g}")
        return {
            "rows": [{"J": J, "src_norm": g(a), "tgt_norm": g(b), "ratio": g(r)}
                     for J, a, b, r in self.rows],
            "fit": {"alpha": g(self.alpha), "residual": g(self.residual), "axis": self.axis,
                    "predicted": g(self.predicted), "consistent": self.consistent,
                    "cross_check": self.cross_check.value},
            "verdict": None if self.verdict is None else self.verdict.value,
        }

    def csv_rows(self) -> list:
        return [["J", "src_norm", "tgt_norm", "ratio"]] + [
            [str(J), f"{a:.12g}", f"{b:.12g}", f"{r:.12g}"] for J, a, b, r in self.rows]


def predicted_exponent(fam: Family, src: NormParams, tgt: NormParams) -> Optional[float]:
    """Growth exponent of the ratio implied by the construction, if any."""
    q1, q2 = src.q, tgt.q
    if fam.kind is FamilyKind.UNIT_COLUMN:
        return 0.0 if q2.is_inf else 1.0 / float(q2.value)
    if fam.kind in (FamilyKind.LEVEL_DIAGONAL, FamilyKind.SPARSE_HIERARCHICAL) and fam.axis() == "logH":
        if q1 > q2:
            return 0.0 if q2.is_inf else 1.0 / float(q2.value)
        return 0.0
    return None


def _axis_values(axis: str, J_list: list) -> np.ndarray:
    if axis == "logH":
        return np.array([math.log(harmonic_number(J + 1)) for J in J_list])
    if axis == "J":
        return np.array([float(J) for J in J_list])
    return np.array([math.log(J) for J in J_list])


def fit_growth(xs: np.ndarray, ratios: list) -> tuple:
    ys = np.log(np.asarray(ratios, dtype=float))
    coeffs, res, *_ = np.polyfit(xs, ys, 1, full=True)
    residual = float(math.sqrt(res[0] / len(xs))) if len(res) else 0.0
    return float(coeffs[0]), residual


def judge(verdict: Optional[Relation], alpha: float, predicted: Optional[float]) -> CrossCheck:
    if verdict is None or verdict is Relation.UNKNOWN:
        return CrossCheck.EXPLORATORY
    if verdict.is_continuous:
        ok = alpha < GROWTH_THRESHOLD
    elif predicted is not None and predicted > 0:
        ok = abs(alpha - predicted) <= RATE_TOLERANCE
    else:
        ok = alpha > GROWTH_THRESHOLD
    return CrossCheck.CONSISTENT if ok else CrossCheck.INCONSISTENT


def _random_ratio(src: NormParams, tgt: NormParams, fam: Family, J: int) -> tuple:
    p = fam.params
    samples = int(p.get("samples", 200))
    density = float(p.get("density", 0.3))
    seed = int(p.get("seed", 0))
    rng = np.random.default_rng([seed, J])
    levels = random_dense_batch(J, density, rng, samples)
    a = dense_batch_norm(levels, src)
    b = dense_batch_norm(levels, tgt)
    ok = a > 0
    ratios = np.where(ok, b / np.where(ok, a, 1.0), 0.0)
    k = int(np.argmax(ratios))
    return float(a[k]), float(b[k]), float(ratios[k])


def _ratio_row(task: tuple) -> tuple:
    src, tgt, fam, J = task
    if fam.kind is FamilyKind.RANDOM:
        a, b, r = _random_ratio(src, tgt, fam, J)
    else:
        seq = fam.build(J)
        try:
            a = norm_of(seq, src).value
            b = norm_of(seq, tgt).value
        except OverflowError as exc:
            raise NormOverflow(str(exc), J) from exc
        r = b / a if a > 0 else math.inf
    if not all(math.isfinite(x) and x > 0 for x in (a, b, r)):
        raise NormOverflow("norm ratio is not a positive finite number", J)
    return J, a, b, r


def ratio_experiment(src: NormParams, tgt: NormParams, fam: Family, J_list: list,
                     verdict: Optional[Relation] = None, jobs: int = 1) -> RatioReport:
    """Norm ratios tgt/src along the family, with a least-squares growth fit."""
    J_list = [int(J) for J in J_list]
    if len(J_list) < 3 or any(b <= a for a, b in zip(J_list, J_list[1:])):
        raise ParamError("J_list must be strictly increasing with at least 3 points")
    tasks = [(src, tgt, fam, J) for J in J_list]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_ratio_row, tasks))
    else:
        rows = [_ratio_row(t) for t in tasks]
    axis = fam.axis()
    alpha, residual = fit_growth(_axis_values(axis, J_list), [r for *_, r in rows])
    predicted = predicted_exponent(fam, src, tgt)
    return RatioReport(rows, alpha, residual, predicted, axis, verdict, judge(verdict, alpha, predicted))
