"""Dyadic cube lattice and finitely supported wavelet coefficient families.

A cube Q_{j,m} is 2^{-j}([0,1)^d + m). Cubes of the standard lattice never
cross a coordinate hyperplane, so every cube lies in a single orthant and
suprema over cubes split into independent per-orthant problems.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .params import ParamError, parse_rational


@dataclass(frozen=True, order=True)
class DyadicCube:
    """Q_{j,m}; ``j`` may be negative (coarse cubes used as sup candidates)."""

    j: int
    m: tuple

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        if not self.m:
            raise ParamError("cube position must have at least one coordinate")

    @property
    def d(self) -> int:
        return len(self.m)

    @property
    def side(self) -> Fraction:
        return Fraction(2) ** (-self.j)

    @property
    def volume(self) -> float:
        return math.ldexp(1.0, -self.j * self.d)

    def bounds(self) -> list:
        """Exact [lo, hi) per coordinate."""
        side = self.side
        return [(x * side, (x + 1) * side) for x in self.m]

    def orthant(self) -> tuple:
        return tuple(x >= 0 for x in self.m)

    def parent(self) -> "DyadicCube":
        return DyadicCube(self.j - 1, tuple(x >> 1 for x in self.m))

    def children(self) -> list:
        out = [()]
        for x in self.m:
            out = [prefix + (2 * x + b,) for prefix in out for b in (0, 1)]
        return [DyadicCube(self.j + 1, m) for m in out]

    def ancestor(self, level: int) -> "DyadicCube":
        """The cube at ``level`` <= j containing this one."""
        shift = self.j - level
        if shift < 0:
            raise ParamError(f"level {level} is finer than cube level {self.j}")
        return DyadicCube(level, tuple(x >> shift for x in self.m))

    def ancestors(self, down_to: int) -> list:
        """Containing cubes at levels j-1, ..., down_to."""
        if down_to > self.j:
            raise ParamError("down_to must not exceed the cube level")
        return [self.ancestor(level) for level in range(self.j - 1, down_to - 1, -1)]

    def contains(self, other: "DyadicCube") -> bool:
        return contains(self, other)

    def to_json(self) -> dict:
        return {"j": self.j, "m": list(self.m)}

    @classmethod
    def from_json(cls, obj) -> "DyadicCube":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(int(obj["j"]), tuple(obj["m"]))

    def __str__(self) -> str:
        return f"Q[{self.j},{','.join(map(str, self.m))}]"


def contains(P: DyadicCube, Q: DyadicCube) -> bool:
    """True iff Q is a subset of P."""
    if P.d != Q.d:
        raise ParamError("cubes of different dimension")
    shift = Q.j - P.j
    if shift < 0:
        return False
    return all((q >> shift) == p for p, q in zip(P.m, Q.m))


def ancestors(Q: DyadicCube, down_to: int) -> list:
    return Q.ancestors(down_to)


def disjoint(P: DyadicCube, Q: DyadicCube) -> bool:
    return not contains(P, Q) and not contains(Q, P)


Key = tuple  # (i, j, m)


@dataclass
class CoeffSeq:
    """Finitely supported coefficients t_{i,j,m}, keyed by (i, j, m).

    ``i`` ranges over 1..2^d-1; ``i = 0`` is allowed at ``j = 0`` only and holds
    the zero-level block.
    """

    d: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 1:
            raise ParamError("dimension must be a positive integer")
        clean = {}
        for key, value in self.entries.items():
            i, j, m = key
            m = tuple(int(x) for x in m)
            self._check(i, j, m)
            value = float(value)
            if not math.isfinite(value):
                raise ParamError("coefficients must be finite")
            if value != 0.0:
                clean[(int(i), int(j), m)] = value
        self.entries = clean

    def _check(self, i, j, m) -> None:
        if len(m) != self.d:
            raise ParamError(f"position {m} has wrong dimension")
        if j < 0:
            raise ParamError("coefficient levels must be >= 0")
        if i == 0:
            if j != 0:
                raise ParamError("the zero-level block (i = 0) lives at j = 0")
        elif not 1 <= i <= 2 ** self.d - 1:
            raise ParamError(f"wavelet index i must be in 1..{2 ** self.d - 1}")

    def __len__(self) -> int:
        return len(self.entries)

    def items(self) -> Iterator:
        return iter(sorted(self.entries.items()))

    def cube(self, key: Key) -> DyadicCube:
        return DyadicCube(key[1], key[2])

    def support_cubes(self) -> list:
        return sorted({DyadicCube(j, m) for (_, j, m) in self.entries})

    @property
    def finest_level(self) -> int:
        return max((j for (_, j, _) in self.entries), default=0)

    def scaled(self, c: float) -> "CoeffSeq":
        return CoeffSeq(self.d, {k: c * v for k, v in self.entries.items()})

    def __add__(self, other: "CoeffSeq") -> "CoeffSeq":
        if other.d != self.d:
            raise ParamError("dimension mismatch")
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0.0) + v
        return CoeffSeq(self.d, out)

    def to_json(self) -> dict:
        return {"d": self.d, "entries": [
            {"i": i, "j": j, "m": list(m), "t": v} for (i, j, m), v in self.items()]}

    @classmethod
    def from_json(cls, obj) -> "CoeffSeq":
        if isinstance(obj, str):
            obj = json.loads(obj)
        d = obj.get("d", 1)
        entries = {}
        for row in obj.get("entries", []):
            raw = row["t"]
            value = float(parse_rational(raw)) if isinstance(raw, str) else float(raw)
            key = (int(row.get("i", 1)), int(row["j"]), tuple(row["m"]))
            entries[key] = entries.get(key, 0.0) + value
        return cls(d, entries)


def orthant_groups(cubes: Iterable[DyadicCube]) -> dict:
    groups: dict = {}
    for cube in cubes:
        groups.setdefault(cube.orthant(), []).append(cube)
    return groups


def cover_level(cubes: list) -> int:
    """Largest level <= 0 at which all the cubes (one orthant) share one ancestor."""
    level = min(0, min(c.j for c in cubes))
    while len({c.ancestor(level) for c in cubes}) > 1:
        level -= 1
    return level


@dataclass
class CandidateSet:
    cubes: list
    stop_level: int
    bound_proof: float


def candidate_cubes(t: CoeffSeq, tau, total_bound: float, best_known: float = 0.0) -> CandidateSet:
    """Every cube that can carry the supremum of the sequence norm.

    ``total_bound`` must dominate the inner sum taken over a whole orthant.
    For tau > 0 a cube P satisfies value(P) <= 2^{j_P d tau} total_bound, so
    levels where that bound falls below ``best_known`` are dropped. Below the
    cover level every cube of an orthant gives the same (tau = 0) or a smaller
    (tau > 0) value, so the enumeration stops there.
    """
    tau = parse_rational(tau)
    support = t.support_cubes()
    if not support:
        return CandidateSet([], 0, 0.0)
    cubes = set()
    stop_all = 0
    for group in orthant_groups(support).values():
        stop = cover_level(group)
        if tau > 0 and best_known > 0 and total_bound > 0:
            cut = math.ceil(math.log2(best_known / total_bound) / (t.d * float(tau)))
            stop = max(stop, min(cut, max(c.j for c in group)))
        stop_all = min(stop_all, stop)
        for cube in group:
            cubes.add(cube)
            if cube.j > stop:
                cubes.update(cube.ancestors(stop))
    bound = total_bound * 2.0 ** (stop_all * t.d * float(tau))
    return CandidateSet(sorted(cubes), stop_all, bound)


def bounding_levels(cubes: list, level: int) -> Iterator[DyadicCube]:
    """All cubes at ``level`` meeting the bounding box of ``cubes``."""
    d = cubes[0].d
    lo, hi = [], []
    for axis in range(d):
        lows = [c.m[axis] * Fraction(2) ** (-c.j) for c in cubes]
        highs = [(c.m[axis] + 1) * Fraction(2) ** (-c.j) for c in cubes]
        scale = Fraction(2) ** level
        lo.append(math.floor(min(lows) * scale))
        hi.append(math.ceil(max(highs) * scale))
    ranges = [range(a, b) for a, b in zip(lo, hi)]
    out = [()]
    for r in ranges:
        out = [prefix + (x,) for prefix in out for x in r]
    for m in out:
        yield DyadicCube(level, m)


def unit_cube(d: int, j: int = 0) -> DyadicCube:
    return DyadicCube(j, (0,) * d)


def cube_from_arg(text: Optional[str]) -> Optional[DyadicCube]:
    if text is None:
        return None
    return DyadicCube.from_json(text)
