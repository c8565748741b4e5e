"""Exact parameter arithmetic and function-space descriptors.

Every smoothness, integrability and Morrey parameter is held as an exact
rational. Integrability exponents may also be ``+inf``, which is a tagged
value and never a float.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Any, Optional, Union


class ParamError(ValueError):
    """Raised for malformed or out-of-range parameters."""


RationalLike = Union[int, str, Fraction, "ExtRational"]


def parse_rational(value: Any) -> Fraction:
    """Parse an exact rational from an int, a Fraction or an 'a/b' string."""
    if isinstance(value, bool):
        raise ParamError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, ExtRational):
        if value.is_inf:
            raise ParamError("expected a finite rational, got inf")
        return value.value
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParamError(f"malformed rational: {value!r}") from exc
    if isinstance(value, float):
        raise ParamError(f"floats are not accepted as exact parameters: {value!r}")
    raise ParamError(f"not a rational: {value!r}")


@total_ordering
class ExtRational:
    """A nonnegative exact rational or ``+inf``."""

    __slots__ = ("_value", "_inf")

    def __init__(self, value: Any = 0, inf: bool = False):
        if inf:
            self._value = Fraction(0)
            self._inf = True
            return
        if isinstance(value, ExtRational):
            self._value, self._inf = value._value, value._inf
            return
        if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity", "oo"):
            self._value, self._inf = Fraction(0), True
            return
        frac = parse_rational(value)
        if frac < 0:
            raise ParamError(f"ExtRational must be >= 0, got {frac}")
        self._value, self._inf = frac, False

    @classmethod
    def infinity(cls) -> "ExtRational":
        return cls(inf=True)

    @property
    def is_inf(self) -> bool:
        return self._inf

    @property
    def value(self) -> Fraction:
        if self._inf:
            raise ParamError("inf has no finite value")
        return self._value

    def reciprocal(self) -> "ExtRational":
        if self._inf:
            return ExtRational(0)
        if self._value == 0:
            return ExtRational.infinity()
        return ExtRational(1 / self._value)

    def inv(self) -> Fraction:
        """1/x as a finite Fraction (requires x > 0)."""
        if self._inf:
            return Fraction(0)
        if self._value == 0:
            raise ParamError("1/0 is not finite")
        return 1 / self._value

    def __add__(self, other: Any) -> "ExtRational":
        o = as_ext(other)
        if self._inf or o._inf:
            return ExtRational.infinity()
        return ExtRational(self._value + o._value)

    __radd__ = __add__

    def __mul__(self, other: Any) -> "ExtRational":
        o = as_ext(other)
        if self._inf or o._inf:
            if (not self._inf and self._value == 0) or (not o._inf and o._value == 0):
                raise ParamError("0 * inf is undefined; apply a convention explicitly")
            return ExtRational.infinity()
        return ExtRational(self._value * o._value)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "ExtRational":
        o = as_ext(other)
        if self._inf and o._inf:
            raise ParamError("inf / inf is undefined; apply a convention explicitly")
        if o._inf:
            return ExtRational(0)
        if o._value == 0:
            if not self._inf and self._value == 0:
                raise ParamError("0 / 0 is undefined")
            return ExtRational.infinity()
        if self._inf:
            return ExtRational.infinity()
        return ExtRational(self._value / o._value)

    def _key(self):
        return (1, Fraction(0)) if self._inf else (0, self._value)

    def __eq__(self, other: Any) -> bool:
        try:
            o = as_ext(other)
        except ParamError:
            return NotImplemented
        return self._key() == o._key()

    def __lt__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool) and other < 0:
            return False
        o = as_ext(other)
        return self._key() < o._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __float__(self) -> float:
        return float("inf") if self._inf else float(self._value)

    def __str__(self) -> str:
        return "inf" if self._inf else format_rational(self._value)

    def __repr__(self) -> str:
        return f"ExtRational({str(self)!r})"


INF = ExtRational.infinity()


def as_ext(value: Any) -> ExtRational:
    if isinstance(value, ExtRational):
        return value
    return ExtRational(value)


def format_rational(value: Union[Fraction, int, ExtRational]) -> str:
    """Render a rational as 'a' or 'a/b'."""
    if isinstance(value, ExtRational):
        return str(value)
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def product_convention(p: Any, tau: Any) -> ExtRational:
    """p * tau, with p*tau = 1 when p = inf and tau = 0."""
    p = as_ext(p)
    tau = parse_rational(tau)
    if tau < 0:
        raise ParamError("tau must be >= 0")
    if p.is_inf:
        return ExtRational(1) if tau == 0 else INF
    return ExtRational(p.value * tau)


def ratio_convention(p1: Any, p2: Any) -> ExtRational:
    """p1 / p2, with inf / inf = 1."""
    p1, p2 = as_ext(p1), as_ext(p2)
    if p1.is_inf and p2.is_inf:
        return ExtRational(1)
    return p1 / p2


class Scale(str, Enum):
    B = "B"
    F = "F"


class Setting(str, Enum):
    DOMAIN = "domain"
    RN = "rn"


class RegionTag(str, Enum):
    LARGE = "Large"
    BOUNDARY = "Boundary"
    INTERIOR = "Interior"


@dataclass(frozen=True)
class SpaceParams:
    """One space A^{s,tau}_{p,q} of Besov type (B) or Triebel-Lizorkin type (F)."""

    scale: Scale
    s: Fraction
    p: ExtRational
    q: ExtRational
    tau: Fraction
    d: int = 1
    setting: Setting = Setting.DOMAIN

    def __post_init__(self):
        object.__setattr__(self, "scale", Scale(self.scale))
        object.__setattr__(self, "setting", Setting(self.setting))
        object.__setattr__(self, "s", parse_rational(self.s))
        object.__setattr__(self, "tau", parse_rational(self.tau))
        object.__setattr__(self, "p", as_ext(self.p))
        object.__setattr__(self, "q", as_ext(self.q))
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 1:
            raise ParamError(f"dimension must be a positive integer, got {self.d!r}")
        if self.p == 0 or self.q == 0:
            raise ParamError("p and q must be positive")
        if self.tau < 0:
            raise ParamError("tau must be >= 0")
        if self.scale is Scale.F and self.p.is_inf:
            raise ParamError("F-type spaces require p < inf")

    @property
    def inv_p(self) -> Fraction:
        return self.p.inv()

    def with_(self, **changes) -> "SpaceParams":
        return replace(self, **changes)

    def label(self) -> str:
        return (f"{self.scale.value}(s={format_rational(self.s)}, p={self.p}, q={self.q}, "
                f"tau={format_rational(self.tau)})")

    def to_json(self) -> dict:
        return {
            "scale": self.scale.value,
            "s": format_rational(self.s),
            "p": str(self.p),
            "q": str(self.q),
            "tau": format_rational(self.tau),
            "d": self.d,
            "setting": self.setting.value,
        }


def region_of(sp: SpaceParams) -> RegionTag:
    """Classify tau against 1/p (1/inf = 0)."""
    ip = sp.inv_p
    if sp.tau > ip or (sp.tau == ip and sp.q.is_inf):
        return RegionTag.LARGE
    if sp.tau == ip:
        return RegionTag.BOUNDARY
    return RegionTag.INTERIOR


def collapse_large(sp: SpaceParams) -> SpaceParams:
    """The classical B^{s+d(tau-1/p)}_{inf,inf} form of a Large-region space."""
    return SpaceParams(Scale.B, sp.s + sp.d * (sp.tau - sp.inv_p), INF, INF, Fraction(0),
                       sp.d, sp.setting)


def canonical(sp: SpaceParams) -> SpaceParams:
    """Representative used for rule dispatch: Large spaces collapse, others stay."""
    if region_of(sp) is RegionTag.LARGE:
        return collapse_large(sp)
    return sp


def _coincident_step(sp: SpaceParams) -> list:
    out = []
    if region_of(sp) is RegionTag.LARGE:
        out.append(collapse_large(sp))
    if sp.scale is Scale.F and sp.tau == sp.inv_p and not sp.q.is_inf:
        out.append(SpaceParams(Scale.B, sp.s, sp.q, sp.q, sp.q.inv(), sp.d, sp.setting))
    return out


def normalize_coincidence(sp: SpaceParams) -> list:
    """``sp`` followed by every coincident form reachable from it, deduplicated."""
    seen = [sp]
    frontier = [sp]
    while frontier:
        nxt = []
        for item in frontier:
            for alias in _coincident_step(item):
                if alias not in seen:
                    seen.append(alias)
                    nxt.append(alias)
        frontier = nxt
    return seen


# Named spaces

class NamedKind(str, Enum):
    BMO = "bmo"
    BESOV_MORREY = "besov_morrey"
    TL_MORREY = "tl_morrey"
    HYBRID = "hybrid"
    CLASSICAL = "classical"


class NoExactTauForm(ParamError):
    """A Besov-Morrey space with q < inf and u > p has no equal tau-space."""


@dataclass(frozen=True)
class NamedSpace:
    """A space given in a named family, translated with :func:`resolve_named`."""

    kind: NamedKind
    s: Fraction = Fraction(0)
    q: ExtRational = field(default_factory=lambda: ExtRational(2))
    d: int = 1
    setting: Setting = Setting.DOMAIN
    p: Optional[ExtRational] = None
    u: Optional[ExtRational] = None
    r: Optional[Fraction] = None
    scale: Scale = Scale.B

    def __post_init__(self):
        object.__setattr__(self, "kind", NamedKind(self.kind))
        object.__setattr__(self, "setting", Setting(self.setting))
        object.__setattr__(self, "scale", Scale(self.scale))
        object.__setattr__(self, "s", parse_rational(self.s))
        object.__setattr__(self, "q", as_ext(self.q))
        if self.p is not None:
            object.__setattr__(self, "p", as_ext(self.p))
        if self.u is not None:
            object.__setattr__(self, "u", as_ext(self.u))
        if self.r is not None:
            object.__setattr__(self, "r", parse_rational(self.r))
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 1:
            raise ParamError(f"dimension must be a positive integer, got {self.d!r}")
        kind = self.kind
        if kind in (NamedKind.BESOV_MORREY, NamedKind.TL_MORREY):
            if self.p is None or self.u is None:
                raise ParamError(f"{kind.value} needs both u and p")
            both_inf = self.p.is_inf and self.u.is_inf
            if kind is NamedKind.TL_MORREY and self.p.is_inf:
                raise ParamError("tl_morrey requires p < inf")
            if not both_inf and not (0 < self.p <= self.u and not self.u.is_inf):
                raise ParamError("Morrey-type spaces need 0 < p <= u < inf (or p = u = inf)")
        if kind is NamedKind.HYBRID:
            if self.p is None or self.r is None:
                raise ParamError("hybrid needs r and p")
            if self.p.is_inf:
                raise ParamError("hybrid spaces require p < inf")
            if self.r < -Fraction(self.d) * self.p.inv():
                raise ParamError("hybrid spaces require r >= -d/p")
        if kind is NamedKind.CLASSICAL and self.p is None:
            raise ParamError("classical needs p")


def resolve_named(ns: NamedSpace) -> SpaceParams:
    """Translate a named space into its (s, p, q, tau) form."""
    kind = ns.kind
    if kind is NamedKind.BMO:
        return SpaceParams(Scale.B, 0, 2, 2, Fraction(1, 2), ns.d, ns.setting)
    if kind is NamedKind.CLASSICAL:
        return SpaceParams(ns.scale, ns.s, ns.p, ns.q, 0, ns.d, ns.setting)
    if kind is NamedKind.TL_MORREY:
        return SpaceParams(Scale.F, ns.s, ns.p, ns.q, ns.p.inv() - ns.u.inv(), ns.d, ns.setting)
    if kind is NamedKind.BESOV_MORREY:
        tau = ns.p.inv() - ns.u.inv()
        if ns.q.is_inf or ns.p == ns.u:
            return SpaceParams(Scale.B, ns.s, ns.p, ns.q, tau, ns.d, ns.setting)
        raise NoExactTauForm("no exact τ-form; use classifier.besov_morrey rules")
    if kind is NamedKind.HYBRID:
        tau = ns.p.inv() + ns.r / ns.d
        return SpaceParams(ns.scale, ns.s, ns.p, ns.q, tau, ns.d, ns.setting)
    raise ParamError(f"unknown named kind {kind!r}")


def hybrid_r(sp: SpaceParams) -> Fraction:
    """Inverse of the hybrid translation: r = d (tau - 1/p)."""
    return sp.d * (sp.tau - sp.inv_p)


# JSON descriptors

_SPACE_KEYS = {"scale", "s", "p", "q", "tau", "d", "setting"}


def _get(obj: dict, key: str, default: Any = None, required: bool = True) -> Any:
    if key in obj:
        return obj[key]
    if required and default is None:
        raise ParamError(f"missing field {key!r}")
    return default


def named_from_json(obj: dict) -> NamedSpace:
    kind = NamedKind(obj["named"])
    d = _get(obj, "d", 1)
    setting = _get(obj, "setting", "domain")
    if kind is NamedKind.BMO:
        return NamedSpace(kind, d=d, setting=setting)
    common = dict(s=_get(obj, "s", "0"), q=_get(obj, "q"), d=d, setting=setting)
    if kind in (NamedKind.BESOV_MORREY, NamedKind.TL_MORREY):
        return NamedSpace(kind, p=_get(obj, "p"), u=_get(obj, "u"), **common)
    if kind is NamedKind.HYBRID:
        return NamedSpace(kind, p=_get(obj, "p"), r=_get(obj, "r"),
                          scale=_get(obj, "scale", "B"), **common)
    return NamedSpace(kind, p=_get(obj, "p"), scale=_get(obj, "scale", "B"), **common)


def space_from_json(obj: Any) -> SpaceParams:
    """Parse a JSON descriptor (dict or JSON text), resolving named forms."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParamError(f"malformed JSON descriptor: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParamError("space descriptor must be a JSON object")
    try:
        if "named" in obj:
            return resolve_named(named_from_json(obj))
        unknown = set(obj) - _SPACE_KEYS
        if unknown:
            raise ParamError(f"unknown fields {sorted(unknown)}")
        return SpaceParams(
            scale=_get(obj, "scale"),
            s=_get(obj, "s"),
            p=_get(obj, "p"),
            q=_get(obj, "q"),
            tau=_get(obj, "tau", "0"),
            d=_get(obj, "d", 1),
            setting=_get(obj, "setting", "domain"),
        )
    except (KeyError, TypeError) as exc:
        raise ParamError(f"bad descriptor: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, ParamError):
            raise
        raise ParamError(str(exc)) from exc
