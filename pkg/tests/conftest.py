from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from morrey_embed.params import INF, ExtRational, Scale, Setting, SpaceParams

settings.register_profile("repo", deadline=None, derandomize=True, max_examples=150)
settings.load_profile("repo")

P_FINITE = [Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(3, 2), Fraction(2),
            Fraction(3), Fraction(4)]


def rationals(lo: int = -3, hi: int = 3, den: int = 8):
    return st.integers(lo * den, hi * den).map(lambda n: Fraction(n, den))


def exts(allow_inf: bool = True):
    base = st.sampled_from([ExtRational(p) for p in P_FINITE])
    return st.one_of(base, st.just(INF)) if allow_inf else base


@st.composite
def spaces(draw, scale=None, setting=Setting.DOMAIN, d=None):
    scale = draw(st.sampled_from([Scale.B, Scale.F])) if scale is None else scale
    d = draw(st.integers(1, 3)) if d is None else d
    p = draw(exts(allow_inf=scale is Scale.B))
    q = draw(exts())
    tau = draw(st.one_of(st.just(Fraction(0)), rationals(0, 2), st.just(p.reciprocal().value if not p.is_inf else Fraction(0))))
    return SpaceParams(scale, draw(rationals()), p, q, tau, d, setting)


_ACCEPTANCE: list = []


@pytest.fixture
def acceptance():
    """Records one PASS/FAIL line per acceptance criterion."""

    def record(number: int, name: str, ok: bool, detail: str = "") -> bool:
        line = f"{'PASS' if ok else 'FAIL'} [{number}] {name}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("[")[1].split("]")[0])):
            terminalreporter.write_line(line)
