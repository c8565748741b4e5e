import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from morrey_embed.dyadic import (
    CoeffSeq,
    DyadicCube,
    ancestors,
    candidate_cubes,
    contains,
    disjoint,
    unit_cube,
)
from morrey_embed.params import ParamError
from morrey_embed.seqnorm import NormParams, brute_force_norm, seq_norm


@st.composite
def cubes(draw, d=1, lo=-3, hi=4):
    j = draw(st.integers(lo, hi))
    span = 2 ** max(j, 0) * 2
    m = tuple(draw(st.integers(-span, span)) for _ in range(d))
    return DyadicCube(j, m)


@st.composite
def small_seqs(draw, d=None):
    d = draw(st.sampled_from([1, 2])) if d is None else d
    n = draw(st.integers(1, 5))
    entries = {}
    for _ in range(n):
        j = draw(st.integers(0, 3))
        side = 2 ** j
        m = tuple(draw(st.integers(-side, side - 1)) for _ in range(d))
        i = draw(st.integers(1, 2 ** d - 1))
        entries[(i, j, m)] = draw(st.floats(0.1, 2.0)) * draw(st.sampled_from([1, -1]))
    return CoeffSeq(d, entries)


def test_cube_geometry():
    q = DyadicCube(2, (3,))
    assert q.volume == 0.25
    assert q.side == Fraction(1, 4)
    assert q.parent() == DyadicCube(1, (1,))
    assert len(DyadicCube(0, (0, 0)).children()) == 4
    assert all(k.parent() == q for k in q.children())


def test_contains_examples():
    assert contains(DyadicCube(0, (0,)), DyadicCube(2, (3,)))
    assert contains(DyadicCube(0, (0, 0)), DyadicCube(2, (3, 1)))
    assert not contains(DyadicCube(1, (0,)), DyadicCube(0, (0,)))
    # [-2, 0) contains [-1, 0)
    assert contains(DyadicCube(-1, (-1,)), DyadicCube(0, (-1,)))


def test_contains_dimension_mismatch():
    with pytest.raises(ParamError):
        contains(DyadicCube(0, (0,)), DyadicCube(0, (0, 0)))


def test_ancestors_examples():
    assert ancestors(DyadicCube(2, (3,)), 0) == [DyadicCube(1, (1,)), DyadicCube(0, (0,))]
    assert DyadicCube(1, (-1,)).ancestor(0) == DyadicCube(0, (-1,))
    assert len(ancestors(DyadicCube(5, (7,)), -2)) == 7
    with pytest.raises(ParamError):
        ancestors(DyadicCube(1, (0,)), 2)


@given(cubes(d=2), cubes(d=2))
def test_nesting_trichotomy(P, Q):
    outcomes = [disjoint(P, Q), contains(P, Q) and P != Q, contains(Q, P) and P != Q, P == Q]
    assert sum(outcomes) == 1


@given(cubes(d=1, lo=0, hi=6), st.data())
def test_ancestors_restrict(Q, data):
    a = data.draw(st.integers(-3, Q.j))
    b = data.draw(st.integers(a, Q.j))
    assert [c for c in ancestors(Q, a) if c.j >= b] == ancestors(Q, b)
    assert len(ancestors(Q, a)) == Q.j - a


@given(cubes(d=2, lo=0, hi=4))
def test_parent_and_children(Q):
    assert Q in Q.parent().children()
    assert all(contains(Q, k) for k in Q.children())
    assert sum(k.volume for k in Q.children()) == Q.volume


def test_coeffseq_validation():
    with pytest.raises(ParamError):
        CoeffSeq(1, {(1, -1, (0,)): 1.0})
    with pytest.raises(ParamError):
        CoeffSeq(1, {(2, 0, (0,)): 1.0})
    with pytest.raises(ParamError):
        CoeffSeq(2, {(1, 0, (0,)): 1.0})
    with pytest.raises(ParamError):
        CoeffSeq(1, {(0, 1, (0,)): 1.0})
    assert len(CoeffSeq(1, {(1, 0, (0,)): 0.0})) == 0


def test_coeffseq_json_roundtrip():
    t = CoeffSeq(2, {(1, 0, (0, 0)): 1.5, (3, 2, (1, -1)): -0.25})
    assert CoeffSeq.from_json(json.dumps(t.to_json())) == t
    parsed = CoeffSeq.from_json({"d": 1, "entries": [{"i": 1, "j": 1, "m": [1], "t": "1/4"}]})
    assert parsed.entries == {(1, 1, (1,)): 0.25}


def test_candidates_single_entry():
    t = CoeffSeq(1, {(1, 0, (0,)): 1.0})
    cands = candidate_cubes(t, "1/2", 1.0, best_known=1.0)
    assert unit_cube(1) in cands.cubes
    assert cands.stop_level == 0


def test_candidates_tau_zero_cover_level():
    t = CoeffSeq(1, {(1, 2, (0,)): 1.0, (1, 2, (3,)): 1.0})
    cands = candidate_cubes(t, 0, 2.0)
    assert unit_cube(1) in cands.cubes
    assert cands.stop_level == 0


def test_candidates_split_orthants():
    t = CoeffSeq(1, {(1, 0, (0,)): 1.0, (1, 0, (-1,)): 1.0})
    cands = candidate_cubes(t, 0, 2.0)
    assert not any(contains(P, DyadicCube(0, (0,))) and contains(P, DyadicCube(0, (-1,)))
                   for P in cands.cubes)
    # no cube of levels -4..0 crosses the origin
    for j in range(-4, 1):
        for m in range(-4, 4):
            P = DyadicCube(j, (m,))
            assert not (contains(P, DyadicCube(0, (0,))) and contains(P, DyadicCube(0, (-1,))))


@given(small_seqs(), st.sampled_from(["B", "F"]), st.sampled_from(["0", "1/4", "1/2", "1"]),
       st.sampled_from(["1/2", "1", "2", "4"]), st.sampled_from(["1/2", "1", "2", "inf"]))
def test_candidate_set_complete(t, scale, tau, p, q):
    np_ = NormParams("1/2", tau, p, q, t.d, None, scale)
    fast = seq_norm(t, np_).value
    slow = brute_force_norm(t, np_).value
    assert fast == pytest.approx(slow, rel=1e-12)
