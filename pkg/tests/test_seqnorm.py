import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morrey_embed.counterexamples import gen_level_diagonal, gen_unit_column
from morrey_embed.dyadic import CoeffSeq, DyadicCube, unit_cube
from morrey_embed.params import ParamError
from morrey_embed.seqnorm import (
    LevelUniformSeq,
    MixedVariant,
    NormParams,
    SmoothingParams,
    StepFnSeq,
    besov_seq_norm,
    brute_force_norm,
    dense_batch_norm,
    dense_to_coeffseq,
    level_uniform_norm,
    mixed_norm,
    seq_norm,
    smooth,
    tl_seq_norm,
)

P_VALS = ["1/2", "1", "3/2", "2", "4"]
Q_VALS = ["1/2", "1", "2", "4", "inf"]
TAUS = ["0", "1/8", "1/4", "1/2", "1"]


@st.composite
def seqs(draw, d=None, inside_unit=False, depth=3):
    d = draw(st.sampled_from([1, 2])) if d is None else d
    entries = {}
    for _ in range(draw(st.integers(1, 6))):
        j = draw(st.integers(0, depth))
        side = 2 ** j
        lo = 0 if inside_unit else -side
        m = tuple(draw(st.integers(lo, side - 1)) for _ in range(d))
        i = draw(st.integers(1, 2 ** d - 1))
        entries[(i, j, m)] = draw(st.floats(0.05, 3.0)) * draw(st.sampled_from([1, -1]))
    return CoeffSeq(d, entries)


@st.composite
def norm_params(draw, d, scale=None, p=None, q=None):
    scale = draw(st.sampled_from(["B", "F"])) if scale is None else scale
    p = draw(st.sampled_from(P_VALS)) if p is None else p
    q = draw(st.sampled_from(Q_VALS)) if q is None else q
    s = draw(st.sampled_from(["-1", "-1/2", "0", "1/3", "1"]))
    return NormParams(s, draw(st.sampled_from(TAUS)), p, q, d, None, scale)


@st.composite
def step_fns(draw, d=1, J=None):
    J = draw(st.integers(0, 3)) if J is None else J
    levels = []
    for j in range(J + 1):
        lv = min(j, 2)
        g = {}
        for m in range(2 ** lv):
            if draw(st.booleans()):
                g[DyadicCube(lv, (m,))] = draw(st.floats(-2.0, 2.0))
        levels.append(g)
    return StepFnSeq(d, levels)


def _norm(t, np_):
    return seq_norm(t, np_).value


# examples

@pytest.mark.parametrize("scale", ["B", "F"])
@pytest.mark.parametrize("tau", ["0", "1/4", "1/2", "2"])
def test_single_coefficient(scale, tau):
    t = CoeffSeq(1, {(1, 0, (0,)): 1.0})
    np_ = NormParams("3/2", tau, 2, 2, 1, None, scale)
    assert seq_norm(t, np_).value == pytest.approx(1.0, rel=1e-14)
    assert brute_force_norm(t, np_).value == pytest.approx(1.0, rel=1e-14)


def test_empty_sequence_is_zero():
    assert seq_norm(CoeffSeq(1), NormParams(0, 0, 2, 2)).value == 0.0


def test_level_diagonal_geometric_closed_form():
    seq = gen_level_diagonal(0, 1, 2, [1.0, 0.5, 0.25]).expand()
    np_ = NormParams(0, "1/4", 2, 2)
    expected = math.sqrt(21) / 4
    assert besov_seq_norm(seq, np_).value == pytest.approx(expected, rel=1e-13)
    assert brute_force_norm(seq, np_).value == pytest.approx(expected, rel=1e-13)


def test_tl_two_term_integral():
    t = CoeffSeq(1, {(1, 0, (0,)): 1.0, (1, 1, (0,)): 1.0})
    np_ = NormParams(0, 0, 1, 1, 1, None, "F")
    assert tl_seq_norm(t, np_).value == pytest.approx(1 + math.sqrt(2) / 2, rel=1e-13)


def test_f_norm_rejects_p_inf():
    with pytest.raises(ParamError):
        tl_seq_norm(CoeffSeq(1, {(1, 0, (0,)): 1.0}), NormParams(0, 0, "inf", 2, 1, None, "F"))


def test_restriction_must_be_coarse():
    with pytest.raises(ParamError):
        NormParams(0, 0, 2, 2, 1, DyadicCube(1, (0,)))


def test_brute_force_guard():
    t = CoeffSeq(2, {(1, 7, (0, 0)): 1.0, (1, 7, (127, 127)): 1.0})
    with pytest.raises(ParamError):
        brute_force_norm(t, NormParams(0, 0, 2, 2, 2))


def test_level_uniform_matches_expansion():
    for scale in ("B", "F"):
        for tau in ("0", "1/4", "1/2", "1"):
            np_ = NormParams("1/2", tau, 2, "3/2", 1, None, scale)
            for seq in (gen_level_diagonal(0, 1, 5, q2=2), gen_unit_column("1/2", 1, 5)):
                assert level_uniform_norm(seq, np_).value == pytest.approx(
                    seq_norm(seq.expand(), np_).value, rel=1e-12)


def test_level_uniform_off_origin_root():
    seq = LevelUniformSeq(1, DyadicCube(1, (1,)), [(0, 1.0), (0, 0.5), (-1, 2.0)])
    np_ = NormParams(0, "1/4", 1, 2)
    assert level_uniform_norm(seq, np_).value == pytest.approx(seq_norm(seq.expand(), np_).value,
                                                               rel=1e-12)


@pytest.mark.parametrize("scale", ["B", "F"])
def test_dense_batch_matches_sparse(scale):
    rng = np.random.default_rng(3)
    levels = [rng.uniform(-1, 1, size=(5, 2 ** j)) * (rng.random((5, 2 ** j)) < 0.5)
              for j in range(5)]
    for q in ("1", "2", "inf"):
        np_ = NormParams("1/4", "1/4", 2, q, 1, None, scale)
        batch = dense_batch_norm(levels, np_)
        for k in range(5):
            assert batch[k] == pytest.approx(seq_norm(dense_to_coeffseq(levels, k), np_).value,
                                             rel=1e-12)


# invariants

@given(seqs(), st.data(), st.floats(0.01, 100.0))
def test_positive_homogeneity(t, data, c):
    np_ = data.draw(norm_params(t.d))
    assert _norm(t.scaled(c), np_) == pytest.approx(c * _norm(t, np_), rel=1e-12)
    assert _norm(t.scaled(-c), np_) == pytest.approx(c * _norm(t, np_), rel=1e-12)


@given(seqs(), st.data(), st.floats(1.0, 5.0))
def test_coefficient_monotonicity(t, data, factor):
    np_ = data.draw(norm_params(t.d))
    key = data.draw(st.sampled_from(sorted(t.entries)))
    bigger = dict(t.entries)
    bigger[key] *= factor
    assert _norm(CoeffSeq(t.d, bigger), np_) >= _norm(t, np_) * (1 - 1e-12)


@given(seqs(d=1), seqs(d=1), st.data())
def test_support_monotonicity(t, u, data):
    np_ = data.draw(norm_params(1))
    union = dict(u.entries)
    union.update(t.entries)
    assert _norm(CoeffSeq(1, union), np_) >= _norm(t, np_) * (1 - 1e-12)


@given(seqs(d=1), seqs(d=1), st.data())
def test_quasi_triangle(t, u, data):
    np_ = data.draw(norm_params(1))
    low = min(float(np_.p.value) if not np_.p.is_inf else math.inf,
              math.inf if np_.q.is_inf else float(np_.q.value), 1.0)
    C = 2.0 ** (max(1.0 / low - 1.0, 0.0) + 1.0)
    assert _norm(t + u, np_) <= C * (_norm(t, np_) + _norm(u, np_)) * (1 + 1e-12)


@given(seqs(), st.sampled_from(P_VALS), st.sampled_from(TAUS), st.sampled_from(["-1", "0", "1/2"]))
def test_f_equals_b_when_p_equals_q(t, p, tau, s):
    b = besov_seq_norm(t, NormParams(s, tau, p, p, t.d, None, "B")).value
    f = tl_seq_norm(t, NormParams(s, tau, p, p, t.d, None, "F")).value
    assert f == pytest.approx(b, rel=1e-12)


@given(seqs(), st.data())
def test_oracle_equivalence(t, data):
    np_ = data.draw(norm_params(t.d))
    assert _norm(t, np_) == pytest.approx(brute_force_norm(t, np_).value, rel=1e-12)


@given(seqs(d=1, inside_unit=True), st.data(), st.sampled_from([0, -1, -2]))
def test_restriction_monotonicity(t, data, level):
    np_ = data.draw(norm_params(1))
    cube = DyadicCube(level, (0,))
    restricted = NormParams(np_.s, np_.tau, np_.p, np_.q, 1, cube, np_.scale)
    value = _norm(t, restricted)
    assert value <= _norm(t, np_) * (1 + 1e-12)
    assert value == pytest.approx(brute_force_norm(t, restricted).value, rel=1e-12)


@given(seqs(d=1, inside_unit=True), st.data(), st.sampled_from([0, -1, -2]))
def test_tau_monotone_restricted(t, data, level):
    """On a fixed cube of volume >= 1 the smaller tau never wins by more than |Q|^{tau1-tau2}."""
    np_ = data.draw(norm_params(1))
    tau2, tau1 = sorted(Fraction(x) for x in data.draw(st.lists(st.sampled_from(TAUS), min_size=2, max_size=2)))
    cube = DyadicCube(level, (0,))
    n2 = _norm(t, NormParams(np_.s, tau2, np_.p, np_.q, 1, cube, np_.scale))
    n1 = _norm(t, NormParams(np_.s, tau1, np_.p, np_.q, 1, cube, np_.scale))
    assert n2 <= cube.volume ** float(tau1 - tau2) * n1 * (1 + 1e-12)


@given(st.integers(0, 5), st.sampled_from(P_VALS), st.sampled_from(P_VALS), st.integers(0, 10 ** 6))
def test_holder_step(j, pa, pb, seed):
    """Per-level block norms: l_{p1} <= l_{p2} <= N^{1/p2-1/p1} l_{p1} for p2 <= p1, N = 2^j."""
    np1, np2 = NormParams(0, 0, pa, 1), NormParams(0, 0, pb, 1)
    if np1.p < np2.p:
        np1, np2 = np2, np1
    rng = random.Random(seed)
    t = CoeffSeq(1, {(1, j, (m,)): rng.uniform(0.1, 1.0) for m in range(2 ** j)})

    def block(np_):
        # with tau = 0 the sup sits at [0,1) and equals 2^{j(1/2-1/p)} times the block norm
        return _norm(t, np_) * 2.0 ** (-j * (0.5 - float(np_.p.inv())))

    b1, b2 = block(np1), block(np2)
    assert b1 <= b2 * (1 + 1e-12)
    assert b2 <= 2.0 ** (j * float(np2.p.inv() - np1.p.inv())) * b1 * (1 + 1e-12)


# mixed norms and smoothing

@pytest.mark.parametrize("variant", list(MixedVariant))
@pytest.mark.parametrize("tau", ["0", "1/4", "1/2"])
def test_mixed_indicator(variant, tau):
    g = StepFnSeq(1, [{unit_cube(1): 1.0}, {}, {}])
    assert mixed_norm(g, 2, 2, tau, variant).value == pytest.approx(1.0, rel=1e-14)
    assert mixed_norm(g, 2, 2, tau, variant, brute_floor=-4).value == pytest.approx(1.0, rel=1e-14)


def test_mixed_zero_sequence():
    assert mixed_norm(StepFnSeq(1, [{}, {}]), 2, 2, 0, "LqLp").value == 0.0


def test_mixed_rejects_overlap():
    with pytest.raises(ParamError):
        StepFnSeq(1, [{DyadicCube(0, (0,)): 1.0, DyadicCube(1, (1,)): 2.0}])


@given(step_fns(), st.sampled_from(P_VALS), st.sampled_from(TAUS))
def test_mixed_variants_agree_when_p_equals_q(g, p, tau):
    a = mixed_norm(g, p, p, tau, "LqLp").value
    b = mixed_norm(g, p, p, tau, "LpLq").value
    assert a == pytest.approx(b, rel=1e-12)


@given(step_fns(), st.sampled_from(P_VALS + ["inf"]), st.sampled_from(Q_VALS), st.sampled_from(TAUS),
       st.sampled_from(list(MixedVariant)))
def test_mixed_matches_brute_force(g, p, q, tau, variant):
    fast = mixed_norm(g, p, q, tau, variant).value
    slow = mixed_norm(g, p, q, tau, variant, brute_floor=-4).value
    assert fast == pytest.approx(slow, rel=1e-12)


@given(step_fns(), st.floats(0.01, 100.0), st.sampled_from(list(MixedVariant)))
def test_mixed_homogeneity(g, c, variant):
    a = mixed_norm(g.scaled(c), 2, 1, "1/4", variant).value
    assert a == pytest.approx(c * mixed_norm(g, 2, 1, "1/4", variant).value, rel=1e-12)


def test_smooth_single_level():
    g = StepFnSeq(1, [{unit_cube(1): 3.0}, {}, {}, {}])
    out = smooth(g, SmoothingParams(1, "1/2"))
    for j, level in enumerate(out.levels):
        assert level[unit_cube(1)] == pytest.approx(3.0 * 2.0 ** (-j / 2), rel=1e-15)


def test_smooth_geometric_norm():
    J, D2, q = 6, 1, 2
    g = StepFnSeq(1, [{unit_cube(1): 1.0}] + [{} for _ in range(J)])
    G = smooth(g, SmoothingParams(1, D2))
    expected = math.sqrt(sum(2.0 ** (-2 * j * D2) for j in range(J + 1)))
    assert mixed_norm(G, 2, q, 0, "LqLp").value == pytest.approx(expected, rel=1e-13)


def test_smoothing_params_positive():
    with pytest.raises(ParamError):
        SmoothingParams(0, 1)
