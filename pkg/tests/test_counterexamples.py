import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morrey_embed.classifier import Relation
from morrey_embed.counterexamples import (
    GROWTH_THRESHOLD,
    RATE_TOLERANCE,
    CrossCheck,
    Family,
    FamilyKind,
    est1_bound,
    floor_pow2,
    gen_level_diagonal,
    gen_random,
    gen_sparse_hierarchical,
    gen_unit_column,
    harmonic_gamma,
    judge,
    placement_cap,
    placement_violations,
    ratio_experiment,
    sparse_gamma,
)
from morrey_embed.params import ParamError
from morrey_embed.seqnorm import NormOverflow, NormParams, norm_of, seq_norm
from morrey_embed.suite import Scenario, load_scenario, load_suite, scenario_names


def lq(values, q):
    if q == "inf":
        return max(values)
    q = float(Fraction(q))
    return math.fsum(v ** q for v in values) ** (1 / q)


# level diagonal

@pytest.mark.parametrize("q", ["1", "2", "4", "inf"])
@pytest.mark.parametrize("p, tau", [("2", "1/4"), ("2", "1/2"), ("1", "0"), ("4", "1/8")])
@pytest.mark.parametrize("s", ["0", "1/2", "-1"])
def test_level_diagonal_norm_is_gamma_norm(q, p, tau, s):
    J = 12
    gam = harmonic_gamma(J, 2)
    seq = gen_level_diagonal(s, 1, J, gam)
    value = norm_of(seq, NormParams(s, tau, p, q)).value
    assert value == pytest.approx(lq(gam, q), rel=1e-10)


def test_level_diagonal_d2_expansion():
    seq = gen_level_diagonal("1/4", 2, 3, [1.0, 0.5, 0.3, 0.2])
    np_ = NormParams("1/4", "1/4", 2, 2, 2)
    assert seq_norm(seq.expand(), np_).value == pytest.approx(lq([1.0, 0.5, 0.3, 0.2], "2"), rel=1e-12)


def test_level_diagonal_rejects_bad_gamma():
    with pytest.raises(ParamError):
        gen_level_diagonal(0, 1, 2, [1.0, 0.0, 1.0])
    with pytest.raises(ParamError):
        gen_level_diagonal(0, 1, 2, [1.0])


# unit column

@pytest.mark.parametrize("J", [1, 8, 16, 64, 256])
def test_unit_column_source_norm_is_one(J):
    seq = gen_unit_column(2, 1, J)
    assert norm_of(seq, NormParams(2, 0, "inf", "inf")).value == 1.0


@pytest.mark.parametrize("J", [4, 8, 16, 32])
@pytest.mark.parametrize("tau", ["0", "1/4", "1/2"])
def test_unit_column_target_closed_form(J, tau):
    seq = gen_unit_column(2, 1, J)
    value = norm_of(seq, NormParams(2, tau, 2, 2)).value
    t = float(Fraction(tau))
    expected = max(2.0 ** (L * (t - 0.5)) * (J - L + 1) ** 0.5 for L in range(J + 1))
    assert value == pytest.approx(expected, rel=1e-12)


def test_unit_column_q2_inf_bounded():
    for J in (8, 32, 128):
        assert norm_of(gen_unit_column(2, 1, J), NormParams(2, 0, 2, "inf")).value == pytest.approx(1.0)


# sparse hierarchical

def test_floor_pow2_exact():
    assert floor_pow2(Fraction(1)) == 2
    assert floor_pow2(Fraction(1, 2)) == 1
    assert floor_pow2(Fraction(3, 2)) == 2
    assert floor_pow2(Fraction(10, 3)) == 10
    assert floor_pow2(Fraction(0)) == 1


def test_cap_example():
    # d = 1, p1 = 2, tau1 = 1/4: the level -2 cap is floor(2^{2 * 1/2}) = 2
    assert placement_cap(0, -2, 1, Fraction(2) * Fraction(1, 4)) == 2


@given(st.sampled_from([Fraction(1, 8), Fraction(1, 4)]), st.sampled_from([-1, -2, -3, -4]),
       st.integers(0, 8), st.sampled_from([1, 2]))
def test_placement_property(tau1, nu0, J, d):
    if d == 2 and J > 5:
        J = 5
    gam = [1.0] * (J + 1)
    seq = gen_sparse_hierarchical(2, tau1, d, nu0, gam, J)
    assert placement_violations(seq, 2, tau1, nu0) == []
    for j in range(J + 1):
        count = sum(1 for (_, jj, _) in seq.entries if jj == j)
        assert count == placement_cap(j, nu0, d, 2 * tau1)


@pytest.mark.parametrize("tau1", [Fraction(1, 8), Fraction(1, 4)])
@pytest.mark.parametrize("q1", ["1", "2", "4"])
def test_est1_bound(tau1, q1):
    J, s1 = 8, Fraction(1, 4)
    gam = sparse_gamma(s1, 2, tau1, 1, J, 2)
    seq = gen_sparse_hierarchical(2, tau1, 1, -2, gam, J)
    value = seq_norm(seq, NormParams(s1, tau1, 2, q1)).value
    assert value <= est1_bound(s1, 2, q1, tau1, 1, gam) * (1 + 1e-12)


def test_sparse_rejects_bad_branch():
    with pytest.raises(ParamError):
        gen_sparse_hierarchical(2, "1/2", 1, -2, [1.0], 0)
    with pytest.raises(ParamError):
        gen_sparse_hierarchical(2, "1/4", 1, 0, [1.0], 0)
    with pytest.raises(ParamError):
        gen_sparse_hierarchical("inf", "1/4", 1, -1, [1.0], 0)


# random

def test_random_deterministic():
    assert gen_random(4, 0.3, 7) == gen_random(4, 0.3, 7)
    assert gen_random(4, 0.3, 7) != gen_random(4, 0.3, 8)


def test_random_counts():
    assert len(gen_random(2, 1.0, 0)) == 7
    assert len(gen_random(2, 1.0, 0, d=2, all_branches=True)) == 3 * (1 + 4 + 16)
    t = gen_random(3, 1.0, 0, d=2)
    assert all(0 <= x < 2 ** j for (_, j, m) in t.entries for x in m)


def test_random_density_bounds():
    with pytest.raises(ParamError):
        gen_random(2, 0.0, 0)
    assert len(gen_random(3, 1e-9, 0)) == 0


# harness

def test_identity_ratio_is_one():
    np_ = NormParams("1/2", "1/4", 2, 2)
    for fam in (Family(FamilyKind.UNIT_COLUMN, {"s2": "1/2"}),
                Family(FamilyKind.LEVEL_DIAGONAL, {"s1": "1/2", "q2": "2"}),
                Family(FamilyKind.RANDOM, {"samples": 20, "seed": 1})):
        rep = ratio_experiment(np_, np_, fam, [4, 5, 6])
        assert all(r == pytest.approx(1.0, rel=1e-12) for *_, r in rep.rows)
        assert abs(rep.alpha) < 1e-9


def test_ratio_experiment_preconditions():
    np_ = NormParams(0, 0, 2, 2)
    fam = Family(FamilyKind.UNIT_COLUMN, {})
    with pytest.raises(ParamError):
        ratio_experiment(np_, np_, fam, [8, 16])
    with pytest.raises(ParamError):
        ratio_experiment(np_, np_, fam, [8, 16, 16])


def test_norm_overflow_names_J():
    fam = Family(FamilyKind.LEVEL_DIAGONAL, {"s1": "0"})
    with pytest.raises(NormOverflow) as err:
        ratio_experiment(NormParams(0, 0, 2, 2), NormParams(5000, 0, 2, 2), fam, [1, 2, 3])
    assert err.value.J == 1


def test_unit_column_growth_rate():
    fam = Family(FamilyKind.UNIT_COLUMN, {"s2": "2"})
    rep = ratio_experiment(NormParams(2, 0, "inf", "inf"), NormParams(2, 0, 2, 2), fam,
                           [8, 16, 32, 64], Relation.NOT_CONTINUOUS)
    assert rep.predicted == 0.5
    assert abs(rep.alpha - 0.5) <= RATE_TOLERANCE
    assert rep.cross_check is CrossCheck.CONSISTENT


def test_judge():
    assert judge(None, 1.0, None) is CrossCheck.EXPLORATORY
    assert judge(Relation.UNKNOWN, 1.0, None) is CrossCheck.EXPLORATORY
    assert judge(Relation.COMPACT, GROWTH_THRESHOLD - 0.01, None) is CrossCheck.CONSISTENT
    assert judge(Relation.CONTINUOUS_NOT_COMPACT, 0.3, None) is CrossCheck.INCONSISTENT
    assert judge(Relation.NOT_CONTINUOUS, 0.45, 0.5) is CrossCheck.CONSISTENT
    assert judge(Relation.NOT_CONTINUOUS, 0.3, 0.5) is CrossCheck.INCONSISTENT
    assert judge(Relation.NOT_CONTINUOUS, 0.3, None) is CrossCheck.CONSISTENT


def test_report_json_and_csv():
    fam = Family(FamilyKind.UNIT_COLUMN, {"s2": "0"})
    rep = ratio_experiment(NormParams(0, 0, "inf", "inf"), NormParams(0, 0, 2, 2), fam, [2, 4, 8])
    out = rep.to_json()
    assert [r["J"] for r in out["rows"]] == [2, 4, 8]
    assert set(out["fit"]) >= {"alpha", "residual", "predicted", "consistent"}
    assert rep.csv_rows()[0] == ["J", "src_norm", "tgt_norm", "ratio"]


def test_family_json_roundtrip():
    fam = Family(FamilyKind.SPARSE_HIERARCHICAL, {"p1": "2", "tau1": "1/4", "nu0": -2})
    assert Family.from_json(fam.to_json()) == fam


# shipped scenarios

def test_scenario_suite_consistent():
    names = scenario_names()
    assert len(names) >= 6
    for sc in load_suite():
        res = sc.run()
        rep = res.report
        if res.relation is Relation.UNKNOWN:
            assert rep.cross_check is CrossCheck.EXPLORATORY
            continue
        assert rep.cross_check is CrossCheck.CONSISTENT, sc.name
        if res.relation.is_continuous:
            assert rep.alpha < GROWTH_THRESHOLD
        elif rep.predicted:
            assert abs(rep.alpha - rep.predicted) <= RATE_TOLERANCE


def test_scenario_version_checked():
    obj = {"version": 2, "name": "x", "src": {}, "tgt": {}, "family": {"kind": "Random"}}
    with pytest.raises(ParamError):
        Scenario.from_json(obj)
    with pytest.raises(ParamError):
        load_scenario("no_such_scenario")


def test_scenario_parallel_matches_serial():
    sc = load_scenario("unit_column")
    a = sc.run(jobs=1).to_json()
    b = sc.run(jobs=2).to_json()
    assert a == b
    assert np.isfinite(a["fit"]["alpha"])
