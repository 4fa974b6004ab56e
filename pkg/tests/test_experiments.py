import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from charsums.arith import factorize
from charsums.burgess import count_M
from charsums.characters import enumerate_characters
from charsums.errors import ConfigError, InsufficientSpread
from charsums.experiments import (
    ExperimentConfig,
    H_for,
    burgess_q_exponent,
    characters_for,
    compile_rule,
    dyadic_classify,
    fit_exponent,
    fit_loglog,
    moduli_for,
    random_spaced_family,
    run_chain_check,
    run_theorem_check,
    theorem_conditions,
    theorem_q_exponent,
)
from charsums.report import ReportRow
from charsums.sums import build_prefix, max_partial

from oracles import brute_M, trial_factor


# -- dyadic classes and fits -----------------------------------------------------------------


@pytest.mark.parametrize("values, r, expected", [([3.0], 2, {16: 1}), ([1.2], 2, {2: 1}), ([0.0], 1, {1: 1}), ([2.0], 1, {2: 1})])
def test_dyadic_classify_examples(values, r, expected):
    assert dyadic_classify(values, r) == expected


@settings(max_examples=200)
@given(st.lists(st.floats(0, 1e6), max_size=30), st.integers(1, 4))
def test_dyadic_classify_partitions(values, r):
    out = dyadic_classify(values, r)
    assert sum(out.values()) == len(values)
    for v in values:
        x = v**r
        hits = [V for V in out if (V / 2 < x <= V) or (x <= 1 and V == 1)]
        assert len(hits) == 1


def _rows(qs, vals):
    return [ReportRow(int(q), 0, 2, 10, 0, 3, float(v), 1.0, float(v)) for q, v in zip(qs, vals)]


def test_fit_examples():
    qs = [10, 100, 1000, 10**4]
    assert fit_exponent(_rows(qs, [5.0] * 4)).slope == pytest.approx(0, abs=1e-12)
    assert abs(fit_exponent(_rows(qs, qs)).slope - 1) < 1e-9
    with pytest.raises(InsufficientSpread):
        fit_loglog([10, 20, 30], [1, 2, 3])
    with pytest.raises(InsufficientSpread):
        fit_loglog([10, 1000], [1, 2])


@settings(max_examples=100)
@given(st.floats(-3, 3), st.floats(0.1, 100), st.integers(3, 20))
def test_fit_recovers_power_laws(a, c, n):
    qs = np.geomspace(100, 10**6, n)
    assert abs(fit_loglog(qs, c * qs**a).slope - a) < 1e-9


def test_theoretical_exponents():
    assert burgess_q_exponent(2) == pytest.approx(3 / 16)
    assert theorem_q_exponent(1, 0.8) == pytest.approx(1.5)
    assert theorem_q_exponent(2, 0.55) == pytest.approx(3 * 0.55 + 0.75 + 0.375)


# -- configuration ------------------------------------------------------------------------------


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"moduli_family": "squares"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"q_range": [10, 5]})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"colour": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"moduli_family": "explicit_list"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"H_rule": "q^^2"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"H_rule": "__import__('os')"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(tmp_path / "missing.json")
    (tmp_path / "bad.json").write_text("[1, 2]")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_json(tmp_path / "bad.json")


@pytest.mark.parametrize(
    "rule, q, r, expected",
    [("q^{1/(2r)+0.3}", 1000, 2, 1000 ** 0.55), ("q^0.4", 10**4, 1, 10**1.6), ("2r", 5, 3, 6), ("sqrt(q)log(q)", 100, 1, 10 * math.log(100)), ("3", 7, 1, 3)],
)
def test_rules(rule, q, r, expected):
    assert compile_rule(rule)(q, r) == pytest.approx(expected)


def test_H_for_clips_and_ceils():
    cfg = ExperimentConfig(H_rule="q^{1/(2r)+0.3}", r=2)
    assert H_for(cfg, 1000) == math.ceil(1000**0.55)
    assert H_for(ExperimentConfig(H_rule="2q"), 50) == 50
    assert H_for(ExperimentConfig(H_rule="0.001"), 50) == 1
    assert H_for(ExperimentConfig(H_rule="10"), 50) == 10


def test_moduli_families():
    assert moduli_for(ExperimentConfig(q_range=(10, 30))) == [11, 13, 17, 19, 23, 29]
    assert moduli_for(ExperimentConfig("prime_squares", (10, 200))) == [25, 49, 121, 169]
    cf = moduli_for(ExperimentConfig("cube_free", (3, 60)))
    assert all(factorize(q).is_cube_free and q % 4 != 2 for q in cf) and 8 not in cf and 12 in cf
    full = [q for q in range(3, 301) if all(e >= 3 for _, e in trial_factor(q))]
    assert moduli_for(ExperimentConfig("cube_full", (3, 300))) == full == [8, 16, 27, 32, 64, 81, 125, 128, 216, 243, 256]
    assert moduli_for(ExperimentConfig("explicit_list", moduli=[7, 5, 7])) == [5, 7]
    sub = moduli_for(ExperimentConfig(q_range=(1000, 10**5), max_moduli=10))
    assert len(sub) == 10 and sub[0] == 1009 and sub[-1] == 99991


def test_characters_for():
    cfg = ExperimentConfig(characters_per_q=3, seed=4)
    a = characters_for(cfg, 101)
    assert a == characters_for(cfg, 101) and len(a) == 3
    assert all(enumerate_characters(101)[i].is_primitive for i in a)
    quad = characters_for(ExperimentConfig(character_kind="quadratic"), 101)
    assert quad == [50]
    assert characters_for(ExperimentConfig(characters=[3, 99]), 7) == [3]


@settings(max_examples=200)
@given(st.integers(2, 10**5), st.integers(1, 10), st.integers(0, 2**32), st.data())
def test_random_spaced_family(q, J, seed, data):
    H = data.draw(st.integers(1, max(1, q // J)))
    if J * H > q:
        with pytest.raises(ConfigError):
            random_spaced_family(q, H, J, np.random.default_rng(seed))
        return
    pts = random_spaced_family(q, H, J, np.random.default_rng(seed))
    assert pts == random_spaced_family(q, H, J, np.random.default_rng(seed))
    assert len(pts) == J and 0 <= pts[0] and pts[-1] < q
    assert all(b - a >= H for a, b in zip(pts, pts[1:]))


def test_theorem_conditions():
    assert theorem_conditions(101, 1, 11) == ["COND_I", "COND_II", "COND_III"]
    assert theorem_conditions(101, 1, 10) == ["COND_I"]
    assert theorem_conditions(125, 4, 3) == ["HYPOTHESIS_VIOLATED"]
    assert theorem_conditions(10**4, 2, 10) == ["HYPOTHESIS_VIOLATED"]
    assert theorem_conditions(10**4 + 7, 4, 10) == ["COND_III"]


# -- sweeps ---------------------------------------------------------------------------------


def test_theorem_example_legendre_7():
    cfg = ExperimentConfig("explicit_list", moduli=[7], characters=[3], r=1, H_rule="3", J=1, points=[0])
    (row,) = run_theorem_check(cfg)
    assert (row.q, row.chi, row.H, row.J) == (7, 3, 3, 1)
    assert row.lhs == pytest.approx(8)
    assert row.ratio == pytest.approx(row.lhs / row.rhs)
    assert "COND_I" in row.flags


def test_theorem_single_point_matches_direct_max():
    cfg = ExperimentConfig(q_range=(100, 400), r=2, H_rule="q^0.4", J=1, characters_per_q=2, seed=9)
    rows = run_theorem_check(cfg)
    assert len(rows) == 2 * len(moduli_for(cfg))
    for row in rows:
        (N,) = [int(x) for x in random_spaced_family(row.q, row.H, 1, np.random.default_rng([9, row.q, row.chi, 1]))]
        m = max_partial(build_prefix(enumerate_characters(row.q)[row.chi]), N, row.H)[1]
        assert row.lhs == pytest.approx(m**6, rel=1e-12)


def test_theorem_sweep_small_primes():
    rows = run_theorem_check(ExperimentConfig(q_range=(100, 500), r=2, H_rule="q^0.4", J=3))
    assert rows and all(math.isfinite(r.ratio) and r.J == 3 for r in rows)
    assert rows == sorted(rows, key=lambda r: (r.q, r.chi))


def test_theorem_rows_are_never_dropped():
    cfg = ExperimentConfig("explicit_list", moduli=[7], characters=[3], r=1, H_rule="5", J=3)
    (row,) = run_theorem_check(cfg)
    assert math.isnan(row.lhs) and any(f.startswith("ERROR:ConfigError") for f in row.flags)


def _oracle_cross_check(inst, rep):
    M, M1, pair, _ = brute_M(inst.q, inst.H, inst.P, list(inst.window.primes), list(inst.family.points))
    dec = rep.decomposition
    return (dec.M, dec.M1, dec.pair_M2) == (M, M1, pair) and count_M(inst).M == M


def test_chain_sweep_with_oracle():
    cfg = ExperimentConfig(q_range=(100, 500), r=2, H_rule="q^{1/(2r)+0.3}", J=2, max_moduli=4)
    rows = run_chain_check(cfg, cross_check=_oracle_cross_check)
    assert len(rows) == 4
    for row in rows:
        assert "ORACLE_MISMATCH" not in row.flags and "HARD_FAIL" not in row.flags
        assert all(x is not None and math.isfinite(x) for x in row.chain_ratios)


def test_chain_flags_small_H():
    rows = run_chain_check(ExperimentConfig(q_range=(100, 200), r=2, H_rule="2", max_moduli=3))
    assert rows and all("H_TOO_SMALL" in r.flags and math.isnan(r.lhs) for r in rows)


def test_chain_cube_full_high_r():
    rows = run_chain_check(ExperimentConfig("cube_full", (200, 1000), r=4, H_rule="q^{1/(2r)+0.3}", J=2))
    assert rows
    for row in rows:
        assert "HYPOTHESIS_VIOLATED:q_not_cube_free_and_r>3" in row.flags
    assert any(math.isfinite(r.lhs) for r in rows)


def test_sweeps_are_deterministic():
    cfg = ExperimentConfig(q_range=(100, 3000), r=2, J=3, max_moduli=6, seed=17)
    assert run_theorem_check(cfg) == run_theorem_check(cfg)
    assert run_chain_check(cfg) == run_chain_check(cfg)
