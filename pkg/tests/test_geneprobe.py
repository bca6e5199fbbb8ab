import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import t_two_sided_quad
from sambandit.errors import ConfigurationError, DatasetError
from sambandit.geneprobe import (
    ExpressionDataset,
    ProbeBanditConfig,
    centered_contexts,
    load_expression,
    logit_reward,
    make_planted_fixture,
    probe_reward,
    run_probe_selection,
    save_expression,
    significant_probes,
    student_t_tail,
    welch_t,
)

FIXTURE = "probe_id\twt\twt\tmut\tmut\np1\t1.0\t2.0\t3.0\t4.0\np2\t0\t5.5\t6.0\t0.5\np3\t2\t2\t2\t2.5\n"


@pytest.fixture
def tsv(tmp_path):
    p = tmp_path / "x.tsv"
    p.write_text(FIXTURE)
    return p


def write(tmp_path, text):
    p = tmp_path / "bad.tsv"
    p.write_text(text)
    return p


def test_tail_center():
    assert student_t_tail(0.0, 7.0) == 1.0


def test_tail_cauchy_closed_form():
    assert abs(student_t_tail(1.0, 1.0) - 0.5) < 1e-10
    # one-sided Cauchy tail beyond t is 1/2 - atan(t)/pi
    for t in (0.3, 2.0, 10.0):
        assert student_t_tail(t, 1.0) == pytest.approx(1 - 2 * math.atan(t) / math.pi, abs=1e-12)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 3.0])
def test_tail_dof10_vs_quadrature(t):
    assert abs(student_t_tail(t, 10.0) - t_two_sided_quad(t, 10.0)) < 1e-8


def test_tail_random_cases_vs_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(12):
        t, dof = rng.uniform(-6, 6), rng.uniform(1.5, 80)
        assert abs(student_t_tail(t, dof) - t_two_sided_quad(t, dof)) < 1e-6


def test_tail_large_dof_is_normal():
    from scipy.special import erfc
    assert student_t_tail(1.96, 1e7) == pytest.approx(erfc(1.96 / math.sqrt(2)), abs=1e-6)


def test_tail_rejects_bad_dof():
    with pytest.raises(ConfigurationError):
        student_t_tail(1.0, 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 50), st.floats(0.01, 50), st.floats(0.5, 200))
def test_tail_monotone_in_abs_t(t, dt, dof):
    a, b = student_t_tail(t, dof), student_t_tail(t + dt, dof)
    assert b <= a
    assert student_t_tail(-t, dof) == a


def test_welch_identical_samples():
    r = welch_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert r.t_stat == 0.0 and r.p_value == 1.0


def test_welch_constant_samples():
    assert welch_t([2.0, 2.0], [2.0, 2.0]).p_value == 1.0
    r = welch_t([2.0, 2.0], [3.0, 3.0])
    assert r.p_value == 1e-12 and r.t_stat < 0


def test_welch_hand_example():
    # means 2 and 5, variances 1 and 1, n = 3 each
    r = welch_t([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
    assert r.t_stat == pytest.approx(-3.0 / math.sqrt(2.0 / 3.0))
    assert r.dof == pytest.approx(4.0)
    assert r.p_value == pytest.approx(t_two_sided_quad(r.t_stat, 4.0), abs=1e-10)


def test_welch_needs_two_per_class():
    with pytest.raises(ConfigurationError):
        welch_t([1.0], [1.0, 2.0])


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.integers(2, 12), elements=st.floats(-100, 100)),
       arrays(np.float64, st.integers(2, 12), elements=st.floats(-100, 100)))
def test_welch_dof_bounds(x1, x2):
    r = welch_t(x1, x2)
    lo, hi = min(x1.size, x2.size) - 1, x1.size + x2.size - 2
    assert lo - 1e-9 <= r.dof <= hi + 1e-9
    assert 0.0 < r.p_value <= 1.0


def test_logit_values():
    assert logit_reward(0.5) == 0.0
    assert logit_reward(0.05) == pytest.approx(math.log(0.95 / 0.05))
    assert logit_reward(0.05) == pytest.approx(2.944, abs=5e-4)
    assert logit_reward(0.0) == pytest.approx(math.log((1 - 1e-12) / 1e-12))


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-9, 0.5 - 1e-6), st.floats(1e-6, 0.4))
def test_logit_symmetric_and_decreasing(p, dp):
    # forming 1 - p rounds by up to one ulp of 1, which moves the logit by about eps / p
    tol = 4 * np.finfo(float).eps / p + 1e-12
    assert logit_reward(p) == pytest.approx(-logit_reward(1 - p), rel=0, abs=tol)
    assert logit_reward(min(p + dp, 1 - 1e-9)) < logit_reward(p)


def test_bootstrap_reward_positive_for_separated_probe():
    rng = np.random.default_rng(0)
    row = np.concatenate([8 + 0.5 * rng.standard_normal(10), 4 + 0.5 * rng.standard_normal(10)])
    ds = ExpressionDataset(row[None, :], 10, 10)
    rewards = np.array([probe_reward(ds, 0, rng) for _ in range(1000)])
    assert np.mean(rewards > 0) >= 0.95


def test_reward_noise_flag():
    ds = ExpressionDataset(np.array([[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]]), 3, 3)
    rng = np.random.default_rng(3)
    clean = probe_reward(ds, 0, np.random.default_rng(3))
    noisy = probe_reward(ds, 0, rng, noise_sd=1.0)
    assert noisy != clean


def test_load_fixture(tsv):
    ds = load_expression(tsv)
    assert ds.values.shape == (3, 4)
    assert (ds.m1, ds.m2) == (2, 2)
    assert ds.probe_ids == ["p1", "p2", "p3"]
    assert ds.class_labels == ("wt", "mut")


def test_raw_counts_keeps_zero(tsv):
    ds = load_expression(tsv, raw_counts=True)
    assert ds.values[1, 0] == 0.0
    assert ds.values[0, 0] == pytest.approx(math.log(2.0))


def test_round_trip(tsv, tmp_path):
    ds = load_expression(tsv)
    out = tmp_path / "y.tsv"
    save_expression(ds, out)
    again = load_expression(out)
    np.testing.assert_array_equal(again.values, ds.values)
    assert again.probe_ids == ds.probe_ids and again.class_labels == ds.class_labels
    save_expression(again, tmp_path / "z.tsv")
    assert (tmp_path / "z.tsv").read_bytes() == out.read_bytes()


@pytest.mark.parametrize("text,where", [
    ("probe_id\ta\ta\tb\tb\np1\t1\tx\t3\t4\n", ":2:3"),
    ("probe_id\ta\ta\tb\tb\np1\t1\t2\t3\n", ":2"),
    ("probe_id\ta\tb\tb\np1\t1\t2\t3\n", ":1"),
    ("probe_id\ta\ta\tb\tb\tc\np1\t1\t2\t3\t4\t5\n", ":1"),
    ("probe_id\ta\tb\ta\tb\np1\t1\t2\t3\t4\n", ":1"),
    ("probe_id\ta\ta\tb\tb\np1\t1\tnan\t3\t4\n", ":2:3"),
])
def test_malformed_files_report_location(tmp_path, text, where):
    p = write(tmp_path, text)
    with pytest.raises(DatasetError) as err:
        load_expression(p)
    assert f"{p}{where}" in str(err.value)


def test_dataset_invariants():
    with pytest.raises(DatasetError):
        ExpressionDataset(np.ones((2, 3)), 1, 2)
    with pytest.raises(DatasetError):
        ExpressionDataset(np.array([[1.0, np.inf, 1.0, 1.0]]), 2, 2)


def test_centering_keeps_missing_and_zeroes_mean():
    ds = ExpressionDataset(np.array([[0.0, 2.0, 4.0, 6.0], [1.0, 1.0, 1.0, 3.0]]), 2, 2)
    c = centered_contexts(ds)
    np.testing.assert_allclose(c, [[0.0, -2.0, 0.0, 2.0], [-0.5, -0.5, -0.5, 1.5]])


def test_saturated_fixture_is_always_successful():
    rng = np.random.default_rng(0)
    vals = np.hstack([10 + 0.1 * rng.standard_normal((30, 4)), 2 + 0.1 * rng.standard_normal((30, 4))])
    ds = ExpressionDataset(vals, 4, 4)
    assert significant_probes(ds).all()
    s = run_probe_selection(ds, ProbeBanditConfig(T=20, arms_per_round=5), trials=2)
    np.testing.assert_array_equal(s, np.ones(20))


def test_empty_signal_fixture_is_never_successful():
    vals = np.tile([1.0, 2.0, 3.0, 1.0, 2.0, 3.0], (25, 1))
    ds = ExpressionDataset(vals, 3, 3)
    with pytest.warns(UserWarning):
        s = run_probe_selection(ds, ProbeBanditConfig(T=15, arms_per_round=5), trials=2)
    np.testing.assert_array_equal(s, np.zeros(15))


def test_ols_baseline_runs_and_oracle_is_refused():
    ds = make_planted_fixture(n_probes=60, n_signal=10, m1=5, m2=5, seed=1)
    s = run_probe_selection(ds, ProbeBanditConfig(policy="ols", T=10, arms_per_round=10), trials=1)
    assert s.shape == (10,) and np.all((s >= 0) & (s <= 1))
    from sambandit.errors import UnsupportedBaselineError
    with pytest.raises(UnsupportedBaselineError):
        run_probe_selection(ds, ProbeBanditConfig(policy="oracle", T=2), trials=1)


def test_selection_is_deterministic():
    ds = make_planted_fixture(n_probes=80, n_signal=10, m1=5, m2=5, seed=2)
    cfg = ProbeBanditConfig(T=30, arms_per_round=20)
    a = run_probe_selection(ds, cfg, trials=2, seed=5)
    b = run_probe_selection(ds, cfg, trials=2, seed=5)
    np.testing.assert_array_equal(a, b)


def test_planted_fixture_shape():
    ds = make_planted_fixture(seed=0)
    assert ds.values.shape == (2000, 72) and (ds.m1, ds.m2) == (38, 34)
    frac = np.mean(ds.values == 0)
    assert abs(frac - 0.15) < 3 * math.sqrt(0.15 * 0.85 / ds.values.size)
    assert 50 <= significant_probes(ds).sum() <= 250
