"""Closed-form lifetime/success evaluation and the Monte Carlo simulator."""

import dataclasses
import math

import numpy as np
import pytest
import scipy.stats

from uwjam.analysis import (
    AnalysisReport,
    SensitivitySpec,
    SimulationResult,
    _ci_half_width,
    analyze,
    expected_lifetime,
    first_frame_success,
    mismatch_evaluation,
    sensitivity_sweep,
    simulate,
    success_probability,
)
from uwjam.solver import (
    GameConfig,
    GameState,
    MixedStrategy,
    fixed_policy_table,
    solve_full_game,
)
from uwjam.subgame import expected_success


def _cfg(**over):
    base = dict(k=2, b_t0=8, b_j0=6, alpha=0.4,
                p_clear=0.1, p_blocked=0.7, horizon=3)
    base.update(over)
    return GameConfig(**base)


@pytest.fixture(scope="module")
def ne_table():
    return solve_full_game(_cfg())


# ---------------------------------------------------------------------------
# closed-form evaluation


def test_lifetime_pure_minimum_send():
    cfg = _cfg(k=4, b_t0=200, b_j0=200, horizon=1)
    table = fixed_policy_table(cfg, lambda s: 4, lambda s: 0)
    assert expected_lifetime(table) == 50.0
    # min() keeps the policy legal at off-path low-battery states
    table = fixed_policy_table(cfg, lambda s: min(8, s.b_t), lambda s: 0)
    assert expected_lifetime(table) == 25.0


def test_lifetime_hand_check_mixed():
    # from b_t=5 (k=2): pure n_t=2 lasts 2 frames
    cfg = _cfg(b_t0=5, b_j0=0)
    pure = fixed_policy_table(cfg, lambda s: 2, lambda s: 0)
    assert expected_lifetime(pure) == 2.0
    # half the time n_t=4 ends the game after one frame: E = .5*2 + .5*1
    mix = MixedStrategy((2, 4), (0.5, 0.5))
    mixed = fixed_policy_table(cfg, lambda s: mix if s.b_t == 5 else 2,
                               lambda s: 0)
    assert expected_lifetime(mixed) == pytest.approx(1.5, abs=1e-12)
    assert expected_lifetime(mixed, GameState(3, 0)) == 1.0


def test_success_hand_check():
    # deterministic two-frame game, each frame wins with 0.7^2
    cfg = _cfg(b_t0=4, b_j0=0, p_clear=0.3)
    table = fixed_policy_table(cfg, lambda s: 2, lambda s: 0)
    chi = expected_success(cfg.subgame, 2, 0)
    assert chi == pytest.approx(0.49, abs=1e-15)
    assert success_probability(table) == pytest.approx(chi, abs=1e-12)
    assert first_frame_success(table) == pytest.approx(chi, abs=1e-12)


def test_success_error_pair_override(ne_table):
    # a perfect channel wins every frame no matter the strategy
    assert success_probability(ne_table, error_pair=(0.0, 0.0)) == pytest.approx(1.0)
    base = success_probability(ne_table)
    worse = success_probability(ne_table, error_pair=(0.5, 0.95))
    assert worse < base
    ff = first_frame_success(ne_table, error_pair=(0.0, 0.0))
    assert ff == pytest.approx(1.0)


def test_analyze_report(ne_table):
    rep = analyze(ne_table)
    assert isinstance(rep, AnalysisReport)
    assert rep.lifetime == expected_lifetime(ne_table)
    assert rep.success == success_probability(ne_table)
    assert rep.first_frame == first_frame_success(ne_table)
    assert rep.value == ne_table.value(GameState(8, 6))
    assert rep.error_pair == (0.1, 0.7)
    assert rep.config == ne_table.config


def test_mismatch_evaluation(ne_table):
    rep = mismatch_evaluation(ne_table, (0.0, 1.0))
    # lifetime depends only on the strategies, not the channel truth
    assert rep.lifetime == expected_lifetime(ne_table)
    assert rep.success == success_probability(ne_table, error_pair=(0.0, 1.0))
    assert rep.error_pair == (0.0, 1.0)
    # a harsher true channel cannot raise the success probability
    easy = mismatch_evaluation(ne_table, (0.0, 0.0))
    assert rep.success <= easy.success


# ---------------------------------------------------------------------------
# Monte Carlo simulator


def test_simulate_deterministic(ne_table):
    a = simulate(ne_table, runs=200, seed=42)
    b = simulate(ne_table, runs=200, seed=42)
    assert a == b
    c = simulate(ne_table, runs=200, seed=43)
    assert c != a


def test_simulate_pure_game_exact():
    cfg = _cfg(b_t0=8, b_j0=8)
    table = fixed_policy_table(cfg, lambda s: 2, lambda s: 0)
    res = simulate(table, runs=64, seed=1)
    assert res.mean_lifetime == 4.0
    assert res.lifetime_ci == 0.0
    assert res.runs == 64 and res.seed == 1 and res.sigma == 0.0


def test_simulate_matches_analytics(ne_table):
    runs = 4000
    res = simulate(ne_table, runs=runs, seed=9)
    t_crit = scipy.stats.t.ppf(0.975, runs - 1)
    life_se = res.lifetime_ci / t_crit
    succ_se = res.success_ci / t_crit
    assert abs(res.mean_lifetime - expected_lifetime(ne_table)) <= 5 * life_se + 1e-12
    assert abs(res.success_rate - success_probability(ne_table)) <= 5 * succ_se + 1e-12
    assert 0.0 <= res.success_rate <= 1.0


def test_simulate_error_pair_override(ne_table):
    res = simulate(ne_table, runs=100, seed=3, error_pair=(0.0, 0.0))
    assert res.success_rate == pytest.approx(1.0, abs=1e-12)


def test_simulate_validation(ne_table):
    with pytest.raises(ValueError):
        simulate(ne_table, runs=0)
    with pytest.raises(ValueError):
        simulate(ne_table, runs=10, sigma=-0.1)


def test_sensitivity_sweep_lifetime_invariant(ne_table):
    spec = SensitivitySpec(sigmas=(0.0, 0.05, 0.1), runs=300)
    rows = sensitivity_sweep(ne_table, spec=spec, seed=7)
    assert [r.sigma for r in rows] == [0.0, 0.05, 0.1]
    assert all(isinstance(r, SimulationResult) for r in rows)
    # jitter only moves the packet-error coins, never the action draws,
    # so every sigma sees the same battery trajectory
    assert rows[0].mean_lifetime == rows[1].mean_lifetime == rows[2].mean_lifetime
    assert rows[0].lifetime_ci == rows[1].lifetime_ci
    # sigma zero is the plain simulation, bit for bit
    assert rows[0] == simulate(ne_table, runs=300, seed=7)
    assert rows[1].success_rate != rows[0].success_rate


def test_ci_half_width():
    assert _ci_half_width(np.array([3.0])) == 0.0
    assert _ci_half_width(np.array([2.0, 2.0, 2.0])) == 0.0
    samples = np.array([1.0, 2.0, 4.0, 8.0])
    want = scipy.stats.t.ppf(0.975, 3) * samples.std(ddof=1) / 2.0
    assert _ci_half_width(samples) == pytest.approx(want, rel=1e-12)


def test_simulation_result_frozen(ne_table):
    res = simulate(ne_table, runs=10, seed=2)
    with pytest.raises(dataclasses.FrozenInstanceError):
        res.runs = 5
