import json
import math

import numpy as np
import pytest

from labhh import RunConfig, RunResult, distance_matrix, generate, multi_start_nn, run, \
    tour_length
from labhh.controller import LinUCBController
from labhh.search import (ANNEAL_T0, ANNEAL_T_END, Acceptance, FeatureMask, Tracer, accept,
                          annealing_temperature)
from labhh.tour import Op

from conftest import brute_force_optimum, make_instance


def strip_time(res):
    d = res.to_dict()
    d.pop("wall_time")
    return d


def test_single_iteration(uniform50):
    inst, dm = uniform50
    res = run(inst, RunConfig(budget=1, seed=3), dm=dm)
    assert res.best_length <= res.initial_length
    assert sum(res.operator_counts) == 1
    assert res.trace == [(0, res.initial_length), (1, res.best_length)]


def test_deterministic(uniform50):
    inst, _ = uniform50
    for cfg in (RunConfig(budget=3000, seed=9),
                RunConfig(budget=2000, seed=9, acceptance="annealing"),
                RunConfig(budget=2000, seed=1, controller="ucb1", features="nocontext")):
        assert strip_time(run(inst, cfg)) == strip_time(run(inst, cfg))
    a = run(inst, RunConfig(budget=2000, seed=1))
    b = run(inst, RunConfig(budget=2000, seed=2))
    assert a.operator_counts != b.operator_counts or a.best_order != b.best_order


def test_small_instance_rejected():
    inst = make_instance([[0, 0], [1, 0], [1, 1], [0, 1]])
    with pytest.raises(ValueError):
        run(inst, RunConfig(budget=10))


@pytest.mark.parametrize("overrides", [{}, {"acceptance": "annealing"},
                                       {"controller": "random", "features": "nocontext"},
                                       {"operators": ("swap", "relocate")}])
def test_result_contract(overrides):
    inst = generate("corridor", 80, 1)
    dm = distance_matrix(inst)
    T = 4000
    res = run(inst, RunConfig(budget=T, seed=2, **overrides), dm=dm)
    values = [v for _, v in res.trace]
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert res.trace[0] == (0, res.initial_length) and res.trace[-1][0] == T
    assert len(res.trace) == 501
    assert res.best_length == values[-1] <= res.initial_length
    assert sum(res.operator_counts) == T
    assert all(a <= c for a, c in zip(res.operator_accepts, res.operator_counts))
    assert sorted(res.best_order) == list(range(80))
    exact = tour_length(res.best_order, dm)
    assert abs(exact - res.best_length) <= 1e-9 * exact
    assert res.initial_length == multi_start_nn(dm).length
    assert res.meta["config"]["seed"] == 2 and res.meta["config"]["budget"] == T


def test_greedy_incumbent_never_worsens():
    inst = generate("clustered", 60, 2)
    res = run(inst, RunConfig(budget=3000, seed=4))
    assert res.meta["accepted"] == sum(res.operator_accepts)
    assert res.best_length < res.initial_length


def test_operator_mask_zeroes_counts():
    inst = generate("uniform", 40, 3)
    res = run(inst, RunConfig(budget=2000, operators=("two_opt", "or_opt2")))
    assert res.operator_counts[Op.SWAP] == 0 and res.operator_counts[Op.RELOCATE] == 0
    assert res.operator_counts[Op.TWO_OPT] > 0 and res.operator_counts[Op.OR_OPT2] > 0
    with pytest.raises(ValueError):
        RunConfig(operators=())


@pytest.mark.parametrize("mask,dim", [("full", 13), ("nostatic", 7), ("nodynamic", 7),
                                      ("nocontext", 1)])
def test_context_dimension(mask, dim):
    assert FeatureMask(mask).dim == dim
    res = run(generate("uniform", 30, 1), RunConfig(budget=50, features=mask))
    assert res.meta["context_dim"] == dim


def test_gate_is_neutral_when_stagnation_never_saturates():
    inst = generate("mixed_density", 60, 5)
    dm = distance_matrix(inst)
    # same S on both sides: stagnation is also a context feature
    gated = run(inst, RunConfig(budget=3000, seed=7, stagnation_window=10**9), dm=dm)
    plain = run(inst, RunConfig(budget=3000, seed=7, stagnation_window=10**9, gate=False),
                dm=dm)
    assert gated.meta["gate_fires"] == 0
    assert gated.operator_counts == plain.operator_counts
    assert gated.best_order == plain.best_order and gated.trace == plain.trace


def test_gate_fires_with_defaults():
    res = run(generate("uniform", 60, 5), RunConfig(budget=3000, seed=7))
    assert res.meta["gate_fires"] > 0


def test_bias_only_linucb_is_shrunk_mean():
    rng = np.random.default_rng(0)
    ctrl = LinUCBController(4, 1, 1.0, np.random.default_rng(1))
    z = np.ones(1)
    sums, pulls = np.zeros(4), np.zeros(4)
    for _ in range(500):
        k = ctrl.select(z)
        r = float(np.clip(rng.normal(0.1 * k - 0.2, 0.3), -1, 1))
        ctrl.update(k, z, r)
        sums[k] += r
        pulls[k] += 1
    for k, arm in enumerate(ctrl.arms):
        assert abs(arm.theta[0] - sums[k] / (pulls[k] + 1)) < 1e-12


def test_accept_rules():
    assert not accept(5.0, 5.0, Acceptance.GREEDY)
    assert accept(5.0, 4.9, Acceptance.GREEDY)
    rng = np.random.default_rng(0)
    assert all(accept(5.0, 4.0, Acceptance.ANNEALING, 0.01, rng) for _ in range(100))
    with pytest.raises(ValueError):
        accept(5.0, 6.0, Acceptance.ANNEALING, 0.0, rng)
    hits = [accept(1.0, 1.3, Acceptance.ANNEALING, 0.3, rng) for _ in range(10_000)]
    assert abs(np.mean(hits) - math.exp(-1)) < 0.02


def test_annealing_schedule_endpoints():
    L0 = 7.0
    assert abs(annealing_temperature(1, 1000, L0) - ANNEAL_T0 * L0) < 1e-15
    assert abs(annealing_temperature(1000, 1000, L0) - ANNEAL_T_END * L0) < 1e-15
    temps = [annealing_temperature(t, 1000, L0) for t in range(1, 1001)]
    assert all(b < a for a, b in zip(temps, temps[1:]))
    assert abs(annealing_temperature(1, 1, L0) - ANNEAL_T_END * L0) < 1e-15


def test_tracer_checkpoints():
    tr = Tracer(20_000, 5.0)
    assert tr.checkpoints[:3] == [0, 40, 80] and tr.checkpoints[-1] == 20_000
    assert len(tr.checkpoints) == 501
    tr = Tracer(7, 1.0)
    assert tr.checkpoints == list(range(8))
    tr = Tracer(1003, 1.0)
    assert tr.checkpoints[-2:] == [1002, 1003]


def test_run_result_json_round_trip(uniform50):
    inst, dm = uniform50
    res = run(inst, RunConfig(budget=200), dm=dm)
    back = RunResult.from_dict(json.loads(res.to_json()))
    assert back == res


def test_run_config_validation():
    for bad in ({"budget": 0}, {"alpha": -1}, {"p_gate": 1.5}, {"window": 0},
                {"controller": "thompson"}, {"operators": ("three_opt",)}):
        with pytest.raises(ValueError):
            RunConfig(**bad)
    cfg = RunConfig(operators=("or-opt", "2opt"))
    assert cfg.operators == (Op.TWO_OPT, Op.OR_OPT2)
    assert cfg.to_dict()["operators"] == ["two_opt", "or_opt2"]


def test_reaches_optimum_on_tiny_instances():
    hits = 0
    for seed in range(5):
        inst = generate("uniform", 8, 500 + seed)
        opt, _ = brute_force_optimum(distance_matrix(inst))
        res = run(inst, RunConfig(budget=5000, seed=seed))
        assert res.best_length >= opt - 1e-9
        hits += abs(res.best_length - opt) <= 1e-9 * opt
    assert hits >= 4
