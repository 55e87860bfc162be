"""Non-hyper-heuristic comparison methods under the shared budget and trace contract.

Every iterative baseline spends at most ``T`` evaluations, where one move
delta or one full tour evaluation counts as one.
"""

from __future__ import annotations

import time

import numpy as np

from . import __version__
from .construction import multi_start_nn, nn_tours_by_length
from .instances import Instance, distance_matrix
from .search import (DEFAULT_BUDGET, Acceptance, RunResult, Tracer, accept,
                     annealing_temperature, run_rngs)
from .tour import (MIN_SITES, _apply, _delta, _draw_move, _tour_length_fast,
                   double_bridge)

ILS_PATIENCE = 200
GA_POPULATION = 50
GA_MUTATION = 0.2
GA_TOURNAMENT = 3
GA_ELITES = 2


def _prepare(inst, dm, initial):
    if inst.n < MIN_SITES:
        raise ValueError(f"baselines need n >= {MIN_SITES}, got {inst.n}")
    if dm is None:
        dm = distance_matrix(inst)
    if initial is None:
        initial = multi_start_nn(dm)
    return dm, np.asarray(dm).tolist(), initial


def _result(method, inst, seed, order, best, initial, tracer, started, T,
            counts=None, accepts=None, **meta):
    meta.update(version=__version__, budget=T)
    return RunResult(method=method, instance_id=inst.id, seed=int(seed),
                     best_order=[int(v) for v in order], best_length=float(best),
                     initial_length=float(initial), trace=tracer.finish(best),
                     operator_counts=list(counts or [0] * 4),
                     operator_accepts=list(accepts or [0] * 4),
                     wall_time=time.perf_counter() - started, budget=T, meta=meta)


def run_nn(inst: Instance, T: int = DEFAULT_BUDGET, seed: int = 0, dm=None,
           initial=None) -> RunResult:
    """Multi-start nearest neighbor, reported as a flat trace over the budget."""
    started = time.perf_counter()
    dm, _, init = _prepare(inst, dm, initial)
    tracer = Tracer(T, init.length)
    return _result("nn", inst, seed, init.order, init.length, init.length,
                   tracer, started, T)


def run_two_opt(inst: Instance, T: int = DEFAULT_BUDGET, seed: int = 0, dm=None,
                initial=None) -> RunResult:
    """One random 2-opt move per iteration, greedy acceptance."""
    started = time.perf_counter()
    dm, D, init = _prepare(inst, dm, initial)
    rng = run_rngs(inst, seed, ("moves",))["moves"]
    n = inst.n
    order, curr = list(init.order), init.length
    tracer = Tracer(T, curr)
    n_acc = 0
    u = rng.random((T, 2))
    for t in range(1, T + 1):
        i, j = _draw_move(0, n, u[t - 1, 0], u[t - 1, 1])
        d = _delta(0, order, D, n, i, j)
        if curr + d < curr:
            order = _apply(0, order, i, j)
            curr += d
            n_acc += 1
        tracer.log(t, curr)
    return _result("two_opt", inst, seed, order, curr, init.length, tracer, started, T,
                   counts=[T, 0, 0, 0], accepts=[n_acc, 0, 0, 0])


def run_sa(inst: Instance, T: int = DEFAULT_BUDGET, seed: int = 0, dm=None,
           initial=None) -> RunResult:
    """Simulated annealing over all four move types with geometric cooling."""
    started = time.perf_counter()
    dm, D, init = _prepare(inst, dm, initial)
    rngs = run_rngs(inst, seed, ("moves", "ops", "accept"))
    n = inst.n
    f0 = init.length
    order, curr = list(init.order), f0
    best, best_order = curr, order
    tracer = Tracer(T, curr)
    counts, accepts = [0] * 4, [0] * 4
    ops = rngs["ops"].integers(0, 4, size=T)
    u = rngs["moves"].random((T, 2))
    acc_rng = rngs["accept"]
    for t in range(1, T + 1):
        op = int(ops[t - 1])
        i, j = _draw_move(op, n, u[t - 1, 0], u[t - 1, 1])
        d = _delta(op, order, D, n, i, j)
        counts[op] += 1
        temp = annealing_temperature(t, T, f0)
        if accept(curr, curr + d, Acceptance.ANNEALING, temp, acc_rng):
            order = _apply(op, order, i, j)
            curr += d
            accepts[op] += 1
            if curr < best:
                best, best_order = curr, order
        tracer.log(t, best)
    return _result("sa", inst, seed, best_order, best, f0, tracer, started, T,
                   counts=counts, accepts=accepts)


def _double_bridge_cuts(rng, n):
    return sorted(int(c) for c in rng.choice(np.arange(1, n), size=3, replace=False))


def run_ils(inst: Instance, T: int = DEFAULT_BUDGET, seed: int = 0, dm=None,
            initial=None, patience: int = ILS_PATIENCE) -> RunResult:
    """Iterated local search: random 2-opt descent, double-bridge kicks of the home tour.

    A descent ends after ``patience`` consecutive non-improving 2-opt
    samples; its local optimum replaces the home tour only if shorter.
    """
    started = time.perf_counter()
    dm, D, init = _prepare(inst, dm, initial)
    rngs = run_rngs(inst, seed, ("moves", "kicks"))
    move_rng, kick_rng = rngs["moves"], rngs["kicks"]
    n = inst.n
    home, home_len = list(init.order), init.length
    order, curr = list(home), home_len
    best, best_order = home_len, home
    tracer = Tracer(T, best)
    evals = fails = kicks = n_acc = 0
    while evals < T:
        u1, u2 = move_rng.random(2)
        i, j = _draw_move(0, n, u1, u2)
        d = _delta(0, order, D, n, i, j)
        evals += 1
        if curr + d < curr:
            order = _apply(0, order, i, j)
            curr += d
            fails = 0
            n_acc += 1
            if curr < best:
                best, best_order = curr, order
        else:
            fails += 1
        tracer.log(evals, best)
        if fails >= patience and evals < T:
            if curr < home_len:
                home, home_len = order, curr
            order = double_bridge(home, _double_bridge_cuts(kick_rng, n))
            curr = _tour_length_fast(order, D)
            evals += 1
            kicks += 1
            fails = 0
            if curr < best:
                best, best_order = curr, order
            tracer.log(evals, best)
    return _result("ils", inst, seed, best_order, best, init.length, tracer, started, T,
                   counts=[evals - kicks, 0, 0, 0], accepts=[n_acc, 0, 0, 0], kicks=kicks)


# --- genetic algorithm ---------------------------------------------------------

def order_crossover(p1: np.ndarray, p2: np.ndarray, a: int, b: int) -> np.ndarray:
    """OX1: keep ``p1[a..b]``, fill the rest in ``p2``'s order starting after ``b``."""
    n = len(p1)
    child = np.empty(n, dtype=p1.dtype)
    child[a:b + 1] = p1[a:b + 1]
    used = np.zeros(n, dtype=bool)
    used[p1[a:b + 1]] = True
    genes = np.roll(p2, -(b + 1))
    genes = genes[~used[genes]]
    slots = np.roll(np.arange(n), -(b + 1))
    slots = slots[(slots < a) | (slots > b)]
    child[slots] = genes
    return child


def _lengths(pop: np.ndarray, dm: np.ndarray) -> np.ndarray:
    return dm[pop, np.roll(pop, -1, axis=1)].sum(axis=1)


def _tournament(rng, fitness, size):
    picks = rng.integers(0, len(fitness), size=size)
    return int(picks[np.argmin(fitness[picks])])


def run_ga(inst: Instance, T: int = DEFAULT_BUDGET, seed: int = 0, dm=None,
           initial=None, population: int = GA_POPULATION,
           mutation: float = GA_MUTATION, tournament: int = GA_TOURNAMENT,
           elites: int = GA_ELITES, on_generation=None) -> RunResult:
    """Generational GA on permutations.

    The initial population holds the shortest nearest-neighbor tours from
    distinct starts, topped up with random permutations when ``n`` is
    smaller than the population.

    ``on_generation(pop, lengths)`` is called after every generation, for
    inspection in tests.
    """
    started = time.perf_counter()
    if inst.n < MIN_SITES:
        raise ValueError(f"baselines need n >= {MIN_SITES}, got {inst.n}")
    if dm is None:
        dm = distance_matrix(inst)
    dm = np.asarray(dm)
    rng = run_rngs(inst, seed, ("ga",))["ga"]
    n = inst.n
    population = min(population, T)
    seeds = [np.array(t.order) for t in nn_tours_by_length(dm)[:population]]
    seeds += [rng.permutation(n) for _ in range(population - len(seeds))]
    pop = np.stack(seeds)
    fit = _lengths(pop, dm)
    evals = population
    n_children = population - elites
    generations = (T - population) // n_children if n_children > 0 else 0
    first = int(np.argmin(fit))
    best, best_order = float(fit[first]), pop[first].copy()
    initial_length = best
    tracer = Tracer(T, best)
    tracer.log(evals, best)
    if on_generation is not None:
        on_generation(pop, fit)
    for _ in range(generations):
        ranked = np.argsort(fit, kind="stable")
        children = [pop[k].copy() for k in ranked[:elites]]
        while len(children) < population:
            p1 = pop[_tournament(rng, fit, tournament)]
            p2 = pop[_tournament(rng, fit, tournament)]
            a, b = sorted(rng.integers(0, n, size=2))
            child = order_crossover(p1, p2, int(a), int(b))
            if rng.random() < mutation:
                i, j = rng.choice(n, size=2, replace=False)
                child[i], child[j] = child[j], child[i]
            children.append(child)
        pop = np.stack(children)
        fit = np.concatenate([fit[ranked[:elites]], _lengths(pop[elites:], dm)])
        evals += n_children
        k = int(np.argmin(fit))
        if fit[k] < best:
            best, best_order = float(fit[k]), pop[k].copy()
        tracer.log(evals, best)
        if on_generation is not None:
            on_generation(pop, fit)
    return _result("ga", inst, seed, best_order, best, initial_length, tracer, started, T,
                   evaluations=evals, generations=generations)


BASELINES = {
    "nn": run_nn,
    "two_opt": run_two_opt,
    "sa": run_sa,
    "ils": run_ils,
    "ga": run_ga,
}
