"""The hyper-heuristic search loop and acceptance rules."""

from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .construction import multi_start_nn
from .controller import (DEFAULT_ALPHA, DEFAULT_P_GATE, DEFAULT_STAGNATION,
                         DEFAULT_WINDOW, LinUCBController, RandomController,
                         SearchHistory, UCB1Controller, dynamic_features,
                         reward, stagnation_gate)
from .instances import Instance, distance_matrix
from .landscape import static_features
from .tour import (ALL_OPS, MIN_SITES, Op, _apply, _sample_best,
                   _tour_length_fast, DRAWS_PER_MOVE, POOL_SIZE)

DEFAULT_BUDGET = 20_000
TRACE_POINTS = 500
RECOMPUTE_EVERY = 10_000
ANNEAL_T0 = 0.02
ANNEAL_T_END = 1e-4


class ControllerKind(str, enum.Enum):
    LINUCB = "linucb"
    UCB1 = "ucb1"
    RANDOM = "random"


class Acceptance(str, enum.Enum):
    GREEDY = "greedy"
    ANNEALING = "annealing"


class FeatureMask(str, enum.Enum):
    FULL = "full"
    NO_STATIC = "nostatic"
    NO_DYNAMIC = "nodynamic"
    NO_CONTEXT = "nocontext"

    @property
    def uses_static(self) -> bool:
        return self in (FeatureMask.FULL, FeatureMask.NO_DYNAMIC)

    @property
    def uses_dynamic(self) -> bool:
        return self in (FeatureMask.FULL, FeatureMask.NO_STATIC)

    @property
    def dim(self) -> int:
        return 1 + 6 * self.uses_static + 6 * self.uses_dynamic


@dataclass(frozen=True)
class RunConfig:
    budget: int = DEFAULT_BUDGET
    controller: ControllerKind = ControllerKind.LINUCB
    acceptance: Acceptance = Acceptance.GREEDY
    gate: bool = True
    features: FeatureMask = FeatureMask.FULL
    operators: tuple = ALL_OPS
    seed: int = 0
    alpha: float = DEFAULT_ALPHA
    window: int = DEFAULT_WINDOW
    stagnation_window: int = DEFAULT_STAGNATION
    p_gate: float = DEFAULT_P_GATE
    anneal_t0: float = ANNEAL_T0
    anneal_t_end: float = ANNEAL_T_END

    def __post_init__(self):
        object.__setattr__(self, "controller", ControllerKind(self.controller))
        object.__setattr__(self, "acceptance", Acceptance(self.acceptance))
        object.__setattr__(self, "features", FeatureMask(self.features))
        ops = tuple(sorted({Op.parse(o) for o in self.operators}))
        object.__setattr__(self, "operators", ops)
        if not ops:
            raise ValueError("operator set must be non-empty")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if not 0.0 <= self.p_gate <= 1.0:
            raise ValueError("p_gate must lie in [0, 1]")
        if self.window < 1 or self.stagnation_window < 1:
            raise ValueError("windows must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["controller"] = self.controller.value
        d["acceptance"] = self.acceptance.value
        d["features"] = self.features.value
        d["operators"] = [op.label for op in self.operators]
        return d


@dataclass
class RunResult:
    method: str
    instance_id: str
    seed: int
    best_order: list
    best_length: float
    initial_length: float
    trace: list
    operator_counts: list = field(default_factory=lambda: [0] * 4)
    operator_accepts: list = field(default_factory=lambda: [0] * 4)
    wall_time: float = 0.0
    budget: int = 0
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: dict) -> "RunResult":
        data = dict(data)
        data["trace"] = [tuple(p) for p in data["trace"]]
        return cls(**data)


class Tracer:
    """Best-so-far checkpoints every ``max(1, T // 500)`` iterations plus 0 and T."""

    def __init__(self, budget: int, initial: float):
        step = max(1, budget // TRACE_POINTS)
        cps = set(range(0, budget + 1, step))
        cps.add(budget)
        self.checkpoints = sorted(cps)
        self.points = [(0, float(initial))]
        self._next = 1
        self.budget = budget

    def log(self, t: int, best: float) -> None:
        """Record ``best`` for every pending checkpoint up to ``t``."""
        cps = self.checkpoints
        while self._next < len(cps) and cps[self._next] <= t:
            self.points.append((cps[self._next], float(best)))
            self._next += 1

    def finish(self, best: float) -> list:
        self.log(self.budget, best)
        return self.points


def run_rngs(inst: Instance, seed: int, names=("moves", "ties", "gate", "accept")):
    """Independent named sub-streams for one run.

    Each consumer owns its stream, so switching the gate off (say) does not
    shift the move-sampling draws.
    """
    from .instances import _FAMILY_CODE
    root = np.random.SeedSequence([int(seed), _FAMILY_CODE[inst.family], inst.n, inst.seed])
    return {name: np.random.Generator(np.random.PCG64(child))
            for name, child in zip(names, root.spawn(len(names)))}


def accept(curr_len: float, cand_len: float, rule=Acceptance.GREEDY,
           temperature: float = 0.0, rng=None) -> bool:
    """Greedy: strict improvement only. Annealing: Metropolis criterion."""
    if cand_len < curr_len:
        return True
    if Acceptance(rule) is Acceptance.GREEDY:
        return False
    if temperature <= 0:
        raise ValueError("annealing needs a positive temperature")
    return rng.random() < math.exp(-(cand_len - curr_len) / temperature)


def annealing_temperature(t: int, budget: int, initial_length: float,
                          t0: float = ANNEAL_T0, t_end: float = ANNEAL_T_END) -> float:
    """Geometric cooling from ``t0 * L0`` at t=1 to ``t_end * L0`` at t=budget."""
    frac = (t - 1) / (budget - 1) if budget > 1 else 1.0
    return initial_length * t0 * (t_end / t0) ** frac


def _make_controller(cfg: RunConfig, k: int, rng):
    if cfg.controller is ControllerKind.LINUCB:
        return LinUCBController(k, cfg.features.dim, cfg.alpha, rng)
    if cfg.controller is ControllerKind.UCB1:
        return UCB1Controller(k, rng)
    return RandomController(k, rng)


def run(inst: Instance, cfg: RunConfig = RunConfig(), dm=None, method: str = "labhh",
        initial=None) -> RunResult:
    """Run the online operator-selection loop on ``inst``.

    ``initial`` may carry a precomputed multi-start nearest-neighbor tour.
    Deterministic in ``(inst, cfg)``.
    """
    n = inst.n
    if n < MIN_SITES:
        raise ValueError(f"search needs n >= {MIN_SITES}, got {n}")
    started = time.perf_counter()
    if dm is None:
        dm = distance_matrix(inst)
    D = np.asarray(dm).tolist()
    init = initial if initial is not None else multi_start_nn(dm)
    T = cfg.budget
    rngs = run_rngs(inst, cfg.seed)
    move_rng, gate_rng, acc_rng = rngs["moves"], rngs["gate"], rngs["accept"]

    ops = [int(op) for op in cfg.operators]
    k = len(ops)
    ctrl = _make_controller(cfg, k, rngs["ties"])
    contextual = ctrl.contextual
    mask = cfg.features
    gate_arm = ops.index(int(Op.TWO_OPT)) if (cfg.gate and Op.TWO_OPT in ops) else None
    need_state = gate_arm is not None or (contextual and mask.uses_dynamic)

    z = np.ones(mask.dim)
    if contextual and mask.uses_static:
        z[1:7] = static_features(inst, dm).as_array()
    dyn_at = 7 if mask.uses_static else 1

    greedy = cfg.acceptance is Acceptance.GREEDY
    order = list(init.order)
    f0 = curr = init.length
    best_len, best_order = curr, order
    history = SearchHistory(f0)
    tracer = Tracer(T, f0)
    counts = [0] * 4
    accepts = [0] * 4
    n_accepted = 0
    gate_fires = 0
    u_per_call = DRAWS_PER_MOVE * POOL_SIZE

    for t in range(1, T + 1):
        state = None
        if need_state:
            state = dynamic_features(history, t - 1, T, cfg.window, cfg.stagnation_window)
            if contextual and mask.uses_dynamic:
                z[dyn_at:dyn_at + 6] = state.as_array()
        arm = ctrl.select(z)
        if gate_arm is not None:
            gated = stagnation_gate(arm, state, gate_rng, cfg.p_gate, gate_arm)
            gate_fires += gated != arm
            arm = gated
        op = ops[arm]
        i, j, delta = _sample_best(op, order, D, n, move_rng.random(u_per_call))
        cand = curr + delta
        r = reward(curr, cand, f0)
        if greedy:
            ok = cand < curr
        else:
            temp = annealing_temperature(t, T, f0, cfg.anneal_t0, cfg.anneal_t_end)
            ok = accept(curr, cand, Acceptance.ANNEALING, temp, acc_rng)
        improved = False
        if ok:
            improved = cand < curr
            order = _apply(op, order, i, j)
            curr = cand
            n_accepted += 1
            accepts[op] += 1
            if n_accepted % RECOMPUTE_EVERY == 0:
                curr = _tour_length_fast(order, D)
            if curr < best_len:
                best_len, best_order = curr, order
        history.record(curr, ok, improved)
        ctrl.update(arm, z, r)
        counts[op] += 1
        tracer.log(t, best_len)

    trace = tracer.finish(best_len)
    meta = {"config": cfg.to_dict(), "context_dim": mask.dim if contextual else 0,
            "gate_fires": gate_fires, "accepted": n_accepted, "version": __version__}
    return RunResult(method=method, instance_id=inst.id, seed=cfg.seed,
                     best_order=[int(v) for v in best_order], best_length=float(best_len),
                     initial_length=float(f0), trace=trace, operator_counts=counts,
                     operator_accepts=accepts, wall_time=time.perf_counter() - started,
                     budget=T, meta=meta)
