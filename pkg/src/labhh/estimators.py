"""Estimator-style wrappers so the solvers compose with scikit-learn tooling.

``fit`` takes one instance (an :class:`Instance` or an ``(n, 2)`` array of
coordinates) and stores the best tour; ``predict`` returns it.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .baselines import BASELINES
from .controller import DEFAULT_ALPHA, DEFAULT_P_GATE, DEFAULT_STAGNATION, DEFAULT_WINDOW
from .instances import Family, Instance
from .search import DEFAULT_BUDGET, RunConfig, run
from .tour import ALL_OPS, MIN_SITES


def check_instance(X) -> Instance:
    """Validate ``X`` and return it as an :class:`Instance`."""
    if isinstance(X, Instance):
        if X.n < MIN_SITES:
            raise ValueError(f"need at least {MIN_SITES} sites, got {X.n}")
        return X
    pts = check_array(X, dtype=np.float64, ensure_min_samples=MIN_SITES,
                      ensure_min_features=2)
    if pts.shape[1] != 2:
        raise ValueError(f"expected 2-D coordinates, got {pts.shape[1]} columns")
    return Instance(id="custom", family=Family.CUSTOM, n=pts.shape[0], seed=0, points=pts)


class _TourSolver(BaseEstimator):

    def _store(self, inst, result):
        self.result_ = result
        self.best_order_ = np.asarray(result.best_order, dtype=np.int64)
        self.best_length_ = result.best_length
        self.initial_length_ = result.initial_length
        self.trace_ = np.asarray(result.trace, dtype=float)
        self.n_sites_ = inst.n
        self._fit_points = inst.points
        return self

    def predict(self, X=None):
        """Visiting order found by ``fit``; ``X`` must match the fitted sites."""
        check_is_fitted(self, "best_order_")
        if X is not None:
            pts = check_instance(X).points
            if pts.shape != self._fit_points.shape or not np.array_equal(pts, self._fit_points):
                raise ValueError("predict() got sites different from those passed to fit()")
        return self.best_order_

    def fit_predict(self, X, y=None):
        return self.fit(X).predict()

    def score(self, X=None, y=None):
        """Negative tour length, so larger is better."""
        self.predict(X)
        return -self.best_length_


class LABHHSolver(_TourSolver):
    """Online contextual-bandit operator selection on one TSP instance.

    Parameters mirror :class:`RunConfig`; ``operators`` takes operator names
    (``two_opt``, ``swap``, ``relocate``, ``or_opt2``).
    """

    def __init__(self, budget=DEFAULT_BUDGET, alpha=DEFAULT_ALPHA, controller="linucb",
                 acceptance="greedy", gate=True, features="full",
                 operators=tuple(op.label for op in ALL_OPS), window=DEFAULT_WINDOW,
                 stagnation_window=DEFAULT_STAGNATION, p_gate=DEFAULT_P_GATE,
                 random_state=0):
        self.budget = budget
        self.alpha = alpha
        self.controller = controller
        self.acceptance = acceptance
        self.gate = gate
        self.features = features
        self.operators = operators
        self.window = window
        self.stagnation_window = stagnation_window
        self.p_gate = p_gate
        self.random_state = random_state

    def run_config(self) -> RunConfig:
        return RunConfig(budget=int(self.budget), controller=self.controller,
                         acceptance=self.acceptance, gate=bool(self.gate),
                         features=self.features, operators=tuple(self.operators),
                         seed=int(self.random_state or 0), alpha=float(self.alpha),
                         window=int(self.window), stagnation_window=int(self.stagnation_window),
                         p_gate=float(self.p_gate))

    def fit(self, X, y=None):
        inst = check_instance(X)
        self._store(inst, run(inst, self.run_config()))
        counts = self.result_.operator_counts
        self.operator_counts_ = {op.label: counts[op] for op in ALL_OPS}
        return self


class BaselineSolver(_TourSolver):
    """One of the classical comparison methods: nn, two_opt, sa, ils or ga."""

    def __init__(self, method="two_opt", budget=DEFAULT_BUDGET, random_state=0):
        self.method = method
        self.budget = budget
        self.random_state = random_state

    def fit(self, X, y=None):
        if self.method not in BASELINES:
            raise ValueError(f"unknown baseline {self.method!r}; "
                             f"expected one of {sorted(BASELINES)}")
        inst = check_instance(X)
        result = BASELINES[self.method](inst, int(self.budget), int(self.random_state or 0))
        return self._store(inst, result)
