"""Final gap, convergence AUC and summary statistics."""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Iterable, Sequence


def final_gap(length: float, ref: float) -> float:
    """Relative excess of ``length`` over the per-instance reference length."""
    if ref <= 0:
        raise ValueError("reference length must be positive")
    if length < ref - 1e-9:
        raise ValueError(f"length {length} is below the reference {ref}")
    return max(0.0, (length - ref) / ref)


def convergence_auc(trace: Sequence[tuple[int, float]], ref: float, T: int) -> float:
    """Trapezoidal area under the best-so-far gap curve over budget fraction [0, 1].

    ``trace`` holds ``(iteration, best_length)`` checkpoints and should cover
    0 and ``T``; a missing endpoint is extended flat.
    """
    if not trace:
        raise ValueError("trace is empty")
    if T <= 0:
        raise ValueError("budget must be positive")
    pts = sorted((int(t), float(v)) for t, v in trace)
    if pts[0][0] > 0:
        pts.insert(0, (0, pts[0][1]))
    if pts[-1][0] < T:
        pts.append((T, pts[-1][1]))
    xs = [t / T for t, _ in pts]
    gs = [final_gap(v, ref) for _, v in pts]
    area = 0.0
    for k in range(1, len(pts)):
        area += 0.5 * (gs[k] + gs[k - 1]) * (xs[k] - xs[k - 1])
    return area


def mean_se(values: Iterable[float]) -> tuple[float, float]:
    """Mean and standard error (sample std / sqrt(count)); SE is 0 for one value."""
    vals = [float(v) for v in values]
    if not vals:
        return math.nan, math.nan
    m = math.fsum(vals) / len(vals)
    if len(vals) < 2:
        return m, 0.0
    var = math.fsum((v - m) ** 2 for v in vals) / (len(vals) - 1)
    return m, math.sqrt(var / len(vals))


def reference_lengths(pairs: Iterable[tuple[str, float]]) -> dict[str, float]:
    """Per-instance minimum length over the full run pool."""
    refs: dict[str, float] = {}
    for inst_id, length in pairs:
        if inst_id not in refs or length < refs[inst_id]:
            refs[inst_id] = float(length)
    return refs


def group_stats(rows, key, fields=("final_gap", "auc", "runtime_s")) -> dict:
    """``{group: {mean_<f>, se_<f>}}`` for rows grouped by ``key(row)``."""
    groups = defaultdict(list)
    for row in rows:
        groups[key(row)].append(row)
    out = {}
    for g in sorted(groups, key=str):
        stats = {"runs": len(groups[g])}
        for f in fields:
            m, se = mean_se(getattr(r, f) for r in groups[g])
            stats[f"mean_{f}"] = m
            stats[f"se_{f}"] = se
        out[g] = stats
    return out


def operator_shares(counts: Sequence[float]) -> list[float]:
    total = float(sum(counts))
    if total <= 0:
        return [0.0] * len(counts)
    return [c / total for c in counts]
