"""
Network-level sensing metrics and their empirical estimators.

All three metrics reduce a SlotTrace: detection under ideal listening (EDP),
detection under duty-cycled listening (TDP), and the missed-airtime
complements (conditional TMP_ON and absolute TMP_abs). Conditional metrics
are undefined on traces without active slots and reported as NaN, never as a
silent zero.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import beta as beta_dist

Z_95 = 1.959963984540054


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsReport:
    """Metric estimates with their counts and 95% half-widths."""

    edp: float
    tdp: float
    tmp_on: float
    tmp_abs: float
    n_on: int
    total_slots: int
    edp_ci: float
    tdp_ci: float
    tmp_on_ci: float
    tmp_abs_ci: float
    aggregated: bool = False
    drops: int = 1
    excluded_drops: int = 0
    scenario_id: str | None = None


def _binomial_halfwidth(successes, trials, method="normal"):
    if trials <= 0:
        return float("nan")
    p = successes / trials
    if method == "normal":
        return Z_95 * math.sqrt(p * (1.0 - p) / trials)
    if method == "clopper_pearson":
        lo = 0.0 if successes == 0 else beta_dist.ppf(0.025, successes, trials - successes + 1)
        hi = 1.0 if successes == trials else beta_dist.ppf(0.975, successes + 1, trials - successes)
        return (hi - lo) / 2.0
    raise MetricsError(f"unknown CI method {method!r}")


def estimate_edp(trace):
    """Ideal-listening detection rate over active slots; NaN when none exist."""
    n_on = trace.n_on
    if n_on == 0:
        return float("nan")
    return int(trace.decision_ideal[trace.activity].sum()) / n_on


def estimate_tdp(trace):
    """Duty-gated detection rate over active slots; NaN when none exist."""
    n_on = trace.n_on
    if n_on == 0:
        return float("nan")
    return int(trace.decision[trace.activity].sum()) / n_on


def estimate_tmp(trace):
    """Missed-airtime pair (conditional, absolute).

    tmp_on = 1 - tdp; tmp_abs = (n_on / T) * tmp_on, which on every finite
    trace is the fraction of all slots that are active and missed.
    """
    total = trace.total_slots
    n_on = trace.n_on
    if n_on == 0:
        return float("nan"), 0.0
    tmp_on = 1.0 - estimate_tdp(trace)
    return tmp_on, (n_on / total) * tmp_on


def report_from_trace(trace, ci_method="normal", scenario_id=None):
    """Per-drop MetricsReport for one trace."""
    n_on = trace.n_on
    total = trace.total_slots
    edp = estimate_edp(trace)
    tdp = estimate_tdp(trace)
    tmp_on, tmp_abs = estimate_tmp(trace)
    if n_on == 0:
        edp_ci = tdp_ci = tmp_on_ci = float("nan")
        tmp_abs_ci = _binomial_halfwidth(0, total, ci_method)
    else:
        detected_ideal = int(trace.decision_ideal[trace.activity].sum())
        detected = int(trace.decision[trace.activity].sum())
        edp_ci = _binomial_halfwidth(detected_ideal, n_on, ci_method)
        tdp_ci = _binomial_halfwidth(detected, n_on, ci_method)
        tmp_on_ci = tdp_ci
        tmp_abs_ci = _binomial_halfwidth(n_on - detected, total, ci_method)
    return MetricsReport(
        edp=edp,
        tdp=tdp,
        tmp_on=tmp_on,
        tmp_abs=tmp_abs,
        n_on=n_on,
        total_slots=total,
        edp_ci=edp_ci,
        tdp_ci=tdp_ci,
        tmp_on_ci=tmp_on_ci,
        tmp_abs_ci=tmp_abs_ci,
        scenario_id=scenario_id,
    )


def aggregate_over_drops(reports, weights="equal"):
    """Combine per-drop reports into one aggregate.

    Drops without active slots are excluded from the conditional metrics
    (and counted in ``excluded_drops``); tmp_abs averages over all drops.
    Half-widths are normal-approximation standard errors across drops.
    """
    if not reports:
        raise MetricsError("cannot aggregate an empty report list")
    if weights not in ("equal", "by_n_on"):
        raise MetricsError(f"unknown weighting {weights!r}")
    ids = {r.scenario_id for r in reports if r.scenario_id is not None}
    if len(ids) > 1:
        raise MetricsError(f"mixed scenario identifiers: {sorted(ids)}")
    if len(reports) == 1 and reports[0].n_on > 0:
        return replace(
            reports[0], aggregated=True, drops=1, excluded_drops=0
        )

    valid = [r for r in reports if r.n_on > 0]
    excluded = len(reports) - len(valid)
    if not valid:
        raise MetricsError("no drop has any active slot; conditional metrics undefined")

    if weights == "equal":
        w = np.ones(len(valid))
    else:
        w = np.array([r.n_on for r in valid], dtype=float)
    w = w / w.sum()

    def clamp01(x):
        return min(max(float(x), 0.0), 1.0)

    edp_vals = np.array([r.edp for r in valid])
    tdp_vals = np.array([r.tdp for r in valid])
    edp = clamp01(np.average(edp_vals, weights=w))
    tdp = clamp01(np.average(tdp_vals, weights=w))
    if tdp > edp:  # guard the domination identity against summation order
        tdp = edp
    tmp_on = 1.0 - tdp

    tmp_abs_vals = np.array([r.tmp_abs for r in reports])
    tmp_abs = clamp01(tmp_abs_vals.mean())

    def halfwidth(values, wts):
        if len(values) < 2:
            return float("nan")
        mean = float(wts @ values)
        var = float(wts @ (values - mean) ** 2) / (1.0 - float(wts @ wts) + 1e-300)
        n_eff = 1.0 / float(wts @ wts)
        return Z_95 * math.sqrt(max(var, 0.0) / n_eff)

    return MetricsReport(
        edp=edp,
        tdp=tdp,
        tmp_on=tmp_on,
        tmp_abs=tmp_abs,
        n_on=int(sum(r.n_on for r in reports)),
        total_slots=int(sum(r.total_slots for r in reports)),
        edp_ci=halfwidth(edp_vals, w),
        tdp_ci=halfwidth(tdp_vals, w),
        tmp_on_ci=halfwidth(tdp_vals, w),
        tmp_abs_ci=halfwidth(tmp_abs_vals, np.full(len(reports), 1.0 / len(reports))),
        aggregated=True,
        drops=len(reports),
        excluded_drops=excluded,
        scenario_id=reports[0].scenario_id,
    )
