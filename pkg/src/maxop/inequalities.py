"""Pointwise relations between the maximal operators, checked on point batteries.

Every check returns a ``CheckReport``.  A sample violates a relation
``left <= right`` when ``left - right`` exceeds the combined tolerance

    tol_factor * (error estimate of left + error estimate of right) + 1e-12 (1 + |left|),

where the error estimates come from re-evaluating each attained value with
doubled quadrature orders.  The report keeps the sample with the largest
excess over its tolerance.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .fields import BallIndicator, FieldTuple, Truncated
from .operators import (
    QuadConfig,
    RingProfile,
    TGrid,
    alpha_average,
    hl_average,
    maximal,
    spherical_average,
    sup_search,
    weighted_average,
)
from .special import phi_l1_norm

__all__ = [
    "CheckReport",
    "random_points",
    "check_slicing",
    "check_majorant",
    "check_chain",
    "check_limits",
    "check_recovery",
    "alpha_order",
    "write_reports",
]

FLOOR = 1e-12
LIMIT_ALPHAS_UP = (0.5, 0.9, 0.99, 0.999)
LIMIT_ALPHAS_DOWN = (0.5, 0.1, 0.01, 0.001)


@dataclass
class CheckReport:
    relation: str
    samples: int
    worst_violation: float
    tolerance: float
    passed: bool
    witness: dict = field(default_factory=dict)
    seed: int | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def write_reports(path, reports) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")


def random_points(seed: int, count: int, radius: float, n: int) -> np.ndarray:
    """``count`` points uniform in the ball of given radius in R^n."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / n)
    return g * r[:, None]


class _Worst:
    """Tracks the sample with the largest excess of (left - right) over its tolerance."""

    def __init__(self):
        self.excess = -math.inf
        self.violation = -math.inf
        self.tolerance = 0.0
        self.witness = {}
        self.count = 0

    def add(self, left, right, tol, witness):
        self.count += 1
        gap = float(left - right)
        if gap - tol > self.excess:
            self.excess = gap - tol
            self.violation = gap
            self.tolerance = float(tol)
            self.witness = witness

    def report(self, relation, seed=None, details=None) -> CheckReport:
        if self.count == 0:
            return CheckReport(relation, 0, 0.0, 0.0, True, {}, seed, details or {})
        return CheckReport(relation, self.count, self.violation, self.tolerance,
                           bool(self.violation <= self.tolerance), self.witness, seed, details or {})


def _tolerance(factor, errors, values):
    return factor * sum(errors) + FLOOR * (1.0 + max(abs(v) for v in values))


def _common_grid(tups, x, t_grid: TGrid, config) -> TGrid:
    if t_grid.t_max is not None:
        return t_grid
    reach = max(RingProfile(t, x, config=config).reach for t in tups)
    if not math.isfinite(reach):
        raise ValueError("t_max is required for tuples without compact support")
    return TGrid(t_grid.t_min, 1.05 * reach, t_grid.pts_per_decade, t_grid.refine_depth)


def _witness(x, tup, alpha, **extra):
    w = {"x": [float(v) for v in np.atleast_1d(x)], "alpha": alpha, "tuple": tup.describe()}
    w.update(extra)
    return w


def check_slicing(tup: FieldTuple, k: int, points, alpha: float, t_grid: TGrid | None = None,
                  config: QuadConfig | None = None, tol_factor: float = 10.0, seed=None) -> CheckReport:
    """S^m_α(f)(x) <= S_α(f_k)(x) ∏_{i≠k} M(f_i)(x); ``k`` is a 0-based block index."""
    if tup.m < 2:
        raise ValueError("the slicing bound needs m >= 2")
    if tup.n < 2:
        raise ValueError("the slicing bound needs n >= 2")
    if not 0 <= k < tup.m:
        raise ValueError(f"block index k must lie in [0, {tup.m - 1}]")
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must satisfy 0 <= alpha < 1")
    config = config or QuadConfig()
    t_grid = t_grid or TGrid()
    worst = _Worst()
    singles = [FieldTuple((f,)) for f in tup]
    for x in np.atleast_2d(points):
        grid = _common_grid([tup] + singles, x, t_grid, config)
        left = maximal(RingProfile(tup, x, config=config), alpha, t_grid=grid)
        sk = maximal(RingProfile(singles[k], x, config=config), alpha, t_grid=grid)
        right, errs = sk.value, [left.quad_error_estimate]
        rel_err = sk.quad_error_estimate / max(sk.value, 1e-300)
        for i, single in enumerate(singles):
            if i == k:
                continue
            mi = maximal(RingProfile(single, x, config=config), 0.0, t_grid=grid)
            right *= mi.value
            rel_err += mi.quad_error_estimate / max(mi.value, 1e-300)
        errs.append(right * rel_err)
        tol = _tolerance(tol_factor, errs, [left.value, right])
        worst.add(left.value, right, tol, _witness(x, tup, alpha, t=left.arg_t, left=left.value, right=right))
    return worst.report("slicing", seed, {"k": k})


def check_majorant(tup: FieldTuple, alpha: float, points, k: int = 0, t_grid: TGrid | None = None,
                   config: QuadConfig | None = None, tol_factor: float = 10.0, seed=None) -> CheckReport:
    """sup_t |(⊗_{i≠k} f_i) * φ_t| (x̄) <= ||φ||_1 M^{m-1}[f without f_k](x).

    φ(y) = (1-|y|^2)_+^{n/2-α} on R^{(m-1)n}; the convolution is the φ-weighted
    ball average times ||φ||_1, so both sides share the factor ||φ||_1.
    """
    if tup.m < 2 or tup.n < 2:
        raise ValueError("the majorant bound needs m >= 2 and n >= 2")
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must satisfy 0 <= alpha < 1")
    config = config or QuadConfig()
    t_grid = t_grid or TGrid()
    rest = tup.drop(k)
    power = 0.5 * tup.n - alpha
    norm = phi_l1_norm(tup.m, tup.n, alpha)
    worst = _Worst()
    for x in np.atleast_2d(points):
        prof = RingProfile(rest, x, config=config)
        if prof.constant_value is not None:
            left_v = right_v = prof.constant_value
            errs = [0.0]
        else:
            grid = _common_grid([rest], x, t_grid, config).resolve(prof)
            t_l, left_v, _ = sup_search(lambda t: weighted_average(prof, power, t), grid)
            err_l = abs(left_v - weighted_average(prof.refined(), power, t_l))
            right = maximal(prof, 0.0, t_grid=grid)
            right_v = right.value
            errs = [err_l, right.quad_error_estimate]
        left, right_total = norm * left_v, norm * right_v
        tol = _tolerance(tol_factor, [norm * e for e in errs], [left, right_total])
        worst.add(left, right_total, tol, _witness(x, tup, alpha, left=left, right=right_total))
    return worst.report("majorant", seed, {"k": k, "phi_l1": norm})


def check_chain(tup: FieldTuple, alphas, points, t_grid: TGrid | None = None,
                config: QuadConfig | None = None, tol_factor: float = 10.0, seed=None) -> CheckReport:
    """M^m(f)(x) <= S^m_α(f)(x) <= S^m(f)(x) for every α, on one shared scale grid per x."""
    alphas = list(alphas)
    if not alphas or len(np.atleast_2d(points)) == 0:
        raise ValueError("check_chain needs nonempty alphas and points")
    config = config or QuadConfig()
    t_grid = t_grid or TGrid()
    worst = _Worst()
    patterns = {}
    for x in np.atleast_2d(points):
        prof = RingProfile(tup, x, config=config)
        grid = _common_grid([tup], x, t_grid, config)
        hl = maximal(prof, 0.0, t_grid=grid)
        sph = maximal(prof, 1.0, t_grid=grid)
        kind = alpha_order(prof, sorted(set(alphas) | {0.0}), sph.arg_t)
        patterns[kind] = patterns.get(kind, 0) + 1
        for a in alphas:
            mid = maximal(prof, a, t_grid=grid)
            tol = _tolerance(tol_factor, [hl.quad_error_estimate, mid.quad_error_estimate], [hl.value, mid.value])
            worst.add(hl.value, mid.value, tol,
                      _witness(x, tup, a, side="hl<=alpha", left=hl.value, right=mid.value, t=mid.arg_t))
            tol = _tolerance(tol_factor, [mid.quad_error_estimate, sph.quad_error_estimate], [mid.value, sph.value])
            worst.add(mid.value, sph.value, tol,
                      _witness(x, tup, a, side="alpha<=spherical", left=mid.value, right=sph.value, t=sph.arg_t))
    return worst.report("chain", seed, {"alphas": alphas, "alpha_order_at_fixed_t": patterns})


def alpha_order(profile: RingProfile, alphas, t: float, noise: float = 1e-12) -> str:
    """Empirical shape of α ↦ S^m_{α,t}(x) over ``alphas`` plus α = 1: recorded, never asserted."""
    vals = [alpha_average(profile, a, t) for a in alphas if a < 1.0] + [spherical_average(profile, t)]
    diffs = np.diff(vals)
    scale = noise * (1.0 + max(abs(v) for v in vals))
    if np.all(np.abs(diffs) <= scale):
        return "flat"
    if np.all(diffs >= -scale):
        return "increasing"
    if np.all(diffs <= scale):
        return "decreasing"
    return "mixed"


def _is_indicator(f) -> bool:
    return isinstance(f, BallIndicator) or (isinstance(f, Truncated) and _is_indicator(f.base))


def check_limits(tup: FieldTuple, x, t: float, config: QuadConfig | None = None,
                 rel_target: float = 1e-3, linear_slack: float = 0.2) -> CheckReport:
    """α → 1 and α → 0 limits of the fixed-scale averages.

    The violation is the worst of several normalised metrics (each must stay
    <= 1): final relative errors over ``rel_target``, failures of monotone
    decrease, and a log-log slope of the α → 0 gap below 1 - linear_slack.
    """
    if any(_is_indicator(f) for f in tup):
        warnings.warn("fixed-scale limits can fail for indicator tuples at discontinuity radii",
                      RuntimeWarning, stacklevel=2)
    config = config or QuadConfig()
    prof = RingProfile(tup, np.asarray(x, dtype=float), config=config, memo=False)
    sph = spherical_average(prof, t)
    hl = hl_average(prof, t)
    up = [abs(alpha_average(prof, a, t) - sph) for a in LIMIT_ALPHAS_UP]
    down = [abs(alpha_average(prof, a, t) - hl) for a in LIMIT_ALPHAS_DOWN]
    scale_up = max(abs(sph), 1e-300)
    scale_down = max(abs(hl), 1e-300)
    metrics = {
        "alpha_to_1_final": up[-1] / scale_up / rel_target,
        "alpha_to_0_final": down[-1] / scale_down / rel_target,
    }
    noise = 1e-13
    metrics["alpha_to_1_monotone"] = float(any(b > a + noise for a, b in zip(up, up[1:])))
    metrics["alpha_to_0_monotone"] = float(any(b > a + noise for a, b in zip(down, down[1:])))
    slope = None
    tail = np.asarray(down[1:])
    if np.all(tail > noise * scale_down):
        slope = float(np.polyfit(np.log(LIMIT_ALPHAS_DOWN[1:]), np.log(tail), 1)[0])
        metrics["alpha_to_0_linear"] = (1.0 - linear_slack) / slope if slope > 0 else math.inf
    worst_key = max(metrics, key=metrics.get)
    details = {
        "alphas_up": list(LIMIT_ALPHAS_UP), "errors_up": up,
        "alphas_down": list(LIMIT_ALPHAS_DOWN), "errors_down": down,
        "spherical": sph, "ball": hl, "alpha_to_0_slope": slope, "metrics": metrics,
    }
    witness = _witness(x, tup, None, t=t, metric=worst_key)
    return CheckReport("limits", 1, float(metrics[worst_key]), 1.0, bool(metrics[worst_key] <= 1.0),
                       witness, None, details)


def check_recovery(tup: FieldTuple, points, alpha: float, ts=(1.0, 0.1, 0.01),
                   config: QuadConfig | None = None, target: float = 1e-2) -> CheckReport:
    """t → 0 recovery: |S^m_{α,t}(f)(x) - ∏ f_i(x)| shrinks along ``ts`` and ends below ``target``.

    The violation is the worst normalised metric over the points: final error
    over ``target``, and 2 for any increase of the error along the sequence.
    """
    ts = [float(t) for t in ts]
    if not ts or any(t <= 0 for t in ts):
        raise ValueError("ts must be a nonempty list of positive scales")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    config = config or QuadConfig()
    worst = _Worst()
    for x in np.atleast_2d(points):
        prof = RingProfile(tup, x, config=config, memo=False)
        exact = float(np.prod([f.eval(x) for f in tup]))
        vals = [float(spherical_average(prof, t)) if alpha == 1.0 else float(alpha_average(prof, alpha, t))
                for t in ts]
        errs = [abs(v - exact) for v in vals]
        noise = 1e-13 * (1.0 + abs(exact))
        metric = errs[-1] / target
        if any(b > a + noise for a, b in zip(errs, errs[1:])):
            metric = max(metric, 2.0)
        worst.add(metric, 1.0, 0.0, _witness(x, tup, alpha, ts=ts, errors=errs, exact=exact))
    return worst.report("recovery", None, {"ts": ts, "target": target})
