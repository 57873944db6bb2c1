"""Experiment kinds: typed configs, INI parsing and the task runners behind ``maxop run``."""

from __future__ import annotations

import configparser
import math
import random
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .fields import FieldTuple, parse_field
from .fourier import multiplier_envelope, radial_fourier, s_alpha_fourier
from .inequalities import (
    CheckReport,
    check_chain,
    check_limits,
    check_majorant,
    check_recovery,
    check_slicing,
    random_points,
)
from .lplab import ExponentTuple, decay_fit, exact_region, ratio_probe, region_classify
from .operators import QuadConfig, RingProfile, TGrid, alpha_average
from .special import slicing_identity_check


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to exit status 2)."""


# ---------------------------------------------------------------------------
# configs
# ---------------------------------------------------------------------------

DEFAULT_PAIR = "gaussian scale=1 | gaussian scale=0.7 center=0.5,0"


@dataclass(frozen=True)
class Common:
    seed: int = 20240601
    radial_order: int = 32
    inner_order: int = 32
    memo_samples: int = 4096
    t_min: float = 1e-3
    t_max: float | None = field(default=None, metadata={"conv": float})
    pts_per_decade: int = 48
    refine_depth: int = 24

    def quad(self) -> QuadConfig:
        return QuadConfig(radial_order=self.radial_order, inner_order=self.inner_order,
                          memo_samples=self.memo_samples)

    def tgrid(self) -> TGrid:
        return TGrid(self.t_min, self.t_max, self.pts_per_decade, self.refine_depth)


@dataclass(frozen=True)
class IdentitiesConfig(Common):
    ms: tuple = (2, 3)
    ns: tuple = (2, 3, 4)
    alphas: tuple = (0.0, 0.25, 0.5, 0.9)
    threshold: float = 1e-12


@dataclass(frozen=True)
class ChainConfig(Common):
    n: int = 2
    fields: str = DEFAULT_PAIR
    alphas: tuple = (0.1, 0.5, 0.9)
    points: int = 100
    radius: float = 3.0
    tol_factor: float = 10.0


@dataclass(frozen=True)
class SlicingConfig(Common):
    n: int = 2
    fields: str = DEFAULT_PAIR
    alpha: float = 0.5
    k: int = 0
    points: int = 50
    radius: float = 3.0
    tol_factor: float = 10.0


@dataclass(frozen=True)
class MajorantConfig(SlicingConfig):
    pass


@dataclass(frozen=True)
class LimitsConfig(Common):
    n: int = 2
    fields: str = DEFAULT_PAIR
    t: float = 0.5
    points: int = 4
    radius: float = 1.5
    rel_target: float = 1e-3
    linear_slack: float = 0.2
    recovery_alpha: float = 0.5
    recovery_ts: tuple = (1.0, 0.1, 0.01)
    recovery_points: int = 20
    recovery_target: float = 1e-2


@dataclass(frozen=True)
class DecayConfig(Common):
    m: int = 1
    n: int = 2
    alpha: float = 0.5
    radii: tuple = (4.0, 8.0, 16.0, 32.0)
    t_strategy: str = "fixed_probe"
    slope_rtol: float = 0.02


@dataclass(frozen=True)
class RatioConfig(Common):
    n: int = 2
    fields: str = "ball radius=1"
    alpha: float = 0.5
    exponents: tuple = (4.0,)
    half_widths: tuple = (4.0, 8.0, 16.0)
    grid_points: int = 129
    divergence_growth: float = 0.25
    stable_change: float = 0.05
    expect: str = "none"


@dataclass(frozen=True)
class RegionConfig(Common):
    m: int = 2
    n: int = 2
    alpha: float = 0.5
    exponents: tuple = (2.0, 2.0)
    sweep: int = 10000


@dataclass(frozen=True)
class OracleConfig(Common):
    ns: tuple = (2, 3)
    fields: str = "gaussian scale=0.5641895835477563 | bump radius=3"
    alphas: tuple = (0.0, 0.3, 0.7)
    ts: tuple = (0.5, 1.0, 2.0)
    xs: tuple = (0.0, 1.0, 2.0)
    rel_target: float = 1e-3
    envelope_alphas: tuple = (0.0, 0.5, 0.9)
    slope_tol: float = 0.05


KINDS = {
    "identities": (IdentitiesConfig, "normalisation identity residuals over an (m, n, alpha) grid"),
    "chain": (ChainConfig, "M^m <= S^m_alpha <= S^m on a seeded point battery"),
    "limits": (LimitsConfig, "alpha -> 1, alpha -> 0 and t -> 0 limits at fixed scales"),
    "slicing": (SlicingConfig, "S^m_alpha(f) <= S_alpha(f_k) prod_{i != k} M(f_i) on a battery"),
    "majorant": (MajorantConfig, "phi-weighted averages dominated by ||phi||_1 M^{m-1}"),
    "decay": (DecayConfig, "log-log decay slope of S^m_alpha on ball indicators"),
    "ratio": (RatioConfig, "L^p ratio probes under box growth"),
    "region": (RegionConfig, "boundedness-region predicate, single query plus exact sweep"),
    "oracle": (OracleConfig, "Fourier-side cross-check and multiplier envelope slopes"),
}


@dataclass(frozen=True)
class RunSpec:
    name: str
    kind: str
    params: object
    base_dir: str

    def describe(self) -> dict:
        return {"name": self.name, "kind": self.kind, "params": asdict(self.params)}


def _convert(raw: str, default, conv=None):
    raw = raw.strip()
    if conv is not None:
        return None if raw.lower() in ("", "none", "auto") else conv(raw)
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        items = [v for v in raw.replace(";", ",").split(",") if v.strip()]
        kind = int if default and all(isinstance(v, int) for v in default) else float
        return tuple(kind(v) for v in items)
    return raw


def default_params(kind: str):
    return KINDS[kind][0]()


def parse_config_text(text: str, base_dir: str = ".") -> tuple:
    """Return (runs, runner options) from INI text with ``[run.<name>]`` sections."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    runner = {}
    runs = []
    for section in cp.sections():
        items = dict(cp.items(section))
        if section == "runner":
            unknown = set(items) - {"threads"}
            if unknown:
                raise ConfigError(f"[runner]: unknown keys {sorted(unknown)}")
            if "threads" in items:
                runner["threads"] = _positive_int(items["threads"], "[runner] threads")
            continue
        if not section.startswith("run."):
            raise ConfigError(f"unknown section [{section}]; expected [runner] or [run.<name>]")
        name = section[4:]
        if not name or not all(c.isalnum() or c in "-_" for c in name):
            raise ConfigError(f"[{section}]: run names use letters, digits, '-' and '_'")
        kind = items.pop("kind", None)
        if kind not in KINDS:
            raise ConfigError(f"[{section}]: kind must be one of {sorted(KINDS)}, got {kind!r}")
        cls = KINDS[kind][0]
        known = {f.name: f for f in fields(cls)}
        unknown = set(items) - set(known)
        if unknown:
            raise ConfigError(f"[{section}]: unknown keys {sorted(unknown)} for kind {kind!r}")
        kwargs = {}
        for key, raw in items.items():
            f = known[key]
            try:
                kwargs[key] = _convert(raw, f.default, f.metadata.get("conv"))
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
        spec = RunSpec(name, kind, cls(**kwargs), base_dir)
        validate(spec)
        runs.append(spec)
    if not runs:
        raise ConfigError("config defines no [run.<name>] sections")
    return runs, runner


def _positive_int(raw, what):
    try:
        v = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{what} must be an integer") from exc
    if v < 1:
        raise ConfigError(f"{what} must be >= 1")
    return v


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _check_alpha(alpha, where, allow_one=False):
    hi_ok = alpha <= 1.0 if allow_one else alpha < 1.0
    if not (alpha >= 0.0 and hi_ok):
        rng = "[0, 1]" if allow_one else "[0, 1)"
        raise ConfigError(
            f"{where}: alpha = {alpha} is outside {rng}; the normalisation 1/B(mn/2, 1 - alpha) "
            f"needs 1 - alpha > 0 (the Beta function has a pole at alpha = 1)"
        )


def _tuple_of(spec: RunSpec, n: int) -> FieldTuple:
    parts = [p.strip() for p in spec.params.fields.split("|") if p.strip()]
    if not parts:
        raise ConfigError(f"[run.{spec.name}]: fields is empty")
    try:
        return FieldTuple(tuple(parse_field(p, n, spec.base_dir) for p in parts))
    except (ValueError, OSError) as exc:
        raise ConfigError(f"[run.{spec.name}] fields: {exc}") from exc


def validate(spec: RunSpec) -> None:
    p = spec.params
    where = f"[run.{spec.name}]"
    if p.radial_order < 2 or p.inner_order < 2 or p.memo_samples < 16:
        raise ConfigError(f"{where}: quadrature orders must be >= 2 and memo_samples >= 16")
    if not p.t_min > 0 or (p.t_max is not None and not p.t_max > p.t_min):
        raise ConfigError(f"{where}: need 0 < t_min < t_max")
    if p.pts_per_decade < 1 or p.refine_depth < 0:
        raise ConfigError(f"{where}: pts_per_decade >= 1 and refine_depth >= 0 required")
    if hasattr(p, "n") and not 1 <= p.n <= 8:
        raise ConfigError(f"{where}: n must lie in 1..8")
    if hasattr(p, "fields"):
        if spec.kind == "oracle":
            for n in p.ns:
                tup = _tuple_of(spec, n)
                if any(f.radial_center is None or np.any(np.asarray(f.radial_center) != 0) for f in tup):
                    raise ConfigError(f"{where}: oracle fields must be radial about the origin")
        else:
            _tuple_of(spec, p.n)
    kind = spec.kind
    if kind == "identities":
        if not p.ms or not p.ns or not p.alphas:
            raise ConfigError(f"{where}: ms, ns and alphas must be nonempty")
        for a in p.alphas:
            _check_alpha(a, where)
    elif kind == "chain":
        if not p.alphas:
            raise ConfigError(f"{where}: alphas must be nonempty")
        for a in p.alphas:
            _check_alpha(a, where, allow_one=True)
    elif kind in ("slicing", "majorant"):
        _check_alpha(p.alpha, where)
        m = len(_tuple_of(spec, p.n))
        if m < 2 or p.n < 2:
            raise ConfigError(f"{where}: {kind} needs m >= 2 fields and n >= 2")
        if not 0 <= p.k < m:
            raise ConfigError(f"{where}: k is a 0-based block index in [0, {m - 1}]")
    elif kind == "limits":
        _check_alpha(p.recovery_alpha, where, allow_one=True)
        if not p.t > 0 or not p.recovery_ts or min(p.recovery_ts) <= 0:
            raise ConfigError(f"{where}: scales must be positive")
    elif kind == "decay":
        _check_alpha(p.alpha, where, allow_one=True)
        if p.m < 1 or len(p.radii) < 2 or min(p.radii) < 2:
            raise ConfigError(f"{where}: decay needs m >= 1 and at least two radii, all >= 2")
        if p.t_strategy not in ("fixed_probe", "full_sup"):
            raise ConfigError(f"{where}: t_strategy must be fixed_probe or full_sup")
    elif kind == "ratio":
        _check_alpha(p.alpha, where, allow_one=True)
        if len(p.exponents) != len(_tuple_of(spec, p.n)) or min(p.exponents) < 1:
            raise ConfigError(f"{where}: one exponent >= 1 per field is required")
        if len(p.half_widths) < 1 or min(p.half_widths) <= 0 or p.grid_points < 3:
            raise ConfigError(f"{where}: half_widths must be positive and grid_points >= 3")
        if p.expect not in ("none", "divergent", "stable"):
            raise ConfigError(f"{where}: expect must be none, divergent or stable")
    elif kind == "region":
        _check_alpha(p.alpha, where, allow_one=True)
        if len(p.exponents) != p.m or min(p.exponents) < 1:
            raise ConfigError(f"{where}: exponents need m entries, each >= 1")
        if p.sweep < 0:
            raise ConfigError(f"{where}: sweep must be >= 0")
    elif kind == "oracle":
        for a in p.alphas:
            _check_alpha(a, where)
        if min(p.ts) <= 0 or min(p.xs) < 0:
            raise ConfigError(f"{where}: ts must be positive and xs nonnegative")
        for a in p.envelope_alphas:
            _check_alpha(a, where)


# ---------------------------------------------------------------------------
# task workers (module level so that they pickle)
# ---------------------------------------------------------------------------


def _task_chain(spec, x):
    p = spec.params
    return check_chain(_tuple_of(spec, p.n), p.alphas, [x], p.tgrid(), p.quad(), p.tol_factor, p.seed)


def _task_slicing(spec, x):
    p = spec.params
    return check_slicing(_tuple_of(spec, p.n), p.k, [x], p.alpha, p.tgrid(), p.quad(), p.tol_factor, p.seed)


def _task_majorant(spec, x):
    p = spec.params
    return check_majorant(_tuple_of(spec, p.n), p.alpha, [x], p.k, p.tgrid(), p.quad(), p.tol_factor, p.seed)


def _task_limits(spec, x):
    p = spec.params
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return check_limits(_tuple_of(spec, p.n), x, p.t, p.quad(), p.rel_target, p.linear_slack)


def _task_recovery(spec, x):
    p = spec.params
    return check_recovery(_tuple_of(spec, p.n), [x], p.recovery_alpha, p.recovery_ts, p.quad(), p.recovery_target)


def _task_decay(spec):
    p = spec.params
    return decay_fit(p.m, p.n, p.alpha, p.radii, p.t_strategy, p.quad())


def _task_ratio(spec, half_width):
    p = spec.params
    spacing = 2.0 * half_width / (p.grid_points - 1)
    return ratio_probe(_tuple_of(spec, p.n), p.alpha, ExponentTuple(p.exponents), half_width, spacing,
                       p.tgrid(), p.quad())


def _task_oracle(spec, n, index):
    p = spec.params
    f = _tuple_of(spec, n)[index]
    spectrum = radial_fourier(f)
    tup = FieldTuple((f,))
    rows = []
    for r in p.xs:
        x = np.zeros(n)
        x[0] = r
        prof = RingProfile(tup, x, config=p.quad())
        for a in p.alphas:
            for t in p.ts:
                direct = float(alpha_average(prof, a, t))
                dual = s_alpha_fourier(spectrum, a, t, x)
                rel = abs(dual - direct) / max(abs(direct), 1e-300)
                rows.append({"n": n, "field": f.describe(), "x": r, "alpha": a, "t": t,
                             "direct": direct, "fourier": dual, "rel_error": rel})
    return rows


# ---------------------------------------------------------------------------
# runners: each returns (csv rows, summary dict, reports, passed)
# ---------------------------------------------------------------------------


def _row(kind, m, n, alpha, param, quantity, value):
    return {"experiment": kind, "m": m, "n": n, "alpha": alpha, "param": param,
            "quantity": quantity, "value": value}


def _merge(reports, relation, seed, details):
    """Single reducer in task order: keeps the earliest sample with the largest excess."""
    best = None
    for r in reports:
        if best is None or r.worst_violation - r.tolerance > best.worst_violation - best.tolerance:
            best = r
    return CheckReport(relation, sum(r.samples for r in reports), best.worst_violation, best.tolerance,
                       all(r.passed for r in reports), best.witness, seed, details)


def _points(spec, count, radius, n, salt=0):
    return random_points(spec.params.seed + salt, count, radius, n)


def run_identities(spec, pool_map):
    p = spec.params
    rows, worst = [], 0.0
    for m in p.ms:
        for n in p.ns:
            for a in p.alphas:
                res = slicing_identity_check(m, n, a)
                worst = max(worst, res)
                rows.append(_row("identities", m, n, a, "", "residual", res))
    ok = worst <= p.threshold
    return rows, {"max_residual": worst, "threshold": p.threshold, "pass": ok}, [], ok


def _battery(spec, pool_map, task, relation, alpha_label, details):
    p = spec.params
    tup = _tuple_of(spec, p.n)
    pts = _points(spec, p.points, p.radius, p.n)
    reports = pool_map(task, [(spec, x) for x in pts])
    rows = []
    for i, r in enumerate(reports):
        param = f"point={i};x={_fmt_vec(pts[i])}"
        rows.append(_row(relation, tup.m, p.n, alpha_label, param, "violation", r.worst_violation))
        rows.append(_row(relation, tup.m, p.n, alpha_label, param, "tolerance", r.tolerance))
    patterns = {}
    for r in reports:
        for kind, count in r.details.get("alpha_order_at_fixed_t", {}).items():
            patterns[kind] = patterns.get(kind, 0) + count
    if patterns:
        details = dict(details, alpha_order_at_fixed_t=dict(sorted(patterns.items())))
    merged = _merge(reports, relation, p.seed, details)
    summary = {"tuple": tup.describe(), "report": merged.to_dict()}
    return rows, summary, [merged], merged.passed


def run_chain(spec, pool_map):
    p = spec.params
    return _battery(spec, pool_map, _task_chain, "chain", ",".join(_fmt(a) for a in p.alphas),
                    {"alphas": list(p.alphas)})


def run_slicing(spec, pool_map):
    p = spec.params
    return _battery(spec, pool_map, _task_slicing, "slicing", p.alpha, {"k": p.k})


def run_majorant(spec, pool_map):
    p = spec.params
    return _battery(spec, pool_map, _task_majorant, "majorant", p.alpha, {"k": p.k})


def run_limits(spec, pool_map):
    p = spec.params
    tup = _tuple_of(spec, p.n)
    pts = _points(spec, p.points, p.radius, p.n)
    limit_reports = pool_map(_task_limits, [(spec, x) for x in pts])
    rows = []
    for i, r in enumerate(limit_reports):
        d = r.details
        for a, e in zip(d["alphas_up"], d["errors_up"]):
            rows.append(_row("limits", tup.m, p.n, a, f"point={i};t={_fmt(p.t)}", "gap_to_spherical", e))
        for a, e in zip(d["alphas_down"], d["errors_down"]):
            rows.append(_row("limits", tup.m, p.n, a, f"point={i};t={_fmt(p.t)}", "gap_to_ball", e))
    rec_pts = _points(spec, p.recovery_points, p.radius, p.n, salt=1)
    rec_reports = pool_map(_task_recovery, [(spec, x) for x in rec_pts])
    for i, r in enumerate(rec_reports):
        for t, e in zip(p.recovery_ts, r.witness["errors"]):
            rows.append(_row("recovery", tup.m, p.n, p.recovery_alpha, f"point={i};t={_fmt(t)}", "error", e))
    lim = _merge(limit_reports, "limits", p.seed, {"t": p.t})
    rec = _merge(rec_reports, "recovery", p.seed + 1, {"ts": list(p.recovery_ts)})
    ok = lim.passed and rec.passed
    summary = {"tuple": tup.describe(), "limits": lim.to_dict(), "recovery": rec.to_dict()}
    return rows, summary, [lim, rec], ok


def run_decay(spec, pool_map):
    p = spec.params
    (fit,) = pool_map(_task_decay, [(spec,)])
    rows = [_row("decay", p.m, p.n, p.alpha, f"radius={_fmt(r)}", "value", v)
            for r, v in zip(fit.radii, fit.values)]
    rel = abs(fit.slope - fit.target) / abs(fit.target)
    ok = rel <= p.slope_rtol
    summary = {"slope": fit.slope, "intercept": fit.intercept, "target": fit.target,
               "relative_slope_error": rel, "slope_rtol": p.slope_rtol, "t_strategy": fit.strategy, "pass": ok}
    return rows, summary, [], ok


def classify_growth(ratios, divergence_growth, stable_change) -> tuple:
    changes = [b / a - 1.0 for a, b in zip(ratios, ratios[1:])]
    if changes and all(c >= divergence_growth for c in changes):
        return "divergent", changes
    if all(abs(c) <= stable_change for c in changes):
        return "stable", changes
    return "indeterminate", changes


def run_ratio(spec, pool_map):
    p = spec.params
    tup = _tuple_of(spec, p.n)
    widths = sorted(p.half_widths)
    probes = pool_map(_task_ratio, [(spec, w) for w in widths])
    ex = ExponentTuple(p.exponents)
    rows = [_row("ratio", tup.m, p.n, p.alpha, f"half_width={_fmt(w)};p={_fmt(ex.p_out)}", "ratio", r.ratio)
            for w, r in zip(widths, probes)]
    verdict, changes = classify_growth([r.ratio for r in probes], p.divergence_growth, p.stable_change)
    region = region_classify(tup.m, p.n, p.alpha, ex) if p.alpha <= 1 else None
    ok = p.expect == "none" or verdict == p.expect
    summary = {"tuple": tup.describe(), "exponents": list(ex.p), "p": ex.p_out,
               "half_widths": widths, "ratios": [r.ratio for r in probes],
               "output_norms": [r.output_norm for r in probes], "input_norms": list(probes[0].input_norms),
               "relative_changes": changes, "verdict": verdict, "expect": p.expect,
               "region": region.classification, "distance_to_h": region.distance_to_h, "pass": ok}
    return rows, summary, [], ok


def region_sweep(count: int, seed: int) -> tuple:
    """Randomised tuples, a third of them on the H face or the other faces; returns (agree, total, mismatches)."""
    rng = random.Random(seed)
    agree, mismatches = 0, []
    for i in range(count):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        alpha = Fraction(rng.randint(0, 12), 12)
        recips = [Fraction(rng.randint(0, 64), 64) for _ in range(m)]
        mode = i % 6
        threshold = (m * n - alpha) / n
        if mode == 0:
            last = threshold - sum(recips[:-1])
            if 0 <= last <= 1:
                recips[-1] = last
        elif mode == 1:
            recips[rng.randrange(m)] = Fraction(1)
        elif mode == 2:
            recips[rng.randrange(m)] = Fraction(0)
        exps = ExponentTuple(tuple(math.inf if r == 0 else float(1 / r) for r in recips))
        got = region_classify(m, n, float(alpha), exps).classification
        want = exact_region(m, n, alpha, recips)
        bounded_got = got in ("bounded_interior", "boundary_other_face")
        # n/(mn - α) < p with 1/p = Σ 1/p_i, i.e. n Σ 1/p_i < mn - α; p = ∞ when the sum vanishes
        bounded_want = m * n > alpha and n * sum(recips) < m * n - alpha
        if got == want and bounded_got == bounded_want:
            agree += 1
        elif len(mismatches) < 10:
            mismatches.append({"m": m, "n": n, "alpha": str(alpha), "recips": [str(r) for r in recips],
                               "got": got, "want": want})
    return agree, count, mismatches


def run_region(spec, pool_map):
    p = spec.params
    ex = ExponentTuple(p.exponents)
    v = region_classify(p.m, p.n, p.alpha, ex)
    rows = [_row("region", p.m, p.n, p.alpha, "exponents=" + ",".join(_fmt(e) for e in ex.p),
                 "distance_to_h", v.distance_to_h)]
    agree, total, mismatches = region_sweep(p.sweep, p.seed)
    if total:
        rows.append(_row("region", "", "", "", f"sweep={total};seed={p.seed}", "agreement", agree / total))
    ok = agree == total
    summary = {"classification": v.classification, "distance_to_h": v.distance_to_h,
               "threshold": v.threshold, "reciprocal_sum": v.reciprocal_sum,
               "sweep": {"samples": total, "agree": agree, "mismatches": mismatches}, "pass": ok}
    return rows, summary, [], ok


def run_oracle(spec, pool_map):
    p = spec.params
    tasks = []
    for n in p.ns:
        for i in range(len(_tuple_of(spec, n))):
            tasks.append((spec, n, i))
    results = pool_map(_task_oracle, tasks)
    rows, worst = [], 0.0
    for block in results:
        for r in block:
            worst = max(worst, r["rel_error"])
            rows.append(_row("oracle", 1, r["n"], r["alpha"], f"field={r['field']};x={_fmt(r['x'])};t={_fmt(r['t'])}",
                             "rel_error", r["rel_error"]))
    envelopes = []
    env_ok = True
    for n in p.ns:
        for a in p.envelope_alphas:
            fit = multiplier_envelope(a, n)
            good = abs(fit.slope - fit.target) <= p.slope_tol
            env_ok &= good
            envelopes.append({"n": n, "alpha": a, "slope": fit.slope, "target": fit.target, "pass": good})
            rows.append(_row("oracle", 1, n, a, "envelope", "slope", fit.slope))
    ok = worst <= p.rel_target and env_ok
    summary = {"max_rel_error": worst, "rel_target": p.rel_target, "envelopes": envelopes, "pass": ok}
    return rows, summary, [], ok


RUNNERS = {
    "identities": run_identities,
    "chain": run_chain,
    "limits": run_limits,
    "slicing": run_slicing,
    "majorant": run_majorant,
    "decay": run_decay,
    "ratio": run_ratio,
    "region": run_region,
    "oracle": run_oracle,
}


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _fmt_vec(x) -> str:
    return " ".join(format(float(v), ".17g") for v in x)


def load_config(path) -> tuple:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    runs, runner = parse_config_text(text, str(path.resolve().parent))
    return text, runs, runner
