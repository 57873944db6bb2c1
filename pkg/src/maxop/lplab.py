"""L^p probing: region geometry, grid norms, operator ratios and decay fits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fields import BallIndicator, FieldTuple
from .operators import QuadConfig, RingProfile, TGrid, alpha_average, maximal, spherical_average

__all__ = [
    "ExponentTuple",
    "RegionVerdict",
    "DecayFit",
    "RatioProbe",
    "region_classify",
    "grid_lp_norm",
    "ratio_probe",
    "decay_fit",
]

BOUNDARY_RTOL = 1e-12


def _recip(p) -> float:
    return 0.0 if p == math.inf else 1.0 / p


@dataclass(frozen=True)
class ExponentTuple:
    """Exponents p_i in [1, ∞]; p_i = 1 is accepted so that faces of the cube can be probed."""

    p: tuple

    def __post_init__(self):
        vals = tuple(math.inf if (isinstance(v, str) and v.lower() in ("inf", "infinity")) else float(v)
                     for v in self.p)
        if not vals:
            raise ValueError("an exponent tuple needs at least one entry")
        if any(not (v >= 1.0) for v in vals):
            raise ValueError(f"exponents must satisfy p_i >= 1, got {vals}")
        object.__setattr__(self, "p", vals)

    @property
    def reciprocal_sum(self) -> float:
        return math.fsum(_recip(v) for v in self.p)

    @property
    def p_out(self) -> float:
        s = self.reciprocal_sum
        return math.inf if s == 0.0 else 1.0 / s


@dataclass(frozen=True)
class RegionVerdict:
    classification: str
    distance_to_h: float  # (mn - α)/n - Σ 1/p_i; positive inside the half-space
    threshold: float
    reciprocal_sum: float


def region_classify(m: int, n: int, alpha: float, exponents: ExponentTuple) -> RegionVerdict:
    """Position of (1/p_1, ..., 1/p_m) relative to Σ 1/p_i < (mn - α)/n and the unit cube."""
    if len(exponents.p) != m:
        raise ValueError(f"expected {m} exponents, got {len(exponents.p)}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    threshold = (m * n - alpha) / n
    s = exponents.reciprocal_sum
    gap = threshold - s
    if abs(gap) <= BOUNDARY_RTOL * max(1.0, threshold):
        kind = "boundary_H_face"
    elif gap < 0:
        kind = "unbounded"
    elif any(abs(_recip(p) - 1.0) <= BOUNDARY_RTOL for p in exponents.p):
        kind = "boundary_other_face"
    else:
        kind = "bounded_interior"
    return RegionVerdict(kind, gap, threshold, s)


def exact_region(m: int, n: int, alpha: Fraction, recips) -> str:
    """Reference classification in exact rational arithmetic."""
    threshold = (m * n - Fraction(alpha)) / n
    recips = [r if isinstance(r, Fraction) else Fraction(r) for r in recips]
    s = sum(recips)
    if s == threshold:
        return "boundary_H_face"
    if s > threshold:
        return "unbounded"
    if any(r == 1 for r in recips):
        return "boundary_other_face"
    return "bounded_interior"


def grid_lp_norm(values, p, spacing) -> float:
    """Riemann-sum L^p norm of samples on a regular grid; p = inf gives the max."""
    v = np.abs(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(v)):
        raise ValueError("grid values must be finite")
    p = math.inf if (isinstance(p, str) and p.lower() == "inf") else float(p)
    if not p > 0:
        raise ValueError("p must be positive")
    if p == math.inf:
        return float(v.max()) if v.size else 0.0
    cell = float(np.prod(np.broadcast_to(np.asarray(spacing, dtype=float), (max(v.ndim, 1),))))
    top = v.max() if v.size else 0.0
    if top == 0.0:
        return 0.0
    # scale by the max so that large p does not underflow
    return float(top * (cell * np.sum((v / top) ** p)) ** (1.0 / p))


def _box_axis(half_width: float, spacing: float) -> np.ndarray:
    count = int(round(half_width / spacing))
    return spacing * np.arange(-count, count + 1)


def _field_norm(f, p: float, spacing: float, half_width: float) -> float:
    sup = f.support
    if sup is None:
        # non-compact inputs (constants, tails) are measured on the evaluation box
        axis = _box_axis(half_width, spacing)
        mesh = np.stack(np.meshgrid(*([axis] * f.dim), indexing="ij"), axis=-1)
        return grid_lp_norm(f(mesh), p, spacing)
    center, radius = sup
    h = min(spacing, radius / 64.0)
    axis = _box_axis(radius + 2 * h, h)
    mesh = np.stack(np.meshgrid(*([axis] * f.dim), indexing="ij"), axis=-1) + center
    return grid_lp_norm(f(mesh), p, h)


@dataclass(frozen=True)
class RatioProbe:
    ratio: float
    output_norm: float
    input_norms: tuple
    p_out: float
    half_width: float
    spacing: float


def _common_radial_center(tup: FieldTuple):
    centers = [f.radial_center for f in tup]
    if any(c is None for c in centers):
        return None
    c0 = np.asarray(centers[0], dtype=float)
    if all(np.allclose(np.asarray(c, dtype=float), c0, atol=0.0) for c in centers):
        return c0
    return None


def ratio_probe(tup: FieldTuple, alpha: float, exponents: ExponentTuple, half_width: float,
                spacing: float, t_grid: TGrid | None = None, config: QuadConfig | None = None,
                radial_oversample: int = 4) -> RatioProbe:
    """||S^m_α(f)||_{L^p(box)} / ∏ ||f_i||_{p_i}, with box = [-half_width, half_width]^n.

    Inputs without compact support are restricted to the box for their norms.
    For tuples radial about a common centre the maximal function is computed
    on a 1-D radius grid (spacing / radial_oversample) and interpolated to the
    box grid; otherwise every grid point is evaluated.
    """
    if len(exponents.p) != tup.m:
        raise ValueError("one exponent per field is required")
    config = config or QuadConfig()
    t_grid = t_grid or TGrid()
    norms = tuple(_field_norm(f, p, spacing, half_width) for f, p in zip(tup, exponents.p))
    denom = float(np.prod(norms))
    if not denom > 0:
        raise ValueError("input norms must be positive")
    axis = _box_axis(half_width, spacing)
    mesh = np.stack(np.meshgrid(*([axis] * tup.n), indexing="ij"), axis=-1)

    def value_at(x):
        prof = RingProfile(tup, x, config=config)
        return maximal(prof, alpha, t_grid=t_grid, estimate_error=False).value

    center = _common_radial_center(tup)
    if center is not None:
        radii_needed = np.linalg.norm(mesh - center, axis=-1)
        h = spacing / radial_oversample
        radii = h * np.arange(int(math.ceil(radii_needed.max() / h)) + 2)
        e1 = np.zeros(tup.n)
        e1[0] = 1.0
        prof_vals = np.array([value_at(center + r * e1) for r in radii])
        values = np.interp(radii_needed, radii, prof_vals)
    else:
        flat = mesh.reshape(-1, tup.n)
        values = np.array([value_at(x) for x in flat]).reshape(mesh.shape[:-1])
    out = grid_lp_norm(values, exponents.p_out, spacing)
    return RatioProbe(out / denom, out, norms, exponents.p_out, half_width, spacing)


@dataclass(frozen=True)
class DecayFit:
    m: int
    n: int
    alpha: float
    radii: tuple
    values: tuple
    slope: float
    intercept: float
    target: float
    strategy: str


def decay_fit(m: int, n: int, alpha: float, radii, t_strategy: str = "fixed_probe",
              config: QuadConfig | None = None, t_grid: TGrid | None = None) -> DecayFit:
    """Decay of S^m_α(χ_B, ..., χ_B) along the first axis and its log-log slope.

    ``fixed_probe`` evaluates the average at t = sqrt(m)|x|; ``full_sup`` takes
    the maximal function, which dominates the probe.
    """
    radii = tuple(float(r) for r in radii)
    if len(radii) < 2 or min(radii) < 2.0:
        raise ValueError("decay fits need at least two radii, all >= 2")
    if t_strategy not in ("fixed_probe", "full_sup"):
        raise ValueError("t_strategy must be 'fixed_probe' or 'full_sup'")
    config = config or QuadConfig()
    tup = FieldTuple((BallIndicator(dim=n),) * m)
    values = []
    for r in radii:
        x = np.zeros(n)
        x[0] = r
        prof = RingProfile(tup, x, config=config)
        if t_strategy == "fixed_probe":
            t = math.sqrt(m) * r
            v = spherical_average(prof, t) if alpha == 1.0 else alpha_average(prof, alpha, t)
        else:
            grid = t_grid or TGrid(t_min=max(r - 1.0, 1e-3) * 0.99)
            v = maximal(prof, alpha, t_grid=grid, estimate_error=False).value
        if not v > 0:
            raise ValueError(f"zero value at radius {r}: the evaluation missed the support")
        values.append(float(v))
    slope, intercept = np.polyfit(np.log(radii), np.log(values), 1)
    return DecayFit(m, n, alpha, radii, tuple(values), float(slope), float(intercept),
                    -(m * n - alpha), t_strategy)
