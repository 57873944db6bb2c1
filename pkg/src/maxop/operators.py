"""Fixed-scale and maximal multilinear averages through the ring profile.

For a tuple f = (f_1, ..., f_m) on R^n and a point x, the ring profile is

    G(s) = (1/ω_{mn-1}) ∫_{S^{mn-1}} ∏ f_i(x - s θ_i) dσ(θ).

Every average of the family is a 1-D integral of G:

* spherical average at scale t: G(t)
* ball average:                   mn ∫_0^1 r^{mn-1} G(t r) dr
* weighted ball average:          B(mn/2, 1-α)^{-1} ∫_0^1 G(t sqrt(1-u)) (1-u)^{(mn-2)/2} u^{-α} du

G itself is evaluated without touching S^{mn-1}.  Writing θ_i = r_i η_i with
η_i ∈ S^{n-1} and r on the positive orthant of S^{m-1}, the sphere integral
factors into single-field spherical means A_i(s) = (1/ω_{n-1}) ∫ f_i(x - s η)
dσ(η), glued by a 1-D integral per block:

    I_k(s) = ½ ∫_0^1 v^{(n-2)/2} (1-v)^{((k-1)n-2)/2} A_j(s sqrt v) I_{k-1}(s sqrt(1-v)) dv,

with I_1 = A_m and G = ω_{n-1}^m / ω_{mn-1} · I_m.  A_i is closed-form for
ball indicators and a 1-D integral for other radial fields.  Each level
knows the radii where it is not smooth, so all integrals are split there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import PPoly, make_interp_spline
from scipy.special import betainc

from .fields import BallIndicator, Constant, Field, FieldTuple
from .quadrature import JacobiRule, SphereRule, panel_integrate, sphere_rule, sphere_rule_qmc
from .special import log_beta, log_sphere_area, measure_constants

__all__ = [
    "QuadConfig",
    "SphericalMean",
    "RingProfile",
    "TGrid",
    "MaximalResult",
    "ring_profile",
    "spherical_average",
    "alpha_average",
    "hl_average",
    "weighted_average",
    "maximal",
    "sup_search",
]


@dataclass(frozen=True)
class QuadConfig:
    """Orders are per panel; every integral is split at the known breaks."""

    radial_order: int = 32
    inner_order: int = 32
    memo_samples: int = 4096
    sphere_degree: int = 96
    chunk: int = 2048

    def refined(self) -> "QuadConfig":
        return replace(
            self,
            radial_order=2 * self.radial_order,
            inner_order=2 * self.inner_order,
            memo_samples=2 * self.memo_samples,
            sphere_degree=2 * self.sphere_degree,
        )


def _clean_breaks(values, reach=math.inf) -> tuple:
    vals = sorted(float(v) for v in values if v > 0.0 and math.isfinite(v) and v <= reach)
    out = []
    for v in vals:
        if not out or v - out[-1] > 1e-13 * max(1.0, v):
            out.append(v)
    return tuple(out)


def _chunked(fn, s: np.ndarray, chunk: int) -> np.ndarray:
    out = np.empty_like(s)
    for lo in range(0, len(s), chunk):
        out[lo:lo + chunk] = fn(s[lo:lo + chunk])
    return out


# ---------------------------------------------------------------------------
# single-field spherical means
# ---------------------------------------------------------------------------


def ball_sphere_fraction(n: int, d: float, radius: float, s) -> np.ndarray:
    """Fraction of the sphere |y - x| = s lying in a closed ball at distance d from x."""
    s = np.asarray(s, dtype=float)
    if d == 0.0:
        return np.where(s <= radius, 1.0, 0.0)
    if n == 1:
        return 0.5 * ((np.abs(d - s) <= radius).astype(float) + (d + s <= radius))
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma = (d * d + s * s - radius * radius) / (2.0 * d * s)
    gamma = np.clip(np.nan_to_num(gamma, nan=0.0), -1.0, 1.0)
    if n == 2:
        frac = np.arccos(gamma) / math.pi
    else:
        cap = 0.5 * betainc(0.5 * (n - 1), 0.5, np.clip(1.0 - gamma * gamma, 0.0, 1.0))
        frac = np.where(gamma >= 0.0, cap, 1.0 - cap)
    return np.where(s == 0.0, float(d <= radius), frac)


class SphericalMean:
    """s ↦ (1/ω_{n-1}) ∫_{S^{n-1}} f(x - s η) dσ(η) for one field."""

    def __init__(self, f: Field, x, config: QuadConfig):
        self.field = f
        self.x = np.asarray(x, dtype=float)
        self.n = f.dim
        self.config = config
        sup = f.support
        center = f.radial_center
        if isinstance(f, Constant) or f.is_zero:
            self.kind = "constant"
            self.distance = 0.0
        elif isinstance(f, BallIndicator):
            self.kind = "ball"
        elif center is not None:
            self.kind = "radial"
        else:
            self.kind = "numeric"
        if self.kind != "constant":
            ref = center if center is not None else sup[0]
            self.distance = float(np.linalg.norm(self.x - ref))
        self.reach = math.inf if sup is None else float(np.linalg.norm(self.x - sup[0])) + sup[1]
        if self.kind in ("ball", "radial"):
            d = self.distance
            self.breaks = _clean_breaks(
                [abs(d - r) for r in f.radial_breaks] + [d + r for r in f.radial_breaks], self.reach
            )
        elif self.kind == "numeric":
            self.breaks = _clean_breaks([self.reach])
        else:
            self.breaks = ()
        # cheap means are never interpolated
        self.exact = self.kind in ("constant", "ball") or (self.kind == "radial" and self.distance == 0.0)
        self._rule = None

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        flat = s.reshape(-1)
        out = np.zeros_like(flat)
        live = flat <= self.reach
        if np.any(live):
            out[live] = _chunked(self._evaluate, flat[live], self.config.chunk)
        return np.maximum(out, 0.0).reshape(s.shape)

    def _evaluate(self, s: np.ndarray) -> np.ndarray:
        f, d, n = self.field, self.distance, self.n
        if self.kind == "constant":
            return np.full_like(s, 0.0 if f.is_zero else float(f.value))
        if self.kind == "ball":
            return ball_sphere_fraction(n, d, f.radius, s)
        if self.kind == "radial":
            if d == 0.0:
                return f.radial_profile(s)
            if n == 1:
                return 0.5 * (f.radial_profile(np.abs(d - s)) + f.radial_profile(d + s))
            return self._radial_integral(s)
        return self._sphere_sum(s)

    def _radial_integral(self, s: np.ndarray) -> np.ndarray:
        # θ·e = 2u - 1 has density 2·4^c u^c (1-u)^c / B(1/2, (n-1)/2), c = (n-3)/2
        f, d, n = self.field, self.distance, self.n
        c = 0.5 * (n - 3)
        pos = np.where(s > 0.0, s, 1.0)
        rho = np.asarray(f.radial_breaks, dtype=float)
        if rho.size:
            cuts = ((d + pos[:, None]) ** 2 - rho[None, :] ** 2) / (4.0 * d * pos[:, None])
        else:
            cuts = np.zeros((len(s), 0))

        def integrand(rows, u):
            sr = s[rows, None]
            r2 = d * d + sr * sr - 2.0 * d * sr * (2.0 * u - 1.0)
            return f.radial_profile(np.sqrt(np.maximum(r2, 0.0)))

        norm = 2.0 * 4.0 ** c * math.exp(-log_beta(0.5, 0.5 * (n - 1)))
        out = norm * panel_integrate(cuts, c, c, self.config.inner_order, integrand)
        return np.where(s == 0.0, float(f.radial_profile(d)), out)

    def _sphere_sum(self, s: np.ndarray) -> np.ndarray:
        f, n = self.field, self.n
        if n == 1:
            return 0.5 * (f(self.x - s[:, None]) + f(self.x + s[:, None]))
        if self._rule is None:
            if n <= 8:
                self._rule = sphere_rule(n, self.config.sphere_degree)
            else:
                self._rule = sphere_rule_qmc(n, 64 * self.config.sphere_degree, seed=0)
        rule = self._rule
        omega = measure_constants(n).omega
        out = np.empty_like(s)
        step = max(1, 200_000 // rule.size)
        for lo in range(0, len(s), step):
            pts = self.x - s[lo:lo + step, None, None] * rule.points[None, :, :]
            out[lo:lo + step] = f(pts) @ rule.weights / omega
        return out


# ---------------------------------------------------------------------------
# products over the orthant, interpolation memo
# ---------------------------------------------------------------------------


class OrthantProduct:
    """I_k(s) for k blocks: glue one spherical mean to the product of the rest."""

    def __init__(self, first, rest, n: int, k: int, config: QuadConfig):
        self.first, self.rest, self.n, self.k, self.config = first, rest, n, k, config
        self.a = 0.5 * (n - 2)
        self.b = 0.5 * ((k - 1) * n - 2)
        self.reach = math.hypot(first.reach, rest.reach)
        b1 = (0.0,) + tuple(first.breaks)
        b2 = (0.0,) + tuple(rest.breaks)
        self.breaks = _clean_breaks([math.hypot(p, q) for p in b1 for q in b2], self.reach)
        self.exact = False
        self._at_zero = 0.5 * math.exp(log_beta(0.5 * n, 0.5 * (k - 1) * n))

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        flat = s.reshape(-1)
        out = np.zeros_like(flat)
        live = flat <= self.reach
        if np.any(live):
            out[live] = _chunked(self._evaluate, flat[live], max(1, self.config.chunk // 4))
        return out.reshape(s.shape)

    def _evaluate(self, s: np.ndarray) -> np.ndarray:
        pos = np.where(s > 0.0, s, 1.0)[:, None]
        c1 = np.asarray(self.first.breaks, dtype=float)[None, :] ** 2 / pos ** 2
        c2 = 1.0 - np.asarray(self.rest.breaks, dtype=float)[None, :] ** 2 / pos ** 2
        cuts = np.concatenate([c1, c2], axis=1)

        def integrand(rows, v):
            sr = s[rows, None]
            return self.first(sr * np.sqrt(v)) * self.rest(sr * np.sqrt(1.0 - v))

        out = 0.5 * panel_integrate(cuts, self.a, self.b, self.config.inner_order, integrand)
        zero = s == 0.0
        if np.any(zero):
            out[zero] = float(self.first(0.0)) * float(self.rest(0.0)) * self._at_zero
        return out


def _smoothstep_inverse(y: np.ndarray) -> np.ndarray:
    # inverse of w ↦ 3w^2 - 2w^3 on [0, 1]
    return 0.5 - np.sin(np.arcsin(np.clip(1.0 - 2.0 * y, -1.0, 1.0)) / 3.0)


class ProfileMemo:
    """Piecewise quintic interpolant of a 1-D profile, one piece per smooth stretch.

    Pieces are cut at the profile's breaks and at dyadic fractions of the
    range.  Inside a piece [l, h] the samples sit at s = l + (h - l) φ(w) with φ the
    smoothstep and w uniform; square-root behaviour at the piece ends becomes
    smooth in w, so the spline keeps its sixth-order accuracy.
    """

    def __init__(self, profile, hi: float, samples: int):
        self.profile = profile
        self.hi = float(hi)
        self.breaks = tuple(profile.breaks)
        self.reach = profile.reach
        self.exact = False
        inner = [b for b in self.breaks if 0.0 < b < self.hi]
        # dyadic edges: near small s the profile varies on the scale of s itself
        for k in range(1, MEMO_OCTAVES + 1):
            e = self.hi * 2.0 ** -k
            if all(abs(e - b) > 1e-3 * e for b in inner):
                inner.append(e)
        edges = [0.0] + sorted(inner) + [self.hi]
        self.edges = np.asarray(edges)
        counts, nodes = [], []
        for lo, up in zip(edges[:-1], edges[1:]):
            # slivers between nearby breaks carry little variation
            least = MEMO_MIN_SLIVER if up - lo < 1e-2 * up else MEMO_MIN_PIECE
            count = max(least, int(math.ceil(samples * (up - lo) / self.hi)))
            w = np.linspace(0.0, 1.0, count)
            counts.append(count)
            nodes.append(lo + (up - lo) * w * w * (3.0 - 2.0 * w))
        values = profile(np.concatenate(nodes))
        # one flat table of quintic coefficients.  With not-a-knot ends the
        # intervals of a piece with c samples are [0, w_3], [w_i, w_{i+1}] for
        # 3 <= i <= c-5 and [w_{c-4}, 1], so the interval index needs no search
        coefs, starts, offsets, pos = [], [], [], 0
        for count in counts:
            grid = np.linspace(0.0, 1.0, count)
            pp = PPoly.from_spline(make_interp_spline(grid, values[pos:pos + count], k=QUINTIC))
            keep = np.diff(pp.x) > 0
            left = pp.x[:-1][keep]
            if not np.allclose(left, np.r_[0.0, grid[3:-3]], rtol=0.0, atol=1e-14):
                raise RuntimeError("unexpected knot layout in the profile memo")
            offsets.append(sum(len(c) for c in starts))
            coefs.append(pp.c[:, keep])
            starts.append(left)
            pos += count
        self._coef = np.ascontiguousarray(np.concatenate(coefs, axis=1))
        self._starts = np.concatenate(starts)
        self._offsets = np.asarray(offsets)
        self._spans = np.asarray(counts) - 1
        self._widths = np.diff(self.edges)

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        flat = s.reshape(-1)
        inside = flat <= self.hi
        p = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.edges) - 2)
        w = _smoothstep_inverse((np.minimum(flat, self.hi) - self.edges[p]) / self._widths[p])
        span = self._spans[p]
        j = self._offsets[p] + np.clip((w * span).astype(np.int64) - 2, 0, span - 5)
        dw = w - self._starts.take(j)
        out = self._coef[0].take(j)
        for row in self._coef[1:]:
            out = out * dw + row.take(j)
        out = np.where(inside, out, 0.0)
        beyond = ~inside & (flat <= self.reach)
        if np.any(beyond):
            out[beyond] = self.profile(flat[beyond])
        return np.maximum(out, 0.0).reshape(s.shape)


# ---------------------------------------------------------------------------
# ring profile
# ---------------------------------------------------------------------------


class RingProfile:
    """G(s) for one tuple and one centre.

    ``method="blocks"`` (default) uses the orthant factorisation above;
    ``method="sphere"`` applies a sphere rule on S^{mn-1} to the product
    directly and serves as an independent check.  With ``memo=True`` the
    top-level profile is interpolated from a dense sample; ``refined()``
    returns a profile with doubled orders and no top-level memo.
    """

    def __init__(self, tup: FieldTuple, x, rule: SphereRule | None = None,
                 config: QuadConfig | None = None, s_max: float | None = None, memo: bool = True):
        x = np.asarray(x, dtype=float)
        if x.shape != (tup.n,):
            raise ValueError(f"centre must be a point of R^{tup.n}, got shape {x.shape}")
        if rule is not None and rule.kappa != tup.m * tup.n:
            raise ValueError(f"sphere rule lives on S^{rule.kappa - 1}, need kappa = mn = {tup.m * tup.n}")
        self.tuple = tup
        self.center = x
        self.rule = rule
        self.config = config or QuadConfig()
        self.s_max = s_max
        self.use_memo = memo
        self.m, self.n = tup.m, tup.n
        self.kappa = tup.m * tup.n
        self.is_zero = tup.is_zero
        self.constant_value = None
        if self.is_zero:
            self.constant_value = 0.0
        elif all(isinstance(f, Constant) for f in tup):
            self.constant_value = float(np.prod([f.value for f in tup]))
        self._scale = math.exp(self.m * log_sphere_area(self.n) - log_sphere_area(self.kappa))
        self._build_tower()
        self._memo = None
        self._refined = None

    @property
    def method(self) -> str:
        return "blocks" if self.rule is None else "sphere"

    def _build_tower(self):
        cfg = self.config
        means = [SphericalMean(f, self.center, cfg) for f in self.tuple]
        level = means[-1]
        for k in range(2, self.m + 1):
            if not level.exact:
                level = ProfileMemo(level, self._memo_hi(level.reach), cfg.memo_samples)
            first = means[self.m - k]
            if not first.exact:
                first = ProfileMemo(first, self._memo_hi(first.reach), cfg.memo_samples)
            level = OrthantProduct(first, level, self.n, k, cfg)
        self._top = level
        self.breaks = tuple(level.breaks)
        self.reach = level.reach

    def _memo_hi(self, reach: float) -> float:
        if math.isfinite(reach):
            return reach
        if self.s_max is None:
            raise ValueError("tuples without compact support need an explicit s_max")
        return float(self.s_max)

    def evaluate(self, s) -> np.ndarray:
        """G(s) without the top-level memo."""
        s = np.asarray(s, dtype=float)
        if np.any(s < 0):
            raise ValueError("ring radius must be nonnegative")
        if self.constant_value is not None:
            return np.full(s.shape, self.constant_value)
        if self.rule is not None:
            return self._sphere_evaluate(s)
        return self._scale * self._top(s)

    def _sphere_evaluate(self, s: np.ndarray) -> np.ndarray:
        flat = s.reshape(-1)
        pts = self.rule.points.reshape(-1, self.m, self.n)
        omega = measure_constants(self.kappa).omega
        out = np.empty_like(flat)
        step = max(1, 400_000 // self.rule.size)
        for lo in range(0, len(flat), step):
            ss = flat[lo:lo + step, None]
            prod = np.ones((len(ss), len(pts)))
            for i, f in enumerate(self.tuple):
                prod *= f(self.center - ss[..., None] * pts[None, :, i, :])
            out[lo:lo + step] = prod @ self.rule.weights / omega
        return out.reshape(s.shape)

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if (not self.use_memo or self.rule is not None or self.constant_value is not None
                or self._top.exact):
            return self.evaluate(s)
        if self._memo is None:
            self._memo = ProfileMemo(_Scaled(self._top, self._scale), self._memo_hi(self.reach),
                                     self.config.memo_samples)
        return self._memo(s)

    def refined(self) -> "RingProfile":
        if self._refined is None:
            rule = self.rule
            if rule is not None:
                if rule.kind == "qmc":
                    rule = sphere_rule_qmc(rule.kappa, 4 * rule.degree_or_samples, seed=1)
                else:
                    rule = sphere_rule(rule.kappa, 2 * rule.degree_or_samples)
            self._refined = RingProfile(self.tuple, self.center, rule, self.config.refined(),
                                        self.s_max, memo=False)
        return self._refined


class _Scaled:
    def __init__(self, inner, scale):
        self.inner, self.scale = inner, scale
        self.breaks, self.reach = inner.breaks, inner.reach

    def __call__(self, s):
        return self.scale * self.inner(s)


def ring_profile(tup: FieldTuple, x, rule: SphereRule | None = None,
                 config: QuadConfig | None = None, s_max: float | None = None) -> RingProfile:
    return RingProfile(tup, x, rule=rule, config=config, s_max=s_max)


# ---------------------------------------------------------------------------
# fixed-scale averages
# ---------------------------------------------------------------------------


def _scales(t):
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise ValueError("scales t must be positive and finite")
    return arr, arr.ndim == 0


def _breaks_array(profile: RingProfile) -> np.ndarray:
    return np.asarray(profile.breaks, dtype=float)


def spherical_average(profile: RingProfile, t):
    """Average of the product over the sphere of radius t in R^{mn}."""
    arr, scalar = _scales(t)
    out = profile(arr)
    return float(out) if scalar else out


def alpha_average(profile: RingProfile, alpha: float, t, radial_rule: JacobiRule | None = None,
                  order: int | None = None):
    """Weighted ball average with weight (1-|y|^2)^{-α}, normalised to average 1 on constants."""
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must satisfy 0 <= alpha < 1 (B(mn/2, 1-alpha) has a pole at 1), got {alpha}")
    a, b = -float(alpha), 0.5 * (profile.kappa - 2)
    if radial_rule is not None:
        if abs(radial_rule.exponent_a - a) > 1e-14 or abs(radial_rule.exponent_b - b) > 1e-14:
            raise ValueError(
                f"radial rule has exponents ({radial_rule.exponent_a}, {radial_rule.exponent_b}), "
                f"need ({a}, {b})"
            )
        order = radial_rule.order
    return weighted_average(profile, a, t, order)


def weighted_average(profile: RingProfile, power: float, t, order: int | None = None):
    """Normalised average of the product over the ball of radius t against (1-|y|^2)^power."""
    if not power > -1.0:
        raise ValueError("the ball weight (1-|y|^2)^power needs power > -1")
    arr, scalar = _scales(t)
    order = order or profile.config.radial_order
    if profile.constant_value is not None:
        out = np.full(arr.shape, profile.constant_value)
        return float(out) if scalar else out
    flat = arr.reshape(-1)
    cuts = 1.0 - _breaks_array(profile)[None, :] ** 2 / flat[:, None] ** 2
    b = 0.5 * (profile.kappa - 2)
    out = panel_integrate(cuts, power, b, order, lambda rows, u: profile(flat[rows, None] * np.sqrt(1.0 - u)),
                          grade_outside=True)
    out = out * math.exp(-log_beta(0.5 * profile.kappa, 1.0 + power))
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def hl_average(profile: RingProfile, t, order: int | None = None):
    """Plain ball average, integrated in the radius r (independent of alpha_average)."""
    arr, scalar = _scales(t)
    order = order or profile.config.radial_order
    if profile.constant_value is not None:
        out = np.full(arr.shape, profile.constant_value)
        return float(out) if scalar else out
    flat = arr.reshape(-1)
    cuts = _breaks_array(profile)[None, :] / flat[:, None]
    out = panel_integrate(cuts, profile.kappa - 1.0, 0.0, order, lambda rows, r: profile(flat[rows, None] * r),
                          grade_outside=True)
    out = (profile.kappa * out).reshape(arr.shape)
    return float(out) if scalar else out


# ---------------------------------------------------------------------------
# maximal functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TGrid:
    t_min: float = 1e-3
    t_max: float | None = None
    pts_per_decade: int = 48
    refine_depth: int = 24

    def resolve(self, profile: RingProfile) -> "TGrid":
        t_max = self.t_max
        if t_max is None:
            if not math.isfinite(profile.reach):
                raise ValueError("t_max is required for tuples without compact support")
            t_max = 1.05 * profile.reach
        if not (self.t_min > 0 and t_max > self.t_min and self.pts_per_decade >= 1):
            raise ValueError(f"empty scale grid: t_min={self.t_min}, t_max={t_max}, "
                             f"pts_per_decade={self.pts_per_decade}")
        return replace(self, t_max=float(t_max))

    def points(self) -> np.ndarray:
        decades = math.log10(self.t_max / self.t_min)
        count = max(2, int(math.ceil(decades * self.pts_per_decade)) + 1)
        return np.geomspace(self.t_min, self.t_max, count)


@dataclass(frozen=True)
class MaximalResult:
    value: float
    arg_t: float
    t_grid: TGrid
    quad_error_estimate: float
    at_boundary: bool = False


_GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)
SMALL_T_FACTOR = 1e-6
MEMO_MIN_PIECE = 48  # samples in the shortest memo piece
MEMO_MIN_SLIVER = 16
QUINTIC = 5
MEMO_OCTAVES = 20


def _fixed_scale(profile: RingProfile, alpha: float):
    if alpha == 1.0:
        return lambda t: spherical_average(profile, t)
    return lambda t: alpha_average(profile, alpha, t)


def sup_search(fn, grid: TGrid) -> tuple:
    """Maximise a vectorised t ↦ fn(t) on a resolved grid; returns (t, value, hit_t_max).

    Geometric sweep, then golden-section refinement between the neighbours of
    the best grid point.  One extra probe at ``SMALL_T_FACTOR * t_min``
    catches suprema that are only approached as t → 0 (the limit ∏ f_i(x) at
    continuity points); without it each operator would report its own
    O(t_min^2) deficit.  The value returned is attained, hence a lower bound
    of the supremum.
    """
    ts = grid.points()
    vals = np.asarray(fn(ts))
    i = int(np.argmax(vals))
    best_t, best_v = float(ts[i]), float(vals[i])
    lo, hi = float(ts[max(i - 1, 0)]), float(ts[min(i + 1, len(ts) - 1)])
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = fn(c), fn(d)
    for _ in range(grid.refine_depth):
        for tt, vv in ((c, fc), (d, fd)):
            if vv > best_v:
                best_t, best_v = tt, vv
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = fn(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = fn(d)
    for tt, vv in ((c, fc), (d, fd)):
        if vv > best_v:
            best_t, best_v = tt, vv
    if i == 0:
        t0 = SMALL_T_FACTOR * float(ts[0])
        v0 = float(fn(t0))
        if v0 > best_v:
            best_t, best_v = t0, v0
    return float(best_t), float(best_v), i == len(ts) - 1


def maximal(profile: RingProfile, alpha: float, t_min: float = 1e-3, t_max: float | None = None,
            pts_per_decade: int = 48, refine_depth: int = 24, t_grid: TGrid | None = None,
            estimate_error: bool = True) -> MaximalResult:
    """Supremum over t of the α-average (spherical average when α = 1).

    The error estimate compares the attained value with a profile built at
    doubled orders, evaluated at ``arg_t``.
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    grid = t_grid or TGrid(t_min, t_max, pts_per_decade, refine_depth)
    if profile.constant_value is not None:
        g = grid if grid.t_max is not None else replace(grid, t_max=max(1.0, 2 * grid.t_min))
        return MaximalResult(profile.constant_value, g.t_min, g, 0.0, False)
    grid = grid.resolve(profile)
    best_t, best_v, edge = sup_search(_fixed_scale(profile, alpha), grid)
    err = 0.0
    if estimate_error:
        err = abs(best_v - float(_fixed_scale(profile.refined(), alpha)(best_t)))
    return MaximalResult(best_v, best_t, grid, float(err), bool(edge))
