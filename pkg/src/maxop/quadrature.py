"""Gauss-Jacobi rules on (0, 1), sphere rules, and composite panel rules.

``jacobi_rule`` builds Gauss rules for the weight u^a (1-u)^b via the
Golub-Welsch eigenproblem; the weights are the Christoffel numbers evaluated
from the orthonormal recurrence, which keeps small end weights accurate.

``panel_rule`` is the workhorse of the operator core: it integrates
g(u) u^a (1-u)^b over (0, 1) when g is only piecewise smooth, with the break
points supplied per row so that many radii can be handled in one vectorised
call.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import ndtri
from scipy.stats import qmc

from .special import gamma_ln, log_beta, measure_constants

__all__ = [
    "JacobiRule",
    "SphereRule",
    "jacobi_rule",
    "sphere_rule",
    "sphere_rule_qmc",
    "panel_rule",
    "panel_integrate",
    "sphere_monomial_integral",
]

MAX_ORDER = 512
MAX_PRODUCT_KAPPA = 8


@dataclass(frozen=True)
class JacobiRule:
    nodes: np.ndarray
    weights: np.ndarray
    exponent_a: float
    exponent_b: float
    order: int

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class SphereRule:
    kappa: int
    points: np.ndarray
    weights: np.ndarray
    kind: str
    degree_or_samples: int

    @property
    def size(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _jacobi_recurrence(order: int, alpha: float, beta_: float):
    """Monic recurrence of P^(alpha, beta) on [-1, 1], weight (1-x)^alpha (1+x)^beta."""
    k = np.arange(order, dtype=float)
    ab = alpha + beta_
    diag = np.empty(order)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = (2 * k + ab) * (2 * k + ab + 2)
        diag[:] = (beta_ ** 2 - alpha ** 2) / denom
    diag[0] = (beta_ - alpha) / (ab + 2)
    off = np.empty(max(order - 1, 0))
    if order > 1:
        off[0] = math.sqrt(4 * (1 + alpha) * (1 + beta_) / ((2 + ab) ** 2 * (3 + ab)))
        kk = np.arange(2, order, dtype=float)
        t = 2 * kk + ab
        off[1:] = np.sqrt(
            4 * kk * (kk + alpha) * (kk + beta_) * (kk + ab) / (t ** 2 * (t + 1) * (t - 1))
        )
    return diag, off


def _cache_path(cache_dir, order, a, b) -> Path:
    return Path(cache_dir) / f"jacobi_{order}_{a!r}_{b!r}.maxf"


def jacobi_rule(order: int, a: float, b: float, cache_dir=None) -> JacobiRule:
    """Gauss rule with ``order`` nodes for ∫_0^1 g(u) u^a (1-u)^b du."""
    if int(order) != order or not (1 <= order <= MAX_ORDER):
        raise ValueError(f"order must be an integer in [1, {MAX_ORDER}], got {order!r}")
    if not (a > -1.0 and b > -1.0):
        raise ValueError(f"Jacobi exponents must exceed -1 (weight not integrable): a={a}, b={b}")
    if cache_dir is not None:
        from .fields import read_maxf, write_maxf

        path = _cache_path(cache_dir, int(order), float(a), float(b))
        if path.exists():
            table = read_maxf(path).samples
            return JacobiRule(_frozen(table[:, 0]), _frozen(table[:, 1]), float(a), float(b), int(order))
        rule = _jacobi_rule_cached(int(order), float(a), float(b))
        path.parent.mkdir(parents=True, exist_ok=True)
        write_maxf(path, np.column_stack([rule.nodes, rule.weights]), spacing=(1.0, 1.0), origin=(0.0, 0.0))
        return rule
    return _jacobi_rule_cached(int(order), float(a), float(b))


@functools.lru_cache(maxsize=256)
def _jacobi_rule_cached(order: int, a: float, b: float) -> JacobiRule:
    # u = (1 + x)/2 turns u^a (1-u)^b into (1+x)^a (1-x)^b up to 2^{-(a+b+1)}
    alpha, beta_ = b, a
    diag, off = _jacobi_recurrence(order, alpha, beta_)
    if order == 1:
        x = diag.copy()
    else:
        x = eigh_tridiagonal(diag, off, eigvals_only=True)
    log_mu0 = log_beta(a + 1.0, b + 1.0)
    # Christoffel numbers from the orthonormal recurrence (in the u measure)
    p_prev = np.zeros_like(x)
    p_cur = np.full_like(x, math.exp(-0.5 * log_mu0))
    total = p_cur ** 2
    for k in range(order - 1):
        nxt = ((x - diag[k]) * p_cur - (off[k - 1] * p_prev if k > 0 else 0.0)) / off[k]
        p_prev, p_cur = p_cur, nxt
        total = total + p_cur ** 2
    weights = 1.0 / total
    nodes = 0.5 * (1.0 + x)
    return JacobiRule(_frozen(nodes), _frozen(weights), a, b, order)


# ---------------------------------------------------------------------------
# spheres
# ---------------------------------------------------------------------------


def sphere_rule(kappa: int, degree: int) -> SphereRule:
    """Product rule on S^{κ-1}, exact for polynomials of total degree <= degree.

    Built recursively: θ = (x, sqrt(1-x^2) η) with η on S^{κ-2}, a Gauss rule
    for the weight (1-x^2)^{(κ-3)/2} in x, and the trapezoid rule on S^1.
    """
    if kappa < 2:
        raise ValueError("sphere_rule needs kappa >= 2")
    if kappa > MAX_PRODUCT_KAPPA:
        raise ValueError(
            f"product rules stop at kappa = {MAX_PRODUCT_KAPPA}; use sphere_rule_qmc for kappa = {kappa}"
        )
    if degree < 0:
        raise ValueError("degree must be non-negative")
    pts, wts = _product_sphere(int(kappa), int(degree))
    return SphereRule(int(kappa), _frozen(pts), _frozen(wts), "product_angles", int(degree))


@functools.lru_cache(maxsize=64)
def _product_sphere(kappa: int, degree: int):
    if kappa == 2:
        count = degree + 1
        ang = 2.0 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(ang), np.sin(ang)]), np.full(count, 2.0 * math.pi / count)
    inner_pts, inner_w = _product_sphere(kappa - 1, degree)
    c = 0.5 * (kappa - 3)
    rule = jacobi_rule(max(1, (degree + 2) // 2), c, c)
    x = 2.0 * rule.nodes - 1.0
    wx = rule.weights * 2.0 * 4.0 ** c
    r = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    pts = np.concatenate(
        [np.column_stack([np.full(len(inner_w), xi), ri * inner_pts]) for xi, ri in zip(x, r)]
    )
    wts = np.concatenate([wi * inner_w for wi in wx])
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts, wts


def sphere_rule_qmc(kappa: int, samples: int, seed: int = 0) -> SphereRule:
    """Equal-weight rule from a scrambled Sobol stream pushed through the normal quantile."""
    if samples < 2:
        raise ValueError("sphere_rule_qmc needs at least 2 samples")
    if kappa < 2:
        raise ValueError("sphere_rule_qmc needs kappa >= 2")
    sampler = qmc.Sobol(d=int(kappa), scramble=True, seed=int(seed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        u = sampler.random(int(samples))
    u = np.clip(u, 1e-16, 1.0 - 1e-16)
    g = ndtri(u)
    pts = g / np.linalg.norm(g, axis=1, keepdims=True)
    omega = measure_constants(kappa).omega
    return SphereRule(int(kappa), _frozen(pts), _frozen(np.full(samples, omega / samples)), "qmc", int(samples))


def sphere_monomial_integral(exponents) -> float:
    """Closed form of ∫_{S^{κ-1}} ∏ x_i^{e_i} dσ (zero unless every e_i is even)."""
    e = [int(v) for v in exponents]
    if any(v % 2 for v in e):
        return 0.0
    log_val = math.log(2.0) + sum(gamma_ln(0.5 * (v + 1)) for v in e) - gamma_ln(0.5 * (sum(e) + len(e)))
    return math.exp(log_val)


# ---------------------------------------------------------------------------
# composite rules with per-row break points
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def _sigmoid_legendre(order: int):
    # φ(v) = v^2 (3 - 2v) flattens algebraic endpoint behaviour such as
    # sqrt(v) into an analytic integrand
    rule = jacobi_rule(order, 0.0, 0.0)
    v = rule.nodes
    phi = v * v * (3.0 - 2.0 * v)
    dphi = 6.0 * v * (1.0 - v)
    return _frozen(phi), _frozen(rule.weights * dphi)


def _left_panel(upper, a, b, order):
    # [0, h] with h < 1: u = h v (2 - v), quadratic at the cut so that a
    # square-root kink of g at u = h becomes analytic in v
    rule = jacobi_rule(order, a, 0.0)
    v = rule.nodes
    u = upper * (v * (2.0 - v))
    w = (np.power(upper, 1.0 + a) * (rule.weights * np.power(2.0 - v, a) * 2.0 * (1.0 - v))
         * np.power(1.0 - u, b))
    return u, w


def _right_panel(lower, a, b, order):
    # [l, 1] with l > 0: u = l + (1-l) v^2, the mirror image
    rule = jacobi_rule(order, 0.0, b)
    v = rule.nodes
    u = lower + (1.0 - lower) * (v * v)
    w = (np.power(1.0 - lower, 1.0 + b) * (rule.weights * np.power(1.0 + v, b) * 2.0 * v)
         * np.power(u, a))
    return u, w


def _interior_panel(lower, upper, a, b, order):
    sv, sw = _sigmoid_legendre(order)
    width = upper - lower
    u = lower + width * sv
    w = width * sw
    # logarithmic grading towards a singular end that sits close by
    if a < 0.0:
        logl = (lower > 0.0) & (upper > 2.0 * lower)
        if np.any(logl):
            ratio = np.where(logl, upper / np.where(logl, lower, 1.0), 1.0)
            ul = lower * np.power(ratio, sv)
            u = np.where(logl, ul, u)
            w = np.where(logl, ul * np.log(ratio) * sw, w)
    else:
        logl = np.zeros(np.shape(lower), dtype=bool)
    if b < 0.0:
        om_l, om_u = 1.0 - lower, 1.0 - upper
        logr = (om_u > 0.0) & (om_l > 2.0 * om_u) & ~logl
        if np.any(logr):
            ratio = np.where(logr, om_l / np.where(logr, om_u, 1.0), 1.0)
            ur = 1.0 - om_u * np.power(ratio, 1.0 - sv)
            u = np.where(logr, ur, u)
            w = np.where(logr, (1.0 - ur) * np.log(ratio) * sw, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        if a != 0.0:
            w = w * np.power(u, a)
        if b != 0.0:
            w = w * np.power(1.0 - u, b)
    return u, w


def panel_rule(cuts, a: float, b: float, order: int):
    """Composite rule for ∫_0^1 g(u) u^a (1-u)^b du with g smooth between cuts.

    ``cuts`` has shape (rows, k); values outside (0, 1) are clipped and act as
    empty panels, so every row gets the same node count.  Returns
    ``(nodes, weights)`` of shape (rows, panels * order); the weights already
    contain u^a (1-u)^b.

    The panel touching 0 uses the Gauss-Jacobi rule for u^a, the panel
    touching 1 the rule for (1-u)^b, each with a quadratic grading towards
    its cut; interior panels use Gauss-Legendre after a sigmoidal map, and a
    logarithmic map when a singular factor sits close to the panel.
    """
    cuts = np.asarray(cuts, dtype=float)
    if cuts.ndim == 1:
        cuts = cuts[:, None]
    rows = cuts.shape[0]
    if a < 0.0 or b < 0.0:
        # keeps each end panel away from the singular factor it does not absorb
        cuts = np.concatenate([cuts, np.full((rows, 1), 0.5)], axis=1)
    cuts = np.sort(np.clip(cuts, 0.0, 1.0), axis=1)
    if cuts.shape[1] == 0:
        full = jacobi_rule(order, a, b)
        return (np.broadcast_to(full.nodes, (rows, order)).copy(),
                np.broadcast_to(full.weights, (rows, order)).copy())
    if np.all((cuts > 0.0) & (cuts < 1.0)):
        # every panel has positive width and only the outer two touch 0 or 1
        lower = cuts[:, :-1, None]
        upper = cuts[:, 1:, None]
        ul, wl = _left_panel(cuts[:, :1, None], a, b, order)
        ur, wr = _right_panel(cuts[:, -1:, None], a, b, order)
        ui, wi = _interior_panel(lower, upper, a, b, order)
        nodes = np.concatenate([ul, ui, ur], axis=1)
        weights = np.concatenate([wl, wi, wr], axis=1)
        return nodes.reshape(rows, -1), weights.reshape(rows, -1)
    return _panel_rule_general(cuts, a, b, order)


def _panel_rule_general(cuts, a, b, order):
    rows = cuts.shape[0]
    lower = np.concatenate([np.zeros((rows, 1)), cuts], axis=1)[:, :, None]
    upper = np.concatenate([cuts, np.ones((rows, 1))], axis=1)[:, :, None]
    width = upper - lower
    at0 = lower == 0.0
    at1 = upper == 1.0
    full = jacobi_rule(order, a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        u_left, w_left = _left_panel(upper, a, b, order)
        u_right, w_right = _right_panel(lower, a, b, order)
        u_int, w_int = _interior_panel(lower, upper, a, b, order)
    u_full = np.broadcast_to(full.nodes, u_left.shape)
    w_full = np.broadcast_to(full.weights, u_left.shape)
    nodes = np.where(at0 & at1, u_full, np.where(at0, u_left, np.where(at1, u_right, u_int)))
    weights = np.where(at0 & at1, w_full, np.where(at0, w_left, np.where(at1, w_right, w_int)))
    weights = np.where(width > 0.0, weights, 0.0)
    nodes = np.where(width > 0.0, nodes, 0.5 * (lower + upper))
    weights = np.nan_to_num(weights, nan=0.0, posinf=0.0, neginf=0.0)
    return nodes.reshape(rows, -1), weights.reshape(rows, -1)


GRADE_REACH = 0.25
GRADE_STEPS = 16


def graded_cuts(cuts) -> np.ndarray:
    """Append geometric cuts towards an end of [0, 1] for breaks just outside it.

    A break at 1 + δ (or -δ) with δ < GRADE_REACH is a nearby singularity of
    an otherwise smooth integrand; cuts at distances δ, 2δ, 4δ, ... from the
    end keep every panel at least as far from it as the panel is long.
    """
    cuts = np.asarray(cuts, dtype=float)
    if cuts.ndim == 1:
        cuts = cuts[:, None]
    if cuts.shape[1] == 0:
        return cuts
    steps = 2.0 ** np.arange(GRADE_STEPS)
    extra = []
    for c in cuts.T:
        above = np.where((c >= 1.0) & (c < 1.0 + GRADE_REACH), c - 1.0, np.nan)
        below = np.where((c <= 0.0) & (c > -GRADE_REACH), -c, np.nan)
        for delta, sign, end in ((above, -1.0, 1.0), (below, 1.0, 0.0)):
            if np.all(np.isnan(delta)):
                continue
            dist = np.maximum(delta, 1e-14)[:, None] * steps[None, :]
            pos = end + sign * dist
            # beyond half the interval the grading has done its job
            pos = np.where((dist <= 0.5) & ~np.isnan(dist), pos, 2.0)
            extra.append(pos)
    if not extra:
        return cuts
    return np.concatenate([cuts] + extra, axis=1)


def panel_integrate(cuts, a: float, b: float, order: int, integrand,
                    grade_outside: bool = False) -> np.ndarray:
    """Row-wise ∫_0^1 g_row(u) u^a (1-u)^b du, dropping cuts outside (0, 1).

    Rows are grouped by which cuts are active, so a break that a row never
    reaches costs nothing.  ``integrand(rows, u)`` returns g at nodes ``u``
    of shape (len(rows), q) for the row indices ``rows``.  With
    ``grade_outside`` breaks just outside [0, 1] add graded cuts.
    """
    cuts = np.asarray(cuts, dtype=float)
    if cuts.ndim == 1:
        cuts = cuts[:, None]
    if grade_outside:
        cuts = graded_cuts(cuts)
    active = (cuts > 0.0) & (cuts < 1.0)
    out = np.empty(cuts.shape[0])
    if cuts.shape[1] == 0:
        patterns = np.zeros(cuts.shape[0], dtype=np.int64)
        keys = [np.zeros(0, dtype=bool)]
    else:
        keys, patterns = np.unique(active, axis=0, return_inverse=True)
        patterns = patterns.reshape(-1)
    for g, key in enumerate(keys):
        rows = np.nonzero(patterns == g)[0]
        u, w = panel_rule(cuts[np.ix_(rows, np.nonzero(key)[0])], a, b, order)
        out[rows] = np.sum(w * integrand(rows, u), axis=1)
    return out
