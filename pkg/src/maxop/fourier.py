"""Fourier-side evaluation of the single-field weighted averages (m = 1).

For radial f on R^n the weighted ball average at scale t is a Fourier
multiplier,

    S_{α,t} f(x) = P(n, α) ∫ f̂(ξ) J_ν(2π t|ξ|) / |t ξ|^ν e^{2πi x·ξ} dξ,
    ν = n/2 - α,   P(n, α) = 2 π^α Γ(1-α) / (ω_{n-1} B(n/2, 1-α)),

with f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx.  Both the forward transform and the
inverse integral reduce to 1-D Hankel-type integrals for radial inputs, which
are done by panel Gauss-Legendre with panels short enough to resolve the
Bessel oscillation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import Constant, Field
from .quadrature import jacobi_rule
from .special import bessel_j, gamma_ln, log_beta, log_sphere_area

__all__ = [
    "SpectralGrid",
    "RadialSpectrum",
    "EnvelopeFit",
    "radial_fourier",
    "multiplier",
    "multiplier_prefactor",
    "s_alpha_fourier",
    "multiplier_envelope",
]


@dataclass(frozen=True)
class SpectralGrid:
    panel_width: float = 0.125  # in ρ; J(2π t ρ) turns by 2π t · width per panel
    order: int = 12
    tol: float = 1e-11  # relative size of |f̂| ρ^{n-1} beyond the cutoff
    rho_limit: float = 64.0
    scan_step: float = 0.25


@dataclass(frozen=True)
class RadialSpectrum:
    dim: int
    rho: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    cutoff: float
    tail_estimate: float
    source: str


def _gauss_panels(edges: np.ndarray, order: int):
    rule = jacobi_rule(order, 0.0, 0.0)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = lo + (hi - lo) * rule.nodes
    weights = (hi - lo) * rule.weights
    return nodes.reshape(-1), weights.reshape(-1)


def _forward(f: Field, n: int, rho: np.ndarray, r_nodes, r_weights) -> np.ndarray:
    # f̂(ρ) = 2π ρ^{1-n/2} ∫ f(r) J_{n/2-1}(2πρr) r^{n/2} dr, and ω_{n-1}∫ f r^{n-1} dr at ρ = 0
    fr = f.radial_profile(r_nodes) * r_weights
    out = np.empty_like(rho)
    zero = rho == 0.0
    if np.any(zero):
        out[zero] = math.exp(log_sphere_area(n)) * np.sum(fr * r_nodes ** (n - 1))
    pos = np.nonzero(~zero)[0]
    step = max(1, 2_000_000 // max(len(r_nodes), 1))
    nu = 0.5 * n - 1.0
    for lo in range(0, len(pos), step):
        idx = pos[lo:lo + step]
        z = 2.0 * math.pi * rho[idx, None] * r_nodes[None, :]
        kern = _bessel_any(nu, z) * r_nodes[None, :] ** (0.5 * n)
        out[idx] = 2.0 * math.pi * rho[idx] ** (1.0 - 0.5 * n) * (kern @ fr)
    return out


def _bessel_any(nu: float, z: np.ndarray) -> np.ndarray:
    # n = 1 needs J_{-1/2}(z) = sqrt(2/(π z)) cos z
    if nu == -0.5:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(z > 0, np.sqrt(2.0 / (math.pi * np.maximum(z, 1e-300))) * np.cos(z), 0.0)
    return bessel_j(nu, z)


def radial_fourier(f: Field, n: int | None = None, grid: SpectralGrid | None = None) -> RadialSpectrum:
    """Radial profile of f̂ at the nodes of a panel rule on [0, cutoff]."""
    grid = grid or SpectralGrid()
    n = f.dim if n is None else n
    if n != f.dim:
        raise ValueError(f"field has dimension {f.dim}, asked for n = {n}")
    center = f.radial_center
    if center is None or np.any(np.asarray(center) != 0.0):
        raise ValueError("radial_fourier needs a field that is radial about the origin")
    if f.is_zero:
        rho, w = _gauss_panels(np.array([0.0, grid.panel_width]), grid.order)
        return RadialSpectrum(n, rho, w, np.zeros_like(rho), grid.panel_width, 0.0, f.describe())
    if isinstance(f, Constant) or f.support is None:
        raise ValueError("radial_fourier needs an integrable field with bounded support")
    reach = f.support[1]

    def r_rule(rho_max):
        # panels in r short enough that J(2π ρ_max r) turns by at most ~2 rad
        width = min(0.25, 1.0 / (math.pi * max(rho_max, 1e-3)))
        edges = {0.0, reach}
        edges.update(b for b in f.radial_breaks if 0.0 < b < reach)
        edges = np.asarray(sorted(edges))
        pieces = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            count = max(1, int(math.ceil((hi - lo) / width)))
            pieces.append(np.linspace(lo, hi, count + 1)[:-1])
        return _gauss_panels(np.append(np.concatenate(pieces), reach), grid.order)

    scan = np.arange(0.0, grid.rho_limit + 0.5 * grid.scan_step, grid.scan_step)
    rn, rw = r_rule(grid.rho_limit)
    coarse = np.abs(_forward(f, n, scan, rn, rw)) * np.maximum(scan, 1.0) ** (n - 1)
    ref = max(coarse.max(), 1e-300)
    above = np.nonzero(coarse > grid.tol * ref)[0]
    cutoff = float(min(scan[above[-1]] + 2.0 * grid.scan_step, grid.rho_limit)) if above.size else grid.scan_step
    tail = float(coarse[scan >= cutoff].max() / ref) if np.any(scan >= cutoff) else 0.0
    count = int(math.ceil(cutoff / grid.panel_width))
    rho, w = _gauss_panels(np.linspace(0.0, count * grid.panel_width, count + 1), grid.order)
    rn, rw = r_rule(count * grid.panel_width)
    values = _forward(f, n, rho, rn, rw)
    return RadialSpectrum(n, rho, w, values, count * grid.panel_width, tail, f.describe())


def multiplier(alpha: float, n: int, rho):
    """J_ν(2πρ)/ρ^ν with ν = n/2 - α, continuous at ρ = 0 with value π^ν/Γ(ν+1)."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must satisfy 0 <= alpha < 1")
    nu = 0.5 * n - alpha
    if nu < 0:
        raise ValueError("multiplier needs n/2 - alpha >= 0")
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0):
        raise ValueError("rho must be nonnegative")
    z = 2.0 * math.pi * r
    small = z < 1e-2
    out = np.empty_like(r)
    if np.any(small):
        # ascending series of J_ν(z)/ρ^ν = π^ν Σ (-(πρ)^2)^k / (k! Γ(k+ν+1))
        q = -((math.pi * r[small]) ** 2)
        term = np.full_like(q, math.exp(nu * math.log(math.pi) - gamma_ln(nu + 1.0)))
        total = term.copy()
        for k in range(1, 8):
            term = term * q / (k * (k + nu))
            total = total + term
        out[small] = total
    big = ~small
    if np.any(big):
        out[big] = bessel_j(nu, z[big]) / r[big] ** nu
    return float(out) if out.ndim == 0 else out


def multiplier_prefactor(alpha: float, n: int) -> float:
    """2 π^α Γ(1-α) / (ω_{n-1} B(n/2, 1-α))."""
    return math.exp(
        math.log(2.0) + alpha * math.log(math.pi) + gamma_ln(1.0 - alpha)
        - log_sphere_area(n) - log_beta(0.5 * n, 1.0 - alpha)
    )


def s_alpha_fourier(spectrum: RadialSpectrum, alpha: float, t: float, x) -> float:
    """Fixed-scale weighted average of a radial field at x, computed on the Fourier side."""
    if not t > 0:
        raise ValueError("t must be positive")
    n = spectrum.dim
    r = float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))
    rho, w = spectrum.rho, spectrum.weights
    body = spectrum.values * multiplier(alpha, n, t * rho) * w
    if r == 0.0:
        integral = math.exp(log_sphere_area(n)) * np.sum(body * rho ** (n - 1))
    else:
        kern = _bessel_any(0.5 * n - 1.0, 2.0 * math.pi * r * rho) * rho ** (0.5 * n)
        integral = 2.0 * math.pi * r ** (1.0 - 0.5 * n) * np.sum(body * kern)
    return float(multiplier_prefactor(alpha, n) * integral)


@dataclass(frozen=True)
class EnvelopeFit:
    alpha: float
    n: int
    rho: np.ndarray
    peaks: np.ndarray
    slope: float
    intercept: float
    target: float


def multiplier_envelope(alpha: float, n: int, rho_lo: float = 10.0, rho_hi: float = 1000.0,
                        samples_per_unit: int = 64) -> EnvelopeFit:
    """Log-log fit of the local maxima of |m_α| between consecutive zeros on [rho_lo, rho_hi]."""
    rho = np.arange(rho_lo, rho_hi, 1.0 / samples_per_unit)
    mag = np.abs(multiplier(alpha, n, rho))
    i = np.nonzero((mag[1:-1] >= mag[:-2]) & (mag[1:-1] > mag[2:]))[0] + 1
    # parabolic refinement through the three samples around each peak
    y0, y1, y2 = mag[i - 1], mag[i], mag[i + 1]
    denom = y0 - 2.0 * y1 + y2
    shift = np.where(denom != 0.0, 0.5 * (y0 - y2) / np.where(denom != 0.0, denom, 1.0), 0.0)
    peaks = y1 - 0.25 * (y0 - y2) * shift
    where = rho[i] + shift / samples_per_unit
    slope, intercept = np.polyfit(np.log(where), np.log(peaks), 1)
    return EnvelopeFit(alpha, n, where, peaks, float(slope), float(intercept), -(0.5 * (n + 1) - alpha))
