"""Nonnegative input fields on R^n.

Every field is an immutable object that maps points of shape ``(..., n)`` to
nonnegative values of shape ``(...)``.  Radial fields additionally expose a
1-D profile about their centre together with the radii where that profile
has a kink, a jump or a change of scale; the operator core uses these to place quadrature
panel boundaries.

Gridded fields are read from and written to the little-endian MAXF format::

    b"MAXF" | u32 version | u32 n | n x u64 extents | n x f64 spacing
           | n x f64 origin | row-major f64 samples
"""

from __future__ import annotations

import math
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.ndimage import map_coordinates, spline_filter
from scipy.optimize import brentq

__all__ = [
    "Field",
    "BallIndicator",
    "Gaussian",
    "PowerTail",
    "Bump",
    "Constant",
    "GridField",
    "Truncated",
    "FieldTuple",
    "GridData",
    "product_eval",
    "read_maxf",
    "write_maxf",
    "parse_field",
]

MAXF_MAGIC = b"MAXF"
MAXF_VERSION = 1
GAUSSIAN_SUPPORT = 6.5  # exp(-6.5^2) < 1e-18


def _as_center(center, dim: int) -> tuple:
    if center is None:
        return (0.0,) * dim
    c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))
    return tuple(float(v) for v in c)


def _check_points(y, dim: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim == 0 or y.shape[-1] != dim:
        raise ValueError(f"expected points with trailing dimension {dim}, got shape {y.shape}")
    return y


def _fmt(v: float) -> str:
    return repr(float(v))


@dataclass(frozen=True)
class Field:
    """Base class; subclasses implement ``_evaluate`` on validated points."""

    dim: int

    def __call__(self, y) -> np.ndarray:
        y = _check_points(y, self.dim)
        out = self._evaluate(y)
        return np.maximum(out, 0.0)

    def eval(self, x) -> float:
        x = _check_points(x, self.dim)
        if x.ndim != 1:
            raise ValueError("eval takes a single point; call the field for batches")
        return float(self(x))

    def _evaluate(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # radial structure -------------------------------------------------
    @property
    def radial_center(self):
        """Centre about which the field is radial, or None."""
        return None

    def radial_profile(self, r) -> np.ndarray:
        raise ValueError(f"{self.describe()} is not radial")

    @property
    def radial_breaks(self) -> tuple:
        return ()

    # support ----------------------------------------------------------
    @property
    def support(self):
        """(centre, radius) of a ball containing the (effective) support, or None."""
        return None

    @property
    def is_zero(self) -> bool:
        return False

    @property
    def sup_value(self) -> float:
        return math.inf

    def describe(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class _RadialField(Field):
    center: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("field dimension must be positive")
        object.__setattr__(self, "center", _as_center(self.center if self.center != () else None, self.dim))

    @property
    def radial_center(self):
        return np.asarray(self.center)

    def _evaluate(self, y):
        r = np.linalg.norm(y - np.asarray(self.center), axis=-1)
        return self.radial_profile(r)

    def _center_text(self) -> str:
        return ",".join(_fmt(c) for c in self.center)


@dataclass(frozen=True)
class BallIndicator(_RadialField):
    """χ of the closed ball; value 1 on the boundary sphere."""

    radius: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    def radial_profile(self, r):
        return np.where(np.asarray(r) <= self.radius, 1.0, 0.0)

    @property
    def radial_breaks(self):
        return (float(self.radius),)

    @property
    def support(self):
        return np.asarray(self.center), float(self.radius)

    @property
    def sup_value(self):
        return 1.0

    def describe(self):
        return f"ball(radius={_fmt(self.radius)};center={self._center_text()})"


@dataclass(frozen=True)
class Gaussian(_RadialField):
    """exp(-|y - c|^2 / scale^2)."""

    scale: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.scale > 0:
            raise ValueError("gaussian scale must be positive")

    def radial_profile(self, r):
        r = np.asarray(r, dtype=float)
        return np.exp(-(r / self.scale) ** 2)

    @property
    def radial_breaks(self):
        # not kinks: panel edges that follow the decay of the profile
        return tuple(float(self.scale) * k for k in (2.5, GAUSSIAN_SUPPORT))

    @property
    def support(self):
        return np.asarray(self.center), GAUSSIAN_SUPPORT * float(self.scale)

    @property
    def sup_value(self):
        return 1.0

    def describe(self):
        return f"gaussian(scale={_fmt(self.scale)};center={self._center_text()})"


@dataclass(frozen=True)
class PowerTail(_RadialField):
    """min(1, (inner/|y - c|)^exponent), cut to zero beyond ``outer``."""

    exponent: float = 1.0
    inner: float = 1.0
    outer: float = 16.0

    def __post_init__(self):
        super().__post_init__()
        if not (self.exponent > 0 and self.inner > 0 and self.outer > self.inner):
            raise ValueError("power tail needs exponent > 0 and 0 < inner < outer")

    def radial_profile(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            body = np.power(self.inner / np.maximum(r, self.inner), self.exponent)
        return np.where(r <= self.outer, body, 0.0)

    @property
    def radial_breaks(self):
        return (float(self.inner), float(self.outer))

    @property
    def support(self):
        return np.asarray(self.center), float(self.outer)

    @property
    def sup_value(self):
        return 1.0

    def describe(self):
        return (
            f"power_tail(exponent={_fmt(self.exponent)};inner={_fmt(self.inner)};"
            f"outer={_fmt(self.outer)};center={self._center_text()})"
        )


@dataclass(frozen=True)
class Bump(_RadialField):
    """Smooth bump exp(1 - 1/(1 - (|y - c|/radius)^2)), peak value 1."""

    radius: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.radius > 0:
            raise ValueError("bump radius must be positive")

    def radial_profile(self, r):
        q = (np.asarray(r, dtype=float) / self.radius) ** 2
        inside = q < 1.0
        safe = np.where(inside, q, 0.0)
        return np.where(inside, np.exp(1.0 - 1.0 / (1.0 - safe)), 0.0)

    @property
    def radial_breaks(self):
        return tuple(float(self.radius) * k for k in (0.5, 0.8, 0.95, 1.0))

    @property
    def support(self):
        return np.asarray(self.center), float(self.radius)

    @property
    def sup_value(self):
        return 1.0

    def describe(self):
        return f"bump(radius={_fmt(self.radius)};center={self._center_text()})"


@dataclass(frozen=True)
class Constant(Field):
    value: float = 1.0

    def __post_init__(self):
        if not (self.value >= 0 and math.isfinite(self.value)):
            raise ValueError("constant fields must be finite and nonnegative")

    def _evaluate(self, y):
        return np.full(y.shape[:-1], float(self.value))

    @property
    def radial_center(self):
        return np.zeros(self.dim)

    def radial_profile(self, r):
        return np.full(np.shape(r), float(self.value))

    @property
    def is_zero(self):
        return self.value == 0.0

    @property
    def sup_value(self):
        return float(self.value)

    def describe(self):
        return f"constant(value={_fmt(self.value)})"


@dataclass(frozen=True)
class GridData:
    samples: np.ndarray
    spacing: tuple
    origin: tuple


@dataclass(frozen=True, eq=False)
class GridField(Field):
    """Samples on a regular grid, spline-interpolated, zero outside the box."""

    samples: np.ndarray = field(default_factory=lambda: np.zeros((1,)))
    spacing: tuple = ()
    origin: tuple = ()
    order: int = 3
    label: str = "grid"

    def __post_init__(self):
        s = np.ascontiguousarray(self.samples, dtype=float)
        if s.ndim != self.dim:
            raise ValueError(f"grid samples must have {self.dim} axes, got {s.ndim}")
        if not np.all(np.isfinite(s)):
            raise ValueError("grid samples must be finite")
        if self.order not in (0, 1, 3, 5):
            raise ValueError("interpolation order must be one of 0, 1, 3, 5")
        s = np.maximum(s, 0.0)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "spacing", tuple(float(v) for v in np.broadcast_to(self.spacing, (self.dim,))))
        object.__setattr__(self, "origin", tuple(float(v) for v in np.broadcast_to(self.origin, (self.dim,))))
        if any(h <= 0 for h in self.spacing):
            raise ValueError("grid spacing must be positive")
        coef = spline_filter(s, order=self.order, mode="grid-constant") if self.order > 1 else s
        object.__setattr__(self, "_coef", coef)

    @classmethod
    def from_file(cls, path, order: int = 3) -> "GridField":
        data = read_maxf(path)
        return cls(
            dim=data.samples.ndim, samples=data.samples, spacing=data.spacing,
            origin=data.origin, order=order, label=f"grid({Path(path).name})",
        )

    @classmethod
    def sample(cls, source: Field, spacing: float, half_width: float, order: int = 3) -> "GridField":
        """Sample ``source`` on the cube [-half_width, half_width]^n."""
        count = int(round(2 * half_width / spacing)) + 1
        axis = -half_width + spacing * np.arange(count)
        mesh = np.stack(np.meshgrid(*([axis] * source.dim), indexing="ij"), axis=-1)
        return cls(
            dim=source.dim, samples=source(mesh), spacing=(spacing,) * source.dim,
            origin=(-half_width,) * source.dim, order=order, label=f"grid[{source.describe()}]",
        )

    def _evaluate(self, y):
        idx = (y - np.asarray(self.origin)) / np.asarray(self.spacing)
        flat = idx.reshape(-1, self.dim).T
        upper = np.asarray(self.samples.shape, dtype=float)[:, None] - 1.0
        inside = np.all((flat >= 0.0) & (flat <= upper), axis=0)
        vals = map_coordinates(self._coef, flat, order=self.order, mode="grid-constant", cval=0.0, prefilter=False)
        vals = np.where(inside, vals, 0.0)
        return vals.reshape(y.shape[:-1])

    @property
    def support(self):
        lo = np.asarray(self.origin)
        hi = lo + np.asarray(self.spacing) * (np.asarray(self.samples.shape) - 1)
        return 0.5 * (lo + hi), float(0.5 * np.linalg.norm(hi - lo))

    @property
    def is_zero(self):
        return not np.any(self.samples > 0)

    @property
    def sup_value(self):
        # splines may overshoot the samples slightly
        return float(self.samples.max()) * (1.0 if self.order <= 1 else 1.25)

    def describe(self):
        return self.label


@dataclass(frozen=True)
class Truncated(Field):
    """f · χ_{f <= level}."""

    base: Field = None
    level: float = 1.0

    def __post_init__(self):
        if self.base is None or self.base.dim != self.dim:
            raise ValueError("truncation needs a base field of the same dimension")

    def _evaluate(self, y):
        v = self.base(y)
        return np.where(v <= self.level, v, 0.0)

    @property
    def radial_center(self):
        return self.base.radial_center

    def radial_profile(self, r):
        v = self.base.radial_profile(r)
        return np.where(v <= self.level, v, 0.0)

    @property
    def radial_breaks(self):
        kinks = set(self.base.radial_breaks)
        if self.base.radial_center is not None:
            _, reach = self.base.support or (None, 64.0)
            grid = np.linspace(0.0, reach, 2049)
            over = self.base.radial_profile(grid) > self.level
            for i in np.nonzero(over[1:] != over[:-1])[0]:
                g = lambda r: float(self.base.radial_profile(r)) - self.level
                try:
                    kinks.add(float(brentq(g, grid[i], grid[i + 1], xtol=1e-15)))
                except ValueError:
                    kinks.add(float(grid[i + 1]))
        return tuple(sorted(kinks))

    @property
    def support(self):
        return self.base.support

    @property
    def is_zero(self):
        return self.base.is_zero or self.level < 0

    @property
    def sup_value(self):
        return min(self.level, self.base.sup_value)

    def describe(self):
        return f"truncated(level={_fmt(self.level)};{self.base.describe()})"


# ---------------------------------------------------------------------------
# tuples
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldTuple:
    fields: tuple

    def __post_init__(self):
        fs = tuple(self.fields)
        if not fs:
            raise ValueError("a field tuple needs at least one field")
        dims = {f.dim for f in fs}
        if len(dims) != 1:
            raise ValueError(f"all fields in a tuple must share one dimension, got {sorted(dims)}")
        object.__setattr__(self, "fields", fs)

    @property
    def m(self) -> int:
        return len(self.fields)

    @property
    def n(self) -> int:
        return self.fields[0].dim

    @property
    def is_zero(self) -> bool:
        return any(f.is_zero for f in self.fields)

    @property
    def is_compact(self) -> bool:
        return all(f.support is not None for f in self.fields)

    def reach(self, x) -> float:
        """Largest |x - y| over y in the supports (inf for non-compact tuples)."""
        x = np.asarray(x, dtype=float)
        best = 0.0
        for f in self.fields:
            sup = f.support
            if sup is None:
                return math.inf
            c, r = sup
            best = max(best, float(np.linalg.norm(x - c)) + r)
        return best

    def describe(self) -> str:
        return "(" + ", ".join(f.describe() for f in self.fields) + ")"

    def drop(self, k: int) -> "FieldTuple":
        return FieldTuple(self.fields[:k] + self.fields[k + 1:])

    def __iter__(self):
        return iter(self.fields)

    def __getitem__(self, i):
        return self.fields[i]

    def __len__(self):
        return len(self.fields)


def product_eval(tup: FieldTuple, x, t, dirs) -> np.ndarray:
    """∏_i f_i(x - t θ_i) for block directions ``dirs`` of shape (..., m*n) or (..., m, n)."""
    x = _check_points(x, tup.n)
    d = np.asarray(dirs, dtype=float)
    if d.shape[-1] == tup.m * tup.n and not (d.ndim >= 2 and d.shape[-2:] == (tup.m, tup.n)):
        d = d.reshape(d.shape[:-1] + (tup.m, tup.n))
    if d.shape[-2:] != (tup.m, tup.n):
        raise ValueError(f"directions must have blocks of shape ({tup.m}, {tup.n}), got {d.shape}")
    t = np.asarray(t, dtype=float)
    out = np.ones(np.broadcast_shapes(d.shape[:-2], t.shape))
    for i, f in enumerate(tup.fields):
        out = out * f(x - t[..., None] * d[..., i, :])
    return out


# ---------------------------------------------------------------------------
# MAXF files
# ---------------------------------------------------------------------------


def write_maxf(path, samples, spacing, origin) -> None:
    s = np.ascontiguousarray(samples, dtype="<f8")
    n = s.ndim
    spacing = np.broadcast_to(np.asarray(spacing, dtype="<f8"), (n,))
    origin = np.broadcast_to(np.asarray(origin, dtype="<f8"), (n,))
    with open(path, "wb") as fh:
        fh.write(MAXF_MAGIC)
        fh.write(struct.pack("<II", MAXF_VERSION, n))
        fh.write(struct.pack(f"<{n}Q", *s.shape))
        fh.write(spacing.astype("<f8").tobytes())
        fh.write(origin.astype("<f8").tobytes())
        fh.write(s.tobytes(order="C"))


def read_maxf(path) -> GridData:
    raw = Path(path).read_bytes()
    if raw[:4] != MAXF_MAGIC:
        raise ValueError(f"{path}: not a MAXF file")
    version, n = struct.unpack_from("<II", raw, 4)
    if version != MAXF_VERSION:
        raise ValueError(f"{path}: unsupported MAXF version {version}")
    off = 12
    extents = struct.unpack_from(f"<{n}Q", raw, off)
    off += 8 * n
    spacing = np.frombuffer(raw, "<f8", n, off)
    off += 8 * n
    origin = np.frombuffer(raw, "<f8", n, off)
    off += 8 * n
    count = int(np.prod(extents))
    if len(raw) - off != 8 * count:
        raise ValueError(f"{path}: expected {count} samples, found {(len(raw) - off) // 8}")
    samples = np.frombuffer(raw, "<f8", count, off).reshape(extents).astype(float)
    return GridData(samples, tuple(float(v) for v in spacing), tuple(float(v) for v in origin))


# ---------------------------------------------------------------------------
# text specs, e.g. "ball radius=1 center=0,0" or "gaussian scale=0.5"
# ---------------------------------------------------------------------------

_KINDS = {
    "ball": (BallIndicator, {"radius"}),
    "gaussian": (Gaussian, {"scale"}),
    "power_tail": (PowerTail, {"exponent", "inner", "outer"}),
    "bump": (Bump, {"radius"}),
    "constant": (Constant, {"value"}),
}


def parse_field(text: str, dim: int, base_dir=None) -> Field:
    """Build a field from ``kind key=value ...``; ``center`` takes comma-separated floats."""
    parts = text.split()
    if not parts:
        raise ValueError("empty field spec")
    kind, args = parts[0], {}
    for item in parts[1:]:
        if "=" not in item:
            raise ValueError(f"field option {item!r} is not key=value")
        key, val = item.split("=", 1)
        args[key] = val
    level = args.pop("truncate", None)
    if kind == "grid":
        allowed = {"file", "order"}
        if set(args) - allowed:
            raise ValueError(f"unknown grid options: {sorted(set(args) - allowed)}")
        if "file" not in args:
            raise ValueError("grid fields need file=<path>")
        path = Path(args["file"])
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        f = GridField.from_file(path, order=int(args.get("order", 3)))
        if f.dim != dim:
            raise ValueError(f"grid file has dimension {f.dim}, expected {dim}")
    elif kind in _KINDS:
        cls, keys = _KINDS[kind]
        allowed = keys | ({"center"} if kind != "constant" else set())
        unknown = set(args) - allowed
        if unknown:
            raise ValueError(f"unknown options for {kind}: {sorted(unknown)}")
        kw = {k: float(v) for k, v in args.items() if k != "center"}
        if "center" in args:
            c = [float(v) for v in re.split(r"[,;]", args["center"]) if v]
            if len(c) not in (1, dim):
                raise ValueError(f"center needs {dim} coordinates")
            kw["center"] = tuple(np.broadcast_to(c, (dim,)))
        f = cls(dim=dim, **kw)
    else:
        raise ValueError(f"unknown field kind {kind!r}; expected one of {sorted(_KINDS) + ['grid']}")
    if level is not None:
        f = Truncated(dim=dim, base=f, level=float(level))
    return f
