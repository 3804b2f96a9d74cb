"""Sampled functions on uniform grids over R^n, n <= 3.

Carries the L^p machinery: norms, lattice shifts, the classical modulus of
continuity, the heat semigroup, and the Besov seminorm quadrature.  All
integrals are midpoint Riemann sums: corpus builders sample at cell centers,
so ``sum(|v|^p) * cell_volume`` is the midpoint rule for the p-th moment.

Shifts are restricted to integer multiples of the grid spacing (snap to
grid).  This keeps every shifted-difference norm exact on the lattice; grid
refinement, not interpolation, is the convergence knob.
"""
from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import (
    CoverageError,
    DomainExceededError,
    ParameterDomainError,
    UnresolvedScaleWarning,
)
from .numerics import BracketedValue, dual_exponent, modulus_functional

_MONOTONE_KINDS = {"omega", "sigma", "sigma_tilde", "sigma_gamma"}
CURVE_KINDS = ("omega", "sigma", "sigma_tilde", "a_gamma", "sigma_gamma")
CURVE_BOUNDS = ("exact", "lower", "upper")


@dataclass(frozen=True)
class BesovParams:
    """Smoothness/integrability triple (alpha, p, theta); theta may be inf."""

    alpha: float
    p: float
    theta: float

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ParameterDomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.p < 1 or math.isinf(self.p):
            raise ParameterDomainError(f"p must lie in [1, inf), got {self.p}")
        if self.theta < 1:
            raise ParameterDomainError(f"theta must lie in [1, inf], got {self.theta}")

    @property
    def q(self) -> float:
        return dual_exponent(self.p)


class GridFunction:
    """A compactly supported function sampled on a uniform grid.

    ``values[j]`` is the sample at ``origin + j * spacing`` (per axis); the
    boundary layer of the array must be zero so that every lattice shift that
    stays inside the array represents the function on all of R^n.
    """

    __slots__ = ("dim", "spacing", "origin", "values", "support_box")

    def __init__(self, spacing, origin, values, support_box=None):
        values = np.asarray(values, dtype=float)
        dim = values.ndim
        if dim not in (1, 2, 3):
            raise ParameterDomainError(f"dim must be 1, 2 or 3, got {dim}")
        spacing = tuple(float(h) for h in np.atleast_1d(spacing))
        origin = tuple(float(o) for o in np.atleast_1d(origin))
        if len(spacing) != dim or len(origin) != dim:
            raise ParameterDomainError("spacing/origin length must match values.ndim")
        if any(h <= 0 for h in spacing):
            raise ParameterDomainError("spacing must be positive on every axis")
        if any(n < 2 for n in values.shape):
            raise ParameterDomainError("need at least 2 samples per axis")
        if not np.all(np.isfinite(values)):
            raise ParameterDomainError("values must be finite")
        for axis in range(dim):
            edge = [slice(None)] * dim
            for j in (0, -1):
                edge[axis] = j
                if np.any(values[tuple(edge)] != 0.0):
                    raise ParameterDomainError(
                        "boundary layer must be zero (compact support on the grid)"
                    )
        self.dim = dim
        self.spacing = spacing
        self.origin = origin
        self.values = values
        self.support_box = (
            tuple((float(a), float(b)) for a, b in support_box)
            if support_box is not None
            else self._tight_support_box()
        )

    def _tight_support_box(self):
        nz = np.nonzero(self.values)
        box = []
        for axis in range(self.dim):
            if len(nz[axis]) == 0:
                box.append((self.origin[axis], self.origin[axis]))
                continue
            lo = self.origin[axis] + (nz[axis].min() - 0.5) * self.spacing[axis]
            hi = self.origin[axis] + (nz[axis].max() + 0.5) * self.spacing[axis]
            box.append((float(lo), float(hi)))
        return tuple(box)

    # -- basic geometry -------------------------------------------------
    @property
    def shape(self):
        return self.values.shape

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis_coords(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing[axis] * np.arange(self.shape[axis])

    def support_diameter(self) -> float:
        return math.sqrt(sum((b - a) ** 2 for a, b in self.support_box))

    @classmethod
    def from_callable(cls, fn, box, cells, pad):
        """Sample ``fn`` at cell centers of ``box`` padded by ``pad`` cells.

        ``box`` is a sequence of (lo, hi) pairs, ``cells`` the cell count per
        axis inside the box, ``pad`` the number of zero cells added per side.
        """
        box = [(float(a), float(b)) for a, b in np.atleast_2d(box)]
        dim = len(box)
        cells = [int(c) for c in np.broadcast_to(cells, (dim,))]
        pad = [int(c) for c in np.broadcast_to(pad, (dim,))]
        spacing = [(b - a) / c for (a, b), c in zip(box, cells)]
        origin = [a - (p - 0.5) * h for (a, _), p, h in zip(box, pad, spacing)]
        axes = [
            o + h * np.arange(c + 2 * p)
            for o, h, c, p in zip(origin, spacing, cells, pad)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        values = np.asarray(fn(*mesh), dtype=float)
        return cls(spacing, origin, values)

    # -- serialization ---------------------------------------------------
    def to_json(self) -> str:
        doc = {
            "dim": self.dim,
            "spacing": list(self.spacing),
            "origin": list(self.origin),
            "shape": list(self.shape),
            "values": [float(v) for v in self.values.ravel(order="C")],
            "support_box": [list(b) for b in self.support_box],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "GridFunction":
        doc = json.loads(text)
        values = np.asarray(doc["values"], dtype=float).reshape(doc["shape"], order="C")
        return cls(doc["spacing"], doc["origin"], values, doc["support_box"])


@dataclass(frozen=True)
class ModulusCurve:
    """A modulus of continuity sampled on an increasing positive grid.

    ``bound`` records the provenance of the values: ``exact`` (closed form or
    converged), ``lower`` (certified lower bounds) or ``upper`` (theorem
    surrogate).  Evaluation between samples respects the bound direction:
    upper curves step to the right neighbor, lower curves to the left, exact
    curves interpolate linearly.
    """

    eps: np.ndarray
    values: np.ndarray
    kind: str
    bound: str = "exact"

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "values", values)
        if self.kind not in CURVE_KINDS:
            raise ParameterDomainError(f"unknown curve kind {self.kind!r}")
        if self.bound not in CURVE_BOUNDS:
            raise ParameterDomainError(f"unknown bound tag {self.bound!r}")
        if eps.ndim != 1 or eps.shape != values.shape or len(eps) == 0:
            raise ParameterDomainError("eps/values must be matching 1-d arrays")
        if np.any(eps <= 0) or np.any(np.diff(eps) <= 0):
            raise ParameterDomainError("eps grid must be positive, strictly increasing")
        if np.any(values < -1e-12):
            raise ParameterDomainError("modulus values must be nonnegative")
        if self.kind in _MONOTONE_KINDS and self.bound in ("exact", "upper"):
            scale = max(float(np.max(values)), 1e-300)
            if np.any(np.diff(values) < -1e-9 * scale):
                raise ParameterDomainError(
                    f"{self.kind} curve with bound={self.bound} must be nondecreasing"
                )

    def __len__(self) -> int:
        return len(self.eps)

    def covers(self, x: float) -> bool:
        slack = 1e-12 * self.eps[-1]
        return self.eps[0] - slack <= x <= self.eps[-1] + slack

    def eval(self, x: float) -> float:
        if not self.covers(x):
            raise CoverageError(
                f"curve covers [{self.eps[0]:g}, {self.eps[-1]:g}], requested {x:g}"
            )
        x = min(max(x, float(self.eps[0])), float(self.eps[-1]))
        if self.bound == "upper":
            i = int(np.searchsorted(self.eps, x, side="left"))
            i = min(i, len(self.eps) - 1)
            return float(self.values[i])
        if self.bound == "lower":
            i = int(np.searchsorted(self.eps, x, side="right")) - 1
            i = max(i, 0)
            return float(self.values[i])
        return float(np.interp(x, self.eps, self.values))

    def scaled(self, factor: float, bound: str | None = None, kind: str | None = None):
        return ModulusCurve(
            self.eps, self.values * factor, kind or self.kind, bound or self.bound
        )

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "bound": self.bound,
            "eps": [float(e) for e in self.eps],
            "values": [float(v) for v in self.values],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ModulusCurve":
        doc = json.loads(text)
        return cls(doc["eps"], doc["values"], doc["kind"], doc["bound"])


# ---------------------------------------------------------------------------
# array helpers shared with the field optimizers
# ---------------------------------------------------------------------------

def shifted_values(values: np.ndarray, offsets) -> np.ndarray:
    """Zero-filled lattice shift: out[j] = values[j - k], i.e. f(x - k*dx)."""
    out = np.zeros_like(values)
    src = []
    dst = []
    for n, k in zip(values.shape, offsets):
        k = int(k)
        if abs(k) >= n:
            return out
        dst.append(slice(max(k, 0), n + min(k, 0)))
        src.append(slice(max(-k, 0), n + min(-k, 0)))
    out[tuple(dst)] = values[tuple(src)]
    return out


def central_diff(values: np.ndarray, axis: int, dx: float) -> np.ndarray:
    plus = [0] * values.ndim
    plus[axis] = -1
    minus = [0] * values.ndim
    minus[axis] = 1
    return (shifted_values(values, plus) - shifted_values(values, minus)) / (2.0 * dx)


def central_gradient(f: GridFunction) -> np.ndarray:
    return np.stack(
        [central_diff(f.values, ax, f.spacing[ax]) for ax in range(f.dim)]
    )


def array_lp_norm(values: np.ndarray, p: float, cell: float) -> float:
    if p < 1:
        raise ParameterDomainError(f"p must be >= 1, got {p}")
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float((np.sum(a**p) * cell) ** (1.0 / p))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def lp_norm(f: GridFunction, p: float) -> float:
    """Midpoint-rule L^p norm; p = inf returns the grid maximum of |f|."""
    return array_lp_norm(f.values, p, f.cell_volume)


def integral(f: GridFunction) -> float:
    return float(f.values.sum() * f.cell_volume)


def snap_offsets(f: GridFunction, h) -> tuple[int, ...]:
    h = np.broadcast_to(np.asarray(h, dtype=float), (f.dim,))
    return tuple(int(round(hi / dxi)) for hi, dxi in zip(h, f.spacing))


def shift(f: GridFunction, h) -> GridFunction:
    """The translate f(. - h) with h snapped to the nearest lattice vector."""
    k = snap_offsets(f, h)
    for axis, (ki, n) in enumerate(zip(k, f.shape)):
        if abs(ki) >= n:
            raise DomainExceededError(
                f"shift of {ki} cells exceeds axis {axis} extent {n}"
            )
    # refuse to silently clip support: the translate must stay on the grid
    nz = np.nonzero(f.values)
    for axis, ki in enumerate(k):
        if len(nz[axis]) == 0:
            continue
        if nz[axis].min() + ki < 1 or nz[axis].max() + ki > f.shape[axis] - 2:
            raise DomainExceededError(
                f"translate by {ki} cells pushes support off axis {axis}"
            )
    box = tuple(
        (a + ki * dxi, b + ki * dxi)
        for (a, b), ki, dxi in zip(f.support_box, k, f.spacing)
    )
    return GridFunction(f.spacing, f.origin, shifted_values(f.values, k), box)


def _lattice_ball(f: GridFunction, eps: float):
    """Half of the lattice vectors 0 < |k*dx| <= eps (the other half mirrors)."""
    ranges = [range(-int(eps / dx), int(eps / dx) + 1) for dx in f.spacing]
    for k in itertools.product(*ranges):
        if all(ki == 0 for ki in k):
            continue
        first = next(ki for ki in k if ki != 0)
        if first < 0:
            continue
        if sum((ki * dx) ** 2 for ki, dx in zip(k, f.spacing)) <= eps * eps * (1 + 1e-12):
            yield k


def shift_diff_norm(f: GridFunction, offsets, p: float) -> float:
    """||f_h - f||_p for the lattice shift h = offsets * spacing."""
    return array_lp_norm(
        shifted_values(f.values, offsets) - f.values, p, f.cell_volume
    )


def omega_p(f: GridFunction, p: float, eps: float) -> float:
    """Classical L^p modulus: max of ||f_h - f||_p over lattice |h| <= eps.

    The lattice maximum is a certified lower bound of the supremum over all
    real shifts and converges to it under grid refinement.  Scales below one
    grid cell are unresolved: the result is 0 with a warning.
    """
    if eps <= 0:
        raise ParameterDomainError(f"eps must be positive, got {eps}")
    if eps < min(f.spacing):
        warnings.warn(
            f"eps={eps:g} below one grid cell; omega unresolved, returning 0",
            UnresolvedScaleWarning,
            stacklevel=2,
        )
        return 0.0
    best = 0.0
    for k in _lattice_ball(f, eps):
        best = max(best, shift_diff_norm(f, k, p))
    return best


def omega_curve(
    f: GridFunction,
    p: float,
    eps_grid: np.ndarray,
    bound: str = "lower",
) -> ModulusCurve:
    """Modulus curve on an increasing grid, sharing one table of shift norms.

    Shifts longer than the support diameter separate the supports, where
    ||f_h - f||_p^p = 2 ||f||_p^p exactly; that saturation value is used
    beyond the enumerated radius instead of enumerating huge lattice balls.
    """
    eps_grid = np.asarray(eps_grid, dtype=float)
    diam = f.support_diameter()
    sat = (2.0 ** (1.0 / p)) * lp_norm(f, p)
    enum_radius = min(float(eps_grid[-1]), diam + 2.0 * max(f.spacing))
    norms = []
    radii = []
    for k in _lattice_ball(f, enum_radius):
        radii.append(math.sqrt(sum((ki * dx) ** 2 for ki, dx in zip(k, f.spacing))))
        norms.append(shift_diff_norm(f, k, p))
    radii = np.asarray(radii)
    norms = np.asarray(norms)
    order = np.argsort(radii)
    radii, norms = radii[order], norms[order]
    running = np.maximum.accumulate(norms) if len(norms) else norms
    values = []
    for eps in eps_grid:
        if eps > diam:
            values.append(sat)
            continue
        i = int(np.searchsorted(radii, eps * (1 + 1e-12), side="right")) - 1
        values.append(float(running[i]) if i >= 0 else 0.0)
    return ModulusCurve(eps_grid, np.asarray(values), "omega", bound)


def heat_semigroup(
    f: GridFunction,
    t: float,
    tail_cutoff: float = 1e-12,
    max_radius_cells: int = 100_000,
) -> GridFunction:
    """Gaussian convolution with kernel exp(-|x-y|^2 / 2t), variance t per axis.

    The grid is padded by the kernel radius so no mass leaves the array; the
    discrete kernel is sum-normalized, which conserves the total integral
    exactly.  Separability makes this n one-dimensional convolutions.
    """
    if t <= 0:
        raise ParameterDomainError(f"t must be positive, got {t}")
    radius = math.sqrt(2.0 * t * math.log(1.0 / tail_cutoff))
    pads = []
    kernels = []
    for dx in f.spacing:
        r = int(math.ceil(radius / dx)) + 1
        if r > max_radius_cells:
            raise DomainExceededError(
                f"heat kernel radius {r} cells exceeds limit {max_radius_cells}"
            )
        pads.append(r)
        x = dx * np.arange(-r, r + 1)
        w = np.exp(-(x**2) / (2.0 * t))
        kernels.append(w / w.sum())
    out = np.pad(f.values, [(r, r) for r in pads])
    for axis, w in enumerate(kernels):
        out = ndimage.convolve1d(out, w, axis=axis, mode="constant", cval=0.0)
    # re-zero the outermost layer; it carries at most tail_cutoff of the mass
    for axis in range(f.dim):
        edge = [slice(None)] * f.dim
        for j in (0, -1):
            edge[axis] = j
            out[tuple(edge)] = 0.0
    origin = tuple(o - r * dx for o, r, dx in zip(f.origin, pads, f.spacing))
    return GridFunction(f.spacing, origin, out)


def values_on_common_grid(f: GridFunction, g: GridFunction):
    """Restrict two same-spacing functions to their overlapping index box."""
    if f.spacing != g.spacing:
        raise ParameterDomainError("functions live on grids with different spacing")
    offs = [
        int(round((g.origin[a] - f.origin[a]) / f.spacing[a])) for a in range(f.dim)
    ]
    fs, gs = [], []
    for a, k in enumerate(offs):
        lo = max(0, k)
        hi = min(f.shape[a], g.shape[a] + k)
        if hi <= lo:
            raise DomainExceededError("grids do not overlap")
        fs.append(slice(lo, hi))
        gs.append(slice(lo - k, hi - k))
    return f.values[tuple(fs)], g.values[tuple(gs)]


def besov_seminorm(
    f: GridFunction,
    params: BesovParams,
    omega: ModulusCurve,
) -> BracketedValue:
    """Quadrature of ( int_0^inf [s^-alpha omega_p(f,s)]^theta ds/s )^(1/theta).

    The curve supplies the grid part; tails follow the standard modulus
    models, with 2||f||_p as the saturation level for large s.
    """
    if omega.kind != "omega":
        raise ParameterDomainError("besov_seminorm needs an omega curve")
    return modulus_functional(
        omega.eps,
        omega.values,
        params.alpha,
        params.theta,
        large_sat=2.0 * lp_norm(f, params.p),
    )


def default_s_grid(f: GridFunction, ratio: float = 2 ** 0.125) -> np.ndarray:
    """Geometric grid s_k = s_min * ratio^k on [10*spacing, 10*diam(support)]."""
    s_min = 10.0 * min(f.spacing)
    s_max = max(10.0 * f.support_diameter(), s_min * ratio**8)
    count = int(math.ceil(math.log(s_max / s_min) / math.log(ratio))) + 1
    return s_min * ratio ** np.arange(count)
