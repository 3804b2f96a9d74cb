"""Ulyanov-type embedding machinery: potential fields, tail bounds, weights.

The two embedding theorems assert finiteness; what a workbench can actually
verify are the quantitative inequalities inside their proofs, evaluated at
truncated scale with every tail either bounded analytically or flagged.  All
checks here use an upper-bound sigma curve on the dominating side, so a
"pass" is implied by the exact statements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import signal

from .errors import InvalidWeightError, ParameterDomainError
from .grids import (
    GridFunction,
    ModulusCurve,
    array_lp_norm,
    central_diff,
    lp_norm,
)
from .numerics import adaptive_log_integral, dual_exponent
from .reports import CheckReport, check
from .sigma import VectorFieldCandidate

_SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


def unit_sphere_area(n: int) -> float:
    """nu_n = 2 pi^(n/2) / Gamma(n/2); closed values pinned for n <= 3."""
    if n in _SPHERE_AREA:
        return _SPHERE_AREA[n]
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class EmbeddingConstant:
    n: int
    p: float
    nu_n: float
    value: float


def embedding_constant(n: int, p: float) -> EmbeddingConstant:
    """C(n,p) = 1 + nu_n^(-1/p) (n/p - 1)^(1/p - 1) for p in [1, n); C(1,1) = 1."""
    nu = unit_sphere_area(n)
    if n == 1 and p == 1:
        return EmbeddingConstant(1, 1.0, nu, 1.0)
    if not 1 <= p < n:
        raise ParameterDomainError(f"need p in [1, n) or n = p = 1, got n={n}, p={p}")
    value = 1.0 + nu ** (-1.0 / p) * (n / p - 1.0) ** (1.0 / p - 1.0)
    return EmbeddingConstant(n, float(p), nu, float(value))


# ---------------------------------------------------------------------------
# Newtonian potential field
# ---------------------------------------------------------------------------

def _potential_kernel(shape, spacing, n: int) -> np.ndarray:
    """Fundamental solution of the Laplacian sampled on the offset lattice.

    E(x) = ln|x| / 2pi for n = 2 and -((n-2) nu_n)^-1 |x|^(2-n) for n >= 3,
    normalized so div grad (E * u) = u.  The singular cell holds the cell
    average of the kernel (by subsampling), which keeps the convolution
    integrable without special functions.
    """
    nu = unit_sphere_area(n)
    axes = [spacing[a] * np.arange(-(s - 1), s) for a, s in enumerate(shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    rr = np.sqrt(sum(m**2 for m in mesh))

    def kernel_of(r):
        if n == 2:
            return np.log(r) / (2.0 * math.pi)
        return -(r ** (2.0 - n)) / ((n - 2.0) * nu)

    with np.errstate(divide="ignore"):
        kern = kernel_of(rr)
    center = tuple(s - 1 for s in shape)
    sub = [np.linspace(-dx / 2, dx / 2, 9)[1::2] for dx in spacing]
    smesh = np.meshgrid(*sub, indexing="ij")
    sr = np.sqrt(sum(m**2 for m in smesh))
    kern[center] = float(np.mean(kernel_of(sr)))
    return kern


def newtonian_gradient_field(
    u: GridFunction,
    n: int,
    p: float = 1.0,
    method: str = "auto",
    extra_cells: int = 6,
) -> VectorFieldCandidate:
    """Solve div grad(potential) = u in free space and return grad(potential).

    For n = 1 the field is the running integral of u; for n = 2, 3 the
    potential is a kernel convolution on a grid enlarged by ``extra_cells``
    per side (``method='direct'`` forces the plain reference convolution,
    ``'fft'``/``'auto'`` are numerically equivalent optimizations).  The
    candidate carries the divergence reconstruction and dual norms so callers
    can verify div(Phi) = u and the norm bound ||Phi||_q <= C(n,p) ||u||_1^(p/n).

    The potential has a slowly decaying far field, so the sampled window
    truncates it; the outermost array layer is zeroed for storage and the
    reconstruction defect is meaningful on the interior (see ``div_residual``).
    """
    if u.dim != n:
        raise ParameterDomainError(f"u has dim {u.dim}, expected {n}")
    q = dual_exponent(p)
    cell = u.cell_volume
    if n == 1:
        dx = u.spacing[0]
        phi = (np.cumsum(u.values) - 0.5 * u.values) * dx
        grad = [phi]
        origin = u.origin
    else:
        vals = np.pad(u.values, extra_cells)
        origin = tuple(
            o - extra_cells * dx for o, dx in zip(u.origin, u.spacing)
        )
        kern = _potential_kernel(vals.shape, u.spacing, n)
        pot = signal.convolve(vals, kern, mode="same", method=method) * cell
        grad = [central_diff(pot, ax, u.spacing[ax]) for ax in range(n)]
    div = sum(central_diff(grad[ax], ax, u.spacing[ax]) for ax in range(n))
    grad = [_zero_edge(g) for g in grad]
    div = _zero_edge(div)
    mag = np.sqrt(sum(g**2 for g in grad))
    comps = tuple(GridFunction(u.spacing, origin, g) for g in grad)
    return VectorFieldCandidate(
        components=comps,
        divergence=GridFunction(u.spacing, origin, div),
        dual_q_norm_field=array_lp_norm(mag, q, cell),
        dual_q_norm_div=array_lp_norm(div, q, cell),
        objective=0.0,
        eps=embedding_constant(n, p).value * lp_norm(u, 1) ** (p / n),
        scheme="central",
    )


def _zero_edge(values: np.ndarray, width: int = 1) -> np.ndarray:
    vals = values.copy()
    for axis in range(vals.ndim):
        sl = [slice(None)] * vals.ndim
        for j in range(width):
            for idx in (j, -1 - j):
                sl[axis] = idx
                vals[tuple(sl)] = 0.0
    return vals


def div_residual(
    cand: VectorFieldCandidate, u: GridFunction, p: float = 1.0, frame: int = 2
) -> float:
    """||div Phi - u||_p over the interior, ``frame`` cells in from the edge.

    The outer frame carries the window-truncation flux (any compactly
    supported field must dump the total mass of u somewhere), so only the
    interior measures the discretization error of the reconstruction.
    """
    div = cand.divergence
    offs = [
        int(round((u.origin[a] - div.origin[a]) / u.spacing[a]))
        for a in range(u.dim)
    ]
    sl = tuple(slice(o, o + s) for o, s in zip(offs, u.shape))
    diff = div.values[sl] - u.values
    inner = tuple(slice(frame, s - frame) for s in u.shape)
    return array_lp_norm(diff[inner], p, u.cell_volume)


# ---------------------------------------------------------------------------
# local energy and tail measure
# ---------------------------------------------------------------------------

def local_energy_check(
    f: GridFunction,
    mask: np.ndarray,
    p: float,
    sigma_upper_curve: ModulusCurve,
    tol: float = 1e-9,
    label: str = "local-energy",
) -> CheckReport:
    """(int_A |f|^p)^(1/p) <= C(n,p) sigma_p(f, lambda(A)^(1/n)), sigma from above."""
    n = f.dim
    C = embedding_constant(n, p).value
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != f.shape:
        raise ParameterDomainError("mask shape must match the grid")
    lam = float(mask.sum()) * f.cell_volume
    lhs = array_lp_norm(np.where(mask, f.values, 0.0), p, f.cell_volume)
    if lam == 0.0:
        rhs = 0.0
    else:
        rhs = C * sigma_upper_curve.eval(lam ** (1.0 / n))
    return check(
        id=label,
        statement="(int_A |f|^p)^(1/p) <= C(n,p)*sigma_upper(f, measure(A)^(1/n))",
        lhs=lhs,
        rhs=rhs,
        tol=tol * max(1.0, rhs),
        extras={"set_measure": lam, "C": C},
    )


def _slope_grows_near_zero(
    curve: ModulusCurve, span: float = 16.0, factor: float = 3.0
) -> bool:
    """Empirical proxy for lim_{t->0} sigma(t)/t = inf on the sampled grid.

    Confirmed when the secant slope at the smallest sampled scale exceeds the
    slope a factor ``span`` further out by at least ``factor``; a bounded
    slope (the bounded-variation case) stays unconfirmed.
    """
    eps = curve.eps
    vals = curve.values
    if len(eps) < 3 or np.any(vals[:3] <= 0):
        return False
    j = int(np.searchsorted(eps, eps[0] * span))
    j = min(max(j, 2), len(eps) - 1)
    if eps[j] < 2.0 * eps[0]:
        return False
    return bool(vals[0] / eps[0] >= factor * vals[j] / eps[j])


def tail_measure_check(
    f: GridFunction,
    p: float,
    t_grid,
    sigma_curve: ModulusCurve,
    tol_cells: float = 4.0,
    label: str = "tail-measure",
) -> list[CheckReport]:
    """lambda(|f| >= C(n,p) t sigma(t^{-p/n})) <= t^{-p}, thresholds enlarged.

    ``sigma_curve`` must be an upper-bound curve so the superlevel set can
    only shrink.  For n = p = 1 the steep-slope hypothesis is probed on the
    small end of the curve; when it fails the verdict is inconclusive.
    """
    if sigma_curve.bound != "upper":
        raise ParameterDomainError("tail_measure_check needs an upper-bound curve")
    n = f.dim
    C = embedding_constant(n, p).value
    hypothesis_ok = True
    if n == 1 and p == 1:
        hypothesis_ok = _slope_grows_near_zero(sigma_curve)
    reports = []
    cell = f.cell_volume
    for i, t in enumerate(np.asarray(t_grid, dtype=float)):
        arg = t ** (-p / n)
        threshold = C * t * float(_sigma_upper_eval(sigma_curve, np.asarray(arg)))
        measure = float(np.sum(np.abs(f.values) >= threshold)) * cell
        reports.append(
            check(
                id=f"{label}/t{i:02d}",
                statement="measure(|f| >= C(n,p)*t*sigma_upper(t^(-p/n))) <= t^(-p)",
                lhs=measure,
                rhs=t ** (-p),
                tol=tol_cells * cell,
                inconclusive=not hypothesis_ok,
                tail_flags=()
                if hypothesis_ok
                else ("steep-slope hypothesis not confirmed on the grid",),
                extras={"t": float(t), "threshold": threshold},
            )
        )
    return reports


# ---------------------------------------------------------------------------
# Lebesgue-Stieltjes machinery and the two weight checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneWeight:
    """A nondecreasing continuous weight U: [0, inf) -> [0, inf).

    ``growth`` is the optional pair (a, r) certifying U(t) <= a t^p on (0, r);
    flags are verified by sampling before use.
    """

    fn: Callable
    strictly_increasing: bool = False
    zero_at_zero: bool = False
    growth: tuple[float, float] | None = None

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def validate(self, lo: float, hi: float, p: float | None = None) -> None:
        t = np.linspace(max(lo, 0.0), hi, 513)
        vals = np.asarray(self.fn(t), dtype=float)
        if np.any(np.diff(vals) < -1e-12 * max(1.0, float(np.max(np.abs(vals))))):
            raise InvalidWeightError("weight samples are not nondecreasing")
        if np.any(vals < -1e-12):
            raise InvalidWeightError("weight must be nonnegative")
        if self.strictly_increasing and np.any(np.diff(vals) <= 0):
            raise InvalidWeightError("weight is not strictly increasing on the grid")
        if self.zero_at_zero and abs(float(self.fn(np.asarray(0.0)))) > 1e-12:
            raise InvalidWeightError("weight does not vanish at 0")
        if self.growth is not None and p is not None:
            a, r = self.growth
            ts = np.linspace(r / 512.0, r * (1 - 1e-9), 256)
            if np.any(np.asarray(self.fn(ts)) > a * ts**p * (1 + 1e-9)):
                raise InvalidWeightError("growth flag U(t) <= a t^p fails on (0, r)")


def stieltjes_integral(
    U: MonotoneWeight,
    g: Callable,
    N: float,
    T: float,
    rel_tol: float = 1e-6,
    max_doublings: int = 16,
) -> float:
    """Riemann-Stieltjes sum of g dU over [N, T], refined until stable."""
    if T <= N:
        return 0.0
    U.validate(N, T)
    m = 64
    prev = None
    for _ in range(max_doublings):
        t = np.linspace(N, T, m + 1)
        du = np.diff(np.asarray(U.fn(t), dtype=float))
        if np.any(du < -1e-12 * max(1.0, float(np.max(np.abs(du))))):
            raise InvalidWeightError("weight samples are not nondecreasing")
        val = float(np.sum(np.asarray(g(t[:-1]), dtype=float) * du))
        if prev is not None and abs(val - prev) <= rel_tol * max(abs(val), 1e-12):
            return val
        prev = val
        m *= 2
    return prev


def _sigma_upper_eval(curve: ModulusCurve, x: np.ndarray) -> np.ndarray:
    """Vectorized conservative evaluation of an upper-bound curve.

    Arguments below the grid clamp to the first sample, which stays an upper
    bound because the modulus is nondecreasing; arguments above the grid are
    a genuine coverage error."""
    from .errors import CoverageError

    x = np.asarray(x, dtype=float)
    hi = float(curve.eps[-1])
    if np.any(x > hi * (1 + 1e-9)):
        raise CoverageError(f"upper curve covers up to {hi:g}, requested {float(np.max(x)):g}")
    clamped = np.clip(x, float(curve.eps[0]), hi)
    idx = np.searchsorted(curve.eps, clamped * (1 - 1e-12), side="left")
    idx = np.minimum(idx, len(curve.eps) - 1)
    return curve.values[idx]


def ulyanov_LU_check(
    f: GridFunction,
    p: float,
    U: MonotoneWeight,
    N: float,
    sigma_curve: ModulusCurve,
    tol: float = 1e-9,
    label: str = "ulyanov-LU",
) -> CheckReport:
    """int |f|^p U(|f|/||f||_p) <= C^p int_N^inf sigma(s^{-p/n})^p dU + U(N)||f||_p^p.

    The Stieltjes term is truncated where the curve coverage ends; truncation
    only lowers the right-hand side, so a pass at truncated scale is
    conservative.
    """
    if sigma_curve.bound != "upper":
        raise ParameterDomainError("ulyanov_LU_check needs an upper-bound curve")
    n = f.dim
    C = embedding_constant(n, p).value
    fnorm = lp_norm(f, p)
    if fnorm == 0.0:
        return check(label, "LU embedding proof inequality", 0.0, 0.0, tol)
    lhs = float(
        np.sum(
            np.abs(f.values) ** p
            * np.asarray(U.fn(np.abs(f.values) / fnorm), dtype=float)
        )
        * f.cell_volume
    )
    # s ranges where s^{-p/n} stays inside curve coverage
    T = float(curve_coverage_limit(sigma_curve, p, n))
    flags = [f"Stieltjes integral truncated at T={T:g} by curve coverage"]
    sti = stieltjes_integral(
        U, lambda s: _sigma_upper_eval(sigma_curve, s ** (-p / n)) ** p, N, T
    )
    rhs = C**p * sti + float(U.fn(np.asarray(N))) * fnorm**p
    return check(
        id=label,
        statement="int |f|^p U(|f|/||f||_p) <= C(n,p)^p * int_N^T sigma_upper(s^(-p/n))^p dU(s) + U(N)||f||_p^p",
        lhs=lhs,
        rhs=rhs,
        tol=tol * max(1.0, abs(rhs)),
        tail_flags=tuple(flags),
        extras={"stieltjes_term": sti, "U_at_N": float(U.fn(np.asarray(N)))},
    )


def curve_coverage_limit(sigma_curve: ModulusCurve, p: float, n: int) -> float:
    """Largest t such that t^(-p/n) is still covered by the curve."""
    return float(sigma_curve.eps[0]) ** (-n / p)


def ulyanov_U_check(
    f: GridFunction,
    p: float,
    U: MonotoneWeight,
    N: float,
    sigma_curve: ModulusCurve,
    tol: float = 1e-9,
    label: str = "ulyanov-U",
) -> tuple[CheckReport, CheckReport]:
    """Three-term proof inequality for int U(|f|), plus the substitution identity.

    Returns (main check, change-of-variables check).  The main inequality is

        int U(|f|) <= a ||f||_p^p
                     + (U(C v*(N)) - U(r)) r^{-p} ||f||_p^p
                     + int_N^T s^{-1-p} U(C s sigma(s^{-p/n})) ds

    with sigma replaced by its upper surrogate and the integral truncated at
    curve coverage (both conservative).  The substitution t = s^{n/p} maps the
    condition integral to (n/p) int s^{-1-n} U(C s^{n/p} sigma(1/s)) ds; both
    sides are integrated independently and compared.
    """
    if sigma_curve.bound != "upper":
        raise ParameterDomainError("ulyanov_U_check needs an upper-bound curve")
    if U.growth is None:
        raise ParameterDomainError("ulyanov_U_check needs growth flags (a, r)")
    n = f.dim
    C = embedding_constant(n, p).value
    T = curve_coverage_limit(sigma_curve, p, n)
    U.validate(0.0, max(2.0 * float(np.max(np.abs(f.values))), 1.0), p)
    a, r = U.growth
    fnorm = lp_norm(f, p)
    lhs = float(np.sum(np.asarray(U.fn(np.abs(f.values)), dtype=float)) * f.cell_volume)

    vstar_N = N * float(_sigma_upper_eval(sigma_curve, np.asarray(N ** (-p / n))))
    # the proof splits at U(r) <= U(C v*(N)); shrinking r keeps the growth flag
    r_eff = min(r, C * vstar_N)

    def integrand(s):
        return s ** (-1.0 - p) * np.asarray(
            U.fn(C * s * _sigma_upper_eval(sigma_curve, s ** (-p / n))), dtype=float
        )

    term3, converged = adaptive_log_integral(integrand, N, T)
    flags = [f"condition integral truncated at T={T:g} by curve coverage"]
    if not converged:
        flags.append("condition integral did not converge to 1e-7")
    term1 = a * fnorm**p
    term2 = (
        (float(U.fn(np.asarray(C * vstar_N))) - float(U.fn(np.asarray(r_eff))))
        * r_eff ** (-p)
        * fnorm**p
    )
    rhs = term1 + term2 + term3
    main = check(
        id=label,
        statement="int U(|f|) <= a||f||_p^p + (U(C v*(N)) - U(r)) r^(-p) ||f||_p^p + int_N^T s^(-1-p) U(C s sigma_upper(s^(-p/n))) ds",
        lhs=lhs,
        rhs=rhs,
        tol=tol * max(1.0, abs(rhs)),
        tail_flags=tuple(flags),
        extras={"term_growth": term1, "term_middle": term2, "term_integral": term3},
    )

    # change of variables t = s^(n/p): independent quadrature of both sides
    def integrand_sub(s):
        return (n / p) * s ** (-1.0 - n) * np.asarray(
            U.fn(C * s ** (n / p) * _sigma_upper_eval(sigma_curve, 1.0 / s)),
            dtype=float,
        )

    lo, hi = N ** (p / n), T ** (p / n)
    sub_val, sub_conv = adaptive_log_integral(integrand_sub, lo, hi)
    cov = check(
        id=f"{label}/change-of-variables",
        statement="int_N^T t^(-1-p) U(C t sigma(t^(-p/n))) dt == (n/p) int s^(-1-n) U(C s^(n/p) sigma(1/s)) ds",
        lhs=abs(term3 - sub_val),
        rhs=1e-6 * max(abs(term3), 1e-12),
        tol=0.0,
        tail_flags=() if sub_conv else ("substitution integral not converged",),
        extras={"direct": term3, "substituted": sub_val},
    )
    return main, cov
