"""Finite-dimensional standard Gaussian space: quadrature, OU semigroup, moduli.

Functions live on tensor Gauss-Hermite grids (probabilists' weight, weights
normalized to total mass 1).  Closed-form entries are callable-backed;
everything else is Hermite-coefficient-backed, and off-node evaluation always
goes through one of those two forms, never through interpolation of raw node
values: the Ornstein-Uhlenbeck semigroup acts diagonally on coefficients,
which keeps that path exact.

The dual modulus over Gaussian space parameterizes test fields by Hermite
coefficients; derivative and coordinate multiplication are the usual sparse
ladder maps, so the Gaussian divergence of every candidate integrates to zero
identically.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ExtrapolationWarning,
    OptimizerDivergedError,
    ParameterDomainError,
)
from .grids import BesovParams, ModulusCurve
from .numerics import BracketedValue, dual_exponent, modulus_functional
from .reports import CheckReport, check
from . import chaos as _chaos


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

def gauss_constant(p: float) -> float:
    """C(p) = (E|Z|^p)^(1/p) for Z standard normal: 2^(1/2) (Gamma((p+1)/2)/sqrt(pi))^(1/p)."""
    if p < 1:
        raise ParameterDomainError(f"p must be >= 1, got {p}")
    return math.sqrt(2.0) * math.exp(
        (math.lgamma((p + 1.0) / 2.0) - 0.5 * math.log(math.pi)) / p
    )


def c_t(t: float) -> float:
    """int_0^t e^-tau (1 - e^-2tau)^(-1/2) dtau = pi/2 - arcsin(e^-t)."""
    if t <= 0:
        raise ParameterDomainError(f"t must be positive, got {t}")
    return math.pi / 2.0 - math.asin(math.exp(-t))


# ---------------------------------------------------------------------------
# grids and functions
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _hermegauss_unit(m: int):
    nodes, weights = np.polynomial.hermite_e.hermegauss(m)
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@dataclass(frozen=True)
class HermiteGrid:
    """Tensor Gauss-Hermite rule for the standard Gaussian on R^n."""

    n: int
    m: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ParameterDomainError(f"n must be 1, 2 or 3, got {self.n}")
        if self.m < 2:
            raise ParameterDomainError("need at least 2 nodes per axis")

    @property
    def nodes_1d(self) -> np.ndarray:
        return _hermegauss_unit(self.m)[0]

    @property
    def weights_1d(self) -> np.ndarray:
        return _hermegauss_unit(self.m)[1]

    def points(self) -> np.ndarray:
        """All tensor nodes as an (m^n, n) array, axis 0 varying slowest."""
        mesh = np.meshgrid(*([self.nodes_1d] * self.n), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def weights(self) -> np.ndarray:
        w = self.weights_1d
        out = w
        for _ in range(self.n - 1):
            out = np.multiply.outer(out, w)
        return out.ravel()


def eval_coeff_tensor(coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate a tensor-Hermite coefficient box at scattered points (N, n)."""
    pts = np.atleast_2d(points)
    # contract one degree axis at a time against the per-axis Vandermonde rows
    work = np.broadcast_to(coeffs[None, ...], (pts.shape[0],) + coeffs.shape)
    for axis in range(coeffs.ndim):
        V = _chaos.hermite_vander(pts[:, axis], coeffs.shape[axis] - 1)  # (N, deg+1)
        work = np.einsum("nk,nk...->n...", V, work)
    return work.reshape(pts.shape[0])


class HermiteFunction:
    """Function on Gaussian space: node values plus a callable or coefficient form."""

    __slots__ = ("grid", "values", "fn", "coeffs")

    def __init__(self, grid: HermiteGrid, values=None, fn=None, coeffs=None):
        self.grid = grid
        self.fn = fn
        self.coeffs = None if coeffs is None else np.asarray(coeffs, dtype=float)
        if values is None:
            pts = grid.points()
            values = self.eval(pts)
        values = np.asarray(values, dtype=float).reshape((grid.m,) * grid.n)
        if not np.all(np.isfinite(values)):
            raise ParameterDomainError("node values must be finite")
        self.values = values

    @classmethod
    def from_callable(cls, fn, grid: HermiteGrid) -> "HermiteFunction":
        return cls(grid, fn=fn)

    @classmethod
    def from_coeffs(cls, coeffs, grid: HermiteGrid) -> "HermiteFunction":
        return cls(grid, coeffs=coeffs)

    def eval(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        flat = pts.reshape(-1, self.grid.n)
        if self.fn is not None:
            out = np.asarray(self.fn(flat), dtype=float)
        elif self.coeffs is not None:
            out = eval_coeff_tensor(self.coeffs, flat)
        else:
            raise ParameterDomainError(
                "off-node evaluation needs a callable or coefficient form; "
                "use ensure_coeffs() first"
            )
        return out.reshape(pts.shape[:-1])

    def ensure_coeffs(self, degree: int | None = None) -> np.ndarray:
        """Derive (and cache) the coefficient box by quadrature projection."""
        if self.coeffs is not None and (
            degree is None or self.coeffs.shape[0] > degree
        ):
            return self.coeffs
        if degree is None:
            degree = self.grid.m - 1
        if self.fn is None and self.coeffs is None:
            warnings.warn(
                "deriving coefficients from raw node values",
                ExtrapolationWarning,
                stacklevel=2,
            )
        coeffs = _project_to_coeffs(self, degree)
        self.coeffs = coeffs
        return coeffs

    def lp_norm(self, p: float, m: int | None = None) -> float:
        """L^p(gamma) norm by Gauss-Hermite quadrature (order m per axis)."""
        if p < 1:
            raise ParameterDomainError(f"p must be >= 1, got {p}")
        if m is None or m == self.grid.m:
            vals, w = self.values.ravel(), self.grid.weights()
        else:
            g = HermiteGrid(self.grid.n, m)
            vals, w = self.eval(g.points()), g.weights()
        if math.isinf(p):
            return float(np.max(np.abs(vals)))
        return float(np.sum(w * np.abs(vals) ** p) ** (1.0 / p))

    def to_json(self) -> str:
        import json

        doc = {
            "n": self.grid.n,
            "m": self.grid.m,
            "degree": None if self.coeffs is None else int(self.coeffs.shape[0] - 1),
            "coefficients": None
            if self.coeffs is None
            else [float(c) for c in self.coeffs.ravel(order="C")],
            "values": [float(v) for v in self.values.ravel(order="C")],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _project_to_coeffs(f: HermiteFunction, degree: int) -> np.ndarray:
    grid = f.grid
    B = _chaos.hermite_vander(grid.nodes_1d, degree)  # (m, degree+1)
    A = B * grid.weights_1d[:, None]
    coeffs = f.values
    for _ in range(grid.n):
        coeffs = np.tensordot(coeffs, A, axes=([0], [0]))
    return coeffs


def constant_function(grid: HermiteGrid, value: float = 1.0) -> HermiteFunction:
    coeffs = np.zeros((1,) * grid.n)
    coeffs[(0,) * grid.n] = value
    return HermiteFunction.from_coeffs(coeffs, grid)


def hermite_basis_function(grid: HermiteGrid, multi_index) -> HermiteFunction:
    multi = tuple(int(k) for k in np.atleast_1d(multi_index))
    if len(multi) != grid.n:
        raise ParameterDomainError("multi-index length must match dimension")
    coeffs = np.zeros(tuple(k + 1 for k in multi))
    coeffs[multi] = 1.0
    return HermiteFunction.from_coeffs(coeffs, grid)


# ---------------------------------------------------------------------------
# OU semigroup and the shift-type modulus
# ---------------------------------------------------------------------------

def _total_degree_grid(shape) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(s) for s in shape], indexing="ij")
    return sum(grids)


def ou_semigroup(f: HermiteFunction, t: float) -> HermiteFunction:
    """T_t f(x) = int f(e^-t x + sqrt(1 - e^-2t) y) gamma(dy).

    Coefficient-backed inputs transform exactly (factor e^{-kt} on chaos of
    total degree k); callable-backed inputs get a quadrature closure.
    """
    if t <= 0:
        raise ParameterDomainError(f"t must be positive, got {t}")
    grid = f.grid
    if f.coeffs is not None:
        decay = np.exp(-t * _total_degree_grid(f.coeffs.shape))
        return HermiteFunction.from_coeffs(f.coeffs * decay, grid)
    if f.fn is None:
        f.ensure_coeffs()
        return ou_semigroup(f, t)
    a, b = math.exp(-t), math.sqrt(1.0 - math.exp(-2.0 * t))
    Y = grid.points()
    wY = grid.weights()
    fn = f.fn

    def closure(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty(pts.shape[0])
        chunk = max(1, 2_000_000 // max(len(wY), 1))
        for i in range(0, pts.shape[0], chunk):
            block = pts[i : i + chunk]
            Z = a * block[:, None, :] + b * Y[None, :, :]
            vals = np.asarray(fn(Z.reshape(-1, grid.n)), dtype=float).reshape(
                block.shape[0], -1
            )
            out[i : i + chunk] = vals @ wY
        return out

    return HermiteFunction.from_callable(closure, grid)


def a_gamma(f: HermiteFunction, p: float, t: float, m: int | None = None) -> float:
    """Double-integral shift modulus
    ( iint |f(e^-t x + sqrt(1-e^-2t) y) - f(x)|^p dgamma(x) dgamma(y) )^(1/p)."""
    if t <= 0:
        raise ParameterDomainError(f"t must be positive, got {t}")
    grid = f.grid if m is None else HermiteGrid(f.grid.n, m)
    a, b = math.exp(-t), math.sqrt(1.0 - math.exp(-2.0 * t))
    X = grid.points()
    w = grid.weights()
    fx = f.eval(X)
    total = 0.0
    chunk = max(1, 4_000_000 // max(len(X), 1))
    for i in range(0, len(X), chunk):
        Z = a * X[i : i + chunk, None, :] + b * X[None, :, :]
        vals = f.eval(Z.reshape(-1, grid.n)).reshape(-1, len(X))
        diff = np.abs(vals - fx[i : i + chunk, None]) ** p
        total += float(w[i : i + chunk] @ diff @ w)
    return total ** (1.0 / p)


def a_gamma_curve(
    f: HermiteFunction, p: float, t_grid, m: int | None = None
) -> ModulusCurve:
    vals = [a_gamma(f, p, t, m=m) for t in np.asarray(t_grid, dtype=float)]
    return ModulusCurve(np.asarray(t_grid, dtype=float), np.asarray(vals), "a_gamma")


def sigma_gamma_upper(f: HermiteFunction, p: float, eps: float) -> float:
    """(1 + C(p/(p-1))) a_gamma(f, p, eps^2); only available for p > 1."""
    if p <= 1:
        raise ParameterDomainError(
            "no inverse bound at p = 1; the Gaussian sandwich is one-sided there"
        )
    return (1.0 + gauss_constant(dual_exponent(p))) * a_gamma(f, p, eps * eps)


def sigma_gamma_upper_curve(
    f: HermiteFunction, p: float, eps_grid, m: int | None = None
) -> ModulusCurve:
    eps_grid = np.asarray(eps_grid, dtype=float)
    factor = 1.0 + gauss_constant(dual_exponent(p))
    vals = [factor * a_gamma(f, p, e * e, m=m) for e in eps_grid]
    return ModulusCurve(eps_grid, np.asarray(vals), "sigma_gamma", "upper")


# ---------------------------------------------------------------------------
# Gaussian field candidates and the variational lower bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianFieldCandidate:
    """Cylindrical test field with its Gaussian divergence and dual norms."""

    components: tuple[HermiteFunction, ...]
    gaussian_divergence: HermiteFunction
    dual_q_norm_field: float
    dual_q_norm_div: float
    objective: float
    eps: float
    degree: int

    def feasible(self, tol: float = 1e-9) -> bool:
        return (
            self.dual_q_norm_div <= 1.0 + tol
            and self.dual_q_norm_field <= self.eps * (1.0 + tol)
        )


def _raise_axis(c: np.ndarray, axis: int) -> np.ndarray:
    """Creation ladder (x - d/dx) on one axis: h_k -> sqrt(k+1) h_{k+1}."""
    shape = list(c.shape)
    shape[axis] += 1
    out = np.zeros(shape)
    k = np.arange(c.shape[axis])
    factor = np.sqrt(k + 1.0)
    shp = [1] * c.ndim
    shp[axis] = -1
    sl = [slice(None)] * c.ndim
    sl[axis] = slice(1, None)
    out[tuple(sl)] = c * factor.reshape(shp)
    return out


def _lower_axis(c: np.ndarray, axis: int, out_len: int) -> np.ndarray:
    """Adjoint of the creation ladder, truncated to ``out_len`` on the axis."""
    sl = [slice(None)] * c.ndim
    sl[axis] = slice(1, out_len + 1)
    src = c[tuple(sl)]
    k = np.arange(src.shape[axis])
    shp = [1] * c.ndim
    shp[axis] = -1
    out = src * np.sqrt(k + 1.0).reshape(shp)
    if out.shape[axis] < out_len:
        pad = [(0, 0)] * c.ndim
        pad[axis] = (0, out_len - out.shape[axis])
        out = np.pad(out, pad)
    return out


class _GaussRatioProblem:
    """Ratio objective over coefficient-parameterized fields of degree <= K."""

    def __init__(self, f: HermiteFunction, p: float, eps: float, K: int, m: int):
        n = f.grid.n
        self.n = n
        self.K = K
        self.eps = eps
        self.q = dual_exponent(p)
        grid = HermiteGrid(n, m)
        self.w = grid.weights().reshape((m,) * n)
        self.B_psi = _chaos.hermite_vander(grid.nodes_1d, K)  # (m, K+1)
        self.B_div = _chaos.hermite_vander(grid.nodes_1d, K + 1)
        fc = f.ensure_coeffs(degree=max(K + 1, 2))
        box = np.zeros((K + 2,) * n)
        src = tuple(slice(0, min(s, K + 2)) for s in fc.shape)
        box[tuple(slice(0, min(s, K + 2)) for s in fc.shape)] = fc[src]
        self.F = box

    def div_coeffs(self, c: np.ndarray) -> np.ndarray:
        out = np.zeros((self.K + 2,) * self.n)
        for i in range(self.n):
            raised = _raise_axis(c[i], i)
            out[tuple(slice(0, s) for s in raised.shape)] -= raised
        return out

    def eval_box(self, coeffs: np.ndarray, B: np.ndarray) -> np.ndarray:
        out = coeffs
        for _ in range(self.n):
            out = np.tensordot(out, B, axes=([0], [1]))
        return out

    def eval_adjoint(self, node_grad: np.ndarray, B: np.ndarray) -> np.ndarray:
        out = node_grad
        for _ in range(self.n):
            out = np.tensordot(out, B, axes=([0], [0]))
        return out

    def evaluate(self, c: np.ndarray):
        d = self.div_coeffs(c)
        obj = float(np.sum(d * self.F))
        div_nodes = self.eval_box(d, self.B_div)
        psi_nodes = np.stack([self.eval_box(c[i], self.B_psi) for i in range(self.n)])
        mag = np.sqrt(np.sum(psi_nodes**2, axis=0))
        nd = self._wq_norm(div_nodes)
        nf = self._wq_norm(mag)
        denom = max(nd, nf / self.eps)
        ratio = obj / denom if denom > 0 else 0.0
        return ratio, obj, nd, nf, d, div_nodes, psi_nodes, mag

    def _wq_norm(self, v: np.ndarray) -> float:
        if math.isinf(self.q):
            return float(np.max(np.abs(v)))
        return float(np.sum(self.w * np.abs(v) ** self.q) ** (1.0 / self.q))

    def component_grad(self, big: np.ndarray) -> np.ndarray:
        """d<div(c), big>/dc: annihilation per axis, cropped to the field box."""
        box = tuple(slice(0, self.K + 1) for _ in range(self.n))
        return np.stack(
            [-_lower_axis(big, i, self.K + 1)[box] for i in range(self.n)]
        )

    def supergradient(self, c, ratio, obj, nd, nf, d, div_nodes, psi_nodes, mag):
        g_obj = self.component_grad(self.F)
        if nd >= nf / self.eps:
            if math.isinf(self.q):
                wgt = np.zeros_like(div_nodes)
                idx = np.unravel_index(int(np.argmax(np.abs(div_nodes))), wgt.shape)
                wgt[idx] = math.copysign(1.0, div_nodes[idx])
            else:
                wgt = (
                    self.w
                    * np.sign(div_nodes)
                    * np.abs(div_nodes) ** (self.q - 1.0)
                    / max(nd, 1e-300) ** (self.q - 1.0)
                )
            d_grad = self.eval_adjoint(wgt, self.B_div)
            g_den = self.component_grad(d_grad)
        else:
            if math.isinf(self.q):
                gm = np.zeros_like(mag)
                idx = np.unravel_index(int(np.argmax(mag)), mag.shape)
                gm[idx] = 1.0
            else:
                gm = self.w * mag ** (self.q - 1.0) / max(nf, 1e-300) ** (self.q - 1.0)
            safe = np.where(mag > 0, mag, 1.0)
            g_den = np.stack(
                [
                    self.eval_adjoint(gm * psi_nodes[i] / safe, self.B_psi)
                    / self.eps
                    for i in range(self.n)
                ]
            )
        return g_obj - ratio * g_den


def sigma_gamma_variational(
    f: HermiteFunction,
    p: float,
    eps: float,
    budget: int,
    K: int = 12,
    m: int | None = None,
) -> tuple[float, GaussianFieldCandidate | None]:
    """Certified lower bound of the Gaussian dual modulus at scale eps.

    Fields are degree-K coefficient boxes per component; the seed inverts the
    OU generator on f minus its mean, which already has the right divergence,
    and ascent on the ratio objective can only improve it.  The returned
    candidate is rescaled to exact feasibility in the quadrature dual norms.
    """
    if eps <= 0:
        raise ParameterDomainError(f"eps must be positive, got {eps}")
    if budget < 1:
        raise ParameterDomainError("budget must be >= 1")
    n = f.grid.n
    if m is None:
        m = max(f.grid.m, K + 3)
    prob = _GaussRatioProblem(f, p, eps, K, m)

    # seed: Psi_i = -(d/dx_i) L^{-1} (f - mean), whose divergence is f - mean
    F = prob.F
    tot = _total_degree_grid(F.shape)
    psi0 = F / np.where(tot > 0, tot, 1.0)
    psi0[(0,) * n] = 0.0
    c = prob.component_grad(psi0)
    if not np.any(c):
        return 0.0, None

    state = prob.evaluate(c)
    best_ratio, best_c = max(state[0], 0.0), c.copy()
    plateau_ref, plateau = best_ratio, 0
    for _ in range(max(budget, 1)):
        ratio = state[0]
        if not math.isfinite(ratio):
            raise OptimizerDivergedError("gaussian ratio objective became non-finite")
        grad = prob.supergradient(c, *state)
        gnorm = float(np.sqrt(np.sum(grad * grad)))
        if gnorm == 0.0:
            break
        scale = (float(np.sqrt(np.sum(c * c))) or 1.0) / gnorm
        eta, improved = 0.5, False
        for _ in range(12):
            trial = c + eta * scale * grad
            peak = float(np.max(np.abs(trial)))
            if peak > 1e6:
                trial /= peak
            tstate = prob.evaluate(trial)
            if math.isfinite(tstate[0]) and tstate[0] > ratio:
                c, state = trial, tstate
                improved = True
                break
            eta *= 0.5
        if improved and state[0] > best_ratio:
            best_ratio, best_c = state[0], c.copy()
        plateau += 1
        if plateau >= 20:
            if best_ratio <= plateau_ref * (1 + 1e-6):
                break
            plateau_ref, plateau = best_ratio, 0
    ratio, obj, nd, nf, d, _, _, _ = prob.evaluate(best_c)
    denom = max(nd, nf / eps)
    if denom > 0:
        best_c = best_c / denom
        d = d / denom
        nd, nf = nd / denom, nf / denom
    grid = HermiteGrid(n, m)
    candidate = GaussianFieldCandidate(
        components=tuple(
            HermiteFunction.from_coeffs(best_c[i], grid) for i in range(n)
        ),
        gaussian_divergence=HermiteFunction.from_coeffs(d, grid),
        dual_q_norm_field=nf,
        dual_q_norm_div=nd,
        objective=max(ratio, 0.0),
        eps=eps,
        degree=K,
    )
    return max(ratio, 0.0), candidate


def sigma_gamma_lower_curve(
    f: HermiteFunction,
    p: float,
    eps_grid,
    budget: int = 40,
    K: int = 12,
    m: int | None = None,
) -> ModulusCurve:
    from .numerics import concave_monotone_envelope

    eps_grid = np.asarray(eps_grid, dtype=float)
    raw = np.asarray(
        [sigma_gamma_variational(f, p, e, budget, K=K, m=m)[0] for e in eps_grid]
    )
    vals = concave_monotone_envelope(eps_grid, raw)
    return ModulusCurve(eps_grid, vals, "sigma_gamma", "lower")


# ---------------------------------------------------------------------------
# two-sided comparison, functionals, and embedding checks
# ---------------------------------------------------------------------------

def a_gamma_upper_via_sigma(
    f: HermiteFunction,
    p: float,
    t: float,
    sigma_lower_curve: ModulusCurve | None = None,
    label: str = "gauss-sandwich-a-side",
) -> CheckReport:
    """a(f, t) <= 2 sigma(f, C(p) c_t / 2), with sigma from its upper surrogate.

    For p = 1 there is no computable upper surrogate, so the verdict is
    inconclusive (one-sided sandwich).
    """
    lhs = a_gamma(f, p, t)
    eps0 = 0.5 * gauss_constant(p) * c_t(t)
    extras = {"t": t, "eps0": eps0}
    if p == 1:
        return check(
            id=label,
            statement="a_gamma(f,t) <= 2*sigma_gamma(f, C(p)c_t/2) [no surrogate at p=1]",
            lhs=lhs,
            rhs=math.inf,
            inconclusive=True,
            tail_flags=("no inverse bound at p = 1",),
            extras=extras,
        )
    rhs = 2.0 * sigma_gamma_upper(f, p, eps0)
    if sigma_lower_curve is not None and sigma_lower_curve.covers(eps0):
        lower = sigma_lower_curve.eval(eps0)
        extras["certified_by_lower_bound"] = bool(lhs <= 2.0 * lower + 1e-9)
        extras["sigma_lower_at_eps0"] = lower
    return check(
        id=label,
        statement="a_gamma(f,t) <= 2*(1+C(q))*a_gamma(f, (C(p)c_t/2)^2)",
        lhs=lhs,
        rhs=rhs,
        tol=1e-9 * max(1.0, rhs),
        extras=extras,
    )


def gaussian_besov_functionals(
    curves: dict,
    params: BesovParams,
    f_norm: float | None = None,
) -> tuple[BracketedValue, BracketedValue, list[CheckReport]]:
    """V and A functionals from sampled curves plus the equivalence checks.

    ``curves`` holds 'a' (exact a_gamma samples on a t-grid), 'sigma_upper'
    and optionally 'sigma_lower' (on eps-grids).  A uses exponent alpha/2 in
    t; V uses alpha in eps.  Each direction of the equivalence is checked
    with the surrogate on its dominating side only.
    """
    a_curve: ModulusCurve = curves["a"]
    up: ModulusCurve = curves["sigma_upper"]
    lo: ModulusCurve | None = curves.get("sigma_lower")
    sat = 2.0 * f_norm if f_norm is not None else None
    A = modulus_functional(
        a_curve.eps, a_curve.values, params.alpha / 2.0, params.theta, large_sat=sat
    )
    V_up = modulus_functional(up.eps, up.values, params.alpha, params.theta, large_sat=sat)
    theta_inv = 0.0 if math.isinf(params.theta) else 1.0 / params.theta
    q = params.q
    cp = gauss_constant(params.p)
    checks = [
        check(
            id="VA/a-le-v",
            statement="A(f) <= 2^(1-alpha+1/theta) C(p)^alpha V(f) [V from upper surrogate]",
            lhs=A.value,
            rhs=2.0 ** (1.0 - params.alpha + theta_inv) * cp**params.alpha * V_up.value,
            tol=1e-9 * max(1.0, V_up.value),
            tail_flags=A.flags + V_up.flags,
        )
    ]
    if lo is not None:
        V_lo = modulus_functional(
            lo.eps, lo.values, params.alpha, params.theta, large_sat=sat
        )
        checks.append(
            check(
                id="VA/v-le-a",
                statement="V(f) <= 2^(-1/theta) (1+C(q)) A(f) [V from certified lower bounds]",
                lhs=V_lo.value,
                rhs=2.0 ** (-theta_inv) * (1.0 + gauss_constant(q)) * A.value,
                tol=1e-9 * max(1.0, A.value),
                tail_flags=V_lo.flags + A.flags,
            )
        )
    return V_up, A, checks


def compose_lipschitz(f: HermiteFunction, u) -> HermiteFunction:
    """u(f) as a callable-backed function (compositions leave polynomial space)."""
    return HermiteFunction.from_callable(lambda pts: u(f.eval(pts)), f.grid)


def lipschitz_composition_check(
    f: HermiteFunction,
    u,
    L: float,
    p: float,
    t: float,
    params: BesovParams,
    V_upper: float,
    label: str = "lipschitz-composition",
) -> CheckReport:
    """a(u(f), t) <= 2^(1-alpha) (alpha theta)^(1/theta) L C(p)^alpha c_t^alpha V(f)."""
    lhs = a_gamma(compose_lipschitz(f, u), p, t)
    at = (
        1.0
        if math.isinf(params.theta)
        else (params.alpha * params.theta) ** (1.0 / params.theta)
    )
    rhs = (
        2.0 ** (1.0 - params.alpha)
        * at
        * L
        * gauss_constant(p) ** params.alpha
        * c_t(t) ** params.alpha
        * V_upper
    )
    return check(
        id=label,
        statement="a_gamma(u(f),t) <= 2^(1-alpha)(alpha*theta)^(1/theta) Lip(u) C(p)^alpha c_t^alpha V_upper(f)",
        lhs=lhs,
        rhs=rhs,
        tol=1e-9 * max(1.0, rhs),
        extras={"t": t, "lipschitz": L},
    )


def hypercontractivity_check(
    f: HermiteFunction,
    p: float,
    t: float,
    m: int | None = None,
    tol: float = 1e-9,
    label: str = "hypercontractivity",
) -> CheckReport:
    """||T_t f||_{1+(p-1)e^{2t}} <= ||f||_p."""
    if p <= 1 or t <= 0:
        raise ParameterDomainError("hypercontractivity needs p > 1 and t > 0")
    p_out = 1.0 + (p - 1.0) * math.exp(2.0 * t)
    lhs = ou_semigroup(f, t).lp_norm(p_out, m=m)
    rhs = f.lp_norm(p, m=m)
    return check(
        id=label,
        statement="||T_t f||_{1+(p-1)e^{2t}} <= ||f||_p",
        lhs=lhs,
        rhs=rhs,
        tol=tol * max(1.0, rhs),
        extras={"t": t, "p_out": p_out},
    )


def log_sobolev_constants(
    p: float, theta: float, alpha: float, beta: float
) -> tuple[float, float, float]:
    """The explicit constants (C1, C2, C_mid) of the log-Sobolev-type bound.

    C_mid = 2^(1-alpha) (alpha theta)^(1/theta) C(p)^alpha e/(e-1) (pq)^(alpha/2);
    C1 = (2 p^(-alpha/2) C_mid)^p * beta/(alpha-beta) * (2q)^(-p(alpha-beta)/2) * p^(p beta/2);
    C2 = 2^p e^(2qp) (2q+1)^(p beta/2) + (2q)^(p beta/2) p^(p beta/2).
    """
    if not (p > 1 and 0 < beta < alpha <= 1):
        raise ParameterDomainError("need p > 1 and 0 < beta < alpha <= 1")
    q = dual_exponent(p)
    at = 1.0 if math.isinf(theta) else (alpha * theta) ** (1.0 / theta)
    c_mid = (
        2.0 ** (1.0 - alpha)
        * at
        * gauss_constant(p) ** alpha
        * math.e
        / (math.e - 1.0)
        * (p * q) ** (alpha / 2.0)
    )
    c1 = (
        (2.0 * p ** (-alpha / 2.0) * c_mid) ** p
        * beta
        / (alpha - beta)
        * (2.0 * q) ** (-p * (alpha - beta) / 2.0)
        * p ** (p * beta / 2.0)
    )
    c2 = (2.0**p) * math.exp(2.0 * q * p) * (2.0 * q + 1.0) ** (p * beta / 2.0) + (
        2.0 * q
    ) ** (p * beta / 2.0) * p ** (p * beta / 2.0)
    return c1, c2, c_mid


def log_sobolev_embedding_check(
    f: HermiteFunction,
    p: float,
    theta: float,
    alpha: float,
    beta: float,
    V_upper: float,
    m: int | None = None,
    label: str = "log-sobolev",
) -> CheckReport:
    """int |f|^p |ln(|f|/||f||_p)|^(p beta/2) dgamma <= C1 V^p + C2 ||f||_p^p."""
    c1, c2, _ = log_sobolev_constants(p, theta, alpha, beta)
    grid = f.grid if m is None else HermiteGrid(f.grid.n, m)
    vals = np.abs(f.eval(grid.points()))
    w = grid.weights()
    fnorm = float(np.sum(w * vals**p) ** (1.0 / p))
    if fnorm == 0.0:
        lhs = 0.0
    else:
        ratio = vals / fnorm
        logterm = np.where(ratio > 0, np.abs(np.log(np.where(ratio > 0, ratio, 1.0))), 0.0)
        lhs = float(np.sum(w * vals**p * logterm ** (p * beta / 2.0)))
    rhs = c1 * V_upper**p + c2 * fnorm**p
    return check(
        id=label,
        statement="int |f|^p |ln(|f|/||f||_p)|^(p beta/2) <= C1 V_upper^p + C2 ||f||_p^p",
        lhs=lhs,
        rhs=rhs,
        tol=1e-9 * max(1.0, rhs),
        extras={"C1": c1, "C2": c2, "alpha": alpha, "beta": beta, "theta": theta},
    )
