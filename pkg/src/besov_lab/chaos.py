"""Hermite chaos decomposition, best approximation, and the spectral bound.

Probabilists' Hermite polynomials normalized to unit L^2(gamma) norm; the
degree of a tensor basis element is the total degree of its multi-index, so
grouping coefficients by total degree reproduces the orthogonal chaos layers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ParameterDomainError, QuadratureOrderError
from .numerics import BracketedValue
from .reports import CheckReport, check


def hermite_eval(k: int, x):
    """Normalized Hermite polynomial h_k(x), ||h_k||_{L^2(gamma_1)} = 1."""
    if k < 0:
        raise ParameterDomainError(f"degree must be >= 0, got {k}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev
    cur = x.copy()
    for j in range(1, k):
        prev, cur = cur, (x * cur - math.sqrt(j) * prev) / math.sqrt(j + 1.0)
    return cur


def hermite_vander(x, degree: int) -> np.ndarray:
    """Matrix [h_k(x_i)] of shape (len(x), degree+1), recurrence-stable."""
    x = np.asarray(x, dtype=float).ravel()
    out = np.empty((len(x), degree + 1))
    out[:, 0] = 1.0
    if degree >= 1:
        out[:, 1] = x
    for j in range(1, degree):
        out[:, j + 1] = (x * out[:, j] - math.sqrt(j) * out[:, j - 1]) / math.sqrt(
            j + 1.0
        )
    return out


@dataclass
class ChaosDecomposition:
    """Hermite coefficients with total degree <= K, grouped into chaos layers."""

    n: int
    max_degree: int
    coeffs: np.ndarray  # box (K+1,)^n, entries with total degree > K zeroed
    degree_energies: np.ndarray  # ||I_k f||_2^2 for k = 0..K
    parseval_defect: float  # ||f||_2^2 (quadrature) minus captured energy
    extras: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(self.coeffs[(0,) * self.n])

    def coefficient(self, multi_index) -> float:
        return float(self.coeffs[tuple(int(k) for k in np.atleast_1d(multi_index))])

    def to_json(self) -> str:
        import json

        entries = [
            [list(map(int, idx)), float(self.coeffs[idx])]
            for idx in zip(*np.nonzero(self.coeffs))
        ]
        doc = {
            "n": self.n,
            "K": self.max_degree,
            "coefficients": entries,
            "parseval_defect": float(self.parseval_defect),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def chaos_decompose(f, K: int) -> ChaosDecomposition:
    """Project onto the tensor Hermite basis up to total degree K by quadrature.

    Needs quadrature order m >= K + 1 per axis so that every inner product
    against a degree-K polynomial is exact.
    """
    grid = f.grid
    if grid.m < K + 1:
        raise QuadratureOrderError(
            f"quadrature order m={grid.m} too small for degree K={K}; need m >= K+1"
        )
    B = hermite_vander(grid.nodes_1d, K)
    A = B * grid.weights_1d[:, None]
    coeffs = f.values
    for _ in range(grid.n):
        coeffs = np.tensordot(coeffs, A, axes=([0], [0]))
    total = sum(np.meshgrid(*[np.arange(K + 1)] * grid.n, indexing="ij"))
    coeffs = np.where(total <= K, coeffs, 0.0)
    energies = np.zeros(K + 1)
    sq = coeffs**2
    for k in range(K + 1):
        energies[k] = float(np.sum(sq[total == k]))
    norm_sq = float(np.sum(grid.weights() * f.values.ravel() ** 2))
    return ChaosDecomposition(
        n=grid.n,
        max_degree=K,
        coeffs=coeffs,
        degree_energies=energies,
        parseval_defect=norm_sq - float(energies.sum()),
    )


def best_approx(dec: ChaosDecomposition, N: int) -> BracketedValue:
    """E_N(f): L^2 distance to the span of chaoses of degree < N.

    The value collects the captured energies at degree >= N; the bracket's
    high end adds the (nonnegative part of the) Parseval defect, which bounds
    whatever lives beyond the computed box.
    """
    if N < 1:
        raise ParameterDomainError(f"N must be >= 1, got {N}")
    tail = float(np.sum(dec.degree_energies[min(N, len(dec.degree_energies)) :]))
    defect = max(dec.parseval_defect, 0.0)
    return BracketedValue(
        value=math.sqrt(tail),
        low=math.sqrt(tail),
        high=math.sqrt(tail + defect),
        flags=("tail beyond computed degree bounded by Parseval defect",)
        if defect > 0
        else (),
    )


def jackson_stechkin_check(
    f,
    N: int,
    K: int | None = None,
    sigma_lower_curve=None,
    dec: ChaosDecomposition | None = None,
    label: str = "jackson-stechkin",
) -> CheckReport:
    """E_{N-1}(f) <= sigma_{gamma,2}(f, sqrt(2pi) N^{-1/2}), checked via its
    computable consequence E_{N-1}(f) <= 2 a_gamma(f, 2, 2pi/N).

    When a certified lower-bound curve for the Gaussian modulus is supplied,
    its value at eps = sqrt(2pi/N) is reported as a sharpness diagnostic.
    """
    from .gaussian import a_gamma  # local import to avoid a module cycle

    if N < 1:
        raise ParameterDomainError(f"N must be >= 1, got {N}")
    if dec is None:
        if K is None:
            K = f.coeffs.shape[0] - 1 if f.coeffs is not None else f.grid.m - 1
        dec = chaos_decompose(f, K)
    lhs = best_approx(dec, N - 1) if N > 1 else None
    lhs_val = lhs.high if lhs is not None else f.lp_norm(2)
    t = 2.0 * math.pi / N
    rhs = 2.0 * a_gamma(f, 2.0, t)
    eps = math.sqrt(2.0 * math.pi / N)
    extras = {"N": N, "eps": eps, "t": t}
    if sigma_lower_curve is not None and sigma_lower_curve.covers(eps):
        extras["sigma_lower_at_eps"] = sigma_lower_curve.eval(eps)
    return check(
        id=label,
        statement="E_{N-1}(f) <= 2*a_gamma(f, 2, 2pi/N)",
        lhs=lhs_val,
        rhs=rhs,
        tol=1e-9 * max(1.0, rhs),
        tail_flags=lhs.flags if lhs is not None else (),
        extras=extras,
    )


def beta_bound_margin(N_max: int = 10_000) -> tuple[bool, float]:
    """Verify B((N+1)/2, 1/2) <= sqrt(2pi) N^{-1/2} for N = 1..N_max.

    Evaluated in log-gamma arithmetic; returns (holds, worst ratio).
    """
    N = np.arange(1, N_max + 1, dtype=float)
    logB = gammaln((N + 1.0) / 2.0) + gammaln(0.5) - gammaln(1.0 + N / 2.0)
    log_bound = 0.5 * math.log(2.0 * math.pi) - 0.5 * np.log(N)
    ratio = np.exp(logB - log_bound)
    return bool(np.all(ratio <= 1.0)), float(ratio.max())


def gamma_ratio_bound_margin(x_grid) -> tuple[bool, float]:
    """Verify Gamma(x + 1/2)/Gamma(x) <= sqrt(x) on a positive grid."""
    x = np.asarray(x_grid, dtype=float)
    ratio = np.exp(gammaln(x + 0.5) - gammaln(x)) / np.sqrt(x)
    return bool(np.all(ratio <= 1.0 + 1e-15)), float(ratio.max())


def grad_ou_eigen_margin(k_max: int, t_grid) -> tuple[bool, float]:
    """Verify sqrt(k) e^{-kt} <= e^{-t} (1 - e^{-2t})^{-1/2} on Hermite layers.

    This is the gradient-contraction estimate of the OU semigroup evaluated on
    eigenfunctions, where both sides are explicit.
    """
    worst = 0.0
    for t in np.asarray(t_grid, dtype=float):
        rhs = math.exp(-t) / math.sqrt(1.0 - math.exp(-2.0 * t))
        for k in range(1, k_max + 1):
            lhs = math.sqrt(k) * math.exp(-k * t)
            worst = max(worst, lhs / rhs)
    return worst <= 1.0 + 1e-12, worst
