"""Small numerical utilities: bracketed values, log-scale quadrature, hulls.

Everything here is deterministic and pure; these helpers carry the error
bookkeeping used by the modulus functionals and the embedding checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterDomainError


@dataclass(frozen=True)
class BracketedValue:
    """A computed value together with a [low, high] error bracket.

    ``value`` is the best estimate, ``low``/``high`` enclose it under the
    stated tail models.  ``flags`` records every model assumption that went
    into the bracket, so a consumer can tell certified parts from modeled
    ones.
    """

    value: float
    low: float
    high: float
    flags: tuple[str, ...] = field(default=())

    def __float__(self) -> float:
        return float(self.value)

    def with_flag(self, flag: str) -> "BracketedValue":
        return BracketedValue(self.value, self.low, self.high, self.flags + (flag,))


def dual_exponent(p: float) -> float:
    """Hoelder conjugate q = p/(p-1), with q = inf for p = 1."""
    if p < 1:
        raise ParameterDomainError(f"p must be >= 1, got {p}")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def trapezoid_log(s: np.ndarray, g: np.ndarray) -> float:
    """Trapezoid rule for \\int g(s) ds/s over a positive increasing grid."""
    return float(np.trapezoid(g, np.log(s)))


def modulus_functional(
    s: np.ndarray,
    w: np.ndarray,
    alpha: float,
    theta: float,
    large_sat: float | None = None,
) -> BracketedValue:
    """Evaluate ( \\int_0^inf [s^-alpha w(s)]^theta ds/s )^(1/theta) from samples.

    The grid part is a trapezoid rule in log s.  Outside the grid the
    integrand is completed with the standard modulus models:

    * below ``s[0]``: linear decay ``w(s) ~ (s/s0) w0`` (exact for concave
      moduli up to the factor 2 of the doubling estimate, which widens the
      low end of the bracket);
    * above ``s[-1]``: a constant between ``w[-1]`` (monotone floor) and the
      saturation level ``large_sat`` when one is supplied.

    ``theta = inf`` returns the grid supremum of ``s^-alpha w(s)``.
    """
    s = np.asarray(s, dtype=float)
    w = np.asarray(w, dtype=float)
    if s.ndim != 1 or s.shape != w.shape or len(s) < 2:
        raise ParameterDomainError("need matching 1-d grids with >= 2 points")
    if np.any(s <= 0) or np.any(np.diff(s) <= 0):
        raise ParameterDomainError("s grid must be positive and strictly increasing")
    flags: list[str] = []
    s0, w0 = float(s[0]), float(w[0])
    s1, w1 = float(s[-1]), float(w[-1])
    sat = w1 if large_sat is None else float(max(large_sat, w1))

    if math.isinf(theta):
        core = float(np.max(s ** (-alpha) * w))
        high = max(core, sat * s1 ** (-alpha))
        return BracketedValue(core, core, high, tuple(flags))

    g = (s ** (-alpha) * w) ** theta
    core = trapezoid_log(s, g)

    # Small-s tail: integral of [s^-alpha * (s/s0) w0]^theta ds/s on (0, s0].
    t_small = 0.0
    t_small_low = 0.0
    if w0 > 0:
        if alpha < 1:
            t_small = (w0**theta) * s0 ** (-alpha * theta) / (theta * (1.0 - alpha))
            t_small_low = t_small / (2.0**theta)
            flags.append("small-s tail: linear decay model")
        else:
            flags.append("small-s tail divergent for alpha >= 1: omitted")

    # Large-s tail: integral of [s^-alpha * c]^theta ds/s on [s1, inf).
    def const_tail(c: float) -> float:
        return (c**theta) * s1 ** (-alpha * theta) / (alpha * theta)

    t_large_low = const_tail(w1)
    t_large_high = const_tail(sat)
    if large_sat is not None and sat > w1:
        flags.append("large-s tail: between last sample and saturation bound")

    total = core + t_small + t_large_low
    low = core + t_small_low + t_large_low
    high = core + t_small + t_large_high
    inv = 1.0 / theta
    return BracketedValue(total**inv, low**inv, high**inv, tuple(flags))


def adaptive_log_integral(
    fn,
    a: float,
    b: float,
    rel_tol: float = 1e-7,
    max_doublings: int = 18,
) -> tuple[float, bool]:
    """Trapezoid rule on a geometric grid over [a, b], doubled until stable.

    ``fn`` must accept numpy arrays.  Returns (value, converged).
    """
    if not (0 < a < b):
        raise ParameterDomainError(f"need 0 < a < b, got [{a}, {b}]")
    m = 32
    prev = None
    for _ in range(max_doublings):
        x = np.geomspace(a, b, m + 1)
        val = float(np.trapezoid(fn(x), x))
        if prev is not None and abs(val - prev) <= rel_tol * max(abs(val), 1e-300):
            return val, True
        prev = val
        m *= 2
    return prev if prev is not None else 0.0, False


def least_concave_majorant(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Values at ``s`` of the least concave majorant of the points (s, v)."""
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    hull: list[int] = []
    for i in range(len(s)):
        while len(hull) >= 2:
            j, k = hull[-2], hull[-1]
            # drop k when it lies below the chord j->i (upper hull)
            cross = (s[k] - s[j]) * (v[i] - v[j]) - (v[k] - v[j]) * (s[i] - s[j])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(s, s[hull], v[hull])


def monotone_hull(v: np.ndarray) -> np.ndarray:
    """Running maximum from the left; flattens any decreasing stretch."""
    return np.maximum.accumulate(np.asarray(v, dtype=float))


def concave_monotone_envelope(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Least concave majorant anchored at (0, 0), then the monotone hull.

    Lower bounds of a concave nondecreasing modulus vanishing at 0+ stay
    lower bounds under this envelope, and the anchor makes v(s)/s
    nonincreasing, which is what the adjoint transform needs.
    """
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    s0 = np.concatenate(([0.0], s))
    v0 = np.concatenate(([0.0], np.maximum(v, 0.0)))
    return monotone_hull(least_concave_majorant(s0, v0)[1:])


def is_nondecreasing(v: np.ndarray, rel_tol: float = 1e-9) -> bool:
    v = np.asarray(v, dtype=float)
    scale = float(np.max(np.abs(v))) if len(v) else 0.0
    return bool(np.all(np.diff(v) >= -rel_tol * max(scale, 1e-300)))


def is_concave(s: np.ndarray, v: np.ndarray, rel_tol: float = 1e-9) -> bool:
    """Discrete concavity: each interior point lies on or above its chord."""
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    if len(s) < 3:
        return True
    chord = v[:-2] + (v[2:] - v[:-2]) * (s[1:-1] - s[:-2]) / (s[2:] - s[:-2])
    scale = float(np.max(np.abs(v))) or 1e-300
    return bool(np.all(v[1:-1] >= chord - rel_tol * scale))
