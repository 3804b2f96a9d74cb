"""Test-function corpus: constructors, closed forms, and load-time validation.

Each entry names a constructor plus parameters and, where available, closed
forms (moduli, norms, superlevel measures, eigen shift-moduli).  Closed forms
are validated against quadrature once per build so a typo in a formula cannot
silently corrupt the oracles downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterDomainError
from .gaussian import HermiteFunction, HermiteGrid, a_gamma, gauss_constant
from .grids import GridFunction, lp_norm, omega_p


# ---------------------------------------------------------------------------
# Euclidean constructors (sampled at cell centers, zero-padded)
# ---------------------------------------------------------------------------

def _indicator_box(lo, hi):
    lo, hi = np.atleast_1d(lo), np.atleast_1d(hi)

    def fn(*axes):
        out = np.ones_like(axes[0])
        for a, l, h in zip(axes, lo, hi):
            out = out * ((a >= l) & (a <= h))
        return out

    return fn


def _power_cusp(beta, radius):
    def fn(*axes):
        r = np.sqrt(sum(a**2 for a in axes))
        inside = r <= radius
        safe = np.where(r > 0, r, 1.0)
        return np.where(inside, safe**beta, 0.0)

    return fn


def _smooth_bump(radius):
    def fn(*axes):
        r2 = sum(a**2 for a in axes) / radius**2
        return np.where(r2 < 1, np.exp(-1.0 / np.maximum(1.0 - r2, 1e-300)), 0.0)

    return fn


def _step_sum(edges, heights):
    def fn(x):
        out = np.zeros_like(x)
        for (a, b), h in zip(edges, heights):
            out = out + h * ((x >= a) & (x <= b))
        return out

    return fn


def _zero(radius):
    def fn(*axes):
        return np.zeros_like(axes[0])

    return fn


EUCLIDEAN_CONSTRUCTORS = {
    "indicator_box": _indicator_box,
    "power_cusp": _power_cusp,
    "smooth_bump": _smooth_bump,
    "step_sum": _step_sum,
    "zero": _zero,
}


@dataclass
class CorpusEntry:
    """One corpus function: constructor id, parameters, and known closed forms."""

    name: str
    space: str  # "euclidean" or "gaussian"
    dim: int
    constructor: str
    params: dict
    p_values: tuple[float, ...] = (1.0,)
    polynomial: bool = False  # gaussian: finite Hermite expansion
    closed_forms: dict = field(default_factory=dict)
    _built: object = None

    def build(self, cfg) -> GridFunction | HermiteFunction:
        if self._built is not None:
            return self._built
        if self.space == "euclidean":
            fn = EUCLIDEAN_CONSTRUCTORS[self.constructor](**self.params)
            box = self.params_box()
            cells = cfg.cells(self.dim)
            pad = int(round(cfg.pad_factor * cells))
            self._built = GridFunction.from_callable(fn, box, cells, pad)
        else:
            self._built = _build_gaussian(self, cfg)
        self.validate(self._built)
        return self._built

    def params_box(self):
        if self.constructor == "indicator_box":
            return list(zip(np.atleast_1d(self.params["lo"]), np.atleast_1d(self.params["hi"])))
        if self.constructor in ("power_cusp", "smooth_bump", "zero"):
            r = self.params["radius"]
            return [(-r, r)] * self.dim
        if self.constructor == "step_sum":
            edges = self.params["edges"]
            return [(min(a for a, _ in edges), max(b for _, b in edges))]
        raise ParameterDomainError(f"unknown constructor {self.constructor!r}")

    def validate(self, built) -> None:
        """Cross-check every registered closed form against quadrature."""
        forms = self.closed_forms
        if self.space == "euclidean":
            if "lp_norm" in forms:
                for p in self.p_values:
                    grid_val = lp_norm(built, p)
                    want = forms["lp_norm"](p)
                    if abs(grid_val - want) > 0.02 * max(want, 1e-9):
                        raise ParameterDomainError(
                            f"{self.name}: lp_norm({p}) closed form {want} "
                            f"vs grid {grid_val}"
                        )
            if "omega" in forms:
                for p in self.p_values:
                    for eps in (0.25, 0.5):
                        want = forms["omega"](p, eps)
                        got = omega_p(built, p, eps)
                        if abs(got - want) > 2.5 * max(built.spacing) * 2 + 0.02 * want:
                            raise ParameterDomainError(
                                f"{self.name}: omega({p},{eps}) closed form {want} vs grid {got}"
                            )
        else:
            if "lp_norm" in forms:
                for p in self.p_values:
                    want = forms["lp_norm"](p)
                    got = built.lp_norm(p)
                    if abs(got - want) > 5e-3 * max(want, 1e-9):
                        raise ParameterDomainError(
                            f"{self.name}: gaussian norm({p}) {want} vs {got}"
                        )
            if "a_gamma" in forms:
                for t in (0.3, 1.0):
                    want = forms["a_gamma"](2.0, t)
                    got = a_gamma(built, 2.0, t)
                    if abs(got - want) > 1e-6 * max(want, 1e-9):
                        raise ParameterDomainError(
                            f"{self.name}: a_gamma(2,{t}) {want} vs {got}"
                        )


def _build_gaussian(entry: CorpusEntry, cfg) -> HermiteFunction:
    grid = HermiteGrid(entry.dim, cfg.hermite_order(entry.dim))
    kind = entry.constructor
    params = entry.params
    if kind == "hermite":
        multi = tuple(params["multi_index"])
        coeffs = np.zeros(tuple(k + 1 for k in multi))
        coeffs[multi] = 1.0
        return HermiteFunction.from_coeffs(coeffs, grid)
    if kind == "poly_square":
        coeffs = np.zeros((3,) * entry.dim)
        coeffs[(0,) * entry.dim] = 1.0
        idx = [0] * entry.dim
        idx[0] = 2
        coeffs[tuple(idx)] = math.sqrt(2.0)
        return HermiteFunction.from_coeffs(coeffs, grid)
    if kind == "ramp":
        f = HermiteFunction.from_callable(
            lambda pts: np.maximum(pts[:, 0], 0.0), grid
        )
        f.ensure_coeffs(degree=cfg.degree(entry.dim))
        return f
    if kind == "trunc_power":
        c, cap = params["exponent"], params["cap"]
        f = HermiteFunction.from_callable(
            lambda pts: np.minimum(np.abs(pts[:, 0]) ** c, cap), grid
        )
        f.ensure_coeffs(degree=cfg.degree(entry.dim))
        return f
    raise ParameterDomainError(f"unknown gaussian constructor {kind!r}")


# ---------------------------------------------------------------------------
# the standard corpus
# ---------------------------------------------------------------------------

def _omega_indicator_1d(p, eps):
    return (2.0 * min(eps, 1.0)) ** (1.0 / p)


def _omega_square_2d(p, eps):
    if eps <= 1.0 / math.sqrt(2.0):
        m = 2.0 * math.sqrt(2.0) * eps - eps * eps
    elif eps <= 1.0:
        m = 1.0 + eps * eps
    else:
        m = 2.0
    return m ** (1.0 / p)


def euclidean_corpus() -> list[CorpusEntry]:
    return [
        CorpusEntry(
            name="indicator_1d",
            space="euclidean",
            dim=1,
            constructor="indicator_box",
            params={"lo": [0.0], "hi": [1.0]},
            p_values=(1.0, 2.0),
            closed_forms={
                "lp_norm": lambda p: 1.0,
                "omega": _omega_indicator_1d,
            },
        ),
        CorpusEntry(
            name="steps_1d",
            space="euclidean",
            dim=1,
            constructor="step_sum",
            params={
                "edges": [(0.0, 1.0), (0.25, 0.75), (0.5, 1.25)],
                "heights": [1.0, 0.5, -0.75],
            },
            p_values=(1.0,),
        ),
        CorpusEntry(
            name="cusp_1d",
            space="euclidean",
            dim=1,
            constructor="power_cusp",
            params={"beta": -0.5, "radius": 1.0},
            p_values=(1.0,),
            closed_forms={
                # measure(|f| >= s) for s >= 1: two intervals |x| <= s^-2
                "superlevel_measure": lambda s: min(2.0, 2.0 * s ** (-2.0)),
            },
        ),
        CorpusEntry(
            name="bump_1d",
            space="euclidean",
            dim=1,
            constructor="smooth_bump",
            params={"radius": 1.0},
            p_values=(1.0, 2.0),
        ),
        CorpusEntry(
            name="indicator_2d",
            space="euclidean",
            dim=2,
            constructor="indicator_box",
            params={"lo": [0.0, 0.0], "hi": [1.0, 1.0]},
            p_values=(1.0,),
            closed_forms={
                "lp_norm": lambda p: 1.0,
                "omega": _omega_square_2d,
            },
        ),
        CorpusEntry(
            name="bump_2d",
            space="euclidean",
            dim=2,
            constructor="smooth_bump",
            params={"radius": 1.0},
            p_values=(1.0,),
        ),
        CorpusEntry(
            name="cusp_2d",
            space="euclidean",
            dim=2,
            constructor="power_cusp",
            params={"beta": -0.5, "radius": 1.0},
            p_values=(1.0,),
        ),
    ]


def gaussian_corpus() -> list[CorpusEntry]:
    return [
        CorpusEntry(
            name="h1_1d",
            space="gaussian",
            dim=1,
            constructor="hermite",
            params={"multi_index": [1]},
            p_values=(1.5, 2.0, 3.0),
            polynomial=True,
            closed_forms={
                "lp_norm": gauss_constant,
                "a_gamma": lambda p, t: math.sqrt(2.0 * (1.0 - math.exp(-t))),
            },
        ),
        CorpusEntry(
            name="h3_1d",
            space="gaussian",
            dim=1,
            constructor="hermite",
            params={"multi_index": [3]},
            p_values=(2.0,),
            polynomial=True,
            closed_forms={
                "a_gamma": lambda p, t: math.sqrt(2.0 * (1.0 - math.exp(-3.0 * t))),
            },
        ),
        CorpusEntry(
            name="poly_square_1d",
            space="gaussian",
            dim=1,
            constructor="poly_square",
            params={},
            p_values=(2.0, 3.0),
            polynomial=True,
            closed_forms={
                "a_gamma": lambda p, t: 2.0 * math.sqrt(1.0 - math.exp(-2.0 * t)),
            },
        ),
        CorpusEntry(
            name="ramp_1d",
            space="gaussian",
            dim=1,
            constructor="ramp",
            params={},
            p_values=(1.5, 2.0),
            polynomial=False,
        ),
        CorpusEntry(
            name="trunc_power_1d",
            space="gaussian",
            dim=1,
            constructor="trunc_power",
            params={"exponent": 1.5, "cap": 5.0},
            p_values=(2.0,),
            polynomial=False,
        ),
        CorpusEntry(
            name="h11_2d",
            space="gaussian",
            dim=2,
            constructor="hermite",
            params={"multi_index": [1, 1]},
            p_values=(2.0,),
            polynomial=True,
            closed_forms={
                "a_gamma": lambda p, t: math.sqrt(2.0 * (1.0 - math.exp(-2.0 * t))),
            },
        ),
        CorpusEntry(
            name="h1_3d",
            space="gaussian",
            dim=3,
            constructor="hermite",
            params={"multi_index": [1, 0, 0]},
            p_values=(2.0,),
            polynomial=True,
            closed_forms={
                "a_gamma": lambda p, t: math.sqrt(2.0 * (1.0 - math.exp(-t))),
            },
        ),
    ]


def zero_entry(dim: int = 1) -> CorpusEntry:
    return CorpusEntry(
        name=f"zero_{dim}d",
        space="euclidean",
        dim=dim,
        constructor="zero",
        params={"radius": 1.0},
        p_values=(1.0,),
    )
