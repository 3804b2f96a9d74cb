"""Verification suites over the corpus: moduli, sandwich, embedding, gaussian, chaos.

Each suite function is pure given its config and returns an ordered list of
CheckReports (plus curve artifacts where applicable); ``run_suite`` writes the
canonical report files and maps the aggregate verdict to an exit status.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from . import chaos as chaos_mod
from . import embedding as emb
from . import gaussian as gs
from .corpus import CorpusEntry, euclidean_corpus, gaussian_corpus, zero_entry
from .errors import BesovLabError, UsageError
from .grids import (
    BesovParams,
    GridFunction,
    ModulusCurve,
    besov_seminorm,
    heat_semigroup,
    integral,
    lp_norm,
    omega_curve,
    omega_p,
    shift_diff_norm,
    snap_offsets,
)
from .numerics import (
    concave_monotone_envelope,
    is_concave,
    is_nondecreasing,
    modulus_functional,
)
from .reports import (
    CheckReport,
    aggregate_verdict,
    check,
    error_report,
    emit_curve_data,
    write_report,
    write_summary_csv,
)
from .sigma import (
    V_functional,
    adjoint_transform,
    sandwich_factor,
    sigma_constructive,
    sigma_upper_curve,
    sigma_variational,
    sigma_tilde_variational,
)

SUITES = ("moduli", "sandwich", "embedding", "gaussian", "chaos", "all")
_RATIO = 2.0 ** 0.125  # geometric grid step; 2x shift = 8 indices


@dataclass
class SuiteConfig:
    suite: str = "all"
    out_dir: str | None = None
    cells_1d: int = 160
    cells_2d: int = 40
    cells_3d: int = 16
    pad_factor: float = 1.25
    eps_points: int = 16
    budget: int = 60
    hermite_m_1d: int = 48
    hermite_m_2d: int = 16
    hermite_m_3d: int = 8
    degree_1d: int = 12
    degree_2d: int = 6
    degree_3d: int = 4
    gaussian_budget: int = 40
    t_points: int = 9
    chaos_n_max: int = 64
    beta_n_max: int = 10_000
    sandwich_rel_tol: float = 1e-6
    shape_rel_tol: float = 1e-6
    alphas: tuple = (0.5,)
    thetas: tuple = (2.0, math.inf)

    def cells(self, dim: int) -> int:
        return {1: self.cells_1d, 2: self.cells_2d, 3: self.cells_3d}[dim]

    def hermite_order(self, dim: int) -> int:
        return {1: self.hermite_m_1d, 2: self.hermite_m_2d, 3: self.hermite_m_3d}[dim]

    def degree(self, dim: int) -> int:
        return {1: self.degree_1d, 2: self.degree_2d, 3: self.degree_3d}[dim]

    @classmethod
    def from_dict(cls, doc: dict) -> "SuiteConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(doc) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        for key in ("thetas", "alphas"):
            if key in doc:
                doc[key] = tuple(
                    math.inf if v in ("inf", "Infinity") else float(v)
                    for v in doc[key]
                )
        cfg = cls(**doc)
        if cfg.suite not in SUITES:
            raise UsageError(f"unknown suite {cfg.suite!r}; choose from {SUITES}")
        for name in (
            "cells_1d", "cells_2d", "cells_3d", "eps_points", "budget",
            "hermite_m_1d", "hermite_m_2d", "hermite_m_3d", "gaussian_budget",
            "t_points", "chaos_n_max", "beta_n_max",
        ):
            if getattr(cfg, name) < 1:
                raise UsageError(f"config field {name} must be positive")
        if cfg.sandwich_rel_tol <= 0 or cfg.shape_rel_tol <= 0:
            raise UsageError("tolerances must be positive")
        return cfg

    def resolved(self) -> dict:
        doc = asdict(self)
        doc["thetas"] = ["inf" if math.isinf(t) else t for t in self.thetas]
        doc["alphas"] = list(self.alphas)
        return doc


# ---------------------------------------------------------------------------
# shared per-entry computations
# ---------------------------------------------------------------------------

@dataclass
class EuclideanPrepared:
    entry: CorpusEntry
    f: GridFunction
    s_grid: np.ndarray
    s_grid_ext: np.ndarray  # doubled range so omega(2s) is on-grid
    omega: dict = field(default_factory=dict)  # p -> extended omega curve

    def omega_curve(self, p: float) -> ModulusCurve:
        if p not in self.omega:
            self.omega[p] = omega_curve(self.f, p, self.s_grid_ext)
        return self.omega[p]

    def omega_values(self, p: float) -> np.ndarray:
        return self.omega_curve(p).values[: len(self.s_grid)]

    def tilde_lower_values(self, p: float) -> np.ndarray:
        # sigma_tilde(s) >= ||f_2h - f||_p / 2 maximized over |2h| <= 2s,
        # which is omega(2s)/2: an 8-index shift on the ratio-2^(1/8) grid
        return 0.5 * self.omega_curve(p).values[8 : 8 + len(self.s_grid)]


def prepare_euclidean(cfg: SuiteConfig, entry: CorpusEntry) -> EuclideanPrepared:
    f = entry.build(cfg)
    s_min = 10.0 * min(f.spacing)
    diam = max(f.support_diameter(), 20.0 * min(f.spacing))
    count = int(math.ceil(math.log(10.0 * diam / s_min) / math.log(_RATIO))) + 1
    s_grid = s_min * _RATIO ** np.arange(count)
    s_grid_ext = s_min * _RATIO ** np.arange(count + 8)
    return EuclideanPrepared(entry, f, s_grid, s_grid_ext)


def _eps_grid(cfg: SuiteConfig, f: GridFunction) -> np.ndarray:
    lo = 4.0 * min(f.spacing)
    hi = max(1.5, 8.0 * lo)
    return np.geomspace(lo, hi, cfg.eps_points)


def _sigma_lower_curve_values(
    cfg: SuiteConfig, prep: EuclideanPrepared, p: float, eps_grid: np.ndarray
):
    """Certified lower bounds at each eps: max(variational, omega(2 eps)/2)."""
    ocurve = prep.omega_curve(p)
    vals = []
    for eps in eps_grid:
        v, _ = sigma_variational(prep.f, p, float(eps), cfg.budget)
        arg = min(2.0 * float(eps), float(ocurve.eps[-1]))
        tilde = 0.5 * ocurve.eval(arg) if ocurve.covers(arg) else 0.0
        vals.append(max(v, tilde))
    return np.asarray(vals)


# ---------------------------------------------------------------------------
# moduli suite
# ---------------------------------------------------------------------------

def run_moduli(cfg: SuiteConfig):
    checks: list[CheckReport] = []
    curves: dict[str, ModulusCurve] = {}
    entries = [zero_entry()] + euclidean_corpus()
    for entry in entries:
        prep = prepare_euclidean(cfg, entry)
        f = prep.f
        for p in entry.p_values:
            tag = f"moduli/{entry.name}/p{p:g}"
            oc = prep.omega_curve(p)
            ov = prep.omega_values(p)
            curves[f"{entry.name}_p{p:g}_omega"] = ModulusCurve(
                prep.s_grid, ov, "omega", "lower"
            )
            fnorm = lp_norm(f, p)
            scale = float(np.max(ov, initial=0.0))
            grid_tol = 2.0 * float(np.max(np.diff(oc.values), initial=0.0))

            checks.append(
                check(
                    f"{tag}/omega-monotone",
                    "omega(eps) nondecreasing on the grid",
                    lhs=float(-np.min(np.diff(ov), initial=0.0)),
                    rhs=cfg.shape_rel_tol * scale,
                )
            )
            # subadditivity along the geometric grid: s_i + s_j <= s_k pairs
            worst = 0.0
            for i in range(0, len(prep.s_grid) - 8, 4):
                for j in range(i, len(prep.s_grid) - 8, 4):
                    ssum = prep.s_grid[i] + prep.s_grid[j]
                    if ssum > oc.eps[-1]:
                        continue
                    worst = max(worst, oc.eval(ssum) - oc.eval(prep.s_grid[i]) - oc.eval(prep.s_grid[j]))
            checks.append(
                check(
                    f"{tag}/omega-subadditive",
                    "omega(e1+e2) <= omega(e1) + omega(e2) + 2*grid_tol",
                    lhs=worst,
                    rhs=grid_tol,
                    tol=cfg.shape_rel_tol * scale,
                )
            )
            # doubling estimate omega(tau s) <= 2 tau omega(s), tau = ratio^8k
            worst = 0.0
            for i in range(len(prep.s_grid)):
                for k in (8, 16, 24):
                    if i + k >= len(prep.s_grid_ext):
                        break
                    tau = _RATIO**k
                    worst = max(worst, oc.values[i + k] - 2.0 * tau * oc.values[i])
            checks.append(
                check(
                    f"{tag}/omega-doubling",
                    "omega(tau*s) <= 2*tau*omega(s) for tau >= 1",
                    lhs=worst,
                    rhs=cfg.shape_rel_tol * scale,
                )
            )
            checks.append(
                check(
                    f"{tag}/omega-bounded",
                    "omega(eps) <= 2*||f||_p",
                    lhs=float(np.max(oc.values, initial=0.0)),
                    rhs=2.0 * fnorm,
                    tol=cfg.shape_rel_tol * fnorm,
                )
            )
            # sigma lower curve shape (concave envelope postprocessing)
            if np.any(f.values):
                eps_grid = _eps_grid(cfg, f)
                raw = _sigma_lower_curve_values(cfg, prep, p, eps_grid)
                vals = concave_monotone_envelope(eps_grid, raw)
                sc = ModulusCurve(eps_grid, vals, "sigma", "lower")
                curves[f"{entry.name}_p{p:g}_sigma_lower"] = sc
                checks.append(
                    check(
                        f"{tag}/sigma-curve-monotone",
                        "postprocessed sigma curve nondecreasing",
                        lhs=0.0 if is_nondecreasing(vals, cfg.shape_rel_tol) else 1.0,
                        rhs=0.0,
                    )
                )
                checks.append(
                    check(
                        f"{tag}/sigma-curve-concave",
                        "postprocessed sigma curve concave",
                        lhs=0.0 if is_concave(eps_grid, vals, cfg.shape_rel_tol) else 1.0,
                        rhs=0.0,
                    )
                )
                if np.all(vals > 0):
                    adj = adjoint_transform(sc)
                    ok = is_nondecreasing(adj.values, 1e-6) and is_concave(
                        adj.s, adj.values, 1e-6
                    )
                    checks.append(
                        check(
                            f"{tag}/adjoint-shape",
                            "s*sigma(1/s) concave and nondecreasing",
                            lhs=0.0 if ok else 1.0,
                            rhs=0.0,
                        )
                    )
            # heat semigroup: mass conservation and L^p contraction
            for t in (0.05, 0.2):
                pt = heat_semigroup(f, t)
                checks.append(
                    check(
                        f"{tag}/heat-mass-t{t:g}",
                        "integral preserved by the heat semigroup",
                        lhs=abs(integral(pt) - integral(f)),
                        rhs=1e-8 * max(1.0, abs(integral(f))),
                    )
                )
                checks.append(
                    check(
                        f"{tag}/heat-contraction-t{t:g}",
                        "||P_t f||_p <= ||f||_p",
                        lhs=lp_norm(pt, p),
                        rhs=fnorm,
                        tol=1e-10 * fnorm,
                    )
                )
            # seminorm homogeneity through the full pipeline
            if np.any(f.values):
                params = BesovParams(0.5, p, 2.0)
                base = besov_seminorm(f, params, oc)
                tripled = modulus_functional(
                    oc.eps, 3.0 * oc.values, 0.5, 2.0, large_sat=6.0 * fnorm
                )
                checks.append(
                    check(
                        f"{tag}/seminorm-homogeneous",
                        "seminorm(3f) = 3*seminorm(f)",
                        lhs=abs(tripled.value - 3.0 * base.value),
                        rhs=1e-12 * max(1.0, base.value),
                    )
                )
    return checks, curves


# ---------------------------------------------------------------------------
# sandwich suite
# ---------------------------------------------------------------------------

def run_sandwich(cfg: SuiteConfig):
    checks: list[CheckReport] = []
    for entry in euclidean_corpus():
        prep = prepare_euclidean(cfg, entry)
        f = prep.f
        factor = sandwich_factor(f.dim)
        eps_grid = _eps_grid(cfg, f)
        for p in entry.p_values:
            tag = f"sandwich/{entry.name}/p{p:g}"
            oc = prep.omega_curve(p)
            certified = []  # per-eps certified lower bounds, reused below
            for i, eps in enumerate(eps_grid):
                eps = float(eps)
                upper = factor * omega_p(f, p, eps)
                # constructive certificate at matched lattice h
                k = max(1, int(eps / min(f.spacing)))
                h = [0.0] * f.dim
                h[0] = k * f.spacing[0]
                cval = sigma_constructive(f, p, h)
                half_shift = 0.5 * shift_diff_norm(
                    f, tuple(2 * o for o in snap_offsets(f, h)), p
                )
                checks.append(
                    check(
                        f"{tag}/eps{i:02d}/constructive-floor",
                        "constructive bound >= ||f_2h - f||_p / 2 at matched h",
                        lhs=half_shift,
                        rhs=cval,
                        tol=1e-8,
                    )
                )
                vval, cand = sigma_variational(f, p, eps, cfg.budget)
                certified.append(max(vval, cval))
                checks.append(
                    check(
                        f"{tag}/eps{i:02d}/lower-le-upper",
                        "certified sigma lower bounds <= 2(1+sqrt(n)+n)*omega(eps)",
                        lhs=max(vval, cval),
                        rhs=upper * (1.0 + cfg.sandwich_rel_tol),
                    )
                )
                checks.append(
                    check(
                        f"{tag}/eps{i:02d}/quality-gate",
                        "variational lower bound >= 0.9 * constructive bound",
                        lhs=0.9 * cval,
                        rhs=vval,
                        tol=1e-12,
                    )
                )
                if cand is not None:
                    checks.append(
                        check(
                            f"{tag}/eps{i:02d}/feasible",
                            "returned field satisfies both dual-norm budgets",
                            lhs=max(
                                cand.dual_q_norm_div - 1.0,
                                cand.dual_q_norm_field / cand.eps - 1.0,
                            ),
                            rhs=1e-9,
                        )
                    )
            # directional modulus never beats the full one (spot check)
            eps_mid = float(eps_grid[len(eps_grid) // 2])
            tilde = sigma_tilde_variational(
                f, p, eps_mid, tuple([1.0] + [0.0] * (f.dim - 1)), cfg.budget
            )
            vfull, _ = sigma_variational(f, p, eps_mid, cfg.budget)
            checks.append(
                check(
                    f"{tag}/tilde-le-sigma",
                    "sigma_tilde <= sigma on shared inputs",
                    lhs=tilde,
                    rhs=vfull,
                    tol=cfg.sandwich_rel_tol * tilde,
                )
            )
            # Besov functional chain on curves; the sigma lower curve reuses
            # the per-eps certificates (valid at larger scales by monotonicity)
            fnorm = lp_norm(f, p)
            tilde_vals = prep.tilde_lower_values(p)
            step_vals = np.zeros_like(prep.s_grid)
            for j, s in enumerate(prep.s_grid):
                idx = int(np.searchsorted(eps_grid, s, side="right")) - 1
                if idx >= 0:
                    step_vals[j] = max(certified[: idx + 1])
            sigma_lo = np.maximum(tilde_vals, step_vals)
            for alpha in cfg.alphas:
                for theta in cfg.thetas:
                    ttag = f"{tag}/a{alpha:g}-t{'inf' if math.isinf(theta) else f'{theta:g}'}"
                    base_shift = modulus_functional(
                        2.0 * prep.s_grid,
                        prep.omega_curve(p).values[8 : 8 + len(prep.s_grid)],
                        alpha,
                        theta,
                        large_sat=2.0 * fnorm,
                    )
                    v_tilde = modulus_functional(
                        prep.s_grid, tilde_vals, alpha, theta, large_sat=2.0 * fnorm
                    )
                    checks.append(
                        check(
                            f"{ttag}/chain-lower",
                            "V_tilde(lower curve) = 2^(alpha-1) * seminorm on the doubled grid",
                            lhs=abs(
                                v_tilde.value
                                - 2.0 ** (alpha - 1.0) * base_shift.value
                            ),
                            rhs=1e-9 * max(1.0, v_tilde.value),
                        )
                    )
                    v_lo = modulus_functional(
                        prep.s_grid, sigma_lo, alpha, theta, large_sat=2.0 * fnorm
                    )
                    checks.append(
                        check(
                            f"{ttag}/chain-middle",
                            "V_tilde <= V_sigma (pointwise curve domination)",
                            lhs=v_tilde.value,
                            rhs=v_lo.value,
                            tol=1e-12 * max(1.0, v_lo.value),
                        )
                    )
                    base = modulus_functional(
                        prep.s_grid,
                        prep.omega_values(p),
                        alpha,
                        theta,
                        large_sat=2.0 * fnorm,
                    )
                    checks.append(
                        check(
                            f"{ttag}/chain-upper",
                            "V_sigma(lower) <= 2(1+sqrt(n)+n) * seminorm",
                            lhs=v_lo.value,
                            rhs=factor * base.value,
                            tol=cfg.sandwich_rel_tol * factor * base.value,
                        )
                    )
    return checks


# ---------------------------------------------------------------------------
# embedding suite
# ---------------------------------------------------------------------------

def _masks_for(f: GridFunction):
    full = f.values != 0.0
    half = np.zeros_like(full)
    half[tuple(slice(0, s // 2) for s in f.shape)] = True
    half &= full
    strip = np.zeros_like(full)
    mid = f.shape[0] // 2
    strip[mid : mid + max(2, f.shape[0] // 20)] = True
    return {"support": full, "half": half, "strip": strip}


def run_embedding(cfg: SuiteConfig):
    checks: list[CheckReport] = []
    for entry in euclidean_corpus():
        p = 1.0  # corpus embedding regime: p in [1, n) or n = p = 1
        prep = prepare_euclidean(cfg, entry)
        f = prep.f
        tag = f"embedding/{entry.name}"
        sup_curve = sigma_upper_curve(prep.omega_curve(p), f.dim)
        for mask_name, mask in _masks_for(f).items():
            checks.append(
                emb.local_energy_check(
                    f, mask, p, sup_curve, label=f"{tag}/local-energy/{mask_name}"
                )
            )
        t_grid = np.geomspace(0.5, 50.0, 7)
        checks.extend(
            emb.tail_measure_check(f, p, t_grid, sup_curve, label=f"{tag}/tail-measure")
        )
        # closed-form superlevel oracle where the corpus registers it
        forms = entry.closed_forms
        if "superlevel_measure" in forms:
            worst = 0.0
            for s in (1.5, 2.0, 4.0):
                measured = float(np.sum(np.abs(f.values) >= s)) * f.cell_volume
                worst = max(worst, abs(measured - forms["superlevel_measure"](s)))
            checks.append(
                check(
                    f"{tag}/superlevel-oracle",
                    "grid superlevel measure matches the closed form",
                    lhs=worst,
                    rhs=6.0 * f.cell_volume ** (1.0 / f.dim),
                )
            )
        # Newtonian field feasibility and sigma-objective consistency
        peak = float(np.max(np.abs(f.values)))
        if peak > 0:
            u = GridFunction(f.spacing, f.origin, f.values / peak)
            cand = emb.newtonian_gradient_field(u, f.dim, p)
            bound = cand.eps
            checks.append(
                check(
                    f"{tag}/newtonian-norm",
                    "||grad potential||_q <= C(n,p) ||u||_1^(p/n)",
                    lhs=cand.dual_q_norm_field,
                    rhs=bound * (1.0 + 1e-6),
                )
            )
            checks.append(
                check(
                    f"{tag}/newtonian-divergence",
                    "interior L1 residual of div(Phi) = u below grid scale",
                    lhs=emb.div_residual(cand, u),
                    rhs=40.0 * max(u.spacing) * max(1.0, lp_norm(u, 1)),
                )
            )
            # the field is feasible at eps=bound, so its objective against f
            # cannot exceed the sandwich upper surrogate there
            div, fv = _common_values(cand.divergence, f)
            obj = float(np.sum(div * fv) * f.cell_volume)
            denom = max(cand.dual_q_norm_div, cand.dual_q_norm_field / bound)
            if denom > 0 and sup_curve.covers(bound):
                checks.append(
                    check(
                        f"{tag}/newtonian-objective",
                        "rescaled potential-field objective <= sigma_upper(C||u||_1^(p/n))",
                        lhs=obj / denom,
                        rhs=sup_curve.eval(bound) * (1.0 + cfg.sandwich_rel_tol),
                    )
                )
        # weight-function embeddings
        if np.any(f.values):
            U_lin = emb.MonotoneWeight(lambda t: np.asarray(t, dtype=float))
            checks.append(
                emb.ulyanov_LU_check(f, p, U_lin, 1.0, sup_curve, label=f"{tag}/LU-linear")
            )
            U_log = emb.MonotoneWeight(lambda t: np.log1p(np.asarray(t, dtype=float)))
            checks.append(
                emb.ulyanov_LU_check(f, p, U_log, 1.0, sup_curve, label=f"{tag}/LU-log")
            )
            U_pow = emb.MonotoneWeight(
                lambda t: np.asarray(t, dtype=float) ** p,
                strictly_increasing=True,
                zero_at_zero=True,
                growth=(1.0, 1.0),
            )
            main, cov = emb.ulyanov_U_check(
                f, p, U_pow, 1.0, sup_curve, label=f"{tag}/U-power"
            )
            checks.extend([main, cov])
            U_sat = emb.MonotoneWeight(
                lambda t: np.asarray(t, dtype=float) ** (p + 1)
                / (1.0 + np.asarray(t, dtype=float)),
                strictly_increasing=True,
                zero_at_zero=True,
                growth=(1.0, 1.0),
            )
            main2, cov2 = emb.ulyanov_U_check(
                f, p, U_sat, 1.0, sup_curve, label=f"{tag}/U-saturating"
            )
            checks.extend([main2, cov2])
    # dimension constants
    for n, want in ((1, 2.0), (2, 2.0 * math.pi), (3, 4.0 * math.pi)):
        checks.append(
            check(
                f"embedding/sphere-area/n{n}",
                "nu_n equals its closed form",
                lhs=abs(emb.unit_sphere_area(n) - want),
                rhs=0.0,
            )
        )
    return checks


def _common_values(g1: GridFunction, g2: GridFunction):
    from .grids import values_on_common_grid

    return values_on_common_grid(g1, g2)


# ---------------------------------------------------------------------------
# gaussian suite
# ---------------------------------------------------------------------------

def run_gaussian(cfg: SuiteConfig):
    checks: list[CheckReport] = []
    t_grid = np.geomspace(0.05, 3.0, cfg.t_points)
    for entry in gaussian_corpus():
        f = entry.build(cfg)
        n = entry.dim
        tag = f"gaussian/{entry.name}"
        m_norm = cfg.hermite_order(n)
        # OU semigroup law through the exact coefficient path
        fc = f if f.coeffs is not None else None
        if fc is not None:
            t1, t2 = 0.3, 0.7
            lhs_fun = gs.ou_semigroup(gs.ou_semigroup(fc, t1), t2)
            rhs_fun = gs.ou_semigroup(fc, t1 + t2)
            checks.append(
                check(
                    f"{tag}/ou-law",
                    "T_s T_t f = T_(s+t) f at the nodes",
                    lhs=float(np.max(np.abs(lhs_fun.values - rhs_fun.values))),
                    rhs=1e-8 * max(1.0, float(np.max(np.abs(f.values)))),
                )
            )
            one = gs.constant_function(f.grid)
            t_one = gs.ou_semigroup(one, 0.5)
            checks.append(
                check(
                    f"{tag}/ou-unit",
                    "T_t 1 = 1 exactly",
                    lhs=float(np.max(np.abs(t_one.values - 1.0))),
                    rhs=0.0,
                )
            )
        for p in entry.p_values:
            for t in (0.1, 0.5, 1.0):
                tt = gs.ou_semigroup(f, t)
                checks.append(
                    check(
                        f"{tag}/ou-contraction/p{p:g}-t{t:g}",
                        "||T_t f||_p <= ||f||_p",
                        lhs=tt.lp_norm(p, m=m_norm),
                        rhs=f.lp_norm(p, m=m_norm),
                        tol=1e-8 * max(1.0, f.lp_norm(p, m=m_norm)),
                    )
                )
                if p > 1:
                    checks.append(
                        gs.hypercontractivity_check(
                            f, p, t, m=m_norm, label=f"{tag}/hyper/p{p:g}-t{t:g}"
                        )
                    )
        # closed-form shift modulus
        if "a_gamma" in entry.closed_forms:
            worst = 0.0
            for t in t_grid:
                worst = max(
                    worst,
                    abs(gs.a_gamma(f, 2.0, float(t)) - entry.closed_forms["a_gamma"](2.0, float(t))),
                )
            checks.append(
                check(
                    f"{tag}/a-gamma-closed-form",
                    "quadrature a_gamma matches the eigen closed form",
                    lhs=worst,
                    rhs=1e-8,
                )
            )
        # both directions of the two-sided comparison, p > 1 entries
        p = max(entry.p_values)
        eps_grid = np.geomspace(0.1, 1.5, 6)
        lower_curve = gs.sigma_gamma_lower_curve(
            f, p, eps_grid, budget=cfg.gaussian_budget, K=cfg.degree(n), m=m_norm
        )
        if p > 1:
            for i, t in enumerate(np.geomspace(0.1, 2.0, 5)):
                checks.append(
                    gs.a_gamma_upper_via_sigma(
                        f, p, float(t), lower_curve, label=f"{tag}/sandwich-a/t{i}"
                    )
                )
            upper_curve = gs.sigma_gamma_upper_curve(f, p, eps_grid, m=m_norm)
            for i, eps in enumerate(eps_grid):
                checks.append(
                    check(
                        f"{tag}/sandwich-sigma/eps{i}",
                        "sigma_gamma lower bound <= (1+C(q))*a_gamma(f, eps^2)",
                        lhs=lower_curve.values[i],
                        rhs=float(upper_curve.values[i]) * (1.0 + cfg.sandwich_rel_tol),
                    )
                )
            # V/A equivalence on matched grids
            a_curve = gs.a_gamma_curve(f, p, eps_grid**2, m=m_norm)
            params = BesovParams(0.5, p, 2.0)
            fnorm = f.lp_norm(p, m=m_norm)
            _, _, eq_checks = gs.gaussian_besov_functionals(
                {"a": a_curve, "sigma_upper": upper_curve, "sigma_lower": lower_curve},
                params,
                f_norm=fnorm,
            )
            for c in eq_checks:
                c.id = f"{tag}/{c.id}"
            checks.extend(eq_checks)
    # Lipschitz composition and the log-Sobolev embedding on 1-d entries
    ent = {e.name: e for e in gaussian_corpus()}
    for name, p, theta, alpha, beta in (
        ("h1_1d", 2.0, 2.0, 0.8, 0.4),
        ("ramp_1d", 2.0, 2.0, 0.8, 0.4),
        ("h1_1d", 2.0, math.inf, 0.5, 0.25),
        ("trunc_power_1d", 2.0, math.inf, 0.5, 0.25),
        ("h1_1d", 3.0, 1.0, 0.9, 0.3),
        ("poly_square_1d", 3.0, 1.0, 0.9, 0.3),
    ):
        entry = ent[name]
        f = entry.build(cfg)
        m_norm = cfg.hermite_order(entry.dim)
        r_grid = np.geomspace(0.08, 4.0, 25)
        up = gs.sigma_gamma_upper_curve(f, p, r_grid, m=m_norm)
        V_up = modulus_functional(
            r_grid, up.values, alpha, theta, large_sat=2.0 * f.lp_norm(p, m=m_norm)
        )
        label = (
            f"gaussian/{name}/log-sobolev/"
            f"p{p:g}-th{'inf' if math.isinf(theta) else f'{theta:g}'}-a{alpha:g}-b{beta:g}"
        )
        checks.append(
            gs.log_sobolev_embedding_check(
                f, p, theta, alpha, beta, V_up.value, m=m_norm, label=label
            )
        )
        params = BesovParams(alpha, p, theta)
        checks.append(
            gs.lipschitz_composition_check(
                f,
                lambda s: np.maximum(s, 0.0),
                1.0,
                p,
                0.5,
                params,
                V_up.value,
                label=f"gaussian/{name}/lipschitz-relu",
            )
        )
    return checks


# ---------------------------------------------------------------------------
# chaos suite
# ---------------------------------------------------------------------------

def run_chaos(cfg: SuiteConfig):
    checks: list[CheckReport] = []
    for entry in gaussian_corpus():
        f = entry.build(cfg)
        n = entry.dim
        tag = f"chaos/{entry.name}"
        if entry.polynomial and f.coeffs is not None:
            K = max(s - 1 for s in f.coeffs.shape) + 1
        else:
            K = cfg.degree(n)
        K = min(K, f.grid.m - 1)
        dec = chaos_mod.chaos_decompose(f, K)
        norm_sq = f.lp_norm(2) ** 2
        if entry.polynomial:
            checks.append(
                check(
                    f"{tag}/parseval",
                    "sum of squared coefficients equals ||f||_2^2",
                    lhs=abs(dec.parseval_defect),
                    rhs=1e-8 * max(norm_sq, 1e-300),
                )
            )
        else:
            checks.append(
                check(
                    f"{tag}/bessel",
                    "captured energy never exceeds ||f||_2^2",
                    lhs=-dec.parseval_defect,
                    rhs=1e-10 * max(norm_sq, 1.0),
                    tail_flags=(f"parseval defect {dec.parseval_defect:.3e} is tail energy",),
                )
            )
        approx = [chaos_mod.best_approx(dec, N).value for N in range(1, K + 2)]
        checks.append(
            check(
                f"{tag}/best-approx-monotone",
                "E_N nonincreasing in N",
                lhs=float(np.max(np.diff(approx), initial=0.0)),
                rhs=1e-12,
            )
        )
        for N in range(1, cfg.chaos_n_max + 1):
            rep = chaos_mod.jackson_stechkin_check(
                f, N, dec=dec, label=f"{tag}/jackson/N{N:02d}"
            )
            checks.append(rep)
    ok, worst = chaos_mod.beta_bound_margin(cfg.beta_n_max)
    checks.append(
        check(
            "chaos/beta-bound",
            "B((N+1)/2, 1/2) <= sqrt(2pi/N) for N up to the configured cap",
            lhs=worst,
            rhs=1.0,
        )
    )
    ok, worst = chaos_mod.gamma_ratio_bound_margin(np.geomspace(0.5, 5000.0, 400))
    checks.append(
        check(
            "chaos/gamma-ratio-bound",
            "Gamma(x+1/2)/Gamma(x) <= sqrt(x)",
            lhs=worst,
            rhs=1.0,
        )
    )
    ok, worst = chaos_mod.grad_ou_eigen_margin(64, np.geomspace(0.05, 3.0, 9))
    checks.append(
        check(
            "chaos/grad-ou-eigen",
            "sqrt(k) e^{-kt} <= e^{-t} (1-e^{-2t})^{-1/2} on Hermite layers",
            lhs=worst,
            rhs=1.0,
        )
    )
    return checks


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

_RUNNERS = {
    "moduli": lambda cfg: run_moduli(cfg)[0],
    "sandwich": run_sandwich,
    "embedding": run_embedding,
    "gaussian": run_gaussian,
    "chaos": run_chaos,
}


def collect_checks(cfg: SuiteConfig):
    """Run the configured suite(s); numerical failures become error reports."""
    names = list(_RUNNERS) if cfg.suite == "all" else [cfg.suite]
    checks: list[CheckReport] = []
    curves: dict[str, ModulusCurve] = {}
    for name in names:
        try:
            if name == "moduli":
                got, cur = run_moduli(cfg)
                curves.update(cur)
            else:
                got = _RUNNERS[name](cfg)
            checks.extend(got)
        except BesovLabError as exc:
            checks.append(error_report(f"{name}/runner", "suite execution", str(exc)))
    return checks, curves


def run_suite(cfg: SuiteConfig, out_dir: str, strict: bool = False) -> int:
    checks, curves = collect_checks(cfg)
    os.makedirs(out_dir, exist_ok=True)
    write_report(os.path.join(out_dir, "report.json"), cfg.suite, cfg.resolved(), checks)
    write_summary_csv(os.path.join(out_dir, "summary.csv"), checks)
    if curves:
        curve_dir = os.path.join(out_dir, "curves")
        os.makedirs(curve_dir, exist_ok=True)
        for name in sorted(curves):
            emit_curve_data(curves[name], os.path.join(curve_dir, f"{name}.csv"))
    return 0 if aggregate_verdict(checks, strict=strict) else 1
