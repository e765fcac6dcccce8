"""Configuration ingestion, check orchestration, and report emission.

A run is reproducible from one JSON config: toric data, sampling parameters,
derivative mode, tolerances, and the ordered list of checks.  Reports carry
the full numerics; stdout gets a one-line summary per check.  Exit codes:
0 all checks pass, 1 at least one failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import ad
from .chart import ChartPoint, cone_chart, sample_points, t11_chart
from .exterior import add_forms, scale_form
from .killing import (COMPONENT_DESCRIPTIONS, all_candidates, cone_lift,
                      contact_form_t11, extract_base_form, fit_global_scale,
                      holomorphic_volume_form, re_im_psi_closed_forms,
                      stackel_matrix_fast)
from .metric import cone_metric, einstein_residual, t11_metric
from .potential import (SymplecticPotential, complex_coords_t11, eval_G,
                        grad_G, hessian_G, legendre_F, reeb_search)
from .report import ResidualReport, from_samples
from .toric import (ToricData, UnimodularTransform, apply_transform,
                    conifold_toric_data, facet_functions, in_cone_interior,
                    is_gorenstein, momentum_map_t11, transform_momentum)
from .verify import (cky_residual, conserved_quantity_drift,
                     display_diagnostics, kahler_checks,
                     killing_yano_residual, parallel_residual,
                     special_killing_fit, surviving_trajectories)

__all__ = ["RunConfig", "RunReport", "ConfigError", "parse_config", "run",
           "emit_forms", "main", "CHECK_NAMES", "default_config"]

REPORT_VERSION = "1.0"

CHECK_NAMES = (
    "einstein",
    "kahler",
    "killing-yano",
    "cky",
    "special-killing",
    "parallel",
    "legendre",
    "ricci-flat-potential",
    "momentum",
    "gorenstein",
    "reeb-search",
    "geodesic",
    "paper-displays",
)


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    normals: tuple[tuple[int, ...], ...]
    reeb: tuple[float, ...] | str  # explicit vector or "search"
    points: int = 100
    potential_points: int = 200
    seed: int = 42
    theta_margin: float = 0.2
    r_range: tuple[float, float] = (0.5, 2.0)
    mode: str = "analytic"
    fd_step: float = 1e-5
    checks: tuple[str, ...] = CHECK_NAMES
    tolerances: dict = field(default_factory=dict)
    geodesic_t_end: float = 10.0
    geodesic_dt: float = 1e-3
    geodesic_trajectories: int = 5
    debug_round_coeff: float | None = None

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    def to_dict(self) -> dict:
        return {
            "toric": {"normals": [list(v) for v in self.normals],
                      "reeb": (self.reeb if isinstance(self.reeb, str)
                               else list(self.reeb))},
            "sampling": {"points": self.points,
                         "potential_points": self.potential_points,
                         "seed": self.seed,
                         "theta_margin": self.theta_margin,
                         "r_range": list(self.r_range)},
            "derivatives": {"mode": self.mode, "fd_step": self.fd_step},
            "tolerances": dict(sorted(self.tolerances.items())),
            "checks": list(self.checks),
            "geodesic": {"t_end": self.geodesic_t_end,
                         "dt": self.geodesic_dt,
                         "trajectories": self.geodesic_trajectories},
            "debug": {"round_coeff": self.debug_round_coeff},
        }


def default_config(**overrides) -> RunConfig:
    _, normalized, _ = conifold_toric_data()
    base = dict(normals=normalized.normals, reeb=normalized.reeb)
    base.update(overrides)
    return RunConfig(**base)


def parse_config(doc: dict) -> RunConfig:
    """Validate a JSON config document; unknown checks are rejected."""
    try:
        toric = doc.get("toric", {})
        _, normalized, _ = conifold_toric_data()
        normals = tuple(tuple(int(c) for c in v)
                        for v in toric.get("normals", normalized.normals))
        reeb = toric.get("reeb", list(normalized.reeb))
        if isinstance(reeb, str):
            if reeb != "search":
                raise ConfigError(f"reeb must be a vector or 'search', "
                                  f"got {reeb!r}")
        else:
            reeb = tuple(float(x) for x in reeb)
        sampling = doc.get("sampling", {})
        points = int(sampling.get("points", 100))
        if points < 1:
            raise ConfigError("sampling.points must be >= 1")
        derivatives = doc.get("derivatives", {})
        mode = derivatives.get("mode", "analytic")
        if mode not in ("analytic", "fd"):
            raise ConfigError(f"unknown derivative mode {mode!r}")
        fd_step = float(derivatives.get("fd_step", 1e-5))
        if fd_step <= 0:
            raise ConfigError("derivatives.fd_step must be positive")
        checks = tuple(doc.get("checks", CHECK_NAMES))
        unknown = [c for c in checks if c not in CHECK_NAMES]
        if unknown:
            raise ConfigError(f"unknown checks: {unknown}")
        tolerances = {str(k): float(v)
                      for k, v in doc.get("tolerances", {}).items()}
        geod = doc.get("geodesic", {})
        debug = doc.get("debug", {})
        rr = sampling.get("r_range", [0.5, 2.0])
        return RunConfig(
            normals=normals, reeb=reeb, points=points,
            potential_points=int(sampling.get("potential_points", 200)),
            seed=int(sampling.get("seed", 42)),
            theta_margin=float(sampling.get("theta_margin", 0.2)),
            r_range=(float(rr[0]), float(rr[1])),
            mode=mode, fd_step=fd_step, checks=checks, tolerances=tolerances,
            geodesic_t_end=float(geod.get("t_end", 10.0)),
            geodesic_dt=float(geod.get("dt", 1e-3)),
            geodesic_trajectories=int(geod.get("trajectories", 5)),
            debug_round_coeff=(None if debug.get("round_coeff") is None
                               else float(debug["round_coeff"])),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc


class Environment:
    """Lazily built geometry shared by the checks of one run."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.base_chart = t11_chart(config.theta_margin)
        round_coeff = (config.debug_round_coeff
                       if config.debug_round_coeff is not None else 1.0 / 6.0)
        self.g_base = t11_metric(self.base_chart, round_coeff=round_coeff)
        self.g_cone = cone_metric(self.g_base, config.r_range)
        self.cone_chart = self.g_cone.chart
        self.base_points = sample_points(self.base_chart, config.points,
                                         config.seed)
        self.cone_points = sample_points(self.cone_chart, config.points,
                                         config.seed + 1)
        self.candidates = {c.label: c for c in
                           all_candidates(self.base_chart)}
        raw, normalized, transform = conifold_toric_data()
        self.toric_raw = raw
        self.transform = transform
        self.toric = ToricData(len(config.normals[0]), config.normals,
                               reeb=(None if isinstance(config.reeb, str)
                                     else config.reeb))
        self._momenta = None

    @property
    def momenta(self):
        if self._momenta is None:
            n = self.config.potential_points
            pts = sample_points(self.cone_chart, n, self.config.seed + 2)
            self._momenta = [momentum_map_t11(p, "transformed") for p in pts]
        return self._momenta

    def potential(self) -> SymplecticPotential:
        td = self.toric
        if td.reeb is None:
            reeb, _, _ = reeb_search(td, seed=self.config.seed)
            td = ToricData(td.n, td.normals, reeb=tuple(reeb))
        return SymplecticPotential(td)


def _check_einstein(env: Environment) -> list[ResidualReport]:
    cfg = env.config
    r1 = einstein_residual(env.g_base, 4.0, env.base_points,
                           tolerance=cfg.tolerance("einstein", 1e-7))
    r2 = einstein_residual(env.g_cone, 0.0, env.cone_points,
                           tolerance=cfg.tolerance("einstein_cone", 1e-6))
    r1.check = "einstein.base"
    r2.check = "einstein.cone"
    return [r1, r2]


def _check_kahler(env: Environment) -> list[ResidualReport]:
    cfg = env.config
    tol = {"j_squared": cfg.tolerance("kahler_j_squared", 1e-10),
           "parallel": cfg.tolerance("kahler_parallel", 1e-6),
           "compat": cfg.tolerance("kahler_compat", 1e-10),
           "display": cfg.tolerance("kahler_display", 1e-10)}
    return kahler_checks(env.g_base, env.g_cone, env.cone_points, tol)


def _check_killing_yano(env: Environment) -> list[ResidualReport]:
    tol = env.config.tolerance("killing_yano", 1e-7)
    return [killing_yano_residual(env.g_base, env.candidates[lbl].form,
                                  env.base_points, tolerance=tol)
            for lbl in ("eta", "Psi1", "Psi2", "RePsi", "ImPsi")]


def _check_cky(env: Environment) -> list[ResidualReport]:
    from .exterior import exterior_derivative
    cfg = env.config
    tol = cfg.tolerance("cky", 1e-7)
    tol_closed = cfg.tolerance("closedness", 1e-9)
    out = []
    for lbl in ("Phi1", "Phi2"):
        form = env.candidates[lbl].form
        out.append(cky_residual(env.g_base, form, env.base_points,
                                tolerance=tol))
        if form.degree < form.chart.dim:
            d = exterior_derivative(form)
            closed = [max((abs(v) for v in d.at(p).values()), default=0.0)
                      for p in env.base_points]
        else:
            closed = [0.0]
        out.append(from_samples(f"closedness({lbl})", closed, tol_closed,
                                n_points=len(env.base_points)))
    return out


def _check_special_killing(env: Environment) -> list[ResidualReport]:
    tol = env.config.tolerance("special_killing_c_std", 1e-6)
    return [special_killing_fit(env.g_base, env.candidates[lbl].form,
                                env.base_points, c_std_tolerance=tol)
            for lbl in ("eta", "Psi1", "Psi2", "RePsi", "ImPsi")]


def _check_parallel(env: Environment) -> list[ResidualReport]:
    cfg = env.config
    tol = cfg.tolerance("parallel", 1e-6)
    out = []
    for lbl in ("eta", "Psi1", "Psi2", "RePsi", "ImPsi"):
        lift = cone_lift(env.candidates[lbl].form, env.cone_chart)
        out.append(parallel_residual(env.g_cone, lift, env.cone_points,
                                     tolerance=tol))
    omega = holomorphic_volume_form(env.cone_chart)
    rep = parallel_residual(env.g_cone, omega, env.cone_points, tolerance=tol)
    rep.check = "parallel(Omega)"
    out.append(rep)

    # extraction against the explicit 2-form tables, one global scale
    extracted = extract_base_form(omega)
    re_psi, im_psi = re_im_psi_closed_forms(env.base_chart)
    target = add_forms(re_psi, scale_form(im_psi, 1j), label="RePsi+i*ImPsi")
    scale, resid = fit_global_scale(extracted, target, env.base_points)
    tol_fit = cfg.tolerance("extraction_fit", 1e-9)
    out.append(ResidualReport(
        check="extraction_fit(Omega)", n_points=len(env.base_points),
        max_abs=resid, mean_abs=0.0, passed=resid < tol_fit,
        tolerance=tol_fit,
        fitted={"scale_re": scale.real, "scale_im": scale.imag}))
    return out


def _check_legendre(env: Environment) -> list[ResidualReport]:
    cfg = env.config
    sp = env.potential()
    b = np.asarray(sp.td.reeb)
    momenta = env.momenta
    reeb_res, dual_res, inv_res = [], [], []
    for y in momenta:
        g, f = hessian_G(sp, y)
        reeb_res.append(np.max(np.abs(2.0 * g @ y - b)))
        inv_res.append(np.max(np.abs(f @ g - np.eye(sp.td.n))))
        fval, x = legendre_F(sp, y)
        dual_res.append(abs(fval + eval_G(sp, y) - float(np.dot(x, y))))
    n = len(momenta)
    out = [
        from_samples("legendre.reeb_relation", reeb_res,
                     cfg.tolerance("reeb_relation", 1e-9), n),
        from_samples("legendre.duality", dual_res,
                     cfg.tolerance("legendre_duality", 1e-12), n),
        from_samples("legendre.hessian_inverse", inv_res,
                     cfg.tolerance("hessian_inverse", 1e-10), n),
    ]

    # complex coordinates differ from grad G by a constant vector
    diffs = []
    for p in env.cone_points:
        y = momentum_map_t11(p, "transformed")
        diffs.append(np.real(complex_coords_t11(p)) - grad_G(sp, y))
    diffs = np.asarray(diffs)
    spread = np.abs(diffs - diffs.mean(axis=0))
    rep = from_samples("legendre.coords_agreement", spread.max(axis=1),
                       cfg.tolerance("coords_agreement", 1e-9),
                       len(env.cone_points))
    for i in range(diffs.shape[1]):
        rep.fitted[f"constant_{i + 1}"] = float(diffs[:, i].mean())
    out.append(rep)
    return out


def _check_ricci_flat_potential(env: Environment) -> list[ResidualReport]:
    from .potential import ricci_flat_residual
    sp = env.potential()
    rep = ricci_flat_residual(sp, env.momenta,
                              tolerance=env.config.tolerance(
                                  "ricci_flat_constancy", 1e-8))
    return [rep]


def _check_momentum(env: Environment) -> list[ResidualReport]:
    cfg = env.config
    td = env.toric
    image_ok = []
    pairing = []
    half_r2 = []
    for p in env.cone_points:
        y = momentum_map_t11(p, "transformed")
        y_orig = momentum_map_t11(p, "original")
        image_ok.append(0.0 if in_cone_interior(td, y) else 1.0)
        b_new = np.asarray(env.transform.array @ np.asarray(
            env.toric_raw.reeb))
        pairing.append(abs(float(np.dot(env.toric_raw.reeb, y_orig))
                           - float(np.dot(b_new, y))))
        r = p.coord("r")
        half_r2.append(abs(float(np.dot(b_new, y)) - 0.5 * r * r))
    n = len(env.cone_points)
    return [
        from_samples("momentum.image_interior", image_ok, 0.5, n),
        from_samples("momentum.pairing_invariance", pairing,
                     cfg.tolerance("pairing", 1e-12), n),
        from_samples("momentum.reeb_pairing_r2", half_r2,
                     cfg.tolerance("pairing", 1e-12), n),
    ]


def _check_gorenstein(env: Environment) -> list[ResidualReport]:
    raw, normalized, transform = (env.toric_raw,
                                  apply_transform(env.transform,
                                                  env.toric_raw),
                                  env.transform)
    _, reference, _ = conifold_toric_data()
    mismatch = max(
        max(abs(a - b) for a, b in zip(va, vb))
        for va, vb in zip(normalized.normals, reference.normals))
    gor = is_gorenstein(normalized)
    return [ResidualReport(
        check="gorenstein.normalization", n_points=len(reference.normals),
        max_abs=float(mismatch), mean_abs=0.0,
        passed=(mismatch == 0 and gor), tolerance=0.5,
        fitted={"is_gorenstein": 1.0 if gor else 0.0})]


def _check_reeb_search(env: Environment) -> list[ResidualReport]:
    cfg = env.config
    reeb, objective, iterations = reeb_search(
        ToricData(env.toric.n, env.toric.normals), seed=cfg.seed)
    _, reference, _ = conifold_toric_data()
    err = float(np.max(np.abs(reeb - np.asarray(reference.reeb))))
    tol = cfg.tolerance("reeb_recovery", 1e-4)
    tol_obj = cfg.tolerance("reeb_objective", 1e-12)
    return [ResidualReport(
        check="reeb-search", n_points=len(env.momenta), max_abs=err,
        mean_abs=0.0, passed=(err < tol and objective < tol_obj),
        tolerance=tol,
        fitted={"reeb_found_1": float(reeb[0]), "reeb_found_2": float(reeb[1]),
                "reeb_found_3": float(reeb[2]), "objective": objective,
                "iterations": float(iterations)})]


def _check_geodesic(env: Environment) -> list[ResidualReport]:
    cfg = env.config
    g = env.g_base
    trajs = surviving_trajectories(g, cfg.geodesic_trajectories, cfg.seed,
                                   cfg.geodesic_t_end, cfg.geodesic_dt)
    tol_e = cfg.tolerance("geodesic_energy", 1e-8)
    tol_q = cfg.tolerance("geodesic_qk", 1e-6)
    energy = []
    for traj in trajs:
        e = traj.energies()
        energy.append(float(np.max(np.abs(e - e[0])) / abs(e[0])))
    out = [from_samples("geodesic.energy_drift", energy, tol_e, len(trajs))]

    re_psi, im_psi = re_im_psi_closed_forms(env.base_chart)
    psi1 = env.candidates["Psi1"].form
    pairs = {"RePsi,RePsi": (re_psi, re_psi),
             "RePsi,ImPsi": (re_psi, im_psi),
             "ImPsi,ImPsi": (im_psi, im_psi),
             "Psi1,Psi1": (psi1, psi1)}
    for name, (a, b) in pairs.items():
        drifts = [conserved_quantity_drift(
            lambda pt: stackel_matrix_fast(a, b, g, pt), traj,
            tolerance=tol_q, label=name).max_abs for traj in trajs]
        out.append(from_samples(f"geodesic.Q({name})", drifts, tol_q,
                                len(trajs)))

    # integrator order: drift ratio across dt, dt/2 near 16
    p0, v0 = (trajs[0].point(0),
              trajs[0].velocities[0])
    ratios = []
    prev = None
    for dt in (4 * cfg.geodesic_dt, 2 * cfg.geodesic_dt, cfg.geodesic_dt):
        from .verify import geodesic_flow
        tr = geodesic_flow(g, p0, v0, cfg.geodesic_t_end, dt)
        e = tr.energies()
        d = float(np.max(np.abs(e - e[0])) / abs(e[0]))
        if prev is not None:
            ratios.append(prev / d)
        prev = d
    order_ok = all(8.0 <= rr <= 32.0 for rr in ratios)
    out.append(ResidualReport(
        check="geodesic.integrator_order", n_points=2,
        max_abs=float(max(abs(rr - 16.0) for rr in ratios)),
        mean_abs=0.0, passed=order_ok, tolerance=16.0,
        fitted={"ratio_4dt_2dt": ratios[0], "ratio_2dt_dt": ratios[1]}))
    return out


def _check_paper_displays(env: Environment) -> list[ResidualReport]:
    return display_diagnostics(seed=env.config.seed + 7)


CHECK_REGISTRY = {
    "einstein": _check_einstein,
    "kahler": _check_kahler,
    "killing-yano": _check_killing_yano,
    "cky": _check_cky,
    "special-killing": _check_special_killing,
    "parallel": _check_parallel,
    "legendre": _check_legendre,
    "ricci-flat-potential": _check_ricci_flat_potential,
    "momentum": _check_momentum,
    "gorenstein": _check_gorenstein,
    "reeb-search": _check_reeb_search,
    "geodesic": _check_geodesic,
    "paper-displays": _check_paper_displays,
}


@dataclass
class RunReport:
    config: RunConfig
    results: list
    seconds: dict
    overall_pass: bool

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "config": self.config.to_dict(),
            "results": [dict(r.to_dict(), seconds=self.seconds[i])
                        for i, r in enumerate(self.results)],
            "overall_pass": self.overall_pass,
        }


def run(config: RunConfig, log=print) -> RunReport:
    """Execute the configured checks in order; per-check errors are recorded
    and the run continues."""
    env = Environment(config)
    results: list[ResidualReport] = []
    seconds: dict[int, float] = {}
    with ad.derivative_mode(config.mode, config.fd_step):
        for name in config.checks:
            fn = CHECK_REGISTRY[name]
            t0 = time.perf_counter()
            try:
                reports = fn(env)
            except Exception as exc:  # recorded, run continues
                reports = [ResidualReport(
                    check=f"{name}.error", n_points=0, max_abs=float("inf"),
                    mean_abs=0.0, passed=False, tolerance=None,
                    note=f"{type(exc).__name__}: {exc}")]
            dt = time.perf_counter() - t0
            for r in reports:
                seconds[len(results)] = round(dt / len(reports), 3)
                results.append(r)
                if log is not None:
                    status = "pass" if r.passed else "FAIL"
                    log(f"[{status}] {r.check:34s} max={r.max_abs:.3e} "
                        f"n={r.n_points}")
    overall = all(r.passed for r in results)
    return RunReport(config=config, results=results, seconds=seconds,
                     overall_pass=overall)


# ---------------------------------------------------------------------------
# Component emission.

_PRESENTATION_ORDER = ("theta1", "theta2", "phi1", "phi2", "psi_angle")


def _presentation_key(chart, indices):
    names = [chart.coords[i] for i in indices]
    order = {n: k for k, n in enumerate(_PRESENTATION_ORDER)}
    ranked = sorted(names, key=lambda n: order.get(n, -1))
    perm = [names.index(n) for n in ranked]
    # sign of the permutation that moves canonical order to presentation order
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    label = "^".join("d" + n.replace("psi_angle", "psi") for n in ranked)
    return label, sign


def emit_forms(points: list[ChartPoint]) -> dict:
    """Numeric component tables of the seven candidates at given points,
    plus their fixed symbolic coefficient strings."""
    if not points:
        raise ValueError("need at least one point")
    chart = points[0].chart
    cands = all_candidates(chart)
    tables = []
    for p in points:
        entry = {"point": {name: v for name, v in
                           zip(chart.coords, p.values)}, "forms": {}}
        for cand in cands:
            comps = {}
            for key, val in sorted(cand.form.at(p).items()):
                if abs(val) < 1e-15:
                    continue
                label, sign = _presentation_key(chart, key)
                comps[label] = {"re": float(np.real(sign * val)),
                                "im": float(np.imag(sign * val))}
            entry["forms"][cand.label] = comps
        tables.append(entry)
    return {"version": REPORT_VERSION,
            "descriptions": COMPONENT_DESCRIPTIONS,
            "points": tables}


# ---------------------------------------------------------------------------
# Entry point.

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="killingforms",
        description="Pointwise verification of the toric-data-to-Killing-"
                    "forms pipeline on T(1,1) and its cone.")
    ap.add_argument("--config", type=str, help="JSON config file")
    ap.add_argument("--check", action="append", default=None,
                    help="run only this check (repeatable, ordered)")
    ap.add_argument("--points", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--mode", choices=("analytic", "fd"), default=None)
    ap.add_argument("--report", type=str, default=None,
                    help="write the JSON report here")
    ap.add_argument("--emit-forms", action="store_true",
                    help="print component tables of the candidate forms")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = {}
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        config = parse_config(doc)
        overrides = {}
        if args.check:
            unknown = [c for c in args.check if c not in CHECK_NAMES]
            if unknown:
                raise ConfigError(f"unknown checks: {unknown}")
            overrides["checks"] = tuple(args.check)
        if args.points is not None:
            if args.points < 1:
                raise ConfigError("points must be >= 1")
            overrides["points"] = args.points
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.mode is not None:
            overrides["mode"] = args.mode
        if overrides:
            from dataclasses import replace
            config = replace(config, **overrides)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.emit_forms:
        pts = sample_points(t11_chart(config.theta_margin), 3, config.seed)
        print(json.dumps(emit_forms(pts), indent=2, sort_keys=True))
        return 0

    report = run(config)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
    print("overall:", "pass" if report.overall_pass else "FAIL")
    return 0 if report.overall_pass else 1


if __name__ == "__main__":
    main()
