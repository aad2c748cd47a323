"""Pipeline stages and artifact emission.

Stages run in order solve -> verify -> linearize -> extend -> report,
each writing its artifacts into the output directory.  A stage filter
restricts which artifacts are written; prerequisite computations still
run in memory.  Exit codes identify the first failing stage:

    0  every executed verification passed
    1  configuration error
    2  solve: the fixed-point iteration did not reach tolerance
    3  verify: a qualitative ground-state check failed
    4  linearize: the kernel-structure check failed (or too few sectors)
    5  extend: a halfspace-form diagnostic failed
    6  report: artifact emission failed

Artifacts are deterministic: sorted JSON keys, shortest-round-trip
decimal floats, seeded randomness, metadata-stripped PNGs.  Running the
same configuration twice reproduces the directory byte for byte.

The linearization stage works on a companion solve with the radial
cutoff reduced to 200 (when the configured cutoff is larger): the
translation zero mode is resolved best when the grid spacing is small,
and the sector spectra converge in the cutoff much faster than the
Fourier-positivity checks, which need the larger box.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import figures
from .artifacts import (
    ProfileRecord,
    save_profile,
    write_json,
    write_series,
)
from .config import RunConfig, config_hash
from .errors import BosonlabError, InsufficientSectors, NoCrossing, NotConverged
from .extension import (
    TGrid,
    contradiction_functional,
    form_minimize,
    harmonicity_defect,
    poisson_extend,
    quadratic_form,
)
from .ground_state import SolverConfig, solve_ground_state, verify_qualitative
from .linearization import assemble_L_plus, nondegeneracy_check, spectrum, spectral_derivative
from .potentials import canonical_rescale
from .radial import forward_transform, mass

STAGES = ("solve", "verify", "linearize", "extend", "report")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVE = 2
EXIT_VERIFY = 3
EXIT_LINEARIZE = 4
EXIT_EXTEND = 5
EXIT_REPORT = 6

LINEARIZE_R_MAX = 200.0


def _solver_config(cfg: RunConfig, **overrides) -> SolverConfig:
    base = dict(
        n=cfg.grid_n,
        r_max=cfg.grid_r_max,
        init=cfg.solver_init,
        init_param=cfg.solver_init_param,
        tol=cfg.solver_tol,
        max_iter=cfg.solver_max_iter,
        relaxation=cfg.solver_relaxation,
        seed=cfg.solver_seed,
    )
    base.update(overrides)
    return SolverConfig(**base)


class _Workspace:
    """Lazily computed shared state for the pipeline stages."""

    def __init__(self, cfg: RunConfig, log):
        self.cfg = cfg
        self.log = log
        self._cache = {}

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    def solution(self):
        return self._get("solution", lambda: solve_ground_state(_solver_config(self.cfg)))

    def refined_solution(self):
        return self._get(
            "refined",
            lambda: solve_ground_state(_solver_config(self.cfg, n=2 * self.cfg.grid_n)),
        )

    def alternate_solution(self):
        alt = "exponential" if self.cfg.solver_init != "exponential" else "gaussian"
        return self._get(
            "alternate",
            lambda: solve_ground_state(_solver_config(self.cfg, init=alt, init_param=1.0)),
        )

    def linearization_solution(self):
        if self.cfg.grid_r_max <= LINEARIZE_R_MAX:
            return self.solution()
        return self._get(
            "lin_solution",
            lambda: solve_ground_state(_solver_config(self.cfg, r_max=LINEARIZE_R_MAX)),
        )

    def quality(self):
        return self._get("quality", lambda: verify_qualitative(self.solution()))

    def tgrid(self):
        return TGrid(self.cfg.tgrid_m, self.cfg.tgrid_t_max)


def _write_solve_artifacts(ws, out):
    sol = ws.solution()
    g = sol.Q.grid
    record = ProfileRecord(
        profile=sol.Q,
        kind="ground_state",
        eigenvalue=sol.eigenvalue,
        mass=sol.mass,
        residual=sol.residual,
        config_hash=config_hash(ws.cfg),
    )
    save_profile(record, out / "q_profile.csv")
    write_series(out / "q_fourier.csv", g.rho, forward_transform(sol.Q).values,
                 header="rho,value")
    lines = ["r,V,Phi"]
    lines.extend(
        f"{repr(float(r))},{repr(float(v))},{repr(float(p))}"
        for r, v, p in zip(g.r, sol.potential.V.values, sol.potential.Phi.values)
    )
    (out / "potentials.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def _verify_payload(ws):
    sol = ws.solution()
    fine = ws.refined_solution()
    rep = ws.quality()
    rel_mass = abs(fine.mass - sol.mass) / sol.mass
    mu = 1.3
    from .potentials import resample_scaled

    scaled_mass = mass(resample_scaled(sol.Q, mu))
    payload = {
        "positive": rep.positive,
        "strictly_decreasing": rep.strictly_decreasing,
        "decay_slope": rep.decay_slope,
        "decay_window": list(rep.decay_window),
        "fourier_positive": rep.fourier_positive,
        "fourier_nonincreasing": rep.fourier_nonincreasing,
        "spectral_slope": rep.spectral_slope,
        "spectral_r2": rep.spectral_r2,
        "analyticity_radius": rep.analyticity_radius,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "mass_constant": {
            "value": sol.mass,
            "refined_value": fine.mass,
            "rel_difference": rel_mass,
            "grid_pair": [[sol.Q.grid.n, sol.Q.grid.r_max],
                          [fine.Q.grid.n, fine.Q.grid.r_max]],
        },
        "scaling_invariance": {
            "mu": mu,
            "rel_difference": abs(scaled_mass - sol.mass) / sol.mass,
            "grid": [sol.Q.grid.n, sol.Q.grid.r_max],
        },
        "passed": rep.passed and rel_mass <= 1e-3,
    }
    return payload, bool(payload["passed"])


def _linearize_payload(ws, out, write):
    lin_sol = ws.linearization_solution()
    cfg = ws.cfg
    report = nondegeneracy_check(lin_sol, ell_max=cfg.linearization_ell_max,
                                 k=cfg.linearization_k_eigs)
    ladders = {}
    qp = spectral_derivative(lin_sol.Q)
    for ell in range(cfg.linearization_ell_max + 1):
        op = assemble_L_plus(ell, lin_sol)
        rep = spectrum(op, cfg.linearization_k_eigs, reference=qp if ell == 1 else None)
        ladders[ell] = rep.eigenvalues
        if write:
            write_series(out / f"spectrum_l{ell}.csv",
                         np.arange(len(rep.eigenvalues)), rep.eigenvalues,
                         header="index,eigenvalue")
    payload = {
        "tolerance": report.tolerance,
        "zero_eigenvalue": report.zero_eigenvalue,
        "zero_mode_overlap": report.zero_mode_overlap,
        "sector_gaps": {str(l): v for l, v in sorted(report.sector_gaps.items())},
        "grid": [lin_sol.Q.grid.n, lin_sol.Q.grid.r_max],
        "passed": report.passed,
        "details": report.details,
    }
    return payload, ladders, report.passed


def _extend_payload(ws):
    cfg = ws.cfg
    sol = ws.solution()
    tg = ws.tgrid()
    u, mu = canonical_rescale(sol.Q, sol.eigenvalue)
    U = poisson_extend(u, tg)
    form = quadratic_form(u, U)
    mini = form_minimize(u, tg, basis_size=cfg.extension_basis_size,
                         seed=cfg.solver_seed)

    alt = ws.alternate_solution()
    v, _ = canonical_rescale(alt.Q, alt.eigenvalue)
    try:
        contra = contradiction_functional(u, v, tg)
        contra_payload = {
            "status": contra.status,
            "R": contra.R,
            "form_sum": contra.form_sum,
            "boundary_integral": contra.boundary_integral,
            "off_solution_term": contra.off_solution_term,
            "rel_agreement": contra.rel_agreement,
            "omega_fraction": contra.omega_fraction,
            "alarm": contra.alarm,
            "notes": contra.notes,
        }
        alarm = contra.alarm
    except NoCrossing:
        contra_payload = {"status": "coincide",
                          "notes": "difference below crossing resolution"}
        alarm = False

    scale = max(abs(form.value), 1e-3)
    ok = (
        mini.correlation_with_extension >= 0.999
        and mini.bump_only_min > 0.0
        and mini.min_quotient >= -scale
        and not alarm
    )
    payload = {
        "rescale_mu": mu,
        "form_on_extension": {
            "value": form.value,
            "dirichlet_part": form.dirichlet_part,
            "boundary_part": form.boundary_part,
        },
        "harmonicity_defect": harmonicity_defect(U),
        "minimize": {
            "min_quotient": mini.min_quotient,
            "correlation_with_extension": mini.correlation_with_extension,
            "bump_only_min": mini.bump_only_min,
        },
        "contradiction": contra_payload,
        "grids": {"radial": [cfg.grid_n, cfg.grid_r_max],
                  "t": [cfg.tgrid_m, cfg.tgrid_t_max]},
        "passed": ok,
    }
    return payload, mini, ok


def _write_plotdata(ws, out, ladders, mini):
    plotdir = out / "plotdata"
    plotdir.mkdir(exist_ok=True)
    sol = ws.solution()
    rep = ws.quality()
    g = sol.Q.grid
    q = sol.Q.values
    qhat = forward_transform(sol.Q).values

    write_series(plotdir / "q_profile.csv", g.r, q)
    write_series(plotdir / "q_loglog.csv", np.log(g.r), np.log(np.abs(q)),
                 header="log_r,log_q")
    lo, hi = rep.decay_window
    win = (g.r >= lo) & (g.r <= hi)
    slope, intercept, _ = _refit(np.log(g.r[win]), np.log(np.abs(q[win])))
    write_series(plotdir / "q_loglog_fit.csv",
                 np.array([np.log(lo), np.log(hi)]),
                 intercept + slope * np.array([np.log(lo), np.log(hi)]),
                 header="log_r,log_q")
    write_series(plotdir / "q_fourier.csv", g.rho, qhat, header="rho,value")
    band = (g.rho >= g.rho_max / 8.0) & (g.rho <= g.rho_max / 2.0)
    safe = band & (np.abs(qhat) > 1e-13 * np.max(np.abs(qhat)))
    fslope, fintercept, _ = _refit(g.rho[safe], np.log(np.abs(qhat[safe])))
    ends = np.array([g.rho[safe][0], g.rho[safe][-1]])
    write_series(plotdir / "q_fourier_fit.csv", ends, fintercept + fslope * ends,
                 header="rho,log_value")
    write_series(plotdir / "potential_v.csv", g.r, sol.potential.V.values,
                 header="r,V")
    write_series(plotdir / "potential_phi.csv", g.r, sol.potential.Phi.values,
                 header="r,Phi")
    if ladders:
        rows = ["l,eigenvalue"]
        for ell in sorted(ladders):
            rows.extend(f"{ell},{repr(float(v))}" for v in ladders[ell])
        (plotdir / "spectrum_ladder.csv").write_text("\n".join(rows) + "\n",
                                                     encoding="utf-8")
    if mini is not None:
        write_series(plotdir / "rayleigh_quotients.csv",
                     np.arange(len(mini.basis_quotients)), mini.basis_quotients,
                     header="index,quotient")

    if "png" in ws.cfg.output_formats.split(","):
        figures.q_profile_figure(g.r, q, plotdir / "q_profile.png")
        figures.q_loglog_figure(g.r, q, slope, intercept, (lo, hi),
                                plotdir / "q_loglog.png")
        figures.q_fourier_figure(g.rho[safe], qhat[safe], fslope, fintercept,
                                 plotdir / "q_fourier.png")
        figures.potentials_figure(g.r, sol.potential.V.values,
                                  sol.potential.Phi.values,
                                  plotdir / "potentials.png")
        if ladders:
            figures.spectrum_figure(ladders, plotdir / "spectrum.png")
        if mini is not None:
            figures.extension_figure(mini.basis_quotients,
                                     plotdir / "rayleigh_quotients.png")


def _refit(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(coef[1]), None


def run_pipeline(cfg: RunConfig, out_dir=None, stage: str | None = None,
                 log=print) -> int:
    """Run the selected stage (or all stages) and write artifacts.

    Returns the exit code of the first failing stage, 0 if all pass.
    """
    if stage is not None and stage not in STAGES:
        log(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
        return EXIT_CONFIG
    selected = set(STAGES) if stage is None else {stage}
    out = Path(out_dir if out_dir is not None else cfg.output_directory)
    out.mkdir(parents=True, exist_ok=True)
    ws = _Workspace(cfg, log)
    exit_code = EXIT_OK
    quality_payload = {}

    try:
        ws.solution()
    except NotConverged as exc:
        log(f"solve failed: {exc}")
        return EXIT_SOLVE

    if "solve" in selected:
        _write_solve_artifacts(ws, out)
        log(f"solve: residual {ws.solution().residual:.3e} "
            f"in {ws.solution().iterations} iterations")

    if "verify" in selected:
        try:
            payload, ok = _verify_payload(ws)
        except NotConverged as exc:
            log(f"verify failed (refinement solve): {exc}")
            return EXIT_SOLVE
        quality_payload.update(payload)
        write_json(out / "quality_report.json", quality_payload)
        if not ok and exit_code == EXIT_OK:
            exit_code = EXIT_VERIFY
        log(f"verify: passed={ok}")

    ladders = None
    if "linearize" in selected or "report" in selected:
        try:
            lin_payload, ladders, lin_ok = _linearize_payload(
                ws, out, write="linearize" in selected
            )
        except InsufficientSectors as exc:
            log(f"linearize failed: {exc}")
            return EXIT_LINEARIZE
        except NotConverged as exc:
            log(f"linearize failed (companion solve): {exc}")
            return EXIT_SOLVE
        if "linearize" in selected:
            quality_payload["nondegeneracy"] = lin_payload
            write_json(out / "quality_report.json", quality_payload)
            if not lin_ok and exit_code == EXIT_OK:
                exit_code = EXIT_LINEARIZE
            log(f"linearize: passed={lin_ok} ({lin_payload['details']})")

    mini = None
    if "extend" in selected or "report" in selected:
        try:
            ext_payload, mini, ext_ok = _extend_payload(ws)
        except NotConverged as exc:
            log(f"extend failed (companion solve): {exc}")
            return EXIT_SOLVE
        except BosonlabError as exc:
            log(f"extend failed: {exc}")
            return EXIT_EXTEND
        if "extend" in selected:
            write_json(out / "extension_report.json", ext_payload)
            if not ext_ok and exit_code == EXIT_OK:
                exit_code = EXIT_EXTEND
            log(f"extend: passed={ext_ok}")

    if "report" in selected:
        try:
            _write_plotdata(ws, out, ladders, mini)
        except OSError as exc:
            log(f"report failed: {exc}")
            return EXIT_REPORT
        log("report: plot data written")

    return exit_code
