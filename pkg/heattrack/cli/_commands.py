"""
File: ./heattrack/cli/_commands.py
Project: heattrack

This program is free software; you can redistribute it and/or modify it under the terms of the GNU General Public License as published by the Free Software Foundation; either version 2 of the License, or (at your option) any later version.
This program is distributed in the hope that it will be useful, but WITHOUT ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
You should have received a copy of the GNU General Public License along with this program; if not, write to the Free Software Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301, USA.
"""

# Internal
from typing import Any, Dict, List, Tuple, Callable, Optional
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor

# External
import numpy as np
from pydantic import ValidationError

# Project
from ._config import ExperimentConfig
from ._verify import verify_properties
from ..hum import DualConfig, synthesize_and_verify
from ..grids import (
    Signal,
    SymmetricTimeGrid,
    signal_norm,
    write_table_csv,
    write_signal_csv,
)
from ..logger import get_logger, remove_handler, add_jsonl_handler
from .._errors import (
    ConfigError,
    StabilityError,
    PropertyFailure,
    OutOfRangeError,
    GridTooCoarseError,
    DivergentSeriesError,
    IncompatibleGridError,
    IncompatibleTargetError,
    InsufficientSupportError,
)
from ..solvers import WaveProblem, solve_wave, closed_loop_flux
from ..flatness import (
    CostReport,
    with_cost_constant,
    approximate_tracking,
)
from ._artifacts import provenance_for, write_json_report
from ..special import (
    gs_eval,
    gs_lower_bound,
    gs_upper_bound,
    fit_upper_constant,
    log_gs_lower_bound,
    log_gs_upper_bound,
)
from ..transmutation import (
    TransmutationPlan,
    verify_transmutation,
    transmute_tracking_pair,
)

logger = get_logger(__name__)

Runner = Callable[[ExperimentConfig, Path], List[Path]]

# Library errors that can only come from the parameters of a valid config document
_PARAMETER_ERRORS = (
    StabilityError,
    OutOfRangeError,
    GridTooCoarseError,
    DivergentSeriesError,
    IncompatibleGridError,
    IncompatibleTargetError,
    InsufficientSupportError,
)

COST_CURVE_COLUMNS = ("eps", "delta", "v_sup_norm", "bound_value", "log_bound_value")
GS_COLUMNS = (
    "s",
    "x",
    "value",
    "lower_bound",
    "upper_bound_fitC",
    "log_value",
    "log_lower_bound",
    "log_upper_bound_fitC",
)


def _tracking_errors(
    flux: Signal, target: Signal, mollified: Signal, eps: float, tol_disc: float
) -> Dict[str, Any]:
    error = flux.with_values(flux.values - target.values)
    mollified_error = flux.with_values(flux.values - mollified.values)
    sup_error = signal_norm(error, "sup")
    return {
        "eps": eps,
        "sup_error": sup_error,
        "l2_error": signal_norm(error, "l2"),
        "sup_error_mollified": signal_norm(mollified_error, "sup"),
        "l2_error_mollified": signal_norm(mollified_error, "l2"),
        "within_tolerance": sup_error <= eps + tol_disc,
    }


def run_track(cfg: ExperimentConfig, out: Path) -> List[Path]:
    """Synthesize the flatness control for one tolerance and run it in closed loop.

    Emits control.csv, target.csv, mollified_target.csv, simulated_flux.csv, cost_report.json
    and errors.json (sup and L² distances of the simulated flux to w and to w_δ).
    """
    tgrid, xgrid = cfg.tgrid, cfg.xgrid
    base = cfg.target.build(tgrid)
    series, report = approximate_tracking(
        base,
        cfg.s,
        cfg.eps,
        cfg.length,
        tgrid,
        n_max=cfg.n_max,
        max_order=cfg.max_order,
        tol_series=cfg.tol_series,
    )
    target = cfg.target.sampled(tgrid)
    mollified = Signal(tgrid, series.target.values(np.asarray(tgrid.nodes)))
    flux = closed_loop_flux(series.control, xgrid, substeps=cfg.flux_substeps)
    errors = _tracking_errors(flux, target, mollified, cfg.eps, cfg.tol_disc)
    logger.info("Closed-loop tracking error %s for eps=%s", errors["sup_error"], cfg.eps)

    provenance = provenance_for(cfg)
    signals = {
        "control.csv": series.control,
        "target.csv": target,
        "mollified_target.csv": mollified,
        "simulated_flux.csv": flux,
    }
    for name, signal in signals.items():
        write_signal_csv(out / name, signal, provenance)
    write_json_report(out / "cost_report.json", report.dict(), provenance)
    write_json_report(out / "errors.json", errors, provenance)
    return [out / name for name in (*signals, "cost_report.json", "errors.json")]


def run_cost_curve(cfg: ExperimentConfig, out: Path) -> List[Path]:
    """Sweep the tolerances, one worker per tolerance, and tabulate control size vs bound.

    Every row is bounded with one common growth constant, the largest fitted on the sweep.
    Rows are sorted by decreasing tolerance.
    """
    assert cfg.eps_list is not None
    tgrid = cfg.tgrid
    base = cfg.target.build(tgrid)
    eps_values = sorted(cfg.eps_list, reverse=True)

    def sweep(eps: float) -> CostReport:
        _, report = approximate_tracking(
            base,
            cfg.s,
            eps,
            cfg.length,
            tgrid,
            n_max=cfg.n_max,
            max_order=cfg.max_order,
            tol_series=cfg.tol_series,
        )
        return report

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        reports = list(pool.map(sweep, eps_values))

    common_C = max(report.fitted_C for report in reports)
    reports = [with_cost_constant(report, common_C) for report in reports]
    logger.info("Cost curve over %d tolerances, common C=%s", len(reports), common_C)

    provenance = provenance_for(cfg)
    write_table_csv(
        out / "cost_curve.csv",
        COST_CURVE_COLUMNS,
        [(r.eps, r.delta, r.v_sup_norm, r.bound_value, r.log_bound_value) for r in reports],
        provenance,
    )
    summary = {
        "fitted_C": common_C,
        "s": cfg.s,
        "rows": [dict(report.dict(), bound_holds=report.bound_holds) for report in reports],
    }
    write_json_report(out / "cost_curve.json", summary, provenance)
    return [out / "cost_curve.csv", out / "cost_curve.json"]


def _gs_row(s: float, x: float, C: float) -> Tuple[float, ...]:
    evaluation = gs_eval(s, x)
    return (
        s,
        x,
        evaluation.value,
        gs_lower_bound(s, x),
        gs_upper_bound(s, x, C),
        evaluation.log_value,
        log_gs_lower_bound(s, x),
        log_gs_upper_bound(s, x, C),
    )


def run_gs(cfg: ExperimentConfig, out: Path) -> List[Path]:
    """Tabulate G_s between its lower bound and the upper bound with the fitted constant"""
    xs = np.linspace(0.0, cfg.gs_x_max, cfg.gs_points)
    C = fit_upper_constant(cfg.s, xs)
    rows = [_gs_row(cfg.s, float(x), C) for x in xs]
    provenance = dict(provenance_for(cfg), fitted_C=repr(C))
    write_table_csv(out / "gs.csv", GS_COLUMNS, rows, provenance)
    return [out / "gs.csv"]


def _wave_control(cfg: ExperimentConfig) -> Tuple[Signal, TransmutationPlan]:
    """Wave control over [-S, S] with the plan that transmutes it.

    Sampled controls bring their own pseudo-time grid. Closed-form targets are extended
    evenly, g(s) = w(|s|), on a grid whose step is dx.
    """
    if cfg.target.family == "samples":
        control = cfg.target.samples()
        if not isinstance(control.grid, SymmetricTimeGrid):
            raise ConfigError(f"{cfg.target.path}: wave controls must span [-S, S]")
        try:
            plan = TransmutationPlan(
                tgrid=cfg.tgrid,
                sgrid=control.grid,
                tol_k=cfg.tol_kernel,
                quad_nodes=cfg.quad_nodes,
            )
        except ValidationError as exc:
            raise ConfigError(f"{cfg.target.path}: {exc}") from exc
        return control, plan

    plan = TransmutationPlan.for_grids(
        cfg.tgrid, cfg.xgrid, tol_k=cfg.tol_kernel, quad_nodes=cfg.quad_nodes
    )
    target = cfg.target.closed_form()
    return Signal(plan.sgrid, target.values(np.abs(plan.sgrid.nodes))), plan


def run_transmute(cfg: ExperimentConfig, out: Path) -> List[Path]:
    """Drive the wave from rest, transmute it, and check the heat identities.

    Emits heat_control.csv (the transmuted control v), heat_flux.csv (the flux w that v
    tracks) and transmutation_report.json.
    """
    xgrid = cfg.xgrid
    control, plan = _wave_control(cfg)
    problem = WaveProblem(
        xgrid=xgrid, sgrid=plan.sgrid, control=control, z0=np.zeros(xgrid.n_cells + 1)
    )
    wave = solve_wave(problem)
    heat_control, heat_flux = transmute_tracking_pair(wave, control, plan)
    report = verify_transmutation(wave, plan)

    provenance = provenance_for(cfg)
    write_signal_csv(out / "heat_control.csv", heat_control, provenance)
    write_signal_csv(out / "heat_flux.csv", heat_flux, provenance)
    summary = dict(
        report.dict(),
        truncation_radius=plan.radius,
        panels=plan.panels,
        quad_nodes=plan.quad_nodes,
        tol_k=plan.tol_k,
    )
    write_json_report(out / "transmutation_report.json", summary, provenance)
    return [out / "heat_control.csv", out / "heat_flux.csv", out / "transmutation_report.json"]


def run_hum(cfg: ExperimentConfig, out: Path) -> List[Path]:
    """Minimize the dual functional for the sampled target and check the control in closed loop"""
    target = cfg.target.sampled(cfg.tgrid)
    dual = DualConfig(
        xgrid=cfg.xgrid,
        tgrid=cfg.tgrid,
        eps=cfg.eps,
        smoothing_sigma=cfg.smoothing_sigma,
        max_iters=cfg.max_iters,
        grad_tol=cfg.grad_tol,
    )
    state, report = synthesize_and_verify(target, dual, tol_disc=cfg.tol_disc)

    provenance = provenance_for(cfg)
    write_json_report(out / "hum_report.json", report.dict(), provenance)
    write_signal_csv(out / "hum_control.csv", state.Bstar_p, provenance)
    write_signal_csv(out / "hum_dual.csv", state.f, provenance)
    return [out / "hum_report.json", out / "hum_control.csv", out / "hum_dual.csv"]


def run_verify(cfg: ExperimentConfig, out: Path) -> List[Path]:
    """Run the property suite and write verify.json

    Raises:
        PropertyFailure: some property does not hold, after the report is written

    """
    report = verify_properties(cfg)
    write_json_report(out / "verify.json", report.dict(), provenance_for(cfg))
    if not report.passed:
        raise PropertyFailure(f"Properties failed: {', '.join(report.failed)}")
    return [out / "verify.json"]


COMMANDS: Dict[str, Runner] = {
    "track": run_track,
    "cost-curve": run_cost_curve,
    "gs": run_gs,
    "transmute": run_transmute,
    "hum": run_hum,
    "verify": run_verify,
}


def run_experiment(cfg: ExperimentConfig, out: Optional[Path] = None) -> List[Path]:
    """Run the configured command, logging to ``run.log.jsonl`` inside the output directory.

    Args:
        cfg: Validated experiment config
        out: Output directory, ``cfg.out`` when omitted

    Raises:
        ConfigError: parameters rejected by the numerical layer
        PropertyFailure: verify found a failing property
        DataFileError: malformed input data file

    Returns:
        Paths of the written artifacts

    """
    out = cfg.out if out is None else out
    out.mkdir(parents=True, exist_ok=True)
    handler = add_jsonl_handler(out)
    try:
        logger.info("Running %s into %s", cfg.command, out)
        return COMMANDS[cfg.command](cfg, out)
    except _PARAMETER_ERRORS as exc:
        raise ConfigError(f"{cfg.command}: {exc}") from exc
    finally:
        remove_handler(handler)


__all__ = (
    "COMMANDS",
    "GS_COLUMNS",
    "COST_CURVE_COLUMNS",
    "run_gs",
    "run_hum",
    "run_track",
    "run_verify",
    "run_transmute",
    "run_experiment",
    "run_cost_curve",
)
