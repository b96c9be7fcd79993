"""
Main entry point for running one scenario.

A run directory runs/<name>/ receives
    config.json    the resolved scenario, package version and seed
    ledger.csv     one EstimateLedger row per sample
    summary.json   scalars, flags, measured constants and the a priori report; written even when the run fails
    checkpoints/   the trajectory as a .npz archive, when requested
    info.log       the DEBUG log of this run only
"""

import csv
import json
import traceback
from datetime import datetime
from pathlib import Path

from loguru import logger
from pydantic_core import to_jsonable_python

from swbench import __version__
from swbench.common.constants import LEDGER_SCHEMA_VERSION, MIN_STEPS_PER_RUN
from swbench.common.errors import BlowUpError, UsageError
from swbench.config import ConfigSingleton, toggle
from swbench.diagnostics.apriori import check_apriori, select_cutoff, select_horizon
from swbench.diagnostics.ledger import EstimateLedger, LedgerRow
from swbench.pydantic_models.scenario import Scenario
from swbench.scenarios.initial_data import initial_data
from swbench.scenarios.simulation import make_grid, make_solver
from swbench.solver.checkpoint import save_checkpoint
from swbench.solver.state import Schedule

SUMMARY_FILE = "summary.json"
LEDGER_FILE = "ledger.csv"
CONFIG_FILE = "config.json"
LOG_FILE = "info.log"


def _seed() -> int | None:
    return ConfigSingleton.config.seed if ConfigSingleton.is_initialized() else None


def solution_norms(row: LedgerRow) -> dict[str, float]:
    """The norms of the well-posedness solution spaces at the end of the run."""
    return {
        "q_linf_b21": row.q_linf,
        "u_linf_b22": row.u_linf_b22,
        "u_l1_b22": row.u_l1_b22,
        "u_linf_binf": row.u_linf_binf,
        "u_l1_binf": row.u_l1_binf,
        "divu_linf_b21": row.divu_linf,
        "divu_l1_b21": row.divu_l1,
    }


def run(scenario: Scenario, output_dir: str | Path) -> dict:
    """Runs one scenario into output_dir/<name>; a blow-up is recorded in the summary and re-raised."""
    start_time = datetime.now()

    run_dir = Path(output_dir) / scenario.name
    run_dir.mkdir(parents=True, exist_ok=True)
    summary: dict = {
        "name": scenario.name,
        "version": __version__,
        "status": "failed",
        "started": start_time.isoformat(timespec="seconds"),
    }

    sink = logger.add(
        run_dir / LOG_FILE,
        level=scenario.output.log_level,
        format=(
            "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level>"
            " | <level>{message}</level>"
        ),
    )
    try:
        _run(scenario, run_dir, summary)
    except BlowUpError as e:
        summary["status"] = "blowup"
        summary["blowup"] = to_jsonable_python(e.report)
        logger.error(f"[Solver] Run {scenario.name} blew up: {e.report.describe()}")
        raise
    except Exception as e:
        tb = traceback.format_exc()
        summary["error"] = f"{type(e).__name__}: {e}"
        logger.error(f"Error running scenario {scenario.name}: {e} \n{tb}")
        raise
    finally:
        duration = datetime.now() - start_time
        summary["duration_seconds"] = round(duration.total_seconds(), 3)
        summary_file = run_dir / SUMMARY_FILE
        with open(summary_file, "w") as f:
            json.dump(to_jsonable_python(summary), f, indent=2)
        logger.info(
            f"Scenario {scenario.name} ended with status {summary['status']} after {duration.total_seconds():.2f} seconds"
        )
        logger.debug(f"Summary written to {summary_file}")
        logger.remove(sink)
    return summary


def _run(scenario: Scenario, run_dir: Path, summary: dict) -> None:
    config_file = run_dir / CONFIG_FILE
    with open(config_file, "w") as f:
        json.dump({"version": __version__, "seed": _seed(), "scenario": scenario.to_json()}, f, indent=2)
    logger.debug(f"Echoed the resolved scenario to {config_file}")

    grid = make_grid(scenario)
    data = initial_data(scenario.initial_data, grid)
    solver = make_solver(scenario, grid)
    estimates = scenario.estimates
    summary["initial_data"] = {**data.norms.to_json(), "flags": sorted(data.flags)}
    summary["grid"] = {"d": grid.d, "N": grid.N, "n": solver.n, "notes": grid.notes()}

    m = select_cutoff(data.q0, estimates.eta) if estimates.m == "auto" else estimates.m
    if scenario.horizon_is_auto:
        if data.out_of_hypothesis:
            raise UsageError("T = auto needs data inside the small-data hypotheses; give a numeric T")
        choice = select_horizon(solver, data.q0, data.u0, estimates.eta, m, alpha=estimates.alpha)
        horizon = choice.horizon
        summary["horizon_choice"] = to_jsonable_python(choice)
    else:
        horizon = float(scenario.run.T)

    samples = max(scenario.run.samples, MIN_STEPS_PER_RUN)
    schedule = Schedule(dt=scenario.run.dt, cfl=scenario.run.cfl, sample_interval=horizon / samples)
    ledger = EstimateLedger(grid)
    logger.info(f"Starting run {scenario.name} to T={horizon:.4g} with {samples} samples")
    trajectory = solver.run(data.q0, data.u0, horizon, schedule, on_sample=(ledger.add_sample,), survey=True)

    ledger.to_csv(run_dir / LEDGER_FILE)
    summary["horizon"] = horizon
    summary["steps"] = trajectory.steps
    summary["ledger"] = ledger.to_json()
    summary["solution_norms"] = solution_norms(ledger.final)
    report = check_apriori(trajectory, estimates.eta, m, alpha=estimates.alpha, ledger=ledger)
    summary["apriori"] = report.to_json()

    if scenario.output.checkpoints or toggle("write-checkpoints"):
        path = save_checkpoint(trajectory, run_dir / "checkpoints" / f"{scenario.name}.npz")
        summary["checkpoint"] = str(path.relative_to(run_dir))

    if not trajectory.completed:
        raise BlowUpError(trajectory.blowup)
    summary["status"] = "completed"
    logger.info(
        f"Run {scenario.name} completed: beta(T)={ledger.final.beta:.4e}, V(T)={ledger.final.V:.4e},"
        f" hypotheses {'hold' if report.hypotheses_hold else 'fail'}"
    )


# =============================================================
#                  Reading run directories back
# =============================================================


def load_summary(run_dir: str | Path) -> dict:
    path = Path(run_dir) / SUMMARY_FILE
    if not path.is_file():
        raise UsageError(f"{run_dir} is not a run directory: {SUMMARY_FILE} is missing")
    with open(path) as f:
        return json.load(f)


def load_ledger(run_dir: str | Path) -> list[dict[str, float]]:
    path = Path(run_dir) / LEDGER_FILE
    if not path.is_file():
        return []
    with open(path, newline="") as f:
        header = f.readline().strip()
        if header != f"# swbench ledger schema {LEDGER_SCHEMA_VERSION}":
            raise UsageError(f"Unsupported ledger header {header!r} in {path}")
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(f)]


def describe(run_dir: str | Path) -> str:
    """Human readable digest of a finished run directory, for `swbench report <run>`."""
    summary = load_summary(run_dir)
    rows = load_ledger(run_dir)
    lines = [f"run {summary['name']}: {summary['status']} ({summary.get('duration_seconds', 0):.2f} s)"]
    if "blowup" in summary:
        blowup = summary["blowup"]
        lines.append(f"  blow-up: {blowup['reason']} at t={blowup['time']:.6g} (step {blowup['step']})")
    if "error" in summary:
        lines.append(f"  error: {summary['error']}")
    if "horizon" in summary:
        lines.append(f"  T={summary['horizon']:.6g}, steps={summary['steps']}, samples={len(rows)}")
    for note in summary.get("grid", {}).get("notes", []):
        lines.append(f"  note: {note}")
    if rows:
        final = rows[-1]
        lines.append(
            f"  beta(T)={final['beta']:.4e}  V(T)={final['V']:.4e}  min(1+q)={final['min_density']:.4e}"
        )
    apriori = summary.get("apriori")
    if apriori:
        lines.append(
            f"  a priori (eta={apriori['eta']:g}, m={apriori['m']}): C={apriori['transport_constant']:.4g},"
            f" hypotheses {'hold' if apriori['hypotheses_hold'] else 'fail'}"
        )
        for row in apriori["rows"]:
            status = "ok" if row["holds"] else "VIOLATED"
            lines.append(
                f"    {row['kind']:<10} {row['name']:<20} {row['lhs']:.4e} <= {row['rhs']:.4e}  [{status}]"
            )
    for name, value in summary.get("solution_norms", {}).items():
        lines.append(f"  {name:<14} {value:.4e}")
    return "\n".join(lines)
