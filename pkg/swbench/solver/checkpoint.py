"""
Checkpoint format, version 1.

A numpy .npz archive holding
    metadata   0-d unicode array with a JSON object: format_version, d, N, a, n, gamma, coefficient,
               samples, steps, blowup (null or the blow-up report),
               mean_zero (per field name, one flag per sample; absent means false)
    times      float64, shape (S,)
    q          complex128, shape (S, 1, N, ..., N)
    u_lin      complex128, shape (S, d, N, ..., N)
    u_bar      complex128, shape (S, d, N, ..., N)
Loading reproduces the trajectory bit for bit.
"""

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np
from loguru import logger

from swbench.common.constants import CHECKPOINT_FORMAT_VERSION
from swbench.common.errors import UsageError
from swbench.pydantic_models.reports import BlowUpReport
from swbench.solver.pressure import PressureLaw
from swbench.solver.state import SolverState, Trajectory
from swbench.spectral.field import SpectralField
from swbench.spectral.grid import PeriodicGrid


_FIELDS = ("q", "u_lin", "u_bar")


def save_checkpoint(trajectory: Trajectory, path: Path | str) -> Path:
    path = Path(path)
    if len(trajectory) == 0:
        raise UsageError("Cannot checkpoint an empty trajectory")
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = trajectory.grid
    metadata = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "d": grid.d,
        "N": grid.N,
        "a": grid.a if isinstance(grid.a, float) else list(grid.a),
        "n": trajectory.n,
        "gamma": trajectory.law.gamma,
        "coefficient": trajectory.law.coefficient,
        "samples": len(trajectory),
        "steps": trajectory.steps,
        "blowup": asdict(trajectory.blowup) if trajectory.blowup else None,
        "mean_zero": {
            name: [getattr(s, name).mean_zero for s in trajectory.states] for name in _FIELDS
        },
    }
    with path.open("wb") as f:
        np.savez(
            f,
            metadata=np.array(json.dumps(metadata)),
            times=trajectory.times,
            q=np.stack([s.q.coeffs for s in trajectory.states]),
            u_lin=np.stack([s.u_lin.coeffs for s in trajectory.states]),
            u_bar=np.stack([s.u_bar.coeffs for s in trajectory.states]),
        )
    logger.info(f"[Checkpoint] Wrote {len(trajectory)} samples to {path}")
    return path


def load_checkpoint(path: Path | str) -> Trajectory:
    path = Path(path)
    with np.load(path, allow_pickle=False) as archive:
        metadata = json.loads(str(archive["metadata"]))
        version = metadata.get("format_version")
        if version != CHECKPOINT_FORMAT_VERSION:
            raise UsageError(
                f"Checkpoint {path} has format version {version}, expected {CHECKPOINT_FORMAT_VERSION}"
            )
        a = metadata["a"]
        grid = PeriodicGrid(
            d=metadata["d"], N=metadata["N"], a=a if isinstance(a, float) else tuple(a)
        )
        times = archive["times"]
        q, u_lin, u_bar = archive["q"], archive["u_lin"], archive["u_bar"]

    trajectory = Trajectory(
        grid=grid,
        n=metadata["n"],
        law=PressureLaw(gamma=metadata["gamma"], coefficient=metadata["coefficient"]),
        steps=metadata["steps"],
        blowup=BlowUpReport(**metadata["blowup"]) if metadata["blowup"] else None,
    )
    mean_zero = metadata.get("mean_zero", {})

    def flag(name: str, i: int) -> bool:
        return bool(mean_zero[name][i]) if name in mean_zero else False

    for i, t in enumerate(times):
        trajectory.append(
            SolverState(
                time=float(t),
                q=SpectralField(grid, q[i], mean_zero=flag("q", i)),
                u_lin=SpectralField(grid, u_lin[i], mean_zero=flag("u_lin", i)),
                u_bar=SpectralField(grid, u_bar[i], mean_zero=flag("u_bar", i)),
            )
        )
    logger.debug(f"[Checkpoint] Loaded {len(trajectory)} samples from {path}")
    return trajectory
