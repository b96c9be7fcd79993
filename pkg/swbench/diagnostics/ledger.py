"""
EstimateLedger: a fold over the samples of a run that keeps every norm the a priori estimates talk about.

Chemin-Lerner L~^inf norms are kept as running per-block maxima, L^1 norms as per-block (or per-sample)
trapezoid integrals, so each row only depends on the samples up to its time.
"""

import csv
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic.dataclasses import dataclass

from swbench.analysis.norms import block_norms, dyadic_weights, lr_sum
from swbench.common.constants import LEDGER_SCHEMA_VERSION
from swbench.common.errors import UsageError
from swbench.solver.state import SolverState, Trajectory
from swbench.spectral.grid import PeriodicGrid
from swbench.spectral.operators import differentiate


@dataclass(kw_only=True, frozen=True)
class LedgerRow:
    """One CSV row; column names read <field>_<time norm>_<Besov scale>."""

    time: float
    q_linf: float  # L~^inf_t B^{d/2}_{2,1}
    q_now: float  # ||q(t)||_{B^{d/2}_{2,1}}
    ubar_linf: float  # L~^inf_t B^{d/2-1}_{2,1}
    ubar_l1: float  # L^1_t B^{d/2+1}_{2,1}
    beta: float
    V: float
    linear_smallness: float  # int (||grad u_L||_{B^{d/2}_{2,2} cap B^0_{inf,1}} + ||div u_L||_{B^{d/2}_{2,1}})
    ulin_linf_b22: float  # L~^inf_t B^{d/2-1}_{2,2}
    ulin_linf_binf: float  # L~^inf_t B^{-1}_{inf,1}
    ulin_l1_b22: float  # L^1_t B^{d/2+1}_{2,2}
    ulin_l1_binf: float  # L^1_t B^1_{inf,1}
    divlin_linf: float  # L~^inf_t B^{d/2-2}_{2,1}
    divlin_l1: float  # L^1_t B^{d/2}_{2,1}
    u_linf_b22: float
    u_linf_binf: float
    u_l1_b22: float
    u_l1_binf: float
    divu_linf: float  # L~^inf_t B^{d/2-1}_{2,1}
    divu_l1: float  # L^1_t B^{d/2+1}_{2,1}
    min_density: float
    q_mean: float
    split_residual: float
    u_max: float


CSV_COLUMNS: tuple[str, ...] = tuple(f.name for f in fields(LedgerRow))


class EstimateLedger:
    """
    Folds solver samples into LedgerRows. Use add_sample as an on_sample hook of a run, or from_trajectory afterwards.
    """

    # DevNote: the blocks kept as running maxima and as running integrals.
    _MAX_KEYS = ("q", "ubar", "ulin", "ulin_inf", "divlin", "u", "u_inf", "divu")
    _INTEGRAL_KEYS = ("ubar", "ulin", "divlin", "divu")
    _SCALAR_KEYS = ("V", "linear", "ulin_b22", "ulin_binf", "u_b22", "u_binf")

    def __init__(self, grid: PeriodicGrid) -> None:
        self.grid = grid
        d = grid.d
        self._w: dict[float, np.ndarray] = {}
        self.rows: list[LedgerRow] = []
        self._maxima: dict[str, np.ndarray] = {}
        self._integrals: dict[str, np.ndarray] = {}
        self._scalars: dict[str, float] = dict.fromkeys(self._SCALAR_KEYS, 0.0)
        self._previous: tuple[float, dict[str, np.ndarray], dict[str, float]] | None = None
        logger.debug(f"[Ledger] New ledger for d={d}, N={grid.N}")

    def _weight(self, s: float) -> np.ndarray:
        if s not in self._w:
            self._w[s] = dyadic_weights(self.grid, s)
        return self._w[s]

    def _besov(self, blocks: np.ndarray, s: float, r: float) -> float:
        return lr_sum(self._weight(s) * blocks, r)

    def _sample_blocks(self, state: SolverState) -> tuple[dict[str, np.ndarray], dict[str, float]]:
        d = self.grid.d
        grad_lin = differentiate(state.u_lin, "gradient")
        div_lin = differentiate(state.u_lin, "divergence")
        blocks = {
            "q": block_norms(state.q, 2),
            "ubar": block_norms(state.u_bar, 2),
            "ulin": block_norms(state.u_lin, 2),
            "ulin_inf": block_norms(state.u_lin, np.inf),
            "divlin": block_norms(div_lin, 2),
            "u": block_norms(state.u, 2),
            "u_inf": block_norms(state.u, np.inf),
            "divu": block_norms(differentiate(state.u, "divergence"), 2),
        }
        grad_lin_b22 = self._besov(block_norms(grad_lin, 2), d / 2, 2)
        grad_lin_binf = self._besov(block_norms(grad_lin, np.inf), 0.0, 1)
        div_lin_b = self._besov(blocks["divlin"], d / 2, 1)
        linear = grad_lin_b22 + grad_lin_binf + div_lin_b
        rates = {
            "V": self._besov(blocks["ubar"], d / 2 + 1, 1) + linear,
            "linear": linear,
            "ulin_b22": self._besov(blocks["ulin"], d / 2 + 1, 2),
            "ulin_binf": self._besov(blocks["ulin_inf"], 1.0, 1),
            "u_b22": self._besov(blocks["u"], d / 2 + 1, 2),
            "u_binf": self._besov(blocks["u_inf"], 1.0, 1),
        }
        return blocks, rates

    def add_sample(self, state: SolverState) -> LedgerRow:
        if state.grid != self.grid:
            raise UsageError("Sample and ledger live on different grids")
        blocks, rates = self._sample_blocks(state)
        if self._previous is None:
            self._maxima = {k: blocks[k].copy() for k in self._MAX_KEYS}
            self._integrals = {k: np.zeros_like(blocks[k]) for k in self._INTEGRAL_KEYS}
        else:
            t0, blocks0, rates0 = self._previous
            if not state.time > t0:
                raise UsageError(f"Ledger samples must increase in time ({state.time} after {t0})")
            h = state.time - t0
            for k in self._MAX_KEYS:
                self._maxima[k] = np.maximum(self._maxima[k], blocks[k])
            for k in self._INTEGRAL_KEYS:
                self._integrals[k] = self._integrals[k] + h / 2 * (blocks0[k] + blocks[k])
            for k in self._SCALAR_KEYS:
                self._scalars[k] += h / 2 * (rates0[k] + rates[k])
        self._previous = (state.time, blocks, rates)

        d = self.grid.d
        ubar_linf = self._besov(self._maxima["ubar"], d / 2 - 1, 1)
        ubar_l1 = self._besov(self._integrals["ubar"], d / 2 + 1, 1)
        row = LedgerRow(
            time=state.time,
            q_linf=self._besov(self._maxima["q"], d / 2, 1),
            q_now=self._besov(blocks["q"], d / 2, 1),
            ubar_linf=ubar_linf,
            ubar_l1=ubar_l1,
            beta=ubar_linf + ubar_l1,
            V=self._scalars["V"],
            linear_smallness=self._scalars["linear"],
            ulin_linf_b22=self._besov(self._maxima["ulin"], d / 2 - 1, 2),
            ulin_linf_binf=self._besov(self._maxima["ulin_inf"], -1.0, 1),
            ulin_l1_b22=self._scalars["ulin_b22"],
            ulin_l1_binf=self._scalars["ulin_binf"],
            divlin_linf=self._besov(self._maxima["divlin"], d / 2 - 2, 1),
            divlin_l1=self._besov(self._integrals["divlin"], d / 2, 1),
            u_linf_b22=self._besov(self._maxima["u"], d / 2 - 1, 2),
            u_linf_binf=self._besov(self._maxima["u_inf"], -1.0, 1),
            u_l1_b22=self._scalars["u_b22"],
            u_l1_binf=self._scalars["u_binf"],
            divu_linf=self._besov(self._maxima["divu"], d / 2 - 1, 1),
            divu_l1=self._besov(self._integrals["divu"], d / 2 + 1, 1),
            min_density=state.min_density(),
            q_mean=state.density_mean(),
            split_residual=state.split_residual(),
            u_max=state.max_velocity(),
        )
        self.rows.append(row)
        return row

    @classmethod
    def from_trajectory(cls, trajectory: Trajectory) -> "EstimateLedger":
        ledger = cls(trajectory.grid)
        for state in trajectory.states:
            ledger.add_sample(state)
        logger.debug(f"[Ledger] Folded {len(ledger)} samples")
        return ledger

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def final(self) -> LedgerRow:
        if not self.rows:
            raise UsageError("The ledger holds no samples")
        return self.rows[-1]

    def column(self, name: str) -> np.ndarray:
        if name not in CSV_COLUMNS:
            raise UsageError(f"Unknown ledger column {name}")
        return np.array([getattr(row, name) for row in self.rows])

    def transport_constant(self) -> float:
        """
        Smallest C >= 0 with ||q||_{L~^inf_t B^{d/2}_{2,1}} <= e^{C V(t)} (1 + ||q0||_{B^{d/2}_{2,1}}) - 1 at every sample.
        """
        q0 = self.rows[0].q_linf
        worst = 0.0
        for row in self.rows[1:]:
            growth = np.log1p(row.q_linf) - np.log1p(q0)
            if growth <= 0:
                continue
            worst = max(worst, growth / row.V if row.V > 0 else np.inf)
        return float(worst)

    def regularity_profile(self) -> dict[str, list[float] | float]:
        """
        j -> 2^{j(d/2+1)} int ||Delta_j f||_{L^2} for f = u_bar and f = u_lin, with the l^1 and l^2 sums
        (third Besov index 1 against 2).
        """
        d = self.grid.d
        weight = self._weight(d / 2 + 1)
        ubar = weight * self._integrals["ubar"]
        ulin = weight * self._integrals["ulin"]
        return {
            "ubar_blocks": ubar.tolist(),
            "ulin_blocks": ulin.tolist(),
            "ubar_l1_sum": lr_sum(ubar, 1),
            "ubar_l2_sum": lr_sum(ubar, 2),
            "ulin_l1_sum": lr_sum(ulin, 1),
            "ulin_l2_sum": lr_sum(ulin, 2),
        }

    def to_csv(self, path: Path | str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as f:
            f.write(f"# swbench ledger schema {LEDGER_SCHEMA_VERSION}\n")
            writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: repr(float(v)) for k, v in asdict(row).items()})
        logger.info(f"[Ledger] Wrote {len(self.rows)} rows to {path}")
        return path

    def to_json(self) -> dict:
        return {
            "schema_version": LEDGER_SCHEMA_VERSION,
            "samples": len(self.rows),
            "final": asdict(self.final),
            "transport_constant": self.transport_constant(),
            "regularity_profile": self.regularity_profile(),
        }
