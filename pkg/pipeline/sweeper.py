import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import Config
from distributions.io import file_sha256
from distributions.pmf import Pmf
from solver.constraint import ConstraintSpec, feasible_range
from solver.equality import solve_omega
from tilting.tilt import tilt
from utils.errors import BetaOutOfRangeError, InputError, InvalidRangeError

logger = logging.getLogger("pipeline.sweeper")

MAX_SWEEP_POINTS = 1_000_000
RANGE_REL_TOL = 1e-9


class SweepAxis(str, Enum):
    OMEGA = "omega"
    BETA = "beta"

    @classmethod
    def parse(cls, value) -> "SweepAxis":
        if isinstance(value, SweepAxis):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as e:
            raise InputError(f"axis must be 'omega' or 'beta', got {value!r}") from e


@dataclass(frozen=True)
class SweepRow:
    omega: float
    beta: float
    utility: Tuple[float, ...]


@dataclass
class SweepTable:
    labels: Tuple[str, ...]
    rows: List[SweepRow]
    meta: Dict = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        data = [[row.omega, row.beta, *row.utility] for row in self.rows]
        return pd.DataFrame(data, columns=["omega", "beta", *self.labels])

    def column(self, name: str) -> np.ndarray:
        return self.to_frame()[name].to_numpy()


def parse_range(text: str) -> np.ndarray:
    """
    Parse `start:stop:step`. Start is included; stop is included when it falls
    on the grid up to float error, and no point lies past it. Points are start + i*step,
    rounded to Config.RANGE_DECIMALS so that e.g. 0.11 + 9*0.01 is exactly 0.2.
    """
    parts = str(text).split(":")
    if len(parts) != 3:
        raise InvalidRangeError(f"range must look like start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError as e:
        raise InvalidRangeError(f"range {text!r} has non-numeric parts") from e
    if not all(math.isfinite(x) for x in (start, stop, step)):
        raise InvalidRangeError(f"range {text!r} has non-finite parts")
    if step <= 0.0:
        raise InvalidRangeError(f"range step must be > 0, got {step}")
    if stop < start:
        raise InvalidRangeError(f"range stop {stop} is below start {start}")

    ratio = (stop - start) / step
    count = int(math.floor(ratio + RANGE_REL_TOL * max(1.0, ratio))) + 1
    if count > MAX_SWEEP_POINTS:
        raise InvalidRangeError(f"range {text!r} has {count} points (max {MAX_SWEEP_POINTS})")
    points = np.round(start + step * np.arange(count), Config.RANGE_DECIMALS)
    # +0.0 turns a rounded -0.0 into 0.0
    return np.unique(points + 0.0)


class SweepRunner:
    """Evaluates the utility family along the omega or beta axis for one distribution."""

    def __init__(self, P: Pmf, source_path: Optional[Union[str, Path]] = None):
        self.P = P
        self.source_path = Path(source_path) if source_path else None
        self.source_hash = file_sha256(self.source_path) if self.source_path else None

    def _row_at_omega(self, omega: float) -> SweepRow:
        result = tilt(self.P, omega)
        return SweepRow(result.omega, result.beta, result.utility.probs)

    def _row_at_beta(self, beta: float) -> SweepRow:
        omega = solve_omega(self.P, ConstraintSpec.equality(beta))
        return self._row_at_omega(omega.omega)

    def run(self, axis, points: np.ndarray, range_text: str = "") -> SweepTable:
        axis = SweepAxis.parse(axis)
        points = np.asarray(points, dtype=np.float64)
        if axis is SweepAxis.BETA:
            rng = feasible_range(self.P)
            outside = [b for b in points if not rng.contains_open(b)]
            if outside:
                raise BetaOutOfRangeError(
                    f"{len(outside)} sweep points (first {float(outside[0]):g}) leave the open feasible interval",
                    feasible=rng.as_tuple(),
                )
            evaluate = self._row_at_beta
        else:
            evaluate = self._row_at_omega

        logger.info(f"Sweeping {len(points)} points along {axis.value}")
        if Config.MAX_WORKERS > 1:
            with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as pool:
                rows = list(pool.map(evaluate, points))
        else:
            rows = [evaluate(x) for x in points]

        rows.sort(key=lambda row: row.omega)
        omegas = [row.omega for row in rows]
        if any(b <= a for a, b in zip(omegas, omegas[1:])):
            raise InvalidRangeError("sweep produced repeated omega values; use a coarser step")

        meta = {
            "labels": list(self.P.labels),
            "source": str(self.source_path) if self.source_path else None,
            "source_sha256": self.source_hash,
            "axis": axis.value,
            "range": range_text,
            "rows": len(rows),
        }
        return SweepTable(self.P.labels, rows, meta)

    @staticmethod
    def export_csv(table: SweepTable, filename: Union[str, Path]) -> Path:
        """Write `omega,beta,<labels>` with 17 significant digits, plus a .meta.json sidecar."""
        filename = Path(filename)
        if filename.parent and not filename.parent.exists():
            filename.parent.mkdir(parents=True, exist_ok=True)
        df = table.to_frame()
        df.to_csv(filename, index=False, float_format=Config.CSV_FLOAT_FORMAT)

        meta_path = filename.with_name(filename.name + ".meta.json")
        with open(meta_path, 'w') as f:
            json.dump(table.meta, f, indent=2, sort_keys=True)
        logger.info(f" Sweep exported to: {filename} ({len(df)} rows)")
        return filename
