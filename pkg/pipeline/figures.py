"""Regenerates the data behind the three reference figures and checks their shape."""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from config.settings import Config
from distributions.pmf import Pmf, pmf_from_probs
from pipeline.sweeper import SweepAxis, SweepRunner, SweepTable, parse_range
from pipeline.verifier import VerificationReport
from tilting.tilt import principal_omega, tilt

logger = logging.getLogger("pipeline.figures")


def find_crossings(omegas: np.ndarray, beta_a: np.ndarray, beta_b: np.ndarray) -> List[float]:
    """Omega values where two beta(w) curves on a shared grid cross (linear interpolation)."""
    diff = np.asarray(beta_a) - np.asarray(beta_b)
    omegas = np.asarray(omegas)
    crossings = []
    for i in range(len(diff) - 1):
        d0, d1 = diff[i], diff[i + 1]
        if d0 == 0.0:
            crossings.append(float(omegas[i]))
        elif d0 * d1 < 0.0:
            t = d0 / (d0 - d1)
            crossings.append(float(omegas[i] + t * (omegas[i + 1] - omegas[i])))
    if len(diff) and diff[-1] == 0.0:
        crossings.append(float(omegas[-1]))
    return crossings


def check_utility_vs_beta(P: Pmf, table: SweepTable, report: VerificationReport,
                          step: float) -> None:
    """Smallest-probability column falls with beta, largest rises, middle ones peak at beta = p_j."""
    df = table.to_frame().sort_values("beta")
    betas = df["beta"].to_numpy()
    p = P.vector
    lo_label = P.labels[int(np.argmin(np.where(p > 0, p, np.inf)))]
    hi_label = P.labels[int(np.argmax(p))]

    rises = int(np.sum(np.diff(df[lo_label].to_numpy()) >= 0.0))
    report.add(f"U*({lo_label}) strictly decreasing in beta", rises, 0)
    falls = int(np.sum(np.diff(df[hi_label].to_numpy()) <= 0.0))
    report.add(f"U*({hi_label}) strictly increasing in beta", falls, 0)

    for label, pj in zip(P.labels, p):
        if label in (lo_label, hi_label) or not (betas[0] <= pj <= betas[-1]):
            continue
        peak = float(betas[int(np.argmax(df[label].to_numpy()))])
        report.add(f"U*({label}) peaks at beta = {pj:g}", abs(peak - pj), step / 2 + 1e-9)


def check_utility_vs_omega(P: Pmf, table: SweepTable, report: VerificationReport) -> None:
    """Curves pass through P at w = 0; extreme rows favour p_min / p_max; argmax at w = 1/p_j."""
    df = table.to_frame()
    p = P.vector
    zero = df[df["omega"] == 0.0]
    if not zero.empty:
        gap = float(np.max(np.abs(zero[list(P.labels)].to_numpy()[0] - p)))
        report.add("U* = P at omega = 0", gap, Config.SUM_TOL)

    first, last = df.iloc[0], df.iloc[-1]
    lo_label = P.labels[int(np.argmin(np.where(p > 0, p, np.inf)))]
    hi_label = P.labels[int(np.argmax(p))]
    report.add(f"U*({hi_label}) dominates at omega = {first['omega']:g}", 0,
               0, passed=bool(first[list(P.labels)].astype(float).idxmax() == hi_label))
    report.add(f"U*({lo_label}) dominates at omega = {last['omega']:g}", 0,
               0, passed=bool(last[list(P.labels)].astype(float).idxmax() == lo_label))

    for label, pj in zip(P.labels, p):
        if pj <= 0.0:
            continue
        omega = principal_omega(P, label)
        winner = tilt(P, omega).argmax_label
        report.add(f"argmax at omega = 1/p({label}) = {omega:.6g} is {label}", 0, 0,
                   passed=(winner == label), detail=f"[got {winner}]")


@dataclass
class FigureRun:
    tables: Dict[str, SweepTable] = field(default_factory=dict)
    files: List[Path] = field(default_factory=list)
    crossings: Dict[str, List[float]] = field(default_factory=dict)
    report: VerificationReport = field(default_factory=VerificationReport)


class FigureReproducer:
    """Runs every sweep listed under `figures` in config/reference_distributions.yaml."""

    def __init__(self, out_dir: Optional[Union[str, Path]] = None):
        self.out_dir = Path(out_dir) if out_dir else Config.DATA_DIR / "figures"
        self.distributions = {
            entry["name"]: pmf_from_probs(entry["labels"], entry["probs"])
            for entry in Config.load_reference_distributions()
        }
        self.sweeps = Config.load_figure_sweeps()

    def run(self) -> FigureRun:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        run = FigureRun()
        for figure in self.sweeps:
            logger.info("=" * 60)
            logger.info(f" FIGURE: {figure['name']} ({figure['axis']} {figure['range']})")
            logger.info("=" * 60)
            points = parse_range(figure["range"])
            step = float(str(figure["range"]).split(":")[2])
            axis = SweepAxis.parse(figure["axis"])

            for dist_name in figure["distributions"]:
                P = self.distributions[dist_name]
                table = SweepRunner(P).run(axis, points, figure["range"])
                table.meta["distribution"] = dist_name
                key = f"{figure['name']}_{dist_name}"
                run.tables[key] = table
                run.files.append(SweepRunner.export_csv(table, self.out_dir / f"{key}.csv"))

                if axis is SweepAxis.BETA:
                    check_utility_vs_beta(P, table, run.report, step)
                elif figure["name"] != "beta_vs_omega":
                    check_utility_vs_omega(P, table, run.report)

            if axis is SweepAxis.OMEGA and len(figure["distributions"]) == 2:
                self._report_crossing(figure, run)
        return run

    def _report_crossing(self, figure: Dict, run: FigureRun):
        names = figure["distributions"]
        a = run.tables[f"{figure['name']}_{names[0]}"]
        b = run.tables[f"{figure['name']}_{names[1]}"]
        crossings = find_crossings(a.column("omega"), a.column("beta"), b.column("beta"))
        run.crossings[figure["name"]] = crossings
        for name in names:
            betas = run.tables[f"{figure['name']}_{name}"].column("beta")
            run.report.add(f"beta strictly decreasing for {name}",
                           int(np.sum(np.diff(betas) >= 0.0)), 0)
        located = ", ".join(f"{w:.6g}" for w in crossings) or "none"
        run.report.add(f"{names[0]} and {names[1]} beta curves cross once", len(crossings), 1,
                       passed=(len(crossings) == 1), detail=f"[omega = {located}]")
