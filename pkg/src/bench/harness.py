"""
Cost comparison harness
=======================

Draws ``runs`` graphs from a generator, runs the detector and CC-PIVOT on
each and records both cluster-editing costs. Run ``i`` uses the seed
``derive_seed(master_seed, i)`` for everything it samples, so reports do not
depend on the order (or thread) in which runs execute.
"""

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Union

from bench.generators import LfrParams, SbmParams, gen_lfr_lite, gen_sbm
from bench.pivot import cc_pivot_best
from core.detector import DetectorConfig, detect_communities
from utils.exceptions import InvalidArgumentError
from utils.logger import logger
from utils.seeding import derive_seed

CSV_COLUMNS = ["run", "our_cost", "ccpivot_cost", "recovered"]

ModelParams = Union[SbmParams, LfrParams]


@dataclass(frozen=True)
class BenchRun:
    run: int
    our_cost: int
    ccpivot_cost: int
    recovered: bool  # detector returned exactly the planted partition


@dataclass(frozen=True)
class BenchReport:
    params: dict
    runs: tuple

    def __post_init__(self):
        if not self.runs:
            raise InvalidArgumentError("A bench report needs at least one run.")

    @property
    def mean_our_cost(self) -> float:
        return sum(r.our_cost for r in self.runs) / len(self.runs)

    @property
    def mean_ccpivot_cost(self) -> float:
        return sum(r.ccpivot_cost for r in self.runs) / len(self.runs)

    @property
    def recovery_rate(self) -> float:
        return sum(r.recovered for r in self.runs) / len(self.runs)

    def to_dict(self) -> dict:
        return {
            "params": dict(self.params),
            "runs": [
                {"run": r.run, "our_cost": r.our_cost, "ccpivot_cost": r.ccpivot_cost, "recovered": r.recovered}
                for r in self.runs
            ],
            "means": {"our_cost": self.mean_our_cost, "ccpivot_cost": self.mean_ccpivot_cost},
            "recovery_rate": self.recovery_rate,
        }


# --- Parameters ---

def parse_sizes(text: str) -> tuple:
    """``"15,15,15,15"`` lists the cluster sizes; ``"10x6"`` means 6 clusters of size 10."""
    text = str(text).strip().lower()
    try:
        if "x" in text:
            size, count = (int(part) for part in text.split("x", 1))
            sizes = (size,) * count
        else:
            sizes = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise InvalidArgumentError(f"Cannot parse cluster sizes {text!r}; use '15,15,15' or '10x6'.") from None
    if not sizes or any(s < 1 for s in sizes):
        raise InvalidArgumentError(f"Cluster sizes must be positive, got {text!r}.")
    return sizes


def params_from_preset(settings: dict, seed: int = 0) -> list:
    """One parameter set per sweep row of a bench preset."""
    model = settings.get("model", "sbm")
    if model == "sbm":
        sizes = parse_sizes(settings.get("sizes", "10x6"))
        rows = settings.get("rows") or [[settings.get("p", 0.9), settings.get("q", 0.05)]]
        return [SbmParams(sizes, float(p), float(q), seed=seed, relabel=bool(settings.get("relabel", False)))
                for p, q in rows]
    if model == "lfr":
        keys = ("n", "tau1", "tau2", "mu", "avg_deg", "min_degree", "max_degree", "min_community", "max_community")
        return [LfrParams(seed=seed, **{k: settings[k] for k in keys if settings.get(k) is not None})]
    raise InvalidArgumentError(f"Unknown bench model {model!r}; expected 'sbm' or 'lfr'.")


def generate(params: ModelParams):
    if isinstance(params, SbmParams):
        return gen_sbm(params)
    if isinstance(params, LfrParams):
        return gen_lfr_lite(params)
    raise InvalidArgumentError(f"Unsupported model parameters {type(params).__name__}.")


# --- Runs ---

def _single_run(params: ModelParams, index: int, detector_cfg: DetectorConfig, seed, pivot_runs: int) -> BenchRun:
    run_seed = derive_seed(seed, index)
    graph, truth = generate(replace(params, seed=run_seed))
    result = detect_communities(graph, replace(detector_cfg, seed=run_seed))
    _, pivot_cost = cc_pivot_best(graph, derive_seed(run_seed, 1), pivot_runs)
    logger.debug(f"Run {index}: our cost {result.best_cost}, CC-PIVOT cost {pivot_cost}.")
    return BenchRun(index, int(result.best_cost), int(pivot_cost), result.best_partition == truth)


def compare_costs(params: ModelParams, runs: int, detector_cfg: DetectorConfig = DetectorConfig(),
                  seed=0, workers: int = 1, pivot_runs: int = 1) -> BenchReport:
    """Detector against CC-PIVOT on ``runs`` independent graphs drawn from ``params``."""
    if runs < 1:
        raise InvalidArgumentError(f"runs must be at least 1, got {runs}.")
    logger.info(f"Benchmarking {params.describe()} over {runs} run(s).")
    def job(index):
        return _single_run(params, index, detector_cfg, seed, pivot_runs)

    if workers > 1 and runs > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(runs)))
    else:
        results = [job(index) for index in range(runs)]

    report = BenchReport(params.describe(), tuple(results))
    logger.info(
        f"Mean cost: ours {report.mean_our_cost:.1f}, CC-PIVOT {report.mean_ccpivot_cost:.1f}, "
        f"recovered {report.recovery_rate:.0%}."
    )
    return report


# --- Output ---

def _echo_columns(reports: list) -> list:
    columns = []
    for report in reports:
        for key, value in report.params.items():
            if key != "model" and not isinstance(value, list) and key not in columns:
                columns.append(key)
    return columns


def reports_to_csv(reports: Iterable[BenchReport]) -> str:
    """One row per run and a ``mean`` row per report; parameter echo columns follow the costs."""
    reports = list(reports)
    echo = _echo_columns(reports)
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + echo)
    for report in reports:
        params = [report.params.get(key, "") for key in echo]
        for r in report.runs:
            writer.writerow([r.run, r.our_cost, r.ccpivot_cost, int(r.recovered)] + params)
        writer.writerow(["mean", report.mean_our_cost, report.mean_ccpivot_cost, report.recovery_rate] + params)
    return output.getvalue()


def reports_to_json(reports: Iterable[BenchReport]) -> str:
    return json.dumps({"reports": [report.to_dict() for report in reports]}, indent=2) + "\n"
