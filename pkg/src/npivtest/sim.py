"""Monte Carlo experiment driver.

Replications are independent tasks keyed by (master_seed, stream_id); within
one experiment replication r uses stream_id = r across every point of the
h-parameter axis (common random numbers), so power curves are monotone up to
estimator noise. Size-adjusted power calibrates the empirical (1-alpha)
quantile of max_J W_J from an independent boundary-null run of equal length
(stream ids offset by 2^31).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import published
from .adaptive import NullSpec, RunConfig, adaptive_scan, decide, image_space_scan
from .dgp import DesignConfig, HSpec, generate, null_boundary
from .errors import InputError, NumericalError
from .randdist import RngStream

__all__ = [
    "ExperimentSpec",
    "CellResult",
    "McSummary",
    "run_size",
    "run_power",
    "run_experiment",
    "reproduce",
    "TABLE_IDS",
]

CALIBRATION_STREAM_OFFSET = 2**31
MAX_FAILURE_SHARE = 0.01

TABLE_IDS = ("T1", "T2", "F1", "F2", "supp-C", "supp-D")


@dataclass(frozen=True)
class ExperimentSpec:
    """Grid of simulation cells plus the test configuration to run on each."""

    design: str = "I"
    mode: str = "size"  # 'size' | 'power' | 'size_adjusted_power'
    statistic: str = "structural"  # 'structural' | 'image-space'
    null: str = "decreasing"
    h_family: str = "mono"
    n_values: tuple[int, ...] = (500,)
    xi_values: tuple[float, ...] = (0.5,)
    c0_values: tuple[float, ...] = (1.0,)
    c_a_values: tuple[float, ...] = (0.0,)
    c_b_values: tuple[float, ...] = (0.0,)
    alphas: tuple[float, ...] = (0.05,)
    replications: int = 1000
    k_factor: int = 2
    grid_mode: str | tuple[int, ...] = "knots"
    basis: str = "bspline2"
    master_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise InputError(f"replications must be >= 1, got {self.replications}")
        if self.mode not in ("size", "power", "size_adjusted_power"):
            raise InputError(f"unknown mode {self.mode!r}")
        if self.statistic not in ("structural", "image-space"):
            raise InputError(f"unknown statistic {self.statistic!r}")
        for name in ("n_values", "xi_values", "c0_values", "c_a_values", "c_b_values", "alphas"):
            if len(getattr(self, name)) == 0:
                raise InputError(f"{name} must be non-empty")

    def null_spec(self) -> NullSpec:
        return NullSpec.from_name(self.null)

    def run_config(self) -> RunConfig:
        return RunConfig(
            alpha=min(self.alphas),
            basis=self.basis,
            grid=self.grid_mode,
            k_factor=self.k_factor,
            seed=self.master_seed,
        )

    def h_spec(self, c0: float, c_a: float, c_b: float) -> HSpec:
        return HSpec(family=self.h_family, c0=c0, c_a=c_a, c_b=c_b)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid_mode"] = self.grid_mode if isinstance(self.grid_mode, str) else list(self.grid_mode)
        for key in ("n_values", "xi_values", "c0_values", "c_a_values", "c_b_values", "alphas"):
            d[key] = list(d[key])
        return d

    @staticmethod
    def from_dict(d: dict) -> "ExperimentSpec":
        d = dict(d)
        known = set(ExperimentSpec.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise InputError(f"unknown experiment keys: {sorted(unknown)}")
        for key in ("n_values", "xi_values", "c0_values", "c_a_values", "c_b_values", "alphas"):
            if key in d:
                d[key] = tuple(d[key])
        if isinstance(d.get("grid_mode"), list):
            d["grid_mode"] = tuple(d["grid_mode"])
        return ExperimentSpec(**d)


@dataclass
class CellResult:
    """One design cell: rejection rates (per alpha), average selected dimension, provenance."""

    params: dict
    reject_rate: dict[float, float]
    avg_j: dict[float, float]
    se: dict[float, float]
    replications: int
    failures: int
    adjusted_crit: dict[float, float] | None = None

    def rows(self) -> list[dict]:
        out = []
        for alpha in sorted(self.reject_rate):
            row = dict(self.params)
            row.update(
                {
                    "alpha": alpha,
                    "reject_rate": self.reject_rate[alpha],
                    "se": self.se[alpha],
                    "avg_J": self.avg_j[alpha],
                    "replications": self.replications,
                    "failures": self.failures,
                }
            )
            if self.adjusted_crit is not None:
                row["adjusted_crit"] = self.adjusted_crit[alpha]
            out.append(row)
        return out


@dataclass
class McSummary:
    """All cells of one experiment plus reproducibility metadata."""

    spec: ExperimentSpec
    cells: list[CellResult]
    metadata: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        return [row for cell in self.cells for row in cell.rows()]

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "cells": self.rows(), "metadata": self.metadata}

    def cell(self, **params) -> CellResult:
        for c in self.cells:
            if all(c.params.get(k) == v for k, v in params.items()):
                return c
        raise KeyError(f"no cell with {params}")


def _rep_outcomes(spec_dict: dict, cell: dict, reps: list[int], stream_offset: int) -> list[tuple[int, dict | None]]:
    """Worker: run the test on `reps` fresh datasets of one cell.

    Returns per-rep {alpha: (reject, j_reported)} plus the max standardized
    statistic, or None on numerical failure.
    """
    spec = ExperimentSpec.from_dict(spec_dict)
    null = spec.null_spec()
    config = spec.run_config()
    h = spec.h_spec(cell.get("c0", 1.0), cell.get("c_a", 0.0), cell.get("c_b", 0.0))
    out = []
    for r in reps:
        stream = RngStream(spec.master_seed, stream_offset + r)
        data = generate(DesignConfig(spec.design, cell["n"], cell["xi"], h, stream))
        try:
            if spec.statistic == "structural":
                grid, entries, warn, n_obs = adaptive_scan(data.y, data.x, data.w, null, config)
                scan_null = null
            else:
                grid, entries, warn, n_obs, scan_null = image_space_scan(
                    data.y, data.x, data.w, null.model, config
                )
            per_alpha = {}
            for alpha in spec.alphas:
                report = decide(grid, entries, n_obs, scan_null, alpha, config)
                w_max = max(rec.w_stat for rec in report.per_j)
                per_alpha[alpha] = (report.reject, report.j_reported, w_max)
            out.append((r, per_alpha))
        except NumericalError:
            out.append((r, None))
    return out


def _collect(spec: ExperimentSpec, cell: dict, jobs: int, stream_offset: int = 0) -> list[tuple[int, dict | None]]:
    reps = list(range(spec.replications))
    if jobs <= 1 or spec.replications < 4:
        return _rep_outcomes(spec.to_dict(), cell, reps, stream_offset)
    chunks = np.array_split(np.asarray(reps), min(jobs * 4, len(reps)))
    results: list[tuple[int, dict | None]] = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(_rep_outcomes, spec.to_dict(), cell, [int(r) for r in chunk], stream_offset)
            for chunk in chunks
            if len(chunk)
        ]
        for fut in futures:
            results.extend(fut.result())
    results.sort(key=lambda item: item[0])
    return results


def _check_failures(outcomes, cell: dict, replications: int) -> int:
    failures = sum(1 for _, res in outcomes if res is None)
    if failures > MAX_FAILURE_SHARE * replications:
        raise NumericalError(
            f"cell {cell} had {failures}/{replications} failed replications (> {MAX_FAILURE_SHARE:.0%})"
        )
    return failures


def _binomial_se(p: float, n_ok: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n_ok) if n_ok > 0 else float("nan")


def _cell_grid(spec: ExperimentSpec) -> list[dict]:
    cells = []
    for n in spec.n_values:
        for xi in spec.xi_values:
            if spec.h_family == "mono":
                for c0 in spec.c0_values:
                    cells.append({"n": n, "xi": xi, "c0": c0})
            else:
                for c_b in spec.c_b_values:
                    for c_a in spec.c_a_values:
                        cells.append({"n": n, "xi": xi, "c_a": c_a, "c_b": c_b})
    return cells


def run_size(spec: ExperimentSpec, jobs: int = 1) -> McSummary:
    """Empirical rejection rates; the DGP parameters are expected to satisfy the null."""
    start = time.perf_counter()
    cells = []
    for cell in _cell_grid(spec):
        outcomes = _collect(spec, cell, jobs)
        failures = _check_failures(outcomes, cell, spec.replications)
        ok = [res for _, res in outcomes if res is not None]
        rates, avg_j, se = {}, {}, {}
        for alpha in spec.alphas:
            rejects = [res[alpha][0] for res in ok]
            js = [res[alpha][1] for res in ok]
            p = float(np.mean(rejects)) if ok else float("nan")
            rates[alpha] = p
            avg_j[alpha] = float(np.mean(js)) if ok else float("nan")
            se[alpha] = _binomial_se(p, len(ok))
        cells.append(
            CellResult(params=dict(cell), reject_rate=rates, avg_j=avg_j, se=se,
                       replications=spec.replications, failures=failures)
        )
    meta = {"mode": spec.mode, "statistic": spec.statistic, "master_seed": spec.master_seed,
            "timings": {"total_seconds": time.perf_counter() - start}}
    return McSummary(spec=spec, cells=cells, metadata=meta)


def _boundary_c_a(spec: ExperimentSpec, c_b: float) -> float:
    null = spec.null_spec()
    if null.kind == "parametric":
        return 0.0
    return null_boundary(spec.h_family, c_b)


def run_power(spec: ExperimentSpec, jobs: int = 1) -> McSummary:
    """Power curves along the c_a axis; size-adjusted mode calibrates on a boundary-null run."""
    if spec.mode not in ("power", "size_adjusted_power"):
        raise InputError(f"run_power needs mode 'power' or 'size_adjusted_power', got {spec.mode!r}")
    if spec.h_family == "mono":
        raise InputError("power experiments use the sin/design2/quad families, not mono")
    start = time.perf_counter()
    cells = []
    for n in spec.n_values:
        for xi in spec.xi_values:
            for c_b in spec.c_b_values:
                crit: dict[float, float] | None = None
                if spec.mode == "size_adjusted_power":
                    boundary = {"n": n, "xi": xi, "c_a": _boundary_c_a(spec, c_b), "c_b": c_b}
                    null_out = _collect(spec, boundary, jobs, stream_offset=CALIBRATION_STREAM_OFFSET)
                    _check_failures(null_out, boundary, spec.replications)
                    crit = {}
                    for alpha in spec.alphas:
                        w_null = [res[alpha][2] for _, res in null_out if res is not None]
                        crit[alpha] = float(np.quantile(np.asarray(w_null), 1.0 - alpha))
                for c_a in spec.c_a_values:
                    cell = {"n": n, "xi": xi, "c_a": c_a, "c_b": c_b}
                    outcomes = _collect(spec, cell, jobs)
                    failures = _check_failures(outcomes, cell, spec.replications)
                    ok = [res for _, res in outcomes if res is not None]
                    rates, avg_j, se = {}, {}, {}
                    for alpha in spec.alphas:
                        if crit is None:
                            hits = [res[alpha][0] for res in ok]
                        else:
                            hits = [res[alpha][2] > crit[alpha] for res in ok]
                        p = float(np.mean(hits)) if ok else float("nan")
                        rates[alpha] = p
                        avg_j[alpha] = float(np.mean([res[alpha][1] for res in ok])) if ok else float("nan")
                        se[alpha] = _binomial_se(p, len(ok))
                    cells.append(
                        CellResult(params=dict(cell), reject_rate=rates, avg_j=avg_j, se=se,
                                   replications=spec.replications, failures=failures,
                                   adjusted_crit=dict(crit) if crit is not None else None)
                    )
    meta = {
        "mode": spec.mode,
        "statistic": spec.statistic,
        "master_seed": spec.master_seed,
        "size_adjustment": "empirical (1-alpha) quantile of max_J W_J from an independent "
        "boundary-null run of equal size, common random numbers along c_a",
        "timings": {"total_seconds": time.perf_counter() - start},
    }
    return McSummary(spec=spec, cells=cells, metadata=meta)


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> McSummary:
    return run_size(spec, jobs) if spec.mode == "size" else run_power(spec, jobs)


def _filtered(values, chosen):
    if chosen is None:
        return tuple(values)
    chosen = tuple(chosen)
    missing = [v for v in chosen if v not in values]
    if missing:
        raise InputError(f"requested cells {missing} are not part of this table")
    return chosen


def reproduce(table_id: str, replications: int = 1000, seed: int = 0, jobs: int = 1,
              n_values=None, xi_values=None, c0_values=None, k_factors=None) -> dict:
    """Re-run one published table/figure at desk scale and lay our numbers beside the originals.

    Returns {"table_id", "rows": [...], "summaries": {...}} where each row
    carries the cell parameters, this build's estimate, its binomial SE, and
    the published value where tabulated.
    """
    if replications < 1:
        raise InputError(f"replications must be >= 1, got {replications}")
    if table_id not in TABLE_IDS:
        raise InputError(f"unknown table id {table_id!r}; expected one of {TABLE_IDS}")

    rows: list[dict] = []
    summaries: dict[str, McSummary] = {}

    if table_id == "T1":
        ns = _filtered((500, 1000, 5000), n_values)
        xis = _filtered((0.3, 0.5, 0.7), xi_values)
        c0s = _filtered((0.01, 0.1, 1.0), c0_values)
        ks = _filtered((2, 4), k_factors)
        for k in ks:
            spec = ExperimentSpec(
                design="I", mode="size", null="decreasing", h_family="mono",
                n_values=ns, xi_values=xis, c0_values=c0s,
                alphas=(0.10, 0.05, 0.01), replications=replications,
                k_factor=k, master_seed=seed,
            )
            summary = run_size(spec, jobs)
            summaries[f"k{k}"] = summary
            for cell in summary.cells:
                ref = published.TABLE1[(cell.params["n"], cell.params["c0"], cell.params["xi"], k)]
                for alpha, key in ((0.10, "r10"), (0.05, "r05"), (0.01, "r01")):
                    rows.append({
                        **cell.params, "k_factor": k, "alpha": alpha,
                        "ours": cell.reject_rate[alpha], "se": cell.se[alpha], "published": ref[key],
                    })
                rows.append({**cell.params, "k_factor": k, "alpha": 0.05, "metric": "avg_J",
                             "ours": cell.avg_j[0.05], "se": float("nan"), "published": ref["jhat"]})
        return {"table_id": table_id, "rows": rows, "summaries": summaries}

    if table_id == "T2":
        ns = _filtered((500, 1000, 5000), n_values)
        xis = _filtered((0.3, 0.5, 0.7), xi_values)
        ks = _filtered((2, 4), k_factors)
        for k in ks:
            spec = ExperimentSpec(
                design="I", mode="size", null="linear", h_family="sin",
                n_values=ns, xi_values=xis, c_a_values=(0.0,), c_b_values=(0.0,),
                alphas=(0.05,), replications=replications, k_factor=k, master_seed=seed,
            )
            summary = run_size(spec, jobs)
            summaries[f"k{k}"] = summary
            for cell in summary.cells:
                ref = published.TABLE2[(cell.params["n"], cell.params["xi"], k)]
                rows.append({**cell.params, "k_factor": k, "alpha": 0.05,
                             "ours": cell.reject_rate[0.05], "se": cell.se[0.05], "published": ref["r05"]})
                rows.append({**cell.params, "k_factor": k, "alpha": 0.05, "metric": "avg_J",
                             "ours": cell.avg_j[0.05], "se": float("nan"), "published": ref["jhat"]})
        return {"table_id": table_id, "rows": rows, "summaries": summaries}

    if table_id in ("F1", "F2"):
        ns = _filtered((500, 1000) if table_id == "F1" else (500,), n_values)
        xis = _filtered((0.5, 0.7), xi_values)
        spec = ExperimentSpec(
            design="I", mode="size_adjusted_power",
            null="decreasing" if table_id == "F1" else "linear",
            h_family="sin", n_values=ns, xi_values=xis,
            c_a_values=(0.1, 0.3, 0.6, 1.0, 1.5, 2.0), c_b_values=(0.0, 0.5, 1.0),
            alphas=(0.05,), replications=replications, k_factor=4, master_seed=seed,
        )
        summary = run_power(spec, jobs)
        summaries["power"] = summary
        for cell in summary.cells:
            rows.append({**cell.params, "alpha": 0.05, "ours": cell.reject_rate[0.05],
                         "se": cell.se[0.05], "published": float("nan")})
        return {"table_id": table_id, "rows": rows, "summaries": summaries}

    if table_id == "supp-C":
        ns = _filtered((500, 1000, 5000), n_values)
        xis = _filtered((0.3, 0.5, 0.7), xi_values)
        ks = _filtered((2, 4), k_factors)
        for k in ks:
            spec = ExperimentSpec(
                design="II", mode="size", null="increasing", h_family="design2",
                n_values=ns, xi_values=xis, c_a_values=(0.0, 0.1), c_b_values=(0.0,),
                alphas=(0.05,), replications=replications, k_factor=k, master_seed=seed,
            )
            summary = run_size(spec, jobs)
            summaries[f"k{k}"] = summary
            for cell in summary.cells:
                ref = published.SUPP_C[(cell.params["n"], cell.params["c_a"], cell.params["xi"], k)]
                rows.append({**cell.params, "k_factor": k, "alpha": 0.05,
                             "ours": cell.reject_rate[0.05], "se": cell.se[0.05], "published": ref["r05"]})
                rows.append({**cell.params, "k_factor": k, "alpha": 0.05, "metric": "avg_J",
                             "ours": cell.avg_j[0.05], "se": float("nan"), "published": ref["jhat"]})
        return {"table_id": table_id, "rows": rows, "summaries": summaries}

    # supp-D: structural (K=4J) vs image-space test of linearity
    ns = _filtered((500, 1000, 5000), n_values)
    xis = _filtered((0.3, 0.5, 0.7), xi_values)
    for design, family in (("I", "sin"), ("multivariate", "quad")):
        for statistic, key in (("structural", "struct"), ("image-space", "it")):
            spec = ExperimentSpec(
                design=design, mode="size", statistic=statistic, null="linear", h_family=family,
                n_values=ns, xi_values=xis, c_a_values=(0.0,), c_b_values=(0.0,),
                alphas=(0.05,), replications=replications, k_factor=4, master_seed=seed,
            )
            summary = run_size(spec, jobs)
            summaries[f"{design}:{statistic}"] = summary
            for cell in summary.cells:
                ref = published.SUPP_D[(cell.params["n"], design, cell.params["xi"])]
                rows.append({**cell.params, "design": design, "statistic": statistic, "alpha": 0.05,
                             "ours": cell.reject_rate[0.05], "se": cell.se[0.05], "published": ref[key]})
                rows.append({**cell.params, "design": design, "statistic": statistic, "alpha": 0.05,
                             "metric": "avg_dim", "ours": cell.avg_j[0.05], "se": float("nan"),
                             "published": ref["jhat" if statistic == "structural" else "khat"]})
    return {"table_id": table_id, "rows": rows, "summaries": summaries}
