"""Command-line front end.

Subcommands: `test` (run the adaptive test on a CSV file), `cs`
(confidence-set membership of a candidate function), `simulate` (run an
experiment spec), `reproduce` (re-run a published table at desk scale).

CSV dialect: comma-separated, UTF-8, '.' decimals, header required. Columns:
y, x (or x1..xd), w (or w1..wdw), optional mu. Exit codes: 0 completed,
2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .adaptive import NullSpec, RunConfig, adaptive_test, cs_contains
from .basis import BasisSpec
from .errors import InputError, NumericalError
from .npiv import parametric_design
from .sim import ExperimentSpec, McSummary, reproduce, run_experiment

__all__ = ["main", "load_csv_dataset", "resolve_config", "render_report"]

_BASIS_CHOICES = ("bspline2", "bspline3", "cosine", "power")
_NULL_CHOICES = ("decreasing", "increasing", "convex", "concave", "linear", "quadratic")


def _json_safe(obj):
    """Make payloads RFC-compliant: non-finite floats become strings."""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isfinite(f):
            return f
        return "NaN" if math.isnan(f) else ("Infinity" if f > 0 else "-Infinity")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    return obj


def dump_json(payload) -> str:
    return json.dumps(_json_safe(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


class CsvDataset:
    """Validated columns from a user CSV file."""

    def __init__(self, y, x, w, mu=None, columns=None):
        self.y = y
        self.x = x
        self.w = w
        self.mu = mu
        self.columns = columns or []

    @property
    def n(self) -> int:
        return self.y.shape[0]


def load_csv_dataset(path: str) -> CsvDataset:
    """Read and validate a dataset; malformed files raise InputError with a line number."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputError(f"{path}: file is empty") from None
            header = [h.strip() for h in header]
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row or all(cell.strip() == "" for cell in row):
                    continue
                if len(row) != len(header):
                    raise InputError(
                        f"{path}, line {lineno}: expected {len(header)} cells, got {len(row)}"
                    )
                parsed = []
                for col, cell in zip(header, row):
                    cell = cell.strip()
                    if cell == "":
                        raise InputError(f"{path}, line {lineno}: missing value in column {col!r}")
                    try:
                        val = float(cell)
                    except ValueError:
                        raise InputError(
                            f"{path}, line {lineno}: non-numeric value {cell!r} in column {col!r}"
                        ) from None
                    if not math.isfinite(val):
                        raise InputError(f"{path}, line {lineno}: non-finite value in column {col!r}")
                    parsed.append(val)
                rows.append(parsed)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc

    if len(set(header)) != len(header):
        raise InputError(f"{path}: duplicate column names in header")
    data = {name: np.array([r[i] for r in rows]) for i, name in enumerate(header)}

    def gather(prefix: str) -> np.ndarray | None:
        if prefix in data:
            return data[prefix]
        numbered = sorted(
            (name for name in data if name.startswith(prefix) and name[len(prefix):].isdigit()),
            key=lambda name: int(name[len(prefix):]),
        )
        if not numbered:
            return None
        expected = [f"{prefix}{i}" for i in range(1, len(numbered) + 1)]
        if numbered != expected:
            raise InputError(f"{path}: {prefix}-columns must be consecutive ({expected}), got {numbered}")
        cols = np.column_stack([data[name] for name in numbered])
        return cols[:, 0] if cols.shape[1] == 1 else cols

    if "y" not in data:
        raise InputError(f"{path}: required column 'y' is missing")
    x = gather("x")
    w = gather("w")
    if x is None:
        raise InputError(f"{path}: regressor column 'x' (or x1..xd) is missing")
    if w is None:
        raise InputError(f"{path}: instrument column 'w' (or w1..wdw) is missing")
    n = data["y"].shape[0]
    if n < 20:
        raise InputError(f"{path}: need at least 20 rows, got {n}")
    mu = data.get("mu")
    if mu is not None and np.any(mu < 0):
        raise InputError(f"{path}: weight column 'mu' must be nonnegative")
    return CsvDataset(y=data["y"], x=x, w=w, mu=mu, columns=header)


def _parse_grid(text: str):
    if text in ("dyadic", "knots"):
        return text
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise InputError(
            f"--grid must be 'dyadic', 'knots', or a comma-separated list of dims, got {text!r}"
        ) from None


def resolve_config(args, x=None) -> RunConfig:
    """Config file -> flags -> environment, with flags overriding file values."""
    base: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                base = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(base, dict):
            raise InputError(f"config {args.config} must hold a JSON object")
        base.setdefault("schema_version", 1)
    cfg = RunConfig.from_dict(base) if base else RunConfig()
    updates: dict = {}
    if getattr(args, "alpha", None) is not None:
        updates["alpha"] = args.alpha
    if getattr(args, "basis", None) is not None:
        updates["basis"] = args.basis
    if getattr(args, "grid", None) is not None:
        updates["grid"] = _parse_grid(args.grid)
    if getattr(args, "kfactor", None) is not None:
        updates["k_factor"] = args.kfactor
    seed = getattr(args, "seed", None)
    if seed is None and cfg.seed is None:
        env_seed = os.environ.get("NPIV_SEED")
        if env_seed is not None:
            try:
                seed = int(env_seed)
            except ValueError:
                raise InputError(f"NPIV_SEED must be an integer, got {env_seed!r}") from None
    if seed is not None:
        updates["seed"] = seed
    if getattr(args, "support", None) is not None:
        lo, hi = (float(tok) for tok in args.support.split(","))
        updates["support"] = (lo, hi)
    if getattr(args, "quantile_knots", False):
        updates["knot_rule"] = "quantile"
    if updates:
        merged = cfg.to_dict()
        merged.update({k: (list(v) if isinstance(v, tuple) and k == "grid" else v) for k, v in updates.items()})
        if "support" in updates:
            merged["support"] = list(updates["support"])
        cfg = RunConfig.from_dict(merged)
    return cfg


def render_report(report, fmt: str) -> str:
    d = report.to_dict()
    if fmt == "json":
        return dump_json(d)
    if fmt == "csv":
        buf = io.StringIO()
        fields = ["J", "K", "D", "v", "s_hat", "gamma", "eta", "W", "p_value", "n_active"]
        writer = csv.DictWriter(buf, fieldnames=fields)
        writer.writeheader()
        for rec in d["per_J"]:
            writer.writerow({k: rec.get(k) for k in fields})
        return buf.getvalue()
    lines = [
        f"adaptive {d['statistic']} test | null: {d['null']} | alpha = {d['alpha']:g}",
        f"candidate set ({d['grid']['mode']}): {d['grid']['J_list']}  "
        f"[J_max_hat = {d['grid']['J_max_hat']}]",
        "",
        f"{'J':>4} {'K':>5} {'W_J':>12} {'gamma':>6} {'eta':>10} {'D_J':>13} {'v_J':>12} {'p_J':>9}",
    ]
    for rec in d["per_J"]:
        w_txt = f"{rec['W']:.4f}" if isinstance(rec["W"], float) else str(rec["W"])
        p_txt = f"{rec['p_value']:.4f}" if isinstance(rec["p_value"], float) else str(rec["p_value"])
        lines.append(
            f"{rec['J']:>4} {rec['K']:>5} {w_txt:>12} {rec['gamma']:>6} "
            f"{rec['eta']:>10.4f} {rec['D']:>13.6g} {rec['v']:>12.6g} {p_txt:>9}"
        )
    w_rep = d["W_reported"]
    w_rep_txt = f"{w_rep:.4f}" if isinstance(w_rep, float) else str(w_rep)
    lines += [
        "",
        f"reject H0: {'yes' if d['reject'] else 'no'}",
        f"selected J set: {d['J_selected_set']}   reported J: {d['J_reported']}   "
        f"W at reported J: {w_rep_txt}",
        f"p value: {d['p_value']:.4g}  (Bonferroni threshold alpha/#candidates = {d['p_threshold']:.4g})",
    ]
    if d.get("warnings"):
        lines.append("warnings: " + "; ".join(d["warnings"]))
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_test(args) -> int:
    data = load_csv_dataset(args.data)
    config = resolve_config(args, data.x)
    null = NullSpec.from_name(args.null)
    report = adaptive_test(data.y, data.x, data.w, null, alpha=config.alpha, config=config, mu=data.mu)
    _emit(render_report(report, args.format), args.out)
    return 0


def _load_candidate(path: str, data: CsvDataset, config: RunConfig):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read candidate {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"candidate {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InputError(f"candidate {path} must be a JSON object with a 'kind' field")
    kind = doc["kind"]
    if kind == "coeffs":
        basis = doc.get("basis")
        coeffs = doc.get("coefficients")
        if not isinstance(basis, dict) or coeffs is None:
            raise InputError("coeffs candidate needs 'basis' and 'coefficients'")
        name = basis.get("name", config.basis)
        if name not in _BASIS_CHOICES:
            raise InputError(f"unknown candidate basis {name!r}")
        family = "bspline" if name.startswith("bspline") else name
        order = 3 if name == "bspline2" else 4
        spec = BasisSpec(
            family=family,
            dim=int(basis.get("dim", len(coeffs))),
            order=order if family == "bspline" else 3,
            support=tuple(basis.get("support", list(config.support))),
        )
        return (np.asarray(coeffs, dtype=float), spec)
    if kind == "parametric":
        model = doc.get("model")
        theta = doc.get("theta")
        if model not in ("linear", "quadratic") or theta is None:
            raise InputError("parametric candidate needs model in {linear, quadratic} and 'theta'")
        theta = np.asarray(theta, dtype=float)

        def fn(x, model=model, theta=theta):
            z, _ = parametric_design(np.asarray(x, dtype=float), model)
            if z.shape[1] != theta.shape[0]:
                raise InputError(f"theta has {theta.shape[0]} entries, design needs {z.shape[1]}")
            return z @ theta

        return fn
    if kind == "values":
        values = np.asarray(doc.get("values", []), dtype=float)
        if values.shape != (data.n,):
            raise InputError(f"values candidate must have one entry per row ({data.n}), got {values.shape}")
        return values
    raise InputError(f"unknown candidate kind {kind!r}; expected coeffs, parametric, or values")


def _cmd_cs(args) -> int:
    data = load_csv_dataset(args.data)
    config = resolve_config(args, data.x)
    null = NullSpec.from_name(args.null)
    candidate = _load_candidate(args.candidate, data, config)
    contained, binding, detail = cs_contains(
        candidate, data.y, data.x, data.w, alpha=config.alpha, config=config, null=null, mu=data.mu
    )
    payload = {
        "contained": contained,
        "binding_J": binding,
        "alpha": detail["alpha"],
        "J_list": detail["J_list"],
        "per_J": detail["per_J"],
        "config": config.to_dict(),
    }
    if args.format == "text":
        lines = [f"contained in the {1 - config.alpha:.0%} confidence set: {'yes' if contained else 'no'}"]
        if binding is not None:
            lines.append(f"first violated candidate dimension: J = {binding}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(dump_json(payload), args.out)
    return 0


def _summary_csv(summary: McSummary) -> str:
    rows = summary.rows()
    fields = sorted({key for row in rows for key in row})
    ordered = [f for f in ("n", "xi", "c0", "c_a", "c_b", "alpha", "reject_rate", "se", "avg_J",
                           "replications", "failures", "adjusted_crit") if f in fields]
    ordered += [f for f in fields if f not in ordered]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ordered, restval="")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in ordered})
    return buf.getvalue()


def _cmd_simulate(args) -> int:
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read spec {args.spec}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"spec {args.spec} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("experiment spec must be a JSON object")
    version = doc.pop("schema_version", 1)
    if version != 1:
        raise InputError(f"unsupported experiment schema version {version}")
    if args.reps is not None:
        doc["replications"] = args.reps
    if args.seed is not None:
        doc["master_seed"] = args.seed
    spec = ExperimentSpec.from_dict(doc)
    started = time.perf_counter()
    summary = run_experiment(spec, jobs=args.jobs)
    summary.metadata["version"] = __version__
    summary.metadata["master_seed"] = spec.master_seed
    summary.metadata.setdefault("timings", {})["wall_seconds"] = time.perf_counter() - started
    base = args.out or "mc_results"
    with open(base + ".json", "w", encoding="utf-8") as fh:
        fh.write(dump_json(summary.to_dict()))
    with open(base + ".csv", "w", encoding="utf-8") as fh:
        fh.write(_summary_csv(summary))
    sys.stdout.write(f"wrote {base}.json and {base}.csv ({len(summary.rows())} rows)\n")
    return 0


def _cmd_reproduce(args) -> int:
    result = reproduce(args.table, replications=args.reps, seed=args.seed if args.seed is not None else 0,
                       jobs=args.jobs)
    rows = result["rows"]
    if args.format == "json":
        payload = {"table_id": result["table_id"], "rows": rows, "version": __version__}
        _emit(dump_json(payload), args.out)
        return 0
    fields = sorted({key for row in rows for key in row})
    front = [f for f in ("n", "design", "statistic", "c0", "c_a", "c_b", "xi", "k_factor",
                         "alpha", "metric", "ours", "se", "published") if f in fields]
    front += [f for f in fields if f not in front]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=front, restval="")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _json_safe(row.get(k, "")) for k in front})
    if args.format == "csv" or args.out:
        _emit(buf.getvalue(), args.out)
        return 0
    # text: fixed-width dump of the same rows
    lines = ["  ".join(f"{f:>10}" for f in front)]
    for row in rows:
        cells = []
        for f in front:
            v = row.get(f, "")
            cells.append(f"{v:>10.4f}" if isinstance(v, float) and math.isfinite(v) else f"{str(v):>10}")
        lines.append("  ".join(cells))
    _emit("\n".join(lines) + "\n", None)
    return 0


def _add_common_test_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--alpha", type=float, default=None, help="nominal level (default 0.05)")
    p.add_argument("--null", choices=_NULL_CHOICES, default="decreasing", help="null hypothesis")
    p.add_argument("--basis", choices=_BASIS_CHOICES, default=None, help="sieve family (default bspline2)")
    p.add_argument("--grid", default=None, help="candidate rule: dyadic, knots, or e.g. 3,4,5")
    p.add_argument("--kfactor", type=int, choices=(2, 4), default=None, help="instrument dimension K = c*J")
    p.add_argument("--seed", type=int, default=None, help="seed (env NPIV_SEED is the fallback)")
    p.add_argument("--support", default=None, help="basis support as 'lo,hi' (default 0,1)")
    p.add_argument("--quantile-knots", action="store_true", help="place interior knots at data quantiles")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv", "text"), default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="npivtest",
                                     description="Adaptive restriction tests for IV regression")
    parser.add_argument("--version", action="version", version=f"npivtest {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run the adaptive test on CSV data")
    p_test.add_argument("data", help="CSV file with columns y, x (or x1..xd), w (or w1..wdw), optional mu")
    _add_common_test_flags(p_test)
    p_test.set_defaults(func=_cmd_test)

    p_cs = sub.add_parser("cs", help="confidence-set membership of a candidate function")
    p_cs.add_argument("data", help="CSV data file")
    p_cs.add_argument("candidate", help="candidate JSON (kind: coeffs | parametric | values)")
    _add_common_test_flags(p_cs)
    p_cs.set_defaults(func=_cmd_cs)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo experiment spec")
    p_sim.add_argument("spec", help="experiment spec JSON file")
    p_sim.add_argument("--reps", type=int, default=None, help="override the spec's replication count")
    p_sim.add_argument("--seed", type=int, default=None, help="override the spec's master seed")
    p_sim.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_sim.add_argument("--out", default=None, help="output basename (default mc_results)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_rep = sub.add_parser("reproduce", help="re-run a published table/figure at desk scale")
    p_rep.add_argument("table", choices=("T1", "T2", "F1", "F2", "supp-C", "supp-D"))
    p_rep.add_argument("--reps", type=int, default=1000)
    p_rep.add_argument("--seed", type=int, default=None)
    p_rep.add_argument("--jobs", type=int, default=1)
    p_rep.add_argument("--out", default=None)
    p_rep.add_argument("--format", choices=("json", "csv", "text"), default="text")
    p_rep.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
