"""Command-line front end.

One command equals one reproducible run: the resolved configuration is
embedded in the JSON output, floats are serialized with 17 significant
digits, and dictionary keys are emitted sorted, so identical configurations
produce bitwise-identical documents.
"""

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import bounds
from .models import make_model
from .quadrature import discretize_gaussian, growth_bound_check, moments
from .transport import check_lsi, check_talagrand, reweight

SCHEMA_VERSION = 1
THEOREM_IDS = ("main", "restricted", "minimum", "talagrand", "lsi", "growth",
               "moments", "area-element", "second-moment")
SWEEP_PARAMETERS = ("resolution", "s", "a", "b", "n")
MOMENT_ORDERS = (1, 2, 4, 6)
LSI_BETA = 0.1


class UsageError(Exception):
    """Configuration or argument problem; maps to exit status 2."""


# ----------------------------------------------------------------------
# deterministic serialization


def _format_float(x):
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in report")
    text = "%.17g" % x
    return text


def _to_json(obj, indent=0):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = []
        for key in sorted(obj):
            parts.append(f'{inner}"{key}": {_to_json(obj[key], indent + 1)}')
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [inner + _to_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        # json string escaping without pulling in the json module's float
        # formatting anywhere else
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\t", "\\t")
        return f'"{out}"'
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def _csv_cell(value):
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, (list, tuple)):
        return ";".join(_csv_cell(v) for v in value)
    return str(value)


def _flatten_report(report_dict, extra=None):
    row = {}
    if extra:
        row.update(extra)
    for key, value in report_dict.items():
        if key in ("constants", "discretization"):
            for sub, subval in value.items():
                row[f"{key}.{sub}"] = _csv_cell(subval)
        else:
            row[key] = _csv_cell(value)
    return row


def _write_csv(path, rows):
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _csv_cell(value)
                             for key, value in row.items()})


# ----------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    model: str = "gaussian"
    n: int = 2
    k: int = 0
    resolution: int = None
    s: tuple = (0.0,)
    radius_cap: float = None
    seed: int = None
    out: str = None
    csv: bool = False
    values: tuple = None
    a_max: float = None

    def to_dict(self):
        doc = asdict(self)
        doc["s"] = list(self.s)
        doc["values"] = list(self.values) if self.values is not None else None
        return doc


_CONFIG_CASTS = {
    "model": str,
    "n": int,
    "k": int,
    "resolution": int,
    "s": str,
    "radius_cap": float,
    "seed": int,
    "out": str,
    "csv": lambda v: v.strip().lower() in ("1", "true", "yes"),
    "values": str,
    "a_max": float,
}


def _parse_config_file(path):
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    out = {}
    with open(path) as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(
                    f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_CASTS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _CONFIG_CASTS[key](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: "
                                 f"{exc}") from exc
    return out


def _parse_values(text, label="values"):
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"bad {label} list {text!r}: {exc}") from exc
    if not values:
        raise UsageError(f"{label} must list at least one number")
    return values


def _resolve_config(args):
    file_cfg = {}
    if args.config is not None:
        file_cfg = _parse_config_file(args.config)
    merged = {}
    for field_name in ("model", "n", "k", "resolution", "radius_cap",
                       "seed", "out", "a_max"):
        flag = getattr(args, field_name, None)
        if flag is not None:
            merged[field_name] = flag
        elif field_name in file_cfg:
            merged[field_name] = file_cfg[field_name]
    merged["csv"] = bool(getattr(args, "csv", False) or
                         file_cfg.get("csv", False))
    s_text = getattr(args, "s", None)
    if s_text is None:
        s_text = file_cfg.get("s")
    if s_text is not None:
        merged["s"] = _parse_values(s_text, label="--s")
    values_text = getattr(args, "values", None)
    if values_text is None:
        values_text = file_cfg.get("values")
    if values_text is not None:
        merged["values"] = _parse_values(values_text, label="--values")
    defaults = RunConfig()
    cfg = RunConfig(**{**asdict(defaults), **merged})
    _validate_config(cfg)
    return cfg


def _validate_config(cfg):
    if cfg.model not in ("gaussian", "cylinder", "sphere"):
        raise UsageError(f"unknown model family {cfg.model!r}")
    if cfg.n < 2:
        raise UsageError("n must be at least 2")
    if cfg.model == "cylinder":
        if cfg.k < 1 or cfg.n - cfg.k < 2:
            raise UsageError(
                "cylinder needs k >= 1 and n - k >= 2, got "
                f"n={cfg.n} k={cfg.k}")
    elif cfg.k != 0:
        raise UsageError(f"{cfg.model} does not take a k factor")
    if cfg.resolution is not None and cfg.resolution < 8:
        raise UsageError("resolution must be at least 8")
    if any(s < 0.0 for s in cfg.s):
        raise UsageError("s must be nonnegative")
    if cfg.radius_cap is not None and cfg.radius_cap <= 0.0:
        raise UsageError("radius cap must be positive")
    if cfg.csv and cfg.out is None:
        raise UsageError("--csv needs --out to derive the table path")


def _thread_cap():
    raw = os.environ.get("SHRINKER_OT_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError as exc:
        raise UsageError(
            f"SHRINKER_OT_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise UsageError("SHRINKER_OT_THREADS must be at least 1")
    return cap


def _build_model(cfg):
    return make_model(cfg.model, cfg.n, cfg.k)


# ----------------------------------------------------------------------
# output plumbing


def _emit(doc, cfg, rows=None):
    text = _to_json(doc, 0) + "\n"
    if cfg.out:
        with open(cfg.out, "w") as handle:
            handle.write(text)
        if cfg.csv and rows:
            _write_csv(_csv_path(cfg.out), rows)
    else:
        sys.stdout.write(text)


def _csv_path(out_path):
    root, ext = os.path.splitext(out_path)
    return (root if ext else out_path) + ".csv"


def _summarize(reports):
    for rep in reports:
        status = "pass" if rep["passed"] else "FAIL"
        print(f"[{status}] {rep['theorem_id']}: lhs={rep['lhs']:.6g} "
              f"rhs={rep['rhs']:.6g} margin={rep['margin']:.6g}",
              file=sys.stderr)


# ----------------------------------------------------------------------
# commands


def _halfspace_ratio(model):
    """Density ratio of the half-space restriction, doubled back to mass 1.

    The coordinate is the first Euclidean-factor axis on cylinders and the
    first ambient axis otherwise; no grid atom sits on the dividing plane.
    """
    column = model.m + 1 if model.kind == "cylinder" else 0

    def ratio(points):
        return 2.0 * (points[:, column] >= 0.0).astype(float)

    return ratio


def _run_checks(cfg, theorem):
    """One report per check; only `restricted` expands over the s list."""
    model = _build_model(cfg)
    if theorem == "main":
        return [bounds.check_main_bound(model, resolution=cfg.resolution)]
    if theorem == "restricted":
        return [bounds.check_restricted_bound(model, s=s,
                                              resolution=cfg.resolution)
                for s in cfg.s]
    if theorem == "minimum":
        return [bounds.check_minimum_point_bound(model,
                                                 resolution=cfg.resolution)]
    if theorem == "talagrand":
        return [check_talagrand(model, _halfspace_ratio(model),
                                resolution=cfg.resolution)]
    if theorem == "lsi":
        nu = discretize_gaussian(model.n, cfg.resolution,
                                 radius_cap=cfg.radius_cap).normalized()
        eta = reweight(nu, lambda P: np.exp(-LSI_BETA * np.sum(P * P,
                                                               axis=1)))
        return [check_lsi(eta, nu,
                          grad_log_ratio=lambda P: -2.0 * LSI_BETA * P)]
    if theorem == "growth":
        return [growth_bound_check(model, lambda r: r * r, R=10.0, r0=1.0,
                                   resolution=cfg.resolution)]
    if theorem == "moments":
        return [_moment_stability_report(model)]
    if theorem == "area-element":
        return [model.area_element_bound_check(radius_cap=cfg.radius_cap)]
    if theorem == "second-moment":
        return [bounds.check_second_moment(model, resolution=cfg.resolution)]
    raise UsageError(f"unknown theorem id {theorem!r}; "
                     f"choose from {', '.join(THEOREM_IDS)}")


def _moment_stability_report(model):
    """Moment finiteness phrased as a report: the k-moments at radius cap 12
    move by less than 0.1% relative when the cap doubles to 24."""
    from .reports import make_report

    worst = 0.0
    constants = {}
    for order in MOMENT_ORDERS:
        low = moments(model, order, radius_cap=12.0)
        high = moments(model, order, radius_cap=24.0)
        change = abs(high.value - low.value) / max(abs(high.value), 1e-300)
        worst = max(worst, change)
        constants[f"moment_{order}"] = high.value
        constants[f"moment_{order}_change"] = change
        constants[f"moment_{order}_tail"] = high.tail_bound
    return make_report("moments", worst, 1e-3, tolerance=0.0,
                       constants=constants,
                       discretization={"radius_caps": [12.0, 24.0],
                                       "orders": list(MOMENT_ORDERS)})


def cmd_model_info(cfg):
    model = _build_model(cfg)
    ent = bounds.entropy(model)
    point = model.base_point
    grad = np.asarray(model.potential_gradient(point), dtype=float)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "model-info",
        "config": cfg.to_dict(),
        "model": {
            "kind": model.kind,
            "n": model.n,
            "k": model.k,
            "entropy": ent.value,
            "entropy_numeric": ent.numeric,
            "entropy_discrepancy": ent.discrepancy,
            "hamilton_constant": (float(model.scalar_curvature(point))
                                  + float(grad @ grad)
                                  - float(model.potential(point))),
            "hamilton_residual": float(model.hamilton_residual(point)),
            "potential_at_base": float(model.potential_at_base()),
            "scalar_curvature_at_base":
                float(model.scalar_curvature(point)),
            "base_offset": float(model.base_offset()),
            "cut_radius": (float(model.cut_radius)
                           if math.isfinite(model.cut_radius) else None),
            "ambient_dim": int(model.ambient_dim),
        },
    }
    _emit(doc, cfg)
    return 0


def cmd_check(cfg, theorem):
    if theorem not in THEOREM_IDS:
        raise UsageError(f"unknown theorem id {theorem!r}; "
                         f"choose from {', '.join(THEOREM_IDS)}")
    reports = [rep.to_dict() for rep in _run_checks(cfg, theorem)]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "check",
        "theorem": theorem,
        "config": cfg.to_dict(),
        "reports": reports,
    }
    rows = [_flatten_report(rep) for rep in reports]
    _emit(doc, cfg, rows)
    if cfg.out:
        _summarize(reports)
    return 0 if all(rep["passed"] for rep in reports) else 1


def _sweep_row(cfg, parameter, value):
    """One single-resolution bound evaluation for a sweep table."""
    if parameter == "n":
        model = make_model(cfg.model, int(value), cfg.k)
    else:
        model = _build_model(cfg)
    s = cfg.s[0]
    resolution = cfg.resolution
    if parameter == "resolution":
        resolution = int(value)
    elif parameter == "s":
        s = float(value)
    bound = bounds.fit_potential_bound(model, s, a_max=cfg.a_max)
    if parameter == "a":
        if value < bound.a:
            raise UsageError(
                f"swept a={value} is below the structural minimum {bound.a}")
        bound = bounds.PotentialBound(float(value), bound.b, bound.s)
    elif parameter == "b":
        if value < bound.b:
            raise UsageError(
                f"swept b={value} is below the fitted feasible {bound.b}")
        bound = bounds.PotentialBound(bound.a, float(value), bound.s)
    sides = bounds._transport_sides(model, s, resolution
                                    or bounds.DEFAULT_RESOLUTION[model.kind])
    offset = float(model.potential_at_base()) - float(model.entropy)
    rhs, alpha = bounds._rhs_value(model, bound, s, offset,
                                   sides["nu_frac"], sides["gam_frac"])
    lhs = sides["lhs"]
    return {
        "parameter": parameter,
        "value": (int(value) if parameter in ("resolution", "n")
                  else float(value)),
        "theorem_id": "restricted" if s > 0.0 else "main",
        "lhs": lhs,
        "rhs": rhs,
        "margin": rhs - lhs,
        "passed": bool(lhs <= rhs + 1e-9 * max(1.0, abs(rhs))),
        "alpha": alpha,
        "a": bound.a,
        "b": bound.b,
        "s": s,
        "nu_mass": sides["nu_frac"],
        "gamma_mass": sides["gam_frac"],
        "support": sides["support"],
    }


def cmd_sweep(cfg, parameter):
    if parameter not in SWEEP_PARAMETERS:
        raise UsageError(f"unknown sweep parameter {parameter!r}; "
                         f"choose from {', '.join(SWEEP_PARAMETERS)}")
    if not cfg.values:
        raise UsageError("sweep needs a values list "
                         "(positional, comma-separated numbers)")
    if parameter in ("resolution", "n"):
        for value in cfg.values:
            if value != int(value):
                raise UsageError(f"{parameter} values must be integers")
    workers = min(_thread_cap(), len(cfg.values))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda v: _sweep_row(cfg, parameter, v),
                                 cfg.values))
    else:
        rows = [_sweep_row(cfg, parameter, v) for v in cfg.values]
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "sweep",
        "parameter": parameter,
        "config": cfg.to_dict(),
        "rows": rows,
    }
    _emit(doc, cfg, rows)
    return 0 if all(row["passed"] for row in rows) else 1


def _parse_orders(text):
    if text is None:
        return MOMENT_ORDERS
    try:
        orders = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise UsageError(f"bad orders list {text!r}: {exc}") from exc
    if not orders or any(k < 1 for k in orders):
        raise UsageError("orders must be positive integers")
    return orders


def cmd_moments(cfg, orders_text=None):
    model = _build_model(cfg)
    rows = []
    for order in _parse_orders(orders_text):
        result = moments(model, order, radius_cap=cfg.radius_cap,
                         resolution=cfg.resolution)
        rows.append({
            "order": order,
            "value": result.value,
            "tail_bound": result.tail_bound,
            "radius_cap": result.radius_cap,
        })
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "moments",
        "config": cfg.to_dict(),
        "rows": rows,
    }
    _emit(doc, cfg, rows)
    return 0


def cmd_fit_potential(cfg):
    model = _build_model(cfg)
    fits = []
    for s in cfg.s:
        bound = bounds.fit_potential_bound(model, s, a_max=cfg.a_max)
        fits.append({
            "a": bound.a,
            "b": bound.b,
            "s": bound.s,
            "grid_margin": bounds._bound_margin(model, bound),
            "alpha": bounds.alpha_constant(model.n, bound.s, bound.a,
                                           bound.b),
        })
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "fit-potential",
        "config": cfg.to_dict(),
        "fits": fits,
    }
    _emit(doc, cfg, fits)
    return 0


# ----------------------------------------------------------------------
# argument parsing


def _add_common_flags(sub):
    sub.add_argument("--model", choices=("gaussian", "cylinder", "sphere"))
    sub.add_argument("--n", type=int)
    sub.add_argument("--k", type=int)
    sub.add_argument("--resolution", type=int)
    sub.add_argument("--s", help="comma-separated restriction radii")
    sub.add_argument("--radius-cap", dest="radius_cap", type=float)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out")
    sub.add_argument("--csv", action="store_true", default=False)
    sub.add_argument("--config")
    sub.add_argument("--a-max", dest="a_max", type=float)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="shrinker-ot",
        description="Numerical transport-inequality checks on shrinking "
                    "soliton models")
    commands = parser.add_subparsers(dest="command", required=True)

    info = commands.add_parser("model-info",
                               help="derived constants and residuals")
    _add_common_flags(info)

    check = commands.add_parser("check", help="run one inequality check")
    check.add_argument("theorem", help="one of " + ", ".join(THEOREM_IDS))
    _add_common_flags(check)

    sweep = commands.add_parser("sweep",
                                help="one bound evaluation per value")
    sweep.add_argument("parameter",
                       help="one of " + ", ".join(SWEEP_PARAMETERS))
    sweep.add_argument("values", nargs="?",
                       help="comma-separated numbers")
    _add_common_flags(sweep)

    mom = commands.add_parser("moments", help="k-moment table")
    mom.add_argument("orders", nargs="?",
                     help="comma-separated moment orders "
                          "(default 1,2,4,6)")
    _add_common_flags(mom)

    fit = commands.add_parser("fit-potential",
                              help="fit the radial potential lower bound")
    _add_common_flags(fit)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return 2 if code is None else int(code)
    try:
        cfg = _resolve_config(args)
        if args.command == "model-info":
            return cmd_model_info(cfg)
        if args.command == "check":
            return cmd_check(cfg, args.theorem)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.parameter)
        if args.command == "moments":
            return cmd_moments(cfg, getattr(args, "orders", None))
        if args.command == "fit-potential":
            return cmd_fit_potential(cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
