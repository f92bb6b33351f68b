"""Command-line interface: ``mixdist {dist,mds,importance,tables,simulate}``.

Settings can come from a JSON file (``--config``); command-line flags take
precedence over file values. Errors are reported on a single stderr line
``mixdist: error: <kind>: <message>`` with a nonzero exit status.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import expected, simulation
from .analysis import classical_mds, loo_importance
from .catdissim import DISSIMILARITIES
from .data import load_csv
from .distance import (
    VARIANT_ALIASES,
    VARIANTS,
    WEIGHT_MODES,
    DistanceConfig,
    compute_variant,
    mixed_distance,
    preset_config,
    read_distance_csv,
)

FMT = "%.12g"

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, data=True):
    p.add_argument("--config", help="JSON file with default settings")
    if data:
        p.add_argument("--input", help="CSV file with a header row")
        p.add_argument(
            "--schema",
            help="column types as name:numeric,name:categorical or a JSON file",
        )
        p.add_argument("--variant", help=f"preset ({', '.join(VARIANTS)}) or 'custom'")
        p.add_argument("--weights", choices=WEIGHT_MODES, help="override the preset weighting")
        p.add_argument("--phi", type=float, help="Hennig-Liao phi (default 0.5)")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p.add_argument("--out", help="output directory")


def build_parser():
    parser = _Parser(prog="mixdist", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", help="distance matrix and per-variable summary")
    _common(p)
    p.add_argument("--condensed", action="store_true", help="write the upper triangle only")

    p = sub.add_parser("mds", help="classical scaling coordinates")
    _common(p)
    p.add_argument("--distance", help="distance CSV to embed instead of --input")
    p.add_argument("--dims", type=int, help="target dimension (default 2)")

    p = sub.add_parser("importance", help="leave-one-variable-out importance")
    _common(p)
    p.add_argument("--metric", choices=("mean_abs_diff", "alienation"))
    p.add_argument("--dims", type=int)

    p = sub.add_parser("tables", help="expected-value tables as CSV")
    _common(p, data=False)
    p.add_argument("which", choices=("table1", "table3", "appendixD"))
    p.add_argument("--q", type=int, nargs="+", help="numbers of categories")
    p.add_argument("--n", type=int, nargs="+", help="sample size(s)")
    p.add_argument("--reps", type=int, help="Monte-Carlo replications (table1)")
    p.add_argument("--kinds", nargs="+", choices=DISSIMILARITIES, help="appendixD dissimilarities")
    p.add_argument("--phi", type=float)

    p = sub.add_parser("simulate", help="simulation studies as tidy CSV")
    _common(p, data=False)
    p.add_argument("study", choices=("effects", "retrieval"))
    p.add_argument("--reps", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--cats", type=int, nargs="+", help="categories per discretized variable (effects)")
    p.add_argument("--qs", type=int, nargs="+", help="category counts to compare (retrieval)")
    p.add_argument("--variants", nargs="+", choices=VARIANTS)
    p.add_argument("--phi", type=float)
    p.add_argument("--sigma", type=float, help="noise standard deviation (default 0.03)")
    p.add_argument("--basis", choices=("orthonormal", "draw"), help="scale of the planted configuration")
    return parser


def _settings(args):
    """Merge the JSON config file (if any) under explicit flags."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
    for k, v in vars(args).items():
        if v is not None and k != "config":
            cfg[k] = v
    return cfg


def _parse_schema(schema):
    if isinstance(schema, dict):
        return schema
    if not schema:
        raise UsageError("a --schema is required")
    path = Path(schema)
    if path.suffix == ".json" and path.is_file():
        return json.loads(path.read_text(encoding="utf-8"))
    out = {}
    for item in schema.split(","):
        name, sep, kind = item.rpartition(":")
        if not sep or not name:
            raise UsageError(f"bad schema entry {item!r}; expected name:type")
        out[name.strip()] = kind.strip()
    return out


def _dataset(cfg):
    if not cfg.get("input"):
        raise UsageError("an --input CSV is required")
    return load_csv(cfg["input"], _parse_schema(cfg.get("schema")))


def _distance_spec(cfg):
    """Variant name or custom :class:`DistanceConfig` from settings."""
    variant = cfg.get("variant", "unbiased_independent")
    phi = cfg.get("phi", 0.5)
    if variant == "custom":
        return DistanceConfig(
            scaling=cfg.get("scaling", "sd"),
            dissimilarity=cfg.get("dissimilarity", "matching"),
            # "weights" is either a mode name or a {term: weight} mapping
            weight_mode=cfg.get("weights", "none") if isinstance(cfg.get("weights", "none"), str) else "none",
            weights=cfg["weights"] if isinstance(cfg.get("weights"), dict) else None,
            phi=phi,
            distributions=cfg.get("distributions"),
        )
    key = variant.lower().replace("-", "_")
    if VARIANT_ALIASES.get(key, key) not in VARIANTS:
        raise UsageError(f"unknown variant {variant!r}; presets: {', '.join(VARIANTS)}, custom")
    return VARIANT_ALIASES.get(key, key)


def _distance(ds, cfg):
    spec = _distance_spec(cfg)
    if isinstance(spec, DistanceConfig):
        return mixed_distance(ds, spec, variant="custom")
    mode = cfg.get("weights")
    if mode is not None and not isinstance(mode, str):
        raise UsageError("fixed per-term weights need variant 'custom'")
    return compute_variant(ds, spec, phi=cfg.get("phi", 0.5), weight_mode=mode)


def _outdir(cfg):
    out = Path(cfg.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _threads(cfg):
    t = cfg.get("threads")
    return t if t else (os.cpu_count() or 1)


def cmd_dist(cfg):
    ds = _dataset(cfg)
    D = _distance(ds, cfg)
    out = _outdir(cfg)
    D.to_csv(out / "distance.csv", condensed=cfg.get("condensed", False), fmt=FMT)
    summary = {
        "variant": D.variant,
        "n": D.n,
        "additive": D.additive,
        "variables": D.summary(),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    return summary


def cmd_mds(cfg):
    k = cfg.get("dims", 2)
    if cfg.get("distance"):
        D = read_distance_csv(cfg["distance"])
    else:
        D = _distance(_dataset(cfg), cfg).values
    conf = classical_mds(D, k)
    out = _outdir(cfg)
    with (out / "coordinates.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"dim{j + 1}" for j in range(k)])
        for row in conf.coords:
            w.writerow([FMT % v for v in row])
    report = {
        "eigenvalues": [float(v) for v in conf.eigenvalues],
        "n_positive": conf.n_positive,
        "negative_mass": conf.negative_mass,
        "padded": conf.padded,
    }
    (out / "eigenvalues.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    if conf.negative_mass > 0:
        print(
            f"mixdist: warning: {int(np.sum(conf.eigenvalues < 0))} negative eigenvalues "
            f"(total magnitude {FMT % conf.negative_mass}) were dropped",
            file=sys.stderr,
        )
    if conf.padded:
        print(f"mixdist: warning: fewer than {k} positive eigenvalues; padded with zeros", file=sys.stderr)
    return conf


def cmd_importance(cfg):
    ds = _dataset(cfg)
    spec = _distance_spec(cfg)
    if isinstance(cfg.get("weights"), str) and isinstance(spec, str):
        base = preset_config(spec, cfg.get("phi", 0.5))
        if base is None:
            raise UsageError(f"variant {spec!r} is not additive; --weights does not apply")
        spec = replace(base, weight_mode=cfg["weights"])
    dist_rep, mds_rep = loo_importance(
        ds, spec, k=cfg.get("dims", 2), phi=cfg.get("phi", 0.5), threads=_threads(cfg)
    )
    rep = mds_rep if cfg.get("metric") == "alienation" else dist_rep
    if rep.variant is None:
        rep.variant = "custom" if isinstance(spec, DistanceConfig) else spec
    out = _outdir(cfg)
    rep.to_csv(out / "importance.csv", fmt=FMT)
    rep.to_json(out / "importance.json")
    return rep


def _write_rows(rows, columns, path):
    fh = sys.stdout if path is None else Path(path).open("w", newline="", encoding="utf-8")
    try:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([FMT % r[c] if isinstance(r[c], float) else r[c] for c in columns])
    finally:
        if path is not None:
            fh.close()


def cmd_tables(cfg):
    which = cfg["which"]
    phi = cfg.get("phi", 0.5)
    if which == "table1":
        rows = expected.table1(
            n_values=tuple(cfg.get("n", (50, 500))),
            reps=cfg.get("reps", 200),
            seed=cfg.get("seed", 0),
            threads=_threads(cfg),
        )
        columns = ["distribution", "n", "sd", "range", "robust_range", "sd_sd", "range_sd", "robust_range_sd"]
    elif which == "table3":
        n = cfg.get("n", [160])[0]
        rows = []
        for q in cfg.get("q", (2, 5)):
            for r in expected.table3(q, n, phi):
                rows.append({"q": q, "n": n} | r)
        columns = ["q", "n", "dissimilarity", "offdiag", "expected"]
    else:
        n = cfg.get("n", [160])[0]
        kinds = cfg.get("kinds", DISSIMILARITIES)
        rows = []
        for q in cfg.get("q", (2, 3, 5, 10)):
            for kind in kinds:
                vals = expected.skew_profile(q, kind, n=n, phi=phi)
                for p1, v in zip(expected.SKEW_GRID, vals):
                    rows.append({"q": q, "dissimilarity": kind, "p1": p1, "expected": float(v)})
        columns = ["q", "dissimilarity", "p1", "expected"]
    path = None
    if cfg.get("out"):
        path = _outdir(cfg) / f"{which}.csv"
    _write_rows(rows, columns, path)
    return rows


def cmd_simulate(cfg):
    common = dict(
        reps=cfg.get("reps", 100),
        n=cfg.get("n", 500),
        p=cfg.get("p", 6),
        seed=cfg.get("seed", 0),
        variants=tuple(cfg.get("variants", VARIANTS)),
        phi=cfg.get("phi", 0.5),
        sigma=cfg.get("sigma", 0.03),
        basis=cfg.get("basis", "orthonormal"),
        threads=_threads(cfg),
    )
    if cfg["study"] == "effects":
        rows = simulation.run_variable_effects(cats=tuple(cfg.get("cats", (2, 3, 5, 9))), **common)
        by = ("variant", "variable", "metric")
    else:
        rows = simulation.run_retrieval(qs=tuple(cfg.get("qs", (2, 3, 5, 9))), **common)
        by = ("variant", "q", "metric")
    out = _outdir(cfg)
    simulation.write_tidy_csv(rows, out / f"{cfg['study']}.csv", fmt=FMT)
    summary = simulation.summarize(rows, by=by)
    cols = list(by) + ["count", "mean", "sd", "q1", "median", "q3", "iqr"]
    _write_rows(summary, cols, out / f"{cfg['study']}_summary.csv")
    return rows


COMMANDS = {
    "dist": cmd_dist,
    "mds": cmd_mds,
    "importance": cmd_importance,
    "tables": cmd_tables,
    "simulate": cmd_simulate,
}


def _one_line(msg):
    return " ".join(str(msg).split())


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = _settings(args)
        COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"mixdist: error: usage: {_one_line(exc)}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, OSError, RuntimeError) as exc:
        print(f"mixdist: error: {type(exc).__name__}: {_one_line(exc)}", file=sys.stderr)
        return EXIT_FAILURE
    return 0


if __name__ == "__main__":
    sys.exit(main())
