"""Command line entry point: ``lfzeros <subcommand> [options]``.

Exit codes: 0 success, 2 invalid configuration, 3 computation failure,
4 a ``--check`` self-test failed (artifacts are still written).
"""
from __future__ import annotations

import argparse
import csv
import json
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, cache
from .config import SCHEMA, ExperimentConfig, from_dict, load, parse_combination, to_dict
from .errors import ConfigError, LFZError
from .experiments import RUNNERS

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_CHECK = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _global_flags() -> argparse.ArgumentParser:
    g = argparse.ArgumentParser(add_help=False)
    sup = argparse.SUPPRESS
    g.add_argument("--seed", type=int, default=sup, help="random seed (default 0)")
    g.add_argument("--workers", type=int, default=sup,
                   help="worker count; computations run in-process, so >1 is recorded only")
    g.add_argument("--out-dir", default=sup, help="artifact directory (default results)")
    g.add_argument("--check", action="store_true", default=sup,
                   help="run the experiment's self-check; exit 4 on failure")
    return g


def build_parser() -> argparse.ArgumentParser:
    glob = _global_flags()
    p = _Parser(prog="lfzeros", parents=[glob], description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for kind, schema in SCHEMA.items():
        sp = sub.add_parser(kind, parents=[glob], help=f"run a {kind} experiment")
        sp.add_argument("--config", help="YAML file with defaults for this run")
        sp.add_argument("--combo", help="members joined by '+': zeta, dirichlet:Q:E1.E2")
        sp.add_argument("--weights", help="comma-separated weights")
        for name, (typ, _default) in schema.items():
            flag = "--" + name.replace("_", "-")
            if typ == "bool":
                sp.add_argument(flag, dest=name, action="store_true", default=None)
            else:
                sp.add_argument(flag, dest=name, default=None,
                                help=f"{typ}" + (" (comma-separated)" if typ.startswith("list") else ""))
    rp = sub.add_parser("run", parents=[glob], help="run an experiment from a YAML config")
    rp.add_argument("config")
    pp = sub.add_parser("plotdata", parents=[glob], help="long-format CSV from a JSON artifact")
    pp.add_argument("artifact")
    pp.add_argument("--output", help="destination (default: <artifact stem>-plot.csv)")
    return p


def _split(val: str, typ: str):
    if typ.startswith("list"):
        return [v for v in val.split(",") if v.strip()]
    if typ == "int":
        try:
            return int(float(val)) if float(val).is_integer() else val
        except ValueError:
            return val
    if typ == "float":
        try:
            return float(val)
        except ValueError:
            return val
    return val


def _list_coerce(vals, typ):
    try:
        return [float(v) if typ == "list[float]" else int(v) for v in vals]
    except ValueError:
        raise ConfigError(f"bad list value {vals!r}") from None


def config_from_args(args) -> ExperimentConfig:
    if args.command == "run":
        base = to_dict(load(args.config))
    else:
        base = to_dict(load(args.config)) if args.config else {"kind": args.command, "params": {}}
        if base["kind"] != args.command:
            raise ConfigError(f"config kind {base['kind']!r} does not match {args.command!r}")
        for name, (typ, _d) in SCHEMA[args.command].items():
            v = getattr(args, name)
            if v is None:
                continue
            v = _split(v, typ) if isinstance(v, str) else v
            base["params"][name] = _list_coerce(v, typ) if typ.startswith("list") else v
        if args.combo:
            c = parse_combination(args.combo, args.weights)
            base["combination"] = to_dict(ExperimentConfig("k0", {}, c))["combination"]
        elif args.weights:
            raise ConfigError("--weights needs --combo")
    for key in ("seed", "workers"):
        if hasattr(args, key):
            base[key] = getattr(args, key)
    if hasattr(args, "out_dir"):
        base["out_dir"] = args.out_dir
    return from_dict(base)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])


def execute(cfg: ExperimentConfig, check: bool = False) -> tuple[int, Path]:
    """Run ``cfg`` and write its artifacts; returns (exit code, JSON artifact path)."""
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    cache.USED_KEYS.clear()
    outcome = RUNNERS[cfg.kind](cfg)
    wall = time.perf_counter() - t0
    h = cfg.config_hash()
    tag = f"{cfg.kind}-{h[:8]}"
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_name = f"manifest-{h[:8]}.json"
    csv_names = []
    for name, (header, rows) in sorted(outcome.tables.items()):
        fn = f"{tag}-{name}.csv"
        _write_csv(out / fn, header, rows)
        csv_names.append(fn)
    cfg_d = to_dict(cfg)
    del cfg_d["out_dir"], cfg_d["workers"]
    artifact = {"kind": cfg.kind, "config": cfg_d, "config_hash": h, "manifest": manifest_name,
                "result": outcome.payload, "tables": csv_names}
    if check:
        artifact["check"] = {"passed": bool(outcome.check_ok), "message": outcome.check_msg}
    json_name = f"{tag}.json"
    (out / json_name).write_text(_dump(artifact))
    manifest = {"config_hash": h, "tool_version": __version__, "python": platform.python_version(),
                "started": started, "finished": datetime.now(timezone.utc).isoformat(),
                "wall_time_total": wall, "wall_times": outcome.timings, "workers": cfg.workers,
                "cache_dir": str(cache.cache_dir()), "cache_keys": sorted(cache.USED_KEYS),
                "artifacts": [json_name] + csv_names}
    (out / manifest_name).write_text(_dump(manifest))
    code = EXIT_CHECK if check and not outcome.check_ok else EXIT_OK
    return code, out / json_name


# ------------------------------------------------------------- plot data

def _plot_rows(art: dict, base: Path):
    kind, res = art.get("kind"), art.get("result", {})
    if kind == "density":
        tables = [t for t in art["tables"] if t.endswith("-grid.csv")]
        with open(base / tables[0]) as fh:
            r = csv.reader(fh)
            header = next(r)
            cols = [c for c in header if c != "cell_mass"]
            idx = [header.index(c) for c in cols]
            rows = [[row[i] for i in idx] for row in r]
        return ["series"] + cols, [["density"] + row for row in rows]
    if kind == "nf-curve":
        return ["series", "G", "count"], [["N_F", g, n] for g, _s, n in res["rows"]]
    if kind == "discrepancy":
        return ["series", "T", "sup_disc"], [["sup_disc", t, d] for t, d, *_ in res["rows"]]
    if kind == "k0":
        rows = [["K0", res["method"], res["value"]]]
        if "closed_form" in res:
            rows.append(["K0", "closed_form", res["closed_form"]])
        return ["series", "method", "value"], rows
    if kind == "charfn":
        return (["series", "x", "value"],
                [[s, r[0], r[i]] for r in res["rows"] for i, s in ((1, "re"), (2, "im"), (3, "abs"))])
    if kind == "mc-tail":
        return ["series", "tau", "p", "ci_lo", "ci_hi"], [["tail", *r[:4]] for r in res["rows"]]
    if kind == "mc-concentration":
        return ["series", "eps", "p", "ci_lo", "ci_hi"], [["conc", *r[:4]] for r in res["rows"]]
    if kind == "tail-cdf":
        return (["series", "tau", "psi"],
                [[s, r[0], r[i]] for r in res["rows"] for i, s in ((1, "psi_T"), (2, "psi_rand"))])
    if kind == "bs-check":
        return ["series", "delta", "value"], [[s, r[0], r[i]] for r in res["rows"]
                                               for i, s in ((1, "outside_max"), (2, "fitted_C"))]
    if kind == "mc-increment":
        return (["series", "G", "mean", "std_error"],
                [[k, res["G"], res[k]["mean"], res[k]["std_error"]] for k in ("i1", "i2")])
    raise ConfigError(f"unknown artifact kind {kind!r}")


def emit_plotdata(artifact_path, output=None) -> Path:
    path = Path(artifact_path)
    try:
        art = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read artifact: {exc}") from None
    if not isinstance(art, dict):
        raise ConfigError("artifact is not a JSON object")
    header, rows = _plot_rows(art, path.parent)
    dest = Path(output) if output else path.with_name(path.stem + "-plot.csv")
    _write_csv(dest, header, rows)
    return dest


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return EXIT_CONFIG
        if args.command == "plotdata":
            print(emit_plotdata(args.artifact, args.output))
            return EXIT_OK
        cfg = config_from_args(args)
        if cfg.workers > 1:
            print(f"note: --workers {cfg.workers} recorded; runs are single-process", file=sys.stderr)
        code, path = execute(cfg, check=getattr(args, "check", False))
        print(path)
        if code == EXIT_CHECK:
            print("check failed", file=sys.stderr)
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LFZError, ArithmeticError, ValueError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
