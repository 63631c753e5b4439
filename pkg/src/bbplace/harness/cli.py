"""Command-line entry point: ``bbplace {run,summarize,render,parse-check}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..netlist import NetlistError
from .experiment import ConfigError, HarnessConfig, Trace, read_config_file, resolve_benchmark, run_experiment
from .render import render_svg
from .summary import summarize

EXIT_CONFIG = 2
EXIT_DATA = 3

log = logging.getLogger("bbplace")


def _parser():
    p = argparse.ArgumentParser(prog="bbplace", description="Black-box macro placement benchmark")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="optimize a benchmark and write traces")
    r.add_argument("--config", help="key=value config file; flags override it")
    r.add_argument("--benchmark", help="path to .aux/.json or synthetic:key=value,...")
    r.add_argument("--placer", choices=["sp", "mgo", "hpo"])
    r.add_argument("--algo", choices=["sa", "ea", "es", "pso", "bo"])
    r.add_argument("--eval_gp_hpwl", action="store_true", default=None)
    r.add_argument("--budget", type=int)
    r.add_argument("--pop_size", type=int)
    r.add_argument("--seed", type=int, nargs="+", dest="seeds")
    r.add_argument("--grid", type=int)
    r.add_argument("--n-macros", type=int, dest="n_macros")
    r.add_argument("--workers", type=int)
    r.add_argument("--hpo-scope", choices=["macros_only", "all_modules"], dest="hpo_scope")
    r.add_argument("--out")

    s = sub.add_parser("summarize", help="mean/std/rank table from trace files")
    s.add_argument("traces", nargs="+", help="trace .json files or directories")
    s.add_argument("--out", help="write summary CSV here")

    v = sub.add_parser("render", help="SVG of a trace's final placement")
    v.add_argument("trace")
    v.add_argument("--out", required=True)
    v.add_argument("--no-cells", action="store_true")

    c = sub.add_parser("parse-check", help="parse a netlist and print its statistics")
    c.add_argument("path")
    return p


def _run(args):
    cfg = read_config_file(args.config) if args.config else {}
    for k in ("benchmark", "placer", "algo", "eval_gp_hpwl", "budget", "pop_size", "seeds", "grid",
              "n_macros", "workers", "hpo_scope", "out"):
        v = getattr(args, k)
        if v is not None:
            cfg[k] = v
    hc = HarnessConfig.from_mapping(cfg)
    traces = run_experiment(hc)
    for t in traces:
        print(f"{t.instance} {t.method} seed={t.seed} best={t.best_fitness:.6g} evals={len(t.records)}")
    print(f"traces written to {hc.out_dir}")


def _trace_files(items):
    files = []
    for it in items:
        p = Path(it)
        if p.is_dir():
            files.extend(sorted(p.glob("*.json")))
        elif p.exists():
            files.append(p)
        else:
            raise NetlistError(f"no such trace: {it}")
    if not files:
        raise NetlistError("no trace files found")
    return files


def _summarize(args):
    s = summarize([Trace.load(f) for f in _trace_files(args.traces)])
    print(s.to_text(), end="")
    if args.out:
        Path(args.out).write_text(s.to_csv())


def _render(args):
    t = Trace.load(args.trace)
    if not t.final_placement:
        raise NetlistError(f"{args.trace}: trace has no final placement")
    nl = resolve_benchmark(t.config["benchmark"], t.config.get("n_macros"))
    render_svg(t.placement(nl), args.out, show_cells=not args.no_cells)
    print(f"wrote {args.out}")


def _parse_check(args):
    from ..netlist import load
    nl = load(args.path)
    print(json.dumps(nl.counts(), sort_keys=True))


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _run, "summarize": _summarize, "render": _render, "parse-check": _parse_check}
    try:
        handler[args.cmd](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NetlistError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
