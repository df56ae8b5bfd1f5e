"""Command line front end.

Subcommands: gen, p0, hitting, sweep, audit, coupling, plotdata. Exit code
0 on success, 2 when a command's built-in acceptance check fails (coupling
inequalities, audit implication or identity violations), 1 on error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments, hostgraph, threshold
from .exceptions import HamLabError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CHECK_FAILED = 2


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=None, help="master seed")
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--workers", type=int, default=None)
    sub.add_argument("--config", default=None, help="JSON config file (RunConfig fields)")
    sub.add_argument("--out", default=None, help="output directory")


def _add_host_args(sub):
    sub.add_argument("--kind", choices=["complete", "regular", "dirac"], default=None)
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--d", type=int, default=None)
    sub.add_argument("--eps-frac", type=float, default=None)
    sub.add_argument("--host-seed", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamlab",
        description="Edge-process laboratory: hitting times, thresholds, event audits.")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate a host graph edge list")
    _add_host_args(gen)
    gen.add_argument("--out", required=True, help="edge-list file to write")

    p0 = subs.add_parser("p0", help="solve the degree-2 threshold equation")
    _add_host_args(p0)
    p0.add_argument("--host", default=None, help="edge-list file to load instead")
    p0.add_argument("--omega", type=float, default=None)

    for name in ("hitting", "sweep", "audit", "coupling"):
        sub = subs.add_parser(name, help=f"run the {name} experiment")
        _add_common(sub)
        _add_host_args(sub)

    plot = subs.add_parser("plotdata", help="rebuild plot CSV from saved records")
    plot.add_argument("--records", required=True)
    plot.add_argument("--kind", required=True,
                      choices=["hitting", "sweep", "audit", "coupling"])
    plot.add_argument("--out", required=True)

    return parser


def _config_from_args(args) -> experiments.RunConfig:
    if args.config:
        cfg = experiments.RunConfig.load(args.config)
    else:
        cfg = experiments.RunConfig()
    overrides = {
        "master_seed": args.seed,
        "trials": args.trials,
        "workers": args.workers,
        "out_dir": args.out,
        "host_kind": getattr(args, "kind", None),
        "n": getattr(args, "n", None),
        "beta": getattr(args, "beta", None),
        "d": getattr(args, "d", None),
        "eps_frac": getattr(args, "eps_frac", None),
        "host_seed": getattr(args, "host_seed", None),
    }
    data = cfg.to_json_dict()
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    return experiments.RunConfig.from_json_dict(data)


def _host_from_args(args, cfg=None):
    if getattr(args, "host", None):
        return hostgraph.load_edge_list(args.host)
    if cfg is None:
        data = {}
        for key, attr in (("host_kind", "kind"), ("n", "n"), ("beta", "beta"),
                          ("d", "d"), ("eps_frac", "eps_frac"), ("host_seed", "host_seed")):
            value = getattr(args, attr, None)
            if value is not None:
                data[key] = value
        cfg = experiments.RunConfig.from_json_dict({**experiments.RunConfig().to_json_dict(), **data})
    return experiments.make_host(cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except HamLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def _dispatch(args) -> int:
    if args.command == "gen":
        host = _host_from_args(args)
        hostgraph.save_edge_list(host, args.out)
        print(f"wrote {host!r} to {args.out}")
        return EXIT_OK

    if args.command == "p0":
        host = _host_from_args(args)
        profile = threshold.DegreeProfile.from_host(host)
        sol = threshold.solve_p0(profile, args.omega)
        print(json.dumps(sol.to_dict(), sort_keys=True))
        return EXIT_OK

    if args.command == "plotdata":
        records = experiments.load_jsonl(args.records)
        rows = experiments.plot_rows(records, args.kind)
        experiments._write_csv(args.out, experiments._PLOT_HEADER, rows)
        print(f"wrote {len(rows)} plot rows to {args.out}")
        return EXIT_OK

    cfg = _config_from_args(args)
    out_dir = cfg.out_dir or "."
    if args.command == "hitting":
        records, summary = experiments.run_hitting_experiment(cfg)
        paths = experiments.emit_outputs(records, summary, out_dir, "hitting")
        print(json.dumps({k: v for k, v in summary.items()}, sort_keys=True))
        print(f"outputs: {paths}")
        return EXIT_OK

    if args.command == "sweep":
        records, summary = experiments.run_threshold_sweep(cfg)
        paths = experiments.emit_outputs(records, summary, out_dir, "sweep")
        print(json.dumps(summary, sort_keys=True))
        print(f"outputs: {paths}")
        return EXIT_OK

    if args.command == "audit":
        records, summary = experiments.run_event_audit(cfg)
        paths = experiments.emit_outputs(records, summary, out_dir, "audit")
        print(json.dumps(summary, sort_keys=True))
        print(f"outputs: {paths}")
        ok = not summary["implication_violations"] and summary["surplus_identity_all"]
        return EXIT_OK if ok else EXIT_CHECK_FAILED

    if args.command == "coupling":
        records, summary = experiments.run_coupling_check(cfg)
        paths = experiments.emit_outputs(records, summary, out_dir, "coupling")
        print(json.dumps(summary, sort_keys=True))
        print(f"outputs: {paths}")
        return EXIT_OK if summary["all_ok"] else EXIT_CHECK_FAILED

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
