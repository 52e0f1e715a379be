"""Command line entry point: ``cdqc run|plot|dump-instance|gamma-diagnostics``.

Exit codes: 0 all rows valid, 2 some rows flagged (norm drift), 1 config or IO failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import experiment
from .plots import PLOT_KINDS, plot_results
from .problems import Family, dump_instance, load_instance, make_instance

log = logging.getLogger("cdqc")


def _instance_from_args(args):
    if args.instance:
        return load_instance(args.instance)
    params = json.loads(args.params) if args.params else {}
    return make_instance(args.family, args.n_qubits, args.seed, params)


def cmd_run(args) -> int:
    config = experiment.ExperimentConfig.load(args.config)
    if args.output:
        config.output = args.output
    if config.output is None:
        config.output = "results.csv"
    result = experiment.run_experiment(config, workers=args.workers)
    print(f"# schema v{experiment.SCHEMA_VERSION}, {len(result.rows)} rows -> {config.output}")
    print(experiment.format_summary(result.summary))
    if result.n_flagged:
        log.error("%d rows flagged with excessive norm drift", result.n_flagged)
        return 2
    return 0


def cmd_plot(args) -> int:
    out = args.out or f"{args.kind}.svg"
    plot_results(args.csv, args.kind, out)
    print(out)
    return 0


def cmd_dump_instance(args) -> int:
    dump_instance(_instance_from_args(args), args.out)
    print(args.out)
    return 0


def cmd_gamma(args) -> int:
    inst = _instance_from_args(args)
    rows = experiment.gamma_diagnostics(inst, args.order, np.linspace(0.0, 1.0, args.points))
    experiment.write_dict_rows(rows, args.out)
    print(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdqc", description="Counterdiabatic sweep simulations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config (JSON)")
    run.add_argument("config")
    run.add_argument("-o", "--output")
    run.add_argument("-j", "--workers", type=int)
    run.set_defaults(func=cmd_run)

    plot = sub.add_parser("plot", help="plot a result CSV")
    plot.add_argument("csv")
    plot.add_argument("--kind", choices=PLOT_KINDS, required=True)
    plot.add_argument("-o", "--out")
    plot.set_defaults(func=cmd_plot)

    def instance_args(sp):
        sp.add_argument("--instance", help="instance file (overrides family options)")
        sp.add_argument("--family", choices=[f.value for f in Family if f is not Family.CUSTOM],
                        default=Family.RANDOM_QUBO.value)
        sp.add_argument("-n", "--n-qubits", type=int, default=6)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--params", help="family parameters as JSON")
        sp.add_argument("-o", "--out", required=True)

    dump = sub.add_parser("dump-instance", help="write a problem instance file")
    instance_args(dump)
    dump.set_defaults(func=cmd_dump_instance)

    gam = sub.add_parser("gamma-diagnostics", help="Gamma/alpha/residual table on a lambda grid")
    instance_args(gam)
    gam.add_argument("--order", type=int, default=3)
    gam.add_argument("--points", type=int, default=101)
    gam.set_defaults(func=cmd_gamma)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
