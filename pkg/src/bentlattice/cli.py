"""Command-line entry point.

Every verb takes ``--config`` (JSON; defaults to the built-in
configuration) and ``--out`` and writes CSV/JSON files plus a
``manifest.json``. Exit status: 0 on success, 1 on a configuration error,
2 when some bend angles failed.
"""
import argparse
import dataclasses
import logging
import math
import sys

from . import analysis
from .analysis import ExperimentConfig, ExperimentReport, _Writer, _angle_tag, _csv_text, _write_manifest
from .errors import BentLatticeError, ConfigError
from .lattice import coupling_matrix, relative_coupling_map

VERBS = ("modes", "coupling-scan", "engineer", "propagate", "optimize-defect", "spectrum", "reproduce-paper")


def _parse_angles(text):
    try:
        return tuple(float(a) for a in text.split(",") if a.strip())
    except ValueError as exc:
        raise ConfigError("angles", f"cannot parse {text!r}") from exc


def load_config(args):
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.angles is not None:
        changes["angles_pi32"] = _parse_angles(args.angles)
    if args.no_optimize:
        changes["optimize"] = False
    if args.emit_intensity:
        changes["emit_intensity"] = True
    if args.out:
        changes["output_dir"] = args.out
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _finish(writer, report):
    _write_manifest(writer, report)
    return 2 if report.failures else 0


def _per_angle(cfg, report, fn):
    for pi32 in cfg.angles_pi32:
        try:
            fn(pi32)
        except BentLatticeError as exc:
            report.failures[pi32] = f"{type(exc).__name__}: {exc}"


def cmd_modes(cfg):
    report = ExperimentReport(cfg)
    writer = _Writer(cfg.output_dir, report)
    writer.write("modes.csv", analysis.modes_csv(cfg))
    return _finish(writer, report)


def cmd_coupling_scan(cfg):
    report = ExperimentReport(cfg)
    writer = _Writer(cfg.output_dir, report)
    scan, laws = analysis.coupling_scan_csv(cfg)
    writer.write("anisotropy.csv", scan)
    writer.write("coupling_laws.csv", laws)
    return _finish(writer, report)


def cmd_engineer(cfg):
    report = ExperimentReport(cfg)
    writer = _Writer(cfg.output_dir, report)

    def one(pi32):
        layout = cfg.layout(pi32 * math.pi / 32)
        h = coupling_matrix(layout)
        tag = _angle_tag(pi32)
        writer.write(f"layout_{tag}.json", layout.to_json(indent=2, sort_keys=True) + "\n")
        rel = relative_coupling_map(h)
        rows = [[i + 1, j + 1, h.matrix[i, j], rel[i, j]] for i in range(layout.n_sites) for j in range(layout.n_sites)]
        writer.write(f"coupling_{tag}.csv", _csv_text(["m", "l", "H_cm-1", "relative"], rows))

    _per_angle(cfg, report, one)
    return _finish(writer, report)


def cmd_optimize_defect(cfg):
    report = ExperimentReport(cfg)
    writer = _Writer(cfg.output_dir, report)
    rows = []

    def one(pi32):
        single = dataclasses.replace(cfg, angles_pi32=(pi32,))
        rows.extend(analysis.table1_report(single).splitlines()[1:])

    _per_angle(cfg, report, one)
    header = ",".join(analysis.TABLE1_HEADER)
    writer.write("table1.csv", "\n".join([header, *rows]) + "\n")
    return _finish(writer, report)


def _sweep(cfg, optimize):
    report = analysis.run_experiment(cfg, optimize=optimize)
    return 2 if report.failures else 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="bentlattice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", help="JSON experiment configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--angles", help="comma-separated bend angles in units of pi/32")
        p.add_argument("--no-optimize", action="store_true", help="skip corner-defect optimization")
        p.add_argument("--emit-intensity", action="store_true", help="write output intensity maps")
        p.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.verb == "modes":
            return cmd_modes(cfg)
        if args.verb == "coupling-scan":
            return cmd_coupling_scan(cfg)
        if args.verb == "engineer":
            return cmd_engineer(cfg)
        if args.verb == "optimize-defect":
            return cmd_optimize_defect(cfg)
        if args.verb == "propagate":
            return _sweep(dataclasses.replace(cfg, optimize=False), optimize=False)
        if args.verb == "spectrum":
            return _sweep(cfg, optimize=cfg.optimize)
        return _sweep(cfg, optimize=cfg.optimize)
    except BentLatticeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
