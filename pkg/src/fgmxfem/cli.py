"""Command-line interface: ``fgmxfem {run, sweep, validate, modes}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

import yaml

from .config import load_config, parse_config
from .errors import ConfigError, FgmXfemError

EXIT_OK = 0
EXIT_VALIDATION = 5


def _read_yaml(path):
    try:
        with open(path) as fh:
            return yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None


def _with_modes(raw, k):
    if k is None:
        return raw
    raw = dict(raw)
    raw["solver"] = {**(raw.get("solver") or {}), "k_modes": k}
    return raw


def _outdir(path):
    if path:
        os.makedirs(path, exist_ok=True)
    return path


def cmd_run(args):
    from .pipeline import run
    from .post import result_row, write_csv_rows

    raw = _with_modes(_read_yaml(args.config), args.modes)
    cfg = parse_config(raw)
    res = run(cfg)
    for i, (w, W) in enumerate(zip(res.omegas, res.Omegas), 1):
        print(f"mode {i:2d}  omega = {w:14.6f} rad/s  Omega = {W:.4f}")
    out = _outdir(args.out)
    if out:
        write_csv_rows(os.path.join(out, "results.csv"), [result_row(cfg, res.Omegas)])
        cfg.dump(os.path.join(out, "effective_config.yaml"))
    return EXIT_OK


def cmd_sweep(args):
    from .post import write_csv_rows
    from .study import sweep

    raw = _with_modes(_read_yaml(args.config), args.modes)
    spec = raw.pop("sweep", None) or {}
    if not isinstance(spec, dict):
        raise ConfigError("expected a mapping", "sweep")
    pair = spec.get("pair_about")
    rows = sweep(raw, spec.get("axes"), workers=args.workers,
                 pair_about=tuple(pair) if pair else None)
    out = _outdir(args.out)
    if out:
        write_csv_rows(os.path.join(out, "sweep.csv"), rows)
    else:
        import csv
        writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    failed = sum(1 for r in rows if r.get("error"))
    if failed:
        print(f"{failed} of {len(rows)} cells failed", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args):
    from .post import write_csv_rows
    from .study import validate, validation_tables

    ids = [args.table] if args.table else sorted(validation_tables())
    checks = []
    for tid in ids:
        checks.extend(validate(tid, workers=args.workers))
    for c in checks:
        r = c.as_row()
        print(f"{r['status']:4s} {r['table']:22s} {r['cell']:24s} mode {r['mode']}  "
              f"expected {r['expected']:.4f}  computed {r['computed']}  "
              f"rel {r['rel_error']}  tol {r['tolerance']}  {r['error']}")
    out = _outdir(args.out)
    if out:
        write_csv_rows(os.path.join(out, "validation.csv"), [c.as_row() for c in checks])
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def cmd_modes(args):
    from .pipeline import run
    from .post import sample_mode, write_vtk

    cfg = load_config(args.config) if args.modes is None else parse_config(
        _with_modes(_read_yaml(args.config), args.modes))
    res = run(cfg)
    out = _outdir(args.out or ".")
    for i in range(res.modal.vectors.shape[1]):
        field_ = sample_mode(res.system, res.modal.vectors[:, i], cfg.outputs.grid)
        path = os.path.join(out, f"mode_{i + 1:02d}.vtk")
        write_vtk(path, field_, title=f"{cfg.name} mode {i + 1} Omega={res.Omegas[i]:.4f}")
        print(path)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="fgmxfem", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)
    for name, func, needs_config in (("run", cmd_run, True), ("sweep", cmd_sweep, True),
                                     ("validate", cmd_validate, False),
                                     ("modes", cmd_modes, True)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=needs_config, help="YAML run configuration")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--modes", type=int, help="number of modes to compute")
        sp.add_argument("--table", help="validation table id")
        sp.set_defaults(func=func)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FgmXfemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
