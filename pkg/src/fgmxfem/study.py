"""Parametric sweeps and validation against the embedded reference tables."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

import yaml

from .config import parse_config, set_path
from .errors import ConfigError, FgmXfemError
from .pipeline import run
from .post import GAP, result_row, tabulate

log = logging.getLogger(__name__)


def _strip_outputs(raw):
    out = dict(raw)
    out["outputs"] = {k: v for k, v in (raw.get("outputs") or {}).items()
                      if k in ("verbosity", "grid")}
    return out


def _cell(args):
    raw, extra = args
    try:
        cfg = parse_config(raw)
    except ConfigError as exc:
        return {**extra, "error": str(exc)}, None
    try:
        res = run(cfg)
        return result_row(cfg, res.Omegas, extra), res.Omegas
    except FgmXfemError as exc:
        return result_row(cfg, None, extra, error=f"{type(exc).__name__}: {exc}"), None


def _execute(jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [_cell(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_cell, jobs))


def expand_axes(raw, axes):
    """Cartesian product of dotted-path ``axes``; yields ``(raw, values)``."""
    keys = list(axes)
    for values in itertools.product(*(axes[k] for k in keys)):
        cell = raw
        for k, v in zip(keys, values):
            cell = set_path(cell, k, v)
        yield cell, dict(zip(keys, values))


def sweep(raw, axes=None, workers=1, pair_about=None):
    """Run every cell of the Cartesian product and return table rows.

    Failed cells keep their inputs, carry gap markers instead of
    frequencies and record the error; the sweep continues.
    """
    axes = dict(axes or {})
    for k, vals in axes.items():
        if not isinstance(vals, list) or not vals:
            raise ConfigError("axis values must be a non-empty list", f"sweep.axes.{k}")
    base = _strip_outputs(raw)
    parse_config(base)
    jobs = [(cell, extra) for cell, extra in expand_axes(base, axes)]
    rows = [row for row, _ in _execute(jobs, workers)]
    return tabulate(rows, list(axes), pair_about=pair_about)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellCheck:
    table: str
    label: str
    mode: int
    expected: float
    computed: float | None
    tolerance: float
    error: str = ""

    @property
    def rel_error(self):
        if self.computed is None:
            return None
        return abs(self.computed - self.expected) / abs(self.expected)

    @property
    def passed(self):
        return self.computed is not None and self.rel_error <= self.tolerance

    def as_row(self):
        rel = self.rel_error
        return {
            "table": self.table,
            "cell": self.label,
            "mode": self.mode,
            "expected": self.expected,
            "computed": GAP if self.computed is None else round(self.computed, 4),
            "rel_error": GAP if rel is None else round(rel, 6),
            "tolerance": self.tolerance,
            "status": "pass" if self.passed else "FAIL",
            "error": self.error,
        }


def validation_tables():
    text = resources.files("fgmxfem.data").joinpath("validation.yaml").read_text()
    return yaml.safe_load(text)["tables"]


def validate(table_id, workers=1):
    """Run one embedded table and compare every cell with its reference."""
    tables = validation_tables()
    if table_id not in tables:
        raise ConfigError(f"unknown table {table_id!r}; known: {sorted(tables)}", "--table")
    table = tables[table_id]
    jobs = []
    for cell in table["cells"]:
        raw = table["base"]
        for k, v in cell["set"].items():
            raw = set_path(raw, k, v)
        jobs.append((raw, {"cell": cell["label"]}))
    results = _execute(jobs, workers)
    checks = []
    for cell, (row, Omegas) in zip(table["cells"], results):
        for m, expected in enumerate(cell["expected"]):
            computed = None if Omegas is None or m >= len(Omegas) else float(Omegas[m])
            checks.append(CellCheck(table_id, cell["label"], m + 1, float(expected), computed,
                                    float(cell["tolerance"]), row.get("error", "")))
    return checks
