"""CSV/JSON ingestion and export.

Readers validate headers and report the offending line on any parse
failure. Writers go through a temporary file in the target directory and
``os.replace`` so a crash never leaves a half-written output.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import InputError
from .inference.models import EndorsementItem
from .numerics import GridDistribution
from .priors import CategoryWorld, rate_from_frequency

ELICITATION = ("participant_id", "property", "category", "category_source", "response_pct")
HABITUAL_Q1 = ("participant_id", "action", "gender", "numerator", "denominator")
HABITUAL_Q2 = ("participant_id", "action", "gender", "times", "interval")
ENDORSEMENTS = ("item", "category", "property", "n_agree", "n_total")
FREE_PRODUCTION = ("participant_id", "property", "response")
SAMPLES = ("chain", "iteration", "parameter", "value")
PREDICTIONS = ("item", "human", "model", "lo", "hi")


def _fail(path, line: int, msg: str):
    raise InputError(f"{path}:{line}: {msg}")


def read_rows(path, required: Sequence[str], aliases: Optional[Mapping[str, str]] = None):
    """Yield ``(line_number, row)`` with headers renamed through ``aliases``.

    Missing required columns are reported by name; nothing is guessed.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    aliases = dict(aliases or {})
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            _fail(path, 1, "empty file (a header row is required)")
        header = [aliases.get(h.strip(), h.strip()) for h in header]
        missing = [c for c in required if c not in header]
        if missing:
            _fail(path, 1, f"missing column(s) {', '.join(missing)}; found {', '.join(header)}")
        for values in reader:
            line = reader.line_num
            if not values or all(not v.strip() for v in values):
                continue
            if len(values) != len(header):
                _fail(path, line, f"expected {len(header)} fields, got {len(values)}")
            row = {h: v.strip() for h, v in zip(header, values)}
            for c in required:
                if row[c] == "":
                    _fail(path, line, f"empty {c!r}")
            yield line, row


def _number(path, line, row, col, kind: Callable = float):
    try:
        v = kind(row[col])
    except ValueError:
        _fail(path, line, f"{col!r} is not a number: {row[col]!r}")
    if isinstance(v, float) and not np.isfinite(v):
        _fail(path, line, f"{col!r} is not finite")
    return v


@dataclass
class ElicitationData:
    """Percent responses grouped for prior fitting (by property) and for
    referent fitting (by category and property)."""

    rows: list
    by_property: dict
    by_referent: dict
    sources: dict  # (category, property) -> set of category_source values

    @property
    def participants(self) -> list:
        return sorted({r["participant_id"] for r in self.rows})


def read_elicitation(path, aliases=None) -> ElicitationData:
    rows = []
    for line, row in read_rows(path, ELICITATION, aliases):
        pct = _number(path, line, row, "response_pct")
        if not 0 <= pct <= 100:
            _fail(path, line, f"response_pct {pct} outside [0, 100]")
        rows.append({**row, "response_pct": pct})
    if not rows:
        raise InputError(f"{path}: no data rows")
    return group_elicitation(rows)


def group_elicitation(rows: Iterable[Mapping]) -> ElicitationData:
    rows = list(rows)
    by_prop, by_ref, sources = defaultdict(list), defaultdict(list), defaultdict(set)
    for r in rows:
        by_prop[r["property"]].append(r["response_pct"])
        by_ref[(r["category"], r["property"])].append(r["response_pct"])
        sources[(r["category"], r["property"])].add(r["category_source"])
    return ElicitationData(rows, {k: np.array(v) for k, v in by_prop.items()},
                           {k: np.array(v) for k, v in by_ref.items()}, dict(sources))


@dataclass
class HabitualData:
    """Per (action, gender): Q1 proportions of people who have done the
    action and Q2 rates (events/year) among those who have."""

    q1: dict
    q2: dict


def read_habituals(q1_path, q2_path, aliases=None) -> HabitualData:
    q1, q2 = defaultdict(list), defaultdict(list)
    for line, row in read_rows(q1_path, HABITUAL_Q1, aliases):
        num = _number(q1_path, line, row, "numerator")
        den = _number(q1_path, line, row, "denominator")
        if den <= 0 or not 0 <= num <= den:
            _fail(q1_path, line, "need 0 <= numerator <= denominator and denominator > 0")
        q1[(row["action"], row["gender"])].append(num / den)
    for line, row in read_rows(q2_path, HABITUAL_Q2, aliases):
        times = _number(q2_path, line, row, "times")
        try:
            rate = rate_from_frequency(times, row["interval"])
        except InputError as e:
            _fail(q2_path, line, str(e))
        q2[(row["action"], row["gender"])].append(rate)
    return HabitualData({k: np.array(v) for k, v in q1.items()}, {k: np.array(v) for k, v in q2.items()})


def read_world(path) -> CategoryWorld:
    """``category,prior_prob,<feature>...`` with one row per category."""
    names, probs, prev = [], [], defaultdict(list)
    features = None
    for line, row in read_rows(path, ("category", "prior_prob")):
        if features is None:
            features = [c for c in row if c not in ("category", "prior_prob")]
            if not features:
                _fail(path, 1, "no feature columns")
        names.append(row["category"])
        probs.append(_number(path, line, row, "prior_prob"))
        for f in features:
            if row[f] == "":
                _fail(path, line, f"empty {f!r}")
            prev[f].append(_number(path, line, row, f))
    if not names:
        raise InputError(f"{path}: no data rows")
    return CategoryWorld(names, probs, {f: prev[f] for f in features})


def read_endorsements(path, aliases=None) -> list:
    """Endorsement counts; an optional ``referent`` column fixes the
    referent prevalence (or rate) of that item."""
    items = []
    for line, row in read_rows(path, ENDORSEMENTS, aliases):
        ref = row.get("referent", "")
        try:
            items.append(EndorsementItem(
                row["item"], row["category"], row["property"],
                _number(path, line, row, "n_agree", int), _number(path, line, row, "n_total", int),
                _number(path, line, row, "referent") if ref else None))
        except InputError as e:
            if str(e).startswith(str(path)):
                raise
            _fail(path, line, str(e))
    if not items:
        raise InputError(f"{path}: no data rows")
    return items


def read_free_production(path, aliases=None) -> dict:
    """``{property: [produced category labels]}``."""
    out = defaultdict(list)
    for _, row in read_rows(path, FREE_PRODUCTION, aliases):
        out[row["property"]].append(row["response"])
    return dict(out)


def read_grid_distribution(path) -> GridDistribution:
    """``support,mass`` table as written by :func:`write_grid_distribution`."""
    support, mass = [], []
    for line, row in read_rows(path, ("support", "mass")):
        support.append(_number(path, line, row, "support"))
        mass.append(_number(path, line, row, "mass"))
    if not support:
        raise InputError(f"{path}: no data rows")
    return GridDistribution.from_weights(support, mass)


# writers ---------------------------------------------------------------

def _atomic_write(path, write: Callable) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return v


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return _atomic_write(path, write)


def write_grid_distribution(path, dist: GridDistribution) -> Path:
    return write_table(path, ("support", "mass"), zip(dist.support, dist.mass))


def write_samples(path, samples) -> Path:
    return write_table(path, SAMPLES, samples.rows())


def write_predictions(path, items, human, model, lo=None, hi=None) -> Path:
    n = len(items)
    lo = [""] * n if lo is None else lo
    hi = [""] * n if hi is None else hi
    return write_table(path, PREDICTIONS, zip(items, human, model, lo, hi))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path, obj) -> Path:
    return _atomic_write(path, lambda fh: fh.write(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"))


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True)
