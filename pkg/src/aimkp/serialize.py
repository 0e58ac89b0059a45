"""File formats: triples, spectral data, verification reports, CSV grids.

Triples are JSON documents ``{"n": n, "X": ..., "Y": ..., "Z": ...}`` where
every matrix is a row-major nested list of ``[re, im]`` pairs.  Spectral
soliton data uses the keys ``alpha``, ``beta``, ``lambda``, ``mu`` (lists
of ``[re, im]`` pairs).  Python's float repr round-trips exactly, so
write-then-read is bitwise lossless.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AimError
from .triples import SpectralSolitonData, Triple

FORMAT_VERSION = 1


class FormatError(AimError, ValueError):
    """A file does not follow the expected schema; the message names the field."""


def _encode_matrix(a):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(a)]


def _encode_vector(v):
    return [[float(x.real), float(x.imag)] for x in np.asarray(v, dtype=np.complex128)]


def _decode_number(item, where):
    if isinstance(item, (int, float)) and not isinstance(item, bool):
        return complex(item)
    if (isinstance(item, list) and len(item) == 2
            and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in item)):
        return complex(item[0], item[1])
    raise FormatError(f"{where}: expected [re, im] pair, got {item!r}")


def _decode_matrix(doc, key, n):
    if key not in doc:
        raise FormatError(f"missing matrix {key!r}")
    rows = doc[key]
    if not isinstance(rows, list) or len(rows) != n:
        raise FormatError(f"{key}: expected {n} rows")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise FormatError(f"{key}[{i}]: expected {n} entries")
        for j, item in enumerate(row):
            out[i, j] = _decode_number(item, f"{key}[{i}][{j}]")
    if not np.all(np.isfinite(out)):
        raise FormatError(f"{key}: non-finite entry")
    return out


def _decode_vector(doc, key, n):
    if key not in doc:
        raise FormatError(f"missing field {key!r}")
    items = doc[key]
    if not isinstance(items, list) or (n is not None and len(items) != n):
        raise FormatError(f"{key}: expected a list of length {n}")
    return np.array([_decode_number(x, f"{key}[{i}]") for i, x in enumerate(items)], dtype=np.complex128)


def triple_to_dict(M: Triple):
    return {"n": M.n, "X": _encode_matrix(M.X), "Y": _encode_matrix(M.Y), "Z": _encode_matrix(M.Z)}


def triple_from_dict(doc):
    if not isinstance(doc, dict):
        raise FormatError("triple document must be a JSON object")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError(f"field 'n' must be a positive integer, got {n!r}")
    return Triple(*(_decode_matrix(doc, k, n) for k in ("X", "Y", "Z")))


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def read_triple(path):
    return triple_from_dict(_load_json(path))


def write_triple(path, M: Triple):
    Path(path).write_text(json.dumps(triple_to_dict(M), indent=1) + "\n")


def spectral_to_dict(data: SpectralSolitonData):
    return {"n": data.n, "alpha": _encode_vector(data.alpha), "beta": _encode_vector(data.beta),
            "lambda": _encode_vector(data.lam), "mu": _encode_vector(data.mu)}


def spectral_from_dict(doc):
    if not isinstance(doc, dict):
        raise FormatError("spectral document must be a JSON object")
    n = doc.get("n")
    if n is not None and (not isinstance(n, int) or n < 1):
        raise FormatError(f"field 'n' must be a positive integer, got {n!r}")
    alpha = _decode_vector(doc, "alpha", n)
    n = alpha.size
    return SpectralSolitonData(alpha, *(_decode_vector(doc, k, n) for k in ("beta", "lambda", "mu")))


def read_spectral(path):
    return spectral_from_dict(_load_json(path))


def write_spectral(path, data: SpectralSolitonData):
    Path(path).write_text(json.dumps(spectral_to_dict(data), indent=1) + "\n")


@dataclass
class RunConfig:
    seed: int = 0
    tol_rank: float = 1e-9
    tol_identity: float = 1e-9
    max_time_index: int = 16
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.tol_rank <= 0 or self.tol_identity <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_time_index < 1:
            raise ValueError("max_time_index must be >= 1")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")


def _clean(x):
    """JSON-safe float (NaN/inf become strings so output stays valid JSON)."""
    x = float(x)
    return x if math.isfinite(x) else repr(x)


@dataclass
class VerificationReport:
    """Outcome of one verification check over ``instances`` evaluations."""

    check_name: str
    instances: int = 0
    max_relative_residual: float = 0.0
    failures: list = field(default_factory=list)
    tolerance: float | None = None
    expect: str = "below"  # "below": residuals must stay under tolerance; "above": negative control
    details: dict = field(default_factory=dict)

    def record(self, descriptor, residual):
        residual = float(residual)
        self.instances += 1
        if not math.isfinite(residual):
            self.failures.append((descriptor, residual))
            self.max_relative_residual = math.inf
            return
        if self.expect == "below":
            self.max_relative_residual = max(self.max_relative_residual, residual)
            if self.tolerance is not None and residual >= self.tolerance:
                self.failures.append((descriptor, residual))
        else:
            # negative control: track the smallest residual, all must exceed tolerance
            if self.instances == 1:
                self.max_relative_residual = residual
            else:
                self.max_relative_residual = min(self.max_relative_residual, residual)
            if self.tolerance is not None and residual <= self.tolerance:
                self.failures.append((descriptor, residual))

    @property
    def passed(self):
        return not self.failures and self.instances > 0

    def to_dict(self):
        return {
            "check_name": self.check_name,
            "instances": self.instances,
            "max_relative_residual": _clean(self.max_relative_residual),
            "tolerance": None if self.tolerance is None else _clean(self.tolerance),
            "expect": self.expect,
            "failures": [[str(d), _clean(r)] for d, r in self.failures],
            "pass": self.passed,
            "details": {k: (_clean(v) if isinstance(v, float) else v) for k, v in sorted(self.details.items())},
        }


def dumps_reports(reports, fmt="json"):
    """Deterministic text rendering of one or more reports."""
    if isinstance(reports, VerificationReport):
        reports = [reports]
    if fmt == "json":
        body = [r.to_dict() for r in reports]
        return json.dumps(body[0] if len(body) == 1 else body, sort_keys=True, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check_name", "instances", "max_relative_residual", "tolerance", "expect", "pass"])
    for r in reports:
        d = r.to_dict()
        writer.writerow([d["check_name"], d["instances"], repr(d["max_relative_residual"]),
                         repr(d["tolerance"]), d["expect"], d["pass"]])
    return buf.getvalue()


def grid_csv(x, y, t, values):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y", "t", "re", "im"])
    for xi, yi, ti, v in zip(np.ravel(x), np.ravel(y), np.ravel(t), np.ravel(values)):
        writer.writerow([repr(float(xi)), repr(float(yi)), repr(float(ti)),
                         repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()


def trajectory_csv(traj, other=None):
    """``t,re_Q1,im_Q1,...``; a second trajectory on the same grid adds ``*_ode`` columns."""
    n = traj.Q.shape[1]
    header = ["t"] + [f"{p}_Q{i + 1}" for i in range(n) for p in ("re", "im")]
    if other is not None:
        header += [f"{p}_Q{i + 1}_{other.source}" for i in range(n) for p in ("re", "im")]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    rows = len(traj.times) if other is None else min(len(traj.times), len(other.times))
    for k in range(rows):
        row = [repr(float(traj.times[k]))]
        for q in traj.Q[k]:
            row += [repr(float(q.real)), repr(float(q.imag))]
        if other is not None:
            for q in other.Q[k]:
                row += [repr(float(q.real)), repr(float(q.imag))]
        writer.writerow(row)
    return buf.getvalue()
