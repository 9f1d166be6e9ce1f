"""Readers for the experiment harness's delimited outputs.

Five schemas, recognized by their header line (comment lines starting
with '#' are skipped):

- trials:    trial,seed,model,d,size,degree,first_birth,all_births,
             t_ec,delta,t_betti,valid
- aggregate: model,d,size,degree,trials,invalid,mean_birth,std_birth,
             t_ec,mean_delta
- expected:  param,expected_ec
- mean:      param,mean_ec,std_ec
- curve:     t,ec,beta0,beta1,...
"""

import numpy as np

from .errors import EmptyInput, SchemaMismatch

TRIALS_HEADER = ("trial,seed,model,d,size,degree,first_birth,all_births,"
                 "t_ec,delta,t_betti,valid")
AGGREGATE_HEADER = ("model,d,size,degree,trials,invalid,mean_birth,"
                    "std_birth,t_ec,mean_delta")
EXPECTED_HEADER = "param,expected_ec"
MEAN_HEADER = "param,mean_ec,std_ec"


def _data_lines(path):
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh
                 if not ln.startswith("#") and ln.strip()]
    if not lines:
        raise SchemaMismatch(f"{path}: no header line")
    return lines[0], lines[1:]


def sniff(path):
    """Schema name for a file: trials, aggregate, expected, mean, curve."""
    header, _ = _data_lines(path)
    if header == TRIALS_HEADER:
        return "trials"
    if header == AGGREGATE_HEADER:
        return "aggregate"
    if header == EXPECTED_HEADER:
        return "expected"
    if header == MEAN_HEADER:
        return "mean"
    cols = header.split(",")
    if cols[:2] == ["t", "ec"] and len(cols) > 2 \
            and all(c == f"beta{k}" for k, c in enumerate(cols[2:])):
        return "curve"
    raise SchemaMismatch(f"{path}: unrecognized header {header!r}")


def _check(path, header, want, rows):
    if header != want:
        raise SchemaMismatch(f"{path}: expected header {want!r}, "
                             f"got {header!r}")
    if not rows:
        raise EmptyInput(f"{path}: no data rows")


def read_trials(path):
    """Trial rows as a list of dicts with typed fields."""
    header, rows = _data_lines(path)
    _check(path, header, TRIALS_HEADER, rows)
    out = []
    for ln in rows:
        cells = ln.split(",")
        if len(cells) != 12:
            raise SchemaMismatch(f"{path}: bad trials row {ln!r}")
        out.append({
            "trial": int(cells[0]), "seed": int(cells[1]),
            "model": cells[2], "d": int(cells[3]), "size": float(cells[4]),
            "degree": int(cells[5]), "first_birth": float(cells[6]),
            "all_births": tuple(float(b) for b in cells[7].split(";") if b),
            "t_ec": float(cells[8]), "delta": float(cells[9]),
            "t_betti": float(cells[10]), "valid": bool(int(cells[11])),
        })
    return out


def read_aggregate(path):
    """Aggregate rows as a list of dicts with typed fields."""
    header, rows = _data_lines(path)
    _check(path, header, AGGREGATE_HEADER, rows)
    out = []
    for ln in rows:
        cells = ln.split(",")
        if len(cells) != 10:
            raise SchemaMismatch(f"{path}: bad aggregate row {ln!r}")
        out.append({
            "model": cells[0], "d": int(cells[1]), "size": float(cells[2]),
            "degree": int(cells[3]), "trials": int(cells[4]),
            "invalid": int(cells[5]), "mean_birth": float(cells[6]),
            "std_birth": float(cells[7]), "t_ec": float(cells[8]),
            "mean_delta": float(cells[9]),
        })
    return out


def _read_columns(path, want_header, ncols):
    header, rows = _data_lines(path)
    _check(path, header, want_header, rows)
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in rows])
    except ValueError as exc:
        raise SchemaMismatch(f"{path}: non-numeric row ({exc})") from exc
    if data.shape[1] != ncols:
        raise SchemaMismatch(f"{path}: expected {ncols} columns")
    return data


def read_expected(path):
    """Expected-EC curve as (param, value) arrays."""
    data = _read_columns(path, EXPECTED_HEADER, 2)
    return data[:, 0], data[:, 1]


def read_mean_curve(path):
    """Trial-averaged EC curve as (param, mean, std) arrays."""
    data = _read_columns(path, MEAN_HEADER, 3)
    return data[:, 0], data[:, 1], data[:, 2]


def read_curve(path):
    """One trial's step curves as (t, ec, [beta0, beta1, ...]) arrays."""
    header, rows = _data_lines(path)
    cols = header.split(",")
    if not (cols[:2] == ["t", "ec"] and len(cols) > 2
            and all(c == f"beta{k}" for k, c in enumerate(cols[2:]))):
        raise SchemaMismatch(f"{path}: not a curve file ({header!r})")
    if not rows:
        raise EmptyInput(f"{path}: no data rows")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in rows])
    except ValueError as exc:
        raise SchemaMismatch(f"{path}: non-numeric row ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != len(cols):
        raise SchemaMismatch(f"{path}: ragged curve rows")
    return data[:, 0], data[:, 1], [data[:, 2 + k]
                                    for k in range(len(cols) - 2)]
