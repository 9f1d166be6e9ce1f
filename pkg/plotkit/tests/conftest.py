"""Writers for small experiment-style CSV fixtures."""

import pytest

VERSION_LINE = "# torusperc 0.1.0"

TRIALS_HEADER = ("trial,seed,model,d,size,degree,first_birth,all_births,"
                 "t_ec,delta,t_betti,valid")
AGGREGATE_HEADER = ("model,d,size,degree,trials,invalid,mean_birth,"
                    "std_birth,t_ec,mean_delta")


def _write(path, header, rows):
    with open(path, "w") as fh:
        fh.write(VERSION_LINE + "\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    return str(path)


@pytest.fixture
def trials_file(tmp_path):
    def make(births, name="trials.csv", degree=1, t_ec=0.5, t_betti=None,
             valid=1, model="perm", d=2, size=30):
        rows = []
        for i, b in enumerate(births):
            tb = t_betti[i] if t_betti is not None else "nan"
            rows.append((i, 100 + i, model, d, size, degree, repr(b),
                         repr(b), t_ec, repr(b - t_ec), tb, valid))
        return _write(tmp_path / name, TRIALS_HEADER, rows)
    return make


@pytest.fixture
def aggregate_file(tmp_path):
    def make(rows, name="aggregate.csv"):
        made = []
        for r in rows:
            made.append((r.get("model", "perm"), r.get("d", 2), r["size"],
                         r.get("degree", 1), r.get("trials", 10),
                         r.get("invalid", 0), r["mean_birth"],
                         r.get("std_birth", 0.01), r.get("t_ec", 0.5),
                         r.get("mean_delta", 0.0)))
        return _write(tmp_path / name, AGGREGATE_HEADER, made)
    return make


@pytest.fixture
def expected_file(tmp_path):
    def make(param, value, name="expected_ec.csv"):
        return _write(tmp_path / name, "param,expected_ec",
                      list(zip(param, value)))
    return make


@pytest.fixture
def mean_curve_file(tmp_path):
    def make(param, mean, std=None, name="mean_curve.csv"):
        std = std if std is not None else [0.0] * len(param)
        return _write(tmp_path / name, "param,mean_ec,std_ec",
                      list(zip(param, mean, std)))
    return make


@pytest.fixture
def curve_file(tmp_path):
    def make(t, ec, betas, name="trial_00000.csv"):
        header = "t,ec," + ",".join(f"beta{k}" for k in range(len(betas)))
        rows = [(t[i], ec[i], *(b[i] for b in betas))
                for i in range(len(t))]
        return _write(tmp_path / name, header, rows)
    return make
