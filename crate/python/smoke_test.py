"""Smoke test for the Python bindings.

Build first:
    cargo build -p lhospital-py --release
    cp target/release/liblhospital_py.so python/lhospital_py.so
then run from the repository root:
    python3 python/smoke_test.py
"""
import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import lhospital_py as lh


def main():
    f = lh.Seq([5, 6, 8, 12, 16, 22])
    g = lh.Seq([1, 2, 3, 4, 5, 6])
    assert len(f) == 6 and f.mode == "exact"
    assert lh.rho(f, g).values == ["1", "2", "4", "4", "6"]

    v = lh.verify_theorem(f, g)
    assert v["matched"] == "DownUp", v

    assert lh.predict("up", "pos") == "DownUp"
    assert lh.predict("down", "neg") == "DownUp"
    assert lh.predict("down", "pos") == "UpDown"

    rep = lh.classify(lh.Seq([3, 2, 1, 2, 3]))
    assert rep["pattern"] == "DownUp" and rep["ell"] == 2

    approx = lh.Seq([3.0, 2.5, 2.0, 2.5])
    assert approx.mode == "approx"
    assert lh.classify(approx)["pattern"] == "DownUp"

    try:
        lh.verify_theorem(lh.Seq([1, 2, 3]), lh.Seq([1, 2, 2]))
    except lh.HypothesisFailed:
        pass
    else:
        raise AssertionError("expected HypothesisFailed")

    try:
        lh.Seq([1, 2.5])
    except ValueError:
        pass
    else:
        raise AssertionError("mixed literals accepted")

    assert lh.weighted_mean_ratio(f, g, 0, 5) == "17/5"

    ones = lh.Seq([1, 1, 1, 1])
    assert lh.apply_l_head(ones, 2).values == ["1", "3", "6", "10"]
    assert lh.apply_r_tail(lh.Seq([0, 0, 0, 0, 0, 1]), 2).values == ["6", "5", "4", "3", "2", "1"]
    assert lh.semigroup_check(ones, 2, 3, "l")

    assert lh.log_shape(lh.Seq([1, 1, 2, 6, 24]))["shape"] == "StrictLogConvex"

    est = lh.limit_estimate("poly:1,2", "poly:0,1", case="i", horizon=1000)
    assert est["lo"] == "2.0" and est["hi"] == "2.0", est

    fz = lh.fuzz(instances=200, seed=7)
    assert fz["violations"] == 0 and fz == lh.fuzz(instances=200, seed=7)

    th = lh.example_thresholds(4)
    assert abs(th["entries"][1]["alpha"] - (math.e - 1)) < 1e-12

    tr = lh.example_transition(3)
    assert tr["midpoint_minimum_at"] == 3

    csv = lh.example_figure_csv([0, 1], 10)
    assert csv.splitlines()[0] == "n,k=0,k=1"

    print("smoke test passed")


if __name__ == "__main__":
    main()
