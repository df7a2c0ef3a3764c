"""Smoke tests for the pybind module (run with PYTHONPATH at the build dir)."""

import json
import math

import _oneshotmc as omc


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b}"


def test_dist_basics():
    d = omc.JointDist([("X", 2), ("Y", 2)], ["1/2", "1/4", "0", "1/4"])
    mx = d.marginal(["X"])
    assert mx.probs() == ["3/4", "1/4"]
    c0 = d.condition({"X": 0})
    assert c0.probs() == ["2/3", "1/3"]
    u = omc.JointDist([("X", 4)], ["1/4"] * 4)
    approx(omc.entropy_bits(u, ["X"]), 2.0)
    assert omc.tv_half(d, d) == "0"


def test_spectrum():
    u8 = omc.JointDist([("X", 8)], ["1/8"] * 8)
    pm = omc.JointDist([("X", 8)], ["0", "0", "0", "1", "0", "0", "0", "0"])
    approx(omc.d_s_bits(pm, u8, "1/2"), 3.0)
    approx(omc.d_h_bits(u8, u8, "1/4"), 0.0)
    approx(omc.kl_bits(pm, u8), 3.0)


def test_task_pipeline():
    # two-bit benchmark: p_XYZ x p_{M|X} x p_{N|Y}
    probs = []
    p_xy = {(0, 0): (9, 32), (0, 1): (7, 32), (1, 0): (5, 32), (1, 1): (11, 32)}
    mk = {0: (11, 5), 1: (3, 13)}
    nk = {0: (12, 4), 1: (6, 10)}
    for x in range(2):
        for y in range(2):
            for m in range(2):
                for n in range(2):
                    num = p_xy[(x, y)][0] * mk[x][m] * nk[y][n]
                    probs.append(f"{num}/{32 * 16 * 16}")
    vars_ = [("X", 2), ("Y", 2), ("Z", 1), ("M", 2), ("N", 2)]
    # row-major order is X,Y,Z,M,N; Z has size 1 so the layout above matches
    d = omc.JointDist(vars_, probs)
    assert d.is_markov(["M"], ["X"], ["Y", "Z", "N"])

    rep = json.loads(omc.region_oneshot(d, 5.0, 6.0, "1/4", "1/20"))
    assert rep["satisfied"]
    assert rep["good_mass"] == "1"

    ts = json.loads(omc.verify_test_set(d, 5.0, 6.0, "1/4"))
    assert ts["ok"]

    sim = json.loads(omc.simulate(d, 5.0, 6.0, "1/4", 2000, seed=7, threads=2))
    assert sim["trials"] == 2000
    assert sim["tv_estimate"] <= 0.05 + 10 * 0.25


def test_experiments():
    approx(omc.hard_instance_entropy(64, "1/64"), math.log2(56) / 8, 1e-12)
    cex = omc.counterexample("1/256", 1 << 12)
    assert cex["ok"]
    rep = omc.run_lemma_suite("restriction", 5, 50)
    assert rep["failures"] == 0


if __name__ == "__main__":
    test_dist_basics()
    test_spectrum()
    test_task_pipeline()
    test_experiments()
    print("python smoke: all good")
