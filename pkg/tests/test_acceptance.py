"""Acceptance criteria, one test each, every one printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
collected in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from quantcap import cli
from quantcap.bounds import prop1_upper, prop3_upper, theorem1_upper, waterfilling
from quantcap.configs import Architecture, ReceiverConfig, build_config, induced_arrangement
from quantcap.counting import r_central, r_general, r_parallel
from quantcap.geometry import HyperplaneArrangement, enumerate_cells, is_general_position, vertex_radius
from quantcap.packing import pack_margin, r_ssps_oracle
from quantcap.simulate import (
    constellation_from_config,
    rate_curve,
    sample_channel,
    transition_exact,
    transition_mc,
    trial_channel,
)

pytestmark = pytest.mark.slow

FIG3 = dict(n_t=2, n_r=3, n_tq=4, trials=50, n_samples=100_000, seed=2024)
FIG3_GRID = [float(p) for p in range(0, 45, 5)]
TARGETS = {"select": math.log2(5), "sign": 3.0, "svd_grid": math.log2(9), "gp": math.log2(11)}


def gp_instance(rng, m, n, central):
    while True:
        arr = HyperplaneArrangement(
            rng.standard_normal((n, m)), np.zeros(n) if central else rng.standard_normal(n)
        )
        if is_general_position(arr):
            return arr


def test_criterion_1_region_counts(report):
    t0 = time.perf_counter()
    got = (r_general(2, 4), r_central(4, 2), r_parallel(2, 2, 2), r_parallel(2, 1, 4))
    elapsed = time.perf_counter() - t0
    ok = got == (11, 8, 9, 5) and elapsed < 1.0
    report("criterion 1: region counts 11/8/9/5", ok, f"got {got}, {elapsed * 1e3:.2f} ms")
    assert ok


def test_criterion_2_enumeration_matches_formulas(report):
    rng = np.random.default_rng(20240601)
    t0 = time.perf_counter()
    bad = []
    for k in range(200):
        m = 2 + k % 2
        n = int(rng.integers(1, 9))
        arr = gp_instance(rng, m, n, central=False)
        got = len(enumerate_cells(arr, vertex_radius(arr) + 1.0))
        if got != r_general(m, n):
            bad.append(("general", m, n, got))
    for k in range(50):
        m = 2 + k % 2
        n = int(rng.integers(1, 9))
        arr = gp_instance(rng, m, n, central=True)
        got = len(enumerate_cells(arr, 1.0))
        if got != r_central(n, m):
            bad.append(("central", m, n, got))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120
    report("criterion 2: enumeration = formula on 200 GP + 50 central", ok,
           f"{len(bad)} mismatches, {elapsed:.1f} s")
    assert ok, bad


def test_criterion_3_oracle_dominance(report):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    failures = []
    for k in range(10):
        n = int(rng.integers(1, 6))
        r = float(rng.uniform(2.0, 6.0))
        arr = HyperplaneArrangement(rng.standard_normal((n, 2)), rng.uniform(-2.5, 2.5, n))
        pm = len(pack_margin(arr, r))
        orc = r_ssps_oracle(arr, r, 0.25)
        if orc < pm:
            failures.append((k, n, r, orc, pm))
    fig2a = HyperplaneArrangement([[1, 0]] * 4, [-3, -1, 1, 3])
    fig2c = HyperplaneArrangement([[1, 0], [1, 0], [0, 1], [0, 1]], [-1, 1, -1, 1])
    rc = math.sqrt(8) + 1
    equal = (
        r_ssps_oracle(fig2a, 5.0) == len(pack_margin(fig2a, 5.0)) == 5
        and r_ssps_oracle(fig2c, rc) == len(pack_margin(fig2c, rc)) == 9
    )
    elapsed = time.perf_counter() - t0
    ok = not failures and equal and elapsed < 300
    report("criterion 3: oracle >= pack_margin, equality 5 and 9", ok,
           f"{len(failures)} violations, figures equal={equal}, {elapsed:.1f} s")
    assert ok, failures


def test_criterion_4_bound_formulas(report):
    p1 = prop1_upper(1.0, 1e6, 4)
    ok1 = abs(p1 - math.log2(5)) <= 1e-3
    rep = prop3_upper([1.0, 0.9, 0.5], 1e6, 4, n_t=2, n_r=3)
    K = rep.details["K"]
    ok2 = rep.details["branch"] == "quantizer-limited" and rep.details["r_star"] == K * math.log2(
        4 / K + 1
    )
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(100):
        lam = rng.uniform(0.05, 3.0, int(rng.integers(1, 7)))
        P = float(10 ** rng.uniform(-2, 4))
        a = waterfilling(lam, P)
        floor = lam**-2.0
        act = a.per_channel > 0
        res = abs(a.per_channel.sum() - P)
        res = max(res, np.abs(a.per_channel[act] + floor[act] - a.water_level).max(initial=0))
        res = max(res, np.maximum(0, a.water_level - floor[~act]).max(initial=0))
        worst = max(worst, res)
    ok3 = worst <= 1e-9
    ok = ok1 and ok2 and ok3
    report("criterion 4: prop1 asymptote, prop3 branch 2, waterfilling KKT", ok,
           f"prop1={p1:.6f}, branch2 exact={ok2}, max KKT residual={worst:.2e}")
    assert ok


def test_criterion_5_exact_vs_mc(report):
    n = 100_000
    inside = total = 0
    for k in range(20):
        rng = np.random.default_rng(500 + k)
        ch = sample_channel(2, 3, 500 + k)
        Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        cfg = ReceiverConfig(Q, rng.normal(0, 0.5, 3), Architecture.GP)
        P = float(10 ** rng.uniform(0, 2))
        cons = constellation_from_config(ch, cfg, P)
        ex = transition_exact(ch, cfg, cons).rows
        mc = transition_mc(ch, cfg, cons, n, [77, k]).rows
        sigma = np.sqrt(ex * (1 - ex) / n)
        inside += int(np.sum(np.abs(mc - ex) <= 3 * sigma))
        total += ex.size
    frac = inside / total
    ok = frac >= 0.99
    report("criterion 5: exact vs MC within 3 sigma for >= 99% of entries", ok,
           f"{inside}/{total} = {frac:.4f}")
    assert ok


@pytest.fixture(scope="module")
def fig3_run():
    t0 = time.perf_counter()
    curve = rate_curve(list(TARGETS), FIG3_GRID, FIG3["n_t"], FIG3["n_r"], FIG3["n_tq"],
                       FIG3["trials"], FIG3["n_samples"], FIG3["seed"])
    return curve, time.perf_counter() - t0


def test_criterion_6_fig3_reproduction(report, fig3_run):
    curve, elapsed = fig3_run
    hi = {s: curve.lookup(40.0, s).mean_rate_bits for s in TARGETS}
    order = hi["select"] < hi["sign"] < hi["svd_grid"] < hi["gp"]
    close = all(abs(hi[s] - TARGETS[s]) <= 0.2 for s in TARGETS)
    low = {s: curve.lookup(0.0, s).mean_rate_bits for s in TARGETS}
    gp_not_best = any(low[s] >= low["gp"] for s in TARGETS if s != "gp")
    below = all(
        curve.lookup(p, s).mean_rate_bits <= curve.lookup(p, "unquantized").mean_rate_bits
        for p in FIG3_GRID
        for s in TARGETS
    )
    ok = order and close and gp_not_best and below and elapsed < 1800
    detail = ", ".join(f"{s}={v:.3f}" for s, v in hi.items())
    report("criterion 6: rate ordering and 40 dB asymptotes", ok,
           f"40 dB {detail}; 0 dB gp not best={gp_not_best}; below baseline={below}; "
           f"{elapsed:.0f} s")
    assert ok


def test_criterion_7_theorem1_dominates(report, fig3_run):
    curve, _ = fig3_run
    cache = {}
    worst = math.inf
    for rec in curve.records:
        if rec.strategy == "unquantized":
            continue
        P = 10.0 ** (rec.power_db / 10.0)
        key = (rec.trial, rec.strategy, rec.power_db)
        if key not in cache:
            ch = trial_channel(FIG3["seed"], rec.trial, FIG3["n_t"], FIG3["n_r"])
            arr = induced_arrangement(ch, build_config(rec.strategy, ch, FIG3["n_tq"], P))
            cache[key] = theorem1_upper([arr], P, FIG3["n_t"], FIG3["n_r"]).value_bits
        worst = min(worst, cache[key] - rec.rate_bits)
    ok = worst >= 0
    report("criterion 7: theorem 1 bound >= achieved rate in every cell", ok,
           f"{len(cache)} cells, smallest margin {worst:.3f} bits")
    assert ok


def test_criterion_8_sweep_determinism(report, tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(
        '{"n_t": 2, "n_r": 3, "n_tq": 4, "power_db": [0, 20, 40],'
        ' "strategies": ["select", "sign", "svd_grid", "gp"], "trials": 3,'
        ' "mc_samples": 20000, "seed": 8, "output_dir": "",'
        ' "options": {"k_convention": "printed", "prop3_exponent": "printed",'
        ' "optimize_prior": false}}'
    )
    codes = [
        cli.main(["sweep", "--spec", str(spec), "--output-dir", str(tmp_path / d)])
        for d in ("one", "two")
    ]
    capsys.readouterr()
    same = all(
        (tmp_path / "one" / f).read_bytes() == (tmp_path / "two" / f).read_bytes()
        for f in ("rates.csv", "bounds.csv")
    )
    ok = codes == [0, 0] and same
    report("criterion 8: byte-identical sweep CSVs", ok, f"exit codes {codes}")
    assert ok
