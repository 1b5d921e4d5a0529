"""Acceptance criteria, one test each, with runtime budgets.

Every test records a one-line PASS/FAIL verdict; the lines are printed as the
test runs and repeated in the terminal summary.
"""

import functools
import time

import numpy as np

from ymhk import checks
from ymhk.algebra import get_group
from ymhk.cli import main
from ymhk.config import RunConfig, bundled_configs, load_config
from ymhk.flow import run

VERDICTS: list[str] = []


def verdict(n: int, name: str, passed: bool, detail: str) -> None:
    line = f"criterion {n:2d} {name:<28s} {'PASS' if passed else 'FAIL'}  {detail}"
    VERDICTS.append(line)
    print(line)
    assert passed, line


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


@functools.lru_cache(maxsize=None)
def _bundled_run(name: str):
    cfg = load_config(bundled_configs()[name])
    return run(cfg.initial_state(), cfg.flow_config())[1]


def test_01_gradient_exactness():
    errs = {}
    with Timer() as tm:
        for tag in ("U1", "SU2"):
            for k in (0, 1, 2):
                errs[(tag, k)] = checks.gradient_error(get_group(tag), k, 3, 42)
    worst = max(errs.values())
    verdict(1, "gradient exactness", worst <= 1e-6 and tm.elapsed <= 60,
            f"max rel err {worst:.2e} <= 1e-6, {tm.elapsed:.1f}s <= 60s")


def test_02_adjointness():
    with Timer() as tm:
        rep = checks.adjointness(N=4, max_rank=3)
    verdict(2, "adjointness", rep["pass"] and tm.elapsed <= 10,
            f"rel err {rep['measured']:.2e} <= 1e-12, {tm.elapsed:.1f}s <= 10s")


def test_03_energy_monotonicity():
    cfg = load_config(bundled_configs()["su2_k1"])
    assert (cfg.group, cfg.k, cfg.N, cfg.t_end) == ("SU2", 1, 4, "20*dt_max")
    with Timer() as tm:
        traj = _bundled_run("su2_k1")
    e = traj.column("total_k")
    worst = float(np.max(np.diff(e))) / e[0]
    ok = worst <= 1e-10 and tm.elapsed <= 120 and len(e) > 20
    verdict(3, "energy monotonicity", ok,
            f"max increase {worst:.2e}*E(0) <= 1e-10 over {len(e) - 1} steps, {tm.elapsed:.1f}s <= 120s")


def test_04_abelian_oracle():
    rel = {}
    with Timer() as tm:
        for k in (0, 1, 2):
            cfg = RunConfig(group="U1", N=8, k=k, seed=5, alpha=4.0, t_end="10*dt_max")
            rel[k] = checks.oracle(cfg)["measured"]
    worst = max(rel.values())
    verdict(4, "abelian oracle", worst <= 1e-6 and tm.elapsed <= 120,
            f"max rel sup diff {worst:.2e} <= 1e-6, {tm.elapsed:.1f}s <= 120s")


def test_05_smoothing_exponent():
    with Timer() as tm:
        rep = checks.smoothing(k=1, q=1, N=16)
    m = rep["measured"]
    ok = rep["pass"] and tm.elapsed <= 120
    verdict(5, "smoothing exponent", ok,
            f"slope of log(|grad u|^2/|u|^2) {m['slope']:.3f} vs {m['target']:.3f} (+-0.25), "
            f"unnormalized {m['raw_slope']:.3f}, {tm.elapsed:.1f}s <= 120s")


def test_06_scaling_law():
    with Timer() as tm:
        reps = [checks.scaling(k, 2, 7, fd=True) for k in (0, 1, 2)]
    spec = max(r["measured"]["spectral"] for r in reps)
    order = min(r["measured"]["fd"]["order"] for r in reps)
    ok = spec <= 1e-10 and order >= 1.0 and tm.elapsed <= 60
    verdict(6, "scaling law", ok,
            f"spectral {spec:.2e} <= 1e-10, FD order {order:.3f} >= 1, {tm.elapsed:.1f}s <= 60s")


def test_07_green_identity():
    with Timer() as tm:
        rep = checks.green(N=8)
    m = rep["measured"]
    verdict(7, "Green/oscillation identity", rep["pass"] and tm.elapsed <= 10,
            f"osc {m['oscillation_rel']:.2e}, sum {m['sum']:.2e}, lap {m['laplacian']:.2e}, {tm.elapsed:.1f}s")


def test_08_l2_dissipation():
    worst = {}
    with Timer() as tm:
        for name in sorted(bundled_configs()):
            u = _bundled_run(name).column("u_l2")
            worst[name] = float(np.max(np.diff(u)))
    groups = {load_config(bundled_configs()[n]).group for n in worst}
    ok = all(v <= 0 for v in worst.values()) and groups == {"U1", "SU2"} and tm.elapsed <= 60
    verdict(8, "L2 dissipation of u", ok,
            f"max step change {max(worst.values()):.2e} <= 0 on {len(worst)} runs, {tm.elapsed:.1f}s <= 60s")


def test_09_blowup_normalization():
    with Timer() as tm:
        rep = checks.blowup(N=8)
    dev = rep["measured"]["max_dev"]
    verdict(9, "blow-up normalization", rep["pass"] and tm.elapsed <= 10,
            f"max |value - 1| {dev:.2e} <= 1e-9, {tm.elapsed:.1f}s <= 10s")


def test_10_gauge_invariance():
    with Timer() as tm:
        rep = checks.gauge_invariance()
    verdict(10, "gauge invariance", rep["pass"] and tm.elapsed <= 10,
            f"rel energy change {rep['measured']:.2e} <= 1e-12, {tm.elapsed:.1f}s <= 10s")


def test_11_determinism(tmp_path):
    cfg = str(bundled_configs()["u1_k1"])
    with Timer() as tm:
        codes = [
            main(["run", "--config", cfg, "--out-dir", str(tmp_path / d), "--workers", "1"])
            for d in ("a", "b")
        ]
    a = (tmp_path / "a" / "trajectory.csv").read_bytes()
    b = (tmp_path / "b" / "trajectory.csv").read_bytes()
    ok = codes == [0, 0] and a == b and tm.elapsed <= 60
    verdict(11, "determinism", ok, f"{len(a)} bytes identical={a == b}, {tm.elapsed:.1f}s <= 60s")
