"""Named checks that produce pass/fail JSON reports.

Each function runs one verification at its fixed tolerance and returns a
``diagnostics.report`` dict.  The CLI exposes them individually and as suites.
"""

from __future__ import annotations

import math

import numpy as np

from ymhk.algebra import GroupElem, get_group
from ymhk.covariant import (
    covariant_diff,
    covariant_diff_adjoint,
    gauge_shift,
    global_gauge,
)
from ymhk.diagnostics import (
    blowup_normalization_check,
    default_window,
    kato_check,
    kato_convergence,
    report,
    scaling_convergence,
    scaling_law_check,
    smoothing_rate,
)
from ymhk.energy import fd_gradient_oracle, grad_ymh_k, ymh_k_energy
from ymhk.flow import FlowState, run
from ymhk.lattice import LatticeGeom, SeededSpectrum, TensorField, l2_inner, random_field
from ymhk.spectral import (
    band_limited_state,
    exact_abelian_flow,
    green_function,
    lattice_laplacian,
    oscillation_identity_check,
)

__all__ = ["SUITES", "run_suite"]


def _max_rel(pairs) -> float:
    num = max(float(np.max(np.abs(a - b))) for a, b in pairs)
    den = max(float(np.max(np.abs(b))) for _, b in pairs)
    return num / den if den > 0 else num


def gradient_error(group, k: int, N: int, seed: int, eps_list=(1e-3, 1e-4)) -> float:
    """Best relative sup deviation of the adjoint gradient from central differences."""
    geom = LatticeGeom(N)
    A = random_field(geom, 1, group, SeededSpectrum(seed + 1, 0.0, 0.5))
    u = random_field(geom, 0, group, SeededSpectrum(seed, 0.0, 0.5))
    gA, gu = grad_ymh_k(A, u, k)
    errs = []
    for eps in eps_list:
        fA, fu = fd_gradient_oracle(A, u, k, eps)
        errs.append(_max_rel([(gA.values, fA.values), (gu.values, fu.values)]))
    return min(errs)


def gradcheck(group="SU2", k: int = 1, N: int = 3, seed: int = 42) -> dict:
    if not 3 <= N <= 6:
        raise ValueError(f"gradcheck supports 3 <= N <= 6, got {N}")
    err = gradient_error(get_group(group), k, N, seed)
    return report("gradcheck", {"group": str(group), "k": k, "N": N, "seed": seed}, 1e-6, err, err <= 1e-6)


def adjointness(N: int = 4, seed: int = 0, max_rank: int = 3) -> dict:
    worst = 0.0
    geom = LatticeGeom(N)
    for tag in ("U1", "SU2"):
        for r in range(max_rank + 1):
            A = random_field(geom, 1, tag, SeededSpectrum(seed, 0.0, 1.0))
            T = random_field(geom, r, tag, SeededSpectrum(seed + 1 + r, 0.0, 1.0))
            S = random_field(geom, r + 1, tag, SeededSpectrum(seed + 101 + r, 0.0, 1.0))
            lhs = l2_inner(covariant_diff(A, T), S)
            rhs = l2_inner(T, covariant_diff_adjoint(A, S))
            worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return report("adjointness", {"N": N, "seed": seed, "ranks": max_rank}, 1e-12, worst, worst <= 1e-12)


def gauge_invariance(N: int = 4, k: int = 1, seed: int = 0) -> dict:
    geom = LatticeGeom(N)
    rng = np.random.default_rng(seed)
    worst = 0.0
    # U(1): A -> A + d chi
    A = random_field(geom, 1, "U1", SeededSpectrum(seed, 1.0, 1.0))
    u = random_field(geom, 0, "U1", SeededSpectrum(seed + 1, 1.0, 1.0))
    chi = random_field(geom, 0, "U1", SeededSpectrum(seed + 2, 0.0, 1.0))
    pairs = [((A, u), (gauge_shift(A, chi), u))]
    # SU(2): constant g
    A2 = random_field(geom, 1, "SU2", SeededSpectrum(seed + 3, 1.0, 0.7))
    u2 = random_field(geom, 0, "SU2", SeededSpectrum(seed + 4, 1.0, 0.7))
    g = GroupElem.random(get_group("SU2"), rng)
    pairs.append(((A2, u2), (global_gauge(g, A2), global_gauge(g, u2))))
    for (a, b), (c, d) in pairs:
        e1 = ymh_k_energy(a, b, k).as_dict()
        e2 = ymh_k_energy(c, d, k).as_dict()
        for key, v in e1.items():
            worst = max(worst, abs(v - e2[key]) / max(abs(v), 1e-300))
    return report("gauge_invariance", {"N": N, "k": k, "seed": seed}, 1e-12, worst, worst <= 1e-12)


def green(N: int = 8, seed: int = 0) -> dict:
    geom = LatticeGeom(N)
    G = green_function(geom)
    delta = np.zeros_like(G)
    delta[0, 0, 0, 0] = 1.0
    lap_res = float(np.max(np.abs(lattice_laplacian(G, geom.h) - delta + 1.0 / N**4)))
    mean = abs(float(G.sum()))
    u = random_field(geom, 0, "U1", SeededSpectrum(seed, 3.0, 1.0))
    osc = oscillation_identity_check(u) / float(np.max(np.abs(u.values)))
    ok = osc <= 1e-8 and mean <= 1e-12 and lap_res <= 1e-12
    return report(
        "green",
        {"N": N, "seed": seed},
        {"oscillation_rel": 1e-8, "sum": 1e-12, "laplacian": 1e-12},
        {"oscillation_rel": osc, "sum": mean, "laplacian": lap_res},
        ok,
    )


def scaling(k: int = 1, m: int = 2, seed: int = 7, fd: bool = False) -> dict:
    err = scaling_law_check(k, m, seed)
    measured = {"spectral": err}
    ok = err <= 1e-10
    if fd:
        conv = scaling_convergence(k, m, seed, N=16)
        conv["order"] = math.log2(conv["ratio"]) if conv["ratio"] > 0 else -math.inf
        measured["fd"] = conv
        ok = ok and conv["order"] >= 1.0
    return report("scaling", {"k": k, "m": m, "seed": seed}, {"spectral": 1e-10, "fd_order": 1.0}, measured, ok)


def oracle(cfg) -> dict:
    """Adaptive RK4 run against the closed-form abelian flow."""
    if get_group(cfg.group).tag != "U1":
        raise ValueError("the spectral oracle only covers U1 configurations")
    state = cfg.initial_state()
    fc = cfg.flow_config()
    final, _ = run(state, fc)
    exact = exact_abelian_flow(state, fc.t_end)
    diff = max(
        float(np.max(np.abs(final.A.values - exact.A.values))),
        float(np.max(np.abs(final.u.values - exact.u.values))),
    )
    ref = max(float(np.max(np.abs(state.A.values))), float(np.max(np.abs(state.u.values))))
    rel = diff / ref if ref > 0 else diff
    return report("oracle", cfg.as_dict(), 1e-6, rel, rel <= 1e-6)


def kato(N: int = 8, seed: int = 0) -> dict:
    geom = LatticeGeom(N)
    A = random_field(geom, 1, "SU2", SeededSpectrum(seed, 2.0, 0.5))
    u = random_field(geom, 0, "SU2", SeededSpectrum(seed + 1, 2.0, 1.0))
    res = kato_check(A, u)
    conv = kato_convergence()
    ok = res["excess"] <= 1e-12 and all(b < a for a, b in zip(conv["violation"], conv["violation"][1:]))
    return report("kato", {"N": N, "seed": seed}, {"excess": 1e-12}, {**res, "refinement": conv}, ok)


def smoothing(k: int = 1, q: int = 1, N: int = 16, seed: int = 11, snapshots: int = 12) -> dict:
    geom = LatticeGeom(N)
    u = random_field(geom, 0, "U1", SeededSpectrum(seed, 0.0, 1.0, zero_mean=True))
    state = FlowState(0.0, TensorField.zeros(geom, 1, "U1"), u, k)
    lo, hi = default_window(geom, k)
    times = np.logspace(np.log10(lo), np.log10(hi), snapshots)
    snaps = [exact_abelian_flow(state, t) for t in times]
    fit = smoothing_rate(snaps, q, k, (lo, hi))
    ok = not fit["inconclusive"] and abs(fit["slope"] - fit["target"]) <= 0.25
    return report("smoothing", {"k": k, "q": q, "N": N, "seed": seed}, 0.25, fit, ok)


def blowup(N: int = 8, seed: int = 3) -> dict:
    vals = {}
    for k in (0, 1, 2):
        vals[k] = blowup_normalization_check(band_limited_state(LatticeGeom(N), k, seed))
    dev = max(abs(v - 1.0) for v in vals.values())
    return report("blowup", {"N": N, "seed": seed}, 1e-9, {"values": vals, "max_dev": dev}, dev <= 1e-9)


SUITES = {
    "adjoint": adjointness,
    "gauge": gauge_invariance,
    "green": green,
    "scaling": lambda: scaling(fd=True),
    "kato": kato,
    "smoothing": smoothing,
    "blowup": blowup,
    "gradient": lambda: gradcheck("SU2", 1, 3, 42),
}


def run_suite(name: str) -> list[dict]:
    if name == "all":
        return [fn() for fn in SUITES.values()]
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}")
    return [SUITES[name]()]
