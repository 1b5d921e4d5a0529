"""Assertable checks of the flow's analytic properties.

Every check returns a plain number or dict; ``report`` wraps a result into the
JSON record ``{name, inputs, tolerance, measured, pass}`` used by the CLI.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

import numpy as np

from ymhk.algebra import U1
from ymhk.covariant import _cdiff, _curvature, iterated_diff
from ymhk.flow import FlowState, Trajectory, rescale
from ymhk.lattice import SITE_AXES, LatticeGeom, TensorField, l2_inner, pointwise_norm
from ymhk.spectral import band_limited_state, exact_abelian_flow, spectral_derivative, symbol

__all__ = [
    "report",
    "kato_check",
    "kato_convergence",
    "default_window",
    "smoothing_rate",
    "scaling_law_check",
    "scaling_convergence",
    "blowup_normalization_check",
    "lp_track",
]


def report(name: str, inputs: dict, tolerance, measured, passed: bool) -> dict:
    return {
        "name": name,
        "inputs": inputs,
        "tolerance": tolerance,
        "measured": measured,
        "pass": bool(passed),
    }


def dump_report(rep: dict, path=None) -> str:
    text = json.dumps(rep, indent=2, sort_keys=True, default=float)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


# -- Kato's inequality -------------------------------------------------------


def kato_check(A: TensorField, u: TensorField) -> dict:
    """Pointwise discrete Kato inequality ``|d|u|| <= |nabla u|``.

    Returns the largest violation ``|d|u|| - |nabla u|`` over sites together with
    the discretization slack.  Writing ``a = h [A_mu, u]``, which is orthogonal
    to ``u``, the triangle inequality gives

        | |u(x+e_mu)| - |u(x)| | <= h |nabla_mu u| + |a|^2 / (2 |u|),

    so the slack at a site is ``h |s|`` with ``s_mu = |[A_mu, u]|^2 / (2|u|)``.
    ``excess`` is the largest violation minus slack and must be <= 0.
    """
    geom, group = u.geom, u.group
    h = geom.h
    norm_u = pointwise_norm(u)
    d_norm = np.stack([(np.roll(norm_u, -1, mu) - norm_u) / h for mu in range(4)], axis=-1)
    lhs = np.sqrt(np.sum(d_norm**2, axis=-1))
    rhs = pointwise_norm(_cdiff(A.values, u.values, h, group))
    viol = lhs - rhs
    if group.abelian:
        slack = np.zeros_like(viol)
    else:
        br = group.bracket(A.values, u.values[..., None, :])  # (..., mu, g)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(norm_u[..., None] > 0, np.sum(br**2, axis=-1) / (2 * norm_u[..., None]), 0.0)
        slack = h * np.sqrt(np.sum(s**2, axis=-1))
    return {
        "violation": float(viol.max()),
        "slack": float(slack.max()),
        "excess": float((viol - slack).max()),
    }


def _radial_su2_pair(geom: LatticeGeom, wobble: float = 0.3):
    """Smooth SU(2) pair on which the continuum Kato inequality is an equality.

    ``u = f v`` with ``v`` rotating about e3 by ``wobble * sin(2 pi x1)`` and
    ``A_1`` chosen so that ``v`` is covariantly constant; any violation seen on
    the lattice is discretization error.
    """
    x = geom.coords() * (2 * np.pi / geom.L)
    phi = wobble * np.sin(x[..., 0])
    f = 2.0 + np.sin(x[..., 0]) + 0.3 * np.sin(x[..., 1])
    v = np.stack([np.cos(phi), np.sin(phi), np.zeros_like(phi)], axis=-1)
    A = np.zeros((geom.N,) * 4 + (4, 3))
    A[..., 0, 2] = -wobble * (2 * np.pi / geom.L) * np.cos(x[..., 0])
    return TensorField(geom, "SU2", A), TensorField(geom, "SU2", f[..., None] * v)


def kato_convergence(sizes: Sequence[int] = (8, 16, 32), wobble: float = 0.3) -> dict:
    """Kato violation on fixed smooth data under refinement, with observed orders."""
    viol = []
    for n in sizes:
        A, u = _radial_su2_pair(LatticeGeom(n), wobble)
        viol.append(max(kato_check(A, u)["violation"], 0.0))
    orders = [
        math.log2(a / b) if b > 0 else math.inf for a, b in zip(viol[:-1], viol[1:])
    ]
    return {"sizes": list(sizes), "violation": viol, "order": orders}


# -- smoothing exponent ------------------------------------------------------


def default_window(geom: LatticeGeom, k: int) -> tuple[float, float]:
    """One decade of ``t`` centred (in log) on the lattice's smoothing range.

    Smoothing is visible between ``lam_max^-(k+1)``, when the shortest lattice
    modes decay, and ``lam_min^-(k+1)``, when the last modes are gone.
    """
    lam = np.sum(np.abs(symbol(geom)) ** 2, axis=0)
    lo = np.min(lam[lam > 0]) ** -(k + 1)
    hi = np.max(lam) ** -(k + 1)
    mid = math.sqrt(lo * hi)
    return mid / math.sqrt(10.0), mid * math.sqrt(10.0)


def _participation(u: TensorField) -> float:
    e = np.sum(np.abs(np.fft.fftn(u.values, axes=SITE_AXES)) ** 2, axis=-1).ravel()
    s2 = float(np.sum(e**2))
    return float(np.sum(e) ** 2 / s2) if s2 > 0 else 0.0


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    coef, res, *_ = np.polyfit(x, y, 1, full=True)
    rms = math.sqrt(float(res[0]) / len(x)) if len(res) else 0.0
    return float(coef[0]), rms


def smoothing_rate(
    snapshots: Iterable[FlowState],
    q: int,
    k: int,
    window: tuple[float, float] | None = None,
    min_participation: float = 16.0,
) -> dict:
    """Power-law decay exponent of ``q``-th derivatives along a flow.

    ``slope`` is the least-squares slope of ``log(||nabla^q u||^2 / ||u||^2)``
    against ``log t``, which measures how fast the typical wave number grows;
    its scale-free target is ``-q/(k+1)``.  ``raw_slope`` fits ``log ||nabla^q u||^2``
    itself and ``F_slope`` does the same for the curvature when it is nonzero.
    The fit is flagged ``inconclusive`` when fewer than 8 snapshots fall in the
    window, the window spans less than a decade, a norm is exhausted, or the
    initial data is too narrow-band to show a power law.
    """
    snaps = sorted(snapshots, key=lambda s: s.t)
    if not snaps:
        raise ValueError("no snapshots")
    if window is None:
        window = default_window(snaps[0].geom, k)
    lo, hi = window
    # endpoints produced by logspace may round just outside the window
    inside = [s for s in snaps if lo * (1 - 1e-9) <= s.t <= hi * (1 + 1e-9) and s.t > 0]
    out = {"q": q, "k": k, "window": [lo, hi], "n": len(inside), "target": -q / (k + 1)}

    reason = None
    if len(inside) < 8:
        reason = f"only {len(inside)} snapshots in window"
    elif math.log10(inside[-1].t / inside[0].t) < 1.0 - 1e-9:
        reason = "window spans less than one decade"
    elif _participation(snaps[0].u) < min_participation:
        reason = "initial data is narrow-band; decay is exponential, not a power law"

    t = np.array([s.t for s in inside])
    dq = np.array([l2_inner(d, d) for d in (iterated_diff(s.A, s.u, q) for s in inside)])
    base = np.array([l2_inner(s.u, s.u) for s in inside])
    Fq = np.array(
        [
            l2_inner(d, d)
            for d in (
                iterated_diff(s.A, s.A.like(_curvature(s.A.values, s.geom.h, s.group)), q)
                for s in inside
            )
        ]
    )
    if reason is None and (np.any(dq <= 1e-300) or np.any(base <= 1e-300)):
        reason = "norm depleted inside window"
    out["inconclusive"] = reason is not None
    out["reason"] = reason
    if len(inside) >= 2 and np.all(dq > 0) and np.all(base > 0):
        lt = np.log(t)
        out["slope"], out["residual"] = _fit(lt, np.log(dq / base))
        out["raw_slope"], out["raw_residual"] = _fit(lt, np.log(dq))
        if np.all(Fq > 0):
            out["F_slope"], _ = _fit(lt, np.log(Fq))
    else:
        out["slope"] = out["raw_slope"] = float("nan")
        out["residual"] = out["raw_residual"] = float("nan")
    return out


# -- scaling law ---------------------------------------------------------------


def _rel_sup(a: FlowState, b: FlowState) -> float:
    num = max(np.max(np.abs(a.A.values - b.A.values)), np.max(np.abs(a.u.values - b.u.values)))
    den = max(np.max(np.abs(b.A.values)), np.max(np.abs(b.u.values)))
    return float(num / den) if den > 0 else float(num)


def _commutation_error(state: FlowState, m: int, t: float, kind: str) -> float:
    flow_then_scale = rescale(exact_abelian_flow(state, t, kind), m)
    scale_then_flow = exact_abelian_flow(rescale(state, m), t / m ** (2 * (state.k + 1)), kind)
    return _rel_sup(flow_then_scale, scale_then_flow)


def _scaling_time(k: int) -> float:
    # lowest nonzero continuum eigenvalue is (2 pi)^2 on the unit torus
    return 0.1 / (2 * np.pi) ** (2 * (k + 1))


def scaling_law_check(
    k: int, m: int, seed: int, kind: str = "continuum", N: int = 8, amplitude: float = 1.0
) -> float:
    """Max relative difference between flow-then-rescale and rescale-then-flow.

    The data is band limited so that the covering pullback by ``m`` stays
    resolved.  With continuum symbols the two paths agree to roundoff; with the
    forward-difference symbol they differ by the discretization error.
    """
    if m < 2:
        raise ValueError(f"covering degree must be >= 2, got {m}")
    geom = LatticeGeom(N)
    kmax = max(1, (N // 2 - 1) // m)
    state = band_limited_state(geom, k, seed, kmax=kmax, amplitude=amplitude)
    return _commutation_error(state, m, _scaling_time(k), kind)


def scaling_convergence(k: int, m: int, seed: int, N: int = 8) -> dict:
    """Lattice-symbol commutation error on the same continuum data at N and 2N."""
    errs = []
    for n in (N, 2 * N):
        state = band_limited_state(LatticeGeom(n), k, seed, kmax=1)
        errs.append(_commutation_error(state, m, _scaling_time(k), "lattice"))
    return {"N": [N, 2 * N], "error": errs, "ratio": errs[0] / errs[1] if errs[1] > 0 else math.inf}


# -- blow-up normalization --------------------------------------------------


def _sup_quantity_spectral(state: FlowState) -> float:
    geom = state.geom
    dA = spectral_derivative(state.A.values, geom)  # (..., mu, nu, g)
    F = dA - np.swapaxes(dA, 4, 5)
    du = spectral_derivative(state.u.values, geom)
    return float(np.max(pointwise_norm(F) + pointwise_norm(du)))


def _sup_quantity_lattice(state: FlowState) -> float:
    geom, group = state.geom, state.group
    F = _curvature(state.A.values, geom.h, group)
    du = _cdiff(state.A.values, state.u.values, geom.h, group)
    return float(np.max(pointwise_norm(F) + pointwise_norm(du)))


def _dft_matrix(geom: LatticeGeom, points: np.ndarray, stretch: float) -> np.ndarray:
    kap = np.fft.fftfreq(geom.N, d=1.0 / geom.N)
    return np.exp(2j * np.pi * np.outer(points, kap) * stretch / geom.L) / geom.N


def _rescaled_sup(state: FlowState, lam: float) -> float:
    """sup of |F| + |grad u| for ``x -> lam * field(lam * x)``, evaluated at ``x_j / lam``."""
    geom = state.geom
    pts = np.arange(geom.N) * geom.h / lam
    E = _dft_matrix(geom, pts, lam)
    theta = symbol(geom, "continuum")[0, :, 0, 0, 0]  # 1-D symbol

    def evaluate(v_hat, mu=None):
        mats = [E] * 4
        if mu is not None:
            mats = [E * (theta * lam)[None, :] if a == mu else E for a in range(4)]
        out = np.einsum("ia,jb,kc,ld,abcd...->ijkl...", *mats, v_hat, optimize=True)
        return lam * out.real

    a_hat = np.fft.fftn(state.A.values, axes=SITE_AXES)
    u_hat = np.fft.fftn(state.u.values, axes=SITE_AXES)
    dA = np.stack([evaluate(a_hat, mu) for mu in range(4)], axis=4)
    F = dA - np.swapaxes(dA, 4, 5)
    du = np.stack([evaluate(u_hat, mu) for mu in range(4)], axis=4)
    return float(np.max(pointwise_norm(F) + pointwise_norm(du)))


def blowup_normalization_check(state: FlowState, kind: str = "spectral") -> float:
    """Supremum of ``|F| + |grad u|`` after the blow-up normalization.

    With ``S`` the monitored supremum, ``rho = S^-(k+1)`` and the spatial factor
    is ``rho^(1/(2(k+1)))``.  The rescaled state is evaluated through its own
    Fourier series; the result is 1 up to roundoff on band-limited U(1) states
    (``kind='spectral'``).  With ``kind='lattice'`` ``S`` comes from forward
    differences and the result deviates from 1 by the discretization error.
    """
    if state.group.tag != U1.tag:
        raise ValueError("blow-up normalization is checked on U1 states")
    if kind == "spectral":
        S = _sup_quantity_spectral(state)
    elif kind == "lattice":
        S = _sup_quantity_lattice(state)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if S == 0:
        raise ValueError("zero state has no blow-up normalization")
    rho = S ** -(state.k + 1)
    lam = rho ** (1.0 / (2 * (state.k + 1)))
    return _rescaled_sup(state, lam)


# -- L^p tracking --------------------------------------------------------------


def lp_track(trajectory: Trajectory, p: float) -> np.ndarray:
    """Rows ``(t, ||F||_p + ||grad u||_p, ||F||_inf + ||grad u||_inf)``."""
    if not p >= 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p!r}")
    rows = []
    for r in trajectory.records:
        if float(p) not in r["lp"]:
            raise KeyError(f"p={p} was not tracked; available: {sorted(r['lp'])}")
        F_lp, gu_lp = r["lp"][float(p)]
        rows.append((r["t"], F_lp + gu_lp, r["sup_F"] + r["sup_gradu"]))
    return np.array(rows).reshape(-1, 3)


def monotone_after_max(series: np.ndarray, rtol: float = 1e-12) -> bool:
    """True when ``series`` never increases after its maximum."""
    s = np.asarray(series, dtype=float)
    if s.size < 2:
        return True
    tail = s[int(np.argmax(s)) :]
    return bool(np.all(np.diff(tail) <= rtol * max(1.0, float(np.max(np.abs(s))))))
