"""Negative gradient flow of the discrete k-energy.

The pair ``(A, u)`` evolves by ``d/dt (A, u) = -grad E_k(A, u)`` with classical
RK4 steps, step-doubling error control and a hard step cap from the largest
eigenvalue of the order ``2(k+1)`` linear part.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ymhk.covariant import _cdiff, _curvature
from ymhk.energy import EnergyBreakdown, grad_ymh_k, ymh_k_energy
from ymhk.lattice import LatticeGeom, TensorField, lp_norm, pointwise_norm

__all__ = [
    "FlowState",
    "FlowConfig",
    "Trajectory",
    "FlowAborted",
    "CSV_HEADER",
    "stability_cap",
    "step_rk4",
    "run",
    "monitor",
    "rescale",
]

log = logging.getLogger(__name__)

CSV_HEADER = (
    "t", "e_kF", "e_ku", "e_0F", "e_0u", "total_k", "total_0",
    "sup_F", "sup_gradu", "sup_blowup", "u_l2", "F_lp", "gradu_lp", "dt",
)  # fmt: skip


@dataclass(frozen=True)
class FlowState:
    t: float
    A: TensorField
    u: TensorField
    k: int

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise ValueError(f"flow time must be finite, got {self.t!r}")
        if self.k < 0:
            raise ValueError(f"order k must be >= 0, got {self.k}")
        if self.A.rank != 1 or self.u.rank != 0:
            raise ValueError("state needs a rank-1 connection and a rank-0 Higgs field")
        if self.A.geom != self.u.geom or self.A.group.tag != self.u.group.tag:
            raise ValueError("connection and Higgs field live on different lattices or groups")

    @property
    def geom(self) -> LatticeGeom:
        return self.A.geom

    @property
    def group(self):
        return self.A.group

    @classmethod
    def zero(cls, geom: LatticeGeom, group, k: int, t: float = 0.0) -> FlowState:
        return cls(t, TensorField.zeros(geom, 1, group), TensorField.zeros(geom, 0, group), k)


@dataclass(frozen=True)
class FlowConfig:
    t_end: float
    dt_init: float
    dt_max: float
    tol: float = 1e-8
    monitor_every: int = 1
    snapshot_every: int = 0
    p_list: tuple = (4.0,)
    energy_slack: float = 1e-10

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if not 0 < self.dt_init <= self.dt_max:
            raise ValueError(f"need 0 < dt_init <= dt_max, got {self.dt_init!r}, {self.dt_max!r}")
        if not self.tol > 0:
            raise ValueError(f"step-doubling tolerance must be positive, got {self.tol!r}")
        if self.monitor_every < 1 or self.snapshot_every < 0:
            raise ValueError("monitor cadence must be >= 1 and snapshot cadence >= 0")
        if any(p < 1 for p in self.p_list):
            raise ValueError(f"L^p exponents must be >= 1, got {self.p_list}")


@dataclass
class Trajectory:
    records: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    rejected_steps: int = 0

    def append(self, rec: dict) -> None:
        if self.records and not rec["t"] > self.records[-1]["t"]:
            raise ValueError("trajectory times must be strictly increasing")
        self.records.append(rec)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.records])

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self, path, p: float | None = None) -> None:
        """Write the fixed-header CSV; the L^p columns use ``p`` (default: first tracked)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in self.records:
                pp = p if p is not None else next(iter(r["lp"]), None)
                F_lp, gu_lp = r["lp"].get(pp, (float("nan"), float("nan")))
                row = [r[c] for c in CSV_HEADER[:11]] + [F_lp, gu_lp, r["dt"]]
                w.writerow([repr(float(x)) for x in row])


class FlowAborted(RuntimeError):
    """Raised when a step produces non-finite values; carries the last good state."""

    def __init__(self, message: str, state: FlowState, trajectory: Trajectory | None = None):
        super().__init__(message)
        self.state = state
        self.trajectory = trajectory


def stability_cap(geom: LatticeGeom, k: int, safety: float = 0.5) -> float:
    lam_max = 16.0 / geom.h**2
    return safety * 2.0 / lam_max ** (k + 1)


def _rhs(state: FlowState, Av, uv):
    A = TensorField(state.geom, state.group, Av)
    u = TensorField(state.geom, state.group, uv)
    gA, gu = grad_ymh_k(A, u, state.k)
    return -gA.values, -gu.values


def _rk4_arrays(state: FlowState, Av, uv, dt):
    k1 = _rhs(state, Av, uv)
    k2 = _rhs(state, Av + 0.5 * dt * k1[0], uv + 0.5 * dt * k1[1])
    k3 = _rhs(state, Av + 0.5 * dt * k2[0], uv + 0.5 * dt * k2[1])
    k4 = _rhs(state, Av + dt * k3[0], uv + dt * k3[1])
    An = Av + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    un = uv + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return An, un


def step_rk4(state: FlowState, dt: float) -> FlowState:
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt!r}")
    try:
        An, un = _rk4_arrays(state, state.A.values, state.u.values, dt)
    except ValueError as exc:
        # intermediate stage blew up; TensorField refuses non-finite values
        raise FlowAborted(f"non-finite stage at t={state.t!r}: {exc}", state) from exc
    if not (np.all(np.isfinite(An)) and np.all(np.isfinite(un))):
        raise FlowAborted(f"non-finite values after step at t={state.t!r}", state)
    return replace(state, t=state.t + dt, A=state.A.like(An), u=state.u.like(un))


def monitor(state: FlowState, p_list=(4.0,), energy: EnergyBreakdown | None = None) -> dict:
    """All trajectory scalars for ``state`` (``dt`` left at 0)."""
    geom, group = state.geom, state.group
    if energy is None:
        energy = ymh_k_energy(state.A, state.u, state.k)
    F = TensorField(geom, group, _curvature(state.A.values, geom.h, group))
    du = TensorField(geom, group, _cdiff(state.A.values, state.u.values, geom.h, group))
    nF, ndu = pointwise_norm(F), pointwise_norm(du)
    rec = {"t": state.t, **energy.as_dict()}
    rec.update(
        sup_F=float(nF.max()),
        sup_gradu=float(ndu.max()),
        sup_blowup=float((nF + ndu).max()),
        u_l2=lp_norm(state.u, 2),
        lp={float(p): (lp_norm(F, p), lp_norm(du, p)) for p in p_list},
        dt=0.0,
    )
    return rec


def _rel_diff(a: tuple, b: tuple) -> float:
    num = max(float(np.max(np.abs(x - y))) for x, y in zip(a, b))
    den = max(float(np.max(np.abs(y))) for y in b)
    if num == 0.0:
        return 0.0
    return num / den if den > 0 else math.inf


def run(
    state: FlowState,
    config: FlowConfig,
    on_snapshot: Callable[[FlowState, int], None] | None = None,
) -> tuple[FlowState, Trajectory]:
    """Integrate from ``state.t`` to ``config.t_end`` with adaptive RK4.

    Each step is compared against two half steps; the half-step result is kept
    when their relative sup-norm difference is within ``config.tol``.  Raises
    ``FlowAborted`` on non-finite values.
    """
    traj = Trajectory()
    e_prev = ymh_k_energy(state.A, state.u, state.k)
    e0 = e_prev.total_k
    traj.append(monitor(state, config.p_list, e_prev))
    if on_snapshot is not None and config.snapshot_every:
        on_snapshot(state, 0)

    dt = config.dt_init
    nstep = 0
    while state.t < config.t_end:
        remaining = config.t_end - state.t
        last = dt >= remaining * (1 - 1e-12)
        h = remaining if last else dt
        try:
            # overflow is detected below and reported through FlowAborted
            with np.errstate(over="ignore", invalid="ignore"):
                full = _rk4_arrays(state, state.A.values, state.u.values, h)
                mid = _rk4_arrays(state, state.A.values, state.u.values, 0.5 * h)
                half = _rk4_arrays(state, mid[0], mid[1], 0.5 * h)
        except ValueError as exc:
            raise FlowAborted(f"non-finite stage at t={state.t!r}: {exc}", state, traj) from exc
        if not all(np.all(np.isfinite(x)) for x in half + full):
            raise FlowAborted(f"non-finite values after step at t={state.t!r}", state, traj)
        err = _rel_diff(full, half)
        factor = 2.0 if err == 0 else min(2.0, max(0.2, 0.9 * (config.tol / err) ** 0.2))
        if err > config.tol and h > 1e-14 * config.dt_max:
            traj.rejected_steps += 1
            dt = h * factor
            continue

        t_new = config.t_end if last else state.t + h
        state = replace(state, t=t_new, A=state.A.like(half[0]), u=state.u.like(half[1]))
        nstep += 1
        e_new = ymh_k_energy(state.A, state.u, state.k)
        if e_new.total_k > e_prev.total_k + config.energy_slack * e0:
            traj.flags.append(
                {"t": state.t, "kind": "energy_increase", "delta": e_new.total_k - e_prev.total_k}
            )
            log.warning("energy increased by %g at t=%g", e_new.total_k - e_prev.total_k, state.t)
        e_prev = e_new
        if nstep % config.monitor_every == 0 or state.t >= config.t_end:
            rec = monitor(state, config.p_list, e_new)
            rec["dt"] = h
            traj.append(rec)
        if on_snapshot is not None and config.snapshot_every and nstep % config.snapshot_every == 0:
            on_snapshot(state, nstep)
        if not last:
            dt = min(config.dt_max, h * factor)
    return state, traj


def _pullback(values: np.ndarray, m: int) -> np.ndarray:
    n = values.shape[0]
    idx = (m * np.arange(n)) % n
    return values[
        idx[:, None, None, None], idx[None, :, None, None], idx[None, None, :, None], idx[None, None, None, :]
    ]


def rescale(state: FlowState, m: int) -> FlowState:
    """Pull the state back along the covering map ``x -> m x`` of the torus.

    Fields are multiplied by ``m`` and the clock by ``m^(-2(k+1))``, the
    parabolic scaling under which the flow maps solutions to solutions.
    """
    if int(m) != m or m < 2:
        raise ValueError(f"covering degree must be an integer >= 2, got {m!r}")
    m = int(m)
    A = state.A.like(m * _pullback(state.A.values, m))
    u = state.u.like(m * _pullback(state.u.values, m))
    return FlowState(state.t / m ** (2 * (state.k + 1)), A, u, state.k)
