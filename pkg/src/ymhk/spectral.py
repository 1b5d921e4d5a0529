"""Fourier-space oracles for the abelian (line bundle) flow.

For U(1) every bracket vanishes and the flow is linear with constant
coefficients, so each Fourier mode evolves in closed form:

* the Higgs field decays with rate ``lam^(k+1)``, where ``lam = |theta|^2``;
* the connection evolves by ``-2 lam^k D`` with ``D = |theta|^2 I - theta theta^*``.
  The factor 2 comes from summing ``|F|^2`` over all ordered index pairs.
  Pure-gauge modes (parallel to ``theta``) are left untouched.

``theta`` is the symbol of the forward difference, ``(exp(2 pi i kappa h / L) - 1) / h``,
or of the continuum derivative, ``2 pi i kappa / L``, for band-limited data.
"""

from __future__ import annotations

import numpy as np

from ymhk.algebra import U1
from ymhk.flow import FlowState
from ymhk.lattice import DIM, SITE_AXES, LatticeGeom, TensorField, wavenumbers

__all__ = [
    "symbol",
    "exact_abelian_flow",
    "green_function",
    "lattice_laplacian",
    "oscillation_identity_check",
    "spectral_derivative",
    "band_limited_state",
]


def symbol(geom: LatticeGeom, kind: str = "lattice") -> np.ndarray:
    """Per-direction derivative symbol ``theta``, shape ``(4, N, N, N, N)``."""
    kap = wavenumbers(geom)
    if kind == "lattice":
        return (np.exp(2j * np.pi * kap / geom.N) - 1.0) / geom.h
    if kind == "continuum":
        theta = 2j * np.pi * kap / geom.L
        if geom.N % 2 == 0:
            # the Nyquist mode has no real derivative
            theta[kap == -geom.N // 2] = 0.0
        return theta
    raise ValueError(f"unknown symbol kind {kind!r}; use 'lattice' or 'continuum'")


def _require_u1(state_or_field) -> None:
    if state_or_field.group.tag != U1.tag:
        raise ValueError(f"abelian oracle needs group U1, got {state_or_field.group.tag}")


def exact_abelian_flow(state: FlowState, t_target: float, kind: str = "lattice") -> FlowState:
    """Closed-form solution of the U(1) flow from ``state.t`` to ``t_target``."""
    _require_u1(state)
    dt = t_target - state.t
    if dt < 0:
        raise ValueError(f"cannot flow backwards from t={state.t!r} to {t_target!r}")
    if dt == 0:
        return state
    k = state.k
    theta = symbol(state.geom, kind)
    lam = np.sum(np.abs(theta) ** 2, axis=0)

    u_hat = np.fft.fftn(state.u.values[..., 0], axes=SITE_AXES)
    u_new = np.fft.ifftn(u_hat * np.exp(-(lam ** (k + 1)) * dt), axes=SITE_AXES).real

    a_hat = np.stack(
        [np.fft.fftn(state.A.values[..., mu, 0], axes=SITE_AXES) for mu in range(DIM)]
    )
    safe = np.where(lam > 0, lam, 1.0)
    # component of a_hat along theta, which D annihilates
    along = theta * (np.sum(np.conj(theta) * a_hat, axis=0) / safe)
    along = np.where(lam > 0, along, a_hat)
    decay = np.exp(-2.0 * lam ** (k + 1) * dt)
    a_new = along + decay * (a_hat - along)
    A_new = np.stack([np.fft.ifftn(a_new[mu], axes=SITE_AXES).real for mu in range(DIM)], axis=-1)

    return FlowState(
        t_target, state.A.like(A_new[..., None]), state.u.like(u_new[..., None]), k
    )


def lattice_laplacian(values: np.ndarray, h: float) -> np.ndarray:
    """Flat ``-d^* d`` on a scalar array of shape ``(N, N, N, N)`` (direct stencil)."""
    out = np.zeros_like(values)
    for mu in range(DIM):
        out += (np.roll(values, -1, mu) - 2.0 * values + np.roll(values, 1, mu)) / h**2
    return out


def green_function(geom: LatticeGeom) -> np.ndarray:
    """Mean-zero kernel ``G`` with ``lattice_laplacian(G) = delta_0 - 1/N^4``.

    Built by inverting the forward-difference Laplacian symbol with the zero
    mode projected out.
    """
    theta = symbol(geom, "lattice")
    lam = np.sum(np.abs(theta) ** 2, axis=0)
    g_hat = np.zeros_like(lam)
    nz = lam > 0
    g_hat[nz] = -1.0 / lam[nz]
    return np.fft.ifftn(g_hat).real


def oscillation_identity_check(u: TensorField) -> float:
    """Max residual of ``u(x) - mean(u) = sum_y <grad G(x - y), grad u(y)> h^4``.

    ``G`` is the continuum-normalized kernel ``green_function / h^4`` and its
    gradient is the backward difference, the transpose of the forward
    difference applied to ``u``; with that pairing the identity is an exact
    summation by parts on the lattice.
    """
    _require_u1(u)
    if u.rank != 0:
        raise ValueError("oscillation identity is for rank-0 fields")
    geom = u.geom
    h = geom.h
    G = green_function(geom) / geom.vol_elem
    uv = u.values[..., 0]
    total = np.zeros(uv.shape, dtype=complex)
    for mu in range(DIM):
        grad_G = (G - np.roll(G, 1, mu)) / h
        grad_u = (np.roll(uv, -1, mu) - uv) / h
        # circular convolution sum_y grad_G(x - y) grad_u(y)
        total += np.fft.fftn(grad_G) * np.fft.fftn(grad_u)
    conv = np.fft.ifftn(total).real * geom.vol_elem
    return float(np.max(np.abs(uv - uv.mean() - conv)))


def spectral_derivative(values: np.ndarray, geom: LatticeGeom) -> np.ndarray:
    """Continuum gradient of the trigonometric interpolant; new axis 4 is the direction."""
    theta = symbol(geom, "continuum")
    v_hat = np.fft.fftn(values, axes=SITE_AXES)
    extra = (1,) * (values.ndim - 4)
    return np.stack(
        [
            np.fft.ifftn(theta[mu].reshape(theta[mu].shape + extra) * v_hat, axes=SITE_AXES).real
            for mu in range(DIM)
        ],
        axis=4,
    )


def band_limited_state(
    geom: LatticeGeom, k: int, seed: int, kmax: int = 1, amplitude: float = 1.0, t: float = 0.0
) -> FlowState:
    """U(1) state sampled from a fixed random trigonometric polynomial.

    The coefficients depend only on ``(seed, kmax)``, so the same continuum data
    can be sampled on lattices of different size.
    """
    if 2 * kmax >= geom.N:
        raise ValueError(f"modes up to {kmax} are not resolved on N={geom.N}")
    rng = np.random.default_rng(seed)
    ks = np.arange(-kmax, kmax + 1)
    modes = np.stack(np.meshgrid(ks, ks, ks, ks, indexing="ij"), axis=-1).reshape(-1, DIM)
    # five real components: four for A, one for u
    cos_c = rng.standard_normal((5, len(modes)))
    sin_c = rng.standard_normal((5, len(modes)))
    x = geom.coords()
    phase = 2 * np.pi * (x @ modes.T) / geom.L  # (N,N,N,N,modes)
    vals = np.cos(phase) @ cos_c.T + np.sin(phase) @ sin_c.T
    vals *= amplitude / np.sqrt(np.mean(vals**2))
    A = TensorField(geom, U1, vals[..., :4, None])
    u = TensorField(geom, U1, vals[..., 4:5])
    return FlowState(t, A, u, k)
