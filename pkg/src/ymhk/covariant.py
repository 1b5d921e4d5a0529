"""Discrete covariant calculus on site fields.

Covariant derivative uses forward differences plus the adjoint action of the
connection coefficient,

    (nabla_mu T)(x) = (T(x + e_mu) - T(x)) / h + [A_mu(x), T(x)],

with the new direction index prepended.  The adjoint is the exact transpose of
that stencil, which is what makes the energy gradient in ``ymhk.energy`` exact.

The ``_``-prefixed kernels work on raw value arrays and are shared with the
gradient code; the public functions take and return ``TensorField``.
"""

from __future__ import annotations

import numpy as np

from ymhk.algebra import GroupElem, GroupSpec, adjoint_act
from ymhk.lattice import DIM, TensorField

__all__ = [
    "covariant_diff",
    "covariant_diff_adjoint",
    "curvature",
    "iterated_diff",
    "bochner_laplacian",
    "forward_gradient",
    "gauge_shift",
    "global_gauge",
]


def _expand_conn(Amu: np.ndarray, extra: int) -> np.ndarray:
    # A_mu has shape (N,N,N,N,g); insert singleton axes for the field's directions
    return Amu.reshape(Amu.shape[:4] + (1,) * extra + Amu.shape[-1:])


def _cdiff(Av: np.ndarray, Tv: np.ndarray, h: float, group: GroupSpec) -> np.ndarray:
    r = Tv.ndim - 5
    out = np.empty(Tv.shape[:4] + (DIM,) + Tv.shape[4:])
    for mu in range(DIM):
        d = (np.roll(Tv, -1, axis=mu) - Tv) / h
        if not group.abelian:
            d += group.bracket(_expand_conn(Av[..., mu, :], r), Tv)
        out[:, :, :, :, mu] = d
    return out


def _cdiff_adj(Av: np.ndarray, Sv: np.ndarray, h: float, group: GroupSpec) -> np.ndarray:
    r = Sv.ndim - 6
    out = np.zeros(Sv.shape[:4] + Sv.shape[5:])
    for mu in range(DIM):
        s = Sv[:, :, :, :, mu]
        out += (np.roll(s, 1, axis=mu) - s) / h
        if not group.abelian:
            # <[A, T], S> = -<T, [A, S]>
            out -= group.bracket(_expand_conn(Av[..., mu, :], r), s)
    return out


def _cdiff_grad_conn(Tv: np.ndarray, Sv: np.ndarray, group: GroupSpec) -> np.ndarray:
    """Pullback of the residual ``S`` of ``nabla T`` onto the connection slot."""
    g = np.zeros(Tv.shape[:4] + (DIM, Tv.shape[-1]))
    if group.abelian:
        return g
    extra = tuple(range(4, Tv.ndim - 1))
    for mu in range(DIM):
        z = group.bracket_cograd(Tv, Sv[:, :, :, :, mu])
        g[..., mu, :] = z.sum(axis=extra) if extra else z
    return g


def _forward_diffs(Xv: np.ndarray, h: float) -> np.ndarray:
    return np.stack([(np.roll(Xv, -1, axis=mu) - Xv) / h for mu in range(DIM)], axis=4)


def _curvature(Av: np.ndarray, h: float, group: GroupSpec) -> np.ndarray:
    D = _forward_diffs(Av, h)  # D[..., mu, nu, :] = d_mu A_nu
    F = D - np.swapaxes(D, 4, 5)
    if not group.abelian:
        F = F + group.bracket(Av[..., :, None, :], Av[..., None, :, :])
    return F


def _curvature_adj(Av: np.ndarray, Rv: np.ndarray, h: float, group: GroupSpec) -> np.ndarray:
    Ra = Rv - np.swapaxes(Rv, 4, 5)
    G = np.zeros_like(Av)
    for mu in range(DIM):
        s = Ra[:, :, :, :, mu]  # indexed by nu
        G += (np.roll(s, 1, axis=mu) - s) / h
        if not group.abelian:
            G -= group.bracket(Av[..., mu, None, :], s)
    return G


def _check_pair(A: TensorField, T: TensorField) -> None:
    if A.rank != 1:
        raise ValueError(f"connection must be a rank-1 field, got rank {A.rank}")
    if A.geom != T.geom or A.group.tag != T.group.tag:
        raise ValueError("connection and field live on different lattices or groups")


def covariant_diff(A: TensorField, T: TensorField) -> TensorField:
    _check_pair(A, T)
    return T.like(_cdiff(A.values, T.values, T.geom.h, T.group))


def covariant_diff_adjoint(A: TensorField, S: TensorField) -> TensorField:
    _check_pair(A, S)
    if S.rank < 1:
        raise ValueError("the adjoint of the covariant derivative needs a field of rank >= 1")
    return S.like(_cdiff_adj(A.values, S.values, S.geom.h, S.group))


def curvature(A: TensorField) -> TensorField:
    if A.rank != 1:
        raise ValueError(f"connection must be a rank-1 field, got rank {A.rank}")
    return A.like(_curvature(A.values, A.geom.h, A.group), antisym2=True)


def iterated_diff(A: TensorField, T: TensorField, q: int) -> TensorField:
    if q < 0:
        raise ValueError(f"derivative order must be >= 0, got {q}")
    for _ in range(q):
        T = covariant_diff(A, T)
    return T


def bochner_laplacian(A: TensorField, T: TensorField) -> TensorField:
    """Rough Laplacian ``-nabla^* nabla``."""
    return -covariant_diff_adjoint(A, covariant_diff(A, T))


def forward_gradient(chi: TensorField) -> TensorField:
    """Plain forward-difference gradient ``d chi`` of a rank-0 field."""
    if chi.rank != 0:
        raise ValueError("forward_gradient takes a rank-0 field")
    return chi.like(_forward_diffs(chi.values, chi.geom.h))


def gauge_shift(A: TensorField, chi: TensorField) -> TensorField:
    """Abelian gauge transform ``A -> A + d chi``."""
    if not A.group.abelian:
        raise ValueError("additive gauge shifts are only gauge transforms for U1")
    return A + forward_gradient(chi)


def global_gauge(g: GroupElem, T: TensorField) -> TensorField:
    """Constant gauge transform; acts on every value by the adjoint action."""
    return T.like(adjoint_act(g, T.values), antisym2=T.antisym2)
