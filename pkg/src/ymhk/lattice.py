"""Periodic 4-torus lattices and Lie-algebra valued tensor fields on them.

A rank ``r`` field is stored as an array of shape ``(N, N, N, N, 4, ..., 4, dim_g)``
with ``r`` direction axes; site axis ``mu`` is the coordinate ``x_{mu+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ymhk.algebra import GroupSpec, get_group

__all__ = [
    "DIM",
    "LatticeGeom",
    "TensorField",
    "SeededSpectrum",
    "pairwise_sum",
    "pointwise_norm",
    "l2_inner",
    "lp_norm",
    "sup_norm",
    "random_field",
    "wavenumbers",
]

DIM = 4
SITE_AXES = (0, 1, 2, 3)


def pairwise_sum(x) -> float:
    """Sum with a fixed binary tree over the flattened array.

    The tree depends only on the element count, never on threading, so the
    result is bitwise reproducible.
    """
    v = np.ravel(np.asarray(x, dtype=float))
    if v.size == 0:
        return 0.0
    while v.size > 1:
        if v.size % 2:
            v = np.append(v, 0.0)
        v = v[0::2] + v[1::2]
    return float(v[0])


@dataclass(frozen=True)
class LatticeGeom:
    N: int
    L: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"need an integer N >= 3 sites per dimension, got {self.N!r}")
        if not self.L > 0:
            raise ValueError(f"torus side length must be positive, got {self.L!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def vol_elem(self) -> float:
        return self.h**4

    @property
    def volume(self) -> float:
        return self.L**4

    @property
    def sites(self) -> int:
        return self.N**DIM

    def coords(self) -> np.ndarray:
        """Site coordinates, shape ``(N, N, N, N, 4)``."""
        x = np.arange(self.N) * self.h
        return np.stack(np.meshgrid(x, x, x, x, indexing="ij"), axis=-1)


def wavenumbers(geom: LatticeGeom) -> np.ndarray:
    """Integer wave numbers in FFT order, broadcast to shape ``(4, N, N, N, N)``."""
    kap = np.fft.fftfreq(geom.N, d=1.0 / geom.N)
    return np.stack(np.meshgrid(kap, kap, kap, kap, indexing="ij"))


class TensorField:
    """Rank ``r`` tensor field with values in the Lie algebra of ``group``.

    Instances are treated as immutable values; arithmetic returns new fields.
    """

    __slots__ = ("geom", "group", "values", "antisym2")

    def __init__(self, geom: LatticeGeom, group, values, antisym2: bool = False):
        group = get_group(group)
        values = np.asarray(values, dtype=float)
        n = geom.N
        if values.ndim < 5 or values.shape[:4] != (n,) * 4 or values.shape[-1] != group.dim:
            raise ValueError(
                f"field shape {values.shape} does not fit N={n}, {group.tag} (dim {group.dim})"
            )
        if any(s != DIM for s in values.shape[4:-1]):
            raise ValueError(f"direction axes must have length 4, got {values.shape[4:-1]}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field contains NaN or Inf")
        if antisym2:
            if values.ndim != 7:
                raise ValueError("antisym2 flag requires a rank-2 field")
            if not np.array_equal(values, -np.swapaxes(values, 4, 5)):
                raise ValueError("field flagged antisym2 is not antisymmetric")
        self.geom = geom
        self.group = group
        self.values = values
        self.antisym2 = antisym2

    @classmethod
    def zeros(cls, geom: LatticeGeom, rank: int, group) -> TensorField:
        group = get_group(group)
        return cls(geom, group, np.zeros((geom.N,) * 4 + (DIM,) * rank + (group.dim,)))

    @classmethod
    def constant(cls, geom: LatticeGeom, value, group, rank: int = 0) -> TensorField:
        group = get_group(group)
        value = np.asarray(value, dtype=float)
        shape = (geom.N,) * 4 + (DIM,) * rank + (group.dim,)
        return cls(geom, group, np.broadcast_to(value, shape).copy())

    @property
    def rank(self) -> int:
        return self.values.ndim - 5

    def like(self, values, antisym2: bool = False) -> TensorField:
        return TensorField(self.geom, self.group, values, antisym2=antisym2)

    def _check_compatible(self, other: TensorField) -> None:
        if not isinstance(other, TensorField):
            raise TypeError(f"expected a TensorField, got {type(other).__name__}")
        if other.geom != self.geom or other.group.tag != self.group.tag:
            raise ValueError(
                f"incompatible fields: {self.group.tag} N={self.geom.N} L={self.geom.L} vs "
                f"{other.group.tag} N={other.geom.N} L={other.geom.L}"
            )
        if other.values.shape != self.values.shape:
            raise ValueError(f"shape mismatch: {self.values.shape} vs {other.values.shape}")

    def __add__(self, other: TensorField) -> TensorField:
        self._check_compatible(other)
        return self.like(self.values + other.values)

    def __sub__(self, other: TensorField) -> TensorField:
        self._check_compatible(other)
        return self.like(self.values - other.values)

    def __mul__(self, c: float) -> TensorField:
        return self.like(float(c) * self.values, antisym2=self.antisym2)

    __rmul__ = __mul__

    def __neg__(self) -> TensorField:
        return self * -1.0

    def shift(self, mu: int, n: int = 1) -> TensorField:
        """Field ``x -> T(x + n e_mu)`` (periodic)."""
        return self.like(np.roll(self.values, -n, axis=mu), antisym2=self.antisym2)

    def __repr__(self) -> str:
        return f"TensorField({self.group.tag}, N={self.geom.N}, L={self.geom.L}, rank={self.rank})"


def pointwise_norm(T: TensorField | np.ndarray) -> np.ndarray:
    """Euclidean norm over all direction and algebra indices at each site."""
    v = T.values if isinstance(T, TensorField) else np.asarray(T)
    v = v.reshape(v.shape[:4] + (-1,))
    s = float(np.max(np.abs(v))) if v.size else 0.0
    if 1e-150 < s < 1e150 or s == 0.0:
        return np.sqrt(np.sum(v**2, axis=-1))
    # rescale so the squares neither overflow nor underflow
    return s * np.sqrt(np.sum((v / s) ** 2, axis=-1))


def l2_inner(S: TensorField, T: TensorField) -> float:
    S._check_compatible(T)
    return pairwise_sum(S.values * T.values) * S.geom.vol_elem


def lp_norm(T: TensorField, p: float) -> float:
    if not p >= 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p!r}")
    if np.isinf(p):
        return sup_norm(T)
    a = pointwise_norm(T)
    if p == 2:
        return np.sqrt(pairwise_sum(a * a) * T.geom.vol_elem)
    # scale by the maximum to keep large p from overflowing
    m = float(np.max(a))
    if m == 0.0:
        return 0.0
    return m * (pairwise_sum((a / m) ** p) * T.geom.vol_elem) ** (1.0 / p)


def sup_norm(T: TensorField) -> float:
    return float(np.max(pointwise_norm(T)))


@dataclass(frozen=True)
class SeededSpectrum:
    """Recipe for reproducible random data.

    Fourier coefficients of white noise are damped by ``(1 + |kappa|^2)^(-alpha/2)``
    and the result is scaled to RMS pointwise norm ``amplitude``.
    """

    seed: int
    alpha: float = 0.0
    amplitude: float = 1.0
    zero_mean: bool = False

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"spectral decay exponent must be >= 0, got {self.alpha!r}")


def random_field(geom: LatticeGeom, rank: int, group, spec: SeededSpectrum) -> TensorField:
    group = get_group(group)
    shape = (geom.N,) * 4 + (DIM,) * rank + (group.dim,)
    if spec.amplitude == 0:
        return TensorField(geom, group, np.zeros(shape))
    rng = np.random.default_rng(spec.seed)
    noise = rng.standard_normal(shape)
    coef = np.fft.fftn(noise, axes=SITE_AXES)
    kap2 = np.sum(wavenumbers(geom) ** 2, axis=0)
    damp = (1.0 + kap2) ** (-spec.alpha / 2.0)
    if spec.zero_mean:
        damp[0, 0, 0, 0] = 0.0
    coef *= damp.reshape(damp.shape + (1,) * (len(shape) - 4))
    vals = np.fft.ifftn(coef, axes=SITE_AXES).real
    rms = np.sqrt(np.mean(vals**2) * np.prod(shape[4:]))
    if rms > 0:
        vals *= spec.amplitude / rms
    return TensorField(geom, group, vals)
