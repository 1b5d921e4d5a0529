"""Lie algebra kernels for u(1) and su(2).

Algebra elements are plain float arrays whose last axis holds the coefficients
in an orthonormal basis, so a whole lattice field is a single ndarray and every
kernel below broadcasts over the leading axes.  With totally antisymmetric
structure constants the Killing pairing is the Euclidean dot product and the
adjoint of ``a -> [a, X]`` is again a bracket.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GroupSpec",
    "GroupElem",
    "U1",
    "SU2",
    "get_group",
    "bracket",
    "inner",
    "bracket_cograd",
    "adjoint_act",
]


def _levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    return eps


@dataclass(frozen=True)
class GroupSpec:
    """Structure group of the bundle: its tag, algebra dimension and constants.

    ``f[a, b, c]`` are the structure constants, ``[e_a, e_b] = f[a, b, c] e_c``.
    """

    tag: str
    dim: int
    f: np.ndarray = field(repr=False, compare=False)

    @property
    def abelian(self) -> bool:
        return not np.any(self.f)

    def check(self, *elems: np.ndarray) -> None:
        for x in elems:
            if np.shape(x)[-1:] != (self.dim,):
                raise ValueError(
                    f"algebra element with trailing shape {np.shape(x)[-1:]} "
                    f"does not belong to {self.tag} (dim {self.dim})"
                )

    def bracket(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.check(x, y)
        if self.abelian:
            return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)))
        if self.tag == "SU2":
            # f = epsilon, so the bracket is the cross product
            x, y = np.broadcast_arrays(x, y)
            return np.cross(x, y)
        return np.einsum("abc,...a,...b->...c", self.f, x, y)

    def inner(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.check(x, y)
        return np.sum(np.multiply(x, y), axis=-1)

    def bracket_cograd(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Return ``z`` with ``inner(z, a) == inner(bracket(a, x), y)`` for all ``a``."""
        self.check(x, y)
        if self.abelian:
            return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)))
        # <[a,x],y> = f_abc a_a x_b y_c, so z_a = f_abc x_b y_c = [x,y]_a
        return self.bracket(x, y)

    def zero(self, shape=()) -> np.ndarray:
        return np.zeros(tuple(shape) + (self.dim,))

    def basis(self, a: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[a] = 1.0
        return e


U1 = GroupSpec("U1", 1, np.zeros((1, 1, 1)))
SU2 = GroupSpec("SU2", 3, _levi_civita())

_GROUPS = {"U1": U1, "SU2": SU2}
GROUP_TAGS = {"U1": 0, "SU2": 1}


def get_group(tag: str | GroupSpec) -> GroupSpec:
    if isinstance(tag, GroupSpec):
        return tag
    try:
        return _GROUPS[str(tag).upper()]
    except KeyError:
        raise ValueError(f"unknown group {tag!r}; expected one of {sorted(_GROUPS)}") from None


def _same_group(gx: GroupSpec, gy: GroupSpec) -> GroupSpec:
    if gx.tag != gy.tag:
        raise ValueError(f"group mismatch: {gx.tag} vs {gy.tag}")
    return gx


def bracket(x, y, group: GroupSpec = SU2) -> np.ndarray:
    return group.bracket(x, y)


def inner(x, y, group: GroupSpec = SU2) -> np.ndarray:
    return group.inner(x, y)


def bracket_cograd(x, y, group: GroupSpec = SU2) -> np.ndarray:
    return group.bracket_cograd(x, y)


@dataclass(frozen=True)
class GroupElem:
    """Group element: an angle for U(1), a unit quaternion ``(w, x, y, z)`` for SU(2)."""

    group: GroupSpec
    data: tuple

    def __post_init__(self):
        if self.group.tag == "SU2":
            q = np.asarray(self.data, dtype=float)
            if q.shape != (4,):
                raise ValueError("SU2 element needs 4 quaternion coordinates")
            if abs(np.linalg.norm(q) - 1.0) > 1e-12:
                raise ValueError(f"SU2 element is not unit norm (|q| = {np.linalg.norm(q)!r})")
        else:
            theta = float(np.mod(self.data[0], 2 * np.pi))
            object.__setattr__(self, "data", (theta,))

    @classmethod
    def identity(cls, group: GroupSpec) -> GroupElem:
        return cls(group, (1.0, 0.0, 0.0, 0.0) if group.tag == "SU2" else (0.0,))

    @classmethod
    def random(cls, group: GroupSpec, rng: np.random.Generator) -> GroupElem:
        if group.tag == "SU2":
            q = rng.standard_normal(4)
            return cls(group, tuple(q / np.linalg.norm(q)))
        return cls(group, (rng.uniform(0, 2 * np.pi),))

    def __mul__(self, other: GroupElem) -> GroupElem:
        _same_group(self.group, other.group)
        if self.group.tag != "SU2":
            return GroupElem(self.group, (self.data[0] + other.data[0],))
        a0, a1, a2, a3 = self.data
        b0, b1, b2, b3 = other.data
        q = np.array(
            [
                a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
                a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
                a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
                a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
            ]
        )
        return GroupElem(self.group, tuple(q / np.linalg.norm(q)))

    def rotation(self) -> np.ndarray:
        """Matrix of the adjoint action on algebra coefficients."""
        if self.group.tag != "SU2":
            return np.eye(self.group.dim)
        w, x, y, z = self.data
        return np.array(
            [
                [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
                [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
                [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
            ]
        )


def adjoint_act(g: GroupElem, x: np.ndarray) -> np.ndarray:
    """Ad_g applied to an array of algebra coefficients (last axis)."""
    g.group.check(x)
    if g.group.abelian:
        return np.array(x, dtype=float, copy=True)
    return np.asarray(x) @ g.rotation().T
