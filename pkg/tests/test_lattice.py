import numpy as np
import pytest

from ymhk.lattice import (
    LatticeGeom,
    SeededSpectrum,
    TensorField,
    l2_inner,
    lp_norm,
    pairwise_sum,
    pointwise_norm,
    random_field,
    sup_norm,
)


def test_geometry():
    g = LatticeGeom(8, 2.0)
    assert g.h == 0.25 and g.vol_elem == 0.25**4 and g.volume == 16.0 and g.sites == 8**4
    assert g.coords().shape == (8, 8, 8, 8, 4)
    with pytest.raises(ValueError):
        LatticeGeom(2)


def test_shape_and_finiteness_validation():
    g = LatticeGeom(3)
    with pytest.raises(ValueError):
        TensorField(g, "SU2", np.zeros((3, 3, 3, 3, 1)))
    with pytest.raises(ValueError):
        TensorField(g, "U1", np.zeros((3, 3, 3, 3, 3, 1)))
    bad = np.zeros((3, 3, 3, 3, 1))
    bad[0, 0, 0, 0] = np.nan
    with pytest.raises(ValueError):
        TensorField(g, "U1", bad)


def test_antisym_flag_checked():
    g = LatticeGeom(3)
    v = np.zeros((3,) * 4 + (4, 4, 1))
    v[..., 0, 1, 0] = 1.0
    with pytest.raises(ValueError):
        TensorField(g, "U1", v, antisym2=True)
    v[..., 1, 0, 0] = -1.0
    assert TensorField(g, "U1", v, antisym2=True).antisym2


def test_arithmetic_rejects_mismatch():
    a = TensorField.zeros(LatticeGeom(3), 0, "U1")
    b = TensorField.zeros(LatticeGeom(4), 0, "U1")
    c = TensorField.zeros(LatticeGeom(3), 0, "SU2")
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        a - c
    assert np.all((2 * (a + a) - a).values == 0)


def test_norms_of_constant():
    g = LatticeGeom(4, 2.0)
    T = TensorField.constant(g, [3.0, 4.0, 0.0], "SU2")
    # volume 16, pointwise norm 5
    assert lp_norm(T, 2) == pytest.approx(5 * 4)
    assert lp_norm(T, 4) == pytest.approx(5 * 16**0.25)
    assert lp_norm(T, np.inf) == sup_norm(T) == pytest.approx(5)
    assert l2_inner(T, T) == pytest.approx(25 * 16)
    with pytest.raises(ValueError):
        lp_norm(T, 0.5)


def test_lp_large_p_no_overflow():
    g = LatticeGeom(3)
    T = TensorField.constant(g, [1e200], "U1")
    assert lp_norm(T, 8) == pytest.approx(1e200)


def test_random_field_reproducible_and_scaled():
    g = LatticeGeom(4)
    a = random_field(g, 1, "SU2", SeededSpectrum(5, 2.0, 0.3))
    b = random_field(g, 1, "SU2", SeededSpectrum(5, 2.0, 0.3))
    assert np.array_equal(a.values, b.values)
    rms = np.sqrt(np.mean(pointwise_norm(a) ** 2))
    assert rms == pytest.approx(0.3)
    z = random_field(g, 0, "U1", SeededSpectrum(5, 0.0, 1.0, zero_mean=True))
    assert abs(z.values.mean()) < 1e-14
    with pytest.raises(ValueError):
        SeededSpectrum(0, alpha=-1.0)


def test_pairwise_sum_is_order_independent_of_layout():
    x = np.random.default_rng(0).standard_normal((8, 8, 8))
    assert pairwise_sum(x) == pairwise_sum(x.copy())
    assert pairwise_sum(x) == pytest.approx(x.sum())


def test_shift_is_periodic():
    g = LatticeGeom(3)
    v = np.arange(81.0).reshape(3, 3, 3, 3, 1)
    T = TensorField(g, "U1", v)
    assert T.shift(0).values[2, 0, 0, 0, 0] == v[0, 0, 0, 0, 0]
    assert np.array_equal(T.shift(1, 3).values, v)
