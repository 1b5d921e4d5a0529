import json
import math

import numpy as np
import pytest

from ymhk.diagnostics import (
    blowup_normalization_check,
    default_window,
    dump_report,
    kato_check,
    kato_convergence,
    lp_track,
    monotone_after_max,
    report,
    scaling_law_check,
    smoothing_rate,
)
from ymhk.flow import FlowConfig, FlowState, run, stability_cap
from ymhk.lattice import LatticeGeom, SeededSpectrum, TensorField, random_field
from ymhk.spectral import band_limited_state, exact_abelian_flow


def test_report_roundtrip(tmp_path):
    rep = report("x", {"N": 3}, 1e-6, 2e-7, True)
    text = dump_report(rep, tmp_path / "r.json")
    assert json.loads(text) == json.loads((tmp_path / "r.json").read_text()) == rep


def test_kato_abelian_holds_exactly():
    g = LatticeGeom(4)
    A = random_field(g, 1, "U1", SeededSpectrum(0))
    u = random_field(g, 0, "U1", SeededSpectrum(1))
    res = kato_check(A, u)
    assert res["slack"] == 0 and res["excess"] <= 1e-12


def test_kato_su2_within_slack(su2_pair):
    assert kato_check(*su2_pair)["excess"] <= 1e-12


def test_kato_refinement_decreases():
    conv = kato_convergence()
    v = conv["violation"]
    assert v[0] > v[1] > v[2] > 0
    assert all(o >= 0.9 for o in conv["order"])


def test_default_window_frozen():
    lo, hi = default_window(LatticeGeom(16), 1)
    assert hi / lo == pytest.approx(10.0)
    assert lo == pytest.approx(1.98e-6, rel=5e-3)


def test_smoothing_flags_narrow_band_data():
    g = LatticeGeom(8)
    x = g.coords()[..., 0]
    u = TensorField(g, "U1", np.sin(2 * np.pi * x)[..., None])
    s = FlowState(0.0, TensorField.zeros(g, 1, "U1"), u, 1)
    lo, hi = default_window(g, 1)
    snaps = [exact_abelian_flow(s, t) for t in np.logspace(np.log10(lo), np.log10(hi), 10)]
    fit = smoothing_rate(snaps, 1, 1, (lo, hi))
    assert fit["inconclusive"] and "narrow-band" in fit["reason"]


def test_smoothing_too_few_snapshots():
    g = LatticeGeom(8)
    u = random_field(g, 0, "U1", SeededSpectrum(0, zero_mean=True))
    s = FlowState(0.0, TensorField.zeros(g, 1, "U1"), u, 1)
    lo, hi = default_window(g, 1)
    fit = smoothing_rate([exact_abelian_flow(s, t) for t in (lo, hi)], 1, 1, (lo, hi))
    assert fit["inconclusive"] and "snapshots" in fit["reason"]


def test_scaling_lattice_symbol_is_not_exact():
    assert scaling_law_check(1, 2, 7, "continuum") < 1e-12
    assert scaling_law_check(1, 2, 7, "lattice") > 1e-6


def test_blowup_normalization():
    for k in (0, 1):
        s = band_limited_state(LatticeGeom(8), k, 1, amplitude=3.0)
        assert blowup_normalization_check(s) == pytest.approx(1.0, abs=1e-9)
        assert abs(blowup_normalization_check(s, "lattice") - 1.0) < 0.1
    g = LatticeGeom(4)
    with pytest.raises(ValueError):
        blowup_normalization_check(FlowState.zero(g, "U1", 1))
    with pytest.raises(ValueError):
        blowup_normalization_check(FlowState.zero(g, "SU2", 1))


def test_lp_track_and_monotonicity():
    g = LatticeGeom(3)
    A = random_field(g, 1, "U1", SeededSpectrum(1, 1.0))
    u = random_field(g, 0, "U1", SeededSpectrum(2, 1.0))
    cap = stability_cap(g, 0)
    _, traj = run(FlowState(0.0, A, u, 0), FlowConfig(8 * cap, cap, cap, p_list=(2.0, 4.0)))
    rows = lp_track(traj, 4)
    assert rows.shape == (len(traj), 3)
    assert monotone_after_max(rows[:, 1])
    with pytest.raises(KeyError):
        lp_track(traj, 6)
    with pytest.raises(ValueError):
        lp_track(traj, 0.5)
    assert not monotone_after_max([1.0, 3.0, 2.0, 2.5])
    assert monotone_after_max([1.0, 3.0, 2.0, 1.0])
