import math

import pytest

import gridstudies as gs


def test_flashover_rate_reference():
    r = gs.flashover_rate(50000, 1103, 1.0, 1.2874752, 2.2)
    assert round(r["years"]) == 17653
    assert abs(r["rate"] - 4.85) <= 0.005


def test_critical_currents_near_targets():
    shield, span = gs.critical_currents()
    assert shield == pytest.approx(17.62, rel=0.05)
    assert span == pytest.approx(64.15, rel=0.05)


def test_small_lightning_study_is_deterministic():
    a = gs.lightning_study(n=300, seed=4)
    b = gs.lightning_study(n=300, seed=4, threads=1)
    assert a == b
    assert 0 < a["strokes_to_line"] < 300
    assert "Number of flashovers = " in a["summary"]


def test_stability_trace_and_cct():
    res = gs.stability_simulate(1998.0, 50.0)
    assert not res["unstable"]
    assert len(res["t"]) == len(res["delta"])
    _, t_crit = gs.stability_cct(1998.0)
    assert 0.05 < t_crit < 0.2
    assert gs.stability_simulate(1998.0, 1e3 * t_crit + 2.0)["unstable"]
    with pytest.raises(ValueError):
        gs.stability_simulate(5000.0, 50.0)


def test_stability_sweep_shape():
    rows = gs.stability_sweep()
    assert len(rows) == 335
    assert {s for _, _, s in rows} == {0, 1}


def test_feeder_pv_lowers_energy():
    assert gs.feeder_daily("A2")["kWh"] < gs.feeder_daily("A1")["kWh"]
    with pytest.raises(ValueError):
        gs.feeder_daily("B1")


def test_feeder_monte_carlo():
    b1 = gs.feeder_monte_carlo("B1", runs=1000)
    assert b1["Load1"]["mean_kW"] == pytest.approx(47.5, rel=0.03)
    assert b1["Load1"]["sd_kW"] == pytest.approx(4.75, rel=0.10)
    assert gs.feeder_monte_carlo("B2", runs=200)["Line3"]["mean_kW"] < 0.0


def test_fault_knn_curve():
    curve = gs.fault_knn_curve(r_max=1.0, seed=1)
    assert len(curve) == 4
    assert curve[0] == max(curve)
    assert all(0.0 <= a <= 1.0 and not math.isnan(a) for a in curve)
