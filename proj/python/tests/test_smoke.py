import math

import numpy as np
import pytest

import heligate


def test_table_voltages_round_trip():
    v = heligate.builtin_voltages()
    assert v["I"][1] == 200.70
    text = heligate.voltage_csv(v["III"])
    assert heligate.parse_voltage_csv(text) == v["III"]


def test_coupling_and_ramp():
    assert heligate.alpha(3, 0.0) == pytest.approx(2 / math.pi * math.atan(0.5), rel=1e-12)
    lam0 = heligate.ramp(1.0, 2.0, 1.0, 0.0)
    assert lam0 == pytest.approx((1 - math.erf(2.0)) / 2, abs=1e-12)


def test_fidelity_identities():
    cz = heligate.target_gate("cz")
    assert heligate.average_fidelity(np.eye(4), cz) == pytest.approx(0.4, abs=1e-12)
    s = heligate.target_gate("sqrt_iswap")
    assert heligate.average_fidelity(np.exp(0.3j) * s, s) == pytest.approx(1.0, abs=1e-12)
    rep = heligate.optimize_rotations(np.diag(np.exp(1j * np.array([0.0, 0.4, -0.2, 0.2]))), "identity")
    assert rep["fidelity"] == pytest.approx(1.0, abs=1e-10)
    assert heligate.swap_error(s) == pytest.approx(0.0, abs=1e-15)
    assert heligate.leakage_error(np.eye(4)) == 0.0


def test_spectrum_without_coulomb_is_additive():
    e = heligate.spectrum(heligate.builtin_voltages()["I"], points_per_well=12, kappa=0.0)
    assert len(e) == 6
    # |11> is the fourth level here
    assert abs(e[3] - e[2] - e[1] + e[0]) < 1e-6
    assert heligate.zz_coupling(e) == pytest.approx(e[4] - e[2] - e[1] + e[0])


def test_loss_terms():
    total, terms = heligate.loss("III", [0.0, 9.0, 11.0, 21.0, 21.0, 21.0])
    assert len(terms) == 5
    assert total == pytest.approx(1.0)


def test_short_gate_is_unitary_in_subspace():
    v = heligate.builtin_voltages()
    u = heligate.gate_matrix(v["I"], v["II"], 0.05, 0.0, dt_ns=0.002, points_per_well=8)
    assert u.shape == (4, 4)
    assert np.all(np.abs(u) <= 1.0 + 1e-9)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        heligate.spectrum([1.0, 2.0])
    with pytest.raises(ValueError):
        heligate.parse_voltage_csv("1,1\n")
