import json
import math
from pathlib import Path

import numpy as np
import pytest

import qcap


def h2(p):
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


ZERO = np.diag([1.0, 0.0]).astype(complex)
PLUS = 0.5 * np.ones((2, 2), dtype=complex)
FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"
H01 = np.diag([0.0, 1.0]).astype(complex)


def test_entropy_and_gibbs():
    assert qcap.entropy(np.eye(2) / 2) == pytest.approx(math.log(2), abs=1e-14)
    state, lam = qcap.gibbs_state(H01, 0.2)
    assert lam == pytest.approx(math.log(4), abs=1e-8)
    assert np.allclose(state, np.diag([0.8, 0.2]), atol=1e-9)
    assert qcap.relative_entropy(ZERO, np.eye(2) / 2) == pytest.approx(math.log(2), abs=1e-12)


def test_disturbance_worked_example():
    pi = qcap.Channel.dephasing(2)
    lam = 0.5 * (1 + 1 / math.sqrt(2))
    chi_in = h2(lam)
    chi_out = h2(0.75) - 0.5 * math.log(2)
    assert qcap.chi([0.5, 0.5], [ZERO, PLUS]) == pytest.approx(chi_in, abs=1e-12)
    assert qcap.entropic_disturbance(pi, [0.5, 0.5], [ZERO, PLUS]) == pytest.approx(chi_in - chi_out, abs=1e-12)
    identity = qcap.verify_identity(pi, [0.5, 0.5], [ZERO, PLUS])
    assert identity["residual"] < 1e-12


def test_channel_object():
    u = np.array([[0, 1], [1, 0]], dtype=complex)
    phi = qcap.Channel([u])
    assert phi.choi_rank() == 1
    assert np.allclose(phi.apply(ZERO), np.diag([0.0, 1.0]))
    assert phi.complementary().dim_out == 1
    assert "dim_in=2" in repr(phi)


def test_capacities():
    pi = qcap.Channel.dephasing(2)
    r = qcap.chi_capacity(pi, H01, 0.2, restarts=4)
    assert r["value"] == pytest.approx(h2(0.2), abs=1e-8)
    assert r["certificate"]["passed"]
    assert abs(sum(r["weights"]) - 1) < 1e-12
    ea = qcap.ea_capacity(qcap.Channel.identity(2), H01, 0.2)
    assert ea["value"] == pytest.approx(2 * h2(0.2), abs=1e-8)
    g = qcap.capacity_gap(qcap.Channel.identity(2), H01, 0.2, restarts=4)
    assert g["gap"] == pytest.approx(h2(0.2), abs=1e-6)
    assert "transitive" in g["triggered"]


def test_coherent_information_routes():
    rng = np.random.default_rng(1)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    q, _ = np.linalg.qr(rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3)))
    phi = qcap.Channel([q[:3, :], q[3:, :]])
    assert qcap.coherent_information(phi, rho) == pytest.approx(qcap.coherent_information_via_chi(phi, rho), abs=1e-8)


def test_gaussian():
    r = qcap.classify_gaussian(1, 1, math.sqrt(0.5) * np.eye(2), 0.25 * np.eye(2))
    assert r["valid"]
    assert r["verdict"] == "gap>0 guaranteed"
    z = qcap.classify_gaussian(1, 1, np.zeros((2, 2)), 0.5 * np.eye(2))
    assert "zero-K/discrete-c-q" in z["triggers"]


def test_validation_errors():
    with pytest.raises(qcap.ValidationError):
        qcap.entropy(np.diag([0.6, 0.6]))
    with pytest.raises(ValueError):
        qcap.Channel([np.diag([1.0, 0.5])])
    with pytest.raises(qcap.ValidationError):
        qcap.gibbs_state(H01, 0.0)


def test_selftest_and_cli():
    assert all(c["passed"] for c in qcap.selftest())
    code, out, err = qcap.run_cli(["gibbs", "--hamiltonian", str(FIXTURES / "diag01.json"), "--energy", "0.2"])
    assert code == 0, err
    assert json.loads(out)["result"]["multiplier"] == pytest.approx(math.log(4), abs=1e-8)
    code, _, err = qcap.run_cli(["entropy"])
    assert code == 2
    assert "--state" in err
