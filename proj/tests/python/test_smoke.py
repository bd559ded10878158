import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import qmi


def random_state(d, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def numpy_entropy(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-14]
    return float(-(w * np.log(w)).sum())


def test_entropy_of_maximally_mixed():
    for d in range(2, 7):
        assert abs(qmi.von_neumann_entropy(np.eye(d) / d) - math.log(d)) < 1e-10


def test_relative_entropy_support_violation_is_inf():
    assert qmi.relative_entropy(np.diag([0.5, 0.5]), np.diag([1.0, 0.0])) == math.inf


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**31))
def test_entropy_matches_numpy_and_bound(d, seed):
    rho = random_state(d, seed)
    s = qmi.von_neumann_entropy(rho)
    assert abs(s - numpy_entropy(rho)) < 1e-10
    assert s <= math.log(d) + 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 3), st.integers(2, 3), st.integers(0, 2**31))
def test_partial_trace_of_product(a, b, seed):
    rho, sigma = random_state(a, seed), random_state(b, seed + 1)
    t = qmi.tensor_product(rho, sigma)
    assert np.allclose(t, np.kron(rho, sigma), atol=1e-14)
    assert np.allclose(qmi.partial_trace(t, a, b, keep_first=True), rho, atol=1e-10)
    assert np.allclose(qmi.partial_trace(t, a, b, keep_first=False), sigma, atol=1e-10)


def test_mutual_entropy_identity_channel():
    rho = np.diag([0.7, 0.3]).astype(complex)
    r = qmi.mutual_entropy(rho, qmi.Channel.identity(2))
    assert abs(r["value"] - 0.610864) < 1e-6
    compound, ensemble = qmi.mutual_entropy_forms(random_state(3, 5), qmi.Channel.depolarizing(3, 0.4))
    assert abs(compound - ensemble) < 1e-7


def test_channels_are_trace_preserving():
    zero, one = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    channels = [
        qmi.Channel.amplitude_damping(0.3),
        qmi.Channel.depolarizing(2, 0.5),
        qmi.Channel.cq([zero, one]),
        qmi.Channel.measure([zero, one]),
        qmi.Channel.from_json('{"kind": "phase_damping", "lambda": 0.2}'),
    ]
    for ch in channels:
        assert ch.trace_preservation_defect() < 1e-12
        assert np.linalg.eigvalsh(ch.choi()).min() > -1e-12
    rho = random_state(2, 3)
    ad = qmi.Channel.amplitude_damping(0.3)
    assert np.allclose(ad.then(ad).apply(rho), ad.apply(ad.apply(rho)), atol=1e-12)
    with pytest.raises(qmi.InvalidArgument):
        qmi.Channel.depolarizing(2, 1.5)


def test_holevo_and_cqc():
    zero = np.array([[1, 0], [0, 0]], dtype=complex)
    plus = np.full((2, 2), 0.5, dtype=complex)
    ident = qmi.Channel.identity(2)
    chi = qmi.holevo_bound([0.5, 0.5], [zero, plus], ident)
    p = (1 + math.cos(math.pi / 4)) / 2
    assert abs(chi - (-p * math.log(p) - (1 - p) * math.log(1 - p))) < 1e-10
    z = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    assert qmi.cqc_mutual_entropy([0.5, 0.5], [zero, plus], ident, z) <= chi + 1e-7
    chain = qmi.cqc_capacity([0.5, 0.5], [zero, plus], ident, z, budget=qmi.SearchBudget(3, 300, 5, 1e-12))
    assert [r["mode"] for r in chain] == ["fixed", "coding-free", "coding-decoding-free"]
    assert chain[0]["value"] <= chain[1]["value"] + 1e-9 <= chain[2]["value"] + 2e-9


def test_entanglement_classes():
    bell = qmi.standard_entanglement(np.eye(2) / 2)
    assert qmi.classify_compound(bell, 2, 2)["class"] == "q"
    assert abs(qmi.entangled_mutual_entropy(bell, 2, 2) - 2 * math.log(2)) < 1e-10
    assert abs(qmi.degree_of_disentanglement(bell, 2, 2)["degree"] + math.log(2)) < 1e-7
    plus = np.full((2, 2), 0.5)
    d = qmi.d_compound([0.5, 0.5], [np.diag([1.0, 0.0]), plus])
    rep = qmi.classify_compound(d, 2, 2)
    assert rep["class"] == "d"
    assert abs(rep["max_commutator"] - 0.5) < 1e-12
    product = np.kron(random_state(2, 1), random_state(2, 2))
    assert qmi.classify_compound(product, 2, 2)["class"] == "c"


def test_class_mutual_entropy_identity():
    rho = np.diag([0.8, 0.2]).astype(complex)
    s = numpy_entropy(rho)
    budget = qmi.SearchBudget(4, 900, 11, 1e-10)
    assert abs(qmi.class_mutual_entropy(rho, qmi.Channel.identity(2), "d", budget)["value"] - s) < 1e-4
    assert abs(qmi.class_mutual_entropy(rho, qmi.Channel.identity(2), "q", budget)["value"] - 2 * s) < 1e-3


def test_capacity_of_identity():
    r = qmi.quantum_capacity(qmi.Channel.identity(2), qmi.SearchBudget(4, 400, 5, 1e-10))
    assert abs(r["value"] - math.log(2)) < 1e-4


def test_cli_run_is_deterministic():
    cfg = json.dumps({"state": {"maximally_mixed": 2}, "channel": {"kind": "amplitude_damping", "gamma": 0.3}})
    code, out, err = qmi.run("mutual", cfg, seed=3)
    assert code == 0, err
    report = json.loads(out)
    assert report["seed"] == 3 and report["converged"] in (True, False)
    assert qmi.run("mutual", cfg, seed=3)[1] == out
    assert qmi.run("entropy", "{ bad json")[0] == 1


def test_verify_suite():
    (suite,) = qmi.verify(seed=1, suites=["operator-core"])
    assert suite["failed"] == 0 and suite["checked"] > 0
