import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qfi_disturb.model import (
    DisturbedModel,
    QfiReport,
    SchemaError,
    ValidationError,
    crlb,
    hamiltonian_at,
    matrix_from_json,
    matrix_to_json,
    model_from_json,
    model_to_json,
    validate_density,
    validate_hermitian,
)

from conftest import SX, SZ, random_density, random_hermitian


def test_accepts_sigma_x():
    H = validate_hermitian([[0, 1], [1, 0]])
    np.testing.assert_array_equal(H.matrix, SX)


def test_rejects_nilpotent_with_deviation():
    with pytest.raises(ValidationError) as info:
        validate_hermitian([[0, 1], [0, 0]])
    assert info.value.deviation == pytest.approx(1.0)


def test_symmetrizes_dust():
    M = np.array([[1.0, 0.5 + 1e-12j], [0.5, -1.0]])
    H = validate_hermitian(M)
    np.testing.assert_allclose(H.matrix, H.matrix.conj().T, atol=0)


def test_non_square_rejected():
    with pytest.raises(ValidationError):
        validate_hermitian(np.zeros((2, 3)))


def test_maximally_mixed_qubit():
    rho = validate_density(np.eye(2) / 2)
    np.testing.assert_allclose(rho.eigenvalues, [0.5, 0.5])


def test_pure_state_spectrum():
    rho = validate_density(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(rho.eigenvalues, [0.0, 1.0])
    assert rho.is_pure()


def test_bad_trace_rejected():
    with pytest.raises(ValidationError, match="trace"):
        validate_density(np.diag([0.7, 0.4]))


def test_negative_eigenvalue_rejected():
    with pytest.raises(ValidationError, match="negative"):
        validate_density(np.diag([1.1, -0.1]))


def test_eigenvalue_dust_clipped():
    rho = validate_density(np.diag([1.0 + 1e-11, -1e-11]))
    assert rho.eigenvalues.min() >= 0
    assert rho.matrix.trace().real == pytest.approx(1.0, abs=1e-15)


def test_hamiltonian_examples():
    base = DisturbedModel.build(SZ, SX)
    np.testing.assert_array_equal(hamiltonian_at(base.at(1, 0)).matrix, SZ)
    np.testing.assert_array_equal(hamiltonian_at(base.at(0, 1)).matrix, SX)
    np.testing.assert_array_equal(hamiltonian_at(base.at(2, 3)).matrix, [[2, 3], [3, -2]])


def test_dimension_mismatch_in_model():
    with pytest.raises(ValidationError, match="dimension"):
        DisturbedModel.build(SZ, np.eye(3))


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    l1=st.floats(-5, 5),
    l2=st.floats(-5, 5),
    eta=st.floats(-5, 5),
)
def test_hamiltonian_linear_in_lambda(seed, l1, l2, eta):
    rng = np.random.default_rng(seed)
    m = DisturbedModel.build(random_hermitian(rng, 3), random_hermitian(rng, 3), l1, eta)
    lhs = hamiltonian_at(m.at(l1 + l2)).matrix
    rhs = hamiltonian_at(m).matrix + l2 * m.H_I.matrix
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + np.max(np.abs(lhs)))


@pytest.mark.parametrize("q,nu,expected", [(4, 1, 0.5), (4, 100, 0.05), (0, 10, math.inf)])
def test_crlb(q, nu, expected):
    assert crlb(q, nu) == pytest.approx(expected)


def test_report_crlb_consistency():
    r = QfiReport(qfi=16.0, nu=4)
    assert r.crlb == pytest.approx(1 / 8)
    assert QfiReport(qfi=0.0, nu=3).to_json()["crlb"] is None
    with pytest.raises(ValueError):
        QfiReport(qfi=-1.0)


# ----------------------------------------------------------- serialization


def test_density_round_trip(rng):
    for d in range(1, 6):
        rho = random_density(rng, d)
        text = json.dumps(matrix_to_json(rho.matrix))
        back = validate_density(matrix_from_json(json.loads(text)))
        assert np.max(np.abs(back.matrix - rho.matrix)) <= 1e-12


def test_model_round_trip(rng):
    m = DisturbedModel.build(random_hermitian(rng, 3), random_hermitian(rng, 3), 0.25, -1.5)
    back = model_from_json(json.loads(json.dumps(model_to_json(m))))
    np.testing.assert_array_equal(back.H_I.matrix, m.H_I.matrix)
    np.testing.assert_array_equal(back.H_0.matrix, m.H_0.matrix)
    assert (back.lam, back.eta) == (0.25, -1.5)


def test_null_h0_means_no_disturbance():
    doc = {"H_I": matrix_to_json(SZ), "H_0": None, "lambda": 1.0, "eta": 7.0}
    m = model_from_json(doc)
    assert m.eta == 0.0
    assert not m.H_0.matrix.any()


@pytest.mark.parametrize(
    "doc,where",
    [
        ({"dim": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]]}, "matrix.re"),
        ({"dim": 2, "re": [[1, 0], [0, 1]]}, "matrix"),
        ({"dim": 2, "re": [[1, "x"], [0, 1]], "im": [[0, 0], [0, 0]]}, "matrix.re[0][1]"),
        ({"dim": 0, "re": [], "im": []}, "matrix.dim"),
    ],
)
def test_matrix_schema_errors(doc, where):
    with pytest.raises(SchemaError) as info:
        matrix_from_json(doc)
    assert info.value.where == where


def test_model_missing_lambda():
    with pytest.raises(SchemaError, match="lambda"):
        model_from_json({"H_I": matrix_to_json(SZ), "H_0": None})
