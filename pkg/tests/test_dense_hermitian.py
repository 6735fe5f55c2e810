"""Test the dense Hermitian core."""

import numpy as np
import pytest

from dense_hermitian import (
    DensityMatrix,
    Field,
    HermitianOperator,
    ProductAnsatz,
    UnitVector,
    antisym_projector,
    basis_vector,
    group_systems,
    haar_orthogonal,
    haar_unitary,
    kron,
    partial_trace,
    phi_plus_state,
    product_expectation,
    random_density_matrix,
    random_unit_vector,
    reorder_systems,
    swap_operator,
    sym_projector,
    top_eigenpair,
)
from gme_errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NotHermitianError,
    NotPositiveError,
    SubsystemError,
)


def test_rejects_non_hermitian():
    """A matrix that is not Hermitian is rejected."""
    with pytest.raises(NotHermitianError):
        HermitianOperator.from_array([[1, 1], [0, 1]])


def test_rejects_bad_dims():
    """Subsystem dimensions must multiply to the matrix size."""
    with pytest.raises(DimensionMismatchError):
        HermitianOperator.from_array(np.eye(4), (3, 2))


def test_density_matrix_trace_and_positivity():
    """Density matrices need unit trace and a nonnegative spectrum."""
    with pytest.raises(InvalidParameterError):
        DensityMatrix.from_array(np.eye(2))
    with pytest.raises(NotPositiveError):
        DensityMatrix.from_array(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        DensityMatrix.from_array(np.diag([1.5, -0.5]))


def test_entries_are_read_only():
    """Stored entries cannot be mutated in place."""
    op = HermitianOperator.from_array(np.eye(2))
    with pytest.raises(ValueError):
        op.entries[0, 0] = 5


def test_unit_vector_norm_checked():
    """UnitVector requires norm one and real vectors for the real field."""
    with pytest.raises(InvalidParameterError):
        UnitVector(np.array([1.0, 1.0]))
    with pytest.raises(InvalidParameterError):
        UnitVector.normalized(np.array([1, 1j]), Field.REAL)
    np.testing.assert_allclose(np.linalg.norm(UnitVector.normalized([3, 4]).entries), 1.0)


def test_partial_trace_of_product(rng):
    """Tracing out one factor of a product leaves the other."""
    a = random_density_matrix(2, rng)
    b = random_density_matrix(3, rng)
    joint = kron(a, b)
    np.testing.assert_allclose(partial_trace(joint, [0]).entries, a.entries, atol=1e-12)
    np.testing.assert_allclose(partial_trace(joint, [1]).entries, b.entries, atol=1e-12)
    assert isinstance(partial_trace(joint, [0]), DensityMatrix)


def test_partial_trace_invalid_index(rng):
    """Keeping a subsystem that does not exist is an error."""
    joint = kron(random_density_matrix(2, rng), random_density_matrix(2, rng))
    with pytest.raises(SubsystemError):
        partial_trace(joint, [2])


def test_reorder_swaps_factors(rng):
    """Reordering (1, 0) exchanges the factors of a product."""
    a = random_density_matrix(2, rng)
    b = random_density_matrix(3, rng)
    swapped = reorder_systems(kron(a, b), [1, 0])
    np.testing.assert_allclose(swapped.entries, kron(b, a).entries, atol=1e-12)
    assert swapped.subsystem_dims == (3, 2)


def test_reorder_rejects_non_permutation(rng):
    """A repeated index is not a permutation."""
    joint = kron(random_density_matrix(2, rng), random_density_matrix(2, rng))
    with pytest.raises(SubsystemError):
        reorder_systems(joint, [0, 0])


def test_group_systems_two_copy_layout(rng):
    """Grouping (0, 2), (1, 3) of rho x sigma equals the explicit reordering."""
    rho = random_density_matrix(6, rng, subsystem_dims=(2, 3))
    sigma = random_density_matrix(6, rng, subsystem_dims=(2, 3))
    joint = kron(rho, sigma)
    grouped = group_systems(joint, ((0, 2), (1, 3)))
    assert grouped.subsystem_dims == (4, 9)
    expected = reorder_systems(joint, [0, 2, 1, 3]).entries
    np.testing.assert_allclose(grouped.entries, expected, atol=1e-12)


def test_projectors():
    """Symmetric and antisymmetric projectors have the expected traces and sum."""
    d = 3
    plus, minus = sym_projector(d), antisym_projector(d)
    assert plus.trace() == pytest.approx(d * (d + 1) / 2)
    assert minus.trace() == pytest.approx(d * (d - 1) / 2)
    np.testing.assert_allclose((plus + minus).entries, np.eye(d * d), atol=1e-12)
    np.testing.assert_allclose(swap_operator(d).entries @ swap_operator(d).entries, np.eye(d * d), atol=1e-12)


def test_top_eigenpair():
    """Top eigenpair of a diagonal operator."""
    value, vector = top_eigenpair(HermitianOperator.from_array(np.diag([1.0, 3.0, 2.0])))
    assert value == pytest.approx(3.0)
    np.testing.assert_allclose(np.abs(vector.entries), [0, 1, 0], atol=1e-12)


def test_product_expectation_phi_plus():
    """A product basis state overlaps Phi+ with weight 1/d."""
    ansatz = ProductAnsatz.from_arrays([basis_vector(3, 0), basis_vector(3, 0)])
    assert product_expectation(phi_plus_state(3), ansatz) == pytest.approx(1 / 3)


def test_product_expectation_grouped(rng):
    """With a grouping, the expectation uses the regrouped operator."""
    rho = random_density_matrix(4, rng, subsystem_dims=(2, 2))
    joint = kron(rho, rho)
    parts = [random_unit_vector(4, rng), random_unit_vector(4, rng)]
    ansatz = ProductAnsatz.from_arrays(parts, grouping=((0, 2), (1, 3)))
    direct = np.kron(parts[0], parts[1])
    grouped = group_systems(joint, ((0, 2), (1, 3))).entries
    assert product_expectation(joint, ansatz) == pytest.approx(np.vdot(direct, grouped @ direct).real, abs=1e-12)


def test_ansatz_dims_must_match():
    """A mismatched ansatz is rejected."""
    ansatz = ProductAnsatz.from_arrays([basis_vector(2, 0), basis_vector(2, 0)])
    with pytest.raises(DimensionMismatchError):
        product_expectation(phi_plus_state(3), ansatz)


def test_haar_samplers(rng):
    """Haar samplers return unitary and orthogonal matrices."""
    u = haar_unitary(4, rng)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
    o = haar_orthogonal(4, rng)
    np.testing.assert_allclose(o @ o.T, np.eye(4), atol=1e-12)
    assert np.isrealobj(o)


def test_random_density_matrix_rank(rng):
    """Requested rank is respected."""
    rho = random_density_matrix(5, rng, rank=2)
    assert np.sum(rho.eigenvalues() > 1e-10) == 2
    assert rho.trace() == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        random_density_matrix(3, rng, rank=4)


def test_top_eigenpair_matches_full_eigh(rng):
    """The top eigenpair agrees with a full eigendecomposition of a random 9 x 9 operator."""
    a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    op = HermitianOperator.from_array(a + a.conj().T, (3, 3))
    value, vector = top_eigenpair(op)
    assert value == pytest.approx(np.linalg.eigvalsh(op.entries)[-1], abs=1e-10)
    np.testing.assert_allclose(op.entries @ vector.entries, value * vector.entries, atol=1e-10)


def test_top_eigenvalue_bounds_rayleigh_quotients(rng):
    """No unit vector has a Rayleigh quotient above the top eigenvalue."""
    a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    op = HermitianOperator.from_array(a + a.conj().T)
    value, _ = top_eigenpair(op)
    for _ in range(1000):
        v = random_unit_vector(9, rng)
        assert np.vdot(v, op.entries @ v).real <= value + 1e-12


def test_conjugate_by_unitary(rng):
    """U M U^dagger keeps the subsystem dims and the spectrum."""
    rho = random_density_matrix(9, rng, subsystem_dims=(3, 3))
    u = haar_unitary(9, rng)
    rotated = rho.op.conjugate_by(u)
    assert rotated.subsystem_dims == (3, 3)
    np.testing.assert_allclose(rotated.entries, u @ rho.entries @ u.conj().T, atol=1e-12)
    np.testing.assert_allclose(rotated.eigenvalues(), rho.eigenvalues(), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_swap_and_phi_plus_on_product_vectors(rng, d):
    """<a,b|F|a,b> = |<a|b>|^2 and <a,b|Phi+|a,b> = |<a*|b>|^2 / d."""
    for _ in range(10):
        alpha, beta = random_unit_vector(d, rng), random_unit_vector(d, rng)
        ansatz = ProductAnsatz.from_arrays([alpha, beta])
        overlap = abs(np.vdot(alpha, beta)) ** 2
        conjugate_overlap = abs(np.vdot(alpha.conj(), beta)) ** 2
        assert product_expectation(swap_operator(d), ansatz) == pytest.approx(overlap, abs=1e-12)
        assert product_expectation(phi_plus_state(d), ansatz) == pytest.approx(conjugate_overlap / d, abs=1e-12)
