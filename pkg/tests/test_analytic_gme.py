"""Test the closed-form GME values and the crossover."""

import numpy as np
import pytest

from analytic_gme import (
    OMEGA_BRANCHES,
    GmeValue,
    crossover_table,
    crossover_y,
    crossover_y_closed_form,
    gme_omega,
    gme_omega_real,
    gme_omega_real_printed,
    gme_tau,
    gme_werner,
    omega_branches,
    omega_product_value,
    phi_plus_two_copy_lower_bound,
    pure_state_gme,
)
from dense_hermitian import phi_plus_vector, product_expectation
from gme_errors import InvalidParameterError
from state_families import OmegaParams, TauParams, WernerParams, omega_state


def test_antisymmetric_value():
    """omega at (0, 1) is the normalized antisymmetric projector, with GME 1/6."""
    value = gme_omega(0, 1, 3)
    assert value.value == pytest.approx(1 / 6, abs=1e-12)
    assert value.branch == "orthogonal"


def test_phi_plus_value():
    """Phi+ has GME 1/d."""
    assert gme_omega(0, 0, 3).value == pytest.approx(1 / 3)
    assert gme_omega(0, 0, 5).value == pytest.approx(1 / 5)


def test_real_value():
    """Real GME at (0.2, 0.3) is 0.193333..."""
    assert gme_omega_real(0.2, 0.3, 3).value == pytest.approx(0.19333333333333, abs=1e-12)


@pytest.mark.parametrize("x", np.linspace(0, 1, 6))
def test_real_general_form_matches_printed(x):
    """The general-d real formula agrees with the d = 3 printed one on the triangle."""
    for y in np.linspace(0, 1 - x, 5):
        assert gme_omega_real(x, y, 3).value == pytest.approx(gme_omega_real_printed(x, y, 3), abs=1e-12)


@pytest.mark.parametrize("x, y", [(0.1, 0.2), (0.7, 0.1), (0.0, 0.9), (0.3, 0.3)])
def test_real_never_exceeds_complex(x, y):
    """Restricting to real vectors cannot increase the maximum."""
    assert gme_omega_real(x, y, 3).value <= gme_omega(x, y, 3).value + 1e-15


def test_branches_are_attained_by_hints():
    """Each reported maximizer hint attains the reported value."""
    for x, y in [(0.0, 1.0), (0.9, 0.05), (0.1, 0.1), (0.3, 0.6)]:
        value = gme_omega(x, y, 3)
        attained = product_expectation(omega_state(OmegaParams(x, y)), value.maximizer_hint)
        assert attained == pytest.approx(value.value, abs=1e-12)
        assert value.branch in OMEGA_BRANCHES


def test_product_value_reproduces_branches():
    """The overlap parametrization gives each branch at its extreme overlaps."""
    x, y, d = 0.3, 0.4, 3
    orthogonal, aligned_complex, conjugate, aligned_real = omega_branches(x, y, d)
    assert omega_product_value(x, y, d, 0, 0) == pytest.approx(orthogonal)
    assert omega_product_value(x, y, d, 1, 0) == pytest.approx(aligned_complex)
    assert omega_product_value(x, y, d, 0, 1) == pytest.approx(conjugate)
    assert omega_product_value(x, y, d, 1, 1) == pytest.approx(aligned_real)


def test_tau_value():
    """tau GME is half the largest singlet weight."""
    assert gme_tau(TauParams({(0, 1): 1.0})).value == pytest.approx(0.5)
    value = gme_tau(TauParams.from_xy(0.2, 0.3))
    assert value.value == pytest.approx(0.25)
    assert value.branch == "pair-12"


def test_werner_values():
    """Antisymmetric Werner gives 1/6 and symmetric Werner gives 1/6 at d = 3."""
    assert gme_werner(WernerParams(1.0, 3)).value == pytest.approx(1 / 6)
    assert gme_werner(WernerParams(0.0, 3)).value == pytest.approx(1 / 6)


def test_pure_state_gme():
    """Pure-state GME is the largest squared Schmidt coefficient."""
    assert pure_state_gme(phi_plus_vector(3), (3, 3)).value == pytest.approx(1 / 3)
    assert pure_state_gme(np.kron([1, 0], [0, 1]), (2, 2)).value == pytest.approx(1.0)
    with pytest.raises(InvalidParameterError):
        pure_state_gme(np.ones(5), (2, 2))


def test_gme_value_range():
    """Values outside [0, 1] are rejected."""
    with pytest.raises(InvalidParameterError):
        GmeValue(1.5, "none")


@pytest.mark.parametrize(
    "x, y, bound, local_squared",
    [(0.0, 0.975, 0.035278, 0.029184), (0.025, 0.95, 0.03351, 0.028056)],
)
def test_phi_plus_bound_beats_square(x, y, bound, local_squared):
    """Near y = 1 the Phi+ two-copy bound exceeds the squared single-copy value."""
    assert phi_plus_two_copy_lower_bound(x, y, 3) == pytest.approx(bound, abs=1e-5)
    assert gme_omega(x, y, 3).value ** 2 == pytest.approx(local_squared, abs=1e-5)
    assert phi_plus_two_copy_lower_bound(x, y, 3) > gme_omega(x, y, 3).value ** 2


def test_crossover_d3():
    """y*(3) = 12/13."""
    assert crossover_y(3) == pytest.approx(12 / 13, abs=1e-12)
    assert crossover_y_closed_form(3) == pytest.approx(12 / 13)


def test_crossover_table():
    """Bisection matches the closed form, residuals vanish and y* rises toward 1."""
    rows = crossover_table(3, 15)
    assert [row.d for row in rows] == list(range(3, 16))
    values = [row.y_bisection for row in rows]
    for row in rows:
        assert row.y_bisection == pytest.approx(row.y_closed_form, abs=1e-12)
        assert row.residual <= 1e-12
    # y*(3) = y*(4) = 12/13; strict from d = 4 on.
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert all(b > a for a, b in zip(values[1:], values[2:]))
    assert values[-1] < 1


def test_crossover_rejects_small_d():
    """Crossover needs d >= 3."""
    with pytest.raises(InvalidParameterError):
        crossover_y(2)
