#!/usr/bin/env python3
"""
Closed-form GME values for the symmetric families, the Phi+ two-copy lower
bound, and the x = 0 crossover between the two.

Max formulas report the achieving branch; ties go to the first branch listed.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from dense_hermitian import Field, ProductAnsatz, basis_vector
from gme_errors import InvalidParameterError, NoRootError
from state_families import OmegaParams, TauParams, WernerParams, werner_omega_params

logger = logging.getLogger(__name__)

OMEGA_BRANCHES = ("orthogonal", "aligned-complex", "conjugate", "aligned-real")
OMEGA_REAL_BRANCHES = ("orthogonal", "aligned-real")


@dataclass(frozen=True, eq=False)
class GmeValue:
    value: float
    branch: str
    maximizer_hint: Optional[ProductAnsatz] = None

    def __post_init__(self):
        if not -1e-15 <= self.value <= 1 + 1e-15:
            raise InvalidParameterError(f"GME value {self.value} outside [0, 1]")


def _argmax_first(values: Sequence[float]) -> int:
    best = 0
    for k, value in enumerate(values):
        if value > values[best]:
            best = k
    return best


def _omega_hint(branch: str, d: int) -> ProductAnsatz:
    """Product vectors realizing the extreme overlaps of each branch."""
    e0, e1 = basis_vector(d, 0), basis_vector(d, 1)
    plus_i = (e0 + 1j * e1) / np.sqrt(2)
    if branch == "orthogonal":
        return ProductAnsatz.from_arrays([e0.real, e1.real], field=Field.REAL)
    if branch == "aligned-complex":
        return ProductAnsatz.from_arrays([plus_i, plus_i])
    if branch == "conjugate":
        return ProductAnsatz.from_arrays([plus_i, plus_i.conj()])
    return ProductAnsatz.from_arrays([e0.real, e0.real], field=Field.REAL)


def omega_branches(x: float, y: float, d: int) -> Tuple[float, float, float, float]:
    """The four candidate maxima, in OMEGA_BRANCHES order."""
    return (
        (2 * y + d * (x + y)) / (d * (d - 1) * (d + 2)),
        2 * x / ((d - 1) * (d + 2)),
        1 / d - x * d / ((d - 1) * (d + 2)) - y * (d - 2) / (d * (d - 1)),
        (1 - y) / d - x / (d + 2),
    )


def omega_product_value(x: float, y: float, d: int, overlap: float, conjugate_overlap: float) -> float:
    """
    <alpha,beta|omega_{x,y}|alpha,beta> as a function of |<alpha|beta>|^2 and
    |<alpha*|beta>|^2.
    """
    c0 = (2 * y + d * (x + y)) / (d * (d - 1) * (d + 2))
    c1 = (-2 * y + d * (x - y)) / (d * (d - 1) * (d + 2))
    c2 = (1 - y) / d - (d + 1) * x / ((d - 1) * (d + 2))
    return c0 + c1 * overlap + c2 * conjugate_overlap


def gme_omega(x: float, y: float, d: int = 3) -> GmeValue:
    params = OmegaParams(x, y, d)
    values = omega_branches(params.x, params.y, params.d)
    k = _argmax_first(values)
    branch = OMEGA_BRANCHES[k]
    return GmeValue(values[k], branch, _omega_hint(branch, params.d))


def gme_omega_real(x: float, y: float, d: int = 3) -> GmeValue:
    """
    Real-restricted GME of omega_{x,y}.

    Real vectors have |<alpha*|beta>| = |<alpha|beta>|, which leaves the
    orthogonal and aligned-real branches. For d = 3 the second branch reads
    1/3 - y/3 - x(d-2)(d+3)/(3(d-1)(d+2)); the general-d form below agrees with it there.
    Values for d != 3 follow from the branch analysis but are unverified.
    """
    params = OmegaParams(x, y, d)
    x, y, d = params.x, params.y, params.d
    values = (
        (2 * y + d * (x + y)) / (d * (d - 1) * (d + 2)),
        (1 - y) / d - x / (d + 2),
    )
    k = _argmax_first(values)
    branch = OMEGA_REAL_BRANCHES[k]
    return GmeValue(values[k], branch, _omega_hint(branch, d))


def gme_omega_real_printed(x: float, y: float, d: int = 3) -> float:
    """The real-GME formula as printed for d = 3, kept for cross-checking."""
    params = OmegaParams(x, y, d)
    x, y, d = params.x, params.y, params.d
    return max(
        (2 * y + d * (x + y)) / (d * (d - 1) * (d + 2)),
        1 / 3 - y / 3 - x * (d - 2) * (d + 3) / (3 * (d - 1) * (d + 2)),
    )


def gme_tau(params: TauParams) -> GmeValue:
    """Lambda^2(tau) = max p_ij / 2, attained by |i>|j>."""
    (i, j), weight = params.max_pair()
    hint = ProductAnsatz.from_arrays(
        [basis_vector(params.d, i).real, basis_vector(params.d, j).real], field=Field.REAL
    )
    return GmeValue(weight / 2, f"pair-{i}{j}", hint)


def gme_werner(params: WernerParams) -> GmeValue:
    """Werner GME through its omega parametrization (d >= 3)."""
    omega = werner_omega_params(params)
    return gme_omega(omega.x, omega.y, omega.d)


def pure_state_gme(psi, dims: Tuple[int, int]) -> GmeValue:
    """Largest squared Schmidt coefficient of a bipartite pure state."""
    psi = np.asarray(psi, dtype=np.complex128)
    d_a, d_b = dims
    if psi.size != d_a * d_b:
        raise InvalidParameterError(f"State of size {psi.size} does not match dims {dims}")
    psi = psi / np.linalg.norm(psi)
    u, s, vh = np.linalg.svd(psi.reshape(d_a, d_b))
    hint = ProductAnsatz.from_arrays([u[:, 0], vh[0, :]])
    return GmeValue(float(s[0] ** 2), "schmidt", hint)


def phi_plus_two_copy_lower_bound(x: float, y: float, d: int = 3) -> float:
    """Overlap of omega x omega with Phi+ on AA' and Phi+ on BB'."""
    params = OmegaParams(x, y, d)
    x, y, d = params.x, params.y, params.d
    return (
        2 * x**2 / (d**2 * (d - 1) * (d + 2))
        + 2 * y**2 / (d**3 * (d - 1))
        + (1 - x - y) ** 2 / d**2
    )


def _crossover_residual(d: int) -> Callable[[float], float]:
    def residual(y: float) -> float:
        local = (1 / d - y * (d - 2) / (d * (d - 1))) ** 2
        global_bound = 2 * y**2 / (d**3 * (d - 1)) + (1 - y) ** 2 / d**2
        return local - global_bound

    return residual


def crossover_y_closed_form(d: int) -> float:
    """Nonzero root of the x = 0 crossover quadratic: 2d(d-1)/(2d^2 - d - 2)."""
    if d < 3:
        raise InvalidParameterError(f"Crossover is defined for d >= 3, got {d}")
    return 2 * d * (d - 1) / (2 * d * d - d - 2)


def crossover_y(d: int, lower: float = 1e-6, xtol: float = 1e-15) -> float:
    """
    The y at which (Lambda^2(omega_{0,y}))^2 equals the Phi+ two-copy bound,
    found by bisection. Above it the bound exceeds the squared single-copy value.
    """
    if int(d) != d or d < 3:
        raise InvalidParameterError(f"Crossover is defined for integer d >= 3, got {d}")
    d = int(d)
    residual = _crossover_residual(d)
    if residual(lower) * residual(1.0) > 0:
        raise NoRootError(f"No sign change of the crossover equation on [{lower}, 1] for d={d}")
    root = bisect(residual, lower, 1.0, xtol=xtol, maxiter=200)
    closed = crossover_y_closed_form(d)
    if abs(root - closed) > 1e-9:
        logger.warning("Crossover bisection %.15f and closed form %.15f differ for d=%d", root, closed, d)
    return float(root)


@dataclass(frozen=True)
class CrossoverPoint:
    d: int
    y_bisection: float
    y_closed_form: float
    residual: float


def crossover_table(d_min: int = 3, d_max: int = 15) -> List[CrossoverPoint]:
    rows = []
    for d in range(d_min, d_max + 1):
        y = crossover_y(d)
        rows.append(CrossoverPoint(d, y, crossover_y_closed_form(d), abs(_crossover_residual(d)(y))))
    return rows
