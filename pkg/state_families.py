#!/usr/bin/env python3
"""
State families: Werner, (O x O)-invariant omega_{x,y}, mixtures of two-level
singlets tau, and the small real and complex examples used as counterexamples.

Parameters are validated on construction and rejected, never clamped.
"""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from dense_hermitian import (
    DensityMatrix,
    HermitianOperator,
    antisym_projector,
    basis_vector,
    phi_plus_state,
    random_unit_vector,
    sym_projector,
)
from gme_config import tolerances
from gme_errors import InvalidParameterError

Pair = Tuple[int, int]

PAULI_Y = np.array([[0, -1j], [1j, 0]])
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def _require_dimension(d, minimum: int) -> int:
    if int(d) != d or d < minimum:
        raise InvalidParameterError(f"Dimension must be an integer >= {minimum}, got {d}")
    return int(d)


@dataclass(frozen=True)
class OmegaParams:
    """Parameters of omega_{x,y}: x, y >= 0 and x + y <= 1."""

    x: float
    y: float
    d: int = 3

    def __post_init__(self):
        slack = tolerances().parameter_slack
        object.__setattr__(self, "d", _require_dimension(self.d, 3))
        x, y = float(self.x), float(self.y)
        if not (np.isfinite(x) and np.isfinite(y)):
            raise InvalidParameterError("omega parameters must be finite")
        if x < -slack or y < -slack or x + y > 1 + slack:
            raise InvalidParameterError(f"omega requires x, y >= 0 and x + y <= 1, got x={x}, y={y}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class WernerParams:
    lam: float
    d: int = 3

    def __post_init__(self):
        object.__setattr__(self, "d", _require_dimension(self.d, 2))
        lam = float(self.lam)
        if not 0.0 <= lam <= 1.0:
            raise InvalidParameterError(f"Werner parameter must lie in [0, 1], got {lam}")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class TauParams:
    """
    Distribution over singlet pairs (i, j), i < j, indices 0-based.

    Pairs absent from ``p`` carry zero weight. For d = 3 the 1-based labels map
    as p12 -> (0, 1), p13 -> (0, 2), p23 -> (1, 2).
    """

    p: Tuple[Tuple[Pair, float], ...]
    d: int = 3

    def __post_init__(self):
        tol = tolerances()
        d = _require_dimension(self.d, 3)
        items = dict(self.p.items()) if isinstance(self.p, Mapping) else dict(self.p)
        cleaned: Dict[Pair, float] = {}
        for pair, weight in items.items():
            i, j = (int(k) for k in pair)
            if not 0 <= i < j < d:
                raise InvalidParameterError(f"Pair {pair} is not an ordered pair i < j of 0..{d - 1}")
            weight = float(weight)
            if not np.isfinite(weight) or weight < -tol.parameter_slack:
                raise InvalidParameterError(f"Weight of pair {pair} is {weight}")
            cleaned[(i, j)] = cleaned.get((i, j), 0.0) + weight
        total = sum(cleaned.values())
        if abs(total - 1.0) > tol.trace:
            raise InvalidParameterError(f"Singlet weights sum to {total!r}, expected 1")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "p", tuple(sorted(cleaned.items())))

    @classmethod
    def from_xy(cls, x: float, y: float) -> "TauParams":
        """d = 3 parametrization: p12 = x, p13 = y, p23 = 1 - x - y."""
        return cls({(0, 1): x, (0, 2): y, (1, 2): 1.0 - x - y}, 3)

    @classmethod
    def uniform(cls, d: int = 3) -> "TauParams":
        pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
        return cls({pair: 1.0 / len(pairs) for pair in pairs}, d)

    @classmethod
    def biased(cls, p: float) -> "TauParams":
        """p/2 on each of the (1,2) and (1,3) singlets and 1 - p on (2,3)."""
        return cls.from_xy(p / 2, p / 2)

    def as_dict(self) -> Dict[Pair, float]:
        return dict(self.p)

    def max_pair(self) -> Tuple[Pair, float]:
        """Largest weight; ties go to the first pair in lexicographic order."""
        best_pair, best_weight = self.p[0]
        for pair, weight in self.p[1:]:
            if weight > best_weight:
                best_pair, best_weight = pair, weight
        return best_pair, best_weight


def werner_state(params: WernerParams) -> DensityMatrix:
    """gamma_lambda = 2(1-lam)/(d(d+1)) pi+ + 2 lam/(d(d-1)) pi-."""
    d, lam = params.d, params.lam
    state = (2 * (1 - lam) / (d * (d + 1))) * sym_projector(d) + (2 * lam / (d * (d - 1))) * antisym_projector(d)
    return DensityMatrix(state)


def werner_omega_params(params: WernerParams) -> OmegaParams:
    """The Werner state as a member of the omega family (requires d >= 3)."""
    d, lam = params.d, params.lam
    x = (1 - lam) * (d - 1) * (d + 2) / (d * (d + 1))
    return OmegaParams(x, lam, d)


def omega_state(params: OmegaParams) -> DensityMatrix:
    """2x/((d-1)(d+2)) (pi+ - Phi+) + 2y/(d(d-1)) pi- + (1-x-y) Phi+."""
    d, x, y = params.d, params.x, params.y
    phi = phi_plus_state(d).op
    state = (
        (2 * x / ((d - 1) * (d + 2))) * (sym_projector(d) - phi)
        + (2 * y / (d * (d - 1))) * antisym_projector(d)
        + (1 - x - y) * phi
    )
    return DensityMatrix(state)


def singlet_vector(d: int, i: int, j: int) -> np.ndarray:
    """(|ij> - |ji>)/sqrt 2."""
    return (np.kron(basis_vector(d, i), basis_vector(d, j)) - np.kron(basis_vector(d, j), basis_vector(d, i))) / np.sqrt(2)


def tau_state(params: TauParams) -> DensityMatrix:
    d = params.d
    state = np.zeros((d * d, d * d), dtype=np.complex128)
    for (i, j), weight in params.p:
        psi = singlet_vector(d, i, j)
        state += weight * np.outer(psi, psi.conj())
    return DensityMatrix.from_array(state, (d, d))


def is_omega_separable(params: OmegaParams) -> bool:
    """Closed separability region 1 >= x + y >= 2/3, y <= 1/2, known for d = 3 only."""
    if params.d != 3:
        raise InvalidParameterError("The omega separability region is only available for d = 3")
    slack = tolerances().parameter_slack
    return params.x + params.y >= 2 / 3 - slack and params.y <= 0.5 + slack


def real_two_qubit_example() -> DensityMatrix:
    """(I x I - 3/4 Y x Y - 1/4 Z x Z)/4: separable and real in the computational basis."""
    state = (np.eye(4) - 0.75 * np.kron(PAULI_Y, PAULI_Y) - 0.25 * np.kron(PAULI_Z, PAULI_Z)) / 4
    return DensityMatrix.from_array(state, (2, 2))


def phase_example_state() -> DensityMatrix:
    """|0><0| x |+~><+~| with |+~> = (|0> + i|1>)/sqrt 2; complex GME 1, real GME 1/2."""
    plus_i = np.array([1, 1j]) / np.sqrt(2)
    return DensityMatrix.from_pure(np.kron(basis_vector(2, 0), plus_i), (2, 2))


def random_separable_state(
    d_a: int,
    d_b: int,
    rng: np.random.Generator,
    terms: Optional[int] = None,
) -> DensityMatrix:
    """Dirichlet mixture of Haar-random product states; 2..9 terms unless given."""
    if terms is None:
        terms = int(rng.integers(2, 10))
    if terms < 1:
        raise InvalidParameterError("A separable mixture needs at least one term")
    weights = rng.dirichlet(np.ones(terms))
    state = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    for weight in weights:
        psi = np.kron(random_unit_vector(d_a, rng), random_unit_vector(d_b, rng))
        state += weight * np.outer(psi, psi.conj())
    state /= np.trace(state).real
    return DensityMatrix(HermitianOperator(state, (d_a, d_b)))
