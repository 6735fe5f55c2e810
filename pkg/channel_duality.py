#!/usr/bin/env python3
"""
Choi operators, CP maps and the maximal output infinity-purity.

J_N = (id x N)(phi+) with the unnormalized phi+ = sum_ij |ii><jj|. The map is
recovered as N(X) = Tr_A[(X^T x I) J], which equals Tr_A[(X* x I) J] for every
Hermitian X and stays linear on matrix units. Trace preservation is never
assumed, so J need not have an identity marginal.

gamma_inf(N) = max_{a,b} <b|N(|a><a|)|b> = Lambda^2(J_N) is computed along two
independent paths that must agree.
"""

import dataclasses
import logging
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from dense_hermitian import (
    DensityMatrix,
    HermitianOperator,
    OperatorLike,
    as_operator,
    basis_vector,
    group_systems,
    haar_unitary,
    kron,
    top_eigenpair_array,
    random_unit_vector,
)
from gme_config import tolerances
from gme_errors import (
    DimensionMismatchError,
    DualPathDisagreementError,
    InvalidParameterError,
    NotCompletelyPositiveError,
)
from seesaw_optimizer import GmeEstimate, OptimizerConfig, seesaw_maximize

logger = logging.getLogger(__name__)

LinearMap = Callable[[np.ndarray], np.ndarray]


@dataclasses.dataclass(frozen=True, eq=False)
class ChoiOperator:
    """Positive semidefinite operator on A x B encoding a CP map from A to B."""

    op: HermitianOperator

    def __post_init__(self):
        op = as_operator(self.op)
        if len(op.subsystem_dims) != 2:
            raise DimensionMismatchError(f"Choi operator needs dims (dA, dB), got {op.subsystem_dims}")
        smallest = op.eigenvalues()[0]
        if smallest < -tolerances().choi_psd:
            raise NotCompletelyPositiveError(f"Choi operator has eigenvalue {smallest:.3e}")
        object.__setattr__(self, "op", op)

    @classmethod
    def from_array(cls, array, d_in: int, d_out: int) -> "ChoiOperator":
        return cls(HermitianOperator.from_array(array, (d_in, d_out)))

    @property
    def d_in(self) -> int:
        return self.op.subsystem_dims[0]

    @property
    def d_out(self) -> int:
        return self.op.subsystem_dims[1]

    @property
    def entries(self) -> np.ndarray:
        return self.op.entries


def unnormalized_phi_plus(d: int) -> HermitianOperator:
    """sum_ij |ii><jj|; its normalized counterpart is dense_hermitian.phi_plus_state."""
    if d < 1:
        raise InvalidParameterError(f"Dimension must be positive, got {d}")
    vector = np.eye(d, dtype=np.complex128).reshape(d * d)
    return HermitianOperator(np.outer(vector, vector), (d, d))


def choi_map(choi: ChoiOperator) -> LinearMap:
    """The linear map encoded by ``choi``, acting on arbitrary dA x dA arrays."""
    tensor = choi.entries.reshape(choi.d_in, choi.d_out, choi.d_in, choi.d_out)

    def apply(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (choi.d_in, choi.d_in):
            raise DimensionMismatchError(f"Input of shape {x.shape} for a map on dimension {choi.d_in}")
        # out[b, c] = sum_{i,j} (X^T)[i, j] J[(j, b), (i, c)]
        return np.einsum("ij,jbic->bc", x.T, tensor)

    return apply


def apply_from_choi(choi: ChoiOperator, rho_in: OperatorLike) -> HermitianOperator:
    """N(rho) = Tr_A[(rho* x I) J]."""
    op = as_operator(rho_in)
    if op.dim != choi.d_in:
        raise DimensionMismatchError(f"Input dimension {op.dim} does not match Choi input {choi.d_in}")
    return HermitianOperator(choi_map(choi)(op.entries), (choi.d_out,))


def channel_to_choi(apply: LinearMap, d_in: int) -> ChoiOperator:
    """J = sum_ij |i><j| x N(|i><j|), assembled from the dA^2 matrix units."""
    blocks = None
    for i in range(d_in):
        for j in range(d_in):
            unit = np.zeros((d_in, d_in), dtype=np.complex128)
            unit[i, j] = 1.0
            image = np.asarray(apply(unit), dtype=np.complex128)
            if blocks is None:
                d_out = image.shape[0]
                blocks = np.zeros((d_in, d_out, d_in, d_out), dtype=np.complex128)
            blocks[i, :, j, :] = image
    d_out = blocks.shape[1]
    return ChoiOperator.from_array(blocks.reshape(d_in * d_out, d_in * d_out), d_in, d_out)


def kraus_map(kraus: Sequence[np.ndarray]) -> LinearMap:
    kraus = [np.asarray(k, dtype=np.complex128) for k in kraus]

    def apply(x: np.ndarray) -> np.ndarray:
        return sum(k @ x @ k.conj().T for k in kraus)

    return apply


def kraus_to_choi(kraus: Sequence[np.ndarray]) -> ChoiOperator:
    d_in = np.asarray(kraus[0]).shape[1]
    return channel_to_choi(kraus_map(kraus), d_in)


def random_kraus_channel(d_in: int, d_out: int, rank: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Kraus operators of a random trace-preserving channel, from a Haar isometry."""
    if rank < 1:
        raise InvalidParameterError("Kraus rank must be at least 1")
    if d_out * rank < d_in:
        raise InvalidParameterError("d_out * rank must be at least d_in for a channel")
    isometry = haar_unitary(d_out * rank, rng)[:, :d_in]
    return [isometry[r * d_out:(r + 1) * d_out, :] for r in range(rank)]


def tensor_choi(first: ChoiOperator, second: ChoiOperator) -> ChoiOperator:
    """Choi operator of N1 x N2 on (A1 A2)(B1 B2)."""
    joint = kron(first.op, second.op)
    return ChoiOperator(as_operator(group_systems(joint, ((0, 2), (1, 3)))))


@dataclasses.dataclass(frozen=True, eq=False)
class GammaReport:
    value: float
    gme_path: GmeEstimate
    channel_value: float
    channel_input: np.ndarray
    channel_output: np.ndarray
    agreement: float

    @property
    def agrees(self) -> bool:
        return self.agreement <= tolerances().dual_path_agreement


def _channel_path(choi: ChoiOperator, config: OptimizerConfig) -> Tuple[float, np.ndarray, np.ndarray]:
    """Alternate a <- top eigenvector of K_b and b <- top eigenvector of N(|a><a|)."""
    d_in, d_out = choi.d_in, choi.d_out
    apply = choi_map(choi)
    # images[i, j] = N(|i><j|)
    images = np.empty((d_in, d_in, d_out, d_out), dtype=np.complex128)
    for i in range(d_in):
        for j in range(d_in):
            images[i, j] = apply(np.outer(basis_vector(d_in, i), basis_vector(d_in, j)))

    def output_of(a: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijbc->bc", a, a.conj(), images)

    def input_operator(b: np.ndarray) -> np.ndarray:
        # <a|K|a> = <b|N(|a><a|)|b> gives K[j, i] = <b|N(|i><j|)|b>
        values = np.einsum("b,ijbc,c->ij", b.conj(), images, b)
        return values.T

    best = (-np.inf, None, None)
    for r in range(config.restarts):
        rng = np.random.default_rng([config.seed, r])
        a = random_unit_vector(d_in, rng)
        value = -np.inf
        for _ in range(config.max_iterations):
            _, b = top_eigenpair_array(output_of(a))
            new_value, a = top_eigenpair_array(input_operator(b))
            change = abs(new_value - value)
            value = new_value
            if change < config.objective_tolerance:
                break
        # Best output for the final input, so the witness pair attains the value.
        value, b = top_eigenpair_array(output_of(a))
        if value > best[0]:
            best = (value, a, b)
    return best


def gamma_infinity(choi: ChoiOperator, config: Optional[OptimizerConfig] = None) -> GammaReport:
    """
    Maximal output infinity-purity of the map encoded by ``choi``.

    GME path: seesaw on J as a bipartite operator. Channel path: alternating
    maximization of <b|N(|a><a|)|b>. A disagreement above the configured error
    tolerance raises, since the two are equal exactly.
    """
    config = config or OptimizerConfig()
    gme = seesaw_maximize(choi.op, config=config)
    channel_value, a, b = _channel_path(choi, config)
    agreement = abs(gme.best_value - channel_value)
    if agreement > tolerances().dual_path_error:
        raise DualPathDisagreementError(
            f"GME path {gme.best_value:.12g} and channel path {channel_value:.12g} differ by {agreement:.3e}"
        )
    if agreement > tolerances().dual_path_agreement:
        logger.warning("Dual paths agree only to %.3e", agreement)
    return GammaReport(
        value=max(gme.best_value, channel_value),
        gme_path=gme,
        channel_value=float(channel_value),
        channel_input=a,
        channel_output=b,
        agreement=agreement,
    )


def read_choi_file(path) -> ChoiOperator:
    """
    Plain-text Choi file: first line ``dA dB``, then dA*dB rows of dA*dB
    complex entries written like ``0.5+0j``, row-major.
    """
    lines = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()]
    lines = [line for line in lines if line and not line.startswith("#")]
    if not lines:
        raise InvalidParameterError(f"{path} is empty")
    try:
        d_in, d_out = (int(t) for t in lines[0].split())
    except ValueError as e:
        raise InvalidParameterError(f"First line of {path} must be 'dA dB'") from e
    size = d_in * d_out
    rows = lines[1:]
    if len(rows) != size:
        raise DimensionMismatchError(f"{path} has {len(rows)} rows, expected {size}")
    try:
        matrix = np.array([[complex(t) for t in row.split()] for row in rows], dtype=np.complex128)
    except ValueError as e:
        raise InvalidParameterError(f"Unparseable complex entry in {path}: {e}") from e
    if matrix.shape != (size, size):
        raise DimensionMismatchError(f"{path} rows must each hold {size} entries")
    return ChoiOperator.from_array(matrix, d_in, d_out)


def write_choi_file(choi: ChoiOperator, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{choi.d_in} {choi.d_out}\n")
        for row in choi.entries:
            f.write(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row) + "\n")


def normalized_choi_state(choi: ChoiOperator) -> DensityMatrix:
    """J / Tr J as a density matrix."""
    return DensityMatrix(HermitianOperator(choi.entries / choi.op.trace(), choi.op.subsystem_dims))
