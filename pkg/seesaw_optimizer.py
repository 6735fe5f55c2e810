#!/usr/bin/env python3
"""
Multi-start alternating eigenvector ascent for max <a_1,...,a_N|rho|a_1,...,a_N>.

Fixing every party but one turns the objective into a Rayleigh quotient of the
conditional operator on the remaining party, so each inner step is an exact
maximization by its top eigenvector. Sweeps repeat until the objective stops
changing; restarts combine a few deterministic warm starts with seeded random
starts. The reported upper bound is the largest eigenvalue of rho.
"""

import dataclasses
import logging
import string
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as spla

from dense_hermitian import (
    Field,
    HermitianOperator,
    OperatorLike,
    ProductAnsatz,
    as_operator,
    group_systems,
    kron,
    phi_plus_vector,
    random_unit_vector,
    top_eigenpair_array,
)
from gme_config import get_config
from gme_errors import DimensionMismatchError, InvalidParameterError, NonFiniteError, SubsystemError

__all__ = [
    "GmeEstimate",
    "OptimizerConfig",
    "ProductAnsatz",
    "TWO_COPY_GROUPING",
    "conditional_operator",
    "gradient_check",
    "seesaw_maximize",
    "two_copy_gme",
]

logger = logging.getLogger(__name__)

_LETTERS = string.ascii_letters

# rho^{AB} x sigma^{A'B'} is ordered A, B, A', B'; parties are AA' and BB'.
TWO_COPY_GROUPING = ((0, 2), (1, 3))

WarmStart = Union[ProductAnsatz, Sequence[np.ndarray]]


@dataclasses.dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = dataclasses.field(default_factory=lambda: get_config().optimizer.restarts)
    max_iterations: int = dataclasses.field(default_factory=lambda: get_config().optimizer.max_iterations)
    objective_tolerance: float = dataclasses.field(
        default_factory=lambda: get_config().optimizer.objective_tolerance
    )
    seed: int = dataclasses.field(default_factory=lambda: get_config().optimizer.seed)
    field: Field = Field.COMPLEX
    record_traces: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidParameterError("restarts must be at least 1")
        if self.max_iterations < 1:
            raise InvalidParameterError("max_iterations must be at least 1")
        if self.objective_tolerance <= 0:
            raise InvalidParameterError("objective_tolerance must be positive")
        if self.seed < 0:
            raise InvalidParameterError("seed must be nonnegative")
        object.__setattr__(self, "field", Field(self.field))

    @classmethod
    def two_copy(cls, **overrides) -> "OptimizerConfig":
        """Defaults for two-copy runs, which need more restarts."""
        overrides.setdefault("restarts", get_config().optimizer.two_copy_restarts)
        return cls(**overrides)

    def replace(self, **changes) -> "OptimizerConfig":
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True, eq=False)
class GmeEstimate:
    """Best product-state value found, its maximizer and run diagnostics."""

    best_value: float
    best_ansatz: ProductAnsatz
    upper_bound: float
    restarts_used: int
    iterations_per_restart: Tuple[int, ...]
    converged: bool
    best_restart: int
    objective_trace: Tuple[float, ...]
    traces: Tuple[Tuple[float, ...], ...] = ()
    components: Tuple["GmeEstimate", ...] = ()

    @property
    def gap_to_upper_bound(self) -> float:
        return self.upper_bound - self.best_value


class _SeesawProblem:
    """Contraction kernels for one operator with fixed party dimensions."""

    def __init__(self, op: HermitianOperator, field: Field):
        self.dims = op.subsystem_dims
        self.n = len(self.dims)
        self.field = Field(field)
        self.matrix = op.entries
        self.tensor = op.entries.reshape(self.dims + self.dims)
        rows, cols = _LETTERS[: self.n], _LETTERS[self.n: 2 * self.n]
        self._expressions: Dict[int, str] = {}
        for k in range(self.n):
            subscripts = [rows + cols]
            for j in range(self.n):
                if j != k:
                    subscripts += [rows[j], cols[j]]
            self._expressions[k] = ",".join(subscripts) + "->" + rows[k] + cols[k]
        self._paths: Dict[int, list] = {}

    def conditional(self, vectors: Sequence[np.ndarray], k: int) -> np.ndarray:
        operands = [self.tensor]
        for j, v in enumerate(vectors):
            if j != k:
                operands += [v.conj(), v]
        expression = self._expressions[k]
        if k not in self._paths:
            self._paths[k] = np.einsum_path(expression, *operands, optimize="greedy")[0]
        return np.einsum(expression, *operands, optimize=self._paths[k])

    def objective(self, vectors: Sequence[np.ndarray]) -> float:
        full = vectors[0]
        for v in vectors[1:]:
            full = np.kron(full, v)
        return float(np.vdot(full, self.matrix @ full).real)

    def update(self, vectors: List[np.ndarray], k: int) -> float:
        """Replace party k by the top eigenvector of its conditional operator."""
        conditional = self.conditional(vectors, k)
        if self.field is Field.REAL:
            # Real v sees only the symmetric real part: <v|M|v> = v^T Re(M) v.
            conditional = conditional.real
            conditional = (conditional + conditional.T) / 2
        value, vector = top_eigenpair_array(conditional)
        vectors[k] = vector.astype(np.complex128)
        return value

    def random_start(self, rng: np.random.Generator) -> List[np.ndarray]:
        return [random_unit_vector(d, rng, self.field).astype(np.complex128) for d in self.dims]


def _run_restart(problem: _SeesawProblem, vectors: List[np.ndarray], config: OptimizerConfig):
    value = problem.objective(vectors)
    if not np.isfinite(value):
        raise NonFiniteError("Objective is not finite at the starting point")
    trace = [value]
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        for k in range(problem.n):
            new_value = problem.update(vectors, k)
        if not np.isfinite(new_value):
            raise NonFiniteError(f"Objective became {new_value} after {iterations} sweeps")
        trace.append(new_value)
        change = abs(new_value - value)
        value = new_value
        if change < config.objective_tolerance:
            converged = True
            break
    return value, vectors, iterations, converged, tuple(trace)


def _warm_vectors(warm: WarmStart, problem: _SeesawProblem) -> Optional[List[np.ndarray]]:
    if isinstance(warm, ProductAnsatz):
        arrays = [p.entries for p in warm.parties]
    else:
        arrays = [np.asarray(v) for v in warm]
    if tuple(a.shape[0] for a in arrays) != problem.dims:
        raise DimensionMismatchError(
            f"Warm start dims {tuple(a.shape[0] for a in arrays)} do not match parties {problem.dims}"
        )
    vectors = []
    for a in arrays:
        a = np.asarray(a, dtype=np.complex128)
        if problem.field is Field.REAL:
            if np.any(np.abs(a.imag) > 0):
                logger.info("Skipping complex warm start in real mode")
                return None
            a = a.real.astype(np.complex128)
        vectors.append(a / np.linalg.norm(a))
    return vectors


def seesaw_maximize(
    rho: OperatorLike,
    grouping: Optional[Sequence[Sequence[int]]] = None,
    config: Optional[OptimizerConfig] = None,
    warm_starts: Sequence[WarmStart] = (),
) -> GmeEstimate:
    """
    Maximize the product-state expectation of ``rho``.

    ``grouping`` declares the parties (see ProductAnsatz); by default each
    subsystem is its own party. Warm starts run first, followed by
    ``config.restarts`` random starts; random start r is seeded from
    (config.seed, r), so a run with more restarts contains every start of a run
    with fewer. Ties keep the lowest restart index.
    """
    config = config or OptimizerConfig()
    op = as_operator(rho)
    if grouping is not None:
        grouping = tuple(tuple(g) for g in grouping)
        op = as_operator(group_systems(op, grouping))
    problem = _SeesawProblem(op, config.field)
    upper_bound = float(spla.eigvalsh(op.entries)[-1])

    starts: List[List[np.ndarray]] = []
    for warm in warm_starts:
        vectors = _warm_vectors(warm, problem)
        if vectors is not None:
            starts.append(vectors)
    n_warm = len(starts)
    for r in range(config.restarts):
        rng = np.random.default_rng([config.seed, r])
        starts.append(problem.random_start(rng))

    best_value = -np.inf
    best_vectors: Optional[List[np.ndarray]] = None
    best_index = -1
    best_converged = False
    best_trace: Tuple[float, ...] = ()
    iterations: List[int] = []
    traces: List[Tuple[float, ...]] = []
    for index, vectors in enumerate(starts):
        value, vectors, n_iter, converged, trace = _run_restart(problem, vectors, config)
        iterations.append(n_iter)
        if config.record_traces:
            traces.append(trace)
        logger.debug(
            "restart %d (%s): value %.15f after %d sweeps, converged=%s",
            index, "warm" if index < n_warm else "random", value, n_iter, converged,
        )
        if value > best_value:
            best_value, best_vectors, best_index = value, vectors, index
            best_converged, best_trace = converged, trace

    best_ansatz = ProductAnsatz.from_arrays(best_vectors, grouping, config.field)
    if best_value > upper_bound + 1e-9:
        logger.warning("Best value %.15f exceeds the spectral bound %.15f", best_value, upper_bound)
    return GmeEstimate(
        best_value=float(best_value),
        best_ansatz=best_ansatz,
        upper_bound=upper_bound,
        restarts_used=len(starts),
        iterations_per_restart=tuple(iterations),
        converged=best_converged,
        best_restart=best_index,
        objective_trace=best_trace,
        traces=tuple(traces),
    )


def conditional_operator(rho: OperatorLike, ansatz: ProductAnsatz, party: int) -> HermitianOperator:
    """Operator M on ``party`` with <v|M|v> equal to the objective with that party set to v."""
    op = as_operator(rho)
    if ansatz.grouping is not None:
        op = as_operator(group_systems(op, ansatz.grouping))
    if ansatz.dims != op.subsystem_dims:
        raise DimensionMismatchError(f"Ansatz dims {ansatz.dims} do not match operator dims {op.subsystem_dims}")
    if not 0 <= party < len(ansatz.parties):
        raise SubsystemError(f"Party {party} out of range for {len(ansatz.parties)} parties")
    problem = _SeesawProblem(op, ansatz.field)
    vectors = [p.entries for p in ansatz.parties]
    return HermitianOperator(problem.conditional(vectors, party), (op.subsystem_dims[party],))


def two_copy_gme(
    rho: OperatorLike,
    sigma: OperatorLike,
    config: Optional[OptimizerConfig] = None,
    warm_starts: Sequence[WarmStart] = (),
) -> GmeEstimate:
    """
    Seesaw on rho^{AB} x sigma^{A'B'} with parties AA' and BB'.

    The single-copy estimates of rho and sigma are computed with the same
    config and returned as ``components``; their maximizers combined form the
    first warm start, so the result is never below their product. When the
    local dimensions match, Phi+ on AA' and on BB' is tried as well.
    """
    config = config or OptimizerConfig.two_copy()
    op_rho, op_sigma = as_operator(rho), as_operator(sigma)
    if len(op_rho.subsystem_dims) != 2 or len(op_sigma.subsystem_dims) != 2:
        raise DimensionMismatchError("two_copy_gme needs two bipartite operators")

    single_rho = seesaw_maximize(rho, config=config)
    single_sigma = single_rho if sigma is rho else seesaw_maximize(sigma, config=config)

    a_rho, b_rho = (p.entries for p in single_rho.best_ansatz.parties)
    a_sigma, b_sigma = (p.entries for p in single_sigma.best_ansatz.parties)
    starts: List[WarmStart] = [[np.kron(a_rho, a_sigma), np.kron(b_rho, b_sigma)]]

    (d_a, d_b), (d_a2, d_b2) = op_rho.subsystem_dims, op_sigma.subsystem_dims
    if d_a == d_a2 and d_b == d_b2 and min(d_a, d_b) >= 2:
        starts.append([phi_plus_vector(d_a), phi_plus_vector(d_b)])
    starts.extend(warm_starts)

    joint = kron(rho, sigma)
    result = seesaw_maximize(joint, TWO_COPY_GROUPING, config, warm_starts=starts)
    return dataclasses.replace(result, components=(single_rho, single_sigma))


def gradient_check(
    rho: OperatorLike,
    ansatz: ProductAnsatz,
    seed: int = 0,
    tangents: int = 20,
    step: float = 1e-5,
) -> float:
    """
    Worst deviation between the analytic directional derivative
    2 Re<t|M|v> and a central finite difference along the sphere, over random
    tangents t (real tangents for real ansatzes). Deviations are relative to
    max(1, |derivative|).
    """
    op = as_operator(rho)
    if ansatz.grouping is not None:
        op = as_operator(group_systems(op, ansatz.grouping))
    if ansatz.dims != op.subsystem_dims:
        raise DimensionMismatchError(f"Ansatz dims {ansatz.dims} do not match operator dims {op.subsystem_dims}")
    problem = _SeesawProblem(op, ansatz.field)
    rng = np.random.default_rng(seed)
    vectors = [p.entries.copy() for p in ansatz.parties]

    worst = 0.0
    for _ in range(tangents):
        k = int(rng.integers(problem.n))
        v = vectors[k]
        t = random_unit_vector(problem.dims[k], rng, ansatz.field).astype(np.complex128)
        t = t - np.real(np.vdot(v, t)) * v
        t = t / np.linalg.norm(t)

        analytic = 2 * np.real(np.vdot(t, problem.conditional(vectors, k) @ v))

        def along(h: float) -> float:
            moved = list(vectors)
            w = v + h * t
            moved[k] = w / np.linalg.norm(w)
            return problem.objective(moved)

        numeric = (along(step) - along(-step)) / (2 * step)
        worst = max(worst, abs(analytic - numeric) / max(1.0, abs(analytic)))
    return worst
