#!/usr/bin/env python3
"""
Two-copy multiplicativity experiments.

Grid scans over the omega and tau families compare the analytic single-copy
GME, squared, with a numerical two-copy estimate. A point is flagged when the
two-copy value beats the square by more than the relative threshold (and an
absolute floor). Flags are witnessed by the stored two-copy ansatz; unflagged
points mean "no violation found at this budget", never a certificate.

Also here: the separable-state multiplicativity harness and the real two-qubit
counterexample check.
"""

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from analytic_gme import GmeValue, gme_omega, gme_omega_real, gme_tau
from dense_hermitian import (
    DensityMatrix,
    Field,
    OperatorLike,
    ProductAnsatz,
    kron,
    product_expectation,
    random_density_matrix,
)
from gme_config import default_workers, get_config, tolerances
from gme_errors import GmeError, InvalidParameterError
from seesaw_optimizer import TWO_COPY_GROUPING, GmeEstimate, OptimizerConfig, seesaw_maximize, two_copy_gme
from state_families import (
    OmegaParams,
    TauParams,
    is_omega_separable,
    omega_state,
    random_separable_state,
    real_two_qubit_example,
    singlet_vector,
    tau_state,
)

logger = logging.getLogger(__name__)

FAMILIES = ("omega", "tau")

REAL_EXAMPLE_LOCAL = 5 / 16
REAL_EXAMPLE_WITNESS = 13 / 128
REAL_EXAMPLE_GAP = 1 / 256


@dataclasses.dataclass(frozen=True, eq=False)
class ScanRecord:
    x: float
    y: float
    mode: str
    local_gme: float
    local_gme_squared: float
    two_copy_gme: float
    gap: float
    violation: bool
    separable: Optional[bool]
    branch: str
    converged: bool
    family: str = "omega"
    d: int = 3
    witness: Optional[ProductAnsatz] = None
    error: Optional[str] = None


@dataclasses.dataclass(frozen=True)
class ScanConfig:
    family: str = "omega"
    step: float = dataclasses.field(default_factory=lambda: get_config().scan.step)
    field: Field = Field.COMPLEX
    local_field: Optional[Field] = None
    threshold: float = dataclasses.field(default_factory=lambda: get_config().scan.threshold)
    optimizer: OptimizerConfig = dataclasses.field(default_factory=OptimizerConfig.two_copy)
    d: int = dataclasses.field(default_factory=lambda: get_config().scan.d)
    seed: int = dataclasses.field(default_factory=lambda: get_config().optimizer.seed)
    workers: int = dataclasses.field(default_factory=default_workers)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"Unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.threshold <= 0:
            raise InvalidParameterError("threshold must be positive")
        if self.family == "tau" and self.d != 3:
            raise InvalidParameterError("tau scans are parametrized for d = 3 only")
        object.__setattr__(self, "field", Field(self.field))
        local = self.field if self.local_field is None else Field(self.local_field)
        object.__setattr__(self, "local_field", local)
        grid_points(self.step)

    @property
    def mode(self) -> str:
        if self.local_field is Field.COMPLEX and self.field is Field.REAL:
            return "mixed"
        return self.field.value

    def to_dict(self) -> Dict:
        return {
            "family": self.family,
            "step": self.step,
            "mode": self.mode,
            "threshold": self.threshold,
            "d": self.d,
            "seed": self.seed,
            "restarts": self.optimizer.restarts,
            "max_iterations": self.optimizer.max_iterations,
            "objective_tolerance": self.optimizer.objective_tolerance,
        }


def grid_points(step: float) -> List[Tuple[int, int, float, float]]:
    """(i, j, x, y) with x = i/n, y = j/n over the simplex x, y >= 0, x + y <= 1."""
    if step <= 0 or step > 1:
        raise InvalidParameterError(f"Grid step must lie in (0, 1], got {step}")
    n = int(round(1 / step))
    if abs(n * step - 1) > 1e-9:
        raise InvalidParameterError(f"Grid step {step} does not divide 1 into an integer grid")
    return [(i, j, i / n, j / n) for i in range(n + 1) for j in range(n + 1 - i)]


def point_seed(seed: int, i: int, j: int) -> int:
    """Deterministic per-point optimizer seed."""
    return int(np.random.SeedSequence([seed, i, j]).generate_state(1, dtype=np.uint32)[0])


def family_state(family: str, x: float, y: float, d: int = 3) -> DensityMatrix:
    if family == "omega":
        return omega_state(OmegaParams(x, y, d))
    if family == "tau":
        return tau_state(TauParams.from_xy(x, y))
    raise InvalidParameterError(f"Unknown family {family!r}")


def local_gme(family: str, x: float, y: float, d: int, field: Field) -> GmeValue:
    """Analytic single-copy value matching the optimization field."""
    if family == "omega":
        return gme_omega_real(x, y, d) if Field(field) is Field.REAL else gme_omega(x, y, d)
    if family == "tau":
        # The maximizing |i>|j> is real, so both fields agree.
        return gme_tau(TauParams.from_xy(x, y))
    raise InvalidParameterError(f"Unknown family {family!r}")


def is_violation(gap: float, local_squared: float, threshold: float, floor: Optional[float] = None) -> bool:
    floor = tolerances().violation_floor if floor is None else floor
    return bool(gap > floor and gap > threshold * local_squared)


def _hint_warm_start(hint: Optional[ProductAnsatz]) -> List[List[np.ndarray]]:
    if hint is None:
        return []
    alpha, beta = (p.entries for p in hint.parties)
    return [[np.kron(alpha, alpha), np.kron(beta, beta)]]


def evaluate_point(config: ScanConfig, i: int, j: int, x: float, y: float) -> ScanRecord:
    separable = None
    if config.family == "omega" and config.d == 3:
        separable = is_omega_separable(OmegaParams(x, y, 3))
    try:
        state = family_state(config.family, x, y, config.d)
        local = local_gme(config.family, x, y, config.d, config.local_field)
        optimizer = config.optimizer.replace(seed=point_seed(config.seed, i, j), field=config.field)
        estimate = two_copy_gme(state, state, optimizer, warm_starts=_hint_warm_start(local.maximizer_hint))
    except (GmeError, np.linalg.LinAlgError) as e:
        logger.warning("Point (%.4f, %.4f) failed: %s", x, y, e)
        return ScanRecord(
            x=x, y=y, mode=config.mode, local_gme=float("nan"), local_gme_squared=float("nan"),
            two_copy_gme=float("nan"), gap=float("nan"), violation=False, separable=separable,
            branch="", converged=False, family=config.family, d=config.d, error=str(e),
        )

    local_squared = local.value ** 2
    gap = estimate.best_value - local_squared
    if not estimate.converged:
        logger.warning("Point (%.4f, %.4f) did not converge", x, y)
    return ScanRecord(
        x=x,
        y=y,
        mode=config.mode,
        local_gme=local.value,
        local_gme_squared=local_squared,
        two_copy_gme=estimate.best_value,
        gap=gap,
        violation=is_violation(gap, local_squared, config.threshold),
        separable=separable,
        branch=local.branch,
        converged=estimate.converged,
        family=config.family,
        d=config.d,
        witness=estimate.best_ansatz,
    )


def _evaluate_task(args) -> ScanRecord:
    return evaluate_point(*args)


def iter_scan(config: ScanConfig, progress: bool = False) -> Iterator[ScanRecord]:
    """Yield records as points finish; order depends on scheduling when workers > 1."""
    tasks = [(config, i, j, x, y) for i, j, x, y in grid_points(config.step)]
    logger.info("Scanning %d %s points in %s mode with %d worker(s)", len(tasks), config.family, config.mode, config.workers)
    with tqdm(total=len(tasks), desc=f"{config.family} {config.mode}", disable=not progress) as bar:
        if config.workers <= 1:
            for task in tasks:
                yield _evaluate_task(task)
                bar.update(1)
            return
        pool = ProcessPoolExecutor(max_workers=config.workers)
        try:
            futures = [pool.submit(_evaluate_task, task) for task in tasks]
            for future in as_completed(futures):
                yield future.result()
                bar.update(1)
        finally:
            # Interrupted or abandoned scans drop pending points instead of draining the grid.
            pool.shutdown(wait=False, cancel_futures=True)


def sort_records(records: Sequence[ScanRecord]) -> List[ScanRecord]:
    return sorted(records, key=lambda r: (r.x, r.y))


def scan_family(config: ScanConfig, progress: bool = False) -> List[ScanRecord]:
    """One record per grid point, sorted by (x, y)."""
    return sort_records(list(iter_scan(config, progress)))


def mixed_mode_scan(config: ScanConfig, progress: bool = False) -> List[ScanRecord]:
    """
    Complex single-copy formula against a real two-copy optimization. Real
    ansatzes are feasible complex ansatzes, so every flag here is a sound
    witness of complex non-multiplicativity.
    """
    return scan_family(dataclasses.replace(config, field=Field.REAL, local_field=Field.COMPLEX), progress)


def biased_tau_line(p_values: Sequence[float], config: Optional[ScanConfig] = None) -> List[ScanRecord]:
    """Scan p/2 (Psi12 + Psi13) + (1 - p) Psi23, i.e. the tau points x = y = p/2."""
    config = config or ScanConfig(family="tau")
    if config.family != "tau":
        config = dataclasses.replace(config, family="tau")
    return [evaluate_point(config, k, k, p / 2, p / 2) for k, p in enumerate(p_values)]


def summarize(records: Sequence[ScanRecord]) -> Dict[str, int]:
    return {
        "points": len(records),
        "flagged": sum(r.violation for r in records),
        "separable": sum(bool(r.separable) for r in records),
        "separable_flagged": sum(bool(r.separable) and r.violation for r in records),
        "unconverged": sum(not r.converged for r in records),
        "errors": sum(r.error is not None for r in records),
    }


def witness_value(record: ScanRecord) -> float:
    """Re-evaluate a record's stored two-copy ansatz by direct expectation."""
    if record.witness is None:
        raise InvalidParameterError("Record has no witness")
    state = family_state(record.family, record.x, record.y, record.d)
    return product_expectation(kron(state, state), record.witness)


@dataclasses.dataclass(frozen=True, eq=False)
class PairReport:
    single_rho: GmeEstimate
    single_sigma: GmeEstimate
    two_copy: GmeEstimate

    @property
    def product(self) -> float:
        return self.single_rho.best_value * self.single_sigma.best_value

    @property
    def gap(self) -> float:
        return self.two_copy.best_value - self.product

    @property
    def deviation(self) -> float:
        return abs(self.gap)


def multiplicativity_gap(rho: OperatorLike, sigma: OperatorLike, config: Optional[OptimizerConfig] = None) -> PairReport:
    estimate = two_copy_gme(rho, sigma, config)
    single_rho, single_sigma = estimate.components
    return PairReport(single_rho, single_sigma, estimate)


@dataclasses.dataclass(frozen=True)
class SeparableReport:
    trials: int
    seed: int
    deviations: Tuple[float, ...]
    failures: Tuple[Tuple[int, float], ...]

    @property
    def max_deviation(self) -> float:
        return max(self.deviations) if self.deviations else 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_separable_multiplicativity(
    trials: int,
    seed: int,
    config: Optional[OptimizerConfig] = None,
    d: int = 3,
    progress: bool = False,
) -> SeparableReport:
    """
    Random fully separable rho against random sigma: the two-copy value must
    equal the product of single-copy values. Any trial beyond tolerance is a
    counterexample candidate, which for a proven identity points at the optimizer.
    """
    if trials < 1:
        raise InvalidParameterError("trials must be at least 1")
    config = config or OptimizerConfig.two_copy()
    tol = tolerances().separable_multiplicativity
    deviations = []
    failures = []
    for trial in tqdm(range(trials), desc="separable trials", disable=not progress):
        rng = np.random.default_rng([seed, trial])
        rho = random_separable_state(d, d, rng)
        sigma = random_density_matrix(d * d, rng, subsystem_dims=(d, d))
        report = multiplicativity_gap(rho, sigma, config.replace(seed=point_seed(seed, trial, 0)))
        deviations.append(report.deviation)
        if report.deviation > tol:
            logger.warning("Trial %d deviates by %.3e: counterexample candidate", trial, report.deviation)
            failures.append((trial, report.deviation))
    return SeparableReport(trials, seed, tuple(deviations), tuple(failures))


@dataclasses.dataclass(frozen=True, eq=False)
class RealCounterexampleReport:
    local_value: float
    complex_local_value: float
    two_copy: GmeEstimate
    witness_value: float

    @property
    def two_copy_value(self) -> float:
        return self.two_copy.best_value

    @property
    def gap(self) -> float:
        return self.two_copy_value - self.local_value ** 2

    @property
    def passed(self) -> bool:
        return (
            abs(self.local_value - REAL_EXAMPLE_LOCAL) <= 1e-9
            and self.two_copy_value >= REAL_EXAMPLE_WITNESS - 1e-9
            and self.gap >= REAL_EXAMPLE_GAP - 1e-8
            and abs(self.witness_value - REAL_EXAMPLE_WITNESS) <= tolerances().witness
        )


def real_counterexample_check(config: Optional[OptimizerConfig] = None) -> RealCounterexampleReport:
    """
    The separable real two-qubit state whose real GME is not multiplicative:
    single copy 5/16, two copies at least 13/128 via the singlet on AA' and BB'.
    """
    config = (config or OptimizerConfig.two_copy()).replace(field=Field.REAL)
    rho = real_two_qubit_example()
    singlet = singlet_vector(2, 0, 1).real
    local = seesaw_maximize(rho, config=config)
    complex_local = seesaw_maximize(rho, config=config.replace(field=Field.COMPLEX))
    two_copy = two_copy_gme(rho, rho, config, warm_starts=[[singlet, singlet]])
    witness = ProductAnsatz.from_arrays([singlet, singlet], TWO_COPY_GROUPING, Field.REAL)
    return RealCounterexampleReport(
        local_value=local.best_value,
        complex_local_value=complex_local.best_value,
        two_copy=two_copy,
        witness_value=product_expectation(kron(rho, rho), witness),
    )
