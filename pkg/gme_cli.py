#!/usr/bin/env python3
"""
Command-line front end.

    python gme_cli.py gme --family omega --x 0 --y 1
    python gme_cli.py gme --state werner:0.5 --mode real
    python gme_cli.py scan --family tau --step 0.025 -o tau.csv
    python gme_cli.py crossover --d-min 3 --d-max 15
    python gme_cli.py check-separable --trials 100 --seed 7
    python gme_cli.py channel-purity --channel pi-minus
    python gme_cli.py verify tau.csv
    python gme_cli.py line --p-min 0.9 --p-max 1 --p-steps 5

Exit codes: 0 pass, 1 contract failure, 2 invalid input, 130 interrupted.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from analytic_gme import (
    GmeValue,
    crossover_table,
    gme_omega,
    gme_omega_real,
    gme_tau,
)
from channel_duality import (
    ChoiOperator,
    gamma_infinity,
    kraus_to_choi,
    random_kraus_channel,
    read_choi_file,
)
from dense_hermitian import DensityMatrix, Field, antisym_projector, phi_plus_state
from gme_config import __version__, get_config, setup_logging, tolerances
from gme_errors import DualPathDisagreementError, GmeError, InvalidParameterError
from multiplicativity_lab import (
    ScanConfig,
    biased_tau_line,
    iter_scan,
    real_counterexample_check,
    sort_records,
    summarize,
    verify_separable_multiplicativity,
)
from scan_report import RunManifest, format_float, print_verification_results, verify_report, write_csv, write_json
from seesaw_optimizer import OptimizerConfig, seesaw_maximize
from state_families import (
    OmegaParams,
    TauParams,
    WernerParams,
    omega_state,
    phase_example_state,
    real_two_qubit_example,
    tau_state,
    werner_omega_params,
    werner_state,
)

logger = logging.getLogger("gme_cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_INTERRUPTED = 130

# (state, analytic value for the requested field or None, label)
Resolved = Tuple[DensityMatrix, Optional[GmeValue], str]


def _floats(text: str, count: Optional[int] = None) -> List[float]:
    try:
        values = [float(t) for t in text.split(",")]
    except ValueError as e:
        raise InvalidParameterError(f"Cannot parse numbers from {text!r}") from e
    if count is not None and len(values) != count:
        raise InvalidParameterError(f"Expected {count} comma-separated numbers, got {text!r}")
    return values


def _omega(x: float, y: float, d: int, field: Field) -> Resolved:
    params = OmegaParams(x, y, d)
    analytic = gme_omega_real(x, y, d) if field is Field.REAL else gme_omega(x, y, d)
    return omega_state(params), analytic, f"omega(x={x:g}, y={y:g}, d={d})"


def _tau(weights: Sequence[float], d: int) -> Resolved:
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    if len(weights) == 2 and d == 3:
        params = TauParams.from_xy(*weights)
    elif len(weights) == len(pairs):
        params = TauParams(dict(zip(pairs, weights)), d)
    else:
        raise InvalidParameterError(f"tau on d={d} takes {len(pairs)} pair weights, got {len(weights)}")
    return tau_state(params), gme_tau(params), f"tau({', '.join(f'{w:g}' for w in weights)})"


def _werner(lam: float, d: int, field: Field) -> Resolved:
    params = WernerParams(lam, d)
    analytic = None
    if d >= 3:
        omega = werner_omega_params(params)
        analytic = gme_omega_real(omega.x, omega.y, d) if field is Field.REAL else gme_omega(omega.x, omega.y, d)
    return werner_state(params), analytic, f"werner(lambda={lam:g}, d={d})"


def resolve_state(args) -> Resolved:
    field = Field(args.mode)
    d = args.d
    if args.state:
        name, _, value = args.state.partition(":")
        if name == "pi-minus":
            return _omega(0.0, 1.0, d, field)
        if name == "phi-plus":
            return _omega(0.0, 0.0, d, field)
        if name == "werner":
            return _werner(_floats(value, 1)[0], d, field)
        if name == "omega":
            x, y = _floats(value, 2)
            return _omega(x, y, d, field)
        if name == "tau":
            return _tau(_floats(value), 3)
        if name == "real-example":
            exact = 5 / 16 if field is Field.REAL else 7 / 16
            return real_two_qubit_example(), GmeValue(exact, "exact"), "real two-qubit example"
        if name == "phase-example":
            exact = 0.5 if field is Field.REAL else 1.0
            return phase_example_state(), GmeValue(exact, "exact"), "phase example"
        raise InvalidParameterError(f"Unknown state shortcut {args.state!r}")

    if args.family == "omega":
        if args.x is None or args.y is None:
            raise InvalidParameterError("omega needs --x and --y")
        return _omega(args.x, args.y, d, field)
    if args.family == "tau":
        if args.p is None:
            raise InvalidParameterError("tau needs --p")
        return _tau(_floats(args.p), d)
    if args.family == "werner":
        if args.lam is None:
            raise InvalidParameterError("werner needs --lam")
        return _werner(args.lam, d, field)
    raise InvalidParameterError("Give --family or --state")


def _optimizer(args, two_copy: bool = False, field: Field = Field.COMPLEX) -> OptimizerConfig:
    overrides = {"field": field}
    if getattr(args, "restarts", None) is not None:
        overrides["restarts"] = args.restarts
    if getattr(args, "max_iterations", None) is not None:
        overrides["max_iterations"] = args.max_iterations
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return OptimizerConfig.two_copy(**overrides) if two_copy else OptimizerConfig(**overrides)


def cmd_gme(args) -> int:
    state, analytic, label = resolve_state(args)
    estimate = seesaw_maximize(state, config=_optimizer(args, field=Field(args.mode)))
    print(f"State: {label} [{args.mode}]")
    if analytic is not None:
        print(f"  Analytic:    {format_float(analytic.value)} ({analytic.branch})")
    print(f"  Numeric:     {format_float(estimate.best_value)}")
    print(f"  Upper bound: {format_float(estimate.upper_bound)}")
    print(f"  Converged:   {estimate.converged} (best restart {estimate.best_restart} of {estimate.restarts_used})")
    for k, party in enumerate(estimate.best_ansatz.parties):
        print(f"  Party {k}: {np.array2string(party.entries, precision=6, suppress_small=True)}")
    if analytic is None:
        return EXIT_OK
    discrepancy = abs(analytic.value - estimate.best_value)
    print(f"  Discrepancy: {discrepancy:.3e}")
    return EXIT_OK if discrepancy <= tolerances().analytic_agreement else EXIT_FAILED


def _scan_config(args) -> ScanConfig:
    field = Field.REAL if args.mode in ("real", "mixed") else Field.COMPLEX
    local_field = Field.COMPLEX if args.mode == "mixed" else field
    kwargs = dict(
        family=args.family,
        field=field,
        local_field=local_field,
        optimizer=_optimizer(args, two_copy=True, field=field),
    )
    for name in ("step", "threshold", "d", "seed", "workers"):
        value = getattr(args, name)
        if value is not None:
            kwargs[name] = value
    return ScanConfig(**kwargs)


def _write(records, path: Path, manifest: RunManifest, fmt: str) -> None:
    if fmt == "json":
        write_json(records, path, manifest)
    else:
        write_csv(records, path, manifest)


def cmd_scan(args, argv: Sequence[str]) -> int:
    config = _scan_config(args)
    manifest = RunManifest.create(argv, config.seed, config.to_dict())
    output = Path(args.output or f"scan_{config.family}_{config.mode}.{args.format}")
    logger.info("Scan config: %s", config.to_dict())
    records = []
    try:
        for record in iter_scan(config, progress=args.progress):
            records.append(record)
    except KeyboardInterrupt:
        records = sort_records(records)
        _write(records, output, manifest.finish(truncated=True), args.format)
        print(f"Interrupted: wrote {len(records)} partial records to {output}")
        return EXIT_INTERRUPTED
    records = sort_records(records)
    _write(records, output, manifest.finish(), args.format)
    counts = summarize(records)
    print(
        f"{counts['points']} points, {counts['flagged']} flagged, "
        f"{counts['separable_flagged']} separable flagged, {counts['unconverged']} unconverged, "
        f"{counts['errors']} errors -> {output}"
    )
    return EXIT_OK


def cmd_crossover(args) -> int:
    rows = crossover_table(args.d_min, args.d_max)
    print(f"{'d':>3}  {'y* (bisection)':>16}  {'y* (closed form)':>16}  residual")
    for row in rows:
        print(f"{row.d:>3}  {format_float(row.y_bisection):>16}  {format_float(row.y_closed_form):>16}  {row.residual:.1e}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write("d,y_bisection,y_closed_form,residual\n")
            for row in rows:
                f.write(f"{row.d},{format_float(row.y_bisection)},{format_float(row.y_closed_form)},{row.residual:.3e}\n")
        print(f"Wrote {args.output}")
    return EXIT_OK


def cmd_check_separable(args) -> int:
    seed = args.seed if args.seed is not None else get_config().optimizer.seed
    report = verify_separable_multiplicativity(
        args.trials, seed, _optimizer(args, two_copy=True), d=args.d, progress=args.progress
    )
    print(f"Separable multiplicativity: {report.trials} trials, seed {seed}")
    print(f"  Max deviation: {report.max_deviation:.3e}")
    if report.failures:
        print(f"  FAILED trials ({len(report.failures)}):")
        for trial, deviation in report.failures:
            print(f"    trial {trial} (rng seed [{seed}, {trial}]): deviation {deviation:.3e}")
    else:
        print("  PASS")

    # Known real-field violation, reported for reference only.
    counter = real_counterexample_check(_optimizer(args, two_copy=True, field=Field.REAL))
    verdict = "VIOLATION" if counter.gap > tolerances().violation_floor else "no violation found"
    print("Real two-qubit example (real field):")
    print(f"  Single copy: {format_float(counter.local_value)} (complex {format_float(counter.complex_local_value)})")
    print(f"  Two copies:  {format_float(counter.two_copy_value)} (singlet witness {format_float(counter.witness_value)})")
    print(f"  Gap:         {format_float(counter.gap)} -> {verdict}")
    return EXIT_OK if report.passed else EXIT_FAILED


def _named_choi(name: str, d: int, rank: int, seed: int) -> ChoiOperator:
    if name == "identity":
        return ChoiOperator(phi_plus_state(d).op)
    if name == "pi-minus":
        return ChoiOperator(antisym_projector(d) * (2 / (d * (d - 1))))
    if name == "random":
        return kraus_to_choi(random_kraus_channel(d, d, rank, np.random.default_rng(seed)))
    raise InvalidParameterError(f"Unknown channel {name!r}")


def cmd_channel_purity(args) -> int:
    seed = args.seed if args.seed is not None else get_config().optimizer.seed
    choi = read_choi_file(args.choi) if args.choi else _named_choi(args.channel, args.d, args.kraus_rank, seed)
    try:
        report = gamma_infinity(choi, _optimizer(args))
    except DualPathDisagreementError as e:
        print(f"Dual paths disagree: {e}")
        return EXIT_FAILED
    print(f"Channel {choi.d_in} -> {choi.d_out}")
    print(f"  GME path:     {format_float(report.gme_path.best_value)}")
    print(f"  Channel path: {format_float(report.channel_value)}")
    print(f"  Agreement:    {report.agreement:.3e}")
    print(f"  gamma_inf:    {format_float(report.value)}")
    print(f"  Input state:  {np.array2string(report.channel_input, precision=6, suppress_small=True)}")
    print(f"  Output state: {np.array2string(report.channel_output, precision=6, suppress_small=True)}")
    return EXIT_OK if report.agreement <= tolerances().dual_path_error else EXIT_FAILED


def cmd_verify(args) -> int:
    results = verify_report(args.report)
    print_verification_results(results)
    return EXIT_OK if results["valid"] else EXIT_FAILED


def cmd_line(args, argv: Sequence[str]) -> int:
    if args.p:
        p_values = _floats(args.p)
    else:
        p_values = list(np.linspace(args.p_min, args.p_max, args.p_steps))
    config = _scan_config(args)
    records = biased_tau_line(p_values, config)
    print(f"{'p':>8}  {'local^2':>14}  {'two-copy':>14}  {'gap':>14}  flag")
    for p, record in zip(p_values, records):
        print(
            f"{p:>8.4f}  {format_float(record.local_gme_squared):>14}  {format_float(record.two_copy_gme):>14}  "
            f"{format_float(record.gap):>14}  {'VIOLATION' if record.violation else '-'}"
        )
    if args.output:
        manifest = RunManifest.create(argv, config.seed, config.to_dict()).finish()
        write_csv(records, args.output, manifest)
        print(f"Wrote {args.output}")
    return EXIT_OK


def _add_optimizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--restarts", type=int, help="Random restarts (default from config)")
    parser.add_argument("--max-iterations", type=int, help="Sweeps per restart (default from config)")
    parser.add_argument("--seed", type=int, help="Seed (default from config)")


def _add_scan_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=["complex", "real", "mixed"], default="complex")
    parser.add_argument("--threshold", type=float, help="Relative violation threshold")
    parser.add_argument("--workers", type=int, help="Worker processes (default GME_THREADS or 1)")
    parser.add_argument("--progress", action="store_true", help="Show a progress bar")
    parser.add_argument("-o", "--output", help="Output path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Geometric measure of entanglement of symmetric two-qudit families")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gme", help="Single-copy GME, analytic and numeric")
    p.add_argument("--family", choices=["omega", "tau", "werner"])
    p.add_argument("--state", help="pi-minus, phi-plus, werner:L, omega:X,Y, tau:P12,P13, real-example, phase-example")
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--p", help="Comma-separated singlet weights in pair order (12, 13, 23, ...)")
    p.add_argument("--lam", type=float, help="Werner parameter")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--mode", choices=["complex", "real"], default="complex")
    _add_optimizer_flags(p)

    p = sub.add_parser("scan", help="Two-copy multiplicativity scan over a family grid")
    p.add_argument("--family", choices=["omega", "tau"], default="omega")
    p.add_argument("--step", type=float, help="Grid step (default from config)")
    p.add_argument("--d", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_scan_flags(p)
    _add_optimizer_flags(p)

    p = sub.add_parser("crossover", help="Phi+ bound crossover y*(d) at x = 0")
    p.add_argument("--d-min", type=int, default=3)
    p.add_argument("--d-max", type=int, default=15)
    p.add_argument("-o", "--output", help="Optional CSV output")

    p = sub.add_parser("check-separable", help="Multiplicativity harness for separable states")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--progress", action="store_true")
    _add_optimizer_flags(p)

    p = sub.add_parser("channel-purity", help="Maximal output infinity-purity via both paths")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--choi", help="Choi file: first line 'dA dB', then rows of complex entries")
    source.add_argument("--channel", choices=["identity", "pi-minus", "random"])
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--kraus-rank", type=int, default=2)
    _add_optimizer_flags(p)

    p = sub.add_parser("verify", help="Re-check a scan report")
    p.add_argument("report")

    p = sub.add_parser("line", help="Biased tau line p/2 (Psi12 + Psi13) + (1 - p) Psi23")
    p.add_argument("--p", help="Comma-separated p values")
    p.add_argument("--p-min", type=float, default=0.9)
    p.add_argument("--p-max", type=float, default=1.0)
    p.add_argument("--p-steps", type=int, default=5)
    p.set_defaults(family="tau", step=None, d=None)
    _add_scan_flags(p)
    _add_optimizer_flags(p)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)
    full_argv = ["gme_cli.py"] + argv

    commands: dict = {
        "gme": cmd_gme,
        "scan": lambda a: cmd_scan(a, full_argv),
        "crossover": cmd_crossover,
        "check-separable": cmd_check_separable,
        "channel-purity": cmd_channel_purity,
        "verify": cmd_verify,
        "line": lambda a: cmd_line(a, full_argv),
    }
    handler: Callable = commands[args.command]
    try:
        return handler(args)
    except GmeError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
