"""
Command-line entry point: ``causal-bounds <command> [options]``.

Reports go to stdout, logs to stderr.
"""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Mapping, Optional, Sequence

from . import classical, quantum
from .bounds import full_report, printed_rows_report
from .constants import (
    DEFAULT_SEED,
    DEFAULT_TOL,
    SEED_ENV_VAR,
    ExitCode,
    OutputFormat,
)
from .epr import PolarizerAngles, scan_max_violation, scan_rows
from .exceptions import CausalBoundsError, InvalidDistribution, ParseError, UsageError
from .renderers import (
    render_bounds,
    render_csv,
    render_json,
    render_reproduction,
    render_scan,
    render_verification,
)
from .reproduce import reproduce, reproduce_chsh
from .trial import (
    ObservedDistribution,
    estimate,
    read_records_csv,
    sample_distribution,
    validate,
    write_records_csv,
)
from .verify import run_verification

logger = logging.getLogger(__name__)

INPUT_CSV = "csv"
INPUT_JSON = "json"


class ArgumentParser(argparse.ArgumentParser):
    """Raise instead of exiting so that usage errors map to exit code 1."""

    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    command: str
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    output: str = OutputFormat.table
    verbose: bool = False
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_namespace(
        cls, namespace: argparse.Namespace, environ: Mapping[str, str]
    ) -> "CliConfig":
        values = vars(namespace).copy()
        command = values.pop("command")
        seed = values.pop("seed", None)
        if seed is None:
            seed = _env_seed(environ)
        tol = values.pop("tol", DEFAULT_TOL)
        if not tol > 0:
            raise UsageError(f"--tol must be positive, got {tol}")
        return cls(
            command=command,
            seed=seed,
            tol=tol,
            output=values.pop("output", OutputFormat.table),
            verbose=values.pop("verbose", False),
            options=values,
        )

    def echo(self) -> Dict[str, Any]:
        return {"seed": self.seed, "tol": self.tol}


def _env_seed(environ: Mapping[str, str]) -> int:
    raw = environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise ValueError(f"expected a positive integer, got {text}")
    return value


def _dims(text: str):
    parts = [int(p) for p in text.split(",")]
    if len(parts) != 2 or min(parts) < 2:
        raise ValueError(f"expected dA,dB with both at least 2, got {text}")
    return tuple(parts)


# argparse reports the function name in its error message
_positive_int.__name__ = "positive integer"
_dims.__name__ = "dims"


def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--seed", type=int, default=default(None), help="random seed")
    parser.add_argument("--tol", type=float, default=default(DEFAULT_TOL))
    parser.add_argument(
        "--output", choices=OutputFormat.choices, default=default(OutputFormat.table)
    )
    parser.add_argument(
        "--verbose", "-v", action="store_true", default=default(False)
    )


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="causal-bounds",
        description="Bounds on the average causal effect under noncompliance.",
    )
    _add_common(parser, suppress=False)
    subparsers = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    subparsers.required = True

    bounds = subparsers.add_parser("bounds", help="bound report for observed data")
    bounds.add_argument("--input", required=True, help="CSV records or JSON distribution, - for stdin")
    bounds.add_argument("--format", choices=(INPUT_CSV, INPUT_JSON), default=None)
    bounds.add_argument("--true-ace", type=float, default=None)
    bounds.add_argument("--printed-rows", action="store_true", default=False)

    repro = subparsers.add_parser("reproduce", help="rebuild the EPR fake-effect construction")
    repro.add_argument("--angles", type=PolarizerAngles.parse, default=None)
    repro.add_argument("--chsh", action="store_true", default=False)

    verify = subparsers.add_parser("verify", help="randomized check of the bound theorems")
    verify.add_argument("--samples", type=_positive_int, default=1000)
    verify.add_argument("--dims", type=_dims, default=(2, 2))

    simulate = subparsers.add_parser("simulate", help="sample trial records from a model")
    simulate.add_argument("--input", required=True, help="classical or quantum model JSON, - for stdin")
    simulate.add_argument("--n", type=int, default=1000)

    scan = subparsers.add_parser("scan", help="grid search over polarizer angles")
    scan.add_argument("--step", type=float, default=22.5)
    scan.add_argument("--all", action="store_true", default=False, help="emit every grid point")

    for sub in (bounds, repro, verify, simulate, scan):
        _add_common(sub, suppress=True)
    return parser


def _decode(data: bytes, path: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        line = data.count(b"\n", 0, e.start) + 1
        raise ParseError(line, f"{path} is not valid UTF-8")


def _read_text(path: str) -> str:
    if path == "-":
        stream = getattr(sys.stdin, "buffer", None)
        return sys.stdin.read() if stream is None else _decode(stream.read(), "stdin")
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    return _decode(data, path)


def load_distribution(path: str, input_format: Optional[str] = None) -> ObservedDistribution:
    if input_format is None:
        input_format = INPUT_CSV if path.lower().endswith(".csv") else INPUT_JSON
    text = _read_text(path)
    if input_format == INPUT_CSV:
        return estimate(read_records_csv(text))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, e.msg)
    return ObservedDistribution.from_dict(data)


def cmd_bounds(config: CliConfig) -> int:
    options = config.options
    dist = load_distribution(options["input"], options["format"])
    problems = validate(dist, config.tol)
    if problems:
        raise InvalidDistribution("; ".join(problems))

    report = full_report(dist, true_ace=options["true_ace"], tol=config.tol)
    data = dict(config.echo(), **report.to_dict())
    if options["printed_rows"]:
        data["printed_rows"] = printed_rows_report(dist, config.tol)

    if config.output == OutputFormat.json:
        _write(render_json(data))
    elif config.output == OutputFormat.csv:
        rows = [("natural", "lower", 0, report.natural_lower), ("natural", "upper", 0, report.natural_upper)]
        rows += [("instrumental", "lower", i, v) for i, v in enumerate(report.inst_lower, 1)]
        rows += [("instrumental", "upper", i, v) for i, v in enumerate(report.inst_upper, 1)]
        rows += [("lp", "lower", 0, report.lp_lower), ("lp", "upper", 0, report.lp_upper)]
        _write(render_csv(("kind", "side", "index", "value"), rows))
    else:
        _write(render_bounds(data))

    return ExitCode.VIOLATION if report.violations else ExitCode.OK


def cmd_reproduce(config: CliConfig) -> int:
    angles = config.options["angles"]
    run = reproduce_chsh if config.options["chsh"] else reproduce
    report = run(angles, tol=config.tol)
    data = dict(config.echo(), **report.to_dict())

    if config.output == OutputFormat.json:
        _write(render_json(data))
    elif config.output == OutputFormat.csv:
        _write(
            render_csv(
                ("name", "value", "target", "kind", "passed"),
                [(c.name, c.value, c.target, c.kind, c.passed) for c in report.checks],
            )
        )
    else:
        _write(render_reproduction(data))

    for check in report.mismatches:
        logger.warning("mismatch: %s = %r, target %r", check.name, check.value, check.target)
    return ExitCode.OK if report.ok else ExitCode.MISMATCH


def cmd_verify(config: CliConfig) -> int:
    summary = run_verification(
        config.options["samples"], config.seed, config.options["dims"], config.tol
    )
    data = dict(config.echo(), **summary.to_dict())

    if config.output == OutputFormat.json:
        _write(render_json(data))
    elif config.output == OutputFormat.csv:
        _write(
            render_csv(
                ("name", "passed", "failed", "worst_margin", "asserted"),
                [
                    (t.name, t.passed, t.failed, t.worst_margin, t.asserted)
                    for t in summary.tallies.values()
                ],
            )
        )
    else:
        _write(render_verification(data))
    return ExitCode.OK if summary.ok else ExitCode.VIOLATION


def load_model_distribution(path: str, tol: float) -> ObservedDistribution:
    """
    Observed distribution of a classical (``q`` key) or quantum (``rho`` key)
    model file.
    """
    text = _read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, e.msg)
    if not isinstance(data, dict):
        raise ParseError(1, "model file must hold a JSON object")
    if "q" in data:
        return classical.forward(classical.CanonicalModel.from_dict(data))
    if "rho" in data:
        model = quantum.QuantumLatentModel.from_dict(data)
        return quantum.observed_distribution(model, float(data.get("pz", 0.5)), tol)
    raise ParseError(1, "model file has neither 'q' (classical) nor 'rho' (quantum)")


def cmd_simulate(config: CliConfig) -> int:
    n = config.options["n"]
    if n < 1:
        raise UsageError(f"--n must be at least 1, got {n}")
    dist = load_model_distribution(config.options["input"], config.tol)
    records = sample_distribution(dist, n, config.seed)
    logger.debug("sampled %d records with seed %d", n, config.seed)

    if config.output == OutputFormat.json:
        data = dict(config.echo(), n=n, records=[list(r) for r in records])
        _write(render_json(data))
    else:
        write_records_csv(records, sys.stdout)
    return ExitCode.OK


def cmd_scan(config: CliConfig) -> int:
    step = config.options["step"]
    if not 0 < step <= 45:
        raise UsageError(f"--step must be in (0, 45], got {step}")
    header = ("alpha0", "alpha1", "beta0", "beta1", "violation")

    if config.options["all"]:
        rows = (tuple(angles) + (value,) for angles, value in scan_rows(step))
        _write(render_csv(header, rows))
        return ExitCode.OK

    result = scan_max_violation(step)
    data = dict(
        config.echo(),
        step=step,
        angles=result.angles._asdict(),
        violation=result.violation,
    )
    if config.output == OutputFormat.json:
        _write(render_json(data))
    elif config.output == OutputFormat.csv:
        _write(render_csv(header, [tuple(result.angles) + (result.violation,)]))
    else:
        _write(render_scan(data))
    return ExitCode.OK


COMMANDS: Dict[str, Callable[[CliConfig], int]] = {
    "bounds": cmd_bounds,
    "reproduce": cmd_reproduce,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "scan": cmd_scan,
}


def _write(text: str) -> None:
    sys.stdout.write(text)


def main(argv: Optional[Sequence[str]] = None, environ: Optional[Mapping[str, str]] = None) -> int:
    environ = os.environ if environ is None else environ
    try:
        namespace = build_parser().parse_args(argv)
        config = CliConfig.from_namespace(namespace, environ)
    except UsageError as e:
        sys.stderr.write(f"causal-bounds: error: {e}\n")
        return ExitCode.USAGE

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if config.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return int(COMMANDS[config.command](config))
    except (UsageError, ParseError) as e:
        sys.stderr.write(f"causal-bounds: error: {e}\n")
        return ExitCode.USAGE
    except CausalBoundsError as e:
        sys.stderr.write(f"causal-bounds: invalid input: {e}\n")
        return ExitCode.INVALID
    except ValueError as e:
        # model constructors reject bad numbers with plain ValueError too
        sys.stderr.write(f"causal-bounds: invalid input: {e}\n")
        return ExitCode.INVALID

