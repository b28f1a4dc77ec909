"""
Shared plumbing for the management commands: argument parsing into domain
types, error conversion and output.

Arguments are taken as strings and parsed here so that a malformed value
ends in the same machine-readable error as any other domain failure.
"""
from __future__ import annotations

import json
import logging
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from representations.conf import limit
from representations.weights import HighestWeight

from .reporting import build_version, render_table, write_csv, write_json, write_json_report
from .services import DEFAULT_SAMPLES, ExperimentConfig, ExperimentResult, record_run, run_experiment

logger = logging.getLogger(__name__)

EXIT_REPORT_FAILED = 1
EXIT_INVALID = 2


def error_message(code: str, message: str) -> str:
    return json.dumps({"error": code, "message": message}, sort_keys=True)


def _parse_error(kind: str, text: str, exc: Exception) -> ValidationError:
    return ValidationError(f"Cannot parse {kind} {text!r}: {exc}", code="parse_error")


def parse_int(text: Any, kind: str = "integer") -> int:
    try:
        return int(str(text).strip())
    except ValueError as exc:
        raise _parse_error(kind, text, exc) from exc


def parse_float(text: Any, kind: str = "number") -> float:
    try:
        return float(str(text).strip())
    except ValueError as exc:
        raise _parse_error(kind, text, exc) from exc


def parse_int_list(text: str, kind: str = "integer list") -> Tuple[int, ...]:
    values = tuple(parse_int(chunk, kind) for chunk in str(text).split(",") if chunk.strip())
    if not values:
        raise ValidationError(f"Empty {kind}.", code="parse_error")
    return values


def parse_weight(text: str, d: Optional[int] = None) -> HighestWeight:
    weight = HighestWeight.parse(str(text))
    if d is not None and weight.d != d:
        raise ValidationError(f"Weight {weight} has {weight.d} entries, expected d={d}.", code="rank_mismatch")
    return weight


def parse_moments(values: Optional[Sequence[str]]) -> Optional[Tuple[Tuple[int, ...], ...]]:
    """["1", "2,1"] -> ((1,), (2, 1)); each entry names one product of power sums."""
    if not values:
        return None
    return tuple(parse_int_list(value, "moment index list") for value in values)


def parse_spins(text: str) -> Tuple[Fraction, ...]:
    spins = []
    for chunk in str(text).split(","):
        try:
            spins.append(Fraction(chunk.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise _parse_error("spin", chunk, exc) from exc
    return tuple(spins)


class LimitlabCommand(BaseCommand):
    """Turns ValidationError into a JSON CommandError with exit status 2."""

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except ValidationError as exc:
            code = getattr(exc, "code", None) or "invalid"
            logger.debug("Command failed with %s: %s", code, exc.messages)
            raise CommandError(error_message(code, " ".join(exc.messages)), returncode=EXIT_INVALID) from exc

    def run(self, **options) -> None:
        raise NotImplementedError


class ExactCommand(LimitlabCommand):
    """Deterministic decomposition commands: a table on stdout, optionally a JSON file."""

    def add_arguments(self, parser):
        parser.add_argument("--d", dest="d", help="Rank of the unitary group.")
        parser.add_argument("--json-report", dest="json_report", help="Write the rows as JSON to this path.")

    def rank(self, options) -> Optional[int]:
        return parse_int(options["d"], "rank") if options.get("d") is not None else None

    def emit(self, rows: List[Dict[str, str]], options, **extra: Any) -> None:
        self.stdout.write(render_table(pd.DataFrame(rows)))
        if options.get("json_report"):
            payload = {
                "schema_version": limit("REPORT_SCHEMA_VERSION"),
                "command": self.name,
                "build": build_version(),
                **extra,
                "rows": rows,
            }
            write_json(options["json_report"], payload)

    @property
    def name(self) -> str:
        return self.__module__.rsplit(".", 1)[-1]


class ExperimentCommand(LimitlabCommand):
    """Stochastic experiments: spectra CSV, report JSON, exit status 1 when a row fails."""

    subcommand: str = ""

    def add_arguments(self, parser):
        parser.add_argument("--seed", help="Root seed (64-bit unsigned). Required.")
        parser.add_argument("--samples", default=str(DEFAULT_SAMPLES), help="Number of Monte Carlo samples.")
        parser.add_argument("--out", help="CSV path for the sample-level data.")
        parser.add_argument("--json-report", dest="json_report", help="JSON path for the comparison report.")
        parser.add_argument("--tolerance", help="Absolute tolerance override for moment rows.")
        parser.add_argument("--rel-tolerance", dest="rel_tolerance", help="Relative tolerance override.")
        parser.add_argument("--w1-tolerance", dest="w1_tolerance", help="Tolerance override for W1 rows.")
        parser.add_argument(
            "--moments",
            nargs="+",
            help="Power-sum products to compare, e.g. --moments 1 2 1,1 2,1.",
        )
        parser.add_argument("--record", action="store_true", help="Store the run and its rows in the database.")
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser) -> None:
        pass

    def config_fields(self, options) -> Dict[str, Any]:
        raise NotImplementedError

    def build_config(self, options) -> ExperimentConfig:
        fields: Dict[str, Any] = {
            "subcommand": self.subcommand,
            "seed": parse_int(options["seed"], "seed") if options.get("seed") is not None else None,
            "samples": parse_int(options["samples"], "sample count"),
        }
        for option, name in (("tolerance", "abs_tol"), ("rel_tolerance", "rel_tol"), ("w1_tolerance", "w1_tol")):
            if options.get(option) is not None:
                fields[name] = parse_float(options[option], option.replace("_", "-"))
        moments = parse_moments(options.get("moments"))
        if moments:
            fields["moments"] = moments
        fields.update(self.config_fields(options))
        return ExperimentConfig(**fields).validate()

    def run(self, **options) -> None:
        config = self.build_config(options)
        result = run_experiment(config)
        self.write_outputs(result, options)
        if not result.passed:
            failures = result.report.failures()
            raise CommandError(
                error_message("report_failed", f"{len(failures)} row(s) failed: " + "; ".join(row.label for row in failures)),
                returncode=EXIT_REPORT_FAILED,
            )

    def write_outputs(self, result: ExperimentResult, options) -> None:
        if options.get("out"):
            write_csv(options["out"], result.samples)
        if options.get("json_report"):
            write_json_report(options["json_report"], result)
        self.stdout.write(render_table(result.report.to_frame()))
        if options.get("record"):
            run = record_run(result, build=build_version())
            self.stdout.write(f"recorded run {run.pk}")
        status = "passed" if result.passed else "FAILED"
        self.stdout.write(f"{self.subcommand}: {status} ({len(result.report.rows)} rows, seed {result.config.seed})")
