"""Command-line entry point.

Exit codes: 0 success, 1 dataset failed to parse or validate, 2 configuration
error, 3 internal solver failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from .analysis import build_report
from .dataset import DatasetError, load_dataset, parse_header, validate_dataset
from .kam_core import (
    ConfigurationError,
    DeltaMode,
    DeltaRule,
    EpsilonPolicy,
    KamConfig,
    KamError,
    WeightMode,
    WeightPolicy,
    evaluate,
)
from .output import render_svg_chart, report_to_csv, report_to_json

log = logging.getLogger("kamdea")

EXIT_OK = 0
EXIT_INVALID_DATA = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kamdea",
        description="Score, classify and rank DMUs with the Kourosh and Arash Method (VRS).",
    )
    ap.add_argument("input", help="dataset CSV (header: dmu,I:<input>...,O:<output>...)")
    ap.add_argument("--epsilon-mode", choices=["absolute", "proportional"], default="proportional")
    ap.add_argument("--epsilon", type=float, help="scale for proportional mode (eps_j = scale * datum)")
    ap.add_argument("--epsilon-in", help="absolute input epsilons, comma separated (one value broadcasts)")
    ap.add_argument("--epsilon-out", help="absolute output epsilons, comma separated (one value broadcasts)")
    ap.add_argument("--weights", choices=["unit", "inverse", "file"], default="unit")
    ap.add_argument("--weight-file", help="CSV with the dataset's I:/O: header and one row of weights")
    ap.add_argument("--delta-rule", choices=["tenth", "per-factor", "explicit"], default="tenth")
    ap.add_argument("--delta", type=float, help="threshold for --delta-rule explicit")
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    ap.add_argument("--output", help="report path (default: standard output)")
    ap.add_argument("--chart", help="write a sorted score bar chart (SVG) here")
    ap.add_argument("--tech-tol", type=float, default=1e-7, help="0-KAM objective threshold")
    ap.add_argument("--score-tol", type=float, default=1e-9, help="score comparison tolerance")
    return ap


def _vector(text: str | None, size: int, flag: str) -> np.ndarray:
    if text is None:
        return np.zeros(size)
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise ConfigurationError(f"{flag}: cannot parse {text!r}") from None
    if len(vals) == 1:
        vals = vals * size
    if len(vals) != size:
        raise ConfigurationError(f"{flag}: expected {size} values, got {len(vals)}")
    return np.array(vals)


def read_weight_file(path, dataset) -> tuple[np.ndarray, np.ndarray]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise ConfigurationError(f"{path}: expected a header and exactly one row of weights")
    try:
        in_cols, in_names, out_cols, out_names = parse_header(lines[0])
    except DatasetError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    cells = lines[1].split(",")
    if len(cells) != 1 + len(in_cols) + len(out_cols):
        raise ConfigurationError(f"{path}: weight row has {len(cells)} cells")

    def pick(cols, names, wanted, label):
        lookup = dict(zip(names, cols))
        missing = [w for w in wanted if w not in lookup]
        extra = [nm for nm in names if nm not in wanted]
        if missing or extra:
            raise ConfigurationError(
                f"{path}: {label} weights do not match dataset factors "
                f"(missing {missing}, unknown {extra})"
            )
        out = []
        for w in wanted:
            try:
                out.append(float(cells[lookup[w]]))
            except ValueError:
                raise ConfigurationError(f"{path}: weight for {label} {w!r} is not a number") from None
        return np.array(out)

    return (
        pick(in_cols, in_names, dataset.input_names, "input"),
        pick(out_cols, out_names, dataset.output_names, "output"),
    )


def config_from_args(args, dataset) -> KamConfig:
    if args.epsilon_mode == "proportional":
        if args.epsilon_in is not None or args.epsilon_out is not None:
            raise ConfigurationError("--epsilon-in/--epsilon-out require --epsilon-mode absolute")
        if args.epsilon is None:
            raise ConfigurationError("--epsilon-mode proportional requires --epsilon")
        eps = EpsilonPolicy.proportional(args.epsilon)
    else:
        if args.epsilon is not None:
            raise ConfigurationError("--epsilon applies to proportional mode; use --epsilon-in/--epsilon-out")
        eps = EpsilonPolicy.absolute_vectors(
            _vector(args.epsilon_in, dataset.m, "--epsilon-in"),
            _vector(args.epsilon_out, dataset.p, "--epsilon-out"),
        )

    if args.weights == "file":
        if args.weight_file is None:
            raise ConfigurationError("--weights file requires --weight-file")
        weights = WeightPolicy(WeightMode.EXPLICIT, read_weight_file(args.weight_file, dataset))
    else:
        if args.weight_file is not None:
            raise ConfigurationError("--weight-file requires --weights file")
        weights = WeightPolicy(WeightMode.UNIT if args.weights == "unit" else WeightMode.INVERSE_DATA)

    if (args.delta_rule == "explicit") != (args.delta is not None):
        raise ConfigurationError("--delta is required with, and only with, --delta-rule explicit")
    delta = DeltaRule(DeltaMode(args.delta_rule), args.delta)

    return KamConfig(eps, weights, delta, args.tech_tol, args.score_tol)


def _write(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def run(args: argparse.Namespace) -> int:
    try:
        dataset = load_dataset(args.input)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID_DATA
    except DatasetError as exc:
        code = f" [{exc.code.value}]" if exc.code else ""
        print(f"error: {args.input}{code}: {exc}", file=sys.stderr)
        return EXIT_INVALID_DATA

    issues = validate_dataset(dataset)
    if issues:
        for issue in issues:
            print(f"invalid [{issue.code.value}]: {issue.message}", file=sys.stderr)
        return EXIT_INVALID_DATA

    try:
        cfg = config_from_args(args, dataset)
        evaluations = []
        for l in range(dataset.n):
            evaluations.append(evaluate(dataset, l, cfg))
            log.info("evaluated %s (%d/%d)", dataset.dmu_names[l], l + 1, dataset.n)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KamError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    report = build_report(dataset, cfg, evaluations)
    for finding in report.adequacy:
        if not finding.passed:
            log.info(
                "sample-size rule %s (%s) not met: n=%d, threshold %d",
                finding.rule, finding.expression, finding.n, finding.threshold,
            )

    text = report_to_json(report) if args.format == "json" else report_to_csv(report)
    _write(args.output, text)
    if args.chart:
        _write(args.chart, render_svg_chart(report))
    return EXIT_OK


def _configure_logging():
    level = _LOG_LEVELS.get(os.environ.get("KAM_LOG", "error").strip().lower(), logging.ERROR)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
