"""Command line interface and report rendering.

Four subcommands share one plan input convention (--config PATH or
--builtin-case) and one output convention (--out json|csv|text, --output
PATH):

  optimize   run the evolution strategy
  oracle     run the grid-search oracle
  evaluate   price one explicit speed/feed assignment
  compare    published rows next to a fresh strategy run and the oracle

Reports carry no timestamps, so a repeated run with the same seed writes
byte-identical output.  Exit codes: 0 success, 2 usage or document error,
3 no feasible solution.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any

from . import case_study, es, milling, oracle

__all__ = ["main", "build_parser"]

_TABLE_FIELDS = ("method", "unit_cost", "unit_time", "profit_rate")

# list-valued report keys that expand to one numbered row per element
_ROW_NAMES = {
    "speeds": "speed",
    "feeds": "feed",
    "sigmas_final": "sigma_final",
    "lambda_trace": "lambda_trace",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="millopt",
        description="Profit-rate optimization of multi-tool milling parameters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    plan_parent = argparse.ArgumentParser(add_help=False)
    source = plan_parent.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", metavar="PATH", help="plan document (JSON)")
    source.add_argument(
        "--builtin-case", action="store_true", help="use the bundled five-operation case study"
    )
    plan_parent.add_argument(
        "--out", choices=("json", "csv", "text"), default="text", help="report format"
    )
    plan_parent.add_argument(
        "--output", metavar="PATH", help="write the report to PATH instead of stdout"
    )

    es_parent = argparse.ArgumentParser(add_help=False)
    es_parent.add_argument("--seed", type=int, default=None, help="random seed")
    es_parent.add_argument("--mu", type=int, default=None, help="parent population size")
    es_parent.add_argument(
        "--lambda", type=int, default=None, dest="eta", help="children per generation"
    )
    es_parent.add_argument(
        "--stall", type=int, default=None, help="generations without improvement before stopping"
    )
    es_parent.add_argument(
        "--alpha", type=float, default=None, help="step-size recombination mixing weight"
    )
    es_parent.add_argument("--sigma-init", type=float, default=None, help="initial step size")
    es_parent.add_argument(
        "--verbose", action="store_true", help="log best-so-far improvements to stderr"
    )

    grid_parent = argparse.ArgumentParser(add_help=False)
    grid_parent.add_argument(
        "--grid-resolution", type=int, default=None, help="oracle grid points per axis"
    )

    sub.add_parser(
        "optimize", parents=[plan_parent, es_parent], help="run the evolution strategy"
    )
    sub.add_parser("oracle", parents=[plan_parent, grid_parent], help="run the grid oracle")
    evaluate = sub.add_parser(
        "evaluate", parents=[plan_parent], help="price one explicit assignment"
    )
    evaluate.add_argument(
        "--speeds", required=True, help="comma-separated cutting speeds, one per operation"
    )
    evaluate.add_argument(
        "--feeds", required=True, help="comma-separated feeds, one per operation"
    )
    sub.add_parser(
        "compare",
        parents=[plan_parent, es_parent, grid_parent],
        help="published rows plus a fresh run and the oracle",
    )
    return parser


def _load_input(args: argparse.Namespace) -> tuple[case_study.LoadedDocument, bool]:
    if args.builtin_case:
        document = json.loads(case_study.builtin_document_bytes().decode("utf-8"))
        return case_study.load_document(document), True
    return case_study.load_document_file(args.config), False


def _es_config(args: argparse.Namespace, overrides: dict[str, Any]) -> es.EsConfig:
    merged = dict(overrides)
    for key, value in (
        ("seed", args.seed),
        ("mu", args.mu),
        ("eta", args.eta),
        ("stall_limit", args.stall),
        ("alpha", args.alpha),
        ("sigma_init", args.sigma_init),
    ):
        if value is not None:
            merged[key] = value
    return es.EsConfig(**merged)


def _grid_spec(args: argparse.Namespace, overrides: dict[str, Any]) -> oracle.GridSpec:
    merged = dict(overrides)
    if getattr(args, "grid_resolution", None) is not None:
        merged["resolution"] = args.grid_resolution
    return oracle.GridSpec(**merged)


def _improvement_logger(stream) -> Any:
    def observe(state: es.EsState) -> None:
        if state.record.stall_counter == 0 and state.record.individual is not None:
            print(
                f"generation {state.generation}: best {state.record.fitness:.6f}",
                file=stream,
            )

    return observe


def _round4(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def _emit(text: str, args: argparse.Namespace) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _solution_report(command: str, plan: milling.MillingPlan, **fields: Any) -> dict[str, Any]:
    report: dict[str, Any] = {"command": command, "operations": [op.number for op in plan.operations]}
    report.update(fields)
    return report


def _render_keyed(report: dict[str, Any], fmt: str) -> str:
    """Render a flat solution/evaluation report.

    text and csv print floats at 4 decimals; json keeps full precision.
    """
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"

    rows: list[tuple[str, str]] = []
    skip = {"command", "margins"}
    for key, value in report.items():
        if key in skip:
            continue
        if isinstance(value, (list, tuple)):
            if key in _ROW_NAMES:
                for i, item in enumerate(value, start=1):
                    rows.append((f"{_ROW_NAMES[key]}_{i}", _round4(item)))
            elif key == "warnings":
                for i, item in enumerate(value, start=1):
                    rows.append((f"warning_{i}", str(item)))
            elif key == "operations":
                rows.append((key, " ".join(str(v) for v in value)))
            else:
                rows.append((key, " ".join(str(v) for v in value)))
        elif isinstance(value, float):
            rows.append((key, _round4(value)))
        elif isinstance(value, dict):
            for sub_key, sub_value in value.items():
                rows.append(
                    (f"{key}.{sub_key}", _round4(sub_value) if isinstance(sub_value, float) else str(sub_value))
                )
        else:
            rows.append((key, "" if value is None else str(value)))
    for margin in report.get("margins", ()):  # evaluate only
        op = margin["operation"]
        for name in ("power", "finish", "force"):
            status = "ok" if margin[f"{name}_ok"] else "violated"
            value = margin[name]
            shown = "-" if value is None else f"{value:.4f}"
            rows.append((f"margin_{op}_{name}", f"{shown} {status}"))
        rows.append((f"margin_{op}_speed_box", "ok" if margin["speed_ok"] else "violated"))
        rows.append((f"margin_{op}_feed_box", "ok" if margin["feed_ok"] else "violated"))

    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["key", "value"])
        writer.writerows(rows)
        return buffer.getvalue()

    width = max(len(key) for key, _ in rows)
    lines = [f"{report['command']} report"]
    lines += [f"  {key.ljust(width)}  {value}" for key, value in rows]
    return "\n".join(lines) + "\n"


def _render_compare(report: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(_TABLE_FIELDS)
        for row in report["rows"]:
            writer.writerow(
                [
                    row["method"],
                    f"{row['unit_cost']:.2f}",
                    f"{row['unit_time']:.2f}",
                    f"{row['profit_rate']:.2f}",
                ]
            )
        return buffer.getvalue()

    name_width = max((len(row["method"]) for row in report["rows"]), default=len("method"))
    name_width = max(name_width, len("method"))
    lines = ["method".ljust(name_width) + "  unit_cost  unit_time  profit_rate"]
    for row in report["rows"]:
        lines.append(
            row["method"].ljust(name_width)
            + f"  {row['unit_cost']:9.2f}"
            + f"  {row['unit_time']:9.2f}"
            + f"  {row['profit_rate']:11.2f}"
        )
    gap = report.get("reproduction_gap")
    if gap is not None:
        lines.append("")
        lines.append(
            "gap to published strategy row: "
            f"profit rate {gap['computed_profit_rate']:.4f} vs {gap['published_profit_rate']:.2f} "
            f"({100.0 * gap['profit_rate_relative_error']:+.1f}%), "
            f"unit cost {gap['computed_unit_cost']:.4f} vs {gap['published_unit_cost']:.2f} "
            f"({100.0 * gap['unit_cost_relative_error']:+.1f}%)"
        )
    for i, warning in enumerate(report["warnings"], start=1):
        lines.append(f"warning_{i}: {warning}")
    return "\n".join(lines) + "\n"


def _cmd_optimize(args: argparse.Namespace) -> tuple[str, int]:
    loaded, _ = _load_input(args)
    config = _es_config(args, loaded.es_overrides)
    observer = _improvement_logger(sys.stderr) if args.verbose else None
    result = es.run(loaded.plan, config, observer=observer)
    report = _solution_report(
        "optimize",
        loaded.plan,
        feasible=result.feasible,
        profit_rate=result.profit_rate,
        unit_cost=result.unit_cost,
        unit_time=result.unit_time,
        speeds=None if result.best is None else list(result.best.speeds),
        feeds=None if result.best is None else list(result.best.feeds),
        sigmas_final=None if result.sigmas_final is None else list(result.sigmas_final),
        generations=result.generations,
        evaluations=result.evaluations,
        seed=result.seed,
        config={
            "mu": config.mu,
            "eta": config.eta,
            "sigma_init": config.sigma_init,
            "alpha": config.alpha,
            "stall_limit": config.stall_limit,
            "max_generations": config.max_generations,
            "sigma_floor": config.sigma_floor,
        },
        warnings=list(result.warnings),
    )
    return _render_keyed(report, args.out), 0 if result.feasible else 3


def _cmd_oracle(args: argparse.Namespace) -> tuple[str, int]:
    loaded, _ = _load_input(args)
    grid = _grid_spec(args, loaded.oracle_overrides)
    result = oracle.dinkelbach_solve(loaded.plan, grid=grid)
    report = _solution_report(
        "oracle",
        loaded.plan,
        feasible=result.feasible,
        profit_rate=result.profit_rate,
        unit_cost=result.unit_cost,
        unit_time=result.unit_time,
        speeds=None if result.best is None else list(result.best.speeds),
        feeds=None if result.best is None else list(result.best.feeds),
        grid_resolution=grid.resolution,
        iterations=result.iterations,
        lambda_trace=list(result.lambda_trace),
        warnings=list(milling.plan_warnings(loaded.plan)),
    )
    return _render_keyed(report, args.out), 0 if result.feasible else 3


def _parse_values(raw: str, name: str, expected: int) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in raw.split(","))
    except ValueError:
        raise milling.ContractError(f"--{name} must be comma-separated numbers") from None
    if len(values) != expected:
        raise milling.ContractError(
            f"--{name} has {len(values)} values but the plan has {expected} operations"
        )
    return values


def _cmd_evaluate(args: argparse.Namespace) -> tuple[str, int]:
    loaded, _ = _load_input(args)
    plan = loaded.plan
    x = milling.DecisionVector(
        speeds=_parse_values(args.speeds, "speeds", plan.m),
        feeds=_parse_values(args.feeds, "feeds", plan.m),
    )
    coeffs = milling.derive_coefficients(plan)
    margins = milling.constraint_margins(plan, x, coeffs)
    report = _solution_report(
        "evaluate",
        plan,
        feasible=all(m.satisfied for m in margins),
        fitness=milling.fitness(plan, x, coeffs),
        profit_rate=milling.profit_rate(plan, x, coeffs),
        unit_cost=milling.unit_cost(plan, x, coeffs),
        unit_time=milling.unit_time(plan, x, coeffs),
        speeds=list(x.speeds),
        feeds=list(x.feeds),
        margins=[
            {
                "operation": m.operation,
                "power": m.power,
                "power_ok": m.power_ok,
                "finish": m.finish,
                "finish_ok": m.finish_ok,
                "force": m.force,
                "force_ok": m.force_ok,
                "speed_ok": m.speed_ok,
                "feed_ok": m.feed_ok,
            }
            for m in margins
        ],
        warnings=list(milling.plan_warnings(plan)),
    )
    return _render_keyed(report, args.out), 0


def _cmd_compare(args: argparse.Namespace) -> tuple[str, int]:
    loaded, is_builtin = _load_input(args)
    plan = loaded.plan
    config = _es_config(args, loaded.es_overrides)
    grid = _grid_spec(args, loaded.oracle_overrides)
    observer = _improvement_logger(sys.stderr) if args.verbose else None

    run_result = es.run(plan, config, observer=observer)
    oracle_result = oracle.dinkelbach_solve(plan, grid=grid)

    rows: list[dict[str, Any]] = []
    published_strategy: case_study.ReferenceRow | None = None
    if is_builtin:
        for ref in case_study.REFERENCE_ROWS:
            rows.append(
                {
                    "method": ref.method,
                    "unit_cost": ref.unit_cost,
                    "unit_time": ref.unit_time,
                    "profit_rate": ref.profit_rate,
                    "source": "published",
                }
            )
            if ref.method == "Evolutionary strategy":
                published_strategy = ref
    if run_result.feasible:
        rows.append(
            {
                "method": "Evolutionary strategy (this implementation)",
                "unit_cost": run_result.unit_cost,
                "unit_time": run_result.unit_time,
                "profit_rate": run_result.profit_rate,
                "source": "computed",
            }
        )
    if oracle_result.feasible:
        rows.append(
            {
                "method": "Oracle (grid)",
                "unit_cost": oracle_result.unit_cost,
                "unit_time": oracle_result.unit_time,
                "profit_rate": oracle_result.profit_rate,
                "source": "computed",
            }
        )

    gap = None
    if published_strategy is not None and run_result.feasible:
        gap = {
            "published_profit_rate": published_strategy.profit_rate,
            "computed_profit_rate": run_result.profit_rate,
            "profit_rate_relative_error": (run_result.profit_rate - published_strategy.profit_rate)
            / published_strategy.profit_rate,
            "published_unit_cost": published_strategy.unit_cost,
            "computed_unit_cost": run_result.unit_cost,
            "unit_cost_relative_error": (run_result.unit_cost - published_strategy.unit_cost)
            / published_strategy.unit_cost,
        }

    report = {
        "command": "compare",
        "rows": rows,
        "reproduction_gap": gap,
        "seed": config.seed,
        "grid_resolution": grid.resolution,
        "generations": run_result.generations,
        "evaluations": run_result.evaluations,
        "warnings": list(run_result.warnings),
    }
    feasible = run_result.feasible and oracle_result.feasible
    return _render_compare(report, args.out), 0 if feasible else 3


_COMMANDS = {
    "optimize": _cmd_optimize,
    "oracle": _cmd_oracle,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0

    try:
        text, code = _COMMANDS[args.command](args)
    except (milling.ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except oracle.OracleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    _emit(text, args)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
