"""Command-line entry point: run scenarios, campaigns, and dump presets."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (
    BUILTIN_SCENARIOS,
    ScenarioConfigError,
    emit_telemetry,
    load_scenarios,
    presets_text,
    run_campaign,
    run_scenario,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfcquad",
        description="Model-free quadrotor rate control scenario harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a single scenario")
    run_p.add_argument(
        "scenario",
        nargs="?",
        default="f450-doublet-mfc",
        help=f"built-in scenario name (default f450-doublet-mfc); "
        f"known: {', '.join(BUILTIN_SCENARIOS)}",
    )
    run_p.add_argument("--config", help="scenario config file (overrides the name)")
    run_p.add_argument("--seed", type=int, help="override the scenario seed")
    run_p.add_argument("--duration", type=float, help="override the duration, s")
    run_p.add_argument("--out", help="write telemetry CSV here")

    camp_p = sub.add_parser("campaign", help="run every scenario in a config file")
    camp_p.add_argument("--config", required=True, help="campaign config file")
    camp_p.add_argument("--out", help="directory for per-scenario telemetry CSVs")
    camp_p.add_argument("--seed", type=int, help="override every scenario's seed")
    camp_p.add_argument("--duration", type=float, help="override every duration, s")
    camp_p.add_argument("--parallelism", type=int, default=1)

    pre_p = sub.add_parser("presets", help="dump built-in presets as config text")
    pre_p.add_argument("--out", help="write to a file instead of stdout")
    return parser


def _apply_overrides(scenario, args):
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    if args.duration is not None:
        scenario = replace(scenario, duration=args.duration)
    return scenario


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    try:
        if args.command == "run":
            if args.config:
                scenarios = load_scenarios(args.config)
                if len(scenarios) != 1:
                    print(
                        f"error: {args.config} defines {len(scenarios)} scenarios; "
                        "use the campaign subcommand",
                        file=sys.stderr,
                    )
                    return 2
                scenario = scenarios[0]
            else:
                try:
                    scenario = BUILTIN_SCENARIOS[args.scenario]
                except KeyError:
                    print(
                        f"error: unknown scenario {args.scenario!r}; "
                        f"known: {', '.join(BUILTIN_SCENARIOS)}",
                        file=sys.stderr,
                    )
                    return 2
            scenario = _apply_overrides(scenario, args)
            result = run_scenario(scenario)
            print(
                f"{scenario.name}: mae roll/pitch/yaw = "
                f"{result.mae[0]:.3f}/{result.mae[1]:.3f}/{result.mae[2]:.3f} deg/s, "
                f"saturation = {result.saturation_fraction[0]:.2f}/"
                f"{result.saturation_fraction[1]:.2f}/"
                f"{result.saturation_fraction[2]:.2f}, "
                f"diverged = {result.diverged}"
            )
            if args.out:
                path = emit_telemetry(result, args.out)
                print(f"telemetry written to {path}")
            return 1 if result.diverged else 0

        if args.command == "campaign":
            scenarios = [_apply_overrides(s, args) for s in load_scenarios(args.config)]
            summary = run_campaign(scenarios, parallelism=args.parallelism)
            print(summary.format_table())
            if args.out:
                out_dir = Path(args.out)
                for res in summary.results:
                    emit_telemetry(res, out_dir / f"{res.scenario.name}.csv")
                print(f"telemetry written to {out_dir}/")
            return 1 if summary.any_diverged else 0

        if args.command == "presets":
            text = presets_text()
            if args.out:
                Path(args.out).write_text(text)
                print(f"presets written to {args.out}")
            else:
                print(text, end="")
            return 0
    except ScenarioConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
