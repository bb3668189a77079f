"""Batch command line front door.

Subcommands: validate, diagnose, recommend, plan, simulate, serve.  Output is
deterministic for identical inputs and seed; JSON is emitted with sorted keys,
tables with fixed format strings.  The simulate subcommand writes CSV with
columns step,level,ignition_prob,mean_cost.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .decision import RESPONSE_LABELS, classify_severity, escalating_recommend, recommend
from .dist import DiscreteDistribution
from .errors import LeakRiskError
from .evolution import LEAK_STATES, embed_no_ignition, steps_for
from .inference import aggregate, posterior, validate_evidence
from .model import AGGREGATE_STATES, FramingConstraints, ScenarioBundle, load_scenario
from .plan import HEURISTICS, build_plan
from .scenarios import builtin_scenario_path, load_builtin
from .simulate import curves_csv, simulate_policies

BUILTIN_ID = "gas-compressor"


def _load_json_arg(value: str, what: str) -> dict:
    """Accept inline JSON (starts with '{') or a path to a JSON file."""
    try:
        if value.lstrip().startswith("{"):
            return json.loads(value)
        return json.loads(Path(value).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise LeakRiskError(f"cannot read {what}: {exc}") from exc


def _resolve_bundle(scenario: str | None) -> ScenarioBundle:
    if scenario is None or scenario == BUILTIN_ID:
        return load_builtin()
    return load_scenario(Path(scenario))


def _resolve_level(bundle: ScenarioBundle, value: str | None) -> int:
    if value is None:
        return 0
    if value in bundle.transitions.levels:
        return bundle.transitions.levels.index(value)
    try:
        level = int(value)
    except ValueError:
        raise LeakRiskError(
            f"unknown level {value!r}; expected an index or one of {list(bundle.transitions.levels)}"
        ) from None
    if not 0 <= level <= bundle.max_level:
        raise LeakRiskError(f"level index {level} out of range [0, {bundle.max_level}]")
    return level


def _aggregate_from_evidence(
    bundle: ScenarioBundle, evidence: dict[str, str]
) -> DiscreteDistribution:
    validate_evidence(bundle.network, evidence)
    detailed = posterior(bundle.network, evidence, bundle.network.real_state_node)
    return aggregate(detailed, bundle.aggregation, AGGREGATE_STATES)


def _constraints_from(bundle: ScenarioBundle, overrides: dict | None, seed: int | None):
    base = bundle.constraints_default
    fields = dataclasses.asdict(base)
    if overrides:
        unknown = set(overrides) - set(fields)
        if unknown:
            raise LeakRiskError(f"unknown constraint fields: {sorted(unknown)}")
        fields.update(overrides)
    if seed is not None:
        fields["seed"] = seed
    return FramingConstraints(**fields)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cmd_validate(args) -> int:
    path = args.scenario or str(builtin_scenario_path())
    bundle = load_scenario(Path(path))
    lines = [
        f"ok: scenario {bundle.id!r}",
        f"  nodes: {len(bundle.network.nodes)} (real state: {bundle.network.real_state_node})",
        f"  levels: {', '.join(bundle.transitions.levels)}",
        f"  tests: {', '.join(t.id for t in bundle.tests)}",
        f"  horizons: {', '.join(str(h) for h in bundle.value.horizons)}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_diagnose(args) -> int:
    bundle = _resolve_bundle(args.scenario)
    evidence = _load_json_arg(args.evidence, "evidence") if args.evidence else {}
    validate_evidence(bundle.network, evidence)
    detailed = posterior(bundle.network, evidence, bundle.network.real_state_node)
    agg = aggregate(detailed, bundle.aggregation, AGGREGATE_STATES)
    layer = classify_severity(agg, False, bundle.severity)
    if args.format == "json":
        out = {
            "evidence": evidence,
            "detailed": detailed.as_dict(),
            "aggregate": agg.as_dict(),
            "severity": layer.label,
            "response_label": RESPONSE_LABELS[layer],
        }
        _emit(_json_dumps(out), args.out)
    else:
        lines = [f"evidence: {json.dumps(evidence, sort_keys=True)}"]
        lines.append("detailed posterior:")
        for name, p in zip(detailed.outcomes, detailed.probs):
            lines.append(f"  {name:<28s} {p:.6f}")
        lines.append("aggregate:")
        for name, p in zip(agg.outcomes, agg.probs):
            lines.append(f"  {name:<28s} {p:.6f}")
        lines.append(f"severity: {layer.label} ({RESPONSE_LABELS[layer]})")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_recommend(args) -> int:
    bundle = _resolve_bundle(args.scenario)
    if args.ignition_loss is not None:
        bundle = dataclasses.replace(
            bundle, value=dataclasses.replace(bundle.value, ignition_loss=args.ignition_loss)
        )
    evidence = _load_json_arg(args.evidence, "evidence") if args.evidence else {}
    agg = _aggregate_from_evidence(bundle, evidence)
    status_quo = _resolve_level(bundle, args.level)
    if args.horizon is not None:
        rec = recommend(agg, 0.0, status_quo, args.horizon, bundle)
    else:
        rec = escalating_recommend(agg, 0.0, status_quo, bundle)
    if args.format == "json":
        _emit(_json_dumps(rec.to_json()), args.out)
    else:
        lines = [
            f"chosen: {rec.chosen_name} (level {rec.chosen})  "
            f"horizon: {rec.horizon_used}  forced_esd: {rec.forced_esd}",
            f"ignition probability at decision: {rec.ignition_prob_at_decision:.6f}",
            f"{'level':<16s} {'EU':>14s} {'P(ignited at horizon)':>24s}",
        ]
        for r in rec.ranked:
            lines.append(
                f"{r.level_name:<16s} {r.expected_utility:>14.4f} "
                f"{r.ignition_prob_at_horizon:>24.6f}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_plan(args) -> int:
    bundle = _resolve_bundle(args.scenario)
    evidence = _load_json_arg(args.evidence, "evidence") if args.evidence else {}
    agg = _aggregate_from_evidence(bundle, evidence)
    status_quo = _resolve_level(bundle, args.level)
    overrides = _load_json_arg(args.constraints, "constraints") if args.constraints else None
    constraints = _constraints_from(bundle, overrides, args.seed)
    if args.heuristic not in HEURISTICS:
        raise LeakRiskError(f"heuristic must be one of {list(HEURISTICS)}")
    plan = build_plan(bundle, agg, status_quo, constraints, heuristic=args.heuristic)
    payload = plan.to_json()
    payload["value_of_information"] = plan.best_eu - plan.act_now_eu
    if args.format == "json":
        _emit(_json_dumps(payload), args.out)
    else:
        root = plan.root
        first = root.argmax if root.kind == "choice" else "act-now"
        lines = [
            f"act-now EU: {plan.act_now_eu:.4f}",
            f"best EU: {plan.best_eu:.4f}",
            f"value of information: {plan.best_eu - plan.act_now_eu:.4f}",
            f"expansions used: {plan.expansions_used}",
            f"root choice: {first}",
            f"frontier paths: {len(plan.frontier)}",
        ]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_simulate(args) -> int:
    bundle = _resolve_bundle(args.scenario)
    evidence = _load_json_arg(args.evidence, "evidence") if args.evidence else {}
    agg = _aggregate_from_evidence(bundle, evidence)
    belief = embed_no_ignition(agg)
    if args.steps is not None:
        steps = args.steps
    else:
        steps = steps_for(max(bundle.value.horizons), bundle.transitions.step_duration)
    curves = simulate_policies(bundle, belief, steps, args.trajectories, args.seed or 0)
    _emit(curves_csv(curves), args.out)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .session import SessionStore

    scenarios: dict[str, ScenarioBundle] = {}
    builtin = load_builtin()
    scenarios[builtin.id] = builtin
    for path in args.scenario_file or []:
        bundle = load_scenario(Path(path))
        scenarios[bundle.id] = bundle
    app = create_app(store=SessionStore(args.data_dir), scenarios=scenarios)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leakrisk", description="Leak-risk diagnosis, decision, and planning toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="json"):
        p.add_argument("--scenario", help="scenario JSON path, or 'gas-compressor' (default)")
        p.add_argument("--evidence", help="JSON map node->outcome, inline or a file path")
        p.add_argument("--format", choices=("json", "table"), default=fmt_default)
        p.add_argument("--out", help="write output to this file instead of stdout")

    p = sub.add_parser("validate", help="schema-check a scenario bundle")
    p.add_argument("--scenario", help="scenario JSON path (default: bundled scenario)")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("diagnose", help="posterior + aggregate for evidence")
    common(p)
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("recommend", help="rank shutdown levels by expected utility")
    common(p, fmt_default="table")
    p.add_argument("--level", help="status-quo level index or name (default 0)")
    p.add_argument("--horizon", type=float, help="fixed horizon; default escalates")
    p.add_argument("--ignition-loss", type=float, help="override the scenario ignition loss")
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("plan", help="grow an anytime information-gathering plan")
    common(p)
    p.add_argument("--level", help="status-quo level index or name (default 0)")
    p.add_argument("--constraints", help="JSON overrides for framing constraints")
    p.add_argument("--heuristic", choices=HEURISTICS, default="highest-ev-path")
    p.add_argument("--seed", type=int, help="override the expansion seed")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("simulate", help="Monte Carlo ignition/cost curves per level")
    common(p)
    p.add_argument("--steps", type=int, help="steps to simulate (default: longest horizon)")
    p.add_argument("--trajectories", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP session service")
    p.add_argument("--scenario-file", action="append", help="extra scenario JSON to host")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", default="sessions")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LeakRiskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
