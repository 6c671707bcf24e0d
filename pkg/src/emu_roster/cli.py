"""Command line front end.

Subcommands: solve (swarm search, writes plan + fitness trace), validate
(check a plan file against its timetable), compare (exact enumeration vs
swarm on small instances), gen (synthetic paired timetables), diagram (DOT
graph of a plan). Exit codes: 0 ok, 1 input or usage error, 2 infeasible
instance, 3 validation failures. All randomness flows from --seed, which
defaults to a fixed constant, so identical invocations give identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from . import oracle as oracle_mod
from .connection import build_matrices
from .constructor import InfeasibleError
from .diagram import render_dot
from .plan import (
    PlanFormatError,
    parse_plan,
    plan_summary,
    render_plan,
    validate,
)
from .pso import DEFAULT_SEED, SolveResult, SwarmConfig, solve
from .timetable import (
    TimetableError,
    generate_instance,
    parse_timetable,
    render_timetable,
)

_MODEL_KEYS = {"l_cycle", "t_cycle", "lambda", "t_connect", "omega1", "omega2", "beta"}
_SWARM_KEYS = {f.name for f in fields(SwarmConfig)}
_EXTRA_KEYS = {"maint_prob", "max_restarts"}


class CliError(Exception):
    """Bad input; maps to exit code 1."""


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None


def _write(path: str, content: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(content)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from None


def _parse_config_file(path: str) -> dict[str, float]:
    """key=value lines; '#' comments. Keys from SwarmConfig, the model
    parameters, or the constructor knobs (maint_prob, max_restarts)."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _MODEL_KEYS | _SWARM_KEYS | _EXTRA_KEYS:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError:
            raise CliError(f"{path}:{lineno}: bad numeric value {val.strip()!r}") from None
    return values


def _load_instance(args):
    instance = parse_timetable(_read(args.timetable))
    cfgfile = _parse_config_file(args.config) if getattr(args, "config", None) else {}

    overrides = {}
    for key in _MODEL_KEYS:
        if key in cfgfile:
            overrides["lam" if key == "lambda" else key] = cfgfile[key]
    for attr, key in (
        ("lam", "lambda"),
        ("omega1", "omega1"),
        ("omega2", "omega2"),
        ("beta", "beta"),
        ("t_connect", "t_connect"),
    ):
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            overrides[attr] = flag
    if "t_connect" in overrides:
        overrides["t_connect"] = int(overrides["t_connect"])
    if overrides:
        instance = instance.with_params(**overrides)
    return instance, cfgfile


def _swarm_config(args, cfgfile: dict[str, float]) -> tuple[SwarmConfig, float, int]:
    kwargs = {}
    for key in _SWARM_KEYS:
        if key in cfgfile:
            kwargs[key] = cfgfile[key]
    for key in ("n_particles", "k_max", "seed"):
        if key in kwargs:
            kwargs[key] = int(kwargs[key])
    if getattr(args, "particles", None) is not None:
        kwargs["n_particles"] = args.particles
    if getattr(args, "iters", None) is not None:
        kwargs["k_max"] = args.iters
    if getattr(args, "seed", None) is not None:
        kwargs["seed"] = args.seed
    maint_prob = cfgfile.get("maint_prob", 0.5)
    if getattr(args, "maint_prob", None) is not None:
        maint_prob = args.maint_prob
    max_restarts = int(cfgfile.get("max_restarts", 100))
    if getattr(args, "max_restarts", None) is not None:
        max_restarts = args.max_restarts
    return SwarmConfig(**kwargs), maint_prob, max_restarts


def _trace_csv(result: SolveResult) -> str:
    lines = ["iter,global_best_fitness,feasible_fraction"]
    for p in result.trace:
        lines.append(f"{p.iteration},{p.global_best_fitness:.6f},{p.feasible_fraction:.6f}")
    return "\n".join(lines) + "\n"


def _cmd_solve(args) -> int:
    instance, cfgfile = _load_instance(args)
    cfg, maint_prob, max_restarts = _swarm_config(args, cfgfile)
    matrices = build_matrices(instance)
    result = solve(instance, matrices, cfg, maint_prob=maint_prob, max_restarts=max_restarts)

    _write(args.out, render_plan(result.best_plan, instance, matrices))
    trace_path = args.trace if args.trace else args.out + ".trace.csv"
    _write(trace_path, _trace_csv(result))

    summary = plan_summary(result.best_plan, instance, matrices)
    print(f"rotations {summary.n_rotations}")
    print(f"connection_minutes {summary.total_connection_time}")
    print(f"objective {summary.objective:.6f}")
    print(f"fitness {summary.fitness:.6f}")
    print(f"restarts {result.restarts}")
    print(f"wall_time {result.wall_time:.2f}s", file=sys.stderr)
    return 0


def _cmd_validate(args) -> int:
    instance = parse_timetable(_read(args.timetable))
    plan = parse_plan(_read(args.plan))
    if len(plan.order) != instance.n:
        raise CliError(
            f"plan has {len(plan.order)} positions but the timetable has {instance.n} trains"
        )
    unknown = sorted({t for t in plan.order if not 1 <= t <= instance.n})
    if unknown:
        raise CliError(f"plan references unknown train ids: {unknown}")
    report = validate(plan, instance, build_matrices(instance))
    for violation in report.violations:
        print(violation)
    return 0 if report.ok else 3


def _cmd_compare(args) -> int:
    instance, cfgfile = _load_instance(args)
    cfg, maint_prob, max_restarts = _swarm_config(args, cfgfile)
    matrices = build_matrices(instance)
    try:
        exact = oracle_mod.brute_force(instance, matrices, n_limit=args.oracle_limit)
    except oracle_mod.InstanceTooLargeError as exc:
        raise CliError(f"instance too large for oracle: {exc}") from None

    heuristic: SolveResult | None = None
    heuristic_error = None
    try:
        heuristic = solve(instance, matrices, cfg, maint_prob=maint_prob, max_restarts=max_restarts)
    except InfeasibleError as exc:
        heuristic_error = str(exc)

    report = oracle_mod.compare(instance, matrices, exact, heuristic)
    print(f"plans_enumerated {exact.plans_enumerated}")
    print(f"feasible_count {exact.feasible_count}")
    if report.consistently_infeasible:
        print("consistently infeasible")
        if heuristic_error:
            print(f"heuristic_error {heuristic_error}", file=sys.stderr)
        return 0
    if report.oracle_objective is not None:
        print(f"oracle_objective {report.oracle_objective:.6f}")
    if report.heuristic_objective is not None:
        print(f"heuristic_fitness {report.heuristic_objective:.6f}")
        print(f"heuristic_feasible {'true' if report.heuristic_feasible else 'false'}")
    if report.relative_gap is not None:
        print(f"absolute_gap {report.absolute_gap:.6f}")
        print(f"relative_gap {report.relative_gap:.6f}")
    return 0


def _cmd_gen(args) -> int:
    instance = generate_instance(args.pairs, args.turnbacks, args.seed)
    cfgfile = _parse_config_file(args.config) if args.config else {}
    overrides = {}
    for key in _MODEL_KEYS:
        if key in cfgfile:
            overrides["lam" if key == "lambda" else key] = cfgfile[key]
    for attr, key in (("lam", "lambda"), ("omega1", "omega1"), ("omega2", "omega2"),
                      ("beta", "beta"), ("t_connect", "t_connect")):
        flag = getattr(args, key, None)
        if flag is not None:
            overrides[attr] = flag
    if "t_connect" in overrides:
        overrides["t_connect"] = int(overrides["t_connect"])
    if overrides:
        instance = instance.with_params(**overrides)
    text = render_timetable(instance)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_diagram(args) -> int:
    instance = parse_timetable(_read(args.timetable))
    plan = parse_plan(_read(args.plan))
    if len(plan.order) != instance.n:
        raise CliError(
            f"plan has {len(plan.order)} positions but the timetable has {instance.n} trains"
        )
    matrices = build_matrices(instance)
    dot = render_dot(plan, instance, matrices)
    if args.out:
        _write(args.out, dot)
    else:
        sys.stdout.write(dot)
    return 0


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file (swarm and model overrides)")
    p.add_argument("--lambda", dest="lambda", type=float, help="overrun tolerance fraction")
    p.add_argument("--omega1", type=float, help="weight on total connection time")
    p.add_argument("--omega2", type=float, help="weight on maintenance mileage slack")
    p.add_argument("--beta", type=float, help="mileage overrun penalty coefficient")
    p.add_argument("--t-connect", dest="t_connect", type=int, help="minimum connection minutes")


def _add_swarm_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--particles", type=int, help="swarm size")
    p.add_argument("--iters", type=int, help="iteration count")
    p.add_argument("--maint-prob", dest="maint_prob", type=float,
                   help="probability of optional maintenance at the depot")
    p.add_argument("--max-restarts", dest="max_restarts", type=int,
                   help="construction attempts before giving up")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emu-roster", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a circulation plan")
    p.add_argument("timetable")
    p.add_argument("--out", required=True, help="plan file to write")
    p.add_argument("--trace", help="fitness trace CSV (default: <out>.trace.csv)")
    _add_swarm_flags(p)
    _add_model_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("validate", help="check a plan file against its timetable")
    p.add_argument("timetable")
    p.add_argument("plan")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("compare", help="exact optimum vs swarm heuristic")
    p.add_argument("timetable")
    p.add_argument("--oracle-limit", type=int, default=10)
    _add_swarm_flags(p)
    _add_model_flags(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("gen", help="generate a synthetic paired timetable")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--turnbacks", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    _add_model_flags(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("diagram", help="emit the plan's network as DOT")
    p.add_argument("timetable")
    p.add_argument("plan")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_diagram)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, TimetableError, PlanFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
