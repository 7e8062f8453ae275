"""Command-line entry point.

Subcommands: ``run`` (one simulation), ``sweep`` (parameter sweeps),
``lattice`` (dipole-grid demos). Scenario files are strict YAML: any
unknown key is a hard error naming the key. All output is CSV and
reproducible byte for byte from (scenario file, seed); diagnostics go
to stderr, controlled by the MAGPOS_LOG env var (quiet|info|trace).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass

import yaml

from .core import ForkId
from .engine import UpdateOrder, run, stake_shares
from . import lattice
from .scenarios import (
    AdversarySplit,
    ExplicitAssignment,
    ExplicitStake,
    ParetoStake,
    RandomAssignment,
    ScenarioConfig,
    UniformStake,
    build_state,
    parameter_sweep,
)

log = logging.getLogger("magpos")

RUN_HEADER = (
    "scenario,seed,n_nodes,k,update_order,converged,rounds,"
    "messages,flips,winning_fork,winning_stake_fraction"
)
SWEEP_HEADER = "swept_param,swept_value,runs,win_rate,mean_rounds,convergence_rate"
TRACE_HEADER = "round,conflicted,messages,flips"

SWEEP_PARAMS = ("attacker_stake_fraction", "attacker_node_fraction", "k", "n_nodes")


class ScenarioError(Exception):
    """Invalid scenario file or CLI input; message names the offense."""


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    fork_names: tuple[str, ...]  # index = internal ForkId
    seeds: tuple[int, ...]
    output: str | None


def _require_keys(section: dict, allowed: set[str], required: set[str], where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ScenarioError(f"unknown key {key!r} in {where}")
    for key in required:
        if key not in section:
            raise ScenarioError(f"missing required key {key!r} in {where}")


def _fork_id(token, names: tuple[str, ...], where: str) -> ForkId:
    token = str(token)
    try:
        return names.index(token)
    except ValueError:
        raise ScenarioError(f"undeclared fork {token!r} in {where}") from None


def _parse_stake_dist(section, names, n_nodes):
    if not isinstance(section, dict):
        raise ScenarioError("stake_dist must be a mapping with a 'kind' key")
    kind = section.get("kind")
    if kind == "uniform":
        _require_keys(section, {"kind", "amount"}, {"amount"}, "stake_dist")
        return UniformStake(amount=int(section["amount"]))
    if kind == "pareto":
        _require_keys(section, {"kind", "scale", "shape"}, {"scale", "shape"}, "stake_dist")
        return ParetoStake(scale=int(section["scale"]), shape=float(section["shape"]))
    if kind == "explicit":
        _require_keys(section, {"kind", "amounts"}, {"amounts"}, "stake_dist")
        return ExplicitStake(amounts=tuple(int(a) for a in section["amounts"]))
    raise ScenarioError(f"unknown stake_dist kind {kind!r} (uniform|pareto|explicit)")


def _parse_assignment(section, names):
    if not isinstance(section, dict):
        raise ScenarioError("initial_assignment must be a mapping with a 'kind' key")
    kind = section.get("kind")
    if kind == "random":
        _require_keys(section, {"kind", "weights"}, set(), "initial_assignment")
        weights = section.get("weights")
        if weights is not None:
            if set(weights) - set(names):
                bad = sorted(set(weights) - set(names))
                raise ScenarioError(f"weights for undeclared forks {bad} in initial_assignment")
            weights = tuple(float(weights.get(n, 0.0)) for n in names)
        return RandomAssignment(weights=weights)
    if kind == "explicit":
        _require_keys(section, {"kind", "forks"}, {"forks"}, "initial_assignment")
        return ExplicitAssignment(
            forks=tuple(_fork_id(t, names, "initial_assignment.forks") for t in section["forks"])
        )
    if kind == "adversary":
        _require_keys(
            section,
            {"kind", "stake_fraction", "attacker_fork", "node_fraction", "total_stake"},
            {"stake_fraction", "attacker_fork"},
            "initial_assignment",
        )
        return AdversarySplit(
            stake_fraction=float(section["stake_fraction"]),
            attacker_fork=_fork_id(section["attacker_fork"], names, "initial_assignment"),
            node_fraction=float(section.get("node_fraction", 0.5)),
            total_stake=int(section.get("total_stake", 1000)),
        )
    raise ScenarioError(f"unknown initial_assignment kind {kind!r} (random|explicit|adversary)")


TOP_KEYS = {
    "name", "n_nodes", "k", "forks", "stake_dist", "initial_assignment",
    "update_order", "seed", "seeds", "max_rounds", "output",
}
TOP_REQUIRED = {"n_nodes", "k", "forks", "stake_dist", "initial_assignment"}


def parse_scenario(doc: dict, source: str = "scenario") -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError(f"{source} must be a key-value document")
    _require_keys(doc, TOP_KEYS, TOP_REQUIRED, source)

    fork_tokens = doc["forks"]
    if not isinstance(fork_tokens, list) or not fork_tokens:
        raise ScenarioError("forks must be a non-empty list")
    names = tuple(str(t) for t in fork_tokens)
    if len(set(names)) != len(names):
        raise ScenarioError("duplicate fork names in forks")

    order_token = str(doc.get("update_order", "async"))
    try:
        order = UpdateOrder(order_token)
    except ValueError:
        raise ScenarioError(f"update_order must be async|sync, got {order_token!r}") from None

    n_nodes = int(doc["n_nodes"])
    config = ScenarioConfig(
        n_nodes=n_nodes,
        k=int(doc["k"]),
        forks=tuple(range(len(names))),
        stake_dist=_parse_stake_dist(doc["stake_dist"], names, n_nodes),
        initial_assignment=_parse_assignment(doc["initial_assignment"], names),
        update_order=order,
        seed=int(doc.get("seed", 0)),
        max_rounds=int(doc["max_rounds"]) if "max_rounds" in doc else None,
        name=str(doc.get("name", "scenario")),
    )
    seeds = doc.get("seeds")
    if seeds is None:
        seeds = (config.seed,)
    else:
        if not isinstance(seeds, list) or not seeds:
            raise ScenarioError("seeds must be a non-empty list")
        seeds = tuple(int(s) for s in seeds)
    output = doc.get("output")
    return Scenario(config=config, fork_names=names, seeds=seeds,
                    output=str(output) if output is not None else None)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ScenarioError(f"scenario file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ScenarioError(f"scenario file {path} is not valid YAML: {exc}") from None
    return parse_scenario(doc, source=path)


# ---------------------------------------------------------------------------
# output helpers


def _write_lines(path: str | None, lines: list[str]) -> None:
    data = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(data)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(data)


def _fmt(value: float) -> str:
    return repr(float(value))


# ---------------------------------------------------------------------------
# subcommands


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    config = scenario.config
    seed = args.seed if args.seed is not None else scenario.seeds[0]
    if args.max_rounds is not None:
        if args.max_rounds < 1:
            raise ScenarioError("--max-rounds must be >= 1")
        from dataclasses import replace

        config = replace(config, max_rounds=args.max_rounds)
    out = args.out if args.out is not None else scenario.output

    state = build_state(config, seed)
    log.info("running %s: N=%d k=%d seed=%d", config.name, config.n_nodes, config.k, seed)
    trace_rows = [TRACE_HEADER]

    def on_round(s):
        conflicted = sum(1 for n in s.nodes if n.conflicted)
        trace_rows.append(f"{s.round},{conflicted},{s.message_count},{s.flips}")

    metrics = run(state, config.resolved_max_rounds(), on_round=on_round)
    winner = scenario.fork_names[metrics.winning_fork] if metrics.winning_fork is not None else ""
    row = ",".join(
        [
            config.name,
            str(seed),
            str(config.n_nodes),
            str(config.k),
            state.update_order.value,
            "true" if metrics.converged else "false",
            str(metrics.rounds),
            str(metrics.messages),
            str(metrics.flips),
            winner,
            _fmt(metrics.winning_stake_fraction),
        ]
    )
    _write_lines(out, [RUN_HEADER, row])
    if out is not None and out != "-":
        _write_lines(out + ".trace.csv", trace_rows)
    if not metrics.converged:
        shares = stake_shares(state)
        for fork in sorted(shares):
            log.info("final stake share %s: %s", scenario.fork_names[fork], float(shares[fork]))
        return 2
    log.info("converged on %s in %d rounds", winner, metrics.rounds)
    return 0


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.param not in SWEEP_PARAMS:
        raise ScenarioError(f"--param must be one of {', '.join(SWEEP_PARAMS)}")
    try:
        values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ScenarioError(f"--values must be a comma-separated number list: {exc}") from None
    if not values:
        raise ScenarioError("--values must contain at least one value")
    if args.seeds_per_point < 1:
        raise ScenarioError("--seeds-per-point must be >= 1")

    result = parameter_sweep(scenario.config, args.param, values, args.seeds_per_point)
    lines = [SWEEP_HEADER]
    for point in result.rows:
        lines.append(
            ",".join(
                [
                    result.swept_param,
                    _fmt(point.swept_value),
                    str(point.runs),
                    _fmt(point.win_rate),
                    _fmt(point.mean_rounds),
                    _fmt(point.convergence_rate),
                ]
            )
        )
    _write_lines(args.out, lines)
    return 0


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        width, height = int(w), int(h)
    except ValueError:
        raise ScenarioError(f"--size must look like WxH, got {text!r}") from None
    if width < 2 or height < 2:
        raise ScenarioError(f"grid size must be at least 2x2, got {width}x{height}")
    return width, height


def _angles_csv(grid) -> list[str]:
    lines = ["row,col,angle"]
    for i in range(grid.height):
        for j in range(grid.width):
            lines.append(f"{i},{j},{_fmt(grid.angles[i, j])}")
    return lines


def cmd_lattice(args) -> int:
    width, height = _parse_size(args.size)
    if args.sweeps < 1:
        raise ScenarioError("--sweeps must be >= 1")

    if args.demo == "curve":
        rows = [f"{_fmt(theta)},{_fmt(e)}"
                for theta, e in lattice.uniform_rotation_curve(width, height, args.samples)]
        _write_lines(args.out, ["theta,normalized_energy"] + rows)
        return 0

    if args.demo == "relax":
        grid = lattice.random_grid(width, height, args.seed)
        final, trace = lattice.relax(grid, args.sweeps, seed=args.seed)
        lines = ["sweep,energy"] + [f"{i},{_fmt(e)}" for i, e in enumerate(trace)]
        _write_lines(args.out, lines)
        if args.out is not None and args.out != "-":
            _write_lines(args.out + ".angles.csv", _angles_csv(final))
        log.info("final max neighbor difference: %g", lattice.max_neighbor_difference(final))
        return 0

    # domainwall: pinned phase then release
    final, pinned_trace, released_trace = lattice.domain_wall_demo(
        width, height, sweeps_pinned=args.sweeps, sweeps_released=args.sweeps, seed=args.seed
    )
    lines = ["sweep,energy,phase"]
    lines += [f"{i},{_fmt(e)},pinned" for i, e in enumerate(pinned_trace)]
    lines += [f"{i},{_fmt(e)},released" for i, e in enumerate(released_trace)]
    _write_lines(args.out, lines)
    if args.out is not None and args.out != "-":
        _write_lines(args.out + ".angles.csv", _angles_csv(final))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magpos",
        description="Stake-weighted energy-minimization fork-choice simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario run")
    p_run.add_argument("scenario", help="scenario YAML file")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--max-rounds", type=int, default=None)
    p_run.add_argument("--out", default=None, help="metrics CSV path, or - for stdout")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter over a scenario")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--seeds-per-point", type=int, required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_lat = sub.add_parser("lattice", help="dipole-lattice demos")
    p_lat.add_argument("demo", choices=("curve", "relax", "domainwall"))
    p_lat.add_argument("--size", default="32x32", help="grid size WxH")
    p_lat.add_argument("--sweeps", type=int, default=200)
    p_lat.add_argument("--seed", type=int, default=0)
    p_lat.add_argument("--samples", type=int, default=101, help="curve sample count")
    p_lat.add_argument("--out", default=None)
    p_lat.set_defaults(func=cmd_lattice)
    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("MAGPOS_LOG", "quiet").lower()
    levels = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}
    if level_name not in levels:
        print(f"magpos: MAGPOS_LOG must be quiet|info|trace, got {level_name!r}", file=sys.stderr)
        level_name = "quiet"
    logging.basicConfig(stream=sys.stderr, level=levels[level_name], format="%(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"magpos: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OverflowError) as exc:
        print(f"magpos: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
