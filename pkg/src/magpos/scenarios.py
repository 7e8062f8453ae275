"""Experiment generators and the attack/sybil sweep harness.

Scenario construction is fully seeded: node ids, stake draws, and fork
assignment all derive from (config, seed), so identical inputs rebuild
identical states byte for byte.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace
from statistics import mean

from .core import ForkId, SimNode, Stake, validate_stake
from .engine import RunMetrics, ScenarioState, UpdateOrder, run
from .xor_topology import build_topology

# Fork ids used by the worked 5-node example.
PAPER_FORKS = {"x": 0, "y": 1, "z": 2}


# ---------------------------------------------------------------------------
# stake distributions


@dataclass(frozen=True)
class UniformStake:
    amount: Stake = 10


@dataclass(frozen=True)
class ParetoStake:
    """Heavy-tailed integer stakes: max(1, floor(scale * U^(-1/shape)))."""

    scale: Stake = 10
    shape: float = 1.5


@dataclass(frozen=True)
class ExplicitStake:
    amounts: tuple[Stake, ...] = ()


# ---------------------------------------------------------------------------
# initial fork assignment


@dataclass(frozen=True)
class RandomAssignment:
    """Each node draws its fork with the given per-fork weights."""

    weights: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ExplicitAssignment:
    forks: tuple[ForkId, ...] = ()


@dataclass(frozen=True)
class AdversarySplit:
    """Attacker nodes hold ``stake_fraction`` of the total stake on the
    attacker fork; the honest remainder sits on one honest fork.

    ``node_fraction`` controls how many *nodes* the attacker runs,
    independently of stake; stake within each camp is split as evenly
    as integer units allow. This assignment fixes the stakes itself, so
    the scenario's stake_dist is ignored.
    """

    stake_fraction: float
    attacker_fork: ForkId
    node_fraction: float = 0.5
    total_stake: Stake = 1000


@dataclass(frozen=True)
class ScenarioConfig:
    n_nodes: int
    k: int
    forks: tuple[ForkId, ...]
    stake_dist: UniformStake | ParetoStake | ExplicitStake = UniformStake()
    initial_assignment: RandomAssignment | ExplicitAssignment | AdversarySplit = field(
        default_factory=RandomAssignment
    )
    update_order: UpdateOrder = UpdateOrder.ASYNC_SHUFFLED
    seed: int = 0
    max_rounds: int | None = None  # default 10 * n_nodes
    name: str = "scenario"

    def resolved_max_rounds(self) -> int:
        return self.max_rounds if self.max_rounds is not None else 10 * self.n_nodes


def node_id_for_index(i: int) -> int:
    """Deterministic 256-bit node id, spread over the XOR space."""
    return int.from_bytes(hashlib.sha256(b"magpos-node-%d" % i).digest(), "big")


def _split_evenly(total: Stake, parts: int) -> list[Stake]:
    if parts == 0:
        if total != 0:
            raise ValueError("cannot assign stake to zero nodes")
        return []
    base, rem = divmod(total, parts)
    return [base + (1 if i < rem else 0) for i in range(parts)]


def _draw_stakes(config: ScenarioConfig, rng: random.Random) -> list[Stake]:
    dist = config.stake_dist
    if isinstance(dist, UniformStake):
        return [validate_stake(dist.amount)] * config.n_nodes
    if isinstance(dist, ParetoStake):
        if dist.shape <= 0 or dist.scale < 1:
            raise ValueError("pareto stake needs shape > 0 and scale >= 1")
        return [
            max(1, int(dist.scale * rng.random() ** (-1.0 / dist.shape)))
            for _ in range(config.n_nodes)
        ]
    if isinstance(dist, ExplicitStake):
        if len(dist.amounts) != config.n_nodes:
            raise ValueError(
                f"explicit stakes: got {len(dist.amounts)} amounts for {config.n_nodes} nodes"
            )
        return [validate_stake(a) for a in dist.amounts]
    raise TypeError(f"unknown stake distribution {dist!r}")


def _assign(config: ScenarioConfig, stakes: list[Stake], rng: random.Random):
    """Returns (stakes, forks) per node; may override stakes (adversary)."""
    assignment = config.initial_assignment
    if isinstance(assignment, ExplicitAssignment):
        if len(assignment.forks) != config.n_nodes:
            raise ValueError(
                f"explicit assignment: got {len(assignment.forks)} forks for {config.n_nodes} nodes"
            )
        for f in assignment.forks:
            if f not in config.forks:
                raise ValueError(f"explicit assignment uses undeclared fork {f}")
        return stakes, list(assignment.forks)
    if isinstance(assignment, RandomAssignment):
        weights = assignment.weights
        if weights is not None and len(weights) != len(config.forks):
            raise ValueError("random assignment weights must match the fork list")
        forks = rng.choices(config.forks, weights=weights, k=config.n_nodes)
        return stakes, forks
    if isinstance(assignment, AdversarySplit):
        if not 0.0 <= assignment.stake_fraction <= 1.0:
            raise ValueError("adversary stake_fraction must be in [0, 1]")
        if not 0.0 <= assignment.node_fraction <= 1.0:
            raise ValueError("adversary node_fraction must be in [0, 1]")
        if assignment.attacker_fork not in config.forks:
            raise ValueError(f"attacker fork {assignment.attacker_fork} not declared")
        honest_forks = [f for f in config.forks if f != assignment.attacker_fork]
        if not honest_forks:
            raise ValueError("adversary scenario needs at least one honest fork")
        n = config.n_nodes
        n_att = round(n * assignment.node_fraction)
        # no attacker nodes means nothing carries the attacker stake
        attacker_total = (
            round(assignment.total_stake * assignment.stake_fraction) if n_att else 0
        )
        honest_total = assignment.total_stake - attacker_total
        att_stakes = _split_evenly(attacker_total, n_att)
        hon_stakes = _split_evenly(honest_total, n - n_att)
        attacker_idx = set(rng.sample(range(n), n_att))
        stakes_out: list[Stake] = []
        forks_out: list[ForkId] = []
        att_i = hon_i = 0
        for i in range(n):
            if i in attacker_idx:
                stakes_out.append(att_stakes[att_i])
                forks_out.append(assignment.attacker_fork)
                att_i += 1
            else:
                stakes_out.append(hon_stakes[hon_i])
                forks_out.append(honest_forks[0])
                hon_i += 1
        return stakes_out, forks_out
    raise TypeError(f"unknown assignment {assignment!r}")


def build_state(config: ScenarioConfig, seed: int | None = None) -> ScenarioState:
    """Materialize a runnable state from a config and a seed."""
    if config.n_nodes < 1:
        raise ValueError("scenario needs at least one node")
    if not config.forks:
        raise ValueError("scenario needs at least one fork")
    run_seed = config.seed if seed is None else seed
    rng = random.Random(run_seed)
    stakes = _draw_stakes(config, rng)
    stakes, forks = _assign(config, stakes, rng)
    ids = [node_id_for_index(i) for i in range(config.n_nodes)]
    topology = build_topology(ids, config.k)
    nodes = [SimNode(id=i, stake=s, fork=f) for i, s, f in zip(ids, stakes, forks)]
    return ScenarioState(
        nodes=nodes,
        topology=topology,
        fork_set=frozenset(config.forks),
        rng_seed=run_seed,
        update_order=config.update_order,
    )


def make_paper_example() -> ScenarioState:
    """The worked 5-node example: stakes 10/50/20/30/80 on x/x/y/z/z,
    complete graph, deterministic node ids."""
    stakes = [10, 50, 20, 30, 80]
    forks = [PAPER_FORKS[t] for t in ("x", "x", "y", "z", "z")]
    ids = list(range(5))
    topology = build_topology(ids, k=4)
    nodes = [SimNode(id=i, stake=s, fork=f) for i, s, f in zip(ids, stakes, forks)]
    return ScenarioState(
        nodes=nodes,
        topology=topology,
        fork_set=frozenset(PAPER_FORKS.values()),
        rng_seed=0,
    )


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepPoint:
    swept_value: float
    runs: int
    win_rate: float
    mean_rounds: float
    convergence_rate: float
    metrics: tuple[RunMetrics, ...]


@dataclass(frozen=True)
class SweepResult:
    swept_param: str
    rows: tuple[SweepPoint, ...]


def run_one(config: ScenarioConfig, seed: int) -> RunMetrics:
    state = build_state(config, seed)
    return run(state, config.resolved_max_rounds())


def _attacker_fork(config: ScenarioConfig) -> ForkId | None:
    assignment = config.initial_assignment
    if isinstance(assignment, AdversarySplit):
        return assignment.attacker_fork
    return None


def _aggregate(param: str, value: float, config: ScenarioConfig, seeds_per_point: int) -> SweepPoint:
    if seeds_per_point < 1:
        raise ValueError("seeds_per_point must be >= 1")
    attacker = _attacker_fork(config)
    results = [run_one(config, config.seed + s) for s in range(seeds_per_point)]
    wins = [
        1.0 if (m.converged and attacker is not None and m.winning_fork == attacker) else 0.0
        for m in results
    ]
    return SweepPoint(
        swept_value=value,
        runs=len(results),
        win_rate=mean(wins),
        mean_rounds=mean(m.rounds for m in results),
        convergence_rate=mean(1.0 if m.converged else 0.0 for m in results),
        metrics=tuple(results),
    )


def _with_param(config: ScenarioConfig, param: str, value) -> ScenarioConfig:
    if param in ("attacker_stake_fraction", "attacker_node_fraction"):
        assignment = config.initial_assignment
        if not isinstance(assignment, AdversarySplit):
            raise ValueError(f"sweeping {param} requires an adversary assignment")
        fld = "stake_fraction" if param == "attacker_stake_fraction" else "node_fraction"
        return replace(config, initial_assignment=replace(assignment, **{fld: value}))
    if param == "k":
        return replace(config, k=int(value))
    if param == "n_nodes":
        return replace(config, n_nodes=int(value))
    raise ValueError(f"unknown sweep parameter {param!r}")


def parameter_sweep(
    config: ScenarioConfig, param: str, values, seeds_per_point: int
) -> SweepResult:
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    rows = tuple(
        _aggregate(param, v, _with_param(config, param, v), seeds_per_point) for v in values
    )
    return SweepResult(swept_param=param, rows=rows)


def attack_sweep(base: ScenarioConfig, fractions, seeds_per_point: int) -> SweepResult:
    """Sweep the attacker's share of total stake; report takeover rate."""
    return parameter_sweep(base, "attacker_stake_fraction", fractions, seeds_per_point)


def sybil_sweep(
    base: ScenarioConfig,
    attacker_node_fractions,
    attacker_stake_fraction: float,
    seeds_per_point: int,
) -> SweepResult:
    """Sweep attacker node count at a fixed sub-majority stake share."""
    if not attacker_stake_fraction < 0.5:
        raise ValueError("sybil sweep requires attacker stake fraction < 0.5")
    assignment = base.initial_assignment
    if not isinstance(assignment, AdversarySplit):
        raise ValueError("sybil sweep requires an adversary assignment")
    base = replace(
        base,
        initial_assignment=replace(assignment, stake_fraction=attacker_stake_fraction),
    )
    return parameter_sweep(base, "attacker_node_fraction", attacker_node_fractions, seeds_per_point)
