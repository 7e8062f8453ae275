"""Deterministic execution of the fork-choice protocol over a topology.

Conflict detection, neighbor queries, fork updates, and convergence
detection. One engine owns one state; all mutation is single-threaded.
Conflict flags are set by free observation of neighbor forks (modeling
piggy-backed block gossip); only the explicit fork-choice query of a
stepping node is metered as messages.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import backend
from .consensus import choose_fork_paper_mode
from .core import ForkId, NodeId, SimNode, Stake
from .xor_topology import Topology

# Above this total stake the int64 kernel could overflow; the exact
# big-int path takes over.
_INT64_STAKE_LIMIT = 1 << 62


class UpdateOrder(enum.Enum):
    ASYNC_SHUFFLED = "async"
    SYNC_SWEEP = "sync"


@dataclass
class ScenarioState:
    nodes: list[SimNode]
    topology: Topology
    fork_set: frozenset[ForkId]
    rng_seed: int = 0
    update_order: UpdateOrder = UpdateOrder.ASYNC_SHUFFLED
    round: int = 0
    message_count: int = 0
    flips: int = 0
    max_step_messages: int = 0
    _index: dict[NodeId, int] = field(init=False, repr=False)
    _use_kernel: bool = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._index = {}
        for pos, node in enumerate(self.nodes):
            if node.id in self._index:
                raise ValueError(f"duplicate node id {node.id}")
            if node.fork not in self.fork_set:
                raise ValueError(f"node {node.id} holds undeclared fork {node.fork}")
            if node.id not in self.topology.neighbors:
                raise ValueError(f"node {node.id} missing from topology")
            self._index[node.id] = pos
        total = sum(n.stake for n in self.nodes)
        self._use_kernel = (
            backend.BACKEND == "compiled"
            and total < _INT64_STAKE_LIMIT
            and all(f < _INT64_STAKE_LIMIT for f in self.fork_set)
        )

    def node(self, node_id: NodeId) -> SimNode:
        return self.nodes[self._index[node_id]]

    def total_stake(self) -> Stake:
        return sum(n.stake for n in self.nodes)


@dataclass
class RunMetrics:
    converged: bool
    rounds: int
    messages: int
    winning_fork: ForkId | None
    winning_stake_fraction: float
    flips: int


def stake_shares(state: ScenarioState) -> dict[ForkId, Fraction]:
    """Exact fraction of total stake held on each declared fork."""
    total = state.total_stake()
    shares: dict[ForkId, Fraction] = {f: Fraction(0) for f in state.fork_set}
    if total == 0:
        return shares
    for node in state.nodes:
        shares[node.fork] += Fraction(node.stake, total)
    return shares


def stake_majority_oracle(state: ScenarioState) -> ForkId:
    """Fork with maximum total stake over all nodes; ties by smallest id.

    Global oracle, independent of the per-node energy rule.
    """
    totals: dict[ForkId, Stake] = {}
    for node in state.nodes:
        totals[node.fork] = totals.get(node.fork, 0) + node.stake
    best = max(totals.values())
    return min(f for f, s in totals.items() if s == best)


def detect_conflicts(state: ScenarioState) -> ScenarioState:
    """Flag exactly the nodes with a disagreeing neighbor on their own list."""
    for node in state.nodes:
        node.conflicted = any(
            state.node(peer).fork != node.fork
            for peer in state.topology.neighbors[node.id]
        )
    return state


def _paper_choice(state: ScenarioState, node: SimNode, view: list[tuple[Stake, ForkId]]) -> ForkId:
    if state._use_kernel:
        n = len(view)
        stakes = np.fromiter((s for s, _ in view), dtype=np.int64, count=n)
        forks = np.fromiter((f for _, f in view), dtype=np.int64, count=n)
        return int(backend.choose_fork_paper(node.stake, node.fork, stakes, forks))
    candidates = {node.fork} | {f for _, f in view}
    return choose_fork_paper_mode(node.stake, node.fork, candidates, view)


def node_step(state: ScenarioState, node_id: NodeId) -> ScenarioState:
    """Query neighbors, re-choose the fork, propagate conflict flags.

    Non-conflicted nodes are skipped at zero message cost.
    """
    node = state.node(node_id)
    if not node.conflicted:
        return state
    peers = state.topology.neighbors[node_id]
    view = [(state.node(p).stake, state.node(p).fork) for p in peers]
    state.message_count += len(peers)
    if len(peers) > state.max_step_messages:
        state.max_step_messages = len(peers)

    choice = _paper_choice(state, node, view)
    if choice != node.fork:
        node.fork = choice
        state.flips += 1
        for p in peers:
            state.node(p).conflicted = True
    node.conflicted = any(f != choice for _, f in view)
    return state


def _sync_round(state: ScenarioState, conflicted: list[NodeId]) -> None:
    """All conflicted nodes choose from the round-start snapshot, then apply."""
    snapshot = {n.id: (n.stake, n.fork) for n in state.nodes}
    decisions: list[tuple[NodeId, ForkId]] = []
    for node_id in conflicted:
        node = state.node(node_id)
        peers = state.topology.neighbors[node_id]
        view = [snapshot[p] for p in peers]
        state.message_count += len(peers)
        if len(peers) > state.max_step_messages:
            state.max_step_messages = len(peers)
        decisions.append((node_id, _paper_choice(state, node, view)))
    for node_id, choice in decisions:
        node = state.node(node_id)
        if choice != node.fork:
            node.fork = choice
            state.flips += 1
    detect_conflicts(state)


def run(state: ScenarioState, max_rounds: int, on_round=None) -> RunMetrics:
    """Repeat rounds until no node is conflicted or max_rounds is hit.

    Non-convergence is a reported outcome, not an error. ``on_round``
    (if given) is called after each round with the live state.
    """
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    rng = random.Random(state.rng_seed)
    detect_conflicts(state)
    while state.round < max_rounds:
        conflicted = [n.id for n in state.nodes if n.conflicted]
        if not conflicted:
            break
        state.round += 1
        flips_before = state.flips
        if state.update_order is UpdateOrder.ASYNC_SHUFFLED:
            rng.shuffle(conflicted)
            for node_id in conflicted:
                node_step(state, node_id)
        else:
            _sync_round(state, conflicted)
        if on_round is not None:
            on_round(state)
        if state.flips == flips_before:
            # a full round without a flip is a fixed point: no step saw a
            # changed state, so every later round would repeat verbatim
            break
    return collect_metrics(state)


def collect_metrics(state: ScenarioState) -> RunMetrics:
    forks = {n.fork for n in state.nodes}
    converged = len(forks) == 1
    shares = stake_shares(state)
    if converged:
        winner: ForkId | None = next(iter(forks))
        fraction = shares[winner] if state.total_stake() > 0 else Fraction(1)
    else:
        winner = None
        fraction = max(shares.values()) if shares else Fraction(0)
    return RunMetrics(
        converged=converged,
        rounds=state.round,
        messages=state.message_count,
        winning_fork=winner,
        winning_stake_fraction=float(fraction),
        flips=state.flips,
    )
