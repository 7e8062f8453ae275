"""MaGPoS: stake-weighted energy-minimization consensus, simulated.

Nodes on an XOR-metric peer topology resolve fork conflicts by picking
the fork that minimizes a stake-weighted exchange energy over their
nearest neighbors. The package provides the fork-choice rule, a
deterministic simulation engine, attack/sybil sweep harnesses, and a
dipole-lattice analogue of the same relaxation behavior.
"""

from .backend import BACKEND
from .consensus import (
    choose_fork,
    choose_fork_paper_mode,
    local_energy,
    local_energy_paper_mode,
    support_weight,
)
from .core import SimNode, agreement
from .engine import (
    RunMetrics,
    ScenarioState,
    UpdateOrder,
    detect_conflicts,
    node_step,
    run,
    stake_majority_oracle,
    stake_shares,
)
from .scenarios import (
    AdversarySplit,
    ExplicitAssignment,
    ExplicitStake,
    ParetoStake,
    RandomAssignment,
    ScenarioConfig,
    UniformStake,
    attack_sweep,
    build_state,
    make_paper_example,
    parameter_sweep,
    sybil_sweep,
)
from .xor_topology import Topology, build_topology, undirected_peer_graph, xor_distance

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AdversarySplit",
    "ExplicitAssignment",
    "ExplicitStake",
    "ParetoStake",
    "RandomAssignment",
    "RunMetrics",
    "ScenarioConfig",
    "ScenarioState",
    "SimNode",
    "Topology",
    "UniformStake",
    "UpdateOrder",
    "agreement",
    "attack_sweep",
    "build_state",
    "build_topology",
    "choose_fork",
    "choose_fork_paper_mode",
    "detect_conflicts",
    "local_energy",
    "local_energy_paper_mode",
    "make_paper_example",
    "node_step",
    "parameter_sweep",
    "run",
    "stake_majority_oracle",
    "stake_shares",
    "support_weight",
    "sybil_sweep",
    "undirected_peer_graph",
    "xor_distance",
]
