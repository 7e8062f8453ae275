"""Shared domain vocabulary: identifiers, stake, fork choices, node state.

All consensus arithmetic is exact integer arithmetic. Python ints are
unbounded, so stake sums never overflow; the compiled fast path guards
its own 64-bit width separately (see engine.py).
"""

from __future__ import annotations

from dataclasses import dataclass

# A node identifier is a 256-bit unsigned integer positioning the node
# in the XOR metric space. Plain ints: total order and bitwise equality
# come for free.
NodeId = int

NODE_ID_BITS = 256
NODE_ID_MAX = (1 << NODE_ID_BITS) - 1

# A fork identifier is an opaque small non-negative integer. Two forks
# are either identical or fully distinct; there is no partial agreement.
ForkId = int

# Stake in integer stake units, >= 0.
Stake = int

# Signed energy in stake units.
Energy = int


def validate_node_id(value: int) -> NodeId:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"node id must be an int, got {type(value).__name__}")
    if not 0 <= value <= NODE_ID_MAX:
        raise ValueError(f"node id out of 256-bit range: {value}")
    return value


def validate_stake(value: int) -> Stake:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"stake must be an int, got {type(value).__name__}")
    if value < 0:
        raise ValueError(f"stake must be non-negative, got {value}")
    return value


def validate_fork_id(value: int) -> ForkId:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"fork id must be an int, got {type(value).__name__}")
    if value < 0:
        raise ValueError(f"fork id must be non-negative, got {value}")
    return value


def agreement(a: ForkId, b: ForkId) -> int:
    """+1 if the two fork choices are identical, -1 otherwise.

    Disagreement maps to -1, not 0: that is the convention of the
    worked example and pseudo code this rule reproduces, and both
    conventions select the same energy minimizer (see consensus.py).
    """
    return 1 if a == b else -1


@dataclass
class SimNode:
    """A consensus participant.

    ``conflicted`` is true iff, at last observation, some neighbor held
    a different fork; it is maintained by the simulation engine.
    """

    id: NodeId
    stake: Stake
    fork: ForkId
    conflicted: bool = False

    def __post_init__(self) -> None:
        validate_node_id(self.id)
        validate_stake(self.stake)
        validate_fork_id(self.fork)
