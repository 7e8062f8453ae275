"""XOR distances and k-nearest peer sets.

The simulator does not model a live Kademlia DHT; it computes each
node's exact k closest peers under the XOR metric offline, which is all
the consensus math needs. Neighbor lists are directed: a node queries
exactly the peers on its own list. The undirected union of lists is
used only for connectivity reporting.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import NodeId, validate_node_id

DEFAULT_K = 16  # typical Kademlia bucket size


def xor_distance(a: NodeId, b: NodeId) -> int:
    """XOR metric: d(a, b) = a XOR b as an unsigned integer."""
    return a ^ b


@dataclass(frozen=True)
class Topology:
    """Each node's min(k, N-1) closest peers, ascending by XOR distance.

    Ties (impossible between distinct peers of one owner, since
    d(a, x) == d(a, y) forces x == y) would break by ascending NodeId.
    """

    neighbors: dict[NodeId, tuple[NodeId, ...]]
    k: int

    def __len__(self) -> int:
        return len(self.neighbors)


def build_topology(ids, k: int) -> Topology:
    """Derive the k-nearest topology for a set of node ids.

    Deterministic for a given id set: input order is irrelevant and
    increasing k only extends each list (lists are prefixes).
    """
    id_list = sorted(ids)
    if len(id_list) != len(set(id_list)):
        raise ValueError("duplicate node ids in topology input")
    if not id_list:
        raise ValueError("topology needs at least one node")
    if k < 1:
        raise ValueError(f"neighbor budget k must be >= 1, got {k}")
    for i in id_list:
        validate_node_id(i)

    neighbors: dict[NodeId, tuple[NodeId, ...]] = {}
    for owner in id_list:
        peers = sorted(
            (i for i in id_list if i != owner),
            key=lambda p: (xor_distance(owner, p), p),
        )
        neighbors[owner] = tuple(peers[:k])
    return Topology(neighbors=neighbors, k=k)


def undirected_peer_graph(t: Topology) -> set[frozenset[NodeId]]:
    """Edge set {a, b} where a lists b or b lists a."""
    edges: set[frozenset[NodeId]] = set()
    for owner, peers in t.neighbors.items():
        for p in peers:
            edges.add(frozenset((owner, p)))
    return edges


def is_connected(t: Topology) -> bool:
    """Whether the undirected peer graph is a single component."""
    nodes = list(t.neighbors)
    if not nodes:
        return True
    adjacency: dict[NodeId, set[NodeId]] = {n: set() for n in nodes}
    for edge in undirected_peer_graph(t):
        a, b = tuple(edge)
        adjacency[a].add(b)
        adjacency[b].add(a)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        for peer in adjacency[stack.pop()]:
            if peer not in seen:
                seen.add(peer)
                stack.append(peer)
    return len(seen) == len(nodes)
