"""The fork-choice rule: per-candidate energy and energy-minimizing selection.

A node's energy for a candidate fork is the negated stake-weighted
agreement sum over itself and its queried peers. Two self-term
conventions exist side by side:

* ``local_energy`` forces the self term to agree with the candidate
  under evaluation (the node would adopt it, after all).
* ``local_energy_paper_mode`` scores the self term against the node's
  currently *recorded* fork. This is the arithmetic the live protocol
  uses; it is the only reading consistent with both the worked example
  (70 / 150 / -30) and the pseudo code, where the evaluating node is
  compared like any peer.

Both are strictly decreasing affine functions of the candidate's stake
support, so they share their argmin with ``support_weight``'s argmax;
that equivalence is property-tested rather than assumed.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .core import Energy, ForkId, Stake, agreement

# A neighbor view is the (stake, fork) pairs observed from queried
# peers. Order-insensitive: energy is a sum.
NeighborView = Sequence[tuple[Stake, ForkId]]


def local_energy(self_stake: Stake, self_candidate: ForkId, view: NeighborView) -> Energy:
    """Energy of a candidate with the self term forced to agree.

    value = -(self_stake + sum of s * agreement(candidate, f) over the view).
    """
    total = self_stake
    for stake, fork in view:
        total += stake * agreement(self_candidate, fork)
    return -total


def local_energy_paper_mode(
    self_entry: tuple[Stake, ForkId], candidate: ForkId, view: NeighborView
) -> Energy:
    """Energy of a candidate with the self term scored like a peer.

    value = -sum of s * agreement(candidate, f) over self_entry + view,
    where the self entry carries the node's recorded fork.
    """
    self_stake, self_fork = self_entry
    total = self_stake * agreement(candidate, self_fork)
    for stake, fork in view:
        total += stake * agreement(candidate, fork)
    return -total


def support_weight(candidate: ForkId, self_stake: Stake, view: NeighborView) -> Stake:
    """Self stake plus all view stake recorded on the candidate.

    Independent oracle for the fork-choice rule: every energy variant
    in this module is minimized exactly where support is maximized.
    """
    return self_stake + sum(s for s, f in view if f == candidate)


def _pick_minimum(
    energies: dict[ForkId, Energy], current: ForkId
) -> ForkId:
    """Tie rule: keep current if it is among the minima, else smallest id."""
    lowest = min(energies.values())
    if energies.get(current) == lowest:
        return current
    return min(f for f, e in energies.items() if e == lowest)


def choose_fork(
    self_stake: Stake,
    current: ForkId,
    candidates: Iterable[ForkId],
    view: NeighborView,
) -> ForkId:
    """Candidate with minimum ``local_energy``; deterministic tie rule."""
    energies = {c: local_energy(self_stake, c, view) for c in candidates}
    if not energies:
        raise ValueError("candidate set must be non-empty")
    return _pick_minimum(energies, current)


def choose_fork_paper_mode(
    self_stake: Stake,
    current: ForkId,
    candidates: Iterable[ForkId],
    view: NeighborView,
) -> ForkId:
    """Candidate with minimum paper-mode energy; same tie rule.

    This is the selection the simulation engine runs.
    """
    energies = {
        c: local_energy_paper_mode((self_stake, current), c, view) for c in candidates
    }
    if not energies:
        raise ValueError("candidate set must be non-empty")
    return _pick_minimum(energies, current)
