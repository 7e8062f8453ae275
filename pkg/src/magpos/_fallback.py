"""Pure-Python implementations of the hot kernels.

Mirrors ``_kernels.pyx`` operation for operation (same visit order, same
summation order, same libm calls) so that results are bit-identical
between backends.
"""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi


def choose_fork_paper(self_stake, current, stakes, forks):
    """Paper-mode fork choice over a queried neighbor view.

    ``stakes``/``forks`` are parallel sequences. Candidates are the
    current fork plus every fork in the view. Tie rule: keep current if
    tied, else smallest fork id.
    """
    candidates = sorted(set(forks) | {current})
    best_fork = -1
    best_energy = None
    current_energy = None
    n = len(forks)
    for c in candidates:
        energy = -self_stake if c == current else self_stake
        for i in range(n):
            if forks[i] == c:
                energy -= stakes[i]
            else:
                energy += stakes[i]
        if best_energy is None or energy < best_energy:
            best_energy = energy
            best_fork = c
        if c == current:
            current_energy = energy
    if current_energy == best_energy:
        return current
    return best_fork


def relax_sweep(angles, pinned, order):
    """One Gauss-Seidel sweep of circular-mean coordinate descent.

    ``angles`` is a 2-D float64 array mutated in place, ``pinned`` a
    matching boolean mask, ``order`` flat row-major cell indices to
    visit. Returns the max angular change over the sweep.
    """
    height = angles.shape[0]
    width = angles.shape[1]
    max_change = 0.0
    for flat in order:
        i = flat // width
        j = flat % width
        if pinned[i, j]:
            continue
        sin_sum = 0.0
        cos_sum = 0.0
        if i > 0:
            a = angles[i - 1, j]
            sin_sum += math.sin(a)
            cos_sum += math.cos(a)
        if i < height - 1:
            a = angles[i + 1, j]
            sin_sum += math.sin(a)
            cos_sum += math.cos(a)
        if j > 0:
            a = angles[i, j - 1]
            sin_sum += math.sin(a)
            cos_sum += math.cos(a)
        if j < width - 1:
            a = angles[i, j + 1]
            sin_sum += math.sin(a)
            cos_sum += math.cos(a)
        if sin_sum == 0.0 and cos_sum == 0.0:
            continue
        new = math.atan2(sin_sum, cos_sum)
        if new < 0.0:
            new += TWO_PI
        old = angles[i, j]
        change = abs(new - old)
        if change > math.pi:
            change = TWO_PI - change
        if change > max_change:
            max_change = change
        angles[i, j] = new
    return max_change
