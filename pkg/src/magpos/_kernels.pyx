# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: paper-mode fork choice and lattice relax sweep.

Kept in lockstep with _fallback.py; both must produce bit-identical
results for the same inputs.
"""

from libc.math cimport atan2, cos, fabs, sin, M_PI

cimport cython


def choose_fork_paper(long long self_stake, long long current,
                      long long[::1] stakes, long long[::1] forks):
    """Paper-mode fork choice over a queried neighbor view (int64 path)."""
    cdef Py_ssize_t n = forks.shape[0]
    cdef Py_ssize_t i, j, n_cand = 0
    cdef long long c, energy
    cdef long long best_fork = -1
    cdef long long best_energy = 0
    cdef long long current_energy = 0
    cdef bint have_best = False
    cdef bint seen

    # unique candidates: current plus every fork in the view
    cdef long long[64] cand_buf
    candidates = None
    if n + 1 <= 64:
        cand_buf[0] = current
        n_cand = 1
        for i in range(n):
            seen = False
            for j in range(n_cand):
                if cand_buf[j] == forks[i]:
                    seen = True
                    break
            if not seen:
                cand_buf[n_cand] = forks[i]
                n_cand += 1
        # insertion sort ascending
        for i in range(1, n_cand):
            c = cand_buf[i]
            j = i
            while j > 0 and cand_buf[j - 1] > c:
                cand_buf[j] = cand_buf[j - 1]
                j -= 1
            cand_buf[j] = c
        candidates = [cand_buf[i] for i in range(n_cand)]
    else:
        uniq = {current}
        for i in range(n):
            uniq.add(forks[i])
        candidates = sorted(uniq)

    for c in candidates:
        energy = -self_stake if c == current else self_stake
        for i in range(n):
            if forks[i] == c:
                energy -= stakes[i]
            else:
                energy += stakes[i]
        if not have_best or energy < best_energy:
            best_energy = energy
            best_fork = c
            have_best = True
        if c == current:
            current_energy = energy
    if current_energy == best_energy:
        return current
    return best_fork


def relax_sweep(double[:, ::1] angles, unsigned char[:, ::1] pinned,
                long long[::1] order):
    """One Gauss-Seidel sweep of circular-mean coordinate descent.

    Mutates ``angles`` in place; returns the max angular change.
    """
    cdef Py_ssize_t height = angles.shape[0]
    cdef Py_ssize_t width = angles.shape[1]
    cdef Py_ssize_t idx, i, j
    cdef double sin_sum, cos_sum, a, new, old, change
    cdef double max_change = 0.0
    cdef double two_pi = 2.0 * M_PI

    for idx in range(order.shape[0]):
        i = order[idx] // width
        j = order[idx] % width
        if pinned[i, j]:
            continue
        sin_sum = 0.0
        cos_sum = 0.0
        if i > 0:
            a = angles[i - 1, j]
            sin_sum += sin(a)
            cos_sum += cos(a)
        if i < height - 1:
            a = angles[i + 1, j]
            sin_sum += sin(a)
            cos_sum += cos(a)
        if j > 0:
            a = angles[i, j - 1]
            sin_sum += sin(a)
            cos_sum += cos(a)
        if j < width - 1:
            a = angles[i, j + 1]
            sin_sum += sin(a)
            cos_sum += cos(a)
        if sin_sum == 0.0 and cos_sum == 0.0:
            continue
        new = atan2(sin_sum, cos_sum)
        if new < 0.0:
            new += two_pi
        old = angles[i, j]
        change = fabs(new - old)
        if change > M_PI:
            change = two_pi - change
        if change > max_change:
            max_change = change
        angles[i, j] = new
    return max_change
