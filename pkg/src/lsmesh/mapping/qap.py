"""Quadratic assignment with the factory pinned to site 0 (QAPFA).

A permutation ``perm`` maps facility ``i`` (0 = factory, ``k + 1`` = core k)
to site ``perm[i]``; the cost is ``sum_ij flow[i, j] * dist[perm[i], perm[j]]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EXACT_MAX_SITES = 11  # factory + 10 cores


class QAPError(ValueError):
    pass


def qap_objective(flow: np.ndarray, dist: np.ndarray, perm) -> float:
    p = np.asarray(perm)
    return float((flow * dist[np.ix_(p, p)]).sum())


def _check(flow: np.ndarray, dist: np.ndarray) -> int:
    flow = np.asarray(flow)
    dist = np.asarray(dist)
    if flow.ndim != 2 or flow.shape[0] != flow.shape[1]:
        raise QAPError(f"flow matrix must be square, got shape {flow.shape}")
    if dist.shape != flow.shape:
        raise QAPError(f"flow {flow.shape} and distance {dist.shape} dimensions disagree")
    if flow.shape[0] < 1:
        raise QAPError("need at least the factory site")
    return flow.shape[0]


def _lex_permutations(m: int) -> np.ndarray:
    """All permutations of range(m), one per row, in lexicographic order."""
    perms = np.zeros((1, 0), dtype=np.int8)
    for k in range(1, m + 1):
        # extend permutations of k-1 symbols to k symbols, keeping lex order
        blocks = []
        for first in range(k):
            rest = perms + (perms >= first)
            blocks.append(np.hstack([np.full((len(perms), 1), first, dtype=np.int8), rest.astype(np.int8)]))
        perms = np.vstack(blocks)
    return perms


def solve_qapfa_exact(flow, dist, max_sites: int = EXACT_MAX_SITES) -> tuple[tuple[int, ...], float]:
    """Exhaustive enumeration over all placements of the non-factory facilities.

    Ties go to the lexicographically smallest permutation.
    """
    flow = np.asarray(flow, dtype=float)
    dist = np.asarray(dist, dtype=float)
    n = _check(flow, dist)
    if n > max_sites:
        raise QAPError(f"exact solver is capped at {max_sites} sites, got {n}")
    m = n - 1
    if m == 0:
        return (0,), qap_objective(flow, dist, [0])

    perms = _lex_permutations(m)  # int8; facility k+1 -> site 1 + perms[:, k]
    core_d = dist[1:, 1:]
    costs = np.full(len(perms), flow[0, 0] * dist[0, 0])
    for i in range(1, n):
        pi = perms[:, i - 1]
        if flow[i, i]:
            costs += flow[i, i] * core_d[pi, pi]
        if flow[0, i] or flow[i, 0]:
            costs += flow[0, i] * dist[0, 1:][pi] + flow[i, 0] * dist[1:, 0][pi]
        for j in range(i + 1, n):
            if flow[i, j] or flow[j, i]:
                pj = perms[:, j - 1]
                costs += flow[i, j] * core_d[pi, pj] + flow[j, i] * core_d[pj, pi]
    lo = costs.min()
    best = int(np.flatnonzero(costs <= lo + 1e-9 * max(1.0, abs(lo)))[0])
    perm = (0, *(1 + int(x) for x in perms[best]))
    return perm, qap_objective(flow, dist, perm)


def swap_deltas(flow: np.ndarray, dist: np.ndarray, perm: np.ndarray) -> np.ndarray:
    """Cost change of swapping the sites of facilities i and j, for all pairs.

    Assumes symmetric flow and distance matrices.
    """
    d = dist[np.ix_(perm, perm)]
    fd = flow @ d
    g = np.diag(fd)
    # k == i and k == j terms of the pairwise sum are excluded via the +2 f*d correction
    delta = 2 * (fd + fd.T - g[:, None] - g[None, :] + 2 * flow * d)
    np.fill_diagonal(delta, 0.0)
    return delta


@dataclass(frozen=True)
class TabuParams:
    iterations_per_site: int = 1000
    tenure_low: float = 0.9
    tenure_high: float = 1.1
    iterations: int | None = None  # overrides iterations_per_site when set


def solve_qapfa_tabu(flow, dist, params: TabuParams | None = None, seed: int = 0) -> tuple[tuple[int, ...], float]:
    """Robust tabu search over pairwise swaps of non-factory facilities.

    A move is tabu when both facilities would return to sites they left
    within their tenure; tabu moves are still taken if they beat the best
    cost seen so far. Tenures are redrawn uniformly each iteration.
    """
    params = params or TabuParams()
    flow = np.asarray(flow, dtype=float)
    dist = np.asarray(dist, dtype=float)
    n = _check(flow, dist)
    if not (np.allclose(flow, flow.T) and np.allclose(dist, dist.T)):
        raise QAPError("tabu search expects symmetric flow and distance matrices")
    rng = np.random.Generator(np.random.PCG64(seed))
    perm = np.concatenate([[0], 1 + rng.permutation(n - 1)]).astype(np.int64)
    cost = qap_objective(flow, dist, perm)
    best_perm, best_cost = perm.copy(), cost
    iters = params.iterations if params.iterations is not None else params.iterations_per_site * n
    if n <= 2 or iters <= 0:
        return tuple(map(int, best_perm)), best_cost

    # tabu[i, j] = iteration before which facility i may not return to the site
    # facility j currently occupies (columns follow perm, so swaps swap columns)
    tabu = np.zeros((n, n), dtype=np.int64)
    movable = np.triu(np.ones((n, n), dtype=bool), k=1)
    movable[0, :] = False
    lo = max(1, int(np.floor(params.tenure_low * n)))
    hi = max(lo, int(np.ceil(params.tenure_high * n)))
    dp = dist[np.ix_(perm, perm)]
    delta = swap_deltas(flow, dist, perm)

    for it in range(1, iters + 1):
        blocked = (tabu > it) & (tabu.T > it)
        ok = movable & (~blocked | (cost + delta < best_cost - 1e-9))
        k = int(np.argmin(np.where(ok, delta, np.inf)))
        i, j = divmod(k, n)
        if not ok[i, j]:
            continue
        cost += float(delta[i, j])
        perm[i], perm[j] = perm[j], perm[i]
        dp[[i, j], :] = dp[[j, i], :]
        dp[:, [i, j]] = dp[:, [j, i]]
        tabu[:, [i, j]] = tabu[:, [j, i]]
        # each facility is barred from the site it just left
        tabu[i, j] = it + int(rng.integers(lo, hi + 1))
        tabu[j, i] = it + int(rng.integers(lo, hi + 1))
        _update_deltas(delta, flow, dp, i, j)
        if cost < best_cost - 1e-9:
            best_cost = cost
            best_perm = perm.copy()
    best = tuple(map(int, best_perm))
    return best, qap_objective(flow, dist, best)


def _update_deltas(delta: np.ndarray, flow: np.ndarray, dp: np.ndarray, r: int, s: int) -> None:
    """Refresh swap deltas in place after facilities r and s traded sites.

    ``dp`` is the facility-to-facility distance matrix under the new
    permutation. Pairs disjoint from {r, s} get an O(1) correction each; the
    rows and columns of r and s are recomputed.
    """
    a = flow[r] - flow[s]
    b = dp[s] - dp[r]
    delta += 2 * np.subtract.outer(a, a) * np.subtract.outer(b, b)
    g = (flow * dp).sum(axis=1)
    for x in (r, s):
        row = 2 * (flow[x] @ dp + dp[x] @ flow - g[x] - g + 2 * flow[x] * dp[x])
        row[x] = 0.0
        delta[x, :] = row
        delta[:, x] = row
