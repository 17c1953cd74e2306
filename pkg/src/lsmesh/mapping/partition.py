"""Balanced k-way partitioning by recursive bisection with FM refinement."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np


class InfeasiblePartition(ValueError):
    pass


def part_sizes(num_vertices: int, num_parts: int) -> list[int]:
    """Zero-imbalance target sizes: the first ``n % k`` parts get one extra vertex."""
    q, r = divmod(num_vertices, num_parts)
    return [q + (p < r) for p in range(num_parts)]


def cut_weight(weights: np.ndarray, parts: Sequence[int]) -> float:
    """Total weight of edges whose endpoints lie in different parts."""
    p = np.asarray(parts)
    cross = p[:, None] != p[None, :]
    return float((weights * cross).sum() / 2)


def _fm_refine(w: np.ndarray, side: np.ndarray, size0: int, max_passes: int = 16) -> tuple[np.ndarray, float]:
    """Fiduccia-Mattheyses passes keeping side-0 size within one of ``size0``.

    Only exactly balanced prefixes are eligible as pass results, so the
    returned bisection has ``(side == 0).sum() == size0``.
    """
    n = len(side)
    s = np.where(side == 0, 1.0, -1.0)
    cut = (w.sum() - s @ w @ s) / 4
    for _ in range(max_passes):
        ws = w @ s
        gain = -s * ws
        locked = np.zeros(n, dtype=bool)
        dev = int((s > 0).sum()) - size0
        moves: list[int] = []
        best_cut, best_len = cut, 0
        cur = cut
        for _step in range(n):
            # moving a side-0 vertex lowers dev; only keep |dev| <= 1
            allowed = ~locked
            if dev >= 1:
                allowed &= s > 0
            elif dev <= -1:
                allowed &= s < 0
            if not allowed.any():
                break
            g = np.where(allowed, gain, -np.inf)
            v = int(np.argmax(g))
            cur -= gain[v]
            old = s[v]
            s[v] = -old
            dev += -1 if old > 0 else 1
            locked[v] = True
            moves.append(v)
            ws -= 2 * old * w[v]
            gain = -s * ws
            if dev == 0 and cur < best_cut - 1e-9:
                best_cut, best_len = cur, len(moves)
        for v in moves[best_len:]:
            s[v] = -s[v]
        if best_len == 0:
            break
        cut = best_cut
    return np.where(s > 0, 0, 1), float(cut)


def _grow_start(w: np.ndarray, size0: int, seed_vertex: int) -> np.ndarray:
    """Greedy graph growing: absorb the most strongly connected vertex each step."""
    n = w.shape[0]
    side = np.ones(n, dtype=np.int64)
    side[seed_vertex] = 0
    conn = w[seed_vertex].copy()
    for _ in range(size0 - 1):
        cand = np.where(side == 1, conn, -np.inf)
        v = int(np.argmax(cand))
        side[v] = 0
        conn += w[v]
    return side


def bisect(w: np.ndarray, size0: int, rng: np.random.Generator, starts: int = 4) -> np.ndarray:
    """Best of several seeded starts; returns 0/1 side labels with ``size0`` zeros."""
    n = w.shape[0]
    if size0 in (0, n):
        return np.full(n, 0 if size0 == n else 1, dtype=np.int64)
    best = None
    best_cut = np.inf
    for k in range(starts):
        if k % 2 == 0:
            side = np.ones(n, dtype=np.int64)
            side[rng.permutation(n)[:size0]] = 0
        else:
            side = _grow_start(w, size0, int(rng.integers(n)))
        side, cut = _fm_refine(w, side, size0)
        if cut < best_cut - 1e-9:
            best, best_cut = side, cut
    return best


def partition_graph(w: np.ndarray, num_parts: int, seed: int = 0, starts: int = 4) -> list[int]:
    """Recursive bisection of a dense symmetric weight matrix into balanced parts."""
    n = w.shape[0]
    sizes = part_sizes(n, num_parts)
    parts = np.zeros(n, dtype=np.int64)
    rng = np.random.Generator(np.random.PCG64(seed))

    def recurse(vertices: np.ndarray, lo: int, hi: int):
        if hi - lo == 1:
            parts[vertices] = lo
            return
        mid = lo + (hi - lo) // 2
        size0 = sum(sizes[lo:mid])
        sub = w[np.ix_(vertices, vertices)]
        side = bisect(sub, size0, rng, starts)
        recurse(vertices[side == 0], lo, mid)
        recurse(vertices[side == 1], mid, hi)

    recurse(np.arange(n), 0, num_parts)
    return parts.tolist()


def load_partition(path: str | Path) -> list[int]:
    """Line ``i`` holds the core index of qubit ``i``."""
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise InfeasiblePartition(f"{path}:{lineno}: expected an integer core index") from None
    return out


def save_partition(path: str | Path, core_of_qubit: Sequence[int]) -> None:
    Path(path).write_text("".join(f"{c}\n" for c in core_of_qubit))
