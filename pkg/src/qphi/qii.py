"""Integrated-information measure and minimum-information-partition search.

The measure of a state is the smallest relative entropy between the state
and a product of its marginals, minimized over site partitions with at
least two blocks. The partition achieving the minimum is the minimum
information partition (MIP); ties go to the partition met first in
enumeration order. Block entropies are memoized across partitions, since
the same block recurs in many of them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .densemat import DEFAULT_SUPPORT_TOL, DensityMatrix, _partial_trace_raw
from .entropy import _NEG_CLAMP, _vn_raw
from .partitions import (
    DEFAULT_MAX_SITES,
    Partition,
    bipartitions_only,
    enumerate_partitions,
)

STRATEGIES = ("all_partitions", "bipartitions", "heuristic")


@dataclass(frozen=True)
class QiiResult:
    """Outcome of a measure search.

    ``phi_bits`` is the minimum over the evaluated table, ``mip`` the
    first partition attaining it, ``table`` every evaluated
    (partition, value) pair in evaluation order, and ``strategy`` the
    search mode that produced it.
    """

    phi_bits: float
    mip: Partition
    table: tuple[tuple[Partition, float], ...]
    strategy: str

    def to_json_dict(self) -> dict:
        return {
            "phi_bits": self.phi_bits,
            "mip": self.mip.text(),
            "strategy": self.strategy,
            "table": [
                {"partition": p.text(), "value": v} for p, v in self.table
            ],
        }


class _BlockEntropyCache:
    """Memoized block entropies for one fixed state."""

    def __init__(self, rho: DensityMatrix, support_tol: float):
        self._mat = rho.mat
        self._dims = rho.space.local_dims
        self._tol = support_tol
        self._cache: dict[tuple[int, ...], float] = {}
        self.state_entropy = _vn_raw(self._mat, support_tol)

    def block(self, sites: tuple[int, ...]) -> float:
        cached = self._cache.get(sites)
        if cached is None:
            sub = _partial_trace_raw(self._mat, self._dims, list(sites))
            cached = _vn_raw(sub, self._tol)
            self._cache[sites] = cached
        return cached

    def value(self, partition: Partition) -> float:
        total = -self.state_entropy
        for b in partition.blocks:
            total += self.block(b)
        if -_NEG_CLAMP <= total < 0.0:
            total = 0.0
        return float(total)


def compute_qii(
    rho: DensityMatrix,
    strategy: str = "all_partitions",
    max_sites: int = DEFAULT_MAX_SITES,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> QiiResult:
    """Minimize the relative entropy to marginal products over partitions.

    Parameters
    ----------
    rho : DensityMatrix
        State on at least two sites (single-site states have no
        partition and raise ``ValueError``).
    strategy : str
        ``"all_partitions"`` scans every partition (capacity-limited),
        ``"bipartitions"`` only the two-block ones, ``"heuristic"`` runs
        a greedy merge/move descent that scales past the enumeration cap
        but may return a local minimum.
    """
    n = rho.n_sites
    if n < 2:
        raise ValueError("the measure needs at least two sites")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    cache = _BlockEntropyCache(rho, support_tol)
    if strategy == "heuristic":
        table = _heuristic_table(n, cache)
    else:
        source = enumerate_partitions if strategy == "all_partitions" else bipartitions_only
        table = [(p, cache.value(p)) for p in source(n, max_sites)]
    best_idx = 0
    for idx in range(1, len(table)):
        if table[idx][1] < table[best_idx][1]:
            best_idx = idx
    mip, phi = table[best_idx]
    return QiiResult(phi, mip, tuple(table), strategy)


def qii_profile(
    rho: DensityMatrix,
    max_sites: int = DEFAULT_MAX_SITES,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> list[tuple[int, float]]:
    """Minimum value per block count, from a full-partition scan.

    Returns ``[(block_count, min_value)]`` sorted by block count; the
    global minimum over the profile equals ``compute_qii(...).phi_bits``.
    """
    result = compute_qii(rho, "all_partitions", max_sites, support_tol)
    best: dict[int, float] = {}
    for p, v in result.table:
        k = p.block_count
        if k not in best or v < best[k]:
            best[k] = v
    return sorted(best.items())


def _heuristic_table(
    n: int, cache: _BlockEntropyCache
) -> list[tuple[Partition, float]]:
    """Greedy descent over merges and single-site moves.

    Starts from the all-singletons partition and repeatedly applies the
    best strictly-improving neighbor; the table lists every candidate it
    evaluated, in evaluation order.
    """
    seen: dict[tuple[tuple[int, ...], ...], float] = {}
    table: list[tuple[Partition, float]] = []

    def evaluate(p: Partition) -> float:
        if p.blocks in seen:
            return seen[p.blocks]
        v = cache.value(p)
        seen[p.blocks] = v
        table.append((p, v))
        return v

    current = Partition(tuple((i,) for i in range(n)))
    current_val = evaluate(current)
    while True:
        best_p = None
        best_v = current_val
        for cand in _neighbors(current):
            if cand.blocks in seen:
                continue
            v = evaluate(cand)
            if v < best_v:
                best_p, best_v = cand, v
        if best_p is None:
            return table
        current, current_val = best_p, best_v


def _neighbors(part: Partition):
    """Merges of two blocks, then single-site moves, deterministic order."""
    blocks = [list(b) for b in part.blocks]
    m = len(blocks)
    if m > 2:
        for i in range(m):
            for j in range(i + 1, m):
                merged = [b for k, b in enumerate(blocks) if k not in (i, j)]
                merged.append(blocks[i] + blocks[j])
                yield Partition(tuple(tuple(b) for b in merged))
    for i in range(m):
        if len(blocks[i]) < 2:
            continue
        for site in blocks[i]:
            rest = [s for s in blocks[i] if s != site]
            for j in range(m):
                if j == i:
                    continue
                moved = [
                    rest if k == i else (blocks[k] + [site] if k == j else blocks[k])
                    for k in range(m)
                ]
                yield Partition(tuple(tuple(b) for b in moved))
            # splitting the site off into a fresh singleton block
            yield Partition(tuple(tuple(b) for b in ([rest] + [b for k, b in enumerate(blocks) if k != i] + [[site]])))
