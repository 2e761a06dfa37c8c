"""Set partitions of site indices, canonical forms and enumeration.

A partition splits sites ``{0..n-1}`` into at least two disjoint blocks.
Canonical form sorts each block ascending and orders blocks by smallest
element. Enumeration walks restricted-growth strings depth-first, trying
the highest admissible label first, which puts the finest partition first
and ``{0 | rest}`` ahead of the other bipartitions; that fixed order is
what makes minimizer tie-breaking deterministic downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import CapacityError

#: Partition enumeration refuses to run above this many sites by default.
DEFAULT_MAX_SITES = 12


@dataclass(frozen=True)
class Partition:
    """Canonical set partition of ``{0..n-1}`` with at least two blocks."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        raw = [tuple(sorted(int(s) for s in b)) for b in self.blocks]
        if len(raw) < 2:
            raise ValueError("a partition needs at least two blocks")
        if any(not b for b in raw):
            raise ValueError("blocks must be non-empty")
        raw.sort(key=lambda b: b[0])
        flat = [s for b in raw for s in b]
        n = len(flat)
        if sorted(flat) != list(range(n)):
            raise ValueError(f"blocks {raw} do not partition range({n})")
        object.__setattr__(self, "blocks", tuple(raw))

    @property
    def n_sites(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def site_order(self) -> tuple[int, ...]:
        """Sites listed block by block (the block-major permutation)."""
        return tuple(s for b in self.blocks for s in b)

    def text(self) -> str:
        """Render as ``"0,1|2"``: blocks joined by ``|``, sites by ``,``."""
        return "|".join(",".join(str(s) for s in b) for b in self.blocks)

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.text()

    @classmethod
    def parse(cls, text: str, n_sites: int | None = None) -> "Partition":
        """Inverse of :meth:`text`; validates against ``n_sites`` if given."""
        try:
            blocks = tuple(
                tuple(int(tok) for tok in chunk.split(","))
                for chunk in text.split("|")
            )
        except ValueError as exc:
            raise ValueError(f"malformed partition text {text!r}") from exc
        part = cls(blocks)
        if n_sites is not None and part.n_sites != n_sites:
            raise ValueError(
                f"partition {text!r} covers {part.n_sites} sites, expected {n_sites}"
            )
        return part

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Build from per-site block labels (restricted-growth string)."""
        groups: dict[int, list[int]] = {}
        for site, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(site)
        return cls(tuple(tuple(b) for b in groups.values()))


def _check_capacity(n_sites: int, max_sites: int) -> None:
    if n_sites < 2 or n_sites > max_sites:
        raise CapacityError(
            f"partition enumeration supports 2..{max_sites} sites, got {n_sites}"
        )


def enumerate_partitions(n_sites: int, max_sites: int = DEFAULT_MAX_SITES) -> Iterator[Partition]:
    """Yield every partition with >= 2 blocks, descending-label order.

    The count is the Bell number of ``n_sites`` minus one (the one-block
    partition is excluded).
    """
    _check_capacity(n_sites, max_sites)
    labels = [0] * n_sites

    def rec(pos: int, prefix_max: int) -> Iterator[Partition]:
        if pos == n_sites:
            if prefix_max > 0:
                yield Partition.from_labels(labels)
            return
        for lab in range(prefix_max + 1, -1, -1):
            labels[pos] = lab
            yield from rec(pos + 1, prefix_max if lab <= prefix_max else lab)

    yield from rec(1, 0)


def bipartitions_only(n_sites: int, max_sites: int = DEFAULT_MAX_SITES) -> Iterator[Partition]:
    """Yield the ``2**(n-1) - 1`` two-block partitions, enumeration order.

    The order agrees with the relative order these partitions have inside
    :func:`enumerate_partitions`.
    """
    _check_capacity(n_sites, max_sites)
    for m in range(2 ** (n_sites - 1) - 1, 0, -1):
        labels = [0] + [(m >> (n_sites - 1 - i)) & 1 for i in range(1, n_sites)]
        yield Partition.from_labels(labels)
