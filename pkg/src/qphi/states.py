"""Benchmark states, seeded random ensembles and declarative state specs."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Mapping

import numpy as np

from .densemat import DensityMatrix, SitedSpace


def _qubit_space(n: int) -> SitedSpace:
    return SitedSpace((2,) * n)


def _projector(vec: np.ndarray, space: SitedSpace) -> DensityMatrix:
    vec = vec / np.linalg.norm(vec)
    return DensityMatrix(space, np.outer(vec, vec.conj()), check=False)


def ghz(n_sites: int) -> DensityMatrix:
    """(|0..0> + |1..1>)/sqrt(2) on ``n_sites`` qubits."""
    if n_sites < 2:
        raise ValueError("ghz needs at least two sites")
    dim = 2 ** n_sites
    vec = np.zeros(dim, dtype=complex)
    vec[0] = vec[dim - 1] = 1.0
    return _projector(vec, _qubit_space(n_sites))


def w(n_sites: int) -> DensityMatrix:
    """Equal superposition of all single-excitation basis states."""
    if n_sites < 2:
        raise ValueError("w needs at least two sites")
    vec = np.zeros(2 ** n_sites, dtype=complex)
    for i in range(n_sites):
        vec[1 << (n_sites - 1 - i)] = 1.0
    return _projector(vec, _qubit_space(n_sites))


def dicke(n_sites: int, k: int) -> DensityMatrix:
    """Symmetric state with exactly ``k`` excitations over ``n_sites`` qubits."""
    if n_sites < 2:
        raise ValueError("dicke needs at least two sites")
    if not 0 <= k <= n_sites:
        raise ValueError(f"excitation count {k} out of range 0..{n_sites}")
    vec = np.zeros(2 ** n_sites, dtype=complex)
    for ones in combinations(range(n_sites), k):
        idx = sum(1 << (n_sites - 1 - i) for i in ones)
        vec[idx] = 1.0
    assert np.count_nonzero(vec) == comb(n_sites, k)
    return _projector(vec, _qubit_space(n_sites))


def basis_state(digits: str, local_dim: int = 2) -> DensityMatrix:
    """Computational basis projector from a digit string, site 0 first."""
    if not digits:
        raise ValueError("empty basis string")
    vals = []
    for ch in digits:
        if not ch.isdigit() or int(ch) >= local_dim:
            raise ValueError(f"basis character {ch!r} invalid for local dimension {local_dim}")
        vals.append(int(ch))
    space = SitedSpace((local_dim,) * len(vals))
    idx = 0
    for v in vals:
        idx = idx * local_dim + v
    vec = np.zeros(space.total_dim, dtype=complex)
    vec[idx] = 1.0
    return _projector(vec, space)


_QUBIT_CHARS = {
    "0": np.array([1.0, 0.0], dtype=complex),
    "1": np.array([0.0, 1.0], dtype=complex),
    "+": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
    "-": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0),
}


def product_state(chars: str) -> DensityMatrix:
    """Pure qubit product state from characters ``0``, ``1``, ``+``, ``-``."""
    if not chars:
        raise ValueError("empty product string")
    vec = np.array([1.0], dtype=complex)
    for ch in chars:
        if ch not in _QUBIT_CHARS:
            raise ValueError(f"product character {ch!r} not one of 0/1/+/-")
        vec = np.kron(vec, _QUBIT_CHARS[ch])
    return _projector(vec, _qubit_space(len(chars)))


def random_pure(n_sites: int, local_dim: int = 2, seed: int = 0) -> DensityMatrix:
    """Haar-random pure state; identical seeds give bitwise identical output."""
    space = SitedSpace((local_dim,) * n_sites)
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(space.total_dim) + 1j * rng.standard_normal(space.total_dim)
    return _projector(vec, space)


def random_mixed(
    n_sites: int, local_dim: int = 2, seed: int = 0, rank: int | None = None
) -> DensityMatrix:
    """Wishart-random mixed state ``G G† / tr`` with ``rank`` columns in G."""
    space = SitedSpace((local_dim,) * n_sites)
    dim = space.total_dim
    if rank is None:
        rank = dim
    if not 1 <= rank <= dim:
        raise ValueError(f"rank {rank} out of range 1..{dim}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    return DensityMatrix(space, mat, check=False)


_KINDS = ("ghz", "w", "dicke", "basis", "product", "random_pure", "random_mixed", "custom")

_ALLOWED_PARAMS = {
    "ghz": set(),
    "w": set(),
    "dicke": {"k"},
    "basis": {"string"},
    "product": {"string"},
    "random_pure": {"seed"},
    "random_mixed": {"seed", "rank"},
    "custom": {"matrix"},
}


@dataclass(frozen=True)
class StateSpec:
    """Declarative description of a state, JSON-serializable.

    ``params`` is kind-specific: ``k`` for dicke, ``string`` for
    basis/product, ``seed`` (and optional ``rank``) for the random kinds,
    ``matrix`` (serialized density matrix) for custom.
    """

    kind: str
    n_sites: int
    local_dim: int = 2
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown state kind {self.kind!r}, expected one of {_KINDS}")
        unknown = set(self.params) - _ALLOWED_PARAMS[self.kind]
        if unknown:
            raise ValueError(f"unknown params for kind {self.kind!r}: {sorted(unknown)}")
        if self.n_sites < 1:
            raise ValueError("n_sites must be positive")
        if self.local_dim < 2:
            raise ValueError("local_dim must be at least 2")

    def label(self) -> str:
        return f"{self.kind}{self.n_sites}"

    def resolve(self) -> DensityMatrix:
        """Build the density matrix this spec describes."""
        kind, n, d, p = self.kind, self.n_sites, self.local_dim, self.params
        if kind in ("ghz", "w", "dicke", "basis", "product") and d != 2:
            raise ValueError(f"kind {kind!r} is defined for qubits (local_dim 2)")
        if kind == "ghz":
            return ghz(n)
        if kind == "w":
            return w(n)
        if kind == "dicke":
            if "k" not in p:
                raise ValueError("dicke needs params.k")
            return dicke(n, int(p["k"]))
        if kind == "basis":
            s = str(p.get("string", ""))
            if len(s) != n:
                raise ValueError(f"basis string {s!r} does not cover {n} sites")
            return basis_state(s, d)
        if kind == "product":
            s = str(p.get("string", ""))
            if len(s) != n:
                raise ValueError(f"product string {s!r} does not cover {n} sites")
            return product_state(s)
        if kind == "random_pure":
            return random_pure(n, d, int(p.get("seed", 0)))
        if kind == "random_mixed":
            rank = p.get("rank")
            return random_mixed(n, d, int(p.get("seed", 0)), None if rank is None else int(rank))
        doc = p.get("matrix")
        if doc is None:
            raise ValueError("custom state needs params.matrix")
        dm = DensityMatrix.from_json_dict(doc)
        if dm.space.local_dims != (d,) * n:
            raise ValueError(
                f"custom matrix dims {dm.space.local_dims} do not match "
                f"spec ({d},)*{n}"
            )
        return dm

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n_sites": self.n_sites,
            "local_dim": self.local_dim,
            "params": dict(self.params),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "StateSpec":
        if not isinstance(doc, dict):
            raise ValueError("state spec must be a JSON object")
        unknown = set(doc) - {"kind", "n_sites", "local_dim", "params"}
        if unknown:
            raise ValueError(f"unknown state spec fields: {sorted(unknown)}")
        for req in ("kind", "n_sites"):
            if req not in doc:
                raise ValueError(f"state spec missing required field {req!r}")
        params = doc.get("params", {})
        if not isinstance(params, dict):
            raise ValueError("state spec params must be an object")
        return cls(
            kind=str(doc["kind"]),
            n_sites=int(doc["n_sites"]),
            local_dim=int(doc.get("local_dim", 2)),
            params=dict(params),
        )
