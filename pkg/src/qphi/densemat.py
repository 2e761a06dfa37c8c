"""Dense complex linear algebra over sited tensor-product spaces.

States are plain numpy arrays wrapped with just enough structure to track
the tensor factorization (:class:`SitedSpace`) and to enforce the physical
invariants of density operators at construction time. Site 0 is the most
significant tensor factor, so for three qubits the basis vector ``|100>``
sits at row index 4. Everything here is a pure function; returned arrays
are detached from their inputs and marked read-only where feasible.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError

#: Hard cap on total Hilbert dimension (override per call where supported).
DEFAULT_MAX_DIM = 2 ** 14

#: Relative eigenvalue cutoff that separates support from numerical zero.
DEFAULT_SUPPORT_TOL = 1e-12

_HERM_TOL = 1e-12
_TRACE_TOL = 1e-10
_EIG_FLOOR = -1e-10


def _as_square(mat, name: str = "matrix") -> np.ndarray:
    """Coerce to a square complex ndarray, rejecting non-finite entries."""
    out = np.asarray(mat, dtype=complex)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite entries")
    return out


def _hermitian_part(mat: np.ndarray, tol: float, name: str = "matrix") -> np.ndarray:
    """Symmetrize ``mat`` if it is Hermitian within ``tol``, else raise."""
    dev = float(np.abs(mat - mat.conj().T).max()) if mat.size else 0.0
    scale = max(1.0, float(np.abs(mat).max())) if mat.size else 1.0
    if dev > tol * scale:
        raise ValueError(f"{name} is not Hermitian: max deviation {dev:.3e}")
    return 0.5 * (mat + mat.conj().T)


@dataclass(frozen=True)
class SitedSpace:
    """Ordered tuple of local dimensions fixing a tensor factorization.

    ``local_dims[i]`` is the dimension of site ``i``. The total dimension
    is capped (default ``2**14``); pass ``max_dim`` to lift the cap
    explicitly.
    """

    local_dims: tuple[int, ...]
    max_dim: InitVar[int] = DEFAULT_MAX_DIM

    def __post_init__(self, max_dim: int):
        dims = tuple(int(d) for d in self.local_dims)
        if not dims:
            raise ValueError("a space needs at least one site")
        if any(d < 2 for d in dims):
            raise ValueError(f"local dimensions must be >= 2, got {dims}")
        total = prod(dims)
        if total > max_dim:
            raise CapacityError(
                f"total dimension {total} exceeds the configured maximum {max_dim}"
            )
        object.__setattr__(self, "local_dims", dims)

    @property
    def n_sites(self) -> int:
        return len(self.local_dims)

    @property
    def total_dim(self) -> int:
        return prod(self.local_dims)

    def restrict(self, keep: Iterable[int]) -> "SitedSpace":
        """Sub-space on the given sites, original site order preserved."""
        sites = sorted(set(int(i) for i in keep))
        if not sites:
            raise ValueError("cannot restrict to an empty site set")
        if sites[0] < 0 or sites[-1] >= self.n_sites:
            raise ValueError(f"sites {sites} out of range for {self.n_sites} sites")
        return SitedSpace(tuple(self.local_dims[i] for i in sites))


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density operator on a :class:`SitedSpace`.

    Construction enforces Hermiticity (deviation at most 1e-12, after
    which the matrix is symmetrized), unit trace within 1e-10 and
    eigenvalues no lower than -1e-10. Internal code that has already
    established these invariants may pass ``check=False``.
    """

    space: SitedSpace
    mat: np.ndarray
    check: InitVar[bool] = True

    def __post_init__(self, check: bool):
        mat = _as_square(self.mat, "density matrix")
        if mat.shape[0] != self.space.total_dim:
            raise ValueError(
                f"matrix dimension {mat.shape[0]} does not match space "
                f"dimension {self.space.total_dim}"
            )
        if check:
            mat = _hermitian_part(mat, _HERM_TOL, "density matrix")
            tr = float(np.trace(mat).real)
            if abs(tr - 1.0) > _TRACE_TOL:
                raise ValueError(f"trace {tr!r} is not 1 within {_TRACE_TOL}")
            w = np.linalg.eigvalsh(mat)
            if float(w[0]) < _EIG_FLOOR:
                raise ValueError(
                    f"matrix has negative eigenvalue {float(w[0]):.3e}"
                )
        else:
            mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.space.total_dim

    @property
    def n_sites(self) -> int:
        return self.space.n_sites

    def to_json_dict(self) -> dict:
        """Serialize as ``{"local_dims": [...], "re": [[...]], "im": [[...]]}``."""
        return {
            "local_dims": list(self.space.local_dims),
            "re": self.mat.real.tolist(),
            "im": self.mat.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DensityMatrix":
        """Inverse of :meth:`to_json_dict`, with full validation."""
        if not isinstance(doc, dict):
            raise ValueError("serialized state must be a JSON object")
        keys = set(doc)
        if keys != {"local_dims", "re", "im"}:
            raise ValueError(
                f"serialized state needs exactly local_dims/re/im, got {sorted(keys)}"
            )
        space = SitedSpace(tuple(int(d) for d in doc["local_dims"]))
        mat = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
        return cls(space, mat)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a Hermitian matrix.

    ``eigenvalues`` are real and ascending, ``eigenvectors`` holds the
    matching orthonormal eigenvectors as columns, and ``support_rank``
    counts eigenvalues above ``support_tolerance`` relative to the largest
    eigenvalue magnitude.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    support_rank: int
    support_tolerance: float

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def tensor_product(a, b, max_dim: int = DEFAULT_MAX_DIM):
    """Kronecker product with the site-0-most-significant convention.

    Two :class:`DensityMatrix` inputs combine into a new one whose sites
    are ``a``'s followed by ``b``'s; raw arrays combine into a raw array.
    Raises :class:`CapacityError` when the combined dimension would exceed
    ``max_dim``.
    """
    am = _as_square(getattr(a, "mat", a), "left factor")
    bm = _as_square(getattr(b, "mat", b), "right factor")
    total = am.shape[0] * bm.shape[0]
    if total > max_dim:
        raise CapacityError(
            f"tensor product dimension {total} exceeds the configured maximum {max_dim}"
        )
    out = np.kron(am, bm)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        space = SitedSpace(a.space.local_dims + b.space.local_dims, max_dim=max_dim)
        return DensityMatrix(space, out, check=False)
    return out


def _partial_trace_raw(mat: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace on a raw ndarray; ``keep`` must be sorted and valid."""
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    tensor = mat.reshape(tuple(dims) + tuple(dims))
    cur = list(dims)
    for idx in sorted(traced, reverse=True):
        tensor = np.trace(tensor, axis1=idx, axis2=idx + len(cur))
        del cur[idx]
    d = prod(cur)
    return tensor.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every site not listed in ``keep``.

    Parameters
    ----------
    rho : DensityMatrix
        State on the full space.
    keep : iterable of int
        Sites retained in the output, in their original order.

    Returns
    -------
    DensityMatrix
        Reduced state on ``rho.space.restrict(keep)``. Tracing over the
        empty complement returns a matrix equal to the input.
    """
    sites = sorted(set(int(i) for i in keep))
    if not sites:
        raise ValueError("keep must name at least one site")
    if sites[0] < 0 or sites[-1] >= rho.n_sites:
        raise ValueError(f"keep={sites} out of range for {rho.n_sites} sites")
    sub = _partial_trace_raw(rho.mat, rho.space.local_dims, sites)
    sub = 0.5 * (sub + sub.conj().T)
    return DensityMatrix(rho.space.restrict(sites), sub, check=False)


def permute_sites(rho: DensityMatrix, order: Sequence[int]) -> DensityMatrix:
    """Reorder tensor factors so that output site ``j`` is input site ``order[j]``."""
    dims = rho.space.local_dims
    n = len(dims)
    perm = tuple(int(i) for i in order)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"order {perm} is not a permutation of range({n})")
    tensor = rho.mat.reshape(dims + dims)
    axes = list(perm) + [n + i for i in perm]
    new_dims = tuple(dims[i] for i in perm)
    out = tensor.transpose(axes).reshape(rho.dim, rho.dim)
    return DensityMatrix(SitedSpace(new_dims), out, check=False)


def hermitian_eig(a, support_tol: float = DEFAULT_SUPPORT_TOL) -> SpectralDecomposition:
    """Full eigensystem of a Hermitian matrix, eigenvalues ascending.

    The input must be Hermitian within 1e-10 (relative to its largest
    entry for matrices of large scale); otherwise a ``ValueError`` is
    raised. Delegates to LAPACK via ``numpy.linalg.eigh``.
    """
    mat = _as_square(a, "matrix")
    mat = _hermitian_part(mat, 1e-10, "matrix")
    w, v = np.linalg.eigh(mat)
    scale = float(np.abs(w).max()) if w.size else 0.0
    if scale <= 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(w > support_tol * scale))
    return SpectralDecomposition(w, v, rank, support_tol)


def log2_on_support(rho, support_tol: float = DEFAULT_SUPPORT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Base-2 matrix logarithm restricted to the support.

    Accepts a :class:`DensityMatrix` or a raw positive-semidefinite
    ndarray. Returns ``(log_mat, projector)`` where ``log_mat`` acts as
    log2 on the support and as zero on the kernel, and ``projector``
    projects onto the support. A zero matrix yields two zero matrices.
    Eigenvalues below -1e-10 are rejected; small negatives are clamped.
    """
    mat = getattr(rho, "mat", rho)
    mat = _as_square(mat, "matrix")
    w, v = np.linalg.eigh(_hermitian_part(mat, 1e-10, "matrix"))
    if float(w[0]) < _EIG_FLOOR:
        raise ValueError(f"matrix has negative eigenvalue {float(w[0]):.3e}")
    w = np.clip(w, 0.0, None)
    top = float(w[-1]) if w.size else 0.0
    if top <= 0.0:
        z = np.zeros_like(mat)
        return z, z.copy()
    mask = w > support_tol * top
    vs = v[:, mask]
    log_mat = (vs * np.log2(w[mask])) @ vs.conj().T
    projector = vs @ vs.conj().T
    return log_mat, projector


def unitary_propagator(h, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via spectral decomposition."""
    mat = _hermitian_part(_as_square(h, "hamiltonian"), 1e-10, "hamiltonian")
    w, v = np.linalg.eigh(mat)
    return (v * np.exp(-1j * w * float(t))) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    a = getattr(rho, "mat", rho)
    b = getattr(sigma, "mat", sigma)
    a = _as_square(a, "rho")
    b = _as_square(b, "sigma")
    if a.shape != b.shape:
        raise ValueError("fidelity requires states of equal dimension")
    wa, va = np.linalg.eigh(0.5 * (a + a.conj().T))
    sqrt_a = (va * np.sqrt(np.clip(wa, 0.0, None))) @ va.conj().T
    inner = sqrt_a @ b @ sqrt_a
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    value = float(np.sqrt(np.clip(w, 0.0, None)).sum() ** 2)
    # Roundoff in the square roots can push the value slightly past 1.
    return min(max(value, 0.0), 1.0)


def purity(rho) -> float:
    """``tr(rho^2)``, which is 1 exactly for pure states."""
    mat = getattr(rho, "mat", rho)
    return float(np.vdot(mat, mat).real)
