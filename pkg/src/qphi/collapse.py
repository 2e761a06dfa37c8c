"""Nonlinear master-equation dynamics driven by the integrated-information measure.

The equation of motion is

    d(rho)/dt = -i [H, rho]
                + sum_{n,m} h_{n,m}(phi) (L_n rho L_m'
                                          - (rho L_m' L_n + L_m' L_n rho) / 2)

with hbar = 1, a fixed operator basis ``L`` and a Hermitian positive
semidefinite rate matrix ``h`` that depends on the current measure value
phi and vanishes at phi = 0. The integrator is classical fixed-step RK4.
phi is recomputed every ``phi_refresh_stride`` steps and held constant in
between (including within a step's internal stages), so within each
refresh window the generator is an ordinary linear Lindblad map.

Each step the state is re-symmetrized, its trace renormalized when the
drift exceeds 1e-12, and its smallest eigenvalue checked; dropping below
-1e-6 aborts the run with the violation time attached.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .densemat import (
    DensityMatrix,
    SitedSpace,
    _as_square,
    _hermitian_part,
    fidelity,
    purity,
)
from .errors import IntegrationFailureError
from .qii import STRATEGIES, compute_qii
from .states import StateSpec

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def l1_coherence(rho) -> float:
    """Sum of absolute off-diagonal entries in the computational basis."""
    mat = getattr(rho, "mat", rho)
    return float(np.abs(mat).sum() - np.abs(np.diagonal(mat)).sum())


def gell_mann_matrices(dim: int) -> list[np.ndarray]:
    """The ``dim**2 - 1`` generalized Gell-Mann matrices.

    Hermitian, traceless and pairwise orthogonal under the trace inner
    product (tr(G_a G_b) = 2 delta_ab).
    """
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    mats: list[np.ndarray] = []
    for j in range(dim):
        for k in range(j + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            mats.append(sym)
            anti = np.zeros((dim, dim), dtype=complex)
            anti[j, k] = -1j
            anti[k, j] = 1j
            mats.append(anti)
    for l in range(1, dim):
        diag = np.zeros((dim, dim), dtype=complex)
        for i in range(l):
            diag[i, i] = 1.0
        diag[l, l] = -float(l)
        mats.append(diag * math.sqrt(2.0 / (l * (l + 1))))
    return mats


@dataclass(frozen=True)
class LindbladBasis:
    """Fixed operator basis the rate matrix is expressed in."""

    kind: str
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not self.operators:
            raise ValueError("basis needs at least one operator")
        ops = []
        dim = None
        for op in self.operators:
            mat = _as_square(op, "basis operator")
            if dim is None:
                dim = mat.shape[0]
            elif mat.shape[0] != dim:
                raise ValueError("basis operators must share one dimension")
            mat = mat.copy()
            mat.setflags(write=False)
            ops.append(mat)
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)

    @cached_property
    def stack(self) -> np.ndarray:
        out = np.stack(self.operators)
        out.setflags(write=False)
        return out

    @classmethod
    def site_projectors(cls, dim: int) -> "LindbladBasis":
        """The ``dim`` computational-basis projectors (pointer-basis dephasing)."""
        eye = np.eye(dim, dtype=complex)
        return cls("site_projectors", tuple(np.outer(eye[i], eye[i]) for i in range(dim)))

    @classmethod
    def gell_mann(cls, dim: int) -> "LindbladBasis":
        """Traceless orthogonal basis of ``dim**2 - 1`` operators."""
        return cls("gell_mann", tuple(gell_mann_matrices(dim)))

    @classmethod
    def custom(cls, operators: Sequence[np.ndarray]) -> "LindbladBasis":
        return cls("custom", tuple(operators))


@dataclass(frozen=True)
class CouplingSpec:
    """How the rate matrix ``h(phi)`` depends on the measure value.

    ``diagonal_linear`` uses ``h(phi) = lam * phi * I``, which is PSD for
    lam >= 0 and vanishes at phi = 0. ``custom_table`` interpolates
    sampled (phi, matrix) pairs linearly, clamped at the ends; every
    sample must be Hermitian PSD and the value at phi = 0 must be the
    zero matrix (max entry 1e-15), both checked at construction.
    """

    kind: str = "diagonal_linear"
    lam: float = 0.0
    table: tuple[tuple[float, np.ndarray], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("diagonal_linear", "custom_table"):
            raise ValueError(f"unknown coupling kind {self.kind!r}")
        if self.lam < 0.0:
            raise ValueError("lambda must be non-negative")
        if self.kind == "diagonal_linear":
            if self.table is not None:
                raise ValueError("diagonal_linear takes no table")
            return
        if not self.table:
            raise ValueError("custom_table needs at least one (phi, matrix) sample")
        rows = []
        size = None
        prev_phi = None
        for phi, mat in self.table:
            phi = float(phi)
            if phi < 0.0:
                raise ValueError("table phi values must be non-negative")
            if prev_phi is not None and phi <= prev_phi:
                raise ValueError("table phi values must be strictly increasing")
            prev_phi = phi
            mat = _hermitian_part(_as_square(mat, "rate matrix sample"), 1e-12, "rate matrix sample")
            if size is None:
                size = mat.shape[0]
            elif mat.shape[0] != size:
                raise ValueError("rate matrix samples must share one size")
            w = np.linalg.eigvalsh(mat)
            if float(w[0]) < -1e-10:
                raise ValueError(
                    f"rate matrix sample at phi={phi} is not PSD (min eig {float(w[0]):.3e})"
                )
            mat = mat.copy()
            mat.setflags(write=False)
            rows.append((phi, mat))
        object.__setattr__(self, "table", tuple(rows))
        at_zero = self._interpolate(0.0)
        if float(np.abs(at_zero).max()) > 1e-15:
            raise ValueError("rate table must vanish at phi = 0")

    def _interpolate(self, phi: float) -> np.ndarray:
        pts = self.table
        if phi <= pts[0][0]:
            return pts[0][1]
        if phi >= pts[-1][0]:
            return pts[-1][1]
        for (x0, m0), (x1, m1) in zip(pts, pts[1:]):
            if x0 <= phi <= x1:
                t = (phi - x0) / (x1 - x0)
                return (1.0 - t) * m0 + t * m1
        raise AssertionError("unreachable")

    def rate_matrix(self, phi: float, size: int) -> np.ndarray:
        """Evaluate ``h(phi)`` as a ``size x size`` matrix."""
        phi = float(phi)
        if self.kind == "diagonal_linear":
            return self.lam * phi * np.eye(size, dtype=complex)
        out = self._interpolate(phi)
        if out.shape[0] != size:
            raise ValueError(
                f"rate table is {out.shape[0]}x{out.shape[0]}, basis has {size} operators"
            )
        return np.array(out)


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration settings.

    ``phi_refresh_stride`` controls how often (in steps) the measure is
    recomputed; ``record_stride`` how often observables are sampled. The
    final state is always recorded. ``store_states`` additionally keeps a
    snapshot of the state at every recorded sample.
    """

    dt: float
    t_end: float
    phi_refresh_stride: int = 1
    qii_strategy: str = "all_partitions"
    record_stride: int = 1
    store_states: bool = False

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end < self.dt:
            raise ValueError("t_end must be at least dt")
        if self.phi_refresh_stride < 1 or self.record_stride < 1:
            raise ValueError("strides must be positive integers")
        if self.qii_strategy not in STRATEGIES:
            raise ValueError(
                f"unknown strategy {self.qii_strategy!r}, expected one of {STRATEGIES}"
            )

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled observables of one integration run.

    All series share one length. ``fidelity_series`` is present only when
    a reference state was supplied. ``max_trace_drift`` is the largest
    ``|tr(rho) - 1|`` seen after any step, before renormalization.
    """

    times: np.ndarray
    phi_series: np.ndarray
    purity_series: np.ndarray
    coherence_series: np.ndarray
    fidelity_series: np.ndarray | None
    final_state: DensityMatrix
    max_trace_drift: float
    states: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        n = len(self.times)
        for name in ("phi_series", "purity_series", "coherence_series"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length does not match times")
        if self.fidelity_series is not None and len(self.fidelity_series) != n:
            raise ValueError("fidelity_series length does not match times")
        if self.states is not None and len(self.states) != n:
            raise ValueError("states length does not match times")

    def write_csv(self, path) -> None:
        """Write ``time,phi_bits,purity,coherence_l1,fidelity`` rows.

        The header is always present; the fidelity column is left empty
        when no reference state was tracked.
        """
        lines = ["time,phi_bits,purity,coherence_l1,fidelity"]
        for i, t in enumerate(self.times):
            fid = "" if self.fidelity_series is None else repr(float(self.fidelity_series[i]))
            lines.append(
                f"{float(t)!r},{float(self.phi_series[i])!r},"
                f"{float(self.purity_series[i])!r},{float(self.coherence_series[i])!r},{fid}"
            )
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def transverse_field(n_sites: int, g: float) -> np.ndarray:
    """Open-chain Ising Hamiltonian ``-sum Z_i Z_{i+1} - g sum X_i``."""
    if n_sites < 1:
        raise ValueError("n_sites must be positive")
    dim = 2 ** n_sites
    out = np.zeros((dim, dim), dtype=complex)

    def local(op: np.ndarray, site: int) -> np.ndarray:
        mat = np.array([[1.0]], dtype=complex)
        for i in range(n_sites):
            mat = np.kron(mat, op if i == site else np.eye(2, dtype=complex))
        return mat

    for i in range(n_sites - 1):
        out -= local(_PAULI_Z, i) @ local(_PAULI_Z, i + 1)
    for i in range(n_sites):
        out -= g * local(_PAULI_X, i)
    return out


def generator(rho, hamiltonian, basis: LindbladBasis, h) -> np.ndarray:
    """Right-hand side of the master equation for a fixed rate matrix.

    Evaluates the double sum over basis operators directly. The output is
    Hermitian and traceless (up to roundoff) whenever ``h`` is Hermitian.
    """
    mat = _as_square(getattr(rho, "mat", rho), "state")
    rates = np.asarray(h, dtype=complex)
    k = len(basis)
    if rates.shape != (k, k):
        raise ValueError(f"rate matrix shape {rates.shape} does not match basis size {k}")
    if basis.dim != mat.shape[0]:
        raise ValueError("basis dimension does not match the state")
    rates = _hermitian_part(rates, 1e-10, "rate matrix")
    eig = np.linalg.eigvalsh(rates)
    if eig.size and float(eig[0]) < -1e-10:
        raise ValueError(f"rate matrix is not PSD (min eig {float(eig[0]):.3e})")
    ops = basis.stack
    out = np.zeros_like(mat)
    if hamiltonian is not None:
        ham = _as_square(hamiltonian, "hamiltonian")
        out = -1j * (ham @ mat - mat @ ham)
    lrho = ops @ mat
    out = out + np.einsum("nm,nij,mkj->ik", rates, lrho, ops.conj(), optimize=True)
    gram = np.einsum("nm,mji,njk->ik", rates, ops.conj(), ops, optimize=True)
    return out - 0.5 * (mat @ gram + gram @ mat)


@dataclass(frozen=True)
class _JumpContext:
    """Diagonalized dissipator for one frozen rate matrix."""

    gammas: np.ndarray
    ops: np.ndarray
    gram: np.ndarray


def _build_jump_context(h: np.ndarray, basis: LindbladBasis) -> _JumpContext | None:
    rates = _hermitian_part(np.asarray(h, dtype=complex), 1e-10, "rate matrix")
    w, u = np.linalg.eigh(rates)
    if w.size and float(w[0]) < -1e-10:
        raise ValueError(f"rate matrix is not PSD (min eig {float(w[0]):.3e})")
    w = np.clip(w, 0.0, None)
    live = w > 0.0
    if not bool(live.any()):
        return None
    ops = np.einsum("nk,nij->kij", u[:, live], basis.stack)
    gammas = w[live]
    gram = np.einsum("k,kji,kjl->il", gammas, ops.conj(), ops)
    return _JumpContext(gammas, ops, gram)


def _rhs(mat: np.ndarray, ham: np.ndarray | None, ctx: _JumpContext | None) -> np.ndarray:
    if ham is None:
        out = np.zeros_like(mat)
    else:
        out = -1j * (ham @ mat - mat @ ham)
    if ctx is not None:
        lrho = ctx.ops @ mat
        out = out + np.einsum("k,kij,klj->il", ctx.gammas, lrho, ctx.ops.conj())
        out = out - 0.5 * (ctx.gram @ mat + mat @ ctx.gram)
    return out


def _rk4_step(mat: np.ndarray, ham, ctx, dt: float) -> np.ndarray:
    k1 = _rhs(mat, ham, ctx)
    k2 = _rhs(mat + 0.5 * dt * k1, ham, ctx)
    k3 = _rhs(mat + 0.5 * dt * k2, ham, ctx)
    k4 = _rhs(mat + dt * k3, ham, ctx)
    return mat + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _phi_of(mat: np.ndarray, space: SitedSpace, strategy: str) -> float:
    snapshot = DensityMatrix(space, mat, check=False)
    return compute_qii(snapshot, strategy).phi_bits


def evolve(
    rho0: DensityMatrix,
    hamiltonian,
    basis: LindbladBasis,
    coupling: CouplingSpec,
    config: IntegratorConfig,
    reference: DensityMatrix | None = None,
) -> TrajectoryRecord:
    """Integrate the measure-coupled master equation from ``rho0``.

    Parameters
    ----------
    rho0 : DensityMatrix
        Initial state (needs at least two sites so the measure exists).
    hamiltonian : ndarray or None
        Hermitian matrix on the full space; ``None`` means zero.
    basis : LindbladBasis
        Operator basis for the dissipator, matching the state dimension.
    coupling : CouplingSpec
        Rate matrix as a function of the measure value.
    config : IntegratorConfig
        Step size, horizon, refresh and recording strides.
    reference : DensityMatrix, optional
        When given, a fidelity-to-reference series is recorded.

    Returns
    -------
    TrajectoryRecord
    """
    space = rho0.space
    ham = None
    if hamiltonian is not None:
        ham = _hermitian_part(_as_square(hamiltonian, "hamiltonian"), 1e-10, "hamiltonian")
        if ham.shape[0] != space.total_dim:
            raise ValueError("hamiltonian dimension does not match the state")
        if not ham.any():
            ham = None
    if basis.dim != space.total_dim:
        raise ValueError("basis dimension does not match the state")
    ref = None if reference is None else reference.mat
    k_ops = len(basis)
    n_steps = config.n_steps

    mat = np.array(rho0.mat, dtype=complex)
    times: list[float] = []
    phis: list[float] = []
    purities: list[float] = []
    coherences: list[float] = []
    fidelities: list[float] | None = [] if ref is not None else None
    snapshots: list[np.ndarray] | None = [] if config.store_states else None
    max_drift = 0.0
    held_phi = 0.0
    ctx: _JumpContext | None = None

    def record(t: float, phi: float) -> None:
        times.append(t)
        phis.append(phi)
        purities.append(purity(mat))
        coherences.append(l1_coherence(mat))
        if fidelities is not None:
            fidelities.append(fidelity(mat, ref))
        if snapshots is not None:
            snapshots.append(mat.copy())

    for k in range(n_steps):
        if k % config.phi_refresh_stride == 0:
            held_phi = _phi_of(mat, space, config.qii_strategy)
            ctx = _build_jump_context(
                coupling.rate_matrix(held_phi, k_ops), basis
            )
        if k % config.record_stride == 0:
            record(k * config.dt, held_phi)
        mat = _rk4_step(mat, ham, ctx, config.dt)
        mat = 0.5 * (mat + mat.conj().T)
        tr = float(np.trace(mat).real)
        drift = abs(tr - 1.0)
        if drift > max_drift:
            max_drift = drift
        if drift > 1e-12:
            mat = mat / tr
        low = float(np.linalg.eigvalsh(mat)[0])
        if low < -1e-6:
            t_fail = (k + 1) * config.dt
            raise IntegrationFailureError(
                f"state positivity violated (min eig {low:.3e}) at t={t_fail:.6g}",
                time=t_fail,
            )
    held_phi = _phi_of(mat, space, config.qii_strategy)
    record(n_steps * config.dt, held_phi)

    return TrajectoryRecord(
        times=np.asarray(times),
        phi_series=np.asarray(phis),
        purity_series=np.asarray(purities),
        coherence_series=np.asarray(coherences),
        fidelity_series=None if fidelities is None else np.asarray(fidelities),
        final_state=DensityMatrix(space, mat, check=False),
        max_trace_drift=max_drift,
        states=None if snapshots is None else tuple(snapshots),
    )


def half_coherence_time(times: Sequence[float], coherence: Sequence[float]) -> float:
    """First time the coherence reaches half its initial value.

    Linear interpolation between recorded samples; ``inf`` when the
    series never gets there or starts at zero coherence.
    """
    if len(times) != len(coherence) or not len(times):
        raise ValueError("times and coherence must be equal-length, non-empty")
    c0 = float(coherence[0])
    if c0 <= 1e-15:
        return math.inf
    half = 0.5 * c0
    for i in range(1, len(times)):
        ci = float(coherence[i])
        if ci <= half:
            cp = float(coherence[i - 1])
            if cp == ci:
                return float(times[i])
            frac = (cp - half) / (cp - ci)
            return float(times[i - 1]) + frac * (float(times[i]) - float(times[i - 1]))
    return math.inf


@dataclass(frozen=True)
class RaceEntry:
    """One contestant of a collapse race."""

    spec: StateSpec
    trajectory: TrajectoryRecord
    half_coherence_time: float


def race(
    specs: Sequence[StateSpec],
    hamiltonian,
    basis: LindbladBasis,
    coupling: CouplingSpec,
    config: IntegratorConfig,
    threads: int = 1,
) -> list[RaceEntry]:
    """Evolve several initial states under identical settings.

    All states must live on identical spaces. ``threads > 1`` runs the
    trajectories concurrently; results keep the input order either way.
    """
    if not specs:
        return []
    initial = [spec.resolve() for spec in specs]
    dims = initial[0].space.local_dims
    for dm in initial[1:]:
        if dm.space.local_dims != dims:
            raise ValueError("race contestants must share one space")

    def run(dm: DensityMatrix) -> TrajectoryRecord:
        return evolve(dm, hamiltonian, basis, coupling, config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(run, initial))
    else:
        records = [run(dm) for dm in initial]
    return [
        RaceEntry(spec, rec, half_coherence_time(rec.times, rec.coherence_series))
        for spec, rec in zip(specs, records)
    ]
