"""Von Neumann and quantum relative entropy, in bits.

The relative entropy S(rho || sigma) = tr(rho log2 rho) - tr(rho log2 sigma)
is finite exactly when the support of rho lies inside the support of
sigma; otherwise it is reported as infinite through an explicit marker on
the result rather than a bare float convention. ``rel_ent_to_marginals``
evaluates the same quantity against the product of block marginals via
the identity  S(rho || prod_i rho_i) = sum_i S(rho_i) - S(rho),  which
avoids forming the product matrix and is the fast path used by the
measure search. The spectral route is kept as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .densemat import (
    DEFAULT_SUPPORT_TOL,
    DensityMatrix,
    SitedSpace,
    _partial_trace_raw,
    permute_sites,
    tensor_product,
)
from .partitions import Partition

#: Values this far below zero are treated as roundoff and clamped to 0.
_NEG_CLAMP = 1e-10


@dataclass(frozen=True)
class RelEntResult:
    """Relative entropy value in bits, with an explicit infinity marker.

    ``support_violated`` is True exactly when the value is infinite, i.e.
    the first argument has weight outside the support of the second.
    """

    value_bits: float
    support_violated: bool

    def __post_init__(self):
        if self.support_violated != math.isinf(self.value_bits):
            raise ValueError("support_violated must match infiniteness of the value")

    @property
    def is_finite(self) -> bool:
        return not self.support_violated


def _entropy_from_eigvals(w: np.ndarray, support_tol: float) -> float:
    """Shannon entropy in bits of a clamped eigenvalue vector."""
    top = float(w[-1]) if w.size else 0.0
    if top <= 0.0:
        return 0.0
    kept = w[w > support_tol * top]
    s = float(-(kept * np.log2(kept)).sum())
    return max(s, 0.0)


def _vn_raw(mat: np.ndarray, support_tol: float) -> float:
    return _entropy_from_eigvals(np.linalg.eigvalsh(mat), support_tol)


def von_neumann_entropy(rho: DensityMatrix, support_tol: float = DEFAULT_SUPPORT_TOL) -> float:
    """S(rho) = -tr(rho log2 rho), eigenvalues below the support cutoff dropped."""
    return _vn_raw(rho.mat, support_tol)


def relative_entropy(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> RelEntResult:
    """Quantum relative entropy S(rho || sigma) in bits, spectral route.

    Parameters
    ----------
    rho, sigma : DensityMatrix
        States of equal dimension (the site structure need not match).
    support_tol : float
        Relative eigenvalue cutoff defining the support of ``sigma`` and
        the weight threshold for declaring a support violation.

    Returns
    -------
    RelEntResult
        Finite value clamped to be >= 0 when within -1e-10 of zero, or
        the infinity marker when rho has weight outside sigma's support.
    """
    if rho.dim != sigma.dim:
        raise ValueError(
            f"dimension mismatch: {rho.dim} vs {sigma.dim}"
        )
    w_s, v_s = np.linalg.eigh(sigma.mat)
    top = float(w_s[-1])
    if top <= 0.0:
        return RelEntResult(math.inf, True)
    mask = w_s > support_tol * top
    v_supp = v_s[:, mask]
    weights = np.einsum("ji,jk,ki->i", v_supp.conj(), rho.mat, v_supp).real
    leak = float(np.trace(rho.mat).real - weights.sum())
    if leak > support_tol:
        return RelEntResult(math.inf, True)
    term_rho = float(
        -_entropy_from_eigvals(np.linalg.eigvalsh(rho.mat), support_tol)
    )
    term_cross = float((weights * np.log2(w_s[mask])).sum())
    value = term_rho - term_cross
    if -_NEG_CLAMP <= value < 0.0:
        value = 0.0
    return RelEntResult(value, False)


def product_of_marginals(rho: DensityMatrix, partition: Partition) -> DensityMatrix:
    """Tensor product of the block marginals, returned in native site order.

    The product is assembled block by block (blocks in canonical order)
    and the block-major permutation -- ``partition.site_order()`` -- is
    then inverted so the result is directly comparable with ``rho``.
    """
    if partition.n_sites != rho.n_sites:
        raise ValueError(
            f"partition covers {partition.n_sites} sites, state has {rho.n_sites}"
        )
    dims = rho.space.local_dims
    out = None
    for block in partition.blocks:
        marg = _partial_trace_raw(rho.mat, dims, list(block))
        out = marg if out is None else tensor_product(out, marg, max_dim=rho.dim)
    order = partition.site_order()
    block_space = SitedSpace(tuple(dims[s] for s in order))
    stacked = DensityMatrix(block_space, 0.5 * (out + out.conj().T), check=False)
    pos = {site: idx for idx, site in enumerate(order)}
    return permute_sites(stacked, tuple(pos[j] for j in range(rho.n_sites)))


def rel_ent_to_marginals(
    rho: DensityMatrix,
    partition: Partition,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> float:
    """S(rho || product of block marginals) via the entropy identity.

    Equals ``sum_blocks S(rho_block) - S(rho)``; always finite because a
    state is never supported outside the product of its own marginals.
    """
    if partition.n_sites != rho.n_sites:
        raise ValueError(
            f"partition covers {partition.n_sites} sites, state has {rho.n_sites}"
        )
    dims = rho.space.local_dims
    total = -_vn_raw(rho.mat, support_tol)
    for block in partition.blocks:
        total += _vn_raw(_partial_trace_raw(rho.mat, dims, list(block)), support_tol)
    if -_NEG_CLAMP <= total < 0.0:
        total = 0.0
    return float(total)
