"""Acceptance gate: one test per shipped guarantee, one summary line each.

Each test pins a user-facing behavior of the package at its stated
tolerance: benchmark values of the integration measure, the worked
product-of-marginals matrices, agreement of the two relative-entropy
routes, statistical invariants, integrator health on the dephasing
benchmark, the unitary limit, the coherence-race signature, and the
partition search space. The conftest hook prints a [PASS]/[FAIL] line
per criterion at the end of the run.
"""

import functools
import math
import time

import numpy as np

import conftest
from qphi import (
    CouplingSpec,
    DensityMatrix,
    IntegratorConfig,
    LindbladBasis,
    Partition,
    SitedSpace,
    StateSpec,
    compute_qii,
    enumerate_partitions,
    evolve,
    fidelity,
    permute_sites,
    product_of_marginals,
    race,
    rel_ent_to_marginals,
    relative_entropy,
    unitary_propagator,
)
from qphi.states import ghz, random_mixed, random_pure, w

LOG2_3 = math.log2(3.0)


def criterion(num, text):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            try:
                fn()
            except BaseException:
                conftest.CRITERION_LINES.append(f"[FAIL] criterion {num}: {text}")
                raise
            conftest.CRITERION_LINES.append(f"[PASS] criterion {num}: {text}")

        return wrapper

    return deco


@criterion(1, "GHZ(3) measure is 2.0 bits on both evaluation routes, MIP is a bipartition")
def test_criterion_1_ghz_value_both_routes():
    start = time.monotonic()
    g = ghz(3)
    res = compute_qii(g)
    assert abs(res.phi_bits - 2.0) <= 1e-9
    assert res.mip.block_count == 2
    # spectral route, evaluated at the reported MIP and at every partition
    for p, fast_value in res.table:
        spectral = relative_entropy(g, product_of_marginals(g, p))
        assert spectral.is_finite
        assert abs(spectral.value_bits - fast_value) <= 1e-9
    spectral_min = min(
        relative_entropy(g, product_of_marginals(g, p)).value_bits
        for p in enumerate_partitions(3)
    )
    assert abs(spectral_min - 2.0) <= 1e-9
    assert time.monotonic() - start < 1.0


@criterion(2, "GHZ bipartition/tripartition values 2 and 3 bits with exact product matrices")
def test_criterion_2_ghz_fixture_matrices():
    start = time.monotonic()
    g = ghz(3)
    bi = Partition.parse("0|1,2")
    tri = Partition.parse("0|1|2")
    assert abs(rel_ent_to_marginals(g, bi) - 2.0) <= 1e-9
    assert abs(rel_ent_to_marginals(g, tri) - 3.0) <= 1e-9
    # intermediate product-of-marginals matrices, frozen entrywise
    prod_bi = product_of_marginals(g, bi).mat
    expected_bi = np.diag([1.0, 0, 0, 1.0, 1.0, 0, 0, 1.0]) / 4.0
    assert np.abs(prod_bi - expected_bi).max() <= 1e-12
    prod_tri = product_of_marginals(g, tri).mat
    assert np.abs(prod_tri - np.eye(8) / 8.0).max() <= 1e-12
    assert time.monotonic() - start < 1.0


@criterion(3, "W(3) audit: both routes agree on 2*log2(3)-4/3 and log2(27/4) bits")
def test_criterion_3_w_state_audit():
    # Values sometimes quoted for this benchmark (about 1.17 and 3.09) do
    # not follow from the definition; both independent evaluation routes
    # land on the closed forms below, so those are what the package pins.
    start = time.monotonic()
    wst = w(3)
    bi = Partition.parse("0|1,2")
    tri = Partition.parse("0|1|2")
    for p, closed_form in ((bi, 2 * LOG2_3 - 4.0 / 3.0), (tri, math.log2(27.0 / 4.0))):
        identity_route = rel_ent_to_marginals(wst, p)
        spectral_route = relative_entropy(wst, product_of_marginals(wst, p))
        assert spectral_route.is_finite
        assert abs(identity_route - spectral_route.value_bits) <= 1e-8
        assert abs(identity_route - closed_form) <= 1e-9
    assert time.monotonic() - start < 1.0


@criterion(4, "Klein inequality, route equivalence, invariances, product states")
def test_criterion_4_property_suite():
    start = time.monotonic()

    # Klein inequality on 1000 seeded pairs of mixed states, dims 2..8
    rng = np.random.default_rng(314159)
    for _ in range(1000):
        d = int(rng.integers(2, 9))
        pair = []
        for _ in range(2):
            a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            m = a @ a.conj().T
            pair.append(DensityMatrix(SitedSpace((d,)), m / np.trace(m).real))
        res = relative_entropy(pair[0], pair[1])
        assert res.is_finite
        assert res.value_bits >= -1e-10

    # identity route == spectral route on all partitions of 100 random states
    for i in range(50):
        for n in (3, 4):
            rho = random_mixed(n, seed=10_000 + 7 * i + n)
            for p in enumerate_partitions(n):
                fast = rel_ent_to_marginals(rho, p)
                slow = relative_entropy(rho, product_of_marginals(rho, p))
                assert slow.is_finite
                assert abs(fast - slow.value_bits) <= 1e-8

    # site-permutation and local-unitary invariance of the measure
    def local_unitary(n, seed):
        g = np.random.default_rng(seed)
        u = np.array([[1.0]], dtype=complex)
        for _ in range(n):
            a = g.standard_normal((2, 2)) + 1j * g.standard_normal((2, 2))
            q, r = np.linalg.qr(a)
            u = np.kron(u, q * (np.diag(r) / np.abs(np.diag(r))))
        return u

    for i in range(20):
        rho = random_mixed(3, seed=555 + i)
        base = compute_qii(rho).phi_bits
        shuffled = permute_sites(rho, (1, 2, 0))
        assert abs(compute_qii(shuffled).phi_bits - base) <= 1e-9
        u = local_unitary(3, 777 + i)
        rotated = DensityMatrix(rho.space, u @ rho.mat @ u.conj().T)
        assert abs(compute_qii(rotated).phi_bits - base) <= 1e-9

    # fully product states carry no integration
    for i in range(10):
        parts = [random_pure(1, seed=900 + 3 * i + k).mat for k in range(3)]
        mat = np.kron(np.kron(parts[0], parts[1]), parts[2])
        rho = DensityMatrix(SitedSpace((2, 2, 2)), mat)
        assert abs(compute_qii(rho).phi_bits) <= 1e-9

    assert time.monotonic() - start < 60.0


@criterion(5, "dephasing integrator: conserved trace, positivity, monotone series, 4th-order steps")
def test_criterion_5_integrator_suite():
    start = time.monotonic()
    g = ghz(3)
    basis = LindbladBasis.site_projectors(8)
    coup = CouplingSpec(kind="diagonal_linear", lam=1.0)

    # health checks at the benchmark settings (measure refreshed every 10 steps)
    cfg = IntegratorConfig(
        dt=1e-3, t_end=5.0, phi_refresh_stride=10, record_stride=10, store_states=True
    )
    rec = evolve(g, None, basis, coup, cfg)
    assert rec.max_trace_drift <= 1e-8
    for snap in rec.states:
        assert np.abs(snap - snap.conj().T).max() <= 1e-10
        assert np.linalg.eigvalsh(snap).min() >= -1e-7
    assert (np.diff(rec.purity_series) <= 1e-9).all()
    assert (np.diff(rec.phi_series) <= 1e-6).all()

    # step-halving convergence at a fixed physical refresh interval of 0.5
    # time units (the frozen-rate windows must shrink with dt, or the rate
    # freezing itself dominates the error and hides the integrator order)
    def final_mat(dt):
        stride = int(round(0.5 / dt))
        c = IntegratorConfig(dt=dt, t_end=5.0, phi_refresh_stride=stride, record_stride=10**6)
        return evolve(g, None, basis, coup, c).final_state.mat

    reference = final_mat(0.00625 / 8.0)
    errors = [np.abs(final_mat(dt) - reference).max() for dt in (0.05, 0.025, 0.0125)]
    assert errors[0] / errors[1] >= 8.0
    assert errors[1] / errors[2] >= 8.0

    assert time.monotonic() - start < 120.0


@criterion(6, "zero coupling reproduces the unitary propagator to fidelity 1-1e-8 at t=1")
def test_criterion_6_unitary_limit():
    rng = np.random.default_rng(2024)
    a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    ham = 0.5 * (a + a.conj().T)
    g = ghz(3)
    cfg = IntegratorConfig(dt=1e-3, t_end=1.0, phi_refresh_stride=10, record_stride=10**6)
    rec = evolve(g, ham, LindbladBasis.site_projectors(8), CouplingSpec("diagonal_linear", 0.0), cfg)
    u = unitary_propagator(ham, 1.0)
    exact = u @ g.mat @ u.conj().T
    assert fidelity(rec.final_state, exact) >= 1.0 - 1e-8


@criterion(7, "GHZ/W log-coherence decay-rate ratio matches the measure ratio within 5%")
def test_criterion_7_race_signature():
    specs = [
        StateSpec(kind="ghz", n_sites=3),
        StateSpec(kind="w", n_sites=3),
        StateSpec(kind="basis", n_sites=3, params={"string": "000"}),
    ]
    cfg = IntegratorConfig(dt=1e-3, t_end=0.01, phi_refresh_stride=1, record_stride=1)
    entries = race(
        specs,
        None,
        LindbladBasis.site_projectors(8),
        CouplingSpec("diagonal_linear", 1.0),
        cfg,
    )
    cg = entries[0].trajectory.coherence_series
    cw = entries[1].trajectory.coherence_series
    # finite-difference log-coherence decay rates over the first 10 steps
    rate_g = -(math.log(cg[-1]) - math.log(cg[0])) / (len(cg) - 1)
    rate_w = -(math.log(cw[-1]) - math.log(cw[0])) / (len(cw) - 1)
    measured = rate_g / rate_w
    expected = compute_qii(ghz(3)).phi_bits / compute_qii(w(3)).phi_bits
    assert abs(measured / expected - 1.0) <= 0.05

    # a pointer-basis product state does not decay at all
    cb = entries[2].trajectory.coherence_series
    assert np.abs(cb).max() <= 1e-10
    assert entries[2].half_coherence_time == math.inf


@criterion(8, "partition enumeration yields 1, 4, 14, 51 partitions for n=2..5, duplicate-free")
def test_criterion_8_partition_counts():
    for n, expected in ((2, 1), (3, 4), (4, 14), (5, 51)):
        parts = list(enumerate_partitions(n))
        assert len(parts) == expected
        assert len(set(parts)) == expected
