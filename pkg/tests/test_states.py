import numpy as np
import pytest

from qphi import StateSpec, partial_trace, purity
from qphi.states import (
    basis_state,
    dicke,
    ghz,
    product_state,
    random_mixed,
    random_pure,
    w,
)


def test_ghz_entries():
    g = ghz(3)
    assert g.space.local_dims == (2, 2, 2)
    expected = np.zeros((8, 8))
    expected[0, 0] = expected[0, 7] = expected[7, 0] = expected[7, 7] = 0.5
    np.testing.assert_allclose(g.mat, expected, atol=1e-15)
    assert purity(g) == pytest.approx(1.0, abs=1e-12)


def test_w_entries():
    # site 0 is the most significant tensor factor: |100> sits at index 4
    wst = w(3)
    idx = [4, 2, 1]
    expected = np.zeros((8, 8))
    for i in idx:
        for j in idx:
            expected[i, j] = 1.0 / 3.0
    np.testing.assert_allclose(wst.mat, expected, atol=1e-15)


def test_dicke_matches_w_at_k1():
    np.testing.assert_allclose(dicke(3, 1).mat, w(3).mat, atol=1e-15)
    d22 = dicke(4, 2)
    # 6 basis states with two excitations
    assert np.count_nonzero(np.diag(d22.mat) > 1e-12) == 6
    with pytest.raises(ValueError):
        dicke(3, 4)


def test_basis_state_indexing():
    rho = basis_state("100")
    assert rho.mat[4, 4] == pytest.approx(1.0)
    assert np.abs(rho.mat).sum() == pytest.approx(1.0)
    qutrit = basis_state("12", local_dim=3)
    assert qutrit.mat[5, 5] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        basis_state("102")


def test_product_state_marginals():
    rho = product_state("0+1")
    m0 = partial_trace(rho, (0,)).mat
    m1 = partial_trace(rho, (1,)).mat
    m2 = partial_trace(rho, (2,)).mat
    np.testing.assert_allclose(m0, np.diag([1.0, 0.0]), atol=1e-14)
    np.testing.assert_allclose(m1, np.full((2, 2), 0.5), atol=1e-14)
    np.testing.assert_allclose(m2, np.diag([0.0, 1.0]), atol=1e-14)
    with pytest.raises(ValueError):
        product_state("0x1")


def test_random_states_are_deterministic():
    a = random_pure(3, seed=42)
    b = random_pure(3, seed=42)
    assert (a.mat == b.mat).all()  # bitwise, same generator stream
    c = random_mixed(3, seed=42)
    d = random_mixed(3, seed=42)
    assert (c.mat == d.mat).all()
    assert not np.allclose(random_pure(3, seed=1).mat, random_pure(3, seed=2).mat)


def test_random_mixed_rank_control():
    r = random_mixed(2, seed=0, rank=1)
    eig = np.sort(np.linalg.eigvalsh(r.mat))
    assert eig[-1] == pytest.approx(1.0, abs=1e-10)
    assert purity(r) == pytest.approx(1.0, abs=1e-10)


def test_state_spec_resolve_matches_constructors():
    cases = [
        (StateSpec(kind="ghz", n_sites=3), ghz(3)),
        (StateSpec(kind="w", n_sites=4), w(4)),
        (StateSpec(kind="dicke", n_sites=4, params={"k": 2}), dicke(4, 2)),
        (StateSpec(kind="basis", n_sites=3, params={"string": "010"}), basis_state("010")),
        (StateSpec(kind="product", n_sites=2, params={"string": "+-"}), product_state("+-")),
        (StateSpec(kind="random_pure", n_sites=2, params={"seed": 5}), random_pure(2, seed=5)),
        (
            StateSpec(kind="random_mixed", n_sites=2, params={"seed": 5}),
            random_mixed(2, seed=5),
        ),
    ]
    for spec, direct in cases:
        np.testing.assert_allclose(spec.resolve().mat, direct.mat, atol=1e-15)


def test_state_spec_rejects_bad_input():
    with pytest.raises(ValueError):
        StateSpec(kind="bell", n_sites=2)
    with pytest.raises(ValueError):
        StateSpec(kind="ghz", n_sites=3, params={"k": 1})
    with pytest.raises(ValueError):
        StateSpec(kind="basis", n_sites=3, params={"string": "01"}).resolve()
    with pytest.raises(ValueError):
        StateSpec(kind="ghz", n_sites=3, local_dim=3).resolve()


def test_state_spec_json_roundtrip():
    spec = StateSpec(kind="dicke", n_sites=4, params={"k": 2})
    doc = spec.to_json_dict()
    assert StateSpec.from_json_dict(doc) == spec
    with pytest.raises(ValueError):
        StateSpec.from_json_dict({**doc, "surprise": True})
    with pytest.raises(ValueError):
        StateSpec.from_json_dict({"kind": "ghz"})  # n_sites required
    assert spec.label() == "dicke4"


def test_custom_state_spec():
    rho = random_mixed(2, seed=8)
    spec = StateSpec(
        kind="custom",
        n_sites=2,
        params={"matrix": rho.to_json_dict()},
    )
    np.testing.assert_allclose(spec.resolve().mat, rho.mat, atol=1e-15)


def test_two_site_benchmarks_are_bell_states():
    # ghz(2) is the |00>+|11> projector, w(2) the |01>+|10> one
    phi_plus = np.zeros((4, 4))
    phi_plus[0, 0] = phi_plus[0, 3] = phi_plus[3, 0] = phi_plus[3, 3] = 0.5
    np.testing.assert_allclose(ghz(2).mat, phi_plus, atol=1e-15)
    psi_plus = np.zeros((4, 4))
    psi_plus[1, 1] = psi_plus[1, 2] = psi_plus[2, 1] = psi_plus[2, 2] = 0.5
    np.testing.assert_allclose(w(2).mat, psi_plus, atol=1e-15)
    np.testing.assert_allclose(dicke(2, 2).mat, basis_state("11").mat, atol=1e-15)


def test_benchmark_marginals_across_sizes():
    for n in range(2, 7):
        g = ghz(n)
        wn = w(n)
        for site in range(n):
            np.testing.assert_allclose(
                partial_trace(g, (site,)).mat, np.eye(2) / 2.0, atol=1e-12
            )
            np.testing.assert_allclose(
                partial_trace(wn, (site,)).mat,
                np.diag([(n - 1) / n, 1 / n]),
                atol=1e-12,
            )


def test_constructors_reject_single_site():
    for make in (ghz, w):
        with pytest.raises(ValueError):
            make(1)
    with pytest.raises(ValueError):
        dicke(3, 4)
    with pytest.raises(ValueError):
        dicke(3, -1)
