"""Extension-algebra build: frozen small cases and a Gram-solve oracle."""

import dataclasses

import numpy as np
import pytest

from subfactor_geo.algebra import (
    make_group_flip_inclusion,
    make_tensor_inclusion,
    random_element,
    random_unitary,
    AlgebraDescriptor,
)
from subfactor_geo.basic import (
    build_basic_construction,
    dump_construction,
    expectation_E1,
    recover_unitary,
    reduce_R,
    verify_construction_properties,
)
from subfactor_geo.errors import ConstructionError, DomainError, MembershipError
from subfactor_geo.linalg import dagger, load_matrix, op_norm, spectral_function


def gram_solve_expectation(bc, y):
    """Independent projection onto left_rep(M): solve the Gram system over
    the left images of the M basis instead of trusting their orthonormality."""
    imgs = [bc.left(b) for b in bc.inc.amb_basis]
    g = np.array([[np.vdot(bi, bj) for bj in imgs] for bi in imgs]) / bc.dim_l2
    v = np.array([np.vdot(bi, y) for bi in imgs]) / bc.dim_l2
    c = np.linalg.solve(g, v)
    return np.tensordot(c, np.stack(imgs), axes=1)


def test_flip_scalars_frozen_representation():
    # M = span{1, s} with s the swap, N = C: everything is computable by hand
    inc = make_group_flip_inclusion(AlgebraDescriptor((1,), (1.0,)))
    bc = build_basic_construction(inc)
    assert bc.dim_l2 == 2
    assert bc.lam == 0.5
    s = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    # left multiplication by the swap exchanges the two basis vectors
    assert op_norm(bc.left(s) - s) < 1e-13
    assert op_norm(bc.left(inc.identity()) - np.eye(2)) < 1e-13
    # the trace projection fixes the N-span, which is the first coordinate
    assert op_norm(bc.jones_p - np.diag([1.0, 0.0])) < 1e-13
    e1p = expectation_E1(bc, bc.jones_p)
    assert op_norm(e1p - 0.5 * np.eye(2)) < 1e-13
    # extension algebra is all of the 2x2 matrices
    assert bc.dim_m1 == 4


def test_tensor_trace_projection_is_first_coordinate():
    # N = C means the image of N in L2(M) is the line through the identity,
    # which is the first basis vector by construction
    for k in (2, 3):
        bc = build_basic_construction(make_tensor_inclusion(1, k))
        d = bc.dim_l2
        expected = np.zeros((d, d))
        expected[0, 0] = 1.0
        assert op_norm(bc.jones_p - expected) < 1e-12


def test_markov_compatibility(bc, rng):
    # tau1 restricted to left_rep(M) is the trace of M
    for _ in range(10):
        x = random_element(rng, bc.inc.amb_basis)
        assert abs(bc.tau1(bc.left(x)) - bc.inc.trace(x)) < 1e-12


def test_e1_matches_gram_solve_oracle(bc, rng):
    for _ in range(10):
        y = random_element(rng, bc.m1_basis.reshape(bc.dim_m1, -1)).reshape(
            bc.dim_l2, bc.dim_l2
        )
        # membership-gated route vs plain least squares
        assert bc.two_norm1(expectation_E1(bc, y) - gram_solve_expectation(bc, y)) < 1e-10


def test_e1_fixed_points_and_trace(bc, rng):
    p = bc.jones_p
    assert bc.two_norm1(expectation_E1(bc, p) - bc.lam * np.eye(bc.dim_l2)) < 1e-11
    for _ in range(10):
        x = random_element(rng, bc.inc.amb_basis)
        lx = bc.left(x)
        assert bc.two_norm1(expectation_E1(bc, lx) - lx) < 1e-11
        y = random_element(rng, bc.m1_basis.reshape(bc.dim_m1, -1)).reshape(
            bc.dim_l2, bc.dim_l2
        )
        assert abs(bc.tau1(expectation_E1(bc, y)) - bc.tau1(y)) < 1e-12


def test_e1_m_bimodularity(bc, rng):
    for _ in range(10):
        a = bc.left(random_element(rng, bc.inc.amb_basis))
        b = bc.left(random_element(rng, bc.inc.amb_basis))
        y = random_element(rng, bc.m1_basis.reshape(bc.dim_m1, -1)).reshape(
            bc.dim_l2, bc.dim_l2
        )
        lhs = expectation_E1(bc, a @ y @ b)
        rhs = a @ expectation_E1(bc, y) @ b
        assert bc.two_norm1(lhs - rhs) < 1e-10


def test_sandwich_identity(bc, rng):
    # E1(a p b) = lam * a b for a, b in left_rep(M)
    for _ in range(10):
        a = bc.left(random_element(rng, bc.inc.amb_basis))
        b = bc.left(random_element(rng, bc.inc.amb_basis))
        lhs = expectation_E1(bc, a @ bc.jones_p @ b)
        assert bc.two_norm1(lhs - bc.lam * (a @ b)) < 1e-10


def test_compression_implements_expectation(bc, rng):
    from subfactor_geo.algebra import expectation_E

    p = bc.jones_p
    for _ in range(10):
        x = random_element(rng, bc.inc.amb_basis)
        lhs = p @ bc.left(x) @ p
        rhs = bc.left(expectation_E(bc.inc, x)) @ p
        assert op_norm(lhs - rhs) < 1e-11


def test_scaled_compressions_are_orthonormal(bc):
    # {left(b_i) p / sqrt(lam)} is tau1-orthonormal
    ims = np.stack([bc.left(b) @ bc.jones_p for b in bc.inc.amb_basis]) / np.sqrt(bc.lam)
    gram = np.einsum("ars,brs->ab", ims.conj(), ims) / bc.dim_l2
    assert op_norm(gram - np.eye(len(ims))) < 1e-11


def test_m1_basis_is_orthonormal(bc):
    gram = np.einsum("ars,brs->ab", bc.m1_basis.conj(), bc.m1_basis) / bc.dim_l2
    assert op_norm(gram - np.eye(bc.dim_m1)) < 1e-10


def test_m1_dimension_matches_structure(constructions):
    # N = C cases: M1 is the full matrix algebra on L2(M)
    for name in ("tensor(1,2)", "tensor(1,3)", "group_flip(scalars)"):
        bc = constructions[name]
        assert bc.dim_m1 == bc.dim_l2**2


def test_e1_rejects_outside_elements(constructions, rng):
    bc = constructions["tensor(2,2)"]
    y = rng.standard_normal((bc.dim_l2, bc.dim_l2)) + 1j * rng.standard_normal(
        (bc.dim_l2, bc.dim_l2)
    )
    if bc.membership_defect(y) > 1e-6:
        with pytest.raises(MembershipError):
            expectation_E1(bc, y)


def test_reduce_r_left_inverse(bc, rng):
    for _ in range(10):
        a = random_element(rng, bc.inc.amb_basis)
        m = reduce_R(bc, bc.left(a) @ bc.jones_p)
        assert bc.inc.two_norm(m - a) < 1e-10


def test_recover_unitary_from_disguised_omega(bc, rng):
    p = bc.jones_p
    comp = np.eye(bc.dim_l2) - p
    for _ in range(8):
        v = random_unitary(rng, bc.inc.amb_basis, scale=0.6)
        # hide the unitary behind a p-commuting extension unitary
        w = random_element(rng, bc.m1_basis.reshape(bc.dim_m1, -1)).reshape(
            bc.dim_l2, bc.dim_l2
        )
        w = w - dagger(w)
        c = spectral_function(p @ w @ p + comp @ w @ comp, "exp")
        omega = bc.left(v) @ c
        u = recover_unitary(bc, omega)
        assert op_norm(bc.left(u) @ p - omega @ p) < 1e-9
        assert op_norm(dagger(u) @ u - bc.inc.identity()) < 1e-9


def test_recover_unitary_rejects_non_unitary(bc):
    with pytest.raises(DomainError):
        recover_unitary(bc, 0.5 * np.eye(bc.dim_l2))


def test_all_eight_properties_pass(bc):
    rep = verify_construction_properties(bc, n_samples=12, seed=1)
    assert rep.passed
    assert tuple(r.index for r in rep.records) == tuple(range(1, 9))
    assert all(r.worst_defect <= 1e-9 for r in rep.records)


def test_property_report_center_dimension(constructions):
    rep = verify_construction_properties(constructions["tensor(2,2)"], n_samples=6, seed=1)
    rec = rep.records[0]
    # extension of a factor inclusion is a factor
    assert rec.detail["center_dim"] == 1


def test_wrong_lambda_fails_loudly():
    inc = make_tensor_inclusion(1, 2)
    bad = dataclasses.replace(inc, lam=0.3)
    with pytest.raises(ConstructionError) as err:
        build_basic_construction(bad)
    assert "property" in str(err.value)


def test_dump_construction_round_trip(tmp_path, constructions):
    bc = constructions["group_flip(scalars)"]
    names = dump_construction(bc, tmp_path, config_hash="cafe")
    assert "jones_p.txt" in names
    p = load_matrix((tmp_path / "jones_p.txt").read_text())
    assert op_norm(p - bc.jones_p) < 1e-14
    manifest = (tmp_path / "manifest.json").read_text()
    assert "cafe" in manifest
