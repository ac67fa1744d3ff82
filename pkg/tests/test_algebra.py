"""Inclusions, conditional expectations, and the index inequality."""

import dataclasses

import numpy as np
import pytest

from subfactor_geo.algebra import (
    AlgebraDescriptor,
    expectation_E,
    horizontal_defect,
    horizontal_projection,
    make_custom_inclusion,
    make_group_flip_inclusion,
    make_tensor_inclusion,
    pimsner_popa_validate,
    random_antihermitian,
    random_element,
    random_hermitian,
    random_horizontal,
    random_unitary,
)
from subfactor_geo.errors import DomainError
from subfactor_geo.linalg import dagger, op_norm, unitary_defect

# sharp feasibility threshold of E(x*x) >= lam*x*x per family, worked out
# from rank-one probes: tensor(m,k) saturates at 1/(min(m,k)*k), the flip
# families at 1/2
SHARP_LAMBDA = {
    "tensor(1,2)": 0.5,
    "tensor(1,3)": 1.0 / 3.0,
    "tensor(2,2)": 0.25,
    "group_flip(scalars)": 0.5,
    "group_flip(m2)": 0.5,
}


def test_descriptor_validation():
    with pytest.raises(DomainError):
        AlgebraDescriptor((), ())
    with pytest.raises(DomainError):
        AlgebraDescriptor((2,), (0.4,))  # weights must sum to 1 against dims
    with pytest.raises(DomainError):
        AlgebraDescriptor((2, 0), (0.25, 0.5))
    with pytest.raises(DomainError):
        AlgebraDescriptor((1, 1), (1.5, -0.5))


def test_descriptor_trace_and_basis():
    desc = AlgebraDescriptor((2, 1), (0.25, 0.5))
    assert abs(desc.trace(desc.identity()) - 1.0) < 1e-15
    basis = desc.canonical_basis()
    assert basis.shape[0] == desc.dim
    assert op_norm(basis[0] - desc.identity()) < 1e-14
    gram = np.array([[desc.inner(a, b) for b in basis] for a in basis])
    assert op_norm(gram - np.eye(len(basis))) < 1e-12


def test_expectation_is_conditional(bc, rng):
    inc = bc.inc
    for _ in range(20):
        x = random_element(rng, inc.amb_basis)
        e = expectation_E(inc, x)
        # idempotent and trace preserving
        assert inc.two_norm(expectation_E(inc, e) - e) < 1e-12
        assert abs(inc.trace(e) - inc.trace(x)) < 1e-12
        # bimodular over the embedded subalgebra
        n1 = np.tensordot(rng.standard_normal(len(inc.embed_basis)), inc.embed_basis, axes=1)
        n2 = np.tensordot(rng.standard_normal(len(inc.embed_basis)), inc.embed_basis, axes=1)
        assert inc.two_norm(expectation_E(inc, n1 @ x @ n2) - n1 @ e @ n2) < 1e-10
        # positivity
        pos = expectation_E(inc, dagger(x) @ x)
        assert np.linalg.eigvalsh((pos + dagger(pos)) / 2.0).min() > -1e-10
    # fixes the subalgebra pointwise
    for b in inc.embed_basis:
        assert inc.two_norm(expectation_E(inc, b) - b) < 1e-12


def test_expectation_is_orthogonal_projection(bc, rng):
    inc = bc.inc
    for _ in range(10):
        x = random_element(rng, inc.amb_basis)
        y = x - expectation_E(inc, x)
        for b in inc.embed_basis:
            assert abs(inc.trace(dagger(b) @ y)) < 1e-12


def test_pimsner_popa_feasible_at_family_lambda(bc):
    rep = pimsner_popa_validate(bc.inc, n_samples=32, seed=3)
    assert rep.feasible
    assert rep.lam == bc.inc.lam
    assert rep.witness is None


def test_pimsner_popa_sharp_threshold(family_name, inclusions):
    inc = inclusions[family_name]
    sharp = SHARP_LAMBDA[family_name]
    below = pimsner_popa_validate(inc, n_samples=24, lam=sharp - 0.01, seed=5)
    assert below.feasible
    above = pimsner_popa_validate(inc, n_samples=24, lam=sharp + 0.01, seed=5)
    assert not above.feasible
    assert above.witness is not None
    # the witness actually violates the inequality at that lambda
    y = dagger(above.witness) @ above.witness
    d = expectation_E(inc, y) - (sharp + 0.01) * y
    assert np.linalg.eigvalsh((d + dagger(d)) / 2.0).min() < -1e-10


def test_pimsner_popa_rejects_nonpositive_lambda(inclusions):
    with pytest.raises(DomainError):
        pimsner_popa_validate(inclusions["tensor(1,2)"], lam=0.0)


def test_horizontal_projection_properties(bc, rng):
    inc = bc.inc
    for _ in range(20):
        z = horizontal_projection(inc, random_element(rng, inc.amb_basis))
        assert horizontal_defect(inc, z) < 1e-12
        assert op_norm(z + dagger(z)) < 1e-13
        assert inc.two_norm(expectation_E(inc, z)) < 1e-12
    # projects to zero exactly on the subalgebra's anti-Hermitian part
    a = random_antihermitian(rng, inc.embed_basis)
    assert inc.two_norm(horizontal_projection(inc, a)) < 1e-12


def test_random_samplers(bc, rng):
    inc = bc.inc
    h = random_hermitian(rng, inc.amb_basis)
    assert op_norm(h - dagger(h)) < 1e-13
    a = random_antihermitian(rng, inc.amb_basis)
    assert op_norm(a + dagger(a)) < 1e-13
    u = random_unitary(rng, inc.amb_basis, scale=0.7)
    assert unitary_defect(u) < 1e-12
    assert inc.project_m(u)[1] < 1e-10
    z = random_horizontal(inc, rng, op_scale=0.3)
    assert abs(op_norm(z) - 0.3) < 1e-12
    assert horizontal_defect(inc, z) < 1e-12


def test_tensor_family_parameters():
    inc = make_tensor_inclusion(2, 3)
    assert inc.lam == pytest.approx(1.0 / 9.0)
    assert inc.dim == 36
    assert inc.sub_basis.shape[0] == 4
    with pytest.raises(DomainError):
        make_tensor_inclusion(0, 2)
    with pytest.raises(DomainError):
        make_tensor_inclusion(1, 1)


def test_group_flip_rejects_bad_theta():
    desc = AlgebraDescriptor((2,), (0.5,))
    with pytest.raises(DomainError):
        make_group_flip_inclusion(desc, theta=np.diag([1.0, 2.0]))  # not unitary
    with pytest.raises(DomainError):
        make_group_flip_inclusion(desc, theta=np.diag([1.0, 1.0j]))  # order four
    lopsided = AlgebraDescriptor((1, 1), (0.25, 0.75))
    with pytest.raises(DomainError):
        make_group_flip_inclusion(lopsided)  # non-uniform trace


def test_group_flip_membership_has_linked_corners():
    inc = make_group_flip_inclusion(AlgebraDescriptor((1,), (1.0,)))
    x = np.zeros((2, 2), dtype=complex)
    x[0, 1] = 1.0  # corner without its flip partner
    _, defect = inc.project_m(x)
    assert defect > 0.1
    x[1, 0] = 1.0  # now both corners agree with the identity flip
    _, defect = inc.project_m(x)
    assert defect < 1e-12


def test_custom_inclusion_validates_lambda():
    sub = AlgebraDescriptor((1,), (1.0,))
    amb = AlgebraDescriptor((2,), (0.5,))

    def phi(b):
        return np.kron(b, np.eye(2, dtype=complex))

    inc = make_custom_inclusion(sub, amb, phi, lam=0.25, tag="scalars_in_m2")
    assert inc.lam == 0.25
    with pytest.raises(DomainError):
        # sharp threshold for scalars in M_2 is 1/2
        make_custom_inclusion(sub, amb, phi, lam=0.6)


def test_inclusion_validate_catches_broken_bases(inclusions):
    inc = inclusions["tensor(1,2)"]
    bad = dataclasses.replace(inc, amb_basis=2.0 * inc.amb_basis)
    with pytest.raises(DomainError):
        bad.validate()
    bad_lam = dataclasses.replace(inc, lam=1.5)
    with pytest.raises(DomainError):
        bad_lam.validate()


def test_coords_round_trip(bc, rng):
    inc = bc.inc
    x = random_element(rng, inc.amb_basis)
    assert inc.two_norm(inc.from_coords(inc.coords(x)) - x) < 1e-12
