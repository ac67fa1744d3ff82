"""The projection manifold around the trace projection: tangent splitting,
the block form of its geodesics, degenerate directions, and the audit that
decides when the whole orbit sits inside it as a totally geodesic leaf.

Tangent vectors to the projection manifold at p are parametrized by
expectation-free elements x of M through v = xp + px*; anti-Hermitian x
give the orbit directions and Hermitian x the normal ones.  A direction is
degenerate when the big-manifold geodesic stays on the orbit, which
happens exactly when x is anti-Hermitian with x^2 in the subalgebra.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Inclusion, expectation_E, orthonormalize, random_antihermitian
from .basic import BasicConstruction, reduce_R
from .errors import ConstructionError, DomainError, RadiusError
from .linalg import dagger, herm_defect, op_norm, polar_antihermitian, spectral_function
from .tolerances import spectral_tol

__all__ = [
    "GrassmannTangent",
    "grassmann_tangent",
    "tangent_decompose",
    "DecomposeResult",
    "grassmann_exp_block",
    "degeneracy_test",
    "DegeneracyResult",
    "degenerate_geodesic_closed_form",
    "totally_geodesic_audit",
    "AuditReport",
    "tangent_space_comparison",
    "TangentComparison",
    "kernel_real_onb",
    "sample_degenerate_direction",
    "sample_nondegenerate_direction",
]


@dataclass(frozen=True, eq=False)
class GrassmannTangent:
    """Expectation-free parameter x with its ambient Hermitian vector."""

    x: np.ndarray        # element of M, E(x) = 0
    ambient: np.ndarray  # (D, D): left(x) p + p left(x)*


def grassmann_tangent(bc: BasicConstruction, x: np.ndarray) -> GrassmannTangent:
    tol = spectral_tol()
    e = expectation_E(bc.inc, x)
    if bc.inc.two_norm(e) > tol:
        raise DomainError("parameter has a nonzero expectation")
    lx = bc.left(x)
    p = bc.jones_p
    return GrassmannTangent(x=x, ambient=lx @ p + p @ dagger(lx))


@dataclass(frozen=True, eq=False)
class DecomposeResult:
    x: np.ndarray            # full parameter
    orbit_part: np.ndarray   # anti-Hermitian component of x
    normal_part: np.ndarray  # Hermitian component of x
    ambient_orbit: np.ndarray
    ambient_normal: np.ndarray


def tangent_decompose(bc: BasicConstruction, v: np.ndarray) -> DecomposeResult:
    """Recover the parameter x from a Hermitian p-codiagonal v = xp + px*
    via the compression reduction of v(2p - 1), and split it into the
    orbit-tangent (anti-Hermitian) and normal (Hermitian) components."""
    p = bc.jones_p
    d = bc.dim_l2
    if herm_defect(v) > spectral_tol():
        raise DomainError("tangent decomposition expects a Hermitian input")
    codiag = max(
        op_norm(p @ v @ p), op_norm((np.eye(d) - p) @ v @ (np.eye(d) - p))
    )
    if codiag > 1e-9:
        raise DomainError(f"input is not p-codiagonal (corner norm {codiag:.3e})")
    x = reduce_R(bc, v @ (2.0 * p - np.eye(d)))
    e = expectation_E(bc.inc, x)
    if bc.inc.two_norm(e) > 1e-9:
        raise ConstructionError(
            f"recovered parameter has expectation norm {bc.inc.two_norm(e):.3e}"
        )
    lx = bc.left(x)
    recon = bc.two_norm1(lx @ p + p @ dagger(lx) - v)
    if recon > 1e-9:
        raise ConstructionError(f"decomposition fails xp + px* = v by {recon:.3e}")
    xa = 0.5 * (x - dagger(x))
    xh = 0.5 * (x + dagger(x))
    la = bc.left(xa)
    lh = bc.left(xh)
    return DecomposeResult(
        x=x,
        orbit_part=xa,
        normal_part=xh,
        ambient_orbit=la @ p - p @ la,
        ambient_normal=lh @ p + p @ lh,
    )


def grassmann_exp_block(bc: BasicConstruction, x: np.ndarray, t: float) -> np.ndarray:
    """Geodesic of the projection manifold through p with codiagonal
    generator xp - px*, assembled blockwise from spectral functions of
    E(x*x) instead of a dense exponential.

    With s = sqrt(E(x*x)) and y = t x, the corner of the moved projection
    along p is cos^2(t s), the off-corners carry t sinc(2 t s), and the
    complementary corner is x t^2 sinc^2(t s) x*.
    """
    inc = bc.inc
    if inc.two_norm(expectation_E(inc, x)) > spectral_tol():
        raise DomainError("block exponential expects an expectation-free parameter")
    nx = op_norm(x)
    if nx >= np.pi:
        raise RadiusError(f"parameter op-norm {nx:.3f} reached pi; action degenerates")
    e = expectation_E(inc, dagger(x) @ x)
    s = spectral_function(e, "sqrt")
    cos_ts = spectral_function(t * s, "cos")
    cos2 = cos_ts @ cos_ts
    sinc_2ts = spectral_function(2.0 * t * s, "sinc")
    sinc_ts = spectral_function(t * s, "sinc")
    sinc2 = sinc_ts @ sinc_ts
    p = bc.jones_p
    l_cos2 = bc.left(cos2)
    l_x_sinc = bc.left(x @ sinc_2ts)
    l_x_sinc2 = bc.left(x @ sinc2)
    l_x = bc.left(x)
    q = (
        l_cos2 @ p
        + t * (l_x_sinc @ p + p @ dagger(l_x_sinc))
        + t * t * (l_x_sinc2 @ p @ dagger(l_x))
    )
    # the same curve through the generator exponential, as a consistency gate
    v = l_x @ p - p @ dagger(l_x)
    ev = spectral_function(t * v, "exp")
    dense = ev @ p @ dagger(ev)
    gap = op_norm(q - dense)
    if gap > 1e-10:
        raise ConstructionError(f"block assembly differs from the exponential by {gap:.3e}")
    return q


@dataclass(frozen=True)
class DegeneracyResult:
    degenerate: bool
    defect: float
    skew_defect: float
    square_defect: float


def degeneracy_test(inc: Inclusion, x: np.ndarray) -> DegeneracyResult:
    """Decide whether x generates a projection-manifold geodesic that stays
    on the orbit: x must be anti-Hermitian with x^2 inside the subalgebra
    (tested as the expectation residual of x^2)."""
    tol = spectral_tol()
    skew = inc.two_norm(x + dagger(x))
    x2 = x @ x
    square = inc.two_norm(x2 - expectation_E(inc, x2))
    defect = max(skew, square)
    return DegeneracyResult(
        degenerate=defect <= tol,
        defect=defect,
        skew_defect=skew,
        square_defect=square,
    )


def degenerate_geodesic_closed_form(
    bc: BasicConstruction, x: np.ndarray, t: float
) -> np.ndarray:
    """Closed form of a degenerate geodesic from the polar pieces x = u|x|:
    p cos^2(t|x|) + u p u* sin^2(t|x|) + (1/2)[u, p] sin(2t|x|).

    Verified on the fly against the conjugation curve e^{tx} p e^{-tx}.
    """
    res = degeneracy_test(bc.inc, x)
    if not res.degenerate:
        raise DomainError(
            f"direction fails the degeneracy test (defect {res.defect:.3e})"
        )
    u, absx = polar_antihermitian(x)
    cos_t = spectral_function(t * absx, "cos")
    sin_t = spectral_function(t * absx, "sin")
    sin_2t = spectral_function(2.0 * t * absx, "sin")
    p = bc.jones_p
    lu = bc.left(u)
    l_cos2 = bc.left(cos_t @ cos_t)
    l_sin2 = bc.left(sin_t @ sin_t)
    l_sin2t = bc.left(sin_2t)
    q = (
        p @ l_cos2
        + lu @ p @ dagger(lu) @ l_sin2
        + 0.5 * (lu @ p - p @ lu) @ l_sin2t
    )
    etx = spectral_function(t * x, "exp")
    letx = bc.left(etx)
    dense = letx @ p @ dagger(letx)
    gap = op_norm(q - dense)
    if gap > 1e-10:
        raise ConstructionError(
            f"closed form differs from the conjugation curve by {gap:.3e}"
        )
    return q


def _real_gram_schmidt(
    candidates: list[np.ndarray], inc: Inclusion, drop_tol: float = 1e-9
) -> list[np.ndarray]:
    """Orthonormalize under the real part of the trace inner product."""
    basis: list[np.ndarray] = []
    for cand in candidates:
        v = cand.astype(complex)
        for _ in range(2):
            for b in basis:
                v = v - float(np.real(inc.amb.inner(v, b))) * b
        nrm = np.sqrt(max(float(np.real(inc.amb.inner(v, v))), 0.0))
        if nrm > drop_tol:
            basis.append(v / nrm)
    return basis


def kernel_real_onb(inc: Inclusion) -> list[np.ndarray]:
    """Real-orthonormal anti-Hermitian basis of the expectation kernel
    (the horizontal directions at the base point)."""
    complements = []
    for b in inc.amb_basis:
        complements.append(b - expectation_E(inc, b))
    ker = orthonormalize(complements, inc.amb.inner, drop_tol=1e-9)
    cands: list[np.ndarray] = []
    for k in ker:
        cands.append(0.5 * (k - dagger(k)))
        ik = 1j * k
        cands.append(0.5 * (ik - dagger(ik)))
    return _real_gram_schmidt(cands, inc)


@dataclass(frozen=True, eq=False)
class AuditReport:
    holds: bool
    max_defect: float
    n_directions: int
    witness: tuple[np.ndarray, np.ndarray] | None
    product_closure_holds: bool
    product_max_defect: float
    degeneracy_agreement: bool


def totally_geodesic_audit(inc: Inclusion) -> AuditReport:
    """Decide whether every orbit direction is degenerate, which makes the
    orbit a totally geodesic leaf of the projection manifold.

    Polarized over a real-orthonormal anti-Hermitian basis of the
    expectation kernel: the audit holds when every anticommutator of basis
    elements has zero expectation residual.  The stricter all-products
    closure over the complex kernel basis is recorded alongside (it can
    fail while the audit holds, because only symmetrized products enter
    squares of anti-Hermitian directions).
    """
    tol = spectral_tol()
    basis = kernel_real_onb(inc)
    worst = 0.0
    witness: tuple[np.ndarray, np.ndarray] | None = None
    for i, a in enumerate(basis):
        for b in basis[i:]:
            anti = a @ b + b @ a
            defect = inc.two_norm(anti - expectation_E(inc, anti))
            if defect > worst:
                worst = defect
                if defect > tol:
                    witness = (a, b)
    holds = worst <= tol

    complements = [b - expectation_E(inc, b) for b in inc.amb_basis]
    ker = orthonormalize(complements, inc.amb.inner, drop_tol=1e-9)
    prod_worst = 0.0
    for a in ker:
        for b in ker:
            prod = a @ b
            prod_worst = max(
                prod_worst, inc.two_norm(prod - expectation_E(inc, prod))
            )

    agreement = True
    for a in basis:
        by_square = inc.two_norm(a @ a - expectation_E(inc, a @ a)) <= tol
        if degeneracy_test(inc, a).degenerate != by_square:
            agreement = False
    return AuditReport(
        holds=holds,
        max_defect=worst,
        n_directions=len(basis),
        witness=witness,
        product_closure_holds=prod_worst <= tol,
        product_max_defect=prod_worst,
        degeneracy_agreement=agreement,
    )


@dataclass(frozen=True)
class TangentComparison:
    dim_expectation_free: int
    dim_orbit_tangent: int
    span_defect: float

    @property
    def match(self) -> bool:
        return (
            self.dim_expectation_free == self.dim_orbit_tangent
            and self.span_defect <= 1e-9
        )


def tangent_space_comparison(bc: BasicConstruction) -> TangentComparison:
    """Compare {y tangent to the projection manifold at p with E1(y) = 0}
    against the orbit tangent space at p, as real spans inside the
    extension algebra."""
    inc = bc.inc
    p = bc.jones_p
    basis = kernel_real_onb(inc)
    d = bc.dim_l2

    def real_onb(mats: list[np.ndarray]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for m in mats:
            v = m.astype(complex)
            for _ in range(2):
                for b in out:
                    v = v - float(np.real(np.vdot(b, v))) / d * b
            nrm = np.sqrt(max(float(np.real(np.vdot(v, v))) / d, 0.0))
            if nrm > 1e-9:
                out.append(v / nrm)
        return out

    free = []
    for a in basis:
        la = bc.left(a)
        free.append(la @ p + p @ dagger(la))
    orbit = []
    for a in basis:
        la = bc.left(a)
        orbit.append(la @ p - p @ la)
    free_onb = real_onb(free)
    orbit_onb = real_onb(orbit)
    defect = 0.0
    for m, onb in ((free, orbit_onb), (orbit, free_onb)):
        for v in m:
            r = v.copy()
            for b in onb:
                r = r - float(np.real(np.vdot(b, r))) / d * b
            defect = max(defect, float(np.linalg.norm(r)) / np.sqrt(d))
    return TangentComparison(
        dim_expectation_free=len(free_onb),
        dim_orbit_tangent=len(orbit_onb),
        span_defect=defect,
    )


def sample_degenerate_direction(
    inc: Inclusion, rng: np.random.Generator
) -> np.ndarray:
    """Produce an anti-Hermitian direction passing the degeneracy test.

    Families whose kernel contains no nonzero degenerate direction fall
    back to a subalgebra direction (a zero-speed degenerate direction,
    since it commutes with the trace projection).
    """
    from .algebra import random_horizontal

    tag = inc.family_tag
    if tag.startswith("tensor("):
        m, k = _tensor_params(tag)
        if k == 2:
            # Hermitian left factor times a traceless anti-Hermitian 2x2
            # right factor: the square collapses to the left factor alone
            b = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            b = 0.5 * (b + dagger(b))
            w = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            w = 0.5 * (w - dagger(w))
            w = w - (np.trace(w) / 2.0) * np.eye(2)
            x = np.kron(b, w)
        else:
            # no nonzero degenerate kernel direction exists for odd k;
            # use a subalgebra direction (zero speed on the orbit)
            b = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            b = 0.5 * (b - dagger(b))
            x = np.kron(b, np.eye(k))
    elif tag.startswith("group_flip"):
        # every kernel direction is degenerate for this family
        x = random_horizontal(inc, rng)
    else:
        x = random_horizontal(inc, rng)
    res = degeneracy_test(inc, x)
    if not res.degenerate:
        raise ConstructionError(
            f"sampler produced a non-degenerate direction (defect {res.defect:.3e})"
        )
    return x


def sample_nondegenerate_direction(
    inc: Inclusion, rng: np.random.Generator, min_defect: float = 0.05
) -> np.ndarray:
    """Random anti-Hermitian direction whose square visibly escapes the
    subalgebra, for divergence tests of the degeneracy criterion."""
    for _ in range(64):
        x = random_antihermitian(rng, inc.amb_basis)
        x = x / max(op_norm(x), 1e-12)
        res = degeneracy_test(inc, x)
        if res.square_defect > min_defect:
            return x
    raise ConstructionError(
        "could not sample a direction with a visibly non-subalgebra square"
    )


def _tensor_params(tag: str) -> tuple[int, int]:
    inner = tag[len("tensor(") : -1]
    m_str, k_str = inner.split(",")
    return int(m_str), int(k_str)
