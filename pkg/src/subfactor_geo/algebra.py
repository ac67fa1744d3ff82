"""Finite-dimensional tracial *-algebras, inclusions, and conditional expectations.

An algebra is described abstractly by full matrix blocks with positive trace
weights (the trace of the identity is 1).  An inclusion N <= M is stored
concretely: M lives inside an ambient matrix arena as the span of a
trace-orthonormal basis, N as the span of the images of its own basis under
a unital trace-preserving *-embedding.  The conditional expectation onto N
is the trace-orthogonal projection onto that image, which is the unique
trace-preserving expectation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import dagger, op_norm
from .tolerances import GRAM_DROP_TOL, spectral_tol

__all__ = [
    "AlgebraDescriptor",
    "Inclusion",
    "PPReport",
    "norms",
    "expectation_E",
    "horizontal_projection",
    "pimsner_popa_validate",
    "make_tensor_inclusion",
    "make_group_flip_inclusion",
    "make_custom_inclusion",
    "orthonormalize",
    "random_element",
    "random_hermitian",
    "random_antihermitian",
    "random_unitary",
    "random_horizontal",
]


@dataclass(frozen=True)
class AlgebraDescriptor:
    """Finite direct sum of full matrix blocks with a faithful tracial state.

    ``trace_weights[i]`` is the weight of a single diagonal matrix unit in
    block i, so the trace of x is sum_i trace_weights[i] * Tr(x_i) and the
    weights satisfy sum_i trace_weights[i] * block_dims[i] = 1.
    """

    block_dims: tuple[int, ...]
    trace_weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.block_dims) != len(self.trace_weights) or not self.block_dims:
            raise DomainError("block_dims and trace_weights must be equal-length and nonempty")
        if any(d < 1 for d in self.block_dims):
            raise DomainError(f"block dimensions must be positive: {self.block_dims}")
        if any(w <= 0 for w in self.trace_weights):
            raise DomainError(f"trace weights must be positive: {self.trace_weights}")
        total = sum(w * d for w, d in zip(self.trace_weights, self.block_dims))
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"trace weights must sum to 1 against block dims, got {total!r}")

    @property
    def ambient_dim(self) -> int:
        return sum(self.block_dims)

    @property
    def dim(self) -> int:
        """Complex dimension of the algebra."""
        return sum(d * d for d in self.block_dims)

    @property
    def weight_vector(self) -> np.ndarray:
        return np.concatenate(
            [np.full(d, w) for d, w in zip(self.block_dims, self.trace_weights)]
        )

    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_dim, dtype=complex)

    def trace(self, x: np.ndarray) -> complex:
        return complex(np.diag(x) @ self.weight_vector)

    def inner(self, a: np.ndarray, b: np.ndarray) -> complex:
        """Trace inner product <a, b> = tau(b* a)."""
        return complex(np.einsum("kd,kd,d->", b.conj(), a, self.weight_vector))

    def two_norm(self, x: np.ndarray) -> float:
        val = np.einsum("kd,kd,d->", x.conj(), x, self.weight_vector).real
        return float(np.sqrt(max(val, 0.0)))

    def block_matrix(self, blocks: list[np.ndarray]) -> np.ndarray:
        """Assemble a block-diagonal element from per-block matrices."""
        if len(blocks) != len(self.block_dims):
            raise DomainError("wrong number of blocks")
        out = np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        off = 0
        for blk, d in zip(blocks, self.block_dims):
            if blk.shape != (d, d):
                raise DomainError(f"block shape {blk.shape} does not match dimension {d}")
            out[off : off + d, off : off + d] = blk
            off += d
        return out

    def canonical_basis(self) -> np.ndarray:
        """Trace-orthonormal basis with the identity as its first element."""
        units = [self.identity()]
        off = 0
        for d, w in zip(self.block_dims, self.trace_weights):
            for i in range(d):
                for j in range(d):
                    e = np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
                    e[off + i, off + j] = 1.0 / np.sqrt(w)
                    units.append(e)
            off += d
        return orthonormalize(units, self.inner)


def orthonormalize(candidates, inner, drop_tol: float = GRAM_DROP_TOL) -> np.ndarray:
    """Gram-Schmidt with re-orthogonalization; drops dependent directions."""
    basis: list[np.ndarray] = []
    for cand in candidates:
        v = np.array(cand, dtype=complex)
        for _ in range(2):
            for b in basis:
                v = v - inner(v, b) * b
        nrm = np.sqrt(max(inner(v, v).real, 0.0))
        if nrm > drop_tol:
            basis.append(v / nrm)
    return np.stack(basis) if basis else np.zeros((0,) + np.shape(candidates[0]), dtype=complex)


def _coords(stack: np.ndarray, x: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return np.einsum("bkd,kd,d->b", stack.conj(), x, weights)


@dataclass(frozen=True, eq=False)
class Inclusion:
    """A unital trace-preserving inclusion N <= M realized in a matrix arena.

    ``amb_basis`` is a trace-orthonormal basis of M (first element the arena
    identity); ``embed_basis[j]`` is the image of the abstract basis element
    ``sub_basis[j]`` of N, aligned so the embedding is explicit.
    ``lam`` is the index constant of the inclusion: the trace of the
    downward projection in the extension algebra, against which all the
    geometry is normalized.
    """

    sub: AlgebraDescriptor
    amb: AlgebraDescriptor
    sub_basis: np.ndarray
    embed_basis: np.ndarray
    amb_basis: np.ndarray
    lam: float
    family_tag: str = "custom"

    @property
    def dim(self) -> int:
        return self.amb_basis.shape[0]

    @property
    def arena_dim(self) -> int:
        return self.amb.ambient_dim

    def identity(self) -> np.ndarray:
        return self.amb.identity()

    def trace(self, x: np.ndarray) -> complex:
        return self.amb.trace(x)

    def two_norm(self, x: np.ndarray) -> float:
        return self.amb.two_norm(x)

    def coords(self, x: np.ndarray) -> np.ndarray:
        """Coefficients of x over the basis of M."""
        return _coords(self.amb_basis, x, self.amb.weight_vector)

    def from_coords(self, c: np.ndarray) -> np.ndarray:
        return np.tensordot(c, self.amb_basis, axes=1)

    def project_m(self, x: np.ndarray) -> tuple[np.ndarray, float]:
        proj = self.from_coords(self.coords(x))
        return proj, self.amb.two_norm(x - proj)

    def validate(self) -> None:
        tol = spectral_tol()
        for name, stack, desc in (
            ("sub", self.sub_basis, self.sub),
            ("embed", self.embed_basis, self.amb),
            ("amb", self.amb_basis, self.amb),
        ):
            gram = np.einsum(
                "akd,bkd,d->ab", stack, stack.conj(), desc.weight_vector
            )
            if op_norm(gram - np.eye(len(stack))) > 1e-11:
                raise DomainError(f"{name} basis is not trace-orthonormal")
            if op_norm(stack[0] - desc.identity()) > 1e-11:
                raise DomainError(f"{name} basis must start with the identity")
        if self.sub_basis.shape[0] != self.embed_basis.shape[0]:
            raise DomainError("sub and embed bases must be aligned")
        if not 0.0 < self.lam <= 1.0:
            raise DomainError(f"index constant must lie in (0, 1], got {self.lam}")
        # trace compatibility of the embedding
        for bs, be in zip(self.sub_basis, self.embed_basis):
            if abs(self.sub.trace(bs) - self.amb.trace(be)) > 1e-11:
                raise DomainError("embedding does not preserve the trace")
        # the image of N sits inside M
        for be in self.embed_basis:
            _, defect = self.project_m(be)
            if defect > tol:
                raise DomainError(f"embedded subalgebra leaves M (defect {defect:.3e})")
        # *-closure and multiplicativity: structure constants upstairs match
        # the abstract ones, and both spans are algebras
        wv_sub = self.sub.weight_vector
        wv_amb = self.amb.weight_vector
        for i in range(len(self.sub_basis)):
            adj_defect = _span_defect(self.embed_basis[i].conj().T, self.embed_basis, wv_amb, self.amb)
            if adj_defect > tol:
                raise DomainError("subalgebra image is not adjoint-closed")
            for j in range(len(self.sub_basis)):
                prod_sub = self.sub_basis[i] @ self.sub_basis[j]
                prod_emb = self.embed_basis[i] @ self.embed_basis[j]
                c_sub = _coords(self.sub_basis, prod_sub, wv_sub)
                c_emb = _coords(self.embed_basis, prod_emb, wv_amb)
                resid = prod_emb - np.tensordot(c_emb, self.embed_basis, axes=1)
                if self.amb.two_norm(resid) > tol:
                    raise DomainError("subalgebra image is not closed under products")
                if np.abs(c_sub - c_emb).max() > 1e-9:
                    raise DomainError("embedding is not multiplicative")
        for i in range(self.dim):
            adj_defect = _span_defect(self.amb_basis[i].conj().T, self.amb_basis, wv_amb, self.amb)
            if adj_defect > tol:
                raise DomainError("M is not adjoint-closed")
            for j in range(self.dim):
                prod = self.amb_basis[i] @ self.amb_basis[j]
                resid = prod - np.tensordot(_coords(self.amb_basis, prod, wv_amb), self.amb_basis, axes=1)
                if self.amb.two_norm(resid) > tol:
                    raise DomainError("M is not closed under products")


def _span_defect(x, stack, weights, desc) -> float:
    c = _coords(stack, x, weights)
    return desc.two_norm(x - np.tensordot(c, stack, axes=1))


def norms(desc: AlgebraDescriptor, x: np.ndarray) -> tuple[float, float]:
    """(trace two-norm, operator norm) of an arena element."""
    return desc.two_norm(x), op_norm(x)


def expectation_E(inc: Inclusion, x: np.ndarray) -> np.ndarray:
    """Trace-orthogonal projection of x onto the image of N.

    On elements of M this is the unique trace-preserving conditional
    expectation onto N; it is defined on the whole arena.
    """
    c = _coords(inc.embed_basis, x, inc.amb.weight_vector)
    return np.tensordot(c, inc.embed_basis, axes=1)


def horizontal_projection(inc: Inclusion, x: np.ndarray) -> np.ndarray:
    """Anti-Hermitian part of x with its expectation removed.

    The result z satisfies z* = -z and E(z) = 0: a horizontal direction.
    """
    a = (x - dagger(x)) / 2.0
    return a - expectation_E(inc, a)


def horizontal_defect(inc: Inclusion, z: np.ndarray) -> float:
    """How far z is from being anti-Hermitian with zero expectation."""
    ah = op_norm(z + dagger(z))
    ex = inc.two_norm(expectation_E(inc, z))
    return max(ah, ex)


@dataclass(frozen=True, eq=False)
class PPReport:
    feasible: bool
    worst_margin: float
    lam: float
    n_checked: int
    witness: np.ndarray | None


def pimsner_popa_validate(
    inc: Inclusion, n_samples: int = 64, lam: float | None = None, seed: int = 0
) -> PPReport:
    """Check E(x*x) >= lam * x*x over a deterministic probe family.

    Probes: every basis element of M, ``n_samples`` Gaussian elements of M,
    and the spectral projections of the Hermitian parts of those samples
    (low-rank probes; Gaussian elements alone are far from the extremals of
    the inequality, projections sit on them).  Feasible means the worst
    eigenvalue margin stays above -1e-10.  Deterministic under the seed.
    """
    if lam is None:
        lam = inc.lam
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    rng = np.random.default_rng(seed)
    probes: list[np.ndarray] = [b for b in inc.amb_basis]
    for _ in range(n_samples):
        x = random_element(rng, inc.amb_basis)
        probes.append(x)
        xh = (x + dagger(x)) / 2.0
        _, vecs = np.linalg.eigh(xh)
        for col in range(vecs.shape[1]):
            v = vecs[:, col]
            probes.append(np.outer(v, v.conj()))
    worst = np.inf
    witness = None
    for x in probes:
        y = dagger(x) @ x
        d = expectation_E(inc, y) - lam * y
        margin = float(np.linalg.eigvalsh((d + dagger(d)) / 2.0).min())
        if margin < worst:
            worst = margin
            witness = x
    feasible = worst >= -1e-10
    return PPReport(
        feasible=feasible,
        worst_margin=worst,
        lam=float(lam),
        n_checked=len(probes),
        witness=None if feasible else witness,
    )


# ---------------------------------------------------------------------------
# built-in families


def make_tensor_inclusion(m: int, k: int) -> Inclusion:
    """N = M_m tensor 1_k inside M = M_{mk}; E = identity tensor normalized
    partial trace; index constant 1/k^2."""
    if m < 1 or k < 2:
        raise DomainError(f"tensor family needs m >= 1 and k >= 2, got ({m}, {k})")
    sub = AlgebraDescriptor((m,), (1.0 / m,))
    amb = AlgebraDescriptor((m * k,), (1.0 / (m * k),))
    sub_basis = sub.canonical_basis()
    embed_basis = np.stack([np.kron(b, np.eye(k, dtype=complex)) for b in sub_basis])
    amb_basis = amb.canonical_basis()
    inc = Inclusion(
        sub=sub,
        amb=amb,
        sub_basis=sub_basis,
        embed_basis=embed_basis,
        amb_basis=amb_basis,
        lam=1.0 / (k * k),
        family_tag=f"tensor({m},{k})",
    )
    inc.validate()
    return inc


def make_group_flip_inclusion(
    n_desc: AlgebraDescriptor, theta: np.ndarray | None = None, tag: str | None = None
) -> Inclusion:
    """Order-two twist family: M = {[[a, b], [theta(b), theta(a)]]} inside
    M_{2n}, N embedded as diag(n, theta(n)); E keeps the diagonal part;
    index constant 1/2.

    ``theta`` is a unitary on N's arena acting by conjugation (None means
    the identity automorphism; a block-swap is the corresponding permutation
    matrix).  It must be an order-two *-automorphism of N preserving the
    trace, and the trace of N must be uniform on its arena diagonal so that
    the ambient arena carries the normalized matrix trace.
    """
    n = n_desc.ambient_dim
    wv = n_desc.weight_vector
    if np.abs(wv - wv[0]).max() > 1e-14:
        raise DomainError("group flip family needs a uniform trace on the subalgebra arena")
    if theta is not None:
        theta = np.asarray(theta, dtype=complex)
        if theta.shape != (n, n):
            raise DomainError(f"theta must be {n}x{n}, got {theta.shape}")
        if op_norm(dagger(theta) @ theta - np.eye(n)) > spectral_tol():
            raise DomainError("theta must be unitary")

    def th(x: np.ndarray) -> np.ndarray:
        if theta is None:
            return x
        return theta @ x @ dagger(theta)

    sub_basis = n_desc.canonical_basis()
    tol = spectral_tol()
    for b in sub_basis:
        tb = th(b)
        if _span_defect(tb, sub_basis, wv, n_desc) > tol:
            raise DomainError("theta does not preserve the subalgebra")
        if op_norm(th(tb) - b) > tol:
            raise DomainError("theta is not of order two")
        if abs(n_desc.trace(tb) - n_desc.trace(b)) > 1e-11:
            raise DomainError("theta does not preserve the trace")

    def diag_type(b):
        out = np.zeros((2 * n, 2 * n), dtype=complex)
        out[:n, :n] = b
        out[n:, n:] = th(b)
        return out

    def off_type(b):
        out = np.zeros((2 * n, 2 * n), dtype=complex)
        out[:n, n:] = b
        out[n:, :n] = th(b)
        return out

    amb = AlgebraDescriptor((2 * n,), (1.0 / (2 * n),))
    embed_basis = np.stack([diag_type(b) for b in sub_basis])
    amb_basis = np.concatenate(
        [embed_basis, np.stack([off_type(b) for b in sub_basis])]
    )
    inc = Inclusion(
        sub=n_desc,
        amb=amb,
        sub_basis=sub_basis,
        embed_basis=embed_basis,
        amb_basis=amb_basis,
        lam=0.5,
        family_tag=tag or f"group_flip(n={n})",
    )
    inc.validate()
    return inc


def make_custom_inclusion(
    sub: AlgebraDescriptor,
    amb: AlgebraDescriptor,
    phi,
    lam: float,
    m_span=None,
    tag: str = "custom",
) -> Inclusion:
    """Inclusion from an explicit embedding map ``phi`` (abstract N arena ->
    ambient arena).  ``m_span`` optionally lists arena matrices spanning M
    (default: all of the arena).  The declared ``lam`` is validated for
    feasibility, never inferred."""
    sub_basis = sub.canonical_basis()
    embed_basis = np.stack([np.asarray(phi(b), dtype=complex) for b in sub_basis])
    if m_span is None:
        amb_basis = amb.canonical_basis()
    else:
        amb_basis = orthonormalize([amb.identity()] + list(m_span), amb.inner)
    inc = Inclusion(
        sub=sub,
        amb=amb,
        sub_basis=sub_basis,
        embed_basis=embed_basis,
        amb_basis=amb_basis,
        lam=lam,
        family_tag=tag,
    )
    inc.validate()
    report = pimsner_popa_validate(inc, n_samples=32, lam=lam, seed=0)
    if not report.feasible:
        raise DomainError(
            f"declared lambda {lam} is infeasible (worst margin {report.worst_margin:.3e})"
        )
    return inc


# ---------------------------------------------------------------------------
# seeded sampling


def random_element(rng: np.random.Generator, basis: np.ndarray) -> np.ndarray:
    """Gaussian element in the span of a trace-orthonormal basis."""
    c = (rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))) / np.sqrt(2)
    return np.tensordot(c, basis, axes=1)


def random_hermitian(rng: np.random.Generator, basis: np.ndarray) -> np.ndarray:
    x = random_element(rng, basis)
    return (x + dagger(x)) / 2.0


def random_antihermitian(rng: np.random.Generator, basis: np.ndarray) -> np.ndarray:
    x = random_element(rng, basis)
    return (x - dagger(x)) / 2.0


def random_unitary(
    rng: np.random.Generator, basis: np.ndarray, scale: float = 1.0
) -> np.ndarray:
    """exp of a scaled Gaussian anti-Hermitian element: a unitary that stays
    in the spanned algebra."""
    from .linalg import spectral_function

    a = random_antihermitian(rng, basis)
    nrm = op_norm(a)
    if nrm > 0:
        a = a * (scale / nrm)
    return spectral_function(a, "exp")


def random_horizontal(
    inc: Inclusion, rng: np.random.Generator, op_scale: float | None = None
) -> np.ndarray:
    """Random anti-Hermitian direction with zero expectation, optionally
    rescaled to a given operator norm."""
    z = horizontal_projection(inc, random_element(rng, inc.amb_basis))
    nrm = op_norm(z)
    if nrm == 0.0:
        raise DomainError("sampled a zero horizontal direction")
    if op_scale is not None:
        z = z * (op_scale / nrm)
    return z
