"""Spectral-calculus helpers for Hermitian/anti-Hermitian matrices and unitaries.

Everything here works on plain complex ndarrays.  Matrix functions are
evaluated by unitary diagonalization (eigh on the Hermitian reduction), so
the results of exp/cos/sin/sinc/sqrt/square are exact up to the
diagonalization error, and exponentials of anti-Hermitian inputs are unitary
to machine precision.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import BranchCutError, DomainError
from .tolerances import ANGLE_GUARD, spectral_tol

__all__ = [
    "dagger",
    "op_norm",
    "herm_defect",
    "antiherm_defect",
    "unitary_defect",
    "spectral_function",
    "log_unitary_principal",
    "polar_antihermitian",
    "nearest_unitary",
    "dump_matrix",
    "load_matrix",
]


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def op_norm(a: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def herm_defect(a: np.ndarray) -> float:
    return op_norm(a - dagger(a))


def antiherm_defect(a: np.ndarray) -> float:
    return op_norm(a + dagger(a))


def unitary_defect(a: np.ndarray) -> float:
    return op_norm(dagger(a) @ a - np.eye(a.shape[0]))


def _sinc(z: np.ndarray) -> np.ndarray:
    # sin(z)/z with the removable singularity filled by its Taylor series;
    # below 1e-4 the series error is ~1e-38, far under roundoff.
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    out = np.empty_like(z)
    zs = z[small]
    out[small] = 1.0 - zs**2 / 6.0 + zs**4 / 120.0
    zb = z[~small]
    out[~small] = np.sin(zb) / zb
    return out

_SCALAR_MAPS = {
    "exp": np.exp,
    "cos": np.cos,
    "sin": np.sin,
    "sinc": _sinc,
    "square": lambda z: z * z,
}


def spectral_function(h: np.ndarray, f: str) -> np.ndarray:
    """Apply the scalar map ``f`` to a Hermitian or anti-Hermitian matrix.

    Parameters
    ----------
    h : square complex ndarray, Hermitian or anti-Hermitian within the
        global spectral tolerance.
    f : one of ``exp``, ``cos``, ``sin``, ``sinc`` (sin z / z), ``sqrt``
        (nonnegative spectrum required), ``square``.

    Anti-Hermitian input is diagonalized through its Hermitian reduction
    -i*h, so the eigenbasis is orthonormal and f is evaluated on the purely
    imaginary spectrum.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {h.shape}")
    tol = spectral_tol()
    hd = herm_defect(h)
    ad = antiherm_defect(h)
    if hd <= tol:
        w, v = np.linalg.eigh((h + dagger(h)) / 2.0)
        eigs = w.astype(complex)
    elif ad <= tol:
        w, v = np.linalg.eigh((h - dagger(h)) / 2.0j)
        eigs = 1j * w
    else:
        raise DomainError(
            f"matrix is neither Hermitian (defect {hd:.3e}) nor "
            f"anti-Hermitian (defect {ad:.3e}) within {tol:.1e}"
        )
    if f == "sqrt":
        if hd > tol:
            raise DomainError("sqrt needs a Hermitian input")
        if w.min() < -tol:
            raise DomainError(f"sqrt needs nonnegative spectrum, min eigenvalue {w.min():.3e}")
        vals = np.sqrt(np.clip(w, 0.0, None)).astype(complex)
    else:
        try:
            scalar = _SCALAR_MAPS[f]
        except KeyError:
            raise DomainError(f"unknown scalar map {f!r}") from None
        vals = scalar(eigs)
    return (v * vals) @ dagger(v)


def log_unitary_principal(u: np.ndarray) -> np.ndarray:
    """Principal anti-Hermitian logarithm of a unitary.

    Eigenangles are taken in (-pi, pi); spectrum within ANGLE_GUARD of -1
    raises BranchCutError.  Uses a complex Schur decomposition so the
    eigenbasis stays orthonormal on clustered spectrum.
    """
    u = np.asarray(u, dtype=complex)
    tol = spectral_tol()
    ud = unitary_defect(u)
    if ud > tol:
        raise DomainError(f"input is not unitary (defect {ud:.3e} > {tol:.1e})")
    t, q = scipy.linalg.schur(u, output="complex")
    diag = np.diag(t)
    off = op_norm(t - np.diag(diag))
    if off > 1e3 * tol:
        raise DomainError(f"unitary is not normal enough to diagonalize (defect {off:.3e})")
    angles = np.angle(diag)
    worst = np.argmax(np.abs(angles))
    if np.pi - abs(angles[worst]) < ANGLE_GUARD:
        raise BranchCutError(
            f"eigenvalue {diag[worst]:.12f} is within {ANGLE_GUARD:.1e} of the "
            "branch cut at -1",
            eigenvalue=complex(diag[worst]),
        )
    x = (q * (1j * angles)) @ dagger(q)
    return (x - dagger(x)) / 2.0


def polar_antihermitian(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polar split x = u |x| of an anti-Hermitian matrix.

    Returns (u, absx) with absx = sqrt(-x^2) PSD, u anti-Hermitian, partial
    isometry on the support of x and zero on its kernel, commuting with absx.
    """
    x = np.asarray(x, dtype=complex)
    tol = spectral_tol()
    ad = antiherm_defect(x)
    if ad > tol:
        raise DomainError(f"input is not anti-Hermitian (defect {ad:.3e})")
    w, v = np.linalg.eigh((x - dagger(x)) / 2.0j)
    absw = np.abs(w)
    cutoff = tol * max(1.0, absw.max(initial=0.0))
    signs = np.where(absw > cutoff, 1j * np.sign(w), 0.0)
    u = (v * signs) @ dagger(v)
    absx = (v * absw.astype(complex)) @ dagger(v)
    return u, absx


def nearest_unitary(a: np.ndarray) -> np.ndarray:
    """Polar factor of an invertible matrix: the closest unitary."""
    u, s, vh = np.linalg.svd(a)
    if s.min() <= 0:
        raise DomainError("matrix is singular; no unique nearest unitary")
    return u @ vh


def dump_matrix(a: np.ndarray) -> str:
    """Serialize a complex matrix: one row per line, entries ``re+imi``
    with 17 significant digits, whitespace separated."""
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a.view(float))):
        raise DomainError("matrix has non-finite entries")
    lines = []
    for row in np.atleast_2d(a):
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}i" for z in row))
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> np.ndarray:
    """Inverse of dump_matrix."""
    rows = []
    for line in text.strip().splitlines():
        entries = []
        for token in line.split():
            try:
                entries.append(complex(token[:-1].replace("i", "j") + "j" if token.endswith("i") else token))
            except ValueError:
                raise DomainError(f"cannot parse matrix entry {token!r}") from None
        rows.append(entries)
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise DomainError("matrix text is empty or ragged")
    a = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(a.view(float))):
        raise DomainError("matrix text has non-finite entries")
    return a
