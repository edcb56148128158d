"""Kernels of unitaries implementing linear canonical transformations.

Four constructors, from the most to the least specialised in what they pin:

* :func:`inhomogeneous_kernel` - shifts ``b_j = a_j + f_j`` (phase fixed to 1),
* :func:`bogoliubov_kernel` - ``b = Phi a + Psi a^dagger`` (phase fixed to 1),
* :func:`linear_hamiltonian_kernel` - ``exp(itH)`` for H linear in a, a^dagger,
* :func:`quadratic_hamiltonian_kernel` - ``exp(itH)`` for quadratic H.

The last two carry the exact scalar prefactor, phase included.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    InternalConsistencyError,
    SingularBlockError,
    SymplecticConstraintError,
)
from .gaussian import GaussianForm, identity_kernel

CONSTRAINT_TOL = 1e-10
EXPM_CONSTRAINT_TOL = 1e-8


def expm(M: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    E = scipy.linalg.expm(np.asarray(M, dtype=complex))
    if not np.all(np.isfinite(E)):
        raise InternalConsistencyError("matrix exponential produced non-finite entries")
    return E


@dataclass(frozen=True)
class SymplecticReport:
    """Entrywise max residuals of ``Phi Psi^T - Psi Phi^T = 0`` and ``Phi Phi^* - Psi Psi^* = I``."""

    commutator: float
    unitarity: float
    tol: float = CONSTRAINT_TOL

    @property
    def ok(self) -> bool:
        return self.commutator <= self.tol and self.unitarity <= self.tol

    def violated(self) -> list[str]:
        out = []
        if self.commutator > self.tol:
            out.append("Phi Psi^T - Psi Phi^T = 0")
        if self.unitarity > self.tol:
            out.append("Phi Phi^* - Psi Psi^* = I")
        return out


def check_symplectic(Phi, Psi, tol: float = CONSTRAINT_TOL) -> SymplecticReport:
    Phi = np.atleast_2d(np.asarray(Phi, complex))
    Psi = np.atleast_2d(np.asarray(Psi, complex))
    if Phi.shape != Psi.shape or Phi.shape[0] != Phi.shape[1]:
        raise DimensionMismatchError("Phi and Psi must be square matrices of equal order")
    n = Phi.shape[0]
    r1 = Phi @ Psi.T - Psi @ Phi.T
    r2 = Phi @ Phi.conj().T - Psi @ Psi.conj().T - np.eye(n)
    return SymplecticReport(float(np.abs(r1).max()), float(np.abs(r2).max()), tol)


@dataclass(frozen=True, eq=False)
class SymplecticPair:
    """The pair (Phi, Psi) of a Bogoliubov transformation ``b = Phi a + Psi a^dagger``.

    Validated against the canonical commutation constraints at construction.
    """

    Phi: np.ndarray
    Psi: np.ndarray
    tol: float = CONSTRAINT_TOL

    def __post_init__(self):
        Phi = np.atleast_2d(np.asarray(self.Phi, complex)).copy()
        Psi = np.atleast_2d(np.asarray(self.Psi, complex)).copy()
        Phi.flags.writeable = False
        Psi.flags.writeable = False
        object.__setattr__(self, "Phi", Phi)
        object.__setattr__(self, "Psi", Psi)
        report = check_symplectic(Phi, Psi, self.tol)
        if not report.ok:
            raise SymplecticConstraintError(
                "violated: " + "; ".join(report.violated())
                + f" (residuals {report.commutator:.3g}, {report.unitarity:.3g})"
            )

    @property
    def n(self) -> int:
        return self.Phi.shape[0]

    def block(self) -> np.ndarray:
        """The 2n x 2n matrix ``[[Phi, Psi], [conj Psi, conj Phi]]``."""
        return np.block([[self.Phi, self.Psi], [self.Psi.conj(), self.Phi.conj()]])

    @classmethod
    def from_block(cls, M, tol: float = CONSTRAINT_TOL) -> "SymplecticPair":
        M = np.asarray(M, complex)
        n = M.shape[0] // 2
        return cls(M[:n, :n], M[:n, n:], tol)

    def then(self, other: "SymplecticPair") -> "SymplecticPair":
        """Pair of the operator product ``U_self U_other``.

        With ``b U = U a`` for each factor, the composite transformation has
        block matrix ``other.block() @ self.block()``.
        """
        return SymplecticPair.from_block(other.block() @ self.block(), max(self.tol, other.tol))


@dataclass(frozen=True, eq=False)
class QuadraticGenerator:
    """``H = 1/2 (a^dagger B a^dagger + a conj(B) a + 2 a^dagger C a)`` evolved for time t."""

    B: np.ndarray
    C: np.ndarray
    t: float = 1.0

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.B, complex)).copy()
        C = np.atleast_2d(np.asarray(self.C, complex)).copy()
        if B.shape != C.shape or B.shape[0] != B.shape[1]:
            raise DimensionMismatchError("B and C must be square matrices of equal order")
        if np.abs(B - B.T).max(initial=0) > 1e-12:
            raise ValueError("B must be symmetric")
        if np.abs(C - C.conj().T).max(initial=0) > 1e-12:
            raise ValueError("C must be Hermitian")
        B.flags.writeable = False
        C.flags.writeable = False
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return self.B.shape[0]

    def heisenberg_matrix(self) -> np.ndarray:
        """``[[-C, -B], [conj B, conj C]]``."""
        return np.block([[-self.C, -self.B], [self.B.conj(), self.C.conj()]])


def inhomogeneous_kernel(f) -> GaussianForm:
    """Kernel of the unitary with ``b_j U = U a_j`` for ``b_j = a_j + f_j``.

    ``U(ubar, v) = c exp sum_j (ubar_j v_j + v_j conj(f_j) - ubar_j f_j)``,
    ``c = exp(-1/2 |f|^2)`` (free phase set to 1).
    """
    f = np.atleast_1d(np.asarray(f, complex))
    n = f.size
    K = identity_kernel(n)
    b = np.concatenate([f.conj(), -f])
    return GaussianForm(K.A, b, np.exp(-0.5 * np.vdot(f, f).real), n, n)


def bogoliubov_kernel(S: SymplecticPair) -> GaussianForm:
    """Kernel of the unitary implementing ``b = Phi a + Psi a^dagger``.

    Blocks ``A22 = -Phi^-1 Psi``, ``A21 = Phi^-1``, ``A11 = conj(Psi) Phi^-1``
    and ``|c| = det(Phi Phi^dagger)^(-1/4)`` with the free phase set to 1.
    """
    Phi, Psi = S.Phi, S.Psi
    if np.linalg.cond(Phi) > 1e12:
        raise SingularBlockError("Phi is singular")
    Phi_inv = np.linalg.inv(Phi)
    return _kernel_from_blocks(Phi, Psi, Phi_inv, _pos_root(Phi))


def _pos_root(Phi) -> complex:
    d = np.linalg.det(Phi @ Phi.conj().T).real
    return d ** -0.25


def _kernel_from_blocks(Phi, Psi, Phi_inv, c) -> GaussianForm:
    n = Phi.shape[0]
    A11 = Psi.conj() @ Phi_inv
    A21 = Phi_inv
    A22 = -Phi_inv @ Psi
    A = np.block([[A11, A21.T], [A21, A22]])
    return GaussianForm(A, np.zeros(2 * n), c, n, n)


def linear_hamiltonian_kernel(f, t: float = 1.0) -> GaussianForm:
    """Kernel of ``exp(itH)``, ``H = sum_j (f_j a_j^dagger + conj(f_j) a_j)``.

    ``U = c exp sum_j (ubar_j v_j + i t conj(f_j) v_j + i t f_j ubar_j)`` with
    ``c = exp(-t^2 |f|^2 / 2)`` exactly.
    """
    f = np.atleast_1d(np.asarray(f, complex))
    n = f.size
    K = identity_kernel(n)
    b = np.concatenate([1j * t * f.conj(), 1j * t * f])
    return GaussianForm(K.A, b, np.exp(-0.5 * t * t * np.vdot(f, f).real), n, n)


def pair_from_generator(gen: QuadraticGenerator) -> SymplecticPair:
    """Extract (Phi, Psi) from ``exp(it [[-C, -B], [conj B, conj C]])``."""
    n = gen.n
    E = expm(1j * gen.t * gen.heisenberg_matrix())
    Phi, Psi = E[:n, :n], E[:n, n:]
    lower_err = max(np.abs(E[n:, :n] - Psi.conj()).max(), np.abs(E[n:, n:] - Phi.conj()).max())
    report = check_symplectic(Phi, Psi, EXPM_CONSTRAINT_TOL)
    if not report.ok or lower_err > EXPM_CONSTRAINT_TOL:
        raise InternalConsistencyError(
            "matrix exponential does not yield a valid Bogoliubov pair "
            f"(residuals {report.commutator:.3g}, {report.unitarity:.3g}, {lower_err:.3g})"
        )
    return SymplecticPair(Phi, Psi, EXPM_CONSTRAINT_TOL)


def _continuous_prefactor(gen: QuadraticGenerator) -> complex:
    """``det(Phi(t) exp(itC))^(-1/2)``, square-root branch followed continuously from t = 0."""
    t = gen.t
    if t == 0:
        return 1.0 + 0j
    rate = np.linalg.norm(gen.heisenberg_matrix(), 2) + np.linalg.norm(gen.C, 2)
    steps = 1
    while abs(t) * rate * gen.n / steps > 0.25:
        steps *= 2
    n = gen.n
    H = gen.heisenberg_matrix()
    root = 1.0 + 0j
    for s in np.linspace(0.0, t, steps + 1)[1:]:
        E = expm(1j * s * H)
        d = np.linalg.det(E[:n, :n] @ expm(1j * s * gen.C))
        r = np.sqrt(complex(d))
        if abs(r - root) > abs(r + root):
            r = -r
        root = r
    return 1.0 / root


def quadratic_hamiltonian_kernel(gen: QuadraticGenerator) -> GaussianForm:
    """Kernel of ``exp(itH)`` for a quadratic Hamiltonian, with exact prefactor."""
    S = pair_from_generator(gen)
    Phi_inv = np.linalg.inv(S.Phi)
    return _kernel_from_blocks(S.Phi, S.Psi, Phi_inv, _continuous_prefactor(gen))
