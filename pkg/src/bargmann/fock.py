"""Truncated Fock-space backend used as an independent numerical oracle.

Devices are built directly as matrix exponentials of truncated generators
``a``, ``a^dagger`` and never consult the Gaussian-kernel formulas.
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CutoffError, CutoffWarning, DeltaNormalizationError, DimensionMismatchError
from .gaussian import GaussianForm, norm
from .transforms import expm

TAIL_TOL = 1e-6


def strict_mode(strict: bool | None = None) -> bool:
    if strict is not None:
        return strict
    return os.environ.get("BARGMANN_STRICT", "") == "1"


def recommended_cutoff(alpha: complex = 0, gamma: complex = 0, g: float = 0.0) -> int:
    """``max(20, ceil(10 (|alpha| + |gamma|)^2 + 10 e^{2g}))``."""
    return max(20, math.ceil(10 * (abs(alpha) + abs(gamma)) ** 2 + 10 * math.exp(2 * abs(g))))


def check_cutoff(N: int, required: int, strict: bool | None = None) -> None:
    if N < 1:
        raise CutoffError("cutoff must be at least 1")
    if N < required:
        msg = f"cutoff {N} is below the recommended {required}"
        if strict_mode(strict):
            raise CutoffError(msg)
        warnings.warn(msg, CutoffWarning, stacklevel=3)


def ladder_matrices(N: int):
    """Truncated ``(a, a^dagger)`` on ``span{|0>, ..., |N>}``."""
    if N < 1:
        raise CutoffError("cutoff must be at least 1")
    a = np.diag(np.sqrt(np.arange(1, N + 1, dtype=float)), 1).astype(complex)
    return a, a.conj().T


def embed(op: np.ndarray, mode: int, n_modes: int) -> np.ndarray:
    """Lift a single-mode operator to ``n_modes`` modes (mode 0 leftmost)."""
    d = op.shape[0]
    out = np.eye(1, dtype=complex)
    for k in range(n_modes):
        out = np.kron(out, op if k == mode else np.eye(d))
    return out


def number_operator(N: int, n_modes: int = 1) -> np.ndarray:
    a, ad = ladder_matrices(N)
    n = ad @ a
    return sum(embed(n, k, n_modes) for k in range(n_modes))


def fock_displacement(alpha: complex, N: int, strict: bool | None = None) -> np.ndarray:
    """``exp(i H_laser)`` with ``H_laser = i(conj(alpha) a - alpha a^dagger)``."""
    check_cutoff(N, recommended_cutoff(alpha=alpha), strict)
    a, ad = ladder_matrices(N)
    return expm(alpha * ad - np.conj(alpha) * a)


def fock_squeezer(g: float, N: int, strict: bool | None = None) -> np.ndarray:
    """``exp(iH)`` with ``H = (i g / 2)(a^2 - a^dagger^2)``, i.e. B = -ig, C = 0."""
    check_cutoff(N, recommended_cutoff(g=g), strict)
    a, ad = ladder_matrices(N)
    return expm(0.5 * g * (ad @ ad - a @ a))


def fock_beam_splitter(theta: float, N: int) -> np.ndarray:
    """Two-mode ``exp(i H_bs)``, ``H_bs = i theta (a1^dagger a2 - a1 a2^dagger)``."""
    a, ad = ladder_matrices(N)
    a1, a2 = embed(a, 0, 2), embed(a, 1, 2)
    ad1, ad2 = embed(ad, 0, 2), embed(ad, 1, 2)
    return expm(-theta * (ad1 @ a2 - a1 @ ad2))


def fock_quadratic_hamiltonian(B, C, N: int) -> np.ndarray:
    """Truncated ``H = 1/2 (a^dagger B a^dagger + a conj(B) a + 2 a^dagger C a)``."""
    B = np.atleast_2d(np.asarray(B, complex))
    C = np.atleast_2d(np.asarray(C, complex))
    n = B.shape[0]
    a, ad = ladder_matrices(N)
    A_ = [embed(a, k, n) for k in range(n)]
    Ad = [embed(ad, k, n) for k in range(n)]
    H = np.zeros_like(A_[0])
    for j in range(n):
        for k in range(n):
            H += 0.5 * (B[j, k] * Ad[j] @ Ad[k] + np.conj(B[j, k]) * A_[j] @ A_[k])
            H += C[j, k] * Ad[j] @ A_[k]
    return H


def fock_linear_hamiltonian(f, N: int) -> np.ndarray:
    """Truncated ``H = sum_j (f_j a_j^dagger + conj(f_j) a_j)``."""
    f = np.atleast_1d(np.asarray(f, complex))
    n = f.size
    a, ad = ladder_matrices(N)
    return sum(f[k] * embed(ad, k, n) + np.conj(f[k]) * embed(a, k, n) for k in range(n))


def coherent_vector(alpha: complex, N: int) -> np.ndarray:
    """``D(alpha)|0>`` from the truncated displacement matrix."""
    D = fock_displacement(alpha, N, strict=False)
    return D[:, 0].copy()


def coherent_coefficients(alpha: complex, N: int) -> np.ndarray:
    """Series coefficients ``exp(-|alpha|^2/2) alpha^n / sqrt(n!)``."""
    n = np.arange(N + 1)
    logf = np.array([0.5 * math.lgamma(k + 1) for k in n])
    with np.errstate(divide="ignore"):
        mag = np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(abs(alpha) or 1.0) - logf)
    if alpha == 0:
        mag = (n == 0).astype(float)
    return mag * np.exp(1j * np.angle(alpha) * n)


def hermite_functions(x: float, N: int) -> np.ndarray:
    """``<n|x>`` for n = 0..N: normalized Hermite functions at x."""
    out = np.empty(N + 1)
    out[0] = math.pi ** -0.25 * math.exp(-0.5 * x * x)
    if N >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(2, N + 1):
        out[n] = math.sqrt(2.0 / n) * x * out[n - 1] - math.sqrt((n - 1) / n) * out[n - 2]
    return out


@dataclass(frozen=True, eq=False)
class FockTensor:
    """Coefficients of an m-mode state over ``|n_1 ... n_m>``, ``0 <= n_k <= N``."""

    coeffs: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        x = np.array(self.coeffs, dtype=complex)
        if x.ndim == 0 or len(set(x.shape)) != 1:
            raise DimensionMismatchError("coefficient array must have shape (N+1,)*m")
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite Fock coefficients")
        if self.normalized and abs(np.linalg.norm(x) - 1) > 1e-9:
            raise ValueError("normalized flag set but norm differs from 1")
        x.flags.writeable = False
        object.__setattr__(self, "coeffs", x)

    @property
    def modes(self) -> int:
        return self.coeffs.ndim

    @property
    def cutoff(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def vector(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def normalize(self) -> "FockTensor":
        return FockTensor(self.coeffs / self.norm(), normalized=True)

    def inner(self, other: "FockTensor") -> complex:
        return complex(np.vdot(self.vector, other.vector))

    @classmethod
    def from_vector(cls, vec, modes: int = 1, normalized: bool = False) -> "FockTensor":
        vec = np.asarray(vec, complex)
        d = round(vec.size ** (1.0 / modes))
        return cls(vec.reshape((d,) * modes), normalized)


def gaussian_coefficients(A, b, c, N: int) -> np.ndarray:
    """Orthonormal-basis coefficients of ``c exp(1/2 u^T A u + b^T u)`` up to N per mode.

    Uses ``psi[n + e_k] = (b_k psi[n] + sum_j A_kj sqrt(n_j) psi[n - e_j]) / sqrt(n_k + 1)``.
    """
    A = np.atleast_2d(np.asarray(A, complex))
    b = np.atleast_1d(np.asarray(b, complex))
    m = b.size
    psi = np.zeros((N + 1,) * m, complex)
    psi[(0,) * m] = c
    sq = np.sqrt(np.arange(N + 2, dtype=float))
    for idx in itertools.product(range(N + 1), repeat=m):
        if not any(idx):
            continue
        k = next(i for i, x in enumerate(idx) if x)
        n = list(idx)
        n[k] -= 1
        val = b[k] * psi[tuple(n)]
        for j in range(m):
            if n[j] > 0 and A[k, j] != 0:
                n[j] -= 1
                val += A[k, j] * sq[n[j] + 1] * psi[tuple(n)]
                n[j] += 1
        psi[idx] = val / sq[n[k] + 1]
    return psi


def state_to_fock(F: GaussianForm, N: int, tail_tol: float = TAIL_TOL) -> FockTensor:
    """Expand a normalizable Gaussian state on at most 3 modes into the Fock basis.

    Raises :class:`CutoffError` when the norm mass beyond the cutoff exceeds ``tail_tol``.
    """
    if not F.is_state:
        raise DimensionMismatchError("state_to_fock expects a state")
    if F.delta_normalized:
        raise DeltaNormalizationError("generalized vectors have no Fock expansion with finite norm")
    if F.n_out > 3:
        raise DimensionMismatchError("the Fock oracle supports at most 3 modes")
    psi = gaussian_coefficients(F.A, F.b, F.c, N)
    tail = norm(F) ** 2 - float(np.sum(np.abs(psi) ** 2))
    if tail > tail_tol:
        raise CutoffError(f"norm mass {tail:.3g} beyond cutoff {N}")
    return FockTensor(psi)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """``tr sqrt(rho^(1/2) sigma rho^(1/2))`` for positive matrices."""
    r = scipy.linalg.sqrtm(rho)
    return float(np.real(np.trace(scipy.linalg.sqrtm(r @ sigma @ r))))


def oracle_teleport_cv(gamma: complex, alpha: complex, q: float, N: int,
                       strict: bool | None = None) -> float:
    """Brute-force ``|<gamma|phi>|`` with ``phi = sum_n q^n D(alpha)|n><n|D(alpha)^dagger|gamma>``."""
    g = math.atanh(q) if q < 1 else math.inf
    check_cutoff(N, recommended_cutoff(alpha, gamma, g), strict)
    D = fock_displacement(alpha, N, strict=False)
    ket = coherent_vector(gamma, N)
    weights = q ** np.arange(N + 1)
    phi = D @ (weights * (D.conj().T @ ket))
    return float(abs(np.vdot(ket, phi)))


def sparse_ladder(N: int, mode: int, n_modes: int):
    """Sparse truncated ``a`` acting on one of ``n_modes`` modes."""
    a = sp.diags(np.sqrt(np.arange(1, N + 1, dtype=float)), 1, format="csr").astype(complex)
    out = sp.identity(1, dtype=complex, format="csr")
    for k in range(n_modes):
        out = sp.kron(out, a if k == mode else sp.identity(N + 1, format="csr"), format="csr")
    return out


def evolve(generator, vec: np.ndarray) -> np.ndarray:
    """``exp(generator) vec`` without forming the dense exponential."""
    out = spla.expm_multiply(generator, np.asarray(vec, complex))
    if not np.all(np.isfinite(out)):
        raise CutoffError("Fock evolution produced non-finite amplitudes")
    return out
