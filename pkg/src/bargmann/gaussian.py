"""Gaussian forms in the holomorphic (Bargmann) representation.

A :class:`GaussianForm` is the function

    F(z) = c * exp(1/2 z^T A z + b^T z),   z = (v_1..v_{n_in}, ubar_1..ubar_{n_out})

where the ``v`` are holomorphic input variables of an operator kernel and the
``ubar`` are anti-holomorphic output variables.  States have ``n_in == 0``.

Every operation (composition of kernels, action on states, inner products,
partial contractions) reduces to one exact Gaussian integral over pairs of
conjugate variables against the measure ``exp(-vbar v) dvbar dv / (2 pi i)``,
implemented in :func:`integrate_pairs`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    DeltaNormalizationError,
    DimensionMismatchError,
    DivergentIntegralError,
    SingularBlockError,
)

SYMMETRY_TOL = 1e-12
CONDITION_LIMIT = 1e12
# Re(S) must have smallest eigenvalue above this (relative) to count as decaying.
DECAY_TOL = 1e-12


def _readonly(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=complex)
    x.flags.writeable = False
    return x


@dataclass(frozen=True, eq=False)
class GaussianForm:
    """Immutable Gaussian kernel or state ``c exp(1/2 z^T A z + b^T z)``.

    Parameters
    ----------
    A : array_like, shape (n_in + n_out, n_in + n_out)
        Quadratic coefficients over ``z = (v, ubar)``.  Stored symmetrized.
    b : array_like, shape (n_in + n_out,)
        Linear coefficients.
    c : complex
        Scalar prefactor.
    n_in, n_out : int
        Number of input (holomorphic) and output (anti-holomorphic) modes.
    delta_normalized : bool, optional
        Marks a generalized, non-normalizable vector.  For states it is
        inferred from the quadratic part when omitted; passing ``False`` for a
        state whose norm integral diverges raises
        :class:`DeltaNormalizationError`.
    """

    A: np.ndarray
    b: np.ndarray
    c: complex
    n_in: int
    n_out: int
    delta_normalized: bool = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        n = self.n_in + self.n_out
        A = np.array(self.A, dtype=complex).reshape(n, n) if n else np.zeros((0, 0), complex)
        b = np.array(self.b, dtype=complex).reshape(n)
        if self.n_in < 0 or self.n_out < 0:
            raise DimensionMismatchError("mode counts must be non-negative")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.isfinite(self.c)):
            raise ValueError("Gaussian form has non-finite coefficients")
        A = 0.5 * (A + A.T)
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "b", _readonly(b))
        object.__setattr__(self, "c", complex(self.c))

        if self.n_in == 0 and self.n_out > 0:
            normalizable = _state_normalizable(A)
            if self.delta_normalized is None:
                object.__setattr__(self, "delta_normalized", not normalizable)
            elif not self.delta_normalized and not normalizable:
                raise DeltaNormalizationError(
                    "norm integral of this state diverges; mark it delta_normalized"
                )
        elif self.delta_normalized is None:
            object.__setattr__(self, "delta_normalized", False)
        object.__setattr__(self, "delta_normalized", bool(self.delta_normalized))

    # -- structure -------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return self.n_in + self.n_out

    @property
    def is_state(self) -> bool:
        return self.n_in == 0

    @property
    def in_slice(self) -> slice:
        return slice(0, self.n_in)

    @property
    def out_slice(self) -> slice:
        return slice(self.n_in, self.n_in + self.n_out)

    def blocks(self):
        """Return ``(A11, A12, A21, A22)`` with 1 = input ``v`` and 2 = output ``ubar``."""
        i, o = self.in_slice, self.out_slice
        A = self.A
        return A[i, i], A[i, o], A[o, i], A[o, o]

    def scaled(self, s: complex) -> "GaussianForm":
        return GaussianForm(self.A, self.b, self.c * s, self.n_in, self.n_out,
                            self.delta_normalized)

    def __call__(self, *, ubar=(), v=()) -> complex:
        """Evaluate the form at given variable values."""
        z = np.concatenate([np.atleast_1d(np.asarray(v, complex)).ravel()[: self.n_in],
                            np.atleast_1d(np.asarray(ubar, complex)).ravel()[: self.n_out]])
        if z.size != self.n_vars:
            raise DimensionMismatchError("wrong number of arguments")
        return complex(self.c * np.exp(0.5 * z @ self.A @ z + self.b @ z))

    def allclose(self, other: "GaussianForm", atol: float = 1e-10, phase: bool = True) -> bool:
        """Compare (A, b) entrywise and c either exactly or in modulus."""
        if (self.n_in, self.n_out) != (other.n_in, other.n_out):
            return False
        ok = np.allclose(self.A, other.A, atol=atol, rtol=0) and np.allclose(
            self.b, other.b, atol=atol, rtol=0
        )
        if phase:
            return ok and abs(self.c - other.c) <= atol
        return ok and abs(abs(self.c) - abs(other.c)) <= atol

    def __repr__(self):
        return (f"GaussianForm(n_in={self.n_in}, n_out={self.n_out}, c={self.c:.6g}, "
                f"delta_normalized={self.delta_normalized})")

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        pair = lambda x: [float(np.real(x)), float(np.imag(x))]  # noqa: E731
        return {
            "n_in": self.n_in,
            "n_out": self.n_out,
            "A": [[pair(x) for x in row] for row in self.A],
            "b": [pair(x) for x in self.b],
            "c": pair(self.c),
            "delta_normalized": self.delta_normalized,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianForm":
        n = d["n_in"] + d["n_out"]
        cplx = lambda p: complex(p[0], p[1])  # noqa: E731
        A = np.array([[cplx(x) for x in row] for row in d["A"]], dtype=complex).reshape(n, n)
        b = np.array([cplx(x) for x in d["b"]], dtype=complex)
        return cls(A, b, cplx(d["c"]), d["n_in"], d["n_out"], d["delta_normalized"])

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, s: str) -> "GaussianForm":
        return cls.from_dict(json.loads(s))


def _state_normalizable(A: np.ndarray) -> bool:
    # |F|^2 e^{-|u|^2} decays iff the Takagi values of A are all < 1.
    if A.size == 0:
        return True
    return float(np.linalg.norm(A, 2)) < 1.0 - 1e-12


def state(A, b, c, delta_normalized=None) -> GaussianForm:
    """Build a state form from its quadratic and linear coefficients."""
    b = np.atleast_1d(np.asarray(b, complex))
    n = b.size
    return GaussianForm(np.asarray(A, complex).reshape(n, n), b, c, 0, n, delta_normalized)


def vacuum(n: int = 1) -> GaussianForm:
    """The n-mode vacuum, F = 1."""
    return GaussianForm(np.zeros((n, n)), np.zeros(n), 1.0, 0, n)


def identity_kernel(n: int) -> GaussianForm:
    """Kernel ``exp(sum_j ubar_j v_j)`` of the identity on n modes."""
    if n < 1:
        raise DimensionMismatchError("identity kernel needs at least one mode")
    A = np.zeros((2 * n, 2 * n), complex)
    A[:n, n:] = np.eye(n)
    A[n:, :n] = np.eye(n)
    return GaussianForm(A, np.zeros(2 * n), 1.0, n, n)


# -- the Gaussian integral ----------------------------------------------------


def _sqrt_det_branch(S: np.ndarray) -> complex:
    """sqrt(det S) continued from positive-definite matrices along (1-t)I + tS."""
    lam = np.linalg.eigvals(S)
    return complex(np.prod(np.sqrt(lam)))


def integrate_pairs(A, b, c, pairs: Sequence[tuple[int, int]], keep: Sequence[int],
                    moment: bool = False, log_scale: complex = 0.0):
    """Integrate ``c exp(1/2 z^T A z + b^T z)`` over conjugate variable pairs.

    Each pair ``(h, a)`` names the positions of a holomorphic variable ``w`` and
    its conjugate ``wbar`` inside ``z``; the integral is taken against
    ``exp(-wbar w) dwbar dw / (2 pi i)``.

    Returns ``(A', b', c')`` of the remaining variables ``z[keep]``; with
    ``moment=True`` also the vector ``Q^{-1} k`` giving the first moments of
    the integrated variables (as affine functions evaluated at ``z[keep] = 0``).
    ``log_scale`` multiplies the result by ``exp(log_scale)`` before the
    exponential is formed, so large cancelling exponents do not overflow.

    Raises
    ------
    DivergentIntegralError
        If the real part of the quadratic form in real coordinates is not
        positive definite.
    SingularBlockError
        If the contracted block is numerically singular.
    """
    A = np.asarray(A, complex)
    b = np.asarray(b, complex)
    keep = list(keep)
    hol = [p[0] for p in pairs]
    anti = [p[1] for p in pairs]
    w = hol + anti
    m = len(pairs)
    if m == 0:
        out = (A[np.ix_(keep, keep)], b[keep], complex(c) * np.exp(log_scale))
        return out + (np.zeros(0, complex),) if moment else out

    I = np.eye(m)
    J = np.block([[np.zeros((m, m)), I], [I, np.zeros((m, m))]])
    M = A[np.ix_(w, w)]
    Q = J - M
    # real coordinates: w = x + i y, wbar = x - i y
    T = np.block([[I, 1j * I], [I, -1j * I]])
    S = T.T @ Q @ T
    S = 0.5 * (S + S.T)
    scale = max(1.0, float(np.abs(S).max()))
    if np.linalg.eigvalsh(S.real).min() <= DECAY_TOL * scale:
        raise DivergentIntegralError("Gaussian integrand does not decay in the contracted variables")
    if np.linalg.cond(Q) > CONDITION_LIMIT:
        raise SingularBlockError("contracted block is singular or ill-conditioned")

    R = A[np.ix_(keep, w)]
    j = b[w]
    Qinv_RT = np.linalg.solve(Q, R.T) if keep else np.zeros((2 * m, 0), complex)
    Qinv_j = np.linalg.solve(Q, j)
    A_new = A[np.ix_(keep, keep)] + R @ Qinv_RT
    b_new = b[keep] + R @ Qinv_j
    c_new = complex(c) * 2.0**m / _sqrt_det_branch(S) * np.exp(log_scale + 0.5 * j @ Qinv_j)
    if moment:
        return A_new, b_new, c_new, Qinv_j
    return A_new, b_new, c_new


class _Joint:
    """Accumulates several forms into one exponent over a shared variable list."""

    def __init__(self, size: int):
        self.A = np.zeros((size, size), complex)
        self.b = np.zeros(size, complex)
        self.c = 1.0 + 0j

    def add(self, F: GaussianForm, idx: Sequence[int], conjugate: bool = False):
        idx = list(idx)
        A, b, c = F.A, F.b, F.c
        if conjugate:
            A, b, c = A.conj(), b.conj(), np.conj(c)
        self.A[np.ix_(idx, idx)] += A
        self.b[idx] += b
        self.c *= c


def compose(K1: GaussianForm, K2: GaussianForm) -> GaussianForm:
    """Kernel of the operator product ``K1 K2``.

    ``(K1 K2)(ubar, w) = int K1(ubar, v) K2(vbar, w) exp(-vbar v) dvbar dv / (2 pi i)``.
    """
    if K1.n_in != K2.n_out:
        raise DimensionMismatchError(
            f"cannot compose: left kernel takes {K1.n_in} modes, right produces {K2.n_out}"
        )
    m = K1.n_in
    ni2, no1 = K2.n_in, K1.n_out
    # joint order: (w from K2, ubar from K1, v, vbar)
    w_idx = list(range(ni2))
    u_idx = list(range(ni2, ni2 + no1))
    v_idx = list(range(ni2 + no1, ni2 + no1 + m))
    vb_idx = list(range(ni2 + no1 + m, ni2 + no1 + 2 * m))
    jt = _Joint(ni2 + no1 + 2 * m)
    jt.add(K1, v_idx + u_idx)
    jt.add(K2, w_idx + vb_idx)
    A, b, c = integrate_pairs(jt.A, jt.b, jt.c, list(zip(v_idx, vb_idx)), w_idx + u_idx)
    delta = K1.delta_normalized or K2.delta_normalized
    if ni2 == 0 and no1 > 0:
        delta = None
    return GaussianForm(A, b, c, ni2, no1, delta)


def apply(K: GaussianForm, f: GaussianForm) -> GaussianForm:
    """Action ``(K f)(ubar)`` of a kernel on a state."""
    if not f.is_state:
        raise DimensionMismatchError("apply expects a state (n_in == 0) on the right")
    return compose(K, f)


def inner_product(F: GaussianForm, G: GaussianForm) -> complex:
    """``<F|G> = int conj(F(ubar)) G(ubar) exp(-ubar u) dubar du / (2 pi i)``."""
    if not (F.is_state and G.is_state):
        raise DimensionMismatchError("inner_product expects two states")
    if F.n_out != G.n_out:
        raise DimensionMismatchError("states live on different numbers of modes")
    m = F.n_out
    jt = _Joint(2 * m)
    jt.add(F, range(m), conjugate=True)
    jt.add(G, range(m, 2 * m))
    _, _, c = integrate_pairs(jt.A, jt.b, jt.c, [(k, m + k) for k in range(m)], [])
    return c


def first_moment(F: GaussianForm, G: GaussianForm, mode: int) -> complex:
    """``<F| ubar_mode G>``, i.e. ``<F| a^dagger_mode |G>``."""
    if not (F.is_state and G.is_state) or F.n_out != G.n_out:
        raise DimensionMismatchError("first_moment expects two states on the same modes")
    m = F.n_out
    jt = _Joint(2 * m)
    jt.add(F, range(m), conjugate=True)
    jt.add(G, range(m, 2 * m))
    _, _, c, mean = integrate_pairs(jt.A, jt.b, jt.c, [(k, m + k) for k in range(m)], [],
                                    moment=True)
    return c * mean[m + mode]


def norm(F: GaussianForm) -> float:
    """Hilbert-space norm of a normalizable state."""
    if F.delta_normalized:
        raise DeltaNormalizationError("generalized vectors have no norm")
    return float(np.sqrt(max(inner_product(F, F).real, 0.0)))


def adjoint(K: GaussianForm) -> GaussianForm:
    """``K^dagger(ubar, v) = conj(K(vbar, u))``: swap the blocks and conjugate."""
    perm = list(range(K.n_in, K.n_vars)) + list(range(K.n_in))
    A = K.A[np.ix_(perm, perm)].conj()
    return GaussianForm(A, K.b[perm].conj(), np.conj(K.c), K.n_out, K.n_in,
                        K.delta_normalized if K.n_out else None)


def tensor(F: GaussianForm, G: GaussianForm) -> GaussianForm:
    """Tensor product; modes of F come first in both the input and output blocks."""
    n_in, n_out = F.n_in + G.n_in, F.n_out + G.n_out
    fi = list(range(F.n_in)) + list(range(n_in, n_in + F.n_out))
    gi = list(range(F.n_in, n_in)) + list(range(n_in + F.n_out, n_in + n_out))
    jt = _Joint(n_in + n_out)
    jt.add(F, fi)
    jt.add(G, gi)
    delta = None if n_in == 0 else (F.delta_normalized or G.delta_normalized)
    return GaussianForm(jt.A, jt.b, jt.c, n_in, n_out, delta)


def tensor_all(*forms: GaussianForm) -> GaussianForm:
    out = forms[0]
    for F in forms[1:]:
        out = tensor(out, F)
    return out


def partial_contract(F: GaussianForm, modes: Sequence[int], G: GaussianForm,
                     log_scale: complex = 0.0) -> GaussianForm:
    """Contract the bra ``<G|`` against the listed modes of the state ``F``.

    Returns the (unnormalized) state on the remaining modes of ``F``, in their
    original order.  ``G`` may be a generalized vector; the result is marked
    delta-normalized only if its own norm integral diverges.  ``log_scale``
    is an extra factor ``exp(log_scale)`` folded in before exponentiation.
    """
    modes = list(modes)
    if not (F.is_state and G.is_state):
        raise DimensionMismatchError("partial_contract expects states")
    if len(set(modes)) != len(modes) or any(k < 0 or k >= F.n_out for k in modes):
        raise DimensionMismatchError("mode_set must be distinct modes of F")
    if G.n_out != len(modes):
        raise DimensionMismatchError("bra must live on exactly the contracted modes")
    m = F.n_out
    k = len(modes)
    rest = [j for j in range(m) if j not in modes]
    # joint order: F's modes 0..m-1, then conj(G) variables m..m+k-1
    jt = _Joint(m + k)
    jt.add(F, range(m))
    jt.add(G, range(m, m + k), conjugate=True)
    pairs = [(m + i, modes[i]) for i in range(k)]
    A, b, c = integrate_pairs(jt.A, jt.b, jt.c, pairs, rest, log_scale=log_scale)
    return GaussianForm(A, b, c, 0, len(rest), None if rest else False)


def ladder_action(F: GaussianForm, mode: int):
    """Apply ``a_mode = d/d ubar_mode`` to a state.

    Returns ``(linear, constant)`` such that ``a F = (linear . ubar + constant) F``.
    """
    if not F.is_state:
        raise DimensionMismatchError("ladder_action expects a state")
    return F.A[mode].copy(), complex(F.b[mode])


def expect_annihilation(F: GaussianForm, mode: int = 0) -> complex:
    """``<F| a_mode |F>`` computed with the first-moment routine."""
    linear, const = ladder_action(F, mode)
    out = const * inner_product(F, F)
    for j, coef in enumerate(linear):
        if coef != 0:
            out += coef * first_moment(F, F, j)
    return complex(out)
