"""Optical devices as Gaussian kernels and states.

Every kernel here is obtained from :mod:`bargmann.transforms`; this module
only chooses generators and parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DeltaNormalizationError, DimensionMismatchError
from .gaussian import (
    GaussianForm,
    apply,
    expect_annihilation,
    integrate_pairs,
    norm,
    partial_contract,
    tensor,
    vacuum,
)
from .transforms import QuadraticGenerator, linear_hamiltonian_kernel, quadratic_hamiltonian_kernel


def displacement_kernel(alpha: complex) -> GaussianForm:
    """``D(alpha)``: ``exp(-|alpha|^2/2) exp(ubar v - conj(alpha) v + alpha ubar)``."""
    return linear_hamiltonian_kernel([-1j * alpha], 1.0)


def coherent_state(alpha: complex) -> GaussianForm:
    """``|alpha> = D(alpha)|0> = exp(-|alpha|^2/2) exp(alpha ubar)``."""
    return apply(displacement_kernel(alpha), vacuum(1))


def squeezer_kernel(g: float) -> GaussianForm:
    """Parametric amplifier ``exp(iH)`` with ``B = -ig``, ``C = 0``."""
    return quadratic_hamiltonian_kernel(QuadraticGenerator([[-1j * g]], [[0.0]], 1.0))


def squeezed_vacuum(g: float) -> GaussianForm:
    """``(1 - tanh^2 g)^(1/4) exp(1/2 tanh(g) ubar^2)``."""
    if not math.isfinite(g):
        raise ValueError("squeezing parameter must be finite")
    return apply(squeezer_kernel(g), vacuum(1))


def beam_splitter(theta: float) -> GaussianForm:
    """Two-mode kernel of ``exp(i H_bs)``, ``H_bs = i theta (a1^dagger a2 - a1 a2^dagger)``.

    Acting on a state it substitutes
    ``f(ubar1, ubar2) -> f(ubar1 cos + ubar2 sin, -ubar1 sin + ubar2 cos)``.
    """
    C = np.array([[0, 1j * theta], [-1j * theta, 0]])
    return quadratic_hamiltonian_kernel(QuadraticGenerator(np.zeros((2, 2)), C, 1.0))


def half_beam_splitter() -> GaussianForm:
    return beam_splitter(math.pi / 4)


def phase_shifter(phi: float) -> GaussianForm:
    """``exp(i phi a^dagger a)``."""
    return quadratic_hamiltonian_kernel(QuadraticGenerator([[0.0]], [[phi]], 1.0))


@dataclass(frozen=True)
class HomodyneSetting:
    """Local-oscillator phase (radians) and amplitude ``|alpha_2|``."""

    phase: float
    lo_amplitude: float = 1.0

    def __post_init__(self):
        if self.lo_amplitude < 0:
            raise ValueError("local-oscillator amplitude must be non-negative")


def homodyne_expectation(psi: GaussianForm, setting: HomodyneSetting) -> float:
    """Mean photocurrent difference of a balanced homodyne detector.

    ``sqrt(2) |alpha_2| <psi|(q cos theta + p sin theta)|psi>`` for a
    normalized one-mode state, with ``q = (a + a^dagger)/sqrt 2`` and
    ``p = (a - a^dagger)/(sqrt 2 i)``.
    """
    if not psi.is_state or psi.n_out != 1:
        raise DimensionMismatchError("homodyne detection acts on a one-mode state")
    if psi.delta_normalized:
        raise DeltaNormalizationError("homodyne expectation needs a normalizable state")
    if abs(norm(psi) - 1.0) > 1e-9:
        raise ValueError("state must be normalized")
    a = expect_annihilation(psi, 0)
    q = math.sqrt(2.0) * a.real
    p = math.sqrt(2.0) * a.imag
    return math.sqrt(2.0) * setting.lo_amplitude * (q * math.cos(setting.phase)
                                                    + p * math.sin(setting.phase))


def displacement_limit(phi: GaussianForm, alpha: complex, theta: float) -> GaussianForm:
    """State after mixing ``phi`` with ``|beta>``, ``beta = alpha / sin(theta)``, and projecting
    the ancilla back on ``<beta|``.

    Equals ``exp(-|beta|^2) exp(-beta ubar sin) exp(|beta|^2 cos) phi(ubar cos + conj(beta) sin)``
    and tends to ``D(-alpha) phi`` as ``theta -> 0``.
    """
    if not (0 < theta < math.pi / 2):
        raise ValueError("theta must lie in (0, pi/2)")
    if not phi.is_state or phi.n_out != 1 or phi.delta_normalized:
        raise DimensionMismatchError("displacement_limit needs a normalizable one-mode state")
    beta = alpha / math.sin(theta)
    # unnormalized exp(beta ubar) for ket and bra; both exp(-|beta|^2/2) go into log_scale
    probe = GaussianForm([[0.0]], [beta], 1.0, 0, 1)
    mixed = apply(beam_splitter(theta), tensor(phi, probe))
    return partial_contract(mixed, [1], probe, log_scale=-abs(beta) ** 2)


def coherent_resolution() -> GaussianForm:
    """Exact ``int |alpha><alpha| dalphabar dalpha / (2 pi i)`` as a one-mode kernel.

    The family's outer product ``exp(-|alpha|^2) exp(alpha ubar) exp(conj(alpha) v)``
    is integrated over alpha; ``exp(-|alpha|^2)`` is the integration weight.
    """
    # variables: (v, ubar, alpha, conj alpha)
    A = np.zeros((4, 4), complex)
    A[1, 2] = A[2, 1] = 1.0
    A[0, 3] = A[3, 0] = 1.0
    A_, b_, c_ = integrate_pairs(A, np.zeros(4), 1.0, [(2, 3)], [0, 1])
    return GaussianForm(A_, b_, c_, 1, 1)
