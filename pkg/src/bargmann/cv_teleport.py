"""Continuous-variable teleportation of a coherent state through a two-mode squeezed resource.

Mode labels follow the protocol: 0 is Victor's input, 1 is Alice's half of the
resource and 2 is Bob's half.  The Bell measurement outcome is
``alpha = x_minus + i p_plus``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.special

from .devices import coherent_state, displacement_kernel
from .errors import DeltaNormalizationError, DimensionMismatchError, MeasurementError
from .fock import FockTensor, hermite_functions, recommended_cutoff
from .gaussian import (
    GaussianForm,
    apply,
    inner_product,
    integrate_pairs,
    ladder_action,
    norm,
    partial_contract,
    state,
    tensor,
)

POSITION = "position"
MOMENTUM = "momentum"


def _check_q(q: float) -> float:
    q = float(q)
    if not (0.0 <= q < 1.0):
        raise ValueError(f"q must lie in [0, 1); got {q}")
    return q


# -- resource and measurement basis ------------------------------------------------


def epr_state(q: float) -> GaussianForm:
    """Normalized two-mode squeezed vacuum ``sqrt(1 - q^2) exp(q ubar1 ubar2)``."""
    q = _check_q(q)
    return state([[0.0, q], [q, 0.0]], [0.0, 0.0], math.sqrt(1.0 - q * q))


def generalized_bell(alpha: complex) -> GaussianForm:
    """``pi^{-1/2} exp(-|alpha|^2/2) exp(ubar0 ubar1 - conj(alpha) ubar1 + alpha ubar0)``.

    Equal to ``pi^{-1/2} sum_n D(alpha)|n> (x) |n>``; delta-normalized.
    """
    alpha = complex(alpha)
    c = math.pi ** -0.5 * math.exp(-0.5 * abs(alpha) ** 2)
    return state([[0.0, 1.0], [1.0, 0.0]], [alpha, -alpha.conjugate()], c, delta_normalized=True)


def bell_completeness_kernel() -> GaussianForm:
    """``int |B(alpha)><B(alpha)| dx_minus dp_plus`` as an exact two-mode kernel.

    The flat measure ``dx dp`` equals ``pi exp(|alpha|^2)`` times the Gaussian
    measure of :func:`integrate_pairs`; that factor cancels ``pi^{-1}
    exp(-|alpha|^2)`` from the outer product, leaving an exponent linear in
    ``alpha`` and ``conj(alpha)``.
    """
    # variables: v0, v1, ubar0, ubar1, alpha, conj(alpha)
    v0, v1, u0, u1, a, ab = range(6)
    A = np.zeros((6, 6), complex)

    def sym(i, j, val):
        A[i, j] += val
        A[j, i] += val

    sym(u0, u1, 1.0)   # ket: ubar0 ubar1
    sym(a, u0, 1.0)    #      alpha ubar0
    sym(ab, u1, -1.0)  #      -conj(alpha) ubar1
    sym(v0, v1, 1.0)   # bra: v0 v1
    sym(ab, v0, 1.0)   #      conj(alpha) v0
    sym(a, v1, -1.0)   #      -alpha v1
    A_, b_, c_ = integrate_pairs(A, np.zeros(6), 1.0, [(a, ab)], [v0, v1, u0, u1])
    return GaussianForm(A_, b_, c_, 2, 2)


def quadrature_eigenstate(kind: str, value: float) -> GaussianForm:
    """Generalized eigenvector of ``q = (a + a^dagger)/sqrt2`` or ``p = (a - a^dagger)/(sqrt2 i)``.

    position: ``pi^{-1/4} exp(-x^2/2) exp(-ubar^2/2 + sqrt2 x ubar)``
    momentum: ``pi^{-1/4} exp(-p^2/2) exp(+ubar^2/2 + i sqrt2 p ubar)``
    """
    value = float(value)
    pref = math.pi ** -0.25 * math.exp(-0.5 * value * value)
    if kind == POSITION:
        return state([[-1.0]], [math.sqrt(2.0) * value], pref, delta_normalized=True)
    if kind == MOMENTUM:
        return state([[1.0]], [1j * math.sqrt(2.0) * value], pref, delta_normalized=True)
    raise ValueError(f"unknown quadrature kind {kind!r}")


def quadrature_action(F: GaussianForm, mode: int, kind: str):
    """Apply a quadrature operator to a state.

    Returns ``(linear, constant)`` with ``X F = (linear . ubar + constant) F``;
    ``a`` is the derivative and ``a^dagger`` multiplication by ``ubar``.
    """
    linear, const = ladder_action(F, mode)
    unit = np.zeros(F.n_out, complex)
    unit[mode] = 1.0
    if kind == POSITION:
        return (linear + unit) / math.sqrt(2.0), const / math.sqrt(2.0)
    if kind == MOMENTUM:
        return (linear - unit) / (1j * math.sqrt(2.0)), const / (1j * math.sqrt(2.0))
    raise ValueError(f"unknown quadrature kind {kind!r}")


# -- outcome statistics ------------------------------------------------------------------


def bob_state(gamma: complex, q: float, alpha: complex) -> GaussianForm:
    """Bob's unnormalized state after Alice projects Victor and Alice on ``<B(alpha)|``.

    Equal to ``pi^{-1/2} sqrt(1-q^2) sum_n q^n <n|D(alpha)^dagger|gamma> |n>``.
    """
    joint = tensor(coherent_state(gamma), epr_state(q))
    return partial_contract(joint, [0, 1], generalized_bell(alpha))


def outcome_log_density(gamma: complex, q: float, alpha: complex) -> float:
    """``log p(x_minus, p_plus)``: log squared norm of Bob's conditional state."""
    return 2.0 * math.log(norm(bob_state(gamma, q, alpha)))


@dataclass(frozen=True)
class BellDensity:
    """Bivariate Gaussian density of the outcome ``(x_minus, p_plus)``.

    Attributes
    ----------
    mean : ndarray, shape (2,)
    cov : ndarray, shape (2, 2)
    mass : float
        Integral of the unnormalized density; 1 when the basis bookkeeping is exact.
    """

    mean: np.ndarray
    cov: np.ndarray
    mass: float

    def pdf(self, x, p):
        """Normalized density at ``(x, p)`` (broadcasts)."""
        d = np.stack([np.asarray(x, float) - self.mean[0], np.asarray(p, float) - self.mean[1]])
        P = np.linalg.inv(self.cov)
        quad = np.einsum("i...,ij,j...->...", d, P, d)
        return np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(np.linalg.det(self.cov)))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw complex outcomes ``x + i p`` with Box-Muller normal variates."""
        u1 = rng.random(size)
        u2 = rng.random(size)
        r = np.sqrt(-2.0 * np.log1p(-u1))
        z = np.stack([r * np.cos(2 * math.pi * u2), r * np.sin(2 * math.pi * u2)])
        L = np.linalg.cholesky(self.cov)
        xp = self.mean[:, None] + L @ z
        return xp[0] + 1j * xp[1]


def bell_measurement_density(gamma: complex, q: float) -> BellDensity:
    """Outcome density of the Bell measurement on ``coherent(gamma) (x) epr(q)``.

    The log of ``||bob_state||^2`` is an exact quadratic in ``(x, p)``; its six
    coefficients are recovered from six evaluations.
    """
    q = _check_q(q)
    pts = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1)]
    vals = np.array([outcome_log_density(gamma, q, complex(x, p)) for x, p in pts])
    f0 = vals[0]
    axx = 0.5 * (vals[1] + vals[2]) - f0
    dx = 0.5 * (vals[1] - vals[2])
    app = 0.5 * (vals[3] + vals[4]) - f0
    dp = 0.5 * (vals[3] - vals[4])
    axp = vals[5] - f0 - axx - app - dx - dp
    H = -2.0 * np.array([[axx, 0.5 * axp], [0.5 * axp, app]])  # precision matrix
    if np.linalg.eigvalsh(H).min() <= 0:
        raise MeasurementError("outcome density is not normalizable")
    cov = np.linalg.inv(H)
    mean = cov @ np.array([dx, dp])
    peak = f0 + 0.5 * mean @ H @ mean
    mass = math.exp(peak) * 2.0 * math.pi * math.sqrt(np.linalg.det(cov))
    return BellDensity(mean, cov, mass)


# -- protocol ----------------------------------------------------------------------------


@dataclass(frozen=True)
class CVTeleportConfig:
    """Parameters of one teleportation run.

    Give ``alpha`` to fix the outcome, otherwise ``seed`` to sample it.
    """

    g: float
    gamma: complex
    alpha: complex | None = None
    seed: int | None = None
    q: float = field(init=False)

    def __post_init__(self):
        if not math.isfinite(self.g) or self.g < 0:
            raise ValueError("squeezing parameter g must be finite and non-negative")
        q = math.tanh(self.g)
        if q >= 1.0:
            raise ValueError("squeezing too large: tanh(g) rounds to 1")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "gamma", complex(self.gamma))
        if self.alpha is None and self.seed is None:
            raise ValueError("either a fixed outcome alpha or a seed is required")
        if self.alpha is not None:
            object.__setattr__(self, "alpha", complex(self.alpha))

    @classmethod
    def from_q(cls, q: float, gamma: complex, **kw) -> "CVTeleportConfig":
        return cls(math.atanh(_check_q(q)), gamma, **kw)


@dataclass(frozen=True, eq=False)
class CVTeleportResult:
    alpha: complex
    bob_state_raw: GaussianForm
    output_state: GaussianForm
    fidelity: float
    fidelity_normalized: float

    @property
    def x_minus(self) -> float:
        return self.alpha.real

    @property
    def p_plus(self) -> float:
        return self.alpha.imag


def teleport_cv(cfg: CVTeleportConfig) -> CVTeleportResult:
    """Run the protocol: Bell projection at ``alpha``, correction ``D(alpha)``, fidelity.

    ``fidelity`` is ``|<gamma|phi>|`` for the unnormalized conditional state
    ``phi = sum_n q^n D(alpha)|n><n|D(alpha)^dagger|gamma>``;
    ``fidelity_normalized`` uses ``phi / ||phi||``.
    """
    if cfg.alpha is not None:
        alpha = cfg.alpha
    else:
        rng = np.random.default_rng(cfg.seed)
        alpha = complex(bell_measurement_density(cfg.gamma, cfg.q).sample(rng, 1)[0])
    raw = bob_state(cfg.gamma, cfg.q, alpha)
    out = apply(displacement_kernel(alpha), raw)
    overlap = abs(inner_product(coherent_state(cfg.gamma), out))
    scale = math.pi ** -0.5 * math.sqrt(1.0 - cfg.q ** 2)
    return CVTeleportResult(alpha, raw, out, overlap / scale, overlap / norm(out))


def fidelity_coherent(gamma: complex, alpha: complex, q: float) -> float:
    """``exp((1-q)(alpha conj(gamma) + conj(alpha) gamma - |alpha|^2 - |gamma|^2))``."""
    q = _check_q(q)
    return math.exp(-(1.0 - q) * abs(complex(alpha) - complex(gamma)) ** 2)


def fidelity_normalized_coherent(gamma: complex, alpha: complex, q: float) -> float:
    """Fidelity of the normalized conditional state, ``|<gamma|phi>| / ||phi||``."""
    q = _check_q(q)
    d2 = abs(complex(alpha) - complex(gamma)) ** 2
    return math.exp(-(1.0 - q) * d2 + 0.5 * (1.0 - q * q) * d2)


def pure_fidelity(reference: GaussianForm, phi: GaussianForm) -> float:
    """``tr sqrt(rho^1/2 sigma rho^1/2)`` for pure ``rho = |reference><reference|``: ``|<reference|phi>|``."""
    return abs(inner_product(reference, phi))


def mean_fidelity_closed_form(q: float) -> float:
    """Average of :func:`fidelity_coherent` over the outcome density: ``(1+q)/(2+q)``."""
    q = _check_q(q)
    return (1.0 + q) / (2.0 + q)


def result_record(cfg: CVTeleportConfig, res: CVTeleportResult) -> dict:
    """JSON-ready record ``{gamma, g, q, x_minus, p_plus, fidelity, fidelity_normalized}``."""
    return {
        "gamma": [cfg.gamma.real, cfg.gamma.imag],
        "g": cfg.g,
        "q": cfg.q,
        "x_minus": res.x_minus,
        "p_plus": res.p_plus,
        "fidelity": res.fidelity,
        "fidelity_normalized": res.fidelity_normalized,
    }


# -- measurement with a smooth window ------------------------------------------------------


def window_weight(lam, a: float, b: float, eps: float):
    """Error-function smoothed indicator of ``[a, b]``; windows over a partition sum to 1."""
    lam = np.asarray(lam, float)
    return 0.5 * (scipy.special.erf((lam - a) / eps) - scipy.special.erf((lam - b) / eps))


def quadrature_wavefunction(psi: GaussianForm, kind: str = POSITION):
    """Return ``lam -> <lam|psi>`` for a one-mode state.

    The overlap is one Gaussian contraction with ``lam`` kept as a free
    variable, so the returned callable is an exact closed form.
    """
    if not psi.is_state or psi.n_out != 1:
        raise DimensionMismatchError("expected a one-mode state")
    probe = quadrature_eigenstate(kind, 1.0)
    slope = probe.b[0]  # b of the eigenvector is slope * lam
    # variables: u (from the conjugated eigenvector), ubar (from psi), lam
    A = np.zeros((3, 3), complex)
    A[0, 0] = np.conj(probe.A[0, 0])
    A[0, 2] = A[2, 0] = np.conj(slope)
    A[2, 2] = -1.0
    A[1, 1] = psi.A[0, 0]
    b = np.array([0.0, psi.b[0], 0.0])
    A_, b_, c_ = integrate_pairs(A, b, math.pi ** -0.25 * psi.c, [(0, 1)], [2])
    a2, b1 = complex(A_[0, 0]), complex(b_[0])

    def amplitude(lam):
        lam = np.asarray(lam, float)
        return c_ * np.exp(0.5 * a2 * lam * lam + b1 * lam)

    return amplitude


@dataclass(frozen=True, eq=False)
class SmearedOutcome:
    """Post-measurement state, window probability and the norm mass lost to the cutoff."""

    state: FockTensor
    probability: float
    tail: float


def smeared_quadrature_measurement(psi: GaussianForm, window: tuple[float, float],
                                   eps: float = 0.1, kind: str = POSITION,
                                   cutoff: int | None = None) -> SmearedOutcome:
    """Apply ``M = int chi(l) |l><l| dl`` to a normalizable one-mode state.

    ``chi^2`` is :func:`window_weight`.  The post-measurement state
    ``M psi / sqrt(<psi|M*M|psi>)`` is returned in the Fock basis, where it is
    generally non-Gaussian.  The window edges have width ``eps`` in the
    quadrature, so the Fock tail decays slowly; the default cutoff grows like
    ``10 / eps`` and the mass left beyond it is reported as ``tail``.
    """
    a, b = map(float, window)
    if not a < b:
        raise ValueError("window must satisfy a < b")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not psi.is_state or psi.n_out != 1:
        raise DimensionMismatchError("smeared measurement acts on a one-mode state")
    if psi.delta_normalized:
        raise DeltaNormalizationError("input state must be normalizable")
    if cutoff is None:
        cutoff = max(recommended_cutoff(alpha=abs(psi.b[0]) + abs(psi.A[0, 0])), math.ceil(10 / eps))
    lo, hi = a - 10 * eps, b + 10 * eps

    amplitude = quadrature_wavefunction(psi, kind)

    def weighted(lam):
        return window_weight(lam, a, b, eps) * abs(amplitude(lam)) ** 2

    prob = scipy.integrate.quad(weighted, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200)[0]
    prob /= norm(psi) ** 2
    if prob < 1e-12:
        raise MeasurementError(f"window probability {prob:.3g} vanishes")

    phases = (1j ** np.arange(cutoff + 1)) if kind == MOMENTUM else np.ones(cutoff + 1)

    def coeffs(lam):
        basis = phases * hermite_functions(lam, cutoff)  # <n|l>
        chi = math.sqrt(max(float(window_weight(lam, a, b, eps)), 0.0))
        return chi * basis * amplitude(lam)

    vec = scipy.integrate.quad_vec(coeffs, lo, hi, epsabs=1e-12, epsrel=1e-10)[0]
    vec = vec / norm(psi)
    kept = float(np.linalg.norm(vec)) ** 2
    return SmearedOutcome(FockTensor(vec / math.sqrt(kept), normalized=True), prob,
                          max(0.0, 1.0 - kept / prob))


# -- regularized orthogonality -----------------------------------------------------------------


def damping_kernel(sigma: float) -> GaussianForm:
    """Kernel ``exp(e^{-sigma} ubar v)`` of ``exp(-sigma N)``."""
    return GaussianForm([[0.0, math.exp(-sigma)], [math.exp(-sigma), 0.0]], [0.0, 0.0], 1.0, 1, 1)


def mollified_overlap(x_prime: float, x: float, sigma: float, kind: str = POSITION) -> float:
    """``<x'|exp(-sigma N)|x>``: a smooth kernel tending to ``delta(x' - x)`` as ``sigma -> 0``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    smoothed = apply(damping_kernel(sigma), quadrature_eigenstate(kind, x))
    return inner_product(quadrature_eigenstate(kind, x_prime), smoothed).real


def mollified_pairing(test_fn, x: float, sigma: float, kind: str = POSITION,
                      width: float = 12.0) -> float:
    """``int mollified_overlap(x', x, sigma) test_fn(x') dx'`` by adaptive quadrature."""
    f = lambda xp: mollified_overlap(xp, x, sigma, kind) * test_fn(xp)  # noqa: E731
    return scipy.integrate.quad(f, x - width, x + width, points=[x], epsabs=1e-13,
                                epsrel=1e-11, limit=400)[0]
