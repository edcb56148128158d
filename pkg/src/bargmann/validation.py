"""Cross-validation of the symbolic kernels against the truncated Fock backend.

Each device is checked through coherent-probe matrix elements
``<beta1| K |beta2>``: once from the Gaussian forms and once by evolving the
truncated Fock vector with the device generator built from ladder matrices.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import devices
from .cv_teleport import epr_state, fidelity_coherent
from .errors import CutoffWarning
from .fock import coherent_coefficients, evolve, oracle_teleport_cv, sparse_ladder, state_to_fock
from .gaussian import GaussianForm, apply, inner_product, tensor_all
from .transforms import QuadraticGenerator, linear_hamiltonian_kernel, quadratic_hamiltonian_kernel

PROBES_1 = (0.0, 0.7, -0.4 + 0.6j, 0.9j)
PROBES_2 = ((0.0, 0.0), (0.5, -0.3j), (-0.6 + 0.2j, 0.4), (0.3j, 0.8))
FIDELITY_GAMMAS = (0.0, 0.6, -0.3 + 0.7j)
FIDELITY_ALPHAS = (0.0, 0.8j, 0.5 - 0.5j)
FIDELITY_QS = (0.0, 0.5, 0.9)


def _quadratic_generator(B, C, t, N):
    """Sparse ``i t H`` for ``H = 1/2 (a^dag B a^dag + a conj(B) a + 2 a^dag C a)``."""
    B = np.atleast_2d(np.asarray(B, complex))
    C = np.atleast_2d(np.asarray(C, complex))
    n = B.shape[0]
    a = [sparse_ladder(N, k, n) for k in range(n)]
    ad = [x.conj().T for x in a]
    H = 0 * a[0]
    for j, k in itertools.product(range(n), repeat=2):
        H = H + 0.5 * (B[j, k] * ad[j] @ ad[k] + np.conj(B[j, k]) * a[j] @ a[k])
        H = H + C[j, k] * ad[j] @ a[k]
    return 1j * t * H


def _linear_generator(f, t, N):
    f = np.atleast_1d(np.asarray(f, complex))
    n = f.size
    a = [sparse_ladder(N, k, n) for k in range(n)]
    H = sum(f[k] * a[k].conj().T + np.conj(f[k]) * a[k] for k in range(n))
    return 1j * t * H


@dataclass(frozen=True)
class DeviceCase:
    name: str
    kernel: GaussianForm
    generator: object  # callable N -> sparse generator

    @property
    def modes(self) -> int:
        return self.kernel.n_in


def device_cases() -> list[DeviceCase]:
    """Every device of the library with a fixed, generic parameter."""
    B2 = np.array([[0.2 - 0.1j, 0.15j], [0.15j, -0.1]])
    C2 = np.array([[0.3, 0.1 - 0.2j], [0.1 + 0.2j, -0.25]])
    f2 = np.array([0.3 - 0.2j, 0.1j])
    alpha = 0.3 + 0.2j
    return [
        DeviceCase("displacement", devices.displacement_kernel(alpha),
                   lambda N: _linear_generator([-1j * alpha], 1.0, N)),
        DeviceCase("squeezer", devices.squeezer_kernel(0.4),
                   lambda N: _quadratic_generator([[-0.4j]], [[0.0]], 1.0, N)),
        DeviceCase("phase_shifter", devices.phase_shifter(0.7),
                   lambda N: _quadratic_generator([[0.0]], [[0.7]], 1.0, N)),
        DeviceCase("beam_splitter", devices.beam_splitter(0.6),
                   lambda N: _quadratic_generator(np.zeros((2, 2)), [[0, 0.6j], [-0.6j, 0]], 1.0, N)),
        DeviceCase("half_beam_splitter", devices.half_beam_splitter(),
                   lambda N: _quadratic_generator(np.zeros((2, 2)),
                                                  [[0, 1j * math.pi / 4], [-1j * math.pi / 4, 0]], 1.0, N)),
        DeviceCase("quadratic_two_mode", quadratic_hamiltonian_kernel(QuadraticGenerator(B2, C2, 0.8)),
                   lambda N: _quadratic_generator(B2, C2, 0.8, N)),
        DeviceCase("linear_two_mode", linear_hamiltonian_kernel(f2, 0.7),
                   lambda N: _linear_generator(f2, 0.7, N)),
    ]


def _probe_vector(betas, N):
    v = np.ones(1, complex)
    for b in betas:
        v = np.kron(v, coherent_coefficients(b, N))
    return v


def _probe_state(betas):
    return tensor_all(*(devices.coherent_state(b) for b in betas))


def device_deviation(case: DeviceCase, N: int = 40) -> tuple[float, float]:
    """Max |symbolic - oracle| at cutoff N and max |oracle(N) - oracle(2N)| over probe pairs."""
    probes = [(b,) for b in PROBES_1] if case.modes == 1 else list(PROBES_2)
    gens = {M: case.generator(M) for M in (N, 2 * N)}
    dev = conv = 0.0
    for p1, p2 in itertools.product(probes, repeat=2):
        sym = inner_product(_probe_state(p1), apply(case.kernel, _probe_state(p2)))
        orc = {M: np.vdot(_probe_vector(p1, M), evolve(gens[M], _probe_vector(p2, M))) for M in gens}
        dev = max(dev, abs(sym - orc[N]))
        conv = max(conv, abs(orc[N] - orc[2 * N]))
    return float(dev), float(conv)


def fidelity_grid_deviation(N: int = 40) -> tuple[float, float]:
    """Closed-form fidelity vs brute force on the 27-point grid, and the change from N/2 to N."""
    dev = conv = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", CutoffWarning)
        for g, a, q in itertools.product(FIDELITY_GAMMAS, FIDELITY_ALPHAS, FIDELITY_QS):
            hi = oracle_teleport_cv(g, a, q, N, strict=False)
            lo = oracle_teleport_cv(g, a, q, N // 2, strict=False)
            dev = max(dev, abs(fidelity_coherent(g, a, q) - hi))
            conv = max(conv, abs(hi - lo))
    return float(dev), float(conv)


def state_expansion_deviation(N: int = 40) -> float:
    """Fock expansion of coherent, squeezed and EPR states against their series."""
    dev = 0.0
    for b in PROBES_1:
        psi = state_to_fock(devices.coherent_state(b), N)
        dev = max(dev, float(np.abs(psi.coeffs - coherent_coefficients(b, N)).max()))
    for q in (0.0, 0.5):
        psi = state_to_fock(epr_state(q), N).coeffs
        target = np.diag(math.sqrt(1 - q * q) * q ** np.arange(N + 1))
        dev = max(dev, float(np.abs(psi - target).max()))
    return dev


def run_all(N: int = 40, tol: float = 1e-6) -> dict:
    """Run every check; returns a JSON-ready report."""
    checks = {}
    for case in device_cases():
        d, c = device_deviation(case, N)
        checks[f"device:{case.name}"] = {"max_deviation": d, "cutoff_change": c}
    d, c = fidelity_grid_deviation(N)
    checks["fidelity_grid"] = {"max_deviation": d, "cutoff_change": c}
    checks["state_expansion"] = {"max_deviation": state_expansion_deviation(N), "cutoff_change": 0.0}
    for v in checks.values():
        v["pass"] = v["max_deviation"] < tol and v["cutoff_change"] < tol
    return {"cutoff": N, "tolerance": tol, "checks": checks,
            "pass": all(v["pass"] for v in checks.values())}
