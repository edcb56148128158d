"""Qubit teleportation with state vectors, and photonic Bell detection by coincidence counting.

Tensor ordering is Victor, Alice, Bob from left to right, so the basis index of
``|i_V i_A i_B>`` is ``4 i_V + 2 i_A + i_B``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, MeasurementError, SectorError
from .fock import embed, ladder_matrices
from .transforms import expm

UNIT_TOL = 1e-12
COMPLETENESS_TOL = 1e-10
FORCED_MIN_PROB = 1e-14


@dataclass(frozen=True, eq=False)
class QubitState:
    """Normalized vector of ``n`` qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        x = np.array(self.amplitudes, dtype=complex).ravel()
        n = int(round(math.log2(x.size))) if x.size else -1
        if n < 1 or 2 ** n != x.size:
            raise DimensionMismatchError("amplitude vector length must be a power of two")
        if abs(np.linalg.norm(x) - 1.0) > UNIT_TOL:
            raise ValueError("qubit state must have unit norm")
        x.flags.writeable = False
        object.__setattr__(self, "amplitudes", x)

    @property
    def n(self) -> int:
        return int(round(math.log2(self.amplitudes.size)))

    def kron(self, other: "QubitState") -> "QubitState":
        return QubitState(np.kron(self.amplitudes, other.amplitudes))

    def overlap(self, other: "QubitState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    @classmethod
    def basis(cls, bits: str) -> "QubitState":
        v = np.zeros(2 ** len(bits), complex)
        v[int(bits, 2)] = 1.0
        return cls(v)


@dataclass(frozen=True, eq=False)
class GateMatrix:
    """Unitary of dimension ``2^k``."""

    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        U = np.array(self.matrix, dtype=complex)
        d = U.shape[0]
        if U.ndim != 2 or U.shape[1] != d or d & (d - 1) or d < 2:
            raise DimensionMismatchError("gate must be a square matrix of dimension 2^k")
        if np.abs(U.conj().T @ U - np.eye(d)).max() > UNIT_TOL:
            raise ValueError(f"gate {self.name or ''} is not unitary")
        U.flags.writeable = False
        object.__setattr__(self, "matrix", U)

    def __call__(self, psi: QubitState) -> QubitState:
        if psi.amplitudes.size != self.matrix.shape[0]:
            raise DimensionMismatchError("gate and state dimensions differ")
        return QubitState(self.matrix @ psi.amplitudes)

    def __matmul__(self, other: "GateMatrix") -> "GateMatrix":
        return GateMatrix(self.matrix @ other.matrix, f"{self.name}{other.name}")

    def kron(self, other: "GateMatrix") -> "GateMatrix":
        return GateMatrix(np.kron(self.matrix, other.matrix), f"{self.name}(x){other.name}")


def standard_gates() -> dict[str, GateMatrix]:
    """``I, X, Y, Z, H`` and ``CNOT`` (control on the left qubit)."""
    r = 1 / math.sqrt(2.0)
    cnot = np.eye(4)[[0, 1, 3, 2]]
    return {
        "I": GateMatrix(np.eye(2), "I"),
        "X": GateMatrix([[0, 1], [1, 0]], "X"),
        "Y": GateMatrix([[0, -1j], [1j, 0]], "Y"),
        "Z": GateMatrix([[1, 0], [0, -1]], "Z"),
        "H": GateMatrix([[r, r], [r, -r]], "H"),
        "CNOT": GateMatrix(cnot, "CNOT"),
    }


BELL_LABELS = ((0, 0), (0, 1), (1, 0), (1, 1))


def bell_states() -> dict[tuple[int, int], QubitState]:
    """``|beta_ij> = CNOT (H (x) I) |ij>``."""
    G = standard_gates()
    circuit = G["CNOT"] @ G["H"].kron(G["I"])
    return {ij: circuit(QubitState.basis(f"{ij[0]}{ij[1]}")) for ij in BELL_LABELS}


def bell_decompose(psi: QubitState) -> np.ndarray:
    """Coefficients of a two-qubit state over ``(beta00, beta01, beta10, beta11)``."""
    if psi.n != 2:
        raise DimensionMismatchError("Bell decomposition needs a two-qubit state")
    B = bell_states()
    return np.array([B[ij].overlap(psi) for ij in BELL_LABELS])


def bell_recompose(coeffs) -> QubitState:
    coeffs = np.asarray(coeffs, complex)
    if coeffs.shape != (4,):
        raise DimensionMismatchError("expected four Bell coefficients")
    B = bell_states()
    return QubitState(sum(c * B[ij].amplitudes for c, ij in zip(coeffs, BELL_LABELS)))


def _checked_projectors(projectors, d: int) -> list[np.ndarray]:
    P = [np.asarray(M, complex) for M in projectors]
    if any(M.shape != (d, d) for M in P):
        raise DimensionMismatchError("projector dimension differs from the state")
    for i, M in enumerate(P):
        if np.abs(M - M.conj().T).max() > COMPLETENESS_TOL or np.abs(M @ M - M).max() > COMPLETENESS_TOL:
            raise MeasurementError(f"M_{i} is not an orthogonal projector")
        for N in P[i + 1:]:
            if np.abs(M @ N).max() > COMPLETENESS_TOL:
                raise MeasurementError("projectors are not mutually orthogonal")
    if np.abs(sum(P) - np.eye(d)).max() > COMPLETENESS_TOL:
        raise MeasurementError("projectors do not sum to the identity")
    return P


def projective_measurement(projectors, psi: QubitState, rng: np.random.Generator | None = None,
                           outcome: int | None = None):
    """Measure ``psi`` with a complete set of orthogonal projectors.

    Returns ``(m, post_state, p_m)`` with ``p_m = <psi|M_m|psi>``.  Pass
    ``outcome`` to force the result, otherwise ``rng`` to sample it.
    """
    v = psi.amplitudes
    P = _checked_projectors(projectors, v.size)
    probs = np.array([np.vdot(v, M @ v).real for M in P])
    if outcome is None:
        if rng is None:
            raise ValueError("a random generator is required when the outcome is not forced")
        outcome = int(rng.choice(len(P), p=probs / probs.sum()))
    elif probs[outcome] < FORCED_MIN_PROB:
        raise MeasurementError(f"forced outcome {outcome} has probability {probs[outcome]:.3g}")
    post = P[outcome] @ v
    return outcome, QubitState(post / np.linalg.norm(post)), float(probs[outcome])


def measurement_counts(projectors, psi: QubitState, rng: np.random.Generator, shots: int) -> np.ndarray:
    """Outcome histogram of ``shots`` independent measurements of ``psi``."""
    v = psi.amplitudes
    P = _checked_projectors(projectors, v.size)
    probs = np.array([np.vdot(v, M @ v).real for M in P])
    draws = rng.choice(len(P), size=shots, p=probs / probs.sum())
    return np.bincount(draws, minlength=len(P))


def teleport_projectors() -> list[np.ndarray]:
    """``M_ij = |ij><ij|_VA (x) I_B`` in the order 00, 01, 10, 11."""
    out = []
    for i, j in BELL_LABELS:
        e = np.zeros(4)
        e[2 * i + j] = 1.0
        out.append(np.kron(np.outer(e, e), np.eye(2)))
    return out


def correction(i: int, j: int) -> GateMatrix:
    """Bob's correction for outcome ``(ij)``: X if ``j``, then Z if ``i``."""
    G = standard_gates()
    U = G["I"]
    if j:
        U = G["X"] @ U
    if i:
        U = G["Z"] @ U
    return U


@dataclass(frozen=True, eq=False)
class QubitTeleportResult:
    outcome: tuple[int, int]
    probabilities: np.ndarray
    pre_measurement: QubitState
    output: QubitState


def teleport_qubit(psi_in: QubitState, rng: np.random.Generator | None = None,
                   outcome: tuple[int, int] | None = None) -> QubitTeleportResult:
    """Teleport one qubit from Victor to Bob through a shared ``|beta00>``."""
    if psi_in.n != 1:
        raise DimensionMismatchError("input must be a single qubit")
    G = standard_gates()
    psi0 = psi_in.kron(bell_states()[(0, 0)])
    rotate = (G["H"].kron(G["I"]) @ G["CNOT"]).kron(G["I"])
    psi2 = rotate(psi0)
    P = teleport_projectors()
    v = psi2.amplitudes
    probs = np.array([np.vdot(v, M @ v).real for M in P])
    forced = None if outcome is None else 2 * outcome[0] + outcome[1]
    m, post, _ = projective_measurement(P, psi2, rng, forced)
    i, j = divmod(m, 2)
    bob = post.amplitudes.reshape(4, 2)[m]
    out = correction(i, j)(QubitState(bob / np.linalg.norm(bob)))
    return QubitTeleportResult((i, j), probs, psi2, out)


# -- coincidence detection of the singlet ------------------------------------------------------
#
# Four optical modes: (V, horizontal), (V, vertical), (A, horizontal), (A, vertical).
# A qubit value 0/1 is the polarization of the single photon a party holds.

_V_MODES = (0, 1)
_A_MODES = (2, 3)
_FOCK_CUTOFF = 2


def coincidence_amplitudes(psi: QubitState) -> dict[tuple[int, int], complex]:
    """``<Omega| b_{1k} b_{0j} |psi_out>`` for detector polarizations ``j`` (port 0), ``k`` (port 1).

    Equal to ``(psi_jk - psi_kj) / 2``, i.e. a multiple of ``<beta11|psi>``
    when ``j != k`` and zero otherwise.
    """
    if psi.n != 2:
        raise DimensionMismatchError("expected a two-photon polarization state")
    m = psi.amplitudes.reshape(2, 2)
    return {(j, k): complex(0.5 * (m[j, k] - m[k, j])) for j in (0, 1) for k in (0, 1)}


def coincidence_bell_detect(psi) -> float:
    """Probability that the two output ports of a half-beam splitter both click.

    Only the singlet ``|beta11>`` produces coincidences, so the probability is
    ``|<beta11|psi>|^2``.  ``psi`` is a two-qubit state or a four-mode Fock
    array of shape ``(3, 3, 3, 3)``; the latter must hold exactly one photon
    in Victor's modes and one in Alice's.
    """
    if not isinstance(psi, QubitState):
        psi = polarization_from_fock(psi)
    amps = coincidence_amplitudes(psi)
    return float(sum(abs(a) ** 2 for a in amps.values()))


def polarization_to_fock(psi: QubitState) -> np.ndarray:
    """Embed ``sum psi_jk |j>_V |k>_A`` as ``sum psi_jk a^dag_{V,j} a^dag_{A,k} |Omega>``."""
    if psi.n != 2:
        raise DimensionMismatchError("expected a two-photon polarization state")
    out = np.zeros((_FOCK_CUTOFF + 1,) * 4, complex)
    m = psi.amplitudes.reshape(2, 2)
    for j, k in itertools.product((0, 1), repeat=2):
        idx = [0, 0, 0, 0]
        idx[_V_MODES[j]] = 1
        idx[_A_MODES[k]] = 1
        out[tuple(idx)] = m[j, k]
    return out


def polarization_from_fock(coeffs) -> QubitState:
    """Inverse of :func:`polarization_to_fock`; rejects states outside the one-photon-per-party sector."""
    c = np.asarray(coeffs, complex)
    if c.shape != (_FOCK_CUTOFF + 1,) * 4:
        raise DimensionMismatchError("expected a four-mode Fock array with cutoff 2")
    m = np.zeros((2, 2), complex)
    for idx in zip(*np.nonzero(np.abs(c) > 1e-14)):
        nv = idx[0] + idx[1]
        na = idx[2] + idx[3]
        if nv != 1 or na != 1:
            raise SectorError(
                f"component {tuple(int(x) for x in idx)} has {nv} photon(s) with Victor "
                f"and {na} with Alice; exactly one each is required"
            )
        m[idx[1], idx[3]] = c[idx]
    return QubitState(m.ravel())


def oracle_coincidence(psi: QubitState) -> float:
    """Brute-force coincidence probability in a truncated four-mode Fock space.

    Each polarization pair ``(V, j), (A, j)`` meets on a half-beam splitter
    ``exp(-pi/4 (a_V^dag a_A - a_V a_A^dag))``; a coincidence is one photon in
    the V-side output modes and one in the A-side output modes.
    """
    vec = polarization_to_fock(psi).ravel()
    a, ad = ladder_matrices(_FOCK_CUTOFF)
    gen = np.zeros((vec.size, vec.size), complex)
    for v_mode, a_mode in zip(_V_MODES, _A_MODES):
        gen += embed(ad, v_mode, 4) @ embed(a, a_mode, 4) - embed(a, v_mode, 4) @ embed(ad, a_mode, 4)
    out = (expm(-math.pi / 4 * gen) @ vec).reshape((_FOCK_CUTOFF + 1,) * 4)
    prob = 0.0
    for idx in itertools.product(range(_FOCK_CUTOFF + 1), repeat=4):
        if idx[0] + idx[1] == 1 and idx[2] + idx[3] == 1:
            prob += abs(out[idx]) ** 2
    return float(prob)
