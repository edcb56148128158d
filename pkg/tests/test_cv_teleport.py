import json
import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, settings
from hypothesis import strategies as st

from bargmann.cv_teleport import (
    MOMENTUM,
    POSITION,
    CVTeleportConfig,
    bell_completeness_kernel,
    bell_measurement_density,
    bob_state,
    epr_state,
    fidelity_coherent,
    fidelity_normalized_coherent,
    generalized_bell,
    mean_fidelity_closed_form,
    mollified_overlap,
    mollified_pairing,
    pure_fidelity,
    quadrature_action,
    quadrature_eigenstate,
    quadrature_wavefunction,
    result_record,
    smeared_quadrature_measurement,
    teleport_cv,
    window_weight,
)
from bargmann.devices import coherent_state, half_beam_splitter, squeezed_vacuum
from bargmann.errors import DeltaNormalizationError, MeasurementError
from bargmann.fock import (
    fock_displacement,
    hermite_functions,
    ladder_matrices,
    oracle_teleport_cv,
    state_to_fock,
)
from bargmann.gaussian import apply, identity_kernel, norm, tensor, vacuum

from conftest import complexes


# -- resource state -------------------------------------------------------------------


def test_epr_without_squeezing_is_vacuum():
    assert epr_state(0.0).allclose(vacuum(2), atol=0)


def test_epr_norm_and_schmidt_coefficients():
    q = 0.5
    psi = epr_state(q)
    assert norm(psi) == pytest.approx(1.0, abs=1e-12)
    s = np.linalg.svd(state_to_fock(psi, 40).coeffs, compute_uv=False)
    assert np.allclose(s, math.sqrt(1 - q * q) * q ** np.arange(41), atol=1e-12)


def test_epr_from_beam_splitter():
    g = 0.7
    out = apply(half_beam_splitter(), tensor(squeezed_vacuum(g), squeezed_vacuum(-g)))
    assert out.allclose(epr_state(math.tanh(g)), atol=1e-10, phase=False)


def test_epr_rejects_ideal_limit():
    with pytest.raises(ValueError):
        epr_state(1.0)


# -- Bell basis ---------------------------------------------------------------------------


def test_bell_state_at_origin():
    B = generalized_bell(0)
    assert np.array_equal(B.A, [[0, 1], [1, 0]]) and not B.b.any()
    assert B.c == pytest.approx(math.pi ** -0.5) and B.delta_normalized


def test_bell_completeness():
    assert bell_completeness_kernel().allclose(identity_kernel(2), atol=1e-10)


@given(complexes(1.5))
@settings(max_examples=20, deadline=None)
def test_half_beam_splitter_diagonalizes_bell_basis(alpha):
    # sum_n D(alpha)|n>|n> = pi^{1/2} B(alpha) goes to pi^{1/2} |x_minus>|p_plus>
    out = apply(half_beam_splitter(), generalized_bell(alpha).scaled(math.sqrt(math.pi)))
    want = tensor(quadrature_eigenstate(POSITION, alpha.real), quadrature_eigenstate(MOMENTUM, alpha.imag))
    assert out.allclose(want.scaled(math.sqrt(math.pi)), atol=1e-12)


# -- quadrature eigenstates -----------------------------------------------------------------


def test_position_eigenstate_at_zero():
    x = quadrature_eigenstate(POSITION, 0.0)
    assert x.A[0, 0] == -1 and x.b[0] == 0 and x.c == pytest.approx(math.pi ** -0.25)


@pytest.mark.parametrize("kind", [POSITION, MOMENTUM])
def test_eigenvalue_equation(kind):
    linear, const = quadrature_action(quadrature_eigenstate(kind, 1.3), 0, kind)
    assert np.abs(linear).max() < 1e-15 and const == pytest.approx(1.3, abs=1e-15)


def test_coherent_position_density():
    g = 0.4 + 0.1j
    amp = quadrature_wavefunction(coherent_state(g), POSITION)
    total = scipy.integrate.quad(lambda x: abs(amp(x)) ** 2, -np.inf, np.inf)[0]
    assert total == pytest.approx(1.0, abs=1e-10)
    # |<x|gamma>|^2 = pi^{-1/2} exp(-(x - sqrt2 Re gamma)^2)
    x = 0.9
    assert abs(amp(x)) ** 2 == pytest.approx(math.exp(-(x - math.sqrt(2) * 0.4) ** 2) / math.sqrt(math.pi))


def test_wavefunction_matches_hermite_expansion():
    psi = squeezed_vacuum(0.3)
    v = state_to_fock(psi, 40).vector
    for kind, ph in [(POSITION, np.ones(41)), (MOMENTUM, 1j ** np.arange(41))]:
        amp = quadrature_wavefunction(psi, kind)
        for lam in (-0.7, 0.2, 1.4):
            assert amp(lam) == pytest.approx(np.vdot(ph * hermite_functions(lam, 40), v), abs=1e-12)


# -- outcome density ---------------------------------------------------------------------------


def test_density_normalized_on_grid():
    d = bell_measurement_density(0.3 - 0.2j, 0.6)
    assert d.mass == pytest.approx(1.0, abs=1e-10)
    s = np.sqrt(np.diag(d.cov))
    xs = np.linspace(d.mean[0] - 6 * s[0], d.mean[0] + 6 * s[0], 601)
    ps = np.linspace(d.mean[1] - 6 * s[1], d.mean[1] + 6 * s[1], 601)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    total = scipy.integrate.simpson(scipy.integrate.simpson(d.pdf(X, P), x=ps), x=xs)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_density_centred_for_vacuum_input():
    d = bell_measurement_density(0.0, 0.0)
    assert np.allclose(d.mean, 0, atol=1e-12)
    assert np.allclose(d.cov, 0.5 * np.eye(2), atol=1e-12)


def _oracle_density(gamma, alpha, q, N=40):
    # pi^{-1} (1 - q^2) sum_n q^{2n} |<n|D(alpha)^dagger|gamma>|^2
    D = fock_displacement(alpha, N, strict=False)
    ket = fock_displacement(gamma, N, strict=False)[:, 0]
    amp = D.conj().T @ ket
    return (1 - q * q) / math.pi * float(np.sum(q ** (2 * np.arange(N + 1)) * abs(amp) ** 2))


def test_density_matches_fock_oracle_pointwise():
    g, q = 0.6, 0.5
    d = bell_measurement_density(g, q)
    for a in (0.0, 0.6 + 0.3j, -0.4 + 1.1j):
        assert d.pdf(a.real, a.imag) == pytest.approx(_oracle_density(g, a, q), abs=1e-10)


def test_sampled_mean_matches_oracle():
    g, q, n = 0.6, 0.5, 100_000
    # oracle mean from the Fock-series density on a grid
    xs = np.linspace(g - 7, g + 7, 281)
    ps = np.linspace(-7, 7, 281)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    d2 = (X - g) ** 2 + P ** 2
    k = np.arange(60)
    logfact = np.array([math.lgamma(j + 1) for j in k])
    series = np.exp(np.multiply.outer(np.log(q * q * d2 + 1e-300), k) - logfact).sum(-1)
    dens = (1 - q * q) / math.pi * np.exp(-d2) * series
    w = scipy.integrate.simpson
    mass = w(w(dens, x=ps), x=xs)
    mean = complex(w(w(X * dens, x=ps), x=xs), w(w(P * dens, x=ps), x=xs)) / mass

    samples = bell_measurement_density(g, q).sample(np.random.default_rng(11), n)
    se_re = samples.real.std() / math.sqrt(n)
    se_im = samples.imag.std() / math.sqrt(n)
    assert abs(samples.real.mean() - mean.real) < 3 * se_re
    assert abs(samples.imag.mean() - mean.imag) < 3 * se_im


def test_sampling_is_reproducible():
    d = bell_measurement_density(0.2, 0.4)
    a = d.sample(np.random.default_rng(5), 10)
    b = d.sample(np.random.default_rng(5), 10)
    assert np.array_equal(a, b)


# -- protocol -------------------------------------------------------------------------------


@given(complexes(1.0), st.floats(0.0, 0.95))
@settings(max_examples=25, deadline=None)
def test_collapse_when_outcome_equals_input(gamma, q):
    res = teleport_cv(CVTeleportConfig.from_q(q, gamma, alpha=gamma))
    assert res.fidelity == pytest.approx(1.0, abs=1e-12)
    assert res.output_state.allclose(coherent_state(gamma).scaled(res.output_state.c / coherent_state(gamma).c),
                                     atol=1e-12)


def test_large_squeezing_limit():
    res = teleport_cv(CVTeleportConfig(6.0, 0.3, alpha=0.1 + 0.2j))
    assert res.fidelity > 0.999


def test_reference_fidelity():
    res = teleport_cv(CVTeleportConfig.from_q(0.5, 1.0, alpha=0.0))
    assert res.fidelity == pytest.approx(math.exp(-0.5), abs=1e-12)
    assert oracle_teleport_cv(1.0, 0.0, 0.5, 40) == pytest.approx(res.fidelity, abs=1e-6)
    assert res.fidelity_normalized == pytest.approx(0.8824969025845955, abs=1e-12)


@given(complexes(1.0), complexes(1.0), st.floats(0.0, 0.95))
@settings(max_examples=40, deadline=None)
def test_protocol_matches_closed_form(gamma, alpha, q):
    res = teleport_cv(CVTeleportConfig.from_q(q, gamma, alpha=alpha))
    assert abs(res.fidelity - fidelity_coherent(gamma, alpha, q)) < 1e-12
    assert abs(res.fidelity_normalized - fidelity_normalized_coherent(gamma, alpha, q)) < 1e-12


def test_bob_state_series():
    # pi^{-1/2} sqrt(1-q^2) sum_n q^n <n|D(alpha)^dagger|gamma> |n>
    g, a, q, N = 0.5 - 0.2j, 0.1 + 0.4j, 0.6, 40
    got = state_to_fock(bob_state(g, q, a), N).vector
    amp = fock_displacement(a, N, strict=False).conj().T @ fock_displacement(g, N, strict=False)[:, 0]
    want = math.sqrt((1 - q * q) / math.pi) * q ** np.arange(N + 1) * amp
    assert np.abs(got - want).max() < 1e-10


def test_closed_form_special_cases():
    g, a = 0.3 + 0.4j, -0.5
    assert fidelity_coherent(g, g, 0.7) == 1.0
    assert fidelity_coherent(g, a, 0.0) == pytest.approx(math.exp(-abs(a - g) ** 2))
    assert fidelity_coherent(1.0, 0.0, 0.5) == pytest.approx(math.exp(-0.5))


def test_closed_form_exponent_identity():
    g, a, q = 0.2 - 0.9j, 0.7 + 0.1j, 0.35
    expo = a * np.conj(g) + np.conj(a) * g - abs(a) ** 2 - abs(g) ** 2
    assert fidelity_coherent(g, a, q) == pytest.approx(math.exp((1 - q) * expo.real), rel=1e-14)


def test_closed_form_grid_matches_oracle():
    for g in (0.0, 0.6, -0.3 + 0.7j):
        for a in (0.0, 0.8j, 0.5 - 0.5j):
            for q in (0.0, 0.5, 0.9):
                assert abs(fidelity_coherent(g, a, q) - oracle_teleport_cv(g, a, q, 40, strict=False)) < 1e-6


def test_fidelity_increases_with_q():
    qs = np.linspace(0, 0.99, 50)
    for g, a in [(0.5, 0.0), (0.2j, 1.0 - 0.3j)]:
        f = [fidelity_coherent(g, a, q) for q in qs]
        assert np.all(np.diff(f) > 0)


def test_pure_fidelity_of_output():
    # the raw overlap carries the Bell-basis factor pi^{-1/2} and the resource norm sqrt(1-q^2)
    q = 0.4
    res = teleport_cv(CVTeleportConfig.from_q(q, 0.3, alpha=0.5j))
    raw = pure_fidelity(coherent_state(0.3), res.output_state)
    assert raw == pytest.approx(res.fidelity * math.sqrt((1 - q * q) / math.pi), rel=1e-12)


def test_mean_fidelity_over_outcomes():
    g, q, n = 0.4 - 0.1j, 0.5, 20_000
    alphas = bell_measurement_density(g, q).sample(np.random.default_rng(3), n)
    f = np.array([fidelity_coherent(g, a, q) for a in alphas])
    assert abs(f.mean() - mean_fidelity_closed_form(q)) < 3 * f.std() / math.sqrt(n)


def test_sampled_run_is_reproducible():
    cfg = CVTeleportConfig(0.8, 0.3 + 0.1j, seed=42)
    r1, r2 = teleport_cv(cfg), teleport_cv(cfg)
    assert r1.alpha == r2.alpha and r1.fidelity == r2.fidelity
    rec = result_record(cfg, r1)
    assert set(rec) == {"gamma", "g", "q", "x_minus", "p_plus", "fidelity", "fidelity_normalized"}
    json.dumps(rec)
    assert 0 < rec["fidelity"] <= 1


def test_config_validation():
    cfg = CVTeleportConfig(0.5, 1.0, alpha=0.0)
    assert cfg.q == pytest.approx(math.tanh(0.5), abs=1e-15)
    with pytest.raises(ValueError):
        CVTeleportConfig(-0.1, 1.0, alpha=0.0)
    with pytest.raises(ValueError):
        CVTeleportConfig(0.5, 1.0)
    with pytest.raises(ValueError):
        CVTeleportConfig(40.0, 1.0, alpha=0.0)
    with pytest.raises(ValueError):
        CVTeleportConfig.from_q(1.0, 0.0, alpha=0.0)


# -- smeared quadrature measurement --------------------------------------------------------------


def test_window_weights_partition_unity():
    lam = np.linspace(-6, 6, 101)
    edges = [-8, -2.5, 0.0, 1.0, 8]
    total = sum(window_weight(lam, a, b, 0.1) for a, b in zip(edges, edges[1:]))
    assert np.allclose(total, 1.0, atol=1e-12)


def test_full_window_leaves_vacuum():
    out = smeared_quadrature_measurement(vacuum(1), (-8, 8), 0.1)
    assert out.probability == pytest.approx(1.0, abs=1e-10)
    assert 1 - abs(out.state.coeffs[0]) < 1e-4


def test_coherent_window_probability():
    out = smeared_quadrature_measurement(coherent_state(2.0), (1, 3), 0.1)
    assert out.probability == pytest.approx(0.5903498545009404, abs=1e-8)


def test_window_probabilities_sum_to_one():
    psi = coherent_state(0.5 - 0.3j)
    edges = [-8, -1, 0.2, 1.5, 8]
    total = sum(smeared_quadrature_measurement(psi, (a, b), 0.1, cutoff=20).probability
                for a, b in zip(edges, edges[1:]))
    assert total == pytest.approx(1.0, abs=1e-4)


def test_momentum_window_against_operator_oracle():
    # spectral decomposition of the truncated momentum operator
    psi, N = coherent_state(0.3j), 300
    a, ad = ladder_matrices(N)
    lam, V = np.linalg.eigh((a - ad) / (math.sqrt(2) * 1j))
    v = state_to_fock(psi, N).vector
    Mv = V @ (np.sqrt(window_weight(lam, -1, 1, 0.1)) * (V.conj().T @ v))
    out = smeared_quadrature_measurement(psi, (-1, 1), 0.1, MOMENTUM)
    assert out.probability == pytest.approx(np.linalg.norm(Mv) ** 2, abs=1e-4)
    k = out.state.cutoff + 1
    Mv = Mv / np.linalg.norm(Mv)
    assert np.abs(Mv[:k] * math.sqrt(1 / (1 - out.tail)) - out.state.vector).max() < 1e-3
    assert out.tail == pytest.approx(np.linalg.norm(Mv[k:]) ** 2, abs=1e-4)


def test_smeared_measurement_errors():
    with pytest.raises(MeasurementError):
        smeared_quadrature_measurement(coherent_state(0.0), (30, 31), 0.1, cutoff=20)
    with pytest.raises(ValueError):
        smeared_quadrature_measurement(vacuum(1), (1, 0), 0.1)
    with pytest.raises(ValueError):
        smeared_quadrature_measurement(vacuum(1), (0, 1), 0.0)
    with pytest.raises(DeltaNormalizationError):
        smeared_quadrature_measurement(quadrature_eigenstate(POSITION, 0.0), (0, 1), 0.1)


# -- regularized orthogonality ---------------------------------------------------------------------


def test_mollified_overlap_symmetric_and_peaked():
    s = 0.05
    assert mollified_overlap(0.3, 0.5, s) == pytest.approx(mollified_overlap(0.5, 0.3, s), rel=1e-12)
    assert mollified_overlap(0.5, 0.5, s) > 10 * mollified_overlap(1.5, 0.5, s)


@pytest.mark.parametrize("kind", [POSITION, MOMENTUM])
def test_mollifier_converges_at_first_order(kind):
    phi = lambda x: math.exp(-((x - 0.2) ** 2))  # noqa: E731
    x = 0.6
    err = [mollified_pairing(phi, x, s, kind) - phi(x) for s in (0.1, 0.05, 0.025)]
    assert abs(err[2]) < abs(err[1]) < abs(err[0])
    for e1, e2 in zip(err, err[1:]):
        assert 0.4 < e2 / e1 < 0.6


def test_mollifier_leading_error_term():
    # exp(-sigma N) phi = phi - sigma N phi + O(sigma^2), N = (-d^2/dx^2 + x^2 - 1) / 2
    x = 0.1
    y = x + 0.4
    phi = lambda t: math.exp(-2 * (t + 0.4) ** 2)  # noqa: E731
    n_phi = 0.5 * (-(16 * y * y - 4) + x * x - 1) * phi(x)
    slope = [(mollified_pairing(phi, x, s) - phi(x)) / s for s in (0.004, 0.002)]
    assert 2 * slope[1] - slope[0] == pytest.approx(-n_phi, rel=1e-3)  # Richardson step
    # a narrow test function reaches the halving regime only below sigma ~ 0.02
    err = [mollified_pairing(phi, x, s) - phi(x) for s in (0.025, 0.0125, 0.00625)]
    assert abs(err[2] / err[1] - 0.5) < abs(err[1] / err[0] - 0.5) < 0.06
