import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bargmann.devices import (
    coherent_state,
    displacement_kernel,
    half_beam_splitter,
    squeezed_vacuum,
    squeezer_kernel,
)
from bargmann.errors import (
    DeltaNormalizationError,
    DimensionMismatchError,
    DivergentIntegralError,
    SingularBlockError,
)
from bargmann.fock import coherent_coefficients, gaussian_coefficients
from bargmann.gaussian import (
    GaussianForm,
    adjoint,
    apply,
    compose,
    expect_annihilation,
    first_moment,
    identity_kernel,
    inner_product,
    integrate_pairs,
    norm,
    partial_contract,
    state,
    tensor,
    vacuum,
)

from conftest import complexes, random_device_kernel, random_quadratic_kernel


# -- construction -----------------------------------------------------------------


def test_symmetrizes_and_freezes():
    F = GaussianForm([[0.1, 0.4], [0.0, 0.2]], [0, 0], 1.0, 0, 2)
    assert np.array_equal(F.A, F.A.T)
    assert F.A[0, 1] == 0.2
    with pytest.raises(ValueError):
        F.A[0, 0] = 3.0


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        GaussianForm([[np.nan]], [0], 1.0, 0, 1)


def test_delta_flag_inferred_and_checked():
    assert not vacuum(1).delta_normalized
    assert state([[-1.0]], [0.0], 1.0).delta_normalized
    with pytest.raises(DeltaNormalizationError):
        state([[1.2]], [0.0], 1.0, delta_normalized=False)
    with pytest.raises(DeltaNormalizationError):
        norm(state([[-1.0]], [0.0], 1.0))


def test_json_roundtrip():
    K = squeezer_kernel(0.4)
    K2 = GaussianForm.from_json(K.to_json())
    assert K2.allclose(K, atol=0)
    d = K.to_dict()
    assert set(d) == {"n_in", "n_out", "A", "b", "c", "delta_normalized"}
    assert d["c"] == [K.c.real, K.c.imag]


# -- identity kernel ----------------------------------------------------------------


def test_identity_kernel_one_mode():
    K = identity_kernel(1)
    assert np.array_equal(K.A, [[0, 1], [1, 0]])
    assert np.array_equal(K.b, [0, 0]) and K.c == 1
    assert K(ubar=0.3, v=0.7) == pytest.approx(math.exp(0.21))


def test_identity_kernel_two_modes():
    K = identity_kernel(2)
    assert K(ubar=[0.3, -0.2], v=[0.5, 1.1]) == pytest.approx(math.exp(0.15 - 0.22))


def test_identity_kernel_rejects_zero():
    with pytest.raises(DimensionMismatchError):
        identity_kernel(0)


def test_identity_leaves_states_and_kernels_unchanged(rng):
    psi = coherent_state(0.3)
    assert compose(identity_kernel(1), psi).allclose(psi, atol=1e-14)
    K = random_quadratic_kernel(rng, 2)
    assert compose(identity_kernel(2), K).allclose(K, atol=1e-12)
    assert compose(K, identity_kernel(2)).allclose(K, atol=1e-12)


# -- integration --------------------------------------------------------------------


def test_gaussian_measure_normalized():
    _, _, c = integrate_pairs(np.zeros((2, 2)), np.zeros(2), 1.0, [(0, 1)], [])
    assert c == pytest.approx(1.0)


def test_divergent_integral_raises():
    # exp(2 |w|^2) grows against exp(-|w|^2)
    A = np.array([[0, 2.0], [2.0, 0]])
    with pytest.raises(DivergentIntegralError):
        integrate_pairs(A, np.zeros(2), 1.0, [(0, 1)], [])


def test_two_generalized_vectors_do_not_pair():
    x = state([[-1.0]], [0.0], 1.0)
    with pytest.raises((DivergentIntegralError, SingularBlockError)):
        inner_product(x, x)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        compose(identity_kernel(1), identity_kernel(2))
    with pytest.raises(DimensionMismatchError):
        inner_product(vacuum(1), vacuum(2))
    with pytest.raises(DimensionMismatchError):
        apply(identity_kernel(1), identity_kernel(1))


# -- inner products -------------------------------------------------------------------


def test_coherent_overlap_frozen():
    # Fock series sum (conj(a) b)^n / n! to n = 60
    got = inner_product(coherent_state(0.3 + 0.4j), coherent_state(-0.5 + 0.2j))
    assert got == pytest.approx(0.6878477066513538 + 0.18298230739626908j, abs=1e-14)


@given(complexes(1.5), complexes(1.5))
@settings(max_examples=40, deadline=None)
def test_coherent_overlap_closed_form(a, b):
    got = inner_product(coherent_state(a), coherent_state(b))
    want = np.exp(-abs(a) ** 2 / 2 - abs(b) ** 2 / 2 + np.conj(a) * b)
    assert abs(got - want) < 1e-12


def test_vacuum_norm():
    assert inner_product(vacuum(1), vacuum(1)) == pytest.approx(1.0)


def test_monomials_orthonormal():
    # ubar^n / sqrt(n!) is the n-th derivative in beta of exp(beta ubar) at 0;
    # check through the Fock expansion of exp(beta ubar)
    coeffs = gaussian_coefficients([[0.0]], [0.37], 1.0, 12)
    want = [0.37 ** n / math.sqrt(math.factorial(n)) for n in range(13)]
    assert np.allclose(coeffs, want, atol=1e-15)
    assert inner_product(state([[0]], [0.37], 1.0), state([[0]], [0.37], 1.0)) == pytest.approx(
        sum(w * w for w in want), abs=1e-12)


def test_conjugate_linear_in_first_argument():
    F, G = coherent_state(0.2j), squeezed_vacuum(0.3)
    assert inner_product(F.scaled(2j), G) == pytest.approx(-2j * inner_product(F, G))
    assert inner_product(F, G.scaled(2j)) == pytest.approx(2j * inner_product(F, G))


def test_position_momentum_overlap_is_finite():
    x = state([[-1.0]], [math.sqrt(2) * 0.7], math.pi ** -0.25 * math.exp(-0.245))
    p = state([[1.0]], [1j * math.sqrt(2) * 0.4], math.pi ** -0.25 * math.exp(-0.08))
    assert inner_product(x, p) == pytest.approx(np.exp(0.28j) / math.sqrt(2 * math.pi), abs=1e-13)


# -- norms, adjoints, tensors ---------------------------------------------------------------


def test_norm_squeezed_vacuum():
    assert norm(squeezed_vacuum(0.7)) == pytest.approx(1.0, abs=1e-12)


def test_adjoint_involution(rng):
    K = random_quadratic_kernel(rng, 2)
    assert adjoint(adjoint(K)).allclose(K, atol=0)


def test_adjoint_matches_matrix_elements():
    K = displacement_kernel(0.4 - 0.3j)
    f, g = coherent_state(0.1 + 0.5j), coherent_state(-0.6)
    lhs = inner_product(f, apply(K, g))
    rhs = np.conj(inner_product(g, apply(adjoint(K), f)))
    assert lhs == pytest.approx(rhs, abs=1e-14)


def test_tensor_of_vacua():
    V = tensor(vacuum(1), vacuum(1))
    assert V.n_out == 2 and V.c == 1
    assert not V.A.any() and not V.b.any()


def test_tensor_kernel_ordering():
    K = tensor(displacement_kernel(0.3), squeezer_kernel(0.2))
    psi = tensor(coherent_state(0.1), coherent_state(0.4j))
    want = tensor(apply(displacement_kernel(0.3), coherent_state(0.1)),
                  apply(squeezer_kernel(0.2), coherent_state(0.4j)))
    assert apply(K, psi).allclose(want, atol=1e-13)


# -- partial contraction ------------------------------------------------------------------


def test_contract_vacuum_mode():
    psi = tensor(vacuum(1), coherent_state(0.3 + 0.1j))
    out = partial_contract(psi, [0], vacuum(1))
    assert out.allclose(coherent_state(0.3 + 0.1j), atol=1e-14)


def test_contract_state_with_itself():
    out = partial_contract(coherent_state(0.8j), [0], coherent_state(0.8j))
    assert out.n_out == 0 and out.c == pytest.approx(1.0)


def test_contract_order_of_remaining_modes():
    a, b, c = 0.1, 0.2j, -0.3
    psi = tensor(tensor(coherent_state(a), coherent_state(b)), coherent_state(c))
    out = partial_contract(psi, [1], coherent_state(b))
    assert out.allclose(tensor(coherent_state(a), coherent_state(c)), atol=1e-14)


def test_contract_rejects_bad_modes():
    psi = tensor(vacuum(1), vacuum(1))
    with pytest.raises(DimensionMismatchError):
        partial_contract(psi, [0, 0], vacuum(2))
    with pytest.raises(DimensionMismatchError):
        partial_contract(psi, [2], vacuum(1))


# -- first moments -----------------------------------------------------------------------


def test_first_moment_of_coherent_state():
    g = 0.4 - 0.9j
    psi = coherent_state(g)
    assert first_moment(psi, psi, 0) == pytest.approx(np.conj(g), abs=1e-13)
    assert expect_annihilation(psi) == pytest.approx(g, abs=1e-13)


def test_annihilation_on_squeezed_coherent_state():
    # <a> = alpha for D(alpha) S(g)|0> regardless of the squeezing
    psi = apply(displacement_kernel(0.3 + 0.2j), squeezed_vacuum(0.5))
    assert expect_annihilation(psi) == pytest.approx(0.3 + 0.2j, abs=1e-12)


# -- algebraic invariants ------------------------------------------------------------------


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_associativity(seed):
    r = np.random.default_rng(seed)
    K1, K2, K3 = (random_quadratic_kernel(r, 2) for _ in range(3))
    L = compose(compose(K1, K2), K3)
    R = compose(K1, compose(K2, K3))
    assert L.allclose(R, atol=1e-9, phase=False)


@given(st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_unitarity_and_norm_preservation(seed):
    r = np.random.default_rng(seed)
    K = random_device_kernel(r)
    assert compose(adjoint(K), K).allclose(identity_kernel(1), atol=1e-9, phase=False)
    f = coherent_state(complex(*r.uniform(-1, 1, 2)))
    assert norm(apply(K, f)) == pytest.approx(1.0, abs=1e-9)


@given(complexes(1.0))
@settings(max_examples=20, deadline=None)
def test_coherent_probes_match_series(beta):
    # <beta|F> from the symbolic integral and from the Fock series of both states
    F = apply(half_beam_splitter(), tensor(squeezed_vacuum(0.3), coherent_state(0.2 - 0.1j)))
    probe = tensor(coherent_state(beta), coherent_state(0.5j))
    N = 40
    lhs = inner_product(probe, F)
    f = gaussian_coefficients(F.A, F.b, F.c, N)
    p = np.multiply.outer(coherent_coefficients(beta, N), coherent_coefficients(0.5j, N))
    assert abs(lhs - np.vdot(p, f)) < 1e-6
