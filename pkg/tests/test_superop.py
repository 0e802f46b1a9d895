import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zenolab.ensembles import random_channel, random_superop
from zenolab.superop import (
    DensityMatrix,
    DimensionError,
    KrausSet,
    NormEstimate,
    apply,
    as_superop,
    choi_matrix,
    classify_map,
    devectorize,
    expm_superop,
    identity_superop,
    kraus_to_superop,
    norm_1to1_estimate,
    positive_map_norm,
    proxy_norm,
    trace_norm,
    vectorize,
)

from conftest import PINCHING, SX, SZ, dephasing, superop_by_action


def test_vectorize_identity_and_single_entry():
    np.testing.assert_array_equal(vectorize(np.eye(2)), [1, 0, 0, 1])
    E01 = np.array([[0, 1], [0, 0]])
    np.testing.assert_array_equal(vectorize(E01), [0, 0, 1, 0])


def test_devectorize_inverts_bit_exact(rng):
    X = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.array_equal(devectorize(vectorize(X)), X)
    assert np.array_equal(devectorize(vectorize(X), 3), X)


def test_devectorize_rejects_non_square_length():
    with pytest.raises(ValueError):
        devectorize(np.ones(5))


def test_kraus_identity_gives_identity():
    np.testing.assert_array_equal(kraus_to_superop(KrausSet((np.eye(2),))), np.eye(4))


def test_kraus_pinching_and_bit_flip():
    pinch = KrausSet((np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    np.testing.assert_array_equal(kraus_to_superop(pinch), PINCHING)
    flip = kraus_to_superop(KrausSet((SX,)))
    np.testing.assert_array_equal(flip, np.eye(4)[::-1])


def test_kraus_matches_basis_action(rng):
    ks = random_channel(3, 4, rng)
    oracle = superop_by_action(lambda X: sum(K @ X @ K.conj().T for K in ks.kraus_ops), 3)
    np.testing.assert_allclose(kraus_to_superop(ks), oracle, atol=1e-14)


def test_kraus_validation():
    with pytest.raises(ValueError):
        KrausSet((np.eye(2), np.eye(2)))
    with pytest.raises(DimensionError):
        KrausSet((np.eye(2), np.zeros((3, 3))), kind="operation")
    with pytest.raises(ValueError):
        KrausSet(())
    KrausSet((np.diag([1.0, 0.0]),), kind="operation")


def test_density_matrix_validation():
    DensityMatrix(np.diag([0.25, 0.75]))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        DensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]]))


def test_choi_of_identity_is_rank_one():
    J = choi_matrix(np.eye(4))
    np.testing.assert_allclose(np.trace(J), 2)
    assert np.linalg.matrix_rank(J) == 1
    omega = np.array([1, 0, 0, 1])
    np.testing.assert_allclose(J, np.outer(omega, omega))


def test_choi_of_pinching_and_depolarizing():
    np.testing.assert_allclose(choi_matrix(PINCHING), np.diag([1, 0, 0, 1]))
    depol = superop_by_action(lambda X: np.trace(X) * np.eye(2) / 2, 2)
    np.testing.assert_allclose(choi_matrix(depol), np.eye(4) / 2)


def test_choi_matches_direct_definition(rng):
    T = random_superop(2, rng)
    d = 2
    oracle = np.zeros((4, 4), dtype=complex)
    for i in range(d):
        for j in range(d):
            Eij = np.zeros((d, d))
            Eij[i, j] = 1
            oracle += np.kron(apply(T, Eij), Eij)
    np.testing.assert_allclose(choi_matrix(T), oracle, atol=1e-14)


def test_classify_identity_channels_and_scaling(rng):
    r = classify_map(np.eye(9))
    assert r.cp and r.trace_preserving and r.trace_nonincreasing and r.hermiticity_preserving
    assert r.is_channel
    for d in (2, 3):
        assert classify_map(kraus_to_superop(random_channel(d, 3, rng))).is_channel
    r2 = classify_map(2 * np.eye(4))
    assert r2.cp and not r2.trace_preserving and not r2.trace_nonincreasing


def test_classify_transpose_is_positive_but_not_cp():
    transpose = superop_by_action(lambda X: X.T, 2)
    r = classify_map(transpose)
    assert not r.cp and r.trace_preserving and r.hermiticity_preserving


def test_classify_rejects_bad_tol():
    with pytest.raises(ValueError):
        classify_map(np.eye(4), tol=0)


def test_apply_examples():
    X = np.array([[1, 2], [3, 4]], dtype=complex)
    np.testing.assert_array_equal(apply(PINCHING, X), np.diag([1, 4]))
    np.testing.assert_array_equal(apply(np.eye(4), X), X)
    p = 0.3
    flip = kraus_to_superop(KrausSet((SX,)))
    np.testing.assert_allclose(apply(flip, np.diag([p, 1 - p])), np.diag([1 - p, p]))


def test_apply_dimension_mismatch():
    with pytest.raises(DimensionError):
        apply(np.eye(4), np.eye(3))


def test_as_superop_rejects_non_square_dims():
    with pytest.raises(DimensionError):
        as_superop(np.eye(3))
    with pytest.raises(DimensionError):
        as_superop(np.ones((4, 2)))


def test_expm_zero_and_dephasing():
    np.testing.assert_array_equal(expm_superop(np.zeros((4, 4))), np.eye(4))
    g, t = 0.7, 1.3
    L = dephasing(g)
    np.testing.assert_allclose(L, np.diag([0, -2 * g, -2 * g, 0]), atol=1e-15)
    # eigendecomposition oracle
    w, V = np.linalg.eig(L)
    oracle = V @ np.diag(np.exp(t * w)) @ np.linalg.inv(V)
    np.testing.assert_allclose(expm_superop(L, t), oracle, atol=1e-13)
    np.testing.assert_allclose(expm_superop(L, t), np.diag([1, np.exp(-2 * g * t), np.exp(-2 * g * t), 1]))


def test_expm_semigroup(rng):
    A = random_superop(2, rng)
    A /= proxy_norm(A)
    np.testing.assert_allclose(expm_superop(A, 0.4) @ expm_superop(A, 0.9),
                               expm_superop(A, 1.3), atol=1e-10)


def test_expm_stack_and_limits(rng):
    A = random_superop(2, rng)
    stack = expm_superop(np.stack([A, 2 * A]), 0.5)
    np.testing.assert_allclose(stack[1], expm_superop(A, 1.0), atol=1e-12)
    with pytest.raises(OverflowError):
        expm_superop(1e5 * np.eye(4))
    with pytest.raises(ValueError):
        expm_superop(np.full((4, 4), np.nan))


def test_norm_identity_and_zero():
    est = norm_1to1_estimate(np.eye(4))
    assert est.lower == pytest.approx(1.0, abs=1e-12)
    assert est.upper == pytest.approx(np.sqrt(2))
    z = norm_1to1_estimate(np.zeros((9, 9)))
    assert z.lower == 0.0 and z.upper == 0.0


def test_norm_trace_preserving_positive_maps_reach_one(rng):
    for d in (2, 3):
        for _ in range(5):
            T = kraus_to_superop(random_channel(d, int(rng.integers(1, d * d + 1)), rng))
            est = norm_1to1_estimate(T, seed=3)
            assert 1 - 1e-9 <= est.lower <= est.upper
            assert positive_map_norm(T) == pytest.approx(1.0, abs=1e-12)


def test_norm_lower_bound_is_attained(rng):
    # the witness reproduces the reported value, so the lower bound is honest
    T = random_superop(2, rng)
    est = norm_1to1_estimate(T, restarts=3, seed=1)
    x, y = est.witness
    val = trace_norm(apply(T, np.outer(x, y.conj())))
    assert val == pytest.approx(est.lower, rel=1e-10)


def test_norm_of_transpose_is_one():
    # the transpose is an isometry for the trace norm, so both ends straddle 1
    T = superop_by_action(lambda X: X.T, 3)
    est = norm_1to1_estimate(T, seed=0)
    assert est.lower == pytest.approx(1.0, abs=1e-9)
    assert est.upper >= 1.0


def test_norm_bracket_must_be_ordered():
    with pytest.raises(ValueError):
        NormEstimate(lower=2.0, upper=1.0)
    with pytest.raises(ValueError):
        norm_1to1_estimate(np.eye(4), restarts=0)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.sampled_from([2, 3]))
def test_norm_bracket_property(seed, d):
    rng = np.random.default_rng(seed)
    T = random_superop(d, rng)
    est = norm_1to1_estimate(T, restarts=2, iters=10, seed=seed)
    assert 0 <= est.lower <= est.upper + 1e-12
    # a proxy for the exact norm: any single rank-one input is a valid lower bound
    x = np.zeros(d)
    x[0] = 1
    assert trace_norm(apply(T, np.outer(x, x))) <= est.upper * (1 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.sampled_from([2, 3]), rank=st.integers(1, 4))
def test_channels_are_cptp_property(seed, d, rank):
    T = kraus_to_superop(random_channel(d, rank, np.random.default_rng(seed)))
    J = choi_matrix(T)
    assert np.linalg.eigvalsh(J).min() >= -1e-10
    rho = np.diag(np.arange(1, d + 1) / np.arange(1, d + 1).sum())
    assert abs(np.trace(apply(T, rho)) - 1) <= 1e-10


def test_identity_superop_shape():
    assert identity_superop(3).shape == (9, 9)
    assert np.allclose(apply(dephasing(0.0), SZ), 0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), d=st.integers(1, 4))
def test_sandwich_identity(seed, d):
    from zenolab.superop import sandwich_superop

    rng = np.random.default_rng(seed)
    A, X, B = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(3))
    np.testing.assert_allclose(devectorize(np.kron(B.T, A) @ vectorize(X)), A @ X @ B, atol=1e-12)
    np.testing.assert_allclose(apply(sandwich_superop(A, B), X), A @ X @ B, atol=1e-12)


def test_transpose_choi_has_negative_eigenvalue():
    transpose = superop_by_action(lambda X: X.T, 2)
    assert np.linalg.eigvalsh(choi_matrix(transpose)).min() == pytest.approx(-1.0)


def test_norm_bracket_on_many_random_superops():
    rng = np.random.default_rng(99)
    for k in range(1000):
        est = norm_1to1_estimate(random_superop(2 + k % 2, rng), restarts=1, iters=10, seed=k)
        assert est.lower <= est.upper


def test_one_dimensional_inputs():
    one = np.array([[1.0 + 0j]])
    assert np.array_equal(kraus_to_superop(KrausSet((one,))), one)
    assert classify_map(one).is_channel
    assert norm_1to1_estimate(0.5 * one).lower == pytest.approx(0.5)
    np.testing.assert_allclose(expm_superop(-one, 2.0), np.exp(-2.0) * one)
    assert np.array_equal(apply(one, np.array([[1.0]])), np.array([[1.0]]))
    from zenolab.lindblad import build_generator
    from zenolab.spectral import spectrum_report

    assert np.array_equal(build_generator(np.zeros((1, 1))), np.zeros((1, 1)))
    assert spectrum_report(one).gap_ok
