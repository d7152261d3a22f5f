"""End-to-end pipeline tests.  Every certificate field that matters is
re-verified from the raw map: reconstructions are applied to fresh random
inputs and witnesses are re-run through the unitary test."""

import numpy as np
import pytest

from unitball.extremal import IsometryClass, classify_isometry
from unitball.gen import trace_pinch_map
from unitball.jordan import MapKind
from unitball.linalg import (
    DEFAULT_TOL,
    complex_gaussian,
    haar_unitary,
    operator_norm,
    unitarity_defect,
)
from unitball.preserver import (
    PreserverVerdict,
    classify_preserver,
    falsify_by_sampling,
    identity_residuals,
    perturb,
)
from unitball.superop import (
    BlockKind,
    SuperOperator,
    apply,
    compose,
    direct_sum_embedding,
    from_left_right,
    identity_map,
    transpose_map,
)


def reconstruction_agrees(cert, phi, rng, atol=1e-8):
    """Check u_left / v_right / transpose_flag against the map pointwise."""
    n = phi.dim_in
    for _ in range(10):
        a = complex_gaussian(n, n, rng)
        inner = a.T if cert.transpose_flag else a
        if operator_norm(cert.u_left @ inner @ cert.v_right - apply(phi, a)) > atol:
            return False
    return True


# ----------------------------------------------------------- happy paths


def test_identity_map_certificate():
    cert = classify_preserver(identity_map(3))
    assert cert.verdict is PreserverVerdict.PRESERVER
    assert cert.kind is MapKind.HOM
    assert not cert.transpose_flag
    assert cert.reconstruction_residual <= 1e-14
    assert cert.v_unitarity_residual <= 1e-14
    assert np.allclose(cert.v, np.eye(3), atol=1e-14)
    assert np.allclose(cert.u_left @ cert.v_right, np.eye(3), atol=1e-12)
    assert cert.jordan is not None and cert.jordan.is_jordan
    assert cert.witness is None


@pytest.mark.parametrize("n,seed", [(2, 0), (3, 1), (5, 2), (8, 3)])
def test_hom_round_trip(n, seed):
    u0 = haar_unitary(n, 2 * seed)
    v0 = haar_unitary(n, 2 * seed + 1)
    phi = from_left_right(u0, v0)
    cert = classify_preserver(phi, seed=seed)
    assert cert.verdict is PreserverVerdict.PRESERVER
    assert cert.kind is MapKind.HOM
    assert not cert.transpose_flag
    assert cert.reconstruction_residual <= 1e-8
    assert reconstruction_agrees(cert, phi, np.random.default_rng(seed))
    # the factorization is unique up to phase: u_left v_right == u0 v0
    assert operator_norm(cert.u_left @ cert.v_right - u0 @ v0) <= 1e-9


@pytest.mark.parametrize("n,seed", [(2, 4), (4, 5), (7, 6)])
def test_anti_round_trip(n, seed):
    u0 = haar_unitary(n, 100 + 2 * seed)
    v0 = haar_unitary(n, 101 + 2 * seed)
    phi = compose(from_left_right(u0, v0), transpose_map(n))
    cert = classify_preserver(phi, seed=seed)
    assert cert.verdict is PreserverVerdict.PRESERVER
    assert cert.kind is MapKind.ANTI
    assert cert.transpose_flag
    assert cert.reconstruction_residual <= 1e-8
    assert reconstruction_agrees(cert, phi, np.random.default_rng(seed))


def test_certified_factors_are_unitary():
    phi = from_left_right(haar_unitary(4, 50), haar_unitary(4, 51))
    cert = classify_preserver(phi)
    assert unitarity_defect(cert.u_left) <= 1e-10
    assert unitarity_defect(cert.v_right) <= 1e-10
    assert unitarity_defect(cert.w) <= 1e-10
    assert cert.kind is not MapKind.NONE


def test_scalar_dimension_is_commutative():
    phi = SuperOperator(1, 1, np.array([[np.exp(0.7j)]]))
    cert = classify_preserver(phi)
    assert cert.verdict is PreserverVerdict.PRESERVER
    assert cert.kind is MapKind.COMMUTATIVE
    assert cert.reconstruction_residual <= 1e-14


def test_seed_is_recorded():
    cert = classify_preserver(identity_map(2), seed=77)
    assert cert.seed == 77


# -------------------------------------------------------- negative paths


def test_trace_pinch_rejected_with_verified_witness():
    phi = trace_pinch_map(3)
    cert = classify_preserver(phi)
    assert cert.verdict is PreserverVerdict.NOT_PRESERVER
    assert cert.reason == "jordan-identities-fail"
    assert cert.jordan is not None and not cert.jordan.is_jordan
    # witness must be an honest unitary whose image fails the unitary test
    assert unitarity_defect(cert.witness) <= 1e-10
    image = apply(phi, cert.witness)
    assert classify_isometry(image) is not IsometryClass.UNITARY
    assert unitarity_defect(image) == pytest.approx(cert.witness_defect, abs=1e-12)
    assert cert.witness_defect > DEFAULT_TOL.effective(3, 3)


def test_nonunitary_image_of_identity_short_circuits():
    phi = from_left_right(np.diag([1.0, 0.5]).astype(complex), np.eye(2))
    cert = classify_preserver(phi)
    assert cert.verdict is PreserverVerdict.NOT_PRESERVER
    assert cert.reason == "image-of-identity-not-unitary"
    assert np.allclose(cert.witness, np.eye(2))
    # defect of diag(1, 1/2): ||diag(0, 3/4)|| = 3/4 exactly
    assert cert.v_unitarity_residual == pytest.approx(0.75, abs=1e-14)


def test_uniformly_scaled_preserver_is_rejected():
    phi = from_left_right(1.001 * haar_unitary(3, 9), haar_unitary(3, 10))
    cert = classify_preserver(phi)
    assert cert.verdict is PreserverVerdict.NOT_PRESERVER


@pytest.mark.parametrize("epsilon", [1e-3, 1e-2])
def test_perturbed_preservers_never_certify(epsilon):
    for seed in range(5):
        base = from_left_right(haar_unitary(3, 200 + seed), haar_unitary(3, 300 + seed))
        phi = perturb(base, epsilon, seed)
        cert = classify_preserver(phi, seed=seed)
        assert cert.verdict is not PreserverVerdict.PRESERVER
        if cert.verdict is PreserverVerdict.NOT_PRESERVER:
            assert unitarity_defect(apply(phi, cert.witness)) > DEFAULT_TOL.effective(3, 3)


# --------------------------------------------------- out-of-scope inputs


def test_rectangular_map_gets_diagnostics_only():
    w = haar_unitary(4, 60)
    phi = direct_sum_embedding([BlockKind.ID, BlockKind.TRANSPOSE], w)
    cert = classify_preserver(phi)
    assert cert.verdict is PreserverVerdict.INCONCLUSIVE
    assert cert.reason == "theorem-scope"
    assert cert.u_left is None and cert.v_right is None
    # diagnostics still run: the Jordan splitting sees one block of each kind
    assert cert.jordan is not None and cert.jordan.is_jordan
    assert (cert.jordan.p, cert.jordan.q) == (1, 1)


def test_rectangular_garbage_map_diagnostics():
    rng = np.random.default_rng(0)
    phi = SuperOperator(2, 3, complex_gaussian(9, 4, rng))
    cert = classify_preserver(phi)
    assert cert.verdict is PreserverVerdict.INCONCLUSIVE
    assert cert.reason == "theorem-scope"


# -------------------------------------------------------------- falsifier


def test_falsifier_passes_identity():
    assert falsify_by_sampling(identity_map(3), trials=100, seed=1) is None


def test_falsifier_catches_contraction_immediately():
    phi = from_left_right(np.diag([1.0, 0.5]).astype(complex), np.eye(2))
    witness = falsify_by_sampling(phi, trials=1, seed=2)
    assert witness is not None
    assert unitarity_defect(apply(phi, witness)) > 0.1


def test_falsifier_is_deterministic_in_seed():
    phi = trace_pinch_map(2)
    w1 = falsify_by_sampling(phi, trials=5, seed=9)
    w2 = falsify_by_sampling(phi, trials=5, seed=9)
    assert np.array_equal(w1, w2)


def test_falsifier_needs_trials():
    with pytest.raises(ValueError):
        falsify_by_sampling(identity_map(2), trials=0, seed=0)


def test_cross_oracle_agreement_sample():
    """classify_preserver and the sampling falsifier must tell the same
    story on a mixed bag of clean and broken maps."""
    for k in range(30):
        n = 2 + k % 3
        base = from_left_right(haar_unitary(n, 700 + k), haar_unitary(n, 800 + k))
        if k % 2:
            phi = perturb(base, 1e-2, seed=k)
        else:
            phi = base
        cert = classify_preserver(phi, seed=k)
        witness = falsify_by_sampling(phi, trials=100, seed=1000 + k)
        if cert.verdict is PreserverVerdict.PRESERVER:
            assert witness is None
        elif cert.verdict is PreserverVerdict.NOT_PRESERVER:
            assert witness is not None


# ---------------------------------------------------------------- perturb


def test_perturb_zero_is_identity_operation():
    phi = identity_map(2)
    assert perturb(phi, 0.0, 5) is phi


def test_perturb_has_exact_operator_norm():
    phi = identity_map(3)
    for eps in (1e-3, 1e-2, 0.5):
        out = perturb(phi, eps, seed=4)
        assert operator_norm(out.matrix - phi.matrix) == pytest.approx(eps, abs=1e-12)


def test_perturb_rejects_negative():
    with pytest.raises(ValueError):
        perturb(identity_map(2), -1e-3, 0)


# ------------------------------------------------------ identity audits


def test_identity_residuals_vanish_for_preservers():
    hom = from_left_right(haar_unitary(3, 11), haar_unitary(3, 12))
    anti = compose(hom, transpose_map(3))
    for phi in (hom, anti):
        res = identity_residuals(phi, samples=50, seed=3)
        assert set(res) == {
            "hermitian_square",
            "polarized_product",
            "range_alignment",
            "jordan_unitary",
        }
        assert max(res.values()) <= 1e-12


def test_identity_residuals_expose_trace_pinch():
    res = identity_residuals(trace_pinch_map(2), samples=50, seed=0)
    assert res["hermitian_square"] > 0.1
    assert res["jordan_unitary"] > 0.1


def test_identity_residuals_reject_rectangular():
    rng = np.random.default_rng(1)
    with pytest.raises(ValueError):
        identity_residuals(SuperOperator(2, 3, complex_gaussian(9, 4, rng)))
    with pytest.raises(ValueError):
        identity_residuals(identity_map(2), samples=0)
