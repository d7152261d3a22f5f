"""Decide unitary preservation and recover the canonical factorization.

A linear map on M_n preserves the extreme points of the unit ball exactly
when it sends every unitary to a unitary, and every such map factors as
A -> U A V or A -> U A^tr V with U, V unitary.  The decision pipeline is
constructive: look at the image of I, strip it off, verify the Jordan
identities on matrix units, split centrally, recover the conjugating
unitary, and certify by rebuilding the map and measuring the residual.
A seeded sampling falsifier provides an independent probabilistic
cross-check of the same property.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .extremal import IsometryClass, classify_isometry
from .jordan import JordanReport, MapKind, jordan_check, recover_conjugating_unitary, stormer_split
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    adjoint,
    complex_gaussian,
    haar_from_rng,
    hermitian_part,
    matrix_unit,
    operator_norm,
    unitarity_defect,
    unitary_exp,
)
from .superop import SuperOperator, apply, compose, from_left_right, left_multiplier, transpose_map

__all__ = [
    "PreserverVerdict",
    "PreserverCertificate",
    "classify_preserver",
    "falsify_by_sampling",
    "perturb",
    "identity_residuals",
    "WITNESS_SAMPLE_BUDGET",
]

WITNESS_SAMPLE_BUDGET = 256
_WITNESS_T_STEPS = (1.0, -1.0, 0.5, -0.5)


class PreserverVerdict(Enum):
    PRESERVER = "Preserver"
    NOT_PRESERVER = "NotPreserver"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PreserverCertificate:
    """Verdict plus everything needed to audit it.

    For a Preserver the map reconstructs as u_left @ A @ v_right, with the
    transpose applied first when ``transpose_flag`` is set, and
    ``reconstruction_residual`` is the relative distance between the input
    and rebuilt superoperator matrices.  For a NotPreserver, ``witness`` is
    a concrete unitary whose image fails the unitary test by
    ``witness_defect``.  Fields that a given path never computed are None.
    """

    verdict: PreserverVerdict
    v: np.ndarray
    v_unitarity_residual: float
    jordan: JordanReport | None
    kind: MapKind
    u_left: np.ndarray | None
    v_right: np.ndarray | None
    transpose_flag: bool
    w: np.ndarray | None
    reconstruction_residual: float | None
    witness: np.ndarray | None
    witness_defect: float | None
    seed: int
    reason: str = ""


def _certificate(verdict, v, v_res, seed, **kw) -> PreserverCertificate:
    base = dict(
        jordan=None,
        kind=MapKind.NONE,
        u_left=None,
        v_right=None,
        transpose_flag=False,
        w=None,
        reconstruction_residual=None,
        witness=None,
        witness_defect=None,
        reason="",
    )
    base.update(kw)
    return PreserverCertificate(
        verdict=verdict, v=v, v_unitarity_residual=v_res, seed=seed, **base
    )


def _witness_candidates(n: int, seed: int, worst_pair=None):
    """Structured unitaries from the failing matrix-unit pair, then Haar samples."""
    if worst_pair is not None:
        i, j, k, l = worst_pair
        gens = []
        for a, b in dict.fromkeys([(i, j), (k, l)]):
            e = matrix_unit(n, a, b)
            for h in (e + e.conj().T, 1j * (e - e.conj().T)):
                if operator_norm(h) > 1e-12:
                    gens.append(h)
        for h, t in itertools.product(gens, _WITNESS_T_STEPS):
            yield unitary_exp(h, t)
    rng = np.random.default_rng(seed)
    for _ in range(WITNESS_SAMPLE_BUDGET):
        yield haar_from_rng(n, rng)


def _search_witness(phi: SuperOperator, tol: Tolerance, seed: int, worst_pair=None):
    """First unitary the map sends off the unitary group, or None."""
    for u in _witness_candidates(phi.dim_in, seed, worst_pair):
        image = apply(phi, u)
        if classify_isometry(image, tol) is not IsometryClass.UNITARY:
            return u, unitarity_defect(image)
    return None, None


def falsify_by_sampling(
    phi: SuperOperator,
    trials: int = 100,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray | None:
    """Hunt for a Haar unitary whose image fails the unitary test.

    Returns the first witness found within the trial budget, or None.  At
    finite dimension the extreme points of the unit ball are exactly the
    unitaries, so a witness disproves the preserver property outright.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        u = haar_from_rng(phi.dim_in, rng)
        if classify_isometry(apply(phi, u), tol) is not IsometryClass.UNITARY:
            return u
    return None


def perturb(phi: SuperOperator, epsilon: float, seed: int) -> SuperOperator:
    """Add a seeded complex Gaussian of operator norm ``epsilon`` to the map."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    if epsilon == 0:
        return phi
    rng = np.random.default_rng(seed)
    g = complex_gaussian(phi.matrix.shape[0], phi.matrix.shape[1], rng)
    return SuperOperator(
        phi.dim_in, phi.dim_out, phi.matrix + epsilon * g / operator_norm(g)
    )


def classify_preserver(
    phi: SuperOperator,
    tol: Tolerance = DEFAULT_TOL,
    seed: int = 0,
) -> PreserverCertificate:
    """Run the full decision and decomposition pipeline on a map M_n -> M_n.

    Steps: (1) v = image of I must be unitary; (2) psi = v* . phi must pass
    the Jordan identities; (3) the central splitting decides conjugation
    vs. transpose-conjugation; (4) the conjugating unitary is recovered and
    (5) the map is rebuilt and compared.  Any failure triggers a bounded
    witness search; a found witness yields NotPreserver, exhaustion yields
    Inconclusive.  Rectangular maps get diagnostics only (Jordan report and
    multiplicities) because the factorization theorem is about
    endomorphisms.
    """
    n, m = phi.dim_in, phi.dim_out
    v = apply(phi, np.eye(n, dtype=np.complex128))
    v_res = unitarity_defect(v)

    if n != m:
        jordan = None
        if v_res <= tol.effective(m, m):
            psi = left_multiplier(adjoint(v), phi)
            jordan = jordan_check(psi, tol)
            if jordan.is_jordan and jordan.r_unital <= tol.effective(m, m):
                jordan = stormer_split(psi, tol)
        return _certificate(
            PreserverVerdict.INCONCLUSIVE, v, v_res, seed,
            jordan=jordan, reason="theorem-scope",
        )

    if v_res > tol.effective(n, n):
        return _certificate(
            PreserverVerdict.NOT_PRESERVER, v, v_res, seed,
            witness=np.eye(n, dtype=np.complex128), witness_defect=v_res,
            reason="image-of-identity-not-unitary",
        )

    psi = left_multiplier(adjoint(v), phi)
    jordan = jordan_check(psi, tol)
    if not jordan.is_jordan:
        witness, defect = _search_witness(phi, tol, seed, jordan.worst_square_pair)
        if witness is not None:
            return _certificate(
                PreserverVerdict.NOT_PRESERVER, v, v_res, seed,
                jordan=jordan, witness=witness, witness_defect=defect,
                reason="jordan-identities-fail",
            )
        return _certificate(
            PreserverVerdict.INCONCLUSIVE, v, v_res, seed,
            jordan=jordan, reason="jordan-identities-fail-no-witness",
        )

    jordan = stormer_split(psi, tol)
    e = jordan.e
    eye = np.eye(n, dtype=np.complex128)
    if n == 1:
        kind = MapKind.COMMUTATIVE
    elif operator_norm(e - eye) <= 0.5:
        kind = MapKind.HOM
    elif operator_norm(e) <= 0.5:
        kind = MapKind.ANTI
    else:
        witness, defect = _search_witness(phi, tol, seed, jordan.worst_square_pair)
        if witness is not None:
            return _certificate(
                PreserverVerdict.NOT_PRESERVER, v, v_res, seed,
                jordan=jordan, witness=witness, witness_defect=defect,
                reason="proper-central-projection",
            )
        return _certificate(
            PreserverVerdict.INCONCLUSIVE, v, v_res, seed,
            jordan=jordan, reason="proper-central-projection",
        )

    try:
        w = recover_conjugating_unitary(psi, kind, tol)
    except ValueError:
        witness, defect = _search_witness(phi, tol, seed, jordan.worst_square_pair)
        if witness is not None:
            return _certificate(
                PreserverVerdict.NOT_PRESERVER, v, v_res, seed,
                jordan=jordan, witness=witness, witness_defect=defect,
                reason="unitary-recovery-failed",
            )
        return _certificate(
            PreserverVerdict.INCONCLUSIVE, v, v_res, seed,
            jordan=jordan, reason="unitary-recovery-failed",
        )

    transpose_flag = kind is MapKind.ANTI
    u_left = v @ w
    v_right = adjoint(w)
    rebuilt = from_left_right(u_left, v_right)
    if transpose_flag:
        rebuilt = compose(rebuilt, transpose_map(n))
    rec = operator_norm(phi.matrix - rebuilt.matrix) / operator_norm(phi.matrix)

    if rec <= tol.effective(m * m, n * n):
        return _certificate(
            PreserverVerdict.PRESERVER, v, v_res, seed,
            jordan=jordan, kind=kind, u_left=u_left, v_right=v_right,
            transpose_flag=transpose_flag, w=w, reconstruction_residual=rec,
        )

    witness, defect = _search_witness(phi, tol, seed, jordan.worst_square_pair)
    if witness is not None:
        return _certificate(
            PreserverVerdict.NOT_PRESERVER, v, v_res, seed,
            jordan=jordan, kind=kind, u_left=u_left, v_right=v_right,
            transpose_flag=transpose_flag, w=w, reconstruction_residual=rec,
            witness=witness, witness_defect=defect, reason="reconstruction-mismatch",
        )
    return _certificate(
        PreserverVerdict.INCONCLUSIVE, v, v_res, seed,
        jordan=jordan, kind=kind, u_left=u_left, v_right=v_right,
        transpose_flag=transpose_flag, w=w, reconstruction_residual=rec,
        reason="reconstruction-mismatch",
    )


def identity_residuals(
    phi: SuperOperator,
    samples: int = 50,
    seed: int = 0,
) -> dict[str, float]:
    """Max residuals of the structural identities every preserver satisfies.

    Over seeded random inputs of norm <= 1:

    - ``hermitian_square``: phi(S)* phi(S) - phi(I)* phi(S^2) on Hermitian S
    - ``polarized_product``: phi(A*)* phi(B) + phi(B*)* phi(A) - phi(I)* phi(AB + BA)
    - ``range_alignment``: W* V V* W + V* W W* V - 2I with W = phi(U), V = phi(I)
    - ``jordan_unitary``: psi(U)* psi(U) + psi(U) psi(U)* - 2I with psi = V* . phi

    All four vanish identically for a certified preserver; large values
    localize which structural property breaks.
    """
    if not phi.is_square:
        raise ValueError("identity audit needs an endomorphism")
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    n = phi.dim_in
    rng = np.random.default_rng(seed)
    eye = np.eye(n, dtype=np.complex128)
    v = apply(phi, eye)
    psi = left_multiplier(adjoint(v), phi)
    two_eye = 2 * np.eye(phi.dim_out, dtype=np.complex128)

    def contraction() -> np.ndarray:
        g = complex_gaussian(n, n, rng)
        return g / max(1.0, operator_norm(g))

    r_sq = r_pol = r_range = r_psi = 0.0
    for _ in range(samples):
        s = hermitian_part(complex_gaussian(n, n, rng))
        s = s / max(1.0, operator_norm(s))
        fs = apply(phi, s)
        r_sq = max(r_sq, operator_norm(adjoint(fs) @ fs - adjoint(v) @ apply(phi, s @ s)))

        a, b = contraction(), contraction()
        lhs = adjoint(apply(phi, adjoint(a))) @ apply(phi, b)
        lhs = lhs + adjoint(apply(phi, adjoint(b))) @ apply(phi, a)
        r_pol = max(
            r_pol, operator_norm(lhs - adjoint(v) @ apply(phi, a @ b + b @ a))
        )

        u = haar_from_rng(n, rng)
        wmat = apply(phi, u)
        r_range = max(
            r_range,
            operator_norm(
                adjoint(wmat) @ v @ adjoint(v) @ wmat
                + adjoint(v) @ wmat @ adjoint(wmat) @ v
                - two_eye
            ),
        )

        pu = apply(psi, u)
        r_psi = max(
            r_psi,
            operator_norm(adjoint(pu) @ pu + pu @ adjoint(pu) - two_eye),
        )

    return {
        "hermitian_square": r_sq,
        "polarized_product": r_pol,
        "range_alignment": r_range,
        "jordan_unitary": r_psi,
    }
