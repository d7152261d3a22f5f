"""Jordan *-homomorphism verification, central splitting, and unitary recovery.

A linear map J between *-algebras is a Jordan *-homomorphism when
J(x)^2 = J(x^2) and J(x*) = J(x)*; by linearization the first identity is
equivalent to J(x)J(y) + J(y)J(x) = J(xy + yx).  Checking the identities on
all pairs of matrix units suffices by bilinearity, which keeps every
residual here a finite, exact scan.

For a unital Jordan *-homomorphism there is a central projection E
splitting it into a *-homomorphism (on E) and a *-antihomomorphism (on
I - E).  The projection is computed constructively as the maximal
projection annihilating the multiplicative defects on the right, then
certified a posteriori by the r_hom / r_anti / r_central residuals.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import DEFAULT_TOL, Tolerance, null_space_projection
from .superop import SuperOperator, compose, transpose_map

__all__ = [
    "MapKind",
    "JordanReport",
    "jordan_check",
    "stormer_split",
    "recover_conjugating_unitary",
]


class MapKind(Enum):
    HOM = "Hom"
    ANTI = "Anti"
    COMMUTATIVE = "Commutative"
    NONE = "None"


@dataclass(frozen=True)
class JordanReport:
    """Jordan identity residuals plus, when computed, the central splitting.

    ``r_square`` is the worst defect of the linearized square identity over
    matrix-unit pairs, ``r_star`` the worst adjoint defect, ``r_unital``
    the distance of the image of I from I.  The splitting fields stay at
    their sentinels (``e=None``, ``p=q=-1``, residuals ``None``) for an
    identity-only report.
    """

    r_square: float
    r_star: float
    r_unital: float
    is_jordan: bool
    e: np.ndarray | None = None
    p: int = -1
    q: int = -1
    r_hom: float | None = None
    r_anti: float | None = None
    r_central: float | None = None
    worst_square_pair: tuple[int, int, int, int] | None = None


def _top_svals(stack: np.ndarray) -> np.ndarray:
    """Largest singular value of every matrix in a (k, m, m) stack."""
    return np.linalg.svd(stack, compute_uv=False)[:, 0]


def _jordan_core(psi: SuperOperator, tol: Tolerance):
    """Images, pairwise products, and identity residuals in one pass."""
    n, m = psi.dim_in, psi.dim_out
    images = psi.images_of_matrix_units()

    # prod[i,j,k,l] = psi(E_ij) @ psi(E_kl)
    prod = np.einsum("ijab,klbc->ijklac", images, images)
    sym = prod + prod.transpose(2, 3, 0, 1, 4, 5)

    # target[i,j,k,l] = psi(E_ij E_kl + E_kl E_ij), using E_ij E_kl = d_jk E_il
    target = np.zeros_like(sym)
    for j in range(n):
        target[:, j, j, :] += images
    swapped = images.transpose(1, 0, 2, 3)
    for i in range(n):
        target[i, :, :, i] += swapped

    square_defects = _top_svals((target - sym).reshape(-1, m, m))
    worst_flat = int(np.argmax(square_defects))
    worst = tuple(int(x) for x in np.unravel_index(worst_flat, (n, n, n, n)))
    r_square = float(square_defects[worst_flat])

    star_diff = images.transpose(1, 0, 2, 3) - images.conj().transpose(0, 1, 3, 2)
    r_star = float(_top_svals(star_diff.reshape(-1, m, m)).max())

    psi_of_eye = np.einsum("iiab->ab", images)
    r_unital = float(np.linalg.norm(psi_of_eye - np.eye(m), ord=2))

    is_jordan = max(r_square, r_star) <= tol.effective(m, m)
    return images, prod, r_square, r_star, r_unital, is_jordan, worst


def jordan_check(psi: SuperOperator, tol: Tolerance = DEFAULT_TOL) -> JordanReport:
    """Evaluate the Jordan identities on all matrix-unit pairs.

    Fills only the identity fields of the report; ``is_jordan`` is
    ``max(r_square, r_star) <= tol`` (a Jordan map need not be unital, so
    ``r_unital`` is reported but not gated).
    """
    _, _, r_square, r_star, r_unital, is_jordan, worst = _jordan_core(psi, tol)
    return JordanReport(
        r_square=r_square,
        r_star=r_star,
        r_unital=r_unital,
        is_jordan=is_jordan,
        worst_square_pair=worst,
    )


def stormer_split(psi: SuperOperator, tol: Tolerance = DEFAULT_TOL) -> JordanReport:
    """Split a unital Jordan *-homomorphism by its central projection.

    The projection E is the maximal one annihilated on the right by every
    multiplicative defect psi(E_ij E_kl) - psi(E_ij) psi(E_kl); the report
    certifies it with r_hom (homomorphic on E), r_anti (antihomomorphic on
    I - E) and r_central (E commutes with the image).  Multiplicities
    (p, q) with p + q blocks of size dim_in are read off rank(E) when it is
    integral within 0.1, else both are -1.
    """
    n, m = psi.dim_in, psi.dim_out
    images, prod, r_square, r_star, r_unital, is_jordan, worst = _jordan_core(psi, tol)
    teff = tol.effective(m, m)
    if not is_jordan:
        raise ValueError(
            f"not a Jordan *-homomorphism within tolerance "
            f"(r_square={r_square:.3e}, r_star={r_star:.3e})"
        )
    if r_unital > teff:
        raise ValueError(f"map is not unital within tolerance (r_unital={r_unital:.3e})")

    hom_defect = -prod.copy()
    for j in range(n):
        hom_defect[:, j, j, :] += images
    e_proj = null_space_projection([hom_defect.reshape(-1, m)], tol)

    eye = np.eye(m, dtype=np.complex128)
    hd = hom_defect.reshape(-1, m, m)
    r_hom = float(_top_svals(hd @ e_proj).max())

    anti_defect = -prod.transpose(2, 3, 0, 1, 4, 5).copy()
    for j in range(n):
        anti_defect[:, j, j, :] += images
    ad = anti_defect.reshape(-1, m, m)
    r_anti = float(_top_svals(ad @ (eye - e_proj)).max())

    flat_images = images.reshape(-1, m, m)
    r_central = float(_top_svals(e_proj @ flat_images - flat_images @ e_proj).max())

    rank_f = float(np.trace(e_proj).real)
    p = round(rank_f / n)
    q = round((m - rank_f) / n)
    integral = (
        abs(rank_f - p * n) <= 0.1
        and abs((m - rank_f) - q * n) <= 0.1
        and p * n + q * n == m
        and p >= 0
        and q >= 0
    )
    if not integral:
        p, q = -1, -1

    return JordanReport(
        r_square=r_square,
        r_star=r_star,
        r_unital=r_unital,
        is_jordan=is_jordan,
        e=e_proj,
        p=p,
        q=q,
        r_hom=r_hom,
        r_anti=r_anti,
        r_central=r_central,
        worst_square_pair=worst,
    )


def recover_conjugating_unitary(
    psi: SuperOperator,
    kind: MapKind,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Recover w with psi(A) = w A w* (Hom) or psi(A) = w A^tr w* (Anti).

    Standard matrix-unit reconstruction: the image of E_11 is a rank-one
    projection onto span(w e_1); pick its top singular vector v, then
    column i of w is the image of E_i1 applied to v.  The phase gauge is
    fixed by making the first nonzero entry of the first column real
    positive.  For the Anti kind the map is pre-composed with the transpose
    so the same construction applies.
    """
    n = psi.dim_in
    if psi.dim_out != n:
        raise ValueError(
            f"unitary recovery needs an endomorphism, got M_{psi.dim_in} -> M_{psi.dim_out}"
        )
    if kind is MapKind.ANTI:
        psi = compose(psi, transpose_map(n))
    elif kind not in (MapKind.HOM, MapKind.COMMUTATIVE):
        raise ValueError(f"cannot recover a conjugating unitary for kind {kind}")

    images = psi.images_of_matrix_units()
    f11 = images[0, 0]
    u, s, _ = np.linalg.svd(f11)
    if s[0] <= tol.effective(n, n):
        raise ValueError(
            "image of E_11 is numerically rank deficient; input is not an automorphism"
        )
    v0 = u[:, 0]
    w = np.column_stack([images[i, 0] @ v0 for i in range(n)])

    col = w[:, 0]
    mags = np.abs(col)
    peak = float(mags.max())
    if peak == 0.0:
        raise ValueError("first recovered column vanished; input is not an automorphism")
    lead = int(np.argmax(mags > 1e-8 * peak))
    return w * (mags[lead] / col[lead])
