"""Dense complex linear algebra primitives shared by every other module.

All matrices are dense two dimensional ``numpy`` arrays of ``complex128``.
Rank decisions (null spaces, PSD clamping, projection rounding) are always
made by thresholding singular values or eigenvalues, never via determinants.
Every function is pure: inputs are never mutated and results depend only on
the arguments, so values are safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "matrix_unit",
    "multiply",
    "adjoint",
    "operator_norm",
    "max_operator_norm",
    "svd",
    "polar_unitary",
    "psd_sqrt",
    "haar_unitary",
    "haar_from_rng",
    "null_space_projection",
    "unitarity_defect",
    "nearest_projection",
    "unitary_exp",
    "hermitian_part",
    "complex_gaussian",
]

RNG_NAME = "numpy-pcg64"


@dataclass(frozen=True)
class Tolerance:
    """Absolute tolerance with optional dimension scaling.

    The effective tolerance applied to an ``rows x cols`` residual is
    ``abs * sqrt(rows * cols)`` when ``dimension_scaling`` is on, plain
    ``abs`` otherwise.  One policy, used by every residual certificate.
    """

    abs: float = 1e-8
    dimension_scaling: bool = True

    def __post_init__(self) -> None:
        if not (self.abs >= 0.0):
            raise ValueError(f"tolerance must be nonnegative, got {self.abs}")

    def effective(self, rows: int, cols: int | None = None) -> float:
        if cols is None:
            cols = rows
        if self.dimension_scaling:
            return self.abs * math.sqrt(rows * cols)
        return self.abs


DEFAULT_TOL = Tolerance()


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex128 array, rejecting NaN/Inf entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    """The n x n matrix with a single 1 at row ``i``, column ``j``."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an explicit conformability check."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def operator_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_matrix(a), ord=2))


def max_operator_norm(stack: np.ndarray) -> float:
    """Max of the largest singular values over a (k, m, n) stack of matrices."""
    if stack.size == 0:
        return 0.0
    s = np.linalg.svd(stack, compute_uv=False)
    return float(s[..., 0].max())


def svd(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``a = u @ diag(s) @ vh`` with descending nonnegative ``s``.

    Raises ``numpy.linalg.LinAlgError`` if the iteration fails to converge,
    which signals numerically pathological input.
    """
    return np.linalg.svd(as_matrix(a), full_matrices=False)


def polar_unitary(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``a = w @ p`` of a square matrix.

    ``w = u @ vh`` from the SVD is unitary even when ``a`` is rank deficient
    (the SVD convention fixes the gauge on the kernel), and ``p`` is the
    Hermitian PSD factor.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"polar decomposition needs a square matrix, got {a.shape}")
    u, s, vh = np.linalg.svd(a)
    w = u @ vh
    p = vh.conj().T @ (s[:, None] * vh)
    return w, hermitian_part(p)


def psd_sqrt(p: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root ``r`` with ``r @ r == p`` within tolerance.

    ``p`` must be Hermitian within tolerance with eigenvalues >= -tol;
    eigenvalues in ``[-tol, 0)`` are clamped to zero.
    """
    p = as_matrix(p)
    n = p.shape[0]
    if p.shape[0] != p.shape[1]:
        raise ValueError(f"psd_sqrt needs a square matrix, got {p.shape}")
    teff = tol.effective(n, n)
    if operator_norm(p - p.conj().T) > teff:
        raise ValueError("psd_sqrt: input is not Hermitian within tolerance")
    h = hermitian_part(p)
    w, v = np.linalg.eigh(h)
    if w[0] < -teff:
        raise ValueError(
            f"psd_sqrt: input is not PSD within tolerance (min eigenvalue {w[0]:.3e})"
        )
    w = np.clip(w, 0.0, None)
    r = (v * np.sqrt(w)) @ v.conj().T
    return hermitian_part(r)


def haar_from_rng(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary drawn from an existing generator.

    QR of a complex Ginibre matrix, with the phase ambiguity fixed by
    normalizing the diagonal of R to positive reals; without that correction
    the distribution is not Haar.
    """
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return q * ph


def haar_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary, deterministic in ``seed``."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return haar_from_rng(n, np.random.default_rng(seed))


def null_space_projection(
    ms: Sequence[np.ndarray],
    tol: Tolerance = DEFAULT_TOL,
    dim: int | None = None,
) -> np.ndarray:
    """Orthogonal projection onto the common kernel of the given matrices.

    All matrices must share a column count ``m``; the projection is computed
    from the SVD of the vertical stack, counting singular values below the
    effective tolerance as zero.  An empty family means "no constraints" and
    yields the identity, but then ``dim`` must be supplied.
    """
    ms = [as_matrix(m) for m in ms]
    if not ms:
        if dim is None:
            raise ValueError("empty family: pass dim to get the identity projection")
        return np.eye(dim, dtype=np.complex128)
    cols = {m.shape[1] for m in ms}
    if len(cols) != 1:
        raise ValueError(f"matrices must share a column count, got {sorted(cols)}")
    stacked = np.vstack(ms)
    # Thin SVD already carries the complete row space of V when the stack is
    # tall; the full decomposition is only needed (and only cheap) when it is
    # wide, where thin V would miss the kernel directions.
    wide = stacked.shape[0] < stacked.shape[1]
    _, s, vh = np.linalg.svd(stacked, full_matrices=wide)
    cutoff = tol.effective(*stacked.shape)
    rank = int(np.count_nonzero(s > cutoff))
    null_basis = vh[rank:].conj().T
    return null_basis @ null_basis.conj().T


def unitarity_defect(a: np.ndarray) -> float:
    """max(||a* a - I||, ||a a* - I||) for a square matrix; 0 iff unitary."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"unitarity defect needs a square matrix, got {a.shape}")
    eye = np.eye(a.shape[0])
    return max(
        operator_norm(a.conj().T @ a - eye),
        operator_norm(a @ a.conj().T - eye),
    )


def nearest_projection(h: np.ndarray) -> np.ndarray:
    """Nearest orthogonal projection to a (nearly) Hermitian matrix.

    Eigenvalues are rounded to {0, 1} at the midpoint 1/2.
    """
    w, v = np.linalg.eigh(hermitian_part(as_matrix(h)))
    rounded = (w >= 0.5).astype(np.float64)
    return (v * rounded) @ v.conj().T


def unitary_exp(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(i t h)`` for Hermitian ``h``, exactly unitary by construction."""
    w, v = np.linalg.eigh(hermitian_part(as_matrix(h)))
    return (v * np.exp(1j * t * w)) @ v.conj().T


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def complex_gaussian(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian matrix (independent entries, unit variance)."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2)
