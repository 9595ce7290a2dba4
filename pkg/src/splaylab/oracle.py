"""Ground-truth numeric spectra and Jacobian cross-checks.

The closed-form results are always validated against two independent
references: a dense nonsymmetric eigensolver applied to the fully assembled
variational matrix, and a central finite-difference Jacobian of the model
vector field.  This module also provides the structural spectrum checks
(zero multiplicities, -epsilon multiplicities, analytic-versus-numeric
matching) used throughout the verification suite.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

MAX_DIMENSION = 2048


class EigenSolveError(RuntimeError):
    """The dense eigensolver failed to converge."""


def dense_eigenvalues(a: np.ndarray) -> np.ndarray:
    """All eigenvalues of a square real matrix.

    Uses LAPACK's balanced Hessenberg + shifted-QR solver (numpy's
    ``eigvals``).  Matrices are limited to dimension 2048; larger spectra
    are out of scope.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if a.shape[0] > MAX_DIMENSION:
        raise ValueError(f"matrix dimension {a.shape[0]} exceeds {MAX_DIMENSION}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare in LAPACK
        digest = hashlib.sha256(np.ascontiguousarray(a).tobytes()).hexdigest()[:16]
        raise EigenSolveError(f"QR iteration failed on matrix sha256:{digest}") from exc


def eigen_backward_errors(a: np.ndarray, count: int = 4) -> np.ndarray:
    """Spot-check ||A v - lambda v|| / ||A|| for a few eigenpairs."""
    a = np.asarray(a, dtype=float)
    w, v = np.linalg.eig(a)
    norm = max(float(np.linalg.norm(a)), 1e-300)
    idx = np.linspace(0, len(w) - 1, min(count, len(w))).astype(int)
    return np.array([np.linalg.norm(a @ v[:, i] - w[i] * v[:, i]) / norm for i in idx])


def fd_jacobian(rhs, x0: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of ``rhs`` at ``x0``.

    Column j is (rhs(x0 + h e_j) - rhs(x0 - h e_j)) / (2 h).
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    f0 = np.asarray(rhs(x0), dtype=float)
    jac = np.empty((f0.size, dim))
    for j in range(dim):
        step = np.zeros(dim)
        step[j] = h
        plus = np.asarray(rhs(x0 + step), dtype=float)
        minus = np.asarray(rhs(x0 - step), dtype=float)
        jac[:, j] = (plus - minus) / (2.0 * h)
    if not np.all(np.isfinite(jac)):
        raise ValueError("vector field returned non-finite values near x0")
    return jac


@dataclass(frozen=True)
class SpectrumReport:
    """Numeric spectrum with structure counts and analytic matching.

    ``matched`` holds one (analytic value, nearest distinct numeric value,
    distance) triple per analytic input; ``all_matched`` is true when every
    distance is below the matching tolerance.
    """

    eigenvalues: np.ndarray
    zero_count: int
    minus_eps_count: int | None
    matched: tuple[tuple[complex, complex, float], ...]
    all_matched: bool
    max_distance: float


def spectrum_compare(analytic, numeric, tol: float,
                     eps: float | None = None,
                     tol_zero: float | None = None,
                     eps_tol: float | None = None) -> SpectrumReport:
    """Match analytic eigenvalues to a numeric spectrum and count structure.

    Matching is greedy nearest-neighbour over distinct numeric values,
    falling back to an optimal assignment whenever two analytic values lie
    within 2*tol of each other (greedy could then steal the wrong partner).
    Zero counting uses |lambda| < tol_zero, defaulting to 1e-8 times the
    spectral-radius scale; -eps counting uses a 1e-7 relative tolerance.
    """
    analytic = np.asarray(list(analytic), dtype=complex)
    numeric = np.asarray(list(numeric), dtype=complex)
    if analytic.size > numeric.size:
        raise ValueError("cannot match more analytic values than numeric ones")

    scale = max(1.0, float(np.abs(numeric).max()) if numeric.size else 1.0)
    if tol_zero is None:
        tol_zero = 1e-8 * scale
    zero_count = int(np.sum(np.abs(numeric) < tol_zero))
    minus_eps_count = None
    if eps is not None:
        if eps_tol is None:
            eps_tol = 1e-7 * max(1.0, scale)
        minus_eps_count = int(np.sum(np.abs(numeric + eps) < eps_tol))

    pairs: list[tuple[complex, complex, float]] = []
    if analytic.size:
        crowded = False
        for i in range(analytic.size):
            for j in range(i + 1, analytic.size):
                if abs(analytic[i] - analytic[j]) < 2.0 * tol:
                    crowded = True
        dist = np.abs(analytic[:, None] - numeric[None, :])
        if crowded:
            rows, cols = linear_sum_assignment(dist)
            assignment = dict(zip(rows.tolist(), cols.tolist()))
        else:
            assignment = {}
            used: set[int] = set()
            for i in range(analytic.size):
                order = np.argsort(dist[i])
                j = next(int(c) for c in order if int(c) not in used)
                used.add(j)
                assignment[i] = j
        for i in range(analytic.size):
            j = assignment[i]
            pairs.append((complex(analytic[i]), complex(numeric[j]),
                          float(dist[i, j])))
    max_distance = max((p[2] for p in pairs), default=0.0)
    return SpectrumReport(eigenvalues=numeric,
                          zero_count=zero_count,
                          minus_eps_count=minus_eps_count,
                          matched=tuple(pairs),
                          all_matched=max_distance < tol,
                          max_distance=max_distance)


def nontrivial_max_real(eigenvalues, n_trivial: int) -> float:
    """Largest real part after discarding the n_trivial smallest-|.| values.

    At an m-splay state the discarded values are the neutral directions
    along the manifold; the remainder governs transverse stability.
    """
    w = np.asarray(eigenvalues, dtype=complex)
    if not 0 <= n_trivial < w.size:
        raise ValueError("trivial count out of range")
    order = np.argsort(np.abs(w))
    return float(w[order[n_trivial:]].real.max())


def singularity_residual(matrix: np.ndarray) -> float:
    """|det M| normalised by the Hadamard bound (product of row norms).

    The ratio lies in [0, 1] and drops to roundoff level when M is singular
    to machine precision; it is evaluated through an LU factorisation.
    """
    from scipy.linalg import lu

    m = np.asarray(matrix)
    row_norms = np.linalg.norm(m, axis=1)
    bound = float(np.prod(row_norms))
    if bound == 0.0:
        return 0.0
    _, _, u = lu(m)
    det = float(np.abs(np.prod(np.diag(u))))
    return det / bound
