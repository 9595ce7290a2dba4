"""Construction and sampling of points on the m-splay manifold.

The manifold is the set of N-phase configurations whose m-th order-parameter
moment vanishes.  This module builds the classical twisted (equidistant)
states, the antipodal-pair parametric family, seeded random samples obtained
by closed-form completion of two phases, and orthonormal tangent bases.

Random sampling uses numpy's PCG64 generator, which has a documented,
platform-stable stream, so identical seeds give byte-identical downstream
CSV output on every machine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import (
    TOL_SPLAY,
    TWO_PI,
    ModelParams,
    PhaseConfiguration,
    SplayConditionError,
    collective_frequency,
    order_parameter,
)

#: Tolerance the random sampler must (and does) achieve on |Z_m|.
SAMPLER_TOL = 1e-12

#: Singular values below this fraction of the largest one count as zero when
#: deciding the rank of the tangent-space constraint matrix.
RANK_TOL = 1e-10


class RetryBudgetError(RuntimeError):
    """The random sampler exhausted its resampling budget."""


@dataclass(frozen=True)
class SplayState:
    """A point on the m-splay manifold with its second moment cached.

    ``omega_collective`` is filled once the state is bound to a model.
    """

    theta: PhaseConfiguration
    m: int
    r2: float
    omega_collective: float | None = None

    @property
    def n(self) -> int:
        return self.theta.n


@dataclass(frozen=True)
class TangentBasis:
    """Orthonormal basis of perturbations that stay on the splay manifold.

    ``vectors`` has one row per basis vector.  ``degenerate`` flags base
    points where the two real constraint rows are linearly dependent and the
    null space is therefore larger than N - 2.
    """

    vectors: np.ndarray
    m: int
    theta: PhaseConfiguration
    degenerate: bool = False

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]


def is_m_splay(theta, m: int, tol: float = TOL_SPLAY) -> bool:
    """True iff R_m(theta) < tol."""
    return order_parameter(theta, m).r < tol


def _make_splay(phases: np.ndarray, m: int, tol: float) -> SplayState:
    theta = PhaseConfiguration(phases)
    r = order_parameter(theta, m).r
    if r >= tol:
        raise SplayConditionError(f"R_{m} = {r:.3e} is not below {tol:.1e}")
    return SplayState(theta=theta, m=m, r2=order_parameter(theta, 2).r)


def bind_model(state: SplayState, params: ModelParams) -> SplayState:
    """Fill in the collective rotation frequency for a concrete model."""
    return SplayState(theta=state.theta, m=state.m, r2=state.r2,
                      omega_collective=collective_frequency(state.theta, params))


def twisted_state(n: int, k: int, m: int = 1) -> SplayState:
    """Equidistant configuration theta_j = 2*pi*k*j/n.

    Such a state is an m-splay exactly when m*k is not a multiple of n;
    violating pairs (k, m) are rejected.
    """
    if n < 2:
        raise ValueError("need at least two oscillators")
    if not 0 <= k < n:
        raise ValueError("winding number k must satisfy 0 <= k < n")
    if (m * k) % n == 0:
        raise SplayConditionError(
            f"twisted state (n={n}, k={k}) has R_{m} = 1; it is no {m}-splay"
        )
    phases = TWO_PI * k * np.arange(n) / n
    return _make_splay(phases, m, tol=1e-10 * n)


def pair_completion(target: complex, m: int) -> tuple[float, float]:
    """Two phases whose m-th harmonics sum to ``target`` (|target| <= 2).

    The unit vectors are placed symmetrically at +/- arccos(|target|/2)
    around the target direction; the first returned phase takes the negative
    offset, which fixes the branch and makes sampling reproducible.
    """
    s = abs(target)
    if s > 2.0:
        raise ValueError("a pair of unit vectors cannot sum to modulus > 2")
    half_angle = np.arccos(np.clip(s / 2.0, -1.0, 1.0))
    base = float(np.angle(target))
    return ((base - half_angle) / m) % TWO_PI, ((base + half_angle) / m) % TWO_PI


def random_splay(n: int, m: int, seed: int, max_retries: int = 100) -> SplayState:
    """Draw a random point on the m-splay manifold.

    Phases 3..N are drawn uniformly; the first two are completed in closed
    form so that the m-th moment cancels exactly.  When the free phases sum
    to a harmonic of modulus > 2 (impossible to cancel with two unit
    vectors) they are redrawn, up to ``max_retries`` times.

    The sampler hits the manifold to |Z_m| < 1e-12 but makes no claim of
    uniformity with respect to any particular measure on it.
    """
    if n < 2:
        raise ValueError("need at least two oscillators")
    if m < 1:
        raise ValueError("moment m must be a positive integer")
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        free = rng.uniform(0.0, TWO_PI, size=n - 2)
        target = -np.exp(1j * m * free).sum()
        if abs(target) <= 2.0:
            theta1, theta2 = pair_completion(complex(target), m)
            phases = np.concatenate([[theta1, theta2], free])
            return _make_splay(phases, m, tol=SAMPLER_TOL)
    raise RetryBudgetError(
        f"no completable draw in {max_retries} tries for n={n}, m={m}, seed={seed}"
    )


def antipodal_pairs_family(n: int, deltas) -> SplayState:
    """The parametric family of antipodal pairs (delta_p, delta_p + pi).

    The first pair is pinned at (0, pi); the remaining n/2 - 1 pair offsets
    are free parameters.  Every member is a 1-splay state, and for n = 4 the
    second moment is R_2 = |cos(delta_1)|.
    """
    if n < 4 or n % 2 != 0:
        raise ValueError("the antipodal-pairs family needs an even n >= 4")
    deltas = np.asarray(deltas, dtype=float)
    if deltas.shape != (n // 2 - 1,):
        raise ValueError(f"expected {n // 2 - 1} pair offsets, got {deltas.shape}")
    offsets = np.concatenate([[0.0], deltas])
    phases = np.empty(n)
    phases[0::2] = offsets
    phases[1::2] = offsets + np.pi
    return _make_splay(phases, m=1, tol=1e-12 * n)


def splay_tangent_basis(theta, m: int, rank_tol: float = RANK_TOL) -> TangentBasis:
    """Orthonormal basis of the tangent space of the m-splay manifold.

    The tangent space at theta is the real null space of the 2 x N matrix
    with rows cos(m*theta_j) and sin(m*theta_j); it always contains the
    constant vector.  The basis is computed by SVD, with singular values
    below ``rank_tol`` times the largest one treated as zero.  At degenerate
    base points (rank < 2, e.g. any N = 2 configuration) the null space is
    larger than N - 2 and the result carries ``degenerate=True``.
    """
    config = theta if isinstance(theta, PhaseConfiguration) else PhaseConfiguration(theta)
    phases = config.phases
    constraint = np.vstack([np.cos(m * phases), np.sin(m * phases)])
    _, singular, vt = np.linalg.svd(constraint)
    rank = int(np.sum(singular > rank_tol * singular[0]))
    return TangentBasis(vectors=vt[rank:].copy(), m=m, theta=config,
                        degenerate=rank < 2)


def transverse_directions(theta, m: int, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the complement of the tangent space.

    These are the directions along which a perturbation actually leaves the
    m-splay manifold; generically there are two of them.
    """
    config = theta if isinstance(theta, PhaseConfiguration) else PhaseConfiguration(theta)
    phases = config.phases
    constraint = np.vstack([np.cos(m * phases), np.sin(m * phases)])
    _, singular, vt = np.linalg.svd(constraint)
    rank = int(np.sum(singular > rank_tol * singular[0]))
    return vt[:rank].copy()
