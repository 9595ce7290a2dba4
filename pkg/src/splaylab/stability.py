"""Closed-form linear-stability results for splay states.

Everything here reduces the spectrum of a large variational matrix to a few
matrix traces.  On the splay manifold the phase-phase block L has a zero
eigenvalue of multiplicity N - 2, so its characteristic polynomial collapses
to a quadratic with coefficients -Tr(L) and (Tr(L)^2 - Tr(L^2))/2.  The
inertial and adaptive models lift that quadratic to explicit quartics in the
same traces (plus the traces of Lt = B C for the adaptive model), and the
oscillatory stability boundaries follow by substituting a purely imaginary
root into those quartics.

Note on the boundary surfaces: direct substitution of mu = i*v yields
conditions with a gamma^2 term.  A gamma-linear variant of each condition is
also evaluated and reported alongside (fields ``printed_*``) for comparison;
its substitution residual is generically nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .construct import SplayState, TangentBasis
from .models import (
    TOL_SPLAY,
    JacobianBlocks,
    PhaseConfiguration,
    SplayConditionError,
    TraceSet,
    order_parameter,
)

#: Half-width of the band around every stability boundary inside which a
#: point is labelled Marginal instead of being forced to one side.
BOUNDARY_BAND = 1e-6


class Classification(str, Enum):
    """Planar stability classes of the transverse dynamics."""

    STABLE_NODE = "StableNode"
    STABLE_FOCUS = "StableFocus"
    UNSTABLE_NODE = "UnstableNode"
    UNSTABLE_FOCUS = "UnstableFocus"
    SADDLE = "Saddle"
    MARGINAL = "Marginal"

    @property
    def is_stable(self) -> bool:
        return self in (Classification.STABLE_NODE, Classification.STABLE_FOCUS)


@dataclass(frozen=True)
class StabilityReport:
    """Analytic verdict for one state: eigenvalues, class, and margins.

    ``boundary_distance`` is a signed proxy for the distance to the
    stability boundary (positive inside the stable region); we use the
    negated maximal real part.  ``residual_vs_oracle`` is filled when the
    report has been cross-checked against a numeric spectrum.
    """

    analytic_eigenvalues: tuple[complex, ...]
    classification: Classification
    max_real_part: float
    boundary_distance: float
    residual_vs_oracle: float | None = None


@dataclass(frozen=True)
class HopfBoundaryPoint:
    """A point on the oscillatory stability boundary.

    ``crossing_frequency`` is the frequency v at which a conjugate pair
    sits on the imaginary axis; ``location`` holds the parameter tuple,
    including the coordinate solved for.  ``quartic_residual`` is the value
    of the quartic at mu = i*v (zero up to roundoff by construction).  The
    ``printed_*`` fields evaluate the gamma-linear variant of the same
    condition and its (generically nonzero) residual.
    """

    crossing_frequency: float
    location: dict[str, float]
    quartic_residual: float
    printed_value: float
    printed_residual: float


# ---------------------------------------------------------------------------
# Reduced characteristic polynomial and planar classification
# ---------------------------------------------------------------------------


def reduced_char_coeffs(l_matrix: np.ndarray) -> tuple[float, float]:
    """Coefficients (a_{N-1}, a_{N-2}) of the nontrivial quadratic factor.

    For a matrix with a zero eigenvalue of multiplicity N - 2 the
    characteristic polynomial factors as
    (-1)^N * lambda^(N-2) * (lambda^2 + a_{N-1} lambda + a_{N-2}) with
    a_{N-1} = -Tr(L) and a_{N-2} = (Tr(L)^2 - Tr(L^2)) / 2, computed here
    from matrix traces alone.
    """
    l_matrix = np.asarray(l_matrix, dtype=float)
    tr = float(np.trace(l_matrix))
    tr2 = float(np.einsum("ij,ji->", l_matrix, l_matrix))
    return -tr, 0.5 * (tr * tr - tr2)


def transverse_eigenvalues(traces: TraceSet) -> tuple[complex, complex]:
    """Both roots of lambda^2 - Tr(L) lambda + (Tr(L)^2 - Tr(L^2))/2.

    Uses the cancellation-free quadratic formula; roots are returned with
    the larger real part first.
    """
    tr, tr2 = traces.trL, traces.trL2
    a2 = 0.5 * (tr * tr - tr2)
    disc = 2.0 * tr2 - tr * tr  # discriminant of the reduced quadratic
    if disc < 0.0:
        half = 0.5 * np.sqrt(-disc)
        roots = (complex(0.5 * tr, half), complex(0.5 * tr, -half))
    else:
        sq = np.sqrt(disc)
        big = 0.5 * (tr + sq) if tr >= 0 else 0.5 * (tr - sq)
        small = a2 / big if big != 0.0 else 0.0
        roots = (complex(big), complex(small))
    return tuple(sorted(roots, key=lambda z: (-z.real, -z.imag)))


def max_real_part(eigenvalues) -> float:
    return float(max(z.real for z in eigenvalues))


def classify_planar(traces: TraceSet, band: float = BOUNDARY_BAND) -> Classification:
    """Stability class of the two-eigenvalue transverse dynamics.

    Saddle iff Tr(L^2) > Tr(L)^2; otherwise stable or unstable by the sign
    of Tr(L).  The eigenvalue pair is complex (a focus) exactly when the
    reduced discriminant 2 Tr(L^2) - Tr(L)^2 is negative, real (a node)
    otherwise.  Points within ``band`` of a sign change in Tr(L), in the
    constant coefficient, or in the maximal real part are labelled Marginal
    so that closed form and oracle can never disagree through roundoff.
    """
    tr, tr2 = traces.trL, traces.trL2
    roots = transverse_eigenvalues(traces)
    max_re = max_real_part(roots)
    if min(abs(tr), abs(tr * tr - tr2), abs(max_re)) <= band:
        return Classification.MARGINAL
    if tr2 > tr * tr:
        return Classification.SADDLE
    node = 2.0 * tr2 >= tr * tr
    if tr < 0:
        return Classification.STABLE_NODE if node else Classification.STABLE_FOCUS
    return Classification.UNSTABLE_NODE if node else Classification.UNSTABLE_FOCUS


def classify_roots(roots, band: float = BOUNDARY_BAND) -> Classification:
    """Stability class of a full root set (quartic models).

    Stable/unstable by the sign of the maximal real part, node versus focus
    by whether the dominant root is real; within ``band`` of the imaginary
    axis the point is Marginal.  The Saddle label is reserved for the planar
    classifier: the damped quartics always retain stable directions.
    """
    roots = np.asarray(roots, dtype=complex)
    max_re = float(roots.real.max())
    if abs(max_re) <= band:
        return Classification.MARGINAL
    dominant = roots[np.argmax(roots.real)]
    node = abs(dominant.imag) <= band
    if max_re < 0:
        return Classification.STABLE_NODE if node else Classification.STABLE_FOCUS
    return Classification.UNSTABLE_NODE if node else Classification.UNSTABLE_FOCUS


# ---------------------------------------------------------------------------
# Plain model with phase lag
# ---------------------------------------------------------------------------


def ks_traces(alpha: float, sigma: float, r2: float) -> TraceSet:
    """Trace set of the phase-lag model's Jacobian on the 1-splay manifold.

    Tr(L) = sigma*cos(alpha);  Tr(L^2) = sigma^2 (R_2^2 + cos(2 alpha)) / 2.
    """
    return TraceSet(trL=sigma * np.cos(alpha),
                    trL2=0.5 * sigma * sigma * (r2 * r2 + np.cos(2.0 * alpha)))


def ks_eigenvalues(alpha: float, sigma: float, r2: float) -> tuple[complex, complex]:
    """Transverse eigenvalues (sigma/2) (cos a +/- sqrt(R_2^2 - sin^2 a)).

    The square root turns into i*sqrt(sin^2 a - R_2^2) on the focus side.
    """
    gap = r2 * r2 - np.sin(alpha) ** 2
    root = np.sqrt(gap) if gap >= 0 else 1j * np.sqrt(-gap)
    lam1 = 0.5 * sigma * (np.cos(alpha) + root)
    lam2 = 0.5 * sigma * (np.cos(alpha) - root)
    return tuple(sorted((complex(lam1), complex(lam2)),
                        key=lambda z: (-z.real, -z.imag)))


def ks_stability(alpha: float, theta, sigma: float = 1.0,
                 band: float = BOUNDARY_BAND,
                 tol_splay: float = TOL_SPLAY) -> StabilityReport:
    """Stability report for a 1-splay state of the phase-lag model.

    Stability is decided by sigma*cos(alpha) < 0 alone; the second moment
    R_2 of the state only shapes node-versus-focus and the imaginary parts.
    """
    if isinstance(theta, SplayState):
        if theta.m != 1:
            raise SplayConditionError("phase-lag stability applies to 1-splay states")
        r2 = theta.r2
    else:
        config = theta if isinstance(theta, PhaseConfiguration) else PhaseConfiguration(theta)
        r1 = order_parameter(config, 1).r
        if r1 >= tol_splay:
            raise SplayConditionError(f"R_1 = {r1:.3e} is not below {tol_splay:.1e}")
        r2 = order_parameter(config, 2).r
    eigenvalues = ks_eigenvalues(alpha, sigma, r2)
    classification = classify_planar(ks_traces(alpha, sigma, r2), band)
    max_re = max_real_part(eigenvalues)
    return StabilityReport(analytic_eigenvalues=eigenvalues,
                           classification=classification,
                           max_real_part=max_re,
                           boundary_distance=-max_re)


# ---------------------------------------------------------------------------
# Quartic solving
# ---------------------------------------------------------------------------

#: Roots closer than this (relative to 1 + |root|) are examined as a
#: possible multiple-root cluster; companion eigenvalues of a k-fold root
#: spread by about eps**(1/k), so the radius must sit well above that.
_CLUSTER_RADIUS = 1e-3

#: Derivative-magnitude threshold (relative to an absolute-coefficient
#: bound) under which a cluster centroid is accepted as a multiple root.
_CLUSTER_DERIV_TOL = 1e-11


def _refine_root_clusters(monic: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Replace tight root clusters by their centroid when the polynomial
    certifies a multiple root there.

    Companion eigenvalues of an m-fold root scatter by ~eps**(1/m) but their
    mean is accurate to roundoff, so the centroid is the right value; the
    derivative tests reject genuinely distinct close roots, whose low-order
    derivatives stay far from zero at the midpoint.
    """
    order = np.argsort(roots.real, kind="stable")
    groups: list[list[int]] = []
    for idx in order:
        placed = False
        for group in groups:
            ref = roots[group[-1]]
            if abs(roots[idx] - ref) <= _CLUSTER_RADIUS * (1.0 + abs(ref)):
                group.append(idx)
                placed = True
                break
        if not placed:
            groups.append([idx])
    refined = roots.copy()
    for group in groups:
        if len(group) < 2:
            continue
        centroid = roots[group].mean()
        poly = monic
        certified = True
        for _ in range(len(group)):
            bound = float(np.polyval(np.abs(poly), abs(centroid)))
            if abs(np.polyval(poly, centroid)) > _CLUSTER_DERIV_TOL * max(bound, 1e-30):
                certified = False
                break
            poly = np.polyder(poly)
        if certified:
            refined[group] = centroid
    return refined


def quartic_roots(coeffs) -> np.ndarray:
    """All four roots of a quartic, leading coefficient first.

    Roots come from the eigenvalues of the balanced 4 x 4 companion matrix;
    tight clusters that the polynomial certifies as multiple roots are
    snapped to their centroid, which restores full accuracy there.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (5,):
        raise ValueError("a quartic needs exactly five coefficients")
    if not np.all(np.isfinite(c)):
        raise ValueError("quartic coefficients must be finite")
    if c[0] == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    monic = c / c[0]
    roots = np.roots(monic)
    return _refine_root_clusters(monic, roots.astype(complex))


def quartic_residual(coeffs, mu: complex) -> float:
    """|p(mu)| for the quartic with the given coefficients."""
    return float(abs(np.polyval(np.asarray(coeffs, dtype=float), mu)))


# ---------------------------------------------------------------------------
# Inertial model
# ---------------------------------------------------------------------------


def inertia_quartic_coeffs(gamma: float, traces: TraceSet) -> np.ndarray:
    """Coefficients of mu^4 + 2g mu^3 + (g^2 - trL) mu^2 - g trL mu
    + (trL^2 - trL2)/2."""
    trL, trL2 = traces.trL, traces.trL2
    return np.array([1.0,
                     2.0 * gamma,
                     gamma * gamma - trL,
                     -(gamma * trL),
                     0.5 * (trL * trL - trL2)])


def inertia_eigenvalues(gamma: float, traces: TraceSet) -> np.ndarray:
    """The four transverse eigenvalues of the inertial model, via the quartic."""
    if gamma <= 0:
        raise ValueError("damping gamma must be positive")
    return quartic_roots(inertia_quartic_coeffs(gamma, traces))


def inertia_eigenvalues_nested(gamma: float, traces: TraceSet) -> np.ndarray:
    """Same eigenvalues in nested-radical form -g/2 +/- sqrt(g^2/4 + lambda).

    Agrees with the companion-matrix roots to ~1e-9 or better; the two
    evaluations cross-validate each other.
    """
    if gamma <= 0:
        raise ValueError("damping gamma must be positive")
    out = []
    for lam in transverse_eigenvalues(traces):
        inner = np.sqrt(complex(0.25 * gamma * gamma + lam))
        out.append(-0.5 * gamma + inner)
        out.append(-0.5 * gamma - inner)
    return np.asarray(out, dtype=complex)


def ks_inertia_eigenvalues(gamma: float, alpha: float, sigma: float,
                           r2: float) -> np.ndarray:
    """Inertial eigenvalues driven by (alpha, sigma, R_2) through the traces."""
    return inertia_eigenvalues(gamma, ks_traces(alpha, sigma, r2))


def ks_inertia_eigenvalues_nested(gamma: float, alpha: float, sigma: float,
                                  r2: float) -> np.ndarray:
    """Nested-radical form with the inner lambda from the phase-lag formula.

    Both inner signs are taken: the pair (sigma/2)(cos a +/- sqrt(...))
    must reproduce both roots of the reduced quadratic.
    """
    if gamma <= 0:
        raise ValueError("damping gamma must be positive")
    out = []
    for lam in ks_eigenvalues(alpha, sigma, r2):
        inner = np.sqrt(complex(0.25 * gamma * gamma + lam))
        out.append(-0.5 * gamma + inner)
        out.append(-0.5 * gamma - inner)
    return np.asarray(out, dtype=complex)


def sigma_rescale(sigma: float, gamma: float) -> float:
    """Collapse (sigma, gamma) to the single parameter gamma' = sqrt(sigma)*gamma.

    Rescaling mu by sqrt(sigma) maps the coupling-sigma quartic onto the
    unit-coupling one, so the stability classification of
    (sigma, gamma, alpha, R_2) equals that of (1, gamma/sqrt(sigma), alpha, R_2).
    """
    if sigma <= 0:
        raise ValueError("coupling sigma must be positive")
    return float(np.sqrt(sigma) * gamma)


def hopf_boundary(model_kind: str, *, gamma: float, trL: float | None = None,
                  sigma: float = 1.0, alpha: float | None = None) -> HopfBoundaryPoint:
    """Point on the oscillatory (imaginary-axis crossing) stability boundary.

    ``model_kind='inertia-generic'`` fixes (gamma, trL) and solves for the
    Tr(L^2) value on the boundary:  v^2 = -trL/2 and
    trL^2/2 + gamma^2 trL - trL2 = 0.

    ``model_kind='ks-inertia'`` fixes (gamma, sigma, alpha) and solves for
    R_2^2:  v^2 = -sigma cos(a)/2 and
    sigma (sin^2 a - R_2^2) + 2 gamma^2 cos(a) = 0.

    Each point is validated by substituting mu = i*v into the corresponding
    quartic; the gamma-linear variant of the condition is evaluated too and
    reported with its own residual.
    """
    if gamma <= 0:
        raise ValueError("damping gamma must be positive")
    if model_kind == "inertia-generic":
        if trL is None:
            raise ValueError("inertia-generic boundary needs trL")
        if trL >= 0:
            raise ValueError("no oscillatory crossing for trL >= 0")
        v = float(np.sqrt(-0.5 * trL))
        trL2 = 0.5 * trL * trL + gamma * gamma * trL
        residual = quartic_residual(
            inertia_quartic_coeffs(gamma, TraceSet(trL=trL, trL2=trL2)), 1j * v)
        printed_trL2 = 0.5 * trL * trL + gamma * trL
        printed_residual = quartic_residual(
            inertia_quartic_coeffs(gamma, TraceSet(trL=trL, trL2=printed_trL2)), 1j * v)
        return HopfBoundaryPoint(
            crossing_frequency=v,
            location={"gamma": gamma, "trL": trL, "trL2": float(trL2)},
            quartic_residual=residual,
            printed_value=float(printed_trL2),
            printed_residual=printed_residual)
    if model_kind == "ks-inertia":
        if alpha is None:
            raise ValueError("ks-inertia boundary needs alpha")
        if sigma <= 0:
            raise ValueError("coupling sigma must be positive")
        cos_a = float(np.cos(alpha))
        if cos_a >= 0:
            raise ValueError("no oscillatory crossing for cos(alpha) >= 0")
        v = float(np.sqrt(-0.5 * sigma * cos_a))
        sin2 = float(np.sin(alpha) ** 2)
        r2_squared = sin2 + 2.0 * gamma * gamma * cos_a / sigma

        def _residual(r2sq: float) -> float:
            coeffs = np.array([1.0, 2.0 * gamma, gamma * gamma - sigma * cos_a,
                               -gamma * sigma * cos_a,
                               0.25 * sigma * sigma * (1.0 - r2sq)])
            return quartic_residual(coeffs, 1j * v)

        # The gamma-linear variant is stated for unit coupling.
        printed_r2_squared = sin2 + 2.0 * gamma * cos_a
        return HopfBoundaryPoint(
            crossing_frequency=v,
            location={"gamma": gamma, "sigma": sigma, "alpha": alpha,
                      "r2_squared": float(r2_squared)},
            quartic_residual=_residual(r2_squared),
            printed_value=float(printed_r2_squared),
            printed_residual=_residual(printed_r2_squared))
    raise ValueError("model_kind must be 'inertia-generic' or 'ks-inertia'")


# ---------------------------------------------------------------------------
# Adaptive model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdaptiveQuartic:
    """The adaptive transverse quartic: coefficients, roots, and verdict."""

    coeffs: np.ndarray
    roots: np.ndarray
    stable: bool


def adaptive_quartic_coeffs(traces: TraceSet, epsilon: float) -> np.ndarray:
    """Coefficients of the adaptive transverse quartic in the five traces.

    With q = Tr(L), s = Tr(L^2), t = Tr(Lt), u = Tr(Lt^2), w = Tr(L Lt):

        mu^4 + (2e - q) mu^3
             + (e^2 - 2 e q + (q^2 - s)/2 - t) mu^2
             + (q t - w + e (q^2 - s - t) - e^2 q) mu
             + (t^2 - u + 2 e (q t - w) + e^2 (q^2 - s)) / 2

    Setting q = s = w = 0 reproduces the inertial quartic under
    (gamma, L) -> (epsilon, Lt), coefficient by coefficient.
    """
    if epsilon <= 0:
        raise ValueError("dissipation epsilon must be positive")
    if traces.trLt is None or traces.trLt2 is None or traces.trLLt is None:
        raise ValueError("adaptive quartic needs the traces of Lt, Lt^2 and L*Lt")
    q, s = traces.trL, traces.trL2
    t, u, w = traces.trLt, traces.trLt2, traces.trLLt
    e = epsilon
    return np.array([
        1.0,
        2.0 * e - q,
        e * e - 2.0 * e * q + 0.5 * (q * q - s) - t,
        q * t - w + e * (q * q - s - t) - e * e * q,
        0.5 * (t * t - u + 2.0 * e * (q * t - w) + e * e * (q * q - s)),
    ])


def adaptive_quartic(traces: TraceSet, epsilon: float,
                     band: float = BOUNDARY_BAND) -> AdaptiveQuartic:
    """Solve the adaptive transverse quartic and report the verdict."""
    coeffs = adaptive_quartic_coeffs(traces, epsilon)
    roots = quartic_roots(coeffs)
    return AdaptiveQuartic(coeffs=coeffs, roots=roots,
                           stable=bool(roots.real.max() < -band))


@dataclass(frozen=True)
class ReductionCheck:
    """Result of the tangent-kernel condition behind the adaptive quartic.

    The trace reduction applies when every tangent direction v of the splay
    manifold is annihilated by both L and Lt = B C, so that
    (mu + eps) L + B C keeps a zero eigenvalue of multiplicity N - 2 for
    every mu.  ``l_residual`` and ``lt_residual`` are the largest norms of
    L v and (B C) v over the tangent basis, relative to the block scale.
    """

    applicable: bool
    l_residual: float
    lt_residual: float
    scale: float


def reduction_applicable(blocks: JacobianBlocks, basis: TangentBasis,
                         tol: float = 1e-8) -> ReductionCheck:
    """Check the kernel condition that makes the adaptive quartic exact."""
    l = blocks.l_matrix
    lt = blocks.lt_matrix
    if lt is None:
        lt = np.zeros_like(l)
    scale = max(float(np.linalg.norm(l)), float(np.linalg.norm(lt)), 1e-300)
    l_res = 0.0
    lt_res = 0.0
    for v in basis.vectors:
        l_res = max(l_res, float(np.linalg.norm(l @ v)))
        lt_res = max(lt_res, float(np.linalg.norm(lt @ v)))
    return ReductionCheck(applicable=max(l_res, lt_res) < tol * scale,
                          l_residual=l_res, lt_residual=lt_res, scale=scale)
