"""Oscillator models: phase states, parameters, vector fields, and the
variational (Jacobian) blocks evaluated on splay configurations.

Three model families are supported:

* plain phase oscillators with a Sakaguchi phase lag,
* second-order (inertial, swing-equation) oscillators,
* adaptively coupled oscillators carrying one weight per directed edge.

All functions here are pure; the state containers are immutable after
construction and safe to share between threads or worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

TWO_PI = 2.0 * np.pi

#: Default tolerance on the order-parameter modulus R_m below which a
#: configuration is accepted as an m-splay state.  The closed-form stability
#: results are exact only on the manifold, so this is deliberately tight.
TOL_SPLAY = 1e-9


class SplayConditionError(ValueError):
    """An operation required R_m(theta) ~ 0 but the input violates it."""


class ShapeMismatchError(ValueError):
    """A dynamic state does not match the shape demanded by the model."""


def normalize_phases(values) -> np.ndarray:
    """Reduce a sequence of angles into [0, 2*pi), returned as float array."""
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("phases must be finite")
    out = np.mod(arr, TWO_PI)
    # np.mod can round values like -1e-17 up to exactly 2*pi; fold them back.
    out[out >= TWO_PI] = 0.0
    return out


@dataclass(frozen=True)
class PhaseConfiguration:
    """A vector of N >= 2 oscillator phases, each reduced into [0, 2*pi)."""

    phases: np.ndarray

    def __post_init__(self):
        arr = normalize_phases(self.phases)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("need a one-dimensional array of at least two phases")
        arr.flags.writeable = False
        object.__setattr__(self, "phases", arr)

    @property
    def n(self) -> int:
        return self.phases.size

    def shifted(self, offset: float) -> "PhaseConfiguration":
        """Return the configuration rotated by a common phase offset."""
        return PhaseConfiguration(self.phases + offset)


@dataclass(frozen=True)
class OrderParameterMoment:
    """The m-th moment of the complex mean field of a configuration.

    ``z`` is the complex moment, ``r`` its modulus and ``rho`` its argument
    reduced into [0, 2*pi); ``z == r * exp(1j * rho)`` up to roundoff.
    """

    m: int
    z: complex
    r: float
    rho: float


def _as_phase_array(theta) -> np.ndarray:
    if isinstance(theta, PhaseConfiguration):
        return theta.phases
    return np.asarray(theta, dtype=float)


def order_parameter(theta, m: int) -> OrderParameterMoment:
    """Compute the m-th moment Z_m = mean(exp(i*m*theta_j)) of a configuration.

    Parameters
    ----------
    theta : PhaseConfiguration or array_like
        Oscillator phases.
    m : int
        Moment index, m >= 1.
    """
    if m < 1:
        raise ValueError("moment m must be a positive integer")
    phases = _as_phase_array(theta)
    z = complex(np.exp(1j * m * phases).mean())
    r = abs(z)
    rho = float(np.angle(z)) % TWO_PI
    return OrderParameterMoment(m=int(m), z=z, r=r, rho=rho)


# ---------------------------------------------------------------------------
# Model parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KuramotoSakaguchi:
    """Globally coupled phase oscillators with phase lag ``alpha``.

    dphi_i/dt = omega - (sigma/N) * sum_j sin(phi_i - phi_j + alpha)
    """

    omega: float
    alpha: float
    sigma: float = 1.0

    kind = "ks"


@dataclass(frozen=True)
class Inertia:
    """Second-order (swing-equation) oscillators.

    m_inertia * ddphi_i + gamma * dphi_i
        = p - (sigma/N) * sum_j sin(phi_i - phi_j + alpha)

    Computations internally rescale to unit inertia via gamma -> gamma/M,
    p -> p/M, sigma -> sigma/M, so reported spectra live in rescaled time.
    """

    gamma: float
    p: float
    alpha: float
    sigma: float = 1.0
    m_inertia: float = 1.0

    kind = "inertia"

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("damping gamma must be positive")
        if self.m_inertia <= 0:
            raise ValueError("inertia constant must be positive")

    def unit_inertia(self) -> "Inertia":
        """Equivalent parameters with m_inertia == 1."""
        if self.m_inertia == 1.0:
            return self
        m = self.m_inertia
        return Inertia(gamma=self.gamma / m, p=self.p / m, alpha=self.alpha,
                       sigma=self.sigma / m, m_inertia=1.0)


@dataclass(frozen=True)
class Adaptive:
    """Phase oscillators coupled through slowly relaxing weights.

    dphi_i/dt   = omega - (sigma/N) * sum_j kappa_ij sin(phi_i - phi_j + alpha)
    dkappa_ij/dt = -epsilon * (kappa_ij + sin(phi_i - phi_j + beta))

    There is one weight per ordered pair, K = N**2, flattened row-major so
    kappa_ij lives at index i*N + j.
    """

    omega: float
    epsilon: float
    alpha: float
    beta: float
    sigma: float = 1.0

    kind = "adaptive"

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("dissipation epsilon must be positive")


ModelParams = Union[KuramotoSakaguchi, Inertia, Adaptive]


def natural_moment(params: ModelParams) -> int:
    """The order-parameter moment at which the model's splay states live."""
    return 2 if isinstance(params, Adaptive) else 1


def require_splay(theta, m: int, tol: float = TOL_SPLAY) -> float:
    """Check R_m(theta) < tol and return R_m; raise SplayConditionError otherwise."""
    r = order_parameter(theta, m).r
    if r >= tol:
        raise SplayConditionError(
            f"R_{m} = {r:.3e} exceeds the splay tolerance {tol:.1e}; "
            "the closed-form results do not apply here"
        )
    return r


# ---------------------------------------------------------------------------
# Dynamic states and vector fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DynamicState:
    """Full dynamical state: phases plus optional velocities / weights."""

    theta: PhaseConfiguration
    velocities: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.velocities is not None:
            v = np.asarray(self.velocities, dtype=float)
            if v.shape != (self.theta.n,):
                raise ShapeMismatchError("velocities must have one entry per oscillator")
            v.flags.writeable = False
            object.__setattr__(self, "velocities", v)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (self.theta.n ** 2,):
                raise ShapeMismatchError("weights must be a flat vector of length N**2")
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class StateDerivative:
    """Time derivative of a DynamicState, component by component."""

    dphases: np.ndarray
    dvelocities: np.ndarray | None = None
    dweights: np.ndarray | None = None


def validate_state(state: DynamicState, params: ModelParams) -> None:
    """Raise ShapeMismatchError unless the state fits the model variant."""
    if isinstance(params, Inertia):
        if state.velocities is None:
            raise ShapeMismatchError("inertial model needs velocities in the state")
        if state.weights is not None:
            raise ShapeMismatchError("inertial model carries no weights")
    elif isinstance(params, Adaptive):
        if state.weights is None:
            raise ShapeMismatchError("adaptive model needs weights in the state")
        if state.velocities is not None:
            raise ShapeMismatchError("adaptive model carries no velocities")
    else:
        if state.velocities is not None or state.weights is not None:
            raise ShapeMismatchError("plain model carries phases only")


def state_dimension(params: ModelParams, n: int) -> int:
    if isinstance(params, Inertia):
        return 2 * n
    if isinstance(params, Adaptive):
        return n + n * n
    return n


def pack_state(state: DynamicState, params: ModelParams) -> np.ndarray:
    """Flatten a DynamicState into the vector layout used by the integrator."""
    validate_state(state, params)
    parts = [state.theta.phases]
    if state.velocities is not None:
        parts.append(state.velocities)
    if state.weights is not None:
        parts.append(state.weights)
    return np.concatenate(parts)


def unpack_state(x: np.ndarray, params: ModelParams, n: int) -> DynamicState:
    """Inverse of pack_state.  Phases are reduced mod 2*pi by construction."""
    x = np.asarray(x, dtype=float)
    if x.shape != (state_dimension(params, n),):
        raise ShapeMismatchError("flat state has the wrong length for this model")
    theta = PhaseConfiguration(x[:n])
    if isinstance(params, Inertia):
        return DynamicState(theta=theta, velocities=x[n:])
    if isinstance(params, Adaptive):
        return DynamicState(theta=theta, weights=x[n:])
    return DynamicState(theta=theta)


def _pair_diffs(phases: np.ndarray) -> np.ndarray:
    """Matrix of phase differences d[i, j] = phases[i] - phases[j]."""
    return phases[:, None] - phases[None, :]


def _ks_coupling(phases: np.ndarray, alpha: float, sigma: float) -> np.ndarray:
    """-(sigma/N) * sum_j sin(phi_i - phi_j + alpha), via the complex mean field."""
    z1 = np.exp(1j * phases).mean()
    return -sigma * np.imag(np.exp(1j * (phases + alpha)) * np.conj(z1))


def rhs_flat(x: np.ndarray, params: ModelParams, n: int) -> np.ndarray:
    """Vector field on the flat state layout; shared by integrator and FD checks."""
    if isinstance(params, KuramotoSakaguchi):
        return params.omega + _ks_coupling(x, params.alpha, params.sigma)
    if isinstance(params, Inertia):
        q = params.unit_inertia()
        phases, psi = x[:n], x[n:]
        dphi = psi
        dpsi = -q.gamma * psi + q.p + _ks_coupling(phases, q.alpha, q.sigma)
        return np.concatenate([dphi, dpsi])
    if isinstance(params, Adaptive):
        phases, kappa = x[:n], x[n:].reshape(n, n)
        diffs = _pair_diffs(phases)
        dphi = params.omega - (params.sigma / n) * (
            kappa * np.sin(diffs + params.alpha)
        ).sum(axis=1)
        dkappa = -params.epsilon * (kappa + np.sin(diffs + params.beta))
        return np.concatenate([dphi, dkappa.ravel()])
    raise TypeError(f"unknown model parameters {params!r}")


def model_rhs(state: DynamicState, params: ModelParams) -> StateDerivative:
    """Evaluate the model vector field at a full dynamic state."""
    validate_state(state, params)
    n = state.theta.n
    dx = rhs_flat(pack_state(state, params), params, n)
    if isinstance(params, Inertia):
        return StateDerivative(dphases=dx[:n], dvelocities=dx[n:])
    if isinstance(params, Adaptive):
        return StateDerivative(dphases=dx[:n], dweights=dx[n:])
    return StateDerivative(dphases=dx)


def stationary_kappa(theta, params: Adaptive) -> np.ndarray:
    """Weights at which the adaptation dynamics is stationary for fixed phases.

    kappa*_ij = -sin(theta_i - theta_j + beta), flattened row-major.
    """
    if not isinstance(params, Adaptive):
        raise ShapeMismatchError("stationary weights exist for the adaptive model only")
    phases = _as_phase_array(theta)
    return (-np.sin(_pair_diffs(phases) + params.beta)).ravel()


def collective_frequency(theta, params: ModelParams, tol_splay: float = TOL_SPLAY) -> float:
    """Rotation frequency of the phase-locked solution through ``theta``.

    Requires theta to satisfy the splay condition at the model's natural
    moment; the returned value is exact on the manifold.
    """
    require_splay(theta, natural_moment(params), tol_splay)
    if isinstance(params, KuramotoSakaguchi):
        return params.omega
    if isinstance(params, Inertia):
        return params.p / params.gamma
    if isinstance(params, Adaptive):
        return params.omega + 0.5 * params.sigma * np.cos(params.beta - params.alpha)
    raise TypeError(f"unknown model parameters {params!r}")


def steady_state(theta, params: ModelParams, tol_splay: float = TOL_SPLAY) -> DynamicState:
    """The rotating-solution state through ``theta``: psi = Omega*1, kappa = kappa*."""
    config = theta if isinstance(theta, PhaseConfiguration) else PhaseConfiguration(theta)
    if isinstance(params, Inertia):
        omega = collective_frequency(config, params, tol_splay)
        return DynamicState(theta=config, velocities=np.full(config.n, omega))
    if isinstance(params, Adaptive):
        require_splay(config, 2, tol_splay)
        return DynamicState(theta=config, weights=stationary_kappa(config, params))
    return DynamicState(theta=config)


# ---------------------------------------------------------------------------
# Variational matrices at splay states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceSet:
    """The matrix traces that drive every closed-form stability result.

    ``trL`` and ``trL2`` are Tr(L) and Tr(L^2); the remaining three are the
    traces of Lt = B C, its square, and L*Lt, present for the adaptive model.
    """

    trL: float
    trL2: float
    trLt: float | None = None
    trLt2: float | None = None
    trLLt: float | None = None

    def __post_init__(self):
        for value in (self.trL, self.trL2, self.trLt, self.trLt2, self.trLLt):
            if value is not None and not np.isfinite(value):
                raise ValueError("trace values must be finite")


@dataclass(frozen=True)
class JacobianBlocks:
    """Blocks of the variational matrix at a splay state.

    ``l_matrix`` is the N x N phase-phase block with zero row sums.  For the
    adaptive model ``b_matrix`` (N x K), ``c_matrix`` (K x N) and their
    product ``lt_matrix`` are filled as well.
    """

    l_matrix: np.ndarray
    traces: TraceSet
    b_matrix: np.ndarray | None = None
    c_matrix: np.ndarray | None = None
    lt_matrix: np.ndarray | None = None


def _zero_row_sum(off_diag: np.ndarray) -> np.ndarray:
    """Fill the diagonal so that every row of the matrix sums to zero."""
    m = off_diag.copy()
    np.fill_diagonal(m, 0.0)
    np.fill_diagonal(m, -m.sum(axis=1))
    return m


def model_jacobian(theta, params: ModelParams, m: int | None = None,
                   tol_splay: float = TOL_SPLAY) -> JacobianBlocks:
    """Analytic Jacobian blocks of the coupling field at an m-splay state.

    ``m`` defaults to the model's natural moment.  The splay condition is
    checked first because the zero-row-sum construction is generic but the
    downstream closed-form results hold only on the manifold.
    """
    phases = _as_phase_array(theta)
    n = phases.size
    if m is None:
        m = natural_moment(params)
    require_splay(phases, m, tol_splay)

    if isinstance(params, (KuramotoSakaguchi, Inertia)):
        q = params.unit_inertia() if isinstance(params, Inertia) else params
        diffs = _pair_diffs(phases)
        l_matrix = _zero_row_sum((q.sigma / n) * np.cos(diffs + q.alpha))
        traces = TraceSet(trL=float(np.trace(l_matrix)),
                          trL2=float(np.einsum("ij,ji->", l_matrix, l_matrix)))
        return JacobianBlocks(l_matrix=l_matrix, traces=traces)

    if isinstance(params, Adaptive):
        diffs = _pair_diffs(phases)
        sin_b = np.sin(diffs + params.beta)
        cos_a = np.cos(diffs + params.alpha)
        l_matrix = _zero_row_sum(-(params.sigma / n) * sin_b * cos_a)

        k = n * n
        b_matrix = np.zeros((n, k))
        sin_a = np.sin(diffs + params.alpha)
        for i in range(n):
            b_matrix[i, i * n:(i + 1) * n] = -(params.sigma / n) * sin_a[i]
        c_matrix = np.zeros((k, n))
        cos_b = np.cos(diffs + params.beta)
        for row in range(n):
            for col in range(n):
                edge = row * n + col
                c_matrix[edge, row] += -params.epsilon * cos_b[row, col]
                c_matrix[edge, col] -= -params.epsilon * cos_b[row, col]
        lt_matrix = b_matrix @ c_matrix
        traces = TraceSet(
            trL=float(np.trace(l_matrix)),
            trL2=float(np.einsum("ij,ji->", l_matrix, l_matrix)),
            trLt=float(np.trace(lt_matrix)),
            trLt2=float(np.einsum("ij,ji->", lt_matrix, lt_matrix)),
            trLLt=float(np.einsum("ij,ji->", l_matrix, lt_matrix)),
        )
        return JacobianBlocks(l_matrix=l_matrix, traces=traces,
                              b_matrix=b_matrix, c_matrix=c_matrix,
                              lt_matrix=lt_matrix)

    raise TypeError(f"unknown model parameters {params!r}")


def variational_matrix(blocks: JacobianBlocks, params: ModelParams) -> np.ndarray:
    """Assemble the full first-order variational matrix from the blocks.

    Plain model: L itself.  Inertial: [[0, I], [L, -gamma*I]] in unit-inertia
    time.  Adaptive: [[L, B], [C, -epsilon*I]].
    """
    l = blocks.l_matrix
    n = l.shape[0]
    if isinstance(params, KuramotoSakaguchi):
        return l.copy()
    if isinstance(params, Inertia):
        gamma = params.unit_inertia().gamma
        top = np.hstack([np.zeros((n, n)), np.eye(n)])
        bottom = np.hstack([l, -gamma * np.eye(n)])
        return np.vstack([top, bottom])
    if isinstance(params, Adaptive):
        if blocks.b_matrix is None or blocks.c_matrix is None:
            raise ValueError("adaptive blocks require B and C matrices")
        k = blocks.b_matrix.shape[1]
        top = np.hstack([l, blocks.b_matrix])
        bottom = np.hstack([blocks.c_matrix, -params.epsilon * np.eye(k)])
        return np.vstack([top, bottom])
    raise TypeError(f"unknown model parameters {params!r}")
