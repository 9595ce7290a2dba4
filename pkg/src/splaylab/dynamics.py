"""Fixed-step time integration and rate/frequency measurement.

Trajectories confirm that splay states are invariant rotating solutions and
that the decay or growth of small transverse perturbations reproduces the
analytic spectra.  Integration is classical RK4 with a fixed step: runs are
deterministic, the convergence order is cleanly testable, and decay-rate
fits stay smooth.  Phases are stored unwrapped (no mod 2*pi) so that the
collective frequency can be read off as a slope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .construct import SplayState, splay_tangent_basis
from .models import (
    DynamicState,
    ModelParams,
    collective_frequency,
    pack_state,
    rhs_flat,
    state_dimension,
    steady_state,
    unpack_state,
)


class BlowupError(RuntimeError):
    """The state left the finite range during integration."""

    def __init__(self, time: float):
        super().__init__(f"non-finite state encountered at t = {time:.6g}")
        self.time = time


class NoLinearRegimeError(RuntimeError):
    """The deviation norm never entered the decay-fit window."""


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled trajectory in the flat state layout.

    ``samples[i]`` is the packed state at ``times[i]``; phases are raw
    (unwrapped) values.  ``dt`` is the integration step and ``stride`` the
    number of steps between stored rows, so stored times advance by
    dt * stride.
    """

    times: np.ndarray
    samples: np.ndarray
    dt: float
    stride: int
    model: ModelParams
    n: int

    @property
    def states(self) -> list[DynamicState]:
        """Snapshots as DynamicState values (phases reduced mod 2*pi)."""
        return [unpack_state(row, self.model, self.n) for row in self.samples]

    def phase_block(self) -> np.ndarray:
        return self.samples[:, :self.n]


def integrate(x0, params: ModelParams, dt: float, t_end: float,
              stride: int = 1, n: int | None = None) -> Trajectory:
    """Integrate the model with classical fixed-step RK4.

    ``x0`` is a DynamicState or an already packed flat vector (the latter
    needs ``n`` and skips phase normalisation, which matters when a state
    sits a small perturbation away from the branch cut at 2*pi).  Stores
    every ``stride``-th step plus the initial state, and raises BlowupError
    with the offending time if the state becomes non-finite.
    """
    if dt <= 0:
        raise ValueError("step dt must be positive")
    if t_end < dt:
        raise ValueError("t_end must cover at least one step")
    if stride < 1:
        raise ValueError("stride must be a positive integer")
    if isinstance(x0, DynamicState):
        n = x0.theta.n
        x = pack_state(x0, params)
    else:
        if n is None:
            raise ValueError("a packed initial vector needs the oscillator count n")
        x = np.asarray(x0, dtype=float).copy()
        if x.shape != (state_dimension(params, n),):
            raise ValueError("packed initial vector has the wrong length")
    steps = int(round(t_end / dt))
    stored = steps // stride + 1
    samples = np.empty((stored, state_dimension(params, n)))
    times = np.empty(stored)
    samples[0] = x
    times[0] = 0.0
    row = 1
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, steps + 1):
            k1 = rhs_flat(x, params, n)
            k2 = rhs_flat(x + 0.5 * dt * k1, params, n)
            k3 = rhs_flat(x + 0.5 * dt * k2, params, n)
            k4 = rhs_flat(x + dt * k3, params, n)
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise BlowupError(step * dt)
            if step % stride == 0:
                samples[row] = x
                times[row] = step * dt
                row += 1
    return Trajectory(times=times[:row], samples=samples[:row], dt=dt,
                      stride=stride, model=params, n=n)


def measure_frequency(traj: Trajectory) -> float:
    """Least-squares slope of the mean unwrapped phase over the second half."""
    if traj.times[-1] - traj.times[0] < 10 * traj.dt:
        raise ValueError("trajectory too short for a frequency estimate")
    half = traj.times.size // 2
    t = traj.times[half:]
    mean_phase = traj.phase_block()[half:].mean(axis=1)
    slope = np.polyfit(t, mean_phase, 1)[0]
    return float(slope)


def reference_samples(reference: SplayState, params: ModelParams,
                      times: np.ndarray) -> np.ndarray:
    """Packed states of the exact rotating solution at the given times."""
    base = pack_state(steady_state(reference.theta, params), params)
    omega = reference.omega_collective
    if omega is None:
        omega = collective_frequency(reference.theta, params)
    n = reference.n
    out = np.tile(base, (times.size, 1))
    out[:, :n] += omega * times[:, None]
    return out


#: Norm window inside which the decay fit operates: above the roundoff and
#: nonlinear-saturation floor, below the linear-regime ceiling.
FIT_WINDOW = (1e-8, 1e-3)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of log ||transverse deviation|| against time."""

    rate: float
    t_start: float
    t_end: float
    n_points: int


def measure_decay_rate(traj: Trajectory, reference: SplayState,
                       window: tuple[float, float] = FIT_WINDOW) -> DecayFit:
    """Exponential rate of the transverse deviation from a splay solution.

    The deviation at each stored time is the state minus the rotating
    reference; its projection onto the global phase-shift direction (the
    constant vector on the phase block) is removed, since that neutral mode
    would flatten the fit.  The rate is the slope of log-norm versus time
    over the samples whose norm lies inside ``window``.
    """
    deviation = traj.samples - reference_samples(reference, traj.model, traj.times)
    n = traj.n
    # Fold phase deviations into (-pi, pi]: a state sitting just across the
    # branch cut must not register as a 2*pi excursion.
    deviation[:, :n] = np.mod(deviation[:, :n] + np.pi, 2.0 * np.pi) - np.pi
    deviation[:, :n] -= deviation[:, :n].mean(axis=1, keepdims=True)
    norms = np.linalg.norm(deviation, axis=1)
    mask = (norms >= window[0]) & (norms <= window[1])
    if int(mask.sum()) < 8:
        raise NoLinearRegimeError(
            f"only {int(mask.sum())} samples inside the fit window {window}"
        )
    t = traj.times[mask]
    slope = np.polyfit(t, np.log(norms[mask]), 1)[0]
    return DecayFit(rate=float(slope), t_start=float(t[0]), t_end=float(t[-1]),
                    n_points=int(mask.sum()))


def transverse_perturbation(reference: SplayState, params: ModelParams,
                            size: float = 1e-4,
                            rng: np.random.Generator | None = None,
                            direction: np.ndarray | None = None,
                            velocity_direction: np.ndarray | None = None) -> np.ndarray:
    """Packed initial state for a decay study: rotating solution plus kick.

    The phase kick lives in the orthogonal complement of the splay tangent
    space (the directions that actually leave the manifold) and has its
    mean-phase component removed.  For second-order models an optional
    velocity kick, projected the same way, can be supplied to select a
    specific transverse eigendirection.  The combined kick is normalised
    to ``size``; weights and unkicked velocities start exactly on the
    rotating solution.
    """
    if size <= 0:
        raise ValueError("perturbation size must be positive")
    basis = splay_tangent_basis(reference.theta, reference.m)
    n = reference.n
    tangent = basis.vectors

    def _project(vec: np.ndarray) -> np.ndarray:
        out = np.asarray(vec, dtype=float).copy()
        if tangent.size:
            out -= tangent.T @ (tangent @ out)
        out -= out.mean()
        return out

    if direction is None:
        if rng is None:
            rng = np.random.default_rng(0)
        direction = rng.standard_normal(n)
    kick = _project(direction)
    vel_kick = None
    if velocity_direction is not None:
        vel_kick = _project(velocity_direction)
    norm = float(np.hypot(np.linalg.norm(kick),
                          0.0 if vel_kick is None else np.linalg.norm(vel_kick)))
    if norm < 1e-12:
        raise ValueError("perturbation direction lies in the tangent space")

    base = pack_state(steady_state(reference.theta, params), params)
    base[:n] += (size / norm) * kick
    if vel_kick is not None:
        if base.size != 2 * n:
            raise ValueError("velocity kicks apply to the second-order model only")
        base[n:] += (size / norm) * vel_kick
    return base


def decay_study(reference: SplayState, params: ModelParams, *,
                dt: float = 1e-3, t_end: float = 50.0, stride: int = 10,
                size: float = 1e-4, window: tuple[float, float] = FIT_WINDOW,
                rng: np.random.Generator | None = None,
                direction: np.ndarray | None = None,
                velocity_direction: np.ndarray | None = None) -> tuple[Trajectory, DecayFit]:
    """Convenience wrapper: perturb, integrate, and fit the decay rate."""
    x0 = transverse_perturbation(reference, params, size=size, rng=rng,
                                 direction=direction,
                                 velocity_direction=velocity_direction)
    traj = integrate(x0, params, dt=dt, t_end=t_end, stride=stride,
                     n=reference.n)
    return traj, measure_decay_rate(traj, reference, window=window)


def trajectory_csv_header(traj: Trajectory) -> list[str]:
    """Column names: t, phi_0.., then psi_* or kappa_* when present."""
    cols = ["t"] + [f"phi_{i}" for i in range(traj.n)]
    extra = traj.samples.shape[1] - traj.n
    if extra:
        prefix = "psi" if traj.samples.shape[1] == 2 * traj.n else "kappa"
        cols += [f"{prefix}_{i}" for i in range(extra)]
    return cols
