"""Parameter-sweep engine: grid evaluation of the analytic classifiers with
optional numeric cross-checks, emitted as deterministic CSV.

Grid points are embarrassingly parallel; workers receive only the immutable
config, results are buffered and written in row-major grid order, and every
float is printed with 17 significant digits, so identical configs produce
byte-identical CSV regardless of the parallelism degree.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import construct, models, oracle, stability
from .serialize import format_float

#: Environment variable read for the default parallelism degree.
JOBS_ENV_VAR = "SPLAYLAB_JOBS"

AXIS_NAMES = {"alpha", "gamma", "sigma", "epsilon", "beta", "r2", "trL", "trL2", "delta"}

MODEL_AXES = {
    "planar": {"trL", "trL2"},
    "inertia": {"trL", "trL2", "gamma"},
    "ks": {"alpha", "sigma", "r2", "delta"},
    "ks-inertia": {"alpha", "gamma", "sigma", "r2", "delta"},
    "adaptive": {"alpha", "beta", "epsilon", "sigma"},
}

#: Models whose transverse spectrum has two eigenvalues; the rest have four.
PLANAR_MODELS = {"planar", "ks"}


class ConfigError(ValueError):
    """Invalid sweep configuration (reported as a usage error by the CLI)."""


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ConfigError(f"unknown axis {self.name!r}; pick from {sorted(AXIS_NAMES)}")
        if self.count < 2:
            raise ConfigError("each axis needs at least two grid points")
        if not np.isfinite(self.min) or not np.isfinite(self.max):
            raise ConfigError("axis bounds must be finite")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class StateSource:
    """Where concrete splay states for a sweep come from.

    ``twisted``   - the equidistant state (n, k), fixed across the grid.
    ``antipodal`` - the antipodal-pairs family; the grid's delta axis is the
                    free pair offset (n = 4).
    ``random``    - a seeded random splay state, fixed across the grid
                    unless one seed per grid point is supplied.
    ``none``      - abstract sweep, no concrete state (oracle unavailable).
    """

    kind: str = "none"
    n: int = 4
    k: int = 1
    seeds: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.kind not in ("none", "twisted", "antipodal", "random"):
            raise ConfigError(f"unknown state source {self.kind!r}")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))


@dataclass(frozen=True)
class SweepConfig:
    model: str
    axes: tuple[Axis, ...]
    fixed: dict = field(default_factory=dict)
    source: StateSource = StateSource()
    oracle: bool = False
    band: float = stability.BOUNDARY_BAND
    output: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.model not in MODEL_AXES:
            raise ConfigError(f"unknown model kind {self.model!r}; "
                              f"pick from {sorted(MODEL_AXES)}")
        axes = tuple(self.axes)
        if not 1 <= len(axes) <= 3:
            raise ConfigError("a sweep takes between one and three axes")
        allowed = MODEL_AXES[self.model]
        for axis in axes:
            if axis.name not in allowed:
                raise ConfigError(
                    f"axis {axis.name!r} is not a parameter of model {self.model!r}")
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise ConfigError("axis names must be distinct")
        object.__setattr__(self, "axes", axes)
        for key in self.fixed:
            if key not in AXIS_NAMES:
                raise ConfigError(f"unknown fixed parameter {key!r}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    @property
    def n_points(self) -> int:
        return int(np.prod(self.shape))


@dataclass(frozen=True)
class SweepRow:
    indices: tuple[int, ...]
    values: tuple[float, ...]
    classification: stability.Classification
    max_re: float
    eigenvalues: tuple[complex, ...]
    oracle_max_re: float | None
    agree: str  # "true" | "false" | "na"


def csv_header(config: SweepConfig) -> str:
    cols = [f"idx{i}" for i in range(len(config.axes))]
    cols += [a.name for a in config.axes]
    cols += ["class", "max_re"]
    pairs = 2 if config.model in PLANAR_MODELS else 4
    for i in range(1, pairs + 1):
        cols += [f"re{i}", f"im{i}"]
    cols += ["oracle_max_re", "agree"]
    return ",".join(cols)


def row_to_csv(row: SweepRow) -> str:
    parts = [str(i) for i in row.indices]
    parts += [format_float(v) for v in row.values]
    parts += [row.classification.value, format_float(row.max_re)]
    for z in row.eigenvalues:
        parts += [format_float(z.real), format_float(z.imag)]
    parts.append("na" if row.oracle_max_re is None else format_float(row.oracle_max_re))
    parts.append(row.agree)
    return ",".join(parts)


# ---------------------------------------------------------------------------
# Point evaluation
# ---------------------------------------------------------------------------


def _point_parameters(config: SweepConfig, indices: tuple[int, ...]) -> dict:
    values = {"sigma": 1.0}
    values.update(config.fixed)
    for axis, idx in zip(config.axes, indices):
        values[axis.name] = float(axis.values()[idx])
    return values


def _grid_state(config: SweepConfig, values: dict) -> construct.SplayState | None:
    """Concrete splay state for this grid point, if the config defines one."""
    source = config.source
    moment = 2 if config.model == "adaptive" else 1
    if "delta" in values:
        if source.kind not in ("antipodal", "none"):
            raise ConfigError("a delta axis implies the antipodal-pairs family")
        return construct.antipodal_pairs_family(4, [values["delta"]])
    if source.kind == "twisted":
        return construct.twisted_state(source.n, source.k, m=moment)
    if source.kind == "random":
        return construct.random_splay(source.n, moment, seed=source.seeds[0])
    if source.kind == "antipodal":
        raise ConfigError("the antipodal source needs a delta axis")
    return None


def _per_point_state(config: SweepConfig, flat_index: int,
                     values: dict) -> construct.SplayState | None:
    source = config.source
    if source.kind == "random" and len(source.seeds) == config.n_points:
        moment = 2 if config.model == "adaptive" else 1
        return construct.random_splay(source.n, moment,
                                      seed=source.seeds[flat_index])
    return _grid_state(config, values)


def _require(values: dict, keys: tuple[str, ...], model: str) -> None:
    missing = [k for k in keys if k not in values]
    if missing:
        raise ConfigError(f"model {model!r} needs {missing} as an axis or fixed value")


def _oracle_max_re(matrix: np.ndarray, n: int) -> float:
    return oracle.nontrivial_max_real(oracle.dense_eigenvalues(matrix), n - 2)


def evaluate_point(config: SweepConfig, flat_index: int) -> SweepRow:
    """Classify one grid point; pure function of (config, flat_index)."""
    indices = tuple(int(i) for i in np.unravel_index(flat_index, config.shape))
    values = _point_parameters(config, indices)
    state = _per_point_state(config, flat_index, values)
    oracle_max: float | None = None
    applicable = True

    if config.model == "planar":
        _require(values, ("trL", "trL2"), "planar")
        traces = models.TraceSet(trL=values["trL"], trL2=values["trL2"])
        eigs = stability.transverse_eigenvalues(traces)
        cls = stability.classify_planar(traces, config.band)

    elif config.model == "inertia":
        _require(values, ("gamma", "trL", "trL2"), "inertia")
        traces = models.TraceSet(trL=values["trL"], trL2=values["trL2"])
        eigs = tuple(stability.inertia_eigenvalues(values["gamma"], traces))
        cls = stability.classify_roots(eigs, config.band)

    elif config.model == "ks":
        _require(values, ("alpha",), "ks")
        # an explicit r2 axis/value makes the sweep abstract: any concrete
        # state would carry a different R_2, so the oracle stays off
        if "r2" in values:
            r2, state = values["r2"], None
        elif state is not None:
            r2 = state.r2
        else:
            raise ConfigError("ks sweep needs an r2 axis/value or a state source")
        eigs = stability.ks_eigenvalues(values["alpha"], values["sigma"], r2)
        cls = stability.classify_planar(
            stability.ks_traces(values["alpha"], values["sigma"], r2), config.band)
        if config.oracle and state is not None:
            params = models.KuramotoSakaguchi(omega=0.0, alpha=values["alpha"],
                                              sigma=values["sigma"])
            blocks = models.model_jacobian(state.theta, params)
            oracle_max = _oracle_max_re(blocks.l_matrix, state.n)

    elif config.model == "ks-inertia":
        _require(values, ("alpha", "gamma"), "ks-inertia")
        if "r2" in values:
            r2, state = values["r2"], None
        elif state is not None:
            r2 = state.r2
        else:
            raise ConfigError("ks-inertia sweep needs an r2 axis/value or a state source")
        eigs = tuple(stability.ks_inertia_eigenvalues(
            values["gamma"], values["alpha"], values["sigma"], r2))
        cls = stability.classify_roots(eigs, config.band)
        if config.oracle and state is not None:
            params = models.Inertia(gamma=values["gamma"], p=values["gamma"],
                                    alpha=values["alpha"], sigma=values["sigma"])
            blocks = models.model_jacobian(state.theta, params, m=1)
            full = models.variational_matrix(blocks, params)
            oracle_max = _oracle_max_re(full, state.n)

    elif config.model == "adaptive":
        _require(values, ("alpha", "beta", "epsilon"), "adaptive")
        if state is None:
            raise ConfigError("adaptive sweep needs a twisted or random state source")
        params = models.Adaptive(omega=0.0, epsilon=values["epsilon"],
                                 alpha=values["alpha"], beta=values["beta"],
                                 sigma=values["sigma"])
        blocks = models.model_jacobian(state.theta, params, m=2)
        quartic = stability.adaptive_quartic(blocks.traces, values["epsilon"],
                                             config.band)
        eigs = tuple(quartic.roots)
        cls = stability.classify_roots(eigs, config.band)
        # the trace quartic only classifies states whose tangent space is
        # annihilated by both blocks; elsewhere it carries no claim
        basis = construct.splay_tangent_basis(state.theta, 2)
        applicable = stability.reduction_applicable(blocks, basis).applicable
        if config.oracle:
            full = models.variational_matrix(blocks, params)
            oracle_max = _oracle_max_re(full, state.n)

    else:  # pragma: no cover - guarded by SweepConfig
        raise ConfigError(f"unknown model kind {config.model!r}")

    eigs = tuple(sorted((complex(z) for z in eigs),
                        key=lambda z: (-z.real, -z.imag)))
    max_re = max(z.real for z in eigs)
    agree = _agreement(cls, max_re, oracle_max, config.band) if applicable else "na"
    return SweepRow(indices=indices,
                    values=tuple(values[a.name] for a in config.axes),
                    classification=cls, max_re=float(max_re),
                    eigenvalues=eigs, oracle_max_re=oracle_max, agree=agree)


def _verdict(max_re: float, band: float) -> str:
    if abs(max_re) <= band:
        return "marginal"
    return "stable" if max_re < 0 else "unstable"


def _agreement(cls: stability.Classification, max_re: float,
               oracle_max: float | None, band: float) -> str:
    if oracle_max is None:
        return "na"
    analytic = "marginal" if cls is stability.Classification.MARGINAL \
        else _verdict(max_re, band)
    numeric = _verdict(oracle_max, band)
    if analytic == "marginal" or numeric == "marginal" or analytic == numeric:
        return "true"
    return "false"


# ---------------------------------------------------------------------------
# Grid execution
# ---------------------------------------------------------------------------


def _eval_chunk(args: tuple[SweepConfig, int, int]) -> list[SweepRow]:
    config, start, stop = args
    return [evaluate_point(config, i) for i in range(start, stop)]


def default_jobs() -> int:
    env = os.environ.get(JOBS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """Evaluate every grid point in row-major order and optionally write CSV.

    The row list (and any CSV output) is identical for every parallelism
    degree: workers compute pure functions of (config, index) and the writer
    assembles chunks in submission order.
    """
    total = config.n_points
    jobs = max(1, config.jobs)
    if jobs == 1 or total < 4 * jobs:
        rows = [evaluate_point(config, i) for i in range(total)]
    else:
        chunk = max(1, -(-total // (jobs * 8)))
        ranges = [(config, s, min(s + chunk, total)) for s in range(0, total, chunk)]
        rows = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_eval_chunk, ranges):
                rows.extend(part)
    if config.output:
        write_csv(config, rows, config.output)
    return rows


def write_csv(config: SweepConfig, rows: list[SweepRow], path: str) -> None:
    try:
        with open(path, "w", newline="") as handle:
            handle.write(csv_header(config) + "\n")
            for row in rows:
                handle.write(row_to_csv(row) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write sweep output to {path!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# Boundary tables for figure overlays
# ---------------------------------------------------------------------------


def boundary_table(model_kind: str, *, gamma: float, sigma: float = 1.0,
                   axis_values: np.ndarray) -> list[dict]:
    """Oscillatory-boundary points along an axis, for CSV export.

    For ``ks-inertia`` the axis is alpha and each row carries the boundary
    R_2^2 (plus R_2 and delta = arccos(R_2), the antipodal-family coordinate,
    when the value is physical).  For ``inertia-generic`` the axis is trL and
    each row carries the boundary Tr(L^2).  Rows where no oscillatory
    crossing exists are skipped.
    """
    rows = []
    for value in axis_values:
        try:
            if model_kind == "ks-inertia":
                point = stability.hopf_boundary("ks-inertia", gamma=gamma,
                                                sigma=sigma, alpha=float(value))
                r2sq = point.location["r2_squared"]
                row = {"alpha": float(value), "r2_squared": r2sq,
                       "v": point.crossing_frequency,
                       "residual": point.quartic_residual,
                       "printed_r2_squared": point.printed_value,
                       "printed_residual": point.printed_residual}
                if 0.0 <= r2sq <= 1.0:
                    row["r2"] = float(np.sqrt(r2sq))
                    row["delta"] = float(np.arccos(row["r2"]))
                rows.append(row)
            elif model_kind == "inertia-generic":
                point = stability.hopf_boundary("inertia-generic", gamma=gamma,
                                                trL=float(value))
                rows.append({"trL": float(value),
                             "trL2": point.location["trL2"],
                             "v": point.crossing_frequency,
                             "residual": point.quartic_residual,
                             "printed_trL2": point.printed_value,
                             "printed_residual": point.printed_residual})
            else:
                raise ConfigError(f"unknown boundary model {model_kind!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            continue  # no crossing at this axis value
    return rows


def write_boundary_csv(rows: list[dict], path: str) -> None:
    if not rows:
        raise ConfigError("the boundary table is empty over the requested range")
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(path, "w", newline="") as handle:
        handle.write(",".join(columns) + "\n")
        for row in rows:
            handle.write(",".join(
                format_float(row[c]) if c in row else "na" for c in columns) + "\n")
