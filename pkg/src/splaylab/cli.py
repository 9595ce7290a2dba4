"""Command-line front end.

Subcommands:

* ``sample``    - emit splay states as JSON
* ``stability`` - single-state stability report, JSON on stdout
* ``sweep``     - CSV grids of the analytic classifiers (optional oracle)
* ``simulate``  - trajectory CSV plus measured frequency and decay rate
* ``boundary``  - oscillatory-boundary curve CSV for figure overlays
* ``verify``    - the analytic-versus-oracle suite; exit 0 iff all pass

Exit codes: 0 success, 1 verification failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import construct, dynamics, models, oracle, serialize, stability, sweep, verify


_MODEL_DEFAULTS = {"omega": 1.0, "alpha": 0.0, "sigma": 1.0, "gamma": 1.0,
                   "p": 1.0, "m_inertia": 1.0, "epsilon": 1.0, "beta": 0.0}


def _model_params(args, embedded: dict | None = None) -> models.ModelParams:
    """Build model parameters from flags, falling back to an embedded model.

    Explicitly passed flags always win; unset fields come from the embedded
    model (when its kind matches) and finally from the defaults.
    """
    kind = args.model
    base = dict(_MODEL_DEFAULTS)
    if embedded is not None:
        if kind is None:
            kind = embedded.get("kind")
        if kind == embedded.get("kind"):
            base.update({k: v for k, v in embedded.items() if k != "kind"})
    kind = kind or "ks"
    for key in _MODEL_DEFAULTS:
        flag = getattr(args, key)
        if flag is not None:
            base[key] = flag
    if kind == "ks":
        return models.KuramotoSakaguchi(omega=base["omega"], alpha=base["alpha"],
                                        sigma=base["sigma"])
    if kind == "inertia":
        return models.Inertia(gamma=base["gamma"], p=base["p"],
                              alpha=base["alpha"], sigma=base["sigma"],
                              m_inertia=base["m_inertia"])
    if kind == "adaptive":
        return models.Adaptive(omega=base["omega"], epsilon=base["epsilon"],
                               alpha=base["alpha"], beta=base["beta"],
                               sigma=base["sigma"])
    raise sweep.ConfigError(f"unknown model {kind!r}")


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=("ks", "inertia", "adaptive"),
                        default=None)
    for name in ("omega", "alpha", "sigma", "gamma", "p", "m-inertia",
                 "epsilon", "beta"):
        parser.add_argument(f"--{name}", type=float, default=None)


def _add_source_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=4, help="oscillator count")
    parser.add_argument("--m", type=int, default=None,
                        help="splay moment (default: the model's natural moment)")
    parser.add_argument("--method", choices=("twisted", "random", "antipodal"),
                        default="twisted")
    parser.add_argument("--k", type=int, default=1, help="twist winding number")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--deltas", type=str, default="0.0",
                        help="comma-separated antipodal pair offsets")


def _build_state(args, moment: int) -> construct.SplayState:
    if args.method == "twisted":
        return construct.twisted_state(args.n, args.k, m=moment)
    if args.method == "random":
        return construct.random_splay(args.n, moment, seed=args.seed)
    deltas = [float(v) for v in args.deltas.split(",") if v.strip() != ""]
    return construct.antipodal_pairs_family(args.n, deltas)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _cmd_sample(args) -> int:
    params = _model_params(args)
    moment = args.m if args.m is not None else models.natural_moment(params)
    state = _build_state(args, moment)
    _emit(serialize.dumps(serialize.state_to_dict(state.theta, params)), args.out)
    return 0


def _state_report(theta: models.PhaseConfiguration,
                  params: models.ModelParams, band: float,
                  with_oracle: bool) -> stability.StabilityReport:
    if isinstance(params, models.KuramotoSakaguchi):
        report = stability.ks_stability(params.alpha, theta, params.sigma, band)
        blocks = models.model_jacobian(theta, params)
    else:
        blocks = models.model_jacobian(theta, params)
        if isinstance(params, models.Inertia):
            roots = stability.inertia_eigenvalues(params.unit_inertia().gamma,
                                                  blocks.traces)
        else:
            roots = stability.adaptive_quartic(blocks.traces, params.epsilon).roots
        eigs = tuple(sorted((complex(z) for z in roots),
                            key=lambda z: (-z.real, -z.imag)))
        max_re = max(z.real for z in eigs)
        report = stability.StabilityReport(
            analytic_eigenvalues=eigs,
            classification=stability.classify_roots(eigs, band),
            max_real_part=float(max_re),
            boundary_distance=-float(max_re))
    if with_oracle:
        full = models.variational_matrix(blocks, params)
        spectrum = oracle.dense_eigenvalues(full)
        rep = oracle.spectrum_compare(report.analytic_eigenvalues, spectrum,
                                      tol=1e-6)
        report = stability.StabilityReport(
            analytic_eigenvalues=report.analytic_eigenvalues,
            classification=report.classification,
            max_real_part=report.max_real_part,
            boundary_distance=report.boundary_distance,
            residual_vs_oracle=rep.max_distance)
    return report


def _cmd_stability(args) -> int:
    with open(args.state) as handle:
        doc = json.load(handle)
    theta, _ = serialize.state_from_dict(doc)
    params = _model_params(args, embedded=doc.get("model"))
    report = _state_report(theta, params, args.band, args.oracle)
    _emit(serialize.dumps(serialize.report_to_dict(report)), args.out)
    return 0


def _parse_axis(text: str) -> sweep.Axis:
    parts = text.split(":")
    if len(parts) != 4:
        raise sweep.ConfigError(f"axis spec {text!r} is not name:min:max:count")
    return sweep.Axis(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))


def _cmd_sweep(args) -> int:
    doc = {}
    if args.config:
        with open(args.config) as handle:
            doc = json.load(handle)
    if args.model:
        doc["model"] = args.model
    if args.axis:
        doc["axes"] = [vars(_parse_axis(a)) for a in args.axis]
    for item in args.fixed or []:
        key, _, value = item.partition("=")
        doc.setdefault("fixed", {})[key] = float(value)
    if args.source:
        parts = args.source.split(":")
        src = {"kind": parts[0]}
        if len(parts) > 1:
            src["n"] = int(parts[1])
        if len(parts) > 2:
            src["k"] = int(parts[2])
        doc["source"] = src
    if args.seeds:
        doc.setdefault("source", {"kind": "random"})
        doc["source"]["seeds"] = [int(s) for s in args.seeds.split(",")]
    if args.oracle:
        doc["oracle"] = True
    if args.band is not None:
        doc["band"] = args.band
    if args.out:
        doc["output"] = args.out
    if args.jobs is not None:
        doc["jobs"] = args.jobs
    doc.setdefault("jobs", sweep.default_jobs())

    config = sweep.SweepConfig(
        model=doc.get("model", ""),
        axes=tuple(sweep.Axis(**a) for a in doc.get("axes", [])),
        fixed=doc.get("fixed", {}),
        source=sweep.StateSource(**doc.get("source", {})),
        oracle=bool(doc.get("oracle", False)),
        band=float(doc.get("band", stability.BOUNDARY_BAND)),
        output=doc.get("output"),
        jobs=int(doc.get("jobs", 1)),
    )
    rows = sweep.run_sweep(config)
    if not config.output:
        print(sweep.csv_header(config))
        for row in rows:
            print(sweep.row_to_csv(row))
    return 0


def _cmd_simulate(args) -> int:
    params = _model_params(args)
    moment = args.m if args.m is not None else models.natural_moment(params)
    state = _build_state(args, moment)
    reference = construct.bind_model(state, params)

    result: dict = {"omega_analytic": models.collective_frequency(state.theta, params)}
    steady = models.steady_state(state.theta, params)
    base_traj = dynamics.integrate(steady, params, dt=args.dt, t_end=args.t_end,
                                   stride=args.stride)
    result["omega_measured"] = dynamics.measure_frequency(base_traj)
    traj = base_traj
    if args.perturb is not None:
        result["analytic_rate"] = verify.analytic_rate(reference, params)
        traj, fit = dynamics.decay_study(
            reference, params, dt=args.dt, t_end=args.t_end, stride=args.stride,
            size=args.perturb, rng=np.random.default_rng(args.seed))
        result["decay_rate"] = fit.rate

    if args.out:
        header = dynamics.trajectory_csv_header(traj)
        with open(args.out, "w", newline="") as handle:
            handle.write(",".join(header) + "\n")
            for t, row in zip(traj.times, traj.samples):
                cells = [serialize.format_float(t)]
                cells += [serialize.format_float(v) for v in row]
                handle.write(",".join(cells) + "\n")
    print(serialize.dumps(result))
    return 0


def _cmd_boundary(args) -> int:
    values = np.linspace(args.min, args.max, args.count)
    rows = sweep.boundary_table(args.model, gamma=args.gamma, sigma=args.sigma,
                                axis_values=values)
    sweep.write_boundary_csv(rows, args.out)
    return 0


def _cmd_verify(args) -> int:
    results = verify.run_all(quick=args.quick)
    for result in results:
        mark = "PASS" if result.passed else "FAIL"
        print(f"{mark} {result.name} ({result.seconds:.1f}s): {result.detail}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splaylab",
        description="Splay states of phase-oscillator networks: construction, "
                    "closed-form stability, numeric oracles, sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="emit a splay state as JSON")
    _add_model_flags(p_sample)
    _add_source_flags(p_sample)
    p_sample.add_argument("--out", default=None)
    p_sample.set_defaults(fn=_cmd_sample)

    p_stab = sub.add_parser("stability", help="stability report for a state file")
    _add_model_flags(p_stab)
    p_stab.add_argument("--state", required=True, help="state JSON path")
    p_stab.add_argument("--band", type=float, default=stability.BOUNDARY_BAND)
    p_stab.add_argument("--oracle", action="store_true",
                        help="cross-check against the dense eigensolver")
    p_stab.add_argument("--out", default=None)
    p_stab.set_defaults(fn=_cmd_stability)

    p_sweep = sub.add_parser("sweep", help="evaluate a classifier grid to CSV")
    p_sweep.add_argument("--config", default=None, help="JSON config path")
    p_sweep.add_argument("--model", default=None,
                         choices=tuple(sweep.MODEL_AXES))
    p_sweep.add_argument("--axis", action="append",
                         help="name:min:max:count (repeat, up to three)")
    p_sweep.add_argument("--fixed", action="append", help="name=value (repeat)")
    p_sweep.add_argument("--source", default=None,
                         help="state source kind[:n[:k]]")
    p_sweep.add_argument("--seeds", default=None, help="comma-separated seeds")
    p_sweep.add_argument("--oracle", action="store_true")
    p_sweep.add_argument("--band", type=float, default=None)
    p_sweep.add_argument("--jobs", type=int, default=None,
                         help=f"parallel workers (default ${sweep.JOBS_ENV_VAR} or 1)")
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_sim = sub.add_parser("simulate", help="integrate and measure a splay state")
    _add_model_flags(p_sim)
    _add_source_flags(p_sim)
    p_sim.add_argument("--dt", type=float, default=1e-3)
    p_sim.add_argument("--t-end", type=float, default=50.0)
    p_sim.add_argument("--stride", type=int, default=10)
    p_sim.add_argument("--perturb", type=float, default=None,
                       help="transverse kick size; enables the decay-rate fit")
    p_sim.add_argument("--out", default=None, help="trajectory CSV path")
    p_sim.set_defaults(fn=_cmd_simulate)

    p_bound = sub.add_parser("boundary",
                             help="oscillatory-boundary curve as CSV")
    p_bound.add_argument("--model", required=True,
                         choices=("ks-inertia", "inertia-generic"))
    p_bound.add_argument("--gamma", type=float, required=True)
    p_bound.add_argument("--sigma", type=float, default=1.0)
    p_bound.add_argument("--min", type=float, required=True)
    p_bound.add_argument("--max", type=float, required=True)
    p_bound.add_argument("--count", type=int, default=200)
    p_bound.add_argument("--out", required=True)
    p_bound.set_defaults(fn=_cmd_boundary)

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("--quick", action="store_true",
                          help="reduced sizes, finishes in well under a minute")
    p_verify.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (sweep.ConfigError, models.ShapeMismatchError,
            models.SplayConditionError, FileNotFoundError, ValueError) as exc:
        parser.exit(2, f"splaylab: error: {exc}\n")
        return 2  # unreachable; parser.exit raises SystemExit


if __name__ == "__main__":
    sys.exit(main())
