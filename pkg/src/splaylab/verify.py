"""End-to-end verification suite: every closed-form result against its
numeric oracle.

Each check returns a CheckResult; the CLI prints one pass/fail line per
check and exits nonzero when any fails.  The full-scale variants are the
package's acceptance gate; ``quick=True`` shrinks grids and sample counts
to finish well under a minute.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import construct, dynamics, models, oracle, stability, sweep


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    seconds: float
    detail: str


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crashed check is a failed check
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CheckResult(name=name, passed=passed,
                       seconds=time.perf_counter() - start, detail=detail)


def _random_alpha(rng: np.random.Generator) -> float:
    """Phase lag bounded away from the degenerate cos(alpha) = 0 line."""
    while True:
        alpha = rng.uniform(0.0, 2.0 * np.pi)
        if abs(np.cos(alpha)) > 1e-3:
            return alpha


# ---------------------------------------------------------------------------
# 1. Reduced characteristic polynomial from traces
# ---------------------------------------------------------------------------


def check_reduced_polynomial(quick: bool = False) -> CheckResult:
    """Spectrum structure of random 1-splay Jacobians: exactly N - 2 zeros,
    and the two nontrivial eigenvalues carry sum Tr(L) and product
    (Tr(L)^2 - Tr(L^2))/2 to 1e-9 relative."""

    def run() -> tuple[bool, str]:
        sizes = (3, 5, 8) if quick else (3, 5, 8, 13, 20)
        per_size = 20 if quick else 100
        rng = np.random.default_rng(20260801)
        worst_sum = worst_prod = 0.0
        for n in sizes:
            for trial in range(per_size):
                state = construct.random_splay(n, 1, seed=int(rng.integers(2**63)))
                if 1.0 - state.r2 ** 2 < 1e-3:
                    continue  # near-degenerate product, relative error ill-posed
                alpha = _random_alpha(rng)
                params = models.KuramotoSakaguchi(omega=0.0, alpha=alpha)
                blocks = models.model_jacobian(state.theta, params)
                l_matrix = blocks.l_matrix
                w = oracle.dense_eigenvalues(l_matrix)
                n_zero = int(np.sum(np.abs(w) < 1e-8 * np.linalg.norm(l_matrix)))
                if n_zero != n - 2:
                    return False, f"N={n}: {n_zero} zero eigenvalues instead of {n - 2}"
                nontrivial = w[np.argsort(np.abs(w))][n - 2:]
                a1, a2 = stability.reduced_char_coeffs(l_matrix)
                tr = -a1
                s_err = abs(nontrivial.sum() - tr) / abs(tr)
                p_err = abs(nontrivial.prod() - a2) / abs(a2)
                worst_sum = max(worst_sum, s_err)
                worst_prod = max(worst_prod, p_err)
                if s_err > 1e-9 or p_err > 1e-9:
                    return False, (f"N={n} trial {trial}: sum err {s_err:.2e}, "
                                   f"product err {p_err:.2e}")
        return True, (f"sizes {sizes}, {per_size}/size: worst sum err "
                      f"{worst_sum:.2e}, worst product err {worst_prod:.2e}")

    return _timed("reduced-polynomial-traces", run)


# ---------------------------------------------------------------------------
# 2. Phase-lag stability verdicts and imaginary parts
# ---------------------------------------------------------------------------


def check_phase_lag_verdicts(quick: bool = False) -> CheckResult:
    """cos(alpha) < 0 decides stability for every 1-splay state, and the
    imaginary parts are +/- sqrt(sin^2 a - R_2^2)/2, both against the
    numeric spectrum of the actual Jacobian (N = 6)."""

    def run() -> tuple[bool, str]:
        n = 6
        per_alpha = 5 if quick else 20
        alphas = [0.05 * np.pi * k for k in range(1, 40)]
        alphas = [a for a in alphas if abs(np.cos(a)) >= 1e-3]
        checked = imag_checked = 0
        worst_imag = 0.0
        for alpha in alphas:
            for trial in range(per_alpha):
                state = construct.random_splay(n, 1, seed=trial * 1009 + 17)
                params = models.KuramotoSakaguchi(omega=0.0, alpha=alpha)
                blocks = models.model_jacobian(state.theta, params)
                w = oracle.dense_eigenvalues(blocks.l_matrix)
                oracle_max = oracle.nontrivial_max_real(w, n - 2)
                analytic_stable = np.cos(alpha) < 0
                if analytic_stable != (oracle_max < 0):
                    return False, (f"verdict mismatch at alpha={alpha:.4f}, "
                                   f"trial {trial}: oracle max re {oracle_max:.3e}")
                checked += 1
                gap = np.sin(alpha) ** 2 - state.r2 ** 2
                # the sqrt is ill-conditioned at gap ~ 0, so only well-inside
                # the focus region is the 1e-9 comparison meaningful
                if gap > 1e-6:
                    expected = 0.5 * np.sqrt(gap)
                    nontrivial = w[np.argsort(np.abs(w))][n - 2:]
                    err = abs(np.abs(nontrivial.imag).max() - expected)
                    worst_imag = max(worst_imag, err)
                    imag_checked += 1
                    if err > 1e-9:
                        return False, f"imaginary part off by {err:.2e} at alpha={alpha:.4f}"
        return True, (f"{checked} verdicts, 100% agreement; {imag_checked} "
                      f"imaginary-part checks, worst err {worst_imag:.2e}")

    return _timed("phase-lag-stability-verdicts", run)


# ---------------------------------------------------------------------------
# 3. Inertia quartic: two evaluations and the oscillatory boundary
# ---------------------------------------------------------------------------


def check_inertia_quartic(quick: bool = False) -> CheckResult:
    """On a (trL, trL2) grid per damping value: companion-matrix roots agree
    with the nested-radical evaluation (< 1e-9) with identical
    classifications; boundary points satisfy the quartic at mu = i*v to
    1e-9; the gamma-linear variant's residual is reported."""

    def run() -> tuple[bool, str]:
        gammas = (0.1, 0.5, 1.0, 5.0)
        grid_n = 60 if quick else 200
        trl_values = np.linspace(-3.0, 3.0, grid_n)
        trl2_values = np.linspace(-3.0, 6.0, grid_n)
        worst_gap = 0.0
        worst_residual = 0.0
        printed_residuals = []
        for gamma in gammas:
            for trl in trl_values:
                for trl2 in trl2_values:
                    traces = models.TraceSet(trL=float(trl), trL2=float(trl2))
                    roots_c = stability.inertia_eigenvalues(gamma, traces)
                    roots_n = stability.inertia_eigenvalues_nested(gamma, traces)
                    rep = oracle.spectrum_compare(roots_c, roots_n, tol=1e-9)
                    worst_gap = max(worst_gap, rep.max_distance)
                    if rep.max_distance >= 1e-9:
                        return False, (f"root gap {rep.max_distance:.2e} at "
                                       f"gamma={gamma}, trL={trl:.3f}, trL2={trl2:.3f}")
                    cls_c = stability.classify_roots(roots_c)
                    cls_n = stability.classify_roots(roots_n)
                    if cls_c is not cls_n:
                        return False, (f"classification flip {cls_c.value} vs "
                                       f"{cls_n.value} at gamma={gamma}, "
                                       f"trL={trl:.3f}, trL2={trl2:.3f}")
            for trl in trl_values[trl_values < 0]:
                point = stability.hopf_boundary("inertia-generic", gamma=gamma,
                                                trL=float(trl))
                worst_residual = max(worst_residual, point.quartic_residual)
                if point.quartic_residual >= 1e-9:
                    return False, (f"boundary residual {point.quartic_residual:.2e} "
                                   f"at gamma={gamma}, trL={trl:.3f}")
                printed_residuals.append(point.printed_residual)
        reference = stability.hopf_boundary("inertia-generic", gamma=0.5, trL=-1.0)
        if abs(reference.printed_residual - 0.125) > 1e-12:
            return False, (f"gamma-linear variant residual at (0.5, -1) is "
                           f"{reference.printed_residual!r}, expected 0.125")
        printed = np.asarray(printed_residuals)
        return True, (f"{len(gammas)}x{grid_n}x{grid_n} grid, worst root gap "
                      f"{worst_gap:.2e}; boundary residual max {worst_residual:.2e}; "
                      f"gamma-linear variant residual mean {printed.mean():.3f} "
                      f"(0.125 at gamma=0.5, trL=-1)")

    return _timed("inertia-quartic-roots-and-boundaries", run)


# ---------------------------------------------------------------------------
# 4. Phase-lag model with inertia on the antipodal-pairs family
# ---------------------------------------------------------------------------


def check_inertia_phase_lag_grid(quick: bool = False) -> CheckResult:
    """Quartic classification against the full 2N x 2N spectrum across an
    (alpha, delta) grid for four damping values; the stable area must not
    shrink as damping grows."""

    def run() -> tuple[bool, str]:
        gammas = (0.1, 0.5, 1.0, 3.0)
        grid_n = 30 if quick else 100
        stable_counts = []
        for gamma in gammas:
            config = sweep.SweepConfig(
                model="ks-inertia",
                axes=(sweep.Axis("alpha", 0.0, 2.0 * np.pi, grid_n),
                      sweep.Axis("delta", 0.0, 0.5 * np.pi, grid_n)),
                fixed={"gamma": gamma, "sigma": 1.0},
                source=sweep.StateSource(kind="antipodal", n=4),
                oracle=True,
                band=1e-4,
                jobs=1,
            )
            rows = sweep.run_sweep(config)
            bad = [r for r in rows if r.agree == "false"]
            if bad:
                r = bad[0]
                return False, (f"gamma={gamma}: {len(bad)} grid points disagree "
                               f"with the oracle, first at indices {r.indices} "
                               f"(max_re {r.max_re:.3e}, oracle {r.oracle_max_re:.3e})")
            stable_counts.append(sum(r.classification.is_stable for r in rows))
        if any(b < a for a, b in zip(stable_counts, stable_counts[1:])):
            return False, f"stable area not monotone in damping: {stable_counts}"
        return True, (f"4x{grid_n}x{grid_n} points all agree with the 8x8 "
                      f"oracle; stable-cell counts {stable_counts} are "
                      f"nondecreasing in damping")

    return _timed("inertia-phase-lag-grid-vs-oracle", run)


# ---------------------------------------------------------------------------
# 5. Adaptive model: spectrum decomposition and quartic
# ---------------------------------------------------------------------------


def check_adaptive_spectrum(quick: bool = False) -> CheckResult:
    """Full (N + N^2) adaptive spectra decompose into N - 2 zeros,
    (N^2 - N) + (N - 2) eigenvalues at -eps, and the four quartic roots;
    the kernel condition holds; and with Tr(L) = Tr(L^2) = Tr(L Lt) = 0 the
    adaptive quartic equals the inertial one under (gamma, L) -> (eps, Lt)."""

    def run() -> tuple[bool, str]:
        per_combo = 5 if quick else 20
        alpha = 0.9
        worst_root = 0.0
        for n in (4, 6):
            for eps in (0.1, 1.0):
                for seed in range(per_combo):
                    state = construct.random_splay(n, 2, seed=seed)
                    params = models.Adaptive(omega=0.0, epsilon=eps,
                                             alpha=alpha, beta=alpha)
                    blocks = models.model_jacobian(state.theta, params)
                    basis = construct.splay_tangent_basis(state.theta, 2)
                    kernel = stability.reduction_applicable(blocks, basis)
                    if not kernel.applicable:
                        return False, (f"kernel condition fails at n={n}, "
                                       f"eps={eps}, seed={seed}")
                    full = models.variational_matrix(blocks, params)
                    w = oracle.dense_eigenvalues(full)
                    scale = max(1.0, float(np.abs(w).max()))
                    zeros = int(np.sum(np.abs(w) < 1e-8 * scale))
                    at_eps = int(np.sum(np.abs(w + eps) < 1e-7 * scale))
                    if zeros != n - 2 or at_eps != (n * n - n) + (n - 2):
                        return False, (f"spectrum structure off at n={n}, eps={eps}, "
                                       f"seed={seed}: {zeros} zeros, {at_eps} at -eps")
                    quartic = stability.adaptive_quartic(blocks.traces, eps)
                    rest = sorted(w, key=lambda z: min(abs(z), abs(z + eps)))[-4:]
                    rep = oracle.spectrum_compare(quartic.roots, rest, tol=1e-6)
                    worst_root = max(worst_root, rep.max_distance)
                    if not rep.all_matched:
                        return False, (f"quartic roots miss the spectrum by "
                                       f"{rep.max_distance:.2e} at n={n}, eps={eps}, "
                                       f"seed={seed}")
        rng = np.random.default_rng(7)
        for eps in (0.1, 0.7, 1.3):
            t, u = rng.uniform(-2, 2), rng.uniform(-2, 2)
            reduced = models.TraceSet(trL=0.0, trL2=0.0, trLt=t, trLt2=u, trLLt=0.0)
            lifted = stability.adaptive_quartic_coeffs(reduced, eps)
            inertial = stability.inertia_quartic_coeffs(
                eps, models.TraceSet(trL=t, trL2=u))
            if not np.array_equal(lifted, inertial):
                return False, f"coefficient reduction not exact at eps={eps}"
        return True, (f"spectra decompose exactly for n in (4, 6), eps in "
                      f"(0.1, 1.0), {per_combo} states each; worst quartic-root "
                      f"distance {worst_root:.2e}; trace-zero reduction exact")

    return _timed("adaptive-spectrum-decomposition", run)


# ---------------------------------------------------------------------------
# 6. Simulation concordance
# ---------------------------------------------------------------------------


def _simulation_cases() -> list[dict]:
    """Ten decay/growth studies spanning all three models.

    ``defective`` marks cases whose dominant eigenvalue is defective
    (polynomial transients widen the tolerance to 10%).
    """
    t41 = construct.twisted_state(4, 1)
    t51 = construct.twisted_state(5, 1)
    t61 = construct.twisted_state(6, 1)
    t52 = construct.twisted_state(5, 1, m=2)
    anti = construct.antipodal_pairs_family(4, [np.pi / 3])
    eig_dir = construct.transverse_directions(t41.theta, 1)[0]

    def ks(alpha, omega=0.7, sigma=1.0):
        return models.KuramotoSakaguchi(omega=omega, alpha=alpha, sigma=sigma)

    cases = [
        dict(name="ks stable node", ref=t41, params=ks(np.pi, omega=1.3),
             t_end=60.0),
        dict(name="ks stable focus", ref=t51, params=ks(0.75 * np.pi),
             t_end=80.0),
        dict(name="ks growth", ref=t61, params=ks(0.0, omega=1.0), t_end=30.0,
             size=1e-6, window=(1e-5, 1e-3)),
        dict(name="ks weakly stable", ref=t61, params=ks(0.55 * np.pi, omega=0.2),
             t_end=300.0),
        dict(name="inertia defective", ref=t41, defective=True,
             params=models.Inertia(gamma=2.0, p=1.0, alpha=np.pi, sigma=2.0),
             t_end=40.0, direction=eig_dir, velocity_direction=-eig_dir),
        dict(name="inertia growth", ref=t41,
             params=models.Inertia(gamma=0.5, p=2.0, alpha=0.0),
             t_end=40.0, size=1e-6, window=(1e-5, 1e-3)),
        dict(name="inertia stable focus", ref=t41,
             params=models.Inertia(gamma=1.0, p=0.5, alpha=0.75 * np.pi),
             t_end=120.0),
        dict(name="inertia off-equidistant", ref=anti,
             params=models.Inertia(gamma=1.0, p=0.7, alpha=0.8 * np.pi),
             t_end=150.0),
        dict(name="adaptive stable", ref=t52,
             params=models.Adaptive(omega=0.2, epsilon=1.0, alpha=0.6, beta=0.6),
             t_end=200.0),
        dict(name="adaptive growth", ref=t52,
             params=models.Adaptive(omega=0.2, epsilon=0.5, alpha=2.0, beta=2.0),
             t_end=60.0, size=1e-6, window=(1e-5, 1e-3)),
    ]
    return cases


def analytic_rate(ref: construct.SplayState, params: models.ModelParams) -> float:
    """Maximal nontrivial real part from the closed-form spectra."""
    blocks = models.model_jacobian(ref.theta, params,
                                   m=models.natural_moment(params))
    traces = blocks.traces
    if isinstance(params, models.KuramotoSakaguchi):
        return stability.max_real_part(stability.transverse_eigenvalues(traces))
    if isinstance(params, models.Inertia):
        roots = stability.inertia_eigenvalues(params.unit_inertia().gamma, traces)
        return float(roots.real.max())
    roots = stability.adaptive_quartic(traces, params.epsilon).roots
    return float(roots.real.max())


def check_simulation_concordance(quick: bool = False) -> CheckResult:
    """Measured perturbation decay/growth rates match the analytic spectra
    within 5% (10% for defective cases), and the measured collective
    frequency matches the closed form within 1e-5."""

    def run() -> tuple[bool, str]:
        cases = _simulation_cases()
        if quick:
            cases = [cases[0], cases[4], cases[8]]
        details = []
        for case in cases:
            ref, params = case["ref"], case["params"]
            expected = analytic_rate(ref, params)
            tol = 0.10 if case.get("defective") else 0.05
            _, fit = dynamics.decay_study(
                ref, params, dt=1e-3,
                t_end=case["t_end"], stride=10,
                size=case.get("size", 1e-4),
                window=case.get("window", dynamics.FIT_WINDOW),
                rng=np.random.default_rng(3),
                direction=case.get("direction"),
                velocity_direction=case.get("velocity_direction"))
            rel = abs(fit.rate - expected) / abs(expected)
            if rel > tol:
                return False, (f"{case['name']}: measured {fit.rate:+.5f} vs "
                               f"analytic {expected:+.5f} ({rel:.1%} > {tol:.0%})")
            steady = models.steady_state(ref.theta, params)
            traj = dynamics.integrate(steady, params, dt=1e-3, t_end=10.0, stride=10)
            omega = dynamics.measure_frequency(traj)
            omega_exact = models.collective_frequency(ref.theta, params)
            if abs(omega - omega_exact) > 1e-5:
                return False, (f"{case['name']}: frequency {omega:.8f} vs "
                               f"{omega_exact:.8f}")
            details.append(f"{case['name']} {rel:.2%}")
        return True, f"{len(cases)} cases: " + "; ".join(details)

    return _timed("simulation-concordance", run)


# ---------------------------------------------------------------------------
# 7. Coupling-strength rescaling invariance
# ---------------------------------------------------------------------------


def check_rescaling_invariance(quick: bool = False) -> CheckResult:
    """classification(sigma, gamma, alpha, R2) equals
    classification(1, gamma/sqrt(sigma), alpha, R2) away from Marginal."""

    def run() -> tuple[bool, str]:
        samples = 300 if quick else 1000
        rng = np.random.default_rng(99)
        compared = 0
        for _ in range(samples):
            sigma = rng.uniform(0.2, 5.0)
            gamma = rng.uniform(0.05, 3.0)
            alpha = rng.uniform(0.0, 2.0 * np.pi)
            r2 = rng.uniform(0.0, 1.0)
            base = stability.classify_roots(
                stability.ks_inertia_eigenvalues(gamma, alpha, sigma, r2))
            scaled = stability.classify_roots(
                stability.ks_inertia_eigenvalues(gamma / np.sqrt(sigma), alpha,
                                                 1.0, r2))
            if stability.Classification.MARGINAL in (base, scaled):
                continue
            compared += 1
            if base is not scaled:
                return False, (f"{base.value} vs {scaled.value} at sigma={sigma:.3f}, "
                               f"gamma={gamma:.3f}, alpha={alpha:.3f}, r2={r2:.3f}")
        return True, f"{compared}/{samples} non-marginal tuples, 100% agreement"

    return _timed("coupling-rescaling-invariance", run)


# ---------------------------------------------------------------------------
# 8. Splay construction exactness
# ---------------------------------------------------------------------------


def check_splay_construction(quick: bool = False) -> CheckResult:
    """R_2 = |cos(delta)| on the four-oscillator antipodal family, and the
    random sampler hits |Z_m| < 1e-12 for every tested (n, m, seed)."""

    def run() -> tuple[bool, str]:
        deltas = np.linspace(0.0, np.pi, 300 if quick else 1000)
        worst_family = 0.0
        for delta in deltas:
            state = construct.antipodal_pairs_family(4, [delta])
            worst_family = max(worst_family, abs(state.r2 - abs(np.cos(delta))))
        if worst_family >= 1e-12:
            return False, f"antipodal-family R_2 off by {worst_family:.2e}"
        sizes = range(2, 11) if quick else range(2, 33)
        seeds = range(10) if quick else range(50)
        worst_sampler = 0.0
        for n in sizes:
            for m in (1, 2, 3):
                for seed in seeds:
                    state = construct.random_splay(n, m, seed=seed)
                    z = models.order_parameter(state.theta, m).r
                    worst_sampler = max(worst_sampler, z)
                    if z >= 1e-12:
                        return False, (f"sampler missed the manifold: R_{m} = "
                                       f"{z:.2e} at n={n}, seed={seed}")
        return True, (f"family R_2 worst err {worst_family:.2e}; sampler worst "
                      f"R_m {worst_sampler:.2e} over n in {min(sizes)}..{max(sizes)}, "
                      f"m in 1..3, {len(list(seeds))} seeds")

    return _timed("splay-sampler-exactness", run)


ALL_CHECKS = (
    check_reduced_polynomial,
    check_phase_lag_verdicts,
    check_inertia_quartic,
    check_inertia_phase_lag_grid,
    check_adaptive_spectrum,
    check_simulation_concordance,
    check_rescaling_invariance,
    check_splay_construction,
)


def run_all(quick: bool = False) -> list[CheckResult]:
    return [check(quick) for check in ALL_CHECKS]
