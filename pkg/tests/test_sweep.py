"""Grid sweeps: schema, determinism, parallelism, and region correctness."""

import numpy as np
import pytest

from splaylab import stability, sweep


def planar_config(count=20, **overrides):
    base = dict(
        model="planar",
        axes=(sweep.Axis("trL", -3.0, 3.0, count),
              sweep.Axis("trL2", -3.0, 6.0, count)),
    )
    base.update(overrides)
    return sweep.SweepConfig(**base)


def render_csv(config, rows):
    return "\n".join([sweep.csv_header(config)] +
                     [sweep.row_to_csv(r) for r in rows]) + "\n"


class TestConfigValidation:
    def test_unknown_axis(self):
        with pytest.raises(sweep.ConfigError):
            sweep.Axis("bogus", 0, 1, 5)

    def test_axis_count(self):
        with pytest.raises(sweep.ConfigError):
            sweep.Axis("alpha", 0, 1, 1)

    def test_axis_not_in_model(self):
        with pytest.raises(sweep.ConfigError):
            sweep.SweepConfig(model="planar",
                              axes=(sweep.Axis("alpha", 0, 1, 4),))

    def test_too_many_axes(self):
        axes = (sweep.Axis("alpha", 0, 1, 2), sweep.Axis("gamma", 0, 1, 2),
                sweep.Axis("sigma", 0, 1, 2), sweep.Axis("r2", 0, 1, 2))
        with pytest.raises(sweep.ConfigError):
            sweep.SweepConfig(model="ks-inertia", axes=axes)

    def test_missing_required_parameter(self):
        config = sweep.SweepConfig(model="inertia",
                                   axes=(sweep.Axis("trL", -1, 1, 2),
                                         sweep.Axis("trL2", -1, 1, 2)))
        with pytest.raises(sweep.ConfigError):
            sweep.run_sweep(config)  # gamma missing

    def test_adaptive_needs_state(self):
        config = sweep.SweepConfig(model="adaptive",
                                   axes=(sweep.Axis("alpha", 0, 1, 2),),
                                   fixed={"beta": 0.0, "epsilon": 1.0})
        with pytest.raises(sweep.ConfigError):
            sweep.run_sweep(config)


class TestCsvSchema:
    def test_planar_header(self):
        config = planar_config()
        assert sweep.csv_header(config) == (
            "idx0,idx1,trL,trL2,class,max_re,re1,im1,re2,im2,oracle_max_re,agree")

    def test_quartic_header_three_axes(self):
        config = sweep.SweepConfig(
            model="ks-inertia",
            axes=(sweep.Axis("gamma", 0.1, 1.0, 2),
                  sweep.Axis("alpha", 0.0, 6.28, 2),
                  sweep.Axis("delta", 0.0, 1.5, 2)))
        assert sweep.csv_header(config) == (
            "idx0,idx1,idx2,gamma,alpha,delta,class,max_re,"
            "re1,im1,re2,im2,re3,im3,re4,im4,oracle_max_re,agree")

    def test_row_without_oracle_reads_na(self):
        config = planar_config(4)
        rows = sweep.run_sweep(config)
        text = sweep.row_to_csv(rows[0])
        assert text.endswith("na,na")

    def test_floats_have_17_significant_digits(self):
        config = planar_config(4)
        rows = sweep.run_sweep(config)
        cell = sweep.row_to_csv(rows[1]).split(",")[2]
        assert cell == f"{rows[1].values[0]:.17g}"
        assert float(cell) == rows[1].values[0]


class TestDeterminism:
    def test_two_by_two_smoke(self):
        config = planar_config(2)
        first = render_csv(config, sweep.run_sweep(config))
        second = render_csv(config, sweep.run_sweep(config))
        assert len(first.splitlines()) == 5
        assert first == second

    def test_parallel_rows_identical(self):
        serial = sweep.SweepConfig(
            model="ks-inertia",
            axes=(sweep.Axis("alpha", 0.0, 6.28, 8),
                  sweep.Axis("delta", 0.0, 1.5, 8)),
            fixed={"gamma": 0.5}, oracle=True, jobs=1)
        parallel = sweep.SweepConfig(
            model="ks-inertia",
            axes=(sweep.Axis("alpha", 0.0, 6.28, 8),
                  sweep.Axis("delta", 0.0, 1.5, 8)),
            fixed={"gamma": 0.5}, oracle=True, jobs=3)
        assert render_csv(serial, sweep.run_sweep(serial)) == \
            render_csv(parallel, sweep.run_sweep(parallel))

    def test_row_major_order(self):
        config = planar_config(3)
        rows = sweep.run_sweep(config)
        assert [r.indices for r in rows] == [
            (i, j) for i in range(3) for j in range(3)]

    def test_three_axis_grid(self):
        config = sweep.SweepConfig(
            model="ks-inertia",
            axes=(sweep.Axis("gamma", 0.2, 1.0, 2),
                  sweep.Axis("alpha", 0.5, 3.0, 3),
                  sweep.Axis("delta", 0.1, 1.4, 2)),
            oracle=True)
        rows = sweep.run_sweep(config)
        assert [r.indices for r in rows] == [
            (i, j, k) for i in range(2) for j in range(3) for k in range(2)]
        assert all(r.agree == "true" for r in rows)
        header = sweep.csv_header(config)
        cells = sweep.row_to_csv(rows[-1]).split(",")
        assert len(cells) == len(header.split(","))


class TestPlanarRegions:
    def test_stable_set_matches_closed_form(self):
        # stable region is exactly {trL < 0 and trL2 < trL^2} up to the
        # marginal band, at full diagram resolution
        config = planar_config(300)
        rows = sweep.run_sweep(config)
        for row in rows:
            if row.classification is stability.Classification.MARGINAL:
                continue
            trl, trl2 = row.values
            assert row.classification.is_stable == (trl < 0 and trl2 < trl * trl)

    def test_abstract_r2_axis(self):
        # sweeping R_2 directly (no concrete state): oracle column reads na
        config = sweep.SweepConfig(
            model="ks",
            axes=(sweep.Axis("alpha", 0.2, 6.0, 7),
                  sweep.Axis("r2", 0.0, 1.0, 5)))
        rows = sweep.run_sweep(config)
        assert all(r.agree == "na" and r.oracle_max_re is None for r in rows)
        for row in rows:
            alpha, r2 = row.values
            lam = stability.ks_eigenvalues(alpha, 1.0, r2)
            assert row.eigenvalues == pytest.approx(lam)

    def test_eigenvalues_are_quadratic_roots(self):
        config = planar_config(10)
        for row in sweep.run_sweep(config):
            trl, trl2 = row.values
            a2 = 0.5 * (trl * trl - trl2)
            for z in row.eigenvalues:
                assert abs(z * z - trl * z + a2) < 1e-10 * max(1.0, abs(a2))


class TestConcreteStateSweeps:
    def test_ks_delta_axis_oracle_agrees(self):
        config = sweep.SweepConfig(
            model="ks",
            axes=(sweep.Axis("alpha", 0.2, 6.0, 10),
                  sweep.Axis("delta", 0.0, 1.5, 6)),
            oracle=True)
        rows = sweep.run_sweep(config)
        assert all(r.agree == "true" for r in rows)
        assert all(r.oracle_max_re is not None for r in rows)

    def test_ks_inertia_boundary_matches_closed_form(self):
        # scan delta at fixed alpha: the stability flip along the grid must
        # bracket the closed-form boundary R_2
        gamma, alpha = 0.5, 2.0
        count = 400
        config = sweep.SweepConfig(
            model="ks-inertia",
            axes=(sweep.Axis("delta", 0.0, 0.5 * np.pi, count),),
            fixed={"gamma": gamma, "alpha": alpha})
        rows = sweep.run_sweep(config)
        point = stability.hopf_boundary("ks-inertia", gamma=gamma, alpha=alpha)
        boundary_delta = np.arccos(np.sqrt(point.location["r2_squared"]))
        flips = [i for i in range(1, count)
                 if rows[i].classification.is_stable
                 != rows[i - 1].classification.is_stable]
        spacing = 0.5 * np.pi / (count - 1)
        assert any(abs(rows[i].values[0] - boundary_delta) < 2 * spacing
                   for i in flips)

    def test_twisted_source_fixed_state(self):
        config = sweep.SweepConfig(
            model="ks",
            axes=(sweep.Axis("alpha", 0.1, 3.0, 5),),
            source=sweep.StateSource(kind="twisted", n=6, k=1),
            oracle=True)
        rows = sweep.run_sweep(config)
        assert all(r.agree == "true" for r in rows)

    def test_adaptive_sweep_with_random_source(self):
        # matched lag angles: the trace quartic applies and must agree
        config = sweep.SweepConfig(
            model="adaptive",
            axes=(sweep.Axis("epsilon", 0.2, 2.0, 5),),
            fixed={"alpha": 0.9, "beta": 0.9},
            source=sweep.StateSource(kind="random", n=5, seeds=(3,)),
            oracle=True)
        rows = sweep.run_sweep(config)
        assert all(r.agree == "true" for r in rows)
        assert all(len(r.eigenvalues) == 4 for r in rows)

    def test_adaptive_mismatched_lags_marked_not_applicable(self):
        # with beta != alpha the tangent kernel condition fails and the
        # quartic carries no claim, so the agreement column reads na
        config = sweep.SweepConfig(
            model="adaptive",
            axes=(sweep.Axis("alpha", 0.3, 2.8, 4),),
            fixed={"epsilon": 0.5, "beta": 0.9},
            source=sweep.StateSource(kind="random", n=5, seeds=(3,)),
            oracle=True)
        rows = sweep.run_sweep(config)
        assert all(r.agree == "na" for r in rows)

    def test_adaptive_beta_defaults_to_missing(self):
        config = sweep.SweepConfig(
            model="adaptive",
            axes=(sweep.Axis("alpha", 0.3, 2.8, 4),),
            source=sweep.StateSource(kind="random", n=5, seeds=(3,)))
        with pytest.raises(sweep.ConfigError):
            sweep.run_sweep(config)


class TestBoundaryTable:
    def test_ks_inertia_rows(self):
        rows = sweep.boundary_table("ks-inertia", gamma=0.5,
                                    axis_values=np.linspace(1.7, 4.5, 60))
        assert rows
        for row in rows:
            assert row["residual"] < 1e-9
            if "r2" in row:
                assert row["delta"] == pytest.approx(np.arccos(row["r2"]))

    def test_inertia_generic_rows_skip_positive_trl(self):
        rows = sweep.boundary_table("inertia-generic", gamma=1.0,
                                    axis_values=np.linspace(-2.0, 2.0, 21))
        assert all(row["trL"] < 0 for row in rows)

    def test_write_csv(self, tmp_path):
        rows = sweep.boundary_table("ks-inertia", gamma=0.5,
                                    axis_values=np.linspace(1.7, 4.5, 10))
        path = tmp_path / "boundary.csv"
        sweep.write_boundary_csv(rows, str(path))
        lines = path.read_text().splitlines()
        assert lines[0].startswith("alpha,r2_squared,v,residual")
        assert len(lines) == len(rows) + 1
