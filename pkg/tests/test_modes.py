import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metaring import (
    RingSpec,
    SegmentParams,
    analytic_mode_frequency,
    eigenmode_frequencies,
    free_spectral_range,
    natural_cell_frequency,
)
from conftest import GEOMETRIC_L, KINETIC_L, rel_err

# independently derived from the design constants (hand-checked 1/(2*pi*sqrt(L0*C0)))
DESIGN_CELL_FREQUENCY = 56928298069.672
DESIGN_FUNDAMENTAL = 79039288.614


def small_ring(n_cells: int) -> RingSpec:
    seg = SegmentParams(57e-6, 437e-12, 25e-6)
    return RingSpec(n_cells, seg, None, GEOMETRIC_L, KINETIC_L)


class TestNaturalCellFrequency:
    def test_unit_values(self):
        assert natural_cell_frequency(1.0, 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)

    def test_design_cell(self, design_ring):
        lc = design_ring.line_constants()
        f0 = natural_cell_frequency(lc.cell_inductance, lc.cell_capacitance)
        assert rel_err(f0, DESIGN_CELL_FREQUENCY) < 1e-9

    def test_quadrupling_inductance_halves(self):
        assert natural_cell_frequency(4e-9, 1e-15) == pytest.approx(
            natural_cell_frequency(1e-9, 1e-15) / 2, rel=1e-14
        )

    @pytest.mark.parametrize("l0,c0", [(0.0, 1e-15), (1e-9, -1e-15)])
    def test_rejects_non_positive(self, l0, c0):
        with pytest.raises(ValueError):
            natural_cell_frequency(l0, c0)


class TestAnalyticModeFrequency:
    def test_zero_mode(self, design_ring):
        assert analytic_mode_frequency(design_ring, 0) == 0.0

    def test_fundamental_is_design_fsr(self, design_ring):
        f1 = analytic_mode_frequency(design_ring, 1)
        assert abs(f1 - 79e6) < 1e6          # quoted design value
        assert rel_err(f1, DESIGN_FUNDAMENTAL) < 1e-9

    def test_counter_propagating_degeneracy_exact(self, design_ring):
        n = design_ring.cell_count
        for m in (1, 17, 555, n // 2 - 1):
            assert analytic_mode_frequency(design_ring, m) == analytic_mode_frequency(
                design_ring, n - m
            )

    @pytest.mark.parametrize("m", [-1, 3200, 5000])
    def test_rejects_out_of_range(self, design_ring, m):
        with pytest.raises(ValueError):
            analytic_mode_frequency(design_ring, m)

    def test_small_m_approaches_linear_ladder(self, design_ring):
        lc = design_ring.line_constants()
        linear = lc.phase_velocity / design_ring.total_length
        f1 = analytic_mode_frequency(design_ring, 1)
        assert rel_err(f1, linear) < 1e-6


class TestFreeSpectralRange:
    def test_design_band_mean(self, design_ring):
        table = free_spectral_range(design_ring, (4e9, 10e9))
        assert abs(table.fsr_mean - 79e6) < 1e6
        assert len(table) == 76

    def test_entries_sorted_and_consistent(self, design_ring):
        table = free_spectral_range(design_ring, (4e9, 10e9))
        ms = [m for m, _ in table.entries]
        fs = [f for _, f in table.entries]
        assert ms == sorted(ms)
        assert all(b > a for a, b in zip(fs, fs[1:]))
        for j, fsr in enumerate(table.fsr_list):
            assert fsr == pytest.approx(fs[j + 1] - fs[j], rel=1e-15)

    def test_linear_regime_fsr_uniformity(self, design_ring):
        table = free_spectral_range(design_ring, (4e9, 10e9))
        fsr = np.array(table.fsr_list)
        assert fsr.var() / fsr.mean() ** 2 < 1e-4

    def test_small_m_fsr_equals_linear_ladder(self, design_ring):
        lc = design_ring.line_constants()
        ladder = lc.phase_velocity / design_ring.total_length
        f_low = analytic_mode_frequency(design_ring, 2)
        f_high = analytic_mode_frequency(design_ring, 50)
        table = free_spectral_range(design_ring, (f_low * 0.99, f_high * 1.01))
        assert rel_err(table.fsr_mean, ladder) < 0.005

    def test_rescaled_phase_velocity_scales_modes(self, design_ring):
        scale = 76.0 / 79.0
        scaled = design_ring.with_phase_velocity_scale(scale)
        for m in (50, 80, 120):
            assert rel_err(
                analytic_mode_frequency(scaled, m),
                scale * analytic_mode_frequency(design_ring, m),
            ) < 1e-12

    def test_empty_band(self, design_ring):
        assert len(free_spectral_range(design_ring, (1e3, 2e3))) == 0
        assert len(free_spectral_range(design_ring, (5e9, 4e9))) == 0
        assert math.isnan(free_spectral_range(design_ring, (1e3, 2e3)).fsr_mean)

    def test_band_above_branch_top_is_empty(self, design_ring):
        lc = design_ring.line_constants()
        f0 = natural_cell_frequency(lc.cell_inductance, lc.cell_capacitance)
        top = f0 * math.sqrt(2)
        assert len(free_spectral_range(design_ring, (top * 1.01, top * 1.5))) == 0

    def test_csv_rows_shape(self, design_ring):
        table = free_spectral_range(design_ring, (4e9, 4.5e9))
        rows = list(table.csv_rows())
        assert len(rows) == len(table)
        assert rows[-1][2] is None
        assert all(len(row) == 3 for row in rows)

    def test_table_sorts_unordered_input(self):
        from metaring import ModeTable

        table = ModeTable.from_frequencies([7, 3, 5], [7e9, 3e9, 5e9])
        assert [m for m, _ in table.entries] == [3, 5, 7]
        assert table.fsr_list == (2e9, 2e9)
        assert table.fsr_mean == pytest.approx(2e9)


class TestEigenmodeOracle:
    def test_island_potential_invariance(self):
        ring = small_ring(256)
        base = eigenmode_frequencies(ring, island_potential=0.0)
        shifted = eigenmode_frequencies(ring, island_potential=1.0)
        assert np.max(np.abs(base - shifted)) <= 1e-12 * np.max(base)

    def test_matches_analytic_for_all_m(self):
        ring = small_ring(256)
        eig = eigenmode_frequencies(ring)
        analytic = np.sort([analytic_mode_frequency(ring, m) for m in range(256)])
        scale = analytic[-1]
        assert np.all(np.abs(eig - analytic) <= 1e-9 * np.maximum(analytic, scale * 1e-3))

    def test_four_cell_closed_form(self):
        ring = small_ring(4)
        lc = ring.line_constants()
        f0 = natural_cell_frequency(lc.cell_inductance, lc.cell_capacitance)
        expected = np.sort([0.0, f0, f0, f0 * math.sqrt(2)])
        eig = eigenmode_frequencies(ring)
        assert np.allclose(eig, expected, rtol=1e-9, atol=1e-9 * f0)

    def test_degenerate_pairs(self):
        ring = small_ring(64)
        eig = eigenmode_frequencies(ring)
        # modes 1..31 appear twice: entries (2k-1, 2k) for k = 1..31
        for k in range(1, 32):
            a, b = eig[2 * k - 1], eig[2 * k]
            assert abs(a - b) <= 1e-12 * b

    def test_dense_solve_limit(self, line_capacitance):
        seg = SegmentParams(57e-6, line_capacitance, 25e-6)
        ring = RingSpec(20001, seg, None, GEOMETRIC_L, KINETIC_L)
        with pytest.raises(ValueError, match="dense solve"):
            eigenmode_frequencies(ring)

    @settings(max_examples=12, deadline=None, derandomize=True)
    @given(
        n_cells=st.integers(min_value=4, max_value=40),
        kinetic=st.floats(min_value=1e-6, max_value=1e-4),
        cap=st.floats(min_value=1e-11, max_value=1e-9),
    )
    def test_property_oracle_equals_analytic(self, n_cells, kinetic, cap):
        seg = SegmentParams(kinetic, cap, 25e-6)
        ring = RingSpec(n_cells, seg, None, kinetic / 100, kinetic)
        eig = eigenmode_frequencies(ring)
        analytic = np.sort([analytic_mode_frequency(ring, m) for m in range(n_cells)])
        scale = analytic[-1]
        assert np.all(np.abs(eig - analytic) <= 1e-9 * np.maximum(analytic, scale * 1e-3))
