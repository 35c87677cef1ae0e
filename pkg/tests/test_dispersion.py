import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metaring import (
    RingSpec,
    SegmentParams,
    UnitCell,
    analytic_mode_frequency,
    cell_trace,
    conversion_mismatch,
    fsr_curve,
    idc_enhancement_sweep,
    mode_index_near,
    segment_abcd,
    solve_mode_frequency,
)
from metaring.dispersion import cell_matrix, estimated_fsr
from metaring.errors import BandEdgeError
from conftest import rel_err

N_CELLS = 3200

# frozen from an independent dense-scan + brentq solve of the same dispersion relation
MISMATCH_N5 = 16271.1       # Hz at the mode nearest 5 GHz
MISMATCH_N30 = 585998.7     # Hz
ENHANCED_RATIO3 = {1e9: 567403.7, 2e9: 2405819.3, 3e9: 5313040.7}  # Hz

segment_strategy = st.builds(
    SegmentParams,
    inductance_per_length=st.floats(min_value=1e-7, max_value=1e-4),
    capacitance_per_length=st.floats(min_value=1e-11, max_value=5e-9),
    length=st.floats(min_value=1e-6, max_value=1e-4),
)


class TestSegmentAbcd:
    def test_zero_frequency_identity(self, bloch_cell):
        m = segment_abcd(bloch_cell.segment1, 0.0)
        assert m.a == 1.0 and m.d == 1.0
        assert m.b == 0.0 and m.c == 0.0

    def test_rail_impedance_near_quoted_value(self, bloch_cell):
        assert abs(bloch_cell.segment1.impedance - 443.0) / 443.0 < 0.005

    def test_rejects_negative_frequency(self, bloch_cell):
        with pytest.raises(ValueError):
            segment_abcd(bloch_cell.segment1, -1.0)

    @settings(max_examples=60, deadline=None, derandomize=True)
    @given(seg=segment_strategy, f=st.floats(min_value=0.0, max_value=2e10))
    def test_lossless_determinant(self, seg, f):
        assert abs(segment_abcd(seg, f).determinant() - 1.0) <= 1e-10


class TestCellTrace:
    def test_zero_frequency(self, bloch_cell):
        assert cell_trace(bloch_cell, 0.0) == 1.0

    def test_uniform_cell_reduces_to_plain_cosine(self, uniform_cell):
        for f in (1e9, 5e9, 20e9):
            k = uniform_cell.segment1.wave_number(f)
            expected = math.cos(k * uniform_cell.cell_length)
            assert abs(cell_trace(uniform_cell, f) - expected) < 1e-12

    def test_design_cell_propagating_at_5ghz(self, bloch_cell):
        value = cell_trace(bloch_cell, 5e9)
        assert -1.0 < value < 1.0
        assert value == pytest.approx(0.9917489694689724, rel=1e-12)

    @settings(max_examples=100, deadline=None, derandomize=True)
    @given(
        seg1=segment_strategy,
        seg2=segment_strategy,
        f=st.floats(min_value=0.0, max_value=3e10),
    )
    def test_closed_form_equals_half_matrix_trace(self, seg1, seg2, f):
        cell = UnitCell(seg1, seg2)
        closed = cell_trace(cell, f)
        matrix = cell_matrix(cell, f)
        assert abs(closed - matrix.trace().real / 2.0) <= 1e-10
        assert abs(matrix.trace().imag) <= 1e-10
        assert abs(matrix.determinant() - 1.0) <= 1e-10


class TestSolveModeFrequency:
    def test_uniform_cell_matches_linear_ladder(self, uniform_cell):
        v = uniform_cell.segment1.phase_velocity
        length = N_CELLS * uniform_cell.cell_length
        for m in (1, 7, 50):
            f = solve_mode_frequency(uniform_cell, N_CELLS, m)
            assert rel_err(f, v * m / length) < 1e-6

    def test_uniform_limit_matches_lumped_mode_solver(self, uniform_cell):
        # lumped chain and distributed line agree when the per-cell phase is tiny
        n_cells = 100000
        ring = RingSpec(
            cell_count=n_cells,
            segment1=SegmentParams(57e-6, 437e-12, 30e-6),
            segment2=None,
            geometric_inductance_per_length=28.5e-6,
            kinetic_inductance_per_length=28.5e-6,
        )
        for m in (1, 5, 20):
            bloch = solve_mode_frequency(uniform_cell, n_cells, m)
            lumped = analytic_mode_frequency(ring, m)
            assert rel_err(bloch, lumped) < 1e-6

    def test_monotone_in_mode_index(self, bloch_cell):
        freqs = [solve_mode_frequency(bloch_cell, N_CELLS, m) for m in range(1, 31)]
        assert all(b > a for a, b in zip(freqs, freqs[1:]))

    def test_rejects_trivial_mode(self, bloch_cell):
        with pytest.raises(ValueError):
            solve_mode_frequency(bloch_cell, N_CELLS, 0)
        with pytest.raises(ValueError):
            solve_mode_frequency(bloch_cell, N_CELLS, N_CELLS)

    def test_band_edge_error_in_stop_band(self, bloch_cell):
        # locate a stop-band frequency, then ask for the nearest mode there
        grid = np.linspace(1e9, 3e11, 4000)
        gap = next(float(f) for f in grid if abs(cell_trace(bloch_cell, float(f))) > 1.0)
        with pytest.raises(BandEdgeError):
            mode_index_near(bloch_cell, N_CELLS, gap)

    def test_mode_index_inverts_solution(self, bloch_cell):
        for m in (20, 65, 110):
            f = solve_mode_frequency(bloch_cell, N_CELLS, m)
            assert mode_index_near(bloch_cell, N_CELLS, f) == m

    def test_consistent_with_fsr_curve_near_5ghz(self, bloch_cell):
        m = mode_index_near(bloch_cell, N_CELLS, 5e9)
        f_m = solve_mode_frequency(bloch_cell, N_CELLS, m)
        points = fsr_curve(bloch_cell, N_CELLS, (f_m - 1e6, f_m + 1e8))
        assert any(abs(p[0] - f_m) < 1e-2 for p in points)
        nearest = min(points, key=lambda p: abs(p[0] - f_m))
        f_next = solve_mode_frequency(bloch_cell, N_CELLS, m + 1, f_start=f_m)
        assert abs(nearest[1] - (f_next - f_m)) < 1e-2


class TestFsrCurve:
    def test_design_cell_fsr_decreases(self, bloch_cell):
        points = fsr_curve(bloch_cell, N_CELLS, (4e9, 9e9))
        assert len(points) > 50
        fsr = [p[1] for p in points]
        assert all(b < a for a, b in zip(fsr, fsr[1:]))

    def test_uniform_cell_fsr_constant(self, uniform_cell):
        points = fsr_curve(uniform_cell, N_CELLS, (4e9, 6e9))
        fsr = [p[1] for p in points]
        assert (max(fsr) - min(fsr)) / min(fsr) < 1e-6

    def test_halving_cell_count_doubles_fsr(self, bloch_cell):
        full = fsr_curve(bloch_cell, N_CELLS, (5e9, 5.5e9))
        half = fsr_curve(bloch_cell, N_CELLS // 2, (5e9, 5.5e9))
        mean_full = sum(p[1] for p in full) / len(full)
        mean_half = sum(p[1] for p in half) / len(half)
        assert rel_err(mean_half, 2 * mean_full) < 0.01

    def test_points_inside_band(self, bloch_cell):
        points = fsr_curve(bloch_cell, N_CELLS, (4e9, 9e9))
        assert all(4e9 <= p[0] <= 9e9 for p in points)

    def test_empty_band(self, bloch_cell):
        assert fsr_curve(bloch_cell, N_CELLS, (5e9, 4e9)) == []


class TestConversionMismatch:
    def test_design_cell_near_5ghz(self, bloch_cell):
        m = mode_index_near(bloch_cell, N_CELLS, 5e9)
        report5 = conversion_mismatch(bloch_cell, N_CELLS, m, 5)
        report30 = conversion_mismatch(bloch_cell, N_CELLS, m, 30)
        assert abs(report5.delta_f - MISMATCH_N5) < 1.0
        assert abs(report30.delta_f - MISMATCH_N30) < 1.0
        # quoted design values with the documented bridge-impedance tolerance
        assert abs(report5.delta_f - 16e3) <= 0.3 * 16e3
        assert abs(report30.delta_f - 586e3) <= 0.3 * 586e3
        assert abs(report5.signal_f - 5e9) < 0.05e9

    def test_uniform_cell_mismatch_vanishes(self, uniform_cell):
        m = mode_index_near(uniform_cell, N_CELLS, 5e9)
        report = conversion_mismatch(uniform_cell, N_CELLS, m, 5)
        assert abs(report.delta_f) < 0.05  # root-finder tolerance only

    def test_positive_for_concave_dispersion(self, bloch_cell):
        m = mode_index_near(bloch_cell, N_CELLS, 6e9)
        for n in (2, 10, 20):
            assert conversion_mismatch(bloch_cell, N_CELLS, m, n).delta_f > 0

    def test_rejects_bad_pair(self, bloch_cell):
        with pytest.raises(ValueError):
            conversion_mismatch(bloch_cell, N_CELLS, 10, 10)
        with pytest.raises(ValueError):
            conversion_mismatch(bloch_cell, N_CELLS, 10, 0)


class TestIdcEnhancement:
    def test_identity_ratio_reproduces_mismatch(self, bloch_cell):
        points = idc_enhancement_sweep(bloch_cell, N_CELLS, 5e9, [1e9], [1.0])
        assert len(points) == 1
        p = points[0]
        m = mode_index_near(bloch_cell, N_CELLS, 5e9)
        direct = conversion_mismatch(bloch_cell, N_CELLS, m, p.n)
        assert abs(p.delta_f - direct.delta_f) < 1e-3

    def test_ratio_three_design_targets(self, bloch_cell):
        points = idc_enhancement_sweep(
            bloch_cell, N_CELLS, 5e9, [1e9, 2e9, 3e9], [3.0]
        )
        by_offset = {p.offset: p.delta_f for p in points}
        quoted = {1e9: 562e3, 2e9: 2.383e6, 3e9: 5.263e6}
        for offset, value in quoted.items():
            assert abs(by_offset[offset] - value) <= 0.3 * value
            assert abs(by_offset[offset] - ENHANCED_RATIO3[offset]) < 2.0

    def test_monotone_in_ratio(self, bloch_cell):
        ratios = [1.0, 1.5, 2.0, 2.5, 3.0]
        points = idc_enhancement_sweep(
            bloch_cell, N_CELLS, 5e9, [1e9, 2e9, 3e9], ratios
        )
        for offset in (1e9, 2e9, 3e9):
            series = [p.delta_f for p in points if p.offset == offset]
            assert len(series) == len(ratios)
            assert all(b > a for a, b in zip(series, series[1:]))

    def test_rejects_sub_unity_ratio(self, bloch_cell):
        with pytest.raises(ValueError):
            idc_enhancement_sweep(bloch_cell, N_CELLS, 5e9, [1e9], [0.5])

    def test_row_ordering_ratio_major(self, bloch_cell):
        points = idc_enhancement_sweep(bloch_cell, N_CELLS, 5e9, [1e9, 2e9], [1.0, 2.0])
        assert [(p.ratio, p.offset) for p in points] == [
            (1.0, 1e9), (1.0, 2e9), (2.0, 1e9), (2.0, 2e9)
        ]


def test_estimated_fsr_matches_low_frequency_spacing(bloch_cell):
    estimate = estimated_fsr(bloch_cell, N_CELLS)
    f1 = solve_mode_frequency(bloch_cell, N_CELLS, 1)
    assert rel_err(estimate, f1) < 0.02
