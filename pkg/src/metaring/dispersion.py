"""Exact Bloch dispersion of the two-segment unit cell.

Each segment is a lossless line section with transfer matrix

    M_j = [[cos(k_j l_j), i Z_j sin(k_j l_j)],
           [i sin(k_j l_j)/Z_j, cos(k_j l_j)]]

and the periodic chain supports Bloch waves at frequencies where

    cos(k l_0) = Tr(M_2 M_1)/2
               = cos(k_1 l_1) cos(k_2 l_2)
                 - (Z_1/Z_2 + Z_2/Z_1)/2 * sin(k_1 l_1) sin(k_2 l_2).

Closing the chain into an N-cell ring quantizes cos(k l_0) = cos(2*pi*m/N);
mode frequencies are the roots of that condition in the first propagating
band, found by bracket marching plus bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

from .core import SegmentParams
from .errors import BandEdgeError

_BISECTION_WIDTH = 1e-3  # Hz; comfortably below the 1 Hz contract
_MARCH_FRACTION = 0.1    # bracket step as a fraction of the estimated FSR


@dataclass(frozen=True)
class TwoPortMatrix:
    """ABCD matrix of a two-port; ``b`` carries ohm, ``c`` carries 1/ohm."""

    a: complex
    b: complex
    c: complex
    d: complex

    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def trace(self) -> complex:
        return self.a + self.d

    def cascade(self, other: "TwoPortMatrix") -> "TwoPortMatrix":
        """Matrix product self @ other (``other`` is traversed first)."""
        return TwoPortMatrix(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )


@dataclass(frozen=True)
class UnitCell:
    """One period of the loaded line: nanowire rail plus bridge."""

    segment1: SegmentParams
    segment2: SegmentParams

    @property
    def cell_length(self) -> float:
        return self.segment1.length + self.segment2.length

    @property
    def cell_delay(self) -> float:
        return self.segment1.delay + self.segment2.delay

    def with_capacitance_ratio(self, ratio: float) -> "UnitCell":
        """Scale the bridge capacitance by ``ratio`` (>= 1), inductance fixed."""
        if ratio < 1.0:
            raise ValueError(f"capacitance enhancement ratio must be >= 1, got {ratio!r}")
        seg2 = replace(
            self.segment2,
            capacitance_per_length=self.segment2.capacitance_per_length * ratio,
        )
        return UnitCell(segment1=self.segment1, segment2=seg2)


@dataclass(frozen=True)
class MismatchReport:
    """Frequency mismatch 2 f_m - (f_{m+n} + f_{m-n}) for a conversion pair."""

    m: int
    n: int
    delta_f: float
    signal_f: float

    def __post_init__(self) -> None:
        if self.n < 1 or self.m - self.n < 1:
            raise ValueError("require n >= 1 and m - n >= 1")
        if not math.isfinite(self.delta_f):
            raise ValueError("delta_f must be finite")


def segment_abcd(segment: SegmentParams, frequency: float) -> TwoPortMatrix:
    """ABCD matrix of one lossless segment at ``frequency`` [Hz]."""
    if frequency < 0:
        raise ValueError("frequency must be non-negative")
    theta = segment.wave_number(frequency) * segment.length
    z = segment.impedance
    return TwoPortMatrix(
        a=complex(math.cos(theta)),
        b=1j * z * math.sin(theta),
        c=1j * math.sin(theta) / z,
        d=complex(math.cos(theta)),
    )


def cell_trace(cell: UnitCell, frequency: float) -> float:
    """cos(k l_0) of the unit cell: half the trace of M_2 M_1."""
    if frequency < 0:
        raise ValueError("frequency must be non-negative")
    s1, s2 = cell.segment1, cell.segment2
    t1 = s1.wave_number(frequency) * s1.length
    t2 = s2.wave_number(frequency) * s2.length
    z1, z2 = s1.impedance, s2.impedance
    mismatch = 0.5 * (z1 / z2 + z2 / z1)
    return math.cos(t1) * math.cos(t2) - mismatch * math.sin(t1) * math.sin(t2)


def cell_matrix(cell: UnitCell, frequency: float) -> TwoPortMatrix:
    """Full cell matrix M_2 M_1."""
    return segment_abcd(cell.segment2, frequency).cascade(segment_abcd(cell.segment1, frequency))


def estimated_fsr(cell: UnitCell, n_cells: int) -> float:
    """Low-frequency mode spacing [Hz].

    Expanding the trace to second order in frequency gives an effective
    cell delay sqrt(t1^2 + t2^2 + 2 chi t1 t2) with chi the impedance
    mismatch factor; for matched segments this is the plain delay sum.
    """
    t1, t2 = cell.segment1.delay, cell.segment2.delay
    z1, z2 = cell.segment1.impedance, cell.segment2.impedance
    chi = 0.5 * (z1 / z2 + z2 / z1)
    return 1.0 / (n_cells * math.sqrt(t1 * t1 + t2 * t2 + 2.0 * chi * t1 * t2))


def solve_mode_frequency(
    cell: UnitCell,
    n_cells: int,
    m: int,
    f_start: Optional[float] = None,
) -> float:
    """Smallest positive root of cell_trace(f) = cos(2*pi*m/N) [Hz].

    Brackets by marching upward in steps of 0.1 x estimated FSR (from
    ``f_start`` when given, e.g. the previous mode's root), then bisects the
    bracket well below 1 Hz.  Raises ``BandEdgeError`` when the search runs
    out of the first propagating band, and ``ValueError`` for the trivial
    m = 0 (mod N) target.
    """
    if n_cells < 3:
        raise ValueError("n_cells must be >= 3")
    if m < 1:
        raise ValueError(f"mode index must be >= 1, got {m}")
    if m % n_cells == 0:
        raise ValueError("m = 0 (mod N) only has the trivial root f = 0")
    target = math.cos(2.0 * math.pi * m / n_cells)

    step = _MARCH_FRACTION * estimated_fsr(cell, n_cells)
    # the first band closes near half the cell round-trip frequency; allow slack
    f_cap = 1.5 / cell.cell_delay
    f_lo = max(f_start if f_start is not None else 0.0, 0.0)
    g_lo = cell_trace(cell, f_lo) - target
    if g_lo <= 0.0:
        raise ValueError("f_start is already past the requested mode")
    f_hi = f_lo
    while True:
        f_hi += step
        if f_hi > f_cap:
            raise BandEdgeError(
                f"band edge exceeded before reaching cos(2 pi {m}/{n_cells})"
            )
        g_hi = cell_trace(cell, f_hi) - target
        if g_hi <= 0.0:
            break
        f_lo = f_hi

    while f_hi - f_lo > _BISECTION_WIDTH:
        mid = 0.5 * (f_lo + f_hi)
        if cell_trace(cell, mid) - target > 0.0:
            f_lo = mid
        else:
            f_hi = mid
    return 0.5 * (f_lo + f_hi)


def mode_index_near(cell: UnitCell, n_cells: int, frequency: float) -> int:
    """Index of the first-band mode closest to ``frequency``.

    Inverts the dispersion relation directly: m = N*acos(cos k l_0)/(2 pi).
    Raises ``BandEdgeError`` when the frequency lies in a stop band.
    """
    value = cell_trace(cell, frequency)
    if abs(value) > 1.0:
        raise BandEdgeError(f"{frequency} Hz lies outside the propagating band")
    phase = math.acos(value)
    return max(1, round(n_cells * phase / (2.0 * math.pi)))


def mode_frequencies(
    cell: UnitCell,
    n_cells: int,
    m_first: int,
    m_last: int,
) -> List[float]:
    """Roots for consecutive modes m_first..m_last, reusing brackets."""
    if m_last < m_first:
        return []
    freqs: List[float] = []
    previous: Optional[float] = None
    for m in range(m_first, m_last + 1):
        previous = solve_mode_frequency(cell, n_cells, m, f_start=previous)
        freqs.append(previous)
    return freqs


def fsr_curve(
    cell: UnitCell,
    n_cells: int,
    band: Tuple[float, float],
) -> List[Tuple[float, float]]:
    """(f_m, f_{m+1} - f_m) for every mode in ``band`` [Hz]."""
    lo, hi = band
    if hi <= lo:
        return []
    m_lo = mode_index_near(cell, n_cells, lo)
    m_hi = mode_index_near(cell, n_cells, hi)
    freqs = mode_frequencies(cell, n_cells, max(1, m_lo - 1), m_hi + 1)
    points = []
    for f, f_next in zip(freqs, freqs[1:]):
        if lo <= f <= hi:
            points.append((f, f_next - f))
    return points


def conversion_mismatch(cell: UnitCell, n_cells: int, m: int, n: int) -> MismatchReport:
    """Mismatch 2 f_m - (f_{m+n} + f_{m-n}) when pumping m <-> m+n."""
    if n < 1 or m - n < 1:
        raise ValueError("require n >= 1 and m - n >= 1")
    f_low = solve_mode_frequency(cell, n_cells, m - n)
    f_sig = solve_mode_frequency(cell, n_cells, m, f_start=f_low)
    f_high = solve_mode_frequency(cell, n_cells, m + n, f_start=f_sig)
    return MismatchReport(m=m, n=n, delta_f=2.0 * f_sig - (f_high + f_low), signal_f=f_sig)


@dataclass(frozen=True)
class EnhancementPoint:
    """One row of the capacitance-enhancement sweep."""

    ratio: float
    offset: float
    n: int
    signal_f: float
    delta_f: float


def idc_enhancement_sweep(
    cell: UnitCell,
    n_cells: int,
    signal_f: float,
    offsets: Sequence[float],
    ratios: Sequence[float],
) -> List[EnhancementPoint]:
    """Mismatch vs bridge-capacitance enhancement.

    For each ratio the bridge capacitance is scaled (inductance unchanged),
    the signal mode is re-anchored to the mode nearest ``signal_f``, and for
    each idler offset the partner index n is chosen so f_{m+n} is nearest
    f_m + offset.  Rows are ordered ratio-major, then by offset.
    """
    points: List[EnhancementPoint] = []
    for ratio in ratios:
        scaled = cell.with_capacitance_ratio(ratio)
        m_sig = mode_index_near(scaled, n_cells, signal_f)
        f_sig = solve_mode_frequency(scaled, n_cells, m_sig)
        for offset in offsets:
            if offset <= 0:
                raise ValueError("idler offsets must be positive")
            m_idl = mode_index_near(scaled, n_cells, f_sig + offset)
            n = m_idl - m_sig
            report = conversion_mismatch(scaled, n_cells, m_sig, n)
            points.append(
                EnhancementPoint(
                    ratio=ratio, offset=offset, n=n,
                    signal_f=report.signal_f, delta_f=report.delta_f,
                )
            )
    return points
