"""Resonant modes of the ring from the lumped LC chain model.

The ring is modeled as N identical LC cells closed on themselves.  Voltage
amplitudes obey a cyclic second-difference relation whose traveling-wave
solutions quantize the wave number to k_m = 2*pi*m/(N*l_0), giving

    f_m = f_0 * sqrt(1 - cos(2*pi*m/N)),   f_0 = 1/(2*pi*sqrt(L_0*C_0)).

For m << N this reduces to the uniform-line ladder f_m = v_ph*m/l.  The modes
come in degenerate counter-propagating pairs (m, N-m).

``eigenmode_frequencies`` solves the same problem as a dense N x N
eigenproblem and serves as the exact finite-N cross-check for the closed
form.  The floating inner island only shifts the static voltage offset (a
constant vector is annihilated by the second difference), so its potential
does not enter the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import RingSpec

_DENSE_SOLVE_LIMIT = 10_000


def natural_cell_frequency(cell_inductance: float, cell_capacitance: float) -> float:
    """Natural frequency of one cell, 1/(2*pi*sqrt(L_0*C_0)) [Hz]."""
    if cell_inductance <= 0 or cell_capacitance <= 0:
        raise ValueError("cell inductance and capacitance must be positive")
    return 1.0 / (2.0 * math.pi * math.sqrt(cell_inductance * cell_capacitance))


def analytic_mode_frequency(ring: RingSpec, m: int) -> float:
    """Closed-form frequency of mode ``m`` [Hz].

    Valid for 0 <= m < N.  The index is folded to min(m, N-m) before
    evaluation so the (m, N-m) degeneracy is exact by construction.
    """
    n_cells = ring.cell_count
    if not isinstance(m, (int, np.integer)) or not (0 <= m < n_cells):
        raise ValueError(f"mode index must satisfy 0 <= m < {n_cells}, got {m!r}")
    constants = ring.line_constants()
    f0 = natural_cell_frequency(constants.cell_inductance, constants.cell_capacitance)
    m_eff = min(int(m), n_cells - int(m))
    return f0 * math.sqrt(1.0 - math.cos(2.0 * math.pi * m_eff / n_cells))


@dataclass(frozen=True)
class ModeTable:
    """Modes in a band with their spacings.

    ``entries`` are (m, f_m) sorted by m; ``fsr_list[j]`` is
    f_{m_{j+1}} - f_{m_j}; ``fsr_mean`` is NaN when fewer than two modes fall
    in the band.
    """

    entries: tuple
    fsr_list: tuple
    fsr_mean: float

    @classmethod
    def from_frequencies(cls, indices: Sequence[int], frequencies: Sequence[float]) -> "ModeTable":
        entries = tuple(sorted(zip((int(m) for m in indices), frequencies)))
        freqs = [f for _, f in entries]
        fsr = tuple(b - a for a, b in zip(freqs, freqs[1:]))
        mean = sum(fsr) / len(fsr) if fsr else float("nan")
        return cls(entries=entries, fsr_list=fsr, fsr_mean=mean)

    def __len__(self) -> int:
        return len(self.entries)

    def csv_rows(self) -> Iterable[tuple]:
        """Rows (m, f_hz, fsr_to_next_hz); the last spacing is empty."""
        for j, (m, f) in enumerate(self.entries):
            fsr = self.fsr_list[j] if j < len(self.fsr_list) else None
            yield (m, f, fsr)


def free_spectral_range(ring: RingSpec, band: tuple) -> ModeTable:
    """All modes of the first branch (0 < m <= N/2) inside ``band`` [Hz].

    An empty band or a band containing no mode yields an empty table.
    """
    lo, hi = band
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("band edges must be finite")
    constants = ring.line_constants()
    f0 = natural_cell_frequency(constants.cell_inductance, constants.cell_capacitance)
    n_cells = ring.cell_count
    f_top = f0 * math.sqrt(2.0)

    def index_at(f: float) -> float:
        # inverse of f_m = f0*sqrt(1-cos(2*pi*m/N)) on the rising branch
        return n_cells / (2.0 * math.pi) * math.acos(1.0 - min((f / f0) ** 2, 2.0))

    if hi <= lo or hi <= 0:
        return ModeTable.from_frequencies((), ())
    lo = max(lo, 0.0)
    if lo >= f_top:
        return ModeTable.from_frequencies((), ())
    m_lo = max(1, math.ceil(index_at(lo) - 1e-9))
    m_hi = min(n_cells // 2, math.floor(index_at(min(hi, f_top)) + 1e-9))
    indices = [m for m in range(m_lo, m_hi + 1)
               if lo <= analytic_mode_frequency(ring, m) <= hi]
    freqs = [analytic_mode_frequency(ring, m) for m in indices]
    return ModeTable.from_frequencies(indices, freqs)


def eigenmode_frequencies(ring: RingSpec, island_potential: float = 0.0) -> np.ndarray:
    """Spectrum from the dense cyclic second-difference eigenproblem [Hz].

    Returns all N frequencies sorted ascending with degeneracies preserved.
    ``island_potential`` is accepted to document independence: a constant
    voltage offset of half the island potential absorbs it exactly, so the
    operator (and the spectrum) never depends on it.
    """
    if not math.isfinite(island_potential):
        raise ValueError("island_potential must be finite")
    n_cells = ring.cell_count
    if n_cells > _DENSE_SOLVE_LIMIT:
        raise ValueError(f"dense solve limited to N <= {_DENSE_SOLVE_LIMIT}, got {n_cells}")
    constants = ring.line_constants()
    omega0 = 1.0 / math.sqrt(constants.cell_inductance * constants.cell_capacitance)

    second_difference = (
        2.0 * np.eye(n_cells)
        - np.eye(n_cells, k=1) - np.eye(n_cells, k=-1)
        - np.eye(n_cells, k=n_cells - 1) - np.eye(n_cells, k=-(n_cells - 1))
    )
    eigenvalues = np.linalg.eigvalsh(second_difference)
    # the smallest true eigenvalue is (2*pi/N)^2 >= 4e-7 for N <= 1e4, far
    # above solver noise; anything below that floor is the exact-zero mode
    eigenvalues[eigenvalues < 1e-10] = 0.0
    # 2*(omega/omega0)**2 = eigenvalue of the second difference
    frequencies = omega0 * np.sqrt(eigenvalues / 2.0) / (2.0 * math.pi)
    return np.sort(frequencies)


def rescaled_ring(ring: RingSpec, fsr_target: float, fsr_model: float) -> RingSpec:
    """Ring with phase velocity rescaled by fsr_target/fsr_model."""
    return ring.with_phase_velocity_scale(fsr_target / fsr_model)
