"""Magnetic-field tuning and nonlinear coefficients of the asymmetric microloop.

An out-of-plane field B_ext drives a loop supercurrent I_dc = B_ext*d/L_dc.
Each nanowire's kinetic inductance grows quadratically with its current,
L(I) = L0*(1 + (I/I*)**2), which pulls every mode frequency down by

    df/f = -(gamma/2) * (I_dc/I2*)**2.

Expanding the inductive energy of the two-wire loop in the rf current of the
narrow wire produces cubic (three-wave-mixing) and quartic (four-wave-mixing)
terms.  The rf currents in the two wires are tied by the current division
linearized at the dc operating point, I_rf2*L_k2(I_dc) = I_rf1*L_k1(I_dc).
``taylor_coefficients`` extracts the same coefficients numerically from the
energy callable and is the in-package check on the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Tuple

from .core import BiasState, MicroloopSpec
from .errors import PrecisionError

# per-photon self-Kerr rate [Hz]; an angular rate of 2*pi*0.1 rad/s.
# Estimated from the measured bifurcation power, configured rather than
# derived from the quartic coefficient.
DEFAULT_KERR_RATE_HZ = 0.1


@dataclass(frozen=True)
class NonlinearCoefficients:
    """Cubic/quartic energy coefficients plus the configured Kerr rate.

    ``twm`` multiplies I_rf2**3 [J/A^3 = H/A]; ``fwm`` multiplies I_rf2**4
    [J/A^4 = H/A^2]; ``kerr_rate`` is the per-photon self-Kerr in Hz.
    """

    twm: float
    fwm: float
    kerr_rate: float

    def __post_init__(self) -> None:
        if self.fwm <= 0:
            raise ValueError("four-wave-mixing coefficient must be positive")


def dc_current(external_field: float, gap: float, loop_dc_inductance: float) -> float:
    """Loop supercurrent I_dc = B_ext*d/L_dc [A]; sign follows the field."""
    if gap <= 0 or loop_dc_inductance <= 0:
        raise ValueError("gap and loop_dc_inductance must be positive")
    return external_field * gap / loop_dc_inductance


def kinetic_inductance(zero_current_inductance: float, current: float, i_star: float) -> float:
    """Current-dependent kinetic inductance L0*(1 + (I/I*)**2) [H]."""
    if i_star <= 0:
        raise ValueError("i_star must be positive")
    return zero_current_inductance * (1.0 + (current / i_star) ** 2)


def fractional_frequency_shift(loop: MicroloopSpec, bias: BiasState) -> float:
    """Relative mode shift -(gamma/2)*(I_dc/I2*)**2; zero or negative."""
    ratio = bias.dc_current / loop.i_star_narrow
    return -(loop.width_ratio / 2.0) * ratio * ratio


def rf_current_ratio(loop: MicroloopSpec, bias: BiasState) -> float:
    """I_rf1/I_rf2 from current division linearized at the dc point."""
    l_wide_dc = kinetic_inductance(loop.inductance_wide, bias.dc_current, loop.i_star_wide)
    l_narrow_dc = kinetic_inductance(loop.inductance_narrow, bias.dc_current, loop.i_star_narrow)
    return l_narrow_dc / l_wide_dc


def loop_energy(i_rf2: float, loop: MicroloopSpec, bias: BiasState) -> float:
    """Inductive energy of the loop at narrow-wire rf current ``i_rf2`` [J].

    E = L1*(1+(I1/I1*)**2)*I1**2/2 + L2*(1+(I2/I2*)**2)*I2**2/2 with
    I1 = I_dc + I_rf1 and I2 = I_dc - I_rf2.  Raises ``ValueError`` when
    either wire is pushed past its characteristic current.
    """
    i_wide = bias.dc_current + i_rf2 * rf_current_ratio(loop, bias)
    i_narrow = bias.dc_current - i_rf2
    if abs(i_wide) >= loop.i_star_wide or abs(i_narrow) >= loop.i_star_narrow:
        raise ValueError("current exceeds the superconducting regime of a nanowire")
    e_wide = 0.5 * kinetic_inductance(loop.inductance_wide, i_wide, loop.i_star_wide) * i_wide**2
    e_narrow = (
        0.5 * kinetic_inductance(loop.inductance_narrow, i_narrow, loop.i_star_narrow) * i_narrow**2
    )
    return e_wide + e_narrow


def twm_fwm_coefficients(
    loop: MicroloopSpec,
    bias: BiasState,
    kerr_rate: float = DEFAULT_KERR_RATE_HZ,
) -> NonlinearCoefficients:
    """Closed-form three- and four-wave-mixing coefficients.

    Both are normalized to the narrow wire: with i* = I2* and the dc current
    I_dc,

        T = 2 I_dc L2/i*^2 * [((I_dc^2+i*^2)/(g^2 I_dc^2+i*^2))^3 - 1]
        F = L2/(2 i*^2) * [1 + ((I_dc^2+i*^2)/(g^2 I_dc^2+i*^2))^4 / g]

    T vanishes for a symmetric loop (gamma = 1) and at zero bias; F is
    strictly positive.  ``taylor_coefficients`` applied to ``loop_energy``
    reproduces both directly as the cubic/quartic energy coefficients.
    """
    i_star = loop.i_star_narrow
    l_narrow = loop.inductance_narrow
    gamma = loop.width_ratio
    i_dc = bias.dc_current
    ratio = (i_dc**2 + i_star**2) / (gamma**2 * i_dc**2 + i_star**2)
    twm = 2.0 * i_dc * l_narrow / i_star**2 * (ratio**3 - 1.0)
    fwm = l_narrow / (2.0 * i_star**2) * (1.0 + ratio**4 / gamma)
    return NonlinearCoefficients(twm=twm, fwm=fwm, kerr_rate=kerr_rate)


def taylor_coefficients(
    energy: Callable[[float], float],
    scale: float = 1.0,
    rel_tol: float = 1e-6,
    max_halvings: int = 8,
) -> Tuple[float, float]:
    """Cubic and quartic Taylor coefficients of ``energy`` about zero.

    Uses five-point central-difference stencils for the third and fourth
    derivatives, halving the step from 0.1*``scale`` with Richardson
    extrapolation until successive extrapolants agree to ``rel_tol``.
    Raises ``PrecisionError`` when the extrapolation never stabilizes.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")

    def stencil(h: float) -> Tuple[float, float]:
        f_m2, f_m1 = energy(-2.0 * h), energy(-h)
        f_0 = energy(0.0)
        f_p1, f_p2 = energy(h), energy(2.0 * h)
        d3 = (-f_m2 + 2.0 * f_m1 - 2.0 * f_p1 + f_p2) / (2.0 * h**3)
        d4 = (f_m2 - 4.0 * f_m1 + 6.0 * f_0 - 4.0 * f_p1 + f_p2) / h**4
        return d3 / 6.0, d4 / 24.0

    h = 0.1 * scale
    prev3, prev4 = stencil(h)
    extrap_prev: Tuple[float, float] | None = None
    for _ in range(max_halvings):
        h *= 0.5
        cur3, cur4 = stencil(h)
        # central differences carry O(h^2) truncation; 4:1 Richardson weights
        extrap = ((4.0 * cur3 - prev3) / 3.0, (4.0 * cur4 - prev4) / 3.0)
        if extrap_prev is not None:
            floor3 = abs(extrap[1]) * scale + 1e-300
            floor4 = abs(extrap[1]) + 1e-300
            ok3 = abs(extrap[0] - extrap_prev[0]) <= rel_tol * max(abs(extrap[0]), floor3)
            ok4 = abs(extrap[1] - extrap_prev[1]) <= rel_tol * max(abs(extrap[1]), floor4)
            if ok3 and ok4:
                return extrap
        extrap_prev = extrap
        prev3, prev4 = cur3, cur4
    raise PrecisionError(
        f"Taylor-coefficient extrapolation did not converge to {rel_tol} "
        f"within {max_halvings} step halvings"
    )


def nonlinearity_report(loop: MicroloopSpec, bias: BiasState) -> Dict[str, float]:
    """Closed forms next to the numeric expansion, with their mismatch.

    ``c3``/``c4`` are the numeric cubic/quartic energy coefficients;
    ``twm``/``fwm`` the closed forms.  The numeric expansion confirms the
    closed forms are themselves the energy coefficients (no extra inductance
    factor), so the reported relative discrepancies sit at numerical noise.
    """
    coeffs = twm_fwm_coefficients(loop, bias)
    # generous step: the quartic term sits far below the dc energy offset,
    # so small steps drown in cancellation noise (amplified as 1/h^4)
    step_scale = 0.2 * min(
        loop.i_star_narrow - abs(bias.dc_current),
        loop.i_star_narrow,
    )
    c3, c4 = taylor_coefficients(
        lambda i: loop_energy(i, loop, bias), scale=step_scale
    )
    denom3 = max(abs(coeffs.twm), abs(c4) * loop.i_star_narrow, 1e-300)
    return {
        "twm": coeffs.twm,
        "fwm": coeffs.fwm,
        "c3": c3,
        "c4": c4,
        "c3_vs_twm_rel": abs(c3 - coeffs.twm) / denom3,
        "c4_vs_fwm_rel": abs(c4 - coeffs.fwm) / max(abs(coeffs.fwm), 1e-300),
    }
