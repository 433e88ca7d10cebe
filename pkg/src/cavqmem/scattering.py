"""Frequency-resolved scattering of a single photon off the atom-cavity system.

Amplitude conventions: a photon of polarization p and wavenumber k couples to
one ground-state transition with

    g_p(k) = lambda_p sqrt(kappa/pi) e^{i theta_p} / (k - k_c + i kappa),

and the bright superposition of the two ground states acquires the phase
factor

    e^{i phi_s(k)} = (k - k_c + i kappa) w_+(k - k_c)
                     / [(k - k_c - i kappa) w_-(k - k_c)],
    w_pm(s) = s^2 - (delta_e - i gamma pm i kappa) s
              - lambda^2 pm i kappa (delta_e - i gamma),

while the dark superposition is untouched.  For gamma > 0 the phase factor is
sub-unimodular (|w_+|^2 - |w_-|^2 = -4 kappa gamma lambda^2), so the 2x2
polarization map below is a contraction; the missing weight is the photon
lost to free-space emission.

All wavenumber arguments accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator
from .params import SystemParams


def coupling_amplitude(k, params: SystemParams, pol: str):
    """Cavity-filtered coupling g_pol(k) for pol in {"L", "R"}."""
    if pol == "L":
        strength, phase = params.lambda_L, params.theta_L
    elif pol == "R":
        strength, phase = params.lambda_R, params.theta_R
    else:
        raise ValueError(f"pol must be 'L' or 'R', got {pol!r}")
    s = np.asarray(k, dtype=float) - params.k_c
    out = strength * np.sqrt(params.kappa / np.pi) * np.exp(1j * phase) / (s + 1j * params.kappa)
    return out if out.ndim else complex(out)


def bright_phase_factor(k, params: SystemParams):
    """Phase factor e^{i phi_s(k)} of the bright ground-state superposition."""
    s = np.asarray(k, dtype=float) - params.k_c
    a = params.delta_e - 1j * params.gamma
    ik = 1j * params.kappa
    lam2 = params.lambda_sq
    w_plus = s * s - (a + ik) * s - lam2 + ik * a
    w_minus = s * s - (a - ik) * s - lam2 - ik * a
    den = (s - ik) * w_minus
    if np.any(np.abs(den) < 1e-300):
        raise DegenerateDenominator()
    out = (s + ik) * w_plus / den
    return out if out.ndim else complex(out)


def scattered_amplitude(k, params: SystemParams):
    """Half the deviation of the phase factor from unity, h(k) = (e^{i phi_s} - 1)/2.

    This is the amplitude with which the bright component is rephased; the
    polarization-flip element is T_LR = e^{-i(theta_L - theta_R)} sin(2 xi) h(k),
    and every averaged fidelity is built from h.
    """
    return (bright_phase_factor(k, params) - 1.0) / 2.0


def t_elements(k, params: SystemParams):
    """The four polarization-map elements at wavenumber(s) k.

    Returns (t_ll, t_rr, t_lr, t_rl) with the convention t_xy = amplitude for
    the incoming channel |y, k_y> to leave in |x, k_x>.  The cross channels
    |L, k_R> and |R, k_L> are invariant and carry no element here.
    """
    phase = bright_phase_factor(k, params)
    sin2 = params.sin_xi**2
    cos2 = params.cos_xi**2
    sc = params.sin_xi * params.cos_xi
    cross = np.exp(-1j * (params.theta_L - params.theta_R))
    t_ll = phase * sin2 + cos2
    t_rr = sin2 + phase * cos2
    t_lr = cross * sc * (phase - 1.0)
    t_rl = np.conjugate(cross) * sc * (phase - 1.0)
    return t_ll, t_rr, t_lr, t_rl


@dataclass(frozen=True)
class ScatteringMatrix:
    """Polarization map at a single wavenumber."""

    k: float
    phase_factor: complex
    t_ll: complex
    t_rr: complex
    t_lr: complex
    t_rl: complex

    def as_array(self) -> np.ndarray:
        """2x2 array on the (L, R) basis, rows = out, columns = in."""
        return np.array([[self.t_ll, self.t_lr], [self.t_rl, self.t_rr]])


def t_matrix(k: float, params: SystemParams) -> ScatteringMatrix:
    """Scattering matrix at one wavenumber."""
    t_ll, t_rr, t_lr, t_rl = t_elements(float(k), params)
    return ScatteringMatrix(
        k=float(k),
        phase_factor=complex(bright_phase_factor(float(k), params)),
        t_ll=complex(t_ll),
        t_rr=complex(t_rr),
        t_lr=complex(t_lr),
        t_rl=complex(t_rl),
    )
