"""Closed-form fidelities and success probabilities of the memory protocol.

Protocol reminder: the atom starts in |R>, the qubit photon
c_L |k_L> + c_R |k_R> scatters, the outgoing photon is detected in the k_L
polarization channel (efficiency eta), which leaves the qubit on the atom; a
later retrieval photon |k_R> scatters and a projective measurement finds the
atom in |L>, releasing the qubit onto the retrieval photon.

All the averages below are over the pulse intensity |f(k)|^2 and use the
quadrature rules from `spectral`.  The state-vector oracle in `statesim`
recomputes each quantity from explicitly propagated amplitudes; the pair is
cross-checked in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidField, UnequalCouplings, ZeroScatteringWeight
from .params import (
    AtomQubit,
    DetectorModel,
    PhotonQubit,
    PulseSpec,
    SystemParams,
    as_detector,
    point_to_dict,
    require_normalized,
    validate,
    validate_pulse,
)
from .scattering import scattered_amplitude, t_elements
from .spectral import DEFAULT_QUAD, KGrid, QuadratureConfig, build_grid

#: Relative coupling asymmetry below which lambda_L and lambda_R count as equal.
EQUAL_COUPLING_RTOL = 1e-12

#: Probability mass below which conditioning and fidelity ratios are refused.
TINY_WEIGHT = 1e-300


def _grid(params: SystemParams, pulse: PulseSpec, quad: QuadratureConfig) -> KGrid:
    validate(params)
    validate_pulse(pulse)
    return build_grid(pulse, quad, k_c=params.k_c)


def swap_fidelity(params: SystemParams, pulse: PulseSpec,
                  quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """One-shot state-swap fidelity, [|h(k)|^2]_f.

    Physically meaningful as a swap fidelity only for lambda_L = lambda_R
    (reports carry a flag); for other mixing angles it still sets the success
    probability through P_qm = eta sin^2(2 xi) [|h|^2]_f.
    """
    grid = _grid(params, pulse, quad)
    h = scattered_amplitude(grid.k, params)
    return float(np.real(grid.average(np.abs(h) ** 2)))


def swap_fidelity_leading(params: SystemParams, pulse: PulseSpec) -> float:
    """Narrow-pulse, strong-coupling expansion of the swap fidelity:

        1 - 2 kappa gamma / lambda^2
          - (kappa delta_e / lambda^2 + delta_p / kappa)^2.

    Choosing delta_p = -(kappa/lambda)^2 delta_e cancels the detuning penalty
    identically.
    """
    validate(params)
    validate_pulse(pulse)
    lam2 = params.lambda_sq
    penalty = params.kappa * params.delta_e / lam2 + pulse.delta_p / params.kappa
    return 1.0 - 2.0 * params.kappa * params.gamma / lam2 - penalty * penalty


def qm_fidelity(params: SystemParams, pulse: PulseSpec,
                quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Memory fidelity of the full store-and-retrieve cycle,

        F_qm = |[h(k)]_f|^2 / [|h(k)|^2]_f.

    Independent of the coupling ratio lambda_L/lambda_R (only lambda^2 enters
    h) and of the detection efficiency.  Raises ZeroScatteringWeight when the
    pulse effectively never scatters.
    """
    grid = _grid(params, pulse, quad)
    h = scattered_amplitude(grid.k, params)
    mean_sq = float(np.real(grid.average(np.abs(h) ** 2)))
    if mean_sq < TINY_WEIGHT:
        raise ZeroScatteringWeight()
    mean = grid.average(h)
    return float(abs(mean) ** 2 / mean_sq)


def qm_success(params: SystemParams, pulse: PulseSpec,
               quad: QuadratureConfig = DEFAULT_QUAD, eta: float = 1.0) -> float:
    """Success probability of the memory cycle, P_qm = eta [|T_LR(k)|^2]_f.

    Equal to eta sin^2(2 xi) [|h|^2]_f; the test suite checks the two routes
    against each other.  Input-qubit independent for constant eta.
    """
    if not 0.0 < eta <= 1.0:
        raise InvalidField("eta", "constant efficiency must lie in (0, 1]")
    grid = _grid(params, pulse, quad)
    _, _, t_lr, _ = t_elements(grid.k, params)
    return float(eta * np.real(grid.average(np.abs(t_lr) ** 2)))


def storage_success(params: SystemParams, pulse: PulseSpec,
                    quad: QuadratureConfig = DEFAULT_QUAD,
                    photon: PhotonQubit = PhotonQubit(0.0, 1.0),
                    detector: DetectorModel | float = 1.0) -> float:
    """P(k_L): probability that the scattered qubit photon is detected in the
    k_L polarization channel, [eta(k) (|c_L|^2 + |c_R|^2 |T_LR(k)|^2)]_f."""
    require_normalized(photon)
    grid = _grid(params, pulse, quad)
    eta = as_detector(detector)(grid.k)
    _, _, t_lr, _ = t_elements(grid.k, params)
    cl2 = abs(photon.c_L) ** 2
    cr2 = abs(photon.c_R) ** 2
    return float(np.real(grid.average(eta * (cl2 + cr2 * np.abs(t_lr) ** 2))))


def retrieval_success(params: SystemParams, pulse: PulseSpec,
                      quad: QuadratureConfig = DEFAULT_QUAD,
                      photon: PhotonQubit = PhotonQubit(0.0, 1.0),
                      detector: DetectorModel | float = 1.0) -> float:
    """P(L): probability that the retrieval scattering leaves the atom in |L>,
    given a successful storage detection.  The projective atomic measurement
    is ideal; eta(k) enters only through the storage-stage mixture weights,
    so for constant eta the efficiency cancels."""
    require_normalized(photon)
    grid = _grid(params, pulse, quad)
    eta = as_detector(detector)(grid.k)
    _, _, t_lr, _ = t_elements(grid.k, params)
    t2 = np.abs(t_lr) ** 2
    cl2 = abs(photon.c_L) ** 2
    cr2 = abs(photon.c_R) ** 2
    mean_t2 = np.real(grid.average(t2))
    numerator = cr2 * np.real(grid.average(eta * t2)) + cl2 * mean_t2 * np.real(grid.average(eta))
    denominator = np.real(grid.average(eta * (cl2 + cr2 * t2)))
    if denominator < TINY_WEIGHT:
        raise ZeroScatteringWeight()
    return float(numerator / denominator)


def storage_retrieval_fidelity(params: SystemParams, pulse: PulseSpec,
                               quad: QuadratureConfig = DEFAULT_QUAD,
                               photon: PhotonQubit = PhotonQubit(0.0, 1.0),
                               detector: DetectorModel | float = 1.0) -> float:
    """Fidelity of the retrieved photon against the stored qubit.

    For constant detection efficiency this reduces to

        F = F_qm + (1 - F_qm) (1 - |c_L|^2)^2,

    so a pure |k_R> input retrieves perfectly (its spectral distortion
    collapses into a branch weight) while a pure |k_L> input bears the full
    retrieval distortion and realizes F_qm; every input does at least as well
    as F_qm.  For tabulated eta(k) the ratio of spectral averages is
    evaluated directly.
    """
    require_normalized(photon)
    grid = _grid(params, pulse, quad)
    eta = as_detector(detector)(grid.k)
    _, _, t_lr, _ = t_elements(grid.k, params)
    t2 = np.abs(t_lr) ** 2
    cl2 = abs(photon.c_L) ** 2
    cr2 = abs(photon.c_R) ** 2
    mean_t = grid.average(t_lr)
    mean_t2 = np.real(grid.average(t2))
    mean_eta = np.real(grid.average(eta))
    mean_eta_t = grid.average(eta * t_lr)
    mean_eta_t2 = np.real(grid.average(eta * t2))
    numerator = (cr2 * cr2 * mean_eta_t2
                 + 2.0 * cr2 * cl2 * np.real(np.conjugate(mean_t) * mean_eta_t)
                 + cl2 * cl2 * abs(mean_t) ** 2 * mean_eta)
    denominator = cr2 * mean_eta_t2 + cl2 * mean_t2 * mean_eta
    if denominator < TINY_WEIGHT:
        raise ZeroScatteringWeight()
    return float(numerator / denominator)


def swap_target_atom(photon: PhotonQubit, params: SystemParams) -> AtomQubit:
    """Atomic state onto which an ideal swap maps the photonic qubit:
    c_R e^{i theta_R} |L> - c_L e^{i theta_L} |R>."""
    return AtomQubit(
        a_L=photon.c_R * np.exp(1j * params.theta_R),
        a_R=-photon.c_L * np.exp(1j * params.theta_L),
    )


def swap_target_photon(atom: AtomQubit, params: SystemParams) -> PhotonQubit:
    """Photonic state onto which an ideal swap maps the atomic qubit:
    -a_R e^{i theta_R} |k_L> + a_L e^{i theta_L} |k_R>."""
    return PhotonQubit(
        c_L=-atom.a_R * np.exp(1j * params.theta_R),
        c_R=atom.a_L * np.exp(1j * params.theta_L),
    )


def transfer_fidelity(params: SystemParams, pulse: PulseSpec,
                      quad: QuadratureConfig = DEFAULT_QUAD,
                      atom: AtomQubit = AtomQubit(0.0, 1.0),
                      photon: PhotonQubit = PhotonQubit(0.0, 1.0)) -> float:
    """One-shot swap fidelity for an arbitrary atomic pre-state,

        F = F_swap + (1 - F_swap) |<swap target | atom>|^2,

    valid for lambda_L = lambda_R only (raises UnequalCouplings otherwise).
    Summed over the photon inputs |k_L> and |k_R> at any fixed atom this
    yields 1 + [|T_LR|^2]_f.
    """
    validate(params)
    if abs(params.lambda_L - params.lambda_R) > EQUAL_COUPLING_RTOL * params.lam:
        raise UnequalCouplings(params.lambda_L, params.lambda_R)
    require_normalized(atom)
    require_normalized(photon)
    f_swap = swap_fidelity(params, pulse, quad)
    target = swap_target_atom(photon, params)
    overlap = (np.conjugate(target.a_L) * atom.a_L
               + np.conjugate(target.a_R) * atom.a_R)
    return float(f_swap + (1.0 - f_swap) * abs(overlap) ** 2)


def convergence_delta(params: SystemParams, pulse: PulseSpec,
                      quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """|[h]_f at doubled node count - [h]_f at the configured count|.

    The quadrature health check: below 1e-9 for every bundled curve-family
    parameter point at the default counts.
    """
    grid_1 = _grid(params, pulse, quad)
    grid_2 = build_grid(pulse, quad.doubled(), k_c=params.k_c)
    mean_1 = grid_1.average(scattered_amplitude(grid_1.k, params))
    mean_2 = grid_2.average(scattered_amplitude(grid_2.k, params))
    return float(abs(mean_2 - mean_1))


@dataclass(frozen=True)
class MetricReport:
    """Bundle of the closed-form figures of merit at one parameter point.

    P_kL and P_L depend on the input qubit (their product P_qm does not, for
    constant eta); the qubit used is echoed in the serialized form.
    """

    params: SystemParams
    pulse: PulseSpec
    eta: float
    photon: PhotonQubit
    F_swap: float
    F_swap_leading: float
    F_qm: float
    P_kL: float
    P_L: float
    P_qm: float
    P_qm_conditional: float
    f_swap_meaningful: bool

    def to_dict(self) -> dict:
        """One flat JSON-ready dict: parameter echo plus the metrics."""
        out = point_to_dict(self.params, self.pulse)
        out["eta"] = self.eta
        out["input_c_L"] = [float(np.real(self.photon.c_L)), float(np.imag(self.photon.c_L))]
        out["input_c_R"] = [float(np.real(self.photon.c_R)), float(np.imag(self.photon.c_R))]
        out["F_swap"] = self.F_swap
        out["F_swap_leading"] = self.F_swap_leading
        out["F_qm"] = self.F_qm
        out["P_kL"] = self.P_kL
        out["P_L"] = self.P_L
        out["P_qm"] = self.P_qm
        out["P_qm_conditional"] = self.P_qm_conditional
        out["f_swap_meaningful"] = self.f_swap_meaningful
        return out


_BALANCED = PhotonQubit(1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0))


def compute_report(params: SystemParams, pulse: PulseSpec,
                   quad: QuadratureConfig = DEFAULT_QUAD, eta: float = 1.0,
                   photon: PhotonQubit = _BALANCED) -> MetricReport:
    """Evaluate every closed-form metric at one parameter point."""
    p_qm = qm_success(params, pulse, quad, eta)
    meaningful = abs(params.lambda_L - params.lambda_R) <= EQUAL_COUPLING_RTOL * params.lam
    return MetricReport(
        params=params,
        pulse=pulse,
        eta=eta,
        photon=photon,
        F_swap=swap_fidelity(params, pulse, quad),
        F_swap_leading=swap_fidelity_leading(params, pulse),
        F_qm=qm_fidelity(params, pulse, quad),
        P_kL=storage_success(params, pulse, quad, photon, eta),
        P_L=retrieval_success(params, pulse, quad, photon, eta),
        P_qm=p_qm,
        P_qm_conditional=p_qm * p_qm,
        f_swap_meaningful=meaningful,
    )
