"""State-vector simulation of the memory protocol.

Every quantity in `metrics` has a twin here that is obtained the long way:
amplitudes on an explicit wavenumber grid are propagated through each
scattering event, the photon counter is applied as a Kraus factor sqrt(eta(k))
on the detected channel, and measurements between interactions turn the state
into a wavenumber-indexed ensemble, exactly as an unresolved detector does.
Nothing is averaged before the step that physically averages it, which is what
makes the module useful as an oracle for the closed forms.

The grid convention follows `spectral.KGrid`: amplitudes carry the envelope
f(k_j) explicitly and quadratic functionals are summed against the plain dk
weights `w`, so the norm of a single-photon state is sum_j w_j |f(k_j)|^2 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ZeroProbability
from .params import (
    AtomQubit,
    DetectorModel,
    PhotonQubit,
    PulseSpec,
    SystemParams,
    as_detector,
    require_normalized,
    validate,
    validate_pulse,
)
from .scattering import t_elements
from .spectral import DEFAULT_QUAD, KGrid, QuadratureConfig, build_grid

ATOM_L, ATOM_R = 0, 1
POL_L, POL_R = 0, 1

#: Probability mass below which conditioning on an outcome is refused.
TINY_PROB = 1e-300


@dataclass(frozen=True)
class JointState:
    """Pure atom-photon state on a wavenumber grid.

    amps[a, p, j] is the amplitude of atom level a (0 = |L>, 1 = |R>) with a
    photon of polarization p (0 = k_L channel, 1 = k_R channel) at grid node
    k_j.  `loss_weight` accumulates the norm shed into the spontaneous-decay
    channel by earlier scattering events.
    """

    grid: KGrid
    amps: np.ndarray
    loss_weight: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.real(np.einsum("apj,apj,j->", self.amps,
                                       np.conjugate(self.amps), self.grid.w)))

    def atom_density(self) -> np.ndarray:
        """Reduced atomic density matrix, photon traced out.  Not normalized:
        its trace is the surviving probability mass."""
        return np.einsum("apj,bpj,j->ab", self.amps, np.conjugate(self.amps),
                         self.grid.w)


def prepare_input(atom: AtomQubit, photon: PhotonQubit, grid: KGrid) -> JointState:
    """Product state (atomic qubit) x (polarization qubit with envelope f)."""
    require_normalized(atom)
    require_normalized(photon)
    amps = np.zeros((2, 2, grid.n), dtype=complex)
    for a, qa in ((ATOM_L, atom.a_L), (ATOM_R, atom.a_R)):
        amps[a, POL_L] = qa * photon.c_L * grid.f
        amps[a, POL_R] = qa * photon.c_R * grid.f
    return JointState(grid=grid, amps=amps)


def apply_scattering(state: JointState, params: SystemParams) -> JointState:
    """One pass of the photon through the cavity.

    The bright channels |L, k_L> and |R, k_R> mix through the 2x2 block of
    t_elements; |L, k_R> and |R, k_L> pass through untouched.  Norm lost to
    spontaneous decay (gamma > 0) is added to loss_weight.
    """
    validate(params)
    t_ll, t_rr, t_lr, t_rl = t_elements(state.grid.k, params)
    before = state.norm
    amps = state.amps.copy()
    amps[ATOM_L, POL_L] = t_ll * state.amps[ATOM_L, POL_L] + t_lr * state.amps[ATOM_R, POL_R]
    amps[ATOM_R, POL_R] = t_rl * state.amps[ATOM_L, POL_L] + t_rr * state.amps[ATOM_R, POL_R]
    out = JointState(grid=state.grid, amps=amps, loss_weight=state.loss_weight)
    if params.gamma == 0.0:
        # unitary pass: keep the loss weight free of rounding residue
        return out
    return replace(out, loss_weight=out.loss_weight + before - out.norm)


@dataclass(frozen=True)
class AtomEnsemble:
    """Atomic state after the scattered photon was counted in the k_L channel.

    The counter does not resolve k, so the atom is left in a mixture indexed
    by the grid node: branch j has (unnormalized) amplitudes beta[:, j] and
    grid weight w_j.  `probability` is the detection probability; the branch
    amplitudes keep their raw scale, so sum_j w_j |beta[:, j]|^2 equals it.
    """

    grid: KGrid
    beta: np.ndarray
    probability: float

    def density(self) -> np.ndarray:
        """Normalized 2x2 atomic density matrix of the ensemble."""
        rho = np.einsum("aj,bj,j->ab", self.beta, np.conjugate(self.beta),
                        self.grid.w)
        return rho / self.probability


def detect_photon_L(state: JointState,
                    detector: DetectorModel | float = 1.0
                    ) -> tuple[AtomEnsemble, float]:
    """Count the photon in the k_L polarization channel.

    Returns the conditioned atomic ensemble and the detection probability
    P(k_L).  Raises ZeroProbability when that outcome has no support.
    """
    eta = as_detector(detector)(state.grid.k)
    beta = np.sqrt(eta) * state.amps[:, POL_L, :]
    prob = float(np.real(np.einsum("aj,aj,j->", beta, np.conjugate(beta),
                                   state.grid.w)))
    if prob < TINY_PROB:
        raise ZeroProbability("k_L photon detection")
    return AtomEnsemble(grid=state.grid, beta=beta, probability=prob), prob


@dataclass(frozen=True)
class RetrievalOutcome:
    """Result of scattering a retrieval photon and finding the atom in |L>.

    pol_l_amps[j, j'] and pol_r_amps[j, j'] are the released photon's
    amplitudes on the k_L / k_R channels at retrieval node k'_j', for storage
    branch j; they keep the raw scale of the stored ensemble.  `probability`
    is P(L) conditioned on the earlier detection, `fidelity` the overlap of
    the released photon with the target qubit, and `loss` the decay mass shed
    during retrieval (same conditioning).
    """

    storage_grid: KGrid
    grid: KGrid
    pol_l_amps: np.ndarray
    pol_r_amps: np.ndarray
    probability: float
    fidelity: float
    loss: float

    def photon_density(self) -> np.ndarray:
        """Released photon's density matrix rho[p, j', q, j''], normalized so
        that contracting the diagonal with the grid weights gives 1."""
        w1 = self.storage_grid.w
        stack = (self.pol_l_amps, self.pol_r_amps)
        rho = np.empty((2, self.grid.n, 2, self.grid.n), dtype=complex)
        for p in (POL_L, POL_R):
            for q in (POL_L, POL_R):
                rho[p, :, q, :] = np.einsum("ja,jb,j->ab", stack[p],
                                            np.conjugate(stack[q]), w1)
        mass = sum(np.real(np.einsum("ja,ja,j,a->", stack[p],
                                     np.conjugate(stack[p]), w1, self.grid.w))
                   for p in (POL_L, POL_R))
        return rho / float(mass)


def retrieve(stored: AtomEnsemble, params: SystemParams, pulse: PulseSpec,
             quad: QuadratureConfig = DEFAULT_QUAD,
             target: PhotonQubit = PhotonQubit(0.0, 1.0)) -> RetrievalOutcome:
    """Send a k_R-polarized retrieval photon and measure the atom.

    Each stored branch j sees the fresh photon envelope f'(k'): the |R>
    component scatters (T_RR keeps k_R, T_LR converts to k_L), the |L>
    component is transparent.  Finding the atom in |L> releases the qubit
    onto the photon; the outcome fidelity compares it with `target` carried
    by the same envelope.
    """
    validate(params)
    validate_pulse(pulse)
    require_normalized(target)
    grid2 = build_grid(pulse, quad, k_c=params.k_c)
    _, t_rr, t_lr, _ = t_elements(grid2.k, params)
    # Atom found in |L>: the transparent |L> branch keeps polarization k_R,
    # the scattered |R> branch arrives on k_L via T_LR.
    gam_l = stored.beta[ATOM_R][:, None] * (t_lr * grid2.f)[None, :]
    gam_r = stored.beta[ATOM_L][:, None] * grid2.f[None, :]
    w1 = stored.grid.w
    w2 = grid2.w
    mass = float(np.real(
        np.einsum("ja,ja,j,a->", gam_l, np.conjugate(gam_l), w1, w2)
        + np.einsum("ja,ja,j,a->", gam_r, np.conjugate(gam_r), w1, w2)))
    if mass < TINY_PROB:
        raise ZeroProbability("atom found in the retrieval level")
    # Overlap with the target qubit on the retrieval envelope, branch by
    # branch; the unresolved storage node makes the branches incoherent.
    ovl = (gam_l @ (w2 * np.conjugate(target.c_L * grid2.f))
           + gam_r @ (w2 * np.conjugate(target.c_R * grid2.f)))
    fidelity = float(np.real(np.sum(w1 * np.abs(ovl) ** 2)) / mass)
    survive = float(np.real(np.sum(
        w2 * np.abs(grid2.f) ** 2 * (np.abs(t_rr) ** 2 + np.abs(t_lr) ** 2))))
    decay = (0.0 if params.gamma == 0.0 else
             float(np.sum(w1 * np.abs(stored.beta[ATOM_R]) ** 2) * (1.0 - survive)))
    return RetrievalOutcome(
        storage_grid=stored.grid,
        grid=grid2,
        pol_l_amps=gam_l,
        pol_r_amps=gam_r,
        probability=mass / stored.probability,
        fidelity=fidelity,
        loss=decay / stored.probability,
    )


@dataclass(frozen=True)
class ReadoutOutcome:
    """Third-photon readout result: detection probability of the converted
    k_R photon and the atomic state conditioned on that click (None when the
    click has no support)."""

    probability: float
    conditioned: AtomQubit | None


def atomic_readout_via_third_photon(atom: AtomQubit, params: SystemParams,
                                    pulse: PulseSpec,
                                    quad: QuadratureConfig = DEFAULT_QUAD,
                                    detector: DetectorModel | float = 1.0
                                    ) -> ReadoutOutcome:
    """Interrogate the atom with a k_L-polarized probe photon.

    Only the |L> component converts the probe to the k_R channel (T_RL), so a
    k_R click occurs with probability |a_L|^2 [eta |T_RL|^2]_f and pins the
    atom to |R>.  A transparent pass (|R> atom) never clicks.
    """
    validate(params)
    validate_pulse(pulse)
    require_normalized(atom)
    grid = build_grid(pulse, quad, k_c=params.k_c)
    eta = as_detector(detector)(grid.k)
    _, _, _, t_rl = t_elements(grid.k, params)
    click = float(np.real(grid.average(eta * np.abs(t_rl) ** 2)))
    prob = click * abs(atom.a_L) ** 2
    if prob < TINY_PROB:
        return ReadoutOutcome(probability=prob, conditioned=None)
    return ReadoutOutcome(probability=prob, conditioned=AtomQubit(0.0, 1.0))


@dataclass(frozen=True)
class MemoryRecord:
    """End-to-end bookkeeping of one simulated store-and-retrieve cycle."""

    p_k_l: float
    p_l: float
    p_qm: float
    fidelity: float
    loss_weight: float
    readout: str
    p_readout: float | None
    p_total: float

    def to_dict(self) -> dict:
        out = {
            "P_kL": self.p_k_l,
            "P_L": self.p_l,
            "P_qm": self.p_qm,
            "fidelity": self.fidelity,
            "loss_weight": self.loss_weight,
            "readout": self.readout,
            "P_total": self.p_total,
        }
        if self.p_readout is not None:
            out["P_readout"] = self.p_readout
        return out


def run_memory_protocol(params: SystemParams, pulse: PulseSpec,
                        quad: QuadratureConfig = DEFAULT_QUAD,
                        photon: PhotonQubit = PhotonQubit(0.0, 1.0),
                        detector: DetectorModel | float = 1.0,
                        readout: str = "projective") -> MemoryRecord:
    """Simulate the full cycle: store a polarization qubit, retrieve it.

    readout="projective" ends with an ideal projective measurement of the
    atom.  readout="third_photon" heralds the same outcome with a probe
    photon instead: every retained branch acquires the identical spectral
    factor, so the released state and its fidelity are unchanged and only an
    extra success factor [eta |T_RL|^2]_f appears in p_total.
    """
    if readout not in ("projective", "third_photon"):
        raise ValueError(f"unknown readout mode: {readout!r}")
    grid = build_grid(pulse, quad, k_c=params.k_c)
    state = prepare_input(AtomQubit(0.0, 1.0), photon, grid)
    state = apply_scattering(state, params)
    stored, p_k_l = detect_photon_L(state, detector)
    outcome = retrieve(stored, params, pulse, quad, target=photon)
    p_qm = p_k_l * outcome.probability
    if readout == "projective":
        p_readout = None
        p_total = p_qm
    else:
        probe = atomic_readout_via_third_photon(AtomQubit(1.0, 0.0), params,
                                                pulse, quad, detector)
        p_readout = probe.probability
        p_total = p_qm * p_readout
    return MemoryRecord(
        p_k_l=p_k_l,
        p_l=outcome.probability,
        p_qm=p_qm,
        fidelity=outcome.fidelity,
        loss_weight=state.loss_weight + outcome.loss,
        readout=readout,
        p_readout=p_readout,
        p_total=p_total,
    )


def swap_transfer_fidelity(atom: AtomQubit, photon: PhotonQubit,
                           params: SystemParams, pulse: PulseSpec,
                           quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """One-shot swap fidelity from the propagated state.

    Scatters the photon off an arbitrary atomic pre-state, traces out the
    photon without any detection, and projects the atomic density matrix on
    the ideal swap image of the photonic qubit.  Decay mass counts as
    failure, matching the closed form in `metrics.transfer_fidelity`.
    """
    grid = build_grid(pulse, quad, k_c=params.k_c)
    state = apply_scattering(prepare_input(atom, photon, grid), params)
    rho = state.atom_density()
    psi = np.array([photon.c_R * np.exp(1j * params.theta_R),
                    -photon.c_L * np.exp(1j * params.theta_L)])
    return float(np.real(np.conjugate(psi) @ rho @ psi))


@dataclass(frozen=True)
class PhotonPair:
    """Two-photon polarization state c_LR |k_L, k'_R> + c_RL |k_R, k'_L>."""

    c_LR: complex
    c_RL: complex

    @property
    def norm_sq(self) -> float:
        return abs(self.c_LR) ** 2 + abs(self.c_RL) ** 2

    def normalized(self) -> "PhotonPair":
        n = np.sqrt(self.norm_sq)
        return PhotonPair(self.c_LR / n, self.c_RL / n)


@dataclass(frozen=True)
class TwoCavityState:
    """Pure state of two atom-cavity nodes, one photon at each.

    amps[a, b, p, q, j, j'] is the amplitude of atom 1 in level a, atom 2 in
    level b, photon 1 in polarization channel p at node k_j of grid_1, photon
    2 in polarization channel q at node k'_j' of grid_2.  `loss_weight` pools
    the decay mass of both cavities.
    """

    grid_1: KGrid
    grid_2: KGrid
    amps: np.ndarray
    loss_weight: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.real(np.einsum("abpqjk,abpqjk,j,k->", self.amps,
                                       np.conjugate(self.amps),
                                       self.grid_1.w, self.grid_2.w)))


def prepare_pair(pair: PhotonPair, grid_1: KGrid, grid_2: KGrid
                 ) -> TwoCavityState:
    """Both atoms in |R>, the photon pair c_LR |k_L, k'_R> + c_RL |k_R, k'_L>
    carried by the two grid envelopes."""
    require_normalized(pair)
    amps = np.zeros((2, 2, 2, 2, grid_1.n, grid_2.n), dtype=complex)
    envelope = grid_1.f[:, None] * grid_2.f[None, :]
    amps[ATOM_R, ATOM_R, POL_L, POL_R] = pair.c_LR * envelope
    amps[ATOM_R, ATOM_R, POL_R, POL_L] = pair.c_RL * envelope
    return TwoCavityState(grid_1=grid_1, grid_2=grid_2, amps=amps)


def scatter_pair(state: TwoCavityState, params_1: SystemParams,
                 params_2: SystemParams) -> TwoCavityState:
    """Scatter photon 1 off cavity 1 and photon 2 off cavity 2.

    The two events act on disjoint (atom, polarization) pairs, so their order
    is immaterial; decay mass from both is added to loss_weight.
    """
    validate(params_1)
    validate(params_2)
    before = state.norm
    psi = state.amps.copy()
    # Cavity 1 mixes (atom_1, pol_1); its kernel depends on node_1 only.  The
    # selected blocks have remaining axes (atom_2, pol_2, node_1, node_2).
    t_ll, t_rr, t_lr, t_rl = t_elements(state.grid_1.k, params_1)
    bright_l = psi[ATOM_L, :, POL_L, :].copy()
    bright_r = psi[ATOM_R, :, POL_R, :].copy()
    psi[ATOM_L, :, POL_L, :] = (t_ll[None, None, :, None] * bright_l
                                + t_lr[None, None, :, None] * bright_r)
    psi[ATOM_R, :, POL_R, :] = (t_rl[None, None, :, None] * bright_l
                                + t_rr[None, None, :, None] * bright_r)
    # Cavity 2 mixes (atom_2, pol_2) with a kernel on node_2.
    t_ll, t_rr, t_lr, t_rl = t_elements(state.grid_2.k, params_2)
    bright_l = psi[:, ATOM_L, :, POL_L].copy()
    bright_r = psi[:, ATOM_R, :, POL_R].copy()
    psi[:, ATOM_L, :, POL_L] = (t_ll[None, None, None, :] * bright_l
                                + t_lr[None, None, None, :] * bright_r)
    psi[:, ATOM_R, :, POL_R] = (t_rl[None, None, None, :] * bright_l
                                + t_rr[None, None, None, :] * bright_r)
    out = TwoCavityState(grid_1=state.grid_1, grid_2=state.grid_2, amps=psi,
                         loss_weight=state.loss_weight)
    if params_1.gamma == 0.0 and params_2.gamma == 0.0:
        return out
    return replace(out, loss_weight=out.loss_weight + before - out.norm)


@dataclass(frozen=True)
class EntanglementOutcome:
    """Two-cavity storage result: heralding (or survival) probability and the
    fidelity against the swap image c_LR |RL> + c_RL |LR> of the pair."""

    probability: float
    fidelity: float
    mode: str


def entanglement_storage(pair: PhotonPair,
                         params_1: SystemParams, params_2: SystemParams,
                         pulse_1: PulseSpec, pulse_2: PulseSpec,
                         quad: QuadratureConfig = DEFAULT_QUAD,
                         detector_1: DetectorModel | float = 1.0,
                         detector_2: DetectorModel | float = 1.0,
                         mode: str = "postselect") -> EntanglementOutcome:
    """Store one photon of an entangled pair in each of two cavities.

    mode="postselect": both scattered photons are counted in their k_L
    channels and the fidelity is the heralded overlap with the swap image,
    the wavenumber-diagonal branches added coherently under the detection
    measure.  For identical cavities this reproduces the single-qubit memory
    fidelity for every input pair.

    mode="swap": no photon detection at all; the photons are traced out and
    the two-atom density matrix is projected on the swap image, decay and
    transparent passes counting as failure (probability reports the
    surviving trace).
    """
    if mode not in ("postselect", "swap"):
        raise ValueError(f"unknown storage mode: {mode!r}")
    validate_pulse(pulse_1)
    validate_pulse(pulse_2)
    grid_1 = build_grid(pulse_1, quad, k_c=params_1.k_c)
    grid_2 = build_grid(pulse_2, quad, k_c=params_2.k_c)
    envelope = grid_1.f[:, None] * grid_2.f[None, :]
    state = scatter_pair(prepare_pair(pair, grid_1, grid_2), params_1,
                         params_2)
    psi = state.amps
    w1, w2 = grid_1.w, grid_2.w
    if mode == "swap":
        rho4 = np.einsum("abpqjk,cdpqjk,j,k->abcd", psi, np.conjugate(psi),
                         w1, w2)
        target = np.zeros((2, 2), dtype=complex)
        target[ATOM_R, ATOM_L] = pair.c_LR
        target[ATOM_L, ATOM_R] = pair.c_RL
        fidelity = float(np.real(np.einsum("ab,abcd,cd->",
                                           np.conjugate(target), rho4, target)))
        probability = float(np.real(np.einsum("abab->", rho4)))
        return EntanglementOutcome(probability=probability, fidelity=fidelity,
                                   mode=mode)
    root_eta_1 = np.sqrt(as_detector(detector_1)(grid_1.k))
    root_eta_2 = np.sqrt(as_detector(detector_2)(grid_2.k))
    root_eta = root_eta_1[:, None] * root_eta_2[None, :]
    sel = psi[:, :, POL_L, POL_L] * root_eta[None, None]
    prob = float(np.real(np.einsum("abjk,abjk,j,k->", sel, np.conjugate(sel),
                                   w1, w2)))
    if prob < TINY_PROB:
        raise ZeroProbability("two-photon k_L detection")
    overlap = np.einsum("jk,jk,j,k->", np.conjugate(envelope) * root_eta,
                        np.conjugate(pair.c_RL) * sel[ATOM_L, ATOM_R]
                        + np.conjugate(pair.c_LR) * sel[ATOM_R, ATOM_L],
                        w1, w2)
    weight = (float(np.real(grid_1.average(root_eta_1 ** 2)))
              * float(np.real(grid_2.average(root_eta_2 ** 2))))
    fidelity = float(abs(overlap) ** 2 / (weight * prob))
    return EntanglementOutcome(probability=prob, fidelity=fidelity, mode=mode)
