"""Command-line front end.

Subcommands: `point` (closed-form metrics and scattering amplitudes at one
parameter point), `fig2` / `fig3` / `fig4` (the bundled curve families as
CSV data), `sweep` (generic one- or two-axis parameter scans), `oracle` (one
simulated storage/retrieval cycle cross-checked against the closed forms),
and `validate` (the invariant suite; nonzero exit on failure).

Unit convention: the spontaneous-emission rate gamma is the unit (gamma = 1),
so "kappa = 2 gamma" is simply kappa = 2; wavenumbers are measured in the
same unit relative to k = 0.  No MHz <-> rate conversion is provided.

CSV outputs are deterministic byte for byte at fixed configuration: fixed
sampling order, fixed summation order, floats serialized with repr.  The
first line of every CSV is a '#'-prefixed JSON comment recording the full
configuration including the quadrature node counts.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import metrics
from .errors import CavqmemError, InvalidField
from .params import (
    PhotonQubit,
    Profile,
    PulseSpec,
    SystemParams,
    point_from_dict,
    point_to_dict,
    validate,
    validate_pulse,
)
from .scattering import (
    bright_phase_factor,
    coupling_amplitude,
    scattered_amplitude,
    t_elements,
    t_matrix,
)
from .spectral import DEFAULT_QUAD, QuadratureConfig, build_grid
from .statesim import run_memory_protocol

#: kappa of every bundled curve family, in units of gamma = 1.
FAMILY_KAPPA = 2.0

#: (label, delta_e, delta_p) triples of the detuning cases on the
#: cooperativity and coupling-ratio curve families.
FIG2_CASES: tuple[tuple[str, float, float], ...] = (
    ("solid", 0.0, 0.0),
    ("dashed", 5.0, 0.0),
    ("dotted", 0.0, 0.5),
)

#: Detuning cases of the pulse-bandwidth family (larger detunings there).
FIG3_CASES: tuple[tuple[str, float, float], ...] = (
    ("solid", 0.0, 0.0),
    ("dashed", 10.0, 0.0),
    ("dotted", 0.0, 2.0),
)

PARAM_COLUMNS = (
    "lambda_L", "lambda_R", "theta_L", "theta_R", "kappa", "gamma", "k_c",
    "delta_e", "profile", "delta_p", "kappa_p", "x_0",
)
SWEEP_HEADER = PARAM_COLUMNS + (
    "eta", "F_swap", "F_swap_leading", "F_qm", "P_qm", "P_qm_conditional",
)

PULSE_FIELD_NAMES = ("delta_p", "kappa_p", "x_0")
SYSTEM_FIELD_NAMES = (
    "lambda_L", "lambda_R", "theta_L", "theta_R", "kappa", "gamma", "k_c",
    "delta_e",
)
#: Derived sweep axes: coupling ratio at fixed lambda^2, and lambda^2/kappa
#: gamma at fixed ratio.
VIRTUAL_FIELD_NAMES = ("lambda_ratio", "cooperativity")


def family_params(coop: float, ratio: float = 1.0,
                  delta_e: float = 0.0) -> SystemParams:
    """Curve-family parameter point: lambda^2 = coop * kappa * gamma with the
    given coupling ratio lambda_L/lambda_R, kappa = 2, gamma = 1."""
    lam_sq = coop * FAMILY_KAPPA
    lam_r = math.sqrt(lam_sq / (1.0 + ratio * ratio))
    return SystemParams(lambda_L=ratio * lam_r, lambda_R=lam_r,
                        kappa=FAMILY_KAPPA, gamma=1.0, delta_e=delta_e)


def fig2_rows(quad: QuadratureConfig = DEFAULT_QUAD, count: int = 61
              ) -> list[tuple]:
    """Memory and swap fidelity versus cooperativity, Gaussian pulse with
    kappa_p = 0.1 kappa, one row block per detuning case."""
    coops = np.geomspace(1.0, 100.0, count)
    rows = []
    for case, delta_e, delta_p in FIG2_CASES:
        pulse = PulseSpec(profile=Profile.GAUSSIAN, delta_p=delta_p,
                          kappa_p=0.1 * FAMILY_KAPPA)
        for coop in coops:
            params = family_params(float(coop), delta_e=delta_e)
            rows.append((float(coop), case,
                         metrics.qm_fidelity(params, pulse, quad),
                         metrics.swap_fidelity(params, pulse, quad)))
    return rows


def fig3_rows(quad: QuadratureConfig = DEFAULT_QUAD, count: int = 25
              ) -> list[tuple]:
    """Memory fidelity versus pulse bandwidth for both spectral profiles at
    cooperativity 20."""
    ratios = np.geomspace(0.01, 0.5, count)
    rows = []
    for profile in (Profile.GAUSSIAN, Profile.LORENTZIAN):
        for case, delta_e, delta_p in FIG3_CASES:
            params = family_params(20.0, delta_e=delta_e)
            for x in ratios:
                pulse = PulseSpec(profile=profile, delta_p=delta_p,
                                  kappa_p=float(x) * FAMILY_KAPPA)
                rows.append((float(x), profile.value, case,
                             metrics.qm_fidelity(params, pulse, quad)))
    return rows


def fig4_rows(quad: QuadratureConfig = DEFAULT_QUAD, count: int = 41
              ) -> list[tuple]:
    """Success probability versus coupling ratio at eta = 1 for cooperativity
    1, 10, 100, Gaussian pulse with kappa_p = 0.1 kappa."""
    ratios = np.geomspace(0.1, 10.0, count)
    # Pin the symmetric midpoint so the grid contains ratio 1 exactly.
    ratios[np.abs(ratios - 1.0) < 1e-9] = 1.0
    rows = []
    for case, delta_e, delta_p in FIG2_CASES:
        pulse = PulseSpec(profile=Profile.GAUSSIAN, delta_p=delta_p,
                          kappa_p=0.1 * FAMILY_KAPPA)
        for coop in (1.0, 10.0, 100.0):
            for ratio in ratios:
                params = family_params(coop, ratio=float(ratio),
                                       delta_e=delta_e)
                rows.append((float(ratio), coop, case,
                             metrics.qm_success(params, pulse, quad, eta=1.0)))
    return rows


@dataclass(frozen=True)
class SweepAxis:
    """One swept field: linear or log sampling of [lo, hi] at `count` points."""

    field: str
    scale: str
    lo: float
    hi: float
    count: int

    def __post_init__(self) -> None:
        known = SYSTEM_FIELD_NAMES + PULSE_FIELD_NAMES + VIRTUAL_FIELD_NAMES
        if self.field not in known:
            raise InvalidField(self.field, "not a sweepable field")
        if self.scale not in ("linear", "log"):
            raise InvalidField(self.field, f"unknown scale {self.scale!r}")
        if self.count < 2:
            raise InvalidField(self.field, "axis count must be >= 2")
        if self.scale == "log" and (self.lo <= 0.0 or self.hi <= 0.0):
            raise InvalidField(self.field, "log axis requires positive bounds")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """A one- or two-axis scan around a base parameter point."""

    params: SystemParams
    pulse: PulseSpec
    axes: tuple[SweepAxis, ...]
    eta: float = 1.0
    quad: QuadratureConfig = DEFAULT_QUAD

    def __post_init__(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise InvalidField("axes", "one or two sweep axes required")


def parse_axis(text: str) -> SweepAxis:
    """Parse the CLI axis syntax FIELD,SCALE,MIN,MAX,COUNT."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise InvalidField(text, "expected FIELD,SCALE,MIN,MAX,COUNT")
    return SweepAxis(field=parts[0], scale=parts[1], lo=float(parts[2]),
                     hi=float(parts[3]), count=int(parts[4]))


def _with_field(params: SystemParams, pulse: PulseSpec, field: str,
                value: float) -> tuple[SystemParams, PulseSpec]:
    if field in SYSTEM_FIELD_NAMES:
        return replace(params, **{field: value}), pulse
    if field in PULSE_FIELD_NAMES:
        return params, replace(pulse, **{field: value})
    if field == "lambda_ratio":
        lam_r = math.sqrt(params.lambda_sq / (1.0 + value * value))
        return replace(params, lambda_L=value * lam_r, lambda_R=lam_r), pulse
    if field == "cooperativity":
        scale = math.sqrt(value * params.kappa * params.gamma
                          / params.lambda_sq)
        return replace(params, lambda_L=scale * params.lambda_L,
                       lambda_R=scale * params.lambda_R), pulse
    raise InvalidField(field, "not a sweepable field")


def sweep_rows(spec: SweepSpec) -> list[tuple]:
    """Evaluate the metric columns on the sweep grid, outer axis major."""
    grids = [axis.values() for axis in spec.axes]
    rows = []
    for values in itertools.product(*grids):
        params, pulse = spec.params, spec.pulse
        for axis, value in zip(spec.axes, values):
            params, pulse = _with_field(params, pulse, axis.field,
                                        float(value))
        report = metrics.compute_report(params, pulse, spec.quad, spec.eta)
        echo = report.to_dict()
        rows.append(tuple(echo[c] for c in PARAM_COLUMNS)
                    + (spec.eta, report.F_swap, report.F_swap_leading,
                       report.F_qm, report.P_qm, report.P_qm_conditional))
    return rows


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, meta: dict, header: tuple[str, ...],
              rows: list[tuple]) -> None:
    """'#'-prefixed JSON metadata line, header row, then the data rows."""
    lines = ["# " + json.dumps(meta, sort_keys=True), ",".join(header)]
    lines.extend(",".join(_format_cell(v) for v in row) for row in rows)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# invariant suite

def _random_params(rng: np.random.Generator,
                   gamma: float | None = None) -> SystemParams:
    return SystemParams(
        lambda_L=rng.uniform(0.05, 5.0),
        lambda_R=rng.uniform(0.05, 5.0),
        theta_L=rng.uniform(-math.pi, math.pi),
        theta_R=rng.uniform(-math.pi, math.pi),
        kappa=rng.uniform(0.2, 5.0),
        gamma=rng.uniform(0.0, 3.0) if gamma is None else gamma,
        k_c=rng.uniform(-3.0, 3.0),
        delta_e=rng.uniform(-8.0, 8.0),
    )


def draw_equivalence_point(rng: np.random.Generator
                           ) -> tuple[SystemParams, PulseSpec, float]:
    """Random parameter set in the oracle-equivalence ranges: cooperativity
    in [1, 100], kappa_p/kappa in [0.01, 0.3], delta_e in [-10, 10] gamma,
    delta_p in [-2, 2] gamma, mixing angle inside (0, pi/2), either profile,
    constant detector efficiency in (0.25, 1]."""
    kappa, gamma = 2.0, 1.0
    lam = math.sqrt(10.0 ** rng.uniform(0.0, 2.0) * kappa * gamma)
    xi = rng.uniform(0.05, math.pi / 2 - 0.05)
    params = SystemParams(
        lambda_L=lam * math.sin(xi),
        lambda_R=lam * math.cos(xi),
        theta_L=rng.uniform(-math.pi, math.pi),
        theta_R=rng.uniform(-math.pi, math.pi),
        kappa=kappa,
        gamma=gamma,
        k_c=rng.uniform(-2.0, 2.0),
        delta_e=rng.uniform(-10.0, 10.0),
    )
    profile = Profile.GAUSSIAN if rng.random() < 0.5 else Profile.LORENTZIAN
    pulse = PulseSpec(
        profile=profile,
        delta_p=rng.uniform(-2.0, 2.0),
        kappa_p=kappa * 10.0 ** rng.uniform(-2.0, math.log10(0.3)),
        x_0=rng.uniform(0.0, 5.0),
    )
    return params, pulse, float(rng.uniform(0.25, 1.0))


def random_photon_qubit(rng: np.random.Generator) -> PhotonQubit:
    c_l_sq = rng.uniform(0.0, 1.0)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    return PhotonQubit(math.sqrt(c_l_sq),
                       math.sqrt(1.0 - c_l_sq) * complex(math.cos(phase),
                                                         math.sin(phase)))


def equivalence_deltas(params: SystemParams, pulse: PulseSpec, eta: float,
                       qubits: list[PhotonQubit],
                       quad: QuadratureConfig = DEFAULT_QUAD) -> dict[str, float]:
    """Worst |state oracle - closed form| per reported quantity."""
    base = run_memory_protocol(params, pulse, quad,
                               photon=PhotonQubit(1.0, 0.0), detector=eta)
    out = {
        "F_qm": abs(base.fidelity - metrics.qm_fidelity(params, pulse, quad)),
        "P_kL": 0.0, "P_L": 0.0, "P_qm": 0.0, "fidelity": 0.0,
    }
    p_qm_closed = metrics.qm_success(params, pulse, quad, eta)
    for qubit in qubits:
        record = run_memory_protocol(params, pulse, quad, photon=qubit,
                                     detector=eta)
        out["P_kL"] = max(out["P_kL"], abs(
            record.p_k_l - metrics.storage_success(params, pulse, quad,
                                                   qubit, eta)))
        out["P_L"] = max(out["P_L"], abs(
            record.p_l - metrics.retrieval_success(params, pulse, quad,
                                                   qubit, eta)))
        out["P_qm"] = max(out["P_qm"], abs(record.p_qm - p_qm_closed))
        out["fidelity"] = max(out["fidelity"], abs(
            record.fidelity - metrics.storage_retrieval_fidelity(
                params, pulse, quad, qubit, eta)))
    return out


def _gate_points() -> list[tuple[SystemParams, PulseSpec]]:
    """Representative parameter points of the three curve families for the
    node-doubling convergence gate."""
    points = []
    for case, delta_e, delta_p in FIG2_CASES:
        for coop in (1.0, 10.0, 100.0):
            points.append((family_params(coop, delta_e=delta_e),
                           PulseSpec(profile=Profile.GAUSSIAN,
                                     delta_p=delta_p,
                                     kappa_p=0.1 * FAMILY_KAPPA)))
    for profile in (Profile.GAUSSIAN, Profile.LORENTZIAN):
        for case, delta_e, delta_p in FIG3_CASES:
            for x in (0.01, 0.1, 0.5):
                points.append((family_params(20.0, delta_e=delta_e),
                               PulseSpec(profile=profile, delta_p=delta_p,
                                         kappa_p=x * FAMILY_KAPPA)))
    for ratio in (0.1, 1.0, 10.0):
        points.append((family_params(10.0, ratio=ratio),
                       PulseSpec(profile=Profile.GAUSSIAN,
                                 kappa_p=0.1 * FAMILY_KAPPA)))
    return points


def validate_suite(trials: int = 20, seed: int = 20112,
                   quad: QuadratureConfig = DEFAULT_QUAD
                   ) -> tuple[bool, list[str]]:
    """Cross-module invariant families plus oracle-equivalence trials.

    Returns (all_passed, report_lines).  The final family deliberately
    corrupts one matrix element and demands that the determinant identity
    notices, so a silently weakened identity check cannot pass unnoticed.
    """
    rng = np.random.default_rng(seed)
    lines: list[str] = []
    all_ok = True

    def check(passed: bool, name: str, detail: str) -> None:
        nonlocal all_ok
        all_ok = all_ok and bool(passed)
        lines.append(f"{'ok  ' if passed else 'FAIL'} {name}: {detail}")

    n_sets, n_k = 100, 100
    det_r = trace_r = cross_r = 0.0
    excess = -1.0
    for _ in range(n_sets):
        params = _random_params(rng)
        k = params.k_c + params.kappa * rng.uniform(-20.0, 20.0, n_k)
        t_ll, t_rr, t_lr, t_rl = t_elements(k, params)
        phase = bright_phase_factor(k, params)
        h = scattered_amplitude(k, params)
        det_r = max(det_r, float(np.max(np.abs(t_ll * t_rr - t_lr * t_rl
                                               - phase))))
        trace_r = max(trace_r, float(np.max(np.abs(t_ll + t_rr - 1.0
                                                   - phase))))
        cross_r = max(cross_r, float(np.max(np.abs(
            np.abs(t_lr) - params.sin_2xi * np.abs(h)))))
        excess = max(excess, float(np.max(np.abs(phase))) - 1.0)
    samples = n_sets * n_k
    check(det_r < 1e-12, "determinant identity",
          f"max residual {det_r:.2e} over {samples} samples")
    check(trace_r < 1e-12, "trace identity",
          f"max residual {trace_r:.2e} over {samples} samples")
    check(cross_r < 1e-12, "cross-element magnitude",
          f"max residual {cross_r:.2e} over {samples} samples")
    check(excess < 1e-12, "passivity of the bright phase",
          f"max |phase|-1 = {excess:.2e} over {samples} samples")

    rel_r = 0.0
    for _ in range(30):
        params = _random_params(rng)
        params = replace(params, lambda_R=params.lambda_L)
        k = params.k_c + params.kappa * rng.uniform(-20.0, 20.0, n_k)
        t_ll, _, t_lr, _ = t_elements(k, params)
        shift = np.exp(1j * (params.theta_L - params.theta_R))
        rel_r = max(rel_r, float(np.max(np.abs(t_ll - shift * t_lr - 1.0))))
    check(rel_r < 1e-12, "left-unit relation at equal couplings",
          f"max residual {rel_r:.2e}")

    unit_r = 0.0
    for _ in range(30):
        params = _random_params(rng, gamma=0.0)
        k = params.k_c + params.kappa * rng.uniform(-20.0, 20.0, n_k)
        t_ll, t_rr, t_lr, t_rl = t_elements(k, params)
        phase = bright_phase_factor(k, params)
        unit_r = max(unit_r, float(np.max(np.abs(np.abs(phase) - 1.0))))
        unit_r = max(unit_r, float(np.max(np.abs(
            np.abs(t_ll) ** 2 + np.abs(t_rl) ** 2 - 1.0))))
        unit_r = max(unit_r, float(np.max(np.abs(
            np.abs(t_lr) ** 2 + np.abs(t_rr) ** 2 - 1.0))))
        unit_r = max(unit_r, float(np.max(np.abs(
            t_ll * np.conjugate(t_lr) + t_rl * np.conjugate(t_rr)))))
    check(unit_r < 1e-12, "lossless-limit unitarity",
          f"max residual {unit_r:.2e}")

    k_probe = np.linspace(-6.0, 6.0, 121)
    ref = bright_phase_factor(k_probe, family_params(10.0, ratio=1.0))
    ratio_phase_r = 0.0
    for ratio in (0.1, 0.5, 2.0, 10.0):
        other = bright_phase_factor(k_probe, family_params(10.0, ratio=ratio))
        ratio_phase_r = max(ratio_phase_r, float(np.max(np.abs(other - ref))))
    check(ratio_phase_r < 1e-12, "phase depends on couplings via their sum of squares",
          f"max spread {ratio_phase_r:.2e}")

    norm_r = 0.0
    for profile in (Profile.GAUSSIAN, Profile.LORENTZIAN):
        for kappa_p in (0.02, 0.2, 1.0):
            grid = build_grid(PulseSpec(profile=profile, kappa_p=kappa_p),
                              quad)
            norm_r = max(norm_r, abs(float(np.sum(grid.omega)) - 1.0))
    check(norm_r < 1e-12, "quadrature normalization",
          f"max |sum(omega) - 1| = {norm_r:.2e}")

    gate_r = 0.0
    for params, pulse in _gate_points():
        gate_r = max(gate_r, metrics.convergence_delta(params, pulse, quad))
    check(gate_r < 1e-9, "node-doubling gate at curve-family points",
          f"max delta {gate_r:.2e}")

    base_params = family_params(10.0)
    base_pulse = PulseSpec(kappa_p=0.2)
    x0_delta = abs(metrics.qm_fidelity(base_params, base_pulse, quad)
                   - metrics.qm_fidelity(base_params,
                                         replace(base_pulse, x_0=3.7), quad))
    check(x0_delta == 0.0, "pulse-position invariance of averages",
          f"delta {x0_delta:.2e}")

    dual_r = ratio_r = 0.0
    margin = math.inf
    for case, delta_e, delta_p in FIG2_CASES:
        pulse = PulseSpec(delta_p=delta_p, kappa_p=0.1 * FAMILY_KAPPA)
        for coop in (1.0, 10.0, 100.0):
            params = family_params(coop, delta_e=delta_e)
            direct = metrics.qm_success(params, pulse, quad, 1.0)
            factored = params.sin_2xi ** 2 * metrics.swap_fidelity(
                params, pulse, quad)
            dual_r = max(dual_r, abs(direct - factored))
            f_qm = metrics.qm_fidelity(params, pulse, quad)
            margin = min(margin,
                         f_qm - metrics.swap_fidelity(params, pulse, quad))
            for ratio in (0.1, 10.0):
                f_other = metrics.qm_fidelity(
                    family_params(coop, ratio=ratio, delta_e=delta_e), pulse,
                    quad)
                ratio_r = max(ratio_r, abs(f_other - f_qm))
    check(dual_r < 1e-12, "success-probability dual path",
          f"max |direct - factored| = {dual_r:.2e}")
    check(ratio_r < 1e-12, "memory-fidelity ratio invariance",
          f"max spread {ratio_r:.2e}")
    check(margin >= 0.0, "memory >= swap ordering on the family grid",
          f"min margin {margin:.2e}")

    eq: dict[str, float] = {}
    for _ in range(trials):
        params, pulse, eta = draw_equivalence_point(rng)
        qubits = [random_photon_qubit(rng) for _ in range(3)]
        for key, value in equivalence_deltas(params, pulse, eta, qubits,
                                             quad).items():
            eq[key] = max(eq.get(key, 0.0), value)
    worst_key = max(eq, key=eq.get)
    check(eq[worst_key] <= 1e-6, "state-oracle equivalence",
          f"{trials} parameter sets, worst |delta| = {eq[worst_key]:.2e} "
          f"({worst_key})")

    params = family_params(10.0)
    k = np.linspace(-3.0, 3.0, 241)
    t_ll, t_rr, t_lr, t_rl = t_elements(k, params)
    phase = bright_phase_factor(k, params)
    # The classic misreading: square the angle instead of the sine.
    mutant = phase * np.sin(params.xi ** 2) ** 2 + params.cos_xi ** 2
    resid = float(np.max(np.abs(mutant * t_rr - t_lr * t_rl - phase)))
    check(resid > 1e-6, "mutation sensitivity of the determinant identity",
          f"corrupted element shifts the residual to {resid:.2e}")

    return all_ok, lines


# ---------------------------------------------------------------------------
# argument handling

def _load_point(path: str | None) -> tuple[SystemParams, PulseSpec]:
    if path is None:
        params, pulse = SystemParams(), PulseSpec()
    else:
        with open(path, "r", encoding="utf-8") as handle:
            params, pulse = point_from_dict(json.load(handle))
    validate(params)
    validate_pulse(pulse)
    return params, pulse


def _quad_config(args: argparse.Namespace) -> QuadratureConfig:
    n = getattr(args, "quad_n", None)
    if n is None:
        return DEFAULT_QUAD
    return QuadratureConfig(n_gauss=n, n_lorentz=n)


def _photon_qubit(args: argparse.Namespace) -> PhotonQubit:
    c_l = args.c_l
    if not 0.0 <= c_l <= 1.0:
        raise InvalidField("c_l", "the k_L amplitude magnitude must lie in [0, 1]")
    c_r = math.sqrt(1.0 - c_l * c_l)
    return PhotonQubit(c_l, c_r * complex(math.cos(args.phase),
                                          math.sin(args.phase)))


def _emit_json(obj: dict, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _quad_meta(quad: QuadratureConfig) -> dict:
    return {"n_gauss": quad.n_gauss, "n_lorentz": quad.n_lorentz}


def _cmd_point(args: argparse.Namespace) -> int:
    params, pulse = _load_point(args.params)
    quad = _quad_config(args)
    report = metrics.compute_report(params, pulse, quad, args.eta,
                                    _photon_qubit(args))
    out = report.to_dict()
    k = args.k if args.k is not None else params.k_c + pulse.delta_p
    matrix = t_matrix(k, params)
    out["scattering"] = {
        "k": k,
        "g_L": _pair(coupling_amplitude(k, params, "L")),
        "g_R": _pair(coupling_amplitude(k, params, "R")),
        "phase_factor": _pair(matrix.phase_factor),
        "T_LL": _pair(matrix.t_ll),
        "T_RR": _pair(matrix.t_rr),
        "T_LR": _pair(matrix.t_lr),
        "T_RL": _pair(matrix.t_rl),
    }
    if args.quad_check:
        out["quad_check_delta"] = metrics.convergence_delta(params, pulse,
                                                            quad)
    _emit_json(out, args.out)
    return 0


def _cmd_fig(args: argparse.Namespace) -> int:
    family = args.family
    quad = _quad_config(args)
    builders = {"fig2": (fig2_rows, ("C", "case", "F_qm", "F_swap"), 61),
                "fig3": (fig3_rows, ("kappa_p_over_kappa", "profile", "case",
                                     "F_qm"), 25),
                "fig4": (fig4_rows, ("lambda_ratio", "C", "case", "P_qm"), 41)}
    build, header, default_count = builders[family]
    count = args.points if args.points is not None else default_count
    if count < 2:
        raise InvalidField("points", "need at least two samples")
    cases = FIG3_CASES if family == "fig3" else FIG2_CASES
    meta = {
        "family": family,
        "kappa": FAMILY_KAPPA,
        "gamma": 1.0,
        "cases": {name: {"delta_e": de, "delta_p": dp}
                  for name, de, dp in cases},
        "points": count,
        "quad": _quad_meta(quad),
    }
    if family == "fig2":
        meta.update(profile="gaussian", kappa_p_over_kappa=0.1,
                    cooperativity_range=[1.0, 100.0])
    elif family == "fig3":
        meta.update(cooperativity=20.0, kappa_p_over_kappa_range=[0.01, 0.5])
    else:
        meta.update(profile="gaussian", kappa_p_over_kappa=0.1, eta=1.0,
                    cooperativities=[1.0, 10.0, 100.0],
                    lambda_ratio_range=[0.1, 10.0])
    write_csv(args.out, meta, header, build(quad, count))
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    params, pulse = _load_point(args.params)
    quad = _quad_config(args)
    axes = tuple(parse_axis(text) for text in args.axis)
    spec = SweepSpec(params=params, pulse=pulse, axes=axes, eta=args.eta,
                     quad=quad)
    meta = {
        "base": point_to_dict(params, pulse),
        "axes": [{"field": a.field, "scale": a.scale, "min": a.lo,
                  "max": a.hi, "count": a.count} for a in axes],
        "eta": args.eta,
        "quad": _quad_meta(quad),
    }
    write_csv(args.out, meta, SWEEP_HEADER, sweep_rows(spec))
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    params, pulse = _load_point(args.params)
    quad = _quad_config(args)
    photon = _photon_qubit(args)
    record = run_memory_protocol(params, pulse, quad, photon=photon,
                                 detector=args.eta, readout=args.readout)
    closed = {
        "P_kL": metrics.storage_success(params, pulse, quad, photon,
                                        args.eta),
        "P_L": metrics.retrieval_success(params, pulse, quad, photon,
                                         args.eta),
        "P_qm": metrics.qm_success(params, pulse, quad, args.eta),
        "fidelity": metrics.storage_retrieval_fidelity(params, pulse, quad,
                                                       photon, args.eta),
    }
    out = record.to_dict()
    out["closed_form_deltas"] = {key: abs(out[key] - value)
                                 for key, value in closed.items()}
    _emit_json(out, args.out)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    ok, lines = validate_suite(args.trials, args.seed, _quad_config(args))
    for line in lines:
        print(line)
    print("all invariant families passed" if ok
          else "INVARIANT FAILURES, see above")
    return 0 if ok else 1


def _add_quad_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--quad-n", type=int, default=None, metavar="N",
                        help="override the quadrature node count for both "
                             "profiles (defaults: 64 Gaussian, 1040 "
                             "Lorentzian)")


def _add_point_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--params", metavar="JSON",
                        help="parameter point as a flat JSON file "
                             "(missing fields take their defaults)")
    _add_quad_flag(parser)
    parser.add_argument("--eta", type=float, default=1.0,
                        help="constant detector efficiency in (0, 1]")
    parser.add_argument("--c-l", type=float, default=math.sqrt(0.5),
                        dest="c_l", metavar="MAG",
                        help="magnitude of the k_L amplitude of the input "
                             "qubit (default: balanced)")
    parser.add_argument("--phase", type=float, default=0.0,
                        help="relative phase of the k_R amplitude, radians")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavqmem",
        description="Atomic quantum memory for polarization qubits via "
                    "cavity scattering: closed-form metrics, curve families, "
                    "sweeps, and a state-vector cross-check. All rates are "
                    "in units of gamma = 1.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_point = sub.add_parser(
        "point", help="closed-form metrics and scattering amplitudes at one "
                      "parameter point")
    _add_point_flags(p_point)
    p_point.add_argument("--k", type=float, default=None,
                         help="wavenumber for the scattering amplitudes "
                              "(default: the pulse peak)")
    p_point.add_argument("--quad-check", action="store_true",
                         help="also report the node-doubling delta of the "
                              "averaged scattered amplitude")
    p_point.set_defaults(func=_cmd_point)

    for family, blurb in (("fig2", "fidelities versus cooperativity"),
                          ("fig3", "memory fidelity versus pulse bandwidth"),
                          ("fig4", "success probability versus coupling "
                                   "ratio")):
        p_fig = sub.add_parser(family, help=blurb + " (CSV)")
        p_fig.add_argument("--out", metavar="PATH", default=f"{family}.csv",
                           help=f"output CSV path (default {family}.csv)")
        p_fig.add_argument("--points", type=int, default=None,
                           help="samples per curve")
        _add_quad_flag(p_fig)
        p_fig.set_defaults(func=_cmd_fig, family=family)

    p_sweep = sub.add_parser(
        "sweep", help="scan one or two fields and emit metric rows as CSV")
    p_sweep.add_argument("--params", metavar="JSON",
                         help="base parameter point as a flat JSON file")
    p_sweep.add_argument("--axis", action="append", required=True,
                         metavar="FIELD,SCALE,MIN,MAX,COUNT",
                         help="swept axis; SCALE is linear or log; repeat "
                              "for a two-axis grid; FIELD may also be "
                              "lambda_ratio or cooperativity")
    p_sweep.add_argument("--out", metavar="PATH", required=True,
                         help="output CSV path")
    p_sweep.add_argument("--eta", type=float, default=1.0,
                         help="constant detector efficiency in (0, 1]")
    _add_quad_flag(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_oracle = sub.add_parser(
        "oracle", help="simulate one storage/retrieval cycle and compare "
                       "with the closed forms")
    _add_point_flags(p_oracle)
    p_oracle.add_argument("--readout", choices=("projective", "third_photon"),
                          default="projective",
                          help="atomic measurement: ideal projection or the "
                               "heralding probe photon")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_validate = sub.add_parser(
        "validate", help="run the invariant families and oracle-equivalence "
                         "trials; nonzero exit on failure")
    p_validate.add_argument("--trials", type=int, default=20,
                            help="number of randomized equivalence trials")
    p_validate.add_argument("--seed", type=int, default=20112,
                            help="seed of the randomized families")
    _add_quad_flag(p_validate)
    p_validate.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CavqmemError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
