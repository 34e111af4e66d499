"""Weak-probe susceptibility (closed form and numeric) and dressed states.

The reported response is ``chi(nu1) = -<s_ac^A> / W1`` with ``W1`` the probe
coupling element (half the conventional Rabi amplitude).  With this
normalization ``Im(chi) >= 0`` for passive media and the uncoupled limit is
the free-atom Lorentzian ``i / Gamma_ac``.

Symbol convention: every Rabi symbol appearing in the closed form (``Omega2``
in :class:`SpectrumParams`) is a coupling matrix element, i.e. half the
conventional amplitude stored in a :class:`~dipolesim.model.DriveSpec`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (DipolesimError, PoleError, ProbeLinearityError,
                     SchemeMismatchError)
from .model import DriveSpec, ValidatedScenario, validate_scenario
from .dynamics import (build_system, evolve, expectation, liouvillian_matrix,
                       steady_state_from)
from .operators import basis_for, sigma

DEFAULT_PROBE_ELEMENT = 1e-4
DEFAULT_GRID_HALFWIDTH = 8.0
DEFAULT_GRID_POINTS = 201
LINEARITY_RTOL = 1e-4
IM_CHI_FLOOR = -1e-8


@dataclass(frozen=True)
class SpectrumParams:
    """Scalar inputs of the closed-form two-atom susceptibility.

    Rates are coherence decay rates of the named level pairs; frequencies are
    level-energy differences (``omega_cb_A = E_c^A - E_b^A`` and so on);
    ``omega2`` is the cw-drive coupling element and ``nu2`` its carrier.
    """

    gamma_ac_A: float
    gamma_bc_A: float
    gamma_ab_B: float
    gamma_cb_B: float
    omega_ac_A: float
    omega_cb_A: float
    omega_ab_B: float
    omega_cb_B: float
    nu2: float
    omega2: complex
    g: complex

    def __post_init__(self):
        for name in ("gamma_ac_A", "gamma_bc_A", "gamma_ab_B", "gamma_cb_B"):
            if getattr(self, name) < 0:
                raise DipolesimError(f"{name} must be nonnegative")


def susceptibility_analytic(params: SpectrumParams, nu1):
    """Closed-form probe response chi(nu1); accepts a scalar or an array.

    The two-photon relaxation denominators are

        Gamma_ac   = gamma_ac^A + i (nu1 - omega_ac^A)
        Gamma_bcab = gamma_bc^A + gamma_ab^B + i (nu1 + omega_cb^A - omega_ab^B)
        Gamma_bccb = gamma_bc^A + gamma_cb^B + i (nu1 - nu2 + omega_cb^A
                                                  - omega_cb^B)

    and chi = i (Gamma_bcab Gamma_bccb + |omega2|^2)
              / (Gamma_ac (Gamma_bcab Gamma_bccb + |omega2|^2)
                 + |g|^2 Gamma_bccb).
    """
    nu = np.asarray(nu1, dtype=float)
    g_ac = params.gamma_ac_A + 1j * (nu - params.omega_ac_A)
    g_bcab = (params.gamma_bc_A + params.gamma_ab_B
              + 1j * (nu + params.omega_cb_A - params.omega_ab_B))
    g_bccb = (params.gamma_bc_A + params.gamma_cb_B
              + 1j * (nu - params.nu2 + params.omega_cb_A - params.omega_cb_B))
    w2sq = abs(params.omega2) ** 2
    numer = g_bcab * g_bccb + w2sq
    denom = g_ac * numer + abs(params.g) ** 2 * g_bccb
    zeros = np.abs(denom) == 0.0
    if np.any(zeros):
        bad = nu[zeros] if nu.ndim else float(nu)
        raise PoleError(bad if np.ndim(bad) == 0 else float(np.atleast_1d(bad)[0]))
    chi = 1j * numer / denom
    return complex(chi) if np.ndim(nu1) == 0 else chi


def params_from_scenario(scenario, probe: DriveSpec) -> SpectrumParams:
    """Extract the closed-form inputs from a three-plus-three scenario.

    Requires: both atoms have exactly three levels, one dipole-tagged
    transition each, the probe addresses an untagged transition of its atom,
    and the other atom carries exactly one cw drive on an untagged
    transition.  Anything else raises :class:`SchemeMismatchError` so the
    caller can route to the numeric path.
    """
    scn = validate_scenario(scenario)
    problems = []
    for a in scn.atoms:
        if len(a.levels) != 3:
            problems.append(f"atom {a.name} has {len(a.levels)} levels, need 3")
        if scn.tagged_transition(a.name) is None:
            problems.append(f"atom {a.name} has no dipole-tagged transition")
    if problems:
        raise SchemeMismatchError("; ".join(problems))

    probe_atom = probe.atom
    other_atom = "B" if probe_atom == "A" else "A"
    tag_p = scn.tagged_transition(probe_atom)
    tag_o = scn.tagged_transition(other_atom)
    if tuple(probe.transition) == (tag_p.upper, tag_p.lower):
        raise SchemeMismatchError("probe addresses the coupled transition")

    cw = [d for d in scn.drives if d.atom == other_atom]
    if [d for d in scn.drives if d.atom == probe_atom]:
        raise SchemeMismatchError("probe atom already carries a scenario drive")
    if len(cw) > 1:
        raise SchemeMismatchError("more than one cw drive on the partner atom")

    a_p, c_p = probe.transition            # probed transition of atom "A"
    b_p = tag_p.lower if tag_p.upper == a_p else None
    if b_p is None:
        raise SchemeMismatchError(
            "probe upper level must be the coupled-transition upper level")
    a_o, b_o = tag_o.upper, tag_o.lower
    if cw:
        a_cw, c_o = cw[0].transition
        if a_cw != a_o:
            raise SchemeMismatchError(
                "cw drive upper level must be the coupled-transition upper level")
        nu2 = cw[0].carrier
        omega2 = complex(cw[0].amplitude) / 2.0
    else:
        # undriven partner: the remaining level plays the role of c_B
        rest = [l for l in scn.levels(other_atom) if l not in (a_o, b_o)]
        c_o = rest[0]
        nu2 = scn.energy(other_atom, a_o) - scn.energy(other_atom, c_o)
        omega2 = 0.0

    e = scn.energy
    return SpectrumParams(
        gamma_ac_A=scn.coherence_decay_rate(probe_atom, a_p, c_p),
        gamma_bc_A=scn.coherence_decay_rate(probe_atom, b_p, c_p),
        gamma_ab_B=scn.coherence_decay_rate(other_atom, a_o, b_o),
        gamma_cb_B=scn.coherence_decay_rate(other_atom, c_o, b_o),
        omega_ac_A=e(probe_atom, a_p) - e(probe_atom, c_p),
        omega_cb_A=e(probe_atom, c_p) - e(probe_atom, b_p),
        omega_ab_B=e(other_atom, a_o) - e(other_atom, b_o),
        omega_cb_B=e(other_atom, c_o) - e(other_atom, b_o),
        nu2=nu2,
        omega2=omega2,
        g=scn.g,
    )


def default_probe(scenario, element: float = DEFAULT_PROBE_ELEMENT) -> DriveSpec:
    """Weak probe on atom A's untagged upper transition, resonant carrier."""
    scn = validate_scenario(scenario)
    tag = scn.tagged_transition("A")
    if tag is None:
        raise SchemeMismatchError("atom A has no dipole-tagged transition")
    a = tag.upper
    candidates = [t for t in scn.atom("A").transitions
                  if t.upper == a and t.dipole_tag is None]
    if not candidates:
        raise SchemeMismatchError("atom A has no untagged transition to probe")
    c = candidates[0].lower
    carrier = scn.energy("A", a) - scn.energy("A", c)
    return DriveSpec(atom="A", transition=(a, c), carrier=carrier,
                     amplitude=2.0 * element)


@dataclass
class SpectrumResult:
    """Probe response on a frequency grid."""

    nu1: np.ndarray
    chi: np.ndarray
    method: str
    omega_ref: float  # probe-transition frequency, for detuning axes
    probe: DriveSpec | None = None
    im_floor_violated: bool = False

    @property
    def detuning(self) -> np.ndarray:
        return self.nu1 - self.omega_ref

    def check_passivity(self):
        if float(np.min(self.chi.imag)) < IM_CHI_FLOOR:
            self.im_floor_violated = True
            warnings.warn(
                f"Im(chi) dips to {float(np.min(self.chi.imag)):.3e}; passive-medium "
                "floor violated", stacklevel=2)
        return self


def analytic_spectrum(scenario, probe: DriveSpec | None = None,
                      grid=None) -> SpectrumResult:
    """Closed-form spectrum over a detuning grid (defaults to [-8, 8] gamma)."""
    scn = validate_scenario(scenario)
    probe = probe or default_probe(scn)
    params = params_from_scenario(scn, probe)
    det = _resolve_grid(grid)
    nu1 = params.omega_ac_A + det
    chi = susceptibility_analytic(params, nu1)
    return SpectrumResult(nu1, chi, "analytic", params.omega_ac_A,
                          probe).check_passivity()


def _resolve_grid(grid) -> np.ndarray:
    if grid is None:
        return np.linspace(-DEFAULT_GRID_HALFWIDTH, DEFAULT_GRID_HALFWIDTH,
                           DEFAULT_GRID_POINTS)
    return np.asarray(grid, dtype=float)


def _prepared_state(scn: ValidatedScenario, basis, probe: DriveSpec) -> np.ndarray:
    """|c_A b_B>-style prepared state: probe lower level on the probed atom,
    coupled lower level on the partner."""
    lower_probe = probe.transition[1]
    other = "B" if probe.atom == "A" else "A"
    tag_o = scn.tagged_transition(other)
    lower_other = tag_o.lower if tag_o is not None else scn.levels(other)[-1]
    if probe.atom == "A":
        return basis.ket(lower_probe, lower_other)
    return basis.ket(lower_other, lower_probe)


def _chi_from_state(rho, system, probe: DriveSpec) -> complex:
    op = sigma(system.basis, probe.atom, *probe.transition)
    element = complex(probe.amplitude) / 2.0
    return -expectation(rho, op) / element


def _chi_linear_response(scn, probe: DriveSpec, rho0=None) -> complex:
    """First-order cw response around the prepared stationary state.

    Solves ``L0 rho1 = -L_probe rho0`` with the probe carrier included in the
    rotating frame; exact weak-probe limit, valid also when the kernel of
    ``L0`` is degenerate.
    """
    zero_probe = replace(probe, amplitude=0.0)
    system = build_system(scn, extra_drives=(zero_probe,))
    basis = system.basis
    rho0 = _prepared_state(scn, basis, probe) if rho0 is None else rho0
    rho0 = np.outer(rho0, rho0.conj()) if rho0.ndim == 1 else rho0

    h_pr_one = -(complex(probe.amplitude) / 2.0) * \
        sigma(basis, probe.atom, *probe.transition).entries
    h_pr = h_pr_one + h_pr_one.conj().T
    rhs = 1j * (h_pr @ rho0 - rho0 @ h_pr)  # -L_probe rho0
    sup = liouvillian_matrix(system)
    sol, *_ = np.linalg.lstsq(sup, rhs.reshape(-1), rcond=None)
    resid = np.max(np.abs(sup @ sol - rhs.reshape(-1)))
    scale = max(np.max(np.abs(rhs)), 1e-300)
    if resid > 1e-6 * scale:
        raise DipolesimError(
            f"linear-response solve residual {resid:.3e} (pole or conserved "
            "coherence in the way)")
    rho1 = sol.reshape(basis.dim, basis.dim)
    return _chi_from_state(rho1, system, probe)


def _chi_transient(scn, probe: DriveSpec, settle_time: float,
                   rho0=None) -> complex:
    """Finite-probe response read after the coherences settle."""
    system = build_system(scn, extra_drives=(probe,))
    rho0 = _prepared_state(scn, system.basis, probe) if rho0 is None else rho0
    traj = evolve(rho0, system, (0.0, settle_time), samples=2)
    return _chi_from_state(traj.final_state, system, probe)


def probe_spectrum_numeric(scenario, probe: DriveSpec | None = None, grid=None,
                           method: str = "linres", settle_time: float = 150.0,
                           linearity_check: bool = True) -> SpectrumResult:
    """Numeric probe spectrum from the full master equation.

    ``linres`` (default) solves the exact first-order cw response around the
    prepared state; ``evolve`` drives the full system with the finite weak
    probe and reads the settled coherence.  One grid point is recomputed at
    half probe amplitude and must agree to ``1e-4`` relative, else the probe
    is too strong.
    """
    scn = validate_scenario(scenario)
    probe = probe or default_probe(scn)
    det = _resolve_grid(grid)
    tag = scn.tagged_transition(probe.atom)
    omega_ref = (scn.energy(probe.atom, probe.transition[0])
                 - scn.energy(probe.atom, probe.transition[1]))
    nu1 = omega_ref + det

    solver = {
        "linres": lambda pr: _chi_linear_response(scn, pr),
        "evolve": lambda pr: _chi_transient(scn, pr, settle_time),
    }
    if method not in solver:
        raise DipolesimError(f"unknown numeric spectrum method {method!r}")
    chi = np.empty(len(nu1), dtype=complex)
    for k, nu in enumerate(nu1):
        chi[k] = solver[method](replace(probe, carrier=float(nu)))

    if linearity_check and len(nu1):
        mid = len(nu1) // 2
        pr_mid = replace(probe, carrier=float(nu1[mid]))
        pr_half = replace(pr_mid, amplitude=probe.amplitude / 2.0)
        chi_half = solver[method](pr_half)
        denom = max(abs(chi[mid]), 1e-300)
        if abs(chi_half - chi[mid]) / denom > LINEARITY_RTOL:
            raise ProbeLinearityError(
                f"halving the probe changed chi by "
                f"{abs(chi_half - chi[mid]) / denom:.3e} relative "
                f"(> {LINEARITY_RTOL}); probe too strong")

    return SpectrumResult(nu1, chi, f"numeric-{method}", omega_ref,
                          probe).check_passivity()


@dataclass(frozen=True)
class DressedSpectrum:
    """Eigenanalysis of the driven single-excitation manifold."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, aligned with eigenvalues
    state_labels: tuple[str, ...]


def dressed_states(scenario) -> DressedSpectrum:
    """Diagonalize the frame Hamiltonian on the manifold reachable from the
    prepared ground state through the coupled-pair excitation.

    For the three-plus-three scheme this is span{|a_A b_B>, |b_A a_B>,
    |b_A c_B>}.  Fails for level schemes without a dipole-tagged pair on
    each atom.
    """
    scn = validate_scenario(scenario)
    tag_a = scn.tagged_transition("A")
    tag_b = scn.tagged_transition("B")
    if tag_a is None or tag_b is None:
        raise SchemeMismatchError(
            "dressed-state analysis needs the coupled transition tagged on "
            "both atoms")
    system = build_system(scn)
    basis = system.basis
    h = system.h_static
    seed = basis.index(tag_a.upper, tag_b.lower)

    scale = max(1.0, float(np.max(np.abs(h))))
    adj = np.abs(h) > 1e-12 * scale
    np.fill_diagonal(adj, False)
    component = {seed}
    frontier = [seed]
    while frontier:
        nxt = []
        for i in frontier:
            for j in np.nonzero(adj[i])[0]:
                if j not in component:
                    component.add(int(j))
                    nxt.append(int(j))
        frontier = nxt
    idx = sorted(component)
    sub = h[np.ix_(idx, idx)]
    vals, vecs = np.linalg.eigh(sub)
    labels = tuple(basis.product_labels[i] for i in idx)
    return DressedSpectrum(vals, vecs, labels)


@dataclass(frozen=True)
class Extremum:
    frequency: float  # on the axis handed to find_extrema
    value: float
    kind: str  # "max" | "min"


def find_extrema(x, y=None) -> list[Extremum]:
    """Local maxima/minima of Im(chi) with parabolic sub-grid refinement.

    Accepts a :class:`SpectrumResult` (detuning axis) or explicit ``x, y``
    arrays.  Needs at least three points.
    """
    if y is None:
        result = x
        x = result.detuning
        y = result.chi.imag
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 3:
        raise DipolesimError("extremum search needs at least 3 grid points")

    out: list[Extremum] = []
    for i in range(1, len(x) - 1):
        if y[i] > y[i - 1] and y[i] > y[i + 1]:
            kind = "max"
        elif y[i] < y[i - 1] and y[i] < y[i + 1]:
            kind = "min"
        else:
            continue
        denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
        if denom == 0.0:
            xs, ys = x[i], y[i]
        else:
            shift = 0.5 * (y[i - 1] - y[i + 1]) / denom
            shift = float(np.clip(shift, -1.0, 1.0))
            xs = x[i] + shift * (x[i + 1] - x[i - 1]) / 2.0
            ys = y[i] - 0.25 * (y[i - 1] - y[i + 1]) * shift
        out.append(Extremum(float(xs), float(ys), kind))
    return out


def write_spectrum_csv(result: SpectrumResult, path) -> None:
    """CSV export: nu1_minus_omega_ac_over_gamma, re_chi, im_chi."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("nu1_minus_omega_ac_over_gamma,re_chi,im_chi\n")
        for d, z in zip(result.detuning, result.chi):
            fh.write(f"{d:.17g},{z.real:.17g},{z.imag:.17g}\n")
