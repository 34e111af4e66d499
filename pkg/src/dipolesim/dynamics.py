"""Lindblad master-equation right-hand side, time evolution, steady states.

States are dense complex density matrices on the joint basis.  Physicality
(trace, Hermiticity, positivity) is monitored against fixed tolerances and
violations raise; nothing is silently projected back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (DegenerateSteadyStateError, DipolesimError,
                     IntegrationError, PhysicalityError)
from .model import DriveSpec, FrameAssignment, ValidatedScenario, \
    solve_rotating_frame, validate_scenario
from .operators import (Basis, CollapseChannel, as_matrix, basis_for,
                        build_collapse_operators, build_hamiltonian,
                        drive_operator)

TRACE_TOL = 1e-9
HERMITICITY_TOL = 1e-10
POSITIVITY_TOL = -1e-8
STEADY_RESIDUAL_TOL = 1e-10


@dataclass
class LindbladSystem:
    """Hamiltonian builder plus collapse channels for one scenario."""

    scenario: ValidatedScenario
    frame: FrameAssignment
    basis: Basis
    h_static: np.ndarray
    scheduled_terms: tuple  # of (one-sided drive matrix, envelope callable)
    channels: tuple

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def is_static(self) -> bool:
        return not self.scheduled_terms

    def hamiltonian(self, t: float) -> np.ndarray:
        if self.is_static:
            return self.h_static
        h = self.h_static.copy()
        for op, env in self.scheduled_terms:
            e = complex(env(t))
            h += e * op + np.conj(e) * op.conj().T
        return h

    @property
    def collapse_ops(self) -> tuple[np.ndarray, ...]:
        return tuple(c.operator for c in self.channels)


def build_system(scenario, extra_drives: tuple = (),
                 scheduled: tuple = ()) -> LindbladSystem:
    """Assemble the full dissipative system.

    ``extra_drives`` are cw drives added on top of the scenario (the probe);
    ``scheduled`` is a sequence of ``(DriveSpec, envelope)`` pairs whose
    envelopes multiply the drive amplitude in time.  All carriers, including
    scheduled ones, enter the rotating-frame constraint set.
    """
    scenario = validate_scenario(scenario)
    basis = basis_for(scenario)
    all_frame_drives = tuple(extra_drives) + tuple(d for d, _ in scheduled)
    frame = solve_rotating_frame(scenario, extra_drives=all_frame_drives)
    h = build_hamiltonian(scenario, frame, basis=basis).entries.copy()
    for d in extra_drives:
        dd = drive_operator(basis, d)
        h += dd + dd.conj().T
    terms = tuple((drive_operator(basis, d), env) for d, env in scheduled)
    channels = tuple(build_collapse_operators(scenario, basis))
    return LindbladSystem(scenario, frame, basis, h, terms, channels)


def lindblad_rhs(rho: np.ndarray, t: float, system: LindbladSystem) -> np.ndarray:
    """d rho / dt = -i [H(t), rho] + sum_L (L rho L+ - {L+L, rho}/2)."""
    rho = as_matrix(rho)
    if rho.shape != (system.dim, system.dim):
        raise DipolesimError(
            f"state dimension {rho.shape} does not match system dimension "
            f"{system.dim}")
    h = system.hamiltonian(t)
    out = -1j * (h @ rho - rho @ h)
    for L in system.collapse_ops:
        Ldag = L.conj().T
        LdL = Ldag @ L
        out += L @ rho @ Ldag - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def check_density_matrix(rho: np.ndarray, where: str = "") -> None:
    """Enforce trace/Hermiticity/positivity tolerances; raise on violation."""
    tr = np.trace(rho)
    if abs(tr - 1.0) > TRACE_TOL:
        raise PhysicalityError(f"trace deviates from 1 by {abs(tr - 1.0):.3e} {where}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITICITY_TOL:
        raise PhysicalityError(f"Hermiticity residual {herm:.3e} {where}")
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    if min_eig < POSITIVITY_TOL:
        raise PhysicalityError(f"negative eigenvalue {min_eig:.3e} {where}")


@dataclass
class Trajectory:
    """Sampled evolution: states plus named expectation-value series."""

    times: np.ndarray
    states: np.ndarray  # (n_samples, dim, dim)
    observables: dict = field(default_factory=dict)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def as_density_matrix(state, dim: int) -> np.ndarray:
    """Accept a ket or a density matrix; return a density matrix."""
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        if arr.shape[0] != dim:
            raise DipolesimError(f"ket has dimension {arr.shape[0]}, expected {dim}")
        arr = arr / np.linalg.norm(arr)
        return np.outer(arr, arr.conj())
    if arr.shape != (dim, dim):
        raise DipolesimError(f"state has shape {arr.shape}, expected ({dim}, {dim})")
    return arr


def evolve(rho0, system: LindbladSystem, t_span, samples: int = 201,
           observables: dict | None = None, method: str = "DOP853",
           rtol: float = 1e-10, atol: float = 1e-12,
           check: bool = True) -> Trajectory:
    """Integrate the master equation over ``t_span``.

    Adaptive explicit embedded integrator with dense-output interpolation
    onto the requested sample grid.  Every stored state is validated against
    the density-matrix tolerances unless ``check`` is disabled.
    """
    dim = system.dim
    rho0 = as_density_matrix(rho0, dim)
    if check:
        check_density_matrix(rho0, "(initial state)")

    if np.ndim(t_span) and len(np.atleast_1d(t_span)) > 2:
        t_eval = np.asarray(t_span, dtype=float)
        t0, t1 = float(t_eval[0]), float(t_eval[-1])
    else:
        t0, t1 = float(t_span[0]), float(t_span[1])
        t_eval = np.linspace(t0, t1, samples)

    def rhs_flat(t, y):
        return lindblad_rhs(y.reshape(dim, dim), t, system).reshape(-1)

    if t1 == t0:
        states = np.repeat(rho0[None, :, :], len(t_eval), axis=0)
    else:
        sol = solve_ivp(rhs_flat, (t0, t1), rho0.reshape(-1).astype(complex),
                        method=method, t_eval=t_eval, rtol=rtol, atol=atol,
                        dense_output=False)
        if not sol.success:
            raise IntegrationError(
                f"integration failed near t = {sol.t[-1] if len(sol.t) else t0}: "
            + sol.message)
        states = sol.y.T.reshape(len(t_eval), dim, dim)

    if check:
        for k in (0, len(t_eval) // 2, len(t_eval) - 1):
            check_density_matrix(states[k], f"(t = {t_eval[k]:g})")
        # cheap scalar checks on every sample
        traces = np.abs(np.einsum("tii->t", states) - 1.0)
        if traces.max() > TRACE_TOL:
            k = int(traces.argmax())
            raise PhysicalityError(
                f"trace deviates by {traces.max():.3e} at t = {t_eval[k]:g}")
        herm = np.max(np.abs(states - np.conj(np.swapaxes(states, 1, 2))))
        if herm > HERMITICITY_TOL:
            raise PhysicalityError(f"Hermiticity residual {herm:.3e} along trajectory")

    obs = {}
    if observables:
        for name, op in observables.items():
            m = as_matrix(op)
            obs[name] = np.einsum("ij,tji->t", m, states)
    return Trajectory(times=t_eval, states=states, observables=obs)


def expectation(rho, op) -> complex:
    """trace(op @ rho)."""
    rho = as_matrix(rho)
    m = as_matrix(op)
    if rho.shape != m.shape:
        raise DipolesimError(
            f"dimension mismatch: state {rho.shape} vs operator {m.shape}")
    return complex(np.trace(m @ rho))


def liouvillian_matrix(system: LindbladSystem) -> np.ndarray:
    """Superoperator matrix acting on row-major vectorized density matrices."""
    if not system.is_static:
        raise DipolesimError("Liouvillian matrix requires a time-independent system")
    h = system.h_static
    dim = system.dim
    eye = np.eye(dim)
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for L in system.collapse_ops:
        Ldag = L.conj().T
        LdL = Ldag @ L
        sup += np.kron(L, L.conj())
        sup -= 0.5 * (np.kron(LdL, eye) + np.kron(eye, LdL.T))
    return sup


def _kernel_basis(mat: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal null-space basis, columns; SVD-based."""
    _, s, vh = np.linalg.svd(mat)
    tol = rtol * (s[0] if s.size else 1.0)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


def steady_state(system: LindbladSystem) -> np.ndarray:
    """Unique stationary state via null-space extraction.

    Raises :class:`DegenerateSteadyStateError` when the kernel dimension
    exceeds one; no arbitrary choice is made in that case.
    """
    sup = liouvillian_matrix(system)
    kernel = _kernel_basis(sup)
    if kernel.shape[1] == 0:
        raise DegenerateSteadyStateError(0)
    if kernel.shape[1] > 1:
        raise DegenerateSteadyStateError(kernel.shape[1])
    rho = kernel[:, 0].reshape(system.dim, system.dim)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise DegenerateSteadyStateError(1)
    rho = rho / tr
    _check_steady(rho, system)
    return rho


def steady_state_from(system: LindbladSystem, rho0) -> np.ndarray:
    """Stationary state selected by the conserved quantities of ``rho0``.

    Appends one constraint per left-kernel vector of the Liouvillian (the
    conserved observables; the identity/trace is always among them) to the
    null-space problem, reproducing the infinite-time limit of an evolution
    started from ``rho0`` even when the kernel is degenerate.
    """
    rho0 = as_density_matrix(rho0, system.dim)
    sup = liouvillian_matrix(system)
    left = _kernel_basis(sup.conj().T)
    if left.shape[1] == 0:
        raise DegenerateSteadyStateError(0)
    constraints = left.conj().T  # rows: <l_i, rho> values
    target = constraints @ rho0.reshape(-1)
    stacked = np.vstack([sup, constraints])
    rhs = np.concatenate([np.zeros(sup.shape[0], dtype=complex), target])
    sol, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
    residual = np.max(np.abs(stacked @ sol - rhs))
    if residual > 1e-8:
        raise DegenerateSteadyStateError(left.shape[1])
    rho = sol.reshape(system.dim, system.dim)
    rho = 0.5 * (rho + rho.conj().T)
    _check_steady(rho, system)
    return rho


def _check_steady(rho: np.ndarray, system: LindbladSystem) -> None:
    resid = np.max(np.abs(lindblad_rhs(rho, 0.0, system)))
    scale = max(1.0, float(np.max(np.abs(system.h_static))))
    if resid > STEADY_RESIDUAL_TOL * scale:
        raise DipolesimError(f"steady-state residual {resid:.3e} exceeds tolerance")
    check_density_matrix(rho, "(steady state)")


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """CSV export: time then one (re, im) column pair per observable."""
    names = list(traj.observables)
    with open(path, "w", encoding="utf-8") as fh:
        header = "time" + "".join(f",re_{n},im_{n}" for n in names)
        fh.write(header + "\n")
        for k, t in enumerate(traj.times):
            row = [f"{t:.17g}"]
            for n in names:
                z = traj.observables[n][k]
                row.append(f"{z.real:.17g}")
                row.append(f"{z.imag:.17g}")
            fh.write(",".join(row) + "\n")
