"""Simulator for a pair of dipole-dipole-coupled multi-level atoms driven by
classical optical fields: Lindblad dynamics, weak-probe spectra, dressed
states, and conditional pulse protocols."""

__version__ = "0.1.0"

from .errors import (DegenerateSteadyStateError, DipolesimError,
                     FrameIncompatibilityError, IntegrationError,
                     PhysicalityError, PoleError, ProbeLinearityError,
                     ScheduleError, ScenarioValidationError,
                     SchemeMismatchError)
from .model import (AtomSpec, CollectiveDecaySpec, CouplingSpec, DephasingSpec,
                    DriveSpec, FrameAssignment, LevelSpec, ScenarioSpec,
                    TransitionSpec, ValidatedScenario, geometric_g,
                    scenario_from_dict, scenario_to_dict, solve_rotating_frame,
                    validate_scenario)
from .operators import (Basis, CollapseChannel, CompositeOperator, basis_for,
                        build_collapse_operators, build_hamiltonian, sigma,
                        write_operator_csv)
from .dynamics import (LindbladSystem, Trajectory, build_system,
                       check_density_matrix, evolve, expectation,
                       lindblad_rhs, liouvillian_matrix, steady_state,
                       steady_state_from, write_trajectory_csv)
from .spectra import (DressedSpectrum, Extremum, SpectrumParams,
                      SpectrumResult, analytic_spectrum, default_probe,
                      dressed_states, find_extrema, params_from_scenario,
                      probe_spectrum_numeric, susceptibility_analytic,
                      write_spectrum_csv)
from .protocols import (FidelityResult, GateAngles, ProtocolResult,
                        PulseSchedule, RamanTransferResult,
                        analytic_fidelity_cap, analytic_fidelity_cpi,
                        canonical_initial_states, cap_schedule, cpi_schedule,
                        ideal_cap_apply, ideal_cpi_apply, min_fidelity,
                        pulse_area, raman_transfer_sim, realized_cpi_target,
                        run_protocol, sweep_min_fidelity)
from .scenarios import list_scenarios, load_bundled, scenario_dict
