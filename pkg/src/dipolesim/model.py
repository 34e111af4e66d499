"""Scenario description, validation, and rotating-frame assignment.

Everything downstream (operators, dynamics, spectra, protocols) consumes the
:class:`ValidatedScenario` produced here.  Units: all energies and rates are
dimensionless multiples of a reference linewidth ``gamma``; time is measured
in units of ``1/gamma``.

Conventions
-----------
* A drive with complex amplitude ``Omega`` contributes ``-(Omega/2) |u><l|
  + h.c.`` to the Hamiltonian, so a resonant two-level pulse inverts the
  population when ``integral(Omega dt) == pi``.
* The dipole coupling contributes ``-(g s_ab^A s_ba^B + h.c.)``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import FrameIncompatibilityError, ScenarioValidationError

FRAME_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class LevelSpec:
    label: str
    energy: float
    metastable: bool = True


@dataclass(frozen=True)
class TransitionSpec:
    upper: str
    lower: str
    pop_decay_rate: float = 0.0
    dipole_tag: str | None = None

    @property
    def pair(self) -> frozenset:
        return frozenset((self.upper, self.lower))


@dataclass(frozen=True)
class DephasingSpec:
    level: str
    rate: float


@dataclass(frozen=True)
class AtomSpec:
    name: str
    levels: tuple[LevelSpec, ...]
    transitions: tuple[TransitionSpec, ...]
    dephasing: tuple[DephasingSpec, ...] = ()


@dataclass(frozen=True)
class CouplingSpec:
    """Dipole-dipole coupling between the tagged transitions.

    ``direct`` mode takes ``g_value`` verbatim.  ``geometric`` mode evaluates
    the near-field formula from the coupled-dipole model:

        g = (3/2) (2*pi)^-3 sqrt(rate_a * rate_b) (3 p^2 - 1) / r^3

    with ``r`` in units of the optical wavelength and ``p = z/r`` the polar
    factor.  The ``(2*pi)^-3`` prefactor is kept verbatim even though the
    wavelength-vs-reduced-wavelength convention behind it is ambiguous;
    ``direct`` mode is the documented default path.
    """

    mode: str = "direct"
    g_value: complex = 0.0
    separation: float | None = None
    polar_factor: float | None = None
    rad_rate_a: float | None = None
    rad_rate_b: float | None = None


@dataclass(frozen=True)
class DriveSpec:
    atom: str
    transition: tuple[str, str]  # (upper, lower)
    carrier: float
    amplitude: complex
    envelope: str = "constant"


@dataclass(frozen=True)
class CollectiveDecaySpec:
    enabled: bool = False
    beta: float = 0.0


@dataclass(frozen=True)
class ScenarioSpec:
    atoms: tuple[AtomSpec, AtomSpec]
    coupling: CouplingSpec
    drives: tuple[DriveSpec, ...] = ()
    collective_decay: CollectiveDecaySpec = field(default_factory=CollectiveDecaySpec)
    note: str = ""


def geometric_g(separation: float, polar_factor: float, rad_rate_a: float,
                rad_rate_b: float) -> float:
    """Near-field coupling constant; scales exactly as 1/r^3."""
    prefactor = 1.5 * (2.0 * math.pi) ** -3
    return (prefactor * math.sqrt(rad_rate_a * rad_rate_b)
            * (3.0 * polar_factor ** 2 - 1.0) / separation ** 3)


@dataclass(frozen=True)
class ValidatedScenario:
    """Normalized scenario with resolved labels and coupling constant."""

    atoms: tuple[AtomSpec, AtomSpec]
    coupling: CouplingSpec
    drives: tuple[DriveSpec, ...]
    collective_decay: CollectiveDecaySpec
    g: complex
    note: str = ""

    # -- lookups ---------------------------------------------------------
    def atom(self, name: str) -> AtomSpec:
        for a in self.atoms:
            if a.name == name:
                return a
        raise KeyError(f"no atom named {name!r}")

    def levels(self, name: str) -> tuple[str, ...]:
        return tuple(l.label for l in self.atom(name).levels)

    def energy(self, name: str, label: str) -> float:
        for l in self.atom(name).levels:
            if l.label == label:
                return l.energy
        raise KeyError(f"atom {name!r} has no level {label!r}")

    def tagged_transition(self, name: str) -> TransitionSpec | None:
        for t in self.atom(name).transitions:
            if t.dipole_tag is not None:
                return t
        return None

    def dephasing_rate(self, name: str, label: str) -> float:
        return sum(d.rate for d in self.atom(name).dephasing if d.level == label)

    def total_pop_decay_out(self, name: str, label: str) -> float:
        return sum(t.pop_decay_rate for t in self.atom(name).transitions
                   if t.upper == label)

    def coherence_decay_rate(self, name: str, i: str, j: str) -> float:
        """gamma_ij = (pop-out_i + pop-out_j)/2 + deph_i + deph_j."""
        out_i = self.total_pop_decay_out(name, i)
        out_j = self.total_pop_decay_out(name, j)
        return 0.5 * (out_i + out_j) + self.dephasing_rate(name, i) \
            + self.dephasing_rate(name, j)


def _finite(x) -> bool:
    try:
        z = complex(x)
    except (TypeError, ValueError):
        return False
    return math.isfinite(z.real) and math.isfinite(z.imag)


def validate_scenario(raw: ScenarioSpec | ValidatedScenario) -> ValidatedScenario:
    """Check every scenario invariant; raise with the full diagnostic list.

    Idempotent: validating an already-validated scenario returns it unchanged.
    """
    if isinstance(raw, ValidatedScenario):
        return raw

    diags: list[str] = []

    atoms = tuple(raw.atoms)
    if len(atoms) != 2:
        diags.append(f"exactly two atoms required, got {len(atoms)}")
        raise ScenarioValidationError(diags)

    names = [a.name for a in atoms]
    if sorted(names) != ["A", "B"]:
        diags.append(f"atoms must be named 'A' and 'B', got {names}")

    for atom in atoms:
        labels = [l.label for l in atom.levels]
        if not 2 <= len(labels) <= 8:
            diags.append(f"atom {atom.name}: level count {len(labels)} outside [2, 8]")
        seen = set()
        for lab in labels:
            if lab in seen:
                diags.append(f"atom {atom.name}: duplicate level label {lab!r}")
            seen.add(lab)
        for lev in atom.levels:
            if not _finite(lev.energy):
                diags.append(f"atom {atom.name}: level {lev.label!r} energy not finite")

        pairs = set()
        n_tagged = 0
        for t in atom.transitions:
            if t.upper not in seen or t.lower not in seen:
                diags.append(
                    f"atom {atom.name}: transition ({t.upper},{t.lower}) references "
                    "unknown level")
                continue
            if t.upper == t.lower:
                diags.append(f"atom {atom.name}: transition with upper == lower "
                             f"({t.upper})")
            if t.pair in pairs:
                diags.append(f"atom {atom.name}: more than one transition on pair "
                             f"{set(t.pair)}")
            pairs.add(t.pair)
            if not _finite(t.pop_decay_rate) or t.pop_decay_rate < 0:
                diags.append(f"atom {atom.name}: transition ({t.upper},{t.lower}) has "
                             f"negative or non-finite decay rate {t.pop_decay_rate}")
            if t.dipole_tag is not None:
                n_tagged += 1
        if n_tagged > 1:
            diags.append(f"atom {atom.name}: more than one dipole-tagged transition")

        deph_levels = set()
        for d in atom.dephasing:
            if d.level not in seen:
                diags.append(f"atom {atom.name}: dephasing on unknown level {d.level!r}")
            if d.level in deph_levels:
                diags.append(f"atom {atom.name}: duplicate dephasing entry for "
                             f"{d.level!r}")
            deph_levels.add(d.level)
            if not _finite(d.rate) or d.rate < 0:
                diags.append(f"atom {atom.name}: dephasing rate on {d.level!r} is "
                             f"negative or non-finite ({d.rate})")

    # coupling
    coupling = raw.coupling
    g: complex = 0.0
    if coupling.mode == "direct":
        if not _finite(coupling.g_value):
            diags.append("direct coupling: g_value not finite")
        else:
            g = complex(coupling.g_value)
    elif coupling.mode == "geometric":
        if coupling.separation is None or coupling.separation <= 0:
            diags.append(f"geometric coupling: nonpositive separation "
                         f"{coupling.separation}")
        elif coupling.polar_factor is None or not _finite(coupling.polar_factor):
            diags.append("geometric coupling: polar factor missing or non-finite")
        elif (coupling.rad_rate_a is None or coupling.rad_rate_b is None
              or coupling.rad_rate_a < 0 or coupling.rad_rate_b < 0):
            diags.append("geometric coupling: radiative rates missing or negative")
        else:
            g = complex(geometric_g(coupling.separation, coupling.polar_factor,
                                    coupling.rad_rate_a, coupling.rad_rate_b))
    else:
        diags.append(f"unknown coupling mode {coupling.mode!r}")

    by_name = {a.name: a for a in atoms}
    tagged = {}
    for a in atoms:
        tt = [t for t in a.transitions if t.dipole_tag is not None]
        tagged[a.name] = tt[0] if len(tt) == 1 else None
    if g != 0 and not all(tagged.values()):
        diags.append("nonzero coupling requires a dipole-tagged transition on each atom")

    # collective decay
    cd = raw.collective_decay
    if not _finite(cd.beta) or abs(cd.beta) > 1:
        diags.append(f"collective decay correlation beta {cd.beta} outside [-1, 1]")
    if cd.enabled and not all(tagged.values()):
        diags.append("collective decay requires a dipole-tagged transition on each atom")

    # drives
    for d in raw.drives:
        if d.atom not in by_name:
            diags.append(f"drive references unknown atom {d.atom!r}")
            continue
        atom = by_name[d.atom]
        declared = {(t.upper, t.lower) for t in atom.transitions}
        if tuple(d.transition) not in declared:
            diags.append(f"drive on atom {d.atom}: transition {tuple(d.transition)} "
                         "is not declared")
        if not _finite(d.amplitude):
            diags.append(f"drive on atom {d.atom}{tuple(d.transition)}: amplitude "
                         "not finite")
        if not _finite(d.carrier):
            diags.append(f"drive on atom {d.atom}{tuple(d.transition)}: carrier "
                         "not finite")
        if d.envelope != "constant":
            diags.append(f"drive on atom {d.atom}{tuple(d.transition)}: scenario "
                         f"drives must be constant, got {d.envelope!r}")
        tt = tagged.get(d.atom)
        if tt is not None and tuple(d.transition) == (tt.upper, tt.lower):
            warnings.warn(
                f"drive on atom {d.atom} addresses the dipole-coupled transition "
                f"{tuple(d.transition)}; the model stays well-defined but this "
                "configuration is outside the intended regime", stacklevel=2)

    if diags:
        raise ScenarioValidationError(diags)

    ordered = tuple(sorted(atoms, key=lambda a: a.name))
    return ValidatedScenario(
        atoms=ordered,
        coupling=coupling,
        drives=tuple(raw.drives),
        collective_decay=cd,
        g=g,
        note=raw.note,
    )


@dataclass(frozen=True)
class FrameAssignment:
    """Rotating-frame frequency per (atom, level) plus diagonal detunings."""

    frequencies: dict
    detunings: dict
    residual: float

    def detuning(self, atom: str, label: str) -> float:
        return self.detunings[(atom, label)]


def _frame_constraints(scenario: ValidatedScenario,
                       extra_drives=()) -> tuple[list, list, list]:
    """Rows of the linear system f_u - f_l = carrier (+ coupling phase row)."""
    rows, rhs, descriptions = [], [], []
    index = {}
    for a in scenario.atoms:
        for l in a.levels:
            index[(a.name, l.label)] = len(index)
    n = len(index)

    for d in tuple(scenario.drives) + tuple(extra_drives):
        row = np.zeros(n)
        row[index[(d.atom, d.transition[0])]] = 1.0
        row[index[(d.atom, d.transition[1])]] = -1.0
        rows.append(row)
        rhs.append(d.carrier)
        descriptions.append(
            f"drive on {d.atom}:{d.transition[0]}->{d.transition[1]} at carrier "
            f"{d.carrier}")

    if scenario.g != 0:
        ta = scenario.tagged_transition("A")
        tb = scenario.tagged_transition("B")
        row = np.zeros(n)
        row[index[("A", ta.upper)]] = 1.0
        row[index[("A", ta.lower)]] = -1.0
        row[index[("B", tb.upper)]] = -1.0
        row[index[("B", tb.lower)]] = 1.0
        rows.append(row)
        rhs.append(0.0)
        descriptions.append("dipole-coupling phase constraint "
                            f"(A:{ta.upper}-{ta.lower} vs B:{tb.upper}-{tb.lower})")
    return rows, rhs, descriptions


def solve_rotating_frame(scenario: ValidatedScenario,
                         extra_drives=()) -> FrameAssignment:
    """Assign a frame frequency to every level of both atoms.

    Constraints: for every drive on ``u -> l``, ``f_u - f_l`` equals the drive
    carrier, and the coupled-pair gaps of the two atoms agree so the exchange
    term is static.  Among all solutions the one closest to the bare level
    energies is chosen (least-squares on ``f - energy``), which zeroes every
    detuning for resonant driving.
    """
    scenario = validate_scenario(scenario)
    index = {}
    energies = []
    for a in scenario.atoms:
        for l in a.levels:
            index[(a.name, l.label)] = len(index)
            energies.append(l.energy)
    omega = np.array(energies)

    rows, rhs, descriptions = _frame_constraints(scenario, extra_drives)
    if not rows:
        freqs = {k: omega[i] for k, i in index.items()}
        dets = {k: 0.0 for k in index}
        return FrameAssignment(freqs, dets, 0.0)

    a_mat = np.vstack(rows)
    b_vec = np.array(rhs, dtype=float)
    # solve for the correction u = f - omega with minimal norm
    target = b_vec - a_mat @ omega
    u, *_ = np.linalg.lstsq(a_mat, target, rcond=None)
    resid = a_mat @ u - target
    scale = max(1.0, float(np.max(np.abs(b_vec))), float(np.max(np.abs(a_mat @ omega))))
    if np.max(np.abs(resid)) > FRAME_RESIDUAL_TOL * scale:
        bad = [descriptions[i] for i in range(len(rows))
               if abs(resid[i]) > FRAME_RESIDUAL_TOL * scale]
        raise FrameIncompatibilityError(bad)

    f = omega + u
    freqs = {k: float(f[i]) for k, i in index.items()}
    dets = {k: float(omega[i] - f[i]) for k, i in index.items()}
    return FrameAssignment(freqs, dets, float(np.max(np.abs(resid))))


# ---------------------------------------------------------------------------
# JSON (de)serialization -- the scenario file schema mirrors the dataclasses
# field-for-field; complex numbers are written as [re, im] when not real.
# ---------------------------------------------------------------------------

def _complex_to_json(z: complex):
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return [z.real, z.imag]


def _complex_from_json(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def scenario_to_dict(scenario: ScenarioSpec | ValidatedScenario) -> dict:
    out = {
        "atoms": [
            {
                "name": a.name,
                "levels": [
                    {"label": l.label, "energy": l.energy, "metastable": l.metastable}
                    for l in a.levels
                ],
                "transitions": [
                    {
                        "upper": t.upper,
                        "lower": t.lower,
                        "pop_decay_rate": t.pop_decay_rate,
                        **({"dipole_tag": t.dipole_tag} if t.dipole_tag else {}),
                    }
                    for t in a.transitions
                ],
                "dephasing": [
                    {"level": d.level, "rate": d.rate} for d in a.dephasing
                ],
            }
            for a in scenario.atoms
        ],
        "coupling": _coupling_to_dict(scenario.coupling),
        "drives": [
            {
                "atom": d.atom,
                "transition": list(d.transition),
                "carrier": d.carrier,
                "amplitude": _complex_to_json(d.amplitude),
                "envelope": d.envelope,
            }
            for d in scenario.drives
        ],
        "collective_decay": {
            "enabled": scenario.collective_decay.enabled,
            "beta": scenario.collective_decay.beta,
        },
    }
    if scenario.note:
        out["note"] = scenario.note
    return out


def _coupling_to_dict(c: CouplingSpec) -> dict:
    if c.mode == "direct":
        return {"mode": "direct", "g_value": _complex_to_json(c.g_value)}
    return {
        "mode": "geometric",
        "separation": c.separation,
        "polar_factor": c.polar_factor,
        "rad_rate_a": c.rad_rate_a,
        "rad_rate_b": c.rad_rate_b,
    }


def scenario_from_dict(data: dict) -> ScenarioSpec:
    atoms = []
    for ad in data["atoms"]:
        atoms.append(AtomSpec(
            name=ad["name"],
            levels=tuple(LevelSpec(l["label"], float(l["energy"]),
                                   bool(l.get("metastable", True)))
                         for l in ad["levels"]),
            transitions=tuple(TransitionSpec(t["upper"], t["lower"],
                                             float(t.get("pop_decay_rate", 0.0)),
                                             t.get("dipole_tag"))
                              for t in ad.get("transitions", ())),
            dephasing=tuple(DephasingSpec(d["level"], float(d["rate"]))
                            for d in ad.get("dephasing", ())),
        ))
    cd = data["coupling"]
    if cd.get("mode", "direct") == "direct":
        coupling = CouplingSpec(mode="direct",
                                g_value=_complex_from_json(cd.get("g_value", 0.0)))
    else:
        coupling = CouplingSpec(
            mode="geometric",
            separation=float(cd["separation"]),
            polar_factor=float(cd["polar_factor"]),
            rad_rate_a=float(cd["rad_rate_a"]),
            rad_rate_b=float(cd["rad_rate_b"]),
        )
    drives = tuple(
        DriveSpec(
            atom=d["atom"],
            transition=(d["transition"][0], d["transition"][1]),
            carrier=float(d["carrier"]),
            amplitude=_complex_from_json(d["amplitude"]),
            envelope=d.get("envelope", "constant"),
        )
        for d in data.get("drives", ())
    )
    cdd = data.get("collective_decay", {})
    collective = CollectiveDecaySpec(bool(cdd.get("enabled", False)),
                                     float(cdd.get("beta", 0.0)))
    return ScenarioSpec(atoms=tuple(atoms), coupling=coupling, drives=drives,
                        collective_decay=collective, note=data.get("note", ""))
