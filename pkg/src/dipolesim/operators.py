"""Composite-space operators: dipole operators, Hamiltonian, collapse channels.

All operators are dense complex matrices on the joint Hilbert space.  Basis
ordering is row-major with atom A as the slow index: the product state
``|i_A j_B>`` sits at index ``i*dim_B + j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ValidatedScenario, FrameAssignment, validate_scenario


@dataclass(frozen=True)
class Basis:
    """Fixed product-basis bookkeeping for a two-atom scenario."""

    atom_names: tuple[str, str]
    labels: tuple[tuple[str, ...], tuple[str, ...]]

    @property
    def dims(self) -> tuple[int, int]:
        return (len(self.labels[0]), len(self.labels[1]))

    @property
    def dim(self) -> int:
        return len(self.labels[0]) * len(self.labels[1])

    @property
    def product_labels(self) -> tuple[str, ...]:
        a, b = self.atom_names
        return tuple(f"{la}_{a} {lb}_{b}" for la in self.labels[0]
                     for lb in self.labels[1])

    def atom_axis(self, atom: str) -> int:
        try:
            return self.atom_names.index(atom)
        except ValueError:
            raise KeyError(f"unknown atom {atom!r}") from None

    def level_index(self, atom: str, label: str) -> int:
        axis = self.atom_axis(atom)
        try:
            return self.labels[axis].index(label)
        except ValueError:
            raise KeyError(f"atom {atom!r} has no level {label!r}") from None

    def index(self, label_a: str, label_b: str) -> int:
        ia = self.level_index(self.atom_names[0], label_a)
        ib = self.level_index(self.atom_names[1], label_b)
        return ia * self.dims[1] + ib

    def ket(self, label_a: str, label_b: str) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(label_a, label_b)] = 1.0
        return v

    def product_state(self, vec_a, vec_b) -> np.ndarray:
        return np.kron(np.asarray(vec_a, dtype=complex),
                       np.asarray(vec_b, dtype=complex))


def basis_for(scenario: ValidatedScenario) -> Basis:
    scenario = validate_scenario(scenario)
    return Basis(
        atom_names=tuple(a.name for a in scenario.atoms),
        labels=tuple(tuple(l.label for l in a.levels) for a in scenario.atoms),
    )


@dataclass(frozen=True)
class CompositeOperator:
    """Dense operator on the joint space with its basis metadata."""

    entries: np.ndarray
    basis: Basis

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        rhs = other.entries if isinstance(other, CompositeOperator) else other
        return CompositeOperator(self.entries @ rhs, self.basis)


def as_matrix(op) -> np.ndarray:
    return op.entries if isinstance(op, CompositeOperator) else np.asarray(op)


def _embed(basis: Basis, atom: str, local: np.ndarray) -> np.ndarray:
    da, db = basis.dims
    if basis.atom_axis(atom) == 0:
        return np.kron(local, np.eye(db))
    return np.kron(np.eye(da), local)


def sigma(scenario_or_basis, atom: str, upper: str, lower: str) -> CompositeOperator:
    """Dipole operator |upper><lower| on one atom, identity on the other."""
    basis = (scenario_or_basis if isinstance(scenario_or_basis, Basis)
             else basis_for(scenario_or_basis))
    axis = basis.atom_axis(atom)
    d = basis.dims[axis]
    local = np.zeros((d, d), dtype=complex)
    local[basis.level_index(atom, upper), basis.level_index(atom, lower)] = 1.0
    return CompositeOperator(_embed(basis, atom, local), basis)


def _coupling_operator(scenario: ValidatedScenario, basis: Basis) -> np.ndarray:
    """-(g s_ab^A s_ba^B + h.c.) on the tagged transitions; zero if uncoupled."""
    g = scenario.g
    if g == 0:
        return np.zeros((basis.dim, basis.dim), dtype=complex)
    ta = scenario.tagged_transition("A")
    tb = scenario.tagged_transition("B")
    exchange = (sigma(basis, "A", ta.upper, ta.lower).entries
                @ sigma(basis, "B", tb.lower, tb.upper).entries)
    return -(g * exchange + np.conj(g) * exchange.conj().T)


def drive_operator(basis: Basis, drive) -> np.ndarray:
    """One-sided drive term D = -(amplitude/2) |u><l|; add D^dagger at eval."""
    u, l = drive.transition
    return -(complex(drive.amplitude) / 2.0) * sigma(basis, drive.atom, u, l).entries


def build_hamiltonian(scenario: ValidatedScenario, frame: FrameAssignment,
                      t: float = 0.0, basis: Basis | None = None) -> CompositeOperator:
    """Rotating-frame Hamiltonian at time ``t`` (scenario drives are cw)."""
    scenario = validate_scenario(scenario)
    basis = basis or basis_for(scenario)
    h = np.zeros((basis.dim, basis.dim), dtype=complex)

    det_a = [frame.detuning("A", l) for l in basis.labels[0]]
    det_b = [frame.detuning("B", l) for l in basis.labels[1]]
    diag = np.add.outer(np.array(det_a), np.array(det_b)).reshape(-1)
    np.fill_diagonal(h, diag)

    for d in scenario.drives:
        dd = drive_operator(basis, d)
        h += dd + dd.conj().T

    h += _coupling_operator(scenario, basis)
    return CompositeOperator(h, basis)


@dataclass(frozen=True)
class CollapseChannel:
    """Lindblad channel with the rate folded into the operator."""

    operator: np.ndarray
    kind: str  # population | dephasing | collective
    label: str


def build_collapse_operators(scenario: ValidatedScenario,
                             basis: Basis | None = None) -> list[CollapseChannel]:
    """All Lindblad channels of the scenario.

    Per decaying transition: ``sqrt(rate) |l><u|``.  Per dephasing entry:
    ``sqrt(2 rate) |k><k|`` so two dephased levels contribute
    ``rate_i + rate_j`` to the decay of their mutual coherence.  With
    collective decay enabled, the two tagged-transition channels are replaced
    by the eigenchannels of the cross-damping matrix
    ``[[rate_A, beta*s], [beta*s, rate_B]]`` with ``s = sqrt(rate_A rate_B)``.
    """
    scenario = validate_scenario(scenario)
    basis = basis or basis_for(scenario)
    channels: list[CollapseChannel] = []

    collective_pairs = {}
    if scenario.collective_decay.enabled:
        for name in ("A", "B"):
            collective_pairs[name] = scenario.tagged_transition(name)

    for atom in scenario.atoms:
        for t in atom.transitions:
            if scenario.collective_decay.enabled \
                    and collective_pairs.get(atom.name) is t:
                continue
            if t.pop_decay_rate > 0:
                op = np.sqrt(t.pop_decay_rate) * sigma(basis, atom.name, t.lower,
                                                       t.upper).entries
                channels.append(CollapseChannel(
                    op, "population",
                    f"{atom.name}:{t.upper}->{t.lower} rate {t.pop_decay_rate}"))
        for d in atom.dephasing:
            if d.rate > 0:
                proj = sigma(basis, atom.name, d.level, d.level).entries
                channels.append(CollapseChannel(
                    np.sqrt(2.0 * d.rate) * proj, "dephasing",
                    f"{atom.name}:{d.level} dephasing rate {d.rate}"))

    if scenario.collective_decay.enabled:
        ta, tb = collective_pairs["A"], collective_pairs["B"]
        ga, gb = ta.pop_decay_rate, tb.pop_decay_rate
        beta = scenario.collective_decay.beta
        cross = beta * np.sqrt(ga * gb)
        damping = np.array([[ga, cross], [cross, gb]])
        rates, vecs = np.linalg.eigh(damping)
        lower_a = sigma(basis, "A", ta.lower, ta.upper).entries
        lower_b = sigma(basis, "B", tb.lower, tb.upper).entries
        for k in range(2):
            if rates[k] <= 1e-15:
                continue
            op = np.sqrt(rates[k]) * (vecs[0, k] * lower_a + vecs[1, k] * lower_b)
            channels.append(CollapseChannel(
                op, "collective",
                f"collective eigenchannel rate {rates[k]:.6g}"))
    return channels


def write_operator_csv(op, path) -> None:
    """Debug export: one line per entry as row, col, re, im."""
    m = as_matrix(op)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("row,col,re,im\n")
        for i in range(m.shape[0]):
            for j in range(m.shape[1]):
                z = m[i, j]
                fh.write(f"{i},{j},{z.real:.17g},{z.imag:.17g}\n")
