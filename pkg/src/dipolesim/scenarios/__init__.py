"""Bundled scenario library.

One JSON file per standard configuration of the two-atom model.  All rates
and frequencies are multiples of the reference linewidth gamma; drive
amplitudes are conventional Rabi frequencies (twice the coupling element, so
a caption-style "Omega = gamma" drive is stored as amplitude 2.0).
"""

from __future__ import annotations

import json
from importlib import resources

from ..model import ScenarioSpec, scenario_from_dict


def list_scenarios() -> list[str]:
    names = []
    for entry in resources.files(__name__).iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[:-5])
    return sorted(names)


def scenario_dict(name: str) -> dict:
    ref = resources.files(__name__) / f"{name}.json"
    if not ref.is_file():
        raise FileNotFoundError(
            f"no bundled scenario {name!r}; available: {', '.join(list_scenarios())}")
    return json.loads(ref.read_text(encoding="utf-8"))


def load_bundled(name: str) -> ScenarioSpec:
    return scenario_from_dict(scenario_dict(name))
