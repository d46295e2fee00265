"""Named presets: data files bundling the constants the test suite pins.

Each preset is a JSON file next to this module.  Numeric constants are
stored as decimal strings so callers can lift them to exact rationals.
"""

from __future__ import annotations

import json
from importlib import resources


def load(name: str) -> dict:
    ref = resources.files(__package__).joinpath(f"{name}.json")
    if not ref.is_file():
        available = ", ".join(sorted(available_presets()))
        raise KeyError(f"unknown preset {name!r} (available: {available})")
    return json.loads(ref.read_text())


def available_presets() -> list[str]:
    out = []
    for entry in resources.files(__package__).iterdir():
        if entry.name.endswith(".json"):
            out.append(entry.name[: -len(".json")])
    return sorted(out)
