"""Access to the model files shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .model import Model
from .parser import parse_model

BUNDLED = ("two_state", "phoscycle")


def bundled_model_path(name: str) -> Path:
    if name not in BUNDLED:
        raise KeyError(f"no bundled model {name!r}; available: {BUNDLED}")
    return Path(str(resources.files("dinsim") / "models" / f"{name}.ka"))


def bundled_model(name: str) -> Model:
    return parse_model(bundled_model_path(name).read_text(encoding="utf-8"))
