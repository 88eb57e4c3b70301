"""Registry of shipped fixture configurations."""

from __future__ import annotations

import json
from importlib import resources

from .errors import ValidationError

FIXTURE_NAMES = ("brandeis", "brandeis-combined", "coin", "cube3",
                 "two-constraint")


def fixture_names() -> tuple[str, ...]:
    return FIXTURE_NAMES


def load_fixture(name: str) -> dict:
    if name not in FIXTURE_NAMES:
        raise ValidationError(
            f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}"
        )
    ref = resources.files("maxent_lab") / "fixtures" / f"{name}.json"
    return json.loads(ref.read_text())
