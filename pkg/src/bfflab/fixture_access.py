"""Access to the bundled fixture files (machines, terms, oracles, bounds)."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def fixture_path(name: str) -> Path:
    path = Path(str(resources.files("bfflab") / "fixtures" / name))
    if not path.exists():
        raise FileNotFoundError(f"no bundled fixture named {name!r}")
    return path


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text()


def list_fixtures() -> list[str]:
    base = Path(str(resources.files("bfflab") / "fixtures"))
    return sorted(p.name for p in base.iterdir() if p.is_file())
