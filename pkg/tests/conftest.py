"""Shared pytest fixtures and configuration for SpecWin tests."""

import json
import math
import tempfile
from collections.abc import Callable, Generator
from pathlib import Path
from typing import Any

import pytest

from specwin.core.mobius import hyperbolic_r, parabolic_cayley, rotation
from specwin.core.space import SpaceSpec
from specwin.core.symbol import SymbolSpec

GOLDEN = (math.sqrt(5) - 1) / 2


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Provide a temporary directory for testing."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def write_config(temp_dir: Path) -> Callable[..., Path]:
    """Write a run configuration as JSON and return its path."""

    def _write(data: dict[str, Any], name: str = "run.json") -> Path:
        path = temp_dir / name
        payload = {"out_dir": str(temp_dir / "out"), **data}
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def hardy() -> SpaceSpec:
    return SpaceSpec.hardy()


@pytest.fixture
def bergman() -> SpaceSpec:
    return SpaceSpec.bergman(0.0)


@pytest.fixture
def psi_z() -> SymbolSpec:
    """psi(z) = z."""
    return SymbolSpec.polynomial([0, 1])


@pytest.fixture
def psi_half() -> SymbolSpec:
    """psi(z) = z - 1/2."""
    return SymbolSpec.polynomial([-0.5, 1])


@pytest.fixture
def hyperbolic_half():
    return hyperbolic_r(0.5)


@pytest.fixture
def parabolic():
    return parabolic_cayley(1)


@pytest.fixture
def golden_rotation():
    return rotation(GOLDEN)
