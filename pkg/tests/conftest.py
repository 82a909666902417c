import os
from pathlib import Path

import numpy as np
import pytest

from dfrc import kernels

BACKENDS = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])

_acceptance_lines: list[str] = []


def record_acceptance(criterion: int, passed: bool, detail: str) -> None:
    _acceptance_lines.append(f"[criterion {criterion:>2}] {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def acceptance():
    return record_acceptance


def santa_fe_source(tmp_dir: Path) -> Path | None:
    """A Santa Fe A text file: ``$DFRC_SANTA_FE`` if set, else reservoirpy's bundled copy."""
    env = os.environ.get("DFRC_SANTA_FE")
    if env:
        return Path(env) if Path(env).is_file() else None
    try:
        import importlib.resources

        res = importlib.resources.files("reservoirpy.datasets") / "santafe_laser.npy"
        series = np.load(res).ravel()
    except (ImportError, FileNotFoundError, ModuleNotFoundError):
        return None
    path = tmp_dir / "santafe_a.txt"
    path.write_text("".join(f"{int(v)}\n" for v in series))
    return path


@pytest.fixture(scope="session")
def santa_fe_path(tmp_path_factory):
    path = santa_fe_source(tmp_path_factory.mktemp("santa_fe"))
    if path is None:
        pytest.skip("no Santa Fe data: set DFRC_SANTA_FE=/path/to/santafe.txt (one value per line)")
    return path


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
