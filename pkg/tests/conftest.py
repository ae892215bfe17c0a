import sys
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def section3_text() -> str:
    return (DATA_DIR / "section3.gift").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def section3_path() -> Path:
    return DATA_DIR / "section3.gift"
