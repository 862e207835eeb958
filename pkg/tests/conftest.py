import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load_fixture(name: str):
    from sill import surface

    path = FIXTURES / name
    return surface.parse_file(path.read_text(), filename=str(path))
