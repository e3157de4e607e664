import pytest

from qlev.potential import PhysicalSetup, load_preset


@pytest.fixture(scope="session")
def setup():
    """Hydrogen in standard gravity; the default lab configuration."""
    return PhysicalSetup()


@pytest.fixture(scope="session")
def mirror():
    return load_preset("perfect-mirror")


@pytest.fixture(scope="session")
def silica():
    return load_preset("silica-bulk")


@pytest.fixture(scope="session")
def silicon():
    return load_preset("silicon-bulk")
