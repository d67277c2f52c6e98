import pytest

from lossqfi import region_map


@pytest.fixture(scope="session")
def default_region():
    """Attainable-region map on the default lattice (built once per session)."""
    return region_map()
