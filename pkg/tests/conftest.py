import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chacon_lab.tower import TowerGeometry


@pytest.fixture(scope="session")
def geom():
    return TowerGeometry(12)


@pytest.fixture(scope="session", params=["python", "cython"])
def any_geom(request):
    from chacon_lab import kernels

    if request.param == "cython" and not kernels.compiled_available():
        pytest.skip("compiled kernel not built")
    return TowerGeometry(8, backend=request.param)
