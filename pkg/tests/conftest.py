import pytest

from latticehk.checks import RunContext
from latticehk.geometry import LatticeSpacetime
from latticehk.kleingordon import KgContext
from latticehk.rational import QQ


@pytest.fixture(scope="session")
def plane():
    return LatticeSpacetime("plane", (-14, 16))


@pytest.fixture(scope="session")
def cyl():
    return LatticeSpacetime("cylinder", (-14, 16), 6)


@pytest.fixture(scope="session")
def plane_ctx(plane):
    return RunContext(M=plane, seed=7,
                      universe_cfg={"compactness": "rc", "t_range": [0, 4],
                                    "x_range": [-2, 4], "max_height": 4,
                                    "cap": 1600},
                      aqft_cfg={"mass2": "1/4"})


@pytest.fixture(scope="session")
def cyl_ctx(cyl):
    return RunContext(M=cyl, seed=7,
                      universe_cfg={"compactness": "rc", "t_range": [0, 4],
                                    "max_height": 4, "cap": 1600},
                      aqft_cfg={"mass2": "1/4"})


@pytest.fixture(scope="session")
def kg_plane(plane):
    return KgContext(plane, QQ(1, 4))


@pytest.fixture(scope="session")
def kg_cyl(cyl):
    return KgContext(cyl, QQ(1, 4))
