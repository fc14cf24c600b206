import numpy as np
import pytest

from icisim import bundled_path
from icisim import scenario as scn


@pytest.fixture(scope="session")
def table1():
    """Bundled five-node scenario (secondary mode)."""
    return scn.load(bundled_path("table1"))


@pytest.fixture(scope="session")
def table1_post_loads(table1):
    loads = table1.loads.copy()
    for ev in table1.events:
        loads[ev.node] = ev.new_load
    return loads


def make_two_node(gamma=1000.0):
    """Two nodes joined by one line with coupling gamma (unit voltages)."""
    from icisim import GridTopology
    return GridTopology(n=2, edges=[(0, 1)], reactance=[1.0 / gamma],
                        vmag=[1.0, 1.0])
