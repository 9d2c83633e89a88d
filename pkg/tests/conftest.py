import numpy as np
import pytest

from medforest.instance import Instance


def make_instance(q, d, k, Q=None, c=None, **kw) -> Instance:
    return Instance(q=np.asarray(q, dtype=float), d=np.asarray(d, dtype=float),
                    k=k, Q=Q, c=None if c is None else np.asarray(c, dtype=float), **kw)


@pytest.fixture
def star():
    # depot candidate 0, leaves 1 and 2; tight triangle d(1,2)=d(1,0)+d(0,2)
    return make_instance([0.0, 1.0, 1.0], [[0, 1, 1], [1, 0, 2], [1, 2, 0]], k=1, Q=2.0)
