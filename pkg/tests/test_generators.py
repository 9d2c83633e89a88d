import numpy as np
import pytest

from medforest.errors import MedforestError
from medforest.generators import (
    gap_local_set,
    gap_opt_set,
    gen_appendix,
    gen_gap,
    gen_random,
)
from medforest.instance import consistency_check, validate_instance
from medforest.io import dumps, instance_to_dict
from medforest.search import Objective, phi


def test_appendix_layout():
    inst = gen_appendix(10)
    assert inst.n == 6 and inst.k == 4 and inst.Q is None
    assert list(inst.q) == [1.0, 10**4, 10**4, 1.0, 10**4, 10**4]
    assert inst.d[0, 1] == inst.d[0, 2] == 10**3
    assert inst.d[1, 2] == 10**2
    assert inst.d[3, 4] == inst.d[3, 5] == 10**4
    assert inst.d[4, 5] == 10.0
    assert inst.d[0, 3] == inst.d[2, 5] == 10**7
    assert inst.labels == ("u0", "u1", "u2", "v0", "v1", "v2")
    assert inst.meta["rho_recommended"] == 100.0


def test_appendix_small_ell():
    inst = gen_appendix(2)
    assert inst.d[1, 2] == 4.0
    assert inst.d[4, 5] == 2.0
    assert inst.d[0, 3] == 128.0


@pytest.mark.parametrize("ell", [2, 3, 10, 17])
def test_appendix_is_metric(ell):
    assert validate_instance(gen_appendix(ell)).ok


def test_appendix_rejects_small_ell():
    with pytest.raises(MedforestError):
        gen_appendix(1)


def test_gap_layout():
    inst = gen_gap(k=3, w=100.0, M=1e6)
    assert inst.n == 6 and inst.k == 3
    assert list(inst.q) == [100.0] * 5 + [1.0]
    # d: zero on chain pairs (u_i,2, u_i+1,1)
    assert inst.d[1, 2] == 0.0 and inst.d[3, 4] == 0.0
    assert inst.d[0, 1] == 1.0
    # c: zero inside each pair, M outside
    assert inst.c[0, 1] == 0.0 and inst.c[2, 3] == 0.0 and inst.c[4, 5] == 0.0
    assert inst.c[1, 2] == 1e6
    assert inst.labels[0] == "u1_1" and inst.labels[-1] == "u3_2"


def test_gap_values_at_k3():
    inst = gen_gap(k=3, w=100.0, M=1e6)
    obj = Objective(rho=1.0, tree_metric="c")
    assert phi(inst, obj, gap_opt_set(3)) == 1.0
    assert phi(inst, obj, gap_local_set(3)) == 100.0


@pytest.mark.parametrize("k", [2, 3, 4, 6])
def test_gap_pseudometrics_and_inconsistency(k):
    inst = gen_gap(k=k)
    report = validate_instance(inst)
    assert report.ok
    assert any(v.kind == "d_pseudometric" for v in report.notes)
    ok, witness = consistency_check(inst)
    assert not ok and witness is not None


def test_gap_parameter_validation():
    with pytest.raises(MedforestError):
        gen_gap(k=1)
    with pytest.raises(MedforestError):
        gen_gap(w=0.5)
    with pytest.raises(MedforestError):
        gen_gap(w=100.0, M=50.0)


def test_random_basic_shape():
    inst = gen_random(9, 3)
    assert inst.n == 9 and inst.k == 3
    assert inst.Q == 2.0 * inst.q.max()
    assert set(np.unique(inst.q)) <= {1.0, 2.0, 3.0, 4.0, 5.0}
    assert validate_instance(inst).ok


def test_random_unit_square():
    inst = gen_random(30, 1, kind="euclidean")
    pts = np.asarray(inst.meta["points"])
    assert pts.min() >= 0.0 and pts.max() <= 1.0
    assert inst.d.max() <= np.sqrt(2.0) + 1e-12


def test_random_shortest_path_kind_is_integral_metric():
    inst = gen_random(12, 5, kind="shortest_path_completion")
    assert validate_instance(inst).ok
    assert np.allclose(inst.d, np.round(inst.d))


def test_random_determinism():
    a = dumps(instance_to_dict(gen_random(10, 7)))
    b = dumps(instance_to_dict(gen_random(10, 7)))
    assert a == b
    assert a != dumps(instance_to_dict(gen_random(10, 8)))


def test_random_k_override_and_tiny_n():
    assert gen_random(1, 0).k == 1
    assert gen_random(2, 0).k == 2
    assert gen_random(9, 0, k=5).k == 5
    with pytest.raises(MedforestError):
        gen_random(0, 0)
    with pytest.raises(MedforestError):
        gen_random(5, 0, kind="grid")
