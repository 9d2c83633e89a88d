import numpy as np
import pytest

from medforest.errors import MedforestError
from medforest.instance import (
    DepotSet,
    Instance,
    as_members,
    consistency_check,
    dist_to_set,
    flow_cost,
    med_cost,
    nearest_in_set,
    validate_instance,
)

from conftest import make_instance


def test_construction_normalizes_and_freezes():
    inst = make_instance([1, 2], [[0, 3], [3, 0]], k=1, Q=4)
    assert inst.n == 2
    assert inst.q.dtype == np.float64
    assert not inst.q.flags.writeable
    assert not inst.d.flags.writeable
    assert inst.Q == 4.0
    assert not inst.has_c


def test_construction_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Instance(q=[1, 2], d=[[0, 1, 2], [1, 0, 1], [2, 1, 0]], k=1)
    with pytest.raises(ValueError):
        Instance(q=[[1], [2]], d=[[0, 1], [1, 0]], k=1)
    with pytest.raises(ValueError):
        Instance(q=[], d=np.zeros((0, 0)), k=0)
    with pytest.raises(ValueError):
        Instance(q=[1, 2], d=[[0, 1], [1, 0]], k=1, c=[[0]])
    with pytest.raises(ValueError):
        Instance(q=[1, 2], d=[[0, 1], [1, 0]], k=1, labels=("a",))


def test_matrix_accessor():
    inst = make_instance([1, 1], [[0, 1], [1, 0]], k=1, c=[[0, 5], [5, 0]])
    assert inst.matrix("c")[0, 1] == 5
    with pytest.raises(MedforestError):
        make_instance([1], [[0]], k=1).matrix("c")
    with pytest.raises(MedforestError):
        inst.matrix("x")


def test_edge_arrays_sorted_and_cached():
    d = [[0, 5, 2], [5, 0, 2], [2, 2, 0]]
    inst = make_instance([1, 1, 1], d, k=1)
    eu, ev, ew = inst.edge_arrays()
    assert list(ew) == [2.0, 2.0, 5.0]
    # ties ordered by (min endpoint, max endpoint)
    assert list(zip(eu, ev)) == [(0, 2), (1, 2), (0, 1)]
    assert inst.edge_arrays()[0] is eu
    assert not ew.flags.writeable


def test_depot_set_canonical():
    s = DepotSet.of([3, 1, 3])
    assert s.members == (1, 3)
    assert 3 in s and len(s) == 2
    with pytest.raises(MedforestError):
        DepotSet.of([])
    with pytest.raises(MedforestError):
        DepotSet.of([-1])


def test_as_members_range_check():
    assert as_members([2, 0], 3) == (0, 2)
    assert as_members(DepotSet.of([1])) == (1,)
    with pytest.raises(MedforestError):
        as_members([3], 3)
    with pytest.raises(MedforestError):
        as_members([], 3)


def test_validate_clean_metric():
    inst = make_instance([1, 2, 3], [[0, 1, 2], [1, 0, 1], [2, 1, 0]], k=2, Q=6)
    report = validate_instance(inst)
    assert report.ok
    assert report.lines() == ["ok"]


def test_validate_flags_each_defect():
    d = [[0, 1, 9], [2, 0, 1], [9, 1, 0]]  # asymmetric and triangle-breaking
    inst = make_instance([-1, 1, 1], d, k=5, Q=-2.0)
    kinds = {v.kind for v in validate_instance(inst).violations}
    assert "k_range" in kinds
    assert "capacity" in kinds
    assert "demand_negative" in kinds
    assert "d_asymmetric" in kinds
    assert "d_triangle" in kinds


def test_validate_notes_pseudometric():
    d = [[0, 0, 1], [0, 0, 1], [1, 1, 0]]
    report = validate_instance(make_instance([1, 1, 1], d, k=1))
    assert report.ok
    assert any(v.kind == "d_pseudometric" for v in report.notes)


def test_validate_demand_exceeds_capacity():
    inst = make_instance([5, 1], [[0, 1], [1, 0]], k=1, Q=4)
    kinds = {v.kind for v in validate_instance(inst).violations}
    assert kinds == {"demand_exceeds_capacity"}


def test_dist_and_nearest():
    d = [[0, 2, 5], [2, 0, 5], [5, 5, 0]]
    inst = make_instance([1, 1, 1], d, k=1)
    assert dist_to_set(inst, 2, [0, 1]) == 5.0
    # tie between depots 0 and 1 goes to the lower id
    assert nearest_in_set(inst, 2, [0, 1]) == (0, 5.0)
    assert nearest_in_set(inst, 0, [0, 1]) == (0, 0.0)


def test_med_and_flow():
    d = [[0, 3, 4], [3, 0, 5], [4, 5, 0]]
    inst = make_instance([1, 2, 3], d, k=1, Q=4)
    med = med_cost(inst, [0])
    assert med == 2 * 3 + 3 * 4
    assert flow_cost(inst, [0]) == med * (2.0 / 4.0)
    with pytest.raises(MedforestError):
        flow_cost(make_instance([1], [[0]], k=1), [0])


def test_consistency_consistent_pair():
    d = [[0, 1, 2], [1, 0, 3], [2, 3, 0]]
    c = [[0, 10, 20], [10, 0, 30], [20, 30, 0]]  # same ranking, scaled
    ok, wit = consistency_check(make_instance([1, 1, 1], d, k=1, c=c))
    assert ok and wit is None


def test_consistency_detects_rank_flip():
    d = [[0, 1, 2], [1, 0, 3], [2, 3, 0]]
    c = [[0, 30, 20], [30, 0, 10], [20, 10, 0]]  # reversed ranking
    ok, wit = consistency_check(make_instance([1, 1, 1], d, k=1, c=c))
    assert not ok
    assert wit.d_low < wit.d_high
    assert wit.c_low > wit.c_high


def test_consistency_ties_unconstrained():
    # equal d everywhere: any c ranking is consistent
    d = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]
    c = [[0, 7, 3], [7, 0, 5], [3, 5, 0]]
    ok, _ = consistency_check(make_instance([1, 1, 1], d, k=1, c=c))
    assert ok


def test_consistency_requires_c():
    with pytest.raises(MedforestError):
        consistency_check(make_instance([1, 1], [[0, 1], [1, 0]], k=1))
