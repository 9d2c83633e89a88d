"""Cross-backend contract: both kernels produce bit-identical floats."""

from itertools import combinations

import numpy as np
import pytest

from medforest import _kernels
from medforest._kernels import purepy
from medforest.generators import gen_random
from medforest.instance import make_workspace

compiled = pytest.importorskip(
    "medforest._kernels._speedups", reason="compiled kernel not built"
)


def both(inst):
    eu, ev, ew = inst.edge_arrays("d")
    args = (inst.n, inst.q, inst.d, eu, ev, ew)
    return purepy.Workspace(*args), compiled.Workspace(*args)


def test_backend_tags():
    assert purepy.BACKEND == "python"
    assert compiled.BACKEND == "compiled"
    assert _kernels.BACKEND in ("python", "compiled")


@pytest.mark.parametrize("kind", ["euclidean", "shortest_path_completion"])
def test_med_tree_phi_bit_identical(kind):
    for seed in range(6):
        inst = gen_random(9, seed, kind=kind)
        ws_p, ws_c = both(inst)
        for k in (1, 2, 3):
            for mem in combinations(range(inst.n), k):
                m = list(mem)
                assert ws_p.med(m) == ws_c.med(m)
                assert ws_p.tree(m) == ws_c.tree(m)
                assert ws_p.phi(m, 2.5) == ws_c.phi(m, 2.5)


def test_first_improving_identical_choice():
    for seed in range(8):
        inst = gen_random(10, seed)
        ws_p, ws_c = both(inst)
        for mem in combinations(range(inst.n), 3):
            m = list(mem)
            cur = ws_p.phi(m, 1.0)
            assert cur == ws_c.phi(m, 1.0)
            for t in (1, 2, 3):
                assert (ws_p.first_improving(m, 1.0, t, 1e-7, cur)
                        == ws_c.first_improving(m, 1.0, t, 1e-7, cur))


def test_first_improving_none_at_optimum():
    inst = gen_random(7, 1)
    ws_p, ws_c = both(inst)
    # scan everything to find the global phi optimum at k=2
    best, best_m = min(
        (ws_p.phi(list(m), 3.0), list(m)) for m in combinations(range(7), 2)
    )
    assert ws_p.first_improving(best_m, 3.0, 3, 0.0, best) is None
    assert ws_c.first_improving(best_m, 3.0, 3, 0.0, best) is None


def test_workspace_accepts_read_only_views():
    inst = gen_random(6, 0)
    assert not inst.q.flags.writeable
    ws = make_workspace(inst)
    assert np.isfinite(ws.med([0]))


def test_env_override_forces_python(monkeypatch):
    import importlib

    monkeypatch.setenv("MEDFOREST_PURE_PYTHON", "1")
    mod = importlib.reload(_kernels)
    try:
        assert mod.BACKEND == "python"
    finally:
        monkeypatch.delenv("MEDFOREST_PURE_PYTHON")
        importlib.reload(_kernels)
