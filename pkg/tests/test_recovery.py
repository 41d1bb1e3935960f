import numpy as np
import pytest

from qcrelax.io import boxqp_instance, generate_boxqp
from qcrelax.model import Method, MiqcqpInstance, RelaxConfig
from qcrelax.relaxer import build_relaxation
from qcrelax.solver import SolveLimits, primal_recovery, solve_mip


def test_boxqp_recovery_improves_on_incumbent():
    for seed in range(5):
        Q, c = generate_boxqp(5, seed=seed)
        inst = boxqp_instance(Q, c)
        rel = build_relaxation(inst, RelaxConfig(Method.DNMDT, 1))
        res = solve_mip(rel.model)
        x0, _ = rel.original_point(res.incumbent)
        rec = primal_recovery(inst, res.incumbent, rel)
        assert rec.feasible
        assert np.all(rec.x >= inst.lo) and np.all(rec.x <= inst.hi)
        assert rec.objective <= inst.objective(x0) + 1e-9


def test_moves_into_feasible_interval():
    inst = MiqcqpInstance.create([(-1.0, 1.0)], c0=[-1.0], constraints=[([[1.0]], [0.0], [], -0.25)])
    rec = primal_recovery(inst, ([0.6], None))
    assert -0.5 - 1e-6 <= rec.x[0] <= 0.5 + 1e-6
    assert rec.max_violation < 1e-6 and rec.feasible


def test_infeasible_instance_reports_violation():
    inst = MiqcqpInstance.create([(0.0, 1.0)], constraints=[([[1.0]], [0.0], [], 1.0)])
    rec = primal_recovery(inst, {"x0": 0.5})
    assert not rec.feasible and rec.max_violation == pytest.approx(1.0)


def test_binaries_are_rounded():
    inst = MiqcqpInstance.create([(0.0, 1.0)], c0=[1.0], d0=[1.0], k=1)
    rec = primal_recovery(inst, {"x0": 0.3, "y0": 0.7})
    assert rec.y[0] == 1.0 and rec.x[0] == pytest.approx(0.0, abs=1e-8)
