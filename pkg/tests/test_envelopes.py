import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcrelax.envelopes import (bilinear_envelope, binary_envelope, mccormick_bounds, mccormick_max_error,
                               square_envelope)
from qcrelax.model import UNIT, Interval, binary

from helpers import fragment_model, lp_range


def _rowset(frag):
    return sorted((tuple(sorted(r.coefs.items())), r.sense, r.rhs) for r in frag.rows)


def test_unit_box_bilinear_rows():
    rows = _rowset(bilinear_envelope("x", UNIT, "y", UNIT, "z"))
    want = sorted([
        ((("z", 1.0),), ">=", 0.0),
        ((("x", -1.0), ("y", -1.0), ("z", 1.0)), ">=", -1.0),
        ((("x", -1.0), ("z", 1.0)), "<=", 0.0),
        ((("y", -1.0), ("z", 1.0)), "<=", 0.0),
    ])
    got = [(tuple(sorted(c)), s, r) for c, s, r in rows]
    assert sorted(got) == want


def test_envelope_point_checks():
    frag = bilinear_envelope("x", UNIT, "y", UNIT, "z")
    assert frag.max_violation({"x": 0.5, "y": 0.5, "z": 0.25}) == 0.0
    assert frag.max_violation({"x": 0.5, "y": 0.5, "z": 0.51}) == pytest.approx(0.01)


def test_degenerate_interval_pins_product():
    m = fragment_model(bilinear_envelope("x", Interval(0.3, 0.3), "y", UNIT, "z"),
                       {"x": (0.3, 0.3), "y": (0, 1), "z": (-1, 1)})
    lo, hi = lp_range(m, "z", {"y": 0.6})
    assert lo == pytest.approx(0.18) and hi == pytest.approx(0.18)


@pytest.mark.parametrize("beta,lo_want,hi_want", [(0.0, 0.0, 0.0), (1.0, 0.7, 0.7)])
def test_binary_envelope_forces_product(beta, lo_want, hi_want):
    frag = binary_envelope("x", UNIT, "b", "z")
    m = fragment_model(frag, {"x": (0, 1), "z": (-5, 5), "b": (0, 1)})
    lo, hi = lp_range(m, "z", {"x": 0.7, "b": beta})
    assert lo == pytest.approx(lo_want) and hi == pytest.approx(hi_want)


def test_binary_envelope_relaxed_range():
    frag = binary_envelope("x", Interval(-1, 2), "b", "z")
    m = fragment_model(frag, {"x": (-1, 2), "z": (-5, 5), "b": (0, 1)})
    lo, hi = lp_range(m, "z", {"x": 0.5, "b": 0.5})
    assert lo == pytest.approx(-0.5) and hi == pytest.approx(1.0)


def test_square_envelope_unit_and_symmetric():
    m = fragment_model(square_envelope("x", UNIT, "y"), {"x": (0, 1), "y": (-5, 5)})
    lo, hi = lp_range(m, "y", {"x": 0.5})
    assert lo == pytest.approx(0.0) and hi - 0.25 == pytest.approx(0.25)
    m = fragment_model(square_envelope("x", Interval(-1, 1), "y"), {"x": (-1, 1), "y": (-5, 5)})
    assert lp_range(m, "y", {"x": 0.0}) == pytest.approx((-1.0, 1.0))  # endpoint tangents only
    assert lp_range(m, "y", {"x": 0.5}) == pytest.approx((0.0, 1.0))
    assert lp_range(m, "y", {"x": -0.75}) == pytest.approx((0.5, 1.0))


def test_max_error_examples():
    assert mccormick_max_error(UNIT, UNIT) == (0.25, (0.5, 0.5))
    assert mccormick_max_error(Interval(0, 0.25), UNIT)[0] == 2.0 ** -4
    assert mccormick_max_error(Interval(0.5, 0.5), UNIT)[0] == 0.0


@given(st.floats(-3, 3), st.floats(0.01, 3), st.floats(-3, 3), st.floats(0.01, 3), st.integers(0, 999))
def test_envelope_contains_graph_and_error_bound(xl, wx, yl, wy, seed):
    xb, yb = Interval(xl, xl + wx), Interval(yl, yl + wy)
    rng = np.random.default_rng(seed)
    x = xb.lo + wx * rng.random(200)
    y = yb.lo + wy * rng.random(200)
    lo, hi = mccormick_bounds(x, y, xb, yb)
    tol = 1e-9 * (1 + abs(xl) + wx) * (1 + abs(yl) + wy)
    assert np.all(lo <= x * y + tol) and np.all(x * y <= hi + tol)
    err = mccormick_max_error(xb, yb)[0]
    assert np.all(hi - x * y <= err + tol) and np.all(x * y - lo <= err + tol)
    # error attained at the box midpoint
    mlo, mhi = mccormick_bounds(xb.mid, yb.mid, xb, yb)
    assert float(mhi - xb.mid * yb.mid) == pytest.approx(err, abs=tol)
    assert float(xb.mid * yb.mid - mlo) == pytest.approx(err, abs=tol)
