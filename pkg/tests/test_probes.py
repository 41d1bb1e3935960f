import numpy as np
import pytest

from qcrelax.analysis import (avg_width_lp, lp_volume_univariate, sawtooth_lp_gap, sharpness_probe,
                              univariate_witness)
from qcrelax.analysis.lp_probes import lower_convex_envelope
from qcrelax.dnmdt import relax_bilinear_dnmdt
from qcrelax.envelopes import bilinear_envelope
from qcrelax.model import UNIT, Method
from qcrelax.nmdt import relax_bilinear_nmdt


def test_mccormick_lp_volume():
    mean, se = lp_volume_univariate(Method.MCCORMICK, 1, samples=2000)
    assert abs(mean - 0.25) < 3 * se + 1e-12


@pytest.mark.parametrize("method", ["nmdt", "dnmdt", "tnmdt", "tdnmdt"])
def test_lp_volume_dominates_mip_width(method):
    # the LP relaxation contains the MIP relaxation, so its width is never smaller
    from qcrelax.analysis import projected_bounds
    mean, se = lp_volume_univariate(method, 2, samples=1000, seed=1)
    rng = np.random.default_rng(1)
    x = rng.random(1000)
    lo, hi = projected_bounds(method, 2, x)
    assert mean >= float(np.mean(hi - lo)) - 1e-9


@pytest.mark.parametrize("L", [1, 2])
def test_sawtooth_gap(L):
    gap, x = sawtooth_lp_gap(L, points=2 ** 10 + 1)
    assert gap == pytest.approx(2.0 ** (-2 * L - 4), abs=1e-9)


@pytest.mark.parametrize("method,L", [("nmdt", 2), ("dnmdt", 2), ("mc", 1), ("tdnmdt", 1)])
def test_lp_widths_match_closed_form(method, L):
    lp_w, cf_w = avg_width_lp(method, L, samples=60)
    assert np.allclose(lp_w, cf_w, atol=1e-9)
    lp_w, cf_w = avg_width_lp(method, L, samples=60, univariate=True)
    assert np.allclose(lp_w, cf_w, atol=1e-9)


def test_sharpness_passes_for_nmdt_and_dnmdt():
    nm = sharpness_probe(lambda z, x, y: relax_bilinear_nmdt(z, x, y, 2, prefix="n_"), n_points=300)
    assert nm.passed and nm.inside_checked == nm.outside_checked == 300
    dn = sharpness_probe(lambda z, x, y: relax_bilinear_dnmdt(z, x, y, 1, prefix="d_"), n_points=300)
    assert dn.passed


def test_sharpness_catches_a_loose_fragment():
    def loose(z, x, y):
        frag = bilinear_envelope(x, UNIT, y, UNIT, z)
        frag.rows = frag.rows[:3]  # drop one upper row
        return frag
    rep = sharpness_probe(loose, n_points=300)
    assert not rep.passed and rep.inside_expected is False


def test_sharpness_catches_a_too_tight_fragment():
    def tight(z, x, y):
        from qcrelax.model import row
        frag = bilinear_envelope(x, UNIT, y, UNIT, z)
        frag.rows.append(row({z: 1.0}, "<=", 0.2))
        return frag
    rep = sharpness_probe(tight, n_points=300)
    assert not rep.passed and rep.inside_expected is True


@pytest.mark.parametrize("method", ["nmdt", "dnmdt"])
@pytest.mark.parametrize("L", [1, 2, 3])
def test_univariate_witness(method, L):
    w = univariate_witness(method, L)
    assert w.lp_feasible and w.outside_hull and w.confirmed
    assert w.point == (0.5, 0.0)


def test_lower_convex_envelope():
    xs = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    ys = np.array([0.0, 0.3, 0.1, 0.4, 1.0])
    hx, hy = lower_convex_envelope(xs, ys)
    assert list(hx) == [0.0, 0.5, 0.75, 1.0]  # (0.75, 0.4) lies below the chord at 0.55
