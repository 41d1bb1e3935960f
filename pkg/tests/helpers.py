"""Small model-building helpers shared by the tests."""
import itertools

import numpy as np

from qcrelax.analysis import FixedPointProbe
from qcrelax.model import ModelBuilder, continuous


def fragment_model(frag, hosts, name="frag"):
    """Model with host variables ``{name: (lo, hi)}`` plus ``frag``; zero objective."""
    b = ModelBuilder(name)
    for v, (lo, hi) in hosts.items():
        b.add_var(continuous(v, lo, hi))
    b.add_fragment(frag)
    return b.build()


def lp_range(model, var, fixed):
    probe = FixedPointProbe(model)
    return probe.minimize(var, fixed), probe.maximize(var, fixed)


def mip_range(model, var, fixed):
    """Range of ``var`` over the MIP by enumerating every binary assignment."""
    probe = FixedPointProbe(model)
    bins = model.binaries
    lo, hi = np.inf, -np.inf
    for bits in itertools.product((0.0, 1.0), repeat=len(bins)):
        f = dict(fixed)
        f.update(zip(bins, bits))
        lo = min(lo, probe.minimize(var, f))
        hi = max(hi, probe.maximize(var, f))
    return lo, hi
