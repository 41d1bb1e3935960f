"""Doubly discretized NMDT: both factors carry base-2 digits.

For ``z = xy`` the identity

    xy = sum_j 2^-j [beta^y_j ((1-lam) dx + lam x) + beta^x_j (lam dy + (1-lam) y)] + dx dy

is relaxed term by term: the two blended factors become bounded auxiliary
variables, each digit product gets a binary McCormick envelope and only
``dx * dy`` is relaxed continuously.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, MutableMapping, Optional

from .envelopes import bilinear_envelope, binary_envelope, square_envelope
from .errors import ConfigError
from .model import Interval, LinearFragment, continuous, row
from .nmdt import DigitFragment, build_digits
from .sawtooth import SawtoothFragment, build_epigraph_relaxation


@dataclass
class DnmdtFragment(LinearFragment):
    z: str = ""
    x: str = ""
    y: str = ""
    beta_x: List[str] = field(default_factory=list)
    beta_y: List[str] = field(default_factory=list)
    delta_x: str = ""
    delta_y: str = ""
    u: List[str] = field(default_factory=list)
    v: List[str] = field(default_factory=list)
    delta_z: str = ""
    blend_u: str = ""        # lam*dy + (1-lam)*y, multiplies beta_x
    blend_v: str = ""        # (1-lam)*dx + lam*x, multiplies beta_y
    lam: float = 0.5
    own_digits: List[DigitFragment] = field(default_factory=list)
    epigraph: Optional[SawtoothFragment] = None

    @property
    def square(self) -> bool:
        return self.x == self.y

    def complete(self, values: MutableMapping[str, float]) -> None:
        """Canonical extension; shared digits and sawtooth blocks must be filled in."""
        for d in self.own_digits:
            d.complete(values)
        if self.epigraph is not None and self.epigraph.new_vars:
            self.epigraph.complete(values)
        dx = values[self.delta_x]
        if self.square:
            w = dx + values[self.x]
            values[self.blend_u] = w
            for b, u in zip(self.beta_x, self.u):
                values[u] = values[b] * w
            values[self.delta_z] = dx * dx
            return
        lam = self.lam
        dy = values[self.delta_y]
        wu = lam * dy + (1.0 - lam) * values[self.y]
        wv = (1.0 - lam) * dx + lam * values[self.x]
        values[self.blend_u] = wu
        values[self.blend_v] = wv
        for b, u in zip(self.beta_x, self.u):
            values[u] = values[b] * wu
        for b, v in zip(self.beta_y, self.v):
            values[v] = values[b] * wv
        values[self.delta_z] = dx * dy


def _shared(var, L, digits, prefix, owned):
    if digits is None:
        d = build_digits(var, L, f"{prefix}{var}_")
        owned.append(d)
        return d
    if digits.L != L or digits.x != var:
        raise ConfigError(f"shared digits for {digits.x} (depth {digits.L}) do not match {var} at depth {L}")
    return digits


def relax_bilinear_dnmdt(z: str, x: str, y: str, L: int, lam: float = 0.5,
                         digits_x: Optional[DigitFragment] = None,
                         digits_y: Optional[DigitFragment] = None,
                         prefix: str = "") -> DnmdtFragment:
    """D-NMDT fragment for ``z = xy`` over the unit square."""
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"lambda must lie in [0, 1], got {lam}")
    if x == y:
        raise ConfigError("use relax_square_dnmdt for squares")
    prefix = prefix or f"dn_{z}_"
    owned: List[DigitFragment] = []
    dgx = _shared(x, L, digits_x, prefix, owned)
    dgy = _shared(y, L, digits_y, prefix, owned)
    h = 2.0 ** (-L)
    iu = Interval(0.0, lam * h + (1.0 - lam))
    iv = Interval(0.0, (1.0 - lam) * h + lam)
    wu = continuous(f"{prefix}wu", iu.lo, iu.hi)
    wv = continuous(f"{prefix}wv", iv.lo, iv.hi)
    uv = [continuous(f"{prefix}u{j}", 0.0, iu.hi) for j in range(1, L + 1)]
    vv = [continuous(f"{prefix}v{j}", 0.0, iv.hi) for j in range(1, L + 1)]
    dz = continuous(f"{prefix}dz", 0.0, h * h)
    frag = DnmdtFragment([], [], z=z, x=x, y=y, beta_x=list(dgx.beta), beta_y=list(dgy.beta),
                         delta_x=dgx.delta, delta_y=dgy.delta,
                         u=[a.name for a in uv], v=[a.name for a in vv], delta_z=dz.name,
                         blend_u=wu.name, blend_v=wv.name, lam=lam, own_digits=owned)
    for d in owned:
        frag.extend(d)
    frag.new_vars += [wu, wv] + uv + vv + [dz]
    coefs = {z: 1.0, dz.name: -1.0}
    for j in range(1, L + 1):
        coefs[frag.u[j - 1]] = -(2.0 ** (-j))
        coefs[frag.v[j - 1]] = -(2.0 ** (-j))
    frag.rows += [
        row(coefs, "==", 0.0, f"{prefix}sum"),
        row({wu.name: 1.0, dgy.delta: -lam, y: -(1.0 - lam)}, "==", 0.0, f"{prefix}blend_u"),
        row({wv.name: 1.0, dgx.delta: -(1.0 - lam), x: -lam}, "==", 0.0, f"{prefix}blend_v"),
    ]
    for b, u in zip(frag.beta_x, frag.u):
        frag.extend(binary_envelope(wu.name, iu, b, u))
    for b, v in zip(frag.beta_y, frag.v):
        frag.extend(binary_envelope(wv.name, iv, b, v))
    frag.extend(bilinear_envelope(dgx.delta, Interval(0.0, h), dgy.delta, Interval(0.0, h), dz.name))
    return frag


def relax_square_dnmdt(y: str, x: str, L: int, digits: Optional[DigitFragment] = None,
                       prefix: str = "") -> DnmdtFragment:
    """Univariate D-NMDT: ``y = sum_j 2^-j u_j + dy`` with ``u_j ~ beta_j (dx + x)``, ``dy ~ dx^2``."""
    prefix = prefix or f"dn_{y}_"
    owned: List[DigitFragment] = []
    dg = _shared(x, L, digits, prefix, owned)
    h = 2.0 ** (-L)
    iw = Interval(0.0, 1.0 + h)
    w = continuous(f"{prefix}w", iw.lo, iw.hi)
    uv = [continuous(f"{prefix}u{j}", 0.0, iw.hi) for j in range(1, L + 1)]
    dz = continuous(f"{prefix}dz", 0.0, h * h)
    frag = DnmdtFragment([], [], z=y, x=x, y=x, beta_x=list(dg.beta), beta_y=list(dg.beta),
                         delta_x=dg.delta, delta_y=dg.delta, u=[a.name for a in uv],
                         delta_z=dz.name, blend_u=w.name, lam=0.5, own_digits=owned)
    for d in owned:
        frag.extend(d)
    frag.new_vars += [w] + uv + [dz]
    coefs = {y: 1.0, dz.name: -1.0}
    for j, u in enumerate(frag.u, start=1):
        coefs[u] = -(2.0 ** (-j))
    frag.rows += [
        row(coefs, "==", 0.0, f"{prefix}sum"),
        row({w.name: 1.0, dg.delta: -1.0, x: -1.0}, "==", 0.0, f"{prefix}blend"),
    ]
    for b, u in zip(frag.beta_x, frag.u):
        frag.extend(binary_envelope(w.name, iw, b, u))
    frag.extend(square_envelope(dg.delta, Interval(0.0, h), dz.name))
    return frag


def relax_square_tdnmdt(y: str, x: str, L: int, L1: int, digits: Optional[DigitFragment] = None,
                        sawtooth: Optional[SawtoothFragment] = None, prefix: str = "") -> DnmdtFragment:
    """Univariate D-NMDT with the depth-``L1`` sawtooth epigraph added.

    The McCormick lower rows of the plain fragment are kept.
    """
    if L1 < L:
        raise ConfigError(f"tightening depth L1={L1} is smaller than L={L}")
    if sawtooth is not None and len(sawtooth.g) < L1 + 1:
        raise ConfigError("shared sawtooth block is shallower than L1")
    prefix = prefix or f"dn_{y}_"
    frag = relax_square_dnmdt(y, x, L, digits, prefix)
    epi = build_epigraph_relaxation(x, y, L1, f"{prefix}saw_", lp=sawtooth)
    frag.extend(epi)
    frag.epigraph = epi
    return frag
