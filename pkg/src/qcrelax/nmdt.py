"""NMDT relaxations: discretize one factor in base 2, McCormick the rest.

All builders assume host variables already live on ``[0, 1]``.  A variable's
digits are built once with :func:`build_digits` and shared by every fragment
that discretizes it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, MutableMapping, Optional

from .envelopes import bilinear_envelope, binary_envelope
from .errors import ConfigError
from .model import UNIT, Interval, LinearFragment, binary, continuous, row
from .sawtooth import SawtoothFragment, build_epigraph_relaxation


def binary_digits(x: float, L: int):
    """First ``L`` base-2 digits of ``x`` in ``[0, 1]`` and the residual.

    ``x = 1`` maps to all-ones digits with residual ``2^-L``.
    """
    x = min(max(float(x), 0.0), 1.0)
    k = min(int(math.floor(x * 2 ** L)), 2 ** L - 1)
    digits = [(k >> (L - j)) & 1 for j in range(1, L + 1)]
    return digits, max(x - k * 2.0 ** (-L), 0.0)


@dataclass
class DigitFragment(LinearFragment):
    """``x = sum_j 2^-j beta_j + delta`` with ``delta in [0, 2^-L]``."""

    x: str = ""
    beta: List[str] = field(default_factory=list)
    delta: str = ""

    @property
    def L(self) -> int:
        return len(self.beta)

    def complete(self, values: MutableMapping[str, float]) -> None:
        digits, rem = binary_digits(values[self.x], self.L)
        for b, d in zip(self.beta, digits):
            values[b] = float(d)
        values[self.delta] = rem


def build_digits(x: str, L: int, prefix: str = "") -> DigitFragment:
    if L < 1:
        raise ConfigError("depth L must be at least 1")
    prefix = prefix or f"{x}_"
    bv = [binary(f"{prefix}b{j}") for j in range(1, L + 1)]
    dv = continuous(f"{prefix}dx", 0.0, 2.0 ** (-L))
    coefs = {x: 1.0, dv.name: -1.0}
    for j, b in enumerate(bv, start=1):
        coefs[b.name] = -(2.0 ** (-j))
    rows = [row(coefs, "==", 0.0, f"{prefix}digits")]
    return DigitFragment(bv + [dv], rows, x=x, beta=[b.name for b in bv], delta=dv.name)


@dataclass
class NmdtFragment(LinearFragment):
    """``z = sum_j 2^-j u_j + dz`` with ``u_j ~ beta_j * y`` and ``dz ~ dx * y``.

    ``x`` is the discretized factor, ``y`` the other one (``y == x`` for squares).
    """

    z: str = ""
    x: str = ""
    y: str = ""
    beta: List[str] = field(default_factory=list)
    delta_x: str = ""
    u: List[str] = field(default_factory=list)
    delta_z: str = ""
    digits: Optional[DigitFragment] = None
    epigraph: Optional[SawtoothFragment] = None
    owns_digits: bool = False

    def complete(self, values: MutableMapping[str, float]) -> None:
        """Canonical extension of ``(x, y, z = xy)``.

        Shared digits and shared sawtooth blocks must already be filled in.
        """
        if self.owns_digits:
            self.digits.complete(values)
        if self.epigraph is not None and self.epigraph.new_vars:
            self.epigraph.complete(values)
        yv = values[self.y]
        for b, u in zip(self.beta, self.u):
            values[u] = values[b] * yv
        values[self.delta_z] = values[self.delta_x] * yv


def _product_part(z, x, y, L, digits: DigitFragment, prefix, own_digits) -> NmdtFragment:
    uv = [continuous(f"{prefix}u{j}", 0.0, 1.0) for j in range(1, L + 1)]
    dz = continuous(f"{prefix}dz", 0.0, 2.0 ** (-L))
    frag = NmdtFragment(uv + [dz], [], z=z, x=x, y=y, beta=list(digits.beta),
                        delta_x=digits.delta, u=[v.name for v in uv], delta_z=dz.name,
                        digits=digits, owns_digits=own_digits)
    if own_digits:
        frag.new_vars[:0] = digits.new_vars
        frag.rows.extend(digits.rows)
    coefs = {z: 1.0, dz.name: -1.0}
    for j, u in enumerate(frag.u, start=1):
        coefs[u] = -(2.0 ** (-j))
    frag.rows.append(row(coefs, "==", 0.0, f"{prefix}sum"))
    for b, u in zip(frag.beta, frag.u):
        frag.extend(binary_envelope(y, UNIT, b, u))
    frag.extend(bilinear_envelope(digits.delta, Interval(0.0, 2.0 ** (-L)), y, UNIT, dz.name))
    return frag


def _digits_for(x, L, digits, prefix):
    if digits is None:
        return build_digits(x, L, f"{prefix}{x}_"), True
    if digits.L != L or digits.x != x:
        raise ConfigError(f"shared digits for {digits.x} (depth {digits.L}) do not match {x} at depth {L}")
    return digits, False


def relax_bilinear_nmdt(z: str, x: str, y: str, L: int, side: str = "x",
                        digits: Optional[DigitFragment] = None, prefix: str = "") -> NmdtFragment:
    """NMDT fragment for ``z = xy``; ``side`` names the discretized factor.

    Pass ``digits`` to reuse the discretized variable's shared digits, otherwise
    a private digit block is declared inside the fragment.
    """
    if side not in ("x", "y"):
        raise ConfigError("side must be 'x' or 'y'")
    if side == "y":
        x, y = y, x
    prefix = prefix or f"nm_{z}_"
    dig, own = _digits_for(x, L, digits, prefix)
    return _product_part(z, x, y, L, dig, prefix, own)


def relax_square_nmdt(y: str, x: str, L: int, digits: Optional[DigitFragment] = None,
                      prefix: str = "") -> NmdtFragment:
    """Univariate NMDT for ``y = x^2``: binary envelopes on ``(x, beta_j)``, McCormick on ``(dx, x)``."""
    prefix = prefix or f"nm_{y}_"
    dig, own = _digits_for(x, L, digits, prefix)
    return _product_part(y, x, x, L, dig, prefix, own)


def relax_square_tnmdt(y: str, x: str, L: int, L1: int, digits: Optional[DigitFragment] = None,
                       sawtooth: Optional[SawtoothFragment] = None, prefix: str = "") -> NmdtFragment:
    """Univariate NMDT plus the depth-``L1`` sawtooth epigraph cuts on ``(x, y)``."""
    if L1 < L:
        raise ConfigError(f"tightening depth L1={L1} is smaller than L={L}")
    if sawtooth is not None and len(sawtooth.g) < L1 + 1:
        raise ConfigError("shared sawtooth block is shallower than L1")
    prefix = prefix or f"nm_{y}_"
    frag = relax_square_nmdt(y, x, L, digits, prefix)
    epi = build_epigraph_relaxation(x, y, L1, f"{prefix}saw_", lp=sawtooth)
    frag.extend(epi)
    frag.epigraph = epi
    return frag
