"""Bridge between mpmath numbers and python-flint balls.

The contour nodes, zero sums and k-sums are evaluated with flint's
``acb`` type, which is an order of magnitude faster than mpmath for ζ and Γ.
Conversions are exact (mantissa/exponent pairs), so nothing is lost crossing
the boundary.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager

import flint
import mpmath
from flint import acb, acb_series, arb, fmpz

# flint keeps its precision in a process-wide context; serialize users.
_lock = threading.RLock()


@contextmanager
def arb_prec(bits: int):
    with _lock:
        old = flint.ctx.prec
        flint.ctx.prec = bits
        try:
            yield
        finally:
            flint.ctx.prec = old


def _mpf_to_arb(x) -> arb:
    sign, man, exp, _ = x._mpf_
    if not man:
        if exp:  # inf / nan
            raise ValueError(f"cannot convert {x} to a ball")
        return arb(0)
    a = arb(fmpz(-int(man) if sign else int(man)))
    return a * arb(2) ** int(exp) if exp else a


def to_acb(x) -> acb:
    x = mpmath.mpmathify(x)
    if isinstance(x, mpmath.mpc):
        return acb(_mpf_to_arb(x.real), _mpf_to_arb(x.imag))
    return acb(_mpf_to_arb(x))


def to_arb(x) -> arb:
    return _mpf_to_arb(mpmath.mpf(x))


def _arb_to_mpf(a: arb):
    man, exp = a.mid().man_exp()
    return mpmath.mpf((int(man), int(exp)))


def to_mpc(a: acb):
    return mpmath.mpc(_arb_to_mpf(a.real), _arb_to_mpf(a.imag))


def radius(a: acb):
    """Upper bound on the ball radius of ``a`` as an mpf."""
    r = a.real.rad() + a.imag.rad()
    return _arb_to_mpf(arb(r.upper()))


def zeta_jet(w: acb, order: int = 2):
    """(ζ(w), ζ'(w), ..., ζ^(order-1)(w)/(order-1)!) as Taylor coefficients."""
    coeffs = [w, acb(1)] if order > 1 else [w]
    ser = acb_series(coeffs, prec=order).zeta()
    return ser.coeffs() + [acb(0)] * (order - len(ser.coeffs()))


def pi() -> arb:
    return arb.pi()
