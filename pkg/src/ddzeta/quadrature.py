"""Piecewise Gauss–Legendre quadrature along a vertical line.

Integrands here are analytic on the line and decay like exp(-π|t|), with
their nearest singularities a fixed distance off the line near t = 0.  Panels
therefore start at width ``dmin`` next to t = 0 and double outwards up to a
fixed cap; each panel's order comes from the Bernstein ellipse that fits
between the panel and the nearest singularity.  The error of each panel is estimated by
comparing against the half-order rule on the same panel.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mp

__all__ = ["gauss_legendre", "LineRule", "line_rule", "QuadratureError"]


class QuadratureError(ArithmeticError):
    """Quadrature estimate failed to reach the requested tolerance."""


@lru_cache(maxsize=256)
def gauss_legendre(n: int, bits: int):
    """Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with mpmath.workprec(bits + 20):
        nodes, weights = [], []
        eps = mpmath.mpf(2) ** (-(bits + 10))
        for i in range(1, (n + 1) // 2 + 1):
            x = mpmath.mpf(math.cos(math.pi * (i - 0.25) / (n + 0.5)))
            for _ in range(100):
                p0, p1 = mpmath.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                if n == 1:
                    p0, p1 = mpmath.mpf(1), x
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < eps:
                    break
            else:
                raise QuadratureError(f"Legendre root {i} of P_{n} did not converge")
            # recompute derivative at the converged root
            p0, p1 = mpmath.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1) if n > 1 else mpmath.mpf(1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append(x)
            weights.append(w)
        full_n, full_w = [], []
        for x, w in zip(nodes, weights):
            full_n.append(-x)
            full_w.append(w)
        mirror = nodes if n % 2 == 0 else nodes[:-1]
        mirror_w = weights if n % 2 == 0 else weights[:-1]
        for x, w in zip(reversed(mirror), reversed(mirror_w)):
            full_n.append(x)
            full_w.append(w)
        if n % 2:
            full_n[n // 2] = mpmath.mpf(0)
    return tuple(+x for x in full_n), tuple(+w for w in full_w)


def _rho(a: float, b: float, q: complex) -> float:
    """Bernstein-ellipse parameter for [a, b] and a singularity at q."""
    h = (b - a) / 2
    w = (q - (a + b) / 2) / h
    r = w + (w - 1) ** 0.5 * (w + 1) ** 0.5
    return max(abs(r), 1 / abs(r))


@dataclass(frozen=True)
class Panel:
    a: float
    b: float
    n: int
    rho: float
    start: int  # offset of this panel's nodes in the full-order arrays
    half_start: int
    rho_raw: float = 0.0


class LineRule:
    """Panels on [0, T] (``two_sided=False``) or [-T, T].

    Singularities are assumed no closer to the line than ``dmin``, sitting
    at t = ±i·dmin in the worst case, plus any ``extra`` t-plane points.

    Panel orders target an absolute error of 10^-digits relative to the size
    of the integrand at t = 0.  The integrand is modelled as decaying like
    exp(-decay·|t|) along the line and growing at most like |t|^(kappa·|y|)
    when t moves a distance y off the real axis; ellipses are therefore
    capped at semi-minor axis ``y_cap`` and panels at width ``w_max``.
    """

    def __init__(self, dmin: float, T: float, digits: int, bits: int, two_sided: bool,
                 extra: tuple = (), decay: float = math.pi, kappa: float = 2.0,
                 y_cap: float = 4.0, w_max: float = 8.0):
        if not (dmin > 0 and T > dmin):
            raise ValueError("need 0 < dmin < T")
        self.dmin, self.T, self.digits, self.bits = dmin, T, digits, bits
        self.two_sided = two_sided
        self.extra = tuple(extra)
        breaks = [0.0]
        w = dmin
        while breaks[-1] < T:
            nxt = min(breaks[-1] + w, T)
            if T - nxt < 0.5 * w:
                nxt = T
            breaks.append(nxt)
            if len(breaks) > 2:
                w = min(2 * w, w_max)
        pieces = list(zip(breaks[:-1], breaks[1:]))
        if two_sided:
            pieces = [(-b, -a) for a, b in reversed(pieces)] + pieces
        self.panels: list[Panel] = []
        t_full, w_full, t_half, w_half = [], [], [], []
        ln10 = math.log(10)
        for a, b in pieces:
            h = (b - a) / 2
            mid = (a + b) / 2
            sing = (complex(0, dmin), complex(0, -dmin)) + self.extra
            rho_s = min(_rho(a, b, q) for q in sing)
            rho_y = (y_cap + math.hypot(y_cap, h)) / h
            # the max of |f| on the ellipse grows near a singularity, so shrink rho a bit
            rho = min(1 + 0.85 * (rho_s - 1), rho_y)
            semi_major = h * (rho + 1 / rho) / 2
            semi_minor = h * (rho - 1 / rho) / 2
            x_near = max(0.0, abs(mid) - semi_major)
            log_m = (-decay * x_near + kappa * semi_minor * math.log(abs(mid) + semi_major + 3)) / ln10
            need = max(digits + log_m, 8.0) + 1
            n = math.ceil(need * ln10 / (2 * math.log(rho))) + 4
            n += n % 2
            self.panels.append(Panel(a, b, n, rho, len(t_full), len(t_half), rho_s))
            with mpmath.workprec(bits + 20):
                ma, mb = mpmath.mpf(a), mpmath.mpf(b)
                mid_m, hw = (ma + mb) / 2, (mb - ma) / 2
                for (xs, ws), tl, wl in ((gauss_legendre(n, bits), t_full, w_full),
                                         (gauss_legendre(n // 2, bits), t_half, w_half)):
                    tl.extend(mid_m + hw * x for x in xs)
                    wl.extend(hw * v for v in ws)
        self.t_full, self.w_full = t_full, w_full
        self.t_half, self.w_half = t_half, w_half

    def covers(self, points) -> bool:
        """True when none of the t-plane ``points`` squeezes any panel's
        ellipse below the one the rule was designed for."""
        return all(_rho(p.a, p.b, q) >= p.rho_raw * (1 - 1e-12)
                   for p in self.panels for q in points)

    @property
    def size(self) -> int:
        return len(self.t_full) + len(self.t_half)

    def combine(self, f_full, f_half):
        """Weighted sums from integrand samples at the full- and half-order
        nodes.  Returns (integral, error estimate)."""
        total = mpmath.mpc(0)
        err = mpmath.mpf(0)
        for k, p in enumerate(self.panels):
            end = self.panels[k + 1].start if k + 1 < len(self.panels) else len(self.t_full)
            hend = self.panels[k + 1].half_start if k + 1 < len(self.panels) else len(self.t_half)
            q = mpmath.fsum(w * f for w, f in zip(self.w_full[p.start:end], f_full[p.start:end]))
            qh = mpmath.fsum(w * f for w, f in zip(self.w_half[p.half_start:hend],
                                                  f_half[p.half_start:hend]))
            total += q
            # error of the n-point rule ~ |Q_n - Q_{n/2}| * rho^{-n}
            err += abs(q - qh) * mpmath.mpf(p.rho) ** (-p.n)
        return total, err


_rules: dict = {}
_rules_lock = threading.Lock()


def line_rule(dmin: float, T: float, digits: int, bits: int, two_sided: bool = False,
              extra: tuple = (), decay: float = math.pi) -> LineRule:
    extra = tuple(complex(round(q.real, 6), round(q.imag, 6)) for q in extra)
    key = (float(dmin), float(T), int(digits), int(bits), bool(two_sided), extra, float(decay))
    with _rules_lock:
        r = _rules.get(key)
        if r is None:
            r = _rules[key] = LineRule(*key)
        return r
