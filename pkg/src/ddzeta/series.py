"""Descriptors for the coefficient sequence α̃ in Φ₂(s₁, s₂; 1, α̃)."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional


class SeriesKind(enum.Enum):
    LAMBDA = "lambda"
    MU = "mu"
    PLUGIN = "plugin"


@dataclass(frozen=True)
class SeriesSpec:
    """Which double series to evaluate.

    LAMBDA and MU carry no data.  A PLUGIN series describes α̃ = α∗μ through
    its parent α: ``delta`` is the abscissa of the pole of Φ(s; α) (None when
    Φ(s; α)/ζ(s) has no pole there), ``residue_at_delta`` the residue of
    Φ(s; α)/ζ(s) at ``delta``, ``phi_at_neg_k(k)`` = Φ(-k; α), ``c_k(k)`` the
    constant term of Φ(s; α)/ζ(s) at s = -k for even k.  ``phi(s)`` = Φ(s; α)
    is needed on the contour and at the zeros, and ``alpha_tilde(n)`` feeds the
    direct-sum oracle.
    """

    kind: SeriesKind
    delta: Optional[object] = None
    residue_at_delta: Optional[object] = None
    phi_at_neg_k: Optional[Callable] = None
    c_k: Optional[Callable] = None
    phi: Optional[Callable] = None
    alpha_tilde: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if self.kind is SeriesKind.PLUGIN:
            missing = [f for f in ("phi_at_neg_k", "c_k", "phi") if getattr(self, f) is None]
            if self.delta is not None and self.residue_at_delta is None:
                missing.append("residue_at_delta")
            if missing:
                raise ValueError(f"plug-in series needs {', '.join(missing)}")
            # δ = 0 would put the pole of Γ(δ) inside the residue term
            if self.delta is not None and not self.delta > 0:
                raise ValueError("delta must be > 0")

    @property
    def label(self) -> str:
        return self.name or self.kind.value

    @staticmethod
    def parse(text: str) -> "SeriesSpec":
        t = text.strip().lower()
        if t in ("lambda", "λ", "mangoldt"):
            return LAMBDA
        if t in ("mu", "μ", "moebius", "mobius"):
            return MU
        raise ValueError(f"unknown series {text!r} (expected lambda or mu)")


LAMBDA = SeriesSpec(SeriesKind.LAMBDA)
MU = SeriesSpec(SeriesKind.MU)
