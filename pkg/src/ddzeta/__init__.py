"""Continuation of the double Dirichlet series Φ₂(s₁, s₂; 1, α) for the von
Mangoldt and Möbius coefficients, with exact residue arithmetic."""

__version__ = "0.1.0"
