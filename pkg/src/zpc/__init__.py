"""Riemann zeta zeros and pair-correlation statistics."""
