"""Computational conformal geometry on the Riemann sphere: Schottky reflection groups,
annulus widths, explicit bi-Lipschitz maps, classical and transboundary modulus on grids,
and a numerical Koebe circle-domain uniformizer."""

__version__ = "0.1.0"
