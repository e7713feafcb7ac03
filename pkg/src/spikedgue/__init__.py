"""Simulation and numerical checks for eigenvectors of the spiked GUE at the critical edge."""
__version__ = "0.1.0"
