"""Nonadiabatic holonomic gates on Jaynes-Cummings polariton qubits, simulated at pulse level."""

__version__ = "0.1.0"
