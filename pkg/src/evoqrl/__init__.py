"""Evolutionary training of variational-quantum-circuit and neural-network agents in the Coin Game."""

__version__ = "0.1.0"
