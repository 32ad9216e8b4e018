"""Vertex cover kernelization through inflation and deflation of reduction rules."""

__version__ = "0.1.0"
