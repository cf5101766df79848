"""Quantum data hiding with a double-pass parametric down-conversion source."""

from .fock import FockState, Mode, ModeMap, Pol, h, v, vacuum
from .gba import DEFAULT_CIRCUIT, GbaCircuit, calibrate, classify, measure
from .protocol import decode, distribute, encode, run_sessions
from .states import BellLabel, GbaClass, SourceParams, bell, theta, verify_decomposition

__version__ = "0.1.0"

__all__ = [
    "BellLabel", "DEFAULT_CIRCUIT", "FockState", "GbaCircuit", "GbaClass", "Mode", "ModeMap", "Pol",
    "SourceParams", "bell", "calibrate", "classify", "decode", "distribute", "encode", "h", "measure",
    "run_sessions", "theta", "v", "vacuum", "verify_decomposition",
]
