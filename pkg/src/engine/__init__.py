# Moteur de simulation
from .f2linalg import BitMatrix, BitVector
from .qsim import CliffordElement, PauliString, StateVector
from .conjugate import decode_bb84, encode_bb84, measure_in_bases
from .unclonable import CompiledScheme, CueScheme, UeScheme, compile_key_testing
from .qsio import OpaqueProgram, QuantumImplementation, wrap_opaque
from .glreduce import MeasurementFamily, gl_extract, gl_success_formula
