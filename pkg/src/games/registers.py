"""
Registres des parties A et B

Le harnais vérifie le partage produit par l'adversaire (qubits disjoints,
ressources quantiques non dupliquées) puis remet à chaque partie une vue
qui n'agit que sur ses propres qubits.
"""

from typing import Any, Dict, Iterable, Optional, Sequence, Set

import numpy as np

from ..core.errors import DimensionError, ProtocolViolation
from ..engine.conjugate import measure_in_bases
from ..engine.f2linalg import BitVector
from ..engine.glreduce import MeasurementFamily, gl_extract_with_state
from ..engine.qsim import StateVector, apply_unitary, measure_computational
from ..engine.qsio import CliffordOtpArtifact, OpaqueProgram, QuantumImplementation
from ..engine.unclonable import CompiledCiphertext, CueCiphertext, UeCiphertext
from .models import PartyRegisters, PirateSplit

# Objets porteurs d'un état quantique : jamais attribués aux deux parties
QUANTUM_RESOURCES = (
    StateVector, OpaqueProgram, QuantumImplementation, CliffordOtpArtifact,
    UeCiphertext, CueCiphertext, CompiledCiphertext,
)


def quantum_resource_ids(value: Any, seen: Optional[Set[int]] = None) -> Set[int]:
    """Identités des ressources quantiques contenues (récursif sur les conteneurs)"""
    seen = set() if seen is None else seen
    if isinstance(value, QUANTUM_RESOURCES):
        seen.add(id(value))
    elif isinstance(value, dict):
        for item in value.values():
            quantum_resource_ids(item, seen)
    elif isinstance(value, (list, tuple, set, frozenset)):
        for item in value:
            quantum_resource_ids(item, seen)
    return seen


def check_split(split: PirateSplit) -> None:
    """Lève ProtocolViolation si le partage est mal formé"""
    if not isinstance(split, PirateSplit):
        raise ProtocolViolation(f"Phase 1 doit retourner un PirateSplit, pas {type(split).__name__}")
    n = split.state.num_qubits
    for party, regs in (("A", split.a), ("B", split.b)):
        if len(set(regs.qubits)) != len(regs.qubits):
            raise ProtocolViolation(f"Qubits répétés: {list(regs.qubits)}", party)
        for q in regs.qubits:
            if not 0 <= q < n:
                raise ProtocolViolation(f"Qubit {q} hors de l'état ({n} qubits)", party)
    overlap = set(split.a.qubits) & set(split.b.qubits)
    if overlap:
        raise ProtocolViolation(f"Registres A et B non disjoints: {sorted(overlap)}")
    shared = quantum_resource_ids(split.a.items) & quantum_resource_ids(split.b.items)
    if shared:
        raise ProtocolViolation(f"{len(shared)} ressource(s) quantique(s) remise(s) aux deux parties")
    if id(split.state) in quantum_resource_ids(split.a.items) | quantum_resource_ids(split.b.items):
        raise ProtocolViolation("L'état joint ne peut pas être remis comme objet")


def check_no_stash(adversary: Any) -> None:
    """L'adversaire ne conserve aucune ressource quantique hors des registres"""
    attributes = vars(adversary)
    if quantum_resource_ids(attributes):
        raise ProtocolViolation("Ressource quantique conservée hors des registres après la phase 1")
    # Adversaires internes des réductions
    for value in attributes.values():
        if hasattr(value, "phase1") and hasattr(value, "__dict__"):
            check_no_stash(value)


class PartyView:
    """
    Accès d'une partie à l'état joint

    Seuls les qubits de la partie sont manipulables ; les objets remis en
    phase 1 sont consultables par nom.
    """

    def __init__(self, party: str, state: StateVector, registers: PartyRegisters):
        self.party = party
        self._state = state
        self._qubits = tuple(registers.qubits)
        self._items = dict(registers.items)

    @property
    def qubits(self) -> tuple:
        return self._qubits

    @property
    def items(self) -> Dict[str, Any]:
        return dict(self._items)

    def item(self, name: str) -> Any:
        if name not in self._items:
            raise ProtocolViolation(f"Objet absent du registre: {name}", self.party)
        return self._items[name]

    def _owned(self, targets: Iterable[int]) -> list:
        targets = list(targets)
        foreign = [q for q in targets if q not in self._qubits]
        if foreign:
            raise ProtocolViolation(f"Qubits {foreign} hors du registre", self.party)
        return targets

    def apply(self, unitary: np.ndarray, targets: Sequence[int]) -> None:
        apply_unitary(self._state, unitary, self._owned(targets))

    def measure(self, targets: Sequence[int], rng: np.random.Generator) -> BitVector:
        outcome, _ = measure_computational(self._state, self._owned(targets), rng)
        return outcome

    def measure_in_bases(self, targets: Sequence[int], theta: BitVector,
                         rng: np.random.Generator) -> BitVector:
        """Mesure des qubits listés dans les bases θ (bit k pour targets[k])"""
        try:
            outcome, _ = measure_in_bases(self._state, self._owned(targets), theta, rng)
        except DimensionError as e:
            raise ProtocolViolation(str(e), self.party) from e
        return outcome

    def gl_extract(self, family: MeasurementFamily, rng: np.random.Generator) -> BitVector:
        """Extraction GL d'une famille agissant sur le registre de la partie"""
        self._owned(family.register)
        w, post = gl_extract_with_state(family, self._state, rng)
        self._state.num_qubits = post.num_qubits
        self._state.amps = post.amps
        return w

    def __repr__(self) -> str:
        return f"PartyView({self.party}, qubits={list(self._qubits)}, items={sorted(self._items)})"
