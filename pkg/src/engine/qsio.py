"""
Couche d'obfuscation : programme opaque idéal, obfuscateur par masque de
Clifford à petite échelle, audit d'équivalence fonctionnelle et écart entre
oracles purifiés

Le programme opaque est une barrière d'information : seul evaluate(x) est
exposé. L'obfuscateur de Clifford est réalisé densément (plafond de
qubits) et sert aux vérifications de correction.
"""

import secrets
from functools import lru_cache
from typing import Any, Callable, Dict, Iterable, Optional, Protocol, Sequence, Tuple, runtime_checkable

import numpy as np

from ..core.config import get_config
from ..core.errors import DimensionError, EquivalenceFailure, SizeCapError
from ..core.logger import get_logger
from .f2linalg import BitVector
from .qsim import (
    CliffordElement,
    StateVector,
    apply_matrix,
    clifford_to_unitary,
    enumerate_clifford_unitaries,
    measure_computational,
    outcome_distribution,
    sample_clifford,
)

SOURCE = "qsio"


@runtime_checkable
class Evaluable(Protocol):
    """Tout ce qui s'évalue sur une entrée classique"""
    in_len: int
    out_len: int

    def evaluate(self, x: BitVector, rng: np.random.Generator) -> Optional[BitVector]:
        ...


def _check_input(program, x: BitVector):
    if x.length != program.in_len:
        raise DimensionError(f"Entrée de {x.length} bits pour un programme sur {program.in_len}")


# =============================================================================
# Implémentation quantique
# =============================================================================

Lookup = Callable[[np.ndarray, np.ndarray], np.ndarray]


class QuantumImplementation:
    """
    Couple (état de programme, circuit d'évaluation universel)

    Le circuit est l'oracle de permutation |a⟩|x⟩|y⟩ -> |a⟩|x⟩|y ⊕ lookup(a, x)⟩
    sur les registres A (état), X (entrée) et Y (sortie), dans cet ordre
    de qubits. L'évaluation est non destructive sur les états de base.
    """

    def __init__(self, state: StateVector, in_len: int, out_len: int,
                 lookup: Lookup, name: str = ""):
        if in_len < 0 or out_len < 1:
            raise DimensionError(f"Longueurs invalides: entrée {in_len}, sortie {out_len}")
        self.state = state
        self.in_len = in_len
        self.out_len = out_len
        self.name = name
        self._lookup = lookup

    deterministic = True

    @classmethod
    def from_truth_table(cls, table: Sequence[BitVector], name: str = "") -> "QuantumImplementation":
        """État = table de vérité en base de calcul ; entrée x lit l'entrée x de la table"""
        if not table:
            raise DimensionError("Table de vérité vide")
        out_len = table[0].length
        in_len = (len(table) - 1).bit_length()
        if len(table) != 1 << in_len:
            raise DimensionError(f"Table de {len(table)} entrées (puissance de 2 attendue)")
        packed = BitVector(0, 0)
        for entry in table:
            if entry.length != out_len:
                raise DimensionError("Entrées de table de longueurs différentes")
            packed = packed.concat(entry)
        mask = (1 << out_len) - 1

        def lookup(a: np.ndarray, x: np.ndarray) -> np.ndarray:
            return (a >> (x * out_len)) & mask

        return cls(StateVector.basis(packed.length, packed), in_len, out_len, lookup, name)

    @classmethod
    def from_function(cls, fn: Callable[[BitVector], BitVector], in_len: int, out_len: int,
                      name: str = "") -> "QuantumImplementation":
        """Fonction classique tabulée, registre A vide"""
        values = np.zeros(1 << in_len, dtype=np.int64)
        for v in range(1 << in_len):
            y = fn(BitVector(in_len, v))
            if y is None or y.length != out_len:
                raise DimensionError(f"Sortie invalide en {BitVector(in_len, v)}")
            values[v] = y.value

        def lookup(a: np.ndarray, x: np.ndarray) -> np.ndarray:
            return values[x]

        return cls(StateVector(0, np.ones(1, dtype=np.complex128)), in_len, out_len, lookup, name)

    @property
    def register_qubits(self) -> int:
        return self.state.num_qubits

    def permutation(self, extra_qubits: int = 0) -> np.ndarray:
        """
        Permutation d'indices de l'oracle sur [A, remplissage, X, Y]

        Les qubits de remplissage sont ignorés par le circuit. La
        permutation est une involution.
        """
        n_a = self.register_qubits
        x_shift = n_a + extra_qubits
        y_shift = x_shift + self.in_len
        total = y_shift + self.out_len
        idx = np.arange(1 << total, dtype=np.int64)
        a = idx & ((1 << n_a) - 1)
        x = (idx >> x_shift) & ((1 << self.in_len) - 1)
        return idx ^ (self._lookup(a, x).astype(np.int64) << y_shift)

    def _joint(self, x: BitVector) -> StateVector:
        return (self.state
                .tensor(StateVector.basis(self.in_len, x))
                .tensor(StateVector.zero(self.out_len)))

    def output_distribution(self, x: BitVector) -> np.ndarray:
        """Distribution exacte de la sortie, sans modifier l'état"""
        _check_input(self, x)
        joint = self._joint(x)
        joint.amps = joint.amps[self.permutation()]
        y_qubits = list(range(joint.num_qubits - self.out_len, joint.num_qubits))
        return outcome_distribution(joint, y_qubits)

    def evaluate(self, x: BitVector, rng: np.random.Generator) -> BitVector:
        _check_input(self, x)
        joint = self._joint(x)
        joint.amps = joint.amps[self.permutation()]
        n_a = self.register_qubits
        y_qubits = list(range(n_a + self.in_len, joint.num_qubits))
        outcome, joint = measure_computational(joint, y_qubits, rng)
        x_qubits = list(range(n_a, n_a + self.in_len))
        joint.drop_qubits(x_qubits + y_qubits, list(x) + list(outcome))
        self.state = joint
        return outcome

    def __repr__(self) -> str:
        return (f"QuantumImplementation(name={self.name!r}, in_len={self.in_len}, "
                f"out_len={self.out_len}, qubits={self.register_qubits})")


# =============================================================================
# Programme opaque (substitut idéal)
# =============================================================================

class OpaqueProgram:
    """Poignée d'évaluation seule ; la description interne n'est pas exposée"""

    __slots__ = ("__inner", "_token")

    def __init__(self, inner: Evaluable):
        self.__inner = inner
        self._token = secrets.token_hex(16)

    @property
    def in_len(self) -> int:
        return self.__inner.in_len

    @property
    def out_len(self) -> int:
        return self.__inner.out_len

    @property
    def token(self) -> str:
        return self._token

    def evaluate(self, x: BitVector, rng: np.random.Generator) -> Optional[BitVector]:
        _check_input(self, x)
        return self.__inner.evaluate(x, rng)

    def __repr__(self) -> str:
        return f"OpaqueProgram(token={self._token[:8]}…, in_len={self.in_len})"


def wrap_opaque(impl: Evaluable) -> OpaqueProgram:
    """Obfuscation idéale : seul l'accès en évaluation subsiste"""
    return OpaqueProgram(impl)


def evaluate(program: Evaluable, x: BitVector, rng: np.random.Generator) -> Optional[BitVector]:
    """Évalue un programme (opaque, implémentation ou descripteur)"""
    _check_input(program, x)
    return program.evaluate(x, rng)


# =============================================================================
# Obfuscateur par masque de Clifford
# =============================================================================

class CliffordOtpArtifact:
    """
    ρ̃ = C(ρ ⊗ |0^λ⟩) et l'oracle G_C = (C ⊗ I) Eval (C† ⊗ I)

    Les qubits de remplissage suivent le registre du programme.
    """

    def __init__(self, impl: QuantumImplementation, clifford: CliffordElement, lam_pad: int):
        n = impl.register_qubits + lam_pad
        if clifford.n != n:
            raise DimensionError(f"Clifford sur {clifford.n} qubits pour un registre de {n}")
        self._impl = impl
        self._clifford = clifford
        self._unitary = clifford_to_unitary(clifford)
        self.lam_pad = lam_pad
        self.in_len = impl.in_len
        self.out_len = impl.out_len

        state = impl.state.tensor(StateVector.zero(lam_pad))
        apply_matrix(state, self._unitary, list(range(n)))
        self.state = state

    deterministic = True

    @property
    def register_qubits(self) -> int:
        return self.state.num_qubits

    def evaluate(self, x: BitVector, rng: np.random.Generator) -> BitVector:
        """Applique G_C à ρ̃ ⊗ |x⟩ ⊗ |0⟩ puis mesure Y"""
        _check_input(self, x)
        n = self.register_qubits
        a_qubits = list(range(n))
        joint = (self.state
                 .tensor(StateVector.basis(self.in_len, x))
                 .tensor(StateVector.zero(self.out_len)))
        apply_matrix(joint, self._unitary.conj().T, a_qubits)
        joint.amps = joint.amps[self._impl.permutation(self.lam_pad)]
        apply_matrix(joint, self._unitary, a_qubits)

        y_qubits = list(range(n + self.in_len, joint.num_qubits))
        outcome, joint = measure_computational(joint, y_qubits, rng)
        x_qubits = list(range(n, n + self.in_len))
        joint.drop_qubits(x_qubits + y_qubits, list(x) + list(outcome))
        self.state = joint
        return outcome

    def oracle_matrix(self) -> np.ndarray:
        """Matrice dense de G_C sur [A, X, Y]"""
        total = self.register_qubits + self.in_len + self.out_len
        cap = get_config().simulation.dense_clifford_cap + 4
        if total > cap:
            raise SizeCapError("qubits de l'oracle densifié", total, cap)
        perm = self._impl.permutation(self.lam_pad)
        dim = 1 << total
        eval_matrix = np.zeros((dim, dim), dtype=np.complex128)
        eval_matrix[perm, np.arange(dim)] = 1.0
        outer = np.kron(np.eye(1 << (self.in_len + self.out_len)), self._unitary)
        return outer @ eval_matrix @ outer.conj().T

    def __repr__(self) -> str:
        return f"CliffordOtpArtifact(qubits={self.register_qubits}, lam_pad={self.lam_pad})"


def clifford_otp_obfuscate(impl: QuantumImplementation, lam_pad: int,
                           rng: np.random.Generator) -> CliffordOtpArtifact:
    """Tire C uniforme sur le registre complété et masque l'état du programme"""
    if lam_pad < 0:
        raise DimensionError(f"Remplissage négatif: {lam_pad}")
    n = impl.register_qubits + lam_pad
    cap = get_config().simulation.dense_clifford_cap
    if n > cap:
        raise SizeCapError("qubits du registre obfusqué", n, cap)
    if n == 0:
        raise DimensionError("Registre obfusqué vide")
    return CliffordOtpArtifact(impl, sample_clifford(n, rng), lam_pad)


# =============================================================================
# Audit d'équivalence fonctionnelle
# =============================================================================

def _profile(program, x: BitVector, rng: np.random.Generator,
             samples: int) -> Tuple[str, Dict[Any, float]]:
    """
    Profil de sortie en x

    "dist" : distribution exacte (implémentation) ou valeur unique
    (programme déterministe) ; "support" : sorties observées sur samples
    évaluations.
    """
    if isinstance(program, QuantumImplementation):
        dist = program.output_distribution(x)
        return "dist", {BitVector(program.out_len, i): float(p)
                        for i, p in enumerate(dist) if p > 1e-12}
    if getattr(program, "deterministic", False):
        return "dist", {program.evaluate(x, rng): 1.0}
    return "support", {program.evaluate(x, rng): 1.0 for _ in range(samples)}


def _agree(left: Tuple[str, Dict], right: Tuple[str, Dict]) -> bool:
    (kind_l, prof_l), (kind_r, prof_r) = left, right
    if set(prof_l) != set(prof_r):
        return False
    if kind_l == kind_r == "dist":
        return all(abs(prof_l[k] - prof_r[k]) < 1e-9 for k in prof_l)
    return True


def find_witness(p1, p2, domain: Iterable[BitVector], rng: np.random.Generator,
                 samples: Optional[int] = None) -> Optional[Tuple[BitVector, Any, Any]]:
    """Première entrée du domaine où les deux programmes diffèrent, ou None"""
    if p1.in_len != p2.in_len or p1.out_len != p2.out_len:
        raise DimensionError(
            f"Signatures différentes: {p1.in_len}->{p1.out_len} et {p2.in_len}->{p2.out_len}"
        )
    samples = samples or get_config().simulation.equivalence_samples
    for x in domain:
        left = _profile(p1, x, rng, samples)
        right = _profile(p2, x, rng, samples)
        if not _agree(left, right):
            return x, sorted(map(str, left[1])), sorted(map(str, right[1]))
    return None


def functional_equiv(p1, p2, domain: Iterable[BitVector], rng: np.random.Generator,
                     samples: Optional[int] = None) -> bool:
    """Vrai ssi les deux programmes s'accordent sur tout le domaine"""
    return find_witness(p1, p2, domain, rng, samples) is None


def assert_functional_equiv(p1, p2, domain: Iterable[BitVector], rng: np.random.Generator,
                            samples: Optional[int] = None) -> None:
    """Lève EquivalenceFailure avec l'entrée témoin en cas de divergence"""
    witness = find_witness(p1, p2, domain, rng, samples)
    if witness is not None:
        get_logger().warning(f"Divergence fonctionnelle en {witness[0]}", SOURCE)
        raise EquivalenceFailure(*witness)


# =============================================================================
# Oracles purifiés (registre de Clifford indexé)
# =============================================================================
#
# Disposition : tableau (K, B, R, Z) avec K = |C_2| = 11520, B = B1 + 2·B2
# (B1 registre du programme, B2 remplissage), R sortie de l'évaluation,
# Z espace de travail de l'adversaire. L'unitaire de l'adversaire agit sur
# l'indice aplati (B, R, Z) en ordre C : B·4 + R·2 + Z.

PURIFIED_QUBITS = 2


@lru_cache(maxsize=1)
def _purified_unitaries() -> Tuple[np.ndarray, np.ndarray]:
    unitaries = enumerate_clifford_unitaries(PURIFIED_QUBITS)
    return unitaries, np.conj(np.transpose(unitaries, (0, 2, 1)))


def _default_phi(phi: Optional[np.ndarray]) -> np.ndarray:
    if phi is None:
        phi = np.zeros(4, dtype=np.complex128)
        phi[0] = 1.0
    phi = np.asarray(phi, dtype=np.complex128).reshape(-1)
    if phi.shape != (4,) or abs(np.linalg.norm(phi) - 1.0) > 1e-9:
        raise DimensionError("φ doit être un vecteur unitaire de dimension 4 sur (R, Z)")
    return phi.reshape(2, 2)


def _check_adv_unitary(adv_unitary: np.ndarray) -> np.ndarray:
    adv_unitary = np.asarray(adv_unitary, dtype=np.complex128)
    if adv_unitary.shape != (16, 16):
        raise SizeCapError("dimension de l'unitaire adverse", adv_unitary.shape[0], 16)
    return adv_unitary


def _initial_purified(b: int, phi: np.ndarray) -> np.ndarray:
    """Σ_C |C⟩ ⊗ C(|b⟩ ⊗ |0⟩) ⊗ φ, normalisé"""
    unitaries, _ = _purified_unitaries()
    k = unitaries.shape[0]
    column = unitaries[:, :, b] / np.sqrt(k)
    return np.einsum("kb,rz->kbrz", column, phi)


def _apply_adv(psi: np.ndarray, adv_unitary: np.ndarray) -> np.ndarray:
    k = psi.shape[0]
    return (psi.reshape(k, 16) @ adv_unitary.T).reshape(k, 4, 2, 2)


def _eval_on(block: np.ndarray, b_values: Sequence[int]) -> np.ndarray:
    """Eval = CNOT B1 -> R sur les valeurs de B listées"""
    out = block.copy()
    for b in b_values:
        if b & 1:
            out[:, b] = block[:, b, ::-1]
    return out


def _conjugated(psi: np.ndarray, inner: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """W inner W† avec W = Σ_C |C⟩⟨C| ⊗ C_B"""
    unitaries, daggers = _purified_unitaries()
    undone = np.einsum("kab,kbrz->karz", daggers, psi)
    return np.einsum("kab,kbrz->karz", unitaries, inner(undone))


def _eval_one(psi: np.ndarray) -> np.ndarray:
    """Eval sur le sous-espace B2 = 0, identité ailleurs"""
    return _eval_on(psi, (0, 1))


def _eval_two(psi: np.ndarray) -> np.ndarray:
    """Eval sur la seule composante |τ⟩ (moyenne sur C) du sous-espace B2 = 0"""
    out = psi.copy()
    low = psi[:, :2]
    mean = low.mean(axis=0, keepdims=True)
    evaluated = _eval_on(np.broadcast_to(mean, low.shape), (0, 1))
    out[:, :2] = (low - mean) + evaluated
    return out


def purified_hybrid_gap(q: int, adv_unitary: np.ndarray, b: int,
                        phi: Optional[np.ndarray] = None) -> float:
    """
    ‖(G′U)^q Ψ − (GU)^q Ψ‖ avec G′ = W Eval_1 W† et G = W Eval_2 W†

    Ψ = Σ_C |C⟩ ⊗ C(|b⟩ ⊗ |0⟩) ⊗ φ, registre de programme d'un qubit,
    un qubit de remplissage, aucune entrée.
    """
    if q < 0:
        raise DimensionError(f"Nombre de requêtes négatif: {q}")
    if b not in (0, 1):
        raise DimensionError(f"b doit être un bit (reçu {b})")
    adv_unitary = _check_adv_unitary(adv_unitary)
    start = _initial_purified(b, _default_phi(phi))

    hybrid_two = start
    hybrid_three = start.copy()
    for _ in range(q):
        hybrid_two = _conjugated(_apply_adv(hybrid_two, adv_unitary), _eval_one)
        hybrid_three = _conjugated(_apply_adv(hybrid_three, adv_unitary), _eval_two)

    gap = float(np.linalg.norm(hybrid_two - hybrid_three))
    get_logger().debug(f"Écart purifié q={q}: {gap:.6f}", SOURCE)
    return gap


def purified_gap_bound(q: int, lam_pad: int = 1) -> float:
    """q(q+1)·2^{-λ}"""
    return q * (q + 1) * 2.0 ** (-lam_pad)


def _identity_block(adv_unitary: np.ndarray) -> np.ndarray:
    """U_00 = Tr_B(U) / 4, agissant sur (R, Z)"""
    return np.einsum("abac->bc", adv_unitary.reshape(4, 4, 4, 4)) / 4


def projected_branch_weight(adv_unitary: np.ndarray, phi: Optional[np.ndarray] = None,
                            b: int = 0) -> float:
    """
    Carré de la norme de la branche Pauli non triviale projetée sur B2 = 0

    Après une requête : W† U (Ψ ⊗ φ) moins la branche identité
    Σ_C |C⟩ ⊗ (|b⟩ ⊗ |0⟩) ⊗ U_00 φ.
    """
    adv_unitary = _check_adv_unitary(adv_unitary)
    phi = _default_phi(phi)
    _, daggers = _purified_unitaries()
    k = daggers.shape[0]

    undone = np.einsum("kab,kbrz->karz", daggers,
                       _apply_adv(_initial_purified(b, phi), adv_unitary))
    identity = np.zeros_like(undone)
    identity[:, b] = (_identity_block(adv_unitary) @ phi.reshape(-1)).reshape(2, 2) / np.sqrt(k)
    branch = (undone - identity)[:, :2]
    return float(np.vdot(branch, branch).real)


def projected_branch_weight_formula(adv_unitary: np.ndarray, phi: Optional[np.ndarray] = None,
                                    m: int = 1, lam_pad: int = 1) -> float:
    """(2^{2m+λ} − 1) / (4^{m+λ} − 1) · (1 − ‖U_00 φ‖²)"""
    adv_unitary = _check_adv_unitary(adv_unitary)
    phi = _default_phi(phi).reshape(-1)
    identity_norm = float(np.linalg.norm(_identity_block(adv_unitary) @ phi)) ** 2
    factor = (2 ** (2 * m + lam_pad) - 1) / (4 ** (m + lam_pad) - 1)
    return factor * (1.0 - identity_norm)
