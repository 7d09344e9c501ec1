"""
Simulation exacte par vecteur d'état, algèbre de Pauli et groupe de Clifford

Convention d'endianness : le qubit 0 est le bit de poids faible de l'indice
d'amplitude. Tous les autres modules du moteur héritent de cette convention.

Un opérateur de Pauli est i^p X^x Z^z (produit matriciel, X à gauche).
Un élément de Clifford C est stocké par les images C† X_j C et C† Z_j C.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from ..core.config import get_config
from ..core.constants import NORM_TOL, UNITARY_TOL
from ..core.errors import DimensionError, NonUnitaryError, SizeCapError
from ..core.logger import get_logger
from .f2linalg import BitVector, _random_int

SOURCE = "qsim"


# =============================================================================
# Vecteur d'état
# =============================================================================

class StateVector:
    """
    Vecteur d'amplitudes complexes sur num_qubits qubits

    Objet mutable, possédé par un seul essai à la fois.
    """

    def __init__(self, num_qubits: int, amps: np.ndarray, check_norm: bool = True):
        cap = get_config().simulation.statevector_cap
        if num_qubits > cap:
            raise SizeCapError("qubits du vecteur d'état", num_qubits, cap)
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << num_qubits:
            raise DimensionError(
                f"{amps.shape[0]} amplitudes pour {num_qubits} qubits"
            )
        if check_norm and abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise DimensionError(f"Vecteur non normalisé (norme {np.linalg.norm(amps):.3e})")
        self.num_qubits = num_qubits
        self.amps = amps

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        return cls.basis(num_qubits, 0)

    @classmethod
    def basis(cls, num_qubits: int, index) -> "StateVector":
        """|index⟩ ; index entier ou BitVector (bit i -> qubit i)"""
        if isinstance(index, BitVector):
            if index.length != num_qubits:
                raise DimensionError(f"Base de {index.length} bits pour {num_qubits} qubits")
            index = index.value
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amps: np.ndarray, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        num_qubits = int(round(np.log2(amps.shape[0])))
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(num_qubits, amps)

    @classmethod
    def random(cls, num_qubits: int, rng: np.random.Generator) -> "StateVector":
        """État pur aléatoire (gaussienne complexe normalisée)"""
        dim = 1 << num_qubits
        amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        return cls(num_qubits, amps / np.linalg.norm(amps))

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amps.copy(), check_norm=False)

    def tensor(self, other: "StateVector") -> "StateVector":
        """self ⊗ other, les qubits de other prennent les indices suivants"""
        return StateVector(self.num_qubits + other.num_qubits,
                           np.kron(other.amps, self.amps), check_norm=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amps, self.amps.conj())

    def inner(self, other: "StateVector") -> complex:
        """⟨self|other⟩"""
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.inner(other)) ** 2

    def allclose(self, other: "StateVector", atol: float = 1e-10) -> bool:
        return self.num_qubits == other.num_qubits and np.allclose(self.amps, other.amps, atol=atol)

    def drop_qubits(self, qubits: Sequence[int], values: Sequence[int]) -> "StateVector":
        """
        Retire des qubits dans un état de base connu

        Les qubits listés doivent être désintriqués et valoir values ; on garde
        la composante correspondante, renormalisée.
        """
        if len(qubits) != len(values):
            raise DimensionError("Autant de valeurs que de qubits à retirer")
        if not qubits:
            return self
        tensor = self.amps.reshape((2,) * self.num_qubits)
        index = [slice(None)] * self.num_qubits
        for q, v in zip(qubits, values):
            self._check_qubit(q)
            index[self.num_qubits - 1 - q] = int(v)
        remaining = tensor[tuple(index)].reshape(-1).copy()
        weight = np.linalg.norm(remaining)
        if weight < 1 - 1e-8:
            raise DimensionError("Qubits retirés intriqués ou dans un autre état")
        self.num_qubits -= len(qubits)
        self.amps = remaining / weight
        return self

    def _check_qubit(self, q: int):
        if not 0 <= q < self.num_qubits:
            raise DimensionError(f"Qubit {q} hors de [0, {self.num_qubits})")

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def is_unitary(matrix: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return np.allclose(matrix.conj().T @ matrix, np.eye(matrix.shape[0]), atol=tol)


def apply_matrix(state: StateVector, matrix: np.ndarray, targets: Sequence[int]) -> StateVector:
    """Applique une matrice quelconque (sans contrôle d'unitarité), en place"""
    matrix = np.asarray(matrix, dtype=np.complex128)
    k = len(targets)
    if matrix.shape != (1 << k, 1 << k):
        raise DimensionError(f"Matrice {matrix.shape} pour {k} qubits cibles")
    if len(set(targets)) != k:
        raise DimensionError(f"Cibles répétées: {list(targets)}")
    for q in targets:
        state._check_qubit(q)
    if k == 0:
        state.amps = state.amps * matrix[0, 0]
        return state

    n = state.num_qubits
    psi = state.amps.reshape((2,) * n)
    gate = matrix.reshape((2,) * (2 * k))
    axes = [n - 1 - targets[k - 1 - a] for a in range(k)]
    result = np.tensordot(gate, psi, axes=(list(range(k, 2 * k)), axes))
    result = np.moveaxis(result, list(range(k)), axes)
    state.amps = np.ascontiguousarray(result).reshape(-1)
    return state


def apply_unitary(state: StateVector, unitary: np.ndarray, targets: Sequence[int]) -> StateVector:
    """
    Applique U sur les qubits cibles (targets[0] = bit faible de l'indice de U)

    L'état est modifié en place et retourné.
    """
    if not is_unitary(unitary):
        raise NonUnitaryError("La matrice fournie n'est pas unitaire")
    return apply_matrix(state, unitary, targets)


def _outcome_indices(num_qubits: int, qubits: Sequence[int]) -> np.ndarray:
    idx = np.arange(1 << num_qubits)
    outcome = np.zeros_like(idx)
    for k, q in enumerate(qubits):
        outcome |= ((idx >> q) & 1) << k
    return outcome


def outcome_distribution(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Distribution exacte des résultats de mesure (bit k = qubit qubits[k])"""
    for q in qubits:
        state._check_qubit(q)
    outcome = _outcome_indices(state.num_qubits, qubits)
    return np.bincount(outcome, weights=state.probabilities(), minlength=1 << len(qubits))


def measure_computational(
    state: StateVector,
    qubits: Sequence[int],
    rng: np.random.Generator
) -> Tuple[BitVector, StateVector]:
    """Mesure projective dans la base de calcul (règle de Born), en place"""
    for q in qubits:
        state._check_qubit(q)
    outcome = _outcome_indices(state.num_qubits, qubits)
    marginal = np.bincount(outcome, weights=state.probabilities(), minlength=1 << len(qubits))
    marginal = marginal / marginal.sum()
    result = int(rng.choice(len(marginal), p=marginal))

    amps = np.where(outcome == result, state.amps, 0)
    state.amps = amps / np.linalg.norm(amps)
    return BitVector(len(qubits), result), state


# =============================================================================
# Portes usuelles
# =============================================================================

I2 = np.eye(2, dtype=np.complex128)
X_GATE = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y_GATE = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z_GATE = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H_GATE = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
S_GATE = np.array([[1, 0], [0, 1j]], dtype=np.complex128)

# Contrôle = cible 0 (bit faible), cible = cible 1
CNOT_GATE = np.zeros((4, 4), dtype=np.complex128)
for _i in range(4):
    _c, _t = _i & 1, _i >> 1
    CNOT_GATE[_c | ((_t ^ _c) << 1), _i] = 1.0


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Unitaire de Haar"""
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def hadamard_layer(state: StateVector, qubits: Sequence[int]) -> StateVector:
    for q in qubits:
        apply_matrix(state, H_GATE, [q])
    return state


# =============================================================================
# Chaînes de Pauli
# =============================================================================

@dataclass(frozen=True)
class PauliString:
    """i^phase_exp · X^x Z^z sur n qubits"""
    x: BitVector
    z: BitVector
    phase_exp: int = 0

    def __post_init__(self):
        if self.x.length != self.z.length:
            raise DimensionError(f"Parties x et z de longueurs {self.x.length} et {self.z.length}")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @property
    def n(self) -> int:
        return self.x.length

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(BitVector.zeros(n), BitVector.zeros(n))

    @classmethod
    def from_bits(cls, x: int, z: int, n: int, phase_exp: int = 0) -> "PauliString":
        return cls(BitVector(n, x), BitVector(n, z), phase_exp)

    @classmethod
    def hermitian(cls, x: BitVector, z: BitVector, sign: int = 0) -> "PauliString":
        """Pauli hermitien ±P (sign = 1 pour -P)"""
        return cls(x, z, (x.value & z.value).bit_count() + 2 * sign)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """'XIZY' : caractère j -> qubit j, signe '+'/'-' en tête optionnel"""
        sign = 0
        if label and label[0] in "+-":
            sign = 1 if label[0] == "-" else 0
            label = label[1:]
        x = z = 0
        ys = 0
        for j, c in enumerate(label.upper()):
            if c in "XY":
                x |= 1 << j
            if c in "ZY":
                z |= 1 << j
            if c == "Y":
                ys += 1
            if c not in "IXYZ":
                raise DimensionError(f"Caractère de Pauli invalide: {c!r}")
        return cls(BitVector(len(label), x), BitVector(len(label), z), ys + 2 * sign)

    def is_hermitian(self) -> bool:
        return (self.phase_exp - (self.x.value & self.z.value).bit_count()) % 2 == 0

    def commutes_with(self, other: "PauliString") -> bool:
        return (self.x.dot(other.z) + self.z.dot(other.x)) % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        phase = self.phase_exp + other.phase_exp + 2 * (self.z.value & other.x.value).bit_count()
        return PauliString(self.x ^ other.x, self.z ^ other.z, phase)

    def dagger(self) -> "PauliString":
        return PauliString(self.x, self.z, -self.phase_exp + 2 * (self.x.value & self.z.value).bit_count())

    def to_matrix(self) -> np.ndarray:
        n = self.n
        cap = get_config().simulation.dense_clifford_cap
        if n > cap:
            raise SizeCapError("qubits d'un Pauli densifié", n, cap)
        dim = 1 << n
        k = np.arange(dim)
        parity = np.zeros(dim, dtype=np.int64)
        for j in range(n):
            if (self.z.value >> j) & 1:
                parity ^= (k >> j) & 1
        matrix = np.zeros((dim, dim), dtype=np.complex128)
        matrix[k ^ self.x.value, k] = (1j ** self.phase_exp) * (1 - 2 * parity)
        return matrix

    def label(self) -> str:
        chars = []
        for xj, zj in zip(self.x, self.z):
            chars.append("IZXY"[(xj << 1) | zj])
        return "".join(chars)

    def __str__(self) -> str:
        return f"i^{self.phase_exp}·X^{self.x}Z^{self.z}"


def pauli_operators(n: int) -> Iterator[PauliString]:
    """Les 4^n opérateurs X^x Z^z (phase 0)"""
    for x in range(1 << n):
        for z in range(1 << n):
            yield PauliString.from_bits(x, z, n)


# =============================================================================
# Groupe de Clifford
# =============================================================================

@dataclass(frozen=True)
class CliffordElement:
    """Tableau : x_images[j] = C† X_j C, z_images[j] = C† Z_j C"""
    n: int
    x_images: Tuple[PauliString, ...]
    z_images: Tuple[PauliString, ...]

    def __post_init__(self):
        if len(self.x_images) != self.n or len(self.z_images) != self.n:
            raise DimensionError(f"Tableau incomplet pour {self.n} qubits")

    @classmethod
    def identity(cls, n: int) -> "CliffordElement":
        return cls(
            n,
            tuple(PauliString(BitVector.unit(n, j), BitVector.zeros(n)) for j in range(n)),
            tuple(PauliString(BitVector.zeros(n), BitVector.unit(n, j)) for j in range(n)),
        )

    def is_valid(self) -> bool:
        """Images hermitiennes respectant les relations de commutation"""
        images = self.x_images + self.z_images
        if not all(p.is_hermitian() for p in images):
            return False
        for j in range(self.n):
            for k in range(self.n):
                anti = j == k
                if self.x_images[j].commutes_with(self.z_images[k]) == anti:
                    return False
                if k != j and not self.x_images[j].commutes_with(self.x_images[k]):
                    return False
                if k != j and not self.z_images[j].commutes_with(self.z_images[k]):
                    return False
        return True

    def symplectic_rows(self) -> Tuple[int, ...]:
        """Lignes entrelacées (x_k au bit 2k, z_k au bit 2k+1) : X_0, Z_0, X_1, ..."""
        rows = []
        for xp, zp in zip(self.x_images, self.z_images):
            rows.append(_interleave(xp.x.value, xp.z.value, self.n))
            rows.append(_interleave(zp.x.value, zp.z.value, self.n))
        return tuple(rows)

    def signs(self) -> int:
        """Bits de signe des images (bit 2j : X_j, bit 2j+1 : Z_j)"""
        out = 0
        for j, (xp, zp) in enumerate(zip(self.x_images, self.z_images)):
            for offset, p in ((0, xp), (1, zp)):
                sign = ((p.phase_exp - (p.x.value & p.z.value).bit_count()) % 4) // 2
                out |= sign << (2 * j + offset)
        return out


def clifford_conjugate_pauli(clifford: CliffordElement, pauli: PauliString) -> PauliString:
    """C† P C"""
    if clifford.n != pauli.n:
        raise DimensionError(f"Clifford sur {clifford.n} qubits, Pauli sur {pauli.n}")
    result = PauliString(BitVector.zeros(clifford.n), BitVector.zeros(clifford.n), pauli.phase_exp)
    for j in range(clifford.n):
        if pauli.x[j]:
            result = result * clifford.x_images[j]
    for j in range(clifford.n):
        if pauli.z[j]:
            result = result * clifford.z_images[j]
    return result


def compose(outer: CliffordElement, inner: CliffordElement) -> CliffordElement:
    """
    Produit outer · inner

    Conjuguer par le produit revient à conjuguer par outer puis par inner :
    (CD)† P (CD) = D† (C† P C) D.
    """
    if outer.n != inner.n:
        raise DimensionError("Cliffords de tailles différentes")
    return CliffordElement(
        outer.n,
        tuple(clifford_conjugate_pauli(inner, p) for p in outer.x_images),
        tuple(clifford_conjugate_pauli(inner, p) for p in outer.z_images),
    )


def hadamard_clifford(n: int, qubit: int) -> CliffordElement:
    ident = CliffordElement.identity(n)
    xs, zs = list(ident.x_images), list(ident.z_images)
    xs[qubit], zs[qubit] = zs[qubit], xs[qubit]
    return CliffordElement(n, tuple(xs), tuple(zs))


def phase_clifford(n: int, qubit: int) -> CliffordElement:
    """S = diag(1, i) : S† X S = -Y"""
    ident = CliffordElement.identity(n)
    xs = list(ident.x_images)
    xs[qubit] = PauliString(BitVector.unit(n, qubit), BitVector.unit(n, qubit), 3)
    return CliffordElement(n, tuple(xs), ident.z_images)


def cnot_clifford(n: int, control: int, target: int) -> CliffordElement:
    ident = CliffordElement.identity(n)
    xs, zs = list(ident.x_images), list(ident.z_images)
    xs[control] = xs[control] * xs[target]
    zs[target] = zs[control] * zs[target]
    return CliffordElement(n, tuple(xs), tuple(zs))


@lru_cache(maxsize=4096)
def clifford_to_unitary(clifford: CliffordElement) -> np.ndarray:
    """
    Unitaire dense réalisant le tableau (phase globale libre)

    La matrice V retournée vérifie V† P V = C† P C pour tout Pauli P.
    """
    n = clifford.n
    cap = get_config().simulation.dense_clifford_cap
    if n > cap:
        raise SizeCapError("qubits d'un Clifford densifié", n, cap)
    dim = 1 << n

    projector = np.eye(dim, dtype=np.complex128)
    for p in clifford.z_images:
        projector = projector @ (np.eye(dim) + p.to_matrix()) / 2
    column = int(np.argmax(np.linalg.norm(projector, axis=0)))
    stabilizer_state = projector[:, column] / np.linalg.norm(projector[:, column])

    x_mats = [p.to_matrix() for p in clifford.x_images]
    w = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim):
        vec = stabilizer_state
        for j in range(n):
            if (k >> j) & 1:
                vec = x_mats[j] @ vec
        w[:, k] = vec
    return w.conj().T


# --- Échantillonnage uniforme (transvections symplectiques) ---

def _interleave(x: int, z: int, n: int) -> int:
    out = 0
    for k in range(n):
        out |= ((x >> k) & 1) << (2 * k)
        out |= ((z >> k) & 1) << (2 * k + 1)
    return out


def _deinterleave(v: int, n: int) -> Tuple[int, int]:
    x = z = 0
    for k in range(n):
        x |= ((v >> (2 * k)) & 1) << k
        z |= ((v >> (2 * k + 1)) & 1) << k
    return x, z


def _symplectic_ip(v: int, w: int, n: int) -> int:
    t = 0
    for i in range(n):
        t += ((v >> (2 * i)) & 1) * ((w >> (2 * i + 1)) & 1)
        t += ((w >> (2 * i)) & 1) * ((v >> (2 * i + 1)) & 1)
    return t & 1


def _transvection(k: int, v: int, n: int) -> int:
    return v ^ k if _symplectic_ip(k, v, n) else v


def _find_transvection(x: int, y: int, n: int) -> Tuple[int, int]:
    """h1, h2 tels que y = Z_h1 Z_h2 x"""
    if x == y:
        return 0, 0
    if _symplectic_ip(x, y, n):
        return x ^ y, 0

    z = 0
    for i in range(n):
        xi, yi = (x >> (2 * i)) & 3, (y >> (2 * i)) & 3
        if xi and yi:
            zi = xi ^ yi
            if zi == 0:
                zi = 0b10
                if (xi & 1) != (xi >> 1):
                    zi |= 1
            z |= zi << (2 * i)
            return x ^ z, y ^ z

    for i in range(n):
        xi, yi = (x >> (2 * i)) & 3, (y >> (2 * i)) & 3
        if xi and not yi:
            zi = 0b10 if (xi & 1) == (xi >> 1) else (((xi & 1) << 1) | (xi >> 1))
            z |= zi << (2 * i)
            break

    for i in range(n):
        xi, yi = (x >> (2 * i)) & 3, (y >> (2 * i)) & 3
        if yi and not xi:
            zi = 0b10 if (yi & 1) == (yi >> 1) else (((yi & 1) << 1) | (yi >> 1))
            z |= zi << (2 * i)
            break

    return x ^ z, y ^ z


def num_symplectics(n: int) -> int:
    """|Sp(2n, F2)| = prod_j 2^(2j-1) (4^j - 1)"""
    count = 1
    for j in range(1, n + 1):
        count *= (1 << (2 * j - 1)) * ((1 << (2 * j)) - 1)
    return count


def num_cliffords(n: int) -> int:
    """Nombre d'éléments modulo la phase globale"""
    return num_symplectics(n) * (1 << (2 * n))


def symplectic_from_index(index: int, n: int) -> List[int]:
    """Matrice symplectique canonique d'indice donné, lignes entrelacées"""
    nn = 2 * n
    s = (1 << nn) - 1
    k = (index % s) + 1
    index //= s

    f1 = k
    e1 = 1
    t0, t1 = _find_transvection(e1, f1, n)

    bits = index % (1 << (nn - 1))
    eprime = 1 | ((bits >> 1) << 2)
    h0 = _transvection(t1, _transvection(t0, eprime, n), n)

    if bits & 1:
        f1 = 0

    if n != 1:
        sub = symplectic_from_index(index >> (nn - 1), n - 1)
        g = [1, 2] + [row << 2 for row in sub]
    else:
        g = [1, 2]

    for j in range(nn):
        v = _transvection(t0, g[j], n)
        v = _transvection(t1, v, n)
        v = _transvection(h0, v, n)
        g[j] = _transvection(f1, v, n)
    return g


def clifford_from_index(index: int, signs: int, n: int) -> CliffordElement:
    """Élément (indice symplectique, 2n bits de signe)"""
    rows = symplectic_from_index(index, n)
    x_images, z_images = [], []
    for j in range(n):
        for row, target, sign_bit in ((rows[2 * j], x_images, 2 * j),
                                      (rows[2 * j + 1], z_images, 2 * j + 1)):
            x, z = _deinterleave(row, n)
            target.append(PauliString.hermitian(
                BitVector(n, x), BitVector(n, z), (signs >> sign_bit) & 1
            ))
    return CliffordElement(n, tuple(x_images), tuple(z_images))


def sample_clifford(n: int, rng: np.random.Generator) -> CliffordElement:
    """Clifford uniforme modulo la phase globale"""
    if n < 1:
        raise DimensionError("Au moins un qubit")
    cardinality = num_symplectics(n)
    width = cardinality.bit_length()
    while True:
        index = _random_int(width, rng)
        if index < cardinality:
            break
    signs = _random_int(2 * n, rng)
    return clifford_from_index(index, signs, n)


@lru_cache(maxsize=4)
def _clifford_table(n: int) -> Tuple[CliffordElement, ...]:
    return tuple(clifford_from_index(index, signs, n)
                 for index, signs in product(range(num_symplectics(n)), range(1 << (2 * n))))


def enumerate_cliffords(n: int) -> Tuple[CliffordElement, ...]:
    """Énumération exhaustive (n <= plafond d'énumération)"""
    cap = get_config().simulation.twirl_enumeration_cap
    if n < 1 or n > cap:
        raise SizeCapError("qubits du groupe de Clifford énuméré", n, cap)
    return _clifford_table(n)


@lru_cache(maxsize=4)
def enumerate_clifford_unitaries(n: int) -> np.ndarray:
    """Tableau (K, 2^n, 2^n) des unitaires du groupe énuméré"""
    unitaries = np.array([clifford_to_unitary(c) for c in enumerate_cliffords(n)])
    get_logger().debug(f"{len(unitaries)} Cliffords énumérés pour n={n}", SOURCE)
    return unitaries


@lru_cache(maxsize=64)
def _conjugated_paulis(n: int, x: int, z: int) -> np.ndarray:
    pauli = PauliString.from_bits(x, z, n)
    return np.array([clifford_conjugate_pauli(c, pauli).to_matrix()
                     for c in enumerate_cliffords(n)])


def twirl_sum(
    n: int,
    p1: Tuple[int, int],
    p2: Tuple[int, int],
    psi: StateVector
) -> np.ndarray:
    """
    Σ_C C† X^x' Z^z' C |ψ⟩⟨ψ| C† X^x Z^z C sur le groupe entier

    p1 = (x, z) à droite, p2 = (x', z') à gauche, bits empaquetés en entiers.
    """
    cap = get_config().simulation.twirl_enumeration_cap
    if n < 1 or n > cap:
        raise SizeCapError("qubits du twirl exhaustif", n, cap)
    if psi.num_qubits != n:
        raise DimensionError(f"État sur {psi.num_qubits} qubits pour un twirl sur {n}")

    left = _conjugated_paulis(n, *p2)
    right = _conjugated_paulis(n, *p1)
    kets = left @ psi.amps
    bras = np.einsum("i,kij->kj", psi.amps.conj(), right)
    return np.einsum("ki,kj->ij", kets, bras)
