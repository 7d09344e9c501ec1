"""
Extraction quantique de Goldreich-Levin

Une famille {A^u} de mesures binaires sur le registre d'une partie est
interrogée en superposition : |u⟩ uniforme, phase (−1) là où A^u répond 1
(calcul, Z sur le qubit de sortie, décalcul), Hadamard puis mesure de |u⟩.

Chemin rapide : si A^u est diagonale dans une base fixe W du registre,
donnée par un prédicat vectorisé p_u(k), l'amplitude de sortie w sur la
composante k vaut G[w, k] = 2^{-m} Σ_u (−1)^{u·w + p_u(k)} (transformée
de Walsh-Hadamard le long de u).
"""

from dataclasses import dataclass
from itertools import product
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import get_config
from ..core.constants import NORM_TOL
from ..core.errors import (
    DimensionError, InfeasibleConstraintError, OperatorBoundError, ParameterError, SizeCapError
)
from ..core.logger import get_logger
from .conjugate import encode_bb84
from .f2linalg import BitMatrix, BitVector, sample_orthogonal
from .qsim import (
    Z_GATE, StateVector, _outcome_indices, apply_matrix, apply_unitary, is_unitary, random_unitary
)

SOURCE = "glreduce"

Realization = Tuple[np.ndarray, int]


# =============================================================================
# Outils vectorisés
# =============================================================================

def fwht(values: np.ndarray) -> np.ndarray:
    """Transformée de Walsh-Hadamard non normalisée le long de l'axe 0"""
    values = np.asarray(values)
    size = values.shape[0]
    m = size.bit_length() - 1
    if size < 1 or 1 << m != size:
        raise DimensionError(f"Longueur {size} (puissance de 2 attendue)")
    rest = values.shape[1:]
    out = values.reshape((2,) * m + rest).astype(np.result_type(values, np.float64))
    for axis in range(m):
        a = np.take(out, 0, axis=axis)
        b = np.take(out, 1, axis=axis)
        out = np.stack((a + b, a - b), axis=axis)
    return out.reshape(values.shape)


def parity(values: np.ndarray) -> np.ndarray:
    """Parité bit à bit d'entiers (repliement par XOR)"""
    v = np.asarray(values, dtype=np.uint64).copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.int64)


def inner_product_predicate(x: BitVector) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Prédicat parfait p_u(k) = u·x (indépendant de k)"""
    def predicate(u_arr, k_arr):
        return np.broadcast_to(parity(u_arr & x.value), np.broadcast_shapes(u_arr.shape, k_arr.shape))
    return predicate


# =============================================================================
# Familles de mesures
# =============================================================================

class MeasurementFamily:
    """
    Famille {A^u} indexée par u ∈ {0,1}^m sur un registre de qubits

    realize(u) retourne (unitaire sur registre ⊗ espace de travail, qubit de
    sortie) ; le bit 0 de l'unitaire correspond à register[0], l'espace de
    travail suit le registre. Une famille diagonale se déclare par
    (basis, predicate) et obtient une réalisation à un qubit de travail.
    """

    def __init__(
        self,
        index_len: int,
        register: Sequence[int],
        realize: Optional[Callable[[BitVector], Realization]] = None,
        workspace_len: int = 0,
        basis: Optional[np.ndarray] = None,
        predicate: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
        name: str = "",
    ):
        if index_len < 0:
            raise DimensionError(f"Longueur d'indice négative: {index_len}")
        if len(set(register)) != len(register):
            raise DimensionError(f"Registre avec qubits répétés: {list(register)}")
        self.index_len = index_len
        self.register = tuple(register)
        self.name = name

        if predicate is not None:
            dim = 1 << len(self.register)
            self.basis = np.eye(dim, dtype=np.complex128) if basis is None else np.asarray(basis)
            if not is_unitary(self.basis) or self.basis.shape[0] != dim:
                raise DimensionError(f"Base {self.basis.shape} non unitaire pour {len(self.register)} qubits")
            self.predicate = predicate
            self.workspace_len = 1
            self._realize = self._realize_diagonal
        elif realize is not None:
            self.basis = None
            self.predicate = None
            self.workspace_len = workspace_len
            self._realize = realize
        else:
            raise ParameterError("Famille sans réalisation ni prédicat")

    @property
    def has_fast_path(self) -> bool:
        return self.predicate is not None

    @property
    def width(self) -> int:
        return len(self.register) + self.workspace_len

    def realize(self, u: BitVector) -> Realization:
        if u.length != self.index_len:
            raise DimensionError(f"Indice de {u.length} bits pour une famille sur {self.index_len}")
        unitary, out = self._realize(u)
        if unitary.shape != (1 << self.width, 1 << self.width):
            raise DimensionError(f"Réalisation {unitary.shape} pour {self.width} qubits")
        if not 0 <= out < self.width:
            raise DimensionError(f"Qubit de sortie {out} hors de [0, {self.width})")
        return unitary, out

    def _outcomes(self, u_values: np.ndarray) -> np.ndarray:
        """Table des prédicats, forme (len(u_values), 2^n)"""
        k = np.arange(1 << len(self.register), dtype=np.int64)[None, :]
        table = self.predicate(np.asarray(u_values, dtype=np.int64)[:, None], k)
        return np.broadcast_to(np.asarray(table, dtype=np.int64) & 1, (len(u_values), k.shape[1]))

    def _realize_diagonal(self, u: BitVector) -> Realization:
        # CX conditionné par p_u(k) vers le qubit de travail, après W
        n = len(self.register)
        dim = 1 << n
        bits = self._outcomes(np.array([u.value]))[0]
        perm = np.zeros((2 * dim, 2 * dim), dtype=np.complex128)
        for k in range(dim):
            for a in (0, 1):
                perm[k | ((a ^ bits[k]) << n), k | (a << n)] = 1.0
        lifted = np.kron(np.eye(2), self.basis)
        return perm @ lifted, n

    def phase_operators(self) -> np.ndarray:
        """Opérateurs de phase V† Z_out V, forme (2^m, d, d)"""
        dim = 1 << self.width
        ops = np.empty((1 << self.index_len, dim, dim), dtype=np.complex128)
        for u in range(1 << self.index_len):
            unitary, out = self.realize(BitVector(self.index_len, u))
            z_out = np.diag([-1.0 if (i >> out) & 1 else 1.0 for i in range(dim)])
            ops[u] = unitary.conj().T @ z_out @ unitary
        return ops

    def average_operator(self, x: BitVector) -> np.ndarray:
        """2 E_u Π^{x,u} − I sur registre ⊗ espace de travail"""
        if x.length != self.index_len:
            raise DimensionError(f"x de {x.length} bits pour une famille sur {self.index_len}")
        ops = self.phase_operators()
        signs = 1 - 2 * parity(np.arange(1 << self.index_len) & x.value)
        return np.tensordot(signs.astype(np.float64), ops, axes=(0, 0)) / (1 << self.index_len)

    def __repr__(self) -> str:
        kind = "diagonale" if self.has_fast_path else "générique"
        return f"MeasurementFamily(m={self.index_len}, registre={list(self.register)}, {kind})"


def predicate_family(index_len: int, register: Sequence[int],
                     predicate: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     basis: Optional[np.ndarray] = None, name: str = "") -> MeasurementFamily:
    return MeasurementFamily(index_len, register, basis=basis, predicate=predicate, name=name)


def random_projective_family(index_len: int, register: Sequence[int], rng: np.random.Generator,
                             workspace_len: int = 0) -> MeasurementFamily:
    """Unitaires de Haar tirés une fois par indice, sortie sur le qubit 0"""
    dim = 1 << (len(register) + workspace_len)
    unitaries = [random_unitary(dim, rng) for _ in range(1 << index_len)]
    return MeasurementFamily(
        index_len, register,
        realize=lambda u: (unitaries[u.value], 0),
        workspace_len=workspace_len,
        name="haar",
    )


@dataclass
class GlInstance:
    """Deux familles, un état joint et la chaîne cachée (côté oracle)"""
    family_a: MeasurementFamily
    family_b: MeasurementFamily
    state: StateVector
    x: BitVector

    def formula(self) -> float:
        return gl_success_formula(self.family_a, self.family_b, self.state, self.x)

    def empirical(self, runs: int, rng: np.random.Generator) -> float:
        hits = 0
        for _ in range(runs):
            w_a, post = gl_extract_with_state(self.family_a, self.state.copy(), rng)
            w_b, _ = gl_extract_with_state(self.family_b, post, rng)
            hits += int(w_a == self.x and w_b == self.x)
        return hits / runs


# =============================================================================
# Extraction
# =============================================================================

def _check_register(family: MeasurementFamily, state: StateVector):
    for q in family.register:
        state._check_qubit(q)


def _release_workspace(state: StateVector, workspace: Sequence[int]) -> StateVector:
    """Retire l'espace de travail s'il est revenu à |0⟩, sinon le conserve"""
    if not workspace:
        return state
    outcome = _outcome_indices(state.num_qubits, workspace)
    clean = float(np.sum(state.probabilities()[outcome == 0]))
    if clean > 1 - NORM_TOL:
        return state.drop_qubits(workspace, [0] * len(workspace))
    return state


def _fast_rows(family: MeasurementFamily, state: StateVector) -> Tuple[np.ndarray, StateVector]:
    m = family.index_len
    table = family._outcomes(np.arange(1 << m))
    G = fwht(1.0 - 2.0 * table) / (1 << m)
    rotated = apply_matrix(state.copy(), family.basis, family.register)
    return G, rotated


def gl_outcome_distribution(family: MeasurementFamily, state: StateVector) -> np.ndarray:
    """Distribution exacte du résultat w de l'extraction"""
    _check_register(family, state)
    if family.has_fast_path:
        G, rotated = _fast_rows(family, state)
        k = _outcome_indices(state.num_qubits, family.register)
        marginal = np.bincount(k, weights=rotated.probabilities(), minlength=G.shape[1])
        probs = (np.abs(G) ** 2) @ marginal
    else:
        rows, _ = _generic_rows(family, state)
        probs = np.sum(np.abs(rows) ** 2, axis=1)
    return probs / probs.sum()


def _generic_rows(family: MeasurementFamily, state: StateVector) -> Tuple[np.ndarray, List[int]]:
    """Lignes R[w] = 2^{-m} Σ_u (−1)^{u·w} A^u_ph |ψ, 0⟩ sur l'état étendu"""
    m = family.index_len
    n = state.num_qubits
    workspace = list(range(n, n + family.workspace_len))
    extended = state.copy()
    if workspace:
        extended = extended.tensor(StateVector.zero(len(workspace)))
    targets = list(family.register) + workspace

    branches = np.empty((1 << m, 1 << extended.num_qubits), dtype=np.complex128)
    for u in range(1 << m):
        unitary, out = family.realize(BitVector(m, u))
        branch = apply_unitary(extended.copy(), unitary, targets)
        apply_matrix(branch, Z_GATE, [targets[out]])
        apply_matrix(branch, unitary.conj().T, targets)
        branches[u] = branch.amps
    return fwht(branches) / (1 << m), workspace


def gl_extract_with_state(family: MeasurementFamily, state: StateVector,
                          rng: np.random.Generator) -> Tuple[BitVector, StateVector]:
    """Extraction et état post-mesure (espace de travail retiré s'il est propre)"""
    _check_register(family, state)
    cap = get_config().simulation.statevector_cap
    needed = family.index_len + state.num_qubits + family.workspace_len
    if needed > cap:
        raise SizeCapError("qubits de l'extraction GL", needed, cap)
    m = family.index_len

    if family.has_fast_path:
        G, rotated = _fast_rows(family, state)
        k = _outcome_indices(state.num_qubits, family.register)
        marginal = np.bincount(k, weights=rotated.probabilities(), minlength=G.shape[1])
        probs = (np.abs(G) ** 2) @ marginal
        w = int(rng.choice(1 << m, p=probs / probs.sum()))
        amps = rotated.amps * G[w, k]
        post = StateVector(state.num_qubits, amps / np.linalg.norm(amps))
        apply_matrix(post, family.basis.conj().T, family.register)
        return BitVector(m, w), post

    rows, workspace = _generic_rows(family, state)
    probs = np.sum(np.abs(rows) ** 2, axis=1)
    w = int(rng.choice(1 << m, p=probs / probs.sum()))
    post = StateVector(state.num_qubits + len(workspace), rows[w] / np.linalg.norm(rows[w]))
    return BitVector(m, w), _release_workspace(post, workspace)


def gl_extract(family: MeasurementFamily, state: StateVector, rng: np.random.Generator) -> BitVector:
    w, _ = gl_extract_with_state(family, state, rng)
    return w


def gl_success_formula(family_a: MeasurementFamily, family_b: MeasurementFamily,
                       joint_state: StateVector, x: BitVector) -> float:
    """‖(2E_uΠ_A^{x,u} − I) ⊗ (2E_vΠ_B^{x,v} − I)|ψ⟩‖²"""
    if set(family_a.register) & set(family_b.register):
        raise DimensionError("Registres de A et B non disjoints")
    n = joint_state.num_qubits
    total = n + family_a.workspace_len + family_b.workspace_len
    cap = get_config().simulation.gl_formula_cap
    if total > cap:
        raise SizeCapError("qubits de la formule GL", total, cap)

    extended = joint_state.copy()
    if total > n:
        extended = extended.tensor(StateVector.zero(total - n))
    ws_a = list(range(n, n + family_a.workspace_len))
    ws_b = list(range(n + family_a.workspace_len, total))
    apply_matrix(extended, family_a.average_operator(x), list(family_a.register) + ws_a)
    apply_matrix(extended, family_b.average_operator(x), list(family_b.register) + ws_b)
    value = float(np.vdot(extended.amps, extended.amps).real)
    get_logger().debug(f"Formule GL: {value:.6f} ({total} qubits)", SOURCE)
    return value


# =============================================================================
# Distributions D_i(x, r)
# =============================================================================

def sample_Di(i: int, x: BitVector, r: BitVector, cols: int, rng: np.random.Generator) -> BitMatrix:
    """Lignes j < i uniformes sur {u : u·x = r_j}, les suivantes uniformes"""
    if not 0 <= i <= r.length:
        raise ParameterError(f"i={i} hors de [0, {r.length}]")
    if x.length != cols:
        raise DimensionError(f"x de {x.length} bits pour {cols} colonnes")
    rows = []
    for j in range(r.length):
        if j < i:
            if x.is_zero() and r[j]:
                raise InfeasibleConstraintError(f"Ligne {j}: u·0 = 1 impossible")
            rows.append(sample_orthogonal(x, rng, parity=r[j]))
        else:
            rows.append(BitVector.random(cols, rng))
    return BitMatrix.from_rows(rows, cols)


# =============================================================================
# Opérateurs simultanés
# =============================================================================

def operator_abs(matrix: np.ndarray) -> np.ndarray:
    """|M| par décomposition spectrale (M hermitienne)"""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if not np.allclose(matrix, matrix.conj().T, atol=1e-9):
        raise OperatorBoundError("Valeur absolue définie ici pour les opérateurs hermitiens")
    eigvals, eigvecs = np.linalg.eigh(matrix)
    return (eigvecs * np.abs(eigvals)) @ eigvecs.conj().T


def _check_effect(op: np.ndarray, label: str, tol: float = 1e-9):
    if not np.allclose(op, op.conj().T, atol=tol):
        raise OperatorBoundError(f"{label} n'est pas hermitien")
    eigvals = np.linalg.eigvalsh(op)
    if eigvals.min() < -tol or eigvals.max() > 1 + tol:
        raise OperatorBoundError(
            f"{label} hors de [0, I] (spectre [{eigvals.min():.3e}, {eigvals.max():.3e}])"
        )


@dataclass
class SimultBoundReport:
    """Prémisse E⟨(1+P)/2 ⊗ (1+Q)/2⟩ et conclusion E⟨P ⊗ Q⟩"""
    eps: float
    premise: float
    conclusion: float

    @property
    def premise_holds(self) -> bool:
        return self.premise >= 0.5 + self.eps

    @property
    def conclusion_holds(self) -> bool:
        return self.conclusion >= self.eps ** 3 - 1e-12

    @property
    def ok(self) -> bool:
        return not self.premise_holds or self.conclusion_holds


def evaluate_simult_bound(instances: Sequence[Tuple[np.ndarray, np.ndarray, np.ndarray]],
                          eps: float) -> SimultBoundReport:
    """
    instances : (ψ_z, P_z, Q_z), ψ_z dans l'ordre de np.kron(P_z, Q_z)
    """
    if not instances:
        raise ParameterError("Aucune instance")
    premise, conclusion = 0.0, 0.0
    for z, (psi, P, Q) in enumerate(instances):
        psi = psi.amps if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128)
        P, Q = np.asarray(P, dtype=np.complex128), np.asarray(Q, dtype=np.complex128)
        _check_effect(P, f"P_{z}")
        _check_effect(Q, f"Q_{z}")
        if psi.shape[0] != P.shape[0] * Q.shape[0]:
            raise DimensionError(f"ψ_{z} de dimension {psi.shape[0]} pour P⊗Q {P.shape[0] * Q.shape[0]}")
        eye_p, eye_q = np.eye(P.shape[0]), np.eye(Q.shape[0])
        lifted = np.kron((eye_p + P) / 2, (eye_q + Q) / 2)
        premise += float(np.vdot(psi, lifted @ psi).real)
        conclusion += float(np.vdot(psi, np.kron(P, Q) @ psi).real)
    count = len(instances)
    return SimultBoundReport(eps, premise / count, conclusion / count)


def simult_bound_check(instances: Sequence[Tuple[np.ndarray, np.ndarray, np.ndarray]],
                       eps: float) -> bool:
    """Vrai si la prémisse échoue ou si la conclusion E⟨P ⊗ Q⟩ ≥ ε³ tient"""
    report = evaluate_simult_bound(instances, eps)
    if not report.ok:
        get_logger().warning(
            f"Contre-exemple: prémisse {report.premise:.4f}, conclusion {report.conclusion:.4f}", SOURCE
        )
    return report.ok


# =============================================================================
# Attaque de Breidbart
# =============================================================================

BREIDBART_ROTATION = np.array(
    [[np.cos(np.pi / 8), np.sin(np.pi / 8)],
     [-np.sin(np.pi / 8), np.cos(np.pi / 8)]],
    dtype=np.complex128,
)

BREIDBART_ENUMERATION_CAP = 8


def breidbart_search_value(lam: int) -> float:
    """
    Probabilité exacte que la mesure après rotation de π/8 rende x,
    moyennée sur tous les (x, θ) ; vaut ((2+√2)/4)^λ
    """
    if lam < 0:
        raise ParameterError(f"λ négatif: {lam}")
    if lam > BREIDBART_ENUMERATION_CAP:
        raise SizeCapError("longueur énumérée (Breidbart)", lam, BREIDBART_ENUMERATION_CAP)
    total = 0.0
    for x_bits, theta_bits in product(product((0, 1), repeat=lam), repeat=2):
        x = BitVector.from_bits(x_bits)
        state = encode_bb84(x, BitVector.from_bits(theta_bits))
        for q in range(lam):
            apply_matrix(state, BREIDBART_ROTATION, [q])
        total += float(state.probabilities()[x.value])
    return total / (4 ** lam)
