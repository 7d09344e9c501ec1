"""
Schémas inclonables : UE candidat, cUE couplé, échantillon d'aléa
inclonable et compilateur de test de clé

Ordre d'analyse des clés : θ d'abord, puis la matrice ligne par ligne ;
les bits restants sont ignorés.

Variantes à longueur fixe (toy) : Ux et Vx servent directement de masques,
le message doit alors compter exactement pad_rows bits.
"""

import struct
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

from ..core.config import get_config
from ..core.errors import DimensionError, ParameterError, SizeCapError
from ..core.logger import get_logger
from .conjugate import decode_bb84, encode_bb84
from .crypto import DEFAULT_PRG, PrgFamily, SchemeVariant, lambda_prime
from .f2linalg import BitMatrix, BitVector, kernel_basis, sample_rank_constrained, solve
from .programs import make_point
from .qsim import StateVector
from .qsio import OpaqueProgram, wrap_opaque

SOURCE = "unclonable"


@dataclass(frozen=True)
class KeyParse:
    """Clé découpée : bases θ, matrice (U ou V), bits ignorés"""
    theta: BitVector
    matrix: BitMatrix
    discarded: int


@dataclass
class UeCiphertext:
    """(|x^θ⟩, m ⊕ PRG(Ux)) ; params = (longueur de clé, lignes, longueur du message)"""
    state: StateVector
    pad: BitVector
    params: Tuple[int, int, int]


@dataclass
class CueCiphertext:
    """(|x^θ⟩, T, m_A ⊕ PRG(Ux), m_B ⊕ PRG(Vx))"""
    state: StateVector
    T: BitMatrix
    pad_A: BitVector
    pad_B: BitVector
    params: Tuple[int, int, int, int]


# =============================================================================
# Schémas de base
# =============================================================================

@dataclass(frozen=True)
class _BaseScheme:
    key_len: int
    rows: int
    state_len: int
    fixed_length: bool = False
    prg: PrgFamily = field(default=DEFAULT_PRG, compare=False)

    coupled = False

    @property
    def theta_len(self) -> int:
        return self.state_len

    @property
    def used_key_bits(self) -> int:
        return self.theta_len + self.rows * self.state_len

    def __post_init__(self):
        if self.rows < 1 or self.state_len < 1:
            raise ParameterError(f"Dimensions invalides: {self.rows} lignes, état de {self.state_len}")
        if self.used_key_bits > self.key_len:
            raise ParameterError(
                f"Clé de {self.key_len} bits pour {self.used_key_bits} bits utiles"
            )
        cap = get_config().simulation.statevector_cap
        if self.state_len > cap:
            raise SizeCapError("qubits du chiffré", self.state_len, cap)

    def keygen(self, rng: np.random.Generator) -> BitVector:
        return BitVector.random(self.key_len, rng)

    def parse(self, sk: BitVector) -> KeyParse:
        """sk = (θ, matrice ligne par ligne, −)"""
        if sk.length != self.key_len:
            raise DimensionError(f"Clé de {sk.length} bits pour un schéma sur {self.key_len}")
        theta = sk.prefix(self.theta_len)
        matrix_bits = sk.slice(self.theta_len, self.used_key_bits)
        matrix = BitMatrix.from_bitvector(self.rows, self.state_len, matrix_bits)
        return KeyParse(theta, matrix, self.key_len - self.used_key_bits)

    def pad_stream(self, seed: BitVector, msg_len: int) -> BitVector:
        """PRG(seed) sur msg_len bits, ou seed tel quel en longueur fixe"""
        if self.fixed_length:
            if msg_len != self.rows:
                raise DimensionError(
                    f"Message de {msg_len} bits pour un masque fixe de {self.rows}"
                )
            return seed
        return self.prg.stretch(seed, msg_len)

    def unpad(self, key: KeyParse, x: BitVector, pad: BitVector) -> BitVector:
        """Retire le masque dérivé de Wx"""
        return pad ^ self.pad_stream(key.matrix @ x, pad.length)

    def _check_state(self, state: StateVector):
        if state.num_qubits != self.state_len:
            raise DimensionError(f"État de {state.num_qubits} qubits pour {self.state_len}")


@dataclass(frozen=True)
class UeScheme(_BaseScheme):
    """UE candidat : sk = (θ, U), chiffré (|x^θ⟩, m ⊕ PRG(Ux))"""

    @classmethod
    def full(cls, lam: int) -> "UeScheme":
        rows = lambda_prime(lam, SchemeVariant.UE)
        if rows < 1:
            raise ParameterError(f"λ={lam} trop petit pour l'UE (λ′ = 0, λ >= 22 requis)")
        return cls(lam, rows, 11 * rows)

    @classmethod
    def toy(cls, state_len: int, pad_rows: int) -> "UeScheme":
        return cls(state_len + pad_rows * state_len, pad_rows, state_len, fixed_length=True)

    def encrypt(self, sk: BitVector, m: BitVector, rng: np.random.Generator) -> UeCiphertext:
        key = self.parse(sk)
        x = BitVector.random(self.state_len, rng)
        pad = m ^ self.pad_stream(key.matrix @ x, m.length)
        return UeCiphertext(encode_bb84(x, key.theta), pad, (self.key_len, self.rows, m.length))

    def decrypt(self, sk: BitVector, ct: UeCiphertext, rng: np.random.Generator) -> BitVector:
        """Lecture de x dans les bases θ (non destructive), puis retrait du masque"""
        key = self.parse(sk)
        self._check_state(ct.state)
        x, ct.state = decode_bb84(ct.state, key.theta, rng)
        return self.unpad(key, x, ct.pad)


@dataclass(frozen=True)
class CueScheme(_BaseScheme):
    """cUE : sk_A = (θ_A, U), sk_B = (θ_B, V), θ = Tθ_A = Tθ_B"""

    coupled = True

    @property
    def theta_len(self) -> int:
        return self.state_len + 1

    @classmethod
    def full(cls, lam: int) -> "CueScheme":
        rows = lambda_prime(lam, SchemeVariant.CUE)
        if rows < 1:
            raise ParameterError(f"λ={lam} trop petit pour le cUE (λ >= 23 requis)")
        return cls(lam, rows, 11 * rows)

    @classmethod
    def toy(cls, state_len: int, pad_rows: int) -> "CueScheme":
        return cls(state_len + 1 + pad_rows * state_len, pad_rows, state_len, fixed_length=True)

    def sample_T(self, theta_a: BitVector, theta_b: BitVector,
                 rng: np.random.Generator) -> BitMatrix:
        """T de rang plein avec Tθ_A = Tθ_B"""
        return sample_rank_constrained(
            self.state_len, self.theta_len, theta_a ^ theta_b, self.state_len, rng,
            max_attempts=get_config().simulation.sampler_max_attempts,
        )

    def encrypt_pair(self, sk_a: BitVector, sk_b: BitVector, m_a: BitVector, m_b: BitVector,
                     rng: np.random.Generator) -> CueCiphertext:
        key_a, key_b = self.parse(sk_a), self.parse(sk_b)
        x = BitVector.random(self.state_len, rng)
        T = self.sample_T(key_a.theta, key_b.theta, rng)
        theta = T @ key_a.theta
        pad_a = m_a ^ self.pad_stream(key_a.matrix @ x, m_a.length)
        pad_b = m_b ^ self.pad_stream(key_b.matrix @ x, m_b.length)
        return CueCiphertext(encode_bb84(x, theta), T, pad_a, pad_b,
                             (self.key_len, self.rows, m_a.length, m_b.length))

    def basis(self, key: KeyParse, T: BitMatrix) -> BitVector:
        return T @ key.theta

    def decrypt_slot(self, p: int, sk: BitVector, ct: CueCiphertext,
                     rng: np.random.Generator) -> BitVector:
        """θ = Tθ′, lecture de x, retrait du masque de l'emplacement p"""
        if p not in (0, 1):
            raise DimensionError(f"Emplacement {p} (0 ou 1 attendu)")
        key = self.parse(sk)
        self._check_state(ct.state)
        x, ct.state = decode_bb84(ct.state, self.basis(key, ct.T), rng)
        return self.unpad(key, x, ct.pad_A if p == 0 else ct.pad_B)


BaseScheme = Union[UeScheme, CueScheme]


def ue_encrypt(sk: BitVector, m: BitVector, rng: np.random.Generator) -> UeCiphertext:
    return UeScheme.full(sk.length).encrypt(sk, m, rng)


def ue_decrypt(sk: BitVector, ct: UeCiphertext, rng: np.random.Generator) -> BitVector:
    return UeScheme.full(sk.length).decrypt(sk, ct, rng)


def cue_encrypt(sk_a: BitVector, sk_b: BitVector, m_a: BitVector, m_b: BitVector,
                rng: np.random.Generator) -> CueCiphertext:
    if sk_a.length != sk_b.length:
        raise DimensionError("Clés sk_A et sk_B de longueurs différentes")
    return CueScheme.full(sk_a.length).encrypt_pair(sk_a, sk_b, m_a, m_b, rng)


def cue_decrypt(p: int, sk: BitVector, ct: CueCiphertext, rng: np.random.Generator) -> BitVector:
    return CueScheme.full(sk.length).decrypt_slot(p, sk, ct, rng)


# =============================================================================
# Aléa inclonable
# =============================================================================

@dataclass
class RandomnessSample:
    """Tirage du challenger de Rand-Expt / Search-Expt"""
    state: StateVector
    x: BitVector
    theta: BitVector
    U: BitMatrix
    V: BitMatrix
    r1: BitVector
    s1: BitVector


def unclonable_randomness_sample(n: int, lam: int, rng: np.random.Generator) -> RandomnessSample:
    """x, θ ← {0,1}^{10n+λ}, U, V ← {0,1}^{n×(10n+λ)}, r¹ = Ux, s¹ = Vx"""
    if n < 0 or lam < 0 or 10 * n + lam < 1:
        raise ParameterError(f"Paramètres invalides: n={n}, λ={lam}")
    length = 10 * n + lam
    cap = get_config().simulation.statevector_cap
    if length > cap:
        raise SizeCapError("qubits de l'état |x^θ⟩", length, cap)
    x = BitVector.random(length, rng)
    theta = BitVector.random(length, rng)
    U = BitMatrix.random(n, length, rng)
    V = BitMatrix.random(n, length, rng)
    return RandomnessSample(encode_bb84(x, theta), x, theta, U, V, U @ x, V @ x)


def fabricate_cue_key(T: BitMatrix, theta_prime: BitVector, W: BitMatrix, d: int, side: int,
                      lam: int, rng: np.random.Generator) -> BitVector:
    """
    Clé cUE cohérente avec θ′ pour une partie (side 0 : A, 1 : B)

    Des deux solutions de Tθ = θ′, θ_A est celle dont le premier bit de
    différence vaut d ; θ_B est l'autre. La clé vaut (θ_side, W, remplissage).
    """
    if side not in (0, 1) or d not in (0, 1):
        raise ParameterError(f"side={side}, d={d} (bits attendus)")
    scheme = CueScheme.full(lam)
    if T.rows != scheme.state_len or T.cols != scheme.theta_len:
        raise DimensionError(f"T {T.rows}x{T.cols} pour un état de {scheme.state_len} qubits")
    if W.rows != scheme.rows or W.cols != scheme.state_len:
        raise DimensionError(f"Matrice {W.rows}x{W.cols} pour {scheme.rows}x{scheme.state_len}")
    base = solve(T, theta_prime)
    kernel = kernel_basis(T)
    if base is None or len(kernel) != 1:
        raise ParameterError("T doit être de rang plein avec un noyau de dimension 1")
    other = base ^ kernel[0]
    i = kernel[0].lowest_set_bit()
    theta_a, theta_b = (base, other) if base[i] == d else (other, base)
    theta = theta_a if side == 0 else theta_b

    filler = scheme.key_len - scheme.used_key_bits
    return theta.concat(W.to_bitvector()).concat(BitVector.random(filler, rng))


def fabricate_cue_keys(T: BitMatrix, theta_prime: BitVector, U: BitMatrix, V: BitMatrix,
                       d: int, lam: int, rng: np.random.Generator) -> Tuple[BitVector, BitVector]:
    """Paire (sk_A, sk_B) avec Tθ_A = Tθ_B = θ′"""
    return (fabricate_cue_key(T, theta_prime, U, d, 0, lam, rng),
            fabricate_cue_key(T, theta_prime, V, d, 1, lam, rng))


# =============================================================================
# Compilateur de test de clé
# =============================================================================

@dataclass
class CompiledCiphertext:
    """(A, chiffré interne, indicatrices opaques δ_s)"""
    A: BitMatrix
    inner: Union[UeCiphertext, CueCiphertext]
    indicators: Tuple[OpaqueProgram, ...]
    scheme: "CompiledScheme" = field(repr=False)

    @property
    def key_len(self) -> int:
        return self.scheme.key_len

    @property
    def state(self) -> StateVector:
        return self.inner.state

    def slot_for(self, key: BitVector, rng: np.random.Generator) -> Optional[int]:
        """Emplacement désigné par la clé (0 pour l'UE), None pour ⊥"""
        result = self.scheme.test(key, self, rng)
        if self.scheme.coupled:
            return result
        return 0 if result == 1 else None

    def open(self, slot: int, key: BitVector, rng: np.random.Generator) -> BitVector:
        if self.scheme.coupled:
            return self.scheme.decrypt_slot(slot, key, self, rng)
        return self.scheme.decrypt(key, self, rng)


class CompiledScheme:
    """
    enc′(s; m) = (A, enc(As; m), δ_s opaque)

    s vit dans F2^{outer_key_len} (3 fois la clé interne par défaut),
    A est tirée à chaque chiffrement.
    """

    def __init__(self, base: BaseScheme, outer_key_len: Optional[int] = None):
        self.base = base
        self.key_len = outer_key_len if outer_key_len is not None else 3 * base.key_len
        if self.key_len < 1:
            raise ParameterError(f"Clé externe de {self.key_len} bits")
        self.coupled = base.coupled

    def __repr__(self) -> str:
        return f"CompiledScheme(base={type(self.base).__name__}, key_len={self.key_len})"

    def keygen(self, rng: np.random.Generator) -> BitVector:
        return BitVector.random(self.key_len, rng)

    def _check_key(self, s: BitVector):
        if s.length != self.key_len:
            raise DimensionError(f"Clé de {s.length} bits pour un schéma compilé sur {self.key_len}")

    def _indicator(self, s: BitVector) -> OpaqueProgram:
        return wrap_opaque(make_point({s}, self.key_len))

    def _sample_A(self, rng: np.random.Generator) -> BitMatrix:
        return BitMatrix.random(self.base.key_len, self.key_len, rng)

    def encrypt(self, s: BitVector, m: BitVector, rng: np.random.Generator) -> CompiledCiphertext:
        if self.coupled:
            raise ParameterError("Schéma couplé : utiliser encrypt_pair")
        self._check_key(s)
        A = self._sample_A(rng)
        inner = self.base.encrypt(A @ s, m, rng)
        return CompiledCiphertext(A, inner, (self._indicator(s),), self)

    def encrypt_pair(self, s_a: BitVector, s_b: BitVector, m_a: BitVector, m_b: BitVector,
                     rng: np.random.Generator) -> CompiledCiphertext:
        if not self.coupled:
            raise ParameterError("Schéma non couplé : utiliser encrypt")
        self._check_key(s_a)
        self._check_key(s_b)
        A = self._sample_A(rng)
        inner = self.base.encrypt_pair(A @ s_a, A @ s_b, m_a, m_b, rng)
        return CompiledCiphertext(A, inner, (self._indicator(s_a), self._indicator(s_b)), self)

    def test(self, s: BitVector, ct: CompiledCiphertext, rng: np.random.Generator) -> Optional[int]:
        """UE : δ_s(s′) ; cUE : 0 pour sk_A, 1 pour sk_B, None sinon"""
        self._check_key(s)
        hits = [ind.evaluate(s, rng).value for ind in ct.indicators]
        if not self.coupled:
            return hits[0]
        for slot, hit in enumerate(hits):
            if hit:
                return slot
        return None

    def decrypt(self, s: BitVector, ct: CompiledCiphertext, rng: np.random.Generator) -> BitVector:
        """dec′(s; (A, σ, τ)) = dec(As; σ)"""
        self._check_key(s)
        return self.base.decrypt(ct.A @ s, ct.inner, rng)

    def decrypt_slot(self, p: int, s: BitVector, ct: CompiledCiphertext,
                     rng: np.random.Generator) -> BitVector:
        self._check_key(s)
        return self.base.decrypt_slot(p, ct.A @ s, ct.inner, rng)


def compile_key_testing(base: BaseScheme, outer_key_len: Optional[int] = None) -> CompiledScheme:
    scheme = CompiledScheme(base, outer_key_len)
    get_logger().debug(f"Compilation du test de clé: {scheme}", SOURCE)
    return scheme


# =============================================================================
# Octets canoniques des parties classiques
# =============================================================================
#
# Vecteur : longueur en bits (u16 LE) puis octets petit-boutistes.
# Matrice : lignes (u16 LE), colonnes (u16 LE), puis aplatissement ligne
# par ligne encodé comme un vecteur. Les états quantiques sont exclus.

CANONICAL_VERSION = 1


def _vector_bytes(v: BitVector) -> bytes:
    return struct.pack("<H", v.length) + v.to_bytes()


def _matrix_bytes(m: BitMatrix) -> bytes:
    return struct.pack("<HH", m.rows, m.cols) + _vector_bytes(m.to_bitvector())


def canonical_bytes(ct) -> bytes:
    """Disposition : étiquette, version (u8), puis les champs classiques"""
    if isinstance(ct, UeCiphertext):
        return b"UE" + bytes([CANONICAL_VERSION]) + _vector_bytes(ct.pad)
    if isinstance(ct, CueCiphertext):
        return (b"CUE" + bytes([CANONICAL_VERSION]) + _matrix_bytes(ct.T)
                + _vector_bytes(ct.pad_A) + _vector_bytes(ct.pad_B))
    if isinstance(ct, CompiledCiphertext):
        inner = canonical_bytes(ct.inner)
        return (b"KT" + bytes([CANONICAL_VERSION]) + _matrix_bytes(ct.A)
                + struct.pack("<I", len(inner)) + inner)
    raise TypeError(f"Type de chiffré inconnu: {type(ct).__name__}")
