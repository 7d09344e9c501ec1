"""
Descripteurs de programmes des théorèmes de protection contre la copie

Fonctions point δ_S, programmes patchés P[g, σ] et P̃[g, σ], programme de
recherche à préfixe nul et programme P_{T,σ} des fonctions point.
Les ciphertexts σ sont des chiffrés à test de clé (module unclonable).
"""

from abc import ABC, abstractmethod
from typing import Callable, FrozenSet, Iterable, List, Optional, Protocol, Sequence, Tuple

import numpy as np

from ..core.errors import DimensionError, ParameterError
from .crypto import GgmKey, PuncturedKey, decode_ggm_key, ggm_eval, punctured_eval
from .f2linalg import BitMatrix, BitVector, enumerate_vectors, kernel_basis, rank, solve


class KeyTestedCiphertext(Protocol):
    """Chiffré muni d'un test de clé (emplacement 0/1 ou None pour ⊥)"""
    key_len: int

    def slot_for(self, key: BitVector, rng: np.random.Generator) -> Optional[int]:
        ...

    def open(self, slot: int, key: BitVector, rng: np.random.Generator) -> BitVector:
        ...


class ProgramDescriptor(ABC):
    """Programme classique évaluable, longueurs déclarées"""

    TAG = ""
    deterministic = True

    def __init__(self, in_len: int, out_len: int):
        if in_len < 0 or out_len < 1:
            raise DimensionError(f"Longueurs invalides: entrée {in_len}, sortie {out_len}")
        self.in_len = in_len
        self.out_len = out_len

    @abstractmethod
    def _evaluate(self, x: BitVector, rng: np.random.Generator) -> Optional[BitVector]:
        pass

    def evaluate(self, x: BitVector, rng: np.random.Generator) -> Optional[BitVector]:
        """Sortie en x (None pour ⊥)"""
        if x.length != self.in_len:
            raise DimensionError(f"Entrée de {x.length} bits pour {self.TAG} sur {self.in_len}")
        return self._evaluate(x, rng)

    def truth_table(self, rng: np.random.Generator) -> List[Optional[BitVector]]:
        return [self.evaluate(x, rng) for x in enumerate_vectors(self.in_len)]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(in_len={self.in_len}, out_len={self.out_len})"


def _bit(value: int) -> BitVector:
    return BitVector(1, value)


# =============================================================================
# Programmes de base
# =============================================================================

class PlainProgram(ProgramDescriptor):
    """Fonction classique quelconque"""

    TAG = "plain"

    def __init__(self, fn: Callable[[BitVector], Optional[BitVector]], in_len: int,
                 out_len: int, name: str = ""):
        super().__init__(in_len, out_len)
        self._fn = fn
        self.name = name

    @classmethod
    def from_ggm(cls, key: GgmKey) -> "PlainProgram":
        return cls(lambda x: ggm_eval(key, x), key.input_len, key.output_len, "ggm")

    @classmethod
    def from_punctured(cls, key: PuncturedKey) -> "PlainProgram":
        """⊥ sur l'ensemble ponctué"""
        return cls(lambda x: punctured_eval(key, x), key.input_len, key.output_len, "ggm-punctured")

    @classmethod
    def from_table(cls, table: Sequence[BitVector]) -> "PlainProgram":
        in_len = (len(table) - 1).bit_length()
        if not table or len(table) != 1 << in_len:
            raise DimensionError(f"Table de {len(table)} entrées (puissance de 2 attendue)")
        values = tuple(table)
        return cls(lambda x: values[x.value], in_len, values[0].length, "table")

    def _evaluate(self, x, rng):
        return self._fn(x)


class PointProgram(ProgramDescriptor):
    """δ_S(x) = 1 si x ∈ S, 0 sinon"""

    TAG = "point"

    def __init__(self, points: FrozenSet[BitVector], in_len: int):
        super().__init__(in_len, 1)
        for s in points:
            if s.length != in_len:
                raise DimensionError(f"Point de {s.length} bits pour un domaine de {in_len}")
        self.points = frozenset(points)

    def _evaluate(self, x, rng):
        return _bit(int(x in self.points))


def make_point(points: Iterable[BitVector], in_len: int) -> PointProgram:
    return PointProgram(frozenset(points), in_len)


# =============================================================================
# Programmes patchés
# =============================================================================

def _check_key_len(sigma: KeyTestedCiphertext, in_len: int):
    if sigma.key_len != in_len:
        raise DimensionError(
            f"Clés du chiffré sur {sigma.key_len} bits pour un programme sur {in_len}"
        )


class PatchedProgram(ProgramDescriptor):
    """
    P[g, σ](z) : test(z; σ) -> r ; r = ⊥ : g(z), sinon Dec(r, z; σ)
    """

    TAG = "patched"

    def __init__(self, g: ProgramDescriptor, sigma: KeyTestedCiphertext):
        super().__init__(g.in_len, g.out_len)
        _check_key_len(sigma, g.in_len)
        self.g = g
        self.sigma = sigma

    def _evaluate(self, z, rng):
        slot = self.sigma.slot_for(z, rng)
        if slot is None:
            return self.g.evaluate(z, rng)
        return self.sigma.open(slot, z, rng)


class TildePatchedProgram(ProgramDescriptor):
    """
    P̃[g, σ](z) : r = ⊥ : g(z), sinon y = Dec(r, z; σ) et g(y)
    """

    TAG = "tilde-patched"

    def __init__(self, g: ProgramDescriptor, sigma: KeyTestedCiphertext):
        super().__init__(g.in_len, g.out_len)
        _check_key_len(sigma, g.in_len)
        self.g = g
        self.sigma = sigma

    def _evaluate(self, z, rng):
        slot = self.sigma.slot_for(z, rng)
        if slot is None:
            return self.g.evaluate(z, rng)
        y = self.sigma.open(slot, z, rng)
        if y.length != self.g.in_len:
            raise DimensionError(f"Clair de {y.length} bits pour g sur {self.g.in_len}")
        return self.g.evaluate(y, rng)


class SearchPatchedProgram(ProgramDescriptor):
    """
    Programme de recherche : clé acceptée -> clair 0^k ‖ ⟨g′⟩ -> g′(z)

    Préfixe non nul ou description malformée : ⊥.
    """

    TAG = "search-patched"

    def __init__(self, f: ProgramDescriptor, sigma: KeyTestedCiphertext, prefix_len: int):
        super().__init__(f.in_len, f.out_len)
        _check_key_len(sigma, f.in_len)
        self.f = f
        self.sigma = sigma
        self.prefix_len = prefix_len

    def _evaluate(self, z, rng):
        slot = self.sigma.slot_for(z, rng)
        if slot is None:
            return self.f.evaluate(z, rng)
        plaintext = self.sigma.open(slot, z, rng)
        if plaintext.length < self.prefix_len or not plaintext.prefix(self.prefix_len).is_zero():
            return None
        key = decode_ggm_key(plaintext.slice(self.prefix_len, plaintext.length))
        if key is None or key.input_len != self.in_len or key.output_len != self.out_len:
            return None
        return ggm_eval(key, z)


def make_patched(g: ProgramDescriptor, sigma: KeyTestedCiphertext) -> PatchedProgram:
    return PatchedProgram(g, sigma)


def make_tilde_patched(g: ProgramDescriptor, sigma: KeyTestedCiphertext) -> TildePatchedProgram:
    return TildePatchedProgram(g, sigma)


def make_search_patched(f: ProgramDescriptor, sigma: KeyTestedCiphertext,
                        prefix_len: int) -> SearchPatchedProgram:
    return SearchPatchedProgram(f, sigma, prefix_len)


# =============================================================================
# Fonctions point : P_{T,σ}
# =============================================================================

def coset_pair(T: BitMatrix, w: BitVector) -> Tuple[BitVector, BitVector]:
    """Les deux antécédents de w par T (rang = lignes = colonnes - 1), x⁰ < x¹"""
    if T.cols != T.rows + 1 or rank(T) != T.rows:
        raise ParameterError(f"T {T.rows}x{T.cols} doit être de rang {T.rows} avec {T.rows + 1} colonnes")
    base = solve(T, w)
    if base is None:
        raise ParameterError(f"Aucune solution de Tz = {w}")
    direction = kernel_basis(T)[0]
    first, second = sorted((base, base ^ direction), key=BitVector.lex_key)
    return first, second


def x_of(c: int, x0: BitVector, x1: BitVector) -> BitVector:
    """x⁰ si son bit au premier indice de différence vaut c, x¹ sinon"""
    i = (x0 ^ x1).lowest_set_bit()
    if i < 0:
        raise ParameterError("x⁰ et x¹ doivent différer")
    return x0 if x0[i] == c else x1


class PointCosetProgram(ProgramDescriptor):
    """
    P_{T,σ}(z) : test(Tz; σ) rejette -> 0 ; sinon c = Dec(Tz; σ) et [x(c) = z]
    """

    TAG = "point-coset"

    def __init__(self, T: BitMatrix, sigma: KeyTestedCiphertext):
        super().__init__(T.cols, 1)
        if T.cols != T.rows + 1 or rank(T) != T.rows:
            raise ParameterError(f"T {T.rows}x{T.cols} doit être de rang {T.rows}")
        _check_key_len(sigma, T.rows)
        self.T = T
        self.sigma = sigma

    def _evaluate(self, z, rng):
        w = self.T @ z
        slot = self.sigma.slot_for(w, rng)
        if slot is None:
            return _bit(0)
        x0, x1 = coset_pair(self.T, w)
        c = self.sigma.open(slot, w, rng)[0]
        return _bit(int(x_of(c, x0, x1) == z))


def make_point_coset(T: BitMatrix, sigma: KeyTestedCiphertext) -> PointCosetProgram:
    return PointCosetProgram(T, sigma)
