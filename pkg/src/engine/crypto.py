"""
Primitives classiques : famille PRG par composition, paramètre λ′,
PRF puncturable GGM et MAC jouet

Expandeur par défaut (épinglé pour les vecteurs de test) : pour une graine s
de k bits, bloc i = SHA-256(b"unclonablelab/prg" ‖ k sur 4 octets LE ‖
octets de s (bit 0 = bit faible du premier octet) ‖ i sur 4 octets LE).
Les blocs concaténés sont lus bit par bit (bit faible d'abord) et tronqués
à 2k bits.
"""

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Iterable, Optional, Tuple

import numpy as np

from ..core.errors import DimensionError, ParameterError
from .f2linalg import BitVector

Expander = Callable[[BitVector], BitVector]


class Sha256CounterExpander:
    """Doublement de graine par SHA-256 en mode compteur"""

    DOMAIN = b"unclonablelab/prg"

    def __call__(self, seed: BitVector) -> BitVector:
        out_bits = 2 * seed.length
        header = self.DOMAIN + seed.length.to_bytes(4, "little") + seed.to_bytes()
        blocks = []
        for counter in range((out_bits + 255) // 256):
            blocks.append(hashlib.sha256(header + counter.to_bytes(4, "little")).digest())
        return BitVector.from_bytes(b"".join(blocks), out_bits)


DEFAULT_EXPANDER: Expander = Sha256CounterExpander()


@dataclass(frozen=True)
class PrgFamily:
    """PRG_{λ,n} construit sur un expandeur doublant la graine"""
    expander: Expander = field(default=DEFAULT_EXPANDER)

    def split(self, seed: BitVector) -> Tuple[BitVector, BitVector]:
        """(L, R) = moitiés de l'expansion de la graine"""
        out = self.expander(seed)
        if out.length != 2 * seed.length:
            raise DimensionError(f"Expandeur: {out.length} bits au lieu de {2 * seed.length}")
        return out.prefix(seed.length), out.slice(seed.length, out.length)

    def stretch(self, seed: BitVector, out_len: int) -> BitVector:
        """
        n <= λ : les n premiers bits de la graine ;
        n > λ : graine ‖ flux, le flux chaînant les moitiés gauches
        """
        if out_len < 0:
            raise DimensionError(f"Longueur de sortie négative: {out_len}")
        if out_len <= seed.length:
            return seed.prefix(out_len)
        if seed.length == 0:
            raise DimensionError("Graine vide pour une sortie non vide")

        out = seed
        current = seed
        while out.length < out_len:
            left, current = self.split(current)
            out = out.concat(left)
        return out.prefix(out_len)


DEFAULT_PRG = PrgFamily()


def prg_stretch(seed: BitVector, out_len: int, prg: Optional[PrgFamily] = None) -> BitVector:
    """Étire (ou tronque) la graine à out_len bits"""
    return (prg or DEFAULT_PRG).stretch(seed, out_len)


class SchemeVariant(Enum):
    UE = "ue"
    CUE = "cue"


def lambda_prime(lam: int, variant: SchemeVariant) -> int:
    """Plus grand k tel que 11k² + 11k (+1 pour cUE) <= λ"""
    if lam < 1:
        raise ParameterError(f"λ doit être >= 1 (reçu {lam})")
    extra = 1 if variant == SchemeVariant.CUE else 0
    k = 0
    while 11 * (k + 1) ** 2 + 11 * (k + 1) + extra <= lam:
        k += 1
    return k


# =============================================================================
# PRF GGM
# =============================================================================

@dataclass(frozen=True)
class GgmKey:
    """Clé GGM : graine racine, longueurs d'entrée et de sortie"""
    root: BitVector
    input_len: int
    output_len: int

    @classmethod
    def random(cls, input_len: int, output_len: int, seed_len: int,
               rng: np.random.Generator) -> "GgmKey":
        if seed_len < 1:
            raise ParameterError("Graine GGM d'au moins un bit")
        return cls(BitVector.random(seed_len, rng), input_len, output_len)


def _descend(seed: BitVector, bits: Iterable[int], prg: PrgFamily) -> BitVector:
    for bit in bits:
        left, right = prg.split(seed)
        seed = right if bit else left
    return seed


def ggm_eval(key: GgmKey, x: BitVector, prg: Optional[PrgFamily] = None) -> BitVector:
    """Descente de l'arbre selon les bits de x (bit 0 en premier), puis étirement"""
    if x.length != key.input_len:
        raise DimensionError(f"Entrée de {x.length} bits pour une PRF sur {key.input_len}")
    prg = prg or DEFAULT_PRG
    leaf = _descend(key.root, x, prg)
    return prg.stretch(leaf, key.output_len)


@dataclass(frozen=True)
class PuncturedKey:
    """Clé ponctuée : graines du co-chemin indexées par (profondeur, préfixe)"""
    input_len: int
    output_len: int
    punctured: FrozenSet[BitVector]
    copath: Dict[Tuple[int, int], BitVector]

    def __hash__(self):
        return hash((self.input_len, self.output_len, self.punctured))

    @property
    def copath_size(self) -> int:
        return len(self.copath)


def ggm_puncture(key: GgmKey, points: Iterable[BitVector],
                 prg: Optional[PrgFamily] = None) -> PuncturedKey:
    """Ponctue la clé sur l'ensemble S (non vide)"""
    prg = prg or DEFAULT_PRG
    punctured = frozenset(points)
    if not punctured:
        raise ParameterError("L'ensemble ponctué doit être non vide")
    for x in punctured:
        if x.length != key.input_len:
            raise DimensionError(f"Point ponctué de {x.length} bits pour {key.input_len}")

    on_path = {(d, x.prefix(d).value) for x in punctured for d in range(key.input_len + 1)}

    copath: Dict[Tuple[int, int], BitVector] = {}
    for x in punctured:
        seed = key.root
        for depth in range(key.input_len):
            left, right = prg.split(seed)
            sibling_bit = 1 - x[depth]
            sibling = (depth + 1, x.prefix(depth).value | (sibling_bit << depth))
            if sibling not in on_path and sibling not in copath:
                copath[sibling] = right if sibling_bit else left
            seed = right if x[depth] else left

    return PuncturedKey(key.input_len, key.output_len, punctured, copath)


def punctured_eval(key: PuncturedKey, x: BitVector,
                   prg: Optional[PrgFamily] = None) -> Optional[BitVector]:
    """f_S(x) = f(x) hors de S ; None sur S"""
    if x.length != key.input_len:
        raise DimensionError(f"Entrée de {x.length} bits pour une PRF sur {key.input_len}")
    if x in key.punctured:
        return None
    prg = prg or DEFAULT_PRG
    for depth in range(1, key.input_len + 1):
        node = (depth, x.prefix(depth).value)
        if node in key.copath:
            leaf = _descend(key.copath[node], x.slice(depth, x.length), prg)
            return prg.stretch(leaf, key.output_len)
    raise ParameterError(f"Aucune graine de co-chemin pour {x}")


# =============================================================================
# MAC jouet (programme puncturable de recherche)
# =============================================================================

def mac_tag(key: GgmKey, x: BitVector) -> BitVector:
    return ggm_eval(key, x)


def mac_verify(key: GgmKey, x: BitVector, y: Optional[BitVector]) -> bool:
    """Ver(f, x, y) = [y = f(x)]"""
    return y is not None and y == ggm_eval(key, x)


# =============================================================================
# Encodage des clés GGM (description de circuit)
# =============================================================================

KEY_HEADER_BITS = 24


def encode_ggm_key(key: GgmKey) -> BitVector:
    """input_len (8 bits) ‖ output_len (8 bits) ‖ longueur de graine (8 bits) ‖ graine"""
    for name, value in (("input_len", key.input_len), ("output_len", key.output_len),
                        ("seed_len", key.root.length)):
        if not 0 <= value < 256:
            raise ParameterError(f"{name}={value} non encodable sur 8 bits")
    header = (BitVector(8, key.input_len)
              .concat(BitVector(8, key.output_len))
              .concat(BitVector(8, key.root.length)))
    return header.concat(key.root)


def decode_ggm_key(bits: BitVector) -> Optional[GgmKey]:
    """Inverse de encode_ggm_key ; None si la description est malformée"""
    if bits.length < KEY_HEADER_BITS:
        return None
    input_len = bits.slice(0, 8).value
    output_len = bits.slice(8, 16).value
    seed_len = bits.slice(16, 24).value
    if seed_len == 0 or bits.length != KEY_HEADER_BITS + seed_len:
        return None
    return GgmKey(bits.slice(KEY_HEADER_BITS, bits.length), input_len, output_len)
