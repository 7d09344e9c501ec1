"""
Algèbre linéaire exacte sur F2

Vecteurs et matrices binaires empaquetés dans des entiers Python :
le bit i d'un vecteur est (value >> i) & 1, chaque ligne d'une matrice
est un entier dont le bit j correspond à la colonne j.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import DimensionError, InfeasibleConstraintError
from ..utils.validators import Validators


def _random_int(bits: int, rng: np.random.Generator) -> int:
    """Entier uniforme sur [0, 2^bits)"""
    if bits <= 0:
        return 0
    raw = int.from_bytes(rng.bytes((bits + 7) // 8), "little")
    return raw & ((1 << bits) - 1)


@dataclass(frozen=True)
class BitVector:
    """Vecteur de F2 de longueur déclarée"""
    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise DimensionError(f"Longueur négative: {self.length}")
        if self.value < 0 or self.value >> self.length:
            raise DimensionError(
                f"Valeur {self.value} hors de {self.length} bits"
            )

    # --- Constructeurs ---

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> "BitVector":
        return cls(length, (1 << length) - 1)

    @classmethod
    def unit(cls, length: int, index: int) -> "BitVector":
        if not 0 <= index < length:
            raise DimensionError(f"Indice {index} hors de [0, {length})")
        return cls(length, 1 << index)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        value = 0
        length = 0
        for i, bit in enumerate(bits):
            if bit not in (0, 1, True, False):
                raise DimensionError(f"Bit invalide: {bit!r}")
            value |= int(bit) << i
            length = i + 1
        return cls(length, value)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """'0110' -> bits dans l'ordre de lecture (bit 0 en premier)"""
        text = text.strip()
        if not Validators.is_valid_bitstring(text):
            raise DimensionError(f"Chaîne binaire invalide: {text!r}")
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def random(cls, length: int, rng: np.random.Generator) -> "BitVector":
        return cls(length, _random_int(length, rng))

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "BitVector":
        """Bits petit-boutistes (bit 0 = bit faible du premier octet)"""
        if len(data) * 8 < length:
            raise DimensionError(f"{len(data)} octets pour {length} bits")
        value = int.from_bytes(data, "little") & ((1 << length) - 1)
        return cls(length, value)

    # --- Accès ---

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if index < 0:
            index += self.length
        if not 0 <= index < self.length:
            raise IndexError(index)
        return (self.value >> index) & 1

    def __iter__(self) -> Iterator[int]:
        for i in range(self.length):
            yield (self.value >> i) & 1

    def bits(self) -> Tuple[int, ...]:
        return tuple(self)

    def to_bytes(self) -> bytes:
        return self.value.to_bytes((self.length + 7) // 8, "little")

    def to_string(self) -> str:
        return "".join(str(b) for b in self)

    def __str__(self) -> str:
        return self.to_string()

    def lex_key(self) -> Tuple[int, ...]:
        """Clé d'ordre lexicographique, bit 0 en tête"""
        return self.bits()

    @property
    def weight(self) -> int:
        return self.value.bit_count()

    def is_zero(self) -> bool:
        return self.value == 0

    # --- Opérations ---

    def _check_same_length(self, other: "BitVector"):
        if self.length != other.length:
            raise DimensionError(
                f"Longueurs incompatibles: {self.length} != {other.length}"
            )

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check_same_length(other)
        return BitVector(self.length, self.value ^ other.value)

    def dot(self, other: "BitVector") -> int:
        """Produit scalaire sur F2"""
        self._check_same_length(other)
        return (self.value & other.value).bit_count() & 1

    def concat(self, other: "BitVector") -> "BitVector":
        """self ‖ other (other occupe les bits de poids fort)"""
        return BitVector(self.length + other.length,
                         self.value | (other.value << self.length))

    def slice(self, start: int, stop: int) -> "BitVector":
        if not 0 <= start <= stop <= self.length:
            raise DimensionError(f"Tranche [{start}:{stop}] hors de {self.length}")
        width = stop - start
        return BitVector(width, (self.value >> start) & ((1 << width) - 1))

    def prefix(self, count: int) -> "BitVector":
        return self.slice(0, count)

    def flip(self, index: int) -> "BitVector":
        return BitVector(self.length, self.value ^ (1 << index))

    def lowest_set_bit(self) -> int:
        """Indice du premier bit à 1 (-1 pour le vecteur nul)"""
        if self.value == 0:
            return -1
        return (self.value & -self.value).bit_length() - 1


@dataclass(frozen=True)
class BitMatrix:
    """Matrice de F2, lignes empaquetées"""
    rows: int
    cols: int
    data: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError(f"Dimensions négatives: {self.rows}x{self.cols}")
        if not self.data and self.rows:
            object.__setattr__(self, "data", (0,) * self.rows)
        if len(self.data) != self.rows:
            raise DimensionError(f"{len(self.data)} lignes fournies pour {self.rows}")
        limit = 1 << self.cols
        for row in self.data:
            if row < 0 or row >= limit:
                raise DimensionError(f"Ligne {row} hors de {self.cols} colonnes")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls(size, size, tuple(1 << i for i in range(size)))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], cols: Optional[int] = None) -> "BitMatrix":
        if cols is None:
            if not rows:
                raise DimensionError("Nombre de colonnes requis pour une matrice vide")
            cols = rows[0].length
        for row in rows:
            if row.length != cols:
                raise DimensionError(f"Ligne de longueur {row.length} != {cols}")
        return cls(len(rows), cols, tuple(r.value for r in rows))

    @classmethod
    def from_lists(cls, lists: Sequence[Sequence[int]]) -> "BitMatrix":
        rows = [BitVector.from_bits(r) for r in lists]
        cols = len(lists[0]) if lists else 0
        return cls.from_rows(rows, cols)

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "BitMatrix":
        return cls(rows, cols, tuple(_random_int(cols, rng) for _ in range(rows)))

    @classmethod
    def from_bitvector(cls, rows: int, cols: int, bits: BitVector) -> "BitMatrix":
        """Remplissage ligne par ligne depuis un vecteur de rows*cols bits"""
        if bits.length != rows * cols:
            raise DimensionError(f"{bits.length} bits pour une matrice {rows}x{cols}")
        return cls(rows, cols, tuple(bits.slice(i * cols, (i + 1) * cols).value
                                     for i in range(rows)))

    def row(self, index: int) -> BitVector:
        return BitVector(self.cols, self.data[index])

    def row_vectors(self) -> List[BitVector]:
        return [BitVector(self.cols, r) for r in self.data]

    def entry(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def to_bitvector(self) -> BitVector:
        """Aplatissement ligne par ligne"""
        out = BitVector(0, 0)
        for r in self.data:
            out = out.concat(BitVector(self.cols, r))
        return out

    def to_array(self) -> np.ndarray:
        return np.array([[self.entry(i, j) for j in range(self.cols)]
                         for i in range(self.rows)], dtype=np.uint8).reshape(self.rows, self.cols)

    def transpose(self) -> "BitMatrix":
        data = []
        for j in range(self.cols):
            value = 0
            for i, r in enumerate(self.data):
                value |= ((r >> j) & 1) << i
            data.append(value)
        return BitMatrix(self.cols, self.rows, tuple(data))

    def with_row(self, index: int, row: BitVector) -> "BitMatrix":
        if row.length != self.cols:
            raise DimensionError(f"Ligne de longueur {row.length} != {self.cols}")
        data = list(self.data)
        data[index] = row.value
        return BitMatrix(self.rows, self.cols, tuple(data))

    def stack(self, other: "BitMatrix") -> "BitMatrix":
        """Empilement vertical"""
        if self.cols != other.cols:
            raise DimensionError(f"Colonnes incompatibles: {self.cols} != {other.cols}")
        return BitMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def __matmul__(self, other):
        if isinstance(other, BitVector):
            return matvec(self, other)
        if other.rows != self.cols:
            raise DimensionError(f"Produit {self.rows}x{self.cols} · {other.rows}x{other.cols}")
        cols_of_other = other.transpose()
        data = tuple(matvec(cols_of_other, BitVector(self.cols, r)).value for r in self.data)
        return BitMatrix(self.rows, other.cols, data)


# =============================================================================
# Élimination de Gauss
# =============================================================================

def _reduce(rows: List[int], cols: int) -> List[int]:
    """Forme échelonnée réduite en place ; retourne les colonnes pivots"""
    pivots = []
    r = 0
    for c in range(cols):
        bit = 1 << c
        pivot = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def rank(matrix: BitMatrix) -> int:
    """Rang sur F2"""
    return len(_reduce(list(matrix.data), matrix.cols))


def kernel_basis(matrix: BitMatrix) -> List[BitVector]:
    """Base de {v : Mv = 0} ; taille = cols - rang"""
    rows = list(matrix.data)
    pivots = _reduce(rows, matrix.cols)
    pivot_set = set(pivots)

    basis = []
    for free in range(matrix.cols):
        if free in pivot_set:
            continue
        value = 1 << free
        for r, p in enumerate(pivots):
            if (rows[r] >> free) & 1:
                value |= 1 << p
        basis.append(BitVector(matrix.cols, value))
    return basis


def solve(matrix: BitMatrix, target: BitVector) -> Optional[BitVector]:
    """Une solution z de Mz = b, ou None si le système est incohérent"""
    if target.length != matrix.rows:
        raise DimensionError(f"Second membre de {target.length} bits pour {matrix.rows} lignes")

    aug_bit = 1 << matrix.cols
    rows = [r | (aug_bit if target[i] else 0) for i, r in enumerate(matrix.data)]
    pivots = _reduce(rows, matrix.cols)

    for r in rows[len(pivots):]:
        if r & aug_bit:
            return None

    value = 0
    for r, p in enumerate(pivots):
        if rows[r] & aug_bit:
            value |= 1 << p
    return BitVector(matrix.cols, value)


def matvec(matrix: BitMatrix, x: BitVector) -> BitVector:
    """(Mx)_i = <ligne_i, x> sur F2"""
    if x.length != matrix.cols:
        raise DimensionError(f"Vecteur de {x.length} bits pour {matrix.cols} colonnes")
    value = 0
    for i, r in enumerate(matrix.data):
        value |= ((r & x.value).bit_count() & 1) << i
    return BitVector(matrix.rows, value)


# =============================================================================
# Échantillonnage contraint
# =============================================================================

@dataclass
class SamplerStats:
    """Compteurs de l'échantillonneur par rejet"""
    attempts: int = 0
    accepted: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


def sample_orthogonal(d: BitVector, rng: np.random.Generator, parity: int = 0) -> BitVector:
    """Vecteur uniforme parmi {u : u·d = parity}"""
    u = BitVector.random(d.length, rng)
    if u.dot(d) != parity:
        pivot = d.lowest_set_bit()
        if pivot < 0:
            raise InfeasibleConstraintError("u·0 = 1 n'a pas de solution")
        u = u.flip(pivot)
    return u


def sample_rank_constrained(
    rows: int,
    cols: int,
    annihilated: Optional[BitVector],
    target_rank: int,
    rng: np.random.Generator,
    max_attempts: int = 10000,
    stats: Optional[SamplerStats] = None
) -> BitMatrix:
    """
    Matrice uniforme de rang target_rank avec M·annihilated = 0

    Chaque ligne est tirée uniformément dans l'orthogonal de annihilated,
    puis la matrice est rejetée tant que son rang diffère de la cible.
    Contrainte vide si annihilated est absent ou nul.
    """
    if target_rank < 0 or target_rank > min(rows, cols):
        raise InfeasibleConstraintError(
            f"Rang {target_rank} impossible pour {rows}x{cols}"
        )
    constrained = annihilated is not None and not annihilated.is_zero()
    if constrained:
        if annihilated.length != cols:
            raise DimensionError(f"Vecteur annulé de {annihilated.length} bits pour {cols} colonnes")
        if target_rank > cols - 1:
            raise InfeasibleConstraintError(
                f"Rang {target_rank} incompatible avec un noyau non trivial ({cols} colonnes)"
            )

    for _ in range(max_attempts):
        if constrained:
            data = tuple(sample_orthogonal(annihilated, rng).value for _ in range(rows))
        else:
            data = tuple(_random_int(cols, rng) for _ in range(rows))
        candidate = BitMatrix(rows, cols, data)
        if stats is not None:
            stats.attempts += 1
        if rank(candidate) == target_rank:
            if stats is not None:
                stats.accepted += 1
            return candidate

    raise InfeasibleConstraintError(
        f"Aucune matrice de rang {target_rank} après {max_attempts} tirages"
    )


def enumerate_vectors(length: int) -> Iterator[BitVector]:
    """Tous les vecteurs de longueur donnée, par valeur croissante"""
    for value in range(1 << length):
        yield BitVector(length, value)
