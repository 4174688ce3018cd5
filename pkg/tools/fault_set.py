"""Fixed-width vertex sets stored as integer bit vectors."""

from dataclasses import dataclass
from typing import Iterable, Iterator, List

import numpy as np

from tools.errors import ValidationError


def _bits_to_array(bits: int, universe: int) -> np.ndarray:
    nbytes = max(1, (universe + 7) // 8)
    raw = np.frombuffer(bits.to_bytes(nbytes, 'little'), dtype=np.uint8)
    return np.unpackbits(raw, bitorder='little')[:universe].astype(bool)


def _array_to_bits(flags: np.ndarray) -> int:
    return int.from_bytes(np.packbits(flags, bitorder='little').tobytes(), 'little')


@dataclass(frozen=True)
class FaultSet:
    """A vertex subset of a graph with ``universe`` vertices.

    Bit ``v`` of ``bits`` is set iff vertex ``v`` is a member. All set algebra
    is exact integer arithmetic; both operands must share the universe.
    """

    bits: int
    universe: int

    def __post_init__(self):
        if self.universe < 0:
            raise ValidationError(f"universe must be non-negative, got {self.universe}")
        if self.bits < 0 or self.bits >> self.universe:
            raise ValidationError(f"vertex set exceeds universe of {self.universe} vertices")

    @classmethod
    def of(cls, universe: int, vertices: Iterable[int]) -> "FaultSet":
        ids = np.fromiter((int(v) for v in vertices), dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= universe):
            bad = ids[(ids < 0) | (ids >= universe)][0]
            raise ValidationError(f"vertex id {bad} out of range 0..{universe - 1}")
        flags = np.zeros(universe, dtype=bool)
        flags[ids] = True
        return cls(_array_to_bits(flags) if universe else 0, universe)

    @classmethod
    def empty(cls, universe: int) -> "FaultSet":
        return cls(0, universe)

    @classmethod
    def full(cls, universe: int) -> "FaultSet":
        return cls((1 << universe) - 1, universe)

    def _check(self, other: "FaultSet") -> None:
        if not isinstance(other, FaultSet):
            raise TypeError(f"expected FaultSet, got {type(other).__name__}")
        if other.universe != self.universe:
            raise ValidationError(
                f"vertex sets over different graphs ({self.universe} vs {other.universe} vertices)")

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, vertex: int) -> bool:
        return 0 <= vertex < self.universe and (self.bits >> vertex) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        if self.universe <= 256:
            bits = self.bits
            while bits:
                low = bits & -bits
                yield low.bit_length() - 1
                bits ^= low
        else:
            yield from (int(v) for v in np.flatnonzero(_bits_to_array(self.bits, self.universe)))

    def members(self) -> List[int]:
        return list(self)

    def to_array(self) -> np.ndarray:
        return _bits_to_array(self.bits, self.universe)

    def __or__(self, other: "FaultSet") -> "FaultSet":
        self._check(other)
        return FaultSet(self.bits | other.bits, self.universe)

    def __and__(self, other: "FaultSet") -> "FaultSet":
        self._check(other)
        return FaultSet(self.bits & other.bits, self.universe)

    def __sub__(self, other: "FaultSet") -> "FaultSet":
        self._check(other)
        return FaultSet(self.bits & ~other.bits, self.universe)

    def __xor__(self, other: "FaultSet") -> "FaultSet":
        self._check(other)
        return FaultSet(self.bits ^ other.bits, self.universe)

    def __le__(self, other: "FaultSet") -> bool:
        self._check(other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other: "FaultSet") -> bool:
        return self <= other and self.bits != other.bits

    def complement(self) -> "FaultSet":
        return FaultSet(((1 << self.universe) - 1) & ~self.bits, self.universe)

    union = __or__
    intersection = __and__
    difference = __sub__
    symmetric_difference = __xor__
    issubset = __le__

    def sort_key(self):
        """Lexicographic order on the ascending member list."""
        return tuple(self)

    def __repr__(self) -> str:
        shown = self.members() if len(self) <= 32 else f"{len(self)} vertices"
        return f"FaultSet({shown})"
