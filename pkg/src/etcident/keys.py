"""Keyed random streams for the two-layer block cipher.

Two 64-bit seeds expand into four independent streams:

* ``K0`` — layer-1 block permutation, derived from ``k0`` only.
* ``K1`` — layer-2 (tail) block permutation, derived from ``k``.
* ``K2`` — per-block dihedral transform draws, derived from ``k``.
* ``K3`` — per-block negative-positive bits, derived from ``k``.

Each stream is an xoshiro256** generator whose state is filled by
splitmix64 from ``seed XOR tag``, with one fixed tag per stream.  The
construction is deliberately pinned so that ciphertexts are reproducible
bit-for-bit across implementations and platforms; it makes no claim of
cryptographic strength.
"""

from __future__ import annotations

from dataclasses import dataclass

_MASK64 = (1 << 64) - 1

# Distinct 64-bit domain-separation tags (multiples of the splitmix64
# increment, so nearby seeds never alias across streams).
STREAM_TAGS = {
    "K0": 0x9E3779B97F4A7C15,
    "K1": 0x3C6EF372FE94F82A,
    "K2": 0xDAA66D2C7DDF743F,
    "K3": 0x78DDE6E5FD29F054,
}


def splitmix64(state: int) -> tuple[int, int]:
    """Advance one splitmix64 step; returns (next_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator with splitmix64 state seeding.

    Instances are cheap; every cipher operation creates a fresh one so a
    stream always replays from its start.
    """

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        state = seed & _MASK64
        state, self._s0 = splitmix64(state)
        state, self._s1 = splitmix64(state)
        state, self._s2 = splitmix64(state)
        state, self._s3 = splitmix64(state)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def randbelow(self, n: int) -> int:
        """Uniform-ish draw in [0, n) via modulo reduction (fixed rule)."""
        if n <= 0:
            raise ValueError(f"randbelow needs n >= 1, got {n}")
        return self.next_u64() % n

    def randbit(self) -> int:
        return self.next_u64() & 1


@dataclass(frozen=True)
class KeySet:
    """Seed pair (k0, k); streams are re-derived on demand, never stored."""

    k0: int
    k: int

    def __post_init__(self):
        for name in ("k0", "k"):
            v = getattr(self, name)
            if not 0 <= v <= _MASK64:
                raise ValueError(f"seed {name} must be an unsigned 64-bit integer, got {v}")

    def stream(self, name: str) -> Xoshiro256StarStar:
        """Fresh generator for stream K0/K1/K2/K3, replayed from the start."""
        tag = STREAM_TAGS[name]
        base = self.k0 if name == "K0" else self.k
        return Xoshiro256StarStar((base ^ tag) & _MASK64)


def derive_keys(k0: int, k: int) -> KeySet:
    """Build a KeySet from the two 64-bit seeds."""
    return KeySet(k0=k0, k=k)
