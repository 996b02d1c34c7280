"""Fair-symbol sources with exact consumption accounting.

Every sampler reads its randomness through the small interface defined
here, so the number of coin tosses a draw costs is observable and any
draw can be replayed from a seed or a literal toss script.

The seeded generator is SplitMix64 (Steele, Lea & Flood 2014, the
seeding generator of xoshiro). Each 64-bit output word is consumed
most-significant bit first; ``tests/data/splitmix64_golden.json`` pins
the exact stream.
"""

from __future__ import annotations

__all__ = [
    "SourceExhausted",
    "SymbolSource",
    "BitSource",
    "SeededBitSource",
    "SeededSymbolSource",
    "ScriptedSource",
    "CountingSource",
    "splitmix64",
    "make_source",
    "next_bits",
]

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


class SourceExhausted(Exception):
    """A scripted source ran out of symbols.

    Samplers re-raise it with ``trace`` set to the partial draw (``choice``
    is ``None``) so enumeration harnesses can tell where a script stopped.
    """

    def __init__(self, message: str = "script exhausted", trace=None):
        super().__init__(message)
        self.trace = trace


def splitmix64(seed: int):
    """Yield the SplitMix64 output stream for ``seed`` (taken mod 2**64)."""
    state = seed & _MASK64
    while True:
        state = (state + _GAMMA) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


class SymbolSource:
    """Uniform, independent symbols from ``range(radix)``.

    Subclasses implement :meth:`next_symbol`; :meth:`next_symbols` packs
    ``k`` successive symbols most-significant first.
    """

    radix: int = 2

    def next_symbol(self) -> int:
        raise NotImplementedError

    def next_symbols(self, k: int) -> int:
        if k < 0:
            raise ValueError(f"k must be non-negative, got {k}")
        v = 0
        for _ in range(k):
            v = v * self.radix + self.next_symbol()
        return v


class BitSource(SymbolSource):
    """A fair coin: a :class:`SymbolSource` with ``radix == 2``."""

    radix = 2

    def next_bit(self) -> int:
        return self.next_symbol()

    def next_bits(self, k: int) -> int:
        return self.next_symbols(k)


class SeededBitSource(BitSource):
    """Deterministic fair bits from SplitMix64."""

    def __init__(self, seed: int):
        self.seed = seed
        self._words = splitmix64(seed)
        self._word = 0
        self._avail = 0

    def next_symbol(self) -> int:
        if not self._avail:
            self._word = next(self._words)
            self._avail = 64
        self._avail -= 1
        return (self._word >> self._avail) & 1

    def next_symbols(self, k: int) -> int:
        if k < 0:
            raise ValueError(f"k must be non-negative, got {k}")
        v = 0
        while k:
            if not self._avail:
                self._word = next(self._words)
                self._avail = 64
            take = min(k, self._avail)
            self._avail -= take
            v = (v << take) | ((self._word >> self._avail) & ((1 << take) - 1))
            k -= take
        return v


class SeededSymbolSource(SymbolSource):
    """Deterministic fair ``radix``-ary symbols.

    Each symbol reads ``ceil(log2(radix))`` bits from a
    :class:`SeededBitSource` and rejects values ``>= radix``. With
    ``radix == 2`` the stream equals the bit source's.
    """

    def __init__(self, seed: int, radix: int):
        if radix < 2:
            raise ValueError(f"radix must be >= 2, got {radix}")
        self.seed = seed
        self.radix = radix
        self._bits = SeededBitSource(seed)
        self._width = (radix - 1).bit_length()

    def next_symbol(self) -> int:
        while True:
            v = self._bits.next_bits(self._width)
            if v < self.radix:
                return v


class ScriptedSource(SymbolSource):
    """Replays a literal script of digits, then raises :class:`SourceExhausted`.

    A multi-symbol read that would run past the end raises without
    consuming anything.
    """

    def __init__(self, script: str | list[int], radix: int = 2):
        if radix < 2 or radix > len(_DIGITS):
            raise ValueError(f"radix must be in [2, {len(_DIGITS)}], got {radix}")
        if isinstance(script, str):
            symbols = []
            for ch in script.strip().lower():
                d = _DIGITS.find(ch)
                if d < 0 or d >= radix:
                    raise ValueError(f"bad script character {ch!r} for radix {radix}")
                symbols.append(d)
        else:
            symbols = list(script)
            if any(not 0 <= d < radix for d in symbols):
                raise ValueError(f"script symbols must lie in [0, {radix})")
        self.radix = radix
        self.script = tuple(symbols)
        self.pos = 0

    @property
    def remaining(self) -> int:
        return len(self.script) - self.pos

    def next_symbol(self) -> int:
        if self.pos >= len(self.script):
            raise SourceExhausted(f"script exhausted after {self.pos} symbols")
        self.pos += 1
        return self.script[self.pos - 1]

    def next_symbols(self, k: int) -> int:
        if k < 0:
            raise ValueError(f"k must be non-negative, got {k}")
        if k > self.remaining:
            raise SourceExhausted(
                f"script exhausted: wanted {k} symbols at position {self.pos}, "
                f"{self.remaining} left"
            )
        return super().next_symbols(k)

    # bit-source spellings, so a radix-2 script passes wherever a coin is expected
    next_bit = next_symbol
    next_bits = next_symbols


class CountingSource(BitSource):
    """Wraps a source and counts the symbols it delivers."""

    def __init__(self, inner: SymbolSource):
        self.inner = inner
        self.radix = inner.radix
        self.consumed = 0

    def next_symbol(self) -> int:
        v = self.inner.next_symbol()
        self.consumed += 1
        return v

    def next_symbols(self, k: int) -> int:
        v = self.inner.next_symbols(k)
        self.consumed += k
        return v


def next_bits(source: SymbolSource, k: int) -> int:
    """Read ``k`` symbols from ``source`` as one integer, most significant first."""
    return source.next_symbols(k)


def make_source(kind: str, value, radix: int = 2) -> SymbolSource:
    """Build a ``"seeded"`` or ``"scripted"`` source.

    ``value`` is the integer seed or the script string.
    """
    if kind == "seeded":
        if radix == 2:
            return SeededBitSource(int(value))
        return SeededSymbolSource(int(value), radix)
    if kind == "scripted":
        if not value:
            raise ValueError("script must be non-empty")
        return ScriptedSource(value, radix)
    raise ValueError(f"unknown source kind {kind!r}")
