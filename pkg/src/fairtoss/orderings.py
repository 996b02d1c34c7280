"""Fair random orderings by drawing 1 of k! at once.

Drawing the whole permutation index in one optimal draw never costs more
tosses than choosing 1 of k, then 1 of k-1, and so on, because
``e[ab] <= e[a] + e[b]``. :func:`ordering_cost_comparison` puts exact
numbers on the saving.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from fairtoss.analysis import expectation
from fairtoss.entropy import SymbolSource
from fairtoss.numtheory import Fraction
from fairtoss.sampler import draw_uniform

__all__ = [
    "Permutation",
    "lehmer_decode",
    "lehmer_encode",
    "draw_permutation",
    "ordering_cost_comparison",
    "subadditivity_gap",
    "strictness_scan",
]


@dataclass(frozen=True)
class Permutation:
    k: int
    mapping: tuple[int, ...]

    def __str__(self) -> str:
        return ",".join(map(str, self.mapping))


def lehmer_decode(v: int, k: int) -> Permutation:
    """Map ``v`` in ``[0, k!)`` to a permutation of ``range(k)``.

    The factorial-base digits of ``v``, most significant first, index into
    the list of still-unused items; ``0`` is the identity and ``k! - 1``
    the reversal.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if not 0 <= v < factorial(k):
        raise ValueError(f"v must lie in [0, {k}!), got {v}")
    items = list(range(k))
    out = []
    for i in range(k - 1, -1, -1):
        d, v = divmod(v, factorial(i))
        out.append(items.pop(d))
    return Permutation(k, tuple(out))


def lehmer_encode(perm) -> int:
    mapping = perm.mapping if isinstance(perm, Permutation) else tuple(perm)
    k = len(mapping)
    items = list(range(k))
    v = 0
    for i, x in enumerate(mapping):
        d = items.index(x)
        items.pop(d)
        v += d * factorial(k - 1 - i)
    return v


def draw_permutation(k: int, source: SymbolSource) -> tuple[Permutation, int]:
    """Uniform random permutation of ``range(k)``; returns it with the bits spent."""
    trace = draw_uniform(factorial(k), source)
    return lehmer_decode(trace.choice, k), trace.bits_used


def ordering_cost_comparison(k: int) -> tuple[Fraction, Fraction]:
    """Expected tosses ``(joint, sequential)``: ``e[k!]`` versus ``sum(e[i], i=2..k)``."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    joint = expectation(factorial(k))
    sequential = sum((expectation(i) for i in range(2, k + 1)), Fraction(0))
    return joint, sequential


def subadditivity_gap(a: int, b: int) -> Fraction:
    """``e[a] + e[b] - e[ab]``, never negative."""
    if a < 1 or b < 1:
        raise ValueError(f"a and b must be positive, got a={a}, b={b}")
    return expectation(a) + expectation(b) - expectation(a * b)


def strictness_scan(limit: int = 63) -> list[tuple[int, int]]:
    """Odd pairs ``3 <= a <= b <= limit`` whose subadditivity gap is zero."""
    return [
        (a, b)
        for a in range(3, limit + 1, 2)
        for b in range(a, limit + 1, 2)
        if subadditivity_gap(a, b) == 0
    ]
