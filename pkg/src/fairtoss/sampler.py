"""Drawing 1 of n from fair coin tosses.

:func:`draw_uniform` is the toss-optimal scheme: it keeps every unused
outcome of a round as a carried remainder instead of discarding it.
The other three schemes are the usual inefficient baselines, kept so
their costs can be measured against the optimum.

Every draw returns a :class:`DrawTrace`. When a scripted source runs
dry mid-draw the :class:`~fairtoss.entropy.SourceExhausted` error
carries the partial trace, which is what :func:`enumerate_outcomes`
uses to walk the whole tree of toss sequences.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from fairtoss.entropy import ScriptedSource, SourceExhausted, SymbolSource

__all__ = [
    "Round",
    "DrawTrace",
    "draw_uniform",
    "draw_uniform_kary",
    "draw_odd_man_out",
    "draw_partition",
    "draw_rejection",
    "Enumeration",
    "enumerate_outcomes",
    "SCHEMES",
]


class Round(NamedTuple):
    """One batch of tosses: ``bits`` read, ``leftover`` outcomes left undecided."""

    bits: int
    leftover: int


@dataclass(frozen=True)
class DrawTrace:
    n: int
    choice: int | None
    bits_used: int
    rounds: tuple[Round, ...] = field(default=())
    radix: int = 2


def _exhausted(exc: SourceExhausted, n: int, used: int, rounds: list, radix: int = 2):
    exc.trace = DrawTrace(n, None, used, tuple(rounds), radix)
    return exc


def draw_uniform(n: int, source: SymbolSource) -> DrawTrace:
    """Draw uniformly from ``range(n)`` with the toss-optimal scheme.

    State is a value ``u`` uniform on ``[0, r)``, starting at ``r = 1``.
    Each round reads just enough bits ``w`` to make ``o = r * 2**m >= n``
    outcomes ``v = u * 2**m + w``; ``v < n`` is the answer, otherwise the
    top ``o - n`` outcomes carry over as the next ``(u, r)``.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    u, r, used = 0, 1, 0
    rounds: list[Round] = []
    while True:
        m = (-(-n // r) - 1).bit_length()  # least m with r * 2**m >= n
        try:
            w = source.next_bits(m)
        except SourceExhausted as exc:
            raise _exhausted(exc, n, used, rounds) from None
        used += m
        o = r << m
        v = (u << m) | w
        rounds.append(Round(m, o - n))
        if v < n:
            return DrawTrace(n, v, used, tuple(rounds))
        u, r = v - n, o - n


def draw_uniform_kary(n: int, radix: int, source: SymbolSource) -> DrawTrace:
    """:func:`draw_uniform` for a fair ``radix``-sided die.

    A round with ``o`` outcomes assigns ``o // n`` full groups of ``n``;
    only ``o mod n`` outcomes carry over.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if radix < 2:
        raise ValueError(f"radix must be >= 2, got {radix}")
    if source.radix != radix:
        raise ValueError(f"source radix {source.radix} != {radix}")
    u, r, used = 0, 1, 0
    rounds: list[Round] = []
    while True:
        m, o = 0, r
        while o < n:
            m += 1
            o *= radix
        try:
            w = source.next_symbols(m)
        except SourceExhausted as exc:
            raise _exhausted(exc, n, used, rounds, radix) from None
        used += m
        v = u * (o // r) + w
        assigned = (o // n) * n
        rounds.append(Round(m, o - assigned))
        if v < assigned:
            return DrawTrace(n, v % n, used, tuple(rounds), radix)
        u, r = v - assigned, o - assigned


def draw_odd_man_out(n: int, source: SymbolSource) -> DrawTrace:
    """Toss ``n`` coins per round; the index of the single odd coin wins."""
    if n < 3:
        raise ValueError(f"odd man out needs n >= 3, got {n}")
    used = 0
    rounds: list[Round] = []
    leftover = (1 << n) - 2 * n
    while True:
        try:
            v = source.next_bits(n)
        except SourceExhausted as exc:
            raise _exhausted(exc, n, used, rounds) from None
        used += n
        rounds.append(Round(n, leftover))
        ones = bin(v).count("1")
        if ones == 1:
            return DrawTrace(n, n - v.bit_length(), used, tuple(rounds))
        if ones == n - 1:
            z = ~v & ((1 << n) - 1)
            return DrawTrace(n, n - z.bit_length(), used, tuple(rounds))


def draw_partition(n: int, source: SymbolSource) -> DrawTrace:
    """Read tosses as binary digits of a point in [0, 1) until its cell is known.

    The dyadic interval ``[a/2**t, (a+1)/2**t)`` is refined one toss at a
    time and compared with the cells ``[i/n, (i+1)/n)`` in exact integers.
    Each toss is recorded as a one-bit round whose leftover is 1 while the
    interval still straddles a cell boundary.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    a, t = 0, 0
    rounds: list[Round] = []
    while True:
        i = (a * n) >> t
        if (a + 1) * n <= (i + 1) << t:
            return DrawTrace(n, i, t, tuple(rounds))
        try:
            bit = source.next_bit()
        except SourceExhausted as exc:
            raise _exhausted(exc, n, t, rounds) from None
        a = (a << 1) | bit
        t += 1
        rounds.append(Round(1, 1))


def draw_rejection(n: int, b: int, source: SymbolSource) -> DrawTrace:
    """Read ``b`` bits as ``R``; accept ``R mod n`` when ``R < n * floor(2**b / n)``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n > 1 << b:
        raise ValueError(f"need n <= 2**b, got n={n}, b={b}")
    limit = n * ((1 << b) // n)
    used = 0
    rounds: list[Round] = []
    while True:
        try:
            v = source.next_bits(b)
        except SourceExhausted as exc:
            raise _exhausted(exc, n, used, rounds) from None
        used += b
        rounds.append(Round(b, (1 << b) - limit))
        if v < limit:
            return DrawTrace(n, v % n, used, tuple(rounds))


SCHEMES: dict[str, Callable[..., DrawTrace]] = {
    "optimal": draw_uniform,
    "oddman": draw_odd_man_out,
    "partition": draw_partition,
    "rejection": draw_rejection,
}


@dataclass
class Enumeration:
    """Outcome of walking every toss script up to ``depth``.

    Masses are integers in units of ``radix**-depth``: a script decided
    after ``L`` tosses contributes ``radix**(depth - L)``. ``pending``
    lists the full-length scripts still undecided.
    """

    depth: int
    radix: int
    decided: Counter
    stopped: Counter
    pending: list

    @property
    def undecided(self) -> int:
        return len(self.pending)

    @property
    def total(self) -> int:
        return self.radix**self.depth


def enumerate_outcomes(
    draw: Callable[[SymbolSource], DrawTrace], depth: int, radix: int = 2
) -> Enumeration:
    """Exhaustively run ``draw`` on every script of length ``<= depth``.

    Scripts are grown one symbol at a time and only while the draw is
    still undecided, so the walk touches the undecided frontier rather
    than all ``radix**depth`` sequences.
    """
    decided: Counter = Counter()
    stopped: Counter = Counter()
    pending = []
    stack: list[tuple[int, ...]] = [()]
    while stack:
        script = stack.pop()
        try:
            trace = draw(ScriptedSource(list(script), radix))
        except SourceExhausted:
            if len(script) == depth:
                pending.append(script)
            else:
                stack.extend(script + (d,) for d in range(radix))
            continue
        weight = radix ** (depth - trace.bits_used)
        decided[trace.choice] += weight
        stopped[trace.bits_used] += weight
    return Enumeration(depth, radix, decided, stopped, pending)
