"""Exact expected toss counts ``e[n]`` and their number-theoretic structure.

``e[n]`` is the expected number of fair tosses :func:`~fairtoss.sampler.draw_uniform`
spends choosing 1 of ``n``. Everything here is exact: values are
:class:`~fractions.Fraction` and the only floats are the continuous
(logarithmic) bounds.

Two independent routes compute ``e[n]`` for odd ``n``:

* :func:`expectation_exact` solves the round-by-round fixpoint with integer
  registers (the primary evaluator);
* :func:`expectation_residue` sums the residues ``2**i mod n`` over whole
  cycles of the multiplicative order of 2.

A third, :func:`fold_toss_recursion`, folds the per-toss continue
probabilities of :func:`residue_profile`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal, localcontext
from functools import lru_cache

from fairtoss.numtheory import (
    Fraction,
    ceil_log2,
    fermat,
    mersenne,
    min_exponent,
    mult_order2,
    odd_part,
)

__all__ = [
    "ExpectationReport",
    "Alg1State",
    "ResidueProfile",
    "PeakSpec",
    "BoundsReport",
    "render_decimal",
    "solve_rounds",
    "expectation_exact",
    "expectation",
    "expectation_residue",
    "no_decision_prob",
    "termination_prob",
    "residue_profile",
    "fold_toss_recursion",
    "peak_location",
    "peak_value",
    "peak_spec",
    "peak_echoes",
    "is_peak_location",
    "fermat_peak_value",
    "mersenne_bound_value",
    "bounds",
    "printed_summary_bound",
    "printed_mersenne_bound",
    "expectation_partition",
    "expectation_odd_man_out",
    "expectation_rejection",
]

DEFAULT_PLACES = 12


def render_decimal(q: Fraction, places: int = DEFAULT_PLACES) -> str:
    """Render ``q`` with ``places`` fractional digits, rounding half to even."""
    digits = len(str(abs(q.numerator) // q.denominator)) + places + 2
    with localcontext(Context(prec=digits, rounding=ROUND_HALF_EVEN)):
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return str(d.quantize(Decimal(1).scaleb(-places)))


@dataclass(frozen=True)
class ExpectationReport:
    n: int
    e: Fraction
    T: int

    @property
    def decimal(self) -> str:
        return render_decimal(self.e)

    def render(self, places: int = DEFAULT_PLACES) -> str:
        return render_decimal(self.e, places)


@dataclass(frozen=True)
class Alg1State:
    f: int
    g: int
    h: int
    r: int


def _compose(maps, lo, hi):
    # round i maps (f, g, h) -> (o f, o g + m o h, r h); store it as (o, m o, r)
    if hi - lo == 1:
        return maps[lo]
    mid = (lo + hi) // 2
    o1, a1, r1 = _compose(maps, lo, mid)
    o2, a2, r2 = _compose(maps, mid, hi)
    return o1 * o2, o2 * a1 + a2 * r1, r1 * r2


def solve_rounds(n: int) -> tuple[Alg1State, list[tuple[int, int]]]:
    """Run the integer fixpoint solver on odd ``n >= 3``.

    Registers start at ``f, g, h, r = 1, 0, 1, 1``; each round takes the
    least ``m`` with ``o = r 2**m > n`` and updates ``r <- o - n``,
    ``f <- f o``, ``g <- (g + m h) o``, ``h <- h r`` until ``r == 1``.
    Then ``e[n] == g / (f - h)``.

    The round updates are linear in ``(f, g, h)``, so they are composed in
    a balanced product tree instead of one at a time; cycles can be
    ``n - 1`` rounds long. Returns the final registers and the ``(m_i, r_i)``
    of each round.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    rounds, maps = [], []
    r = 1
    while True:
        m = min_exponent(n, r)
        o = r << m
        r = o - n
        rounds.append((m, r))
        maps.append((o, m * o, r))
        if r == 1:
            break
    f, g, h = _compose(maps, 0, len(maps))
    return Alg1State(f, g, h, r), rounds


@lru_cache(maxsize=8192)
def _odd_expectation(q: int) -> Fraction:
    if q == 1:
        return Fraction(0)
    state, _ = solve_rounds(q)
    return Fraction(state.g, state.f - state.h)


def expectation(n: int) -> Fraction:
    """``e[n]`` as a bare fraction. ``e[1] == 0`` and ``e[2n] == 1 + e[n]``."""
    a, q = odd_part(n)
    return a + _odd_expectation(q)


def expectation_exact(n: int) -> ExpectationReport:
    """``e[n]`` with the haupt exponent of its odd part."""
    a, q = odd_part(n)
    return ExpectationReport(n, a + _odd_expectation(q), mult_order2(q))


def expectation_residue(n: int, cycles: int = 1) -> Fraction:
    """``e[n]`` from the residues ``c_i = 2**i mod n`` over ``cycles`` periods.

    ``e = 2**T / (2**T - 1) * sum(c_i / 2**i for i < T)`` with ``T`` a
    multiple of the order of 2 mod ``n``; any multiple gives the same value.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    if cycles < 1:
        raise ValueError(f"cycles must be positive, got {cycles}")
    T = cycles * mult_order2(n)
    # s == sum(c_i * 2**(T-1-i)), so the residue sum is s / 2**(T-1)
    s, c = 0, 1
    for _ in range(T):
        s = 2 * s + c
        c = 2 * c % n
    return Fraction(2 * s, mersenne(T))


def no_decision_prob(n: int, t: int) -> Fraction:
    """Probability the optimal scheme is still undecided after ``t`` tosses."""
    if n < 1 or t < 0:
        raise ValueError(f"need n >= 1 and t >= 0, got n={n}, t={t}")
    return Fraction(pow(2, t, n), 1 << t)


def termination_prob(n: int, t: int) -> Fraction:
    """Probability the optimal scheme stops at exactly toss ``t >= 1``."""
    if n < 1 or t < 1:
        raise ValueError(f"need n >= 1 and t >= 1, got n={n}, t={t}")
    return Fraction(2 * pow(2, t - 1, n) - pow(2, t, n), 1 << t)


@dataclass(frozen=True)
class ResidueProfile:
    """Residues ``c_0..c_{T-1}`` and continue probabilities ``p_1..p_T``.

    ``p_i = c_i / (2 c_{i-1})`` is the chance of tossing again after toss ``i``.
    """

    n: int
    residues: tuple[int, ...]
    continue_probs: tuple[Fraction, ...]


def residue_profile(n: int) -> ResidueProfile:
    if n < 3 or n % 2 == 0:
        raise ValueError(f"n must be odd and >= 3, got {n}")
    T = mult_order2(n)
    c = [pow(2, i, n) for i in range(T + 1)]
    p = tuple(Fraction(c[i], 2 * c[i - 1]) for i in range(1, T + 1))
    return ResidueProfile(n, tuple(c[:T]), p)


def fold_toss_recursion(profile: ResidueProfile) -> Fraction:
    """Solve ``e = 1 + p_1(1 + p_2(... (1 + p_T e)))`` for ``e``."""
    # inside out: the nest equals alpha + beta * e
    alpha, beta = Fraction(0), Fraction(1)
    for p in reversed(profile.continue_probs):
        alpha, beta = 1 + p * alpha, p * beta
    return alpha / (1 - beta)


def peak_location(s: int, k: int) -> int:
    """Location ``F_{s(2k+1)} / F_s`` of the ``k``-th instance of peak series ``s``."""
    if s < 1 or k < 0:
        raise ValueError(f"need s >= 1 and k >= 0, got s={s}, k={k}")
    q, rem = divmod(fermat(s * (2 * k + 1)), fermat(s))
    assert rem == 0
    return q


def peak_value(s: int, k: int) -> Fraction:
    """Closed-form ``e`` at :func:`peak_location` ``(s, k)``, valid for ``k >= 1``.

    At ``k == 0`` the location is 1 and the formula gives ``2/F_s``, not ``e[1]``.
    """
    if s < 1 or k < 0:
        raise ValueError(f"need s >= 1 and k >= 0, got s={s}, k={k}")
    j = s * (2 * k + 1)
    return 2 * s * k + Fraction(s + 2, fermat(s)) - Fraction(j, fermat(j))


@dataclass(frozen=True)
class PeakSpec:
    s: int
    k: int
    location: int
    value: Fraction
    epoch: int


def peak_spec(s: int, k: int) -> PeakSpec:
    n = peak_location(s, k)
    return PeakSpec(s, k, n, peak_value(s, k), ceil_log2(n))


def is_peak_location(s: int, n: int) -> bool:
    k = 0
    while (loc := peak_location(s, k)) < n:
        k += 1
    return loc == n


def peak_echoes(s: int, start: int, count: int) -> list[int]:
    """Echoes of series-``s`` peaks, beginning at the peak location ``start``.

    The walk alternates ``s`` doublings ``n -> 2n`` with ``s`` steps
    ``n -> 2n - 1``; every ``2s``-th entry is the next :func:`peak_location`.
    """
    if s < 1 or count < 1:
        raise ValueError(f"need s >= 1 and count >= 1, got s={s}, count={count}")
    if not is_peak_location(s, start):
        raise ValueError(f"{start} is not a peak location of series s={s}")
    out = [start]
    n = start
    for i in range(count - 1):
        n = 2 * n if (i // s) % 2 == 0 else 2 * n - 1
        out.append(n)
    return out


def fermat_peak_value(m: int) -> Fraction:
    """``e[F_m] == 2 + m 2**m / F_m``."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    return 2 + Fraction(m << m, fermat(m))


def mersenne_bound_value(j: int) -> Fraction:
    """``e[F_j / 3] == j 2**j / F_j`` for odd ``j >= 3``."""
    if j < 3 or j % 2 == 0:
        raise ValueError(f"j must be odd and >= 3, got {j}")
    return Fraction(j << j, fermat(j))


@dataclass(frozen=True)
class BoundsReport:
    n: int
    lower_discrete: int
    upper_loose: int
    upper_sharp_discrete: Fraction
    lower_continuous: float
    upper_continuous: float
    j: int


def bounds(n: int) -> BoundsReport:
    """Discrete and continuous bounds on ``e[n]`` for ``n >= 2``.

    The sharp discrete bound is the epoch maximum: with ``m = ceil(log2 n)``
    it is ``1 + e[F_m / 3]`` for odd ``m`` (attained at ``2 F_m / 3``) and
    ``e[F_{m+1} / 3]`` for even ``m`` (attained at ``F_{m+1} / 3``). For
    ``m == 1`` it is only an upper bound.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    m = ceil_log2(n)
    j = m if m % 2 else m + 1
    value = Fraction(j << j, fermat(j)) + (m % 2)
    upper_cont = 2 + (n - 1) / n * math.log2(n - 1)
    return BoundsReport(n, m, m + 1, value, math.log2(n), upper_cont, j)


def printed_summary_bound(n: int) -> Fraction:
    """Alternative epoch bound ``2 + e[F_j/3] + m - j`` with ``j = m + 1 + (m mod 2)``.

    Valid but weaker than :func:`bounds` and not always below ``m + 1``.
    """
    m = ceil_log2(n)
    j = m + 1 + m % 2
    return 2 + mersenne_bound_value(j) + m - j


def printed_mersenne_bound(n: int) -> Fraction:
    """Stair-step bound: ``e[F_j/3]`` on epoch ``j - 2`` and ``1 + e[F_j/3]``
    on epoch ``j - 1``, for odd ``j``.

    Valid but weaker than :func:`bounds`.
    """
    m = ceil_log2(n)
    if m % 2:
        return mersenne_bound_value(m + 2)
    return 1 + mersenne_bound_value(m + 1)


def expectation_partition(n: int) -> Fraction:
    """Expected tosses of :func:`~fairtoss.sampler.draw_partition`.

    The draw is still running after ``t`` tosses exactly when its dyadic
    interval has a cell boundary ``i/n`` strictly inside, so the cost is
    the sum over ``t`` of those intervals' mass. From level ``m =
    ceil(log2 n)`` on each interval holds at most one boundary and the
    ``2**a - 1`` dyadic ones (``2**a`` the power-of-two part of ``n``)
    are gone, leaving a geometric tail ``(n - 2**a) / 2**(m - 1)``. For
    odd ``n`` this reduces to ``m + (n - 1) / 2**(m - 1)``.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    m = ceil_log2(n)
    a, _ = odd_part(n)
    total = Fraction(n - (1 << a), 1 << m) * 2
    for t in range(m):
        open_ = {(i << t) // n for i in range(1, n) if (i << t) % n}
        total += Fraction(len(open_), 1 << t)
    return total


def expectation_odd_man_out(n: int) -> int:
    if n < 3:
        raise ValueError(f"odd man out needs n >= 3, got {n}")
    return 1 << (n - 1)


def expectation_rejection(n: int, b: int) -> tuple[Fraction, Fraction]:
    """Expected ``(rounds, tosses)`` of :func:`~fairtoss.sampler.draw_rejection`."""
    if n < 1 or n > 1 << b:
        raise ValueError(f"need 1 <= n <= 2**b, got n={n}, b={b}")
    rounds = Fraction(1 << b, (1 << b) - (1 << b) % n)
    return rounds, b * rounds
