"""Integer primitives shared by the samplers and the analysis code.

Plain Python ``int`` is the arbitrary-precision natural and
:class:`fractions.Fraction` the exact rational; both are immutable and
``Fraction`` is always held in lowest terms.
"""

from fractions import Fraction

__all__ = [
    "Fraction",
    "mersenne",
    "fermat",
    "mult_order2",
    "min_exponent",
    "ceil_log2",
    "odd_part",
]


def mersenne(k: int) -> int:
    """Return ``2**k - 1``."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return (1 << k) - 1


def fermat(k: int) -> int:
    """Return ``2**k + 1`` (the ordinary, not the doubly exponential, kind)."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return (1 << k) + 1


def mult_order2(n: int) -> int:
    """Multiplicative order of 2 modulo odd ``n`` (the haupt exponent).

    Smallest ``T >= 1`` with ``n | 2**T - 1``. ``mult_order2(1) == 1``.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError(f"n must be odd and positive, got {n}")
    if n == 1:
        return 1
    t, c = 1, 2 % n
    while c != 1:
        c = (c << 1) % n
        t += 1
    return t


def min_exponent(n: int, r: int) -> int:
    """Smallest ``m >= 0`` with ``r * 2**m > n`` (strict)."""
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")
    if r > n:
        return 0
    # r * 2**m > n  <=>  2**m > n // r
    return (n // r).bit_length()


def ceil_log2(n: int) -> int:
    """``ceil(log2(n))`` for ``n >= 1``, exactly."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return (n - 1).bit_length()


def odd_part(n: int) -> tuple[int, int]:
    """Split ``n >= 1`` as ``(a, q)`` with ``n == 2**a * q`` and ``q`` odd."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    a = (n & -n).bit_length() - 1
    return a, n >> a
