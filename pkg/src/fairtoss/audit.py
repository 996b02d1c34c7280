"""Lucky numbers: the bias of randint built from a finite budget of bits.

Two idioms are audited, both fed ``b`` fair bits ``x`` in ``[0, 2**b)``:

``floor``   ``q = floor(n * x / 2**b)``, i.e. ``floor(n * random())`` on the
            exact grid ``x / 2**b``
``modulo``  ``q = x mod n``

The exact per-ticket counts come from closed-form integer expressions;
nothing on the exact path touches floating point.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import chi2

from fairtoss.entropy import SymbolSource
from fairtoss.numtheory import Fraction, mersenne, odd_part
from fairtoss.sampler import SCHEMES

__all__ = [
    "LuckyReport",
    "EmpiricalReport",
    "exact_float_counts",
    "exact_mod_counts",
    "lucky_ratio",
    "residue_fold",
    "empirical_frequencies",
    "chi_square",
    "CHI2_P",
    "MAPPINGS",
]

CHI2_P = 0.001
MAPPINGS = ("floor", "modulo", "native-float")
_INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class LuckyReport:
    n: int
    b: int
    mapping: str
    counts: tuple[int, ...]
    lucky: tuple[int, ...]
    unlucky: tuple[int, ...]
    ratio: Fraction
    residue_pattern: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "b": self.b,
            "mapping": self.mapping,
            "counts": list(self.counts),
            "lucky": list(self.lucky),
            "ratio_num": self.ratio.numerator,
            "ratio_den": self.ratio.denominator,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _mersenne_exponent(q: int) -> int | None:
    k = q.bit_length()
    return k if k >= 2 and q == mersenne(k) else None


def _report(n: int, b: int, mapping: str, counts: list[int]) -> LuckyReport:
    hi, lo = max(counts), min(counts)
    if hi == lo:
        lucky = unlucky = ()
    else:
        lucky = tuple(q for q, c in enumerate(counts) if c == hi)
        unlucky = tuple(q for q, c in enumerate(counts) if c == lo)
    pattern = None
    k = _mersenne_exponent(odd_part(n)[1])
    if k is not None:
        pattern = tuple(residue_fold_counts(counts, mersenne(k)))
    return LuckyReport(n, b, mapping, tuple(counts), lucky, unlucky, Fraction(hi, lo), pattern)


def _check(n: int, b: int) -> None:
    if b < 0:
        raise ValueError(f"b must be non-negative, got {b}")
    if n < 1 or n > 1 << b:
        raise ValueError(f"need 1 <= n <= 2**b, got n={n}, b={b}")


def exact_float_counts(n: int, b: int) -> LuckyReport:
    """Exact ticket counts of ``floor(n * x / 2**b)`` over all ``2**b`` grid points.

    ``counts[q] = ceil((q+1) 2**b / n) - ceil(q 2**b / n)``.
    """
    _check(n, b)
    if n << b < _INT64_SAFE:
        q = np.arange(n + 1, dtype=np.int64)
        counts = np.diff(-(-(q << b) // n)).tolist()
    else:
        edges = [-(-(q << b) // n) for q in range(n + 1)]
        counts = [hi - lo for lo, hi in zip(edges, edges[1:])]
    return _report(n, b, "floor", counts)


def exact_mod_counts(n: int, b: int) -> LuckyReport:
    """Exact ticket counts of ``x mod n``: ``floor((2**b - q - 1) / n) + 1``.

    The lucky tickets are ``q < 2**b mod n``.
    """
    _check(n, b)
    base, extra = divmod(1 << b, n)
    counts = [base + 1] * extra + [base] * (n - extra)
    return _report(n, b, "modulo", counts)


def lucky_ratio(a: int, k: int, b: int) -> Fraction:
    """Predicted max/min count ratio ``(c+1)/c`` of the floor idiom at ``n = 2**a M_k``.

    ``c = floor(2**(b-a) / M_k)``; requires ``k >= 2``, ``a + k <= b`` and
    ``k | b - a``.
    """
    if a < 0 or k < 2 or a + k > b or (b - a) % k:
        raise ValueError(f"need a >= 0, k >= 2, a + k <= b, k | b - a; got a={a}, k={k}, b={b}")
    c = (1 << (b - a)) // mersenne(k)
    return Fraction(c + 1, c)


def residue_fold_counts(counts, modulus: int) -> list[int]:
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    out = [0] * modulus
    for q, c in enumerate(counts):
        out[q % modulus] += c
    return out


def residue_fold(report: LuckyReport, modulus: int) -> list[int]:
    """Sum a report's counts by ticket residue mod ``modulus``."""
    return residue_fold_counts(report.counts, modulus)


def chi_square(observed, expected) -> float:
    return float(sum((o - e) ** 2 / e for o, e in zip(observed, expected) if e > 0))


@dataclass
class EmpiricalReport:
    scheme: str
    n: int
    trials: int
    histogram: list[int]
    expected: list[float]
    chi2: float
    dof: int
    threshold: float
    mean_bits: float
    exact: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.chi2 < self.threshold

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def empirical_frequencies(
    scheme: str, n: int, trials: int, source: SymbolSource, b: int | None = None
) -> EmpiricalReport:
    """Histogram ``trials`` draws and test them with Pearson's chi-square.

    ``scheme`` is a sampler name from :data:`~fairtoss.sampler.SCHEMES` or a
    mapping from :data:`MAPPINGS` (which needs ``b``). Samplers are tested
    against uniform, mappings against their exact predicted counts.
    ``native-float`` routes through a machine double built from the ``b``
    bits and is labelled non-exact.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    hist = [0] * n
    bits = 0
    if scheme in SCHEMES:
        if scheme == "rejection":
            bb = b if b is not None else (n - 1).bit_length()
            draw = lambda: SCHEMES[scheme](n, bb, source)  # noqa: E731
        else:
            draw = lambda: SCHEMES[scheme](n, source)  # noqa: E731
        for _ in range(trials):
            tr = draw()
            hist[tr.choice] += 1
            bits += tr.bits_used
        expected = [trials / n] * n
        exact = True
    elif scheme in MAPPINGS:
        if b is None:
            raise ValueError(f"mapping {scheme!r} needs b")
        _check(n, b)
        scale = 2.0**-b
        for _ in range(trials):
            x = source.next_bits(b)
            if scheme == "floor":
                q = (n * x) >> b
            elif scheme == "modulo":
                q = x % n
            else:
                q = int(n * (x * scale))
            hist[q] += 1
        bits = trials * b
        if scheme == "modulo":
            counts = exact_mod_counts(n, b).counts
        else:
            counts = exact_float_counts(n, b).counts
        expected = [trials * c / (1 << b) for c in counts]
        exact = scheme != "native-float"
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    dof = sum(1 for e in expected if e > 0) - 1
    stat = chi_square(hist, expected)
    threshold = float(chi2.ppf(1 - CHI2_P, dof)) if dof > 0 else float("inf")
    return EmpiricalReport(scheme, n, trials, hist, expected, stat, dof, threshold, bits / trials, exact)
