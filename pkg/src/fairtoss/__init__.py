"""Fair, toss-optimal choice of 1 of n from a stream of coin flips.

Drawing lives in :mod:`fairtoss.sampler`, exact expected-cost analysis in
:mod:`fairtoss.analysis`, randint bias audits in :mod:`fairtoss.audit`
and random orderings in :mod:`fairtoss.orderings`.
"""

from fairtoss.analysis import expectation_exact
from fairtoss.entropy import SourceExhausted, make_source
from fairtoss.sampler import draw_uniform

__all__ = ["draw_uniform", "expectation_exact", "make_source", "SourceExhausted"]
__version__ = "0.1.0"
