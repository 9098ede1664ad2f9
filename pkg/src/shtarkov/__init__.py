"""Worst-case redundancy of source classes: exact Shtarkov sums for small
classes, Poisson-length sampling, and envelope-class bounds."""

from .classes import (
    BudgetExceeded,
    FiniteClass,
    FiniteDistribution,
    shtarkov_iid_types,
    shtarkov_sum_explicit,
)
from .envelope import (
    Envelope,
    NotSummable,
    bgg09_upper,
    exponential_closed_bounds,
    l_f,
    power_law_closed_bounds,
    single_letter_interval,
)
from .iid_small import SmallAlphabetQuery, iid_exact, iid_lower_chain, iid_upper_bound
from .poisson_class import closed_form_bounds_bounded_poisson, shtarkov_bounded_poisson
from .poissonization import IidFamily, PoissonizedClassHandle, poissonized_shtarkov
from .results import RedundancyInterval

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded", "Envelope", "FiniteClass", "FiniteDistribution", "IidFamily", "NotSummable",
    "PoissonizedClassHandle", "RedundancyInterval", "SmallAlphabetQuery", "bgg09_upper",
    "closed_form_bounds_bounded_poisson", "exponential_closed_bounds", "iid_exact", "iid_lower_chain",
    "iid_upper_bound", "l_f", "poissonized_shtarkov", "power_law_closed_bounds",
    "shtarkov_bounded_poisson", "shtarkov_iid_types", "shtarkov_sum_explicit", "single_letter_interval",
]
