"""rainbowlab: desk-scale search and verification for rainbow matchings
in k-partite tuple families.

Subpackages cover the core family model and file format (core, fileio),
exact rainbow-matching search and saturation (search, kernels), the
satisfying-sequence oracle and closed-form thresholds (sequences), shift
compression diagnostics (shifting), spread approximation (spread),
random perfect matchings and concentration experiments (matchings), and
the k=2 polynomial-method certificates (polynomial).
"""

__version__ = "0.1.0"

from .core import (
    BudgetExhaustedError,
    Family,
    FamilySystem,
    InvalidInputError,
    RainbowlabError,
    TupleMultiset,
    Universe,
    disjoint,
    hyperplane,
    multiset_sum,
)
from .fileio import ParseError, format_system, parse_system, read_system, write_system
from .search import (
    GreedyResult,
    RainbowMatching,
    SearchBudget,
    SearchResult,
    construct_stripe,
    find_rainbow,
    greedy_extract,
    saturate,
)
from .sequences import (
    BoundReport,
    MinimalCResult,
    SequenceSpec,
    Verdict,
    arithmetic_spec,
    falsify_random,
    is_satisfying,
    minimal_c_search,
    t_bound,
    threshold_report,
)

__all__ = [
    "BoundReport",
    "BudgetExhaustedError",
    "Family",
    "FamilySystem",
    "GreedyResult",
    "InvalidInputError",
    "MinimalCResult",
    "ParseError",
    "RainbowMatching",
    "RainbowlabError",
    "SearchBudget",
    "SearchResult",
    "SequenceSpec",
    "TupleMultiset",
    "Universe",
    "Verdict",
    "arithmetic_spec",
    "construct_stripe",
    "disjoint",
    "falsify_random",
    "find_rainbow",
    "format_system",
    "greedy_extract",
    "hyperplane",
    "is_satisfying",
    "minimal_c_search",
    "multiset_sum",
    "parse_system",
    "read_system",
    "saturate",
    "t_bound",
    "threshold_report",
    "write_system",
    "__version__",
]
