"""Exact arithmetic in towers of real quadratic field extensions of Q,
with executable constructibility verdicts for rational cubics."""

from .errors import (
    DivisionByZero,
    InvalidTower,
    LevelMismatch,
    NonRealExtension,
    NotAProperExtension,
    NotASquareInTower,
    ParseError,
    QTowerError,
    TowerFormatError,
)
from .exactnum import (
    BigRational,
    divisors,
    format_rational,
    parse_rational,
    rat_arith,
    rational_square_root,
)
from .parser import eval_expr, format_expr, parse_expr, parse_poly, tokenize
from .poly import (
    Outcome,
    Polynomial,
    Verdict,
    conjugate_root,
    constructible_root_verdict,
    descend_cubic_root,
    poly_eval,
    rational_roots_cubic,
    rrt_candidates,
)
from .tower import (
    BasisDescriptor,
    Tower,
    TowerElement,
    ValidationReport,
    dumps_tower,
    format_element_text,
    load_tower,
    loads_tower,
    parse_element_text,
    save_tower,
)

__version__ = "0.1.0"
