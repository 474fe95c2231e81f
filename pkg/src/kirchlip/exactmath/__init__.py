"""Exact arithmetic foundations: integers, rationals, polynomials, Smith form."""
from .arith import (
    CongruenceSystem,
    crt_solve,
    ext_gcd,
    gcd_all,
    integer_bezout,
    is_squarefree,
    least_abs_residue,
    mod_inverse,
    p_adic_order,
    prime_divisors,
    trial_factor,
)
from .linalg import (
    SmithForm,
    det,
    identity,
    is_zero_matrix,
    matmul,
    matvec,
    rank,
    resultant,
    resultant_cofactors,
    smith_normal_form,
    solve_integer,
    sylvester,
    transpose,
)
from .poly import IntegerPolynomial, RationalPolynomial, split

__all__ = [
    "CongruenceSystem",
    "IntegerPolynomial",
    "RationalPolynomial",
    "SmithForm",
    "crt_solve",
    "det",
    "ext_gcd",
    "gcd_all",
    "identity",
    "integer_bezout",
    "is_squarefree",
    "is_zero_matrix",
    "least_abs_residue",
    "matmul",
    "matvec",
    "mod_inverse",
    "p_adic_order",
    "prime_divisors",
    "rank",
    "resultant",
    "resultant_cofactors",
    "smith_normal_form",
    "solve_integer",
    "split",
    "sylvester",
    "transpose",
    "trial_factor",
]
