"""Verification engine for the conjecture that p**2 never divides
H_p(x, y) = ((x+y)**p - x**p - y**p) / (p x y (x+y) (x**2+xy+y**2)**eps)."""

from .modmath import NotInvertible, inv_mod, is_prime, mul_mod, p_adic_valuation, pow_mod, primes_in_range
from .poly import (
    BigPoly,
    InexactDivision,
    ModPoly,
    PrimeCase,
    WTable,
    epsilon_division_check,
    epsilon_for,
    f_p_over_p_coeffs,
    g_coeffs_mod,
    h_coeffs_mod,
    verify_identity_eq2,
    w_table,
)
from .verifier import (
    ConjectureReport,
    DenominatorNotInvertible,
    SuspiciousResidue,
    WieferichRecord,
    eval_h_direct,
    eval_h_horner,
    stage1_scan,
    teichmuller_lift,
    verify_conjecture,
    wieferich_check,
)

__version__ = "0.1.0"
