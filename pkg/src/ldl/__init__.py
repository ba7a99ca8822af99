"""Lower-order terms in the 1-level density of elliptic-curve L-function
families: prime-sum constants, family moment data, and the numerical
explicit-formula decomposition."""

from .constants import (FamilyLowerOrder, aggregate_lower_order,
                        compute_constant, exact_cancellation_check,
                        family_constant_Atilde)
from .errors import (DomainError, IncompleteSumError, ResourceError,
                     VerificationError)
from .explicit_formula import (SDecomposition, TestFunctionPair,
                               builtin_test_pair, conductor_term,
                               evaluate_S, rmt_prediction)
from .families import (BUILTIN_FAMILIES, FamilySpec, MomentTable, a_t_p,
                       a_tilde, closed_form_moment, complete_moment,
                       get_family, h_factor, load_family, moment_table,
                       nu_D, rank_bias, reduction_type, sieve_window)
from .primes import (ConstantResult, first_n_primes, gamma_pnt,
                     gamma_pnt_ab, get_table, is_prime, jacobi_symbol,
                     legendre_symbol, sieve_primes)
from .series import (g_moment, hecke_power_expansion, moment_sequence,
                     polylog_identity_check, polylog_neg)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
