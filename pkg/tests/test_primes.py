"""Prime sieve, multiplicative symbols, and the prime-counting constants.

Oracles: sympy's isprime / legendre_symbol / jacobi_symbol, plus classic
prime-count checkpoints frozen from the literature.
"""

import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ldl import primes
from ldl.errors import DomainError

PRIMES_BELOW_100 = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43,
                    47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]

SOME_ODD_PRIMES = [3, 5, 7, 11, 13, 17, 101, 997, 10007, 104729]


def test_sieve_matches_known_primes():
    table = primes.sieve_primes(100)
    assert list(table.primes) == PRIMES_BELOW_100


def test_prime_counting_checkpoints():
    # pi(10^4) = 1229 and pi(10^6) = 78498
    assert primes.sieve_primes(10 ** 4).primes.size == 1229
    assert primes.sieve_primes(10 ** 6).primes.size == 78498


def test_first_n_primes():
    table = primes.first_n_primes(5000)
    assert table.primes.size == 5000
    assert int(table.primes[-1]) == 48611
    assert int(primes.first_n_primes(1).primes[0]) == 2


def test_get_table_is_grow_only():
    big = primes.get_table(10 ** 4)
    small = primes.get_table(100)
    assert int(small.primes[-1]) <= 100
    assert int(big.primes[-1]) <= 10 ** 4
    assert small.primes.size == len(PRIMES_BELOW_100)


def test_residue_class_partition():
    table = primes.get_table(10 ** 4)
    r1 = table.residue_class(1, 4)
    r3 = table.residue_class(3, 4)
    assert np.all(r1 % 4 == 1)
    assert np.all(r3 % 4 == 3)
    assert r1.size + r3.size == table.primes.size - 1  # all but p = 2


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_is_prime_matches_sympy(n):
    assert primes.is_prime(n) == sympy.isprime(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=-10 ** 6, max_value=10 ** 6),
       st.sampled_from(SOME_ODD_PRIMES))
def test_legendre_symbol_matches_sympy(a, p):
    assert primes.legendre_symbol(a, p) == sympy.legendre_symbol(a, p)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=-10 ** 6, max_value=10 ** 6),
       st.integers(min_value=1, max_value=10 ** 5).map(lambda n: 2 * n + 1))
def test_jacobi_symbol_matches_sympy(a, n):
    assert primes.jacobi_symbol(a, n) == sympy.jacobi_symbol(a, n)


def test_legendre_symbols_vec_matches_scalar():
    p = 97
    a = np.arange(0, 3 * p, dtype=np.int64)
    vec = primes.legendre_symbols_vec(a, p)
    for ai, vi in zip(a, vec):
        assert int(vi) == primes.legendre_symbol(int(ai), p)


def test_gamma_pnt_closed_form():
    res = primes.gamma_pnt(prime_limit=10 ** 6)
    assert res.method == "closed_form"
    # value at the reference precision is -1.33258; allow for the tail
    assert res.value == pytest.approx(-1.33258, abs=5e-6 + res.tail_bound)


def test_gamma_pnt_integral_agrees_with_closed_form():
    closed = primes.gamma_pnt(prime_limit=10 ** 6)
    integral = primes.gamma_pnt(method="integral", prime_limit=10 ** 6)
    assert integral.method == "integral"
    tol = integral.tail_bound + closed.tail_bound + 1e-12
    assert abs(integral.value - closed.value) <= tol


def test_gamma_pnt_residue_classes():
    r13 = primes.gamma_pnt_ab(1, 3, prime_limit=10 ** 6)
    r14 = primes.gamma_pnt_ab(1, 4, prime_limit=10 ** 6)
    assert r13.value == pytest.approx(-2.375494, abs=1e-5 + r13.tail_bound)
    assert r14.value == pytest.approx(-2.224837, abs=1e-5 + r14.tail_bound)


def test_constant_result_carries_provenance():
    res = primes.gamma_pnt(prime_limit=10 ** 6)
    row = res.as_dict()
    for key in ("name", "value", "truncation", "tail_bound", "method"):
        assert key in row
    assert row["tail_bound"] >= 0.0


def test_invalid_inputs_raise():
    with pytest.raises(DomainError):
        primes.gamma_pnt(method="nonsense", prime_limit=10 ** 6)
    with pytest.raises(DomainError):
        primes.legendre_symbol(2, 4, validate=True)
