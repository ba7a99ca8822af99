"""Prime generation, Legendre symbols, Chebyshev-theta error integrals and
the prime-counting constants they feed.

The central objects are gamma_pnt and its arithmetic-progression relatives
gamma_pnt_ab: the constants appearing next to phihat(0)/log R whenever a
compactly supported test function is summed against the primes.  Each has a
slowly-converging "direct" definition through the theta error integral

    1 + int_1^X E(t)/t^2 dt,      E(t) = theta(t) - t,

and a fast closed form; both are exposed and cross-checked.  The integral is
evaluated exactly (theta is a step function), never by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _literals
from ._sum import chunked_sum, thread_count
from .errors import DomainError, IncompleteSumError, ResourceError

HARD_SIEVE_CAP = 10 ** 10
_SEGMENT = 1 << 24


# --------------------------------------------------------------------------
# sieving

def _simple_sieve(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if mask[i]:
            mask[i * i::i] = False
    return np.nonzero(mask)[0].astype(np.int64)


@dataclass
class PrimeTable:
    """Ascending primes up to an inclusive bound, with residue-class views."""

    limit: int
    primes: np.ndarray
    _log: np.ndarray | None = field(default=None, repr=False)
    _classes: dict = field(default_factory=dict, repr=False)

    @property
    def log_primes(self) -> np.ndarray:
        if self._log is None:
            self._log = np.log(self.primes.astype(np.float64))
        return self._log

    def residue_class(self, a: int, b: int) -> np.ndarray:
        """Primes p <= limit with p = a mod b."""
        key = (a % b, b)
        if key not in self._classes:
            self._classes[key] = self.primes[self.primes % b == key[0]]
        return self._classes[key]

    def class_mask(self, a: int, b: int) -> np.ndarray:
        return self.primes % b == a % b

    def __len__(self) -> int:
        return int(self.primes.size)


def sieve_primes(limit: int) -> PrimeTable:
    """All primes <= limit, segmented so memory stays bounded."""
    if limit < 2:
        raise DomainError(f"sieve limit {limit} yields an empty table")
    if limit > HARD_SIEVE_CAP:
        raise ResourceError(
            f"sieve limit {limit} exceeds the configured cap {HARD_SIEVE_CAP}")
    if limit <= _SEGMENT:
        return PrimeTable(limit, _simple_sieve(limit))
    root = math.isqrt(limit)
    base = _simple_sieve(root)
    out = [base]
    lo = root + 1
    while lo <= limit:
        hi = min(lo + _SEGMENT - 1, limit)
        mask = np.ones(hi - lo + 1, dtype=bool)
        for p in base:
            p = int(p)
            start = ((lo + p - 1) // p) * p
            mask[start - lo::p] = False
        out.append(np.nonzero(mask)[0].astype(np.int64) + lo)
        lo = hi + 1
    return PrimeTable(limit, np.concatenate(out))


_TABLE_CACHE: PrimeTable | None = None


def get_table(limit: int) -> PrimeTable:
    """Grow-only cached table; reuses the largest sieve built so far."""
    global _TABLE_CACHE
    if _TABLE_CACHE is None or _TABLE_CACHE.limit < limit:
        _TABLE_CACHE = sieve_primes(limit)
    if _TABLE_CACHE.limit == limit:
        return _TABLE_CACHE
    primes = _TABLE_CACHE.primes
    cut = int(np.searchsorted(primes, limit, side="right"))
    return PrimeTable(limit, primes[:cut])


def nth_prime_limit(n: int) -> int:
    """An upper bound for the n-th prime (Rosser-Schoenfeld for n >= 6)."""
    if n < 6:
        return 13
    x = float(n)
    return int(x * (math.log(x) + math.log(math.log(x)))) + 10


def first_n_primes(n: int) -> PrimeTable:
    table = get_table(nth_prime_limit(n))
    if len(table) < n:  # bound is proven, this is belt and braces
        table = get_table(2 * table.limit)
    primes = table.primes[:n]
    return PrimeTable(int(primes[-1]), primes)


# --------------------------------------------------------------------------
# primality / symbols

_MR_BASES = (2, 3, 5, 7, 11, 13, 17)  # deterministic below 3.3e14


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def legendre_symbol(a: int, p: int, validate: bool = False) -> int:
    """(a/p) for odd prime p: 0 if p|a, +1 for nonzero squares, -1 otherwise."""
    if p == 2 or p < 2:
        raise DomainError(f"legendre_symbol needs an odd prime, got {p}")
    if validate and not is_prime(p):
        raise DomainError(f"legendre_symbol needs a prime modulus, got {p}")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1."""
    if n <= 0 or n % 2 == 0:
        raise DomainError(f"jacobi_symbol needs odd positive n, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def legendre_symbols_vec(a: np.ndarray, p: int) -> np.ndarray:
    """(a_i/p) for an int array, via one squares table mod p."""
    squares = np.zeros(p, dtype=np.int8)
    x = np.arange(p, dtype=np.int64)
    squares[(x * x) % p] = 1
    r = a % p
    out = np.where(squares[r] == 1, 1, -1).astype(np.int8)
    out[r == 0] = 0
    return out


def totient(b: int) -> int:
    result, n, p = b, b, 2
    while p * p <= n:
        if n % p == 0:
            while n % p == 0:
                n //= p
            result -= result // p
        p += 1
    if n > 1:
        result -= result // n
    return result


# --------------------------------------------------------------------------
# theta error integrals

def theta_error_integral(cls, upper_limit: float,
                         table: PrimeTable | None = None,
                         threads: int | None = None) -> float:
    """int_1^X E(t)/t^2 dt, exactly, for E = theta - t or its AP analogue.

    theta is a step function, so integrating by parts over each step gives
    the finite closed form  sum_{p<=X} log p (1/p - 1/X) - log X / phi(b)
    (phi(b) = 1 in the all-primes case).
    """
    if upper_limit < 2:
        raise DomainError("upper_limit must be >= 2")
    if table is None:
        table = get_table(int(upper_limit))
    if table.limit < upper_limit - 1e-9:
        raise DomainError(
            f"prime table (limit {table.limit}) does not cover X={upper_limit}")
    nthreads = thread_count(threads)
    if cls == "all":
        primes, phib = table.primes, 1
    else:
        a, b = cls
        primes, phib = table.residue_class(a, b), totient(b)
    primes = primes[primes <= upper_limit]
    pf = primes.astype(np.float64)
    lp = np.log(pf)
    s = chunked_sum(lp * (1.0 / pf - 1.0 / upper_limit), nthreads)
    return s - math.log(upper_limit) / phib


@dataclass
class ConstantResult:
    """A named prime-sum constant with full truncation provenance."""

    name: str
    value: float
    truncation_kind: str  # "prime_limit" or "prime_count"
    truncation: int
    tail_bound: float
    method: str  # "direct_sum" | "closed_form" | "integral"

    def as_dict(self) -> dict:
        return {
            "name": self.name, "value": self.value,
            "truncation_kind": self.truncation_kind,
            "truncation": self.truncation,
            "tail_bound": self.tail_bound, "method": self.method,
        }


def _resolve_truncation(prime_limit: int | None, first_primes: int | None,
                        default_limit: int) -> tuple[PrimeTable, str, int]:
    if prime_limit is not None and first_primes is not None:
        raise DomainError("specify prime_limit or first_primes, not both")
    if first_primes is not None:
        table = first_n_primes(first_primes)
        return table, "prime_count", first_primes
    limit = prime_limit if prime_limit is not None else default_limit
    return get_table(limit), "prime_limit", limit


def gamma_pnt(method: str = "closed_form", prime_limit: int | None = None,
              first_primes: int | None = None,
              threads: int | None = None) -> ConstantResult:
    """The constant gamma_PNT = 1 + int_1^inf E(t)/t^2 dt = -gamma_Euler -
    sum_p log p/(p^2 - p)."""
    table, kind, trunc = _resolve_truncation(prime_limit, first_primes, 10 ** 8)
    if len(table) < 10 ** 4:
        raise DomainError("truncation must cover at least 1e4 primes")
    nthreads = thread_count(threads)
    X = float(table.primes[-1])
    if method == "closed_form":
        pf = table.primes.astype(np.float64)
        value = -_literals.EULER_GAMMA - chunked_sum(
            table.log_primes / (pf * pf - pf), nthreads)
        tail = math.log(X) / X
    elif method in ("direct", "integral"):
        value = 1.0 + theta_error_integral("all", X, table, threads)
        # unconditional-ish fluctuation estimate for the dropped tail
        tail = 4.0 * math.log(X) ** 2 / math.sqrt(X)
        method = "integral"
    else:
        raise DomainError(f"unknown method {method!r}")
    return ConstantResult("gamma_pnt", value, kind, trunc, tail, method)


_AB_CLOSED = {
    (1, 3): lambda: (-2 * _literals.EULER_GAMMA - 4 * _literals.LOG_2PI
                     + _literals.LOG_3
                     + 6 * math.log(_literals.GAMMA_ONE_THIRD)),
    (1, 4): lambda: (-2 * _literals.EULER_GAMMA - 3 * _literals.LOG_2PI
                     + 4 * math.log(_literals.GAMMA_ONE_FOURTH)),
}


def gamma_pnt_ab(a: int, b: int, method: str = "closed_form",
                 prime_limit: int | None = None,
                 first_primes: int | None = None,
                 threads: int | None = None) -> ConstantResult:
    """gamma_PNT;a,b = 1 + int_1^inf 2 E_{a,b}(t)/t^2 dt for the progression
    p = a mod b, with the transcendental closed form for (1,3) and (1,4)."""
    if (a, b) not in _AB_CLOSED:
        raise DomainError(f"unsupported progression ({a},{b})")
    table, kind, trunc = _resolve_truncation(
        prime_limit, first_primes, 67_867_979)  # the four-millionth prime
    nthreads = thread_count(threads)
    X = float(table.primes[-1])
    name = f"gamma_pnt_{a}{b}"
    if method == "closed_form":
        # transcendental part minus 2 sum over the two nonprincipal classes
        # of log p/(p^2 - p^delta), delta = 1 iff p = 1 mod b
        primes = table.primes[table.primes % b != 0]
        if b == 4:
            primes = primes[primes != 2]
        pf = primes.astype(np.float64)
        lp = np.log(pf)
        delta1 = (primes % b) == 1
        denom = np.where(delta1, pf * pf - pf, pf * pf - 1.0)
        value = _AB_CLOSED[(a, b)]() - 2.0 * chunked_sum(lp / denom, nthreads)
        tail = 2 * math.log(X) / X
    elif method in ("direct", "integral"):
        value = 1.0 + 2.0 * theta_error_integral((a, b), X, table, threads)
        tail = 8.0 * math.log(X) ** 2 / math.sqrt(X)
        method = "integral"
    else:
        raise DomainError(f"unknown method {method!r}")
    return ConstantResult(name, value, kind, trunc, tail, method)


# --------------------------------------------------------------------------
# weighted prime sums against a test function

def pnt_weighted_sum(phi, R: float, cls="all",
                     prime_limit: int | None = None,
                     table: PrimeTable | None = None,
                     threads: int | None = None) -> float:
    """sum over the class of (2 log p/(p log R)) phihat(2 log p/log R)."""
    L = math.log(R)
    required = math.exp(phi.sigma * L / 2.0)
    if prime_limit is None:
        prime_limit = int(required) + 1
    if prime_limit < required - 1:
        raise IncompleteSumError(
            f"prime_limit {prime_limit} below support bound {required:.3g}")
    if table is None or table.limit < prime_limit:
        table = get_table(prime_limit)
    primes = table.primes if cls == "all" else table.residue_class(*cls)
    primes = primes[primes <= prime_limit]
    pf = primes.astype(np.float64)
    lp = np.log(pf)
    w = phi.eval_phihat(2.0 * lp / L)
    return chunked_sum(2.0 * lp / (pf * L) * w, thread_count(threads))


def pnt_asymptotic(phi, R: float, cls="all") -> float:
    """The asymptotic decomposition the weighted sum converges to."""
    L = math.log(R)
    if cls == "all":
        g = gamma_pnt("closed_form", prime_limit=10 ** 7).value
        return phi.phi0 / 2.0 + 2.0 * phi.phihat0 * g / L
    a, b = cls
    g = gamma_pnt_ab(a, b, "closed_form", prime_limit=10 ** 7).value
    return phi.phi0 / 4.0 + phi.phihat0 * g / L
