"""Integer utilities: factorization, prime windows, primitive roots, discrete logs."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotAUnit, WindowEmpty

# deterministic Miller-Rabin witness set for n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

# discrete-log tables are dense arrays indexed by residue
MAX_TABLE_MODULUS = 1 << 31


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    """Return a non-trivial factor of the odd composite n."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def is_cube_free(self) -> bool:
        return all(e < 3 for _, e in self.factors)

    @property
    def is_cube_full(self) -> bool:
        return self.n > 1 and all(e >= 3 for _, e in self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factors]

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factorization:
    """Factor ``n`` by trial division up to 1000, then Pollard-Brent."""
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    counts: dict[int, int] = {}
    m = n
    for p in range(2, 1000):
        if p * p > m:
            break
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    rng = random.Random(n)
    while stack:
        x = stack.pop()
        if is_prime(x):
            counts[x] = counts.get(x, 0) + 1
            continue
        r = math.isqrt(x)
        if r * r == x:
            stack += [r, r]
            continue
        d = _pollard_brent(x, rng)
        stack += [d, x // d]
    return Factorization(n, tuple(sorted(counts.items())))


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n).factors:
        out -= out // p
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


@dataclass(frozen=True)
class PrimeWindow:
    lo: int
    hi: int
    primes: tuple[int, ...]

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)


def primes_in_window(lo: int, hi: int, exclude: int = 1, segment: int = 1 << 20) -> PrimeWindow:
    """Primes p with lo < p <= hi that do not divide ``exclude`` (segmented sieve)."""
    if not 1 <= lo < hi:
        raise ValueError(f"need 1 <= lo < hi, got ({lo}, {hi})")
    base = _base_primes(max(2, math.isqrt(hi)))
    found: list[int] = []
    start = lo + 1
    while start <= hi:
        stop = min(hi, start + segment - 1)
        mark = np.ones(stop - start + 1, dtype=bool)
        for p in base:
            p = int(p)
            if p * p > stop:
                break
            first = max(p * p, -(-start // p) * p)
            mark[first - start :: p] = False
        if start <= 1:
            mark[: 2 - start] = False
        found.extend((np.flatnonzero(mark) + start).tolist())
        start = stop + 1
    if exclude != 1:
        found = [p for p in found if exclude % p]
    return PrimeWindow(lo, hi, tuple(found))


def bertrand_prime(q: int, H: int) -> int:
    """Smallest prime l with q/H < l <= 2q/H (compared exactly as l*H > q, l*H <= 2q)."""
    if H < 1 or q < 1:
        raise ValueError(f"bertrand_prime needs positive q and H, got q={q}, H={H}")
    ell = q // H + 1
    while ell * H <= 2 * q:
        if is_prime(ell):
            return ell
        ell += 1
    raise WindowEmpty(f"no prime in ({q}/{H}, 2*{q}/{H}]")


def _is_generator_mod_p(g: int, p: int, cofactors: tuple[int, ...]) -> bool:
    return all(pow(g, (p - 1) // r, p) != 1 for r in cofactors)


@lru_cache(maxsize=1024)
def primitive_root(p: int, k: int = 1) -> int:
    """Smallest generator of (Z/p^k)^* for an odd prime p.

    For k >= 2, g generates mod p^k iff it generates mod p and g^(p-1) != 1 mod p^2.
    """
    if p == 2 or not is_prime(p):
        raise ValueError(f"primitive_root needs an odd prime, got {p}")
    cof = factorize(p - 1).primes
    for g in range(2, p * p):
        if g % p == 0 or not _is_generator_mod_p(g % p, p, cof):
            continue
        if k == 1 or pow(g, p - 1, p * p) != 1:
            return g
    raise AssertionError("unreachable: primitive roots exist mod p^k")


def _powers(g: int, count: int, modulus: int) -> np.ndarray:
    """g^0, g^1, ..., g^(count-1) mod modulus by block doubling."""
    pw = np.empty(count, dtype=np.int64)
    pw[0] = 1 % modulus
    n = 1
    while n < count:
        m = min(n, count - n)
        pw[n : n + m] = pw[:m] * pow(g, n, modulus) % modulus
        n += m
    return pw


class DlogTable:
    """Dense discrete-log table of a cyclic unit group mod ``modulus``.

    ``log[x]`` is the exponent of x to base g, or -1 when x is not a power of g.
    """

    def __init__(self, g: int, modulus: int, order: int):
        if modulus > MAX_TABLE_MODULUS:
            raise ValueError(f"table modulus {modulus} above {MAX_TABLE_MODULUS}")
        self.g, self.modulus, self.order = g, modulus, order
        self.powers = _powers(g, order, modulus)
        log = np.full(modulus, -1, dtype=np.int64)
        log[self.powers] = np.arange(order, dtype=np.int64)
        if np.count_nonzero(log >= 0) != order:
            raise ValueError(f"{g} does not have order {order} mod {modulus}")
        self.log = log

    def __call__(self, x: int) -> int:
        e = int(self.log[x % self.modulus])
        if e < 0:
            raise NotAUnit(f"{x} is not in the group generated by {self.g} mod {self.modulus}")
        return e


@lru_cache(maxsize=64)
def dlog_table(g: int, modulus: int) -> DlogTable:
    return DlogTable(g, modulus, euler_phi(modulus))


def discrete_log(g: int, x: int, modulus: int) -> int:
    """Exponent e in [0, phi(modulus)) with g^e = x mod modulus; g must be a generator."""
    if math.gcd(x, modulus) != 1:
        raise NotAUnit(f"gcd({x}, {modulus}) > 1")
    return dlog_table(g, modulus)(x)
