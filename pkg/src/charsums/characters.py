"""Exact Dirichlet characters.

A character mod q is stored through the CRT decomposition of (Z/q)^* into
cyclic factors: one per odd prime power p^k (generated by the smallest
primitive root), and for 2^k the pair {-1, 5} (k >= 3) or {-1} (k = 2).
A character is a tuple of twists, one per factor, and takes the value

    chi(n) = exp(2 pi i * sum_i twist_i * log_i(n) / order_i)

Values are kept as integer exponents over D = lcm(order_i), so products and
sums can be compared without floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .arith import dlog_table, factorize, is_prime, primitive_root

MAX_MODULUS = 10**7


@dataclass(frozen=True)
class UnityRoot:
    """exp(2 pi i * exponent), or the value zero when ``exponent`` is None."""

    exponent: Fraction | None

    @classmethod
    def root(cls, numerator: int, denominator: int = 1) -> "UnityRoot":
        return cls(Fraction(numerator % denominator, denominator))

    @property
    def kind(self) -> str:
        return "Zero" if self.exponent is None else "Root"

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    @property
    def numerator(self) -> int:
        return self.exponent.numerator if self.exponent is not None else 0

    @property
    def denominator(self) -> int:
        return self.exponent.denominator if self.exponent is not None else 1

    def __mul__(self, other: "UnityRoot") -> "UnityRoot":
        if self.exponent is None or other.exponent is None:
            return ZERO
        return UnityRoot((self.exponent + other.exponent) % 1)

    def conjugate(self) -> "UnityRoot":
        if self.exponent is None:
            return self
        return UnityRoot((-self.exponent) % 1)

    def to_complex(self) -> complex:
        if self.exponent is None:
            return 0j
        t = self.exponent
        if t == 0:
            return 1 + 0j
        if t == Fraction(1, 2):
            return -1 + 0j
        return complex(np.exp(2j * np.pi * float(t)))

    def __complex__(self):
        return self.to_complex()

    def __repr__(self):
        if self.exponent is None:
            return "Zero"
        return f"Root({self.exponent.numerator}/{self.exponent.denominator})"


ZERO = UnityRoot(None)
ONE = UnityRoot(Fraction(0))


@dataclass(frozen=True, eq=False)
class CyclicFactor:
    """One cyclic factor of (Z/q)^*; ``log`` indexes residues mod ``modulus``."""

    prime: int
    exponent: int
    kind: str  # "odd", "sign" (generator -1) or "five" (generator 5)
    generator: int
    order: int
    log: np.ndarray = field(repr=False)

    @property
    def modulus(self) -> int:
        return self.prime**self.exponent


@lru_cache(maxsize=256)
def _factors_of_prime_power(p: int, k: int) -> tuple[CyclicFactor, ...]:
    m = p**k
    if p != 2:
        g = primitive_root(p, k)
        tab = dlog_table(g, m)
        return (CyclicFactor(p, k, "odd", g, tab.order, tab.log),)
    if k == 1:
        return ()
    res = np.arange(m)
    sign = np.where(res % 2 == 0, -1, (res % 4 == 3).astype(np.int64))
    sign_factor = CyclicFactor(2, k, "sign", m - 1, 2, sign)
    if k == 2:
        return (sign_factor,)
    order5 = m // 4
    pw = np.empty(order5, dtype=np.int64)
    pw[0] = 1
    for i in range(1, order5):
        pw[i] = pw[i - 1] * 5 % m
    five = np.full(m, -1, dtype=np.int64)
    five[pw] = np.arange(order5)
    odd3 = res[res % 4 == 3]
    five[odd3] = five[(m - odd3) % m]
    return (sign_factor, CyclicFactor(2, k, "five", 5, order5, five))


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class CharacterGroup(Sequence):
    """All Dirichlet characters mod q, addressed by a stable index.

    Indices enumerate twist tuples lexicographically (first factor most
    significant), so index 0 is the principal character.
    """

    def __init__(self, q: int):
        if not 1 <= q <= MAX_MODULUS:
            raise ValueError(f"modulus {q} outside [1, {MAX_MODULUS}]")
        self.q = q
        self.factorization = factorize(q)
        self.factors: tuple[CyclicFactor, ...] = tuple(
            f for p, k in self.factorization.factors for f in _factors_of_prime_power(p, k)
        )
        self.orders = tuple(f.order for f in self.factors)
        self.D = math.lcm(*self.orders) if self.orders else 1
        self.size = math.prod(self.orders)

    def __len__(self):
        return self.size

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(self.size))]
        if index < 0:
            index += self.size
        if not 0 <= index < self.size:
            raise IndexError(index)
        return DirichletCharacter(self, index)

    def __iter__(self) -> Iterator["DirichletCharacter"]:
        return (DirichletCharacter(self, i) for i in range(self.size))

    def __repr__(self):
        return f"CharacterGroup(q={self.q}, size={self.size})"

    @cached_property
    def unit_mask(self) -> np.ndarray:
        n = np.arange(self.q)
        mask = np.ones(self.q, dtype=bool)
        for p in self.factorization.primes:
            mask &= n % p != 0
        if self.q == 1:
            mask[:] = True
        return mask

    @cached_property
    def logs(self) -> np.ndarray:
        """Matrix of factor logs, shape (factors, q), for n = 0..q-1."""
        n = np.arange(self.q)
        out = np.zeros((len(self.factors), self.q), dtype=np.int64)
        for i, f in enumerate(self.factors):
            out[i] = f.log[n % f.modulus]
        return out

    def twists(self, index: int) -> tuple[int, ...]:
        out = []
        for order in reversed(self.orders):
            index, t = divmod(index, order)
            out.append(t)
        return tuple(reversed(out))

    def index_of(self, twists: Sequence[int]) -> int:
        index = 0
        for t, order in zip(twists, self.orders):
            index = index * order + t % order
        return index

    def conjugate_index(self, index: int) -> int:
        return self.index_of([-t for t in self.twists(index)])

    def conductor_of(self, index: int) -> int:
        twists = self.twists(index)
        cond = 1
        i = 0
        for p, k in self.factorization.factors:
            if p != 2:
                a = twists[i]
                i += 1
                if a:
                    cond *= p ** max(1, k - _vp(a, p))
            elif k == 2:
                cond *= 4 if twists[i] else 1
                i += 1
            elif k >= 3:
                s, b = twists[i], twists[i + 1]
                i += 2
                if b:
                    cond *= 2 ** (k - _vp(b, 2))
                elif s:
                    cond *= 4
        return cond

    def is_primitive_index(self, index: int) -> bool:
        return self.conductor_of(index) == self.q

    def primitive_indices(self) -> np.ndarray:
        """Indices of all primitive characters, computed from twists only."""
        ok = np.ones(self.size, dtype=bool)
        if self.factorization.factors and self.factorization.factors[0] == (2, 1):
            return np.zeros(0, dtype=np.int64)
        idx = np.arange(self.size, dtype=np.int64)
        digits = []
        rem = idx
        for order in reversed(self.orders):
            digits.append(rem % order)
            rem = rem // order
        digits.reverse()
        i = 0
        for p, k in self.factorization.factors:
            if p != 2:
                ok &= digits[i] % p != 0
                i += 1
            elif k == 2:
                ok &= digits[i] == 1
                i += 1
            else:
                ok &= digits[i + 1] % 2 == 1
                i += 2
        return idx[ok]

    def real_indices(self) -> list[int]:
        """Indices of characters with values in {0, 1, -1}."""
        choices = [(0, o // 2) if o % 2 == 0 else (0,) for o in self.orders]
        out = []
        for combo in np.ndindex(*[len(c) for c in choices]):
            out.append(self.index_of([choices[i][j] for i, j in enumerate(combo)]))
        return sorted(set(out))

    def exponent_matrix(self, indices: Sequence[int]) -> np.ndarray:
        """Exponents over D for each requested character, -1 on non-units."""
        indices = list(indices)
        E = np.zeros((len(indices), self.q), dtype=np.int64)
        if self.factors:
            tw = np.array([self.twists(i) for i in indices], dtype=np.int64)
            scale = np.array([self.D // o for o in self.orders], dtype=np.int64)
            coef = tw * scale
            logs = self.logs
            for f in range(len(self.factors)):
                E += coef[:, f : f + 1] * logs[f][None, :]
                E %= self.D
        E[:, ~self.unit_mask] = -1
        return E


@lru_cache(maxsize=64)
def enumerate_characters(q: int) -> CharacterGroup:
    """The phi(q) characters mod q as a lazily materialised sequence."""
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    return CharacterGroup(q)


class DirichletCharacter:
    """A single character mod q; its exponent table is built on construction."""

    def __init__(self, group: CharacterGroup, index: int):
        self.group = group
        self.q = group.q
        self.index = index
        self.twists = group.twists(index)
        self.D = group.D
        self.exponents = group.exponent_matrix([index])[0]
        self.exponents.flags.writeable = False

    def __repr__(self):
        return f"DirichletCharacter(q={self.q}, index={self.index}, twists={self.twists})"

    def __eq__(self, other):
        return isinstance(other, DirichletCharacter) and (self.q, self.index) == (other.q, other.index)

    def __hash__(self):
        return hash((self.q, self.index))

    def __call__(self, n: int) -> UnityRoot:
        e = int(self.exponents[n % self.q])
        return ZERO if e < 0 else UnityRoot.root(e, self.D)

    @property
    def components(self) -> list[tuple[CyclicFactor, int]]:
        return list(zip(self.group.factors, self.twists))

    @property
    def order(self) -> int:
        return math.lcm(1, *(o // math.gcd(o, t) for o, t in zip(self.group.orders, self.twists)))

    @property
    def is_principal(self) -> bool:
        return not any(self.twists)

    @property
    def conductor(self) -> int:
        return self.group.conductor_of(self.index)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def conjugate(self) -> "DirichletCharacter":
        return self.group[self.group.conjugate_index(self.index)]

    def values(self) -> np.ndarray:
        """Complex values chi(0), ..., chi(q-1)."""
        roots = np.exp(2j * np.pi * np.arange(self.D) / self.D)
        if self.D % 2 == 0:
            roots[self.D // 2] = -1.0
        roots[0] = 1.0
        out = np.zeros(self.q, dtype=np.complex128)
        unit = self.exponents >= 0
        out[unit] = roots[self.exponents[unit]]
        return out


def evaluate(chi: DirichletCharacter, n: int) -> UnityRoot:
    return chi(n)


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def legendre_character(p: int) -> DirichletCharacter:
    """The quadratic character mod an odd prime p."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"legendre_character needs an odd prime, got {p}")
    return enumerate_characters(p)[(p - 1) // 2]


# -- exact vanishing of sums of roots of unity ---------------------------------


@lru_cache(maxsize=512)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, list(cyclotomic(d)))
    return tuple(num)


def _exact_div(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    dn = len(den) - 1
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i] // den[-1]
        quot[i - dn] = c
        for j in range(dn + 1):
            num[i - dn + j] -= c * den[j]
    assert not any(num), "cyclotomic division left a remainder"
    return quot


@lru_cache(maxsize=128)
def _reduction_matrix(n: int) -> np.ndarray:
    """Row k holds the coefficients of x^k mod Phi_n(x)."""
    phi = np.array(cyclotomic(n), dtype=np.int64)
    deg = len(phi) - 1
    R = np.zeros((n, deg), dtype=np.int64)
    row = np.zeros(deg, dtype=np.int64)
    row[0] = 1
    for k in range(n):
        R[k] = row
        top = row[-1]
        row = np.concatenate(([0], row[:-1])) - top * phi[:-1]
    return R


def roots_sum_is_zero(exponents: np.ndarray, D: int) -> bool:
    """Decide exactly whether sum_k exp(2 pi i e_k / D) vanishes (negative e_k skipped)."""
    e = np.asarray(exponents, dtype=np.int64)
    e = e[e >= 0] % D
    if e.size == 0:
        return True
    g = math.gcd(D, *map(int, np.unique(e)))
    n = D // g
    counts = np.bincount(e // g, minlength=n)
    return not np.any(counts @ _reduction_matrix(n))


# -- rational-function twists chi(f(n)) e_p(g(n)) -----------------------------


def _trim(c: Sequence[int], p: int) -> list[int]:
    out = [x % p for x in c]
    while out and out[-1] == 0:
        out.pop()
    return out


def _horner(c: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for a in reversed(c):
        acc = (acc * x + a) % p
    return acc


def _poly_divmod(num: list[int], den: list[int], p: int) -> tuple[list[int], list[int]]:
    num = num[:]
    inv = pow(den[-1], -1, p)
    quot = [0] * max(0, len(num) - len(den) + 1)
    while len(num) >= len(den) and num:
        c = num[-1] * inv % p
        shift = len(num) - len(den)
        quot[shift] = c
        for j, d in enumerate(den):
            num[shift + j] = (num[shift + j] - c * d) % p
        num = _trim(num, p)
    return _trim(quot, p), num


@dataclass(frozen=True)
class RationalFunctionPair:
    """f = f_num/f_den and g = g_num/g_den over F_p; coefficients lowest degree first."""

    p: int
    f_num: tuple[int, ...]
    f_den: tuple[int, ...] = (1,)
    g_num: tuple[int, ...] = ()
    g_den: tuple[int, ...] = (1,)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        for name in ("f_num", "f_den", "g_num", "g_den"):
            object.__setattr__(self, name, tuple(_trim(getattr(self, name), self.p)))
        if not self.f_den or not self.g_den:
            raise ValueError("denominator is identically zero mod p")

    def f_at(self, n: int) -> int | None:
        d = _horner(self.f_den, n, self.p)
        return None if d == 0 else _horner(self.f_num, n, self.p) * pow(d, -1, self.p) % self.p

    def g_at(self, n: int) -> int | None:
        d = _horner(self.g_den, n, self.p)
        return None if d == 0 else _horner(self.g_num, n, self.p) * pow(d, -1, self.p) % self.p

    @property
    def f_is_constant(self) -> bool:
        num, den = list(self.f_num), list(self.f_den)
        if not num:
            return True
        if len(num) != len(den):
            return False
        c = num[-1] * pow(den[-1], -1, self.p) % self.p
        return all((a - c * b) % self.p == 0 for a, b in zip(num, den))

    @property
    def g_is_at_most_linear(self) -> bool:
        quot, rem = _poly_divmod(list(self.g_num), list(self.g_den), self.p)
        return not rem and len(quot) <= 2

    @property
    def is_trivial(self) -> bool:
        return self.f_is_constant and self.g_is_at_most_linear


def mixed_eval(chi: DirichletCharacter, pair: RationalFunctionPair, n: int) -> complex:
    """chi(f(n)) * e_p(g(n)); zero at poles of f or g and where f(n) = 0."""
    if chi.q != pair.p:
        raise ValueError(f"character modulus {chi.q} differs from field size {pair.p}")
    fv, gv = pair.f_at(n), pair.g_at(n)
    if fv is None or gv is None:
        return 0j
    val = chi(fv)
    if val.is_zero:
        return 0j
    return val.to_complex() * complex(np.exp(2j * np.pi * gv / pair.p))
