"""Interval character sums S(N;h) over (N, N+h], maximal sums and dyadic splitting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characters import MAX_MODULUS, DirichletCharacter, RationalFunctionPair, mixed_eval
from .errors import DegenerateCase, LengthExceedsPeriod, ModulusTooLarge

# absolute slack used to break ties between floating maxima
TIE_TOL = 1e-9


class PrefixTable:
    """Prefix sums of one character over a period.

    ``prefix[k]`` is chi(1) + ... + chi(k) for 0 <= k <= q.  A second copy
    shifted by one period (``ext``) lets every S(N;h) with h <= q be read as
    a single difference.
    """

    def __init__(self, chi: DirichletCharacter):
        if chi.q > MAX_MODULUS:
            raise ModulusTooLarge(f"q = {chi.q} above {MAX_MODULUS}")
        self.chi = chi
        self.q = q = chi.q
        self.values = chi.values()
        seq = np.roll(self.values, -1)  # chi(1), ..., chi(q-1), chi(q)
        self.prefix = np.concatenate(([0j], np.cumsum(seq)))
        self.ext = np.concatenate((self.prefix, self.prefix[q] + self.prefix[1:]))
        self.norm_budget = q * 2.0**-50

    def __repr__(self):
        return f"PrefixTable(q={self.q}, index={self.chi.index})"

    def S(self, N, h):
        """S(N;h) for scalar or array N and h (0 <= h <= q)."""
        r = np.mod(N, self.q)
        return self.ext[r + h] - self.ext[r]


def build_prefix(chi: DirichletCharacter) -> PrefixTable:
    return PrefixTable(chi)


def _check_length(table: PrefixTable, h) -> None:
    hmax = int(np.max(h)) if np.ndim(h) else int(h)
    hmin = int(np.min(h)) if np.ndim(h) else int(h)
    if hmax > table.q:
        raise LengthExceedsPeriod(f"h = {hmax} exceeds the period {table.q}")
    if hmin < 0:
        raise ValueError(f"negative length {hmin}")


def interval_sum(table: PrefixTable, N, h):
    _check_length(table, h)
    out = table.S(N, h)
    return complex(out) if np.ndim(out) == 0 else out


def partial_sums(table: PrefixTable, N: int, H: int) -> np.ndarray:
    """Array of S(N;h) for h = 1..H."""
    _check_length(table, H)
    r = N % table.q
    return table.ext[r + 1 : r + H + 1] - table.ext[r]


def max_partial(table: PrefixTable, N: int, H: int) -> tuple[int, float]:
    """(h*, max_{1<=h<=H} |S(N;h)|); h* is the smallest h within TIE_TOL of the max."""
    if H < 1:
        raise ValueError(f"H must be positive, got {H}")
    a = np.abs(partial_sums(table, N, H))
    m = float(a.max())
    hstar = int(np.argmax(a >= m - TIE_TOL)) + 1
    return hstar, m


def max_partial_many(table: PrefixTable, Ns, H: int) -> np.ndarray:
    """max_{h<=H} |S(N;h)| for each N in ``Ns``."""
    _check_length(table, H)
    r = np.mod(np.asarray(Ns, dtype=np.int64), table.q)
    if r.size <= H:
        out = np.empty(r.size)
        for i, ri in enumerate(r):
            out[i] = np.abs(table.ext[ri + 1 : ri + H + 1] - table.ext[ri]).max()
        return out
    base = table.ext[r]
    out = np.zeros(r.size)
    for h in range(1, H + 1):
        np.maximum(out, np.abs(table.ext[r + h] - base), out=out)
    return out


@dataclass(frozen=True)
class DyadicPlan:
    """Binary splitting of (0, h] into pieces of length 2^(t-d), d in D.

    ``v[i]`` is the multiplier sum_{e in D, e < d} 2^(d-e); it does not
    depend on the starting point, so offsets are stored resolved.
    """

    h: int
    t: int
    D: tuple[int, ...]
    v: tuple[int, ...]
    pieces: tuple[tuple[int, int], ...]  # (offset, length)


def dyadic_decompose(h: int, t: int) -> DyadicPlan:
    if not 1 <= h <= 2**t:
        raise ValueError(f"need 1 <= h <= 2^t, got h={h}, t={t}")
    D = tuple(d for d in range(t + 1) if (h >> (t - d)) & 1)
    v = tuple(sum(2 ** (d - e) for e in D if e < d) for d in D)
    pieces = tuple((vi * 2 ** (t - d), 2 ** (t - d)) for d, vi in zip(D, v))
    return DyadicPlan(h, t, D, v, pieces)


def reconstruct_via_plan(table: PrefixTable, N, plan: DyadicPlan):
    total = 0j
    for offset, length in plan.pieces:
        total = total + table.S(np.add(N, offset), length)
    return complex(total) if np.ndim(total) == 0 else total


def dyadic_maximal_bound(table: PrefixTable, N: int, t: int, r: int) -> tuple[float, float]:
    """Both sides of the dyadic maximal inequality for H = 2^t:

    max_{h<=H} |S(N;h)|^(2r) <= (t+1)^(2r-1) sum_{d<=t} sum_{v<2^d} |S(N + v 2^(t-d); 2^(t-d))|^(2r)
    """
    H = 2**t
    lhs = max_partial(table, N, H)[1] ** (2 * r)
    rhs = 0.0
    for d in range(t + 1):
        length = 2 ** (t - d)
        starts = N + length * np.arange(2**d)
        rhs += float(np.sum(np.abs(table.S(starts, length)) ** (2 * r)))
    return lhs, (t + 1) ** (2 * r - 1) * rhs


def largest_power_of_two_at_most(x: float) -> int:
    if x < 1:
        raise ValueError(f"no power of two below {x}")
    p = 1 << int(math.floor(math.log2(x)))
    while 2 * p <= x:
        p *= 2
    while p > x:
        p //= 2
    return p


def block_split_bound(table: PrefixTable, N: int, H: int, H0: int) -> tuple[float, float]:
    """max_{h<=H}|S(N;h)| against sum_{0<=j<=H/H0} max_{h<=H0}|S(N+j H0;h)|."""
    lhs = max_partial(table, N, H)[1]
    starts = N + H0 * np.arange(H // H0 + 1)
    rhs = float(max_partial_many(table, starts, H0).sum())
    return lhs, rhs


def window_average_bound(table: PrefixTable, N: int, h: int, W: int) -> tuple[float, float]:
    """W |S(N;h)| against 2 sum_{n in (N-W, N]} max_{k<=2W} |S(n;k)|, for h <= W."""
    if h > W:
        raise ValueError(f"need h <= W, got h={h}, W={W}")
    lhs = W * abs(interval_sum(table, N, h))
    rhs = 2 * float(max_partial_many(table, np.arange(N - W + 1, N + 1), 2 * W).sum())
    return lhs, rhs


def mixed_interval_sum(p: int, chi: DirichletCharacter, pair: RationalFunctionPair, N: int, h: int) -> complex:
    """sum_{N<n<=N+h} chi(f(n)) e_p(g(n)), poles excluded."""
    if pair.p != p or chi.q != p:
        raise ValueError("character modulus, field size and p must agree")
    if h > p:
        raise LengthExceedsPeriod(f"h = {h} exceeds p = {p}")
    if pair.is_trivial:
        raise DegenerateCase("f constant and g constant or linear")
    return sum((mixed_eval(chi, pair, n) for n in range(N + 1, N + h + 1)), 0j)
