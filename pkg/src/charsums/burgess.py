"""Shift-and-count machinery: prime shifts, incidence counts A(n), the second
moment of A, the sextuple count M and its split by equal/unequal primes and
by the congruence-lattice case of each pair of scaled points.

All window conditions are decided in integers.  A point (N - a q)/p lies in
[n, n + H/P) iff  n p P <= (N - a q) P < n p P + H p, and two points are
within H/P of each other iff |(N_j - a1 q) p2 - (N_k - a2 q) p1| P <= H p1 p2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .arith import PrimeWindow, bertrand_prime, primes_in_window
from .characters import DirichletCharacter
from .errors import BudgetExceeded, HTooSmall, MonotonicityViolated, NotPrimitive, PDividesQ, PRangeEmpty
from .lattice import C0, Case, CaseTag, build_lattice, classify_case, primitive_direction
from .meanvalue import check_spacing
from .sums import PrefixTable, interval_sum, max_partial_many

INT64_SAFE = 1 << 62


@dataclass(frozen=True)
class SpacedFamily:
    q: int
    H: int
    points: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(int(N) for N in self.points))
        check_spacing(self.points, self.H, self.q)

    @property
    def J(self) -> int:
        return len(self.points)


class PChoice(NamedTuple):
    P: int
    oversized: bool  # clipping to (log q)^2 pushed P above 4 H q^(-1/(2r))


def _root_exceeds(P: int, H: int, q: int, r: int, c: int) -> bool:
    """P > c H q^(-1/(2r)), decided exactly."""
    return q * P ** (2 * r) > (c * H) ** (2 * r)


def choose_P(q: int, H: int, r: int) -> PChoice:
    """Smallest P >= 2 H q^(-1/(2r)), raised to at least (log q)^2."""
    if H ** (2 * r) <= q:
        raise HTooSmall(f"H = {H} <= q^(1/(2r)) for q = {q}, r = {r}")
    P = max(1, math.ceil(2 * H * q ** (-1 / (2 * r))) - 2)
    while q * P ** (2 * r) < (2 * H) ** (2 * r):
        P += 1
    P = max(P, math.ceil(math.log(q) ** 2))
    if 2 * P >= q:
        raise PRangeEmpty(f"P = {P} is not below q/2 = {q / 2}")
    return PChoice(P, _root_exceeds(P, H, q, r, 4))


@dataclass
class BurgessInstance:
    chi: DirichletCharacter
    r: int
    H: int
    P: int
    family: SpacedFamily
    window: PrimeWindow
    strict: bool = True
    _table: PrefixTable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.family.q != self.chi.q:
            raise ValueError("family modulus differs from the character modulus")
        if self.strict:
            q = self.q
            if not self.chi.is_primitive:
                raise NotPrimitive(f"character {self.chi.index} mod {q} is not primitive")
            if not (math.log(q) ** 2 <= self.P and 2 * self.P < q):
                raise PRangeEmpty(f"P = {self.P} outside [(log q)^2, q/2) for q = {q}")
            if not 1 <= self.H <= q:
                raise ValueError(f"H = {self.H} outside [1, q]")

    @classmethod
    def build(cls, chi: DirichletCharacter, r: int, H: int, points: Sequence[int], P: int | None = None, strict: bool = True):
        if P is None:
            P = choose_P(chi.q, H, r).P
        family = SpacedFamily(chi.q, H, tuple(points))
        window = primes_in_window(P, 2 * P, chi.q)
        return cls(chi, r, H, P, family, window, strict)

    @property
    def q(self) -> int:
        return self.chi.q

    @property
    def J(self) -> int:
        return self.family.J

    @property
    def table(self) -> PrefixTable:
        if self._table is None:
            self._table = PrefixTable(self.chi)
        return self._table


def shift_decompose_check(table: PrefixTable, N: int, h: int, p: int) -> tuple[complex, complex]:
    """Both sides of S(N;h) = chi(p) sum_{0<=a<p} S(N';h') with n = a q + p m.

    For each a the inner sum runs over integers m in ((N - a q)/p, (N - a q + h)/p].
    """
    q = table.q
    if math.gcd(p, q) != 1:
        raise PDividesQ(f"{p} shares a factor with {q}")
    lhs = interval_sum(table, N, h)
    X = N - q * np.arange(p, dtype=np.int64)
    start = X // p
    length = (X + h) // p - start
    rhs = complex(table.values[p % q]) * complex(np.sum(table.S(start, length)))
    return lhs, rhs


def scaled_points(q: int, H: int, family: SpacedFamily | Sequence[int], ell: int | None = None) -> list[int]:
    """M_j = floor(N_j l / q) with l the smallest prime in (q/H, 2q/H]."""
    points = family.points if isinstance(family, SpacedFamily) else tuple(family)
    if ell is None:
        ell = bertrand_prime(q, H)
    M = [N * ell // q for N in points]
    for a, b in zip(M, M[1:]):
        if b <= a:
            raise MonotonicityViolated(f"scaled points {M} are not strictly increasing")
    return M


@dataclass(frozen=True)
class IncidenceCounts:
    offset: int  # counts[i] is A(offset + i)
    counts: np.ndarray
    N: int  # sum_n A(n)^2

    def __getitem__(self, n: int) -> int:
        i = n - self.offset
        return int(self.counts[i]) if 0 <= i < self.counts.size else 0

    def as_dict(self) -> dict[int, int]:
        nz = np.flatnonzero(self.counts)
        return {int(i) + self.offset: int(self.counts[i]) for i in nz}

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _window_ranges(inst: BurgessInstance, p: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    a = np.arange(p, dtype=np.int64)
    X = N - a * inst.q
    hi = X // p
    lo = (X * inst.P - inst.H * p) // (p * inst.P) + 1
    return lo, hi


def incidence_counts(inst: BurgessInstance, budget: int = 10**8) -> IncidenceCounts:
    """A(n) = #{(a, p, N_j) : n <= (N_j - a q)/p < n + H/P} and its second moment."""
    work = sum(inst.window.primes) * inst.J
    if work > budget:
        raise BudgetExceeded(f"{work} (a, p, N_j) triples above budget {budget}")
    los, his = [], []
    for p in inst.window.primes:
        for N in inst.family.points:
            lo, hi = _window_ranges(inst, p, N)
            keep = hi >= lo
            los.append(lo[keep])
            his.append(hi[keep])
    if not los or not sum(x.size for x in los):
        return IncidenceCounts(0, np.zeros(0, dtype=np.int64), 0)
    lo = np.concatenate(los)
    hi = np.concatenate(his)
    off = int(lo.min())
    diff = np.zeros(int(hi.max()) - off + 2, dtype=np.int64)
    np.add.at(diff, lo - off, 1)
    np.add.at(diff, hi - off + 1, -1)
    A = np.cumsum(diff)[:-1]
    return IncidenceCounts(off, A, int(np.sum(A * A)))


@dataclass
class MDecomposition:
    M: int
    M1: int
    M2: int
    M3: int
    M4: int
    ell: int | None = None
    scaled: list[int] | None = None
    pair_M2: dict = field(default_factory=dict)  # (j, k) -> unequal-prime count
    pair_tags: dict = field(default_factory=dict)  # (j, k) -> CaseTag
    pair_primes: dict = field(default_factory=dict)  # (j, k) -> {(p1, p2), ...}


def count_M(inst: BurgessInstance, budget: int = 10**9, c0: int = C0) -> MDecomposition:
    """Exact sextuple count M = M1 + M2, with M2 = M3 + M4 by lattice case."""
    primes = inst.window.primes
    J, q, P, H = inst.J, inst.q, inst.P, inst.H
    work = len(primes) * sum(primes) * J * J
    if work > budget:
        raise BudgetExceeded(f"estimated {work} comparisons above budget {budget}")
    pmax = max(primes, default=1)
    if (pmax * q + q) * pmax * P + H * pmax * pmax >= INT64_SAFE:
        raise BudgetExceeded("scaled coordinates exceed 64-bit range")
    pts = np.array(inst.family.points, dtype=np.int64)
    # X[p][j, a] = N_j - a q
    X = {p: pts[:, None] - q * np.arange(p, dtype=np.int64)[None, :] for p in primes}
    M1 = 0
    pair_M2: dict[tuple[int, int], int] = {}
    pair_primes: dict[tuple[int, int], set] = {}
    for p1 in primes:
        for p2 in primes:
            T = H * p1 * p2
            U = X[p1] * (p2 * P)  # (J, p1)
            V = X[p2] * (p1 * P)  # (J, p2), descending in a2
            Uflat = U.ravel()
            for k in range(J):
                Vk = V[k, ::-1]
                cnt = np.searchsorted(Vk, Uflat + T, "right") - np.searchsorted(Vk, Uflat - T, "left")
                per_j = cnt.reshape(J, p1).sum(axis=1)
                if p1 == p2:
                    M1 += int(per_j.sum())
                    continue
                for j in np.flatnonzero(per_j):
                    key = (int(j), k)
                    pair_M2[key] = pair_M2.get(key, 0) + int(per_j[j])
                    pair_primes.setdefault(key, set()).add((p1, p2))
    M2 = sum(pair_M2.values())
    dec = MDecomposition(M1 + M2, M1, M2, 0, 0, pair_M2=pair_M2, pair_primes=pair_primes)
    if M2:
        dec.ell = bertrand_prime(q, H)
        dec.scaled = scaled_points(q, H, inst.family, dec.ell)
        lattices = {}
        for (j, k), c in pair_M2.items():
            key = (dec.scaled[j], dec.scaled[k])
            if key not in lattices:
                lattices[key] = classify_case(build_lattice(dec.ell, *key), P, c0)
            tag = lattices[key]
            dec.pair_tags[(j, k)] = tag
            if tag.case is Case.RANK2_DELTA_NONZERO:
                dec.M4 += c
            else:
                dec.M3 += c
    return dec


def delta_zero_violations(inst: BurgessInstance, dec: MDecomposition) -> list[tuple]:
    """Unequal prime pairs in a vanishing-minor rank-2 case that are not +-(x, y) of the shared direction."""
    bad = []
    for key, tag in dec.pair_tags.items():
        if tag.case is not Case.RANK2_DELTA_ZERO:
            continue
        lat = build_lattice(dec.ell, dec.scaled[key[0]], dec.scaled[key[1]])
        x, y = primitive_direction(lat)
        for p1, p2 in dec.pair_primes.get(key, ()):
            if (p2, p1) not in ((x, y), (-x, -y)):
                bad.append((key, p1, p2, (x, y)))
    return bad


def _ratio(a: float, b: float) -> float:
    if b > 0:
        return a / b
    return 0.0 if a == 0 else math.inf


@dataclass
class ChainReport:
    q: int
    r: int
    H: int
    P: int
    J: int
    N: int
    decomposition: MDecomposition
    n_bound: int  # (floor(H/P) + 1) * M
    hard_ok: bool
    lhs: float  # sum_j max_{h<=H} |S(N_j;h)|^r
    big_shape: float
    n_ratio: float
    m1_ratio: float
    m3_ratio: float
    m4_ratio: float
    total_ratio: float
    big_ratio: float
    ell_divides_delta: int
    ratio_cap: float

    @property
    def ratios(self) -> tuple[float, float, float, float, float]:
        return (self.m1_ratio, self.m3_ratio, self.m4_ratio, self.n_ratio, self.total_ratio)

    @property
    def within_cap(self) -> bool:
        return all(x <= self.ratio_cap for x in self.ratios)


def verify_chain(inst: BurgessInstance, ratio_cap: float = 100.0, eps: float = 0.0, budget: int = 10**9) -> ChainReport:
    """Measure every link of the counting chain against its bound shape (constant 1).

    The only hard check is the integer inequality N <= (floor(H/P) + 1) M.
    """
    q, r, H, P, J = inst.q, inst.r, inst.H, inst.P, inst.J
    inc = incidence_counts(inst, budget=min(budget, 10**8))
    dec = count_M(inst, budget=budget)
    n_bound = (H // P + 1) * dec.M
    logq = math.log(q)
    lhs = float(np.sum(max_partial_many(inst.table, inst.family.points, min(H, q)) ** r)) if J else 0.0
    big_shape = q ** (0.25 + 0.75 / r + eps) * H ** (r - 2) * math.sqrt(dec.M)
    m3_shape = (H * P**3 / q + 1) * J * J
    bad_delta = sum(
        1 for t in dec.pair_tags.values() if t.case is Case.RANK2_DELTA_NONZERO and t.delta % dec.ell == 0
    )
    return ChainReport(
        q, r, H, P, J, inc.N, dec, n_bound, inc.N <= n_bound, lhs, big_shape,
        n_ratio=_ratio(inc.N, H / P * dec.M),
        m1_ratio=_ratio(dec.M1, P * P * J),
        m3_ratio=_ratio(dec.M3, m3_shape),
        m4_ratio=_ratio(dec.M4, P * P * J ** (2 / 3) * logq),
        total_ratio=_ratio(dec.M, m3_shape + P * P * J ** (4 / 3) * logq),
        big_ratio=_ratio(lhs, big_shape),
        ell_divides_delta=bad_delta,
        ratio_cap=ratio_cap,
    )
