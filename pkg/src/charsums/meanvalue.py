"""Moment statistics of character sums over complete and spaced families of starting points."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .characters import enumerate_characters
from .errors import BudgetExceeded, NotPrimitive, OverlapDetected, SpacingViolated
from .sums import PrefixTable, max_partial_many

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class MomentReport:
    q: int
    r: int
    H: int
    lhs: float
    rhs_shape: float
    ratio: float
    hypothesis_ok: bool
    statistic: str = ""


def _budget(table: PrefixTable, length: int, budget: int) -> None:
    if table.q * length > budget:
        raise BudgetExceeded(f"q*h = {table.q * length} above budget {budget}")


def moment_full(table: PrefixTable, h: int, r: int, budget: int = DEFAULT_BUDGET) -> float:
    """sum_{n=1}^{q} |S(n;h)|^(2r)."""
    _budget(table, h, budget)
    s = table.S(np.arange(1, table.q + 1), h)
    return float(np.sum(np.abs(s) ** (2 * r)))


def moment_max(table: PrefixTable, H: int, r: int, budget: int = DEFAULT_BUDGET) -> float:
    """sum_{n=1}^{q} max_{h<=H} |S(n;h)|^(2r)."""
    _budget(table, H, budget)
    m = max_partial_many(table, np.arange(1, table.q + 1), H)
    return float(np.sum(m ** (2 * r)))


def check_spacing(points: Sequence[int], H: int, q: int | None = None) -> None:
    pts = list(points)
    if q is not None and any(not 0 <= N < q for N in pts):
        raise SpacingViolated(f"points must lie in [0, {q})")
    for a, b in zip(pts, pts[1:]):
        if b - a < H:
            raise SpacingViolated(f"gap {b - a} between {a} and {b} is below H = {H}")


def spaced_max_moment(table: PrefixTable, points: Sequence[int], H: int, r: int = 1) -> float:
    """sum_j max_{h<=H} |S(N_j;h)|^(2r) for points with consecutive gaps >= H."""
    check_spacing(points, H, table.q)
    if not len(points):
        return 0.0
    return float(np.sum(max_partial_many(table, points, H) ** (2 * r)))


def disjoint_second_moment(table: PrefixTable, intervals: Sequence[tuple[int, int]]) -> float:
    """sum_j |S(M_j;h_j)|^2 over pairwise disjoint intervals (M_j, M_j+h_j] inside (0, q]."""
    ivs = sorted(intervals)
    for M, h in ivs:
        if M < 0 or h < 0 or M + h > table.q:
            raise OverlapDetected(f"interval ({M}, {M + h}] not inside (0, {table.q}]")
    for (M1, h1), (M2, _) in zip(ivs, ivs[1:]):
        if M2 < M1 + h1:
            raise OverlapDetected(f"({M1}, {M1 + h1}] meets ({M2}, ...]")
    if not ivs:
        return 0.0
    M = np.array([m for m, _ in ivs])
    h = np.array([x for _, x in ivs])
    return float(np.sum(np.abs(table.S(M, h)) ** 2))


def polya_vinogradov_max(table: PrefixTable) -> float:
    """max_{1<=N<=q} |chi(1) + ... + chi(N)| for primitive chi."""
    if not table.chi.is_primitive:
        raise NotPrimitive(f"character {table.chi.index} mod {table.q} has conductor {table.chi.conductor}")
    return float(np.abs(table.prefix[1:]).max())


def polya_vinogradov_sweep(q: int, chunk_elems: int = 1 << 22) -> dict[int, float]:
    """polya_vinogradov_max for every primitive character mod q, batched.

    Conjugate characters share the statistic, so only one of each pair is summed.
    """
    G = enumerate_characters(q)
    prim = [int(i) for i in G.primitive_indices()]
    todo = [i for i in prim if i <= G.conjugate_index(i)]
    ang = 2 * np.pi * np.arange(G.D) / G.D
    cos_t = np.append(np.cos(ang), 0.0)
    sin_t = np.append(np.sin(ang), 0.0)
    order = np.roll(np.arange(q), -1)  # n = 1, ..., q
    out: dict[int, float] = {}
    rows = max(1, chunk_elems // q)
    for s in range(0, len(todo), rows):
        idx = todo[s : s + rows]
        E = G.exponent_matrix(idx)[:, order]
        E[E < 0] = G.D
        re = np.cumsum(cos_t[E], axis=1)
        im = np.cumsum(sin_t[E], axis=1)
        m = np.sqrt((re * re + im * im).max(axis=1))
        for i, v in zip(idx, m):
            out[i] = float(v)
            out[G.conjugate_index(i)] = float(v)
    return out


# -- bound shapes with implied constant 1 -----------------------------------------


def _report(q, r, H, lhs, rhs, ok, stat):
    return MomentReport(q, r, H, lhs, rhs, lhs / rhs if rhs else math.inf, ok, stat)


def lemma1_report(table: PrefixTable, h: int, r: int, eps: float = 0.0) -> MomentReport:
    """Complete 2r-th moment against q^eps (q h^r + q^(1/2) h^(2r)), or q^(1+eps) h for r = 1.

    The hypothesis holds for r = 1, q cube-free, r = 2, or r = 3 with h^6 <= q.
    """
    q = table.q
    lhs = moment_full(table, h, r)
    if r == 1:
        rhs = q ** (1 + eps) * h
    else:
        rhs = q**eps * (q * h**r + q**0.5 * h ** (2 * r))
    cube_free = table.chi.group.factorization.is_cube_free
    ok = table.chi.is_primitive and (r in (1, 2) or cube_free or (r == 3 and h**6 <= q))
    return _report(q, r, h, lhs, rhs, ok, "complete moment")


def lemma2_report(table: PrefixTable, H: int, r: int, eps: float = 0.0) -> MomentReport:
    q = table.q
    lhs = moment_max(table, H, r)
    if r == 1:
        rhs = q ** (1 + eps) * H
    else:
        rhs = q**eps * (q * H**r + q**0.5 * H ** (2 * r))
    cube_free = table.chi.group.factorization.is_cube_free
    ok = table.chi.is_primitive and (r == 1 or cube_free or 2 <= r <= 3)
    return _report(q, r, H, lhs, rhs, ok, "maximal moment")


def lemma3_report(table: PrefixTable, points: Sequence[int], H: int) -> MomentReport:
    q = table.q
    lhs = spaced_max_moment(table, points, H, 1)
    rhs = q * math.log(q) ** 2
    return _report(q, 1, H, lhs, rhs, table.chi.is_primitive and H <= q, "spaced maximal second moment")


def disjoint_report(table: PrefixTable, intervals, eps: float = 0.25) -> MomentReport:
    q = table.q
    lhs = disjoint_second_moment(table, intervals)
    H = max((h for _, h in intervals), default=0)
    return _report(q, 1, H, lhs, q ** (1 + eps), table.chi.is_primitive, "disjoint second moment")
