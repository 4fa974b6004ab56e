"""Rank-3 congruence lattices {(x, y, z) : x*Mj - y*Mk = z mod l}.

Reduction is greedy: Gauss-reduce the two shortest vectors, replace the
third by its distance to the closest point of their span, repeat until
nothing shrinks.  In dimension 3 this ends in a Minkowski-reduced basis,
which is then ordered by sup-norm.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .arith import is_prime
from .errors import BudgetExceeded, DegenerateInput, NotPrime

# concrete constants standing in for the absolute constants of reduction theory
PRODUCT_CONSTANT = 16
C0 = 32


class Vec3(NamedTuple):
    x: int
    y: int
    z: int

    @property
    def sup_norm(self) -> int:
        return max(abs(self.x), abs(self.y), abs(self.z))

    @property
    def norm2(self) -> int:
        return self.x * self.x + self.y * self.y + self.z * self.z

    def __add__(self, other):
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scale(self, c: int) -> "Vec3":
        return Vec3(c * self.x, c * self.y, c * self.z)

    def dot(self, other) -> int:
        return self.x * other.x + self.y * other.y + self.z * other.z


def det3(a, b, c) -> int:
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


class Basis3(NamedTuple):
    b1: Vec3
    b2: Vec3
    b3: Vec3

    @property
    def det(self) -> int:
        return det3(*self)

    @property
    def sup_norms(self) -> tuple[int, int, int]:
        return tuple(b.sup_norm for b in self)

    @property
    def sup_product(self) -> int:
        return math.prod(self.sup_norms)

    def combine(self, lam) -> Vec3:
        return self.b1.scale(lam[0]) + self.b2.scale(lam[1]) + self.b3.scale(lam[2])

    def coordinates(self, x) -> tuple[int, int, int]:
        """Integer lambda with x = sum lambda_i b_i (Cramer's rule, exact)."""
        d = self.det
        if d == 0:
            raise DegenerateInput("singular basis")
        nums = (det3(x, self.b2, self.b3), det3(self.b1, x, self.b3), det3(self.b1, self.b2, x))
        if any(n % d for n in nums):
            raise ValueError(f"{tuple(x)} is not in the lattice")
        return tuple(n // d for n in nums)


def _normalize_sign(v: Vec3) -> Vec3:
    for c in v:
        if c:
            return v if c > 0 else v.scale(-1)
    return v


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b for b > 0."""
    return (2 * a + b) // (2 * b)


def _gauss(u: Vec3, v: Vec3) -> tuple[Vec3, Vec3]:
    if u.norm2 > v.norm2:
        u, v = v, u
    while True:
        v = v - u.scale(_round_div(u.dot(v), u.norm2))
        if v.norm2 >= u.norm2:
            return u, v
        u, v = v, u


def _closest_in_plane(t: Vec3, u: Vec3, v: Vec3) -> Vec3:
    """Closest point to t in the lattice spanned by a Gauss-reduced pair (u, v)."""
    uu, uv, vv = u.norm2, u.dot(v), v.norm2
    tu, tv = t.dot(u), t.dot(v)
    g = uu * vv - uv * uv
    a = math.floor(Fraction(tu * vv - tv * uv, g))
    b = math.floor(Fraction(tv * uu - tu * uv, g))
    best = None
    for i in range(a - 1, a + 3):
        for j in range(b - 1, b + 3):
            c = u.scale(i) + v.scale(j)
            d = (t - c).norm2
            if best is None or d < best[0]:
                best = (d, c)
    return best[1]


def _sort_key(v: Vec3):
    return (v.sup_norm, v.norm2, tuple(-abs(c) for c in v), tuple(-c for c in v))


def reduce_basis(basis) -> Basis3:
    """Minkowski-reduce a rank-3 integer basis, then order it by sup-norm."""
    b = [Vec3(*map(int, v)) for v in basis]
    if len(b) != 3 or det3(*b) == 0:
        raise DegenerateInput("need three linearly independent vectors")
    while True:
        b.sort(key=lambda v: v.norm2)
        b[0], b[1] = _gauss(b[0], b[1])
        w = b[2] - _closest_in_plane(b[2], b[0], b[1])
        if w.norm2 < b[2].norm2:
            b[2] = w
            continue
        break
    b = sorted((_normalize_sign(v) for v in b), key=_sort_key)
    return Basis3(*b)


@dataclass(frozen=True)
class CongruenceLattice:
    ell: int
    Mj: int
    Mk: int
    basis: Basis3

    def contains(self, v) -> bool:
        x, y, z = v
        return (x * self.Mj - y * self.Mk - z) % self.ell == 0

    @property
    def det(self) -> int:
        return abs(self.basis.det)


def _signed(a: int, m: int) -> int:
    """Representative of a mod m in [-m/2, m/2)."""
    r = a % m
    return r - m if 2 * r >= m else r


def build_lattice(ell: int, Mj: int, Mk: int) -> CongruenceLattice:
    if not is_prime(ell):
        raise NotPrime(f"{ell} is not prime")
    if not (0 <= Mj < ell and 0 <= Mk < ell):
        raise ValueError(f"Mj, Mk must lie in [0, {ell})")
    gens = [Vec3(1, 0, _signed(Mj, ell)), Vec3(0, 1, _signed(-Mk, ell)), Vec3(0, 0, ell)]
    basis = reduce_basis(gens)
    lat = CongruenceLattice(ell, Mj, Mk, basis)
    if lat.det != ell or not all(lat.contains(v) for v in basis):
        raise AssertionError("reduction broke the lattice")
    return lat


def _coefficient_bounds(basis: Basis3, B: int) -> list[int]:
    """|lambda_i| <= B * ||column i of basis^-1||_1, floored."""
    d = abs(basis.det)
    rows = [list(v) for v in basis]
    out = []
    for i in range(3):
        others = [rows[j] for j in range(3) if j != i]
        # column i of the inverse is the cross product of the other two rows over det
        cx = others[0][1] * others[1][2] - others[0][2] * others[1][1]
        cy = others[0][2] * others[1][0] - others[0][0] * others[1][2]
        cz = others[0][0] * others[1][1] - others[0][1] * others[1][0]
        out.append(B * (abs(cx) + abs(cy) + abs(cz)) // d)
    return out


def lattice_points_in_box(lat: CongruenceLattice, B: int, budget: int = 10**8):
    """Yield (lambda, points) blocks covering every lattice point with sup-norm <= B.

    The two longer basis vectors are enumerated within their dual bounds and
    the coefficient of b1 is solved as an integer interval per coordinate.
    """
    bas = lat.basis
    L = _coefficient_bounds(bas, B)
    if (2 * L[1] + 1) * (2 * L[2] + 1) > budget:
        raise BudgetExceeded(f"enumeration of {(2 * L[1] + 1) * (2 * L[2] + 1)} pairs above budget")
    b1 = np.array(bas.b1, dtype=np.int64)
    b2 = np.array(bas.b2, dtype=np.int64)
    b3 = np.array(bas.b3, dtype=np.int64)
    lam2 = np.arange(-L[1], L[1] + 1, dtype=np.int64)
    for l3 in range(-L[2], L[2] + 1):
        base = lam2[:, None] * b2[None, :] + l3 * b3[None, :]
        lo = np.full(lam2.size, -L[0], dtype=np.int64)
        hi = np.full(lam2.size, L[0], dtype=np.int64)
        ok = np.ones(lam2.size, dtype=bool)
        for c in range(3):
            w = base[:, c]
            if b1[c] == 0:
                ok &= np.abs(w) <= B
            elif b1[c] > 0:
                lo = np.maximum(lo, -((B + w) // b1[c]))
                hi = np.minimum(hi, (B - w) // b1[c])
            else:
                a = -b1[c]
                lo = np.maximum(lo, -((B - w) // a))
                hi = np.minimum(hi, (B + w) // a)
        yield lam2, l3, np.where(ok, np.maximum(hi - lo + 1, 0), 0), lo


def count_points_in_box(lat: CongruenceLattice, B: int, budget: int = 10**8) -> int:
    """Exact number of lattice points with sup-norm <= B, origin included."""
    if B < 0:
        return 0
    return int(sum(int(cnt.sum()) for _, _, cnt, _ in lattice_points_in_box(lat, B, budget)))


def enumerate_points(lat: CongruenceLattice, B: int, budget: int = 10**7) -> np.ndarray:
    """All lattice points with sup-norm <= B as an (n, 3) array."""
    out = []
    b = np.array(lat.basis, dtype=np.int64)
    for lam2, l3, cnt, lo in lattice_points_in_box(lat, B, budget):
        for i in np.flatnonzero(cnt):
            l1 = np.arange(lo[i], lo[i] + cnt[i])
            pts = l1[:, None] * b[0] + lam2[i] * b[1] + l3 * b[2]
            out.append(pts)
    return np.concatenate(out) if out else np.zeros((0, 3), dtype=np.int64)


class Case(enum.Enum):
    B1_LARGE = "B1_LARGE"
    RANK1 = "RANK1"
    RANK2_DELTA_ZERO = "RANK2_DELTA_ZERO"
    RANK2_DELTA_NONZERO = "RANK2_DELTA_NONZERO"
    FULL = "FULL"


@dataclass(frozen=True)
class CaseTag:
    case: Case
    delta: int | None = None
    threshold: int = 0


def classify_case(lat: CongruenceLattice, P: int, c0: int = C0) -> CaseTag:
    """Place the sup-norms of the reduced basis against T = 12 c0 P."""
    T = 12 * c0 * P
    n1, n2, n3 = lat.basis.sup_norms
    if n1 > T:
        return CaseTag(Case.B1_LARGE, None, T)
    if n2 > T:
        return CaseTag(Case.RANK1, None, T)
    if n3 > T:
        b1, b2 = lat.basis.b1, lat.basis.b2
        delta = b1.x * b2.y - b2.x * b1.y
        return CaseTag(Case.RANK2_DELTA_ZERO if delta == 0 else Case.RANK2_DELTA_NONZERO, delta, T)
    return CaseTag(Case.FULL, None, T)


def primitive_direction(lat: CongruenceLattice) -> tuple[int, int]:
    """Primitive (x, y) direction shared by b1 and b2 when their 2x2 minor vanishes."""
    for v in (lat.basis.b1, lat.basis.b2):
        g = math.gcd(v.x, v.y)
        if g:
            return v.x // g, v.y // g
    return 0, 0
