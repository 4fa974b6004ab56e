"""Seeded random instances shared by the pipeline tests and the acceptance suite."""

import math

import numpy as np

from charsums.arith import primes_in_window
from charsums.burgess import BurgessInstance
from charsums.characters import enumerate_characters
from charsums.experiments import random_spaced_family
from charsums.lattice import C0, build_lattice, enumerate_points


def random_instance(rng, qmin=60, qmax=500, Jmax=4, P_extra=20, r=2):
    while True:
        q = int(rng.integers(qmin, qmax + 1))
        G = enumerate_characters(q)
        prim = G.primitive_indices()
        Pmin = math.ceil(math.log(q) ** 2)
        Pmax = min((q - 1) // 2, Pmin + P_extra)
        if not len(prim) or Pmin > Pmax:
            continue
        chi = G[int(rng.choice(prim))]
        P = int(rng.integers(Pmin, Pmax + 1))
        J = int(rng.integers(1, Jmax + 1))
        # log-uniform H so both H < P and H >> P occur
        H = int(np.exp(rng.uniform(0, math.log(q // J))))
        H = max(1, min(H, q // J))
        points = random_spaced_family(q, H, J, rng)
        return BurgessInstance.build(chi, r, H, points, P=P)


def random_instances(n, seed, **kw):
    rng = np.random.default_rng(seed)
    return [random_instance(rng, **kw) for _ in range(n)]


def oracle_mismatches(inst, c0=2):
    """Every disagreement between the counting kernels and the nested-loop oracle, as text.

    Also returns the decomposition so callers can inspect it.
    """
    from charsums.arith import bertrand_prime
    from charsums.burgess import count_M, delta_zero_violations, incidence_counts, scaled_points
    from charsums.lattice import Case, build_lattice, classify_case
    from oracles import brute_incidence, brute_M

    bad = []
    primes, pts = list(inst.window.primes), list(inst.family.points)
    q, H, P = inst.q, inst.H, inst.P
    inc = incidence_counts(inst)
    A = brute_incidence(q, H, P, primes, pts)
    if inc.as_dict() != A:
        bad.append("A(n) differs")
    if inc.N != sum(v * v for v in A.values()):
        bad.append("N differs")
    dec = count_M(inst, c0=c0)
    M, M1, pair, wit = brute_M(q, H, P, primes, pts)
    if (dec.M, dec.M1, dec.pair_M2) != (M, M1, pair):
        bad.append(f"M counts differ: {(dec.M, dec.M1)} vs {(M, M1)}")
    if dec.M != dec.M1 + dec.M2 or dec.M2 != dec.M3 + dec.M4:
        bad.append("M split does not add up")
    if not inc.N <= (H // P + 1) * dec.M:
        bad.append(f"N = {inc.N} above (H//P + 1) M = {(H // P + 1) * dec.M}")
    if wit:
        ell = bertrand_prime(q, H)
        Ms = scaled_points(q, H, inst.family, ell)
        for j, k, p1, p2, a1, a2 in wit:
            # each unequal-prime sextuple gives the short lattice vector (p2, p1, z)
            z = p2 * Ms[j] - p1 * Ms[k] - ell * (a1 * p2 - a2 * p1)
            lat = build_lattice(ell, Ms[j], Ms[k])
            if not (lat.contains((p2, p1, z)) and abs(z) <= 12 * P):
                bad.append(f"sextuple {(j, k, p1, p2, a1, a2)} gives no short lattice vector")
            tag = classify_case(lat, P, c0)
            if dec.pair_tags.get((j, k)) != tag:
                bad.append(f"tag of pair {(j, k)} differs")
            if tag.case is Case.RANK2_DELTA_ZERO and lat.basis.coordinates((p2, p1, z))[2] != 0:
                bad.append("short vector outside the rank-2 span")
    if delta_zero_violations(inst, dec):
        bad.append("vanishing-minor direction does not give the prime pair")
    return bad, dec


def random_lattices(n, seed, ell_max=10**6):
    rng = np.random.default_rng(seed)
    small = primes_in_window(1, ell_max).primes
    out = []
    for _ in range(n):
        # log-uniform prime size so small and large moduli both appear
        target = np.exp(rng.uniform(np.log(2), np.log(ell_max)))
        ell = small[min(len(small) - 1, int(np.searchsorted(small, target)))]
        out.append(build_lattice(ell, int(rng.integers(ell)), int(rng.integers(ell))))
    return out


def coefficient_violations(lat, B, c0=C0):
    """Points with sup-norm <= B whose coordinates break |lambda_i| |b_i| <= c0 |x|, in integers."""
    pts = enumerate_points(lat, B)
    pts = pts[np.any(pts != 0, axis=1)]
    M = np.array(lat.basis, dtype=np.int64)  # rows b1, b2, b3
    d = int(round(np.linalg.det(M)))
    adj = np.round(np.linalg.inv(M) * d).astype(np.int64)  # x = lambda M  =>  lambda d = x adj
    lam_d = pts @ adj
    if np.any(lam_d % d):
        return len(pts)
    sup = np.abs(pts).max(axis=1)
    norms = np.array(lat.basis.sup_norms, dtype=np.int64)
    return int(np.sum(np.abs(lam_d) * norms[None, :] > c0 * sup[:, None] * abs(d)))
