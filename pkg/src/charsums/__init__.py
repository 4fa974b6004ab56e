"""Dirichlet characters, interval character sums and the counting machinery behind
Burgess-type bounds, with sweeps that measure each inequality at desk scale."""

from .arith import bertrand_prime, discrete_log, factorize, primes_in_window, primitive_root
from .burgess import BurgessInstance, SpacedFamily, choose_P, count_M, incidence_counts, verify_chain
from .characters import DirichletCharacter, UnityRoot, enumerate_characters, legendre_character
from .lattice import build_lattice, classify_case, count_points_in_box, reduce_basis
from .sums import PrefixTable, build_prefix, interval_sum, max_partial

__version__ = "0.1.0"
