"""Experiment sweeps: configuration, modulus families, theorem and chain checks, fits."""

from __future__ import annotations

import ast
import json
import math
import operator
import re
from dataclasses import dataclass, field, fields
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .arith import factorize, primes_in_window
from .burgess import BurgessInstance, choose_P, verify_chain
from .characters import enumerate_characters
from .errors import CharSumError, ConfigError, HTooSmall, InsufficientSpread, PRangeEmpty
from .report import ReportRow
from .sums import PrefixTable, max_partial_many

FAMILIES = ("primes", "prime_squares", "cube_free", "cube_full", "explicit_list")


@dataclass
class ExperimentConfig:
    moduli_family: str = "primes"
    q_range: tuple[int, int] = (100, 1000)
    characters_per_q: int = 1
    r: int = 2
    H_rule: str = "q^{1/(2r)+0.3}"
    J: int = 3
    seed: int = 0
    ratio_cap: float = 100.0
    eps_slack: float = 0.25
    moduli: list[int] | None = None
    max_moduli: int | None = None
    character_kind: str = "primitive"
    characters: list[int] | None = None
    points: list[int] | None = None
    budget: int = 10**9

    def __post_init__(self):
        if self.moduli_family not in FAMILIES:
            raise ConfigError(f"unknown moduli_family {self.moduli_family!r}")
        lo, hi = self.q_range = tuple(int(x) for x in self.q_range)
        if not 2 <= lo <= hi:
            raise ConfigError(f"empty q_range {self.q_range}")
        if self.moduli_family == "explicit_list" and not self.moduli:
            raise ConfigError("explicit_list needs 'moduli'")
        if self.r < 1 or self.J < 1 or self.characters_per_q < 1:
            raise ConfigError("r, J and characters_per_q must be positive")
        if self.character_kind not in ("primitive", "quadratic"):
            raise ConfigError(f"unknown character_kind {self.character_kind!r}")
        compile_rule(self.H_rule)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


# -- H rules such as "q^{1/(2r)+0.3}" ----------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"log": math.log, "sqrt": math.sqrt, "ceil": math.ceil, "floor": math.floor}


def compile_rule(rule: str) -> Callable[[int, int], float]:
    text = rule.replace("^", "**").replace("{", "(").replace("}", ")")
    # implicit products: 2r, 2(q), (a)(b), (a)q
    text = re.sub(r"(\d)(?![eE][-+]?\d)(?=[A-Za-z(])", r"\1*", text)
    text = re.sub(r"\)(?=[A-Za-z0-9(])", ")*", text)
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse H_rule {rule!r}") from exc

    def ev(node, env):
        if isinstance(node, ast.Expression):
            return ev(node.body, env)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id in env:
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, env), ev(node.right, env))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand, env)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            return _FUNCS[node.func.id](*(ev(a, env) for a in node.args))
        raise ConfigError(f"unsupported element in H_rule {rule!r}")

    ev(tree, {"q": 2, "r": 1})
    return lambda q, r: float(ev(tree, {"q": q, "r": r}))


def H_for(config: ExperimentConfig, q: int) -> int:
    return min(q, max(1, math.ceil(compile_rule(config.H_rule)(q, config.r) - 1e-12)))


# -- moduli, characters and spaced families ---------------------------------------


def moduli_for(config: ExperimentConfig) -> list[int]:
    lo, hi = config.q_range
    fam = config.moduli_family
    if fam == "explicit_list":
        qs = sorted(set(int(q) for q in config.moduli))
    elif fam == "primes":
        qs = [p for p in primes_in_window(max(1, lo - 1), hi).primes if p > 2]
    elif fam == "prime_squares":
        qs = [p * p for p in primes_in_window(1, math.isqrt(hi)).primes if lo <= p * p <= hi and p > 2]
    else:
        want_free = fam == "cube_free"
        qs = []
        for q in range(max(3, lo), hi + 1):
            if q % 4 == 2:
                continue  # no primitive characters
            f = factorize(q)
            if (f.is_cube_free if want_free else f.is_cube_full):
                qs.append(q)
    if config.max_moduli and len(qs) > config.max_moduli:
        qs = _log_spaced(qs, config.max_moduli)
    return qs


def _log_spaced(qs: list[int], n: int) -> list[int]:
    arr = np.array(qs, dtype=float)
    if n == 1:
        return [qs[0]]
    targets = np.exp(np.linspace(np.log(arr[0]), np.log(arr[-1]), n))
    picked = sorted({qs[int(np.argmin(np.abs(arr - t)))] for t in targets})
    return picked


def characters_for(config: ExperimentConfig, q: int) -> list[int]:
    G = enumerate_characters(q)
    if config.characters is not None:
        return sorted(i for i in config.characters if 0 <= i < len(G))
    if config.character_kind == "quadratic":
        return [i for i in G.real_indices() if G.is_primitive_index(i)][: config.characters_per_q]
    k = config.characters_per_q
    rng = np.random.default_rng([config.seed, q])
    if len(G) <= 20000:
        prim = G.primitive_indices()
        if len(prim) <= k:
            return [int(i) for i in prim]
        return sorted(int(i) for i in rng.choice(prim, size=k, replace=False))
    chosen: set[int] = set()
    while len(chosen) < k:
        i = int(rng.integers(len(G)))
        if G.is_primitive_index(i):
            chosen.add(i)
    return sorted(chosen)


def random_spaced_family(q: int, H: int, J: int, rng: np.random.Generator) -> list[int]:
    """J points in [0, q) with consecutive gaps >= H, gaps uniform on [H, H + (q - J H)/J]."""
    if J * H > q:
        raise ConfigError(f"J*H = {J * H} exceeds q = {q}")
    slack = (q - J * H) // J
    gaps = rng.integers(H, H + slack, size=J, endpoint=True)
    pts = np.cumsum(gaps) - H
    return [int(x) for x in pts]


def family_for(config: ExperimentConfig, q: int, index: int, H: int) -> list[int]:
    if config.points is not None:
        return [int(x) for x in config.points]
    return random_spaced_family(q, H, config.J, np.random.default_rng([config.seed, q, index, 1]))


# -- hypothesis flags --------------------------------------------------------------


def theorem_conditions(q: int, r: int, H: int) -> list[str]:
    """Which of the three alternative hypotheses hold; H > q^(1/(2r)) stands in for H >= q^(1/(2r)+eps)."""
    above = H ** (2 * r) > q
    out = []
    if r == 1:
        out.append("COND_I")
    if r <= 3 and above:
        out.append("COND_II")
    if factorize(q).is_cube_free and above:
        out.append("COND_III")
    return out or ["HYPOTHESIS_VIOLATED"]


def lemma_conditions(q: int, r: int, H: int) -> list[str]:
    out = []
    if r < 2:
        out.append("HYPOTHESIS_VIOLATED:r<2")
    if not H ** (2 * r) > q:
        out.append("HYPOTHESIS_VIOLATED:H<=q^(1/(2r))")
    if r > 3 and not factorize(q).is_cube_free:
        out.append("HYPOTHESIS_VIOLATED:q_not_cube_free_and_r>3")
    return out or ["LEMMA_HYPOTHESIS_OK"]


# -- sweeps --------------------------------------------------------------------------


def theorem_shape(q: int, r: int, H: int, eps: float) -> float:
    return H ** (3 * r - 3) * q ** (0.75 + 0.75 / r + eps)


def _nan_row(q, index, r, H, J, flags) -> ReportRow:
    nan = math.nan
    return ReportRow(q, index, r, H, 0, J, nan, nan, nan, flags=tuple(flags))


def run_theorem_check(config: ExperimentConfig) -> list[ReportRow]:
    """One row per (q, character): the 3r-th moment of maximal sums over a spaced family."""
    rows = []
    r = config.r
    for q in moduli_for(config):
        G = enumerate_characters(q)
        H = H_for(config, q)
        for index in characters_for(config, q):
            flags = theorem_conditions(q, r, H)
            try:
                pts = family_for(config, q, index, H)
                table = PrefixTable(G[index])
                lhs = float(np.sum(max_partial_many(table, pts, H) ** (3 * r)))
            except CharSumError as exc:
                rows.append(_nan_row(q, index, r, H, config.J, flags + [f"ERROR:{type(exc).__name__}"]))
                continue
            rhs = theorem_shape(q, r, H, config.eps_slack)
            rhs0 = theorem_shape(q, r, H, 0.0)
            flags.append(f"unslacked_ratio={lhs / rhs0:.6g}")
            if lhs / rhs > config.ratio_cap:
                flags.append("CAP_EXCEEDED")
            rows.append(ReportRow(q, index, r, H, 0, len(pts), lhs, rhs, lhs / rhs, flags=tuple(flags)))
    return sorted(rows, key=lambda row: (row.q, row.chi))


def run_chain_check(config: ExperimentConfig, cross_check: Callable | None = None) -> list[ReportRow]:
    """One row per (q, character) with the counting-chain ratios.

    ``cross_check(instance, report)`` may return False to flag an oracle mismatch.
    """
    rows = []
    r = config.r
    for q in moduli_for(config):
        G = enumerate_characters(q)
        H = H_for(config, q)
        for index in characters_for(config, q):
            flags = lemma_conditions(q, r, H)
            try:
                choice = choose_P(q, H, r)
            except HTooSmall:
                rows.append(_nan_row(q, index, r, H, config.J, flags + ["H_TOO_SMALL"]))
                continue
            except PRangeEmpty:
                rows.append(_nan_row(q, index, r, H, config.J, flags + ["P_RANGE_EMPTY"]))
                continue
            try:
                pts = family_for(config, q, index, H)
                inst = BurgessInstance.build(G[index], r, H, pts, P=choice.P)
                rep = verify_chain(inst, config.ratio_cap, config.eps_slack, config.budget)
            except CharSumError as exc:
                rows.append(_nan_row(q, index, r, H, config.J, flags + [f"ERROR:{type(exc).__name__}"]))
                continue
            if choice.oversized:
                flags.append("P_OVERSIZED")
            if not rep.hard_ok:
                flags.append("HARD_FAIL")
            if not rep.within_cap:
                flags.append("CAP_EXCEEDED")
            if rep.ell_divides_delta:
                flags.append(f"ELL_DIVIDES_DELTA={rep.ell_divides_delta}")
            if cross_check is not None and not cross_check(inst, rep):
                flags.append("ORACLE_MISMATCH")
            rows.append(
                ReportRow(
                    q, index, r, H, choice.P, inst.J, rep.lhs, rep.big_shape, rep.big_ratio,
                    rep.m1_ratio, rep.m3_ratio, rep.m4_ratio, rep.n_ratio, rep.total_ratio, tuple(flags),
                )
            )
    return sorted(rows, key=lambda row: (row.q, row.chi))


# -- post-processing -----------------------------------------------------------------


def dyadic_classify(values: Sequence[float], r: int) -> dict[int, int]:
    """Count values by the power of two V with V/2 < value^r <= V; value^r <= 1 goes to V = 1."""
    out: dict[int, int] = {}
    for v in values:
        if v < 0:
            raise ValueError(f"negative value {v}")
        x = float(v) ** r
        if x <= 1:
            V = 1
        else:
            m, e = math.frexp(x)
            V = 2 ** (e - 1) if m == 0.5 else 2**e
        out[V] = out.get(V, 0) + 1
    return dict(sorted(out.items()))


class Fit(NamedTuple):
    slope: float
    intercept: float


def fit_loglog(qs: Sequence[float], values: Sequence[float]) -> Fit:
    x = np.log(np.asarray(qs, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size < 3 or x.max() - x.min() < math.log(10):
        raise InsufficientSpread(f"{x.size} usable points spanning {np.ptp(x) if x.size else 0:.3g} in log q")
    xm, ym = x.mean(), y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))
    return Fit(slope, float(ym - slope * xm))


def burgess_statistic(row: ReportRow) -> float:
    """Power mean (lhs/J)^(1/(3r)) of the maximal sums, divided by H^(1 - 1/r)."""
    return (row.lhs / row.J) ** (1 / (3 * row.r)) / row.H ** (1 - 1 / row.r)


def fit_exponent(rows: Sequence[ReportRow], stat: str = "lhs") -> Fit:
    """Least-squares slope of log(statistic) against log q."""
    if stat == "lhs":
        vals = [row.lhs for row in rows]
    elif stat == "burgess":
        vals = [burgess_statistic(row) for row in rows]
    else:
        raise ValueError(f"unknown statistic {stat!r}")
    return fit_loglog([row.q for row in rows], vals)


def theorem_q_exponent(r: int, h_exponent: float) -> float:
    """q-exponent of H^(3r-3) q^(3/4+3/(4r)) when H = q^h_exponent."""
    return (3 * r - 3) * h_exponent + 0.75 + 0.75 / r


def burgess_q_exponent(r: int) -> float:
    return (r + 1) / (4 * r * r)
