"""Seeded falsification suites for the norm inequalities and embedding bounds.

Every suite draws its trials from a per-trial generator derived from
``(seed, suite, trial index)``, evaluates one or more checks of the form
``lhs <= rhs`` (or ``lhs == rhs``) with an explicit tolerance, and records
the margin.  Failing trials are kept, never redrawn.
"""
import math
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .core import (
    AtomicVector,
    DyadicStep,
    RearrangementProfile,
    as_params,
    lq1_norm,
    make_params,
    pairing,
    quasi_norm,
    weak_norm,
)
from .embeddings import (
    LevelStack,
    build_layout,
    p_project,
    phi_eval,
    phi_nj_eval,
    r_embed,
    r_profile,
    r_split,
    restrict_block,
    restrict_tower,
    shift_snj,
    stack_norm,
    t_embed,
    tower_limit,
    unit_stack,
    w_project,
    yk_check,
    yk_reconstruct,
)

__all__ = [
    "DISTRIBUTIONS",
    "SUITES",
    "TrialConfig",
    "SuiteReport",
    "gen_atoms",
    "gen_step",
    "gen_stack",
    "oracle_norm",
    "run_suite",
    "chain_report",
]

DISTRIBUTIONS = ("uniform", "heavy_tail", "sparse")
ORACLE_LIMIT = 20
R_MAX_LEVEL = 5

IDENTITY_TOL = 1e-12
NORM_TOL = 1e-9


def _rng(seed):
    return np.random.default_rng(seed)


def gen_atoms(seed, length, distribution="uniform"):
    """Random atoms.

    ``uniform`` draws from [-1, 1); ``heavy_tail`` draws magnitudes
    ``U**-0.5`` with ``U`` uniform on [1e-4, 1), so values reach 100;
    ``sparse`` keeps at most ``1 + length // 4`` nonzero uniform entries.
    """
    rng = _rng(seed)
    if distribution == "uniform":
        vals = rng.uniform(-1.0, 1.0, length)
    elif distribution == "heavy_tail":
        signs = rng.choice([-1.0, 1.0], length)
        vals = signs * rng.uniform(1e-4, 1.0, length) ** -0.5
    elif distribution == "sparse":
        vals = np.zeros(length)
        nnz = min(length, 1 + length // 4)
        where = rng.choice(length, nnz, replace=False) if length else []
        vals[where] = rng.uniform(-1.0, 1.0, nnz)
    else:
        raise ValueError(f"unknown distribution {distribution!r}; expected one of {DISTRIBUTIONS}")
    return AtomicVector(vals)


def gen_step(seed, k, level, distribution="uniform"):
    return DyadicStep(k, level, gen_atoms(seed, k << level, distribution).atoms)


def gen_stack(seed, k, N, distribution="uniform", params=None, in_yk=False):
    """Random stack with independent levels.

    With ``params`` each level ``n`` is scaled by ``(k 2**n)**(-1/p)`` so that
    all levels have comparable norms.  ``in_yk`` passes the result through
    :func:`p_project`, which needs ``params``.
    """
    rng = _rng(seed)
    levels = []
    for n in range(N + 1):
        lev = gen_atoms(rng, k << n, distribution).atoms
        if params is not None:
            lev = lev * float(k << n) ** (-1.0 / as_params(params).p)
        levels.append(lev)
    x = LevelStack(k, tuple(levels))
    if in_yk:
        if params is None:
            raise ValueError("sampling inside Y_k needs params")
        x = p_project(x, params)
    return x


def oracle_norm(a, params):
    """Brute-force ``max_B sum_B |a_i| / |B|**(1/q)`` over all nonempty ``B``."""
    params = as_params(params)
    if len(a) > ORACLE_LIMIT:
        raise ValueError(f"subset enumeration is limited to {ORACLE_LIMIT} atoms, got {len(a)}")
    return kernels.subset_oracle(np.ascontiguousarray(np.abs(a.atoms)), params.q)


@dataclass
class TrialConfig:
    suite: str
    p_values: tuple = (2.0,)
    trials: int = 100
    seed: int = 0
    max_atoms: int = None
    max_level: int = None
    max_k: int = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        self.p_values = tuple(make_params(p).p for p in self.p_values)
        if not self.p_values:
            raise ValueError("at least one exponent p is required")


@dataclass
class SuiteReport:
    suite: str
    p_values: tuple
    seed: int
    trials: int
    passed: bool
    max_ratio: float
    min_margin: float
    pass_count: int
    records: list = field(default_factory=list)
    wall_time: float = 0.0

    def to_dict(self):
        p = self.p_values[0] if len(self.p_values) == 1 else list(self.p_values)
        return {
            "suite": self.suite,
            "p": p,
            "seed": self.seed,
            "trials": self.trials,
            "pass": self.passed,
            "max_ratio": self.max_ratio,
            "min_margin": self.min_margin,
            "pass_count": self.pass_count,
            "wall_time": self.wall_time,
            "records": self.records,
        }


class _Trial:
    def __init__(self):
        self.inputs = {}
        self.checks = []
        self.ratio = None

    def le(self, name, lhs, rhs, tol):
        lhs, rhs = float(lhs), float(rhs)
        margin = rhs - lhs
        self.checks.append(
            {"name": name, "lhs": lhs, "rhs": rhs, "tol": tol, "margin": margin, "pass": margin >= -tol}
        )

    def eq(self, name, lhs, rhs, tol):
        lhs, rhs = float(lhs), float(rhs)
        margin = -abs(lhs - rhs)
        self.checks.append(
            {"name": name, "lhs": lhs, "rhs": rhs, "tol": tol, "margin": margin, "pass": margin >= -tol}
        )

    def observe(self, ratio):
        if ratio is not None and math.isfinite(ratio):
            self.ratio = ratio if self.ratio is None else max(self.ratio, ratio)


def _ratio(num, den):
    return num / den if den > 0 else None


@dataclass(frozen=True)
class _Caps:
    max_atoms: int
    max_level: int
    max_k: int


def _pick_k(rng, caps):
    choices = [k for k in (1, 2, 4) if k <= caps.max_k] or [1]
    return int(rng.choice(choices))


def _pick_dist(rng):
    return str(rng.choice(DISTRIBUTIONS))


def _suite_norm_oracle(rng, params, caps, t):
    length = int(rng.integers(1, caps.max_atoms + 1))
    dist = _pick_dist(rng)
    t.inputs.update(length=length, distribution=dist)
    a = gen_atoms(rng, length, dist)
    w = weak_norm(a, params)
    o = oracle_norm(a, params)
    t.eq("weak_norm == oracle_norm", w, o, NORM_TOL * max(1.0, o))
    t.observe(abs(w - o) / max(1.0, o))


def _suite_sandwich(rng, params, caps, t):
    length = int(rng.integers(1, caps.max_atoms + 1))
    k = _pick_k(rng, caps)
    level = int(rng.integers(0, caps.max_level + 1))
    dist = _pick_dist(rng)
    t.inputs.update(length=length, k=k, level=level, distribution=dist)
    for label, f in (
        ("atomic", gen_atoms(rng, length, dist)),
        ("step", gen_step(rng, k, level, dist)),
    ):
        w = weak_norm(f, params)
        qn = quasi_norm(f, params)
        t.le(f"{label}: quasi <= weak", qn, w, IDENTITY_TOL)
        t.le(f"{label}: weak <= q*quasi", w, params.q * qn, IDENTITY_TOL)
        t.observe(_ratio(w, qn))


def _suite_p_estimate(rng, params, caps, t):
    length = int(rng.integers(2, max(2, caps.max_atoms) + 1))
    dist = _pick_dist(rng)
    t.inputs.update(length=length, distribution=dist)
    a = gen_atoms(rng, length, dist).atoms
    mask = rng.random(length) < 0.5
    f = AtomicVector(np.where(mask, a, 0.0))
    g = AtomicVector(np.where(mask, 0.0, a))
    p = params.p
    lhs = weak_norm(AtomicVector(f.atoms + g.atoms), params) ** p
    rhs = weak_norm(f, params) ** p + weak_norm(g, params) ** p
    t.le("||f+g||^p <= ||f||^p + ||g||^p", lhs, rhs, NORM_TOL)
    t.observe(_ratio(lhs, rhs))


def _top_indicators(values):
    order = np.argsort(-np.abs(values), kind="stable")
    signs = np.sign(values)
    for j in range(1, values.shape[0] + 1):
        b = np.zeros_like(values)
        b[order[:j]] = signs[order[:j]]
        yield b


def _pairing_checks(t, label, f, g, make, params):
    lhs = abs(pairing(f, g))
    t.le(f"{label}: |<f,g>| <= |||f||| ||g||_q1", lhs, quasi_norm(f, params) * lq1_norm(g, params), NORM_TOL)
    w = weak_norm(f, params)
    best = 0.0
    for b in _top_indicators(make(f)):
        bb = _like(f, b)
        denom = lq1_norm(bb, params)
        if denom > 0:
            best = max(best, pairing(f, bb) / denom)
    t.le(f"{label}: ||f||/q <= sup <f,b>/||b||_q1", w / params.q, best, NORM_TOL)
    t.le(f"{label}: sup <f,b>/||b||_q1 <= ||f||", best, w, NORM_TOL)
    t.observe(_ratio(w, best))


def _like(f, values):
    if isinstance(f, AtomicVector):
        return AtomicVector(values)
    return DyadicStep(f.k, f.level, values)


def _suite_pairing(rng, params, caps, t):
    length = int(rng.integers(1, caps.max_atoms + 1))
    k = _pick_k(rng, caps)
    level = int(rng.integers(0, caps.max_level + 1))
    dist = _pick_dist(rng)
    t.inputs.update(length=length, k=k, level=level, distribution=dist)
    f = gen_atoms(rng, length, dist)
    g = gen_atoms(rng, length, _pick_dist(rng))
    _pairing_checks(t, "atomic", f, g, lambda v: v.atoms, params)
    f = gen_step(rng, k, level, dist)
    g = gen_step(rng, k, level, _pick_dist(rng))
    _pairing_checks(t, "step", f, g, lambda v: v.values, params)


def _suite_boundf(rng, params, caps, t):
    k = _pick_k(rng, caps)
    N = int(rng.integers(0, caps.max_level + 1))
    dist = _pick_dist(rng)
    t.inputs.update(k=k, N=N, distribution=dist)
    f = gen_step(rng, k, N, dist)
    norm_f = weak_norm(f, params)
    sums = np.asarray(f.values)
    for n in range(N, -1, -1):
        integrals = AtomicVector(math.ldexp(1.0, -N) * sums)
        lhs = 2.0 ** (n / params.q) * quasi_norm(integrals, params)
        t.le(f"level {n}: 2^(n/q) |||integrals||| <= ||f||", lhs, norm_f, NORM_TOL)
        t.observe(_ratio(lhs, norm_f))
        sums = sums[0::2] + sums[1::2]


def _suite_t_embed(rng, params, caps, t):
    k = _pick_k(rng, caps)
    N = int(rng.integers(0, caps.max_level + 1))
    dist = _pick_dist(rng)
    t.inputs.update(k=k, N=N, distribution=dist)
    f = gen_step(rng, k, N, dist)
    x = t_embed(f, params)
    nf = weak_norm(f, params)
    nx = stack_norm(x, params)
    t.le("||f||/q <= ||T f||", nf / params.q, nx, NORM_TOL)
    t.le("||T f|| <= q ||f||", nx, params.q * nf, NORM_TOL)
    t.le("Y_k violation of T f", yk_check(x, params).max_violation, 0.0, IDENTITY_TOL)
    back = yk_reconstruct(x, params)
    t.le("roundtrip error", float(np.max(np.abs(back.values - f.values))), 0.0, IDENTITY_TOL)
    t.observe(_ratio(nx, nf))


def _zero_sum_level(rng, length, dist):
    half = gen_atoms(rng, length // 2, dist).atoms
    vals = np.concatenate([half, -half, np.zeros(length % 2)])
    return rng.permutation(vals)


def _suite_phi(rng, params, caps, t):
    k = _pick_k(rng, caps)
    N = int(rng.integers(0, caps.max_level + 1))
    dist = _pick_dist(rng)
    a = float(rng.uniform(-10.0, 10.0))
    n = int(rng.integers(0, N + 1))
    t.inputs.update(k=k, N=N, distribution=dist, a=a, n=n)

    levels = [gen_atoms(rng, k << m, dist).atoms for m in range(N)]
    levels.append(_zero_sum_level(rng, k << N, dist))
    z = LevelStack(k, tuple(levels))
    t.eq("Phi(z) == 0 on Z_k", phi_eval(z, params), 0.0, 0.0)
    x = z + a * unit_stack(k, N, params)
    phi = phi_eval(x, params)
    t.eq("|Phi(z + a u)| == |a|", abs(phi), abs(a), NORM_TOL)
    t.le("|a| <= ||z + a u||", abs(a), stack_norm(x, params), NORM_TOL)

    y = gen_stack(rng, k, N, dist, params=params)
    ny = stack_norm(y, params)
    py = phi_eval(y, params)
    t.le("|Phi(y)| <= ||y||", abs(py), ny, NORM_TOL)
    t.observe(_ratio(abs(py), ny))
    terms = [phi_nj_eval(y, n, j, params) for j in range(1, (k << n) + 1)]
    scale = max(1.0, max(abs(v) for v in terms))
    t.eq(f"sum_j Phi_(n,j)(y) == Phi(y), n={n}", math.fsum(terms), py, IDENTITY_TOL * scale)
    bound = float(k << n) ** (-1.0 / params.q) * ny
    t.le(f"max_j |Phi_(n,j)(y)| <= (k 2^n)^(-1/q) ||y||", max(abs(v) for v in terms), bound, NORM_TOL)
    if n < N:
        worst = 0.0
        for j, v in enumerate(terms, start=1):
            pair = phi_nj_eval(y, n + 1, 2 * j - 1, params) + phi_nj_eval(y, n + 1, 2 * j, params)
            worst = max(worst, abs(pair - v))
        t.le("Phi_(n+1,2j-1) + Phi_(n+1,2j) - Phi_(n,j)", worst, 0.0, IDENTITY_TOL * scale)
    j = int(rng.integers(1, (k << n) + 1))
    moved = shift_snj(restrict_block(y, n, j), n, j)
    t.eq(f"Phi_(n,{j})(y) == Phi_(n,1)(S_(n,{j}) chi_A y)", terms[j - 1], phi_nj_eval(moved, n, 1, params), 0.0)


def _suite_lemma_bound(rng, params, caps, t):
    i = int(rng.integers(1, 9))
    L = int(rng.integers(1, 33))
    dist = _pick_dist(rng)
    t.inputs.update(i=i, L=L, distribution=dist)
    b = gen_atoms(rng, i, _pick_dist(rng)).atoms
    c = gen_atoms(rng, L * i, dist).atoms
    nc = weak_norm(AtomicVector(c), params)
    if nc > 0:
        c = c / nc
    strided = AtomicVector(c.reshape(L, i) @ b)
    lhs = weak_norm(strided, params)
    q = params.q
    j = np.arange(1, i + 1, dtype=np.float64)
    bstar = np.sort(np.abs(b))[::-1]
    rhs = q * q * float(np.sum(bstar * (j ** (1.0 / q) - (j - 1.0) ** (1.0 / q))))
    t.le("||(sum_j b_j c_(li+j))_l|| <= q^2 sum b*_j (j^(1/q)-(j-1)^(1/q))", lhs, rhs, NORM_TOL)
    t.observe(_ratio(lhs, rhs))


def _suite_lemma_compare(rng, params, caps, t):
    k = _pick_k(rng, caps)
    N = int(rng.integers(0, caps.max_level + 1))
    n = int(rng.integers(0, N + 1))
    dist = _pick_dist(rng)
    in_yk = bool(rng.random() < 0.25)
    t.inputs.update(k=k, N=N, n=n, distribution=dist, in_yk=in_yk)
    x = gen_stack(rng, k, N, dist, params=params, in_yk=in_yk)
    nx = stack_norm(x, params)
    if nx > 0:
        x = x * (1.0 / nx)
    a = gen_atoms(rng, k << n, _pick_dist(rng)).atoms
    lhs = abs(math.fsum(a[j - 1] * phi_nj_eval(x, n, j, params) for j in range(1, (k << n) + 1)))
    rhs = params.q * k ** (-1.0 / params.q) * lq1_norm(DyadicStep(k, n, a), params)
    t.le("|sum a_j Phi_(n,j)(x)| <= q k^(-1/q) ||sum a_j chi||_q1", lhs, rhs, NORM_TOL)
    t.observe(_ratio(lhs, rhs))


def _suite_p_project(rng, params, caps, t):
    k = _pick_k(rng, caps)
    N = int(rng.integers(0, caps.max_level + 1))
    dist = _pick_dist(rng)
    t.inputs.update(k=k, N=N, distribution=dist)
    x = gen_stack(rng, k, N, dist, params=params if rng.random() < 0.5 else None)
    y = p_project(x, params)
    nx = stack_norm(x, params)
    ny = stack_norm(y, params)
    t.le("||P x|| <= q^2 ||x||", ny, params.q ** 2 * nx, NORM_TOL)
    t.le("Y_k violation of P x", yk_check(y, params).max_violation, 0.0, IDENTITY_TOL)
    t.eq("P P x == P x", float(not p_project(y, params) == y), 0.0, 0.0)
    w = t_embed(gen_step(rng, k, N, dist), params)
    gap = max(float(np.max(np.abs(a - b))) for a, b in zip(p_project(w, params).levels, w.levels))
    t.le("P fixes Y_k", gap, 0.0, IDENTITY_TOL)
    t.observe(_ratio(ny, nx))


def _r_stack(rng, caps, params, t):
    N = int(rng.integers(0, min(caps.max_level, R_MAX_LEVEL) + 1))
    dist = _pick_dist(rng)
    in_yk = bool(rng.random() < 0.25)
    t.inputs.update(k=1, N=N, distribution=dist, in_yk=in_yk)
    return gen_stack(rng, 1, N, dist, params=params, in_yk=in_yk)


_LAYOUTS = {}


def _layout(N):
    if N not in _LAYOUTS:
        _LAYOUTS[N] = build_layout(N)
    return _LAYOUTS[N]


def _suite_r_embed(rng, params, caps, t):
    x = _r_stack(rng, caps, params, t)
    layout = _layout(x.N)
    nx = stack_norm(x, params)
    nr = weak_norm(r_embed(x, layout, params), params)
    t.le("||x|| <= ||R x||", nx, nr, NORM_TOL)
    t.le("||R x|| <= 2^(1+1/p) ||x||", nr, 2.0 ** (1.0 + 1.0 / params.p) * nx, NORM_TOL)
    t.eq("compressed profile agrees", weak_norm(r_profile(x, layout, params), params), nr, NORM_TOL * max(1.0, nr))
    t.observe(_ratio(nr, nx))


def _suite_parts(rng, params, caps, t):
    x = _r_stack(rng, caps, params, t)
    layout = _layout(x.N)
    nx = stack_norm(x, params)
    split = r_split(x, layout, params)
    t.le("norm_A <= norm_Ac", split.norm_A, split.norm_Ac, NORM_TOL)
    t.le("norm_Ac <= 2^(1/p) ||x||", split.norm_Ac, 2.0 ** (1.0 / params.p) * nx, NORM_TOL)
    below = 0
    worst = -math.inf
    for n, size in enumerate(layout.m):
        worst = max(worst, below - size)
        below += size << n
    t.le("max_l (sum_(n<l) 2^n m_n - m_l)", worst, 0.0, 0.0)
    t.observe(_ratio(split.norm_Ac, nx))


def _suite_w_project(rng, params, caps, t):
    N = int(rng.integers(0, min(caps.max_level, R_MAX_LEVEL) + 1))
    dist = _pick_dist(rng)
    t.inputs.update(N=N, distribution=dist)
    layout = _layout(N)
    a = gen_atoms(rng, layout.total_length, dist)
    wa = w_project(a, layout)
    t.eq("W W a == W a", float(not w_project(wa, layout) == wa), 0.0, 0.0)
    spread = np.maximum.reduceat(wa.atoms, layout.offsets) - np.minimum.reduceat(wa.atoms, layout.offsets)
    t.eq("W a block-constant", float(np.max(spread)), 0.0, 0.0)
    na = weak_norm(a, params)
    nw = weak_norm(wa, params)
    ratio = _ratio(nw, na)
    t.le("||W a|| / ||a||", ratio if ratio is not None else 0.0, 1.0, IDENTITY_TOL)
    t.observe(ratio)


def _suite_tower(rng, params, caps, t):
    K = int(rng.integers(1, caps.max_k + 1))
    level = int(rng.integers(0, caps.max_level + 1))
    dist = _pick_dist(rng)
    t.inputs.update(K=K, level=level, distribution=dist)
    f = gen_step(rng, K, level, dist)
    tower = restrict_tower(f)
    t.eq("Q S f == f", float(not tower_limit(tower) == f), 0.0, 0.0)
    nf = weak_norm(f, params)
    norms = [weak_norm(g, params) for g in tower]
    t.eq("max_k ||S_k f|| == ||f||", max(norms), nf, IDENTITY_TOL)
    t.observe(_ratio(max(norms), nf))


SUITES = {
    "norm_oracle": (_suite_norm_oracle, _Caps(12, 8, 4)),
    "sandwich": (_suite_sandwich, _Caps(64, 8, 4)),
    "p_estimate": (_suite_p_estimate, _Caps(64, 8, 4)),
    "pairing": (_suite_pairing, _Caps(64, 6, 4)),
    "boundf": (_suite_boundf, _Caps(64, 8, 4)),
    "t_embed": (_suite_t_embed, _Caps(64, 8, 4)),
    "phi": (_suite_phi, _Caps(64, 8, 4)),
    "lemma_bound": (_suite_lemma_bound, _Caps(256, 8, 4)),
    "lemma_compare": (_suite_lemma_compare, _Caps(64, 8, 4)),
    "p_project": (_suite_p_project, _Caps(64, 8, 4)),
    "r_embed": (_suite_r_embed, _Caps(64, 5, 1)),
    "parts": (_suite_parts, _Caps(64, 5, 1)),
    "w_project": (_suite_w_project, _Caps(64, 5, 1)),
    "tower": (_suite_tower, _Caps(64, 8, 4)),
}


def _trial_seed(seed, suite, index):
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, zlib.crc32(suite.encode()), index])
    return int(ss.generate_state(1, np.uint64)[0])


def run_suite(config):
    if config.suite not in SUITES:
        raise ValueError(f"unknown suite {config.suite!r}; valid suites: {', '.join(SUITES)}")
    fn, defaults = SUITES[config.suite]
    caps = _Caps(
        config.max_atoms if config.max_atoms is not None else defaults.max_atoms,
        config.max_level if config.max_level is not None else defaults.max_level,
        config.max_k if config.max_k is not None else defaults.max_k,
    )
    if config.suite == "norm_oracle" and caps.max_atoms > ORACLE_LIMIT:
        raise ValueError(f"norm_oracle supports at most {ORACLE_LIMIT} atoms")
    start = time.perf_counter()
    records = []
    for index in range(config.trials):
        p = config.p_values[index % len(config.p_values)]
        seed = _trial_seed(config.seed, config.suite, index)
        trial = _Trial()
        fn(_rng(seed), make_params(p), caps, trial)
        margin = min(c["margin"] for c in trial.checks)
        records.append(
            {
                "trial": index,
                "seed": seed,
                "p": p,
                "inputs": trial.inputs,
                "ratio": trial.ratio,
                "margin": margin,
                "pass": all(c["pass"] for c in trial.checks),
                "checks": trial.checks,
            }
        )
    ratios = [r["ratio"] for r in records if r["ratio"] is not None]
    return SuiteReport(
        suite=config.suite,
        p_values=config.p_values,
        seed=config.seed,
        trials=config.trials,
        passed=all(r["pass"] for r in records),
        max_ratio=max(ratios) if ratios else None,
        min_margin=min(r["margin"] for r in records),
        pass_count=sum(r["pass"] for r in records),
        records=records,
        wall_time=time.perf_counter() - start,
    )


# chain report -------------------------------------------------------------

_LINKS = ("T_k distortion", "P_k norm", "R distortion", "W projection norm", "S isometry")


def _distortion(a, b):
    if a > 0 and b > 0:
        return max(a / b, b / a)
    return None


def _spike_stack(N, params):
    """Levels ``n < N`` of constant norm-one vectors and a single spike at ``N``.

    Every block value dominates all later ones, so the split set ``A`` is
    empty and all mass sits in its complement.
    """
    levels = [np.full(1 << n, 2.0 ** (-n / params.p)) for n in range(N)]
    top = np.zeros(1 << N)
    top[0] = 1.0
    levels.append(top)
    return LevelStack(1, tuple(levels))


def _run_length_vector(rng, layout, dist):
    """Random vector made of a few constant runs inside every block."""
    values, lengths, owners = [], [], []
    for block, size in enumerate(layout.block_sizes.tolist()):
        runs = int(min(size, rng.integers(1, 5)))
        cuts = np.sort(rng.choice(size - 1, runs - 1, replace=False) + 1) if runs > 1 else []
        edges = np.r_[0, cuts, size]
        lengths.extend(np.diff(edges).tolist())
        values.extend(gen_atoms(rng, runs, dist).atoms.tolist())
        owners.extend([block] * runs)
    return np.array(values), np.array(lengths, dtype=np.float64), np.array(owners)


def _chain_level(N, params, seed, trials, k_values):
    out = {}

    rng = _rng(np.random.SeedSequence([seed, N, 0]))
    best = None
    probes = [DyadicStep(1, N, np.r_[1.0, np.zeros((1 << N) - 1)]), DyadicStep(1, N, np.ones(1 << N))]
    samples = probes + [
        gen_step(rng, int(rng.choice(k_values)), N, _pick_dist(rng)) for _ in range(trials)
    ]
    for f in samples:
        d = _distortion(stack_norm(t_embed(f, params), params), weak_norm(f, params))
        if d is not None:
            best = d if best is None else max(best, d)
    out["T_k distortion"] = best

    rng = _rng(np.random.SeedSequence([seed, N, 1]))
    best = None
    samples = [unit_stack(k, N, params) for k in k_values]
    for _ in range(trials):
        k = int(rng.choice(k_values))
        samples.append(gen_stack(rng, k, N, _pick_dist(rng), params=params if rng.random() < 0.5 else None))
    for x in samples:
        r = _ratio(stack_norm(p_project(x, params), params), stack_norm(x, params))
        if r is not None:
            best = r if best is None else max(best, r)
    out["P_k norm"] = best

    rng = _rng(np.random.SeedSequence([seed, N, 2]))
    best = None
    layout = build_layout(N)
    samples = [unit_stack(1, N, params), _spike_stack(N, params)]
    for _ in range(trials):
        samples.append(gen_stack(rng, 1, N, _pick_dist(rng), params=params, in_yk=bool(rng.random() < 0.25)))
    for x in samples:
        d = _distortion(weak_norm(r_profile(x, layout, params), params), stack_norm(x, params))
        if d is not None:
            best = d if best is None else max(best, d)
    out["R distortion"] = best

    rng = _rng(np.random.SeedSequence([seed, N, 3]))
    best = None
    sizes = layout.block_sizes.astype(np.float64)
    for i in range(trials + 1):
        dist = _pick_dist(rng)
        if i == 0:
            vals = gen_atoms(rng, sizes.shape[0], dist).atoms
            lengths, owners = sizes, np.arange(sizes.shape[0])
        else:
            vals, lengths, owners = _run_length_vector(rng, layout, dist)
        na = weak_norm(RearrangementProfile.from_weighted(vals, lengths), params)
        means = np.bincount(owners, weights=vals * lengths, minlength=sizes.shape[0]) / sizes
        nw = weak_norm(RearrangementProfile.from_weighted(means, sizes), params)
        r = _ratio(nw, na)
        if r is not None:
            best = r if best is None else max(best, r)
    out["W projection norm"] = best

    rng = _rng(np.random.SeedSequence([seed, N, 4]))
    best = None
    roundtrip = True
    for _ in range(trials):
        f = gen_step(rng, int(rng.choice(k_values)), N, _pick_dist(rng))
        tower = restrict_tower(f)
        roundtrip &= tower_limit(tower) == f
        r = _ratio(max(weak_norm(g, params) for g in tower), weak_norm(f, params))
        if r is not None:
            best = r if best is None else max(best, r)
    out["S isometry"] = best
    return out, roundtrip


def chain_report(p, sizes, seed=0, trials=40, k_values=(1, 2, 4)):
    """Measured constants of each link of the embedding chain per truncation level.

    Each constant is the largest sampled ratio over random inputs plus a few
    structured probes.  A link is uniform when no size in the upper half of
    the range sets a new maximum beyond ``1e-9``.
    """
    params = make_params(p)
    sizes = sorted(set(int(n) for n in sizes))
    if not sizes or sizes[0] < 0:
        raise ValueError("sizes must be a nonempty list of nonnegative levels")
    bounds = {
        "T_k distortion": params.q,
        "P_k norm": params.q ** 2,
        "R distortion": 2.0 ** (1.0 + 1.0 / params.p),
        "W projection norm": 1.0,
        "S isometry": 1.0,
    }
    per_size = {}
    roundtrip = True
    for N in sizes:
        per_size[N], ok = _chain_level(N, params, seed, trials, tuple(k_values))
        roundtrip &= ok
    half = [N for N in sizes if 2 * N <= sizes[-1]] or sizes[:1]
    links = {}
    for name in _LINKS:
        by_size = {str(N): per_size[N][name] for N in sizes}
        seen = [v for v in by_size.values() if v is not None]
        low = [per_size[N][name] for N in half if per_size[N][name] is not None]
        top = max(seen) if seen else None
        base = max(low) if low else None
        within = top is None or top <= bounds[name] + NORM_TOL
        uniform = top is None or base is None or top <= base + NORM_TOL
        links[name] = {
            "bound": bounds[name],
            "by_size": by_size,
            "max": top,
            "max_lower_half": base,
            "within_bound": within,
            "uniform": uniform,
        }
    return {
        "p": params.p,
        "q": params.q,
        "seed": seed,
        "trials": trials,
        "sizes": sizes,
        "links": links,
        "tower_roundtrip": roundtrip,
        "pass": roundtrip and all(v["within_bound"] and v["uniform"] for v in links.values()),
    }
