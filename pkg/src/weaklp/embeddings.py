"""Operators of the embedding chain, truncated at a finest dyadic level ``N``.

A :class:`LevelStack` holds levels ``x_0, ..., x_N`` with ``len(x_n) ==
k * 2**n``; its norm is the maximum of the level norms.  The functional used
for the projection reads only the finest level:

    Phi_N(x) = (k 2**N)**(-1/q) * sum_j x_N(j)

which has norm at most one, sends the constant stack ``u`` to 1 and kills
every stack whose finest-level sum vanishes.
"""
import math
from dataclasses import dataclass

import numpy as np

from .core import AtomicVector, DyadicStep, RearrangementProfile, as_params, weak_norm

__all__ = [
    "LevelStack",
    "YkMembership",
    "NotInYkError",
    "BlockLayout",
    "SplitDiagnostic",
    "unit_stack",
    "t_embed",
    "stack_norm",
    "yk_check",
    "yk_reconstruct",
    "phi_eval",
    "phi_nj_eval",
    "restrict_block",
    "shift_snj",
    "p_project",
    "build_layout",
    "r_embed",
    "r_profile",
    "r_split",
    "w_project",
    "restrict_tower",
    "tower_limit",
]

YK_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class LevelStack:
    """Truncated element of the l-infinity sum of weak-l^p(k 2**n), n <= N."""

    k: int
    levels: tuple

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        if len(self.levels) == 0:
            raise ValueError("a stack needs at least level 0")
        levels = []
        for n, lev in enumerate(self.levels):
            arr = np.array(lev, dtype=np.float64).reshape(-1)
            if arr.shape[0] != self.k << n:
                raise ValueError(
                    f"level {n} must have k*2**n = {self.k << n} entries, got {arr.shape[0]}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"level {n} has non-finite entries")
            arr.setflags(write=False)
            levels.append(arr)
        object.__setattr__(self, "levels", tuple(levels))

    @property
    def N(self):
        return len(self.levels) - 1

    @classmethod
    def zeros(cls, k, N):
        return cls(k, tuple(np.zeros(k << n) for n in range(N + 1)))

    def __add__(self, other):
        self._check_shape(other)
        return LevelStack(self.k, tuple(a + b for a, b in zip(self.levels, other.levels)))

    def __sub__(self, other):
        self._check_shape(other)
        return LevelStack(self.k, tuple(a - b for a, b in zip(self.levels, other.levels)))

    def __mul__(self, scalar):
        return LevelStack(self.k, tuple(scalar * a for a in self.levels))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, LevelStack)
            and self.k == other.k
            and self.N == other.N
            and all(np.array_equal(a, b) for a, b in zip(self.levels, other.levels))
        )

    def _check_shape(self, other):
        if (self.k, self.N) != (other.k, other.N):
            raise ValueError(
                f"stack shape mismatch: (k={self.k}, N={self.N}) vs (k={other.k}, N={other.N})"
            )


@dataclass(frozen=True)
class YkMembership:
    stack: LevelStack
    max_violation: float
    worst: tuple = None  # (n, j), 1-based j, of the largest violation

    @property
    def member(self):
        return self.max_violation <= YK_TOLERANCE


class NotInYkError(ValueError):
    def __init__(self, n, j, violation):
        super().__init__(
            f"stack is not dyadically consistent: violation {violation:.3e} at level {n}, index {j}"
        )
        self.n = n
        self.j = j
        self.violation = violation


def unit_stack(k, N, params):
    """The stack ``u`` with ``u_n(j) = (k 2**n)**(-1/p)``."""
    params = as_params(params)
    return LevelStack(k, tuple(np.full(k << n, float(k << n) ** (-1.0 / params.p)) for n in range(N + 1)))


def _block_sums(finest, N):
    """Cascade of pairwise sums from level ``N`` down to level 0."""
    sums = [None] * (N + 1)
    sums[N] = finest
    for n in range(N - 1, -1, -1):
        sums[n] = sums[n + 1][0::2] + sums[n + 1][1::2]
    return sums


def t_embed(f, params, N=None):
    """``x_n(j) = 2**(n/q) * integral of f over the j-th level-n interval``.

    ``f`` is refined to level ``N`` first when ``N`` exceeds its level.
    """
    params = as_params(params)
    if N is not None:
        f = f.refine(N)
    N = f.level
    sums = _block_sums(np.asarray(f.values), N)
    return LevelStack(f.k, tuple(2.0 ** (n / params.q - N) * sums[n] for n in range(N + 1)))


def stack_norm(x, params):
    return max(weak_norm(AtomicVector(lev), params) for lev in x.levels)


def yk_check(x, params):
    params = as_params(params)
    c = 2.0 ** (-1.0 / params.q)
    worst = 0.0
    where = None
    for n in range(x.N):
        fine = x.levels[n + 1]
        gap = np.abs(x.levels[n] - c * (fine[0::2] + fine[1::2]))
        j = int(np.argmax(gap))
        if gap[j] > worst:
            worst = float(gap[j])
            where = (n, j + 1)
    return YkMembership(x, worst, where)


def yk_reconstruct(x, params, tol=1e-9):
    """The finest-level step ``2**(N/p) * sum_j x_N(j) chi_{N,j}``."""
    params = as_params(params)
    check = yk_check(x, params)
    if check.max_violation > tol:
        raise NotInYkError(*check.worst, check.max_violation)
    N = x.N
    return DyadicStep(x.k, N, 2.0 ** (N / params.p) * x.levels[N])


def _phi_scale(x, params):
    return float(x.k << x.N) ** (-1.0 / params.q)


def phi_eval(x, params):
    params = as_params(params)
    return _phi_scale(x, params) * math.fsum(x.levels[x.N])


def _check_index(x, n, j):
    if not 0 <= n <= x.N:
        raise ValueError(f"level n must lie in [0, {x.N}], got {n}")
    if not 1 <= j <= x.k << n:
        raise ValueError(f"index j must lie in [1, {x.k << n}] at level {n}, got {j}")


def phi_nj_eval(x, n, j, params):
    """``Phi_N`` applied to ``x`` restricted to the finest-level block of ``(n, j)``."""
    params = as_params(params)
    _check_index(x, n, j)
    width = 1 << (x.N - n)
    block = x.levels[x.N][(j - 1) * width : j * width]
    return _phi_scale(x, params) * math.fsum(block)


def restrict_block(x, n, j):
    """Multiply ``x`` by the indicator of the levels ``>= n`` part of the support
    of ``T_k chi_{[(j-1)/2**n, j/2**n]}``."""
    _check_index(x, n, j)
    out = []
    for m, lev in enumerate(x.levels):
        keep = np.zeros_like(lev)
        if m >= n:
            width = 1 << (m - n)
            sl = slice((j - 1) * width, j * width)
            keep[sl] = lev[sl]
        out.append(keep)
    return LevelStack(x.k, tuple(out))


def shift_snj(x, n, j):
    """Zero the levels below ``n`` and rotate level ``m >= n`` left by
    ``(j - 1) * 2**(m - n)`` places."""
    _check_index(x, n, j)
    out = []
    for m, lev in enumerate(x.levels):
        if m < n:
            out.append(np.zeros_like(lev))
        else:
            out.append(np.roll(lev, -((j - 1) << (m - n))))
    return LevelStack(x.k, tuple(out))


def p_project(x, params):
    """Projection onto the dyadically consistent stacks.

    Level ``N`` is kept and coarser levels are rebuilt from it, so level
    ``n`` entry ``j`` is ``2**(-(N-n)/q)`` times the finest-level block sum.
    """
    params = as_params(params)
    c = 2.0 ** (-1.0 / params.q)
    levels = [None] * (x.N + 1)
    levels[x.N] = x.levels[x.N]
    for n in range(x.N - 1, -1, -1):
        fine = levels[n + 1]
        levels[n] = c * (fine[0::2] + fine[1::2])
    return LevelStack(x.k, tuple(levels))


@dataclass(frozen=True, eq=False)
class BlockLayout:
    """Disjoint contiguous blocks ``B_{n,j}`` of size ``m_n``, ``j <= 2**n``."""

    N: int
    m: tuple

    def __post_init__(self):
        m = tuple(int(v) for v in self.m)
        if len(m) != self.N + 1:
            raise ValueError(f"layout needs N+1 = {self.N + 1} sizes, got {len(m)}")
        if m[0] != 1:
            raise ValueError(f"m_0 must be 1, got {m[0]}")
        below = 0
        for n, size in enumerate(m):
            if n > 0 and size <= m[n - 1]:
                raise ValueError(f"block sizes must increase strictly (m_{n} = {size})")
            if size < below:
                raise ValueError(
                    f"m_{n} = {size} is smaller than the total {below} of all coarser blocks"
                )
            below += size << n
        object.__setattr__(self, "m", m)

    @property
    def level_starts(self):
        starts = [0]
        for n, size in enumerate(self.m):
            starts.append(starts[-1] + (size << n))
        return starts

    @property
    def total_length(self):
        return self.level_starts[-1]

    def offset(self, n, j):
        return self.level_starts[n] + (j - 1) * self.m[n]

    @property
    def offsets(self):
        starts = self.level_starts
        return np.concatenate(
            [starts[n] + self.m[n] * np.arange(1 << n, dtype=np.int64) for n in range(self.N + 1)]
        )

    @property
    def block_sizes(self):
        return np.concatenate([np.full(1 << n, self.m[n], dtype=np.int64) for n in range(self.N + 1)])

    def __eq__(self, other):
        return isinstance(other, BlockLayout) and (self.N, self.m) == (other.N, other.m)


def build_layout(N):
    """Smallest layout with ``m_0 = 1``, strictly increasing sizes and
    ``m_n >= sum_{j<n} 2**j m_j``."""
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    m = [1]
    below = 1
    for n in range(1, N + 1):
        m.append(max(m[-1] + 1, below))
        below += m[-1] << n
    return BlockLayout(N, tuple(m))


@dataclass(frozen=True)
class SplitDiagnostic:
    A_set: frozenset
    norm_A: float
    norm_Ac: float


def _check_r(x, layout):
    if x.k != 1:
        raise ValueError(f"the block embedding is only defined for k = 1, got k = {x.k}")
    if layout.N != x.N:
        raise ValueError(f"layout level {layout.N} does not match stack level {x.N}")


def _scaled_levels(x, layout, params):
    return [lev * float(layout.m[n]) ** (-1.0 / params.p) for n, lev in enumerate(x.levels)]


def r_embed(x, layout, params):
    """Flat sequence equal to ``x_n(j) / m_n**(1/p)`` on the block ``B_{n,j}``.

    The blocks are disjoint, so the lattice supremum over ``(n, j)`` reduces
    to placing each block value on its own block.
    """
    params = as_params(params)
    _check_r(x, layout)
    scaled = _scaled_levels(x, layout, params)
    return AtomicVector(np.concatenate([np.repeat(s, layout.m[n]) for n, s in enumerate(scaled)]))


def r_profile(x, layout, params):
    """Rearrangement of ``r_embed(x)`` without materializing the blocks."""
    params = as_params(params)
    _check_r(x, layout)
    scaled = _scaled_levels(x, layout, params)
    return RearrangementProfile.from_weighted(np.concatenate(scaled), layout.block_sizes)


def r_split(x, layout, params):
    """Split the block embedding along the set ``A`` of pairs ``(n, j)``
    strictly dominated by some block value at a later level."""
    params = as_params(params)
    _check_r(x, layout)
    scaled = [np.abs(s) for s in _scaled_levels(x, layout, params)]
    later = -np.inf
    in_A = [None] * (x.N + 1)
    for n in range(x.N, -1, -1):
        in_A[n] = scaled[n] < later
        later = max(later, float(np.max(scaled[n])))
    A_set = frozenset(
        (n, int(j) + 1) for n in range(x.N + 1) for j in np.flatnonzero(in_A[n])
    )
    vals = np.concatenate(scaled)
    mask = np.concatenate(in_A)
    sizes = layout.block_sizes
    part_A = RearrangementProfile.from_weighted(vals[mask], sizes[mask])
    part_Ac = RearrangementProfile.from_weighted(vals[~mask], sizes[~mask])
    return SplitDiagnostic(A_set, weak_norm(part_A, params), weak_norm(part_Ac, params))


def w_project(a, layout):
    """Replace ``a`` on every block by its average.

    Blocks that are already constant are copied through, which makes the
    projection exactly idempotent in floating point.
    """
    if len(a) != layout.total_length:
        raise ValueError(f"vector length {len(a)} does not match layout length {layout.total_length}")
    vals = a.atoms
    offsets = layout.offsets
    sizes = layout.block_sizes
    lo = np.minimum.reduceat(vals, offsets)
    hi = np.maximum.reduceat(vals, offsets)
    means = np.add.reduceat(vals, offsets) / sizes
    means = np.where(lo == hi, lo, means)
    return AtomicVector(np.repeat(means, sizes))


def restrict_tower(f, cut_points=None):
    """Restrictions of ``f`` to ``[0, k]`` for each cut point ``k``."""
    if cut_points is None:
        cut_points = range(1, f.k + 1)
    out = []
    for k in cut_points:
        if not 1 <= k <= f.k:
            raise ValueError(f"cut points must lie in [1, {f.k}], got {k}")
        out.append(DyadicStep(k, f.level, f.values[: k << f.level]))
    return out


def tower_limit(tower):
    """Finite stand-in for the limit along the tower: its last component."""
    tower = list(tower)
    if not tower:
        raise ValueError("tower is empty")
    level = tower[0].level
    for prev, cur in zip(tower, tower[1:]):
        if cur.level != level or cur.k < prev.k:
            raise ValueError("tower components must share a level and have nondecreasing k")
    return tower[-1]
