"""Rearrangements, norms and pairings for finite atomic and dyadic-step objects.

Two kinds of objects are supported:

* :class:`AtomicVector` -- a finite sequence under counting measure;
* :class:`DyadicStep` -- a function on ``[0, k]`` constant on each dyadic
  interval ``[(j-1)/2**level, j/2**level]``.

Both reduce to a :class:`RearrangementProfile` (the decreasing rearrangement
of ``|f|`` as value/mass pieces), on which the three norms are evaluated
exactly.
"""
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels

__all__ = [
    "DomainError",
    "Params",
    "AtomicVector",
    "DyadicStep",
    "RearrangementProfile",
    "make_params",
    "as_params",
    "rearrange",
    "weak_norm",
    "quasi_norm",
    "lq1_norm",
    "pairing",
    "cond_expect",
]


class DomainError(ValueError):
    """An exponent or argument outside the domain of the construction."""


def _frozen_array(values):
    arr = np.array(values, dtype=np.float64).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Params:
    """Exponent ``p`` and its conjugate ``q = p / (p - 1)``."""

    p: float
    q: float


def make_params(p):
    p = float(p)
    if not math.isfinite(p) or p <= 1.0:
        raise DomainError(f"exponent p must satisfy 1 < p < inf, got {p!r}")
    return Params(p, p / (p - 1.0))


def as_params(params):
    if isinstance(params, Params):
        return params
    return make_params(params)


@dataclass(frozen=True, eq=False)
class AtomicVector:
    atoms: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.atoms)
        if not np.all(np.isfinite(arr)):
            raise ValueError("atoms must be finite reals")
        object.__setattr__(self, "atoms", arr)

    def __len__(self):
        return self.atoms.shape[0]

    def __eq__(self, other):
        return isinstance(other, AtomicVector) and np.array_equal(self.atoms, other.atoms)


@dataclass(frozen=True, eq=False)
class DyadicStep:
    """Step function on ``[0, k]`` with ``k * 2**level`` dyadic pieces."""

    k: int
    level: int
    values: np.ndarray

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if int(self.level) != self.level or self.level < 0:
            raise ValueError(f"level must be a nonnegative integer, got {self.level!r}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "level", int(self.level))
        arr = _frozen_array(self.values)
        expected = self.k << self.level
        if arr.shape[0] != expected:
            raise ValueError(
                f"values must have k*2**level = {expected} entries, got {arr.shape[0]}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must be finite reals")
        object.__setattr__(self, "values", arr)

    @property
    def width(self):
        """Length of one piece, ``2**-level``."""
        return math.ldexp(1.0, -self.level)

    def refine(self, level):
        """The same function described at a finer ``level``."""
        if level < self.level:
            raise ValueError(f"cannot refine level {self.level} down to {level}")
        return DyadicStep(self.k, level, np.repeat(self.values, 1 << (level - self.level)))

    def __eq__(self, other):
        return (
            isinstance(other, DyadicStep)
            and self.k == other.k
            and self.level == other.level
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True, eq=False)
class RearrangementProfile:
    """Decreasing rearrangement as pieces ``(value, mass)``.

    Values are nonnegative and nonincreasing, masses strictly positive.
    """

    values: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        values = _frozen_array(self.values)
        masses = _frozen_array(self.masses)
        if values.shape != masses.shape:
            raise ValueError("values and masses must have the same length")
        if np.any(values < 0) or np.any(np.diff(values) > 0):
            raise ValueError("profile values must be nonnegative and nonincreasing")
        if np.any(masses <= 0):
            raise ValueError("profile masses must be strictly positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "masses", masses)

    @classmethod
    def from_pairs(cls, steps):
        steps = list(steps)
        return cls([v for v, _ in steps], [m for _, m in steps])

    @classmethod
    def from_weighted(cls, values, masses, merge=True):
        """Profile of ``|values|`` where entry ``i`` carries mass ``masses[i]``."""
        vals = np.abs(np.asarray(values, dtype=np.float64).reshape(-1))
        masses = np.broadcast_to(np.asarray(masses, dtype=np.float64), vals.shape)
        order = np.argsort(-vals, kind="stable")
        vals = vals[order]
        masses = masses[order]
        if merge and vals.shape[0] > 1:
            starts = np.flatnonzero(np.r_[True, vals[1:] != vals[:-1]])
            masses = np.add.reduceat(masses, starts)
            vals = vals[starts]
        return cls(vals, masses)

    @property
    def steps(self):
        return list(zip(self.values.tolist(), self.masses.tolist()))

    @property
    def total_mass(self):
        return float(np.sum(self.masses))

    def __len__(self):
        return self.values.shape[0]


def rearrange(source, merge=True):
    """Decreasing rearrangement of ``|source|``.

    Atoms carry mass 1, step pieces mass ``2**-level``.  With ``merge`` the
    adjacent equal values are combined; norms do not depend on it.
    """
    if isinstance(source, RearrangementProfile):
        return source
    if isinstance(source, AtomicVector):
        values = source.atoms
        unit = 1.0
    elif isinstance(source, DyadicStep):
        values = source.values
        unit = source.width
    else:
        raise TypeError(f"cannot rearrange {type(source).__name__}")
    vals = np.sort(np.abs(values))[::-1]
    if merge and vals.shape[0] > 1:
        starts = np.flatnonzero(np.r_[True, vals[1:] != vals[:-1]])
        counts = np.diff(np.r_[starts, vals.shape[0]])
        return RearrangementProfile(vals[starts], counts * unit)
    return RearrangementProfile(vals.copy(), np.full(vals.shape[0], unit))


def _profile(f):
    prof = rearrange(f)
    return np.ascontiguousarray(prof.values), np.ascontiguousarray(prof.masses)


def weak_norm(f, params):
    """The norm ``sup_B (int_B |f|) / mu(B)**(1/q)``, computed exactly.

    For fixed measure ``t`` the best set ``B`` is the top of the decreasing
    rearrangement, so the supremum runs over ``t`` only.  On each profile
    piece the ratio is quasi-convex in ``t``; both piece endpoints and the
    stationary point ``t* = (A - v t0) / (v (q - 1))`` are evaluated.
    """
    params = as_params(params)
    values, masses = _profile(f)
    return kernels.weak_norm_profile(values, masses, params.q)


def quasi_norm(f, params):
    """``sup_t t**(1/p) f*(t)``; attained at the right end of some piece."""
    params = as_params(params)
    values, masses = _profile(f)
    return kernels.quasi_norm_profile(values, masses, params.p)


def lq1_norm(f, params):
    """``int_0^inf t**(-1/p) f*(t) dt`` in closed form over the pieces."""
    params = as_params(params)
    values, masses = _profile(f)
    return kernels.lq1_norm_profile(values, masses, params.q)


def pairing(f, g):
    """Duality pairing ``int f g`` for two objects of the same kind and shape."""
    if isinstance(f, AtomicVector) and isinstance(g, AtomicVector):
        if len(f) != len(g):
            raise ValueError(f"length mismatch: {len(f)} vs {len(g)}")
        return float(np.dot(f.atoms, g.atoms))
    if isinstance(f, DyadicStep) and isinstance(g, DyadicStep):
        if (f.k, f.level) != (g.k, g.level):
            raise ValueError(
                f"shape mismatch: (k={f.k}, level={f.level}) vs (k={g.k}, level={g.level})"
            )
        return float(np.dot(f.values, g.values)) * f.width
    raise ValueError(
        f"pairing needs two objects of the same kind, got "
        f"{type(f).__name__} and {type(g).__name__}"
    )


def cond_expect(f, n):
    """Average ``f`` over the level-``n`` dyadic partition of ``[0, k]``."""
    if not 0 <= n <= f.level:
        raise ValueError(f"target level must lie in [0, {f.level}], got {n}")
    if n == f.level:
        return f
    blocks = f.values.reshape(-1, 1 << (f.level - n))
    return DyadicStep(f.k, n, blocks.mean(axis=1))
