"""Averaging schemes with dual evaluation paths and convergence diagnostics.

Schemes
-------
birkhoff   (1/N)   sum_n           f(T^n x)
linear     (1/N)   sum_n           prod_j f_j(T^{j n} x)
square     (1/N^2) sum_{n,m}       prod_j f_j(T^{n+(j-1)m} x)
cube       (1/N^k) sum_{n in box}  prod_eps f_eps(T^{n . eps} x)
folner     (1/|B|) sum_{(n,m) in B} f(S1^n S2^m x)

Each scheme has a streamed numerical path (orbit points generated
incrementally in anchored chunks, products evaluated pointwise, chunk sums
via math.fsum).  On phase-linear systems the square and cube grids factorize
exactly per term tuple into one-dimensional geometric sums, and the streamed
path then streams those geometric sums; a literal grid walk is kept for every
system below a cost cap and cross-checked against the factorized path in the
test suite.  Closed-form values live in exact.py and share no arithmetic with
the streaming here.

The one-dimensional linear path and the empirical-measure integration in
joinings.py deliberately share the chunk layout and accumulation order, so
integrating a stored fiber cloud reproduces the streamed average bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (CommutationError, ResourceCapError, ValidationError)
from .exact import term_tuples, character_at, obs_coords, _vec_sum
from .observables import Observable, evaluate
from .phases import CHUNK, MeanAccumulator, PhaseForm, chunk_ranges, frac, e
from .systems import DynamicalSystem, orbit_points, phase_form, probe_points

GRID_CAP = 1 << 24        # direct grid walks refuse beyond this many terms
MAX_CUBE_ORDER = 4


# ---------------------------------------------------------------------------
# Trajectories and diagnostics


@dataclass(frozen=True)
class AverageTrajectory:
    scheme: str
    checkpoints: tuple[tuple[int, complex], ...]
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ns = [n for n, _ in self.checkpoints]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValidationError("checkpoints must be strictly increasing")

    @property
    def final(self) -> complex:
        return self.checkpoints[-1][1]

    @property
    def n_max(self) -> int:
        return self.checkpoints[-1][0]


@dataclass(frozen=True)
class Diagnostic:
    oscillation: float
    last: complex
    tail_count: int
    constant_tail: bool


def geometric_checkpoints(n_max: int, start: int = 1000, ratio: int = 2) -> tuple[int, ...]:
    """Default multiplicatively spaced checkpoint schedule up to n_max."""
    out = []
    n = start
    while n < n_max:
        out.append(n)
        n *= ratio
    out.append(n_max)
    return tuple(out)


def convergence_diagnostic(traj: AverageTrajectory,
                           tail_fraction: float) -> Diagnostic:
    """Max pairwise distance of checkpoint values in the tail window
    N >= (1 - tail_fraction) * N_max."""
    if not 0.0 < tail_fraction <= 1.0:
        raise ValidationError("tail_fraction must lie in (0, 1]")
    cut = (1.0 - tail_fraction) * traj.n_max
    tail = [v for n, v in traj.checkpoints if n >= cut]
    if len(tail) < 3:
        raise ValidationError(
            f"need >= 3 checkpoints in the tail window, found {len(tail)}")
    osc = max(abs(a - b) for i, a in enumerate(tail) for b in tail[i + 1:])
    return Diagnostic(osc, tail[-1], len(tail), osc == 0.0)


def product_difference_bound(a: Sequence[complex],
                             b: Sequence[complex]) -> tuple[complex, complex]:
    """(prod a - prod b, telescoped sum); the two agree up to rounding.

    Telescoping: sum_i a_1..a_{i-1} (a_i - b_i) b_{i+1}..b_k."""
    if len(a) != len(b):
        raise ValidationError("lists must have equal length")
    if not a:
        raise ValidationError("lists must be nonempty")
    pa = 1.0 + 0.0j
    for v in a:
        pa *= v
    pb = 1.0 + 0.0j
    for v in b:
        pb *= v
    tele = 0.0 + 0.0j
    prefix = 1.0 + 0.0j
    suffixes = [1.0 + 0.0j]
    for v in reversed(b[1:]):
        suffixes.append(suffixes[-1] * v)
    suffixes.reverse()
    for i, (ai, bi) in enumerate(zip(a, b)):
        tele += prefix * (ai - bi) * suffixes[i]
        prefix *= ai
    return pa - pb, tele


# ---------------------------------------------------------------------------
# Streamed product-of-orbits engine (birkhoff / linear)


def _product_block(system, fs, strides, x, n0, count) -> np.ndarray:
    vals = np.ones(count, dtype=np.complex128)
    for f, j in zip(fs, strides):
        pts = orbit_points(system, x, j, n0, count, coords="obs")
        vals *= evaluate(f, pts)
    return vals


def _streamed_means(system, fs, strides, x, checkpoints) -> list[tuple[int, complex]]:
    """Partial means of prod_j f_j(T^{strides_j * n} x) at each checkpoint."""
    acc = MeanAccumulator()
    out = []
    prev = 0
    for cp in checkpoints:
        if cp <= prev:
            raise ValidationError("checkpoints must be strictly increasing")
        for n0, cnt in chunk_ranges(prev, cp - prev, CHUNK):
            acc.add(_product_block(system, fs, strides, x, n0, cnt))
        out.append((cp, acc.mean()))
        prev = cp
    return out


def multilinear_average_linear(system: DynamicalSystem, fs: Sequence[Observable],
                               x, N: int) -> complex:
    """(1/N) sum_{n<N} prod_j f_j(T^{j n} x), streamed with one orbit cursor
    per factor."""
    if not fs:
        raise ValidationError("need at least one observable")
    if N < 1:
        raise ValidationError("N must be >= 1")
    strides = list(range(1, len(fs) + 1))
    return _streamed_means(system, list(fs), strides, x, [N])[0][1]


def birkhoff_average(system: DynamicalSystem, f: Observable, x, N: int) -> complex:
    """(1/N) sum_{n<N} f(T^n x); identical streaming to the d=1 linear case."""
    return multilinear_average_linear(system, [f], x, N)


def _traj_params(system, fs, x, mode: str) -> dict:
    from .observables import format_observable
    from .systems import system_to_kv
    return {"system": system_to_kv(system),
            "observables": [format_observable(f) for f in fs],
            "start": [float(v) for v in np.atleast_1d(np.asarray(x))],
            "path": mode}


def linear_trajectory(system, fs, x, checkpoints, params=None) -> AverageTrajectory:
    vals = _streamed_means(system, list(fs), list(range(1, len(fs) + 1)),
                           x, list(checkpoints))
    return AverageTrajectory("linear" if len(fs) > 1 else "birkhoff",
                             tuple(vals),
                             params or _traj_params(system, fs, x, "streamed"))


# ---------------------------------------------------------------------------
# Streamed geometric sums (the factorized path's inner loop)


def geometric_mean_streamed(form: PhaseForm, checkpoints: Sequence[int]) -> dict[int, complex]:
    """(1/N) sum_{n<N} e(n*theta) by literal summation, emitted at each
    checkpoint.  Chunk bases are reduced exactly, so no drift at any N."""
    acc = MeanAccumulator()
    out = {}
    stepf = form.frac()
    prev = 0
    for cp in checkpoints:
        for n0, cnt in chunk_ranges(prev, cp - prev, CHUNK):
            anchor = (n0 // CHUNK) * CHUNK
            base = form.frac_times(anchor)
            offs = np.arange(n0 - anchor, n0 - anchor + cnt, dtype=np.float64)
            acc.add(np.exp((2j * np.pi) * frac(base + offs * stepf)))
        out[cp] = acc.mean()
        prev = cp
    return out


class _GeometricCache:
    def __init__(self, system, checkpoints):
        self.system = system
        self.checkpoints = list(checkpoints)
        self._cache: dict[tuple[int, ...], dict[int, complex]] = {}

    def get(self, k: tuple[int, ...]) -> dict[int, complex]:
        if k not in self._cache:
            form = phase_form(self.system, k)
            if form is None:
                raise ValidationError("factorized path needs a phase-linear system")
            self._cache[k] = geometric_mean_streamed(form, self.checkpoints)
        return self._cache[k]


# ---------------------------------------------------------------------------
# Square averages


def _square_direct(system, fs, x, N) -> complex:
    d = len(fs)
    if d * N * N > GRID_CAP:
        raise ResourceCapError(
            f"direct square grid {N}x{N} (d={d}) exceeds the cost cap; "
            "use a phase-linear system for the factorized path")
    row_sums_re: list[float] = []
    row_sums_im: list[float] = []
    for m in range(N):
        vals = np.ones(N, dtype=np.complex128)
        for j, f in enumerate(fs):
            pts = orbit_points(system, x, 1, j * m, N, coords="obs")
            vals *= evaluate(f, pts)
        row_sums_re.append(math.fsum(vals.real))
        row_sums_im.append(math.fsum(vals.imag))
    return complex(math.fsum(row_sums_re) / (N * N),
                   math.fsum(row_sums_im) / (N * N))


def _square_factorized(system, fs, x, checkpoints) -> list[tuple[int, complex]]:
    xo = obs_coords(system, x)
    cache = _GeometricCache(system, checkpoints)
    pieces = []  # (coeff * e(K.x), K, M)
    for coeff, ks in term_tuples(list(fs)):
        K = _vec_sum(ks, [1] * len(ks))
        M = _vec_sum(ks, list(range(len(ks))))
        pieces.append((coeff * character_at(K, xo), K, M))
    out = []
    for cp in checkpoints:
        total = 0.0 + 0.0j
        for amp, K, M in pieces:
            total += amp * cache.get(K)[cp] * cache.get(M)[cp]
        out.append((cp, total))
    return out


def multilinear_average_square(system: DynamicalSystem, fs: Sequence[Observable],
                               x, N: int, mode: str = "auto") -> complex:
    """(1/N^2) sum_{n,m in [0,N)} prod_j f_j(T^{n+(j-1)m} x).

    mode="direct" walks the grid (any system, cost-capped); mode="factorized"
    streams the per-term geometric sums (phase-linear systems, any N);
    "auto" prefers factorized when available.
    """
    if not fs:
        raise ValidationError("need at least one observable")
    if N < 1:
        raise ValidationError("N must be >= 1")
    if mode not in ("auto", "direct", "factorized"):
        raise ValidationError(f"unknown mode {mode!r}")
    linear_ok = system.phase_basis() is not None
    if mode == "factorized" or (mode == "auto" and linear_ok):
        return _square_factorized(system, fs, x, [N])[0][1]
    return _square_direct(system, fs, x, N)


def square_trajectory(system, fs, x, checkpoints, mode="auto",
                      params=None) -> AverageTrajectory:
    linear_ok = system.phase_basis() is not None
    if mode == "factorized" or (mode == "auto" and linear_ok):
        vals = _square_factorized(system, fs, x, list(checkpoints))
        path = "factorized"
    else:
        vals = [(cp, _square_direct(system, fs, x, cp)) for cp in checkpoints]
        path = "direct"
    return AverageTrajectory("square", tuple(vals),
                             params or _traj_params(system, fs, x, path))


# ---------------------------------------------------------------------------
# Cube averages


def cube_eps_index(k: int) -> list[tuple[int, ...]]:
    """{0,1}^k minus the origin, sorted."""
    out = []
    for mask in range(1, 1 << k):
        out.append(tuple((mask >> i) & 1 for i in range(k)))
    return sorted(out)


def _cube_direct(system, fs_by_eps, x, N) -> complex:
    eps_list = sorted(fs_by_eps)
    k = len(eps_list[0])
    if N ** k > GRID_CAP:
        raise ResourceCapError(f"direct cube grid N^{k} exceeds the cost cap")
    outer_shape = (N,) * (k - 1)
    sums_re: list[float] = []
    sums_im: list[float] = []
    for outer in np.ndindex(outer_shape):
        vals = np.ones(N, dtype=np.complex128)
        for eps in eps_list:
            offset = sum(o * e_i for o, e_i in zip(outer, eps[1:]))
            if eps[0]:
                pts = orbit_points(system, x, 1, offset, N, coords="obs")
                vals *= evaluate(fs_by_eps[eps], pts)
            else:
                pt = orbit_points(system, x, 1, offset, 1, coords="obs")
                vals *= evaluate(fs_by_eps[eps], pt)[0]
        sums_re.append(math.fsum(vals.real))
        sums_im.append(math.fsum(vals.imag))
    total = complex(math.fsum(sums_re), math.fsum(sums_im))
    return total / float(N ** k)


def _cube_factorized(system, fs_by_eps, x, checkpoints) -> list[tuple[int, complex]]:
    eps_list = sorted(fs_by_eps)
    k = len(eps_list[0])
    xo = obs_coords(system, x)
    cache = _GeometricCache(system, checkpoints)
    pieces = []
    for coeff, ks in term_tuples([fs_by_eps[eps] for eps in eps_list]):
        K = _vec_sum(ks, [1] * len(ks))
        rates = [_vec_sum(ks, [eps[i] for eps in eps_list]) for i in range(k)]
        pieces.append((coeff * character_at(K, xo), rates))
    out = []
    for cp in checkpoints:
        total = 0.0 + 0.0j
        for amp, rates in pieces:
            val = amp
            for r in rates:
                val *= cache.get(r)[cp]
            total += val
        out.append((cp, total))
    return out


def cube_average(system: DynamicalSystem,
                 fs_by_eps: dict[tuple[int, ...], Observable],
                 x, N: int, mode: str = "auto") -> complex:
    """(1/N^k) sum over the k-cube of prod_eps f_eps(T^{n . eps} x).

    fs_by_eps must be keyed by every vertex of {0,1}^k except the origin.
    Orders k > 4 are rejected (cost guard).
    """
    if not fs_by_eps:
        raise ValidationError("need at least one cube observable")
    k = len(next(iter(fs_by_eps)))
    if k < 1:
        raise ValidationError("cube order must be >= 1")
    if k > MAX_CUBE_ORDER:
        raise ResourceCapError(f"cube order {k} > {MAX_CUBE_ORDER} rejected")
    if set(fs_by_eps) != set(cube_eps_index(k)):
        raise ValidationError(
            "cube observables must cover {0,1}^k minus the origin exactly")
    if N < 1:
        raise ValidationError("N must be >= 1")
    if mode not in ("auto", "direct", "factorized"):
        raise ValidationError(f"unknown mode {mode!r}")
    linear_ok = system.phase_basis() is not None
    if mode == "factorized" or (mode == "auto" and linear_ok):
        return _cube_factorized(system, fs_by_eps, x, [N])[0][1]
    return _cube_direct(system, fs_by_eps, x, N)


# ---------------------------------------------------------------------------
# Folner box averages over a Z^2 action


@dataclass(frozen=True)
class FolnerBox:
    """The rectangle [0, n1) x [0, n2) in Z^2."""
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValidationError("box side lengths must be >= 1")

    @property
    def size(self) -> int:
        return self.n1 * self.n2


@dataclass(frozen=True)
class IteratedMap:
    """T^power as a map in its own right (for the Z^2 actions below)."""
    system: DynamicalSystem
    power: int = 1

    def step(self, p, n: int = 1):
        return self.system.step(p, n * self.power)

    def orbit(self, x, n0: int, count: int):
        return orbit_points(self.system, x, self.power, n0, count, coords="obs")


def _as_map(m) -> IteratedMap:
    if isinstance(m, IteratedMap):
        return m
    return IteratedMap(m, 1)


def check_commutation(m1: IteratedMap, m2: IteratedMap, tol: float = 1e-10) -> None:
    """Verify S1 S2 = S2 S1 on deterministic sample points."""
    if m1.system.dim != m2.system.dim:
        raise CommutationError("maps act on different state spaces")
    pts = probe_points(m1.system, 5)
    for p in pts:
        a = m1.step(m2.step(p))
        b = m2.step(m1.step(p))
        d = np.abs(a - b)
        d = np.minimum(d, 1.0 - d)
        if d.max() > tol:
            raise CommutationError(
                f"maps fail to commute at {p}: deviation {d.max():.3e}")


def folner_average(action, f: Observable, x, box: FolnerBox) -> complex:
    """(1/|box|) sum_{(n,m) in box} f(S1^n S2^m x) for a commuting pair."""
    m1, m2 = (_as_map(a) for a in action)
    check_commutation(m1, m2)
    if box.size > GRID_CAP:
        raise ResourceCapError(f"box of {box.size} points exceeds the cost cap")
    x = m1.system.check_point(np.asarray(x, dtype=np.float64))
    sums_re: list[float] = []
    sums_im: list[float] = []
    for m in range(box.n2):
        y = m2.step(x, m)
        vals = evaluate(f, m1.orbit(y, 0, box.n1))
        sums_re.append(math.fsum(vals.real))
        sums_im.append(math.fsum(vals.imag))
    return complex(math.fsum(sums_re) / box.size,
                   math.fsum(sums_im) / box.size)


# ---------------------------------------------------------------------------
# Temperedness (Shulman's condition) for box sequences


def _union_area_shared_corner(lowers: list[tuple[int, int]],
                              hi: tuple[int, int]) -> int:
    """Exact lattice-point count of a union of integer boxes
    [lx, hi_x] x [ly, hi_y] sharing the upper corner."""
    pts = sorted(lowers)
    hix, hiy = hi
    area = 0
    best_ly = None
    # sweep columns left to right; the covered rows in a column are
    # [min ly among boxes whose lx <= column, hiy]
    for i, (lx, ly) in enumerate(pts):
        best_ly = ly if best_ly is None else min(best_ly, ly)
        next_lx = pts[i + 1][0] if i + 1 < len(pts) else hix + 1
        if next_lx > lx:
            area += (min(next_lx, hix + 1) - lx) * (hiy - best_ly + 1)
    return area


def union_of_difference_sets(boxes: Sequence[FolnerBox], n: int) -> int:
    """|union_{k<n} (-F_k) + F_n| exactly (F^{-1} = -F in Z^2)."""
    hi = (boxes[n].n1 - 1, boxes[n].n2 - 1)
    lowers = [(-(boxes[k].n1 - 1), -(boxes[k].n2 - 1)) for k in range(n)]
    if not lowers:
        return 0
    return _union_area_shared_corner(lowers, hi)


def temperedness_margins(boxes: Sequence[FolnerBox], C: float) -> list[tuple[int, int, float]]:
    """Per index n: (n, |union_{k<n}(-F_k)+F_n|, C*|F_n|)."""
    if not boxes:
        raise ValidationError("need at least one box")
    return [(n, union_of_difference_sets(boxes, n), C * boxes[n].size)
            for n in range(len(boxes))]


def is_tempered(boxes: Sequence[FolnerBox], C: float) -> bool:
    """Shulman's condition |union_{k<n} F_k^{-1} F_n| < C |F_n| for all n,
    by exact integer counting."""
    return all(u < bound for _, u, bound in temperedness_margins(boxes, C))
