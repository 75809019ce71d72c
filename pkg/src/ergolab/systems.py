"""Concrete invertible measure-preserving systems on explicit state spaces.

Four kinds are provided, all with coordinates stored as doubles in [0, 1):

* ``Rotation``           -- x |-> x + alpha on the m-torus.
* ``SkewProduct``        -- (y, g) |-> (y + alpha, g + B y + c) on a base
                            torus times a fiber torus (an affine cocycle
                            extension with integer linear part, so characters
                            stay characters under composition).
* ``ToralAutomorphism``  -- x |-> A x with A an integer unimodular matrix.
* ``HeisenbergTranslation`` -- left translation by t = (alpha, beta, 0) on
                            the Heisenberg nilmanifold G/Gamma, in fundamental
                            -domain coordinates [0,1)^3 with group law
                            (x,y,z)*(x',y',z') = (x+x', y+y', z+z'+x*y').

Every map reduces back into the fundamental domain after each arithmetic
step.  Powers T^n use closed forms (rotation: x + n*alpha; automorphism:
exact integer matrix powers; Heisenberg: t^n = (n a, n b, C(n,2) a b)),
reduced exactly via rational arithmetic so that arbitrarily large n loses no
precision.  Orbit segments are generated in chunks anchored at absolute
indices (see phases.py), which makes the emitted floats a pure function of
the orbit index -- two callers asking for overlapping ranges get bit-equal
points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .phases import (CHUNK, PhaseForm, chunk_ranges, format_real, frac,
                     frac_combo, frac_fraction)
from .rng import SplitMix64

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
SQRT2_M1 = math.sqrt(2.0) - 1.0
SQRT3_M1 = math.sqrt(3.0) - 1.0

# In-chunk index products for quadratic-phase systems stay below this bound
# so the float error per position remains ~1e-11.
_QUAD_CHUNK_SPAN = 1024


def _as_float_tuple(v) -> tuple[float, ...]:
    if np.isscalar(v):
        return (float(v),)
    return tuple(float(x) for x in v)


def _as_int_matrix(m) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in m)


def _check_finite(arr) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValidationError("non-finite coordinate")


def _quad_chunk(stride: int) -> int:
    return max(1, _QUAD_CHUNK_SPAN // max(1, abs(stride)))


def binom2(n: int) -> int:
    """n*(n-1)/2 for any integer n (exact)."""
    return (n * (n - 1)) // 2


# ---------------------------------------------------------------------------
# Heisenberg group primitives


def heisenberg_mul(g, h):
    """Group law (x,y,z)*(x',y',z') = (x+x', y+y', z+z'+x*y'), unreduced."""
    return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])


def heisenberg_inv(g):
    return (-g[0], -g[1], -g[2] + g[0] * g[1])


def reduce_mod_lattice(g) -> np.ndarray:
    """Canonical representative of g*Gamma in [0,1)^3.

    The reducing lattice element (a, b, c) is chosen in the fixed order
    a = -floor(x), b = -floor(y), c = -floor(z + x*b); right multiplication
    gives (x+a, y+b, z+c+x*b).  The representative is unique, so any two
    raw triples in the same coset reduce to the same point.
    """
    g = np.asarray(g, dtype=np.float64)
    if g.shape[-1] != 3:
        raise DimensionMismatchError("Heisenberg point needs 3 coordinates")
    _check_finite(g)
    x, y, z = g[..., 0], g[..., 1], g[..., 2]
    b = -np.floor(y)
    out = np.stack([frac(x), y + b, frac(z + x * b)], axis=-1)
    # y + b can round to 1.0 when y is barely below an integer
    out[..., 1] = frac(out[..., 1])
    return out


def lattice_translate_witness(raw) -> tuple[int, int, int]:
    """The integer (a, b, c) the canonical reduction multiplies raw by."""
    x, y, z = float(raw[0]), float(raw[1]), float(raw[2])
    a = -math.floor(x)
    b = -math.floor(y)
    c = -math.floor(z + x * b)
    return (a, b, c)


# ---------------------------------------------------------------------------
# System kinds


@dataclass(frozen=True)
class Rotation:
    """Translation by a fixed vector on the m-torus, Haar = Lebesgue."""

    alpha: tuple[float, ...]

    def __init__(self, alpha):
        object.__setattr__(self, "alpha", _as_float_tuple(alpha))

    @property
    def dim(self) -> int:
        return len(self.alpha)

    @property
    def obs_dim(self) -> int:
        return self.dim

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        if p.shape[-1:] != (self.dim,):
            raise DimensionMismatchError(
                f"point dim {p.shape[-1:]} != rotation dim {self.dim}")
        _check_finite(p)
        return p

    def step(self, p, n: int = 1) -> np.ndarray:
        p = self.check_point(p)
        shift = np.array([frac_combo([(n, a)]) for a in self.alpha])
        return frac(p + shift)

    def orbit_points(self, x, stride: int, n0: int, count: int,
                     coords: str = "state") -> np.ndarray:
        x = self.check_point(x)
        out = np.empty((count, self.dim))
        for c, (xc, ac) in enumerate(zip(x, self.alpha)):
            stepf = frac_combo([(stride, ac)])
            pos = 0
            for start, cnt in chunk_ranges(n0, count, CHUNK):
                anchor = (start // CHUNK) * CHUNK
                base = frac_combo([(1, xc), (stride * anchor, ac)])
                offs = np.arange(start - anchor, start - anchor + cnt,
                                 dtype=np.float64)
                out[pos:pos + cnt, c] = frac(base + offs * stepf)
                pos += cnt
        return out

    def haar_block(self, rng: SplitMix64, count: int) -> np.ndarray:
        return rng.unit_block(count * self.dim).reshape(count, self.dim)

    def phase_basis(self) -> tuple[float, ...]:
        return self.alpha

    def compose_term(self, k: tuple[int, ...], n: int) -> tuple[tuple[int, ...], complex]:
        from .phases import e
        ph = frac_combo((n * ki, a) for ki, a in zip(k, self.alpha))
        return k, e(ph)

    def kv_items(self):
        return [("kind", "rotation"),
                ("alpha", " ".join(format_real(a) for a in self.alpha))]


@dataclass(frozen=True)
class SkewProduct:
    """Affine cocycle extension of a torus rotation.

    T(y, g) = (y + alpha, g + B y + c) with B an integer matrix
    (fiber_dim x base_dim) and c a real fiber vector.  The canonical example
    (x, y) |-> (x + alpha, y + x) is SkewProduct((alpha,), ((1,),), (0.0,)).
    """

    base_alpha: tuple[float, ...]
    linear: tuple[tuple[int, ...], ...]
    const: tuple[float, ...]

    def __init__(self, base_alpha, linear, const=None):
        object.__setattr__(self, "base_alpha", _as_float_tuple(base_alpha))
        object.__setattr__(self, "linear", _as_int_matrix(linear))
        if const is None:
            const = (0.0,) * len(self.linear)
        object.__setattr__(self, "const", _as_float_tuple(const))
        if any(len(row) != self.base_dim for row in self.linear):
            raise ValidationError("cocycle linear part has ragged rows")
        if len(self.const) != self.fiber_dim:
            raise ValidationError("cocycle constant length != fiber dim")

    @property
    def base_dim(self) -> int:
        return len(self.base_alpha)

    @property
    def fiber_dim(self) -> int:
        return len(self.linear)

    @property
    def dim(self) -> int:
        return self.base_dim + self.fiber_dim

    @property
    def obs_dim(self) -> int:
        return self.dim

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        if p.shape[-1:] != (self.dim,):
            raise DimensionMismatchError(
                f"point dim {p.shape[-1:]} != skew dim {self.dim}")
        _check_finite(p)
        return p

    def _fiber_shift_terms(self, y, n: int, f: int):
        """Exact Fraction terms of the f-th fiber coordinate shift for T^n."""
        terms = []
        for b in range(self.base_dim):
            B = self.linear[f][b]
            if B:
                terms.append((B * n, float(y[b])))
                terms.append((B * binom2(n), self.base_alpha[b]))
        terms.append((n, self.const[f]))
        return terms

    def step(self, p, n: int = 1) -> np.ndarray:
        p = self.check_point(p)
        if p.ndim == 1:
            y, g = p[:self.base_dim], p[self.base_dim:]
            ny = frac(y + np.array([frac_combo([(n, a)]) for a in self.base_alpha]))
            ng = np.array([
                frac(g[f] + frac_combo(self._fiber_shift_terms(y, n, f)))
                for f in range(self.fiber_dim)])
            return np.concatenate([ny, ng])
        return np.stack([self.step(q, n) for q in p])

    def orbit_points(self, x, stride: int, n0: int, count: int,
                     coords: str = "state") -> np.ndarray:
        x = self.check_point(x)
        y, g = x[:self.base_dim], x[self.base_dim:]
        out = np.empty((count, self.dim))
        chunk = _quad_chunk(stride)
        for c, (yc, ac) in enumerate(zip(y, self.base_alpha)):
            stepf = frac_combo([(stride, ac)])
            pos = 0
            for start, cnt in chunk_ranges(n0, count, chunk):
                anchor = (start // chunk) * chunk
                base = frac_combo([(1, yc), (stride * anchor, ac)])
                offs = np.arange(start - anchor, start - anchor + cnt,
                                 dtype=np.float64)
                out[pos:pos + cnt, c] = frac(base + offs * stepf)
                pos += cnt
        for f in range(self.fiber_dim):
            col = self.base_dim + f
            pos = 0
            for start, cnt in chunk_ranges(n0, count, chunk):
                anchor = (start // chunk) * chunk
                s0 = stride * anchor
                # g_f(s0 + u) = Bg0 + u*Bg1 + C(u,2)*ab  (mod 1), u = stride*t
                fr0 = Fraction(float(g[f]))
                fr1 = Fraction(self.const[f])
                frab = Fraction(0)
                for b in range(self.base_dim):
                    B = self.linear[f][b]
                    if B:
                        fa = Fraction(self.base_alpha[b])
                        fy = Fraction(float(y[b]))
                        fr0 += B * (s0 * fy + binom2(s0) * fa)
                        fr1 += B * (fy + s0 * fa)
                        frab += B * fa
                fr0 += s0 * Fraction(self.const[f])
                bg0 = frac_fraction(fr0)
                bg1 = frac_fraction(fr1)
                abf = frac_fraction(frab)
                t = np.arange(start - anchor, start - anchor + cnt,
                              dtype=np.float64)
                u = stride * t
                out[pos:pos + cnt, col] = frac(bg0 + u * bg1
                                               + (u * (u - 1.0) / 2.0) * abf)
                pos += cnt
        return out

    def haar_block(self, rng: SplitMix64, count: int) -> np.ndarray:
        return rng.unit_block(count * self.dim).reshape(count, self.dim)

    def phase_basis(self):
        return None  # frequencies move under composition; not phase-linear

    def compose_term(self, k: tuple[int, ...], n: int) -> tuple[tuple[int, ...], complex]:
        from .phases import e
        p = k[:self.base_dim]
        q = k[self.base_dim:]
        btq = tuple(sum(self.linear[f][b] * q[f] for f in range(self.fiber_dim))
                    for b in range(self.base_dim))
        new_p = tuple(pi + n * bi for pi, bi in zip(p, btq))
        terms = []
        for b in range(self.base_dim):
            terms.append((n * p[b], self.base_alpha[b]))
            terms.append((binom2(n) * btq[b], self.base_alpha[b]))
        for f in range(self.fiber_dim):
            terms.append((n * q[f], self.const[f]))
        return new_p + q, e(frac_combo(terms))

    def project_to_base(self, f):
        """Conditional expectation onto the base factor: drop every term with
        a nonzero fiber frequency (its fiber integral vanishes)."""
        from .observables import Observable
        kept = {}
        for k, cf in f.terms:
            if all(c == 0 for c in k[self.base_dim:]):
                kept[k[:self.base_dim]] = kept.get(k[:self.base_dim], 0) + cf
        return Observable.from_dict(self.base_dim, kept)

    def kv_items(self):
        return [("kind", "skew"),
                ("base_alpha", " ".join(format_real(a) for a in self.base_alpha)),
                ("cocycle_linear", " ".join(str(x) for row in self.linear for x in row)),
                ("cocycle_const", " ".join(format_real(a) for a in self.const))]


def _int_mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k))
                       for j in range(m)) for i in range(n))


def _int_mat_pow(a, n: int):
    dim = len(a)
    if n < 0:
        return _int_mat_pow(_int_mat_inverse(a), -n)
    result = tuple(tuple(1 if i == j else 0 for j in range(dim))
                   for i in range(dim))
    base = a
    while n:
        if n & 1:
            result = _int_mat_mul(result, base)
        base = _int_mat_mul(base, base)
        n >>= 1
    return result


def _int_det(a) -> int:
    dim = len(a)
    if dim == 1:
        return a[0][0]
    if dim == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    det = 0
    for j in range(dim):
        minor = tuple(row[:j] + row[j + 1:] for row in a[1:])
        det += (-1) ** j * a[0][j] * _int_det(minor)
    return det


def _int_mat_inverse(a):
    """Exact inverse of a unimodular integer matrix (adjugate * det)."""
    dim = len(a)
    det = _int_det(a)
    if det not in (1, -1):
        raise ValidationError("matrix is not unimodular")
    cof = []
    for i in range(dim):
        row = []
        for j in range(dim):
            minor = tuple(r[:i] + r[i + 1:]
                          for k, r in enumerate(a) if k != j)
            row.append((-1) ** (i + j) * (_int_det(minor) if dim > 1 else 1))
        cof.append(tuple(row))
    return tuple(tuple(det * x for x in row) for row in cof)


@dataclass(frozen=True)
class ToralAutomorphism:
    """x |-> A x mod 1 with A integer and |det A| = 1 (Haar-preserving)."""

    matrix: tuple[tuple[int, ...], ...]

    def __init__(self, matrix):
        m = _as_int_matrix(matrix)
        object.__setattr__(self, "matrix", m)
        if any(len(row) != len(m) for row in m):
            raise ValidationError("automorphism matrix must be square")
        if _int_det(m) not in (1, -1):
            raise ValidationError("automorphism matrix must have det +-1")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def obs_dim(self) -> int:
        return self.dim

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        if p.shape[-1:] != (self.dim,):
            raise DimensionMismatchError(
                f"point dim {p.shape[-1:]} != automorphism dim {self.dim}")
        _check_finite(p)
        return p

    def _apply_exact(self, mat, p: np.ndarray) -> np.ndarray:
        out = np.empty(self.dim)
        for i in range(self.dim):
            out[i] = frac_combo((mat[i][j], float(p[j]))
                                for j in range(self.dim))
        return out

    def step(self, p, n: int = 1) -> np.ndarray:
        p = self.check_point(p)
        mat = _int_mat_pow(self.matrix, n)
        if p.ndim == 1:
            return self._apply_exact(mat, p)
        if max(abs(x) for row in mat for x in row) < (1 << 20):
            m = np.array(mat, dtype=np.float64)
            return frac(p @ m.T)
        return np.stack([self._apply_exact(mat, q) for q in p])

    def orbit_points(self, x, stride: int, n0: int, count: int,
                     coords: str = "state") -> np.ndarray:
        # Hyperbolicity amplifies float rounding by |lambda| per step, so a
        # plain float stream is garbage after ~30 steps.  Positions are
        # computed from exact integer matrix powers instead; the integers grow
        # like lambda^n, which keeps this path honest but O(n log n)-bit.
        x = self.check_point(x)
        out = np.empty((count, self.dim))
        mstride = _int_mat_pow(self.matrix, stride)
        mat = _int_mat_pow(self.matrix, stride * n0)
        for t in range(count):
            out[t] = self._apply_exact(mat, x)
            mat = _int_mat_mul(mstride, mat)
        return out

    def haar_block(self, rng: SplitMix64, count: int) -> np.ndarray:
        return rng.unit_block(count * self.dim).reshape(count, self.dim)

    def phase_basis(self):
        return None

    def compose_term(self, k: tuple[int, ...], n: int) -> tuple[tuple[int, ...], complex]:
        from .errors import FrequencyOverflowError
        mat = _int_mat_pow(self.matrix, n)
        # frequency transforms by the transpose power
        new_k = tuple(sum(mat[i][j] * k[i] for i in range(self.dim))
                      for j in range(self.dim))
        limit = (1 << 63) - 1
        if any(abs(v) > limit for v in new_k):
            raise FrequencyOverflowError(
                f"character frequency overflow composing with T^{n}: "
                f"{k} -> {new_k} exceeds 63-bit range", n)
        return new_k, 1.0 + 0.0j

    def kv_items(self):
        return [("kind", "automorphism"),
                ("matrix", " ".join(str(x) for row in self.matrix for x in row))]


@dataclass(frozen=True)
class HeisenbergTranslation:
    """Left translation by t = (alpha, beta, 0) on the Heisenberg nilmanifold.

    t^n = (n a, n b, C(n,2) a b); applied to p = (x, y, z) this gives the
    raw triple (x + n a, y + n b, z + C(n,2) a b + n a y), reduced to the
    fundamental domain afterwards.  Observables on this system address the
    (x, y) base coordinates only, so obs_dim = 2.
    """

    alpha: float
    beta: float

    def __init__(self, alpha: float, beta: float):
        object.__setattr__(self, "alpha", float(alpha))
        object.__setattr__(self, "beta", float(beta))

    @property
    def dim(self) -> int:
        return 3

    @property
    def obs_dim(self) -> int:
        return 2

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=np.float64)
        if p.shape[-1:] != (3,):
            raise DimensionMismatchError("Heisenberg point needs 3 coordinates")
        _check_finite(p)
        return p

    def translation(self, n: int = 1) -> tuple[float, float, float]:
        """t^n in exact-reduction-friendly (unreduced) coordinates."""
        return (n * self.alpha, n * self.beta,
                float(binom2(n) * Fraction(self.alpha) * Fraction(self.beta)))

    def step(self, p, n: int = 1) -> np.ndarray:
        p = self.check_point(p)
        if p.ndim > 1:
            if abs(n) <= 8:
                fa, fb = Fraction(self.alpha), Fraction(self.beta)
                gx = n * self.alpha
                gy = n * self.beta
                gz = float(binom2(n) * fa * fb)
                raw = np.stack([gx + p[..., 0], gy + p[..., 1],
                                gz + p[..., 2] + gx * p[..., 1]], axis=-1)
                return reduce_mod_lattice(raw)
            return np.stack([self.step(q, n) for q in p])
        return self._power_point(p, n)

    def _power_point(self, p: np.ndarray, s: int) -> np.ndarray:
        """Exact T^s p via rational reduction (any integer s)."""
        fa, fb = Fraction(self.alpha), Fraction(self.beta)
        fx, fy, fz = Fraction(float(p[0])), Fraction(float(p[1])), Fraction(float(p[2]))
        rx = fx + s * fa
        ry = fy + s * fb
        rz = fz + binom2(s) * fa * fb + s * fa * fy
        fl = ry.numerator // ry.denominator
        return np.array([frac_fraction(rx), frac_fraction(ry),
                         frac_fraction(rz - rx * fl)])

    def orbit_points(self, x, stride: int, n0: int, count: int,
                     coords: str = "state") -> np.ndarray:
        x = self.check_point(x)
        ncols = 2 if coords == "obs" else 3
        out = np.empty((count, ncols))
        fa, fb = Fraction(self.alpha), Fraction(self.beta)
        fx, fy, fz = (Fraction(float(x[0])), Fraction(float(x[1])),
                      Fraction(float(x[2])))
        # The base coordinates are plain rotation orbits and use the standard
        # chunking, so obs- and state-coordinate requests emit identical
        # floats (integration against stored clouds relies on this).
        stepa = frac_combo([(stride, self.alpha)])
        stepb = frac_combo([(stride, self.beta)])
        pos = 0
        for start, cnt in chunk_ranges(n0, count, CHUNK):
            anchor = (start // CHUNK) * CHUNK
            s0 = stride * anchor
            basea = frac_fraction(fx + s0 * fa)
            baseb = frac_fraction(fy + s0 * fb)
            t = np.arange(start - anchor, start - anchor + cnt, dtype=np.float64)
            out[pos:pos + cnt, 0] = frac(basea + t * stepa)
            out[pos:pos + cnt, 1] = frac(baseb + t * stepb)
            pos += cnt
        if ncols == 3:
            # z(s0+u) reduced: frac(raw_z - raw_x * floor(raw_y)), split so
            # every floating product stays small (u = stride * t <= ~1024).
            chunk = _quad_chunk(stride)
            pos = 0
            for start, cnt in chunk_ranges(n0, count, chunk):
                anchor = (start // chunk) * chunk
                s0 = stride * anchor
                t = np.arange(start - anchor, start - anchor + cnt,
                              dtype=np.float64)
                u = stride * t
                # x re-derived at this finer anchoring: differs from the
                # stored column only by float noise, and the tighter in-chunk
                # products keep the xs*gt error ~1e-10 even at large n
                xs = frac(frac_fraction(fx + s0 * fa) + t * stepa)
                f0 = fy + s0 * fb
                bigF0 = f0.numerator // f0.denominator
                yf0 = frac_fraction(f0)
                gt = np.floor(yf0 + u * self.beta)
                bz0 = frac_fraction(fz + binom2(s0) * fa * fb + s0 * fa * fy)
                bz1 = frac_fraction(s0 * fa * fb + fa * fy)
                abf = frac_fraction(fa * fb)
                bx0 = frac_fraction((fx + s0 * fa) * bigF0)
                bx1 = frac_fraction(fa * bigF0)
                # xs differs from raw_x by an integer, and gt is an integer,
                # so xs * gt matches raw_x * gt mod 1
                zraw = (bz0 + u * bz1 + (u * (u - 1.0) / 2.0) * abf
                        - bx0 - u * bx1 - xs * gt)
                out[pos:pos + cnt, 2] = frac(zraw)
                pos += cnt
        return out

    def haar_block(self, rng: SplitMix64, count: int) -> np.ndarray:
        return rng.unit_block(count * 3).reshape(count, 3)

    def phase_basis(self) -> tuple[float, float]:
        return (self.alpha, self.beta)

    def compose_term(self, k: tuple[int, ...], n: int) -> tuple[tuple[int, ...], complex]:
        from .phases import e
        ph = frac_combo([(n * k[0], self.alpha), (n * k[1], self.beta)])
        return k, e(ph)

    def base_rotation(self) -> Rotation:
        return Rotation((self.alpha, self.beta))

    def kv_items(self):
        return [("kind", "heisenberg"),
                ("alpha", format_real(self.alpha)),
                ("beta", format_real(self.beta))]


DynamicalSystem = Union[Rotation, SkewProduct, ToralAutomorphism,
                        HeisenbergTranslation]


def step(system: DynamicalSystem, p, n: int = 1) -> np.ndarray:
    """T^n applied to p (default one forward step), reduced."""
    return system.step(p, n)


def step_pow(system: DynamicalSystem, p, n: int) -> np.ndarray:
    """Closed-form T^n p; equals n-fold composition of step."""
    return system.step(p, n)


def haar_sample(system: DynamicalSystem, rng: SplitMix64) -> np.ndarray:
    """One uniform point of the invariant measure; advances rng."""
    return system.haar_block(rng, 1)[0]


def orbit_points(system: DynamicalSystem, x, stride: int, n0: int,
                 count: int, coords: str = "state") -> np.ndarray:
    """Points T^{stride*n} x for n in [n0, n0+count) as an array of rows.

    coords="obs" returns only the coordinates observables read (drops the
    Heisenberg central coordinate)."""
    pts = system.orbit_points(x, stride, n0, count, coords=coords)
    if coords == "obs" and pts.shape[1] != system.obs_dim:
        pts = pts[:, :system.obs_dim]
    return pts


def phase_form(system: DynamicalSystem, k: Sequence[int]) -> PhaseForm | None:
    """Rotation rate of the character with frequency k, when composition is
    frequency-preserving with a phase linear in n; None otherwise."""
    basis = system.phase_basis()
    if basis is None:
        return None
    return PhaseForm(tuple(int(v) for v in k), basis)


def probe_points(system: DynamicalSystem, count: int = 5) -> np.ndarray:
    """Deterministic sample points used by internal sanity checks."""
    rng = SplitMix64(0xF01DAB1E)
    return system.haar_block(rng, count)


# ---------------------------------------------------------------------------
# Ergodicity certificates


@dataclass(frozen=True)
class ErgodicityCertificate:
    system: DynamicalSystem
    verdict: str                 # "ergodic" | "non-ergodic" | "undetermined"
    witness: str
    search_bound: int

    @property
    def is_ergodic(self) -> bool:
        return self.verdict == "ergodic"


_RESONANCE_TOL = 1e-12


def _rotation_resonance(alpha: tuple[float, ...], bound: int):
    """Smallest integer vector k (by sup norm) with k . alpha within 1e-12 of
    an integer, or None.  Float prescan, exact rational confirmation."""
    m = len(alpha)
    if m == 1:
        k = np.arange(1, bound + 1, dtype=np.float64)
        d = np.abs(frac(k * alpha[0] + 0.5) - 0.5)
        for idx in np.nonzero(d <= 1e-9)[0]:
            kk = int(idx) + 1
            exact = abs(frac_fraction(kk * Fraction(alpha[0]) + Fraction(1, 2)) - 0.5)
            if exact <= _RESONANCE_TOL:
                return (kk,)
        return None
    if (2 * bound + 1) ** m > 4_000_000:
        raise ValidationError("resonance scan too large; reduce search_bound")
    grids = np.meshgrid(*[np.arange(-bound, bound + 1)] * m, indexing="ij")
    ks = np.stack([g.ravel() for g in grids], axis=1)
    ks = ks[np.any(ks != 0, axis=1)]
    vals = ks @ np.asarray(alpha)
    d = np.abs(frac(vals + 0.5) - 0.5)
    order = np.lexsort((np.abs(ks).sum(axis=1), np.abs(ks).max(axis=1)))
    for idx in order:
        if d[idx] <= 1e-9:
            kk = tuple(int(v) for v in ks[idx])
            q = Fraction(0)
            for c, a in zip(kk, alpha):
                q += c * Fraction(a)
            if abs(frac_fraction(q + Fraction(1, 2)) - 0.5) <= _RESONANCE_TOL:
                return kk
    return None


def ergodicity_certificate(system: DynamicalSystem,
                           search_bound: int) -> ErgodicityCertificate:
    """Decide ergodicity within a declared finite search.

    Rotations: ergodic iff no integer vector k with ||k||_inf <= bound has
    k . alpha integral (tolerance 1e-12, confirmed in exact arithmetic).
    Heisenberg translations follow the verdict of the induced base rotation
    (alpha, beta).  Automorphisms are non-ergodic iff some power A^n (n <=
    bound) has eigenvalue 1 as an integer matrix, certainly ergodic when no
    eigenvalue sits on the unit circle, undetermined otherwise.
    """
    if search_bound < 1:
        raise ValidationError("search_bound must be >= 1")
    if isinstance(system, Rotation):
        k = _rotation_resonance(system.alpha, search_bound)
        if k is None:
            return ErgodicityCertificate(
                system, "ergodic",
                f"no integer relation k.alpha in Z with ||k||inf <= {search_bound}",
                search_bound)
        return ErgodicityCertificate(
            system, "non-ergodic", f"resonant frequency k={k}", search_bound)
    if isinstance(system, HeisenbergTranslation):
        base = ergodicity_certificate(system.base_rotation(), search_bound)
        return ErgodicityCertificate(
            system, base.verdict, f"base rotation: {base.witness}", search_bound)
    if isinstance(system, ToralAutomorphism):
        eigs = np.linalg.eigvals(np.array(system.matrix, dtype=np.float64))
        on_circle = np.abs(np.abs(eigs) - 1.0) < 1e-9
        if not np.any(on_circle):
            return ErgodicityCertificate(
                system, "ergodic",
                "no eigenvalue on the unit circle (hyperbolic)", search_bound)
        power = tuple(tuple(row) for row in system.matrix)
        for n in range(1, search_bound + 1):
            shifted = tuple(tuple(power[i][j] - (1 if i == j else 0)
                                  for j in range(system.dim))
                            for i in range(system.dim))
            if _int_det(shifted) == 0:
                return ErgodicityCertificate(
                    system, "non-ergodic",
                    f"A^{n} has eigenvalue 1 (root-of-unity spectrum)",
                    search_bound)
            power = _int_mat_mul(power, system.matrix)
        return ErgodicityCertificate(
            system, "undetermined",
            f"unit-modulus eigenvalue but no root of unity of order <= {search_bound}",
            search_bound)
    if isinstance(system, SkewProduct):
        base = ergodicity_certificate(Rotation(system.base_alpha), search_bound)
        if base.verdict == "non-ergodic":
            return ErgodicityCertificate(
                system, "non-ergodic", f"base rotation: {base.witness}",
                search_bound)
        # base ergodic: obstruction requires a character e(p.y + q.g) with
        # B^T q = 0 and p.alpha + q.c integral
        if system.fiber_dim == 1 and any(system.linear[0]):
            return ErgodicityCertificate(
                system, "ergodic",
                "ergodic base rotation with nonzero integer cocycle slope",
                search_bound)
        if all(not any(row) for row in system.linear):
            k = _rotation_resonance(system.base_alpha + system.const,
                                    search_bound)
            if k is None:
                return ErgodicityCertificate(
                    system, "ergodic",
                    "product rotation with no joint resonance found",
                    search_bound)
            return ErgodicityCertificate(
                system, "non-ergodic", f"product-rotation resonance k={k}",
                search_bound)
        return ErgodicityCertificate(
            system, "undetermined",
            "cocycle shape outside the certified cases", search_bound)
    raise ValidationError(f"unknown system {system!r}")


# ---------------------------------------------------------------------------
# Serialization of system specifications


def system_to_kv(system: DynamicalSystem) -> dict[str, str]:
    return dict(system.kv_items())


def system_from_kv(kv: dict[str, str]) -> DynamicalSystem:
    kind = kv.get("kind")
    if kind == "rotation":
        return Rotation(tuple(float(v) for v in kv["alpha"].split()))
    if kind == "heisenberg":
        return HeisenbergTranslation(float(kv["alpha"]), float(kv["beta"]))
    if kind == "automorphism":
        flat = [int(v) for v in kv["matrix"].split()]
        dim = math.isqrt(len(flat))
        if dim * dim != len(flat):
            raise ValidationError("matrix entries do not form a square")
        return ToralAutomorphism(tuple(tuple(flat[i * dim:(i + 1) * dim])
                                       for i in range(dim)))
    if kind == "skew":
        base = tuple(float(v) for v in kv["base_alpha"].split())
        flat = [int(v) for v in kv["cocycle_linear"].split()]
        if len(flat) % len(base):
            raise ValidationError("cocycle linear part shape mismatch")
        fdim = len(flat) // len(base)
        linear = tuple(tuple(flat[i * len(base):(i + 1) * len(base)])
                       for i in range(fdim))
        const = tuple(float(v) for v in kv.get("cocycle_const", "").split()) \
            or (0.0,) * fdim
        return SkewProduct(base, linear, const)
    raise ValidationError(f"unknown system kind {kind!r}")


def cat_map() -> ToralAutomorphism:
    """The standard hyperbolic automorphism [[2,1],[1,1]]."""
    return ToralAutomorphism(((2, 1), (1, 1)))


def golden_rotation() -> Rotation:
    return Rotation((GOLDEN,))


def default_heisenberg() -> HeisenbergTranslation:
    return HeisenbergTranslation(SQRT2_M1, SQRT3_M1)


def standard_skew(alpha: float = GOLDEN) -> SkewProduct:
    """(x, y) |-> (x + alpha, y + x)."""
    return SkewProduct((alpha,), ((1,),), (0.0,))
