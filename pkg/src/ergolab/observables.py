"""Finite character sums: the exact function algebra on the state spaces.

An Observable is a finite sum  f(p) = sum_k c_k e(k . p)  with integer
frequency vectors k and complex coefficients, where e(t) = exp(2*pi*i*t).
On the Heisenberg nilmanifold the frequencies address the (x, y) base
coordinates only; those characters are invariant under the lattice, which is
what makes them well defined on the quotient.

Everything an analytic argument needs is exact here: the Haar integral is
the zero-frequency coefficient, products are convolutions of the frequency
lists, and composition with T^n is again a character sum because every
supported system maps characters to characters (for the torus automorphism
the frequency moves by the transposed matrix power and is overflow-checked).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DimensionMismatchError, ResourceCapError, ValidationError
from .phases import TWO_PI, format_real, frac_combo

TERM_CAP = 10 ** 6


def _freq_key(k) -> tuple[int, ...]:
    if np.isscalar(k):
        return (int(k),)
    return tuple(int(v) for v in k)


@dataclass(frozen=True)
class Observable:
    """Canonical merged character sum: sorted frequencies, no duplicates,
    exact-zero coefficients dropped."""

    dim: int
    terms: tuple[tuple[tuple[int, ...], complex], ...]

    @staticmethod
    def from_dict(dim: int, coeffs: Mapping[tuple[int, ...], complex]) -> "Observable":
        terms = tuple(sorted((k, complex(c)) for k, c in coeffs.items()
                             if c != 0))
        for k, _ in terms:
            if len(k) != dim:
                raise DimensionMismatchError(
                    f"frequency {k} does not have dimension {dim}")
        return Observable(dim, terms)

    @staticmethod
    def character(k, coeff: complex = 1.0) -> "Observable":
        key = _freq_key(k)
        return Observable.from_dict(len(key), {key: coeff})

    @staticmethod
    def constant(c: complex, dim: int) -> "Observable":
        return Observable.from_dict(dim, {(0,) * dim: c})

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def sup_bound(self) -> float:
        """sum |c_k|, an upper bound for the sup norm."""
        return math.fsum(abs(c) for _, c in self.terms)

    def is_zero_mean(self) -> bool:
        return all(any(k) for k, _ in self.terms)

    def coefficient(self, k) -> complex:
        key = _freq_key(k)
        for kk, c in self.terms:
            if kk == key:
                return c
        return 0.0 + 0.0j

    def __add__(self, other: "Observable") -> "Observable":
        if other.dim != self.dim:
            raise DimensionMismatchError("observable dimension mismatch")
        acc: dict[tuple[int, ...], complex] = dict(self.terms)
        for k, c in other.terms:
            acc[k] = acc.get(k, 0.0) + c
        return Observable.from_dict(self.dim, acc)

    def scale(self, c: complex) -> "Observable":
        return Observable.from_dict(self.dim,
                                    {k: c * v for k, v in self.terms})

    def __repr__(self):
        return f"Observable({format_observable(self)!r})"


# Beyond this frequency size the float dot product k . x starts losing the
# fractional part of the phase; fall back to exact rational reduction.
_FLOAT_FREQ_LIMIT = 1 << 16


def evaluate(f: Observable, points) -> np.ndarray | complex:
    """f at one point (dim,) or a batch (..., d) with d >= f.dim.

    Extra trailing coordinates (the Heisenberg central coordinate) are
    ignored; characters only read the first f.dim coordinates."""
    pts = np.asarray(points, dtype=np.float64)
    scalar = pts.ndim == 1
    if pts.shape[-1] < f.dim:
        raise DimensionMismatchError(
            f"point dim {pts.shape[-1]} < observable dim {f.dim}")
    pts = pts[..., :f.dim]
    out = np.zeros(pts.shape[:-1], dtype=np.complex128)
    for k, c in f.terms:
        if max((abs(v) for v in k), default=0) <= _FLOAT_FREQ_LIMIT:
            phase = pts @ np.asarray(k, dtype=np.float64)
        else:
            flat = pts.reshape(-1, f.dim)
            phase = np.fromiter(
                (frac_combo(zip(k, row)) for row in flat),
                dtype=np.float64, count=flat.shape[0]).reshape(pts.shape[:-1])
        out += c * np.exp((TWO_PI * 1j) * phase)
    return complex(out) if scalar else out


def integral_haar(f: Observable) -> complex:
    """Exact Haar integral: the zero-frequency coefficient."""
    return f.coefficient((0,) * f.dim)


def conjugate(f: Observable) -> Observable:
    return Observable.from_dict(
        f.dim, {tuple(-v for v in k): c.conjugate() for k, c in f.terms})


def multiply(f: Observable, g: Observable, term_cap: int = TERM_CAP) -> Observable:
    """Exact product: convolution of the frequency lists."""
    if f.dim != g.dim:
        raise DimensionMismatchError("observable dimension mismatch")
    if f.term_count * g.term_count > term_cap:
        raise ResourceCapError(
            f"product would touch {f.term_count * g.term_count} term pairs "
            f"(cap {term_cap})")
    acc: dict[tuple[int, ...], complex] = {}
    for kf, cf in f.terms:
        for kg, cg in g.terms:
            k = tuple(a + b for a, b in zip(kf, kg))
            acc[k] = acc.get(k, 0.0) + cf * cg
    return Observable.from_dict(f.dim, acc)


def compose_with_power(f: Observable, system, n: int) -> Observable:
    """The exact pullback f o T^n as a character sum on the same space."""
    if f.dim != system.obs_dim:
        raise DimensionMismatchError(
            f"observable dim {f.dim} != system frequency dim {system.obs_dim}")
    acc: dict[tuple[int, ...], complex] = {}
    for k, c in f.terms:
        nk, mult = system.compose_term(k, n)
        acc[nk] = acc.get(nk, 0.0) + c * mult
    return Observable.from_dict(f.dim, acc)


# ---------------------------------------------------------------------------
# CLI literal syntax:  "re,im:k1,k2[;re,im:k1,k2...]"
# A term may omit ",im" (real coefficient).  Example on the 1-torus:
#   "1,0:1 ; 1,0:-1"  is  e(x) + e(-x).


def parse_observable(text: str, dim: int) -> Observable:
    acc: dict[tuple[int, ...], complex] = {}
    body = text.strip()
    if not body:
        raise ValidationError("empty observable literal")
    for raw in body.split(";"):
        part = raw.strip()
        if not part:
            continue
        try:
            coeff_s, freq_s = part.split(":")
            cparts = [p.strip() for p in coeff_s.split(",")]
            if len(cparts) == 1:
                coeff = complex(float(cparts[0]), 0.0)
            elif len(cparts) == 2:
                coeff = complex(float(cparts[0]), float(cparts[1]))
            else:
                raise ValueError("coefficient needs 1 or 2 components")
            k = tuple(int(p.strip()) for p in freq_s.split(","))
        except ValueError as exc:
            raise ValidationError(f"bad observable term {part!r}: {exc}") from exc
        if len(k) != dim:
            raise DimensionMismatchError(
                f"term {part!r} has {len(k)} frequency components, expected {dim}")
        acc[k] = acc.get(k, 0.0) + coeff
    return Observable.from_dict(dim, acc)


def format_observable(f: Observable) -> str:
    if not f.terms:
        return "0,0:" + ",".join(["0"] * f.dim)
    parts = []
    for k, c in f.terms:
        parts.append(f"{format_real(c.real)},{format_real(c.imag)}:"
                     + ",".join(str(v) for v in k))
    return " ; ".join(parts)
