"""Empirical self-joinings, fiber measures, and the progression-subtorus
oracle for rotations.

The d-fold self-joining of a system is approximated by the tuple cloud

    { (T^n x_s, T^{2n} x_s, ..., T^{dn} x_s) : s < S, n < N }

over Haar-sampled starts x_s; the fiber measure over a single x is the same
construction with one start.  Clouds are stored as explicit point arrays
(never binned) so that integrating a tensor product of characters against a
fiber cloud reproduces the streamed multilinear average bit for bit: the
points come from the same anchored orbit generator, the per-n products are
multiplied in the same factor order, and the accumulation is the same
chunked-fsum mean.  Integration against a multi-start cloud is the mean of
the per-start means, which makes the barycenter identity (joining integral =
average of fiber integrals) an exact regrouping rather than a tolerance.

For an ergodic rotation the weak limit of the cloud is Haar measure on the
arithmetic-progression subtorus {(y, y+b, ..., y+(d-1)b)}, so the limit of a
tensor character integral is known in closed form; `ap_subtorus_integral`
and `ap_fiber_integral` are that oracle.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, ResourceCapError, ValidationError
from .observables import Observable, evaluate
from .phases import CHUNK, MeanAccumulator, chunk_ranges, e
from .rng import SplitMix64
from .systems import DynamicalSystem, orbit_points, system_to_kv

CLOUD_CAP = 10 ** 7   # tuples; beyond this, use the streaming integral


@dataclass(frozen=True)
class CloudProvenance:
    scheme: str                  # "diagonal-pushforward" | "fiber-orbit"
    system: dict
    d: int
    n: int
    seed: int | None
    starts: int


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniformly weighted tuple cloud on X^d.

    points has shape (starts, N, d, state_dim); total mass 1 with weight
    1/(starts*N) per tuple."""

    points: np.ndarray
    provenance: CloudProvenance

    @property
    def arity(self) -> int:
        return self.points.shape[2]

    @property
    def tuple_count(self) -> int:
        return self.points.shape[0] * self.points.shape[1]


def _build_cloud(system, starts: np.ndarray, d: int, N: int,
                 scheme: str, seed: int | None) -> EmpiricalMeasure:
    S = starts.shape[0]
    if S * N > CLOUD_CAP:
        raise ResourceCapError(
            f"cloud of {S * N} tuples exceeds the {CLOUD_CAP} cap; "
            "use self_joining_tensor_integral for streaming integration")
    pts = np.empty((S, N, d, system.dim))
    for s in range(S):
        for j in range(1, d + 1):
            pts[s, :, j - 1, :] = orbit_points(system, starts[s], j, 0, N,
                                               coords="state")
    prov = CloudProvenance(scheme, system_to_kv(system), d, N, seed, S)
    return EmpiricalMeasure(pts, prov)


def empirical_self_joining(system: DynamicalSystem, d: int,
                           x_sample_count: int, N: int,
                           rng: SplitMix64) -> EmpiricalMeasure:
    """Tuple cloud approximating the d-fold self-joining, from Haar starts."""
    if d < 1 or N < 1 or x_sample_count < 1:
        raise ValidationError("d, N and x_sample_count must be >= 1")
    seed = rng.seed
    starts = system.haar_block(rng, x_sample_count)
    return _build_cloud(system, starts, d, N, "diagonal-pushforward", seed)


def fiber_measure(system: DynamicalSystem, x, d: int, N: int) -> EmpiricalMeasure:
    """The empirical fiber measure over x: the single-start orbit cloud."""
    if d < 1 or N < 1:
        raise ValidationError("d and N must be >= 1")
    x = system.check_point(np.asarray(x, dtype=np.float64))
    return _build_cloud(system, x[None, :], d, N, "fiber-orbit", None)


def _block_mean(block: np.ndarray, fs: Sequence[Observable]) -> complex:
    """Mean over n of prod_j f_j(block[n, j]); same chunking and factor
    order as the streamed multilinear average."""
    N = block.shape[0]
    acc = MeanAccumulator()
    for n0, cnt in chunk_ranges(0, N, CHUNK):
        vals = np.ones(cnt, dtype=np.complex128)
        for j, f in enumerate(fs):
            vals *= evaluate(f, block[n0:n0 + cnt, j])
        acc.add(vals)
    return acc.mean()


def integrate_tensor(m: EmpiricalMeasure, fs: Sequence[Observable]) -> complex:
    """Integral of f_1(x_1)...f_d(x_d) against the cloud: the mean over
    starts of the per-start orbit means."""
    if len(fs) != m.arity:
        raise DimensionMismatchError(
            f"{len(fs)} observables for arity-{m.arity} cloud")
    per_start = [_block_mean(m.points[s], fs)
                 for s in range(m.points.shape[0])]
    acc = MeanAccumulator()
    for v in per_start:
        acc.add_scalar(v)
    return acc.mean()


def fiber_integrals(m: EmpiricalMeasure, fs: Sequence[Observable]) -> list[complex]:
    """Per-start tensor integrals (the fiber values behind the barycenter)."""
    if len(fs) != m.arity:
        raise DimensionMismatchError(
            f"{len(fs)} observables for arity-{m.arity} cloud")
    return [_block_mean(m.points[s], fs) for s in range(m.points.shape[0])]


def self_joining_tensor_integral(system: DynamicalSystem, d: int,
                                 x_sample_count: int, N: int,
                                 rng: SplitMix64,
                                 fs: Sequence[Observable]) -> complex:
    """integrate_tensor(empirical_self_joining(...), fs) without holding the
    cloud in memory; for tuple counts beyond the cap."""
    starts = system.haar_block(rng, x_sample_count)
    outer = MeanAccumulator()
    for s in range(x_sample_count):
        acc = MeanAccumulator()
        for n0, cnt in chunk_ranges(0, N, CHUNK):
            vals = np.ones(cnt, dtype=np.complex128)
            for j, f in enumerate(fs):
                pts = orbit_points(system, starts[s], j + 1, n0, cnt,
                                   coords="obs")
                vals *= evaluate(f, pts)
            acc.add(vals)
        outer.add_scalar(acc.mean())
    return outer.mean()


def marginal(m: EmpiricalMeasure, j: int) -> EmpiricalMeasure:
    """Projection of the cloud to coordinate j (1-based), arity 1."""
    if not 1 <= j <= m.arity:
        raise ValidationError(f"coordinate {j} out of range 1..{m.arity}")
    prov = CloudProvenance(m.provenance.scheme + f"-marginal-{j}",
                           m.provenance.system, 1, m.provenance.n,
                           m.provenance.seed, m.provenance.starts)
    return EmpiricalMeasure(m.points[:, :, j - 1:j, :], prov)


# ---------------------------------------------------------------------------
# The diagonal actions


@dataclass(frozen=True)
class DiagonalAction:
    """tau_d = T x ... x T and sigma_d = T x T^2 x ... x T^d on X^d."""

    system: DynamicalSystem
    d: int

    def apply_sigma(self, tuples: np.ndarray, n: int = 1) -> np.ndarray:
        out = np.empty_like(tuples)
        for j in range(1, self.d + 1):
            out[..., j - 1, :] = self.system.step(tuples[..., j - 1, :],
                                                  j * n)
        return out

    def apply_tau(self, tuples: np.ndarray, n: int = 1) -> np.ndarray:
        out = np.empty_like(tuples)
        for j in range(self.d):
            out[..., j, :] = self.system.step(tuples[..., j, :], n)
        return out


def shift_cloud(m: EmpiricalMeasure, which: str = "sigma",
                n: int = 1) -> EmpiricalMeasure:
    """Apply tau_d or sigma_d to every tuple of the cloud."""
    system = _system_of(m)
    action = DiagonalAction(system, m.arity)
    fn = action.apply_sigma if which == "sigma" else action.apply_tau
    S, N = m.points.shape[0], m.points.shape[1]
    flat = m.points.reshape(S * N, m.arity, -1)
    moved = fn(flat, n).reshape(m.points.shape)
    prov = CloudProvenance(m.provenance.scheme + f"-{which}^{n}",
                           m.provenance.system, m.arity, m.provenance.n,
                           m.provenance.seed, m.provenance.starts)
    return EmpiricalMeasure(moved, prov)


def _system_of(m: EmpiricalMeasure) -> DynamicalSystem:
    from .systems import system_from_kv
    return system_from_kv(m.provenance.system)


# ---------------------------------------------------------------------------
# Progression-subtorus oracle (ergodic rotations)


def _freqs(ks) -> list[tuple[int, ...]]:
    out = []
    for k in ks:
        out.append((int(k),) if np.isscalar(k) else tuple(int(v) for v in k))
    if len({len(k) for k in out}) != 1:
        raise DimensionMismatchError("frequency vectors of mixed dimension")
    return out


def ap_subtorus_integral(ks) -> complex:
    """Limit of the tensor character integral against the d-fold
    self-joining of an ergodic rotation.

    The joining is Haar measure on {(y, y+b, ..., y+(d-1)b)}; integrating
    e(k_1 x_1)...e(k_d x_d) over (y, b) gives 1 iff sum k_j = 0 and
    sum (j-1) k_j = 0, else 0."""
    kk = _freqs(ks)
    dim = len(kk[0])
    K = tuple(sum(k[c] for k in kk) for c in range(dim))
    M = tuple(sum(j * k[c] for j, k in enumerate(kk)) for c in range(dim))
    return 1.0 + 0.0j if not any(K) and not any(M) else 0.0 + 0.0j


def ap_fiber_integral(ks, x) -> complex:
    """Limit of the tensor character integral against the fiber measure over
    x for an ergodic rotation: the orbit closure of (x, ..., x) under
    T x T^2 x ... x T^d is {(x+t, x+2t, ..., x+dt)}, so the value is
    e((sum k_j) . x) when sum j*k_j = 0, else 0."""
    kk = _freqs(ks)
    dim = len(kk[0])
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))[:dim]
    r = tuple(sum((j + 1) * k[c] for j, k in enumerate(kk))
              for c in range(dim))
    if any(r):
        return 0.0 + 0.0j
    K = tuple(sum(k[c] for k in kk) for c in range(dim))
    phase = math.fsum(kc * xc for kc, xc in zip(K, x))
    return e(phase - math.floor(phase))


def character_box(d: int, kmax: int, dim: int = 1) -> list[tuple]:
    """All d-tuples of frequency vectors with sup norm <= kmax."""
    from itertools import product as iproduct
    singles = [k if dim > 1 else k[0]
               for k in iproduct(range(-kmax, kmax + 1), repeat=dim)]
    return list(iproduct(singles, repeat=d))


# ---------------------------------------------------------------------------
# Decomposition consistency (barycenter identity + dispersion)


@dataclass(frozen=True)
class DecompositionReport:
    joining_integral: complex
    barycenter: complex
    exact_match: bool
    fiber_values: tuple[complex, ...]
    dispersion: float          # population std of the fiber integrals

    @property
    def start_count(self) -> int:
        return len(self.fiber_values)


def decomposition_consistency(system: DynamicalSystem, x_sample_count: int,
                              d: int, N: int, fs: Sequence[Observable],
                              rng: SplitMix64) -> DecompositionReport:
    """Check that the cloud integral equals the average of its per-start
    fiber integrals (exact regrouping), and report how the fiber integrals
    disperse across starts.

    Zero dispersion is the ergodic (start-independent) situation; large
    dispersion exhibits the non-ergodicity of the self-joining under the
    staggered diagonal action that the fiber decomposition resolves."""
    cloud = empirical_self_joining(system, d, x_sample_count, N, rng)
    joint = integrate_tensor(cloud, fs)
    fibers = fiber_integrals(cloud, fs)
    acc = MeanAccumulator()
    for v in fibers:
        acc.add_scalar(v)
    bary = acc.mean()
    meanv = bary
    disp = math.sqrt(math.fsum(abs(v - meanv) ** 2 for v in fibers)
                     / len(fibers))
    return DecompositionReport(joint, bary, joint == bary, tuple(fibers), disp)


# ---------------------------------------------------------------------------
# Binary cloud dump
#
# Layout (little endian): header of four uint64 {d, N, count, seed}, then
# count * d * state_dim float64 in C order (tuple index, coordinate j,
# state component).  seed is 0 for fiber clouds.  The state dimension is
# recovered from the file size.


def dump_cloud(m: EmpiricalMeasure, path) -> None:
    S, N, d, dim = m.points.shape
    seed = m.provenance.seed or 0
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4Q", d, N, S * N, seed))
        fh.write(m.points.reshape(S * N, d, dim).astype("<f8").tobytes(order="C"))


def load_cloud(path) -> tuple[np.ndarray, dict]:
    with open(path, "rb") as fh:
        head = fh.read(32)
        d, N, count, seed = struct.unpack("<4Q", head)
        body = np.frombuffer(fh.read(), dtype="<f8")
    if count == 0 or body.size % (count * d):
        raise ValidationError("corrupt cloud dump")
    dim = body.size // (count * d)
    pts = body.reshape(count, d, dim)
    return pts, {"d": d, "n": N, "count": count, "seed": seed}
