"""Seeded random generation: torus points, SU(3) Haar matrices, lifted-domain samples.

Three sample spaces feed the distributional checks:

* uniform torus pairs, whose orbit image realizes the deltoid measure at
  lambda = 1;
* Haar special-unitary 3x3 matrices, whose normalized trace realizes the
  deltoid measure at lambda = 4;
* points of the 6-dimensional lifted domain under the density P1**beta,
  with beta = (2*lambda - 11)/6.  At lambda = 11/2 the density is uniform
  and rejection from the unit polydisc is exact; elsewhere a Metropolis
  random walk covers the family (rejection additionally supports beta > 0
  through the envelope P1 <= 1).

Everything is reproducible: a batch is a pure function of (parameters,
seed), and worker streams are derived by seed-sequence spawning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .models import omega1_boundary_values, omega1_membership
from .scalars import RationalLike


class SamplingError(RuntimeError):
    """A sampler could not produce a usable batch."""


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    standard_error: float
    n: int

    def consistent_with(self, value: float, sigmas: float = 4.0) -> bool:
        spread = self.standard_error if self.standard_error > 0 else 1e-300
        return abs(self.mean - value) <= sigmas * spread


@dataclass(frozen=True)
class SampleBatch:
    """Reproducible batch of sample points with acceptance statistics."""

    kind: str  # torus | su3 | omega1
    seed: int
    params: dict
    points: np.ndarray
    stats: dict = field(default_factory=dict)
    correlated: bool = False  # True for MCMC output (batch-means errors)

    def __len__(self) -> int:
        return len(self.points)


# ---------------------------------------------------------------------------
# Torus
# ---------------------------------------------------------------------------


def sample_torus(n: int, seed: int) -> SampleBatch:
    """n i.i.d. uniform angle pairs on [0, 2 pi)^2."""
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 2.0 * math.pi, size=(n, 2))
    return SampleBatch("torus", seed, {"n": n}, pts)


# ---------------------------------------------------------------------------
# SU(3) Haar
# ---------------------------------------------------------------------------


def _haar_su3_chunk(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar SU(3) via QR of a complex Ginibre ensemble.

    The R-diagonal phase correction makes the QR decomposition unique (so Q
    is Haar on U(3)); dividing by a cube root of the determinant projects
    onto the det = 1 slice, and left-invariance makes the result Haar there.
    """
    # Interleave the real and imaginary draws per entry so that chunked
    # generation consumes the stream exactly like one bulk call.
    raw = rng.standard_normal((n, 3, 3, 2))
    z = raw[..., 0] + 1j * raw[..., 1]
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    q = q * phases[:, np.newaxis, :]
    det = np.linalg.det(q)
    q = q / np.power(det, 1.0 / 3.0)[:, np.newaxis, np.newaxis]
    return q


def sample_su3_haar(n: int, seed: int) -> SampleBatch:
    """n Haar-distributed special unitary 3x3 matrices."""
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    return SampleBatch("su3", seed, {"n": n}, _haar_su3_chunk(rng, n))


def su3_trace_samples(n: int, seed: int, chunk: int = 100_000) -> np.ndarray:
    """Normalized traces trace(g)/3 of n Haar SU(3) matrices, streamed.

    Equivalent to sample_su3_haar(n, seed) followed by the trace map, but
    never materializes the matrices; used for large moment runs.
    """
    rng = np.random.default_rng(seed)
    out = np.empty(n, dtype=complex)
    done = 0
    while done < n:
        m = min(chunk, n - done)
        q = _haar_su3_chunk(rng, m)
        out[done : done + m] = np.trace(q, axis1=-2, axis2=-1) / 3.0
        done += m
    return out


# ---------------------------------------------------------------------------
# Lifted domain
# ---------------------------------------------------------------------------


def _beta_of_lambda(lam: Fraction) -> Fraction:
    return (2 * lam - 11) / 6


def _propose_polydisc(rng: np.random.Generator, n: int) -> np.ndarray:
    radii = np.sqrt(rng.uniform(size=(n, 3)))
    angles = rng.uniform(0.0, 2.0 * math.pi, size=(n, 3))
    return radii * np.exp(1j * angles)


def sample_omega1(
    lam: RationalLike,
    n: int,
    seed: int,
    method: str = "rejection",
    step: float = 0.15,
    burn_in: int = 10_000,
    thinning: int = 10,
    min_ess: float = 100.0,
) -> SampleBatch:
    """Samples of the lifted domain under the density P1**beta.

    method='rejection' draws uniform polydisc proposals and accepts into
    the membership set (exact at beta = 0, i.e. lambda = 11/2; beta > 0 is
    handled by an extra P1**beta acceptance using the envelope P1 <= 1;
    beta < 0 has no bounded envelope and requires MCMC).

    method='mcmc' runs a symmetric Gaussian random walk with Metropolis
    correction, burn-in and thinning; the batch records an effective sample
    size from batch means and refuses runs with ESS below min_ess.
    """
    lam = Fraction(lam)
    if lam <= Fraction(5, 2):
        raise ValueError(
            f"lifted-domain sampling requires lambda > 5/2 (density exponent > -1); got {lam}"
        )
    if n < 1:
        raise ValueError("need at least one sample")
    beta = _beta_of_lambda(lam)
    if method == "rejection":
        return _omega1_rejection(lam, beta, n, seed)
    if method == "mcmc":
        return _omega1_mcmc(lam, beta, n, seed, step, burn_in, thinning, min_ess)
    raise ValueError(f"unknown method {method!r}")


def _omega1_rejection(lam: Fraction, beta: Fraction, n: int, seed: int) -> SampleBatch:
    if beta < 0:
        raise SamplingError(
            f"rejection sampling needs beta >= 0 (lambda >= 11/2); got beta = {beta}. "
            "Use method='mcmc'."
        )
    rng = np.random.default_rng(seed)
    chunks: list[np.ndarray] = []
    proposed = 0
    accepted = 0
    beta_f = float(beta)
    while accepted < n:
        m = max(200_000, 4 * (n - accepted))
        pts = _propose_polydisc(rng, m)
        mask = omega1_membership(pts)
        if beta_f > 0.0:
            p1, _ = omega1_boundary_values(pts)
            density = np.where(mask, np.maximum(p1, 0.0) ** beta_f, 0.0)
            # Envelope: P1 <= 1 on the domain (P1(0) = 1 is the maximum).
            if np.any(density > 1.0 + 1e-12):
                raise SamplingError("envelope P1 <= 1 violated; rejection invalid")
            mask = mask & (rng.uniform(size=m) < density)
        kept = pts[mask]
        chunks.append(kept)
        proposed += m
        accepted += len(kept)
    points = np.concatenate(chunks)[:n]
    stats = {"proposed": proposed, "acceptance_rate": accepted / proposed}
    return SampleBatch(
        "omega1", seed, {"lambda": lam, "beta": beta, "n": n, "method": "rejection"},
        points, stats,
    )


def _omega1_mcmc(
    lam: Fraction,
    beta: Fraction,
    n: int,
    seed: int,
    step: float,
    burn_in: int,
    thinning: int,
    min_ess: float,
) -> SampleBatch:
    rng = np.random.default_rng(seed)
    beta_f = float(beta)

    def log_density(point: np.ndarray) -> float:
        if not bool(omega1_membership(point[np.newaxis, :])[0]):
            return -math.inf
        p1, _ = omega1_boundary_values(point[np.newaxis, :])
        return beta_f * math.log(p1[0])

    current = np.zeros(3, dtype=complex)
    current_logp = log_density(current)
    total_steps = burn_in + n * thinning
    kept = np.empty((n, 3), dtype=complex)
    accepted_moves = 0
    kept_count = 0
    for it in range(total_steps):
        jump = rng.normal(scale=step, size=6)
        proposal = current + jump[:3] + 1j * jump[3:]
        logp = log_density(proposal)
        if logp > -math.inf and math.log(rng.uniform()) < logp - current_logp:
            current = proposal
            current_logp = logp
            accepted_moves += 1
        if it >= burn_in and (it - burn_in) % thinning == 0 and kept_count < n:
            kept[kept_count] = current
            kept_count += 1
    s1 = (kept * kept.conjugate()).real.sum(axis=1)
    ess = _batch_means_ess(s1)
    stats = {
        "move_acceptance": accepted_moves / total_steps,
        "ess": ess,
        "burn_in": burn_in,
        "thinning": thinning,
        "step": step,
    }
    if ess < min_ess:
        raise SamplingError(f"MCMC effective sample size {ess:.1f} < {min_ess}")
    return SampleBatch(
        "omega1", seed, {"lambda": lam, "beta": beta, "n": n, "method": "mcmc"},
        kept, stats, correlated=True,
    )


def _batch_means_ess(values: np.ndarray, n_batches: int = 32) -> float:
    values = np.asarray(values, dtype=float)
    m = len(values) // n_batches
    if m < 2:
        return float(len(values))
    trimmed = values[: m * n_batches].reshape(n_batches, m)
    batch_means = trimmed.mean(axis=1)
    var_bm = batch_means.var(ddof=1) / n_batches
    var_iid = values.var(ddof=1)
    if var_bm <= 0:
        return float(len(values))
    return float(var_iid / var_bm)


# ---------------------------------------------------------------------------
# Moments
# ---------------------------------------------------------------------------


def _standard_error(values: np.ndarray, correlated: bool) -> float:
    n = len(values)
    if n < 2:
        return 0.0
    if not correlated:
        return float(values.std(ddof=1) / math.sqrt(n))
    n_batches = min(32, max(2, n // 4))
    m = n // n_batches
    trimmed = values[: m * n_batches].reshape(n_batches, m)
    return float(trimmed.mean(axis=1).std(ddof=1) / math.sqrt(n_batches))


def estimate_moments(
    batch: SampleBatch,
    functions: Mapping[str, Callable[[np.ndarray], np.ndarray]],
) -> dict[str, MomentEstimate]:
    """Sample means with standard errors (batch means for MCMC batches)."""
    if len(batch) == 0:
        raise ValueError("empty batch")
    out: dict[str, MomentEstimate] = {}
    for name, func in functions.items():
        values = np.asarray(func(batch.points), dtype=float)
        out[name] = MomentEstimate(
            float(values.mean()), _standard_error(values, batch.correlated), len(values)
        )
    return out


def pushforward_deltoid(batch: SampleBatch) -> np.ndarray:
    """Map a batch into the deltoid domain: the complex Z value per sample."""
    if batch.kind == "torus":
        t1, t2 = batch.points[:, 0], batch.points[:, 1]
        return (np.exp(1j * t1) + np.exp(1j * t2) + np.exp(-1j * (t1 + t2))) / 3.0
    if batch.kind == "su3":
        return np.trace(batch.points, axis1=-2, axis2=-1) / 3.0
    if batch.kind == "omega1":
        return batch.points.mean(axis=1)
    raise ValueError(f"unknown batch kind {batch.kind!r}")


def spawn_seeds(seed: int, count: int) -> list[int]:
    """Derived per-worker seeds; deterministic in (seed, count)."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]
