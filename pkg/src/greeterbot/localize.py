"""Monte Carlo localization on a known occupancy grid.

Odometry motion model with sampled noise, likelihood-field measurement model
over converted laser scans, low-variance resampling triggered by effective
sample size, and a weighted circular-mean pose estimate. A fixed particle
count stands in for adaptive sampling; at desk scale the adaptation adds no
observable behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from greeterbot.core import LaserScan, OccupancyGrid, Pose2D, invert, normalize_angle


class OdomDelta(NamedTuple):
    """Odometry step decomposed as rotate, translate, rotate."""

    trans: float
    rot1: float
    rot2: float


@dataclass(frozen=True)
class MotionNoise:
    """Odometry noise coefficients (variances contributed per unit motion):
    a1 rotation-from-rotation, a2 rotation-from-translation,
    a3 translation-from-translation, a4 translation-from-rotation."""

    a1: float = 0.01
    a2: float = 0.01
    a3: float = 0.02
    a4: float = 0.01

    def __post_init__(self):
        if min(self.a1, self.a2, self.a3, self.a4) < 0:
            raise ValueError("noise coefficients must be >= 0")

    def sigmas(self, d: OdomDelta) -> tuple[float, float, float]:
        """Standard deviations for (rot1, trans, rot2) noise on a step."""
        var_rot1 = self.a1 * d.rot1 ** 2 + self.a2 * d.trans ** 2
        var_trans = self.a3 * d.trans ** 2 + self.a4 * (d.rot1 ** 2 + d.rot2 ** 2)
        var_rot2 = self.a1 * d.rot2 ** 2 + self.a2 * d.trans ** 2
        return math.sqrt(var_rot1), math.sqrt(var_trans), math.sqrt(var_rot2)


ZERO_NOISE = MotionNoise(0.0, 0.0, 0.0, 0.0)


def odom_delta_between(prev: Pose2D, cur: Pose2D) -> OdomDelta:
    dx, dy = cur.x - prev.x, cur.y - prev.y
    trans = math.hypot(dx, dy)
    rot1 = 0.0 if trans < 1e-12 else normalize_angle(math.atan2(dy, dx) - prev.theta)
    rot2 = normalize_angle(cur.theta - prev.theta - rot1)
    return OdomDelta(trans, rot1, rot2)


def apply_odom_delta(pose: Pose2D, d: OdomDelta) -> Pose2D:
    heading = pose.theta + d.rot1
    return Pose2D(
        pose.x + d.trans * math.cos(heading),
        pose.y + d.trans * math.sin(heading),
        normalize_angle(pose.theta + d.rot1 + d.rot2),
    )


def sample_noisy_delta(d: OdomDelta, noise: MotionNoise, rng: np.random.Generator) -> OdomDelta:
    """One corrupted odometry reading; draw order is trans, rot1, rot2."""
    s1, st, s2 = noise.sigmas(d)
    return OdomDelta(
        d.trans + float(rng.normal(0.0, st)),
        d.rot1 + float(rng.normal(0.0, s1)),
        d.rot2 + float(rng.normal(0.0, s2)),
    )


# ---------------------------------------------------------------------------
# particle set

@dataclass(frozen=True)
class Particle:
    pose: Pose2D
    weight: float


@dataclass
class ParticleSet:
    """poses: (n, 3) array of x, y, theta; weights: (n,)."""

    poses: np.ndarray
    weights: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        self.poses = np.asarray(self.poses, dtype=np.float64).reshape(-1, 3)
        self.weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if len(self.poses) == 0:
            raise ValueError("particle set must be non-empty")
        if len(self.poses) != len(self.weights):
            raise ValueError("poses and weights disagree in length")
        if (self.weights < 0).any() or not np.isfinite(self.weights).all():
            raise ValueError("weights must be finite and >= 0")
        if self.normalized and abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("normalized set must have weights summing to 1")

    def __len__(self) -> int:
        return len(self.poses)

    def particles(self) -> list[Particle]:
        return [
            Particle(Pose2D(x, y, th), w)
            for (x, y, th), w in zip(self.poses, self.weights)
        ]

    def normalize(self) -> "ParticleSet":
        total = self.weights.sum()
        if total <= 0:
            w = np.full(len(self), 1.0 / len(self))
        else:
            w = self.weights / total
        return ParticleSet(self.poses, w, normalized=True)


def init_particles(pose: Pose2D, n: int, rng: np.random.Generator,
                   sigma_xy: float = 0.25, sigma_theta: float = 0.2) -> ParticleSet:
    """Gaussian cloud around a known starting pose."""
    poses = np.empty((n, 3))
    poses[:, 0] = rng.normal(pose.x, sigma_xy, n)
    poses[:, 1] = rng.normal(pose.y, sigma_xy, n)
    poses[:, 2] = rng.normal(pose.theta, sigma_theta, n)
    poses[:, 2] = np.arctan2(np.sin(poses[:, 2]), np.cos(poses[:, 2]))
    return ParticleSet(poses, np.full(n, 1.0 / n), normalized=True)


# ---------------------------------------------------------------------------
# likelihood field

@dataclass
class LikelihoodField:
    """Distance to the nearest occupied cell, per cell center, in meters."""

    distances: np.ndarray
    resolution: float
    origin: Pose2D
    sigma_hit: float = 0.2
    z_hit: float = 0.95
    z_rand: float = 0.05
    max_range: float = 8.0

    def __post_init__(self):
        if self.sigma_hit <= 0:
            raise ValueError("sigma_hit must be > 0")
        if self.z_hit + self.z_rand > 1.0 + 1e-12:
            raise ValueError("z_hit + z_rand must be <= 1")
        if (self.distances < 0).any():
            raise ValueError("distances must be >= 0")


def build_likelihood_field(grid: OccupancyGrid, sigma_hit: float = 0.2,
                           z_hit: float = 0.95, z_rand: float = 0.05,
                           max_range: float = 8.0) -> LikelihoodField:
    """Exact Euclidean distance transform between cell centers."""
    occupied = grid.occupied_mask()
    if not occupied.any():
        raise ValueError("map has no occupied cells; localization is undefined")
    cell_dist = ndimage.distance_transform_edt(~occupied)
    return LikelihoodField(cell_dist * grid.resolution, grid.resolution, grid.origin,
                           sigma_hit, z_hit, z_rand, max_range)


# ---------------------------------------------------------------------------
# filter steps

def motion_update(ps: ParticleSet, delta: OdomDelta, noise: MotionNoise,
                  rng: np.random.Generator) -> ParticleSet:
    """Move every particle by an independently sampled noisy odometry step.
    Weights are unchanged. Deterministic for a given generator state."""
    n = len(ps)
    s1, st, s2 = noise.sigmas(delta)
    rot1 = delta.rot1 + rng.normal(0.0, s1, n)
    trans = delta.trans + rng.normal(0.0, st, n)
    rot2 = delta.rot2 + rng.normal(0.0, s2, n)

    heading = ps.poses[:, 2] + rot1
    poses = np.empty_like(ps.poses)
    poses[:, 0] = ps.poses[:, 0] + trans * np.cos(heading)
    poses[:, 1] = ps.poses[:, 1] + trans * np.sin(heading)
    theta = ps.poses[:, 2] + rot1 + rot2
    poses[:, 2] = np.arctan2(np.sin(theta), np.cos(theta))
    return ParticleSet(poses, ps.weights.copy(), normalized=ps.normalized)


def beam_likelihoods(poses: np.ndarray, ranges: np.ndarray, bearings: np.ndarray,
                     field: LikelihoodField) -> np.ndarray:
    """(n_particles, n_beams) likelihood matrix for scan endpoints."""
    angles = poses[:, 2:3] + bearings[None, :]
    ex = poses[:, 0:1] + ranges[None, :] * np.cos(angles)
    ey = poses[:, 1:2] + ranges[None, :] * np.sin(angles)

    o = invert(field.origin)
    co, so = math.cos(o.theta), math.sin(o.theta)
    gx = o.x + ex * co - ey * so
    gy = o.y + ex * so + ey * co
    ix = np.floor(gx / field.resolution).astype(np.int64)
    iy = np.floor(gy / field.resolution).astype(np.int64)

    h, w = field.distances.shape
    inside = (ix >= 0) & (ix < w) & (iy >= 0) & (iy < h)
    d = np.zeros_like(ex)
    d[inside] = field.distances[iy[inside], ix[inside]]

    floor_term = field.z_rand / field.max_range
    lik = np.full(ex.shape, floor_term)
    lik[inside] += field.z_hit * np.exp(-d[inside] ** 2 / (2.0 * field.sigma_hit ** 2))
    return lik


def measurement_update(ps: ParticleSet, scan: LaserScan, field: LikelihoodField,
                       beam_stride: int = 2) -> ParticleSet:
    """Multiply weights by the likelihood of every stride-th finite beam, then
    normalize. An all-no-return scan carries no information and leaves the set
    unchanged."""
    if beam_stride < 1:
        raise ValueError("beam_stride must be >= 1")
    finite = np.isfinite(scan.ranges)
    idx = np.flatnonzero(finite)[::beam_stride]
    if idx.size == 0:
        return ps
    lik = beam_likelihoods(ps.poses, scan.ranges[idx], scan.bearings()[idx], field)
    weights = ps.weights * lik.prod(axis=1)
    return ParticleSet(ps.poses.copy(), weights).normalize()


def effective_sample_size(ps: ParticleSet) -> float:
    total = ps.weights.sum()
    if total <= 0:
        return 0.0
    w = ps.weights / total
    return 1.0 / float((w * w).sum())


def resample(ps: ParticleSet, rng: np.random.Generator) -> ParticleSet:
    """Low-variance (systematic) resampling from a single uniform draw;
    particle i is copied about n * w_i times."""
    if not ps.normalized:
        raise ValueError("resample requires a normalized particle set")
    n = len(ps)
    start = rng.uniform(0.0, 1.0 / n)
    positions = start + np.arange(n) / n
    cumulative = np.cumsum(ps.weights)
    cumulative[-1] = 1.0  # guard the last edge against float round-off
    chosen = np.searchsorted(cumulative, positions, side="right")
    return ParticleSet(ps.poses[chosen], np.full(n, 1.0 / n), normalized=True)


def estimate_pose(ps: ParticleSet) -> tuple[Pose2D, np.ndarray]:
    """Weighted mean pose (circular in heading) and 3x3 covariance with
    angular deviations wrapped."""
    if not ps.normalized:
        ps = ps.normalize()
    w = ps.weights
    mx = float(w @ ps.poses[:, 0])
    my = float(w @ ps.poses[:, 1])
    mth = math.atan2(float(w @ np.sin(ps.poses[:, 2])), float(w @ np.cos(ps.poses[:, 2])))

    dx = ps.poses[:, 0] - mx
    dy = ps.poses[:, 1] - my
    dth = np.arctan2(np.sin(ps.poses[:, 2] - mth), np.cos(ps.poses[:, 2] - mth))
    dev = np.column_stack([dx, dy, dth])
    cov = (w[:, None] * dev).T @ dev
    return Pose2D(mx, my, normalize_angle(mth)), cov


# ---------------------------------------------------------------------------
# the assembled filter

@dataclass(frozen=True)
class MclConfig:
    particles: int = 500
    noise: MotionNoise = field(default_factory=MotionNoise)
    sigma_hit: float = 0.2
    z_hit: float = 0.95
    z_rand: float = 0.05
    beam_stride: int = 2
    init_sigma_xy: float = 0.25
    init_sigma_theta: float = 0.2


class MclFilter:
    """Single-owner filter stepped with (odom_delta, scan) pairs."""

    def __init__(self, grid: OccupancyGrid, initial_pose: Pose2D, seed: int = 0,
                 config: MclConfig = MclConfig(), max_range: float | None = None):
        self.config = config
        self.rng = np.random.default_rng(seed)
        self.field = build_likelihood_field(
            grid, config.sigma_hit, config.z_hit, config.z_rand,
            max_range if max_range is not None else 8.0,
        )
        self.particles = init_particles(
            initial_pose, config.particles, self.rng,
            config.init_sigma_xy, config.init_sigma_theta,
        )

    def step(self, delta: OdomDelta, scan: LaserScan) -> tuple[Pose2D, np.ndarray]:
        ps = motion_update(self.particles, delta, self.config.noise, self.rng)
        ps = measurement_update(ps, scan, self.field, self.config.beam_stride)
        ps = ps.normalize()
        if effective_sample_size(ps) < len(ps) / 2.0:
            ps = resample(ps, self.rng)
        self.particles = ps
        return estimate_pose(ps)

    def estimate(self) -> tuple[Pose2D, np.ndarray]:
        return estimate_pose(self.particles)
