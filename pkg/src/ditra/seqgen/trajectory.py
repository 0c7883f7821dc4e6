# seqgen/trajectory.py
import logging
import math
from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.interpolate import CubicHermiteSpline

from ditra.errors import DomainError

SAMPLES_PER_SEGMENT = 200
MAX_ATTEMPTS = 100
MAX_SPEED_RATIO = 1.005


class Trajectory(BaseModel):
    """Per-frame object centre positions, (frame_count, 2) in pixels."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    positions: np.ndarray

    @model_validator(mode="after")
    def _check_positions(self) -> "Trajectory":
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise ValueError(f"positions must be (N, 2), got {self.positions.shape}")
        if not np.isfinite(self.positions).all():
            raise ValueError("positions must be finite")
        return self

    @property
    def frame_count(self) -> int:
        return int(self.positions.shape[0])

    def steps(self) -> np.ndarray:
        """Distance travelled between consecutive frames."""
        return np.linalg.norm(np.diff(self.positions, axis=0), axis=1)

    def directions(self) -> np.ndarray:
        """Unit motion direction per frame (central differences, one-sided at the ends)."""
        grad = np.gradient(self.positions, axis=0) if self.frame_count > 1 else np.zeros_like(self.positions)
        norms = np.linalg.norm(grad, axis=1, keepdims=True)
        out = np.zeros_like(grad)
        out[:, 0] = 1.0
        moving = norms[:, 0] > 1e-12
        out[moving] = grad[moving] / norms[moving]
        return out


def catmull_rom_tangents(control: np.ndarray) -> np.ndarray:
    """Central-difference tangents, one-sided at the two end points."""
    tangents = np.empty_like(control)
    tangents[1:-1] = 0.5 * (control[2:] - control[:-2])
    tangents[0] = control[1] - control[0]
    tangents[-1] = control[-1] - control[-2]
    return tangents


def dense_curve(control: np.ndarray, samples_per_segment: int = SAMPLES_PER_SEGMENT) -> np.ndarray:
    """Sample the Catmull-Rom Hermite spline through `control` densely."""
    knots = np.arange(len(control), dtype=np.float64)
    spline = CubicHermiteSpline(knots, control, catmull_rom_tangents(control), axis=0)
    t = np.linspace(0.0, knots[-1], samples_per_segment * (len(control) - 1) + 1)
    return spline(t)


def _circle_exit(px, py, ax, ay, bx, by, u_min, radius):
    """Largest u in [u_min, 1] where a + u (b - a) is at `radius` from p, or -1."""
    vx, vy = bx - ax, by - ay
    wx, wy = ax - px, ay - py
    qa = vx * vx + vy * vy
    if qa == 0.0:
        return -1.0
    qb = 2.0 * (vx * wx + vy * wy)
    qc = wx * wx + wy * wy - radius * radius
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return -1.0
    u = (-qb + math.sqrt(disc)) / (2.0 * qa)
    return u if u_min <= u <= 1.0 else -1.0


def _march(poly: List[Tuple[float, float]], lengths: List[float], step: float, count: int):
    """
    Walk `count - 1` chords of length `step` along the polyline. Returns the
    points and the arc length left after the last one, or None when the walk
    runs off the end.
    """
    px, py = poly[0]
    points = [(px, py)]
    seg, u = 0, 0.0
    last = len(poly) - 1
    for _ in range(count - 1):
        while seg < last:
            (ax, ay), (bx, by) = poly[seg], poly[seg + 1]
            hit = _circle_exit(px, py, ax, ay, bx, by, u, step)
            if hit >= 0.0:
                u = hit
                px, py = ax + u * (bx - ax), ay + u * (by - ay)
                break
            seg, u = seg + 1, 0.0
        else:
            return points, None
        points.append((px, py))
    left = (1.0 - u) * lengths[seg] + sum(lengths[seg + 1 :]) if seg < last else 0.0
    return points, left


def constant_speed_positions(poly: np.ndarray, frame_count: int) -> np.ndarray:
    """
    Place `frame_count` points on the polyline, first and last on its ends,
    with equal straight-line distances between consecutive points.
    """
    if frame_count == 2:
        return np.stack([poly[0], poly[-1]])

    lengths = np.linalg.norm(np.diff(poly, axis=0), axis=1).tolist()
    vertices = [(float(x), float(y)) for x, y in poly]

    # chords never exceed the arc they span, so the root lies in (0, arc / (n - 1)]
    lo, hi = 0.0, sum(lengths) / (frame_count - 1)
    points = None
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        candidate, left = _march(vertices, lengths, mid, frame_count)
        if left is None or left <= 0.0:
            hi = mid
        else:
            lo, points = mid, candidate
    if points is None:
        points, _ = _march(vertices, lengths, 0.5 * hi, frame_count)
    out = np.asarray(points, dtype=np.float64)
    out[-1] = poly[-1]
    return out


def hermite_trajectory(
    rng: np.random.Generator,
    frame_count: int,
    bounds: Sequence[float],
) -> Trajectory:
    """
    Constant-speed path along a Catmull-Rom Hermite spline through four control
    points drawn uniformly inside `bounds` = (x_min, y_min, x_max, y_max).
    Control sets whose curve leaves the bounds are redrawn.
    """
    if frame_count < 2:
        error_msg = f"A trajectory needs at least 2 frames, got {frame_count}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    x_min, y_min, x_max, y_max = (float(v) for v in bounds)
    if not (x_max - x_min >= 1.0 and y_max - y_min >= 1.0):
        error_msg = f"Bounds too small for four distinct control points: {tuple(bounds)}"
        logging.error(error_msg)
        raise DomainError(error_msg)

    low = np.array([x_min, y_min])
    high = np.array([x_max, y_max])
    for attempt in range(MAX_ATTEMPTS):
        control = rng.uniform(low, high, size=(4, 2))
        if np.min(np.linalg.norm(np.diff(control, axis=0), axis=1)) < 1.0:
            continue
        curve = dense_curve(control)
        if np.any(curve < low) or np.any(curve > high):
            continue

        positions = constant_speed_positions(curve, frame_count)
        steps = np.linalg.norm(np.diff(positions, axis=0), axis=1)
        # a chord that jumps across a self-intersection breaks the equal spacing
        if steps.min() <= 0.0 or steps.max() / steps.min() > MAX_SPEED_RATIO:
            continue

        # debug
        logging.debug(f"Trajectory accepted after {attempt + 1} draw(s)")
        return Trajectory(positions=positions)

    error_msg = f"No in-bounds trajectory after {MAX_ATTEMPTS} draws for bounds {tuple(bounds)}"
    logging.error(error_msg)
    raise DomainError(error_msg)


def trajectory_through(control: np.ndarray, frame_count: int) -> Trajectory:
    """Constant-speed trajectory through fixed control points."""
    control = np.asarray(control, dtype=np.float64)
    return Trajectory(positions=constant_speed_positions(dense_curve(control), frame_count))
