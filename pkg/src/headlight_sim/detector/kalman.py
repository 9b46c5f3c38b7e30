"""Constant-velocity Kalman filter over [px, py, pz, vx, vy, vz]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DetectorConfig

_I3 = np.eye(3)


@dataclass(frozen=True, eq=False)
class KalmanState:
    state_vector: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        x = np.array(self.state_vector, dtype=float).reshape(6)
        p = np.array(self.covariance, dtype=float).reshape(6, 6)
        x.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "state_vector", x)
        object.__setattr__(self, "covariance", p)

    @property
    def position(self) -> np.ndarray:
        return self.state_vector[:3]

    @property
    def velocity(self) -> np.ndarray:
        return self.state_vector[3:]


def initial_state(position, velocity, cfg: DetectorConfig, velocity_var: float | None = None) -> KalmanState:
    if velocity_var is None:
        velocity_var = cfg.velocity_measurement_noise
    cov = np.diag([cfg.measurement_noise] * 3 + [velocity_var] * 3)
    return KalmanState(np.concatenate([np.asarray(position, float), np.asarray(velocity, float)]), cov)


def transition(dt: float) -> np.ndarray:
    f = np.eye(6)
    f[:3, 3:] = dt * _I3
    return f


def process_covariance(dt: float, q: float) -> np.ndarray:
    """Piecewise-constant white acceleration noise with variance ``q``."""
    g = np.vstack([0.5 * dt * dt * _I3, dt * _I3])
    return q * (g @ g.T)


def kalman_predict(state: KalmanState, dt: float, cfg: DetectorConfig) -> KalmanState:
    if not dt > 0:
        raise ValueError(f"prediction step must be positive, got dt={dt}")
    f = transition(dt)
    p = f @ state.covariance @ f.T + process_covariance(dt, cfg.process_noise)
    return KalmanState(f @ state.state_vector, 0.5 * (p + p.T))


def kalman_update(state: KalmanState, measured_position, measured_velocity, cfg: DetectorConfig) -> KalmanState:
    """Fuse a direct measurement of both position and velocity (H = I)."""
    z = np.concatenate([np.asarray(measured_position, float).reshape(3),
                        np.asarray(measured_velocity, float).reshape(3)])
    if not np.all(np.isfinite(z)):
        raise ValueError("measurement contains non-finite values")
    r = np.diag([cfg.measurement_noise] * 3 + [cfg.velocity_measurement_noise] * 3)
    p = state.covariance
    s = p + r
    gain = np.linalg.solve(s.T, p.T).T  # P S^-1 without forming the inverse
    x = state.state_vector + gain @ (z - state.state_vector)
    # Joseph form keeps the covariance symmetric PSD under rounding
    a = np.eye(6) - gain
    p_post = a @ p @ a.T + gain @ r @ gain.T
    return KalmanState(x, 0.5 * (p_post + p_post.T))
