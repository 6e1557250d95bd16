"""Unit vectors, Euler angles, and classical rotation matrices.

All rotations are active z-y-z: R(psi, theta, phi) = R_z(psi) R_y(theta) R_z(phi),
matching the quantum convention U = exp(-i J_z psi) exp(-i J_y theta) exp(-i J_z phi)
used everywhere else in this package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EulerAngles:
    """Active z-y-z rotation parameters, canonicalized to theta in [0, pi]."""

    psi: float
    theta: float
    phi: float

    def __post_init__(self):
        if not -1e-9 <= self.theta <= math.pi + 1e-9:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        object.__setattr__(self, "theta", min(max(float(self.theta), 0.0), math.pi))
        object.__setattr__(self, "psi", float(self.psi) % TWO_PI)
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)

    def as_tuple(self):
        return (self.psi, self.theta, self.phi)


@dataclass(frozen=True)
class UnitVector:
    """Direction in 3-space, validated to unit norm."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm2 = self.x * self.x + self.y * self.y + self.z * self.z
        if abs(norm2 - 1.0) > 1e-9:
            raise ValueError(f"not a unit vector: |v|^2 = {norm2!r}")

    @classmethod
    def normalized(cls, x, y, z):
        r = math.sqrt(x * x + y * y + z * z)
        if r < 1e-12:
            raise ValueError("cannot normalize a null vector")
        return cls(x / r, y / r, z / r)

    @classmethod
    def from_array(cls, arr) -> "UnitVector":
        x, y, z = (float(c) for c in arr)
        return cls(x, y, z)

    @classmethod
    def from_spherical(cls, theta, phi) -> "UnitVector":
        st = math.sin(theta)
        return cls(st * math.cos(phi), st * math.sin(phi), math.cos(theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def dot(self, other) -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def angle_to(self, other) -> float:
        cross = np.cross(self.as_array(), other.as_array())
        return math.atan2(float(np.linalg.norm(cross)), self.dot(other))

    def spherical(self):
        """Polar and azimuthal angles (theta, phi), phi in [0, 2pi); phi = 0 at the poles."""
        theta = math.acos(min(max(self.z, -1.0), 1.0))
        if math.hypot(self.x, self.y) < 1e-15:
            return theta, 0.0
        phi = math.atan2(self.y, self.x) % TWO_PI
        return theta, phi

    def __neg__(self):
        return UnitVector(-self.x, -self.y, -self.z)


X_AXIS = UnitVector(1.0, 0.0, 0.0)
Y_AXIS = UnitVector(0.0, 1.0, 0.0)
Z_AXIS = UnitVector(0.0, 0.0, 1.0)


def rotation_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def euler_matrix(angles: EulerAngles) -> np.ndarray:
    """Classical rotation matrix for active z-y-z Euler angles."""
    return rotation_z(angles.psi) @ rotation_y(angles.theta) @ rotation_z(angles.phi)


def matrix_to_euler(rot: np.ndarray) -> EulerAngles:
    """Euler angles of a proper rotation matrix; gimbal cases fold into psi."""
    r = np.asarray(rot)
    ctheta = min(max(float(r[2, 2]), -1.0), 1.0)
    theta = math.acos(ctheta)
    if math.sin(theta) > 1e-9:
        psi = math.atan2(r[1, 2], r[0, 2])
        phi = math.atan2(r[2, 1], -r[2, 0])
    elif ctheta > 0.0:
        # R = R_z(psi + phi)
        psi = math.atan2(r[1, 0], r[0, 0])
        phi = 0.0
    else:
        # R = R_z(psi - phi) R_y(pi) = [[-cos, -sin, 0], [-sin, cos, 0], [0, 0, -1]]
        psi = math.atan2(-r[1, 0], -r[0, 0])
        phi = 0.0
    return EulerAngles(psi, theta, phi)


def axis_angle_matrix(axis: UnitVector, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    k = axis.as_array()
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)


def rotation_between(a: UnitVector, b: UnitVector) -> np.ndarray:
    """Minimal rotation carrying direction a onto direction b."""
    cross = np.cross(a.as_array(), b.as_array())
    s = float(np.linalg.norm(cross))
    d = a.dot(b)
    if s < 1e-12:
        if d > 0.0:
            return np.eye(3)
        return axis_angle_matrix(perpendicular_unit(a), math.pi)
    axis = UnitVector.from_array(cross / s)
    return axis_angle_matrix(axis, math.atan2(s, d))


def perpendicular_unit(v: UnitVector) -> UnitVector:
    """Deterministic unit vector orthogonal to v: v x z, or v x x near the poles."""
    c = np.cross(v.as_array(), Z_AXIS.as_array())
    if np.linalg.norm(c) < 1e-9:
        c = np.cross(v.as_array(), X_AXIS.as_array())
    return UnitVector.from_array(c / np.linalg.norm(c))
