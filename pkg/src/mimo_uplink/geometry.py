"""Placement of access points and user terminals in a circular service area."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "Placement",
    "place_uniform_disk",
    "place_colocated",
    "link_distance",
    "link_distances",
]


@dataclass(frozen=True)
class Placement:
    """Positions of M service antennas and K users inside a disk.

    Positions are 2-D, in meters, relative to the disk center. Heights are
    carried separately so that link distances are 3-D slant distances.
    """

    ap_positions: np.ndarray  # (M, 2)
    user_positions: np.ndarray  # (K, 2)
    ap_height: float
    user_height: float
    radius: float
    colocated: bool = False

    def __post_init__(self):
        if self.ap_height <= self.user_height:
            raise ConfigurationError(
                f"ap_height ({self.ap_height}) must exceed user_height "
                f"({self.user_height})")

    @property
    def M(self) -> int:
        return self.ap_positions.shape[0]

    @property
    def K(self) -> int:
        return self.user_positions.shape[0]


def place_uniform_disk(count: int, radius: float,
                       rng: np.random.Generator) -> np.ndarray:
    """Draw `count` points i.i.d. uniform over a disk of the given radius.

    Uses radius ``R*sqrt(u)`` and angle ``2*pi*v`` so the density is
    uniform in area rather than in radius.

    Parameters
    ----------
    count : int
        Number of points, at least 1.
    radius : float
        Disk radius in meters. A zero radius is accepted and yields points
        at the origin.
    rng : numpy.random.Generator
        Source of randomness; the result is deterministic given its state.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(count, 2)``.
    """
    if int(count) != count or count < 1:
        raise ConfigurationError(f"count must be a positive integer, got {count}")
    if not radius >= 0:
        raise ConfigurationError(f"radius must be non-negative, got {radius}")
    u = rng.random(count)
    v = rng.random(count)
    r = radius * np.sqrt(u)
    theta = 2.0 * np.pi * v
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def place_colocated(M: int, radius: float = 0.0) -> np.ndarray:
    """All M antennas of a cellular base station sit at the disk center."""
    if int(M) != M or M < 1:
        raise ConfigurationError(f"M must be a positive integer, got {M}")
    return np.zeros((int(M), 2))


def link_distance(ap, ap_height: float, user, user_height: float) -> float:
    """3-D distance between one antenna and one user terminal."""
    if ap_height < 0 or user_height < 0:
        raise ConfigurationError("heights must be non-negative")
    dx, dy = np.subtract(ap, user)
    return float(np.sqrt(dx * dx + dy * dy + (ap_height - user_height) ** 2))


def link_distances(placement: Placement) -> np.ndarray:
    """M x K matrix of 3-D antenna-to-user distances in meters."""
    ap = placement.ap_positions
    ue = placement.user_positions
    dh2 = (placement.ap_height - placement.user_height) ** 2
    # explicit per-axis outer differences keep peak memory at M*K for huge M
    dx = np.subtract.outer(ap[:, 0], ue[:, 0])
    d2 = dx * dx
    dy = np.subtract.outer(ap[:, 1], ue[:, 1])
    d2 += dy * dy
    d2 += dh2
    return np.sqrt(d2, out=d2)
