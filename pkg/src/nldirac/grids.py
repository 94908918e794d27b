"""Evaluation grids: log-spaced radii, pole-clipped polar angles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import GridPoint


@dataclass(frozen=True)
class GridConfig:
    """Rectangular (r, theta) grid; radii are log-spaced.

    r_min and r_max are in units of 1/m (Compton lengths); theta spans
    [theta_margin, pi - theta_margin] uniformly.
    """

    r_min: float = 0.05
    r_max: float = 20.0
    n_r: int = 25
    n_theta: int = 20
    theta_margin: float = 1e-3

    def __post_init__(self):
        if not (self.r_min > 0 and self.r_max > self.r_min):
            raise ValueError("need 0 < r_min < r_max")
        if self.n_r < 2 or self.n_theta < 2:
            raise ValueError("need at least 2 points per axis")
        if not (0 < self.theta_margin < np.pi / 2):
            raise ValueError("theta_margin must lie in (0, pi/2)")


def radii(cfg: GridConfig, m=1.0):
    return np.geomspace(cfg.r_min / m, cfg.r_max / m, cfg.n_r)


def thetas(cfg: GridConfig):
    return np.linspace(cfg.theta_margin, np.pi - cfg.theta_margin, cfg.n_theta)


def points(cfg: GridConfig, m=1.0):
    """Row-major (r-major) list of GridPoint."""
    out = []
    for r in radii(cfg, m):
        for th in thetas(cfg):
            out.append(GridPoint(float(r), float(th)))
    return out


def sample_points(rng, n, m=1.0, r_range=(0.1, 10.0), theta_range=(0.3, np.pi - 0.3),
                  reject=None, max_tries=10000):
    """Random evaluation points: log-uniform radii, uniform angles.

    ``reject(pt)`` may exclude e.g. masked points; radii are in units of 1/m.
    """
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("rejection sampling did not terminate")
        r = float(np.exp(rng.uniform(np.log(r_range[0]), np.log(r_range[1]))) / m)
        th = float(rng.uniform(*theta_range))
        pt = GridPoint(r, th)
        if reject is not None and reject(pt):
            continue
        out.append(pt)
    return out
