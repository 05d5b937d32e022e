"""Cluster layout, user drops and large-scale link gains.

The cooperative cluster is made of B hexagonal cells of circumradius R that
share one corner (the cluster center, placed at the origin).  Each base
station sits at its hexagon center, so for B=3 the BSs are R away from the
origin, 120 degrees apart, and sqrt(3)*R away from each other.
"""

from dataclasses import dataclass

import numpy as np

SQRT3 = np.sqrt(3.0)


class ConfigurationError(ValueError):
    """Raised for unsupported cluster configurations."""


@dataclass(frozen=True)
class NetworkGeometry:
    num_bs: int
    bs_positions: np.ndarray        # (B, 2) meters
    cell_radius: float              # hexagon circumradius, meters
    pathloss_exponent: float
    reference_gain: float           # linear power gain at distance cell_radius
    shadowing_std_db: float = 0.0   # log-normal shadowing, 0 disables

    def vertex_direction(self, cell: int) -> np.ndarray:
        """Unit vector from the cell's BS toward one hexagon vertex.

        For B>1 the reference vertex is the shared cluster corner at the
        origin; the single-cell layout uses +x by convention.
        """
        p = self.bs_positions[cell]
        n = np.linalg.norm(p)
        if n == 0.0:
            return np.array([1.0, 0.0])
        return -p / n


@dataclass(frozen=True)
class UserDrop:
    positions: np.ndarray   # (N, 2) meters
    serving_bs: np.ndarray  # (N,) cell indices


@dataclass(frozen=True)
class LinkGains:
    """Linear power gains from every BS to one user."""
    alpha_sq: np.ndarray  # (B,)
    serving: int          # index of the serving (closest) BS


def build_cluster(num_bs: int, cell_radius: float, pathloss_exponent: float = 3.76,
                  reference_gain: float = 1.0, shadowing_std_db: float = 0.0) -> NetworkGeometry:
    """Build the B-cell cluster layout.

    Supports B=1 (single BS at the origin, degenerate check case) and B=3
    (three hexagons around a common corner).
    """
    if cell_radius <= 0:
        raise ConfigurationError(f"cell_radius must be positive, got {cell_radius}")
    if num_bs == 1:
        pos = np.zeros((1, 2))
    elif num_bs == 3:
        angles = np.deg2rad([90.0, 210.0, 330.0])
        pos = cell_radius * np.c_[np.cos(angles), np.sin(angles)]
    else:
        raise ConfigurationError(f"unsupported number of base stations: {num_bs}")
    return NetworkGeometry(num_bs=num_bs, bs_positions=pos, cell_radius=cell_radius,
                           pathloss_exponent=pathloss_exponent,
                           reference_gain=reference_gain,
                           shadowing_std_db=shadowing_std_db)


def _hex_frame(geom: NetworkGeometry, cell: int, points: np.ndarray) -> np.ndarray:
    """Map world coordinates into the cell's hexagon frame (vertex on +x)."""
    u = geom.vertex_direction(cell)
    v = points - geom.bs_positions[cell]
    x = v[..., 0] * u[0] + v[..., 1] * u[1]
    y = -v[..., 0] * u[1] + v[..., 1] * u[0]
    return np.stack([x, y], axis=-1)


def in_cell(geom: NetworkGeometry, cell: int, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Point-in-hexagon test for the given cell (boundary counts as inside)."""
    pts = np.atleast_2d(points)
    f = _hex_frame(geom, cell, pts)
    x, y = f[..., 0], f[..., 1]
    r = geom.cell_radius
    inside = (np.abs(y) <= SQRT3 / 2 * r + tol) \
        & (np.abs(SQRT3 * x + y) <= SQRT3 * r + tol) \
        & (np.abs(SQRT3 * x - y) <= SQRT3 * r + tol)
    return inside if points.ndim > 1 else bool(inside[0])


def drop_users(geom: NetworkGeometry, users_per_cell: int, min_dist: float,
               rng: np.random.Generator) -> UserDrop:
    """Drop users uniformly over each hexagonal cell by rejection sampling.

    Positions closer than min_dist to the serving BS are rejected to keep
    the path-loss law finite.
    """
    if users_per_cell < 1:
        raise ValueError("users_per_cell must be >= 1")
    if not 0 <= min_dist < geom.cell_radius:
        raise ValueError("min_dist must lie in [0, cell_radius)")
    r = geom.cell_radius
    positions = []
    serving = []
    for cell in range(geom.num_bs):
        u = geom.vertex_direction(cell)
        rot = np.array([[u[0], -u[1]], [u[1], u[0]]])
        got = 0
        while got < users_per_cell:
            cand = rng.uniform(-r, r, size=(4 * users_per_cell, 2))
            d = np.linalg.norm(cand, axis=1)
            x, y = cand[:, 0], cand[:, 1]
            ok = (d >= min_dist) \
                & (np.abs(y) <= SQRT3 / 2 * r) \
                & (np.abs(SQRT3 * x + y) <= SQRT3 * r) \
                & (np.abs(SQRT3 * x - y) <= SQRT3 * r)
            for p in cand[ok]:
                if got == users_per_cell:
                    break
                positions.append(geom.bs_positions[cell] + rot @ p)
                serving.append(cell)
                got += 1
    return UserDrop(positions=np.asarray(positions), serving_bs=np.asarray(serving, dtype=int))


def link_gains(geom: NetworkGeometry, pos: np.ndarray,
               rng: np.random.Generator | None = None) -> LinkGains:
    """Large-scale power gains alpha^2 = a0^2 (R/d)^tau from every BS.

    Optional log-normal shadowing multiplies each gain when the geometry
    carries a nonzero shadowing_std_db (requires rng).
    """
    d = np.linalg.norm(geom.bs_positions - np.asarray(pos), axis=1)
    if np.any(d == 0.0):
        raise ValueError("user position coincides with a BS position")
    alpha_sq = geom.reference_gain * (geom.cell_radius / d) ** geom.pathloss_exponent
    if geom.shadowing_std_db > 0.0:
        if rng is None:
            raise ValueError("shadowing enabled but no rng supplied")
        shadow_db = rng.normal(0.0, geom.shadowing_std_db, size=d.shape)
        alpha_sq = alpha_sq * 10.0 ** (shadow_db / 10.0)
    return LinkGains(alpha_sq=alpha_sq, serving=int(np.argmin(d)))


def noise_power(tx_power: float, reference_gain: float, snr_edge_db: float) -> float:
    """Noise power calibrated to the cell-edge SNR.

    Inter-cluster interference is folded into this value; no separate term
    appears anywhere else.
    """
    if tx_power <= 0:
        raise ValueError("tx_power must be positive")
    return tx_power * reference_gain / 10.0 ** (snr_edge_db / 10.0)
