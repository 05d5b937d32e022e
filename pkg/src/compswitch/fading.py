"""Rayleigh small-scale channels and per-user global channel vectors."""

import numpy as np

from .geometry import LinkGains


def draw_small_scale(rng: np.random.Generator, num_antennas: int) -> np.ndarray:
    """One i.i.d. CN(0, 1) channel vector, one entry per BS antenna.

    Real and imaginary parts are independent N(0, 1/2), so each complex
    entry has unit variance.
    """
    if num_antennas < 1:
        raise ValueError("num_antennas must be >= 1")
    re = rng.standard_normal(num_antennas)
    im = rng.standard_normal(num_antennas)
    return (re + 1j * im) / np.sqrt(2.0)


def draw_small_scale_block(rng: np.random.Generator, num_bs: int,
                           num_antennas: int, num_users: int = 1) -> np.ndarray:
    """Batch draw: (num_users, num_bs, num_antennas) i.i.d. CN(0, 1) entries."""
    shape = (num_users, num_bs, num_antennas)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def assemble_global(gains: LinkGains, smalls: np.ndarray) -> np.ndarray:
    """Stack per-BS channels scaled by the large-scale amplitudes.

    smalls is (B, N_t); block i of the result equals alpha_i * g_i with
    alpha_i = sqrt(alpha_sq[i]).
    """
    smalls = np.asarray(smalls)
    if smalls.ndim != 2 or smalls.shape[0] != len(gains.alpha_sq):
        raise ValueError(
            f"expected one small-scale vector per BS ({len(gains.alpha_sq)}), "
            f"got array of shape {smalls.shape}")
    amp = np.sqrt(gains.alpha_sq)
    return (amp[:, None] * smalls).reshape(-1)
