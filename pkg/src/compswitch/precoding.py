"""Zero-forcing precoding, per-user power allocation and SINR computation.

The same ZF machinery serves both transmission modes: joint precoding over
the stacked global channels (all BSs together) and per-cell precoding over
local channels with the other cells' interference entering the noise floor
through its expectation P * alpha^2.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import LinkGains

COND_LIMIT = 1e12  # columns with worse conditioning count as dependent


class NumericalRankError(np.linalg.LinAlgError):
    """Raised when a channel matrix is numerically rank deficient."""


@dataclass(frozen=True)
class UserSet:
    """Channel matrix of co-scheduled users, one column per user."""
    channels: np.ndarray      # (dim, n_users) complex
    user_of_interest: int = 0


@dataclass(frozen=True)
class PrecodeResult:
    precoders: np.ndarray       # (dim, n_users) complex, column k serves user k
    per_user_power: np.ndarray  # (n_users,) received useful power p_k
    sinr: np.ndarray            # (n_users,) linear SINR


def _check_rank(mat: np.ndarray, what: str) -> None:
    s = np.linalg.svd(mat, compute_uv=False)
    if s[-1] == 0.0 or s[0] / s[-1] > COND_LIMIT:
        raise NumericalRankError(f"{what} is numerically rank deficient")


def sin2_angle(h: np.ndarray, partners: np.ndarray) -> float:
    """Squared sine of the angle between h and the span of the partners.

    Computed as the squared norm of the projection residual over |h|^2.
    An empty partner set leaves the full channel, so the value is 1.
    """
    h = np.asarray(h)
    norm_sq = np.vdot(h, h).real
    if norm_sq == 0.0:
        raise ValueError("h must be nonzero")
    partners = np.asarray(partners)
    if partners.size == 0:
        return 1.0
    if partners.ndim == 1:
        partners = partners[:, None]
    if partners.shape[1] >= partners.shape[0]:
        raise ValueError("partner matrix must have fewer columns than rows")
    _check_rank(partners, "partner matrix")
    q, _ = np.linalg.qr(partners)
    resid = h - q @ (q.conj().T @ h)
    val = np.vdot(resid, resid).real / norm_sq
    return float(min(max(val, 0.0), 1.0))


def effective_gain(user_set: UserSet) -> float:
    """Effective channel gain 1 / [(H^H H)^{-1}]_{k,k} of the user of interest.

    Evaluated through the projection identity |h|^2 sin^2(theta) rather than
    an explicit Gram inverse; the two paths agree to 1e-9 relative and the
    dense-inverse route is kept as the test oracle.
    """
    chans = user_set.channels
    k = user_set.user_of_interest
    _check_rank(chans, "channel matrix")
    h = chans[:, k]
    partners = np.delete(chans, k, axis=1)
    if partners.shape[1] == 0:
        return float(np.vdot(h, h).real)
    return float(np.vdot(h, h).real * sin2_angle(h, partners))


def _zf_powers(chans: np.ndarray, total_per_user: float) -> tuple[np.ndarray, np.ndarray]:
    """Received powers p_k = total_per_user * effective gain, plus precoders.

    The precoding matrix is H (H^H H)^{-1} diag(sqrt(p)); each column then
    carries transmit power total_per_user.
    """
    n_users = chans.shape[1]
    _check_rank(chans, "channel matrix")
    gram = chans.conj().T @ chans
    inv_diag = np.empty(n_users)
    for k in range(n_users):
        h = chans[:, k]
        partners = np.delete(chans, k, axis=1)
        gain = np.vdot(h, h).real
        if partners.shape[1]:
            gain *= sin2_angle(h, partners)
        inv_diag[k] = 1.0 / gain  # [(H^H H)^{-1}]_{k,k}
    p = total_per_user / inv_diag
    precoders = chans @ np.linalg.solve(gram, np.diag(np.sqrt(p)))
    return p, precoders


def comp_precode(user_set: UserSet, tx_power: float, num_bs: int,
                 users_per_cell: int, noise: float) -> PrecodeResult:
    """Joint ZF over the cluster with per-user power constraint.

    The cluster sum power B*P is split equally over the B*M active users,
    so user k receives p_k = P / (M [(H^H H)^{-1}]_{k,k}) and sees
    SINR p_k / sigma^2 (ZF removes all inter-user interference).
    """
    chans = user_set.channels
    dim, n_users = chans.shape
    if n_users != num_bs * users_per_cell:
        raise ValueError(f"expected {num_bs * users_per_cell} scheduled users, got {n_users}")
    if n_users > dim:
        raise ValueError(f"cannot zero-force {n_users} users on {dim} dimensions")
    p, precoders = _zf_powers(chans, tx_power / users_per_cell)
    return PrecodeResult(precoders=precoders, per_user_power=p, sinr=p / noise)


def noncomp_precode(user_set: UserSet, tx_power: float, users_per_cell: int,
                    gains: LinkGains | Sequence[LinkGains], noise: float,
                    ici_power: np.ndarray | None = None) -> PrecodeResult:
    """Per-cell ZF on local channels, other cells treated as interference.

    `gains` holds the link gains of the scheduled users (one per column, or
    a single LinkGains applied to all).  The inter-cell interference enters
    by its expectation P * sum alpha^2 unless instantaneous per-user ICI
    powers are supplied via ici_power.
    """
    chans = user_set.channels
    dim, n_users = chans.shape
    if n_users != users_per_cell:
        raise ValueError(f"expected {users_per_cell} scheduled users, got {n_users}")
    if n_users > dim:
        raise ValueError(f"cannot zero-force {n_users} users on {dim} antennas")
    if isinstance(gains, LinkGains):
        gains = [gains] * n_users
    if len(gains) != n_users:
        raise ValueError("need link gains for every scheduled user")
    p, precoders = _zf_powers(chans, tx_power / users_per_cell)
    serving = np.array([g.alpha_sq[g.serving] for g in gains])
    if ici_power is None:
        ici_power = np.array([
            tx_power * (g.alpha_sq.sum() - g.alpha_sq[g.serving]) for g in gains])
    else:
        ici_power = np.broadcast_to(np.asarray(ici_power, dtype=float), (n_users,))
    sinr = serving * p / (ici_power + noise)
    return PrecodeResult(precoders=precoders, per_user_power=p, sinr=sinr)


def ici_sample(alpha_sq: float, local_channel: np.ndarray, precoders: np.ndarray,
               symbols: np.ndarray) -> float:
    """Instantaneous interference power |alpha g^H W x|^2 from one BS."""
    amp = np.sqrt(alpha_sq)
    return float(np.abs(amp * (local_channel.conj() @ precoders @ symbols)) ** 2)


def ici_expectation_check(alpha_sq: float, tx_power: float, rng: np.random.Generator,
                          trials: int, users_per_cell: int = 2,
                          num_antennas: int = 4) -> float:
    """Monte Carlo mean of the instantaneous ICI power from one interfering BS.

    The interferer zero-forces toward its own random users with per-user
    transmit power P/M; the mean over fading should land on P * alpha^2.
    """
    if tx_power == 0.0 or alpha_sq == 0.0:
        return 0.0
    m, nt = users_per_cell, num_antennas
    g = (rng.standard_normal((trials, nt, m)) + 1j * rng.standard_normal((trials, nt, m))) / np.sqrt(2)
    gram = np.einsum('tij,tik->tjk', g.conj(), g)
    inv = np.linalg.inv(gram)
    p = tx_power / (m * np.einsum('tkk->tk', inv).real)
    w = np.einsum('tij,tjk->tik', g, inv) * np.sqrt(p)[:, None, :]
    # unit-energy data symbols, random phase
    x = np.exp(2j * np.pi * rng.uniform(size=(trials, m)))
    gv = (rng.standard_normal((trials, nt)) + 1j * rng.standard_normal((trials, nt))) / np.sqrt(2)
    rx = np.einsum('ti,tik,tk->t', gv.conj(), w, x)
    return float(alpha_sq * np.mean(np.abs(rx) ** 2))
