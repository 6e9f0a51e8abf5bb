"""Closed-form link quantities for the OFDM relay scheme.

For relay-2 fractional delay tau the two taps p(tau), p(Ts - tau) combine
per subcarrier n into the power profile

    c[n] = |p(tau) + p(Ts - tau) * exp(-j*2*pi*n/N)|^2
         = a^2 + b^2 + 2*a*b*cos(2*pi*n/N)

(the expanded form is used so that the tau <-> Ts - tau swap symmetry is
exact in floating point). The equivalent per-subcarrier noise variance and
received SNR for given relay->destination gains are

    sigma2[n]    = N0 * (1 + A^2 * (|g1|^2 + |g2|^2 * c[n]))
    gamma[n,tau] = A^2 * P0 * (|g1|^2 + |g2|^2 * c[n]) / sigma2[n]

which at tau = 0 (c[n] = 1) reduce to the synchronous two-relay forms.
"""

from dataclasses import dataclass

import numpy as np

from .channel import raised_cosine
from .power import PowerAllocation

SURFACE_CSV_HEADER = "n,tau_over_Ts,gamma_db"


def tap_power_c(n, tau: float, beta: float, n_subcarriers: int):
    """Two-tap power profile c[n]; ``n`` may be an int or an index array."""
    n = np.asarray(n)
    if np.any(n < 0) or np.any(n >= n_subcarriers):
        raise ValueError(f"subcarrier index out of range [0, {n_subcarriers})")
    a = raised_cosine(tau, beta)
    b = raised_cosine(1.0 - tau, beta)
    # evaluate the even phase term at the canonical mirror index so that
    # c[n] == c[N-n] holds exactly, not just to rounding
    k = np.minimum(n, n_subcarriers - n)
    c = a * a + b * b + 2.0 * a * b * np.cos(2.0 * np.pi * k / n_subcarriers)
    return c if c.ndim else float(c)


def noise_variance(n, tau: float, g1_sq: float, g2_sq: float,
                   alloc: PowerAllocation, beta: float, n_subcarriers: int):
    """Equivalent per-subcarrier noise variance sigma2[n] for given gains."""
    c = tap_power_c(n, tau, beta, n_subcarriers)
    return alloc.n0 * (1.0 + alloc.a**2 * (g1_sq + g2_sq * c))


def snr(n, tau: float, g1_sq: float, g2_sq: float,
        alloc: PowerAllocation, beta: float, n_subcarriers: int):
    """Received SNR per symbol for given relay->destination gains (linear)."""
    c = tap_power_c(n, tau, beta, n_subcarriers)
    a2 = alloc.a**2
    sig = a2 * alloc.p0 * (g1_sq + g2_sq * c)
    return sig / (alloc.n0 * (1.0 + a2 * (g1_sq + g2_sq * c)))


def to_db(x):
    """Power ratio to decibels."""
    return 10.0 * np.log10(x)


@dataclass
class SnrSurface:
    """gamma[n, tau] in dB over the full (tau, n) grid plus its parameters."""

    taus: np.ndarray            # fractional delays, units of Ts
    n_subcarriers: int
    gamma_db: np.ndarray        # shape (len(taus), n_subcarriers)
    p_over_n0_db: float
    split: tuple
    beta: float
    g1_sq: float
    g2_sq: float
    cp_len: int = 1

    def format_csv(self) -> str:
        lines = [SURFACE_CSV_HEADER]
        for i, tau in enumerate(self.taus):
            for n in range(self.n_subcarriers):
                lines.append(f"{n},{tau:.9g},{self.gamma_db[i, n]:.9g}")
        return "\n".join(lines) + "\n"

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.format_csv())


def snr_surface(n_subcarriers: int = 64, p_over_n0_db: float = 25.0,
                split: tuple = (0.5, 0.25), beta: float = 0.9,
                g1_sq: float = 1.0, g2_sq: float = 1.0,
                tau_count: int = 33, cp_len: int = 1) -> SnrSurface:
    """Evaluate gamma[n, tau] over a uniform tau grid of ``tau_count`` points.

    The default 33-point grid steps by 1/32: dyadic spacing keeps the
    mirrored delays bitwise identical, so the tau <-> Ts - tau symmetry of
    the surface is exact row for row.
    """
    if tau_count < 2:
        raise ValueError("tau grid needs at least 2 points")
    alloc = PowerAllocation.from_snr_db(p_over_n0_db, split=split)
    m = tau_count - 1
    taus = np.array([i / m for i in range(tau_count)])
    idx = np.arange(n_subcarriers)
    gamma = np.empty((tau_count, n_subcarriers))
    for i, tau in enumerate(taus):
        gamma[i] = snr(idx, float(tau), g1_sq, g2_sq, alloc, beta, n_subcarriers)
    return SnrSurface(
        taus=taus, n_subcarriers=n_subcarriers, gamma_db=to_db(gamma),
        p_over_n0_db=p_over_n0_db, split=split, beta=beta,
        g1_sq=g1_sq, g2_sq=g2_sq, cp_len=cp_len,
    )
