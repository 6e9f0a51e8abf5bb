"""Power budget shared by all schemes.

A total network power P splits between the source (P0 per symbol) and each
relay (Pr per symbol); the relay amplification A = sqrt(Pr / (P0 + N0))
normalizes the relay's average received power (P0 + N0 per sample) back to
Pr on transmit. Default split: P0 = P/2, Pr = P/4.
"""

from dataclasses import dataclass

import numpy as np

DEFAULT_SPLIT = (0.5, 0.25)


@dataclass(frozen=True)
class PowerAllocation:
    p_total: float
    p0: float
    pr: float
    n0: float

    def __post_init__(self):
        if min(self.p_total, self.p0, self.pr) <= 0:
            raise ValueError("powers must be positive")
        if self.n0 < 0:
            raise ValueError("noise variance must be >= 0")

    @property
    def a(self) -> float:
        """Relay amplification factor sqrt(Pr / (P0 + N0))."""
        return np.sqrt(self.pr / (self.p0 + self.n0))

    @classmethod
    def from_snr_db(cls, p_over_n0_db: float, split=DEFAULT_SPLIT,
                    n0: float = 1.0, noiseless: bool = False) -> "PowerAllocation":
        """Build from total power over noise density in dB.

        ``noiseless`` keeps the same P but zeroes N0 (the N0 -> 0 limit,
        which also enters A).
        """
        p = n0 * 10.0 ** (p_over_n0_db / 10.0)
        if noiseless:
            n0 = 0.0
        return cls(p_total=p, p0=split[0] * p, pr=split[1] * p, n0=n0)
