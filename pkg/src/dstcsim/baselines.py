"""Reference schemes: the conventional two-symbol differential chain under
timing offset, and a coherent benchmark with genie channel knowledge.

The conventional scheme runs the same relay configuration as the OFDM
chain but two symbols at a time with no guard, so a late relay 2 leaks
between consecutive symbols and across block boundaries:

    y1 = g1 x11 + g20 x21 + g21 x22_prev + n1
    y2 = g1 x12 + g20 x22 + g21 x21      + n2

where x22_prev is relay 2's final sample of the previous block. The
decoder still applies the two-block minimum-distance rule, treating the
leakage as noise, which is what produces its error floor for mid-range
offsets.

The coherent benchmark transmits the normalized symbol pair directly
(no differential chain), assumes perfect symbol alignment, and decides by
exhaustive minimum distance using the true composite channels
h1 = q1 g1 and h2 = conj(q2) g2.
"""

import numpy as np

from .channel import BlockChannel, awgn
from .modem import Constellation, diff_decode_joint_labels, diff_encode_pairs
from .power import PowerAllocation


class ConventionalLink:
    """Stateful conventional differential stream (batchable).

    Tracks the differential state, the previous received pair and relay 2's
    one-sample transmit carryover.
    """

    def __init__(self, const: Constellation, alloc: PowerAllocation,
                 batch_shape=(), noiseless: bool = False):
        self.const = const
        self.alloc = alloc
        self.noiseless = noiseless
        self.batch_shape = tuple(batch_shape)
        self.s1 = np.ones(self.batch_shape, dtype=complex)
        self.s2 = np.zeros(self.batch_shape, dtype=complex)
        self.carry = np.zeros(self.batch_shape, dtype=complex)
        self.prev_y = None

    def transmit(self, labels1, labels2, ch: BlockChannel, rng):
        """One two-symbol block; labels None sends the reference state."""
        if labels1 is not None:
            v1 = self.const.points[labels1]
            v2 = self.const.points[labels2]
            self.s1, self.s2 = diff_encode_pairs(self.s1, self.s2, v1, v2)
        amp = np.sqrt(2.0 * self.alloc.p0)
        n0 = 0.0 if self.noiseless else self.alloc.n0
        r11 = awgn(amp * ch.q1 * self.s1, n0, rng)
        r12 = awgn(amp * ch.q1 * self.s2, n0, rng)
        r21 = awgn(amp * ch.q2 * self.s1, n0, rng)
        r22 = awgn(amp * ch.q2 * self.s2, n0, rng)
        a = self.alloc.a
        x11, x12 = a * r11, a * r12
        x21 = -a * np.conj(r22)
        x22 = a * np.conj(r21)
        y1 = awgn(ch.g1 * x11 + ch.g20 * x21 + ch.g21 * self.carry, n0, rng)
        y2 = awgn(ch.g1 * x12 + ch.g20 * x22 + ch.g21 * x21, n0, rng)
        self.carry = x22
        y = np.stack([y1, y2], axis=-1)
        if self.prev_y is None:
            self.prev_y = y
            return None, None
        l1, l2 = diff_decode_joint_labels(y, self.prev_y, self.const)
        self.prev_y = y
        return l1, l2


def coherent_block(labels1, labels2, ch: BlockChannel, alloc: PowerAllocation,
                   const: Constellation, rng, noiseless: bool = False):
    """One coherent block: perfect sync, genie CSI, exhaustive ML decision."""
    v1 = const.points[labels1]
    v2 = const.points[labels2]
    norm = np.sqrt(np.abs(v1) ** 2 + np.abs(v2) ** 2)
    u1, u2 = v1 / norm, v2 / norm
    amp = np.sqrt(2.0 * alloc.p0)
    n0 = 0.0 if noiseless else alloc.n0
    r11 = awgn(amp * ch.q1 * u1, n0, rng)
    r12 = awgn(amp * ch.q1 * u2, n0, rng)
    r21 = awgn(amp * ch.q2 * u1, n0, rng)
    r22 = awgn(amp * ch.q2 * u2, n0, rng)
    a = alloc.a
    y1 = awgn(ch.g1 * (a * r11) + ch.g2 * (-a * np.conj(r22)), n0, rng)
    y2 = awgn(ch.g1 * (a * r12) + ch.g2 * (a * np.conj(r21)), n0, rng)
    h1 = ch.q1 * ch.g1
    h2 = np.conj(ch.q2) * ch.g2
    return coherent_ml_labels(y1, y2, h1, h2, alloc, const)


def coherent_ml_labels(y1, y2, h1, h2, alloc: PowerAllocation,
                       const: Constellation):
    """Exhaustive minimum-distance decision with known composite channels."""
    y1 = np.asarray(y1, dtype=complex)
    pts = const.points
    m = const.size
    c1 = np.repeat(pts, m)
    c2 = np.tile(pts, m)
    norm = np.sqrt(np.abs(c1) ** 2 + np.abs(c2) ** 2)
    shape = (m * m,) + (1,) * y1.ndim
    u1 = (c1 / norm).reshape(shape)
    u2 = (c2 / norm).reshape(shape)
    scale = alloc.a * np.sqrt(2.0 * alloc.p0)
    r1 = y1 - scale * (u1 * h1 - np.conj(u2) * h2)
    r2 = y2 - scale * (u2 * h1 + np.conj(u1) * h2)
    metric = np.abs(r1) ** 2 + np.abs(r2) ** 2
    best = np.argmin(metric, axis=0)
    return best // m, best % m
