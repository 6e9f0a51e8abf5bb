"""End-to-end OFDM differential space-time transmission chain.

One transmission block carries 2N symbols from the source to the
destination through two amplify-and-forward relays:

  source:   per-subcarrier differential update s[n] <- V[n] s[n], then an
            N-point unitary IDFT of each component sequence; the two
            time-domain sub-blocks S1, S2 go out consecutively.
  relays:   relay 1 amplifies both sub-blocks; relay 2 conjugates,
            circularly time-reverses, negates its first sub-block source
            and swaps sub-block roles:
                X11 = A R11            X21 = -A ctr(conj(R22))
                X12 = A R12            X22 = +A ctr(conj(R21))
            then both prepend an L-sample cyclic prefix.
  channel:  relay 2's stream arrives (d*Ts + tau) late; after the matched
            filter this is two taps g20, g21 at offsets d and d+1, so the
            destination sees
                rx = g1*stream1 + g20*delay(stream2, d)
                                + g21*delay(stream2, d+1) + noise
            with L > d making the delay circular over each retained
            sub-block.
  receiver: strip the prefix, take the unitary DFT of both sub-blocks and
            decode each subcarrier from two consecutive blocks. Because
            ctr(conj(idft(s))) == idft(conj(s)), the DFT outputs collapse
            to the flat per-subcarrier model
                y[n] = A sqrt(2 P0) [[s1, -s2*], [s2, s1*]] [h1, H2[n]]^T + w
            with h1 = q1 g1 and H2[n] = conj(q2) (g20 + g21 e^{-j2pi n/N})
            e^{-j2pi n d/N}: the offset is absorbed into a rotation the
            differential decoder never needs to know.

All functions broadcast over leading stream axes; the last axis is the
sample (time) or subcarrier (frequency) index.
"""

import numpy as np

from .channel import BlockChannel, DelayProfile, awgn
from .dsp import add_cyclic_prefix, circular_time_reversal, dft, idft, remove_cyclic_prefix
from .modem import (
    Constellation,
    diff_decode_decoupled_labels,
    diff_decode_joint_labels,
    diff_encode_pairs,
)
from .power import PowerAllocation


def initial_states(batch_shape, n_subcarriers: int):
    """Unit reference state [1, 0] for every subcarrier of every stream."""
    shape = tuple(batch_shape) + (n_subcarriers,)
    return np.ones(shape, dtype=complex), np.zeros(shape, dtype=complex)


def source_encode(v1, v2, s1, s2):
    """Differentially encode one block and form its time-domain sub-blocks.

    ``v1``/``v2`` are per-subcarrier data symbols (pass None for the
    reference block, which transmits the states unchanged). Returns
    ``(s1, s2, S1, S2)``: updated states and the unit-scale IDFT
    sub-blocks; the sqrt(2 P0) amplitude lives at the channel boundary.
    """
    if v1 is not None:
        s1, s2 = diff_encode_pairs(s1, s2, v1, v2)
    return s1, s2, idft(s1), idft(s2)


def relay_receive(sub1, sub2, q1, q2, alloc: PowerAllocation, rng, noiseless=False):
    """Source -> relay hop: scale by sqrt(2 P0), fade, add relay noise."""
    amp = np.sqrt(2.0 * alloc.p0)
    q1 = np.asarray(q1)[..., None]
    q2 = np.asarray(q2)[..., None]
    n0 = 0.0 if noiseless else alloc.n0
    r11 = awgn(amp * q1 * sub1, n0, rng)
    r12 = awgn(amp * q1 * sub2, n0, rng)
    r21 = awgn(amp * q2 * sub1, n0, rng)
    r22 = awgn(amp * q2 * sub2, n0, rng)
    return r11, r12, r21, r22


def relay_process(r11, r12, r21, r22, alloc: PowerAllocation, cp_len: int):
    """Relay configuration plus cyclic prefix; no channel knowledge used."""
    a = alloc.a
    x11 = add_cyclic_prefix(a * r11, cp_len)
    x12 = add_cyclic_prefix(a * r12, cp_len)
    x21 = add_cyclic_prefix(-a * circular_time_reversal(np.conj(r22)), cp_len)
    x22 = add_cyclic_prefix(a * circular_time_reversal(np.conj(r21)), cp_len)
    return x11, x12, x21, x22


def superpose_at_destination(x11, x12, x21, x22, ch: BlockChannel,
                             profile: DelayProfile, cp_len: int, n0: float,
                             rng, tail=None):
    """Relay -> destination hop with relay 2 arriving (d + tau) symbols late.

    ``tail`` holds the last d+1 samples relay 2 transmitted in the previous
    block (zeros at stream start); the late taps pull those into this
    block's prefix region. Returns the two received sub-blocks (prefix
    still attached) and the new tail.
    """
    if cp_len <= profile.d:
        raise ValueError(
            f"cyclic prefix length {cp_len} must exceed integer delay {profile.d}"
        )
    stream1 = np.concatenate([x11, x12], axis=-1)
    stream2 = np.concatenate([x21, x22], axis=-1)
    depth = profile.d + 1
    if tail is None:
        tail = np.zeros(stream2.shape[:-1] + (depth,), dtype=complex)
    padded = np.concatenate([tail, stream2], axis=-1)
    span = stream2.shape[-1]
    late_d = padded[..., depth - profile.d: depth - profile.d + span]
    late_d1 = padded[..., 0: span]
    rx = (
        np.asarray(ch.g1)[..., None] * stream1
        + np.asarray(ch.g20)[..., None] * late_d
        + np.asarray(ch.g21)[..., None] * late_d1
    )
    rx = awgn(rx, n0, rng)
    half = span // 2
    return rx[..., :half], rx[..., half:], stream2[..., -depth:]


def destination_decode(rx1, rx2, prev_y, const: Constellation, cp_len: int,
                       decoder: str = "auto"):
    """Strip prefixes, DFT, and decode every subcarrier differentially.

    Needs no channel coefficients and no delay knowledge. ``prev_y`` is the
    previous block's DFT output of shape (..., N, 2), or None for the
    reference block. Returns (labels1, labels2, y) with labels None for the
    reference block.
    """
    y1 = dft(remove_cyclic_prefix(rx1, cp_len))
    y2 = dft(remove_cyclic_prefix(rx2, cp_len))
    y = np.stack([y1, y2], axis=-1)
    if prev_y is None:
        return None, None, y
    if decoder == "auto":
        decoder = "decoupled" if const.is_constant_modulus else "joint"
    if decoder == "decoupled":
        l1, l2 = diff_decode_decoupled_labels(y, prev_y, const)
    elif decoder == "joint":
        l1, l2 = diff_decode_joint_labels(y, prev_y, const)
    else:
        raise ValueError(f"unknown decoder {decoder!r}")
    return l1, l2, y


class OfdmDstcLink:
    """Stateful per-stream session: differential states, decoder reference
    and relay-2 carryover. One instance drives a batch of independent
    streams in lockstep; nothing is shared across instances.
    """

    def __init__(self, n_subcarriers: int, cp_len: int, const: Constellation,
                 alloc: PowerAllocation, profile: DelayProfile,
                 batch_shape=(), decoder: str = "auto", noiseless: bool = False):
        if cp_len <= profile.d:
            raise ValueError(
                f"cyclic prefix length {cp_len} must exceed integer delay {profile.d}"
            )
        self.n = n_subcarriers
        self.cp_len = cp_len
        self.const = const
        self.alloc = alloc
        self.profile = profile
        self.decoder = decoder
        self.noiseless = noiseless
        self.batch_shape = tuple(batch_shape)
        self.s1, self.s2 = initial_states(self.batch_shape, n_subcarriers)
        self.prev_y = None
        self.tail = None

    def transmit(self, labels1, labels2, ch: BlockChannel, rng):
        """Run one full block; pass labels None for the reference block.

        Returns decoded (labels1, labels2) or (None, None) for the
        reference block.
        """
        if labels1 is None:
            v1 = v2 = None
        else:
            v1 = self.const.points[labels1]
            v2 = self.const.points[labels2]
        self.s1, self.s2, sub1, sub2 = source_encode(v1, v2, self.s1, self.s2)
        r = relay_receive(sub1, sub2, ch.q1, ch.q2, self.alloc, rng,
                          noiseless=self.noiseless)
        x = relay_process(*r, self.alloc, self.cp_len)
        n0 = 0.0 if self.noiseless else self.alloc.n0
        rx1, rx2, self.tail = superpose_at_destination(
            *x, ch, self.profile, self.cp_len, n0, rng, tail=self.tail
        )
        l1, l2, y = destination_decode(
            rx1, rx2, self.prev_y, self.const, self.cp_len, decoder=self.decoder
        )
        self.prev_y = y
        return l1, l2
