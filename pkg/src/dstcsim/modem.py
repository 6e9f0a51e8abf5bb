"""Constellations, 2x2 unitary space-time codewords, differential encoding
and the non-coherent minimum-distance decoders.

A data pair (v1, v2) is carried by the normalized Alamouti-structured matrix

    V = 1/sqrt(|v1|^2 + |v2|^2) * [[v1, -conj(v2)], [v2, conj(v1)]]

which is unitary by construction. Streams chain these differentially,
``s_k = V_k @ s_{k-1}`` from the unit seed ``s_0 = [1, 0]``, so a receiver
can decode from two consecutive observations without channel knowledge.
"""

from dataclasses import dataclass, field

import numpy as np

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class Constellation:
    """Unit-average-energy symbol set with an index <-> bit-pattern labeling.

    ``points[i]`` is the symbol for label ``i``; label bits are the
    big-endian binary digits of ``i`` (``bits_per_symbol`` of them).
    """

    name: str
    points: np.ndarray
    bits_per_symbol: int
    # popcount table for label XORs, filled in __post_init__
    _bit_distance: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if len(pts) != 2 ** self.bits_per_symbol:
            raise ValueError("constellation size must be 2**bits_per_symbol")
        object.__setattr__(self, "points", pts)
        xor = np.arange(len(pts))[:, None] ^ np.arange(len(pts))[None, :]
        popcount = np.array([bin(v).count("1") for v in range(len(pts))])
        object.__setattr__(self, "_bit_distance", popcount[xor])

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def is_constant_modulus(self) -> bool:
        mags = np.abs(self.points)
        return bool(np.allclose(mags, mags[0], rtol=1e-12, atol=1e-12))

    def bit_errors(self, labels_a, labels_b) -> np.ndarray:
        """Hamming distance between the bit patterns of two label arrays."""
        return self._bit_distance[np.asarray(labels_a), np.asarray(labels_b)]


def bpsk() -> Constellation:
    return Constellation("bpsk", np.array([1.0, -1.0]), 1)


def qpsk() -> Constellation:
    """Gray-labeled QPSK: 00/01/11/10 step around the circle."""
    pts = np.array([1 + 1j, -1 + 1j, 1 - 1j, -1 - 1j]) / _SQRT2
    # index = 2*b0 + b1: 00 -> 45deg, 01 -> 135deg, 11 -> 225deg, 10 -> 315deg
    return Constellation("qpsk", pts, 2)


def qam16() -> Constellation:
    """Gray-labeled 16-QAM, unit average energy.

    Non-constant-modulus, so only the joint differential decoder accepts it;
    the normalized codeword construction also makes collinear pairs
    indistinguishable, so differential chains over it are for experimentation
    rather than the power analysis, which assumes the unitary PSK structure.
    """
    gray2 = np.array([-3, -1, 3, 1], dtype=float)  # Gray order for 2 bits
    idx = np.arange(16)
    re = gray2[idx >> 2]
    im = gray2[idx & 3]
    return Constellation("qam16", (re + 1j * im) / np.sqrt(10.0), 4)


_REGISTRY = {"bpsk": bpsk, "qpsk": qpsk, "qam16": qam16}


def get_constellation(name: str) -> Constellation:
    try:
        return _REGISTRY[name.lower()]()
    except KeyError:
        raise ValueError(
            f"unknown constellation {name!r}; choose from {sorted(_REGISTRY)}"
        ) from None


def map_bits(bits, const: Constellation):
    """Map a flat bit array to (labels, symbols).

    Bit count must be a multiple of ``bits_per_symbol``.
    """
    bits = np.asarray(bits)
    k = const.bits_per_symbol
    if bits.size % k:
        raise ValueError(f"bit count {bits.size} not a multiple of {k}")
    groups = bits.reshape(-1, k)
    weights = 1 << np.arange(k - 1, -1, -1)
    labels = groups @ weights
    return labels, const.points[labels]


def demap_bits(symbols, const: Constellation) -> np.ndarray:
    """Nearest-point decision back to a flat bit array."""
    symbols = np.asarray(symbols, dtype=complex)
    dist = np.abs(symbols[..., None] - const.points) ** 2
    labels = np.argmin(dist, axis=-1)
    return labels_to_bits(labels, const)


def labels_to_bits(labels, const: Constellation) -> np.ndarray:
    labels = np.asarray(labels)
    k = const.bits_per_symbol
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[..., None] >> shifts) & 1).reshape(*labels.shape[:-1], -1)


def build_ustc(v1: complex, v2: complex) -> np.ndarray:
    """Normalized 2x2 Alamouti-structured unitary codeword for a symbol pair."""
    norm = np.sqrt(abs(v1) ** 2 + abs(v2) ** 2)
    if norm == 0:
        raise ValueError("symbol pair (0, 0) has no unitary codeword")
    return np.array([[v1, -np.conj(v2)], [v2, np.conj(v1)]]) / norm


def diff_encode(state: np.ndarray, codeword: np.ndarray) -> np.ndarray:
    """One differential step: s_k = V_k @ s_{k-1}. Unit norm is preserved."""
    return codeword @ np.asarray(state, dtype=complex)


def diff_encode_pairs(s1, s2, v1, v2):
    """Vectorized differential update for per-subcarrier component arrays.

    All arguments broadcast together; returns the updated (s1, s2).
    """
    norm = np.sqrt(np.abs(v1) ** 2 + np.abs(v2) ** 2)
    s1_new = (v1 * s1 - np.conj(v2) * s2) / norm
    s2_new = (v2 * s1 + np.conj(v1) * s2) / norm
    return s1_new, s2_new


def diff_decode_joint_labels(y_now, y_prev, const: Constellation):
    """Exhaustive pair search: argmin over all |V|^2 candidates of
    ||y_now - V(v1, v2) @ y_prev||.

    ``y_now``/``y_prev`` have shape (..., 2); returns label arrays
    (l1, l2) of shape (...). Ties break to the lowest (l1, l2) pair.
    """
    y_now = np.asarray(y_now, dtype=complex)
    y_prev = np.asarray(y_prev, dtype=complex)
    pts = const.points
    m = const.size
    a1, a2 = y_now[..., 0], y_now[..., 1]
    b1, b2 = y_prev[..., 0], y_prev[..., 1]

    v1 = np.repeat(pts, m)  # candidate pairs in lexicographic label order
    v2 = np.tile(pts, m)
    norm = np.sqrt(np.abs(v1) ** 2 + np.abs(v2) ** 2)
    shape = (m * m,) + (1,) * a1.ndim
    v1 = (v1 / norm).reshape(shape)
    v2 = (v2 / norm).reshape(shape)

    # residuals of the two received components against each candidate
    r1 = a1 - (v1 * b1 - np.conj(v2) * b2)
    r2 = a2 - (v2 * b1 + np.conj(v1) * b2)
    metric = np.abs(r1) ** 2 + np.abs(r2) ** 2
    best = np.argmin(metric, axis=0)  # first minimum: lexicographic tie-break
    return best // m, best % m


def diff_decode_decoupled_labels(y_now, y_prev, const: Constellation):
    """Per-symbol decisions via the Alamouti correlation statistics.

    Valid for constant-modulus constellations only, where the codeword
    normalization is candidate-independent and the joint metric separates:
    argmin ||y_k - V y_{k-1}|| == (argmax Re(v1 z1), argmax Re(v2 z2)) with

        z1 = conj(y_k[0]) y_{k-1}[0] + y_k[1] conj(y_{k-1}[1])
        z2 = conj(y_k[1]) y_{k-1}[0] - y_k[0] conj(y_{k-1}[1])
    """
    if not const.is_constant_modulus:
        raise ValueError(
            f"decoupled decoding requires a constant-modulus constellation, "
            f"got {const.name!r}; fall back to the joint decoder"
        )
    y_now = np.asarray(y_now, dtype=complex)
    y_prev = np.asarray(y_prev, dtype=complex)
    a1, a2 = y_now[..., 0], y_now[..., 1]
    b1, b2 = y_prev[..., 0], y_prev[..., 1]
    z1 = np.conj(a1) * b1 + a2 * np.conj(b2)
    z2 = np.conj(a2) * b1 - a1 * np.conj(b2)
    corr1 = np.real(const.points.reshape((-1,) + (1,) * z1.ndim) * z1)
    corr2 = np.real(const.points.reshape((-1,) + (1,) * z2.ndim) * z2)
    return np.argmax(corr1, axis=0), np.argmax(corr2, axis=0)


def diff_decode_joint(y_now, y_prev, const: Constellation):
    """Joint decoder returning the decided symbol pair values."""
    l1, l2 = diff_decode_joint_labels(y_now, y_prev, const)
    return const.points[l1], const.points[l2]


def diff_decode_decoupled(y_now, y_prev, const: Constellation):
    """Decoupled decoder returning the decided symbol pair values."""
    l1, l2 = diff_decode_decoupled_labels(y_now, y_prev, const)
    return const.points[l1], const.points[l2]
