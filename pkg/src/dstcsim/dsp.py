"""Stateless DSP primitives: unitary DFT/IDFT, circular time-reversal,
circular convolution and cyclic-prefix handling.

Transform convention is symmetric 1/sqrt(N) scaling on both directions:

    idft(x)[m] = (1/sqrt(N)) * sum_n x[n] * exp(+j*2*pi*n*m/N)
    dft(y)[n]  = (1/sqrt(N)) * sum_m y[m] * exp(-j*2*pi*m*n/N)

Circular convolution is the plain (unnormalized) sum
``out[m] = sum_l a[l] * b[(m - l) mod N]``, so with the unitary transforms
the convolution theorem carries a sqrt(N) factor:

    dft(circular_convolve(a, b)) = sqrt(N) * dft(a) * dft(b)

All functions operate on the last axis, so batched inputs of shape
(..., N) work transparently.
"""

import numpy as np


def _check_nonempty(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] < 1:
        raise ValueError("sequence must contain at least one sample")
    return x


def idft(x) -> np.ndarray:
    """Unitary inverse DFT along the last axis."""
    x = _check_nonempty(x)
    n = x.shape[-1]
    return np.fft.ifft(x, axis=-1) * np.sqrt(n)


def dft(x) -> np.ndarray:
    """Unitary forward DFT along the last axis."""
    x = _check_nonempty(x)
    n = x.shape[-1]
    return np.fft.fft(x, axis=-1) / np.sqrt(n)


def circular_time_reversal(x) -> np.ndarray:
    """Index map m -> (-m) mod N: out[0] = in[0], out[m] = in[N-m] otherwise.

    An involution; under conjugation it swaps the roles of DFT and IDFT.
    """
    x = _check_nonempty(x)
    return np.concatenate([x[..., :1], x[..., :0:-1]], axis=-1)


def circular_convolve(a, b) -> np.ndarray:
    """Circular convolution of two equal-length sequences (last axis).

    Callers zero-pad the shorter operand before calling.
    """
    a = _check_nonempty(a)
    b = _check_nonempty(b)
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"length mismatch: {a.shape[-1]} vs {b.shape[-1]} (pad before calling)"
        )
    return np.fft.ifft(np.fft.fft(a, axis=-1) * np.fft.fft(b, axis=-1), axis=-1)


def add_cyclic_prefix(x, cp_len: int) -> np.ndarray:
    """Prepend the last ``cp_len`` samples of ``x`` to its beginning."""
    x = _check_nonempty(x)
    n = x.shape[-1]
    if cp_len < 0 or cp_len > n:
        raise ValueError(f"cyclic prefix length must be in [0, {n}], got {cp_len}")
    if cp_len == 0:
        return x.copy()
    return np.concatenate([x[..., n - cp_len:], x], axis=-1)


def remove_cyclic_prefix(x, cp_len: int) -> np.ndarray:
    """Drop the first ``cp_len`` samples of ``x``."""
    x = _check_nonempty(x)
    if cp_len < 0:
        raise ValueError(f"cyclic prefix length must be non-negative, got {cp_len}")
    if x.shape[-1] < cp_len + 1:
        raise ValueError(
            f"input of length {x.shape[-1]} too short to strip {cp_len} prefix samples"
        )
    return x[..., cp_len:].copy()
