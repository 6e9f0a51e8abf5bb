"""Random channel generation and the timing-offset tap model.

The four links (source->relay_i, relay_i->destination) fade independently
as unit-variance complex Gaussians, quasi-static per transmission block and
correlated across blocks with the classic Bessel-J0 Doppler profile. The
fractional timing offset ``tau`` of relay 2 turns its link into two taps
sampled off the matched-filter output: ``g20 = p(tau) g2`` and
``g21 = p(Ts - tau) g2`` with ``p`` the raised-cosine pulse. Side lobes of
``p`` beyond those two samples are neglected.

Time is normalized to the symbol duration (Ts = 1) throughout.
"""

from dataclasses import dataclass

import numpy as np

# half-width of the window around the raised-cosine pole where the
# analytic limit replaces the 0/0 expression
_SINGULARITY_EPS = 1e-9


def raised_cosine(t, beta: float):
    """Raised-cosine pulse sinc(t)*cos(pi*beta*t)/(1 - 4*beta^2*t^2).

    At |t| = 1/(2*beta) the expression is 0/0; the analytic limit
    (pi/4)*sinc(t) is used inside a tiny window around the pole.
    Accepts scalars or arrays.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"roll-off factor must be in [0, 1], got {beta}")
    t = np.asarray(t, dtype=float)
    denom = 1.0 - 4.0 * beta**2 * t**2
    near_pole = np.abs(denom) < _SINGULARITY_EPS
    safe = np.where(near_pole, 1.0, denom)
    val = np.sinc(t) * np.cos(np.pi * beta * t) / safe
    val = np.where(near_pole, (np.pi / 4.0) * np.sinc(t), val)
    return val if val.ndim else float(val)


def fractional_taps(tau: float, beta: float, g2):
    """Two-tap split of the relay-2 gain for fractional delay ``tau``.

    Returns (g20, g21) = (p(tau)*g2, p(1-tau)*g2): the weight on the
    current symbol and on the one-sample-older symbol respectively.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"fractional delay must be in [0, Ts], got {tau}")
    return raised_cosine(tau, beta) * g2, raised_cosine(1.0 - tau, beta) * g2


@dataclass(frozen=True)
class DelayProfile:
    """Arrival-time offset of relay 2: d whole symbols plus tau fractional."""

    d: int = 0
    tau: float = 0.0

    def __post_init__(self):
        if self.d < 0:
            raise ValueError(f"integer delay must be >= 0, got {self.d}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"fractional delay must be in [0, Ts], got {self.tau}")


@dataclass
class BlockChannel:
    """Fading coefficients for one transmission block plus derived taps.

    Fields may be scalars or equal-shape arrays (one entry per parallel
    stream).
    """

    q1: np.ndarray
    q2: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    g20: np.ndarray
    g21: np.ndarray


class JakesProcess:
    """Sum-of-sinusoids Rayleigh fading with a J0 autocorrelation profile.

    A randomized-phase quadrant model: M oscillators with arrival angles
    alpha_m = (2*pi*m - pi + theta)/(4*M) and independent uniform phases,
    giving per-sample marginals of unit variance and autocorrelation
    approximately J0(2*pi*fd_ts*lag). ``shape`` adds leading axes of
    independent processes (one per parallel stream).
    """

    def __init__(self, rng: np.random.Generator, fd_ts: float, shape=(), n_osc: int = 32):
        if fd_ts < 0:
            raise ValueError(f"normalized Doppler must be >= 0, got {fd_ts}")
        if n_osc < 16:
            raise ValueError(f"need at least 16 oscillators, got {n_osc}")
        self.fd_ts = fd_ts
        shape = tuple(shape) if not np.isscalar(shape) else (shape,)
        m = np.arange(1, n_osc + 1, dtype=float)
        theta = rng.uniform(-np.pi, np.pi, size=shape + (1,))
        alpha = (2.0 * np.pi * m - np.pi + theta) / (4.0 * n_osc)
        self._cos_alpha = np.cos(alpha)
        self._sin_alpha = np.sin(alpha)
        self._phi = rng.uniform(-np.pi, np.pi, size=shape + (n_osc,))
        self._psi = rng.uniform(-np.pi, np.pi, size=shape + (n_osc,))
        self._scale = 1.0 / np.sqrt(n_osc)

    def sample(self, t) -> np.ndarray:
        """Evaluate the process at times ``t`` (in symbol durations).

        Scalar ``t`` gives shape ``shape``; a length-B array gives
        ``shape + (B,)``.
        """
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        # angle shape: shape + (B, M)
        w = 2.0 * np.pi * self.fd_ts * t[..., :, None]
        re = np.cos(w * self._cos_alpha[..., None, :] + self._phi[..., None, :])
        im = np.cos(w * self._sin_alpha[..., None, :] + self._psi[..., None, :])
        h = self._scale * (re.sum(axis=-1) + 1j * im.sum(axis=-1))
        return h[..., 0] if scalar else h


class BlockChannelSampler:
    """Per-block draws of the four link gains with Jakes evolution.

    One call to :meth:`next_block` advances every process by
    ``block_lag`` symbol durations. The default lag of one symbol per
    block matches block-fading practice for this protocol family: with
    fd_ts = 1e-3 consecutive blocks stay nearly coherent, which the
    differential decoder requires. Set ``block_lag`` to the block length
    in symbols to model literal symbol-rate decorrelation instead.
    """

    def __init__(self, rng: np.random.Generator, fd_ts: float, beta: float,
                 profile: DelayProfile, shape=(), block_lag: float = 1.0,
                 n_osc: int = 32):
        self.profile = profile
        self.beta = beta
        self.block_lag = block_lag
        self._procs = [JakesProcess(rng, fd_ts, shape=shape, n_osc=n_osc)
                       for _ in range(4)]
        self._block_index = 0

    def _assemble(self, q1, q2, g1, g2) -> BlockChannel:
        g20, g21 = fractional_taps(self.profile.tau, self.beta, g2)
        return BlockChannel(q1=q1, q2=q2, g1=g1, g2=g2, g20=g20, g21=g21)

    def next_block(self) -> BlockChannel:
        """Draw the channel for the next transmission block."""
        t = self._block_index * self.block_lag
        self._block_index += 1
        q1, q2, g1, g2 = (p.sample(t) for p in self._procs)
        return self._assemble(q1, q2, g1, g2)

    def block_batch(self, n_blocks: int) -> list:
        """Precompute ``n_blocks`` consecutive block channels at once."""
        q1, q2, g1, g2 = self._sample_span(n_blocks)
        return [self._assemble(q1[..., b], q2[..., b], g1[..., b], g2[..., b])
                for b in range(n_blocks)]

    def block_matrix(self, n_blocks: int) -> BlockChannel:
        """Like :meth:`block_batch` but packed into one BlockChannel whose
        fields carry a trailing block axis; for memoryless schemes."""
        return self._assemble(*self._sample_span(n_blocks))

    def _sample_span(self, n_blocks: int):
        t = (self._block_index + np.arange(n_blocks)) * self.block_lag
        self._block_index += n_blocks
        return tuple(p.sample(t) for p in self._procs)


def awgn(x, n0: float, rng: np.random.Generator) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise of total variance n0.

    Each real dimension carries n0/2. ``n0 = 0`` returns a copy and
    consumes no generator state.
    """
    x = np.asarray(x, dtype=complex)
    if n0 < 0:
        raise ValueError(f"noise variance must be >= 0, got {n0}")
    if n0 == 0:
        return x.copy()
    scale = np.sqrt(n0 / 2.0)
    noise = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
    return x + scale * noise
