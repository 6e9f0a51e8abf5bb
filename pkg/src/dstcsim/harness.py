"""Monte Carlo experiment engine: configuration, deterministic seeding,
BER estimation with confidence intervals, and CSV emission.

Work is split into fixed-size chunks (a batch of independent streams, each
a reference block plus a run of payload blocks). Chunk random state derives
counter-style from (seed, scheme, tau, P/N0, chunk index), and results are
always folded in chunk order, so a point stops at the same chunk and
produces byte-identical output no matter how many workers ran it.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .baselines import ConventionalLink, coherent_block
from .channel import BlockChannelSampler, DelayProfile
from .modem import get_constellation
from .pipeline import OfdmDstcLink
from .power import PowerAllocation

SCHEMES = ("proposed", "conventional", "coherent")

BER_CSV_HEADER = "scheme,tau_over_Ts,p_over_n0_db,payload_bits,bit_errors,ber,ci95"


class ConfigError(ValueError):
    """Invalid simulation configuration (CLI exit code 2)."""


@dataclass
class SimConfig:
    """Flat simulation configuration; field names match CLI flags 1:1."""

    scheme: str = "proposed"
    n: int = 64                      # subcarriers per sub-block
    cp: int = 1                      # cyclic prefix length L
    constellation: str = "bpsk"
    beta: float = 0.9                # pulse roll-off
    tau: float = 0.0                 # fractional delay, units of Ts
    delay_int: int = 0               # whole-symbol delay d
    doppler: float = 1e-3            # normalized Doppler fD*Ts
    snr_db: tuple = (20.0,)          # P/N0 grid in dB
    split: tuple = (0.5, 0.25)       # (P0/P, Pr/P)
    seed: int = 0
    min_errors: int = 200
    max_bits: int = 2_000_000
    workers: int = 1
    noiseless: bool = False
    decoder: str = "auto"
    # fading advance per block, in symbol durations; 1.0 keeps consecutive
    # blocks nearly coherent at doppler=1e-3, which differential decoding needs
    block_lag: float = 1.0
    streams_per_chunk: int = 0       # 0 -> per-scheme default
    blocks_per_stream: int = 0       # payload blocks; 0 -> per-scheme default

    def validate(self) -> "SimConfig":
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError(f"tau must be in [0, 1], got {self.tau}")
        if self.delay_int < 0:
            raise ConfigError(f"delay_int must be >= 0, got {self.delay_int}")
        if self.scheme == "proposed" and self.cp <= self.delay_int:
            raise ConfigError(
                f"cyclic prefix {self.cp} must exceed integer delay {self.delay_int}"
            )
        if self.scheme == "coherent" and (self.tau != 0.0 or self.delay_int != 0):
            raise ConfigError("the coherent benchmark assumes perfect alignment")
        if len(self.snr_db) == 0:
            raise ConfigError("snr_db grid must not be empty")
        if len(self.split) != 2 or min(self.split) <= 0 or sum(self.split) > 1.0 + 1e-12:
            raise ConfigError(f"bad power split {self.split}")
        if self.min_errors < 1 or self.max_bits < 1:
            raise ConfigError("min_errors and max_bits must be positive")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.doppler < 0:
            raise ConfigError(f"doppler must be >= 0, got {self.doppler}")
        get_constellation(self.constellation)  # raises on unknown names
        return self

    def chunk_geometry(self):
        """(streams, payload blocks, payload bits) for one chunk.

        Streams default to several fading coherence times long
        (~100 blocks at doppler 1e-3) so each stream samples the fading
        distribution rather than freezing in one draw.
        """
        const = get_constellation(self.constellation)
        if self.scheme == "proposed":
            streams = self.streams_per_chunk or 16
            blocks = self.blocks_per_stream or 250
            sym_per_block = 2 * self.n
        else:
            streams = self.streams_per_chunk or 512
            blocks = self.blocks_per_stream or 300
            sym_per_block = 2
        bits = streams * blocks * sym_per_block * const.bits_per_symbol
        return streams, blocks, bits


@dataclass
class BerPoint:
    """One measured operating point plus per-stream statistics.

    ``ci95`` is the binomial normal-approximation half-width; the
    per-stream (cluster) sums feed the robust two-proportion test, which
    block fading requires because errors arrive in bursts.
    """

    scheme: str
    tau: float
    p_over_n0_db: float
    payload_bits: int
    bit_errors: int
    ber: float
    ci95: float
    n_streams: int = 0
    stream_err_sq_sum: float = 0.0
    bits_per_stream: int = 0

    def csv_row(self) -> str:
        return (
            f"{self.scheme},{self.tau:.9g},{self.p_over_n0_db:.9g},"
            f"{self.payload_bits},{self.bit_errors},{self.ber:.9g},{self.ci95:.9g}"
        )

    def robust_se(self) -> float:
        """Cluster-robust standard error of the BER estimate."""
        n, b = self.n_streams, self.bits_per_stream
        if n < 2 or b == 0:
            return float("inf")
        mean_err = self.bit_errors / n
        var_err = (self.stream_err_sq_sum - n * mean_err**2) / (n - 1)
        return float(np.sqrt(max(var_err, 0.0) / n) / b)


def two_proportion_z(a: BerPoint, b: BerPoint) -> float:
    """z statistic for equality of two BER estimates.

    Uses per-stream variances rather than the binomial formula: fading
    makes bit errors strongly clustered within a stream, so the binomial
    standard error would understate the true one severalfold.
    """
    se = np.hypot(a.robust_se(), b.robust_se())
    if se == 0:
        return 0.0
    return float((a.ber - b.ber) / se)


def _chunk_seed(cfg: SimConfig, tau: float, snr_db: float, chunk_idx: int):
    scheme_id = SCHEMES.index(cfg.scheme)
    tau_q = int(round(tau * 1_000_000))
    snr_q = int(round(snr_db * 1000)) + 1_000_000
    return np.random.SeedSequence(
        [int(cfg.seed), scheme_id, tau_q, snr_q, int(chunk_idx)]
    )


def _run_chunk(cfg: SimConfig, tau: float, snr_db: float, chunk_idx: int):
    """Simulate one chunk; returns (per-stream error counts, payload bits)."""
    const = get_constellation(cfg.constellation)
    streams, blocks, chunk_bits = cfg.chunk_geometry()
    alloc = PowerAllocation.from_snr_db(
        snr_db, split=cfg.split, noiseless=cfg.noiseless
    )
    profile = DelayProfile(cfg.delay_int, tau)
    ss = _chunk_seed(cfg, tau, snr_db, chunk_idx)
    jakes_rng, noise_rng, data_rng = (np.random.default_rng(s) for s in ss.spawn(3))
    sampler = BlockChannelSampler(
        jakes_rng, fd_ts=cfg.doppler, beta=cfg.beta, profile=profile,
        shape=(streams,), block_lag=cfg.block_lag, n_osc=16,
    )
    errors = np.zeros(streams, dtype=np.int64)

    if cfg.scheme == "coherent":
        # memoryless scheme: run every (stream, block) cell in one shot
        ch = sampler.block_matrix(blocks)
        l1 = data_rng.integers(0, const.size, (streams, blocks))
        l2 = data_rng.integers(0, const.size, (streams, blocks))
        d1, d2 = coherent_block(l1, l2, ch, alloc, const, noise_rng,
                                noiseless=cfg.noiseless)
        per_cell = const.bit_errors(l1, d1) + const.bit_errors(l2, d2)
        return errors + per_cell.sum(axis=-1), chunk_bits

    channels = sampler.block_batch(blocks + 1)
    if cfg.scheme == "proposed":
        link = OfdmDstcLink(
            cfg.n, cfg.cp, const, alloc, profile, batch_shape=(streams,),
            decoder=cfg.decoder, noiseless=cfg.noiseless,
        )
        label_shape = (streams, cfg.n)
    else:
        link = ConventionalLink(const, alloc, batch_shape=(streams,),
                                noiseless=cfg.noiseless)
        label_shape = (streams,)
    link.transmit(None, None, channels[0], noise_rng)
    for ch in channels[1:]:
        l1 = data_rng.integers(0, const.size, label_shape)
        l2 = data_rng.integers(0, const.size, label_shape)
        d1, d2 = link.transmit(l1, l2, ch, noise_rng)
        blk_err = const.bit_errors(l1, d1) + const.bit_errors(l2, d2)
        errors += blk_err if blk_err.ndim == 1 else blk_err.sum(axis=-1)
    return errors, chunk_bits


def _chunk_job(args):
    return _run_chunk(*args)


def run_point(cfg: SimConfig, tau: float = None, snr_db: float = None) -> BerPoint:
    """Estimate the BER of one operating point.

    Streams chunks through the scheme until ``min_errors`` bit errors or
    ``max_bits`` payload bits, whichever first. The result is a pure
    function of (cfg, tau, snr_db) regardless of ``workers``.
    """
    cfg.validate()
    tau = cfg.tau if tau is None else tau
    snr_db = cfg.snr_db[0] if snr_db is None else snr_db
    if cfg.scheme == "coherent" and tau != 0.0:
        raise ConfigError("the coherent benchmark assumes perfect alignment")
    streams, _, chunk_bits = cfg.chunk_geometry()
    max_chunks = max(1, -(-cfg.max_bits // chunk_bits))

    total_err = 0
    total_bits = 0
    err_sq = 0.0
    n_streams = 0

    def fold(result):
        nonlocal total_err, total_bits, err_sq, n_streams
        stream_errors, bits = result
        total_err += int(stream_errors.sum())
        total_bits += bits
        err_sq += float(np.sum(stream_errors.astype(float) ** 2))
        n_streams += len(stream_errors)
        return total_err >= cfg.min_errors or total_bits >= cfg.max_bits

    if cfg.workers == 1:
        for idx in range(max_chunks):
            if fold(_run_chunk(cfg, tau, snr_db, idx)):
                break
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            window = cfg.workers * 2
            pending = {}
            submitted = 0
            next_fold = 0
            stopped = False
            while next_fold < max_chunks and not stopped:
                while submitted < min(max_chunks, next_fold + window):
                    pending[submitted] = pool.submit(
                        _chunk_job, (cfg, tau, snr_db, submitted)
                    )
                    submitted += 1
                result = pending.pop(next_fold).result()
                stopped = fold(result)
                next_fold += 1
            for fut in pending.values():
                fut.cancel()

    ber = total_err / total_bits if total_bits else 0.0
    ci = 1.96 * np.sqrt(ber * (1.0 - ber) / total_bits) if total_bits else 0.0
    return BerPoint(
        scheme=cfg.scheme, tau=tau, p_over_n0_db=snr_db,
        payload_bits=total_bits, bit_errors=total_err, ber=ber, ci95=float(ci),
        n_streams=n_streams, stream_err_sq_sum=err_sq,
        bits_per_stream=chunk_bits // streams,
    )


def run_sweep(cfg: SimConfig, schemes=None, taus=None) -> list:
    """Cartesian sweep over schemes x delays x the P/N0 grid.

    The coherent benchmark only ever runs at tau = 0.
    """
    cfg.validate()
    schemes = list(schemes) if schemes else [cfg.scheme]
    taus = list(taus) if taus is not None else [cfg.tau]
    points = []
    for scheme in schemes:
        scheme_taus = [0.0] if scheme == "coherent" else taus
        for tau in scheme_taus:
            point_cfg = replace(cfg, scheme=scheme, tau=tau).validate()
            for snr in cfg.snr_db:
                points.append(run_point(point_cfg, tau=tau, snr_db=snr))
    return points


def format_ber_csv(points) -> str:
    lines = [BER_CSV_HEADER] + [p.csv_row() for p in points]
    return "\n".join(lines) + "\n"


def write_ber_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_ber_csv(points))


def read_config_file(path) -> dict:
    """Parse a flat key=value config file (# comments, blank lines ok)."""
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, val = (part.strip() for part in line.split("=", 1))
                values[key] = val
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


_LIST_FIELDS = {"snr_db", "split"}
_BOOL_FIELDS = {"noiseless"}


def build_config(file_values: dict = None, overrides: dict = None) -> SimConfig:
    """Defaults <- config file <- explicit overrides, with type coercion."""
    cfg = SimConfig()
    known = {f.name: f.type for f in fields(SimConfig)}
    merged = dict(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    out = {}
    for key, val in merged.items():
        if key not in known:
            raise ConfigError(f"unknown configuration key {key!r}")
        if not isinstance(val, str):
            out[key] = val
            continue
        try:
            if key in _LIST_FIELDS:
                out[key] = tuple(float(part) for part in val.split(",") if part)
            elif key in _BOOL_FIELDS:
                out[key] = val.lower() in ("1", "true", "yes", "on")
            elif known[key] in ("int", int):
                out[key] = int(val)
            elif known[key] in ("float", float):
                out[key] = float(val)
            else:
                out[key] = val
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {val!r}") from exc
    return replace(cfg, **out).validate()
