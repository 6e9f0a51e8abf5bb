"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its measured numbers (run with -s to see them inline).

Budgets are sized so the statistical criteria have comfortable margins at
the pinned master seed; everything here is deterministic, including the
multiprocess runs.
"""

import numpy as np
import pytest

from dstcsim.analysis import snr_surface, tap_power_c
from dstcsim.channel import BlockChannel, DelayProfile, fractional_taps
from dstcsim.harness import (
    SimConfig,
    format_ber_csv,
    run_point,
    run_sweep,
    two_proportion_z,
)
from dstcsim.modem import (
    diff_decode_decoupled_labels,
    diff_decode_joint_labels,
    get_constellation,
)
from dstcsim.pipeline import (
    destination_decode,
    relay_process,
    relay_receive,
    source_encode,
    superpose_at_destination,
)
from dstcsim.power import PowerAllocation

BETA = 0.9
WORKERS = 2


def _report(criterion, passed, detail):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def _ber_point(scheme, tau, snr_db, max_bits, **kw):
    cfg = SimConfig(scheme=scheme, min_errors=10**9, max_bits=int(max_bits),
                    workers=WORKERS, **kw)
    return run_point(cfg, tau=tau, snr_db=snr_db)


def _log_crossing(curve, target=1e-3):
    """P/N0 where the curve crosses ``target``, log-linear between points."""
    snrs = sorted(curve)
    for lo, hi in zip(snrs, snrs[1:]):
        a, b = curve[lo], curve[hi]
        if a >= target >= b:
            frac = (np.log10(target) - np.log10(a)) / (np.log10(b) - np.log10(a))
            return lo + frac * (hi - lo)
    raise AssertionError(f"BER curve does not bracket {target}: {curve}")


class TestCriterion1ZeroNoiseExactness:
    def test_ofdm_scheme_removes_isi_exactly(self):
        taus = [round(0.1 * i, 1) for i in range(11)]
        total_bits = 0
        for n in (4, 16, 64):
            for tau in taus:
                cfg = SimConfig(
                    scheme="proposed", n=n, cp=1, delay_int=0, tau=tau,
                    noiseless=True, doppler=0.0, seed=101,
                    streams_per_chunk=25, blocks_per_stream=41,
                    min_errors=1, max_bits=1,
                )
                point = run_point(cfg, tau=tau, snr_db=25.0)
                assert point.bit_errors == 0, (n, tau, point.bit_errors)
                assert point.payload_bits == 25 * 41 * 2 * n
                total_bits += point.payload_bits
        _report(1, True, f"BER exactly 0 over {total_bits} noiseless payload "
                         f"bits (N in 4/16/64, tau grid 0..1, static channels)")


class TestCriterion2NoiseVarianceBridge:
    def test_analytical_variance_matches_pipeline(self):
        n = 16
        cp = 1
        blocks = 100_000
        streams, steps = 500, blocks // 500
        const = get_constellation("bpsk")
        alloc = PowerAllocation.from_snr_db(15.0)
        amp = alloc.a * np.sqrt(2 * alloc.p0)
        ch_rng = np.random.default_rng(77)
        q1, q2, g1, g2 = (
            ch_rng.standard_normal() + 1j * ch_rng.standard_normal()
            for _ in range(4)
        )
        worst = {}
        for tau in (0.0, 0.3, 0.5):
            g20, g21 = fractional_taps(tau, BETA, g2)
            ch = BlockChannel(q1=q1, q2=q2, g1=g1, g2=g2, g20=g20, g21=g21)
            profile = DelayProfile(0, tau)
            idx = np.arange(n)
            h1 = q1 * g1
            h2 = (np.conj(q2) * (g20 + g21 * np.exp(-2j * np.pi * idx / n)))
            rng = np.random.default_rng(int(tau * 10) + 5)
            data_rng = np.random.default_rng(int(tau * 10) + 6)
            s1 = np.ones((streams, n), dtype=complex)
            s2 = np.zeros((streams, n), dtype=complex)
            acc = np.zeros(n)
            count = 0
            tail = None
            for _ in range(steps):
                l1 = data_rng.integers(0, 2, (streams, n))
                l2 = data_rng.integers(0, 2, (streams, n))
                s1, s2, sub1, sub2 = source_encode(
                    const.points[l1], const.points[l2], s1, s2
                )
                r = relay_receive(sub1, sub2, q1, q2, alloc, rng)
                x = relay_process(*r, alloc, cp)
                rx1, rx2, tail = superpose_at_destination(
                    *x, ch, profile, cp, alloc.n0, rng, tail=tail
                )
                _, _, y = destination_decode(rx1, rx2, None, const, cp)
                signal = np.stack([
                    amp * (h1 * s1 - h2 * np.conj(s2)),
                    amp * (h1 * s2 + h2 * np.conj(s1)),
                ], axis=-1)
                w = y - signal
                acc += np.sum(np.abs(w) ** 2, axis=(0, 2))
                count += 2 * streams
            measured = acc / count
            c = tap_power_c(idx, tau, BETA, n)
            sigma2 = alloc.n0 * (
                1 + alloc.a**2 * (abs(g1) ** 2 + abs(g2) ** 2 * c)
            )
            rel = np.max(np.abs(measured - sigma2) / sigma2)
            worst[tau] = rel
            assert rel < 0.02, (tau, rel)
        _report(2, True, "max |measured - analytic| / analytic per subcarrier: "
                + ", ".join(f"tau={t}: {r:.3%}" for t, r in worst.items()))


class TestCriterion3SnrSurface:
    def test_surface_reproduces_closed_form_geometry(self):
        n = 64
        surf = snr_surface(n_subcarriers=n, p_over_n0_db=25.0, tau_count=33)
        # (a) flat tau=0 row at the independently derived plateau
        p = 10.0 ** 2.5
        a2 = (p / 4.0) / (p / 2.0 + 1.0)
        plateau = 10 * np.log10(a2 * (p / 2.0) * 2.0 / (1.0 + 2.0 * a2))
        assert abs(plateau - 18.97) <= 0.01
        assert np.max(np.abs(surf.gamma_db[0] - plateau)) < 1e-9
        # (b) exact tau <-> Ts - tau symmetry
        rows = len(surf.taus)
        for i in range(rows):
            assert np.array_equal(surf.gamma_db[i], surf.gamma_db[rows - 1 - i])
        # (c) per-row minimum at the half-band index (off-by-one tolerated)
        for i, tau in enumerate(surf.taus):
            if 0.0 < tau < 1.0:
                assert int(np.argmin(surf.gamma_db[i])) in (n // 2 - 1, n // 2)
        # (d) global minimum on the tau = 0.5 row
        assert surf.taus[np.argmin(surf.gamma_db) // n] == 0.5
        _report(3, True, f"plateau {plateau:.4f} dB flat at tau=0, rows "
                         f"mirror-exact, minima at n=N/2, global min at 0.5 Ts")


class TestCriterion4DelaySymmetryPairs:
    def test_mirrored_delays_statistically_equal(self):
        budgets = {15.0: 4e6, 20.0: 8e6, 25.0: 1.6e7}
        details = []
        for lo, hi in ((0.2, 0.8), (0.4, 0.6)):
            for snr, bits in budgets.items():
                a = _ber_point("proposed", lo, snr, bits)
                b = _ber_point("proposed", hi, snr, bits)
                assert min(a.bit_errors, b.bit_errors) >= 200
                z = two_proportion_z(a, b)
                details.append(f"tau {lo}/{hi} @{snr:g}dB z={z:+.2f}")
                assert abs(z) < 3.0, (lo, hi, snr, a.ber, b.ber, z)
        _report(4, True, "; ".join(details))


class TestCriterion5SynchronizedEquivalence:
    def test_ofdm_scheme_matches_conventional_at_zero_offset(self):
        prop_bits = {15.0: 4e6, 20.0: 8e6, 25.0: 4.8e7}
        conv_bits = {15.0: 2e6, 20.0: 4e6, 25.0: 8e6}
        details = []
        for snr in (15.0, 20.0, 25.0):
            a = _ber_point("proposed", 0.0, snr, prop_bits[snr])
            b = _ber_point("conventional", 0.0, snr, conv_bits[snr])
            assert min(a.bit_errors, b.bit_errors) >= 200
            z = two_proportion_z(a, b)
            details.append(
                f"@{snr:g}dB prop={a.ber:.3e} conv={b.ber:.3e} z={z:+.2f}"
            )
            assert abs(z) < 3.0, (snr, a.ber, b.ber, z)
        _report(5, True, "; ".join(details))


class TestCriterion6BaselineErrorFloor:
    def test_conventional_floor_and_degradation_ratio(self):
        conv20 = _ber_point("conventional", 0.4, 20.0, 6e6)
        conv30 = _ber_point("conventional", 0.4, 30.0, 6e6)
        prop30 = _ber_point("proposed", 0.4, 30.0, 4e7)
        gap_ok = conv30.ber >= 10.0 * prop30.ber
        floor_ok = conv30.ber > 0.5 * conv20.ber
        _report(
            6, floor_ok and gap_ok,
            f"conv BER(20)={conv20.ber:.4g}, BER(30)={conv30.ber:.4g} "
            f"(ratio {conv30.ber / conv20.ber:.3f} vs required >0.5); "
            f"proposed BER(30)={prop30.ber:.4g} "
            f"(conv/proposed {conv30.ber / prop30.ber:.1f}x vs required >=10x)"
        )
        assert conv30.ber >= 10.0 * prop30.ber
        # the floor level stabilizes ~2x below BER(20 dB) in this model, so
        # the 0.5 factor is expected to read FAIL; see the decisions ledger
        assert floor_ok, (
            f"BER(30dB)={conv30.ber:.4g} is not > 0.5*BER(20dB)="
            f"{0.5 * conv20.ber:.4g}: the tau=0.4 floor sits at ~0.44x "
            f"of the 20 dB value (ledger: criterion-6 analysis)"
        )


class TestCriterion7CoherentGap:
    def test_gap_at_target_ber_close_to_three_db(self):
        prop = {}
        for snr, bits in ((24.0, 8e7), (26.0, 1.4e8), (28.0, 2.0e8)):
            prop[snr] = _ber_point("proposed", 0.0, snr, bits).ber
        coh = {}
        for snr, bits in ((22.0, 1.2e7), (24.0, 2.0e7), (26.0, 2.4e7)):
            coh[snr] = _ber_point("coherent", 0.0, snr, bits).ber
        cross_prop = _log_crossing(prop)
        cross_coh = _log_crossing(coh)
        gap = cross_prop - cross_coh
        ok = 2.5 <= gap <= 3.5
        _report(7, ok, f"BER=1e-3 at {cross_prop:.2f} dB (differential OFDM) "
                       f"vs {cross_coh:.2f} dB (coherent): gap {gap:.2f} dB")
        assert ok, (cross_prop, cross_coh, gap)


class TestCriterion8DiversityOrder:
    def test_high_snr_slope_near_two(self):
        pts = {}
        for snr, bits in ((20.0, 1.6e7), (25.0, 6e7), (30.0, 1.6e8)):
            pts[snr] = _ber_point("proposed", 0.0, snr, bits).ber
        x = np.array(sorted(pts)) / 10.0
        y = np.log10([pts[s] for s in sorted(pts)])
        slope = np.polyfit(x, y, 1)[0]
        ok = -2.5 <= slope <= -1.6
        _report(8, ok, "log10(BER) vs (P/N0)/10 slope over 20-30 dB: "
                       f"{slope:.2f} (points: "
                + ", ".join(f"{s:g}dB={pts[s]:.2e}" for s in sorted(pts)) + ")")
        assert ok, (slope, pts)


class TestCriterion9DecoderEquivalence:
    @pytest.mark.parametrize("name", ["bpsk", "qpsk"])
    def test_decoupled_matches_joint_on_100k_inputs(self, name):
        const = get_constellation(name)
        rng = np.random.default_rng(991)
        n = 100_000
        # half pure-noise vectors, half noisy differential observations
        y_prev = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
        y_now = np.empty_like(y_prev)
        y_now[: n // 2] = (
            rng.standard_normal((n // 2, 2)) + 1j * rng.standard_normal((n // 2, 2))
        )
        l1 = rng.integers(0, const.size, n - n // 2)
        l2 = rng.integers(0, const.size, n - n // 2)
        v1, v2 = const.points[l1], const.points[l2]
        norm = np.sqrt(np.abs(v1) ** 2 + np.abs(v2) ** 2)
        b1, b2 = y_prev[n // 2:, 0], y_prev[n // 2:, 1]
        y_now[n // 2:, 0] = (v1 * b1 - np.conj(v2) * b2) / norm
        y_now[n // 2:, 1] = (v2 * b1 + np.conj(v1) * b2) / norm
        y_now[n // 2:] += 0.5 * (
            rng.standard_normal((n - n // 2, 2))
            + 1j * rng.standard_normal((n - n // 2, 2))
        )
        j1, j2 = diff_decode_joint_labels(y_now, y_prev, const)
        d1, d2 = diff_decode_decoupled_labels(y_now, y_prev, const)
        agree = np.mean((j1 == d1) & (j2 == d2))
        assert agree == 1.0, f"{name}: agreement {agree:.6f}"
        _report(9, True, f"{name}: joint and decoupled decoders agree on all "
                         f"{n} random noisy inputs")


class TestCriterion10Determinism:
    def test_identical_csv_bytes_for_1_and_8_workers(self):
        outputs = []
        for workers in (1, 8):
            cfg = SimConfig(
                scheme="proposed", n=16, snr_db=(10.0, 12.0), seed=4242,
                min_errors=80, max_bits=300_000, workers=workers,
                streams_per_chunk=8, blocks_per_stream=25,
            )
            points = run_sweep(cfg, taus=(0.0, 0.3))
            outputs.append(format_ber_csv(points).encode())
        ok = outputs[0] == outputs[1]
        _report(10, ok, f"sweep CSV identical for 1 vs 8 workers "
                        f"({len(outputs[0])} bytes)")
        assert ok
