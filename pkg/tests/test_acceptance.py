"""Acceptance criteria. Each test records one PASS/FAIL line in the summary.

Operating points (Eb/N0, rate-1/2 BPSK, 60 BP iterations with early
stopping) were pinned from pilot runs: the plain (4096, 2048) code and the
coupled setup 2 are both near BER 1e-3 at 2.0 dB. Monte Carlo criteria take
tens of minutes in total.
"""
import itertools
import math

import numpy as np
import pytest

from polaraug import bp
from polaraug.channel import ChannelPoint, StopRule, System, run_point
from polaraug.cli import main
from polaraug.codec import assemble_input, encode, encode_matrix_oracle
from polaraug.construction import construct, polarize_step
from polaraug.coupling import build_setup, decode_augmented, encode_augmented

SNR_MID = 2.0
SNR_LOW = 1.75
MC_RULE = StopRule(min_frame_errors=100, max_frames=400_000)
SEED = 2024
OPERATING_BAND = (3e-4, 3e-3)


def _ci_text(res):
    lo, hi = res.ber_interval()
    return f"BER {res.ber:.3e} [{lo:.3e}, {hi:.3e}] ({res.frame_errors} FE / {res.frames} frames)"


_cache = {}


def simulate(name, snr, seed=SEED):
    key = (name, snr, seed)
    if key not in _cache:
        if name == "plain":
            system = System(construct(4096, 2048), early_stop=True)
        else:
            sid, coupled = int(name[5]), not name.endswith("u")
            system = System(build_setup(sid), early_stop=True, coupled=coupled)
        _cache[key] = run_point(system, ChannelPoint(snr, "EbN0", system.rate), MC_RULE, seed)
    return _cache[key]


def crossing_snr(lo, hi, target=1e-3):
    """SNR where the log-linear BER line through two points meets ``target``."""
    slope = (math.log10(hi.ber) - math.log10(lo.ber)) / (hi.point.snr_db - lo.point.snr_db)
    return lo.point.snr_db + (math.log10(target) - math.log10(lo.ber)) / slope


def test_c1_complexity(criterion):
    got = [bp.pe_count([4096])] + [bp.pe_count(build_setup(i).lengths) for i in (1, 2, 3)]
    ok = got == [24576, 25600, 17408, 22272]
    criterion(1, "processing-element counts", ok, str(got))
    assert ok


def test_c2_parameters(criterion):
    specs = [build_setup(i) for i in (1, 2, 3)]
    totals = [(s.total_k, s.total_n, s.rate) for s in specs]
    rates = [s.code_rates() for s in specs]
    expected_rates = [
        {"aux": [128 / 256], "inner": [(1920 + 256) / 4096]},
        {"aux": [128 / 256], "inner": [(960 + 256 / 2) / 2048, (448 + 256 / 2) / 1024]},
        {"aux": [64 / 128] * 4, "inner": [(448 + 128 / 2 + 128 / 2) / 1024] * 4},
    ]
    ok = totals == [(2048, 4096, 0.5), (1536, 3072, 0.5), (2048, 4096, 0.5)] and rates == expected_rates
    criterion(2, "setup parameters and rates", ok, str(totals))
    assert ok


def test_c3_encoder_oracle(criterion):
    ok = True
    for N in (1, 2, 4, 8, 16):
        us = np.array(list(itertools.product([0, 1], repeat=N)), dtype=np.uint8)
        ok &= np.array_equal(encode(us), encode_matrix_oracle(us))
    rng = np.random.default_rng(3)
    for N in (32, 256, 1024):
        us = rng.integers(0, 2, (10_000, N), dtype=np.uint8)
        ok &= np.array_equal(encode(us), encode_matrix_oracle(us))
    criterion(3, "butterfly encoder == Kronecker matrix", ok)
    assert ok


def test_c4_construction_properties(criterion):
    zs = np.random.default_rng(4).random(100_000)
    zs[:2] = (0.0, 1.0)
    worst = 0.0
    ordered = True
    for z in zs:
        zm, zp = polarize_step(float(z))
        worst = max(worst, abs(zm + zp - 2 * z))
        ordered &= zp <= z <= zm
    ok = worst <= 1e-12 and ordered
    criterion(4, "polarization step conservation and ordering", ok, f"max |z- + z+ - 2z| = {worst:.1e}")
    assert ok


def test_c5_noiseless_roundtrip(criterion):
    rng = np.random.default_rng(5)
    failures = []
    for N in (8, 64, 1024):
        spec = construct(N, N // 2)
        info = rng.integers(0, 2, (100, spec.k_info), dtype=np.uint8)
        x = encode(assemble_input(spec, info))
        u_hat, _ = bp.bp_decode(spec, bp.FROZEN_LLR * (1 - 2.0 * x))
        if not np.array_equal(u_hat[:, list(spec.info_set)], info):
            failures.append(f"plain {N}")
    for sid in (1, 2, 3):
        spec = build_setup(sid)
        info = rng.integers(0, 2, (100, spec.total_k), dtype=np.uint8)
        got, _ = decode_augmented(spec, bp.FROZEN_LLR * (1 - 2.0 * encode_augmented(spec, info)))
        if not np.array_equal(got, info):
            failures.append(f"setup {sid}")
    criterion(5, "noiseless round trip, 100 frames each", not failures, ", ".join(failures))
    assert not failures


def test_c6_coupling_gain(criterion):
    coupled = simulate("setup2", SNR_MID)
    uncoupled = simulate("setup2u", SNR_MID)
    in_band = OPERATING_BAND[0] <= coupled.ber <= OPERATING_BAND[1]
    enough = min(coupled.frame_errors, uncoupled.frame_errors) >= 100
    separated = coupled.ber_interval()[1] < uncoupled.ber_interval()[0]
    ok = in_band and enough and separated
    criterion(6, "setup 2 coupled beats uncoupled", ok,
              f"coupled {_ci_text(coupled)}; uncoupled {_ci_text(uncoupled)}")
    assert ok


def test_c7_serial_augmentation_gain(criterion):
    plain_mid, plain_low = simulate("plain", SNR_MID), simulate("plain", SNR_LOW)
    s1_mid, s1_low = simulate("setup1", SNR_MID), simulate("setup1", SNR_LOW)
    in_band = OPERATING_BAND[0] <= plain_mid.ber <= OPERATING_BAND[1]
    enough = min(r.frame_errors for r in (plain_mid, plain_low, s1_mid, s1_low)) >= 100
    separated = s1_mid.ber_interval()[1] < plain_mid.ber_interval()[0]
    offset = crossing_snr(plain_low, plain_mid) - crossing_snr(s1_low, s1_mid)
    ok = in_band and enough and separated and offset > 0
    criterion(7, "setup 1 beats plain N=4096 near BER 1e-3", ok,
              f"plain {_ci_text(plain_mid)}; setup1 {_ci_text(s1_mid)}; crossing offset {offset:+.3f} dB")
    assert ok


def test_c8_ring_similar_to_plain(criterion):
    plain = simulate("plain", SNR_MID)
    ring = simulate("setup3", SNR_MID)
    ratio = max(ring.ber, plain.ber) / max(min(ring.ber, plain.ber), 1e-300)
    ok = ratio <= 3.0
    criterion(8, "setup 3 BER within 3x of plain N=4096", ok,
              f"plain {_ci_text(plain)}; setup3 {_ci_text(ring)}; ratio {ratio:.2f}")
    assert ok


def test_c9_determinism(criterion, tmp_path):
    outputs = []
    base = ["simulate", "--snr", "1.5", "2.5", "--min-frame-errors", "10", "--max-frames", "300",
            "--seed", "9", "--early-stop"]
    for system in (["--plain", "--n", "256", "--k", "128"], ["--setup", "2"]):
        files = []
        for i, (bs, workers) in enumerate([(64, 1), (64, 1), (5, 4), (300, 2)]):
            out = tmp_path / f"{system[1]}_{i}.csv"
            args = base + system + ["--batch-size", str(bs), "--workers", str(workers), "-o", str(out)]
            if system[0] == "--setup":
                args[args.index("300")] = "40"
            assert main(args) == 0
            files.append(out.read_bytes())
        outputs.append(all(f == files[0] for f in files))
    ok = all(outputs)
    criterion(9, "byte-identical CSV across reruns and parallelism", ok)
    assert ok
