"""Acceptance suite: one test per release criterion.

Each test prints a single "acceptance NN ... PASS/FAIL" line (visible
with -s or in captured output) and the -v run itself gives the
per-criterion verdict.  Tolerances are pinned in the assertions.
"""
import time

import numpy as np
import pytest

from fixture_pairs import ALL_PAIRS
from oracles import fsimc_reference

from lumen.cli import main as cli_main
from lumen.core import EnhanceParams, RgbImage, to_value_map
from lumen.enhance import (
    CENTERED_WEIGHTS,
    clahe,
    enhance_pm,
    hist_equalize,
    lanczos3_resize,
    tw_weight,
)
from lumen.fsim import fsimc
from lumen.harness import synthetic_suite
from lumen.metrics import hue_deviation, luma, ssim


def report(num, label, ok, detail=""):
    verdict = "PASS" if ok else "FAIL"
    print(f"acceptance {num:02d} ({label}): {verdict} {detail}".rstrip())
    assert ok, f"acceptance {num:02d} ({label}) failed {detail}"


def flat(value, side=16):
    return RgbImage(np.full((side, side, 3), value))


def radial_hue_field(side=48):
    """Constant-hue vignette whose values stay low enough that no
    intermediate pixel reaches the clamp."""
    yy, xx = np.mgrid[0:side, 0:side]
    center = (side - 1) / 2.0
    r = np.hypot(yy - center, xx - center) / np.hypot(center, center)
    v = 0.05 + 0.44 * (1.0 - r)
    return RgbImage(np.stack([v, 0.6 * v, 0.3 * v], axis=2))


def test_01_flat_gain_exactness():
    start = time.perf_counter()
    worst = 0.0
    for v in (0.1, 0.2, 0.3):
        out = enhance_pm(flat(v)).image.pixels
        worst = max(worst, float(np.abs(out - 1.5 * v).max()))
    out_bright = enhance_pm(flat(0.5)).image.pixels
    worst_bright = float(np.abs(out_bright - 0.75).max())
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and worst_bright <= 1e-9 and elapsed < 1.0
    report(1, "flat-gain exactness", ok,
           f"dark err {worst:.2e}, bright err {worst_bright:.2e}, {elapsed:.3f}s")


def test_02_region_boundary_continuity():
    algebra_ok = all(abs(3.0 / b - 2.0) <= 0.07 for b in (1.45, 1.475, 1.50))
    exact_at_top = (3.0 / 1.5 - 2.0) == 0.0
    v_dark, v_bright = 0.4 - 1e-6, 0.4 + 1e-6
    worst = 0.0
    for beta in (1.45, 1.475, 1.50):
        params = EnhanceParams(delta=0.4, beta=beta, omega=0.025)
        dark_out = enhance_pm(flat(v_dark), params).image.pixels[0, 0, 0]
        bright_out = enhance_pm(flat(v_bright), params).image.pixels[0, 0, 0]
        worst = max(worst, abs(dark_out - bright_out))
    images_ok = worst <= 0.07 * 0.4
    report(2, "region-boundary continuity",
           algebra_ok and exact_at_top and images_ok,
           f"max branch jump {worst:.4f} (cap {0.07 * 0.4:.4f})")


def test_03_monotone_gain_decay():
    params = EnhanceParams(delta=0.4, beta=1.475, omega=0.025)
    gains = [sum(tw_weight(n, k, CENTERED_WEIGHTS, params) for n in range(1, 5))
             for k in range(1, 4)]
    expected = [3.0 / 1.475, 3.0 / 1.5, 3.0 / 1.525]
    decreasing = all(a > b for a, b in zip(gains, gains[1:]))
    matches = all(abs(g - e) <= 1e-12 for g, e in zip(gains, expected))
    report(3, "monotone gain decay", decreasing and matches,
           "gains " + ", ".join(f"{g:.6f}" for g in gains))


def test_04_hue_preservation():
    ref = radial_hue_field()
    out = enhance_pm(ref).image
    score = hue_deviation(ref, out)
    ok = score.ok() and score.value <= 1e-6
    report(4, "hue preservation", ok,
           f"mean deviation {score.value:.2e} degrees" if score.ok()
           else f"error {score.error}")


def test_05_no_overexposure_ceiling():
    battery = [img for _, img in synthetic_suite(6)]
    for _, make_pair in ALL_PAIRS:
        battery += [RgbImage(px) for px in make_pair()]
    rng = np.random.default_rng(77)
    battery.append(RgbImage(rng.uniform(0.0, 1.0, (32, 32, 3))))
    worst = -np.inf
    for img in battery:
        out = enhance_pm(img).image.pixels
        worst = max(worst, float((out - (1.0 + img.pixels) / 2.0).max()))
    report(5, "no-overexposure ceiling", worst <= 1e-9,
           f"max excess over (1+ref)/2 is {worst:.2e}")


def test_06_metric_identities():
    suite = [img for _, img in synthetic_suite(3)]
    id_ok = all(abs(ssim(img, img).value - 1.0) <= 1e-6 and
                abs(fsimc(img, img).value - 1.0) <= 1e-6 for img in suite)
    a, b = suite[0], suite[1]
    sym_gap = abs(ssim(a, b).value - ssim(b, a).value)
    report(6, "metric identities", id_ok and sym_gap <= 1e-9,
           f"ssim symmetry gap {sym_gap:.2e}")


def test_07_fsimc_oracle_regression():
    worst = 0.0
    for _, make_pair in ALL_PAIRS:
        ref_px, test_px = make_pair()
        ours = fsimc(RgbImage(ref_px), RgbImage(test_px)).value
        other = fsimc_reference(ref_px, test_px)
        worst = max(worst, abs(ours - other))
    report(7, "fsimc second-implementation agreement", worst <= 1e-3,
           f"max gap {worst:.2e}")


def test_08_ordering_reproduction():
    start = time.perf_counter()
    suite = synthetic_suite(5)
    wins = 0
    for _, img in suite:
        ref = img
        pm_out = enhance_pm(ref).image
        he_out = hist_equalize(ref).image
        cl_out = clahe(ref, 12, 0.01).image
        pm_s, he_s, cl_s = (ssim(ref, x).value for x in (pm_out, he_out, cl_out))
        pm_f, he_f, cl_f = (fsimc(ref, x).value for x in (pm_out, he_out, cl_out))
        if pm_s > he_s and pm_s > cl_s and pm_f > he_f and pm_f > cl_f:
            wins += 1
    elapsed = time.perf_counter() - start
    report(8, "ordering over baselines", wins == 5 and elapsed < 30.0,
           f"{wins}/5 vignettes, {elapsed:.1f}s")


def test_09_brightening_direction():
    checked = 0
    ok = True
    for _, img in synthetic_suite(6):
        if float(to_value_map(img).values.mean()) >= 0.6:
            continue
        checked += 1
        before = float(luma(img).mean())
        after = float(luma(enhance_pm(img).image).mean())
        ok = ok and after > before
    report(9, "brightening of dark frames", ok and checked >= 5,
           f"{checked} qualifying vignettes")


def test_10_benchmark_determinism(tmp_path, monkeypatch):
    blobs = []
    for run, threads in enumerate(("2", "2", "6")):
        monkeypatch.setenv("LUMEN_THREADS", threads)
        out = tmp_path / f"rep{run}.csv"
        code = cli_main(["bench", "--synthetic", "4", "--methods",
                         "pm,he,clahe", "--metrics", "ssim,fsimc",
                         "--out", str(out)])
        assert code == 0
        blobs.append(out.read_bytes())
    ok = blobs[0] == blobs[1] == blobs[2]
    report(10, "byte-identical benchmark output", ok,
           f"{len(blobs[0])} bytes per report")


def test_11_baseline_sanity():
    vals = (np.arange(256, dtype=np.float64) / 255.0).reshape(16, 16)
    ramp = RgbImage(np.stack([vals] * 3, axis=2))
    step = 1.0 / 255.0
    he_out = hist_equalize(ramp).image.pixels
    he_gap = float(np.abs(he_out - ramp.pixels).max())
    cl_out = clahe(ramp, 16, 1.0).image.pixels
    cl_gap = float(np.abs(cl_out - he_out).max())
    ok = he_gap <= step + 1e-12 and cl_gap <= step + 1e-12
    report(11, "equalization baseline sanity", ok,
           f"he vs identity {he_gap:.6f}, clahe vs he {cl_gap:.6f}")


def test_12_lanczos_identity():
    noisy = RgbImage(np.random.default_rng(3).uniform(0.0, 1.0, (20, 24, 3)))
    same = lanczos3_resize(noisy, 1.0).pixels
    id_gap = float(np.abs(same - noisy.pixels).max())
    const = flat(0.35, side=10)
    grown = lanczos3_resize(const, 3.0).pixels
    const_gap = float(np.abs(grown - 0.35).max())
    ok = id_gap <= 1e-9 and const_gap <= 1e-12
    report(12, "resampler identity and fixed point", ok,
           f"scale-1 gap {id_gap:.2e}, constant gap {const_gap:.2e}")
