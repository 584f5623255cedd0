"""Acceptance criteria, one test each, at their stated tolerances and time budgets.

Every test records a ``PASS``/``FAIL`` line (plus informational lines) that
is printed in the terminal summary.
"""

import csv
import json
import subprocess
import sys
import time
import warnings
from contextlib import contextmanager

import numpy as np
import pytest

from edbsw import baselines, dwt2d, edgecore, filterbank, metrics, morphology, pipeline, splinecore, synthetic
from edbsw import samples_dir

import oracles


@contextmanager
def _clock(box):
    t0 = time.perf_counter()
    yield
    box.append(time.perf_counter() - t0)


def _record(log, number, title, ok, elapsed, budget, detail):
    verdict = "PASS" if ok else "FAIL"
    timing = f"{elapsed:.2f}s" if budget is None else f"{elapsed:.2f}s of {budget}s"
    log.append(f"criterion {number} {verdict}: {title} [{detail}; {timing}]")


def _psnr(x, y):
    return 10 * np.log10(1.0 / np.mean((x - y) ** 2))


def test_criterion_1_filter_bank(acceptance_log):
    box = []
    with _clock(box):
        w = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        analytic = {}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for L in (4, 5, 6, 7):
                n_star = L - splinecore.N_PRIMAL
                pr = (splinecore.eval_H(w) * splinecore.eval_Hstar(w, n_star)
                      + splinecore.eval_H(w + np.pi) * splinecore.eval_Hstar(w + np.pi, n_star))
                analytic[L] = float(np.max(np.abs(pr - 1.0)))
        rng = np.random.default_rng(1)
        images = [rng.random((64, 64)) for _ in range(10)]
        psnrs = {}
        for L in (4, 5, 6, 7):
            bank = filterbank.derive_bcssw(L=L)[0]
            psnrs[L] = min(_psnr(dwt2d.idwt2(dwt2d.dwt2(x, bank), bank), x) for x in images)
    analytic_ok = all(v < 1e-8 for v in analytic.values())
    # the default bank is the 15-tap L=4 one; other L are reported below
    psnr_ok = psnrs[4] >= 60.0
    ok = analytic_ok and psnr_ok and box[0] < 10
    detail = f"max analytic PR dev {max(analytic.values()):.1e}, default bank min PSNR {psnrs[4]:.1f} dB"
    _record(acceptance_log, 1, "filter-bank PR and round trip", ok, box[0], 10, detail)
    acceptance_log.append(
        "  info: 15-tap min PSNR by L: " + ", ".join(f"L={L} {v:.1f} dB" for L, v in psnrs.items())
    )
    assert analytic_ok, analytic
    assert psnr_ok, psnrs
    assert box[0] < 10


def test_criterion_2_exact_round_trip(acceptance_log):
    box = []
    haar = filterbank.standard_bank("haar")
    with _clock(box):
        rng = np.random.default_rng(2)
        err = 0.0
        for _ in range(20):
            x = rng.random((32, 32))
            err = max(err, float(np.max(np.abs(dwt2d.idwt2(dwt2d.dwt2(x, haar), haar) - x))))
        dec = dwt2d.dwt2(np.full((32, 32), 0.37), haar)
        detail_max = max(float(np.max(np.abs(b))) for b in dec.details)
    ok = err < 1e-10 and detail_max < 1e-10 and box[0] < 5
    _record(acceptance_log, 2, "Haar identity and constant image", ok, box[0], 5,
            f"round-trip err {err:.1e}, constant detail max {detail_max:.1e}")
    assert err < 1e-10 and detail_max < 1e-10 and box[0] < 5


def test_criterion_3_spline_identities(acceptance_log):
    box = []
    with _clock(box):
        rng = np.random.default_rng(3)
        t = rng.uniform(-20, 20, 100)
        unity = sum(splinecore.eval_bspline3(t - k) for k in range(-25, 26))
        unity_err = float(np.max(np.abs(unity - 1.0)))
        w = rng.uniform(-3.0, 3.0, 100)
        ratio = splinecore.eval_spline_ft(2 * w) / splinecore.eval_spline_ft(w)
        ratio_err = float(np.max(np.abs(splinecore.eval_H(w) - ratio)))
        at_zero = splinecore.eval_spline_ft(0.0)
    ok = unity_err < 1e-12 and ratio_err < 1e-10 and at_zero == 1.0
    _record(acceptance_log, 3, "spline identities", ok, box[0], None,
            f"unity err {unity_err:.1e}, H ratio err {ratio_err:.1e}, S^(0) = {at_zero!r}")
    assert unity_err < 1e-12 and ratio_err < 1e-10
    assert at_zero == 1.0


def test_criterion_4_nms_threshold_oracles(acceptance_log):
    box = []
    with _clock(box):
        rng = np.random.default_rng(4)
        nms_bad = thr_bad = 0
        for _ in range(50):
            m = rng.random((16, 16))
            a = rng.uniform(-np.pi / 2, np.pi / 2, (16, 16))
            nms_bad += int(np.count_nonzero(edgecore.nms(m, a) != oracles.nms_bruteforce(m, a)))
            got = edgecore.adaptive_threshold(m) != 0
            thr_bad += int(np.count_nonzero(got != (m > (m.max() + m.min()) / 2)))
    ok = nms_bad == 0 and thr_bad == 0
    _record(acceptance_log, 4, "NMS and threshold oracles", ok, box[0], None,
            f"{nms_bad} NMS and {thr_bad} threshold mismatches over 50 fields")
    assert nms_bad == 0 and thr_bad == 0


def test_criterion_5_morphology_laws(acceptance_log):
    box = []
    elements = morphology.builtin_elements()
    with _clock(box):
        rng = np.random.default_rng(5)
        idem_bad = ext_bad = 0
        for _ in range(30):
            # 8-bit intensities in sixteenth steps, far from the clamp range:
            # every weight addition is then exact, so the laws hold bit for bit
            g = rng.integers(60 * 16, 190 * 16, (24, 24)) / 16.0
            for el in elements:
                once = morphology.opening(g, el, clip=None)
                twice = morphology.opening(once, el, clip=None)
                inner = (slice(4, -4), slice(4, -4))
                idem_bad += int(np.count_nonzero(twice[inner] != once[inner]))
                ext_bad += int(np.count_nonzero(once[inner] > g[inner]))
        recon_ok = True
        for _ in range(20):
            mask = rng.random((12, 12))
            marker = rng.random((12, 12)) * mask
            for method in ("erosion", "dilation"):
                out = morphology.reconstruct(marker, mask, method=method, max_iter=mask.size)
                step = morphology.erode if method == "erosion" else morphology.dilate
                again = np.minimum(step(out, morphology.FLAT3, clip=None), mask)
                recon_ok &= bool(np.all(out <= mask)) and np.array_equal(again, out)
    ok = idem_bad == 0 and ext_bad == 0 and recon_ok
    _record(acceptance_log, 5, "morphology laws", ok, box[0], None,
            f"{idem_bad} idempotence and {ext_bad} extensivity violations, reconstruction ok={recon_ok}")
    assert idem_bad == 0 and ext_bad == 0 and recon_ok


def _square_scores(seed, gt_mode):
    clean = synthetic.square(128)
    img = synthetic.add_gaussian_noise(clean, 0.1, seed=seed)
    truth = synthetic.edge_mask(clean, gt_mode)
    cfg = pipeline.PipelineConfig()
    full = pipeline.edbsw_detect(img, cfg, keep_trace=False)[0]
    scores = {
        "edbsw": metrics.mse(full, truth),
        "sobel": metrics.mse(baselines.sobel(img), truth),
        "wtmm": metrics.mse(baselines.wtmm(img, bank=cfg.bank()), truth),
    }
    for name, switches in (("woI", ("disable_branch1",)), ("woIII", ("disable_selector",)),
                           ("woI-II", ("disable_branch1", "disable_branch2"))):
        scores[name] = metrics.mse(pipeline.ablate(img, cfg.with_ablation(*switches)), truth)
    entropies = {"edbsw": metrics.entropy(full), "sobel": metrics.entropy(baselines.sobel(img))}
    return scores, entropies


def test_criterion_6_synthetic_square(acceptance_log):
    margin = 1e-4
    box = []
    with _clock(box):
        scores, ent = _square_scores(0, "inner")
    e = scores["edbsw"]
    a_ok = scores["sobel"] - e >= margin and scores["wtmm"] - e >= margin
    b_ok = all(scores[v] - e >= margin for v in ("woI", "woIII", "woI-II"))
    c_ok = 0 < ent["edbsw"] < 1 and ent["edbsw"] - ent["sobel"] >= margin
    ok = a_ok and b_ok and c_ok and box[0] < 60
    detail = ", ".join(f"{k} {v:.5f}" for k, v in scores.items())
    _record(acceptance_log, 6, "noisy square MSE/ablation/entropy", ok, box[0], 60,
            f"MSE {detail}; entropy edbsw {ent['edbsw']:.4f} sobel {ent['sobel']:.4f}")

    # informational only: how robust the ordering is beyond the fixed seed
    seeds = []
    for seed in range(1, 8):
        s, _ = _square_scores(seed, "inner")
        seeds.append(f"{seed}:{'ok' if s['woIII'] - s['edbsw'] >= margin else 'no'}")
    acceptance_log.append("  info: woIII margin >= 1e-4 by seed: " + " ".join(seeds))
    thick, _ = _square_scores(0, "thick")
    acceptance_log.append(
        "  info: two-pixel ground truth: " + ", ".join(f"{k} {v:.5f}" for k, v in thick.items())
    )
    assert a_ok, scores
    assert b_ok, scores
    assert c_ok, ent
    assert box[0] < 60


def test_criterion_7_metric_oracles(acceptance_log):
    box = []
    with _clock(box):
        rng = np.random.default_rng(7)
        psnr_err = 0.0
        for _ in range(20):
            a, b = rng.random((16, 16)), rng.random((16, 16))
            m = metrics.mse(a, b)
            psnr_err = max(psnr_err, abs(metrics.psnr(a, b) - 10 * np.log10(1 / m)))
        x = rng.random((32, 32))
        ssim_err = abs(metrics.ssim(x, x) - 1.0)
        half = np.zeros((16, 16))
        half[:, :8] = 0.5
        ent_err = abs(metrics.entropy(half) - 1.0)
    ok = psnr_err < 1e-10 and ssim_err < 1e-12 and ent_err < 1e-12
    _record(acceptance_log, 7, "metric oracles", ok, box[0], None,
            f"psnr err {psnr_err:.1e}, ssim err {ssim_err:.1e}, entropy err {ent_err:.1e}")
    assert psnr_err < 1e-10 and ssim_err < 1e-12 and ent_err < 1e-12


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "edbsw.cli", *args], capture_output=True, text=True)


def test_criterion_8_cli(acceptance_log, tmp_path):
    box = []
    wavelets = ["bcssw", "haar"]
    with _clock(box):
        images = sorted((samples_dir() / "set").glob("*.png"))
        tables = []
        for name in ("a.csv", "b.csv"):
            proc = _cli("compare", str(samples_dir() / "set"), "--gt-dir", str(samples_dir() / "set_gt"),
                        "--wavelets", ",".join(wavelets), "-o", str(tmp_path / name))
            assert proc.returncode == 0, proc.stderr
            with open(tmp_path / name, newline="") as fh:
                tables.append(list(csv.reader(fh)))
        proc = _cli("filters", "--wavelet", "bcssw", "--L", "4")
        doc = json.loads(proc.stdout)
    expected = len(images) * 5 * len(wavelets)
    rows_ok = all(len(t) - 1 == expected for t in tables)
    det_ok = [r[:7] for r in tables[0]] == [r[:7] for r in tables[1]]
    schema_ok = (
        proc.returncode == 0
        and all(isinstance(doc[k], list) and len(doc[k]) == doc["taps"]
                for k in ("synthesis_low", "analysis_low"))
        and all(isinstance(doc[k + "_start"], int) for k in ("synthesis_low", "analysis_high"))
        and doc["L"] == 4
    )
    screen_ok = doc["pr_max_deviation"] < filterbank.PR_SCREEN
    ok = rows_ok and det_ok and schema_ok and screen_ok and box[0] < 30
    _record(acceptance_log, 8, "CLI end to end", ok, box[0], 30,
            f"{len(tables[0]) - 1} of {expected} rows, deterministic={det_ok}, "
            f"filters PR dev {doc['pr_max_deviation']:.2e}")
    assert rows_ok and det_ok and schema_ok and screen_ok
    assert box[0] < 30
