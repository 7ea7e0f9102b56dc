"""Acceptance criteria at default parameters (n, a, b) = (2, 0.25, 0.75).

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary, or directly when this file is run as a script.
"""

import json
import math
import sys

import mpmath as mp
import numpy as np
import pytest

from carleson_ns import cli
from carleson_ns.counterexample import (
    CounterexampleParams,
    ParameterError,
    bbmo_closed_form,
    blim_closed_form,
    blowup_certificate,
    divergence_residual,
    sup_norm_bound,
    synthesize_field,
    synthesize_u1,
    theorem_field,
    validate_params,
)
from carleson_ns.dyadic import DyadicCube, carleson_time_quantity, count_subcubes_bruteforce, fixed_time_bmo_quantity, n_infty
from carleson_ns.meyer import BAND_LO, BAND_MID, TWO_PI, GridSpec, build_profile, inner_product, minimal_points

DEFAULT = CounterexampleParams(2, 0.25, 0.75)
RESULTS: dict[int, str] = {}


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    RESULTS[number] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def profile():
    return build_profile()


def test_criterion_01_spectral_identities(profile):
    xi = np.linspace(BAND_LO, BAND_MID, 10_000)
    o2 = lambda x: profile.omega(x) ** 2
    dil = float(np.max(np.abs(o2(xi) + o2(2 * xi) - 1)))
    ref = float(np.max(np.abs(o2(xi) + o2(TWO_PI - xi) - 1)))
    record(1, "spectral identities", max(dil, ref) <= 1e-12, f"dilation {dil:.2e}, reflection {ref:.2e} (tol 1e-12)")


def test_criterion_02_orthonormality(profile):
    rng = np.random.default_rng(2024)
    worst = 0.0
    pairs = 0
    for n in (1, 2):
        for _ in range(10):
            first = cli._random_index(rng, n)
            second = first if rng.random() < 0.3 else cli._random_index(rng, n, near=first)
            expected = 1.0 if first == second else 0.0
            worst = max(worst, abs(inner_product(profile, first, second) - expected))
            pairs += 1
    record(2, "orthonormality", pairs == 20 and worst <= 1e-6, f"{pairs} pairs, max |<.,.> - delta| {worst:.2e} (tol 1e-6)")


def test_criterion_03_parameter_gate():
    ok = validate_params(2, 0.25, 0.75) == DEFAULT
    names = []
    for args in [(2, 0.25, 0.4), (2, 0.6, 0.9)]:
        try:
            validate_params(*args)
            names.append(None)
        except ParameterError as exc:
            names.append(exc.constraint)
    ok = ok and names == ["b > n/2 + 2a - 1", "0 < a < 1/2"]
    record(3, "parameter gate", ok, f"(2,.25,.75) accepted; rejections name {names}")


def _mp_bbmo(params, j0, m_max=200):
    mp.mp.dps = 40
    n, a, b = params.n, mp.mpf(params.a), mp.mpf(params.b)
    M = max(j0, 1)
    total, G = mp.mpf(0), mp.mpf(0)
    for m in range(M, m_max + 1):
        G += mp.mpf(2) ** ((n - 2 * b) * m)
        lo, hi = mp.mpf(4) ** -(m + 1), mp.mpf(4) ** -m
        total += G * (hi ** (1 - 2 * a) - lo ** (1 - 2 * a)) / (1 - 2 * a)
    return float(total)


def test_criterion_04_carleson_bounded():
    rows = [bbmo_closed_form(DEFAULT, j0) for j0 in range(11)]
    s0 = rows[0].value
    finite = all(math.isfinite(r.value) and r.tail_bound <= 1e-9 * r.value for r in rows)
    oracle = _mp_bbmo(DEFAULT, 0)
    anchor = abs(s0 - 4.8284) <= 1e-3 and abs(oracle - 4.8284) <= 1e-3
    monotone = all(r.value <= s0 * (1 + 1e-12) for r in rows)
    record(4, "Carleson boundedness", finite and anchor and monotone,
           f"S(0) = {s0:.10f} (oracle {oracle:.10f}), max tail/value {max(r.tail_bound / r.value for r in rows):.1e}, "
           f"S(j0) <= S(0) for j0 = 0..10: {monotone}")


def test_criterion_05_norm_inflation():
    cs = [blim_closed_form(DEFAULT, 4.0**-m, 0) for m in range(4, 17)]
    increasing = all(c2 > c1 for c1, c2 in zip(cs, cs[1:]))
    cert = blowup_certificate(DEFAULT, range(4, 17))
    c10 = blim_closed_form(DEFAULT, 4.0**-10, 0)
    ok = increasing and abs(cert.slope - 4 * DEFAULT.a) <= 0.05 and c10 >= 500
    record(5, "norm inflation", ok, f"slope {cert.slope:.5f} (4a = 1, tol 0.05), c(4^-10, 0) = {c10:.4f}")


def test_criterion_06_sup_norm(profile):
    ms = np.arange(1, 13)
    ts = 4.0 ** -ms
    bounds = np.array([sup_norm_bound(DEFAULT, profile, t) for t in ts])
    bounded = bool(np.all(np.isfinite(bounds))) and float(bounds.max()) < 10
    slope = float(np.polyfit(np.log2(ts), np.log2(bounds), 1)[0])
    sandwich = True
    tested = 0
    for m, t, bound in zip(ms, ts, bounds):
        N = minimal_points(int(m), 1.0)
        if N > 2048:
            continue
        u = synthesize_u1(DEFAULT, profile, t, GridSpec(2, 1.0, max(N, 64)))
        sandwich = sandwich and n_infty([u], [t]) <= bound
        tested += 1
    ok = bounded and abs(slope - 0.125) <= 0.05 and sandwich
    record(6, "sup-norm condition", ok,
           f"max bound {bounds.max():.4f}, log2-slope {slope:.4f} (target 0.125 +- 0.05), "
           f"n_infty <= bound on {tested} grids: {sandwich}")


def test_criterion_07_divergence_free(profile):
    worst = 0.0
    for N in (64, 128, 256):
        grid = GridSpec(2, 1.0, N)
        for m in (1, 2, 3):
            worst = max(worst, divergence_residual(synthesize_field(DEFAULT, profile, 4.0**-m, grid), grid))
    record(7, "divergence-free", worst <= 1e-12, f"max relative residual {worst:.2e} on grids 64/128/256 (tol 1e-12)")


def test_criterion_08_oracle_equivalence():
    rng = np.random.default_rng(8)
    th = theorem_field(DEFAULT)
    blim_err = 0.0
    for _ in range(20):
        t = float(4.0 ** -rng.uniform(0.05, 12))
        j0 = int(rng.integers(0, 8))
        a = blim_closed_form(DEFAULT, t, j0)
        b = fixed_time_bmo_quantity(th, t, j0, (0, 0))
        blim_err = max(blim_err, 0.0 if a == b else abs(a - b) / abs(a))
    bbmo_err = 0.0
    for j0 in range(6):
        exact = bbmo_closed_form(DEFAULT, j0).value
        bbmo_err = max(bbmo_err, abs(carleson_time_quantity(th, j0, (0, 0)) - exact) / exact)
    record(8, "oracle equivalence", blim_err <= 1e-12 and bbmo_err <= 1e-9,
           f"blim rel err {blim_err:.1e} (tol 1e-12), bbmo rel err {bbmo_err:.1e} (tol 1e-9)")


def test_criterion_09_cube_count():
    bad = []
    for n in (1, 2):
        root = DyadicCube(1, (1,) * n)
        for d in range(7):
            got = count_subcubes_bruteforce(root, root.j + d, margin=1)
            if got != 2 ** (n * d):
                bad.append((n, d, got))
    record(9, "cube-count brute force", not bad, "all counts equal 2^{n(j-j0)}" if not bad else f"mismatches {bad}")


def test_criterion_10_end_to_end(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    code1 = cli.main(["verify", "--out", str(first)])
    code2 = cli.main(["verify", "--out", str(second)])
    claims = json.loads(first.read_text())["claims"]
    identical = first.read_bytes() == second.read_bytes()
    ok = code1 == 0 and code2 == 0 and list(claims.values()) == ["pass"] * 4 and identical
    record(10, "end-to-end verify", ok, f"exit {code1}/{code2}, claims {claims}, byte-identical {identical}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
