import csv

import numpy as np
import pytest

from collkit import (
    GridField,
    KernelSpec,
    RunAbortedError,
    RunLog,
    UnsupportedParameterError,
    gronwall_check,
    homog_run,
    riccati_check,
)
from collkit.solver import make_gaussian_grid


@pytest.fixture(scope="module")
def k_coulomb():
    return KernelSpec(dim=3, gamma=-3.0, operator="landau")


def grid_moments(gf):
    ax = gf.axes()
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    h3 = gf.h**3
    mass = float(np.sum(gf.values)) * h3
    mom = np.array([float(np.sum(c * gf.values)) * h3 for c in (X, Y, Z)])
    energy = float(np.sum((X**2 + Y**2 + Z**2) * gf.values)) * h3
    return mass, mom, energy


# ---------------------------------------------------------------------------
# GridField


def test_gridfield_shape_validation():
    with pytest.raises(ValueError):
        GridField(n=8, V=4.0, values=np.zeros((8, 8, 7)))
    with pytest.raises(ValueError):
        GridField(n=3, V=4.0, values=np.zeros((3, 3, 3)))


def test_gridfield_save_load_roundtrip(tmp_path):
    gf = make_gaussian_grid(n=12, V=5.0, theta=0.5)
    path = tmp_path / "field.ckgf"
    gf.save(path)
    back = GridField.load(path)
    assert back.n == gf.n and back.V == gf.V
    assert np.array_equal(back.values, gf.values)


def test_gridfield_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.ckgf"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError):
        GridField.load(path)


def test_check_validity_negativity():
    vals = np.zeros((8, 8, 8))
    vals[4, 4, 4] = 1.0
    vals[3, 3, 3] = -1e-6
    gf = GridField(n=8, V=4.0, values=vals)
    with pytest.raises(RunAbortedError):
        gf.check_validity()


def test_check_validity_containment():
    vals = np.zeros((8, 8, 8))
    vals[4, 4, 4] = 1.0
    vals[0, 2, 2] = 1e-4  # boundary plane
    gf = GridField(n=8, V=4.0, values=vals)
    with pytest.raises(RunAbortedError):
        gf.check_validity()


def test_make_gaussian_grid_moments():
    gf = make_gaussian_grid(n=24, V=6.0, rho=2.0, theta=0.5)
    mass, mom, energy = grid_moments(gf)
    assert mass == pytest.approx(2.0, rel=1e-6)
    assert np.allclose(mom, 0.0, atol=1e-12)
    assert energy == pytest.approx(2.0 * 3.0 * 0.5, rel=1e-6)


def test_make_gaussian_grid_anisotropic():
    gf = make_gaussian_grid(n=24, V=6.0, theta=(0.3, 0.5, 0.7))
    ax = gf.axes()
    X = np.meshgrid(ax, ax, ax, indexing="ij")[0]
    h3 = gf.h**3
    # per-axis second moment recovers the per-axis temperature
    t0 = float(np.sum(X**2 * gf.values)) * h3
    assert t0 == pytest.approx(0.3, rel=1e-6)


def test_make_gaussian_grid_rejects_leaky_box():
    # temperature too large for the box: boundary ring visibly nonzero
    with pytest.raises(RunAbortedError):
        make_gaussian_grid(n=16, V=3.0, theta=2.0)


# ---------------------------------------------------------------------------
# RunLog


def test_runlog_monotone_times():
    log = RunLog(m=5.0, gamma=-3.0)
    log.append(0.0, 1.0, 1.0, 1.0, (0, 0, 0), 1.0, 0.0)
    with pytest.raises(ValueError):
        log.append(0.0, 1.0, 1.0, 1.0, (0, 0, 0), 1.0, 0.0)


def test_runlog_csv_roundtrip(tmp_path):
    log = RunLog(m=5.0, gamma=-3.0)
    log.append(0.0, 0.59, 0.61, 1.0, (1e-16, 0.0, -2e-16), 1.5, 0.0)
    log.append(0.01, 0.58, 0.60, 1.0001, (0.0, 0.0, 0.0), 1.4999, 1e-13)
    path = tmp_path / "runlog.csv"
    log.write_csv(path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["t"] for r in rows] == ["0.0", "0.01"]
    # repr round-trips floats exactly
    assert float(rows[0]["px"]) == 1e-16
    assert float(rows[1]["negmax"]) == 1e-13


# ---------------------------------------------------------------------------
# Gronwall / Riccati checks


def synthetic_log(t, y, g):
    log = RunLog(m=5.0, gamma=-3.0)
    for ti, yi, gi in zip(t, y, g):
        log.append(float(ti), float(yi), float(gi), 1.0, (0, 0, 0), 1.0, 0.0)
    return log


def test_gronwall_exact_exponential():
    C, g0 = 2.0, 0.7
    t = np.linspace(0.0, 1.0, 50)
    y = 1.3 * np.exp(C * g0 * t)
    log = synthetic_log(t, y, np.full_like(t, g0))
    holds, margins = gronwall_check(log, C)
    assert holds
    assert np.max(np.abs(margins)) < 1e-4  # trapezoid is exact for constant g
    holds_small, margins_small = gronwall_check(log, 0.9 * C)
    assert not holds_small
    assert margins_small[-1] < 0.0


def test_gronwall_rejects_bad_constant():
    log = synthetic_log([0.0, 1.0], [1.0, 1.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        gronwall_check(log, 0.0)


def test_riccati_exact_trajectory():
    C, y0 = 3.0, 0.5
    T = 1.0 / (C * y0)
    t = np.linspace(0.0, 0.8 * T, 40)
    y = y0 / (1.0 - C * y0 * t)
    log = synthetic_log(t, y, np.zeros_like(t))
    out = riccati_check(log, C, T, rel_tol=1e-12)
    assert out["pairwise_ok"]
    assert out["blowup_rate_ok"]
    assert not out["envelope_hit"]


def test_riccati_detects_super_riccati_growth():
    # growth faster than the C-envelope must fail the pairwise check
    C, y0 = 1.0, 0.5
    t = np.linspace(0.0, 0.8, 20)
    y = y0 / (1.0 - 2.0 * y0 * t)  # true constant 2C
    log = synthetic_log(t, y, np.zeros_like(t))
    out = riccati_check(log, C, T=10.0)
    assert not out["pairwise_ok"]


# ---------------------------------------------------------------------------
# Time stepping


def test_homog_run_argument_validation(q_fast, k_coulomb):
    gf = make_gaussian_grid(n=8, V=4.0, theta=0.3)
    with pytest.raises(ValueError):
        homog_run(gf, k_coulomb, q_fast, t_end=0.01, cfl=1.5)
    k_b = KernelSpec(dim=3, gamma=0.0, operator="boltzmann",
                     b=lambda x: np.ones_like(np.asarray(x, dtype=float)))
    with pytest.raises(UnsupportedParameterError):
        homog_run(gf, k_b, q_fast, t_end=0.01, cfl=0.1)


def test_homog_run_conservation_and_positivity(q_fast, k_coulomb):
    gf = make_gaussian_grid(n=16, V=5.0, theta=(0.3, 0.45, 0.6))
    log = homog_run(gf, k_coulomb, q_fast, t_end=0.002, cfl=0.02, m=5.0)
    assert len(log.t) >= 3
    assert log.t[-1] == pytest.approx(0.002, abs=1e-12)
    # moments drift only at the truncation level
    assert abs(log.mass[-1] - log.mass[0]) <= 1e-3 * log.mass[0]
    assert np.max(np.abs(np.asarray(log.momentum))) <= 1e-10
    assert abs(log.energy[-1] - log.energy[0]) <= 1e-3 * log.energy[0]
    # positivity preserved up to the clip threshold
    peak = float(np.max(gf.values))
    assert max(log.negmax) <= 1e-12 * peak


def test_homog_run_zero_field_is_stationary(q_fast, k_coulomb):
    gf = GridField(n=8, V=4.0, values=np.zeros((8, 8, 8)))
    log = homog_run(gf, k_coulomb, q_fast, t_end=0.01, cfl=0.1)
    assert log.norm_m == [0.0]
