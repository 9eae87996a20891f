"""Explicit time-stepper for the space-homogeneous Landau equation.

The field lives on a uniform tensor grid on [-V, V]^3; the equation is
advanced in non-divergence form d_t f = a_bar_ij d_ij f + c_bar f with the
convolution coefficients evaluated spectrally (FFT convolution with the
singular kernel cell-averaged at the origin) and second derivatives by
central differences.  Time stepping is explicit midpoint with the parabolic
step restriction Delta t = cfl * h^2 / (2 d max||a_bar||) refreshed every
step.

The run log records weighted sup norms and the conserved moments each step;
these logs feed the Gronwall-bound and Riccati-envelope checks.
"""

import csv
import struct
from dataclasses import dataclass, field as dc_field
from typing import List

import numpy as np

from .exceptions import RunAbortedError, UnsupportedParameterError
from .util import sphere_area

NEGATIVITY_LIMIT = 1e-12   # relative to max; larger dips abort the run
CONTAINMENT_LIMIT = 1e-8   # boundary-ring mass relative to max

_BIN_MAGIC = b"CKGF"


@dataclass
class GridField:
    """Nonnegative values on the uniform grid v_i = -V + i*h, h = 2V/(n-1)."""

    n: int
    V: float
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n,) * 3:
            raise ValueError("values must be an n^3 array")
        if self.n < 4 or self.V <= 0:
            raise ValueError("need n >= 4 and V > 0")

    @property
    def h(self):
        return 2.0 * self.V / (self.n - 1)

    def axes(self):
        return np.linspace(-self.V, self.V, self.n)

    def check_validity(self):
        mx = float(np.max(self.values))
        neg = float(-min(np.min(self.values), 0.0))
        if mx > 0 and neg > NEGATIVITY_LIMIT * mx:
            raise RunAbortedError(f"negativity {neg:.3e} exceeds limit")
        b = self.values
        ring = max(
            float(np.max(np.abs(b[0]))), float(np.max(np.abs(b[-1]))),
            float(np.max(np.abs(b[:, 0]))), float(np.max(np.abs(b[:, -1]))),
            float(np.max(np.abs(b[:, :, 0]))), float(np.max(np.abs(b[:, :, -1]))),
        )
        if mx > 0 and ring > CONTAINMENT_LIMIT * mx:
            raise RunAbortedError(f"boundary ring value {ring:.3e} breaks containment")
        return neg

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(_BIN_MAGIC)
            fh.write(struct.pack("<iidd", 3, self.n, self.V, self.h))
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            if fh.read(4) != _BIN_MAGIC:
                raise ValueError("not a grid-field file")
            d, n, V, h = struct.unpack("<iidd", fh.read(24))
            if d != 3:
                raise UnsupportedParameterError("grid fields are 3-D")
            vals = np.frombuffer(fh.read(8 * n**3), dtype="<f8").reshape(n, n, n)
        return cls(n=n, V=V, values=vals.copy())


@dataclass
class RunLog:
    """Per-step record of time, weighted sup norms, moments, and negativity."""

    m: float
    gamma: float
    t: List[float] = dc_field(default_factory=list)
    norm_m: List[float] = dc_field(default_factory=list)
    norm_dpg: List[float] = dc_field(default_factory=list)
    mass: List[float] = dc_field(default_factory=list)
    momentum: List[tuple] = dc_field(default_factory=list)
    energy: List[float] = dc_field(default_factory=list)
    negmax: List[float] = dc_field(default_factory=list)

    def append(self, t, nm, ndpg, mass, mom, energy, neg):
        if self.t and t <= self.t[-1]:
            raise ValueError("log times must be strictly increasing")
        self.t.append(t)
        self.norm_m.append(nm)
        self.norm_dpg.append(ndpg)
        self.mass.append(mass)
        self.momentum.append(tuple(mom))
        self.energy.append(energy)
        self.negmax.append(neg)

    def write_csv(self, path):
        with open(path, "w", newline="\n") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t", "norm_m", "norm_dpg", "mass", "px", "py", "pz",
                         "energy", "negmax"])
            for i in range(len(self.t)):
                px, py, pz = self.momentum[i]
                wr.writerow([repr(self.t[i]), repr(self.norm_m[i]),
                             repr(self.norm_dpg[i]), repr(self.mass[i]),
                             repr(px), repr(py), repr(pz),
                             repr(self.energy[i]), repr(self.negmax[i])])


# ---------------------------------------------------------------------------
# Coefficients on the grid


def _offset_grid(n, h):
    k = np.arange(-(n - 1), n) * h
    return np.meshgrid(k, k, k, indexing="ij")


def _kernel_arrays(n, h, gamma):
    """Cell-averaged convolution kernels for a_bar (6 components) and c_bar.

    K_ij(z) = |z|^{2+gamma} (delta_ij - z_i z_j / |z|^2).  At z = 0 the
    angular average of the projection is (d-1)/d * Id and the radial factor
    is averaged over the equal-volume ball of radius a = h (3/(4 pi))^{1/3}.
    """
    X, Y, Z = _offset_grid(n, h)
    r2 = X * X + Y * Y + Z * Z
    center = n - 1
    r2[center, center, center] = 1.0  # placeholder, overwritten below
    r = np.sqrt(r2)
    rad = r ** (2.0 + gamma)
    a_eq = h * (3.0 / (4.0 * np.pi)) ** (1.0 / 3.0)
    rad0 = 3.0 * a_eq ** (2.0 + gamma) / (5.0 + gamma)  # ball average of |z|^{2+gamma}

    comps = {}
    for (i, j, zi, zj) in (("x", "x", X, X), ("y", "y", Y, Y), ("z", "z", Z, Z),
                           ("x", "y", X, Y), ("x", "z", X, Z), ("y", "z", Y, Z)):
        K = rad * ((1.0 if i == j else 0.0) - zi * zj / r2)
        K[center, center, center] = rad0 * (2.0 / 3.0 if i == j else 0.0)
        comps[i + j] = K

    if gamma > -3.0:
        radc = r**gamma
        radc_0 = 3.0 * a_eq**gamma / (3.0 + gamma)
        radc[center, center, center] = radc_0
    else:
        radc = None
    return comps, radc


class _CoefficientEngine:
    """FFT convolutions of the grid field with the Landau kernels.

    Kernel transforms are computed once; each coefficient refresh costs one
    forward transform of the field plus one inverse transform per component.
    """

    def __init__(self, n, h, gamma):
        from scipy.fft import next_fast_len

        self.n, self.h, self.gamma = n, h, gamma
        kernels, c_kernel = _kernel_arrays(n, h, gamma)
        full = 3 * n - 2  # linear convolution length of n with 2n-1
        self.size = next_fast_len(full)
        self.shape = (self.size,) * 3
        lo = n - 1        # center slice of the 'same'-mode output
        self.sl = (slice(lo, lo + n),) * 3
        self.axes = (0, 1, 2)
        self.kernel_hats = {key: np.fft.rfftn(K, self.shape, axes=self.axes)
                            for key, K in kernels.items()}
        self.c_hat = (np.fft.rfftn(c_kernel, self.shape, axes=self.axes)
                      if c_kernel is not None else None)

    def _conv(self, val_hat, kern_hat):
        out = np.fft.irfftn(val_hat * kern_hat, self.shape, axes=self.axes)
        return out[self.sl] * self.h**3

    def coefficients(self, values):
        val_hat = np.fft.rfftn(values, self.shape, axes=self.axes)
        a = {key: self._conv(val_hat, kh) for key, kh in self.kernel_hats.items()}
        if self.gamma == -3.0:
            c = 2.0 * sphere_area(3) * values  # (d-1)|S^2| f = 8 pi f
        else:
            c = 2.0 * (3.0 + self.gamma) * self._conv(val_hat, self.c_hat)
        return a, c


def _second_derivatives(values, h, a):
    """Second differences with zero extension outside the box.

    Pure derivatives are central three-point.  Mixed derivatives use the
    sign-adapted corner stencils (for a_xy >= 0 the (+,+)/(-,-) corners,
    otherwise (+,-)/(-,+)); both are O(h^2) consistent, and the choice makes
    the off-center weights of a : D^2 nonnegative wherever the diffusion
    matrix is diagonally dominant.  The usual four-corner average has O(1)
    negative corner weights and drives steep tails negative.
    """
    p = np.pad(values, 1)
    h2 = h**2
    d = {}
    d["xx"] = (p[2:, 1:-1, 1:-1] - 2 * values + p[:-2, 1:-1, 1:-1]) / h2
    d["yy"] = (p[1:-1, 2:, 1:-1] - 2 * values + p[1:-1, :-2, 1:-1]) / h2
    d["zz"] = (p[1:-1, 1:-1, 2:] - 2 * values + p[1:-1, 1:-1, :-2]) / h2

    faces = {
        "x": p[2:, 1:-1, 1:-1] + p[:-2, 1:-1, 1:-1],
        "y": p[1:-1, 2:, 1:-1] + p[1:-1, :-2, 1:-1],
        "z": p[1:-1, 1:-1, 2:] + p[1:-1, 1:-1, :-2],
    }
    corners = {
        ("xy", +1): p[2:, 2:, 1:-1] + p[:-2, :-2, 1:-1],
        ("xy", -1): p[2:, :-2, 1:-1] + p[:-2, 2:, 1:-1],
        ("xz", +1): p[2:, 1:-1, 2:] + p[:-2, 1:-1, :-2],
        ("xz", -1): p[2:, 1:-1, :-2] + p[:-2, 1:-1, 2:],
        ("yz", +1): p[1:-1, 2:, 2:] + p[1:-1, :-2, :-2],
        ("yz", -1): p[1:-1, 2:, :-2] + p[1:-1, :-2, 2:],
    }
    for key in ("xy", "xz", "yz"):
        fsum = faces[key[0]] + faces[key[1]]
        plus = (2 * values + corners[(key, +1)] - fsum) / (2 * h2)
        minus = -(2 * values + corners[(key, -1)] - fsum) / (2 * h2)
        d[key] = np.where(a[key] >= 0.0, plus, minus)
    return d


def _rhs(values, engine, h):
    a, c = engine.coefficients(values)
    d2 = _second_derivatives(values, h, a)
    out = (a["xx"] * d2["xx"] + a["yy"] * d2["yy"] + a["zz"] * d2["zz"]
           + 2.0 * (a["xy"] * d2["xy"] + a["xz"] * d2["xz"] + a["yz"] * d2["yz"])
           + c * values)
    a_trace = a["xx"] + a["yy"] + a["zz"]
    return out, float(np.max(a_trace)), float(np.max(c))


def _record(log, field, weights_m, weights_dpg, coords, h, neg):
    vals = field.values
    h3 = h**3
    mass = float(np.sum(vals)) * h3
    mom = [float(np.sum(coords[i] * vals)) * h3 for i in range(3)]
    en = float(np.sum((coords[0] ** 2 + coords[1] ** 2 + coords[2] ** 2) * vals)) * h3
    log.append(field.time, float(np.max(weights_m * vals)),
               float(np.max(weights_dpg * vals)), mass, mom, en, neg)


def homog_run(f0, k, q, t_end, cfl, m=5.0):
    """Advance the homogeneous Landau equation from f0 to t_end.

    Returns the RunLog; raises RunAbortedError (with the partial log
    attached) on negativity, containment, or step-size failure.
    """
    if k.operator != "landau" or k.dim != 3:
        raise UnsupportedParameterError("solver supports the 3-D Landau operator only")
    if not 0.0 < cfl < 1.0:
        raise ValueError("cfl must lie in (0, 1)")
    n, h, V = f0.n, f0.h, f0.V
    ax = f0.axes()
    coords = np.meshgrid(ax, ax, ax, indexing="ij")
    brk = np.sqrt(1.0 + coords[0] ** 2 + coords[1] ** 2 + coords[2] ** 2)
    weights_m = brk**m
    weights_dpg = brk ** (3.0 + k.gamma)
    engine = _CoefficientEngine(n, h, k.gamma)

    log = RunLog(m=m, gamma=k.gamma)
    field = GridField(n=n, V=V, values=f0.values.copy(), time=f0.time)
    neg = field.check_validity()
    field.values = np.maximum(field.values, 0.0)
    _record(log, field, weights_m, weights_dpg, coords, h, neg)

    if np.max(field.values) == 0.0:
        return log

    while field.time < t_end - 1e-15:
        rhs0, a_max, c_max = _rhs(field.values, engine, h)
        if a_max <= 0.0:
            raise RunAbortedError("diffusion coefficient vanished", log=log)
        dt = cfl * h * h / (6.0 * a_max)
        if dt < 1e-15:
            raise RunAbortedError("time step underflow", log=log)
        dt = min(dt, t_end - field.time)
        mid = field.values + 0.5 * dt * rhs0
        rhs1, _, _ = _rhs(mid, engine, h)
        new_vals = field.values + dt * rhs1

        old_max = float(np.max(field.values))
        field.values = new_vals
        field.time += dt
        try:
            neg = field.check_validity()
        except RunAbortedError as exc:
            raise RunAbortedError(str(exc), log=log) from None
        field.values = np.maximum(field.values, 0.0)
        # maximum-principle surrogate: growth of the max is reaction-limited
        new_max = float(np.max(field.values))
        slack = 10.0 * (dt * c_max) ** 2 * old_max + 1e-12
        if new_max > (1.0 + dt * c_max) * old_max + slack:
            raise RunAbortedError("maximum grew faster than the reaction bound",
                                  log=log)
        _record(log, field, weights_m, weights_dpg, coords, h, neg)
    return log


# ---------------------------------------------------------------------------
# A priori bound checks


def gronwall_check(log, C, m=None):
    """Exponential a priori bound along a run log.

    Checks norm_m(t) <= norm_m(0) * exp(C * int_0^t norm_dpg ds) at every
    logged time (trapezoidal time integral).  Returns (holds, margins) where
    margins[i] = bound_i - norm_m_i.
    """
    if C <= 0:
        raise ValueError("C must be positive")
    t = np.asarray(log.t)
    y = np.asarray(log.norm_m)
    g = np.asarray(log.norm_dpg)
    integral = np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(t))])
    bound = y[0] * np.exp(C * integral)
    margins = bound - y
    return bool(np.all(margins >= -1e-12 * np.maximum(bound, 1.0))), margins


def riccati_check(log, C, T, rel_tol=1e-9):
    """Pairwise Riccati envelope along the log, plus the blowup lower bound.

    Pairwise: y(t) <= y(s) / (1 - C y(s)(t-s)) for all s < t where the
    denominator is positive (the integrated form of y' <= C y^2).  If the
    denominator hits zero inside the log, the discrete envelope itself blew
    up; this is reported, not an error.  Given a hypothesized blowup time
    T beyond the log, also checks y(s) >= 1/(C(T-s)).

    Returns a dict with keys pairwise_ok, envelope_hit, blowup_rate_ok.
    """
    t = np.asarray(log.t)
    y = np.asarray(log.norm_m)
    dt = t[None, :] - t[:, None]          # (s, t) pairs, positive above diagonal
    denom = 1.0 - C * y[:, None] * dt
    upper = np.triu(np.ones_like(dt, dtype=bool), 1)
    valid = upper & (denom > 0.0)
    env = np.where(valid, y[:, None] / np.where(denom > 0, denom, 1.0), np.inf)
    y_later = np.broadcast_to(y[None, :], dt.shape)
    pairwise_ok = bool(
        np.all(y_later[valid] <= env[valid] * (1.0 + rel_tol) + 1e-300)
    )
    envelope_hit = bool(np.any(upper & (denom <= 0.0)))
    if T > t[-1]:
        lower = 1.0 / (C * (T - t))
        blowup_rate_ok = bool(np.all(y >= lower * (1.0 - rel_tol)))
    else:
        blowup_rate_ok = False
    return {
        "pairwise_ok": pairwise_ok,
        "envelope_hit": envelope_hit,
        "blowup_rate_ok": blowup_rate_ok,
    }


def make_gaussian_grid(n, V, rho=1.0, u=(0.0, 0.0, 0.0), theta=1.0):
    """Sampled Gaussian initial data on the solver grid.

    theta may be a scalar or a 3-vector of per-axis temperatures; the
    anisotropic case gives a non-equilibrium state that relaxes toward the
    Maxwellian with the mean temperature.
    """
    ax = np.linspace(-V, V, n)
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    u = np.asarray(u, dtype=float)
    th = np.broadcast_to(np.asarray(theta, dtype=float), (3,))
    expo = ((X - u[0]) ** 2 / th[0] + (Y - u[1]) ** 2 / th[1]
            + (Z - u[2]) ** 2 / th[2])
    vals = rho * ((2.0 * np.pi) ** 3 * np.prod(th)) ** -0.5 * np.exp(-0.5 * expo)
    gf = GridField(n=n, V=V, values=vals)
    gf.check_validity()  # box must be large enough for the declared temperature
    return gf
