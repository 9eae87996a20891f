"""Quadrature building blocks and reproducibility helpers.

All node/weight constructors here are deterministic: identical arguments
produce bit-identical arrays, which is what makes downstream artifacts
byte-reproducible.
"""

import numpy as np

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(seed, n):
    """Generate ``n`` uniform floats in [0, 1) from a 64-bit seed.

    Splitmix-style generator; the recurrence is fixed so that sweeps are
    reproducible across implementations and platforms.
    """
    state = seed & _MASK64
    out = np.empty(n, dtype=float)
    for i in range(n):
        state = (state + _SPLITMIX_GAMMA) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z = z ^ (z >> 31)
        out[i] = (z >> 11) / float(1 << 53)
    return out


def gauss_panel(a, b, n):
    """Gauss-Legendre nodes/weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * (x + 1.0) + a, 0.5 * (b - a) * w


def graded_panels(a, b, n_panels, n_per_panel, ratio=3.0):
    """Composite Gauss rule on [a, b] with power-graded panels toward ``a``.

    Panel edges a + (b-a) * (k/n)^ratio accumulate at ``a`` to resolve a
    power singularity there, while every panel still shrinks as n_panels
    grows, so the rule converges on the whole interval under refinement.
    """
    if not (b > a >= 0.0):
        raise ValueError(f"bad panel interval [{a}, {b}]")
    k = np.arange(n_panels + 1, dtype=float)
    edges = a + (b - a) * (k / n_panels) ** ratio
    xs, ws = [], []
    gx, gw = np.polynomial.legendre.leggauss(n_per_panel)
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (hi - lo) * (gx + 1.0) + lo)
        ws.append(0.5 * (hi - lo) * gw)
    return np.concatenate(xs), np.concatenate(ws)


def geometric_panels(a, b, n_panels, n_per_panel):
    """Composite Gauss rule on [a, b] > 0 with logarithmically spaced panel edges.

    Used for long algebraic tails: each panel covers a constant factor in radius.
    """
    if not (b > a > 0.0):
        raise ValueError(f"geometric panels need 0 < a < b, got [{a}, {b}]")
    edges = np.geomspace(a, b, n_panels + 1)
    xs, ws = [], []
    gx, gw = np.polynomial.legendre.leggauss(n_per_panel)
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (hi - lo) * (gx + 1.0) + lo)
        ws.append(0.5 * (hi - lo) * gw)
    return np.concatenate(xs), np.concatenate(ws)


def sphere_rule(dim, n_polar, n_azim):
    """Product quadrature on the unit sphere S^{dim-1}.

    For dim == 3: Gauss-Legendre in cos(theta) times a uniform (trapezoidal)
    azimuth rule; exact for spherical harmonics up to high degree.
    For dim == 2: uniform nodes on the circle.

    Returns (points, weights) with points of shape (N, dim) and
    sum(weights) == |S^{dim-1}|.
    """
    if dim == 2:
        ang = (np.arange(n_azim) + 0.5) * 2.0 * np.pi / n_azim
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        w = np.full(n_azim, 2.0 * np.pi / n_azim)
        return pts, w
    if dim == 3:
        ct, wct = np.polynomial.legendre.leggauss(n_polar)
        phi = (np.arange(n_azim) + 0.5) * 2.0 * np.pi / n_azim
        st = np.sqrt(1.0 - ct**2)
        pts = np.stack(
            [
                st[:, None] * np.cos(phi)[None, :],
                st[:, None] * np.sin(phi)[None, :],
                np.broadcast_to(ct[:, None], (n_polar, n_azim)),
            ],
            axis=-1,
        ).reshape(-1, 3)
        w = (wct[:, None] * (2.0 * np.pi / n_azim) * np.ones(n_azim)).reshape(-1)
        return pts, w
    raise ValueError(f"sphere_rule supports dim 2 or 3, got {dim}")


def orthonormal_complement(normals):
    """Per-row orthonormal pairs (e1, e2) spanning the plane orthogonal to each normal.

    ``normals`` has shape (N, 3), rows unit length.  Deterministic choice of frame.
    """
    normals = np.atleast_2d(normals)
    helper = np.where(
        np.abs(normals[:, 2:3]) < 0.9,
        np.array([0.0, 0.0, 1.0]),
        np.array([1.0, 0.0, 0.0]),
    )
    e1 = np.cross(normals, helper)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(normals, e1)
    return e1, e2


def bracket(v):
    """<v> = sqrt(1 + |v|^2), with v of shape (..., d) or scalar radius."""
    v = np.asarray(v, dtype=float)
    if v.ndim == 0:
        return float(np.sqrt(1.0 + v * v))
    return np.sqrt(1.0 + np.sum(v * v, axis=-1))


def sphere_area(dim):
    """Surface measure |S^{dim-1}|."""
    from scipy.special import gamma as _g

    return 2.0 * np.pi ** (dim / 2.0) / _g(dim / 2.0)
