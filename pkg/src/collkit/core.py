"""Domain types shared by every operator module.

Velocity fields are black-box evaluators with declared polynomial decay.
The comparison barrier equals ``alpha * |v|**-m`` outside the half ball and
is glued with a C^2 radial polynomial inside.  The weight bracket is always
``<v> = sqrt(1 + |v|^2)``; no alternative weight family is configurable.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .exceptions import (
    CapabilityError,
    EvaluationError,
    KernelRejectionError,
    UnsupportedParameterError,
)
from .util import bracket, sphere_area, sphere_rule


@dataclass(frozen=True)
class VelocityField:
    """A nonnegative function on d-dimensional velocity space.

    ``eval`` maps an array of shape (..., dim) to values of shape (...).
    ``decay_exponent`` and ``amplitude`` declare the pointwise bound
    ``f(v) <= amplitude * <v>**-decay_exponent``; they are metadata used for
    truncation-error estimates and are spot-checked, not enforced.
    ``inner_void_radius``, when set, declares f == 0 on the open ball of
    that radius.

    Instances are immutable; all evaluations must be pure.
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    decay_exponent: float
    amplitude: float
    grad_eval: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hess_eval: Optional[Callable[[np.ndarray], np.ndarray]] = None
    inner_void_radius: Optional[float] = None

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError(f"dim must be >= 2, got {self.dim}")
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")

    def __call__(self, v):
        vals = np.asarray(self.eval(np.asarray(v, dtype=float)), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = np.asarray(v, dtype=float).reshape(-1, self.dim)[
                ~np.isfinite(vals).reshape(-1)
            ][0]
            raise EvaluationError(f"non-finite field value at v = {bad.tolist()}")
        return vals

    def gradient(self, v, step=1e-6):
        """Gradient at a single point; analytic if available, else central differences."""
        v = np.asarray(v, dtype=float)
        if self.grad_eval is not None:
            return np.asarray(self.grad_eval(v), dtype=float)
        g = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = step
            g[i] = (self(v + e) - self(v - e)) / (2.0 * step)
        return g

    def hessian(self, v, step=None, rel_tol=1e-6):
        """Hessian at a single point; central differences unless ``hess_eval`` is set.

        The default step ``rel_tol**(1/3) * <v>`` balances truncation against
        roundoff for a second difference.
        """
        v = np.asarray(v, dtype=float)
        if self.hess_eval is not None:
            return np.asarray(self.hess_eval(v), dtype=float)
        if step is None:
            step = rel_tol ** (1.0 / 3.0) * bracket(v)
        d = self.dim
        H = np.empty((d, d))
        f0 = self(v)
        for i in range(d):
            ei = np.zeros(d)
            ei[i] = step
            H[i, i] = (self(v + ei) - 2.0 * f0 + self(v - ei)) / step**2
            for j in range(i + 1, d):
                ej = np.zeros(d)
                ej[j] = step
                H[i, j] = H[j, i] = (
                    self(v + ei + ej)
                    - self(v + ei - ej)
                    - self(v - ei + ej)
                    + self(v - ei - ej)
                ) / (4.0 * step**2)
        return H

    def validate(self, radius=8.0, n_samples=512, seed=12345):
        """Spot-check nonnegativity, the declared decay bound, and the void radius."""
        from .util import splitmix64

        u = splitmix64(seed, n_samples * (self.dim + 1)).reshape(n_samples, -1)
        r = radius * u[:, 0]
        dirs = u[:, 1:] * 2.0 - 1.0
        norms = np.linalg.norm(dirs, axis=-1)
        norms[norms < 1e-12] = 1.0
        pts = r[:, None] * dirs / norms[:, None]
        vals = self(pts)
        if np.any(vals < -1e-14):
            raise EvaluationError("field is negative at a sampled point")
        weighted = vals * bracket(pts) ** self.decay_exponent
        if np.any(weighted > self.amplitude * (1.0 + 1e-9) + 1e-12):
            raise EvaluationError("declared decay bound violated at a sampled point")
        if self.inner_void_radius is not None:
            inside = np.linalg.norm(pts, axis=-1) < self.inner_void_radius
            if np.any(vals[inside] != 0.0):
                raise EvaluationError("field nonzero inside declared void radius")


@dataclass(frozen=True)
class QuadratureScheme:
    """Node counts and radii controlling every integral in the library.

    outer_radius:  velocity integrals truncated to |w| <= outer_radius.
    polar_radius:  singularity-centered polar nodes used inside this radius.
    radial_nodes:  panels in each graded radial rule (4-point Gauss per panel).
    angular_nodes: polar resolution of sphere rules (azimuthal is twice this).
    hyperplane_nodes: panels in hyperplane radial rules.
    regularization_radius: Taylor zone for the singular Boltzmann term.
    rel_tol:       target relative tolerance, also sets finite-difference steps.
    """

    outer_radius: float = 8.0
    polar_radius: float = 1.0
    radial_nodes: int = 12
    angular_nodes: int = 12
    hyperplane_nodes: int = 16
    regularization_radius: float = 0.05
    rel_tol: float = 1e-6

    def __post_init__(self):
        if not self.outer_radius > 1.0:
            raise ValueError("outer_radius must exceed 1")
        if not 0.0 < self.polar_radius < self.outer_radius:
            raise ValueError("need 0 < polar_radius < outer_radius")
        if not 0.0 < self.regularization_radius < 0.5:
            raise ValueError("need 0 < regularization_radius < 1/2")
        for name in ("radial_nodes", "angular_nodes", "hyperplane_nodes"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")


def _angular_integrability_value(b, dim):
    """integral of sin(theta/2)^2 b over the sphere; raises on divergence.

    The grazing behaviour is probed first: if the integrand's local power at
    theta -> 0 is <= -1 the integral diverges and no quadrature value is
    meaningful.
    """

    def integrand(theta):
        s = np.sin(theta / 2.0)
        return np.sin(theta) ** (dim - 2) * s * s * b(s)

    t1, t2 = 1e-6, 1e-5
    p = np.log(integrand(t2) / integrand(t1)) / np.log(t2 / t1)
    if p <= -1.0 + 1e-6:
        raise KernelRejectionError(
            f"angular integrability fails: integrand ~ theta^{p:.3f} near grazing"
        )
    val, _ = quad(integrand, 0.0, np.pi, limit=200, points=[1e-4, 1e-2])
    return sphere_area(dim - 1) * val


@dataclass(frozen=True)
class KernelSpec:
    """Collision kernel parameters for either operator.

    For Boltzmann, ``b`` is the angular cross-section as a function of
    sin(theta/2), vectorized over arrays.  ``cb`` is the prefactor of the
    nonsingular Carleman term; it is computed on construction from the
    cancellation integral (see :func:`collkit.boltzmann.cb_constant`).
    """

    dim: int
    gamma: float
    operator: str  # "landau" | "boltzmann"
    b: Optional[Callable[[np.ndarray], np.ndarray]] = None
    noncutoff_s: Optional[float] = None
    cb: float = field(default=None, compare=False)

    def __post_init__(self):
        if self.operator not in ("landau", "boltzmann"):
            raise ValueError(f"unknown operator {self.operator!r}")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        if self.operator == "landau":
            if self.dim == 2:
                if not -2.0 < self.gamma <= 1.0:
                    raise UnsupportedParameterError(
                        "Landau in 2D requires gamma in (-2, 1]"
                    )
            elif not -self.dim <= self.gamma <= 1.0:
                raise ValueError(f"Landau gamma out of range: {self.gamma}")
        else:
            # gamma = -dim is admitted for the sigma-form: the collision
            # difference vanishes linearly at v_* = v, which restores
            # integrability of the borderline kernel
            if not self.gamma >= -self.dim:
                raise ValueError(f"Boltzmann requires gamma >= -dim, got {self.gamma}")
            if self.b is None:
                raise ValueError("Boltzmann kernel needs an angular cross-section b")
            if self.noncutoff_s is not None and not 0.0 < self.noncutoff_s < 1.0:
                raise KernelRejectionError(
                    f"grazing exponent s must lie in (0, 1), got {self.noncutoff_s}"
                )
            self._check_angular_integrability()
            if self.cb is None:
                from .boltzmann import cb_constant

                object.__setattr__(self, "cb", cb_constant(self))

    def _check_angular_integrability(self):
        val = _angular_integrability_value(self.b, self.dim)
        if not np.isfinite(val):
            raise KernelRejectionError("angular integrability integral is not finite")

    @property
    def is_cutoff(self):
        return self.noncutoff_s is None

    def b_folded(self, x):
        """Cross-section folded onto deviation angles <= pi/2.

        b_folded(sin(theta/2)) = b(sin(theta/2)) + b(cos(theta/2)); the total
        collision operator is unchanged by this reduction, and it is what
        makes the singular/nonsingular split finite term by term.
        """
        x = np.asarray(x, dtype=float)
        return self.b(x) + self.b(np.sqrt(np.clip(1.0 - x * x, 0.0, 1.0)))


# ---------------------------------------------------------------------------
# Barrier


@dataclass(frozen=True)
class Barrier:
    """Comparison function alpha * b1(v), with b1 = |v|^-m outside B_{1/2}.

    Inside |v| < 1/2, b1 is the second-order Taylor polynomial of s^{-m/2}
    in s = |v|^2 about s = 1/4.  This is the minimal member of the
    polynomial-in-|v|^2 gluing family: it is C^2 across |v| = 1/2, has zero
    radial derivative at the origin, and (verified at construction) is
    radially non-increasing with b1(v) <= |v|^-m everywhere.
    """

    m: float
    alpha: float
    inner_coeffs: tuple  # coefficients of the inner polynomial in s = |v|^2

    def _b1_radial(self, r):
        r = np.asarray(r, dtype=float)
        s = r * r
        c0, c1, c2 = self.inner_coeffs
        inner = c0 + c1 * s + c2 * s * s
        with np.errstate(divide="ignore"):
            outer = np.where(r > 0, r, 1.0) ** (-self.m)
        return np.where(r >= 0.5, outer, inner)

    def value(self, v):
        v = np.asarray(v, dtype=float)
        return self.alpha * self._b1_radial(np.linalg.norm(v, axis=-1))

    def gradient(self, v):
        v = np.asarray(v, dtype=float)
        r = float(np.linalg.norm(v))
        if r >= 0.5:
            return -self.m * self.alpha * r ** (-self.m - 2) * v
        c0, c1, c2 = self.inner_coeffs
        s = r * r
        return self.alpha * 2.0 * (c1 + 2.0 * c2 * s) * v

    def hessian(self, v):
        v = np.asarray(v, dtype=float)
        d = v.shape[-1]
        r = float(np.linalg.norm(v))
        if r >= 0.5:
            # exact formula: (m a r^-m / r^2) [ (m+2) vv^T/r^2 - Id ]
            pref = self.m * self.alpha * r ** (-self.m) / r**2
            return pref * ((self.m + 2.0) * np.outer(v, v) / r**2 - np.eye(d))
        c0, c1, c2 = self.inner_coeffs
        s = r * r
        return self.alpha * (
            2.0 * (c1 + 2.0 * c2 * s) * np.eye(d) + 4.0 * c2 * np.outer(v, v)
        )

    def as_field(self, decay_margin=1.05):
        """View the barrier as a VelocityField (used in contact sweeps)."""
        return VelocityField(
            dim=3,
            eval=lambda v: self.value(v),
            grad_eval=self.gradient,
            hess_eval=self.hessian,
            decay_exponent=self.m,
            amplitude=decay_margin * self.alpha * max(1.0, 2.0**self.m)
            * (1.25) ** (self.m / 2.0),
        )


def make_barrier(m, alpha):
    """Construct the barrier for exponent ``m`` and amplitude ``alpha``.

    Raises ValueError for non-positive arguments and RuntimeError if the
    constructed inner profile fails monotonicity or dominance (which would
    indicate a bug, not a user error: the Taylor gluing satisfies both for
    every m > 0, and the check keeps that claim honest).
    """
    if m <= 0 or alpha <= 0:
        raise ValueError("make_barrier requires m > 0 and alpha > 0")
    s0 = 0.25
    g = s0 ** (-m / 2.0)
    g1 = -(m / 2.0) * s0 ** (-m / 2.0 - 1.0)
    g2 = (m / 2.0) * (m / 2.0 + 1.0) * s0 ** (-m / 2.0 - 2.0)
    c2 = 0.5 * g2
    c1 = g1 - g2 * s0
    c0 = g - g1 * s0 + 0.5 * g2 * s0 * s0
    barrier = Barrier(m=float(m), alpha=float(alpha), inner_coeffs=(c0, c1, c2))

    r = np.linspace(1e-6, 0.5, 2001)
    prof = barrier._b1_radial(r) / alpha
    if np.any(np.diff(prof) > 1e-12 * prof[0]):
        raise RuntimeError("barrier inner profile is not non-increasing")
    if np.any(prof > r ** (-m) * (1.0 + 1e-12)):
        raise RuntimeError("barrier inner profile violates |v|^-m dominance")
    return barrier


def barrier_eval(barrier, v, order="value"):
    """Evaluate barrier value, gradient, or hessian at a point.

    ``order`` is one of "value", "gradient", "hessian".
    """
    v = np.asarray(v, dtype=float)
    if order == "value":
        return float(barrier.value(v))
    if order == "gradient":
        return barrier.gradient(v)
    if order == "hessian":
        return barrier.hessian(v)
    raise ValueError(f"order must be value|gradient|hessian, got {order!r}")


# ---------------------------------------------------------------------------
# Weighted sup norm


def _norm_sample_points(dim, grid):
    """Deterministic sample set: dense radial profiles along many rays.

    Rays are the coordinate axes plus a product sphere rule; radii reach the
    truncation radius.  The point list is what the reported maximizer ranges
    over.
    """
    dirs, _ = sphere_rule(dim, grid.angular_nodes, 2 * grid.angular_nodes)
    axes = np.concatenate([np.eye(dim), -np.eye(dim)])
    dirs = np.concatenate([axes, dirs])
    n_r = max(64, 8 * grid.radial_nodes)
    radii = np.linspace(0.0, grid.outer_radius, n_r)
    pts = radii[None, :, None] * dirs[:, None, :]
    return pts.reshape(-1, dim)


def weighted_sup_norm(f, m, grid, return_argmax=False):
    """Grid-sampled sup of <v>^m f(v).

    The sup is taken over a deterministic radial-profile sample out to the
    scheme's outer radius.  Ties are broken toward the lexicographically
    smallest node so parallel evaluation stays reproducible.  Refinement is
    the caller's responsibility via the QuadratureScheme.
    """
    if m < 0:
        raise ValueError("weight exponent m must be >= 0")
    pts = _norm_sample_points(f.dim, grid)
    vals = f(pts) * bracket(pts) ** m
    best = np.max(vals)
    if not return_argmax:
        return float(best)
    ties = np.nonzero(vals >= best * (1.0 - 1e-15) - 1e-300)[0]
    order = np.lexsort(pts[ties].T[::-1])
    return float(best), pts[ties[order[0]]]
