"""Boltzmann collision operator: sigma-representation and Carleman split.

Two evaluation routes are provided and cross-validated:

* ``q_boltzmann_sigma``: the textbook double integral over (v_*, sigma),
  usable only for angularly integrable (cutoff) cross-sections.
* ``q_boltzmann_carleman``: the singular/nonsingular split Q = Q_s + Q_ns,
  valid for cutoff and non-cutoff kernels alike.

Convention for the split: deviation angles are folded onto theta <= pi/2 by
replacing b with b_folded(x) = b(x) + b(sqrt(1-x^2)).  The total operator is
unchanged (the sigma integral is symmetric under sigma -> -sigma after
swapping the outgoing pair), but the fold is essential: with the full
angular range the split's gain and loss pieces diverge separately whenever
gamma >= -1.  Then

    Q_s(f,f)(v)  = int_{theta<=pi/2} b_folded [f(v') - f(v)] f(v'_*) |v-v_*|^gamma
    Q_ns(f,f)(v) = C_b f(v) (f * |.|^gamma)(v),

with Q_s evaluated in Carleman coordinates (outer point v'_* = v + u*eta,
inner point v' on the plane through v orthogonal to eta, restricted to
|v'-v| <= u, kernel B2 = 2^{d-1} r^{2-d+gamma} b_folded(rho/r) / u where
r^2 = rho^2 + u^2) and C_b computed once per kernel by the cancellation
integral in :func:`cb_constant`.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .exceptions import CapabilityError, KernelRejectionError, UnsupportedParameterError
from .landau import polar_nodes, singular_convolution
from .util import graded_panels, orthonormal_complement, sphere_area, sphere_rule


@dataclass(frozen=True)
class CollisionGeometry:
    """One binary collision: incoming pair, outgoing pair, and angle data.

    theta is NaN (with ``degenerate`` True) when v == v_star, where the
    deviation angle is undefined.
    """

    v: np.ndarray
    v_star: np.ndarray
    v_prime: np.ndarray
    v_star_prime: np.ndarray
    sigma: np.ndarray
    r: float
    theta: float
    degenerate: bool = False


def post_collision_map(v, v_star, sigma):
    """Outgoing velocities for incoming pair (v, v_star) and direction sigma.

    v'      = (v + v_*)/2 + |v - v_*| sigma / 2
    v'_*    = (v + v_*)/2 - |v - v_*| sigma / 2
    """
    v = np.asarray(v, dtype=float)
    v_star = np.asarray(v_star, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if abs(np.linalg.norm(sigma) - 1.0) > 1e-12:
        raise ValueError("sigma must be a unit vector")
    rel = v - v_star
    r = float(np.linalg.norm(rel))
    mid = 0.5 * (v + v_star)
    v_prime = mid + 0.5 * r * sigma
    v_star_prime = mid - 0.5 * r * sigma
    if r == 0.0:
        return CollisionGeometry(v, v_star, v_prime, v_star_prime, sigma,
                                 r=0.0, theta=float("nan"), degenerate=True)
    cos_t = float(np.clip(sigma @ rel / r, -1.0, 1.0))
    return CollisionGeometry(v, v_star, v_prime, v_star_prime, sigma,
                             r=r, theta=float(np.arccos(cos_t)))


# ---------------------------------------------------------------------------
# Kernel constants


def kernel_integrability_check(k, q=None):
    """Finite value of the reduced Carleman-kernel integrability integral.

    By the rotational symmetry of the hyperplane, the condition collapses to

        |S^{d-2}| 2^{d-1} int_0^1 x^d (1+x^2)^{-(d+1)/2} b(x/sqrt(1+x^2)) dx,

    which is finite exactly when b's grazing singularity is milder than the
    s = 1 endpoint.  Divergent kernels raise KernelRejectionError; the local
    power of the integrand near 0 is measured first so that divergence is
    detected rather than returned as a large number.
    """
    d = k.dim

    def g(x):
        return x**d * (1.0 + x * x) ** (-(d + 1) / 2.0) * k.b(x / np.sqrt(1.0 + x * x))

    x1, x2 = 1e-6, 1e-5
    p = np.log(g(x2) / g(x1)) / np.log(x2 / x1)
    if p <= -1.0 + 1e-6:
        raise KernelRejectionError(
            f"kernel integrability fails: integrand ~ x^{p:.3f} near grazing"
        )
    val, _ = quad(g, 0.0, 1.0, limit=200, points=[1e-4, 1e-2])
    return float(sphere_area(d - 1) * 2.0 ** (d - 1) * val)


def cb_constant(k):
    """Prefactor C_b of the nonsingular term Q_ns = C_b f (f * |.|^gamma).

    Obtained from the exact angular cancellation identity

        int_{theta<=pi/2} b_folded(sin(theta/2)) [f(v'_*) - f(v_*)] B dsigma dv_*
            = C_b (f * |.|^gamma)(v),

    whose right-hand constant reduces to the 1-D integral below.  Finite even
    for non-cutoff kernels because the bracket vanishes quadratically at
    theta = 0.
    """
    d, g = k.dim, k.gamma

    def integrand(theta):
        x = np.sin(theta / 2.0)
        beff = k.b(x) + k.b(np.cos(theta / 2.0))
        return np.sin(theta) ** (d - 2) * beff * (np.cos(theta / 2.0) ** (-(d + g)) - 1.0)

    val, _ = quad(integrand, 0.0, np.pi / 2.0, limit=200, points=[1e-4, 1e-2])
    return float(sphere_area(d - 1) * val)


# ---------------------------------------------------------------------------
# sigma-representation


def q_boltzmann_sigma(f, v, k, q):
    """Collision operator by direct (v_*, sigma) quadrature; cutoff kernels only."""
    if k.operator != "boltzmann":
        raise ValueError("q_boltzmann_sigma requires a Boltzmann kernel")
    if not k.is_cutoff:
        raise CapabilityError(
            "sigma-representation diverges for non-cutoff kernels; "
            "use q_boltzmann_carleman"
        )
    d = k.dim
    v = np.asarray(v, dtype=float)
    pts, r, wr, omega, w_om = polar_nodes(v, d, q)
    sigma, w_sg = sphere_rule(d, q.angular_nodes, 2 * q.angular_nodes)
    f_v = float(f(v))
    # cos(theta) = sigma . (v - v_*)/|v - v_*| = -sigma . omega
    cos_t = -sigma @ omega.T                      # (Nsig, Nom)
    sin_half = np.sqrt(np.clip(0.5 * (1.0 - cos_t), 0.0, 1.0))
    b_vals = k.b(sin_half)
    total = 0.0
    for i in range(len(r)):
        vs = pts[i]                               # (Nom, d) = v + r_i omega
        f_vs = f(vs)
        mid = 0.5 * (v + vs)
        vp = mid[None, :, :] + 0.5 * r[i] * sigma[:, None, :]
        vps = mid[None, :, :] - 0.5 * r[i] * sigma[:, None, :]
        vals = f(vp) * f(vps) - f_v * f_vs[None, :]
        total += wr[i] * r[i] ** k.gamma * np.einsum(
            "s,so,so,o->", w_sg, b_vals, vals, w_om
        )
    return float(total)


# ---------------------------------------------------------------------------
# Carleman representation


def _carleman_qs(f, v, k, q):
    d = k.dim
    if d != 3:
        raise UnsupportedParameterError("Carleman evaluation is implemented for d = 3")
    v = np.asarray(v, dtype=float)
    f_v = float(f(v))
    use_taylor = not k.is_cutoff
    if use_taylor:
        if f.grad_eval is None:
            raise CapabilityError(
                "non-cutoff Carleman evaluation needs an exact gradient"
            )
        grad_v = np.asarray(f.grad_eval(v), dtype=float)

    # outer radial nodes for u = |v'_* - v|
    _, u, wu, eta, w_eta = polar_nodes(v, d, q)
    e1, e2 = orthonormal_complement(eta)

    # fixed unit inner radial grid; per-outer-node scaling rho = u * x makes
    # the angular restriction rho <= u exact
    x, wx = graded_panels(0.0, 1.0, q.hyperplane_nodes, 4, ratio=2.5)
    n_phi = 2 * q.angular_nodes
    phi = (np.arange(n_phi) + 0.5) * 2.0 * np.pi / n_phi
    w_phi = 2.0 * np.pi / n_phi
    dirs = (np.cos(phi)[None, :, None] * e1[:, None, :]
            + np.sin(phi)[None, :, None] * e2[:, None, :])  # (Neta, Nphi, 3)

    total = 0.0
    for i in range(len(u)):
        ui = u[i]
        vps = v + ui * eta                     # (Neta, 3)
        f_vps = f(vps)
        rho = ui * x
        w_rho = ui * wx
        rr = np.sqrt(rho * rho + ui * ui)
        b2 = 2.0 ** (d - 1) * rr ** (k.gamma + 2.0 - d) * k.b_folded(rho / rr) / ui
        vp = v + rho[:, None, None, None] * dirs[None, :, :, :]  # (Nx, Neta, Nphi, 3)
        diff = f(vp) - f_v
        if use_taylor:
            lin = np.einsum("xnpc,c->xnp", vp - v, grad_v)
            taylor_zone = rho < q.regularization_radius
            diff = diff - np.where(taylor_zone[:, None, None], lin, 0.0)
        inner = np.einsum("x,xnp->n", w_rho * rho * b2, diff) * w_phi
        # wu already carries the radial measure u^{d-1}
        total += wu[i] * float(np.dot(w_eta, f_vps * inner))
    return total


def q_boltzmann_carleman(f, v, k, q):
    """Collision operator as Q_s + Q_ns in Carleman coordinates.

    Works for cutoff and non-cutoff kernels; for the latter the inner
    integrand is Taylor-regularized inside |v' - v| < h0 (the odd first-order
    term integrates to zero over the hyperplane).
    """
    if k.operator != "boltzmann":
        raise ValueError("q_boltzmann_carleman requires a Boltzmann kernel")
    v = np.asarray(v, dtype=float)
    qs = _carleman_qs(f, v, k, q)
    qns = k.cb * float(f(v)) * singular_convolution(f, v, k.gamma, q)
    return float(qs + qns)
