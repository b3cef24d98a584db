"""Slice-distance kernels: quadric projection and polar first-exit search.

Two independent routes to the same quantity -- the distance from an interior
point to the domain boundary within an affine complex slice:

* :func:`nearest_on_quadric` solves the smooth-backend case exactly.  Ball
  images and the Siegel half-space restrict to a real quadric constraint
  ``q(xi) = xi^T H xi + 2 phi . xi + g = 0`` (H PSD, g < 0 inside) and the
  minimum-norm boundary point satisfies the secular equation
  ``xi(t) = t (I - t H)^{-1} phi`` with q(xi(t)) strictly increasing in t on
  [0, 1/lambda_max) -- a one-constraint trust-region-style projection solved by
  bisection, with the classical hard case (top eigencomponents of phi vanish)
  handled explicitly.

* :func:`polar_first_exit` is the generic oracle: march rays from the point
  along a deterministic direction grid on the slice sphere, bracket the first
  membership flip, bisect, then refine the best direction locally
  (golden-section over tangent parameters).  It only needs a membership
  predicate, so it doubles as the independent cross-check for every closed
  form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Unbounded
from .linalg import join_complex

_TINY = 1e-300


def _secular(t, lam, phi2, g):
    """q(xi(t)) on the bisection branch; +inf near poles, phi2==0 terms are 0."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        den = (1.0 - t * lam) ** 2
        num = phi2 * t * (2.0 - lam * t)
        terms = np.where(phi2 > 0.0, num / np.maximum(den, _TINY), 0.0)
    s = float(np.sum(terms))
    return math.inf if not np.isfinite(s) else s + g


def nearest_on_quadric(H: np.ndarray, phi: np.ndarray, g: float,
                       iters: int = 110) -> np.ndarray:
    """Minimum-norm xi with xi^T H xi + 2 phi.xi + g = 0 (H PSD, g < 0).

    Raises Unbounded when the constraint set is empty on every ray (H == 0 and
    phi == 0, i.e. the slice never meets the boundary).  Ties in the hard case
    are broken by projecting the first standard basis vector onto the top
    eigenspace, which is deterministic and reproduces e_1-style choices at
    fully symmetric configurations.
    """
    if g >= 0:
        raise ValueError("quadric projection expects an interior point (g < 0)")
    lam, Q = np.linalg.eigh(H)
    lam = np.clip(lam, 0.0, None)
    lmax = float(lam[-1])
    scale = max(lmax, float(np.linalg.norm(phi)), 1.0)
    phit = Q.T @ phi
    if lmax <= 1e-15 * scale:
        # constraint is affine: 2 phi.xi + g = 0
        n2 = float(phi @ phi)
        if n2 <= 1e-30 * scale * scale:
            raise Unbounded("slice constraint is identically negative (complex line inside)")
        return (-g / (2.0 * n2)) * phi
    phi2 = phit ** 2
    t_end = (1.0 - 1e-13) / lmax
    if _secular(t_end, lam, phi2, g) <= 0.0:
        # hard case: phi has (numerically) no component in the top eigenspace.
        top = lam >= lmax * (1.0 - 1e-10)
        # regular components at t = 1/lmax: xi_i = phi_i / (lmax - lam_i)
        with np.errstate(divide="ignore", invalid="ignore"):
            xi_t = np.where(top, 0.0, phit / (lmax - lam))
        xi_reg = Q @ xi_t
        q_reg = float(xi_reg @ (H @ xi_reg) + 2.0 * phi @ xi_reg + g)
        deficit = max(-q_reg, 0.0)
        alpha = math.sqrt(deficit / lmax)
        # deterministic unit vector in the top eigenspace: project e_1, e_2, ...
        Qtop = Q[:, top]
        for m in range(Q.shape[0]):
            v = Qtop @ Qtop[m, :]
            nv = float(np.linalg.norm(v))
            if nv > 1e-3:
                break
        return xi_reg + alpha * (v / nv)
    lo, hi = 0.0, t_end
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _secular(mid, lam, phi2, g) < 0.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return Q @ (t * phit / (1.0 - t * lam))


# ---------------------------------------------------------------------------
# polar first-exit search
# ---------------------------------------------------------------------------


@dataclass
class PolarConfig:
    """Tunables for the direction-grid search (defaults match the documented
    resolution: 64 directions per complex slice dimension, 3 refinement rounds)."""

    grid_per_dim: int = 64
    max_grid: int = 16384
    refine_rounds: int = 3
    rel_tol: float = 1e-7
    march_steps: int = 64
    bisect_iters: int = 60
    chunk: int = 200_000  # max points per membership batch


def sphere_grid(k: int, per_dim: int = 64, cap: int = 16384) -> np.ndarray:
    """Deterministic direction grid on the unit sphere of C^k, shape (m, k).

    k = 1 is a uniform phase circle.  k >= 2 uses a hyperspherical product grid
    over (k-1) modulus angles and k phases, sized to ~per_dim^k points overall
    but capped; the k coordinate directions are prepended so symmetric
    configurations resolve to coordinate solutions deterministically.
    """
    if k == 1:
        th = np.linspace(0.0, 2.0 * np.pi, per_dim, endpoint=False)
        dirs = np.exp(1j * th)[:, None]
        return np.vstack([np.eye(1, dtype=np.complex128), dirs])
    target = min(per_dim ** k, cap)
    params = 2 * k - 1
    gsize = max(3, round(target ** (1.0 / params)))
    etas = [(np.arange(gsize) + 0.5) / gsize * (np.pi / 2)] * (k - 1)
    phases = [np.arange(gsize) / gsize * (2 * np.pi)] * k
    mesh = np.meshgrid(*etas, *phases, indexing="ij")
    shape = mesh[0].size
    moduli = np.ones((shape, k))
    for j in range(k - 1):
        e = mesh[j].reshape(-1)
        moduli[:, j] *= np.cos(e)
        moduli[:, j + 1:] *= np.sin(e)[:, None]
    dirs = moduli.astype(np.complex128)
    for j in range(k):
        dirs[:, j] *= np.exp(1j * mesh[k - 1 + j].reshape(-1))
    return np.vstack([np.eye(k, dtype=np.complex128), dirs])


def _first_flip(inside_rows: np.ndarray, radii: np.ndarray):
    """Per-row bracket of the first sampled outside radius; (lo, hi, exited)."""
    outside = ~inside_rows
    exited = outside.any(axis=1)
    first = np.argmax(outside, axis=1)
    step = radii[1] - radii[0] if radii.shape[0] > 1 else radii[0]
    hi = radii[first]
    lo = hi - step
    lo[first == 0] = 0.0
    return np.maximum(lo, 0.0), hi, exited


def _march_brackets(contains_many, z, A, radii, chunk):
    """inside matrix for rays z + r*A[i] over all radii; A is (m, n) ambient dirs."""
    m, n = A.shape
    L = radii.shape[0]
    rows = max(1, chunk // max(L * n, 1))
    inside = np.empty((m, L), dtype=bool)
    for s in range(0, m, rows):
        block = A[s:s + rows]  # (b, n)
        pts = z[None, None, :] + radii[None, :, None] * block[:, None, :]
        inside[s:s + rows] = contains_many(pts.reshape(-1, n)).reshape(block.shape[0], L)
    return inside


def _bisect_rows(contains_many, z, A, lo, hi, iters):
    """Vectorized bisection of the membership flip per ray; returns exit radii."""
    lo = lo.copy()
    hi = hi.copy()
    n = A.shape[1]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        pts = z[None, :] + mid[:, None] * A
        ins = contains_many(pts.reshape(-1, n))
        lo = np.where(ins, mid, lo)
        hi = np.where(ins, hi, mid)
    return 0.5 * (lo + hi)


def ray_first_exit(contains_many, z, a, cap, steps=64, iters=60):
    """First membership flip along z + r*a, r in (0, cap]; inf when none found."""
    radii = np.linspace(cap / steps, cap, steps)
    inside = _march_brackets(contains_many, z, a[None, :], radii, steps * z.shape[0] + 1)
    lo, hi, exited = _first_flip(inside, radii)
    if not exited[0]:
        return math.inf
    return float(_bisect_rows(contains_many, z, a[None, :], lo, hi, iters)[0])


def _golden(f, lo, hi, iters=22):
    """Golden-section minimizer on [lo, hi]; returns (x, f(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _tangent_frame(w_real: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space of the sphere at w_real (unit)."""
    d = w_real.shape[0]
    # Householder mapping e_1 -> w_real; columns 2..d span the tangent space.
    u = w_real.copy()
    u[0] -= math.copysign(1.0, w_real[0] if w_real[0] != 0 else 1.0)
    nu = np.linalg.norm(u)
    if nu < 1e-14:
        return np.eye(d)[:, 1:]
    u /= nu
    H = np.eye(d) - 2.0 * np.outer(u, u)
    return H[:, 1:]


def polar_first_exit(contains_many, z: np.ndarray, V: np.ndarray, cap: float,
                     config: PolarConfig | None = None):
    """Distance to the boundary within the slice z + span_C(V), by polar search.

    Returns (tau, p).  Raises Unbounded when no grid ray exits within `cap`.
    The result is an upper bound on the true distance that tightens with the
    grid/refinement; accuracy is empirical (~1e-5 relative on smooth domains)
    and callers treat it as the approximate path.
    """
    cfg = config or PolarConfig()
    n, k = V.shape
    dirs = sphere_grid(k, cfg.grid_per_dim, cfg.max_grid)
    A = dirs @ V.T  # ambient unit directions inside the slice
    radii = np.linspace(cap / cfg.march_steps, cap, cfg.march_steps)
    inside = _march_brackets(contains_many, z, A, radii, cfg.chunk)
    lo, hi, exited = _first_flip(inside, radii)
    if not exited.any():
        raise Unbounded(
            f"no boundary within radius {cap:g} along {A.shape[0]} slice directions",
            witness={"point": z, "slice_dim": k, "radius": cap})
    idx = np.flatnonzero(exited)
    taus = _bisect_rows(contains_many, z, A[idx], lo[idx], hi[idx], cfg.bisect_iters)
    best_local = int(np.argmin(taus))
    tau = float(taus[best_local])
    w = dirs[idx[best_local]]

    def exit_along(w_complex, budget):
        a = w_complex @ V.T
        r = ray_first_exit(contains_many, z, a, budget,
                           steps=max(cfg.march_steps // 2, 24), iters=cfg.bisect_iters)
        return r if math.isfinite(r) else budget * 1.05

    # local refinement around the best direction
    w_real = np.concatenate([w.real, w.imag])
    delta = {1: 2.0 * np.pi / cfg.grid_per_dim, 2: 0.25, 3: 0.35}.get(k, 0.45)
    for _ in range(cfg.refine_rounds):
        tau_before = tau
        frame = _tangent_frame(w_real)
        for i in range(frame.shape[1]):
            t_i = frame[:, i]

            def f(s):
                cand = w_real + s * t_i
                cand = cand / np.linalg.norm(cand)
                return exit_along(join_complex(cand), 1.3 * tau)

            s_best, f_best = _golden(f, -delta, delta)
            if f_best < tau:
                w_real = w_real + s_best * t_i
                w_real /= np.linalg.norm(w_real)
                tau = f_best
                frame = _tangent_frame(w_real)
        delta /= 3.0
        if abs(tau_before - tau) <= cfg.rel_tol * tau:
            break

    # final high-precision exit along the refined direction
    a = join_complex(w_real) @ V.T
    r = ray_first_exit(contains_many, z, a, 1.5 * tau,
                       steps=cfg.march_steps, iters=80)
    if math.isfinite(r):
        tau = r
    p = z + tau * a
    return tau, p
