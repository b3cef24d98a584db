"""Domain backends: membership, size queries, exact oracles, JSON round-trip.

Six variants are supported.  Five are concrete geometric families --
intersections of real halfspaces ``Re <z, a_i> < b_i``, affine images of the
unit ball, polydiscs, scaled l1 balls, and the Siegel half-space
``Im z_n > |z'|^2`` -- plus a black-box membership oracle for domains only
known through a predicate (the symmetrized bidisc ships as a named oracle).

Affine ball images and the Siegel half-space are biholomorphic to the ball via
an explicit map, so they carry an :class:`ExactOracle` and admit exact volume
elements; everything downstream that needs ground truth uses those two
families.

All point-valued functions accept a single vector or an (m, n) batch; batch in,
batch out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    BadDimension,
    ConfigInvalid,
    DegenerateDomain,
    DimensionMismatch,
    NoOracle,
    PointOutsideDomain,
    UnboundedDomain,
    UnsupportedDomain,
    HolovolError,
)
from .linalg import as_cvector, uniform_ball

CONVEX = "convex"
C_CONVEX = "c_convex"

#: Values above this are reported as +inf (overflow policy for volume elements).
OVERFLOW_LIMIT = 1e300


def _batch(z, n: int):
    """Coerce a point or batch of points to shape (m, n); return (array, was_single)."""
    a = np.asarray(z, dtype=np.complex128)
    if a.ndim == 1:
        if a.shape[0] != n:
            raise DimensionMismatch(f"point has length {a.shape[0]}, domain has n={n}")
        return a[None, :], True
    if a.ndim != 2 or a.shape[1] != n:
        raise DimensionMismatch(f"expected shape (m, {n}), got {a.shape}")
    return a, False


# ---------------------------------------------------------------------------
# exact oracles (ball-biholomorphic domains)
# ---------------------------------------------------------------------------


@dataclass
class ExactOracle:
    """Biholomorphism F from the unit ball onto the domain, with derivative data.

    ``forward``/``inverse`` map batches (m, n) -> (m, n); ``jacobian_det`` maps a
    batch of ball points to the complex determinants det F'(w).
    """

    n: int
    forward: Callable[[np.ndarray], np.ndarray]
    inverse: Callable[[np.ndarray], np.ndarray]
    jacobian_det: Callable[[np.ndarray], np.ndarray]


def validate_oracle(oracle: ExactOracle, *, points: int = 100, seed: int = 0,
                    rel_tol: float = 1e-6) -> float:
    """Check jacobian_det against central finite differences at random ball points.

    Returns the maximum relative deviation; raises ConfigInvalid beyond rel_tol.
    Holomorphy means the complex derivative equals the directional derivative
    along the real axis, so a real-step central difference per coordinate gives
    the full complex Jacobian.
    """
    rng = np.random.default_rng(seed)
    w = uniform_ball(oracle.n, points, rng) * 0.8  # stay away from the sphere
    h = 1e-6
    worst = 0.0
    for i in range(points):
        J = np.empty((oracle.n, oracle.n), dtype=np.complex128)
        for j in range(oracle.n):
            e = np.zeros(oracle.n, dtype=np.complex128)
            e[j] = h
            J[:, j] = (oracle.forward(w[i] + e) - oracle.forward(w[i] - e)) / (2 * h)
        det_fd = np.linalg.det(J)
        det_an = oracle.jacobian_det(w[i][None, :])[0]
        rel = abs(det_fd - det_an) / max(abs(det_an), 1e-300)
        worst = max(worst, rel)
    if worst > rel_tol:
        raise ConfigInvalid(
            f"oracle jacobian_det disagrees with finite differences (rel {worst:.3e})")
    return worst


def cayley(w: np.ndarray) -> np.ndarray:
    """Biholomorphism from the unit ball onto {Im z_n > |z'|^2}.

    Cayley(w', w_n) = ( w'/(1+w_n), i(1-w_n)/(1+w_n) ).
    """
    a, single = _batch(w, np.asarray(w).shape[-1])
    denom = 1.0 + a[:, -1]
    z = np.empty_like(a)
    z[:, :-1] = a[:, :-1] / denom[:, None]
    z[:, -1] = 1j * (1.0 - a[:, -1]) / denom
    return z[0] if single else z


def cayley_inverse(z: np.ndarray) -> np.ndarray:
    """Inverse of :func:`cayley`: w_n = (i - z_n)/(i + z_n), w' = 2i z'/(i + z_n)."""
    a, single = _batch(z, np.asarray(z).shape[-1])
    denom = 1j + a[:, -1]
    w = np.empty_like(a)
    w[:, :-1] = 2j * a[:, :-1] / denom[:, None]
    w[:, -1] = (1j - a[:, -1]) / denom
    return w[0] if single else w


def cayley_jacobian_det(w: np.ndarray, n: int) -> np.ndarray:
    """det of the Cayley derivative: -2i / (1 + w_n)^(n+1)."""
    a, single = _batch(w, n)
    d = -2j / (1.0 + a[:, -1]) ** (n + 1)
    return d[0] if single else d


# ---------------------------------------------------------------------------
# domain variants
# ---------------------------------------------------------------------------


@dataclass
class Domain:
    """Common base: dimension and convexity class tag.

    The tag is structural for the five geometric variants (all convex, hence
    also C-convex); a MembershipOracle carries whatever the caller declares,
    and that declaration is trusted (recorded in reports, never verified).
    """

    n: int

    variant = "abstract"
    convexity_class = CONVEX

    def __post_init__(self):
        if self.n < 2:
            raise BadDimension(f"domains need n >= 2, got n={self.n}")

    # -- membership ---------------------------------------------------------

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # -- size ----------------------------------------------------------------

    @property
    def bounded(self) -> bool:
        raise NotImplementedError

    @property
    def exact_oracle(self) -> ExactOracle | None:
        return None


@dataclass
class HalfspaceConvex(Domain):
    """Intersection of real halfspaces { z : Re <z, a_i> < b_i }."""

    normals: np.ndarray = None
    offsets: np.ndarray = None

    variant = "halfspace"

    def __post_init__(self):
        super().__post_init__()
        self.normals = np.atleast_2d(np.asarray(self.normals, dtype=np.complex128))
        self.offsets = np.atleast_1d(np.asarray(self.offsets, dtype=np.float64))
        if self.normals.shape[1] != self.n or self.normals.shape[0] != self.offsets.shape[0]:
            raise ConfigInvalid("halfspace constraint shapes inconsistent")
        if np.any(np.linalg.norm(self.normals, axis=1) == 0):
            raise ConfigInvalid("zero constraint normal")
        self._box = None  # cached real bounding box, shape (2n, 2) or "unbounded"
        self._cheb = None  # cached Chebyshev center

    def contains_many(self, pts):
        lhs = (pts @ self.normals.conj().T).real  # Re <z, a_i>
        return np.all(lhs < self.offsets[None, :], axis=1)

    def _real_lp_data(self):
        """Constraints as A x <= b over x = (Re z_1, Im z_1, ..., Re z_n, Im z_n)."""
        m = self.normals.shape[0]
        A = np.empty((m, 2 * self.n))
        A[:, 0::2] = self.normals.real
        A[:, 1::2] = self.normals.imag
        return A, self.offsets.copy()

    def bounding_box(self):
        """Real coordinate bounding box via 4n support LPs, or None if unbounded."""
        if self._box is not None:
            return None if self._box == "unbounded" else self._box[0]
        from scipy.optimize import linprog

        A, b = self._real_lp_data()
        d = 2 * self.n
        box = np.empty((d, 2))
        for i in range(d):
            for sign, col in ((1.0, 0), (-1.0, 1)):
                c = np.zeros(d)
                c[i] = sign
                res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * d,
                              method="highs")
                if res.status == 3:  # unbounded
                    self._box = "unbounded"
                    return None
                if res.status != 0:
                    raise HolovolError(f"support LP failed: {res.message}")
                box[i, col] = -res.fun if sign < 0 else res.fun
        # columns: [min, max] per real coordinate
        box = np.stack([box[:, 0], box[:, 1]], axis=1)
        self._box = (box,)
        return box

    @property
    def bounded(self) -> bool:
        return self.bounding_box() is not None

    def chebyshev_center(self) -> np.ndarray:
        """Center of the largest inscribed real ball, as a complex vector."""
        if self._cheb is None:
            from scipy.optimize import linprog

            A, b = self._real_lp_data()
            d = 2 * self.n
            norms = np.linalg.norm(A, axis=1)
            c = np.zeros(d + 1)
            c[-1] = -1.0
            res = linprog(c, A_ub=np.hstack([A, norms[:, None]]), b_ub=b,
                          bounds=[(None, None)] * d + [(0.0, None)],
                          method="highs")
            if res.status == 3:
                raise UnboundedDomain("no finite inscribed-ball center")
            if res.status != 0 or res.x[-1] <= 0:
                raise HolovolError(f"inscribed-ball LP failed: {res.message}")
            self._cheb = res.x[:d:2] + 1j * res.x[1:d:2]
        return self._cheb.copy()


@dataclass
class AffineBallImage(Domain):
    """Image of the unit ball under z = M w + c with M invertible."""

    matrix: np.ndarray = None
    center: np.ndarray = None

    variant = "ball_image"

    def __post_init__(self):
        super().__post_init__()
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        self.center = as_cvector(self.center, self.n)
        if self.matrix.shape != (self.n, self.n):
            raise ConfigInvalid(f"matrix shape {self.matrix.shape} != ({self.n},{self.n})")
        sv = np.linalg.svd(self.matrix, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise DegenerateDomain("ball-image matrix is numerically singular")
        self._inv = np.linalg.inv(self.matrix)
        self._det = complex(np.linalg.det(self.matrix))
        self._sv = sv

    def to_ball(self, pts):
        return (pts - self.center) @ self._inv.T

    def contains_many(self, pts):
        return np.linalg.norm(self.to_ball(pts), axis=1) < 1.0

    @property
    def bounded(self) -> bool:
        return True

    @property
    def exact_oracle(self) -> ExactOracle:
        M, c, det = self.matrix, self.center, self._det

        def forward(w):
            return np.atleast_2d(w) @ M.T + c

        def inverse(z):
            return (np.atleast_2d(z) - c) @ self._inv.T

        def jac(w):
            return np.full(np.atleast_2d(w).shape[0], det, dtype=np.complex128)

        return ExactOracle(self.n, forward, inverse, jac)


@dataclass
class Polydisc(Domain):
    """Product of discs { z : |z_j - c_j| < r_j }."""

    center: np.ndarray = None
    radii: np.ndarray = None

    variant = "polydisc"

    def __post_init__(self):
        super().__post_init__()
        self.center = as_cvector(self.center, self.n)
        self.radii = np.atleast_1d(np.asarray(self.radii, dtype=np.float64))
        if self.radii.shape[0] != self.n or np.any(self.radii <= 0):
            raise ConfigInvalid("polydisc needs n positive radii")

    def contains_many(self, pts):
        return np.all(np.abs(pts - self.center) < self.radii[None, :], axis=1)

    @property
    def bounded(self) -> bool:
        return True


@dataclass
class L1Ball(Domain):
    """Scaled l1 ball { z : sum |z_j| < scale }."""

    scale: float = 1.0

    variant = "l1ball"

    def __post_init__(self):
        super().__post_init__()
        self.scale = float(self.scale)
        if not (self.scale > 0):
            raise ConfigInvalid("l1 ball scale must be positive")

    def contains_many(self, pts):
        return np.sum(np.abs(pts), axis=1) < self.scale

    @property
    def bounded(self) -> bool:
        return True


@dataclass
class SiegelHalfSpace(Domain):
    """Unbounded model domain { z : Im z_n > |z_1|^2 + ... + |z_{n-1}|^2 }."""

    variant = "siegel"

    def defect(self, pts):
        """Im z_n - |z'|^2, positive inside."""
        return pts[:, -1].imag - np.sum(np.abs(pts[:, :-1]) ** 2, axis=1)

    def contains_many(self, pts):
        return self.defect(pts) > 0.0

    @property
    def bounded(self) -> bool:
        return False

    @property
    def exact_oracle(self) -> ExactOracle:
        n = self.n
        return ExactOracle(
            n,
            forward=lambda w: cayley(np.atleast_2d(w)),
            inverse=lambda z: cayley_inverse(np.atleast_2d(z)),
            jacobian_det=lambda w: cayley_jacobian_det(np.atleast_2d(w), n),
        )


@dataclass
class MembershipOracle(Domain):
    """Domain known only through a membership predicate.

    The predicate takes an (m, n) complex array and returns an (m,) boolean
    array (scalar predicates are wrapped on the fly, at a large speed cost).
    ``enclosing_polydisc`` -- (center, radii) -- is optional but unlocks finite
    diameters/circumscribed radii and default sampling boxes.
    """

    predicate: Callable = None
    declared_class: str = C_CONVEX
    search_radius: float = 1e6
    refine_iters: int = 3
    predicate_name: str | None = None
    enclosing_polydisc: tuple | None = None

    variant = "oracle"

    def __post_init__(self):
        super().__post_init__()
        if self.declared_class not in (CONVEX, C_CONVEX):
            raise ConfigInvalid(f"unknown convexity class {self.declared_class!r}")
        if not (self.search_radius > 0) or self.refine_iters < 1:
            raise ConfigInvalid("oracle needs search_radius > 0 and refine_iters >= 1")
        self.convexity_class = self.declared_class
        if self.enclosing_polydisc is not None:
            c, r = self.enclosing_polydisc
            self.enclosing_polydisc = (as_cvector(c, self.n),
                                       np.asarray(r, dtype=np.float64))

    def contains_many(self, pts):
        out = self.predicate(pts)
        out = np.asarray(out)
        if out.shape != (pts.shape[0],):
            # scalar predicate: evaluate row by row
            out = np.fromiter((bool(self.predicate(p)) for p in pts),
                              dtype=bool, count=pts.shape[0])
        return out.astype(bool)

    @property
    def bounded(self) -> bool:
        return self.enclosing_polydisc is not None


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def contains(domain: Domain, z) -> bool | np.ndarray:
    """Strict membership; batch in, batch out."""
    pts, single = _batch(z, domain.n)
    out = domain.contains_many(pts)
    return bool(out[0]) if single else out


def boundary_margin(domain: Domain, z):
    """Signed inside-margin, positive inside.

    Units vary by backend (exact or lower-bound distance for the geometric
    variants, the defining-function defect for Siegel, +/-1 for oracles); only
    the sign and monotonicity near the boundary are contractual.  Used by the
    sampled inclusion checks to report how close a witness came.
    """
    pts, single = _batch(z, domain.n)
    if isinstance(domain, HalfspaceConvex):
        lhs = (pts @ domain.normals.conj().T).real
        scale = np.linalg.norm(domain.normals, axis=1)
        out = np.min((domain.offsets[None, :] - lhs) / scale[None, :], axis=1)
    elif isinstance(domain, AffineBallImage):
        out = (1.0 - np.linalg.norm(domain.to_ball(pts), axis=1)) * domain._sv[-1]
    elif isinstance(domain, Polydisc):
        out = np.min(domain.radii[None, :] - np.abs(pts - domain.center), axis=1)
    elif isinstance(domain, L1Ball):
        out = (domain.scale - np.sum(np.abs(pts), axis=1)) / math.sqrt(domain.n)
    elif isinstance(domain, SiegelHalfSpace):
        out = domain.defect(pts)
    else:
        out = np.where(domain.contains_many(pts), 1.0, -1.0)
    return float(out[0]) if single else out


def diameter(domain: Domain) -> float:
    """Diameter: exact for polydisc/ball-image/l1; certified upper bound for
    bounded halfspace intersections (bounding-box diagonal); +inf otherwise."""
    if isinstance(domain, Polydisc):
        return 2.0 * float(np.linalg.norm(domain.radii))
    if isinstance(domain, AffineBallImage):
        return 2.0 * float(domain._sv[0])
    if isinstance(domain, L1Ball):
        return 2.0 * domain.scale
    if isinstance(domain, HalfspaceConvex):
        box = domain.bounding_box()
        if box is None:
            return math.inf
        return float(np.linalg.norm(box[:, 1] - box[:, 0]))
    if isinstance(domain, MembershipOracle) and domain.enclosing_polydisc is not None:
        _, radii = domain.enclosing_polydisc
        return 2.0 * float(np.linalg.norm(radii))
    return math.inf


def circumscribed_radius(domain: Domain, z) -> float:
    """Radius R with D contained in the ball B(z, R); certified upper bound, +inf
    for unbounded domains."""
    zz = as_cvector(z, domain.n)
    if isinstance(domain, Polydisc):
        return float(np.linalg.norm(np.abs(zz - domain.center) + domain.radii))
    if isinstance(domain, AffineBallImage):
        return float(np.linalg.norm(zz - domain.center)) + float(domain._sv[0])
    if isinstance(domain, L1Ball):
        s = domain.scale
        nz = float(np.linalg.norm(zz))
        return math.sqrt(nz * nz + s * s + 2.0 * s * float(np.max(np.abs(zz))))
    if isinstance(domain, HalfspaceConvex):
        box = domain.bounding_box()
        if box is None:
            return math.inf
        # farthest corner of the real bounding box
        zr = np.empty(2 * domain.n)
        zr[0::2], zr[1::2] = zz.real, zz.imag
        far = np.maximum(np.abs(box[:, 0] - zr), np.abs(box[:, 1] - zr))
        return float(np.linalg.norm(far))
    if isinstance(domain, MembershipOracle) and domain.enclosing_polydisc is not None:
        c, r = domain.enclosing_polydisc
        return float(np.linalg.norm(np.abs(zz - c) + r))
    return math.inf


def exact_volume_element(domain: Domain, z) -> float:
    """Exact volume element via the domain's ball oracle.

    v(z) = |det F'(w)|^-2 (1 - |w|^2)^-(n+1) at w = F^-1(z); values above
    1e300 are reported as +inf.  Raises NoOracle when no oracle is available
    and PointOutsideDomain when z is not inside.
    """
    oracle = domain.exact_oracle
    if oracle is None:
        raise NoOracle(f"{domain.variant} domain has no exact volume oracle")
    zz = as_cvector(z, domain.n)
    if not contains(domain, zz):
        raise PointOutsideDomain("volume element requested outside the domain")
    w = oracle.inverse(zz[None, :])[0]
    r2 = float(np.sum(np.abs(w) ** 2))
    jd = abs(complex(oracle.jacobian_det(w[None, :])[0]))
    v = jd ** -2 * (1.0 - r2) ** (-(domain.n + 1))
    return math.inf if v > OVERFLOW_LIMIT else float(v)


def unit_ball(n: int) -> AffineBallImage:
    """The unit ball of C^n as a trivial affine ball image."""
    return AffineBallImage(n, matrix=np.eye(n, dtype=np.complex128),
                           center=np.zeros(n, dtype=np.complex128))


# ---------------------------------------------------------------------------
# interior sampling (used by inclusion checks and the harness)
# ---------------------------------------------------------------------------


def sample_interior(domain: Domain, count: int, rng: np.random.Generator,
                    box: np.ndarray | None = None) -> np.ndarray:
    """Draw `count` interior points.

    Ball images map uniform ball samples through F; polydiscs sample each disc;
    the Siegel half-space pushes ball samples through the Cayley map (coverage,
    not uniformity, is the contract).  Halfspace and oracle domains use
    rejection sampling inside `box` (real (2n, 2) bounds), defaulting to the
    bounding box / enclosing polydisc when available.
    """
    n = domain.n
    if isinstance(domain, AffineBallImage):
        return domain.exact_oracle.forward(uniform_ball(n, count, rng))
    if isinstance(domain, SiegelHalfSpace):
        return cayley(uniform_ball(n, count, rng))
    if isinstance(domain, Polydisc):
        u = rng.random((count, n))
        theta = rng.random((count, n)) * 2 * np.pi
        return domain.center + domain.radii * np.sqrt(u) * np.exp(1j * theta)
    if isinstance(domain, L1Ball):
        # rejection from the circumscribing polydisc; acceptance (2n)!/ (n! ... ) ~ ok n<=4
        box_dom = Polydisc(n, center=np.zeros(n), radii=np.full(n, domain.scale))
        out = np.empty((0, n), dtype=np.complex128)
        while out.shape[0] < count:
            cand = sample_interior(box_dom, max(count, 256), rng)
            out = np.vstack([out, cand[domain.contains_many(cand)]])
        return out[:count]
    ray_fallback = False
    if box is None:
        if isinstance(domain, HalfspaceConvex):
            box = domain.bounding_box()
            if box is None:
                raise UnboundedDomain("cannot rejection-sample an unbounded domain without a box")
            ray_fallback = True  # thin polytopes defeat box rejection
        elif isinstance(domain, MembershipOracle) and domain.enclosing_polydisc is not None:
            c, r = domain.enclosing_polydisc
            box = np.empty((2 * n, 2))
            box[0::2, 0], box[0::2, 1] = c.real - r, c.real + r
            box[1::2, 0], box[1::2, 1] = c.imag - r, c.imag + r
        else:
            raise UnboundedDomain("rejection sampling needs a bounding box")
    box = np.asarray(box, dtype=np.float64)
    out = np.empty((0, n), dtype=np.complex128)
    attempts = 0
    limit = 25 if ray_fallback else 2000
    while out.shape[0] < count:
        m = max(4 * count, 512)
        u = rng.random((m, 2 * n)) * (box[:, 1] - box[:, 0]) + box[:, 0]
        cand = u[:, 0::2] + 1j * u[:, 1::2]
        out = np.vstack([out, cand[domain.contains_many(cand)]])
        attempts += 1
        if attempts > limit and out.shape[0] < count:
            if ray_fallback:
                rays = _halfspace_ray_samples(domain, count - out.shape[0], rng)
                return np.vstack([out, rays])[:count]
            raise HolovolError("rejection sampling acceptance rate too low")
    return out[:count]


def _halfspace_ray_samples(domain: HalfspaceConvex, count: int,
                           rng: np.random.Generator) -> np.ndarray:
    """Star-shaped sampling of a bounded polytope from its Chebyshev center.

    Casts uniform sphere directions from the center of the largest inscribed
    ball and places a point at a random fraction of the exit distance.  Not
    volume-uniform, but covers the whole body with a guaranteed acceptance
    rate of one, which is what the inclusion checks need on thin polytopes.
    """
    n = domain.n
    x0 = domain.chebyshev_center()
    slack = domain.offsets - (domain.normals.conj() @ x0).real
    out = np.empty((count, n), dtype=np.complex128)
    filled = 0
    while filled < count:
        m = count - filled
        u = rng.normal(size=(m, 2 * n))
        u /= np.linalg.norm(u, axis=1)[:, None]
        d = u[:, 0::2] + 1j * u[:, 1::2]
        proj = (d @ domain.normals.conj().T).real
        with np.errstate(divide="ignore"):
            t = np.where(proj > 1e-14, slack[None, :] / proj, np.inf).min(axis=1)
        s = rng.random(m) ** (1.0 / (2 * n))
        pts = x0[None, :] + (s * t * (1.0 - 1e-9))[:, None] * d
        good = domain.contains_many(pts)
        out[filled:filled + int(good.sum())] = pts[good]
        filled += int(good.sum())
    return out


# ---------------------------------------------------------------------------
# named oracle predicates and JSON round-trip
# ---------------------------------------------------------------------------


def _symmetrized_bidisc_pred(pts: np.ndarray) -> np.ndarray:
    """|s - conj(s) p| < 1 - |p|^2 characterizes pairs (s, p) = (z+w, zw), z,w in the disc."""
    s, p = pts[:, 0], pts[:, 1]
    return np.abs(s - np.conj(s) * p) < 1.0 - np.abs(p) ** 2


ORACLE_PREDICATES: dict[str, dict] = {
    "symmetrized_bidisc": {
        "predicate": _symmetrized_bidisc_pred,
        "n": 2,
        "class": C_CONVEX,
        "enclosing_polydisc": (np.zeros(2), np.array([2.0, 1.0])),
    },
}


def symmetrized_bidisc(search_radius: float = 8.0, refine_iters: int = 3) -> MembershipOracle:
    """The symmetrized bidisc as a named membership oracle (C-convex, not convex)."""
    meta = ORACLE_PREDICATES["symmetrized_bidisc"]
    return MembershipOracle(2, predicate=meta["predicate"], declared_class=C_CONVEX,
                            search_radius=search_radius, refine_iters=refine_iters,
                            predicate_name="symmetrized_bidisc",
                            enclosing_polydisc=meta["enclosing_polydisc"])


def _c2j(x: complex) -> list:
    return [float(np.real(x)), float(np.imag(x))]


def _vec2j(v: np.ndarray) -> list:
    return [_c2j(x) for x in v]


def _j2vec(data) -> np.ndarray:
    return np.array([complex(re, im) for re, im in data], dtype=np.complex128)


def domain_to_json(domain: Domain) -> dict:
    """Serialize to the documented schema (complex as [re, im], matrices row-major)."""
    out: dict = {"variant": domain.variant, "n": domain.n,
                 "class": domain.convexity_class}
    if isinstance(domain, HalfspaceConvex):
        out["constraints"] = [{"a": _vec2j(a), "b": float(b)}
                              for a, b in zip(domain.normals, domain.offsets)]
    elif isinstance(domain, AffineBallImage):
        out["matrix"] = [_vec2j(row) for row in domain.matrix]
        out["center"] = _vec2j(domain.center)
    elif isinstance(domain, Polydisc):
        out["center"] = _vec2j(domain.center)
        out["radii"] = [float(r) for r in domain.radii]
    elif isinstance(domain, L1Ball):
        out["scale"] = domain.scale
    elif isinstance(domain, SiegelHalfSpace):
        pass
    elif isinstance(domain, MembershipOracle):
        if domain.predicate_name is None:
            raise ConfigInvalid("only named oracle predicates are serializable")
        out["predicate"] = domain.predicate_name
        out["search_radius"] = domain.search_radius
        out["refine_iters"] = domain.refine_iters
    else:
        raise UnsupportedDomain(f"cannot serialize {type(domain).__name__}")
    return out


def domain_from_json(data: dict) -> Domain:
    """Parse the documented schema; raises ConfigInvalid on malformed input."""
    try:
        variant = data["variant"]
        n = int(data["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"domain config missing variant/n: {exc}") from exc
    cls_tag = data.get("class", CONVEX)
    if cls_tag not in (CONVEX, C_CONVEX):
        raise ConfigInvalid(f"unknown convexity class {cls_tag!r}")
    try:
        if variant == "halfspace":
            cons = data["constraints"]
            normals = np.array([_j2vec(c["a"]) for c in cons])
            offsets = np.array([float(c["b"]) for c in cons])
            return HalfspaceConvex(n, normals=normals, offsets=offsets)
        if variant == "ball_image":
            M = np.array([_j2vec(row) for row in data["matrix"]])
            return AffineBallImage(n, matrix=M, center=_j2vec(data["center"]))
        if variant == "polydisc":
            return Polydisc(n, center=_j2vec(data["center"]),
                            radii=np.asarray(data["radii"], dtype=float))
        if variant == "l1ball":
            return L1Ball(n, scale=float(data["scale"]))
        if variant == "siegel":
            return SiegelHalfSpace(n)
        if variant == "oracle":
            name = data["predicate"]
            meta = ORACLE_PREDICATES.get(name)
            if meta is None:
                raise ConfigInvalid(f"unknown oracle predicate {name!r}")
            if meta["n"] != n:
                raise ConfigInvalid(f"predicate {name!r} is defined for n={meta['n']}")
            return MembershipOracle(
                n, predicate=meta["predicate"],
                declared_class=data.get("class", meta["class"]),
                search_radius=float(data.get("search_radius", 1e6)),
                refine_iters=int(data.get("refine_iters", 3)),
                predicate_name=name,
                enclosing_polydisc=meta.get("enclosing_polydisc"))
    except HolovolError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"malformed {variant!r} domain config: {exc}") from exc
    raise ConfigInvalid(f"unknown domain variant {variant!r}")
