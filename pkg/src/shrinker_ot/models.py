"""Gradient shrinking soliton model geometries.

Three closed-form families, all normalized to tau = 1 so that
Ric + Hess f = g/2 and the weighted volume (4*pi)^(-n/2) e^(-f) dv integrates
to exactly one:

- gaussian: flat R^n with f = |x|^2/4,
- cylinder: S^m(rho) x R^k with rho^2 = 2(m-1), m = n-k >= 2, k >= 1,
- sphere:   round S^n of radius sqrt(2(n-1)) (Einstein, f constant).

Points are stored in ambient coordinates. Sphere-factor points are kept as
unit directions while the radius lives on the model, so the constraint
|x| = rho is exactly representable. Tangent vectors are plain length-n float
arrays in an orthonormal frame at the base point; for the cylinder the first
n-k components span the sphere factor and the last k the Euclidean one.
"""

import math

import numpy as np

from .errors import CutLocusError, DomainError
from .reports import make_report

# relative width of the safety shell kept clear of the cut radius
CUT_SHELL = 1e-6


def unit_sphere_area(d):
    """Surface area of the unit d-sphere sitting in R^(d+1)."""
    if d < 0 or d != int(d):
        raise ValueError("sphere dimension must be a nonnegative integer")
    d = int(d)
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def _as_batch(x, dim, name):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        if x.shape[0] != dim:
            raise ValueError(f"{name} must have length {dim}, got {x.shape[0]}")
        return x[None, :], True
    if x.ndim == 2:
        if x.shape[1] != dim:
            raise ValueError(f"{name} must have {dim} columns, got {x.shape[1]}")
        return x, False
    raise ValueError(f"{name} must be a vector or a batch of vectors")


def _unbatch(values, single):
    return values[0] if single else values


def _orthonormal_complement(u):
    """Columns: an orthonormal basis of the hyperplane orthogonal to unit u.

    Householder-based, deterministic: reflect e1 onto u and take the images of
    e2..ed. Falls back to the identity columns when u is (close to) e1.
    """
    d = u.shape[0]
    e1 = np.zeros(d)
    e1[0] = 1.0
    w = e1 - u
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        return np.eye(d)[:, 1:]
    w = w / nw
    H = np.eye(d) - 2.0 * np.outer(w, w)
    return H[:, 1:]


class ShrinkerModel:
    """Common interface; concrete geometry lives in the subclasses.

    Attributes shared by all models:
      kind                one of "gaussian", "cylinder", "sphere"
      n                   intrinsic dimension
      k                   Euclidean factor dimension (0 unless cylinder)
      sphere_radius       radius of the spherical factor, None for gaussian
      normalization_shift log of the raw weighted volume, added to the raw
                          potential so the weighted volume is exactly 1
      base_point          ambient coordinates of the base point p
      entropy             closed-form entropy mu of the model
    """

    kind = None

    # ---- potential and curvature -------------------------------------

    def potential(self, x):
        raise NotImplementedError

    def potential_gradient(self, x):
        """Gradient of the normalized potential, in ambient coordinates.

        The gradient is tangent to the model, so the ambient representation
        is also the intrinsic one.
        """
        raise NotImplementedError

    def scalar_curvature(self, x):
        raise NotImplementedError

    def hamilton_residual(self, x):
        """R + |grad f|^2 - f + mu; identically zero on a shrinker."""
        f = self.potential(x)
        g = np.atleast_2d(self.potential_gradient(x))
        sq = np.sum(g * g, axis=-1)
        res = self.scalar_curvature(x) + sq - f + self.entropy
        if np.ndim(f) == 0:
            return float(np.atleast_1d(res)[0])
        return res

    # ---- geometry ----------------------------------------------------

    def geodesic_distance(self, x, y):
        raise NotImplementedError

    def radius(self, x):
        """Distance from the base point."""
        return self.geodesic_distance(self.base_point, x)

    def exp_map(self, v):
        raise NotImplementedError

    def log_map(self, x):
        raise NotImplementedError

    def jacobian_density(self, v):
        """Density J(v) of the pulled-back volume against Lebesgue measure,
        with the flat r^(n-1) polar factor divided out."""
        raise NotImplementedError

    @property
    def cut_radius(self):
        """Tangent radius of the sphere-factor cut locus; inf when absent."""
        return math.inf

    # ---- base point handling -----------------------------------------

    def with_base(self, base_point):
        raise NotImplementedError

    def minimum_point(self):
        """A potential minimum nearest to the base point."""
        raise NotImplementedError

    def base_offset(self):
        """Euclidean-factor distance from the base to the minimum set."""
        raise NotImplementedError

    def is_minimum(self, tol=1e-8):
        g = self.potential_gradient(self.base_point)
        return float(np.linalg.norm(g)) <= tol

    # ---- misc --------------------------------------------------------

    def sample_points(self, rng, count):
        raise NotImplementedError

    @property
    def ambient_dim(self):
        return self.base_point.shape[0]

    def potential_at_base(self):
        return float(self.potential(self.base_point))

    def area_element_bound_check(self, grid_shape=(100, 100), radius_cap=None):
        """Check max J(v) <= e^(f(p) - mu) over a (r, theta) grid on Omega.

        theta mixes the direction between the sphere factor and the rest;
        points falling outside the cut shell are skipped.
        """
        nr, nt = grid_shape
        cap = radius_cap if radius_cap is not None else self._default_radius_cap()
        cut = self.cut_radius
        rs = np.linspace(cap / nr, cap, nr)
        ts = np.linspace(0.0, math.pi / 2.0, nt)
        rg, tg = np.meshgrid(rs, ts, indexing="ij")
        sphere_part = rg * np.sin(tg)
        keep = sphere_part < cut * (1.0 - CUT_SHELL)
        js = self._jacobian_from_sphere_radius(sphere_part[keep])
        lhs = float(np.max(js))
        rhs = float(math.exp(self.potential_at_base() - self.entropy))
        return make_report(
            "area-element", lhs, rhs, tolerance=1e-12,
            constants={
                "max_jacobian": lhs,
                "potential_at_base": self.potential_at_base(),
                "entropy": self.entropy,
            },
            discretization={
                "grid": [int(nr), int(nt)],
                "radius_cap": float(cap),
                "points_used": int(np.count_nonzero(keep)),
            },
        )

    def _jacobian_from_sphere_radius(self, s):
        """J as a function of the sphere-factor tangent radius alone."""
        raise NotImplementedError

    def _default_radius_cap(self):
        return 14.0

    def __repr__(self):
        extra = f", k={self.k}" if self.kind == "cylinder" else ""
        return f"ShrinkerModel({self.kind}, n={self.n}{extra})"


class GaussianModel(ShrinkerModel):
    """Flat R^n with potential |x|^2/4 centered at the origin."""

    kind = "gaussian"

    def __init__(self, n, base_point=None):
        if n < 1 or n != int(n):
            raise ValueError("gaussian model needs integer n >= 1")
        self.n = int(n)
        self.k = 0
        self.sphere_radius = None
        self.normalization_shift = 0.0
        self.entropy = 0.0
        if base_point is None:
            base_point = np.zeros(self.n)
        bp = np.asarray(base_point, dtype=float)
        if bp.shape != (self.n,):
            raise ValueError(f"base point must have shape ({self.n},)")
        self.base_point = bp.copy()
        self.base_point.flags.writeable = False

    def potential(self, x):
        xb, single = _as_batch(x, self.n, "point")
        f = 0.25 * np.sum(xb * xb, axis=1)
        return _unbatch(f, single)

    def potential_gradient(self, x):
        xb, single = _as_batch(x, self.n, "point")
        return _unbatch(0.5 * xb, single)

    def scalar_curvature(self, x):
        xb, single = _as_batch(x, self.n, "point")
        return _unbatch(np.zeros(xb.shape[0]), single)

    def geodesic_distance(self, x, y):
        xb, sx = _as_batch(x, self.n, "point")
        yb, sy = _as_batch(y, self.n, "point")
        d = np.linalg.norm(xb - yb, axis=1)
        return _unbatch(d, sx and sy)

    def exp_map(self, v):
        vb, single = _as_batch(v, self.n, "tangent vector")
        return _unbatch(self.base_point[None, :] + vb, single)

    def log_map(self, x):
        xb, single = _as_batch(x, self.n, "point")
        return _unbatch(xb - self.base_point[None, :], single)

    def jacobian_density(self, v):
        vb, single = _as_batch(v, self.n, "tangent vector")
        return _unbatch(np.ones(vb.shape[0]), single)

    def _jacobian_from_sphere_radius(self, s):
        return np.ones_like(np.asarray(s, dtype=float))

    def with_base(self, base_point):
        return GaussianModel(self.n, base_point)

    def minimum_point(self):
        return np.zeros(self.n)

    def base_offset(self):
        return float(np.linalg.norm(self.base_point))

    def sample_points(self, rng, count):
        return math.sqrt(2.0) * rng.standard_normal((count, self.n))


class CylinderModel(ShrinkerModel):
    """S^m(rho) x R^k with rho = sqrt(2(m-1)), m = n-k.

    Ambient coordinates: first m+1 entries are the unit direction of the
    sphere factor, last k entries the Euclidean coordinates y. The raw
    potential is |y|^2/4; the stored one is shifted so the weighted volume
    is 1.
    """

    kind = "cylinder"

    def __init__(self, n, k, base_point=None):
        if k < 1 or k != int(k):
            raise ValueError("cylinder model needs integer k >= 1")
        if n - k < 2 or n != int(n):
            raise ValueError("cylinder model needs n - k >= 2")
        self.n = int(n)
        self.k = int(k)
        self.m = self.n - self.k
        self.sphere_radius = math.sqrt(2.0 * (self.m - 1))
        # raw weighted volume: the (4 pi)^(-k/2) of the Euclidean factor
        # cancels against its Gaussian integral, leaving the sphere factor
        v_raw = ((4.0 * math.pi) ** (-self.m / 2.0)
                 * unit_sphere_area(self.m)
                 * self.sphere_radius ** self.m)
        self.normalization_shift = math.log(v_raw)
        self.entropy = self.normalization_shift - self.m / 2.0
        dim = self.m + 1 + self.k
        if base_point is None:
            base_point = np.zeros(dim)
            base_point[0] = 1.0
        bp = np.asarray(base_point, dtype=float)
        if bp.shape != (dim,):
            raise ValueError(f"base point must have shape ({dim},)")
        su = bp[: self.m + 1]
        nsu = np.linalg.norm(su)
        if abs(nsu - 1.0) > 1e-9:
            raise ValueError("sphere-factor part of the base point must be a unit direction")
        bp = bp.copy()
        bp[: self.m + 1] = su / nsu
        self.base_point = bp
        self.base_point.flags.writeable = False
        self._frame = _orthonormal_complement(self.base_point[: self.m + 1])

    def _split(self, xb):
        return xb[:, : self.m + 1], xb[:, self.m + 1:]

    def potential(self, x):
        xb, single = _as_batch(x, self.ambient_dim, "point")
        _, y = self._split(xb)
        f = 0.25 * np.sum(y * y, axis=1) + self.normalization_shift
        return _unbatch(f, single)

    def potential_gradient(self, x):
        xb, single = _as_batch(x, self.ambient_dim, "point")
        g = np.zeros_like(xb)
        g[:, self.m + 1:] = 0.5 * xb[:, self.m + 1:]
        return _unbatch(g, single)

    def scalar_curvature(self, x):
        xb, single = _as_batch(x, self.ambient_dim, "point")
        return _unbatch(np.full(xb.shape[0], self.m / 2.0), single)

    def geodesic_distance(self, x, y):
        xb, sx = _as_batch(x, self.ambient_dim, "point")
        yb, sy = _as_batch(y, self.ambient_dim, "point")
        sux, yx = self._split(xb)
        suy, yy = self._split(yb)
        c = np.clip(np.sum(sux * suy, axis=1), -1.0, 1.0)
        ds = self.sphere_radius * np.arccos(c)
        de = np.linalg.norm(yx - yy, axis=1)
        return _unbatch(np.sqrt(ds * ds + de * de), sx and sy)

    @property
    def cut_radius(self):
        return math.pi * self.sphere_radius

    def exp_map(self, v):
        vb, single = _as_batch(v, self.n, "tangent vector")
        vs = vb[:, : self.m]
        ve = vb[:, self.m:]
        su0 = self.base_point[: self.m + 1]
        y0 = self.base_point[self.m + 1:]
        r = np.linalg.norm(vs, axis=1)
        ang = r / self.sphere_radius
        out = np.empty((vb.shape[0], self.ambient_dim))
        # direction in the ambient sphere tangent; safe at r = 0
        with np.errstate(invalid="ignore", divide="ignore"):
            dirs = np.where(r[:, None] > 0.0, vs / np.maximum(r, 1e-300)[:, None], 0.0)
        amb_dir = dirs @ self._frame.T
        out[:, : self.m + 1] = (np.cos(ang)[:, None] * su0[None, :]
                                + np.sin(ang)[:, None] * amb_dir)
        out[:, self.m + 1:] = y0[None, :] + ve
        return _unbatch(out, single)

    def log_map(self, x):
        xb, single = _as_batch(x, self.ambient_dim, "point")
        su, y = self._split(xb)
        su0 = self.base_point[: self.m + 1]
        y0 = self.base_point[self.m + 1:]
        c = np.clip(su @ su0, -1.0, 1.0)
        ang = np.arccos(c)
        if np.any(ang >= math.pi * (1.0 - CUT_SHELL)):
            raise CutLocusError(
                "point is antipodal to the base on the sphere factor; "
                "log map is not defined there")
        w = su - c[:, None] * su0[None, :]
        nw = np.linalg.norm(w, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            dirs = np.where(nw[:, None] > 0.0, w / np.maximum(nw, 1e-300)[:, None], 0.0)
        vs = (self.sphere_radius * ang)[:, None] * (dirs @ self._frame)
        out = np.concatenate([vs, y - y0[None, :]], axis=1)
        return _unbatch(out, single)

    def jacobian_density(self, v):
        vb, single = _as_batch(v, self.n, "tangent vector")
        s = np.linalg.norm(vb[:, : self.m], axis=1)
        if np.any(s >= self.cut_radius * (1.0 - CUT_SHELL)):
            raise DomainError("tangent vector reaches the cut locus of the sphere factor")
        return _unbatch(self._jacobian_from_sphere_radius(s), single)

    def _jacobian_from_sphere_radius(self, s):
        # sin(t)/t in a numerically exact form: np.sinc(t/pi)
        t = np.asarray(s, dtype=float) / self.sphere_radius
        return np.sinc(t / math.pi) ** (self.m - 1)

    def with_base(self, base_point):
        return CylinderModel(self.n, self.k, base_point)

    def minimum_point(self):
        p = np.array(self.base_point)
        p[self.m + 1:] = 0.0
        return p

    def base_offset(self):
        return float(np.linalg.norm(self.base_point[self.m + 1:]))

    def sample_points(self, rng, count):
        su = rng.standard_normal((count, self.m + 1))
        su /= np.linalg.norm(su, axis=1, keepdims=True)
        y = math.sqrt(2.0) * rng.standard_normal((count, self.k))
        return np.concatenate([su, y], axis=1)


class SphereModel(ShrinkerModel):
    """Round S^n of radius sqrt(2(n-1)); the potential is constant."""

    kind = "sphere"

    def __init__(self, n, base_point=None):
        if n < 2 or n != int(n):
            raise ValueError("sphere model needs integer n >= 2")
        self.n = int(n)
        self.k = 0
        self.sphere_radius = math.sqrt(2.0 * (self.n - 1))
        v_raw = ((4.0 * math.pi) ** (-self.n / 2.0)
                 * unit_sphere_area(self.n)
                 * self.sphere_radius ** self.n)
        self.normalization_shift = math.log(v_raw)
        self.entropy = self.normalization_shift - self.n / 2.0
        if base_point is None:
            base_point = np.zeros(self.n + 1)
            base_point[0] = 1.0
        bp = np.asarray(base_point, dtype=float)
        if bp.shape != (self.n + 1,):
            raise ValueError(f"base point must have shape ({self.n + 1},)")
        nb = np.linalg.norm(bp)
        if abs(nb - 1.0) > 1e-9:
            raise ValueError("sphere points are unit directions")
        self.base_point = (bp / nb).copy()
        self.base_point.flags.writeable = False
        self._frame = _orthonormal_complement(self.base_point)

    def potential(self, x):
        xb, single = _as_batch(x, self.n + 1, "point")
        return _unbatch(np.full(xb.shape[0], self.normalization_shift), single)

    def potential_gradient(self, x):
        xb, single = _as_batch(x, self.n + 1, "point")
        return _unbatch(np.zeros_like(xb), single)

    def scalar_curvature(self, x):
        xb, single = _as_batch(x, self.n + 1, "point")
        return _unbatch(np.full(xb.shape[0], self.n / 2.0), single)

    def geodesic_distance(self, x, y):
        xb, sx = _as_batch(x, self.n + 1, "point")
        yb, sy = _as_batch(y, self.n + 1, "point")
        c = np.clip(np.sum(xb * yb, axis=1), -1.0, 1.0)
        return _unbatch(self.sphere_radius * np.arccos(c), sx and sy)

    @property
    def cut_radius(self):
        return math.pi * self.sphere_radius

    def exp_map(self, v):
        vb, single = _as_batch(v, self.n, "tangent vector")
        r = np.linalg.norm(vb, axis=1)
        ang = r / self.sphere_radius
        with np.errstate(invalid="ignore", divide="ignore"):
            dirs = np.where(r[:, None] > 0.0, vb / np.maximum(r, 1e-300)[:, None], 0.0)
        amb_dir = dirs @ self._frame.T
        out = (np.cos(ang)[:, None] * self.base_point[None, :]
               + np.sin(ang)[:, None] * amb_dir)
        return _unbatch(out, single)

    def log_map(self, x):
        xb, single = _as_batch(x, self.n + 1, "point")
        c = np.clip(xb @ self.base_point, -1.0, 1.0)
        ang = np.arccos(c)
        if np.any(ang >= math.pi * (1.0 - CUT_SHELL)):
            raise CutLocusError("point is antipodal to the base; log map undefined")
        w = xb - c[:, None] * self.base_point[None, :]
        nw = np.linalg.norm(w, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            dirs = np.where(nw[:, None] > 0.0, w / np.maximum(nw, 1e-300)[:, None], 0.0)
        out = (self.sphere_radius * ang)[:, None] * (dirs @ self._frame)
        return _unbatch(out, single)

    def jacobian_density(self, v):
        vb, single = _as_batch(v, self.n, "tangent vector")
        s = np.linalg.norm(vb, axis=1)
        if np.any(s >= self.cut_radius * (1.0 - CUT_SHELL)):
            raise DomainError("tangent vector reaches the cut locus")
        return _unbatch(self._jacobian_from_sphere_radius(s), single)

    def _jacobian_from_sphere_radius(self, s):
        t = np.asarray(s, dtype=float) / self.sphere_radius
        return np.sinc(t / math.pi) ** (self.n - 1)

    def _default_radius_cap(self):
        return math.pi * self.sphere_radius

    def with_base(self, base_point):
        return SphereModel(self.n, base_point)

    def minimum_point(self):
        return np.array(self.base_point)

    def base_offset(self):
        return 0.0

    def sample_points(self, rng, count):
        x = rng.standard_normal((count, self.n + 1))
        return x / np.linalg.norm(x, axis=1, keepdims=True)


def make_model(kind, n, k=0, base_point=None):
    """Factory for the three model families.

    kind: "gaussian" | "cylinder" | "sphere". k only applies to the cylinder.
    """
    if kind == "gaussian":
        return GaussianModel(n, base_point)
    if kind == "cylinder":
        return CylinderModel(n, k, base_point)
    if kind == "sphere":
        return SphereModel(n, base_point)
    raise ValueError(f"unknown model kind {kind!r}")
