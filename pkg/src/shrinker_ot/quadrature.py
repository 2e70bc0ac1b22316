"""Deterministic discretizations of the model measures.

Three node schemes:

- "polar": Gauss-Legendre radial panels times equal-weight sphere designs
  (exact t-designs: antipodal pair, equally spaced circle, icosahedron,
  24-cell), available for dimensions 1 through 4. The default; deterministic
  nodes keep transport results reproducible.
- "tensor": Gauss-Legendre per axis, the first axis resolved at the
  resolution knob and the remaining axes kept coarse. Aimed at studies of
  densities that vary mainly along one axis (translated Gaussians); the
  first-axis transport error then decays like 1/resolution with no angular
  quantization term.
- "montecarlo": seeded importance sampling from the Gaussian, for stress
  tests; resolution is the atom count.

A DiscreteMeasure never stores negative or exactly-zero weights; the
weighted-volume normalization means raw masses come out near 1 and callers
renormalize when a solver requires exact probability vectors.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import models as _models
from ._integrals import tail_integral
from .errors import DomainError, NumericError
from .models import CUT_SHELL, ShrinkerModel, unit_sphere_area

FOUR_PI = 4.0 * math.pi

DEFAULT_RESOLUTION = {"gaussian": 64, "cylinder": 32, "sphere": 48}

# fixed radial counts for the integral-grade grids (quadrature-exactness
# workloads: masses, moments, entropy cross-checks)
_INTEGRAL_MAIN = 60
_INTEGRAL_MID = 16
_INTEGRAL_OUTER = 8


# ----------------------------------------------------------------------
# discrete measures


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atoms with positive weights on the tangent space or on a model.

    space is "tangent" or "manifold"; manifold measures carry their model so
    geodesic costs can be formed. meta records scheme, resolution and the
    estimated truncation tail.
    """

    points: np.ndarray
    weights: np.ndarray
    total_mass: float = 0.0
    space: str = "tangent"
    model: ShrinkerModel | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=float))
        if pts.ndim != 2 or w.ndim != 1 or pts.shape[0] != w.shape[0]:
            raise ValueError("points must be (N, d) and weights (N,)")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(pts)):
            raise NumericError("non-finite atom data")
        if np.any(w < 0.0):
            raise ValueError("negative weights are not allowed")
        keep = w > 0.0
        if not np.any(keep):
            raise ValueError("a discrete measure needs at least one atom")
        if not np.all(keep):
            pts = pts[keep]
            w = w[keep]
            rad = self.meta.get("radius")
            if rad is not None and np.shape(rad)[0] == keep.shape[0]:
                meta = dict(self.meta)
                meta["radius"] = np.asarray(rad)[keep]
                object.__setattr__(self, "meta", meta)
        pts = pts.copy()
        w = w.copy()
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total_mass", float(np.sum(w)))

    @property
    def count(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def normalized(self):
        """Copy with total mass exactly 1 (weights divided by the sum)."""
        return DiscreteMeasure(self.points, self.weights / self.total_mass,
                               0.0, self.space, self.model, dict(self.meta))

    def radii(self):
        """Distance of each atom from the origin / base point."""
        if self.space == "tangent":
            return np.linalg.norm(self.points, axis=1)
        if "radius" in self.meta:
            return np.asarray(self.meta["radius"])
        if self.model is None:
            raise ValueError("manifold measure without model or stored radii")
        return self.model.radius(self.points)

    def to_csv(self, path):
        """One atom per row: coordinates..., weight."""
        data = np.column_stack([self.points, self.weights])
        header = ",".join([f"x{i}" for i in range(self.dim)] + ["weight"])
        np.savetxt(path, data, delimiter=",", header=header, comments="")


# ----------------------------------------------------------------------
# node building blocks


def gauss_legendre_panel(lo, hi, count):
    """Gauss-Legendre nodes/weights on [lo, hi]."""
    if count < 1:
        return np.empty(0), np.empty(0)
    x, w = np.polynomial.legendre.leggauss(int(count))
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _radial_nodes(panels):
    """panels: list of (lo, hi, count); concatenated GL nodes and weights."""
    rs, ws = [], []
    for lo, hi, count in panels:
        r, w = gauss_legendre_panel(lo, hi, count)
        rs.append(r)
        ws.append(w)
    return np.concatenate(rs), np.concatenate(ws)


def _icosahedron_vertices():
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    raw = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            raw.append((0.0, a, b))
            raw.append((a, b, 0.0))
            raw.append((b, 0.0, a))
    v = np.array(raw)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _tetrahedron_vertices():
    v = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0],
                  [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    return v / math.sqrt(3.0)


def _cell24_vertices():
    out = []
    for i in range(4):
        for j in range(i + 1, 4):
            for si in (-1.0, 1.0):
                for sj in (-1.0, 1.0):
                    p = [0.0] * 4
                    p[i] = si
                    p[j] = sj
                    out.append(p)
    return np.array(out) / math.sqrt(2.0)


def sphere_design(dim, count=None):
    """Equal-weight nodes on the unit sphere in R^dim, weights summing to
    the sphere area.

    count selects the node count on the circle (dim 2); for dim 3 the value
    4 selects the tetrahedron instead of the icosahedron (used to keep
    transport-grade product grids below the exact-solver support cap).
    """
    if dim == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif dim == 2:
        nn = int(count) if count else 32
        ang = 2.0 * math.pi * np.arange(nn) / nn
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    elif dim == 3:
        dirs = _tetrahedron_vertices() if count == 4 else _icosahedron_vertices()
    elif dim == 4:
        dirs = _cell24_vertices()
    else:
        raise DomainError("sphere designs available for dimensions 1 to 4 only")
    w = np.full(dirs.shape[0], unit_sphere_area(dim - 1) / dirs.shape[0])
    return dirs, w


@dataclass(frozen=True)
class Layout:
    """Tangent-space nodes with Lebesgue volume weights."""

    points: np.ndarray
    vol_weights: np.ndarray
    scheme: str
    resolution: int
    radius_cap: float
    tail: float
    meta: dict = field(default_factory=dict)


def _polar_product(radial, angular):
    r, wr = radial
    dirs, wd = angular
    dim = dirs.shape[1]
    pts = r[:, None, None] * dirs[None, :, :]
    vol = (wr * r ** (dim - 1))[:, None] * wd[None, :]
    return pts.reshape(-1, dim), vol.reshape(-1)


def _gauss_tail_mass(dim, cap):
    """Gaussian mass outside the centered ball of the given radius."""
    return (FOUR_PI ** (-dim / 2.0) * unit_sphere_area(dim - 1)
            * tail_integral(cap, dim - 1, 0.0))


def polar_layout(n, resolution, radius_cap=14.0, circle_count=32,
                 panels=None, scheme="polar"):
    """Full-space polar grid for dimension n (n <= 4).

    Radial panels default to an inner [0, cap/2] and outer [cap/2, cap]
    split whose counts sum to the resolution knob.
    """
    if n < 1 or n > 4:
        raise DomainError("polar layouts cover dimensions 1 to 4 only")
    resolution = int(resolution)
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    if panels is None:
        outer = max(resolution // 8, 4)
        panels = [(0.0, radius_cap / 2.0, resolution - outer),
                  (radius_cap / 2.0, radius_cap, outer)]
    radial = _radial_nodes(panels)
    angular = sphere_design(n, circle_count)
    pts, vol = _polar_product(radial, angular)
    cap = max(hi for _, hi, _ in panels)
    return Layout(pts, vol, scheme, resolution, cap, _gauss_tail_mass(n, cap),
                  meta={"panels": [tuple(p) for p in panels],
                        "angular_count": angular[0].shape[0]})


def _product_layout(layout_a, layout_b, scheme, resolution):
    pa, va = layout_a.points, layout_a.vol_weights
    pb, vb = layout_b.points, layout_b.vol_weights
    na, nb = pa.shape[0], pb.shape[0]
    pts = np.concatenate([np.repeat(pa, nb, axis=0), np.tile(pb, (na, 1))], axis=1)
    vol = (va[:, None] * vb[None, :]).reshape(-1)
    tail = layout_a.tail + layout_b.tail
    return Layout(pts, vol, scheme, resolution,
                  max(layout_a.radius_cap, layout_b.radius_cap), tail,
                  meta={"factors": [layout_a.meta, layout_b.meta]})


def tensor_layout(n, resolution, radius_cap=14.0, cross_count=4):
    """Axis-aligned grid: GL on [0, cap] mirrored, first axis at the
    resolution knob, remaining axes at cross_count nodes per half-axis."""
    resolution = int(resolution)
    axes = []
    for axis in range(n):
        cnt = resolution if axis == 0 else cross_count
        r, w = gauss_legendre_panel(0.0, radius_cap, cnt)
        nodes = np.concatenate([-r[::-1], r])
        wts = np.concatenate([w[::-1], w])
        axes.append((nodes, wts))
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    pts = np.column_stack([g.reshape(-1) for g in grids])
    vol = np.ones(pts.shape[0])
    shape = [a[0].shape[0] for a in axes]
    for axis in range(n):
        wg = axes[axis][1]
        reshape = [1] * n
        reshape[axis] = shape[axis]
        vol = vol * np.broadcast_to(wg.reshape(reshape),
                                    shape).reshape(-1)
    # per-axis Gaussian tail beyond the cap, union bound
    tail = n * (2.0 * FOUR_PI ** (-0.5) * tail_integral(radius_cap, 0, 0.0))
    return Layout(pts, vol, "tensor", resolution, radius_cap, tail,
                  meta={"shape": shape})


def _cylinder_u_layout(model, resolution, grade):
    cut = model.cut_radius
    if grade == "integral":
        panels = [(0.0, cut, resolution),
                  (cut, cut + 3.0, max(resolution // 4, 4)),
                  (cut + 3.0, cut + 6.0, max(resolution // 8, 2))]
        circle = 16
    else:
        panels = [(0.0, cut, resolution),
                  (cut, cut + 3.0, 4),
                  (cut + 3.0, cut + 6.0, 2)]
        circle = 4
    return polar_layout(model.m, max(resolution, 8), radius_cap=cut + 6.0,
                        circle_count=circle, panels=panels)


def _cylinder_w_layout(model, grade, radius_cap, resolution):
    cap = radius_cap if radius_cap is not None else 14.0
    if grade == "integral":
        panels = [(0.0, cap / 2.0, max(resolution - 12, 6)),
                  (cap / 2.0, cap, max(resolution // 4, 4))]
        circle = 16
    else:
        # fixed small Euclidean factor: sized so the u resolution can double
        # while the product stays under the exact-solver support cap
        panels = [(0.0, 0.45 * cap, 5), (0.45 * cap, 0.72 * cap, 2)]
        circle = 4
    return polar_layout(model.k, 8, radius_cap=cap, circle_count=circle,
                        panels=panels)


def tangent_layout(model, resolution=None, grade="transport", radius_cap=None):
    """Model-aligned tangent-space layout.

    For product models the grid is a product of polar factors with a radial
    panel split at the cut radius, so pullback and Gaussian clouds built on
    it share their ray structure. grade "transport" keeps supports small
    enough for the exact solver (including the internal resolution doubling);
    grade "integral" targets quadrature exactness instead.
    """
    if model.n > 4:
        raise DomainError("tangent discretization covers n <= 4 only")
    if resolution is None:
        resolution = (_INTEGRAL_MAIN if grade == "integral"
                      else DEFAULT_RESOLUTION[model.kind])
    resolution = int(resolution)
    if model.kind == "gaussian":
        cap = radius_cap if radius_cap is not None else 14.0
        if grade == "integral":
            panels = [(0.0, cap / 2.0, resolution),
                      (cap / 2.0, cap, max(resolution // 4, 4))]
            return polar_layout(model.n, resolution, radius_cap=cap,
                                panels=panels)
        return polar_layout(model.n, resolution, radius_cap=cap)
    if model.kind == "cylinder":
        lu = _cylinder_u_layout(model, resolution, grade)
        lw = _cylinder_w_layout(model, grade, radius_cap, resolution)
        return _product_layout(lu, lw, "polar", resolution)
    if model.kind == "sphere":
        cut = model.cut_radius
        if grade == "integral":
            panels = [(0.0, cut, resolution),
                      (cut, cut + 3.0, max(resolution // 4, 4)),
                      (cut + 3.0, cut + 6.0, max(resolution // 8, 2))]
        else:
            panels = [(0.0, cut, resolution),
                      (cut, cut + 3.0, 4),
                      (cut + 3.0, cut + 6.0, 2)]
        return polar_layout(model.n, resolution, radius_cap=cut + 6.0,
                            circle_count=32, panels=panels)
    raise ValueError(f"unknown model kind {model.kind!r}")


# ----------------------------------------------------------------------
# measure construction


def _gaussian_weights(pts, vol, n):
    c = FOUR_PI ** (-n / 2.0)
    f0 = 0.25 * np.sum(pts * pts, axis=1)
    return vol * (c * np.exp(-f0))


def _pullback_weights(model, pts, vol):
    n = model.n
    c = FOUR_PI ** (-n / 2.0)
    cut = model.cut_radius
    if math.isfinite(cut):
        if model.kind == "cylinder":
            s = np.linalg.norm(pts[:, : model.m], axis=1)
        else:
            s = np.linalg.norm(pts, axis=1)
        inside = s < cut * (1.0 - CUT_SHELL)
    else:
        inside = np.ones(pts.shape[0], dtype=bool)
    w = np.zeros(pts.shape[0])
    if np.any(inside):
        sub = pts[inside]
        jac = model.jacobian_density(sub)
        f = model.potential(model.exp_map(sub))
        w[inside] = vol[inside] * ((c * jac) * np.exp(-f))
    return w


def discretize_gaussian(n, resolution=None, scheme="polar", radius_cap=None,
                        seed=None, layout=None, circle_count=32):
    """Discretize the Gaussian measure (density (4 pi)^(-n/2) e^(-|v|^2/4))
    on the tangent space R^n.

    Raw quadrature mass is kept (close to 1); callers needing an exact
    probability vector renormalize. Pass layout to reuse a model-aligned
    node set.
    """
    if layout is not None:
        pass
    elif scheme == "polar":
        cap = radius_cap if radius_cap is not None else 14.0
        layout = polar_layout(n, resolution or DEFAULT_RESOLUTION["gaussian"],
                              radius_cap=cap, circle_count=circle_count)
    elif scheme == "tensor":
        cap = radius_cap if radius_cap is not None else 14.0
        layout = tensor_layout(n, resolution or DEFAULT_RESOLUTION["gaussian"],
                               radius_cap=cap)
    elif scheme == "montecarlo":
        count = int(resolution) if resolution else 4096
        rng = np.random.default_rng(seed)
        pts = math.sqrt(2.0) * rng.standard_normal((count, n))
        w = np.full(count, 1.0 / count)
        return DiscreteMeasure(pts, w, 0.0, "tangent", None,
                               {"scheme": "montecarlo", "resolution": count,
                                "seed": seed, "truncation_tail": 0.0})
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    w = _gaussian_weights(layout.points, layout.vol_weights, n)
    return DiscreteMeasure(layout.points, w, 0.0, "tangent", None,
                           {"scheme": layout.scheme,
                            "resolution": layout.resolution,
                            "radius_cap": layout.radius_cap,
                            "truncation_tail": layout.tail})


def discretize_pullback(model, resolution=None, scheme="polar",
                        grade="transport", radius_cap=None, seed=None,
                        layout=None):
    """Discretize the pullback of the weighted volume measure to the tangent
    space at the model's base point.

    Density (4 pi)^(-n/2) chi_Omega J(v) e^(-f(exp v)); atoms outside the
    pre-cut-locus domain get zero weight and are dropped.
    """
    if scheme == "montecarlo":
        count = int(resolution) if resolution else 4096
        rng = np.random.default_rng(seed)
        pts = math.sqrt(2.0) * rng.standard_normal((count, model.n))
        ratio = np.zeros(count)
        cut = model.cut_radius
        if math.isfinite(cut):
            if model.kind == "cylinder":
                s = np.linalg.norm(pts[:, : model.m], axis=1)
            else:
                s = np.linalg.norm(pts, axis=1)
            inside = s < cut * (1.0 - CUT_SHELL)
        else:
            inside = np.ones(count, dtype=bool)
        sub = pts[inside]
        f = model.potential(model.exp_map(sub))
        f0 = 0.25 * np.sum(sub * sub, axis=1)
        ratio[inside] = model.jacobian_density(sub) * np.exp(f0 - f)
        return DiscreteMeasure(pts, ratio / count, 0.0, "tangent", None,
                               {"scheme": "montecarlo", "resolution": count,
                                "seed": seed, "truncation_tail": 0.0})
    if layout is None:
        layout = tangent_layout(model, resolution, grade=grade,
                                radius_cap=radius_cap)
    w = _pullback_weights(model, layout.points, layout.vol_weights)
    return DiscreteMeasure(layout.points, w, 0.0, "tangent", None,
                           {"scheme": layout.scheme,
                            "resolution": layout.resolution,
                            "radius_cap": layout.radius_cap,
                            "truncation_tail": layout.tail})


def _angle_from_base_sphere(model, phi_panels, design_count):
    """Sphere-factor nodes parameterized by the angle from the base
    direction; the geodesic radius rho*phi is exact by construction."""
    rho = model.sphere_radius
    sdim = model.m + 1 if model.kind == "cylinder" else model.n + 1
    idim = sdim - 1
    base_dir = model.base_point[:sdim]
    frame = model._frame
    phi, wphi = _radial_nodes(phi_panels)
    dirs, wdirs = sphere_design(idim, design_count)
    amb = dirs @ frame.T
    pts = (np.cos(phi)[:, None, None] * base_dir[None, None, :]
           + np.sin(phi)[:, None, None] * amb[None, :, :])
    # distance sphere at angle phi: radius rho*sin(phi), arc element rho*dphi
    area = (rho ** (idim - 1) * np.sin(phi) ** (idim - 1) * wphi * rho)
    vol = area[:, None] * wdirs[None, :]
    radius = np.broadcast_to((rho * phi)[:, None], vol.shape)
    return (pts.reshape(-1, sdim), vol.reshape(-1), radius.reshape(-1))


def discretize_manifold(model, resolution=None, grade="integral",
                        radius_cap=None):
    """Discretize the weighted volume measure on the model itself.

    The coordinates are genuinely different from the tangent-space route
    (angle from the base point on sphere factors), which is what makes the
    second-moment identity a two-route check. Exact base distances are
    stored in meta["radius"].
    """
    if resolution is None:
        resolution = (_INTEGRAL_MAIN if grade == "integral"
                      else DEFAULT_RESOLUTION[model.kind])
    resolution = int(resolution)
    n = model.n
    c = FOUR_PI ** (-n / 2.0)
    if model.kind == "gaussian":
        lay = tangent_layout(model, resolution, grade=grade,
                             radius_cap=radius_cap)
        pts = model.base_point[None, :] + lay.points
        w = lay.vol_weights * (c * np.exp(-model.potential(pts)))
        radius = np.linalg.norm(lay.points, axis=1)
        return DiscreteMeasure(pts, w, 0.0, "manifold", model,
                               {"scheme": "polar", "grade": grade,
                                "resolution": lay.resolution,
                                "radius": radius,
                                "truncation_tail": lay.tail})
    if model.kind == "cylinder":
        nphi = resolution if grade == "integral" else max(resolution, 16)
        dcount = 16 if grade == "integral" else 8
        sphere_pts, sphere_vol, sphere_rad = _angle_from_base_sphere(
            model, [(0.0, math.pi, nphi)], dcount)
        lw = _cylinder_w_layout(model, grade, radius_cap, resolution)
        y0 = model.base_point[model.m + 1:]
        ns, ny = sphere_pts.shape[0], lw.points.shape[0]
        pts = np.concatenate(
            [np.repeat(sphere_pts, ny, axis=0),
             np.tile(y0[None, :] + lw.points, (ns, 1))], axis=1)
        vol = (sphere_vol[:, None] * lw.vol_weights[None, :]).reshape(-1)
        dy = np.linalg.norm(lw.points, axis=1)
        radius = np.sqrt((sphere_rad[:, None] ** 2 + dy[None, :] ** 2)).reshape(-1)
        f = model.potential(pts)
        w = vol * (c * np.exp(-f))
        return DiscreteMeasure(pts, w, 0.0, "manifold", model,
                               {"scheme": "angle-from-base", "grade": grade,
                                "resolution": int(nphi), "radius": radius,
                                "truncation_tail": lw.tail})
    if model.kind == "sphere":
        nphi = resolution if grade == "integral" else max(resolution, 16)
        dcount = 32 if grade == "integral" else 16
        pts, vol, radius = _angle_from_base_sphere(
            model, [(0.0, math.pi, nphi)], dcount)
        w = vol * (c * np.exp(-model.potential(pts)))
        return DiscreteMeasure(pts, w, 0.0, "manifold", model,
                               {"scheme": "angle-from-base", "grade": grade,
                                "resolution": int(nphi), "radius": radius,
                                "truncation_tail": 0.0})
    raise ValueError(f"unknown model kind {model.kind!r}")


# ----------------------------------------------------------------------
# operations


def restrict(measure, predicate):
    """Restrict to the atoms where predicate holds, renormalized to mass 1.

    predicate is either a callable mapping the (N, d) atom array to a boolean
    mask, or a number s meaning the tail set {distance from base >= s}.
    Returns (restricted measure, raw retained mass). The raw retained mass of
    a probability input is the measure of the retained set.
    """
    if callable(predicate):
        keep = np.asarray(predicate(measure.points), dtype=bool)
        if keep.shape != (measure.count,):
            raise ValueError("predicate must produce one flag per atom")
        label = "predicate"
    else:
        keep = measure.radii() >= float(predicate)
        label = float(predicate)
    if not np.any(keep):
        raise DomainError("restriction retains no atoms")
    retained = float(np.sum(measure.weights[keep]))
    w = measure.weights[keep]
    meta = dict(measure.meta)
    if "radius" in meta:
        meta["radius"] = np.asarray(meta["radius"])[keep]
    meta["restricted_to"] = label
    meta["retained_fraction"] = retained / measure.total_mass
    return (DiscreteMeasure(measure.points[keep], w / np.sum(w), 0.0,
                            measure.space, measure.model, meta), retained)


def integrate(measure, integrand):
    """Sum of weight * integrand(point) over the atoms.

    integrand maps an (N, d) array to an (N,) array (or a scalar-valued
    function applied per row if it cannot broadcast).
    """
    vals = None
    try:
        out = np.asarray(integrand(measure.points), dtype=float)
        if out.shape == (measure.count,):
            vals = out
    except (TypeError, ValueError, IndexError):
        vals = None
    if vals is None:
        vals = np.array([float(integrand(p)) for p in measure.points])
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NumericError(
            f"non-finite integrand at atom {i}, point {measure.points[i]}")
    return float(np.sum(measure.weights * vals))


def second_moment(measure):
    """Integral of the squared base distance, normalized to mass 1."""
    rad = measure.radii()
    return float(np.sum(measure.weights * rad * rad) / measure.total_mass)


# ----------------------------------------------------------------------
# growth constants, moments, growth bound


def _worst_profile(model, lo, hi, count=2048):
    """(r, f) with f the infimum of the potential over the geodesic sphere
    of radius r around the base point; closed form per family.

    Fitting a linear-growth constant against this profile makes the fit
    valid for every point at that distance, whatever the direction.
    """
    if model.kind == "sphere":
        # nothing lives beyond the diameter
        hi = min(hi, model.cut_radius)
    r = np.linspace(lo, hi, count)
    return r, _worst_profile_at(model, r)


def _worst_profile_at(model, r):
    """Worst-direction potential values at the given radii."""
    if model.kind == "gaussian":
        off = model.base_offset()
        return 0.25 * (r - off) ** 2
    if model.kind == "sphere":
        return np.full_like(r, model.normalization_shift)
    # cylinder: r^2 = (sphere part)^2 + t^2 with the sphere part capped at
    # the cut radius; at Euclidean displacement t the smallest |y| is |t - off|
    cut = model.cut_radius
    off = model.base_offset()
    t_lo = np.sqrt(np.maximum(r * r - cut * cut, 0.0))
    t = np.clip(off, t_lo, r)
    return 0.25 * (t - off) ** 2 + model.normalization_shift


def growth_constants(model, r0=1.0):
    """Constants (A, B, C, lam) of the weighted volume growth bound.

    C: smallest C >= 0 with f >= r^2/4 - C r for r >= r0 on a dense
    worst-direction grid, inflated 5%. lam = max(0, -lam1) with
    lam1 = 2*lam0 - r0^2/6 + C*r0 and lam0 = inf over the r0-ball of f.
    """
    r, f = _worst_profile(model, r0,
                          max(4.0 * r0, 3.0 * model._default_radius_cap()))
    c_needed = np.max((0.25 * r * r - f) / r)
    C = 1.05 * max(c_needed, 0.0)
    # exact infimum of f over the closed r0-ball, per family
    if model.kind == "gaussian":
        lam0 = 0.25 * max(model.base_offset() - r0, 0.0) ** 2
    elif model.kind == "cylinder":
        lam0 = (0.25 * max(model.base_offset() - r0, 0.0) ** 2
                + model.normalization_shift)
    else:
        lam0 = model.normalization_shift
    lam1 = 2.0 * lam0 - 0.5 * r0 * r0 / 3.0 + C * r0
    lam = max(0.0, -lam1)
    ball = discretize_manifold(model, grade="integral")
    rad = ball.radii()
    inside = rad <= r0
    A = float(np.sum(ball.weights[inside])) * FOUR_PI ** (model.n / 2.0)
    B = unit_sphere_area(model.n - 1) * math.exp(lam + model.potential_at_base())
    return {"A": A, "B": B, "C": float(C), "lam": float(lam),
            "lam0": float(lam0), "lam1": float(lam1), "r0": float(r0)}


@dataclass(frozen=True)
class MomentResult:
    order: float
    value: float
    tail_bound: float
    radius_cap: float

    def __float__(self):
        return self.value


def moments(model, k, radius_cap=None, resolution=None):
    """k-th moment of the base distance under the normalized weighted
    measure, truncated at radius_cap, with the tail bound that the growth
    estimate gives for the truncated part."""
    if not k > 0:
        raise ValueError("moment order must be positive")
    if radius_cap is None:
        radius_cap = model._default_radius_cap()
    meas = discretize_manifold(model, resolution=resolution, grade="integral",
                               radius_cap=max(radius_cap, 14.0))
    rad = meas.radii()
    inside = rad <= radius_cap
    value = float(np.sum(meas.weights[inside] * rad[inside] ** k)
                  / meas.total_mass)
    if radius_cap >= model.cut_radius and model.kind == "sphere":
        tail = 0.0
    else:
        gc = growth_constants(model)
        tail = (FOUR_PI ** (-model.n / 2.0) * gc["B"]
                * tail_integral(radius_cap, k + model.n - 1, gc["C"]))
    return MomentResult(float(k), value, float(tail), float(radius_cap))


def growth_bound_check(model, phi, R, r0=1.0, resolution=None):
    """Check the weighted volume growth bound for an increasing weight phi.

    LHS: integral of phi(r) e^(-f) over the radius-R ball. RHS:
    A phi(r0) + B * integral_r0^R phi(r) r^(n-1) e^(-r^2/4 + C r) dr.
    """
    from .reports import make_report
    from scipy.integrate import quad

    if R < r0:
        raise ValueError("R must be at least r0")
    ts = np.linspace(0.0, R, 256)
    vals = np.array([float(phi(t)) for t in ts])
    if np.any(np.diff(vals) < -1e-12):
        raise ValueError("phi must be nondecreasing on [0, R]")
    gc = growth_constants(model, r0=r0)
    meas = discretize_manifold(model, resolution=resolution, grade="integral",
                               radius_cap=max(R + 2.0, 14.0))
    rad = meas.radii()
    inside = rad <= R
    lhs = float(np.sum(meas.weights[inside]
                       * np.array([float(phi(t)) for t in rad[inside]]))
                * FOUR_PI ** (model.n / 2.0))
    C = gc["C"]

    def integrand(r):
        return float(phi(r)) * r ** (model.n - 1) * math.exp(-0.25 * r * r + C * r)

    tail_int, _ = quad(integrand, r0, R, epsabs=1e-14, epsrel=1e-10, limit=200)
    rhs = gc["A"] * float(phi(r0)) + gc["B"] * tail_int
    tol = 1e-9 * max(1.0, abs(rhs))
    return make_report(
        "growth", lhs, rhs, tolerance=tol,
        constants={**{key: gc[key] for key in ("A", "B", "C", "lam", "lam0",
                                               "lam1", "r0")},
                   "R": float(R)},
        discretization={"scheme": meas.meta.get("scheme"),
                        "resolution": meas.meta.get("resolution"),
                        "truncation_tail": meas.meta.get("truncation_tail")},
    )
