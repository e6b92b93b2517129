"""Network geometry: hexagonal multi-site layout on a wraparound torus,
stochastic node deployments, and max-RSRP association.

The layout is a cluster of tri-sector macro sites on a triangular lattice.
The cluster tiles the plane under a hexagonal sublattice of translations;
distances and angles between any two points are evaluated through the
minimum-distance image over the identity plus six mirror displacements.
Node positions are kept canonical (inside the cluster's Voronoi cell of
the translation sublattice), for which the seven-image minimum is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


N_SECTORS_PER_SITE = 3
BORESIGHTS_RAD = np.deg2rad([0.0, 120.0, 240.0])

# cluster size -> lattice shift (i, j) generating the wraparound sublattice
_WRAP_SHIFTS = {1: None, 7: (2, 1), 19: (3, 2)}


@dataclass(frozen=True)
class NetworkLayout:
    isd_m: float
    n_sites: int
    site_xy: np.ndarray          # (n_sites, 2), site 0 at the origin
    wrap_xy: np.ndarray          # (n_wrap, 2), identity displacement first
    basis: np.ndarray            # (2, 2) rows = torus translation vectors
    bs_height_m: float = 32.0
    sc_height_m: float = 5.0
    ue_height_m: float = 1.5

    @property
    def n_sectors(self) -> int:
        return self.n_sites * N_SECTORS_PER_SITE

    @property
    def cell_radius_m(self) -> float:
        """Circumradius of one site's hexagonal cell."""
        return self.isd_m / np.sqrt(3.0)

    @property
    def cell_center_dist_m(self) -> float:
        """Distance from a site to the mid-point of a cell edge."""
        return self.isd_m / 2.0

    @property
    def ring_radius_m(self) -> float:
        """Outer radius of the first interfering ring used by analytic models."""
        return 1.5 * self.isd_m

    @property
    def sector_density(self) -> float:
        """Sectors per square meter (three per hexagonal cell)."""
        hex_area = 1.5 * np.sqrt(3.0) * self.cell_radius_m ** 2
        return N_SECTORS_PER_SITE / hex_area

    def sector_site(self) -> np.ndarray:
        """Site index of each sector (sectors enumerated site-major)."""
        return np.repeat(np.arange(self.n_sites), N_SECTORS_PER_SITE)

    def sector_boresight(self) -> np.ndarray:
        return np.tile(BORESIGHTS_RAD, self.n_sites)


def _lattice_basis(isd_m: float) -> np.ndarray:
    return np.array([[isd_m, 0.0], [0.5 * isd_m, 0.5 * np.sqrt(3.0) * isd_m]])


def build_layout(isd_m: float = 500.0, n_sites: int = 19, *, bs_height_m: float = 32.0,
                 sc_height_m: float = 5.0, ue_height_m: float = 1.5) -> NetworkLayout:
    """Construct a 1-, 7-, or 19-site tri-sector layout with wraparound."""
    if n_sites not in _WRAP_SHIFTS:
        raise ValueError(f"n_sites must be one of {sorted(_WRAP_SHIFTS)}, got {n_sites}")
    if isd_m <= 0:
        raise ValueError("isd_m must be positive")
    a = _lattice_basis(isd_m)
    ij = np.array([(i, j) for i in range(-3, 4) for j in range(-3, 4)])
    pts = ij @ a
    order = np.lexsort((np.round(np.arctan2(pts[:, 1], pts[:, 0]), 9),
                        np.round(np.hypot(pts[:, 0], pts[:, 1]), 6)))
    site_xy = pts[order][:n_sites].copy()

    shift = _WRAP_SHIFTS[n_sites]
    if shift is None:
        wrap = np.zeros((1, 2))
        basis = np.array([[isd_m, 0.0], [0.0, isd_m]])  # unused placeholder
    else:
        u1 = shift[0] * a[0] + shift[1] * a[1]
        rot60 = np.array([[0.5, -0.5 * np.sqrt(3.0)], [0.5 * np.sqrt(3.0), 0.5]])
        u2 = rot60 @ u1
        basis = np.vstack([u1, u2])
        mirrors = np.array([u1, -u1, u2, -u2, u1 - u2, u2 - u1])
        wrap = np.vstack([np.zeros(2), mirrors])
    return NetworkLayout(isd_m=float(isd_m), n_sites=n_sites, site_xy=site_xy,
                         wrap_xy=wrap, basis=basis, bs_height_m=bs_height_m,
                         sc_height_m=sc_height_m, ue_height_m=ue_height_m)


def canonicalize(layout: NetworkLayout, xy: np.ndarray) -> np.ndarray:
    """Map points to their minimum-norm image under the torus translations."""
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    if layout.n_sites == 1:
        return xy
    coeff = np.linalg.solve(layout.basis.T, xy.T).T  # torus coordinates
    base = np.floor(coeff + 0.5)
    best = None
    best_norm = None
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            cand = xy - (base + [di, dj]) @ layout.basis
            norm = np.einsum("ij,ij->i", cand, cand)
            if best is None:
                best, best_norm = cand, norm
            else:
                take = norm < best_norm
                best = np.where(take[:, None], cand, best)
                best_norm = np.minimum(best_norm, norm)
    return best


def wrap_displacement(layout: NetworkLayout, src_xy: np.ndarray,
                      dst_xy: np.ndarray) -> np.ndarray:
    """Minimum-distance displacement src -> dst, shape (n_src, n_dst, 2)."""
    src = np.atleast_2d(src_xy)
    dst = np.atleast_2d(dst_xy)
    diff = dst[None, :, :] - src[:, None, :]                      # (S, D, 2)
    cand = diff[:, :, None, :] + layout.wrap_xy[None, None, :, :]  # (S, D, W, 2)
    norm2 = np.einsum("sdwk,sdwk->sdw", cand, cand)
    pick = np.argmin(norm2, axis=2)
    return np.take_along_axis(cand, pick[:, :, None, None], axis=2)[:, :, 0, :]


def wrap_distance(layout: NetworkLayout, src_xy: np.ndarray, dst_xy: np.ndarray) -> np.ndarray:
    disp = wrap_displacement(layout, src_xy, dst_xy)
    return np.hypot(disp[..., 0], disp[..., 1])


def sample_uniform(layout: NetworkLayout, rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform points over the cluster footprint (canonical coordinates)."""
    if layout.n_sites == 1:
        # rejection inside the single hexagonal cell
        r = layout.cell_radius_m
        out = np.empty((0, 2))
        normals = np.stack([np.array([np.cos(a), np.sin(a)])
                            for a in np.deg2rad([0.0, 60.0, 120.0])])
        while len(out) < n:
            cand = rng.uniform(-r, r, size=(2 * (n - len(out)) + 8, 2))
            ok = np.all(np.abs(cand @ normals.T) <= layout.isd_m / 2.0 + 1e-12, axis=1)
            out = np.vstack([out, cand[ok]])
        return out[:n]
    coeff = rng.random((n, 2))
    return canonicalize(layout, coeff @ layout.basis)


def nearest_site(layout: NetworkLayout, xy: np.ndarray):
    """(site index, wrapped displacement site->node, distance) per node."""
    disp = wrap_displacement(layout, layout.site_xy, xy)   # (sites, nodes, 2)
    dist = np.hypot(disp[..., 0], disp[..., 1])
    site = np.argmin(dist, axis=0)
    nodes = np.arange(xy.shape[0] if xy.ndim > 1 else 1)
    return site, disp[site, nodes], dist[site, nodes]


def geometric_sector(layout: NetworkLayout, xy: np.ndarray) -> np.ndarray:
    """Sector whose wedge contains each node (site-major sector index)."""
    site, disp, _ = nearest_site(layout, np.atleast_2d(xy))
    az = np.arctan2(disp[:, 1], disp[:, 0])
    wedge = (np.floor((np.degrees(az) + 60.0) / 120.0).astype(int)) % 3
    return site * N_SECTORS_PER_SITE + wedge


# ---------------------------------------------------------------------------
# deployments


@dataclass
class Deployment:
    """Node positions and geometric memberships for one drop."""
    kind: str
    ue_xy: np.ndarray
    ue_sector: np.ndarray
    sc_xy: np.ndarray
    sc_sector: np.ndarray
    sc_orientation_rad: np.ndarray   # access-antenna azimuth per SC
    paired_sc: np.ndarray | None = None  # ad-hoc: UE k's own SC index

    @property
    def n_ues(self) -> int:
        return self.ue_xy.shape[0]

    @property
    def n_scs(self) -> int:
        return self.sc_xy.shape[0]


def drop_ues(layout: NetworkLayout, rng: np.random.Generator,
             mean_per_sector: float) -> np.ndarray:
    n = rng.poisson(mean_per_sector * layout.n_sectors)
    return sample_uniform(layout, rng, n)


def drop_random_scs(layout: NetworkLayout, rng: np.random.Generator,
                    mean_per_sector: float, min_bs_distance_m: float) -> np.ndarray:
    """Poisson field of SCs with a keep-out disc around every macro site."""
    n = rng.poisson(mean_per_sector * layout.n_sectors)
    xy = sample_uniform(layout, rng, n)
    for _ in range(200):
        _, _, dist = nearest_site(layout, xy)
        bad = dist < min_bs_distance_m
        if not bad.any():
            break
        xy[bad] = sample_uniform(layout, rng, int(bad.sum()))
    else:
        raise RuntimeError("could not clear the BS keep-out region")
    return xy


def drop_adhoc_scs(layout: NetworkLayout, rng: np.random.Generator,
                   ue_xy: np.ndarray, offset_m: float) -> tuple[np.ndarray, np.ndarray]:
    """One SC per UE, offset toward the UE's closest site.

    The SC sits at horizontal distance ``offset_m`` from its UE, at an angle
    uniform in [-pi/2, pi/2] around the UE-to-site direction, i.e. always on
    the side facing the macro site.  Returns (sc_xy, orientation) where the
    orientation points the access antenna back at the paired UE (undefined
    at zero offset, then drawn uniformly).
    """
    n = ue_xy.shape[0]
    _, disp, _ = nearest_site(layout, ue_xy)
    to_site = np.arctan2(-disp[:, 1], -disp[:, 0])  # disp is site->UE
    psi = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size=n)
    heading = to_site + psi
    sc_xy = ue_xy + offset_m * np.stack([np.cos(heading), np.sin(heading)], axis=1)
    if offset_m > 0:
        orientation = heading + np.pi  # face the paired UE
    else:
        orientation = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return canonicalize(layout, sc_xy), orientation


def build_deployment(layout: NetworkLayout, kind: str, rng_ue: np.random.Generator,
                     rng_sc: np.random.Generator, mean_ue_per_sector: float,
                     mean_sc_per_sector: float, sc_ue_offset_m: float,
                     min_bs_sc_distance_m: float) -> Deployment:
    ue_xy = drop_ues(layout, rng_ue, mean_ue_per_sector)
    paired = None
    if kind == "sbh_random":
        sc_xy = drop_random_scs(layout, rng_sc, mean_sc_per_sector, min_bs_sc_distance_m)
        orientation = rng_sc.uniform(0.0, 2.0 * np.pi, size=sc_xy.shape[0])
    elif kind == "sbh_adhoc":
        sc_xy, orientation = drop_adhoc_scs(layout, rng_sc, ue_xy, sc_ue_offset_m)
        paired = np.arange(ue_xy.shape[0])
    elif kind == "direct_access":
        sc_xy = np.zeros((0, 2))
        orientation = np.zeros(0)
    else:
        raise ValueError(f"unknown deployment kind {kind!r}")
    return Deployment(
        kind=kind,
        ue_xy=ue_xy,
        ue_sector=geometric_sector(layout, ue_xy) if len(ue_xy) else np.zeros(0, dtype=int),
        sc_xy=sc_xy,
        sc_sector=geometric_sector(layout, sc_xy) if len(sc_xy) else np.zeros(0, dtype=int),
        sc_orientation_rad=orientation,
        paired_sc=paired,
    )


# ---------------------------------------------------------------------------
# association


def associate(rsrp_db: np.ndarray) -> np.ndarray:
    """Max-RSRP server per node; ties resolve to the lowest server index.

    ``rsrp_db`` has shape (n_servers, n_nodes).
    """
    if rsrp_db.size == 0:
        return np.zeros(rsrp_db.shape[1], dtype=int)
    return np.argmax(rsrp_db, axis=0)


def members_by_server(serving: np.ndarray, n_servers: int) -> list[np.ndarray]:
    """Node indices grouped by serving server."""
    order = np.argsort(serving, kind="stable")
    bounds = np.searchsorted(serving[order], np.arange(n_servers + 1))
    return [order[bounds[i]:bounds[i + 1]] for i in range(n_servers)]
