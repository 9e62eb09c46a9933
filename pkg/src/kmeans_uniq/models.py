"""Generative models and their population k-means catalogs.

Nine named families: a three-uniform 1-D mixture with a phase change at
r = 3*sqrt(2) - 4, and eight bivariate Gaussian mixtures (embedded in higher
dimension by zero-padding the means; added coordinates are independent
standard normal, so the 2-D catalog is preserved up to padding).

Catalogs carry closed forms where available, angle-parameterized orbits for
the continuous non-uniqueness cases, and a seeded numeric oracle otherwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import ndtr

from . import backend, kmeans
from .errors import ParameterError, UnsupportedError
from .rng import RngStream, TAG_ORACLE, as_stream

R_BOUNDARY = 3.0 * math.sqrt(2.0) - 4.0
R_BOUNDARY_TOL = 1e-12

UNIQUE = "UNIQUE"
DNU = "DNU"
CNU = "CNU"

CLOSED_FORM = "CLOSED_FORM"
NUMERIC = "NUMERIC"
PARAMETRIC_ORBIT = "PARAMETRIC_ORBIT"

FAMILIES = ("UrC3k2", "C1k2", "C2k3", "TC3k2",
            "C2k2-1", "C2k2-2", "C2k2-3", "C3k3", "C3k2")

# family -> (k, intrinsic dim)
_FAMILY_K = {
    "UrC3k2": (2, 1), "C1k2": (2, 2), "C2k3": (3, 2), "TC3k2": (2, 2),
    "C2k2-1": (2, 2), "C2k2-2": (2, 2), "C2k2-3": (2, 2),
    "C3k3": (3, 2), "C3k2": (2, 2),
}

_SQRT_2_PI = math.sqrt(2.0 / math.pi)

# Gaussian mixture components: (means 2-D, per-component std, weights,
# radial truncation in std units or None)
_CUBE_ROOTS = [(1.0, 0.0), (-0.5, math.sqrt(3.0) / 2.0), (-0.5, -math.sqrt(3.0) / 2.0)]
_GAUSS_MIXTURES = {
    "C1k2": ([(0.0, 0.0)], 1.0, [1.0], None),
    "C2k3": ([(-1.0, 0.0), (1.0, 0.0)], 0.2, [0.5, 0.5], 5.0),
    "TC3k2": (_CUBE_ROOTS, 0.2, [1 / 3, 1 / 3, 1 / 3], None),
    "C2k2-1": ([(-1.0, 0.0), (1.0, 0.0)], 0.2, [0.5, 0.5], None),
    "C2k2-2": ([(-1.5, 0.0), (1.5, 0.0)], 1.0, [0.5, 0.5], None),
    "C2k2-3": ([(-1.0, 0.0), (1.0, 0.0)], 1.0, [0.5, 0.5], None),
    "C3k3": ([(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)], 0.2, [1 / 3, 1 / 3, 1 / 3], None),
    "C3k2": ([(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)], 0.2, [1 / 3, 1 / 3, 1 / 3], None),
}

# numeric catalog oracle settings (documented, seeded, reproducible)
ORACLE_SEED = 202406
ORACLE_SAMPLE_N = 1_000_000
ORACLE_RESTARTS = 50
# ties between genuinely distinct optima carry Monte-Carlo noise of order
# sd(f_A - f_B) / (sqrt(sample_n) * wcss) ~ 2e-3 at n=1e6; spurious local
# optima sit far above (>5e-2 relative for every family studied)
ORACLE_TIE_RTOL = 5e-3
ORACLE_DEDUPE_HAUSDORFF = 1e-3


@dataclass(frozen=True)
class ModelSpec:
    family: str
    dim: int = 0
    r: float | None = None
    k: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        k0, d0 = _FAMILY_K[self.family]
        if self.k == 0:
            object.__setattr__(self, "k", k0)
        elif self.k != k0:
            raise ParameterError(f"{self.family} is studied with k={k0}, got k={self.k}")
        if self.dim == 0:
            object.__setattr__(self, "dim", d0)
        if self.family == "UrC3k2":
            if self.r is None or not (0.0 <= self.r <= 0.5):
                raise ParameterError(f"UrC3k2 requires 0 <= r <= 1/2, got {self.r}")
            if self.dim != 1:
                raise ParameterError("UrC3k2 is one-dimensional")
        else:
            if self.r is not None:
                raise ParameterError(f"{self.family} takes no r parameter")
            if self.dim < 2:
                raise ParameterError(f"{self.family} requires dim >= 2, got {self.dim}")

    @property
    def label(self) -> str:
        if self.family == "UrC3k2":
            return f"UrC3k2(r={self.r:g})"
        return f"{self.family}(d={self.dim})"

    def to_json(self) -> dict:
        out = {"family": self.family, "dim": self.dim, "k": self.k}
        if self.r is not None:
            out["r"] = self.r
        return out

    @classmethod
    def from_json(cls, obj) -> "ModelSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        family = str(obj["family"])
        if family.startswith("C2k2"):
            family = family.replace("_", "-")
        return cls(family=family, dim=int(obj.get("dim", 0)),
                   r=obj.get("r"), k=int(obj.get("k", 0)))


@dataclass(frozen=True)
class CatalogEntry:
    multiplicity_class: str
    centers: np.ndarray | None = None
    orbit: Callable[[float], np.ndarray] | None = None

    def realize(self, angle: float = 0.0) -> np.ndarray:
        if self.centers is not None:
            return self.centers
        return self.orbit(angle)


@dataclass(frozen=True)
class PopulationCatalog:
    entries: tuple[CatalogEntry, ...]
    wcss: float
    kind: str
    meta: dict = field(default_factory=dict)

    @property
    def multiplicity_class(self) -> str:
        return self.entries[0].multiplicity_class

    @property
    def is_orbit(self) -> bool:
        return any(e.orbit is not None for e in self.entries)


def sample(spec: ModelSpec, n: int, rng_stream: RngStream | int) -> kmeans.Dataset:
    """n i.i.d. draws; deterministic given the stream."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    gen = as_stream(rng_stream).generator()
    if spec.family == "UrC3k2":
        comp = gen.integers(0, 3, size=n)
        x = (comp - 1).astype(np.float64)
        if spec.r > 0:
            x += spec.r * (2.0 * gen.random(n) - 1.0)
        return kmeans.Dataset(x[:, None])
    means, sigma, weights, trunc = _GAUSS_MIXTURES[spec.family]
    m = len(means)
    comp = gen.choice(m, size=n, p=weights)
    z = gen.standard_normal((n, spec.dim))
    if trunc is not None:
        # redraw the 2-D component part until within `trunc` std radially
        bad = np.flatnonzero(z[:, 0] ** 2 + z[:, 1] ** 2 > trunc * trunc)
        while bad.size:
            z[bad, :2] = gen.standard_normal((bad.size, 2))
            bad = bad[z[bad, 0] ** 2 + z[bad, 1] ** 2 > trunc * trunc]
    x = z
    mu = np.asarray(means)[comp]
    x[:, :2] = mu + sigma * z[:, :2]
    return kmeans.Dataset(x)


def _phi_cdf(x: float) -> float:
    return float(ndtr(x))


def _mixture_abs_mean(means, sigma, weights) -> float:
    """E|x1| for a 1-D Gaussian mixture: the k=2 catalog center coordinate."""
    total = 0.0
    for (mx, _), w in zip(means, weights):
        total += w * (sigma * _SQRT_2_PI * math.exp(-mx * mx / (2 * sigma * sigma))
                      + abs(mx) * (2.0 * _phi_cdf(abs(mx) / sigma) - 1.0))
    return total


def c1_constant() -> float:
    # printed formula; evaluates to ~0.9999996 (the prose calls it "slightly
    # greater than 1")
    return math.exp(-12.5) / 15.0 * _SQRT_2_PI + 2.0 * _phi_cdf(5.0) - 1.0


def c2_constant() -> float:
    return math.exp(-9.0 / 8.0) * _SQRT_2_PI + 1.5 * (2.0 * _phi_cdf(1.5) - 1.0)


def c3_constant() -> float:
    return math.sqrt(2.0 / (math.e * math.pi)) + 2.0 * _phi_cdf(1.0) - 1.0


def c3k2_constant() -> float:
    return (10.0 * (2.0 * _phi_cdf(5.0) - 1.0)
            + _SQRT_2_PI * (1.0 + 2.0 * math.exp(-12.5))) / 15.0


def urc3k2_wcss(r: float) -> float:
    if r <= R_BOUNDARY + R_BOUNDARY_TOL:
        return (2.0 * r * r + 1.0) / 6.0
    return (11.0 * r * r - 8.0 * r + 8.0) / 36.0


def _pad(points2d: np.ndarray, dim: int) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points2d, dtype=np.float64))
    if dim == pts.shape[1]:
        return pts
    out = np.zeros((pts.shape[0], dim))
    out[:, : pts.shape[1]] = pts
    return out


def _antipodal_orbit(center, rho, others, dim):
    cx, cy = center

    def orbit(theta: float) -> np.ndarray:
        u = np.array([math.cos(theta), math.sin(theta)])
        pts = [np.array([cx, cy]) + rho * u, np.array([cx, cy]) - rho * u]
        pts.extend(np.asarray(o, dtype=np.float64) for o in others)
        return _pad(np.vstack(pts), dim)

    return orbit


def _axis_pair_wcss(family: str, dim: int, c: float) -> float:
    """Closed-form WCSS for the symmetric two-center catalogs ±(c, 0):
    W = E x2^2 + E x1^2 - c^2, plus one per embedded coordinate."""
    means, sigma, weights, _ = _GAUSS_MIXTURES[family]
    ex1sq = sigma * sigma + sum(w * mx * mx for (mx, _), w in zip(means, weights))
    return sigma * sigma + ex1sq - c * c + (dim - 2)


_numeric_cache: dict[tuple, PopulationCatalog] = {}


def _numeric_catalog(spec: ModelSpec) -> PopulationCatalog:
    """Seeded oracle: large sample, many restarts, keep all distinct local
    optima tying the best WCSS, dedupe by Hausdorff distance."""
    from .metrics import hausdorff  # local import to avoid a cycle

    key = (spec.family,)
    if key in _numeric_cache:
        return _embed_numeric(_numeric_cache[key], spec.dim)
    base = ModelSpec(spec.family, dim=2)
    stream = RngStream(ORACLE_SEED).child(TAG_ORACLE)
    data = sample(base, ORACLE_SAMPLE_N, stream.child(0))
    X = data.values
    results = []
    for r in range(ORACLE_RESTARTS):
        gen = stream.child(1, r).generator()
        C0 = kmeans.kmeanspp_init(X, spec.k, gen)
        C, labels, w, _, _ = backend.lloyd(X, C0, 300, 1e-10)
        C2, labels2, moves = backend.hartigan(X, C, labels, 100)
        if moves:
            C, labels, w, _, _ = backend.lloyd(X, C2, 300, 1e-10)
        C = C[kmeans.canonical_order(C)]
        results.append((float(w), C))
    best = min(w for w, _ in results)
    survivors: list[np.ndarray] = []
    for w, C in sorted(results, key=lambda t: t[0]):
        if w > best * (1.0 + ORACLE_TIE_RTOL):
            continue
        if all(hausdorff(C, S) >= ORACLE_DEDUPE_HAUSDORFF for S in survivors):
            survivors.append(C)
    cls = UNIQUE if len(survivors) == 1 else DNU
    entries = tuple(CatalogEntry(multiplicity_class=cls, centers=C) for C in survivors)
    cat = PopulationCatalog(entries=entries, wcss=best, kind=NUMERIC,
                            meta={"seed": ORACLE_SEED, "sample_n": ORACLE_SAMPLE_N,
                                  "restarts": ORACLE_RESTARTS})
    _numeric_cache[key] = cat
    return _embed_numeric(cat, spec.dim)


def _embed_numeric(cat: PopulationCatalog, dim: int) -> PopulationCatalog:
    if dim == 2:
        return cat
    entries = tuple(
        CatalogEntry(multiplicity_class=e.multiplicity_class, centers=_pad(e.centers, dim))
        for e in cat.entries)
    return PopulationCatalog(entries=entries, wcss=cat.wcss + (dim - 2),
                             kind=cat.kind, meta=dict(cat.meta))


def population_catalog(spec: ModelSpec) -> PopulationCatalog:
    fam, dim = spec.family, spec.dim
    if fam == "UrC3k2":
        r = spec.r
        w = urc3k2_wcss(r)
        if abs(r - R_BOUNDARY) < R_BOUNDARY_TOL:
            sets = [[-1.0, 0.5], [-0.5, 1.0],
                    [-1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)]]
            cls = DNU
        elif r < R_BOUNDARY:
            sets = [[-1.0, 0.5], [-0.5, 1.0]]
            cls = DNU
        else:
            c = (4.0 + r) / 6.0
            sets = [[-c, c]]
            cls = UNIQUE
        entries = tuple(CatalogEntry(multiplicity_class=cls,
                                     centers=np.asarray(s)[:, None]) for s in sets)
        return PopulationCatalog(entries=entries, wcss=w, kind=CLOSED_FORM)

    if fam == "C1k2":
        rho = _SQRT_2_PI
        orbit = _antipodal_orbit((0.0, 0.0), rho, [], dim)
        entry = CatalogEntry(multiplicity_class=CNU, orbit=orbit)
        return PopulationCatalog(entries=(entry,), wcss=2.0 - 2.0 / math.pi + (dim - 2),
                                 kind=PARAMETRIC_ORBIT, meta={"radius": rho})

    if fam == "C2k3":
        sigma = 0.2
        rho = sigma * _SQRT_2_PI
        # one orbit per hosting component; truncation corrections are O(e^-12.5)
        e1 = CatalogEntry(multiplicity_class=CNU,
                          orbit=_antipodal_orbit((-1.0, 0.0), rho, [(1.0, 0.0)], dim))
        e2 = CatalogEntry(multiplicity_class=CNU,
                          orbit=_antipodal_orbit((1.0, 0.0), rho, [(-1.0, 0.0)], dim))
        w = sigma * sigma * (2.0 - 1.0 / math.pi) + (dim - 2)
        return PopulationCatalog(entries=(e1, e2), wcss=w,
                                 kind=PARAMETRIC_ORBIT, meta={"radius": rho})

    if fam in ("C2k2-1", "C2k2-2", "C2k2-3", "C3k2"):
        c = {"C2k2-1": c1_constant, "C2k2-2": c2_constant,
             "C2k2-3": c3_constant, "C3k2": c3k2_constant}[fam]()
        centers = _pad([[-c, 0.0], [c, 0.0]], dim)
        entry = CatalogEntry(multiplicity_class=UNIQUE, centers=centers)
        return PopulationCatalog(entries=(entry,),
                                 wcss=_axis_pair_wcss(fam, dim, c), kind=CLOSED_FORM,
                                 meta={"c": c})

    if fam in ("TC3k2", "C3k3"):
        return _numeric_catalog(spec)

    raise UnsupportedError(f"no catalog for family {fam!r}")


def population_wcss_numeric(spec: ModelSpec, n_mc: int, rng_stream: RngStream | int,
                            entry_index: int = 0, angle: float = 0.0):
    """Monte-Carlo objective value of one catalog entry: (value, se)."""
    if n_mc < 1:
        raise ParameterError("n_mc must be >= 1")
    cat = population_catalog(spec)
    centers = cat.entries[entry_index].realize(angle)
    data = sample(spec, n_mc, rng_stream)
    d2 = backend.min_sqdist(data.values, np.ascontiguousarray(centers))
    value = float(d2.mean())
    se = float(d2.std(ddof=1) / math.sqrt(n_mc)) if n_mc > 1 else float("nan")
    return value, se
