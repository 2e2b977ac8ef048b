"""Grids, quadrature rules, the bandwidth kernel, and pulse profiles.

Everything downstream works in pulse-width units: lengths are measured in
units of the common pulse width sigma, so a profile of unit width centered
at z0 and the dimensionless bandwidth parameter k0 fully describe the
single-pulse inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ModeError, ParameterError, ProfileError

__all__ = [
    "Grid1D",
    "PulseProfile",
    "SystemParams",
    "commutator_kernel",
    "composite_gauss_grid",
    "join_grids",
    "make_grid",
    "make_profile",
    "sinc_kernel",
]

_SINC_SERIES_CUTOFF = 1e-4


def sinc_kernel(x: np.ndarray | float, k0: float = 1.0) -> np.ndarray | float:
    """Unnormalized sinc kernel sin(k0 x)/(k0 x).

    The removable singularity is handled by the quartic Taylor series
    1 - u^2/6 + u^4/120 for |u| = |k0 x| below 1e-4, which is exact to
    double precision there.
    """
    if k0 <= 0.0:
        raise ParameterError(f"k0 must be positive, got {k0}")
    u = np.asarray(x, dtype=float) * k0
    small = np.abs(u) < _SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    out = np.where(small, 1.0 - u * u / 6.0 + u**4 / 120.0, np.sin(safe) / safe)
    if np.isscalar(x):
        return float(out)
    return out


def commutator_kernel(x: np.ndarray | float, k0: float, sigma: float = 1.0):
    """Field commutator amplitude C(x) = k_s/pi * sinc(k_s x), k_s = k0/sigma.

    Integrates to one over the real line; its height k0/(pi*sigma) is the
    rate constant kappa used by the collision series.
    """
    if sigma <= 0.0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    ks = k0 / sigma
    return (ks / math.pi) * sinc_kernel(x, ks)


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Quadrature grid: strictly increasing nodes with positive weights.

    The weights integrate a sampled function over the covered interval
    [lo, hi]; their sum equals that span, which is checked at construction.
    Open rules (Gauss nodes) do not touch the interval endpoints, so the
    covered domain is stored explicitly; when omitted it defaults to the
    node range, which is correct for closed rules.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float] | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or weights.ndim != 1 or nodes.size != weights.size:
            raise ParameterError("nodes and weights must be 1-D arrays of equal length")
        if nodes.size < 2:
            raise ParameterError("grid needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ParameterError("grid nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise ParameterError("grid weights must be positive")
        if self.domain is None:
            dom = (float(nodes[0]), float(nodes[-1]))
        else:
            dom = (float(self.domain[0]), float(self.domain[1]))
        object.__setattr__(self, "domain", dom)
        if not (dom[0] <= nodes[0] and nodes[-1] <= dom[1]):
            raise ParameterError("grid nodes fall outside the stated domain")
        span = dom[1] - dom[0]
        if abs(float(weights.sum()) - span) > 1e-12 * max(span, 1.0):
            raise ParameterError("grid weights do not sum to the domain length")
        nodes.setflags(write=False)
        weights.setflags(write=False)

    @property
    def lo(self) -> float:
        return self.domain[0]

    @property
    def hi(self) -> float:
        return self.domain[1]

    @property
    def n(self) -> int:
        return int(self.nodes.size)

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))

    def same_as(self, other: "Grid1D") -> bool:
        return (
            self.n == other.n
            and self.domain == other.domain
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )


def make_grid(lo: float, hi: float, n: int, rule: str = "uniform") -> Grid1D:
    """Build a quadrature grid on [lo, hi].

    rule 'uniform' gives equispaced nodes with composite-trapezoid weights;
    rule 'gauss-legendre' gives the n-point Gauss-Legendre rule mapped onto
    the interval (exact for polynomials of degree 2n - 1).
    """
    if not lo < hi:
        raise ParameterError(f"need lo < hi, got [{lo}, {hi}]")
    if n < 2:
        raise ParameterError(f"need at least 2 nodes, got {n}")
    if rule == "uniform":
        nodes = np.linspace(lo, hi, n)
        h = (hi - lo) / (n - 1)
        weights = np.full(n, h)
        weights[0] = weights[-1] = h / 2.0
        return Grid1D(nodes, weights)
    if rule == "gauss-legendre":
        x, w = np.polynomial.legendre.leggauss(n)
        half = 0.5 * (hi - lo)
        return Grid1D(half * x + 0.5 * (hi + lo), half * w, domain=(lo, hi))
    raise ParameterError(f"unknown grid rule {rule!r}")


def composite_gauss_grid(lo: float, hi: float, n_panels: int,
                         nodes_per_panel: int = 8) -> Grid1D:
    """Composite Gauss-Legendre rule: n_panels equal panels on [lo, hi]."""
    if n_panels < 1:
        raise ParameterError(f"need at least one panel, got {n_panels}")
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    nodes = (half * x[None, :] + 0.5 * (edges[:-1] + edges[1:])[:, None]).ravel()
    weights = np.broadcast_to(half * w, (n_panels, nodes_per_panel)).ravel()
    return Grid1D(nodes, weights.copy(), domain=(lo, hi))


def join_grids(*grids: Grid1D) -> Grid1D:
    """Concatenate contiguous grids (each starting where the previous ends)."""
    if len(grids) < 1:
        raise ParameterError("join_grids needs at least one grid")
    for a, b in zip(grids, grids[1:]):
        if b.lo < a.hi:
            raise ParameterError("grids to join must be ordered and non-overlapping")
    nodes = np.concatenate([g.nodes for g in grids])
    weights = np.concatenate([g.weights for g in grids])
    if not np.all(np.diff(nodes) > 0):
        raise ParameterError("joined grids share a node")
    return Grid1D(nodes, weights, domain=(grids[0].lo, grids[-1].hi))


@dataclass(frozen=True)
class PulseProfile:
    """Single-photon spatial envelope f(z), unit L2 norm by construction.

    shape 'gaussian': f(z) = (1/(sigma sqrt(pi)))^(1/2) exp(-(z-center)^2/(2 sigma^2)).
    shape 'square':   f(z) = width^(-1/2) on [center - width/2, center + width/2]
                      (half value exactly on the edges), 0 outside.
    shape 'tabulated': linear interpolation of a sampled envelope, renormalized.
    """

    shape: str
    center: float = 0.0
    sigma: float = 1.0
    width: float | None = None
    table_nodes: np.ndarray | None = field(default=None, repr=False)
    table_values: np.ndarray | None = field(default=None, repr=False)
    scale: float = 1.0

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if self.shape == "square":
            if self.width is None or self.width <= 0.0:
                raise ParameterError("square profile needs a positive width")
        elif self.shape == "tabulated":
            if self.table_nodes is None or self.table_values is None:
                raise ParameterError("tabulated profile needs nodes and values")
            nodes = np.asarray(self.table_nodes, dtype=float)
            vals = np.asarray(self.table_values)
            if nodes.ndim != 1 or vals.shape != nodes.shape:
                raise ParameterError("table nodes/values must be matching 1-D arrays")
            if not np.all(np.diff(nodes) > 0):
                raise ParameterError("table nodes must be strictly increasing")
            object.__setattr__(self, "table_nodes", nodes)
            object.__setattr__(self, "table_values", np.asarray(vals, dtype=complex))
        elif self.shape != "gaussian":
            raise ProfileError(f"unknown profile shape {self.shape!r}")

    def __call__(self, z: np.ndarray | float) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.shape == "gaussian":
            amp = (1.0 / (self.sigma * math.sqrt(math.pi))) ** 0.5
            out = amp * np.exp(-((z - self.center) ** 2) / (2.0 * self.sigma**2))
        elif self.shape == "square":
            half = self.width / 2.0
            amp = self.width**-0.5
            d = np.abs(z - self.center)
            out = np.where(d < half, amp, 0.0)
            out = np.where(d == half, 0.5 * amp, out)
        else:
            re = np.interp(z, self.table_nodes, self.table_values.real, left=0.0, right=0.0)
            im = np.interp(z, self.table_nodes, self.table_values.imag, left=0.0, right=0.0)
            out = re + 1j * im if np.any(self.table_values.imag) else re
        return self.scale * out

    @property
    def is_real(self) -> bool:
        if self.shape == "tabulated":
            return not np.any(self.table_values.imag)
        return True

    @property
    def label(self) -> str:
        """Compact descriptor used in coefficient records and provenance."""
        if self.shape == "gaussian":
            return f"gaussian(center={self.center:g},sigma={self.sigma:g})"
        if self.shape == "square":
            return f"square(center={self.center:g},width={self.width:g})"
        return f"tabulated(n={self.table_nodes.size},center={self.center:g})"

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Discontinuity locations, for piecewise quadrature."""
        if self.shape == "square":
            return (self.center - self.width / 2.0, self.center + self.width / 2.0)
        return ()

    def support_halfwidth(self, tail: float = 10.0) -> float:
        """Half-width beyond which the profile is negligible (or exactly zero)."""
        if self.shape == "gaussian":
            return tail * self.sigma
        if self.shape == "square":
            return self.width / 2.0
        return max(abs(self.table_nodes[0] - self.center),
                   abs(self.table_nodes[-1] - self.center))

    def norm_squared(self) -> float:
        """Exact (gaussian/square) or trapezoid (tabulated) L2 norm squared."""
        if self.shape in ("gaussian", "square"):
            return self.scale**2
        base = np.trapezoid(np.abs(self.table_values) ** 2, self.table_nodes)
        return float(self.scale**2 * base)

    def normalized(self) -> "PulseProfile":
        nsq = self.norm_squared()
        if nsq <= 0.0:
            raise ParameterError("cannot normalize an identically zero profile")
        return replace(self, scale=self.scale / math.sqrt(nsq))


def make_profile(shape: str, center: float = 0.0, sigma: float = 1.0,
                 width: float | None = None,
                 table_nodes: np.ndarray | None = None,
                 table_values: np.ndarray | None = None) -> PulseProfile:
    """Build a unit-norm pulse profile.

    For 'square' the default width is 2 sigma. Tabulated profiles are
    renormalized on construction.
    """
    if shape == "square" and width is None:
        width = 2.0 * sigma
    prof = PulseProfile(shape=shape, center=center, sigma=sigma, width=width,
                        table_nodes=table_nodes, table_values=table_values)
    if shape == "tabulated":
        return prof.normalized()
    return prof


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless system parameters shared by both propagation modes.

    k0 is the bandwidth parameter sigma * delta_omega_s / (2 c); kappa =
    k0/(pi sigma) is the commutator height; chi is the interaction rate.
    The stored accumulated phase phi must be consistent with (chi, kappa)
    and the mode geometry: phi = chi * kappa * interaction_time when
    co-propagating, phi = 2 chi kappa separation / |v_r| when colliding.
    """

    k0: float
    phi: float
    chi: float
    v1: float = 0.0
    v2: float = 0.0
    separation: float | None = None
    interaction_time: float | None = None
    sigma: float = 1.0

    def __post_init__(self):
        if self.k0 <= 0.0:
            raise ParameterError(f"k0 must be positive, got {self.k0}")
        if self.sigma <= 0.0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if self.phi < 0.0:
            raise ParameterError(f"phi must be non-negative, got {self.phi}")
        tol = 1e-12 * max(1.0, abs(self.phi))
        if self.mode == "copropagating":
            if self.interaction_time is None:
                raise ParameterError("co-propagating parameters need interaction_time")
            if abs(self.phi - self.chi * self.kappa * self.interaction_time) > tol:
                raise ParameterError("phi inconsistent with chi * kappa * interaction_time")
        else:
            if self.separation is None or self.separation < 0.0:
                raise ParameterError("colliding parameters need a non-negative separation")
            if abs(self.phi - 2.0 * self.chi * self.kappa * self.separation / abs(self.v_r)) > tol:
                raise ParameterError("phi inconsistent with 2 chi kappa separation / |v_r|")

    @property
    def kappa(self) -> float:
        return self.k0 / (math.pi * self.sigma)

    @property
    def v_r(self) -> float:
        return self.v1 - self.v2

    @property
    def mode(self) -> str:
        return "copropagating" if self.v1 == self.v2 else "headon"

    @classmethod
    def copropagating(cls, k0: float, phi: float, velocity: float = 0.0,
                      interaction_time: float = 1.0, sigma: float = 1.0) -> "SystemParams":
        """Equal-velocity parameters with chi fixed by phi = chi kappa t."""
        if interaction_time <= 0.0:
            raise ParameterError("interaction_time must be positive")
        kappa = k0 / (math.pi * sigma)
        chi = phi / (kappa * interaction_time)
        return cls(k0=k0, phi=phi, chi=chi, v1=velocity, v2=velocity,
                   interaction_time=interaction_time, sigma=sigma)

    @classmethod
    def headon(cls, k0: float, separation: float, v1: float, v2: float,
               phi: float | None = None, chi: float | None = None,
               sigma: float = 1.0) -> "SystemParams":
        """Colliding-pulse parameters; give exactly one of phi or chi.

        The other is derived from phi = 2 chi kappa separation / |v_r|, the
        full-pass phase accumulated while the pulses cross.
        """
        if v1 == v2:
            raise ModeError("colliding mode needs v1 != v2")
        if (phi is None) == (chi is None):
            raise ParameterError("give exactly one of phi or chi")
        kappa = k0 / (math.pi * sigma)
        v_r = abs(v1 - v2)
        if chi is None:
            if separation <= 0.0:
                raise ParameterError("phi-specified collision needs a positive separation")
            chi = phi * v_r / (2.0 * kappa * separation)
        else:
            phi = 2.0 * chi * kappa * separation / v_r
        return cls(k0=k0, phi=phi, chi=chi, v1=v1, v2=v2,
                   separation=separation, sigma=sigma)
