"""Domains, p-norms and deterministic evaluation grids.

States live in the p-ball of radius S in R^D, inputs in the p-ball of
radius I in R^E.  Sup norms of functions on the product ball are always
*estimated* on a fixed deterministic grid (tensor grid scaled into the
balls, plus a fixed batch of pseudo-random interior points); the estimate
is a lower bound of the true sup, which is the safe direction for every
"measured <= bound" check in this package.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainViolationError

#: fixed entropy for the random part of evaluation grids; grids must be a
#: pure function of the domain so that experiment reruns are byte-identical.
_GRID_ENTROPY = 0xC0FFEE

_ALLOWED_P = (1.0, 2.0, np.inf)


def conjugate(p: float) -> float:
    """Hoelder conjugate with the 1/inf convention."""
    if p == np.inf:
        return 1.0
    if p == 1.0:
        return np.inf
    return p / (p - 1.0)


def pnorm(x, p, axis=-1):
    """l_p norm along an axis, p in [1, inf]."""
    x = np.asarray(x, dtype=float)
    if x.shape[axis] == 0:
        return np.zeros(x.shape[:axis] + x.shape[axis:][1:])
    if p == np.inf:
        return np.abs(x).max(axis=axis)
    if p == 1.0:
        return np.abs(x).sum(axis=axis)
    return (np.abs(x) ** p).sum(axis=axis) ** (1.0 / p)


@dataclass(frozen=True)
class DomainSpec:
    """Product ball B_{S,I} = (p-ball radius S in R^D) x (p-ball radius I in R^E)."""

    p: float
    S: float
    I: float
    D: int
    E: int

    def __post_init__(self):
        if float(self.p) not in _ALLOWED_P:
            raise ValueError(f"p must be one of 1, 2, inf; got {self.p}")
        if not (self.S > 0 and self.I > 0):
            raise ValueError("S and I must be positive")
        if not (self.D >= 1 and self.E >= 1):
            raise ValueError("D and E must be >= 1")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "S", float(self.S))
        object.__setattr__(self, "I", float(self.I))

    @property
    def q(self) -> float:
        return conjugate(self.p)

    @property
    def Q(self) -> int:
        """Dimension of the product domain."""
        return self.D + self.E

    @property
    def d_pow_inv_p(self) -> float:
        """D^(1/p) with the p = inf convention D^0 = 1."""
        if self.p == np.inf:
            return 1.0
        return float(self.D) ** (1.0 / self.p)

    def split(self, z):
        """Split product-domain points into (state, input) blocks."""
        z = np.asarray(z, dtype=float)
        return z[..., : self.D], z[..., self.D:]

    def omega_norm(self, w) -> float:
        """sup over the product ball of |w . z|, i.e. S*||w_s||_q + I*||w_u||_q."""
        ws, wu = self.split(w)
        return float(self.S * pnorm(ws, self.q) + self.I * pnorm(wu, self.q))

    def contains(self, z, tol=1e-12) -> bool:
        """Whether a product-domain point lies in B_{S,I} up to tolerance."""
        zs, zu = self.split(z)
        return bool(
            pnorm(zs, self.p) <= self.S * (1 + tol) + tol
            and pnorm(zu, self.p) <= self.I * (1 + tol) + tol
        )

    def require_state(self, x, tol=1e-12):
        if pnorm(x, self.p) > self.S * (1 + tol) + tol:
            raise DomainViolationError(
                f"state with p-norm {pnorm(x, self.p)} outside ball of radius {self.S}"
            )

    def require_point(self, z, tol=1e-12):
        if not self.contains(z, tol):
            raise DomainViolationError("point outside the product ball")


def scale_into_ball(pts, radius, p):
    """Radially rescale rows with p-norm above `radius` onto the sphere."""
    pts = np.array(pts, dtype=float)
    norms = pnorm(pts, p, axis=-1)
    over = norms > radius
    if np.any(over):
        pts[over] *= (radius / norms[over])[:, None]
    return pts


def random_ball_points(rng, n, radius, dim, p):
    """n pseudo-random points in the p-ball (cube samples pulled onto the ball)."""
    pts = rng.uniform(-radius, radius, size=(n, dim))
    return scale_into_ball(pts, radius, p)


@lru_cache(maxsize=32)
def eval_grid(domain: DomainSpec, min_tensor: int = 10_000, n_random: int = 1_000):
    """Deterministic points of B_{S,I} used for sup-norm estimates.

    Tensor grid over the bounding cube scaled into the two balls (so all
    cube corners land exactly on the p = inf boundary and other p boundaries
    get dense coverage), plus `n_random` fixed pseudo-random points.
    Returns an (n, D+E) read-only array.
    """
    Q = domain.Q
    n_axis = max(2, int(np.ceil(min_tensor ** (1.0 / Q))))
    axes = [np.linspace(-domain.S, domain.S, n_axis)] * domain.D
    axes += [np.linspace(-domain.I, domain.I, n_axis)] * domain.E
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)

    s_part = scale_into_ball(pts[:, : domain.D], domain.S, domain.p)
    u_part = scale_into_ball(pts[:, domain.D:], domain.I, domain.p)

    rng = np.random.default_rng(np.random.SeedSequence(_GRID_ENTROPY))
    rs = random_ball_points(rng, n_random, domain.S, domain.D, domain.p)
    ru = random_ball_points(rng, n_random, domain.I, domain.E, domain.p)

    grid = np.concatenate(
        [np.concatenate([s_part, u_part], axis=1), np.concatenate([rs, ru], axis=1)]
    )
    grid.setflags(write=False)
    return grid
