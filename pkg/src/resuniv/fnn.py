"""One-hidden-layer network model and its closed-form bounds.

A scalar network is f(s, u) = sum_n a_n * act(b_n.s + c_n.u + d_n) + e;
a vector network bundles D scalar components sharing activation and
domain.  The bounded-parameter ReLU family with 4N hidden nodes keeps
every parameter inside explicit boxes (|a|,|d| <= 2*sqrt(M),
S*||b||_q <= sqrt(M), I*||c||_q <= sqrt(M), |e| <= M); membership in those
boxes is what the covering machinery quantizes.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .backend import get_kernels
from .domain import DomainSpec, pnorm
from . import kernels_numpy as _knp

RELU = "relu"

#: arithmetic slack allowed on exact parameter-box checks
BOX_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SigmoidSpec:
    """Monotone increasing sigmoid with range [0, 1] and a declared Lipschitz constant."""

    kind: str = "logistic"
    lipschitz: float = 0.25
    table_x: np.ndarray | None = None
    table_y: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("logistic", "table"):
            raise ValueError(f"unknown sigmoid kind {self.kind!r}")
        if self.kind == "table":
            if self.table_x is None or self.table_y is None:
                raise ValueError("table sigmoid needs table_x and table_y")
            y = np.asarray(self.table_y, dtype=float)
            if np.any(np.diff(y) < 0) or y.min() < 0 or y.max() > 1:
                raise ValueError("table must be monotone increasing within [0, 1]")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "logistic":
            out = np.empty_like(z)
            pos = z >= 0
            out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
            ez = np.exp(z[~pos])
            out[~pos] = ez / (1.0 + ez)
            return out
        return np.interp(z, self.table_x, self.table_y, left=0.0, right=1.0)


def logistic_sigmoid() -> SigmoidSpec:
    return SigmoidSpec(kind="logistic", lipschitz=0.25)


def _freeze(arr):
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarFnn:
    """Parameters of one real-valued hidden-layer network on a domain."""

    a: np.ndarray          # (H,)   output weights
    b: np.ndarray          # (H, D) state weights
    c: np.ndarray          # (H, E) input weights
    d: np.ndarray          # (H,)   biases
    e: float               # output bias
    activation: str | SigmoidSpec
    domain: DomainSpec

    def __post_init__(self):
        object.__setattr__(self, "a", _freeze(np.atleast_1d(self.a)))
        object.__setattr__(self, "b", _freeze(np.atleast_2d(self.b)))
        object.__setattr__(self, "c", _freeze(np.atleast_2d(self.c)))
        object.__setattr__(self, "d", _freeze(np.atleast_1d(self.d)))
        object.__setattr__(self, "e", float(self.e))
        H = self.a.shape[0]
        if not (self.b.shape == (H, self.domain.D) and self.c.shape == (H, self.domain.E)
                and self.d.shape == (H,)):
            raise ValueError("parameter blocks disagree on hidden count or dimensions")
        if not all(np.isfinite(arr).all() for arr in (self.a, self.b, self.c, self.d)) \
                or not np.isfinite(self.e):
            raise ValueError("non-finite network parameter")

    @property
    def hidden_count(self) -> int:
        return self.a.shape[0]

    def act_kind(self) -> int:
        if self.activation == RELU:
            return _knp.ACT_RELU
        if isinstance(self.activation, SigmoidSpec) and self.activation.kind == "logistic":
            return _knp.ACT_LOGISTIC
        return -1

    def to_flat(self) -> np.ndarray:
        """Flat parameter record: a, b row-major, c row-major, d, e."""
        return np.concatenate([self.a, self.b.ravel(), self.c.ravel(), self.d, [self.e]])

    @classmethod
    def from_flat(cls, flat, hidden_count, activation, domain):
        H, D, E = hidden_count, domain.D, domain.E
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (H + H * D + H * E + H + 1,):
            raise ValueError("flat record length mismatch")
        pos = 0
        a = flat[pos:pos + H]; pos += H
        b = flat[pos:pos + H * D].reshape(H, D); pos += H * D
        c = flat[pos:pos + H * E].reshape(H, E); pos += H * E
        d = flat[pos:pos + H]; pos += H
        return cls(a=a, b=b, c=c, d=d, e=flat[pos], activation=activation, domain=domain)


@dataclass(frozen=True, eq=False)
class VectorFnn:
    """D scalar networks bundled into one state map, sharing activation and domain."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("need at least one component")
        first = comps[0]
        for f in comps[1:]:
            if f.hidden_count != first.hidden_count:
                raise ValueError("components must share hidden count")
            if f.domain != first.domain:
                raise ValueError("components must share domain")
        if len(comps) != first.domain.D:
            raise ValueError(
                f"need D={first.domain.D} components, got {len(comps)}"
            )

    @property
    def domain(self) -> DomainSpec:
        return self.components[0].domain

    @property
    def hidden_count(self) -> int:
        return self.components[0].hidden_count

    @cached_property
    def stacked(self):
        """(a_flat, comp_ptr, B, C, d, e, act_kind) for the kernels."""
        a_flat = np.concatenate([f.a for f in self.components])
        B = np.concatenate([f.b for f in self.components])
        C = np.concatenate([f.c for f in self.components])
        d = np.concatenate([f.d for f in self.components])
        e = np.array([f.e for f in self.components])
        sizes = [f.hidden_count for f in self.components]
        comp_ptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        return a_flat, comp_ptr, B, C, d, e, self.components[0].act_kind()

    def to_flat(self) -> np.ndarray:
        return np.concatenate([f.to_flat() for f in self.components])


def _as_batch(x, dim):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :], True
    return x, False


def eval_fnn(f: VectorFnn | ScalarFnn, s, u):
    """Evaluate a network at (state, input); accepts single points or batches."""
    if isinstance(f, ScalarFnn):
        out = eval_fnn(_single(f), s, u)
        return out[..., 0]
    dom = f.domain
    S, single_s = _as_batch(s, dom.D)
    U, single_u = _as_batch(u, dom.E)
    if S.shape[1] != dom.D or U.shape[1] != dom.E:
        raise ValueError("state/input dimension mismatch")
    if S.shape[0] != U.shape[0]:
        raise ValueError("batch size mismatch")
    a_flat, comp_ptr, B, C, d, e, act_kind = f.stacked
    if act_kind < 0:
        act = f.components[0].activation
        h = act(S @ B.T + U @ C.T + d)
        out = np.empty((S.shape[0], len(f.components)))
        for di in range(len(f.components)):
            lo, hi = comp_ptr[di], comp_ptr[di + 1]
            out[:, di] = h[:, lo:hi] @ a_flat[lo:hi] + e[di]
    else:
        out = get_kernels().fnn_eval(a_flat, comp_ptr, B, C, d, e, act_kind, S, U)
    return out[0] if (single_s and single_u) else out


class _Single:
    """Wrap a ScalarFnn as a 1-output stack without forcing D == 1."""

    def __init__(self, f: ScalarFnn):
        self.domain = f.domain
        self.components = (f,)
        self.stacked = (
            f.a, np.array([0, f.hidden_count], dtype=np.int64),
            f.b, f.c, f.d, np.array([f.e]), f.act_kind(),
        )


def _single(f: ScalarFnn) -> "_Single":
    return _Single(f)


def eval_scalar_grid(f: ScalarFnn, pts) -> np.ndarray:
    """Evaluate on (n, D+E) product-domain points."""
    dom = f.domain
    return eval_fnn(_single(f), pts[:, : dom.D], pts[:, dom.D:])[:, 0]


def eval_vector_grid(f: VectorFnn, pts) -> np.ndarray:
    dom = f.domain
    return eval_fnn(f, pts[:, : dom.D], pts[:, dom.D:])


def family_membership(f: ScalarFnn, M: float, N: int) -> bool:
    """Whether f sits in the bounded-parameter ReLU family with 4N nodes."""
    if f.activation != RELU or f.hidden_count != 4 * N:
        return False
    dom = f.domain
    rt = np.sqrt(M)
    tol = lambda bound: bound * (1 + BOX_TOL) + BOX_TOL
    if np.abs(f.a).max(initial=0.0) > tol(2 * rt):
        return False
    if np.abs(f.d).max(initial=0.0) > tol(2 * rt):
        return False
    if abs(f.e) > tol(M):
        return False
    b_norms = dom.S * pnorm(f.b, dom.q, axis=1)
    c_norms = dom.I * pnorm(f.c, dom.q, axis=1)
    return bool(b_norms.max(initial=0.0) <= tol(rt) and c_norms.max(initial=0.0) <= tol(rt))


def param_perturbation_bound(f: ScalarFnn, f2: ScalarFnn, M: float) -> float:
    """Closed-form sup-gap bound for two members of the same ReLU family.

    4*sqrt(M)*sum|da| + 2S*sqrt(M)*sum||db||_q + 2I*sqrt(M)*sum||dc||_q
    + 2*sqrt(M)*sum|dd| + |de|.
    """
    if f.hidden_count != f2.hidden_count or f.domain != f2.domain:
        raise ValueError("networks must share shape and domain")
    dom = f.domain
    rt = np.sqrt(M)
    return float(
        4 * rt * np.abs(f.a - f2.a).sum()
        + 2 * dom.S * rt * pnorm(f.b - f2.b, dom.q, axis=1).sum()
        + 2 * dom.I * rt * pnorm(f.c - f2.c, dom.q, axis=1).sum()
        + 2 * rt * np.abs(f.d - f2.d).sum()
        + abs(f.e - f2.e)
    )


def internal_error_bound(eps: float, L: float, T: int) -> float:
    """eps * sum_{i=0}^{T-1} L^i, the function-gap-to-filter-gap transfer."""
    if eps < 0 or L < 0 or T < 1:
        raise ValueError("need eps >= 0, L >= 0, T >= 1")
    if L == 1.0:
        return eps * T
    return eps * (1.0 - L ** T) / (1.0 - L)


def activation_lipschitz(activation) -> float:
    if activation == RELU:
        return 1.0
    return activation.lipschitz


def fnn_lipschitz_state(f: VectorFnn) -> float:
    """Closed-form Lipschitz bound of the map s -> f(s, u) in the domain p-norm."""
    dom = f.domain
    lip = activation_lipschitz(f.components[0].activation)
    per_comp = np.array(
        [np.sum(np.abs(c.a) * pnorm(c.b, dom.q, axis=1)) * lip for c in f.components]
    )
    return float(pnorm(per_comp, dom.p))
