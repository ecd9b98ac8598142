"""Target dynamical systems, finite-length state filters and their norms.

A system is a state map g: B_S x B_I -> B_S run by forward recursion
x(t) = g(x(t-1), u(t)) over finite input sequences.  Filter-norm
distances, Lipschitz constants and contraction profiles are estimated
empirically on sampled inputs (random sequences plus ball-corner constant
sequences); every estimate is a lower bound of the corresponding sup, so
"measured <= bound" checks stay sound.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .backend import get_kernels
from .barron import BarronTarget
from .domain import DomainSpec, eval_grid, pnorm, random_ball_points
from .errors import DomainPreservationError
from .fnn import VectorFnn, eval_fnn

#: tolerated state overshoot of the ball boundary (floating-point drift)
DOMAIN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TargetSystem:
    """A state map with its domain and the family constants (P, L, M).

    Either `components` (one BarronTarget per output coordinate, enabling
    the fast stacked kernels and Barron certification) or a raw
    `state_map(x, u) -> x'` callable must be given.
    """

    domain: DomainSpec
    P: float
    L: float
    M: float | None = None
    components: tuple | None = None
    state_map: object = None
    x_init: np.ndarray | None = None

    def __post_init__(self):
        if self.components is None and self.state_map is None:
            raise ValueError("need components or a state_map")
        if self.components is not None:
            comps = tuple(self.components)
            if len(comps) != self.domain.D:
                raise ValueError("need one component per state coordinate")
            object.__setattr__(self, "components", comps)
        xi = np.zeros(self.domain.D) if self.x_init is None else \
            np.asarray(self.x_init, dtype=float)
        xi = np.ascontiguousarray(xi)
        xi.setflags(write=False)
        object.__setattr__(self, "x_init", xi)

    @cached_property
    def _mixture_stack(self):
        if self.components is None:
            return None
        Ws, alphas, phis, sizes, g0s = [], [], [], [], []
        for comp in self.components:
            W, alpha, phi, _, g0 = comp._stacked
            Ws.append(W)
            alphas.append(alpha)
            phis.append(phi)
            sizes.append(len(alpha))
            g0s.append(g0[0])
        W = np.concatenate(Ws) if Ws else np.zeros((0, self.domain.Q))
        comp_ptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        return (W, np.concatenate(alphas), np.concatenate(phis), comp_ptr,
                np.array(g0s))


def step_batch(sys_like, X, U):
    """One forward step of a system/network/raw map on a batch of (state, input)."""
    X = np.ascontiguousarray(X, dtype=float)
    U = np.ascontiguousarray(U, dtype=float)
    custom = getattr(sys_like, "step_batch", None)
    if custom is not None:
        return np.asarray(custom(X, U), dtype=float)
    if isinstance(sys_like, VectorFnn):
        return eval_fnn(sys_like, X, U)
    if isinstance(sys_like, TargetSystem):
        if sys_like.components is not None:
            W, alpha, phi, ptr, g0 = sys_like._mixture_stack
            Z = np.concatenate([X, U], axis=1)
            return get_kernels().fourier_eval(W, alpha, phi, ptr, g0, Z)
        out = np.empty_like(X)
        for i in range(X.shape[0]):
            out[i] = np.asarray(sys_like.state_map(X[i], U[i]), dtype=float)
        return out
    # bare callable (x, u) -> x'
    out = np.empty_like(X)
    for i in range(X.shape[0]):
        out[i] = np.asarray(sys_like(X[i], U[i]), dtype=float)
    return out


def _filter_batch(sys_like, X0, U, domain=None, check_domain=True):
    """States (n, T, D) of the recursion from per-sequence inits X0 over U (n, T, E)."""
    U = np.ascontiguousarray(U, dtype=float)
    n, T, _ = U.shape
    X0 = np.asarray(X0, dtype=float)
    if X0.ndim == 1:
        X0 = np.broadcast_to(X0, (n, X0.shape[0]))
    x = np.ascontiguousarray(X0, dtype=float)
    dom = domain or getattr(sys_like, "domain", None)

    fast = None
    if isinstance(sys_like, TargetSystem) and sys_like.components is not None \
            and getattr(sys_like, "step_batch", None) is None:
        W, alpha, phi, ptr, g0 = sys_like._mixture_stack
        fast = lambda: get_kernels().fourier_filter(W, alpha, phi, ptr, g0, U, x[0])
    elif isinstance(sys_like, VectorFnn):
        a_flat, ptr, B, C, d, e, act_kind = sys_like.stacked
        if act_kind >= 0:
            fast = lambda: get_kernels().fnn_filter(a_flat, ptr, B, C, d, e, act_kind, U, x[0])
    if fast is not None and X0.ndim == 2 and np.all(X0 == X0[0]):
        X = fast()
    else:
        D = x.shape[1]
        X = np.empty((n, T, D))
        for t in range(T):
            x = step_batch(sys_like, x, U[:, t])
            X[:, t] = x
    if check_domain and dom is not None:
        worst = pnorm(X.reshape(-1, X.shape[-1]), dom.p, axis=-1).max(initial=0.0)
        if worst > dom.S + DOMAIN_TOL:
            raise DomainPreservationError(
                f"state p-norm reached {worst}, ball radius is {dom.S}"
            )
    return X


def run_filter(sys_like, x_init, inputs, domain=None, check_domain=True):
    """State sequence {x(t)} of the forward recursion over one input sequence."""
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim == 1:
        inputs = inputs[:, None]
    if inputs.shape[0] == 0:
        return np.zeros((0, np.atleast_1d(np.asarray(x_init)).shape[0]))
    x_init = np.atleast_1d(np.asarray(x_init, dtype=float))
    return _filter_batch(sys_like, x_init, inputs[None], domain, check_domain)[0]


@dataclass(frozen=True, eq=False)
class InputSampler:
    """Deterministic bundle of input sequences: random + ball-corner constants."""

    domain: DomainSpec
    T: int
    n_random: int = 128
    seed: int = 0
    include_corners: bool = True

    @cached_property
    def _sequences(self):
        dom = self.domain
        seqs = []
        if self.include_corners:
            for corner in ball_corners(dom.I, dom.E, dom.p):
                seqs.append(np.tile(corner, (self.T, 1)))
            seqs.append(np.zeros((self.T, dom.E)))
        if self.n_random > 0:
            rng = np.random.default_rng(self.seed)
            pts = random_ball_points(rng, self.n_random * self.T, dom.I, dom.E, dom.p)
            seqs.extend(pts.reshape(self.n_random, self.T, dom.E))
        out = np.array(seqs) if seqs else np.zeros((0, self.T, dom.E))
        out.setflags(write=False)
        return out

    def sequences(self) -> np.ndarray:
        return self._sequences


def ball_corners(radius, dim, p):
    """Extreme points probed as corner inputs: +/-r e_i, plus all sign corners for p=inf."""
    corners = []
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = radius
        corners.append(e.copy())
        corners.append(-e)
    if p == np.inf and 1 < dim <= 6:
        for signs in itertools.product((-1.0, 1.0), repeat=dim):
            corners.append(radius * np.array(signs))
    return corners


def corner_sequences(domain: DomainSpec, T: int, max_sequences: int = 100_000):
    """Every length-T sequence over the corner alphabet (exhaustive oracle input)."""
    alphabet = ball_corners(domain.I, domain.E, domain.p)
    n = len(alphabet) ** T
    if n > max_sequences:
        raise ValueError(f"{n} corner sequences exceed the guard {max_sequences}")
    seqs = np.array([list(combo) for combo in itertools.product(alphabet, repeat=T)])
    return seqs.reshape(n, T, domain.E)


def filter_distance(sys_a, init_a, sys_b, init_b, input_sampler, T: int, p: float,
                    readout_a=None, readout_b=None) -> float:
    """Empirical filter-norm distance: max over sampled sequences and steps t.

    A lower bound of the true filter-norm distance.  Optional readout
    matrices compare outputs W x(t) instead of raw states.
    """
    U = input_sampler.sequences() if hasattr(input_sampler, "sequences") \
        else np.asarray(input_sampler, dtype=float)
    if U.shape[1] != T:
        raise ValueError(f"sampler produces length-{U.shape[1]} sequences, need {T}")
    if U.shape[0] == 0:
        return 0.0
    XA = _filter_batch(sys_a, np.asarray(init_a, dtype=float), U)
    XB = _filter_batch(sys_b, np.asarray(init_b, dtype=float), U)
    if readout_a is not None:
        XA = XA @ np.asarray(readout_a, dtype=float).T
    if readout_b is not None:
        XB = XB @ np.asarray(readout_b, dtype=float).T
    gaps = pnorm(XA - XB, p, axis=-1)
    return float(gaps.max())


def estimate_lipschitz(sys_like, n_pairs: int, seed: int = 0,
                       domain: DomainSpec | None = None) -> float:
    """Max sampled ratio ||g(x,u)-g(x',u)||_p / ||x-x'||_p; lower bound of L."""
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    dom = domain or sys_like.domain
    rng = np.random.default_rng(seed)
    X1 = random_ball_points(rng, n_pairs, dom.S, dom.D, dom.p)
    X2 = random_ball_points(rng, n_pairs, dom.S, dom.D, dom.p)
    U = random_ball_points(rng, n_pairs, dom.I, dom.E, dom.p)
    dx = pnorm(X1 - X2, dom.p, axis=-1)
    keep = dx > 1e-12
    if not np.any(keep):
        return 0.0
    G1 = step_batch(sys_like, X1[keep], U[keep])
    G2 = step_batch(sys_like, X2[keep], U[keep])
    dg = pnorm(G1 - G2, dom.p, axis=-1)
    return float((dg / dx[keep]).max())


@dataclass(frozen=True)
class AssumptionReport:
    """Grid-checked verdicts for the three target-system assumptions."""

    domain_preserved: bool
    lipschitz_ok: bool
    barron_certified: bool
    sup_range: float
    lipschitz_estimate: float

    @property
    def all_ok(self) -> bool:
        return self.domain_preserved and self.lipschitz_ok and self.barron_certified


def check_assumptions(sys: TargetSystem, grid_density: int = 10_000) -> AssumptionReport:
    """Evaluate range, Lipschitz and Barron-certificate checks on the fixed grid."""
    dom = sys.domain
    pts = eval_grid(dom, min_tensor=grid_density)
    vals = step_batch(sys, pts[:, : dom.D], pts[:, dom.D:])
    sup_range = float(pnorm(vals, dom.p, axis=-1).max())
    lip = estimate_lipschitz(sys, n_pairs=max(512, grid_density // 4), seed=7)
    certified = (
        sys.components is not None
        and sys.M is not None
        and all(isinstance(c, BarronTarget) for c in sys.components)
        and max(c.barron_M for c in sys.components) <= sys.M * (1 + 1e-12) + 1e-12
    )
    return AssumptionReport(
        domain_preserved=sup_range <= sys.P * (1 + 1e-9) + 1e-9,
        lipschitz_ok=lip <= sys.L * (1 + 1e-9) + 1e-9,
        barron_certified=bool(certified),
        sup_range=sup_range,
        lipschitz_estimate=lip,
    )


def contraction_profile(sys_like, T_max: int, trials: int = 32, seed: int = 0,
                        domain: DomainSpec | None = None) -> np.ndarray:
    """Empirical max terminal-state gap from two random inits, per horizon t."""
    if T_max < 1:
        raise ValueError("T_max must be >= 1")
    dom = domain or sys_like.domain
    rng = np.random.default_rng(seed)
    profile = np.zeros(T_max)
    for t in range(1, T_max + 1):
        X1 = random_ball_points(rng, trials, dom.S, dom.D, dom.p)
        X2 = random_ball_points(rng, trials, dom.S, dom.D, dom.p)
        U = random_ball_points(rng, trials * t, dom.I, dom.E, dom.p).reshape(trials, t, dom.E)
        A = _filter_batch(sys_like, X1, U, domain=dom)
        B = _filter_batch(sys_like, X2, U, domain=dom)
        profile[t - 1] = pnorm(A[:, -1] - B[:, -1], dom.p, axis=-1).max()
    return profile


def make_strictly_contracting(spec: DomainSpec, L_target: float, n_atoms: int,
                              seed: int = 0) -> TargetSystem:
    """Random Fourier-mixture system rescaled to be strictly contracting.

    Amplitudes are scaled so the closed-form Lipschitz bound (which
    dominates any sampled estimate) times the 1.25 safety factor stays
    below L_target and the range bound stays below P = L_target * S; the
    resulting system is uniformly state contracting with null sequence
    2 S L_target^t.
    """
    if not (0 < L_target < 1):
        raise ValueError("L_target must lie in (0, 1)")
    from .barron import FourierAtom, fourier_mixture

    rng = np.random.default_rng(seed)
    P = L_target * spec.S
    raw = []
    for _ in range(spec.D):
        atoms = []
        for _ in range(n_atoms):
            w = rng.normal(0.0, 1.0, spec.Q)
            w *= rng.uniform(0.8, 2.5) / max(spec.omega_norm(w), 1e-12)
            atoms.append((w, rng.uniform(0.3, 1.0), rng.uniform(0.0, 2 * np.pi)))
        raw.append((atoms, rng.uniform(-0.3, 0.3) * spec.S))

    # closed-form Lipschitz (state block) and range bounds of the unscaled draw
    lips, ranges = [], []
    for atoms, g0 in raw:
        lip = sum(al * spec.S * pnorm(w[: spec.D], spec.q) / spec.S for w, al, _ in atoms)
        lip = sum(al * pnorm(w[: spec.D], spec.q) for w, al, _ in atoms)
        rng_d = abs(g0) + sum(al * min(2.0, spec.omega_norm(w)) for w, al, _ in atoms)
        lips.append(lip)
        ranges.append(rng_d)
    L_vec = float(pnorm(np.array(lips), spec.p)) if n_atoms > 0 else 0.0
    R_vec = float(pnorm(np.array(ranges), spec.p))

    scale = 1.0
    if L_vec > 0:
        scale = min(scale, L_target / (1.25 * L_vec))
    if R_vec > 0:
        scale = min(scale, P / R_vec)

    comps = []
    for atoms, g0 in raw:
        comps.append(fourier_mixture(
            [FourierAtom(w, scale * al, ph) for w, al, ph in atoms], scale * g0, spec,
        ))
    M = max(c.barron_M for c in comps)
    return TargetSystem(
        domain=spec, P=P, L=(L_target if n_atoms > 0 else 0.0), M=M,
        components=tuple(comps),
    )
