"""Finite Fourier mixtures as certifiable Barron-class targets.

A target g(x) = g0 + sum_k alpha_k * (cos(w_k.x + phi_k) - cos(phi_k)) has
a discrete Fourier measure with directed atoms at +/-w_k, so the
constant M = max(|g0|, sum_k alpha_k * ||w_k||_B), the normalizers v, V+,
V- of the one-step-function integral representation, and the sampling
measures mu+/- are computable up to 1-D quadrature.  Shallow networks are
built by sampling that representation: sigmoid nodes realize the inner
step function directly (2N hidden nodes), ReLU nodes realize each step as
a two-node ramp (4N hidden nodes) whose parameters stay inside the
bounded-parameter family boxes.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad

from .backend import get_kernels
from .domain import DomainSpec, pnorm
from .errors import DegenerateMeasureError, DomainViolationError
from .fnn import RELU, ScalarFnn, SigmoidSpec, VectorFnn, logistic_sigmoid

#: grid size for tabulated inverse-CDF sampling of t
_ICDF_GRID = 4096

#: absolute quadrature tolerance for the measure normalizers
_QUAD_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class FourierAtom:
    """One cosine term: amplitude alpha >= 0, frequency omega, phase phi."""

    omega: np.ndarray
    alpha: float
    phi: float

    def __post_init__(self):
        w = np.ascontiguousarray(np.atleast_1d(self.omega), dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "phi", float(self.phi))
        if not np.isfinite(self.omega).all() or not np.isfinite([self.alpha, self.phi]).all():
            raise ValueError("non-finite atom")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


@dataclass(frozen=True)
class MuSample:
    """One draw from mu+ or mu-: directed atom index, t in [0,1], sign."""

    atom_index: int
    t: float
    sign: int


def _sin_piece_bounds(a, theta):
    """Breakpoints of sign(sin(a*t + theta)) inside [0, 1]."""
    zeros = []
    k = int(np.floor(theta / np.pi)) - 1
    while True:
        t = (k * np.pi - theta) / a
        if t > 1.0 + 1e-15:
            break
        if 0.0 < t < 1.0:
            zeros.append(t)
        k += 1
    return [0.0] + sorted(zeros) + [1.0]


def _sign_integrals(a, theta):
    """(integral of max(sin,0), integral of max(-sin,0)) of sin(a*t+theta) on [0,1]."""
    pieces = _sin_piece_bounds(a, theta)
    pos = neg = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        if hi - lo < 1e-15:
            continue
        mid = 0.5 * (lo + hi)
        val, _ = quad(lambda t: abs(np.sin(a * t + theta)), lo, hi, epsabs=_QUAD_TOL)
        if np.sin(a * mid + theta) >= 0:
            pos += val
        else:
            neg += val
    return pos, neg


class BarronTarget:
    """A scalar Barron-class target given as a finite Fourier mixture.

    Carries the membership certificate M, the representation normalizers
    (v, V+, V-) and tabulated inverse CDFs for sampling mu+/-.  Immutable
    after construction.
    """

    def __init__(self, atoms, g0, domain: DomainSpec):
        self.atoms = tuple(atoms)
        self.g0 = float(g0)
        self.domain = domain
        if not np.isfinite(self.g0):
            raise ValueError("non-finite g0")

        live = [at for at in self.atoms if at.alpha > 0]
        for at in live:
            if at.omega.shape != (domain.Q,):
                raise ValueError(f"atom frequency must have dimension {domain.Q}")
            if domain.omega_norm(at.omega) == 0.0:
                raise ValueError("atom with positive mass needs a nonzero frequency")

        # directed atoms: (+w_k, phi_k) and (-w_k, -phi_k), mass alpha_k / 2
        K = len(live)
        self._w = np.zeros((2 * K, domain.Q))
        self._theta = np.zeros(2 * K)
        self._mass = np.zeros(2 * K)
        for j, at in enumerate(live):
            self._w[2 * j] = at.omega
            self._w[2 * j + 1] = -at.omega
            self._theta[2 * j] = at.phi
            self._theta[2 * j + 1] = -at.phi
            self._mass[2 * j] = self._mass[2 * j + 1] = at.alpha / 2.0
        self._wnorm = np.array([domain.omega_norm(w) for w in self._w])

        mass_omega = float(np.sum(self._mass * self._wnorm))
        self.barron_M = max(abs(self.g0), mass_omega)

        pos = np.zeros(2 * K)
        neg = np.zeros(2 * K)
        for j in range(2 * K):
            pos[j], neg[j] = _sign_integrals(self._wnorm[j], self._theta[j])
        self._m_plus = self._mass * self._wnorm * pos
        self._m_minus = self._mass * self._wnorm * neg
        self.v = float(self._m_plus.sum() + self._m_minus.sum())
        if self.v > 0:
            self.Vplus = float(self._m_plus.sum() / self.v)
            self.Vminus = float(self._m_minus.sum() / self.v)
        else:
            self.Vplus = self.Vminus = 0.0

    @property
    def n_directed(self) -> int:
        return self._w.shape[0]

    @cached_property
    def _stacked(self):
        W = np.array([at.omega for at in self.atoms if at.alpha > 0], dtype=float)
        alpha = np.array([at.alpha for at in self.atoms if at.alpha > 0], dtype=float)
        phi = np.array([at.phi for at in self.atoms if at.alpha > 0], dtype=float)
        if W.size == 0:
            W = np.zeros((0, self.domain.Q))
        ptr = np.array([0, len(alpha)], dtype=np.int64)
        return W, alpha, phi, ptr, np.array([self.g0])

    @cached_property
    def _icdf_tables(self):
        """Per sign: (valid atom indices, probabilities, cdf grid, t grid)."""
        tgrid = np.linspace(0.0, 1.0, _ICDF_GRID)
        tables = {}
        for sign, masses in ((1, self._m_plus), (-1, self._m_minus)):
            total = masses.sum()
            if total <= 0:
                tables[sign] = None
                continue
            idx = np.nonzero(masses > 0)[0]
            probs = masses[idx] / total
            cdfs = np.zeros((len(idx), _ICDF_GRID))
            for row, j in enumerate(idx):
                dens = np.maximum(sign * np.sin(self._wnorm[j] * tgrid + self._theta[j]), 0.0)
                cdf = np.concatenate(
                    [[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(tgrid))]
                )
                cdf += 1e-15 * np.arange(_ICDF_GRID)  # keep strictly increasing
                cdfs[row] = cdf / cdf[-1]
            tables[sign] = (idx, probs, cdfs, tgrid)
        return tables


def fourier_mixture(atoms, g0, domain: DomainSpec) -> BarronTarget:
    """Build a Barron target from cosine atoms; computes M, v, V+/- by quadrature."""
    return BarronTarget(atoms, g0, domain)


def eval_target(g: BarronTarget, x) -> float:
    """g0 + sum_k alpha_k (cos(w_k.x + phi_k) - cos(phi_k)); x must lie in the domain."""
    x = np.asarray(x, dtype=float)
    if not g.domain.contains(x):
        raise DomainViolationError("evaluation point outside the product ball")
    return float(eval_target_grid(g, x[None, :])[0])


def eval_target_grid(g: BarronTarget, pts) -> np.ndarray:
    """Vectorized evaluation on (n, D+E) points (no domain check)."""
    W, alpha, phi, ptr, g0 = g._stacked
    pts = np.ascontiguousarray(pts, dtype=float)
    return get_kernels().fourier_eval(W, alpha, phi, ptr, g0, pts)[:, 0]


def integral_rep_residual(g: BarronTarget, x) -> float:
    """|g(x) - g(0) - RHS| with the RHS integral evaluated by adaptive quadrature."""
    if g.v <= 0:
        raise ValueError("integral representation needs v > 0")
    x = np.asarray(x, dtype=float)
    lhs = eval_target(g, x) - g.g0
    rhs = 0.0
    for j in range(g.n_directed):
        a = g._wnorm[j]
        c = float(np.dot(g._w[j], x)) / a
        c = min(max(c, 0.0), 1.0)
        if c > 0:
            val, _ = quad(lambda t: np.sin(a * t + g._theta[j]), 0.0, c, epsabs=_QUAD_TOL)
            rhs += -2.0 * g._mass[j] * a * val
    return abs(lhs - rhs)


def sample_mu(g: BarronTarget, sign: int, n: int, seed: int):
    """n i.i.d. draws from mu_sign via tabulated inverse-CDF; deterministic per seed."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if n == 0:
        return []
    table = g._icdf_tables[sign]
    if table is None:
        raise DegenerateMeasureError(
            f"sign component {sign:+d} has zero mass; drop it per the construction"
        )
    idx, probs, cdfs, tgrid = table
    rng = np.random.default_rng(seed)
    rows = rng.choice(len(idx), size=n, p=probs)
    us = rng.random(n)
    out = []
    for row, u in zip(rows, us):
        t = float(np.interp(u, cdfs[row], tgrid))
        out.append(MuSample(atom_index=int(idx[row]), t=t, sign=sign))
    return out


def delta_sigmoid(sigma: SigmoidSpec, Lambda: float) -> float:
    """Step-vs-scaled-sigmoid L1 gap on [-1, 1]; logistic has a closed form."""
    if Lambda <= 0:
        raise ValueError("Lambda must be positive")
    if sigma.kind == "logistic":
        return float(2.0 / Lambda * (np.log(2.0) - np.log1p(np.exp(-Lambda))))
    left, _ = quad(lambda x: sigma(Lambda * x), -1.0, 0.0, epsabs=1e-12, limit=200)
    right, _ = quad(lambda x: 1.0 - sigma(Lambda * x), 0.0, 1.0, epsabs=1e-12, limit=200)
    return float(left + right)


def _derive_seed(seed: int, *path) -> int:
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *[int(p) & 0xFFFFFFFF for p in path]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _constant_network(g: BarronTarget, hidden: int, activation) -> ScalarFnn:
    dom = g.domain
    return ScalarFnn(
        a=np.zeros(hidden), b=np.zeros((hidden, dom.D)), c=np.zeros((hidden, dom.E)),
        d=np.zeros(hidden), e=g.g0, activation=activation, domain=dom,
    )


def _split_node_weights(dom: DomainSpec, w):
    return w[: dom.D], w[dom.D:]


def approximate_sigmoid(g: BarronTarget, N: int, Lambda: float,
                        sigma: SigmoidSpec | None = None, seed: int = 0) -> ScalarFnn:
    """2N-node sigmoid network f = -2v(V+ f+ - V- f-) + g(0) by sampling mu+/-.

    Parameters satisfy |a_i| <= 2M/N, ||(b_i,c_i)||_B <= Lambda,
    |d_i| <= Lambda, |e| <= M exactly.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if Lambda <= 0:
        raise ValueError("Lambda must be positive")
    sigma = sigma or logistic_sigmoid()
    dom = g.domain
    if g.v == 0:
        return _constant_network(g, 2 * N, sigma)

    a = np.zeros(2 * N)
    b = np.zeros((2 * N, dom.D))
    c = np.zeros((2 * N, dom.E))
    d = np.zeros(2 * N)
    pos = 0
    for k, sign in enumerate((1, -1)):
        Vs = g.Vplus if sign == 1 else g.Vminus
        if Vs == 0:
            pos += N  # dropped component: N inert nodes keep the 2N shape
            continue
        samples = sample_mu(g, sign, N, _derive_seed(seed, k))
        for s in samples:
            w_dir = g._w[s.atom_index]
            wn = g._wnorm[s.atom_index]
            node_w = Lambda * w_dir / wn
            bs, cs = _split_node_weights(dom, node_w)
            a[pos] = -sign * 2.0 * g.v * Vs / N
            b[pos] = bs
            c[pos] = cs
            d[pos] = -Lambda * s.t
            pos += 1
    return ScalarFnn(a=a, b=b, c=c, d=d, e=g.g0, activation=sigma, domain=dom)


def relu_ramp_width(M: float, N: int) -> float:
    """Width of the two-ReLU ramp realizing each sampled step function.

    1/sqrt(M*N) keeps the ramp bias at the same N^(-1/2) order as the
    Monte-Carlo term; the clip to [1/N, 2] keeps every node inside the
    bounded-parameter boxes for all M.
    """
    return float(np.clip(1.0 / np.sqrt(M * N), 1.0 / N, 2.0))


def approximate_relu(g: BarronTarget, N: int, seed: int = 0,
                     ramp_width: float | None = None) -> ScalarFnn:
    """4N-node ReLU network: 2N sampled steps, each a two-node ramp.

    Node slopes saturate ||(b_i,c_i)||_B = sqrt(M); all parameters lie in
    the bounded-parameter family boxes.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    dom = g.domain
    if g.v == 0:
        return _constant_network(g, 4 * N, RELU)
    M = g.barron_M
    beta = np.sqrt(M)
    delta_r = relu_ramp_width(M, N) if ramp_width is None else float(ramp_width)

    a = np.zeros(4 * N)
    b = np.zeros((4 * N, dom.D))
    c = np.zeros((4 * N, dom.E))
    d = np.zeros(4 * N)
    pos = 0
    for k, sign in enumerate((1, -1)):
        Vs = g.Vplus if sign == 1 else g.Vminus
        if Vs == 0:
            pos += 2 * N
            continue
        samples = sample_mu(g, sign, N, _derive_seed(seed, k))
        coeff = -sign * 2.0 * g.v * Vs / N
        for s in samples:
            w_dir = g._w[s.atom_index]
            wn = g._wnorm[s.atom_index]
            node_w = beta * w_dir / wn
            bs, cs = _split_node_weights(dom, node_w)
            # ramp(z) = (rho(beta*(z + delta_r)) - rho(beta*z)) / (beta*delta_r)
            a[pos] = coeff / (beta * delta_r)
            b[pos] = bs
            c[pos] = cs
            d[pos] = beta * (delta_r - s.t)
            pos += 1
            a[pos] = -coeff / (beta * delta_r)
            b[pos] = bs
            c[pos] = cs
            d[pos] = -beta * s.t
            pos += 1
    return ScalarFnn(a=a, b=b, c=c, d=d, e=g.g0, activation=RELU, domain=dom)


def sigmoid_bounds_ok(f: ScalarFnn, M: float, N: int, Lambda: float, tol: float = 1e-12) -> bool:
    """Exact check of the sigmoid parameter bounds (slack `tol` for arithmetic)."""
    dom = f.domain
    if f.hidden_count != 2 * N:
        return False
    bn = dom.S * pnorm(f.b, dom.q, axis=1) + dom.I * pnorm(f.c, dom.q, axis=1)
    ok = (
        np.abs(f.a).max(initial=0.0) <= 2 * M / N * (1 + tol) + tol
        and bn.max(initial=0.0) <= Lambda * (1 + tol) + tol
        and np.abs(f.d).max(initial=0.0) <= Lambda * (1 + tol) + tol
        and abs(f.e) <= M * (1 + tol) + tol
    )
    return bool(ok)


def approximate_system(g_vec, N: int, flavor: str = "relu", seed: int = 0,
                       Lambda: float | None = None,
                       sigma: SigmoidSpec | None = None) -> VectorFnn:
    """Bundle D scalar approximations of a system's components into one VectorFnn.

    `g_vec` is anything carrying `.components` (a list of BarronTarget, one
    per output coordinate) or directly an iterable of BarronTarget.  All
    components use the same seed, so identical components yield identical
    blocks.
    """
    comps = getattr(g_vec, "components", g_vec)
    if comps is None:
        raise ValueError("system carries no Barron components")
    comps = list(comps)
    nets = []
    for gd in comps:
        if flavor == "relu":
            nets.append(approximate_relu(gd, N, seed))
        elif flavor == "sigmoid":
            lam = np.sqrt(N) if Lambda is None else Lambda
            nets.append(approximate_sigmoid(gd, N, lam, sigma, seed))
        else:
            raise ValueError(f"unknown flavor {flavor!r}")
    return VectorFnn(tuple(nets))
