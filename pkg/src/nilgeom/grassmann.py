"""Horizontal subgroups, group projections, the rho distance on the
horizontal Grassmannian, epsilon-nets, and distance-estimate constants.

A horizontal k-subgroup is a k-dimensional abelian subspace of the first
layer; closure under the group product forces the bracket to vanish on it.
The projection pi_V takes the Euclidean projection of the layer-1 part and
the complementary projection is p * pi_V(p)^{-1}, which lands in the vertical
complement V1-perp + H^2 + ... + H^iota.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .algebra import GradedAlgebra
from .bch import bch_series, inverse, multiply
from .errors import (
    DimensionMismatch,
    EmptyNet,
    NoHorizontalSubgroup,
    NotAbelian,
    NotInFirstLayer,
    SolverFailure,
    ValidationFailure,
)
from .norms import HomogeneousNorm, sample_unit_sphere

ABELIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HorizontalSubgroup:
    alg: GradedAlgebra
    k: int
    frame: np.ndarray  # (k, q) orthonormal rows, zero outside layer 1
    bracket_residual: float

    @property
    def frame_h1(self):
        return self.frame[:, : self.alg.first_layer_dim]

    def coords(self, p):
        """Frame coefficients of the layer-1 part of p."""
        p = self.alg.check_coords(p)
        return p[..., : self.alg.first_layer_dim] @ self.frame_h1.T

    def embed(self, t):
        t = np.asarray(t, float)
        out = np.zeros(t.shape[:-1] + (self.alg.q,))
        out[..., : self.alg.first_layer_dim] = t @ self.frame_h1
        return out

    def spec_dict(self):
        return {
            "group": self.alg.name,
            "k": self.k,
            "frame": self.frame.tolist(),
            "bracket_residual": self.bracket_residual,
        }

    def __repr__(self):
        return f"HorizontalSubgroup({self.alg.name!r}, k={self.k})"


@dataclass(frozen=True, eq=False)
class VerticalComplement:
    horizontal: HorizontalSubgroup
    basis: np.ndarray  # (q - k, q) orthonormal rows

    @property
    def alg(self):
        return self.horizontal.alg

    @property
    def dim(self):
        return self.basis.shape[0]

    def embed(self, y):
        y = np.asarray(y, float)
        return y @ self.basis

    def coords(self, p):
        p = self.alg.check_coords(p)
        return p @ self.basis.T

    def __repr__(self):
        return f"VerticalComplement(of k={self.horizontal.k}, dim={self.dim})"


def make_horizontal(alg, frame):
    """Orthonormalize a spanning set inside the first layer and certify that
    its span is an (abelian) subgroup."""
    F = np.atleast_2d(np.asarray(frame, float))
    h1 = alg.first_layer_dim
    scale = max(1.0, float(np.max(np.abs(F))) if F.size else 1.0)
    if F.shape[1] == alg.q:
        if alg.q > h1 and np.max(np.abs(F[:, h1:])) > 1e-12 * scale:
            raise NotInFirstLayer(
                "frame vectors have coordinates outside the first layer"
            )
        F = F[:, :h1]
    elif F.shape[1] != h1:
        raise DimensionMismatch(
            f"frame vectors must have length {alg.q} or {h1}, got {F.shape[1]}"
        )
    k = F.shape[0]
    if k > h1:
        raise DimensionMismatch(f"k={k} exceeds the first-layer dimension {h1}")
    Q, R = np.linalg.qr(F.T)
    diag = np.diag(R)
    if np.min(np.abs(diag)) <= 1e-10 * scale:
        raise DimensionMismatch("frame is rank-deficient")
    B = (Q * np.sign(diag)).T
    emb = np.zeros((k, alg.q))
    emb[:, :h1] = B
    residual = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            residual = max(residual, float(np.max(np.abs(alg.bracket(emb[i], emb[j])))))
    if residual > ABELIAN_TOL:
        raise NotAbelian(
            f"span is not a subgroup: bracket residual {residual:.3e} > {ABELIAN_TOL}"
        )
    return HorizontalSubgroup(alg, k, emb, residual)


def make_vertical(V):
    """Orthonormal basis of the vertical complement: V1-perp inside H^1 plus
    every higher layer."""
    alg = V.alg
    h1 = alg.first_layer_dim
    k = V.k
    Q, _ = np.linalg.qr(np.concatenate([V.frame_h1.T, np.eye(h1)], axis=1))
    rows = np.zeros((alg.q - k, alg.q))
    rows[: h1 - k, :h1] = Q[:, k:h1].T
    for i, idx in enumerate(range(h1, alg.q)):
        rows[h1 - k + i, idx] = 1.0
    return VerticalComplement(V, rows)


def project_h(V, p):
    """pi_V: Euclidean projection of the layer-1 part onto the frame."""
    return V.embed(V.coords(p))


def project_v(V, p):
    """pi at the vertical complement: p * pi_V(p)^{-1}."""
    p = V.alg.check_coords(p)
    return multiply(V.alg, p, inverse(project_h(V, p)))


def vertical_conjugate(V, p):
    """pi_V(p)^{-1} * pi_Vperp(p) * pi_V(p), the element whose norm sandwiches
    the distance to V."""
    a = project_h(V, p)
    return multiply(V.alg, multiply(V.alg, inverse(a), project_v(V, p)), a)


# -- the rho distance on H(G, k) ------------------------------------------


def _grid_distance(alg, norm, FA, FB, grid):
    """d(pi_A u, pi_B u) for every grid direction u and every frame in FB.

    FA: (k, h1); FB: (N, k, h1); grid: (m, h1). Returns (N, m).
    Projections only see the layer-1 part, and scaling u scales the distance
    linearly, so the sphere maximum is attained at horizontal unit vectors.
    """
    h1 = alg.first_layer_dim
    a = (grid @ FA.T) @ FA
    b = np.einsum("nmk,nkh->nmh", np.einsum("mh,nkh->nmk", grid, FB), FB)
    A = np.zeros(grid.shape[:1] + (alg.q,))
    A[:, :h1] = a
    B = np.zeros(b.shape[:-1] + (alg.q,))
    B[..., :h1] = b
    return norm(bch_series(alg, -A, B))


def _sphere_ascent(fun, u, f, step=0.05, tol=1e-10, max_rounds=200):
    basis = np.eye(len(u))
    for _ in range(max_rounds):
        if step <= tol:
            break
        improved = False
        for t in basis:
            for sgn in (1.0, -1.0):
                cand = u + sgn * step * t
                cand = cand / np.linalg.norm(cand)
                fc = fun(cand)
                if fc > f:
                    u, f = cand, fc
                    improved = True
        if not improved:
            step *= 0.5
    return u, f


def rho(norm, V, W, samples=512, seed=0, refine=True):
    """max over the unit sphere of d(pi_V x, pi_W x)."""
    if V.k != W.k:
        raise DimensionMismatch(f"rho needs equal dimensions, got {V.k} and {W.k}")
    alg = V.alg
    if np.array_equal(V.frame, W.frame):
        return 0.0
    h1 = alg.first_layer_dim
    if h1 == 1:
        grid = np.array([[1.0], [-1.0]])
    elif h1 == 2:
        th = np.linspace(0.0, 2.0 * np.pi, max(samples, 64), endpoint=False)
        grid = np.stack([np.cos(th), np.sin(th)], axis=-1)
    else:
        g = np.random.default_rng(seed).standard_normal((samples, h1))
        g /= np.linalg.norm(g, axis=-1, keepdims=True)
        grid = np.concatenate([np.eye(h1), -np.eye(h1), g])
    vals = _grid_distance(alg, norm, V.frame_h1, W.frame_h1[None], grid)[0]
    i = int(np.argmax(vals))
    u, f = grid[i], float(vals[i])
    if refine and h1 > 1:

        def fun(u1):
            return float(
                _grid_distance(alg, norm, V.frame_h1, W.frame_h1[None], u1[None])[0, 0]
            )

        u, f = _sphere_ascent(fun, u, f)
    return f


# -- sampling and upsilon ---------------------------------------------------


def _layer1_table(alg):
    h1 = alg.first_layer_dim
    return alg.structure[:h1, :h1, :]


def _frame_objective(params, table, h1, k):
    """Squared bracket residual plus orthonormality penalty, with gradient.

    The bracket term is antisymmetric in the frame pair, so the sum over
    ordered pairs is half the full sum and both gradient contributions merge.
    """
    A = params.reshape(h1, k)
    gram = A.T @ A - np.eye(k)
    br = np.einsum("ai,bj,abm->ijm", A, A, table)
    f = 0.5 * float(np.sum(br**2)) + float(np.sum(gram**2))
    U = np.einsum("bj,cbm->cjm", A, table)
    grad = 2.0 * np.einsum("ljm,cjm->cl", br, U) + 4.0 * A @ gram
    return f, grad.ravel()


def sample_horizontal_frames(alg, k, n, rng, max_tries=None):
    """Random orthonormal k-frames spanning horizontal subgroups, as an
    (n, k, h1) array (may return fewer rows when the search is hard)."""
    h1 = alg.first_layer_dim
    if k > h1 or k < 1:
        return np.zeros((0, k, h1))
    table = _layer1_table(alg)
    trivially_abelian = k == 1 or np.max(np.abs(table)) == 0.0
    if trivially_abelian:
        G = rng.standard_normal((n, h1, k))
        Q, R = np.linalg.qr(G)
        d = np.sign(np.diagonal(R, axis1=-2, axis2=-1))
        Q = Q * np.where(d == 0.0, 1.0, d)[:, None, :]
        return np.swapaxes(Q, 1, 2)
    out = []
    tries = 0
    cap = max_tries if max_tries is not None else 60 * n
    while len(out) < n and tries < cap:
        tries += 1
        A = rng.standard_normal((h1, k))
        res = minimize(
            _frame_objective,
            A.ravel(),
            args=(table, h1, k),
            jac=True,
            method="BFGS",
            options={"gtol": 1e-14, "maxiter": 500},
        )
        if res.fun > 1e-26:
            continue
        B = res.x.reshape(h1, k)
        Q, R = np.linalg.qr(B)
        frame = (Q * np.sign(np.diag(R))).T
        emb = np.zeros((k, alg.q))
        emb[:, :h1] = frame
        residual = max(
            (
                float(np.max(np.abs(alg.bracket(emb[i], emb[j]))))
                for i in range(k)
                for j in range(i + 1, k)
            ),
            default=0.0,
        )
        if residual <= ABELIAN_TOL:
            out.append(frame)
    if not out:
        return np.zeros((0, k, h1))
    return np.stack(out)


def upsilon_lower_bound(alg, effort=64, seed=0):
    """Largest k for which a horizontal k-subgroup is found; exact when the
    first layer is abelian, two-dimensional, or three-dimensional (every
    bivector in a 3-space is decomposable, so an abelian 2-plane exists iff
    the bracket, seen as a map on bivectors, has a kernel)."""
    h1 = alg.first_layer_dim
    table = _layer1_table(alg)
    if np.max(np.abs(table)) == 0.0:
        return h1
    if h1 == 2:
        return 1
    if h1 == 3:
        rows = [table[a, b] for a, b in ((0, 1), (0, 2), (1, 2))]
        nullity = 3 - np.linalg.matrix_rank(np.stack(rows), tol=1e-12)
        return 2 if nullity >= 1 else 1
    rng = np.random.default_rng(seed)
    for k in range(h1 - 1, 1, -1):
        frames = sample_horizontal_frames(alg, k, 1, rng, max_tries=effort)
        if len(frames):
            return k
    return 1


# -- epsilon-nets -----------------------------------------------------------


@dataclass(eq=False)
class GrassmannianNet:
    alg: GradedAlgebra
    k: int
    elements: list
    eps: float
    achieved_radius: float
    seed: int
    n_validate: int

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def spec_dict(self):
        return {
            "group": self.alg.name,
            "k": self.k,
            "eps": self.eps,
            "achieved_radius": self.achieved_radius,
            "seed": self.seed,
            "n_validate": self.n_validate,
            "frames": [V.frame_h1.tolist() for V in self.elements],
        }


def _embed_frame(alg, frame_h1):
    k, h1 = frame_h1.shape
    emb = np.zeros((k, alg.q))
    emb[:, :h1] = frame_h1
    return emb


def _min_rho_to_net(alg, norm, cands, net_frames, grid):
    """Per-candidate min over the net of the grid estimate of rho.

    cands: (S, k, h1); net_frames: (N, k, h1). Returns (S,). Looping over net
    elements keeps the arrays at (S, m, q).
    """
    mins = None
    for j in range(net_frames.shape[0]):
        vals = _grid_distance(alg, norm, net_frames[j], cands, grid).max(axis=1)
        mins = vals if mins is None else np.minimum(mins, vals)
    return mins


def _line_frames(thetas):
    return np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)[:, None, :]


def _net_lines(alg, norm, eps, rng):
    """Covering net of horizontal lines when the first layer is a plane.

    On a 2-dimensional first layer the only possible layer-2 bracket is a
    multiple of the symplectic form, so rho between two lines depends only on
    the angle between them; a uniform angular grid is a covering net.
    """

    def line(theta):
        d = np.array([[np.cos(theta), np.sin(theta)]])
        return make_horizontal(alg, _embed_frame(alg, d))

    base = line(0.0)

    def gap(delta):
        return rho(norm, base, line(delta), samples=512, refine=False)

    lo, hi = 1e-6, np.pi / 2
    if gap(hi) <= 0.9 * eps:
        step = hi
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if gap(mid) <= 0.9 * eps:
                lo = mid
            else:
                hi = mid
        step = lo
    n = max(1, int(np.ceil(np.pi / (2.0 * step))))
    thetas = (np.arange(n) + rng.uniform(0.0, 1.0)) * np.pi / n
    return [line(t) for t in thetas]


def grass_net(alg, norm, k, eps, seed=0, n_validate=1000, max_rounds=8):
    """Greedy rho-net of the horizontal k-Grassmannian with sampled covering
    validation and repair."""
    h1 = alg.first_layer_dim
    rng = np.random.default_rng(seed)
    probe = sample_horizontal_frames(alg, k, 1, rng)
    if len(probe) == 0:
        raise NoHorizontalSubgroup(
            f"no horizontal {k}-subgroup found in {alg.name} (first layer dim {h1})"
        )
    if h1 == 2 and k == 1:
        elements = _net_lines(alg, norm, eps, rng)
    else:
        pool = sample_horizontal_frames(alg, k, 256, rng)
        elements = [make_horizontal(alg, _embed_frame(alg, probe[0]))]
        grid = _validation_grid(h1, rng)
        for cand in pool:
            frames = np.stack([V.frame_h1 for V in elements])
            vals = _grid_distance(alg, norm, cand, frames, grid).max(axis=1)
            if np.min(vals) > 0.9 * eps:
                elements.append(make_horizontal(alg, _embed_frame(alg, cand)))
    grid = _validation_grid(h1, rng)
    achieved = 0.0
    for _ in range(max_rounds):
        samples = sample_horizontal_frames(alg, k, n_validate, rng)
        frames = np.stack([V.frame_h1 for V in elements])
        dmin = _min_rho_to_net(alg, norm, samples, frames, grid)
        achieved = float(np.max(dmin))
        bad = np.nonzero(dmin > eps)[0]
        if len(bad) == 0:
            break
        worst_first = bad[np.argsort(-dmin[bad])][:64]
        for i in worst_first:
            elements.append(make_horizontal(alg, _embed_frame(alg, samples[i])))
    return GrassmannianNet(alg, k, elements, eps, achieved, seed, n_validate)


def _validation_grid(h1, rng):
    if h1 == 1:
        return np.array([[1.0], [-1.0]])
    if h1 == 2:
        th = np.linspace(0.0, 2.0 * np.pi, 192, endpoint=False)
        return np.stack([np.cos(th), np.sin(th)], axis=-1)
    g = rng.standard_normal((192, h1))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    return np.concatenate([np.eye(h1), -np.eye(h1), g])


# -- distances to subgroups -------------------------------------------------


def _real_cubic_roots(B, C, D):
    """Real roots of t^3 + B t^2 + C t + D, stacked as (..., 3) with the
    single-root branch repeated."""
    B = np.asarray(B, float)
    p = C - B**2 / 3.0
    q = 2.0 * B**3 / 27.0 - B * C / 3.0 + D
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    single = disc > 0
    sq = np.sqrt(np.where(single, disc, 0.0))
    s_single = np.cbrt(-q / 2.0 + sq) + np.cbrt(-q / 2.0 - sq)
    p_neg = np.where(p < -1e-30, p, -1.0)
    r = np.sqrt(-p_neg / 3.0)
    arg = np.clip(3.0 * q / (2.0 * p_neg) * np.sqrt(-3.0 / p_neg), -1.0, 1.0)
    th = np.arccos(arg)
    ks = np.arange(3.0)
    s_triple = 2.0 * r[..., None] * np.cos(
        th[..., None] / 3.0 - 2.0 * np.pi * ks / 3.0
    )
    s = np.where(single[..., None], s_single[..., None], s_triple)
    # near a triple root the depressed form loses two thirds of the digits;
    # snap to the exact multiple root instead
    scale2 = (1.0 + B**2) * 1e-12
    triple = (np.abs(p) <= scale2) & (q**2 <= scale2**3)
    s = np.where(triple[..., None], 0.0, s)
    return s - B[..., None] / 3.0


def _line_distance_koranyi(norm, V, p):
    """Closed-form distance to a horizontal line in a step-2 group with the
    Koranyi-type norm: the quartic in the line parameter is minimized at a
    root of its derivative cubic."""
    alg = V.alg
    h1 = alg.first_layer_dim
    p = np.asarray(p, float)
    z = p[..., :h1]
    c = p[..., h1:]
    w = V.frame_h1[0]
    u = alg.bracket(V.frame[0], np.concatenate([z, np.zeros_like(c)], axis=-1))[
        ..., h1:
    ]
    beta = norm.beta
    alpha = z @ w
    zeta = np.sum(z**2, axis=-1)
    cu = np.sum(c * u, axis=-1)
    uu = np.sum(u**2, axis=-1)
    cc = np.sum(c**2, axis=-1)
    B = -3.0 * alpha
    C = 2.0 * alpha**2 + zeta + beta * uu / 8.0
    D = -zeta * alpha - beta * cu / 4.0
    t = _real_cubic_roots(B, C, D)
    # the Euclidean projection parameter is exact whenever the vertical part
    # cannot be improved; keep it as an extra candidate
    t = np.concatenate([t, alpha[..., None]], axis=-1)
    Q = t**2 - 2.0 * alpha[..., None] * t + zeta[..., None]
    R = cc[..., None] - t * cu[..., None] + t**2 * uu[..., None] / 4.0
    N = Q**2 + beta * R
    return np.min(np.maximum(N, 0.0), axis=-1) ** 0.25


def _pattern_search(fun, starts, tol=1e-8, max_rounds=300):
    """Coordinate descent with geometric step shrink, vectorized over leading
    axes; starts has shape (..., n_starts, m)."""
    y = np.array(starts, float)
    f = fun(y)
    if not np.all(np.isfinite(f)):
        raise SolverFailure("objective not finite at the starting points")
    m = y.shape[-1]
    step = 0.5 * (1.0 + np.max(np.abs(y), axis=-1))
    for _ in range(max_rounds):
        improved = np.zeros(f.shape, bool)
        for j in range(m):
            for sgn in (1.0, -1.0):
                cand = y.copy()
                cand[..., j] += sgn * step
                fc = fun(cand)
                better = fc < f
                y[..., j] = np.where(better, cand[..., j], y[..., j])
                f = np.where(better, fc, f)
                improved |= better
        step = np.where(improved, step, 0.5 * step)
        if np.max(step) < tol:
            break
    if not np.all(np.isfinite(f)):
        raise SolverFailure("solver produced non-finite values")
    return y, f


def _solver_starts(base, n_starts, rng):
    """Stack of starting points around an analytic candidate: the candidate
    itself, zero, and jittered rescalings."""
    shape = base.shape[:-1]
    m = base.shape[-1]
    scale = 1.0 + np.abs(base).max(axis=-1, keepdims=True)
    starts = [base, np.zeros_like(base)]
    factors = (0.5, 1.0, 2.0)
    while len(starts) < n_starts:
        f = factors[len(starts) % len(factors)]
        jitter = rng.standard_normal(shape + (m,)) * 0.3 * scale
        starts.append(f * base + jitter)
    return np.stack(starts[:n_starts], axis=-2)


def dist_to_subgroup(norm, p, S, method="auto", seed=0, tol=1e-8, n_starts=None):
    """Homogeneous distance from p to a horizontal subgroup or a vertical
    complement, batched over leading axes of p.

    method="auto" uses exact closed forms where available (vertical
    complements; step-1 groups; Koranyi lines in step-2 groups) and the
    multi-start solver otherwise; method="solver" forces the numeric path.
    """
    alg = norm.alg
    p = alg.check_coords(np.asarray(p, float))
    scalar = p.ndim == 1
    if isinstance(S, VerticalComplement):
        if method == "auto":
            # any w in the complement leaves the layer-1 projection onto V
            # untouched, so the norm of pi_V(p) is attained and optimal
            out = norm(project_h(S.horizontal, p))
            return float(out) if scalar else out
        base = S.coords(p)
        embed = S.embed
    else:
        V = S
        if method == "auto":
            if alg.step == 1:
                r = p[..., : alg.first_layer_dim] - project_h(V, p)[..., : alg.first_layer_dim]
                out = np.linalg.norm(r, axis=-1)
                return float(out) if scalar else out
            if norm.kind == "koranyi" and alg.step == 2 and V.k == 1:
                out = _line_distance_koranyi(norm, V, p)
                return float(out) if scalar else out
        base = V.coords(p)
        embed = V.embed
    if n_starts is None:
        n_starts = 9 if base.shape[-1] == 1 else 17
    rng = np.random.default_rng(seed)
    starts = _solver_starts(base, n_starts, rng)
    pp = p[..., None, :]

    def fun(y):
        return norm(multiply(alg, inverse(embed(y)), pp))

    _, f = _pattern_search(fun, starts, tol=tol)
    out = f.min(axis=-1)
    return float(out) if scalar else out


# -- the certified constant -------------------------------------------------


@dataclass(eq=False)
class GrassmannianConstants:
    c1_hat: float
    c_G_hat: float
    safety: float
    seed: int
    n_samples: int
    ks: tuple
    min_slack: float

    def spec_dict(self):
        return {
            "c1_hat": self.c1_hat,
            "c_G_hat": self.c_G_hat,
            "safety": self.safety,
            "seed": self.seed,
            "n_samples": self.n_samples,
            "ks": list(self.ks),
            "min_slack": self.min_slack,
        }


def estimate_cG(alg, norm, nets, samples=100000, safety=1.1, seed=0, n_solver=2000):
    """c1_hat = max of ||pi_V(z)|| over nets and unit-sphere samples, then
    c_G_hat = 1/(1 + 2*safety*c1_hat), validated on fresh samples against
    c_G*(||pi_V p|| + ||pi_Vperp p||) <= ||p|| and, on a solver subsample,
    against the conjugate-element chain for d(p, V)."""
    if isinstance(nets, GrassmannianNet):
        nets = [nets]
    subs = [V for net in nets for V in net]
    if not subs:
        raise EmptyNet("no net elements supplied")
    rng = np.random.default_rng(seed)
    per = max(64, samples // len(subs))
    c1 = 0.0
    for V in subs:
        Z = sample_unit_sphere(norm, per, rng)
        c1 = max(c1, float(np.max(norm(project_h(V, Z)))))
    c_G = 1.0 / (1.0 + 2.0 * safety * c1)
    if not 0.0 < c_G < 1.0:
        raise ValidationFailure(f"c_G_hat={c_G} outside (0,1)")
    min_slack = np.inf
    for V in subs:
        P = sample_unit_sphere(norm, per, rng)
        lhs = c_G * (norm(project_h(V, P)) + norm(project_v(V, P)))
        slack = float(np.min(1.0 - lhs))  # ||p|| = 1 on the sphere
        min_slack = min(min_slack, slack)
        if slack < -1e-9:
            raise ValidationFailure(
                f"projection-sum bound violated with slack {slack:.3e}; "
                "increase the safety factor"
            )
    n_chain = min(n_solver, samples)
    V = subs[int(rng.integers(len(subs)))]
    P = sample_unit_sphere(norm, n_chain, rng)
    g = vertical_conjugate(V, P)
    d = dist_to_subgroup(norm, P, V, seed=seed + 1)
    upper = norm(g)
    chain = np.min(
        np.minimum(d - c_G * upper, upper * (1.0 + 1e-6) - d) / (1.0 + upper)
    )
    min_slack = min(min_slack, float(chain))
    if chain < -1e-6:
        raise ValidationFailure(
            f"conjugate-element chain violated with relative slack {chain:.3e}"
        )
    ks = tuple(sorted({net.k for net in nets}))
    return GrassmannianConstants(c1, c_G, safety, seed, samples, ks, float(min_slack))
