"""Extrinsic geometry of an immersed submanifold, computed from jets.

Every derivative comes from jet arithmetic: the immersion components are
evaluated as order-4 jets of the parameters, frames and fundamental forms
are assembled in jet arithmetic, and the normal-bundle quantities needed by
the biharmonicity equations (nabla-perp H, its rough Laplacian, grad |H|^2,
the curvature-style traces) fall out as exact point values.  Finite
differences appear only inside the independent cross-check oracle
:func:`fd_normal_laplacian`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import (
    AmbientModel,
    GeometryError,
    christoffel_point,
    curvature_parts,
    metric_at,
    scalar_from_metric_jets,
    tangent_projector,
)
from .exprs import Bindings, Expr, evaluate_jet_env
from .jets import Jet, embed, extract, jet_matrix_inverse, seed_point

RANK_TOL = 1e-8


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    samples: int
    periodic: bool = False


@dataclass
class ImmersionModel:
    name: str
    dim: int
    params: tuple[str, ...]
    components: tuple[Expr, ...]
    domain: tuple[Axis, ...]
    bindings: Bindings = field(default_factory=dict)

    def grid(self):
        """Sample points, row-major over axes; periodic axes drop the endpoint."""
        axes = []
        for ax in self.domain:
            if ax.periodic:
                axes.append(np.linspace(ax.lo, ax.hi, ax.samples, endpoint=False))
            else:
                axes.append(np.linspace(ax.lo, ax.hi, ax.samples))
        mesh = np.meshgrid(*axes, indexing="ij")
        return [tuple(float(m[idx]) for m in mesh) for idx in np.ndindex(*mesh[0].shape)]


# -- jet-level linear algebra over a metric backend ---------------------------


class _ChartCalc:
    """Covariant calculus along the immersion for a chart ambient."""

    def __init__(self, space, pos):
        m, d = pos[0].nvars, space.dim
        order = pos[0].order
        self.space, self.m, self.d = space, m, d
        aug = [embed(p, m + d) for p in pos]
        for a in range(d):
            aug[a] = aug[a] + Jet.variable(m + d, order, m + a, 0.0)
        env = aug
        g_aug = [
            [evaluate_jet_env(e, env, space.bindings) for e in row] for row in space.metric
        ]

        def as_aug(x):
            return x if isinstance(x, Jet) else Jet.constant(m + d, order, float(x))

        g_aug = [[as_aug(e) for e in row] for row in g_aug]
        self.g = [[extract(e, m, order) for e in row] for row in g_aug]
        gval = np.array([[e.value for e in row] for row in self.g])
        if np.linalg.eigvalsh(gval).min() <= 0.0:
            raise GeometryError("ambient metric not positive definite along immersion")
        dg = [
            [[extract(g_aug[a][b], m, order - 1, extra=m + c) for b in range(d)] for a in range(d)]
            for c in range(d)
        ]
        ginv = jet_matrix_inverse([[e.truncate(order - 1) for e in row] for row in self.g])
        gamma = [[[None] * d for _ in range(d)] for _ in range(d)]
        for a in range(d):
            for b in range(a + 1):
                low = [ (dg[a][c][b] + dg[b][c][a] - dg[c][a][b]) * 0.5 for c in range(d)]
                for c in range(d):
                    acc = ginv[c][0] * low[0]
                    for e in range(1, d):
                        acc = acc + ginv[c][e] * low[e]
                    gamma[c][a][b] = gamma[c][b][a] = acc
        self.gamma = gamma
        self.T = [[p.derivative(q) for p in pos] for q in range(m)]
        # precontracted Gamma(T_q, .): covd then costs d^2 multiplies, not d^3
        self.gamma_t = []
        for q in range(m):
            Tq = self.T[q]
            gt = [[None] * d for _ in range(d)]
            for c in range(d):
                for b in range(d):
                    acc = gamma[c][0][b] * Tq[0]
                    for a in range(1, d):
                        acc = acc + gamma[c][a][b] * Tq[a]
                    gt[c][b] = acc
            self.gamma_t.append(gt)

    def inner(self, v, w):
        acc = None
        for a in range(self.d):
            for b in range(self.d):
                t = self.g[a][b] * v[a] * w[b]
                acc = t if acc is None else acc + t
        return acc

    def covd(self, v, q):
        """Ambient covariant derivative of the field ``v`` along parameter q."""
        out = []
        gt = self.gamma_t[q]
        for c in range(self.d):
            acc = v[c].derivative(q)
            for b in range(self.d):
                acc = acc + gt[c][b] * v[b]
            out.append(acc)
        return out

    def frame_candidates(self):
        m, order = self.m, self.T[0][0].order
        return [
            [Jet.constant(m, order, 1.0 if a == c else 0.0) for c in range(self.d)]
            for a in range(self.d)
        ]


class _EmbeddedCalc:
    """Covariant calculus via Euclidean derivatives and tangential projection."""

    def __init__(self, space, pos):
        self.space = space
        self.m = pos[0].nvars
        self.d = space.rep_dim
        self.pos = pos
        self.T = [[p.derivative(q) for p in pos] for q in range(self.m)]
        order = pos[0].order
        self.normals = []
        for nf in space.normals:
            n = [evaluate_jet_env(e, pos, space.bindings) for e in nf]
            n = [e if isinstance(e, Jet) else Jet.constant(self.m, order, float(e)) for e in n]
            norm = self.inner(n, n).sqrt()
            inv = norm.reciprocal()
            self.normals.append([e * inv for e in n])

    def inner(self, v, w):
        acc = v[0] * w[0]
        for a in range(1, self.d):
            acc = acc + v[a] * w[a]
        return acc

    def project(self, v):
        out = list(v)
        for n in self.normals:
            k = min(min(e.order for e in out), n[0].order)
            dot = self.inner([e.truncate(k) for e in out], [e.truncate(k) for e in n])
            out = [out[a] - dot * n[a] for a in range(self.d)]
        return out

    def covd(self, v, q):
        return self.project([v[c].derivative(q) for c in range(self.d)])

    def frame_candidates(self):
        order = self.T[0][0].order
        basis = [
            [Jet.constant(self.m, order, 1.0 if a == c else 0.0) for c in range(self.d)]
            for a in range(self.d)
        ]
        return [self.project(v) for v in basis]


def _make_calc(space, pos):
    return _ChartCalc(space, pos) if space.backend == "chart" else _EmbeddedCalc(space, pos)


# -- frames --------------------------------------------------------------------


def _combine(vecs, coeffs):
    out = None
    for c, v in zip(coeffs, vecs):
        term = [c * x for x in v]
        out = term if out is None else [a + b for a, b in zip(out, term)]
    return out


def _orthonormal_tangent(calc, T):
    """Gram-Schmidt on the coordinate tangent fields, tracking coefficients."""
    frames, coeffs = [], []
    for i, t in enumerate(T):
        v = list(t)
        c = [Jet.constant(calc.m, t[0].order, 0.0) for _ in range(len(T))]
        c[i] = Jet.constant(calc.m, t[0].order, 1.0)
        for Xj, cj in zip(frames, coeffs):
            dot = calc.inner(v, Xj)
            v = [a - dot * b for a, b in zip(v, Xj)]
            c = [a - dot * b for a, b in zip(c, cj)]
        n2 = calc.inner(v, v)
        if n2.value <= RANK_TOL**2:
            raise GeometryError(f"immersion differential rank-deficient (direction {i + 1})")
        inv = n2.sqrt().reciprocal()
        frames.append([inv * a for a in v])
        coeffs.append([inv * a for a in c])
    return frames, coeffs


def _complete_normal(calc, frames, need):
    """Pivoted Gram-Schmidt completion of the tangent frame to a normal frame."""
    cands = calc.frame_candidates()
    reduced = []
    for v in cands:
        w = list(v)
        for X in frames:
            dot = calc.inner(w, X)
            w = [a - dot * b for a, b in zip(w, X)]
        reduced.append(w)
    normals = []
    used = set()
    while len(normals) < need:
        best, best_norm = None, -1.0
        for idx, w in enumerate(reduced):
            if idx in used:
                continue
            v = list(w)
            for N in normals:
                dot = calc.inner(v, N)
                v = [a - dot * b for a, b in zip(v, N)]
            nv = calc.inner(v, v).value
            if nv > best_norm + 1e-14:  # strict improvement; ties keep lowest index
                best, best_norm, best_vec = idx, nv, v
        if best is None or best_norm <= RANK_TOL**2:
            raise GeometryError("could not complete an orthonormal normal frame")
        used.add(best)
        inv = calc.inner(best_vec, best_vec).sqrt().reciprocal()
        normals.append([inv * a for a in best_vec])
    return normals


# -- public data ---------------------------------------------------------------


@dataclass
class PointGeometry:
    u: tuple
    position: np.ndarray
    tangent_frame: np.ndarray        # rows are orthonormal tangent vectors
    normal_frame: np.ndarray         # rows are orthonormal normal vectors
    induced_metric: np.ndarray       # coordinate-basis first fundamental form
    second_fundamental: np.ndarray   # [normal, i, j] frame components of B
    mean_curvature: np.ndarray       # ambient-representation vector
    mean_curvature_norm: float
    second_fundamental_norm2: float
    shape_operators: np.ndarray      # [normal, i, j], equal to B components
    m: int
    codim: int
    order: int
    _state: dict = field(repr=False, default_factory=dict)

    @property
    def mean_normal_components(self) -> np.ndarray:
        return self._state["h_normal"]


@dataclass
class NormalFieldDerivatives:
    nabla_components: np.ndarray     # [normal, direction] of nabla-perp H
    nabla_norm: float                # max_i |nabla-perp_{X_i} H|
    laplacian: np.ndarray            # rough Laplacian of H in the normal bundle
    grad_h2: np.ndarray              # tangent vector grad |H|^2
    trace_shape_mean: np.ndarray     # sum_i B(X_i, A_H X_i)
    trace_shape_gradient: np.ndarray # sum_i A_{nabla-perp_{X_i} H}(X_i)

    @property
    def parallel(self) -> bool:
        return self.nabla_norm <= 1e-8


def point_geometry(space: AmbientModel, imm: ImmersionModel, u, order: int = 4) -> PointGeometry:
    """Frames, fundamental forms and mean curvature at one parameter point."""
    m = imm.dim
    env = seed_point(u, order)
    pos = []
    for comp in imm.components:
        val = evaluate_jet_env(comp, env, imm.bindings)
        pos.append(val if isinstance(val, Jet) else Jet.constant(m, order, float(val)))
    calc = _make_calc(space, pos)
    T = [[pos[a].derivative(q) for a in range(calc.d)] for q in range(m)]
    gram = np.array([[calc.inner(T[i], T[j]).value for j in range(m)] for i in range(m)])
    if np.linalg.eigvalsh(gram).min() <= RANK_TOL**2:
        raise GeometryError(f"immersion differential rank-deficient at {tuple(u)}")

    frames, coeffs = _orthonormal_tangent(calc, T)
    codim = space.dim - m
    normals = _complete_normal(calc, frames, codim)

    nablaXX = [[None] * m for _ in range(m)]
    for j in range(m):
        covs = [calc.covd(frames[j], q) for q in range(m)]
        for i in range(m):
            nablaXX[i][j] = _combine(covs, coeffs[i])
    b = [[[calc.inner(nablaXX[i][j], normals[a]) for j in range(m)] for i in range(m)]
         for a in range(codim)]

    # mean curvature field H = (1/m) sum_i B(X_i, X_i), as jets
    h_n = [None] * codim
    for a in range(codim):
        acc = b[a][0][0]
        for i in range(1, m):
            acc = acc + b[a][i][i]
        h_n[a] = acc * (1.0 / m)
    H = _combine(normals, h_n)

    # deterministic hypersurface orientation: <H, nu> >= 0, else first
    # nonvanishing component positive
    if codim == 1:
        s = calc.inner(H, normals[0]).value
        flip = False
        if s < -1e-12:
            flip = True
        elif abs(s) <= 1e-12:
            for comp in normals[0]:
                if abs(comp.value) > 1e-12:
                    flip = comp.value < 0.0
                    break
        if flip:
            normals[0] = [-e for e in normals[0]]
            b[0] = [[-e for e in row] for row in b[0]]
            h_n[0] = -h_n[0]

    b_vals = np.array([[[b[a][i][j].value for j in range(m)] for i in range(m)]
                       for a in range(codim)])
    h_vec = np.array([e.value for e in H])
    h_n_vals = np.array([e.value for e in h_n])
    h_norm = float(np.sqrt((h_n_vals**2).sum()))
    g_ind = [[calc.inner(T[i], T[j]) for j in range(m)] for i in range(m)]

    state = {
        "calc": calc,
        "pos": pos,
        "T": T,
        "frames": frames,
        "coeffs": coeffs,
        "normals": normals,
        "nablaXX": nablaXX,
        "b": b,
        "H": H,
        "h_n": h_n,
        "g_ind": g_ind,
        "h_normal": h_n_vals,
    }
    return PointGeometry(
        u=tuple(float(v) for v in u),
        position=np.array([p.value for p in pos]),
        tangent_frame=np.array([[e.value for e in X] for X in frames]),
        normal_frame=np.array([[e.value for e in N] for N in normals]),
        induced_metric=np.array([[e.value for e in row] for row in g_ind]),
        second_fundamental=b_vals,
        mean_curvature=h_vec,
        mean_curvature_norm=h_norm,
        second_fundamental_norm2=float((b_vals**2).sum()),
        shape_operators=b_vals,
        m=m,
        codim=codim,
        order=order,
        _state=state,
    )


def normal_derivatives(pg: PointGeometry) -> NormalFieldDerivatives:
    """Normal-connection derivatives of the mean curvature field at the point."""
    if pg.order < 4:
        raise GeometryError("normal derivatives need immersion jets of order 4")
    st = pg._state
    calc, frames, coeffs, normals = st["calc"], st["frames"], st["coeffs"], st["normals"]
    H, b = st["H"], st["b"]
    m, codim = pg.m, pg.codim

    covH = [calc.covd(H, q) for q in range(m)]
    DH = [_combine(covH, coeffs[i]) for i in range(m)]
    w = [[calc.inner(DH[i], normals[a]) for i in range(m)] for a in range(codim)]
    W = [_combine(normals, [w[a][i] for a in range(codim)]) for i in range(m)]

    w_vals = np.array([[w[a][i].value for i in range(m)] for a in range(codim)])
    nabla_norm = float(np.sqrt((w_vals**2).sum(axis=0)).max()) if m else 0.0

    # rough Laplacian: sum_i nabla-perp_{X_i} nabla-perp_{X_i} H
    #                  - nabla-perp over the induced-connection drift
    lap = np.zeros(calc.d)
    tframe = pg.tangent_frame
    cvals = np.array([[c.value for c in row] for row in st["coeffs"]])
    nablaXX = st["nablaXX"]
    for i in range(m):
        covW = [calc.covd(W[i], q) for q in range(m)]
        DiWi = np.zeros(calc.d)
        for q in range(m):
            DiWi += cvals[i][q] * np.array([e.value for e in covW[q]])
        lap += _project_normal(pg, DiWi)
        for j in range(m):
            z = calc.inner(nablaXX[i][i], frames[j]).value
            lap -= z * np.array([e.value for e in W[j]])

    # grad |H|^2 from the scalar jet <H, H>
    h2 = calc.inner(H, H)
    grad = np.zeros(calc.d)
    for i in range(m):
        di = 0.0
        for q in range(m):
            di += cvals[i][q] * h2.derivative(q).value
        grad += di * tframe[i]

    bv = pg.second_fundamental
    hn = pg.mean_normal_components
    trace_mean = np.einsum("aij,a,bij->b", bv, hn, bv) @ pg.normal_frame
    trace_grad = np.einsum("aij,ai->j", bv, w_vals) @ tframe

    return NormalFieldDerivatives(
        nabla_components=w_vals,
        nabla_norm=nabla_norm,
        laplacian=lap,
        grad_h2=grad,
        trace_shape_mean=trace_mean,
        trace_shape_gradient=trace_grad,
    )


def _project_normal(pg, vec):
    g = metric_at(pg._state["calc"].space, pg.position)
    out = np.zeros_like(vec)
    for nu in pg.normal_frame:
        out += (nu @ g @ vec) * nu
    return out


def project_tangent(pg, vec):
    g = metric_at(pg._state["calc"].space, pg.position)
    out = np.zeros_like(vec)
    for X in pg.tangent_frame:
        out += (X @ g @ vec) * X
    return out


def curvature_traces(pg: PointGeometry, nd: NormalFieldDerivatives):
    """The two shape-operator traces of the biharmonicity equations."""
    return nd.trace_shape_mean, nd.trace_shape_gradient


def scalar_curvature(space: AmbientModel, pg: PointGeometry):
    """(intrinsic, via_gauss) scalar curvature of the induced metric.

    ``intrinsic`` comes from the induced metric's own Christoffel jets;
    ``via_gauss`` contracts the ambient algebraic curvature over the tangent
    frame and adds m^2 |H|^2 - |B|^2.  Their agreement is the Gauss-equation
    consistency check.
    """
    g_ind = pg._state["g_ind"]
    m = pg.m
    intrinsic = 0.0 if m == 1 else scalar_from_metric_jets(g_ind)
    amb = 0.0
    g = metric_at(space, pg.position)
    for i in range(m):
        for j in range(m):
            R = curvature_parts(space, pg.position, pg.tangent_frame[i], pg.tangent_frame[j],
                                pg.tangent_frame[j])["combined"]
            amb += pg.tangent_frame[i] @ g @ R
    via_gauss = amb + m * m * pg.mean_curvature_norm**2 - pg.second_fundamental_norm2
    return float(intrinsic), float(via_gauss)


def pseudo_umbilical_check(pg: PointGeometry, tol: float = 1e-8):
    """Deviation of A_H from |H|^2 Id; (None, None) at minimal points."""
    if pg.mean_curvature_norm <= tol:
        return None, None
    hn = pg.mean_normal_components
    a_h = np.einsum("a,aij->ij", hn, pg.second_fundamental)
    dev = float(np.linalg.norm(a_h - pg.mean_curvature_norm**2 * np.eye(pg.m)))
    return dev < tol, dev


# -- finite-difference oracle ----------------------------------------------------


def _mean_curvature_point(space, imm, u):
    pg = point_geometry(space, imm, u, order=2)
    return pg, pg.mean_curvature


def _covd_pointwise(space, pos, dpos_q, vec_val, dvec_q):
    """Ambient covariant derivative from point values and plain derivatives."""
    if space.backend == "chart":
        gam = christoffel_point(space, pos)
        return dvec_q + np.einsum("cab,a,b->c", gam, dpos_q, vec_val)
    P = tangent_projector(space, pos)
    return P @ dvec_q


def fd_normal_laplacian(space: AmbientModel, imm: ImmersionModel, u, h: float) -> np.ndarray:
    """Second-order central-difference evaluation of the normal rough Laplacian.

    Differences the mean-curvature field over the parameter grid; all
    pointwise data (frames, connection, induced metric) are evaluated
    exactly, so the h^2 truncation error of the differencing is what a
    convergence study observes.
    """
    u = np.asarray(u, dtype=float)
    m = imm.dim

    def H_at(v):
        return _mean_curvature_point(space, imm, v)[1]

    def W_at(v, q):
        # nabla-perp_{d_q} H by one central difference around v
        vp, vm = v.copy(), v.copy()
        vp[q] += h
        vm[q] -= h
        dH = (H_at(vp) - H_at(vm)) / (2.0 * h)
        pg, Hv = _mean_curvature_point(space, imm, v)
        dpos = np.array([p.derivative(q).value for p in pg._state["pos"]])
        cov = _covd_pointwise(space, pg.position, dpos, Hv, dH)
        return _project_normal(pg, cov)

    pg0, _ = _mean_curvature_point(space, imm, u)
    g_ind = pg0.induced_metric
    ginv = np.linalg.inv(g_ind)
    gj = pg0._state["g_ind"]
    n = m
    gamma_ind = np.zeros((n, n, n))
    for c in range(n):
        for a in range(n):
            for b in range(n):
                low = [0.5 * (gj[a][e].derivative(b).value + gj[b][e].derivative(a).value
                              - gj[a][b].derivative(e).value) for e in range(n)]
                gamma_ind[c, a, b] = np.dot(ginv[c], low)

    lap = np.zeros(space.rep_dim)
    W0 = [W_at(u, q) for q in range(m)]
    for p in range(m):
        for q in range(m):
            up, um = u.copy(), u.copy()
            up[p] += h
            um[p] -= h
            dW = (W_at(up, q) - W_at(um, q)) / (2.0 * h)
            dpos = np.array([c.derivative(p).value for c in pg0._state["pos"]])
            cov = _covd_pointwise(space, pg0.position, dpos, W0[q], dW)
            term = _project_normal(pg0, cov)
            term = term - np.einsum("r,rc->c", gamma_ind[:, p, q], np.array(W0))
            lap += ginv[p, q] * term
    return lap
