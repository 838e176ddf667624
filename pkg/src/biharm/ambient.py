"""Ambient space-form models.

Two kinds of ambient space are supported: generalized complex space forms
(4-dimensional almost Hermitian, curvature alpha*R_const + beta*R_complex)
and generalized Sasakian space forms (odd-dimensional almost contact metric,
curvature f1*R_const + f2*R_reeb + f3*R_fundform).  The curvature tensor is
always the algebraic combination of these generalized curvature terms with
the model's coefficient functions; agreement with the Riemann tensor of the
chart metric is a test property of catalog models, never a runtime path.

Two metric backends:

* ``chart`` -- metric components are expressions in ambient coordinates;
  covariant derivatives go through Christoffel symbols obtained from jets.
* ``embedded`` -- the ambient manifold sits isometrically in Euclidean
  space; covariant differentiation is Euclidean differentiation followed by
  tangential projection, and all vectors carry embedding-space components.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exprs import Bindings, Expr, evaluate_jet_env
from .jets import Jet, jet_matrix_inverse, seed_point

KIND_COMPLEX = "generalized_complex"
KIND_CONTACT = "generalized_sasakian"

SASAKI = "sasaki"
KENMOTSU = "kenmotsu"
COSYMPLECTIC = "cosymplectic"
COMPLEX_SPACE_FORM = "complex_space_form"


class GeometryError(Exception):
    """Degenerate geometric input (rank loss, singular metric, bad frames)."""


@dataclass(frozen=True)
class ClassicalTag:
    """Classical space-form class with its curvature parameter."""

    family: str
    value: float


def coefficients_for_tag(tag: ClassicalTag) -> tuple[float, ...]:
    """Curvature coefficients generated by a classical space-form tag."""
    c = tag.value
    if tag.family == SASAKI:
        return ((c + 3.0) / 4.0, (c - 1.0) / 4.0, (c - 1.0) / 4.0)
    if tag.family == KENMOTSU:
        return ((c - 3.0) / 4.0, (c + 1.0) / 4.0, (c + 1.0) / 4.0)
    if tag.family == COSYMPLECTIC:
        return (c / 4.0, c / 4.0, c / 4.0)
    if tag.family == COMPLEX_SPACE_FORM:
        return (c, c)
    raise ValueError(f"unknown space-form family {tag.family!r}")


@dataclass
class AmbientModel:
    name: str
    kind: str                       # KIND_COMPLEX | KIND_CONTACT
    backend: str                    # "chart" | "embedded"
    dim: int                        # manifold dimension
    coords: tuple[str, ...]         # chart coords, or embedding coords (embedded)
    coeffs: tuple[Expr, ...]        # (alpha, beta) or (f1, f2, f3), in self.coords
    metric: tuple | None = None     # chart: matrix of Expr
    cstruct: tuple | None = None    # complex: matrix of Expr for J
    phi: tuple | None = None        # contact: matrix of Expr
    reeb: tuple | None = None       # contact: vector of Expr
    embed_map: tuple | None = None  # embedded: own-chart parametrization into R^D
    embed_params: tuple[str, ...] | None = None
    normals: tuple | None = None    # embedded: normal fields of N in R^D
    tag: ClassicalTag | None = None
    bindings: Bindings = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == KIND_COMPLEX and self.dim != 4:
            raise GeometryError("generalized complex space forms are 4-dimensional")
        if self.kind == KIND_CONTACT and self.dim % 2 == 0:
            raise GeometryError("generalized Sasakian space forms are odd-dimensional")

    @property
    def rep_dim(self) -> int:
        """Dimension of the vector representation used for ambient tensors."""
        return self.dim if self.backend == "chart" else len(self.coords)


def _eval_field(exprs, env, bindings):
    if isinstance(exprs, (list, tuple)) and exprs and isinstance(exprs[0], (list, tuple)):
        return [[evaluate_jet_env(e, env, bindings) for e in row] for row in exprs]
    return [evaluate_jet_env(e, env, bindings) for e in exprs]


def _values(nested):
    def v(x):
        return x.value if isinstance(x, Jet) else float(x)

    if isinstance(nested[0], list):
        return np.array([[v(e) for e in row] for row in nested])
    return np.array([v(e) for e in nested])


def _as_jets(evaluated, nvars, order):
    def j(x):
        return x if isinstance(x, Jet) else Jet.constant(nvars, order, float(x))

    if isinstance(evaluated[0], list):
        return [[j(e) for e in row] for row in evaluated]
    return [j(e) for e in evaluated]


# -- pointwise tensors -------------------------------------------------------

def metric_at(space: AmbientModel, x) -> np.ndarray:
    """Metric matrix in the vector representation at ``x`` (floats)."""
    if space.backend == "embedded":
        return np.eye(space.rep_dim)
    g = _values(_eval_field(space.metric, [float(v) for v in x], space.bindings))
    if np.linalg.eigvalsh(g).min() <= 0.0:
        raise GeometryError(f"metric not positive definite at {tuple(x)}")
    return g


def structure_at(space: AmbientModel, x):
    """Structure tensors at ``x``: J matrix, or (phi matrix, xi vector)."""
    env = [float(v) for v in x]
    if space.kind == KIND_COMPLEX:
        return _values(_eval_field(space.cstruct, env, space.bindings))
    phi = _values(_eval_field(space.phi, env, space.bindings))
    xi = _values(_eval_field(space.reeb, env, space.bindings))
    return phi, xi


def coefficients_at(space: AmbientModel, x) -> tuple[float, ...]:
    env = [float(v) for v in x]
    return tuple(float(_values([evaluate_jet_env(c, env, space.bindings)])[0]) for c in space.coeffs)


# -- jets of the metric and connection ---------------------------------------

def metric_jet(space: AmbientModel, x, order: int):
    """Jets of metric components at ``x``.

    Chart backend: coordinates are the jet variables.  Embedded backend:
    ``x`` is a point of the model's own parametrization and the pullback
    metric is assembled from embedding jets one order higher.
    """
    if space.backend == "chart":
        env = seed_point(x, order)
        g = _as_jets(_eval_field(space.metric, env, space.bindings), len(x), order)
        if np.linalg.eigvalsh(_values(g)).min() <= 0.0:
            raise GeometryError(f"metric not positive definite at {tuple(x)}")
        return g
    emb = [evaluate_jet_env(c, seed_point(x, order + 1), space.bindings) for c in space.embed_map]
    tangents = [[c.derivative(p) for c in emb] for p in range(len(x))]
    n = len(x)
    g = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            acc = tangents[i][0] * tangents[j][0]
            for a in range(1, len(emb)):
                acc = acc + tangents[i][a] * tangents[j][a]
            g[i][j] = g[j][i] = acc
    if np.linalg.eigvalsh(_values(g)).min() <= 0.0:
        raise GeometryError(f"pullback metric degenerate at {tuple(x)}")
    return g


def christoffel_from_metric_jets(g):
    """Christoffel symbol jets (one order lower than the metric jets)."""
    n = len(g)
    ginv = jet_matrix_inverse(g)
    k = g[0][0].order - 1
    ginv = [[e.truncate(min(e.order, k)) for e in row] for row in ginv]
    dg = [[[g[a][b].derivative(c) for b in range(n)] for a in range(n)] for c in range(n)]
    gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1):
            for c in range(n):
                low = (dg[a][c][b] + dg[b][c][a] - dg[c][a][b]) * 0.5
                gamma[c][a][b] = low
    out = [[[None] * n for _ in range(n)] for _ in range(n)]
    for c in range(n):
        for a in range(n):
            for b in range(a + 1):
                acc = ginv[c][0] * gamma[0][a][b]
                for d in range(1, n):
                    acc = acc + ginv[c][d] * gamma[d][a][b]
                out[c][a][b] = out[c][b][a] = acc
    return out


def christoffel_jet(space: AmbientModel, x, order: int):
    """Jets of the chart Christoffel symbols Gamma^c_ab at ``x`` (order <= 2)."""
    if space.backend != "chart":
        raise GeometryError("christoffel_jet needs a chart backend")
    if order > 2:
        raise ValueError("christoffel jets supported up to order 2")
    g = metric_jet(space, x, order + 1)
    return christoffel_from_metric_jets(g)


def christoffel_point(space: AmbientModel, x) -> np.ndarray:
    gamma = christoffel_jet(space, x, 0)
    n = space.dim
    return np.array([[[gamma[c][a][b].value for b in range(n)] for a in range(n)] for c in range(n)])


def riemann_from_metric_jets(g) -> np.ndarray:
    """Riemann tensor values R[i,j,k,l]: R(e_i,e_j)e_k = sum_l R[i,j,k,l] e_l.

    Sign convention R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]; metric jets
    must carry order >= 2.
    """
    n = len(g)
    gamma = christoffel_from_metric_jets(g)
    gval = np.array([[[gamma[c][a][b].value for b in range(n)] for a in range(n)] for c in range(n)])
    dgamma = np.array(
        [[[[gamma[c][a][b].derivative(p).value for b in range(n)] for a in range(n)] for c in range(n)]
         for p in range(n)]
    )
    riem = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    val = dgamma[i][l][j][k] - dgamma[j][l][i][k]
                    val += np.dot(gval[l, i, :], gval[:, j, k]) - np.dot(gval[l, j, :], gval[:, i, k])
                    riem[i, j, k, l] = val
    return riem


def scalar_from_metric_jets(g) -> float:
    """Scalar curvature of the metric given by jets of order >= 2."""
    n = len(g)
    riem = riemann_from_metric_jets(g)
    gval = _values(g)
    ginv = np.linalg.inv(gval)
    ricci = np.einsum("ijki->jk", riem)
    return float(np.einsum("jk,jk->", ginv, ricci))


# -- algebraic curvature terms ------------------------------------------------

def curv_const_term(g, X, Y, Z):
    """Constant-sectional-curvature building block g(Y,Z)X - g(X,Z)Y."""
    return (Y @ g @ Z) * X - (X @ g @ Z) * Y


def curv_complex_term(g, J, X, Y, Z):
    """Complex-structure building block of holomorphic space-form curvature."""
    JX, JY, JZ = J @ X, J @ Y, J @ Z
    return (JY @ g @ Z) * JX - (JX @ g @ Z) * JY + 2.0 * (JY @ g @ X) * JZ


def curv_reeb_term(g, xi, X, Y, Z):
    """Reeb-direction building block of contact space-form curvature."""
    eta = g @ xi
    eX, eY, eZ = eta @ X, eta @ Y, eta @ Z
    return eX * eZ * Y - eY * eZ * X + (X @ g @ Z) * eY * xi - (Y @ g @ Z) * eX * xi


def curv_fundform_term(g, phi, X, Y, Z):
    """Fundamental-2-form building block of contact space-form curvature."""
    pX, pY, pZ = phi @ X, phi @ Y, phi @ Z

    def omega(A, B):  # Omega(A, B) = g(A, phi B)
        return A @ g @ (phi @ B)

    return omega(Z, Y) * pX - omega(Z, X) * pY + 2.0 * omega(X, Y) * pZ


def curvature_parts(space: AmbientModel, x, X, Y, Z) -> dict:
    """Each generalized curvature term at ``x``, plus the coefficient-weighted sum."""
    g = metric_at(space, x)
    X, Y, Z = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    coeffs = coefficients_at(space, x)
    if space.kind == KIND_COMPLEX:
        J = structure_at(space, x)
        parts = {
            "const": curv_const_term(g, X, Y, Z),
            "complex": curv_complex_term(g, J, X, Y, Z),
        }
        parts["combined"] = coeffs[0] * parts["const"] + coeffs[1] * parts["complex"]
    else:
        phi, xi = structure_at(space, x)
        parts = {
            "const": curv_const_term(g, X, Y, Z),
            "reeb": curv_reeb_term(g, xi, X, Y, Z),
            "fundform": curv_fundform_term(g, phi, X, Y, Z),
        }
        parts["combined"] = (
            coeffs[0] * parts["const"] + coeffs[1] * parts["reeb"] + coeffs[2] * parts["fundform"]
        )
    return parts


def curvature_apply(space: AmbientModel, x, X, Y, Z) -> np.ndarray:
    """The model's curvature tensor R(X, Y)Z at ``x`` (algebraic form)."""
    return curvature_parts(space, x, X, Y, Z)["combined"]


# -- embedded-backend helpers --------------------------------------------------

def tangent_projector(space: AmbientModel, x) -> np.ndarray:
    """Orthogonal projector of R^D onto the tangent space of N at ``x``."""
    if space.backend != "embedded":
        return np.eye(space.rep_dim)
    env = [float(v) for v in x]
    P = np.eye(space.rep_dim)
    for nf in space.normals:
        n = _values(_eval_field(nf, env, space.bindings))
        n = n / np.linalg.norm(n)
        P -= np.outer(n, n)
    return P


def project_jets(space: AmbientModel, pos, vec):
    """Jet-level tangential projection of ``vec`` along the position field."""
    out = list(vec)
    for nf in space.normals:
        n = _eval_field(nf, pos, space.bindings)
        nn = n[0] * n[0]
        for a in range(1, len(n)):
            nn = nn + n[a] * n[a]
        inv = nn.reciprocal() if isinstance(nn, Jet) else 1.0 / nn
        dot = out[0] * n[0]
        for a in range(1, len(n)):
            dot = dot + out[a] * n[a]
        scale = dot * inv
        out = [out[a] - scale * n[a] for a in range(len(n))]
    return out


# -- structure verification -----------------------------------------------------

@dataclass
class StructureReport:
    name: str
    residuals: dict

    def max_residual(self) -> float:
        return max(self.residuals.values())

    def ok(self, tol: float) -> bool:
        return self.max_residual() <= tol


def _algebraic_residuals_complex(g, J):
    r = {"square": np.linalg.norm(J @ J + np.eye(len(g)), 2)}
    r["compatibility"] = np.linalg.norm(J.T @ g @ J - g, 2)
    return r


def _algebraic_residuals_contact(g, phi, xi, P=None):
    # P restricts the identities to the tangent space of an embedded model;
    # the raw matrix identities only hold on tangent vectors.
    n = len(g)
    if P is None:
        P = np.eye(n)
    eta = g @ xi
    r = {
        "reeb_unit": abs(eta @ xi - 1.0),
        "square": np.linalg.norm(P.T @ (phi @ phi + np.eye(n) - np.outer(xi, eta)) @ P, 2),
        "compatibility": np.linalg.norm(P.T @ (phi.T @ g @ phi - (g - np.outer(eta, eta))) @ P, 2),
        "reeb_kernel": np.linalg.norm(phi @ xi),
    }
    return r


def _covariant_residuals_chart(space, x):
    d = space.dim
    env = seed_point(x, 1)
    gam = christoffel_point(space, x)
    g = metric_at(space, x)
    fam = space.tag.family
    if space.kind == KIND_COMPLEX:
        J = _as_jets(_eval_field(space.cstruct, env, space.bindings), d, 1)
        Jv = _values(J)
        nJ = np.empty((d, d, d))
        for a in range(d):
            for c in range(d):
                for b in range(d):
                    nJ[a, c, b] = (
                        J[c][b].derivative(a).value
                        + np.dot(gam[c, a, :], Jv[:, b])
                        - np.dot(gam[:, a, b], Jv[c, :])
                    )
        return {"covariant_complex": float(np.abs(nJ).max())}
    phi = _as_jets(_eval_field(space.phi, env, space.bindings), d, 1)
    xi = _as_jets(_eval_field(space.reeb, env, space.bindings), d, 1)
    phiv, xiv = _values(phi), _values(xi)
    eta = g @ xiv
    nphi = np.empty((d, d, d))
    nxi = np.empty((d, d))
    for a in range(d):
        for c in range(d):
            nxi[a, c] = xi[c].derivative(a).value + np.dot(gam[c, a, :], xiv)
            for b in range(d):
                nphi[a, c, b] = (
                    phi[c][b].derivative(a).value
                    + np.dot(gam[c, a, :], phiv[:, b])
                    - np.dot(gam[:, a, b], phiv[c, :])
                )
    if fam == SASAKI:
        rhs_phi = np.einsum("ab,c->acb", g, xiv) - np.einsum("b,ca->acb", eta, np.eye(d))
        rhs_xi = -phiv.T
    elif fam == KENMOTSU:
        rhs_phi = -np.einsum("b,ca->acb", eta, phiv) - np.einsum("ab,c->acb", g @ phiv, xiv)
        rhs_xi = np.eye(d) - np.outer(eta, xiv)
    else:
        rhs_phi = np.zeros((d, d, d))
        rhs_xi = np.zeros((d, d))
    return {
        "covariant_phi": float(np.abs(nphi - rhs_phi).max()),
        "covariant_reeb": float(np.abs(nxi - rhs_xi).max()),
    }


def _covariant_residuals_embedded(space, x):
    # Differentiate the structure fields along great-circle-like curves
    # c(t) = (x + tX)/|x + tX| using one-variable jets; the ambient covariant
    # derivative is the curve derivative followed by tangential projection.
    D = space.rep_dim
    x = np.asarray(x, dtype=float)
    P = tangent_projector(space, x)
    basis = []
    for a in range(D):
        v = P[:, a]
        for b in basis:
            v = v - (v @ b) * b
        if np.linalg.norm(v) > 1e-8:
            basis.append(v / np.linalg.norm(v))
    phi0, xi0 = structure_at(space, x)
    eta0 = xi0  # Euclidean representation: eta(v) = <v, xi>
    res_phi, res_xi = 0.0, 0.0
    for X in basis:
        t = Jet.variable(1, 1, 0, 0.0)
        pos = [t * X[a] + x[a] for a in range(D)]
        norm2 = pos[0] * pos[0]
        for a in range(1, D):
            norm2 = norm2 + pos[a] * pos[a]
        inv = norm2.sqrt().reciprocal()
        pos = [p * inv for p in pos]
        phi_j = _as_jets(_eval_field(space.phi, pos, space.bindings), 1, 1)
        xi_j = _as_jets(_eval_field(space.reeb, pos, space.bindings), 1, 1)
        dxi = P @ np.array([c.derivative(0).value for c in xi_j])
        res_xi = max(res_xi, np.abs(dxi - (-(phi0 @ X))).max())
        for Y in basis:
            yfield = [None] * D
            dotpy = pos[0] * Y[0]
            for a in range(1, D):
                dotpy = dotpy + pos[a] * Y[a]
            for a in range(D):
                yfield[a] = Y[a] - dotpy * pos[a]
            phiy = [None] * D
            for c in range(D):
                acc = phi_j[c][0] * yfield[0]
                for b in range(1, D):
                    acc = acc + phi_j[c][b] * yfield[b]
                phiy[c] = acc
            d_phiy = P @ np.array([c.derivative(0).value for c in phiy])
            d_y = P @ np.array([c.derivative(0).value for c in yfield])
            lhs = d_phiy - phi0 @ d_y
            rhs = (X @ Y) * xi0 - (eta0 @ Y) * X
            res_phi = max(res_phi, np.abs(lhs - rhs).max())
    return {"covariant_phi": res_phi, "covariant_reeb": res_xi}


def verify_structure(space: AmbientModel, points) -> StructureReport:
    """Max residual of the algebraic structure identities, and of the
    covariant-derivative identities when a classical tag is present."""
    residuals: dict[str, float] = {}

    def keep(update):
        for k, v in update.items():
            residuals[k] = max(residuals.get(k, 0.0), float(v))

    for x in points:
        g = metric_at(space, x)
        if space.kind == KIND_COMPLEX:
            keep(_algebraic_residuals_complex(g, structure_at(space, x)))
        else:
            phi, xi = structure_at(space, x)
            P = tangent_projector(space, x) if space.backend == "embedded" else None
            keep(_algebraic_residuals_contact(g, phi, xi, P))
        if space.tag is not None:
            if space.backend == "chart":
                keep(_covariant_residuals_chart(space, x))
            elif space.kind == KIND_CONTACT and space.tag.family == SASAKI:
                keep(_covariant_residuals_embedded(space, x))
    return StructureReport(space.name, residuals)
