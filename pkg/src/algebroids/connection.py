"""Linear connections on the bundle and the tensors derived from them:
covariant derivatives, modified and projected brackets and anholonomies,
torsion, curvature, non-metricity, admissibility and difference tensors.

Connection coefficients follow Gamma^a_bc = <e^a, D_{X_b} X_c>: the first
lower index is the differentiation direction.  The connection one-form view
omega^a_b with (omega^a_b)_c = Gamma^a_cb is an accessor, never a stored
duplicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

from .core import (
    AlgebroidData,
    EForm,
    ETensor,
    Section,
    SparseArray,
    bracket,
    project_section,
    sparse_clean,
)
from .errors import ProjectorRequiredError, ShapeError, SingularMatrixError
from .linalg import invert_matrix
from .reports import CheckReport, report_from_residuals
from .scalars import Scalar

AnholonomyKind = Literal["plain", "modified", "projected"]
BracketKind = Literal["original", "modified", "projected"]


@dataclass(frozen=True)
class Connection:
    """Coefficient array of a linear connection, stored sparsely."""

    rank: int
    coeff: SparseArray  # (a, b, c) -> Gamma^a_bc

    def __post_init__(self):
        for idx in self.coeff:
            if len(idx) != 3 or not all(0 <= k < self.rank for k in idx):
                raise ShapeError(f"bad connection index {idx}")

    @classmethod
    def zero(cls, rank: int) -> Connection:
        return cls(rank, {})

    @classmethod
    def of(cls, rank: int, coeff: SparseArray) -> Connection:
        return cls(rank, sparse_clean(coeff))

    def at(self, a: int, b: int, c: int, nvars: int) -> Scalar:
        return self.coeff.get((a, b, c), Scalar.zero(nvars))

    def omega(self, A: AlgebroidData, a: int, b: int) -> EForm:
        """Connection one-form omega^a_b, components Gamma^a_cb."""
        comp = {}
        for c in range(self.rank):
            v = self.coeff.get((a, c, b))
            if v is not None and not v.is_zero():
                comp[(c,)] = v
        return EForm(1, A.rank, A.dim, comp)


class Metric:
    """Symmetric non-degenerate pairing with a cached exact inverse."""

    def __init__(self, g: list[list[Scalar]]):
        r = len(g)
        if any(len(row) != r for row in g):
            raise ShapeError("metric must be square")
        for a in range(r):
            for b in range(a + 1, r):
                if not g[a][b].equals(g[b][a]):
                    raise ShapeError("metric must be symmetric")
        self.g = [list(row) for row in g]
        try:
            self.ginv = invert_matrix(self.g)
        except SingularMatrixError:
            raise ShapeError("metric is degenerate") from None
        self.rank = r

    def at(self, a: int, b: int) -> Scalar:
        return self.g[a][b]

    def inv_at(self, a: int, b: int) -> Scalar:
        return self.ginv[a][b]

    def inner(self, u: Section, v: Section) -> Scalar:
        nvars = self.g[0][0].nvars
        acc = Scalar.zero(nvars)
        for a in range(self.rank):
            if u.comp[a].is_zero():
                continue
            for b in range(self.rank):
                t = u.comp[a] * v.comp[b]
                if not t.is_zero():
                    acc = acc + t * self.g[a][b]
        return acc

    def raise_form(self, omega_comp: list[Scalar]) -> Section:
        """g^{-1} applied to a one-form given by its components."""
        nvars = self.g[0][0].nvars
        out = []
        for a in range(self.rank):
            acc = Scalar.zero(nvars)
            for b in range(self.rank):
                if not omega_comp[b].is_zero():
                    acc = acc + self.ginv[a][b] * omega_comp[b]
            out.append(acc)
        return Section(tuple(out))


TensorLike = Union[Scalar, Section, ETensor]


def covariant_derivative(
    A: AlgebroidData, conn: Connection, v: Section, target: TensorLike
) -> TensorLike:
    """D_v on scalars, sections, or mixed tensors via the Leibniz extension."""
    if isinstance(target, Scalar):
        return A.section_derive(v, target)
    if isinstance(target, Section):
        out = []
        for a in range(A.rank):
            acc = A.section_derive(v, target.comp[a])
            for b in range(A.rank):
                if v.comp[b].is_zero():
                    continue
                for c in range(A.rank):
                    g = conn.coeff.get((a, b, c))
                    if g is None or target.comp[c].is_zero():
                        continue
                    acc = acc + v.comp[b] * target.comp[c] * g
            out.append(acc)
        return Section(tuple(out))
    if isinstance(target, ETensor):
        frame_arrays = [
            frame_covariant_tensor(A, conn, b, target) for b in range(A.rank)
        ]
        out: SparseArray = {}
        for b, arr in enumerate(frame_arrays):
            f = v.comp[b]
            if f.is_zero():
                continue
            for idx, val in arr.items():
                t = f * val
                if t.is_zero():
                    continue
                s = out.get(idx)
                out[idx] = t if s is None else s + t
        return ETensor(target.q, target.s, target.rank, target.nvars, sparse_clean(out))
    raise ShapeError(f"cannot differentiate a {type(target).__name__}")


def frame_covariant_tensor(
    A: AlgebroidData, conn: Connection, b: int, tensor: ETensor
) -> SparseArray:
    """Components of D_{X_b} applied to a (q, s) tensor."""
    q, s = tensor.q, tensor.s
    out: SparseArray = {}

    def accumulate(idx, val):
        if val.is_zero():
            return
        cur = out.get(idx)
        out[idx] = val if cur is None else cur + val

    for idx, val in tensor.comp.items():
        accumulate(idx, A.frame_derive(b, val))
        # contravariant slots gain +Gamma^{a_k}_{b e}
        for k in range(q):
            e = idx[k]
            for a in range(A.rank):
                g = conn.coeff.get((a, b, e))
                if g is not None:
                    accumulate(idx[:k] + (a,) + idx[k + 1 :], g * val)
        # covariant slots gain -Gamma^{e}_{b c_l}: the stored slot value e
        # feeds every output slot c with coefficient -Gamma^e_bc
        for k in range(q, q + s):
            e = idx[k]
            for c in range(A.rank):
                g = conn.coeff.get((e, b, c))
                if g is not None:
                    accumulate(idx[:k] + (c,) + idx[k + 1 :], -(g * val))
    return sparse_clean(out)


def projected_locality(A: AlgebroidData) -> SparseArray:
    """The locality array with the projector applied to the output slot."""
    if A.proj is None:
        raise ProjectorRequiredError("locality projector required")
    out: SparseArray = {}
    for (a1, d, e, c), lv in A.loc.items():
        for a in range(A.rank):
            p = A.proj[a][a1]
            if p.is_zero():
                continue
            t = p * lv
            if t.is_zero():
                continue
            key = (a, d, e, c)
            s = out.get(key)
            out[key] = t if s is None else s + t
    return sparse_clean(out)


def modified_anholonomy(
    A: AlgebroidData, conn: Connection, kind: AnholonomyKind = "modified"
) -> SparseArray:
    """Anholonomy of the (projected) modified bracket:
    gamma^a_bc - Gamma^e_db Lhat^{a d}_{e c}."""
    if kind == "plain":
        return dict(A.gamma)
    loc = A.loc if kind == "modified" else projected_locality(A)
    out = dict(A.gamma)
    for (a, d, e, c), lv in loc.items():
        for b in range(A.rank):
            g = conn.coeff.get((e, d, b))
            if g is None:
                continue
            t = g * lv
            if t.is_zero():
                continue
            key = (a, b, c)
            s = out.get(key)
            out[key] = -t if s is None else s - t
    return sparse_clean(out)


def modified_bracket(
    A: AlgebroidData,
    conn: Connection,
    u: Section,
    v: Section,
    kind: Literal["modified", "projected"] = "modified",
) -> Section:
    """[u, v] minus the locality correction L(e^a, D_{X_a} u, v)."""
    base = bracket(A, u, v)
    if not A.loc:
        return base
    correction = _locality_correction(A, conn, u, v)
    if kind == "projected":
        correction = project_section(A, correction)
    return base.sub(correction)


def _locality_correction(
    A: AlgebroidData, conn: Connection, u: Section, v: Section
) -> Section:
    """L(e^d, D_{X_d} u, v) summed over the frame index d."""
    r = A.rank
    # (D_{X_d} u)^e = rho^i_d d_i u^e + Gamma^e_df u^f
    deriv: dict[tuple[int, int], Scalar] = {}
    for d in range(r):
        for e in range(r):
            acc = A.frame_derive(d, u.comp[e])
            for f in range(r):
                g = conn.coeff.get((e, d, f))
                if g is not None and not u.comp[f].is_zero():
                    acc = acc + g * u.comp[f]
            if not acc.is_zero():
                deriv[(d, e)] = acc
    out = [A.zero() for _ in range(r)]
    for (c, d, e, b), lv in A.loc.items():
        w = deriv.get((d, e))
        if w is None:
            continue
        t = w * v.comp[b]
        if not t.is_zero():
            out[c] = out[c] + t * lv
    return Section(tuple(out))


def bracket_of_kind(
    A: AlgebroidData,
    conn: Connection | None,
    u: Section,
    v: Section,
    kind: BracketKind,
) -> Section:
    if kind == "original":
        return bracket(A, u, v)
    if conn is None:
        raise ShapeError("modified brackets need a connection")
    return modified_bracket(A, conn, u, v, kind)  # type: ignore[arg-type]


def torsion(
    A: AlgebroidData,
    conn: Connection,
    kind: Literal["modified", "projected"] = "modified",
) -> SparseArray:
    """Torsion components Gamma^a_bc - Gamma^a_cb - gamma(kind)^a_bc."""
    anhol = modified_anholonomy(A, conn, kind)
    out: SparseArray = {}
    r = A.rank
    for a in range(r):
        for b in range(r):
            for c in range(r):
                v = conn.at(a, b, c, A.dim) - conn.at(a, c, b, A.dim) - anhol.get(
                    (a, b, c), A.zero()
                )
                if not v.is_zero():
                    out[(a, b, c)] = v
    return out


def curvature(A: AlgebroidData, conn: Connection) -> SparseArray:
    """Curvature components R^a_bcd of R(X_b, X_c) X_d = R^a_bcd X_a.

    Requires a locality projector: the projected modified bracket is what
    makes this operator tensorial, and defaulting to the identity would
    silently hide modelling errors.
    """
    if A.proj is None:
        raise ProjectorRequiredError("curvature requires a locality projector")
    anhol = modified_anholonomy(A, conn, "projected")
    r = A.rank
    out: SparseArray = {}
    for a in range(r):
        for b in range(r):
            for c in range(r):
                for d in range(r):
                    acc = A.frame_derive(b, conn.at(a, c, d, A.dim))
                    acc = acc - A.frame_derive(c, conn.at(a, b, d, A.dim))
                    for e in range(r):
                        g_cd = conn.coeff.get((e, c, d))
                        if g_cd is not None:
                            t = conn.coeff.get((a, b, e))
                            if t is not None:
                                acc = acc + g_cd * t
                        g_bd = conn.coeff.get((e, b, d))
                        if g_bd is not None:
                            t = conn.coeff.get((a, c, e))
                            if t is not None:
                                acc = acc - g_bd * t
                        an = anhol.get((e, b, c))
                        if an is not None:
                            t = conn.coeff.get((a, e, d))
                            if t is not None:
                                acc = acc - an * t
                    if not acc.is_zero():
                        out[(a, b, c, d)] = acc
    return out


def non_metricity(A: AlgebroidData, conn: Connection, metric: Metric) -> SparseArray:
    """Q_abc = rho(X_a)(g_bc) - Gamma^d_ab g_dc - Gamma^d_ac g_bd."""
    r = A.rank
    out: SparseArray = {}
    for a in range(r):
        for b in range(r):
            for c in range(b, r):
                acc = A.frame_derive(a, metric.at(b, c))
                for d in range(r):
                    g1 = conn.coeff.get((d, a, b))
                    if g1 is not None:
                        acc = acc - g1 * metric.at(d, c)
                    g2 = conn.coeff.get((d, a, c))
                    if g2 is not None:
                        acc = acc - metric.at(b, d) * g2
                if not acc.is_zero():
                    out[(a, b, c)] = acc
                    if b != c:
                        out[(a, c, b)] = acc
    return out


def locality_contraction(A: AlgebroidData, conn: Connection) -> SparseArray:
    """Frame components of L(e^d, D_{X_d} u, v): the map A(u, v) that turns
    a connection into an anti-commutable bracket."""
    out: SparseArray = {}
    for (c, d, e, b), lv in A.loc.items():
        for a in range(A.rank):
            g = conn.coeff.get((e, d, a))
            if g is None:
                continue
            t = g * lv
            if t.is_zero():
                continue
            key = (c, a, b)
            s = out.get(key)
            out[key] = t if s is None else s + t
    return sparse_clean(out)


def check_admissible(A: AlgebroidData, conn: Connection) -> CheckReport:
    """Frame check of the anti-commutability condition

        gamma^c_ab + gamma^c_ba = Gamma^e_da L^{c d}_{e b} + Gamma^e_db L^{c d}_{e a}

    The difference of the two sides is function-multilinear, so the frame
    check extends to all sections.
    """
    lc = locality_contraction(A, conn)
    residuals: dict[tuple, Scalar] = {}
    r = A.rank
    for c in range(r):
        for a in range(r):
            for b in range(a, r):
                v = (
                    A.gamma_at(c, a, b)
                    + A.gamma_at(c, b, a)
                    - lc.get((c, a, b), A.zero())
                    - lc.get((c, b, a), A.zero())
                )
                if not v.is_zero():
                    residuals[(c, a, b)] = v
    return report_from_residuals("admissible", residuals)


def is_admissible(A: AlgebroidData, conn: Connection) -> bool:
    return check_admissible(A, conn).passed


def difference_tensor(conn1: Connection, conn2: Connection, nvars: int) -> SparseArray:
    """Entrywise difference; transforms tensorially although neither
    connection does."""
    out = dict(conn1.coeff)
    for idx, v in conn2.coeff.items():
        s = out.get(idx)
        out[idx] = -v if s is None else s - v
    return sparse_clean(out)


def check_equivalent_connections(
    A: AlgebroidData, conn1: Connection, conn2: Connection
) -> CheckReport:
    """Two connections induce the same anti-commutable structure iff the
    locality contraction of their difference is antisymmetric."""
    delta = Connection(A.rank, difference_tensor(conn1, conn2, A.dim))
    lc = locality_contraction(A, delta)
    residuals: dict[tuple, Scalar] = {}
    for a in range(A.rank):
        for b in range(A.rank):
            for c in range(A.rank):
                v = lc.get((c, a, b), A.zero()) + lc.get((c, b, a), A.zero())
                if not v.is_zero():
                    residuals[(c, a, b)] = v
    return report_from_residuals("equivalent-connections", residuals)


def check_anholonomy_decomposition(A: AlgebroidData, conn: Connection) -> CheckReport:
    """Split the anholonomy into the modified anholonomy plus the locality
    contraction and test that for an admissible connection with symmetric
    contraction these are exactly its antisymmetric and symmetric parts.

    Residual groups: "reconstruction" (gamma minus the two parts, an exact
    rearrangement), "antisym-part" (symmetric part of the modified
    anholonomy), "sym-precondition" (antisymmetric part of the
    contraction, zero exactly when the splitting hypothesis holds).
    """
    anhol = modified_anholonomy(A, conn, "modified")
    lc = locality_contraction(A, conn)
    residuals: dict[tuple, Scalar] = {}
    r = A.rank
    for a in range(r):
        for b in range(r):
            for c in range(r):
                rec = (
                    A.gamma_at(a, b, c)
                    - anhol.get((a, b, c), A.zero())
                    - lc.get((a, b, c), A.zero())
                )
                if not rec.is_zero():
                    residuals[("reconstruction", a, b, c)] = rec
            for c in range(b, r):
                anti = anhol.get((a, b, c), A.zero()) + anhol.get((a, c, b), A.zero())
                if not anti.is_zero():
                    residuals[("antisym-part", a, b, c)] = anti
                sym = lc.get((a, b, c), A.zero()) - lc.get((a, c, b), A.zero())
                if not sym.is_zero():
                    residuals[("sym-precondition", a, b, c)] = sym
    return report_from_residuals(
        "anholonomy-decomposition",
        residuals,
        [
            "the printed splitting formula's contraction coincides with the "
            "modified-anholonomy contraction after renaming its colliding "
            "summation index; only that contraction is evaluated"
        ],
    )


def bracket_from_connection(
    A: AlgebroidData, conn: Connection, amap: SparseArray | None = None
) -> AlgebroidData:
    """Build the algebroid whose bracket is D_u v - D_v u + A(u, v).

    With the default amap, the locality contraction of the connection, the
    resulting bracket is anti-commutable and the connection is admissible
    for it by construction.  The anchor, locality operator and projector
    are carried over unchanged.
    """
    if amap is None:
        amap = locality_contraction(A, conn)
    gamma: SparseArray = {}
    for c in range(A.rank):
        for a in range(A.rank):
            for b in range(A.rank):
                v = conn.at(c, a, b, A.dim) - conn.at(c, b, a, A.dim) + amap.get(
                    (c, a, b), A.zero()
                )
                if not v.is_zero():
                    gamma[(c, a, b)] = v
    return AlgebroidData(
        dim=A.dim,
        rank=A.rank,
        coords=A.coords,
        anchor=A.anchor,
        gamma=gamma,
        loc=A.loc,
        proj=A.proj,
    )
