"""Local pre-Leibniz algebroid data model and the bracket engine.

Index conventions, fixed once for the whole package (all 0-based in code):

* anchor        rho[i][a]            row i = chart coordinate, col a = frame slot
* anholonomy    gamma[(c, a, b)]     <e^c, [X_a, X_b]> = gamma^c_ab
* locality      loc[(a, d, e, c)]    L(e^d, X_e, X_c) = L^{a d}_{e c} X_a
* projector     proj[a][b]           P(X_b) = P^a_b X_a
* connection    coeff[(a, b, c)]     <e^a, D_{X_b} X_c> = Gamma^a_bc  (see connection.py)

Sparse arrays are dicts from index tuples to scalars with zero entries
omitted.  All values are immutable after construction and every operation
is pure, so anything here may be shared freely between threads.  Validity
of a stored projector is established by check_locality_projector, not at
construction time.  The bracket of arbitrary sections is the unique
extension of the frame data by the right- and left-Leibniz rules:

    [u, v]^c = u^a v^b gamma^c_ab + u^a rho^i_a d_i(v^c) - v^b rho^i_b d_i(u^c)
               + rho^i_d d_i(u^a) v^b L^{c d}_{a b}
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import ShapeError
from .linalg import invert_matrix, kernel_basis, mat_mul
from .reports import CheckReport, report_from_residuals
from .scalars import Point, Scalar

SparseArray = dict[tuple, Scalar]


def sparse_clean(entries: SparseArray) -> SparseArray:
    return {idx: v for idx, v in entries.items() if not v.is_zero()}


@dataclass(frozen=True)
class AlgebroidData:
    """A local pre-Leibniz algebroid over one coordinate chart."""

    dim: int
    rank: int
    coords: tuple[str, ...]
    anchor: tuple[tuple[Scalar, ...], ...]  # dim x rank
    gamma: SparseArray
    loc: SparseArray
    proj: tuple[tuple[Scalar, ...], ...] | None = None

    def __post_init__(self):
        if len(self.coords) != self.dim:
            raise ShapeError("coordinate name count does not match dimension")
        if len(self.anchor) != self.dim or any(
            len(row) != self.rank for row in self.anchor
        ):
            raise ShapeError("anchor must be a dim x rank matrix")
        for idx in self.gamma:
            if len(idx) != 3 or not all(0 <= k < self.rank for k in idx):
                raise ShapeError(f"bad anholonomy index {idx}")
        for idx in self.loc:
            if len(idx) != 4 or not all(0 <= k < self.rank for k in idx):
                raise ShapeError(f"bad locality index {idx}")
        if self.proj is not None and (
            len(self.proj) != self.rank
            or any(len(row) != self.rank for row in self.proj)
        ):
            raise ShapeError("projector must be a rank x rank matrix")

    # -- scalar helpers ------------------------------------------------

    def zero(self) -> Scalar:
        return Scalar.zero(self.dim)

    def one(self) -> Scalar:
        return Scalar.one(self.dim)

    def const(self, value) -> Scalar:
        return Scalar.constant(self.dim, value)

    def gamma_at(self, c: int, a: int, b: int) -> Scalar:
        return self.gamma.get((c, a, b), self.zero())

    def loc_at(self, a: int, d: int, e: int, c: int) -> Scalar:
        return self.loc.get((a, d, e, c), self.zero())

    def proj_at(self, a: int, b: int) -> Scalar:
        if self.proj is None:
            raise ShapeError("algebroid has no locality projector")
        return self.proj[a][b]

    # -- differentiation along the anchor -------------------------------

    def frame_derive(self, a: int, f: Scalar) -> Scalar:
        """rho(X_a) applied to a scalar: rho^i_a d_i f."""
        acc = self.zero()
        for i in range(self.dim):
            r = self.anchor[i][a]
            if not r.is_zero():
                acc = acc + r * f.diff(i)
        return acc

    def section_derive(self, u: "Section", f: Scalar) -> Scalar:
        """rho(u) applied to a scalar."""
        acc = self.zero()
        for a, ua in enumerate(u.comp):
            if not ua.is_zero():
                acc = acc + ua * self.frame_derive(a, f)
        return acc

    def anchor_of(self, u: "Section") -> list[Scalar]:
        """Chart components of rho(u)."""
        return [
            sum(
                (self.anchor[i][a] * u.comp[a] for a in range(self.rank)),
                self.zero(),
            )
            for i in range(self.dim)
        ]


@dataclass(frozen=True)
class Section:
    """A section of the bundle, given by its frame components."""

    comp: tuple[Scalar, ...]

    @classmethod
    def frame(cls, A: AlgebroidData, a: int) -> Section:
        return cls(
            tuple(A.one() if b == a else A.zero() for b in range(A.rank))
        )

    @classmethod
    def zero(cls, A: AlgebroidData) -> Section:
        return cls(tuple(A.zero() for _ in range(A.rank)))

    @property
    def rank(self) -> int:
        return len(self.comp)

    def add(self, other: Section) -> Section:
        return Section(tuple(a + b for a, b in zip(self.comp, other.comp)))

    def sub(self, other: Section) -> Section:
        return Section(tuple(a - b for a, b in zip(self.comp, other.comp)))

    def scale(self, f: Scalar) -> Section:
        return Section(tuple(f * a for a in self.comp))

    def neg(self) -> Section:
        return Section(tuple(-a for a in self.comp))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comp)


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _sort_with_sign(idx: tuple[int, ...]) -> tuple[tuple[int, ...], int] | None:
    """Sorted tuple and permutation sign; None if an index repeats."""
    if len(set(idx)) != len(idx):
        return None
    order = sorted(range(len(idx)), key=lambda k: idx[k])
    perm = tuple(order)
    return tuple(idx[k] for k in order), _perm_sign(perm)


@dataclass(frozen=True)
class EForm:
    """Antisymmetric p-form on the bundle, stored on increasing index tuples."""

    degree: int
    rank: int
    nvars: int
    comp: SparseArray  # strictly increasing tuples -> Scalar

    @classmethod
    def zero(cls, A: AlgebroidData, degree: int) -> EForm:
        return cls(degree, A.rank, A.dim, {})

    @classmethod
    def from_scalar(cls, A: AlgebroidData, f: Scalar) -> EForm:
        return cls(0, A.rank, A.dim, {} if f.is_zero() else {(): f})

    @classmethod
    def coframe(cls, A: AlgebroidData, a: int) -> EForm:
        """The dual coframe element e^a."""
        return cls(1, A.rank, A.dim, {(a,): A.one()})

    @classmethod
    def from_components(
        cls, A: AlgebroidData, degree: int, comp: SparseArray
    ) -> EForm:
        clean = {}
        for idx, v in comp.items():
            if len(idx) != degree or list(idx) != sorted(set(idx)):
                raise ShapeError(f"form components need strictly increasing {degree}-tuples, got {idx}")
            if not v.is_zero():
                clean[idx] = v
        return cls(degree, A.rank, A.dim, clean)

    def zero_scalar(self) -> Scalar:
        return Scalar.zero(self.nvars)

    def at(self, idx: tuple[int, ...]) -> Scalar:
        """Component at an arbitrary index tuple, using antisymmetry."""
        if len(idx) != self.degree:
            raise ShapeError("index length does not match form degree")
        ss = _sort_with_sign(idx)
        if ss is None:
            return self.zero_scalar()
        key, sign = ss
        v = self.comp.get(key)
        if v is None:
            return self.zero_scalar()
        return v if sign == 1 else -v

    def add(self, other: EForm) -> EForm:
        if self.degree != other.degree:
            raise ShapeError("cannot add forms of different degree")
        out = dict(self.comp)
        for idx, v in other.comp.items():
            s = out.get(idx)
            out[idx] = v if s is None else s + v
        return EForm(self.degree, self.rank, self.nvars, sparse_clean(out))

    def sub(self, other: EForm) -> EForm:
        return self.add(other.scale(Scalar.constant(self.nvars, -1)))

    def scale(self, f: Scalar) -> EForm:
        if f.is_zero():
            return EForm(self.degree, self.rank, self.nvars, {})
        return EForm(
            self.degree,
            self.rank,
            self.nvars,
            {idx: f * v for idx, v in self.comp.items()},
        )

    def is_zero(self) -> bool:
        return not self.comp

    def apply(self, sections: list[Section]) -> Scalar:
        """Evaluate on p sections: sum over increasing tuples of
        component times the determinant of the section components."""
        if len(sections) != self.degree:
            raise ShapeError("wrong number of section arguments")
        if self.degree == 0:
            return self.comp.get((), self.zero_scalar())
        total = self.zero_scalar()
        for idx, v in self.comp.items():
            det = self.zero_scalar()
            for perm in itertools.permutations(range(self.degree)):
                sign = _perm_sign(perm)
                prod = Scalar.one(self.nvars)
                for i, k in enumerate(perm):
                    prod = prod * sections[i].comp[idx[k]]
                    if prod.is_zero():
                        break
                if prod.is_zero():
                    continue
                det = det + prod if sign == 1 else det - prod
            if not det.is_zero():
                total = total + v * det
        return total


def interior_product(omega: EForm, v: Section) -> EForm:
    """Contraction in the first slot; a degree -1 graded derivation."""
    if omega.degree < 1:
        raise ShapeError("interior product needs a form of degree >= 1")
    out: SparseArray = {}
    for idx, value in omega.comp.items():
        for pos, a in enumerate(idx):
            f = v.comp[a]
            if f.is_zero():
                continue
            rest = idx[:pos] + idx[pos + 1 :]
            term = f * value
            if pos % 2 == 1:
                term = -term
            s = out.get(rest)
            out[rest] = term if s is None else s + term
    return EForm(omega.degree - 1, omega.rank, omega.nvars, sparse_clean(out))


def wedge(a: EForm, b: EForm) -> EForm:
    """Exterior product; beyond top degree the zero form is returned."""
    degree = a.degree + b.degree
    if degree > a.rank:
        return EForm(degree, a.rank, a.nvars, {})
    out: SparseArray = {}
    for ia, va in a.comp.items():
        sa = set(ia)
        for ib, vb in b.comp.items():
            if sa & set(ib):
                continue
            ss = _sort_with_sign(ia + ib)
            if ss is None:
                continue
            key, sign = ss
            term = va * vb
            if sign == -1:
                term = -term
            s = out.get(key)
            out[key] = term if s is None else s + term
    return EForm(degree, a.rank, a.nvars, sparse_clean(out))


@dataclass(frozen=True)
class ETensor:
    """Tensor with q contravariant followed by s covariant slots."""

    q: int
    s: int
    rank: int
    nvars: int
    comp: SparseArray

    @classmethod
    def from_components(
        cls, A: AlgebroidData, q: int, s: int, comp: SparseArray
    ) -> ETensor:
        for idx in comp:
            if len(idx) != q + s or not all(0 <= k < A.rank for k in idx):
                raise ShapeError(f"bad tensor index {idx}")
        return cls(q, s, A.rank, A.dim, sparse_clean(comp))

    def at(self, idx: tuple[int, ...]) -> Scalar:
        return self.comp.get(idx, Scalar.zero(self.nvars))


@dataclass(frozen=True)
class FrameChange:
    """Invertible change of frame X'_a = A^b_a X_b."""

    matrix: tuple[tuple[Scalar, ...], ...]
    inverse: tuple[tuple[Scalar, ...], ...]

    @classmethod
    def of(cls, matrix) -> FrameChange:
        rows = tuple(tuple(row) for row in matrix)
        inv = invert_matrix([list(r) for r in rows])
        return cls(rows, tuple(tuple(r) for r in inv))

    @property
    def rank(self) -> int:
        return len(self.matrix)


# -- the bracket engine ------------------------------------------------


def bracket(A: AlgebroidData, u: Section, v: Section) -> Section:
    """Bracket of arbitrary sections via the Leibniz-rule extension."""
    if u.rank != A.rank or v.rank != A.rank:
        raise ShapeError("section rank does not match algebroid")
    n, r = A.dim, A.rank
    zero = A.zero()
    out = [zero for _ in range(r)]

    # structure-function term u^a v^b gamma^c_ab
    for (c, a, b), g in A.gamma.items():
        t = u.comp[a] * v.comp[b]
        if not t.is_zero():
            out[c] = out[c] + t * g

    # derivative terms rho(u)(v^c) - rho(v)(u^c)
    for c in range(r):
        out[c] = out[c] + A.section_derive(u, v.comp[c]) - A.section_derive(v, u.comp[c])

    # locality term rho^i_d d_i(u^a) v^b L^{c d}_{a b}
    if A.loc:
        du: dict[tuple[int, int], Scalar] = {}
        for a in range(r):
            ua = u.comp[a]
            if ua.is_zero():
                continue
            for d in range(r):
                val = A.frame_derive(d, ua)
                if not val.is_zero():
                    du[(d, a)] = val
        for (c, d, a, b), lv in A.loc.items():
            g = du.get((d, a))
            if g is None:
                continue
            t = g * v.comp[b]
            if not t.is_zero():
                out[c] = out[c] + t * lv
    return Section(tuple(out))


def coboundary(A: AlgebroidData, f: Scalar) -> EForm:
    """The degree-1 form Df with (Df)(u) = rho(u)(f)."""
    comp: SparseArray = {}
    for a in range(A.rank):
        v = A.frame_derive(a, f)
        if not v.is_zero():
            comp[(a,)] = v
    return EForm(1, A.rank, A.dim, comp)


def apply_locality(
    A: AlgebroidData, omega_comp: list[Scalar], u: Section, v: Section,
    projected: bool = False,
) -> Section:
    """L(omega, u, v), optionally followed by the locality projector."""
    out = [A.zero() for _ in range(A.rank)]
    for (c, d, e, b), lv in A.loc.items():
        t = omega_comp[d] * u.comp[e]
        if t.is_zero():
            continue
        t = t * v.comp[b]
        if not t.is_zero():
            out[c] = out[c] + t * lv
    sec = Section(tuple(out))
    if projected:
        sec = project_section(A, sec)
    return sec


def project_section(A: AlgebroidData, u: Section) -> Section:
    if A.proj is None:
        raise ShapeError("algebroid has no locality projector")
    out = []
    for a in range(A.rank):
        acc = A.zero()
        for b in range(A.rank):
            p = A.proj[a][b]
            if not p.is_zero() and not u.comp[b].is_zero():
                acc = acc + p * u.comp[b]
        out.append(acc)
    return Section(tuple(out))


# -- structural classification ------------------------------------------


@dataclass(frozen=True)
class Classification:
    almost_dull: bool
    almost_lie: bool
    pre_leibniz: bool
    pre_dull: bool
    pre_lie: bool


def classify(A: AlgebroidData) -> Classification:
    """Structural flags from the frame data.

    The anchor-morphism test is the frame form of rho([u,v]) = [rho u, rho v];
    the Leibniz rules propagate it to arbitrary sections whenever the
    locality operator output on exact coframes lies in ker(rho).
    """
    almost_dull = not sparse_clean(A.loc)
    antisym = all(
        (A.gamma_at(c, a, b) + A.gamma_at(c, b, a)).is_zero()
        for c in range(A.rank)
        for a in range(A.rank)
        for b in range(a, A.rank)
    )
    pre_leibniz = True
    for a in range(A.rank):
        for b in range(A.rank):
            for i in range(A.dim):
                lhs = A.zero()
                for c in range(A.rank):
                    g = A.gamma_at(c, a, b)
                    if not g.is_zero():
                        lhs = lhs + g * A.anchor[i][c]
                rhs = A.zero()
                for j in range(A.dim):
                    ra = A.anchor[j][a]
                    rb = A.anchor[j][b]
                    if not ra.is_zero():
                        rhs = rhs + ra * A.anchor[i][b].diff(j)
                    if not rb.is_zero():
                        rhs = rhs - rb * A.anchor[i][a].diff(j)
                if not lhs.equals(rhs):
                    pre_leibniz = False
                    break
            if not pre_leibniz:
                break
        if not pre_leibniz:
            break
    almost_lie = almost_dull and antisym
    return Classification(
        almost_dull=almost_dull,
        almost_lie=almost_lie,
        pre_leibniz=pre_leibniz,
        pre_dull=pre_leibniz and almost_dull,
        pre_lie=pre_leibniz and almost_lie,
    )


def check_locality_projector(
    A: AlgebroidData, sample_points: int = 5, seed: int = 0
) -> CheckReport:
    """Verify the two locality-projector conditions.

    Condition 1: rho composed with the projected locality operator vanishes
    identically.  Condition 2: the projector restricts to the identity on a
    ker(rho) basis computed over the fraction field.  Constant rank of the
    anchor is additionally spot-checked at random rational points; a
    mismatch is recorded as an assumption, not a failure.
    """
    if A.proj is None:
        raise ShapeError("no locality projector present")
    residuals: dict[tuple, Scalar] = {}
    # condition 1: rho^i_a (P L)^a_{(d e c)} = 0
    for (aa, d, e, c), lv in A.loc.items():
        for a in range(A.rank):
            p = A.proj_at(a, aa)
            if p.is_zero():
                continue
            for i in range(A.dim):
                rho = A.anchor[i][a]
                if rho.is_zero():
                    continue
                key = ("rho_PL", i, d, e, c)
                acc = residuals.get(key, A.zero())
                residuals[key] = acc + rho * p * lv
    # condition 2: P k = k for a fraction-field kernel basis of the anchor
    anchor_rows = [list(row) for row in A.anchor]
    basis = kernel_basis(anchor_rows, A.dim)
    for k_index, vec in enumerate(basis):
        pk = project_section(A, Section(tuple(vec)))
        for a in range(A.rank):
            residuals[("P_fix_kernel", k_index, a)] = pk.comp[a] - vec[a]
    assumptions = [
        "anchor regularity certified at sample points only; "
        "constant rank is assumed elsewhere"
    ]
    symbolic_rank = A.rank - len(basis)
    import random

    rng = random.Random(seed)
    checked = 0
    attempts = 0
    while checked < sample_points and attempts < 50 * sample_points:
        attempts += 1
        pt = Point.of(*[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(A.dim)])
        try:
            numeric = [
                [entry.eval_at(pt) for entry in row] for row in A.anchor
            ]
        except Exception:
            continue  # pole at this sample, draw again
        checked += 1
        if _numeric_rank(numeric) != symbolic_rank:
            assumptions.append(
                f"anchor rank at sample point {tuple(str(c) for c in pt.coords)} "
                f"differs from symbolic rank {symbolic_rank}"
            )
    return report_from_residuals("locality-projector", residuals, assumptions)


def _numeric_rank(matrix: list[list[Fraction]]) -> int:
    m = [row[:] for row in matrix]
    rank = 0
    cols = len(m[0]) if m else 0
    row = 0
    for col in range(cols):
        pivot = None
        for r in range(row, len(m)):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        pv = m[row][col]
        m[row] = [x / pv for x in m[row]]
        for r in range(len(m)):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        row += 1
        rank += 1
    return rank


# -- frame changes -------------------------------------------------------


def change_frame(
    A: AlgebroidData,
    F: FrameChange,
    conn: SparseArray | None = None,
    metric: list[list[Scalar]] | None = None,
):
    """Transform all bundle data to the frame X'_a = A^b_a X_b.

    The new anholonomy is computed through the bracket engine (it picks up
    derivative and locality terms and is deliberately not tensorial), while
    the locality operator, projector and metric transform tensorially and
    the connection picks up the usual derivative term.  Returns
    (algebroid, connection, metric) with None propagated.
    """
    if F.rank != A.rank:
        raise ShapeError("frame matrix rank mismatch")
    r, n = A.rank, A.dim
    Amat = [list(row) for row in F.matrix]
    Ainv = [list(row) for row in F.inverse]

    anchor2 = mat_mul([list(row) for row in A.anchor], Amat)

    frames = [Section(tuple(col)) for col in zip(*Amat)]  # X'_a in old frame
    gamma2: SparseArray = {}
    for a in range(r):
        for b in range(r):
            w = bracket(A, frames[a], frames[b])
            for c in range(r):
                acc = A.zero()
                for d in range(r):
                    if not Ainv[c][d].is_zero() and not w.comp[d].is_zero():
                        acc = acc + Ainv[c][d] * w.comp[d]
                if not acc.is_zero():
                    gamma2[(c, a, b)] = acc

    loc2: SparseArray = {}
    if A.loc:
        for a2 in range(r):
            for d2 in range(r):
                for e2 in range(r):
                    for c2 in range(r):
                        acc = A.zero()
                        for (a1, d1, e1, c1), lv in A.loc.items():
                            t = Ainv[a2][a1] * Ainv[d2][d1]
                            if t.is_zero():
                                continue
                            t = t * Amat[e1][e2]
                            if t.is_zero():
                                continue
                            t = t * Amat[c1][c2]
                            if not t.is_zero():
                                acc = acc + t * lv
                        if not acc.is_zero():
                            loc2[(a2, d2, e2, c2)] = acc

    proj2 = None
    if A.proj is not None:
        proj2 = tuple(
            tuple(row)
            for row in mat_mul(mat_mul(Ainv, [list(p) for p in A.proj]), Amat)
        )

    A2 = AlgebroidData(
        dim=n,
        rank=r,
        coords=A.coords,
        anchor=tuple(tuple(row) for row in anchor2),
        gamma=gamma2,
        loc=loc2,
        proj=proj2,
    )

    conn2 = None
    if conn is not None:
        conn2 = {}
        for a in range(r):
            for b in range(r):
                for c in range(r):
                    acc = A.zero()
                    for d in range(r):
                        inv = Ainv[a][d]
                        if inv.is_zero():
                            continue
                        term = A.zero()
                        for e in range(r):
                            ae = Amat[e][b]
                            if ae.is_zero():
                                continue
                            # derivative part: A^e_b rho^i_e d_i(A^d_c)
                            term = term + ae * A.frame_derive(e, Amat[d][c])
                            for f in range(r):
                                g = conn.get((d, e, f))
                                if g is None:
                                    continue
                                t = ae * Amat[f][c]
                                if not t.is_zero():
                                    term = term + t * g
                        if not term.is_zero():
                            acc = acc + inv * term
                    if not acc.is_zero():
                        conn2[(a, b, c)] = acc

    metric2 = None
    if metric is not None:
        metric2 = [[A.zero() for _ in range(r)] for _ in range(r)]
        for a in range(r):
            for b in range(r):
                acc = A.zero()
                for c in range(r):
                    if Amat[c][a].is_zero():
                        continue
                    for d in range(r):
                        t = Amat[c][a] * Amat[d][b]
                        if not t.is_zero():
                            acc = acc + t * metric[c][d]
                metric2[a][b] = acc

    return A2, conn2, metric2
