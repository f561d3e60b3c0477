"""Exterior and Leibniz derivatives on the bundle, the associator, and
executable verifiers for the structural identities of the geometry: Cartan
structure equations, algebraic and differential Bianchi identities, the
Ricci identity, Cartan magic formulas and the graded-derivation relations.

Every verifier quantifies over frame tuples, which settles the
function-multilinear identities exactly, and adds a deterministic seeded
sample of polynomial sections for identities that differentiate section
components.  All verdicts are exact: a check passes iff every residual is
the zero scalar.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Literal

from .connection import (
    Connection,
    bracket_of_kind,
    check_admissible,
    covariant_derivative,
    curvature,
    modified_anholonomy,
    modified_bracket,
    torsion,
)
from .core import (
    AlgebroidData,
    EForm,
    ETensor,
    Section,
    SparseArray,
    bracket,
    coboundary,
    interior_product,
    project_section,
    sparse_clean,
    wedge,
)
from .errors import AdmissibilityError, ProjectorRequiredError, ShapeError
from .reports import CheckReport, report_from_residuals
from .scalars import Poly, Scalar

DerivativeKind = Literal["modified", "projected"]
BracketKind = Literal["original", "modified", "projected"]


def _require_admissible(A: AlgebroidData, conn: Connection) -> None:
    report = check_admissible(A, conn)
    if not report.passed:
        raise AdmissibilityError(
            "connection is not admissible", residuals=report.residuals
        )


def _gamma_of_kind(
    A: AlgebroidData, conn: Connection | None, kind: BracketKind
) -> SparseArray:
    if kind == "original":
        return dict(A.gamma)
    if conn is None:
        raise ShapeError("modified brackets need a connection")
    return modified_anholonomy(A, conn, kind)  # type: ignore[arg-type]


def exterior_derivative_raw(
    A: AlgebroidData,
    conn: Connection,
    omega: EForm,
    kind: DerivativeKind = "projected",
) -> SparseArray:
    """The alternating-sum formula evaluated literally on every ordered
    frame tuple, with no antisymmetry assumed.  Diagnostic: for an
    admissible connection the result is antisymmetric, otherwise not."""
    gk = _gamma_of_kind(A, conn, kind)
    p = omega.degree
    out: SparseArray = {}
    for idx in itertools.product(range(A.rank), repeat=p + 1):
        v = _exterior_component(A, gk, omega, idx)
        if not v.is_zero():
            out[idx] = v
    return out


def _exterior_component(
    A: AlgebroidData, gk: SparseArray, omega: EForm, idx: tuple[int, ...]
) -> Scalar:
    p1 = len(idx)
    acc = A.zero()
    for i in range(p1):
        rest = idx[:i] + idx[i + 1 :]
        body = omega.at(rest) if omega.degree else omega.comp.get((), A.zero())
        term = A.frame_derive(idx[i], body)
        if not term.is_zero():
            acc = acc + term if i % 2 == 0 else acc - term
    for i in range(p1):
        for j in range(i + 1, p1):
            rest = tuple(idx[k] for k in range(p1) if k != i and k != j)
            sub = A.zero()
            for e in range(A.rank):
                g = gk.get((e, idx[i], idx[j]))
                if g is None:
                    continue
                w = omega.at((e,) + rest)
                if not w.is_zero():
                    sub = sub + g * w
            if not sub.is_zero():
                # 0-based (i, j) maps to 1-based (i+1, j+1): sign (-1)^(i+j)
                acc = acc - sub if (i + j) % 2 == 1 else acc + sub
    return acc


def e_exterior_derivative(
    A: AlgebroidData,
    conn: Connection,
    omega: EForm | Scalar,
    kind: DerivativeKind = "projected",
) -> EForm:
    """Degree-raising derivative built from the modified (or projected
    modified) bracket.  Admissibility is required: without it the raw
    alternating sum is not antisymmetric and does not define a form.  On
    scalars both kinds reduce to the coboundary."""
    if isinstance(omega, Scalar):
        omega = EForm.from_scalar(A, omega)
    if kind == "projected" and A.proj is None:
        raise ProjectorRequiredError("projected derivative requires a projector")
    _require_admissible(A, conn)
    if omega.degree == 0:
        return coboundary(A, omega.comp.get((), A.zero()))
    gk = _gamma_of_kind(A, conn, kind)
    out: SparseArray = {}
    for idx in itertools.combinations(range(A.rank), omega.degree + 1):
        v = _exterior_component(A, gk, omega, idx)
        if not v.is_zero():
            out[idx] = v
    return EForm(omega.degree + 1, A.rank, A.dim, out)


def leibniz_derivative(
    A: AlgebroidData,
    conn: Connection | None,
    v: Section,
    target: Scalar | Section | EForm,
    kind: BracketKind = "original",
):
    """Derivative along a section through the chosen bracket.

    Scalars: rho(v)(f) for every kind.  Sections: the bracket [v, u].
    Forms: duality, (L_v W)(u_1..u_p) = rho(v)(W(u_1..u_p))
    - sum_i W(u_1, .., [v, u_i], .., u_p).
    """
    if kind == "projected" and A.proj is None:
        raise ProjectorRequiredError("projected derivative requires a projector")
    if isinstance(target, Scalar):
        return A.section_derive(v, target)
    if isinstance(target, Section):
        return bracket_of_kind(A, conn, v, target, kind)
    if isinstance(target, EForm):
        p = target.degree
        if p == 0:
            f = target.comp.get((), A.zero())
            return EForm.from_scalar(A, A.section_derive(v, f))
        frame_brackets = [
            bracket_of_kind(A, conn, v, Section.frame(A, a), kind)
            for a in range(A.rank)
        ]
        out: SparseArray = {}
        for idx in itertools.combinations(range(A.rank), p):
            acc = A.section_derive(v, target.at(idx))
            for pos in range(p):
                br = frame_brackets[idx[pos]]
                for e in range(A.rank):
                    if br.comp[e].is_zero():
                        continue
                    w = target.at(idx[:pos] + (e,) + idx[pos + 1 :])
                    if not w.is_zero():
                        acc = acc - br.comp[e] * w
            if not acc.is_zero():
                out[idx] = acc
        return EForm(p, A.rank, A.dim, out)
    raise ShapeError(f"cannot differentiate a {type(target).__name__}")


def associator(
    A: AlgebroidData,
    kind: BracketKind,
    u: Section,
    v: Section,
    w: Section,
    conn: Connection | None = None,
) -> Section:
    """Leibniz-identity defect [u,[v,w]] - [[u,v],w] - [v,[u,w]] of the
    chosen bracket."""

    def br(x, y):
        return bracket_of_kind(A, conn, x, y, kind)

    return br(u, br(v, w)).sub(br(br(u, v), w)).sub(br(v, br(u, w)))


# -- shared helpers for the identity suite --------------------------------


def seeded_sections(
    A: AlgebroidData, seed: int, count: int, degree: int
) -> list[Section]:
    """Deterministic pseudo-random polynomial sections for the verifiers."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        comp = []
        for _ in range(A.rank):
            comp.append(_random_poly_scalar(rng, A.dim, degree))
        out.append(Section(tuple(comp)))
    return out


def _random_poly_scalar(rng: random.Random, nvars: int, degree: int) -> Scalar:
    poly = Poly.zero(nvars)
    for _ in range(rng.randint(1, 3)):
        exps = [0] * nvars
        for _ in range(rng.randint(0, degree)):
            exps[rng.randrange(nvars)] += 1
        c = rng.randint(-3, 3)
        if c:
            poly = poly + Poly(nvars, {tuple(exps): Fraction(c)})
    return Scalar(poly)


def seeded_forms(
    A: AlgebroidData, seed: int, count: int, degree: int, max_poly_degree: int
) -> list[EForm]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        comp: SparseArray = {}
        for idx in itertools.combinations(range(A.rank), degree):
            s = _random_poly_scalar(rng, A.dim, max_poly_degree)
            if not s.is_zero():
                comp[idx] = s
        out.append(EForm(degree, A.rank, A.dim, comp))
    return out


def _sample_note(seed: int, samples: int, degree: int) -> str:
    return f"section samples: seed={seed} count={samples} degree<={degree}"


def covariant_tensor_array(
    A: AlgebroidData, conn: Connection, comp: SparseArray, q: int, s: int
) -> SparseArray:
    """All-frame covariant derivative of a (q, s) component array: index
    (b, *tensor index) holds the X_b derivative."""
    from .connection import frame_covariant_tensor

    tensor = ETensor(q, s, A.rank, A.dim, sparse_clean(comp))
    out: SparseArray = {}
    for b in range(A.rank):
        arr = frame_covariant_tensor(A, conn, b, tensor)
        for idx, v in arr.items():
            out[(b,) + idx] = v
    return out


# -- identity checks ------------------------------------------------------


def check_cartan_structure(A: AlgebroidData, conn: Connection) -> CheckReport:
    """Residuals of the first (plain and projected) and second structure
    equations on all frame pairs."""
    _require_admissible(A, conn)
    if A.proj is None:
        raise ProjectorRequiredError("second structure equation needs a projector")
    residuals: dict[tuple, Scalar] = {}
    r = A.rank
    tor = torsion(A, conn, "modified")
    tor_hat = torsion(A, conn, "projected")
    curv = curvature(A, conn)
    omegas = [[conn.omega(A, a, b) for b in range(r)] for a in range(r)]
    coframes = [EForm.coframe(A, a) for a in range(r)]
    for a in range(r):
        de = e_exterior_derivative(A, conn, coframes[a], "modified")
        de_hat = e_exterior_derivative(A, conn, coframes[a], "projected")
        rhs = de
        rhs_hat = de_hat
        for b in range(r):
            wb = wedge(omegas[a][b], coframes[b])
            rhs = rhs.add(wb)
            rhs_hat = rhs_hat.add(wb)
        for b in range(r):
            for c in range(b + 1, r):
                residuals[("first", a, b, c)] = tor.get((a, b, c), A.zero()) - rhs.at(
                    (b, c)
                )
                residuals[("first-projected", a, b, c)] = tor_hat.get(
                    (a, b, c), A.zero()
                ) - rhs_hat.at((b, c))
    for a in range(r):
        for b in range(r):
            rhs = e_exterior_derivative(A, conn, omegas[a][b], "projected")
            for c in range(r):
                rhs = rhs.add(wedge(omegas[a][c], omegas[c][b]))
            for c in range(r):
                for d in range(c + 1, r):
                    residuals[("second", a, b, c, d)] = curv.get(
                        (a, c, d, b), A.zero()
                    ) - rhs.at((c, d))
    return report_from_residuals("cartan-structure", residuals)


def check_bianchi_algebraic(
    A: AlgebroidData,
    conn: Connection,
    form: Literal["general", "projected"] = "projected",
    seed: int = 0,
    samples: int = 4,
    degree: int = 2,
) -> CheckReport:
    """First and second algebraic Bianchi identities.

    The projected form uses the projected torsion and the projected
    modified bracket throughout and is exact for admissible connections.
    The general form follows the printed combination with explicit
    (1 - P) locality terms; its second identity has an ambiguous index
    pattern as printed, so its residuals are reported under an assumption
    note and acceptance never gates on them.
    """
    _require_admissible(A, conn)
    if A.proj is None:
        raise ProjectorRequiredError("Bianchi identities need a projector")
    if form == "projected":
        return _bianchi_projected(A, conn, seed, samples, degree)
    return _bianchi_general(A, conn)


def _cyclic(items: tuple) -> list[tuple]:
    return [items, items[1:] + items[:1], items[2:] + items[:2]]


def _bianchi_projected(
    A: AlgebroidData, conn: Connection, seed: int, samples: int, degree: int
) -> CheckReport:
    r = A.rank
    residuals: dict[tuple, Scalar] = {}
    curv = curvature(A, conn)
    tor_hat = torsion(A, conn, "projected")
    nabla_t = covariant_tensor_array(A, conn, tor_hat, 1, 2)
    frames = [Section.frame(A, a) for a in range(r)]

    # nested bracket tables over the projected modified bracket:
    # outer_left[(b, c, d)] = [[X_b, X_c], X_d] and
    # outer_right[(b, c, d)] = [X_b, [X_c, X_d]]
    anhol = modified_anholonomy(A, conn, "projected")
    inner_sections = {
        (b, c): Section(tuple(anhol.get((e, b, c), A.zero()) for e in range(r)))
        for b in range(r)
        for c in range(r)
    }
    outer_left: dict[tuple[int, int, int], Section] = {}
    outer_right: dict[tuple[int, int, int], Section] = {}
    for b in range(r):
        for c in range(r):
            for d in range(r):
                outer_left[(b, c, d)] = modified_bracket(
                    A, conn, inner_sections[(b, c)], frames[d], "projected"
                )
                outer_right[(b, c, d)] = modified_bracket(
                    A, conn, frames[b], inner_sections[(c, d)], "projected"
                )

    # first identity; the nested-bracket term is the cyclic sum of
    # [u, [v, w]], the combination the direct expansion produces
    for b in range(r):
        for c in range(r):
            for d in range(r):
                for a in range(r):
                    lhs = A.zero()
                    rhs = A.zero()
                    for (u, v, w) in _cyclic((b, c, d)):
                        lhs = lhs + curv.get((a, u, v, w), A.zero())
                        rhs = rhs + nabla_t.get((u, a, v, w), A.zero())
                        for e in range(r):
                            t1 = tor_hat.get((e, u, v))
                            if t1 is not None:
                                t2 = tor_hat.get((a, e, w))
                                if t2 is not None:
                                    rhs = rhs + t1 * t2
                        rhs = rhs + outer_right[(u, v, w)].comp[a]
                    val = lhs - rhs
                    if not val.is_zero():
                        residuals[("first", a, b, c, d)] = val

    nabla_r = covariant_tensor_array(A, conn, curv, 1, 3)
    for b in range(r):
        for c in range(r):
            for d in range(r):
                for e2 in range(r):
                    for a in range(r):
                        lhs = A.zero()
                        rhs = A.zero()
                        for (u, v, w) in _cyclic((b, c, d)):
                            lhs = lhs + nabla_r.get((u, a, v, w, e2), A.zero())
                            for f in range(r):
                                t1 = tor_hat.get((f, v, w))
                                if t1 is not None:
                                    t2 = curv.get((a, u, f, e2))
                                    if t2 is not None:
                                        rhs = rhs + t1 * t2
                                db = outer_left[(u, v, w)].comp[f]
                                if not db.is_zero():
                                    g = conn.coeff.get((a, f, e2))
                                    if g is not None:
                                        rhs = rhs + db * g
                        val = lhs - rhs
                        if not val.is_zero():
                            residuals[("second", a, b, c, d, e2)] = val
    return report_from_residuals(
        "bianchi-algebraic-projected",
        residuals,
        [_sample_note(seed, samples, degree) + " (frame tuples suffice: all terms tensorial)"],
    )


def _bianchi_general(A: AlgebroidData, conn: Connection) -> CheckReport:
    """Literal transcription of the unprojected algebraic Bianchi pair."""
    r = A.rank
    residuals: dict[tuple, Scalar] = {}
    curv = curvature(A, conn)
    tor = torsion(A, conn, "modified")
    nabla_t = covariant_tensor_array(A, conn, tor, 1, 2)
    frames = [Section.frame(A, a) for a in range(r)]
    anhol = modified_anholonomy(A, conn, "modified")

    def complement_locality(u: int, v: int) -> Section:
        # (1 - P) L(e^a, D_{X_a} u, v) on frame arguments
        total = [A.zero() for _ in range(r)]
        for (c, d, e, bb), lv in A.loc.items():
            if bb != v:
                continue
            g = conn.coeff.get((e, d, u))
            if g is not None:
                total[c] = total[c] + g * lv
        sec = Section(tuple(total))
        return sec.sub(project_section(A, sec))

    double: dict[tuple[int, int, int], Section] = {}
    for b in range(r):
        for c in range(r):
            inner = Section(tuple(anhol.get((e, b, c), A.zero()) for e in range(r)))
            for d in range(r):
                double[(b, c, d)] = modified_bracket(A, conn, inner, frames[d], "modified")

    for b in range(r):
        for c in range(r):
            for d in range(r):
                for a in range(r):
                    lhs = A.zero()
                    rhs = A.zero()
                    for (u, v, w) in _cyclic((b, c, d)):
                        lhs = lhs + curv.get((a, u, v, w), A.zero())
                        rhs = rhs + nabla_t.get((u, a, v, w), A.zero())
                        for e in range(r):
                            t1 = tor.get((e, u, v))
                            if t1 is not None:
                                t2 = tor.get((a, e, w))
                                if t2 is not None:
                                    rhs = rhs + t1 * t2
                        comp = complement_locality(u, v)
                        rhs = rhs + covariant_derivative(
                            A, conn, comp, frames[w]
                        ).comp[a]
                        rhs = rhs + double[(u, v, w)].comp[a]
                    val = lhs - rhs
                    if not val.is_zero():
                        residuals[("first", a, b, c, d)] = val

    nabla_r = covariant_tensor_array(A, conn, curv, 1, 3)
    for b in range(r):
        for c in range(r):
            for d in range(r):
                for e2 in range(r):
                    for a in range(r):
                        lhs = A.zero()
                        rhs = A.zero()
                        for (u, v, w) in _cyclic((b, c, d)):
                            lhs = lhs + nabla_r.get((u, a, v, w, e2), A.zero())
                            for f in range(r):
                                t1 = tor.get((f, v, w))
                                if t1 is not None:
                                    t2 = curv.get((a, u, f, e2))
                                    if t2 is not None:
                                        rhs = rhs + t1 * t2
                            comp = complement_locality(u, v)
                            # D_u D_comp w' - D_comp D_u w'
                            term = covariant_derivative(
                                A, conn, frames[u],
                                covariant_derivative(A, conn, comp, frames[e2]),
                            ).comp[a]
                            term = term - covariant_derivative(
                                A, conn, comp,
                                covariant_derivative(A, conn, frames[u], frames[e2]),
                            ).comp[a]
                            rhs = rhs + term
                            # - D_{(1-P) L(e^a, D_{X_a}[v,w]^mod, u)} w'
                            inner = Section(
                                tuple(anhol.get((g2, v, w), A.zero()) for g2 in range(r))
                            )
                            lsec = _general_locality_of_section(A, conn, inner, frames[u])
                            lsec = lsec.sub(project_section(A, lsec))
                            rhs = rhs - covariant_derivative(
                                A, conn, lsec, frames[e2]
                            ).comp[a]
                            for f in range(r):
                                db = double[(u, v, w)].comp[f]
                                if not db.is_zero():
                                    g = conn.coeff.get((a, f, e2))
                                    if g is not None:
                                        rhs = rhs + db * g
                        val = lhs - rhs
                        if not val.is_zero():
                            residuals[("second", a, b, c, d, e2)] = val
    return report_from_residuals(
        "bianchi-algebraic-general",
        residuals,
        [
            "literal transcription; the second identity's locality term has an "
            "ambiguous printed index pattern, residuals reported without gating"
        ],
    )


def _general_locality_of_section(
    A: AlgebroidData, conn: Connection, u: Section, v: Section
) -> Section:
    """L(e^d, D_{X_d} u, v) for section arguments."""
    r = A.rank
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


def check_bianchi_differential(A: AlgebroidData, conn: Connection) -> CheckReport:
    """Differential Bianchi identities in form language, with the explicit
    square-of-the-derivative anomaly terms."""
    _require_admissible(A, conn)
    if A.proj is None:
        raise ProjectorRequiredError("differential Bianchi needs a projector")
    r = A.rank
    residuals: dict[tuple, Scalar] = {}
    tor_hat = torsion(A, conn, "projected")
    curv = curvature(A, conn)
    coframes = [EForm.coframe(A, a) for a in range(r)]
    omegas = [[conn.omega(A, a, b) for b in range(r)] for a in range(r)]
    t_forms = []
    for a in range(r):
        comp: SparseArray = {}
        for b in range(r):
            for c in range(b + 1, r):
                v = tor_hat.get((a, b, c))
                if v is not None and not v.is_zero():
                    comp[(b, c)] = v
        t_forms.append(EForm(2, r, A.dim, comp))
    r_forms = [[None] * r for _ in range(r)]
    for a in range(r):
        for b in range(r):
            comp = {}
            for c in range(r):
                for d in range(c + 1, r):
                    v = curv.get((a, c, d, b))
                    if v is not None and not v.is_zero():
                        comp[(c, d)] = v
            r_forms[a][b] = EForm(2, r, A.dim, comp)

    for a in range(r):
        lhs = e_exterior_derivative(A, conn, t_forms[a], "projected")
        for b in range(r):
            lhs = lhs.add(wedge(omegas[a][b], t_forms[b]))
        rhs = EForm.zero(A, 3)
        for b in range(r):
            rhs = rhs.add(wedge(r_forms[a][b], coframes[b]))
        dd = e_exterior_derivative(
            A, conn, e_exterior_derivative(A, conn, coframes[a], "projected"),
            "projected",
        )
        rhs = rhs.add(dd)
        diff = lhs.sub(rhs)
        for idx, v in diff.comp.items():
            residuals[("first", a) + idx] = v

    for a in range(r):
        for b in range(r):
            lhs = e_exterior_derivative(A, conn, r_forms[a][b], "projected")
            for c in range(r):
                lhs = lhs.add(wedge(omegas[a][c], r_forms[c][b]))
            rhs = EForm.zero(A, 3)
            for c in range(r):
                rhs = rhs.add(wedge(r_forms[a][c], omegas[c][b]))
            dd = e_exterior_derivative(
                A, conn, e_exterior_derivative(A, conn, omegas[a][b], "projected"),
                "projected",
            )
            rhs = rhs.add(dd)
            diff = lhs.sub(rhs)
            for idx, v in diff.comp.items():
                residuals[("second", a, b) + idx] = v
    return report_from_residuals("bianchi-differential", residuals)


def second_covariant(
    A: AlgebroidData, conn: Connection, u: Section, v: Section, w: Section
) -> Section:
    """D^2_{u,v} w = D_u D_v w - D_{D_u v} w."""
    first = covariant_derivative(A, conn, u, covariant_derivative(A, conn, v, w))
    return first.sub(
        covariant_derivative(A, conn, covariant_derivative(A, conn, u, v), w)
    )


def curvature_apply(
    A: AlgebroidData, curv: SparseArray, u: Section, v: Section, w: Section
) -> Section:
    out = [A.zero() for _ in range(A.rank)]
    for (a, b, c, d), val in curv.items():
        t = u.comp[b] * v.comp[c]
        if t.is_zero():
            continue
        t = t * w.comp[d]
        if not t.is_zero():
            out[a] = out[a] + t * val
    return Section(tuple(out))


def torsion_apply(
    A: AlgebroidData, tor: SparseArray, u: Section, v: Section
) -> Section:
    out = [A.zero() for _ in range(A.rank)]
    for (a, b, c), val in tor.items():
        t = u.comp[b] * v.comp[c]
        if not t.is_zero():
            out[a] = out[a] + t * val
    return Section(tuple(out))


def check_ricci(
    A: AlgebroidData,
    conn: Connection,
    seed: int = 0,
    samples: int = 4,
    degree: int = 2,
) -> CheckReport:
    """Ricci identity, valid for any linear connection (admissibility not
    required); a projector must be present for the curvature operator."""
    if A.proj is None:
        raise ProjectorRequiredError("Ricci identity needs a projector")
    residuals: dict[tuple, Scalar] = {}
    curv = curvature(A, conn)
    tor = torsion(A, conn, "modified")
    frames = [Section.frame(A, a) for a in range(A.rank)]

    def residual(u: Section, v: Section, w: Section) -> Section:
        lhs = second_covariant(A, conn, u, v, w).sub(
            second_covariant(A, conn, v, u, w)
        )
        rhs = curvature_apply(A, curv, u, v, w)
        rhs = rhs.sub(
            covariant_derivative(A, conn, torsion_apply(A, tor, u, v), w)
        )
        lsec = _general_locality_of_section(A, conn, u, v)
        lsec = lsec.sub(project_section(A, lsec))
        rhs = rhs.add(covariant_derivative(A, conn, lsec, w))
        return lhs.sub(rhs)

    for b in range(A.rank):
        for c in range(b + 1, A.rank):
            for d in range(A.rank):
                res = residual(frames[b], frames[c], frames[d])
                for a in range(A.rank):
                    if not res.comp[a].is_zero():
                        residuals[("frame", a, b, c, d)] = res.comp[a]
    sections = seeded_sections(A, seed, 3 * samples, degree)
    for k in range(samples):
        u, v, w = sections[3 * k : 3 * k + 3]
        res = residual(u, v, w)
        for a in range(A.rank):
            if not res.comp[a].is_zero():
                residuals[("sample", k, a)] = res.comp[a]
    return report_from_residuals(
        "ricci", residuals, [_sample_note(seed, samples, degree)]
    )


def check_magic_and_derivations(
    A: AlgebroidData,
    conn: Connection,
    seed: int = 0,
    samples: int = 4,
    degree: int = 2,
) -> CheckReport:
    """Cartan magic formulas, the rescaling corollary, the derivation
    commutators, graded Leibniz rules of the exterior derivatives, and,
    gated on a vanishing associator, the derivative-commutation pair."""
    _require_admissible(A, conn)
    if A.proj is None:
        raise ProjectorRequiredError("derivation suite needs a projector")
    residuals: dict[tuple, Scalar] = {}
    assumptions = [_sample_note(seed, samples, degree)]
    rng_forms1 = seeded_forms(A, seed + 1, samples, 1, degree)
    rng_forms2 = seeded_forms(A, seed + 2, samples, min(2, A.rank), degree)
    sections = seeded_sections(A, seed + 3, 2 * samples, degree)
    fs = [_random_poly_scalar(random.Random(seed + 4 + i), A.dim, degree) for i in range(samples)]

    def add_form_residual(tag: tuple, form: EForm):
        for idx, v in form.comp.items():
            residuals[tag + idx] = v

    for k in range(samples):
        u = sections[2 * k]
        v = sections[2 * k + 1]
        f = fs[k]
        for kind in ("modified", "projected"):
            dk: DerivativeKind = kind  # type: ignore[assignment]
            for label, omega in (("p1", rng_forms1[k]), ("p2", rng_forms2[k])):
                # magic formula
                lie = leibniz_derivative(A, conn, v, omega, kind)
                d_iv = e_exterior_derivative(A, conn, interior_product(omega, v), dk) \
                    if omega.degree >= 1 else EForm.zero(A, 1)
                iv_d = interior_product(e_exterior_derivative(A, conn, omega, dk), v)
                add_form_residual(("magic", kind, label, k), lie.sub(d_iv.add(iv_d)))
                # rescaling corollary
                lie_fv = leibniz_derivative(A, conn, v.scale(f), omega, kind)
                rhs = lie.scale(f).add(
                    wedge(e_exterior_derivative(A, conn, f, dk), interior_product(omega, v))
                ) if omega.degree >= 1 else lie.scale(f)
                add_form_residual(("rescale", kind, label, k), lie_fv.sub(rhs))
            # commutator with the same section vanishes for admissible conn
            om2 = rng_forms2[k]
            if om2.degree >= 1:
                lhs = leibniz_derivative(A, conn, v, interior_product(om2, v), kind)
                rhs = interior_product(leibniz_derivative(A, conn, v, om2, kind), v)
                add_form_residual(("self-commute", kind, k), lhs.sub(rhs))
        # derivation commutator with the original bracket, all three kinds
        for kind in ("original", "modified", "projected"):
            om2 = rng_forms2[k]
            if om2.degree >= 1:
                lhs = leibniz_derivative(A, conn, u, interior_product(om2, v), kind)
                rhs = interior_product(leibniz_derivative(A, conn, u, om2, kind), v)
                uv = bracket_of_kind(A, conn, u, v, kind)
                rhs = rhs.add(interior_product(om2, uv))
                add_form_residual(("commutator", kind, k), lhs.sub(rhs))
            # Leibniz rule of the derivative over wedges
            omA = rng_forms1[k]
            omB = rng_forms1[(k + 1) % samples]
            lw = leibniz_derivative(A, conn, v, wedge(omA, omB), kind)
            rhs = wedge(leibniz_derivative(A, conn, v, omA, kind), omB).add(
                wedge(omA, leibniz_derivative(A, conn, v, omB, kind))
            )
            add_form_residual(("wedge-leibniz", kind, k), lw.sub(rhs))
        # graded Leibniz of both exterior derivatives
        omA = rng_forms1[k]
        omB = rng_forms1[(k + 1) % samples]
        for kind in ("modified", "projected"):
            dk = kind  # type: ignore[assignment]
            lhs = e_exterior_derivative(A, conn, wedge(omA, omB), dk)
            rhs = wedge(e_exterior_derivative(A, conn, omA, dk), omB).sub(
                wedge(omA, e_exterior_derivative(A, conn, omB, dk))
            )
            add_form_residual(("graded-leibniz", kind, k), lhs.sub(rhs))

    # conditional pair: only valid when the bracket's associator vanishes
    frames = [Section.frame(A, a) for a in range(A.rank)]
    gate_sections = seeded_sections(A, seed + 9, 6, degree)
    for kind in ("original", "modified", "projected"):
        assoc_zero = True
        triples = [
            (frames[b], frames[c], frames[d])
            for b in range(A.rank)
            for c in range(A.rank)
            for d in range(A.rank)
        ] + [tuple(gate_sections[3 * i : 3 * i + 3]) for i in range(2)]
        for (su, sv, sw) in triples:
            if not associator(A, kind, su, sv, sw, conn).is_zero():
                assoc_zero = False
                break
        if not assoc_zero:
            assumptions.append(
                f"associator of the {kind} bracket is nonzero: "
                "derivative-commutation pair skipped"
            )
            continue
        for k in range(samples):
            u = sections[2 * k]
            v = sections[2 * k + 1]
            om1 = rng_forms1[k]
            lhs = leibniz_derivative(
                A, conn, u, leibniz_derivative(A, conn, v, om1, kind), kind
            )
            rhs = leibniz_derivative(
                A, conn, v, leibniz_derivative(A, conn, u, om1, kind), kind
            )
            uv = bracket_of_kind(A, conn, u, v, kind)
            rhs = rhs.add(leibniz_derivative(A, conn, uv, om1, kind))
            for idx, val in lhs.sub(rhs).comp.items():
                residuals[("lie-commutator", kind, k) + idx] = val
            if kind == "projected":
                dlie = e_exterior_derivative(
                    A, conn, leibniz_derivative(A, conn, v, om1, kind), "projected"
                )
                lied = leibniz_derivative(
                    A, conn, v, e_exterior_derivative(A, conn, om1, "projected"), kind
                )
                for idx, val in dlie.sub(lied).comp.items():
                    residuals[("d-commute", kind, k) + idx] = val
    return report_from_residuals("magic-and-derivations", residuals, assumptions)


def check_square_laws(
    A: AlgebroidData,
    conn: Connection,
    seed: int = 0,
    samples: int = 4,
    degree: int = 2,
) -> CheckReport:
    """The square of the projected derivative: zero on scalars, and on
    degree-1 forms the negative of the associator pairing.

    With the alternating-sum convention used here and the standard
    associator, one checks exactly d^2 W (u, v, w) = -W(Assoc(u, v, w)).
    """
    _require_admissible(A, conn)
    if A.proj is None:
        raise ProjectorRequiredError("square laws need a projector")
    residuals: dict[tuple, Scalar] = {}
    rng = random.Random(seed)
    for k in range(samples):
        f = _random_poly_scalar(rng, A.dim, degree)
        df = e_exterior_derivative(A, conn, f, "projected")
        ddf = e_exterior_derivative(A, conn, df, "projected")
        for idx, v in ddf.comp.items():
            residuals[("ddf", k) + idx] = v
    forms = seeded_forms(A, seed + 1, samples, 1, degree)
    sections = seeded_sections(A, seed + 2, 3 * samples, degree)
    for k in range(samples):
        omega = forms[k]
        dd = e_exterior_derivative(
            A, conn, e_exterior_derivative(A, conn, omega, "projected"), "projected"
        )
        u, v, w = sections[3 * k : 3 * k + 3]
        lhs = dd.apply([u, v, w]) if dd.degree <= A.rank else A.zero()
        assoc = associator(A, "projected", u, v, w, conn)
        rhs = -omega.apply([assoc])
        val = lhs - rhs
        if not val.is_zero():
            residuals[("ddomega", k)] = val
    return report_from_residuals(
        "square-laws",
        residuals,
        [
            _sample_note(seed, samples, degree),
            "sign convention: d^2 W(u,v,w) = -W(Assoc(u,v,w)) for the "
            "standard associator and alternating-sum derivative",
        ],
    )
