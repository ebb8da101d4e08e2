"""Bidirectional elaboration of surface terms into checked core terms."""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

from . import cube as C
from .diagnostics import CheckError, Diagnostic, FuelExhausted
from .evaluator import (
    SHAPE_SORTS,
    CheckedDeclaration,
    Context,
    Options,
    _restriction_parts,
    conv,
    def_equal,
    honors,
    is_cube,
    strip_restrict,
    to_tope,
    whnf,
)
from .printer import show
from .terms import (
    App,
    Assumption,
    CheckCommand,
    ComputeCommand,
    CubeProduct,
    CubeUniverse,
    Definition,
    First,
    Global,
    IdJ,
    IdType,
    IntervalCube,
    Lam,
    One,
    Pair,
    Pi,
    Postulate,
    RecBot,
    RecOr,
    Refl,
    Restrict,
    Second,
    ShapeConst,
    Sigma,
    Star,
    Times,
    TopeAnd,
    TopeBot,
    TopeEq,
    TopeLeq,
    TopeOr,
    TopeTop,
    TopeUniverse,
    UnitCube,
    UnitElem,
    UnitType,
    Universe,
    Var,
    Zero,
    alpha_eq,
    subst1,
)

# Motives of idJ may land in any universe; cumulativity makes one large level enough.
MOTIVE_LEVEL = 1_000_000


def _describe(frame):
    kind, *items = frame
    match kind:
        case "check":
            term, ty = items
            return f"checking {show(term)} against {show(ty)}"
        case "infer":
            return f"inferring the type of {show(items[0])}"
        case "type":
            return f"checking that {show(items[0])} is a type"
        case "declaration":
            return f"checking declaration {items[0]}"
    return " ".join(str(i) for i in items)


class Checker:
    def __init__(self, signature: dict | None = None, options: Options | None = None):
        self.signature = {} if signature is None else signature
        self.options = options or Options()
        self.frames: list = []

    def context(self) -> Context:
        return Context.empty(self.options, self.signature)

    # errors and trace

    @contextmanager
    def frame(self, *frame):
        self.frames.append(frame)
        try:
            yield
        except CheckError as err:
            if not err.trace:
                err.trace = self.trace()
            raise
        except FuelExhausted as err:
            raise CheckError("E-FUEL", str(err), self.trace()) from None
        finally:
            self.frames.pop()

    def trace(self):
        return [_describe(f) for f in self.frames]

    def fail(self, code, message):
        return CheckError(code, message, self.trace())

    # judgments

    def check(self, ctx: Context, term, expected):
        with self.frame("check", term, expected):
            return self._check(ctx, term, expected)

    def infer(self, ctx: Context, term):
        with self.frame("infer", term):
            return self._infer(ctx, term)

    def check_type(self, ctx: Context, term):
        """Elaborate a type; returns (elaborated, universe level)."""
        with self.frame("type", term):
            elab, kind = self._infer(ctx, term)
            kind = whnf(ctx, kind)
            if isinstance(kind, Universe):
                return elab, kind.level
            if isinstance(kind, CubeUniverse):
                return elab, 0
            raise self.fail("E-MISMATCH", f"{show(term)} is not a type")

    def _check(self, ctx, term, expected):
        target = whnf(ctx, expected)
        if isinstance(target, Restrict):
            return self._check_restricted(ctx, term, expected, target)
        match term, target:
            case Lam(), Pi():
                return self._check_lam(ctx, term, target)
            case Lam(), _:
                raise self.fail("E-MISMATCH", f"a function was given where {show(expected)} was expected")
            case Pair(a, b), Sigma(name, dom, cod):
                left = self.check(ctx, a, dom)
                return Pair(left, self.check(ctx, b, subst1(cod, name, left)))
            case Pair(a, b), CubeProduct(i, j):
                return Pair(self.check(ctx, a, i), self.check(ctx, b, j))
            case Refl(t, ambient), IdType(left, right, amb):
                return self._check_refl(ctx, term, target)
            case RecOr(clauses), _:
                return self._check_recor(ctx, clauses, expected)
            case RecBot(), _:
                if not ctx.inconsistent():
                    raise self.fail("E-TOPE", "recBOT used where the tope context is consistent")
                return RecBot()
        elab, actual = self.infer(ctx, term)
        if not self.subtype(ctx, actual, expected):
            code = "E-UNIVERSE" if self._both_universes(ctx, actual, expected) else "E-MISMATCH"
            raise self.fail(code, f"{show(term)} has type {show(actual)} but {show(expected)} was expected")
        return elab

    def _both_universes(self, ctx, a, b):
        return isinstance(whnf(ctx, a), Universe) and isinstance(whnf(ctx, b), Universe)

    def _check_restricted(self, ctx, term, expected, target):
        base, clauses = _restriction_parts(ctx, target)
        elab = self.check(ctx, term, base)
        for tope, value in clauses:
            branch = ctx.with_tope(to_tope(ctx, tope))
            if branch.inconsistent():
                continue
            if not def_equal(branch, base, elab, value):
                raise self.fail(
                    "E-BOUNDARY",
                    f"{show(term)} does not agree with {show(value)} where {show(tope)} holds",
                )
        return elab

    def _check_lam(self, ctx, lam: Lam, pi: Pi):
        x = ctx.fresh(lam.name, pi, Lam(lam.name, lam.body))
        tope = None if pi.tope is None else subst1(pi.tope, pi.name, Var(x))
        if lam.dom is not None:
            self._match_annotation(ctx, x, lam.dom, pi.dom, tope)
        inner = ctx.bind(x, pi.dom, tope)
        body = self.check(inner, subst1(lam.body, lam.name, Var(x)), subst1(pi.cod, pi.name, Var(x)))
        return Lam(x, body, pi.dom)

    def _match_annotation(self, ctx, x, annotation, dom, tope):
        d, t, _, _ = self.binder(ctx, x, annotation)
        if not conv(ctx, d, dom):
            raise self.fail("E-MISMATCH", f"binder annotated {show(annotation)} but {show(dom)} was expected")
        if t is None and tope is None:
            return
        inner = ctx.bind(x, dom)
        mine = C.TOP if t is None else to_tope(inner, t)
        theirs = C.TOP if tope is None else to_tope(inner, tope)
        if not (inner.with_tope(mine).entails(theirs) and inner.with_tope(theirs).entails(mine)):
            raise self.fail("E-TOPE", f"binder annotated {show(annotation)} ranges over a different shape")

    def _check_refl(self, ctx, term: Refl, target: IdType):
        ambient = target.ambient
        if term.ambient is not None:
            given, _ = self.check_type(ctx, term.ambient)
            if not conv(ctx, given, ambient):
                raise self.fail("E-MISMATCH", f"refl at {show(given)} used at {show(ambient)}")
        if term.term is not None:
            t = self.check(ctx, term.term, ambient)
            if not def_equal(ctx, ambient, t, target.left):
                raise self.fail("E-MISMATCH", f"refl of {show(t)} cannot prove {show(target)}")
        if not def_equal(ctx, ambient, target.left, target.right):
            raise self.fail(
                "E-MISMATCH",
                f"{show(target.left)} and {show(target.right)} are not definitionally equal",
            )
        return Refl(target.left, ambient)

    def _check_recor(self, ctx, clauses, expected):
        topes = []
        for tope, _ in clauses:
            topes.append(self.check(ctx, tope, TopeUniverse()))
        solver = [to_tope(ctx, t) for t in topes]
        if not ctx.entails(C.disj(*solver)):
            raise self.fail("E-TOPE", "the clauses of recOR do not cover the current tope context")
        bodies = []
        for t, s, (_, body) in zip(topes, solver, clauses):
            branch = ctx.with_tope(s)
            bodies.append(None if branch.inconsistent() else self.check(branch, body, expected))
        for i in range(len(clauses)):
            for j in range(i + 1, len(clauses)):
                if bodies[i] is None or bodies[j] is None:
                    continue
                overlap = ctx.with_tope(solver[i]).with_tope(solver[j])
                if overlap.inconsistent():
                    continue
                if not def_equal(overlap, expected, bodies[i], bodies[j]):
                    raise self.fail(
                        "E-CLAUSE-CONFLICT",
                        f"clauses {show(topes[i])} and {show(topes[j])} disagree where both hold",
                    )
        return RecOr(tuple((t, b if b is not None else RecBot()) for t, b in zip(topes, bodies)))

    def _infer(self, ctx, term):
        u = self._universe
        match term:
            case Var(name):
                found = ctx.lookup(name)
                if found is not None:
                    return term, found[1]
                if name in self.signature:
                    return Global(name), self.signature[name].type
                raise self.fail("E-UNBOUND", f"unbound name {name!r}")
            case Global(name):
                if name not in self.signature:
                    raise self.fail("E-UNBOUND", f"unbound name {name!r}")
                return term, self.signature[name].type
            case Universe(level):
                return term, u(level + 1)
            case CubeUniverse() | TopeUniverse() | UnitType():
                return term, u(0)
            case IntervalCube() | UnitCube():
                return term, CubeUniverse()
            case CubeProduct(a, b):
                return CubeProduct(self.check_cube(ctx, a), self.check_cube(ctx, b)), CubeUniverse()
            case Zero() | One():
                return term, IntervalCube()
            case Star():
                return term, UnitCube()
            case UnitElem():
                return term, UnitType()
            case TopeTop() | TopeBot():
                return term, TopeUniverse()
            case TopeAnd(a, b):
                # The right conjunct need only make sense where the left one holds.
                left = self.check(ctx, a, TopeUniverse())
                right = self.check(ctx.with_tope(to_tope(ctx, left)), b, TopeUniverse())
                return TopeAnd(left, right), TopeUniverse()
            case TopeOr(a, b):
                left = self.check(ctx, a, TopeUniverse())
                right = self.check(ctx, b, TopeUniverse())
                return TopeOr(left, right), TopeUniverse()
            case TopeEq(a, b):
                left, cube = self.infer(ctx, a)
                if not is_cube(ctx, cube):
                    raise self.fail("E-TOPE", f"{show(a)} is not a cube point")
                return TopeEq(left, self.check(ctx, b, cube)), TopeUniverse()
            case TopeLeq(a, b):
                left = self.check(ctx, a, IntervalCube())
                right = self.check(ctx, b, IntervalCube())
                return TopeLeq(left, right), TopeUniverse()
            case ShapeConst(name):
                return term, Pi("t", SHAPE_SORTS[name], TopeUniverse())
            case Times(a, b):
                left, kind = self.infer(ctx, a)
                k = whnf(ctx, kind)
                if isinstance(k, CubeUniverse):
                    return CubeProduct(left, self.check_cube(ctx, b)), CubeUniverse()
                if self._shape_cube(ctx, k) is not None:
                    return self._shape_product(ctx, left, k, b)
                return self.infer(ctx, Sigma("_", a, b))
            case Pi():
                return self._infer_pi(ctx, term)
            case Sigma(name, dom, cod):
                d, i = self.check_type(ctx, dom)
                self._genuine(ctx, d, f"the domain of {show(term)}")
                x = ctx.fresh(name, cod)
                inner = ctx.with_type(x, d)
                c, j = self.check_type(inner, subst1(cod, name, Var(x)))
                self._genuine(inner, c, f"the family of {show(term)}")
                return Sigma(x, d, c), u(max(i, j))
            case Lam(name, body, dom) if dom is not None:
                x = ctx.fresh(name, Lam(name, body))
                d, tope, _, _ = self.binder(ctx, x, dom)
                inner = ctx.bind(x, d, tope)
                b, ty = self.infer(inner, subst1(body, name, Var(x)))
                return Lam(x, b, d), Pi(x, d, ty, tope)
            case App(fn, arg):
                return self._infer_app(ctx, fn, arg)
            case First(p) | Second(p):
                return self._infer_projection(ctx, term, p)
            case IdType(a, b, ambient):
                return self._infer_identity(ctx, a, b, ambient)
            case Refl(t, ambient) if t is not None:
                if ambient is not None:
                    amb, _ = self.check_type(ctx, ambient)
                    e = self.check(ctx, t, amb)
                else:
                    e, amb = self.infer(ctx, t)
                return Refl(e, amb), IdType(e, e, amb)
            case IdJ():
                return self._infer_j(ctx, term)
            case Restrict(base, clauses):
                b, level = self.check_type(ctx, base)
                self._genuine(ctx, b, f"the restricted type {show(base)}")
                checked = self._check_clauses(ctx, clauses, b)
                return Restrict(b, checked), u(level)
            case Pair(a, b):
                left, lt = self.infer(ctx, a)
                right, rt = self.infer(ctx, b)
                if is_cube(ctx, lt) and is_cube(ctx, rt):
                    return Pair(left, right), CubeProduct(lt, rt)
                return Pair(left, right), Sigma("_", lt, rt)
        raise self.fail("E-MISMATCH", f"cannot infer the type of {show(term)}; add an annotation")

    def _shape_cube(self, ctx, kind):
        """The cube of a shape's type `I → TOPE`, else None."""
        if isinstance(kind, Pi) and isinstance(whnf(ctx, kind.cod), TopeUniverse) and is_cube(ctx, kind.dom):
            return kind.dom
        return None

    def _shape_product(self, ctx, left, left_kind, b):
        right, right_kind = self.infer(ctx, b)
        right_kind = whnf(ctx, right_kind)
        j = self._shape_cube(ctx, right_kind)
        if j is None:
            raise self.fail("E-MISMATCH", f"{show(b)} is not a shape")
        cube = CubeProduct(left_kind.dom, j)
        p = ctx.fresh("p", left, right)
        parts = []
        for shape, kind, proj in ((left, left_kind, First(Var(p))), (right, right_kind, Second(Var(p)))):
            tope = App(shape, proj)
            if kind.tope is not None:
                tope = TopeAnd(subst1(kind.tope, kind.name, proj), tope)
            parts.append(tope)
        return Lam(p, TopeAnd(*parts), cube), Pi(p, cube, TopeUniverse())

    def _universe(self, level):
        return Universe(0 if self.options.type_in_type else level)

    def _genuine(self, ctx, ty, what):
        if is_meta(ctx, ty):
            raise self.fail("E-UNIVERSE", f"{what} must be a type, not a cube, tope or shape")

    def check_cube(self, ctx, term):
        elab, kind = self.infer(ctx, term)
        if not isinstance(whnf(ctx, kind), CubeUniverse):
            raise self.fail("E-MISMATCH", f"{show(term)} is not a cube")
        return elab

    def _check_clauses(self, ctx, clauses, ty):
        """Clauses of a restriction: topes, values under them, agreement on overlaps."""
        out = []
        for tope, value in clauses:
            t = self.check(ctx, tope, TopeUniverse())
            branch = ctx.with_tope(to_tope(ctx, t))
            v = RecBot() if branch.inconsistent() else self.check(branch, value, ty)
            out.append((t, v))
        for i, (ti, vi) in enumerate(out):
            for tj, vj in out[i + 1 :]:
                overlap = ctx.with_tope(to_tope(ctx, ti)).with_tope(to_tope(ctx, tj))
                if overlap.inconsistent():
                    continue
                if not def_equal(overlap, ty, vi, vj):
                    raise self.fail(
                        "E-CLAUSE-CONFLICT",
                        f"clauses {show(ti)} and {show(tj)} disagree where both hold",
                    )
        return tuple(out)

    def binder(self, ctx, x, dom):
        """Classify a binder domain: returns (cube or type, tope or None, kind, level)."""
        if isinstance(dom, Lam) and dom.dom is not None:
            cube = self.check_cube(ctx, dom.dom)
            inner = ctx.bind(x, cube)
            tope = self.check(inner, subst1(dom.body, dom.name, Var(x)), TopeUniverse())
            return cube, tope, "shape", 0
        d, kind = self.infer(ctx, dom)
        k = whnf(ctx, kind)
        match k:
            case CubeUniverse():
                return d, None, "cube", 0
            case Universe(level):
                return d, None, "type", level
            case Pi(name, cube, cod, shape) if isinstance(whnf(ctx, cod), TopeUniverse) and is_cube(ctx, cube):
                tope = App(d, Var(x))
                if shape is not None:
                    tope = TopeAnd(subst1(shape, name, Var(x)), tope)
                return cube, tope, "shape", 0
        raise self.fail("E-MISMATCH", f"{show(dom)} is not a type, cube or shape")

    def _infer_pi(self, ctx, term: Pi):
        x = ctx.fresh(term.name, Pi(term.name, Star(), term.cod, term.tope))
        if term.tope is not None:
            d = self.check_cube(ctx, term.dom)
            tope = self.check(ctx.bind(x, d), subst1(term.tope, term.name, Var(x)), TopeUniverse())
            kind, level = "shape", 0
        else:
            d, tope, kind, level = self.binder(ctx, x, term.dom)
        inner = ctx.bind(x, d, tope)
        cod = subst1(term.cod, term.name, Var(x))
        with self.frame("type", cod):
            c, ck = self._infer(inner, cod)
            ck = whnf(inner, ck)
            if not isinstance(ck, Universe):
                raise self.fail("E-UNIVERSE", f"the codomain {show(cod)} is not a type")
        if kind == "type" and not is_meta(ctx, d) and is_meta(inner, c):
            raise self.fail(
                "E-UNIVERSE",
                f"a family over the type {show(d)} cannot produce cubes, topes or shapes",
            )
        return Pi(x, d, c, tope), self._universe(max(level, ck.level))

    def _infer_app(self, ctx, fn, arg):
        f, ft = self.infer(ctx, fn)
        pi = strip_restrict(ctx, ft)
        if not isinstance(pi, Pi):
            raise self.fail("E-MISMATCH", f"{show(fn)} of type {show(ft)} is not a function")
        a = self.check(ctx, arg, pi.dom)
        if pi.tope is not None:
            tope = subst1(pi.tope, pi.name, a)
            if not ctx.entails(to_tope(ctx, tope)):
                raise self.fail("E-TOPE", f"{show(a)} is not known to satisfy {show(tope)}")
        return App(f, a), subst1(pi.cod, pi.name, a)

    def _infer_projection(self, ctx, term, p):
        e, ty = self.infer(ctx, p)
        ty = strip_restrict(ctx, ty)
        is_first = isinstance(term, First)
        match ty:
            case Sigma(name, dom, cod):
                return (First(e), dom) if is_first else (Second(e), subst1(cod, name, First(e)))
            case CubeProduct(a, b):
                return (First(e), a) if is_first else (Second(e), b)
        raise self.fail("E-MISMATCH", f"{show(p)} of type {show(ty)} is not a pair")

    def _infer_identity(self, ctx, a, b, ambient):
        if ambient is not None:
            amb, level = self.check_type(ctx, ambient)
            self._genuine(ctx, amb, f"the type {show(ambient)} of an identity type")
            left, right = self.check(ctx, a, amb), self.check(ctx, b, amb)
            return IdType(left, right, amb), self._universe(level)
        try:
            left, amb = self.infer(ctx, a)
            right = self.check(ctx, b, amb)
        except CheckError as first:
            try:
                right, amb = self.infer(ctx, b)
            except CheckError:
                raise first from None
            left = self.check(ctx, a, amb)
        self._genuine(ctx, amb, f"the type {show(amb)} of an identity type")
        _, level = self.check_type(ctx, amb)
        return IdType(left, right, amb), self._universe(level)

    def _infer_j(self, ctx, term: IdJ):
        A, _ = self.check_type(ctx, term.ambient)
        a = self.check(ctx, term.base, A)
        z = ctx.fresh("z", A, a)
        motive_type = Pi(z, A, Pi("_", IdType(a, Var(z), A), self._universe(MOTIVE_LEVEL)))
        motive = self.check(ctx, term.motive, motive_type)
        case = self.check(ctx, term.case, App(App(motive, a), Refl(a, A)))
        end = self.check(ctx, term.end, A)
        path = self.check(ctx, term.path, IdType(a, end, A))
        return IdJ(A, a, motive, case, end, path), App(App(motive, end), path)

    # subtyping

    def subtype(self, ctx, sub, sup) -> bool:
        """Can a term of type `sub` be used where `sup` is expected?"""
        if alpha_eq(sub, sup):
            return True
        s, t = whnf(ctx, sub), whnf(ctx, sup)
        if isinstance(t, Restrict):
            base, clauses = _restriction_parts(ctx, t)
            return self.subtype(ctx, s, base) and honors(ctx, s, base, clauses)
        if isinstance(s, Restrict):
            return self.subtype(ctx, s.base, t)
        match s, t:
            case Universe(i), Universe(j):
                return i <= j or self.options.type_in_type
            case Pi(), Pi():
                shape_s = s.tope is not None or is_cube(ctx, s.dom)
                shape_t = t.tope is not None or is_cube(ctx, t.dom)
                if shape_s != shape_t or not conv(ctx, s.dom, t.dom):
                    return False
                x = ctx.fresh(s.name, s, t)
                inner = ctx.bind(x, t.dom)
                if shape_s:
                    ts = C.TOP if s.tope is None else to_tope(inner, subst1(s.tope, s.name, Var(x)))
                    tt = C.TOP if t.tope is None else to_tope(inner, subst1(t.tope, t.name, Var(x)))
                    inner = inner.with_tope(tt)
                    if not inner.entails(ts):
                        return False
                return self.subtype(inner, subst1(s.cod, s.name, Var(x)), subst1(t.cod, t.name, Var(x)))
            case Sigma(), Sigma():
                if not conv(ctx, s.dom, t.dom):
                    return False
                x = ctx.fresh(s.name, s, t)
                inner = ctx.with_type(x, s.dom)
                return self.subtype(inner, subst1(s.cod, s.name, Var(x)), subst1(t.cod, t.name, Var(x)))
        return conv(ctx, s, t)

    # declarations

    def telescope(self, ctx, params, rest):
        """Bind declaration parameters; returns (context, binders, rest renamed)."""
        binders = []
        rest = list(rest)
        params = list(params)
        for i, (name, ty) in enumerate(params):
            x = ctx.fresh(name)
            d, tope, _, _ = self.binder(ctx, x, ty)
            if x != name:
                params[i + 1 :] = [(n, subst1(t, name, Var(x))) for n, t in params[i + 1 :]]
                rest = [None if r is None else subst1(r, name, Var(x)) for r in rest]
            ctx = ctx.bind(x, d, tope)
            binders.append((x, d, tope))
        return ctx, binders, rest

    def check_declaration(self, decl):
        """Check one declaration, extending the signature; returns output text or None."""
        ctx = self.context()
        match decl:
            case Definition() | Postulate():
                name, params, ty = decl.name, decl.params, decl.type
                body = getattr(decl, "body", None)
                with self.frame("declaration", name):
                    self._fresh_name(name)
                    inner, binders, (ty, body) = self.telescope(ctx, params, (ty, body))
                    t, _ = self.check_type(inner, ty)
                    full_type = _wrap_pi(binders, t)
                    self.signature[name] = CheckedDeclaration(name, full_type, None)
                    if body is not None:
                        try:
                            b = self.check(inner, body, t)
                        except BaseException:
                            del self.signature[name]
                            raise
                        self.signature[name] = CheckedDeclaration(name, full_type, _wrap_lam(binders, b))
                return None
            case Assumption(names, ty, params):
                with self.frame("declaration", " ".join(names)):
                    inner, _, (ty,) = self.telescope(ctx, params, (ty,))
                    self.check_type(inner, ty)
                return None
            case CheckCommand(term, ty, params):
                with self.frame("declaration", "#check"):
                    inner, _, (term, ty) = self.telescope(ctx, params, (term, ty))
                    t, _ = self.check_type(inner, ty)
                    self.check(inner, term, t)
                return None
            case ComputeCommand(term, params):
                with self.frame("declaration", "#compute"):
                    inner, _, (term,) = self.telescope(ctx, params, (term,))
                    e, _ = self.infer(inner, term)
                    return show(whnf(inner, e))
        raise TypeError(decl)

    def recheck_reduct(self, name):
        """Check the weak-head normal form of a definition body against its type."""
        decl = self.signature[name]
        ctx, ty, body = self.context(), decl.type, decl.body
        with self.frame("declaration", name):
            while isinstance(body, Lam) and isinstance(pi := whnf(ctx, ty), Pi):
                x = ctx.fresh(body.name, body, pi)
                tope = None if pi.tope is None else subst1(pi.tope, pi.name, Var(x))
                ctx = ctx.bind(x, pi.dom, tope)
                ty, body = subst1(pi.cod, pi.name, Var(x)), subst1(body.body, body.name, Var(x))
            self.check(ctx, whnf(ctx, body), ty)

    def _fresh_name(self, name):
        if name in self.signature:
            raise self.fail("E-MISMATCH", f"{name!r} is already defined")


def _wrap_pi(binders, ty):
    for x, d, tope in reversed(binders):
        ty = Pi(x, d, ty, tope)
    return ty


def _wrap_lam(binders, body):
    for x, d, _ in reversed(binders):
        body = Lam(x, body, d)
    return body


def is_meta(ctx, ty) -> bool:
    """Cubes, CUBE, TOPE and functions into them live outside the type layer."""
    w = whnf(ctx, ty)
    match w:
        case CubeUniverse() | TopeUniverse():
            return True
        case Pi(name, dom, cod, tope):
            x = ctx.fresh(name, cod)
            return is_meta(ctx.bind(x, dom), subst1(cod, name, Var(x)))
    return is_cube(ctx, w)


def normalize(ctx, t):
    """Full normal form, reducing under binders."""
    w = whnf(ctx, t)
    match w:
        case Lam(name, body, dom):
            x = ctx.fresh(name, w)
            inner = ctx.bind(x, dom) if dom is not None else ctx.with_type(x, None)
            return Lam(x, normalize(inner, subst1(body, name, Var(x))), dom)
        case Pi(name, dom, cod, tope):
            x = ctx.fresh(name, w)
            inner = ctx.bind(x, dom, None if tope is None else subst1(tope, name, Var(x)))
            t2 = None if tope is None else normalize(inner, subst1(tope, name, Var(x)))
            return Pi(x, normalize(ctx, dom), normalize(inner, subst1(cod, name, Var(x))), t2)
        case Sigma(name, dom, cod):
            x = ctx.fresh(name, w)
            inner = ctx.with_type(x, dom)
            return Sigma(x, normalize(ctx, dom), normalize(inner, subst1(cod, name, Var(x))))
        case App(fn, arg):
            return App(normalize(ctx, fn), normalize(ctx, arg))
        case Pair(a, b) | IdType(a, b, None) | TopeAnd(a, b) | TopeOr(a, b) | TopeEq(a, b) | TopeLeq(a, b) | CubeProduct(a, b):
            return type(w)(normalize(ctx, a), normalize(ctx, b))
        case IdType(a, b, amb):
            return IdType(normalize(ctx, a), normalize(ctx, b), normalize(ctx, amb))
        case First(a) | Second(a):
            return type(w)(normalize(ctx, a))
        case Restrict(base, clauses):
            return Restrict(normalize(ctx, base), tuple((normalize(ctx, p), normalize(ctx, v)) for p, v in clauses))
    return w


@dataclass
class ModuleResult:
    diagnostics: list = field(default_factory=list)
    outputs: list = field(default_factory=list)  # (SourceSpan, text)
    checked: list = field(default_factory=list)  # names


def check_module(module, checker: Checker, file: str) -> ModuleResult:
    """Check every declaration of a parsed module, continuing after errors."""
    result = ModuleResult(list(module.diagnostics))
    for decl, span in module.declarations:
        checker.frames = []
        try:
            output = checker.check_declaration(decl)
        except CheckError as err:
            result.diagnostics.append(Diagnostic(file, span, err.code, err.message, tuple(err.trace)))
            continue
        except RecursionError:
            result.diagnostics.append(
                Diagnostic(file, span, "E-FUEL", "evaluation nested too deeply", tuple(checker.trace()))
            )
            continue
        if output is not None:
            result.outputs.append((span, output))
        if isinstance(decl, (Definition, Postulate)):
            result.checked.append(decl.name)
    return result
