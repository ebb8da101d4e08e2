"""Unicode pretty-printer whose output the parser reads back."""

from __future__ import annotations

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
    free_vars,
)

# Precedence levels: larger binds tighter.
BINDER, EQUALITY, PRODUCT, OR, AND, COMPARE, POSTFIX, APP, ATOM = range(9)

SUBSCRIPTS = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")


def show(t) -> str:
    return _show(t, BINDER)


def _paren(text, own, prec):
    return f"({text})" if own < prec else text


def _clauses(clauses):
    return " , ".join(f"{_show(tope, BINDER)} ↦ {_show(body, BINDER)}" for tope, body in clauses)


def _shape_binder(t: Pi):
    """`(x : S)` when the tope is just the shape S applied to the binder."""
    tope = t.tope
    if isinstance(tope, App) and tope.arg == Var(t.name) and t.name not in free_vars(tope.fn):
        return f"({t.name} : {_show(tope.fn, BINDER)})"
    return f"{{{t.name} : {_show(t.dom, BINDER)} | {_show(tope, BINDER)}}}"


def _show(t, prec) -> str:
    match t:
        case Var(name) | Global(name) | ShapeConst(name):
            return name
        case Universe(0):
            return "U"
        case Universe(level):
            return "U" + str(level).translate(SUBSCRIPTS)
        case CubeUniverse():
            return "CUBE"
        case TopeUniverse():
            return "TOPE"
        case UnitCube():
            return "1"
        case IntervalCube():
            return "2"
        case Star():
            return "⋆"
        case Zero():
            return "0₂"
        case One():
            return "1₂"
        case TopeTop():
            return "⊤"
        case TopeBot():
            return "⊥"
        case UnitType():
            return "Unit"
        case UnitElem():
            return "unit"
        case RecBot():
            return "recBOT"
        case CubeProduct(a, b) | Times(a, b):
            return _paren(f"{_show(a, PRODUCT)} × {_show(b, AND)}", PRODUCT, prec)
        case TopeOr(a, b):
            return _paren(f"{_show(a, OR)} ∨ {_show(b, AND)}", OR, prec)
        case TopeAnd(a, b):
            return _paren(f"{_show(a, AND)} ∧ {_show(b, COMPARE)}", AND, prec)
        case TopeEq(a, b):
            return _paren(f"{_show(a, APP)} ≡ {_show(b, APP)}", COMPARE, prec)
        case TopeLeq(a, b):
            return _paren(f"{_show(a, APP)} ≤ {_show(b, APP)}", COMPARE, prec)
        case IdType(a, b, None):
            return _paren(f"{_show(a, PRODUCT)} = {_show(b, PRODUCT)}", EQUALITY, prec)
        case IdType(a, b, ambient):
            text = f"{_show(a, PRODUCT)} =_{{{_show(ambient, BINDER)}}} {_show(b, PRODUCT)}"
            return _paren(text, EQUALITY, prec)
        case Pi(name, dom, cod, tope):
            if tope is not None:
                head = _shape_binder(t)
                if head.startswith("(") and name not in free_vars(cod):
                    head = _show(t.tope.fn, EQUALITY)
            elif name == "_" or name not in free_vars(cod):
                head = _show(dom, EQUALITY)
            else:
                head = f"({name} : {_show(dom, BINDER)})"
            return _paren(f"{head} → {_show(cod, BINDER)}", BINDER, prec)
        case Sigma(name, dom, cod):
            return _paren(f"Σ ({name} : {_show(dom, BINDER)}) , {_show(cod, BINDER)}", BINDER, prec)
        case Lam():
            names = []
            while isinstance(t, Lam):
                if t.dom is None:
                    names.append(t.name)
                else:
                    names.append(f"({t.name} : {_show(t.dom, BINDER)})")
                t = t.body
            return _paren(f"\\ {' '.join(names)} → {_show(t, BINDER)}", BINDER, prec)
        case App(fn, arg):
            return _paren(f"{_show(fn, APP)} {_show(arg, ATOM)}", APP, prec)
        case First(arg):
            return _paren(f"first {_show(arg, ATOM)}", APP, prec)
        case Second(arg):
            return _paren(f"second {_show(arg, ATOM)}", APP, prec)
        case Restrict(base, clauses):
            return _paren(f"{_show(base, POSTFIX)} [{_clauses(clauses)}]", POSTFIX, prec)
        case Pair(a, b):
            return f"({_show(a, BINDER)} , {_show(b, BINDER)})"
        case Refl(None, None):
            return "refl"
        case Refl(term, None):
            return f"refl_{{{_show(term, BINDER)}}}"
        case Refl(term, ambient):
            return f"refl_{{{_show(term, BINDER)} : {_show(ambient, BINDER)}}}"
        case IdJ():
            args = (t.ambient, t.base, t.motive, t.case, t.end, t.path)
            return "idJ (" + " , ".join(_show(a, BINDER) for a in args) + ")"
        case RecOr(clauses):
            return f"recOR ({_clauses(clauses)})"
    raise TypeError(f"cannot print {t!r}")


def show_param(name, ty) -> str:
    # A shape parameter is stored as its tope function `\ (t : I) → φ`.
    if isinstance(ty, Lam) and ty.dom is not None and ty.name == name:
        return f"{{{name} : {show(ty.dom)} | {show(ty.body)}}}"
    return f"({name} : {show(ty)})"


def show_params(params) -> str:
    return " ".join(show_param(name, ty) for name, ty in params)


def show_declaration(d) -> str:
    match d:
        case Definition(name, params, ty, body):
            head = f"#def {name} {show_params(params)}".rstrip()
            return f"{head}\n  : {show(ty)}\n  := {show(body)}"
        case Postulate(name, params, ty):
            head = f"#postulate {name} {show_params(params)}".rstrip()
            return f"{head}\n  : {show(ty)}"
        case Assumption(names, ty):
            return f"#assume {' '.join(names)} : {show(ty)}"
        case CheckCommand(term, ty):
            return f"#check {show(term)} : {show(ty)}"
        case ComputeCommand(term):
            return f"#compute {show(term)}"
    raise TypeError(f"cannot print {d!r}")
