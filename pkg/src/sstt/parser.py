"""Literate extraction, lexing and parsing of rzk-1 style modules."""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, ParseError, SourceSpan
from .terms import (
    App,
    Assumption,
    CheckCommand,
    ComputeCommand,
    CubeUniverse,
    Definition,
    First,
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
    fresh_name,
    free_vars,
    subst,
)

LANGUAGE = "rzk-1"

# Literate extraction


@dataclass(frozen=True)
class Segment:
    text: str
    span: SourceSpan


def extract_literate_blocks(text: str, is_markdown: bool, file: str = "<input>") -> list:
    lines = text.split("\n")
    if not is_markdown:
        last = len(lines)
        return [Segment(text, SourceSpan(file, 1, 1, last, len(lines[-1]) + 1))]
    segments = []
    i = 0
    while i < len(lines):
        if lines[i].rstrip() == "```rzk":
            start = i
            i += 1
            while i < len(lines) and lines[i].strip() != "```":
                i += 1
            if i == len(lines):
                raise ParseError("unterminated ```rzk fence", start + 1, 1)
            body = lines[start + 1 : i]
            first = start + 2
            last = max(first, i)
            span = SourceSpan(file, first, 1, last, len(lines[last - 1]) + 1 if body else 1)
            segments.append(Segment("\n".join(body), span))
        i += 1
    return segments


# Lexing


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "sym", "directive", "eof"
    text: str
    line: int
    col: int
    end_line: int
    end_col: int


SYMBOLS = [
    ":=", "|->", "↦", "->", "→", "===", "≡", "<=", "≤", "/\\", "∧", "\\/", "∨",
    "=_{", "=", "×", "\\", "(", ")", "[", "]", "{", "}", ",", ":", "|", "⊤", "⊥", "⋆",
]
SYMBOL_ALIASES = {"|->": "↦", "->": "→", "===": "≡", "<=": "≤", "/\\": "∧", "\\/": "∨"}
IDENT_EXTRA = set("-_'?!∂") | set("₀₁₂₃₄₅₆₇₈₉⁰¹²³⁴⁵⁶⁷⁸⁹")


def _ident_char(ch):
    return ch.isalnum() or ch in IDENT_EXTRA


def tokenize(text: str, line: int = 1, col: int = 1) -> list:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "#":
            j = i + 1
            while j < n and _ident_char(text[j]):
                j += 1
            tokens.append(Token("directive", text[i:j], line, col, line, col + j - i))
            col += j - i
            i = j
            continue
        if _ident_char(ch) and ch != "-":
            j = i
            while j < n and _ident_char(text[j]) and not text.startswith("->", j):
                j += 1
            word = text[i:j]
            if word == "refl_" and j < n and text[j] == "{":
                j += 1
                word = "refl_{"
                tokens.append(Token("sym", word, line, col, line, col + j - i))
            elif word == "Σ":
                tokens.append(Token("sym", word, line, col, line, col + 1))
            else:
                tokens.append(Token("ident", word, line, col, line, col + j - i))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("sym", SYMBOL_ALIASES.get(sym, sym), line, col, line, col + len(sym)))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col, line, col))
    return tokens


# Surface keywords

VERTICES = {"0_2": Zero(), "0₂": Zero(), "02": Zero(), "1_2": One(), "1₂": One(), "12": One()}
SHAPES = {
    "Δ¹": "Δ¹", "Δ1": "Δ¹", "Δ²": "Δ²", "Δ2": "Δ²", "Δ³": "Δ³", "Δ3": "Δ³",
    "∂Δ¹": "∂Δ¹", "∂Δ1": "∂Δ¹", "∂Δ²": "∂Δ²", "∂Δ2": "∂Δ²", "Λ": "Λ",
}
CONSTANTS = {
    "U": Universe(0), "U₁": Universe(1), "CUBE": CubeUniverse(), "TOPE": TopeUniverse(),
    "Unit": UnitType(), "unit": UnitElem(), "recBOT": RecBot(), "refl": Refl(),
    "TOP": TopeTop(), "BOT": TopeBot(), "2": IntervalCube(), "1": UnitCube(),
    "*_1": Star(),
}
SYMBOL_CONSTANTS = {"⊤": TopeTop(), "⊥": TopeBot(), "⋆": Star()}
RESERVED = {"first", "second", "idJ", "recOR", "_"} | set(CONSTANTS) | set(VERTICES) | set(SHAPES)


def constant(word):
    if word in CONSTANTS:
        return CONSTANTS[word]
    if word in VERTICES:
        return VERTICES[word]
    if word in SHAPES:
        return ShapeConst(SHAPES[word])
    return None


# Patterns: a binder is a name or a nested tuple of names.


def _pattern_names(pat):
    return [pat] if isinstance(pat, str) else _pattern_names(pat[0]) + _pattern_names(pat[1])


def _pattern_map(pat, root):
    if isinstance(pat, str):
        return {} if pat == "_" else {pat: root}
    return {**_pattern_map(pat[0], First(root)), **_pattern_map(pat[1], Second(root))}


def _pattern_var(pat, *scopes):
    if isinstance(pat, str):
        return pat, {}
    avoid = set(_pattern_names(pat))
    for s in scopes:
        avoid |= free_vars(s)
    name = fresh_name("p", avoid)
    return name, _pattern_map(pat, Var(name))


class Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    # token helpers

    @property
    def peek(self) -> Token:
        return self.tokens[self.pos]

    def at(self, text, offset=0):
        t = self.tokens[self.pos + offset] if self.pos + offset < len(self.tokens) else self.tokens[-1]
        return t.kind in ("sym", "ident") and t.text == text

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message, tok=None):
        tok = tok or self.peek
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.col, tok.end_line, tok.end_col)

    def expect(self, text) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def ident(self) -> str:
        t = self.peek
        if t.kind != "ident" or (t.text in RESERVED and t.text != "_"):
            raise self.error("expected a name")
        return self.advance().text

    # binders

    def pattern(self):
        if self.at("("):
            self.advance()
            left = self.pattern()
            self.expect(",")
            right = self.pattern()
            while self.at(","):
                self.advance()
                left, right = (left, right), self.pattern()
            self.expect(")")
            return (left, right)
        return self.ident()

    def try_binder_group(self):
        """`( x y : A )` or `( (t , s) : I )`; None (position restored) otherwise."""
        start = self.pos
        if not self.at("("):
            return None
        self.advance()
        pats = []
        try:
            while not self.at(":"):
                if self.at("(") or self.peek.kind == "ident":
                    pats.append(self.pattern())
                else:
                    raise self.error("expected a binder")
            if not pats:
                raise self.error("expected a binder")
        except ParseError:
            self.pos = start
            return None
        self.advance()
        ty = self.expr()
        self.expect(")")
        return pats, ty

    def try_shape_group(self):
        """`{ t : I | φ }`; None (position restored) otherwise."""
        if not self.at("{"):
            return None
        self.advance()
        pat = self.pattern()
        self.expect(":")
        cube = self.expr()
        self.expect("|")
        tope = self.expr()
        self.expect("}")
        return pat, cube, tope

    # expressions

    def expr(self):
        if self.at("\\"):
            return self.lam()
        if self.at("Σ"):
            return self.sigma()
        start = self.pos
        group = self.try_binder_group()
        if group is not None:
            if self.at("→"):
                self.advance()
                return self._pis(group, self.expr())
            self.pos = start
        shape = self.try_shape_group()
        if shape is not None:
            self.expect("→")
            pat, cube, tope = shape
            cod = self.expr()
            name, mapping = _pattern_var(pat, cod, tope)
            return Pi(name, cube, subst(cod, mapping), subst(tope, mapping))
        left = self.equality()
        if self.at("→"):
            self.advance()
            return Pi("_", left, self.expr())
        return left

    def _pis(self, group, cod):
        pats, ty = group
        for pat in reversed(pats):
            name, mapping = _pattern_var(pat, cod)
            cod = Pi(name, ty, subst(cod, mapping))
        return cod

    def lam(self):
        self.expect("\\")
        binders = []
        while not self.at("→"):
            if self.at("("):
                group = self.try_binder_group()
                if group is not None:
                    pats, ty = group
                    binders += [(p, ty) for p in pats]
                    continue
                binders.append((self.pattern(), None))
            elif self.peek.kind == "ident":
                binders.append((self.ident(), None))
            else:
                raise self.error("expected a lambda binder or '→'")
        if not binders:
            raise self.error("expected a lambda binder")
        self.expect("→")
        body = self.expr()
        for pat, ty in reversed(binders):
            name, mapping = _pattern_var(pat, body)
            body = Lam(name, subst(body, mapping), ty)
        return body

    def sigma(self):
        self.expect("Σ")
        group = self.try_binder_group()
        if group is None:
            raise self.error("expected '( x : A )' after Σ")
        self.expect(",")
        cod = self.expr()
        pats, ty = group
        for pat in reversed(pats):
            name, mapping = _pattern_var(pat, cod)
            cod = Sigma(name, ty, subst(cod, mapping))
        return cod

    def equality(self):
        left = self.product()
        if self.at("="):
            self.advance()
            return IdType(left, self.product())
        if self.at("=_{"):
            self.advance()
            ambient = self.expr()
            self.expect("}")
            return IdType(left, self.product(), ambient)
        return left

    def product(self):
        left = self.disjunction()
        while self.at("×"):
            self.advance()
            left = Times(left, self.disjunction())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.at("∨"):
            self.advance()
            left = TopeOr(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.comparison()
        while self.at("∧"):
            self.advance()
            left = TopeAnd(left, self.comparison())
        return left

    def comparison(self):
        left = self.postfix()
        if self.at("≡"):
            self.advance()
            return TopeEq(left, self.postfix())
        if self.at("≤"):
            self.advance()
            return TopeLeq(left, self.postfix())
        return left

    def postfix(self):
        term = self.application()
        while self.at("["):
            self.advance()
            term = Restrict(term, self.clauses("]"))
        return term

    def clauses(self, close):
        out = []
        while True:
            tope = self.expr()
            self.expect("↦")
            out.append((tope, self.expr()))
            if self.at(","):
                self.advance()
                continue
            self.expect(close)
            return tuple(out)

    def starts_atom(self):
        t = self.peek
        if t.kind == "ident":
            return True
        return t.kind == "sym" and t.text in ("(", "refl_{", "⊤", "⊥", "⋆")

    def application(self):
        if not self.starts_atom():
            raise self.error("expected an expression")
        head = self.atom_or_projection()
        while self.starts_atom():
            head = App(head, self.atom())
        return head

    def atom_or_projection(self):
        if self.at("first") or self.at("second"):
            word = self.advance().text
            arg = self.atom()
            return First(arg) if word == "first" else Second(arg)
        return self.atom()

    def atom(self):
        t = self.peek
        if t.kind == "sym":
            if t.text == "(":
                self.advance()
                first = self.expr()
                items = [first]
                while self.at(","):
                    self.advance()
                    items.append(self.expr())
                self.expect(")")
                out = items[0]
                for item in items[1:]:
                    out = Pair(out, item)
                return out
            if t.text == "refl_{":
                self.advance()
                term = self.expr()
                ambient = None
                if self.at(":"):
                    self.advance()
                    ambient = self.expr()
                self.expect("}")
                return Refl(term, ambient)
            if t.text in SYMBOL_CONSTANTS:
                self.advance()
                return SYMBOL_CONSTANTS[t.text]
            raise self.error("expected an expression")
        if t.kind != "ident":
            raise self.error("expected an expression")
        word = t.text
        if word == "idJ":
            self.advance()
            self.expect("(")
            args = [self.expr()]
            while self.at(","):
                self.advance()
                args.append(self.expr())
            close = self.expect(")")
            if len(args) != 6:
                raise self.error(f"idJ takes 6 arguments, got {len(args)}", close)
            return IdJ(*args)
        if word == "recOR":
            self.advance()
            self.expect("(")
            return RecOr(self.clauses(")"))
        if word in ("first", "second"):
            raise self.error(f"'{word}' needs an argument")
        value = constant(word)
        if value is not None:
            self.advance()
            return value
        return Var(self.ident())

    # declarations

    def params(self):
        out = []
        while True:
            group = self.try_binder_group()
            if group is not None:
                pats, ty = group
                for pat in pats:
                    out.append((pat, ty))
                continue
            shape = self.try_shape_group()
            if shape is not None:
                pat, cube, tope = shape
                out.append((pat, ("shape", cube, tope)))
                continue
            return out


def _desugar_params(raw, rest):
    """Turn pattern parameters into plain names; `rest` are the later terms."""
    params = []
    rest = list(rest)
    for i, (pat, ty) in enumerate(raw):
        scopes = [t for t in rest if t is not None]
        later = [p[1] for p in raw[i + 1 :]]
        for entry in later:
            if isinstance(entry, tuple):
                scopes += [entry[1], entry[2]]
            else:
                scopes.append(entry)
        name, mapping = _pattern_var(pat, *scopes)
        if isinstance(ty, tuple):
            _, cube, tope = ty
            ty = Lam(name, subst(tope, mapping), cube)
        params.append((name, ty))
        if mapping:
            rest = [subst(t, mapping) if t is not None else None for t in rest]
            raw = raw[: i + 1] + [(p, _subst_entry(e, mapping)) for p, e in raw[i + 1 :]]
    return params, rest


def _subst_entry(entry, mapping):
    if isinstance(entry, tuple):
        return (entry[0], subst(entry[1], mapping), subst(entry[2], mapping))
    return subst(entry, mapping)


@dataclass
class RawModule:
    language: str | None
    declarations: list = field(default_factory=list)  # of (Declaration, SourceSpan)
    diagnostics: list = field(default_factory=list)


def _chunks(tokens):
    """Split a token stream at directives."""
    chunks, current = [], []
    for t in tokens:
        if t.kind == "directive" and current:
            chunks.append(current)
            current = []
        if t.kind != "eof":
            current.append(t)
    if current:
        chunks.append(current)
    return chunks


def parse_module(segments, file: str = "<input>") -> RawModule:
    module = RawModule(None)
    tokens = []
    try:
        for seg in segments:
            tokens += tokenize(seg.text, seg.span.start_line, 1)[:-1]
    except ParseError as err:
        module.diagnostics.append(_parse_diag(file, err))
        return module
    chunks = _chunks(tokens)
    ambient = []
    for chunk in chunks:
        head = chunk[0]
        span = SourceSpan(file, head.line, head.col, chunk[-1].end_line, chunk[-1].end_col)
        if head.kind != "directive":
            module.diagnostics.append(
                Diagnostic(file, span, "E-PARSE", f"expected a directive, found {head.text!r}", ())
            )
            continue
        if module.language is None and head.text != "#lang":
            module.diagnostics.append(
                Diagnostic(file, span, "E-PARSE", "missing language header", ())
            )
            return module
        eof = Token("eof", "", chunk[-1].end_line, chunk[-1].end_col, chunk[-1].end_line, chunk[-1].end_col)
        p = Parser(chunk[1:] + [eof])
        try:
            decl = _directive(p, head, module, ambient)
            if p.peek.kind != "eof":
                raise p.error("unexpected input after declaration")
        except ParseError as err:
            module.diagnostics.append(_parse_diag(file, err))
            if module.language is None:
                return module
            continue
        if decl is not None:
            module.declarations.append((decl, span))
    if module.language is None and not module.diagnostics:
        end = tokens[-1] if tokens else None
        span = SourceSpan(file, 1, 1, end.end_line if end else 1, end.end_col if end else 1)
        module.diagnostics.append(Diagnostic(file, span, "E-PARSE", "missing language header", ()))
    return module


def _parse_diag(file, err: ParseError):
    span = SourceSpan(file, err.line, err.col, max(err.line, err.end_line), err.end_col if err.end_line >= err.line else err.col)
    return Diagnostic(file, span, "E-PARSE", err.message, ())


def _directive(p: Parser, head: Token, module: RawModule, ambient: list):
    match head.text:
        case "#lang":
            if module.language is not None:
                raise p.error("duplicate #lang", head)
            version = p.advance()
            if version.kind != "ident":
                raise p.error("expected a language version", version)
            if version.text != LANGUAGE:
                raise ParseError(f"unsupported language version {version.text!r}", version.line, version.col, version.end_line, version.end_col)
            module.language = version.text
            return None
        case "#def" | "#define" | "#postulate":
            name = p.ident()
            raw = p.params()
            p.expect(":")
            ty = p.expr()
            body = None
            if head.text != "#postulate":
                p.expect(":=")
                body = p.expr()
            params, (ty, body) = _desugar_params(raw, [ty, body])
            params = _used_ambient(ambient, params, (ty, body)) + tuple(params)
            if body is None:
                return Postulate(name, params, ty)
            return Definition(name, params, ty, body)
        case "#assume" | "#variable" | "#variables":
            names = []
            while not p.at(":"):
                names.append(p.ident())
            if not names:
                raise p.error("expected a name")
            p.expect(":")
            ty = p.expr()
            decl = Assumption(tuple(names), ty, tuple(ambient))
            ambient.extend((n, ty) for n in names)
            return decl
        case "#check":
            term = p.expr()
            p.expect(":")
            ty = p.expr()
            return CheckCommand(term, ty, _used_ambient(ambient, (), (term, ty)))
        case "#compute" | "#compute-whnf":
            term = p.expr()
            return ComputeCommand(term, _used_ambient(ambient, (), (term,)))
        case "#section":
            if p.peek.kind == "ident":
                p.advance()
            return None
        case "#end":
            if p.peek.kind == "ident":
                p.advance()
            ambient.clear()
            return None
    raise p.error("unknown directive", head)


def _used_ambient(ambient, params, terms):
    """The section variables a declaration mentions, closed under dependency."""
    needed = set()
    for t in terms:
        needed |= free_vars(t)
    for _, ty in params:
        needed |= free_vars(ty)
    kept = []
    for name, ty in reversed(ambient):
        if name in needed:
            kept.append((name, ty))
            needed |= free_vars(ty)
    return tuple(reversed(kept))


def parse_text(text: str, file: str = "<input>", is_markdown: bool | None = None) -> RawModule:
    if is_markdown is None:
        is_markdown = file.endswith(".md")
    try:
        segments = extract_literate_blocks(text, is_markdown, file)
    except ParseError as err:
        module = RawModule(None)
        module.diagnostics.append(_parse_diag(file, err))
        return module
    return parse_module(segments, file)


def parse_term(text: str):
    """Parse a single expression (used by tests and the `solve` command)."""
    p = Parser(tokenize(text))
    term = p.expr()
    if p.peek.kind != "eof":
        raise p.error("unexpected input after expression")
    return term


def parse_declarations(text: str):
    """Parse directives without requiring a header; raises on the first error."""
    module = parse_module([Segment(f"#lang {LANGUAGE}\n" + text, SourceSpan("<input>", 0, 1, 0, 1))])
    if module.diagnostics:
        d = module.diagnostics[0]
        raise ParseError(d.message, d.span.start_line, d.span.start_col)
    return [decl for decl, _ in module.declarations]
