"""Plain-text expression grammar and the sectioned model-file format.

Expression grammar (whitespace-insensitive)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := primary ("^" (INT | "(" "-"? INT ")"))?
    primary := INT | "(" expr ")" | NAME ("[" indices (";" jet)? "]")?
    indices := INT ("," INT)*
    jet     := (("x" INT ("^" INT)?) | INT)*

``x[s]`` is a base coordinate, ``y[1; x1^2 x3]`` a jet coordinate,
``glow[1,2]`` / ``sqrtg`` derived symbols, bare names constants.  A
single-component field may be written without brackets.

Model files are UTF-8 with sections ``[space] [fields] [derived]
[constants] [lagrangian] [generators]``; ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import JetOrderError, JetvarError, ModelError, ParseError
from .jetcalc import GeneratorSpec
from .models import ModelSpec, curvature_symbols, validate_lie_algebra
from .multiindex import MultiIndex
from .symexpr import Expr, FieldDecl, JetContext, metric_symbols, render_text

SECTIONS = ("space", "fields", "derived", "constants", "lagrangian", "generators")

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col0: int = 1) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            out.append(Token("int", m.group(1), line, col0 + start))
        elif m.group(2) is not None:
            out.append(Token("name", m.group(2), line, col0 + start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()[],;":
                raise ParseError(f"unexpected character {ch!r}", line, col0 + start)
            out.append(Token("op", ch, line, col0 + start))
        pos = m.end()
    out.append(Token("end", "", line, col0 + len(text)))
    return out


class _Parser:
    def __init__(self, tokens, ctx: JetContext):
        self.toks, self.i, self.ctx = tokens, 0, ctx

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def eat(self, text=None, kind=None) -> Token:
        t = self.tok
        if (text is not None and t.text != text) or (kind is not None and t.kind != kind):
            want = repr(text) if text is not None else kind
            self.fail(f"expected {want}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def accept(self, text) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expr(self) -> Expr:
        out = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.eat().text
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Expr:
        out = self.unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.eat()
            rhs = self.unary()
            if op.text == "*":
                out = out * rhs
            else:
                try:
                    out = out / rhs
                except (JetvarError, ZeroDivisionError) as exc:
                    self.fail(f"cannot divide: {exc}", op)
        return out

    def unary(self) -> Expr:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            op = self.eat()
            if self.accept("("):
                neg = self.accept("-")
                k = int(self.eat(kind="int").text)
                self.eat(")")
                k = -k if neg else k
            else:
                k = int(self.eat(kind="int").text)
            try:
                base = base ** k
            except (JetvarError, ZeroDivisionError) as exc:
                self.fail(f"invalid power: {exc}", op)
        return base

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Expr.const(int(t.text))
        if self.accept("("):
            e = self.expr()
            self.eat(")")
            return e
        if t.kind == "name":
            self.i += 1
            return self.symbol(t)
        self.fail(f"unexpected {t.text or 'end of input'!r}")

    def int_list(self):
        vals = [int(self.eat(kind="int").text)]
        while self.accept(","):
            vals.append(int(self.eat(kind="int").text))
        return vals

    def jet(self, n, tok) -> MultiIndex:
        counts = [0] * n
        while self.tok.kind != "op" or self.tok.text != "]":
            t = self.tok
            if t.kind == "name" and re.fullmatch(r"x\d+", t.text):
                self.i += 1
                label = int(t.text[1:])
                k = 1
                if self.accept("^"):
                    k = int(self.eat(kind="int").text)
            elif t.kind == "int":
                self.i += 1
                label, k = int(t.text), 1
            else:
                self.fail("expected a base label such as x1 or x2^2")
            if not 1 <= label <= n:
                self.fail(f"base label {label} outside 1..{n}", t)
            counts[label - 1] += k
        return MultiIndex(counts)

    def symbol(self, t: Token) -> Expr:
        ctx, name = self.ctx, t.text
        args, alpha = None, None
        if self.accept("["):
            args = self.int_list() if self.tok.kind == "int" else []
            if self.accept(";"):
                alpha = self.jet(ctx.n, t)
            self.eat("]")
        try:
            if name == "x" and name not in ctx.fields:
                if not args or len(args) != 1 or alpha is not None:
                    self.fail("base coordinate is written x[s]", t)
                return ctx.x(args[0])
            if name in ctx.fields:
                f = ctx.fields[name]
                if not args:
                    if len(f.components) != 1:
                        self.fail(f"field {name} needs component indices", t)
                    args = list(f.components[0])
                return ctx.y(name, tuple(args), alpha)
            if name in ctx.derived:
                if alpha is not None:
                    self.fail(f"derived symbol {name} takes no jet index", t)
                return ctx.derived_sym(name, *(args or ()))
            if name in ctx.constants:
                if args is not None:
                    self.fail(f"constant {name} takes no indices", t)
                return ctx.const(name)
        except ParseError:
            raise
        except JetOrderError as exc:
            raise ModelError(f"{exc} (line {t.line}, column {t.col})") from None
        except JetvarError as exc:
            self.fail(str(exc), t)
        self.fail(f"unknown symbol {name!r}", t)


def parse_expr(text: str, ctx: JetContext, line: int = 1, col: int = 1) -> Expr:
    """Parse an expression in the canonical grammar against ``ctx``."""
    p = _Parser(tokenize(text, line, col), ctx)
    e = p.expr()
    if p.tok.kind != "end":
        p.fail(f"unexpected {p.tok.text!r} after expression")
    return e


# model files --------------------------------------------------------------

def _sections(text: str):
    """Yield ``(section, [(line number, content)])`` in file order."""
    current = None
    out = {}
    order = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = re.fullmatch(r"\s*\[([a-z]+)\]\s*", line)
        if m:
            current = m.group(1)
            if current not in SECTIONS:
                raise ParseError(f"unknown section [{current}]", no, 1)
            if current in out:
                raise ParseError(f"duplicate section [{current}]", no, 1)
            out[current] = []
            order.append(current)
            continue
        if current is None:
            raise ParseError("content before the first section header", no, 1)
        out[current].append((no, line))
    return out


def _field_decl(name, spec, n, no):
    words = spec.split()
    if not words or words[0] not in ("field", "parameter"):
        raise ParseError(f"field {name}: expected 'field' or 'parameter'", no, 1)
    kind = words[0]
    shape = words[1:] or ["scalar"]
    try:
        if shape[0] == "scalar":
            return FieldDecl.scalar(name, int(shape[1]) if len(shape) > 1 else 1, kind)
        if shape[0] == "vector":
            return FieldDecl(name, tuple((m,) for m in range(1, n + 1)), kind)
        if shape[0] == "matrix":
            return FieldDecl.matrix(name, int(shape[1]), n, kind)
        if shape[0] == "symmetric":
            return FieldDecl.symmetric_tensor(name, n, kind)
    except (IndexError, ValueError):
        pass
    raise ParseError(f"field {name}: bad shape {' '.join(shape)!r}", no, 1)


def parse_model(source) -> ModelSpec:
    """Parse a model file (path or text) into a validated ModelSpec."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                     and source.endswith(".model")):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    secs = _sections(text)
    for req in ("space", "fields", "lagrangian"):
        if req not in secs:
            raise ParseError(f"missing section [{req}]")
    space = {}
    for no, line in secs["space"]:
        m = re.fullmatch(r"\s*([a-z_]+)\s*=\s*(\S+)\s*", line)
        if not m:
            raise ParseError("expected 'key = value'", no, 1)
        space[m.group(1)] = (m.group(2), no)
    try:
        n = int(space["n"][0])
    except (KeyError, ValueError):
        raise ModelError("[space] must set an integer n") from None
    max_order = int(space.get("max_order", ("4",))[0])
    model_id = space.get("model", ("custom",))[0]
    metric = space.get("metric", (None,))[0]

    fields = []
    for no, line in secs["fields"]:
        m = re.fullmatch(r"\s*([A-Za-z_]\w*)\s*=\s*(.+)", line)
        if not m:
            raise ParseError("expected 'name = field|parameter shape'", no, 1)
        fields.append(_field_decl(m.group(1), m.group(2), n, no))

    derived = []
    for no, line in secs.get("derived", []):
        words = line.split()
        if len(words) != 2 or words[0] not in ("metric", "curvature"):
            raise ParseError("expected 'metric FIELD' or 'curvature FIELD'", no, 1)
        if not any(f.name == words[1] and f.symmetric for f in fields):
            raise ModelError(f"derived '{line.strip()}': {words[1]} is not a symmetric field")
        derived += metric_symbols(words[1], n) if words[0] == "metric" else curvature_symbols(n, words[1])

    constants, structure, form = [], {}, {}
    for no, line in secs.get("constants", []):
        m = re.fullmatch(r"\s*(structure|form)\[([\d,\s]+)\]\s*=\s*(-?\d+(?:/\d+)?)\s*", line)
        if m:
            idx = tuple(int(v) for v in m.group(2).split(","))
            target = structure if m.group(1) == "structure" else form
            if len(idx) != (3 if m.group(1) == "structure" else 2):
                raise ParseError(f"{m.group(1)} takes {3 if m.group(1) == 'structure' else 2} indices", no, 1)
            target[idx] = Fraction(m.group(3))
            continue
        m = re.fullmatch(r"\s*([A-Za-z_]\w*)\s*", line)
        if not m:
            raise ParseError("expected a constant name or structure/form entry", no, 1)
        constants.append(m.group(1))
    if structure or form:
        dim = max(max(k) for k in list(structure) + list(form))
        validate_lie_algebra(dim, structure, form or {(i, i): 1 for i in range(1, dim + 1)})

    try:
        ctx = JetContext(n, fields, max_order, derived, constants, metric)
    except JetvarError as exc:
        raise ModelError(f"[space]/[fields]: {exc}") from None

    lag_lines = secs["lagrangian"]
    L = _parse_block(lag_lines, ctx, "lagrangian")

    generators = {}
    current = None
    for no, line in secs.get("generators", []):
        if not line.startswith((" ", "\t")):
            m = re.fullmatch(r"([A-Za-z_]\w*)\s*:\s*(projectable|vertical|gauge-natural-lift)"
                             r"(?:\s+params\s+([\w\s]+))?\s*", line)
            if not m:
                raise ParseError("expected 'NAME: KIND [params P ...]'", no, 1)
            params = tuple(m.group(3).split()) if m.group(3) else ()
            for p in params:
                if p not in ctx.fields or ctx.fields[p].kind != "parameter":
                    raise ModelError(f"generator {m.group(1)}: {p} is not a parameter field")
            current = {"name": m.group(1), "kind": m.group(2), "params": params,
                       "base": [Expr() for _ in range(n)], "fiber": {}}
            generators[m.group(1)] = current
            continue
        if current is None:
            raise ParseError("generator component before a generator header", no, 1)
        m = re.fullmatch(r"(\s*)([A-Za-z_]\w*)\[([\d,\s]+)\]\s*=\s*(.+)", line)
        if not m:
            raise ParseError("expected 'base[s] = expr' or 'FIELD[comp] = expr'", no, 1)
        col = line.index("=") + 2
        value = _check(parse_expr(m.group(4), ctx, no, col), ctx, f"generator {current['name']}")
        idx = tuple(int(v) for v in m.group(3).split(","))
        if m.group(2) == "base":
            if len(idx) != 1 or not 1 <= idx[0] <= n:
                raise ModelError(f"generator {current['name']}: bad base index {idx}")
            current["base"][idx[0] - 1] = value
        else:
            f = ctx.fields.get(m.group(2))
            if f is None or f.kind != "field":
                raise ModelError(f"generator {current['name']}: unknown field {m.group(2)}")
            try:
                comp = f.canonical_comp(idx)
            except JetvarError as exc:
                raise ModelError(f"generator {current['name']}: {exc}") from None
            current["fiber"][(f.name, comp)] = value
    gens = {}
    for name, g in generators.items():
        try:
            gens[name] = GeneratorSpec(tuple(g["base"]), g["fiber"], g["params"], g["kind"], name)
        except JetvarError as exc:
            raise ModelError(f"generator {name}: {exc}") from None
    return ModelSpec(model_id, n, ctx, L, gens, structure, form)


def _check(e: Expr, ctx: JetContext, where: str) -> Expr:
    try:
        return ctx.check_expr(e)
    except JetvarError as exc:
        raise ModelError(f"{where}: {exc}") from None


def _parse_block(lines, ctx, where) -> Expr:
    if not lines:
        raise ModelError(f"[{where}] is empty")
    out = Expr()
    for no, line in lines:
        stripped = line.strip()
        if stripped[0] not in "+-":
            stripped = "+ " + stripped
        out = out + parse_expr(stripped, ctx, no, len(line) - len(stripped) + 1)
    return _check(out, ctx, where)


def _field_shape(f: FieldDecl, n: int) -> str:
    if f.symmetric:
        return "symmetric"
    if all(len(c) == 1 for c in f.components):
        return "scalar" if len(f.components) == 1 else f"scalar {len(f.components)}"
    rows = max(c[0] for c in f.components)
    return f"matrix {rows}"


def _fmt(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_block(e: Expr, indent: str = "  ") -> list:
    """One term per line; lines after the first begin with their sign."""
    text = render_text(e)
    if text == "0":
        return [indent + "0"]
    parts = re.split(r" (?=[+-] )", text)
    return [indent + p for p in parts]


def render_model(model: ModelSpec) -> str:
    """Canonical text for a model; parse_model(render_model(m)) reproduces m."""
    ctx = model.ctx
    lines = ["[space]", f"model = {model.id}", f"n = {ctx.n}", f"max_order = {ctx.max_order}"]
    if ctx.metric is not None:
        lines.append(f"metric = {ctx.metric}")
    lines += ["", "[fields]"]
    for f in ctx.fields.values():
        lines.append(f"{f.name} = {f.kind} {_field_shape(f, ctx.n)}")
    if ctx.derived:
        lines += ["", "[derived]"]
        if "glow" in ctx.derived:
            lines.append(f"metric {ctx.metric or 'g'}")
        if "Gamma" in ctx.derived:
            lines.append(f"curvature {ctx.metric or 'g'}")
    if ctx.constants or model.structure_constants or model.invariant_form:
        lines += ["", "[constants]"]
        lines += list(ctx.constants)
        for k, v in sorted(model.structure_constants.items()):
            lines.append(f"structure[{','.join(map(str, k))}] = {_fmt(v)}")
        for k, v in sorted(model.invariant_form.items()):
            lines.append(f"form[{','.join(map(str, k))}] = {_fmt(v)}")
    lines += ["", "[lagrangian]"] + render_block(model.lagrangian)
    if model.generators:
        lines += ["", "[generators]"]
        for name in sorted(model.generators):
            g = model.generators[name]
            head = f"{name}: {g.kind}"
            if g.params:
                head += " params " + " ".join(g.params)
            lines.append(head)
            for s, b in enumerate(g.base, start=1):
                if b.terms:
                    lines.append(f"  base[{s}] = {render_text(b)}")
            for (fname, comp), v in sorted(g.fiber.items()):
                if v.terms:
                    lines.append(f"  {fname}[{','.join(map(str, comp))}] = {render_text(v)}")
    return "\n".join(lines) + "\n"
