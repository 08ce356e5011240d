"""Command reports and their text / LaTeX / JSON renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .symexpr import Expr, render_text

SCHEMA = "jetvar-report/1"

_GREEK = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa",
          "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau", "phi", "chi", "psi", "omega"}


def _latex_name(name: str) -> str:
    head, _, tail = name.partition("_")
    base = f"\\{head}" if head in _GREEK else (head if len(head) == 1 else f"\\mathrm{{{head}}}")
    return f"{base}_{{{tail}}}" if tail else base


def latex_atom(a) -> str:
    kind = a[0]
    if kind == "x":
        return f"x^{{{a[1]}}}"
    if kind == "c":
        return _latex_name(a[1])
    if kind == "d":
        name, args = a[1], a[2]
        idx = "".join(map(str, args))
        if name == "sqrtg":
            return "\\sqrt{|g|}"
        if name == "glow":
            return f"g_{{{idx}}}"
        if name == "Gamma":
            return f"\\Gamma^{{{args[0]}}}_{{{args[1]}{args[2]}}}"
        if name == "dGamma":
            return f"\\Gamma^{{{args[0]}}}_{{{args[1]}{args[2]},{args[3]}}}"
        if name == "Ric":
            return f"R_{{{idx}}}"
        return _latex_name(name) + (f"_{{{idx}}}" if idx else "")
    comp = "".join(map(str, a[2]))
    out = f"{_latex_name(a[1])}^{{{comp}}}"
    if a[3].order:
        out += "_{," + "".join(map(str, a[3].labels())) + "}"
    return out


def render_latex(e: Expr) -> str:
    if not e.terms:
        return "0"
    from .symexpr import mono_key
    parts = []
    for mono in sorted(e.terms, key=mono_key):
        c = Fraction(e.terms[mono])
        sign = "-" if c < 0 else "+"
        c = abs(c)
        factors = []
        for a, k in mono:
            s = latex_atom(a)
            factors.append(s if k == 1 else f"{{{s}}}^{{{k}}}")
        body = " ".join(factors)
        if c.denominator != 1:
            coeff = f"\\frac{{{c.numerator}}}{{{c.denominator}}}"
        else:
            coeff = "" if c == 1 and body else str(c.numerator)
        term = f"{coeff} {body}".strip()
        parts.append((sign, term))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += f" {sign} {term}"
    return out


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    command: str
    model: str
    digest: str
    generator: str | None
    seed: int
    sections: list = field(default_factory=list)  # (title, [(key, Expr | str)])
    info: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, title: str, rows) -> None:
        self.sections.append((title, list(rows)))

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))


def _value_text(v) -> str:
    return render_text(v) if isinstance(v, Expr) else str(v)


def render_report(rep: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return render_json(rep)
    if fmt == "latex":
        return render_latex_document(rep)
    lines = [f"jetvar {rep.command} {rep.model}" + (f" --gen {rep.generator}" if rep.generator else ""),
             f"input sha256: {rep.digest}", f"seed: {rep.seed}"]
    for title, rows in rep.sections:
        lines.append(f"== {title} ==")
        if not rows:
            lines.append("(none)")
        for key, v in rows:
            lines.append(f"{key} = {_value_text(v)}")
    if rep.info:
        lines.append("== info ==")
        for k, v in rep.info.items():
            lines.append(f"{k}: {v}")
    lines.append("== verification ==")
    for c in rep.checks:
        lines.append(f"[{'pass' if c.passed else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail else ""))
    lines.append(f"status: {'pass' if rep.passed else 'fail'}")
    return "\n".join(lines) + "\n"


def render_json(rep: Report) -> str:
    doc = {
        "schema": SCHEMA,
        "command": rep.command,
        "model": rep.model,
        "input_digest": rep.digest,
        "generator": rep.generator,
        "seed": rep.seed,
        "results": {title: {key: _value_text(v) for key, v in rows} for title, rows in rep.sections},
        "info": {k: (v if isinstance(v, (bool, int, str)) or v is None else str(v)) for k, v in rep.info.items()},
        "verification": [{"check": c.name, "status": "pass" if c.passed else "fail", "detail": c.detail}
                         for c in rep.checks],
        "status": "pass" if rep.passed else "fail",
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _tex_escape(s: str) -> str:
    for a, b in (("\\", "\\textbackslash{}"), ("_", "\\_"), ("&", "\\&"), ("%", "\\%"),
                 ("#", "\\#"), ("^", "\\^{}"), ("{", "\\{"), ("}", "\\}"), ("$", "\\$")):
        s = s.replace(a, b)
    return s


def render_latex_document(rep: Report) -> str:
    lines = ["\\documentclass{article}", "\\usepackage{amsmath}", "\\allowdisplaybreaks",
             "\\begin{document}",
             f"\\section*{{jetvar {_tex_escape(rep.command)}: {_tex_escape(rep.model)}}}"]
    for title, rows in rep.sections:
        lines.append(f"\\subsection*{{{_tex_escape(title)}}}")
        if not rows:
            lines.append("(none)")
            continue
        lines.append("\\begin{align*}")
        body = []
        for key, v in rows:
            val = render_latex(v) if isinstance(v, Expr) else f"\\text{{{_tex_escape(str(v))}}}"
            body.append(f"&\\text{{{_tex_escape(key)}}} = {val}")
        lines.append(" \\\\\n".join(body))
        lines.append("\\end{align*}")
    lines.append("\\subsection*{verification}")
    lines.append("\\begin{itemize}")
    for c in rep.checks:
        lines.append(f"\\item[{'pass' if c.passed else 'FAIL'}] {_tex_escape(c.name)}"
                     + (f": {_tex_escape(c.detail)}" if c.detail else ""))
    lines.append("\\end{itemize}")
    lines.append("\\end{document}")
    return "\n".join(lines) + "\n"
