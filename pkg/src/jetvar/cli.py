"""``jetvar`` command line: derivations on model files with self-verification.

Exit codes: 0 all checks pass, 1 usage / parse / model error, 2 a check failed.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

from .errors import JetvarError, PreconditionError
from .jetcalc import GeneratorSpec, vertical_part
from .modelfile import parse_model, render_model
from .models import MODEL_IDS, ModelSpec, build_model, catalog_generator
from .report import Report, render_report
from .symexpr import Expr
from .variational import (euler_lagrange, euler_lagrange_from_momenta, formal_adjoint, helmholtz,
                          is_divergence, jacobi, linearize, momenta, pair, second_variation_pair,
                          first_variation_residual, variation_context)

COMMANDS = ("el", "momenta", "noether", "bianchi", "superpotential", "jacobi", "helmholtz",
            "kernel", "secondvar")
NEEDS_GENERATOR = {"noether", "bianchi", "superpotential", "kernel", "secondvar"}


class UsageError(JetvarError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jetvar", description="Variational calculus on jet spaces.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("model", help="model file, or a built-in id such as 'maxwell'")
    p.add_argument("--gen", default=None, help="generator name from the model catalog")
    p.add_argument("--format", default="text", choices=("text", "latex", "json"))
    p.add_argument("--max-order", type=int, default=None)
    p.add_argument("--probe-points", type=int, default=0,
                   help="random exact points for probe-based checks (0 = canonical only)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    return p


def load_model(source: str) -> tuple[ModelSpec, str]:
    """Model and the sha256 of the text it was read from."""
    path = Path(source)
    if path.is_file():
        data = path.read_bytes()
        model = parse_model(data.decode("utf-8"))
    elif source in MODEL_IDS:
        model = build_model(source)
        data = render_model(model).encode("utf-8")
    else:
        raise UsageError(f"no such model file or built-in model: {source}")
    return model, hashlib.sha256(data).hexdigest()


def _has_curvature(model: ModelSpec) -> bool:
    return "Ric" in model.ctx.derived


def _key(name, comp) -> str:
    return f"{name}[{','.join(map(str, comp))}]"


def _source_rows(src: dict):
    return [(_key(*k), v) for k, v in sorted(src.items())]


def _all_zero(exprs) -> bool:
    return all(not e.terms for e in exprs)


# commands ------------------------------------------------------------------

def cmd_el(model, g, args, rep):
    E = euler_lagrange(model.lagrangian, model.ctx)
    rep.add("euler_lagrange", _source_rows(E))
    closure = euler_lagrange_from_momenta(model.lagrangian, model.ctx)
    rep.check("momenta closure E = d_V L - D p", closure == E)


def cmd_momenta(model, g, args, rep):
    p = momenta(model.lagrangian, model.ctx)
    rows = [(f"p^{s} {_key(*k)} {beta.render()}", v)
            for (k, beta, s), v in sorted(p.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key(), kv[0][2]))]
    rep.add("momenta", rows)
    closure = euler_lagrange_from_momenta(model.lagrangian, model.ctx)
    rep.check("momenta closure E = d_V L - D p", closure == euler_lagrange(model.lagrangian, model.ctx))


def cmd_noether(model, g, args, rep):
    from .noether import noether_current
    nc = noether_current(model.lagrangian, g, model.ctx, args.probe_points)
    rep.add("current", [(f"eps^{s}", c) for s, c in enumerate(nc.current.components, start=1)])
    rep.add("lie_derivative", [("Lie_g L", nc.lie_derivative)])
    rep.info["symmetry"] = nc.is_symmetry
    res = first_variation_residual(model.lagrangian, g, model.ctx)
    rep.check("first variation Lie L = <E, Xi_V> + D eps", not res.terms)


def cmd_bianchi(model, g, args, rep):
    from .jetcalc import lie_derivative_density
    from .noether import bianchi_morphism, kolar_split_residual, reduced_current
    beta = bianchi_morphism(model.lagrangian, g, model.ctx)
    rep.add("bianchi", _source_rows(beta))
    rep.add("reduced_current", [(f"eps~^{s}", c) for s, c in
                                enumerate(reduced_current(model.lagrangian, g, model.ctx).components, start=1)])
    vanishes = _all_zero(beta.values())
    symmetric = not lie_derivative_density(model.lagrangian, g, model.ctx).terms
    rep.info["symmetry"] = symmetric
    rep.info["beta_vanishes"] = vanishes
    if symmetric:
        rep.check("beta vanishes for a symmetry", vanishes)
    res = kolar_split_residual(model.lagrangian, g, model.ctx)
    rep.check("split omega = <beta, xi> + D eps~", not res.terms)


def cmd_superpotential(model, g, args, rep):
    if _has_curvature(model):
        return _superpotential_probe(model, g, args, rep)
    from .noether import superpotential, superpotential_residual
    try:
        nu = superpotential(model.lagrangian, g, model.ctx, args.probe_points, args.seed)
    except PreconditionError as exc:
        rep.check("superpotential preconditions", False, str(exc))
        return
    rep.add("superpotential", [(f"nu^{s}{m}", v) for (s, m), v in sorted(nu.components.items())])
    rep.check("beta vanishes", True)
    rep.check("eps - eps~ divergence free", True)
    res = superpotential_residual(nu, model.lagrangian, g, model.ctx)
    rep.check("2 D_m nu^{s m} = eps^s - eps~^s", _all_zero(res))


def _superpotential_probe(model, g, args, rep):
    from .sectionprobe import ProbeConfig, probe_superpotential
    cfg = ProbeConfig(points=args.probe_points or ProbeConfig.points, seed=args.seed)
    komar = model.ctx.metric is not None and "xi" in g.params
    s = probe_superpotential(model.lagrangian, g, model.ctx, cfg, komar=komar)
    rep.add("superpotential", [("method", "section probe mod p"), ("points", str(s.points))])
    if args.timing:
        rep.info["probe_seconds"] = f"{s.seconds:.3f}"
    if s.failures:
        rep.info["failures"] = ", ".join(f"{i}:{k}" for i, k in s.failures[:10])
    rep.check("beta vanishes", s.bianchi_zero)
    rep.check("eps - eps~ divergence free", s.strong_conservation)
    rep.check("cascade exact", s.cascade_exact)
    rep.check("2 D_m nu^{s m} = eps^s - eps~^s", s.residual_zero)
    if komar:
        c = s.komar_constant
        rep.info["komar_constant"] = "inconsistent" if c is None else str(c)
        rep.check("nu proportional to Komar form", bool(s.komar_consistent))


def _variation(model, g):
    if g is not None:
        return model.ctx, vertical_part(g, model.ctx)
    return variation_context(model.ctx)


def cmd_jacobi(model, g, args, rep):
    ctx, eta = _variation(model, g)
    J = jacobi(model.lagrangian, eta, ctx)
    rep.add("jacobi", _source_rows(J))
    K = linearize(euler_lagrange(model.lagrangian, model.ctx), model.ctx)
    rep.check("linearized EL is self-adjoint", formal_adjoint(K, model.ctx) == K)


def cmd_helmholtz(model, g, args, rep):
    H = helmholtz(euler_lagrange(model.lagrangian, model.ctx), model.ctx)
    rows = [(f"H {_key(*i)} {_key(*j)} {a.render()}", w)
            for (i, j, a), w in sorted(H.coeffs.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2].sort_key()))]
    rep.add("helmholtz", rows)
    rep.check("Helmholtz operator vanishes", H.is_zero())


def cmd_kernel(model, g, args, rep):
    from .noether import kernel_residual
    R = kernel_residual(model.lagrangian, g, model.ctx)
    rep.add("kernel_residual", _source_rows(R))
    rep.info["kernel_condition"] = _all_zero(R.values())
    J = jacobi(model.lagrangian, g, model.ctx)
    ext, eta = variation_context(model.ctx)
    diff = {k: R.get(k, Expr()) - J.get(k, Expr()) for k in set(R) | set(J)}
    rep.check("<R - J(Xi_V), eta> is a divergence", is_divergence(pair(diff, eta), ext))


def cmd_secondvar(model, g, args, rep):
    a, b = second_variation_pair(model.lagrangian, g, model.ctx)
    rep.add("second_variation", [("route_a", a), ("route_b", b)])
    rep.check("routes differ by a divergence", is_divergence(a - b, model.ctx))


HANDLERS = {
    "el": cmd_el, "momenta": cmd_momenta, "noether": cmd_noether, "bianchi": cmd_bianchi,
    "superpotential": cmd_superpotential, "jacobi": cmd_jacobi, "helmholtz": cmd_helmholtz,
    "kernel": cmd_kernel, "secondvar": cmd_secondvar,
}


def run(command: str, model: ModelSpec, digest: str, gen: str | None = None, fmt: str = "text",
        probe_points: int = 0, seed: int = 0, timing: bool = False) -> tuple[Report, str]:
    """Run one command; returns the report and its rendering."""
    args = argparse.Namespace(probe_points=probe_points, seed=seed, timing=timing)
    if command in NEEDS_GENERATOR and gen is None:
        raise UsageError(f"command {command!r} needs --gen (available: {', '.join(sorted(model.generators))})")
    g: GeneratorSpec | None = catalog_generator(model, gen) if gen is not None else None
    if _has_curvature(model) and command != "superpotential":
        raise UsageError(f"command {command!r} is not available for curvature models; "
                         "only 'superpotential' (section probe) is supported")
    rep = Report(command, model.id, digest, gen, seed)
    t0 = time.perf_counter()
    try:
        HANDLERS[command](model, g, args, rep)
    except PreconditionError as exc:
        rep.check(f"{command} preconditions", False, str(exc))
    if timing:
        rep.info["seconds"] = f"{time.perf_counter() - t0:.3f}"
    return rep, render_report(rep, fmt)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        model, digest = load_model(args.model)
        if args.max_order is not None:
            model.ctx = model.ctx.with_max_order(args.max_order)
        rep, text = run(args.command, model, digest, args.gen, args.format,
                        args.probe_points, args.seed, args.timing)
    except UsageError as exc:
        print(f"jetvar: usage error: {exc}", file=sys.stderr)
        return 1
    except JetvarError as exc:
        print(f"jetvar: error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(text)
    return 0 if rep.passed else 2


if __name__ == "__main__":
    sys.exit(main())
