"""Print the gauge-theory quantities for the flat Maxwell and su(2) models.

    python3 scripts/gauge_tables.py [--model yang_mills] [--format text|latex]

Superpotential for the gauge generator, momenta p^{mu nu}_i, and the
horizontal current, via the same report renderer the CLI uses.
"""

import argparse

from jetvar.models import build_model, catalog_generator
from jetvar.multiindex import MultiIndex
from jetvar.noether import superpotential
from jetvar.report import Report, render_report
from jetvar.variational import current, momenta


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="maxwell", choices=("maxwell", "yang_mills"))
    ap.add_argument("--format", default="text", choices=("text", "latex", "json"))
    args = ap.parse_args()
    m = build_model(args.model)
    ctx = m.ctx
    rep = Report("gauge-tables", m.id, "-", "gauge", 0)
    nu = superpotential(m.lagrangian, catalog_generator(m, "gauge"), ctx)
    rep.add("superpotential (gauge)", [(f"nu^{s}{t}", v) for (s, t), v in sorted(nu.components.items())])
    zero = MultiIndex.zero(ctx.n)
    p = momenta(m.lagrangian, ctx)
    rows = [(f"p^{s} {k[0]}{list(k[1])}", v) for (k, b, s), v in sorted(p.items(), key=lambda kv: (kv[0][0], kv[0][2]))
            if b == zero]
    rep.add("momenta", rows)
    eps = current(m.lagrangian, catalog_generator(m, "horizontal_split"), ctx)
    rep.add("horizontal current", [(f"eps^{s}", c) for s, c in enumerate(eps.components, start=1)])
    print(render_report(rep, args.format), end="")


if __name__ == "__main__":
    main()
