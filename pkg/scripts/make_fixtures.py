"""Write the shipped model files into fixtures/ from the built-in builders.

    python3 scripts/make_fixtures.py [--out fixtures] [--check]

With ``--check`` nothing is written; the script exits 1 if any file on
disk differs from what the builders produce now.
"""

import argparse
import sys
from pathlib import Path

from jetvar.modelfile import parse_model, render_model
from jetvar.models import build_model

FIXTURES = {
    "scalar2.model": ("scalar", {"n": 2}),
    "maxwell4.model": ("maxwell", {"n": 4}),
    "yang_mills_su2_4.model": ("yang_mills", {"n": 4, "algebra": "su2"}),
    "einstein_hilbert4.model": ("einstein_hilbert", {"n": 4}),
    "einstein_yang_mills4.model": ("einstein_yang_mills", {"n": 4}),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stale = []
    for fname, (model_id, params) in FIXTURES.items():
        text = render_model(build_model(model_id, **params))
        assert render_model(parse_model(text)) == text, fname
        path = out / fname
        if args.check:
            if not path.is_file() or path.read_text(encoding="utf-8") != text:
                stale.append(fname)
            continue
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path} ({len(text)} bytes)")
    if stale:
        print("stale fixtures: " + ", ".join(stale))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
