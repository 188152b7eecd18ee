"""fixedpurity-figures: render figures from fixedpurity CLI artifacts."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURES, FigureSpec, make_figure
from .io import InputFormatError
from .style import load_style


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fixedpurity-figures",
                                 description="regenerate figures from CLI CSV/JSON outputs")
    ap.add_argument("figure", choices=sorted(FIGURES))
    ap.add_argument("--in", dest="inputs", action="append", required=True,
                    help="input file (repeatable)")
    ap.add_argument("--out", required=True, help="output image path (.png or .svg)")
    ap.add_argument("--style", default=None, help="JSON style file overriding the defaults")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(figure=args.figure, inputs=tuple(args.inputs), output=args.out,
                          style=load_style(args.style))
        path = make_figure(spec)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
