"""Command line entry point: obsent-render render --template ... --in ... --out ..."""

import argparse
import sys

from .errors import RenderError
from .render import FigureSpec, render
from .templates import TEMPLATES, template_ids


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obsent-render",
        description="render figure templates from simulation CSV output")
    sub = parser.add_subparsers(dest="verb", required=True)

    lines = [f"  {tid:<6} {tpl.description} (reads {tpl.source} CSV)"
             for tid, tpl in TEMPLATES.items()]
    r = sub.add_parser(
        "render", help="render one figure",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="templates:\n" + "\n".join(lines))
    r.add_argument("--template", required=True, choices=template_ids(),
                   metavar="ID", help="figure template id")
    r.add_argument("--in", dest="inputs", nargs="+", required=True,
                   metavar="CSV", help="input CSV file(s); multiple files "
                   "must carry the same config hash")
    r.add_argument("--out", required=True, metavar="FILE",
                   help="output path, .svg or .png")
    r.add_argument("--xlabel", help="override the template's x axis label")
    r.add_argument("--ylabel", help="override the template's y axis label")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(template=args.template, inputs=tuple(args.inputs),
                      out=args.out, xlabel=args.xlabel, ylabel=args.ylabel)
    try:
        out = render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
