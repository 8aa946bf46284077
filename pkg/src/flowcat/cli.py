"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 parse or usage error,
3 illegal move.
"""

from __future__ import annotations

import argparse
import cmd
import os
import sys

from . import examples
from .algebra import homology
from .core import Circle, FlowCategory, FlowCatError, chain_complex, components, validate
from .fileformat import parse, serialize
from .iso import iso_check
from .moves import MoveLog, digest, parse_move, parse_script
from .reduce import primary_snf_reduce, snf_reduce

OK, INVALID, USAGE, ILLEGAL = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def read_source(path: str) -> str:
    """Read a file, falling back to a built-in example of the same name."""
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    name = os.path.basename(path)
    if examples.is_example(name):
        return examples.raw_text(name)
    raise CliError(USAGE, f"no such file: {path}")


def load_category(path: str, check: bool = True) -> FlowCategory:
    try:
        cat = parse(read_source(path))
    except FlowCatError as err:
        raise CliError(USAGE, f"{path}: {err}") from None
    if check:
        report = validate(cat)
        if not report.ok:
            raise CliError(INVALID, f"{path}: invalid category\n{report}")
    return cat


def write_output(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def counts(cat: FlowCategory) -> tuple[int, int, int]:
    pts = sum(len(p) for p in cat.points.values())
    circ = sum(isinstance(c, Circle) for cs in cat.ones.values() for c in cs.values())
    ints = sum(len(cs) for cs in cat.ones.values()) - circ
    return pts, ints, circ


def delta(before: FlowCategory, after: FlowCategory) -> str:
    (p0, i0, c0), (p1, i1, c1) = counts(before), counts(after)
    return f"points {p1 - p0:+d}, intervals {i1 - i0:+d}, circles {c1 - c0:+d}"


def moduli_changes(before: FlowCategory, after: FlowCategory) -> list[str]:
    """One line per moduli whose point, interval or circle count changed."""
    def tally(cat, pair):
        comps = cat.comps(*pair).values()
        circ = sum(isinstance(c, Circle) for c in comps)
        return len(cat.pts(*pair)), len(comps) - circ, circ

    out = []
    pairs = set(before.points) | set(before.ones) | set(after.points) | set(after.ones)
    for pair in sorted(pairs):
        old, new = tally(before, pair), tally(after, pair)
        if old != new:
            diffs = [f"{what} {o}->{n}" for what, o, n in zip(("points", "intervals", "circles"), old, new)
                     if o != n]
            out.append(f"  M({pair[0]},{pair[1]}): " + ", ".join(diffs))
    return out


def describe(cat: FlowCategory) -> str:
    lines = []
    grades = sorted(set(cat.objects.values()), reverse=True)
    lines.append(f"{len(cat.objects)} objects")
    for g in grades:
        lines.append(f"  |{g}|: {' '.join(cat.at_grading(g))}")
    lines.append("moduli")
    for pair in sorted(set(cat.points) | set(cat.ones)):
        a, b = pair
        if pair in cat.points and cat.points[pair]:
            pts = cat.points[pair]
            body = " ".join(f"{p}{'+' if pts[p] > 0 else '-'}" for p in sorted(pts))
            lines.append(f"  M({a},{b}) = {body}  (count {sum(pts.values()):+d})")
        if pair in cat.ones and cat.ones[pair]:
            comps = list(cat.ones[pair].values())
            fr = [c.fr for c in comps if not isinstance(c, Circle)]
            labels = [c.label for c in comps if isinstance(c, Circle)]
            lines.append(f"  M({a},{b}) = {len(fr)} intervals (fr 0: {fr.count(0)}, fr 1: {fr.count(1)}), "
                         f"{len(labels)} circles (label 0: {labels.count(0)}, label 1: {labels.count(1)})")
    comps = components(cat)
    lines.append(f"{len(comps)} components: " + "  ".join("{" + ",".join(sorted(c)) + "}" for c in comps))
    cc = str(chain_complex(cat))
    if cc:
        lines.append(cc)
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    cat = load_category(args.file, check=False)
    report = validate(cat)
    print(report)
    return OK if report.ok else INVALID


def cmd_show(args) -> int:
    sys.stdout.write(describe(load_category(args.file)))
    return OK


def cmd_apply(args) -> int:
    cat = load_category(args.file)
    try:
        moves = parse_script(read_source(args.script))
    except FlowCatError as err:
        raise CliError(USAGE, f"{args.script}: {err}") from None
    log = MoveLog()
    report = sys.stderr if args.output in (None, "-") else sys.stdout
    for lineno, move in moves:
        try:
            after = log.apply(cat, move)
        except FlowCatError as err:
            raise CliError(ILLEGAL, f"{args.script}: line {lineno}: {move}: {err}") from None
        print(f"{lineno:4d}  {move}  [{delta(cat, after)}]  {log.entries[-1].after}", file=report)
        cat = after
    write_output(serialize(cat), args.output)
    return OK


def cmd_reduce(args) -> int:
    cat = load_category(args.file)
    out, log = (primary_snf_reduce if args.primary else snf_reduce)(cat)
    if args.log:
        write_output(log.script(), args.log)
    write_output(serialize(out), args.output)
    info = sys.stderr if args.output in (None, "-") else sys.stdout
    print(f"{len(log)} moves", file=info)
    print(chain_complex(out), file=info)
    return OK


def cmd_homology(args) -> int:
    cat = load_category(args.file)
    groups = homology(chain_complex(cat), args.coeff)
    for k in sorted(groups, reverse=True):
        print(f"H_{k} = {groups[k]}")
    return OK


def cmd_iso(args) -> int:
    a, b = load_category(args.a), load_category(args.b)
    iso = iso_check(a, b)
    if iso is None:
        print("not isomorphic")
        return OK
    print("isomorphic")
    for x in sorted(iso.objects):
        print(f"  {x} -> {iso.objects[x]}")
    return OK


def cmd_examples(args) -> int:
    if args.name is None:
        print("\n".join(examples.names()))
        return OK
    if not examples.is_example(args.name):
        raise CliError(USAGE, f"unknown example {args.name!r}; try one of: {', '.join(examples.names())}")
    if examples.is_category(args.name):
        sys.stdout.write(serialize(examples.category(args.name)))
    else:
        sys.stdout.write(examples.raw_text(args.name))
    return OK


class Repl(cmd.Cmd):
    """Interactive moves; any move-script line is a command."""

    prompt = "flowcat> "

    def __init__(self, cat: FlowCategory, stdout=None):
        super().__init__(stdout=stdout)
        self.start = cat
        self.history = [cat]
        self.log = MoveLog()
        self.intro = f"loaded category {digest(cat)}; type help for commands"

    @property
    def cat(self) -> FlowCategory:
        return self.history[-1]

    def say(self, text: str) -> None:
        self.stdout.write(text.rstrip("\n") + "\n")

    def default(self, line: str) -> None:
        try:
            move = parse_move(line)
            after = self.log.apply(self.cat, move)
        except FlowCatError as err:
            self.say(f"rejected: {err}")
            return
        self.say(f"{move}  [{delta(self.cat, after)}]  {self.log.entries[-1].after}")
        for line in moduli_changes(self.cat, after):
            self.say(line)
        self.history.append(after)
        self.say(str(chain_complex(after)))

    def emptyline(self) -> bool:
        return False

    def do_undo(self, _arg) -> None:
        """undo: revert the last move"""
        if len(self.history) == 1:
            self.say("nothing to undo")
            return
        self.history.pop()
        self.log.entries.pop()
        self.say(f"back to {digest(self.cat)}")

    def do_log(self, _arg) -> None:
        """log: print the moves applied so far"""
        self.say(self.log.script() or "(empty)")

    def do_show(self, _arg) -> None:
        """show: describe the current category"""
        self.say(describe(self.cat))

    def do_save(self, arg) -> None:
        """save FILE: write the current category"""
        if not arg.strip():
            self.say("usage: save FILE")
            return
        write_output(serialize(self.cat), arg.strip())
        self.say(f"saved {arg.strip()}")

    def do_quit(self, _arg) -> bool:
        """quit: leave the session"""
        replayed = self.log.replay(self.start)
        ok = replayed == self.cat
        self.say(f"{len(self.log)} moves; log replays to final state: {'yes' if ok else 'NO'}")
        return True

    do_exit = do_quit
    do_EOF = do_quit


def cmd_repl(args) -> int:
    Repl(load_category(args.file)).cmdloop()
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flowcat", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a category file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("show", help="summarize moduli, components and chain complex")
    s.add_argument("file")
    s.set_defaults(func=cmd_show)

    s = sub.add_parser("apply", help="apply a move script")
    s.add_argument("file")
    s.add_argument("script")
    s.add_argument("-o", "--output", help="write the result here instead of stdout")
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("reduce", help="reduce to Smith normal form by moves")
    s.add_argument("file")
    s.add_argument("--primary", action="store_true", help="split entries into prime powers")
    s.add_argument("-o", "--output")
    s.add_argument("--log", help="write the emitted move script here")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("homology", help="graded homology")
    s.add_argument("file")
    s.add_argument("--coeff", choices=["Z", "Z2", "Z3"], default="Z")
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("iso", help="test two categories for isomorphism")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("examples", help="print a built-in category or move script")
    s.add_argument("name", nargs="?")
    s.set_defaults(func=cmd_examples)

    s = sub.add_parser("repl", help="interactive move session")
    s.add_argument("file")
    s.set_defaults(func=cmd_repl)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except CliError as err:
        print(err, file=sys.stderr)
        return err.status


if __name__ == "__main__":
    sys.exit(main())
