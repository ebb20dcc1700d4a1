"""qtower command line: tower sessions, a REPL, and one-shot queries.

Subcommands: repl, run <script>, verdict <poly>, rrt <poly>,
eval [--tower FILE] <expr>. Exit statuses: 0 success, 1 command or
domain error, 2 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace

import mpmath

from .errors import QTowerError
from .parser import eval_expr, parse_expr, parse_poly
from .poly import (
    Outcome,
    constructible_root_verdict,
    descend_cubic_root,
    rational_roots_cubic,
    rrt_candidates,
)
from .tower import Tower, TowerElement, load_tower, save_tower

MODES = ("coords", "decimal", "both")

HELP_TEXT = """\
commands:
  adjoin <expr>              extend the tower by sqrt(<expr>)
  adjoin-root [c0,c1,c2] +|- extend by a root of a quadratic; binds 'last'
  eval <expr>                evaluate in the top field
  sign <expr>                exact sign: -1, 0 or 1
  is-square <expr>           exact square test with witness
  member <expr> <level>      project down to <level> if possible
  rrt [c0,c1,c2,c3]          rational-root candidates of a cubic
  roots [c0,c1,c2,c3]        rational roots of a cubic
  verdict [c0,c1,c2,c3]      constructibility verdict for a cubic
  descend [c0,c1,c2,c3] <e>  walk a tower root of a cubic down to Q
  let <name> = <expr>        bind a name (generators are g1, g2, ...)
  set precision <bits>       approximation precision (default 113)
  set mode <coords|decimal|both>
  save <path> / load <path>  tower file persistence
note: unary minus binds tighter than * and / but looser than ^,
so -2^2 evaluates to -(2^2)."""


class CommandError(Exception):
    """A failed command, fully rendered; the session is unchanged."""


@dataclass
class Session:
    tower: Tower = field(default_factory=Tower)
    bindings: dict = field(default_factory=dict)
    precision: int = 113
    mode: str = "both"


def _format_decimal(value) -> str:
    """15 significant digits, deterministic, trailing zeros kept."""
    if value == 0:
        return "0.000000000000000"
    text = mpmath.nstr(value, 15, strip_zeros=False)
    mantissa, sep, exponent = text.partition("e")
    sign = "-" if mantissa.startswith("-") else ""
    digits = mantissa.lstrip("-")
    if "." not in digits:
        digits += "."
    int_part, frac = digits.split(".")
    significant = (int_part + frac).lstrip("0")
    missing = 15 - len(significant)
    if missing > 0:
        frac += "0" * missing
    return sign + int_part + "." + frac + (("e" + exponent) if sep else "")


def _coords_str(x: TowerElement) -> str:
    return "[" + ", ".join(str(c) for c in x.coords) + "]"


def format_element(x: TowerElement, session: Session) -> str:
    """Render per the session's output mode and precision."""
    if session.mode == "coords":
        return _coords_str(x)
    decimal = _format_decimal(session.tower.approx(x, session.precision))
    if session.mode == "decimal":
        return decimal
    return f"{_coords_str(x)} ≈ {decimal}"


def _eval(session: Session, text: str) -> TowerElement:
    return eval_expr(parse_expr(text), session.tower, session.bindings)


def _split_bracket(rest: str, usage: str):
    close = rest.find("]")
    if close < 0 or not rest.lstrip().startswith("["):
        raise CommandError(f"usage: {usage}")
    return rest[: close + 1], rest[close + 1 :].strip()


def _checked(tower: Tower) -> Tower:
    report = tower.validate()
    if not report.ok:
        raise CommandError(f"{type(report.error).__name__}: {report.message}")
    return tower


def _rationals_str(values) -> str:
    return ", ".join(str(v) for v in values)


def _dispatch(session: Session, line: str) -> tuple[Session, str]:
    word, _, rest = line.partition(" ")
    rest = rest.strip()

    if word == "help":
        return session, HELP_TEXT

    if word == "adjoin":
        if not rest:
            raise CommandError("usage: adjoin <expr>")
        square = _eval(session, rest)
        tower = _checked(session.tower.adjoin_sqrt(square))
        k = tower.depth
        return (
            replace(session, tower=tower),
            f"adjoined g{k}: g{k}^2 = {_coords_str(square)}; depth {k}",
        )

    if word == "adjoin-root":
        usage = "adjoin-root [c0,c1,c2] (+|-)"
        bracket, branch = _split_bracket(rest, usage)
        if branch not in ("+", "-"):
            raise CommandError(f"usage: {usage}")
        entries = [e.strip() for e in bracket.strip()[1:-1].split(",")]
        if len(entries) != 3 or not all(entries):
            raise CommandError(f"usage: {usage}")
        coeffs = tuple(_eval(session, e) for e in entries)
        tower, root = session.tower.adjoin_quadratic_root(coeffs, branch)
        tower = _checked(tower)
        bindings = dict(session.bindings)
        bindings["last"] = root
        new = replace(session, tower=tower, bindings=bindings)
        k = tower.depth
        return new, f"adjoined g{k}; root bound to 'last': {format_element(root, new)}"

    if word == "eval":
        if not rest:
            raise CommandError("usage: eval <expr>")
        return session, format_element(_eval(session, rest), session)

    if word == "sign":
        if not rest:
            raise CommandError("usage: sign <expr>")
        return session, str(session.tower.exact_sign(_eval(session, rest)))

    if word == "is-square":
        if not rest:
            raise CommandError("usage: is-square <expr>")
        witness = session.tower.is_square(_eval(session, rest))
        if witness is None:
            return session, "not a square in the current tower"
        if session.tower.exact_sign(witness) < 0:
            witness = -witness
        return session, f"square; witness {format_element(witness, session)}"

    if word == "member":
        parts = rest.rsplit(None, 1)
        if len(parts) != 2:
            raise CommandError("usage: member <expr> <level>")
        try:
            level = int(parts[1])
        except ValueError:
            raise CommandError(f"not a level: {parts[1]!r}") from None
        projected = session.tower.member_of_level(_eval(session, parts[0]), level)
        if projected is None:
            return session, f"not a member of level {level}"
        return session, f"member of level {level}: {format_element(projected, session)}"

    if word == "rrt":
        return session, "candidates: " + _rationals_str(rrt_candidates(parse_poly(rest)))

    if word == "roots":
        roots = rational_roots_cubic(parse_poly(rest))
        return session, "rational roots: " + (_rationals_str(roots) if roots else "none")

    if word == "verdict":
        verdict = constructible_root_verdict(parse_poly(rest))
        shown = _rationals_str(verdict.candidates_checked)
        if verdict.outcome is Outcome.RATIONAL_ROOT_FOUND:
            return session, f"rational root found: {verdict.root}; candidates checked: {shown}"
        return session, (
            f"no root in any quadratic extension tower; "
            f"candidates checked: {shown} (all nonzero)\n"
            "by: no rational root => no root in any quadratic extension tower"
        )

    if word == "descend":
        bracket, expr = _split_bracket(rest, "descend [c0,c1,c2,c3] <expr>")
        if not expr:
            raise CommandError("usage: descend [c0,c1,c2,c3] <expr>")
        cubic = parse_poly(bracket)
        root = descend_cubic_root(cubic, session.tower, _eval(session, expr))
        return session, f"rational root: {root}"

    if word == "save":
        if not rest:
            raise CommandError("usage: save <path>")
        save_tower(session.tower, rest)
        return session, f"saved {rest}"

    if word == "load":
        if not rest:
            raise CommandError("usage: load <path>")
        tower = _checked(load_tower(rest))
        return replace(session, tower=tower, bindings={}), f"loaded {rest}: depth {tower.depth}"

    if word == "set":
        key, _, value = rest.partition(" ")
        value = value.strip()
        if key == "precision":
            try:
                bits = int(value)
            except ValueError:
                raise CommandError(f"not a precision: {value!r}") from None
            if bits < 1:
                raise CommandError("precision must be a positive number of bits")
            return replace(session, precision=bits), f"precision = {bits}"
        if key == "mode":
            if value not in MODES:
                raise CommandError(f"mode must be one of {', '.join(MODES)}")
            return replace(session, mode=value), f"mode = {value}"
        raise CommandError("usage: set precision <bits> | set mode <coords|decimal|both>")

    if word == "let":
        name, eq, expr = rest.partition("=")
        name = name.strip()
        expr = expr.strip()
        if not eq or not name.isidentifier() or not expr:
            raise CommandError("usage: let <name> = <expr>")
        if name == "sqrt" or (name[0] == "g" and name[1:].isdigit()):
            raise CommandError(f"{name!r} is reserved")
        value = _eval(session, expr)
        bindings = dict(session.bindings)
        bindings[name] = value
        new = replace(session, bindings=bindings)
        return new, f"{name} = {format_element(value, new)}"

    raise CommandError(f"unknown command {word!r}; try 'help'")


def execute(session: Session, command: str) -> tuple[Session, str]:
    """Run one command; returns the next session and the rendered output.

    Failures raise CommandError with the underlying error rendered by
    name; the input session is never modified."""
    stripped = command.strip()
    if not stripped or stripped.startswith("#"):
        return session, ""
    try:
        return _dispatch(session, stripped)
    except CommandError:
        raise
    except (QTowerError, ValueError, OSError) as exc:
        raise CommandError(f"{type(exc).__name__}: {exc}") from exc


def _script_lines(text: str):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def run_batch(
    script_path,
    tower_path=None,
    precision=None,
    mode=None,
    quiet=False,
    out=None,
) -> int:
    """Execute a script of newline-separated commands, echoing each with
    its output (--quiet drops the echo). Stops at the first error."""
    out = sys.stdout if out is None else out
    try:
        with open(script_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read script: {exc}", file=sys.stderr)
        return 2
    session, status = _initial_session(tower_path, precision, mode)
    if session is None:
        return status
    for line in _script_lines(text):
        if not quiet:
            print(f"> {line}", file=out)
        try:
            session, output = execute(session, line)
        except CommandError as exc:
            print(str(exc), file=out)
            return 1
        if output:
            print(output, file=out)
    return 0


def _initial_session(tower_path, precision, mode):
    session = Session()
    if precision is not None:
        session.precision = precision
    if mode is not None:
        session.mode = mode
    if tower_path is not None:
        try:
            session.tower = load_tower(tower_path)
        except (OSError, QTowerError) as exc:
            print(f"cannot load tower: {exc}", file=sys.stderr)
            return None, 2
    return session, 0


def repl(session: Session | None = None, infile=None, out=None) -> int:
    session = Session() if session is None else session
    infile = sys.stdin if infile is None else infile
    out = sys.stdout if out is None else out
    print("qtower: exact arithmetic in towers of real quadratic extensions.", file=out)
    print("Type 'help' for commands, 'quit' to leave.", file=out)
    while True:
        print("qtower> ", end="", file=out, flush=True)
        line = infile.readline()
        if not line:
            print("", file=out)
            return 0
        line = line.strip()
        if line in ("quit", "exit"):
            return 0
        try:
            session, output = execute(session, line)
        except CommandError as exc:
            print(str(exc), file=out)
            continue
        if output:
            print(output, file=out)


def _one_shot(command: str, session: Session | None = None) -> int:
    session = Session() if session is None else session
    try:
        _, output = execute(session, command)
    except CommandError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(output)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qtower",
        description="Exact arithmetic in towers of real quadratic field "
        "extensions, with constructibility verdicts for rational cubics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_repl = sub.add_parser("repl", help="interactive session")
    p_run = sub.add_parser("run", help="run a command script")
    p_run.add_argument("script")
    p_run.add_argument("--quiet", action="store_true", help="do not echo commands")
    for p in (p_repl, p_run):
        p.add_argument("--tower", help="tower file to preload")
        p.add_argument("--precision", type=int, help="approximation bits (default 113)")
        p.add_argument("--mode", choices=MODES, help="output mode (default both)")

    p_verdict = sub.add_parser("verdict", help="constructibility verdict for a cubic")
    p_verdict.add_argument("poly", help="e.g. '[-2, 0, 0, 1]' for x^3 - 2")
    p_rrt = sub.add_parser("rrt", help="rational-root candidates of a cubic")
    p_rrt.add_argument("poly")

    p_eval = sub.add_parser("eval", help="evaluate one expression")
    p_eval.add_argument("expr")
    p_eval.add_argument("--tower", help="tower file to load first")
    p_eval.add_argument("--precision", type=int)
    p_eval.add_argument("--mode", choices=MODES)

    args = parser.parse_args(argv)

    if args.command == "run":
        return run_batch(
            args.script,
            tower_path=args.tower,
            precision=args.precision,
            mode=args.mode,
            quiet=args.quiet,
        )
    if args.command == "repl":
        session, status = _initial_session(args.tower, args.precision, args.mode)
        if session is None:
            return status
        return repl(session)
    if args.command == "verdict":
        return _one_shot(f"verdict {args.poly}")
    if args.command == "rrt":
        return _one_shot(f"rrt {args.poly}")
    session, status = _initial_session(args.tower, args.precision, args.mode)
    if session is None:
        return status
    return _one_shot(f"eval {args.expr}", session)


if __name__ == "__main__":
    sys.exit(main())
