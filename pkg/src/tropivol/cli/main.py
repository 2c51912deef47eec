"""Command-line entry point: ``tropivol <verb> <file.sx> [--json]``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from .. import conductor as cd
from .. import gen
from ..errors import TropivolError
from ..intlat import IntMatrix, smith_normal_form
from ..motivic import compare_check, haar_integral, motivic_integral, render_poly, virtual_dim
from ..vfcells import (DefinableSet, cov_check, fubini_check, integrate, integrate_threshold, vol,
                       vol_truncation_oracle)
from ..zbar import ZBar, to_json
from . import dsl
from .sexp import Node, ParseError, SList, parse, pretty

VERBS = ("vol", "integrate", "fubini", "cov", "motivic", "compare", "conductor", "trace", "additivity", "snf")
CHECK_VERBS = {"fubini", "cov", "compare", "additivity"}
GEN_KINDS = ("vol", "integrate", "fubini", "cov", "additivity")

EXIT_OK, EXIT_ERROR, EXIT_UNEQUAL = 0, 1, 2


@dataclass
class Output:
    """Ordered key/value lines; text and JSON renderings share it."""
    lines: list[tuple[str, str]] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)
    equal: bool | None = None

    def add(self, key: str, text: str, value: Any) -> None:
        self.lines.append((key, text))
        self.data[key] = value

    def text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.lines)


def _z(out: Output, key: str, z: ZBar) -> None:
    out.add(key, str(z), to_json(z))


def _q(out: Output, key: str, q: Fraction) -> None:
    out.add(key, str(q), str(q))


def _mat_text(m: IntMatrix) -> str:
    return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in m.to_rows()) + "]"


def _m(out: Output, key: str, m: IntMatrix) -> None:
    out.add(key, _mat_text(m), m.to_rows())


def _cols(out: Output, key: str, m: IntMatrix) -> None:
    cols = m.columns()
    out.add(key, "[" + ", ".join("(" + ", ".join(str(x) for x in c) + ")" for c in cols) + "]", cols)


def _ints(out: Output, key: str, xs: list[int]) -> None:
    out.add(key, "[" + ", ".join(str(x) for x in xs) + "]", list(xs))


def _flag(out: Output, equal: bool) -> None:
    out.equal = equal
    out.add("equal", "true" if equal else "false", equal)


# ---------------------------------------------------------------------------
# document shape

def _body(doc: list[Node], verb: str) -> list[Node]:
    """Top-level forms, with a wrapping (verb ...) form removed."""
    if len(doc) == 1 and isinstance(doc[0], SList) and doc[0].head == verb:
        return list(doc[0].args)
    return doc


def _arity(forms: list[Node], count: int, shape: str, where: Node | None) -> None:
    if len(forms) != count:
        raise dsl.DslError(f"expected {shape}", forms[count] if len(forms) > count else where)


def _keyed(forms: list[Node], key: str, shape: str, where: Node | None) -> Node:
    hits = [f for f in forms if isinstance(f, SList) and f.head == key]
    if len(hits) != 1:
        raise dsl.DslError(f"expected exactly one ({key} ...) form in {shape}", hits[1] if hits[1:] else where)
    if len(hits[0].args) != 1:
        raise dsl.DslError(f"({key} ...) wraps exactly one form", hits[0])
    return hits[0].args[0]


# ---------------------------------------------------------------------------
# verbs

def run_vol(forms, ctx, args) -> Output:
    _arity(forms, 1, "(vol SET)", forms[0] if forms else None)
    a = dsl.defset(forms[0], ctx)
    out = Output()
    _z(out, "vol", vol(a))
    if args.oracle_lmax is not None or args.oracle_imax is not None:
        lmax = args.oracle_lmax if args.oracle_lmax is not None else 8
        imax = args.oracle_imax if args.oracle_imax is not None else 4
        res = vol_truncation_oracle(a, imax, lmax)
        status = "stabilized" if res.stabilized else "not stabilized"
        out.lines.append(("oracle", f"{res.value} ({status})"))
        out.data["oracle"] = {"value": to_json(res.value), "stabilized": res.stabilized}
    return out


def run_integrate(forms, ctx, args) -> Output:
    _arity(forms, 2, "(integrate SET (dimfun ...))", forms[0] if forms else None)
    a = dsl.defset(forms[0], ctx)
    phi = dsl.dimfun(forms[1], a.profile, ctx)
    out = Output()
    _z(out, "integral", integrate(a, phi))
    _z(out, "threshold", integrate_threshold(a, phi))
    return out


def run_fubini(forms, ctx, args) -> Output:
    shape = "(fubini (x SET) (y SET) (dimfun ...))"
    head = forms[0] if forms else None
    ax = dsl.defset(_keyed(forms, "x", shape, head), ctx)
    ay = dsl.defset(_keyed(forms, "y", shape, head), ctx)
    funs = [f for f in forms if isinstance(f, SList) and f.head == "dimfun"]
    if len(funs) != 1:
        raise dsl.DslError(f"expected one (dimfun ...) in {shape}", head)
    phi = dsl.dimfun(funs[0], None, ctx)
    res = fubini_check(ax, ay, phi)
    out = Output()
    _z(out, "iterated", res.lhs)
    _z(out, "joint", res.rhs)
    _flag(out, res.equal)
    return out


def run_cov(forms, ctx, args) -> Output:
    _arity(forms, 3, "(cov SET (map ...) (dimfun ...))", forms[0] if forms else None)
    a = dsl.defset(forms[0], ctx)
    scale, offset = dsl.affine_map(forms[1], a.n)
    phi = dsl.dimfun(forms[2], a.profile, ctx)
    res = cov_check(a, scale, offset, phi)
    out = Output()
    out.add("ordjac", str(res.ordjac), res.ordjac)
    _z(out, "lhs", res.lhs)
    _z(out, "rhs", res.rhs)
    _flag(out, res.equal)
    return out


def run_motivic(forms, ctx, args) -> Output:
    _arity(forms, 1, "(motivic (weak-neron ...)) or (motivic (haar ...))", forms[0] if forms else None)
    node = dsl.expect_list(forms[0])
    out = Output()
    if node.head == "haar":
        f = dsl.Fields(node, ["poly", "g", "gamma"])
        try:
            res = haar_integral(dsl.poly(f.need("poly")), f.int_of("g"), f.int_of("gamma"))
        except TropivolError as e:
            raise dsl.DslError.wrap(e, node) from None
        p, d = res.integral, res.dim
    else:
        p = motivic_integral(dsl.weak_neron(node))
        d = virtual_dim(p)
    out.add("integral", render_poly(p), [[e, c] for e, c in reversed(p.terms)])
    out.add("dim", str(d), str(d))
    return out


def run_compare(forms, ctx, args) -> Output:
    _arity(forms, 3, "(compare (weak-neron ...) SET (dimfun ...))", forms[0] if forms else None)
    w = dsl.weak_neron(forms[0])
    a = dsl.defset(forms[1], ctx)
    phi = dsl.dimfun(forms[2], a.profile, ctx)
    res = compare_check(w, a, phi)
    out = Output()
    out.add("lhs", str(res.lhs), str(res.lhs))
    _z(out, "rhs", res.rhs)
    _flag(out, res.equal)
    return out


def run_conductor(forms, ctx, args) -> Output:
    _arity(forms, 1, "(conductor (galmod ...)) or (conductor (chai ...))", forms[0] if forms else None)
    node = dsl.expect_list(forms[0])
    out = Output()
    if node.head == "chai":
        f = dsl.Fields(node, ["ct", "ca", "gamma"])
        vals = []
        for key in ("ct", "ca"):
            k = f.need(key)
            if len(k.args) != 1:
                raise dsl.DslError(f"({key} value)", k)
            vals.append(dsl.rational(k.args[0]))
        try:
            c = cd.chai_combine(vals[0], vals[1], f.int_of("gamma"))
        except TropivolError as e:
            raise dsl.DslError.wrap(e, node) from None
        _q(out, "c", c)
        return out
    v = dsl.galmod(node, ctx)
    try:
        c = cd.torus_conductor(v)
    except TropivolError as e:
        raise dsl.DslError.wrap(e, node) from None
    _q(out, "c", c)
    _q(out, "artin", cd.artin_conductor(v))
    return out


def run_trace(forms, ctx, args) -> Output:
    _arity(forms, 1, "(trace (galmod ...))", forms[0] if forms else None)
    t = cd.trace_decomposition(dsl.galmod(forms[0], ctx))
    out = Output()
    _m(out, "trace", t.trace)
    _cols(out, "kernel", t.b_part)
    out.add("split-rank", str(t.split_rank), t.split_rank)
    _cols(out, "split-basis", t.split_basis)
    _cols(out, "fixed", t.fixed_basis)
    _ints(out, "isogeny-cokernel", t.isogeny_cokernel)
    return out


def run_additivity(forms, ctx, args) -> Output:
    shape = "(additivity (galmod ...) (inj (mat ...)))"
    _arity(forms, 2, shape, forms[0] if forms else None)
    v = dsl.galmod(forms[0], ctx)
    inj = dsl.expect_list(forms[1], "inj")
    if len(inj.args) != 1:
        raise dsl.DslError("(inj (mat ...))", inj)
    s = dsl.matrix(inj.args[0], ctx)
    try:
        res = cd.additivity_check(v, s)
    except TropivolError as e:
        raise dsl.DslError.wrap(e, inj) from None
    out = Output()
    _q(out, "c-sub", res.c_sub)
    _q(out, "c-mid", res.c_middle)
    _q(out, "c-quot", res.c_quotient)
    _flag(out, res.equal)
    return out


def run_snf(forms, ctx, args) -> Output:
    _arity(forms, 1, "(snf (mat ...))", forms[0] if forms else None)
    m = dsl.matrix(forms[0], ctx)
    s = smith_normal_form(m)
    out = Output()
    _ints(out, "d", list(s.d))
    _m(out, "U", s.U)
    _m(out, "V", s.V)
    torsion = [x for x in s.d if x > 1]
    _ints(out, "torsion", torsion)
    out.add("free-rank", str(m.rows - s.rank), m.rows - s.rank)
    return out


RUNNERS: dict[str, Callable] = {
    "vol": run_vol, "integrate": run_integrate, "fubini": run_fubini, "cov": run_cov,
    "motivic": run_motivic, "compare": run_compare, "conductor": run_conductor, "trace": run_trace,
    "additivity": run_additivity, "snf": run_snf,
}


# ---------------------------------------------------------------------------
# generator

def generate(kind: str, seed: int | None) -> list[Node]:
    """One random document of the given kind."""
    rng = gen.rng_from(seed)
    if kind == "vol":
        return [SList((dsl.sym("vol"), dsl.w_defset(gen.oracle_cell(rng, rng.randint(1, 2)))))]
    if kind == "integrate":
        inst = gen.product_instance(rng)
        a = inst.ay
        phi = gen.dim_function(rng, a.profile, a.cells[0].centers)
        return [dsl.lst("integrate", dsl.w_defset(a), dsl.w_dimfun(phi))]
    if kind == "fubini":
        inst = gen.product_instance(rng)
        return [dsl.lst("fubini", dsl.lst("x", dsl.w_defset(inst.ax)), dsl.lst("y", dsl.w_defset(inst.ay)),
                        dsl.w_dimfun(inst.phi))]
    if kind == "cov":
        inst = gen.map_instance(rng)
        return [dsl.lst("cov", dsl.w_defset(inst.a), dsl.w_map(inst.scale, inst.offset), dsl.w_dimfun(inst.phi))]
    if kind == "additivity":
        group = rng.choice(["Z2", "Z3", "S3"])
        middle, inj = gen.exact_sequence(rng, group)
        return [dsl.lst("additivity", dsl.w_galmod(middle), dsl.lst("inj", dsl.w_matrix(inj)))]
    raise ValueError(kind)


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; status 2 is reserved for failed checks."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def gen_main(argv: list[str]) -> int:
    p = _Parser(prog="tropivol gen", description="Emit random documents (seeded by TROPIVOL_SEED).")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", type=Path, help="write <kind>_<k>.sx files here instead of stdout")
    args = p.parse_args(argv)
    env = os.environ.get("TROPIVOL_SEED")
    try:
        base = int(env) if env is not None else 0
    except ValueError:
        print(f"error: TROPIVOL_SEED must be an integer, got {env!r}", file=sys.stderr)
        return EXIT_ERROR
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        doc = generate(args.kind, base * 100003 + k)
        text = "".join(pretty(x) + "\n" for x in doc)
        if args.out is not None:
            (args.out / f"{args.kind}_{k:03d}.sx").write_text(text)
        else:
            sys.stdout.write(("\n" if k else "") + text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# driver

def run_text(verb: str, text: str, source: str, args: argparse.Namespace,
             warn: Callable[[str], None] | None = None) -> tuple[Output, int]:
    """Parse and dispatch; raises ParseError/DslError/TropivolError."""
    def on_warn(msg: str, node: Node) -> None:
        if warn is not None:
            warn(f"warning: {source}:{node.line}:{node.col}: {msg}")

    doc = parse(text)
    forms = _body(doc, verb)
    if not forms:
        raise dsl.DslError(f"({verb} ...) is empty", doc[0])
    ctx = dsl.Context(on_warn)
    try:
        out = RUNNERS[verb](forms, ctx, args)
    except (dsl.DslError, ParseError):
        raise
    except TropivolError as e:
        raise dsl.DslError.wrap(e, doc[0]) from None
    code = EXIT_UNEQUAL if verb in CHECK_VERBS and out.equal is False else EXIT_OK
    return out, code


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tropivol",
                                description="Dimensional volumes, integrals and conductors from S-expression files.")
    p.add_argument("verb", choices=VERBS + ("gen",))
    p.add_argument("file", type=Path)
    p.add_argument("--json", action="store_true", help="print a JSON object instead of key = value lines")
    p.add_argument("--oracle-lmax", type=int, metavar="N", help="vol: also run the truncation oracle up to ell = N")
    p.add_argument("--oracle-imax", type=int, metavar="N", help="vol: also run the truncation oracle up to shift N")
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv and argv[0] == "gen":
            return gen_main(argv[1:])
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ERROR
    for flag in ("oracle_lmax", "oracle_imax"):
        val = getattr(args, flag)
        if val is not None and val < 1:
            print(f"error: --{flag.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_ERROR
    source = str(args.file)
    try:
        text = args.file.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        print(f"error: {source}: {e}", file=sys.stderr)
        return EXIT_ERROR
    try:
        out, code = run_text(args.verb, text, source, args, warn=lambda s: print(s, file=sys.stderr))
    except (ParseError, dsl.DslError) as e:
        print(f"error: {source}:{e.line}:{e.col}: {e.message}", file=sys.stderr)
        return EXIT_ERROR
    except RecursionError:
        print(f"error: {source}: input nested too deeply", file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        sys.stdout.write(json.dumps({"verb": args.verb, **out.data}, sort_keys=False) + "\n")
    else:
        sys.stdout.write(out.text())
    return code


if __name__ == "__main__":
    sys.exit(main())
