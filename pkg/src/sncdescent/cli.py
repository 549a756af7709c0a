"""Command-line front end: demos, file-driven runs and verification reports.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 precision exhausted
(or a tower that never stabilizes).
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from dataclasses import dataclass
from dataclasses import field as dc_field

from .constructors import DivisorSpec, Precision, check_bl_sequence, completion_tower
from .descent import DescentDatum, check_cocycle, glue, verify_roundtrip
from .diagrams import (
    ChainModule,
    DiagramModule,
    grothendieck_construction,
    is_cocartesian_diagram,
    nerve,
    ring_diagram,
    strata_poset,
)
from .errors import (
    CocycleInvalid,
    DescentError,
    NoStabilization,
    PrecisionExhausted,
    StructuralError,
    UnsupportedError,
)
from .field import Field
from .fileformat import InputError, emit_report, parse_entry, parse_input
from .modules import PresentedModule
from .poly import Polynomial
from .rings import PresentedRing
from .samples import (
    a1_ring_checks,
    a1_suite,
    brute_force_chain_counts,
    random_qx_module,
    torsion_module,
)
from .smith import smith_invariants
from .towers import module_to_tower, tower_stabilized_presentation

OK, FAIL, INPUT, PRECISION = 0, 1, 2, 3
ENV_PREFIX = "SNCDESCENT_"
DEMOS = ("a1", "a2-crossing", "nerve-census", "bl-sequence")

DEFAULTS = {"field": "QQ", "prec": 8, "prec_cap": 64, "deg": 10, "seed": 0, "format": "text"}
_INTS = ("prec", "prec_cap", "deg", "seed")


@dataclass
class RunConfig:
    command: str
    path: str | None = None
    demo: str | None = None
    n: int | None = None
    field: Field = dc_field(default_factory=lambda: Field.parse("QQ"))
    prec: int = 8
    prec_cap: int = 64
    deg: int = 10
    seed: int = 0
    format: str = "text"
    explicit: frozenset = frozenset()  # settings given by env or flag

    def __post_init__(self):
        if self.prec < 2:
            raise InputError(f"precision level must be at least 2, got {self.prec}")
        if self.deg < 1:
            raise InputError(f"degree bound must be at least 1, got {self.deg}")
        if self.prec_cap < self.prec:
            raise InputError(f"precision cap {self.prec_cap} is below the level {self.prec}")
        if self.format not in ("text", "json"):
            raise InputError(f"format must be text or json, got {self.format!r}")

    @property
    def precision(self) -> Precision:
        return Precision(self.prec, self.prec_cap)


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--field", default=d, help="QQ or GF(p) (default QQ)")
    p.add_argument("--prec", type=int, default=d, help="truncation level (default 8)")
    p.add_argument("--prec-cap", dest="prec_cap", type=int, default=d, help="escalation cap (default 64)")
    p.add_argument("--deg", type=int, default=d, help="degree bound (default 10)")
    p.add_argument("--seed", type=int, default=d, help="seed for randomized suites (default 0)")
    p.add_argument("--format", choices=("text", "json"), default=d, help="report format (default text)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sncdescent", description="Descent along SNC divisors.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("demo", help="run a built-in demo")
    p.add_argument("name", choices=DEMOS)
    _global_flags(p, suppress=True)
    p = sub.add_parser("run", help="run the RUN directives of an input file")
    p.add_argument("path")
    _global_flags(p, suppress=True)
    p = sub.add_parser("strata", help="list the strata poset, nerve and Grothendieck construction")
    p.add_argument("n", type=int)
    _global_flags(p, suppress=True)
    return parser


def make_config(args: argparse.Namespace, env=None) -> RunConfig:
    """Defaults, then SNCDESCENT_* environment variables, then flags."""
    env = os.environ if env is None else env
    values = dict(DEFAULTS)
    explicit = set()
    for key in DEFAULTS:
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = raw
            explicit.add(key)
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
            explicit.add(key)
    for key in _INTS:
        try:
            values[key] = int(values[key])
        except ValueError:
            raise InputError(f"{key} must be an integer, got {values[key]!r}") from None
    try:
        fld = Field.parse(str(values["field"]))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return RunConfig(
        command=args.command,
        path=getattr(args, "path", None),
        demo=getattr(args, "name", None),
        n=getattr(args, "n", None),
        field=fld,
        prec=values["prec"],
        prec_cap=values["prec_cap"],
        deg=values["deg"],
        seed=values["seed"],
        format=values["format"],
        explicit=frozenset(explicit),
    )


# -- reports -----------------------------------------------------------------

def _block(command: str, target: str, ok: bool, lines, code: int | None = None, **extra) -> dict:
    code = (OK if ok else FAIL) if code is None else code
    verdict = {OK: "pass", FAIL: "fail", INPUT: "error", PRECISION: "exhausted"}[code]
    out = {"command": command, "target": target, "verdict": verdict, "exit_code": code, "lines": list(lines)}
    out.update(extra)
    return out


def _exit_code(blocks) -> int:
    codes = {b["exit_code"] for b in blocks}
    for c in (INPUT, PRECISION, FAIL):
        if c in codes:
            return c
    return OK


def _report(cfg: RunConfig, blocks) -> dict:
    return {
        "config": {
            "command": cfg.command,
            "field": str(cfg.field),
            "prec": cfg.prec,
            "prec_cap": cfg.prec_cap,
            "deg": cfg.deg,
            "seed": cfg.seed,
        },
        "runs": blocks,
        "exit_code": _exit_code(blocks),
    }


def describe_module(M: PresentedModule) -> list:
    lines = [f"presentation: {M!r}"]
    if len(M.ring.vars) == 1 and not M.ring.relations:
        inv = smith_invariants(M)
        lines.append(f"free rank: {inv.rank}")
        lines.append("invariant factors: " + (", ".join(repr(f) for f in inv.factors) or "none"))
    return lines


def _glue_lines(rep) -> list:
    lines = describe_module(rep.module)
    lines.append(f"precision: {rep.precision.level} (cap {rep.precision.cap}), pole window {rep.window}")
    for k in sorted(rep.verdicts):
        lines.append(f"{k}: {'ok' if rep.verdicts[k] else 'FAILED'}")
    for k, v in sorted(rep.stabilization.items()):
        lines.append(f"stabilization {k}: {'none' if v is None else f'level {v}'}")
    return lines


def _glue_block(d: DescentDatum, target: str, prec: Precision | None = None) -> dict:
    try:
        rep = glue(d, prec)
    except CocycleInvalid as exc:
        triple = list(exc.witness) if exc.witness else []
        return _block("glue", target, False, [f"cocycle violated on {' -> '.join(triple)}", str(exc)], witness=triple)
    except PrecisionExhausted as exc:
        return _block("glue", target, False, [str(exc)], code=PRECISION)
    return _block(
        "glue",
        target,
        rep.ok,
        _glue_lines(rep),
        precision=rep.precision.level,
        window=rep.window,
        verdicts={k: bool(v) for k, v in rep.verdicts.items()},
    )


def _roundtrip_block(M: PresentedModule, spec: DivisorSpec, prec: Precision, target: str) -> dict:
    t0 = time.perf_counter()
    try:
        rep = verify_roundtrip(M, spec, prec)
    except PrecisionExhausted as exc:
        return _block("verify_roundtrip", target, False, [str(exc)], code=PRECISION)
    lines = [f"unit M -> glued: {'iso' if rep.iso else 'NOT iso'}"]
    lines += _glue_lines(rep.glue)
    if rep.smith_input is not None:
        lines.append(f"smith input {_smith_text(rep.smith_input)}; output {_smith_text(rep.smith_output)}")
    lines.append(f"time: {time.perf_counter() - t0:.2f}s")
    return _block(
        "verify_roundtrip",
        target,
        rep.ok,
        lines,
        precision=rep.glue.precision.level,
        smith_agree=rep.smith_agree,
    )


def _smith_text(inv) -> str:
    return f"rank {inv.rank}, factors [{', '.join(repr(f) for f in inv.factors)}]"


def _cocycle_block(d: DescentDatum, target: str) -> dict:
    v = check_cocycle(d)
    if v:
        return _block("check_cocycle", target, True, ["cocycle condition holds on every triple"])
    return _block(
        "check_cocycle",
        target,
        False,
        [f"cocycle violated on {' -> '.join(v.triple)}", v.witness],
        witness=list(v.triple),
    )


def _stabilize_block(M: PresentedModule, var: str, depth: int, target: str) -> dict:
    R = M.ring
    tower = completion_tower(R, [R.gen(var)], depth)
    try:
        st = tower_stabilized_presentation(module_to_tower(M, tower))
    except NoStabilization as exc:
        return _block("stabilize", target, False, [str(exc)], code=PRECISION)
    return _block("stabilize", target, True, [f"stabilized at level {st.level}", f"presentation: {st.module!r}"], level=st.level)


# -- demos -------------------------------------------------------------------

def _structural_block(spec: DivisorSpec, prec: Precision) -> dict:
    nv = nerve(strata_poset(spec.n))
    cat = grothendieck_construction(nv)
    diag = ring_diagram(spec, prec)
    checks = {
        "face identities": nv.check_identities(),
        "composition in the Grothendieck construction": cat.check_composition(),
        "functoriality of the ring diagram": diag.check_functoriality(),
        "R is coCartesian": bool(is_cocartesian_diagram(DiagramModule.from_module(diag, PresentedModule.free(spec.ring, 1)))),
    }
    lines = [f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items()]
    return _block("structure", f"n={spec.n}", all(checks.values()), lines)


def _torsion_datum(R: PresentedRing, prec: Precision) -> DescentDatum:
    """n = 1 datum with nothing on the open stratum and k[[x]]/(x^3) on the divisor."""
    spec = DivisorSpec(R, ["x"])
    diag = ring_diagram(spec, prec)
    e, D = frozenset(), frozenset({1})
    modules = {e: ChainModule(diag.ring((e,)), 0), D: ChainModule(diag.ring((D,)), 1, [[diag.ring((D,)).element("x^3")]])}
    return DescentDatum(spec, prec, modules, {(e, D): []}, name="torsion")


def demo_a1(cfg: RunConfig) -> list:
    prec = cfg.precision
    R = PresentedRing(["x"], field=cfg.field)
    spec = DivisorSpec(R, ["x"])
    blocks = []
    t0 = time.perf_counter()
    checks = a1_ring_checks(prec)
    lines = [f"{label}: {desc}" + ("" if ok else " FAILED") for label, ok, desc in checks]
    lines.append(f"time: {time.perf_counter() - t0:.2f}s")
    blocks.append(_block("rings", "A^1, D = {0}", all(ok for _, ok, _ in checks), lines))
    blocks.append(_structural_block(spec, prec))
    suite = a1_suite(R)
    rng = random.Random(cfg.seed)
    suite += [(f"random #{i} (seed {cfg.seed})", random_qx_module(rng, R)) for i in range(3)]
    for name, M in suite:
        blocks.append(_roundtrip_block(M, spec, prec, name))
    blocks.append(_glue_block(_torsion_datum(R, prec), "torsion datum"))
    return blocks


def demo_a2(cfg: RunConfig) -> list:
    prec = cfg.precision
    R = PresentedRing(["x", "y"], field=cfg.field)
    spec = DivisorSpec(R, ["x", "y"])
    blocks = [_structural_block(spec, prec)]
    for name, M in (
        ("R", PresentedModule.free(R, 1)),
        ("R^2", PresentedModule.free(R, 2)),
        ("R/(x)", torsion_module(R, 0, [1])),
    ):
        blocks.append(_roundtrip_block(M, spec, prec, name))
    return blocks


def demo_census(cfg: RunConfig) -> list:
    lines = []
    ok = True
    for n in range(1, 5):
        counts = nerve(strata_poset(n)).counts(max(3, n + 1))
        brute = tuple(brute_force_chain_counts(n, m) for m in range(1, len(counts) + 1))
        ok = ok and counts == brute
        lines.append(f"n={n}: " + " ".join(map(str, counts)) + ("" if counts == brute else f" (brute force {brute})"))
    return [_block("nerve-census", "n <= 4", ok, lines)]


def demo_bl(cfg: RunConfig) -> list:
    blocks = []
    for names, deg in ((["x"], cfg.deg), (["x", "y"], min(cfg.deg, 6))):
        R = PresentedRing(names, field=cfg.field)
        t0 = time.perf_counter()
        rep = check_bl_sequence(R, "x", cfg.precision, deg, seed=cfg.seed)
        lines = [
            f"exact: {'true' if rep.exact else 'false'}",
            f"injective: {rep.injective}, middle exact: {rep.middle_exact}, surjective: {rep.surjective}",
            f"level {rep.level}, degree bound {rep.degree_bound}, targets checked {rep.checked_targets}",
            f"time: {time.perf_counter() - t0:.2f}s",
        ]
        lines += [f"witness: {w}" for w in rep.witnesses]
        blocks.append(_block("bl-sequence", f"{R!r}, f = x", rep.exact, lines))
    return blocks


DEMO_FUNCS = {"a1": demo_a1, "a2-crossing": demo_a2, "nerve-census": demo_census, "bl-sequence": demo_bl}


def run_demo(cfg: RunConfig) -> dict:
    if cfg.demo not in DEMO_FUNCS:
        raise InputError(f"unknown demo {cfg.demo!r}; expected one of {', '.join(DEMOS)}")
    return _report(cfg, DEMO_FUNCS[cfg.demo](cfg))


def run_strata(cfg: RunConfig) -> dict:
    try:
        poset = strata_poset(cfg.n)
    except UnsupportedError as exc:
        raise InputError(str(exc)) from None
    names = [f"f{i}" for i in range(1, cfg.n + 1)]

    def label(T):
        return "{" + ",".join(names[i - 1] for i in sorted(T)) + "}"

    nv = nerve(poset)
    cat = grothendieck_construction(nv)
    lines = [f"poset: {len(poset)} strata, {len(poset.strict_relations())} strict relations"]
    lines += [f"  Y{label(b)} > Y{label(a)}" for a, b in poset.strict_relations()]
    lines.append("nerve counts: " + " ".join(map(str, nv.counts())))
    lines += ["  " + s for s in nv.listing(label)]
    lines.append(f"Grothendieck construction: {len(cat)} objects, {len(cat.non_identity())} non-identity morphisms")
    for f in cat.non_identity():
        src = " > ".join("Y" + label(T) for T in f.src)
        tgt = " > ".join("Y" + label(T) for T in f.tgt)
        lines.append(f"  [{src}] -> [{tgt}] via {list(f.mu)}")
    return _report(cfg, [_block("strata", f"n={cfg.n}", nv.check_identities(), lines)])


# -- input files ---------------------------------------------------------------

def _terms(src, R: PresentedRing, allow_negative=lambda v: False) -> dict:
    terms = parse_entry(src, list(R.vars), R.field)
    for exp in terms:
        for v, k in enumerate(exp):
            if k < 0 and not allow_negative(v):
                raise InputError(f"negative power of {R.vars[v]} is not allowed here", src.line, src.col)
    return terms


def _module_from_decl(decl, R: PresentedRing) -> PresentedModule:
    cols = []
    for rel in decl.rels:
        if len(rel) != decl.n_gens:
            raise InputError(f"relation has {len(rel)} entries, expected {decl.n_gens}", rel[0].line, rel[0].col)
        cols.append([R(Polynomial(R.poly, _terms(s, R))) for s in rel])
    return PresentedModule(R, decl.n_gens, cols)


def _chain_entries(rows, ring, R) -> list:
    inverted = ring.inverted
    return [[ring.element(_terms(s, R, lambda v: v in inverted), exact=False) for s in row] for row in rows]


def _datum_from_decl(decl, spec: DivisorSpec, prec: Precision) -> DescentDatum:
    R = spec.ring
    diag = ring_diagram(spec, prec)
    poset = strata_poset(spec.n)
    modules = {}
    for label, mdecl in decl.strata.items():
        T = spec.subset(list(label))
        ring = diag.ring((T,))
        cols = _chain_entries(mdecl.rels, ring, R)
        for rel, col in zip(mdecl.rels, cols):
            if len(col) != mdecl.n_gens:
                raise InputError(f"relation has {len(col)} entries, expected {mdecl.n_gens}", rel[0].line, rel[0].col)
        modules[T] = ChainModule(ring, mdecl.n_gens, cols)
    for T in poset.elements:
        if T not in modules:
            raise InputError(f"datum {decl.name!r} has no STRATUM for {spec.label(T)}", decl.line, 1)
    rho = {}
    for r in decl.rho:
        Y, Z = spec.subset(list(r.src)), spec.subset(list(r.tgt))
        if not Y < Z:
            raise InputError(f"RHO needs a strict inclusion, got {spec.label(Y)} -> {spec.label(Z)}", r.line, 1)
        ring = diag.ring((Y, Z))
        rows = _chain_entries(r.rows, ring, R)
        n_src, n_tgt = modules[Y].n_gens, modules[Z].n_gens
        if len(rows) != n_tgt or any(len(row) != n_src for row in rows):
            raise InputError(f"RHO {spec.label(Y)} -> {spec.label(Z)} must have {n_tgt} rows of {n_src} entries", r.line, 1)
        rho[(Y, Z)] = [[rows[i][j] for i in range(n_tgt)] for j in range(n_src)]
    for Z, Y in poset.strict_relations():
        if (Y, Z) in rho:
            continue
        a, b = modules[Y].n_gens, modules[Z].n_gens
        ring = diag.ring((Y, Z))
        if a == b or a == 0 or b == 0:
            # identity, or the zero map when one side has no generators
            rho[(Y, Z)] = [[ring.element(int(i == j)) for i in range(b)] for j in range(a)]
        else:
            raise InputError(
                f"datum {decl.name!r} needs a RHO for {spec.label(Y)} -> {spec.label(Z)} (sizes {a} and {b} differ)",
                decl.line,
                1,
            )
    try:
        return DescentDatum(spec, prec, modules, rho, name=decl.name)
    except StructuralError as exc:
        raise InputError(str(exc), decl.line, 1) from None


def run_file(cfg: RunConfig) -> dict:
    try:
        with open(cfg.path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {cfg.path}: {exc.strerror}") from None
    inp = parse_input(text)
    fld = inp.field if inp.field is not None and "field" not in cfg.explicit else cfg.field
    level = inp.prec if inp.prec is not None and "prec" not in cfg.explicit else cfg.prec
    cap = inp.cap if inp.cap is not None and "prec_cap" not in cfg.explicit else max(cfg.prec_cap, level)
    if level < 2 or cap < level:
        raise InputError(f"bad precision {level} with cap {cap}")
    prec = Precision(level, cap)
    R = PresentedRing(inp.ring, field=fld)
    try:
        spec = DivisorSpec(R, inp.divisor) if inp.divisor else None
    except DescentError as exc:
        raise InputError(str(exc)) from None

    modules = {name: _module_from_decl(d, R) for name, d in inp.modules.items()}
    data = {}
    for name, d in inp.data.items():
        if spec is None:
            raise InputError("a DATUM needs a DIVISOR line", d.line, 1)
        data[name] = _datum_from_decl(d, spec, prec)

    blocks = []
    for run in inp.runs:
        target = run.args[0]
        if run.command in ("glue", "check_cocycle"):
            if target not in data:
                raise InputError(f"unknown datum {target!r}", run.line, 1)
        elif target not in modules:
            raise InputError(f"unknown module {target!r}", run.line, 1)
        if run.command == "verify_roundtrip" and spec is None:
            raise InputError("verify_roundtrip needs a DIVISOR line", run.line, 1)
        if run.command == "stabilize":
            var, depth = run.args[1], run.args[2]
            if var not in R.vars:
                raise InputError(f"unknown variable {var!r}", run.line, 1)
            if not depth.isdigit() or int(depth) < 1:
                raise InputError(f"depth must be a positive integer, got {depth!r}", run.line, 1)

    for run in inp.runs:
        target = run.args[0]
        if run.command == "glue":
            blocks.append(_glue_block(data[target], target, prec))
        elif run.command == "check_cocycle":
            blocks.append(_cocycle_block(data[target], target))
        elif run.command == "verify_roundtrip":
            blocks.append(_roundtrip_block(modules[target], spec, prec, target))
        else:
            blocks.append(_stabilize_block(modules[target], run.args[1], int(run.args[2]), target))
    if not blocks:
        blocks.append(_block("run", cfg.path, True, ["no RUN directives"]))
    return _report(cfg, blocks)


# -- entry point ---------------------------------------------------------------

def _error_report(exc: Exception, code: int) -> dict:
    out = {"error": str(exc), "exit_code": code, "runs": []}
    if isinstance(exc, InputError) and exc.line:
        out["line"] = exc.line
        out["column"] = exc.col
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = getattr(args, "format", None) or os.environ.get(ENV_PREFIX + "FORMAT", "text")
    fmt = fmt if fmt in ("text", "json") else "text"
    try:
        cfg = make_config(args)
        if cfg.command == "demo":
            report = run_demo(cfg)
        elif cfg.command == "run":
            report = run_file(cfg)
        else:
            report = run_strata(cfg)
    except InputError as exc:
        report = _error_report(exc, INPUT)
        if fmt == "text":
            print(f"error: {exc}", file=sys.stderr)
    except (StructuralError, UnsupportedError) as exc:
        report = _error_report(exc, INPUT)
        if fmt == "text":
            print(f"error: {exc}", file=sys.stderr)
    if fmt == "text" and "error" in report:
        return report["exit_code"]
    sys.stdout.write(emit_report(report, fmt))
    return report["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
