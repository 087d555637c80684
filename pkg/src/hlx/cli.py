"""Command-line entry point ``hlx``.

Exit codes: 0 yes/valid, 1 no/invalid, 2 usage or schema error, 3 search
budget exhausted or inconclusive.  Diagnostics go to stderr; ``--json`` puts a
machine-readable report document on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .exactlin import Field, FieldMismatch, Q
from .extension import ConstructionError, is_stem, pullback, rce_validate, stem_reduce
from .factorset import (
    InvalidFactorSet,
    NoInvariantComplement,
    extension_from_factorset,
    factorset_from_extension,
    factorset_validate,
)
from .homlie import LinearMap, validate as algebra_validate
from .isoclinism import (
    CertificationFailed,
    IsoclinismWitness,
    SearchBudget,
    TwistObstructed,
    decompose_family,
    search_isoclinism,
    search_isomorphism,
    solve_beta_prime,
    witness_validate,
)
from .serialize import SchemaError, dump, emit, encode, parse, witness_data

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str, kind: str | None = None):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    doc = parse(data)
    if kind is not None and doc.kind != kind:
        raise SchemaError("$.kind", f"{path}: expected a {kind} document, got {doc.kind!r}")
    return doc


def _write(path: str | None, data: bytes):
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(path).write_bytes(data)


def _report(args, field: Field, body: dict) -> None:
    if args.json:
        _write(None, dump(dict(body), field))


def _say(msg: str):
    print(msg, file=sys.stderr)


def _same_field(*docs):
    f = docs[0].field
    for d in docs[1:]:
        if d.field != f:
            raise FieldMismatch(f"documents over {f.descriptor} and {d.field.descriptor}")
    return f


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------


def cmd_validate(args) -> int:
    doc = _read(args.file)
    v = doc.value
    if doc.kind == "algebra":
        rep = algebra_validate(v)
    elif doc.kind == "pair":
        rep = algebra_validate(v.ambient)
        rep.add("ideal", v.check())
    elif doc.kind == "extension":
        rep = rce_validate(v)
    elif doc.kind == "factorset":
        rep = factorset_validate(v)
    else:
        _say(f"{doc.kind} document is well formed")
        _report(args, doc.field, {"command": "validate", "document": doc.kind, "ok": True})
        return EXIT_YES
    body = {"command": "validate", "document": doc.kind, "ok": rep.ok, "checks": rep.as_dict()}
    _report(args, doc.field, body)
    if not args.json:
        print("valid" if rep.ok else "invalid")
        for name, c in rep.checks.items():
            if not c.ok:
                print(f"  {name}: {c.detail} witness={json.dumps(c.as_dict().get('witness'))}")
    return EXIT_YES if rep.ok else EXIT_NO


def cmd_invariants(args) -> int:
    doc = _read(args.file, "extension")
    inv = doc.value.invariants()
    if args.json:
        _report(args, doc.field, {"command": "invariants", "invariants": inv})
    else:
        for k in sorted(inv):
            print(f"{k} {inv[k]}")
    return EXIT_YES


def _need_valid(e, what):
    rep = rce_validate(e)
    if not rep.ok:
        raise UsageError(f"{what} is not a valid relative central extension: fails {rep.failures()}")


def cmd_stem_reduce(args) -> int:
    doc = _read(args.ext, "extension")
    e = doc.value
    _need_valid(e, args.ext)
    r = stem_reduce(e, use_derived=args.derived_flag)
    _write(args.output, dump(r.extension))
    stem = is_stem(r.extension)
    body = {"command": "stem-reduce", "dim_N": r.kernel_ideal.dim, "is_stem": stem,
            "twist_obstructed": r.twist_obstructed}
    _report(args, doc.field, body)
    _say(f"quotient by dim {r.kernel_ideal.dim}; stem={stem}" + (" (twist obstructed)" if r.twist_obstructed else ""))
    return EXIT_YES if stem else EXIT_NO


def cmd_factorset_extract(args) -> int:
    doc = _read(args.ext, "extension")
    e = doc.value
    _need_valid(e, args.ext)
    try:
        ex = factorset_from_extension(e)
    except NoInvariantComplement as exc:
        _say(str(exc))
        _report(args, doc.field, {"command": "factorset extract", "ok": False, "reason": str(exc)})
        return EXIT_NO
    _write(args.output, dump(ex.factorset))
    return EXIT_YES


def cmd_factorset_build(args) -> int:
    pd, fd = _read(args.pair, "pair"), _read(args.factorset, "factorset")
    _same_field(pd, fd)
    try:
        e = extension_from_factorset(fd.value, pd.value)
    except (InvalidFactorSet, ConstructionError) as exc:
        _say(str(exc))
        _report(args, pd.field, {"command": "factorset build", "ok": False, "reason": str(exc)})
        return EXIT_NO
    _write(args.output, dump(e))
    return EXIT_YES


def _budget(args) -> SearchBudget:
    return SearchBudget(args.mode, args.budget, args.seed)


def _result(args, field, command, res, to_doc) -> int:
    if res.found:
        _write(None, emit(to_doc(res.value)))
        _say(f"{command}: found after {res.explored} candidates")
        return EXIT_YES
    body = {"command": command, "status": res.status, "reason": res.reason, "explored": res.explored}
    if args.json:
        _report(args, field, body)
    else:
        print(f"{res.status}: {res.reason}")
    return EXIT_BUDGET if res.status == "budget_exhausted" else EXIT_NO


def cmd_isoclinic(args) -> int:
    d1, d2 = _read(args.e1, "extension"), _read(args.e2, "extension")
    f = _same_field(d1, d2)
    e1, e2 = d1.value, d2.value
    _need_valid(e1, args.e1)
    _need_valid(e2, args.e2)
    witness = None
    if args.mode == "verify":
        if not args.witness:
            raise UsageError("--mode verify needs --witness")
        wdoc = _read(args.witness, "witness")
        _same_field(d1, wdoc)
        wd = wdoc.value
        gamma = _map(e1.codomain, e2.codomain, wd.gamma, "gamma")
        bp = wd.beta_prime if wd.beta_prime is not None else solve_beta_prime(e1, e2, wd.gamma)
        if bp is None:
            print("not_found: no beta' is compatible with gamma")
            return EXIT_NO
        witness = IsoclinismWitness(gamma, bp, e1, e2)
    res = search_isoclinism(e1, e2, _budget(args), witness)
    if witness is not None and not res.found and args.json:
        body = {"command": "isoclinic", "status": res.status, "reason": res.reason,
                "checks": witness_validate(witness).as_dict()}
        _report(args, f, body)
        return EXIT_NO
    return _result(args, f, "isoclinic", res, lambda w: encode(witness_data(w)))


def _map(a, b, m, what):
    try:
        return LinearMap(a, b, m)
    except ValueError as exc:
        raise SchemaError(f"$.{what}", str(exc)) from None


def cmd_isomorphic(args) -> int:
    from .extension import ExtMorphism

    d1, d2 = _read(args.e1, "extension"), _read(args.e2, "extension")
    f = _same_field(d1, d2)
    e1, e2 = d1.value, d2.value
    _need_valid(e1, args.e1)
    _need_valid(e2, args.e2)
    morphism = None
    if args.mode == "verify":
        if not args.witness:
            raise UsageError("--mode verify needs --witness")
        wdoc = _read(args.witness, "witness")
        _same_field(d1, wdoc)
        wd = wdoc.value
        if wd.beta is None:
            raise SchemaError("$.beta", "missing key")
        morphism = ExtMorphism(_map(e1.codomain, e2.codomain, wd.gamma, "gamma"),
                               _map(e1.domain, e2.domain, wd.beta, "beta"), e1, e2)
    res = search_isomorphism(e1, e2, _budget(args), morphism)
    return _result(args, f, "isomorphic", res, lambda m: encode(witness_data(m)))


def cmd_pullback(args) -> int:
    d1, d2, dg = _read(args.e1, "extension"), _read(args.e2, "extension"), _read(args.gamma, "witness")
    _same_field(d1, d2, dg)
    e1, e2 = d1.value, d2.value
    _need_valid(e1, args.e1)
    _need_valid(e2, args.e2)
    gamma = _map(e1.codomain, e2.codomain, dg.value.gamma, "gamma")
    try:
        pb = pullback(e1, e2, gamma)
    except (ValueError, ConstructionError) as exc:
        _say(str(exc))
        print(f"invalid: {exc}")
        return EXIT_NO
    _write(args.output, dump(pb.extension))
    return EXIT_YES


def cmd_decompose(args) -> int:
    doc = _read(args.ext, "extension")
    e = doc.value
    _need_valid(e, args.ext)
    try:
        d = decompose_family(e, use_derived=args.derived_flag)
    except (TwistObstructed, CertificationFailed) as exc:
        kind = "twist_obstructed" if isinstance(exc, TwistObstructed) else "certification_failed"
        _say(f"{kind}: {exc}")
        if args.json:
            _report(args, doc.field, {"command": "decompose", "status": kind, "reason": str(exc)})
        else:
            print(f"{kind}: {exc}")
        return EXIT_NO
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "stem.json").write_bytes(dump(d.stem))
    (out / "abelian.json").write_bytes(dump(d.abelian))
    # iso.json maps product.json (stem x abelian) onto the input
    (out / "product.json").write_bytes(dump(d.iso.source))
    (out / "iso.json").write_bytes(dump(witness_data(d.iso)))
    body = {"command": "decompose", "dim_A": d.abelian.dim, "dim_stem_Mstar": d.stem.domain.dim,
            "files": ["abelian.json", "iso.json", "product.json", "stem.json"]}
    _report(args, doc.field, body)
    _say(f"stem part dim M*={d.stem.domain.dim}, abelian part dim {d.abelian.dim}")
    return EXIT_YES


def cmd_verify_suite(args) -> int:
    from .harness import verify_suite

    rep = verify_suite(args.seed, args.count, args.field, tuple(args.bounds))
    _write(None, dump(rep, args.field))
    return EXIT_YES if rep["ok"] else EXIT_NO


def cmd_generate(args) -> int:
    from .generate import generate_extension

    e = generate_extension(args.seed, tuple(args.bounds), args.field, args.kind)
    _write(args.output, dump(e))
    return EXIT_YES


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------


def _field_arg(text: str) -> Field:
    try:
        return Field.from_descriptor(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report document on stdout")

    p = argparse.ArgumentParser(prog="hlx", description="Relative central extensions of Hom-Lie algebra pairs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a document's axioms")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("invariants", parents=[common], help="print the eight filter dimensions")
    s.add_argument("file")
    s.set_defaults(fn=cmd_invariants)

    s = sub.add_parser("stem-reduce", parents=[common], help="quotient to a stem extension")
    s.add_argument("ext")
    s.add_argument("-o", "--output")
    s.add_argument("--derived-flag", action="store_true", help="use (M*)^2 instead of [M*, L]")
    s.set_defaults(fn=cmd_stem_reduce)

    fs = sub.add_parser("factorset", help="factor set extraction and construction")
    fsub = fs.add_subparsers(dest="action", required=True)
    s = fsub.add_parser("extract", parents=[common])
    s.add_argument("ext")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_factorset_extract)
    s = fsub.add_parser("build", parents=[common])
    s.add_argument("pair")
    s.add_argument("factorset")
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_factorset_build)

    for name, fn in (("isoclinic", cmd_isoclinic), ("isomorphic", cmd_isomorphic)):
        s = sub.add_parser(name, parents=[common], help=f"decide whether two extensions are {name}")
        s.add_argument("e1")
        s.add_argument("e2")
        s.add_argument("--mode", choices=("verify", "exhaustive", "heuristic"), default=None)
        s.add_argument("--witness")
        s.add_argument("--budget", type=int, default=10 ** 7)
        s.add_argument("--seed", type=int, default=0)
        s.set_defaults(fn=fn)

    s = sub.add_parser("pullback", parents=[common], help="pull back along gamma")
    s.add_argument("e1")
    s.add_argument("e2")
    s.add_argument("--gamma", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_pullback)

    s = sub.add_parser("decompose", parents=[common], help="split into a stem part times an abelian algebra")
    s.add_argument("ext")
    s.add_argument("--derived-flag", action="store_true")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_decompose)

    s = sub.add_parser("verify-suite", parents=[common], help="instance-check every claim")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--field", type=_field_arg, default=Q)
    s.add_argument("--bounds", type=int, nargs=2, default=(4, 6), metavar=("DIM_L", "DIM_MSTAR"))
    s.set_defaults(fn=cmd_verify_suite)

    s = sub.add_parser("generate", parents=[common], help="write a generated extension")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--field", type=_field_arg, default=Q)
    s.add_argument("--bounds", type=int, nargs=2, default=(4, 6), metavar=("DIM_L", "DIM_MSTAR"))
    s.add_argument("--kind", choices=("inclusion", "twisted", "factorset", "product", "quotient"))
    s.add_argument("-o", "--output")
    s.set_defaults(fn=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "mode", "unset") is None:
        args.mode = "verify" if args.witness else "exhaustive"
    try:
        return args.fn(args)
    except (SchemaError, FieldMismatch, UsageError) as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE
    except ValueError as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
