"""Command-line front end.

Exit codes: 0 certified, 1 certification negative, 2 usage or input error,
3 internal inconsistency (two independent checks disagreed).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import construction as cons
from .cyclofield import to_json as cyc_json
from .fibering import DegenerateRewrite, Fibered, ZeroCharacter, decide_fibering, scan_characters
from .freewords import (
    DEFAULT_RELATOR, RANK6, TWO_GEN, BadToken, FreeOfRank, kernel_rank, magnus_rewrite,
)
from .matmoebius import (
    eval_word, is_projective_identity, moebius_to_json, default_representation,
    representation_from_json,
)
from .ratfunc import certificate_to_json, eval_in_K, ping_pong_certify

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _load_rep(path):
    if path is None:
        return default_representation()
    with open(path, encoding="utf-8") as fh:
        return representation_from_json(json.load(fh))


def _config(args) -> cons.PipelineConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = cons.PipelineConfig.from_json(json.load(fh))
    else:
        cfg = cons.PipelineConfig()
    for flag, attr in (("relator", "relator"), ("beta", "beta"), ("length_bound", "length_bound"),
                       ("samples", "samples"), ("max_syllables", "max_syllables"),
                       ("n_max", "n_max"), ("seed", "seed")):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg, attr, value)
    return cfg


# -- commands -----------------------------------------------------------------

def cmd_verify(args) -> int:
    report = cons.full_report(_config(args), _load_rep(args.rep))
    lines = [f"verdict: {report['verdict']}"]
    if report["failure"]:
        lines.append(f"failed at {report['failure']['stage']}: {report['failure']['reason']}")
    if report["requirement"]:
        lines.append(f"requirement: n = {report['requirement']['n']}, "
                     f"trace = {report['requirement']['trace']['text']}")
    if report["kernel"]:
        lines.append(f"kernel: {report['kernel']['magnus']} -> free of rank {report['kernel']['rank']}")
    nfi = report["no_fix_infinity"]
    if nfi:
        lines.append(f"no element fixes infinity: {nfi['status']}"
                     + (f" ({nfi['words_checked']} words, length <= {nfi['length_bound']})"
                        if nfi["status"] == "passed" else ""))
    fp = report["free_product_samples"]
    if fp:
        lines.append(f"free product samples: {fp['status']}"
                     + (f" ({fp['nontrivial']}/{fp['count']} certified)" if fp["status"] != "skipped" else ""))
    if report["ascent"]:
        lines.append(f"u in psi(G): {report['ascent']['mu_membership']}")
    if report["total_rank"]:
        lines.append(f"strictly ascending HNN extension of a free group of rank {report['total_rank']}")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK if report["verdict"] == "certified" else EXIT_NEGATIVE


def cmd_relation(args) -> int:
    relator = args.relator or DEFAULT_RELATOR
    TWO_GEN.parse(relator)
    m = eval_word(relator, _load_rep(args.rep))
    ok = is_projective_identity(m)
    _emit(args, {"relator": relator, "projective_identity": ok, "value": moebius_to_json(m)},
          f"{relator}: {'projective identity' if ok else 'NOT the identity'}")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_requirement(args) -> int:
    try:
        res = cons.verify_requirement(args.beta or "aa", _load_rep(args.rep), args.n_max or 100)
    except (cons.RequirementNotMet, cons.OrientationReversing) as exc:
        _emit(args, {"beta": args.beta or "aa", "met": False, "reason": str(exc)}, f"not met: {exc}")
        return EXIT_NEGATIVE
    sign = "+" if res.sign > 0 else "-"
    _emit(args, {"beta": res.beta_word, "met": True, "n": res.n, "sign": res.sign,
                 "trace": cyc_json(res.trace_value)},
          f"trace of rho({res.beta_word}) = {res.trace_value} = {sign}(sqrt({res.n}) + 1/sqrt({res.n}))")
    return EXIT_OK


def cmd_magnus(args) -> int:
    relator = args.relator or DEFAULT_RELATOR
    sw = magnus_rewrite(TWO_GEN.parse(relator))
    rk = kernel_rank(sw)
    if isinstance(rk, FreeOfRank):
        payload = {"rewrite": str(sw), "kernel": "FreeOfRank", "rank": rk.rank,
                   "basis": [f"b{k}" for k in rk.basis]}
        text = f"{sw}\nkernel rank {rk.rank}, basis {', '.join(payload['basis'])}"
        code = EXIT_OK
    else:
        payload = {"rewrite": str(sw), "kernel": "ExtremesRepeat",
                   "min": rk.min_subscript, "max": rk.max_subscript,
                   "min_count": rk.min_count, "max_count": rk.max_count}
        text = f"{sw}\n{rk}"
        code = EXIT_NEGATIVE
    _emit(args, payload, text)
    return code


def _verdict_row(p, q, v):
    if isinstance(v, Fibered):
        return {"p": p, "q": q, "verdict": "Fibered", "rank": v.kernel_rank}
    if isinstance(v, Exception):
        return {"p": p, "q": q, "verdict": "Error", "error": str(v)}
    return {"p": p, "q": q, "verdict": "NotFibered",
            "extremes": [v.min_subscript, v.max_subscript], "counts": [v.min_count, v.max_count]}


def _row_text(row):
    rank = row.get("rank", "")
    if row["verdict"] == "Error":
        return f"{row['p']} {row['q']} Error {row['error']}"
    return f"{row['p']} {row['q']} {row['verdict']} {rank}".rstrip()


def cmd_fiber(args) -> int:
    relator = TWO_GEN.parse(args.relator or DEFAULT_RELATOR)
    try:
        v = decide_fibering(relator, (args.p, args.q))
    except (ZeroCharacter, DegenerateRewrite) as exc:
        raise UsageError(str(exc))
    row = _verdict_row(args.p, args.q, v)
    _emit(args, row, _row_text(row))
    return EXIT_OK if isinstance(v, Fibered) else EXIT_NEGATIVE


def cmd_fiber_scan(args) -> int:
    relator = TWO_GEN.parse(args.relator or DEFAULT_RELATOR)
    rows = [_verdict_row(p, q, v) for p, q, v in scan_characters(relator, args.bound)]
    _emit(args, {"bound": args.bound, "rows": rows}, "\n".join(_row_text(r) for r in rows))
    return EXIT_OK


def cmd_ascend(args) -> int:
    system = cons.build_conjugated_system(args.beta or "aa", _load_rep(args.rep),
                                          args.relator or DEFAULT_RELATOR)
    psi = cons.compute_psi(system)
    psi_text = {RANK6.names[k]: RANK6.format(w) for k, w in sorted(psi.items())}
    try:
        res = cons.certify_strict_ascent(psi)
        mu_in = res.mu_in_image
    except cons.AscentNotStrict:
        mu_in = True
    lines = [f"psi({k}) = {v}" for k, v in psi_text.items()]
    lines.append(f"u in psi(G): {mu_in}")
    _emit(args, {"psi": psi_text, "mu_membership": mu_in, "matrix_consistency": True}, "\n".join(lines))
    return EXIT_NEGATIVE if mu_in else EXIT_OK


def cmd_freeness(args) -> int:
    system = cons.build_conjugated_system(args.beta or "aa", _load_rep(args.rep),
                                          args.relator or DEFAULT_RELATOR)
    if args.word:
        w = RANK6.parse(args.word)
        images = system.images()
        cert = ping_pong_certify(w, images)
        value = eval_in_K(w, images)
        trivial = cons._is_plus_minus_identity(value)
        if cert.nontrivial and trivial:
            raise cons.CertificationFailure("certificate and evaluation disagree", cert.verdict, str(value))
        _emit(args, certificate_to_json(cert),
              f"{RANK6.format(w)}: {cert.verdict} "
              f"({', '.join(side for _, _, side in cert.syllables)})")
        return EXIT_OK if cert.nontrivial else EXIT_NEGATIVE
    report = cons.certify_free_product(system, args.samples if args.samples is not None else 1000,
                                       args.max_syllables or 10,
                                       args.seed if args.seed is not None else cons.DEFAULT_SEED)
    _emit(args, report, f"{report['nontrivial']}/{report['count']} certified nontrivial, "
                        f"{report['inconclusive']} inconclusive")
    return EXIT_OK if report["failures"] == 0 else EXIT_NEGATIVE


def cmd_eval_word(args) -> int:
    rep = _load_rep(args.rep)
    w = TWO_GEN.parse(args.word)
    m = eval_word(w, rep)
    ok = is_projective_identity(m)
    _emit(args, {"word": TWO_GEN.format(w), "value": moebius_to_json(m), "projective_identity": ok},
          f"{m.mat}  flip={m.flip}  projective identity: {ok}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--rep", help="representation JSON file (default: built-in a, b)")

    parser = _Parser(prog="hnnfree", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=fn)
        return p

    p = add("verify", cmd_verify, "run the full certification pipeline")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--relator")
    p.add_argument("--beta")
    p.add_argument("--length-bound", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--max-syllables", type=int)
    p.add_argument("--n-max", type=int)
    p.add_argument("--seed", type=int)

    p = add("relation", cmd_relation, "check the relator evaluates to the identity")
    p.add_argument("--relator")

    p = add("requirement", cmd_requirement, "check the trace requirement for beta")
    p.add_argument("--beta")
    p.add_argument("--n-max", type=int)

    p = add("magnus", cmd_magnus, "Magnus-rewrite a relator and report the kernel")
    p.add_argument("--relator")

    p = add("fiber", cmd_fiber, "decide whether the character (p, q) fibers")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--relator")

    p = add("fiber-scan", cmd_fiber_scan, "decide all primitive characters up to a bound")
    p.add_argument("--bound", type=int, default=10)
    p.add_argument("--relator")

    p = add("ascend", cmd_ascend, "compute psi and certify strict ascent")
    p.add_argument("--beta")
    p.add_argument("--relator")

    p = add("freeness", cmd_freeness, "ping-pong certificates for words in F * Z")
    p.add_argument("--word", help="a single word over b0..b4, u (inverses B0..B4, U)")
    p.add_argument("--samples", type=int)
    p.add_argument("--max-syllables", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--beta")
    p.add_argument("--relator")

    p = add("eval-word", cmd_eval_word, "evaluate a word in a, b under the representation")
    p.add_argument("--word", required=True)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except cons.CertificationFailure as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        print(f"  first:  {exc.first}", file=sys.stderr)
        print(f"  second: {exc.second}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except cons.ConsistencyFailure as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (UsageError, BadToken, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
