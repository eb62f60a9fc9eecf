"""
End-to-end certification of a strictly ascending HNN extension inside SL2.

Pipeline, in order:

1. the relator evaluates to the projective identity under the representation;
2. rho(beta) has trace +-(sqrt(n) + 1/sqrt(n)) and beta is off the kernel of
   the character a -> 1, b -> 0;
3. Magnus rewriting gives a free kernel with basis b_lo .. b_{hi-1};
4. rho(beta) is diagonalized to D = diag(lam, 1/lam), the kernel generators
   are moved to the same frame, and the parabolic u = [[1, 1/t], [0, 1]] is
   adjoined; D u D^-1 = u^n;
5. bounded exhaustive check that no kernel word fixes infinity;
6. sampled free-product certificates in SL2(Q(w)(t)), each cross-checked by
   direct multiplication;
7. psi = conjugation by D on the rank-6 basis, and a Stallings-graph proof
   that u is not in the image of psi.

Nothing numeric influences a verdict; floats appear only in display fields.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from . import cyclofield
from .cyclofield import CycNum
from .freewords import (
    MU, DEFAULT_RELATOR, RANK6, TWO_GEN, FreeOfRank, KernelRewriter, Word,
    apply_character, kernel_rank, magnus_rewrite, membership, stallings_fold,
)
from .matmoebius import (
    Mat2, NoSquareRootFound, diagonalize_hyperbolic, eval_word, field_sqrt,
    is_projective_identity, mat_to_json, normalize_to_sl, default_representation,
)
from .ratfunc import default_images, eval_in_K, lift, mu_power, ping_pong_certify

__all__ = [
    "SCHEMA_VERSION", "DEFAULT_SEED", "PipelineConfig", "RequirementResult", "ConjugatedSystem",
    "RequirementNotMet", "OrientationReversing", "ConsistencyFailure", "CounterexampleFound",
    "CertificationFailure", "AscentNotStrict",
    "verify_relation", "verify_requirement", "build_conjugated_system",
    "certify_no_fix_infinity", "random_alternating_word", "certify_free_product",
    "compute_psi", "certify_strict_ascent", "full_report",
]

SCHEMA_VERSION = "1.0"
DEFAULT_SEED = 20060405

STABLE_CHARACTER = (1, 0)


class RequirementNotMet(ValueError):
    pass


class OrientationReversing(ValueError):
    pass


class ConsistencyFailure(ArithmeticError):
    pass


class CounterexampleFound(ArithmeticError):
    pass


class CertificationFailure(ArithmeticError):
    """Two independent verification paths disagreed."""

    def __init__(self, message: str, first: Any = None, second: Any = None):
        super().__init__(message)
        self.first = first
        self.second = second


class AscentNotStrict(ValueError):
    pass


@dataclass
class PipelineConfig:
    relator: str = DEFAULT_RELATOR
    beta: str = "aa"
    length_bound: int = 5
    samples: int = 1000
    max_syllables: int = 10
    max_f_syllable: int = 3
    max_mu_exponent: int = 3
    n_max: int = 100
    seed: int = DEFAULT_SEED

    @classmethod
    def from_json(cls, data: dict) -> "PipelineConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def _rep(rep):
    return default_representation() if rep is None else rep


def verify_relation(relator: str = DEFAULT_RELATOR, rep=None) -> bool:
    return is_projective_identity(eval_word(relator, _rep(rep)))


@dataclass(frozen=True)
class RequirementResult:
    n: int
    beta_word: str
    trace_value: CycNum
    sign: int
    character_value: int


def verify_requirement(beta: str = "aa", rep=None, n_max: int = 100) -> RequirementResult:
    """Check that rho(beta) has trace +-(sqrt(n) + 1/sqrt(n)), 2 <= n <= n_max."""
    w = TWO_GEN.parse(beta)
    phi = apply_character(STABLE_CHARACTER, w)
    if phi == 0:
        raise RequirementNotMet(f"beta = {beta!r} lies in the kernel of the fibration character")
    m = eval_word(w, _rep(rep))
    if m.flip:
        raise OrientationReversing(f"rho({beta}) is orientation reversing")
    try:
        sl = normalize_to_sl(m.mat)
    except NoSquareRootFound as exc:
        raise RequirementNotMet(str(exc)) from exc
    tau = sl.trace()
    for n in range(2, n_max + 1):
        s = field_sqrt(CycNum(n))
        if s is None:
            continue
        target = s + s.inverse()
        if tau == target:
            return RequirementResult(n, beta, tau, 1, phi)
        if tau == -target:
            return RequirementResult(n, beta, tau, -1, phi)
    raise RequirementNotMet(f"trace {tau} is not +-(sqrt n + 1/sqrt n) for n <= {n_max}")


@dataclass
class ConjugatedSystem:
    D: Mat2
    P: Mat2
    F_gens: list[Mat2]
    mu: Mat2
    n: int
    beta: str
    relator: str
    rewriter: KernelRewriter
    rep: dict = field(repr=False, default=None)

    @property
    def lo(self) -> int:
        return self.rewriter.lo

    def images(self) -> dict[int, Mat2]:
        return default_images(self.F_gens)

    def f_matrix(self, w: Word) -> Mat2:
        """Product of F-generator matrices for a word in b0..b4 (exact, over Q(w))."""
        result = Mat2.identity()
        inv = [m.adjugate() for m in self.F_gens]
        for g, s in w.letters:
            result = result * (self.F_gens[g] if s > 0 else inv[g])
        return result


def _kernel_rewriter(relator: str) -> KernelRewriter:
    sw = magnus_rewrite(TWO_GEN.parse(relator))
    rk = kernel_rank(sw)
    if not isinstance(rk, FreeOfRank):
        raise RequirementNotMet(f"Magnus rewrite {sw} has repeated extremes")
    return KernelRewriter(sw)


def build_conjugated_system(beta: str = "aa", rep=None, relator: str = DEFAULT_RELATOR,
                            n_max: int = 100) -> ConjugatedSystem:
    rep = _rep(rep)
    req = verify_requirement(beta, rep, n_max)
    beta_sl = normalize_to_sl(eval_word(beta, rep).mat)
    P, D = diagonalize_hyperbolic(beta_sl)
    P_inv = P.inverse()
    rewriter = _kernel_rewriter(relator)
    f_gens = []
    for k in range(rewriter.lo, rewriter.hi):
        a_k = ("a" if k >= 0 else "A") * abs(k)
        word = a_k + "b" + a_k.swapcase()[::-1]
        m = eval_word(word, rep)
        if m.flip:
            raise ConsistencyFailure(f"rho(b{k}) unexpectedly orientation reversing")
        f_gens.append(normalize_to_sl(P * m.mat * P_inv))
    lam_sq = D.a * D.a
    if lam_sq != req.n:
        raise ConsistencyFailure(f"D has multiplier {lam_sq}, expected {req.n}")
    system = ConjugatedSystem(D, P, f_gens, mu_power(1), req.n, beta, relator, rewriter, rep)
    D_K, D_inv_K = lift(D), lift(D.inverse())
    if D_K * system.mu * D_inv_K != mu_power(req.n):
        raise ConsistencyFailure("D u D^-1 != u^n")
    return system


def certify_no_fix_infinity(system: ConjugatedSystem, length_bound: int) -> int:
    """Check every reduced kernel word of length 1..L has nonzero lower-left entry.

    Returns the number of words checked; raises CounterexampleFound otherwise.
    """
    r = len(system.F_gens)
    letters = [(g, s) for g in range(r) for s in (1, -1)]
    mats = {(g, 1): system.F_gens[g] for g in range(r)}
    mats.update({(g, -1): system.F_gens[g].adjugate() for g in range(r)})
    count = 0
    stack = [((), Mat2.identity())]
    while stack:
        prefix, m = stack.pop()
        if len(prefix) == length_bound:
            continue
        last = prefix[-1] if prefix else None
        for g, s in letters:
            if last is not None and last[0] == g and last[1] == -s:
                continue
            nm = m * mats[(g, s)]
            count += 1
            if not nm.c:
                w = Word(prefix + ((g, s),))
                raise CounterexampleFound(f"{RANK6.format(w)} fixes infinity")
            stack.append((prefix + ((g, s),), nm))
    return count


def random_alternating_word(rng: random.Random, rank: int, max_syllables: int,
                            max_f: int = 3, max_mu: int = 3) -> Word:
    nsyl = rng.randint(1, max_syllables)
    is_mu = rng.random() < 0.5
    letters: list[tuple[int, int]] = []
    for _ in range(nsyl):
        if is_mu:
            k = rng.randint(1, max_mu) * rng.choice((1, -1))
            letters.extend([(MU, 1 if k > 0 else -1)] * abs(k))
        else:
            length = rng.randint(1, max_f)
            syl: list[tuple[int, int]] = []
            while len(syl) < length:
                g, s = rng.randrange(rank), rng.choice((1, -1))
                if syl and syl[-1] == (g, -s):
                    continue
                syl.append((g, s))
            letters.extend(syl)
        is_mu = not is_mu
    return Word(tuple(letters))


def _is_plus_minus_identity(m: Mat2) -> bool:
    return not m.b and not m.c and m.a == m.d and (m.a == 1 or m.a == -1)


def certify_free_product(system: ConjugatedSystem, samples: int = 1000, max_syllables: int = 10,
                         seed: int = DEFAULT_SEED, max_f: int = 3, max_mu: int = 3) -> dict:
    """Sample alternating words; each gets a ping-pong certificate and an exact evaluation."""
    rng = random.Random(seed)
    images = system.images()
    nontrivial = inconclusive = 0
    for _ in range(samples):
        w = random_alternating_word(rng, len(system.F_gens), max_syllables, max_f, max_mu)
        cert = ping_pong_certify(w, images)
        value = eval_in_K(w, images)
        is_trivial = _is_plus_minus_identity(value)
        if cert.nontrivial and is_trivial:
            raise CertificationFailure(
                f"ping-pong certifies {RANK6.format(w)} nontrivial but it evaluates to +-1",
                cert.verdict, str(value))
        if cert.nontrivial:
            nontrivial += 1
        else:
            inconclusive += 1
    return {
        "count": samples,
        "nontrivial": nontrivial,
        "inconclusive": inconclusive,
        "failures": samples - nontrivial,
        "max_syllables": max_syllables,
        "seed": seed,
    }


def compute_psi(system: ConjugatedSystem) -> dict[int, Word]:
    """psi(x) = beta x beta^-1 on the rank-6 basis, verified against D x D^-1."""
    rw = system.rewriter
    beta = TWO_GEN.parse(system.beta)
    psi: dict[int, Word] = {}
    for i, k in enumerate(range(rw.lo, rw.hi)):
        b_k = TWO_GEN.parse("a" * k + "b" + "A" * k) if k >= 0 else TWO_GEN.parse("A" * -k + "b" + "a" * -k)
        conj = beta * b_k * beta.inverse()
        psi[i] = rw.normalize(magnus_rewrite(conj)).to_rank6(rw.lo)
    psi[MU] = Word(((MU, 1),) * system.n)

    D, D_inv = system.D, system.D.inverse()
    for i in range(len(system.F_gens)):
        lhs = D * system.F_gens[i] * D_inv
        rhs = system.f_matrix(psi[i])
        if lhs != rhs:
            raise ConsistencyFailure(f"D rho(b{i + rw.lo}) D^-1 != rho(psi(b{i + rw.lo}))")
    images = system.images()
    if lift(D) * images[MU] * lift(D_inv) != eval_in_K(psi[MU], images):
        raise ConsistencyFailure("D u D^-1 != rho(psi(u))")
    return psi


@dataclass(frozen=True)
class AscentResult:
    mu_in_image: bool
    images_in_image: bool
    graph_vertices: int
    graph_edges: int
    graph_rank: int


def certify_strict_ascent(psi: dict[int, Word]) -> AscentResult:
    graph = stallings_fold([psi[k] for k in sorted(psi)])
    mu_in = membership(Word(((MU, 1),)), graph)
    all_in = all(membership(psi[k], graph) for k in psi)
    result = AscentResult(mu_in, all_in, graph.num_vertices, len(graph.edges), graph.rank())
    if not all_in:
        raise ConsistencyFailure("a psi image is not readable in its own folded graph")
    if mu_in:
        raise AscentNotStrict("u lies in the image of psi")
    return result


# -- the report --------------------------------------------------------------

def _cyc(x: CycNum):
    z = cyclofield.embed_numeric(x)
    return {"exact": cyclofield.to_json(x), "text": str(x), "approx": [round(z.re, 12) + 0.0, round(z.im, 12) + 0.0]}


def full_report(config: Optional[PipelineConfig] = None, rep=None) -> dict:
    """Run every stage and return the JSON-ready certification report.

    Verdicts: "certified" when every stage passed, "conditional" when all run
    stages passed but some were skipped (a zero bound), "negative" otherwise.
    Hard failures short-circuit the remaining stages.
    """
    cfg = config or PipelineConfig()
    rep = _rep(rep)
    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "config": asdict(cfg),
        "relation_ok": None,
        "requirement": None,
        "kernel": None,
        "conjugated_system": None,
        "no_fix_infinity": None,
        "free_product_samples": None,
        "ascent": None,
        "total_rank": None,
        "verdict": None,
        "failure": None,
    }

    def fail(stage: str, why: str):
        report["verdict"] = "negative"
        report["failure"] = {"stage": stage, "reason": why}
        return report

    try:
        relator_word = TWO_GEN.parse(cfg.relator)
    except ValueError as exc:
        return fail("relation", str(exc))
    report["relation_ok"] = verify_relation(cfg.relator, rep)
    if not report["relation_ok"]:
        return fail("relation", "relator does not evaluate to the projective identity")

    try:
        req = verify_requirement(cfg.beta, rep, cfg.n_max)
    except (RequirementNotMet, OrientationReversing, ValueError) as exc:
        return fail("requirement", str(exc))
    report["requirement"] = {
        "beta": req.beta_word, "n": req.n, "sign": req.sign,
        "trace": _cyc(req.trace_value), "character_value": req.character_value,
    }

    try:
        sw = magnus_rewrite(relator_word)
    except ValueError as exc:
        return fail("kernel", str(exc))
    rk = kernel_rank(sw)
    if not isinstance(rk, FreeOfRank) or rk.rank == 0:
        return fail("kernel", f"Magnus rewrite {sw} does not exhibit a free kernel")
    report["kernel"] = {"magnus": str(sw), "rank": rk.rank, "basis": [f"b{k}" for k in rk.basis]}

    system = build_conjugated_system(cfg.beta, rep, cfg.relator, cfg.n_max)
    report["conjugated_system"] = {
        "D": mat_to_json(system.D),
        "P": mat_to_json(system.P),
        "F_gens": [mat_to_json(m) for m in system.F_gens],
        "multiplier": system.n,
        "mu_conjugation_ok": True,
    }

    skipped = []
    if cfg.length_bound <= 0:
        report["no_fix_infinity"] = {"status": "skipped", "length_bound": cfg.length_bound}
        skipped.append("no_fix_infinity")
    else:
        try:
            checked = certify_no_fix_infinity(system, cfg.length_bound)
        except CounterexampleFound as exc:
            return fail("no_fix_infinity", str(exc))
        report["no_fix_infinity"] = {"status": "passed", "length_bound": cfg.length_bound,
                                     "words_checked": checked}

    if cfg.samples <= 0:
        report["free_product_samples"] = {"status": "skipped", "count": 0}
        skipped.append("free_product_samples")
    else:
        fp = certify_free_product(system, cfg.samples, cfg.max_syllables, cfg.seed,
                                  cfg.max_f_syllable, cfg.max_mu_exponent)
        fp["status"] = "passed" if fp["failures"] == 0 else "failed"
        report["free_product_samples"] = fp
        if fp["failures"]:
            return fail("free_product_samples", f"{fp['inconclusive']} inconclusive certificates")

    psi = compute_psi(system)
    psi_json = {RANK6.names[k]: RANK6.format(w) for k, w in sorted(psi.items())}
    try:
        asc = certify_strict_ascent(psi)
    except AscentNotStrict as exc:
        report["ascent"] = {"psi": psi_json, "mu_membership": True}
        return fail("ascent", str(exc))
    report["ascent"] = {"psi": psi_json, "mu_membership": asc.mu_in_image,
                        "matrix_consistency": True, "graph_vertices": asc.graph_vertices,
                        "graph_edges": asc.graph_edges, "graph_rank": asc.graph_rank}
    report["total_rank"] = rk.rank + 1
    report["verdict"] = "conditional" if skipped else "certified"
    if skipped:
        report["skipped"] = skipped
    return report
