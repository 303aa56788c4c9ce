"""Command line front end.

    permbase order M24
    permbase base M23 --exact
    permbase base M12 --subgroup M11 --exact --out m12.cert
    permbase base M24 --probe 7 10000
    permbase fpr M12 --subgroup M11
    permbase qhat S3 --c 2
    permbase qhat --table f4q2_fragment.csv --c 5
    permbase classes AutL4_3 --prime-only
    permbase weylchar e6_a5a1.query
    permbase witness S8 --subgroup S4wrS2 --k 5
    permbase verify theorem1_desk.cases
    permbase --verify m12.cert

Groups are shipped names (``M24``, ``HS``, ...), paths to group files, or
``S<n>``, ``A<n>``, ``C<n>`` for the symmetric, alternating and cyclic
groups.  Exit status: 0 success, 1 a certified claim failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import datetime
import json
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__, library
from .basesize import (BaseCertificate, LowerBoundTranscript, OrbitTree, greedy_base,
                       minimal_base_size_exact, q_exact, q_montecarlo, qhat_from_inventory,
                       qhat_from_table, random_base_search, verify_certificate,
                       verify_transcript, conjugate_intersection_witness,
                       intersection_order_bruteforce, _frac)
from .classes import (class_inventory, count_elements_of_order, export_class_table,
                      fpr_comparison, parse_class_table)
from .errors import PermbaseError
from .group import coset_action, load_group
from .weylchar import IntPolynomial, parse_query, run_query

DATA = Path(__file__).resolve().parent / "data"
MANIFESTS = DATA / "manifests"


# --- group resolution ----------------------------------------------------------

def resolve_group(spec, seed=0, base_dir=None):
    spec = spec.strip()
    for d in ([Path(base_dir)] if base_dir else []) + [Path.cwd()]:
        p = d / spec
        if p.is_file():
            return load_group(p, seed=seed)
    if (DATA / f"{spec}.grp").exists():
        return library.load(spec, seed=seed)
    m = re.fullmatch(r"([SAC])(\d+)", spec)
    if m:
        n = int(m.group(2))
        return {"S": library.symmetric, "A": library.alternating, "C": library.cyclic}[m.group(1)](n)
    raise FileNotFoundError(f"no group file or shipped group named {spec!r}")


def acting_group(group, subgroup=None, seed=0, base_dir=None):
    """(G, action) where G acts on its natural points or on cosets of the subgroup."""
    G = resolve_group(group, seed, base_dir)
    if subgroup in (None, "", "natural", "-"):
        return G, None
    H = resolve_group(subgroup, seed, base_dir)
    action = coset_action(G, H, seed=seed)
    return action.quotient_group, action


def resolve_file(name, base_dir=None):
    for d in ([Path(base_dir)] if base_dir else []) + [Path.cwd(), MANIFESTS]:
        p = d / name
        if p.is_file():
            return p
    raise FileNotFoundError(f"cannot find {name!r}")


# --- output helpers ----------------------------------------------------------------

class Out:
    def __init__(self, fmt):
        self.fmt = fmt
        self.data = {}
        self.lines = []

    def line(self, text=""):
        self.lines.append(text)

    def put(self, **kw):
        self.data.update(kw)

    def flush(self):
        if self.fmt == "json":
            print(json.dumps(self.data, indent=2, default=_jsonable))
        else:
            print("\n".join(self.lines))


def _jsonable(x):
    if isinstance(x, Fraction):
        return _frac(x)
    if isinstance(x, IntPolynomial):
        return list(x.coeffs)
    return str(x)


def write_certificate(path, text, group, subgroup):
    header = f"group_spec: {group}\nsubgroup_spec: {subgroup or 'natural'}\n"
    Path(path).write_text(header + text)


# --- verbs ---------------------------------------------------------------------------

def cmd_order(args, out):
    G, action = acting_group(args.group, args.subgroup, args.seed)
    out.put(group=args.group, degree=G.degree, order=G.order, base=G.chain.base,
            orbit_lengths=G.chain.orbit_lengths, transitive=G.is_transitive())
    out.line(f"{args.group}: degree {G.degree}, order {G.order}")
    out.line(f"base {G.chain.base}")
    out.line(f"orbit lengths {G.chain.orbit_lengths}")
    return 0


def cmd_base(args, out):
    G, _ = acting_group(args.group, args.subgroup, args.seed)
    if args.probe:
        c, trials = args.probe
        cert, used = random_base_search(G, c, trials, seed=args.seed)
        out.put(mode="probe", c=c, trials=used, found=cert is not None,
                points=cert.points if cert else None)
        if cert:
            out.line(f"base found after {used} random {c}-tuples: {cert.points}")
            out.line(f"b <= {c}")
            _maybe_write(args, cert.to_text())
        else:
            out.line(f"no base among {trials} random {c}-tuples (evidence only)")
        return 0
    if args.greedy:
        cert = greedy_base(G)
        out.put(mode="greedy", upper=cert.size, points=cert.points,
                trace=cert.stabilizer_order_trace)
        out.line(f"greedy base {cert.points}")
        out.line(f"b <= {cert.size}")
        _maybe_write(args, cert.to_text())
        return 0
    res = minimal_base_size_exact(G, budget=args.budget or 10**6, seed=args.seed)
    out.put(mode="exact", exact=res.exact, b=res.b, lo=res.lo, hi=res.hi,
            points=res.witness.points, trace=res.witness.stabilizer_order_trace,
            nodes_examined=res.lower.tuples_examined if res.lower else None)
    if res.exact:
        out.line(f"b = {res.b}")
        out.line(f"witness {res.witness.points}  trace {res.witness.stabilizer_order_trace}")
        if res.lower is not None:
            out.line(f"lower bound: {res.lower.verdict} ({len(res.lower.explored)} prefixes "
                     f"searched, {len(res.lower.pruned)} cut by the order bound)")
    else:
        out.line(f"{res.lo} <= b <= {res.hi} (budget exhausted, inexact)")
    _maybe_write(args, res.witness.to_text(),
                 res.lower.to_text() if res.lower is not None else None)
    return 0


def _maybe_write(args, cert_text, transcript_text=None):
    if getattr(args, "out", None):
        write_certificate(args.out, cert_text, args.group, args.subgroup)
        if transcript_text:
            write_certificate(args.out + ".lower", transcript_text, args.group, args.subgroup)


def cmd_fpr(args, out):
    if not args.subgroup:
        raise PermbaseError("fpr needs --subgroup")
    G = resolve_group(args.group, args.seed)
    H = resolve_group(args.subgroup, args.seed)
    recs, action = fpr_comparison(G, H, seed=args.seed)
    rows = [(rec.label, rec.class_size, a, b) for rec, a, b in recs]
    index = action.index
    out.line(f"{args.group} on the {index} cosets of {args.subgroup}")
    out.line(f"{'class':>6} {'size':>12} {'fixes':>10} {'fusion':>10}  equal")
    for label, size, a, b in rows:
        out.line(f"{label:>6} {size:>12} {_frac(a):>10} {_frac(b):>10}  {a == b}")
    ok = all(a == b for *_, a, b in rows)
    out.line(f"all equal: {ok}")
    out.put(index=index, all_equal=ok,
            rows=[dict(label=l, class_size=s, fixes=a, fusion=b) for l, s, a, b in rows])
    return 0 if ok else 1


def cmd_qhat(args, out):
    if args.table:
        rows = parse_class_table(resolve_file(args.table).read_text())
        ledger = qhat_from_table(rows, args.c)
    else:
        if not args.group:
            raise PermbaseError("qhat needs a group or --table")
        G, _ = acting_group(args.group, args.subgroup, args.seed)
        ledger = qhat_from_inventory(class_inventory(G, prime_only=True, seed=args.seed), args.c)
    if args.csv:
        Path(args.csv).write_text(ledger.to_csv())
    out.put(c=args.c, total=ledger.total, source=ledger.source, certified=ledger.certified,
            rows=[dict(label=r.label, class_size=r.class_size, fpr=r.fpr,
                       contribution=r.contribution) for r in ledger.per_class_contributions])
    out.line(ledger.to_text().rstrip())
    out.line(_frac(ledger.total))
    return 0


def cmd_classes(args, out):
    G, _ = acting_group(args.group, args.subgroup, args.seed)
    inv = class_inventory(G, prime_only=args.prime_only, seed=args.seed)
    if args.export:
        Path(args.export).write_text(export_class_table(inv))
    out.line(f"{len(inv.records)} classes; complete: {inv.complete} ({inv.method})")
    out.line(f"{'label':>6} {'order':>5} {'size':>14} {'|C(x)|':>12} {'fixed':>6}")
    for r in inv.records:
        out.line(f"{r.label:>6} {r.element_order:>5} {r.class_size:>14} "
                 f"{r.centralizer_order:>12} {r.fixed_point_count:>6}")
    out.put(complete=inv.complete, classes=[
        dict(label=r.label, element_order=r.element_order, class_size=r.class_size,
             centralizer_order=r.centralizer_order, fixed_points=r.fixed_point_count)
        for r in inv.records])
    return 0


def cmd_weylchar(args, out):
    query = parse_query(resolve_file(args.query).read_text())
    res = run_query(query)
    out.put(type=query.type_label, mode=query.mode, coefficients=list(res.polynomial.coeffs),
            polynomial=str(res.polynomial), value=res.value)
    out.line(f"coefficients (constant first): {list(res.polynomial.coeffs)}")
    out.line(str(res.polynomial))
    if res.value is not None:
        out.line(f"value at q = {query.q}: {res.value}")
    return 0


def cmd_witness(args, out):
    G = resolve_group(args.group, args.seed)
    H = resolve_group(args.subgroup, args.seed)
    w = conjugate_intersection_witness(G, H, args.k, budget=args.budget or 10**5, seed=args.seed)
    if w is None:
        out.put(found=False)
        out.line(f"no {args.k} conjugates with trivial intersection found (evidence only)")
        return 0
    brute = intersection_order_bruteforce(H, w.conjugators) if H.order <= 10**5 else None
    out.put(found=True, points=w.points, intersection_order=w.intersection_order,
            bruteforce_order=brute, conjugators=[repr(x) for x in w.conjugators])
    out.line(f"coset points {w.points}; intersection order {w.intersection_order}"
             + (f" (brute force: {brute})" if brute is not None else ""))
    for x in w.conjugators:
        out.line(f"  {x!r}")
    return 0


# --- manifests -------------------------------------------------------------------------

CLAIMS = ("base_size =", "base_size <=", "base_size >=", "qhat_less_than_1",
          "chi_polynomial", "i_r_count")


@dataclass
class CaseManifestEntry:
    case_id: str
    group: str
    subgroup: str
    claim: str
    value: str
    mode: str
    budget: int | None
    line: int = 0


@dataclass
class CaseResult:
    case_id: str
    verdict: str
    mode: str
    detail: str
    artifacts: list = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class ReportDocument:
    manifest: str
    results: list
    version: str = __version__
    seed: int = 0

    @property
    def exit_code(self):
        return 1 if any(r.verdict == "FAIL" and r.mode == "certified" for r in self.results) else 0

    def to_text(self, timings=False):
        lines = [f"# generated {datetime.datetime.now().isoformat(timespec='seconds')}",
                 f"manifest {self.manifest}  version {self.version}  seed {self.seed}"]
        for r in self.results:
            t = f"  [{r.seconds:.2f}s]" if timings else ""
            lines.append(f"{r.verdict:<12} {r.case_id:<16} {r.mode:<9} {r.detail}{t}")
            for a in r.artifacts:
                lines.append(f"{'':<12} artifact {a}")
        counts = {}
        for r in self.results:
            counts[r.verdict] = counts.get(r.verdict, 0) + 1
        lines.append("summary " + ", ".join(f"{k} {v}" for k, v in sorted(counts.items())))
        return "\n".join(lines) + "\n"

    def to_json(self, timings=False):
        d = dict(generated=datetime.datetime.now().isoformat(timespec="seconds"),
                 manifest=self.manifest, version=self.version, seed=self.seed,
                 results=[dict(case_id=r.case_id, verdict=r.verdict, mode=r.mode,
                               detail=r.detail, artifacts=r.artifacts,
                               **({"seconds": round(r.seconds, 3)} if timings else {}))
                          for r in self.results])
        return json.dumps(d, indent=2)


def parse_manifest(text):
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cols = [c.strip() for c in line.split("|")]
        if len(cols) != 7:
            raise PermbaseError(f"manifest line {lineno}: expected 7 columns, got {len(cols)}")
        case_id, group, subgroup, claim, value, mode, budget = cols
        claim = claim.replace("≤", "<=").replace("≥", ">=")
        claim = re.sub(r"\s+", " ", claim)
        if claim not in CLAIMS:
            raise PermbaseError(f"manifest line {lineno}: unknown claim {claim!r}")
        if mode not in ("certified", "evidence"):
            raise PermbaseError(f"manifest line {lineno}: mode must be certified or evidence")
        if claim.startswith("base_size") or claim == "qhat_less_than_1":
            if not value.isdigit():
                raise PermbaseError(f"manifest line {lineno}: {claim} needs an integer value")
        if claim == "i_r_count" and not re.fullmatch(r"\d+:\d+", value):
            raise PermbaseError(f"manifest line {lineno}: i_r_count value must be r:count")
        b = None if budget in ("", "-") else int(float(budget))
        entries.append(CaseManifestEntry(case_id, group, subgroup, claim, value, mode, b, lineno))
    return entries


def run_entry(e, base_dir, artifacts_dir, seed=0):
    try:
        if e.claim == "chi_polynomial":
            return _run_chi(e, base_dir)
        if e.claim == "i_r_count":
            G, _ = acting_group(e.group, e.subgroup, seed, base_dir)
            r, want = map(int, e.value.split(":"))
            got = count_elements_of_order(class_inventory(G, seed=seed), r)
            ok = got == want
            return CaseResult(e.case_id, "PASS" if ok else "FAIL", e.mode,
                              f"i_{r} = {got} (claimed {want})")
        if e.claim == "qhat_less_than_1":
            G, _ = acting_group(e.group, e.subgroup, seed, base_dir)
            c = int(e.value)
            ledger = qhat_from_inventory(class_inventory(G, prime_only=True, seed=seed), c)
            ok = ledger.total < 1
            return CaseResult(e.case_id, "PASS" if ok else "FAIL", e.mode,
                              f"Qhat(G,{c}) = {_frac(ledger.total)} (~{float(ledger.total):.4g})")
        G, _ = acting_group(e.group, e.subgroup, seed, base_dir)
        if e.mode == "evidence":
            return _run_evidence(e, G, seed)
        return _run_base(e, G, artifacts_dir, seed)
    except FileNotFoundError as exc:
        return CaseResult(e.case_id, "INCONCLUSIVE", e.mode, f"missing data: {exc}")
    except PermbaseError as exc:
        return CaseResult(e.case_id, "INCONCLUSIVE", e.mode, f"{type(exc).__name__}: {exc}")


def _run_chi(e, base_dir):
    query = parse_query(resolve_file(e.group, base_dir).read_text())
    got = run_query(query).polynomial
    want = IntPolynomial(int(t) for t in e.value.split(","))
    ok = got == want
    return CaseResult(e.case_id, "PASS" if ok else "FAIL", e.mode, f"{got}")


def _run_base(e, G, artifacts_dir, seed):
    want = int(e.value)
    res = minimal_base_size_exact(G, budget=e.budget or 10**6, seed=seed)
    if not res.exact:
        # an interval can still settle one-sided claims
        verdict = "INCONCLUSIVE"
        if e.claim == "base_size <=" and res.hi <= want:
            verdict = "PASS"
        elif e.claim == "base_size >=" and res.lo >= want:
            verdict = "PASS"
        elif (e.claim == "base_size =" and not res.lo <= want <= res.hi) or \
                (e.claim == "base_size <=" and res.lo > want) or \
                (e.claim == "base_size >=" and res.hi < want):
            verdict = "FAIL"
        return CaseResult(e.case_id, verdict, e.mode, f"{res.lo} <= b <= {res.hi} (inexact)")
    b = res.b
    ok = {"base_size =": b == want, "base_size <=": b <= want, "base_size >=": b >= want}[e.claim]
    arts = []
    if artifacts_dir is not None:
        d = Path(artifacts_dir)
        d.mkdir(parents=True, exist_ok=True)
        cert = d / f"{e.case_id}.cert"
        write_certificate(cert, res.witness.to_text(), e.group, e.subgroup)
        arts.append(str(cert))
        if res.lower is not None:
            low = d / f"{e.case_id}.lower"
            write_certificate(low, res.lower.to_text(), e.group, e.subgroup)
            arts.append(str(low))
    return CaseResult(e.case_id, "PASS" if ok else "FAIL", e.mode,
                      f"b = {b} (claimed {e.claim.split()[1]} {want}); witness {res.witness.points}",
                      arts)


def evidence_run(G, b, seed=0, upper_trials=10**5, lower_trials=10**6):
    """Random search for a b-base and failure statistics for (b-1)-tuples."""
    tree = OrbitTree(G, seed=seed)
    cert, used = random_base_search(G, b, upper_trials, seed=seed, tree=tree)
    mc = q_montecarlo(G, b - 1, lower_trials, seed=seed + 1, tree=tree)
    return cert, used, mc


def _run_evidence(e, G, seed):
    want = int(e.value)
    cert, used, mc = evidence_run(G, want, seed, lower_trials=e.budget or 10**6)
    found_upper = cert is not None
    smaller = mc.failures < mc.trials
    detail = (f"{want}-base {'found after ' + str(used) + ' tuples' if found_upper else 'not found'}; "
              f"{mc.trials - mc.failures} of {mc.trials} random {want - 1}-tuples were bases; "
              "evidence only, not certified")
    if e.claim == "base_size =":
        verdict = "PASS" if found_upper and not smaller else ("FAIL" if smaller else "INCONCLUSIVE")
    elif e.claim == "base_size <=":
        verdict = "PASS" if found_upper else "INCONCLUSIVE"
    else:
        verdict = "FAIL" if smaller else "PASS"
    return CaseResult(e.case_id, verdict, e.mode, detail)


def cmd_verify_manifest(args, out):
    path = resolve_file(args.manifest)
    entries = parse_manifest(path.read_text())
    results = []
    artifacts = Path(args.artifacts) / path.stem if args.artifacts else None
    for e in entries:
        t0 = time.perf_counter()
        r = run_entry(e, path.parent, artifacts, seed=args.seed)
        r.seconds = time.perf_counter() - t0
        results.append(r)
    doc = ReportDocument(path.name, results, seed=args.seed)
    if args.format == "json":
        print(doc.to_json(args.timings))
    else:
        print(doc.to_text(args.timings), end="")
    return doc.exit_code


def verify_certificate_file(path, seed=0):
    """Re-check a certificate written by ``base --out`` or ``verify``."""
    text = Path(path).read_text()
    fields = {}
    for line in text.splitlines():
        if ":" in line and not line.startswith(("E ", "P ")):
            k, v = line.split(":", 1)
            fields[k.strip()] = v.strip()
    if "group_spec" not in fields:
        raise PermbaseError("certificate has no group_spec line")
    G, _ = acting_group(fields["group_spec"], fields.get("subgroup_spec"), seed,
                        Path(path).parent)
    if "# lower bound transcript" in text:
        tr = LowerBoundTranscript.from_text(text)
        return "lower-bound", verify_transcript(G, tr)
    cert = BaseCertificate.from_text(text)
    return "base", verify_certificate(G, cert)


# --- entry point ---------------------------------------------------------------------------

def build_parser():
    # global options are accepted before or after the verb
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS,
                        help="node or trial budget")
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--verify", metavar="CERTIFICATE", default=argparse.SUPPRESS,
                        help="re-check a certificate and exit")
    p = argparse.ArgumentParser(prog="permbase", parents=[common],
                                description="Base sizes of permutation groups.")
    p.set_defaults(seed=0, budget=None, format="text", verify=None)
    sub = p.add_subparsers(dest="verb")

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    def group_cmd(name, **kw):
        s = add(name, **kw)
        s.add_argument("group")
        s.add_argument("--subgroup", default=None, help="act on the cosets of this subgroup")
        return s

    group_cmd("order", help="group order and stabilizer chain")
    s = group_cmd("base", help="base size")
    m = s.add_mutually_exclusive_group()
    m.add_argument("--exact", action="store_true")
    m.add_argument("--greedy", action="store_true")
    m.add_argument("--probe", nargs=2, type=int, metavar=("C", "TRIALS"))
    s.add_argument("--out", help="write the certificate here")
    group_cmd("fpr", help="fixed point ratios, two ways")
    s = add("qhat", help="the class-sum bound on Q(G,c)")
    s.add_argument("group", nargs="?")
    s.add_argument("--subgroup", default=None)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--table")
    s.add_argument("--csv", help="write the ledger as CSV")
    s = group_cmd("classes", help="conjugacy classes")
    s.add_argument("--prime-only", action="store_true")
    s.add_argument("--export", help="write a class-table CSV")
    s = add("weylchar", help="evaluate a Weyl character query file")
    s.add_argument("query")
    s = group_cmd("witness", help="conjugates of a subgroup with trivial intersection")
    s.add_argument("--k", type=int, required=True)
    s = add("verify", help="run a case manifest")
    s.add_argument("manifest")
    s.add_argument("--artifacts", default="artifacts", help="directory for certificates")
    s.add_argument("--timings", action="store_true")
    return p


VERBS = {"order": cmd_order, "base": cmd_base, "fpr": cmd_fpr, "qhat": cmd_qhat,
         "classes": cmd_classes, "weylchar": cmd_weylchar, "witness": cmd_witness}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.verify:
            kind, problems = verify_certificate_file(args.verify, args.seed)
            if problems:
                print(f"{kind} certificate INVALID")
                for pr in problems:
                    print(f"  {pr}")
                return 1
            print(f"{kind} certificate valid")
            return 0
        if args.verb is None:
            parser.print_usage(sys.stderr)
            return 2
        if args.verb == "verify":
            return cmd_verify_manifest(args, None)
        if args.verb == "witness" and not args.subgroup:
            raise PermbaseError("witness needs --subgroup")
        out = Out(args.format)
        code = VERBS[args.verb](args, out)
        out.flush()
        return code
    except (PermbaseError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
