"""Command-line entry point.

Exit codes: 0 success, 1 negative verdict (not a design, non-isomorphic,
oracle mismatch), 2 usage or input error, 3 budget exceeded. Tables go to
stdout as TSV, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from .catalog import load_catalog, provenance
from .designs import (develop, nonuniform_witness, read_design, verify_tdesign,
                      write_design)
from .errors import BudgetExceeded, ParseError
from .groups.grpfile import read_group
from .groups.perm import Permutation, format_cycles
from .imprimitive import classify, default_jobs, feasible_triples, full_wreath_design
from .isomorphism import are_isomorphic, dedupe, non_isomorphism_reason
from .productaction import (CASE_COMPLETIONS, GridPoint, SOCLE_TOPS, phi_psi_closed,
                            phi_psi_table_bruteforce, product_designs, socle_group,
                            solve_phi_eq_psi)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


def _points(text: str) -> list[int]:
    try:
        pts = [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not pts:
        raise argparse.ArgumentTypeError("empty block")
    return pts


def _joined(block: Sequence[int]) -> str:
    return ",".join(map(str, block))


def cmd_feasible(args) -> int:
    for t in feasible_triples(args.k):
        for pat in t.patterns:
            print(f"{pat}\t{t}")
    return EXIT_OK


def cmd_wreath(args) -> int:
    stream = True if args.stream else None
    res = full_wreath_design(args.c, args.d, stream=stream)
    print(f"b={res.b} lambda={res.lam}")
    if args.out:
        if res.design is None:
            print("design was streamed and not materialized; nothing written", file=sys.stderr)
            return EXIT_USAGE
        write_design(res.design, args.out)
    return EXIT_OK


def cmd_develop(args) -> int:
    G = read_group(args.group)
    D = develop(G, args.base)
    lam = D.lam
    print(f"v={D.v} b={D.b} k={D.k} lambda={lam if lam is not None else 'none'}")
    if args.out:
        write_design(D, args.out)
    return EXIT_OK if lam is not None else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    D = read_design(args.design)
    lam = verify_tdesign(D, args.t)
    if lam is not None:
        print(f"{args.t}-design lambda={lam}")
        return EXIT_OK
    witness = nonuniform_witness(D, args.t)
    if witness is None:
        print(f"NOT a {args.t}-design: no {args.t}-subset is covered")
    else:
        (s, cs), (ref, cr) = witness
        kind = "pair" if args.t == 2 else f"{args.t}-subset"
        print(f"NOT a {args.t}-design: {kind} ({_joined(s)}) count={cs} "
              f"vs {kind} ({_joined(ref)}) count={cr}")
    return EXIT_NEGATIVE


def cmd_classify(args) -> int:
    catalog = load_catalog(args.catalog, degree=args.v)
    print(f"catalog provenance: {provenance(args.catalog)}; {len(catalog)} groups of degree {args.v}",
          file=sys.stderr)
    rows = classify(catalog, args.v, jobs=args.jobs, iso=not args.no_iso)
    lines = ["catalog_index\tbase_block\tlambda\tiso_class"]
    for r in rows:
        iso = r.iso_class if r.iso_class is not None else ""
        lines.append(f"{r.catalog_index}\t{_joined(r.base)}\t{r.lam}\t{iso}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not args.no_iso:
        classes = len({r.iso_class for r in rows})
        print(f"{len(rows)} (group, design) pairs, {classes} isomorphism classes", file=sys.stderr)
    return EXIT_OK


def cmd_iso(args) -> int:
    D1, D2 = read_design(args.a), read_design(args.b)
    phi = are_isomorphic(D1, D2)
    if phi is None:
        print(f"non-isomorphic ({non_isomorphism_reason(D1, D2) or 'no bijection'})")
        return EXIT_NEGATIVE
    print(format_cycles(Permutation(phi)))
    return EXIT_OK


def cmd_dedupe(args) -> int:
    designs = [read_design(p) for p in args.designs]
    print("class\trepresentative\tmultiplicity\tmembers")
    for cid, (rep, members) in enumerate(dedupe(designs), start=1):
        print(f"{cid}\t{args.designs[rep]}\t{len(members)}\t{','.join(args.designs[m] for m in members)}")
    return EXIT_OK


def cmd_product(args) -> int:
    G = socle_group(args.family, args.top)
    v0 = 9 if args.family == "psl28" else 7
    found = product_designs(G)
    if args.list:
        print("lambda\tbase_block\torbit_size")
        for d in found:
            pts = " ".join(f"({g.row},{g.col})" for g in (GridPoint.unflatten(p, v0) for p in d.base))
            print(f"{d.lam}\t{pts}\t{d.b}")
    lams = sorted({d.lam for d in found})
    print(f"lambda={','.join(map(str, lams)) if lams else 'none'}")
    return EXIT_OK


def cmd_phi_psi(args) -> int:
    cases = sorted(CASE_COMPLETIONS) if args.all or args.case is None else [args.case]
    brute = phi_psi_table_bruteforce(args.v0) if args.check else None
    header = ["case", "phi", "psi"]
    if brute is not None:
        header += ["phi_bruteforce", "psi_bruteforce", "verdict"]
    print("\t".join(header))
    bad = False
    for case in cases:
        cl = phi_psi_closed(case, args.v0)
        row = [str(case), str(cl.phi), str(cl.psi)]
        if brute is not None:
            bf = brute[case]
            ok = bf == cl
            bad |= not ok
            row += [str(bf.phi), str(bf.psi), "MATCH" if ok else "MISMATCH"]
        print("\t".join(row))
    return EXIT_NEGATIVE if bad else EXIT_OK


def cmd_solve_rank3(args) -> int:
    print("case\tv0\tlambda")
    for case, v0, lam in solve_phi_eq_psi():
        print(f"{case}\t{v0}\t{lam}")
    return EXIT_OK


def cmd_group_info(args) -> int:
    G = read_group(args.group)
    parts = [f"degree={G.degree}", f"order={G.order()}"]
    transitive = G.is_transitive()
    parts.append("transitive" if transitive else "intransitive")
    if transitive:
        systems = G.block_systems()
        parts.append(f"primitive={'false' if systems else 'true'}")
        if systems:
            parts.append("systems=" + ",".join(s.label() for s in systems))
        parts.append("subdegrees=" + ",".join(map(str, sorted(G.subdegrees()))))
    print(" ".join(parts))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blockforge",
                                description="Block-transitive 2-(v,5,lambda) design engine.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("feasible", help="admissible (v,c,d) for point-imprimitive designs",
                       description="List every (v,c,d) with an intersection pattern whose "
                                   "b2 = k(k-1)(c-1)/(v-1), for v up to (C(k,2)-1)^2.")
    s.add_argument("--k", type=int, default=5)
    s.set_defaults(func=cmd_feasible)

    s = sub.add_parser("wreath", help="the full S_c wr S_d design",
                       description="Develop the unique admissible pattern under S_c wr S_d, "
                                   "verify it is a 2-design and print b and lambda.")
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--stream", action="store_true",
                   help="count pairs frontier by frontier instead of holding the design")
    s.add_argument("--out", help="write the design as a .dsn file")
    s.set_defaults(func=cmd_wreath)

    s = sub.add_parser("develop", help="orbit of a base block under a group",
                       description="Develop a base block under the group in a .grp file and "
                                   "report whether the orbit is a 2-design.")
    s.add_argument("--group", required=True)
    s.add_argument("--base", type=_points, required=True, help="comma-separated points")
    s.add_argument("--out")
    s.set_defaults(func=cmd_develop)

    s = sub.add_parser("verify", help="check the t-design property of a .dsn file",
                       description="Exact t-subset counting; on failure prints two t-subsets "
                                   "with different counts.")
    s.add_argument("--design", required=True)
    s.add_argument("--t", type=int, default=2, choices=(1, 2, 3))
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("classify", help="designs admitted by imprimitive catalog groups",
                       description="For every imprimitive transitive group in a catalog "
                                   "directory, find the pattern-valid base blocks whose orbit "
                                   "is a 2-design; TSV of catalog index, base block, lambda and "
                                   "isomorphism class.")
    s.add_argument("--catalog", required=True)
    s.add_argument("--v", type=int, required=True, choices=(16, 21))
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=default_jobs())
    s.add_argument("--no-iso", action="store_true", help="skip isomorphism classes")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("iso", help="isomorphism of two designs",
                       description="Print a point bijection in cycle notation or the reason "
                                   "the designs are not isomorphic.")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("dedupe", help="isomorphism classes of several designs")
    s.add_argument("designs", nargs="+")
    s.set_defaults(func=cmd_dedupe)

    s = sub.add_parser("product", help="2-designs of PSL(2,q)^2 overgroups on the grid",
                       description="Enumerate the group's orbits on 5-subsets meeting a row "
                                   "twice, keep those with equal counts through a row pair and "
                                   "a diagonal pair, develop and verify them.")
    s.add_argument("--family", default="psl28", choices=("psl28", "psl27"))
    s.add_argument("--top", default="wr2", choices=SOCLE_TOPS)
    s.add_argument("--list", action="store_true", help="one row per design orbit")
    s.set_defaults(func=cmd_product)

    s = sub.add_parser("phi-psi", help="row-pair and diagonal-pair counts of the 19 shapes",
                       description="Closed-form PHI and PSI of each 5-point shape under "
                                   "S_v0 wr S_2, optionally checked by brute force.")
    s.add_argument("--v0", type=int, required=True)
    s.add_argument("--case", type=int, choices=sorted(CASE_COMPLETIONS))
    s.add_argument("--all", action="store_true")
    s.add_argument("--check", action="store_true", help="compare with brute-force counts")
    s.set_defaults(func=cmd_phi_psi)

    s = sub.add_parser("solve-rank3", help="shapes with PHI = PSI for v0 in {7,9,19,39}")
    s.set_defaults(func=cmd_solve_rank3)

    s = sub.add_parser("group-info", help="order, primitivity, block systems, subdegrees")
    s.add_argument("--group", required=True)
    s.set_defaults(func=cmd_group_info)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
