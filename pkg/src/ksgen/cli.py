"""``ksgen`` command line: closure, generate, verify, canon, check-010, bench, cubes.

Exit codes: 0 success, 1 usage error, 2 verification reject, 3 budget
exhausted or otherwise indeterminate.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import canon, geom
from .encode import EncodeOptions, check_010
from .graph import Graph, GraphFormatError, decode_graph6, encode_graph6, read_graph6_file, write_graph6_file

log = logging.getLogger("ksgen")

EXIT_OK, EXIT_USAGE, EXIT_REJECT, EXIT_INDETERMINATE = 0, 1, 2, 3
LARGE_ORDER = 29


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, data: dict) -> None:
    """Atomic write: temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".manifest-")
    with os.fdopen(fd, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def load_rays(spec: str) -> tuple[geom.RaySet, str | None]:
    """A ray file path, or the name of a shipped set (``closure-25``)."""
    p = Path(spec)
    if p.exists():
        return geom.RaySet.read(p), str(p)
    name = p.name[:-5] if p.name.endswith(".rays") else p.name
    if name in geom.BUILTIN_SETS:
        return geom.builtin(name), None
    raise UsageError(f"no ray file or shipped ray set named {spec!r}")


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` comments.  Keys use flag names."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            if "=" not in s:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            k, v = (x.strip() for x in s.split("=", 1))
            k = k.lstrip("-").replace("-", "_")
            low = v.lower()
            if low in ("true", "yes", "on"):
                out[k] = True
            elif low in ("false", "no", "off"):
                out[k] = False
            else:
                try:
                    out[k] = int(v)
                except ValueError:
                    try:
                        out[k] = float(v)
                    except ValueError:
                        out[k] = v
    return out


def _graphs_from_args(args) -> list[Graph]:
    if args.graph6:
        return [decode_graph6(s) for s in args.graph6]
    if args.file:
        return read_graph6_file(args.file)
    if getattr(args, "rays", None):
        rs, _ = load_rays(args.rays)
        return [geom.orthogonality_graph(rs)]
    raise UsageError("give --graph6, --file or --rays")


# -- subcommands ------------------------------------------------------------------


def cmd_closure(args) -> int:
    rs, _ = load_rays(args.rays)
    t = time.perf_counter()
    out = geom.closure(rs)
    dt = time.perf_counter() - t
    if args.out:
        out.write(args.out, f"closure of {args.rays}\n{len(out)} rays")
    else:
        sys.stdout.write(out.to_text())
    print(f"{len(out)} rays ({dt * 1000:.1f} ms)", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def _search_worker(job: dict) -> dict:
    from .proof import ProofWriter, verify_files
    from .search import SearchConfig, run_search

    out = Path(job["dir"])
    out.mkdir(parents=True, exist_ok=True)
    proof_path = Path(job["proof_path"]) if job.get("proof_path") else out / "proof.drat"
    base_rays = geom.RaySet(job["base_rays"]) if job["base_rays"] is not None else None
    base_graph = decode_graph6(job["base_graph"]) if job["base_graph"] else None
    t0 = time.perf_counter()
    with ProofWriter(proof_path) as pw:
        cfg = SearchConfig(
            n=job["order"], base_graph=base_graph, base_rays=base_rays,
            rcl=job["rcl"], geometry=job["geometry"], lazy010=job["lazy010"],
            options=EncodeOptions(**job["options"]), decision=job["decision"],
            proof=pw, cube=job["cube"], max_conflicts=job["max_conflicts"],
            max_seconds=job["max_seconds"])
        res = run_search(cfg)
    t_search = time.perf_counter() - t0
    res.cnf.write(out / "formula.cnf")
    rays_path = None
    if res.base_rays is not None:
        rays_path = out / "base.rays"
        res.base_rays.write(rays_path, "base rays in the labeling used by formula.cnf")
    write_graph6_file(out / "results.g6", res.graphs)
    with open(out / "realizability.txt", "w") as fh:
        for g, r in zip(res.graphs, res.realizability):
            line = encode_graph6(g)
            if r is not None:
                line += f" {r.status}"
                if r.status == "realized":
                    line += " faithful" if r.faithful else " unfaithful"
                    line += " " + ";".join(",".join(map(str, x)) for x in r.rays)
                elif r.status == "undetermined":
                    line += " " + ",".join(map(str, r.undetermined))
            fh.write(line + "\n")
    (out / "stats.txt").write_text("".join(f"{k}={v}\n" for k, v in res.stats.items()))
    verdict = None
    t_verify = 0.0
    if res.exhaustive and job["verify"]:
        t1 = time.perf_counter()
        vr = verify_files(out / "formula.cnf", proof_path, rays_path, out / "results.g6")
        t_verify = time.perf_counter() - t1
        verdict = str(vr)
    realized = sum(1 for r in res.realizability if r is not None and r.status == "realized")
    return dict(dir=str(out), cube=job["cube"], status=res.status, reason=res.reason,
                results=len(res.graphs), realized=realized, verify=verdict,
                seconds_search=round(t_search, 3), seconds_verify=round(t_verify, 3),
                stats=res.stats)


def _status_word(complete: bool, exhaustive: bool, skipped: bool) -> str:
    if exhaustive:
        return "exhaustive"
    if complete and skipped:
        return "complete (proof not checked)"
    return "NOT exhaustive"


def cmd_generate(args) -> int:
    from .search import make_cubes, prepare_base, read_cubes

    if args.order >= LARGE_ORDER and not args.yes_large:
        print(f"warning: order {args.order} is far beyond desk scale (the order-33 run took "
              f"thousands of CPU hours); rerun with --yes-large to proceed", file=sys.stderr)
        return EXIT_USAGE
    base_rays = base_graph = None
    inputs = {}
    if not args.no_base:
        if not args.base:
            raise UsageError("--base is required unless --no-base is given")
        base_rays, src = load_rays(args.base)
        if src:
            inputs[src] = _sha256(src)
        base_graph, base_rays = prepare_base(None, base_rays)
    geometry = not args.no_geometry and base_rays is not None
    if args.trivial:
        options = EncodeOptions.trivial()
        lazy010 = False
    elif args.structure_only:
        options = EncodeOptions.structure_only()
        lazy010 = False
    else:
        options = EncodeOptions()
        lazy010 = not args.no_lazy010
    if args.cube:
        cubes = read_cubes(args.cube)
        inputs[args.cube] = _sha256(args.cube)
    elif args.cube_depth:
        cubes = make_cubes(args.order, args.cube_depth, base_graph.n if base_graph else 0)
    else:
        cubes = [[]]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = []
    for i, cube in enumerate(cubes):
        d = out if len(cubes) == 1 else out / f"cube-{i:04d}"
        jobs.append(dict(
            dir=str(d), order=args.order,
            base_rays=[list(r) for r in base_rays] if base_rays is not None else None,
            base_graph=encode_graph6(base_graph) if base_graph is not None else None,
            rcl=not args.no_rcl, geometry=geometry, lazy010=lazy010, options=vars(options),
            decision=args.decision, cube=cube, max_conflicts=args.max_conflicts,
            max_seconds=args.max_seconds, verify=not args.no_verify,
            proof_path=args.proof if len(cubes) == 1 else None))
    t0 = time.perf_counter()
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            reports = list(ex.map(_search_worker, jobs))
    else:
        reports = [_search_worker(j) for j in jobs]
    wall = time.perf_counter() - t0

    all_graphs = []
    for r in reports:
        all_graphs += read_graph6_file(Path(r["dir"]) / "results.g6")
    keys = [encode_graph6(canon.base_canon(g).canonical_graph) for g in all_graphs]
    isomorph_free = len(set(keys)) == len(keys)
    complete = all(r["status"] == "exhaustive" for r in reports)
    verified = all(r["verify"] == "accept" for r in reports)
    exhaustive = complete and verified and not args.no_verify
    if len(cubes) > 1:
        write_graph6_file(out / "results.g6", all_graphs)

    manifest = dict(
        subcommand="generate", config=_config_dict(args), inputs=inputs,
        outputs=[r["dir"] for r in reports], seconds=round(wall, 3),
        exhaustive=exhaustive, isomorph_free=isomorph_free,
        results=len(all_graphs), realized=sum(r["realized"] for r in reports), cubes=reports)
    write_manifest(out / "manifest.json", manifest)
    print(f"order {args.order}: {len(all_graphs)} candidates, "
          f"{manifest['realized']} realizable, "
          f"{_status_word(complete, exhaustive, args.no_verify)}, {wall:.1f}s")
    for r in reports:
        if r["verify"] and r["verify"] != "accept":
            print(f"proof in {r['dir']}: {r['verify']}", file=sys.stderr)
            return EXIT_REJECT
    if not complete:
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_verify(args) -> int:
    from .proof import verify_files

    t = time.perf_counter()
    res = verify_files(args.cnf, args.proof, args.rays, args.results)
    dt = time.perf_counter() - t
    if not res.ok and res.reason == "o-no-base":
        print("usage: the proof contains o-lines; pass the base rays with --rays", file=sys.stderr)
        return EXIT_USAGE
    if res.ok:
        print(f"accept ({dt:.2f}s) " + " ".join(f"{k}={v}" for k, v in res.counts.items()))
        return EXIT_OK
    print(str(res), file=sys.stderr)
    return EXIT_REJECT


def cmd_canon(args) -> int:
    for g in _graphs_from_args(args):
        if args.mode == "rcl":
            h = canon.rcl_canon(g).canonical_graph
        elif args.mode == "base":
            h = canon.base_canon(g).canonical_graph
        else:
            try:
                h = canon.lex_canonize(g, args.budget)
            except canon.LexTimeout:
                print(f"lex canonization of {encode_graph6(g)} exceeded {args.budget}s", file=sys.stderr)
                return EXIT_INDETERMINATE
        print(encode_graph6(h))
    return EXIT_OK


def cmd_check010(args) -> int:
    for g in _graphs_from_args(args):
        c = check_010(g)
        if c is None:
            print("non-colorable")
        else:
            print("colorable " + " ".join(map(str, sorted(c.one_set))))
    return EXIT_OK


def _parse_orders(text: str) -> list[int]:
    out = []
    for part in str(text).split(","):
        if "-" in part:
            a, b = part.split("-")
            out += list(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def cmd_bench(args) -> int:
    from . import bench

    orders = _parse_orders(args.orders)
    ds_dir = Path(args.dataset)
    if (ds_dir / "manifest.json").exists():
        dataset = bench.load_dataset(ds_dir)
        missing = sorted(set(orders) - set(dataset))
        if missing:
            raise UsageError(f"dataset {ds_dir} has no graphs of order {missing}")
        dataset = {n: gs[: args.count] for n, gs in dataset.items() if n in orders}
    else:
        dataset = bench.build_dataset(orders, args.count, args.seed)
        bench.save_dataset(ds_dir, dataset, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    recs = bench.run_bench(dataset, args.lex_budget, args.repeats)
    rows = bench.summarize(recs)
    bench.write_csv(out / "bench.csv", recs)
    bench.write_summary_csv(out / "summary.csv", rows)
    bench.write_svg(out / "bench.svg", rows)
    for r in rows:
        print(f"n={r['n']:>2}  lex median {r['lex_median_ms']:9.2f} ms  rcl median "
              f"{r['rcl_median_ms']:7.2f} ms  mean speedup {r['speedup']:7.2f}"
              + (f"  ({r['lex_censored']} censored)" if r["lex_censored"] else ""))
    write_manifest(out / "manifest.json", dict(subcommand="bench", config=_config_dict(args),
                                               outputs=["bench.csv", "summary.csv", "bench.svg"]))
    return EXIT_OK


def cmd_cubes(args) -> int:
    from .search import make_cubes, write_cubes

    p = 0
    if args.base:
        rs, _ = load_rays(args.base)
        p = len(rs)
    cubes = make_cubes(args.order, args.depth, p)
    if args.out:
        write_cubes(args.out, cubes)
    else:
        for c in cubes:
            print(" ".join(map(str, c + [0])))
    return EXIT_OK


def _config_dict(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ksgen", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="key = value file; command-line flags take precedence")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("closure", help="close a ray set under orthogonal completion")
    s.add_argument("--rays", required=True, help="ray file or shipped set name")
    s.add_argument("--out", help="write the closed set here (default: stdout)")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("generate", help="enumerate KS candidates extending a base")
    s.add_argument("--base", help="base ray file or shipped set name (e.g. closure-25)")
    s.add_argument("--no-base", action="store_true")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--out", default="run", help="output directory")
    s.add_argument("--proof", help="proof path (default OUT/proof.drat; per-cube runs always use their directory)")
    s.add_argument("--cube", help="cube file: one cube per line, literals ending in 0")
    s.add_argument("--cube-depth", type=int, default=0, help="split into 2^d cubes")
    s.add_argument("--jobs", type=int, default=1, help="worker processes for cubes")
    s.add_argument("--no-geometry", action="store_true")
    s.add_argument("--no-rcl", action="store_true")
    s.add_argument("--no-lazy010", action="store_true")
    s.add_argument("--structure-only", action="store_true",
                   help="squarefree, degree and triangle constraints only")
    s.add_argument("--trivial", action="store_true", help="no constraints: all graphs")
    s.add_argument("--decision", choices=["static-prefix", "activity"], default="static-prefix")
    s.add_argument("--max-conflicts", type=int)
    s.add_argument("--max-seconds", type=float)
    s.add_argument("--no-verify", action="store_true", help="skip proof checking")
    s.add_argument("--yes-large", action="store_true")
    s.add_argument("--emit-dimacs", help="only write the CNF to this path and exit")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("verify", help="check an extended DRAT proof")
    s.add_argument("--cnf", required=True)
    s.add_argument("--proof", required=True)
    s.add_argument("--rays", help="base rays in the labeling of the CNF")
    s.add_argument("--results", help="graph6 file of reported models")
    s.set_defaults(func=cmd_verify)

    for name, func, hlp in (("canon", cmd_canon, "canonical forms"),
                            ("check-010", cmd_check010, "010-colorability")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--graph6", nargs="+")
        s.add_argument("--file", help="graph6 file, one graph per line")
        s.add_argument("--rays", help="use the orthogonality graph of a ray set")
        if name == "canon":
            s.add_argument("--mode", choices=["rcl", "base", "lex"], default="rcl")
            s.add_argument("--budget", type=float, help="seconds for --mode lex")
        s.set_defaults(func=func)

    s = sub.add_parser("bench", help="lex-least vs RCL canonicity benchmark")
    s.add_argument("--orders", default="12-18")
    s.add_argument("--count", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--dataset", default="datasets/bench", help="dataset directory (created if missing)")
    s.add_argument("--out", default="bench-out")
    s.add_argument("--lex-budget", type=float, default=60.0)
    s.add_argument("--repeats", type=int, default=3)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("cubes", help="write 2^d cubes over the first free edge variables")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--base", help="base ray set (its edge variables are not split)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_cubes)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if args.config:
        try:
            conf = read_config(args.config)
        except (OSError, UsageError) as e:
            print(f"ksgen: {e}", file=sys.stderr)
            return EXIT_USAGE
        # config values become defaults of the chosen subcommand; flags still win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(conf) - known
        if unknown:
            print(f"ksgen: unknown config keys: {', '.join(sorted(unknown))}", file=sys.stderr)
            return EXIT_USAGE
        sub.set_defaults(**conf)
        args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "generate" and args.emit_dimacs:
            return _emit_dimacs(args)
        return args.func(args)
    except UsageError as e:
        print(f"ksgen: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphFormatError, geom.GeometryError, FileNotFoundError) as e:
        print(f"ksgen: {e}", file=sys.stderr)
        return EXIT_USAGE


def _emit_dimacs(args) -> int:
    from .search import SearchConfig, build_cnf, prepare_base

    base_graph = None
    if not args.no_base:
        if not args.base:
            raise UsageError("--base is required unless --no-base is given")
        rays, _ = load_rays(args.base)
        base_graph, _ = prepare_base(None, rays)
    options = (EncodeOptions.trivial() if args.trivial else
               EncodeOptions.structure_only() if args.structure_only else EncodeOptions())
    cfg = SearchConfig(n=args.order, options=options, rcl=not args.no_rcl,
                       geometry=not args.no_geometry, lazy010=not args.no_lazy010)
    build_cnf(cfg, base_graph).write(args.emit_dimacs)
    print(f"wrote {args.emit_dimacs}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
