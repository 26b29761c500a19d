"""Command-line front end.

Exit codes: 0 ok, 1 a verifier failed, 64 usage error, 65 bad input data.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from typing import List, Optional

from . import cop, oracle, partition, scattering, treecover
from .graph import GraphError, WeightedGraph, diameter, dijkstra, load_edge_list, save_edge_list
from .report import Report

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_DATA = 0, 1, 64, 65
EXHAUSTIVE_LIMIT = 1000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser, graph: bool = True) -> None:
    if graph:
        p.add_argument("--input", required=True, help="edge-list file ('n m' header, then 'u v w')")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify", choices=["off", "sampled", "exhaustive"], default="off")
    p.add_argument("--format", choices=["json", "csv", "dot"], default="json")


def _scale(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r", type=int, default=5, help="excluded clique size (>= 3)")
    p.add_argument("--delta", type=float)
    p.add_argument("--epsilon", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kr-shortcut", description="Shortcut partitions of minor-free graphs.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="buffered cop decomposition")
    _common(p)
    _scale(p)
    p = sub.add_parser("partition", help="shortcut partition")
    _common(p)
    _scale(p)
    p = sub.add_parser("spr", help="Steiner point removal")
    _common(p)
    p.add_argument("--terminals", required=True, help="JSON list or one id per line")
    p.add_argument("--zeta", type=float, default=16.0)
    p.add_argument("--r", type=int, default=5)
    p = sub.add_parser("treecover", help="(1+eps) tree cover")
    _common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--r", type=int, default=5)

    p = sub.add_parser("oracle", help="distance oracle")
    osub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = osub.add_parser("build", help="build an oracle file from a graph")
    _common(q)
    q.add_argument("--epsilon", type=float, required=True)
    q.add_argument("--r", type=int, default=5)
    q = osub.add_parser("query", help="answer one query")
    q.add_argument("--oracle", required=True)
    q.add_argument("u", type=int)
    q.add_argument("v", type=int)
    q = osub.add_parser("bench", help="time random queries")
    _common(q, graph=False)
    q.add_argument("--oracle", required=True)
    q.add_argument("--pairs", type=int, default=10000)
    q.add_argument("--input", help="graph file; adds exact distances to the report")

    p = sub.add_parser("verify", help="re-verify saved artifacts")
    _common(p)
    p.add_argument("--artifact", action="append",
                   help="artifact file (repeatable); default: every known artifact in --out")
    p.add_argument("--level", choices=["sampled", "exhaustive"], dest="level")

    p = sub.add_parser("report", help="CSV measurements plus figures")
    _common(p)
    _scale(p)
    p.add_argument("--pairs", type=int, default=2000)
    return ap


# -- helpers ------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise GraphError(f"{path}: {e.strerror}") from None


def _load_graph(path: str) -> WeightedGraph:
    text = _read(path)
    try:
        return load_edge_list(text)
    except GraphError as e:
        raise GraphError(f"{path}: {e}") from None


def _write(args, name: str, text: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    print(f"wrote {path}")
    return path


def _csv(header: List[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _delta(args, g: WeightedGraph) -> float:
    if (args.delta is None) == (args.epsilon is None):
        raise UsageError("give exactly one of --delta and --epsilon")
    if args.r < 3:
        raise UsageError("--r must be at least 3")
    if args.delta is not None:
        if not args.delta > 0:
            raise UsageError("--delta must be positive")
        return args.delta
    if not 0 < args.epsilon < 1:
        raise UsageError("--epsilon must lie in (0, 1)")
    return args.epsilon * diameter(g) / 4


def _level(args, g: WeightedGraph) -> str:
    level = getattr(args, "level", None) or args.verify
    if level == "exhaustive" and g.n > EXHAUSTIVE_LIMIT:
        print(f"warning: n = {g.n} > {EXHAUSTIVE_LIMIT}, verifying by sampling", file=sys.stderr)
        return "sampled"
    return level


def _finish(reports: List[Report]) -> int:
    code = EXIT_OK
    for rep in reports:
        print(rep)
        for msg in rep.violations[:20]:
            print(f"  violation: {msg}")
        if rep.warnings:
            print(f"  {len(rep.warnings)} warning(s)")
        if not rep.ok:
            code = EXIT_VERIFY
    return code


def _emit(args, stem: str, obj, csv_text) -> None:
    if args.format == "json":
        _write(args, f"{stem}.json", obj.to_json())
    elif args.format == "csv":
        _write(args, f"{stem}.csv", csv_text())
    else:
        _write(args, f"{stem}.dot", obj.to_dot())


def _read_terminals(path: str, n: int) -> List[int]:
    text = _read(path).strip()
    try:
        if text.startswith("["):
            ts = [int(x) for x in json.loads(text)]
        else:
            ts = [int(line.split("#")[0]) for line in text.splitlines() if line.split("#")[0].strip()]
    except ValueError as e:
        raise GraphError(f"{path}: bad terminal id ({e})") from None
    if any(not 0 <= t < n for t in ts):
        raise GraphError(f"{path}: terminal id out of range")
    return ts


# -- commands -----------------------------------------------------------------

def _verify_decomposition(dec) -> List[Report]:
    return [cop.verify_all(dec)]


def _verify_clustering(c, level: str, seed: int) -> List[Report]:
    sample = "all" if level == "exhaustive" else 2000
    return [partition.verify_clusters(c), partition.verify_shortcut(c, sample=sample, seed=seed)]


def _verify_cover(tc, g, level: str, seed: int) -> List[Report]:
    if level == "exhaustive":
        return [treecover.verify_cover(tc, g)]
    # sampled: dominance and stretch on random pairs against exact distances
    rep = Report("tree_cover_sampled")
    o = oracle.build_oracle(tc, check_coverage=False)
    rng = random.Random(seed)
    worst = 1.0
    for _ in range(50):
        u = rng.randrange(g.n)
        dist, *_ = dijkstra(g, [u])
        for _ in range(40):
            v = rng.randrange(g.n)
            if u == v:
                continue
            q = o.query(u, v)
            if q < dist[v]:
                rep.fail(f"pair ({u}, {v}): cover distance {q} < {dist[v]}")
            elif q > (1 + tc.eps) * dist[v]:
                rep.fail(f"pair ({u}, {v}): cover distance {q} > (1+eps) * {dist[v]}")
            worst = max(worst, q / dist[v])
    rep.stats["max_stretch"] = worst
    return [rep]


def cmd_decompose(args) -> int:
    g = _load_graph(args.input)
    delta = _delta(args, g)
    dec = cop.build_decomposition(g, args.r, delta)
    _emit(args, "decomposition", dec, lambda: _csv(
        ["vertex", "supernode", "parent"],
        [(v, s, dec.supernodes[s].parent if dec.supernodes[s].parent is not None else "")
         for v, s in enumerate(dec.assignment)]))
    if _level(args, g) == "off":
        return EXIT_OK
    return _finish(_verify_decomposition(dec))


def cmd_partition(args) -> int:
    g = _load_graph(args.input)
    delta = _delta(args, g)
    c = partition.build_partition(cop.build_decomposition(g, args.r, delta))
    _emit(args, "clustering", c, lambda: _csv(
        ["vertex", "cluster", "center", "supernode"],
        [(v, k, c.centers[k], c.supernode_of[k]) for v, k in enumerate(c.owner)]))
    level = _level(args, g)
    if level == "off":
        return EXIT_OK
    return _finish(_verify_clustering(c, level, args.seed))


def cmd_spr(args) -> int:
    g = _load_graph(args.input)
    if not args.zeta > 4:
        raise UsageError("--zeta must exceed 4")
    ts = _read_terminals(args.terminals, g.n)
    tm = scattering.spr_solve(g, ts, zeta=args.zeta, r=args.r)
    if args.format == "json":
        _write(args, "minor.json", tm.to_json())
        _write(args, "minor.txt", save_edge_list(tm.minor_graph()))
    elif args.format == "csv":
        _write(args, "minor.csv", _csv(["u", "v", "w"], [(a, b, w) for (a, b), w in sorted(tm.edges.items())]))
        _write(args, "branch.csv", _csv(["vertex", "terminal"], list(enumerate(tm.f))))
    else:
        _write(args, "minor.dot", tm.to_dot())
    if _level(args, g) == "off":
        return EXIT_OK
    rep = scattering.verify_minor(tm)
    print(f"distortion {rep.stats.get('distortion')}")
    return _finish([rep])


def cmd_treecover(args) -> int:
    g = _load_graph(args.input)
    if not 0 < args.epsilon < 1:
        raise UsageError("--epsilon must lie in (0, 1)")
    tc = treecover.build_tree_cover(g, args.epsilon, args.r)
    if args.format == "csv":
        rows = [(k, t.forest, t.scale, t.root, u, w)
                for k, t in enumerate(tc.trees) for u, w in zip(t.members, t.weights)]
        _write(args, "cover.csv", _csv(["tree", "forest", "scale", "root", "member", "weight"], rows))
    else:
        if args.format == "dot":
            print("warning: no DOT form for a cover, writing JSON", file=sys.stderr)
        _write(args, "cover.json", tc.to_json())
    print(f"trees {len(tc.trees)} forests {len(tc.forests)} per scale {tc.scales()}")
    level = _level(args, g)
    if level == "off":
        return EXIT_OK
    return _finish(_verify_cover(tc, g, level, args.seed))


def cmd_oracle(args) -> int:
    if args.action == "build":
        g = _load_graph(args.input)
        if not 0 < args.epsilon < 1:
            raise UsageError("--epsilon must lie in (0, 1)")
        tc = treecover.build_tree_cover(g, args.epsilon, args.r)
        o = oracle.build_oracle(tc)
        _write(args, "oracle.json", oracle.save_oracle(o))
        print(json.dumps(o.stats(), sort_keys=True))
        level = _level(args, g)
        return EXIT_OK if level == "off" else _finish(_verify_cover(tc, g, level, args.seed))
    o = oracle.load_oracle(_read(args.oracle))
    if args.action == "query":
        print(repr(o.query(args.u, args.v)))
        return EXIT_OK
    rng = random.Random(args.seed)
    pairs = [(rng.randrange(o.n), rng.randrange(o.n)) for _ in range(args.pairs)]
    res = oracle.bench(o, pairs)
    answers = res.pop("answers")
    exact = None
    if args.input:
        g = _load_graph(args.input)
        exact = {}
        for u in sorted({u for u, _ in pairs}):
            exact[u], *_ = dijkstra(g, [u])
    rows = [(u, v, a, "" if exact is None else exact[u][v]) for (u, v), a in zip(pairs, answers)]
    if args.format == "csv":
        _write(args, "bench.csv", _csv(["u", "v", "oracle", "exact"], rows))
    else:
        _write(args, "bench.json", json.dumps(res, sort_keys=True, indent=1) + "\n")
    print(json.dumps({k: v for k, v in res.items() if k != "seconds_per_query"}, sort_keys=True))
    if exact is not None:
        bad = [r for r in rows if not r[3] <= r[2] <= (1 + o.cover.eps) * r[3]]
        rep = Report("oracle_bench")
        for u, v, a, d in bad[:20]:
            rep.fail(f"query ({u}, {v}) = {a}, exact {d}")
        return _finish([rep])
    return EXIT_OK


_ARTIFACTS = ["decomposition.json", "clustering.json", "minor.json", "cover.json", "oracle.json"]


def cmd_verify(args) -> int:
    g = _load_graph(args.input)
    level = _level(args, g)
    if level == "off":
        level = "sampled"
    paths = args.artifact or [os.path.join(args.out, a) for a in _ARTIFACTS
                              if os.path.exists(os.path.join(args.out, a))]
    if not paths:
        raise UsageError("no artifacts to verify")
    reports: List[Report] = []
    for path in paths:
        try:
            data = json.loads(_read(path))
        except json.JSONDecodeError as e:
            raise GraphError(f"{path}: line {e.lineno}: {e.msg}") from None
        kind = data.get("kind")
        if kind == "cop_decomposition":
            reports += _verify_decomposition(cop.CopDecomposition.from_dict(data, g))
        elif kind == "clustering":
            c = partition.Clustering.from_dict(data, g)
            reports += _verify_decomposition(c.dec) + _verify_clustering(c, level, args.seed)
        elif kind == "terminal_minor":
            reports.append(scattering.verify_minor(scattering.TerminalMinor.from_dict(data, g)))
        elif kind == "tree_cover":
            tc = treecover.TreeCover.from_dict(data)
            if tc.n != g.n:
                raise GraphError(f"{path}: cover does not match the graph size")
            reports += _verify_cover(tc, g, level, args.seed)
        else:
            raise GraphError(f"{path}: unknown artifact kind {kind!r}")
    return _finish(reports)


def cmd_report(args) -> int:
    from .plotting import plot_cost_vs_distance, plot_sizes

    g = _load_graph(args.input)
    delta = _delta(args, g)
    dec = cop.build_decomposition(g, args.r, delta)
    c = partition.build_partition(dec)
    rows: list = []
    rep = partition.verify_shortcut(c, sample=args.pairs, seed=args.seed, rows=rows)
    _write(args, "costs.csv", _csv(["u", "v", "distance", "cost"],
                                   [(u, v, d, "" if k is None else k) for u, v, d, k in rows]))
    summary = [("supernodes", len(dec.supernodes)), ("clusters", len(c.clusters)),
               ("delta", delta), ("r", args.r)] + sorted(rep.stats.items())
    _write(args, "summary.csv", _csv(["metric", "value"], summary))
    os.makedirs(args.out, exist_ok=True)
    plot_cost_vs_distance(rows, delta, args.r, os.path.join(args.out, "cost_vs_distance.png"))
    plot_sizes([len(s.vertices) for s in dec.supernodes], [len(x) for x in c.clusters],
               os.path.join(args.out, "sizes.png"))
    print(f"wrote {os.path.join(args.out, 'cost_vs_distance.png')}")
    print(f"wrote {os.path.join(args.out, 'sizes.png')}")
    return _finish([rep])


COMMANDS = {
    "decompose": cmd_decompose,
    "partition": cmd_partition,
    "spr": cmd_spr,
    "treecover": cmd_treecover,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
    "report": cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"kr-shortcut: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, cop.InvariantViolation) as e:
        print(f"kr-shortcut: error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
