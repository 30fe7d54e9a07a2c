"""Command-line entry point: ``colorgame <command> [--config FILE] [flags]``.

Every run writes into ``<out>/<command>/<config-hash>/``: ``records.csv``
(deterministic body), ``meta.json`` (config, timings, summaries) and, where
relevant, ``traces/``.  Flags override values from the JSON config file and
``GCN_WORKERS`` overrides the worker count.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

from colorgame import ballsbins as bb
from colorgame.analysis.endgame import endgame_decomposition
from colorgame.analysis.estimate import (RATE_COLUMNS, PlayoutResult, PlayoutTask, estimate_chi_g, game_seed,
                                         graph_seed, run_playout, tally)
from colorgame.analysis.formulas import constants, rate_functions, theory_anchors
from colorgame.analysis.monitors import trace_monitors
from colorgame.arranger import ArrangementInput, color_arranging, verify_arrangement
from colorgame.boxgame import BOX_POLICIES, STEAL_SCHEDULES, BoxInstance, criterion_holds, play_boxgame, solve_boxgame_exact
from colorgame.exact import solve_exact
from colorgame.game import play_game
from colorgame.graph import Graph, GraphFormatError, bipartite_minus_matching, gen_gnp, parse_graph, serialize_graph
from colorgame.seeding import make_rng
from colorgame.strategies import parse_strategy

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
COMMANDS = ("gen", "play", "solve", "boxgame", "ballsbins", "arrange", "formulas", "estimate", "sweep")
SWEEP_COLUMNS = ["k", "maker", "breaker", "index", "graph_seed", "seed", "outcome", "moves"]


class ConfigError(ValueError):
    pass


def code_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


# --- configuration ---------------------------------------------------------------

DEFAULTS = {
    "gen": {"n": None, "p": None, "seed": 0, "bipartite": None},
    "play": {"gnp": None, "graph": None, "bipartite": None, "k": None, "maker": "paper:N=160",
             "breaker": "random", "seed": 0, "max_moves": None, "alpha": None, "decompose": False},
    "solve": {"gnp": None, "graph": None, "bipartite": None, "k": None, "budget": 12},
    "boxgame": {"sizes": None, "q": None, "z": 1, "d": 0, "breaker_policy": "smallest", "steal": "max",
                "maker_rule": "smallest", "seed": 0, "exact": False},
    "ballsbins": {"k": None, "N": None, "adversary": "random", "script": None, "horizon": None, "seed": 0,
                  "a": None, "schedule": "fixed", "height": None, "p_remove": 0.0},
    "arrange": {"input": None, "q": None, "seed": None},
    "formulas": {"alpha": None, "n": None, "p": None, "h": None},
    "estimate": {"n": None, "p": None, "maker": None, "breakers": "random,colorhog,minavail",
                 "playouts": 100, "seed": 0, "threshold": 0.95, "alpha": 1.5},
    "sweep": {"n": None, "p": None, "ks": None, "maker": "paper:N=240", "makers": None,
              "breakers": "random,colorhog,minavail", "playouts": 20, "seed": 0},
}
REQUIRED = {
    "gen": [], "play": ["k"], "solve": ["k"], "boxgame": ["sizes", "q"], "ballsbins": ["k", "N", "horizon"],
    "arrange": ["input"], "formulas": ["alpha"], "estimate": ["n", "p"], "sweep": ["n", "p", "ks"],
}
# run-environment keys: they never change results, so they stay out of the hash
ENV_KEYS = ("workers", "out", "config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="colorgame", description="Maker-Breaker graph coloring game laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--out", help="output root (default: out)")
        sp.add_argument("--workers", type=int, help="worker processes (GCN_WORKERS overrides)")
        return sp

    sp = add("gen", "generate a G(n,p) or B_{n,n} minus a matching graph")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--bipartite", type=int, metavar="N")

    for name, help_ in (("play", "play one game and write its trace"), ("solve", "exact winner on a tiny graph")):
        sp = add(name, help_)
        sp.add_argument("--gnp", help="n,p[,graph_seed]")
        sp.add_argument("--graph", help="graph JSON file")
        sp.add_argument("--bipartite", type=int, metavar="N")
        sp.add_argument("--k", type=int)
        if name == "play":
            sp.add_argument("--maker")
            sp.add_argument("--breaker")
            sp.add_argument("--seed", type=int)
            sp.add_argument("--max-moves", dest="max_moves", type=int)
            sp.add_argument("--alpha", type=float, help="also run the trace monitors for this alpha")
            sp.add_argument("--decompose", action="store_true", help="endgame decomposition if Breaker wins")
        else:
            sp.add_argument("--budget", type=int)

    sp = add("boxgame", "play or solve a box game")
    sp.add_argument("--sizes", help="comma-separated set sizes")
    sp.add_argument("--q", type=int)
    sp.add_argument("--z", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--breaker-policy", "--breaker", dest="breaker_policy", choices=sorted(BOX_POLICIES))
    sp.add_argument("--steal", choices=STEAL_SCHEDULES)
    sp.add_argument("--maker-rule", dest="maker_rule", choices=("smallest", "slack"))
    sp.add_argument("--seed", type=int)
    sp.add_argument("--exact", action="store_true")
    # the criterion is always evaluated; the flag is accepted for readability
    sp.add_argument("--check-criterion", action="store_true", dest="_check_criterion")

    sp = add("ballsbins", "run the balls-and-bins game")
    sp.add_argument("--k", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--adversary", choices=("random", "min", "stacker", "remover", "switch", "script", "custom-script"))
    sp.add_argument("--script", help="python file defining make_adversary(**kwargs)")
    sp.add_argument("--horizon", "--balls", dest="horizon", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--a", type=int, help="check the C(l) bound for this a")
    sp.add_argument("--schedule", choices=("fixed", "adaptive"))
    sp.add_argument("--height", type=int)
    sp.add_argument("--p-remove", dest="p_remove", type=float)

    sp = add("arrange", "run ColorArranging on a JSON input")
    sp.add_argument("--input", help='JSON file {"U": [...], "avail": {"v": [colors]}, "q": int}')
    sp.add_argument("--q", type=int)
    sp.add_argument("--seed", type=int, help="shuffle the color order with this seed")

    sp = add("formulas", "print strategy constants and rate functions")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--h", type=float)

    sp = add("estimate", "estimate the game chromatic number of G(n,p)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--maker", help="default: phased Maker paper:N=<N from --alpha>")
    sp.add_argument("--breakers")
    sp.add_argument("--playouts", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threshold", type=float)
    sp.add_argument("--alpha", type=float)

    sp = add("sweep", "grid of playouts over k, makers and breakers (resumable)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=float)
    sp.add_argument("--ks", help="start:stop:step (inclusive) or comma list")
    sp.add_argument("--maker")
    sp.add_argument("--makers", help="comma list, overrides --maker")
    sp.add_argument("--breakers")
    sp.add_argument("--playouts", type=int)
    sp.add_argument("--seed", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> tuple[dict, dict]:
    """Merge defaults, config file and flags; return (config, environment)."""
    flags = {k: v for k, v in vars(args).items() if not k.startswith("_")}
    command = flags.pop("command")
    cfg = dict(DEFAULTS[command])
    if flags.get("config"):
        try:
            with open(flags["config"]) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {flags['config']}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a JSON object")
        if doc.get("command", command) != command:
            raise ConfigError(f"config is for command {doc['command']!r}, not {command!r}")
        env_from_file = {k: doc.pop(k) for k in ENV_KEYS if k in doc}
        doc.pop("command", None)
        unknown = set(doc) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(doc)
    else:
        env_from_file = {}
    env = {"out": "out", "workers": 1, **env_from_file}
    for key in ENV_KEYS:
        if key in flags:
            env[key] = flags.pop(key)
    cfg.update(flags)
    if os.environ.get("GCN_WORKERS"):
        try:
            env["workers"] = int(os.environ["GCN_WORKERS"])
        except ValueError:
            raise ConfigError("GCN_WORKERS must be an integer") from None
    missing = [k for k in REQUIRED[command] if cfg.get(k) is None]
    if missing:
        raise ConfigError(f"{command}: missing required parameters {missing}")
    cfg = {"command": command, **cfg}
    return cfg, env


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


class Run:
    """Output directory for one config."""

    def __init__(self, cfg: dict, env: dict):
        self.cfg = cfg
        self.dir = Path(env["out"]) / cfg["command"] / config_hash(cfg)
        try:
            self.dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {self.dir}: {exc}") from None
        self.started = time.time()
        self.meta: dict = {"config": cfg, "config_hash": config_hash(cfg), "version": code_version()}

    def path(self, name: str) -> Path:
        return self.dir / name

    def write_csv(self, name: str, header: list[str], rows) -> Path:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return self.write_text(name, buf.getvalue())

    def write_text(self, name: str, text: str) -> Path:
        p = self.path(name)
        p.parent.mkdir(parents=True, exist_ok=True)
        tmp = p.with_suffix(p.suffix + ".tmp")
        tmp.write_text(text)
        tmp.replace(p)
        return p

    def finish(self, **summary) -> None:
        self.meta.update(summary)
        self.meta["started"] = self.started
        self.meta["wall_clock_s"] = round(time.time() - self.started, 3)
        self.write_text("meta.json", json.dumps(self.meta, indent=2, sort_keys=True, default=str) + "\n")


# --- helpers -----------------------------------------------------------------------

def _ints(text, what: str) -> list[int]:
    if isinstance(text, list):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated integers, got {text!r}") from None


def _names(text) -> list[str]:
    return list(text) if isinstance(text, list) else [x.strip() for x in str(text).split(",") if x.strip()]


def parse_ks(spec) -> list[int]:
    if isinstance(spec, list):
        return [int(x) for x in spec]
    spec = str(spec)
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError("ks range must be start:stop:step")
        try:
            start, stop, step = (int(x) for x in parts)
        except ValueError:
            raise ConfigError(f"bad ks range {spec!r}") from None
        if step < 1 or stop < start:
            raise ConfigError(f"bad ks range {spec!r}")
        return list(range(start, stop + 1, step))
    return _ints(spec, "ks")


def load_graph(cfg: dict) -> tuple[Graph, dict | None, dict]:
    """The graph selected by --gnp/--graph/--bipartite, its matching, and header params."""
    chosen = [key for key in ("gnp", "graph", "bipartite") if cfg.get(key) is not None]
    if len(chosen) != 1:
        raise ConfigError("give exactly one of --gnp, --graph, --bipartite")
    if cfg.get("gnp") is not None:
        parts = str(cfg["gnp"]).split(",")
        if len(parts) not in (2, 3):
            raise ConfigError("--gnp takes n,p[,graph_seed]")
        try:
            n, p = int(parts[0]), float(parts[1])
            gseed = int(parts[2]) if len(parts) == 3 else 0
        except ValueError:
            raise ConfigError(f"bad --gnp value {cfg['gnp']!r}") from None
        if n < 1 or not 0 <= p <= 1:
            raise ConfigError("--gnp needs n >= 1 and 0 <= p <= 1")
        return gen_gnp(n, p, gseed), None, {"gnp": [n, p, gseed]}
    if cfg.get("graph") is not None:
        try:
            text = Path(cfg["graph"]).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read graph file: {exc}") from None
        try:
            return parse_graph(text), None, {"graph": str(cfg["graph"])}
        except GraphFormatError as exc:
            raise ConfigError(f"graph file {cfg['graph']}: {exc} at {exc.position}") from None
    n = int(cfg["bipartite"])
    if n < 1:
        raise ConfigError("--bipartite needs n >= 1")
    g, matching = bipartite_minus_matching(n)
    return g, matching, {"bipartite": n}


# --- commands ----------------------------------------------------------------------

def cmd_gen(cfg, env):
    if cfg["bipartite"] is not None:
        g, _ = bipartite_minus_matching(int(cfg["bipartite"]))
    else:
        if cfg["n"] is None or cfg["p"] is None:
            raise ConfigError("gen needs --n and --p, or --bipartite")
        if not 0 <= cfg["p"] <= 1 or cfg["n"] < 1:
            raise ConfigError("gen needs n >= 1 and 0 <= p <= 1")
        g = gen_gnp(cfg["n"], cfg["p"], cfg["seed"])
    run = Run(cfg, env)
    path = run.write_text("graph.json", serialize_graph(g) + "\n")
    run.write_csv("records.csv", ["n", "edges", "max_degree"], [[g.n, g.edge_count, g.max_degree]])
    run.finish(graph=str(path))
    print(path)
    return EXIT_OK


def cmd_play(cfg, env):
    graph, matching, gparams = load_graph(cfg)
    try:
        maker = parse_strategy(cfg["maker"])
        breaker = parse_strategy(cfg["breaker"], matching)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    run = Run(cfg, env)
    trace = play_game(graph, cfg["k"], maker, breaker, cfg["seed"], max_moves=cfg["max_moves"], params=gparams)
    path = run.write_text("traces/game.jsonl", trace.to_jsonl())
    run.write_csv("records.csv", ["seed", "k", "maker", "breaker", "outcome", "moves", "witness"],
                  [[cfg["seed"], cfg["k"], maker.name, breaker.name, trace.outcome.value, len(trace.moves),
                    "" if trace.witness is None else trace.witness]])
    summary = {"outcome": trace.outcome.value, "moves": len(trace.moves), "trace": str(path)}
    if cfg["alpha"] is not None:
        if "gnp" not in gparams:
            raise ConfigError("--alpha monitors need a --gnp graph")
        report = trace_monitors(trace, cfg["alpha"], graph=graph)
        run.write_text("monitors.json", json.dumps(report.to_dict(), default=str) + "\n")
        summary["monitors"] = report.summary()
        if cfg["decompose"] and trace.outcome.value == "breaker_won":
            dec = endgame_decomposition(trace, cfg["alpha"], graph=graph)
            run.write_text("decomposition.json", json.dumps(dec.to_dict()) + "\n")
            summary["decomposition_first_failure"] = dec.first_failure
    run.finish(**summary)
    print(f"{trace.outcome.value} after {len(trace.moves)} moves; trace: {path}")
    return EXIT_OK


def cmd_solve(cfg, env):
    graph, _, _ = load_graph(cfg)
    if graph.n > cfg["budget"]:
        raise ConfigError(f"graph has {graph.n} vertices, budget is {cfg['budget']}")
    run = Run(cfg, env)
    outcome = solve_exact(graph, cfg["k"], vertex_budget=cfg["budget"])
    run.write_csv("records.csv", ["n", "k", "outcome"], [[graph.n, cfg["k"], outcome.value]])
    run.finish(outcome=outcome.value)
    print(outcome.value)
    return EXIT_OK


def cmd_boxgame(cfg, env):
    try:
        inst = BoxInstance(tuple(_ints(cfg["sizes"], "sizes")), q=cfg["q"], z=cfg["z"], d=cfg["d"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    run = Run(cfg, env)
    crit = criterion_holds(inst.sizes, inst.q, inst.d, inst.z)
    res = play_boxgame(inst, cfg["breaker_policy"], cfg["steal"], cfg["seed"], maker=cfg["maker_rule"])
    row = [cfg["sizes"] if isinstance(cfg["sizes"], str) else ",".join(map(str, cfg["sizes"])),
           inst.q, inst.z, inst.d, int(crit.holds), res.winner, res.rounds]
    header = ["sizes", "q", "z", "d", "criterion", "winner", "rounds"]
    summary = {"criterion": crit.holds, "witness": crit.witness, "winner": res.winner}
    if cfg["exact"]:
        try:
            exact = solve_boxgame_exact(inst)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        header.append("exact")
        row.append(exact)
        summary["exact"] = exact
    run.write_csv("records.csv", header, [row])
    run.finish(**summary)
    print(f"criterion {'holds' if crit.holds else f'fails at m={crit.witness}'}; simulated: {res.winner}"
          + (f"; exact: {summary['exact']}" if cfg["exact"] else ""))
    return EXIT_OK


def make_adversary(cfg) -> bb.Adversary:
    kind = cfg["adversary"]
    height = cfg["height"] or max(2, (cfg["a"] or 10))
    if kind == "random":
        return bb.RandomAdversary(p_remove=cfg["p_remove"])
    if kind == "min":
        return bb.MinAdversary()
    if kind == "stacker":
        return bb.StackerAdversary(height)
    if kind == "remover":
        return bb.RemovalHeavyAdversary()
    if kind == "switch":
        return bb.SwitchAdversary(height)
    if kind in ("script", "custom-script"):
        if not cfg["script"]:
            raise ConfigError("--adversary script needs --script")
        return bb.load_adversary_script(cfg["script"], k=cfg["k"], N=cfg["N"])
    raise ConfigError(f"unknown adversary {kind!r}")


def cmd_ballsbins(cfg, env):
    if cfg["k"] < 1 or cfg["N"] < 2 or cfg["horizon"] < 0:
        raise ConfigError("ballsbins needs k >= 1, N >= 2, horizon >= 0")
    adversary = make_adversary(cfg)
    run = Run(cfg, env)
    trace = bb.play_ballsbins(cfg["k"], cfg["N"], adversary, cfg["horizon"], cfg["seed"],
                              steal_schedule=cfg["schedule"])
    run.write_text("records.csv", trace.to_csv())
    summary = {"balls": len(trace.balls), "max_level": trace.max_level, "halted": trace.halted}
    if cfg["a"] is not None:
        violations = bb.check_load_bound(trace, cfg["a"])
        summary["bound_violations"] = [v._asdict() for v in violations]
        print(f"C(l) bound with a={cfg['a']}: {len(violations)} violation(s)")
    run.finish(**summary)
    print(f"{len(trace.balls)} balls, level {trace.max_level}")
    return EXIT_OK


def cmd_arrange(cfg, env):
    try:
        doc = json.loads(Path(cfg["input"]).read_text())
        U = [int(v) for v in doc["U"]]
        avail = {int(v): frozenset(int(c) for c in cs) for v, cs in doc["avail"].items()}
        q = int(cfg["q"] if cfg["q"] is not None else doc["q"])
        inp = ArrangementInput(U=U, avail=avail, q=q, color_order=doc.get("color_order"))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad arrange input: {exc}") from None
    run = Run(cfg, env)
    result = color_arranging(inp, rng=None if cfg["seed"] is None else make_rng(cfg["seed"]))
    report = verify_arrangement(inp, result)
    run.write_csv("records.csv", ["v", "S"], [[v, ";".join(map(str, sorted(result.S[v])))] for v in U])
    run.finish(residual_ok=report.residual_ok, size_ok=report.size_ok, max_s=result.max_s)
    for v in U:
        print(f"S({v}) = {sorted(result.S[v])}")
    print(f"residual <= q: {report.residual_ok}; |S(v)| <= q: {report.size_ok}")
    return EXIT_OK


def cmd_formulas(cfg, env):
    try:
        c = constants(cfg["alpha"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    run = Run(cfg, env)
    lines = [f"alpha = {float(c.alpha):g}", f"xi    = {float(c.xi):.6g}", f"N     = {c.N}", f"J     = {c.J}",
             "j  h        L         c"]
    lines += [f"{r['j']:<2} {r['h']:<8.4f} {r['L']:<9.4f} {r['c']:.6f}" for r in c.table()]
    rows = []
    if cfg["n"] is not None and cfg["p"] is not None:
        hs = [cfg["h"]] if cfg["h"] is not None else [float(h) for h in c.H]
        try:
            vals = [rate_functions(cfg["n"], cfg["p"], cfg["alpha"], h) for h in hs]
            anchors = theory_anchors(cfg["n"], cfg["p"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        lines.append(f"b = {vals[0].b:g}  log_b(np) = {vals[0].logb_np:.6g}  k = {vals[0].k}")
        lines.append(f"n/log_b(np) = {anchors['game']:.2f}  n/(2 log_b(np)) = {anchors['chromatic']:.2f}")
        lines.append("h        beta          gamma         q")
        for v in vals:
            lines.append(f"{v.h:<8.4f} {v.beta:<13.6g} {v.gamma:<13.6g} {v.q:.6g}")
            rows.append([v.h, repr(v.beta), repr(v.gamma), repr(v.q)])
    run.write_csv("records.csv", ["h", "beta", "gamma", "q"], rows)
    run.finish()
    print("\n".join(lines))
    return EXIT_OK


def cmd_estimate(cfg, env):
    n, p = cfg["n"], cfg["p"]
    if n < 1 or not 0 <= p <= 1 or cfg["playouts"] < 1:
        raise ConfigError("estimate needs n >= 1, 0 <= p <= 1, playouts >= 1")
    maker = cfg["maker"] or f"paper:N={constants(cfg['alpha']).N}"
    breakers = _names(cfg["breakers"])
    try:
        parse_strategy(maker)
        for b in breakers:
            parse_strategy(b)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    run = Run(cfg, env)
    est = estimate_chi_g(n, p, maker, breakers, cfg["playouts"], cfg["seed"], threshold=cfg["threshold"],
                         workers=env["workers"])
    run.write_csv("records.csv", RATE_COLUMNS, [r.csv_fields() for r in est.rows])
    run.finish(k_star=est.k_star, anchors=est.anchors, maker=maker)
    anchors = "  ".join(f"{k}={v:.1f}" for k, v in est.anchors.items())
    print(f"k* = {est.k_star}  ({anchors})")
    return EXIT_OK


def _sweep_tasks(cfg) -> list[PlayoutTask]:
    makers = _names(cfg["makers"]) if cfg["makers"] else [cfg["maker"]]
    breakers = _names(cfg["breakers"])
    for s in makers + breakers:
        try:
            parse_strategy(s)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    ks = parse_ks(cfg["ks"])
    n, p, seed = cfg["n"], cfg["p"], cfg["seed"]
    return [PlayoutTask(n, p, k, m, b, graph_seed(seed, i), game_seed(seed, k, b, i), i)
            for k in ks for m in makers for b in breakers for i in range(cfg["playouts"])]


def _task_key(t: PlayoutTask) -> tuple:
    return (t.k, t.maker, t.breaker, t.index)


def _sweep_row(t: PlayoutTask, outcome: str, moves: int) -> list:
    return [t.k, t.maker, t.breaker, t.index, t.graph_seed, t.seed, outcome, moves]


def read_partial(path: Path, tasks: dict) -> dict:
    """Rows already present in a partial records file, keyed like the tasks."""
    done = {}
    if not path.exists():
        return done
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return done
    if rows[0] != SWEEP_COLUMNS:
        raise RuntimeError(f"corrupt partial file {path}: unexpected header")
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            k, maker, breaker, index, gseed, seed, outcome, moves = row
            key = (int(k), maker, breaker, int(index))
            t = tasks[key]
            if int(gseed) != t.graph_seed or int(seed) != t.seed or outcome not in (
                    "maker_won", "breaker_won", "truncated"):
                raise ValueError
            done[key] = [t, outcome, int(moves)]
        except (ValueError, KeyError):
            raise RuntimeError(f"corrupt partial file {path}: bad record on line {lineno}") from None
    return done


def cmd_sweep(cfg, env):
    if cfg["playouts"] < 1:
        raise ConfigError("playouts must be at least 1")
    tasks = {_task_key(t): t for t in _sweep_tasks(cfg)}
    run = Run(cfg, env)
    path = run.path("records.csv")
    done = read_partial(path, tasks)
    todo = [t for key, t in tasks.items() if key not in done]
    mode = "a" if path.exists() and path.stat().st_size else "w"
    with open(path, mode, newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if mode == "w":
            w.writerow(SWEEP_COLUMNS)
            fh.flush()

        def sink(res):
            done[_task_key(res.task)] = [res.task, res.outcome, res.moves]
            w.writerow(_sweep_row(res.task, res.outcome, res.moves))
            fh.flush()

        if env["workers"] <= 1:
            for t in todo:
                sink(run_playout(t))
        else:
            with ProcessPoolExecutor(max_workers=env["workers"]) as pool:
                for fut in as_completed([pool.submit(run_playout, t) for t in todo]):
                    sink(fut.result())
    ordered = sorted(done.values(), key=lambda r: _task_key(r[0]))
    run.write_csv("records.csv", SWEEP_COLUMNS, [_sweep_row(*r) for r in ordered])
    # per-cell win rates
    cells: dict = {}
    for t, outcome, moves in ordered:
        cells.setdefault((t.k, t.maker), []).append(PlayoutResult(t, outcome, moves))
    rate_rows = []
    for (k, maker), results in sorted(cells.items()):
        breakers = sorted({r.task.breaker for r in results})
        for r in tally(results, breakers):
            rate_rows.append([maker, *r.csv_fields()])
    run.write_csv("rates.csv", ["maker", *RATE_COLUMNS], rate_rows)
    run.finish(cells=len(cells), records=len(ordered), resumed=len(tasks) - len(todo))
    print(f"{len(ordered)} records in {len(cells)} cells ({len(tasks) - len(todo)} resumed); {path}")
    return EXIT_OK


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, env = resolve_config(args)
        return HANDLERS[cfg["command"]](cfg, env)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure past validation is a runtime error
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
