# ui/cli.py
"""Wiersz poleceń: simulate, estimate, sweep, plot-data, export-network."""
import argparse
import logging
import os
import sys

import numpy as np
import pandas as pd

from data.data_loader import (
    BUILTIN_NETWORKS, SYNTHETIC8_REMOVED, EdgeListParseError, builtin_network, load_data_from_json,
    load_network, measurement_frame, save_data_to_json, save_frame_csv, save_network,
)
from data.matpower_io import BUILTIN_CASES, CaseParseError, dc_laplacian, load_builtin_case, read_case
from models.graph_model import EdgeChangeSet
from models.metrics_eval import accuracy, classify_support, lambda_sweep, sweep_frame, zero_threshold
from models.pipeline import Scenario, realize, recovered_changes, solve
from ui.run_config import CONFIG_FILE, resolve_run_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGED = 2
EXIT_PARSE = 3


class CliParser(argparse.ArgumentParser):
    """Parser zwracający kod 1 przy błędnym użyciu."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: błąd: {message}\n")


def _common_arguments():
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--network", help=f"sieć wbudowana ({', '.join(BUILTIN_NETWORKS)}) lub plik z listą krawędzi")
    source.add_argument("--matpower", help=f"plik przypadku .m lub przypadek wbudowany ({', '.join(BUILTIN_CASES)})")
    change = common.add_mutually_exclusive_group()
    change.add_argument("--remove", help="usuwane pary, np. '2-3,4-1'")
    change.add_argument("--random-remove", type=int, dest="random_remove", metavar="K",
                        help="liczba losowo usuwanych krawędzi")
    common.add_argument("--T", type=int, dest="T", help="długość horyzontu pomiarów")
    common.add_argument("--noise-var", dest="noise_var", help="wariancja szumu pomiarów")
    common.add_argument("--solver", choices=("lasso", "tls"))
    common.add_argument("--lambda", dest="lam", help="parametr regularyzacji")
    common.add_argument("--lambda-grid", dest="lambda_grid", metavar="LO:HI:STEPS", help="siatka lambda")
    common.add_argument("--lambda-scale", dest="lambda_scale",
                        help="mnożnik lambda: liczba albo 'n' (liczba obserwacji nT)")
    std = common.add_mutually_exclusive_group()
    std.add_argument("--standardize", dest="standardize", action="store_true", default=None)
    std.add_argument("--no-standardize", dest="standardize", action="store_false")
    common.add_argument("--runs", type=int, help="liczba niezależnych powtórzeń")
    common.add_argument("--seed", type=int, help="ziarno generatora")
    model = common.add_mutually_exclusive_group()
    model.add_argument("--reduced", dest="reduced", action="store_true", default=None,
                       help="model zredukowany do nośnika L0")
    model.add_argument("--full", dest="reduced", action="store_false", help="pełny model Vech")
    common.add_argument("--tls-init", dest="tls_init", choices=("zero", "lasso"))
    common.add_argument("--jobs", type=int, help="liczba równoległych procesów przeglądu")
    common.add_argument("--out", help="katalog wynikowy")
    common.add_argument("--config", default=CONFIG_FILE, help="plik JSON z konfiguracją domyślną")
    common.add_argument("--log-level", dest="log_level", default=None)
    return common


def build_parser():
    parser = CliParser(prog="edgechange", description="Identyfikacja rzadkich zmian krawędzi sieci.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_arguments()
    sub.add_parser("simulate", parents=[common], help="zapisz pomiary i scenariusz")
    sub.add_parser("estimate", parents=[common], help="estymuj zmiany dla jednej lambdy")
    sweep = sub.add_parser("sweep", parents=[common], help="przegląd siatki lambda")
    sweep.add_argument("--with-std", dest="with_std", action="store_true",
                       help="dołącz odchylenia standardowe do JSON")
    plot = sub.add_parser("plot-data", parents=[common], help="kolumny do wykresu z wyników przeglądu")
    plot.add_argument("--input", help="plik sweep.json (domyślnie OUT/sweep.json)")
    sub.add_parser("export-network", parents=[common], help="zapisz sieć jako listę krawędzi")
    return parser


def load_reference(cfg):
    """Sieć odniesienia i etykiety węzłów (numery szyn dla przypadków MATPOWER)."""
    if cfg.matpower is not None:
        case = load_builtin_case(cfg.matpower) if cfg.matpower in BUILTIN_CASES else read_case(cfg.matpower)
        net, _, bus_ids = dc_laplacian(case)
        return net, tuple(bus_ids)
    if cfg.network in BUILTIN_NETWORKS:
        return builtin_network(cfg.network), None
    return load_network(cfg.network), None


def build_scenario(cfg):
    net, labels = load_reference(cfg)
    random_k = None
    changes = None
    if cfg.random_remove is not None:
        random_k = cfg.random_remove
    elif cfg.remove is not None:
        to_node = {label: k + 1 for k, label in enumerate(labels)} if labels else None
        try:
            pairs = [(to_node[i], to_node[j]) if to_node else (i, j) for i, j in cfg.remove]
        except KeyError as e:
            raise ValueError(f"Nieznany węzeł {e.args[0]} w --remove")
        changes = EdgeChangeSet(removed=frozenset(pairs))
    elif cfg.network == "synthetic8":
        changes = EdgeChangeSet(removed=frozenset(SYNTHETIC8_REMOVED))
    else:
        raise ValueError("Podaj --remove albo --random-remove")
    return Scenario(network=net, changes=changes, random_k=random_k, T=cfg.T,
                    noise_variance=cfg.noise_var, reduced=cfg.reduced, labels=labels)


def _labelled(scenario, pair):
    return [scenario.label(pair[0]), scenario.label(pair[1])]


def _out_path(cfg, name):
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def cmd_simulate(cfg):
    scenario = build_scenario(cfg)
    run = realize(scenario, cfg.seed)
    save_frame_csv(measurement_frame(run.measurements, scenario.labels), _out_path(cfg, "measurements.csv"))
    save_data_to_json({
        "config": cfg.echo(),
        "n": scenario.network.n,
        "m": scenario.network.m,
        "seed": cfg.seed,
        "removed": [_labelled(scenario, p) for p in sorted(run.changes.removed)],
        "added": [[*_labelled(scenario, p), w] for p, w in run.changes.added],
    }, _out_path(cfg, "scenario.json"))
    return EXIT_OK


def cmd_estimate(cfg):
    scenario = build_scenario(cfg)
    run = realize(scenario, cfg.seed)
    design = run.design
    est = solve(design, cfg.solver, cfg.lam, standardize=cfg.standardize,
                lambda_scale=cfg.lambda_scale, tls_init=cfg.tls_init)
    eps = zero_threshold(est.beta)
    counts = classify_support(est.beta, run.beta_true, eps)
    found = recovered_changes(design.expand(est.beta), design.index_map, eps)
    logger.info("Estymacja %s: lambda=%g, acc=%.4f, wykryte krawędzie=%d",
                cfg.solver, cfg.lam, accuracy(counts), len(found))
    report = est.to_dict(design)
    report.update({
        "config": cfg.echo(),
        "seed": cfg.seed,
        "design": design.describe(),
        "zero_threshold": eps,
        "confusion": {"tp": counts.tp, "tn": counts.tn, "fp": counts.fp, "fn": counts.fn,
                      "acc": accuracy(counts), "tpr": counts.tpr, "tnr": counts.tnr},
        "true_removed": [_labelled(scenario, p) for p in sorted(run.changes.removed)],
        "recovered": [{"pair": _labelled(scenario, p), "value": v} for p, v in found],
    })
    save_data_to_json(report, _out_path(cfg, "estimate.json"))
    lines = ["# i j delta (dodatnia = usunięta krawędź)"]
    lines += [f"{scenario.label(p[0])} {scenario.label(p[1])} {v!r}" for p, v in found]
    with open(_out_path(cfg, "recovered_edges.txt"), "w", encoding="utf-8") as file:
        file.write("\n".join(lines) + "\n")
    return EXIT_OK if est.converged else EXIT_NONCONVERGED


def cmd_sweep(cfg, with_std=False):
    scenario = build_scenario(cfg)
    lambdas = cfg.lambda_grid if cfg.lambda_grid is not None else (cfg.lam,)
    rows = lambda_sweep(scenario, lambdas, cfg.runs, solver=cfg.solver, seed0=cfg.seed,
                        jobs=cfg.jobs, standardize=cfg.standardize,
                        lambda_scale=cfg.lambda_scale, with_std=with_std)
    frame = sweep_frame(rows)
    save_frame_csv(frame, _out_path(cfg, "sweep.csv"))
    save_data_to_json({
        "config": cfg.echo(),
        "rows": [dict(row.as_record(), tpr=row.tpr, tnr=row.tnr, seeds=list(row.seeds),
                      nonconverged=row.nonconverged, std=row.std) for row in rows],
    }, _out_path(cfg, "sweep.json"))
    best = frame.loc[frame["acc"].idxmax()]
    logger.info("Najlepsza lambda=%g (acc=%.4f)", best["lambda"], best["acc"])
    return EXIT_OK


def cmd_plot_data(cfg, input_path=None):
    sweep = load_data_from_json(input_path or os.path.join(cfg.out, "sweep.json"))
    frame = pd.DataFrame(sweep["rows"])
    frame.insert(0, "index", np.arange(len(frame)))
    columns = ["index", "lambda", "acc", "tp", "tn", "fp", "fn", "tpr", "tnr"]
    save_frame_csv(frame[columns], _out_path(cfg, "plot_data.csv"))
    return EXIT_OK


def cmd_export_network(cfg):
    net, labels = load_reference(cfg)
    save_network(net, _out_path(cfg, "network.txt"))
    renumber = {str(label): k + 1 for k, label in enumerate(labels)} if labels else None
    save_data_to_json({"n": net.n, "m": net.m, "renumber_map": renumber, "config": cfg.echo()},
                      _out_path(cfg, "network.json"))
    return EXIT_OK


_CONFIG_KEYS = ("network", "matpower", "remove", "random_remove", "T", "noise_var", "solver", "lam",
                "lambda_grid", "lambda_scale", "standardize", "runs", "seed", "reduced", "tls_init",
                "jobs", "out")


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = args.log_level or os.environ.get("EDGECHANGE_LOG_LEVEL", "INFO")
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_run_config({k: getattr(args, k) for k in _CONFIG_KEYS}, args.config)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "estimate":
            return cmd_estimate(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg, with_std=args.with_std)
        if args.command == "plot-data":
            return cmd_plot_data(cfg, args.input)
        return cmd_export_network(cfg)
    except (CaseParseError, EdgeListParseError) as e:
        logger.error("Błąd składni pliku wejściowego: %s", e)
        return EXIT_PARSE
    except (ValueError, OSError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
