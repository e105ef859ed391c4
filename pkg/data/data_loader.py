# data_loader.py
import os
import json
import logging

import numpy as np
import pandas as pd

from models.graph_model import Network, NetworkError

logger = logging.getLogger(__name__)

MEASUREMENT_COLUMNS = ["t", "node", "u_true", "u_noisy", "f_true", "f_noisy"]

# Sieć syntetyczna: 8 węzłów, 12 krawędzi o jednostkowych wagach (pierścień + 4 cięciwy).
SYNTHETIC8_EDGES = (
    (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (8, 1),
    (4, 1), (7, 5), (2, 6), (3, 8),
)
SYNTHETIC8_REMOVED = ((2, 3), (4, 1), (7, 5))

BUILTIN_NETWORKS = ("synthetic8",)


class EdgeListParseError(NetworkError):
    """Błąd składni listy krawędzi; `line` to numer linii (od 1)."""

    def __init__(self, message, line):
        super().__init__(f"Linia {line}: {message}")
        self.line = line


def builtin_network(name):
    """Zwraca wbudowaną sieć po nazwie."""
    if name == "synthetic8":
        return Network.from_triples(8, [(t, h, 1.0) for t, h in SYNTHETIC8_EDGES])
    raise ValueError(f"Nieznana sieć wbudowana: {name}")


def parse_edge_list(text):
    """Lista krawędzi: 'tail head weight' w linii, numeracja od 1, komentarze '#'.

    Opcjonalna dyrektywa '# nodes: N' ustala liczbę węzłów (węzły izolowane).
    """
    n = None
    triples = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith('#'):
            directive = line[1:].strip()
            if directive.lower().startswith("nodes:"):
                try:
                    n = int(directive.split(':', 1)[1])
                except ValueError:
                    raise EdgeListParseError(f"niepoprawna dyrektywa: {raw}", line_no)
            continue
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise EdgeListParseError(f"oczekiwano 'tail head weight', otrzymano: {raw}", line_no)
        try:
            triples.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError:
            raise EdgeListParseError(f"niepoprawne liczby: {raw}", line_no)
    if n is None:
        n = max((max(t, h) for t, h, _ in triples), default=1)
    return Network.from_triples(n, triples)


def format_edge_list(net):
    lines = [f"# nodes: {net.n}"]
    lines += [f"{e.tail} {e.head} {e.weight!r}" for e in net.edges]
    return "\n".join(lines) + "\n"


def load_network(path):
    """Wczytuje sieć z pliku z listą krawędzi."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Plik {path} nie istnieje.")
    with open(path, "r", encoding="utf-8") as file:
        return parse_edge_list(file.read())


def save_network(net, path):
    """Zapisuje sieć jako listę krawędzi."""
    _write_text(format_edge_list(net), path)


def measurement_frame(ms, labels=None):
    """Pomiary w układzie długim: jeden wiersz na (t, węzeł), numeracja od 1."""
    n, T = ms.u_true.shape
    nodes = np.arange(1, n + 1) if labels is None else np.asarray(labels)
    return pd.DataFrame({
        "t": np.repeat(np.arange(1, T + 1), n),
        "node": np.tile(nodes, T),
        "u_true": ms.u_true.reshape(-1, order='F'),
        "u_noisy": ms.u_noisy.reshape(-1, order='F'),
        "f_true": ms.f_true.reshape(-1, order='F'),
        "f_noisy": ms.f_noisy.reshape(-1, order='F'),
    }, columns=MEASUREMENT_COLUMNS)


def save_frame_csv(frame, path):
    """Zapisuje tabelę do pliku CSV."""
    try:
        frame.to_csv(path, index=False)
        logger.info("Dane zapisano do pliku CSV: %s", path)
    except Exception as e:
        raise IOError(f"Nie udało się zapisać danych do CSV {path}: {e}")


def load_data_from_json(file_path):
    """Wczytuje dane z pliku JSON."""
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Plik {file_path} nie istnieje.")
    with open(file_path, "r", encoding="utf-8") as file:
        return json.load(file)


def save_data_to_json(data, file_path):
    """Zapisuje dane do pliku JSON."""
    _write_text(json.dumps(data, indent=4, sort_keys=True, default=_json_default) + "\n", file_path)


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset, tuple)):
        return sorted(value) if isinstance(value, (set, frozenset)) else list(value)
    raise TypeError(f"Typ {type(value).__name__} nie jest serializowalny do JSON")


def _write_text(text, path):
    try:
        with open(path, "w", encoding="utf-8") as file:
            file.write(text)
        logger.info("Dane zapisano do pliku: %s", path)
    except Exception as e:
        raise IOError(f"Nie udało się zapisać pliku {path}: {e}")
