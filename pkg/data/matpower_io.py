# data/matpower_io.py
"""Wczytywanie przypadków MATPOWER (.m) i budowa laplasjanu DC sieci przesyłowej."""
import logging
import re
from dataclasses import dataclass, field

import numpy as np

from models.graph_model import Edge, Network, laplacian

logger = logging.getLogger(__name__)

# kolumny MATPOWER (od 0)
BUS_I = 0
F_BUS, T_BUS, BR_R, BR_X, BR_B = 0, 1, 2, 3, 4
BR_STATUS = 10

BUILTIN_CASES = ("case57", "case118", "case145")

_BLOCK_START = re.compile(r"mpc\.(\w+)\s*=\s*\[")
_SCALAR = re.compile(r"mpc\.(\w+)\s*=\s*([-+0-9.eE]+)\s*;")


class CaseParseError(ValueError):
    """Błąd składni pliku przypadku; `line` to numer linii (od 1) lub None."""

    def __init__(self, message, line=None):
        super().__init__(f"linia {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True, eq=False)
class CaseData:
    base_mva: float
    bus: np.ndarray = field(repr=False)
    branch: np.ndarray = field(repr=False)
    extra: dict = field(default_factory=dict, repr=False)
    name: str = "case"

    def __post_init__(self):
        if self.bus.ndim != 2 or self.bus.shape[0] == 0:
            raise CaseParseError("Blok mpc.bus nie zawiera żadnej szyny")
        ids = self.bus[:, BUS_I].astype(int)
        if len(set(ids.tolist())) != len(ids):
            raise CaseParseError("Identyfikatory szyn nie są unikalne")
        known = set(ids.tolist())
        for k, row in enumerate(self.branch):
            for end in (int(row[F_BUS]), int(row[T_BUS])):
                if end not in known:
                    raise CaseParseError(f"Gałąź {k + 1} odwołuje się do nieznanej szyny {end}")

    @property
    def n_bus(self):
        return self.bus.shape[0]

    @property
    def n_branch(self):
        return self.branch.shape[0]


def _strip_comment(line):
    return line.split('%', 1)[0]


def _parse_block(lines, start_line, name):
    """Wiersze macierzy od linii z '[' do '];'; zwraca (tablica, linia końcowa)."""
    rows, current = [], []
    row_lines = []
    first = _BLOCK_START.split(lines[start_line], maxsplit=1)[-1]
    k = start_line
    text = first
    while True:
        body = _strip_comment(text)
        closing = ']' in body
        if closing:
            body = body.split(']', 1)[0]
        for chunk_idx, chunk in enumerate(body.split(';')):
            if chunk_idx > 0 and current:
                rows.append(current)
                row_lines.append(k + 1)
                current = []
            for token in chunk.replace(',', ' ').split():
                try:
                    current.append(float(token))
                except ValueError:
                    raise CaseParseError(f"Nieliczbowy element '{token}' w mpc.{name}", k + 1)
        if current and not closing:
            # koniec linii kończy wiersz macierzy
            rows.append(current)
            row_lines.append(k + 1)
            current = []
        if closing:
            if current:
                rows.append(current)
                row_lines.append(k + 1)
            break
        k += 1
        if k >= len(lines):
            raise CaseParseError(f"Brak zamknięcia bloku mpc.{name}", start_line + 1)
        text = lines[k]
    if not rows:
        return np.empty((0, 0)), k
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        expected = len(rows[0])
        for r, line_no in zip(rows, row_lines):
            if len(r) != expected:
                raise CaseParseError(
                    f"Wiersz mpc.{name} ma {len(r)} kolumn, oczekiwano {expected}", line_no)
    return np.array(rows, dtype=float).reshape(len(rows), -1), k


def parse_case(text, name="case"):
    """Parsuje podzbiór formatu MATPOWER: bloki numeryczne mpc.X = [ … ]; oraz mpc.baseMVA."""
    lines = text.splitlines()
    blocks = {}
    base_mva = 100.0
    k = 0
    while k < len(lines):
        code = _strip_comment(lines[k])
        scalar = _SCALAR.search(code)
        if scalar and scalar.group(1) == "baseMVA":
            base_mva = float(scalar.group(2))
        match = _BLOCK_START.search(code)
        if match:
            block = match.group(1)
            try:
                blocks[block], k = _parse_block(lines, k, block)
            except CaseParseError:
                if block in ("bus", "branch"):
                    raise
                logger.warning("Pominięto blok mpc.%s (nie jest macierzą liczbową)", block)
                k = _skip_block(lines, k)
        k += 1
    for required in ("bus", "branch"):
        if required not in blocks:
            raise CaseParseError(f"Brak bloku mpc.{required}")
    extra = {key: value for key, value in blocks.items() if key not in ("bus", "branch")}
    case = CaseData(base_mva=base_mva, bus=blocks["bus"], branch=blocks["branch"],
                    extra=extra, name=name)
    logger.info("Przypadek %s: %d szyn, %d gałęzi", name, case.n_bus, case.n_branch)
    return case


def _skip_block(lines, k):
    while k < len(lines) and ']' not in _strip_comment(lines[k]):
        k += 1
    return k


def _format_block(name, matrix):
    rows = "\n".join("\t" + "\t".join(repr(float(v)) for v in row) + ";" for row in matrix)
    return f"mpc.{name} = [\n{rows}\n];\n"


def write_case(case):
    """Zapis CaseData w formacie .m (odczytywalnym przez parse_case)."""
    parts = [f"function mpc = {case.name}\n", "mpc.version = '2';\n",
             f"mpc.baseMVA = {case.base_mva!r};\n", _format_block("bus", case.bus)]
    for key, value in case.extra.items():
        parts.append(_format_block(key, value))
    parts.append(_format_block("branch", case.branch))
    return "\n".join(parts)


def read_case(path):
    try:
        with open(path, "r", encoding="utf-8") as file:
            text = file.read()
    except OSError as e:
        raise IOError(f"Nie udało się wczytać pliku przypadku {path}: {e}")
    stem = str(path).replace("\\", "/").rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return parse_case(text, name=stem)


def load_builtin_case(name):
    """Przypadki IEEE z pakietu pandapower, przekształcone do tablic MATPOWER."""
    if name not in BUILTIN_CASES:
        raise ValueError(f"Nieznany przypadek wbudowany: {name} (dostępne: {', '.join(BUILTIN_CASES)})")
    import pandapower.networks as pn
    from pandapower.converter import to_mpc

    net = getattr(pn, name)()
    mpc = to_mpc(net, init="flat")["mpc"]
    return CaseData(base_mva=float(mpc["baseMVA"]), bus=np.real(np.asarray(mpc["bus"])).astype(float),
                    branch=np.real(np.asarray(mpc["branch"])).astype(float), name=name)


def dc_laplacian(case):
    """Sieć i laplasjan DC: waga pary = Σ 1/|x| po czynnych gałęziach równoległych.

    Zwraca (Network, Laplacian, bus_ids), gdzie bus_ids[k] to numer szyny węzła k+1.
    """
    bus_ids = [int(b) for b in case.bus[:, BUS_I]]
    renumber = {bus: k + 1 for k, bus in enumerate(bus_ids)}
    weights = {}
    orientation = {}
    for k, row in enumerate(case.branch):
        status = row[BR_STATUS] if row.shape[0] > BR_STATUS else 1.0
        if status == 0:
            continue
        f_bus, t_bus, x = int(row[F_BUS]), int(row[T_BUS]), float(row[BR_X])
        if x == 0:
            raise ValueError(f"Gałąź {k + 1} ({f_bus}-{t_bus}) ma zerową reaktancję")
        if x < 0:
            logger.warning("Gałąź %d (%d-%d) ma ujemną reaktancję, używam |x|", k + 1, f_bus, t_bus)
        tail, head = renumber[f_bus], renumber[t_bus]
        if tail == head:
            logger.warning("Gałąź %d łączy szynę %d samą ze sobą, pomijam", k + 1, f_bus)
            continue
        pair = (min(tail, head), max(tail, head))
        orientation.setdefault(pair, (tail, head))
        weights[pair] = weights.get(pair, 0.0) + 1.0 / abs(x)
    edges = tuple(Edge(*orientation[pair], weights[pair]) for pair in orientation)
    net = Network(len(bus_ids), edges)
    logger.info("Sieć DC %s: n=%d, m=%d", case.name, net.n, net.m)
    return net, laplacian(net), bus_ids
