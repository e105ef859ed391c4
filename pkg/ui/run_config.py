# ui/run_config.py
import json
import logging
import os
from dataclasses import asdict, dataclass, fields, replace

from dotenv import load_dotenv

from utils.utils import parse_decimal_input, parse_lambda_grid, parse_pairs

logger = logging.getLogger(__name__)

CONFIG_FILE = "config/run_config.json"
ENV_PREFIX = "EDGECHANGE_"


def load_run_config(path=CONFIG_FILE):
    """Wczytuje domyślną konfigurację uruchomienia z pliku JSON."""
    try:
        with open(path, "r", encoding="utf-8") as file:
            return json.load(file)
    except FileNotFoundError:
        return {}
    except json.JSONDecodeError as e:
        logger.warning("Błąd wczytywania konfiguracji %s: %s", path, e)
        return {}


def save_run_config(config, path=CONFIG_FILE):
    """Zapisuje konfigurację uruchomienia do pliku JSON."""
    try:
        with open(path, "w", encoding="utf-8") as file:
            json.dump(config, file, indent=4)
        logger.info("Zapisano konfigurację w %s", path)
    except Exception as e:
        raise IOError(f"Nie udało się zapisać konfiguracji {path}: {e}")


@dataclass(frozen=True)
class RunConfig:
    """Kompletna konfiguracja jednego polecenia CLI."""
    network: str = None
    matpower: str = None
    remove: tuple = None
    random_remove: int = None
    T: int = 30
    noise_var: float = 0.1
    solver: str = "lasso"
    lam: float = 0.3
    lambda_grid: tuple = None
    runs: int = 20
    seed: int = 0
    reduced: bool = False
    standardize: bool = False
    lambda_scale: object = 1.0
    tls_init: str = "zero"
    jobs: int = 1
    out: str = "out"

    def __post_init__(self):
        sources = [s for s in (self.network, self.matpower) if s is not None]
        if len(sources) != 1:
            raise ValueError("Wskaż dokładnie jedno źródło sieci: --network albo --matpower")
        if self.remove is not None and self.random_remove is not None:
            raise ValueError("Podaj albo --remove, albo --random-remove")
        if self.lambda_grid is not None:
            grid = list(self.lambda_grid)
            if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError("Siatka lambda musi być niepusta i ściśle rosnąca")
        if self.T < 1 or self.runs < 1 or self.jobs == 0:
            raise ValueError("T i runs muszą być dodatnie, jobs różne od zera")
        if self.noise_var < 0 or self.lam < 0:
            raise ValueError("Wariancja szumu i lambda nie mogą być ujemne")
        if self.solver not in ("lasso", "tls"):
            raise ValueError(f"Nieznany estymator: {self.solver}")

    def echo(self):
        """Konfiguracja w postaci słownika do osadzenia w plikach wynikowych."""
        data = asdict(self)
        data["remove"] = [list(p) for p in self.remove] if self.remove is not None else None
        data["lambda_grid"] = list(self.lambda_grid) if self.lambda_grid is not None else None
        return data


def _coerce(name, value):
    """Zamienia wartość z JSON/zmiennej środowiskowej na typ pola RunConfig."""
    if value is None:
        return None
    if name in ("T", "runs", "seed", "jobs", "random_remove"):
        return int(value)
    if name in ("noise_var", "lam"):
        return parse_decimal_input(value)
    if name in ("reduced", "standardize"):
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "tak")
        return bool(value)
    if name == "lambda_scale":
        if isinstance(value, str) and value.strip().lower() in ("n", "n_samples"):
            return "n_samples"
        return parse_decimal_input(value)
    if name == "remove":
        return tuple(parse_pairs(value)) if isinstance(value, str) else tuple(tuple(p) for p in value)
    if name == "lambda_grid":
        grid = parse_lambda_grid(value) if isinstance(value, str) else value
        return tuple(float(x) for x in grid)
    return value


def environment_overrides():
    """Wartości EDGECHANGE_* z pliku .env i środowiska procesu."""
    load_dotenv()
    # nazwy pól bez rozróżniania wielkości liter: EDGECHANGE_T -> T
    names = {f.name.lower(): f.name for f in fields(RunConfig)}
    found = {}
    for key, value in os.environ.items():
        if key.startswith(ENV_PREFIX):
            name = names.get(key[len(ENV_PREFIX):].lower())
            if name is not None:
                found[name] = value
    return found


def resolve_run_config(overrides, config_path=CONFIG_FILE):
    """Plik JSON < zmienne środowiskowe < flagi wiersza poleceń."""
    names = {f.name for f in fields(RunConfig)}
    merged = {}
    for layer in (load_run_config(config_path), environment_overrides(), overrides):
        for key, value in layer.items():
            if key in names and value is not None:
                merged[key] = _coerce(key, value)
    # jawne źródło sieci z flagi wyłącza domyślne źródło z pliku
    if overrides.get("matpower") is not None and overrides.get("network") is None:
        merged.pop("network", None)
    if overrides.get("network") is not None and overrides.get("matpower") is None:
        merged.pop("matpower", None)
    if overrides.get("remove") is not None:
        merged.pop("random_remove", None)
    if overrides.get("random_remove") is not None:
        merged.pop("remove", None)
    return RunConfig(**merged)


def with_overrides(cfg, **changes):
    return replace(cfg, **{k: _coerce(k, v) for k, v in changes.items()})
