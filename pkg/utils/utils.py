# utils/utils.py
import numpy as np


def parse_decimal_input(value):
    """Konwertuje wartość tekstową z przecinkiem lub kropką na liczbę dziesiętną."""
    if isinstance(value, (int, float)):
        return float(value)
    try:
        return float(value.strip().replace(',', '.'))
    except ValueError:
        raise ValueError(f"Niepoprawny format liczbowy: {value}")


def parse_lambda_grid(text):
    """Zamienia zapis 'lo:hi:steps' na ściśle rosnącą siatkę wartości lambda."""
    parts = text.split(':')
    if len(parts) != 3:
        raise ValueError(f"Siatka lambda musi mieć postać lo:hi:steps, otrzymano: {text}")
    lo = parse_decimal_input(parts[0])
    hi = parse_decimal_input(parts[1])
    try:
        steps = int(parts[2])
    except ValueError:
        raise ValueError(f"Niepoprawna liczba kroków siatki: {parts[2]}")
    if steps < 1:
        raise ValueError(f"Siatka lambda musi mieć co najmniej jeden punkt: {text}")
    if lo < 0:
        raise ValueError(f"Lambda nie może być ujemna: {lo}")
    if steps == 1:
        return np.array([lo])
    if not hi > lo:
        raise ValueError(f"Siatka lambda musi być ściśle rosnąca: {text}")
    return np.linspace(lo, hi, steps)


def parse_pairs(text):
    """Parsuje listę par węzłów, np. '2-3,4-1' lub '2:3 4:1' (numeracja od 1)."""
    pairs = []
    for token in text.replace(';', ',').replace(' ', ',').split(','):
        token = token.strip()
        if not token:
            continue
        sep = '-' if '-' in token else ':'
        ends = token.split(sep)
        if len(ends) != 2:
            raise ValueError(f"Niepoprawna para węzłów: {token}")
        try:
            i, j = int(ends[0]), int(ends[1])
        except ValueError:
            raise ValueError(f"Niepoprawna para węzłów: {token}")
        pairs.append((i, j))
    return pairs


def normalize_pair(i, j):
    """Para nieuporządkowana w postaci (mniejszy, większy)."""
    return (i, j) if i <= j else (j, i)
