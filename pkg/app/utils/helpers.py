import hashlib
import json
import math
from typing import Any, Dict, Mapping, Sequence, TypeVar

import numpy as np

from app.core.exceptions import ParseError

T = TypeVar("T")


def round_floats(value: Any, precision: int = 6) -> Any:
    """Recursively round floats so serialized numbers are stable"""
    if isinstance(value, float):
        rounded = round(value, precision)
        return 0.0 if rounded == 0 else rounded
    if isinstance(value, dict):
        return {k: round_floats(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_floats(v, precision) for v in value]
    return value


def canonical_json(document: Any, precision: int = 6) -> bytes:
    """Sorted keys, fixed precision, trailing newline"""
    text = json.dumps(round_floats(document, precision), sort_keys=True, indent=2, ensure_ascii=True)
    return (text + "\n").encode("utf-8")


def read_json(path: str) -> Any:
    """Load a JSON file, raising ParseError with line/column on failure"""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as e:
        raise ParseError(path, "file not found") from e
    except json.JSONDecodeError as e:
        raise ParseError(path, e.msg, e.lineno, e.colno) from e


def file_digest(path: str) -> str:
    """sha256 of a file, used as a content version"""
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sample_pmf(pmf: Mapping[Any, float], rng: np.random.Generator) -> Any:
    """Draw a key of a {value: probability} mapping"""
    keys = sorted(pmf.keys())
    probs = np.array([pmf[k] for k in keys], dtype=float)
    probs = probs / probs.sum()
    return keys[int(rng.choice(len(keys), p=probs))]


def pmf_mean(pmf: Mapping[float, float]) -> float:
    total = sum(pmf.values())
    return sum(k * p for k, p in pmf.items()) / total


def weighted_choice(items: Sequence[T], weights: Sequence[float], rng: np.random.Generator) -> T:
    w = np.asarray(weights, dtype=float)
    if len(items) == 0 or w.sum() <= 0:
        raise ValueError("weighted_choice needs at least one positive weight")
    return items[int(rng.choice(len(items), p=w / w.sum()))]


def bernoulli(p: float, rng: np.random.Generator) -> bool:
    return bool(rng.random() < p)


def clamp(value: float, lo: float = 0.0, hi: float = 1.0) -> float:
    return max(lo, min(hi, value))


def is_finite(value: float) -> bool:
    return math.isfinite(value)


def merge_counts(a: Dict[Any, int], b: Dict[Any, int]) -> Dict[Any, int]:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return out
