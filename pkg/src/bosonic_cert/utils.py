"""Utilities for bosonic_cert, should be importable from anywhere in the
project (except `types` and `exceptions` modules)."""
from __future__ import annotations

import contextlib
import json
import os
import pathlib
import time
from typing import Any, Generator, Iterable, Iterator, Sequence

import np_config
import np_logging
import numpy as np

from bosonic_cert.exceptions import BosonicCertError

logger = np_logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = pathlib.Path(__file__).with_name('config.json')

CONFIG: dict[str, Any] = np_config.fetch(
    str(os.environ.get('BOSONIC_CERT_CONFIG', DEFAULT_CONFIG_PATH))
)
"""Numerical guards and defaults. See `config.json` for keys."""

THREADS_ENV_VAR = 'BOSONIC_CERT_THREADS'


def thread_count() -> int:
    """Worker count for chunked sampling, from env var or config.

    >>> thread_count() >= 1
    True
    """
    value = os.environ.get(THREADS_ENV_VAR) or CONFIG.get('default_threads', 1)
    try:
        return max(1, int(value))
    except (TypeError, ValueError):
        logger.warning('Ignoring invalid %s=%r', THREADS_ENV_VAR, value)
        return 1


@contextlib.contextmanager
def stage(name: str, **context: Any) -> Generator[None, None, None]:
    """Log the start and end of a unit of work; errors are logged with context
    and re-raised unchanged."""
    t0 = time.perf_counter()
    logger.debug('Started %s %s', name, context or '')
    try:
        yield
    except BosonicCertError as exc:
        logger.debug('%s failed (%s): %s', name, exc.kind, exc.message)
        raise
    except Exception:
        logger.exception('Exception during %s %s', name, context or '')
        raise
    else:
        logger.debug('Finished %s in %.3f s', name, time.perf_counter() - t0)


# seeding ------------------------------------------------------------------- #

def chunk_generator(seed: int, chunk_index: int) -> np.random.Generator:
    """Independent counter-based stream for one chunk of shots.

    The stream depends only on (seed, chunk_index), so shot order is fixed no
    matter which worker produces a chunk.

    >>> a = chunk_generator(7, 3).random(2)
    >>> b = chunk_generator(7, 3).random(2)
    >>> bool((a == b).all())
    True
    """
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(chunk_index),))
    return np.random.Generator(np.random.Philox(sequence))


def chunk_bounds(shots: int, chunk_shots: int | None = None) -> list[tuple[int, int]]:
    """Split `shots` into consecutive (start, stop) chunks.

    >>> chunk_bounds(10, 4)
    [(0, 4), (4, 8), (8, 10)]
    >>> chunk_bounds(0, 4)
    []
    """
    size = int(chunk_shots or CONFIG['chunk_shots'])
    return [(start, min(start + size, shots)) for start in range(0, shots, size)]


# JSON ---------------------------------------------------------------------- #

def complex_to_pair(value: complex) -> list[float]:
    """
    >>> complex_to_pair(1 - 2j)
    [1.0, -2.0]
    """
    value = complex(value)
    return [float(value.real), float(value.imag)]


def pair_to_complex(pair: Sequence[float]) -> complex:
    """
    >>> pair_to_complex([1.0, -2.0])
    (1-2j)
    """
    re, im = pair
    return complex(float(re), float(im))


def format_float(value: float) -> str:
    """Decimal-17 representation: parses back to the identical double.

    >>> float(format_float(0.1)) == 0.1
    True
    """
    return format(float(value), '.17g')


def dump_json(document: Any, path: str | pathlib.Path | None = None) -> str:
    """Serialize with sorted keys so identical inputs give identical bytes.

    Python's float repr is the shortest round-tripping form, so JSON numbers
    round-trip exactly.
    """
    text = json.dumps(document, indent=2, sort_keys=True, default=_json_default)
    if path is not None:
        path = pathlib.Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + '\n')
    return text


def load_json(path_or_text: str | pathlib.Path) -> Any:
    path = pathlib.Path(path_or_text) if not str(path_or_text).lstrip().startswith(('{', '[')) else None
    if path is not None:
        return json.loads(path.read_text())
    return json.loads(str(path_or_text))


def _json_default(value: Any) -> Any:
    if isinstance(value, complex):
        return complex_to_pair(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    if hasattr(value, 'value'):  # enums
        return value.value
    raise TypeError(f'Not JSON serializable: {value!r}')


def pairwise_unique(items: Iterable[Any]) -> Iterator[Any]:
    """Yield items in order, skipping repeats.

    >>> list(pairwise_unique([3, 1, 3, 2, 1]))
    [3, 1, 2]
    """
    seen = set()
    for item in items:
        if item not in seen:
            seen.add(item)
            yield item


if __name__ == '__main__':
    import doctest

    doctest.testmod()
