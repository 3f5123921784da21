"""
Seeded simulation of homodyne, heterodyne and parity measurements on
truncated-Fock states.

Shots are generated in chunks of `CONFIG['chunk_shots']`; chunk k draws from
`utils.chunk_generator(seed, k)`, so a record depends only on (state, setting,
shots, seed), whatever the worker count.

>>> from bosonic_cert.fock_algebra import FockVector
>>> record = parity_sample(FockVector.basis(1, 10), shots=5, seed=0)
>>> record.outcomes[:, 0].tolist()
[-1, -1, -1, -1, -1]
"""
from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import io
import math
import pathlib
from typing import Any, Callable, Mapping, Optional, Sequence, Union

import np_logging
import numpy as np

from bosonic_cert.exceptions import (
    InvalidDimensionError,
    InvalidParameterError,
    NormalizationError,
    ProposalError,
)
from bosonic_cert.fock_algebra import (
    State,
    check_truncation,
    grid_basis,
    rotation_phases,
)
from bosonic_cert.types import MeasurementKind, Seed
from bosonic_cert.utils import (
    CONFIG,
    chunk_bounds,
    chunk_generator,
    dump_json,
    format_float,
    load_json,
    stage,
    thread_count,
)

logger = np_logging.getLogger(__name__)

PathLike = Union[str, pathlib.Path]


# records ------------------------------------------------------------------- #

@dataclasses.dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Outcomes of one measurement setting, shape (shots, n_modes).

    Homodyne outcomes are x_theta values, heterodyne outcomes complex alpha,
    parity outcomes +-1.
    """

    kind: MeasurementKind
    outcomes: np.ndarray
    seed: int
    angles: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        kind = MeasurementKind(self.kind)
        dtype = {
            MeasurementKind.HOMODYNE: np.float64,
            MeasurementKind.HETERODYNE: np.complex128,
            MeasurementKind.PARITY: np.int64,
        }.get(kind)
        if dtype is None:
            raise InvalidParameterError('kind', f'{kind.value} is not a measurement')
        outcomes = np.array(self.outcomes, dtype=dtype)
        if outcomes.ndim != 2:
            raise InvalidDimensionError('outcomes', f'expected (shots, n_modes), got {outcomes.shape}')
        angles = self.angles
        if kind is MeasurementKind.HOMODYNE:
            if angles is None or len(angles) != outcomes.shape[1]:
                raise InvalidDimensionError('angles', 'homodyne records need one angle per mode')
            angles = tuple(float(a) for a in angles)
        else:
            angles = None
        outcomes.setflags(write=False)
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'outcomes', outcomes)
        object.__setattr__(self, 'seed', int(self.seed))
        object.__setattr__(self, 'angles', angles)

    @property
    def shots(self) -> int:
        return self.outcomes.shape[0]

    @property
    def n_modes(self) -> int:
        return self.outcomes.shape[1]

    @property
    def setting(self) -> tuple[Any, ...]:
        """Matches `setting` of the monomials this record can evaluate."""
        if self.kind is MeasurementKind.HOMODYNE:
            return (self.kind, self.angles)
        return (self.kind,)

    def take(self, start: int, stop: Optional[int] = None) -> MeasurementRecord:
        """Shots [start, stop) as a new record."""
        return dataclasses.replace(self, outcomes=self.outcomes[start:stop])

    # export ---------------------------------------------------------------- #

    def _columns(self) -> list[str]:
        if self.kind is MeasurementKind.HETERODYNE:
            return [f'mode{i}_{part}' for i in range(self.n_modes) for part in ('re', 'im')]
        return [f'mode{i}' for i in range(self.n_modes)]

    def _rows(self) -> np.ndarray:
        if self.kind is MeasurementKind.HETERODYNE:
            return np.stack([self.outcomes.real, self.outcomes.imag], axis=2).reshape(self.shots, -1)
        return self.outcomes

    def to_dict(self) -> dict[str, Any]:
        return {
            'kind': self.kind.value,
            'seed': self.seed,
            'shots': self.shots,
            'n_modes': self.n_modes,
            'angles': list(self.angles) if self.angles is not None else None,
            'columns': self._columns(),
            'outcomes': self._rows().tolist(),
        }

    @classmethod
    def from_dict(cls, document: Mapping[str, Any]) -> MeasurementRecord:
        kind = MeasurementKind(document['kind'])
        rows = np.array(document['outcomes'], dtype=np.float64).reshape(-1, len(document['columns']))
        return cls(kind, _outcomes_from_rows(kind, rows), document['seed'], document.get('angles'))

    def to_json(self, path: Optional[PathLike] = None) -> str:
        return dump_json(self.to_dict(), path)

    @classmethod
    def from_json(cls, path_or_text: PathLike) -> MeasurementRecord:
        return cls.from_dict(load_json(path_or_text))

    def to_csv(self, path: Optional[PathLike] = None) -> str:
        """One row per shot; comment header with kind, angles and seed.
        Numbers are written with 17 significant digits."""
        buffer = io.StringIO()
        buffer.write(f'# kind={self.kind.value}\n')
        if self.angles is not None:
            buffer.write(f'# angles={";".join(format_float(a) for a in self.angles)}\n')
        buffer.write(f'# seed={self.seed}\n')
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(['shot'] + self._columns())
        for shot, row in enumerate(self._rows()):
            writer.writerow([shot] + [format_float(v) if self.kind is not MeasurementKind.PARITY else int(v) for v in row])
        text = buffer.getvalue()
        if path is not None:
            path = pathlib.Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        return text

    @classmethod
    def from_csv(cls, path_or_text: PathLike) -> MeasurementRecord:
        text = str(path_or_text)
        if not text.startswith('#'):
            text = pathlib.Path(path_or_text).read_text()
        meta: dict[str, str] = {}
        body = []
        for line in text.splitlines():
            if line.startswith('#'):
                key, _, value = line[1:].strip().partition('=')
                meta[key] = value
            elif line:
                body.append(line)
        rows = list(csv.reader(body))[1:]
        kind = MeasurementKind(meta['kind'])
        width = len(next(csv.reader(body[:1]))) - 1
        values = np.array([[float(v) for v in row[1:]] for row in rows], dtype=np.float64).reshape(-1, width)
        angles = tuple(float(a) for a in meta['angles'].split(';')) if 'angles' in meta else None
        return cls(kind, _outcomes_from_rows(kind, values), int(meta['seed']), angles)

    def __repr__(self) -> str:
        return f'MeasurementRecord({self.kind.value}, shots={self.shots}, n_modes={self.n_modes}, seed={self.seed})'


def _outcomes_from_rows(kind: MeasurementKind, rows: np.ndarray) -> np.ndarray:
    if kind is MeasurementKind.HETERODYNE:
        pairs = rows.reshape(rows.shape[0], -1, 2)
        return pairs[..., 0] + 1j * pairs[..., 1]
    if kind is MeasurementKind.PARITY:
        return rows.astype(np.int64)
    return rows


def histogram_csv(
    record: MeasurementRecord, mode: int = 0, bins: Union[int, Sequence[float]] = 100, path: Optional[PathLike] = None
) -> str:
    """Histogram of one mode's outcomes as `bin_left,count` rows (real part
    for heterodyne)."""
    values = record.outcomes[:, mode].real
    counts, edges = np.histogram(values, bins=bins)
    lines = ['bin_left,count'] + [f'{format_float(left)},{int(c)}' for left, c in zip(edges[:-1], counts)]
    text = '\n'.join(lines) + '\n'
    if path is not None:
        pathlib.Path(path).write_text(text)
    return text


# chunked execution --------------------------------------------------------- #

def _validate_run(state: State, shots: int, seed: Seed, override: bool) -> None:
    if int(shots) != shots or shots < 0:
        raise InvalidParameterError('shots', f'shots must be a non-negative integer: {shots}')
    if int(seed) != seed or not 0 <= int(seed) < 2**64:
        raise InvalidParameterError('seed', f'seed must be a 64-bit non-negative integer: {seed}')
    check_truncation(state, override)


def _run_chunks(
    draw: Callable[[np.random.Generator, int], np.ndarray], shots: int, seed: Seed, width: int, dtype: Any
) -> np.ndarray:
    """Run `draw(rng, count)` per chunk and concatenate in chunk order."""
    jobs = list(enumerate(chunk_bounds(int(shots))))
    if not jobs:
        return np.empty((0, width), dtype=dtype)

    def run(job: tuple[int, tuple[int, int]]) -> np.ndarray:
        index, (start, stop) = job
        return draw(chunk_generator(int(seed), index), stop - start)

    workers = min(thread_count(), len(jobs))
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, jobs))
    else:
        chunks = [run(job) for job in jobs]
    logger.debug('Sampled %d shots in %d chunks on %d workers', shots, len(jobs), workers)
    return np.concatenate(chunks).astype(dtype, copy=False)


def _mode_tensors(state: State) -> np.ndarray:
    """Components reshaped to (rank, cutoff, ..., cutoff)."""
    return state.components.reshape((-1,) + (state.cutoff,) * state.n_modes)


# homodyne ------------------------------------------------------------------ #

def _descend(
    tensor: np.ndarray, phi: np.ndarray, uniforms: np.ndarray, picks: np.ndarray, rows: np.ndarray, mode: int
) -> None:
    """Sample grid bins of `mode` for `rows`, then recurse into the
    conditional state of each distinct bin. Axis 1 of `tensor` is `mode`."""
    wave = np.tensordot(phi, tensor, axes=([0], [1]))
    density = (np.abs(wave) ** 2).reshape(wave.shape[0], -1).sum(axis=1)
    cdf = np.cumsum(density)
    chosen = np.minimum(np.searchsorted(cdf, uniforms[rows, mode] * cdf[-1], side='right'), cdf.size - 1)
    picks[rows, mode] = chosen
    if wave.ndim > 2:
        for value in np.unique(chosen):
            _descend(wave[value], phi, uniforms, picks, rows[chosen == value], mode + 1)


def homodyne_sample(
    state: State,
    angles: Sequence[float],
    shots: int,
    seed: Seed,
    *,
    override: bool = False,
    spacing: Optional[float] = None,
    margin: Optional[float] = None,
) -> MeasurementRecord:
    """Joint homodyne outcomes of x_{angles[i]} on every mode.

    Each mode is drawn by inverse CDF from its density on a uniform grid,
    conditioned on the bins already drawn for earlier modes; the value is
    uniform within the chosen bin.

    >>> from bosonic_cert.fock_algebra import FockVector
    >>> record = homodyne_sample(FockVector.basis(0, 10), [0.0], shots=20000, seed=1)
    >>> abs(record.outcomes.var() - 0.5) < 0.03
    True
    """
    _validate_run(state, shots, seed, override)
    angles = tuple(float(a) for a in angles)
    if len(angles) != state.n_modes:
        raise InvalidDimensionError('angles', f'need {state.n_modes} angles, got {len(angles)}')
    cutoff, n_modes = state.cutoff, state.n_modes
    spacing = float(spacing or CONFIG['pdf_grid_spacing'])
    margin = float(CONFIG['pdf_grid_margin'] if margin is None else margin)
    points, phi = grid_basis(cutoff, spacing, margin)
    step = float(points[1] - points[0])

    tensors = _mode_tensors(state)
    for mode, angle in enumerate(angles):
        shape = [1] * tensors.ndim
        shape[mode + 1] = cutoff
        tensors = tensors * rotation_phases(angle, cutoff).reshape(shape)
    mass = float((np.abs(np.tensordot(phi, tensors, axes=([0], [1]))) ** 2).sum()) * step
    if abs(mass - 1) > 1e-6:
        raise NormalizationError('grid', f'homodyne grid holds probability {mass:.9f}; widen the margin')

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        uniforms = rng.random((count, n_modes))
        jitter = rng.random((count, n_modes))
        picks = np.zeros((count, n_modes), dtype=np.int64)
        _descend(tensors, phi, uniforms, picks, np.arange(count), 0)
        return points[picks] + (jitter - 0.5) * step

    with stage('homodyne_sample', angles=angles, shots=shots, seed=seed):
        outcomes = _run_chunks(draw, shots, seed, n_modes, np.float64)
    return MeasurementRecord(MeasurementKind.HOMODYNE, outcomes, int(seed), angles)


# heterodyne ---------------------------------------------------------------- #

def coherent_rows(alphas: np.ndarray, cutoff: int) -> np.ndarray:
    """<n|alpha> for a batch of alphas, shape (batch, cutoff)."""
    alphas = np.asarray(alphas, dtype=np.complex128).reshape(-1)
    out = np.empty((alphas.size, cutoff), dtype=np.complex128)
    out[:, 0] = np.exp(-np.abs(alphas) ** 2 / 2)
    for n in range(1, cutoff):
        out[:, n] = out[:, n - 1] * alphas / math.sqrt(n)
    return out


def husimi_q(rho: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    """Q(alpha) = <alpha|rho|alpha>/pi for a single-mode density matrix.

    >>> rho = np.diag([1.0, 0.0, 0.0, 0.0])
    >>> bool(np.isclose(husimi_q(rho, np.array([0j]))[0], 1 / np.pi))
    True
    """
    rows = coherent_rows(alphas, rho.shape[0])
    return np.einsum('bm,mn,bn->b', rows.conj(), rho, rows).real / np.pi


def _reduced(tensor: np.ndarray) -> np.ndarray:
    """Unit-trace reduced density matrix of axis 1 of a (rank, ...) tensor."""
    cutoff = tensor.shape[1]
    vectors = np.moveaxis(tensor, 1, 0).reshape(cutoff, -1)
    rho = vectors @ vectors.conj().T
    return rho / np.trace(rho).real


@dataclasses.dataclass(frozen=True)
class GaussianProposal:
    """Circular complex Gaussian with `variance` per real component, scaled by
    `envelope` so that envelope * g >= Q."""

    mean: complex
    variance: float
    envelope: float

    def density(self, alphas: np.ndarray) -> np.ndarray:
        return np.exp(-np.abs(alphas - self.mean) ** 2 / (2 * self.variance)) / (2 * np.pi * self.variance)

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        noise = rng.standard_normal(count) + 1j * rng.standard_normal(count)
        return self.mean + math.sqrt(self.variance) * noise


def build_proposal(rho: np.ndarray) -> GaussianProposal:
    """Gaussian at <a> with the Q-function spread <n> + 1 - |<a>|^2, inflated
    by `CONFIG['proposal_inflation']`; the envelope is the largest Q/g on a
    polar grid times `CONFIG['envelope_safety']`."""
    cutoff = rho.shape[0]
    levels = np.arange(cutoff)
    mean = complex(np.sum(np.diagonal(rho, offset=-1) * np.sqrt(levels[1:])))
    spread = max(float(np.real(np.diagonal(rho)) @ levels) + 1 - abs(mean) ** 2, 1.0)
    variance = CONFIG['proposal_inflation'] * spread / 2
    radius = 6 * math.sqrt(variance) + 3
    r = np.linspace(0, radius, 97)
    theta = np.linspace(0, 2 * np.pi, 96, endpoint=False)
    grid = (mean + r[:, None] * np.exp(1j * theta)[None, :]).reshape(-1)
    unscaled = GaussianProposal(mean, variance, 1.0)
    ratio = float(np.max(husimi_q(rho, grid) / unscaled.density(grid)))
    return GaussianProposal(mean, variance, ratio * CONFIG['envelope_safety'])


def rejection_sample(rho: np.ndarray, proposal: GaussianProposal, rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` draws from Q(alpha) of `rho` by rejection from `proposal`."""
    accepted: list[np.ndarray] = []
    n_accepted = n_proposed = 0
    batch = max(64, int(math.ceil(count * proposal.envelope * 1.2)))
    while n_accepted < count:
        candidates = proposal.draw(rng, batch)
        ratio = husimi_q(rho, candidates) / (proposal.envelope * proposal.density(candidates))
        peak = float(ratio.max())
        if peak > 1:
            raise ProposalError(
                'envelope',
                f'rejection envelope violated: Q/(M g) reached {peak:.4f}',
                mean=proposal.mean,
                variance=proposal.variance,
                envelope=proposal.envelope,
                required_envelope=peak * proposal.envelope,
            )
        keep = candidates[rng.random(batch) < ratio]
        accepted.append(keep)
        n_accepted += keep.size
        n_proposed += batch
        rate = n_accepted / n_proposed
        if n_proposed >= 1024 and rate < CONFIG['acceptance_floor']:
            raise ProposalError(
                'proposal',
                f'acceptance rate {rate:.4f} below floor {CONFIG["acceptance_floor"]}',
                mean=proposal.mean,
                variance=proposal.variance,
                envelope=proposal.envelope,
                proposed=n_proposed,
            )
    return np.concatenate(accepted)[:count]


def sample_with_envelope_retry(
    rho: np.ndarray, proposal: GaussianProposal, rng: np.random.Generator, count: int, attempts: int = 3
) -> np.ndarray:
    """`rejection_sample`, restarting the draw with an enlarged envelope when
    Q/(M g) exceeds 1 on a candidate."""
    for attempt in range(attempts):
        try:
            return rejection_sample(rho, proposal, rng, count)
        except ProposalError as exc:
            if 'required_envelope' not in exc.context or attempt == attempts - 1:
                raise
            envelope = exc.context['required_envelope'] * CONFIG['envelope_safety']
            logger.info('Enlarging rejection envelope %.4g -> %.4g', proposal.envelope, envelope)
            proposal = dataclasses.replace(proposal, envelope=envelope)
    raise AssertionError('unreachable')


def heterodyne_sample(state: State, shots: int, seed: Seed, *, override: bool = False) -> MeasurementRecord:
    """Joint heterodyne outcomes alpha per mode, drawn from the Husimi Q
    function. Mode k is drawn from the Q function of its state conditioned on
    the outcomes of modes < k.

    >>> from bosonic_cert.fock_algebra import FockVector
    >>> record = heterodyne_sample(FockVector.basis(0, 10), shots=20000, seed=1)
    >>> abs(np.mean(np.abs(record.outcomes) ** 2) - 1) < 0.05
    True
    """
    _validate_run(state, shots, seed, override)
    tensors = _mode_tensors(state)
    n_modes, cutoff = state.n_modes, state.cutoff
    first = _reduced(tensors)
    first_proposal = build_proposal(first)

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        out = np.empty((count, n_modes), dtype=np.complex128)
        out[:, 0] = sample_with_envelope_retry(first, first_proposal, rng, count)
        for shot in range(count if n_modes > 1 else 0):
            tensor = tensors
            for mode in range(1, n_modes):
                bra = coherent_rows(out[shot, mode - 1], cutoff)[0].conj()
                tensor = np.tensordot(bra, tensor, axes=([0], [1]))
                rho = _reduced(tensor)
                out[shot, mode] = sample_with_envelope_retry(rho, build_proposal(rho), rng, 1)[0]
        return out

    with stage('heterodyne_sample', shots=shots, seed=seed, envelope=first_proposal.envelope):
        outcomes = _run_chunks(draw, shots, seed, n_modes, np.complex128)
    return MeasurementRecord(MeasurementKind.HETERODYNE, outcomes, int(seed))


# parity -------------------------------------------------------------------- #

def parity_probabilities(state: State) -> np.ndarray:
    """Joint distribution of per-mode parities; index bit i (from the most
    significant) is 1 when mode i is odd."""
    cutoff, n_modes = state.cutoff, state.n_modes
    populations = (np.abs(state.components) ** 2).sum(axis=0)
    odd = np.indices((cutoff,) * n_modes).reshape(n_modes, -1) % 2
    codes = (2 ** np.arange(n_modes - 1, -1, -1)) @ odd
    probabilities = np.bincount(codes, weights=populations, minlength=2**n_modes)
    return probabilities / probabilities.sum()


def parity_sample(state: State, shots: int, seed: Seed, *, override: bool = False) -> MeasurementRecord:
    """+-1 per mode with the joint parity distribution of the state."""
    _validate_run(state, shots, seed, override)
    n_modes = state.n_modes
    probabilities = parity_probabilities(state)
    bits = 2 ** np.arange(n_modes - 1, -1, -1)

    def draw(rng: np.random.Generator, count: int) -> np.ndarray:
        codes = rng.choice(probabilities.size, size=count, p=probabilities)
        return 1 - 2 * ((codes[:, None] & bits[None, :]) > 0).astype(np.int64)

    with stage('parity_sample', shots=shots, seed=seed):
        outcomes = _run_chunks(draw, shots, seed, n_modes, np.int64)
    return MeasurementRecord(MeasurementKind.PARITY, outcomes, int(seed))


def sample_setting(
    state: State, setting: Sequence[Any], shots: int, seed: Seed, *, override: bool = False
) -> MeasurementRecord:
    """Dispatch on a monomial `setting` tuple."""
    kind = MeasurementKind(setting[0])
    if kind is MeasurementKind.HOMODYNE:
        return homodyne_sample(state, setting[1], shots, seed, override=override)
    if kind is MeasurementKind.HETERODYNE:
        return heterodyne_sample(state, shots, seed, override=override)
    if kind is MeasurementKind.PARITY:
        return parity_sample(state, shots, seed, override=override)
    raise InvalidParameterError('setting', f'{kind.value} terms need no measurement')


if __name__ == '__main__':
    import doctest

    doctest.testmod()
