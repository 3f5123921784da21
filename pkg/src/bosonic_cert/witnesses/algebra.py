"""
Closed-form reordering of ladder-operator polynomials.

A multimode normal-ordered polynomial is a dict mapping keys to coefficients.
A key holds one monomial per mode, (j, k, b) = a^dag^j a^k P^b with P the
photon-number parity.

- product:       a^k a^dag^l = sum_s C(k,s) C(l,s) s! a^dag^(l-s) a^(k-s)
- parity:        P^b a^dag^l a^m = (-1)^(b(l+m)) a^dag^l a^m P^b
- anti-normal:   a^dag^j a^k = sum_s (-1)^s C(j,s) C(k,s) s! a^(k-s) a^dag^(j-s)
- Weyl symbol:   a^dag^j a^k -> sum_s (-1/2)^s / s! j! k! / ((j-s)! (k-s)!) z^*^(j-s) z^(k-s)

with z = (x + i p)/sqrt(2).

>>> nf = multiply(symbol_form('a', 0.0, 0, 1), symbol_form('ad', 0.0, 0, 1))
>>> sorted(nf.items())
[(((0, 0, 0),), (1+0j)), (((1, 1, 0),), (1+0j))]
"""
from __future__ import annotations

import functools
import itertools
import math
from typing import Dict, Iterator, Tuple

import numpy as np

from bosonic_cert.exceptions import InfeasibleDecompositionError, InvalidParameterError

Monomial = Tuple[int, int, int]
Key = Tuple[Monomial, ...]
NormalForm = Dict[Key, complex]

UNIT: Monomial = (0, 0, 0)

SYMBOLS = ('a', 'ad', 'x', 'n', 'parity')


def identity_key(n_modes: int) -> Key:
    return (UNIT,) * n_modes


def constant_form(value: complex, n_modes: int) -> NormalForm:
    return {identity_key(n_modes): complex(value)} if value else {}


def symbol_form(symbol: str, param: float, mode: int, n_modes: int) -> NormalForm:
    """Normal form of a single symbol acting on `mode`."""
    if symbol == 'a':
        local = {(0, 1, 0): 1 + 0j}
    elif symbol == 'ad':
        local = {(1, 0, 0): 1 + 0j}
    elif symbol == 'n':
        local = {(1, 1, 0): 1 + 0j}
    elif symbol == 'parity':
        local = {(0, 0, 1): 1 + 0j}
    elif symbol == 'x':
        phase = complex(math.cos(param), -math.sin(param)) / math.sqrt(2)
        local = {(0, 1, 0): phase, (1, 0, 0): phase.conjugate()}
    else:
        raise InvalidParameterError('symbol', f'unknown symbol {symbol!r}')
    base = list(identity_key(n_modes))
    form = {}
    for monomial, coeff in local.items():
        base[mode] = monomial
        form[tuple(base)] = coeff
    return form


@functools.lru_cache(maxsize=1 << 16)
def monomial_product(left: Monomial, right: Monomial) -> tuple[tuple[Monomial, int], ...]:
    """Normal-ordered expansion of left * right on one mode, integer
    coefficients.

    >>> monomial_product((0, 2, 0), (2, 0, 0))
    (((2, 2, 0), 1), ((1, 1, 0), 4), ((0, 0, 0), 2))
    """
    j1, k1, b1 = left
    j2, k2, b2 = right
    sign = -1 if b1 and (j2 + k2) % 2 else 1
    parity = b1 ^ b2
    return tuple(
        ((j1 + j2 - s, k1 + k2 - s, parity), sign * math.comb(k1, s) * math.comb(j2, s) * math.factorial(s))
        for s in range(min(k1, j2) + 1)
    )


def multiply(left: NormalForm, right: NormalForm) -> NormalForm:
    out: NormalForm = {}
    for key_l, coeff_l in left.items():
        for key_r, coeff_r in right.items():
            per_mode = [monomial_product(ml, mr) for ml, mr in zip(key_l, key_r)]
            for combination in itertools.product(*per_mode):
                key = tuple(monomial for monomial, _ in combination)
                weight = math.prod(c for _, c in combination)
                out[key] = out.get(key, 0j) + coeff_l * coeff_r * weight
    return out


def add(*forms: NormalForm, weights: tuple[complex, ...] | None = None) -> NormalForm:
    out: NormalForm = {}
    weights = weights or (1,) * len(forms)
    for form, weight in zip(forms, weights):
        for key, coeff in form.items():
            out[key] = out.get(key, 0j) + weight * coeff
    return out


def prune(form: NormalForm, relative: float = 1e-13) -> NormalForm:
    """Drop coefficients that are rounding residue of exact cancellations."""
    if not form:
        return {}
    scale = max(1.0, max(abs(c) for c in form.values()))
    return {key: coeff for key, coeff in form.items() if abs(coeff) > relative * scale}


def adjoint(form: NormalForm) -> NormalForm:
    """(a^dag^j a^k P^b)^dag = (-1)^(b(j+k)) a^dag^k a^j P^b."""
    out: NormalForm = {}
    for key, coeff in form.items():
        sign = 1
        new_key = []
        for j, k, b in key:
            if b and (j + k) % 2:
                sign = -sign
            new_key.append((k, j, b))
        out[tuple(new_key)] = sign * complex(coeff).conjugate()
    return out


def loss_adjoint(form: NormalForm, transmissivity: float) -> NormalForm:
    """Heisenberg-picture pure loss on every mode:
    a^dag^j a^k -> transmissivity^((j + k)/2) a^dag^j a^k.

    >>> loss_adjoint({((1, 1, 0),): 1.0, ((0, 0, 0),): 2.0}, 0.25)
    {((1, 1, 0),): 0.25, ((0, 0, 0),): 2.0}
    """
    if not 0 <= transmissivity <= 1:
        raise InvalidParameterError('transmissivity', f'transmissivity must lie in [0, 1]: {transmissivity}')
    out: NormalForm = {}
    for key, coeff in form.items():
        if any(b for _, _, b in key):
            raise InvalidParameterError('form', 'parity has no polynomial image under loss')
        order = sum(j + k for j, k, _ in key)
        out[key] = coeff * transmissivity ** (order / 2)
    return out


def distance(left: NormalForm, right: NormalForm) -> float:
    keys = set(left) | set(right)
    return max((abs(left.get(k, 0) - right.get(k, 0)) for k in keys), default=0.0)


def degree(form: NormalForm) -> int:
    """Largest total ladder degree of any key."""
    return max((sum(j + k for j, k, _ in key) for key in form), default=0)


def mode_degrees(form: NormalForm, n_modes: int) -> list[int]:
    """Largest number of creation operators per mode."""
    return [max((key[i][0] for key in form), default=0) for i in range(n_modes)]


# anti-normal order --------------------------------------------------------- #

def antinormal_form(form: NormalForm) -> NormalForm:
    """Anti-normal expansion; keys become (k, j, b) = a^k a^dag^j P^b.

    >>> antinormal_form({((1, 1, 0),): 1})
    {((1, 1, 0),): (1+0j), ((0, 0, 0),): (-1+0j)}
    """
    out: NormalForm = {}
    for key, coeff in form.items():
        per_mode = []
        for j, k, b in key:
            per_mode.append(
                [
                    ((k - s, j - s, b), (-1) ** s * math.comb(j, s) * math.comb(k, s) * math.factorial(s))
                    for s in range(min(j, k) + 1)
                ]
            )
        for combination in itertools.product(*per_mode):
            new_key = tuple(monomial for monomial, _ in combination)
            weight = math.prod(c for _, c in combination)
            out[new_key] = out.get(new_key, 0j) + complex(coeff) * weight
    return prune(out)


# Weyl symbols and rotated quadratures ------------------------------------- #

@functools.lru_cache(maxsize=4096)
def _zbar_z_to_xp(u: int, v: int) -> tuple[complex, ...]:
    """Coefficients of x^(u+v-r) p^r, r = 0..u+v, in z^*^u z^v."""
    out = np.zeros(u + v + 1, dtype=np.complex128)
    for r in range(u + 1):
        for t in range(v + 1):
            out[r + t] += math.comb(u, r) * math.comb(v, t) * (-1j) ** r * (1j) ** t
    return tuple(complex(c) for c in out / 2 ** ((u + v) / 2))


def weyl_symbol(form: NormalForm) -> dict[tuple[tuple[int, int], ...], complex]:
    """Weyl symbol as a polynomial in commuting (x, p) per mode. Keys hold
    (degree, power of p) per mode.

    >>> weyl_symbol({((1, 1, 0),): 1})
    {((2, 0),): (0.5+0j), ((2, 2),): (0.5+0j), ((0, 0),): (-0.5+0j)}
    """
    out: dict[tuple[tuple[int, int], ...], complex] = {}
    for key, coeff in form.items():
        per_mode = []
        for j, k, b in key:
            if b:
                raise InfeasibleDecompositionError(
                    'poly', 'parity terms have no quadrature-power expansion'
                )
            terms = []
            for s in range(min(j, k) + 1):
                weight = (-0.5) ** s / math.factorial(s) * math.perm(j, s) * math.perm(k, s)
                for r, c in enumerate(_zbar_z_to_xp(j - s, k - s)):
                    if c != 0:
                        terms.append(((j + k - 2 * s, r), weight * c))
            per_mode.append(terms)
        for combination in itertools.product(*per_mode):
            new_key = tuple(monomial for monomial, _ in combination)
            weight = math.prod(c for _, c in combination)
            out[new_key] = out.get(new_key, 0j) + complex(coeff) * weight
    return out


def preferred_angles() -> Iterator[float]:
    """0, pi/2, +-pi/4, +-pi/8, +-3pi/8, +-pi/16, ...: distinct modulo pi."""
    yield 0.0
    yield math.pi / 2
    level = 4
    while True:
        for odd in range(1, level // 2, 2):
            yield odd * math.pi / level
            yield -odd * math.pi / level
        level *= 2


@functools.lru_cache(maxsize=64)
def quadrature_angles(degree: int) -> tuple[float, ...]:
    """The first `degree` + 1 preferred angles.

    >>> [round(a / math.pi, 3) for a in quadrature_angles(4)]
    [0.0, 0.5, 0.25, -0.25, 0.125]
    """
    return tuple(itertools.islice(preferred_angles(), degree + 1))


@functools.lru_cache(maxsize=64)
def angle_solution(degree: int) -> np.ndarray:
    """Matrix C with x^(d-r) p^r = sum_l C[l, r] x_{theta_l}^d (symbols).

    Solves sum_l C[l, r] binom(d, r') cos^(d-r') sin^r' (theta_l) = delta(r, r').
    """
    angles = quadrature_angles(degree)
    system = np.array(
        [
            [math.comb(degree, r) * math.cos(theta) ** (degree - r) * math.sin(theta) ** r for theta in angles]
            for r in range(degree + 1)
        ]
    )
    solution = np.linalg.solve(system, np.eye(degree + 1))
    solution.setflags(write=False)
    return solution


def quadrature_expansion(form: NormalForm) -> dict[tuple[tuple[float, int], ...], complex]:
    """Expand a parity-free polynomial in products of rotated-quadrature
    powers x_theta^d, one (theta, d) per mode. Modes with d = 0 use theta = 0.

    >>> expansion = quadrature_expansion({((1, 1, 0),): 1})
    >>> {k: round(v.real, 12) for k, v in expansion.items()}
    {((0.0, 0),): -0.5, ((0.0, 2),): 0.5, ((1.5707963267948966, 2),): 0.5}
    """
    out: dict[tuple[tuple[float, int], ...], complex] = {}
    for key, coeff in weyl_symbol(form).items():
        per_mode = []
        for degree, r in key:
            if degree == 0:
                per_mode.append([((0.0, 0), 1.0)])
                continue
            column = angle_solution(degree)[:, r]
            per_mode.append(
                [((theta, degree), c) for theta, c in zip(quadrature_angles(degree), column) if c != 0]
            )
        for combination in itertools.product(*per_mode):
            new_key = tuple(setting for setting, _ in combination)
            weight = math.prod(c for _, c in combination)
            out[new_key] = out.get(new_key, 0j) + coeff * weight
    scale = max([1.0] + [abs(c) for c in out.values()])
    return {key: c for key, c in sorted(out.items()) if abs(c) > 1e-12 * scale}


if __name__ == '__main__':
    import doctest

    doctest.testmod()
