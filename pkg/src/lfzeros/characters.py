"""Dirichlet characters built from an explicit generator basis of (Z/qZ)*.

A character mod q is labelled by an exponent vector ``e``: on the i-th
generator g_i of order m_i it takes the value exp(2 pi i e_i / m_i).
Generators are the least primitive root mod p^a for odd prime powers,
and (-1, 5) for powers of two (just -1 mod 4).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import gcd

import numpy as np

from .primes import factorize


def _primitive_root_mod_prime_power(p: int, a: int) -> int:
    m = p**a
    phi = m - m // p
    fac = list(factorize(phi))
    for g in range(2, m):
        if gcd(g, p) != 1:
            continue
        if all(pow(g, phi // r, m) != 1 for r in fac):
            return g
    raise ArithmeticError(f"no primitive root mod {m}")


def _crt_lift(residue: int, mod: int, q: int) -> int:
    """x with x = residue (mod) and x = 1 mod q/mod."""
    other = q // mod
    for k in range(mod):
        x = 1 + other * k
        if x % mod == residue % mod:
            return x % q
    raise ArithmeticError("CRT failed")


@lru_cache(maxsize=64)
def group_structure(q: int) -> tuple[tuple[int, ...], tuple[int, ...], np.ndarray]:
    """Generators, their orders, and a (q, r) table of discrete logs.

    ``logs[n]`` holds the exponent vector of n in the generator basis, or
    -1 entries when gcd(n, q) > 1.
    """
    gens, orders, local = [], [], []
    for p, a in sorted(factorize(q).items()):
        m = p**a
        if p == 2:
            if a == 1:
                continue
            pieces = [(m - 1, 2)]
            if a >= 3:
                pieces.append((5, 2 ** (a - 2)))
        else:
            pieces = [(_primitive_root_mod_prime_power(p, a), m - m // p)]
        for g, order in pieces:
            gens.append(_crt_lift(g, m, q))
            orders.append(order)
            local.append(m)
    r = len(gens)
    logs = -np.ones((q, max(r, 1)), dtype=np.int64)
    if r == 0:
        logs[:, 0] = 0 if q == 1 else -1
        if q == 2:
            logs[1, 0] = 0
        return (), (), logs
    # enumerate the group as products of generator powers
    for exps in product(*[range(o) for o in orders]):
        n = 1
        for g, e in zip(gens, exps):
            n = n * pow(g, e, q) % q
        logs[n] = exps
    return tuple(gens), tuple(orders), logs


def _snap(z: np.ndarray) -> np.ndarray:
    re, im = z.real.copy(), z.imag.copy()
    re[np.abs(re) < 1e-15] = 0.0
    im[np.abs(im) < 1e-15] = 0.0
    return re + 1j * im


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    exponents: tuple[int, ...]
    values: np.ndarray = field(repr=False, compare=False, hash=False)
    is_primitive: bool = field(compare=False, hash=False)
    parity: str = field(compare=False, hash=False)

    @property
    def label(self) -> str:
        return f"chi_{self.modulus}{list(self.exponents)}"

    @property
    def is_principal(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def order(self) -> int:
        _, orders, _ = group_structure(self.modulus)
        o = 1
        for e, m in zip(self.exponents, orders):
            o = o * (m // gcd(e, m)) // gcd(o, m // gcd(e, m))
        return o

    def __call__(self, n):
        return self.values[np.asarray(n) % self.modulus]

    def conj(self) -> "DirichletCharacter":
        _, orders, _ = group_structure(self.modulus)
        return dirichlet_character(
            self.modulus, tuple((-e) % m for e, m in zip(self.exponents, orders))
        )


def _values(q: int, exps: tuple[int, ...]) -> np.ndarray:
    _, orders, logs = group_structure(q)
    vals = np.zeros(q, dtype=complex)
    for n in range(q):
        if gcd(n, q) != 1:
            continue
        phase = sum(e * l / m for e, l, m in zip(exps, logs[n], orders))
        vals[n] = np.exp(2j * np.pi * phase)
    if q == 1:
        vals[0] = 1.0
    return _snap(vals)


def _primitive(q: int, vals: np.ndarray) -> bool:
    for p in factorize(q):
        d = q // p
        for n in range(1, q, d):  # n = 1 mod d
            if gcd(n, q) == 1 and abs(vals[n] - 1) > 1e-12:
                break
        else:
            return False
    return True


@lru_cache(maxsize=512)
def dirichlet_character(q: int, exponents: tuple[int, ...] | None = None) -> DirichletCharacter:
    """The character mod q with the given exponent vector (principal if None)."""
    if q < 1:
        raise ValueError("modulus must be positive")
    _, orders, _ = group_structure(q)
    if exponents is None:
        exponents = (0,) * len(orders)
    exponents = tuple(int(e) % m for e, m in zip(exponents, orders))
    if len(exponents) != len(orders):
        raise ValueError(f"modulus {q} needs {len(orders)} exponents")
    vals = _values(q, exponents)
    vals.setflags(write=False)
    parity = "even" if q <= 2 or abs(vals[q - 1] - 1) < 1e-12 else "odd"
    return DirichletCharacter(q, exponents, vals, _primitive(q, vals), parity)


def characters_mod(q: int) -> list[DirichletCharacter]:
    _, orders, _ = group_structure(q)
    return [dirichlet_character(q, e) for e in product(*[range(o) for o in orders])]


def primitive_characters_mod(q: int) -> list[DirichletCharacter]:
    return [c for c in characters_mod(q) if c.is_primitive]


def find_character(q: int, **values) -> DirichletCharacter:
    """Character mod q with prescribed values, e.g. ``find_character(5, n2=1j)``."""
    want = {int(k[1:]): complex(v) for k, v in values.items()}
    for c in characters_mod(q):
        if all(abs(c.values[n % q] - v) < 1e-12 for n, v in want.items()):
            return c
    raise LookupError(f"no character mod {q} with values {values}")
