"""Exact arithmetic in the prime field F_p for odd primes p.

Values are plain residues in ``[0, p)``. The modulus is capped so that dot
products of reduced ``int64`` vectors never overflow in :mod:`exactmat`.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from functools import cache

from sympy import isprime

from errors import FieldDivisionError, KirrelError, ModulusMismatchError

MAX_MODULUS = 2**24


@cache
def _is_odd_prime(p: int) -> bool:
    return p != 2 and bool(isprime(p))  # noqa: PLR2004


@dataclass(frozen=True, slots=True)
class Prime:
    """An odd prime modulus below :data:`MAX_MODULUS`."""

    p: int

    def __post_init__(self) -> None:
        if isinstance(self.p, bool):
            msg = f"Modulus must be an integer, got {self.p!r}"
            raise KirrelError(msg, details={"modulus": self.p})
        try:
            object.__setattr__(self, "p", operator.index(self.p))
        except TypeError as exc:
            msg = f"Modulus must be an integer, got {self.p!r}"
            raise KirrelError(msg, details={"modulus": self.p}) from exc
        if self.p >= MAX_MODULUS:
            msg = f"Modulus {self.p} is too large (limit {MAX_MODULUS})"
            raise KirrelError(msg, details={"modulus": self.p})
        if not _is_odd_prime(self.p):
            msg = f"Modulus {self.p} is not an odd prime"
            raise KirrelError(msg, details={"modulus": self.p})

    def __int__(self) -> int:
        return self.p

    def __str__(self) -> str:
        return str(self.p)

    def scalar(self, value: int) -> FieldScalar:
        """Reduce an integer into this field."""
        return FieldScalar(value, self)


@dataclass(frozen=True, slots=True)
class FieldScalar:
    """A residue modulo ``modulus``; always stored reduced."""

    value: int
    modulus: Prime

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", int(self.value) % self.modulus.p)

    def _same_field(self, other: FieldScalar | int) -> FieldScalar:
        if isinstance(other, int):
            return FieldScalar(other, self.modulus)
        if other.modulus != self.modulus:
            msg = f"Cannot combine F_{self.modulus} with F_{other.modulus}"
            raise ModulusMismatchError(
                msg, details={"left": self.modulus.p, "right": other.modulus.p}
            )
        return other

    def __add__(self, other: FieldScalar | int) -> FieldScalar:
        return FieldScalar(self.value + self._same_field(other).value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other: FieldScalar | int) -> FieldScalar:
        return FieldScalar(self.value - self._same_field(other).value, self.modulus)

    def __rsub__(self, other: int) -> FieldScalar:
        return FieldScalar(other - self.value, self.modulus)

    def __mul__(self, other: FieldScalar | int) -> FieldScalar:
        return FieldScalar(self.value * self._same_field(other).value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> FieldScalar:
        return FieldScalar(-self.value, self.modulus)

    def __truediv__(self, other: FieldScalar | int) -> FieldScalar:
        return self * inv(self._same_field(other))

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __str__(self) -> str:
        return str(self.value)

    def inv(self) -> FieldScalar:
        """Return the multiplicative inverse."""
        return inv(self)


def inv(a: FieldScalar) -> FieldScalar:
    """Multiplicative inverse via extended Euclid.

    Raises:
        FieldDivisionError: If ``a`` is zero.

    """
    if a.value == 0:
        msg = f"0 has no inverse in F_{a.modulus}"
        raise FieldDivisionError(msg, details={"modulus": a.modulus.p})
    return FieldScalar(pow(a.value, -1, a.modulus.p), a.modulus)


def inv_int(value: int, p: int) -> int:
    """Inverse of a raw residue; the matrix code works on plain integers."""
    if value % p == 0:
        msg = f"0 has no inverse in F_{p}"
        raise FieldDivisionError(msg, details={"modulus": p})
    return pow(value, -1, p)


def elements(modulus: Prime) -> list[FieldScalar]:
    """All elements of the field in increasing order."""
    return [FieldScalar(v, modulus) for v in range(modulus.p)]
