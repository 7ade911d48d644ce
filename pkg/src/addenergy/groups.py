"""Ambient abelian groups and their canonical element encodings.

Four group families are supported:

* ``F2n(n)``    -- the Boolean cube of dimension n, elements are n-bit words,
                   addition is XOR.
* ``Fpn(p, n)`` -- coordinate vectors mod an odd prime p, elements are tuples.
* ``Zmod(m)``   -- residues mod m.
* ``Zint()``    -- the integers, restricted to signed 64-bit range with
                   overflow detection (never silent wraparound).

Elements are plain Python values (int for F2n/Zmod/Zint, tuple for Fpn), so
they hash and compare directly and two equal group elements always have
identical payloads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

Elem = Union[int, tuple]

INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1


class GroupError(ValueError):
    """Base class for group construction and element errors."""


class InvalidElementError(GroupError):
    """Element payload is not valid for the group."""


class GroupMismatchError(GroupError):
    """Two operands belong to different groups."""


class OverflowElementError(GroupError):
    """Integer arithmetic left the supported 64-bit range."""


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 2^64."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Group:
    """Common interface; concrete families override the arithmetic."""

    @property
    def order(self) -> int | None:
        """Number of elements, or None for an infinite group."""
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    @property
    def zero(self) -> Elem:
        raise NotImplementedError

    def check(self, a: Elem) -> Elem:
        """Return a unchanged if valid, else raise InvalidElementError."""
        raise NotImplementedError

    def add(self, a: Elem, b: Elem) -> Elem:
        raise NotImplementedError

    def neg(self, a: Elem) -> Elem:
        raise NotImplementedError

    def sub(self, a: Elem, b: Elem) -> Elem:
        return self.add(a, self.neg(b))

    def parse(self, text: str) -> Elem:
        raise NotImplementedError

    def format(self, a: Elem) -> str:
        raise NotImplementedError

    def sort_key(self, a: Elem):
        """Canonical total order on elements, used for deterministic output."""
        return a

    # Dense indexing (finite groups only): a bijection elements <-> range(order)
    def index(self, a: Elem) -> int:
        raise NotImplementedError

    def unindex(self, i: int) -> Elem:
        raise NotImplementedError

    def elements(self) -> Iterator[Elem]:
        if not self.is_finite:
            raise GroupError("cannot enumerate an infinite group")
        return (self.unindex(i) for i in range(self.order))

    def describe(self) -> str:
        """Header-line form, e.g. 'f2 n=20' (see setfiles grammar)."""
        raise NotImplementedError


@dataclass(frozen=True)
class F2n(Group):
    """Boolean cube: elements are bitmask words, addition is XOR."""

    n: int

    def __post_init__(self):
        if not 1 <= self.n <= 63:
            raise GroupError(f"F2n dimension must be in [1, 63], got {self.n}")

    @property
    def order(self) -> int:
        return 1 << self.n

    @property
    def zero(self) -> int:
        return 0

    def check(self, a):
        if not isinstance(a, int) or not 0 <= a < (1 << self.n):
            raise InvalidElementError(f"{a!r} is not an {self.n}-bit word")
        return a

    def add(self, a, b):
        return a ^ b

    def neg(self, a):
        return a

    def parse(self, text: str) -> int:
        text = text.strip()
        if text.startswith(("0x", "0X")):
            try:
                v = int(text, 16)
            except ValueError:
                raise InvalidElementError(f"bad hex element {text!r}") from None
        elif len(text) == self.n and set(text) <= {"0", "1"}:
            v = int(text, 2)
        else:
            raise InvalidElementError(
                f"expected 0x-hex or a {self.n}-char binary string, got {text!r}"
            )
        return self.check(v)

    def format(self, a) -> str:
        width = (self.n + 3) // 4
        return f"0x{a:0{width}x}"

    def index(self, a):
        return a

    def unindex(self, i):
        return i

    def describe(self) -> str:
        return f"f2 n={self.n}"


@dataclass(frozen=True)
class Fpn(Group):
    """Coordinate vectors over the field of p elements, p an odd prime."""

    p: int
    n: int

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise GroupError(f"p must be an odd prime, got {self.p}")
        if self.n < 1:
            raise GroupError(f"dimension must be >= 1, got {self.n}")
        if self.p ** self.n > INT64_MAX:
            raise GroupError(f"group order {self.p}^{self.n} exceeds 2^63")

    @property
    def order(self) -> int:
        return self.p ** self.n

    @property
    def zero(self) -> tuple:
        return (0,) * self.n

    def check(self, a):
        if (
            not isinstance(a, tuple)
            or len(a) != self.n
            or not all(isinstance(c, int) and 0 <= c < self.p for c in a)
        ):
            raise InvalidElementError(
                f"{a!r} is not a length-{self.n} vector with entries in [0, {self.p})"
            )
        return a

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def parse(self, text: str) -> tuple:
        parts = text.strip().split(",")
        if len(parts) != self.n:
            raise InvalidElementError(
                f"expected {self.n} comma-separated coordinates, got {text!r}"
            )
        try:
            coords = tuple(int(s.strip()) for s in parts)
        except ValueError:
            raise InvalidElementError(f"bad coordinate in {text!r}") from None
        for c in coords:
            if not 0 <= c < self.p:
                raise InvalidElementError(f"coordinate {c} out of range [0, {self.p})")
        return coords

    def format(self, a) -> str:
        return ",".join(str(c) for c in a)

    def index(self, a):
        v = 0
        for c in a:
            v = v * self.p + c
        return v

    def unindex(self, i):
        coords = []
        for _ in range(self.n):
            i, r = divmod(i, self.p)
            coords.append(r)
        return tuple(reversed(coords))

    def describe(self) -> str:
        return f"fp p={self.p} n={self.n}"


@dataclass(frozen=True)
class Zmod(Group):
    """Residues modulo m under addition."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise GroupError(f"modulus must be >= 1, got {self.m}")

    @property
    def order(self) -> int:
        return self.m

    @property
    def zero(self) -> int:
        return 0

    def check(self, a):
        if not isinstance(a, int) or not 0 <= a < self.m:
            raise InvalidElementError(f"{a!r} is not a residue in [0, {self.m})")
        return a

    def add(self, a, b):
        return (a + b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def parse(self, text: str) -> int:
        try:
            v = int(text.strip())
        except ValueError:
            raise InvalidElementError(f"bad integer {text!r}") from None
        return v % self.m

    def format(self, a) -> str:
        return str(a)

    def index(self, a):
        return a

    def unindex(self, i):
        return i

    def describe(self) -> str:
        return f"zmod m={self.m}"


@dataclass(frozen=True)
class Zint(Group):
    """The integers, as signed 64-bit values with overflow detection."""

    @property
    def order(self) -> None:
        return None

    @property
    def zero(self) -> int:
        return 0

    def check(self, a):
        if not isinstance(a, int) or not INT64_MIN <= a <= INT64_MAX:
            raise InvalidElementError(f"{a!r} is not a signed 64-bit integer")
        return a

    def _fit(self, v: int) -> int:
        if not INT64_MIN <= v <= INT64_MAX:
            raise OverflowElementError(f"integer result {v} overflows 64-bit range")
        return v

    def add(self, a, b):
        return self._fit(a + b)

    def neg(self, a):
        return self._fit(-a)

    def parse(self, text: str) -> int:
        try:
            v = int(text.strip())
        except ValueError:
            raise InvalidElementError(f"bad integer {text!r}") from None
        return self.check(v)

    def format(self, a) -> str:
        return str(a)

    def describe(self) -> str:
        return "z"


def parse_group(text: str) -> Group:
    """Parse a group descriptor like 'f2 n=20', 'fp p=3 n=2', 'zmod m=7', 'z'."""
    parts = text.strip().split()
    if not parts:
        raise GroupError("empty group descriptor")
    kind, kv = parts[0], {}
    for part in parts[1:]:
        if "=" not in part:
            raise GroupError(f"bad group parameter {part!r}")
        key, val = part.split("=", 1)
        try:
            kv[key] = int(val)
        except ValueError:
            raise GroupError(f"bad group parameter {part!r}") from None
    try:
        if kind == "f2":
            return F2n(kv.pop("n"))
        if kind == "fp":
            return Fpn(kv.pop("p"), kv.pop("n"))
        if kind == "zmod":
            return Zmod(kv.pop("m"))
        if kind == "z":
            return Zint()
    except KeyError as exc:
        raise GroupError(f"group {kind!r} missing parameter {exc}") from None
    raise GroupError(f"unknown group kind {kind!r}")
