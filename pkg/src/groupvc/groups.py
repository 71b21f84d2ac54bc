"""Finite groups as exact multiplication tables, plus subgroup/coset machinery.

Elements of a group of order n are the indices 0..n-1.  The composition
convention everywhere is ``(f*g)(i) = f(g(i))``: the right factor acts first.
Subsets of the element range are dense bit vectors (:class:`GroupSubset`), so
intersections, unions and symmetric differences are word-parallel.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import GroupValidationError

DEFAULT_ORDER_CAP = 5040
HARD_ORDER_CAP = 40320
EXHAUSTIVE_ASSOCIATIVITY_LIMIT = 512
_SPOT_CHECK_FACTOR = 10
_SPOT_CHECK_SEED = 0x1A7E


class GroupSubset:
    """Immutable subset of ``{0..size-1}`` backed by an int bitmask."""

    __slots__ = ("size", "bits")

    def __init__(self, size: int, bits: int = 0):
        if size <= 0:
            raise ValueError(f"subset universe size must be positive, got {size}")
        if bits < 0 or bits >> size:
            raise ValueError("bitmask has members outside the universe")
        object.__setattr__(self, "size", size)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("GroupSubset is immutable")

    @classmethod
    def from_indices(cls, size: int, indices: Iterable[int]) -> "GroupSubset":
        bits = 0
        for i in indices:
            i = int(i)
            if not 0 <= i < size:
                raise ValueError(f"member index {i} out of range [0, {size})")
            bits |= 1 << i
        return cls(size, bits)

    @classmethod
    def empty(cls, size: int) -> "GroupSubset":
        return cls(size, 0)

    @classmethod
    def full(cls, size: int) -> "GroupSubset":
        return cls(size, (1 << size) - 1)

    @classmethod
    def from_bool_array(cls, arr) -> "GroupSubset":
        arr = np.asarray(arr, dtype=bool)
        packed = np.packbits(arr, bitorder="little").tobytes()
        return cls(arr.size, int.from_bytes(packed, "little"))

    def to_bool_array(self) -> np.ndarray:
        raw = self.bits.to_bytes((self.size + 7) // 8, "little")
        return np.unpackbits(
            np.frombuffer(raw, dtype=np.uint8), count=self.size, bitorder="little"
        ).astype(bool)

    def members(self) -> list[int]:
        return list(self)

    def measure(self) -> Fraction:
        """Normalized counting measure |S| / size."""
        return Fraction(len(self), self.size)

    def complement(self) -> "GroupSubset":
        return GroupSubset(self.size, self.bits ^ ((1 << self.size) - 1))

    def is_subset_of(self, other: "GroupSubset") -> bool:
        self._check_same_universe(other)
        return self.bits & ~other.bits == 0

    def _check_same_universe(self, other: "GroupSubset") -> None:
        if self.size != other.size:
            raise ValueError("subsets live in different universes")

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.size and (self.bits >> i) & 1 == 1

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __and__(self, other: "GroupSubset") -> "GroupSubset":
        self._check_same_universe(other)
        return GroupSubset(self.size, self.bits & other.bits)

    def __or__(self, other: "GroupSubset") -> "GroupSubset":
        self._check_same_universe(other)
        return GroupSubset(self.size, self.bits | other.bits)

    def __xor__(self, other: "GroupSubset") -> "GroupSubset":
        self._check_same_universe(other)
        return GroupSubset(self.size, self.bits ^ other.bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupSubset)
            and self.size == other.size
            and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.size, self.bits))

    def __repr__(self) -> str:
        shown = self.members()
        if len(shown) > 12:
            head = ", ".join(map(str, shown[:12]))
            return f"GroupSubset(size={self.size}, {{{head}, ...}} |{len(shown)}|)"
        return f"GroupSubset(size={self.size}, {{{', '.join(map(str, shown))}}})"


class FiniteGroup:
    """A finite group given by its order, multiplication table and inverses.

    The tables are validated at construction: every row and column of ``mul``
    must be a permutation of ``0..n-1``, the identity and inverses must behave,
    and associativity is checked exhaustively up to order
    ``EXHAUSTIVE_ASSOCIATIVITY_LIMIT`` and by seeded random triples above that.
    Instances are immutable and safe to share between workers.
    """

    def __init__(
        self,
        mul: Sequence[Sequence[int]] | np.ndarray,
        inv: Sequence[int] | np.ndarray,
        identity: int,
        description: str = "",
        *,
        element_names: Sequence[str] | None = None,
        max_order: int = DEFAULT_ORDER_CAP,
    ):
        mul = np.asarray(mul)
        n = mul.shape[0] if mul.ndim == 2 else 0
        if mul.ndim != 2 or mul.shape != (n, n) or n == 0:
            raise GroupValidationError("multiplication table must be square and nonempty")
        if max_order > HARD_ORDER_CAP:
            raise GroupValidationError(
                f"order cap {max_order} exceeds the hard cap {HARD_ORDER_CAP}"
            )
        if n > max_order:
            raise GroupValidationError(f"group order {n} exceeds the cap {max_order}")
        dtype = np.min_scalar_type(max(n - 1, 1))
        mul = np.ascontiguousarray(mul, dtype=dtype)
        inv = np.ascontiguousarray(np.asarray(inv), dtype=dtype)
        self.order = n
        self.mul = mul
        self.inv = inv
        self.identity = int(identity)
        self.description = description or f"order-{n} group"
        if element_names is not None and len(element_names) != n:
            raise GroupValidationError("element_names length does not match order")
        self.element_names = tuple(element_names) if element_names is not None else None
        self._validate()
        self.mul.setflags(write=False)
        self.inv.setflags(write=False)
        self._abelian: bool | None = None

    # -- validation -----------------------------------------------------

    def _validate(self) -> None:
        n, mul, inv = self.order, self.mul, self.inv
        if mul.min() < 0 or int(mul.max()) >= n:
            bad = np.argwhere((mul.astype(np.int64) < 0) | (mul.astype(np.int64) >= n))[0]
            raise GroupValidationError(
                f"table entry out of range at row {bad[0]}, col {bad[1]}"
            )
        expect = np.arange(n, dtype=mul.dtype)
        row_ok = (np.sort(mul, axis=1) == expect).all(axis=1)
        if not row_ok.all():
            r = int(np.nonzero(~row_ok)[0][0])
            raise GroupValidationError(f"row {r} is not a permutation (Latin square violated)")
        col_ok = (np.sort(mul, axis=0) == expect[:, None]).all(axis=0)
        if not col_ok.all():
            c = int(np.nonzero(~col_ok)[0][0])
            raise GroupValidationError(f"column {c} is not a permutation (Latin square violated)")
        e = self.identity
        if not 0 <= e < n:
            raise GroupValidationError(f"identity index {e} out of range")
        if not (mul[e] == expect).all() or not (mul[:, e] == expect).all():
            raise GroupValidationError(f"element {e} is not a two-sided identity")
        if inv.shape != (n,) or int(inv.max()) >= n:
            raise GroupValidationError("inverse table malformed")
        idx = np.arange(n)
        if not (mul[idx, inv] == e).all() or not (mul[inv, idx] == e).all():
            bad = int(np.nonzero(mul[idx, inv] != e)[0][0]) if (mul[idx, inv] != e).any() else int(
                np.nonzero(mul[inv, idx] != e)[0][0]
            )
            raise GroupValidationError(f"inverse of element {bad} is wrong")
        if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT:
            for a in range(n):
                lhs = mul[mul[a]]
                rhs = mul[a][mul]
                if not (lhs == rhs).all():
                    b, c = (int(v) for v in np.argwhere(lhs != rhs)[0])
                    raise GroupValidationError(
                        f"associativity fails at ({a}, {b}, {c}): "
                        f"({a}*{b})*{c} != {a}*({b}*{c})"
                    )
        else:
            rng = np.random.default_rng(_SPOT_CHECK_SEED)
            remaining = _SPOT_CHECK_FACTOR * n * n
            chunk = 1 << 22
            while remaining > 0:
                size = min(chunk, remaining)
                a = rng.integers(0, n, size=size)
                b = rng.integers(0, n, size=size)
                c = rng.integers(0, n, size=size)
                lhs = mul[mul[a, b], c]
                rhs = mul[a, mul[b, c]]
                if not (lhs == rhs).all():
                    i = int(np.nonzero(lhs != rhs)[0][0])
                    raise GroupValidationError(
                        f"associativity fails at ({int(a[i])}, {int(b[i])}, {int(c[i])})"
                    )
                remaining -= size

    # -- element operations ----------------------------------------------

    def multiply(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inv[a])

    def elements(self) -> range:
        return range(self.order)

    def name_of(self, a: int) -> str:
        if self.element_names is not None:
            return self.element_names[a]
        return str(a)

    def is_abelian(self) -> bool:
        if self._abelian is None:
            self._abelian = bool((self.mul == self.mul.T).all())
        return self._abelian

    def center(self) -> GroupSubset:
        """Elements commuting with everything."""
        central = (self.mul == self.mul.T).all(axis=1)
        return GroupSubset.from_bool_array(central)

    # -- subset translation ----------------------------------------------

    def _check_subset(self, a: GroupSubset) -> None:
        if a.size != self.order:
            raise ValueError(
                f"subset universe {a.size} does not match group order {self.order}"
            )

    def left_translate(self, g: int, a: GroupSubset) -> GroupSubset:
        """The set g*A."""
        self._check_subset(a)
        return GroupSubset.from_indices(
            self.order, (int(v) for v in self.mul[g, a.members()])
        )

    def right_translate(self, a: GroupSubset, h: int) -> GroupSubset:
        """The set A*h."""
        self._check_subset(a)
        return GroupSubset.from_indices(
            self.order, (int(v) for v in self.mul[a.members(), h])
        )

    def two_sided_translate(self, g: int, a: GroupSubset, h: int) -> GroupSubset:
        """The set g*A*h."""
        return self.right_translate(self.left_translate(g, a), h)

    def subset_inverse(self, a: GroupSubset) -> GroupSubset:
        """The set of inverses of the members of A."""
        self._check_subset(a)
        return GroupSubset.from_indices(
            self.order, (int(v) for v in self.inv[a.members()])
        )

    def __repr__(self) -> str:
        return f"FiniteGroup({self.description!r}, order={self.order})"


# -- constructors ---------------------------------------------------------


def make_cyclic(n: int, *, max_order: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Z_n with addition mod n."""
    if n < 1:
        raise ValueError(f"cyclic group order must be >= 1, got {n}")
    idx = np.arange(n, dtype=np.int64)
    mul = (idx[:, None] + idx[None, :]) % n
    inv = (-idx) % n
    return FiniteGroup(mul, inv, 0, f"Z_{n}", max_order=max_order)


def symmetric_elements(m: int) -> list[tuple[int, ...]]:
    """All permutations of 0..m-1 in lexicographic one-line order.

    This is the documented element enumeration of :func:`make_symmetric`;
    index 0 is the identity.
    """
    return list(itertools.permutations(range(m)))


def make_symmetric(m: int, *, max_order: int = HARD_ORDER_CAP) -> FiniteGroup:
    """The symmetric group on 0..m-1 under ``(f*g)(i) = f(g(i))``."""
    if not 1 <= m <= 8:
        raise ValueError(f"symmetric group degree must be in 1..8, got {m}")
    perms = np.array(symmetric_elements(m), dtype=np.int64)
    n = len(perms)
    powers = m ** np.arange(m - 1, -1, -1, dtype=np.int64)
    keys = perms @ powers  # ascending because the enumeration is lexicographic
    mul = np.empty((n, n), dtype=np.min_scalar_type(max(n - 1, 1)))
    for a in range(n):
        composed = perms[a][perms]  # (f*g)(i) = f(g(i)), g ranges over rows
        mul[a] = np.searchsorted(keys, composed @ powers)
    inv_perms = np.argsort(perms, axis=1)
    inv = np.searchsorted(keys, inv_perms @ powers)
    names = ["".join(map(str, p)) for p in symmetric_elements(m)]
    return FiniteGroup(mul, inv, 0, f"S_{m}", element_names=names, max_order=max_order)


def make_dihedral(m: int, *, max_order: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Symmetries of a regular m-gon, order 2m.

    Element k < m is the rotation x -> x+k; element m+k is the reflection
    x -> k-x (indices mod m).
    """
    if m < 1:
        raise ValueError(f"dihedral parameter must be >= 1, got {m}")
    n = 2 * m
    k = np.arange(m, dtype=np.int64)
    mul = np.empty((n, n), dtype=np.int64)
    mul[:m, :m] = (k[:, None] + k[None, :]) % m          # rot * rot
    mul[:m, m:] = m + (k[:, None] + k[None, :]) % m      # rot_a * refl_b = refl_{a+b}
    mul[m:, :m] = m + (k[:, None] - k[None, :]) % m      # refl_a * rot_b = refl_{a-b}
    mul[m:, m:] = (k[:, None] - k[None, :]) % m          # refl_a * refl_b = rot_{a-b}
    inv = np.concatenate([(-k) % m, m + k])
    names = [f"r{i}" for i in range(m)] + [f"s{i}" for i in range(m)]
    return FiniteGroup(mul, inv, 0, f"D_{m}", element_names=names, max_order=max_order)


def make_direct_product(
    g: FiniteGroup, h: FiniteGroup, *, max_order: int = DEFAULT_ORDER_CAP
) -> FiniteGroup:
    """Direct product with element (a, b) packed as a*|h| + b."""
    ng, nh = g.order, h.order
    n = ng * nh
    if n > max_order:
        raise GroupValidationError(f"product order {n} exceeds the cap {max_order}")
    mg = g.mul.astype(np.int64)
    mh = h.mul.astype(np.int64)
    mul = (mg[:, None, :, None] * nh + mh[None, :, None, :]).reshape(n, n)
    inv = (g.inv.astype(np.int64)[:, None] * nh + h.inv.astype(np.int64)[None, :]).reshape(n)
    identity = g.identity * nh + h.identity
    names = None
    if g.element_names is not None or h.element_names is not None:
        names = [
            f"({g.name_of(a)},{h.name_of(b)})" for a in range(ng) for b in range(nh)
        ]
    return FiniteGroup(
        mul,
        inv,
        identity,
        f"{g.description}x{h.description}",
        element_names=names,
        max_order=max_order,
    )


def from_cayley_table(text: str, *, max_order: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Parse the plain-text Cayley table format.

    Line 1 is the order n; the next n lines hold n whitespace-separated
    entries in 0..n-1 giving ``mul[row][col]``.  Element 0 need not be the
    identity; the parser locates it.
    """
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise GroupValidationError("empty Cayley table input")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise GroupValidationError(f"first line must be the order, got {lines[0]!r}") from exc
    if n < 1:
        raise GroupValidationError(f"order must be >= 1, got {n}")
    if len(lines) != n + 1:
        raise GroupValidationError(f"expected {n} table rows, found {len(lines) - 1}")
    mul = np.empty((n, n), dtype=np.int64)
    for r, line in enumerate(lines[1:]):
        parts = line.split()
        if len(parts) != n:
            raise GroupValidationError(f"row {r} has {len(parts)} entries, expected {n}")
        try:
            row = [int(p) for p in parts]
        except ValueError as exc:
            raise GroupValidationError(f"row {r} contains a non-integer entry") from exc
        for c, v in enumerate(row):
            if not 0 <= v < n:
                raise GroupValidationError(f"entry {v} at row {r}, col {c} out of range")
        mul[r] = row
    expect = np.arange(n, dtype=np.int64)
    for r in range(n):
        if not (np.sort(mul[r]) == expect).all():
            raise GroupValidationError(f"row {r} is not a permutation (Latin square violated)")
    for c in range(n):
        if not (np.sort(mul[:, c]) == expect).all():
            raise GroupValidationError(f"column {c} is not a permutation (Latin square violated)")
    identity = None
    for e in range(n):
        if (mul[e] == expect).all() and (mul[:, e] == expect).all():
            identity = e
            break
    if identity is None:
        raise GroupValidationError("no two-sided identity element found")
    inv = np.full(n, -1, dtype=np.int64)
    for x in range(n):
        ys = np.nonzero(mul[x] == identity)[0]
        if ys.size != 1 or mul[int(ys[0]), x] != identity:
            raise GroupValidationError(f"element {x} has no two-sided inverse")
        inv[x] = int(ys[0])
    return FiniteGroup(mul, inv, identity, "cayley-table", max_order=max_order)


def to_cayley_table(group: FiniteGroup) -> str:
    """Serialize a group in the plain-text Cayley table format."""
    rows = [" ".join(str(int(v)) for v in row) for row in group.mul]
    return "\n".join([str(group.order)] + rows) + "\n"


# -- subgroup machinery ----------------------------------------------------


def generated_subgroup(group: FiniteGroup, s: GroupSubset) -> GroupSubset:
    """Smallest subgroup containing s, by closure iteration."""
    group._check_subset(s)
    gens = s.members()
    bits = (1 << group.identity) | s.bits
    frontier = [group.identity] + gens
    mul = group.mul
    while frontier:
        if not gens:
            break
        prods = mul[np.ix_(frontier, gens)].ravel()
        fresh = []
        for v in prods:
            v = int(v)
            if not (bits >> v) & 1:
                bits |= 1 << v
                fresh.append(v)
        frontier = fresh
    return GroupSubset(group.order, bits)


def is_subgroup(group: FiniteGroup, h: GroupSubset) -> bool:
    """Exact closure check: nonempty, closed under the product."""
    group._check_subset(h)
    if not h or group.identity not in h:
        return False
    mm = h.members()
    lookup = h.to_bool_array()
    return bool(lookup[group.mul[np.ix_(mm, mm)]].all())


def is_normal(group: FiniteGroup, h: GroupSubset) -> bool:
    """True iff h is a subgroup fixed by every conjugation."""
    if not is_subgroup(group, h):
        return False
    mm = h.members()
    mul, inv = group.mul, group.inv
    target = h.bits
    for g in range(group.order):
        conj = mul[mul[g, mm], int(inv[g])]
        bits = 0
        for v in conj:
            bits |= 1 << int(v)
        if bits != target:
            return False
    return True


def _require_subgroup(group: FiniteGroup, h: GroupSubset) -> None:
    if not is_subgroup(group, h):
        raise ValueError("the given subset is not a subgroup")


def left_cosets(group: FiniteGroup, h: GroupSubset) -> list[GroupSubset]:
    """Left cosets of h, the subgroup itself first, then by least representative."""
    _require_subgroup(group, h)
    mm = h.members()
    seen = h.bits
    cosets = [h]
    mul = group.mul
    x = 0
    while seen != (1 << group.order) - 1:
        while (seen >> x) & 1:
            x += 1
        bits = 0
        for v in mul[x, mm]:
            bits |= 1 << int(v)
        seen |= bits
        cosets.append(GroupSubset(group.order, bits))
    return cosets


def setwise_stabilizer(group: FiniteGroup, a: GroupSubset, side: str = "left") -> GroupSubset:
    """{x : xA = A} (left) or {x : Ax = A} (right); always a subgroup."""
    group._check_subset(a)
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if not a:
        return GroupSubset.full(group.order)
    mm = a.members()
    lookup = a.to_bool_array()
    if side == "left":
        inside = lookup[group.mul[:, mm]].all(axis=1)
    else:
        inside = lookup[group.mul[mm, :]].all(axis=0)
    return GroupSubset.from_bool_array(inside)


def normal_core(group: FiniteGroup, h: GroupSubset) -> GroupSubset:
    """Intersection of all conjugates of h; the largest normal subgroup inside it."""
    _require_subgroup(group, h)
    mm = h.members()
    mul, inv = group.mul, group.inv
    core = h.bits
    identity_only = 1 << group.identity
    for g in range(group.order):
        if core == identity_only:
            break
        conj = mul[mul[g, mm], int(inv[g])]
        bits = 0
        for v in conj:
            bits |= 1 << int(v)
        core &= bits
    return GroupSubset(group.order, core)
