"""Abstract open books, book-connected sum chains and their invariant blocks.

An open book is stored combinatorially: a page surface, a monodromy
description and string labels for the boundary components.  A chain of
books joined along boundary labels is decomposed into the linear sequence
of dynamically invariant blocks (page sets, handle sets and binding
neighbourhoods) together with the relation recording which pairs of blocks
cannot link.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "PageSurface",
    "Monodromy",
    "AbstractOpenBook",
    "BookSumChain",
    "Block",
    "BlockDecomposition",
    "ChartPoint",
    "make_annulus_book",
    "make_disk_book",
    "make_base_book",
    "build_chain",
    "example_chain",
    "decompose",
    "classify_point",
    "block_graph",
]

TAGS = ("P", "H", "N")
REGIMES = ("thm1", "thm2")
CHART_PRIORITY = {"binding": 0, "handle": 1, "mapping_torus": 2}


@dataclass(frozen=True)
class PageSurface:
    """Compact oriented surface with boundary, described combinatorially."""

    kind: str
    boundary_count: int
    genus: int = 0

    def __post_init__(self):
        if self.kind not in ("disk", "annulus", "abstract"):
            raise ValueError(f"unknown page kind {self.kind!r}")
        if self.boundary_count < 1:
            raise ValueError("a page needs at least one boundary component")
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        if self.kind == "disk" and (self.boundary_count != 1 or self.genus):
            raise ValueError("a disk has one boundary component and genus 0")
        if self.kind == "annulus" and (self.boundary_count != 2 or self.genus):
            raise ValueError("an annulus has two boundary components and genus 0")


@dataclass(frozen=True)
class Monodromy:
    """Monodromy of an open book.

    Parameters
    ----------
    kind : {'identity', 'dehn_twist', 'opaque'}
    sigma : callable, optional
        Twist profile on [-1, 1]; the annulus map is (x, phi) -> (x, phi + sigma(x)).
    shift : callable, optional
        Mapping torus return time -|T(x)| as a function of the page coordinate.
    boundary_shift : dict
        Twist constant T < 0 attached to each boundary label.
    """

    kind: str
    sigma: Callable[[np.ndarray], np.ndarray] | None = None
    shift: Callable[[np.ndarray], np.ndarray] | None = None
    boundary_shift: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("identity", "dehn_twist", "opaque"):
            raise ValueError(f"unknown monodromy kind {self.kind!r}")
        if self.kind == "dehn_twist" and (self.sigma is None or self.shift is None):
            raise ValueError("a Dehn twist needs a twist profile and a shift function")
        for label, t in self.boundary_shift.items():
            if not t < 0:
                raise ValueError(f"twist constant at {label!r} must be negative, got {t}")

    def apply(self, x, phi):
        """Image of annulus points (x, phi) with phi taken modulo 2 pi."""
        if self.kind == "identity":
            return np.asarray(x, float), np.mod(phi, 2 * np.pi)
        if self.kind == "opaque":
            raise ValueError("opaque monodromy has no point map")
        x = np.asarray(x, float)
        return x, np.mod(np.asarray(phi, float) + self.sigma(x), 2 * np.pi)


@dataclass(frozen=True)
class AbstractOpenBook:
    page: PageSurface
    monodromy: Monodromy
    boundary_labels: tuple

    def __post_init__(self):
        labels = tuple(self.boundary_labels)
        object.__setattr__(self, "boundary_labels", labels)
        if len(labels) != self.page.boundary_count:
            raise ValueError(
                f"{len(labels)} labels for {self.page.boundary_count} boundary components"
            )
        if len(set(labels)) != len(labels):
            raise ValueError("boundary labels must be distinct")


def dehn_sigma(x):
    """Right-handed Dehn twist profile, a full turn at x=-1 and none at x=1."""
    return np.pi * (1.0 - np.asarray(x, float))


def dehn_shift(x):
    """Return time function T(x) < 0 of the annulus mapping torus.

    With the page form x dphi, the twist pulls it back to itself plus the
    differential of -pi x^2/2 (up to a constant), so T = pi x^2/2 - pi keeps
    T negative and constant to second order near the boundary.
    """
    x = np.asarray(x, float)
    return 0.5 * np.pi * x**2 - np.pi


def make_annulus_book(upper: str = "U", lower: str = "L") -> AbstractOpenBook:
    """Annulus page [-1,1] x S^1 with a positive Dehn twist.

    The boundary component x=1 carries label ``upper`` and x=-1 carries ``lower``.
    """
    tb = float(dehn_shift(1.0))
    mono = Monodromy("dehn_twist", dehn_sigma, dehn_shift, {upper: tb, lower: tb})
    return AbstractOpenBook(PageSurface("annulus", 2), mono, (upper, lower))


def make_disk_book(label: str = "B") -> AbstractOpenBook:
    """Disk page with trivial monodromy (the standard open book of S^3)."""
    return AbstractOpenBook(PageSurface("disk", 1), Monodromy("identity"), (label,))


def make_base_book(label: str = "B", genus: int = 1) -> AbstractOpenBook:
    """Base book with one boundary component and a monodromy that is never integrated."""
    return AbstractOpenBook(
        PageSurface("abstract", 1, genus), Monodromy("opaque"), (label,)
    )


@dataclass(frozen=True)
class BookSumChain:
    """Linear chain of open books joined along boundary labels.

    ``joins`` may be given in any order; it is stored in chain order, so
    join j connects summand j to summand j+1.
    """

    books: tuple
    joins: tuple

    def __post_init__(self):
        books = tuple(self.books)
        joins = tuple(tuple(j) for j in self.joins)
        object.__setattr__(self, "books", books)
        owner = {}
        for i, b in enumerate(books):
            for lab in b.boundary_labels:
                if lab in owner:
                    raise ValueError(f"label {lab!r} appears in two books")
                owner[lab] = i
        used = set()
        for left, right in joins:
            for lab in (left, right):
                if lab not in owner:
                    raise ValueError(f"join references unknown label {lab!r}")
                if lab in used:
                    raise ValueError(f"label {lab!r} used in more than one join")
                used.add(lab)
        object.__setattr__(self, "joins", _order_joins(books, joins, owner))
        object.__setattr__(self, "_owner", owner)

    def owner(self, label: str) -> int:
        return self._owner[label]

    @property
    def free_labels(self) -> tuple:
        used = {lab for j in self.joins for lab in j}
        return tuple(l for b in self.books for l in b.boundary_labels if l not in used)


def _order_joins(books, joins, owner):
    """Sort joins into chain order and check that they form a path 0-1-...-k."""
    if len(joins) != len(books) - 1:
        raise ValueError(f"{len(books)} books need {len(books) - 1} joins, got {len(joins)}")
    by_pair = {}
    for left, right in joins:
        i, j = owner[left], owner[right]
        if i == j:
            raise ValueError("a join must connect two different books")
        if i > j:
            left, right, i, j = right, left, j, i
        if j != i + 1 or i in by_pair:
            raise ValueError("joins do not form a linear chain in book order")
        by_pair[i] = (left, right)
    return tuple(by_pair[i] for i in range(len(books) - 1))


def build_chain(base: AbstractOpenBook, k: int) -> BookSumChain:
    """Chain base, A_1, ..., A_k of annulus books joined B-L1, U1-L2, ..., U_{k-1}-L_k."""
    if base.page.boundary_count != 1:
        raise ValueError(
            f"base book must have one boundary component, got {base.page.boundary_count}"
        )
    if k < 1:
        raise ValueError("k must be a positive integer")
    books = [base] + [make_annulus_book(f"U{i}", f"L{i}") for i in range(1, k + 1)]
    joins = [(base.boundary_labels[0], "L1")]
    joins += [(f"U{i}", f"L{i + 1}") for i in range(1, k)]
    return BookSumChain(tuple(books), tuple(joins))


def example_chain(n: int, regime: str = "thm1", base: AbstractOpenBook | None = None) -> BookSumChain:
    """Chain of the n-th example in a regime.

    ``thm1`` joins n + 1 annuli to the base, one handle per join.  ``thm2``
    joins 3n + 2 annuli, so that 3n handles are counted and every region
    can serve at most three of them.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    if n < 1:
        raise ValueError("n must be a positive integer")
    base = make_base_book() if base is None else base
    return build_chain(base, n + 1 if regime == "thm1" else 3 * n + 2)


@dataclass(frozen=True)
class Block:
    tag: str
    index: int

    @property
    def label(self) -> str:
        return f"{self.tag}{self.index}"

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class BlockDecomposition:
    """Ordered invariant blocks with the forced zero-linking relation.

    In the ``thm1`` regime blocks run P0, H0, N0, P1, ... ; in the ``thm2``
    regime they are the regions V0, V1, ... cut out by invariant tori, and
    handle j sits in V_j.
    """

    blocks: tuple
    regime: str
    zero_matrix: np.ndarray
    handle_blocks: tuple
    counted_handles: tuple
    chain: BookSumChain | None = None

    def index(self, b) -> int:
        label = b.label if isinstance(b, Block) else str(b)
        for i, blk in enumerate(self.blocks):
            if blk.label == label:
                return i
        raise KeyError(f"no block {label!r}")

    def block(self, label: str) -> Block:
        return self.blocks[self.index(label)]

    def zero_link(self, b1, b2) -> bool:
        return bool(self.zero_matrix[self.index(b1), self.index(b2)])

    @property
    def labels(self) -> list:
        return [b.label for b in self.blocks]

    def admissible(self, handle: int) -> tuple:
        """Blocks that may carry a curve linking the given handle orbit."""
        h = self.handle_blocks[handle]
        return tuple(i for i in range(len(self.blocks)) if not self.zero_matrix[h, i])


def _thm1_zero(n_joins: int) -> np.ndarray:
    m = 3 * n_joins + 1
    z = np.zeros((m, m), bool)
    for p in range(m):
        for q in range(p + 1, m):
            for j in range(n_joins):
                split = 3 * j
                if (p <= split and (q == split + 1 or q >= split + 3)) or (
                    p == split + 1 and q >= split + 3
                ):
                    z[p, q] = z[q, p] = True
                    break
    return z


def decompose(chain: BookSumChain, regime: str = "thm1") -> BlockDecomposition:
    """Invariant blocks of a chain and their zero-linking relation.

    Parameters
    ----------
    chain : BookSumChain
    regime : {'thm1', 'thm2'}
        ``thm1`` separates page sets, handle sets and binding neighbourhoods
        of each sum.  ``thm2`` uses the coarser regions between perturbed
        invariant tori, where only regions at index distance >= 2 are
        separated; it needs at least two annulus summands.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    k = len(chain.joins)
    if regime == "thm1":
        blocks = []
        for j in range(k):
            blocks += [Block("P", j), Block("H", j), Block("N", j)]
        blocks.append(Block("P", k))
        handles = tuple(3 * j + 1 for j in range(k))
        return BlockDecomposition(
            tuple(blocks), regime, _thm1_zero(k), handles, tuple(range(k)), chain
        )
    if k < 3:
        raise ValueError("the torus regime needs at least three handles")
    blocks = tuple(Block("V", i) for i in range(k))
    idx = np.arange(k)
    z = np.abs(idx[:, None] - idx[None, :]) >= 2
    # handle j joins summands j and j+1 and lies in region V_j; handles 0 and 1
    # touch the regions next to the base and are not counted
    handles = tuple(range(k))
    return BlockDecomposition(blocks, regime, z, handles, tuple(range(2, k)), chain)


@dataclass(frozen=True)
class ChartPoint:
    """A point in one registered chart.

    chart : 'binding' (key: boundary label or join index, coords (theta1, r, theta2)),
    'handle' (key: join index, coords (r, theta)) or 'mapping_torus'
    (key: summand index, coords (x, phi, theta)).
    """

    chart: str
    key: object
    coords: tuple


def _in_chart(dec: BlockDecomposition, pt: ChartPoint) -> bool:
    c = np.asarray(pt.coords, float)
    if pt.chart == "binding":
        return c.size == 3 and 0.0 <= c[1] <= 1.0
    if pt.chart == "handle":
        return c.size == 2 and 1.0 <= c[0] <= 2.0 and abs(c[1]) <= np.pi / 4
    if pt.chart == "mapping_torus":
        return c.size == 3 and -1.0 <= c[0] <= 1.0
    raise ValueError(f"unknown chart {pt.chart!r}")


def _resolve(dec: BlockDecomposition, pt: ChartPoint) -> Block:
    chain = dec.chain
    k = len(chain.joins)
    if pt.chart == "binding":
        if isinstance(pt.key, (int, np.integer)):
            j = int(pt.key)
            if not 0 <= j < k:
                raise ValueError(f"no join {j}")
            return Block("N", j)
        for j, pair in enumerate(chain.joins):
            if pt.key in pair:
                return Block("N", j)
        return Block("P", chain.owner(pt.key))
    if pt.chart == "handle":
        j = int(pt.key)
        if not 0 <= j < k:
            raise ValueError(f"no handle {j}")
        return Block("H", j)
    i = int(pt.key)
    if not 0 <= i < len(chain.books):
        raise ValueError(f"no summand {i}")
    return Block("P", i)


def classify_point(dec: BlockDecomposition, point: ChartPoint | Iterable[ChartPoint]) -> Block:
    """Block containing a point given in one or more overlapping charts.

    Overlaps are resolved by chart priority binding > handle > mapping torus.
    """
    if dec.regime != "thm1" or dec.chain is None:
        raise ValueError("point classification needs a thm1 decomposition of a chain")
    pts = [point] if isinstance(point, ChartPoint) else list(point)
    inside = [p for p in pts if _in_chart(dec, p)]
    if not inside:
        raise ValueError("point lies outside all registered charts")
    inside.sort(key=lambda p: CHART_PRIORITY[p.chart])
    return _resolve(dec, inside[0])


def block_graph(dec: BlockDecomposition) -> tuple:
    """Canonical form (labels, adjacency, zero-link matrix) for comparing decompositions."""
    m = len(dec.blocks)
    adj = np.zeros((m, m), bool)
    adj[np.arange(m - 1), np.arange(1, m)] = True
    adj |= adj.T
    return tuple(dec.labels), adj, dec.zero_matrix.copy()
