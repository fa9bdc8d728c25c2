"""Linking numbers and the lower bound on binding components of a surface of section.

The bound uses one fact as an axiom: every handle orbit links some boundary
component of a global surface of section.  A boundary component confined to
a block can only link handle orbits whose block is not forced to zero
linking with it.  The minimum number of components is then a hitting-set
problem on the admissible blocks of the handles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .openbook import BlockDecomposition

__all__ = [
    "ClosedCurve",
    "LinkingNumber",
    "LinkingCertificate",
    "LinkingError",
    "gauss_link",
    "block_link_rule",
    "certify_lower_bound",
    "replay_certificate",
    "brute_force_bound",
    "certificate_transcript",
    "circle",
    "torus_curve",
    "embed_binding_curve",
]

FORCED_ZERO = "forced_zero"
UNCONSTRAINED = "unconstrained"


class LinkingError(ValueError):
    """Sampling too coarse or curves too close for a reliable linking number."""


@dataclass(frozen=True)
class ClosedCurve:
    """Closed polygon in R^3; a repeated closing point is dropped."""

    points: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, float)
        if p.ndim != 2 or p.shape[1] != 3 or len(p) < 3:
            raise ValueError("a closed curve needs at least 3 points in R^3")
        if np.linalg.norm(p[0] - p[-1]) < 1e-12:
            p = p[:-1]
        object.__setattr__(self, "points", p)

    def reversed(self) -> "ClosedCurve":
        return ClosedCurve(self.points[::-1].copy())

    @property
    def max_step(self) -> float:
        return float(np.max(np.linalg.norm(np.roll(self.points, -1, 0) - self.points, axis=1)))

    def refined(self) -> "ClosedCurve":
        """Insert the midpoint of every edge (same polygon, half the step)."""
        p = self.points
        mid = 0.5 * (p + np.roll(p, -1, 0))
        out = np.empty((2 * len(p), 3))
        out[0::2], out[1::2] = p, mid
        return ClosedCurve(out)


@dataclass(frozen=True)
class LinkingNumber:
    value: int
    raw: float
    residual: float
    samples: tuple

    def __int__(self):
        return self.value


def _gauss_sum(p1, p2, chunk=2048):
    d1 = np.roll(p1, -1, 0) - p1
    d2 = np.roll(p2, -1, 0) - p2
    m1 = p1 + 0.5 * d1
    m2 = p2 + 0.5 * d2
    total = 0.0
    for s in range(0, len(m1), chunk):
        diff = m1[s:s + chunk, None, :] - m2[None, :, :]
        cr = np.cross(d1[s:s + chunk, None, :], d2[None, :, :])
        dist = np.linalg.norm(diff, axis=-1)
        total += np.sum(np.einsum("ijk,ijk->ij", diff, cr) / dist**3)
    return total / (4 * np.pi)


def _separation(p1, p2, chunk=2048):
    best = np.inf
    for s in range(0, len(p1), chunk):
        d = np.linalg.norm(p1[s:s + chunk, None, :] - p2[None, :, :], axis=-1)
        best = min(best, float(d.min()))
    return best


def gauss_link(c1: ClosedCurve, c2: ClosedCurve, max_samples: int = 8192) -> LinkingNumber:
    """Linking number by midpoint quadrature of the Gauss double integral.

    Both polygons are refined by edge midpoints until the edge length is at
    most a tenth of the curve separation and the distance to the nearest
    integer is below 0.05.  Symmetry under swapping the curves is checked
    on every call.

    Raises
    ------
    LinkingError
        When the rounding residual stays above 0.1 or the curves intersect.
    """
    if not isinstance(c1, ClosedCurve):
        c1 = ClosedCurve(c1)
    if not isinstance(c2, ClosedCurve):
        c2 = ClosedCurve(c2)
    sep = _separation(c1.points, c2.points)
    if sep < 1e-9:
        raise LinkingError("curves intersect")
    while True:
        coarse = max(c1.max_step, c2.max_step) > sep / 10
        raw = _gauss_sum(c1.points, c2.points)
        val = int(np.rint(raw))
        res = abs(raw - val)
        if not coarse and res < 0.05:
            break
        if max(len(c1.points), len(c2.points)) * 2 > max_samples:
            break
        if c1.max_step >= c2.max_step or len(c2.points) * 2 > max_samples:
            c1 = c1.refined()
        else:
            c2 = c2.refined()
    if res > 0.1:
        raise LinkingError(f"rounding residual {res:.3f} exceeds 0.1; sampling too coarse")
    swapped = _gauss_sum(c2.points, c1.points)
    if abs(swapped - raw) > 1e-8 * max(1.0, abs(raw)):
        raise LinkingError(f"Gauss sum not symmetric: {raw} vs {swapped}")
    return LinkingNumber(val, float(raw), float(res), (len(c1.points), len(c2.points)))


def circle(center=(0, 0, 0), radius=1.0, normal=(0, 0, 1), n: int = 200) -> ClosedCurve:
    """Round circle oriented counterclockwise about the normal."""
    nrm = np.asarray(normal, float)
    nrm /= np.linalg.norm(nrm)
    helper = np.array([1.0, 0, 0]) if abs(nrm[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = np.cross(nrm, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(nrm, e1)
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    pts = np.asarray(center, float) + radius * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
    return ClosedCurve(pts)


def torus_curve(p: int, q: int, R: float = 2.0, r: float = 1.0, n: int = 400) -> ClosedCurve:
    """Curve winding p times along and q times around the standard torus.

    The meridian direction is oriented so that a positive meridian links the
    counterclockwise core circle with linking number +1.
    """
    s = np.linspace(0, 2 * np.pi, n, endpoint=False)
    u, v = p * s, q * s
    rad = R + r * np.cos(v)
    return ClosedCurve(np.column_stack([rad * np.cos(u), rad * np.sin(u), -r * np.sin(v)]))


def embed_binding_curve(samples, R: float = 2.0, width: float = 1.0,
                        offset=(0.0, 0.0, 0.0)) -> ClosedCurve:
    """Standard embedding of binding-chart points (theta1, r, theta2) as a solid torus in R^3.

    theta1 runs along the core circle of radius R and (r, theta2) are polar
    coordinates on the meridian disk of radius ``width``.
    """
    y = np.asarray(samples, float)
    t1, r, t2 = y[:, 0], y[:, 1], y[:, 2]
    rad = R + width * r * np.cos(t2)
    pts = np.column_stack([rad * np.cos(t1), rad * np.sin(t1), width * r * np.sin(t2)])
    return ClosedCurve(pts + np.asarray(offset, float))


def block_link_rule(dec: BlockDecomposition, b1, b2) -> str:
    """Whether curves in the two blocks are forced to have zero linking number."""
    return FORCED_ZERO if dec.zero_link(b1, b2) else UNCONSTRAINED


@dataclass
class LinkingCertificate:
    chain: dict
    regime: str
    handles: list
    bound: int
    witness: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chain": self.chain, "regime": self.regime, "handles": self.handles,
            "bound": self.bound, "witness": self.witness,
        }


def _handle_label(dec, j):
    return f"h{j}"


def _admissible(dec, j):
    hb = dec.blocks[dec.handle_blocks[j]]
    return [i for i, b in enumerate(dec.blocks) if block_link_rule(dec, hb, b) == UNCONSTRAINED]


def _describe(dec) -> dict:
    out = {"blocks": dec.labels, "n_handles": len(dec.handle_blocks)}
    if dec.chain is not None:
        out["joins"] = [list(j) for j in dec.chain.joins]
        out["books"] = [b.page.kind for b in dec.chain.books]
    return out


def certify_lower_bound(dec: BlockDecomposition, regime: str | None = None) -> LinkingCertificate:
    """Minimum number of boundary components forced by the handle orbits.

    Handles are processed by the right end of their admissible block
    interval.  A handle not yet linked by a placed component forces a fresh
    component, placed in the rightmost admissible block.  The fresh handles
    have pairwise disjoint admissible sets, which is what makes the count a
    lower bound.
    """
    regime = dec.regime if regime is None else regime
    if regime != dec.regime:
        raise ValueError(f"decomposition is in regime {dec.regime!r}, not {regime!r}")
    adm = {}
    for j in dec.counted_handles:
        a = _admissible(dec, j)
        if not a or a != list(range(a[0], a[-1] + 1)):
            raise ValueError(f"admissible blocks of handle {j} are not an interval: {a}")
        adm[j] = a
    order = sorted(adm, key=lambda j: (adm[j][-1], adm[j][0]))
    placed = []
    log = []
    for j in order:
        hit = [k for k, b in enumerate(placed) if b in adm[j]]
        entry = {
            "handle": _handle_label(dec, j),
            "handle_block": dec.labels[dec.handle_blocks[j]],
            "admissible": [dec.labels[i] for i in adm[j]],
        }
        if hit:
            entry.update(action="reuse", component=f"K{hit[0] + 1}",
                         block=dec.labels[placed[hit[0]]])
        else:
            placed.append(adm[j][-1])
            entry.update(action="fresh", component=f"K{len(placed)}",
                         block=dec.labels[adm[j][-1]])
        log.append(entry)
    return LinkingCertificate(
        _describe(dec), regime, [_handle_label(dec, j) for j in dec.counted_handles],
        len(placed), log,
    )


def replay_certificate(cert: LinkingCertificate, dec: BlockDecomposition) -> int:
    """Re-derive the bound from the witness log.

    Checks that every counted handle is linked by a component in an
    admissible block (so the bound is attained) and that the handles that
    forced fresh components have pairwise disjoint admissible sets (so no
    smaller number of components works).

    Raises
    ------
    ValueError
        If the log is inconsistent with the decomposition.
    """
    labels = {_handle_label(dec, j): j for j in dec.counted_handles}
    if sorted(e["handle"] for e in cert.witness) != sorted(labels):
        raise ValueError("witness log does not cover every counted handle")
    comp_block = {}
    fresh_sets = []
    for e in cert.witness:
        j = labels[e["handle"]]
        adm = {dec.labels[i] for i in _admissible(dec, j)}
        if e["block"] not in adm:
            raise ValueError(f"{e['component']} in {e['block']} cannot link {e['handle']}")
        if comp_block.setdefault(e["component"], e["block"]) != e["block"]:
            raise ValueError(f"{e['component']} placed in two blocks")
        if e["action"] == "fresh":
            if any(adm & s for s in fresh_sets):
                raise ValueError(f"fresh handle {e['handle']} overlaps an earlier one")
            fresh_sets.append(adm)
    if len(fresh_sets) != len(comp_block) or len(comp_block) != cert.bound:
        raise ValueError("component count does not match the claimed bound")
    return cert.bound


def brute_force_bound(dec: BlockDecomposition, m_max: int = 6) -> int:
    """Smallest number of components, placed in blocks, that every handle can link.

    Exhaustive over multisets of blocks of size m = 0..m_max.

    Raises
    ------
    ValueError
        If the decomposition has more than 40 blocks, m_max exceeds 6, or no
        placement with at most m_max components exists.
    """
    nb = len(dec.blocks)
    if nb > 40:
        raise ValueError(f"{nb} blocks exceed the enumeration cap of 40")
    if m_max > 6:
        raise ValueError("m_max above 6 is not enumerated")
    linkable = np.zeros((nb, len(dec.counted_handles)), bool)
    for c, j in enumerate(dec.counted_handles):
        hb = dec.blocks[dec.handle_blocks[j]]
        for i, b in enumerate(dec.blocks):
            linkable[i, c] = block_link_rule(dec, b, hb) == UNCONSTRAINED
    if linkable.shape[1] == 0:
        return 0
    for m in range(m_max + 1):
        for combo in combinations_with_replacement(range(nb), m):
            if m and np.all(linkable[list(combo)].any(axis=0)):
                return m
    raise ValueError(f"no placement of at most {m_max} components links every handle")


def certificate_transcript(cert: LinkingCertificate) -> str:
    """Plain-text account of how the bound follows from the witness log."""
    lines = [
        f"regime {cert.regime}: blocks {' '.join(cert.chain.get('blocks', []))}",
        f"counted handle orbits: {', '.join(cert.handles) or 'none'}",
    ]
    for e in cert.witness:
        adm = ", ".join(e["admissible"])
        if e["action"] == "fresh":
            lines.append(
                f"{e['handle']} (in {e['handle_block']}) links only curves in {{{adm}}}; "
                f"no earlier component lies there, so a new component {e['component']} "
                f"is needed; place it in {e['block']}"
            )
        else:
            lines.append(
                f"{e['handle']} (in {e['handle_block']}) is linked by {e['component']} "
                f"already placed in {e['block']} (admissible {{{adm}}})"
            )
    fresh = [e["handle"] for e in cert.witness if e["action"] == "fresh"]
    lines.append(
        f"the handles {', '.join(fresh) or 'none'} have pairwise disjoint admissible sets, "
        f"so at least {cert.bound} boundary components are required, and "
        f"{cert.bound} suffice for the counted handles"
    )
    return "\n".join(lines) + "\n"
