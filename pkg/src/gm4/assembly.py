"""Whole graph-manifold structures: validation, reduction, invariants and
desk-scale comparison of reduced structures.

A GraphStructure is a labeled set of blocks plus edges pairing boundary
components through pi1 isomorphisms of the boundary torus bundles.  Blocks
present their base surfaces in the fixed generator convention of
``bundles``; the reduction surgeries below re-present bases explicitly
(boundary rotations, adjacent transpositions, mirrors) so that merged
blocks land back in that convention.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import smith
from .gl2z import I2, Mat2, classify
from .bundles import (
    Block,
    BoundaryIso,
    MonodromyRep,
    PI1_T,
    Pi1Element,
    SurfaceWithBoundary,
    TorusBundleOverCircle,
    UnsupportedOperationError,
    Word,
    compose_isos,
    fiber_matrix,
    intertwiner_basis,
    is_fiber_preserving,
    iso_inverse,
    validate_block,
    validate_glueing,
    word_concat,
)
from .meyer import signature_sum

End = Tuple[str, str]  # (block label, boundary label)


class StructureError(ValueError):
    """Structure fails validation where a valid one is required."""


class NotReducedError(ValueError):
    """Comparison requires reduced structures."""


class ClosedBaseError(ValueError):
    """Reduction consumed every boundary component: the structure was a
    single torus bundle over a closed surface, not a block presentation."""


@dataclass(frozen=True)
class Edge:
    end1: End
    end2: End
    iso: BoundaryIso


@dataclass(frozen=True)
class GraphStructure:
    blocks: Tuple[Tuple[str, Block], ...]
    edges: Tuple[Edge, ...]

    def block_map(self) -> Dict[str, Block]:
        return dict(self.blocks)

    def block(self, label: str) -> Block:
        return self.block_map()[label]


def structure(blocks: Dict[str, Block], edges: Sequence[Edge]) -> GraphStructure:
    return GraphStructure(tuple(sorted(blocks.items())), tuple(edges))


def validate_structure(gs: GraphStructure) -> List[str]:
    out: List[str] = []
    labels = [lbl for lbl, _ in gs.blocks]
    if len(set(labels)) != len(labels):
        out.append("block labels are not distinct")
        return out
    blocks = gs.block_map()
    for lbl, block in gs.blocks:
        for v in validate_block(block):
            out.append(f"block {lbl}: {v}")
    seen: Dict[End, int] = {}
    for idx, edge in enumerate(gs.edges):
        for end in (edge.end1, edge.end2):
            blk, bd = end
            if blk not in blocks:
                out.append(f"edge {idx}: unknown block label {blk!r}")
                continue
            if bd not in blocks[blk].boundary_labels():
                out.append(f"edge {idx}: unknown boundary label {blk}.{bd}")
                continue
            if end in seen and edge.end1 != edge.end2:
                out.append(
                    f"edge {idx}: boundary {blk}.{bd} already glued by edge {seen[end]}"
                )
            seen[end] = idx
        if edge.end1 == edge.end2:
            out.append(f"edge {idx}: boundary glued to itself")
    for lbl, block in gs.blocks:
        for bd in block.boundary_labels():
            if (lbl, bd) not in seen:
                out.append(f"open boundary: {lbl}.{bd} appears in no edge")
    if out:
        return out
    for idx, edge in enumerate(gs.edges):
        m1 = blocks[edge.end1[0]].boundary_monodromy(edge.end1[1])
        m2 = blocks[edge.end2[0]].boundary_monodromy(edge.end2[1])
        if edge.iso.source.phi != m1:
            out.append(
                f"edge {idx}: glueing mismatch: iso source monodromy "
                f"{edge.iso.source.phi} != boundary monodromy {m1}"
            )
        if edge.iso.target.phi != m2:
            out.append(
                f"edge {idx}: glueing mismatch: iso target monodromy "
                f"{edge.iso.target.phi} != boundary monodromy {m2}"
            )
        if edge.iso.source.phi == m1 and edge.iso.target.phi == m2:
            for v in validate_glueing(edge.iso):
                out.append(f"edge {idx}: {v}")
    if len(labels) > 1:
        reached = {labels[0]}
        frontier = [labels[0]]
        while frontier:
            cur = frontier.pop()
            for edge in gs.edges:
                for a, b in ((edge.end1[0], edge.end2[0]), (edge.end2[0], edge.end1[0])):
                    if a == cur and b not in reached:
                        reached.add(b)
                        frontier.append(b)
        if reached != set(labels):
            missing = sorted(set(labels) - reached)
            out.append(f"underlying graph not connected: unreachable blocks {missing}")
    return out


def require_valid(gs: GraphStructure) -> None:
    diags = validate_structure(gs)
    if diags:
        raise StructureError("; ".join(diags))


def is_reduced(gs: GraphStructure) -> Tuple[bool, List[int]]:
    """(decision, indices of fiber-preserving edges)."""
    offending = [i for i, e in enumerate(gs.edges) if is_fiber_preserving(e.iso)]
    return not offending, offending


def euler_characteristic(gs: GraphStructure) -> int:
    """Euler characteristic by inclusion-exclusion over blocks and
    decomposing manifolds; identically 0 and kept as a sanity assertion."""
    chi_fiber = 0  # chi(T^2)
    total = 0
    for _, block in gs.blocks:
        total += chi_fiber * block.rep.surface.euler_characteristic()
    for _ in gs.edges:
        total -= 0  # decomposing manifolds are closed 3-manifolds
    if total != 0:
        raise RuntimeError(f"Euler characteristic {total} != 0: inconsistent structure")
    return total


def manifold_signature(gs: GraphStructure) -> Fraction:
    """Signature: sum of block signatures, blocks oriented compatibly
    (glueings reversing the induced boundary orientations)."""
    return signature_sum(block for _, block in gs.blocks)


# ---------------------------------------------------------------------------
# first homology via the abelianized graph-of-groups presentation
# ---------------------------------------------------------------------------


def _word_ab(word: Word) -> Dict[str, int]:
    out: Dict[str, int] = {}
    for gen, exp in word:
        out[gen] = out.get(gen, 0) + exp
    return out


def _spanning_tree(gs: GraphStructure) -> List[bool]:
    """Tree flags per edge; deterministic (edges scanned in sorted order)."""
    parent: Dict[str, str] = {lbl: lbl for lbl, _ in gs.blocks}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    flags = [False] * len(gs.edges)
    order = sorted(range(len(gs.edges)), key=lambda i: (gs.edges[i].end1, gs.edges[i].end2))
    for i in order:
        a, b = find(gs.edges[i].end1[0]), find(gs.edges[i].end2[0])
        if a != b:
            parent[a] = b
            flags[i] = True
    return flags


def first_homology(gs: GraphStructure) -> Tuple[int, List[int]]:
    """(rank, torsion coefficients) of H1 of the glued 4-manifold."""
    require_valid(gs)
    cols: Dict[Tuple, int] = {}

    def col(key: Tuple) -> int:
        if key not in cols:
            cols[key] = len(cols)
        return cols[key]

    for lbl, block in gs.blocks:
        col(("fx", lbl))
        col(("fy", lbl))
        for name in block.rep.surface.generator_names():
            col(("g", lbl, name))
    tree = _spanning_tree(gs)
    for i, flag in enumerate(tree):
        if not flag:
            col(("s", i))

    rows: List[Dict[int, int]] = []

    def add_row(coeffs: Dict[int, int]) -> None:
        if any(v for v in coeffs.values()):
            rows.append(coeffs)

    blocks = gs.block_map()
    for lbl, block in gs.blocks:
        for name, m in zip(block.rep.surface.generator_names(), block.rep.images):
            # gamma x gamma^-1 = x^a y^c ; gamma y gamma^-1 = x^b y^d
            add_row({col(("fx", lbl)): 1 - m.a, col(("fy", lbl)): -m.c})
            add_row({col(("fx", lbl)): -m.b, col(("fy", lbl)): 1 - m.d})

    for edge in gs.edges:
        l1, bd1 = edge.end1
        l2, bd2 = edge.end2
        b1, b2 = blocks[l1], blocks[l2]
        w1 = b1.rep.surface.boundary_words()[b1.boundary_labels().index(bd1)]
        w2 = b2.rep.surface.boundary_words()[b2.boundary_labels().index(bd2)]
        w1_ab, w2_ab = _word_ab(w1), _word_ab(w2)
        sources = (
            {col(("fx", l1)): 1},
            {col(("fy", l1)): 1},
            {col(("g", l1, gen)): exp for gen, exp in w1_ab.items()},
        )
        images = (edge.iso.x_img, edge.iso.y_img, edge.iso.t_img)
        for src_coeffs, img in zip(sources, images):
            coeffs = dict(src_coeffs)

            def bump(key: Tuple, val: int) -> None:
                idx = col(key)
                coeffs[idx] = coeffs.get(idx, 0) + val

            bump(("fx", l2), -img.a)
            bump(("fy", l2), -img.b)
            for gen, exp in w2_ab.items():
                bump(("g", l2, gen), -img.k * exp)
            add_row(coeffs)

    n = len(cols)
    mat = [[row.get(j, 0) for j in range(n)] for row in rows]
    return smith.abelian_invariants(mat, n)


# ---------------------------------------------------------------------------
# invariant report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantReport:
    block_count: int
    block_summary: Tuple[Tuple[str, Tuple[str, ...]], ...]
    decomposing_classes: Tuple[str, ...]
    sigma: Optional[Fraction]
    euler: int
    h1: Tuple[int, Tuple[int, ...]]
    reduced: bool
    findings: Tuple[str, ...]

    def key(self):
        return (
            self.block_count,
            self.block_summary,
            self.decomposing_classes,
            self.sigma,
            self.euler,
            self.h1,
        )

    def render(self) -> str:
        lines = [f"blocks: {self.block_count}"]
        for desc, classes in self.block_summary:
            lines.append(f"  block: {desc}; boundary classes: {', '.join(classes)}")
        lines.append(f"decomposing classes: {', '.join(self.decomposing_classes) or '-'}")
        lines.append(f"reduced: {'yes' if self.reduced else 'no'}")
        sig = "unavailable" if self.sigma is None else str(self.sigma)
        lines.append(f"sigma: {sig}")
        lines.append(f"euler: {self.euler}")
        rank, torsion = self.h1
        tor = "".join(f" + Z/{t}" for t in torsion)
        lines.append(f"h1: Z^{rank}{tor}")
        for f in self.findings:
            lines.append(f"finding: {f}")
        return "\n".join(lines) + "\n"


def invariant_report(gs: GraphStructure) -> InvariantReport:
    require_valid(gs)
    blocks = gs.block_map()
    summary = []
    for lbl, block in gs.blocks:
        classes = tuple(sorted(str(classify(m)) for _, m in block.boundary_monodromies()))
        summary.append((block.rep.surface.describe(), classes))
    summary.sort()
    decomposing = []
    findings = []
    reduced, _ = is_reduced(gs)
    for edge in gs.edges:
        m = blocks[edge.end1[0]].boundary_monodromy(edge.end1[1])
        cls = classify(m)
        decomposing.append(str(cls))
        if reduced and cls.kind != "parabolic":
            findings.append(
                f"reduced structure has non-parabolic decomposing class {cls} "
                f"on edge {edge.end1[0]}.{edge.end1[1]}"
            )
    try:
        sigma = manifold_signature(gs)
    except UnsupportedOperationError:
        sigma = None
    rank, torsion = first_homology(gs)
    return InvariantReport(
        block_count=len(gs.blocks),
        block_summary=tuple(summary),
        decomposing_classes=tuple(sorted(decomposing)),
        sigma=sigma,
        euler=euler_characteristic(gs),
        h1=(rank, tuple(torsion)),
        reduced=reduced,
        findings=tuple(findings),
    )


# ---------------------------------------------------------------------------
# block re-presentation surgeries (used by reduce)
# ---------------------------------------------------------------------------


def _fp_iso(src: TorusBundleOverCircle, dst: TorusBundleOverCircle,
            u: Mat2, t_img: Pi1Element) -> BoundaryIso:
    """Fiber-preserving iso with fiber matrix u (columns = images of x, y)."""
    return BoundaryIso(
        src,
        dst,
        Pi1Element(u.a, u.c, 0),
        Pi1Element(u.b, u.d, 0),
        t_img,
    )


def _handle_word(genus: int) -> Word:
    word: Word = tuple()
    for i in range(1, genus + 1):
        word = word_concat(
            word, ((f"a{i}", 1), (f"b{i}", 1), (f"a{i}", -1), (f"b{i}", -1))
        )
    return word


def _rotate(block: Block) -> Tuple[Block, Dict[str, Tuple[str, BoundaryIso]]]:
    """Cycle boundary positions down by one (old position 1 goes last)."""
    surface = block.rep.surface
    assert surface.orientable
    g, b = surface.genus, surface.boundary_count
    if b < 2:
        raise UnsupportedOperationError("rotation needs at least two boundaries")
    imgs = block.rep.image_map()
    monos = dict(block.boundary_monodromies())
    labels = block.boundary_labels()
    n_mat = block.rep.evaluate(_handle_word(g))
    last_mono = monos[labels[-1]]
    new_images = []
    for name in surface.generator_names():
        if name.startswith(("a", "b")):
            new_images.append(imgs[name])
        else:
            i = int(name[1:])
            new_images.append(imgs[f"c{i + 1}"] if i <= b - 2 else last_mono)
    new_labels = tuple(list(labels[1:]) + [labels[0]])
    new_block = Block(MonodromyRep(surface, tuple(new_images)), new_labels)
    mapping: Dict[str, Tuple[str, BoundaryIso]] = {}
    for lbl in labels[1:]:
        mapping[lbl] = (lbl, BoundaryIso.identity(TorusBundleOverCircle(monos[lbl])))
    m1 = monos[labels[0]]
    new_m1 = n_mat @ m1 @ n_mat.inverse()
    mapping[labels[0]] = (
        labels[0],
        _fp_iso(TorusBundleOverCircle(m1), TorusBundleOverCircle(new_m1), n_mat, PI1_T),
    )
    assert new_block.boundary_monodromy(labels[0]) == new_m1
    return new_block, mapping


def _transpose(block: Block, i: int) -> Tuple[Block, Dict[str, Tuple[str, BoundaryIso]]]:
    """Swap boundary positions i and i+1 (1-based, both below the last)."""
    surface = block.rep.surface
    b = surface.boundary_count
    assert 1 <= i <= b - 2
    imgs = block.rep.image_map()
    labels = block.boundary_labels()
    mi, mi1 = imgs[f"c{i}"], imgs[f"c{i + 1}"]
    new_images = []
    for name in surface.generator_names():
        if name == f"c{i}":
            new_images.append(mi @ mi1 @ mi.inverse())
        elif name == f"c{i + 1}":
            new_images.append(mi)
        else:
            new_images.append(imgs[name])
    new_labels = list(labels)
    new_labels[i - 1], new_labels[i] = new_labels[i], new_labels[i - 1]
    new_block = Block(MonodromyRep(surface, tuple(new_images)), tuple(new_labels))
    mapping: Dict[str, Tuple[str, BoundaryIso]] = {}
    for lbl in labels:
        if lbl == labels[i]:  # moved from position i+1 to i, value conjugated
            mapping[lbl] = (
                lbl,
                _fp_iso(
                    TorusBundleOverCircle(mi1),
                    TorusBundleOverCircle(mi @ mi1 @ mi.inverse()),
                    mi,
                    PI1_T,
                ),
            )
        else:
            m = block.boundary_monodromy(lbl)
            mapping[lbl] = (lbl, BoundaryIso.identity(TorusBundleOverCircle(m)))
    assert new_block.boundary_monodromy(labels[i]) == mi @ mi1 @ mi.inverse()
    assert new_block.boundary_monodromy(labels[i - 1]) == mi
    return new_block, mapping


def _mirror(block: Block) -> Tuple[Block, Dict[str, Tuple[str, BoundaryIso]]]:
    """Orientation-reversing re-presentation of an orientable block.

    Boundary words invert (up to conjugation) and the boundary order below
    the last position reverses; the transport isos send t to t^-1.
    """
    surface = block.rep.surface
    assert surface.orientable
    g, b = surface.genus, surface.boundary_count
    imgs = block.rep.image_map()
    labels = block.boundary_labels()
    monos = dict(block.boundary_monodromies())
    n_mat = block.rep.evaluate(_handle_word(g))
    n_inv = n_mat.inverse()
    new_images = []
    for name in surface.generator_names():
        if name.startswith("a"):
            new_images.append(imgs[f"b{g + 1 - int(name[1:])}"])
        elif name.startswith("b"):
            new_images.append(imgs[f"a{g + 1 - int(name[1:])}"])
        else:
            i = int(name[1:])
            new_images.append(n_inv @ monos[labels[b - i - 1]].inverse() @ n_mat)
    new_labels = tuple(list(reversed(labels[: b - 1])) + [labels[-1]])
    new_block = Block(MonodromyRep(surface, tuple(new_images)), new_labels)
    mapping: Dict[str, Tuple[str, BoundaryIso]] = {}
    for pos, lbl in enumerate(labels):
        m_old = monos[lbl]
        u = n_inv if pos < b - 1 else n_inv @ n_inv
        m_new = u @ m_old.inverse() @ u.inverse()
        mapping[lbl] = (
            lbl,
            _fp_iso(
                TorusBundleOverCircle(m_old),
                TorusBundleOverCircle(m_new),
                u,
                Pi1Element(0, 0, -1),
            ),
        )
        assert new_block.boundary_monodromy(lbl) == m_new, (lbl, m_new)
    return new_block, mapping


def _apply_surgery(
    gs: GraphStructure,
    label: str,
    new_block: Block,
    mapping: Dict[str, Tuple[str, BoundaryIso]],
) -> GraphStructure:
    """Replace a block by a re-presented copy, updating incident edges."""
    new_blocks = tuple(
        (lbl, new_block if lbl == label else blk) for lbl, blk in gs.blocks
    )
    new_edges = []
    for edge in gs.edges:
        iso = edge.iso
        end1, end2 = edge.end1, edge.end2
        if end1[0] == label:
            new_lbl, mu = mapping[end1[1]]
            iso = compose_isos(iso, iso_inverse(mu))
            end1 = (label, new_lbl)
        if end2[0] == label:
            new_lbl, mu = mapping[end2[1]]
            iso = compose_isos(mu, iso)
            end2 = (label, new_lbl)
        new_edges.append(Edge(end1, end2, iso))
    return GraphStructure(new_blocks, tuple(new_edges))


def _position(block: Block, lbl: str) -> int:
    return block.boundary_labels().index(lbl) + 1


def _merge_distinct(gs: GraphStructure, edge_idx: int) -> GraphStructure:
    """Contract a fiber-preserving edge between two distinct blocks."""
    edge = gs.edges[edge_idx]
    l1, l2 = edge.end1[0], edge.end2[0]
    blocks = gs.block_map()
    if not (blocks[l1].rep.surface.orientable and blocks[l2].rep.surface.orientable):
        raise UnsupportedOperationError(
            "merging blocks with non-orientable bases is not supported"
        )
    # normalize the base-circle direction of the glueing to t -> t^-1
    if gs.edges[edge_idx].iso.t_img.k == 1:
        gs = _apply_surgery(gs, l2, *_mirror(blocks[l2]))
        blocks = gs.block_map()
    assert gs.edges[edge_idx].iso.t_img.k == -1
    # glued boundary last on the end1 side, first on the end2 side
    guard = 0
    while _position(blocks[l1], gs.edges[edge_idx].end1[1]) != blocks[l1].rep.surface.boundary_count:
        gs = _apply_surgery(gs, l1, *_rotate(blocks[l1]))
        blocks = gs.block_map()
        guard += 1
        assert guard < 50
    guard = 0
    while _position(blocks[l2], gs.edges[edge_idx].end2[1]) != 1:
        gs = _apply_surgery(gs, l2, *_rotate(blocks[l2]))
        blocks = gs.block_map()
        guard += 1
        assert guard < 50
    edge = gs.edges[edge_idx]
    b1, b2 = blocks[l1], blocks[l2]
    s1, s2 = b1.rep.surface, b2.rep.surface
    g1, n1 = s1.genus, s1.boundary_count
    g2, n2 = s2.genus, s2.boundary_count
    if n1 + n2 - 2 == 0:
        raise ClosedBaseError(
            "contracting this glueing closes the base: the structure is a "
            "torus bundle over a closed surface, not a block presentation"
        )
    c_mat = fiber_matrix(edge.iso)
    c_inv = c_mat.inverse()
    imgs1, imgs2 = b1.rep.image_map(), b2.rep.image_map()
    merged_surface = SurfaceWithBoundary(True, g1 + g2, n1 + n2 - 2)
    new_images: List[Mat2] = []
    for j in range(1, g2 + 1):
        new_images.append(c_inv @ imgs2[f"a{j}"] @ c_mat)
        new_images.append(c_inv @ imgs2[f"b{j}"] @ c_mat)
    for j in range(1, g1 + 1):
        new_images.append(imgs1[f"a{j}"])
        new_images.append(imgs1[f"b{j}"])
    for i in range(1, n1):
        new_images.append(imgs1[f"c{i}"])
    for i in range(2, n2):
        new_images.append(c_inv @ imgs2[f"c{i}"] @ c_mat)
    labels1, labels2 = b1.boundary_labels(), b2.boundary_labels()
    new_label = f"{l1}+{l2}"
    new_labels = tuple(
        [f"{l1}.{lbl}" for lbl in labels1[: n1 - 1]]
        + [f"{l2}.{lbl}" for lbl in labels2[1:]]
    )
    merged = Block(MonodromyRep(merged_surface, tuple(new_images)), new_labels)
    diags = validate_block(merged)
    if diags:
        raise UnsupportedOperationError(
            "merged block is invalid (orientation-incoherent glueing?): "
            + "; ".join(diags)
        )
    mapping: Dict[End, Tuple[str, BoundaryIso]] = {}
    for lbl in labels1[: n1 - 1]:
        m = b1.boundary_monodromy(lbl)
        mapping[(l1, lbl)] = (
            f"{l1}.{lbl}",
            BoundaryIso.identity(TorusBundleOverCircle(m)),
        )
    for lbl in labels2[1:]:
        m = b2.boundary_monodromy(lbl)
        m_new = c_inv @ m @ c_mat
        mapping[(l2, lbl)] = (
            f"{l2}.{lbl}",
            _fp_iso(TorusBundleOverCircle(m), TorusBundleOverCircle(m_new), c_inv, PI1_T),
        )
    for (_, _), (new_lbl, mu) in mapping.items():
        assert merged.boundary_monodromy(new_lbl) == mu.target.phi
    return _rebuild_after_merge(gs, edge_idx, {l1, l2}, new_label, merged, mapping)


def _merge_self(gs: GraphStructure, edge_idx: int) -> GraphStructure:
    """Contract a fiber-preserving self-edge (same block, two boundaries)."""
    edge = gs.edges[edge_idx]
    lbl = edge.end1[0]
    blocks = gs.block_map()
    if not blocks[lbl].rep.surface.orientable:
        raise UnsupportedOperationError(
            "merging blocks with non-orientable bases is not supported"
        )
    if edge.iso.t_img.k == 1:
        raise UnsupportedOperationError(
            "self-glueing preserving the base circle direction produces a "
            "non-orientable base; not supported"
        )
    g = blocks[lbl].rep.surface.genus
    b = blocks[lbl].rep.surface.boundary_count
    if b == 2:
        raise ClosedBaseError(
            "contracting this self-glueing closes the base: the structure is "
            "a torus bundle over a closed surface, not a block presentation"
        )
    guard = 0
    while _position(blocks[lbl], gs.edges[edge_idx].end1[1]) != b:
        gs = _apply_surgery(gs, lbl, *_rotate(blocks[lbl]))
        blocks = gs.block_map()
        guard += 1
        assert guard < 50
    guard = 0
    while _position(blocks[lbl], gs.edges[edge_idx].end2[1]) != 1:
        p = _position(blocks[lbl], gs.edges[edge_idx].end2[1])
        gs = _apply_surgery(gs, lbl, *_transpose(blocks[lbl], p - 1))
        blocks = gs.block_map()
        guard += 1
        assert guard < 100
    edge = gs.edges[edge_idx]
    block = blocks[lbl]
    imgs = block.rep.image_map()
    labels = block.boundary_labels()
    monos = dict(block.boundary_monodromies())
    m_last = monos[labels[-1]]  # monodromy at the contracted source boundary
    m_last_inv = m_last.inverse()
    c_mat = fiber_matrix(edge.iso)
    merged_surface = SurfaceWithBoundary(True, g + 1, b - 2)
    new_images: List[Mat2] = []
    for j in range(1, g + 1):
        new_images.append(imgs[f"a{j}"])
        new_images.append(imgs[f"b{j}"])
    new_images.append(c_mat)       # new handle a_{g+1}: the stable letter
    new_images.append(m_last_inv)  # new handle b_{g+1}: inverse glued word
    for i in range(2, b - 1):
        new_images.append(m_last_inv @ imgs[f"c{i}"] @ m_last)
    new_label = f"{lbl}*"
    new_labels = tuple(f"{lbl}.{old}" for old in labels[1 : b - 1])
    merged = Block(MonodromyRep(merged_surface, tuple(new_images)), new_labels)
    diags = validate_block(merged)
    if diags:
        raise UnsupportedOperationError(
            "merged block is invalid (orientation-incoherent glueing?): "
            + "; ".join(diags)
        )
    mapping: Dict[End, Tuple[str, BoundaryIso]] = {}
    for old in labels[1 : b - 1]:
        m = monos[old]
        m_new = m_last_inv @ m @ m_last
        mapping[(lbl, old)] = (
            f"{lbl}.{old}",
            _fp_iso(TorusBundleOverCircle(m), TorusBundleOverCircle(m_new), m_last_inv, PI1_T),
        )
    for (_, _), (new_lbl2, mu) in mapping.items():
        assert merged.boundary_monodromy(new_lbl2) == mu.target.phi
    return _rebuild_after_merge(gs, edge_idx, {lbl}, new_label, merged, mapping)


def _rebuild_after_merge(
    gs: GraphStructure,
    edge_idx: int,
    old_labels: set,
    new_label: str,
    merged: Block,
    mapping: Dict[End, Tuple[str, BoundaryIso]],
) -> GraphStructure:
    new_blocks = [(lbl, blk) for lbl, blk in gs.blocks if lbl not in old_labels]
    new_blocks.append((new_label, merged))
    new_edges = []
    for i, edge in enumerate(gs.edges):
        if i == edge_idx:
            continue
        iso, end1, end2 = edge.iso, edge.end1, edge.end2
        if end1 in mapping:
            new_lbl, mu = mapping[end1]
            iso = compose_isos(iso, iso_inverse(mu))
            end1 = (new_label, new_lbl)
        if end2 in mapping:
            new_lbl, mu = mapping[end2]
            iso = compose_isos(mu, iso)
            end2 = (new_label, new_lbl)
        new_edges.append(Edge(end1, end2, iso))
    return GraphStructure(tuple(sorted(new_blocks)), tuple(new_edges))


def reduce_structure(gs: GraphStructure) -> GraphStructure:
    """Contract fiber-preserving glueings until the structure is reduced.

    Raises ClosedBaseError when contraction would consume every boundary
    component (the input presented a torus bundle over a closed surface).
    """
    require_valid(gs)
    guard = 0
    while True:
        guard += 1
        if guard > 1000:
            raise AssertionError("reduction did not terminate")
        reduced, offending = is_reduced(gs)
        if reduced:
            return gs
        idx = min(offending, key=lambda i: (gs.edges[i].end1, gs.edges[i].end2))
        edge = gs.edges[idx]
        if edge.end1[0] == edge.end2[0]:
            gs = _merge_self(gs, idx)
        else:
            gs = _merge_distinct(gs, idx)


# ---------------------------------------------------------------------------
# comparison of reduced structures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    verdict: str  # "yes" | "no" | "inconclusive"
    witness: Optional[str] = None
    separating: Optional[str] = None


def _det_pm1_conjugators(pairs, bound: int) -> List[Mat2]:
    """GL(2,Z) solutions X of X m1 X^-1 = m2 for all pairs, found in the
    intertwiner lattice with bounded coefficients; deterministic order."""
    out: List[Mat2] = []
    seen = set()
    if all(m1 == m2 for m1, m2 in pairs):
        out.append(I2)
        seen.add(I2.entries())
    basis = intertwiner_basis(pairs)
    if not basis:
        return out
    r = len(basis)
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=r):
        x = Mat2(0, 0, 0, 0)
        for m, c in zip(basis, coeffs):
            if c:
                x = Mat2(x.a + c * m.a, x.b + c * m.b, x.c + c * m.c, x.d + c * m.d)
        if abs(x.det()) == 1 and x.entries() not in seen:
            seen.add(x.entries())
            out.append(x)
            if len(out) >= 400:
                break
    return out


def _self_fiber_maps(phi: Mat2, bound: int) -> List[Tuple[Mat2, int]]:
    """Fiber parts (A, eps) of fiber-preserving self-isos of M_phi:
    A phi A^-1 = phi^eps with A in GL(2,Z)."""
    out = []
    for eps in (1, -1):
        for a in _det_pm1_conjugators([(phi, phi ** eps)], bound):
            out.append((a, eps))
    return out


def _iso_matches(f_goal: BoundaryIso, f_base: BoundaryIso, bound: int) -> bool:
    """Whether f_goal = g_t o f_base o g_s for fiber-preserving self-isos
    g_s, g_t of the source and target bundles.

    Fiber parts of g_s, g_t are enumerated within the coefficient bound; the
    fiber translation parts are solved for exactly (the composite's generator
    images are affine in them)."""
    src, tgt = f_base.source, f_base.target
    if (f_goal.source.phi, f_goal.target.phi) != (src.phi, tgt.phi):
        return False
    goal = []
    for img in (f_goal.x_img, f_goal.y_img, f_goal.t_img):
        goal.extend([img.a, img.b, img.k])

    def composite(a_s, eps_s, u_s, a_t, eps_t, u_t) -> List[int]:
        g_s = _fp_iso(src, src, a_s, Pi1Element(u_s[0], u_s[1], eps_s))
        g_t = _fp_iso(tgt, tgt, a_t, Pi1Element(u_t[0], u_t[1], eps_t))
        h = compose_isos(g_t, compose_isos(f_base, g_s))
        vec = []
        for img in (h.x_img, h.y_img, h.t_img):
            vec.extend([img.a, img.b, img.k])
        return vec

    units = ((1, 0), (0, 1))
    for a_s, eps_s in _self_fiber_maps(src.phi, bound):
        for a_t, eps_t in _self_fiber_maps(tgt.phi, bound):
            base = composite(a_s, eps_s, (0, 0), a_t, eps_t, (0, 0))
            if [base[i] for i in (2, 5, 8)] != [goal[i] for i in (2, 5, 8)]:
                continue
            cols = []
            for pos in range(4):
                u_s = units[pos] if pos < 2 else (0, 0)
                u_t = units[pos - 2] if pos >= 2 else (0, 0)
                shifted = composite(a_s, eps_s, u_s, a_t, eps_t, u_t)
                cols.append([shifted[i] - base[i] for i in range(9)])
            rows_idx = (0, 1, 3, 4, 6, 7)
            mat = [[cols[j][i] for j in range(4)] for i in rows_idx]
            rhs = [goal[i] - base[i] for i in rows_idx]
            sol = smith.solve_integer(mat, rhs)
            if sol is None:
                continue
            check = composite(a_s, eps_s, (sol[0], sol[1]), a_t, eps_t, (sol[2], sol[3]))
            if check == goal:
                return True
    return False


def _block_key(block: Block) -> Tuple:
    classes = tuple(sorted(str(classify(m)) for _, m in block.boundary_monodromies()))
    s = block.rep.surface
    return (s.orientable, s.genus, s.boundary_count, classes)


def isomorphic_reduced(
    gs1: GraphStructure, gs2: GraphStructure, search_bound: int = 4
) -> Comparison:
    """Three-valued comparison of reduced structures.

    "no" when the invariant reports differ; "yes" when a structure-preserving
    matching is found: a block bijection matching surface types, monodromy
    representations related by simultaneous GL(2,Z) conjugation, and edge
    glueings corresponding up to composition with fiber-preserving bundle
    self-maps, all searched within search_bound.  Otherwise "inconclusive".
    The implemented relation is a documented, possibly coarser proxy for
    structure-preserving diffeomorphism, so "yes" and "no" are final while
    "inconclusive" may improve with a larger bound.
    """
    for gs in (gs1, gs2):
        require_valid(gs)
        reduced, _ = is_reduced(gs)
        if not reduced:
            raise NotReducedError("comparison requires reduced structures; reduce first")
    r1, r2 = invariant_report(gs1), invariant_report(gs2)
    if r1.key() != r2.key():
        fields = ("block_count", "block_summary", "decomposing_classes", "sigma", "euler", "h1")
        for name, v1, v2 in zip(fields, r1.key(), r2.key()):
            if v1 != v2:
                return Comparison("no", separating=name)
    labels1 = [lbl for lbl, _ in gs1.blocks]
    labels2 = [lbl for lbl, _ in gs2.blocks]
    blocks1, blocks2 = gs1.block_map(), gs2.block_map()
    keys1 = {lbl: _block_key(b) for lbl, b in gs1.blocks}
    keys2 = {lbl: _block_key(b) for lbl, b in gs2.blocks}

    def candidate_bijections():
        for perm in itertools.permutations(labels2):
            mapping = dict(zip(labels1, perm))
            if all(keys1[a] == keys2[b] for a, b in mapping.items()):
                yield mapping

    edge_index2: Dict[Tuple[End, End], List[Edge]] = {}
    for e in gs2.edges:
        edge_index2.setdefault((e.end1, e.end2), []).append(e)

    for mapping in candidate_bijections():
        conj_options: Dict[str, List[Mat2]] = {}
        feasible = True
        for lbl in labels1:
            b1, b2 = blocks1[lbl], blocks2[mapping[lbl]]
            if b1.rep.surface != b2.rep.surface:
                feasible = False
                break
            opts = _det_pm1_conjugators(list(zip(b1.rep.images, b2.rep.images)), search_bound)
            if not opts:
                feasible = False
                break
            conj_options[lbl] = opts[:24]
        if not feasible:
            continue

        def map_end(end: End, conj: Dict[str, Mat2]) -> Tuple[End, BoundaryIso]:
            lbl, bd = end
            b1 = blocks1[lbl]
            pos = b1.boundary_labels().index(bd)
            b2 = blocks2[mapping[lbl]]
            new_bd = b2.boundary_labels()[pos]
            m1 = b1.boundary_monodromy(bd)
            m2 = b2.boundary_monodromy(new_bd)
            c = conj[lbl]
            assert c @ m1 @ c.inverse() == m2
            mu = _fp_iso(TorusBundleOverCircle(m1), TorusBundleOverCircle(m2), c, PI1_T)
            return (mapping[lbl], new_bd), mu

        for combo in itertools.product(*(conj_options[lbl] for lbl in labels1)):
            conj = dict(zip(labels1, combo))
            ok = True
            for e in gs1.edges:
                (new_end1, mu1) = map_end(e.end1, conj)
                (new_end2, mu2) = map_end(e.end2, conj)
                transported = compose_isos(mu2, compose_isos(e.iso, iso_inverse(mu1)))
                matched = False
                for cand in edge_index2.get((new_end1, new_end2), []):
                    if _iso_matches(cand.iso, transported, search_bound):
                        matched = True
                        break
                if not matched:
                    for cand in edge_index2.get((new_end2, new_end1), []):
                        if _iso_matches(cand.iso, iso_inverse(transported), search_bound):
                            matched = True
                            break
                if not matched:
                    ok = False
                    break
            if ok:
                desc = ", ".join(f"{a}->{b}" for a, b in sorted(mapping.items()))
                return Comparison("yes", witness=f"block matching {desc}")
    return Comparison("inconclusive")
