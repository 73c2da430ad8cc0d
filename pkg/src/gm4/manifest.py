"""Plain-text manifest format for graph structures (.gm files).

Example:

    version 1
    block A
      base orientable genus 0 boundaries 3
      gen c1 [[1,1],[0,1]]
      gen c2 [[1,2],[0,1]]
    end
    block B
      base orientable genus 0 boundaries 3
      labels p q r
      gen c1 [[1,-1],[0,1]]
      gen c2 [[1,-2],[0,1]]
    end
    glue A.1 B.p
      x (1,0,0)
      y (0,1,0)
      t (0,0,-1)
    end

Matrices are [[a,b],[c,d]]; pi1 images are (a,b,k) normal forms in the
target boundary bundle.  Boundary labels default to 1..b.  Lines starting
with # are comments.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .gl2z import Mat2
from .bundles import (
    Block,
    BoundaryIso,
    MonodromyRep,
    Pi1Element,
    SurfaceWithBoundary,
    TorusBundleOverCircle,
)
from .assembly import Edge, GraphStructure


class ManifestError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


_MATRIX_RE = re.compile(
    r"^\[\[(-?\d+),(-?\d+)\],\[(-?\d+),(-?\d+)\]\]$"
)
_TRIPLE_RE = re.compile(r"^\((-?\d+),(-?\d+),(-?\d+)\)$")


def parse_matrix(text: str, line: int = 0, col: int = 1) -> Mat2:
    m = _MATRIX_RE.match(text.replace(" ", ""))
    if not m:
        raise ManifestError(f"expected matrix [[a,b],[c,d]], got {text!r}", line, col)
    mat = Mat2(*(int(g) for g in m.groups()))
    if mat.det() not in (1, -1):
        raise ManifestError(
            f"determinant {mat.det()}, not unimodular: {text}", line, col
        )
    return mat


def parse_triple(text: str, line: int = 0, col: int = 1) -> Pi1Element:
    m = _TRIPLE_RE.match(text.replace(" ", ""))
    if not m:
        raise ManifestError(f"expected pi1 image (a,b,k), got {text!r}", line, col)
    return Pi1Element(*(int(g) for g in m.groups()))


@dataclass
class BlockDecl:
    label: str
    line: int
    orientable: Optional[bool] = None
    genus: int = 0
    boundaries: int = 0
    labels: Optional[Tuple[str, ...]] = None
    gens: Dict[str, Mat2] = field(default_factory=dict)
    gen_lines: Dict[str, int] = field(default_factory=dict)


@dataclass
class GlueDecl:
    end1: Tuple[str, str]
    end2: Tuple[str, str]
    line: int
    images: Dict[str, Pi1Element] = field(default_factory=dict)


@dataclass
class Manifest:
    version: int
    blocks: List[BlockDecl]
    glues: List[GlueDecl]

    def to_structure(self) -> GraphStructure:
        blocks: Dict[str, Block] = {}
        for decl in self.blocks:
            surface = SurfaceWithBoundary(decl.orientable, decl.genus, decl.boundaries)
            names = surface.generator_names()
            missing = [n for n in names if n not in decl.gens]
            if missing:
                raise ManifestError(
                    f"block {decl.label}: missing generator images {missing}"
                    f" (convention order: {', '.join(names)})",
                    decl.line,
                )
            extra = [n for n in decl.gens if n not in names]
            if extra:
                raise ManifestError(
                    f"block {decl.label}: unknown generators {extra}",
                    decl.gen_lines[extra[0]],
                )
            rep = MonodromyRep(surface, tuple(decl.gens[n] for n in names))
            labels = decl.labels or tuple(
                str(i) for i in range(1, decl.boundaries + 1)
            )
            if len(labels) != decl.boundaries:
                raise ManifestError(
                    f"block {decl.label}: {len(labels)} labels for "
                    f"{decl.boundaries} boundary components",
                    decl.line,
                )
            blocks[decl.label] = Block(rep, labels)
        edges = []
        for glue in self.glues:
            for end in (glue.end1, glue.end2):
                if end[0] not in blocks:
                    raise ManifestError(f"unknown block label {end[0]!r}", glue.line)
                if end[1] not in blocks[end[0]].boundary_labels():
                    raise ManifestError(
                        f"unknown boundary label {end[0]}.{end[1]}", glue.line
                    )
            for gen in ("x", "y", "t"):
                if gen not in glue.images:
                    raise ManifestError(
                        f"glue {glue.end1[0]}.{glue.end1[1]} {glue.end2[0]}.{glue.end2[1]}: "
                        f"missing image of {gen}",
                        glue.line,
                    )
            src = TorusBundleOverCircle(
                blocks[glue.end1[0]].boundary_monodromy(glue.end1[1])
            )
            tgt = TorusBundleOverCircle(
                blocks[glue.end2[0]].boundary_monodromy(glue.end2[1])
            )
            iso = BoundaryIso(
                src, tgt, glue.images["x"], glue.images["y"], glue.images["t"]
            )
            edges.append(Edge(glue.end1, glue.end2, iso))
        return GraphStructure(tuple(sorted(blocks.items())), tuple(edges))

    @staticmethod
    def from_structure(gs: GraphStructure) -> "Manifest":
        decls = []
        for lbl, block in gs.blocks:
            surface = block.rep.surface
            decl = BlockDecl(
                label=lbl,
                line=0,
                orientable=surface.orientable,
                genus=surface.genus,
                boundaries=surface.boundary_count,
                labels=block.boundary_labels(),
                gens=dict(zip(surface.generator_names(), block.rep.images)),
            )
            decls.append(decl)
        glues = []
        for edge in gs.edges:
            glues.append(
                GlueDecl(
                    edge.end1,
                    edge.end2,
                    line=0,
                    images={
                        "x": edge.iso.x_img,
                        "y": edge.iso.y_img,
                        "t": edge.iso.t_img,
                    },
                )
            )
        return Manifest(1, decls, glues)


def _end_ref(token: str, line: int) -> Tuple[str, str]:
    if "." not in token:
        raise ManifestError(
            f"expected block.boundary reference, got {token!r}", line
        )
    blk, _, bd = token.partition(".")
    if not blk or not bd:
        raise ManifestError(
            f"expected block.boundary reference, got {token!r}", line
        )
    return (blk, bd)


def parse(text: str) -> Manifest:
    version: Optional[int] = None
    blocks: List[BlockDecl] = []
    glues: List[GlueDecl] = []
    current_block: Optional[BlockDecl] = None
    current_glue: Optional[GlueDecl] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        inside = current_block is not None or current_glue is not None
        if head == "version":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ManifestError("expected: version <integer>", lineno)
            version = int(tokens[1])
        elif head == "block":
            if inside:
                raise ManifestError("nested section; missing 'end'?", lineno)
            if len(tokens) != 2:
                raise ManifestError("expected: block <label>", lineno)
            if any(d.label == tokens[1] for d in blocks):
                raise ManifestError(f"duplicate block label {tokens[1]!r}", lineno)
            current_block = BlockDecl(label=tokens[1], line=lineno)
        elif head == "glue":
            if inside:
                raise ManifestError("nested section; missing 'end'?", lineno)
            if len(tokens) != 3:
                raise ManifestError("expected: glue <b1>.<bd1> <b2>.<bd2>", lineno)
            current_glue = GlueDecl(
                _end_ref(tokens[1], lineno), _end_ref(tokens[2], lineno), line=lineno
            )
        elif head == "end":
            if current_block is not None:
                if current_block.orientable is None:
                    raise ManifestError(
                        f"block {current_block.label}: missing 'base' line", lineno
                    )
                blocks.append(current_block)
                current_block = None
            elif current_glue is not None:
                glues.append(current_glue)
                current_glue = None
            else:
                raise ManifestError("'end' outside any section", lineno)
        elif head == "base":
            if current_block is None:
                raise ManifestError("'base' outside a block section", lineno)
            if (
                len(tokens) != 6
                or tokens[1] not in ("orientable", "nonorientable")
                or tokens[2] != "genus"
                or tokens[4] != "boundaries"
            ):
                raise ManifestError(
                    "expected: base orientable|nonorientable genus <g> boundaries <b>",
                    lineno,
                )
            try:
                current_block.orientable = tokens[1] == "orientable"
                current_block.genus = int(tokens[3])
                current_block.boundaries = int(tokens[5])
            except ValueError:
                raise ManifestError("genus and boundaries must be integers", lineno)
        elif head == "labels":
            if current_block is None:
                raise ManifestError("'labels' outside a block section", lineno)
            if len(tokens) < 2:
                raise ManifestError("expected: labels <l1> <l2> ...", lineno)
            current_block.labels = tuple(tokens[1:])
        elif head == "gen":
            if current_block is None:
                raise ManifestError("'gen' outside a block section", lineno)
            if len(tokens) != 3:
                raise ManifestError("expected: gen <name> [[a,b],[c,d]]", lineno)
            if tokens[1] in current_block.gens:
                raise ManifestError(f"duplicate generator {tokens[1]!r}", lineno)
            col = raw.index(tokens[2]) + 1
            current_block.gens[tokens[1]] = parse_matrix(tokens[2], lineno, col)
            current_block.gen_lines[tokens[1]] = lineno
        elif head in ("x", "y", "t"):
            if current_glue is None:
                raise ManifestError(f"{head!r} image outside a glue section", lineno)
            if len(tokens) != 2:
                raise ManifestError(f"expected: {head} (a,b,k)", lineno)
            if head in current_glue.images:
                raise ManifestError(f"duplicate image of {head!r}", lineno)
            col = raw.index(tokens[1]) + 1
            current_glue.images[head] = parse_triple(tokens[1], lineno, col)
        else:
            raise ManifestError(f"unknown directive {head!r}", lineno)
    if current_block is not None or current_glue is not None:
        raise ManifestError("unterminated section at end of file", len(text.splitlines()))
    if version is None:
        raise ManifestError("missing 'version' line", 1)
    if version != 1:
        raise ManifestError(f"unsupported manifest version {version}", 1)
    return Manifest(version, blocks, glues)


def serialize(manifest: Manifest) -> str:
    lines = [f"version {manifest.version}"]
    for decl in sorted(manifest.blocks, key=lambda d: d.label):
        lines.append(f"block {decl.label}")
        kind = "orientable" if decl.orientable else "nonorientable"
        lines.append(f"  base {kind} genus {decl.genus} boundaries {decl.boundaries}")
        default = tuple(str(i) for i in range(1, decl.boundaries + 1))
        if decl.labels and tuple(decl.labels) != default:
            lines.append("  labels " + " ".join(decl.labels))
        surface = SurfaceWithBoundary(decl.orientable, decl.genus, decl.boundaries)
        for name in surface.generator_names():
            lines.append(f"  gen {name} {decl.gens[name]}")
        lines.append("end")
    for glue in sorted(manifest.glues, key=lambda g: (g.end1, g.end2)):
        lines.append(
            f"glue {glue.end1[0]}.{glue.end1[1]} {glue.end2[0]}.{glue.end2[1]}"
        )
        for gen in ("x", "y", "t"):
            lines.append(f"  {gen} {glue.images[gen]}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def load_structure(text: str) -> GraphStructure:
    return parse(text).to_structure()


def dump_structure(gs: GraphStructure) -> str:
    return serialize(Manifest.from_structure(gs))
