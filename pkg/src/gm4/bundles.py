"""Surfaces with boundary, monodromy representations, blocks and the
torus bundles over circles that bound them.

Generator and boundary-word convention (fixed once for the whole package):

* orientable surface of genus g with b boundary components:
  free generators a1, b1, ..., ag, bg, c1, ..., c{b-1};
  boundary words  c1, ..., c{b-1}  and
  last = ([a1,b1]...[ag,bg] c1 ... c{b-1})^-1  with [x,y] = x y x^-1 y^-1.
* non-orientable surface with q crosscaps and b boundary components:
  free generators d1, ..., dq, c1, ..., c{b-1};
  boundary words  c1, ..., c{b-1}  and last = (d1^2 ... dq^2 c1 ... c{b-1})^-1.

pi1 of the torus bundle M_phi over a circle is presented on x, y, t with
[x, y] = 1,  t x t^-1 = x^phi11 y^phi21,  t y t^-1 = x^phi12 y^phi22,
and its elements are kept in the normal form x^a y^b t^k, written (a,b,k).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from .gl2z import I2, Mat2, NotInSL2ZError, NotUnimodularError, _ext_gcd
from . import smith

Word = Tuple[Tuple[str, int], ...]


def word_inverse(word: Word) -> Word:
    return tuple((gen, -exp) for gen, exp in reversed(word))


def word_concat(*words: Word) -> Word:
    out: List[Tuple[str, int]] = []
    for w in words:
        out.extend(w)
    return tuple(out)


class UnsupportedOperationError(ValueError):
    """Input is outside the operation's stated scope."""


@dataclass(frozen=True)
class SurfaceWithBoundary:
    orientable: bool
    genus: int  # crosscap count when non-orientable
    boundary_count: int

    def __post_init__(self) -> None:
        if self.boundary_count < 1:
            raise ValueError("surfaces here have at least one boundary component")
        if self.genus < 0 or (not self.orientable and self.genus < 1):
            raise ValueError("bad genus / crosscap count")

    def euler_characteristic(self) -> int:
        if self.orientable:
            return 2 - 2 * self.genus - self.boundary_count
        return 2 - self.genus - self.boundary_count

    def pi1_rank(self) -> int:
        if self.orientable:
            return 2 * self.genus + self.boundary_count - 1
        return self.genus + self.boundary_count - 1

    def generator_names(self) -> Tuple[str, ...]:
        names: List[str] = []
        if self.orientable:
            for i in range(1, self.genus + 1):
                names.append(f"a{i}")
                names.append(f"b{i}")
        else:
            for i in range(1, self.genus + 1):
                names.append(f"d{i}")
        for i in range(1, self.boundary_count):
            names.append(f"c{i}")
        return tuple(names)

    def boundary_words(self) -> Tuple[Word, ...]:
        words: List[Word] = [((f"c{i}", 1),) for i in range(1, self.boundary_count)]
        head: List[Tuple[str, int]] = []
        if self.orientable:
            for i in range(1, self.genus + 1):
                head += [(f"a{i}", 1), (f"b{i}", 1), (f"a{i}", -1), (f"b{i}", -1)]
        else:
            for i in range(1, self.genus + 1):
                head += [(f"d{i}", 2)]
        for i in range(1, self.boundary_count):
            head.append((f"c{i}", 1))
        words.append(word_inverse(tuple(head)))
        return tuple(words)

    def is_disc(self) -> bool:
        return self.orientable and self.genus == 0 and self.boundary_count == 1

    def is_annulus(self) -> bool:
        return self.orientable and self.genus == 0 and self.boundary_count == 2

    def is_mobius(self) -> bool:
        return not self.orientable and self.genus == 1 and self.boundary_count == 1

    def describe(self) -> str:
        kind = "orientable" if self.orientable else "non-orientable"
        return f"{kind} genus {self.genus} with {self.boundary_count} boundary components"


@dataclass(frozen=True)
class MonodromyRep:
    surface: SurfaceWithBoundary
    images: Tuple[Mat2, ...]

    def image_map(self) -> Dict[str, Mat2]:
        return dict(zip(self.surface.generator_names(), self.images))

    def evaluate(self, word: Word) -> Mat2:
        imgs = self.image_map()
        out = I2
        for gen, exp in word:
            out = out @ (imgs[gen] ** exp)
        return out

    def violations(self) -> List[str]:
        out = []
        names = self.surface.generator_names()
        if len(self.images) != len(names):
            out.append(
                f"monodromy image count {len(self.images)} does not match "
                f"pi1 rank {len(names)}"
            )
            return out
        for name, m in zip(names, self.images):
            det = m.det()
            if det not in (1, -1):
                out.append(f"image of {name} has determinant {det}, not unimodular")
            elif self.surface.orientable and det != 1:
                out.append(
                    f"image of {name} has determinant -1 over an orientable base: "
                    "total space would be non-orientable"
                )
            elif not self.surface.orientable:
                want = -1 if name.startswith("d") else 1
                if det != want:
                    out.append(
                        f"image of {name} has determinant {det}; orientation "
                        f"pattern over a non-orientable base needs {want}"
                    )
        return out


@dataclass(frozen=True)
class Block:
    rep: MonodromyRep
    labels: Tuple[str, ...] = ()

    def boundary_labels(self) -> Tuple[str, ...]:
        if self.labels:
            return self.labels
        return tuple(str(i) for i in range(1, self.rep.surface.boundary_count + 1))

    def boundary_monodromies(self) -> Tuple[Tuple[str, Mat2], ...]:
        words = self.rep.surface.boundary_words()
        return tuple(
            (label, self.rep.evaluate(word))
            for label, word in zip(self.boundary_labels(), words)
        )

    def boundary_monodromy(self, label: str) -> Mat2:
        for lbl, m in self.boundary_monodromies():
            if lbl == label:
                return m
        raise KeyError(f"no boundary component labeled {label!r}")


def validate_block(block: Block) -> List[str]:
    out: List[str] = []
    surface = block.rep.surface
    chi = surface.euler_characteristic()
    if surface.is_mobius():
        out.append("excluded surface: Mobius band (chi = 0)")
    elif surface.is_disc():
        out.append("excluded surface: disc (chi = 1)")
    elif surface.is_annulus():
        out.append("chi = 0 (annulus): block bases need chi < 0")
    elif chi >= 0:
        out.append(f"chi = {chi}: block bases need chi < 0")
    labels = block.boundary_labels()
    if len(labels) != surface.boundary_count:
        out.append(
            f"{len(labels)} boundary labels for {surface.boundary_count} boundary components"
        )
    elif len(set(labels)) != len(labels):
        out.append("boundary labels are not distinct")
    out.extend(block.rep.violations())
    return out


# ---------------------------------------------------------------------------
# torus bundles over the circle and pi1 normal-form arithmetic
# ---------------------------------------------------------------------------


class Pi1Element(NamedTuple):
    a: int
    b: int
    k: int

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.k})"


PI1_X = Pi1Element(1, 0, 0)
PI1_Y = Pi1Element(0, 1, 0)
PI1_T = Pi1Element(0, 0, 1)


@lru_cache(maxsize=None)
def _mat_pow(m: Mat2, k: int) -> Mat2:
    return m ** k


@dataclass(frozen=True)
class TorusBundleOverCircle:
    phi: Mat2

    def __post_init__(self) -> None:
        if self.phi.det() not in (1, -1):
            raise NotUnimodularError(f"monodromy must be unimodular: {self.phi}")

    def phi_pow(self, k: int) -> Mat2:
        return _mat_pow(self.phi, k)

    def mul(self, e1: Pi1Element, e2: Pi1Element) -> Pi1Element:
        v = self.phi_pow(e1.k).apply((e2.a, e2.b))
        return Pi1Element(e1.a + v[0], e1.b + v[1], e1.k + e2.k)

    def inv(self, e: Pi1Element) -> Pi1Element:
        v = self.phi_pow(-e.k).apply((e.a, e.b))
        return Pi1Element(-v[0], -v[1], -e.k)

    def power(self, e: Pi1Element, n: int) -> Pi1Element:
        if n < 0:
            return self.power(self.inv(e), -n)
        out = Pi1Element(0, 0, 0)
        base = e
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def conjugate(self, g: Pi1Element, e: Pi1Element) -> Pi1Element:
        return self.mul(self.mul(g, e), self.inv(g))


def boundary_bundle(block: Block, label: str) -> TorusBundleOverCircle:
    return TorusBundleOverCircle(block.boundary_monodromy(label))


# ---------------------------------------------------------------------------
# glueing isomorphisms between boundary torus bundles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryIso:
    """pi1 isomorphism of torus bundles over circles, by generator images.

    x, y generate the fiber subgroup of the source and t its base circle;
    images are normal forms in the target.
    """

    source: TorusBundleOverCircle
    target: TorusBundleOverCircle
    x_img: Pi1Element
    y_img: Pi1Element
    t_img: Pi1Element

    def apply(self, e: Pi1Element) -> Pi1Element:
        tgt = self.target
        out = tgt.power(self.x_img, e.a)
        out = tgt.mul(out, tgt.power(self.y_img, e.b))
        return tgt.mul(out, tgt.power(self.t_img, e.k))

    @staticmethod
    def identity(bundle: TorusBundleOverCircle) -> "BoundaryIso":
        return BoundaryIso(bundle, bundle, PI1_X, PI1_Y, PI1_T)


def compose_isos(second: BoundaryIso, first: BoundaryIso) -> BoundaryIso:
    if second.source.phi != first.target.phi:
        raise ValueError("iso composition mismatch: inner target != outer source")
    return BoundaryIso(
        first.source,
        second.target,
        second.apply(first.x_img),
        second.apply(first.y_img),
        second.apply(first.t_img),
    )


class _TrackedLattice:
    """Sublattice of Z^2 whose basis vectors carry source-group expressions.

    Each stored pair (v, e) satisfies: the glueing map sends e to the fiber
    element with coordinates v.  Kept in echelon form: first basis vector has
    positive x, second has x = 0 and positive y.
    """

    def __init__(self, group: TorusBundleOverCircle):
        self.group = group
        self.b1: Optional[Tuple[Tuple[int, int], Pi1Element]] = None
        self.b2: Optional[Tuple[Tuple[int, int], Pi1Element]] = None

    def _norm(self, v, e):
        lead = v[0] if v[0] != 0 else v[1]
        if lead < 0:
            return (-v[0], -v[1]), self.group.inv(e)
        return v, e

    def add(self, v: Tuple[int, int], e: Pi1Element) -> None:
        g = self.group
        if v[0] != 0:
            if self.b1 is None:
                self.b1 = self._norm(v, e)
                v = (0, 0)
            else:
                w, f = self.b1
                while v[0] != 0:
                    if abs(v[0]) < abs(w[0]):
                        (v, e), (w, f) = (w, f), (v, e)
                    q = v[0] // w[0]
                    v = (v[0] - q * w[0], v[1] - q * w[1])
                    e = g.mul(e, g.power(f, -q))
                self.b1 = self._norm(w, f)
        if v[1] != 0:
            if self.b2 is None:
                self.b2 = self._norm(v, e)
            else:
                w, f = self.b2
                while v[1] != 0:
                    if abs(v[1]) < abs(w[1]):
                        (v, e), (w, f) = (w, f), (v, e)
                    q = v[1] // w[1]
                    v = (0, v[1] - q * w[1])
                    e = g.mul(e, g.power(f, -q))
                self.b2 = self._norm(w, f)

    def _reduce(self) -> None:
        if self.b1 and self.b2:
            (v1, e1), (v2, e2) = self.b1, self.b2
            q = v1[1] // v2[1]
            if q:
                self.b1 = (
                    (v1[0], v1[1] - q * v2[1]),
                    self.group.mul(e1, self.group.power(e2, -q)),
                )

    def signature(self):
        self._reduce()
        return (
            self.b1[0] if self.b1 else None,
            self.b2[0] if self.b2 else None,
        )

    def is_full(self) -> bool:
        return self.signature() == ((1, 0), (0, 1))

    def solve(self, v: Tuple[int, int]) -> Optional[Pi1Element]:
        """Source element mapping to fiber vector v, or None."""
        self._reduce()
        g = self.group
        m = n = 0
        x, y = v
        if self.b1:
            m, rem = divmod(x, self.b1[0][0])
            if rem:
                return None
            y -= m * self.b1[0][1]
        elif x != 0:
            return None
        if self.b2:
            n, rem = divmod(y, self.b2[0][1])
            if rem:
                return None
        elif y != 0:
            return None
        out = Pi1Element(0, 0, 0)
        if self.b1:
            out = g.mul(out, g.power(self.b1[1], m))
        if self.b2:
            out = g.mul(out, g.power(self.b2[1], n))
        return out


def _image_data(iso: BoundaryIso):
    """(winding gcd g, tracked fiber-image lattice or None, w0 pair or None).

    w0 is a pair (source element, target image) with target winding 1; the
    lattice is the intersection of the image subgroup with the target fiber,
    with a source-side expression per basis vector.
    """
    src, tgt = iso.source, iso.target
    ks = (iso.x_img.k, iso.y_img.k, iso.t_img.k)
    g = gcd(gcd(abs(ks[0]), abs(ks[1])), abs(ks[2]))
    if g != 1:
        return g, None, None
    g1, p, q = _ext_gcd(ks[0], ks[1])
    g2, u, v = _ext_gcd(g1, ks[2])
    assert g2 == 1
    alpha, beta, gamma = p * u, q * u, v
    w0_src = Pi1Element(0, 0, 0)
    w0_src = src.mul(src.power(PI1_X, alpha), src.power(PI1_Y, beta))
    w0_src = src.mul(w0_src, src.power(PI1_T, gamma))
    w0_tgt = iso.apply(w0_src)
    assert w0_tgt.k == 1
    lat = _TrackedLattice(src)
    pairs = []
    for gen, kk in ((PI1_X, ks[0]), (PI1_Y, ks[1]), (PI1_T, ks[2])):
        e_src = src.mul(gen, src.power(w0_src, -kk))
        e_tgt = tgt.mul(iso.apply(gen), tgt.power(w0_tgt, -kk))
        assert e_tgt.k == 0
        pairs.append(((e_tgt.a, e_tgt.b), e_src))
    for vec, e in pairs:
        lat.add(vec, e)
    # close under conjugation by w0 (acts on the target fiber by phi)
    phi = tgt.phi
    phi_inv = phi.inverse()
    guard = 0
    while True:
        guard += 1
        if guard > 200:
            raise AssertionError("image lattice closure did not stabilize")
        sig = lat.signature()
        basis = [b for b in (lat.b1, lat.b2) if b]
        for vec, e in basis:
            lat.add(phi.apply(vec), src.conjugate(w0_src, e))
            lat.add(phi_inv.apply(vec), src.conjugate(src.inv(w0_src), e))
        if lat.signature() == sig:
            break
    return 1, lat, (w0_src, w0_tgt)


def validate_glueing(iso: BoundaryIso) -> List[str]:
    """Check the glueing invariants: source relations hold on the images and
    the induced map is bijective (by solving for generator preimages)."""
    out: List[str] = []
    tgt = iso.target
    x, y, t = iso.x_img, iso.y_img, iso.t_img
    if tgt.mul(x, y) != tgt.mul(y, x):
        out.append("relation [x,y] = 1 fails on images")
    phi = iso.source.phi
    lhs = tgt.mul(tgt.mul(t, x), tgt.inv(t))
    rhs = tgt.mul(tgt.power(x, phi.a), tgt.power(y, phi.c))
    if lhs != rhs:
        out.append("relation t x t^-1 = x^phi11 y^phi21 fails on images")
    lhs = tgt.mul(tgt.mul(t, y), tgt.inv(t))
    rhs = tgt.mul(tgt.power(x, phi.b), tgt.power(y, phi.d))
    if lhs != rhs:
        out.append("relation t y t^-1 = x^phi12 y^phi22 fails on images")
    if out:
        return out
    g, lat, _ = _image_data(iso)
    if g != 1:
        out.append(f"not surjective: base winding numbers have gcd {g}")
    elif not lat.is_full():
        out.append("not bijective: fiber image lattice is a proper sublattice")
    return out


def is_fiber_preserving(iso: BoundaryIso) -> bool:
    """True iff the images of both fiber generators stay in the fiber."""
    return iso.x_img.k == 0 and iso.y_img.k == 0


def fiber_matrix(iso: BoundaryIso) -> Mat2:
    """Induced matrix on fiber coordinates of a fiber-preserving iso
    (columns are the images of x and y)."""
    if not is_fiber_preserving(iso):
        raise UnsupportedOperationError("iso is not fiber-preserving")
    return Mat2(iso.x_img.a, iso.y_img.a, iso.x_img.b, iso.y_img.b)


def iso_inverse(iso: BoundaryIso) -> BoundaryIso:
    """Inverse isomorphism, computed from generator preimages."""
    g, lat, w0 = _image_data(iso)
    if g != 1 or lat is None or not lat.is_full():
        raise ValueError("iso is not bijective")
    w0_src, w0_tgt = w0
    src, tgt = iso.source, iso.target
    x_pre = lat.solve((1, 0))
    y_pre = lat.solve((0, 1))
    delta = tgt.mul(PI1_T, tgt.inv(w0_tgt))
    assert delta.k == 0
    t_pre = src.mul(lat.solve((delta.a, delta.b)), w0_src)
    inv = BoundaryIso(iso.target, iso.source, x_pre, y_pre, t_pre)
    assert iso.apply(x_pre) == PI1_X
    assert iso.apply(y_pre) == PI1_Y
    assert iso.apply(t_pre) == PI1_T
    return inv


# ---------------------------------------------------------------------------
# structural criteria for torus bundles over the circle
# ---------------------------------------------------------------------------


def fibration_unique(bundle: TorusBundleOverCircle) -> bool:
    """False exactly when the monodromy has an eigenvector of eigenvalue 1
    (equivalently det(phi - I) = 0), in which case the bundle refibers."""
    phi = bundle.phi
    if phi.det() != 1:
        raise NotInSL2ZError("fibration uniqueness stated for SL(2,Z) monodromy")
    return Mat2(phi.a - 1, phi.b, phi.c, phi.d - 1).det() != 0


def torus_bundle_homology(bundle: TorusBundleOverCircle) -> Tuple[int, List[int]]:
    """(rank, torsion coefficients) of H1 = Z + coker(phi - I)."""
    phi = bundle.phi
    k = [[phi.a - 1, phi.b], [phi.c, phi.d - 1]]
    rank, torsion = smith.abelian_invariants(k, 2)
    return rank + 1, torsion


def square_root_closed(surface: SurfaceWithBoundary, boundary_index: int) -> bool:
    """Whether the boundary subgroup over the given boundary circle is square
    root closed in the total space group; false only over the Mobius band."""
    if not 0 <= boundary_index < surface.boundary_count:
        raise IndexError(f"boundary index {boundary_index} out of range")
    return not surface.is_mobius()


def orientation_reversing_self_diffeo_exists(phi: Mat2) -> bool:
    """For triangular phi: an orientation-reversing self-map of M_phi exists
    iff the associated circle bundle has Euler number 0, iff phi = diag(+-1)."""
    if phi.b != 0 and phi.c != 0:
        raise UnsupportedOperationError(
            "criterion is stated for triangular monodromies only"
        )
    return phi.b == 0 and phi.c == 0 and abs(phi.a) == 1 and abs(phi.d) == 1


# ---------------------------------------------------------------------------
# fiber covering maps: intertwining monomorphisms of fiber lattices
# ---------------------------------------------------------------------------


def intertwiner_basis(pairs: Sequence[Tuple[Mat2, Mat2]]) -> List[Mat2]:
    """Basis of the lattice {X : X @ m1 == m2 @ X for all pairs (m1, m2)}."""
    rows: List[List[int]] = []
    for m1, m2 in pairs:
        p, q, r, s = m1.entries()
        pp, qq, rr, ss = m2.entries()
        rows.append([p - pp, r, -qq, 0])
        rows.append([q, s - pp, 0, -qq])
        rows.append([-rr, 0, p - ss, r])
        rows.append([0, -rr, q, s - ss])
    if not rows:
        rows = [[0, 0, 0, 0]]
    basis = smith.kernel_basis(rows)
    return [Mat2(v[0], v[1], v[2], v[3]) for v in basis]


def _combo(basis: Sequence[Mat2], coeffs: Sequence[int]) -> Mat2:
    out = Mat2(0, 0, 0, 0)
    for x, c in zip(basis, coeffs):
        if c:
            out = Mat2(out.a + c * x.a, out.b + c * x.b, out.c + c * x.c, out.d + c * x.d)
    return out


def _coeff_boxes(r: int, bound: int):
    if r == 0:
        return
    stack = [()]
    for _ in range(r):
        stack = [t + (c,) for t in stack for c in range(-bound, bound + 1)]
    for t in stack:
        yield t


def fiber_covering_exists(
    phi1: Mat2, phi2: Mat2, witness_bound: int = 8
) -> Tuple[bool, Optional[Mat2]]:
    """Decide whether a fiber covering map M_phi1 -> M_phi2 exists: an alpha
    with nonzero determinant and alpha @ phi1 == phi2 @ alpha.

    The decision is exact (a quadratic form vanishes on a lattice iff it
    vanishes on all {-1,0,1} coefficient vectors of a basis); the returned
    witness has the smallest |det| among coefficient vectors with entries
    bounded by witness_bound, ties broken lexicographically.
    """
    basis = intertwiner_basis([(phi1, phi2)])
    if not basis:
        return False, None
    r = len(basis)
    solvable = False
    for coeffs in _coeff_boxes(r, 1):
        if _combo(basis, coeffs).det() != 0:
            solvable = True
            break
    if not solvable:
        return False, None
    best: Optional[Tuple[Tuple, Mat2]] = None
    for coeffs in _coeff_boxes(r, witness_bound):
        x = _combo(basis, coeffs)
        det = x.det()
        if det == 0:
            continue
        if x.a < 0 or (x.a == 0 and (x.b < 0 or (x.b == 0 and (x.c < 0 or (x.c == 0 and x.d < 0))))):
            x = -x
        key = (
            abs(det),
            max(abs(e) for e in x.entries()),
            tuple(abs(e) for e in x.entries()),
            x.entries(),
        )
        if best is None or key < best[0]:
            best = (key, x)
    assert best is not None
    witness = best[1]
    assert witness @ phi1 == phi2 @ witness and witness.det() != 0
    return True, witness
