"""Characteristic function on SL(2,Z), its signature 2-cocycle, and
signatures of blocks and whole graph structures.

psi is the conjugation-invariant integer class function pinned by

    psi(sign * [[1,n],[0,1]]) = n,      psi(+-I) = 0,

extended to hyperbolic classes by the exponent sum of the canonical R/L
word (R counted +1, L counted -1) and to elliptic classes by the unique
values in {-1,0,1} that keep psi congruent mod 3 to the abelianization
character.  That congruence makes

    tau(A, B) = (psi(A) + psi(B) - psi(A B)) / 3

an integer 2-cocycle; empirically it takes values in {-2,...,2}.  The
signature of a block is (1/3) * sum of psi over its boundary monodromies,
and signatures add over blocks under glueings that reverse the induced
boundary orientations.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .gl2z import Mat2, NotInSL2ZError, R, S, abelianization_mod3, classify, generator_word
from .bundles import Block, UnsupportedOperationError

_LIFT3 = {0: 0, 1: 1, 2: -1}


@lru_cache(maxsize=None)
def psi(m: Mat2) -> int:
    """Conjugation-invariant characteristic value of m in SL(2,Z)."""
    if m.det() != 1:
        raise NotInSL2ZError(f"psi needs determinant +1: {m}")
    cls = classify(m)
    if cls.kind == "parabolic":
        base = cls.n
    elif cls.kind == "hyperbolic":
        base = sum(1 if letter == "R" else -1 for letter in cls.word)
    else:
        base = 0
    kappa = _LIFT3[(abelianization_mod3(m) - base) % 3]
    if cls.kind != "elliptic":
        assert kappa == 0, (m, cls, kappa)
    return base + kappa


def meyer_cocycle(a: Mat2, b: Mat2) -> int:
    """Signature 2-cocycle tau(a, b) = (psi(a) + psi(b) - psi(ab)) / 3."""
    if a.det() != 1 or b.det() != 1:
        raise NotInSL2ZError("cocycle arguments must lie in SL(2,Z)")
    num = psi(a) + psi(b) - psi(a @ b)
    assert num % 3 == 0, (a, b, num)
    return num // 3


def psi_value(m: Mat2) -> Fraction:
    """psi as an exact rational (integral here; kept rational per contract)."""
    return Fraction(psi(m))


def psi_by_folding(m: Mat2, pivot: str = "floor") -> int:
    """psi computed by decomposing m into R-power and S letters and folding
    psi(g w) = psi(g) + psi(w) - 3 tau(g, w) right to left.

    Independent of the decomposition; used to cross-check psi.
    """
    letters = [((R ** exp) if gen == "R" else S) for gen, exp in generator_word(m, pivot)]
    if not letters:
        return 0
    acc = letters[-1]
    val = psi(acc)
    for g in reversed(letters[:-1]):
        val = psi(g) + val - 3 * meyer_cocycle(g, acc)
        acc = g @ acc
    assert acc == m
    return val


def block_signature(block: Block) -> Fraction:
    """Signature of a block: one third of the psi-sum over its boundary
    torus-bundle monodromies.  Requires an orientable base and SL(2,Z)
    boundary monodromies."""
    if not block.rep.surface.orientable:
        raise UnsupportedOperationError(
            "signature is computed for blocks with orientable base only"
        )
    total = 0
    for _, mono in block.boundary_monodromies():
        if mono.det() != 1:
            raise UnsupportedOperationError(
                f"boundary monodromy {mono} has determinant -1; "
                "signature needs SL(2,Z) monodromies"
            )
        total += psi(mono)
    return Fraction(total, 3)


def signature_sum(blocks: Iterable[Block]) -> Fraction:
    """Signature of a union of compatibly oriented blocks (Novikov sum)."""
    return sum((block_signature(b) for b in blocks), Fraction(0))
