import pytest
from hypothesis import given, settings, strategies as st

from gm4 import (
    Block,
    BoundaryIso,
    I2,
    L,
    Mat2,
    MonodromyRep,
    Pi1Element,
    R,
    S,
    SurfaceWithBoundary,
    TorusBundleOverCircle,
    UnsupportedOperationError,
    boundary_bundle,
    compose_isos,
    fiber_covering_exists,
    fiber_matrix,
    fibration_unique,
    is_fiber_preserving,
    iso_inverse,
    orientation_reversing_self_diffeo_exists,
    square_root_closed,
    torus_bundle_homology,
    validate_block,
    validate_glueing,
)
from gm4.bundles import PI1_T, PI1_X, PI1_Y

from conftest import mirror_edge_iso, pants, swap_iso, upper

AMBIENTS = [
    TorusBundleOverCircle(I2),
    TorusBundleOverCircle(Mat2(1, 1, 0, 1)),
    TorusBundleOverCircle(Mat2(1, -3, 0, 1)),
    TorusBundleOverCircle(Mat2(2, 1, 1, 1)),
    TorusBundleOverCircle(Mat2(0, -1, 1, 0)),
    TorusBundleOverCircle(Mat2(1, 0, 0, -1)),
]

elements = st.builds(
    Pi1Element,
    st.integers(-5, 5),
    st.integers(-5, 5),
    st.integers(-5, 5),
)


class TestSurfaces:
    def test_euler_characteristic(self):
        assert SurfaceWithBoundary(True, 0, 3).euler_characteristic() == -1
        assert SurfaceWithBoundary(True, 1, 1).euler_characteristic() == -1
        assert SurfaceWithBoundary(False, 1, 1).euler_characteristic() == 0
        assert SurfaceWithBoundary(False, 2, 1).euler_characteristic() == -1

    def test_rank(self):
        assert SurfaceWithBoundary(True, 2, 3).pi1_rank() == 6
        assert SurfaceWithBoundary(False, 2, 2).pi1_rank() == 3

    def test_boundary_words_multiply_to_relator(self):
        surface = SurfaceWithBoundary(True, 2, 3)
        words = surface.boundary_words()
        assert len(words) == 3
        assert words[0] == (("c1", 1),)


class TestValidateBlock:
    def test_pants_accepts(self):
        assert validate_block(pants(Mat2(2, 1, 1, 1), S)) == []

    def test_annulus_rejected(self):
        surface = SurfaceWithBoundary(True, 0, 2)
        block = Block(MonodromyRep(surface, (R,)))
        assert any("chi = 0" in v for v in validate_block(block))

    def test_mobius_rejected(self):
        surface = SurfaceWithBoundary(False, 1, 1)
        block = Block(MonodromyRep(surface, (Mat2(1, 0, 0, -1),)))
        assert any("excluded surface" in v for v in validate_block(block))

    def test_disc_rejected(self):
        surface = SurfaceWithBoundary(True, 0, 1)
        block = Block(MonodromyRep(surface, ()))
        assert any("excluded surface" in v for v in validate_block(block))

    def test_orientable_base_needs_det_plus_one(self):
        block = pants(Mat2(1, 0, 0, -1), R)
        assert any("determinant -1" in v for v in validate_block(block))

    def test_non_orientable_determinant_pattern(self):
        surface = SurfaceWithBoundary(False, 1, 2)
        good = Block(MonodromyRep(surface, (Mat2(1, 0, 0, -1), R)))
        assert validate_block(good) == []
        bad = Block(MonodromyRep(surface, (R, R)))
        assert any("orientation" in v for v in validate_block(bad))

    def test_image_count_mismatch(self):
        surface = SurfaceWithBoundary(True, 0, 3)
        block = Block(MonodromyRep(surface, (R,)))
        assert any("count" in v for v in validate_block(block))


class TestBoundaryMonodromies:
    def test_pants(self):
        m1, m2 = Mat2(2, 1, 1, 1), Mat2(1, -3, 0, 1)
        block = pants(m1, m2)
        monos = [m for _, m in block.boundary_monodromies()]
        assert monos == [m1, m2, (m1 @ m2).inverse()]

    def test_genus_one_boundary_word(self):
        surface = SurfaceWithBoundary(True, 1, 1)
        block = Block(MonodromyRep(surface, (R, L)))
        ((_, mono),) = block.boundary_monodromies()
        # last boundary word is ([a,b] c1...)^-1; here ([R,L])^-1
        com = R @ L @ R.inverse() @ L.inverse()
        assert mono == com.inverse() == Mat2(0, 1, -1, 3)

    def test_trivial_images(self):
        block = pants(I2, I2)
        assert all(m == I2 for _, m in block.boundary_monodromies())

    def test_relator_product_is_identity(self):
        # [a1,b1]...[ag,bg] c1...c_{b-1} last^-1... evaluated: the boundary
        # words satisfy prod(handles) * c-part * last = 1 in the free group,
        # so the monodromies multiply to I in the same order.
        surface = SurfaceWithBoundary(True, 2, 3)
        images = (R, L, S, Mat2(2, 1, 1, 1), Mat2(1, 4, 0, 1), Mat2(1, 0, -2, 1))
        block = Block(MonodromyRep(surface, images))
        rep = block.rep
        handles = I2
        for i in (1, 2):
            a, b = rep.image_map()[f"a{i}"], rep.image_map()[f"b{i}"]
            handles = handles @ a @ b @ a.inverse() @ b.inverse()
        monos = [m for _, m in block.boundary_monodromies()]
        assert handles @ monos[0] @ monos[1] @ monos[2] == I2


class TestPi1Arithmetic:
    def test_twisted_product(self):
        tb = TorusBundleOverCircle(Mat2(1, 1, 0, 1))
        assert tb.mul(Pi1Element(0, 0, 1), Pi1Element(0, 1, 0)) == Pi1Element(1, 1, 1)

    def test_fiber_commutes(self):
        tb = TorusBundleOverCircle(Mat2(2, 1, 1, 1))
        assert tb.mul(PI1_X, PI1_Y) == tb.mul(PI1_Y, PI1_X) == Pi1Element(1, 1, 0)

    def test_conjugation_relation(self):
        tb = TorusBundleOverCircle(Mat2(1, 1, 0, 1))
        tyt = tb.mul(tb.mul(PI1_T, PI1_Y), tb.inv(PI1_T))
        assert tyt == Pi1Element(1, 1, 0)

    @pytest.mark.parametrize("tb", AMBIENTS, ids=lambda t: str(t.phi))
    @given(e1=elements, e2=elements, e3=elements)
    @settings(max_examples=120, deadline=None)
    def test_group_axioms(self, tb, e1, e2, e3):
        lhs = tb.mul(tb.mul(e1, e2), e3)
        rhs = tb.mul(e1, tb.mul(e2, e3))
        assert lhs == rhs
        ident = Pi1Element(0, 0, 0)
        assert tb.mul(e1, ident) == e1 == tb.mul(ident, e1)
        assert tb.mul(e1, tb.inv(e1)) == ident == tb.mul(tb.inv(e1), e1)

    @pytest.mark.parametrize("tb", AMBIENTS[:3], ids=lambda t: str(t.phi))
    @given(e=elements, n=st.integers(-6, 6))
    @settings(max_examples=60, deadline=None)
    def test_power(self, tb, e, n):
        out = Pi1Element(0, 0, 0)
        for _ in range(abs(n)):
            out = tb.mul(out, e if n > 0 else tb.inv(e))
        assert tb.power(e, n) == out


class TestGlueings:
    def test_identity_accepts(self):
        tb = TorusBundleOverCircle(Mat2(1, 1, 0, 1))
        assert validate_glueing(BoundaryIso.identity(tb)) == []

    def test_three_torus_coordinate_swap_accepts(self):
        tb = TorusBundleOverCircle(I2)
        iso = BoundaryIso(tb, tb, Pi1Element(0, 0, 1), PI1_Y, Pi1Element(1, 0, 0))
        assert validate_glueing(iso) == []
        assert not is_fiber_preserving(iso)

    def test_fiber_swap_rejected(self):
        tb = TorusBundleOverCircle(Mat2(1, 1, 0, 1))
        iso = BoundaryIso(tb, tb, PI1_Y, PI1_X, PI1_T)
        assert any("relation" in v for v in validate_glueing(iso))

    def test_non_surjective_rejected(self):
        tb = TorusBundleOverCircle(I2)
        iso = BoundaryIso(tb, tb, Pi1Element(2, 0, 0), PI1_Y, PI1_T)
        assert any("bijective" in v or "surjective" in v for v in validate_glueing(iso))
        iso = BoundaryIso(tb, tb, PI1_X, PI1_Y, Pi1Element(0, 0, 2))
        assert any("surjective" in v for v in validate_glueing(iso))

    def test_fiber_preserving_examples(self):
        tb = TorusBundleOverCircle(Mat2(1, 1, 0, 1))
        iso = BoundaryIso(tb, tb, PI1_X, PI1_Y, Pi1Element(1, 0, 1))
        assert validate_glueing(iso) == []
        assert is_fiber_preserving(iso)
        tb3 = TorusBundleOverCircle(I2)
        iso = BoundaryIso(tb3, tb3, Pi1Element(0, 0, 1), PI1_Y, Pi1Element(1, 0, 0))
        assert not is_fiber_preserving(iso)
        iso = BoundaryIso(
            tb, tb, Pi1Element(-1, 0, 0), Pi1Element(0, 0, 1), Pi1Element(0, 1, 0)
        )
        assert validate_glueing(iso) == []
        assert not is_fiber_preserving(iso)

    def test_fp_compatibility_property(self):
        # fiber-preserving iso implies C phi1^eps = phi2^... on fiber matrices
        for phi, fiber in ((upper(3), I2), (upper(2), Mat2(1, 1, 0, 1))):
            iso = mirror_edge_iso(phi, fiber)
            assert validate_glueing(iso) == []
            c = fiber_matrix(iso)
            eps = iso.t_img.k
            assert c @ (phi ** eps) == iso.target.phi @ c

    def test_inverse_roundtrip(self):
        examples = [
            swap_iso(3),
            mirror_edge_iso(upper(2)),
            mirror_edge_iso(Mat2(2, 1, 1, 1), Mat2(1, 1, 0, 1)),
        ]
        tb3 = TorusBundleOverCircle(I2)
        examples.append(
            BoundaryIso(tb3, tb3, Pi1Element(0, 0, 1), PI1_Y, Pi1Element(1, 0, 0))
        )
        for iso in examples:
            assert validate_glueing(iso) == []
            inv = iso_inverse(iso)
            assert validate_glueing(inv) == []
            for e in (PI1_X, PI1_Y, PI1_T, Pi1Element(2, -3, 4)):
                assert inv.apply(iso.apply(e)) == e

    def test_compose(self):
        f = swap_iso(2)
        g = iso_inverse(f)
        ident = compose_isos(g, f)
        for e in (PI1_X, PI1_Y, PI1_T):
            assert ident.apply(e) == e


class TestFiberCovering:
    def test_equal_monodromies(self):
        ok, alpha = fiber_covering_exists(Mat2(1, 1, 0, 1), Mat2(1, 1, 0, 1))
        assert ok and alpha == I2

    def test_index_two_covering(self):
        ok, alpha = fiber_covering_exists(Mat2(1, 1, 0, 1), Mat2(1, 2, 0, 1))
        assert ok and alpha == Mat2(2, 0, 0, 1)
        assert alpha @ Mat2(1, 1, 0, 1) == Mat2(1, 2, 0, 1) @ alpha

    def test_parabolic_to_hyperbolic_impossible(self):
        ok, alpha = fiber_covering_exists(Mat2(1, 1, 0, 1), Mat2(2, 1, 1, 1))
        assert not ok and alpha is None

    @given(
        st.sampled_from([I2, upper(1), upper(-2), Mat2(2, 1, 1, 1), S])
    )
    @settings(max_examples=20, deadline=None)
    def test_reflexive(self, phi):
        ok, alpha = fiber_covering_exists(phi, phi)
        assert ok and alpha.det() != 0


class TestFibrationUniqueness:
    def test_spec_examples(self):
        assert not fibration_unique(TorusBundleOverCircle(Mat2(1, 3, 0, 1)))
        assert fibration_unique(TorusBundleOverCircle(Mat2(2, 1, 1, 1)))
        assert fibration_unique(TorusBundleOverCircle(Mat2(0, -1, 1, 0)))
        assert not fibration_unique(TorusBundleOverCircle(I2))


class TestTorusBundleHomology:
    def test_three_torus(self):
        assert torus_bundle_homology(TorusBundleOverCircle(I2)) == (3, [])

    def test_nil_with_torsion(self):
        assert torus_bundle_homology(TorusBundleOverCircle(Mat2(1, 2, 0, 1))) == (2, [2])

    def test_sol(self):
        assert torus_bundle_homology(TorusBundleOverCircle(Mat2(2, 1, 1, 1))) == (1, [])


class TestSquareRootClosed:
    def test_mobius_false(self):
        assert not square_root_closed(SurfaceWithBoundary(False, 1, 1), 0)

    def test_pants_true(self):
        assert square_root_closed(SurfaceWithBoundary(True, 0, 3), 2)

    def test_disc_true(self):
        assert square_root_closed(SurfaceWithBoundary(True, 0, 1), 0)

    def test_index_checked(self):
        with pytest.raises(IndexError):
            square_root_closed(SurfaceWithBoundary(True, 0, 3), 3)


class TestOrientationReversing:
    def test_spec_examples(self):
        assert orientation_reversing_self_diffeo_exists(I2)
        assert orientation_reversing_self_diffeo_exists(-I2)
        assert orientation_reversing_self_diffeo_exists(Mat2(1, 0, 0, -1))
        assert not orientation_reversing_self_diffeo_exists(Mat2(1, 2, 0, 1))
        assert not orientation_reversing_self_diffeo_exists(Mat2(1, 0, 3, 1))

    def test_non_triangular_out_of_scope(self):
        with pytest.raises(UnsupportedOperationError):
            orientation_reversing_self_diffeo_exists(Mat2(2, 1, 1, 1))


class TestBoundaryBundle:
    def test_matches_monodromy(self):
        block = pants(upper(1), upper(2))
        assert boundary_bundle(block, "3").phi == Mat2(1, -3, 0, 1)


class TestFibrationEigenvectorEquivalence:
    @given(st.lists(st.sampled_from([R, L, S, R.inverse(), L.inverse()]), max_size=8))
    @settings(max_examples=120, deadline=None)
    def test_unique_iff_no_eigenvalue_one_vector(self, word):
        from gm4 import eigenvector_eigenvalue_one

        m = I2
        for g in word:
            m = m @ g
        tb = TorusBundleOverCircle(m)
        assert fibration_unique(tb) == (eigenvector_eigenvalue_one(m) is None)
