import numpy as np
import pytest

from symrig import (
    TypeMap,
    character_table,
    external_representation,
    fixed_subspace_basis,
    internal_representation,
    isotypic_bases,
    isotypic_projector,
    make_group,
    numerical_rank,
    subspace_distance,
)

from _support import bricard_cs, triangle


class TestCharacterTables:
    def test_cs_two_characters(self):
        tab = character_table(make_group("Cs", 2, mirror_normal=(1, 0)))
        assert tab.names == ("A'", "A''")
        assert tab.characters[0].values == (1.0, 1.0)
        assert tab.characters[1].values == (1.0, -1.0)

    def test_trivial_character_always_first(self):
        for grp in (
            make_group("C1", 2),
            make_group("Cm", 2, order=4),
            make_group("Cmv", 3, order=3, axis=(0, 0, 1), mirror_normal=(1, 0, 0)),
        ):
            tab = character_table(grp)
            assert all(v == 1.0 for v in tab.characters[0].values)

    def test_c2_characters(self):
        tab = character_table(make_group("Cm", 2, order=2))
        assert tab.names == ("A", "B")
        assert tab.characters[1].values == (1.0, -1.0)

    def test_c3_merged_pair_character(self):
        tab = character_table(make_group("Cm", 2, order=3))
        assert tab.names == ("A", "E1")
        e = tab.characters[1]
        assert e.degree == 2 and e.merged_pair
        assert e.values == pytest.approx((2.0, -1.0, -1.0))

    def test_c2v_characters(self):
        grp = make_group("Cmv", 3, order=2, axis=(0, 0, 1), mirror_normal=(1, 0, 0))
        tab = character_table(grp)
        assert tab.names == ("A1", "A2", "B1", "B2")

    def test_orthogonality_with_merged_pair_factor(self):
        for grp in (
            make_group("Cm", 2, order=3),
            make_group("Cm", 2, order=6),
            make_group("Cmv", 2, order=4, mirror_normal=(0, 1)),
        ):
            assert character_table(grp).orthogonality_defect() <= 1e-12


class TestProjectors:
    def test_triangle_external_dims(self):
        fw, phi = triangle()
        rep = external_representation(phi)
        tab = character_table(phi.group)
        p1 = isotypic_projector(rep, tab, 0)
        p2 = isotypic_projector(rep, tab, 1)
        assert numerical_rank(p1).rank == 3
        assert numerical_rank(p2).rank == 3

    def test_triangle_internal_dims(self):
        fw, phi = triangle()
        rep = internal_representation(phi, fw.graph)
        tab = character_table(phi.group)
        assert numerical_rank(isotypic_projector(rep, tab, 0)).rank == 2
        assert numerical_rank(isotypic_projector(rep, tab, 1)).rank == 1

    def test_projector_laws(self):
        fw, phi = bricard_cs()
        rep = external_representation(phi)
        tab = character_table(phi.group)
        projs = [isotypic_projector(rep, tab, t) for t in range(tab.count)]
        total = sum(projs)
        assert np.abs(total - np.eye(rep.degree)).max() <= 1e-11
        for i, p in enumerate(projs):
            assert np.abs(p @ p - p).max() <= 1e-11
            for j, q in enumerate(projs):
                if i != j:
                    assert np.abs(p @ q).max() <= 1e-11

    def test_projectors_commute_with_representation(self):
        fw, phi = bricard_cs()
        rep = external_representation(phi)
        tab = character_table(phi.group)
        for t in range(tab.count):
            p = isotypic_projector(rep, tab, t)
            for mat in rep.matrices:
                assert np.abs(mat @ p - p @ mat).max() <= 1e-11

    def test_rotation_action_splits_plane_and_axis(self):
        # C3 in 3D: the trivial projector keeps the axis, E keeps the plane
        grp = make_group("Cm", 3, order=3, axis=(0, 0, 1))
        phi = TypeMap.from_generators(grp, 1, {"C3": "()"})
        rep = external_representation(phi)
        tab = character_table(grp)
        assert isotypic_projector(rep, tab, 0) == pytest.approx(np.diag([0.0, 0.0, 1.0]))
        assert isotypic_projector(rep, tab, 1) == pytest.approx(np.diag([1.0, 1.0, 0.0]))


class TestIsotypicBases:
    def test_triangle_dimension_bookkeeping(self):
        fw, phi = triangle()
        ext = isotypic_bases(external_representation(phi))
        inn = isotypic_bases(internal_representation(phi, fw.graph))
        assert ext.dims == (3, 3)
        assert inn.dims == (2, 1)
        assert sum(ext.dims) == 6 and sum(inn.dims) == 3

    def test_components_are_invariant(self):
        fw, phi = bricard_cs()
        rep = external_representation(phi)
        basis = isotypic_bases(rep)
        for b in basis.bases:
            for mat in rep.matrices:
                image = mat @ b
                residual = image - b @ (b.T @ image)
                assert np.abs(residual).max() <= 1e-10

    def test_bricard_c2_trivial_component_dim(self):
        from _support import bricard_c2

        fw, phi = bricard_c2()
        ext = isotypic_bases(external_representation(phi))
        assert ext.dims[0] == 9


class TestFixedSubspace:
    def test_triangle_dim(self):
        _, phi = triangle()
        assert fixed_subspace_basis(phi).shape[1] == 3

    def test_bricard_cs_dim(self):
        _, phi = bricard_cs()
        assert fixed_subspace_basis(phi).shape[1] == 10

    def test_trivial_group_gives_whole_space(self):
        grp = make_group("C1", 2)
        phi = TypeMap.from_generators(grp, 4, {})
        assert fixed_subspace_basis(phi).shape[1] == 8

    def test_two_routes_agree(self):
        from symrig.irreps import PROJECTOR_CUT
        from symrig import orthonormal_image

        _, phi = bricard_cs()
        kernel_route = fixed_subspace_basis(phi)
        rep = external_representation(phi)
        tab = character_table(phi.group)
        projector_route = orthonormal_image(isotypic_projector(rep, tab, 0), PROJECTOR_CUT)
        assert subspace_distance(kernel_route, projector_route) <= 1e-10
