#include "vfckit/duality.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace vfckit;

namespace {

SimplicialComplex interval() {  // two edges
    SimplicialComplex c(3);
    c.insert_with_faces({0, 1});
    c.insert_with_faces({1, 2});
    return c;
}

std::map<int, HomologyGroup> cochain_homology(const SimplicialComplex& k) {
    auto c = twisted_cochains(k, FacePairSystem::trivial(k));
    return c->homology_all();
}

}  // namespace

TEST_CASE("relative chains of (Delta^1, boundary)") {
    SimplicialComplex d1 = SimplicialComplex::full_simplex(1);
    SimplicialComplex bd = SimplicialComplex::boundary_simplex(1);
    auto c = simplicial_chains(SimplicialPair{d1, bd});
    REQUIRE(c->homology(-1) == HomologyGroup{1, {}});
    REQUIRE(c->homology(0).is_zero());
}

TEST_CASE("relative chains of (X, X) vanish") {
    auto x = polygon(3);
    auto c = simplicial_chains(SimplicialPair{x, x});
    REQUIRE(c->total_rank() == 0);
}

TEST_CASE("stock complex homology") {
    SECTION("circle") {
        auto h = simplicial_homology(polygon(3));
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h[1] == HomologyGroup{1, {}});
    }
    SECTION("hexagon circle") {
        auto h = simplicial_homology(polygon(6));
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h[1] == HomologyGroup{1, {}});
    }
    SECTION("octahedron sphere") {
        auto h = simplicial_homology(octahedron());
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h.count(1) == 0);
        REQUIRE(h[2] == HomologyGroup{1, {}});
    }
    SECTION("torus") {
        auto h = simplicial_homology(torus());
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h[1] == HomologyGroup{2, {}});
        REQUIRE(h[2] == HomologyGroup{1, {}});
    }
    SECTION("projective plane") {
        auto h = simplicial_homology(projective_plane());
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h[1] == HomologyGroup{0, {2}});
        REQUIRE(h.count(2) == 0);
    }
    SECTION("Klein bottle") {
        auto h = simplicial_homology(klein_bottle());
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h[1] == HomologyGroup{1, {2}});
        REQUIRE(h.count(2) == 0);
    }
    SECTION("Moebius band retracts to a circle") {
        auto h = simplicial_homology(moebius_band());
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h[1] == HomologyGroup{1, {}});
    }
    SECTION("cylinder") {
        auto h = simplicial_homology(cylinder(3));
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h[1] == HomologyGroup{1, {}});
    }
    SECTION("projective plane over Z[1/2] loses its torsion") {
        auto h = simplicial_homology(projective_plane(),
                                     GroundRing::integers_with_inverted({Integer(2)}));
        REQUIRE(h.count(1) == 0);
    }
}

TEST_CASE("barycentric subdivision preserves homology") {
    for (auto base : {polygon(4), octahedron(), moebius_band()}) {
        auto sd = barycentric_subdivision(base);
        REQUIRE(simplicial_homology(sd.sd) == simplicial_homology(base));
    }
}

TEST_CASE("local homology of a manifold point") {
    auto m = octahedron();
    auto sd = barycentric_subdivision(m);
    SimplicialComplex pt(m.vertices());
    pt.insert_with_faces({0});
    auto spt = sd.image_of(pt);
    auto c = local_chains(sd, spt);
    REQUIRE(c->homology(-2) == HomologyGroup{1, {}});
    REQUIRE(c->homology(-1).is_zero());
    REQUIRE(c->homology(0).is_zero());
}

TEST_CASE("ez product") {
    SECTION("vertex x vertex") {
        SimplicialComplex pt(1);
        pt.insert_with_faces({0});
        auto prod = product_complex(pt, pt);
        REQUIRE(prod.complex.size() == 1);
    }
    SECTION("point x anything is the identity on homology") {
        SimplicialComplex pt(1);
        pt.insert_with_faces({0});
        auto y = polygon(4);
        auto prod = product_complex(pt, y);
        REQUIRE(simplicial_homology(prod.complex) == simplicial_homology(y));
    }
    SECTION("edge x edge: two triangles assembling the square, Leibniz check") {
        auto e = SimplicialComplex::full_simplex(1);
        auto prod = product_complex(e, e);
        REQUIRE(prod.complex.simplices(2).size() == 2);
        auto cx = simplicial_chains(e);
        auto tp = tensor(cx, cx);
        auto cprod = simplicial_chains(prod.complex);
        auto ez = ez_product(e, e, prod, tp, cx, cx, cprod);
        REQUIRE(ez.commutes_with_differentials());  // boundary Leibniz, signs included
        REQUIRE(is_quasi_iso(ez));
    }
    SECTION("Leibniz on a surface x circle sample up to dimension 2") {
        auto x = polygon(3);
        auto y = interval();
        auto prod = product_complex(x, y);
        auto cx = simplicial_chains(x);
        auto cy = simplicial_chains(y);
        auto tp = tensor(cx, cy);
        auto cprod = simplicial_chains(prod.complex);
        auto ez = ez_product(x, y, prod, tp, cx, cy, cprod);
        REQUIRE(ez.commutes_with_differentials());
        REQUIRE(is_quasi_iso(ez));
        // torus as circle x circle has the right homology
        auto t2 = product_complex(polygon(3), polygon(3)).complex;
        auto h = simplicial_homology(t2);
        REQUIRE(h[1] == HomologyGroup{2, {}});
    }
}

TEST_CASE("orientation systems") {
    SECTION("orientable fixtures admit a global orientation") {
        for (auto m : {polygon(6), octahedron(), torus()}) {
            auto o = OrientationSystem::compute(m);
            REQUIRE(o.global_orientation().has_value());
        }
    }
    SECTION("non-orientable fixtures do not") {
        for (auto m : {projective_plane(), klein_bottle(), moebius_band()}) {
            auto o = OrientationSystem::compute(m);
            REQUIRE_FALSE(o.global_orientation().has_value());
        }
    }
    SECTION("flatness holds and twisted chains square to zero") {
        auto o = OrientationSystem::compute(klein_bottle());
        REQUIRE(o.face_signs().flat());
        auto c = twisted_chains(klein_bottle(), o.face_signs());
        REQUIRE(c->total_rank() > 0);  // construction validates d^2 = 0
    }
}

TEST_CASE("cech complexes") {
    SECTION("single piece cover gives F(X)") {
        auto x = polygon(4);
        ClosedCover cover{x, {x}};
        auto F = constant_sheaf_assignment(cover);
        auto c = cech_complex(cover, F);
        REQUIRE(c.complex->homology(0) == HomologyGroup{1, {}});
        REQUIRE(c.complex->homology(1).is_zero());
    }
    SECTION("circle covered by two arcs") {
        auto x = polygon(6);
        SimplicialComplex a1(6), a2(6);
        for (int i : {0, 1, 2}) a1.insert_with_faces({i, i + 1});
        a2.insert_with_faces({3, 4});
        a2.insert_with_faces({4, 5});
        a2.insert_with_faces({0, 5});
        ClosedCover cover{x, {a1, a2}};
        auto h = cech_cohomology_constant(cover);
        REQUIRE(h[0] == HomologyGroup{1, {}});
        REQUIRE(h[1] == HomologyGroup{1, {}});
    }
    SECTION("dual-cell covers recover simplicial cohomology on five fixtures") {
        std::vector<SimplicialComplex> fixtures{polygon(5), octahedron(), torus(),
                                                projective_plane(), moebius_band()};
        for (auto& m : fixtures) {
            auto sd = barycentric_subdivision(m);
            auto cover = dual_cell_cover(m, sd);
            auto h = cech_cohomology_constant(cover);
            REQUIRE(h == cochain_homology(m));
        }
    }
    SECTION("refinement induces an isomorphism on cohomology") {
        auto x = polygon(6);
        SimplicialComplex a1(6), a2(6);
        for (int i : {0, 1, 2}) a1.insert_with_faces({i, i + 1});
        a2.insert_with_faces({3, 4});
        a2.insert_with_faces({4, 5});
        a2.insert_with_faces({0, 5});
        ClosedCover coarse{x, {a1, a2}};
        auto sdx = barycentric_subdivision(x);
        auto fine = dual_cell_cover(x, sdx);
        REQUIRE(cech_cohomology_constant(coarse) == cech_cohomology_constant(fine));
    }
}

TEST_CASE("mayer-vietoris for relative chains") {
    std::mt19937 rng(551);
    auto fixtures = {polygon(6), octahedron(), torus()};
    for (const auto& m : fixtures) {
        auto sd = barycentric_subdivision(m);
        auto all = m.all_simplices();
        for (int trial = 0; trial < 6; ++trial) {
            SimplicialComplex k1(m.vertices()), k2(m.vertices());
            for (const auto& s : all) {
                if (rng() % 3 == 0) k1.insert_with_faces(s);
                if (rng() % 3 == 0) k2.insert_with_faces(s);
            }
            if (k1.empty() || k2.empty()) continue;
            REQUIRE(mayer_vietoris_check(m, sd, k1, k2));
        }
    }
    SECTION("K1 = K2 is trivially acyclic") {
        auto m = polygon(4);
        auto sd = barycentric_subdivision(m);
        auto k = m.closed_star({0});
        REQUIRE(mayer_vietoris_check(m, sd, k, k));
    }
    SECTION("corrupted assignment is detected") {
        auto m = polygon(4);
        auto sd = barycentric_subdivision(m);
        SimplicialComplex k1 = m.closed_star({0}), k2 = m.closed_star({2});
        MayerVietorisData mv;
        auto u = k1.unite(k2);
        auto i = k1.intersect(k2);
        mv.on_union = simplicial_chains(SimplicialPair{sd.sd, sd.complement_of(u)});
        mv.on_first = simplicial_chains(SimplicialPair{sd.sd, sd.complement_of(k1)});
        mv.on_second = simplicial_chains(SimplicialPair{sd.sd, sd.complement_of(k2)});
        mv.on_intersection = simplicial_chains(SimplicialPair{sd.sd, sd.complement_of(i)});
        // deliberately wrong: zero maps instead of restrictions
        mv.union_to_first = ChainMap::zero(mv.on_union, mv.on_first);
        mv.union_to_second = ChainMap::zero(mv.on_union, mv.on_second);
        mv.first_to_intersection = ChainMap::zero(mv.on_first, mv.on_intersection);
        mv.second_to_intersection = ChainMap::zero(mv.on_second, mv.on_intersection);
        REQUIRE_FALSE(mayer_vietoris_acyclic(mv));
    }
}

TEST_CASE("poincare-lefschetz duality") {
    SECTION("hexagon circle, K = M") {
        auto r = poincare_lefschetz(polygon(6), polygon(6));
        REQUIRE(r.manifold);
        REQUIRE(r.matched);
        REQUIRE(r.sides[0].first == HomologyGroup{1, {}});
        REQUIRE(r.sides[1].first == HomologyGroup{1, {}});
    }
    SECTION("K = single vertex: local homology vs a point") {
        auto m = polygon(6);
        SimplicialComplex k(m.vertices());
        k.insert_with_faces({0});
        auto r = poincare_lefschetz(m, k);
        REQUIRE(r.matched);
        REQUIRE(r.sides[0].first == HomologyGroup{1, {}});  // H_1(M, M - pt)
        REQUIRE(r.sides[1].first.is_zero());
    }
    SECTION("sphere") {
        auto r = poincare_lefschetz(octahedron(), octahedron());
        REQUIRE(r.matched);
        REQUIRE(r.sides[0].first == HomologyGroup{1, {}});
        REQUIRE(r.sides[2].first == HomologyGroup{1, {}});
    }
    SECTION("torus, K = M: ranks 1,2,1") {
        auto r = poincare_lefschetz(torus(), torus());
        REQUIRE(r.matched);
        REQUIRE(r.sides[0].first == HomologyGroup{1, {}});
        REQUIRE(r.sides[1].first == HomologyGroup{2, {}});
        REQUIRE(r.sides[2].first == HomologyGroup{1, {}});
    }
    SECTION("torus, K = a subcomplex") {
        auto m = torus();
        SimplicialComplex k = m.closed_star({0});
        auto r = poincare_lefschetz(m, k);
        REQUIRE(r.matched);
    }
    SECTION("projective plane: torsion sits where duality dictates") {
        auto r = poincare_lefschetz(projective_plane(), projective_plane());
        REQUIRE(r.matched);
        REQUIRE(r.sides[1].first == HomologyGroup{0, {2}});   // H_1 = Z/2
        REQUIRE(r.sides[1].second == HomologyGroup{0, {2}});  // twisted H^1
        REQUIRE(r.sides[2].first == HomologyGroup{1, {}});
        REQUIRE(r.sides[0].first.is_zero());
    }
    SECTION("Klein bottle with twist") {
        auto r = poincare_lefschetz(klein_bottle(), klein_bottle());
        REQUIRE(r.manifold);
        REQUIRE(r.matched);
        REQUIRE(r.sides[1].first == HomologyGroup{1, {2}});  // H_1 = Z + Z/2
    }
    SECTION("interval with boundary") {
        auto m = interval();
        auto r = poincare_lefschetz(m, m);
        REQUIRE(r.manifold);
        REQUIRE(r.matched);
        REQUIRE(r.sides[1].first == HomologyGroup{1, {}});  // H_0(M) = Cech^1(M; o rel d)
        REQUIRE(r.sides[0].first.is_zero());
    }
    SECTION("non-manifold link is rejected with a witness") {
        SimplicialComplex bad(5);  // two triangles joined at a vertex
        bad.insert_with_faces({0, 1, 2});
        bad.insert_with_faces({0, 3, 4});
        auto r = poincare_lefschetz(bad, bad);
        REQUIRE_FALSE(r.manifold);
        REQUIRE(r.detail.find("[0]") != std::string::npos);
    }
}
