#pragma once

#include "vfckit/cech.hpp"

#include <sstream>
#include <string>

namespace vfckit {

struct ManifoldCheck {
    bool ok = false;
    int dim = -1;
    bool closed = true;
    SimplicialComplex boundary;
    std::string offending;  // witness simplex when not a manifold
};

// Homology-level manifold test: every link has the reduced homology of a
// sphere (interior) or of a point (boundary); codimension-one faces have one
// or two top cofaces.  Adequate at fixture scale.
inline ManifoldCheck manifold_check(const SimplicialComplex& m) {
    ManifoldCheck out;
    out.dim = m.dimension();
    int n = out.dim;
    for (const auto& s : m.all_simplices())
        if (int(s.size()) - 1 < n) {
            // purity: every simplex is a face of a top simplex
            bool in_top = false;
            for (const auto& t : m.simplices(n))
                if (std::includes(t.begin(), t.end(), s.begin(), s.end())) in_top = true;
            if (!in_top) {
                out.offending = simplex_name(s) + " (not in a top simplex)";
                return out;
            }
        }
    SimplicialComplex boundary(m.vertices());
    for (const auto& s : m.all_simplices()) {
        int k = int(s.size()) - 1;
        if (k == n) continue;
        auto link = m.link(s);
        int target = n - k - 1;  // expected sphere dimension
        auto h = simplicial_homology(link);
        bool sphere = true, ball = true;
        for (auto& [deg, g] : h) {
            if (deg == 0) {
                if (!(g == HomologyGroup{1, {}})) ball = false;
                std::size_t expect0 = (target == 0) ? 2 : 1;
                if (!(g.free_rank == expect0 && g.torsion.empty())) sphere = false;
            } else if (deg == target) {
                if (!(g == HomologyGroup{1, {}})) sphere = false;
                ball = false;
            } else {
                if (!g.is_zero()) sphere = ball = false;
            }
        }
        if (link.empty()) {
            sphere = false;
            ball = false;
        }
        if (sphere) continue;
        if (ball) {
            boundary.insert_with_faces(s);
            out.closed = false;
            continue;
        }
        out.offending = simplex_name(s);
        return out;
    }
    out.ok = true;
    out.boundary = boundary;
    return out;
}

struct DualitySide {
    HomologyGroup group;
};

struct DualityReport {
    bool manifold = false;
    bool matched = false;
    int dim = 0;
    std::string detail;
    // degree i -> (H_{n-i}(M, M - K), Cech^i(K; o_M))
    std::map<int, std::pair<HomologyGroup, HomologyGroup>> sides;

    std::string table() const {
        std::ostringstream os;
        for (auto& [i, pr] : sides)
            os << "i=" << i << "  H_(n-i)(M, M-K): " << pr.first.str()
               << "   Cech^i(K; o): " << pr.second.str() << "\n";
        return os.str();
    }
};

// Poincare-Lefschetz over Z: H_{n-i}(M, M - K) vs Cech^i(K; o_M) (the latter
// computed as twisted simplicial cochains of K with the intrinsic orientation
// system, relative to K's part of the boundary when M has boundary).
inline DualityReport poincare_lefschetz(const SimplicialComplex& m, const SimplicialComplex& k,
                                        GroundRing ring = GroundRing::integers()) {
    DualityReport out;
    auto mc = manifold_check(m);
    if (!mc.ok) {
        out.detail = "not a manifold at " + mc.offending;
        return out;
    }
    out.manifold = true;
    out.dim = mc.dim;
    if (!k.is_subcomplex_of(m)) throw error("poincare_lefschetz: K not a subcomplex");
    auto orient = OrientationSystem::compute(m);
    auto sd = barycentric_subdivision(m);
    auto left_complex = simplicial_chains(SimplicialPair{sd.sd, sd.complement_of(k)}, ring);
    // right side: twisted cochains of K rel K n boundary(M)
    auto rel = k.intersect(mc.boundary);
    auto right_complex =
        twisted_cochains(k, orient.face_signs().restricted_to(k), ring,
                         rel.empty() ? nullptr : &rel);
    out.matched = true;
    for (int i = 0; i <= out.dim; ++i) {
        HomologyGroup left = left_complex->homology(-(out.dim - i));
        HomologyGroup right = right_complex->homology(i);
        out.sides[i] = {left, right};
        if (!(left == right)) out.matched = false;
    }
    return out;
}

}  // namespace vfckit
