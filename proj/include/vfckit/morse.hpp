#pragma once

#include "vfckit/flowcat.hpp"
#include "vfckit/simplicial.hpp"

#include <map>
#include <string>
#include <vector>

namespace vfckit {

// ---------------------------------------------------------------------------
// Flow spaces of the standard Morse function on the simplex.  The space of
// broken flow lines from vertex 0 to vertex n is the cube [0,oo]^{n-1} in the
// coordinates b_i = a_{i+1} - a_i; b_k = oo means broken at vertex k, b_k = 0
// means the line factors through the facet omitting k.

// A stratum descriptor for F(sigma): per middle-vertex slot, either a free
// coordinate (labelled by the factor piece and its internal slot), a break
// (oo) or a facet collapse (0).
struct CubeSlot {
    enum class Kind { free, broken, collapsed } kind = Kind::free;
    std::size_t piece = 0;  // which factor the free slot comes from
    std::size_t index = 0;  // slot within that factor
    bool operator==(const CubeSlot& o) const {
        return kind == o.kind && piece == o.piece && index == o.index;
    }
};

struct CubeMap {
    int n = 0;  // dimension of the target simplex
    std::vector<CubeSlot> slots;  // size n-1, slots for b_1..b_{n-1}
    bool operator==(const CubeMap& o) const { return n == o.n && slots == o.slots; }
};

inline CubeMap identity_cube_map(int n) {
    CubeMap m;
    m.n = n;
    m.slots.resize(std::size_t(std::max(0, n - 1)));
    for (std::size_t i = 0; i < m.slots.size(); ++i) m.slots[i] = {CubeSlot::Kind::free, 0, i};
    return m;
}

// Product operation at cut k: factors of the source map [0..k] and [k..n]
// merge into F(sigma) with slot k broken.
inline CubeMap cube_product(const CubeMap& left, const CubeMap& right, int k, int n) {
    CubeMap out;
    out.n = n;
    out.slots.resize(std::size_t(std::max(0, n - 1)));
    std::size_t pieces_left = 0;
    for (auto& s : left.slots)
        if (s.kind == CubeSlot::Kind::free) pieces_left = std::max(pieces_left, s.piece + 1);
    // renumber: left pieces keep ids, right pieces shift
    for (int j = 1; j <= n - 1; ++j) {
        if (j < k)
            out.slots[j - 1] = left.slots[j - 1];
        else if (j == k)
            out.slots[j - 1] = {CubeSlot::Kind::broken, 0, 0};
        else {
            CubeSlot s = right.slots[j - k - 1];
            if (s.kind == CubeSlot::Kind::free) s.piece += pieces_left;
            out.slots[j - 1] = s;
        }
    }
    return out;
}

// Face operation omitting vertex k (0 < k < n): source maps the facet.
inline CubeMap cube_face(const CubeMap& face_map, int k, int n) {
    CubeMap out;
    out.n = n;
    out.slots.resize(std::size_t(std::max(0, n - 1)));
    for (int j = 1; j <= n - 1; ++j) {
        if (j == k)
            out.slots[j - 1] = {CubeSlot::Kind::collapsed, 0, 0};
        else if (j < k)
            out.slots[j - 1] = face_map.slots[j - 1];
        else
            out.slots[j - 1] = face_map.slots[j - 2];
    }
    return out;
}

// The three compatibility identities of F-module product/face maps, verified
// on the cube models for all admissible positions, dim sigma <= n_max.
inline bool simplex_flow_identities(int n_max, std::string* witness = nullptr) {
    for (int n = 2; n <= n_max; ++n) {
        // (a) product associativity: cut at k then l equals cut at l then k
        for (int k = 1; k < n; ++k)
            for (int l = k + 1; l < n; ++l) {
                CubeMap a = cube_product(identity_cube_map(k),
                                         cube_product(identity_cube_map(l - k),
                                                      identity_cube_map(n - l), l - k, n - k),
                                         k, n);
                CubeMap b = cube_product(cube_product(identity_cube_map(k),
                                                      identity_cube_map(l - k), k, l),
                                         identity_cube_map(n - l), l, n);
                // piece renumbering: both orders should list pieces left-to-right
                if (!(a == b)) {
                    if (witness)
                        *witness = "product associativity fails at n=" + std::to_string(n) +
                                   " k=" + std::to_string(k) + " l=" + std::to_string(l);
                    return false;
                }
            }
        // (b) face-face commutation: omit k then l in either order
        for (int k = 1; k < n; ++k)
            for (int l = k + 1; l < n; ++l) {
                // omit l first (positions in the facet shift for k < l)
                CubeMap a = cube_face(cube_face(identity_cube_map(n - 2), k, n - 1), l, n);
                CubeMap b = cube_face(cube_face(identity_cube_map(n - 2), l - 1, n - 1), k, n);
                if (!(a == b)) {
                    if (witness)
                        *witness = "face-face commutation fails at n=" + std::to_string(n) +
                                   " k=" + std::to_string(k) + " l=" + std::to_string(l);
                    return false;
                }
            }
        // (c) product-face commutation: cut at k, then a face inside a factor,
        // against face first then cut.
        for (int k = 1; k < n; ++k)
            for (int l = 1; l < n; ++l) {
                if (l == k) continue;
                CubeMap a, b;
                if (l < k) {
                    // face l sits in the left factor [0..k]
                    a = cube_product(cube_face(identity_cube_map(k - 1), l, k),
                                     identity_cube_map(n - k), k, n);
                    b = cube_face(cube_product(identity_cube_map(k - 1),
                                               identity_cube_map(n - k), k - 1, n - 1),
                                  l, n);
                } else {
                    a = cube_product(identity_cube_map(k),
                                     cube_face(identity_cube_map(n - k - 1), l - k, n - k), k, n);
                    b = cube_face(cube_product(identity_cube_map(k),
                                               identity_cube_map(n - k - 1), k, n - 1),
                                  l, n);
                }
                if (!(a == b)) {
                    if (witness)
                        *witness = "product-face commutation fails at n=" + std::to_string(n) +
                                   " k=" + std::to_string(k) + " l=" + std::to_string(l);
                    return false;
                }
            }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Orientation lines o_sigma = (x)^{dim-1} o_R (dual o_R for vertices), with
// the boundary signs computed from the cube coordinates by wedge reordering:
// at b_k = oo the outward direction is +b_k, at b_k = 0 it is -b_k, and the
// boundary orientation convention is "outward normal first".

// sign of the boundary map o_sigma -> o_{[0..k]} (x) o_{[k..n]} at b_k = oo
inline int simplex_flow_product_sign(int n, int k) {
    if (k < 1 || k > n - 1) throw error("product sign: cut out of range");
    // move b_k to the front of b_1 ^ ... ^ b_{n-1}: k-1 transpositions;
    // outward normal is +b_k.
    return (k - 1) % 2 == 0 ? 1 : -1;
}

// sign of the boundary map o_sigma -> o_{[0..^k..n]} at b_k = 0
inline int simplex_flow_face_sign(int n, int k) {
    if (k < 1 || k > n - 1) throw error("face sign: position out of range");
    // outward normal is -b_k: one extra sign on top of the reordering
    return (k - 1) % 2 == 0 ? -1 : 1;
}

// ---------------------------------------------------------------------------
// Stock flow category fixtures.

struct MorseSimplexFlow {
    FlowCategoryFixture fixture;
    // per simplex of the base: flow cube dimension (dim sigma - 1)
    std::map<std::pair<int, std::size_t>, int> cube_dimension;
    // Morse indices of the function on |Delta^n| (metadata: index of vertex i
    // is n - i; the generators themselves sit in a single grading)
    std::vector<int> morse_index;
};

// One generator over each vertex of Delta^n; the flow spaces are the cubes of
// the standard Morse function, and the vdim-zero triples are the edges, each
// contributing a single positively oriented flow line.
inline MorseSimplexFlow morse_simplex_flow(int n, GroundRing ring = GroundRing::rationals()) {
    if (n < 0) throw error("morse_simplex_flow: n >= 0 required");
    MorseSimplexFlow out;
    out.fixture.base = SemisimplicialSet::standard_simplex(n);
    out.fixture.ring = ring;
    out.fixture.generators.per_vertex.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        out.fixture.generators.per_vertex[i] = {Generator{"v" + std::to_string(i), 0, 0}};
        out.morse_index.push_back(n - i);
    }
    for (int dim = 0; dim <= out.fixture.base.top_dimension(); ++dim)
        for (std::size_t id = 0; id < out.fixture.base.count(dim); ++id) {
            out.cube_dimension[{dim, id}] = std::max(0, dim - 1);
            if (dim == 1) out.fixture.counts[TripleKey{1, id, 0, 0}] = 1;
        }
    return out;
}

// Cochain-model Morse fixtures over a point: generators are the simplices of
// a triangulated manifold with gr = a = dimension; the counts are the
// coboundary incidences.  The hexagon gives S^1, the octahedron S^2.
inline FlowCategoryFixture morse_cochain_fixture(const SimplicialComplex& m,
                                                 GroundRing ring = GroundRing::rationals()) {
    FlowCategoryFixture out;
    out.base = SemisimplicialSet::point();
    out.ring = ring;
    auto& gens = out.generators.per_vertex.emplace_back();
    std::map<Simplex, std::size_t> pos;
    for (int k = 0; k <= m.dimension(); ++k)
        for (const auto& s : m.simplices(k)) {
            pos[s] = gens.size();
            gens.push_back(Generator{simplex_name(s), k, Rational(k)});
        }
    for (int k = 1; k <= m.dimension(); ++k)
        for (const auto& s : m.simplices(k))
            for (std::size_t f = 0; f < s.size(); ++f) {
                Simplex face = s;
                face.erase(face.begin() + f);
                out.counts[TripleKey{0, 0, pos[face], pos[s]}] = (f % 2 == 0) ? 1 : -1;
            }
    return out;
}

}  // namespace vfckit
