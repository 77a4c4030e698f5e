#pragma once

#include "vfckit/complex.hpp"
#include "vfckit/shuffle.hpp"

#include <functional>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace vfckit {

// Abstract simplicial complexes in semisimplicial discipline: every simplex is
// a strictly increasing vertex list, face-closed.  Subcomplexes live on the
// same vertex universe, so unions/intersections are plain set operations.
using Simplex = std::vector<int>;

inline std::string simplex_name(const Simplex& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
    return out + "]";
}

class SimplicialComplex {
  public:
    SimplicialComplex() = default;

    explicit SimplicialComplex(int vertex_count, const std::vector<Simplex>& maximal = {})
        : vertices_(vertex_count) {
        for (const auto& s : maximal) insert_with_faces(s);
    }

    static SimplicialComplex full_simplex(int n) {  // Delta^n on vertices 0..n
        SimplicialComplex c(n + 1);
        Simplex top(n + 1);
        for (int i = 0; i <= n; ++i) top[i] = i;
        c.insert_with_faces(top);
        return c;
    }

    static SimplicialComplex boundary_simplex(int n) {  // boundary of Delta^n
        SimplicialComplex c(n + 1);
        for (int skip = 0; skip <= n; ++skip) {
            Simplex f;
            for (int i = 0; i <= n; ++i)
                if (i != skip) f.push_back(i);
            c.insert_with_faces(f);
        }
        return c;
    }

    int vertices() const { return vertices_; }

    void insert_with_faces(const Simplex& s) {
        check_simplex(s);
        // all nonempty subsets, preserving order
        std::size_t n = s.size();
        for (std::size_t mask = 1; mask < (std::size_t(1) << n); ++mask) {
            Simplex f;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::size_t(1) << i)) f.push_back(s[i]);
            simplices_.insert(f);
        }
        index_.clear();
    }

    bool contains(const Simplex& s) const { return simplices_.count(s) > 0; }
    std::size_t size() const { return simplices_.size(); }
    bool empty() const { return simplices_.empty(); }

    int dimension() const {
        int d = -1;
        for (const auto& s : simplices_) d = std::max(d, int(s.size()) - 1);
        return d;
    }

    // Simplices of dimension k in lexicographic order.
    std::vector<Simplex> simplices(int k) const {
        std::vector<Simplex> out;
        for (const auto& s : simplices_)
            if (int(s.size()) == k + 1) out.push_back(s);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<Simplex> all_simplices() const {
        std::vector<Simplex> out(simplices_.begin(), simplices_.end());
        std::sort(out.begin(), out.end(), [](const Simplex& a, const Simplex& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
        return out;
    }

    // Index of a k-simplex within simplices(k).
    std::size_t index_of(const Simplex& s) const {
        build_index();
        auto it = index_.find(s);
        if (it == index_.end()) throw error("unknown simplex " + simplex_name(s));
        return it->second;
    }

    bool is_subcomplex_of(const SimplicialComplex& big) const {
        for (const auto& s : simplices_)
            if (!big.contains(s)) return false;
        return true;
    }

    SimplicialComplex unite(const SimplicialComplex& o) const {
        SimplicialComplex out(std::max(vertices_, o.vertices_));
        out.simplices_ = simplices_;
        out.simplices_.insert(o.simplices_.begin(), o.simplices_.end());
        return out;
    }

    SimplicialComplex intersect(const SimplicialComplex& o) const {
        SimplicialComplex out(std::max(vertices_, o.vertices_));
        for (const auto& s : simplices_)
            if (o.simplices_.count(s)) out.simplices_.insert(s);
        return out;
    }

    bool operator==(const SimplicialComplex& o) const { return simplices_ == o.simplices_; }

    // Closed star of a simplex: all simplices containing it, with their faces.
    SimplicialComplex closed_star(const Simplex& s) const {
        SimplicialComplex out(vertices_);
        for (const auto& t : simplices_)
            if (std::includes(t.begin(), t.end(), s.begin(), s.end())) out.insert_with_faces(t);
        return out;
    }

    // Link: faces of star simplices disjoint from s.
    SimplicialComplex link(const Simplex& s) const {
        SimplicialComplex out(vertices_);
        for (const auto& t : simplices_) {
            if (!std::includes(t.begin(), t.end(), s.begin(), s.end())) continue;
            Simplex rest;
            std::set_difference(t.begin(), t.end(), s.begin(), s.end(), std::back_inserter(rest));
            if (!rest.empty()) out.simplices_.insert(rest);
        }
        return out;
    }

    // Simplices not containing s (the complement of the open star).
    SimplicialComplex star_complement(const Simplex& s) const {
        SimplicialComplex out(vertices_);
        for (const auto& t : simplices_)
            if (!std::includes(t.begin(), t.end(), s.begin(), s.end())) out.simplices_.insert(t);
        return out;
    }

    // Codimension-one faces with exactly one top-dimensional coface, closed
    // under faces: the combinatorial boundary of a pure complex.
    SimplicialComplex combinatorial_boundary() const {
        int n = dimension();
        SimplicialComplex out(vertices_);
        for (const auto& f : simplices(n - 1)) {
            int cofaces = 0;
            for (const auto& t : simplices(n))
                if (std::includes(t.begin(), t.end(), f.begin(), f.end())) ++cofaces;
            if (cofaces == 1) out.insert_with_faces(f);
        }
        return out;
    }

  private:
    void check_simplex(const Simplex& s) const {
        if (s.empty()) throw error("empty simplex");
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            if (s[i] >= s[i + 1])
                throw error("simplex vertices not strictly increasing: " + simplex_name(s));
        if (s.back() >= vertices_ || s.front() < 0)
            throw error("simplex vertex out of range: " + simplex_name(s));
    }

    void build_index() const {
        if (!index_.empty() || simplices_.empty()) return;
        std::map<int, std::size_t> counters;
        for (int k = 0; k <= dimension(); ++k) {
            auto list = simplices(k);
            for (std::size_t i = 0; i < list.size(); ++i) index_[list[i]] = i;
        }
    }

    int vertices_ = 0;
    std::set<Simplex> simplices_;
    mutable std::map<Simplex, std::size_t> index_;
};

struct SimplicialPair {
    SimplicialComplex complex;
    SimplicialComplex subcomplex;

    void validate() const {
        if (!subcomplex.is_subcomplex_of(complex))
            throw error("pair: subcomplex not contained in complex");
    }
};

// Simplicial chains of the pair (X, Y): free on simplices of X not in Y,
// homological degree k stored as cohomological degree -k, boundary with
// alternating face signs (faces inside Y are dropped).
inline ComplexPtr simplicial_chains(const SimplicialPair& p,
                                    GroundRing ring = GroundRing::integers()) {
    p.validate();
    const auto& X = p.complex;
    const auto& Y = p.subcomplex;
    GradedModule mod;
    mod.ring = ring;
    int dim = X.dimension();
    std::map<int, std::vector<Simplex>> gens;
    std::map<Simplex, std::size_t> pos;
    for (int k = 0; k <= dim; ++k) {
        for (const auto& s : X.simplices(k)) {
            if (Y.contains(s)) continue;
            pos[s] = gens[k].size();
            gens[k].push_back(s);
            mod.labels[-k].push_back(simplex_name(s));
        }
        if (!gens[k].empty()) mod.ranks[-k] = gens[k].size();
    }
    std::map<int, ExactMatrix> d;
    for (int k = 1; k <= dim; ++k) {
        if (gens[k].empty() || gens[k - 1].empty()) continue;
        ExactMatrix m(gens[k - 1].size(), gens[k].size(), ring);
        for (std::size_t j = 0; j < gens[k].size(); ++j) {
            const Simplex& s = gens[k][j];
            for (std::size_t f = 0; f < s.size(); ++f) {
                Simplex face = s;
                face.erase(face.begin() + f);
                auto it = pos.find(face);
                if (it == pos.end()) continue;  // face inside Y
                m.at(it->second, j) += (f % 2 == 0) ? 1 : -1;
            }
        }
        if (!m.is_zero()) d[-k] = m;
    }
    return make_complex(std::move(mod), std::move(d), true);
}

inline ComplexPtr simplicial_chains(const SimplicialComplex& x,
                                    GroundRing ring = GroundRing::integers()) {
    return simplicial_chains(SimplicialPair{x, SimplicialComplex(x.vertices())}, ring);
}

inline std::map<int, HomologyGroup> simplicial_homology(const SimplicialComplex& x,
                                                        GroundRing ring = GroundRing::integers()) {
    auto c = simplicial_chains(x, ring);
    std::map<int, HomologyGroup> out;
    for (auto& [deg, h] : c->homology_all()) out[-deg] = h;
    return out;
}

// ---------------------------------------------------------------------------
// Barycentric subdivision.  Vertices of Sd X = simplices of X (ordered: by
// dimension, then lexicographically); simplices of Sd X = strict face chains.
struct Subdivision {
    SimplicialComplex sd;
    std::vector<Simplex> vertex_to_simplex;  // Sd-vertex id -> simplex of X
    std::map<Simplex, int> simplex_to_vertex;

    // The Sd-subcomplex spanned by chains of simplices of a subcomplex K.
    SimplicialComplex image_of(const SimplicialComplex& k) const {
        SimplicialComplex out(sd.vertices());
        for (const auto& chain : sd.all_simplices()) {
            bool inside = true;
            for (int v : chain)
                if (!k.contains(vertex_to_simplex[v])) inside = false;
            if (inside) out.insert_with_faces(chain);
        }
        return out;
    }

    // Full subcomplex on barycenters of simplices NOT in K: a deformation
    // retract of |X| minus |K|.
    SimplicialComplex complement_of(const SimplicialComplex& k) const {
        SimplicialComplex out(sd.vertices());
        for (const auto& chain : sd.all_simplices()) {
            bool outside = true;
            for (int v : chain)
                if (k.contains(vertex_to_simplex[v])) outside = false;
            if (outside) out.insert_with_faces(chain);
        }
        return out;
    }
};

inline Subdivision barycentric_subdivision(const SimplicialComplex& x) {
    Subdivision out;
    auto all = x.all_simplices();
    out.vertex_to_simplex = all;
    for (std::size_t i = 0; i < all.size(); ++i) out.simplex_to_vertex[all[i]] = int(i);
    SimplicialComplex sd(int(all.size()));
    // chains in the face poset
    std::vector<int> chain;
    std::vector<std::vector<int>> chains;
    // enumerate chains by DFS over the poset of simplices ordered by inclusion
    std::function<void(std::size_t)> dfs = [&](std::size_t last) {
        chains.push_back(chain);
        for (std::size_t next = 0; next < all.size(); ++next) {
            if (all[next].size() <= all[last].size()) continue;
            if (!std::includes(all[next].begin(), all[next].end(), all[last].begin(),
                               all[last].end()))
                continue;
            chain.push_back(int(next));
            dfs(next);
            chain.pop_back();
        }
    };
    for (std::size_t s = 0; s < all.size(); ++s) {
        chain = {int(s)};
        dfs(s);
    }
    for (auto& c : chains) {
        Simplex sx(c.begin(), c.end());
        std::sort(sx.begin(), sx.end());
        sd.insert_with_faces(sx);
    }
    out.sd = sd;
    return out;
}

// Relative chains with the complement model: C(Sd X)/C(complement of K), the
// simplicial computation of H(X, X \ K).
inline ComplexPtr local_chains(const Subdivision& sd, const SimplicialComplex& k,
                               GroundRing ring = GroundRing::integers()) {
    return simplicial_chains(SimplicialPair{sd.sd, sd.complement_of(k)}, ring);
}

// ---------------------------------------------------------------------------
// Products: staircase triangulation of |X| x |Y| plus the chain-level
// Eilenberg-Zilber shuffle map.

struct ProductComplex {
    SimplicialComplex complex;
    int y_vertices = 0;
    int vertex(int x, int y) const { return x * y_vertices + y; }
    std::pair<int, int> factors(int v) const { return {v / y_vertices, v % y_vertices}; }
};

inline ProductComplex product_complex(const SimplicialComplex& x, const SimplicialComplex& y) {
    ProductComplex out;
    out.y_vertices = y.vertices();
    SimplicialComplex prod(x.vertices() * y.vertices());
    for (int p = 0; p <= x.dimension(); ++p)
        for (const auto& sx : x.simplices(p))
            for (int q = 0; q <= y.dimension(); ++q)
                for (const auto& sy : y.simplices(q)) {
                    std::vector<std::pair<std::vector<int>, int>> sh;
                    detail::shuffles(std::size_t(p), std::size_t(q), sh);
                    for (auto& [word, sgn] : sh) {
                        Simplex cell;
                        std::size_t ix = 0, iy = 0;
                        cell.push_back(out.vertex(sx[0], sy[0]));
                        for (int w : word) {
                            if (w == 0)
                                ++ix;
                            else
                                ++iy;
                            cell.push_back(out.vertex(sx[ix], sy[iy]));
                        }
                        prod.insert_with_faces(cell);
                    }
                }
    out.complex = prod;
    return out;
}

// EZ map C(X) (x) C(Y) -> C(X x Y) on the staircase triangulation; shuffle
// signs, associative, commutative through the swap.
inline ChainMap ez_product(const SimplicialComplex& x, const SimplicialComplex& y,
                           const ProductComplex& prod, const TensorProduct& tp,
                           const ComplexPtr& cx, const ComplexPtr& cy, const ComplexPtr& cprod) {
    std::map<int, ExactMatrix> comp;
    for (auto& [deg, total] : tp.complex->module().ranks) {
        ExactMatrix m(cprod->rank(deg), total, cx->ring());
        for (auto& [i, ra] : cx->module().ranks) {
            int j = deg - i;
            std::size_t rb = cy->rank(j);
            if (!ra || !rb) continue;
            int p = -i, q = -j;  // homological dimensions
            auto sxs = x.simplices(p);
            auto sys = y.simplices(q);
            std::vector<std::pair<std::vector<int>, int>> sh;
            detail::shuffles(std::size_t(p), std::size_t(q), sh);
            for (std::size_t a = 0; a < sxs.size(); ++a)
                for (std::size_t b = 0; b < sys.size(); ++b)
                    for (auto& [word, sgn] : sh) {
                        Simplex cell;
                        std::size_t ix = 0, iy = 0;
                        cell.push_back(prod.vertex(sxs[a][0], sys[b][0]));
                        bool degenerate = false;
                        for (int w : word) {
                            if (w == 0)
                                ++ix;
                            else
                                ++iy;
                            int v = prod.vertex(sxs[a][ix], sys[b][iy]);
                            if (v <= cell.back()) degenerate = true;
                            cell.push_back(v);
                        }
                        if (degenerate)
                            throw error("ez_product: product cell not increasing; reorder "
                                        "vertices");
                        std::size_t dst = prod.complex.index_of(cell);
                        m.at(dst, tp.index(deg, i, a, b, rb)) += sgn;
                    }
        }
        comp[deg] = m;
    }
    return ChainMap(tp.complex, cprod, std::move(comp), 0, true);
}

// ---------------------------------------------------------------------------
// Stock complexes.

inline SimplicialComplex polygon(int n) {  // an n-gon circle, n >= 3
    SimplicialComplex c(n);
    for (int i = 0; i < n; ++i) {
        int a = i, b = (i + 1) % n;
        if (a > b) std::swap(a, b);
        c.insert_with_faces({a, b});
    }
    return c;
}

inline SimplicialComplex octahedron() {  // boundary of the cross-polytope: S^2
    SimplicialComplex c(6);
    // antipodal pairs (0,1), (2,3), (4,5)
    for (int a : {0, 1})
        for (int b : {2, 3})
            for (int d : {4, 5}) {
                Simplex t{a, b, d};
                std::sort(t.begin(), t.end());
                c.insert_with_faces(t);
            }
    return c;
}

// Grid quotient surfaces: m x n grid of squares split into triangles, with
// column m identified to column 0 (reversed when `flip`), row n to row 0.
// flip = false: torus; flip = true: Klein bottle.
inline SimplicialComplex grid_surface(int m, int n, bool flip) {
    auto vid = [&](int i, int j) {
        // wrap with identifications
        int jj = ((j % n) + n) % n;
        int ii = i;
        if (ii >= m || ii < 0) {
            int wraps = (ii >= m) ? ii / m : -1;
            ii = ((ii % m) + m) % m;
            if (flip && wraps % 2 != 0) jj = ((n - jj) % n + n) % n;
        }
        return ii * n + jj;
    };
    SimplicialComplex c(m * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
            Simplex t1{v00, v10, v11}, t2{v00, v01, v11};
            std::sort(t1.begin(), t1.end());
            std::sort(t2.begin(), t2.end());
            c.insert_with_faces(t1);
            c.insert_with_faces(t2);
        }
    return c;
}

inline SimplicialComplex torus() { return grid_surface(3, 3, false); }
inline SimplicialComplex klein_bottle() { return grid_surface(4, 4, true); }

inline SimplicialComplex projective_plane() {  // 6-vertex RP^2 (icosahedron mod antipodes)
    SimplicialComplex c(6);
    int faces[10][3] = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1},
                        {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}};
    for (auto& f : faces) {
        Simplex t{f[0], f[1], f[2]};
        std::sort(t.begin(), t.end());
        c.insert_with_faces(t);
    }
    return c;
}

inline SimplicialComplex cylinder(int n = 3) {  // S^1 x [0,1], n-gon base
    SimplicialComplex c(2 * n);
    for (int i = 0; i < n; ++i) {
        int a = i, b = (i + 1) % n;
        Simplex t1{a, b, n + b}, t2{a, n + a, n + b};
        std::sort(t1.begin(), t1.end());
        std::sort(t2.begin(), t2.end());
        c.insert_with_faces(t1);
        c.insert_with_faces(t2);
    }
    return c;
}

inline SimplicialComplex moebius_band() {  // minimal 5-vertex Moebius band
    SimplicialComplex c(5);
    int faces[5][3] = {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {0, 3, 4}, {0, 1, 4}};
    for (auto& f : faces) {
        Simplex t{f[0], f[1], f[2]};
        std::sort(t.begin(), t.end());
        c.insert_with_faces(t);
    }
    return c;
}

}  // namespace vfckit
