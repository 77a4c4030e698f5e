#pragma once

#include "vfckit/local_system.hpp"

#include <functional>
#include <map>
#include <vector>

namespace vfckit {

// Finite closed cover of a simplicial base by subcomplexes.
struct ClosedCover {
    SimplicialComplex base;
    std::vector<SimplicialComplex> pieces;

    void validate() const {
        SimplicialComplex u(base.vertices());
        for (const auto& p : pieces) {
            if (!p.is_subcomplex_of(base)) throw error("cover piece is not a subcomplex");
            u = u.unite(p);
        }
        if (!(u == base)) throw error("cover pieces do not cover the base");
    }

    SimplicialComplex intersection(const std::vector<std::size_t>& idx) const {
        if (idx.empty()) return base;
        SimplicialComplex out = pieces.at(idx[0]);
        for (std::size_t i = 1; i < idx.size(); ++i) out = out.intersect(pieces.at(idx[i]));
        return out;
    }

    // Index tuples with nonempty intersection (faces of such tuples are again
    // nonempty, so they support the whole Cech complex).
    std::vector<std::vector<std::size_t>> nonempty_tuples() const {
        std::vector<std::vector<std::size_t>> out;
        std::vector<std::size_t> cur;
        std::function<void(std::size_t)> gen = [&](std::size_t start) {
            for (std::size_t i = start; i < pieces.size(); ++i) {
                cur.push_back(i);
                if (!intersection(cur).empty()) {
                    out.push_back(cur);
                    gen(i + 1);
                }
                cur.pop_back();
            }
        };
        gen(0);
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
        return out;
    }
};

// Functorial assignment on cover intersections: a complex per index tuple and
// a restriction map F(S) -> F(S') whenever S is a subset of S' (so the
// intersection shrinks).  Tuples are sorted index vectors.
struct CechAssignment {
    std::map<std::vector<std::size_t>, ComplexPtr> value;
    std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, ChainMap> restriction;

    const ComplexPtr& at(const std::vector<std::size_t>& s) const {
        auto it = value.find(s);
        if (it == value.end()) throw error("cech assignment: missing tuple");
        return it->second;
    }

    ChainMap restrict_map(const std::vector<std::size_t>& from,
                          const std::vector<std::size_t>& to) const {
        if (from == to) return ChainMap::identity(at(from));
        auto it = restriction.find({from, to});
        if (it == restriction.end()) throw error("cech assignment: missing restriction");
        return it->second;
    }

    // Functoriality: insertions compose consistently on the given tuples.
    void validate(const std::vector<std::vector<std::size_t>>& tuples) const {
        for (const auto& a : tuples)
            for (const auto& b : tuples) {
                if (a.size() >= b.size()) continue;
                if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) continue;
                for (const auto& m : tuples) {
                    if (m.size() <= a.size() || m.size() >= b.size()) continue;
                    if (!std::includes(m.begin(), m.end(), a.begin(), a.end())) continue;
                    if (!std::includes(b.begin(), b.end(), m.begin(), m.end())) continue;
                    ChainMap two = restrict_map(m, b).compose(restrict_map(a, m));
                    ChainMap one = restrict_map(a, b);
                    for (auto& [deg, r] : one.source()->module().ranks)
                        if (two.at(deg) != one.at(deg))
                            throw error("cech assignment not functorial");
                }
            }
    }
};

// Number of connected components of a complex (isolated vertices included if
// they carry a 0-simplex).
inline std::vector<int> vertex_components(const SimplicialComplex& k) {
    std::vector<int> comp(k.vertices(), -1);
    auto verts = k.simplices(0);
    int c = 0;
    for (const auto& v : verts) {
        if (comp[v[0]] != -1) continue;
        // BFS over edges
        std::vector<int> stack{v[0]};
        comp[v[0]] = c;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (const auto& e : k.simplices(1)) {
                int other = -1;
                if (e[0] == x) other = e[1];
                if (e[1] == x) other = e[0];
                if (other >= 0 && comp[other] == -1) {
                    comp[other] = c;
                    stack.push_back(other);
                }
            }
        }
        ++c;
    }
    return comp;
}

inline std::size_t component_count(const SimplicialComplex& k) {
    int m = -1;
    for (int c : vertex_components(k)) m = std::max(m, c);
    return std::size_t(m + 1);
}

// The constant sheaf R on the base: sections over K are R^{components(K)};
// restrictions send the value on a component to its sub-components.
inline CechAssignment constant_sheaf_assignment(const ClosedCover& cover,
                                                GroundRing ring = GroundRing::integers()) {
    CechAssignment out;
    auto tuples = cover.nonempty_tuples();
    std::map<std::vector<std::size_t>, std::vector<int>> comps;
    std::map<std::vector<std::size_t>, std::size_t> count;
    for (auto& t : tuples) {
        auto K = cover.intersection(t);
        comps[t] = vertex_components(K);
        count[t] = component_count(K);
        GradedModule mod{ring, {}, 0, {}};
        if (count[t]) mod.ranks[0] = count[t];
        out.value[t] = make_complex(std::move(mod), {});
    }
    for (auto& a : tuples)
        for (auto& b : tuples) {
            if (a.size() >= b.size()) continue;
            if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) continue;
            ExactMatrix m(count[b], count[a], ring);
            // component of the smaller intersection lands in a component of
            // the bigger one; match via any vertex
            for (int v = 0; v < cover.base.vertices(); ++v) {
                int cb = comps[b][v], ca = comps[a][v];
                if (cb >= 0 && ca >= 0) m.at(cb, ca) = 1;
            }
            std::map<int, ExactMatrix> comp;
            if (count[b] && count[a]) comp[0] = m;
            out.restriction[{a, b}] = ChainMap(out.value[a], out.value[b], std::move(comp));
        }
    return out;
}

// The K-presheaf of relative chains K |-> C(Sd(base)) / C(complement of K):
// the homotopy K-sheaf computing H(|base|, |base| - K).
inline CechAssignment relative_chain_assignment(const ClosedCover& cover, const Subdivision& sd,
                                                GroundRing ring = GroundRing::integers()) {
    CechAssignment out;
    auto tuples = cover.nonempty_tuples();
    std::map<std::vector<std::size_t>, SimplicialComplex> comp_complex;
    for (auto& t : tuples) {
        auto K = cover.intersection(t);
        comp_complex[t] = sd.complement_of(K);
        out.value[t] = simplicial_chains(SimplicialPair{sd.sd, comp_complex[t]}, ring);
    }
    for (auto& a : tuples)
        for (auto& b : tuples) {
            if (a.size() >= b.size()) continue;
            if (!std::includes(b.begin(), b.end(), a.begin(), a.end())) continue;
            // quotient further: generators surviving in b are a subset
            std::map<int, ExactMatrix> comp;
            const auto& A = out.value[a];
            const auto& B = out.value[b];
            for (auto& [deg, r] : A->module().ranks) {
                int k = -deg;
                ExactMatrix m(B->rank(deg), r, ring);
                std::size_t col = 0;
                std::map<Simplex, std::size_t> bpos;
                std::size_t brow = 0;
                for (const auto& s : sd.sd.simplices(k))
                    if (!comp_complex[b].contains(s)) bpos[s] = brow++;
                for (const auto& s : sd.sd.simplices(k)) {
                    if (comp_complex[a].contains(s)) continue;
                    auto it = bpos.find(s);
                    if (it != bpos.end()) m.at(it->second, col) = 1;
                    ++col;
                }
                comp[deg] = m;
            }
            out.restriction[{a, b}] = ChainMap(A, B, std::move(comp));
        }
    return out;
}

// Cech (hyper)complex of a finite closed cover with coefficients in a
// functorial assignment: (+)_{p} (+)_{i_0 < ... < i_p} F^{.-p}(K_{i_0...i_p}),
// Cech faces unsigned-alternating into inserted indices, internal
// differential with (-1)^p.
struct CechComplexResult {
    ComplexPtr complex;
    std::vector<std::vector<std::size_t>> tuples;
    std::map<std::pair<std::size_t, int>, std::size_t> offset;  // (tuple idx, degree)

    std::size_t tuple_index(const std::vector<std::size_t>& t) const {
        for (std::size_t i = 0; i < tuples.size(); ++i)
            if (tuples[i] == t) return i;
        throw error("cech: unknown tuple");
    }
};

inline CechComplexResult cech_complex(const ClosedCover& cover, const CechAssignment& F) {
    cover.validate();
    CechComplexResult out;
    out.tuples = cover.nonempty_tuples();
    if (out.tuples.empty()) {
        out.complex = zero_complex();
        return out;
    }
    F.validate(out.tuples);
    GroundRing ring = F.at(out.tuples[0])->ring();
    GradedModule mod;
    mod.ring = ring;
    mod.parity_offset = F.at(out.tuples[0])->module().parity_offset;
    int lo = 0, hi = 0;
    bool first = true;
    for (auto& t : out.tuples) {
        const auto& A = F.at(t);
        if (A->module().ranks.empty()) continue;
        int p = int(t.size()) - 1;
        if (first || A->min_degree() + p < lo) lo = A->min_degree() + p;
        if (first || A->max_degree() + p > hi) hi = A->max_degree() + p;
        first = false;
    }
    for (int deg = lo; deg <= hi; ++deg) {
        std::size_t total = 0;
        for (std::size_t ti = 0; ti < out.tuples.size(); ++ti) {
            int p = int(out.tuples[ti].size()) - 1;
            std::size_t r = F.at(out.tuples[ti])->rank(deg - p);
            if (!r) continue;
            out.offset[{ti, deg}] = total;
            total += r;
        }
        if (total) mod.ranks[deg] = total;
    }
    std::map<int, ExactMatrix> d;
    for (int deg = lo; deg < hi + 1; ++deg) {
        if (!mod.rank(deg) || !mod.rank(deg + 1)) continue;
        ExactMatrix m(mod.rank(deg + 1), mod.rank(deg), ring);
        // Cech part: for each (p+1)-tuple b and deleted position j, column
        // from the p-tuple a = b minus j with sign (-1)^j and restriction.
        for (std::size_t bi = 0; bi < out.tuples.size(); ++bi) {
            auto& b = out.tuples[bi];
            if (b.size() < 2) continue;
            if (!out.offset.count({bi, deg + 1})) continue;
            int pb = int(b.size()) - 1;
            for (std::size_t j = 0; j < b.size(); ++j) {
                std::vector<std::size_t> a = b;
                a.erase(a.begin() + j);
                std::size_t ai = out.tuple_index(a);
                if (!out.offset.count({ai, deg})) continue;
                ChainMap r = F.restrict_map(a, b);
                put_block(m, out.offset.at({bi, deg + 1}), out.offset.at({ai, deg}),
                          r.at(deg - (pb - 1)), (j % 2 == 0) ? 1 : -1);
            }
        }
        // internal with (-1)^p
        for (std::size_t ti = 0; ti < out.tuples.size(); ++ti) {
            int p = int(out.tuples[ti].size()) - 1;
            if (!out.offset.count({ti, deg}) || !out.offset.count({ti, deg + 1})) continue;
            put_block(m, out.offset.at({ti, deg + 1}), out.offset.at({ti, deg}),
                      F.at(out.tuples[ti])->d(deg - p), (p % 2 == 0) ? 1 : -1);
        }
        if (!m.is_zero()) d[deg] = m;
    }
    out.complex = make_complex(std::move(mod), std::move(d), true);
    return out;
}

// Mayer-Vietoris acyclicity (hSh_K2): the total complex
// [F(K1 u K2) -> F(K1) (+) F(K2) -> F(K1 n K2)] is acyclic for the relative
// chain assignment; returns the verdict for an arbitrary assignment given by
// four complexes and restrictions.
struct MayerVietorisData {
    ComplexPtr on_union, on_first, on_second, on_intersection;
    ChainMap union_to_first, union_to_second, first_to_intersection, second_to_intersection;
};

inline bool mayer_vietoris_acyclic(const MayerVietorisData& mv) {
    auto sum = direct_sum(mv.on_first, mv.on_second);
    std::map<int, ExactMatrix> c1, c2;
    for (auto& [deg, r] : mv.on_union->module().ranks) {
        ExactMatrix m(sum->rank(deg), r, sum->ring());
        put_block(m, 0, 0, mv.union_to_first.at(deg));
        put_block(m, mv.on_first->rank(deg), 0, mv.union_to_second.at(deg));
        c1[deg] = m;
    }
    for (auto& [deg, r] : sum->module().ranks) {
        ExactMatrix m(mv.on_intersection->rank(deg), r, sum->ring());
        put_block(m, 0, 0, mv.first_to_intersection.at(deg));
        put_block(m, 0, mv.on_first->rank(deg), mv.second_to_intersection.at(deg), -1);
        c2[deg] = m;
    }
    ChainMap f1(mv.on_union, sum, std::move(c1));
    ChainMap f2(sum, mv.on_intersection, std::move(c2));
    return total_complex({f1, f2})->acyclic();
}

// The spec's operation for relative simplicial chains on a manifold fixture.
inline bool mayer_vietoris_check(const SimplicialComplex& base, const Subdivision& sd,
                                 const SimplicialComplex& k1, const SimplicialComplex& k2,
                                 GroundRing ring = GroundRing::integers()) {
    ClosedCover cover{base, {k1, k2}};
    MayerVietorisData mv;
    auto u = k1.unite(k2);
    auto i = k1.intersect(k2);
    auto cu = sd.complement_of(u), ci = sd.complement_of(i);
    auto c1 = sd.complement_of(k1), c2 = sd.complement_of(k2);
    mv.on_union = simplicial_chains(SimplicialPair{sd.sd, cu}, ring);
    mv.on_first = simplicial_chains(SimplicialPair{sd.sd, c1}, ring);
    mv.on_second = simplicial_chains(SimplicialPair{sd.sd, c2}, ring);
    mv.on_intersection = simplicial_chains(SimplicialPair{sd.sd, ci}, ring);
    auto projection = [&](const ComplexPtr& A, const SimplicialComplex& compA,
                          const ComplexPtr& B, const SimplicialComplex& compB) {
        std::map<int, ExactMatrix> comp;
        for (auto& [deg, r] : A->module().ranks) {
            int kk = -deg;
            ExactMatrix m(B->rank(deg), r, ring);
            std::map<Simplex, std::size_t> bpos;
            std::size_t brow = 0;
            for (const auto& s : sd.sd.simplices(kk))
                if (!compB.contains(s)) bpos[s] = brow++;
            std::size_t col = 0;
            for (const auto& s : sd.sd.simplices(kk)) {
                if (compA.contains(s)) continue;
                auto it = bpos.find(s);
                if (it != bpos.end()) m.at(it->second, col) = 1;
                ++col;
            }
            comp[deg] = m;
        }
        return ChainMap(A, B, std::move(comp));
    };
    mv.union_to_first = projection(mv.on_union, cu, mv.on_first, c1);
    mv.union_to_second = projection(mv.on_union, cu, mv.on_second, c2);
    mv.first_to_intersection = projection(mv.on_first, c1, mv.on_intersection, ci);
    mv.second_to_intersection = projection(mv.on_second, c2, mv.on_intersection, ci);
    return mayer_vietoris_acyclic(mv);
}

// Cech cohomology of the constant sheaf on a closed cover.
inline std::map<int, HomologyGroup> cech_cohomology_constant(const ClosedCover& cover,
                                                             GroundRing ring
                                                             = GroundRing::integers()) {
    auto F = constant_sheaf_assignment(cover, ring);
    auto c = cech_complex(cover, F);
    return c.complex->homology_all();
}

// Dual-cell cover: the closed stars, inside the barycentric subdivision, of
// the barycenters of the original vertices.  Intersections are the closed
// dual cells of simplices (contractible), and the nerve is the original
// complex, so this is a good closed cover.
inline ClosedCover dual_cell_cover(const SimplicialComplex& k, const Subdivision& sd) {
    ClosedCover out;
    out.base = sd.sd;
    for (const auto& v : k.simplices(0))
        out.pieces.push_back(sd.sd.closed_star({sd.simplex_to_vertex.at(v)}));
    return out;
}

}  // namespace vfckit
