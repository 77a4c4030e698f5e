#pragma once

#include "vfckit/duality.hpp"
#include "vfckit/poset.hpp"

#include <map>
#include <string>
#include <vector>

namespace vfckit {

// Stratification of a complex: a poset label per simplex, lower semicontinuous
// (faces sit in lower-or-equal strata), with declared stratum dimensions.
struct Stratification {
    FinitePoset poset;
    std::vector<int> dim;                       // per poset element
    std::map<Simplex, std::size_t> stratum_of;  // per simplex
    std::vector<char> in_boundary;              // optional: stratum in dS (downward closed)

    std::size_t stratum(const Simplex& s) const {
        auto it = stratum_of.find(s);
        if (it == stratum_of.end()) throw error("stratification: unlabeled simplex " + simplex_name(s));
        return it->second;
    }

    void validate(const SimplicialComplex& m) const {
        if (dim.size() != poset.size()) throw error("stratification: dim table size mismatch");
        for (const auto& s : m.all_simplices()) (void)stratum(s);
        for (const auto& s : m.all_simplices())
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                if (s.size() == 1) continue;
                Simplex f = s;
                f.erase(f.begin() + drop);
                if (!poset.leq(stratum(f), stratum(s)))
                    throw error("stratification not lower semicontinuous at " + simplex_name(f) +
                                " < " + simplex_name(s));
            }
        if (!in_boundary.empty()) {
            if (in_boundary.size() != poset.size())
                throw error("stratification: boundary table size mismatch");
            for (std::size_t a = 0; a < poset.size(); ++a)
                for (std::size_t b = 0; b < poset.size(); ++b)
                    if (in_boundary[b] && poset.leq(a, b) && !in_boundary[a])
                        throw error("stratification: dS not downward closed");
        }
    }

    SimplicialComplex closed_stratum(const SimplicialComplex& m, std::size_t s) const {
        SimplicialComplex out(m.vertices());
        for (const auto& t : m.all_simplices())
            if (poset.leq(stratum(t), s)) out.insert_with_faces(t);
        return out;
    }

    SimplicialComplex open_part_below(const SimplicialComplex& m, std::size_t s) const {
        SimplicialComplex out(m.vertices());
        for (const auto& t : m.all_simplices())
            if (poset.leq(stratum(t), s) && stratum(t) != s) out.insert_with_faces(t);
        return out;
    }

    // One stratum covering everything.
    static Stratification trivial(const SimplicialComplex& m) {
        Stratification out;
        out.poset = FinitePoset(1, {});
        out.dim = {m.dimension()};
        for (const auto& s : m.all_simplices()) out.stratum_of[s] = 0;
        return out;
    }

    // Strata = face poset of the complex itself (Example: triangulations give
    // cell-like stratifications).
    static Stratification by_faces(const SimplicialComplex& m) {
        Stratification out;
        auto all = m.all_simplices();
        std::vector<std::pair<int, int>> rel;
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = 0; j < all.size(); ++j)
                if (i != j &&
                    std::includes(all[j].begin(), all[j].end(), all[i].begin(), all[i].end()))
                    rel.push_back({int(i), int(j)});
        out.poset = FinitePoset(all.size(), std::move(rel));
        for (std::size_t i = 0; i < all.size(); ++i) {
            out.dim.push_back(int(all[i].size()) - 1);
            out.stratum_of[all[i]] = i;
        }
        return out;
    }
};

struct CellLikeReport {
    bool cell_like = false;
    std::string failure;
    // local structure conclusions, when cell_like
    bool codim0_open = false;
    bool interior_codim1_two_cofaces = false;
    bool boundary_codim1_one_coface = false;
};

// Cell-like: each pair (M^{<=s}, M^{<s}) is a manifold with that exact
// boundary, of the declared dimension.
inline CellLikeReport cell_like_check(const SimplicialComplex& m, const Stratification& st) {
    CellLikeReport out;
    st.validate(m);
    for (std::size_t s = 0; s < st.poset.size(); ++s) {
        auto closed = st.closed_stratum(m, s);
        if (closed.empty()) continue;
        auto below = st.open_part_below(m, s);
        if (closed.dimension() != st.dim[s]) {
            out.failure = "stratum " + st.poset.name(s) + " has dimension " +
                          std::to_string(closed.dimension()) + ", declared " +
                          std::to_string(st.dim[s]);
            return out;
        }
        auto mc = manifold_check(closed);
        if (!mc.ok) {
            out.failure = "closed stratum " + st.poset.name(s) + " is not a manifold at " +
                          mc.offending;
            return out;
        }
        if (!(mc.boundary == below)) {
            out.failure = "boundary of closed stratum " + st.poset.name(s) +
                          " differs from the union of lower strata";
            return out;
        }
    }
    out.cell_like = true;
    return out;
}

// Lemma on local structure of cell-like stratifications, conclusions checked
// combinatorially: codimension-zero strata are open; interior codimension-one
// strata see exactly two strata above (a collar on each side), boundary ones
// exactly one.
inline CellLikeReport cell_like_local_structure_check(const SimplicialComplex& m,
                                                      const Stratification& st) {
    CellLikeReport out = cell_like_check(m, st);
    if (!out.cell_like) return out;
    int n = m.dimension();
    auto nonempty = [&](std::size_t s) { return !st.closed_stratum(m, s).empty(); };
    out.codim0_open = true;
    out.interior_codim1_two_cofaces = true;
    out.boundary_codim1_one_coface = true;
    auto boundary = m.combinatorial_boundary();
    for (std::size_t s = 0; s < st.poset.size(); ++s) {
        if (!nonempty(s)) continue;
        if (st.dim[s] > n) {
            out.cell_like = false;
            out.failure = "stratum above the ambient dimension";
            return out;
        }
        if (st.dim[s] == n) {
            // openness: every coface of a stratum-s simplex is again in s
            for (const auto& t : m.all_simplices()) {
                if (st.stratum(t) != s) continue;
                for (const auto& coface : m.all_simplices()) {
                    if (coface.size() <= t.size()) continue;
                    if (!std::includes(coface.begin(), coface.end(), t.begin(), t.end()))
                        continue;
                    if (st.stratum(coface) != s) out.codim0_open = false;
                }
            }
        }
        if (st.dim[s] == n - 1) {
            std::size_t above = 0;
            for (std::size_t t = 0; t < st.poset.size(); ++t)
                if (st.poset.less(s, t) && nonempty(t)) ++above;
            bool is_bd = !st.in_boundary.empty() && st.in_boundary[s];
            if (st.in_boundary.empty()) {
                // infer: stratum lies in the combinatorial boundary of m
                is_bd = true;
                for (const auto& t : m.all_simplices())
                    if (st.stratum(t) == s && !boundary.contains(t)) is_bd = false;
            }
            if (is_bd && above != 1) out.boundary_codim1_one_coface = false;
            if (!is_bd && above != 2) out.interior_codim1_two_cofaces = false;
            if (!is_bd) {
                // the two cofaces really collar: every (n-1)-simplex of the
                // stratum has exactly two n-cofacets in distinct strata
                for (const auto& f : m.simplices(n - 1)) {
                    if (st.stratum(f) != s) continue;
                    std::vector<std::size_t> seen;
                    for (const auto& t : m.simplices(n))
                        if (std::includes(t.begin(), t.end(), f.begin(), f.end()))
                            seen.push_back(st.stratum(t));
                    if (seen.size() != 2 || seen[0] == seen[1])
                        out.interior_codim1_two_cofaces = false;
                }
            }
        }
    }
    out.cell_like = out.codim0_open && out.interior_codim1_two_cofaces &&
                    out.boundary_codim1_one_coface;
    if (!out.cell_like && out.failure.empty()) out.failure = "local structure conclusions failed";
    return out;
}

// ---------------------------------------------------------------------------
// The stratified chain model: C(M;S) = (+)_s C_{.-(dim M - dim s)}(M^{<=s};
// o_M (x) o_{M^{<=s}}^dual) with codimension-one pushforwards, and the
// comparison map to C(M) summing the top-dimensional strata.

struct StratifiedChains {
    ComplexPtr complex;
    ComplexPtr target;          // cone [chains(dM) -> chains(M)^{.-1}], vir grading
    ChainMap comparison;
    bool comparison_quasi_iso = false;
    // block bookkeeping: (stratum, simplex dim) -> column offset per degree
    std::map<std::pair<std::size_t, int>, std::size_t> offset;
};

// A stratum counts as a boundary stratum when declared so, or (when no dS was
// supplied) when all its simplices lie in the combinatorial boundary.
inline bool stratum_in_boundary(const Stratification& st, const SimplicialComplex& boundary,
                                const SimplicialComplex& m, std::size_t s) {
    if (!st.in_boundary.empty()) return st.in_boundary[s] != 0;
    bool any = false;
    for (const auto& t : m.all_simplices()) {
        if (st.stratum(t) != s) continue;
        any = true;
        if (!boundary.contains(t)) return false;
    }
    return any;
}

namespace detail {

// Sign relating two orientation stalks at a shared simplex by comparing the
// generators on the common alive set (top degree: classes are equal on the
// nose, so the ratio is forced).
inline int stalk_ratio(const std::vector<Simplex>& tops_small,
                       const std::vector<Rational>& gen_small,
                       const std::vector<Simplex>& tops_big,
                       const std::vector<Rational>& gen_big) {
    Rational lambda = 0;
    for (std::size_t j = 0; j < tops_small.size(); ++j) {
        auto it = std::find(tops_big.begin(), tops_big.end(), tops_small[j]);
        if (it == tops_big.end()) continue;
        if (gen_small[j] == 0) continue;
        Rational ratio = gen_big[it - tops_big.begin()] / gen_small[j];
        if (lambda == 0)
            lambda = ratio;
        else if (lambda != ratio)
            throw error("stalk comparison not well defined");
    }
    if (lambda != 1 && lambda != -1) throw error("stalk comparison not a unit");
    return lambda == 1 ? 1 : -1;
}

}  // namespace detail

// Orientation stalk data of a complex with boundary killed, re-exposed for
// stratified gluing.
struct StalkTable {
    SimplicialComplex base;
    SimplicialComplex boundary;
    int dim = 0;
    std::map<Simplex, std::vector<Simplex>> alive;
    std::map<Simplex, std::vector<Rational>> gen;

    static StalkTable compute(const SimplicialComplex& m) {
        StalkTable out;
        out.base = m;
        out.boundary = m.combinatorial_boundary();
        out.dim = m.dimension();
        for (const auto& s : m.all_simplices()) {
            auto comp = m.star_complement(s).unite(out.boundary);
            auto pair = SimplicialPair{m, comp};
            auto c = simplicial_chains(pair);
            auto ker = kernel_basis(c->d(-out.dim));
            if (ker.size() != 1)
                throw error("stalk table: not a manifold at " + simplex_name(s));
            std::vector<Simplex> tops;
            for (const auto& t : m.simplices(out.dim))
                if (!comp.contains(t)) tops.push_back(t);
            auto cyc = ker[0];
            for (auto& x : cyc) {
                if (x == 0) continue;
                if (x < 0)
                    for (auto& y : cyc) y = -y;
                break;
            }
            out.alive[s] = std::move(tops);
            out.gen[s] = std::move(cyc);
        }
        return out;
    }

    // Boundary orientation map at a boundary simplex: project the boundary of
    // the stalk generator to the alive set of the boundary manifold's table.
    int boundary_sign(const Simplex& s, const StalkTable& bd_table) const {
        const auto& tops = alive.at(s);
        const auto& g = gen.at(s);
        // boundary of the generator as a chain on (dim-1)-simplices
        std::map<Simplex, Rational> bchain;
        for (std::size_t i = 0; i < tops.size(); ++i) {
            if (g[i] == 0) continue;
            for (std::size_t f = 0; f < tops[i].size(); ++f) {
                Simplex face = tops[i];
                face.erase(face.begin() + f);
                bchain[face] += ((f % 2 == 0) ? 1 : -1) * g[i];
            }
        }
        const auto& btops = bd_table.alive.at(s);
        const auto& bgen = bd_table.gen.at(s);
        Rational lambda = 0;
        for (std::size_t j = 0; j < btops.size(); ++j) {
            auto it = bchain.find(btops[j]);
            Rational val = it == bchain.end() ? Rational(0) : it->second;
            if (bgen[j] == 0) throw error("boundary stalk degenerate");
            Rational ratio = val / bgen[j];
            if (lambda == 0)
                lambda = ratio;
            else if (lambda != ratio)
                throw error("boundary orientation not well defined at " + simplex_name(s));
        }
        if (lambda != 1 && lambda != -1)
            throw error("boundary orientation not a unit at " + simplex_name(s));
        return lambda == 1 ? 1 : -1;
    }
};

// Grading follows the virtual convention: a k-simplex of the closed stratum
// of dimension d_s sits in degree d_s - k, so codimension-one pushforwards
// have degree one.  Pushforward terms carry a Koszul sign (-1)^{deg} because
// the coboundary maps of the orientation lines are odd.  The comparison map
// lands in the cone [chains(dM) -> chains(M)^{.-1}] (plain chains of M when
// dM is empty), the transverse model of the full virtual cochain complex.
inline StratifiedChains stratified_chains(const SimplicialComplex& m, const Stratification& st,
                                          GroundRing ring = GroundRing::integers()) {
    auto cl = cell_like_check(m, st);
    if (!cl.cell_like) throw error("stratified_chains: not cell-like: " + cl.failure);
    int n = m.dimension();
    StalkTable ambient = StalkTable::compute(m);
    auto mboundary = m.combinatorial_boundary();
    std::vector<SimplicialComplex> closed(st.poset.size(), SimplicialComplex(0));
    std::map<std::size_t, StalkTable> tables;
    std::map<std::size_t, FacePairSystem> twists;
    for (std::size_t s = 0; s < st.poset.size(); ++s) {
        closed[s] = st.closed_stratum(m, s);
        if (closed[s].empty()) continue;
        tables.emplace(s, StalkTable::compute(closed[s]));
        FacePairSystem tw(closed[s]);
        const auto& tb = tables.at(s);
        for (const auto& sx : closed[s].all_simplices())
            for (std::size_t drop = 0; drop < sx.size(); ++drop) {
                if (sx.size() == 1) continue;
                Simplex f = sx;
                f.erase(f.begin() + drop);
                int t_m = detail::stalk_ratio(ambient.alive.at(sx), ambient.gen.at(sx),
                                              ambient.alive.at(f), ambient.gen.at(f));
                int t_s = detail::stalk_ratio(tb.alive.at(sx), tb.gen.at(sx), tb.alive.at(f),
                                              tb.gen.at(f));
                tw.set(f, sx, t_m * t_s);
            }
        std::string witness;
        if (!tw.flat(&witness)) throw error("stratified twist not flat: " + witness);
        twists.emplace(s, std::move(tw));
    }
    GradedModule mod;
    mod.ring = ring;
    StratifiedChains out;
    std::map<std::pair<std::size_t, Simplex>, std::pair<int, std::size_t>> gen_pos;
    for (int deg = -n; deg <= n + 1; ++deg) {
        std::size_t total = 0;
        for (std::size_t s = 0; s < st.poset.size(); ++s) {
            if (closed[s].empty()) continue;
            int k = st.dim[s] - deg;  // simplex dimension in this block
            if (k < 0 || k > st.dim[s]) continue;
            auto sims = closed[s].simplices(k);
            if (sims.empty()) continue;
            out.offset[{s, k}] = total;
            for (const auto& sx : sims) {
                gen_pos[{s, sx}] = {deg, total};
                mod.labels[deg].push_back("s" + std::to_string(s) + ":" + simplex_name(sx));
                ++total;
            }
        }
        if (total) mod.ranks[deg] = total;
    }
    std::map<int, ExactMatrix> d;
    for (int deg = -n; deg < n + 1; ++deg) {
        if (!mod.rank(deg) || !mod.rank(deg + 1)) continue;
        ExactMatrix dm(mod.rank(deg + 1), mod.rank(deg), ring);
        for (auto& [key, pos] : gen_pos) {
            if (pos.first != deg) continue;
            auto& [s, sx] = key;
            // internal twisted boundary within the stratum block
            for (std::size_t f = 0; f < sx.size(); ++f) {
                if (sx.size() == 1) break;
                Simplex face = sx;
                face.erase(face.begin() + f);
                auto it = gen_pos.find({s, face});
                if (it == gen_pos.end()) continue;
                int sgn = ((f % 2 == 0) ? 1 : -1) * twists.at(s).sign(face, sx);
                dm.at(it->second.second, pos.second) += sgn;
            }
            // codim-1 pushforwards with the odd-coboundary Koszul sign
            for (std::size_t t = 0; t < st.poset.size(); ++t) {
                if (!st.poset.less(s, t) || closed[t].empty()) continue;
                if (st.dim[t] != st.dim[s] + 1) continue;
                auto it = gen_pos.find({t, sx});
                if (it == gen_pos.end()) continue;
                int b = tables.at(t).boundary_sign(sx, tables.at(s));
                int koszul = (deg % 2 == 0) ? 1 : -1;
                dm.at(it->second.second, pos.second) += b * koszul;
            }
        }
        if (!dm.is_zero()) d[deg] = dm;
    }
    out.complex = make_complex(std::move(mod), std::move(d), true);

    // target: cone [chains(dM) -> chains(M)^{.-1}] in the virtual grading
    auto chains_m = shift(simplicial_chains(m, ring), -(n - 1));
    ComplexPtr acx;
    ChainMap inc;
    if (mboundary.empty()) {
        acx = zero_complex(ring);
        inc = ChainMap::zero(acx, chains_m);
    } else {
        acx = shift(simplicial_chains(mboundary, ring), -(n - 1));
        std::map<int, ExactMatrix> comp;
        for (auto& [deg, r] : acx->module().ranks) {
            int k = (n - 1) - deg;  // simplex dimension at this degree
            ExactMatrix cmp(chains_m->rank(deg), r, ring);
            auto faces = mboundary.simplices(k);
            for (std::size_t j = 0; j < faces.size(); ++j)
                cmp.at(m.index_of(faces[j]), j) = 1;
            comp[deg] = cmp;
        }
        inc = ChainMap(acx, chains_m, std::move(comp), 0, true);
    }
    auto cone = mapping_cone(inc);
    out.target = cone.cone;
    StalkTable bdtable;
    if (!mboundary.empty()) bdtable = StalkTable::compute(mboundary);

    // comparison: top-dimensional strata into the M-part, boundary strata of
    // dimension n-1 into the dM-part
    std::map<int, ExactMatrix> comp;
    for (auto& [deg, r] : out.complex->module().ranks) {
        ExactMatrix cm(out.target->rank(deg), r, ring);
        for (auto& [key, pos] : gen_pos) {
            if (pos.first != deg) continue;
            auto& [s, sx] = key;
            if (st.dim[s] == n) {
                int phi = detail::stalk_ratio(tables.at(s).alive.at(sx), tables.at(s).gen.at(sx),
                                              ambient.alive.at(sx), ambient.gen.at(sx));
                // M-part of the cone sits after the dM-part block
                std::size_t row = acx->rank(deg) + m.index_of(sx);
                int koszul = ((n * deg) % 2 == 0) ? 1 : -1;
                cm.at(row, pos.second) = phi * koszul;
            } else if (st.dim[s] == n - 1 && stratum_in_boundary(st, mboundary, m, s)) {
                // identify the twist with o_{dM} through the unique covering
                // top stratum and its boundary orientation map
                std::size_t cover = st.poset.size();
                for (std::size_t t = 0; t < st.poset.size(); ++t)
                    if (st.poset.less(s, t) && st.dim[t] == n && !closed[t].empty()) {
                        if (cover != st.poset.size())
                            throw error("boundary stratum with two covering strata");
                        cover = t;
                    }
                if (cover == st.poset.size())
                    throw error("boundary stratum without covering stratum");
                int phi = detail::stalk_ratio(tables.at(cover).alive.at(sx),
                                              tables.at(cover).gen.at(sx),
                                              ambient.alive.at(sx), ambient.gen.at(sx));
                int b = tables.at(cover).boundary_sign(sx, tables.at(s));
                int psi = ((n % 2 == 0) ? 1 : -1) * b * phi;
                int koszul = (((n - 1) * deg) % 2 == 0) ? 1 : -1;
                cm.at(mboundary.index_of(sx), pos.second) = psi * koszul;
            }
        }
        comp[deg] = cm;
    }
    out.comparison = ChainMap(out.complex, out.target, std::move(comp), 0, true);
    out.comparison_quasi_iso = is_quasi_iso(out.comparison);
    return out;
}

}  // namespace vfckit
