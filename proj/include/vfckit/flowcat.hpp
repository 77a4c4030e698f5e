#pragma once

#include "vfckit/novikov.hpp"
#include "vfckit/complex.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vfckit {

// Semisimplicial set: simplices per dimension with facet maps satisfying the
// injective-order simplicial identities.  sigma|[j0...jm] is computed by
// composing facets.
class SemisimplicialSet {
  public:
    SemisimplicialSet() = default;

    std::size_t add_simplex(int dim, std::vector<std::size_t> facets, std::string name = "") {
        if (dim < 0) throw error("semisimplicial: negative dimension");
        if (dim > 0 && facets.size() != std::size_t(dim) + 1)
            throw error("semisimplicial: a simplex of dimension n needs n+1 facets");
        auto& level = simplices_[dim];
        level.push_back({std::move(facets), name.empty() ? ("z" + std::to_string(dim) + "." +
                                                            std::to_string(level.size()))
                                                         : std::move(name)});
        return level.size() - 1;
    }

    std::size_t count(int dim) const {
        auto it = simplices_.find(dim);
        return it == simplices_.end() ? 0 : it->second.size();
    }

    int top_dimension() const {
        int d = -1;
        for (auto& [k, v] : simplices_)
            if (!v.empty()) d = std::max(d, k);
        return d;
    }

    const std::string& name(int dim, std::size_t id) const {
        return simplices_.at(dim).at(id).name;
    }

    // facet j of (dim, id): the face skipping vertex j
    std::size_t facet(int dim, std::size_t id, std::size_t j) const {
        return simplices_.at(dim).at(id).facets.at(j);
    }

    // sigma|[j0...jm]: repeatedly drop the unlisted indices, highest first.
    std::pair<int, std::size_t> restrict(int dim, std::size_t id,
                                         std::vector<int> keep) const {
        int cur_dim = dim;
        std::size_t cur = id;
        std::vector<int> alive(dim + 1);
        for (int i = 0; i <= dim; ++i) alive[i] = i;
        for (int drop = dim; drop >= 0; --drop) {
            bool kept = std::find(keep.begin(), keep.end(), drop) != keep.end();
            if (kept) continue;
            // position of vertex `drop` within the current simplex
            std::size_t pos = 0;
            for (std::size_t i = 0; i < alive.size(); ++i)
                if (alive[i] == drop) pos = i;
            cur = facet(cur_dim, cur, pos);
            --cur_dim;
            alive.erase(std::find(alive.begin(), alive.end(), drop));
        }
        return {cur_dim, cur};
    }

    void validate() const {
        // simplicial identities: d_i d_j = d_{j-1} d_i for i < j
        for (auto& [dim, level] : simplices_) {
            if (dim < 2) continue;
            for (std::size_t id = 0; id < level.size(); ++id)
                for (std::size_t j = 1; j <= std::size_t(dim); ++j)
                    for (std::size_t i = 0; i < j; ++i) {
                        std::size_t a = facet(dim - 1, facet(dim, id, j), i);
                        std::size_t b = facet(dim - 1, facet(dim, id, i), j - 1);
                        if (a != b)
                            throw error("semisimplicial identities fail at dim " +
                                        std::to_string(dim) + " simplex " + std::to_string(id));
                    }
        }
        for (auto& [dim, level] : simplices_) {
            if (dim == 0) continue;
            for (auto& s : level)
                for (auto f : s.facets)
                    if (f >= count(dim - 1)) throw error("semisimplicial: facet out of range");
        }
    }

    // vertex i of a simplex
    std::size_t vertex(int dim, std::size_t id, int i) const {
        auto [d, v] = restrict(dim, id, {i});
        (void)d;
        return v;
    }

    static SemisimplicialSet point() {
        SemisimplicialSet z;
        z.add_simplex(0, {}, "pt");
        return z;
    }

    // The semisimplicial n-simplex: nondegenerate faces = vertex subsets.
    static SemisimplicialSet standard_simplex(int n) {
        SemisimplicialSet z;
        std::map<std::vector<int>, std::size_t> ids;
        // subsets by size
        std::vector<std::vector<int>> subsets;
        for (std::size_t mask = 1; mask < (std::size_t(1) << (n + 1)); ++mask) {
            std::vector<int> s;
            for (int i = 0; i <= n; ++i)
                if (mask & (std::size_t(1) << i)) s.push_back(i);
            subsets.push_back(s);
        }
        std::sort(subsets.begin(), subsets.end(), [](auto& a, auto& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
        for (auto& s : subsets) {
            std::vector<std::size_t> facets;
            if (s.size() > 1)
                for (std::size_t j = 0; j < s.size(); ++j) {
                    auto f = s;
                    f.erase(f.begin() + j);
                    facets.push_back(ids.at(f));
                }
            std::string nm = "[";
            for (std::size_t i = 0; i < s.size(); ++i) nm += (i ? " " : "") + std::to_string(s[i]);
            nm += "]";
            ids[s] = z.add_simplex(int(s.size()) - 1, std::move(facets), nm);
        }
        return z;
    }

  private:
    struct Record {
        std::vector<std::size_t> facets;
        std::string name;
    };
    std::map<int, std::vector<Record>> simplices_;
};

// Generators over the vertices of the base: label, grading, action.
struct Generator {
    std::string label;
    int gr = 0;
    Rational action = 0;
};

struct GeneratorSet {
    std::vector<std::vector<Generator>> per_vertex;

    const Generator& at(std::size_t vertex, std::size_t i) const {
        return per_vertex.at(vertex).at(i);
    }
    std::size_t count(std::size_t vertex) const { return per_vertex.at(vertex).size(); }
};

struct TripleKey {
    int dim = 0;
    std::size_t simplex = 0;
    std::size_t p = 0;  // generator index at vertex sigma(0)
    std::size_t q = 0;  // generator index at vertex sigma(dim)
    bool operator<(const TripleKey& o) const {
        return std::tie(dim, simplex, p, q) < std::tie(o.dim, o.simplex, o.p, o.q);
    }
};

// Mode-A flow category fixture: signed counts for the vdim-zero triples.
struct FlowCategoryFixture {
    SemisimplicialSet base;
    GeneratorSet generators;
    GroundRing ring = GroundRing::rationals();
    std::map<TripleKey, Rational> counts;
    std::optional<Rational> action_cutoff;

    int vdim(const TripleKey& t) const {
        const auto& p = generators.at(base.vertex(t.dim, t.simplex, 0), t.p);
        const auto& q = generators.at(base.vertex(t.dim, t.simplex, t.dim), t.q);
        return q.gr - p.gr + t.dim - 1;
    }

    void validate() const {
        base.validate();
        if (generators.per_vertex.size() != base.count(0))
            throw error("flowcat: generator table does not match the vertex set");
        for (auto& [key, c] : counts) {
            ring.require(c);
            const auto& p = generators.at(base.vertex(key.dim, key.simplex, 0), key.p);
            const auto& q =
                generators.at(base.vertex(key.dim, key.simplex, key.dim), key.q);
            if (key.dim == 0 && !(p.action < q.action))
                throw error("flowcat: vertex triple must strictly increase action (" + p.label +
                            " -> " + q.label + ")");
            if (vdim(key) != 0)
                throw error("flowcat: count supplied for a triple of nonzero virtual dimension");
        }
    }
};

// Ndg diagram: a graded module per vertex and a degree (1-n) map per simplex,
// as matrices of Novikov series.
struct NdgDiagram {
    SemisimplicialSet base;
    GeneratorSet generators;
    GroundRing ring = GroundRing::rationals();
    std::map<std::pair<int, std::size_t>, NovikovMatrix> maps;  // (dim, simplex) -> f_sigma
    std::optional<Rational> action_cutoff;

    const NovikovMatrix& f(int dim, std::size_t id) const {
        auto it = maps.find({dim, id});
        if (it == maps.end()) throw error("ndg: missing structure map");
        return it->second;
    }
};

// f_sigma(p) = sum over q with gr(q) - gr(p) = 1 - dim sigma of n(sigma,p,q) q,
// matrix entries n * T^{(gr(q)-gr(p), a(q)-a(p))}.
inline NdgDiagram build_ndg_from_counts(const FlowCategoryFixture& fc) {
    fc.validate();
    NdgDiagram out;
    out.base = fc.base;
    out.generators = fc.generators;
    out.ring = fc.ring;
    out.action_cutoff = fc.action_cutoff;
    for (int dim = 0; dim <= fc.base.top_dimension(); ++dim)
        for (std::size_t id = 0; id < fc.base.count(dim); ++id) {
            std::size_t v0 = fc.base.vertex(dim, id, 0);
            std::size_t v1 = fc.base.vertex(dim, id, dim);
            NovikovMatrix m(fc.generators.count(v1), fc.generators.count(v0), fc.ring);
            for (std::size_t p = 0; p < fc.generators.count(v0); ++p)
                for (std::size_t q = 0; q < fc.generators.count(v1); ++q) {
                    TripleKey key{dim, id, p, q};
                    auto it = fc.counts.find(key);
                    if (it == fc.counts.end()) continue;
                    const auto& gp = fc.generators.at(v0, p);
                    const auto& gq = fc.generators.at(v1, q);
                    m.at(q, p) = NovikovSeries::monomial(gq.gr - gp.gr, gq.action - gp.action,
                                                         it->second, fc.ring);
                }
            if (fc.action_cutoff) m = m.truncated(*fc.action_cutoff);
            out.maps[{dim, id}] = std::move(m);
        }
    return out;
}

struct NdgVerdict {
    bool ok = true;
    std::vector<std::string> failures;  // per-simplex reports
};

// The master relation: sum_{k=0}^n (-1)^k f_{s|[k..n]} f_{s|[0..k]} =
// sum_{k=1}^{n-1} (-1)^k f_{s|[0..^k..n]}, exact up to the cutoff.
inline NdgVerdict verify_ndg(const NdgDiagram& d, int max_dim = -1) {
    d.base.validate();
    NdgVerdict out;
    if (max_dim < 0) max_dim = d.base.top_dimension();
    for (int n = 0; n <= max_dim; ++n)
        for (std::size_t id = 0; id < d.base.count(n); ++id) {
            std::size_t v0 = d.base.vertex(n, id, 0);
            std::size_t vn = d.base.vertex(n, id, n);
            NovikovMatrix lhs(d.generators.count(vn), d.generators.count(v0), d.ring);
            for (int k = 0; k <= n; ++k) {
                std::vector<int> lowkeep, highkeep;
                for (int i = 0; i <= k; ++i) lowkeep.push_back(i);
                for (int i = k; i <= n; ++i) highkeep.push_back(i);
                auto low = d.base.restrict(n, id, lowkeep);
                auto high = d.base.restrict(n, id, highkeep);
                NovikovMatrix prod = d.f(high.first, high.second).times(d.f(low.first, low.second));
                lhs = lhs.plus(prod.scaled((k % 2 == 0) ? 1 : -1));
            }
            NovikovMatrix rhs(d.generators.count(vn), d.generators.count(v0), d.ring);
            for (int k = 1; k <= n - 1; ++k) {
                std::vector<int> keep;
                for (int i = 0; i <= n; ++i)
                    if (i != k) keep.push_back(i);
                auto face = d.base.restrict(n, id, keep);
                rhs = rhs.plus(d.f(face.first, face.second).scaled((k % 2 == 0) ? 1 : -1));
            }
            if (d.action_cutoff) {
                lhs = lhs.truncated(*d.action_cutoff);
                rhs = rhs.truncated(*d.action_cutoff);
            }
            if (!lhs.equals_up_to_cutoff(rhs)) {
                out.ok = false;
                out.failures.push_back("Ndg relation fails at " + d.base.name(n, id));
            }
        }
    return out;
}

struct FloerHomology {
    std::map<int, std::size_t> rank_by_degree;  // free rank of H per grading
    std::size_t total_rank = 0;
    std::size_t module_rank = 0;
    bool rank_bound_holds = false;
    bool cutoff_stable = true;
};

// Homology rank over the Novikov field at a vertex z: per grading degree,
// rank H^g = dim - rank d^g - rank d^{g-1}, with leading-action pivoting.
// Cutoff stability is probed by recomputing at half the cutoff.
inline FloerHomology floer_homology(const NdgDiagram& d, std::size_t vertex_id) {
    const NovikovMatrix& dm = d.f(0, vertex_id);
    // d^2 = 0 up to cutoff
    NovikovMatrix sq = dm.times(dm);
    if (d.action_cutoff) sq = sq.truncated(*d.action_cutoff);
    if (!sq.known_zero()) throw error("floer_homology: d^2 != 0 at the vertex");
    const auto& gens = d.generators.per_vertex.at(vertex_id);
    auto compute = [&](std::optional<Rational> cutoff) {
        std::map<int, std::size_t> dims;
        for (auto& g : gens) dims[g.gr]++;
        std::map<int, std::size_t> dranks;
        std::map<int, std::vector<std::size_t>> by_degree;
        for (std::size_t i = 0; i < gens.size(); ++i) by_degree[gens[i].gr].push_back(i);
        for (auto& [g, idx] : by_degree) {
            auto jt = by_degree.find(g + 1);
            if (jt == by_degree.end()) continue;
            NovikovMatrix block(jt->second.size(), idx.size(), d.ring);
            for (std::size_t r = 0; r < jt->second.size(); ++r)
                for (std::size_t c = 0; c < idx.size(); ++c) {
                    block.at(r, c) = dm.at(jt->second[r], idx[c]);
                    if (cutoff) block.at(r, c) = block.at(r, c).truncated(*cutoff);
                }
            dranks[g] = novikov_rank(block);
        }
        std::map<int, std::size_t> out;
        for (auto& [g, dim] : dims) {
            std::size_t r = dim;
            if (dranks.count(g)) r -= dranks[g];
            if (dranks.count(g - 1)) r -= dranks[g - 1];
            if (r) out[g] = r;
        }
        return out;
    };
    FloerHomology out;
    out.rank_by_degree = compute(d.action_cutoff);
    for (auto& [g, r] : out.rank_by_degree) out.total_rank += r;
    out.module_rank = gens.size();
    out.rank_bound_holds = out.total_rank <= out.module_rank;
    if (d.action_cutoff) {
        auto probe = compute(*d.action_cutoff / 2);
        out.cutoff_stable = (probe == out.rank_by_degree);
        if (!out.cutoff_stable)
            throw error("floer_homology: rank changes under the cutoff probe; increase the "
                        "action cutoff");
    }
    return out;
}

inline Integer catalan_number(int n) {  // C_n = binom(2n, n) / (n+1)
    Integer num = 1, den = 1;
    for (int k = 0; k < n; ++k) {
        num *= Integer(2 * n - k);
        den *= Integer(k + 1);
    }
    Integer binom = num / den;
    return binom / Integer(n + 1);
}

struct CatalanHomotopy {
    NovikovMatrix epsilon_series;  // sum C_{n-1} (hd+dh)^n
    NovikovMatrix H;               // homotopy with eps = dH + Hd (up to cutoff)
    bool identity_holds = false;         // dH + Hd = computed series
    bool identity_with_given = false;    // dH + Hd = supplied eps
    bool matches_given_epsilon = false;  // computed series = supplied eps
};

// Prop. "degenerate edges act by the identity up to homotopy": from
// eps = dh + hd + eps^2, iterate to eps = sum_n C_{n-1} (hd+dh)^n and
// H = sum_n sum_{k=1}^n h (dh)^{k-1} (hd)^{n-k}.
inline CatalanHomotopy degenerate_edge_homotopy(const NovikovMatrix& d, const NovikovMatrix& eps,
                                                const NovikovMatrix& h, const Rational& cutoff) {
    // precondition: eps = dh + hd + eps^2 up to cutoff
    NovikovMatrix rel = d.times(h).plus(h.times(d)).plus(eps.times(eps)).truncated(cutoff);
    if (!rel.equals_up_to_cutoff(eps.truncated(cutoff)))
        throw error("degenerate_edge_homotopy: eps != dh + hd + eps^2 on the fixture");
    NovikovMatrix u = d.times(h).plus(h.times(d)).truncated(cutoff);
    auto mina = u.min_action();
    if (mina && *mina <= 0)
        throw error("degenerate_edge_homotopy: hd+dh has a term of non-positive action (" +
                    rational_str(*mina) + "); series does not converge");
    CatalanHomotopy out;
    std::size_t n = d.rows();
    out.epsilon_series = NovikovMatrix(n, n, d.ring());
    out.H = NovikovMatrix(n, n, d.ring());
    NovikovMatrix upow = u;  // u^m
    NovikovMatrix dh = d.times(h).truncated(cutoff);
    NovikovMatrix hd = h.times(d).truncated(cutoff);
    for (int m = 1;; ++m) {
        if (upow.known_zero()) break;
        Rational coeff(catalan_number(m - 1));
        out.epsilon_series = out.epsilon_series.plus(upow.scaled(coeff)).truncated(cutoff);
        // H_m = sum_{k=1}^m h (dh)^{k-1} (hd)^{m-k}
        for (int k = 1; k <= m; ++k) {
            NovikovMatrix term = h;
            for (int i = 0; i < k - 1; ++i) term = term.times(dh).truncated(cutoff);
            for (int i = 0; i < m - k; ++i) term = term.times(hd).truncated(cutoff);
            out.H = out.H.plus(term.scaled(coeff)).truncated(cutoff);
        }
        upow = upow.times(u).truncated(cutoff);
    }
    NovikovMatrix check = d.times(out.H).plus(out.H.times(d)).truncated(cutoff);
    out.identity_holds = check.equals_up_to_cutoff(out.epsilon_series.truncated(cutoff));
    out.identity_with_given = check.equals_up_to_cutoff(eps.truncated(cutoff));
    out.matches_given_epsilon =
        out.epsilon_series.truncated(cutoff).equals_up_to_cutoff(eps.truncated(cutoff));
    return out;
}

}  // namespace vfckit
