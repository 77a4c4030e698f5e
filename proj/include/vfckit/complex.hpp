#pragma once

#include "vfckit/snf.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace vfckit {

// Cohomological convention throughout: d has degree +1 and d^2 = 0.  The Z/2
// parity of a degree is (degree + offset) mod 2; the offset tracks suspensions,
// so parity is not forced to be the literal reduction of the degree.
struct GradedModule {
    GroundRing ring;
    std::map<int, std::size_t> ranks;  // nonzero ranks only
    int parity_offset = 0;
    std::map<int, std::vector<std::string>> labels;  // optional basis labels

    std::size_t rank(int i) const {
        auto it = ranks.find(i);
        return it == ranks.end() ? 0 : it->second;
    }
    int parity(int i) const { return ((i + parity_offset) % 2 + 2) % 2; }
    bool trivial() const {
        for (auto& [d, r] : ranks)
            if (r) return true;
        return false;
    }
    int min_degree() const { return ranks.empty() ? 0 : ranks.begin()->first; }
    int max_degree() const { return ranks.empty() ? 0 : ranks.rbegin()->first; }

    std::string label(int deg, std::size_t j) const {
        auto it = labels.find(deg);
        if (it != labels.end() && j < it->second.size()) return it->second[j];
        return "e" + std::to_string(deg) + "." + std::to_string(j);
    }
};

class ChainComplex;
using ComplexPtr = std::shared_ptr<const ChainComplex>;

struct HomologyGroup {
    std::size_t free_rank = 0;
    std::vector<Integer> torsion;  // divisibility order, entries > 1
    bool is_zero() const { return free_rank == 0 && torsion.empty(); }
    bool operator==(const HomologyGroup& o) const {
        return free_rank == o.free_rank && torsion == o.torsion;
    }
    std::string str() const {
        std::string s = "free " + std::to_string(free_rank);
        if (!torsion.empty()) {
            s += ", torsion [";
            for (std::size_t i = 0; i < torsion.size(); ++i)
                s += (i ? "," : "") + torsion[i].str();
            s += "]";
        }
        return s;
    }
};

class ChainComplex {
  public:
    ChainComplex() = default;

    ChainComplex(GradedModule mod, std::map<int, ExactMatrix> diff, bool validate = true)
        : mod_(std::move(mod)), d_(std::move(diff)) {
        for (auto it = d_.begin(); it != d_.end();) {
            if (it->second.rows() == 0 && it->second.cols() == 0)
                it = d_.erase(it);
            else
                ++it;
        }
        if (validate) check();
    }

    const GradedModule& module() const { return mod_; }
    const GroundRing& ring() const { return mod_.ring; }
    std::size_t rank(int i) const { return mod_.rank(i); }
    int parity(int i) const { return mod_.parity(i); }
    int min_degree() const { return mod_.min_degree(); }
    int max_degree() const { return mod_.max_degree(); }

    ExactMatrix d(int i) const {
        auto it = d_.find(i);
        if (it != d_.end()) return it->second;
        return ExactMatrix::zero(rank(i + 1), rank(i), mod_.ring);
    }

    std::size_t total_rank() const {
        std::size_t t = 0;
        for (auto& [deg, r] : mod_.ranks) t += r;
        return t;
    }

    // Homology of a levelwise-free complex from elementary divisors: the free
    // rank is dim - rank d^i - rank d^{i-1} and the torsion coefficients are
    // the nontrivial divisors of d^{i-1} (units stripped over Z[1/S]).
    HomologyGroup homology(int i) const {
        HomologyGroup out;
        if (rank(i) == 0) return out;
        if (ring().is_field()) {
            out.free_rank = rank(i) - rank_of_d(i) - rank_of_d(i - 1);
            return out;
        }
        const auto& divs_prev = divisors_of_d(i - 1);
        out.free_rank = rank(i) - divisors_of_d(i).size() - divs_prev.size();
        for (const auto& dv : divs_prev) {
            Integer t = mod_.ring.strip_units(dv);
            if (t > 1) out.torsion.push_back(t);
        }
        return out;
    }

    std::map<int, HomologyGroup> homology_all() const {
        std::map<int, HomologyGroup> out;
        if (mod_.ranks.empty()) return out;
        for (int i = min_degree(); i <= max_degree(); ++i) {
            auto h = homology(i);
            if (!h.is_zero()) out[i] = h;
        }
        return out;
    }

    bool acyclic() const { return homology_all().empty(); }

  private:
    const std::vector<Integer>& divisors_of_d(int i) const {
        std::scoped_lock lock(cache_->mu);
        auto it = cache_->divs.find(i);
        if (it != cache_->divs.end()) return it->second;
        ExactMatrix m = d(i);
        if (!m.all_integer()) {
            // clear unit denominators (inverted primes) row by row
            for (std::size_t r = 0; r < m.rows(); ++r) {
                Integer l = 1;
                for (std::size_t c = 0; c < m.cols(); ++c)
                    l = boost::multiprecision::lcm(l, den(m.at(r, c)));
                for (std::size_t c = 0; c < m.cols(); ++c)
                    m.at(r, c) = m.at(r, c) * Rational(l);
            }
        }
        return cache_->divs.emplace(i, elementary_divisors(m)).first->second;
    }

    std::size_t rank_of_d(int i) const {
        std::scoped_lock lock(cache_->mu);
        auto it = cache_->ranks.find(i);
        if (it != cache_->ranks.end()) return it->second;
        return cache_->ranks.emplace(i, rank_q(d(i))).first->second;
    }

    struct Cache {
        std::mutex mu;
        std::map<int, std::vector<Integer>> divs;
        std::map<int, std::size_t> ranks;
    };

    void check() const {
        for (auto& [i, m] : d_) {
            if (m.rows() != rank(i + 1) || m.cols() != rank(i))
                throw error("differential shape mismatch at degree " + std::to_string(i));
            if (m.ring() != mod_.ring) throw error("differential ring mismatch");
        }
        for (auto& [i, m] : d_) {
            auto next = d_.find(i + 1);
            if (next == d_.end()) continue;
            if (!(next->second * m).is_zero())
                throw error("d^2 != 0 between degrees " + std::to_string(i) + " and " +
                            std::to_string(i + 2));
        }
    }

    GradedModule mod_;
    std::map<int, ExactMatrix> d_;
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

inline ComplexPtr make_complex(GradedModule mod, std::map<int, ExactMatrix> d,
                               bool validate = true) {
    return std::make_shared<ChainComplex>(std::move(mod), std::move(d), validate);
}

inline ComplexPtr zero_complex(GroundRing ring = GroundRing::integers()) {
    return make_complex(GradedModule{ring, {}, 0, {}}, {});
}

// The ground ring placed in a single degree.
inline ComplexPtr ring_in_degree(int deg, GroundRing ring = GroundRing::integers()) {
    GradedModule m{ring, {{deg, 1}}, 0, {}};
    return make_complex(std::move(m), {});
}

// ---------------------------------------------------------------------------
// Chain maps.  Components f[i]: src^i -> dst^{i+shift}; chain maps proper are
// even (shift 0 commutes with d); odd shifts anticommute per the Koszul rule:
// d_dst f = (-1)^shift f d_src.

class ChainMap {
  public:
    ChainMap() = default;

    ChainMap(ComplexPtr src, ComplexPtr dst, std::map<int, ExactMatrix> comp, int shift = 0,
             bool validate = true)
        : src_(std::move(src)), dst_(std::move(dst)), comp_(std::move(comp)), shift_(shift) {
        for (auto it = comp_.begin(); it != comp_.end();) {
            if (it->second.rows() == 0 && it->second.cols() == 0)
                it = comp_.erase(it);
            else
                ++it;
        }
        if (validate) check();
    }

    static ChainMap identity(ComplexPtr c) {
        std::map<int, ExactMatrix> comp;
        for (auto& [deg, r] : c->module().ranks) comp[deg] = ExactMatrix::identity(r, c->ring());
        return ChainMap(c, c, std::move(comp), 0, false);
    }

    static ChainMap zero(ComplexPtr src, ComplexPtr dst, int shift = 0) {
        return ChainMap(std::move(src), std::move(dst), {}, shift, false);
    }

    const ComplexPtr& source() const { return src_; }
    const ComplexPtr& target() const { return dst_; }
    int shift() const { return shift_; }

    ExactMatrix at(int i) const {
        auto it = comp_.find(i);
        if (it != comp_.end()) return it->second;
        return ExactMatrix::zero(dst_->rank(i + shift_), src_->rank(i), src_->ring());
    }

    ChainMap compose(const ChainMap& inner) const {  // (*this) after inner
        if (inner.dst_.get() != src_.get()) throw error("chain map composition mismatch");
        std::map<int, ExactMatrix> comp;
        for (auto& [deg, r] : inner.src_->module().ranks) {
            ExactMatrix m = at(deg + inner.shift_) * inner.at(deg);
            if (!m.is_zero()) comp[deg] = m;
        }
        return ChainMap(inner.src_, dst_, std::move(comp), shift_ + inner.shift_, false);
    }

    ChainMap plus(const ChainMap& o) const {
        if (o.shift_ != shift_) throw error("chain map sum shift mismatch");
        std::map<int, ExactMatrix> comp;
        for (auto& [deg, r] : src_->module().ranks) {
            ExactMatrix m = at(deg) + o.at(deg);
            if (!m.is_zero()) comp[deg] = m;
        }
        return ChainMap(src_, dst_, std::move(comp), shift_, false);
    }

    ChainMap scaled(const Rational& c) const {
        std::map<int, ExactMatrix> comp;
        for (auto& [deg, m] : comp_) comp[deg] = m.scaled(c);
        return ChainMap(src_, dst_, std::move(comp), shift_, false);
    }

    bool commutes_with_differentials() const {
        int sgn = (shift_ % 2 == 0) ? 1 : -1;
        int lo = src_->min_degree() - 1, hi = src_->max_degree() + 1;
        for (int i = lo; i <= hi; ++i) {
            ExactMatrix lhs = dst_->d(i + shift_) * at(i);
            ExactMatrix rhs = (at(i + 1) * src_->d(i)).scaled(sgn);
            if (lhs != rhs) return false;
        }
        return true;
    }

  private:
    void check() const {
        if (!src_ || !dst_) throw error("chain map without endpoints");
        if (src_->ring() != dst_->ring()) throw error("chain map ring mismatch");
        for (auto& [i, m] : comp_)
            if (m.rows() != dst_->rank(i + shift_) || m.cols() != src_->rank(i))
                throw error("chain map component shape mismatch at degree " + std::to_string(i));
        if (!commutes_with_differentials())
            throw error("chain map does not (anti)commute with differentials");
    }

    ComplexPtr src_, dst_;
    std::map<int, ExactMatrix> comp_;
    int shift_ = 0;
};

// Chain homotopy h between chain maps f and g: components of degree -1 with
// f - g = d h + h d.
struct Homotopy {
    ChainMap f, g;
    std::map<int, ExactMatrix> h;  // h[i]: C^i -> D^{i-1}

    ExactMatrix at(int i) const {
        auto it = h.find(i);
        if (it != h.end()) return it->second;
        return ExactMatrix::zero(f.target()->rank(i - 1), f.source()->rank(i), f.source()->ring());
    }

    bool verify() const {
        const auto& A = f.source();
        const auto& B = f.target();
        for (int i = A->min_degree() - 1; i <= A->max_degree() + 1; ++i) {
            ExactMatrix want = f.at(i) - g.at(i);
            ExactMatrix got = B->d(i - 1) * at(i) + at(i + 1) * A->d(i);
            if (want != got) return false;
        }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Constructions.

inline ComplexPtr shift(const ComplexPtr& c, int n) {
    GradedModule mod;
    mod.ring = c->ring();
    mod.parity_offset = ((c->module().parity_offset + n) % 2 + 2) % 2;
    for (auto& [deg, r] : c->module().ranks) mod.ranks[deg - n] = r;
    for (auto& [deg, ls] : c->module().labels) mod.labels[deg - n] = ls;
    std::map<int, ExactMatrix> d;
    int sgn = (n % 2 == 0) ? 1 : -1;
    for (auto& [deg, r] : mod.ranks) {
        ExactMatrix m = c->d(deg + n);
        if (!m.is_zero()) d[deg] = m.scaled(sgn);
    }
    return make_complex(std::move(mod), std::move(d), false);
}

// tau_{>= i}: degrees > i kept verbatim.  Over a field, degree i is the
// literal cokernel of d^{i-1}; over Z / Z[1/S] the cokernel need not be free,
// so the quasi-isomorphic free model [im d^{i-1} -> C^i -> ...] is used (the
// image sits in degree i-1; H^j agrees for j >= i and vanishes below).
inline ComplexPtr truncate_above(const ComplexPtr& c, int i);
// tau_{<= i}: kernel of d^i in degree i (free in every ring in scope).
inline ComplexPtr truncate_below(const ComplexPtr& c, int i);

inline ComplexPtr truncate_above(const ComplexPtr& c, int i) {
    GradedModule mod;
    mod.ring = c->ring();
    mod.parity_offset = c->module().parity_offset;
    std::map<int, ExactMatrix> d;
    for (auto& [deg, r] : c->module().ranks)
        if (deg >= i) mod.ranks[deg] = r;
    for (auto& [deg, rr] : mod.ranks) {
        ExactMatrix m = c->d(deg);
        if (deg <= c->max_degree() - 1 && mod.rank(deg + 1) > 0 && !m.is_zero()) d[deg] = m;
    }
    if (c->ring().is_field()) {
        ExactMatrix dprev = c->d(i - 1);
        if (mod.rank(i) > 0 && dprev.cols() > 0 && !dprev.is_zero()) {
            // Literal cokernel: classes of the non-pivot coordinates of the
            // image form a basis, and the induced differential is d^i on those
            // coordinates (well defined since d^i annihilates the image).
            Rref r = rref(dprev.transpose());
            std::vector<bool> pivot_row(c->rank(i), false);
            for (auto p : r.pivots) pivot_row[p] = true;
            std::vector<std::size_t> keep;
            for (std::size_t j = 0; j < c->rank(i); ++j)
                if (!pivot_row[j]) keep.push_back(j);
            ExactMatrix sec(c->rank(i), keep.size(), c->ring());
            for (std::size_t k = 0; k < keep.size(); ++k) sec.at(keep[k], k) = 1;
            mod.ranks[i] = keep.size();
            if (mod.rank(i) == 0) mod.ranks.erase(i);
            ExactMatrix dnew = c->d(i) * sec;
            if (!dnew.is_zero() && mod.rank(i) > 0)
                d[i] = dnew;
            else
                d.erase(i);
        }
        return make_complex(std::move(mod), std::move(d), true);
    }
    // Integral free model: image lattice of d^{i-1} in degree i-1.
    ExactMatrix dprev = c->d(i - 1);
    if (mod.rank(i) > 0 && dprev.cols() > 0 && !dprev.is_zero()) {
        SmithForm s = smith_normal_form(dprev);
        auto diag = snf_diagonal(s.D);
        std::vector<std::vector<Rational>> gens;
        for (std::size_t k = 0; k < diag.size(); ++k) {
            if (diag[k] == 0) continue;
            auto u = s.U.column(k);
            for (auto& x : u) x *= Rational(diag[k]);
            gens.push_back(u);
        }
        if (!gens.empty()) {
            mod.ranks[i - 1] = gens.size();
            ExactMatrix inc(c->rank(i), gens.size(), c->ring());
            for (std::size_t k = 0; k < gens.size(); ++k) inc.set_column(k, gens[k]);
            d[i - 1] = inc;
        }
    }
    return make_complex(std::move(mod), std::move(d), true);
}

inline ComplexPtr truncate_below(const ComplexPtr& c, int i) {
    GradedModule mod;
    mod.ring = c->ring();
    mod.parity_offset = c->module().parity_offset;
    std::map<int, ExactMatrix> d;
    for (auto& [deg, r] : c->module().ranks)
        if (deg < i) mod.ranks[deg] = r;
    for (auto& [deg, r] : mod.ranks)
        if (deg + 1 < i && !c->d(deg).is_zero()) d[deg] = c->d(deg);
    auto ker = kernel_basis(c->d(i));
    if (!ker.empty() && c->rank(i) > 0) {
        mod.ranks[i] = ker.size();
        ExactMatrix K(c->rank(i), ker.size(), c->ring());
        for (std::size_t j = 0; j < ker.size(); ++j) K.set_column(j, ker[j]);
        // d^{i-1} lands in the kernel; express it in the kernel basis.
        ExactMatrix dprev = c->d(i - 1);
        if (dprev.cols() > 0 && !dprev.is_zero()) {
            auto X = solve_in_ring_batch(K, dprev);
            if (!X) throw error("truncate_below: image not inside kernel");
            if (!X->is_zero()) d[i - 1] = *X;
        }
    }
    return make_complex(std::move(mod), std::move(d), true);
}

// Mapping cone [A -> B^{.-1}] of an even chain map: cone^i = A^i + B^{i-1},
// d(a,b) = (da, f(a) - db).
struct MappingCone {
    ComplexPtr cone;
    ChainMap from_shifted_target;  // B[-1] -> cone
    ChainMap to_source;            // cone -> A
};

inline MappingCone mapping_cone(const ChainMap& f) {
    if (f.shift() != 0) throw error("mapping_cone expects an even chain map");
    const ComplexPtr& A = f.source();
    const ComplexPtr& B = f.target();
    if (A->ring() != B->ring()) throw error("mapping_cone ring mismatch");
    GradedModule mod;
    mod.ring = A->ring();
    mod.parity_offset = A->module().parity_offset;
    int lo = std::min(A->min_degree(), B->min_degree() + 1);
    int hi = std::max(A->max_degree(), B->max_degree() + 1);
    for (int i = lo; i <= hi; ++i) {
        std::size_t r = A->rank(i) + B->rank(i - 1);
        if (r) mod.ranks[i] = r;
        for (std::size_t j = 0; j < A->rank(i); ++j)
            mod.labels[i].push_back("a:" + A->module().label(i, j));
        for (std::size_t j = 0; j < B->rank(i - 1); ++j)
            mod.labels[i].push_back("b:" + B->module().label(i - 1, j));
    }
    std::map<int, ExactMatrix> d;
    for (int i = lo; i <= hi; ++i) {
        std::size_t rows = A->rank(i + 1) + B->rank(i);
        std::size_t cols = A->rank(i) + B->rank(i - 1);
        if (!rows || !cols) continue;
        ExactMatrix m(rows, cols, A->ring());
        put_block(m, 0, 0, A->d(i));
        put_block(m, A->rank(i + 1), 0, f.at(i));
        put_block(m, A->rank(i + 1), A->rank(i), B->d(i - 1), -1);
        if (!m.is_zero()) d[i] = m;
    }
    MappingCone out;
    out.cone = make_complex(std::move(mod), std::move(d), true);
    {
        std::map<int, ExactMatrix> comp;
        ComplexPtr Bm1 = shift(B, -1);
        for (auto& [deg, r] : Bm1->module().ranks) {
            ExactMatrix m(out.cone->rank(deg), r, A->ring());
            put_block(m, A->rank(deg), 0, ExactMatrix::identity(r, A->ring()));
            comp[deg] = m;
        }
        out.from_shifted_target = ChainMap(Bm1, out.cone, std::move(comp), 0, true);
    }
    {
        std::map<int, ExactMatrix> comp;
        for (auto& [deg, r] : out.cone->module().ranks) {
            if (A->rank(deg) == 0) continue;
            ExactMatrix m(A->rank(deg), r, A->ring());
            put_block(m, 0, 0, ExactMatrix::identity(A->rank(deg), A->ring()));
            comp[deg] = m;
        }
        out.to_source = ChainMap(out.cone, A, std::move(comp), 0, true);
    }
    return out;
}

inline bool is_quasi_iso(const ChainMap& f) {
    return mapping_cone(f).cone->acyclic();
}

// Total complex [A_0 -> A_1 -> ... -> A_n^{.-n}] of a sequence with vanishing
// adjacent composites.  The p-th piece carries (-1)^p times its internal
// differential; the connecting maps are unsigned.
inline ComplexPtr total_complex(const std::vector<ChainMap>& maps) {
    if (maps.empty()) throw error("total_complex needs at least one map");
    std::vector<ComplexPtr> pieces;
    pieces.push_back(maps.front().source());
    for (auto& f : maps) {
        if (f.shift() != 0) throw error("total_complex expects even maps");
        if (f.source().get() != pieces.back().get())
            throw error("total_complex: maps do not chain");
        pieces.push_back(f.target());
    }
    for (std::size_t k = 0; k + 1 < maps.size(); ++k) {
        ChainMap comp = maps[k + 1].compose(maps[k]);
        for (auto& [deg, r] : comp.source()->module().ranks)
            if (!comp.at(deg).is_zero())
                throw error("total_complex: adjacent composite nonzero at degree " +
                            std::to_string(deg));
    }
    const GroundRing ring = pieces[0]->ring();
    std::size_t n = pieces.size();
    GradedModule mod;
    mod.ring = ring;
    mod.parity_offset = pieces[0]->module().parity_offset;
    int lo = pieces[0]->min_degree(), hi = pieces[0]->max_degree();
    for (std::size_t p = 0; p < n; ++p) {
        lo = std::min(lo, pieces[p]->min_degree() + int(p));
        hi = std::max(hi, pieces[p]->max_degree() + int(p));
    }
    // offsets[i][p]: start of the A_p block inside degree i
    std::map<int, std::vector<std::size_t>> offsets;
    for (int i = lo; i <= hi; ++i) {
        std::vector<std::size_t> off(n + 1, 0);
        for (std::size_t p = 0; p < n; ++p) off[p + 1] = off[p] + pieces[p]->rank(i - int(p));
        if (off[n]) {
            mod.ranks[i] = off[n];
            offsets[i] = off;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t j = 0; j < pieces[p]->rank(i - int(p)); ++j)
                    mod.labels[i].push_back("p" + std::to_string(p) + ":" +
                                            pieces[p]->module().label(i - int(p), j));
        }
    }
    std::map<int, ExactMatrix> d;
    for (int i = lo; i < hi + 1; ++i) {
        if (!mod.rank(i) || !mod.rank(i + 1)) continue;
        ExactMatrix m(mod.rank(i + 1), mod.rank(i), ring);
        auto& src_off = offsets[i];
        auto& dst_off = offsets[i + 1];
        for (std::size_t p = 0; p < n; ++p) {
            int deg = i - int(p);
            if (!pieces[p]->rank(deg)) continue;
            put_block(m, dst_off[p], src_off[p], pieces[p]->d(deg), (p % 2 == 0) ? 1 : -1);
            if (p + 1 < n) put_block(m, dst_off[p + 1], src_off[p], maps[p].at(deg));
        }
        if (!m.is_zero()) d[i] = m;
    }
    return make_complex(std::move(mod), std::move(d), true);
}

inline ComplexPtr direct_sum(const ComplexPtr& A, const ComplexPtr& B) {
    if (A->ring() != B->ring()) throw error("direct_sum ring mismatch");
    if (A->module().parity_offset != B->module().parity_offset)
        throw error("direct_sum parity mismatch");
    GradedModule mod;
    mod.ring = A->ring();
    mod.parity_offset = A->module().parity_offset;
    int lo = std::min(A->min_degree(), B->min_degree());
    int hi = std::max(A->max_degree(), B->max_degree());
    for (int i = lo; i <= hi; ++i) {
        std::size_t r = A->rank(i) + B->rank(i);
        if (r) mod.ranks[i] = r;
    }
    std::map<int, ExactMatrix> d;
    for (int i = lo; i <= hi; ++i) {
        if (!mod.rank(i) || !mod.rank(i + 1)) continue;
        ExactMatrix m(mod.rank(i + 1), mod.rank(i), mod.ring);
        put_block(m, 0, 0, A->d(i));
        put_block(m, A->rank(i + 1), A->rank(i), B->d(i));
        if (!m.is_zero()) d[i] = m;
    }
    return make_complex(std::move(mod), std::move(d), false);
}

// Super tensor product: d(a (x) b) = da (x) b + (-1)^{|a|} a (x) db, with the
// blocks of degree n ordered by ascending A-degree.
struct TensorProduct {
    ComplexPtr complex;
    // (degree n, A-degree i) -> column offset of the A^i (x) B^{n-i} block
    std::map<std::pair<int, int>, std::size_t> block_offset;
    std::size_t index(int n, int i, std::size_t a, std::size_t b, std::size_t rank_b) const {
        return block_offset.at({n, i}) + a * rank_b + b;
    }
};

inline TensorProduct tensor(const ComplexPtr& A, const ComplexPtr& B) {
    if (A->ring() != B->ring()) throw error("tensor ring mismatch");
    TensorProduct out;
    GradedModule mod;
    mod.ring = A->ring();
    mod.parity_offset =
        ((A->module().parity_offset + B->module().parity_offset) % 2 + 2) % 2;
    if (A->module().ranks.empty() || B->module().ranks.empty()) {
        out.complex = make_complex(std::move(mod), {});
        return out;
    }
    int lo = A->min_degree() + B->min_degree();
    int hi = A->max_degree() + B->max_degree();
    for (int n = lo; n <= hi; ++n) {
        std::size_t total = 0;
        for (auto& [i, ra] : A->module().ranks) {
            std::size_t rb = B->rank(n - i);
            if (!ra || !rb) continue;
            out.block_offset[{n, i}] = total;
            total += ra * rb;
            for (std::size_t a = 0; a < ra; ++a)
                for (std::size_t b = 0; b < rb; ++b)
                    mod.labels[n].push_back(A->module().label(i, a) + "*" +
                                            B->module().label(n - i, b));
        }
        if (total) mod.ranks[n] = total;
    }
    std::map<int, ExactMatrix> d;
    for (int n = lo; n < hi + 1; ++n) {
        if (!mod.rank(n) || !mod.rank(n + 1)) continue;
        ExactMatrix m(mod.rank(n + 1), mod.rank(n), mod.ring);
        for (auto& [i, ra] : A->module().ranks) {
            std::size_t rb = B->rank(n - i);
            if (!ra || !rb) continue;
            std::size_t src = out.block_offset[{n, i}];
            // dA (x) id : block (i, n-i) -> (i+1, n-i)
            ExactMatrix dA = A->d(i);
            if (!dA.is_zero() && out.block_offset.count({n + 1, i + 1})) {
                std::size_t dst = out.block_offset[{n + 1, i + 1}];
                for (std::size_t r = 0; r < dA.rows(); ++r)
                    for (std::size_t c = 0; c < dA.cols(); ++c) {
                        if (dA.at(r, c) == 0) continue;
                        for (std::size_t b = 0; b < rb; ++b)
                            m.at(dst + r * rb + b, src + c * rb + b) += dA.at(r, c);
                    }
            }
            // (-1)^{|a|} id (x) dB : block (i, n-i) -> (i, n-i+1)
            ExactMatrix dB = B->d(n - i);
            if (!dB.is_zero() && out.block_offset.count({n + 1, i})) {
                std::size_t dst = out.block_offset[{n + 1, i}];
                Rational sgn = (A->parity(i) == 0) ? 1 : -1;
                std::size_t rb_new = B->rank(n - i + 1);
                for (std::size_t a = 0; a < ra; ++a)
                    for (std::size_t r = 0; r < dB.rows(); ++r)
                        for (std::size_t c = 0; c < dB.cols(); ++c) {
                            if (dB.at(r, c) == 0) continue;
                            m.at(dst + a * rb_new + r, src + a * rb + c) += sgn * dB.at(r, c);
                        }
            }
        }
        if (!m.is_zero()) d[n] = m;
    }
    out.complex = make_complex(std::move(mod), std::move(d), true);
    return out;
}

// Koszul swap A (x) B -> B (x) A, a (x) b -> (-1)^{|a||b|} b (x) a.
inline ChainMap tensor_swap(const TensorProduct& AB, const TensorProduct& BA, const ComplexPtr& A,
                            const ComplexPtr& B) {
    std::map<int, ExactMatrix> comp;
    for (auto& [deg, r] : AB.complex->module().ranks) {
        ExactMatrix m(BA.complex->rank(deg), r, A->ring());
        for (auto& [i, ra] : A->module().ranks) {
            std::size_t rb = B->rank(deg - i);
            if (!ra || !rb || !AB.block_offset.count({deg, i})) continue;
            Rational sgn = (A->parity(i) && B->parity(deg - i)) ? -1 : 1;
            for (std::size_t a = 0; a < ra; ++a)
                for (std::size_t b = 0; b < rb; ++b)
                    m.at(BA.index(deg, deg - i, b, a, ra), AB.index(deg, i, a, b, rb)) = sgn;
        }
        comp[deg] = m;
    }
    return ChainMap(AB.complex, BA.complex, std::move(comp), 0, true);
}

// Hom(A, R): degree i holds the dual of A^{-i}; (df)(a) = -(-1)^{|f|} f(da).
inline ComplexPtr hom_to_ring(const ComplexPtr& A) {
    GradedModule mod;
    mod.ring = A->ring();
    mod.parity_offset = ((-A->module().parity_offset) % 2 + 2) % 2;
    for (auto& [deg, r] : A->module().ranks) mod.ranks[-deg] = r;
    std::map<int, ExactMatrix> d;
    for (auto& [i, r] : mod.ranks) {
        // d_Hom^i : Hom(A^{-i}) -> Hom(A^{-i-1}) is +- transpose of d_A^{-i-1}.
        ExactMatrix dA = A->d(-i - 1);
        if (dA.rows() == 0 || dA.cols() == 0 || dA.is_zero()) continue;
        int par = mod.parity(i);
        d[i] = dA.transpose().scaled(par == 0 ? -1 : 1);
    }
    return make_complex(std::move(mod), std::move(d), true);
}

// Rank/torsion accounting of 0 -> Ext^1(H_{i-1}, Z) -> H^i Hom(A,Z) ->
// Hom(H_i, Z) -> 0 for a levelwise-free A over Z (homological grading read as
// negative cohomological degrees).
inline bool universal_coefficients_check(const ComplexPtr& A, std::string* why = nullptr) {
    if (A->ring().is_field() || A->ring().kind() != GroundRing::Kind::integers) {
        if (why) *why = "universal coefficients check requires the integers";
        throw error("universal_coefficients_check requires a complex over Z");
    }
    ComplexPtr D = hom_to_ring(A);
    for (int i = D->min_degree(); i <= D->max_degree(); ++i) {
        HomologyGroup lhs = D->homology(i);
        // H_i A in homological grading = H^{-i} of A.
        HomologyGroup hi = A->homology(-i);
        HomologyGroup him1 = A->homology(-(i - 1));
        if (lhs.free_rank != hi.free_rank) {
            if (why)
                *why = "free rank mismatch at degree " + std::to_string(i) + ": " +
                       std::to_string(lhs.free_rank) + " vs " + std::to_string(hi.free_rank);
            return false;
        }
        if (lhs.torsion != him1.torsion) {
            if (why) *why = "torsion mismatch at degree " + std::to_string(i);
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Rational homology classes: representatives, coordinates, induced maps.
// These drive quasi-isomorphism inversion in the VFC pipelines; everything is
// over Q (the virtual class is a functional, so torsion never contributes).

struct RationalHomologyBasis {
    std::vector<std::vector<Rational>> cycles;  // representative cycles in C^i
};

inline RationalHomologyBasis rational_homology_basis(const ComplexPtr& C, int i) {
    RationalHomologyBasis out;
    if (!C->rank(i)) return out;
    ExactMatrix di = C->d(i).with_ring(GroundRing::rationals());
    ExactMatrix dprev = C->d(i - 1).with_ring(GroundRing::rationals());
    auto cycles = nullspace_q(di);
    if (cycles.empty()) return out;
    // Columns: [boundaries | cycles]; cycle columns that become pivots extend
    // the boundary space and give independent homology classes.
    ExactMatrix m(C->rank(i), dprev.cols() + cycles.size(), GroundRing::rationals());
    for (std::size_t j = 0; j < dprev.cols(); ++j) m.set_column(j, dprev.column(j));
    for (std::size_t j = 0; j < cycles.size(); ++j) m.set_column(dprev.cols() + j, cycles[j]);
    Rref r = rref(m);
    for (auto p : r.pivots)
        if (p >= dprev.cols()) out.cycles.push_back(cycles[p - dprev.cols()]);
    return out;
}

// Coordinates of a cycle's class in the given representative basis.
inline std::optional<std::vector<Rational>> class_coordinates(const ComplexPtr& C, int i,
                                                              const RationalHomologyBasis& basis,
                                                              const std::vector<Rational>& cycle) {
    ExactMatrix dprev = C->d(i - 1).with_ring(GroundRing::rationals());
    std::size_t nb = basis.cycles.size();
    ExactMatrix m(C->rank(i), dprev.cols() + nb, GroundRing::rationals());
    for (std::size_t j = 0; j < dprev.cols(); ++j) m.set_column(j, dprev.column(j));
    for (std::size_t j = 0; j < nb; ++j) m.set_column(dprev.cols() + j, basis.cycles[j]);
    auto sol = solve_q(m, cycle);
    if (!sol) return std::nullopt;
    std::vector<Rational> coords(nb);
    for (std::size_t j = 0; j < nb; ++j) coords[j] = (*sol)[dprev.cols() + j];
    return coords;
}

// Solve f(w) = z + d(u) with w a cycle: inverts a quasi-isomorphism on a
// single class.  Returns w or nullopt when [z] is not in the image.
inline std::optional<std::vector<Rational>> preimage_class(const ChainMap& f, int i,
                                                           const std::vector<Rational>& z) {
    const ComplexPtr& C = f.source();
    const ComplexPtr& D = f.target();
    std::size_t nw = C->rank(i), nu = D->rank(i - 1);
    ExactMatrix fi = f.at(i).with_ring(GroundRing::rationals());
    ExactMatrix du = D->d(i - 1).with_ring(GroundRing::rationals());
    ExactMatrix dw = C->d(i).with_ring(GroundRing::rationals());
    std::size_t rows = D->rank(i) + C->rank(i + 1);
    ExactMatrix m(rows, nw + nu, GroundRing::rationals());
    put_block(m, 0, 0, fi);
    put_block(m, 0, nw, du, -1);
    put_block(m, D->rank(i), 0, dw);
    std::vector<Rational> rhs(rows, Rational(0));
    for (std::size_t k = 0; k < z.size(); ++k) rhs[k] = z[k];
    auto sol = solve_q(m, rhs);
    if (!sol) return std::nullopt;
    return std::vector<Rational>(sol->begin(), sol->begin() + nw);
}

// Matrix of H^i(f) with respect to chosen rational homology bases.
inline ExactMatrix induced_map_on_homology(const ChainMap& f, int i,
                                           const RationalHomologyBasis& src_basis,
                                           const RationalHomologyBasis& dst_basis) {
    ExactMatrix m(dst_basis.cycles.size(), src_basis.cycles.size(), GroundRing::rationals());
    for (std::size_t j = 0; j < src_basis.cycles.size(); ++j) {
        auto img = f.at(i).apply(src_basis.cycles[j]);
        std::vector<Rational> imgq(img.begin(), img.end());
        auto coords = class_coordinates(f.target(), i + f.shift(), dst_basis, imgq);
        if (!coords) throw error("induced_map_on_homology: image of a cycle is not a cycle");
        m.set_column(j, *coords);
    }
    return m;
}

}  // namespace vfckit
