#pragma once

#include "vfckit/simplicial.hpp"

#include <map>
#include <optional>
#include <string>

namespace vfckit {

// Rank-one local system on the face poset of a complex: a sign for every
// codimension-one face pair, flat around codimension two (both middle faces
// give equal products).  Transport along arbitrary face relations is the
// product over any codimension-one chain.
class FacePairSystem {
  public:
    FacePairSystem() = default;
    explicit FacePairSystem(SimplicialComplex base) : base_(std::move(base)) {}

    const SimplicialComplex& base() const { return base_; }

    void set(const Simplex& face, const Simplex& coface, int sign) {
        if (sign != 1 && sign != -1) throw error("local system sign must be +-1");
        signs_[{face, coface}] = sign;
    }

    int sign(const Simplex& face, const Simplex& coface) const {
        if (face == coface) return 1;
        if (face.size() + 1 == coface.size()) {
            auto it = signs_.find({face, coface});
            if (it == signs_.end())
                throw error("local system: missing sign for " + simplex_name(face) + " < " +
                            simplex_name(coface));
            return it->second;
        }
        // factor through any intermediate face; flatness makes this well defined
        for (std::size_t drop = 0; drop < coface.size(); ++drop) {
            Simplex mid = coface;
            mid.erase(mid.begin() + drop);
            if (mid.size() < face.size()) break;
            if (!std::includes(mid.begin(), mid.end(), face.begin(), face.end())) continue;
            if (!base_.contains(mid)) continue;
            return sign(face, mid) * sign(mid, coface);
        }
        throw error("local system: no face chain from " + simplex_name(face) + " to " +
                    simplex_name(coface));
    }

    // Flatness: for codimension-two pairs both factorizations agree.
    bool flat(std::string* witness = nullptr) const {
        for (const auto& rho : base_.all_simplices()) {
            if (rho.size() < 3) continue;
            for (std::size_t a = 0; a < rho.size(); ++a)
                for (std::size_t b = a + 1; b < rho.size(); ++b) {
                    Simplex sigma = rho;
                    sigma.erase(sigma.begin() + b);
                    sigma.erase(sigma.begin() + a);
                    Simplex mid1 = rho, mid2 = rho;
                    mid1.erase(mid1.begin() + a);
                    mid2.erase(mid2.begin() + b);
                    int s1 = sign(sigma, mid1) * sign(mid1, rho);
                    int s2 = sign(sigma, mid2) * sign(mid2, rho);
                    if (s1 != s2) {
                        if (witness)
                            *witness = "holonomy around " + simplex_name(sigma) + " < " +
                                       simplex_name(rho);
                        return false;
                    }
                }
        }
        return true;
    }

    static FacePairSystem trivial(const SimplicialComplex& base) {
        FacePairSystem out(base);
        for (const auto& s : base.all_simplices())
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                if (s.size() == 1) continue;
                Simplex f = s;
                f.erase(f.begin() + drop);
                out.set(f, s, 1);
            }
        return out;
    }

    FacePairSystem restricted_to(const SimplicialComplex& k) const {
        FacePairSystem out(k);
        for (const auto& s : k.all_simplices())
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                if (s.size() == 1) continue;
                Simplex f = s;
                f.erase(f.begin() + drop);
                out.set(f, s, sign(f, s));
            }
        return out;
    }

    // Tensor of two systems on the same base: signs multiply.
    FacePairSystem tensor_with(const FacePairSystem& o) const {
        FacePairSystem out(base_);
        for (auto& [pair, s] : signs_) out.set(pair.first, pair.second, s * o.sign(pair.first, pair.second));
        return out;
    }

  private:
    SimplicialComplex base_;
    std::map<std::pair<Simplex, Simplex>, int> signs_;
};

// ---------------------------------------------------------------------------
// The orientation sheaf of a triangulated manifold, computed intrinsically:
// the stalk over the barycenter of s is H_n(M, M - s) via the star-complement
// model, its canonical generator normalized so that the lexicographically
// first top simplex carries a positive coefficient.  Transitions between
// stalks of comparable faces give the face-pair signs.

struct OrientationStalk {
    std::vector<Rational> cycle;  // relative fundamental cycle in top degree
    bool free_rank_one = false;
};

class OrientationSystem {
  public:
    // For closed manifolds, every stalk has rank one.  For manifolds with
    // boundary the stalks are computed on star complements as well (rank one
    // for interior simplices; boundary simplices use the half-space model
    // H_n(M, M - closed star), also rank one).
    static OrientationSystem compute(const SimplicialComplex& m) {
        OrientationSystem out;
        out.base_ = m;
        out.dim_ = m.dimension();
        out.boundary_ = m.combinatorial_boundary();
        for (const auto& s : m.all_simplices()) {
            OrientationStalk stalk = out.compute_stalk(s);
            if (!stalk.free_rank_one)
                throw error("orientation system: local homology at " + simplex_name(s) +
                            " is not free of rank one (non-manifold?)");
            out.stalks_[s] = std::move(stalk);
        }
        out.system_ = FacePairSystem(m);
        for (const auto& s : m.all_simplices())
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                if (s.size() == 1) continue;
                Simplex f = s;
                f.erase(f.begin() + drop);
                out.system_.set(f, s, out.transition(f, s));
            }
        std::string witness;
        if (!out.system_.flat(&witness))
            throw error("orientation system not flat: " + witness);
        return out;
    }

    const FacePairSystem& face_signs() const { return system_; }
    const SimplicialComplex& base() const { return base_; }

    // Global orientation class when it exists: a top-degree cycle restricting
    // to +-generator at every stalk; empty for non-orientable manifolds.
    std::optional<std::vector<Rational>> global_orientation() const {
        auto tops = base_.simplices(dim_);
        if (tops.empty()) return std::nullopt;
        // signs eps_t with eps compatible across codim-1 faces: solve by
        // propagation; fail on holonomy.
        std::map<Simplex, int> eps;
        std::vector<Simplex> stack{tops[0]};
        eps[tops[0]] = 1;
        while (!stack.empty()) {
            Simplex t = stack.back();
            stack.pop_back();
            for (std::size_t drop = 0; drop < t.size(); ++drop) {
                Simplex f = t;
                f.erase(f.begin() + drop);
                for (const auto& t2 : tops) {
                    if (t2 == t) continue;
                    if (!std::includes(t2.begin(), t2.end(), f.begin(), f.end())) continue;
                    int rel = pairing_through_face(t, t2, f);
                    int want = eps.at(t) * rel;
                    auto it = eps.find(t2);
                    if (it == eps.end()) {
                        eps[t2] = want;
                        stack.push_back(t2);
                    } else if (it->second != want) {
                        return std::nullopt;  // non-orientable
                    }
                }
            }
        }
        std::vector<Rational> cycle(tops.size(), Rational(0));
        for (std::size_t i = 0; i < tops.size(); ++i) {
            auto it = eps.find(tops[i]);
            cycle[i] = it == eps.end() ? Rational(0) : Rational(it->second);
        }
        return cycle;
    }

  private:
    OrientationStalk compute_stalk(const Simplex& s) const {
        OrientationStalk out;
        // Kill the combinatorial boundary as well: this computes the stalk of
        // j_* of the interior orientation sheaf, which is rank one also on
        // boundary simplices of a manifold with boundary.  In top degree there
        // are no boundaries, so the stalk is just the kernel of the top
        // differential of the pair complex.
        auto pair = SimplicialPair{base_, base_.star_complement(s).unite(boundary_)};
        auto c = simplicial_chains(pair);
        if (c->rank(-dim_) == 0) return out;
        auto ker = kernel_basis(c->d(-dim_));
        if (ker.size() != 1) return out;
        out.cycle = ker[0];
        for (auto& x : out.cycle) {
            if (x == 0) continue;
            if (x < 0)
                for (auto& y : out.cycle) y = -y;
            break;
        }
        out.free_rank_one = true;
        return out;
    }

    // Transition stalk(f) -> stalk(s) for f < s: in top degree classes are
    // cycles on the nose, so the image of the f-generator must be a unit
    // multiple of the s-generator coefficient by coefficient.
    int transition(const Simplex& f, const Simplex& s) const {
        auto tops_f = alive(f), tops_s = alive(s);
        const auto& gen_f = stalks_.at(f).cycle;
        const auto& gen_s = stalks_.at(s).cycle;
        Rational lambda = 0;
        for (std::size_t j = 0; j < tops_s.size(); ++j) {
            auto it = std::find(tops_f.begin(), tops_f.end(), tops_s[j]);
            if (it == tops_f.end())
                throw error("orientation transition: star inclusion violated");
            const Rational& a = gen_f[it - tops_f.begin()];
            const Rational& b = gen_s[j];
            if (b == 0) throw error("orientation: stalk generator vanishes on a top simplex");
            Rational ratio = a / b;
            if (lambda == 0)
                lambda = ratio;
            else if (lambda != ratio)
                throw error("orientation transition at " + simplex_name(f) + " < " +
                            simplex_name(s) + " is not well defined");
        }
        if (lambda != 1 && lambda != -1)
            throw error("orientation transition at " + simplex_name(f) + " < " +
                        simplex_name(s) + " is not a unit");
        return lambda == 1 ? 1 : -1;
    }

    std::vector<Simplex> alive(const Simplex& s) const {
        std::vector<Simplex> out;
        auto comp = base_.star_complement(s).unite(boundary_);
        for (const auto& t : base_.simplices(dim_))
            if (!comp.contains(t)) out.push_back(t);
        return out;
    }

    // Induced pairing of adjacent top simplices through a shared codim-1 face:
    // +1 when their fundamental-class coefficients at the face-stalk agree.
    int pairing_through_face(const Simplex& t1, const Simplex& t2, const Simplex& f) const {
        const auto& stalk = stalks_.at(f);
        auto tf = alive(f);
        Rational c1, c2;
        for (std::size_t i = 0; i < tf.size(); ++i) {
            if (tf[i] == t1) c1 = stalk.cycle[i];
            if (tf[i] == t2) c2 = stalk.cycle[i];
        }
        if (c1 == 0 || c2 == 0) throw error("orientation: degenerate face stalk");
        return (c1.sign() == c2.sign()) ? 1 : -1;
    }

    SimplicialComplex base_;
    SimplicialComplex boundary_;
    int dim_ = 0;
    FacePairSystem system_;
    std::map<Simplex, OrientationStalk> stalks_;
};

// Twisted simplicial chains of K with coefficients in a face-pair system:
// boundary = sum of (-1)^j t(face_j, s) face_j.
inline ComplexPtr twisted_chains(const SimplicialComplex& k, const FacePairSystem& t,
                                 GroundRing ring = GroundRing::integers()) {
    GradedModule mod;
    mod.ring = ring;
    int dim = k.dimension();
    std::map<int, std::vector<Simplex>> gens;
    for (int q = 0; q <= dim; ++q) {
        gens[q] = k.simplices(q);
        if (!gens[q].empty()) mod.ranks[-q] = gens[q].size();
        for (auto& s : gens[q]) mod.labels[-q].push_back(simplex_name(s));
    }
    std::map<int, ExactMatrix> d;
    for (int q = 1; q <= dim; ++q) {
        if (gens[q].empty() || gens[q - 1].empty()) continue;
        ExactMatrix m(gens[q - 1].size(), gens[q].size(), ring);
        for (std::size_t j = 0; j < gens[q].size(); ++j) {
            const Simplex& s = gens[q][j];
            for (std::size_t f = 0; f < s.size(); ++f) {
                Simplex face = s;
                face.erase(face.begin() + f);
                std::size_t fi = k.index_of(face);
                int sgn = ((f % 2 == 0) ? 1 : -1) * t.sign(face, s);
                m.at(fi, j) += sgn;
            }
        }
        if (!m.is_zero()) d[-q] = m;
    }
    return make_complex(std::move(mod), std::move(d), true);
}

// Twisted simplicial cochains (optionally relative to a subcomplex rel whose
// cochains are set to zero); degree q sits at cohomological degree +q.
inline ComplexPtr twisted_cochains(const SimplicialComplex& k, const FacePairSystem& t,
                                   GroundRing ring = GroundRing::integers(),
                                   const SimplicialComplex* rel = nullptr) {
    GradedModule mod;
    mod.ring = ring;
    int dim = k.dimension();
    std::map<int, std::vector<Simplex>> gens;
    std::map<Simplex, std::size_t> pos;
    for (int q = 0; q <= dim; ++q) {
        for (const auto& s : k.simplices(q)) {
            if (rel && rel->contains(s)) continue;
            pos[s] = gens[q].size();
            gens[q].push_back(s);
            mod.labels[q].push_back(simplex_name(s));
        }
        if (!gens[q].empty()) mod.ranks[q] = gens[q].size();
    }
    std::map<int, ExactMatrix> d;
    for (int q = 1; q <= dim; ++q) {
        if (gens[q].empty() || gens[q - 1].empty()) continue;
        ExactMatrix m(gens[q].size(), gens[q - 1].size(), ring);
        for (std::size_t j = 0; j < gens[q].size(); ++j) {
            const Simplex& s = gens[q][j];
            for (std::size_t f = 0; f < s.size(); ++f) {
                Simplex face = s;
                face.erase(face.begin() + f);
                auto it = pos.find(face);
                if (it == pos.end()) continue;
                int sgn = ((f % 2 == 0) ? 1 : -1) * t.sign(face, s);
                m.at(j, it->second) += sgn;
            }
        }
        if (!m.is_zero()) d[q - 1] = m;
    }
    return make_complex(std::move(mod), std::move(d), true);
}

}  // namespace vfckit
