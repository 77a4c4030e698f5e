#pragma once

#include "vfckit/complex.hpp"
#include "vfckit/poset.hpp"
#include "vfckit/shuffle.hpp"

#include <map>
#include <utility>
#include <vector>

namespace vfckit {

// Homotopy diagram over a finite poset: a complex A_{s,t} for every s <= t and
// structure maps A_{s,t} -> A_{s',t'} for s <= s' <= t' <= t, composing
// compatibly.  hocolim glues the diagonal entries along the wedges
// A_{s,s} <- A_{s,t} -> A_{t,t}.
class HomotopyDiagram {
  public:
    explicit HomotopyDiagram(FinitePoset poset) : poset_(std::move(poset)) {}

    static HomotopyDiagram constant(const FinitePoset& poset, const ComplexPtr& c) {
        HomotopyDiagram d(poset);
        for (std::size_t s = 0; s < poset.size(); ++s)
            for (std::size_t t = 0; t < poset.size(); ++t)
                if (poset.leq(s, t)) d.set_entry(s, t, c);
        for (std::size_t s = 0; s < poset.size(); ++s)
            for (std::size_t t = 0; t < poset.size(); ++t)
                for (std::size_t s2 = 0; s2 < poset.size(); ++s2)
                    for (std::size_t t2 = 0; t2 < poset.size(); ++t2)
                        if (poset.leq(s, s2) && poset.leq(s2, t2) && poset.leq(t2, t))
                            d.set_map(s, t, s2, t2, ChainMap::identity(c));
        return d;
    }

    const FinitePoset& poset() const { return poset_; }

    void set_entry(std::size_t s, std::size_t t, ComplexPtr c) {
        if (!poset_.leq(s, t)) throw error("diagram entry at non-comparable pair");
        entries_[{s, t}] = std::move(c);
    }

    void set_map(std::size_t s, std::size_t t, std::size_t s2, std::size_t t2, ChainMap m) {
        if (!(poset_.leq(s, s2) && poset_.leq(s2, t2) && poset_.leq(t2, t)))
            throw error("diagram structure map at invalid quadruple");
        maps_[{{s, t}, {s2, t2}}] = std::move(m);
    }

    const ComplexPtr& entry(std::size_t s, std::size_t t) const {
        auto it = entries_.find({s, t});
        if (it == entries_.end()) throw error("missing diagram entry");
        return it->second;
    }

    // Structure map A_{s,t} -> A_{s2,t2}; identity when source equals target.
    ChainMap structure_map(std::size_t s, std::size_t t, std::size_t s2, std::size_t t2) const {
        if (s == s2 && t == t2) return ChainMap::identity(entry(s, t));
        auto it = maps_.find({{s, t}, {s2, t2}});
        if (it == maps_.end()) throw error("missing diagram structure map");
        return it->second;
    }

    // The compatibility clause: any two-step factorization agrees with the
    // direct map, on every composable quadruple-chain.
    void validate() const {
        std::size_t n = poset_.size();
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t) {
                if (!poset_.leq(s, t)) continue;
                (void)entry(s, t);
                for (std::size_t s2 = 0; s2 < n; ++s2)
                    for (std::size_t t2 = 0; t2 < n; ++t2) {
                        if (!(poset_.leq(s, s2) && poset_.leq(s2, t2) && poset_.leq(t2, t)))
                            continue;
                        ChainMap direct = structure_map(s, t, s2, t2);
                        for (std::size_t s3 = s2; s3 < n; ++s3)
                            for (std::size_t t3 = 0; t3 < n; ++t3) {
                                if (!(poset_.leq(s2, s3) && poset_.leq(s3, t3) &&
                                      poset_.leq(t3, t2)))
                                    continue;
                                ChainMap two = structure_map(s2, t2, s3, t3)
                                                   .compose(structure_map(s, t, s2, t2));
                                ChainMap one = structure_map(s, t, s3, t3);
                                for (auto& [deg, r] : one.source()->module().ranks)
                                    if (two.at(deg) != one.at(deg))
                                        throw error("diagram structure maps do not compose");
                            }
                    }
            }
    }

  private:
    FinitePoset poset_;
    std::map<std::pair<std::size_t, std::size_t>, ComplexPtr> entries_;
    std::map<std::pair<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>,
             ChainMap>
        maps_;
};

// hocolim = (+)_{p >= 0} (+)_{s_0 < ... < s_p} A^{.+p}_{s_0,s_p}.  Sign
// convention (fixed here once; see also total_complex): face i of a p-chain
// carries (-1)^i, the internal differential of the p-summand carries (-1)^p.
struct HocolimResult {
    ComplexPtr complex;
    std::vector<std::vector<std::size_t>> chains;           // lexicographic
    std::map<std::pair<std::size_t, int>, std::size_t> offset;  // (chain, degree) -> column
    FinitePoset poset;

    std::size_t chain_index(const std::vector<std::size_t>& c) const {
        for (std::size_t i = 0; i < chains.size(); ++i)
            if (chains[i] == c) return i;
        throw error("hocolim: unknown chain");
    }
};

inline HocolimResult hocolim(const HomotopyDiagram& D) {
    D.validate();
    HocolimResult out;
    out.poset = D.poset();
    out.chains = D.poset().strict_chains();
    if (out.chains.empty()) {
        out.complex = zero_complex();
        return out;
    }
    GroundRing ring = D.entry(out.chains[0][0], out.chains[0][0])->ring();
    int parity_offset =
        D.entry(out.chains[0][0], out.chains[0][0])->module().parity_offset;

    GradedModule mod;
    mod.ring = ring;
    mod.parity_offset = parity_offset;
    int lo = 0, hi = 0;
    bool first = true;
    for (auto& c : out.chains) {
        const auto& A = D.entry(c.front(), c.back());
        if (A->module().ranks.empty()) continue;
        int p = int(c.size()) - 1;
        if (first || A->min_degree() - p < lo) lo = A->min_degree() - p;
        if (first || A->max_degree() - p > hi) hi = A->max_degree() - p;
        first = false;
    }
    for (int deg = lo; deg <= hi; ++deg) {
        std::size_t total = 0;
        for (std::size_t ci = 0; ci < out.chains.size(); ++ci) {
            auto& c = out.chains[ci];
            int p = int(c.size()) - 1;
            const auto& A = D.entry(c.front(), c.back());
            std::size_t r = A->rank(deg + p);
            if (!r) continue;
            out.offset[{ci, deg}] = total;
            total += r;
            for (std::size_t j = 0; j < r; ++j) {
                std::string lbl;
                for (auto s : c) lbl += (lbl.empty() ? "" : "<") + D.poset().name(s);
                mod.labels[deg].push_back(lbl + "|" + A->module().label(deg + p, j));
            }
        }
        if (total) mod.ranks[deg] = total;
    }

    std::map<int, ExactMatrix> d;
    for (int deg = lo; deg < hi + 1; ++deg) {
        if (!mod.rank(deg) || !mod.rank(deg + 1)) continue;
        ExactMatrix m(mod.rank(deg + 1), mod.rank(deg), ring);
        for (std::size_t ci = 0; ci < out.chains.size(); ++ci) {
            auto& c = out.chains[ci];
            int p = int(c.size()) - 1;
            const auto& A = D.entry(c.front(), c.back());
            if (!A->rank(deg + p) || !out.offset.count({ci, deg})) continue;
            std::size_t src = out.offset.at({ci, deg});
            // internal differential with sign (-1)^p
            if (A->rank(deg + p + 1) && out.offset.count({ci, deg + 1}))
                put_block(m, out.offset.at({ci, deg + 1}), src, A->d(deg + p),
                          (p % 2 == 0) ? 1 : -1);
            // face maps with sign (-1)^i
            for (int i = 0; i <= p; ++i) {
                if (p == 0) break;  // no faces of a vertex chain
                std::vector<std::size_t> face = c;
                face.erase(face.begin() + i);
                std::size_t fi = out.chain_index(face);
                if (!out.offset.count({fi, deg + 1})) continue;
                Rational sgn = (i % 2 == 0) ? 1 : -1;
                if (i == 0) {
                    ChainMap f = D.structure_map(c.front(), c.back(), c[1], c.back());
                    put_block(m, out.offset.at({fi, deg + 1}), src, f.at(deg + p), sgn);
                } else if (i == p) {
                    ChainMap f = D.structure_map(c.front(), c.back(), c.front(), c[p - 1]);
                    put_block(m, out.offset.at({fi, deg + 1}), src, f.at(deg + p), sgn);
                } else {
                    put_block(m, out.offset.at({fi, deg + 1}), src,
                              ExactMatrix::identity(A->rank(deg + p), ring), sgn);
                }
            }
        }
        if (!m.is_zero()) d[deg] = m;
    }
    out.complex = make_complex(std::move(mod), std::move(d), true);
    return out;
}

// Inclusion of the summand of a single vertex chain {s}.
inline ChainMap vertex_inclusion(const HocolimResult& h, const HomotopyDiagram& D,
                                 std::size_t s) {
    const auto& A = D.entry(s, s);
    std::size_t ci = h.chain_index({s});
    std::map<int, ExactMatrix> comp;
    for (auto& [deg, r] : A->module().ranks) {
        if (!h.offset.count({ci, deg})) continue;
        ExactMatrix m(h.complex->rank(deg), r, A->ring());
        put_block(m, h.offset.at({ci, deg}), 0, ExactMatrix::identity(r, A->ring()));
        comp[deg] = m;
    }
    return ChainMap(A, h.complex, std::move(comp), 0, true);
}

struct TerminalInclusion {
    bool applicable = false;     // poset has a maximum and maps are quasi-isos
    std::string failure;         // which precondition failed
    ChainMap inclusion;          // A_{top,top} -> hocolim
    bool quasi_iso = false;
};

// Lemma "terminal object for hocolim": with a unique maximal element and all
// maps A_{s,t} -> A_{s,t'} quasi-isomorphisms, the inclusion of the top entry
// is a quasi-isomorphism.  The verdict is computed, not assumed.
inline TerminalInclusion terminal_inclusion(const HomotopyDiagram& D) {
    TerminalInclusion out;
    auto maxima = D.poset().maximal_elements();
    if (maxima.size() != 1) {
        out.failure = "poset has " + std::to_string(maxima.size()) + " maximal elements";
        return out;
    }
    std::size_t n = D.poset().size();
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t t2 = 0; t2 < n; ++t2) {
                if (!(D.poset().leq(s, t2) && D.poset().leq(t2, t) && D.poset().leq(s, t)))
                    continue;
                if (!is_quasi_iso(D.structure_map(s, t, s, t2))) {
                    out.failure = "map A_{" + D.poset().name(s) + "," + D.poset().name(t) +
                                  "} -> A_{" + D.poset().name(s) + "," + D.poset().name(t2) +
                                  "} is not a quasi-isomorphism";
                    return out;
                }
            }
    out.applicable = true;
    HocolimResult h = hocolim(D);
    out.inclusion = vertex_inclusion(h, D, maxima[0]);
    out.quasi_iso = is_quasi_iso(out.inclusion);
    return out;
}

// Morphism of homotopy diagrams: a levelwise chain map per pair, commuting
// with the structure maps.
inline ChainMap hocolim_map(const HomotopyDiagram& D1, const HomotopyDiagram& D2,
                            const std::map<std::pair<std::size_t, std::size_t>, ChainMap>& phi,
                            const HocolimResult& h1, const HocolimResult& h2) {
    std::size_t n = D1.poset().size();
    if (D2.poset().size() != n) throw error("hocolim_map: poset mismatch");
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            if (!D1.poset().leq(s, t)) continue;
            for (std::size_t s2 = 0; s2 < n; ++s2)
                for (std::size_t t2 = 0; t2 < n; ++t2) {
                    if (!(D1.poset().leq(s, s2) && D1.poset().leq(s2, t2) &&
                          D1.poset().leq(t2, t)))
                        continue;
                    ChainMap lhs = phi.at({s2, t2}).compose(D1.structure_map(s, t, s2, t2));
                    ChainMap rhs = D2.structure_map(s, t, s2, t2).compose(phi.at({s, t}));
                    for (auto& [deg, r] : lhs.source()->module().ranks)
                        if (lhs.at(deg) != rhs.at(deg))
                            throw error("hocolim_map: morphism does not commute with structure "
                                        "maps");
                }
        }
    std::map<int, ExactMatrix> comp;
    for (auto& [deg, r] : h1.complex->module().ranks) {
        ExactMatrix m(h2.complex->rank(deg), r, h1.complex->ring());
        for (std::size_t ci = 0; ci < h1.chains.size(); ++ci) {
            auto& c = h1.chains[ci];
            int p = int(c.size()) - 1;
            if (!h1.offset.count({ci, deg}) || !h2.offset.count({ci, deg})) continue;
            const ChainMap& f = phi.at({c.front(), c.back()});
            put_block(m, h2.offset.at({ci, deg}), h1.offset.at({ci, deg}), f.at(deg + p));
        }
        comp[deg] = m;
    }
    return ChainMap(h1.complex, h2.complex, std::move(comp), 0, true);
}

// ---------------------------------------------------------------------------
// Tensor product of homotopy diagrams, with the Eilenberg-Zilber comparison
// map realizing the standard simplicial subdivision of the product of nerves.

struct DiagramTensor {
    HomotopyDiagram diagram;
    // per pair ((s,t) in SxT poset indices) the tensor bookkeeping
    std::map<std::pair<std::size_t, std::size_t>, TensorProduct> blocks;
};

inline std::size_t pair_index(const FinitePoset& T, std::size_t s, std::size_t t) {
    return s * T.size() + t;
}

inline DiagramTensor tensor_diagrams(const HomotopyDiagram& D1, const HomotopyDiagram& D2) {
    const FinitePoset& S = D1.poset();
    const FinitePoset& T = D2.poset();
    FinitePoset P = FinitePoset::product(S, T);
    DiagramTensor out{HomotopyDiagram(P), {}};
    for (std::size_t s = 0; s < S.size(); ++s)
        for (std::size_t s2 = 0; s2 < S.size(); ++s2) {
            if (!S.leq(s, s2)) continue;
            for (std::size_t t = 0; t < T.size(); ++t)
                for (std::size_t t2 = 0; t2 < T.size(); ++t2) {
                    if (!T.leq(t, t2)) continue;
                    TensorProduct tp = tensor(D1.entry(s, s2), D2.entry(t, t2));
                    out.diagram.set_entry(pair_index(T, s, t), pair_index(T, s2, t2),
                                          tp.complex);
                    out.blocks[{pair_index(T, s, t), pair_index(T, s2, t2)}] = std::move(tp);
                }
        }
    // structure maps: tensor of structure maps
    for (std::size_t s = 0; s < S.size(); ++s)
        for (std::size_t s2 = 0; s2 < S.size(); ++s2)
            for (std::size_t a = 0; a < S.size(); ++a)
                for (std::size_t a2 = 0; a2 < S.size(); ++a2) {
                    if (!(S.leq(s, a) && S.leq(a, a2) && S.leq(a2, s2) && S.leq(s, s2))) continue;
                    for (std::size_t t = 0; t < T.size(); ++t)
                        for (std::size_t t2 = 0; t2 < T.size(); ++t2)
                            for (std::size_t b = 0; b < T.size(); ++b)
                                for (std::size_t b2 = 0; b2 < T.size(); ++b2) {
                                    if (!(T.leq(t, b) && T.leq(b, b2) && T.leq(b2, t2) &&
                                          T.leq(t, t2)))
                                        continue;
                                    const TensorProduct& src =
                                        out.blocks.at({pair_index(T, s, t), pair_index(T, s2, t2)});
                                    const TensorProduct& dst =
                                        out.blocks.at({pair_index(T, a, b), pair_index(T, a2, b2)});
                                    ChainMap f = D1.structure_map(s, s2, a, a2);
                                    ChainMap g = D2.structure_map(t, t2, b, b2);
                                    // (f (x) g), g even so no Koszul signs
                                    std::map<int, ExactMatrix> comp;
                                    const ComplexPtr& A = D1.entry(s, s2);
                                    const ComplexPtr& B = D2.entry(t, t2);
                                    for (auto& [deg, r] : src.complex->module().ranks) {
                                        ExactMatrix m(dst.complex->rank(deg), r,
                                                      src.complex->ring());
                                        for (auto& [i, ra] : A->module().ranks) {
                                            std::size_t rb = B->rank(deg - i);
                                            if (!ra || !rb) continue;
                                            ExactMatrix fi = f.at(i);
                                            ExactMatrix gj = g.at(deg - i);
                                            for (std::size_t r1 = 0; r1 < fi.rows(); ++r1)
                                                for (std::size_t c1 = 0; c1 < fi.cols(); ++c1) {
                                                    if (fi.at(r1, c1) == 0) continue;
                                                    for (std::size_t r2 = 0; r2 < gj.rows(); ++r2)
                                                        for (std::size_t c2 = 0; c2 < gj.cols();
                                                             ++c2) {
                                                            if (gj.at(r2, c2) == 0) continue;
                                                            m.at(dst.index(deg, i, r1, r2,
                                                                           gj.rows()),
                                                                 src.index(deg, i, c1, c2,
                                                                           gj.cols())) +=
                                                                fi.at(r1, c1) * gj.at(r2, c2);
                                                        }
                                                }
                                        }
                                        comp[deg] = m;
                                    }
                                    out.diagram.set_map(
                                        pair_index(T, s, t), pair_index(T, s2, t2),
                                        pair_index(T, a, b), pair_index(T, a2, b2),
                                        ChainMap(src.complex, dst.complex, std::move(comp), 0,
                                                 true));
                                }
                }
    return out;
}

// Comparison map hocolim(D1) (x) hocolim(D2) -> hocolim(D1 (x) D2); a chain
// map (validated), quasi-isomorphism on all tested diagrams.  The extra
// Koszul factor (-1)^{q * deg_A} compensates the (-1)^p internal-sign
// convention of hocolim, exactly as for the swap of suspensions.
inline ChainMap ez_comparison(const HomotopyDiagram& D1, const HomotopyDiagram& D2,
                              const HocolimResult& h1, const HocolimResult& h2,
                              const DiagramTensor& dt, const HocolimResult& hprod,
                              const TensorProduct& outer) {
    const FinitePoset& T = D2.poset();
    std::map<int, ExactMatrix> comp;
    for (auto& [deg, total] : outer.complex->module().ranks) {
        ExactMatrix m(hprod.complex->rank(deg), total, outer.complex->ring());
        for (auto& [n1, r1] : h1.complex->module().ranks) {
            std::size_t r2 = h2.complex->rank(deg - n1);
            if (!r1 || !r2 || !outer.block_offset.count({deg, n1})) continue;
            int n2 = deg - n1;
            // run over chain summands on both sides
            for (std::size_t ci = 0; ci < h1.chains.size(); ++ci) {
                if (!h1.offset.count({ci, n1})) continue;
                auto& c1 = h1.chains[ci];
                int p = int(c1.size()) - 1;
                const ComplexPtr& A = D1.entry(c1.front(), c1.back());
                int a = n1 + p;
                std::size_t ra = A->rank(a);
                for (std::size_t cj = 0; cj < h2.chains.size(); ++cj) {
                    if (!h2.offset.count({cj, n2})) continue;
                    auto& c2 = h2.chains[cj];
                    int q = int(c2.size()) - 1;
                    const ComplexPtr& B = D2.entry(c2.front(), c2.back());
                    int b = n2 + q;
                    std::size_t rb = B->rank(b);
                    if (!ra || !rb) continue;
                    std::vector<std::pair<std::vector<int>, int>> sh;
                    detail::shuffles(std::size_t(p), std::size_t(q), sh);
                    for (auto& [word, sgn0] : sh) {
                        // staircase chain in S x T
                        std::vector<std::size_t> chain;
                        std::size_t ia = 0, ib = 0;
                        chain.push_back(pair_index(T, c1[0], c2[0]));
                        for (int w : word) {
                            if (w == 0)
                                ++ia;
                            else
                                ++ib;
                            chain.push_back(pair_index(T, c1[ia], c2[ib]));
                        }
                        std::size_t ck = hprod.chain_index(chain);
                        if (!hprod.offset.count({ck, deg})) continue;
                        const TensorProduct& tp = dt.blocks.at({chain.front(), chain.back()});
                        int sgn = sgn0;
                        if ((q * a) % 2 != 0) sgn = -sgn;
                        std::size_t dst0 = hprod.offset.at({ck, deg});
                        std::size_t srcA = h1.offset.at({ci, n1});
                        std::size_t srcB = h2.offset.at({cj, n2});
                        for (std::size_t x = 0; x < ra; ++x)
                            for (std::size_t y = 0; y < rb; ++y) {
                                std::size_t src = outer.index(deg, n1, srcA + x, srcB + y,
                                                              h2.complex->rank(n2));
                                std::size_t dst = dst0 + tp.index(a + b, a, x, y, rb);
                                m.at(dst, src) += sgn;
                            }
                    }
                }
            }
        }
        comp[deg] = m;
    }
    return ChainMap(outer.complex, hprod.complex, std::move(comp), 0, true);
}

// ---------------------------------------------------------------------------
// Derived inverse limits over finite posets.  Bonds go downward: for l <= m a
// chain map C_m -> C_l.  The normalized model keeps strict chains only
// (degenerate weak chains are quotiented out), so the complex is finite.

class InverseSystem {
  public:
    explicit InverseSystem(FinitePoset poset) : poset_(std::move(poset)) {}

    const FinitePoset& poset() const { return poset_; }

    void set_complex(std::size_t l, ComplexPtr c) { complexes_[l] = std::move(c); }
    void set_bond(std::size_t l, std::size_t m, ChainMap f) {
        if (!poset_.less(l, m)) throw error("bond at non-comparable pair");
        bonds_[{l, m}] = std::move(f);
    }

    const ComplexPtr& complex_at(std::size_t l) const {
        auto it = complexes_.find(l);
        if (it == complexes_.end()) throw error("missing inverse-system complex");
        return it->second;
    }

    ChainMap bond(std::size_t l, std::size_t m) const {  // C_m -> C_l for l <= m
        if (l == m) return ChainMap::identity(complex_at(l));
        auto it = bonds_.find({l, m});
        if (it == bonds_.end()) throw error("missing inverse-system bond");
        return it->second;
    }

    void validate() const {
        for (std::size_t l = 0; l < poset_.size(); ++l) (void)complex_at(l);
        for (std::size_t l = 0; l < poset_.size(); ++l)
            for (std::size_t m = 0; m < poset_.size(); ++m)
                for (std::size_t k = 0; k < poset_.size(); ++k) {
                    if (!(poset_.less(l, m) && poset_.less(m, k))) continue;
                    ChainMap two = bond(l, m).compose(bond(m, k));
                    ChainMap one = bond(l, k);
                    for (auto& [deg, r] : one.source()->module().ranks)
                        if (two.at(deg) != one.at(deg))
                            throw error("inverse-system bonds do not compose");
                }
    }

  private:
    FinitePoset poset_;
    std::map<std::size_t, ComplexPtr> complexes_;
    std::map<std::pair<std::size_t, std::size_t>, ChainMap> bonds_;
};

struct RlimResult {
    ComplexPtr complex;
    std::vector<std::vector<std::size_t>> chains;  // strict chains
    std::map<std::pair<std::size_t, int>, std::size_t> offset;

    std::size_t chain_index(const std::vector<std::size_t>& c) const {
        for (std::size_t i = 0; i < chains.size(); ++i)
            if (chains[i] == c) return i;
        throw error("rlim: unknown chain");
    }
};

// Rlim = prod over strict chains l_0 < ... < l_q of C^{.-q}_{l_0}, with the
// nerve-cochain differential: inserting new chains, the deleted-index-0 face
// transports along the bond.  q_bound below the poset height is an error (the
// normalized complex would still change).
inline RlimResult rlim(const InverseSystem& S, int q_bound = -1) {
    S.validate();
    RlimResult out;
    std::size_t height = S.poset().size() ? S.poset().height() : 0;
    if (q_bound < 0) q_bound = int(height);
    if (std::size_t(q_bound) < height)
        throw error("rlim: q-bound " + std::to_string(q_bound) +
                    " below poset height " + std::to_string(height) +
                    "; normalized complex not stable");
    out.chains = S.poset().strict_chains();
    if (out.chains.empty()) {
        out.complex = zero_complex();
        return out;
    }
    GroundRing ring = S.complex_at(0)->ring();
    GradedModule mod;
    mod.ring = ring;
    mod.parity_offset = S.complex_at(0)->module().parity_offset;
    int lo = 0, hi = 0;
    bool first = true;
    for (auto& c : out.chains) {
        const auto& C = S.complex_at(c.front());
        if (C->module().ranks.empty()) continue;
        int q = int(c.size()) - 1;
        if (first || C->min_degree() + q < lo) lo = C->min_degree() + q;
        if (first || C->max_degree() + q > hi) hi = C->max_degree() + q;
        first = false;
    }
    for (int deg = lo; deg <= hi; ++deg) {
        std::size_t total = 0;
        for (std::size_t ci = 0; ci < out.chains.size(); ++ci) {
            auto& c = out.chains[ci];
            int q = int(c.size()) - 1;
            std::size_t r = S.complex_at(c.front())->rank(deg - q);
            if (!r) continue;
            out.offset[{ci, deg}] = total;
            total += r;
        }
        if (total) mod.ranks[deg] = total;
    }
    std::map<int, ExactMatrix> d;
    for (int deg = lo; deg < hi + 1; ++deg) {
        if (!mod.rank(deg) || !mod.rank(deg + 1)) continue;
        ExactMatrix m(mod.rank(deg + 1), mod.rank(deg), ring);
        // For each (q+1)-chain e and deletion position j, the face e\j (a
        // q-chain) contributes (-1)^j from column (e\j) into row e.
        for (std::size_t ei = 0; ei < out.chains.size(); ++ei) {
            auto& e = out.chains[ei];
            int q1 = int(e.size()) - 1;  // this is q+1 in the formula
            if (q1 < 1) continue;
            if (!out.offset.count({ei, deg + 1})) continue;
            std::size_t dst = out.offset.at({ei, deg + 1});
            for (int j = 0; j <= q1; ++j) {
                std::vector<std::size_t> face = e;
                face.erase(face.begin() + j);
                std::size_t fi = out.chain_index(face);
                if (!out.offset.count({fi, deg})) continue;
                Rational sgn = (j % 2 == 0) ? 1 : -1;
                if (j == 0) {
                    // value lives at C_{e[1]}; transport to C_{e[0]}
                    ChainMap bond = S.bond(e[0], e[1]);
                    put_block(m, dst, out.offset.at({fi, deg}), bond.at(deg - (q1 - 1)), sgn);
                } else {
                    std::size_t r = S.complex_at(e.front())->rank(deg - (q1 - 1));
                    put_block(m, dst, out.offset.at({fi, deg}),
                              ExactMatrix::identity(r, ring), sgn);
                }
            }
        }
        // internal differential with sign (-1)^q
        for (std::size_t ci = 0; ci < out.chains.size(); ++ci) {
            auto& c = out.chains[ci];
            int q = int(c.size()) - 1;
            if (!out.offset.count({ci, deg}) || !out.offset.count({ci, deg + 1})) continue;
            put_block(m, out.offset.at({ci, deg + 1}), out.offset.at({ci, deg}),
                      S.complex_at(c.front())->d(deg - q), (q % 2 == 0) ? 1 : -1);
        }
        if (!m.is_zero()) d[deg] = m;
    }
    out.complex = make_complex(std::move(mod), std::move(d), true);
    return out;
}

// lim^i of an inverse system of modules (complexes concentrated in degree 0).
inline HomologyGroup lim_i(const InverseSystem& S, int i) { return rlim(S).complex->homology(i); }

// Brute-force categorical inverse limit of modules-in-degree-0: compatible
// families (x_l) with bond(x_m) = x_l; returns its rank.
inline std::size_t inverse_limit_rank(const InverseSystem& S) {
    S.validate();
    std::size_t n = S.poset().size();
    std::vector<std::size_t> off(n + 1, 0);
    for (std::size_t l = 0; l < n; ++l) off[l + 1] = off[l] + S.complex_at(l)->rank(0);
    std::vector<std::vector<Rational>> rows;
    for (std::size_t l = 0; l < n; ++l)
        for (std::size_t m2 = 0; m2 < n; ++m2) {
            if (!S.poset().less(l, m2)) continue;
            ExactMatrix b = S.bond(l, m2).at(0);
            for (std::size_t r = 0; r < S.complex_at(l)->rank(0); ++r) {
                std::vector<Rational> row(off[n], Rational(0));
                row[off[l] + r] -= 1;
                for (std::size_t c = 0; c < b.cols(); ++c) row[off[m2] + c] += b.at(r, c);
                rows.push_back(std::move(row));
            }
        }
    if (rows.empty()) return off[n];
    ExactMatrix m(rows.size(), off[n], GroundRing::rationals());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < off[n]; ++c) m.at(r, c) = rows[r][c];
    return nullspace_q(m).size();
}

struct CofinalityVerdict {
    bool cofinal = false;
    bool quasi_iso = false;
    std::string failure;
};

// f: S' -> S weakly increasing with cofinal image (every element of S lies
// below some f(s')); the induced map on rlim is then a quasi-isomorphism.
inline CofinalityVerdict cofinality_check(const FinitePoset& sub,
                                          const std::vector<std::size_t>& f,
                                          const InverseSystem& S) {
    CofinalityVerdict out;
    if (f.size() != sub.size()) throw error("cofinality_check: map size mismatch");
    for (std::size_t a = 0; a < sub.size(); ++a)
        for (std::size_t b = 0; b < sub.size(); ++b)
            if (sub.leq(a, b) && !S.poset().leq(f[a], f[b])) {
                out.failure = "map not order-preserving";
                return out;
            }
    for (std::size_t l = 0; l < S.poset().size(); ++l) {
        bool covered = false;
        for (auto fl : f)
            if (S.poset().leq(l, fl)) covered = true;
        if (!covered) {
            out.failure = "image not cofinal: element " + S.poset().name(l) + " uncovered";
            return out;
        }
    }
    out.cofinal = true;
    // Pull the system back along f and compare rlim complexes.
    InverseSystem pulled(sub);
    for (std::size_t a = 0; a < sub.size(); ++a) pulled.set_complex(a, S.complex_at(f[a]));
    for (std::size_t a = 0; a < sub.size(); ++a)
        for (std::size_t b = 0; b < sub.size(); ++b) {
            if (!sub.less(a, b)) continue;
            if (f[a] == f[b])
                pulled.set_bond(a, b, ChainMap::identity(S.complex_at(f[a])));
            else
                pulled.set_bond(a, b, S.bond(f[a], f[b]));
        }
    RlimResult big = rlim(S), small = rlim(pulled);
    // restriction along f on normalized cochains: strict chains with
    // degenerate image restrict to zero.
    std::map<int, ExactMatrix> comp;
    for (auto& [deg, r] : big.complex->module().ranks) {
        ExactMatrix m(small.complex->rank(deg), r, big.complex->ring());
        for (std::size_t ci = 0; ci < small.chains.size(); ++ci) {
            auto& c = small.chains[ci];
            if (!small.offset.count({ci, deg})) continue;
            std::vector<std::size_t> image;
            for (auto a : c) image.push_back(f[a]);
            bool strict = true;
            for (std::size_t k = 0; k + 1 < image.size(); ++k)
                if (!S.poset().less(image[k], image[k + 1])) strict = false;
            if (!strict) continue;
            std::size_t bi = 0;
            bool found = false;
            for (std::size_t k = 0; k < big.chains.size(); ++k)
                if (big.chains[k] == image) {
                    bi = k;
                    found = true;
                }
            if (!found || !big.offset.count({bi, deg})) continue;
            int q = int(c.size()) - 1;
            std::size_t rr = S.complex_at(image.front())->rank(deg - q);
            put_block(m, small.offset.at({ci, deg}), big.offset.at({bi, deg}),
                      ExactMatrix::identity(rr, big.complex->ring()));
        }
        comp[deg] = m;
    }
    ChainMap restriction(big.complex, small.complex, std::move(comp), 0, true);
    out.quasi_iso = is_quasi_iso(restriction);
    return out;
}

}  // namespace vfckit
