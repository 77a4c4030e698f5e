#pragma once

#include "vfckit/matrix.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace vfckit {

// One term c * T^{(gr, a)} of a Novikov series.  The a-adic norm e^{-a} is
// never evaluated; all convergence statements are action thresholds.
struct NovikovTerm {
    int gr = 0;
    Rational action = 0;
    Rational coeff = 0;
};

// Truncated element of the graded completion R[[T]]: finitely many terms, all
// of action strictly below the cutoff; comparisons below the cutoff are
// exact, at or above it unknown.  Absent cutoff means the element is exact.
class NovikovSeries {
  public:
    NovikovSeries() = default;
    explicit NovikovSeries(GroundRing ring) : ring_(ring) {}

    static NovikovSeries scalar(const Rational& c, GroundRing ring = GroundRing::rationals()) {
        NovikovSeries s(ring);
        if (c != 0) s.terms_.push_back({0, 0, c});
        return s;
    }

    static NovikovSeries monomial(int gr, const Rational& action, const Rational& coeff,
                                  GroundRing ring = GroundRing::rationals()) {
        NovikovSeries s(ring);
        if (coeff != 0) s.terms_.push_back({gr, action, coeff});
        return s;
    }

    const GroundRing& ring() const { return ring_; }
    const std::vector<NovikovTerm>& terms() const { return terms_; }
    const std::optional<Rational>& cutoff() const { return cutoff_; }

    bool known_zero() const { return terms_.empty(); }
    bool is_exact() const { return !cutoff_.has_value(); }

    std::optional<Rational> min_action() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.front().action;
    }

    NovikovSeries truncated(const Rational& cut) const {
        NovikovSeries out = *this;
        out.cutoff_ = cutoff_ ? std::min(*cutoff_, cut) : cut;
        out.drop_at_cutoff();
        return out;
    }

    NovikovSeries plus(const NovikovSeries& o) const {
        require_same_ring(o);
        NovikovSeries out(ring_);
        out.cutoff_ = min_cutoff(cutoff_, o.cutoff_);
        out.terms_ = terms_;
        for (const auto& t : o.terms_) out.add_term(t);
        out.normalize();
        return out;
    }

    NovikovSeries negated() const { return scaled(Rational(-1)); }

    NovikovSeries scaled(const Rational& c) const {
        NovikovSeries out(ring_);
        out.cutoff_ = cutoff_;
        if (c != 0)
            for (auto t : terms_) {
                t.coeff *= c;
                out.terms_.push_back(t);
            }
        return out;
    }

    NovikovSeries times(const NovikovSeries& o) const {
        require_same_ring(o);
        NovikovSeries out(ring_);
        // error terms: unknown part of one factor times known part of the other
        std::optional<Rational> cut;
        if (cutoff_) {
            Rational shift = o.terms_.empty() ? (o.cutoff_ ? *o.cutoff_ : Rational(0))
                                              : o.terms_.front().action;
            cut = min_cutoff(cut, *cutoff_ + shift);
        }
        if (o.cutoff_) {
            Rational shift =
                terms_.empty() ? (cutoff_ ? *cutoff_ : Rational(0)) : terms_.front().action;
            cut = min_cutoff(cut, *o.cutoff_ + shift);
        }
        if (cutoff_ && o.cutoff_) cut = min_cutoff(cut, *cutoff_ + *o.cutoff_);
        out.cutoff_ = cut;
        for (const auto& t1 : terms_)
            for (const auto& t2 : o.terms_)
                out.add_term({t1.gr + t2.gr, t1.action + t2.action, t1.coeff * t2.coeff});
        out.normalize();
        return out;
    }

    // Inverse of a series whose leading coefficient is a unit: geometric
    // series in the action-positive tail, truncated at the effective cutoff.
    NovikovSeries inverse() const {
        if (terms_.empty()) throw error("novikov inverse of (unknown) zero");
        NovikovTerm lead = terms_.front();
        std::size_t lead_count = 0;
        for (const auto& t : terms_)
            if (t.action == lead.action) ++lead_count;
        if (lead_count != 1)
            throw error("novikov inverse: multiple leading terms at one action");
        if (!ring_.is_unit(lead.coeff)) throw error("novikov inverse: leading coefficient not a unit");
        NovikovSeries linv = monomial(-lead.gr, -lead.action, Rational(1) / lead.coeff, ring_);
        // x = lead (1 + u) with u strictly action-positive; 1/x is the
        // geometric series in -u, truncated at the u-level cutoff.
        NovikovSeries u(ring_);
        for (std::size_t i = 1; i < terms_.size(); ++i)
            u.terms_.push_back({terms_[i].gr - lead.gr, terms_[i].action - lead.action,
                                terms_[i].coeff / lead.coeff});
        if (cutoff_) u.cutoff_ = *cutoff_ - lead.action;
        NovikovSeries acc = scalar(1, ring_);
        if (u.cutoff_) acc = acc.truncated(*u.cutoff_);
        if (!u.known_zero()) {
            Rational eps = u.terms_.front().action;
            if (eps <= 0) throw error("novikov inverse: tail not action-positive");
            if (!u.cutoff_)
                throw error("novikov inverse: exact series with a tail; truncate first");
            Rational stop = *u.cutoff_;
            NovikovSeries power = u;
            int sign = -1;
            while (!power.known_zero() && *power.min_action() < stop) {
                acc = acc.plus(power.scaled(sign)).truncated(stop);
                power = power.times(u).truncated(stop);
                sign = -sign;
            }
        }
        return linv.times(acc);
    }

    bool equals_up_to_cutoff(const NovikovSeries& o) const {
        Rational cut;
        bool has = false;
        if (cutoff_) {
            cut = *cutoff_;
            has = true;
        }
        if (o.cutoff_ && (!has || *o.cutoff_ < cut)) {
            cut = *o.cutoff_;
            has = true;
        }
        auto a = terms_;
        auto b = o.terms_;
        auto trim = [&](std::vector<NovikovTerm>& v) {
            if (!has) return;
            v.erase(std::remove_if(v.begin(), v.end(),
                                   [&](const NovikovTerm& t) { return t.action >= cut; }),
                    v.end());
        };
        trim(a);
        trim(b);
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i].gr != b[i].gr || a[i].action != b[i].action || a[i].coeff != b[i].coeff)
                return false;
        return true;
    }

    std::string str() const {
        if (terms_.empty()) return cutoff_ ? "O(T^" + rational_str(*cutoff_) + ")" : "0";
        std::string s;
        for (const auto& t : terms_) {
            if (!s.empty()) s += " + ";
            s += rational_str(t.coeff);
            if (t.action != 0 || t.gr != 0)
                s += "*T(" + std::to_string(t.gr) + "," + rational_str(t.action) + ")";
        }
        if (cutoff_) s += " + O(T^" + rational_str(*cutoff_) + ")";
        return s;
    }

  private:
    static std::optional<Rational> min_cutoff(const std::optional<Rational>& a,
                                              const std::optional<Rational>& b) {
        if (!a) return b;
        if (!b) return a;
        return std::min(*a, *b);
    }

    void require_same_ring(const NovikovSeries& o) const {
        if (!(ring_ == o.ring_)) throw error("novikov: ring mismatch");
    }

    void add_term(const NovikovTerm& t) {
        if (t.coeff == 0) return;
        terms_.push_back(t);
    }

    void normalize() {
        std::sort(terms_.begin(), terms_.end(), [](const NovikovTerm& a, const NovikovTerm& b) {
            if (a.action != b.action) return a.action < b.action;
            return a.gr < b.gr;
        });
        std::vector<NovikovTerm> merged;
        for (const auto& t : terms_) {
            if (!merged.empty() && merged.back().action == t.action && merged.back().gr == t.gr)
                merged.back().coeff += t.coeff;
            else
                merged.push_back(t);
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [](const NovikovTerm& t) { return t.coeff == 0; }),
                     merged.end());
        terms_ = std::move(merged);
        drop_at_cutoff();
    }

    void drop_at_cutoff() {
        if (!cutoff_) return;
        terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                    [&](const NovikovTerm& t) { return t.action >= *cutoff_; }),
                     terms_.end());
    }

    GroundRing ring_ = GroundRing::rationals();
    std::optional<Rational> cutoff_;
    std::vector<NovikovTerm> terms_;
};

inline NovikovSeries novikov_add(const NovikovSeries& x, const NovikovSeries& y) {
    return x.plus(y);
}
inline NovikovSeries novikov_mul(const NovikovSeries& x, const NovikovSeries& y) {
    return x.times(y);
}
inline NovikovSeries novikov_scale(const Rational& c, const NovikovSeries& x) {
    return x.scaled(c);
}

// Dense matrix of Novikov series.
class NovikovMatrix {
  public:
    NovikovMatrix() : rows_(0), cols_(0) {}
    NovikovMatrix(std::size_t rows, std::size_t cols, GroundRing ring = GroundRing::rationals())
        : rows_(rows), cols_(cols), ring_(ring), a_(rows * cols, NovikovSeries(ring)) {}

    static NovikovMatrix identity(std::size_t n, GroundRing ring = GroundRing::rationals()) {
        NovikovMatrix m(n, n, ring);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = NovikovSeries::scalar(1, ring);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const GroundRing& ring() const { return ring_; }

    NovikovSeries& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const NovikovSeries& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    NovikovMatrix times(const NovikovMatrix& o) const {
        if (cols_ != o.rows_) throw error("novikov matrix product shape mismatch");
        NovikovMatrix r(rows_, o.cols_, ring_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                if (at(i, k).known_zero() && at(i, k).is_exact()) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    r.at(i, j) = r.at(i, j).plus(at(i, k).times(o.at(k, j)));
            }
        return r;
    }

    NovikovMatrix plus(const NovikovMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw error("novikov matrix sum shape mismatch");
        NovikovMatrix r(rows_, cols_, ring_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i].plus(o.a_[i]);
        return r;
    }

    NovikovMatrix scaled(const Rational& c) const {
        NovikovMatrix r(rows_, cols_, ring_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i].scaled(c);
        return r;
    }

    NovikovMatrix truncated(const Rational& cut) const {
        NovikovMatrix r(rows_, cols_, ring_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i].truncated(cut);
        return r;
    }

    bool equals_up_to_cutoff(const NovikovMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (std::size_t i = 0; i < a_.size(); ++i)
            if (!a_[i].equals_up_to_cutoff(o.a_[i])) return false;
        return true;
    }

    // Smallest leading action among known terms; nullopt when all entries are
    // known zero.
    std::optional<Rational> min_action() const {
        std::optional<Rational> out;
        for (const auto& s : a_)
            if (auto m = s.min_action())
                if (!out || *m < *out) out = m;
        return out;
    }

    bool known_zero() const {
        for (const auto& s : a_)
            if (!s.known_zero()) return false;
        return true;
    }

  private:
    std::size_t rows_, cols_;
    GroundRing ring_ = GroundRing::rationals();
    std::vector<NovikovSeries> a_;
};

// Rank by Gaussian elimination over the Novikov field with leading-action
// pivoting (ties broken by row then column index, so ranks are deterministic).
inline std::size_t novikov_rank(NovikovMatrix m) {
    std::size_t rank = 0;
    std::vector<char> row_used(m.rows(), 0), col_used(m.cols(), 0);
    for (;;) {
        // pivot: minimal leading action among unused rows/cols
        std::size_t pi = m.rows(), pj = m.cols();
        std::optional<Rational> best;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (row_used[i]) continue;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (col_used[j]) continue;
                auto a = m.at(i, j).min_action();
                if (!a) continue;
                if (!best || *a < *best) {
                    best = a;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (!best) break;
        NovikovSeries pinv = m.at(pi, pj).inverse();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == pi || row_used[i]) continue;
            if (m.at(i, pj).known_zero()) continue;
            NovikovSeries f = m.at(i, pj).times(pinv);
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (col_used[j]) continue;
                m.at(i, j) = m.at(i, j).plus(f.times(m.at(pi, j)).negated());
            }
        }
        row_used[pi] = 1;
        col_used[pj] = 1;
        ++rank;
    }
    return rank;
}

}  // namespace vfckit
