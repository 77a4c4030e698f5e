#pragma once

#include "vfckit/matrix.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace vfckit {

// Smith normal form of an integer matrix: M = U * D * V with U, V unimodular
// and D diagonal, d1 | d2 | ... >= 0.  Uinv, Vinv are carried along so kernels
// and solutions come out of the same decomposition.
struct SmithForm {
    ExactMatrix U, D, V, Uinv, Vinv;
};

namespace detail {

class SnfWorker {
  public:
    explicit SnfWorker(const ExactMatrix& m)
        : r_(m.rows()), c_(m.cols()), b_(r_ * c_) {
        if (!m.all_integer()) throw error("smith_normal_form requires integer entries");
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) b_[i * c_ + j] = to_integer(m.at(i, j));
        p_ = pinv_ = ident(r_);
        q_ = qinv_ = ident(c_);
    }

    // Invariant: B = P * M * Q throughout; at the end D := B, U := P^-1, V := Q^-1.
    SmithForm run() {
        std::size_t t = 0;
        while (t < r_ && t < c_) {
            auto piv = find_pivot(t);
            if (!piv) break;
            move_pivot(t, piv->first, piv->second);
            reduce_at(t);
            // Divisibility fix: fold any non-multiple into the pivot row and redo.
            if (auto bad = find_nondivisible(t)) {
                add_row(t, bad->first, 1);
                reduce_at(t);
                continue;
            }
            if (b(t, t) < 0) negate_row(t);
            ++t;
        }
        SmithForm out;
        out.D = to_matrix(b_, r_, c_);
        out.U = inverse_of(p_, pinv_, r_, /*want_left=*/true);
        out.V = inverse_of(q_, qinv_, c_, /*want_left=*/false);
        out.Uinv = to_matrix(p_, r_, r_);
        out.Vinv = to_matrix(q_, c_, c_);
        return out;
    }

  private:
    using Vec = std::vector<Integer>;

    Integer& b(std::size_t i, std::size_t j) { return b_[i * c_ + j]; }

    static Vec ident(std::size_t n) {
        Vec v(n * n);
        for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1;
        return v;
    }

    static ExactMatrix to_matrix(const Vec& v, std::size_t r, std::size_t c) {
        ExactMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (v[i * c + j] != 0) m.at(i, j) = Rational(v[i * c + j]);
        return m;
    }

    static ExactMatrix inverse_of(const Vec&, const Vec& inv, std::size_t n, bool) {
        return to_matrix(inv, n, n);
    }

    // Row ops act on B and P (and inversely on Pinv); column ops on B and Q.
    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < c_; ++k) std::swap(b(i, k), b(j, k));
        for (std::size_t k = 0; k < r_; ++k) std::swap(p_[i * r_ + k], p_[j * r_ + k]);
        for (std::size_t k = 0; k < r_; ++k) std::swap(pinv_[k * r_ + i], pinv_[k * r_ + j]);
    }
    void swap_cols(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < r_; ++k) std::swap(b(k, i), b(k, j));
        for (std::size_t k = 0; k < c_; ++k) std::swap(q_[k * c_ + i], q_[k * c_ + j]);
        for (std::size_t k = 0; k < c_; ++k) std::swap(qinv_[i * c_ + k], qinv_[j * c_ + k]);
    }
    // row i += m * row j
    void add_row(std::size_t i, std::size_t j, const Integer& m) {
        for (std::size_t k = 0; k < c_; ++k) b(i, k) += m * b(j, k);
        for (std::size_t k = 0; k < r_; ++k) p_[i * r_ + k] += m * p_[j * r_ + k];
        for (std::size_t k = 0; k < r_; ++k) pinv_[k * r_ + j] -= m * pinv_[k * r_ + i];
    }
    // col i += m * col j
    void add_col(std::size_t i, std::size_t j, const Integer& m) {
        for (std::size_t k = 0; k < r_; ++k) b(k, i) += m * b(k, j);
        for (std::size_t k = 0; k < c_; ++k) q_[k * c_ + i] += m * q_[k * c_ + j];
        for (std::size_t k = 0; k < c_; ++k) qinv_[j * c_ + k] -= m * qinv_[i * c_ + k];
    }
    void negate_row(std::size_t i) {
        for (std::size_t k = 0; k < c_; ++k) b(i, k) = -b(i, k);
        for (std::size_t k = 0; k < r_; ++k) p_[i * r_ + k] = -p_[i * r_ + k];
        for (std::size_t k = 0; k < r_; ++k) pinv_[k * r_ + i] = -pinv_[k * r_ + i];
    }

    std::optional<std::pair<std::size_t, std::size_t>> find_pivot(std::size_t t) {
        std::optional<std::pair<std::size_t, std::size_t>> best;
        Integer best_abs = 0;
        for (std::size_t i = t; i < r_; ++i)
            for (std::size_t j = t; j < c_; ++j) {
                if (b(i, j) == 0) continue;
                Integer a = abs_of(b(i, j));
                if (!best || a < best_abs) {
                    best = {i, j};
                    best_abs = a;
                }
            }
        return best;
    }

    void move_pivot(std::size_t t, std::size_t i, std::size_t j) {
        swap_rows(t, i);
        swap_cols(t, j);
    }

    // Clear row t and column t by Euclidean steps, re-picking the smallest
    // pivot whenever a smaller remainder appears.
    void reduce_at(std::size_t t) {
        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < r_; ++i) {
                if (b(i, t) == 0) continue;
                Integer q = b(i, t) / b(t, t);
                add_row(i, t, -q);
                if (b(i, t) != 0) {
                    swap_rows(t, i);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < c_; ++j) {
                if (b(t, j) == 0) continue;
                Integer q = b(t, j) / b(t, t);
                add_col(j, t, -q);
                if (b(t, j) != 0) {
                    swap_cols(t, j);
                    clean = false;
                }
            }
            if (clean) break;
        }
    }

    std::optional<std::pair<std::size_t, std::size_t>> find_nondivisible(std::size_t t) {
        for (std::size_t i = t + 1; i < r_; ++i)
            for (std::size_t j = t + 1; j < c_; ++j)
                if (b(i, j) % b(t, t) != 0) return {{i, j}};
        return std::nullopt;
    }

    std::size_t r_, c_;
    Vec b_, p_, pinv_, q_, qinv_;
};

}  // namespace detail

inline SmithForm smith_normal_form(const ExactMatrix& m) { return detail::SnfWorker(m).run(); }

inline std::vector<Integer> snf_diagonal(const ExactMatrix& d) {
    std::vector<Integer> out;
    for (std::size_t i = 0; i < d.rows() && i < d.cols(); ++i)
        out.push_back(to_integer(d.at(i, i)));
    return out;
}


namespace detail {

// Elementary divisors without transformation tracking; machine-word fast path
// with overflow checks, falling back to exact bignums.
inline bool snf_divisors_i64(std::vector<long long>& a, std::size_t r, std::size_t c,
                             std::vector<Integer>& out) {
    auto at = [&](std::size_t i, std::size_t j) -> long long& { return a[i * c + j]; };
    const long long LIM = INT64_MAX / 4;
    auto mul_ok = [&](long long x, long long y, long long& res) {
        __int128 p = (__int128)x * y;
        if (p > LIM || p < -LIM) return false;
        res = (long long)p;
        return true;
    };
    std::size_t t = 0;
    while (t < r && t < c) {
        std::size_t bi = r, bj = c;
        long long best = 0;
        for (std::size_t i = t; i < r; ++i)
            for (std::size_t j = t; j < c; ++j) {
                long long v = at(i, j) < 0 ? -at(i, j) : at(i, j);
                if (v != 0 && (best == 0 || v < best)) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (best == 0) break;
        if (bi != t)
            for (std::size_t j = 0; j < c; ++j) std::swap(at(t, j), at(bi, j));
        if (bj != t)
            for (std::size_t i = 0; i < r; ++i) std::swap(at(i, t), at(i, bj));
        bool clean = true;
        do {
            clean = true;
            for (std::size_t i = t + 1; i < r; ++i) {
                if (at(i, t) == 0) continue;
                long long q = at(i, t) / at(t, t);
                for (std::size_t j = t; j < c; ++j) {
                    long long prod;
                    if (!mul_ok(q, at(t, j), prod)) return false;
                    long long nv = at(i, j) - prod;
                    if (nv > LIM || nv < -LIM) return false;
                    at(i, j) = nv;
                }
                if (at(i, t) != 0) {
                    for (std::size_t j = 0; j < c; ++j) std::swap(at(t, j), at(i, j));
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < c; ++j) {
                if (at(t, j) == 0) continue;
                long long q = at(t, j) / at(t, t);
                for (std::size_t i = t; i < r; ++i) {
                    long long prod;
                    if (!mul_ok(q, at(i, t), prod)) return false;
                    long long nv = at(i, j) - prod;
                    if (nv > LIM || nv < -LIM) return false;
                    at(i, j) = nv;
                }
                if (at(t, j) != 0) {
                    for (std::size_t i = 0; i < r; ++i) std::swap(at(i, t), at(i, j));
                    clean = false;
                }
            }
        } while (!clean);
        bool redo = false;
        for (std::size_t i = t + 1; i < r && !redo; ++i)
            for (std::size_t j = t + 1; j < c && !redo; ++j)
                if (at(i, j) % at(t, t) != 0) {
                    for (std::size_t jj = 0; jj < c; ++jj) {
                        long long nv = at(t, jj) + at(i, jj);
                        if (nv > LIM || nv < -LIM) return false;
                        at(t, jj) = nv;
                    }
                    redo = true;
                }
        if (redo) continue;
        if (at(t, t) < 0) at(t, t) = -at(t, t);
        ++t;
    }
    for (std::size_t i = 0; i < t; ++i) out.push_back(Integer(at(i, i)));
    return true;
}

}  // namespace detail

// Nonzero elementary divisors of an integer matrix, in divisibility order.
inline std::vector<Integer> elementary_divisors(const ExactMatrix& m) {
    if (!m.all_integer()) throw error("elementary_divisors requires integer entries");
    std::size_t r = m.rows(), c = m.cols();
    std::vector<Integer> out;
    if (r == 0 || c == 0) return out;
    bool fits = true;
    std::vector<long long> a(r * c, 0);
    for (std::size_t i = 0; i < r && fits; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            Integer v = to_integer(m.at(i, j));
            if (v > 1000000000 || v < -1000000000) {
                fits = false;
                break;
            }
            a[i * c + j] = (long long)v;
        }
    if (fits && detail::snf_divisors_i64(a, r, c, out)) return out;
    out.clear();
    SmithForm s = smith_normal_form(m);
    for (auto& d : snf_diagonal(s.D))
        if (d != 0) out.push_back(d);
    return out;
}

// ---------------------------------------------------------------------------
// Rational elimination: rank, solving, nullspace.  Used directly over Q and as
// the verification layer above the integral SNF paths.

struct Rref {
    ExactMatrix m;                    // reduced row echelon form
    std::vector<std::size_t> pivots;  // pivot column per pivot row
};

inline Rref rref(const ExactMatrix& a) {
    Rref out{a.with_ring(GroundRing::rationals()), {}};
    ExactMatrix& m = out.m;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t piv = row;
        while (piv < m.rows() && m.at(piv, col) == 0) ++piv;
        if (piv == m.rows()) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(row, j), m.at(piv, j));
        Rational inv = Rational(1) / m.at(row, col);
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m.at(i, col) == 0) continue;
            Rational f = m.at(i, col);
            for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) -= f * m.at(row, j);
        }
        out.pivots.push_back(col);
        ++row;
    }
    return out;
}

inline std::size_t rank_q(const ExactMatrix& a) { return rref(a).pivots.size(); }

// One solution of A x = b over Q, if any.
inline std::optional<std::vector<Rational>> solve_q(const ExactMatrix& a,
                                                    const std::vector<Rational>& b) {
    ExactMatrix aug(a.rows(), a.cols() + 1, GroundRing::rationals());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols()) = b[i];
    }
    Rref r = rref(aug);
    std::vector<Rational> x(a.cols(), Rational(0));
    for (std::size_t k = 0; k < r.pivots.size(); ++k) {
        if (r.pivots[k] == a.cols()) return std::nullopt;  // row [0 ... 0 | 1]
        x[r.pivots[k]] = r.m.at(k, a.cols());
    }
    return x;
}

// Basis of { x : A x = 0 } over Q.
inline std::vector<std::vector<Rational>> nullspace_q(const ExactMatrix& a) {
    Rref r = rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (auto p : r.pivots) is_pivot[p] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < a.cols(); ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(a.cols(), Rational(0));
        v[free] = 1;
        for (std::size_t k = 0; k < r.pivots.size(); ++k) v[r.pivots[k]] = -r.m.at(k, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Ring-aware operations required by the spec.

// Saturated basis of the kernel lattice over Z / Z[1/S]; vector-space basis
// over Q.  Returned as columns.
inline std::vector<std::vector<Rational>> kernel_basis(const ExactMatrix& m) {
    if (m.ring().is_field()) return nullspace_q(m);
    // Clear denominators column-wise (unit scaling over Z[1/S] does not change
    // the kernel).
    ExactMatrix zm(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
        Integer l = 1;
        for (std::size_t i = 0; i < m.rows(); ++i) l = boost::multiprecision::lcm(l, den(m.at(i, j)));
        for (std::size_t i = 0; i < m.rows(); ++i) zm.at(i, j) = m.at(i, j) * Rational(l);
    }
    SmithForm s = smith_normal_form(zm);
    auto diag = snf_diagonal(s.D);
    std::vector<std::vector<Rational>> basis;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        bool in_kernel = j >= diag.size() || diag[j] == 0;
        if (in_kernel) basis.push_back(s.Vinv.column(j));
    }
    return basis;
}

inline std::size_t rank(const ExactMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    return rank_q(m);
}

struct CokernelInvariants {
    std::size_t free_rank = 0;
    std::vector<Integer> torsion;  // in divisibility order, entries > 1
    bool operator==(const CokernelInvariants& o) const {
        return free_rank == o.free_rank && torsion == o.torsion;
    }
};

// Invariant factors of coker(M : R^cols -> R^rows).
inline CokernelInvariants cokernel_invariants(const ExactMatrix& m) {
    CokernelInvariants out;
    if (m.ring().is_field()) {
        out.free_rank = m.rows() - rank_q(m);
        return out;
    }
    ExactMatrix zm(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        // Row scaling by units: clear denominators coming from inverted primes.
        Integer l = 1;
        for (std::size_t j = 0; j < m.cols(); ++j) l = boost::multiprecision::lcm(l, den(m.at(i, j)));
        for (std::size_t j = 0; j < m.cols(); ++j) zm.at(i, j) = m.at(i, j) * Rational(l);
    }
    SmithForm s = smith_normal_form(zm);
    auto diag = snf_diagonal(s.D);
    std::size_t nonzero = 0;
    for (const auto& d : diag) {
        if (d == 0) continue;
        ++nonzero;
        Integer t = m.ring().strip_units(d);
        if (t > 1) out.torsion.push_back(t);
    }
    out.free_rank = m.rows() - nonzero;
    return out;
}

// Solve M X = B column-by-column over the matrix ring with a single SNF.
inline std::optional<ExactMatrix> solve_in_ring_batch(const ExactMatrix& m,
                                                      const ExactMatrix& b) {
    if (b.rows() != m.rows()) throw error("solve_in_ring_batch shape mismatch");
    ExactMatrix x(m.cols(), b.cols(), m.ring());
    if (b.cols() == 0) return x;
    if (m.ring().is_field() || !m.all_integer() || !b.all_integer()) {
        Rref r = rref(m.hstack(b));
        for (auto p : r.pivots)
            if (p >= m.cols()) return std::nullopt;  // some rhs not in the span
        for (std::size_t k = 0; k < r.pivots.size(); ++k)
            for (std::size_t j = 0; j < b.cols(); ++j) {
                const Rational& v = r.m.at(k, m.cols() + j);
                if (!m.ring().contains(v)) return std::nullopt;
                x.at(r.pivots[k], j) = v;
            }
        return x;
    }
    SmithForm s = smith_normal_form(m);
    auto diag = snf_diagonal(s.D);
    ExactMatrix y = s.Uinv * b;
    ExactMatrix z(m.cols(), b.cols(), m.ring());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) {
            Integer d = i < diag.size() ? diag[i] : Integer(0);
            if (d == 0) {
                if (y.at(i, j) != 0) return std::nullopt;
            } else {
                Rational q = y.at(i, j) / Rational(d);
                if (!m.ring().contains(q)) return std::nullopt;
                if (i < m.cols()) z.at(i, j) = q;
            }
        }
    return (s.Vinv * z).with_ring(m.ring());
}

// Integral solution of M x = b (over the matrix ring), if one exists.
inline std::optional<std::vector<Rational>> solve_in_ring(const ExactMatrix& m,
                                                          const std::vector<Rational>& b) {
    if (m.ring().is_field()) return solve_q(m, b);
    auto x = solve_q(m, b);
    if (!x) return std::nullopt;
    // Rational solution exists; move it into the lattice via SNF.
    if (!m.all_integer()) {
        // Fall back: verify ring membership of the rational solution.
        for (const auto& c : *x)
            if (!m.ring().contains(c)) return std::nullopt;
        return x;
    }
    for (const auto& c : b)
        if (!is_integer(c)) return std::nullopt;
    SmithForm s = smith_normal_form(m);
    auto y = s.Uinv.apply(b);
    auto diag = snf_diagonal(s.D);
    std::vector<Rational> z(m.cols(), Rational(0));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Integer d = i < diag.size() ? diag[i] : Integer(0);
        if (d == 0) {
            if (y[i] != 0) return std::nullopt;
        } else {
            Rational q = y[i] / Rational(d);
            if (!m.ring().contains(q)) return std::nullopt;
            z[i] = q;
        }
    }
    return s.Vinv.apply(z);
}

}  // namespace vfckit
