#pragma once

#include "vfckit/numeric.hpp"
#include "vfckit/ring.hpp"

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace vfckit {

// Dense matrix over an exact ring.  Rows/cols may be zero; all entries are
// validated against the ring at construction.  Values are immutable in
// spirit: operations return new matrices.
class ExactMatrix {
  public:
    ExactMatrix() : rows_(0), cols_(0) {}

    ExactMatrix(std::size_t rows, std::size_t cols, GroundRing ring = GroundRing::integers())
        : rows_(rows), cols_(cols), ring_(ring), a_(rows * cols) {}

    ExactMatrix(std::initializer_list<std::initializer_list<Rational>> rows,
                GroundRing ring = GroundRing::integers())
        : ring_(ring) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        a_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw error("ragged matrix literal");
            for (const auto& x : r) {
                ring_.require(x);
                a_.push_back(x);
            }
        }
    }

    static ExactMatrix identity(std::size_t n, GroundRing ring = GroundRing::integers()) {
        ExactMatrix m(n, n, ring);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static ExactMatrix zero(std::size_t rows, std::size_t cols,
                            GroundRing ring = GroundRing::integers()) {
        return ExactMatrix(rows, cols, ring);
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const GroundRing& ring() const { return ring_; }

    const Rational& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    Rational& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }

    void set(std::size_t i, std::size_t j, const Rational& x) {
        ring_.require(x);
        at(i, j) = x;
    }

    bool is_zero() const {
        for (const auto& x : a_)
            if (x != 0) return false;
        return true;
    }

    bool operator==(const ExactMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }
    bool operator!=(const ExactMatrix& o) const { return !(*this == o); }

    ExactMatrix transpose() const {
        ExactMatrix t(cols_, rows_, ring_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    ExactMatrix operator*(const ExactMatrix& o) const {
        if (cols_ != o.rows_) throw error("matrix product shape mismatch");
        ExactMatrix r(rows_, o.cols_, ring_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Rational& x = at(i, k);
                if (x == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) {
                    if (o.at(k, j) == 0) continue;
                    r.at(i, j) += x * o.at(k, j);
                }
            }
        return r;
    }

    ExactMatrix operator+(const ExactMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw error("matrix sum shape mismatch");
        ExactMatrix r(rows_, cols_, ring_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
        return r;
    }

    ExactMatrix operator-(const ExactMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw error("matrix difference shape mismatch");
        ExactMatrix r(rows_, cols_, ring_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
        return r;
    }

    ExactMatrix scaled(const Rational& c) const {
        ExactMatrix r(rows_, cols_, ring_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = c * a_[i];
        return r;
    }

    ExactMatrix negated() const { return scaled(-1); }

    std::vector<Rational> apply(const std::vector<Rational>& v) const {
        if (v.size() != cols_) throw error("matrix apply shape mismatch");
        std::vector<Rational> out(rows_, Rational(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (at(i, j) != 0 && v[j] != 0) out[i] += at(i, j) * v[j];
        return out;
    }

    std::vector<Rational> column(std::size_t j) const {
        std::vector<Rational> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = at(i, j);
        return c;
    }

    void set_column(std::size_t j, const std::vector<Rational>& c) {
        for (std::size_t i = 0; i < rows_; ++i) set(i, j, c[i]);
    }

    ExactMatrix with_ring(const GroundRing& r) const {
        ExactMatrix m(rows_, cols_, r);
        for (std::size_t i = 0; i < a_.size(); ++i) {
            r.require(a_[i]);
            m.a_[i] = a_[i];
        }
        return m;
    }

    // Block [this | o] side by side.
    ExactMatrix hstack(const ExactMatrix& o) const {
        if (rows_ != o.rows_) throw error("hstack row mismatch");
        ExactMatrix r(rows_, cols_ + o.cols_, ring_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
            for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
        }
        return r;
    }

    ExactMatrix vstack(const ExactMatrix& o) const {
        if (cols_ != o.cols_) throw error("vstack col mismatch");
        ExactMatrix r(rows_ + o.rows_, cols_, ring_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
        for (std::size_t i = 0; i < o.rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r.at(rows_ + i, j) = o.at(i, j);
        return r;
    }

    bool all_integer() const {
        for (const auto& x : a_)
            if (!is_integer(x)) return false;
        return true;
    }

  private:
    std::size_t rows_, cols_;
    GroundRing ring_;
    std::vector<Rational> a_;
};

// Writes a block of `src` into `dst` at offset (r0, c0); helper for assembling
// differentials of cones, total complexes and homotopy colimits.
inline void put_block(ExactMatrix& dst, std::size_t r0, std::size_t c0, const ExactMatrix& src,
                      const Rational& scale = 1) {
    for (std::size_t i = 0; i < src.rows(); ++i)
        for (std::size_t j = 0; j < src.cols(); ++j)
            if (src.at(i, j) != 0) dst.at(r0 + i, c0 + j) += scale * src.at(i, j);
}

}  // namespace vfckit
