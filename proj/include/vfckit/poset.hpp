#pragma once

#include "vfckit/numeric.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace vfckit {

// Finite poset on elements 0..n-1.  Relation matrix is validated for
// reflexivity, antisymmetry and transitivity; strict chains are enumerated in
// lexicographic order so downstream bases are deterministic.
class FinitePoset {
  public:
    FinitePoset() = default;

    FinitePoset(std::size_t n, std::vector<std::pair<int, int>> relations,
                std::vector<std::string> names = {})
        : n_(n), leq_(n * n, 0), names_(std::move(names)) {
        for (std::size_t i = 0; i < n_; ++i) leq_[i * n_ + i] = 1;
        for (auto& [a, b] : relations) set(a, b);
        // transitive closure
        for (std::size_t k = 0; k < n_; ++k)
            for (std::size_t i = 0; i < n_; ++i)
                for (std::size_t j = 0; j < n_; ++j)
                    if (leq_[i * n_ + k] && leq_[k * n_ + j]) leq_[i * n_ + j] = 1;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (i != j && leq(i, j) && leq(j, i))
                    throw error("poset relation not antisymmetric: " + std::to_string(i) + " ~ " +
                                std::to_string(j));
    }

    static FinitePoset chain(std::size_t n) {
        std::vector<std::pair<int, int>> rel;
        for (std::size_t i = 0; i + 1 < n; ++i) rel.push_back({int(i), int(i + 1)});
        return FinitePoset(n, std::move(rel));
    }

    // Subsets of {0..k-1} ordered by inclusion; element index = bitmask.
    static FinitePoset subsets(std::size_t k) {
        std::size_t n = std::size_t(1) << k;
        std::vector<std::pair<int, int>> rel;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if ((a & b) == a && a != b) rel.push_back({int(a), int(b)});
        return FinitePoset(n, std::move(rel));
    }

    static FinitePoset product(const FinitePoset& s, const FinitePoset& t) {
        std::size_t n = s.size() * t.size();
        std::vector<std::pair<int, int>> rel;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b) continue;
                if (s.leq(a / t.size(), b / t.size()) && t.leq(a % t.size(), b % t.size()))
                    rel.push_back({int(a), int(b)});
            }
        return FinitePoset(n, std::move(rel));
    }

    std::size_t size() const { return n_; }
    bool leq(std::size_t a, std::size_t b) const { return leq_[a * n_ + b] != 0; }
    bool less(std::size_t a, std::size_t b) const { return a != b && leq(a, b); }

    std::string name(std::size_t i) const {
        return i < names_.size() ? names_[i] : std::to_string(i);
    }

    std::vector<std::size_t> maximal_elements() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < n_; ++i) {
            bool maximal = true;
            for (std::size_t j = 0; j < n_ && maximal; ++j)
                if (less(i, j)) maximal = false;
            if (maximal) out.push_back(i);
        }
        return out;
    }

    // Strict chains s_0 < ... < s_p, lexicographic, p ranging over all lengths.
    std::vector<std::vector<std::size_t>> strict_chains() const {
        std::vector<std::vector<std::size_t>> out;
        std::vector<std::size_t> cur;
        enumerate(cur, out);
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            if (a.size() != b.size()) return a.size() < b.size();
            return a < b;
        });
        return out;
    }

    std::size_t height() const {  // longest strict chain length (edges)
        std::size_t h = 0;
        for (auto& c : strict_chains()) h = std::max(h, c.size() - 1);
        return h;
    }

    bool is_directed() const {  // every pair has an upper bound
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b) {
                bool ok = false;
                for (std::size_t c = 0; c < n_ && !ok; ++c) ok = leq(a, c) && leq(b, c);
                if (!ok) return false;
            }
        return true;
    }

  private:
    void set(int a, int b) {
        if (a < 0 || b < 0 || std::size_t(a) >= n_ || std::size_t(b) >= n_)
            throw error("poset relation out of range");
        leq_[std::size_t(a) * n_ + std::size_t(b)] = 1;
    }

    void enumerate(std::vector<std::size_t>& cur,
                   std::vector<std::vector<std::size_t>>& out) const {
        if (!cur.empty()) out.push_back(cur);
        for (std::size_t next = 0; next < n_; ++next) {
            if (!cur.empty() && !less(cur.back(), next)) continue;
            cur.push_back(next);
            enumerate(cur, out);
            cur.pop_back();
        }
    }

    std::size_t n_ = 0;
    std::vector<char> leq_;
    std::vector<std::string> names_;
};

}  // namespace vfckit
