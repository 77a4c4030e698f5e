#pragma once

#include "vfckit/numeric.hpp"

#include <algorithm>
#include <vector>

namespace vfckit {

// Ground rings in scope: Z, Q, and Z with finitely many primes inverted.
// Orders of covering groups must be invertible; with trivial groups any of
// these is admissible.
class GroundRing {
  public:
    enum class Kind { integers, rationals, integers_inv };

    GroundRing() : kind_(Kind::integers) {}

    static GroundRing integers() { return GroundRing(Kind::integers, {}); }
    static GroundRing rationals() { return GroundRing(Kind::rationals, {}); }
    static GroundRing integers_with_inverted(std::vector<Integer> primes) {
        std::sort(primes.begin(), primes.end());
        primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
        for (const auto& p : primes)
            if (!is_prime_small(p)) throw error("inverted element " + p.str() + " is not prime");
        return GroundRing(Kind::integers_inv, std::move(primes));
    }

    Kind kind() const { return kind_; }
    const std::vector<Integer>& inverted_primes() const { return primes_; }

    bool is_field() const { return kind_ == Kind::rationals; }

    bool operator==(const GroundRing& o) const { return kind_ == o.kind_ && primes_ == o.primes_; }
    bool operator!=(const GroundRing& o) const { return !(*this == o); }

    // Membership: Q admits everything; Z needs denominator 1; Z[1/S] needs the
    // denominator's prime factors within S.
    bool contains(const Rational& x) const {
        switch (kind_) {
            case Kind::rationals: return true;
            case Kind::integers: return is_integer(x);
            case Kind::integers_inv: {
                Integer d = den(x);
                for (const auto& p : primes_)
                    while (d % p == 0) d /= p;
                return d == 1 || d == -1;
            }
        }
        return false;
    }

    void require(const Rational& x) const {
        if (!contains(x)) throw error("element " + rational_str(x) + " not in ground ring " + name());
    }

    bool is_unit(const Rational& x) const {
        if (x == 0) return false;
        switch (kind_) {
            case Kind::rationals: return true;
            case Kind::integers: return x == 1 || x == -1;
            case Kind::integers_inv: {
                Integer n = abs_of(num(x)), d = den(x);
                for (const auto& p : primes_) {
                    while (n % p == 0) n /= p;
                    while (d % p == 0) d /= p;
                }
                return n == 1 && d == 1;
            }
        }
        return false;
    }

    // Strip unit factors from a positive integer (used to normalize torsion
    // coefficients over Z[1/S]; over Z it is the identity).
    Integer strip_units(Integer n) const {
        if (kind_ == Kind::integers_inv)
            for (const auto& p : primes_)
                while (n % p == 0) n /= p;
        return n;
    }

    std::string name() const {
        switch (kind_) {
            case Kind::integers: return "Z";
            case Kind::rationals: return "Q";
            case Kind::integers_inv: {
                std::string s = "Z[";
                for (size_t i = 0; i < primes_.size(); ++i)
                    s += (i ? ",1/" : "1/") + primes_[i].str();
                return s + "]";
            }
        }
        return "?";
    }

  private:
    GroundRing(Kind k, std::vector<Integer> primes) : kind_(k), primes_(std::move(primes)) {}

    static bool is_prime_small(const Integer& p) {
        if (p < 2) return false;
        for (Integer d = 2; d * d <= p; ++d)
            if (p % d == 0) return false;
        return true;
    }

    Kind kind_;
    std::vector<Integer> primes_;
};

}  // namespace vfckit
