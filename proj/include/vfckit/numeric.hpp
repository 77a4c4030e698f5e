#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace vfckit {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

inline Integer num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rational& q) { return den(q) == 1; }

inline Integer to_integer(const Rational& q) {
    if (!is_integer(q)) throw error("expected integer, got " + q.str());
    return num(q);
}

inline int sign_of(const Rational& q) { return q.sign(); }
inline int sign_of(const Integer& z) { return z.sign(); }

inline Integer abs_of(const Integer& z) { return z < 0 ? Integer(-z) : z; }

// Parse "p/q" or "p"; exact, no floats anywhere.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer p(s.substr(0, slash)), q(s.substr(slash + 1));
        if (q == 0) throw error("zero denominator in rational literal: " + s);
        return Rational(p, q);
    } catch (const std::exception& e) {
        throw error("bad rational literal '" + s + "': " + e.what());
    }
}

inline std::string rational_str(const Rational& q) {
    if (is_integer(q)) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

}  // namespace vfckit
