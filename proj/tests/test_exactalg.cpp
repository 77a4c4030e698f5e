#include "vfckit/snf.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace vfckit;

namespace {

ExactMatrix random_int_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    ExactMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = d(rng);
    return m;
}

Integer det_int(const ExactMatrix& m) {
    // Fraction-free expansion is overkill; rational elimination and a product
    // of pivots is exact.
    ExactMatrix a = m.with_ring(GroundRing::rationals());
    Rational det = 1;
    std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a.at(piv, col) == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(col, j), a.at(piv, j));
            det = -det;
        }
        det *= a.at(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            Rational f = a.at(i, col) / a.at(col, col);
            for (std::size_t j = col; j < n; ++j) a.at(i, j) -= f * a.at(col, j);
        }
    }
    return to_integer(Rational(det));
}

void check_snf(const ExactMatrix& m) {
    SmithForm s = smith_normal_form(m);
    REQUIRE(s.U * s.D * s.V == m);
    REQUIRE(s.U * s.Uinv == ExactMatrix::identity(m.rows()));
    REQUIRE(s.V * s.Vinv == ExactMatrix::identity(m.cols()));
    if (m.rows() > 0) REQUIRE(abs_of(det_int(s.U)) == 1);
    if (m.cols() > 0) REQUIRE(abs_of(det_int(s.V)) == 1);
    auto diag = snf_diagonal(s.D);
    for (std::size_t i = 0; i + 1 < diag.size(); ++i) {
        REQUIRE(diag[i] >= 0);
        if (diag[i] != 0) REQUIRE(diag[i + 1] % diag[i] == 0);
        if (diag[i] == 0) REQUIRE(diag[i + 1] == 0);
    }
    // Off-diagonal of D vanishes.
    for (std::size_t i = 0; i < s.D.rows(); ++i)
        for (std::size_t j = 0; j < s.D.cols(); ++j)
            if (i != j) REQUIRE(s.D.at(i, j) == 0);
}

}  // namespace

TEST_CASE("snf zero matrix") {
    ExactMatrix m{{Rational(0)}};
    SmithForm s = smith_normal_form(m);
    REQUIRE(s.D == ExactMatrix{{Rational(0)}});
    REQUIRE(s.U == ExactMatrix::identity(1));
    REQUIRE(s.V == ExactMatrix::identity(1));
}

TEST_CASE("snf 2x2 example") {
    ExactMatrix m{{2, 4}, {6, 8}};
    SmithForm s = smith_normal_form(m);
    auto diag = snf_diagonal(s.D);
    REQUIRE(diag == std::vector<Integer>{2, 4});
    check_snf(m);
}

TEST_CASE("snf identity") {
    for (std::size_t n : {1u, 3u, 5u}) {
        SmithForm s = smith_normal_form(ExactMatrix::identity(n));
        REQUIRE(s.D == ExactMatrix::identity(n));
    }
}

TEST_CASE("snf randomized verification") {
    std::mt19937 rng(20240811);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t r = 1 + trial % 5, c = 1 + (trial / 2) % 5;
        check_snf(random_int_matrix(rng, r, c, -9, 9));
    }
}

TEST_CASE("kernel of [[1,1]] over Q") {
    ExactMatrix m({{1, 1}}, GroundRing::rationals());
    auto k = kernel_basis(m);
    REQUIRE(k.size() == 1);
    REQUIRE(k[0][0] * Rational(-1) == k[0][1]);
}

TEST_CASE("cokernel of [[2]] over Z") {
    ExactMatrix m{{2}};
    auto inv = cokernel_invariants(m);
    REQUIRE(inv.free_rank == 0);
    REQUIRE(inv.torsion == std::vector<Integer>{2});
}

TEST_CASE("rank of 0xN matrix") {
    ExactMatrix m(0, 4);
    REQUIRE(rank(m) == 0);
    auto inv = cokernel_invariants(m);
    REQUIRE(inv.free_rank == 0);
}

TEST_CASE("rank-nullity over Q") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t r = 1 + trial % 4, c = 1 + (trial / 3) % 5;
        ExactMatrix m = random_int_matrix(rng, r, c, -4, 4).with_ring(GroundRing::rationals());
        REQUIRE(rank(m) + kernel_basis(m).size() == c);
    }
}

TEST_CASE("cokernel invariants are shuffle-invariant") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        ExactMatrix m = random_int_matrix(rng, 4, 4, -6, 6);
        auto base = cokernel_invariants(m);
        std::vector<std::size_t> rp{0, 1, 2, 3}, cp{0, 1, 2, 3};
        std::shuffle(rp.begin(), rp.end(), rng);
        std::shuffle(cp.begin(), cp.end(), rng);
        ExactMatrix sh(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) sh.at(i, j) = m.at(rp[i], cp[j]);
        REQUIRE(cokernel_invariants(sh) == base);
    }
}

TEST_CASE("kernel vectors genuinely annihilate") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        ExactMatrix m = random_int_matrix(rng, 3, 5, -5, 5);
        for (const auto& v : kernel_basis(m)) {
            auto mv = m.apply(v);
            for (const auto& x : mv) REQUIRE(x == 0);
        }
    }
}

TEST_CASE("solve_in_ring finds integral solutions") {
    ExactMatrix m{{2, 0}, {0, 3}};
    auto x = solve_in_ring(m, {Rational(4), Rational(9)});
    REQUIRE(x.has_value());
    REQUIRE((*x)[0] == 2);
    REQUIRE((*x)[1] == 3);
    REQUIRE_FALSE(solve_in_ring(m, {Rational(1), Rational(0)}).has_value());
    // ... but over Z[1/2] that system becomes solvable.
    auto r2 = GroundRing::integers_with_inverted({Integer(2)});
    auto y = solve_in_ring(m.with_ring(r2), {Rational(1), Rational(0)});
    REQUIRE(y.has_value());
    REQUIRE((*y)[0] == Rational(1, 2));
}

TEST_CASE("torsion over Z[1/2] strips 2-parts") {
    auto r2 = GroundRing::integers_with_inverted({Integer(2)});
    ExactMatrix m({{12}}, r2);
    auto inv = cokernel_invariants(m);
    REQUIRE(inv.free_rank == 0);
    REQUIRE(inv.torsion == std::vector<Integer>{3});
}
