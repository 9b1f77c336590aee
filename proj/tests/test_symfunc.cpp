#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "hessquot/sampling.hpp"
#include "hessquot/symfunc.hpp"

using namespace hq;

namespace {

// Brute-force oracle: sum over all size-k index subsets of eigenvalue products.
double subset_sum_oracle(const Spectrum& spec, int k) {
    const int n = spec.size();
    if (k == 0) return 1.0;
    double total = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        double prod = 1.0;
        for (int i : idx) prod *= spec[i];
        total += prod;
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j) - 1] + 1;
    }
    return total;
}

Eigen::MatrixXd to_eigen(const SquareMatrix& a) {
    Eigen::MatrixXd m(a.size(), a.size());
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) m(i, j) = a(i, j);
    return m;
}

// Central-difference oracle for dS_k/da_{ij}.
SquareMatrix fd_gradient(int k, const SquareMatrix& a, double h) {
    SquareMatrix g(a.size());
    for (int i = 0; i < a.size(); ++i) {
        for (int j = 0; j < a.size(); ++j) {
            SquareMatrix ap(a.size());
            SquareMatrix am(a.size());
            for (int r = 0; r < a.size(); ++r)
                for (int c = 0; c < a.size(); ++c) {
                    ap(r, c) = a(r, c);
                    am(r, c) = a(r, c);
                }
            ap(i, j) += h;
            am(i, j) -= h;
            g(i, j) = (sk_of_matrix(k, ap) - sk_of_matrix(k, am)) / (2.0 * h);
        }
    }
    return g;
}

}  // namespace

TEST_CASE("elem_sym_all on frozen examples") {
    auto s1 = elem_sym_all(Spectrum{1.0, 1.0, 1.0});
    CHECK(s1.s == std::vector<double>{1.0, 3.0, 3.0, 1.0});

    // Frozen values computed by the subset oracle below.
    auto s2 = elem_sym_all(Spectrum{1.0, 2.0, 3.0});
    CHECK(s2.s == std::vector<double>{1.0, 6.0, 11.0, 6.0});
    for (int k = 0; k <= 3; ++k)
        CHECK(s2.at(k) == Catch::Approx(subset_sum_oracle(Spectrum{1.0, 2.0, 3.0}, k)).margin(1e-14));

    auto s3 = elem_sym_all(Spectrum{1.0, 1.0, -0.1});
    CHECK(s3.at(0) == 1.0);
    CHECK(s3.at(1) == Catch::Approx(1.9).margin(1e-15));
    CHECK(s3.at(2) == Catch::Approx(0.8).margin(1e-15));
    CHECK(s3.at(3) == Catch::Approx(-0.1).margin(1e-15));

    CHECK(s3.at(-1) == 0.0);
    CHECK_THROWS(s3.at(4));
}

TEST_CASE("elem_sym_all agrees with subset brute force up to n = 8") {
    Rng rng(7);
    for (int n = 1; n <= 8; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> lam(static_cast<std::size_t>(n));
            for (auto& v : lam) v = rng.uniform(-2.0, 2.0);
            Spectrum spec(lam);
            auto s = elem_sym_all(spec);
            for (int k = 0; k <= n; ++k) {
                CHECK(s.at(k) == Catch::Approx(subset_sum_oracle(spec, k)).margin(1e-10));
            }
        }
    }
}

TEST_CASE("sk_of_matrix on frozen examples") {
    CHECK(sk_of_matrix(2, SquareMatrix::identity(4)) == Catch::Approx(6.0));
    SquareMatrix a(2, true);
    a(0, 0) = 2.0; a(0, 1) = 1.0; a(1, 0) = 1.0; a(1, 1) = 2.0;
    CHECK(sk_of_matrix(2, a) == Catch::Approx(3.0));
    CHECK(sk_of_matrix(0, a) == 1.0);
    CHECK_THROWS(sk_of_matrix(3, a));
    CHECK_THROWS(sk_of_matrix(-1, a));
}

TEST_CASE("sk_of_matrix equals symmetric eigenvalue oracle") {
    Rng rng(11);
    for (int n = 2; n <= 8; ++n) {
        for (int rep = 0; rep < 10; ++rep) {
            SquareMatrix a = random_symmetric(rng, n);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
            REQUIRE(es.info() == Eigen::Success);
            std::vector<double> lam(es.eigenvalues().data(), es.eigenvalues().data() + n);
            auto s = elem_sym_all(Spectrum(lam));
            const double scale = std::pow(std::max(1.0, a.frobenius_norm()), 1.0);
            for (int k = 0; k <= n; ++k) {
                CHECK(sk_of_matrix(k, a) ==
                      Catch::Approx(s.at(k)).margin(1e-10 * std::pow(std::max(1.0, scale), k)));
            }
        }
    }
}

TEST_CASE("sk_gradient frozen examples") {
    SquareMatrix a = SquareMatrix::diagonal({1.0, 2.0, 3.0});
    SquareMatrix g = sk_gradient(3, a);
    CHECK(g(0, 0) == Catch::Approx(6.0));
    CHECK(g(1, 1) == Catch::Approx(3.0));
    CHECK(g(2, 2) == Catch::Approx(2.0));
    CHECK(g(0, 1) == Catch::Approx(0.0).margin(1e-14));

    Rng rng(3);
    SquareMatrix b = random_matrix(rng, 4);
    SquareMatrix g1 = sk_gradient(1, b);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(g1(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("sk_gradient matches finite differences, symmetric and not") {
    Rng rng(23);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 4; ++rep) {
            for (bool symmetric : {false, true}) {
                SquareMatrix a = symmetric ? random_symmetric(rng, n) : random_matrix(rng, n);
                for (int k = 1; k <= n; ++k) {
                    SquareMatrix g = sk_gradient(k, a);
                    SquareMatrix fd = fd_gradient(k, a, 1e-5);
                    const double scale = std::max(1.0, fd.max_abs());
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            CHECK(g(i, j) == Catch::Approx(fd(i, j)).margin(1e-6 * scale));
                }
            }
        }
    }
}

TEST_CASE("cone_index") {
    CHECK(cone_index(SquareMatrix::identity(3)) == 3);
    CHECK(cone_index(Spectrum{1.0, 1.0, -0.1}) == 2);
    CHECK(cone_index(Spectrum{-1.0, -1.0, -1.0}) == 0);
}

TEST_CASE("inequality_report: equality on constant spectra") {
    for (double c : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        for (int n : {2, 4, 8}) {
            Spectrum spec(std::vector<double>(static_cast<std::size_t>(n), c));
            for (int k = 1; k <= n; ++k) {
                for (int l = 0; l < k; ++l) {
                    auto rep = inequality_report(spec, k, l);
                    for (const auto& r : rep.records) {
                        REQUIRE(r.precondition_ok);
                        CHECK(std::abs(r.slack) <=
                              1e-12 * std::max({1.0, std::abs(r.lhs), std::abs(r.rhs)}));
                        CHECK(r.holds);
                    }
                }
            }
        }
    }
}

TEST_CASE("inequality_report: frozen Newton example") {
    // spectrum (1,2,3): S = (1,6,11,6); Newton at m = 2:
    // lhs = (n-m+1)(m+1) S_1 S_3 = 2*3*6*6 = 216, rhs = m(n-m) S_2^2 = 2*121 = 242.
    auto rep = inequality_report(Spectrum{1.0, 2.0, 3.0}, 2, 0);
    bool found = false;
    for (const auto& r : rep.records) {
        if (r.name == "newton_2") {
            found = true;
            CHECK(r.lhs == Catch::Approx(216.0));
            CHECK(r.rhs == Catch::Approx(242.0));
            CHECK(r.slack == Catch::Approx(26.0));
            CHECK(r.holds);
        }
    }
    CHECK(found);
}

TEST_CASE("inequality_report: random Gamma_k samples all hold") {
    Rng rng(101);
    for (int n = 2; n <= 7; ++n) {
        for (int k = 1; k <= n; ++k) {
            for (int l = 0; l < k; ++l) {
                for (int rep = 0; rep < 10; ++rep) {
                    auto spec = random_gamma_spectrum(rng, n, k);
                    auto r = inequality_report(spec, k, l);
                    INFO("n=" << n << " k=" << k << " l=" << l);
                    CHECK(r.all_hold());
                }
            }
        }
    }
}

TEST_CASE("inequality_report: precondition violation is reported, not thrown") {
    auto rep = inequality_report(Spectrum{-1.0, -1.0, -1.0}, 2, 1);
    bool saw_blocked = false;
    for (const auto& r : rep.records) {
        if (!r.precondition_ok) saw_blocked = true;
        if (r.name.rfind("newton", 0) == 0) CHECK(r.precondition_ok);
    }
    CHECK(saw_blocked);
    CHECK(rep.cone == 0);
}

TEST_CASE("algebraic_identity_residuals at the identity matrix") {
    for (int n : {2, 4, 6}) {
        for (int k = 1; k <= n; ++k) {
            auto res = algebraic_identity_residuals(SquareMatrix::identity(n), k);
            CHECK(res.worst() == Catch::Approx(0.0).margin(1e-14));
        }
    }
}

TEST_CASE("algebraic_identity_residuals on random matrices") {
    Rng rng(77);
    for (int rep = 0; rep < 30; ++rep) {
        SquareMatrix a = random_symmetric(rng, 5);
        auto res = algebraic_identity_residuals(a, 2);
        CHECK(res.within(1e-10));
        CHECK(res.commute_hessian <= 1e-10 * res.scale);
    }
    for (int rep = 0; rep < 30; ++rep) {
        SquareMatrix a = random_matrix(rng, 4);
        auto res = algebraic_identity_residuals(a, 3);
        CHECK(res.within(1e-10));
        CHECK(res.commute_general <= 1e-10 * res.scale);
    }
}

TEST_CASE("gamma sampling produces matrices in the requested cone") {
    Rng rng(5);
    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            SquareMatrix a = random_gamma_matrix(rng, n, k);
            CHECK(a.symmetry_flag());
            CHECK(cone_index(a) >= k);
        }
    }
}
