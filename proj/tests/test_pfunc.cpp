#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hessquot/pfunc.hpp"
#include "hessquot/radial.hpp"
#include "hessquot/sampling.hpp"

using namespace hq;

TEST_CASE("evaluate_p on the explicit solutions") {
    // Euclidean: P = |Du|^2 - 2u = 1 identically for u = (|x|^2-1)/2.
    for (double r : {0.0, 0.2, 0.7, 1.0}) {
        const double u = 0.5 * (r * r - 1.0);
        CHECK(evaluate_p(PKind::euclid, u, r * r) == Catch::Approx(1.0).margin(1e-14));
    }
    // Hyperbolic: P = tanh^2 R for u = cosh r / cosh R - 1.
    const double R = std::atanh(0.5);
    for (double r : {0.0, 0.5 * R, R}) {
        const double u = std::cosh(r) / std::cosh(R) - 1.0;
        const double du = std::sinh(r) / std::cosh(R);
        CHECK(evaluate_p(PKind::hyper, u, du * du) ==
              Catch::Approx(std::tanh(R) * std::tanh(R)).margin(1e-14));
    }
    // Curvature: P = 1/w + u = 1/sqrt(2) for the unit-sphere cap.
    for (double r : {0.0, 0.3, 1.0 / std::sqrt(2.0)}) {
        const double u = -std::sqrt(1.0 - r * r) + 1.0 / std::sqrt(2.0);
        const double du = r / std::sqrt(1.0 - r * r);
        CHECK(evaluate_p(PKind::curv, u, du * du) ==
              Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-14));
    }
}

TEST_CASE("fij_matrix: l = 0 reduces to the S_k gradient") {
    Rng rng(31);
    SquareMatrix a = random_symmetric(rng, 4);
    const LinearizedOperator f = fij_matrix(3, 0, a);
    const SquareMatrix g = sk_gradient(3, a);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(f.f(i, j) == g(i, j));
}

TEST_CASE("fij_matrix: hand value at the identity") {
    const LinearizedOperator f = fij_matrix(2, 1, SquareMatrix::identity(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(f.f(i, j) == Catch::Approx(i == j ? 1.0 / 3.0 : 0.0).margin(1e-14));
}

TEST_CASE("fij_matrix matches finite differences of the quotient") {
    Rng rng(41);
    for (int rep = 0; rep < 8; ++rep) {
        const int n = 3 + rep % 3;
        SquareMatrix a = random_gamma_matrix(rng, n, n);
        const int k = 2 + rep % (n - 1);
        const int l = rep % k;
        const LinearizedOperator f = fij_matrix(k, l, a);
        const double h = 1e-6;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                SquareMatrix ap = a, am = a;
                ap(i, j) += h;
                am(i, j) -= h;
                const double qp = sk_of_matrix(k, ap) / sk_of_matrix(l, ap);
                const double qm = sk_of_matrix(k, am) / sk_of_matrix(l, am);
                const double fd = (qp - qm) / (2.0 * h);
                CHECK(f.f(i, j) == Catch::Approx(fd).margin(1e-6 * std::max(1.0, std::abs(fd))));
            }
        }
    }
}

TEST_CASE("fij_matrix rejects a vanishing S_l") {
    SquareMatrix a = SquareMatrix::diagonal({1.0, -1.0});  // S_1 = 0
    CHECK_THROWS_AS(fij_matrix(2, 1, a), std::domain_error);
}

TEST_CASE("elliptic_on_p: grid route vanishes on the explicit Euclidean solution") {
    ScalarField f = ScalarField::sample(2, 33, {-0.6, -0.6, 0.0}, {0.6, 0.6, 0.0}, [](Vec3 x) {
        return 0.5 * (x[0] * x[0] + x[1] * x[1] - 1.0);
    });
    for (auto [k, l] : {std::pair{2, 1}, std::pair{2, 0}, std::pair{1, 0}}) {
        CHECK(std::abs(elliptic_on_p(f, k, l, GeometryTag::euclidean_hessian, {16, 12, 0})) <= 1e-6);
    }
}

TEST_CASE("elliptic_on_p: admissibility violation is reported") {
    ScalarField f = ScalarField::sample(2, 17, {-0.5, -0.5, 0.0}, {0.5, 0.5, 0.0}, [](Vec3 x) {
        return -x[0] * x[0] - x[1] * x[1];
    });
    CHECK_THROWS_AS(elliptic_on_p(f, 2, 1, GeometryTag::euclidean_hessian, {8, 8, 0}),
                    std::domain_error);
}

TEST_CASE("subsolution sign along radial Euclidean solutions") {
    for (auto [n, k, l] : {std::tuple{3, 2, 1}, std::tuple{4, 3, 1}, std::tuple{5, 2, 0}}) {
        for (double c : {0.7, 1.0, 1.4}) {
            const RadialProfile p = solve_radial(GeometryTag::euclidean_hessian, n, k, l, c, 5e-4);
            CHECK(min_fijpij(p, k, l, 10) >= -1e-6);
        }
    }
}

TEST_CASE("elliptic_on_p: curvature geometry on the explicit graph solution") {
    const RadialProfile p = explicit_profile(GeometryTag::graph_curvature, 2, 1.0);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < p.samples(); i += 25)
        worst = std::max(worst, std::abs(elliptic_on_p(p, 2, 1, i)));
    CHECK(worst <= 1e-5);
}

TEST_CASE("extremum_scan: grid route on the explicit solution over the unit disk") {
    ScalarField f = ScalarField::sample(2, 41, {-1.1, -1.1, 0.0}, {1.1, 1.1, 0.0}, [](Vec3 x) {
        return 0.5 * (x[0] * x[0] + x[1] * x[1] - 1.0);
    });
    auto inside = [](Vec3 x) { return x[0] * x[0] + x[1] * x[1] < 1.0; };
    const ExtremumReport rep = extremum_scan(f, 2, 1, GeometryTag::euclidean_hessian, inside);
    CHECK(rep.equation_satisfied);
    CHECK(rep.boundary_max == Catch::Approx(1.0).margin(1e-10));
    CHECK(std::abs(rep.margin) <= 1e-10);  // P is constant
    CHECK(rep.has_fijpij);
    CHECK(rep.min_fijpij >= -1e-6);
}

TEST_CASE("extremum_scan: non-solutions are flagged but still scanned") {
    ScalarField f = ScalarField::sample(2, 41, {-1.1, -1.1, 0.0}, {1.1, 1.1, 0.0}, [](Vec3 x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        return -r2 * r2;
    });
    auto inside = [](Vec3 x) { return x[0] * x[0] + x[1] * x[1] < 1.0; };
    const ExtremumReport rep = extremum_scan(f, 2, 1, GeometryTag::euclidean_hessian, inside);
    CHECK_FALSE(rep.equation_satisfied);
    CHECK(rep.max_equation_rel_residual > 1e-2);
    CHECK(rep.boundary_max > rep.interior_max - 10.0);  // scan executed and classified samples
}

TEST_CASE("extremum_scan: radial route reports boundary argmax for solver output") {
    const RadialProfile p = solve_radial(GeometryTag::euclidean_hessian, 3, 2, 1, 1.0, 5e-4);
    const ExtremumReport rep = extremum_scan(p, 2, 1);
    CHECK(rep.equation_satisfied);
    CHECK(rep.margin >= -1e-9);
    CHECK(rep.min_fijpij >= -1e-6);
    CHECK(rep.boundary_max == Catch::Approx(1.0).margin(1e-8));
}
