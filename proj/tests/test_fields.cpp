#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hessquot/fields.hpp"
#include "hessquot/sampling.hpp"

using namespace hq;

namespace {

ScalarField quadratic_bowl_2d(int count, double half_width) {
    return ScalarField::sample(2, count, {-half_width, -half_width, 0.0},
                               {half_width, half_width, 0.0}, [](Vec3 x) {
                                   return 0.5 * (x[0] * x[0] + x[1] * x[1] - 1.0);
                               });
}

GridIndex center_of(const ScalarField& f) {
    return {f.size(0) / 2, f.size(1) / 2, f.dim() == 3 ? f.size(2) / 2 : 0};
}

double hessian_error_max(const ScalarField& f, const GridIndex& at,
                         const std::function<double(Vec3, int, int)>& exact) {
    auto [grad, hess] = gradient_hessian(f, at);
    const Vec3 x = f.location(at);
    double err = 0.0;
    for (int i = 0; i < f.dim(); ++i)
        for (int j = 0; j < f.dim(); ++j) err = std::max(err, std::abs(hess(i, j) - exact(x, i, j)));
    return err;
}

}  // namespace

TEST_CASE("gradient_hessian is exact on quadratics") {
    ScalarField f = quadratic_bowl_2d(33, 0.8);
    GridIndex at{10, 20, 0};
    auto [grad, hess] = gradient_hessian(f, at);
    const Vec3 x = f.location(at);
    CHECK(grad[0] == Catch::Approx(x[0]).margin(1e-12));
    CHECK(grad[1] == Catch::Approx(x[1]).margin(1e-12));
    CHECK(hess(0, 0) == Catch::Approx(1.0).margin(1e-11));
    CHECK(hess(1, 1) == Catch::Approx(1.0).margin(1e-11));
    CHECK(hess(0, 1) == Catch::Approx(0.0).margin(1e-11));
}

TEST_CASE("gradient_hessian rejects points near the edge") {
    ScalarField f = quadratic_bowl_2d(9, 1.0);
    CHECK_THROWS_AS(gradient_hessian(f, GridIndex{1, 4, 0}), std::domain_error);
    CHECK_THROWS_AS(gradient_hessian(f, GridIndex{4, 7, 0}), std::domain_error);
    CHECK_NOTHROW(gradient_hessian(f, GridIndex{2, 4, 0}));
}

TEST_CASE("second derivative of x^3 at x=1") {
    auto cube = [](Vec3 x) { return x[0] * x[0] * x[0]; };
    const double h = 1.0 / 128.0;
    ScalarField f = ScalarField::sample(2, 9, {1.0 - 4.0 * h, -4.0 * h, 0.0},
                                        {1.0 + 4.0 * h, 4.0 * h, 0.0}, cube);
    auto [grad, hess] = gradient_hessian(f, center_of(f));
    CHECK(hess(0, 0) == Catch::Approx(6.0).margin(1e-3));
    CHECK(grad[0] == Catch::Approx(3.0).margin(1e-3));
}

TEST_CASE("Hessian error drops ~4x when h halves") {
    auto wavy = [](Vec3 x) { return std::sin(x[0]) * std::cos(x[1]); };
    auto exact = [](Vec3 x, int i, int j) {
        if (i == 0 && j == 0) return -std::sin(x[0]) * std::cos(x[1]);
        if (i == 1 && j == 1) return -std::sin(x[0]) * std::cos(x[1]);
        return -std::cos(x[0]) * std::sin(x[1]);
    };
    ScalarField coarse = ScalarField::sample(2, 33, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, wavy);
    ScalarField fine = ScalarField::sample(2, 65, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, wavy);
    const double e_coarse = hessian_error_max(coarse, {16, 16, 0}, exact);
    const double e_fine = hessian_error_max(fine, {32, 32, 0}, exact);
    const double ratio = e_coarse / e_fine;
    CHECK(ratio > 3.4);
    CHECK(ratio < 4.6);
}

TEST_CASE("operator_matrix: euclidean quadratic gives the identity") {
    ScalarField f = quadratic_bowl_2d(17, 0.6);
    SquareMatrix m = operator_matrix(f, {8, 8, 0}, GeometryTag::euclidean_hessian);
    CHECK(m(0, 0) == Catch::Approx(1.0).margin(1e-11));
    CHECK(m(1, 1) == Catch::Approx(1.0).margin(1e-11));
    CHECK(m(0, 1) == Catch::Approx(0.0).margin(1e-11));
}

TEST_CASE("operator_matrix: graph curvature of the unit-sphere cap") {
    auto cap = [](Vec3 x) {
        return -std::sqrt(1.0 - x[0] * x[0] - x[1] * x[1]) + 1.0 / std::sqrt(2.0);
    };
    const double h = 1.0 / 256.0;
    ScalarField f = ScalarField::sample(2, 9, {0.3 - 4.0 * h, -4.0 * h, 0.0},
                                        {0.3 + 4.0 * h, 4.0 * h, 0.0}, cap);
    SquareMatrix a = operator_matrix(f, center_of(f), GeometryTag::graph_curvature);
    // all principal curvatures equal 1: for this cap a_ij = delta_ij exactly
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    CHECK(tr / 2.0 + disc == Catch::Approx(1.0).margin(5e-3));
    CHECK(tr / 2.0 - disc == Catch::Approx(1.0).margin(5e-3));

    // Prop 2.5 residual bound for the (generally non-symmetric) matrix
    auto res = algebraic_identity_residuals(a, 2);
    CHECK(res.commute_general <= 1e-8 * res.scale);
}

TEST_CASE("operator_matrix rejects the hyperbolic tag on grids") {
    ScalarField f = quadratic_bowl_2d(9, 0.5);
    CHECK_THROWS_AS(operator_matrix(f, {4, 4, 0}, GeometryTag::hyperbolic_hessian),
                    std::invalid_argument);
}

TEST_CASE("divergence_residual: quadratic field is flat") {
    ScalarField f = quadratic_bowl_2d(17, 0.5);
    for (int k = 1; k <= 2; ++k) {
        CHECK(divergence_residual(f, k, GeometryTag::euclidean_hessian) <= 1e-9);
    }
}

TEST_CASE("divergence_residual: cubic field stays at stencil exactness") {
    auto cubic = [](Vec3 x) {
        return x[0] * x[0] * x[0] + x[1] * x[1] * x[1] + x[0] * x[1] * x[1];
    };
    ScalarField f = ScalarField::sample(3, 11, {-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}, cubic);
    CHECK(divergence_residual(f, 2, GeometryTag::euclidean_hessian) <= 1e-10);
}

TEST_CASE("divergence_residual converges at second order on smooth fields") {
    auto wavy = [](Vec3 x) { return std::sin(1.3 * x[0]) * std::cos(0.7 * x[1]) + 0.2 * x[0] * x[1]; };
    ScalarField coarse = ScalarField::sample(2, 25, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, wavy);
    ScalarField fine = ScalarField::sample(2, 49, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, wavy);
    const double rc = divergence_residual(coarse, 2, GeometryTag::euclidean_hessian, 3);
    const double rf = divergence_residual(fine, 2, GeometryTag::euclidean_hessian, 6);
    // same physical subregion: margin doubles with the resolution
    CHECK(rf < rc);
    CHECK(rc / rf > 3.0);
}

TEST_CASE("divergence_residual: graph curvature operator") {
    auto cap = [](Vec3 x) {
        return -std::sqrt(1.0 - x[0] * x[0] - x[1] * x[1]) + 1.0 / std::sqrt(2.0);
    };
    const double h = 1.0 / 256.0;
    ScalarField f = ScalarField::sample(2, 13, {0.3 - 6.0 * h, -6.0 * h, 0.0},
                                        {0.3 + 6.0 * h, 6.0 * h, 0.0}, cap);
    // k = 1: S_1^{ij} = delta_ij identically, so the divergence vanishes outright
    CHECK(divergence_residual(f, 1, GeometryTag::graph_curvature) <= 1e-2);
    // k = 2 carries the real content; halved spacing cuts the residual
    const double h2 = h / 2.0;
    ScalarField f2 = ScalarField::sample(2, 13, {0.3 - 6.0 * h2, -6.0 * h2, 0.0},
                                         {0.3 + 6.0 * h2, 6.0 * h2, 0.0}, cap);
    const double r_coarse = divergence_residual(f, 2, GeometryTag::graph_curvature);
    const double r_fine = divergence_residual(f2, 2, GeometryTag::graph_curvature);
    CHECK(r_coarse <= 1e-2);
    CHECK(r_fine < r_coarse);
}

TEST_CASE("levelset_curvature of circles and spheres") {
    // 2d circle of radius 0.5 has curvature 2; grid point exactly at (0.5, 0)
    {
        const double h = 1.0 / 256.0;
        ScalarField f = ScalarField::sample(2, 9, {0.5 - 4.0 * h, -4.0 * h, 0.0},
                                            {0.5 + 4.0 * h, 4.0 * h, 0.0}, [](Vec3 x) {
                                                return 0.5 * (x[0] * x[0] + x[1] * x[1] - 1.0);
                                            });
        CHECK(levelset_curvature(f, center_of(f), 2) == Catch::Approx(2.0).margin(1e-6));
    }
    // 3d sphere of radius 0.5: H_1 = 2 * (1/0.5) = 4
    {
        const double h = 1.0 / 128.0;
        ScalarField f = ScalarField::sample(3, 9, {0.5 - 4.0 * h, -4.0 * h, -4.0 * h},
                                            {0.5 + 4.0 * h, 4.0 * h, 4.0 * h}, [](Vec3 x) {
                                                return 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0);
                                            });
        CHECK(levelset_curvature(f, center_of(f), 2) == Catch::Approx(4.0).margin(1e-5));
    }
}

TEST_CASE("levelset_curvature: flat level sets and degenerate gradients") {
    ScalarField lin = ScalarField::sample(2, 17, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0},
                                          [](Vec3 x) { return 2.0 * x[0] + x[1]; });
    CHECK(levelset_curvature(lin, {8, 8, 0}, 2) == Catch::Approx(0.0).margin(1e-10));

    ScalarField flat = ScalarField::sample(2, 17, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0},
                                           [](Vec3) { return 1.0; });
    CHECK_THROWS_AS(levelset_curvature(flat, {8, 8, 0}, 1), std::domain_error);
}

TEST_CASE("pointwise_rellich_residual vanishes on the explicit solution") {
    ScalarField f = quadratic_bowl_2d(17, 0.6);
    for (int k = 1; k <= 2; ++k) {
        CHECK(std::abs(pointwise_rellich_residual(f, k, {8, 6, 0})) <= 1e-8);
        CHECK(std::abs(pointwise_rellich_residual(f, k, {5, 11, 0})) <= 1e-8);
    }
}

TEST_CASE("pointwise_rellich_residual is second order on a quartic") {
    Rng rng(13);
    std::array<double, 15> c{};
    for (auto& v : c) v = rng.uniform(-1.0, 1.0);
    auto quartic = [&](Vec3 p) {
        const double x = p[0], y = p[1];
        int idx = 0;
        double acc = 0.0;
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; a + b <= 4; ++b) acc += c[static_cast<std::size_t>(idx++)] * std::pow(x, a) * std::pow(y, b);
        return acc;
    };
    ScalarField coarse = ScalarField::sample(2, 33, {-0.5, -0.5, 0.0}, {0.5, 0.5, 0.0}, quartic);
    ScalarField fine = ScalarField::sample(2, 65, {-0.5, -0.5, 0.0}, {0.5, 0.5, 0.0}, quartic);
    const double rc = std::abs(pointwise_rellich_residual(coarse, 2, {16, 16, 0}));
    const double rf = std::abs(pointwise_rellich_residual(fine, 2, {32, 32, 0}));
    const double ratio = rc / rf;
    CHECK(ratio > 3.2);
    CHECK(ratio < 4.8);
}

TEST_CASE("ScalarField csv round trip") {
    ScalarField f = ScalarField::sample(2, 7, {-0.25, 0.5, 0.0}, {0.75, 1.5, 0.0},
                                        [](Vec3 x) { return x[0] * x[1] + 3.0; });
    std::stringstream ss;
    write_csv(f, ss);
    ScalarField g = read_csv(ss);
    REQUIRE(g.dim() == 2);
    REQUIRE(g.size(0) == 7);
    REQUIRE(g.size(1) == 7);
    CHECK(g.spacing(0) == Catch::Approx(f.spacing(0)));
    CHECK(g.origin()[0] == Catch::Approx(-0.25));
    for (std::size_t i = 0; i < f.raw().size(); ++i) CHECK(g.raw()[i] == f.raw()[i]);
}

TEST_CASE("point_eval bundles location, gradient, operator and S-vector") {
    ScalarField f = quadratic_bowl_2d(17, 0.6);
    PointEval pe = point_eval(f, {8, 8, 0}, GeometryTag::euclidean_hessian);
    CHECK(pe.s.at(0) == 1.0);
    CHECK(pe.s.at(1) == Catch::Approx(2.0).margin(1e-10));
    CHECK(pe.s.at(2) == Catch::Approx(1.0).margin(1e-10));
    CHECK(pe.op.size() == 2);
}
