#pragma once

// Sampled scalar fields on uniform tensor grids, second-order stencils for
// gradient / Hessian, the three geometric operator matrices, and pointwise
// verifiers for the divergence-free, level-set-curvature and dilation
// identities.

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessquot/symfunc.hpp"

namespace hq {

using Vec3 = std::array<double, 3>;
using GridIndex = std::array<int, 3>;

inline double dot(const Vec3& a, const Vec3& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    return s;
}

inline double norm(const Vec3& a, int d) { return std::sqrt(dot(a, a, d)); }

enum class GeometryTag { euclidean_hessian, hyperbolic_hessian, graph_curvature };

inline const char* to_string(GeometryTag g) {
    switch (g) {
        case GeometryTag::euclidean_hessian: return "euclidean_hessian";
        case GeometryTag::hyperbolic_hessian: return "hyperbolic_hessian";
        case GeometryTag::graph_curvature: return "graph_curvature";
    }
    return "?";
}

/// Immutable scalar samples on a uniform tensor grid over a box.
/// Index order is row-major with the last axis fastest.
class ScalarField {
public:
    ScalarField(int dim, GridIndex sizes, Vec3 spacing, Vec3 origin, std::vector<double> values)
        : dim_(dim), n_(sizes), h_(spacing), origin_(origin), v_(std::move(values)) {
        if (dim_ != 2 && dim_ != 3) throw std::invalid_argument("ScalarField: dimension must be 2 or 3");
        std::size_t total = 1;
        for (int a = 0; a < dim_; ++a) {
            if (n_[static_cast<std::size_t>(a)] < 5)
                throw std::invalid_argument("ScalarField: need >= 5 points per axis");
            if (!(h_[static_cast<std::size_t>(a)] > 0.0))
                throw std::invalid_argument("ScalarField: spacing must be positive");
            total *= static_cast<std::size_t>(n_[static_cast<std::size_t>(a)]);
        }
        for (int a = dim_; a < 3; ++a) {
            n_[static_cast<std::size_t>(a)] = 1;
            h_[static_cast<std::size_t>(a)] = 1.0;
        }
        if (v_.size() != total) throw std::invalid_argument("ScalarField: value count mismatch");
    }

    /// Sample an analytic function on [lo, hi]^dim with `count` points per axis.
    static ScalarField sample(int dim, int count, Vec3 lo, Vec3 hi,
                              const std::function<double(Vec3)>& f) {
        GridIndex sizes{count, count, dim == 3 ? count : 1};
        Vec3 h{}, origin = lo;
        for (int a = 0; a < dim; ++a)
            h[static_cast<std::size_t>(a)] =
                (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]) / (count - 1);
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(count) * count * (dim == 3 ? count : 1));
        GridIndex idx{0, 0, 0};
        const int nz = dim == 3 ? count : 1;
        for (idx[0] = 0; idx[0] < count; ++idx[0])
            for (idx[1] = 0; idx[1] < count; ++idx[1])
                for (idx[2] = 0; idx[2] < nz; ++idx[2]) {
                    Vec3 x{};
                    for (int a = 0; a < dim; ++a)
                        x[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] +
                                                         h[static_cast<std::size_t>(a)] * idx[static_cast<std::size_t>(a)];
                    vals.push_back(f(x));
                }
        return ScalarField(dim, sizes, h, origin, std::move(vals));
    }

    int dim() const { return dim_; }
    int size(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
    const Vec3& origin() const { return origin_; }

    double value(const GridIndex& i) const { return v_[flat(i)]; }

    Vec3 location(const GridIndex& i) const {
        Vec3 x{};
        for (int a = 0; a < dim_; ++a)
            x[static_cast<std::size_t>(a)] = origin_[static_cast<std::size_t>(a)] +
                                             h_[static_cast<std::size_t>(a)] * i[static_cast<std::size_t>(a)];
        return x;
    }

    /// True when `i` keeps at least `margin` cells to every box edge.
    bool interior(const GridIndex& i, int margin) const {
        for (int a = 0; a < dim_; ++a) {
            if (i[static_cast<std::size_t>(a)] < margin ||
                i[static_cast<std::size_t>(a)] > n_[static_cast<std::size_t>(a)] - 1 - margin)
                return false;
        }
        return true;
    }

    void require_interior(const GridIndex& i, int margin) const {
        if (!interior(i, margin))
            throw std::domain_error("ScalarField: point too near the box edge for the stencil");
    }

    const std::vector<double>& raw() const { return v_; }

private:
    std::size_t flat(const GridIndex& i) const {
        return (static_cast<std::size_t>(i[0]) * n_[1] + static_cast<std::size_t>(i[1])) * n_[2] +
               static_cast<std::size_t>(i[2]);
    }

    int dim_;
    GridIndex n_;
    Vec3 h_;
    Vec3 origin_;
    std::vector<double> v_;
};

namespace detail {

inline GridIndex shifted(GridIndex i, int axis, int by) {
    i[static_cast<std::size_t>(axis)] += by;
    return i;
}

}  // namespace detail

/// Central-difference gradient and Hessian; exact on quadratics. The mixed
/// stencil is the symmetric 4-point cross, so the Hessian is symmetric by
/// construction.
inline std::pair<Vec3, SquareMatrix> gradient_hessian(const ScalarField& f, const GridIndex& at) {
    const int d = f.dim();
    f.require_interior(at, 2);
    Vec3 grad{};
    SquareMatrix hess(d, true);
    for (int a = 0; a < d; ++a) {
        const double ha = f.spacing(a);
        const double fp = f.value(detail::shifted(at, a, +1));
        const double fm = f.value(detail::shifted(at, a, -1));
        const double f0 = f.value(at);
        grad[static_cast<std::size_t>(a)] = (fp - fm) / (2.0 * ha);
        hess(a, a) = (fp - 2.0 * f0 + fm) / (ha * ha);
        for (int b = a + 1; b < d; ++b) {
            const double hb = f.spacing(b);
            const double pp = f.value(detail::shifted(detail::shifted(at, a, +1), b, +1));
            const double pm = f.value(detail::shifted(detail::shifted(at, a, +1), b, -1));
            const double mp = f.value(detail::shifted(detail::shifted(at, a, -1), b, +1));
            const double mm = f.value(detail::shifted(detail::shifted(at, a, -1), b, -1));
            const double mixed = (pp - pm - mp + mm) / (4.0 * ha * hb);
            hess(a, b) = mixed;
            hess(b, a) = mixed;
        }
    }
    return {grad, hess};
}

/// The geometry's operator matrix at a grid point: D^2 u, or the graph
/// curvature matrix a_ij = u_ij/w - u_i u_k u_kj / w^3. The hyperbolic
/// operator only exists on radial profiles, so the grid route rejects it.
inline SquareMatrix operator_matrix(const ScalarField& f, const GridIndex& at, GeometryTag geom) {
    auto [grad, hess] = gradient_hessian(f, at);
    const int d = f.dim();
    switch (geom) {
        case GeometryTag::euclidean_hessian:
            return hess;
        case GeometryTag::graph_curvature: {
            const double w2 = 1.0 + dot(grad, grad, d);
            const double w = std::sqrt(w2);
            SquareMatrix a(d);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    double uk_ukj = 0.0;
                    for (int k = 0; k < d; ++k) uk_ukj += grad[static_cast<std::size_t>(k)] * hess(k, j);
                    a(i, j) = hess(i, j) / w - grad[static_cast<std::size_t>(i)] * uk_ukj / (w2 * w);
                }
            }
            return a;
        }
        case GeometryTag::hyperbolic_hessian:
            throw std::invalid_argument(
                "operator_matrix: hyperbolic_hessian is only defined on radial profiles");
    }
    throw std::logic_error("operator_matrix: unknown geometry");
}

/// Location, gradient, operator matrix and its S-vector in one record.
struct PointEval {
    Vec3 location{};
    Vec3 gradient{};
    SquareMatrix op;
    SymFunVector s;
};

inline PointEval point_eval(const ScalarField& f, const GridIndex& at, GeometryTag geom) {
    PointEval pe{Vec3{}, Vec3{}, operator_matrix(f, at, geom), SymFunVector{}};
    pe.location = f.location(at);
    pe.gradient = gradient_hessian(f, at).first;
    pe.s = sk_all_of_matrix(pe.op);
    return pe;
}

/// Sup over the interior subregion of the divergence of the S_k gradient
/// field. The divergence runs over the first index for the Euclidean
/// Hessian and over the second for the (non-symmetric) curvature matrix,
/// matching the orientation in which each operator is divergence free.
inline double divergence_residual(const ScalarField& f, int k, GeometryTag geom, int margin = 3) {
    if (geom == GeometryTag::hyperbolic_hessian)
        throw std::invalid_argument("divergence_residual: grid route rejects hyperbolic_hessian");
    const int d = f.dim();
    if (margin < 3) throw std::invalid_argument("divergence_residual: margin must be >= 3");

    auto grad_matrix = [&](const GridIndex& at) {
        return sk_gradient(k, operator_matrix(f, at, geom));
    };

    double sup = 0.0;
    GridIndex i{0, 0, 0};
    const int nz = d == 3 ? f.size(2) : 1;
    for (i[0] = margin; i[0] < f.size(0) - margin; ++i[0]) {
        for (i[1] = margin; i[1] < f.size(1) - margin; ++i[1]) {
            for (i[2] = d == 3 ? margin : 0; i[2] < (d == 3 ? nz - margin : 1); ++i[2]) {
                // d gradient-matrix evaluations per axis sign; cache per point
                std::vector<SquareMatrix> plus, minus;
                plus.reserve(static_cast<std::size_t>(d));
                minus.reserve(static_cast<std::size_t>(d));
                for (int a = 0; a < d; ++a) {
                    plus.push_back(grad_matrix(detail::shifted(i, a, +1)));
                    minus.push_back(grad_matrix(detail::shifted(i, a, -1)));
                }
                for (int free = 0; free < d; ++free) {
                    double div = 0.0;
                    for (int a = 0; a < d; ++a) {
                        const double ha = f.spacing(a);
                        const double gp = geom == GeometryTag::graph_curvature
                                              ? plus[static_cast<std::size_t>(a)](free, a)
                                              : plus[static_cast<std::size_t>(a)](a, free);
                        const double gm = geom == GeometryTag::graph_curvature
                                              ? minus[static_cast<std::size_t>(a)](free, a)
                                              : minus[static_cast<std::size_t>(a)](a, free);
                        div += (gp - gm) / (2.0 * ha);
                    }
                    sup = std::max(sup, std::abs(div));
                }
            }
        }
    }
    return sup;
}

/// H_{k-1} of the level set through a grid point: S_k^{ij} u_i u_j / |Du|^{k+1}.
inline double levelset_curvature(const ScalarField& f, const GridIndex& at, int k,
                                 double eps_grad = 1e-8) {
    auto [grad, hess] = gradient_hessian(f, at);
    const int d = f.dim();
    const double gn = norm(grad, d);
    if (gn <= eps_grad)
        throw std::domain_error("levelset_curvature: vanishing gradient at the requested point");
    const SquareMatrix g = sk_gradient(k, hess);
    double quad = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            quad += g(i, j) * grad[static_cast<std::size_t>(i)] * grad[static_cast<std::size_t>(j)];
    return quad / std::pow(gn, k + 1);
}

/// Difference of the two sides of the pointwise dilation identity
///   2 x_s d_s(S_k) u = (S_k^{ij} u_{is} u (|x|^2)_s)_j - (S_k^{ij} |Du|^2 x_j)_i
///                      + (n-k+1) S_{k-1} |Du|^2 - 2k S_k u,
/// with the outer derivatives taken as central differences of the assembled
/// composite fields (so the residual stays O(h^2)).
inline double pointwise_rellich_residual(const ScalarField& f, int k, const GridIndex& at) {
    const int d = f.dim();
    f.require_interior(at, 3);

    auto sk_at = [&](const GridIndex& p) {
        return sk_of_matrix(k, gradient_hessian(f, p).second);
    };
    auto w1_at = [&](const GridIndex& p, int j) {
        auto [grad, hess] = gradient_hessian(f, p);
        const SquareMatrix g = sk_gradient(k, hess);
        const Vec3 x = f.location(p);
        const double u = f.value(p);
        double acc = 0.0;
        for (int i = 0; i < d; ++i) {
            double his = 0.0;
            for (int s = 0; s < d; ++s) his += hess(i, s) * 2.0 * x[static_cast<std::size_t>(s)];
            acc += g(i, j) * his * u;
        }
        return acc;
    };
    auto w2_at = [&](const GridIndex& p, int i) {
        auto [grad, hess] = gradient_hessian(f, p);
        const SquareMatrix g = sk_gradient(k, hess);
        const Vec3 x = f.location(p);
        const double du2 = dot(grad, grad, d);
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += g(i, j) * du2 * x[static_cast<std::size_t>(j)];
        return acc;
    };

    const Vec3 x = f.location(at);
    const double u = f.value(at);
    auto [grad, hess] = gradient_hessian(f, at);
    const double du2 = dot(grad, grad, d);
    const double sk = sk_of_matrix(k, hess);
    const double sk1 = sk_of_matrix(k - 1, hess);

    double lhs = 0.0;
    for (int s = 0; s < d; ++s) {
        const double hs = f.spacing(s);
        const double dsk = (sk_at(detail::shifted(at, s, +1)) - sk_at(detail::shifted(at, s, -1))) / (2.0 * hs);
        lhs += 2.0 * x[static_cast<std::size_t>(s)] * dsk * u;
    }

    double div_w1 = 0.0, div_w2 = 0.0;
    for (int a = 0; a < d; ++a) {
        const double ha = f.spacing(a);
        div_w1 += (w1_at(detail::shifted(at, a, +1), a) - w1_at(detail::shifted(at, a, -1), a)) / (2.0 * ha);
        div_w2 += (w2_at(detail::shifted(at, a, +1), a) - w2_at(detail::shifted(at, a, -1), a)) / (2.0 * ha);
    }

    const double rhs = div_w1 - div_w2 + (d - k + 1) * sk1 * du2 - 2.0 * k * sk * u;
    return lhs - rhs;
}

// ---------------------------------------------------------------------------
// CSV import/export: labeled header (dim / size / spacing / origin), then one
// value per line in row-major order, last axis fastest.
// ---------------------------------------------------------------------------

inline void write_csv(const ScalarField& f, std::ostream& os) {
    os.precision(17);
    os << "dim," << f.dim() << "\n";
    os << "size";
    for (int a = 0; a < f.dim(); ++a) os << "," << f.size(a);
    os << "\nspacing";
    for (int a = 0; a < f.dim(); ++a) os << "," << f.spacing(a);
    os << "\norigin";
    for (int a = 0; a < f.dim(); ++a) os << "," << f.origin()[static_cast<std::size_t>(a)];
    os << "\nvalues\n";
    for (double v : f.raw()) os << v << "\n";
}

inline void write_csv(const ScalarField& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    write_csv(f, os);
}

inline ScalarField read_csv(std::istream& is) {
    auto next_fields = [&](const std::string& tag) {
        std::string line;
        if (!std::getline(is, line)) throw std::runtime_error("ScalarField csv: truncated header");
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> out;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        if (out.empty() || out.front() != tag)
            throw std::runtime_error("ScalarField csv: expected header row '" + tag + "'");
        return out;
    };

    const auto dim_row = next_fields("dim");
    const int dim = std::stoi(dim_row.at(1));
    const auto size_row = next_fields("size");
    const auto spacing_row = next_fields("spacing");
    const auto origin_row = next_fields("origin");
    GridIndex sizes{1, 1, 1};
    Vec3 h{1.0, 1.0, 1.0}, origin{};
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) {
        sizes[static_cast<std::size_t>(a)] = std::stoi(size_row.at(static_cast<std::size_t>(a) + 1));
        h[static_cast<std::size_t>(a)] = std::stod(spacing_row.at(static_cast<std::size_t>(a) + 1));
        origin[static_cast<std::size_t>(a)] = std::stod(origin_row.at(static_cast<std::size_t>(a) + 1));
        total *= static_cast<std::size_t>(sizes[static_cast<std::size_t>(a)]);
    }
    next_fields("values");
    std::vector<double> vals;
    vals.reserve(total);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        vals.push_back(std::stod(line));
    }
    return ScalarField(dim, sizes, h, origin, std::move(vals));
}

inline ScalarField read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_csv: cannot open " + path);
    return read_csv(is);
}

}  // namespace hq
