#pragma once

// The three P-functions, the linearized quotient operator F^{ij}, the
// discrete subsolution check F^{ij} P_{ij}, and extremum scans that test the
// maximum-principle conclusion on sampled data.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "hessquot/fields.hpp"
#include "hessquot/symfunc.hpp"

namespace hq {

enum class PKind { euclid, hyper, curv };

inline const char* to_string(PKind k) {
    switch (k) {
        case PKind::euclid: return "euclid";
        case PKind::hyper: return "hyper";
        case PKind::curv: return "curv";
    }
    return "?";
}

inline PKind kind_for(GeometryTag g) {
    switch (g) {
        case GeometryTag::euclidean_hessian: return PKind::euclid;
        case GeometryTag::hyperbolic_hessian: return PKind::hyper;
        case GeometryTag::graph_curvature: return PKind::curv;
    }
    throw std::logic_error("kind_for: unknown geometry");
}

/// P value from u and |Du|^2. euclid: |Du|^2 - 2u; hyper: |Du|^2 - u^2 - 2u;
/// curv: 1/w + u with w = sqrt(1 + |Du|^2). The curvature case follows the
/// proof's P (1/w + u), which is the variant that is constant on the
/// explicit solution.
inline double evaluate_p(PKind kind, double u, double grad_norm2) {
    switch (kind) {
        case PKind::euclid: return grad_norm2 - 2.0 * u;
        case PKind::hyper: return grad_norm2 - u * u - 2.0 * u;
        case PKind::curv: return 1.0 / std::sqrt(1.0 + grad_norm2) + u;
    }
    throw std::logic_error("evaluate_p: unknown kind");
}

inline double evaluate_p(PKind kind, double u, const Vec3& grad, int dim) {
    return evaluate_p(kind, u, dot(grad, grad, dim));
}

/// F^{ij} = d(S_k/S_l)/da_{ij} = (S_k^{ij} S_l - S_k S_l^{ij}) / S_l^2.
/// For l = 0 this is S_k^{ij} exactly (S_0 = 1 with zero gradient).
struct LinearizedOperator {
    SquareMatrix f;
    int k = 0, l = 0;
    double sk = 0.0, sl = 1.0;
};

inline LinearizedOperator fij_matrix(int k, int l, const SquareMatrix& a) {
    const int n = a.size();
    if (!(0 <= l && l < k && k <= n)) throw std::invalid_argument("fij_matrix: need 0 <= l < k <= n");
    LinearizedOperator out{SquareMatrix(n), k, l, sk_of_matrix(k, a), 1.0};
    if (l == 0) {
        out.f = sk_gradient(k, a);
        return out;
    }
    out.sl = sk_of_matrix(l, a);
    if (std::abs(out.sl) < 1e-300) throw std::domain_error("fij_matrix: S_l vanishes, quotient singular");
    const SquareMatrix gk = sk_gradient(k, a);
    const SquareMatrix gl = sk_gradient(l, a);
    const double sl2 = out.sl * out.sl;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.f(i, j) = (gk(i, j) * out.sl - out.sk * gl(i, j)) / sl2;
    return out;
}

/// Relative defect of S_k = (C_n^k / C_n^l) S_l for the operator matrix.
inline double equation_rel_residual(const SquareMatrix& a, int k, int l) {
    const int n = a.size();
    const double q = binomial(n, k) / binomial(n, l);
    const double sk = sk_of_matrix(k, a);
    const double sl = sk_of_matrix(l, a);
    const double scale = std::max({std::abs(sk), std::abs(q * sl), 1e-300});
    return std::abs(sk - q * sl) / scale;
}

/// F^{ij} P_{ij} at a grid point, P assembled from the field and
/// differentiated by central differences. Throws when the operator matrix
/// leaves Gamma_k (the lemma's admissibility hypothesis).
inline double elliptic_on_p(const ScalarField& f, int k, int l, GeometryTag geom,
                            const GridIndex& at) {
    f.require_interior(at, 3);
    const SquareMatrix a = operator_matrix(f, at, geom);
    if (cone_index(a) < k)
        throw std::domain_error("elliptic_on_p: operator matrix is not k-admissible at the point");
    const LinearizedOperator fij = fij_matrix(k, l, a);
    const PKind kind = kind_for(geom);
    const int d = f.dim();

    auto p_at = [&](const GridIndex& p) {
        const Vec3 g = gradient_hessian(f, p).first;
        return evaluate_p(kind, f.value(p), g, d);
    };

    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
        const double hi = f.spacing(i);
        const double pii = (p_at(detail::shifted(at, i, +1)) - 2.0 * p_at(at) +
                            p_at(detail::shifted(at, i, -1))) /
                           (hi * hi);
        acc += fij.f(i, i) * pii;
        for (int j = i + 1; j < d; ++j) {
            const double hj = f.spacing(j);
            const double pij =
                (p_at(detail::shifted(detail::shifted(at, i, +1), j, +1)) -
                 p_at(detail::shifted(detail::shifted(at, i, +1), j, -1)) -
                 p_at(detail::shifted(detail::shifted(at, i, -1), j, +1)) +
                 p_at(detail::shifted(detail::shifted(at, i, -1), j, -1))) /
                (4.0 * hi * hj);
            acc += (fij.f(i, j) + fij.f(j, i)) * pij;
        }
    }
    return acc;
}

/// One sampled point of an extremum scan.
struct ScanSample {
    Vec3 location{};
    double p = 0.0;
    bool boundary = false;
};

struct ExtremumReport {
    PKind kind = PKind::euclid;
    GeometryTag geometry = GeometryTag::euclidean_hessian;
    int k = 0, l = 0;
    double interior_max = 0.0;
    double boundary_max = 0.0;
    double margin = 0.0;  // boundary_max - interior_max
    Vec3 argmax{};
    bool argmax_on_boundary = false;
    double min_fijpij = 0.0;
    bool has_fijpij = false;
    bool equation_satisfied = false;  // quotient equation gate at the samples
    double max_equation_rel_residual = 0.0;
};

/// Core of every scan route: classify the extrema of sampled P values.
inline ExtremumReport scan_samples(const std::vector<ScanSample>& samples) {
    if (samples.empty()) throw std::invalid_argument("scan_samples: no samples");
    ExtremumReport rep;
    double best = -1e300;
    rep.interior_max = -1e300;
    rep.boundary_max = -1e300;
    bool saw_interior = false, saw_boundary = false;
    for (const auto& s : samples) {
        if (s.boundary) {
            rep.boundary_max = std::max(rep.boundary_max, s.p);
            saw_boundary = true;
        } else {
            rep.interior_max = std::max(rep.interior_max, s.p);
            saw_interior = true;
        }
        if (s.p > best) {
            best = s.p;
            rep.argmax = s.location;
            rep.argmax_on_boundary = s.boundary;
        }
    }
    if (!saw_interior || !saw_boundary)
        throw std::invalid_argument("scan_samples: need both interior and boundary samples");
    rep.margin = rep.boundary_max - rep.interior_max;
    return rep;
}

/// Scan a field over a domain described by an inside predicate. Grid nodes
/// whose neighbours leave the domain form the boundary band. The equation
/// gate is evaluated on the interior samples; a failed gate only flags the
/// report ("not a solution"), the scan itself still runs.
inline ExtremumReport extremum_scan(const ScalarField& f, int k, int l, GeometryTag geom,
                                    const std::function<bool(Vec3)>& inside,
                                    double equation_gate = 1e-4) {
    const int d = f.dim();
    const PKind kind = kind_for(geom);
    std::vector<ScanSample> samples;
    double max_res = 0.0;
    double min_fp = 1e300;
    bool any_fp = false;

    GridIndex i{0, 0, 0};
    const int nz = d == 3 ? f.size(2) : 1;
    for (i[0] = 2; i[0] < f.size(0) - 2; ++i[0]) {
        for (i[1] = 2; i[1] < f.size(1) - 2; ++i[1]) {
            for (i[2] = d == 3 ? 2 : 0; i[2] < (d == 3 ? nz - 2 : 1); ++i[2]) {
                if (!inside(f.location(i))) continue;
                bool band = false;
                for (int a = 0; a < d && !band; ++a) {
                    if (!inside(f.location(detail::shifted(i, a, +1))) ||
                        !inside(f.location(detail::shifted(i, a, -1))))
                        band = true;
                }
                ScanSample s;
                s.location = f.location(i);
                s.boundary = band;
                const auto [grad, hess] = gradient_hessian(f, i);
                s.p = evaluate_p(kind, f.value(i), grad, d);
                samples.push_back(s);
                if (!band) {
                    const SquareMatrix a = operator_matrix(f, i, geom);
                    max_res = std::max(max_res, equation_rel_residual(a, k, l));
                    if (f.interior(i, 3) && cone_index(a) >= k) {
                        min_fp = std::min(min_fp, elliptic_on_p(f, k, l, geom, i));
                        any_fp = true;
                    }
                }
            }
        }
    }

    ExtremumReport rep = scan_samples(samples);
    rep.kind = kind;
    rep.geometry = geom;
    rep.k = k;
    rep.l = l;
    rep.max_equation_rel_residual = max_res;
    rep.equation_satisfied = max_res <= equation_gate;
    if (any_fp) {
        rep.min_fijpij = min_fp;
        rep.has_fijpij = true;
    }
    return rep;
}

}  // namespace hq
