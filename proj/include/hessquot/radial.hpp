#pragma once

// Radial reductions of the three operators, explicit rigidity solutions,
// and an ODE shooting solver for the radial overdetermined problem with a
// general Neumann constant.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessquot/fields.hpp"
#include "hessquot/pfunc.hpp"
#include "hessquot/symfunc.hpp"

namespace hq {

/// u(r), u'(r), u''(r) on a uniform sample grid over [0, R].
struct RadialProfile {
    GeometryTag geometry = GeometryTag::euclidean_hessian;
    int n = 0;          // ambient dimension
    double R = 0.0;     // ball radius (geodesic radius in the hyperbolic case)
    double neumann = 0.0;  // c = u'(R)
    std::vector<double> r, u, du, ddu;

    double step() const { return r.size() > 1 ? r[1] - r[0] : 0.0; }
    std::size_t samples() const { return r.size(); }

    double eval_u(double at) const { return interp(u, at); }
    double eval_du(double at) const { return interp(du, at); }
    double eval_ddu(double at) const { return interp(ddu, at); }

private:
    // 4-point Lagrange interpolation on the uniform grid; error O(h^4).
    double interp(const std::vector<double>& f, double at) const {
        const double h = step();
        if (h <= 0.0) throw std::logic_error("RadialProfile: empty profile");
        if (at < -1e-12 || at > R + 1e-12) throw std::domain_error("RadialProfile: r outside [0, R]");
        const int nsize = static_cast<int>(f.size());
        int i0 = static_cast<int>(std::floor(at / h)) - 1;
        i0 = std::max(0, std::min(i0, nsize - 4));
        const double t = (at - r[static_cast<std::size_t>(i0)]) / h;
        const double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        const double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        const double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        const double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        return w0 * f[static_cast<std::size_t>(i0)] + w1 * f[static_cast<std::size_t>(i0) + 1] +
               w2 * f[static_cast<std::size_t>(i0) + 2] + w3 * f[static_cast<std::size_t>(i0) + 3];
    }
};

/// Eigenvalues of the geometry's operator matrix for a radial function:
/// one radial eigenvalue and n-1 equal tangential ones. r = 0 falls back to
/// the limit where the tangential value coincides with u''(0).
inline Spectrum radial_spectrum(const RadialProfile& p, double at) {
    const double h = p.step();
    std::vector<double> lam(static_cast<std::size_t>(p.n));
    double lr = 0.0, lt = 0.0;
    if (at < 0.5 * h) {
        const double dd = p.ddu.front();
        const double u0 = p.u.front();
        switch (p.geometry) {
            case GeometryTag::euclidean_hessian: lr = lt = dd; break;
            case GeometryTag::hyperbolic_hessian: lr = lt = dd - u0; break;
            case GeometryTag::graph_curvature: lr = lt = dd; break;  // w(0) = 1
        }
    } else {
        const double u = p.eval_u(at);
        const double du = p.eval_du(at);
        const double dd = p.eval_ddu(at);
        switch (p.geometry) {
            case GeometryTag::euclidean_hessian:
                lr = dd;
                lt = du / at;
                break;
            case GeometryTag::hyperbolic_hessian:
                lr = dd - u;
                lt = du / std::tanh(at) - u;
                break;
            case GeometryTag::graph_curvature: {
                const double w = std::sqrt(1.0 + du * du);
                lr = dd / (w * w * w);
                lt = du / (at * w);
                break;
            }
        }
    }
    lam[0] = lr;
    for (int i = 1; i < p.n; ++i) lam[static_cast<std::size_t>(i)] = lt;
    return Spectrum(lam);
}

namespace detail {

/// Radial eigenvalue solving S_k = (C_n^k/C_n^l) S_l given the tangential
/// eigenvalue. The quotient equation is linear in the radial eigenvalue:
///   S_m(lr, lt x (n-1)) = C_{n-1}^m lt^m + lr C_{n-1}^{m-1} lt^{m-1}.
inline double radial_eigen_root(int n, int k, int l, double lt) {
    auto term = [&](int m, int mm) {
        const double coef = binomial(n - 1, mm);
        return coef == 0.0 ? 0.0 : coef * std::pow(lt, mm) * binomial(n, m);
    };
    // numerator: C_n^k * C_{n-1}^l lt^l - C_n^l * C_{n-1}^k lt^k (note swap)
    const double num = term(k, l) - term(l, k);
    const double den = term(l, k - 1) - term(k, l - 1);
    if (!(den > 1e-14 * std::max(1.0, std::abs(num))))
        throw std::domain_error("solve_radial: no admissible radial eigenvalue at this step");
    return num / den;
}

struct RadialOde {
    GeometryTag geom;
    int n, k, l;

    // u'' from (r, u, phi) through the admissible radial eigenvalue.
    double acc(double r, double u, double phi) const {
        double lt = 0.0;
        switch (geom) {
            case GeometryTag::euclidean_hessian: lt = phi / r; break;
            case GeometryTag::hyperbolic_hessian: lt = phi / std::tanh(r) - u; break;
            case GeometryTag::graph_curvature: lt = phi / (r * std::sqrt(1.0 + phi * phi)); break;
        }
        if (!(lt > 0.0))
            throw std::domain_error("solve_radial: tangential eigenvalue left the cone");
        const double lr = radial_eigen_root(n, k, l, lt);
        switch (geom) {
            case GeometryTag::euclidean_hessian: return lr;
            case GeometryTag::hyperbolic_hessian: return lr + u;
            case GeometryTag::graph_curvature: {
                const double w = std::sqrt(1.0 + phi * phi);
                return lr * w * w * w;
            }
        }
        return 0.0;
    }

    void rk4(double& r, double& u, double& phi, double h) const {
        const double k1u = phi, k1p = acc(r, u, phi);
        const double k2u = phi + 0.5 * h * k1p, k2p = acc(r + 0.5 * h, u + 0.5 * h * k1u, phi + 0.5 * h * k1p);
        const double k3u = phi + 0.5 * h * k2p, k3p = acc(r + 0.5 * h, u + 0.5 * h * k2u, phi + 0.5 * h * k2p);
        const double k4u = phi + h * k3p, k4p = acc(r + h, u + h * k3u, phi + h * k3p);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        r += h;
    }
};

struct ShotResult {
    double R = 0.0;
    double u_at_R = 0.0;
    double phi_at_R = 0.0;
};

/// Integrate from the centre with u(0) = a until u' reaches the Neumann
/// target c; the crossing radius is refined by Newton sub-steps.
inline ShotResult shoot(const RadialOde& ode, double a, double c, double h, double r_cap = 20.0) {
    const double ddu0 = ode.geom == GeometryTag::hyperbolic_hessian ? 1.0 + a : 1.0;
    if (!(ddu0 > 0.0)) throw std::domain_error("solve_radial: centre value incompatible with the cone");
    double r = h;
    double u = a + 0.5 * ddu0 * h * h;
    double phi = ddu0 * h;
    while (phi < c) {
        if (r > r_cap) throw std::domain_error("solve_radial: Neumann target unreachable");
        ode.rk4(r, u, phi, h);
    }
    // Newton refinement of the crossing: phi is strictly increasing here.
    for (int it = 0; it < 8; ++it) {
        const double delta = (c - phi) / ode.acc(r, u, phi);
        if (std::abs(delta) < 1e-15 * std::max(1.0, r)) break;
        ode.rk4(r, u, phi, delta);
    }
    return {r, u, phi};
}

}  // namespace detail

/// Solve the radial overdetermined problem: integrate outward from r = 0
/// with u'(0) = 0 solving the scalar quotient equation for u'' at every
/// step, stop where u'(R) = c, and normalise u(R) = 0. The Euclidean and
/// graph operators ignore additive shifts of u, so the normalisation is a
/// plain shift; the hyperbolic operator sees u itself, so the centre value
/// is found by an outer bisection/secant iteration.
inline RadialProfile solve_radial(GeometryTag geom, int n, int k, int l, double c,
                                  double step = 1e-4) {
    if (!(0 <= l && l < k && k <= n)) throw std::invalid_argument("solve_radial: need 0 <= l < k <= n");
    if (!(c > 0.0)) throw std::invalid_argument("solve_radial: Neumann constant must be positive");
    if (geom == GeometryTag::hyperbolic_hessian && c >= 1.0)
        throw std::domain_error("solve_radial: hyperbolic Neumann target unreachable, need c < 1");

    const detail::RadialOde ode{geom, n, k, l};

    double a = 0.0;  // u(0) before normalisation
    if (geom == GeometryTag::hyperbolic_hessian) {
        // Outer solve for the centre value: mismatch(a) = u(R(a)).
        auto mismatch = [&](double trial) { return detail::shoot(ode, trial, c, step).u_at_R; };
        double hi = 0.0, lo = -0.1;
        double m_hi = mismatch(hi);
        double m_lo = mismatch(lo);
        while (m_lo > 0.0 && lo > -0.999) {
            lo = std::max(-0.999, lo - 0.1);
            m_lo = mismatch(lo);
        }
        if (m_lo > 0.0) throw std::domain_error("solve_radial: hyperbolic shooting failed to bracket");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double m_mid = mismatch(mid);
            (m_mid > 0.0 ? hi : lo) = mid;
            if (hi - lo < 1e-14) break;
        }
        a = 0.5 * (lo + hi);
        (void)m_hi;
    }

    const detail::ShotResult shot = detail::shoot(ode, a, c, step);

    // Second pass on a uniform grid landing exactly on R.
    const int nsteps = std::max(8, static_cast<int>(std::ceil(shot.R / step)));
    const double h = shot.R / nsteps;
    RadialProfile p;
    p.geometry = geom;
    p.n = n;
    p.R = shot.R;
    p.r.reserve(static_cast<std::size_t>(nsteps) + 1);
    p.u.reserve(p.r.capacity());
    p.du.reserve(p.r.capacity());
    p.ddu.reserve(p.r.capacity());

    const double ddu0 = geom == GeometryTag::hyperbolic_hessian ? 1.0 + a : 1.0;
    double r = h, u = a + 0.5 * ddu0 * h * h, phi = ddu0 * h;
    p.r.push_back(0.0);
    p.u.push_back(a);
    p.du.push_back(0.0);
    p.ddu.push_back(ddu0);
    p.r.push_back(r);
    p.u.push_back(u);
    p.du.push_back(phi);
    p.ddu.push_back(ode.acc(r, u, phi));
    for (int i = 1; i < nsteps; ++i) {
        ode.rk4(r, u, phi, h);
        p.r.push_back(h * (i + 1));
        p.u.push_back(u);
        p.du.push_back(phi);
        p.ddu.push_back(ode.acc(r, u, phi));
    }
    p.neumann = phi;

    if (geom != GeometryTag::hyperbolic_hessian) {
        const double shiftv = p.u.back();
        for (auto& v : p.u) v -= shiftv;
    }

    // Admissibility along the profile.
    for (std::size_t i = 1; i < p.r.size(); ++i) {
        if (cone_index(radial_spectrum(p, p.r[i])) < k)
            throw std::domain_error("solve_radial: profile left Gamma_k");
    }
    return p;
}

/// The paper's closed-form rigidity solutions, sampled on a uniform grid:
/// Euclidean (|x|^2 - 1)/2 on the unit ball (c = 1), hyperbolic
/// cosh r / cosh R - 1 with c = tanh R, graph -sqrt(1 - |x|^2) + sqrt(1 - R^2)
/// with c = R / sqrt(1 - R^2).
inline RadialProfile explicit_profile(GeometryTag geom, int n, double c, double step = 1e-4) {
    RadialProfile p;
    p.geometry = geom;
    p.n = n;
    std::function<double(double)> fu, fdu, fddu;
    switch (geom) {
        case GeometryTag::euclidean_hessian:
            if (c <= 0.0) throw std::invalid_argument("explicit_profile: need c > 0");
            p.R = c;  // u = (r^2 - R^2)/2 has u'(R) = R = c
            fu = [R = p.R](double r) { return 0.5 * (r * r - R * R); };
            fdu = [](double r) { return r; };
            fddu = [](double) { return 1.0; };
            break;
        case GeometryTag::hyperbolic_hessian: {
            if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("explicit_profile: need 0 < c < 1");
            p.R = std::atanh(c);
            const double ch = std::cosh(p.R);
            fu = [ch](double r) { return std::cosh(r) / ch - 1.0; };
            fdu = [ch](double r) { return std::sinh(r) / ch; };
            fddu = [ch](double r) { return std::cosh(r) / ch; };
            break;
        }
        case GeometryTag::graph_curvature: {
            if (c <= 0.0) throw std::invalid_argument("explicit_profile: need c > 0");
            p.R = c / std::sqrt(1.0 + c * c);
            const double shift = std::sqrt(1.0 - p.R * p.R);
            fu = [shift](double r) { return -std::sqrt(1.0 - r * r) + shift; };
            fdu = [](double r) { return r / std::sqrt(1.0 - r * r); };
            fddu = [](double r) { return std::pow(1.0 - r * r, -1.5); };
            break;
        }
    }
    const int nsteps = std::max(8, static_cast<int>(std::ceil(p.R / step)));
    const double h = p.R / nsteps;
    for (int i = 0; i <= nsteps; ++i) {
        const double r = h * i;
        p.r.push_back(r);
        p.u.push_back(fu(r));
        p.du.push_back(fdu(r));
        p.ddu.push_back(fddu(r));
    }
    p.neumann = fdu(p.R);
    return p;
}

inline double default_neumann(GeometryTag geom) {
    return geom == GeometryTag::hyperbolic_hessian ? 0.5 : 1.0;
}

/// Substitute the explicit solution into the operator on a dense radial
/// sample and report the worst equation residual, boundary data and
/// P-function deviation from constancy.
struct ExplicitReport {
    GeometryTag geometry = GeometryTag::euclidean_hessian;
    int n = 0, k = 0, l = 0;
    double c = 0.0, R = 0.0;
    double max_eq_residual = 0.0;      // |S_k - q S_l|, absolute
    double max_eq_rel_residual = 0.0;  // scaled by C_n^k
    double boundary_value = 0.0;       // u(R)
    double neumann_error = 0.0;        // |u'(R) - c|
    double p_value = 0.0;              // P at the boundary
    double p_deviation = 0.0;          // max |P - P(R)| over the sample
    bool admissible = true;
};

inline ExplicitReport verify_explicit(GeometryTag geom, int n, int k, int l, double c = -1.0) {
    if (c <= 0.0) c = default_neumann(geom);
    const RadialProfile p = explicit_profile(geom, n, c);
    ExplicitReport rep;
    rep.geometry = geom;
    rep.n = n;
    rep.k = k;
    rep.l = l;
    rep.c = c;
    rep.R = p.R;
    const double q = binomial(n, k) / binomial(n, l);
    const PKind kind = kind_for(geom);
    const double p_boundary = evaluate_p(kind, p.u.back(), p.du.back() * p.du.back());
    rep.p_value = p_boundary;
    for (std::size_t i = 0; i < p.samples(); ++i) {
        const Spectrum spec = radial_spectrum(p, p.r[i]);
        const SymFunVector s = elem_sym_all(spec);
        const double res = std::abs(s.at(k) - q * s.at(l));
        rep.max_eq_residual = std::max(rep.max_eq_residual, res);
        if (cone_index(s) < k) rep.admissible = false;
        const double pv = evaluate_p(kind, p.u[i], p.du[i] * p.du[i]);
        rep.p_deviation = std::max(rep.p_deviation, std::abs(pv - p_boundary));
    }
    rep.max_eq_rel_residual = rep.max_eq_residual / binomial(n, k);
    rep.boundary_value = p.u.back();
    rep.neumann_error = std::abs(p.du.back() - c);
    return rep;
}

/// F^{ij} P_{ij} for a radial profile at sample index i: the radial Hessian
/// of P(r) pairs the second derivative with the radial diagonal entry of F
/// and P' times the geometry's tangential factor with the rest. P itself is
/// assembled from the samples and differentiated by central differences.
inline double elliptic_on_p(const RadialProfile& p, int k, int l, std::size_t i) {
    if (i < 1 || i + 1 >= p.samples())
        throw std::domain_error("elliptic_on_p: index without central stencil support");
    const Spectrum spec = radial_spectrum(p, p.r[i]);
    if (cone_index(spec) < k)
        throw std::domain_error("elliptic_on_p: radial spectrum is not k-admissible");
    const PKind kind = kind_for(p.geometry);
    const double h = p.step();
    auto pv = [&](std::size_t j) { return evaluate_p(kind, p.u[j], p.du[j] * p.du[j]); };
    const double dp = (pv(i + 1) - pv(i - 1)) / (2.0 * h);
    const double ddp = (pv(i + 1) - 2.0 * pv(i) + pv(i - 1)) / (h * h);

    std::vector<double> lam(spec.values());
    const LinearizedOperator fij = fij_matrix(k, l, SquareMatrix::diagonal(lam));
    const double r = p.r[i];
    double tang_factor = 0.0;
    switch (p.geometry) {
        case GeometryTag::euclidean_hessian:
        case GeometryTag::graph_curvature:
            tang_factor = dp / r;
            break;
        case GeometryTag::hyperbolic_hessian:
            tang_factor = dp / std::tanh(r);
            break;
    }
    double acc = fij.f(0, 0) * ddp;
    for (int t = 1; t < p.n; ++t) acc += fij.f(t, t) * tang_factor;
    return acc;
}

/// Smallest F^{ij} P_{ij} along the profile (subsolution sign check).
inline double min_fijpij(const RadialProfile& p, int k, int l, std::size_t stride = 1) {
    double best = 1e300;
    for (std::size_t i = 1; i + 1 < p.samples(); i += stride)
        best = std::min(best, elliptic_on_p(p, k, l, i));
    return best;
}

/// Extremum scan of the P-function along the radial profile; the boundary
/// sample is r = R.
inline ExtremumReport extremum_scan(const RadialProfile& p, int k, int l,
                                    double equation_gate = 1e-4, std::size_t fij_stride = 10) {
    const PKind kind = kind_for(p.geometry);
    std::vector<ScanSample> samples;
    samples.reserve(p.samples());
    const double q = binomial(p.n, k) / binomial(p.n, l);
    double max_res = 0.0;
    for (std::size_t i = 0; i < p.samples(); ++i) {
        ScanSample s;
        s.location = Vec3{p.r[i], 0.0, 0.0};
        s.p = evaluate_p(kind, p.u[i], p.du[i] * p.du[i]);
        s.boundary = (i + 1 == p.samples());
        samples.push_back(s);
        const SymFunVector sv = elem_sym_all(radial_spectrum(p, p.r[i]));
        const double scale = std::max({std::abs(sv.at(k)), std::abs(q * sv.at(l)), 1e-300});
        max_res = std::max(max_res, std::abs(sv.at(k) - q * sv.at(l)) / scale);
    }
    ExtremumReport rep = scan_samples(samples);
    rep.kind = kind;
    rep.geometry = p.geometry;
    rep.k = k;
    rep.l = l;
    rep.max_equation_rel_residual = max_res;
    rep.equation_satisfied = max_res <= equation_gate;
    rep.min_fijpij = min_fijpij(p, k, l, fij_stride);
    rep.has_fijpij = true;
    return rep;
}

/// CSV export: r, u, u', u'', radial and tangential eigenvalues.
inline void write_profile_csv(const RadialProfile& p, std::ostream& os) {
    os.precision(17);
    os << "r,u,du,ddu,lambda_radial,lambda_tangential\n";
    for (std::size_t i = 0; i < p.samples(); ++i) {
        const Spectrum s = radial_spectrum(p, p.r[i]);
        os << p.r[i] << "," << p.u[i] << "," << p.du[i] << "," << p.ddu[i] << "," << s[0] << ","
           << (p.n > 1 ? s[1] : s[0]) << "\n";
    }
}

inline void write_profile_csv(const RadialProfile& p, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_profile_csv: cannot open " + path);
    write_profile_csv(p, os);
}

}  // namespace hq
