#pragma once

// Damped-Newton finite-difference solver for the 2d Dirichlet problem
//   S_k(D^2 u) = (C_2^k / C_2^l) S_l(D^2 u) in Omega,  u = 0 on the boundary,
// on star-shaped domains in a polar-mapped grid, plus boundary-gradient
// statistics and the rigidity scan over domain families.
//
// The radial grid is staggered half a cell off the origin, so the stencil
// value across the centre is the sample on the antipodal ray: no excision
// or extrapolation at the coordinate singularity.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessquot/fields.hpp"
#include "hessquot/integral.hpp"
#include "hessquot/pfunc.hpp"
#include "hessquot/symfunc.hpp"

namespace hq {

namespace detail {

struct Sym2 {
    double xx = 0.0, xy = 0.0, yy = 0.0;
};

/// One entry of a locally Cartesian Hessian stencil.
struct CartWeight {
    std::size_t node = 0;
    Sym2 w;
};

}  // namespace detail

/// Polar-mapped grid on a 2d star domain: s_i = (i + 1/2) ds with the last
/// node exactly on the boundary, theta uniform and periodic (even count).
/// Carries the per-node linear maps from the five (s,theta) derivatives to
/// the Cartesian Hessian. The polar chain rule amplifies rounding noise by
/// 1/r^2 near the origin, so the innermost rings instead carry a locally
/// Cartesian Hessian stencil from a least-squares cubic fit over a
/// physical-ball neighbourhood (exact on quadratics, O(h^2) consistent).
class MappedGrid {
public:
    static constexpr int kCartesianRings = 3;

    MappedGrid(const StarDomain& dom, int resolution) : dom_(dom) {
        if (dom.d != 2) throw std::invalid_argument("MappedGrid: 2d star domains only");
        if (resolution < 64) throw std::invalid_argument("MappedGrid: resolution must be >= 64");
        ns_ = resolution;
        nt_ = resolution - (resolution % 2);
        ds_ = 2.0 / (2.0 * ns_ - 1.0);
        dt_ = 2.0 * M_PI / nt_;

        const std::size_t total = static_cast<std::size_t>(ns_) * nt_;
        hd_.resize(total);
        brows_.resize(total);
        xy_.resize(total);
        for (int i = 0; i < ns_; ++i)
            for (int j = 0; j < nt_; ++j) precompute(i, j);
        build_cartesian_stencils();
    }

    int ns() const { return ns_; }
    int ntheta() const { return nt_; }
    double ds() const { return ds_; }
    double dtheta() const { return dt_; }
    double s_of(int i) const { return (i + 0.5) * ds_; }
    double theta_of(int j) const { return j * dt_; }
    const StarDomain& domain() const { return dom_; }

    std::size_t node(int i, int j) const { return static_cast<std::size_t>(i) * nt_ + j; }
    int opposite(int j) const { return (j + nt_ / 2) % nt_; }

    Vec3 location(int i, int j) const { return xy_[node(i, j)]; }

    /// Contribution matrices of (u_s, u_t, u_ss, u_st, u_tt) to the
    /// Cartesian Hessian at the node.
    const std::array<detail::Sym2, 5>& hessian_maps(int i, int j) const { return hd_[node(i, j)]; }

    /// Rows of the inverse Jacobian: Du = u_s * grad(s) + u_t * grad(theta).
    const std::array<double, 4>& inverse_jacobian(int i, int j) const { return brows_[node(i, j)]; }

    bool uses_cartesian_stencil(int i) const { return i < kCartesianRings; }

    const std::vector<detail::CartWeight>& cartesian_stencil(int i, int j) const {
        return cart_[node(i, j)];
    }

private:
    void build_cartesian_stencils() {
        cart_.resize(static_cast<std::size_t>(kCartesianRings) * nt_);
        double rho_max = 0.0;
        for (int j = 0; j < nt_; ++j) rho_max = std::max(rho_max, dom_.rho(theta_of(j)));
        const double h_loc = ds_ * rho_max;
        const double ball = 3.4 * h_loc;
        const int ring_cap = std::min(ns_ - 2, kCartesianRings + 6);

        for (int i = 0; i < kCartesianRings; ++i) {
            for (int j = 0; j < nt_; ++j) {
                const Vec3 xp = xy_[node(i, j)];
                std::vector<std::size_t> nbr;
                for (int ii = 0; ii <= ring_cap; ++ii) {
                    for (int jj = 0; jj < nt_; ++jj) {
                        const Vec3 xq = xy_[node(ii, jj)];
                        const double dx = xq[0] - xp[0], dy = xq[1] - xp[1];
                        if (dx * dx + dy * dy <= ball * ball) nbr.push_back(node(ii, jj));
                    }
                }
                // cubic fit in scaled local coordinates; rows 3..5 of the
                // pseudo-inverse give the Hessian entries
                const int kbasis = 10;
                Eigen::MatrixXd A(static_cast<int>(nbr.size()), kbasis);
                for (int q = 0; q < static_cast<int>(nbr.size()); ++q) {
                    const Vec3 xq = xy_[nbr[static_cast<std::size_t>(q)]];
                    const double dx = (xq[0] - xp[0]) / h_loc, dy = (xq[1] - xp[1]) / h_loc;
                    A(q, 0) = 1.0;
                    A(q, 1) = dx;
                    A(q, 2) = dy;
                    A(q, 3) = 0.5 * dx * dx;
                    A(q, 4) = dx * dy;
                    A(q, 5) = 0.5 * dy * dy;
                    A(q, 6) = dx * dx * dx;
                    A(q, 7) = dx * dx * dy;
                    A(q, 8) = dx * dy * dy;
                    A(q, 9) = dy * dy * dy;
                }
                const Eigen::MatrixXd pinv =
                    (A.transpose() * A).ldlt().solve(A.transpose());  // kbasis x K
                auto& st = cart_[node(i, j)];
                st.clear();
                st.reserve(nbr.size());
                const double inv_h2 = 1.0 / (h_loc * h_loc);
                for (int q = 0; q < static_cast<int>(nbr.size()); ++q) {
                    detail::CartWeight cw;
                    cw.node = nbr[static_cast<std::size_t>(q)];
                    cw.w.xx = pinv(3, q) * inv_h2;
                    cw.w.xy = pinv(4, q) * inv_h2;
                    cw.w.yy = pinv(5, q) * inv_h2;
                    st.push_back(cw);
                }
            }
        }
    }

    void precompute(int i, int j) {
        const double s = s_of(i), t = theta_of(j);
        const double rho = dom_.rho(t), dr = dom_.drho(t), ddr = dom_.ddrho(t);
        if (!(rho > 0.0)) throw std::invalid_argument("MappedGrid: degenerate rho");
        const double c = std::cos(t), sn = std::sin(t);
        xy_[node(i, j)] = Vec3{s * rho * c, s * rho * sn, 0.0};

        // J = [x_s x_t; y_s y_t], det = s rho^2
        const double xs = rho * c, ys = rho * sn;
        const double xt = s * (dr * c - rho * sn), yt = s * (dr * sn + rho * c);
        const double det = xs * yt - xt * ys;
        // B = J^{-1}; row p of B is grad(xi_p)
        const double bsx = yt / det, bsy = -xt / det;
        const double btx = -ys / det, bty = xs / det;
        brows_[node(i, j)] = {bsx, bsy, btx, bty};

        // Hessians of the map components in (s, theta)
        const double x_st = dr * c - rho * sn, y_st = dr * sn + rho * c;
        const double x_tt = s * (ddr * c - 2.0 * dr * sn - rho * c);
        const double y_tt = s * (ddr * sn + 2.0 * dr * c - rho * sn);

        auto congruence = [&](double e_ss, double e_st, double e_tt) {
            // B^T E B for symmetric E in (s,theta) coordinates
            detail::Sym2 m;
            m.xx = bsx * (e_ss * bsx + e_st * btx) + btx * (e_st * bsx + e_tt * btx);
            m.xy = bsx * (e_ss * bsy + e_st * bty) + btx * (e_st * bsy + e_tt * bty);
            m.yy = bsy * (e_ss * bsy + e_st * bty) + bty * (e_st * bsy + e_tt * bty);
            return m;
        };

        auto& maps = hd_[node(i, j)];
        // first-derivative terms: C_pq -= g_m (map_m)_pq with g = B^T (u_s, u_t)
        maps[0] = congruence(-(bsx * 0.0 + bsy * 0.0), -(bsx * x_st + bsy * y_st),
                             -(bsx * x_tt + bsy * y_tt));
        maps[1] = congruence(-(btx * 0.0 + bty * 0.0), -(btx * x_st + bty * y_st),
                             -(btx * x_tt + bty * y_tt));
        maps[2] = congruence(1.0, 0.0, 0.0);  // u_ss
        maps[3] = congruence(0.0, 1.0, 0.0);  // u_st (appears once, E symmetric)
        maps[4] = congruence(0.0, 0.0, 1.0);  // u_tt
    }

    StarDomain dom_;
    int ns_ = 0, nt_ = 0;
    double ds_ = 0.0, dt_ = 0.0;
    std::vector<std::array<detail::Sym2, 5>> hd_;
    std::vector<std::array<double, 4>> brows_;
    std::vector<Vec3> xy_;
    std::vector<std::vector<detail::CartWeight>> cart_;
};

struct SolveResult {
    int k = 0, l = 0;
    int resolution = 0;
    bool converged = false;
    int iterations = 0;
    double residual_norm = 0.0;
    bool admissible = false;
    double min_s1 = 0.0, min_s2 = 0.0;
    double max_u_interior = 0.0;
    std::vector<double> u;              // full grid, boundary row included (zeros)
    std::vector<double> boundary_grad;  // |Du| at the boundary nodes
    std::shared_ptr<MappedGrid> grid;
};

namespace detail {

/// Five derivative values of the grid function at an interior node, with
/// the cross-centre reflection for i = -1 and the zero boundary row.
class StencilEval {
public:
    StencilEval(const MappedGrid& g, const std::vector<double>& u) : g_(g), u_(u) {}

    double value(int i, int j) const {
        if (i == g_.ns() - 1) return 0.0;  // boundary row (u = 0) for reads beyond unknowns
        if (i < 0) return u_[g_.node(0, g_.opposite((j % g_.ntheta() + g_.ntheta()) % g_.ntheta()))];
        return u_[g_.node(i, (j % g_.ntheta() + g_.ntheta()) % g_.ntheta())];
    }

    std::array<double, 5> derivatives(int i, int j) const {
        const double ds = g_.ds(), dt = g_.dtheta();
        const double um = value(i - 1, j), up = value(i + 1, j), u0 = value(i, j);
        const double vl = value(i, j - 1), vr = value(i, j + 1);
        const double pp = value(i + 1, j + 1), pm = value(i + 1, j - 1);
        const double mp = value(i - 1, j + 1), mm = value(i - 1, j - 1);
        return {(up - um) / (2.0 * ds), (vr - vl) / (2.0 * dt), (up - 2.0 * u0 + um) / (ds * ds),
                (pp - pm - mp + mm) / (4.0 * ds * dt), (vr - 2.0 * u0 + vl) / (dt * dt)};
    }

    Sym2 hessian(int i, int j) const {
        const auto d = derivatives(i, j);
        const auto& maps = g_.hessian_maps(i, j);
        Sym2 h;
        for (int m = 0; m < 5; ++m) {
            h.xx += maps[static_cast<std::size_t>(m)].xx * d[static_cast<std::size_t>(m)];
            h.xy += maps[static_cast<std::size_t>(m)].xy * d[static_cast<std::size_t>(m)];
            h.yy += maps[static_cast<std::size_t>(m)].yy * d[static_cast<std::size_t>(m)];
        }
        return h;
    }

private:
    const MappedGrid& g_;
    const std::vector<double>& u_;
};

struct StateScan {
    double residual_norm = 0.0;
    double min_s1 = 1e300, min_s2 = 1e300;
    bool admissible = true;
};

inline StateScan scan_state(const MappedGrid& g, const std::vector<double>& u, int k, int l,
                            std::vector<double>* residual_out = nullptr) {
    const double q = binomial(2, k) / binomial(2, l);
    StencilEval ev(g, u);
    StateScan out;
    if (residual_out) residual_out->assign(static_cast<std::size_t>(g.ns() - 1) * g.ntheta(), 0.0);
    for (int i = 0; i < g.ns() - 1; ++i) {
        for (int j = 0; j < g.ntheta(); ++j) {
            const Sym2 h = ev.hessian(i, j);
            const double s1 = h.xx + h.yy;
            const double s2 = h.xx * h.yy - h.xy * h.xy;
            out.min_s1 = std::min(out.min_s1, s1);
            out.min_s2 = std::min(out.min_s2, s2);
            const double sk = k == 1 ? s1 : s2;
            const double sl = l == 0 ? 1.0 : s1;
            const double res = sk - q * sl;
            out.residual_norm = std::max(out.residual_norm, std::abs(res));
            if (residual_out) (*residual_out)[g.node(i, j)] = res;
        }
    }
    out.admissible = out.min_s1 > 0.0 && (k < 2 || out.min_s2 > 0.0);
    return out;
}

}  // namespace detail

/// Solve the 2d Hessian-quotient Dirichlet problem on a star domain.
/// (k,l) in {(1,0), (2,0), (2,1)}; the initial guess is the paraboloid
/// alpha (s^2 - 1); step halving keeps the iterates k-admissible.
inline SolveResult solve_dirichlet(const StarDomain& dom, int k, int l, int resolution = 129,
                                   double tol = 1e-9, int max_iters = 50, double alpha0 = 0.5) {
    if (!((k == 1 && l == 0) || (k == 2 && l == 0) || (k == 2 && l == 1)))
        throw std::invalid_argument("solve_dirichlet: (k,l) must be (1,0), (2,0) or (2,1)");
    auto grid = std::make_shared<MappedGrid>(dom, resolution);
    const MappedGrid& g = *grid;
    const int nu = (g.ns() - 1) * g.ntheta();  // unknowns: all rows but the boundary
    const double q = binomial(2, k) / binomial(2, l);

    std::vector<double> u(static_cast<std::size_t>(g.ns()) * g.ntheta(), 0.0);
    for (int i = 0; i < g.ns() - 1; ++i)
        for (int j = 0; j < g.ntheta(); ++j) {
            const double s = g.s_of(i);
            u[g.node(i, j)] = alpha0 * (s * s - 1.0);
        }

    SolveResult out;
    out.k = k;
    out.l = l;
    out.resolution = resolution;
    out.grid = grid;

    std::vector<double> residual;
    detail::StateScan state = detail::scan_state(g, u, k, l, &residual);
    if (!state.admissible)
        throw std::domain_error("solve_dirichlet: initial guess is not k-admissible, adjust alpha");

    Eigen::SparseMatrix<double> jac(nu, nu);
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs(nu), delta(nu);

    int iter = 0;
    for (; iter < max_iters && state.residual_norm > tol; ++iter) {
        // assemble the Jacobian of the nodal residuals
        trips.clear();
        detail::StencilEval ev(g, u);
        for (int i = 0; i < g.ns() - 1; ++i) {
            for (int j = 0; j < g.ntheta(); ++j) {
                const detail::Sym2 h = ev.hessian(i, j);
                // dF/dH with F = S_k - q S_l; symmetric off-diagonal lumped
                detail::Sym2 m;
                if (k == 1) {
                    m = {1.0, 0.0, 1.0};
                } else {
                    m = {h.yy, -2.0 * h.xy, h.xx};
                }
                if (l == 1) {
                    m.xx -= q;
                    m.yy -= q;
                }
                const auto& maps = g.hessian_maps(i, j);
                const double ds = g.ds(), dt = g.dtheta();
                // weight of each derivative in dF/d(derivative)
                std::array<double, 5> dw{};
                for (int d = 0; d < 5; ++d) {
                    const auto& mm = maps[static_cast<std::size_t>(d)];
                    dw[static_cast<std::size_t>(d)] = m.xx * mm.xx + m.xy * mm.xy + m.yy * mm.yy;
                }
                auto add = [&](int di, int dj, double coef) {
                    if (coef == 0.0) return;
                    int ii = i + di;
                    int jj = (j + dj % g.ntheta() + g.ntheta()) % g.ntheta();
                    if (ii == g.ns() - 1) return;  // boundary value, not an unknown
                    if (ii < 0) {
                        ii = 0;
                        jj = g.opposite(jj);
                    }
                    trips.emplace_back(static_cast<int>(g.node(i, j)), static_cast<int>(g.node(ii, jj)),
                                       coef);
                };
                add(+1, 0, dw[0] / (2.0 * ds) + dw[2] / (ds * ds));
                add(-1, 0, -dw[0] / (2.0 * ds) + dw[2] / (ds * ds));
                add(0, +1, dw[1] / (2.0 * dt) + dw[4] / (dt * dt));
                add(0, -1, -dw[1] / (2.0 * dt) + dw[4] / (dt * dt));
                add(0, 0, -2.0 * dw[2] / (ds * ds) - 2.0 * dw[4] / (dt * dt));
                const double cross = dw[3] / (4.0 * ds * dt);
                add(+1, +1, cross);
                add(-1, -1, cross);
                add(+1, -1, -cross);
                add(-1, +1, -cross);
                rhs[static_cast<int>(g.node(i, j))] = -residual[g.node(i, j)];
            }
        }
        jac.setFromTriplets(trips.begin(), trips.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(jac);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("solve_dirichlet: singular Newton system");
        delta = lu.solve(rhs);

        // damped update: halve on residual increase or admissibility loss
        double step = 1.0;
        bool accepted = false;
        std::vector<double> trial(u.size());
        for (; step >= 1.0 / (1 << 20); step *= 0.5) {
            trial = u;
            for (int i = 0; i < g.ns() - 1; ++i)
                for (int j = 0; j < g.ntheta(); ++j)
                    trial[g.node(i, j)] += step * delta[static_cast<int>(g.node(i, j))];
            std::vector<double> trial_res;
            const detail::StateScan trial_state = detail::scan_state(g, trial, k, l, &trial_res);
            if (trial_state.admissible && trial_state.residual_norm < state.residual_norm) {
                u.swap(trial);
                residual.swap(trial_res);
                state = trial_state;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // stalled; reported through converged = false
    }

    out.iterations = iter;
    out.residual_norm = state.residual_norm;
    out.converged = state.residual_norm <= tol;
    out.admissible = state.admissible;
    out.min_s1 = state.min_s1;
    out.min_s2 = state.min_s2;
    out.u = u;

    double max_u = -1e300;
    for (int i = 0; i < g.ns() - 1; ++i)
        for (int j = 0; j < g.ntheta(); ++j) max_u = std::max(max_u, u[g.node(i, j)]);
    out.max_u_interior = max_u;

    // |Du| on the boundary by second-order one-sided differences in s;
    // u vanishes along the boundary so the tangential derivative is zero.
    out.boundary_grad.resize(static_cast<std::size_t>(g.ntheta()));
    for (int j = 0; j < g.ntheta(); ++j) {
        const double us = (3.0 * 0.0 - 4.0 * u[g.node(g.ns() - 2, j)] + u[g.node(g.ns() - 3, j)]) /
                          (2.0 * g.ds());
        const auto& b = g.inverse_jacobian(g.ns() - 1, j);
        out.boundary_grad[static_cast<std::size_t>(j)] =
            std::abs(us) * std::sqrt(b[0] * b[0] + b[1] * b[1]);
    }
    return out;
}

struct GradientStats {
    double mean = 0.0, stddev = 0.0, min = 0.0, max = 0.0;
};

inline GradientStats boundary_gradient_stats(const SolveResult& res) {
    if (res.boundary_grad.empty()) throw std::invalid_argument("boundary_gradient_stats: empty result");
    GradientStats st;
    st.min = 1e300;
    st.max = -1e300;
    for (double v : res.boundary_grad) {
        st.mean += v;
        st.min = std::min(st.min, v);
        st.max = std::max(st.max, v);
    }
    st.mean /= static_cast<double>(res.boundary_grad.size());
    for (double v : res.boundary_grad) st.stddev += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(st.stddev / static_cast<double>(res.boundary_grad.size()));
    return st;
}

/// P = |Du|^2 - 2u extremum scan over the mapped grid of a solve result;
/// boundary nodes carry the one-sided gradient.
inline ExtremumReport extremum_scan(const SolveResult& res, double equation_gate = 1e-4) {
    const MappedGrid& g = *res.grid;
    detail::StencilEval ev(g, res.u);
    std::vector<ScanSample> samples;
    double min_fp = 1e300;
    bool any_fp = false;

    // P on the full grid first; its Hessian reuses the same mapped stencils
    std::vector<double> pgrid(res.u.size(), 0.0);
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.ntheta(); ++j) {
            double gx, gy;
            if (i == g.ns() - 1) {
                const double us =
                    (3.0 * 0.0 - 4.0 * res.u[g.node(g.ns() - 2, j)] + res.u[g.node(g.ns() - 3, j)]) /
                    (2.0 * g.ds());
                const auto& b = g.inverse_jacobian(i, j);
                gx = us * b[0];
                gy = us * b[1];
            } else {
                const auto d = ev.derivatives(i, j);
                const auto& b = g.inverse_jacobian(i, j);
                gx = d[0] * b[0] + d[1] * b[2];
                gy = d[0] * b[1] + d[1] * b[3];
            }
            const double uval = i == g.ns() - 1 ? 0.0 : res.u[g.node(i, j)];
            pgrid[g.node(i, j)] = gx * gx + gy * gy - 2.0 * uval;
        }
    }

    detail::StencilEval pev(g, pgrid);
    for (int i = 0; i < g.ns(); ++i) {
        for (int j = 0; j < g.ntheta(); ++j) {
            ScanSample s;
            s.location = g.location(i, j);
            s.boundary = (i == g.ns() - 1);
            s.p = pgrid[g.node(i, j)];
            samples.push_back(s);
            if (i >= 1 && i < g.ns() - 2) {
                const detail::Sym2 h = ev.hessian(i, j);
                SquareMatrix a(2, true);
                a(0, 0) = h.xx;
                a(0, 1) = h.xy;
                a(1, 0) = h.xy;
                a(1, 1) = h.yy;
                if (cone_index(a) >= res.k) {
                    const detail::Sym2 hp = pev.hessian(i, j);
                    const LinearizedOperator fij = fij_matrix(res.k, res.l, a);
                    const double v = fij.f(0, 0) * hp.xx + (fij.f(0, 1) + fij.f(1, 0)) * hp.xy +
                                     fij.f(1, 1) * hp.yy;
                    min_fp = std::min(min_fp, v);
                    any_fp = true;
                }
            }
        }
    }

    ExtremumReport rep = scan_samples(samples);
    rep.kind = PKind::euclid;
    rep.geometry = GeometryTag::euclidean_hessian;
    rep.k = res.k;
    rep.l = res.l;
    rep.max_equation_rel_residual = res.residual_norm;
    rep.equation_satisfied = res.residual_norm <= equation_gate;
    if (any_fp) {
        rep.min_fijpij = min_fp;
        rep.has_fijpij = true;
    }
    return rep;
}

/// Resample the mapped solution onto a box grid fully inside the domain
/// (ScalarField csv format of the fields module). Bilinear in (s, theta).
inline ScalarField resample_to_field(const SolveResult& res, double half_width, int count) {
    const MappedGrid& g = *res.grid;
    auto value_at = [&](Vec3 x) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
        double theta = std::atan2(x[1], x[0]);
        if (theta < 0.0) theta += 2.0 * M_PI;
        const double s = r / g.domain().rho(theta);
        if (s > 1.0 + 1e-12)
            throw std::domain_error("resample_to_field: box leaves the solved domain");
        const double fi = std::min(std::max(s / g.ds() - 0.5, 0.0), g.ns() - 1.000001);
        const int i0 = static_cast<int>(std::floor(fi));
        const double ti = fi - i0;
        const double fj = theta / g.dtheta();
        const int j0 = static_cast<int>(std::floor(fj)) % g.ntheta();
        const double tj = fj - std::floor(fj);
        auto u_at = [&](int i, int j) {
            if (i >= g.ns() - 1) return 0.0;
            return res.u[g.node(i, j % g.ntheta())];
        };
        return (1 - ti) * (1 - tj) * u_at(i0, j0) + ti * (1 - tj) * u_at(i0 + 1, j0) +
               (1 - ti) * tj * u_at(i0, j0 + 1) + ti * tj * u_at(i0 + 1, j0 + 1);
    };
    return ScalarField::sample(2, count, {-half_width, -half_width, 0.0},
                               {half_width, half_width, 0.0}, value_at);
}

enum class ScanFamily { cosine, ellipse };

struct ScanRow {
    double epsilon = 0.0;
    int mode = 0;
    int k = 0, l = 0;
    int resolution = 0;
    int newton_iters = -1;
    double residual = 0.0;
    double mean_grad = 0.0;
    double std_grad = 0.0;
    bool ok = false;
};

/// Solve across a family of perturbed domains and tabulate the boundary
/// gradient statistics: the computational face of the rigidity theorem.
/// Failed rows are recorded (newton_iters = -1) and the scan continues.
inline std::vector<ScanRow> rigidity_scan(ScanFamily family, const std::vector<double>& eps_values,
                                          int mode, int k, int l, int resolution = 129) {
    std::vector<ScanRow> table;
    for (double eps : eps_values) {
        ScanRow row;
        row.epsilon = eps;
        row.mode = family == ScanFamily::cosine ? mode : 0;
        row.k = k;
        row.l = l;
        row.resolution = resolution;
        try {
            const StarDomain dom = family == ScanFamily::cosine
                                       ? StarDomain::perturbed(eps, mode)
                                       : StarDomain::ellipse(1.0 + eps, 1.0);
            const SolveResult res = solve_dirichlet(dom, k, l, resolution);
            if (!res.converged) throw std::runtime_error("no convergence");
            const GradientStats st = boundary_gradient_stats(res);
            row.newton_iters = res.iterations;
            row.residual = res.residual_norm;
            row.mean_grad = st.mean;
            row.std_grad = st.stddev;
            row.ok = true;
        } catch (const std::exception&) {
            row.newton_iters = -1;
            row.ok = false;
        }
        table.push_back(row);
    }
    return table;
}

inline void write_scan_csv(const std::vector<ScanRow>& table, std::ostream& os) {
    os.precision(17);
    os << "epsilon,mode,k,l,resolution,newton_iters,residual,mean_grad,std_grad\n";
    for (const auto& r : table) {
        os << r.epsilon << "," << r.mode << "," << r.k << "," << r.l << "," << r.resolution << ","
           << r.newton_iters << "," << r.residual << "," << r.mean_grad << "," << r.std_grad << "\n";
    }
}

inline void write_scan_csv(const std::vector<ScanRow>& table, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_scan_csv: cannot open " + path);
    write_scan_csv(table, os);
}

}  // namespace hq
