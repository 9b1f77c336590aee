#pragma once

// Elementary symmetric functions S_k of spectra and matrices, their
// derivative matrices S_k^{ij}, Garding-cone membership and the classical
// Newton/MacLaurin inequality chain.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace hq {

/// Exact binomial coefficient as a double (n small; every intermediate is an
/// integer representable in 53 bits for n <= 28).
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double num = 1.0;
    for (int i = 0; i < k; ++i) {
        num = num * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return std::round(num);
}

class Spectrum {
public:
    explicit Spectrum(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) throw std::invalid_argument("Spectrum: need n >= 1 eigenvalues");
        for (double v : values_) {
            if (!std::isfinite(v)) throw std::invalid_argument("Spectrum: non-finite eigenvalue");
        }
    }
    Spectrum(std::initializer_list<double> values) : Spectrum(std::vector<double>(values)) {}

    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

/// Dense n-by-n real matrix, row-major. The symmetry flag is a promise
/// checked at construction time: flagged matrices must be exactly symmetric.
class SquareMatrix {
public:
    explicit SquareMatrix(int n, bool symmetric = false)
        : n_(n), symmetric_(symmetric), a_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n < 1) throw std::invalid_argument("SquareMatrix: need n >= 1");
    }

    static SquareMatrix identity(int n) {
        SquareMatrix m(n, true);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static SquareMatrix diagonal(const std::vector<double>& d) {
        SquareMatrix m(static_cast<int>(d.size()), true);
        for (int i = 0; i < m.size(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    int size() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    bool symmetry_flag() const { return symmetric_; }

    /// Flag the matrix symmetric after checking the entries exactly.
    void declare_symmetric() {
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if ((*this)(i, j) != (*this)(j, i))
                    throw std::invalid_argument("SquareMatrix: symmetry flag on asymmetric entries");
        symmetric_ = true;
    }

    bool is_symmetric(double tol = 0.0) const {
        if (symmetric_) return true;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

    SquareMatrix transposed() const {
        SquareMatrix t(n_, symmetric_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    int n_;
    bool symmetric_;
    std::vector<double> a_;
};

/// S_0..S_n with the conventions S_0 = 1 and S_{-1} = 0 built into at().
struct SymFunVector {
    std::vector<double> s;  // s[k] = S_k, k = 0..n

    int order() const { return static_cast<int>(s.size()) - 1; }

    double at(int k) const {
        if (k == -1) return 0.0;
        if (k < -1 || k > order()) throw std::out_of_range("SymFunVector: index out of range");
        return s[static_cast<std::size_t>(k)];
    }
};

/// All elementary symmetric functions of the eigenvalues, by incremental
/// expansion of prod_i (1 + lambda_i t).
inline SymFunVector elem_sym_all(const Spectrum& spec) {
    const int n = spec.size();
    SymFunVector out;
    out.s.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.s[0] = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int j = std::min(i + 1, n); j >= 1; --j) {
            out.s[static_cast<std::size_t>(j)] += spec[i] * out.s[static_cast<std::size_t>(j) - 1];
        }
    }
    return out;
}

namespace detail {

/// Determinant by Gaussian elimination with partial pivoting; k <= 12 here.
inline double det_inplace(std::vector<double>& m, int k) {
    double det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r)
            if (std::abs(m[static_cast<std::size_t>(r) * k + c]) >
                std::abs(m[static_cast<std::size_t>(piv) * k + c]))
                piv = r;
        if (m[static_cast<std::size_t>(piv) * k + c] == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < k; ++j)
                std::swap(m[static_cast<std::size_t>(piv) * k + j],
                          m[static_cast<std::size_t>(c) * k + j]);
            det = -det;
        }
        const double p = m[static_cast<std::size_t>(c) * k + c];
        det *= p;
        for (int r = c + 1; r < k; ++r) {
            const double f = m[static_cast<std::size_t>(r) * k + c] / p;
            if (f == 0.0) continue;
            for (int j = c; j < k; ++j)
                m[static_cast<std::size_t>(r) * k + j] -= f * m[static_cast<std::size_t>(c) * k + j];
        }
    }
    return det;
}

/// Visit all size-k index subsets of {0..n-1}.
template <typename F>
void for_each_subset(int n, int k, F&& visit) {
    if (k == 0) return;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        visit(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j) - 1] + 1;
    }
}

}  // namespace detail

/// S_k(A) as the sum of all k-by-k principal minors. Exact structure for
/// general (possibly non-symmetric) matrices; no eigen-solver involved.
inline double sk_of_matrix(int k, const SquareMatrix& a) {
    const int n = a.size();
    if (k < 0 || k > n) throw std::out_of_range("sk_of_matrix: need 0 <= k <= n");
    if (k == 0) return 1.0;
    double sum = 0.0;
    std::vector<double> scratch(static_cast<std::size_t>(k) * k);
    detail::for_each_subset(n, k, [&](const std::vector<int>& idx) {
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < k; ++c)
                scratch[static_cast<std::size_t>(r) * k + c] =
                    a(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
        sum += detail::det_inplace(scratch, k);
    });
    return sum;
}

/// S_0..S_n of a matrix via principal minors.
inline SymFunVector sk_all_of_matrix(const SquareMatrix& a) {
    SymFunVector out;
    out.s.resize(static_cast<std::size_t>(a.size()) + 1);
    for (int k = 0; k <= a.size(); ++k) out.s[static_cast<std::size_t>(k)] = sk_of_matrix(k, a);
    return out;
}

/// dS_k/da_{ij} by the recursion S_k^{ij} = S_{k-1} d_{ij} - sum_l S_{k-1}^{il} a_{jl},
/// with S_1^{ij} = d_{ij}; the scalar S_m is accumulated from the trace pairing
/// m S_m = sum_{ij} S_m^{ij} a_{ij}, so the whole chain is self-contained.
/// Valid for non-symmetric matrices.
inline SquareMatrix sk_gradient(int k, const SquareMatrix& a) {
    const int n = a.size();
    if (k < 1 || k > n) throw std::out_of_range("sk_gradient: need 1 <= k <= n");
    SquareMatrix g = SquareMatrix::identity(n);  // S_1^{ij}
    for (int m = 2; m <= k; ++m) {
        double s_prev = 0.0;  // S_{m-1} from the trace identity
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s_prev += g(i, j) * a(i, j);
        s_prev /= static_cast<double>(m - 1);
        SquareMatrix next(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double acc = (i == j) ? s_prev : 0.0;
                for (int l = 0; l < n; ++l) acc -= g(i, l) * a(j, l);
                next(i, j) = acc;
            }
        }
        g = next;
    }
    return g;
}

/// Independent route to dS_k/da_{ij}: cofactors of every principal k-minor
/// containing rows/columns i and j. Used to cross-check the recursion.
inline SquareMatrix sk_gradient_minor(int k, const SquareMatrix& a) {
    const int n = a.size();
    if (k < 1 || k > n) throw std::out_of_range("sk_gradient_minor: need 1 <= k <= n");
    SquareMatrix g(n);
    if (k == 1) return SquareMatrix::identity(n);
    std::vector<double> scratch(static_cast<std::size_t>(k - 1) * (k - 1));
    detail::for_each_subset(n, k, [&](const std::vector<int>& idx) {
        for (int p = 0; p < k; ++p) {
            for (int q = 0; q < k; ++q) {
                // cofactor of entry (p,q) inside the principal submatrix A[idx]
                int r = 0;
                for (int rr = 0; rr < k; ++rr) {
                    if (rr == p) continue;
                    int c = 0;
                    for (int cc = 0; cc < k; ++cc) {
                        if (cc == q) continue;
                        scratch[static_cast<std::size_t>(r) * (k - 1) + c] =
                            a(idx[static_cast<std::size_t>(rr)], idx[static_cast<std::size_t>(cc)]);
                        ++c;
                    }
                    ++r;
                }
                const double cof = (((p + q) % 2 == 0) ? 1.0 : -1.0) * detail::det_inplace(scratch, k - 1);
                g(idx[static_cast<std::size_t>(p)], idx[static_cast<std::size_t>(q)]) += cof;
            }
        }
    });
    return g;
}

/// Largest k with S_1,...,S_k all positive (0 when S_1 <= 0): Gamma_k membership.
inline int cone_index(const SymFunVector& s) {
    int k = 0;
    while (k < s.order() && s.at(k + 1) > 0.0) ++k;
    return k;
}
inline int cone_index(const Spectrum& spec) { return cone_index(elem_sym_all(spec)); }
inline int cone_index(const SquareMatrix& a) { return cone_index(sk_all_of_matrix(a)); }

struct InequalityRecord {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool holds = false;
    bool precondition_ok = true;
};

struct InequalityReport {
    int n = 0, k = 0, l = 0;
    int cone = 0;  // measured cone index of the input
    std::vector<InequalityRecord> records;

    bool all_hold() const {
        for (const auto& r : records)
            if (r.precondition_ok && !r.holds) return false;
        return true;
    }
};

namespace detail {

inline InequalityRecord make_record(std::string name, double lhs, double rhs, bool pre_ok) {
    InequalityRecord r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    const double tol = 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    r.holds = pre_ok && r.slack >= -tol;
    r.precondition_ok = pre_ok;
    return r;
}

/// Normalized symmetric mean S_m / C(n,m).
inline double sigma(const SymFunVector& s, int n, int m) { return s.at(m) / binomial(n, m); }

}  // namespace detail

/// Evaluate the Newton inequalities and the MacLaurin quotient chain for a
/// spectrum already reduced to its S-vector. Quotient-type inequalities
/// require Gamma_k membership; when that fails they are reported with
/// precondition_ok = false instead of throwing.
inline InequalityReport inequality_report(const SymFunVector& s, int k, int l) {
    const int n = s.order();
    if (!(0 <= l && l < k && k <= n)) throw std::invalid_argument("inequality_report: need 0 <= l < k <= n");
    InequalityReport rep;
    rep.n = n;
    rep.k = k;
    rep.l = l;
    rep.cone = cone_index(s);
    const bool in_gamma_k = rep.cone >= k;

    // Newton: (n-m+1)(m+1) S_{m-1} S_{m+1} <= m(n-m) S_m^2, valid for all real spectra.
    for (int m = 1; m <= n - 1; ++m) {
        const double lhs = (n - m + 1) * (m + 1) * s.at(m - 1) * s.at(m + 1);
        const double rhs = m * (n - m) * s.at(m) * s.at(m);
        rep.records.push_back(detail::make_record("newton_" + std::to_string(m), lhs, rhs, true));
    }

    // gNMieq: (sigma_k/sigma_l)^{1/(k-l)} <= (sigma_r/sigma_s)^{1/(r-s)}
    // over all r > s >= 0 with r <= k, s <= l.
    const double q_kl = in_gamma_k
                            ? std::pow(detail::sigma(s, n, k) / detail::sigma(s, n, l), 1.0 / (k - l))
                            : 0.0;
    for (int r = 1; r <= k; ++r) {
        for (int si = 0; si <= std::min(l, r - 1); ++si) {
            if (r == k && si == l) continue;
            double rhs = 0.0;
            if (in_gamma_k)
                rhs = std::pow(detail::sigma(s, n, r) / detail::sigma(s, n, si), 1.0 / (r - si));
            rep.records.push_back(detail::make_record(
                "gnm_" + std::to_string(r) + "_" + std::to_string(si), q_kl, rhs, in_gamma_k));
        }
    }

    // MacLaurin: sigma_k^{1/k} <= sigma_l^{1/l} (l >= 1).
    if (l >= 1) {
        const double lhs = in_gamma_k ? std::pow(detail::sigma(s, n, k), 1.0 / k) : 0.0;
        const double rhs = in_gamma_k ? std::pow(detail::sigma(s, n, l), 1.0 / l) : 0.0;
        rep.records.push_back(detail::make_record("maclaurin", lhs, rhs, in_gamma_k));
    }

    // NMieq: sigma_k/sigma_{k-1} <= sigma_l/sigma_{l-1} (l >= 1).
    if (l >= 1) {
        const double lhs =
            in_gamma_k ? detail::sigma(s, n, k) / detail::sigma(s, n, k - 1) : 0.0;
        const double rhs =
            in_gamma_k ? detail::sigma(s, n, l) / detail::sigma(s, n, l - 1) : 0.0;
        rep.records.push_back(detail::make_record("nm_quotient", lhs, rhs, in_gamma_k));
    }

    // gNMieq1: sigma_{k+1}/sigma_k <= (sigma_k/sigma_l)^{1/(k-l)} (k < n).
    if (k < n) {
        const double lhs =
            in_gamma_k ? detail::sigma(s, n, k + 1) / detail::sigma(s, n, k) : 0.0;
        rep.records.push_back(detail::make_record("gnm_top", lhs, q_kl, in_gamma_k));
    }

    return rep;
}

inline InequalityReport inequality_report(const Spectrum& spec, int k, int l) {
    return inequality_report(elem_sym_all(spec), k, l);
}
inline InequalityReport inequality_report(const SquareMatrix& a, int k, int l) {
    return inequality_report(sk_all_of_matrix(a), k, l);
}

/// Max-abs residuals of the exact algebraic identities tying S_k, its
/// gradient and the matrix together. All of them vanish identically; the
/// returned numbers are pure rounding noise scaled by ||A||^k.
struct IdentityResiduals {
    int n = 0, k = 0;
    double trace_pairing = 0.0;    // sum S_k^{ij} a_{ij} - k S_k
    double trace_rows = 0.0;       // sum_i S_k^{ii} - (n-k+1) S_{k-1}
    double commute_general = 0.0;  // S_k^{il} a_{jl} - S_k^{lj} a_{li}, all i,j
    double commute_hessian = 0.0;  // symmetric-A form S_k^{ij} a_{il} - S_k^{il} a_{ij}
    double gradient_vs_minors = 0.0;
    double scale = 1.0;  // ||A||_F^k, the natural magnitude of the terms

    double worst() const {
        return std::max({trace_pairing, trace_rows, commute_general, commute_hessian,
                         gradient_vs_minors});
    }
    bool within(double rel_tol) const { return worst() <= rel_tol * scale; }
};

inline IdentityResiduals algebraic_identity_residuals(const SquareMatrix& a, int k) {
    const int n = a.size();
    if (k < 1 || k > n) throw std::out_of_range("algebraic_identity_residuals: need 1 <= k <= n");
    IdentityResiduals out;
    out.n = n;
    out.k = k;
    out.scale = std::pow(std::max(1.0, a.frobenius_norm()), k);

    const SquareMatrix g = sk_gradient(k, a);
    const double sk = sk_of_matrix(k, a);
    const double sk1 = sk_of_matrix(k - 1, a);

    double pair = 0.0, rows = 0.0;
    for (int i = 0; i < n; ++i) {
        rows += g(i, i);
        for (int j = 0; j < n; ++j) pair += g(i, j) * a(i, j);
    }
    out.trace_pairing = std::abs(pair - k * sk);
    out.trace_rows = std::abs(rows - (n - k + 1) * sk1);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double left = 0.0, right = 0.0;
            for (int l = 0; l < n; ++l) {
                left += g(i, l) * a(j, l);
                right += g(l, j) * a(l, i);
            }
            out.commute_general = std::max(out.commute_general, std::abs(left - right));
        }
    }

    if (a.is_symmetric(0.0)) {
        // S_k^{ij} u_{il} = S_k^{il} u_{ij}: with G symmetric this is GA = AG.
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
                double left = 0.0, right = 0.0;
                for (int i = 0; i < n; ++i) {
                    left += g(i, j) * a(i, l);
                    right += g(i, l) * a(i, j);
                }
                out.commute_hessian = std::max(out.commute_hessian, std::abs(left - right));
            }
        }
    }

    const SquareMatrix gm = sk_gradient_minor(k, a);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.gradient_vs_minors = std::max(out.gradient_vs_minors, std::abs(g(i, j) - gm(i, j)));

    return out;
}

}  // namespace hq
