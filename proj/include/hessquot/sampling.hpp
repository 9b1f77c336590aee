#pragma once

// Seeded random matrices and Gamma_k spectra. std::mt19937_64 is bit-exact
// across platforms; the distributions below avoid the library-defined
// std::*_distribution so identical seeds give identical streams everywhere.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "hessquot/symfunc.hpp"

namespace hq {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0,1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (polar-free variant, deterministic).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// General matrix with entries uniform in [-1,1].
inline SquareMatrix random_matrix(Rng& rng, int n) {
    SquareMatrix a(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    return a;
}

inline SquareMatrix random_symmetric(Rng& rng, int n) {
    SquareMatrix a(n, true);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = rng.uniform(-1.0, 1.0);
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

/// Spectrum in Gamma_k by rejection on N(0.5, 1) eigenvalue draws. For
/// k = n the proposal is the spectrum of B B^T + eps I, which always lands
/// in Gamma_n, keeping the rejection loop short for the tightest cone.
inline Spectrum random_gamma_spectrum(Rng& rng, int n, int k, int max_tries = 100000) {
    if (k < 1 || k > n) throw std::invalid_argument("random_gamma_spectrum: need 1 <= k <= n");
    for (int t = 0; t < max_tries; ++t) {
        std::vector<double> lam(static_cast<std::size_t>(n));
        if (k == n) {
            for (auto& v : lam) {
                const double b = rng.normal();
                v = b * b + 0.01;
            }
        } else {
            for (auto& v : lam) v = 0.5 + rng.normal();
        }
        Spectrum s(lam);
        if (cone_index(s) >= k) return s;
    }
    throw std::runtime_error("random_gamma_spectrum: rejection cap hit");
}

/// Random Householder-based orthogonal conjugation Q diag(lam) Q^T; gives a
/// dense symmetric matrix with a prescribed spectrum.
inline SquareMatrix conjugate_by_random_orthogonal(Rng& rng, const Spectrum& lam) {
    const int n = lam.size();
    // Build Q as a product of n random Householder reflections applied to I.
    std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i) * n + i] = 1.0;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int rep = 0; rep < n; ++rep) {
        double norm2 = 0.0;
        for (auto& vi : v) {
            vi = rng.normal();
            norm2 += vi * vi;
        }
        if (norm2 < 1e-12) continue;
        for (int col = 0; col < n; ++col) {
            double dot = 0.0;
            for (int r = 0; r < n; ++r) dot += v[static_cast<std::size_t>(r)] * q[static_cast<std::size_t>(r) * n + col];
            const double f = 2.0 * dot / norm2;
            for (int r = 0; r < n; ++r) q[static_cast<std::size_t>(r) * n + col] -= f * v[static_cast<std::size_t>(r)];
        }
    }
    SquareMatrix a(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int r = 0; r < n; ++r)
                acc += q[static_cast<std::size_t>(i) * n + r] * lam[r] * q[static_cast<std::size_t>(j) * n + r];
            a(i, j) = acc;
        }
    }
    // Symmetrize exactly; rounding in the products breaks bitwise symmetry.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double m = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = m;
            a(j, i) = m;
        }
    a.declare_symmetric();
    return a;
}

/// Symmetric matrix whose Hessian-like spectrum lies in Gamma_k.
inline SquareMatrix random_gamma_matrix(Rng& rng, int n, int k) {
    return conjugate_by_random_orthogonal(rng, random_gamma_spectrum(rng, n, k));
}

}  // namespace hq
