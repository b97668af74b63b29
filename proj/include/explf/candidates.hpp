#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "archimedean.hpp"
#include "kinfty.hpp"

namespace explf {

inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int k = 10; k <= 120; ++k) grid.push_back(k / 10.0);
    return grid;
}

// Gram matrix of B_infty on the filtration basis of weight <= w.
inline Eigen::MatrixXd basis_gram(const JTable& T, const std::vector<KElement>& basis) {
    const int r = static_cast<int>(basis.size());
    Eigen::MatrixXd G(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) G(i, j) = G(j, i) = T.b(basis[i], basis[j]);
    return G;
}

inline KElement from_coords(const std::vector<KElement>& basis, const std::vector<long>& x) {
    KElement v;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (x[i]) v += basis[i] * x[i];
    return v;
}

using KFilter = std::function<bool(const KElement&)>;

// The finiteness inequality B(V,V) <= Phi(0) + (dim V - 1) log p on every lambda
// of the grid, together with J_{F_log2}(V) <= (log p)/2.
class FinitenessFilter {
public:
    FinitenessFilter(int p, std::vector<double> grid, int max_weight) : logp_(p > 1 ? std::log(double(p)) : 0.0) {
        for (double l : grid) {
            tables_.push_back(&JCache::get(l, 2 * max_weight));
            phi0_.push_back(phi_cached(l, 0.0));
        }
        jlog2_ = &JCache::get(std::log(2.0), 2 * max_weight);
    }

    bool j_test(const KElement& v) const { return jlog2_->j(v) <= logp_ / 2; }

    bool b_test(const KElement& v) const {
        KElement sq = tensor(v, v);
        double rhs_base = (v.dim() - 1) * logp_;
        for (std::size_t i = 0; i < tables_.size(); ++i)
            if (tables_[i]->j(sq) > phi0_[i] + rhs_base) return false;
        return true;
    }

    bool operator()(const KElement& v) const { return b_test(v) && j_test(v); }

private:
    double logp_;
    std::vector<const JTable*> tables_;
    std::vector<double> phi0_;
    const JTable* jlog2_;
};

struct EnumerationOptions {
    // Test function used for the definite quadratic form; <= 0 selects, among the
    // grid values where B_infty is definite, the one with the smallest ellipsoid.
    double definiteness_lambda = 0.0;
    std::vector<double> search_grid = default_lambda_grid();
};

struct Ellipsoid {
    double lambda;
    Eigen::MatrixXd G;
    Eigen::VectorXd centre;
    double R2;
    double log_volume;
};

// Sublevel set {x : x^T G x - logp ell.x + logp - Phi(0) <= 0} as an ellipsoid,
// or nothing when G is not positive definite.
inline std::optional<Ellipsoid> sublevel_ellipsoid(int w, int conductor, double lambda) {
    const auto basis = filtration_basis(w);
    const int r = static_cast<int>(basis.size());
    Eigen::MatrixXd G = basis_gram(JCache::get(lambda, 2 * w), basis);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) <= 1e-10) return std::nullopt;
    const double logp = conductor > 1 ? std::log(double(conductor)) : 0.0;
    Eigen::VectorXd ell(r);
    for (int i = 0; i < r; ++i) ell(i) = static_cast<double>(basis[i].dim());
    Eigen::VectorXd c = G.llt().solve(ell * (logp / 2));
    double R2 = c.dot(G * c) + phi_cached(lambda, 0.0) - logp;
    double logvol = 0.5 * r * std::log(std::max(R2, 1e-300)) - 0.5 * es.eigenvalues().array().log().sum();
    return Ellipsoid{lambda, G, c, R2, logvol};
}

inline std::optional<Ellipsoid> choose_ellipsoid(int w, int conductor, const EnumerationOptions& opt) {
    if (opt.definiteness_lambda > 0) return sublevel_ellipsoid(w, conductor, opt.definiteness_lambda);
    std::optional<Ellipsoid> best;
    for (double l : opt.search_grid) {
        auto e = sublevel_ellipsoid(w, conductor, l);
        if (e && (!best || e->log_volume < best->log_volume)) best = e;
    }
    return best;
}

// All effective V in the weight <= w lattice with c_IND(w) >= 1, det trivial, that
// satisfy Q(V) = B(V,V) - (dim V - 1) log p - Phi(0) <= 0 for the enumeration test
// function and then pass `filter`.
inline std::vector<KElement> enumerate_candidates(int w, int conductor, const KFilter& filter,
                                                  EnumerationOptions opt = {}) {
    if (w < 1) throw std::invalid_argument("weight must be >= 1");
    const auto basis = filtration_basis(w);
    const int r = static_cast<int>(basis.size());
    auto ell = choose_ellipsoid(w, conductor, opt);
    if (!ell)
        throw std::runtime_error("B_infty is not positive definite on the weight <= " + std::to_string(w) +
                                 " lattice; finiteness not certified");
    const Eigen::VectorXd& c = ell->centre;
    const double R2 = ell->R2;
    std::vector<KElement> out;
    if (R2 < 0) return out;

    // Fincke-Pohst on the upper triangular factor, last coordinate first.
    Eigen::MatrixXd U = ell->G.llt().matrixU();
    std::vector<long> x(r, 0);
    const int top = r - 1;  // coordinate of IND(w) in the basis
    const double slack = 1e-9;
    std::function<void(int, double)> rec = [&](int i, double rem) {
        // partial residual from coordinates i+1..r-1
        double s = 0;
        for (int j = i + 1; j < r; ++j) s += U(i, j) * (x[j] - c(j));
        double uii = U(i, i);
        double half = std::sqrt(std::max(0.0, rem)) / uii;
        double centre = c(i) - s / uii;
        long lo = static_cast<long>(std::ceil(centre - half - slack));
        long hi = static_cast<long>(std::floor(centre + half + slack));
        lo = std::max(lo, i == top ? 1L : 0L);
        for (long v = lo; v <= hi; ++v) {
            x[i] = v;
            double t = uii * (v - c(i)) + s;
            double nrem = rem - t * t;
            if (nrem < -slack) continue;
            if (i == 0) {
                KElement e = from_coords(basis, x);
                if (e.det() == DetClass::TRIV && filter(e)) out.push_back(e);
            } else {
                rec(i - 1, nrem);
            }
        }
        x[i] = 0;
    };
    rec(top, R2);
    return out;
}

inline std::vector<KElement> enumerate_candidates(int w, int conductor, const std::vector<double>& grid) {
    FinitenessFilter f(conductor, grid, w);
    return enumerate_candidates(w, conductor, std::cref(f));
}

}  // namespace explf
