#pragma once

#include <array>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "kinfty.hpp"
#include "test_function.hpp"

namespace explf {

inline constexpr double kTaylorCut = 1e-4;

// Four-term expansion at y = 0 of the integrand of I(a, a'), with b = a/2 + a'.
inline std::array<double, 4> i_taylor_coeffs(double L, double a, double b) {
    constexpr double pi = std::numbers::pi, pi2 = pi * pi;
    double a2 = a * a, a3 = a2 * a, a4 = a2 * a2, b2 = b * b, b3 = b2 * b, b4 = b2 * b2;
    double L2 = L * L, L3 = L2 * L, L4 = L2 * L2;
    double c0 = 1.5 - b;
    double c1 = -a2 / 8 + b2 / 2 - b / 2 - 5.0 / 12 - pi2 * a2 / (2 * L2);
    double c2 = (L3 * (6 * a2 * b - 3 * a2 - 8 * b3 + 12 * b2 - 4 * b + 8) + 12 * pi2 * L * a2 * (2 * b - 1) +
                 16 * pi2 * a3) / (48 * L3);
    double c3 = (L4 * (75 * a4 - 360 * a2 * b2 + 360 * a2 * b - 60 * a2 + 240 * b4 - 480 * b3 + 240 * b2 - 248) +
                 120 * pi2 * L2 * a2 * (3 * a2 - 12 * b2 + 12 * b - 2) + 960 * pi2 * L * a3 * (1 - 2 * b) +
                 240 * pi2 * pi2 * a4) / (5760 * L4);
    return {c0, c1, c2, c3};
}

inline double i_integrand_taylor(double L, double a, double b, double y) {
    auto c = i_taylor_coeffs(L, a, b);
    return c[0] + y * (c[1] + y * (c[2] + y * c[3]));
}

inline double i_integrand(const Odlyzko& F, double a, double b, double y) {
    if (y < kTaylorCut) return i_integrand_taylor(F.lambda, a, b, y);
    return F(a * y) * std::exp(-b * y) / (-std::expm1(-y)) - std::exp(-y) / y;
}

// I(a,a') = int_0^inf [F(ay) e^{-(a/2+a')y}/(1-e^{-y}) - F(0) e^{-y}/y] dy.
inline double i_integral(const Odlyzko& F, double a, double a_prime) {
    double b = a / 2 + a_prime;
    if (!(a > 0) || !(b > 0)) throw std::invalid_argument("i_integral requires a > 0 and a/2 + a' > 0");
    double top = F.lambda / a;
    auto h = [&](double y) { return i_integrand(F, a, b, y); };
    double cut = std::min(kTaylorCut, top);
    auto c = i_taylor_coeffs(F.lambda, a, b);
    double head = cut * (c[0] + cut * (c[1] / 2 + cut * (c[2] / 3 + cut * c[3] / 4)));
    double body = top > cut ? integrate(h, cut, top) : 0.0;
    return head + body - boost::math::expint(1, top);
}

// Contribution of a factor Gamma(a s + a') to the explicit formula: the digamma
// integral picks up the scaling a, so it is a * I(a, a').
inline double gamma_term(const Odlyzko& F, double a, double a_prime) { return a * i_integral(F, a, a_prime); }

// J on the basis, tabulated for one test function.
class JTable {
public:
    explicit JTable(const Odlyzko& F, int max_weight = 0) : F_(F) {
        double lp = 0.5 * std::log(std::numbers::pi);
        triv_ = lp + gamma_term(F_, 0.5, 0.0);
        eps_ = lp + gamma_term(F_, 0.5, 0.5);
        ensure(max_weight);
    }

    const Odlyzko& function() const { return F_; }
    double lambda() const { return F_.lambda; }
    double j_triv() const { return triv_; }
    double j_eps() const { return eps_; }
    double j_ind(int w) const {
        if (w == 0) return triv_ + eps_;
        if (w >= static_cast<int>(ind_.size())) throw std::out_of_range("JTable weight not tabulated");
        return ind_[w];
    }

    void ensure(int max_weight) {
        double l2p = std::log(2 * std::numbers::pi);
        if (ind_.empty()) ind_.push_back(0.0);
        while (static_cast<int>(ind_.size()) <= max_weight) {
            int w = static_cast<int>(ind_.size());
            ind_.push_back(l2p + gamma_term(F_, 1.0, w / 2.0));
        }
    }
    int max_weight() const { return static_cast<int>(ind_.size()) - 1; }

    double j(const KElement& v) const {
        double s = v.c_triv() * triv_ + v.c_eps() * eps_;
        for (auto& [w, c] : v.inds()) s += c * j_ind(w);
        return s;
    }

    // B(U,V) = J(U^dual tensor V); duality is trivial on K_infty.
    double b(const KElement& u, const KElement& v) const { return j(tensor(dual(u), v)); }

private:
    Odlyzko F_;
    double triv_ = 0, eps_ = 0;
    std::vector<double> ind_;
};

// Process-wide memo of J tables keyed by lambda.
class JCache {
public:
    static const JTable& get(double lambda, int max_weight) {
        static std::mutex m;
        static std::map<double, std::unique_ptr<JTable>> cache;
        std::lock_guard lk(m);
        auto& slot = cache[lambda];
        if (!slot) slot = std::make_unique<JTable>(Odlyzko(lambda), max_weight);
        else if (slot->max_weight() < max_weight) slot->ensure(max_weight);
        return *slot;
    }
};

inline double j_functional(const Odlyzko& F, const KElement& v) {
    int mw = 2 * std::max(1, v.motivic_weight());
    return JCache::get(F.lambda, mw).j(v);
}

inline double b_infinity(const Odlyzko& F, const KElement& u, const KElement& v) {
    return j_functional(F, tensor(dual(u), v));
}

// Fourth roots of unity as exponents of i.
struct RootOfUnity4 {
    int k = 0;  // value i^k
    int value_real() const { return k % 2 ? 0 : (k % 4 == 0 ? 1 : -1); }
    bool is_real() const { return k % 2 == 0; }
    friend bool operator==(RootOfUnity4 a, RootOfUnity4 b) { return a.k % 4 == b.k % 4; }
    std::complex<double> value() const {
        static const std::complex<double> v[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return v[k % 4];
    }
};

inline RootOfUnity4 eps_infinity(const KElement& v) {
    if (!v.effective()) throw std::invalid_argument("eps_infinity requires an effective element");
    long k = v.c_eps();
    for (auto& [w, c] : v.inds()) k += c * (w + 1);
    return RootOfUnity4{static_cast<int>(((k % 4) + 4) % 4)};
}

}  // namespace explf
