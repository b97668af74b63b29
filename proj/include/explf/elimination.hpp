#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "archimedean.hpp"
#include "registry.hpp"

namespace explf {

enum class Form { Co, C, Cs };

inline std::string to_string(Form f) { return f == Form::Co ? "Co" : f == Form::C ? "C" : "Cs"; }
inline Form parse_form(const std::string& s) {
    if (s == "Co" || s == "co" || s == "C0" || s == "c0") return Form::Co;
    if (s == "C" || s == "c") return Form::C;
    if (s == "Cs" || s == "cs") return Form::Cs;
    throw std::invalid_argument("unknown form '" + s + "'");
}

struct Slot {
    RepRecord record;
    int averaged_multiplicity = 1;  // r distinct representations sharing the record's data
    bool dual_pair = false;         // (pi + pi^dual)/2 for a non-self-dual pi

    double delta() const { return dual_pair ? 0.5 : 1.0 / averaged_multiplicity; }
};

struct GramMatrix {
    Form form;
    double lambda;
    Eigen::MatrixXd entries;
};

struct FormConstants {
    double phi0;
    double half_phi_half;
    const JTable* table;
    Odlyzko F;

    explicit FormConstants(double lambda, int max_weight)
        : phi0(phi_cached(lambda, 0.0)),
          half_phi_half(0.5 * phi_cached(lambda, 0.5)),
          table(&JCache::get(lambda, 2 * std::max(1, max_weight))),
          F(lambda) {}
};

inline void check_slots_for_cs(const std::vector<Slot>& slots) {
    bool has_dual = false;
    int ramified = 0;
    for (auto& s : slots) {
        if (s.record.conductor == 1) continue;
        ++ramified;
        if (s.dual_pair) has_dual = true;
        else if (!s.record.local_sign)
            throw std::invalid_argument("form Cs needs the local sign of slot " + s.record.name);
    }
    if (has_dual && ramified > 1)
        throw std::invalid_argument("form Cs: a dual-pair slot cannot be crossed with other ramified slots");
}

inline double gram_entry(Form form, const Slot& x, const Slot& y, bool diagonal, const FormConstants& k) {
    double v = diagonal ? k.phi0 * x.delta() : 0.0;
    for (int p : common_ramified_primes(x.record, y.record))
        v += 0.5 * std::log(double(p)) * pair_exponent(x.record, y.record, p);
    v -= k.table->b(x.record.arch, y.record.arch);
    if (form == Form::Co) return v;
    bool plain = !x.dual_pair && !y.dual_pair;
    if (plain) v -= k.half_phi_half * e_perp(x.record, y.record);
    if (form == Form::Cs) {
        if (plain) v -= b2_calc(k.F, x.record, y.record);
        else if (diagonal) v -= b2_calc_dual_pair_bound(k.F, x.record.conductor);
    }
    return v;
}

inline int max_weight_of(const std::vector<Slot>& slots) {
    int w = 1;
    for (auto& s : slots) w = std::max(w, s.record.arch.motivic_weight());
    return w;
}

inline GramMatrix gram(Form form, const std::vector<Slot>& slots, const Odlyzko& F) {
    if (form == Form::Cs) check_slots_for_cs(slots);
    FormConstants k(F.lambda, max_weight_of(slots));
    const int n = static_cast<int>(slots.size());
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) G(i, j) = G(j, i) = gram_entry(form, slots[i], slots[j], i == j, k);
    return {form, F.lambda, G};
}

struct Witness {
    std::vector<int> support;
    Eigen::VectorXd t;
    double value;
};

inline constexpr double kNegativeThreshold = -1e-9;

struct WitnessOptions {
    int max_support = -1;  // -1: no limit
    int required = -1;     // index that must carry positive weight
    bool fallback = true;
};

namespace detail {

inline void consider_face(const Eigen::MatrixXd& G, const std::vector<int>& S, const WitnessOptions& opt,
                          std::optional<Witness>& best, double threshold = kNegativeThreshold) {
    const int m = static_cast<int>(S.size());
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) sub(a, b) = G(S[a], S[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    for (int e = 0; e < m; ++e) {
        if (es.eigenvalues()(e) >= threshold) break;
        Eigen::VectorXd v = es.eigenvectors().col(e);
        if (v.sum() < 0) v = -v;
        if (v.minCoeff() < -1e-12) continue;
        v = v.cwiseMax(0.0);
        if (v.norm() == 0) continue;
        v /= v.norm();
        Eigen::VectorXd t = Eigen::VectorXd::Zero(G.rows());
        for (int a = 0; a < m; ++a) t(S[a]) = v(a);
        double val = t.dot(G * t);
        if (opt.required >= 0 && t(opt.required) <= 0) {
            // a small weight on the required index keeps the value negative
            if (val >= threshold) continue;
            Eigen::VectorXd u = t;
            double d = 1.0;
            for (int k = 0; k < 60; ++k, d *= 0.5) {
                u = t;
                u(opt.required) = d;
                u /= u.norm();
                if (u.dot(G * u) < threshold) break;
            }
            if (u.dot(G * u) >= threshold) continue;
            t = u;
            val = t.dot(G * t);
        }
        if (val < threshold && (!best || val < best->value)) {
            std::vector<int> supp;
            for (int a = 0; a < m; ++a)
                if (t(S[a]) > 0) supp.push_back(S[a]);
            best = Witness{supp, t, val};
        }
    }
}

inline std::optional<Witness> projected_descent(const Eigen::MatrixXd& G, const WitnessOptions& opt) {
    const int n = static_cast<int>(G.rows());
    Eigen::VectorXd t = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
    double step = 0.5 / std::max(1.0, G.cwiseAbs().rowwise().sum().maxCoeff());
    for (int it = 0; it < 5000; ++it) {
        Eigen::VectorXd next = (t - step * 2 * (G * t)).cwiseMax(0.0);
        double nn = next.norm();
        if (nn == 0) break;
        next /= nn;
        if ((next - t).norm() < 1e-13) { t = next; break; }
        t = next;
    }
    double val = t.dot(G * t);
    if (val >= kNegativeThreshold) return std::nullopt;
    if (opt.required >= 0 && t(opt.required) <= 0) return std::nullopt;
    std::vector<int> supp;
    for (int i = 0; i < n; ++i)
        if (t(i) > 0) supp.push_back(i);
    if (opt.max_support >= 0 && static_cast<int>(supp.size()) > opt.max_support) return std::nullopt;
    return Witness{supp, t, val};
}

}  // namespace detail

namespace detail {

inline std::optional<Witness> search_faces(const Eigen::MatrixXd& G, const WitnessOptions& opt, double threshold) {
    const int n = static_cast<int>(G.rows());
    std::optional<Witness> best;
    if (n == 0) return best;
    int kmax = opt.max_support < 0 ? n : std::min(n, opt.max_support);
    std::vector<int> others;
    for (int i = 0; i < n; ++i)
        if (i != opt.required) others.push_back(i);
    // subsets of `others` of size <= kmax (minus one when an index is required)
    int extra = opt.required >= 0 ? kmax - 1 : kmax;
    std::vector<int> S;
    std::function<void(int)> rec = [&](int start) {
        if (!S.empty() || opt.required >= 0) {
            std::vector<int> face = S;
            if (opt.required >= 0) face.insert(face.begin(), opt.required);
            consider_face(G, face, opt, best, threshold);
        }
        if (static_cast<int>(S.size()) == extra) return;
        for (int i = start; i < static_cast<int>(others.size()); ++i) {
            S.push_back(others[i]);
            rec(i + 1);
            S.pop_back();
        }
    };
    rec(0);
    return best;
}

}  // namespace detail

// Nonnegative unit vector t with t^T G t < -1e-9, searched face by face.
inline std::optional<Witness> find_negative_witness(const Eigen::MatrixXd& G, WitnessOptions opt = {}) {
    auto best = detail::search_faces(G, opt, kNegativeThreshold);
    if (!best && opt.fallback && G.rows() > 0) best = detail::projected_descent(G, opt);
    if (best) {
        double check = best->t.dot(G * best->t);
        if (!(check < kNegativeThreshold) || best->t.minCoeff() < 0) return std::nullopt;
        best->value = check;
    }
    return best;
}

// Face vector of smallest value, negative or not.
inline std::optional<Witness> find_closest_face(const Eigen::MatrixXd& G, WitnessOptions opt = {}) {
    auto best = detail::search_faces(G, opt, std::numeric_limits<double>::infinity());
    if (best) best->value = best->t.dot(G * best->t);
    return best;
}

inline std::optional<Witness> find_negative_witness(const GramMatrix& G, WitnessOptions opt = {}) {
    return find_negative_witness(G.entries, opt);
}

// A non-self-dual pi under Cs, crossed together with its dual. The prime-p terms
// involving pi depend on z = psi(p), known only to lie on the unit circle:
// B(pi,pi) = Theta(1), B(pi,pi^dual) = Theta(z^2), B(pi,sigma) = Theta(psi_sigma z).
// A witness must be negative for every z.
struct DualPairForm {
    Eigen::MatrixXd base;     // all terms except the prime-p terms involving pi or its dual
    int pi = -1, dual = -1;
    std::vector<int> signs;   // psi(p) of ramified self-dual slots, 0 elsewhere
    std::vector<std::string> names;
    std::vector<PrimeWeight> pw;
    double theta1 = 0;
    double slope = 0;         // sum of k |w_k|, bounds |d Theta(e^{i u}) / du|

    double theta_at(cplx z) const {
        cplx acc = 0;
        for (auto [k, w] : pw) acc += w * std::pow(z, k);
        return acc.real();
    }

    Eigen::MatrixXd at(cplx z) const {
        Eigen::MatrixXd G = base;
        G(pi, pi) -= theta1;
        G(dual, dual) -= theta1;
        G(pi, dual) -= theta_at(z * z);
        G(dual, pi) -= theta_at(z * z);
        for (int i = 0; i < static_cast<int>(signs.size()); ++i)
            if (signs[i]) {
                double v = theta_at(double(signs[i]) * z);
                for (int j : {pi, dual}) {
                    G(j, i) -= v;
                    G(i, j) -= v;
                }
            }
        return G;
    }

    // Upper bound for max_z t^T G(z) t: grid over the half circle (the coefficients are
    // real) plus the derivative margin. Stops early once the bound reaches `stop`.
    double sup_value(const Eigen::VectorXd& t, double stop = std::numeric_limits<double>::infinity(),
                     int grid = 360) const {
        const double a = t(pi), b = t(dual);
        const double q0 = t.dot(base * t) - theta1 * (a * a + b * b);
        double cross = 0;
        for (int i = 0; i < static_cast<int>(signs.size()); ++i)
            if (signs[i]) cross += std::fabs(t(i));
        const double h = std::numbers::pi / grid;
        const double margin = 0.5 * h * slope * (4 * std::fabs(a * b) + 2 * (std::fabs(a) + std::fabs(b)) * cross);
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j <= grid; ++j) {
            cplx z = std::polar(1.0, j * h);
            double v = q0 - 2 * a * b * theta_at(z * z);
            for (int i = 0; i < static_cast<int>(signs.size()); ++i)
                if (signs[i]) v -= 2 * (a + b) * t(i) * theta_at(double(signs[i]) * z);
            best = std::max(best, v + margin);
            if (best >= stop) return best;
        }
        return best;
    }
};

namespace detail {

// Faces containing pi; candidate vectors are the nonnegative eigenvectors of G(z)
// for a few z, each bounded over the whole circle.
inline std::optional<Witness> search_dual_pair(const DualPairForm& D, const WitnessOptions& opt, double threshold) {
    const int n = static_cast<int>(D.base.rows());
    std::vector<Eigen::MatrixXd> Gz;
    for (int j = 0; j <= 4; ++j) Gz.push_back(D.at(std::polar(1.0, j * std::numbers::pi / 4)));
    std::optional<Witness> best;
    std::vector<int> others;
    for (int i = 0; i < n; ++i)
        if (i != D.pi) others.push_back(i);
    int extra = (opt.max_support < 0 ? n : std::min(n, opt.max_support + 1)) - 1;
    std::vector<int> S;
    auto try_face = [&]() {
        std::vector<int> face = S;
        face.insert(face.begin(), D.pi);
        const int m = static_cast<int>(face.size());
        for (auto& G : Gz) {
            Eigen::MatrixXd sub(m, m);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) sub(a, b) = G(face[a], face[b]);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
            for (int e = 0; e < m; ++e) {
                if (es.eigenvalues()(e) >= threshold) break;
                Eigen::VectorXd v = es.eigenvectors().col(e);
                if (v.sum() < 0) v = -v;
                if (v.minCoeff() < -1e-12 || v(0) <= 0) continue;
                v = v.cwiseMax(0.0);
                v /= v.norm();
                Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
                for (int a = 0; a < m; ++a) t(face[a]) = v(a);
                double stop = best ? std::min(best->value, threshold) : threshold;
                double val = D.sup_value(t, stop);
                if (val < stop) {
                    std::vector<int> supp;
                    for (int a = 0; a < m; ++a)
                        if (v(a) > 0) supp.push_back(face[a]);
                    best = Witness{supp, t, val};
                }
            }
        }
    };
    std::function<void(int)> rec = [&](int start) {
        try_face();
        if (static_cast<int>(S.size()) == extra) return;
        for (int i = start; i < static_cast<int>(others.size()); ++i) {
            S.push_back(others[i]);
            rec(i + 1);
            S.pop_back();
        }
    };
    rec(0);
    return best;
}

}  // namespace detail

// The slot flagged dual_pair stands for pi; its dual is appended as a last slot.
inline DualPairForm dual_pair_form(const std::vector<Slot>& slots, const FormConstants& k) {
    DualPairForm D;
    std::vector<Slot> ext = slots;
    for (int i = 0; i < static_cast<int>(ext.size()); ++i)
        if (ext[i].dual_pair) {
            if (D.pi >= 0) throw std::invalid_argument("form Cs: at most one non-self-dual slot");
            D.pi = i;
        }
    if (D.pi < 0) throw std::invalid_argument("no dual-pair slot");
    Slot& x = ext[D.pi];
    x.dual_pair = false;
    x.averaged_multiplicity = 1;
    x.record.selfdual = Tri::no;
    x.record.local_sign = 0;
    Slot y = x;
    y.record.name = x.record.name + "^vee";
    ext.push_back(y);
    D.dual = static_cast<int>(ext.size()) - 1;
    const int p = x.record.conductor;
    if (prime_factors(p) != std::vector<int>{p}) throw std::invalid_argument("dual-pair slot needs a prime conductor");
    const int n = static_cast<int>(ext.size());
    D.base.resize(n, n);
    D.signs.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        D.names.push_back(ext[i].record.name);
        bool mine = i == D.pi || i == D.dual;
        if (!mine && ext[i].record.conductor == p) {
            if (ext[i].dual_pair || !ext[i].record.local_sign)
                throw std::invalid_argument("form Cs needs the local sign of slot " + ext[i].record.name);
            D.signs[i] = ext[i].record.local_sign;
        }
        for (int j = i; j < n; ++j) {
            bool touches = mine || j == D.pi || j == D.dual;
            D.base(i, j) = D.base(j, i) = gram_entry(touches ? Form::C : Form::Cs, ext[i], ext[j], i == j, k);
        }
    }
    D.pw = prime_weights(k.F, p);
    D.theta1 = D.theta_at(1.0);
    for (auto [kk, w] : D.pw) D.slope += kk * std::fabs(w);
    return D;
}

inline std::optional<Witness> find_dual_pair_witness(const DualPairForm& D, WitnessOptions opt = {}) {
    return detail::search_dual_pair(D, opt, kNegativeThreshold);
}

inline std::optional<Witness> closest_dual_pair_face(const DualPairForm& D, WitnessOptions opt = {}) {
    return detail::search_dual_pair(D, opt, std::numeric_limits<double>::infinity());
}

struct EliminationResult {
    bool eliminated = false;
    double lambda = 0;
    std::vector<std::string> support;
    std::vector<double> weights;
    double value = 0;
};

struct EliminationConfig {
    std::vector<double> lambda_grid;
    Form form = Form::C;
    int max_cross = 4;
    bool report_closest = false;  // for survivors, keep the face closest to negative
};

// Crossing of one putative slot with known records over a lambda grid; the first
// lambda carrying a witness wins. Survivors optionally carry the closest face found.
inline EliminationResult eliminate(const Slot& putative, const std::vector<RepRecord>& knowns,
                                   const EliminationConfig& cfg) {
    std::vector<Slot> slots{putative};
    for (auto& k : knowns) slots.push_back(Slot{k});
    const bool pair_route = cfg.form == Form::Cs && putative.dual_pair;
    if (cfg.form == Form::Cs && !pair_route) check_slots_for_cs(slots);
    int mw = max_weight_of(slots);
    EliminationResult res;
    for (double l : cfg.lambda_grid) {
        FormConstants k(l, mw);
        const int n = static_cast<int>(slots.size());
        WitnessOptions opt;
        opt.required = 0;
        opt.max_support = 1 + cfg.max_cross;
        std::optional<DualPairForm> D;
        Eigen::MatrixXd G(n, n);
        if (pair_route) {
            D = dual_pair_form(slots, k);
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j) G(i, j) = G(j, i) = gram_entry(cfg.form, slots[i], slots[j], i == j, k);
        }
        auto w = D ? find_dual_pair_witness(*D, opt) : find_negative_witness(G, opt);
        if (w) {
            res.eliminated = true;
            res.lambda = l;
            res.value = w->value;
            res.support.clear();
            res.weights.clear();
            for (int i : w->support) {
                res.support.push_back(D ? D->names[i] : slots[i].record.name);
                res.weights.push_back(w->t(i));
            }
            return res;
        }
        if (cfg.report_closest) {
            auto c = D ? closest_dual_pair_face(*D, opt) : find_closest_face(G, opt);
            if (c && (res.support.empty() || c->value < res.value)) {
                res.lambda = l;
                res.value = c->value;
                res.support.clear();
                res.weights.clear();
                for (int i : c->support) {
                    res.support.push_back(D ? D->names[i] : slots[i].record.name);
                    res.weights.push_back(c->t(i));
                }
            }
        }
    }
    return res;
}

struct TaibiBounds {
    std::optional<long> max_m1;  // nullopt: unbounded
    std::optional<long> max_m2;
    std::optional<long> joint;  // bound on m2 given m1, when m1 is supplied
};

inline TaibiBounds taibi_bounds(const KElement& V, const Odlyzko& F, int p, std::optional<long> m1_known = {}) {
    const JTable& T = JCache::get(F.lambda, 2 * std::max(1, V.motivic_weight()));
    const double B = T.b(V, V);
    const double phi0 = phi_cached(F.lambda, 0.0);
    const double logp = std::log(double(p));
    const long n = V.dim();
    const double tol = 1e-12;
    TaibiBounds out;
    if (B > 0) out.max_m1 = static_cast<long>(std::floor(phi0 / B + tol));
    double D = B - logp * (n - 1);
    if (D > 0) out.max_m2 = static_cast<long>(std::floor(phi0 / D + tol));
    if (m1_known) {
        long m1 = *m1_known;
        auto ok = [&](long m2) {
            long tot = m1 + m2;
            if (tot == 0) return true;
            return tot * B <= phi0 + logp * m2 * (n - double(m2) / tot) + tol;
        };
        long cap = out.max_m2 ? *out.max_m2 : 100000;
        long best = -1;
        for (long m2 = 0; m2 <= cap; ++m2)
            if (ok(m2)) best = m2;
        if (best >= 0 && !(best == cap && !out.max_m2)) out.joint = best;
        else if (best < 0) out.joint = 0;
    }
    return out;
}

// Multiplicity of V must be even: for even motivic weight (no self-dual ramified
// representation exists) or when V is known to carry no self-dual representation.
inline long parity_constraint(const KElement& V, long max_m2, bool known_non_selfdual = false) {
    bool even_weight = V.motivic_weight() % 2 == 0 && V.effective() && V.is_regular();
    if (!even_weight && !known_non_selfdual)
        throw std::invalid_argument("parity constraint needs a regular element of even weight or a non-self-dual case");
    return max_m2 - (max_m2 % 2 != 0 ? 1 : 0);
}

}  // namespace explf
