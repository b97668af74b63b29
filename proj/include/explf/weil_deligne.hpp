#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

namespace explf {

// X (x) U_d with X irreducible of Artin exponent a_w and dimension dim_x.
struct WDPiece {
    int a_w = 0;
    int dim_x = 1;
    int d = 1;
    std::optional<int> frob_sign;  // X(Fr) when X is an unramified quadratic character

    void validate() const {
        if (a_w < 0 || dim_x < 1 || d < 1) throw std::invalid_argument("WDPiece: bad sizes");
        if (a_w == 0 && dim_x != 1) throw std::invalid_argument("WDPiece: unramified irreducible must be a character");
        if (a_w > 0 && a_w < dim_x) throw std::invalid_argument("WDPiece: ramified exponent below dimension");
        if (frob_sign && a_w != 0) throw std::invalid_argument("WDPiece: Frobenius sign on a ramified piece");
        if (frob_sign && *frob_sign != 1 && *frob_sign != -1) throw std::invalid_argument("WDPiece: sign must be +-1");
    }
};

struct WDRep {
    std::vector<WDPiece> pieces;
    int omega = 1;  // central character at a uniformizer

    int dim() const {
        int n = 0;
        for (auto& p : pieces) n += p.dim_x * p.d;
        return n;
    }
    bool unramified_pieces_only() const {
        return std::all_of(pieces.begin(), pieces.end(), [](const WDPiece& p) { return p.a_w == 0; });
    }
    bool is_unramified() const {
        return std::all_of(pieces.begin(), pieces.end(), [](const WDPiece& p) { return p.a_w == 0 && p.d == 1; });
    }
    // n-2 unramified characters plus one psi (x) U_2.
    bool is_type_I() const {
        if (!unramified_pieces_only()) return false;
        int twos = 0;
        for (auto& p : pieces) {
            if (p.d == 2) ++twos;
            else if (p.d != 1) return false;
        }
        return twos == 1;
    }
    std::optional<int> psi() const {
        for (auto& p : pieces)
            if (p.d == 2) return p.frob_sign;
        return std::nullopt;
    }
};

inline WDRep unramified_rep(int n, std::optional<int> sign = std::nullopt) {
    WDRep r;
    for (int i = 0; i < n; ++i) r.pieces.push_back({0, 1, 1, sign});
    return r;
}

inline WDRep type_I_rep(int n, std::optional<int> psi) {
    if (n < 2) throw std::invalid_argument("type (I) needs n >= 2");
    WDRep r = unramified_rep(n - 2);
    r.pieces.push_back({0, 1, 2, psi});
    return r;
}

inline int awd(const WDPiece& p) {
    p.validate();
    return p.a_w == 0 ? p.d - 1 : p.d * p.a_w;
}

inline int awd(const WDRep& r) {
    int a = 0;
    for (auto& p : r.pieces) a += awd(p);
    return a;
}

// U_d (x) U_e = sum_{k < min(d,e)} U_{|d-e|+1+2k}.
inline std::vector<int> clebsch_gordan(int d, int e) {
    std::vector<int> out;
    for (int k = 0; k < std::min(d, e); ++k) out.push_back(std::abs(d - e) + 1 + 2 * k);
    return out;
}

inline WDRep tensor(const WDRep& r1, const WDRep& r2) {
    if (!r1.unramified_pieces_only() || !r2.unramified_pieces_only())
        throw std::invalid_argument("tensor of ramified Weil parts is not determined by exponents");
    WDRep out;
    for (auto& p : r1.pieces)
        for (auto& q : r2.pieces) {
            std::optional<int> s;
            if (p.frob_sign && q.frob_sign) s = *p.frob_sign * *q.frob_sign;
            for (int f : clebsch_gordan(p.d, q.d)) out.pieces.push_back({0, 1, f, s});
        }
    int n1 = r1.dim(), n2 = r2.dim();
    out.omega = ((n2 % 2 && r1.omega < 0) ? -1 : 1) * ((n1 % 2 && r2.omega < 0) ? -1 : 1);
    return out;
}

inline int tensor_exponent(const WDRep& r1, const WDRep& r2) { return awd(tensor(r1, r2)); }

inline int henniart_bound(int a1, int n1, int a2, int n2) { return n2 * a1 + n1 * a2 - std::min(a1, a2); }

// +1 / -1, or 0 when not determined by the available signs.
inline int epsilon_sign(const WDRep& r) {
    int s = 1;
    for (auto& p : r.pieces) {
        if (p.a_w != 0) return 0;
        if (p.d == 1) continue;
        if (!p.frob_sign) return 0;
        if ((p.d - 1) % 2 == 1) s *= -*p.frob_sign;
    }
    return s;
}

// Closed forms for pairs of unramified / type (I) parameters.
inline int pair_epsilon_sign(const WDRep& a, const WDRep& b) {
    auto pow_sign = [](int s, int e) { return (e % 2 == 0) ? 1 : s; };
    bool ua = a.is_unramified(), ub = b.is_unramified();
    if (ua && ub) return 1;
    if (ua && b.is_type_I()) {
        auto psi = b.psi();
        if (!psi) return 0;
        int m = a.dim();
        return pow_sign(-1, m) * pow_sign(*psi, m) * a.omega;
    }
    if (ub && a.is_type_I()) return pair_epsilon_sign(b, a);
    if (a.is_type_I() && b.is_type_I()) {
        auto p1 = a.psi(), p2 = b.psi();
        if (!p1 || !p2) return 0;
        int n = a.dim(), n2 = b.dim();
        return pow_sign(-1, n + n2) * pow_sign(*p1, n2 - 2) * pow_sign(*p2, n - 2) * a.omega * b.omega;
    }
    return 0;
}

}  // namespace explf
