#pragma once

#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace explf {

enum class DetClass { TRIV, EPS };

// Formal Z-combination of TRIV, EPS and IND(w), w >= 1.
class KElement {
public:
    KElement() = default;

    static KElement triv(long c = 1) { KElement k; k.triv_ = c; return k; }
    static KElement eps(long c = 1) { KElement k; k.eps_ = c; return k; }
    static KElement ind(int w, long c = 1) {
        if (w < 0) throw std::invalid_argument("IND weight must be >= 0");
        KElement k;
        if (w == 0) { k.triv_ = c; k.eps_ = c; }
        else if (c != 0) k.ind_[w] = c;
        return k;
    }

    long c_triv() const { return triv_; }
    long c_eps() const { return eps_; }
    long c_ind(int w) const {
        auto it = ind_.find(w);
        return it == ind_.end() ? 0 : it->second;
    }
    const std::map<int, long>& inds() const { return ind_; }

    bool is_zero() const { return triv_ == 0 && eps_ == 0 && ind_.empty(); }
    bool effective() const {
        if (triv_ < 0 || eps_ < 0) return false;
        for (auto& [w, c] : ind_) if (c < 0) return false;
        return true;
    }

    long dim() const {
        long d = triv_ + eps_;
        for (auto& [w, c] : ind_) d += 2 * c;
        return d;
    }

    int motivic_weight() const {
        return ind_.empty() ? 0 : ind_.rbegin()->first;
    }

    DetClass det() const {
        long parity = eps_;
        for (auto& [w, c] : ind_) parity += c * (w + 1);
        return (parity % 2 == 0) ? DetClass::TRIV : DetClass::EPS;
    }

    bool is_regular() const {
        require_effective();
        if (triv_ + eps_ > 1) return false;
        for (auto& [w, c] : ind_) if (c > 1) return false;
        return true;
    }

    bool is_very_regular() const {
        if (!is_regular()) return false;
        int prev = -1;
        for (auto& [w, c] : ind_) {
            if (prev >= 0 && w - prev <= 2) return false;
            prev = w;
        }
        return true;
    }

    // Weights as a decreasing list with multiplicity.
    std::vector<int> weights() const {
        std::vector<int> out;
        for (auto it = ind_.rbegin(); it != ind_.rend(); ++it)
            for (long i = 0; i < it->second; ++i) out.push_back(it->first);
        return out;
    }

    KElement& operator+=(const KElement& o) {
        triv_ += o.triv_;
        eps_ += o.eps_;
        for (auto& [w, c] : o.ind_) add_ind(w, c);
        return *this;
    }
    KElement& operator-=(const KElement& o) { return *this += o * -1; }
    friend KElement operator+(KElement a, const KElement& b) { return a += b; }
    friend KElement operator-(KElement a, const KElement& b) { return a -= b; }
    friend KElement operator*(KElement a, long s) {
        a.triv_ *= s;
        a.eps_ *= s;
        if (s == 0) a.ind_.clear();
        else for (auto& [w, c] : a.ind_) c *= s;
        return a;
    }
    friend KElement operator*(long s, const KElement& a) { return a * s; }
    friend bool operator==(const KElement&, const KElement&) = default;

    std::string str() const {
        std::string out;
        auto term = [&](long c, const std::string& sym) {
            if (c == 0) return;
            if (!out.empty()) out += c < 0 ? "-" : "+";
            else if (c < 0) out += "-";
            long a = std::labs(c);
            if (a != 1) out += std::to_string(a) + "*";
            out += sym;
        };
        for (auto it = ind_.rbegin(); it != ind_.rend(); ++it) term(it->second, "I" + std::to_string(it->first));
        term(eps_, "eps");
        term(triv_, "1");
        return out.empty() ? "0" : out;
    }

    static KElement parse(std::string_view s) {
        KElement out;
        std::string buf;
        for (char ch : s) if (ch != ' ' && ch != '\t') buf += ch;
        if (buf.empty()) throw std::invalid_argument("empty KElement");
        if (buf == "0") return out;
        std::size_t i = 0;
        while (i < buf.size()) {
            long sign = 1;
            if (buf[i] == '+' || buf[i] == '-') { sign = buf[i] == '-' ? -1 : 1; ++i; }
            std::size_t j = i;
            while (j < buf.size() && buf[j] != '+' && buf[j] != '-') ++j;
            std::string tok = buf.substr(i, j - i);
            if (tok.empty()) throw std::invalid_argument("bad KElement: " + std::string(s));
            long coef = 1;
            auto star = tok.find('*');
            if (star != std::string::npos) {
                coef = parse_int(tok.substr(0, star), s);
                tok = tok.substr(star + 1);
            }
            coef *= sign;
            if (tok == "1" || tok == "TRIV") out += triv(coef);
            else if (tok == "eps" || tok == "EPS") out += eps(coef);
            else if (tok.size() > 1 && tok[0] == 'I') out += ind(static_cast<int>(parse_int(tok.substr(1), s)), coef);
            else throw std::invalid_argument("bad KElement symbol '" + tok + "' in " + std::string(s));
            i = j;
        }
        return out;
    }

private:
    long triv_ = 0;
    long eps_ = 0;
    std::map<int, long> ind_;

    void add_ind(int w, long c) {
        if (c == 0) return;
        long& v = ind_[w];
        v += c;
        if (v == 0) ind_.erase(w);
    }
    void require_effective() const {
        if (!effective()) throw std::invalid_argument("KElement not effective: " + str());
    }
    static long parse_int(const std::string& t, std::string_view ctx) {
        if (t.empty()) throw std::invalid_argument("bad KElement: " + std::string(ctx));
        for (char ch : t) if (ch < '0' || ch > '9') throw std::invalid_argument("bad KElement: " + std::string(ctx));
        return std::stol(t);
    }
};

inline KElement tensor(const KElement& a, const KElement& b) {
    KElement out;
    long at = a.c_triv(), ae = a.c_eps(), bt = b.c_triv(), be = b.c_eps();
    out += KElement::triv(at * bt + ae * be);
    out += KElement::eps(at * be + ae * bt);
    for (auto& [w, c] : b.inds()) out += KElement::ind(w, (at + ae) * c);
    for (auto& [w, c] : a.inds()) out += KElement::ind(w, (bt + be) * c);
    for (auto& [n, c] : a.inds())
        for (auto& [m, d] : b.inds()) {
            out += KElement::ind(n + m, c * d);
            out += KElement::ind(std::abs(n - m), c * d);
        }
    return out;
}

// Every element of K_infty is self-dual.
inline KElement dual(const KElement& v) { return v; }

inline DetClass det(const KElement& v) { return v.det(); }

// Basis of the filtration piece of weight <= w, as KElements.
inline std::vector<KElement> filtration_basis(int w) {
    std::vector<KElement> basis;
    if (w % 2 == 0) {
        basis.push_back(KElement::triv());
        basis.push_back(KElement::eps());
        for (int v = 2; v <= w; v += 2) basis.push_back(KElement::ind(v));
    } else {
        for (int v = 1; v <= w; v += 2) basis.push_back(KElement::ind(v));
    }
    return basis;
}

inline int filtration_rank(int w) { return w % 2 ? (w + 1) / 2 : w / 2 + 2; }

}  // namespace explf
