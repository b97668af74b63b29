#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "archimedean.hpp"
#include "kinfty.hpp"
#include "test_function.hpp"
#include "weil_deligne.hpp"

namespace explf {

enum class Tri { yes, no, unknown };
enum class Nature { symplectic, orthogonal, unknown };

inline std::string to_string(Tri t) { return t == Tri::yes ? "yes" : t == Tri::no ? "no" : "unknown"; }
inline std::string to_string(Nature n) {
    return n == Nature::symplectic ? "symplectic" : n == Nature::orthogonal ? "orthogonal" : "unknown";
}

struct RepRecord {
    std::string name;
    int rank = 1;
    int conductor = 1;
    KElement arch;
    Tri selfdual = Tri::unknown;
    Nature nature = Nature::unknown;
    int local_sign = 0;  // epsilon factor at the ramified prime; 0 when unknown or unramified
    bool conjectural = false;

    // Weil-Deligne parameter at p: type (I) when p divides the conductor.
    WDRep local_parameter(int p) const {
        if (conductor == p) {
            std::optional<int> psi;
            if (local_sign) psi = -local_sign;
            return type_I_rep(rank, psi);
        }
        return unramified_rep(rank);
    }

    // epsilon_infty times the local signs; 0 if some factor is unknown or not real.
    int global_sign() const {
        auto e = eps_infinity(arch);
        if (!e.is_real()) return 0;
        int s = e.value_real();
        if (conductor > 1) {
            if (!local_sign) return 0;
            s *= local_sign;
        }
        return s;
    }

    void validate() const {
        if (rank < 1) throw std::invalid_argument(name + ": rank must be >= 1");
        if (arch.dim() != rank) throw std::invalid_argument(name + ": arch dimension differs from rank");
        if (!arch.effective()) throw std::invalid_argument(name + ": arch not effective");
        if (arch.det() != DetClass::TRIV) throw std::invalid_argument(name + ": nontrivial determinant");
        if (conductor > 1 && selfdual == Tri::yes) {
            if (nature != Nature::symplectic || rank % 2)
                throw std::invalid_argument(name + ": self-dual ramified record must be symplectic of even rank");
        }
        if (conductor == 1 && local_sign != 0) throw std::invalid_argument(name + ": local sign on an unramified record");
        if (local_sign != 0 && local_sign != 1 && local_sign != -1) throw std::invalid_argument(name + ": bad local sign");
    }
};

inline std::vector<int> prime_factors(int n) {
    std::vector<int> out;
    for (int p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    if (n > 1) out.push_back(n);
    return out;
}

inline std::vector<int> common_ramified_primes(const RepRecord& a, const RepRecord& b) {
    std::set<int> ps;
    for (int p : prime_factors(a.conductor)) ps.insert(p);
    for (int p : prime_factors(b.conductor)) ps.insert(p);
    return {ps.begin(), ps.end()};
}

// Artin exponent at p of the pair, by the three closed forms.
inline int pair_exponent(const RepRecord& a, const RepRecord& b, int p) {
    bool ra = a.conductor % p == 0, rb = b.conductor % p == 0;
    if (!ra && !rb) return 0;
    if (ra && !rb) return b.rank;
    if (!ra && rb) return a.rank;
    return a.rank + b.rank - 2;
}

// Global epsilon of the pair: +1/-1, or 0 when not determined.
inline int pair_global_sign(const RepRecord& a, const RepRecord& b) {
    auto e = eps_infinity(tensor(a.arch, b.arch));
    if (!e.is_real()) return 0;
    int s = e.value_real();
    for (int p : common_ramified_primes(a, b)) {
        int l = pair_epsilon_sign(a.local_parameter(p), b.local_parameter(p));
        if (!l) return 0;
        s *= l;
    }
    return s;
}

inline int e_perp(const RepRecord& a, const RepRecord& b) {
    if (a.selfdual != Tri::yes || b.selfdual != Tri::yes) return 0;
    return pair_global_sign(a, b) == -1 ? 1 : 0;
}

inline double b2_calc(const Odlyzko& F, const RepRecord& a, const RepRecord& b) {
    if (a.conductor != b.conductor || a.conductor == 1) return 0.0;
    if (prime_factors(a.conductor).size() != 1 || a.conductor != prime_factors(a.conductor)[0]) return 0.0;
    if (!a.local_sign || !b.local_sign) return 0.0;
    int s = a.local_sign * b.local_sign;
    double acc = 0;
    for (auto [k, w] : prime_weights(F, a.conductor)) acc += w * ((k % 2 && s < 0) ? -1.0 : 1.0);
    return acc;
}

struct DualPairBoundRefused : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Lower bound for B2calc((pi + pi^dual)/2, same) of a non-self-dual conductor p record.
inline double b2_calc_dual_pair_bound(const Odlyzko& F, int p) {
    if (!theta_min_at_minus_one(F, p))
        throw DualPairBoundRefused("Theta minimum not attained at -1; dual-pair bound refused");
    return 0.5 * (theta(F, p, cplx(1, 0)) + theta(F, p, cplx(-1, 0)));
}

// Record names: "1", "Delta_11", "Delta_19,7", "E_13^+", "E_21,7^-a".
struct ParsedName {
    std::string family;
    std::vector<int> weights;
    int sign = 0;
    std::string tag;
};

inline ParsedName parse_record_name(const std::string& name) {
    ParsedName out;
    if (name == "1") { out.family = "1"; return out; }
    auto us = name.find('_');
    if (us == std::string::npos) throw std::invalid_argument("bad record name: " + name);
    out.family = name.substr(0, us);
    std::string rest = name.substr(us + 1);
    std::string ws = rest;
    auto caret = rest.find('^');
    if (caret != std::string::npos) {
        ws = rest.substr(0, caret);
        std::string sg = rest.substr(caret + 1);
        if (sg.empty()) throw std::invalid_argument("bad sign in record name: " + name);
        if (sg[0] == '+') out.sign = 1;
        else if (sg[0] == '-') out.sign = -1;
        else if (sg[0] != '?') throw std::invalid_argument("bad sign in record name: " + name);
        out.tag = sg.substr(1);
    }
    std::stringstream ss(ws);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.weights.push_back(std::stoi(tok));
    if (out.weights.empty()) throw std::invalid_argument("no weights in record name: " + name);
    return out;
}

inline KElement arch_from_weights(const std::vector<int>& ws) {
    KElement v;
    for (int w : ws) v += KElement::ind(w);
    return v;
}

inline std::string record_name(const std::string& family, const std::vector<int>& ws, int sign = 0,
                               const std::string& tag = "") {
    std::string s = family + "_";
    for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? "," : "") + std::to_string(ws[i]);
    if (family == "E") s += std::string("^") + (sign > 0 ? "+" : sign < 0 ? "-" : "?") + tag;
    return s;
}

class Registry {
public:
    Registry() = default;
    explicit Registry(std::vector<RepRecord> recs) {
        for (auto& r : recs) add(std::move(r));
    }

    void add(RepRecord r) {
        r.validate();
        for (auto& x : records_)
            if (x.name == r.name) throw std::invalid_argument("duplicate record name: " + r.name);
        records_.push_back(std::move(r));
    }
    bool contains(const std::string& name) const { return find(name) != nullptr; }
    void replace(const std::string& name, RepRecord r) {
        r.validate();
        for (auto& x : records_)
            if (x.name == name) {
                for (auto& y : records_)
                    if (&y != &x && y.name == r.name) throw std::invalid_argument("duplicate record name: " + r.name);
                x = std::move(r);
                return;
            }
        throw std::invalid_argument("no record named " + name);
    }
    const RepRecord* find(const std::string& name) const {
        for (auto& r : records_)
            if (r.name == name) return &r;
        return nullptr;
    }
    const std::vector<RepRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    std::vector<RepRecord> with_conductor(int n) const {
        std::vector<RepRecord> out;
        for (auto& r : records_)
            if (r.conductor == n) out.push_back(r);
        return out;
    }
    int count_with_arch(const KElement& v, int conductor) const {
        int c = 0;
        for (auto& r : records_)
            if (r.conductor == conductor && r.arch == v) ++c;
        return c;
    }

private:
    std::vector<RepRecord> records_;
};

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == '\t') { out.push_back(cur); cur.clear(); }
        else if (c != '\r') cur += c;
    }
    out.push_back(cur);
    return out;
}

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Tri parse_tri(const std::string& s, const std::string& where) {
    if (s == "yes") return Tri::yes;
    if (s == "no") return Tri::no;
    if (s == "unknown" || s == "?") return Tri::unknown;
    throw DataError(where + ": bad selfdual value '" + s + "'");
}

inline Nature parse_nature(const std::string& s, const std::string& where) {
    if (s == "symplectic") return Nature::symplectic;
    if (s == "orthogonal") return Nature::orthogonal;
    if (s == "unknown" || s == "?") return Nature::unknown;
    throw DataError(where + ": bad nature value '" + s + "'");
}

inline int parse_sign(const std::string& s, const std::string& where) {
    if (s == "+" || s == "+1" || s == "1") return 1;
    if (s == "-" || s == "-1") return -1;
    if (s == "" || s == "?" || s == "unknown" || s == "NA" || s == "0") return 0;
    throw DataError(where + ": bad local_sign value '" + s + "'");
}

inline const char* knowns_header = "name\trank\tconductor\tarch\tselfdual\tnature\tlocal_sign";

inline Registry parse_registry(std::istream& in, const std::string& label = "knowns") {
    Registry reg;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = label + ":" + std::to_string(lineno);
        if (line.empty() || line[0] == '#') continue;
        auto f = split_tabs(line);
        if (!header) {
            if (f.size() < 7 || f[0] != "name") throw DataError(where + ": expected header '" + knowns_header + "'");
            header = true;
            continue;
        }
        if (f.size() < 7 || f.size() > 8) throw DataError(where + ": expected 7 columns, got " + std::to_string(f.size()));
        RepRecord r;
        try {
            r.name = f[0];
            r.rank = std::stoi(f[1]);
            r.conductor = std::stoi(f[2]);
            r.arch = KElement::parse(f[3]);
            r.selfdual = parse_tri(f[4], where);
            r.nature = parse_nature(f[5], where);
            r.local_sign = parse_sign(f[6], where);
            r.conjectural = f.size() == 8 && f[7] == "conjectural";
            reg.add(r);
        } catch (const DataError&) {
            throw;
        } catch (const std::exception& e) {
            throw DataError(where + ": " + e.what());
        }
    }
    return reg;
}

inline Registry load_registry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return parse_registry(in, path);
}

inline void write_registry(std::ostream& out, const Registry& reg) {
    out << knowns_header << "\n";
    for (auto& r : reg.records()) {
        out << r.name << '\t' << r.rank << '\t' << r.conductor << '\t' << r.arch.str() << '\t' << to_string(r.selfdual)
            << '\t' << to_string(r.nature) << '\t'
            << (r.conductor == 1 ? "NA" : r.local_sign > 0 ? "+" : r.local_sign < 0 ? "-" : "?");
        if (r.conjectural) out << "\tconjectural";
        out << '\n';
    }
}

}  // namespace explf
