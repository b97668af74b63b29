#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "registry.hpp"

namespace explf {

struct Gamma0Row {
    int k, p, dim_plus, dim_minus;
};
struct SiegelRow {
    int w, v, dim;
};
struct SOLatticeRow {
    int m;
    std::vector<int> weights;
    int dim_plus, dim_minus;
};

class DimensionTables {
public:
    std::map<std::pair<int, int>, Gamma0Row> gamma0;           // (k, p)
    std::map<std::pair<int, int>, SiegelRow> siegel;           // (w, v), level 2
    std::map<std::pair<int, std::vector<int>>, SOLatticeRow> so;  // (m, weights)

    std::optional<Gamma0Row> gamma0_new(int k, int p) const { return get(gamma0, std::make_pair(k, p)); }
    std::optional<SiegelRow> siegel_para(int w, int v) const { return get(siegel, std::make_pair(w, v)); }
    std::optional<SOLatticeRow> so_lattice(int m, const std::vector<int>& ws) const { return get(so, std::make_pair(m, ws)); }
    bool empty() const { return gamma0.empty() && siegel.empty() && so.empty(); }

private:
    template <class M, class K>
    static std::optional<typename M::mapped_type> get(const M& m, const K& k) {
        auto it = m.find(k);
        if (it == m.end()) return std::nullopt;
        return it->second;
    }
};

inline std::vector<int> parse_weight_list(const std::string& s, const std::string& where) {
    std::vector<int> ws;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            ws.push_back(std::stoi(tok));
        } catch (...) {
            throw DataError(where + ": bad weight list '" + s + "'");
        }
    }
    if (ws.empty()) throw DataError(where + ": empty weight list");
    return ws;
}

// Reads one table family from a TSV stream; the header names the family's columns.
inline void parse_dimension_table(std::istream& in, const std::string& family, DimensionTables& t,
                                  const std::string& label) {
    static const std::map<std::string, std::vector<std::string>> headers = {
        {"gamma0_new", {"k", "p", "dim_plus", "dim_minus"}},
        {"siegel_para", {"w", "v", "dim"}},
        {"so_lattice", {"m", "weights", "dim_plus", "dim_minus"}},
    };
    auto h = headers.find(family);
    if (h == headers.end()) throw DataError(label + ": unknown table family '" + family + "'");
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = label + ":" + std::to_string(lineno);
        if (line.empty() || line[0] == '#') continue;
        auto f = split_tabs(line);
        if (!header) {
            if (f != h->second) throw DataError(where + ": header does not match family " + family);
            header = true;
            continue;
        }
        if (f.size() != h->second.size())
            throw DataError(where + ": expected " + std::to_string(h->second.size()) + " columns");
        auto num = [&](const std::string& s) {
            try {
                std::size_t pos = 0;
                int v = std::stoi(s, &pos);
                if (pos != s.size() || v < 0) throw 0;
                return v;
            } catch (...) {
                throw DataError(where + ": bad integer '" + s + "'");
            }
        };
        if (family == "gamma0_new") {
            Gamma0Row r{num(f[0]), num(f[1]), num(f[2]), num(f[3])};
            t.gamma0[{r.k, r.p}] = r;
        } else if (family == "siegel_para") {
            SiegelRow r{num(f[0]), num(f[1]), num(f[2])};
            t.siegel[{r.w, r.v}] = r;
        } else {
            SOLatticeRow r{num(f[0]), parse_weight_list(f[1], where), num(f[2]), num(f[3])};
            t.so[{r.m, r.weights}] = r;
        }
    }
}

// Loads gamma0_new.tsv, siegel_para.tsv and so_lattice.tsv from a directory; absent files are empty.
inline DimensionTables load_dimension_tables(const std::string& dir) {
    DimensionTables t;
    for (std::string fam : {"gamma0_new", "siegel_para", "so_lattice"}) {
        auto path = std::filesystem::path(dir) / (fam + ".tsv");
        if (!std::filesystem::exists(path)) continue;
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path.string());
        parse_dimension_table(in, fam, t, path.string());
    }
    return t;
}

}  // namespace explf
