#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "registry.hpp"
#include "tables.hpp"

namespace explf {

// A summand pi[d]; pi is a registry record or one of the formal characters "1", "eta".
struct ArthurSummand {
    std::optional<RepRecord> record;
    std::string symbol;
    int d = 1;

    int rank() const { return record ? record->rank : 1; }
    int conductor() const { return record ? record->conductor : (symbol == "eta" ? 2 : 1); }
    bool symplectic() const { return record && record->nature == Nature::symplectic; }
    std::string name() const {
        std::string n = record ? record->name : symbol;
        return d == 1 ? n : n + "[" + std::to_string(d) + "]";
    }
    // Positive weights (doubled) of pi[d]: each w of pi gives w + d - 1 - 2j.
    std::vector<int> weights() const {
        std::vector<int> base = record ? record->arch.weights() : std::vector<int>{0};
        std::vector<int> out;
        for (int w : base)
            for (int j = 0; j < d; ++j) {
                int x = w + d - 1 - 2 * j;
                if (x > 0) out.push_back(x);
            }
        return out;
    }
};

struct ArthurParameter {
    std::vector<ArthurSummand> summands;
    bool conjectural = false;

    int dim() const {
        int n = 0;
        for (auto& s : summands) n += s.rank() * s.d;
        return n;
    }
    int conductor() const {
        int c = 1;
        for (auto& s : summands) c *= s.conductor();
        return c;
    }
    // Local sign of the ramified summand; 0 when unramified, unknown or formal.
    int sign() const {
        for (auto& s : summands)
            if (s.conductor() > 1) return s.record ? s.record->local_sign : 0;
        return 0;
    }
    std::vector<int> weights() const {
        std::vector<int> out;
        for (auto& s : summands)
            for (int w : s.weights()) out.push_back(w);
        std::sort(out.rbegin(), out.rend());
        return out;
    }
    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < summands.size(); ++i) s += (i ? " + " : "") + summands[i].name();
        return s;
    }

    void validate(int two_n) const {
        if (dim() != two_n) throw std::logic_error(str() + ": dimension mismatch");
        for (std::size_t i = 0; i < summands.size(); ++i)
            for (std::size_t j = i + 1; j < summands.size(); ++j)
                if (summands[i].name() == summands[j].name()) throw std::logic_error(str() + ": repeated summand");
        for (auto& s : summands) {
            bool odd = s.d % 2 == 1;
            if (s.symplectic() != odd) throw std::logic_error(str() + ": parity rule violated by " + s.name());
        }
        std::set<int> primes;
        for (auto& s : summands)
            for (int p : prime_factors(s.conductor()))
                if (!primes.insert(p).second) throw std::logic_error(str() + ": conductors not coprime");
    }
};

enum class GroupFamily { SO3, SO5_split, SO7_compact, SO9_compact, SO5_case3 };

inline std::string to_string(GroupFamily f) {
    switch (f) {
        case GroupFamily::SO3: return "so3";
        case GroupFamily::SO5_split: return "so5";
        case GroupFamily::SO7_compact: return "so7c2";
        case GroupFamily::SO9_compact: return "so9c2";
        case GroupFamily::SO5_case3: return "so5c3";
    }
    return "?";
}

inline GroupFamily parse_group(const std::string& s) {
    for (auto f : {GroupFamily::SO3, GroupFamily::SO5_split, GroupFamily::SO7_compact, GroupFamily::SO9_compact,
                   GroupFamily::SO5_case3})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown group '" + s + "' (so3, so5, so7c2, so9c2, so5c3)");
}

inline int group_rank(GroupFamily f) {
    switch (f) {
        case GroupFamily::SO3: return 1;
        case GroupFamily::SO5_split:
        case GroupFamily::SO5_case3: return 2;
        case GroupFamily::SO7_compact: return 3;
        case GroupFamily::SO9_compact: return 4;
    }
    return 0;
}

struct GroupTarget {
    GroupFamily family;
    std::vector<int> weights;
    int conductor = 1;

    void validate() const {
        if (static_cast<int>(weights.size()) != group_rank(family))
            throw std::invalid_argument("weight tuple length does not match the group rank");
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0 || weights[i] % 2 == 0) throw std::invalid_argument("weights must be positive odd");
            if (i && weights[i] >= weights[i - 1]) throw std::invalid_argument("weights must be strictly decreasing");
        }
        if (conductor != 1 && prime_factors(conductor) != std::vector<int>{conductor})
            throw std::invalid_argument("conductor must be 1 or a prime");
    }
    bool very_regular() const {
        for (std::size_t i = 1; i < weights.size(); ++i)
            if (weights[i - 1] - weights[i] <= 2) return false;
        return true;
    }
    bool conjectural() const { return family == GroupFamily::SO5_case3; }
    bool signed_counts() const { return family != GroupFamily::SO5_split; }
    std::string weights_str() const {
        std::string s;
        for (std::size_t i = 0; i < weights.size(); ++i) s += (i ? "," : "") + std::to_string(weights[i]);
        return s;
    }
};

namespace detail {

// Generic shapes as partitions of the weight positions.
inline std::vector<std::vector<std::vector<int>>> generic_shapes(GroupFamily f) {
    switch (f) {
        case GroupFamily::SO3: return {{{0}}};
        case GroupFamily::SO5_split: return {{{0, 1}}};
        case GroupFamily::SO7_compact: return {{{0, 1, 2}}, {{0, 2}, {1}}};
        case GroupFamily::SO9_compact:
            return {{{0, 1, 2, 3}}, {{0, 2}, {1, 3}}, {{0}, {1, 3}, {2}}, {{0}, {1, 2, 3}}, {{0, 1, 3}, {2}}};
        case GroupFamily::SO5_case3: return {{{0, 1}}, {{0}, {1}}};
    }
    return {};
}

inline std::vector<const RepRecord*> symplectic_with_weights(const Registry& reg, const std::vector<int>& ws) {
    KElement v = arch_from_weights(ws);
    std::vector<const RepRecord*> out;
    for (auto& r : reg.records())
        if (r.selfdual == Tri::yes && r.nature == Nature::symplectic && r.arch == v) out.push_back(&r);
    return out;
}

}  // namespace detail

// Admissible tempered (and, for the conjectural case, the listed non-generic)
// parameters with the target's weights and conductor.
inline std::vector<ArthurParameter> enumerate_parameters(const GroupTarget& t, const Registry& reg) {
    t.validate();
    std::vector<ArthurParameter> out;
    for (auto& shape : detail::generic_shapes(t.family)) {
        std::vector<std::vector<const RepRecord*>> choices;
        for (auto& block : shape) {
            std::vector<int> ws;
            for (int i : block) ws.push_back(t.weights[i]);
            choices.push_back(detail::symplectic_with_weights(reg, ws));
        }
        std::vector<const RepRecord*> pick(shape.size());
        std::function<void(std::size_t)> rec = [&](std::size_t i) {
            if (i == shape.size()) {
                ArthurParameter p;
                p.conjectural = t.conjectural();
                for (auto* r : pick) p.summands.push_back({*r, "", 1});
                if (p.conductor() != t.conductor) return;
                try {
                    p.validate(2 * group_rank(t.family));
                } catch (const std::logic_error&) {
                    return;
                }
                if (t.family == GroupFamily::SO5_case3 && shape.size() == 2 &&
                    !(p.summands[0].conductor() == 1 && p.summands[1].conductor() > 1))
                    return;
                out.push_back(std::move(p));
                return;
            }
            for (auto* r : choices[i]) {
                pick[i] = r;
                rec(i + 1);
            }
        };
        rec(0);
    }
    if (t.family == GroupFamily::SO5_case3 && t.conductor == 2) {
        int w = t.weights[0], v = t.weights[1];
        if (v == 1) {
            for (auto* r : detail::symplectic_with_weights(reg, {w})) {
                int g = r->global_sign();
                if (r->conductor == 1 && g == 1) out.push_back({{{*r, "", 1}, {std::nullopt, "eta", 2}}, true});
                if (r->conductor == 2 && g == -1) out.push_back({{{*r, "", 1}, {std::nullopt, "1", 2}}, true});
            }
        }
        if (w == 3 && v == 1) out.push_back({{{std::nullopt, "eta", 4}}, true});
    }
    return out;
}

struct MissingRow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Number of parameters of conductor `t.conductor` (and local sign `sign`, when given)
// predicted by the dimension tables; conductor-1 parameters from `reg` are removed.
inline long expected_count(const GroupTarget& t, const DimensionTables& tables, std::optional<int> sign,
                           const Registry& reg = {}) {
    t.validate();
    auto old_count = [&]() {
        GroupTarget t1 = t;
        t1.conductor = 1;
        return static_cast<long>(enumerate_parameters(t1, reg).size());
    };
    switch (t.family) {
        case GroupFamily::SO3: {
            auto row = tables.gamma0_new(t.weights[0] + 1, t.conductor);
            if (!row) throw MissingRow("gamma0_new row k=" + std::to_string(t.weights[0] + 1) + " missing");
            if (!sign) return row->dim_plus + row->dim_minus;
            return *sign > 0 ? row->dim_plus : row->dim_minus;
        }
        case GroupFamily::SO5_split: {
            if (sign) throw std::invalid_argument("paramodular table carries no sign");
            auto row = tables.siegel_para(t.weights[0], t.weights[1]);
            if (!row) throw MissingRow("siegel_para row (" + t.weights_str() + ") missing");
            return row->dim - 2 * old_count();
        }
        case GroupFamily::SO7_compact:
        case GroupFamily::SO9_compact: {
            int m = t.family == GroupFamily::SO7_compact ? 7 : 9;
            auto row = tables.so_lattice(m, t.weights);
            if (!row) throw MissingRow("so_lattice row m=" + std::to_string(m) + " (" + t.weights_str() + ") missing");
            long old = old_count();
            if (!sign) return row->dim_plus + row->dim_minus - 2 * old;
            return (*sign > 0 ? row->dim_plus : row->dim_minus) - old;
        }
        case GroupFamily::SO5_case3: {
            auto row = tables.so_lattice(5, t.weights);
            if (!row) throw MissingRow("so_lattice row m=5 (" + t.weights_str() + ") missing");
            if (!sign) return row->dim_plus + row->dim_minus;
            return *sign > 0 ? row->dim_minus : row->dim_plus;
        }
    }
    return 0;
}

struct ReconcileReport {
    GroupTarget target;
    bool consistent = true;
    bool missing_row = false;
    bool warning = false;  // deficit on a regular, not very regular, tuple
    std::vector<ArthurParameter> parameters;
    std::map<int, long> expected;    // sign -> count (key 0: unsigned)
    std::map<int, long> enumerated;  // sign -> count of parameters with a known sign
    std::vector<std::string> surplus;
    std::map<int, long> deficit;
    std::map<std::string, int> inferred_signs;
    std::string status;
};

// Compares enumerated parameters with the tables. Records of unknown local sign
// inside the parameters are assigned the unique signs, if any, that make the
// signed counts match exactly.
inline ReconcileReport reconcile(const GroupTarget& t, const Registry& reg, const DimensionTables& tables) {
    ReconcileReport rep;
    rep.target = t;
    rep.parameters = enumerate_parameters(t, reg);
    const bool exact = t.very_regular();
    std::vector<int> keys = t.signed_counts() ? std::vector<int>{1, -1} : std::vector<int>{0};
    try {
        for (int k : keys) rep.expected[k] = expected_count(t, tables, k ? std::optional<int>(k) : std::nullopt, reg);
    } catch (const MissingRow& e) {
        rep.missing_row = true;
        rep.status = "missing-row";
        return rep;
    }
    if (rep.parameters.empty() && std::all_of(rep.expected.begin(), rep.expected.end(),
                                              [](auto& kv) { return kv.second == 0; })) {
        rep.status = "consistent";
        return rep;
    }
    // Unknown-sign records appearing in parameters.
    std::vector<std::string> unknown;
    if (t.signed_counts())
        for (auto& p : rep.parameters)
            for (auto& s : p.summands)
                if (s.record && s.record->conductor > 1 && s.record->local_sign == 0 &&
                    std::find(unknown.begin(), unknown.end(), s.record->name) == unknown.end())
                    unknown.push_back(s.record->name);

    auto count_with = [&](const std::map<std::string, int>& assign) {
        std::map<int, long> c;
        for (int k : keys) c[k] = 0;
        for (auto& p : rep.parameters) {
            if (!t.signed_counts()) { ++c[0]; continue; }
            int s = p.sign();
            for (auto& sm : p.summands)
                if (sm.record && assign.count(sm.record->name)) s = assign.at(sm.record->name);
            if (s) ++c[s];
        }
        return c;
    };
    auto matches = [&](const std::map<int, long>& c) {
        for (int k : keys) {
            if (exact && c.at(k) != rep.expected.at(k)) return false;
            if (!exact && c.at(k) > rep.expected.at(k)) return false;
        }
        return true;
    };

    if (!unknown.empty() && unknown.size() <= 10) {
        std::vector<std::map<std::string, int>> ok;
        for (unsigned mask = 0; mask < (1u << unknown.size()); ++mask) {
            std::map<std::string, int> a;
            for (std::size_t i = 0; i < unknown.size(); ++i) a[unknown[i]] = (mask >> i) & 1 ? -1 : 1;
            if (matches(count_with(a))) ok.push_back(a);
        }
        if (ok.size() == 1 && exact) rep.inferred_signs = ok[0];
        rep.enumerated = count_with(rep.inferred_signs);
        if (ok.empty()) rep.consistent = false;
    } else {
        rep.enumerated = count_with({});
    }

    for (int k : keys) {
        long e = rep.expected[k], n = rep.enumerated[k];
        if (n > e) {
            rep.consistent = false;
            for (auto& p : rep.parameters)
                if (!t.signed_counts() || p.sign() == k) rep.surplus.push_back(p.str());
        }
        if (n < e) {
            rep.deficit[k] = e - n;
            if (exact && unknown.empty()) rep.consistent = false;
            else if (!exact) rep.warning = true;
        }
    }
    if (!rep.consistent) rep.status = rep.surplus.empty() ? "deficit" : "surplus";
    else if (!rep.inferred_signs.empty()) rep.status = "sign-inferred";
    else if (!unknown.empty()) rep.status = "sign-undetermined";
    else if (rep.warning) rep.status = "deficit-warning";
    else rep.status = "consistent";
    return rep;
}

}  // namespace explf
