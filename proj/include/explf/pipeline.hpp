#pragma once

#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "arthur.hpp"
#include "candidates.hpp"
#include "elimination.hpp"
#include "registry.hpp"
#include "tables.hpp"

namespace explf {

struct PipelineConfig {
    int weight = 0;
    int conductor = 2;
    std::vector<double> lambda_grid = default_lambda_grid();
    int max_cross = 4;
    std::set<Form> forms = {Form::C, Form::Cs};
    std::optional<std::vector<std::string>> crossing;  // names of knowns to cross with; default: all of weight <= w
    bool report_closest = true;

    void validate() const {
        if (weight < 1) throw std::invalid_argument("weight must be >= 1");
        if (conductor != 1 && prime_factors(conductor) != std::vector<int>{conductor})
            throw std::invalid_argument("conductor must be 1 or a prime");
        if (conductor > 2 && weight % 2 == 0) throw std::invalid_argument("conductor p > 2 supports odd weights only");
        if (lambda_grid.empty()) throw std::invalid_argument("lambda grid is empty");
        for (std::size_t i = 1; i < lambda_grid.size(); ++i)
            if (!(lambda_grid[i] > lambda_grid[i - 1])) throw std::invalid_argument("lambda grid must be increasing");
        if (max_cross < 0) throw std::invalid_argument("max crossing size must be >= 0");
    }
};

// "1:12:0.1" or a comma-separated list.
inline std::vector<double> parse_lambda_grid(const std::string& s) {
    std::vector<double> out;
    auto num = [&](const std::string& t) {
        try {
            std::size_t pos = 0;
            double v = std::stod(t, &pos);
            if (pos != t.size()) throw 0;
            return v;
        } catch (...) {
            throw std::invalid_argument("bad lambda grid '" + s + "'");
        }
    };
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ':')) parts.push_back(tok);
        if (parts.size() != 3) throw std::invalid_argument("lambda grid range must be lo:hi:step");
        double lo = num(parts[0]), hi = num(parts[1]), st = num(parts[2]);
        if (!(st > 0) || hi < lo) throw std::invalid_argument("bad lambda grid range '" + s + "'");
        long n = std::lround((hi - lo) / st);
        for (long k = 0; k <= n; ++k) out.push_back(std::round((lo + k * st) * 1e9) / 1e9);
    } else {
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(num(tok));
    }
    return out;
}

// Step 1

struct Step1Result {
    std::vector<KElement> finiteness;  // pass the finiteness inequality on the grid
    std::vector<KElement> candidates;  // and also J_{F_log2} <= (log p)/2
};

inline Step1Result run_step1(const PipelineConfig& cfg) {
    cfg.validate();
    FinitenessFilter f(cfg.conductor, cfg.lambda_grid, cfg.weight);
    Step1Result r;
    r.finiteness = enumerate_candidates(cfg.weight, cfg.conductor, [&](const KElement& v) { return f.b_test(v); });
    for (auto& v : r.finiteness)
        if (f.j_test(v)) r.candidates.push_back(v);
    return r;
}

// Step 2

struct MultCandidate {
    KElement v;
    long m1 = 0;
    long bound = -1;  // upper bound on m_p(V); -1 when no bound was found
    double bound_lambda = 0;
    bool selfdual_possible = true;
    bool dropped = false;
    std::string note;
};

// Self-dual of conductor p > 1 forces a symplectic type (I) parameter: even rank, odd weight.
inline bool selfdual_possible(const KElement& v, int conductor) {
    if (conductor == 1) return true;
    return v.motivic_weight() % 2 == 1 && v.dim() % 2 == 0;
}

inline MultCandidate multiplicity_bound(const PipelineConfig& cfg, const KElement& v, const Registry& reg) {
    MultCandidate c;
    c.v = v;
    c.m1 = reg.count_with_arch(v, 1);
    c.selfdual_possible = selfdual_possible(v, cfg.conductor);
    for (double l : cfg.lambda_grid) {
        auto tb = taibi_bounds(v, Odlyzko(l), cfg.conductor, c.m1 > 0 ? std::optional<long>(c.m1) : std::nullopt);
        auto b = c.m1 > 0 ? tb.joint : tb.max_m2;
        if (b && (c.bound < 0 || *b < c.bound)) {
            c.bound = *b;
            c.bound_lambda = l;
        }
    }
    std::ostringstream note;
    if (c.bound >= 0) note << "m" << cfg.conductor << "<=" << c.bound << " at lambda=" << c.bound_lambda;
    else note << "no multiplicity bound";
    if (c.bound > 0 && !c.selfdual_possible) {
        long even = parity_constraint(v, c.bound, true);
        if (even != c.bound) note << ", even multiplicity gives " << even;
        c.bound = even;
    }
    c.dropped = c.bound == 0;
    c.note = note.str();
    return c;
}

inline std::vector<MultCandidate> run_step2(const PipelineConfig& cfg, const std::vector<KElement>& cands,
                                            const Registry& reg) {
    std::vector<MultCandidate> out;
    for (auto& v : cands) out.push_back(multiplicity_bound(cfg, v, reg));
    return out;
}

// Step 3

struct EliminationRow {
    std::string candidate;
    std::string test;
    Form form;
    EliminationResult result;
};

struct Step3Entry {
    MultCandidate cand;
    bool eliminated = false;
    long bound = -1;
    std::map<int, bool> sign_forbidden;  // self-dual of that local sign excluded
    std::map<int, bool> sign_at_most_one;
    bool dual_pair_excluded = false;
    std::vector<EliminationRow> rows;

    bool forbidden(int s) const { return sign_forbidden.count(s) && sign_forbidden.at(s); }
    bool at_most_one(int s) const { return sign_at_most_one.count(s) && sign_at_most_one.at(s); }
    // Largest possible number of self-dual representations, -1 when unbounded.
    long selfdual_max() const {
        if (!cand.selfdual_possible) return 0;
        long tot = 0;
        for (int s : {1, -1}) {
            if (forbidden(s)) continue;
            if (at_most_one(s)) { tot += 1; continue; }
            if (bound < 0) return -1;
            tot += bound;
        }
        return bound < 0 ? tot : std::min(tot, bound);
    }
};

inline std::vector<RepRecord> crossing_list(const PipelineConfig& cfg, const Registry& reg) {
    std::vector<RepRecord> out;
    for (auto& r : reg.records()) {
        if (r.conductor != 1 && r.conductor != cfg.conductor) continue;
        if (cfg.crossing) {
            if (std::find(cfg.crossing->begin(), cfg.crossing->end(), r.name) != cfg.crossing->end()) out.push_back(r);
            continue;
        }
        if (r.arch.motivic_weight() <= cfg.weight) out.push_back(r);
    }
    return out;
}

inline RepRecord putative_record(const KElement& v, int conductor, Tri selfdual, int sign) {
    RepRecord r;
    r.arch = v;
    r.rank = static_cast<int>(v.dim());
    r.conductor = conductor;
    r.selfdual = selfdual;
    r.nature = selfdual == Tri::yes ? Nature::symplectic : Nature::unknown;
    r.local_sign = sign;
    r.name = v.str();
    return r;
}

inline Step3Entry eliminate_candidate(const PipelineConfig& cfg, const MultCandidate& c, const Registry& reg) {
    Step3Entry e;
    e.cand = c;
    e.bound = c.bound;
    if (c.dropped) {
        e.eliminated = true;
        return e;
    }
    const auto knowns = crossing_list(cfg, reg);
    const std::string name = c.v.str();
    auto run = [&](const Slot& slot, const std::vector<RepRecord>& ks, Form f, const std::string& test, bool closest) {
        EliminationConfig ec{cfg.lambda_grid, f, cfg.max_cross, closest};
        auto res = eliminate(slot, ks, ec);
        e.rows.push_back({name, test, f, res});
        return res.eliminated;
    };
    const bool use_c = cfg.forms.count(Form::C) > 0;
    const bool use_co = cfg.forms.count(Form::Co) > 0;
    const bool use_cs = cfg.forms.count(Form::Cs) > 0 && cfg.conductor > 1;
    const Form weak = use_c ? Form::C : Form::Co;
    RepRecord put = putative_record(c.v, cfg.conductor, Tri::unknown, 0);

    if (use_c || use_co) {
        if (run(Slot{put}, knowns, weak, "r=1", cfg.report_closest)) {
            e.eliminated = true;
            e.bound = 0;
            return e;
        }
        long hi = e.bound < 0 ? 8 : e.bound;
        for (long r = 2; r <= hi; ++r)
            if (run(Slot{put, static_cast<int>(r)}, knowns, weak, "r=" + std::to_string(r), false)) {
                e.bound = r - 1;
                break;
            }
        if (e.bound > 0 && !c.selfdual_possible) e.bound = parity_constraint(c.v, e.bound, true);
        if (e.bound == 0) {
            e.eliminated = true;
            return e;
        }
    }
    if (!use_cs) return e;

    std::vector<RepRecord> signed_knowns;
    for (auto& k : knowns)
        if (k.conductor == 1 || k.local_sign != 0) signed_knowns.push_back(k);
    if (c.selfdual_possible) {
        for (int s : {1, -1}) {
            RepRecord p = putative_record(c.v, cfg.conductor, Tri::yes, s);
            std::string sg = s > 0 ? "+" : "-";
            e.sign_forbidden[s] = run(Slot{p}, signed_knowns, Form::Cs, "sign " + sg, false);
            if (!e.sign_forbidden[s] && (e.bound < 0 || e.bound >= 2))
                e.sign_at_most_one[s] = run(Slot{p, 2}, signed_knowns, Form::Cs, "r=2 sign " + sg, false);
        }
        if (e.bound >= 0 && e.bound <= 1 && e.forbidden(1) && e.forbidden(-1)) {
            e.eliminated = true;
            e.bound = 0;
            return e;
        }
    }
    if (e.bound < 0 || e.bound >= 2) {
        RepRecord p = putative_record(c.v, cfg.conductor, Tri::no, 0);
        Slot pair{p, 1, true};
        if (run(pair, signed_knowns, Form::Cs, "dual pair", false)) {
            e.dual_pair_excluded = true;
            long sd = e.selfdual_max();
            if (sd >= 0 && (e.bound < 0 || sd < e.bound)) e.bound = sd;
            if (e.bound == 0) e.eliminated = true;
        }
    }
    return e;
}

inline std::vector<Step3Entry> run_step3(const PipelineConfig& cfg, const std::vector<MultCandidate>& cands,
                                         const Registry& reg) {
    cfg.validate();
    std::vector<Step3Entry> out;
    for (auto& c : cands) out.push_back(eliminate_candidate(cfg, c, reg));
    return out;
}

// Step 4

struct Existence {
    KElement v;
    std::string status;  // exists, excluded, open
    long bound = -1;
    long selfdual = 0;
    std::vector<RepRecord> records;
    std::string note;
};

struct Step4Report {
    std::vector<Existence> items;
    std::vector<ReconcileReport> arthur;
    std::vector<std::string> discrepancies;
    bool discrepancy() const { return !discrepancies.empty(); }
};

inline std::string sign_str(int s) { return s > 0 ? "+" : s < 0 ? "-" : "?"; }

inline RepRecord new_record(const KElement& v, int conductor, int sign, const std::string& tag) {
    RepRecord r = putative_record(v, conductor, Tri::yes, sign);
    r.name = record_name("E", v.weights(), sign, tag);
    return r;
}

// Names E_w^s, with letter tags when several records share weights and sign.
inline std::vector<RepRecord> name_records(const KElement& v, int conductor, const std::map<int, long>& per_sign,
                                           const Registry& reg) {
    std::vector<RepRecord> out;
    for (auto [s, n] : per_sign) {
        long existing = 0;
        for (auto& r : reg.records())
            if (r.conductor == conductor && r.arch == v && r.local_sign == s) ++existing;
        long total = existing + n;
        for (long i = 0; i < n; ++i) {
            std::string tag = total > 1 ? std::string(1, char('a' + existing + i)) : "";
            out.push_back(new_record(v, conductor, s, tag));
        }
    }
    return out;
}

inline long count_selfdual(const Registry& reg, const KElement& v, int conductor) {
    long n = 0;
    for (auto& r : reg.records())
        if (r.conductor == conductor && r.arch == v && r.selfdual == Tri::yes) ++n;
    return n;
}

inline std::vector<RepRecord> records_with(const Registry& reg, const KElement& v, int conductor) {
    std::vector<RepRecord> out;
    for (auto& r : reg.records())
        if (r.conductor == conductor && r.arch == v) out.push_back(r);
    return out;
}

inline Step4Report run_step4(const PipelineConfig& cfg, const std::vector<Step3Entry>& survivors, const Registry& reg,
                             const DimensionTables& tables) {
    Step4Report rep;
    Registry work = reg;
    const int p = cfg.conductor;
    std::vector<const Step3Entry*> order;
    for (auto& e : survivors)
        if (!e.eliminated) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->cand.v.dim() < b->cand.v.dim(); });

    auto discrepancy = [&](const std::string& m) { rep.discrepancies.push_back(m); };
    auto check_signs = [&](const Step3Entry& e, const std::map<int, long>& per_sign) {
        for (auto [s, n] : per_sign) {
            if (n > 0 && e.forbidden(s))
                discrepancy(e.cand.v.str() + ": table predicts sign " + sign_str(s) + " forbidden by the explicit formula");
            if (n > 1 && e.at_most_one(s))
                discrepancy(e.cand.v.str() + ": table predicts several of sign " + sign_str(s));
        }
    };
    auto add_all = [&](const std::vector<RepRecord>& recs, Existence& ex) {
        for (auto& r : recs) {
            work.add(r);
            ex.records.push_back(r);
        }
    };

    for (auto* e : order) {
        Existence ex;
        ex.v = e->cand.v;
        ex.bound = e->bound;
        const auto ws = ex.v.weights();
        const bool arch_ok = ex.v.c_triv() == 0 && ex.v.c_eps() == 0 && ex.v.is_regular() && e->cand.selfdual_possible;
        bool counted = false;
        if (arch_ok && p > 1 && ws.size() == 1) {
            GroupTarget t{GroupFamily::SO3, ws, p};
            try {
                std::map<int, long> per;
                for (int s : {1, -1}) {
                    long have = 0;
                    for (auto& r : records_with(work, ex.v, p))
                        if (r.local_sign == s) ++have;
                    per[s] = expected_count(t, tables, s, work) - have;
                    if (per[s] < 0) discrepancy(ex.v.str() + ": more records than the table allows");
                    per[s] = std::max(0L, per[s]);
                }
                check_signs(*e, per);
                add_all(name_records(ex.v, p, per, work), ex);
                rep.arthur.push_back(reconcile(t, work, tables));
                counted = true;
            } catch (const MissingRow& m) {
                ex.note = m.what();
            }
        } else if (arch_ok && p > 1 && ws.size() == 2 && ws[1] > 1 && ws[0] - ws[1] > 2) {
            GroupTarget t{GroupFamily::SO5_split, ws, p};
            try {
                long n = expected_count(t, tables, std::nullopt, work) - static_cast<long>(records_with(work, ex.v, p).size());
                if (n < 0) discrepancy(ex.v.str() + ": more records than the table allows");
                n = std::max(0L, n);
                std::vector<int> allowed;
                for (int s : {1, -1})
                    if (!e->forbidden(s)) allowed.push_back(s);
                std::map<int, long> per;
                long unknown = 0;
                if (n > 0 && allowed.empty()) {
                    discrepancy(ex.v.str() + ": table predicts " + std::to_string(n) + " but both signs are forbidden");
                } else if (n > 0 && allowed.size() == 1) {
                    per[allowed[0]] = n;
                } else if (n == 2 && e->at_most_one(1) && e->at_most_one(-1)) {
                    per[1] = per[-1] = 1;
                } else {
                    unknown = n;
                }
                check_signs(*e, per);
                for (auto& r : name_records(ex.v, p, per, work)) work.add(r);
                std::vector<std::string> pending;
                for (long i = 0; i < unknown; ++i) {
                    RepRecord r = new_record(ex.v, p, 0, unknown > 1 ? std::string(1, char('a' + i)) : "");
                    work.add(r);
                    pending.push_back(r.name);
                }
                rep.arthur.push_back(reconcile(t, work, tables));
                // Signs from compact SO7 tuples pairing this record with a level-one GL2.
                std::set<int> mids;
                for (auto& r : work.records())
                    if (r.conductor == 1 && r.rank == 2 && r.selfdual == Tri::yes) {
                        int b = r.arch.weights()[0];
                        if (b < ws[0] && b > ws[1]) mids.insert(b);
                    }
                for (int b : mids) {
                    if (pending.empty()) break;
                    GroupTarget t7{GroupFamily::SO7_compact, {ws[0], b, ws[1]}, p};
                    if (!tables.so_lattice(7, t7.weights)) continue;
                    auto r7 = reconcile(t7, work, tables);
                    rep.arthur.push_back(r7);
                    for (auto [nm, s] : r7.inferred_signs) {
                        auto it = std::find(pending.begin(), pending.end(), nm);
                        if (it == pending.end()) continue;
                        pending.erase(it);
                        if (e->forbidden(s)) discrepancy(nm + ": inferred sign " + sign_str(s) + " is forbidden by the explicit formula");
                        RepRecord old = *work.find(nm);
                        old.local_sign = s;
                        old.name = record_name("E", ws, s);
                        work.replace(nm, old);
                    }
                }
                for (auto& r : records_with(work, ex.v, p))
                    if (std::none_of(reg.records().begin(), reg.records().end(),
                                     [&](const RepRecord& x) { return x.name == r.name; }))
                        ex.records.push_back(r);
                if (!pending.empty()) ex.note = "local sign undetermined";
                counted = true;
            } catch (const MissingRow& m) {
                ex.note = m.what();
            }
        } else if (arch_ok && p > 1 && ws.size() == 3) {
            GroupTarget t{GroupFamily::SO7_compact, ws, p};
            try {
                auto before = reconcile(t, work, tables);
                std::map<int, long> per;
                for (int s : {1, -1}) per[s] = before.expected[s] - before.enumerated[s];
                if (t.very_regular()) {
                    for (auto [s, n] : per)
                        if (n < 0) discrepancy(ex.v.str() + ": SO7 table has fewer forms than known parameters");
                    for (auto& [s, n] : per) n = std::max(0L, n);
                    check_signs(*e, per);
                    add_all(name_records(ex.v, p, per, work), ex);
                    counted = true;
                } else if (per[1] <= 0 && per[-1] <= 0) {
                    counted = true;
                    ex.note = "regular, not very regular: table already accounted for";
                } else {
                    ex.note = "regular, not very regular: table leaves room";
                }
                rep.arthur.push_back(reconcile(t, work, tables));
            } catch (const MissingRow& m) {
                ex.note = m.what();
            }
        }
        ex.selfdual = count_selfdual(work, ex.v, p);
        if (!counted) {
            ex.status = "open";
            if (ex.note.empty()) ex.note = "outside the Arthur-counting range";
        } else if (e->bound >= 0 && e->bound <= ex.selfdual + 1) {
            ex.status = ex.selfdual > 0 ? "exists" : "excluded";
        } else {
            ex.status = ex.selfdual > 0 ? "exists, open" : "open";
            ex.note = "non-self-dual not excluded";
        }
        if (e->bound >= 0 && ex.selfdual > e->bound)
            discrepancy(ex.v.str() + ": " + std::to_string(ex.selfdual) + " self-dual records exceed the bound " +
                        std::to_string(e->bound));
        rep.items.push_back(std::move(ex));
    }
    for (auto& a : rep.arthur)
        if (!a.consistent && !a.missing_row)
            discrepancy(to_string(a.target.family) + " (" + a.target.weights_str() + "): " + a.status);
    return rep;
}

// Step 5: records of the report not yet present are appended; present names are kept.
inline Registry run_step5(const Step4Report& rep, const Registry& reg) {
    Registry out = reg;
    for (auto& ex : rep.items)
        for (auto& r : ex.records)
            if (!out.contains(r.name)) out.add(r);
    return out;
}

struct PipelineResult {
    Step1Result step1;
    std::vector<MultCandidate> step2;
    std::vector<Step3Entry> step3;
    Step4Report step4;
    Registry updated;
};

inline PipelineResult run_pipeline(const PipelineConfig& cfg, const Registry& reg, const DimensionTables& tables) {
    PipelineResult r;
    r.step1 = run_step1(cfg);
    r.step2 = run_step2(cfg, r.step1.candidates, reg);
    r.step3 = run_step3(cfg, r.step2, reg);
    r.step4 = run_step4(cfg, r.step3, reg, tables);
    r.updated = run_step5(r.step4, reg);
    return r;
}

// Reports

inline std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

inline void write_elimination_report(std::ostream& out, const std::vector<Step3Entry>& entries) {
    out << "candidate\ttest\tform\tlambda\twitness_support\tvalue\tresult\n";
    out << std::setprecision(6);
    for (auto& e : entries)
        for (auto& row : e.rows) {
            std::vector<std::string> supp;
            for (std::size_t i = 0; i < row.result.support.size(); ++i) {
                std::ostringstream s;
                s << row.result.support[i] << ":" << std::setprecision(4) << row.result.weights[i];
                supp.push_back(s.str());
            }
            out << row.candidate << '\t' << row.test << '\t' << to_string(row.form) << '\t';
            if (row.result.support.empty()) out << "-\t-\t-";
            else out << row.result.lambda << '\t' << join(supp, ",") << '\t' << row.result.value;
            out << '\t' << (row.result.eliminated ? "eliminated" : "survives") << '\n';
        }
}

inline void write_arthur_report(std::ostream& out, const std::vector<ReconcileReport>& reps) {
    out << "group\tweights\texpected\tenumerated\tstatus\tinferred_signs\n";
    auto counts = [](const std::map<int, long>& m) {
        std::vector<std::string> parts;
        for (auto it = m.rbegin(); it != m.rend(); ++it)
            parts.push_back((it->first ? sign_str(it->first) + ":" : "") + std::to_string(it->second));
        return parts.empty() ? std::string("-") : join(parts, ",");
    };
    for (auto& r : reps) {
        std::vector<std::string> inf;
        for (auto [n, s] : r.inferred_signs) inf.push_back(n + "=" + sign_str(s));
        std::string status = r.status + (r.target.conjectural() ? " (conjectural)" : "");
        out << to_string(r.target.family) << '\t' << r.target.weights_str() << '\t' << counts(r.expected) << '\t'
            << counts(r.enumerated) << '\t' << status << '\t' << (inf.empty() ? "-" : join(inf, ",")) << '\n';
    }
}

inline void write_existence_report(std::ostream& out, const Step4Report& rep) {
    out << "candidate\tstatus\tm_bound\tselfdual\trecords\tnote\n";
    for (auto& ex : rep.items) {
        std::vector<std::string> names;
        for (auto& r : ex.records) names.push_back(r.name);
        out << ex.v.str() << '\t' << ex.status << '\t' << ex.bound << '\t' << ex.selfdual << '\t'
            << (names.empty() ? "-" : join(names, ",")) << '\t' << (ex.note.empty() ? "-" : ex.note) << '\n';
    }
}

}  // namespace explf
