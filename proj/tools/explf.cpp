#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "explf/pipeline.hpp"

#ifndef EXPLF_DATA_DIR
#define EXPLF_DATA_DIR "data"
#endif

using namespace explf;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDiscrepancy = 2;

struct Common {
    std::string data_dir = EXPLF_DATA_DIR;
    std::string knowns;
    std::vector<std::string> registries;
    std::string lambda_grid;
    std::string out;
};

struct RunOptions {
    int weight = 0;
    int conductor = 2;
    std::vector<std::string> forms = {"C", "Cs"};
    int max_cross = 4;
    std::vector<std::string> crossing;
};

Registry load_all(const Common& c) {
    std::string knowns = c.knowns.empty() ? (fs::path(c.data_dir) / "knowns_cond1.tsv").string() : c.knowns;
    Registry reg = load_registry(knowns);
    for (auto& path : c.registries) {
        Registry extra = load_registry(path);
        for (auto& r : extra.records())
            if (!reg.contains(r.name)) reg.add(r);
    }
    return reg;
}

PipelineConfig make_config(const Common& c, const RunOptions& o) {
    PipelineConfig cfg;
    cfg.weight = o.weight;
    cfg.conductor = o.conductor;
    if (!c.lambda_grid.empty()) cfg.lambda_grid = parse_lambda_grid(c.lambda_grid);
    cfg.max_cross = o.max_cross;
    cfg.forms.clear();
    for (auto& f : o.forms) cfg.forms.insert(parse_form(f));
    if (!o.crossing.empty()) cfg.crossing = o.crossing;
    cfg.validate();
    return cfg;
}

// Writes to --out (a file) or stdout.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw DataError("cannot write " + path);
    }
    std::ostream& get() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_step1(std::ostream& out, const Step1Result& r) {
    out << "candidate\tdim\tstage\n";
    for (auto& v : r.finiteness) {
        bool kept = std::find(r.candidates.begin(), r.candidates.end(), v) != r.candidates.end();
        out << v.str() << '\t' << v.dim() << '\t' << (kept ? "candidate" : "finiteness-only") << '\n';
    }
}

void write_step2(std::ostream& out, const std::vector<MultCandidate>& cs) {
    out << "candidate\tm1\tm_bound\tlambda\tselfdual_possible\tresult\tnote\n";
    for (auto& c : cs)
        out << c.v.str() << '\t' << c.m1 << '\t' << c.bound << '\t' << c.bound_lambda << '\t'
            << (c.selfdual_possible ? "yes" : "no") << '\t' << (c.dropped ? "dropped" : "kept") << '\t' << c.note
            << '\n';
}

std::vector<GroupTarget> table_targets(GroupFamily fam, const DimensionTables& t, int conductor, int max_weight) {
    std::vector<GroupTarget> out;
    auto push = [&](std::vector<int> ws) {
        if (ws.empty() || ws[0] > max_weight) return;
        out.push_back({fam, ws, conductor});
    };
    switch (fam) {
        case GroupFamily::SO3:
            for (auto& [key, row] : t.gamma0)
                if (row.p == conductor) push({row.k - 1});
            break;
        case GroupFamily::SO5_split:
            for (auto& [key, row] : t.siegel) push({row.w, row.v});
            break;
        case GroupFamily::SO7_compact:
        case GroupFamily::SO9_compact:
        case GroupFamily::SO5_case3: {
            int m = fam == GroupFamily::SO7_compact ? 7 : fam == GroupFamily::SO9_compact ? 9 : 5;
            for (auto& [key, row] : t.so)
                if (row.m == m) push(row.weights);
            break;
        }
    }
    return out;
}

bool has_discrepancy(const std::vector<ReconcileReport>& reps) {
    for (auto& r : reps)
        if (!r.consistent) return true;
    return false;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--data-dir", c.data_dir, "directory holding the dimension tables and knowns");
    sub->add_option("--knowns", c.knowns, "conductor-1 knowns file (default: <data-dir>/knowns_cond1.tsv)");
    sub->add_option("--registry", c.registries, "additional registry files")->check(CLI::ExistingFile);
    sub->add_option("--lambda-grid", c.lambda_grid, "lo:hi:step or comma list (default 1:12:0.1)");
    sub->add_option("--out", c.out, "output file (default stdout)");
}

void add_run(CLI::App* sub, RunOptions& o) {
    sub->add_option("--weight", o.weight, "motivic weight")->required()->check(CLI::PositiveNumber);
    sub->add_option("--conductor", o.conductor, "1 or a prime");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explicit-formula classification of algebraic automorphic representations"};
    app.require_subcommand(1);
    Common common;
    RunOptions run;
    std::string group = "so7c2";
    std::string weights;
    int max_weight = 19;

    auto* enumerate = app.add_subcommand("enumerate", "step 1: candidate archimedean parameters");
    add_common(enumerate, common);
    add_run(enumerate, run);

    auto* multiplicity = app.add_subcommand("multiplicity", "steps 1-2: multiplicity bounds");
    add_common(multiplicity, common);
    add_run(multiplicity, run);

    auto* eliminate_cmd = app.add_subcommand("eliminate", "steps 1-3: elimination report");
    add_common(eliminate_cmd, common);
    add_run(eliminate_cmd, run);
    eliminate_cmd->add_option("--form", run.forms, "co, c and/or cs");
    eliminate_cmd->add_option("--max-cross", run.max_cross, "largest crossing subset")->check(CLI::NonNegativeNumber);
    eliminate_cmd->add_option("--cross-with", run.crossing, "names of known records to cross with");

    auto* arthur = app.add_subcommand("arthur", "reconcile Arthur parameters with the dimension tables");
    add_common(arthur, common);
    arthur->add_option("--group", group, "so3, so5, so7c2, so9c2 or so5c3");
    arthur->add_option("--weights", weights, "comma-separated weights (default: every table row)");
    arthur->add_option("--conductor", run.conductor, "1 or a prime");
    arthur->add_option("--max-weight", max_weight, "largest leading weight for table rows");

    auto* pipeline = app.add_subcommand("pipeline", "steps 1-5 for one weight");
    add_common(pipeline, common);
    add_run(pipeline, run);
    pipeline->add_option("--form", run.forms, "co, c and/or cs");
    pipeline->add_option("--max-cross", run.max_cross, "largest crossing subset")->check(CLI::NonNegativeNumber);
    pipeline->add_option("--cross-with", run.crossing, "names of known records to cross with");

    auto* tables = app.add_subcommand("tables", "dimension table utilities");
    auto* check = tables->add_subcommand("check", "reconcile every table row with the registry");
    tables->require_subcommand(1);
    add_common(check, common);
    check->add_option("--conductor", run.conductor, "1 or a prime");
    check->add_option("--max-weight", max_weight, "largest leading weight for table rows");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitError;
    }

    try {
        std::unique_ptr<Output> out;
        if (!*pipeline) out = std::make_unique<Output>(common.out);
        std::ostream& os = out ? out->get() : std::cout;
        if (*enumerate) {
            auto cfg = make_config(common, run);
            write_step1(os, run_step1(cfg));
            return kExitOk;
        }
        if (*multiplicity) {
            auto cfg = make_config(common, run);
            auto reg = load_all(common);
            write_step2(os, run_step2(cfg, run_step1(cfg).candidates, reg));
            return kExitOk;
        }
        if (*eliminate_cmd) {
            auto cfg = make_config(common, run);
            auto reg = load_all(common);
            auto s2 = run_step2(cfg, run_step1(cfg).candidates, reg);
            write_elimination_report(os, run_step3(cfg, s2, reg));
            return kExitOk;
        }
        if (*arthur || *check) {
            auto reg = load_all(common);
            auto t = load_dimension_tables(common.data_dir);
            std::vector<GroupFamily> fams;
            if (*arthur) fams.push_back(parse_group(group));
            else fams = {GroupFamily::SO3, GroupFamily::SO5_split, GroupFamily::SO7_compact, GroupFamily::SO9_compact};
            std::vector<ReconcileReport> reps;
            for (auto fam : fams) {
                std::vector<GroupTarget> targets;
                if (*arthur && !weights.empty()) targets.push_back({fam, parse_weight_list(weights, "--weights"), run.conductor});
                else targets = table_targets(fam, t, run.conductor, max_weight);
                for (auto& tg : targets) {
                    tg.validate();
                    reps.push_back(reconcile(tg, reg, t));
                }
            }
            write_arthur_report(os, reps);
            return has_discrepancy(reps) ? kExitDiscrepancy : kExitOk;
        }
        if (*pipeline) {
            auto cfg = make_config(common, run);
            auto reg = load_all(common);
            auto t = load_dimension_tables(common.data_dir);
            auto r = run_pipeline(cfg, reg, t);
            if (common.out.empty() || common.out == "-") {
                write_elimination_report(std::cout, r.step3);
                std::cout << '\n';
                write_existence_report(std::cout, r.step4);
                std::cout << '\n';
                write_arthur_report(std::cout, r.step4.arthur);
                std::cout << '\n';
                write_registry(std::cout, r.updated);
            } else {
                fs::path dir(common.out);
                fs::create_directories(dir);
                std::ofstream e(dir / "elimination.tsv"), x(dir / "existence.tsv"), a(dir / "arthur.tsv"),
                    g(dir / "registry.tsv");
                if (!e || !x || !a || !g) throw DataError("cannot write reports in " + dir.string());
                write_elimination_report(e, r.step3);
                write_existence_report(x, r.step4);
                write_arthur_report(a, r.step4.arthur);
                write_registry(g, r.updated);
            }
            for (auto& d : r.step4.discrepancies) std::cerr << "discrepancy: " << d << '\n';
            return r.step4.discrepancy() ? kExitDiscrepancy : kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
