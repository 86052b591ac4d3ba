// datacheck: exact temporal inference over time-indexed propositional data.
//
// Subcommands:
//   validate   check a dataset file and report its shape
//   query      conditional/marginal probability of timed formulas
//   mle        most likely explanation over an atom family
//   reference  posterior over the stored data sequences
//   bench      linear-scaling measurement on synthetic data
//
// Exit codes: 0 success, 1 query/semantic error, 2 data error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "datacheck/bench.hpp"
#include "datacheck/engine.hpp"
#include "datacheck/oracle.hpp"
#include "datacheck/parser.hpp"
#include "datacheck/temporal.hpp"

namespace {

using nlohmann::ordered_json;

struct common_flags {
    double mu_value = -1.0; // negative means limit mode
    bool split = false;
    bool explain_mfs = false;
    bool self_check = false;
    std::string format = "text";
};

void add_common(CLI::App* cmd, common_flags& f, bool with_mfs = true) {
    cmd->add_option("--mu", f.mu_value, "finite interpretation strength in [0,1]; default is the limit mode")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--split-literals", f.split,
                  "rewrite conjunctions of literals in the condition into separate timed literals");
    if (with_mfs) {
        cmd->add_flag("--explain-mfs", f.explain_mfs,
                      "report the satisfied-count maximum, prime evidence and maximal founded subsets");
    }
    cmd->add_option("--format", f.format, "output format")->check(CLI::IsMember({"text", "json"}));
    cmd->add_flag("--self-check", f.self_check, "verify the result against the brute-force oracle")
        ->group(""); // hidden
}

datacheck::mu mode_of(const common_flags& f) {
    return f.mu_value < 0.0 ? datacheck::mu::limit() : datacheck::mu::finite(f.mu_value);
}

// Load failures are data errors (exit 2); anything thrown later is a
// query/semantic error (exit 1).
datacheck::dataset load_dataset(const std::string& path) {
    try {
        std::ifstream in(path);
        if (!in) {
            throw datacheck::schema_error("cannot open '" + path + "'");
        }
        return datacheck::dataset::load(in);
    } catch (const datacheck::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(2);
    }
}

std::string decimal6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string prob_str(const datacheck::prob& p) {
    if (p.is_exact()) {
        return p.ratio().str() + " = " + decimal6(p.value());
    }
    return decimal6(p.value());
}

ordered_json prob_json(const datacheck::prob& p) {
    ordered_json j;
    if (p.is_exact()) j["rational"] = p.ratio().str();
    j["decimal"] = decimal6(p.value());
    return j;
}

ordered_json mode_json(const common_flags& f) {
    if (f.mu_value < 0.0) return "limit";
    ordered_json j;
    j["mu"] = f.mu_value;
    return j;
}

std::string mode_str(const common_flags& f) {
    if (f.mu_value < 0.0) return "limit";
    std::ostringstream os;
    os << "finite mu=" << f.mu_value;
    return os.str();
}

void emit(const ordered_json& record) { std::cout << record.dump() << "\n"; }

ordered_json mfs_diag_json(const datacheck::dataset& ds, const datacheck::mfs_result& res) {
    ordered_json diag;
    diag["c"] = res.max_count;
    diag["prime_size"] = res.prime_evidence.size();
    ordered_json prime = ordered_json::array();
    for (std::size_t k : res.prime_evidence) prime.push_back(ds.sequence(k).id);
    diag["prime"] = std::move(prime);
    ordered_json subsets = ordered_json::array();
    for (const auto& s : res.subsets) {
        ordered_json items = ordered_json::array();
        for (const auto& item : s) items.push_back(item.str());
        subsets.push_back(std::move(items));
    }
    diag["subsets"] = std::move(subsets);
    return diag;
}

void print_mfs_diag(const datacheck::dataset& ds, const datacheck::mfs_result& res) {
    std::cout << "diagnostics: c=" << res.max_count << " prime_size=" << res.prime_evidence.size()
              << "\n";
    std::cout << "prime evidence:";
    for (std::size_t k : res.prime_evidence) std::cout << " " << ds.sequence(k).id;
    std::cout << "\n";
    for (std::size_t i = 0; i < res.subsets.size(); ++i) {
        std::cout << "S" << (i + 1) << ":";
        for (std::size_t j = 0; j < res.subsets[i].size(); ++j) {
            std::cout << (j ? ", " : " ") << res.subsets[i][j].str();
        }
        std::cout << "\n";
    }
}

// Label a realization step for compact paths: the part of each true atom
// matched by a single '*' in the pattern, or the full atom name.
std::string step_label(const std::string& pattern, const std::string& atom) {
    const auto star = pattern.find('*');
    if (star == std::string::npos || pattern.find('*', star + 1) != std::string::npos) {
        return atom;
    }
    const std::string prefix = pattern.substr(0, star);
    const std::string suffix = pattern.substr(star + 1);
    if (atom.size() >= prefix.size() + suffix.size() &&
        atom.compare(0, prefix.size(), prefix) == 0 &&
        atom.compare(atom.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return atom.substr(prefix.size(), atom.size() - prefix.size() - suffix.size());
    }
    return atom;
}

std::vector<std::string> family_atoms(const datacheck::dataset& ds, const std::string& pattern) {
    std::vector<std::string> out;
    for (const auto& name : ds.vocab().atoms()) {
        if (datacheck::glob_match(pattern, name)) out.push_back(name);
    }
    if (out.empty()) {
        throw datacheck::unknown_atom_error(pattern);
    }
    return out;
}

std::string compact_path(const datacheck::explanation& ex, const std::string& pattern) {
    // compact form only when every step has exactly one true family atom
    std::vector<std::string> labels;
    for (const auto& step : ex.path) {
        std::string found;
        int trues = 0;
        for (std::size_t a = 0; a < step.size(); ++a) {
            if (step[a]) {
                ++trues;
                found = ex.family[a];
            }
        }
        if (trues != 1) return {};
        labels.push_back(step_label(pattern, found));
    }
    std::string out = "(";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += labels[i];
    }
    out += ")";
    return out;
}

int run_validate(const std::string& path) {
    const datacheck::dataset ds = load_dataset(path);
    std::cout << "K=" << ds.size() << " T=" << ds.horizon() << " atoms=" << ds.vocab().size()
              << " models=" << ds.models().size() << " OK\n";
    return 0;
}

void self_check_scalar(const datacheck::dataset& ds, const datacheck::condition& target,
                       const datacheck::condition& given, const common_flags& flags,
                       const datacheck::prob& got) {
    const double mu_value = flags.mu_value < 0.0 ? 1.0 - 1e-8 : flags.mu_value;
    const double tol = flags.mu_value < 0.0 ? 1e-5 : 1e-9;
    const long double want = datacheck::oracle_conditional(ds, target, given, mu_value);
    if (std::abs(static_cast<double>(want) - got.value()) > tol) {
        throw datacheck::error("self-check failed: oracle disagrees");
    }
    std::cout << "self-check: ok\n";
}

int run_query(const std::string& path, const std::string& query_text, const common_flags& flags) {
    const datacheck::dataset ds = load_dataset(path);
    datacheck::parsed_query q = datacheck::parse_query(query_text);
    if (flags.split) q.given = datacheck::split_literals(q.given);
    const datacheck::mu m = mode_of(flags);

    ordered_json record;
    record["query"] = q.text;
    record["mode"] = mode_json(flags);

    if (q.has_family) {
        const auto family = family_atoms(ds, q.family_pattern);
        const auto dist = datacheck::distribution(ds, family, q.family_time, q.given, m);
        if (flags.format == "json") {
            ordered_json entries = ordered_json::array();
            for (const auto& [name, p] : dist) {
                ordered_json e;
                e["atom"] = name;
                const ordered_json pj = prob_json(p);
                for (auto it = pj.begin(); it != pj.end(); ++it) e[it.key()] = it.value();
                entries.push_back(std::move(e));
            }
            record["result"] = {{"type", "distribution"}, {"entries", std::move(entries)}};
            if (flags.explain_mfs) record["diagnostics"] = mfs_diag_json(ds, datacheck::mfs(ds, q.given));
            emit(record);
        } else {
            std::cout << "query: " << q.text << "\n";
            std::cout << "mode: " << mode_str(flags) << "\n";
            for (const auto& [name, p] : dist) {
                std::cout << name << " " << prob_str(p) << "\n";
            }
            if (flags.explain_mfs) print_mfs_diag(ds, datacheck::mfs(ds, q.given));
        }
        if (flags.self_check) {
            for (const auto& [name, p] : dist) {
                datacheck::condition one{{datacheck::formula::make_atom(name), q.family_time}};
                self_check_scalar(ds, one, q.given, flags, p);
            }
        }
        return 0;
    }

    const datacheck::prob p = datacheck::conditional(ds, q.target, q.given, m);
    if (flags.format == "json") {
        record["result"] = {{"type", "scalar"}};
        const ordered_json pj = prob_json(p);
        for (auto it = pj.begin(); it != pj.end(); ++it) record["result"][it.key()] = it.value();
        if (flags.explain_mfs) record["diagnostics"] = mfs_diag_json(ds, datacheck::mfs(ds, q.given));
        emit(record);
    } else {
        std::cout << "query: " << q.text << "\n";
        std::cout << "mode: " << mode_str(flags) << "\n";
        std::cout << "p = " << prob_str(p) << "\n";
        if (flags.explain_mfs) print_mfs_diag(ds, datacheck::mfs(ds, q.given));
    }
    if (flags.self_check) self_check_scalar(ds, q.target, q.given, flags, p);
    return 0;
}

int run_mle(const std::string& path, const std::string& atoms_pattern, int last_time,
            const std::string& cond_text, const common_flags& flags) {
    const datacheck::dataset ds = load_dataset(path);
    datacheck::condition given = datacheck::parse_condition(cond_text);
    if (flags.split) given = datacheck::split_literals(given);

    std::vector<std::string> family;
    std::stringstream pats(atoms_pattern);
    std::string pat;
    while (std::getline(pats, pat, ',')) {
        for (const auto& name : family_atoms(ds, pat)) family.push_back(name);
    }
    std::vector<int> times;
    for (int t = 1; t <= last_time; ++t) times.push_back(t);

    const datacheck::explanation ex =
        datacheck::explain(ds, family, times, given, mode_of(flags));
    const std::string compact = compact_path(ex, atoms_pattern);

    if (flags.format == "json") {
        ordered_json record;
        record["atoms"] = atoms_pattern;
        record["times"] = ex.times;
        record["condition"] = cond_text;
        record["mode"] = mode_json(flags);
        if (!compact.empty()) record["path"] = compact;
        ordered_json steps = ordered_json::array();
        for (std::size_t i = 0; i < ex.times.size(); ++i) {
            ordered_json step;
            step["time"] = ex.times[i];
            ordered_json assign = ordered_json::array();
            for (std::size_t a = 0; a < ex.family.size(); ++a) {
                if (ex.path[i][a]) assign.push_back(ex.family[a]);
            }
            step["true_atoms"] = std::move(assign);
            steps.push_back(std::move(step));
        }
        record["realization"] = std::move(steps);
        record["probability"] = prob_json(ex.probability);
        record["score"] = ex.score;
        record["ties"] = ex.ties.size();
        emit(record);
    } else {
        std::cout << "atoms: " << atoms_pattern << "  times: 1.." << last_time << "\n";
        std::cout << "mode: " << mode_str(flags) << "\n";
        if (!compact.empty()) {
            std::cout << "path: " << compact << "\n";
        } else {
            for (std::size_t i = 0; i < ex.times.size(); ++i) {
                std::cout << "t=" << ex.times[i] << ":";
                for (std::size_t a = 0; a < ex.family.size(); ++a) {
                    std::cout << " " << ex.family[a] << "=" << int(ex.path[i][a]);
                }
                std::cout << "\n";
            }
        }
        std::cout << "p = " << prob_str(ex.probability) << "\n";
        std::cout << "ties: " << ex.ties.size() << "\n";
        if (ex.ties.size() > 1) {
            for (const auto& alt : ex.ties) {
                datacheck::explanation tmp = ex;
                tmp.path = alt;
                const std::string c = compact_path(tmp, atoms_pattern);
                std::cout << "  " << (c.empty() ? std::string("(verbose tie)") : c) << "\n";
            }
        }
    }
    return 0;
}

int run_reference(const std::string& path, const std::string& cond_text,
                  const common_flags& flags) {
    const datacheck::dataset ds = load_dataset(path);
    datacheck::condition given = datacheck::parse_condition(cond_text);
    if (flags.split) given = datacheck::split_literals(given);
    const auto post = datacheck::reference(ds, given, mode_of(flags));

    if (flags.format == "json") {
        ordered_json record;
        record["condition"] = cond_text;
        record["mode"] = mode_json(flags);
        ordered_json entries = ordered_json::array();
        for (std::size_t k = 0; k < post.size(); ++k) {
            ordered_json e;
            e["id"] = ds.sequence(k).id;
            const ordered_json pj = prob_json(post[k]);
            for (auto it = pj.begin(); it != pj.end(); ++it) e[it.key()] = it.value();
            entries.push_back(std::move(e));
        }
        record["result"] = std::move(entries);
        if (flags.explain_mfs) record["diagnostics"] = mfs_diag_json(ds, datacheck::mfs(ds, given));
        emit(record);
    } else {
        std::cout << "condition: " << (cond_text.empty() ? "(empty)" : cond_text) << "\n";
        std::cout << "mode: " << mode_str(flags) << "\n";
        for (std::size_t k = 0; k < post.size(); ++k) {
            std::cout << ds.sequence(k).id << " " << prob_str(post[k]) << "\n";
        }
        if (flags.explain_mfs) print_mfs_diag(ds, datacheck::mfs(ds, given));
    }
    if (flags.self_check) {
        const double mu_value = flags.mu_value < 0.0 ? 1.0 - 1e-8 : flags.mu_value;
        const double tol = flags.mu_value < 0.0 ? 1e-5 : 1e-9;
        const auto want = datacheck::oracle_posterior(ds, given, mu_value);
        for (std::size_t k = 0; k < post.size(); ++k) {
            if (std::abs(static_cast<double>(want[k]) - post[k].value()) > tol) {
                throw datacheck::error("self-check failed: oracle disagrees");
            }
        }
        std::cout << "self-check: ok\n";
    }
    return 0;
}

int run_bench(std::vector<std::size_t> k_values, std::size_t atoms, std::size_t horizon,
              std::size_t reps, bool with_model_checking) {
    if (with_model_checking && atoms > 12) {
        throw datacheck::cap_exceeded("model-checking comparison needs <= 12 atoms");
    }
    if (k_values.empty()) k_values = {10000, 20000, 40000};
    std::sort(k_values.begin(), k_values.end());
    const auto rows = datacheck::run_scaling(k_values, atoms, horizon, reps);

    std::printf("%10s %16s %14s\n", "K", "mean query (us)", "time/K (ns)");
    for (const auto& r : rows) {
        std::printf("%10zu %16.2f %14.2f\n", r.sequence_count, r.mean_query_seconds * 1e6,
                    r.per_datum_ns);
    }
    bool ok = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double drift =
            std::abs(rows[i].per_datum_ns - rows[i - 1].per_datum_ns) / rows[i - 1].per_datum_ns;
        std::printf("K %zu -> %zu: time/K drift %.1f%%\n", rows[i - 1].sequence_count,
                    rows[i].sequence_count, drift * 100.0);
        if (drift >= 0.25) ok = false;
    }
    std::printf("linear scaling: %s\n", ok ? "ok" : "VIOLATED");

    if (with_model_checking) {
        std::printf("\n%8s %20s %20s\n", "atoms", "model check (us)", "data check (us)");
        const std::size_t K = 2000;
        std::vector<double> mc_times, dc_times;
        for (std::size_t a : {std::size_t(8), std::size_t(10), std::size_t(12)}) {
            const datacheck::dataset ds = datacheck::synth_dataset(K, a, horizon, 20240002);
            const datacheck::formula_ptr f = datacheck::formula::make_atom("x1");
            const datacheck::condition target{{f, 1}};
            const double mc = datacheck::time_seconds(
                [&] {
                    volatile long long sink =
                        datacheck::marginal_by_model_checking(ds, *f, 1).num();
                    (void)sink;
                },
                reps);
            const double dc = datacheck::time_seconds(
                [&] {
                    volatile long long sink =
                        datacheck::marginal_by_data_checking(ds, target).num();
                    (void)sink;
                },
                reps);
            mc_times.push_back(mc);
            dc_times.push_back(dc);
            std::printf("%8zu %20.2f %20.2f\n", a, mc * 1e6, dc * 1e6);
        }
        const bool mc_grows = mc_times.back() > mc_times.front() * 4.0;
        const bool dc_flat = dc_times.back() < dc_times.front() * 2.0;
        std::printf("model checking grows with 2^atoms: %s\n", mc_grows ? "ok" : "VIOLATED");
        std::printf("data checking independent of atoms: %s\n", dc_flat ? "ok" : "VIOLATED");
        ok = ok && mc_grows && dc_flat;
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact temporal inference over time-indexed propositional data"};
    app.require_subcommand(1);

    std::string path, query_text, cond_text, atoms_pattern;
    int last_time = 1;
    common_flags flags;

    auto* validate = app.add_subcommand("validate", "check a dataset file");
    validate->add_option("path", path, "dataset file")->required();

    auto* query = app.add_subcommand("query", "P( target | condition )");
    query->add_option("path", path, "dataset file")->required();
    query->add_option("query", query_text, "query text, e.g. \"P(w@3 | r@3)\"")->required();
    add_common(query, flags);

    auto* mle = app.add_subcommand("mle", "most likely explanation");
    mle->add_option("path", path, "dataset file")->required();
    mle->add_option("--atoms", atoms_pattern, "atom family pattern, e.g. \"L_*\"")->required();
    mle->add_option("--times", last_time, "explain times 1..t")->required();
    mle->add_option("--cond", cond_text, "condition text");
    add_common(mle, flags, false);

    auto* reference = app.add_subcommand("reference", "posterior over data sequences");
    reference->add_option("path", path, "dataset file")->required();
    reference->add_option("--cond", cond_text, "condition text");
    add_common(reference, flags);

    std::vector<std::size_t> k_values;
    std::size_t bench_atoms = 10, bench_horizon = 3, bench_reps = 9;
    bool with_model_checking = false;
    auto* bench = app.add_subcommand("bench", "scaling measurement on synthetic data");
    bench->add_option("--k-values", k_values, "sequence counts to measure");
    bench->add_option("--atoms", bench_atoms, "synthetic vocabulary size");
    bench->add_option("--horizon", bench_horizon, "synthetic horizon T");
    bench->add_option("--reps", bench_reps, "repetitions per measurement");
    bench->add_flag("--model-check", with_model_checking, "also time the model-checking route");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) return run_validate(path);
        if (query->parsed()) return run_query(path, query_text, flags);
        if (mle->parsed()) return run_mle(path, atoms_pattern, last_time, cond_text, flags);
        if (reference->parsed()) return run_reference(path, cond_text, flags);
        if (bench->parsed())
            return run_bench(k_values, bench_atoms, bench_horizon, bench_reps, with_model_checking);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
