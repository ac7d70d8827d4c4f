// dcs: post-hoc class/sample-level correction of classifier probabilities.
//
// Subcommands: optimize, apply, compare, report, oracle, synth.
// Exit codes: 0 ok, 2 validation error, 3 solver precondition, 4 I/O.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcs/annealer.hpp"
#include "dcs/dataset.hpp"
#include "dcs/error.hpp"
#include "dcs/oracle.hpp"
#include "dcs/pipeline.hpp"
#include "dcs/scheme.hpp"
#include "dcs/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct SolverFlags {
    std::string input;
    std::string format;
    std::string mode = "dcs";
    std::string objective = "full";
    double beta = 1.0;
    double tau = 1.0;
    dcs::AnnealConfig anneal;
    std::optional<std::uint64_t> seed;
    double dev_fraction = 0.05;
    std::string catalog;
    std::string out = ".";
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f, bool single_input)
{
    if (single_input) cmd->add_option("--input", f.input, "Labelled probability dataset")->required();
    cmd->add_option("--format", f.format, "csv or json (default: from extension)");
    cmd->add_option("--objective", f.objective, "full, err or err+pmi");
    cmd->add_option("--beta", f.beta, "COBias weight");
    cmd->add_option("--tau", f.tau, "PMI weight");
    cmd->add_option("--init-temp", f.anneal.initial_temperature, "Initial temperature");
    cmd->add_option("--alpha", f.anneal.cooling_rate, "Geometric cooling rate");
    cmd->add_option("--lambda1", f.anneal.lambda1, "Accepted-solutions multiplier");
    cmd->add_option("--lambda2", f.anneal.lambda2, "Generated-solutions multiplier");
    cmd->add_option("--min-temp", f.anneal.min_temperature, "Stopping temperature");
    cmd->add_option("--max-outer", f.anneal.max_outer_loops, "Maximum outer loops");
    cmd->add_option("--dev-fraction", f.dev_fraction, "Fraction held out as the dev set");
    cmd->add_option("--catalog", f.catalog, "Function catalog JSON (default: built-in 19 + 30)");
    cmd->add_option("--out", f.out, "Output directory");
}

dcs::LabeledDataset load(const std::string& path, const std::string& format)
{
    const auto fmt = format.empty() ? dcs::format_from_path(path) : dcs::format_from_string(format);
    return dcs::load_dataset(path, fmt);
}

dcs::OptimizeOptions options_from(const SolverFlags& f)
{
    dcs::OptimizeOptions o;
    o.mode = dcs::mode_from_string(f.mode);
    o.objective = dcs::objective_mode_from_string(f.objective);
    o.beta = f.beta;
    o.tau = f.tau;
    o.anneal = f.anneal;
    if (f.seed) o.anneal.seed = *f.seed;
    o.dev_fraction = f.dev_fraction;
    if (!f.catalog.empty()) o.catalog = dcs::function_set_from_json(dcs::read_text_file(f.catalog));
    o.weights(); // validates beta/tau/objective
    o.anneal.validate();
    return o;
}

fs::path ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw dcs::IoError("cannot create output directory '" + dir + "': " + ec.message());
    return fs::path(dir);
}

void print_report_line(const char* label, const dcs::EvalReport& r)
{
    std::printf("  %-22s acc=%.4f  cobias=%s  z=%.6f\n", label, r.overall_accuracy,
                r.cobias ? std::to_string(*r.cobias).c_str() : "n/a", r.terms.z);
}

int cmd_optimize(const SolverFlags& f)
{
    const auto ds = load(f.input, f.format);
    const auto opts = options_from(f);
    const auto out = dcs::run_optimize(ds, opts);
    const auto dir = ensure_dir(f.out);

    dcs::save_scheme(out.scheme, dir / "scheme.json");
    const dcs::TraceFile trace{fs::path(f.input).stem().string(), ds.num_classes(),
                               static_cast<int>(opts.catalog.domain(opts.mode).size()), out.solve};
    dcs::write_text_file(dir / "solve.json", dcs::trace_file_to_json(trace));
    dcs::write_text_file(dir / "trace.csv", dcs::trace_to_csv(out.solve));
    dcs::write_text_file(dir / "report_optimization.json", out.optimization.to_json());
    dcs::write_text_file(dir / "report_optimization.csv", out.optimization.to_csv());
    dcs::write_text_file(dir / "report_dev.json", out.dev.to_json());
    dcs::write_text_file(dir / "report_dev.csv", out.dev.to_csv());
    dcs::write_text_file(dir / "report_dev_raw.json", out.raw_dev.to_json());

    std::printf("optimized %s: mode=%s objective=%s N=%d M_opt=%d M_dev=%d\n", f.input.c_str(), f.mode.c_str(),
                f.objective.c_str(), ds.num_classes(), out.split.optimization_set.num_instances(),
                out.split.dev_set.num_instances());
    std::printf("  best_z=%.9f outer_loops=%d evaluations=%ld wall=%.3fs\n", out.solve.best_z,
                out.solve.outer_loops_run, out.solve.evaluations, out.solve.wall_time);
    std::printf("  xi =");
    for (int k : out.solve.best_xi.values()) std::printf(" %d", k);
    std::printf("\n");
    print_report_line("raw optimization", out.raw_optimization);
    print_report_line("corrected optimization", out.optimization);
    print_report_line("raw dev", out.raw_dev);
    print_report_line("corrected dev", out.dev);
    return 0;
}

int cmd_apply(const std::string& scheme_path, const std::string& input, const std::string& format,
              const std::string& subset, const std::string& out_dir)
{
    const auto scheme = dcs::load_scheme(scheme_path);
    const auto ds = dcs::select_subset(scheme, load(input, format), dcs::subset_from_string(subset));
    const auto preds = dcs::apply_scheme(scheme, ds);
    const auto report = dcs::evaluate_scheme(scheme, ds);
    const auto dir = ensure_dir(out_dir);
    dcs::save_predictions(ds, preds, dir / "predictions.csv");
    dcs::write_text_file(dir / "report.json", report.to_json());
    dcs::write_text_file(dir / "report.csv", report.to_csv());
    std::printf("applied %s to %s (%s, M=%d)\n", scheme_path.c_str(), input.c_str(), subset.c_str(),
                ds.num_instances());
    print_report_line("corrected", report);
    std::fputs(report.to_csv().c_str(), stdout);
    return 0;
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int cmd_compare(const SolverFlags& f, const std::vector<std::string>& inputs, const std::vector<std::string>& tests,
                const std::string& modes, const std::vector<std::uint64_t>& seeds)
{
    if (!tests.empty() && tests.size() != inputs.size())
        throw dcs::ValidationError("--test must be given once per --input");
    std::vector<dcs::CompareInput> cells;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        dcs::CompareInput in{fs::path(inputs[i]).stem().string(), load(inputs[i], f.format), std::nullopt};
        if (!tests.empty()) in.test = load(tests[i], f.format);
        cells.push_back(std::move(in));
    }
    std::vector<dcs::CorrectionMode> mode_list;
    for (const auto& m : split_list(modes)) mode_list.push_back(dcs::mode_from_string(m));

    const auto rows = dcs::run_compare(cells, mode_list, seeds, options_from(f), dcs::threads_from_env());
    const auto dir = ensure_dir(f.out);
    dcs::write_text_file(dir / "compare_runs.csv", dcs::compare_runs_csv(rows));
    const auto summary = dcs::compare_summary_csv(rows);
    dcs::write_text_file(dir / "compare_summary.csv", summary);
    std::fputs(summary.c_str(), stdout);
    return 0;
}

int cmd_report(const std::vector<std::string>& traces, const std::string& out)
{
    std::vector<dcs::TraceFile> files;
    for (const auto& t : traces) files.push_back(dcs::trace_file_from_json(dcs::read_text_file(t)));
    const auto csv = dcs::annealing_report_csv(files);
    if (out.empty()) std::fputs(csv.c_str(), stdout);
    else dcs::write_text_file(out, csv);
    return 0;
}

int cmd_oracle(const SolverFlags& f, long limit)
{
    const auto ds = load(f.input, f.format);
    const auto opts = options_from(f);
    const auto split = dcs::split_dataset(ds, opts.dev_fraction, opts.anneal.seed);
    const auto domain = opts.catalog.domain(opts.mode);
    const auto res = dcs::exhaustive_search(split.optimization_set, opts.catalog, opts.weights(), limit, domain);
    const auto dir = ensure_dir(f.out);
    const nlohmann::json j{{"best_xi", res.best_xi.values()},
                           {"best_z", res.best_z},
                           {"num_evaluated", res.num_evaluated},
                           {"ties", res.ties}};
    dcs::write_text_file(dir / "oracle.json", j.dump(2));
    std::printf("oracle: best_z=%.9f evaluated=%ld ties=%ld xi =", res.best_z, res.num_evaluated, res.ties);
    for (int k : res.best_xi.values()) std::printf(" %d", k);
    std::printf("\n");
    return 0;
}

int cmd_synth(const std::string& profile, int m, std::optional<std::uint64_t> seed, const std::string& out)
{
    dcs::BiasProfile p = fs::path(profile).extension() == ".json"
                             ? dcs::profile_from_json(dcs::read_text_file(profile))
                             : dcs::standard_profile(profile);
    if (seed) p.seed = *seed;
    const auto ds = dcs::generate(p, m);
    dcs::save_dataset_csv(ds, out);
    std::printf("wrote %s: profile %s, M=%d, N=%d\n", out.c_str(), p.name.c_str(), ds.num_instances(),
                ds.num_classes());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Post-hoc class- and sample-level debiasing of classifier probabilities"};
    app.require_subcommand(1);

    SolverFlags opt_flags;
    auto* optimize = app.add_subcommand("optimize", "Anneal a correction scheme on a labelled dataset");
    add_solver_flags(optimize, opt_flags, true);
    optimize->add_option("--mode", opt_flags.mode, "dcs, dnip or furud");
    optimize->add_option("--seed", opt_flags.seed, "Seed for the split and the annealer")->required();

    std::string scheme_path, apply_input, apply_format, apply_subset = "all", apply_out = ".";
    auto* apply = app.add_subcommand("apply", "Apply a saved scheme and score it");
    apply->add_option("--scheme", scheme_path, "Scheme JSON")->required();
    apply->add_option("--input", apply_input, "Dataset to correct")->required();
    apply->add_option("--format", apply_format, "csv or json");
    apply->add_option("--subset", apply_subset, "all, optimization or dev (re-derives the recorded split)");
    apply->add_option("--out", apply_out, "Output directory");

    SolverFlags cmp_flags;
    std::vector<std::string> cmp_inputs, cmp_tests;
    std::string cmp_modes = "dnip,furud,dcs";
    std::vector<std::uint64_t> cmp_seeds;
    auto* compare = app.add_subcommand("compare", "Grid of datasets x modes x seeds");
    add_solver_flags(compare, cmp_flags, false);
    compare->add_option("--input", cmp_inputs, "Datasets (repeatable)")->required();
    compare->add_option("--test", cmp_tests, "Held-out test set per --input (repeatable)");
    compare->add_option("--mode,--modes", cmp_modes, "Comma-separated modes");
    compare->add_option("--seed,--seeds", cmp_seeds, "Seeds (repeatable)")->required()->delimiter(',');

    std::vector<std::string> traces;
    std::string report_out;
    auto* report = app.add_subcommand("report", "Annealing-time table from solve.json traces");
    report->add_option("--trace", traces, "solve.json files (repeatable)")->required();
    report->add_option("--out", report_out, "Output CSV (default stdout)");

    SolverFlags orc_flags;
    long limit = dcs::kDefaultOracleLimit;
    auto* oracle = app.add_subcommand("oracle", "Exhaustive search on the optimisation split");
    add_solver_flags(oracle, orc_flags, true);
    oracle->add_option("--mode", orc_flags.mode, "dcs, dnip or furud");
    oracle->add_option("--seed", orc_flags.seed, "Seed for the split")->required();
    oracle->add_option("--limit", limit, "Maximum number of vectors to enumerate");

    std::string profile, synth_out;
    int synth_m = 3000;
    std::optional<std::uint64_t> synth_seed;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic biased dataset");
    synth->add_option("--profile", profile, "P1..P5 or a profile JSON file")->required();
    synth->add_option("--m", synth_m, "Number of instances");
    synth->add_option("--seed", synth_seed, "Override the profile seed");
    synth->add_option("--out", synth_out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        if (*optimize) return cmd_optimize(opt_flags);
        if (*apply) return cmd_apply(scheme_path, apply_input, apply_format, apply_subset, apply_out);
        if (*compare) return cmd_compare(cmp_flags, cmp_inputs, cmp_tests, cmp_modes, cmp_seeds);
        if (*report) return cmd_report(traces, report_out);
        if (*oracle) return cmd_oracle(orc_flags, limit);
        if (*synth) return cmd_synth(profile, synth_m, synth_seed, synth_out);
    } catch (const dcs::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const dcs::SolverError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSolver;
    } catch (const dcs::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return 0;
}
