#include "dcs/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "dcs/error.hpp"

namespace dcs {

OptimizeOutcome run_optimize(const LabeledDataset& ds, const OptimizeOptions& opts)
{
    const ObjectiveWeights w = opts.weights();
    opts.anneal.validate();
    auto split = split_dataset(ds, opts.dev_fraction, opts.anneal.seed);
    const auto domain = opts.catalog.domain(opts.mode);
    auto solve = anneal(split.optimization_set, opts.catalog, w, opts.anneal, domain);

    SchemeFile scheme;
    scheme.num_classes = ds.num_classes();
    scheme.mode = opts.mode;
    scheme.objective = opts.objective;
    scheme.catalog = opts.catalog;
    scheme.xi = solve.best_xi;
    scheme.weights = w;
    scheme.anneal = opts.anneal;
    scheme.best_z = solve.best_z;
    scheme.optimization_set = fingerprint_of(split.optimization_set);
    scheme.source = fingerprint_of(ds);
    scheme.dev_fraction = opts.dev_fraction;
    scheme.split_seed = opts.anneal.seed;

    // Dev scoring must not fail when the dev split happens to miss a class.
    ObjectiveWeights dev_w = w;
    const auto& dev = split.dev_set;
    const auto dev_counts = count_classes(dev.labels(), dev.labels(), dev.num_classes());
    if (std::count_if(dev_counts.n_true.begin(), dev_counts.n_true.end(), [](int v) { return v > 0; }) < 2)
        dev_w.enable_cobias = false;

    auto raw_opt = make_report(raw_predictions(split.optimization_set), split.optimization_set.labels(),
                               ds.num_classes(), w);
    auto opt = make_report(predict(split.optimization_set, opts.catalog, solve.best_xi),
                           split.optimization_set.labels(), ds.num_classes(), w);
    attach_scheme(opt, opts.catalog, solve.best_xi);
    auto raw_dev = make_report(raw_predictions(dev), dev.labels(), ds.num_classes(), dev_w);
    auto dev_rep = make_report(predict(dev, opts.catalog, solve.best_xi), dev.labels(), ds.num_classes(), dev_w);
    attach_scheme(dev_rep, opts.catalog, solve.best_xi);

    return OptimizeOutcome{std::move(split), std::move(solve), std::move(scheme), std::move(raw_opt),
                           std::move(opt), std::move(raw_dev), std::move(dev_rep)};
}

Labels apply_scheme(const SchemeFile& scheme, const LabeledDataset& ds)
{
    scheme.validate();
    if (scheme.num_classes != ds.num_classes())
        throw ValidationError("scheme is for " + std::to_string(scheme.num_classes) + " classes, dataset has " +
                              std::to_string(ds.num_classes()));
    return predict(ds, scheme.catalog, scheme.xi);
}

EvalReport evaluate_scheme(const SchemeFile& scheme, const LabeledDataset& ds)
{
    const auto preds = apply_scheme(scheme, ds);
    ObjectiveWeights w = scheme.weights;
    const auto counts = count_classes(ds.labels(), ds.labels(), ds.num_classes());
    if (std::count_if(counts.n_true.begin(), counts.n_true.end(), [](int v) { return v > 0; }) < 2)
        w.enable_cobias = false;
    auto report = make_report(preds, ds.labels(), ds.num_classes(), w);
    attach_scheme(report, scheme.catalog, scheme.xi);
    return report;
}

SchemeSubset subset_from_string(const std::string& name)
{
    if (name == "all") return SchemeSubset::All;
    if (name == "optimization") return SchemeSubset::Optimization;
    if (name == "dev") return SchemeSubset::Dev;
    throw ValidationError("unknown subset '" + name + "' (expected all, optimization or dev)");
}

LabeledDataset select_subset(const SchemeFile& scheme, const LabeledDataset& ds, SchemeSubset subset)
{
    if (subset == SchemeSubset::All) return ds;
    if (!(fingerprint_of(ds) == scheme.source))
        throw ValidationError("dataset does not match the one the scheme was optimised on (fingerprint mismatch)");
    auto split = split_dataset(ds, scheme.dev_fraction, scheme.split_seed);
    return subset == SchemeSubset::Optimization ? std::move(split.optimization_set) : std::move(split.dev_set);
}

SchemeTally tally(const FunctionSet& fs, const SelectionVector& xi)
{
    SchemeTally t;
    for (int k : xi.values()) {
        if (fs.kind(k) == FunctionKind::Membership) ++t.memberships;
        else ++t.weights;
    }
    return t;
}

namespace {

CompareRow run_cell(const CompareInput& in, CorrectionMode mode, std::uint64_t seed, const OptimizeOptions& base)
{
    OptimizeOptions opts = base;
    opts.mode = mode;
    opts.anneal.seed = seed;
    const auto out = run_optimize(in.data, opts);

    CompareRow row;
    row.dataset = in.name;
    row.mode = mode;
    row.seed = seed;
    row.num_classes = in.data.num_classes();
    row.best_z = out.solve.best_z;
    row.tally = tally(opts.catalog, out.solve.best_xi);
    row.wall_time = out.solve.wall_time;
    row.outer_loops = out.solve.outer_loops_run;

    if (in.test) {
        const auto& test = *in.test;
        const auto w = make_weights(ObjectiveMode::Full, 0.0, 0.0);
        const auto raw = make_report(raw_predictions(test), test.labels(), test.num_classes(), w);
        const auto cor = make_report(predict(test, opts.catalog, out.solve.best_xi), test.labels(), test.num_classes(), w);
        row.raw_accuracy = raw.overall_accuracy;
        row.raw_cobias = raw.cobias.value_or(0.0);
        row.accuracy = cor.overall_accuracy;
        row.cobias = cor.cobias.value_or(0.0);
    } else {
        row.raw_accuracy = out.raw_dev.overall_accuracy;
        row.raw_cobias = out.raw_dev.cobias.value_or(0.0);
        row.accuracy = out.dev.overall_accuracy;
        row.cobias = out.dev.cobias.value_or(0.0);
    }

    int weakest = 0;
    double weakest_acc = 2.0;
    for (const auto& c : out.raw_optimization.classes) {
        if (c.accuracy && *c.accuracy < weakest_acc) {
            weakest_acc = *c.accuracy;
            weakest = c.cls;
        }
    }
    row.weakest_class = weakest;
    row.weakest_kind = opts.catalog.kind(out.solve.best_xi[weakest - 1]);
    return row;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

std::vector<CompareRow> run_compare(const std::vector<CompareInput>& inputs, const std::vector<CorrectionMode>& modes,
                                    const std::vector<std::uint64_t>& seeds, const OptimizeOptions& base, int threads)
{
    if (inputs.empty()) throw ValidationError("compare needs at least one dataset");
    if (modes.empty()) throw ValidationError("compare needs at least one mode");
    if (seeds.empty()) throw ValidationError("compare needs at least one seed");

    const std::size_t cells = inputs.size() * modes.size() * seeds.size();
    std::vector<CompareRow> rows(cells);
    std::vector<std::exception_ptr> errors(cells);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells; i = next++) {
            const std::size_t s = i % seeds.size();
            const std::size_t m = (i / seeds.size()) % modes.size();
            const std::size_t d = i / (seeds.size() * modes.size());
            try {
                rows[i] = run_cell(inputs[d], modes[m], seeds[s], base);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n_threads = std::clamp(threads, 1, static_cast<int>(cells));
    {
        std::vector<std::jthread> pool;
        for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

std::string compare_runs_csv(const std::vector<CompareRow>& rows)
{
    std::string out = "dataset,mode,seed,num_classes,raw_accuracy,raw_cobias,accuracy,cobias,best_z,"
                      "membership_count,weight_count,weakest_class,weakest_kind,outer_loops,wall_time\n";
    for (const auto& r : rows) {
        out += r.dataset + ',' + to_string(r.mode) + ',' + std::to_string(r.seed) + ',' + std::to_string(r.num_classes) +
               ',' + fmt(r.raw_accuracy) + ',' + fmt(r.raw_cobias) + ',' + fmt(r.accuracy) + ',' + fmt(r.cobias) + ',' +
               fmt(r.best_z) + ',' + std::to_string(r.tally.memberships) + ',' + std::to_string(r.tally.weights) + ',' +
               std::to_string(r.weakest_class) + ',' + to_string(r.weakest_kind) + ',' +
               std::to_string(r.outer_loops) + ',' + fmt(r.wall_time) + '\n';
    }
    return out;
}

std::string compare_summary_csv(const std::vector<CompareRow>& rows)
{
    std::string out = "dataset,mode,runs,accuracy_mean,accuracy_std,cobias_mean,cobias_std,raw_accuracy,raw_cobias,"
                      "membership_mean,weight_mean,membership_to_weight_ratio,weakest_membership_runs\n";
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t j = i;
        while (j < rows.size() && rows[j].dataset == rows[i].dataset && rows[j].mode == rows[i].mode) ++j;
        const double n = static_cast<double>(j - i);
        double acc = 0, cob = 0, acc2 = 0, cob2 = 0, mem = 0, wt = 0;
        int weakest_mem = 0;
        for (std::size_t k = i; k < j; ++k) {
            acc += rows[k].accuracy;
            cob += rows[k].cobias;
            mem += rows[k].tally.memberships;
            wt += rows[k].tally.weights;
            if (rows[k].weakest_kind == FunctionKind::Membership) ++weakest_mem;
        }
        acc /= n;
        cob /= n;
        for (std::size_t k = i; k < j; ++k) {
            acc2 += (rows[k].accuracy - acc) * (rows[k].accuracy - acc);
            cob2 += (rows[k].cobias - cob) * (rows[k].cobias - cob);
        }
        const double acc_sd = n > 1 ? std::sqrt(acc2 / (n - 1)) : 0.0;
        const double cob_sd = n > 1 ? std::sqrt(cob2 / (n - 1)) : 0.0;
        mem /= n;
        wt /= n;
        out += rows[i].dataset + ',' + to_string(rows[i].mode) + ',' + std::to_string(j - i) + ',' + fmt(acc) + ',' +
               fmt(acc_sd) + ',' + fmt(cob) + ',' + fmt(cob_sd) + ',' + fmt(rows[i].raw_accuracy) + ',' +
               fmt(rows[i].raw_cobias) + ',' + fmt(mem) + ',' + fmt(wt) + ',' + (wt > 0 ? fmt(mem / wt) : "inf") + ',' +
               std::to_string(weakest_mem) + '\n';
        i = j;
    }
    return out;
}

std::string trace_file_to_json(const TraceFile& t)
{
    auto j = nlohmann::json::parse(solve_result_to_json(t.solve));
    j["task"] = t.task;
    j["num_classes"] = t.num_classes;
    j["domain_size"] = t.domain_size;
    return j.dump(2);
}

TraceFile trace_file_from_json(const std::string& text)
{
    TraceFile t;
    try {
        const auto j = nlohmann::json::parse(text);
        t.task = j.at("task").get<std::string>();
        t.num_classes = j.at("num_classes").get<int>();
        t.domain_size = j.at("domain_size").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed trace file: ") + e.what());
    }
    t.solve = solve_result_from_json(text);
    return t;
}

std::string annealing_report_csv(const std::vector<TraceFile>& traces)
{
    if (traces.empty()) throw ValidationError("report needs at least one trace");
    std::string out = "task,num_classes,search_space,wall_time,outer_loops\n";
    for (const auto& t : traces) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", t.solve.wall_time);
        out += t.task + ',' + std::to_string(t.num_classes) + ',' +
               std::to_string(static_cast<long>(t.num_classes) * t.domain_size) + ',' + buf + ',' +
               std::to_string(t.solve.outer_loops_run) + '\n';
    }
    return out;
}

int threads_from_env()
{
    if (const char* v = std::getenv("DCS_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && n >= 1) return static_cast<int>(n);
        throw ValidationError(std::string("DCS_THREADS must be a positive integer, got '") + v + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace dcs
