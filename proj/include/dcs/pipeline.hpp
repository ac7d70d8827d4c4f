#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dcs/annealer.hpp"
#include "dcs/dataset.hpp"
#include "dcs/objective.hpp"
#include "dcs/scheme.hpp"

namespace dcs {

struct OptimizeOptions {
    CorrectionMode mode = CorrectionMode::Dcs;
    ObjectiveMode objective = ObjectiveMode::Full;
    double beta = 1.0;
    double tau = 1.0;
    AnnealConfig anneal;
    double dev_fraction = 0.05;
    FunctionSet catalog = default_function_set();

    ObjectiveWeights weights() const { return make_weights(objective, beta, tau); }
};

struct OptimizeOutcome {
    DatasetSplit split;
    SolveResult solve;
    SchemeFile scheme;
    /// Uncorrected and corrected metrics on both parts of the split.
    EvalReport raw_optimization;
    EvalReport optimization;
    EvalReport raw_dev;
    EvalReport dev;
};

/// Splits with the anneal seed, anneals on the optimisation part restricted
/// to the mode's domain, and scores the result on both parts.
OptimizeOutcome run_optimize(const LabeledDataset& ds, const OptimizeOptions& opts);

/// Corrected predictions; throws ValidationError on a class-count mismatch.
Labels apply_scheme(const SchemeFile& scheme, const LabeledDataset& ds);

/// Scored application of a scheme, with its corrections attached.
EvalReport evaluate_scheme(const SchemeFile& scheme, const LabeledDataset& ds);

enum class SchemeSubset { All, Optimization, Dev };
SchemeSubset subset_from_string(const std::string& name);

/// Rebuilds the split recorded in the scheme. Throws ValidationError unless
/// `ds` is the dataset the scheme was split from.
LabeledDataset select_subset(const SchemeFile& scheme, const LabeledDataset& ds, SchemeSubset subset);

/// Counts of memberships and weights chosen by a scheme. Don't Change counts
/// as a membership.
struct SchemeTally {
    int memberships = 0;
    int weights = 0;
};
SchemeTally tally(const FunctionSet& fs, const SelectionVector& xi);

struct CompareInput {
    std::string name;
    LabeledDataset data;
    /// Scored instead of the dev split when present.
    std::optional<LabeledDataset> test;
};

struct CompareRow {
    std::string dataset;
    CorrectionMode mode = CorrectionMode::Dcs;
    std::uint64_t seed = 0;
    int num_classes = 0;
    double raw_accuracy = 0.0;
    double raw_cobias = 0.0;
    double accuracy = 0.0;
    double cobias = 0.0;
    double best_z = 0.0;
    SchemeTally tally;
    /// Lowest raw optimisation-set accuracy, and the correction it received.
    int weakest_class = 0;
    FunctionKind weakest_kind = FunctionKind::Membership;
    double wall_time = 0.0;
    int outer_loops = 0;
};

/// Grid of dataset x mode x seed runs, `threads` cells at a time. Rows come
/// back sorted by (dataset order, mode order, seed order).
std::vector<CompareRow> run_compare(const std::vector<CompareInput>& inputs, const std::vector<CorrectionMode>& modes,
                                    const std::vector<std::uint64_t>& seeds, const OptimizeOptions& base, int threads);

/// Per-seed rows.
std::string compare_runs_csv(const std::vector<CompareRow>& rows);
/// Mean and standard deviation of accuracy and COBias per (dataset, mode),
/// with the membership/weight tally.
std::string compare_summary_csv(const std::vector<CompareRow>& rows);

/// Optimisation trace plus what is needed for the annealing-time report.
struct TraceFile {
    std::string task;
    int num_classes = 0;
    int domain_size = 0;
    SolveResult solve;
};

std::string trace_file_to_json(const TraceFile& t);
TraceFile trace_file_from_json(const std::string& text);

/// task,num_classes,search_space,wall_time,outer_loops
std::string annealing_report_csv(const std::vector<TraceFile>& traces);

/// Grid concurrency cap from DCS_THREADS (default: hardware concurrency).
int threads_from_env();

} // namespace dcs
