#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dcs/correction.hpp"
#include "dcs/dataset.hpp"
#include "dcs/objective.hpp"
#include "dcs/rng.hpp"

namespace dcs {

struct AnnealConfig {
    double initial_temperature = 200000.0;
    double cooling_rate = 0.95;
    /// Inner loop ends once ceil(lambda1 * N) candidates were accepted ...
    double lambda1 = 10.0;
    /// ... or ceil(lambda2 * N) candidates were generated.
    double lambda2 = 100.0;
    double min_temperature = 1e-2;
    int max_outer_loops = 150;
    std::uint64_t seed = 0;

    void validate() const;

    /// Temperature of outer loop t: T0 * alpha^t.
    double temperature(int t) const;
};

struct LoopStats {
    int generated = 0;
    int accepted = 0;
    friend bool operator==(const LoopStats&, const LoopStats&) = default;
};

struct SolveResult {
    SelectionVector best_xi;
    double best_z = 0.0;
    /// Best objective after each outer loop (non-increasing).
    std::vector<double> z_trace;
    std::vector<double> temperatures;
    std::vector<LoopStats> acceptance_counts;
    int outer_loops_run = 0;
    long evaluations = 0;
    double wall_time = 0.0;

    /// Equality of everything the seed determines (wall_time excluded).
    bool same_outcome(const SolveResult& other) const;
};

/// Observer hook: called after every generated candidate.
struct AnnealStep {
    int outer_loop;
    double temperature;
    const SelectionVector& current;   // before the move
    const SelectionVector& candidate;
    double current_z;
    double candidate_z;
    bool accepted;
};
using AnnealObserver = std::function<void(const AnnealStep&)>;

/// Every class starts at the Don't Change index.
SelectionVector initial_solution(const FunctionSet& fs, int num_classes);

/// Picks one class uniformly and resamples its index uniformly from `domain`
/// without the current value. Throws ValidationError for |domain| < 2.
SelectionVector neighbor(const SelectionVector& xi, std::span<const int> domain, Rng& coordinate_rng, Rng& value_rng);

/// Metropolis rule: accept improvements; otherwise accept iff r < exp(-dz/T).
bool accept(double delta_z, double temperature, Rng& rng);

/// Two-level simulated annealing over selection vectors with entries in
/// `domain` (the full catalog when empty).
///
/// Outer loop t runs at T0 * alpha^t until the temperature drops below
/// min_temperature or max_outer_loops loops have run. Each inner loop
/// generates single-coordinate neighbours until ceil(lambda1 * N) were
/// accepted or ceil(lambda2 * N) were generated. The best candidate ever
/// evaluated is returned. Deterministic for a fixed cfg.seed.
SolveResult anneal(const LabeledDataset& ds, const FunctionSet& fs, const ObjectiveWeights& w, const AnnealConfig& cfg,
                   std::span<const int> domain = {}, const AnnealObserver& observer = {});

/// Independent chains, one per seed, run on up to `threads` workers.
/// Returns the chain with the lowest best_z; ties go to the earlier seed.
SolveResult anneal_restarts(const LabeledDataset& ds, const FunctionSet& fs, const ObjectiveWeights& w,
                            const AnnealConfig& cfg, std::span<const std::uint64_t> seeds, int threads,
                            std::span<const int> domain = {});

std::string solve_result_to_json(const SolveResult& r);
SolveResult solve_result_from_json(const std::string& text);
/// outer_loop,temperature,best_z,generated,accepted
std::string trace_to_csv(const SolveResult& r);

} // namespace dcs
