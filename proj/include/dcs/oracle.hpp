#pragma once

#include <span>

#include "dcs/correction.hpp"
#include "dcs/dataset.hpp"
#include "dcs/objective.hpp"

namespace dcs {

struct OracleResult {
    SelectionVector best_xi;
    double best_z = 0.0;
    long num_evaluated = 0;
    /// Number of selection vectors attaining best_z.
    long ties = 0;
};

inline constexpr long kDefaultOracleLimit = 1'000'000;

/// Brute-force minimum of the objective over domain^N, enumerated in
/// lexicographic order; the first minimiser found is reported. `domain`
/// defaults to the whole catalog. Throws SolverError when |domain|^N
/// exceeds `limit`.
OracleResult exhaustive_search(const LabeledDataset& ds, const FunctionSet& fs, const ObjectiveWeights& w,
                               long limit = kDefaultOracleLimit, std::span<const int> domain = {});

} // namespace dcs
