#include "dcs/oracle.hpp"

#include <algorithm>

#include "dcs/error.hpp"

namespace dcs {

OracleResult exhaustive_search(const LabeledDataset& ds, const FunctionSet& fs, const ObjectiveWeights& w, long limit,
                               std::span<const int> domain)
{
    std::vector<int> dom(domain.begin(), domain.end());
    if (dom.empty()) dom = fs.domain(CorrectionMode::Dcs);
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());

    const int n = ds.num_classes();
    long total = 1;
    for (int i = 0; i < n; ++i) {
        if (total > limit / static_cast<long>(dom.size()))
            throw SolverError("search space " + std::to_string(dom.size()) + "^" + std::to_string(n) +
                              " exceeds the oracle limit " + std::to_string(limit));
        total *= static_cast<long>(dom.size());
    }
    if (total > limit)
        throw SolverError("search space exceeds the oracle limit " + std::to_string(limit));

    // Deliberately uses objective_value rather than the cached evaluator.
    OracleResult out;
    std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
    SelectionVector xi(std::vector<int>(static_cast<std::size_t>(n), dom[0]));
    for (long count = 0; count < total; ++count) {
        for (int i = 0; i < n; ++i) xi[i] = dom[digits[i]];
        const double z = objective_value(ds, fs, xi, w);
        ++out.num_evaluated;
        if (out.num_evaluated == 1 || z < out.best_z) {
            out.best_z = z;
            out.best_xi = xi;
            out.ties = 1;
        } else if (z == out.best_z) {
            ++out.ties;
        }
        // Odometer increment with the last class varying fastest.
        for (int i = n - 1; i >= 0; --i) {
            if (++digits[i] < dom.size()) break;
            digits[i] = 0;
        }
    }
    return out;
}

} // namespace dcs
