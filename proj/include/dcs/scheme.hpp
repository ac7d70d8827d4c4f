#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dcs/annealer.hpp"
#include "dcs/correction.hpp"
#include "dcs/objective.hpp"

namespace dcs {

inline constexpr const char* kSchemeVersion = "dcs-scheme/1";

struct DatasetFingerprint {
    int num_instances = 0;
    int num_classes = 0;
    std::uint64_t hash = 0;
    friend bool operator==(const DatasetFingerprint&, const DatasetFingerprint&) = default;
};

DatasetFingerprint fingerprint_of(const LabeledDataset& ds);

/// A solved correction scheme, self-describing: it carries its own catalog.
struct SchemeFile {
    std::string version = kSchemeVersion;
    int num_classes = 0;
    CorrectionMode mode = CorrectionMode::Dcs;
    ObjectiveMode objective = ObjectiveMode::Full;
    FunctionSet catalog = default_function_set();
    SelectionVector xi;
    ObjectiveWeights weights;
    AnnealConfig anneal;
    double best_z = 0.0;
    /// The set the scheme was optimised on.
    DatasetFingerprint optimization_set;
    /// The dataset it was split from, and how.
    DatasetFingerprint source;
    double dev_fraction = 0.05;
    std::uint64_t split_seed = 0;

    /// Throws ValidationError if xi does not resolve in the catalog.
    void validate() const;
};

std::string scheme_to_json(const SchemeFile& s);
SchemeFile scheme_from_json(const std::string& text);
void save_scheme(const SchemeFile& s, const std::filesystem::path& path);
SchemeFile load_scheme(const std::filesystem::path& path);

} // namespace dcs
