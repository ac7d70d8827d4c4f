#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcs/dataset.hpp"

namespace dcs {

/// Controls the class-accuracy imbalance of a synthetic probability dataset.
struct BiasProfile {
    std::string name;
    int num_classes = 2;
    std::vector<double> class_priors;
    /// Probability that an instance of class c has argmax c.
    std::vector<double> target_accuracy;
    /// Peakedness of the off-target mass; small values concentrate errors on
    /// one confusable class.
    double confusion_temperature = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Draws M labelled rows from the profile. Rows are normalised and their
/// argmax equals the label with probability target_accuracy[label]; when it
/// does not, the misclassified instance keeps the runner-up probability on
/// its true class. Deterministic per (profile, M).
LabeledDataset generate(const BiasProfile& profile, int num_instances);

/// The five-profile suite P1..P5 used by the benchmarks.
std::vector<BiasProfile> standard_suite();
BiasProfile standard_profile(const std::string& name);

std::string profile_to_json(const BiasProfile& p);
BiasProfile profile_from_json(const std::string& text);

} // namespace dcs
