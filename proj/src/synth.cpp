#include "dcs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "dcs/error.hpp"
#include "dcs/rng.hpp"

namespace dcs {

namespace {

// Index drawn from unnormalised non-negative weights.
int draw_index(const std::vector<double>& weights, Rng& rng)
{
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double u = rng.uniform() * total;
    int last = -1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last = static_cast<int>(i);
        if (u < weights[i]) return last;
        u -= weights[i];
    }
    return last;
}

// softmax(logits / temperature) restricted to `mask`; zero elsewhere.
std::vector<double> masked_softmax(const std::vector<double>& logits, const std::vector<bool>& mask, double temperature)
{
    double hi = -INFINITY;
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (mask[i]) hi = std::max(hi, logits[i] / temperature);
    std::vector<double> out(logits.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (!mask[i]) continue;
        out[i] = std::exp(logits[i] / temperature - hi);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

} // namespace

void BiasProfile::validate() const
{
    if (num_classes < 2) throw ValidationError("profile needs at least 2 classes");
    if (static_cast<int>(class_priors.size()) != num_classes || static_cast<int>(target_accuracy.size()) != num_classes)
        throw ValidationError("profile vectors must have one entry per class");
    double sum = 0.0;
    for (double p : class_priors) {
        if (!(p >= 0.0)) throw ValidationError("class priors must be non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("class priors must sum to 1");
    for (double a : target_accuracy)
        if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("target accuracies must lie in [0,1]");
    if (!(confusion_temperature > 0.0)) throw ValidationError("confusion temperature must be positive");
}

LabeledDataset generate(const BiasProfile& profile, int num_instances)
{
    profile.validate();
    const int n = profile.num_classes;
    if (num_instances < n) throw ValidationError("need at least as many instances as classes");

    Rng rng = make_rng(profile.seed, Stream::Synth);

    // Fixed confusion structure: which classes each class tends to be mistaken for.
    std::vector<std::vector<double>> confusion(static_cast<std::size_t>(n), std::vector<double>(n));
    for (auto& row : confusion)
        for (double& v : row) v = rng.normal();

    ProbMatrix<double> probs = ProbMatrix<double>::Zero(num_instances, n);
    Labels labels(static_cast<std::size_t>(num_instances));
    std::vector<std::string> ids(static_cast<std::size_t>(num_instances));
    std::vector<bool> mask(static_cast<std::size_t>(n));
    std::vector<double> noise(static_cast<std::size_t>(n));

    for (int m = 0; m < num_instances; ++m) {
        const int y = draw_index(profile.class_priors, rng);
        const bool correct = rng.uniform() < profile.target_accuracy[y];

        int top = y;
        if (!correct) {
            for (int j = 0; j < n; ++j) mask[j] = j != y;
            top = draw_index(masked_softmax(confusion[y], mask, profile.confusion_temperature), rng);
        }

        // Unnormalised scores: the winner scores 1. A misclassified instance
        // keeps its true class at 0.2..0.7 of the winner; the remaining
        // off-target mass (at most half the runner-up) is spread by a softmax
        // over fresh logits.
        auto row = probs.row(m);
        row(top) = 1.0;
        double runner_up = 1.0;
        if (!correct) {
            runner_up = 0.2 + 0.5 * rng.uniform();
            row(y) = runner_up;
        }
        const double off_scale = 0.05 + 0.45 * rng.uniform();
        for (int j = 0; j < n; ++j) {
            mask[j] = j != top && (correct || j != y);
            noise[j] = rng.normal();
        }
        if (std::find(mask.begin(), mask.end(), true) != mask.end()) {
            const auto spread = masked_softmax(noise, mask, profile.confusion_temperature);
            for (int j = 0; j < n; ++j)
                if (mask[j]) row(j) = off_scale * runner_up * spread[j];
        }
        row /= row.sum();

        labels[m] = y + 1;
        ids[m] = profile.name.empty() ? "s" + std::to_string(m) : profile.name + "-" + std::to_string(m);
    }
    return LabeledDataset(std::move(probs), std::move(labels), std::move(ids));
}

std::vector<BiasProfile> standard_suite()
{
    return {
        {"P1", 3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.95, 0.20, 0.90}, 0.5, 0},
        {"P2", 3, {0.4, 0.3, 0.3}, {0.90, 0.85, 0.03}, 0.3, 0},
        {"P3", 4, {0.4, 0.3, 0.2, 0.1}, {0.90, 0.60, 0.30, 0.80}, 0.5, 0},
        {"P4", 5, {0.2, 0.2, 0.2, 0.2, 0.2}, {0.92, 0.85, 0.35, 0.75, 0.90}, 1.0, 0},
        {"P5", 2, {0.5, 0.5}, {0.97, 0.45}, 1.0, 0},
    };
}

BiasProfile standard_profile(const std::string& name)
{
    for (auto& p : standard_suite())
        if (p.name == name) return p;
    throw ValidationError("unknown standard profile '" + name + "' (expected P1..P5)");
}

std::string profile_to_json(const BiasProfile& p)
{
    nlohmann::json j{
        {"name", p.name},
        {"num_classes", p.num_classes},
        {"class_priors", p.class_priors},
        {"target_accuracy", p.target_accuracy},
        {"confusion_temperature", p.confusion_temperature},
        {"seed", p.seed},
    };
    return j.dump(2);
}

BiasProfile profile_from_json(const std::string& text)
{
    BiasProfile p;
    try {
        const auto j = nlohmann::json::parse(text);
        p.name = j.value("name", std::string());
        p.num_classes = j.at("num_classes").get<int>();
        p.class_priors = j.at("class_priors").get<std::vector<double>>();
        p.target_accuracy = j.at("target_accuracy").get<std::vector<double>>();
        p.confusion_temperature = j.at("confusion_temperature").get<double>();
        p.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed profile: ") + e.what());
    }
    p.validate();
    return p;
}

} // namespace dcs
