#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcs/correction.hpp"
#include "dcs/dataset.hpp"

namespace dcs {

/// Z = Z_err + beta * Z_cobias + tau * Z_pmi, with each term switchable.
struct ObjectiveWeights {
    double beta = 1.0;
    double tau = 1.0;
    bool enable_err = true;
    bool enable_cobias = true;
    bool enable_pmi = true;

    /// Throws ValidationError for negative weights or no enabled term.
    void validate() const;
};

/// Objective ablations: full, error only, error plus PMI.
enum class ObjectiveMode { Full, Err, ErrPmi };

ObjectiveMode objective_mode_from_string(const std::string& name);
std::string to_string(ObjectiveMode mode);

/// Weights for an ablation mode. Disabled terms get their weight forced to 0.
ObjectiveWeights make_weights(ObjectiveMode mode, double beta, double tau);

/// Per-class tallies behind every objective term.
struct ClassCounts {
    int num_instances = 0;
    std::vector<int> n_true;
    std::vector<int> n_pred;
    std::vector<int> n_correct;
};

ClassCounts count_classes(const Labels& preds, const Labels& labels, int num_classes);

/// Guard value used in place of a zero PMI ratio.
inline constexpr double kPmiEpsilon = 1e-12;

/// Argmax of a row; ties go to the lowest index. Returns a 1-based class.
template <typename Derived>
int argmax_class(const Eigen::MatrixBase<Derived>& row)
{
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < row.size(); ++i)
        if (row(i) > row(best)) best = i;
    return static_cast<int>(best) + 1;
}

/// Corrected argmax prediction for every instance.
Labels predict(const LabeledDataset& ds, const FunctionSet& fs, const SelectionVector& xi);

/// Argmax of the uncorrected probabilities.
Labels raw_predictions(const LabeledDataset& ds);

double z_err(const Labels& preds, const Labels& labels);

/// A_c = correct_c / true_c; nullopt for classes without labeled instances.
std::vector<std::optional<double>> per_class_accuracy(const Labels& preds, const Labels& labels, int num_classes);

/// Mean |A_i - A_j| over unordered pairs of classes present in `labels`.
/// Throws SolverError when fewer than two classes are present.
double z_cobias(const Labels& preds, const Labels& labels, int num_classes);

/// -sum_j ln(f(pred j and true j) / (f(pred j) f(true j))) over classes with
/// at least one true instance. A zero numerator contributes ln(1e-12).
double z_pmi(const Labels& preds, const Labels& labels, int num_classes);

double z_err(const ClassCounts& counts);
std::vector<std::optional<double>> per_class_accuracy(const ClassCounts& counts);
double z_cobias(const ClassCounts& counts);
double z_pmi(const ClassCounts& counts);

struct ObjectiveTerms {
    double z_err = 0.0;
    /// Absent when fewer than two classes are present and COBias is disabled.
    std::optional<double> z_cobias;
    double z_pmi = 0.0;
    double z = 0.0;
};

/// Evaluates every term and combines the enabled ones.
ObjectiveTerms objective_terms(const ClassCounts& counts, const ObjectiveWeights& w);

double objective_value(const LabeledDataset& ds, const FunctionSet& fs, const SelectionVector& xi,
                       const ObjectiveWeights& w);

/// Objective evaluation for repeated calls on one dataset.
///
/// Precomputes every corrected column f_k(p_{.i}) for the selectable catalog
/// indices, so each evaluation is an argmax over cached values. Results are
/// bit-identical to objective_value.
class ObjectiveEvaluator {
public:
    ObjectiveEvaluator(const LabeledDataset& ds, const FunctionSet& fs, std::vector<int> domain, ObjectiveWeights w);

    double operator()(const SelectionVector& xi) const;
    ObjectiveTerms terms(const SelectionVector& xi) const;

    const std::vector<int>& domain() const { return domain_; }
    const ObjectiveWeights& weights() const { return weights_; }

private:
    const std::vector<double>& column(int cls, int k) const;

    const LabeledDataset* ds_;
    int num_classes_;
    int catalog_size_;
    std::vector<int> domain_;
    ObjectiveWeights weights_;
    // columns_[cls * catalog_size + (k - 1)], empty for indices outside the domain.
    std::vector<std::vector<double>> columns_;
};

struct ClassReport {
    int cls = 0;
    int n_true = 0;
    int n_pred = 0;
    std::optional<double> accuracy;
    std::optional<FunctionKind> correction_kind;
    std::string correction_params;
};

struct EvalReport {
    int num_instances = 0;
    int num_classes = 0;
    double overall_accuracy = 0.0;
    std::vector<ClassReport> classes;
    std::optional<double> cobias;
    double pmi_sum = 0.0;
    ObjectiveWeights weights;
    ObjectiveTerms terms;

    std::string to_json() const;
    /// class,n_true,accuracy,correction_kind,correction_params
    std::string to_csv() const;
};

EvalReport make_report(const Labels& preds, const Labels& labels, int num_classes, const ObjectiveWeights& w);
/// Adds the correction kind and parameters of each class.
void attach_scheme(EvalReport& report, const FunctionSet& fs, const SelectionVector& xi);

} // namespace dcs
