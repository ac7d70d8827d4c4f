#include "dcs/objective.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "dcs/error.hpp"

namespace dcs {

void ObjectiveWeights::validate() const
{
    if (!(beta >= 0.0) || !(tau >= 0.0)) throw ValidationError("beta and tau must be non-negative");
    if (!enable_err && !enable_cobias && !enable_pmi) throw ValidationError("at least one objective term must be enabled");
}

ObjectiveMode objective_mode_from_string(const std::string& name)
{
    if (name == "full") return ObjectiveMode::Full;
    if (name == "err") return ObjectiveMode::Err;
    if (name == "err+pmi") return ObjectiveMode::ErrPmi;
    throw ValidationError("unknown objective '" + name + "' (expected full, err or err+pmi)");
}

std::string to_string(ObjectiveMode mode)
{
    switch (mode) {
    case ObjectiveMode::Full: return "full";
    case ObjectiveMode::Err: return "err";
    case ObjectiveMode::ErrPmi: return "err+pmi";
    }
    return "full";
}

ObjectiveWeights make_weights(ObjectiveMode mode, double beta, double tau)
{
    ObjectiveWeights w{beta, tau, true, true, true};
    if (mode == ObjectiveMode::Err) {
        w.beta = 0.0;
        w.tau = 0.0;
        w.enable_cobias = false;
        w.enable_pmi = false;
    } else if (mode == ObjectiveMode::ErrPmi) {
        w.beta = 0.0;
        w.enable_cobias = false;
    }
    w.validate();
    return w;
}

ClassCounts count_classes(const Labels& preds, const Labels& labels, int num_classes)
{
    if (preds.size() != labels.size())
        throw ValidationError("prediction count " + std::to_string(preds.size()) + " differs from label count " +
                              std::to_string(labels.size()));
    if (labels.empty()) throw ValidationError("no instances to score");
    ClassCounts c;
    c.num_instances = static_cast<int>(labels.size());
    c.n_true.assign(num_classes, 0);
    c.n_pred.assign(num_classes, 0);
    c.n_correct.assign(num_classes, 0);
    for (std::size_t m = 0; m < labels.size(); ++m) {
        const int y = labels[m];
        const int p = preds[m];
        if (y < 1 || y > num_classes || p < 1 || p > num_classes)
            throw ValidationError("class index out of range 1.." + std::to_string(num_classes) + " at instance " +
                                  std::to_string(m + 1));
        ++c.n_true[y - 1];
        ++c.n_pred[p - 1];
        if (p == y) ++c.n_correct[y - 1];
    }
    return c;
}

double z_err(const ClassCounts& counts)
{
    int correct = 0;
    for (int v : counts.n_correct) correct += v;
    return static_cast<double>(counts.num_instances - correct) / static_cast<double>(counts.num_instances);
}

std::vector<std::optional<double>> per_class_accuracy(const ClassCounts& counts)
{
    std::vector<std::optional<double>> out(counts.n_true.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        if (counts.n_true[c] > 0) out[c] = static_cast<double>(counts.n_correct[c]) / counts.n_true[c];
    }
    return out;
}

double z_cobias(const ClassCounts& counts)
{
    const auto acc = per_class_accuracy(counts);
    double sum = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (!acc[i]) continue;
        for (std::size_t j = i + 1; j < acc.size(); ++j) {
            if (!acc[j]) continue;
            sum += std::abs(*acc[i] - *acc[j]);
            ++pairs;
        }
    }
    if (pairs == 0) throw SolverError("COBias needs at least two classes with labeled instances");
    return sum / static_cast<double>(pairs);
}

double z_pmi(const ClassCounts& counts)
{
    const double m = counts.num_instances;
    double sum = 0.0;
    for (std::size_t j = 0; j < counts.n_true.size(); ++j) {
        if (counts.n_true[j] == 0) continue;
        double ratio = kPmiEpsilon;
        if (counts.n_correct[j] > 0)
            ratio = (counts.n_correct[j] * m) / (static_cast<double>(counts.n_pred[j]) * counts.n_true[j]);
        sum += std::log(ratio);
    }
    return -sum;
}

double z_err(const Labels& preds, const Labels& labels)
{
    if (preds.size() != labels.size())
        throw ValidationError("prediction count " + std::to_string(preds.size()) + " differs from label count " +
                              std::to_string(labels.size()));
    if (labels.empty()) throw ValidationError("no instances to score");
    int wrong = 0;
    for (std::size_t m = 0; m < labels.size(); ++m)
        if (preds[m] != labels[m]) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

std::vector<std::optional<double>> per_class_accuracy(const Labels& preds, const Labels& labels, int num_classes)
{
    return per_class_accuracy(count_classes(preds, labels, num_classes));
}

double z_cobias(const Labels& preds, const Labels& labels, int num_classes)
{
    return z_cobias(count_classes(preds, labels, num_classes));
}

double z_pmi(const Labels& preds, const Labels& labels, int num_classes)
{
    return z_pmi(count_classes(preds, labels, num_classes));
}

ObjectiveTerms objective_terms(const ClassCounts& counts, const ObjectiveWeights& w)
{
    ObjectiveTerms t;
    t.z_err = z_err(counts);
    t.z_pmi = z_pmi(counts);
    int present = 0;
    for (int v : counts.n_true) present += v > 0 ? 1 : 0;
    if (present >= 2) t.z_cobias = z_cobias(counts);
    else if (w.enable_cobias)
        throw SolverError("COBias is enabled but only " + std::to_string(present) + " class is present");

    double z = 0.0;
    if (w.enable_err) z += t.z_err;
    if (w.enable_cobias) z += w.beta * *t.z_cobias;
    if (w.enable_pmi) z += w.tau * t.z_pmi;
    t.z = z;
    return t;
}

Labels predict(const LabeledDataset& ds, const FunctionSet& fs, const SelectionVector& xi)
{
    check_selection(fs, xi, ds.num_classes());
    const auto& p = ds.probabilities();
    Labels out(static_cast<std::size_t>(ds.num_instances()));
    for (int m = 0; m < ds.num_instances(); ++m) out[m] = argmax_class(apply_selection(fs, xi, p.row(m)));
    return out;
}

Labels raw_predictions(const LabeledDataset& ds)
{
    const auto& p = ds.probabilities();
    Labels out(static_cast<std::size_t>(ds.num_instances()));
    for (int m = 0; m < ds.num_instances(); ++m) out[m] = argmax_class(p.row(m));
    return out;
}

double objective_value(const LabeledDataset& ds, const FunctionSet& fs, const SelectionVector& xi,
                       const ObjectiveWeights& w)
{
    w.validate();
    const auto preds = predict(ds, fs, xi);
    return objective_terms(count_classes(preds, ds.labels(), ds.num_classes()), w).z;
}

ObjectiveEvaluator::ObjectiveEvaluator(const LabeledDataset& ds, const FunctionSet& fs, std::vector<int> domain,
                                       ObjectiveWeights w)
    : ds_(&ds), num_classes_(ds.num_classes()), catalog_size_(fs.size()), domain_(std::move(domain)), weights_(w)
{
    weights_.validate();
    if (domain_.empty()) throw ValidationError("selection domain is empty");
    for (int k : domain_)
        if (!fs.contains(k)) throw ValidationError("domain index " + std::to_string(k) + " outside catalog");

    const auto& p = ds.probabilities();
    const int m = ds.num_instances();
    columns_.resize(static_cast<std::size_t>(num_classes_) * catalog_size_);
    for (int cls = 0; cls < num_classes_; ++cls) {
        for (int k : domain_) {
            auto& col = columns_[static_cast<std::size_t>(cls) * catalog_size_ + (k - 1)];
            col.resize(static_cast<std::size_t>(m));
            for (int r = 0; r < m; ++r) col[r] = fs.apply(k, p(r, cls));
        }
    }
}

const std::vector<double>& ObjectiveEvaluator::column(int cls, int k) const
{
    if (k < 1 || k > catalog_size_) throw ValidationError("selection index " + std::to_string(k) + " outside catalog");
    const auto& col = columns_[static_cast<std::size_t>(cls) * catalog_size_ + (k - 1)];
    if (col.empty()) throw ValidationError("selection index " + std::to_string(k) + " outside the selectable domain");
    return col;
}

ObjectiveTerms ObjectiveEvaluator::terms(const SelectionVector& xi) const
{
    if (xi.num_classes() != num_classes_)
        throw ValidationError("selection has " + std::to_string(xi.num_classes()) + " entries for " +
                              std::to_string(num_classes_) + " classes");
    std::vector<const double*> cols(static_cast<std::size_t>(num_classes_));
    for (int cls = 0; cls < num_classes_; ++cls) cols[cls] = column(cls, xi[cls]).data();

    const int m = ds_->num_instances();
    const auto& labels = ds_->labels();
    ClassCounts c;
    c.num_instances = m;
    c.n_true.assign(num_classes_, 0);
    c.n_pred.assign(num_classes_, 0);
    c.n_correct.assign(num_classes_, 0);
    for (int r = 0; r < m; ++r) {
        int best = 0;
        double best_v = cols[0][r];
        for (int cls = 1; cls < num_classes_; ++cls) {
            if (cols[cls][r] > best_v) {
                best_v = cols[cls][r];
                best = cls;
            }
        }
        const int y = labels[r] - 1;
        ++c.n_true[y];
        ++c.n_pred[best];
        if (best == y) ++c.n_correct[y];
    }
    return objective_terms(c, weights_);
}

double ObjectiveEvaluator::operator()(const SelectionVector& xi) const
{
    return terms(xi).z;
}

EvalReport make_report(const Labels& preds, const Labels& labels, int num_classes, const ObjectiveWeights& w)
{
    const auto counts = count_classes(preds, labels, num_classes);
    EvalReport r;
    r.num_instances = counts.num_instances;
    r.num_classes = num_classes;
    r.weights = w;
    r.terms = objective_terms(counts, w);
    r.overall_accuracy = 1.0 - r.terms.z_err;
    r.cobias = r.terms.z_cobias;
    r.pmi_sum = -r.terms.z_pmi;
    const auto acc = per_class_accuracy(counts);
    for (int c = 0; c < num_classes; ++c) {
        ClassReport cr;
        cr.cls = c + 1;
        cr.n_true = counts.n_true[c];
        cr.n_pred = counts.n_pred[c];
        cr.accuracy = acc[c];
        r.classes.push_back(cr);
    }
    return r;
}

void attach_scheme(EvalReport& report, const FunctionSet& fs, const SelectionVector& xi)
{
    check_selection(fs, xi, report.num_classes);
    for (int c = 0; c < report.num_classes; ++c) {
        report.classes[c].correction_kind = fs.kind(xi[c]);
        report.classes[c].correction_params = fs.describe(xi[c]);
    }
}

std::string EvalReport::to_json() const
{
    using nlohmann::json;
    json j;
    j["num_instances"] = num_instances;
    j["num_classes"] = num_classes;
    j["overall_accuracy"] = overall_accuracy;
    j["cobias"] = cobias ? json(*cobias) : json(nullptr);
    j["pmi_sum"] = pmi_sum;
    j["objective"] = {
        {"beta", weights.beta},
        {"tau", weights.tau},
        {"enable_err", weights.enable_err},
        {"enable_cobias", weights.enable_cobias},
        {"enable_pmi", weights.enable_pmi},
        {"z_err", terms.z_err},
        {"z_cobias", terms.z_cobias ? json(*terms.z_cobias) : json(nullptr)},
        {"z_pmi", terms.z_pmi},
        {"z_value", terms.z},
    };
    j["classes"] = json::array();
    for (const auto& c : classes) {
        json e{{"class", c.cls}, {"n_true", c.n_true}, {"n_pred", c.n_pred}};
        e["accuracy"] = c.accuracy ? json(*c.accuracy) : json(nullptr);
        if (c.correction_kind) {
            e["correction_kind"] = to_string(*c.correction_kind);
            e["correction_params"] = c.correction_params;
        }
        j["classes"].push_back(std::move(e));
    }
    return j.dump(2);
}

std::string EvalReport::to_csv() const
{
    std::string out = "class,n_true,accuracy,correction_kind,correction_params\n";
    for (const auto& c : classes) {
        char acc[32] = "";
        if (c.accuracy) std::snprintf(acc, sizeof acc, "%.6f", *c.accuracy);
        out += std::to_string(c.cls) + ',' + std::to_string(c.n_true) + ',' + acc + ',';
        out += c.correction_kind ? to_string(*c.correction_kind) : std::string();
        out += ',' + c.correction_params + '\n';
    }
    return out;
}

} // namespace dcs
