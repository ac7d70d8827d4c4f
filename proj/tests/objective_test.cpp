#include <doctest.h>

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "dcs/error.hpp"
#include "dcs/objective.hpp"
#include "dcs/rng.hpp"
#include "dcs/synth.hpp"
#include "test_util.hpp"

using namespace dcs;

TEST_CASE("argmax ties go to the lowest index")
{
    CHECK(argmax_class(Eigen::RowVector3d(0.4, 0.4, 0.1)) == 1);
    CHECK(argmax_class(Eigen::RowVector3d(0.0, 0.0, 0.0)) == 1);
    CHECK(argmax_class(Eigen::RowVector3d(0.1, 0.4, 0.4)) == 2);
    CHECK(argmax_class(Eigen::RowVector3d(0.1, 0.2, 0.3)) == 3);
}

TEST_CASE("worked example: two classes, four instances")
{
    const Labels labels{1, 2, 2, 2};
    const Labels preds{1, 1, 2, 2};
    CHECK(z_err(preds, labels) == doctest::Approx(0.25));
    const auto acc = per_class_accuracy(preds, labels, 2);
    CHECK(*acc[0] == 1.0);
    CHECK(*acc[1] == doctest::Approx(2.0 / 3.0));
    CHECK(z_cobias(preds, labels, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(z_pmi(preds, labels, 2) == doctest::Approx(-(std::log(2.0) + std::log(4.0 / 3.0))));
    CHECK(z_pmi(preds, labels, 2) == doctest::Approx(-0.98083).epsilon(1e-5));

    const auto counts = count_classes(preds, labels, 2);
    const auto t = objective_terms(counts, make_weights(ObjectiveMode::Full, 1.0, 0.0));
    CHECK(t.z == doctest::Approx(0.25 + 1.0 / 3.0));
    CHECK(t.z == doctest::Approx(0.58333).epsilon(1e-5));
}

TEST_CASE("cobias averages over pairs")
{
    // Accuracies (1, 0.5, 0.5): pair gaps 0.5, 0.5, 0.
    const Labels labels{1, 1, 2, 2, 3, 3};
    const Labels preds{1, 1, 2, 1, 3, 1};
    CHECK(z_cobias(preds, labels, 3) == doctest::Approx(1.0 / 3.0));

    // N = 2 reduces to |A1 - A2|.
    Labels l2, p2;
    for (int i = 0; i < 10; ++i) {
        l2.push_back(1);
        p2.push_back(i < 8 ? 1 : 2);
        l2.push_back(2);
        p2.push_back(i < 6 ? 2 : 1);
    }
    CHECK(z_cobias(p2, l2, 2) == doctest::Approx(0.2));
}

TEST_CASE("cobias ignores absent classes and needs two present")
{
    const Labels labels{1, 1, 3, 3};
    const Labels preds{1, 2, 3, 3};
    CHECK(z_cobias(preds, labels, 3) == doctest::Approx(0.5));
    CHECK_FALSE(per_class_accuracy(preds, labels, 3)[1].has_value());
    CHECK_THROWS_AS(z_cobias(Labels{1, 1}, Labels{1, 1}, 2), SolverError);
}

TEST_CASE("pmi of a balanced perfect classifier")
{
    const Labels labels{1, 2, 1, 2};
    CHECK(z_pmi(labels, labels, 2) == doctest::Approx(-2.0 * std::log(2.0)));
}

TEST_CASE("pmi guard for classes never predicted correctly")
{
    const Labels labels{1, 2};
    const Labels preds{1, 1};
    // Class 1: ln(1*2 / (2*1)) = 0. Class 2: ln(1e-12).
    CHECK(z_pmi(preds, labels, 2) == doctest::Approx(-std::log(kPmiEpsilon)));
}

TEST_CASE("pmi skips classes with no true instances")
{
    const Labels labels{1, 1};
    const Labels preds{1, 2};
    // Class 1 only: ln(1*2 / (1*2)) = 0.
    CHECK(z_pmi(preds, labels, 2) == doctest::Approx(0.0));
}

TEST_CASE("error and accuracy are complementary")
{
    Rng rng(3, 0);
    for (int trial = 0; trial < 50; ++trial) {
        Labels labels(40), preds(40);
        for (int i = 0; i < 40; ++i) {
            labels[i] = 1 + static_cast<int>(rng.below(4));
            preds[i] = 1 + static_cast<int>(rng.below(4));
        }
        const auto rep = make_report(preds, labels, 4, make_weights(ObjectiveMode::Err, 0, 0));
        CHECK(rep.overall_accuracy + z_err(preds, labels) == doctest::Approx(1.0));
    }
}

TEST_CASE("cobias is invariant under relabelling")
{
    Rng rng(4, 0);
    std::vector<int> perm{3, 1, 4, 2};
    for (int trial = 0; trial < 50; ++trial) {
        Labels labels(60), preds(60), lp(60), pp(60);
        for (int i = 0; i < 60; ++i) {
            labels[i] = 1 + static_cast<int>(rng.below(4));
            preds[i] = 1 + static_cast<int>(rng.below(4));
            lp[i] = perm[labels[i] - 1];
            pp[i] = perm[preds[i] - 1];
        }
        CHECK(z_cobias(pp, lp, 4) == doctest::Approx(z_cobias(preds, labels, 4)));
        CHECK(z_pmi(pp, lp, 4) == doctest::Approx(z_pmi(preds, labels, 4)));
    }
}

TEST_CASE("ablation weights")
{
    const auto err = make_weights(ObjectiveMode::Err, 5.0, 7.0);
    CHECK(err.beta == 0.0);
    CHECK(err.tau == 0.0);
    CHECK_FALSE(err.enable_cobias);
    CHECK_FALSE(err.enable_pmi);
    const auto ep = make_weights(ObjectiveMode::ErrPmi, 5.0, 7.0);
    CHECK(ep.beta == 0.0);
    CHECK(ep.tau == 7.0);
    CHECK(ep.enable_pmi);
    CHECK_FALSE(ep.enable_cobias);
    CHECK(objective_mode_from_string("err+pmi") == ObjectiveMode::ErrPmi);
    CHECK(to_string(ObjectiveMode::Full) == "full");
    CHECK_THROWS_AS(objective_mode_from_string("cobias"), ValidationError);
    CHECK_THROWS_AS(make_weights(ObjectiveMode::Full, -1.0, 1.0), ValidationError);

    // Disabled terms do not reach Z even with a one-class sample.
    const auto counts = count_classes(Labels{1, 1}, Labels{1, 1}, 2);
    CHECK_NOTHROW(objective_terms(counts, err));
    CHECK_THROWS_AS(objective_terms(counts, make_weights(ObjectiveMode::Full, 1, 1)), SolverError);
}

TEST_CASE("objective of the Don't Change scheme equals the raw objective")
{
    BiasProfile p{"dc", 3, {0.3, 0.3, 0.4}, {0.9, 0.5, 0.7}, 0.5, 1};
    const auto ds = generate(p, 300);
    const auto fs = default_function_set();
    const SelectionVector keep(std::vector<int>(3, fs.dont_change_index()));
    CHECK(predict(ds, fs, keep) == raw_predictions(ds));
    const ObjectiveWeights w;
    const auto counts = count_classes(raw_predictions(ds), ds.labels(), 3);
    CHECK(objective_value(ds, fs, keep, w) == objective_terms(counts, w).z);
}

TEST_CASE("cached evaluator is bit-identical to the direct objective")
{
    BiasProfile p{"ev", 4, {0.25, 0.25, 0.25, 0.25}, {0.9, 0.4, 0.7, 0.6}, 0.7, 2};
    const auto ds = generate(p, 400);
    const auto fs = default_function_set();
    const ObjectiveWeights w{0.7, 0.3};
    for (auto mode : {CorrectionMode::Dcs, CorrectionMode::Dnip, CorrectionMode::Furud}) {
        const auto domain = fs.domain(mode);
        const ObjectiveEvaluator eval(ds, fs, domain, w);
        Rng rng(9, 0);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<int> ks(4);
            for (int& k : ks) k = domain[rng.below(domain.size())];
            const SelectionVector xi(ks);
            CHECK(eval(xi) == objective_value(ds, fs, xi, w));
        }
    }
}

TEST_CASE("report json carries the objective components")
{
    const Labels labels{1, 2, 2, 2};
    const Labels preds{1, 1, 2, 2};
    const ObjectiveWeights w{0.5, 2.0};
    auto rep = make_report(preds, labels, 2, w);
    attach_scheme(rep, default_function_set(), SelectionVector({1, 34}));
    const auto j = nlohmann::json::parse(rep.to_json());
    const auto& o = j.at("objective");
    const double z = o.at("z_err").get<double>() + o.at("beta").get<double>() * o.at("z_cobias").get<double>() +
                     o.at("tau").get<double>() * o.at("z_pmi").get<double>();
    CHECK(z == doctest::Approx(o.at("z_value").get<double>()).epsilon(1e-12));
    CHECK(o.at("z_value").get<double>() == doctest::Approx(0.25 + 0.5 / 3.0 - 2.0 * (std::log(2.0) + std::log(4.0 / 3.0))));

    const auto csv = rep.to_csv();
    CHECK(csv.rfind("class,n_true,accuracy,correction_kind,correction_params\n", 0) == 0);
    CHECK(csv.find("weight") != std::string::npos);
    CHECK(csv.find("w=0.5") != std::string::npos);
}
