#include "dcs/scheme.hpp"

#include <json.hpp>

#include "dcs/error.hpp"

namespace dcs {

namespace {

nlohmann::json fingerprint_json(const DatasetFingerprint& f)
{
    return {{"num_instances", f.num_instances}, {"num_classes", f.num_classes}, {"hash", f.hash}};
}

DatasetFingerprint fingerprint_from(const nlohmann::json& j)
{
    return {j.at("num_instances").get<int>(), j.at("num_classes").get<int>(), j.at("hash").get<std::uint64_t>()};
}

} // namespace

DatasetFingerprint fingerprint_of(const LabeledDataset& ds)
{
    return {ds.num_instances(), ds.num_classes(), ds.fingerprint()};
}

void SchemeFile::validate() const
{
    if (version != kSchemeVersion) throw ValidationError("unsupported scheme version '" + version + "'");
    check_selection(catalog, xi, num_classes);
}

std::string scheme_to_json(const SchemeFile& s)
{
    using nlohmann::json;
    json j;
    j["version"] = s.version;
    j["num_classes"] = s.num_classes;
    j["mode"] = to_string(s.mode);
    j["catalog"] = json::parse(function_set_to_json(s.catalog));
    j["xi"] = s.xi.values();
    j["objective"] = {
        {"mode", to_string(s.objective)},
        {"beta", s.weights.beta},
        {"tau", s.weights.tau},
        {"enable_err", s.weights.enable_err},
        {"enable_cobias", s.weights.enable_cobias},
        {"enable_pmi", s.weights.enable_pmi},
    };
    j["anneal"] = {
        {"initial_temperature", s.anneal.initial_temperature},
        {"cooling_rate", s.anneal.cooling_rate},
        {"lambda1", s.anneal.lambda1},
        {"lambda2", s.anneal.lambda2},
        {"min_temperature", s.anneal.min_temperature},
        {"max_outer_loops", s.anneal.max_outer_loops},
        {"seed", s.anneal.seed},
    };
    j["best_z"] = s.best_z;
    j["optimization_set"] = fingerprint_json(s.optimization_set);
    j["source"] = fingerprint_json(s.source);
    j["split"] = {{"dev_fraction", s.dev_fraction}, {"seed", s.split_seed}};
    return j.dump(2);
}

SchemeFile scheme_from_json(const std::string& text)
{
    SchemeFile s;
    try {
        const auto j = nlohmann::json::parse(text);
        s.version = j.at("version").get<std::string>();
        s.num_classes = j.at("num_classes").get<int>();
        s.mode = mode_from_string(j.at("mode").get<std::string>());
        s.catalog = function_set_from_json(j.at("catalog").dump());
        s.xi = SelectionVector(j.at("xi").get<std::vector<int>>());
        const auto& o = j.at("objective");
        s.objective = objective_mode_from_string(o.at("mode").get<std::string>());
        s.weights = {o.at("beta").get<double>(), o.at("tau").get<double>(), o.at("enable_err").get<bool>(),
                     o.at("enable_cobias").get<bool>(), o.at("enable_pmi").get<bool>()};
        const auto& a = j.at("anneal");
        s.anneal.initial_temperature = a.at("initial_temperature").get<double>();
        s.anneal.cooling_rate = a.at("cooling_rate").get<double>();
        s.anneal.lambda1 = a.at("lambda1").get<double>();
        s.anneal.lambda2 = a.at("lambda2").get<double>();
        s.anneal.min_temperature = a.at("min_temperature").get<double>();
        s.anneal.max_outer_loops = a.at("max_outer_loops").get<int>();
        s.anneal.seed = a.at("seed").get<std::uint64_t>();
        s.best_z = j.at("best_z").get<double>();
        s.optimization_set = fingerprint_from(j.at("optimization_set"));
        s.source = fingerprint_from(j.at("source"));
        s.dev_fraction = j.at("split").at("dev_fraction").get<double>();
        s.split_seed = j.at("split").at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed scheme file: ") + e.what());
    }
    s.weights.validate();
    s.validate();
    return s;
}

void save_scheme(const SchemeFile& s, const std::filesystem::path& path)
{
    write_text_file(path, scheme_to_json(s));
}

SchemeFile load_scheme(const std::filesystem::path& path)
{
    return scheme_from_json(read_text_file(path));
}

} // namespace dcs
