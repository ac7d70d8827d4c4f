#include "dcs/annealer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "dcs/error.hpp"

namespace dcs {

void AnnealConfig::validate() const
{
    if (!(initial_temperature > 0.0)) throw ValidationError("initial temperature must be positive");
    if (!(cooling_rate > 0.0 && cooling_rate < 1.0)) throw ValidationError("cooling rate must lie in (0,1)");
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw ValidationError("lambda1 and lambda2 must be positive");
    if (lambda1 > lambda2) throw ValidationError("lambda1 must not exceed lambda2");
    if (!(min_temperature > 0.0)) throw ValidationError("minimum temperature must be positive");
    if (!(min_temperature < initial_temperature))
        throw ValidationError("minimum temperature must be below the initial temperature");
    if (max_outer_loops < 1) throw ValidationError("max outer loops must be positive");
}

double AnnealConfig::temperature(int t) const
{
    return initial_temperature * std::pow(cooling_rate, t);
}

bool SolveResult::same_outcome(const SolveResult& o) const
{
    return best_xi == o.best_xi && best_z == o.best_z && z_trace == o.z_trace && temperatures == o.temperatures &&
           acceptance_counts == o.acceptance_counts && outer_loops_run == o.outer_loops_run &&
           evaluations == o.evaluations;
}

SelectionVector initial_solution(const FunctionSet& fs, int num_classes)
{
    return SelectionVector(std::vector<int>(static_cast<std::size_t>(num_classes), fs.dont_change_index()));
}

SelectionVector neighbor(const SelectionVector& xi, std::span<const int> domain, Rng& coordinate_rng, Rng& value_rng)
{
    if (domain.size() < 2) throw ValidationError("neighbourhood needs a domain of at least 2 indices");
    if (xi.num_classes() < 1) throw ValidationError("empty selection vector");
    SelectionVector out = xi;
    const auto cls = static_cast<int>(coordinate_rng.below(static_cast<std::uint64_t>(xi.num_classes())));
    const auto it = std::find(domain.begin(), domain.end(), xi[cls]);
    if (it == domain.end()) {
        out[cls] = domain[value_rng.below(domain.size())];
        return out;
    }
    const auto skip = static_cast<std::size_t>(it - domain.begin());
    auto pick = static_cast<std::size_t>(value_rng.below(domain.size() - 1));
    if (pick >= skip) ++pick;
    out[cls] = domain[pick];
    return out;
}

bool accept(double delta_z, double temperature, Rng& rng)
{
    if (delta_z < 0.0) return true;
    return rng.uniform() < std::exp(-delta_z / temperature);
}

SolveResult anneal(const LabeledDataset& ds, const FunctionSet& fs, const ObjectiveWeights& w, const AnnealConfig& cfg,
                   std::span<const int> domain, const AnnealObserver& observer)
{
    cfg.validate();
    w.validate();
    const auto start = std::chrono::steady_clock::now();

    std::vector<int> dom(domain.begin(), domain.end());
    if (dom.empty()) dom = fs.domain(CorrectionMode::Dcs);
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    if (std::find(dom.begin(), dom.end(), fs.dont_change_index()) == dom.end())
        throw ValidationError("selection domain must contain the Don't Change index");

    if (w.enable_cobias) {
        std::vector<bool> present(static_cast<std::size_t>(ds.num_classes()), false);
        for (int y : ds.labels()) present[y - 1] = true;
        if (std::count(present.begin(), present.end(), true) < 2)
            throw SolverError("annealing with COBias needs at least two classes present in the dataset");
    }

    const ObjectiveEvaluator evaluate(ds, fs, dom, w);
    const int n = ds.num_classes();
    const auto accept_cap = static_cast<int>(std::ceil(cfg.lambda1 * n));
    const auto generate_cap = static_cast<int>(std::ceil(cfg.lambda2 * n));

    Rng coordinate_rng = make_rng(cfg.seed, Stream::Coordinate);
    Rng value_rng = make_rng(cfg.seed, Stream::Value);
    Rng accept_rng = make_rng(cfg.seed, Stream::Acceptance);

    SolveResult result;
    SelectionVector current = initial_solution(fs, n);
    double current_z = evaluate(current);
    result.best_xi = current;
    result.best_z = current_z;
    result.evaluations = 1;

    for (int t = 0; t < cfg.max_outer_loops; ++t) {
        const double temp = cfg.temperature(t);
        if (temp < cfg.min_temperature) break;

        LoopStats stats;
        while (stats.generated < generate_cap && stats.accepted < accept_cap) {
            SelectionVector candidate = neighbor(current, dom, coordinate_rng, value_rng);
            const double z = evaluate(candidate);
            ++stats.generated;
            ++result.evaluations;
            if (z < result.best_z) {
                result.best_z = z;
                result.best_xi = candidate;
            }
            const bool ok = accept(z - current_z, temp, accept_rng);
            if (observer) observer(AnnealStep{t, temp, current, candidate, current_z, z, ok});
            if (ok) {
                ++stats.accepted;
                current = std::move(candidate);
                current_z = z;
            }
        }
        result.temperatures.push_back(temp);
        result.z_trace.push_back(result.best_z);
        result.acceptance_counts.push_back(stats);
        ++result.outer_loops_run;
    }

    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

SolveResult anneal_restarts(const LabeledDataset& ds, const FunctionSet& fs, const ObjectiveWeights& w,
                            const AnnealConfig& cfg, std::span<const std::uint64_t> seeds, int threads,
                            std::span<const int> domain)
{
    if (seeds.empty()) throw ValidationError("need at least one seed");
    std::vector<SolveResult> results(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                AnnealConfig c = cfg;
                c.seed = seeds[i];
                results[i] = anneal(ds, fs, w, c, domain);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n_threads = std::clamp(threads, 1, static_cast<int>(seeds.size()));
    std::vector<std::jthread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();

    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].best_z < results[best].best_z) best = i;
    return results[best];
}

std::string solve_result_to_json(const SolveResult& r)
{
    using nlohmann::json;
    json j;
    j["best_xi"] = r.best_xi.values();
    j["best_z"] = r.best_z;
    j["z_trace"] = r.z_trace;
    j["temperatures"] = r.temperatures;
    j["acceptance_counts"] = json::array();
    for (const auto& s : r.acceptance_counts) j["acceptance_counts"].push_back({s.generated, s.accepted});
    j["outer_loops_run"] = r.outer_loops_run;
    j["evaluations"] = r.evaluations;
    j["wall_time"] = r.wall_time;
    return j.dump(2);
}

SolveResult solve_result_from_json(const std::string& text)
{
    SolveResult r;
    try {
        const auto j = nlohmann::json::parse(text);
        r.best_xi = SelectionVector(j.at("best_xi").get<std::vector<int>>());
        r.best_z = j.at("best_z").get<double>();
        r.z_trace = j.at("z_trace").get<std::vector<double>>();
        r.temperatures = j.at("temperatures").get<std::vector<double>>();
        for (const auto& s : j.at("acceptance_counts")) r.acceptance_counts.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
        r.outer_loops_run = j.at("outer_loops_run").get<int>();
        r.evaluations = j.value("evaluations", 0L);
        r.wall_time = j.at("wall_time").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed solve result: ") + e.what());
    }
    return r;
}

std::string trace_to_csv(const SolveResult& r)
{
    std::string out = "outer_loop,temperature,best_z,generated,accepted\n";
    char buf[160];
    for (std::size_t t = 0; t < r.z_trace.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d,%d\n", t, r.temperatures[t], r.z_trace[t],
                      r.acceptance_counts[t].generated, r.acceptance_counts[t].accepted);
        out += buf;
    }
    return out;
}

} // namespace dcs
