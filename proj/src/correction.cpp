#include "dcs/correction.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "dcs/error.hpp"

namespace dcs {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

double eval_weight(int k, int num_memberships, int num_weights, double p)
{
    if (num_weights < 1) throw ValidationError("weight count must be positive");
    if (k <= num_memberships || k > num_memberships + num_weights)
        throw ValidationError("index " + std::to_string(k) + " is not a weight index (" +
                              std::to_string(num_memberships + 1) + ".." +
                              std::to_string(num_memberships + num_weights) + ")");
    return static_cast<double>(k - num_memberships) / static_cast<double>(num_weights) * p;
}

std::string to_string(FunctionKind kind)
{
    return kind == FunctionKind::Membership ? "membership" : "weight";
}

std::string to_string(CorrectionMode mode)
{
    switch (mode) {
    case CorrectionMode::Dcs: return "dcs";
    case CorrectionMode::Dnip: return "dnip";
    case CorrectionMode::Furud: return "furud";
    }
    return "dcs";
}

CorrectionMode mode_from_string(const std::string& name)
{
    if (name == "dcs") return CorrectionMode::Dcs;
    if (name == "dnip") return CorrectionMode::Dnip;
    if (name == "furud") return CorrectionMode::Furud;
    throw ValidationError("unknown mode '" + name + "' (expected dcs, dnip or furud)");
}

FunctionSet::FunctionSet(std::vector<TriangularMembership> memberships, int num_weights)
    : memberships_(std::move(memberships)), num_weights_(num_weights), dont_change_(0)
{
    if (num_weights_ < 1) throw ValidationError("catalog needs at least one weight, got " + std::to_string(num_weights_));
    for (std::size_t i = 0; i < memberships_.size(); ++i) {
        const auto& f = memberships_[i];
        const std::string tag = "membership " + std::to_string(i + 1);
        if (!(f.a >= 0.0 && f.c <= 1.0 && f.a <= f.b && f.b <= f.c))
            throw ValidationError(tag + ": need 0 <= a <= b <= c <= 1");
        if (f.a == f.b && f.b == f.c) throw ValidationError(tag + ": degenerate triangle with a = b = c");
        if (dont_change_ == 0 && f.is_dont_change()) dont_change_ = static_cast<int>(i) + 1;
    }
    if (dont_change_ == 0) throw ValidationError("catalog lacks the Don't Change membership (a=0, b=1, c=1)");
}

const TriangularMembership& FunctionSet::membership(int k) const
{
    if (k < 1 || k > num_memberships()) throw ValidationError("index " + std::to_string(k) + " is not a membership index");
    return memberships_[k - 1];
}

FunctionKind FunctionSet::kind(int k) const
{
    if (!contains(k)) throw ValidationError("catalog index " + std::to_string(k) + " out of range 1.." + std::to_string(size()));
    return k <= num_memberships() ? FunctionKind::Membership : FunctionKind::Weight;
}

std::string FunctionSet::describe(int k) const
{
    if (kind(k) == FunctionKind::Membership) {
        const auto& f = memberships_[k - 1];
        return "a=" + fmt(f.a) + " b=" + fmt(f.b) + " c=" + fmt(f.c);
    }
    return "w=" + fmt(static_cast<double>(k - num_memberships()) / num_weights_);
}

std::vector<int> FunctionSet::domain(CorrectionMode mode) const
{
    std::vector<int> out;
    for (int k = 1; k <= size(); ++k) {
        const bool member = k <= num_memberships();
        switch (mode) {
        case CorrectionMode::Dcs: out.push_back(k); break;
        case CorrectionMode::Dnip:
            if (!member || k == dont_change_) out.push_back(k);
            break;
        case CorrectionMode::Furud:
            if (member) out.push_back(k);
            break;
        }
    }
    return out;
}

FunctionSet default_function_set()
{
    std::vector<TriangularMembership> ms;
    ms.push_back({0.0, 1.0, 1.0});
    for (int i = 1; i <= 9; ++i) {
        const double peak = i / 10.0;
        ms.push_back({std::max(0.0, peak - 0.25), peak, std::min(1.0, peak + 0.25)});
    }
    for (int i = 1; i <= 5; ++i) ms.push_back({0.0, 0.0, i / 5.0});
    for (int i = 1; i <= 4; ++i) ms.push_back({i / 5.0, 1.0, 1.0});
    return FunctionSet(std::move(ms), 30);
}

std::string function_set_to_json(const FunctionSet& fs)
{
    nlohmann::json j;
    j["memberships"] = nlohmann::json::array();
    for (const auto& f : fs.memberships()) j["memberships"].push_back({{"a", f.a}, {"b", f.b}, {"c", f.c}});
    j["num_weights"] = fs.num_weights();
    return j.dump(2);
}

FunctionSet function_set_from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("catalog JSON parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("memberships") || !j.contains("num_weights") || !j["memberships"].is_array() ||
        !j["num_weights"].is_number_integer())
        throw ValidationError("catalog must be {\"memberships\": [...], \"num_weights\": int}");
    std::vector<TriangularMembership> ms;
    for (const auto& m : j["memberships"]) {
        if (!m.is_object() || !m.contains("a") || !m.contains("b") || !m.contains("c") || !m["a"].is_number() ||
            !m["b"].is_number() || !m["c"].is_number())
            throw ValidationError("catalog membership entries need numeric a, b, c");
        ms.push_back({m["a"].get<double>(), m["b"].get<double>(), m["c"].get<double>()});
    }
    return FunctionSet(std::move(ms), j["num_weights"].get<int>());
}

bool SelectionVector::valid_for(const FunctionSet& fs) const
{
    return std::all_of(xi_.begin(), xi_.end(), [&](int k) { return fs.contains(k); });
}

void check_selection(const FunctionSet& fs, const SelectionVector& xi, int num_classes)
{
    if (xi.num_classes() != num_classes)
        throw ValidationError("selection has " + std::to_string(xi.num_classes()) + " entries for " +
                              std::to_string(num_classes) + " classes");
    for (int i = 0; i < xi.num_classes(); ++i) {
        if (!fs.contains(xi[i]))
            throw ValidationError("selection entry for class " + std::to_string(i + 1) + " is " + std::to_string(xi[i]) +
                                  ", outside catalog 1.." + std::to_string(fs.size()));
    }
}

} // namespace dcs
