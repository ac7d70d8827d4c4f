#include "dcs/dataset.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "dcs/error.hpp"
#include "dcs/rng.hpp"

namespace dcs {

namespace {

std::string row_tag(int row) { return "row " + std::to_string(row + 1); }

void validate(const ProbMatrix<double>& probs, const Labels& labels, const std::vector<std::string>& ids)
{
    const auto m = probs.rows();
    const auto n = probs.cols();
    if (m < 1) throw ValidationError("dataset has no instances");
    if (n < 2) throw ValidationError("dataset needs at least 2 classes, got " + std::to_string(n));
    if (static_cast<Eigen::Index>(labels.size()) != m)
        throw ValidationError("label count " + std::to_string(labels.size()) + " does not match " +
                              std::to_string(m) + " probability rows");
    if (static_cast<Eigen::Index>(ids.size()) != m)
        throw ValidationError("id count " + std::to_string(ids.size()) + " does not match " +
                              std::to_string(m) + " probability rows");

    std::unordered_set<std::string> seen;
    seen.reserve(ids.size());
    for (Eigen::Index r = 0; r < m; ++r) {
        const int row = static_cast<int>(r);
        for (Eigen::Index c = 0; c < n; ++c) {
            const double p = probs(r, c);
            if (!(p >= 0.0 && p <= 1.0))
                throw ValidationError(row_tag(row) + ": probability p_" + std::to_string(c + 1) + "=" +
                                      std::to_string(p) + " outside [0,1]");
        }
        const int y = labels[r];
        if (y < 1 || y > n)
            throw ValidationError(row_tag(row) + ": label " + std::to_string(y) + " outside 1.." + std::to_string(n));
        if (!seen.insert(ids[r]).second) throw ValidationError(row_tag(row) + ": duplicate id '" + ids[r] + "'");
    }
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

std::string format_prob(double p)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", p);
    return buf;
}

} // namespace

LabeledDataset::LabeledDataset(ProbMatrix<double> probabilities, Labels labels, std::vector<std::string> ids)
    : probs_(std::move(probabilities)), labels_(std::move(labels)), ids_(std::move(ids))
{
    validate(probs_, labels_, ids_);
}

LabeledDataset LabeledDataset::subset(std::span<const int> rows) const
{
    ProbMatrix<double> p(static_cast<Eigen::Index>(rows.size()), probs_.cols());
    Labels y;
    std::vector<std::string> id;
    y.reserve(rows.size());
    id.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        if (r < 0 || r >= num_instances()) throw ValidationError("subset row " + std::to_string(r) + " out of range");
        p.row(static_cast<Eigen::Index>(i)) = probs_.row(r);
        y.push_back(labels_[r]);
        id.push_back(ids_[r]);
    }
    return LabeledDataset(std::move(p), std::move(y), std::move(id));
}

std::uint64_t LabeledDataset::fingerprint() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(probs_.rows()), static_cast<std::uint64_t>(probs_.cols())};
    mix(dims, sizeof dims);
    for (Eigen::Index r = 0; r < probs_.rows(); ++r) {
        mix(ids_[r].data(), ids_[r].size());
        const unsigned char sep = 0;
        mix(&sep, 1);
        const std::int64_t y = labels_[r];
        mix(&y, sizeof y);
        for (Eigen::Index c = 0; c < probs_.cols(); ++c) {
            const auto bits = std::bit_cast<std::uint64_t>(probs_(r, c));
            mix(&bits, sizeof bits);
        }
    }
    return h;
}

DataFormat format_from_string(const std::string& name)
{
    if (name == "csv") return DataFormat::Csv;
    if (name == "json") return DataFormat::Json;
    throw ValidationError("unknown dataset format '" + name + "' (expected csv or json)");
}

DataFormat format_from_path(const std::filesystem::path& path)
{
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".json" ? DataFormat::Json : DataFormat::Csv;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

LabeledDataset load_dataset(const std::filesystem::path& path, DataFormat format)
{
    const std::string text = read_text_file(path);
    return format == DataFormat::Json ? parse_json_dataset(text) : parse_csv_dataset(text);
}

LabeledDataset parse_csv_dataset(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("CSV is empty: missing header");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3); // UTF-8 BOM

    const auto header = split_fields(line);
    if (header.size() < 4 || header[0] != "id" || header[1] != "label")
        throw ValidationError("CSV header must be id,label,p_1,...,p_N with N >= 2");
    const int n = static_cast<int>(header.size()) - 2;
    for (int c = 0; c < n; ++c) {
        if (header[c + 2] != "p_" + std::to_string(c + 1))
            throw ValidationError("CSV header column " + std::to_string(c + 3) + " must be p_" + std::to_string(c + 1));
    }

    std::vector<std::vector<double>> rows;
    Labels labels;
    std::vector<std::string> ids;
    int row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != n + 2)
            throw ValidationError(row_tag(row) + ": expected " + std::to_string(n + 2) + " fields, got " +
                                  std::to_string(fields.size()));
        ids.emplace_back(fields[0]);
        int y = 0;
        if (!parse_number(fields[1], y))
            throw ValidationError(row_tag(row) + ": label '" + std::string(fields[1]) + "' is not an integer");
        labels.push_back(y);
        std::vector<double> probs(static_cast<std::size_t>(n));
        for (int c = 0; c < n; ++c) {
            if (!parse_number(fields[c + 2], probs[c]))
                throw ValidationError(row_tag(row) + ": p_" + std::to_string(c + 1) + " '" + std::string(fields[c + 2]) +
                                      "' is not a number");
        }
        rows.push_back(std::move(probs));
        ++row;
    }

    ProbMatrix<double> p(static_cast<Eigen::Index>(rows.size()), n);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < n; ++c) p(static_cast<Eigen::Index>(r), c) = rows[r][c];
    return LabeledDataset(std::move(p), std::move(labels), std::move(ids));
}

LabeledDataset parse_json_dataset(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("JSON parse error: ") + e.what());
    }
    if (!doc.is_array()) throw ValidationError("JSON dataset must be an array of records");
    if (doc.empty()) throw ValidationError("dataset has no instances");

    Labels labels;
    std::vector<std::string> ids;
    ProbMatrix<double> p;
    int n = -1;
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const auto& rec = doc[r];
        const int row = static_cast<int>(r);
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("label") || !rec.contains("probs"))
            throw ValidationError(row_tag(row) + ": record needs id, label and probs");
        if (!rec["id"].is_string()) throw ValidationError(row_tag(row) + ": id must be a string");
        if (!rec["label"].is_number_integer()) throw ValidationError(row_tag(row) + ": label must be an integer");
        const auto& probs = rec["probs"];
        if (!probs.is_array()) throw ValidationError(row_tag(row) + ": probs must be an array");
        if (n < 0) {
            n = static_cast<int>(probs.size());
            if (n < 2) throw ValidationError("dataset needs at least 2 classes, got " + std::to_string(n));
            p.resize(static_cast<Eigen::Index>(doc.size()), n);
        } else if (static_cast<int>(probs.size()) != n) {
            throw ValidationError(row_tag(row) + ": expected " + std::to_string(n) + " probabilities, got " +
                                  std::to_string(probs.size()));
        }
        for (int c = 0; c < n; ++c) {
            if (!probs[c].is_number()) throw ValidationError(row_tag(row) + ": probs entries must be numbers");
            p(row, c) = probs[c].get<double>();
        }
        ids.push_back(rec["id"].get<std::string>());
        labels.push_back(rec["label"].get<int>());
    }
    return LabeledDataset(std::move(p), std::move(labels), std::move(ids));
}

std::string dataset_to_csv(const LabeledDataset& ds)
{
    std::string out = "id,label";
    for (int c = 1; c <= ds.num_classes(); ++c) out += ",p_" + std::to_string(c);
    out += '\n';
    const auto& p = ds.probabilities();
    for (int r = 0; r < ds.num_instances(); ++r) {
        out += ds.ids()[r];
        out += ',';
        out += std::to_string(ds.labels()[r]);
        for (int c = 0; c < ds.num_classes(); ++c) {
            out += ',';
            out += format_prob(p(r, c));
        }
        out += '\n';
    }
    return out;
}

void save_dataset_csv(const LabeledDataset& ds, const std::filesystem::path& path)
{
    write_text_file(path, dataset_to_csv(ds));
}

DatasetSplit split_dataset(const LabeledDataset& ds, double dev_fraction, std::uint64_t seed)
{
    if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
        throw ValidationError("dev fraction must lie in (0,1), got " + std::to_string(dev_fraction));
    const int m = ds.num_instances();
    if (m < 2) throw ValidationError("need at least 2 instances to split, got " + std::to_string(m));
    const int n_opt = static_cast<int>(std::ceil(static_cast<double>(m) * (1.0 - dev_fraction)));
    if (n_opt >= m) throw ValidationError("dev fraction " + std::to_string(dev_fraction) + " leaves an empty dev set for M=" + std::to_string(m));
    if (n_opt < 1) throw ValidationError("dev fraction leaves an empty optimization set");

    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(seed, Stream::Split);
    for (int i = m - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<int> opt_rows(order.begin(), order.begin() + n_opt);
    std::vector<int> dev_rows(order.begin() + n_opt, order.end());
    return DatasetSplit{ds.subset(opt_rows), ds.subset(dev_rows), seed, dev_fraction, std::move(opt_rows), std::move(dev_rows)};
}

std::string predictions_to_csv(const LabeledDataset& ds, const Labels& preds)
{
    if (static_cast<int>(preds.size()) != ds.num_instances())
        throw ValidationError("prediction count " + std::to_string(preds.size()) + " does not match " +
                              std::to_string(ds.num_instances()) + " instances");
    std::string out = "id,label,prediction\n";
    for (int r = 0; r < ds.num_instances(); ++r) {
        out += ds.ids()[r];
        out += ',' + std::to_string(ds.labels()[r]) + ',' + std::to_string(preds[r]) + '\n';
    }
    return out;
}

void save_predictions(const LabeledDataset& ds, const Labels& preds, const std::filesystem::path& path)
{
    write_text_file(path, predictions_to_csv(ds, preds));
}

} // namespace dcs
