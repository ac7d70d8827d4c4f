#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dcs {

/// Row-major so that one instance's class probabilities are contiguous.
template <typename Scalar>
using ProbMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Class labels are 1-based everywhere (files, predictions, reports).
using Labels = std::vector<int>;

enum class DataFormat { Csv, Json };

/// M instances, N classes: raw classifier probabilities plus ground truth.
///
/// Immutable once constructed. Construction validates every invariant:
/// probabilities in [0,1], labels in {1..N}, N >= 2, M >= 1, unique ids.
/// Probabilities are kept as given; rows need not sum to one.
class LabeledDataset {
public:
    LabeledDataset(ProbMatrix<double> probabilities, Labels labels, std::vector<std::string> ids);

    int num_instances() const { return static_cast<int>(probs_.rows()); }
    int num_classes() const { return static_cast<int>(probs_.cols()); }

    const ProbMatrix<double>& probabilities() const { return probs_; }
    const Labels& labels() const { return labels_; }
    const std::vector<std::string>& ids() const { return ids_; }

    /// New dataset made of the given rows, in the given order.
    LabeledDataset subset(std::span<const int> rows) const;

    /// FNV-1a over ids, labels and the exact bit patterns of the probabilities.
    std::uint64_t fingerprint() const;

private:
    ProbMatrix<double> probs_;
    Labels labels_;
    std::vector<std::string> ids_;
};

struct DatasetSplit {
    LabeledDataset optimization_set;
    LabeledDataset dev_set;
    std::uint64_t seed;
    double dev_fraction;
    /// Parent row indices of each part, in part order.
    std::vector<int> optimization_rows;
    std::vector<int> dev_rows;
};

DataFormat format_from_string(const std::string& name);
/// Guess from the file extension; ".json" is JSON, anything else CSV.
DataFormat format_from_path(const std::filesystem::path& path);

LabeledDataset load_dataset(const std::filesystem::path& path, DataFormat format);
LabeledDataset parse_csv_dataset(const std::string& text);
LabeledDataset parse_json_dataset(const std::string& text);

/// Writes `id,label,p_1..p_N` with 12 significant digits per probability.
void save_dataset_csv(const LabeledDataset& ds, const std::filesystem::path& path);
std::string dataset_to_csv(const LabeledDataset& ds);

/// Shuffles the rows with a seeded Fisher-Yates pass, then takes the first
/// ceil(M * (1 - dev_fraction)) rows as the optimization set and the rest as
/// the dev set. Throws ValidationError when either part would be empty.
DatasetSplit split_dataset(const LabeledDataset& ds, double dev_fraction, std::uint64_t seed);

/// CSV with columns id,label,prediction in dataset row order.
void save_predictions(const LabeledDataset& ds, const Labels& preds, const std::filesystem::path& path);
std::string predictions_to_csv(const LabeledDataset& ds, const Labels& preds);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace dcs
