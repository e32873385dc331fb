#ifndef RECODYN_DATASET_HPP
#define RECODYN_DATASET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recodyn/coded.hpp"

namespace recodyn {

enum class FeatureKind { Continuous, Categorical };

struct Feature {
    std::string name;
    FeatureKind kind = FeatureKind::Continuous;
    bool is_response = false;
    std::vector<double> numeric;          // Continuous
    std::vector<Code> codes;              // Categorical (dense codes)
    std::vector<std::string> cat_labels;  // Categorical label set
    std::vector<bool> missing;            // empty when no missing values

    std::size_t size() const {
        return kind == FeatureKind::Continuous ? numeric.size() : codes.size();
    }
    bool has_missing() const { return !missing.empty(); }
    bool is_binary() const { return kind == FeatureKind::Categorical && cat_labels.size() == 2; }

    // Categorical feature as a CodedColumn restricted to the given rows.
    CodedColumn coded(std::span<const std::uint32_t> rows) const;
    CodedColumn coded() const;
};

// Immutable row-aligned store. Construct via ingest_csv or from_columns.
class Dataset {
public:
    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return features_.size(); }
    const std::vector<Feature>& features() const { return features_; }
    const Feature& feature(const std::string& name) const;
    const Feature& feature(std::size_t idx) const { return features_.at(idx); }
    bool has(const std::string& name) const;
    std::vector<std::string> names() const;

    // Rows with no missing value in any of the given columns, plus how many
    // were dropped. Exclusion is per-analysis, not global.
    struct CompleteRows {
        std::vector<std::uint32_t> rows;
        std::size_t dropped = 0;
    };
    CompleteRows complete_rows(const std::vector<std::string>& cols) const;

    static Dataset from_columns(std::vector<Feature> features);

    std::string to_csv() const;

private:
    std::size_t n_rows_ = 0;
    std::vector<Feature> features_;
    std::map<std::string, std::size_t> index_;
};

struct IngestOptions {
    // true: rows with a missing value in any column are dropped at ingest
    // (global complete-case). false (default): rows are kept with per-column
    // missing masks and excluded per-analysis by complete_rows().
    bool drop_missing = false;
    // per-column kind override: name -> "continuous" | "categorical"
    std::map<std::string, FeatureKind> kind_overrides;
};

Dataset ingest_csv(const std::string& path, const std::vector<std::string>& response_names,
                   const IngestOptions& opts = {});

// "name = continuous|categorical" lines; '#' comments.
std::map<std::string, FeatureKind> load_kind_overrides(const std::string& path);

} // namespace recodyn

#endif
