#ifndef RECODYN_TABLES_HPP
#define RECODYN_TABLES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "recodyn/coded.hpp"

namespace recodyn {

// Dense counts matrix for row variable vs column variable. Convention
// throughout: rows = conditioning variable, columns = response.
struct ContingencyTable {
    std::string row_name, col_name;
    std::vector<std::string> row_labels, col_labels;
    Code n_rows = 0, n_cols = 0;
    std::vector<std::int64_t> counts;    // n_rows x n_cols, row-major
    std::vector<std::int64_t> row_sums, col_sums;
    std::int64_t total = 0;

    std::int64_t at(Code r, Code c) const {
        return counts[static_cast<std::size_t>(r) * static_cast<std::size_t>(n_cols) +
                      static_cast<std::size_t>(c)];
    }
    std::int64_t occupied_cells() const;
    ContingencyTable transposed() const;
};

ContingencyTable build_table(const CodedColumn& row, const CodedColumn& col);

// Construct directly from count data (e.g. externally tabulated counts).
ContingencyTable table_from_counts(std::vector<std::int64_t> counts, Code n_rows, Code n_cols);

// Each row normalized to sum 1. Requires every row_sum > 0.
std::vector<double> row_proportions(const ContingencyTable& t);

struct OddsRow {
    std::string label;
    std::int64_t count_col0 = 0, count_col1 = 0;
    double p0 = 0.0, p1 = 0.0;
    double odds = 0.0;          // p1/p0
    bool infinite = false;      // count_col0 == 0
};

// Per-row odds for a 2-column table.
std::vector<OddsRow> odds_table(const ContingencyTable& t);

// odds(r1) / odds(r2); infinite flagged via the bool.
struct OddsRatio {
    double value = 0.0;
    bool infinite = false;
};
OddsRatio odds_ratio(const std::vector<OddsRow>& rows, Code r1, Code r2);

std::string table_csv(const ContingencyTable& t);

} // namespace recodyn

#endif
