#include "recodyn/tables.hpp"

#include <numeric>
#include <sstream>

#include "recodyn/errors.hpp"

namespace recodyn {

std::int64_t ContingencyTable::occupied_cells() const {
    std::int64_t occ = 0;
    for (std::int64_t c : counts)
        if (c > 0) ++occ;
    return occ;
}

ContingencyTable ContingencyTable::transposed() const {
    ContingencyTable t;
    t.row_name = col_name;
    t.col_name = row_name;
    t.row_labels = col_labels;
    t.col_labels = row_labels;
    t.n_rows = n_cols;
    t.n_cols = n_rows;
    t.counts.assign(counts.size(), 0);
    for (Code r = 0; r < n_rows; ++r)
        for (Code c = 0; c < n_cols; ++c)
            t.counts[static_cast<std::size_t>(c) * static_cast<std::size_t>(n_rows) +
                     static_cast<std::size_t>(r)] = at(r, c);
    t.row_sums = col_sums;
    t.col_sums = row_sums;
    t.total = total;
    return t;
}

ContingencyTable build_table(const CodedColumn& row, const CodedColumn& col) {
    if (row.size() != col.size()) throw DataError("build_table: length mismatch");
    ContingencyTable t;
    t.row_name = row.name;
    t.col_name = col.name;
    t.row_labels = row.labels;
    t.col_labels = col.labels;
    t.n_rows = row.n_cats;
    t.n_cols = col.n_cats;
    t.counts.assign(static_cast<std::size_t>(t.n_rows) * static_cast<std::size_t>(t.n_cols), 0);
    const std::size_t nc = static_cast<std::size_t>(t.n_cols);
    for (std::size_t i = 0; i < row.size(); ++i)
        ++t.counts[static_cast<std::size_t>(row.codes[i]) * nc +
                   static_cast<std::size_t>(col.codes[i])];
    t.row_sums.assign(static_cast<std::size_t>(t.n_rows), 0);
    t.col_sums.assign(static_cast<std::size_t>(t.n_cols), 0);
    for (Code r = 0; r < t.n_rows; ++r)
        for (Code c = 0; c < t.n_cols; ++c) {
            const std::int64_t v = t.at(r, c);
            t.row_sums[static_cast<std::size_t>(r)] += v;
            t.col_sums[static_cast<std::size_t>(c)] += v;
        }
    t.total = static_cast<std::int64_t>(row.size());
    return t;
}

ContingencyTable table_from_counts(std::vector<std::int64_t> counts, Code n_rows, Code n_cols) {
    if (counts.size() != static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols))
        throw DataError("table_from_counts: size mismatch");
    ContingencyTable t;
    t.n_rows = n_rows;
    t.n_cols = n_cols;
    t.counts = std::move(counts);
    t.row_sums.assign(static_cast<std::size_t>(n_rows), 0);
    t.col_sums.assign(static_cast<std::size_t>(n_cols), 0);
    t.total = 0;
    for (Code r = 0; r < n_rows; ++r)
        for (Code c = 0; c < n_cols; ++c) {
            const std::int64_t v = t.at(r, c);
            if (v < 0) throw DataError("table_from_counts: negative count");
            t.row_sums[static_cast<std::size_t>(r)] += v;
            t.col_sums[static_cast<std::size_t>(c)] += v;
            t.total += v;
        }
    for (Code r = 0; r < n_rows; ++r) t.row_labels.push_back(std::to_string(r));
    for (Code c = 0; c < n_cols; ++c) t.col_labels.push_back(std::to_string(c));
    return t;
}

std::vector<double> row_proportions(const ContingencyTable& t) {
    std::vector<double> p(t.counts.size(), 0.0);
    for (Code r = 0; r < t.n_rows; ++r) {
        const std::int64_t rs = t.row_sums[static_cast<std::size_t>(r)];
        if (rs <= 0) throw DataError("row_proportions: empty row " + std::to_string(r));
        for (Code c = 0; c < t.n_cols; ++c)
            p[static_cast<std::size_t>(r) * static_cast<std::size_t>(t.n_cols) +
              static_cast<std::size_t>(c)] = static_cast<double>(t.at(r, c)) / static_cast<double>(rs);
    }
    return p;
}

std::vector<OddsRow> odds_table(const ContingencyTable& t) {
    if (t.n_cols != 2) throw DataError("odds_table: table must have exactly 2 columns");
    std::vector<OddsRow> rows;
    rows.reserve(static_cast<std::size_t>(t.n_rows));
    for (Code r = 0; r < t.n_rows; ++r) {
        OddsRow o;
        o.label = r < static_cast<Code>(t.row_labels.size()) ? t.row_labels[static_cast<std::size_t>(r)]
                                                             : std::to_string(r);
        o.count_col0 = t.at(r, 0);
        o.count_col1 = t.at(r, 1);
        const std::int64_t s = o.count_col0 + o.count_col1;
        if (s > 0) {
            o.p0 = static_cast<double>(o.count_col0) / static_cast<double>(s);
            o.p1 = static_cast<double>(o.count_col1) / static_cast<double>(s);
        }
        if (o.count_col0 == 0) {
            o.infinite = true;
        } else {
            o.odds = static_cast<double>(o.count_col1) / static_cast<double>(o.count_col0);
        }
        rows.push_back(o);
    }
    return rows;
}

OddsRatio odds_ratio(const std::vector<OddsRow>& rows, Code r1, Code r2) {
    const auto& a = rows.at(static_cast<std::size_t>(r1));
    const auto& b = rows.at(static_cast<std::size_t>(r2));
    OddsRatio out;
    if (a.infinite || b.odds == 0.0) {
        out.infinite = true;
        return out;
    }
    out.value = a.odds / b.odds;
    return out;
}

std::string table_csv(const ContingencyTable& t) {
    std::ostringstream os;
    os << t.row_name << "\\" << t.col_name;
    for (Code c = 0; c < t.n_cols; ++c)
        os << "," << (c < static_cast<Code>(t.col_labels.size()) ? t.col_labels[static_cast<std::size_t>(c)]
                                                                 : std::to_string(c));
    os << "\n";
    for (Code r = 0; r < t.n_rows; ++r) {
        os << (r < static_cast<Code>(t.row_labels.size()) ? t.row_labels[static_cast<std::size_t>(r)]
                                                          : std::to_string(r));
        for (Code c = 0; c < t.n_cols; ++c) os << "," << t.at(r, c);
        os << "\n";
    }
    return os.str();
}

} // namespace recodyn
