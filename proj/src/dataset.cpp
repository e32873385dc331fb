#include "recodyn/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "recodyn/errors.hpp"

namespace recodyn {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "?";
}

bool parse_number(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

// minimal CSV line splitter with double-quote support
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

CodedColumn Feature::coded(std::span<const std::uint32_t> rows) const {
    if (kind != FeatureKind::Categorical)
        throw DataError("Feature::coded: '" + name + "' is continuous; bin it first");
    CodedColumn out;
    out.name = name;
    out.provenance = Provenance::Raw;
    out.codes.reserve(rows.size());
    for (std::uint32_t r : rows) out.codes.push_back(codes[r]);
    // compact to occupied categories over the selected rows
    std::vector<Code> remap(cat_labels.size(), -1);
    for (Code c : out.codes) remap[static_cast<std::size_t>(c)] = 0;
    Code next = 0;
    for (std::size_t i = 0; i < remap.size(); ++i)
        if (remap[i] == 0) {
            remap[i] = next++;
            out.labels.push_back(cat_labels[i]);
        }
    for (Code& c : out.codes) c = remap[static_cast<std::size_t>(c)];
    out.n_cats = next;
    return out;
}

CodedColumn Feature::coded() const {
    std::vector<std::uint32_t> all(size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
    return coded(all);
}

const Feature& Dataset::feature(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw DataError("unknown feature '" + name + "'");
    return features_[it->second];
}

bool Dataset::has(const std::string& name) const { return index_.count(name) > 0; }

std::vector<std::string> Dataset::names() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (const auto& f : features_) out.push_back(f.name);
    return out;
}

Dataset::CompleteRows Dataset::complete_rows(const std::vector<std::string>& cols) const {
    CompleteRows out;
    out.rows.reserve(n_rows_);
    for (std::uint32_t i = 0; i < n_rows_; ++i) {
        bool ok = true;
        for (const auto& c : cols) {
            const Feature& f = feature(c);
            if (f.has_missing() && f.missing[i]) {
                ok = false;
                break;
            }
        }
        if (ok)
            out.rows.push_back(i);
        else
            ++out.dropped;
    }
    return out;
}

Dataset Dataset::from_columns(std::vector<Feature> features) {
    Dataset d;
    if (features.empty()) throw DataError("Dataset: no columns");
    d.n_rows_ = features.front().size();
    for (auto& f : features) {
        if (f.size() != d.n_rows_) throw DataError("Dataset: column length mismatch at '" + f.name + "'");
        if (d.index_.count(f.name)) throw DataError("Dataset: duplicate feature name '" + f.name + "'");
        d.index_[f.name] = d.features_.size();
        d.features_.push_back(std::move(f));
    }
    return d;
}

Dataset ingest_csv(const std::string& path, const std::vector<std::string>& response_names,
                   const IngestOptions& opts) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file '" + path + "'");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.empty()) throw DataError("empty header in '" + path + "'");

    for (const auto& r : response_names)
        if (std::find(header.begin(), header.end(), r) == header.end())
            throw DataError("response '" + r + "' not in header of '" + path + "'");

    const std::size_t ncol = header.size();
    std::vector<std::vector<std::string>> cells(ncol);
    std::size_t nrow = 0, dropped_at_ingest = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != ncol)
            throw DataError("row " + std::to_string(nrow + 2) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(ncol));
        if (opts.drop_missing) {
            bool any_missing = false;
            for (const auto& f : fields)
                if (is_missing_token(trim(f))) any_missing = true;
            if (any_missing) {
                ++dropped_at_ingest;
                continue;
            }
        }
        for (std::size_t c = 0; c < ncol; ++c) cells[c].push_back(std::move(fields[c]));
        ++nrow;
    }
    if (nrow == 0) throw DataError("zero rows in '" + path + "'");
    if (dropped_at_ingest > 0)
        std::cerr << "notice: dropped " << dropped_at_ingest << " rows with missing values at ingest\n";

    std::vector<Feature> feats(ncol);
    for (std::size_t c = 0; c < ncol; ++c) {
        Feature& f = feats[c];
        f.name = trim(header[c]);
        f.is_response =
            std::find(response_names.begin(), response_names.end(), f.name) != response_names.end();

        std::size_t parseable = 0, present = 0;
        std::vector<double> nums(nrow, 0.0);
        std::vector<bool> miss(nrow, false);
        bool any_missing = false;
        for (std::size_t i = 0; i < nrow; ++i) {
            const std::string tok = trim(cells[c][i]);
            if (is_missing_token(tok)) {
                miss[i] = true;
                any_missing = true;
                continue;
            }
            ++present;
            double v;
            if (parse_number(tok, v)) {
                nums[i] = v;
                ++parseable;
            }
        }
        if (present == 0) throw DataError("column '" + f.name + "' has zero non-missing rows");

        FeatureKind kind = (parseable == present) ? FeatureKind::Continuous : FeatureKind::Categorical;
        const auto ov = opts.kind_overrides.find(f.name);
        if (ov != opts.kind_overrides.end()) kind = ov->second;
        f.kind = kind;

        if (kind == FeatureKind::Continuous) {
            if (parseable != present) throw DataError("column '" + f.name + "' has zero parseable rows under continuous override");
            f.numeric = std::move(nums);
        } else {
            // dense codes by first appearance order of labels
            std::map<std::string, Code> lut;
            f.codes.assign(nrow, 0);
            for (std::size_t i = 0; i < nrow; ++i) {
                if (miss[i]) continue;
                const std::string tok = trim(cells[c][i]);
                auto it = lut.find(tok);
                if (it == lut.end()) {
                    it = lut.emplace(tok, static_cast<Code>(f.cat_labels.size())).first;
                    f.cat_labels.push_back(tok);
                }
                f.codes[i] = it->second;
            }
        }
        if (any_missing) f.missing = std::move(miss);
        cells[c].clear();
        cells[c].shrink_to_fit();
    }

    return Dataset::from_columns(std::move(feats));
}

std::map<std::string, FeatureKind> load_kind_overrides(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open kind-override file '" + path + "'");
    std::map<std::string, FeatureKind> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("kind-override line " + std::to_string(lineno) + ": expected 'name = kind'");
        const std::string name = trim(line.substr(0, eq));
        const std::string kind = trim(line.substr(eq + 1));
        if (kind == "continuous")
            out[name] = FeatureKind::Continuous;
        else if (kind == "categorical")
            out[name] = FeatureKind::Categorical;
        else
            throw ConfigError("kind-override line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    }
    return out;
}

std::string Dataset::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t c = 0; c < features_.size(); ++c) {
        if (c) os << ",";
        os << features_[c].name;
    }
    os << "\n";
    for (std::size_t i = 0; i < n_rows_; ++i) {
        for (std::size_t c = 0; c < features_.size(); ++c) {
            if (c) os << ",";
            const Feature& f = features_[c];
            if (f.has_missing() && f.missing[i]) continue;
            if (f.kind == FeatureKind::Continuous)
                os << f.numeric[i];
            else
                os << f.cat_labels[static_cast<std::size_t>(f.codes[i])];
        }
        os << "\n";
    }
    return os.str();
}

} // namespace recodyn
