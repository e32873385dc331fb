#include "recodyn/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "recodyn/errors.hpp"

namespace recodyn {

namespace {

// Renumber codes densely so that every category in [0, n_cats) occurs,
// keeping category order. Returns old->new map.
std::vector<Code> compact(std::vector<Code>& codes, Code old_n_cats) {
    std::vector<std::int64_t> count(static_cast<std::size_t>(old_n_cats), 0);
    for (Code c : codes) ++count[static_cast<std::size_t>(c)];
    std::vector<Code> remap(static_cast<std::size_t>(old_n_cats), -1);
    Code next = 0;
    for (Code c = 0; c < old_n_cats; ++c)
        if (count[static_cast<std::size_t>(c)] > 0) remap[static_cast<std::size_t>(c)] = next++;
    for (Code& c : codes) c = remap[static_cast<std::size_t>(c)];
    return remap;
}

std::string format_edge(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

CodedColumn bin_feature(const std::string& name, std::span<const double> values,
                        int n_bins, BinScheme scheme) {
    const std::size_t n = values.size();
    if (n_bins < 2) throw DataError("bin_feature: n_bins must be >= 2");
    if (n == 0) throw DataError("bin_feature: empty column");

    std::set<double> distinct(values.begin(), values.end());
    if (distinct.size() < 2) throw DataError("bin_feature: constant column '" + name + "'");
    if (static_cast<std::size_t>(n_bins) > distinct.size())
        throw DataError("bin_feature: n_bins exceeds distinct values in '" + name + "'");

    CodedColumn out;
    out.name = name;
    out.provenance = Provenance::Binned;
    out.codes.resize(n);

    std::vector<double> edges; // n_bins-1 internal upper edges; value <= edge -> that bin or lower
    if (scheme == BinScheme::EqualFrequency) {
        std::vector<double> sorted(values.begin(), values.end());
        std::sort(sorted.begin(), sorted.end());
        edges.reserve(static_cast<std::size_t>(n_bins) - 1);
        for (int b = 1; b < n_bins; ++b) {
            const std::size_t at = (static_cast<std::size_t>(b) * n) / static_cast<std::size_t>(n_bins);
            edges.push_back(sorted[at - 1]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            // values equal to an edge fall in the lower bin
            const auto it = std::lower_bound(edges.begin(), edges.end(), values[i]);
            out.codes[i] = static_cast<Code>(it - edges.begin());
        }
    } else {
        const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
        const double lo = *mn_it, hi = *mx_it;
        const double w = (hi - lo) / n_bins;
        edges.reserve(static_cast<std::size_t>(n_bins) - 1);
        for (int b = 1; b < n_bins; ++b) edges.push_back(lo + w * b);
        for (std::size_t i = 0; i < n; ++i) {
            int c = static_cast<int>((values[i] - lo) / w);
            if (c >= n_bins) c = n_bins - 1;
            if (c < 0) c = 0;
            out.codes[i] = static_cast<Code>(c);
        }
    }

    // full edge list (lo, internal edges..., hi) for export, before compaction
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    std::vector<double> full_edges;
    full_edges.push_back(*mn_it);
    full_edges.insert(full_edges.end(), edges.begin(), edges.end());
    full_edges.push_back(*mx_it);

    auto remap = compact(out.codes, static_cast<Code>(n_bins));
    out.n_cats = 1 + *std::max_element(out.codes.begin(), out.codes.end());
    out.labels.resize(static_cast<std::size_t>(out.n_cats));
    out.bin_edges.clear();
    for (int b = 0; b < n_bins; ++b) {
        const Code nc = remap[static_cast<std::size_t>(b)];
        if (nc < 0) continue;
        if (out.bin_edges.empty()) out.bin_edges.push_back(full_edges[static_cast<std::size_t>(b)]);
        out.bin_edges.push_back(full_edges[static_cast<std::size_t>(b) + 1]);
        out.labels[static_cast<std::size_t>(nc)] =
            "(" + format_edge(full_edges[static_cast<std::size_t>(b)]) + "," +
            format_edge(full_edges[static_cast<std::size_t>(b) + 1]) + "]";
    }
    return out;
}

CodedColumn fuse(const std::vector<const CodedColumn*>& columns) {
    if (columns.empty()) throw DataError("fuse: empty column list");
    const std::size_t n = columns.front()->size();
    for (const auto* c : columns)
        if (c->size() != n) throw DataError("fuse: length mismatch");

    if (columns.size() == 1) {
        CodedColumn out = *columns.front();
        return out; // identity
    }

    // product code via strides, then dense renumbering of occupied tuples
    std::uint64_t prod = 1;
    for (const auto* c : columns) {
        prod *= static_cast<std::uint64_t>(c->n_cats);
        if (prod > (1ULL << 62)) throw DataError("fuse: category product overflow");
    }

    std::vector<std::uint64_t> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t code = 0;
        for (const auto* c : columns)
            code = code * static_cast<std::uint64_t>(c->n_cats) +
                   static_cast<std::uint64_t>(c->codes[i]);
        raw[i] = code;
    }

    // occupied tuples sorted ascending => label order follows member code order
    std::vector<std::uint64_t> occupied(raw);
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());

    std::unordered_map<std::uint64_t, Code> dense;
    dense.reserve(occupied.size() * 2);
    for (std::size_t k = 0; k < occupied.size(); ++k)
        dense.emplace(occupied[k], static_cast<Code>(k));

    CodedColumn out;
    out.provenance = Provenance::Fused;
    out.n_cats = static_cast<Code>(occupied.size());
    out.codes.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.codes[i] = dense[raw[i]];

    std::string nm;
    for (const auto* c : columns) {
        if (!nm.empty()) nm += "*";
        nm += c->name;
        out.members.push_back(c->name);
    }
    out.name = nm;

    out.labels.resize(occupied.size());
    for (std::size_t k = 0; k < occupied.size(); ++k) {
        std::uint64_t code = occupied[k];
        std::vector<Code> tuple(columns.size());
        for (std::size_t j = columns.size(); j-- > 0;) {
            tuple[j] = static_cast<Code>(code % static_cast<std::uint64_t>(columns[j]->n_cats));
            code /= static_cast<std::uint64_t>(columns[j]->n_cats);
        }
        std::string lab = "(";
        for (std::size_t j = 0; j < tuple.size(); ++j) {
            if (j) lab += ",";
            lab += std::to_string(tuple[j]);
        }
        lab += ")";
        out.labels[k] = lab;
    }
    return out;
}

std::string bin_edges_csv(const CodedColumn& binned) {
    std::ostringstream os;
    os << "feature,bin,lower_edge,upper_edge,count\n";
    std::vector<std::int64_t> count(static_cast<std::size_t>(binned.n_cats), 0);
    for (Code c : binned.codes) ++count[static_cast<std::size_t>(c)];
    for (Code b = 0; b < binned.n_cats; ++b) {
        os << binned.name << "," << b << ",";
        if (binned.bin_edges.size() == static_cast<std::size_t>(binned.n_cats) + 1) {
            os.precision(12);
            os << binned.bin_edges[static_cast<std::size_t>(b)] << ","
               << binned.bin_edges[static_cast<std::size_t>(b) + 1];
        } else {
            os << ",";
        }
        os << "," << count[static_cast<std::size_t>(b)] << "\n";
    }
    return os.str();
}

} // namespace recodyn
