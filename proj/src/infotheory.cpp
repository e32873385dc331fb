#include "recodyn/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "recodyn/discretize.hpp"
#include "recodyn/errors.hpp"
#include "recodyn/parallel.hpp"

namespace recodyn {

double entropy(std::span<const std::int64_t> counts) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    if (total <= 0) throw DataError("entropy: all-zero counts");
    const double n = static_cast<double>(total);
    double acc = 0.0;
    for (std::int64_t c : counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            acc -= p * std::log(p);
        }
    }
    return acc;
}

double cond_entropy(const ContingencyTable& t) {
    if (t.total <= 0) throw DataError("cond_entropy: empty table");
    const double n = static_cast<double>(t.total);
    double acc = 0.0;
    for (Code r = 0; r < t.n_rows; ++r) {
        const std::int64_t rs = t.row_sums[static_cast<std::size_t>(r)];
        if (rs == 0) continue;
        double h = 0.0;
        for (Code c = 0; c < t.n_cols; ++c) {
            const std::int64_t v = t.at(r, c);
            if (v > 0) {
                const double p = static_cast<double>(v) / static_cast<double>(rs);
                h -= p * std::log(p);
            }
        }
        acc += (static_cast<double>(rs) / n) * h;
    }
    return acc;
}

double ce_drop(const ContingencyTable& t) {
    return entropy(t.col_sums) - cond_entropy(t);
}

JointStats joint_stats(std::span<const Code> row_codes, Code n_row,
                       std::span<const Code> col_codes, Code n_col,
                       std::vector<std::int64_t>* scratch) {
    if (row_codes.size() != col_codes.size()) throw DataError("joint_stats: length mismatch");
    const std::size_t n = row_codes.size();
    const std::size_t cells = static_cast<std::size_t>(n_row) * static_cast<std::size_t>(n_col);
    std::vector<std::int64_t> local;
    std::vector<std::int64_t>& joint = scratch ? *scratch : local;
    joint.assign(cells, 0);
    const std::size_t nc = static_cast<std::size_t>(n_col);
    for (std::size_t i = 0; i < n; ++i)
        ++joint[static_cast<std::size_t>(row_codes[i]) * nc + static_cast<std::size_t>(col_codes[i])];

    JointStats s;
    std::vector<std::int64_t> col_sums(nc, 0);
    const double dn = static_cast<double>(n);
    for (Code r = 0; r < n_row; ++r) {
        const std::int64_t* row = joint.data() + static_cast<std::size_t>(r) * nc;
        std::int64_t rs = 0;
        for (std::size_t c = 0; c < nc; ++c) {
            rs += row[c];
            col_sums[c] += row[c];
            if (row[c] > 0) ++s.occupied;
        }
        if (rs == 0) continue;
        ++s.table_rows;
        double h = 0.0;
        for (std::size_t c = 0; c < nc; ++c)
            if (row[c] > 0) {
                const double p = static_cast<double>(row[c]) / static_cast<double>(rs);
                h -= p * std::log(p);
            }
        s.ce += (static_cast<double>(rs) / dn) * h;
        const double pr = static_cast<double>(rs) / dn;
        s.h_row -= pr * std::log(pr);
    }
    s.h_col = entropy(col_sums);
    return s;
}

InfoDecomposition decompose_pair(const CodedColumn& y, const CodedColumn& a, const CodedColumn& b) {
    if (y.size() != a.size() || y.size() != b.size())
        throw DataError("decompose_pair: length mismatch");
    InfoDecomposition d;
    const auto sa = joint_stats(a.codes, a.n_cats, y.codes, y.n_cats);
    const auto sb = joint_stats(b.codes, b.n_cats, y.codes, y.n_cats);
    d.ce_drop_A = sa.h_col - sa.ce;
    d.ce_drop_B = sb.h_col - sb.ce;

    const CodedColumn ab = fuse({&a, &b});
    const auto sab = joint_stats(ab.codes, ab.n_cats, y.codes, y.n_cats);
    d.ce_drop_joint = sab.h_col - sab.ce;

    const auto sba = joint_stats(a.codes, a.n_cats, b.codes, b.n_cats);
    d.mi_AB = sba.h_col - sba.ce;

    // I[A;B|Y] from the identity I[Y;(A,B)] = I[Y;A] + I[Y;B] + I[A;B|Y] - I[A;B]
    d.cmi_AB_given_Y = d.ce_drop_joint - d.ce_drop_A - d.ce_drop_B + d.mi_AB;
    d.interaction = d.cmi_AB_given_Y - d.mi_AB;
    return d;
}

double mce(const CodedColumn& x, const CodedColumn& y) {
    const auto sxy = joint_stats(y.codes, y.n_cats, x.codes, x.n_cats); // H[X|Y], H[X]
    const auto syx = joint_stats(x.codes, x.n_cats, y.codes, y.n_cats); // H[Y|X], H[Y]
    if (sxy.h_col <= 0.0 || syx.h_col <= 0.0) return 0.0;
    return 0.5 * (sxy.ce / sxy.h_col + syx.ce / syx.h_col);
}

std::vector<int> average_linkage_leaf_order(const std::vector<double>& dist, std::size_t n) {
    if (n == 0) return {};
    struct Cluster {
        std::vector<int> leaves; // in dendrogram order
        int min_index;
        bool alive = true;
    };
    std::vector<Cluster> cl(n);
    for (std::size_t i = 0; i < n; ++i) {
        cl[i].leaves = {static_cast<int>(i)};
        cl[i].min_index = static_cast<int>(i);
    }
    // average-linkage distance between clusters: mean pairwise leaf distance
    auto cdist = [&](const Cluster& a, const Cluster& b) {
        double s = 0.0;
        for (int i : a.leaves)
            for (int j : b.leaves)
                s += dist[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)];
        return s / (static_cast<double>(a.leaves.size()) * static_cast<double>(b.leaves.size()));
    };
    std::size_t alive = n;
    while (alive > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < cl.size(); ++i) {
            if (!cl[i].alive) continue;
            for (std::size_t j = i + 1; j < cl.size(); ++j) {
                if (!cl[j].alive) continue;
                const double d = cdist(cl[i], cl[j]);
                // tie-break on smallest member indices for determinism
                if (d < best - 1e-15 ||
                    (std::abs(d - best) <= 1e-15 &&
                     std::min(cl[i].min_index, cl[j].min_index) <
                         std::min(cl[bi].min_index, cl[bj].min_index))) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        // merge: lower min_index side goes left
        Cluster merged;
        const bool left_i = cl[bi].min_index < cl[bj].min_index;
        const Cluster& l = left_i ? cl[bi] : cl[bj];
        const Cluster& r = left_i ? cl[bj] : cl[bi];
        merged.leaves = l.leaves;
        merged.leaves.insert(merged.leaves.end(), r.leaves.begin(), r.leaves.end());
        merged.min_index = std::min(l.min_index, r.min_index);
        cl[bi].alive = false;
        cl[bj].alive = false;
        cl.push_back(std::move(merged));
        --alive;
    }
    for (auto it = cl.rbegin(); it != cl.rend(); ++it)
        if (it->alive) return it->leaves;
    return {};
}

MCEMatrix mce_matrix(const std::vector<const CodedColumn*>& features, int threads) {
    if (features.size() < 2) throw DataError("mce_matrix: need at least 2 features");
    const std::size_t n = features.size();
    MCEMatrix m;
    m.names.reserve(n);
    for (const auto* f : features) m.names.push_back(f->name);
    m.values.assign(n * n, 0.0);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    parallel_for(pairs.size(), threads, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        const double v = mce(*features[i], *features[j]);
        m.values[i * n + j] = v;
        m.values[j * n + i] = v;
    });
    m.leaf_order = average_linkage_leaf_order(m.values, n);
    return m;
}

std::string mce_csv(const MCEMatrix& m) {
    std::ostringstream os;
    os.precision(12);
    os << "feature";
    for (const auto& nm : m.names) os << "," << nm;
    os << ",leaf_rank\n";
    const std::size_t n = m.names.size();
    std::vector<int> rank(n, 0);
    for (std::size_t k = 0; k < m.leaf_order.size(); ++k)
        rank[static_cast<std::size_t>(m.leaf_order[k])] = static_cast<int>(k);
    for (std::size_t i = 0; i < n; ++i) {
        os << m.names[i];
        for (std::size_t j = 0; j < n; ++j) os << "," << m.at(i, j);
        os << "," << rank[i] << "\n";
    }
    return os.str();
}

} // namespace recodyn
