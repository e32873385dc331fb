#include "recodyn/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "recodyn/errors.hpp"
#include "recodyn/infotheory.hpp"
#include "recodyn/parallel.hpp"
#include "recodyn/rng.hpp"

namespace recodyn {

Partition partition_by(const CodedColumn& cond) {
    Partition p;
    p.cond = cond;
    const std::size_t n = cond.size();
    const std::size_t ncat = static_cast<std::size_t>(cond.n_cats);
    p.sizes.assign(ncat, 0);
    for (Code c : cond.codes) ++p.sizes[static_cast<std::size_t>(c)];
    p.offsets.assign(ncat + 1, 0);
    for (std::size_t a = 0; a < ncat; ++a)
        p.offsets[a + 1] = p.offsets[a] + static_cast<std::uint32_t>(p.sizes[a]);
    p.row_of.resize(n);
    std::vector<std::uint32_t> cursor(p.offsets.begin(), p.offsets.end() - 1);
    for (std::size_t i = 0; i < n; ++i)
        p.row_of[cursor[static_cast<std::size_t>(cond.codes[i])]++] = static_cast<std::uint32_t>(i);
    return p;
}

DeassocView::DeassocView(const CodedColumn* cond, const CodedColumn& response) : y_(&response) {
    n_ = static_cast<std::int64_t>(response.size());
    if (cond == nullptr) {
        CodedColumn one;
        one.name = "";
        one.n_cats = 1;
        one.labels = {"all"};
        one.codes.assign(response.size(), 0);
        part_ = partition_by(one);
    } else {
        if (cond->size() != response.size()) throw DataError("DeassocView: length mismatch");
        part_ = partition_by(*cond);
    }
    const auto s = joint_stats(part_.cond.codes, part_.cond.n_cats, y_->codes, y_->n_cats);
    base_ce_ = s.ce;
    h_y_ = s.h_col;
}

double DeassocView::ce_given_cond_and(std::span<const Code> s_codes, Code s_cats,
                                      std::int64_t* occupied, std::int64_t* rows) const {
    // stream cell-by-cell; per-cell (s, y) joint in a small touched-list buffer
    const std::size_t ny = static_cast<std::size_t>(y_->n_cats);
    const std::size_t ns = static_cast<std::size_t>(s_cats);
    std::vector<std::int64_t> buf(ns * ny, 0);
    std::vector<std::uint32_t> touched;
    touched.reserve(ns * ny);

    double acc = 0.0;
    std::int64_t occ = 0, trows = 0;
    const double dn = static_cast<double>(n_);
    for (std::size_t a = 0; a < part_.n_cells(); ++a) {
        const auto cell = part_.cell(a);
        if (cell.empty()) continue;
        touched.clear();
        for (std::uint32_t r : cell) {
            const std::size_t idx = static_cast<std::size_t>(s_codes[r]) * ny +
                                    static_cast<std::size_t>(y_->codes[r]);
            if (buf[idx]++ == 0) touched.push_back(static_cast<std::uint32_t>(idx));
        }
        // sorted for a stable floating accumulation order
        std::sort(touched.begin(), touched.end());
        std::size_t i = 0;
        while (i < touched.size()) {
            const std::size_t srow_id = touched[i] / ny;
            std::int64_t rs = 0;
            std::size_t j = i;
            while (j < touched.size() && touched[j] / ny == srow_id) {
                rs += buf[touched[j]];
                ++j;
            }
            ++trows;
            double h = 0.0;
            for (std::size_t t = i; t < j; ++t) {
                const double p = static_cast<double>(buf[touched[t]]) / static_cast<double>(rs);
                h -= p * std::log(p);
                ++occ;
            }
            acc += (static_cast<double>(rs) / dn) * h;
            i = j;
        }
        for (std::uint32_t idx : touched) buf[idx] = 0;
    }
    if (occupied) *occupied = occ;
    if (rows) *rows = trows;
    return acc;
}

DeassocView::Drop DeassocView::wdrop(std::span<const Code> s_codes, Code s_cats) const {
    Drop d;
    d.ce = ce_given_cond_and(s_codes, s_cats, &d.occupied, &d.table_rows);
    d.wdrop = base_ce_ - d.ce;
    return d;
}

DeassocView::Baseline DeassocView::perm_baseline(std::span<const Code> s_codes, Code s_cats,
                                                 int replicates, std::uint64_t seed,
                                                 std::uint64_t stream, int threads) const {
    Baseline b;
    b.drops.assign(static_cast<std::size_t>(replicates), 0.0);
    parallel_for(static_cast<std::size_t>(replicates), threads, [&](std::size_t rep) {
        std::vector<Code> permuted(s_codes.size());
        for (std::size_t a = 0; a < part_.n_cells(); ++a) {
            const auto cell = part_.cell(a);
            if (cell.empty()) continue;
            // Fisher-Yates over the cell's positions, keyed by (rep, cell)
            std::vector<Code> vals(cell.size());
            for (std::size_t i = 0; i < cell.size(); ++i) vals[i] = s_codes[cell[i]];
            const std::uint64_t cell_stream =
                rng::splitmix64(stream ^ (0x51ULL + a) ^ (static_cast<std::uint64_t>(rep) << 32));
            for (std::size_t i = vals.size(); i > 1; --i) {
                const std::uint64_t j = rng::mix(seed, cell_stream, i) % i;
                std::swap(vals[i - 1], vals[j]);
            }
            for (std::size_t i = 0; i < cell.size(); ++i) permuted[cell[i]] = vals[i];
        }
        std::int64_t occ = 0, rows = 0;
        const double ce = ce_given_cond_and(permuted, s_cats, &occ, &rows);
        b.drops[rep] = base_ce_ - ce;
    });
    double sum = 0.0;
    for (double d : b.drops) sum += d;
    b.mean = sum / static_cast<double>(replicates);
    double ss = 0.0;
    for (double d : b.drops) ss += (d - b.mean) * (d - b.mean);
    b.sd = replicates > 1 ? std::sqrt(ss / static_cast<double>(replicates - 1)) : 0.0;
    std::vector<double> sorted(b.drops);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t at =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(replicates))) - 1;
    b.q95 = sorted[std::min(at, sorted.size() - 1)];
    return b;
}

DeassocView::Uniformity DeassocView::uniformity(std::span<const Code> s_codes, Code s_cats,
                                                int replicates, std::uint64_t seed,
                                                std::uint64_t stream, std::int64_t min_cell) const {
    Uniformity u;
    const std::size_t ny = static_cast<std::size_t>(y_->n_cats);
    const std::size_t ns = static_cast<std::size_t>(s_cats);

    auto cell_ce = [&](std::span<const Code> codes, std::span<const std::uint32_t> cell,
                       const std::vector<Code>* local_override) {
        std::vector<std::int64_t> joint(ns * ny, 0);
        for (std::size_t i = 0; i < cell.size(); ++i) {
            const Code sc = local_override ? (*local_override)[i] : codes[cell[i]];
            ++joint[static_cast<std::size_t>(sc) * ny + static_cast<std::size_t>(y_->codes[cell[i]])];
        }
        double acc = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
            std::int64_t rs = 0;
            for (std::size_t c = 0; c < ny; ++c) rs += joint[s * ny + c];
            if (rs == 0) continue;
            double h = 0.0;
            for (std::size_t c = 0; c < ny; ++c) {
                const std::int64_t v = joint[s * ny + c];
                if (v > 0) {
                    const double p = static_cast<double>(v) / static_cast<double>(rs);
                    h -= p * std::log(p);
                }
            }
            acc += (static_cast<double>(rs) / static_cast<double>(cell.size())) * h;
        }
        return acc;
    };

    for (std::size_t a = 0; a < part_.n_cells(); ++a) {
        const auto cell = part_.cell(a);
        if (static_cast<std::int64_t>(cell.size()) < min_cell) continue;
        ++u.reported_cells;
        // local base CE (y marginal within cell)
        std::vector<std::int64_t> ycnt(ny, 0);
        for (std::uint32_t r : cell) ++ycnt[static_cast<std::size_t>(y_->codes[r])];
        const double hy = entropy(ycnt);
        const double drop = hy - cell_ce(s_codes, cell, nullptr);
        // local permutation q95
        std::vector<double> reps(static_cast<std::size_t>(replicates));
        std::vector<Code> vals(cell.size());
        for (int rep = 0; rep < replicates; ++rep) {
            for (std::size_t i = 0; i < cell.size(); ++i) vals[i] = s_codes[cell[i]];
            const std::uint64_t cell_stream =
                rng::splitmix64(stream ^ (0xA7ULL + a) ^ (static_cast<std::uint64_t>(rep) << 32));
            for (std::size_t i = vals.size(); i > 1; --i) {
                const std::uint64_t j = rng::mix(seed, cell_stream, i) % i;
                std::swap(vals[i - 1], vals[j]);
            }
            reps[static_cast<std::size_t>(rep)] = hy - cell_ce(s_codes, cell, &vals);
        }
        std::sort(reps.begin(), reps.end());
        const std::size_t at =
            static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(replicates))) - 1;
        if (drop > reps[std::min(at, reps.size() - 1)]) ++u.passing_cells;
    }
    u.fraction = u.reported_cells
                     ? static_cast<double>(u.passing_cells) / static_cast<double>(u.reported_cells)
                     : 0.0;
    return u;
}

std::string conditional_ce_csv(const ConditionalCETable& t) {
    std::ostringstream os;
    os.precision(12);
    os << "feature_set,weighted_ce,weighted_ce_reported,partial";
    for (std::size_t k = 0; k < t.reported_cells.size(); ++k)
        os << ",ce[" << t.cell_labels[k] << "]";
    os << "\n";
    os << "(none),"; // base row: CE[Y|A]
    os << t.base_weighted_ce << "," << t.base_weighted_ce << ",0";
    for (std::size_t k = 0; k < t.reported_cells.size(); ++k) os << ",";
    os << "\n";
    for (const auto& e : t.entries) {
        std::string nm;
        for (const auto& f : e.features) {
            if (!nm.empty()) nm += "_";
            nm += f;
        }
        os << nm << "," << e.weighted_ce << "," << e.weighted_ce_reported << "," << (e.partial ? 1 : 0);
        for (double ce : e.cell_ce) os << "," << ce;
        os << "\n";
    }
    return os.str();
}

} // namespace recodyn
