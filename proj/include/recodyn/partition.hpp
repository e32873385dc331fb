#ifndef RECODYN_PARTITION_HPP
#define RECODYN_PARTITION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recodyn/coded.hpp"

namespace recodyn {

// Dataset split by the categories of a (fused) conditioning column.
struct Partition {
    CodedColumn cond;                       // conditioning column (fused)
    std::vector<std::uint32_t> row_of;      // rows grouped by category (CSR payload)
    std::vector<std::uint32_t> offsets;     // n_cats+1 offsets into row_of
    std::vector<std::int64_t> sizes;        // per-category row counts

    std::size_t n_cells() const { return sizes.size(); }
    std::span<const std::uint32_t> cell(std::size_t a) const {
        return {row_of.data() + offsets[a], offsets[a + 1] - offsets[a]};
    }
};

Partition partition_by(const CodedColumn& cond);

// The de-association engine: weighted conditional-entropy analysis of a
// response within the localities of a conditioning partition. An empty
// conditioning set is the single-locality (global) view.
class DeassocView {
public:
    DeassocView(const CodedColumn* cond, const CodedColumn& response);

    // CE[Y | cond] (the view's base uncertainty) and plug-in H[Y].
    double base_ce() const { return base_ce_; }
    double h_response() const { return h_y_; }
    std::int64_t n() const { return n_; }
    const Partition& partition() const { return part_; }

    struct Drop {
        double wdrop = 0.0;        // base_ce - CE[Y | cond, S]
        double ce = 0.0;           // CE[Y | cond, S]
        std::int64_t occupied = 0; // nonzero cells of the (cond,S) x Y table
        std::int64_t table_rows = 0;
    };
    // Weighted CE-drop of candidate codes within the view. Identical to the
    // joint-CE identity: sum_a (n_a/N) H[Y|S, A=a] = H[Y|(A,S)].
    Drop wdrop(std::span<const Code> s_codes, Code s_cats) const;

    struct Baseline {
        std::vector<double> drops; // R replicate wdrops of within-cell permuted codes
        double mean = 0.0, sd = 0.0, q95 = 0.0;
    };
    // Same-dimension noise baseline: candidate codes permuted within each
    // locality (marginals and table dimensions preserved, link to Y severed).
    Baseline perm_baseline(std::span<const Code> s_codes, Code s_cats, int replicates,
                           std::uint64_t seed, std::uint64_t stream, int threads) const;

    // Per-locality drops of a candidate plus per-locality permutation q95,
    // for uniformity evidence: fraction of localities (>= min_cell) where the
    // local drop clears the local q95.
    struct Uniformity {
        std::size_t reported_cells = 0;
        std::size_t passing_cells = 0;
        double fraction = 0.0;
    };
    Uniformity uniformity(std::span<const Code> s_codes, Code s_cats, int replicates,
                          std::uint64_t seed, std::uint64_t stream, std::int64_t min_cell) const;

private:
    Partition part_;
    const CodedColumn* y_;
    std::int64_t n_ = 0;
    double base_ce_ = 0.0, h_y_ = 0.0;

    double ce_given_cond_and(std::span<const Code> s_codes, Code s_cats,
                             std::int64_t* occupied, std::int64_t* rows) const;
};

// One feature-set's row in a conditional CE analysis.
struct ConditionalCEEntry {
    std::vector<std::string> features;
    double weighted_ce = 0.0;          // over all localities (exact identity)
    double weighted_ce_reported = 0.0; // over localities >= min_cell only ("partial")
    bool partial = false;              // some localities were skipped
    std::vector<double> cell_ce;       // per reported locality, aligned with reported_cells
};

struct ConditionalCETable {
    std::vector<std::string> conditioning;  // A's member names
    std::string response;
    std::vector<std::size_t> reported_cells;   // locality indices with size >= min_cell
    std::vector<std::size_t> skipped_cells;
    std::vector<std::string> cell_labels;      // labels of reported localities
    std::vector<std::int64_t> cell_sizes;      // sizes of reported localities
    double base_weighted_ce = 0.0;             // CE[Y|A]
    std::vector<ConditionalCEEntry> entries;   // sorted ascending by weighted_ce
};

std::string conditional_ce_csv(const ConditionalCETable& t);

} // namespace recodyn

#endif
