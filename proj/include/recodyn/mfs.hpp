#ifndef RECODYN_MFS_HPP
#define RECODYN_MFS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "recodyn/analysis.hpp"
#include "recodyn/config.hpp"
#include "recodyn/dataset.hpp"
#include "recodyn/partition.hpp"

namespace recodyn {

using Json = nlohmann::ordered_json;

struct CEEntry {
    std::vector<int> set;              // covariate indices, ascending
    std::vector<std::string> names;
    double ce = 0.0;
    double ce_drop = 0.0;              // H[Y] - ce
    std::int64_t table_rows = 0;       // occupied fused hypercubes
    std::int64_t occupied_cells = 0;   // nonzero cells of the fused x Y table
    double avg_cell_count = 0.0;       // N / occupied_cells
    bool reliable = false;             // avg_cell_count >= threshold

    std::string display_name() const;
};

struct CETable {
    int k = 0;
    std::string mode;                  // "exhaustive" or "beam"
    std::int64_t n = 0;
    double h_response = 0.0;
    std::vector<CEEntry> entries;      // ascending by ce, ties lexicographic
};

// CE of the response given every fused k-subset of the covariates.
// Exhaustive when C(|covariates|, k) <= cfg.exhaustive_budget, else beam
// search extending the top cfg.beam_width (k-1)-sets.
CETable enumerate_ce(const CodedColumn& response, const std::vector<const CodedColumn*>& covariates,
                     int k, const ProtocolConfig& cfg);

std::string ce_csv(const CETable& t);

struct NoiseBaseline {
    int k = 0;
    std::vector<double> drops;
    double mean = 0.0, sd = 0.0, q95 = 0.0;
};

// R replicate CE-drops of the response vs row-permuted copies of the
// candidate's fused codes: same marginal, same table dimension, link to the
// response severed. Deterministic given seed.
NoiseBaseline noise_baseline(const CodedColumn& response, const CodedColumn& candidate_fused,
                             int replicates, std::uint64_t seed, int threads);

struct C1Verdict {
    bool pass = false;
    double excess = 0.0;      // candidate_drop - baseline mean
    double margin_sd = 0.0;   // excess in baseline sd units
};

// pass <=> drop > mean + z*sd AND drop > q95; degenerate sd=0 compares
// against the max replicate.
C1Verdict c1_confirmable(double candidate_drop, const NoiseBaseline& base, double z);

struct C2Verdict {
    bool unreplaceable = false;
    bool splits_ok = false;   // every 2-way split is superadditive
    bool cond_a_ok = false;
    bool cond_b_ok = false;
    double drop_B = 0.0;
    Json ledger;              // every split and condition evaluated
};

// [C2] on feature-set B (covariate indices) against already identified
// factors. Condition (a) reading (recorded in the ledger):
//   drop(B) > drop(best single member) + |B| * max_b drop(B \ {b}).
C2Verdict c2_unreplaceable(const CodedColumn& response,
                           const std::vector<const CodedColumn*>& covariates,
                           const std::vector<int>& B,
                           const std::vector<std::vector<int>>& identified);

struct MajorFactor {
    std::vector<std::string> features;
    int order = 0;
};

struct MajorFactorReport {
    std::vector<MajorFactor> factors;
    Json document;                                 // full evidence trail
    std::map<std::string, std::string> attachments; // file name -> content (CSV/SVG)

    std::string factors_display() const;
};

// MFS-1..4. See the report's "protocol" block for the exact decision rules
// applied on this run; every verdict lands in document["trail"].
MajorFactorReport run_protocol(const Dataset& ds, const std::string& response,
                               std::vector<std::string> covariates, const ProtocolConfig& cfg);

// De-associating analysis: per-locality and weighted CE tables of feature
// subsets (orders 1..k_max over covariates excluding A) under conditioning
// set A. Localities smaller than min_cell are reported as skipped; weighted
// values over all localities satisfy the joint-CE identity exactly.
ConditionalCETable deassoc_ce(const Dataset& ds, const std::vector<std::string>& conditioning,
                              const std::string& response, std::vector<std::string> covariates,
                              int k_max, int min_cell, const ProtocolConfig& cfg);

// Replace the response by its shadowed version (resampled from conditional
// proportions given fused A) and rerun the k-feature CE enumeration.
std::vector<CETable> shadow_analysis(const Dataset& ds, const std::vector<std::string>& conditioning,
                                     const std::string& response, std::vector<std::string> covariates,
                                     int k_max, const ProtocolConfig& cfg);

} // namespace recodyn

#endif
