#ifndef RECODYN_ANALYSIS_HPP
#define RECODYN_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "recodyn/config.hpp"
#include "recodyn/dataset.hpp"

namespace recodyn {

// A dataset coded for analysis: response and covariates as dense categorical
// columns over the analysis rows (rows with missing values in any used
// column are excluded here, and counted).
struct CodedFrame {
    std::vector<std::uint32_t> rows;
    std::size_t dropped_rows = 0;
    CodedColumn response;
    std::vector<CodedColumn> covariates;

    const CodedColumn& covariate(const std::string& name) const;
    std::vector<const CodedColumn*> covariate_ptrs() const;
};

// Bin continuous columns (response at cfg.response_bins, covariates at
// `covariate_bins`; categorical columns pass through). covariates empty =
// all non-response columns.
CodedFrame code_frame(const Dataset& ds, const std::string& response,
                      std::vector<std::string> covariates, const ProtocolConfig& cfg,
                      int covariate_bins);

inline CodedFrame code_frame(const Dataset& ds, const std::string& response,
                             const std::vector<std::string>& covariates,
                             const ProtocolConfig& cfg) {
    return code_frame(ds, response, covariates, cfg, cfg.bins);
}

} // namespace recodyn

#endif
