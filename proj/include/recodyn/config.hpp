#ifndef RECODYN_CONFIG_HPP
#define RECODYN_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>

#include "recodyn/discretize.hpp"

namespace recodyn {

// All protocol tunables. Every key here has a CLI flag twin and a
// key = value form in config files.
struct ProtocolConfig {
    int bins = 12;               // covariate bins (continuous features)
    int response_bins = 12;      // response bins
    BinScheme scheme = BinScheme::EqualFrequency;
    int k_max = 3;               // feature-setting orders enumerated
    int shortlist_cap = 10;      // MFS-2 candidate cap
    int c1_pool = 64;            // per-k entries tested for global [C1]
    double z = 3.0;              // [C1] significance in baseline sd units
    int replicates = 50;         // noise-baseline replicates (R)
    int min_cell = 500;          // per-locality reporting threshold
    int max_depth = 3;           // growth-round de-association limit
    double refine_factor = 2.0;  // conditioning re-binned at bins*refine_factor for the refinement gate
    double reliability_min_avg_cell = 10.0;
    std::size_t exhaustive_budget = 200000;
    int beam_width = 50;
    std::uint64_t seed = 1;
    int threads = 1;
    double sigma_eps = 1.0;      // simulate subcommand
    double rho = 0.7;            // simulate subcommand

    static ProtocolConfig load(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::map<std::string, std::string> items() const;
    std::string to_text() const;
    void validate() const;
};

} // namespace recodyn

#endif
