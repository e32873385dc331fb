#ifndef RECODYN_ODDS_HPP
#define RECODYN_ODDS_HPP

#include <optional>
#include <string>
#include <vector>

#include "recodyn/analysis.hpp"
#include "recodyn/config.hpp"
#include "recodyn/dataset.hpp"
#include "recodyn/tables.hpp"

namespace recodyn {

// Binary-response reporting across localities of a conditioning feature-set.

struct LocalityOdds {
    std::string locality;        // category label of the locality set
    std::string expansion;       // category label of the expansion set ("" when none)
    std::int64_t n = 0;
    OddsRow odds;
};

struct LocalityOddsTable {
    std::vector<std::string> locality_set, expand_set;
    std::string response;
    std::vector<LocalityOdds> rows;
};

LocalityOddsTable locality_odds(const Dataset& ds, const std::string& response,
                                const std::vector<std::string>& locality_set,
                                const std::vector<std::string>& expand_set,
                                const ProtocolConfig& cfg);

std::string locality_odds_csv(const LocalityOddsTable& t);

struct TripletChoice {
    std::string locality;
    std::int64_t n = 0;
    std::optional<std::vector<std::string>> triplet; // nullopt => NA (locality under min_n)
    double ce_drop = 0.0;
};

// Exhaustive best CE-drop triplet of binary candidate features per locality;
// localities under min_n report NA.
std::vector<TripletChoice> best_triplet_per_locality(const Dataset& ds, const std::string& response,
                                                     const std::vector<std::string>& locality_set,
                                                     const std::vector<std::string>& candidates,
                                                     int min_n, const ProtocolConfig& cfg);

std::string triplets_csv(const std::vector<TripletChoice>& rows);

struct MajorityRuleResult {
    double majority_accuracy = 0.0;  // per-locality majority class, in-sample
    double blind_accuracy = 0.0;     // global majority class everywhere
    struct Rule {
        std::string locality;
        std::int64_t n = 0;
        Code majority_class = 0;
        double odds = 0.0;
        bool infinite_odds = false;
    };
    std::vector<Rule> rules;
};

MajorityRuleResult majority_rule_eval(const Dataset& ds, const std::string& response,
                                      const std::vector<std::string>& locality_set,
                                      const ProtocolConfig& cfg);

} // namespace recodyn

#endif
