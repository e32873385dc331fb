#include "recodyn/odds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "recodyn/discretize.hpp"
#include "recodyn/errors.hpp"
#include "recodyn/infotheory.hpp"
#include "recodyn/partition.hpp"

namespace recodyn {

namespace {

CodedColumn binary_response(const CodedFrame& frame) {
    if (frame.response.n_cats != 2)
        throw DataError("odds analysis needs a binary response; '" + frame.response.name + "' has " +
                        std::to_string(frame.response.n_cats) + " categories");
    return frame.response;
}

} // namespace

LocalityOddsTable locality_odds(const Dataset& ds, const std::string& response,
                                const std::vector<std::string>& locality_set,
                                const std::vector<std::string>& expand_set,
                                const ProtocolConfig& cfg) {
    if (locality_set.empty()) throw ConfigError("locality_odds: empty locality set");
    std::vector<std::string> all = locality_set;
    all.insert(all.end(), expand_set.begin(), expand_set.end());
    const CodedFrame frame = code_frame(ds, response, all, cfg);
    const CodedColumn y = binary_response(frame);

    std::vector<const CodedColumn*> loc_cols;
    for (const auto& nm : locality_set) loc_cols.push_back(&frame.covariate(nm));
    const CodedColumn loc = fuse(loc_cols);

    LocalityOddsTable out;
    out.locality_set = locality_set;
    out.expand_set = expand_set;
    out.response = response;

    if (expand_set.empty()) {
        const ContingencyTable t = build_table(loc, y);
        const auto odds = odds_table(t);
        for (Code r = 0; r < t.n_rows; ++r) {
            LocalityOdds row;
            row.locality = loc.labels[static_cast<std::size_t>(r)];
            row.n = t.row_sums[static_cast<std::size_t>(r)];
            row.odds = odds[static_cast<std::size_t>(r)];
            out.rows.push_back(row);
        }
    } else {
        std::vector<const CodedColumn*> exp_cols;
        for (const auto& nm : expand_set) exp_cols.push_back(&frame.covariate(nm));
        const CodedColumn exp = fuse(exp_cols);
        const std::size_t ne = static_cast<std::size_t>(exp.n_cats);
        std::vector<std::int64_t> cnt(static_cast<std::size_t>(loc.n_cats) * ne * 2, 0);
        for (std::size_t i = 0; i < y.size(); ++i)
            ++cnt[(static_cast<std::size_t>(loc.codes[i]) * ne +
                   static_cast<std::size_t>(exp.codes[i])) * 2 +
                  static_cast<std::size_t>(y.codes[i])];
        for (Code l = 0; l < loc.n_cats; ++l)
            for (Code e = 0; e < exp.n_cats; ++e) {
                const std::size_t base =
                    (static_cast<std::size_t>(l) * ne + static_cast<std::size_t>(e)) * 2;
                const std::int64_t c0 = cnt[base], c1 = cnt[base + 1];
                if (c0 + c1 == 0) continue;
                LocalityOdds row;
                row.locality = loc.labels[static_cast<std::size_t>(l)];
                row.expansion = exp.labels[static_cast<std::size_t>(e)];
                row.n = c0 + c1;
                row.odds.label = row.locality + "|" + row.expansion;
                row.odds.count_col0 = c0;
                row.odds.count_col1 = c1;
                row.odds.p0 = static_cast<double>(c0) / static_cast<double>(row.n);
                row.odds.p1 = static_cast<double>(c1) / static_cast<double>(row.n);
                if (c0 == 0)
                    row.odds.infinite = true;
                else
                    row.odds.odds = static_cast<double>(c1) / static_cast<double>(c0);
                out.rows.push_back(row);
            }
    }
    if (out.rows.empty()) throw DataError("locality_odds: no occupied localities");
    return out;
}

std::string locality_odds_csv(const LocalityOddsTable& t) {
    std::ostringstream os;
    os.precision(12);
    os << "locality,expansion,n,count_0,count_1,p0,p1,odds,infinite\n";
    for (const auto& r : t.rows) {
        os << '"' << r.locality << '"' << ",\"" << r.expansion << '"' << "," << r.n << ","
           << r.odds.count_col0 << "," << r.odds.count_col1 << "," << r.odds.p0 << ","
           << r.odds.p1 << ",";
        if (!r.odds.infinite) os << r.odds.odds;
        os << "," << (r.odds.infinite ? 1 : 0) << "\n";
    }
    return os.str();
}

std::vector<TripletChoice> best_triplet_per_locality(const Dataset& ds, const std::string& response,
                                                     const std::vector<std::string>& locality_set,
                                                     const std::vector<std::string>& candidates,
                                                     int min_n, const ProtocolConfig& cfg) {
    if (candidates.size() < 3) throw ConfigError("best_triplet_per_locality: need >= 3 candidates");
    std::vector<std::string> all = locality_set;
    all.insert(all.end(), candidates.begin(), candidates.end());
    const CodedFrame frame = code_frame(ds, response, all, cfg);
    const CodedColumn y = binary_response(frame);

    for (const auto& nm : candidates)
        if (frame.covariate(nm).n_cats != 2)
            throw DataError("best_triplet_per_locality: candidate '" + nm + "' is not binary");

    std::vector<const CodedColumn*> loc_cols;
    for (const auto& nm : locality_set) loc_cols.push_back(&frame.covariate(nm));
    const CodedColumn loc = fuse(loc_cols);
    const Partition part = partition_by(loc);

    const int nc = static_cast<int>(candidates.size());
    std::vector<std::vector<int>> triples;
    for (int a = 0; a < nc; ++a)
        for (int b = a + 1; b < nc; ++b)
            for (int c = b + 1; c < nc; ++c) triples.push_back({a, b, c});

    std::vector<TripletChoice> out;
    for (std::size_t cell = 0; cell < part.n_cells(); ++cell) {
        TripletChoice choice;
        choice.locality = loc.labels[cell];
        choice.n = part.sizes[cell];
        if (part.sizes[cell] < min_n) {
            out.push_back(std::move(choice)); // NA
            continue;
        }
        const auto rows = part.cell(cell);
        // response entropy within the locality
        std::vector<std::int64_t> ycnt(2, 0);
        for (std::uint32_t r : rows) ++ycnt[static_cast<std::size_t>(y.codes[r])];
        if (ycnt[0] == 0 || ycnt[1] == 0) {
            // constant response: no triplet can drop anything
            choice.triplet = std::nullopt;
            out.push_back(std::move(choice));
            continue;
        }
        const double hy = entropy(ycnt);
        double best_drop = -1.0;
        std::vector<int> best;
        for (const auto& tri : triples) {
            // 8 fused cells x 2 response values
            std::int64_t joint[16] = {0};
            const CodedColumn& c0 = frame.covariate(candidates[static_cast<std::size_t>(tri[0])]);
            const CodedColumn& c1 = frame.covariate(candidates[static_cast<std::size_t>(tri[1])]);
            const CodedColumn& c2 = frame.covariate(candidates[static_cast<std::size_t>(tri[2])]);
            for (std::uint32_t r : rows) {
                const int f = ((c0.codes[r] * 2) + c1.codes[r]) * 2 + c2.codes[r];
                ++joint[f * 2 + y.codes[r]];
            }
            double ce = 0.0;
            for (int f = 0; f < 8; ++f) {
                const std::int64_t rs = joint[f * 2] + joint[f * 2 + 1];
                if (rs == 0) continue;
                double h = 0.0;
                for (int v = 0; v < 2; ++v)
                    if (joint[f * 2 + v] > 0) {
                        const double p = static_cast<double>(joint[f * 2 + v]) / static_cast<double>(rs);
                        h -= p * std::log(p);
                    }
                ce += (static_cast<double>(rs) / static_cast<double>(rows.size())) * h;
            }
            const double drop = hy - ce;
            if (drop > best_drop + 1e-15) {
                best_drop = drop;
                best = tri;
            }
        }
        choice.ce_drop = best_drop;
        std::vector<std::string> names;
        for (int i : best) names.push_back(candidates[static_cast<std::size_t>(i)]);
        choice.triplet = names;
        out.push_back(std::move(choice));
    }
    return out;
}

std::string triplets_csv(const std::vector<TripletChoice>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "locality,n,triplet,ce_drop\n";
    for (const auto& r : rows) {
        os << '"' << r.locality << '"' << "," << r.n << ",";
        if (r.triplet) {
            std::string nm;
            for (const auto& f : *r.triplet) {
                if (!nm.empty()) nm += "_";
                nm += f;
            }
            os << nm << "," << r.ce_drop;
        } else {
            os << "NA,";
        }
        os << "\n";
    }
    return os.str();
}

MajorityRuleResult majority_rule_eval(const Dataset& ds, const std::string& response,
                                      const std::vector<std::string>& locality_set,
                                      const ProtocolConfig& cfg) {
    const CodedFrame frame = code_frame(ds, response, locality_set, cfg);
    const CodedColumn y = binary_response(frame);
    const std::int64_t n = static_cast<std::int64_t>(y.size());

    std::int64_t global[2] = {0, 0};
    for (Code c : y.codes) ++global[static_cast<std::size_t>(c)];
    MajorityRuleResult out;
    out.blind_accuracy = static_cast<double>(std::max(global[0], global[1])) / static_cast<double>(n);

    if (locality_set.empty()) {
        out.majority_accuracy = out.blind_accuracy;
        return out;
    }

    std::vector<const CodedColumn*> loc_cols;
    for (const auto& nm : locality_set) loc_cols.push_back(&frame.covariate(nm));
    const CodedColumn loc = fuse(loc_cols);
    const Partition part = partition_by(loc);

    std::int64_t correct = 0;
    for (std::size_t cell = 0; cell < part.n_cells(); ++cell) {
        std::int64_t cnt[2] = {0, 0};
        for (std::uint32_t r : part.cell(cell)) ++cnt[static_cast<std::size_t>(y.codes[r])];
        MajorityRuleResult::Rule rule;
        rule.locality = loc.labels[cell];
        rule.n = part.sizes[cell];
        rule.majority_class = cnt[1] > cnt[0] ? 1 : 0;
        if (cnt[0] > 0)
            rule.odds = static_cast<double>(cnt[1]) / static_cast<double>(cnt[0]);
        else
            rule.infinite_odds = true;
        out.rules.push_back(rule);
        correct += std::max(cnt[0], cnt[1]);
    }
    out.majority_accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return out;
}

} // namespace recodyn
