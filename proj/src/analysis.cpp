#include "recodyn/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "recodyn/discretize.hpp"
#include "recodyn/errors.hpp"

namespace recodyn {

const CodedColumn& CodedFrame::covariate(const std::string& name) const {
    for (const auto& c : covariates)
        if (c.name == name) return c;
    throw DataError("CodedFrame: unknown covariate '" + name + "'");
}

std::vector<const CodedColumn*> CodedFrame::covariate_ptrs() const {
    std::vector<const CodedColumn*> out;
    out.reserve(covariates.size());
    for (const auto& c : covariates) out.push_back(&c);
    return out;
}

CodedFrame code_frame(const Dataset& ds, const std::string& response,
                      std::vector<std::string> covariates, const ProtocolConfig& cfg,
                      int covariate_bins) {
    if (covariates.empty()) {
        for (const auto& f : ds.features())
            if (f.name != response) covariates.push_back(f.name);
    }
    std::vector<std::string> used = covariates;
    used.push_back(response);
    auto complete = ds.complete_rows(used);
    if (complete.rows.empty()) throw DataError("no complete rows over the selected columns");

    CodedFrame out;
    out.rows = std::move(complete.rows);
    out.dropped_rows = complete.dropped;

    auto code_one = [&](const std::string& name, int bins) {
        const Feature& f = ds.feature(name);
        if (f.kind == FeatureKind::Categorical) return f.coded(out.rows);
        std::vector<double> vals;
        vals.reserve(out.rows.size());
        for (std::uint32_t r : out.rows) vals.push_back(f.numeric[r]);
        // low-cardinality numeric columns: one category per distinct value
        std::vector<double> distinct(vals);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() <= static_cast<std::size_t>(bins)) {
            CodedColumn c;
            c.name = name;
            c.provenance = Provenance::Raw;
            c.n_cats = static_cast<Code>(distinct.size());
            for (double v : distinct) {
                std::ostringstream lab;
                lab << v;
                c.labels.push_back(lab.str());
            }
            c.codes.resize(vals.size());
            for (std::size_t i = 0; i < vals.size(); ++i)
                c.codes[i] = static_cast<Code>(
                    std::lower_bound(distinct.begin(), distinct.end(), vals[i]) - distinct.begin());
            return c;
        }
        return bin_feature(name, vals, bins, cfg.scheme);
    };

    out.response = code_one(response, cfg.response_bins);
    out.covariates.reserve(covariates.size());
    for (const auto& name : covariates) out.covariates.push_back(code_one(name, covariate_bins));
    return out;
}

} // namespace recodyn
