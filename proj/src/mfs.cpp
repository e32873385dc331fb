#include "recodyn/mfs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "recodyn/discretize.hpp"
#include "recodyn/errors.hpp"
#include "recodyn/infotheory.hpp"
#include "recodyn/parallel.hpp"
#include "recodyn/rng.hpp"
#include "recodyn/shadow.hpp"

namespace recodyn {

namespace {

std::string join_names(const std::vector<std::string>& names, const char* sep = "_") {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += sep;
        out += n;
    }
    return out;
}

std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k > n || k <= 0) return out;
    std::vector<int> idx(static_cast<std::size_t>(k));
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

double comb_count(int n, int k) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
}

// CE of y given the fused subset, counted over the uncompacted product space.
struct SubsetStats {
    double ce = 0.0;
    std::int64_t occupied = 0, table_rows = 0;
};

SubsetStats subset_ce(const CodedColumn& y, const std::vector<const CodedColumn*>& covs,
                      const std::vector<int>& set, std::vector<std::int64_t>& scratch) {
    const std::size_t n = y.size();
    const std::size_t ny = static_cast<std::size_t>(y.n_cats);
    std::uint64_t prod = 1;
    for (int i : set) prod *= static_cast<std::uint64_t>(covs[static_cast<std::size_t>(i)]->n_cats);

    if (prod * ny > (1ULL << 26)) {
        // rare: fall back to compacting fuse
        std::vector<const CodedColumn*> members;
        for (int i : set) members.push_back(covs[static_cast<std::size_t>(i)]);
        const CodedColumn fused = fuse(members);
        const auto js = joint_stats(fused.codes, fused.n_cats, y.codes, y.n_cats);
        return {js.ce, js.occupied, js.table_rows};
    }

    scratch.assign(static_cast<std::size_t>(prod) * ny, 0);
    for (std::size_t r = 0; r < n; ++r) {
        std::uint64_t code = 0;
        for (int i : set) {
            const CodedColumn* c = covs[static_cast<std::size_t>(i)];
            code = code * static_cast<std::uint64_t>(c->n_cats) +
                   static_cast<std::uint64_t>(c->codes[r]);
        }
        ++scratch[static_cast<std::size_t>(code) * ny + static_cast<std::size_t>(y.codes[r])];
    }

    SubsetStats s;
    const double dn = static_cast<double>(n);
    for (std::uint64_t row = 0; row < prod; ++row) {
        const std::int64_t* cells = scratch.data() + static_cast<std::size_t>(row) * ny;
        std::int64_t rs = 0;
        for (std::size_t c = 0; c < ny; ++c) rs += cells[c];
        if (rs == 0) continue;
        ++s.table_rows;
        double h = 0.0;
        for (std::size_t c = 0; c < ny; ++c) {
            if (cells[c] > 0) {
                ++s.occupied;
                const double p = static_cast<double>(cells[c]) / static_cast<double>(rs);
                h -= p * std::log(p);
            }
        }
        s.ce += (static_cast<double>(rs) / dn) * h;
    }
    return s;
}

} // namespace

std::string CEEntry::display_name() const { return join_names(names); }

CETable enumerate_ce(const CodedColumn& response, const std::vector<const CodedColumn*>& covariates,
                     int k, const ProtocolConfig& cfg) {
    const int ncov = static_cast<int>(covariates.size());
    if (k < 1) throw ConfigError("enumerate_ce: k must be >= 1");
    if (k > ncov) throw ConfigError("enumerate_ce: k exceeds covariate count");

    CETable table;
    table.k = k;
    table.n = static_cast<std::int64_t>(response.size());
    {
        std::vector<std::int64_t> ycnt(static_cast<std::size_t>(response.n_cats), 0);
        for (Code c : response.codes) ++ycnt[static_cast<std::size_t>(c)];
        table.h_response = entropy(ycnt);
    }

    std::vector<std::vector<int>> sets;
    if (comb_count(ncov, k) <= static_cast<double>(cfg.exhaustive_budget)) {
        table.mode = "exhaustive";
        sets = combinations(ncov, k);
    } else {
        table.mode = "beam";
        const CETable prev = enumerate_ce(response, covariates, k - 1, cfg);
        std::set<std::vector<int>> uniq;
        const std::size_t take =
            std::min(prev.entries.size(), static_cast<std::size_t>(cfg.beam_width));
        for (std::size_t e = 0; e < take; ++e) {
            for (int add = 0; add < ncov; ++add) {
                const auto& base = prev.entries[e].set;
                if (std::find(base.begin(), base.end(), add) != base.end()) continue;
                std::vector<int> s = base;
                s.push_back(add);
                std::sort(s.begin(), s.end());
                uniq.insert(std::move(s));
            }
        }
        sets.assign(uniq.begin(), uniq.end());
    }

    table.entries.resize(sets.size());
    parallel_for(sets.size(), cfg.threads, [&](std::size_t i) {
        std::vector<std::int64_t> scratch;
        CEEntry& e = table.entries[i];
        e.set = sets[i];
        for (int j : e.set) e.names.push_back(covariates[static_cast<std::size_t>(j)]->name);
        const auto s = subset_ce(response, covariates, e.set, scratch);
        e.ce = s.ce;
        e.ce_drop = table.h_response - s.ce;
        e.table_rows = s.table_rows;
        e.occupied_cells = s.occupied;
        e.avg_cell_count = static_cast<double>(table.n) / static_cast<double>(s.occupied);
        e.reliable = e.avg_cell_count >= cfg.reliability_min_avg_cell;
    });

    std::sort(table.entries.begin(), table.entries.end(), [](const CEEntry& a, const CEEntry& b) {
        if (a.ce != b.ce) return a.ce < b.ce;
        return a.set < b.set;
    });
    return table;
}

std::string ce_csv(const CETable& t) {
    std::ostringstream os;
    os.precision(12);
    os << "feature_set,ce,ce_drop,table_rows,occupied_cells,avg_cell_count,reliable\n";
    for (const auto& e : t.entries)
        os << e.display_name() << "," << e.ce << "," << e.ce_drop << "," << e.table_rows << ","
           << e.occupied_cells << "," << e.avg_cell_count << "," << (e.reliable ? 1 : 0) << "\n";
    return os.str();
}

NoiseBaseline noise_baseline(const CodedColumn& response, const CodedColumn& candidate_fused,
                             int replicates, std::uint64_t seed, int threads) {
    if (replicates < 2) throw ConfigError("noise_baseline: need at least 2 replicates");
    DeassocView global(nullptr, response);
    const std::uint64_t stream =
        rng::fnv1a(candidate_fused.name.data(), candidate_fused.name.size());
    const auto b = global.perm_baseline(candidate_fused.codes, candidate_fused.n_cats, replicates,
                                        seed, stream, threads);
    NoiseBaseline out;
    out.drops = b.drops;
    out.mean = b.mean;
    out.sd = b.sd;
    out.q95 = b.q95;
    return out;
}

C1Verdict c1_confirmable(double candidate_drop, const NoiseBaseline& base, double z) {
    C1Verdict v;
    v.excess = candidate_drop - base.mean;
    if (base.sd > 0.0) {
        v.margin_sd = v.excess / base.sd;
        v.pass = candidate_drop > base.mean + z * base.sd && candidate_drop > base.q95;
    } else {
        const double mx = base.drops.empty() ? base.mean
                                             : *std::max_element(base.drops.begin(), base.drops.end());
        v.margin_sd = v.excess > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        v.pass = candidate_drop > mx;
    }
    return v;
}

C2Verdict c2_unreplaceable(const CodedColumn& response,
                           const std::vector<const CodedColumn*>& covariates,
                           const std::vector<int>& B,
                           const std::vector<std::vector<int>>& identified) {
    C2Verdict v;
    v.ledger = Json::object();

    auto drop_of = [&](const std::vector<int>& set) {
        std::vector<const CodedColumn*> members;
        for (int i : set) members.push_back(covariates[static_cast<std::size_t>(i)]);
        const CodedColumn fused = fuse(members);
        const auto s = joint_stats(fused.codes, fused.n_cats, response.codes, response.n_cats);
        return s.h_col - s.ce;
    };
    auto names_of = [&](const std::vector<int>& set) {
        std::vector<std::string> nm;
        for (int i : set) nm.push_back(covariates[static_cast<std::size_t>(i)]->name);
        return join_names(nm);
    };

    v.drop_B = drop_of(B);
    v.ledger["set"] = names_of(B);
    v.ledger["drop"] = v.drop_B;

    // (i) every 2-way split must be superadditive
    v.splits_ok = true;
    Json splits = Json::array();
    if (B.size() >= 2) {
        const int m = static_cast<int>(B.size());
        for (std::uint32_t mask = 1; mask < (1u << (m - 1)); ++mask) {
            std::vector<int> b1, b2;
            for (int j = 0; j < m; ++j)
                ((mask >> j) & 1u ? b1 : b2).push_back(B[static_cast<std::size_t>(j)]);
            const double d1 = drop_of(b1), d2 = drop_of(b2);
            const bool super = v.drop_B > d1 + d2;
            splits.push_back({{"b1", names_of(b1)},
                              {"b2", names_of(b2)},
                              {"drop_b1", d1},
                              {"drop_b2", d2},
                              {"superadditive", super}});
            if (!super) v.splits_ok = false;
        }
    }
    v.ledger["splits"] = splits;

    // (ii) condition (a): drop(B) > drop(best single member) + |B| * max_b drop(B\{b})
    if (B.size() >= 2) {
        double best_single = 0.0;
        for (int b : B) best_single = std::max(best_single, drop_of({b}));
        double max_complement = 0.0;
        for (std::size_t j = 0; j < B.size(); ++j) {
            std::vector<int> rest;
            for (std::size_t t = 0; t < B.size(); ++t)
                if (t != j) rest.push_back(B[t]);
            max_complement = std::max(max_complement, drop_of(rest));
        }
        const double threshold = best_single + static_cast<double>(B.size()) * max_complement;
        v.cond_a_ok = v.drop_B > threshold;
        v.ledger["cond_a"] = {{"reading",
                               "drop(B) > drop(best single member) + |B| * max_b drop(B minus b)"},
                              {"best_single_drop", best_single},
                              {"max_complement_drop", max_complement},
                              {"threshold", threshold},
                              {"pass", v.cond_a_ok}};
    } else {
        v.cond_a_ok = true;
        v.ledger["cond_a"] = {{"pass", true}, {"note", "vacuous for order-1 sets"}};
    }

    // (iii) condition (b): joining any identified factor must be superadditive
    v.cond_b_ok = true;
    Json joins = Json::array();
    for (const auto& bm : identified) {
        std::vector<int> uni = B;
        for (int i : bm)
            if (std::find(uni.begin(), uni.end(), i) == uni.end()) uni.push_back(i);
        std::sort(uni.begin(), uni.end());
        if (uni.size() == B.size()) continue; // identified factor inside B
        const double d_join = drop_of(uni);
        const double d_bm = drop_of(bm);
        const bool ok = d_join >= v.drop_B + d_bm;
        joins.push_back({{"identified", names_of(bm)},
                         {"drop_join", d_join},
                         {"drop_identified", d_bm},
                         {"pass", ok}});
        if (!ok) v.cond_b_ok = false;
    }
    v.ledger["cond_b"] = joins;

    v.unreplaceable = v.splits_ok && v.cond_a_ok && v.cond_b_ok;
    v.ledger["unreplaceable"] = v.unreplaceable;
    return v;
}

std::string MajorFactorReport::factors_display() const {
    std::string out;
    for (const auto& f : factors) {
        if (!out.empty()) out += " + ";
        if (f.order > 1)
            out += "{" + join_names(f.features, ",") + "}";
        else
            out += f.features.front();
    }
    return out.empty() ? "(none)" : out;
}

// ---------------------------------------------------------------------------
// run_protocol
// ---------------------------------------------------------------------------

namespace {

struct GateRecord {
    double wdrop = 0.0, excess = 0.0, z = 0.0;
    double base_mean = 0.0, base_sd = 0.0, base_q95 = 0.0;
    bool pass = false;

    Json json() const {
        return {{"wdrop", wdrop},   {"excess", excess},       {"z", z},
                {"perm_mean", base_mean}, {"perm_sd", base_sd}, {"perm_q95", base_q95},
                {"pass", pass}};
    }
};

class ProtocolRunner {
public:
    ProtocolRunner(const Dataset& ds, const std::string& response,
                   std::vector<std::string> covariates, const ProtocolConfig& cfg)
        : cfg_(cfg) {
        base_ = code_frame(ds, response, covariates, cfg, cfg.bins);
        const int refined_bins =
            std::max(cfg.bins + 1, static_cast<int>(std::lround(cfg.bins * cfg.refine_factor)));
        refined_ = code_frame(ds, response, covariates, cfg, refined_bins);
        ncov_ = static_cast<int>(base_.covariates.size());
        // refinement applies only where re-binning changed anything
        refinable_.resize(static_cast<std::size_t>(ncov_), false);
        for (int i = 0; i < ncov_; ++i)
            refinable_[static_cast<std::size_t>(i)] =
                refined_.covariates[static_cast<std::size_t>(i)].n_cats !=
                base_.covariates[static_cast<std::size_t>(i)].n_cats;
    }

    MajorFactorReport run();

private:
    ProtocolConfig cfg_;
    CodedFrame base_, refined_;
    int ncov_ = 0;
    std::vector<bool> refinable_;

    struct ViewKey {
        std::vector<int> cond;
        bool refined;
        bool operator<(const ViewKey& o) const {
            return std::tie(cond, refined) < std::tie(o.cond, o.refined);
        }
    };
    struct ViewSlot {
        CodedColumn fused;
        std::unique_ptr<DeassocView> view;
    };
    std::map<ViewKey, ViewSlot> views_;

    struct Candidate {
        std::vector<int> set;
        double drop = 0.0;
        GateRecord c1;
        bool reliable = true;
    };

    const DeassocView& view(const std::vector<int>& cond, bool refined) {
        std::vector<int> key = cond;
        std::sort(key.begin(), key.end());
        auto it = views_.find({key, refined});
        if (it != views_.end()) return *it->second.view;
        ViewSlot slot;
        if (key.empty()) {
            slot.view = std::make_unique<DeassocView>(nullptr, base_.response);
        } else {
            std::vector<const CodedColumn*> members;
            for (int i : key) {
                const CodedFrame& frame = refined ? refined_ : base_;
                members.push_back(&frame.covariates[static_cast<std::size_t>(i)]);
            }
            slot.fused = fuse(members);
            slot.view = std::make_unique<DeassocView>(&slot.fused, base_.response);
        }
        auto [pos, ok] = views_.emplace(ViewKey{key, refined}, std::move(slot));
        return *pos->second.view;
    }

    std::uint64_t stream_for(const std::vector<int>& cond, const std::vector<int>& set,
                             bool refined) const {
        std::uint64_t h = rng::fnv1a("gate", 4);
        for (int i : cond) h = rng::splitmix64(h ^ static_cast<std::uint64_t>(i + 1));
        h = rng::splitmix64(h ^ 0xC0FFEEULL);
        for (int i : set) h = rng::splitmix64(h ^ static_cast<std::uint64_t>(i + 1));
        return rng::splitmix64(h ^ (refined ? 2ULL : 1ULL));
    }

    GateRecord gate(const std::vector<int>& cond, const std::vector<int>& set, bool refined) {
        const DeassocView& v = view(cond, refined);
        // candidate itself always enters at base coding
        const CodedColumn* col;
        CodedColumn fused_storage;
        if (set.size() == 1) {
            col = &base_.covariates[static_cast<std::size_t>(set.front())];
        } else {
            std::vector<const CodedColumn*> members;
            for (int i : set) members.push_back(&base_.covariates[static_cast<std::size_t>(i)]);
            fused_storage = fuse(members);
            col = &fused_storage;
        }
        const auto d = v.wdrop(col->codes, col->n_cats);
        const auto b = v.perm_baseline(col->codes, col->n_cats, cfg_.replicates, cfg_.seed,
                                       stream_for(cond, set, refined), cfg_.threads);
        GateRecord g;
        g.wdrop = d.wdrop;
        g.base_mean = b.mean;
        g.base_sd = b.sd;
        g.base_q95 = b.q95;
        g.excess = d.wdrop - b.mean;
        NoiseBaseline nb;
        nb.drops = b.drops;
        nb.mean = b.mean;
        nb.sd = b.sd;
        nb.q95 = b.q95;
        const auto verdict = c1_confirmable(d.wdrop, nb, cfg_.z);
        g.pass = verdict.pass;
        g.z = verdict.margin_sd;
        return g;
    }

    // both gates: base view and (when any conditioning feature refines) the
    // refined-conditioning view
    struct TwoGate {
        GateRecord base, refined;
        bool refined_applicable = false;
        bool pass = false;
    };
    TwoGate two_gate(const std::vector<int>& cond, const std::vector<int>& set) {
        TwoGate t;
        t.base = gate(cond, set, false);
        t.refined_applicable = false;
        for (int i : cond)
            if (refinable_[static_cast<std::size_t>(i)]) t.refined_applicable = true;
        if (!t.base.pass || cond.empty() || !t.refined_applicable) {
            t.pass = t.base.pass;
            return t;
        }
        t.refined = gate(cond, set, true);
        t.pass = t.base.pass && t.refined.pass;
        return t;
    }

    std::string name_of(int i) const {
        return base_.covariates[static_cast<std::size_t>(i)].name;
    }
    std::vector<std::string> names_of(const std::vector<int>& set) const {
        std::vector<std::string> out;
        for (int i : set) out.push_back(name_of(i));
        return out;
    }
    Json set_json(const std::vector<int>& s) const {
        Json j = Json::array();
        for (int i : s) j.push_back(name_of(i));
        return j;
    }
};

MajorFactorReport ProtocolRunner::run() {
    MajorFactorReport rep;
    Json& doc = rep.document;
    doc["schema_version"] = "1.0";
    doc["response"] = base_.response.name;
    Json covj = Json::array();
    for (int i = 0; i < ncov_; ++i) covj.push_back(name_of(i));
    doc["covariates"] = covj;
    doc["n_rows"] = base_.rows.size();
    doc["dropped_rows"] = base_.dropped_rows;
    Json cfgj = Json::object();
    // thread count is an execution detail; reports must be identical across
    // worker counts, so it stays out of the snapshot
    for (const auto& [k, v] : cfg_.items())
        if (k != "threads") cfgj[k] = v;
    doc["config"] = cfgj;
    doc["seed"] = cfg_.seed;
    doc["protocol"] = {
        {"candidate_rank", "excess drop = drop - same-dimension permutation mean"},
        {"admission", "local [C1] in the base view and in the refined-conditioning view"},
        {"depth", "views condition on at most max_depth features jointly"},
        {"revocation", "leave-one-out [C1] beyond the rest of the collection"},
        {"pair_resolution",
         "pair dissolves only when both members' global excesses dominate every "
         "background covariate (never gate-passing, never confirmed) at z sigma"},
        {"c2_cond_a_reading",
         "drop(B) > drop(best single member) + |B| * max_b drop(B minus b)"}};
    Json trail = Json::array();

    // ---- MFS-1: association map --------------------------------------------
    {
        std::vector<const CodedColumn*> all;
        all.push_back(&base_.response);
        for (const auto& c : base_.covariates) all.push_back(&c);
        const MCEMatrix m = mce_matrix(all, cfg_.threads);
        rep.attachments["mce.csv"] = mce_csv(m);
        Json leaf = Json::array();
        for (int i : m.leaf_order) leaf.push_back(m.names[static_cast<std::size_t>(i)]);
        trail.push_back({{"step", "mfs1_mce"}, {"leaf_order", leaf}});
    }

    // ---- MFS-2: CE tables + global [C1] ------------------------------------
    const auto cov_ptrs = base_.covariate_ptrs();
    std::vector<CETable> tables;
    Json modes = Json::object();
    for (int k = 1; k <= std::min(cfg_.k_max, ncov_); ++k) {
        tables.push_back(enumerate_ce(base_.response, cov_ptrs, k, cfg_));
        rep.attachments["ce_" + std::to_string(k) + ".csv"] = ce_csv(tables.back());
        modes["k" + std::to_string(k)] = tables.back().mode;
    }
    trail.push_back({{"step", "mfs2_enumeration"}, {"modes", modes}});

    std::vector<GateRecord> solo(static_cast<std::size_t>(ncov_)); // global singles, for the pool test
    std::vector<Candidate> candidates;
    {
        Json mfs2 = Json::array();
        const std::vector<int> no_cond;
        for (const auto& table : tables) {
            if (table.k > 2) break;
            int tested = 0;
            for (const auto& e : table.entries) {
                if (table.k == 2 && tested >= cfg_.c1_pool) break;
                if (!e.reliable) continue;
                ++tested;
                const GateRecord g = gate(no_cond, e.set, false);
                if (table.k == 1) solo[static_cast<std::size_t>(e.set.front())] = g;
                Json rec = g.json();
                rec["set"] = set_json(e.set);
                rec["k"] = table.k;
                rec["ce"] = e.ce;
                mfs2.push_back(rec);
                if (g.pass) {
                    Candidate c;
                    c.set = e.set;
                    c.drop = e.ce_drop;
                    c.c1 = g;
                    candidates.push_back(std::move(c));
                }
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            if (a.c1.excess != b.c1.excess) return a.c1.excess > b.c1.excess;
            return a.set < b.set;
        });
        if (static_cast<int>(candidates.size()) > cfg_.shortlist_cap)
            candidates.resize(static_cast<std::size_t>(cfg_.shortlist_cap));
        Json shortlist = Json::array();
        for (const auto& c : candidates) shortlist.push_back(set_json(c.set));
        trail.push_back({{"step", "mfs2_global_c1"}, {"tests", mfs2}, {"shortlist", shortlist}});
    }

    if (candidates.empty()) {
        doc["trail"] = trail;
        doc["major_factors"] = Json::array();
        doc["rejected"] = Json::array();
        return rep;
    }

    // ---- MFS-3: cross-examination of candidates -----------------------------
    {
        Json cross = Json::array();
        for (const auto& a : candidates) {
            Json viewj;
            viewj["view"] = set_json(a.set);
            Json tests = Json::array();
            std::map<int, double> single_excess_in_view;
            for (const auto& b : candidates) {
                if (a.set == b.set) continue;
                bool disjoint = true;
                for (int i : b.set)
                    if (std::find(a.set.begin(), a.set.end(), i) != a.set.end()) disjoint = false;
                if (!disjoint) continue;
                const GateRecord g = gate(a.set, b.set, false);
                Json rec = g.json();
                rec["set"] = set_json(b.set);
                if (b.set.size() == 2) {
                    // ecological margin on bias-adjusted excesses
                    for (int m : b.set)
                        if (!single_excess_in_view.count(m))
                            single_excess_in_view[m] = gate(a.set, {m}, false).excess;
                    const double eco = g.excess - single_excess_in_view[b.set[0]] -
                                       single_excess_in_view[b.set[1]];
                    rec["eco_margin"] = eco;
                }
                tests.push_back(rec);
            }
            viewj["tests"] = tests;
            cross.push_back(viewj);
        }
        trail.push_back({{"step", "mfs3_cross_exam"}, {"views", cross}});
    }

    // ---- seed ----------------------------------------------------------------
    std::vector<std::vector<int>> groups; // confirmed factors, first = seed group
    std::vector<int> cond;
    {
        const Candidate& top = candidates.front();
        Json seedj;
        seedj["step"] = "seed";
        seedj["top_candidate"] = set_json(top.set);
        if (top.set.size() == 2) {
            const int a = top.set[0], b = top.set[1];
            const TwoGate b_beyond_a = two_gate({a}, {b});
            const TwoGate a_beyond_b = two_gate({b}, {a});
            seedj["cross_member"] = {{"b_beyond_a", b_beyond_a.base.json()},
                                     {"a_beyond_b", a_beyond_b.base.json()}};
            // [C2] bookkeeping for the seed pair, as evidence
            const C2Verdict c2 = c2_unreplaceable(base_.response, cov_ptrs, top.set, {});
            seedj["c2_global"] = c2.ledger;
            if (b_beyond_a.pass && a_beyond_b.pass) {
                groups.push_back({a, b});
            } else if (b_beyond_a.pass || a_beyond_b.pass) {
                // only one member adds beyond the other: keep the dominant one
                const int keep = solo[static_cast<std::size_t>(a)].excess >=
                                         solo[static_cast<std::size_t>(b)].excess
                                     ? a
                                     : b;
                groups.push_back({keep});
                seedj["note"] = "pair degenerate; seeding with dominant member";
            } else {
                const int keep = solo[static_cast<std::size_t>(a)].excess >=
                                         solo[static_cast<std::size_t>(b)].excess
                                     ? a
                                     : b;
                groups.push_back({keep});
                seedj["note"] = "cross-member confirmation failed; seeding with dominant member";
            }
        } else {
            groups.push_back(top.set);
        }
        for (const auto& g : groups)
            for (int i : g) cond.push_back(i);
        seedj["seed_group"] = set_json(groups.front());
        trail.push_back(seedj);
    }

    // ---- MFS-4: growth by de-association rounds ------------------------------
    // max_depth caps how many features a de-association view may condition on
    // jointly; growth stops once the collection reaches that depth.
    std::set<int> ever_confirmed(cond.begin(), cond.end());
    std::set<int> gate_passers; // singles that ever cleared both admission gates
    {
        for (int round = 1; static_cast<int>(cond.size()) <= cfg_.max_depth && round <= ncov_;
             ++round) {
            Json roundj;
            roundj["step"] = "growth_round";
            roundj["depth"] = cond.size();
            roundj["round"] = round;
            roundj["conditioning"] = set_json(cond);
            Json tests = Json::array();
            int best = -1;
            double best_excess = 0.0;
            for (int s = 0; s < ncov_; ++s) {
                if (std::find(cond.begin(), cond.end(), s) != cond.end()) continue;
                const TwoGate t = two_gate(cond, {s});
                Json rec;
                rec["set"] = set_json({s});
                rec["base"] = t.base.json();
                if (t.refined_applicable && t.base.pass) rec["refined"] = t.refined.json();
                rec["admitted"] = false;
                rec["pass"] = t.pass;
                tests.push_back(rec);
                if (t.pass) {
                    gate_passers.insert(s);
                    if (best < 0 || t.base.excess > best_excess) {
                        best = s;
                        best_excess = t.base.excess;
                    }
                }
            }
            // XOR-style discovery: a shortlisted pair whose members fail solo
            // may still enter as an order-2 unit
            for (const auto& c : candidates) {
                if (c.set.size() != 2) continue;
                bool outside = true;
                for (int i : c.set)
                    if (std::find(cond.begin(), cond.end(), i) != cond.end()) outside = false;
                if (!outside) continue;
                const bool solo_any = gate(cond, {c.set[0]}, false).pass ||
                                      gate(cond, {c.set[1]}, false).pass;
                if (solo_any) continue;
                const TwoGate t = two_gate(cond, c.set);
                if (t.pass && t.base.excess > best_excess) {
                    Json rec;
                    rec["set"] = set_json(c.set);
                    rec["base"] = t.base.json();
                    rec["admitted"] = false;
                    rec["pass"] = true;
                    rec["unit"] = true;
                    tests.push_back(rec);
                    // admit the pair as a unit immediately (dominant)
                    groups.push_back(c.set);
                    for (int i : c.set) {
                        cond.push_back(i);
                        ever_confirmed.insert(i);
                    }
                    tests.back()["admitted"] = true;
                    roundj["admitted"] = set_json(c.set);
                    best = -2;
                    break;
                }
            }
            if (best >= 0) {
                groups.push_back({best});
                cond.push_back(best);
                ever_confirmed.insert(best);
                for (auto& rec : tests)
                    if (rec["set"].size() == 1 && rec["set"][0] == name_of(best))
                        rec["admitted"] = true;
                roundj["admitted"] = set_json({best});
            } else if (best == -1) {
                roundj["admitted"] = Json::array();
            }
            roundj["tests"] = tests;
            trail.push_back(roundj);
            if (best == -1) break;
        }
    }

    // ---- revocation sweep -----------------------------------------------------
    std::set<int> revoked;
    {
        Json sweepj = Json::array();
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t gi = 0; gi < groups.size() && !changed; ++gi) {
                for (int m : groups[gi]) {
                    std::vector<int> rest;
                    for (int i : cond)
                        if (i != m) rest.push_back(i);
                    if (rest.empty()) continue;
                    const TwoGate t = two_gate(rest, {m});
                    Json rec;
                    rec["member"] = name_of(m);
                    rec["beyond"] = set_json(rest);
                    rec["base"] = t.base.json();
                    if (t.refined_applicable && t.base.pass) rec["refined"] = t.refined.json();
                    rec["revoked"] = !t.pass;
                    sweepj.push_back(rec);
                    if (!t.pass) {
                        revoked.insert(m);
                        auto& g = groups[gi];
                        g.erase(std::remove(g.begin(), g.end(), m), g.end());
                        cond.erase(std::remove(cond.begin(), cond.end(), m), cond.end());
                        if (g.empty()) groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(gi));
                        changed = true;
                        break;
                    }
                }
            }
        }
        trail.push_back({{"step", "revocation_sweep"}, {"tests", sweepj}});
    }

    // ---- seed-pair resolution ---------------------------------------------------
    if (!groups.empty() && groups.front().size() == 2) {
        const int a = groups.front()[0], b = groups.front()[1];
        Json res;
        res["step"] = "pair_resolution";
        res["pair"] = set_json(groups.front());
        // background pool: covariates that never cleared an admission gate in
        // any view and were never part of the collection
        std::vector<int> pool;
        for (int i = 0; i < ncov_; ++i)
            if (!ever_confirmed.count(i) && !revoked.count(i) && !gate_passers.count(i))
                pool.push_back(i);
        auto dominant = [&](int m) {
            const GateRecord& gm = solo[static_cast<std::size_t>(m)];
            for (int p : pool) {
                const GateRecord& gp = solo[static_cast<std::size_t>(p)];
                const double sd = std::sqrt(gm.base_sd * gm.base_sd + gp.base_sd * gp.base_sd);
                if (!(gm.excess - gp.excess > cfg_.z * sd)) return false;
            }
            return !pool.empty();
        };
        const bool da = dominant(a), db = dominant(b);
        res["pool"] = set_json(pool);
        res["member_dominant"] = {{name_of(a), da}, {name_of(b), db}};
        if (da && db) {
            groups.erase(groups.begin());
            groups.insert(groups.begin(), {b});
            groups.insert(groups.begin(), {a});
            res["resolution"] = "dissolved into order-1 factors";
        } else {
            res["resolution"] = "kept as one order-2 factor";
        }
        trail.push_back(res);
    }

    // ---- uniformity evidence for the final collection --------------------------
    {
        Json uni = Json::array();
        if (!groups.empty()) {
            const std::vector<int> seed_set = groups.front();
            const DeassocView& v = view(seed_set, false);
            for (const auto& g : groups) {
                if (g == seed_set) continue;
                for (int m : g) {
                    const CodedColumn& col = base_.covariates[static_cast<std::size_t>(m)];
                    const auto u = v.uniformity(col.codes, col.n_cats, cfg_.replicates, cfg_.seed,
                                                stream_for(seed_set, {m}, false) ^ 0xA0ULL,
                                                cfg_.min_cell);
                    uni.push_back({{"member", name_of(m)},
                                   {"view", set_json(seed_set)},
                                   {"reported_cells", u.reported_cells},
                                   {"passing_cells", u.passing_cells},
                                   {"fraction", u.fraction}});
                }
            }
        }
        trail.push_back({{"step", "uniformity"}, {"records", uni}});
    }

    // ---- final assembly ---------------------------------------------------------
    std::sort(groups.begin(), groups.end(), [](const std::vector<int>& x, const std::vector<int>& y) {
        if (x.size() != y.size()) return x.size() > y.size();
        return x < y;
    });
    Json factj = Json::array();
    for (const auto& g : groups) {
        MajorFactor f;
        f.features = names_of(g);
        f.order = static_cast<int>(g.size());
        rep.factors.push_back(f);
        factj.push_back({{"features", set_json(g)}, {"order", g.size()}});
    }
    doc["major_factors"] = factj;

    Json rej = Json::array();
    for (const auto& c : candidates) {
        bool is_factor = false;
        for (const auto& g : groups) {
            std::vector<int> sg = g;
            std::vector<int> sc = c.set;
            std::sort(sg.begin(), sg.end());
            std::sort(sc.begin(), sc.end());
            if (sg == sc) is_factor = true;
        }
        if (is_factor) continue;
        std::string reason;
        bool any_revoked = false, all_in_cond = true;
        for (int i : c.set) {
            if (revoked.count(i)) any_revoked = true;
            if (std::find(cond.begin(), cond.end(), i) == cond.end()) all_in_cond = false;
        }
        if (any_revoked)
            reason = "member revoked: adds nothing beyond the confirmed collection";
        else if (all_in_cond)
            reason = "members absorbed into separate confirmed factors";
        else
            reason = "never admitted: failed admission gates or outranked in every round";
        rej.push_back({{"features", set_json(c.set)}, {"reason", reason}});
    }
    // revoked features that were not shortlisted candidates still get a record
    for (int m : revoked) {
        bool listed = false;
        for (const auto& c : candidates)
            if (c.set == std::vector<int>{m}) listed = true;
        if (!listed)
            rej.push_back({{"features", set_json({m})},
                           {"reason", "revoked during leave-one-out sweep"}});
    }
    doc["rejected"] = rej;
    doc["trail"] = trail;

    Json att = Json::array();
    for (const auto& [name, _] : rep.attachments) att.push_back(name);
    doc["attachments"] = att;
    return rep;
}

} // namespace

MajorFactorReport run_protocol(const Dataset& ds, const std::string& response,
                               std::vector<std::string> covariates, const ProtocolConfig& cfg) {
    cfg.validate();
    ProtocolRunner runner(ds, response, std::move(covariates), cfg);
    return runner.run();
}

// ---------------------------------------------------------------------------
// deassoc_ce / shadow_analysis
// ---------------------------------------------------------------------------

ConditionalCETable deassoc_ce(const Dataset& ds, const std::vector<std::string>& conditioning,
                              const std::string& response, std::vector<std::string> covariates,
                              int k_max, int min_cell, const ProtocolConfig& cfg) {
    if (conditioning.empty()) throw ConfigError("deassoc_ce: empty conditioning set");
    if (covariates.empty()) {
        for (const auto& f : ds.features()) {
            if (f.name == response) continue;
            if (std::find(conditioning.begin(), conditioning.end(), f.name) != conditioning.end())
                continue;
            covariates.push_back(f.name);
        }
    } else {
        for (const auto& c : covariates) {
            if (std::find(conditioning.begin(), conditioning.end(), c) != conditioning.end())
                throw ConfigError("deassoc_ce: covariate '" + c + "' overlaps the conditioning set");
            if (c == response) throw ConfigError("deassoc_ce: response among covariates");
        }
    }

    std::vector<std::string> all = covariates;
    all.insert(all.end(), conditioning.begin(), conditioning.end());
    const CodedFrame frame = code_frame(ds, response, all, cfg, cfg.bins);

    std::vector<const CodedColumn*> cond_cols;
    for (const auto& nm : conditioning) cond_cols.push_back(&frame.covariate(nm));
    const CodedColumn fused_cond = fuse(cond_cols);
    const Partition part = partition_by(fused_cond);
    const DeassocView view(&fused_cond, frame.response);

    ConditionalCETable out;
    out.conditioning = conditioning;
    out.response = response;
    out.base_weighted_ce = view.base_ce();

    for (std::size_t a = 0; a < part.n_cells(); ++a) {
        if (part.sizes[a] >= min_cell) {
            out.reported_cells.push_back(a);
            out.cell_labels.push_back(fused_cond.labels[a]);
            out.cell_sizes.push_back(part.sizes[a]);
        } else {
            out.skipped_cells.push_back(a);
        }
    }
    if (out.reported_cells.empty())
        throw DataError("deassoc_ce: all localities below min_cell = " + std::to_string(min_cell));

    const std::size_t ny = static_cast<std::size_t>(frame.response.n_cats);
    auto cell_ce = [&](const CodedColumn& col, std::span<const std::uint32_t> cell) {
        std::vector<std::int64_t> joint(static_cast<std::size_t>(col.n_cats) * ny, 0);
        for (std::uint32_t r : cell)
            ++joint[static_cast<std::size_t>(col.codes[r]) * ny +
                    static_cast<std::size_t>(frame.response.codes[r])];
        double acc = 0.0;
        for (Code s = 0; s < col.n_cats; ++s) {
            std::int64_t rs = 0;
            for (std::size_t c = 0; c < ny; ++c) rs += joint[static_cast<std::size_t>(s) * ny + c];
            if (rs == 0) continue;
            double h = 0.0;
            for (std::size_t c = 0; c < ny; ++c) {
                const std::int64_t v = joint[static_cast<std::size_t>(s) * ny + c];
                if (v > 0) {
                    const double p = static_cast<double>(v) / static_cast<double>(rs);
                    h -= p * std::log(p);
                }
            }
            acc += (static_cast<double>(rs) / static_cast<double>(cell.size())) * h;
        }
        return acc;
    };

    std::vector<std::vector<int>> sets;
    const int ncov = static_cast<int>(covariates.size());
    for (int k = 1; k <= std::min(k_max, ncov); ++k) {
        auto combos = combinations(ncov, k);
        sets.insert(sets.end(), combos.begin(), combos.end());
    }

    out.entries.resize(sets.size());
    parallel_for(sets.size(), cfg.threads, [&](std::size_t i) {
        ConditionalCEEntry& e = out.entries[i];
        const CodedColumn* col;
        CodedColumn storage;
        if (sets[i].size() == 1) {
            col = &frame.covariate(covariates[static_cast<std::size_t>(sets[i].front())]);
        } else {
            std::vector<const CodedColumn*> members;
            for (int j : sets[i])
                members.push_back(&frame.covariate(covariates[static_cast<std::size_t>(j)]));
            storage = fuse(members);
            col = &storage;
        }
        for (int j : sets[i]) e.features.push_back(covariates[static_cast<std::size_t>(j)]);
        e.weighted_ce = view.wdrop(col->codes, col->n_cats).ce;

        const double n_total = static_cast<double>(frame.response.size());
        double reported_weight = 0.0, reported_acc = 0.0;
        e.cell_ce.reserve(out.reported_cells.size());
        for (std::size_t a : out.reported_cells) {
            const double ce = cell_ce(*col, part.cell(a));
            e.cell_ce.push_back(ce);
            reported_acc += (static_cast<double>(part.sizes[a]) / n_total) * ce;
            reported_weight += static_cast<double>(part.sizes[a]) / n_total;
        }
        e.partial = !out.skipped_cells.empty();
        e.weighted_ce_reported = reported_weight > 0 ? reported_acc / reported_weight : 0.0;
    });

    std::sort(out.entries.begin(), out.entries.end(),
              [](const ConditionalCEEntry& a, const ConditionalCEEntry& b) {
                  if (a.weighted_ce != b.weighted_ce) return a.weighted_ce < b.weighted_ce;
                  return a.features < b.features;
              });
    return out;
}

std::vector<CETable> shadow_analysis(const Dataset& ds, const std::vector<std::string>& conditioning,
                                     const std::string& response, std::vector<std::string> covariates,
                                     int k_max, const ProtocolConfig& cfg) {
    if (conditioning.empty()) throw ConfigError("shadow_analysis: empty conditioning set");
    if (covariates.empty()) {
        for (const auto& f : ds.features())
            if (f.name != response) covariates.push_back(f.name);
    }
    std::vector<std::string> all = covariates;
    for (const auto& c : conditioning)
        if (std::find(all.begin(), all.end(), c) == all.end()) all.push_back(c);
    const CodedFrame frame = code_frame(ds, response, all, cfg, cfg.bins);

    std::vector<const CodedColumn*> cond_cols;
    for (const auto& nm : conditioning) cond_cols.push_back(&frame.covariate(nm));
    const CodedColumn fused_cond = fuse(cond_cols);
    const CodedColumn shadowed = shadow(fused_cond, frame.response, cfg.seed);

    std::vector<const CodedColumn*> cov_ptrs;
    for (const auto& nm : covariates) cov_ptrs.push_back(&frame.covariate(nm));

    std::vector<CETable> out;
    for (int k = 1; k <= std::min<int>(k_max, static_cast<int>(cov_ptrs.size())); ++k)
        out.push_back(enumerate_ce(shadowed, cov_ptrs, k, cfg));
    return out;
}

} // namespace recodyn
