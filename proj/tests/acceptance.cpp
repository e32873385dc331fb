// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavy end-to-end runs use the fixed seed and the pinned analysis
// configuration below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "recodyn/analysis.hpp"
#include "recodyn/discretize.hpp"
#include "recodyn/infotheory.hpp"
#include "recodyn/mfs.hpp"
#include "recodyn/odds.hpp"
#include "recodyn/partition.hpp"
#include "recodyn/rng.hpp"
#include "recodyn/shadow.hpp"
#include "recodyn/simgen.hpp"
#include "recodyn/tables.hpp"

using namespace recodyn;
namespace fs = std::filesystem;

namespace {

constexpr double kLn12 = 2.4849066497880004;
constexpr std::uint64_t kSeed = 1;
constexpr double kSigmaEps = 0.45; // see report config note: paper's eps sd is unstated

int g_failures = 0;
std::vector<std::string> g_lines;

void report(int criterion, const std::string& name, bool pass, const std::string& detail = "") {
    std::ostringstream os;
    os << "[" << (pass ? "PASS" : "FAIL") << "] criterion " << criterion << ": " << name;
    if (!detail.empty()) os << "  (" << detail << ")";
    g_lines.push_back(os.str());
    std::cout << g_lines.back() << std::endl;
    if (!pass) ++g_failures;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProtocolConfig pinned_config() {
    ProtocolConfig cfg;
    cfg.seed = kSeed;
    cfg.sigma_eps = kSigmaEps;
    cfg.threads = 2;
    return cfg;
}

Dataset make_example(SimExample which) {
    SimSpec spec;
    spec.example = which;
    spec.n = 100000;
    spec.seed = kSeed;
    spec.sigma_eps = kSigmaEps;
    return generate(spec);
}

CodedColumn random_coded(std::size_t n, Code cats, std::uint64_t seed, std::uint64_t stream) {
    CodedColumn c;
    c.name = "r" + std::to_string(stream);
    c.n_cats = cats;
    c.codes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        c.codes[i] = static_cast<Code>(rng::mix(seed, stream, i) % static_cast<std::uint64_t>(cats));
    for (Code k = 0; k < cats; ++k) c.labels.push_back(std::to_string(k));
    return c;
}

double oracle_entropy_codes(const CodedColumn& a) {
    std::vector<double> p(static_cast<std::size_t>(a.n_cats), 0.0);
    for (Code c : a.codes) p[static_cast<std::size_t>(c)] += 1.0;
    double h = 0.0;
    for (double c : p)
        if (c > 0) {
            const double q = c / static_cast<double>(a.size());
            h -= q * std::log(q);
        }
    return h;
}

double oracle_joint_entropy(const CodedColumn& a, const CodedColumn& b) {
    std::vector<double> p(static_cast<std::size_t>(a.n_cats) * static_cast<std::size_t>(b.n_cats),
                          0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        p[static_cast<std::size_t>(a.codes[i]) * static_cast<std::size_t>(b.n_cats) +
          static_cast<std::size_t>(b.codes[i])] += 1.0;
    double h = 0.0;
    for (double c : p)
        if (c > 0) {
            const double q = c / static_cast<double>(a.size());
            h -= q * std::log(q);
        }
    return h;
}

// ---------------------------------------------------------------------------

void criterion1_identity_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string why;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const std::uint64_t s = 40000 + static_cast<std::uint64_t>(trial);
        const std::size_t n = 200 + rng::mix(s, 9, 0) % 800;
        const Code ra = static_cast<Code>(2 + rng::mix(s, 10, 0) % 7);
        const Code rb = static_cast<Code>(2 + rng::mix(s, 11, 0) % 7);
        const Code ry = static_cast<Code>(2 + rng::mix(s, 12, 0) % 7);
        const auto a = random_coded(n, ra, s, 0);
        const auto b = random_coded(n, rb, s, 1);
        const auto y = random_coded(n, ry, s, 2);

        // chain rule
        const auto tab = build_table(a, y);
        if (std::abs(oracle_joint_entropy(a, y) - (entropy(tab.row_sums) + cond_entropy(tab))) >
            1e-10) {
            ok = false;
            why = "chain rule (trial " + std::to_string(trial) + ")";
            break;
        }
        // MI symmetry, three formulations
        const double d1 = ce_drop(tab);
        const double d2 = ce_drop(tab.transposed());
        const double d3 = oracle_entropy_codes(a) + oracle_entropy_codes(y) -
                          oracle_joint_entropy(a, y);
        if (std::abs(d1 - d2) > 1e-10 || std::abs(d1 - d3) > 1e-10) {
            ok = false;
            why = "MI symmetry (trial " + std::to_string(trial) + ")";
            break;
        }
        // decompose_pair identity
        const auto d = decompose_pair(y, a, b);
        if (std::abs(d.ce_drop_joint - (d.ce_drop_A + d.ce_drop_B + d.interaction)) > 1e-10) {
            ok = false;
            why = "decomposition identity (trial " + std::to_string(trial) + ")";
            break;
        }
        // weighted-CE = joint-CE partition identity
        const DeassocView view(&a, y);
        const auto wd = view.wdrop(b.codes, b.n_cats);
        const auto fused = fuse({&a, &b});
        if (std::abs(wd.ce - cond_entropy(build_table(fused, y))) > 1e-10) {
            ok = false;
            why = "partition identity (trial " + std::to_string(trial) + ")";
            break;
        }
    }
    const double secs = elapsed_s(t0);
    if (secs >= 10.0) {
        ok = false;
        why = "runtime " + std::to_string(secs) + "s";
    }
    std::ostringstream d;
    d.precision(3);
    d << "1000 tables, " << secs << " s";
    report(1, "identity suite to 1e-10", ok, ok ? d.str() : why);
}

void criterion2_example1(const Dataset& ds1) {
    const auto t0 = std::chrono::steady_clock::now();
    ProtocolConfig cfg = pinned_config();
    const auto frame = code_frame(ds1, "Y", {}, cfg);

    // (a) k=1 ordering
    const auto t1 = enumerate_ce(frame.response, frame.covariate_ptrs(), 1, cfg);
    std::vector<std::string> order;
    for (const auto& e : t1.entries) order.push_back(e.names[0]);
    const bool a_ok = order.size() == 10 && order[0] == "X7" && order[1] == "X3" &&
                      order[2] == "X2" && order[3] == "X1" &&
                      std::set<std::string>(order.begin() + 4, order.begin() + 7) ==
                          std::set<std::string>{"X4", "X5", "X6"} &&
                      std::set<std::string>(order.begin() + 7, order.end()) ==
                          std::set<std::string>{"X8", "X9", "X10"};
    {
        std::string shown;
        for (const auto& nm : order) shown += nm + " ";
        report(2, "Example-1 (a) k=1 CE ranking", a_ok, shown);
    }

    // (b) noise-feature CE band
    double noise_ce = 0.0;
    for (const auto& e : t1.entries)
        if (e.names[0] == "X10") noise_ce = e.ce;
    const bool b_ok = noise_ce >= 2.30 && noise_ce <= kLn12;
    report(2, "Example-1 (b) noise CE in [2.30, ln 12]", b_ok, "CE[Y|X10] = " + std::to_string(noise_ce));

    // (c) top k=2 set
    const auto t2 = enumerate_ce(frame.response, frame.covariate_ptrs(), 2, cfg);
    const auto& top2 = t2.entries.front().names;
    const bool c_ok = std::set<std::string>(top2.begin(), top2.end()) ==
                      std::set<std::string>{"X4", "X7"};
    report(2, "Example-1 (c) top k=2 set is {X4,X7}", c_ok,
           top2.size() == 2 ? top2[0] + "," + top2[1] : "?");

    // (d) interaction of (X4,X7) negative
    const auto dec = decompose_pair(frame.response, frame.covariate("X4"), frame.covariate("X7"));
    report(2, "Example-1 (d) interaction(X4,X7) < 0", dec.interaction < 0.0,
           "interaction = " + std::to_string(dec.interaction));

    // (e) full protocol
    const auto rep = run_protocol(ds1, "Y", {}, cfg);
    std::set<std::set<std::string>> got;
    for (const auto& f : rep.factors) got.insert({f.features.begin(), f.features.end()});
    const std::set<std::set<std::string>> want{{"X4", "X7"}, {"X3"}, {"X1"}};
    report(2, "Example-1 (e) protocol returns {{X4,X7}, X3, X1}", got == want,
           rep.factors_display());

    const double secs = elapsed_s(t0);
    report(2, "Example-1 runtime < 5 min", secs < 300.0, std::to_string(secs) + " s");
}

void criterion3_example2(const Dataset& ds2) {
    const auto t0 = std::chrono::steady_clock::now();
    ProtocolConfig cfg = pinned_config();
    const auto frame = code_frame(ds2, "Y", {}, cfg);

    // (a) top k=3 set
    const auto t3 = enumerate_ce(frame.response, frame.covariate_ptrs(), 3, cfg);
    const auto& top3 = t3.entries.front().names;
    const bool a_ok = std::set<std::string>(top3.begin(), top3.end()) ==
                      std::set<std::string>{"X1", "X2", "X3"};
    std::string shown;
    for (const auto& nm : top3) shown += nm + " ";
    report(3, "Example-2 (a) top k=3 set is {X1,X2,X3}", a_ok, shown);

    // (b) after de-association by {X1,X2,X3}, X7's weighted CE not below the noise features'
    const auto ct = deassoc_ce(ds2, {"X1", "X2", "X3"}, "Y", {}, 1, 0, cfg);
    double ce7 = 0.0, noise_min = 1e9;
    for (const auto& e : ct.entries) {
        if (e.features == std::vector<std::string>{"X7"}) ce7 = e.weighted_ce;
        if (e.features[0] == "X8" || e.features[0] == "X9" || e.features[0] == "X10")
            noise_min = std::min(noise_min, e.weighted_ce);
    }
    report(3, "Example-2 (b) X7 weighted CE not below noise after de-association",
           ce7 >= noise_min - 1e-12,
           "X7 = " + std::to_string(ce7) + ", min noise = " + std::to_string(noise_min));

    // (c) full protocol
    const auto rep = run_protocol(ds2, "Y", {}, cfg);
    std::set<std::set<std::string>> got;
    for (const auto& f : rep.factors) got.insert({f.features.begin(), f.features.end()});
    const std::set<std::set<std::string>> want{{"X1"}, {"X2"}, {"X3"}};
    report(3, "Example-2 (c) protocol returns {X1, X2, X3}", got == want, rep.factors_display());

    const double secs = elapsed_s(t0);
    report(3, "Example-2 runtime < 5 min", secs < 300.0, std::to_string(secs) + " s");
}

void criterion4_shadowing(const Dataset& ds1) {
    ProtocolConfig cfg = pinned_config();
    const auto frame = code_frame(ds1, "Y", {}, cfg);
    const auto& x7 = frame.covariate("X7");
    const auto& y = frame.response;
    const auto ystar = shadow(x7, y, cfg.seed);

    // marginal TV
    std::vector<double> p0(static_cast<std::size_t>(y.n_cats), 0.0), p1 = p0;
    for (Code c : y.codes) p0[static_cast<std::size_t>(c)] += 1.0;
    for (Code c : ystar.codes) p1[static_cast<std::size_t>(c)] += 1.0;
    double tv = 0;
    for (std::size_t i = 0; i < p0.size(); ++i)
        tv += std::abs(p0[i] - p1[i]) / static_cast<double>(y.size());
    tv /= 2;
    report(4, "shadow marginal TV <= 0.02", tv <= 0.02, "TV = " + std::to_string(tv));

    const double ce_y_7 = cond_entropy(build_table(x7, y));
    const double ce_s_7 = cond_entropy(build_table(x7, ystar));
    report(4, "|CE[Y*|X7] - CE[Y|X7]| <= 0.05", std::abs(ce_s_7 - ce_y_7) <= 0.05,
           std::to_string(ce_s_7) + " vs " + std::to_string(ce_y_7));

    const auto fused = fuse({&frame.covariate("X4"), &x7});
    const double ce_y_47 = cond_entropy(build_table(fused, y));
    const double ce_s_47 = cond_entropy(build_table(fused, ystar));
    report(4, "CE[Y*|{X4,X7}] exceeds CE[Y|{X4,X7}] by >= 0.15", ce_s_47 - ce_y_47 >= 0.15,
           std::to_string(ce_s_47) + " vs " + std::to_string(ce_y_47));
}

void criterion5_xor() {
    SimSpec spec;
    spec.example = SimExample::Xor;
    spec.n = 10000;
    spec.seed = kSeed;
    const auto ds = generate(spec);
    ProtocolConfig cfg = pinned_config();
    const auto frame = code_frame(ds, "Y", {"X1", "X2"}, cfg);
    const auto& x1 = frame.covariate("X1");
    const auto& x2 = frame.covariate("X2");

    const double d1 = ce_drop(build_table(x1, frame.response));
    const double d2 = ce_drop(build_table(x2, frame.response));
    const auto fused = fuse({&x1, &x2});
    const double dj = ce_drop(build_table(fused, frame.response));
    const bool singles_zero = std::abs(d1) < 1e-12 && std::abs(d2) < 1e-12;
    const bool joint_ln2 = std::abs(dj - std::log(2)) < 1e-3;
    report(5, "xor: single ce_drops exactly 0", singles_zero,
           std::to_string(d1) + ", " + std::to_string(d2));
    report(5, "xor: joint ce_drop = ln 2 within 1e-3", joint_ln2, std::to_string(dj));

    const auto c2 = c2_unreplaceable(frame.response, frame.covariate_ptrs(), {0, 1}, {});
    report(5, "xor: c2_unreplaceable passes", c2.unreplaceable);

    const auto nb_pair = noise_baseline(frame.response, fused, cfg.replicates, cfg.seed, cfg.threads);
    const bool pair_c1 = c1_confirmable(dj, nb_pair, cfg.z).pass;
    const auto nb1 = noise_baseline(frame.response, x1, cfg.replicates, cfg.seed, cfg.threads);
    const auto nb2 = noise_baseline(frame.response, x2, cfg.replicates, cfg.seed + 1, cfg.threads);
    const bool single_c1 =
        c1_confirmable(d1, nb1, cfg.z).pass || c1_confirmable(d2, nb2, cfg.z).pass;
    report(5, "xor: c1 passes for the pair, fails for each single", pair_c1 && !single_c1);
}

void criterion6_table9() {
    // direct input of the reference counts
    const std::vector<std::int64_t> counts{99044, 2876, 39842, 3089, 39905, 4264, 50996, 13664};
    const auto t = table_from_counts(counts, 4, 2);
    const auto p = row_proportions(t);
    // vectors derived from the counts themselves; the commonly quoted display
    // for row (1,1) is inconsistent with its own counts
    bool probs_ok = true;
    for (int r = 0; r < 4; ++r) {
        const double rs = static_cast<double>(counts[static_cast<std::size_t>(r * 2)] +
                                              counts[static_cast<std::size_t>(r * 2 + 1)]);
        for (int c = 0; c < 2; ++c) {
            const double want = static_cast<double>(counts[static_cast<std::size_t>(r * 2 + c)]) / rs;
            if (std::abs(p[static_cast<std::size_t>(r * 2 + c)] - want) > 5e-4) probs_ok = false;
        }
    }
    // row (0,0) display is itself consistent; pin it too
    if (std::abs(p[0] - 0.972) > 1e-3 || std::abs(p[1] - 0.028) > 1e-3) probs_ok = false;
    report(6, "prob-vectors match the count-derived values to 3 decimals", probs_ok,
           "row (1,1) derived = (" + std::to_string(p[6]) + ", " + std::to_string(p[7]) + ")");

    const auto chol = table_from_counts({138949, 7140, 90838, 16753}, 2, 2);
    const double or_chol = odds_ratio(odds_table(chol), 1, 0).value;
    report(6, "HiChol odds-ratio 3.59 +/- 0.05", std::abs(or_chol - 3.59) <= 0.05,
           "measured " + std::to_string(or_chol));

    // from the reference marginal counts the ratio evaluates to 4.592; the
    // quoted 4.5 truncates it, so this band cannot hold -- asserted as stated
    const auto bp = table_from_counts({138886, 5965, 90901, 17928}, 2, 2);
    const double or_bp = odds_ratio(odds_table(bp), 1, 0).value;
    report(6, "HiBP odds-ratio 4.5 +/- 0.05", std::abs(or_bp - 4.5) <= 0.05,
           "measured " + std::to_string(or_bp));

    const double blind = 229787.0 / 253680.0;
    report(6, "blind-rule accuracy 0.9058 +/- 0.0005", std::abs(blind - 0.9058) <= 5e-4,
           std::to_string(blind));
}

void criterion7_determinism(const Dataset& ds1) {
    ProtocolConfig cfg = pinned_config();
    std::vector<std::string> docs;
    for (int threads : {1, 4, 8}) {
        cfg.threads = threads;
        const auto rep = run_protocol(ds1, "Y", {}, cfg);
        std::string blob = rep.document.dump(2);
        for (const auto& [name, content] : rep.attachments) blob += "\n--" + name + "--\n" + content;
        docs.push_back(std::move(blob));
    }
    const bool ok = docs[0] == docs[1] && docs[1] == docs[2];
    report(7, "select is byte-identical for threads in {1,4,8}", ok);
}

void criterion8_performance() {
    // engineering target: exhaustive k <= 3 over 22 covariates at N=250k
    SimSpec spec;
    spec.example = SimExample::Custom;
    spec.n = 250000;
    spec.seed = 5;
    spec.custom_covariates = 22;
    spec.coefficients = {0.8, 1.0, 1.2, 0.0, 0.5};
    spec.rho = 0.3;
    const auto ds = generate(spec);
    ProtocolConfig cfg;
    cfg.threads = 8;
    const auto frame = code_frame(ds, "Y", {}, cfg);

    const auto t0 = std::chrono::steady_clock::now();
    std::size_t sets = 0;
    for (int k = 1; k <= 3; ++k) {
        const auto t = enumerate_ce(frame.response, frame.covariate_ptrs(), k, cfg);
        sets += t.entries.size();
    }
    const double secs = elapsed_s(t0);
    report(8, "exhaustive k<=3 over 22 covariates at N=250k in < 60 s with 8 workers",
           sets == 22 + 231 + 1540 && secs < 60.0,
           std::to_string(sets) + " sets in " + std::to_string(secs) + " s");
}

void criterion9_brfss() {
    const char* path = std::getenv("RECODYN_BRFSS_CSV");
    if (path == nullptr || !fs::exists(path)) {
        g_lines.push_back("[SKIP] criterion 9: BRFSS file not present (set RECODYN_BRFSS_CSV)");
        std::cout << g_lines.back() << std::endl;
        return;
    }
    ProtocolConfig cfg = pinned_config();
    IngestOptions opts;
    // every column in this export is integer-coded categorical
    const auto probe = ingest_csv(path, {});
    for (const auto& f : probe.features()) opts.kind_overrides[f.name] = FeatureKind::Categorical;
    const auto ds = ingest_csv(path, {"HeartDiseaseorAttack"}, opts);
    const auto frame = code_frame(ds, "HeartDiseaseorAttack", {"HighBP", "HighChol"}, cfg);
    const auto fusedbp = fuse({&frame.covariate("HighBP"), &frame.covariate("HighChol")});
    const auto t = build_table(fusedbp, frame.response);
    const std::vector<std::int64_t> want{99044, 2876, 39842, 3089, 39905, 4264, 50996, 13664};
    report(9, "BRFSS reproduces the reference 4x2 counts exactly", t.counts == want);
}

} // namespace

int main() {
    const auto ds1 = make_example(SimExample::One);
    const auto ds2 = make_example(SimExample::Two);

    criterion1_identity_suite();
    criterion2_example1(ds1);
    criterion3_example2(ds2);
    criterion4_shadowing(ds1);
    criterion5_xor();
    criterion6_table9();
    criterion7_determinism(ds1);
    criterion8_performance();
    criterion9_brfss();

    std::cout << "\n";
    for (const auto& line : g_lines) std::cout << line << "\n";
    std::cout << "\n" << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(g_failures))
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
