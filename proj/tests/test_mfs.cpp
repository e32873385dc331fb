#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "recodyn/analysis.hpp"
#include "recodyn/errors.hpp"
#include "recodyn/infotheory.hpp"
#include "recodyn/mfs.hpp"
#include "recodyn/rng.hpp"
#include "recodyn/simgen.hpp"
#include "recodyn/tables.hpp"

using namespace recodyn;

namespace {

Dataset example(SimExample which, double sigma = 0.45, std::uint64_t seed = 1,
                std::size_t n = 100000) {
    SimSpec spec;
    spec.example = which;
    spec.n = n;
    spec.seed = seed;
    spec.sigma_eps = sigma;
    return generate(spec);
}

} // namespace

TEST_CASE("enumerate_ce: single covariate k=1 equals its table CE") {
    const auto ds = example(SimExample::One, 1.0, 2, 20000);
    ProtocolConfig cfg;
    const auto frame = code_frame(ds, "Y", {"X7"}, cfg);
    const auto t = enumerate_ce(frame.response, frame.covariate_ptrs(), 1, cfg);
    REQUIRE(t.entries.size() == 1);
    const double direct = cond_entropy(build_table(frame.covariate("X7"), frame.response));
    CHECK(t.entries[0].ce == doctest::Approx(direct).epsilon(1e-12));
    CHECK(t.mode == "exhaustive");
}

TEST_CASE("enumerate_ce entries are sorted, annotated, and monotone under supersets") {
    const auto ds = example(SimExample::One, 1.0, 2, 30000);
    ProtocolConfig cfg;
    cfg.threads = 2;
    const auto frame = code_frame(ds, "Y", {}, cfg);
    const auto t1 = enumerate_ce(frame.response, frame.covariate_ptrs(), 1, cfg);
    const auto t2 = enumerate_ce(frame.response, frame.covariate_ptrs(), 2, cfg);
    for (std::size_t i = 1; i < t2.entries.size(); ++i)
        CHECK(t2.entries[i - 1].ce <= t2.entries[i].ce + 1e-15);
    // plug-in CE of a superset never exceeds the subset's
    for (const auto& pair : t2.entries) {
        for (const auto& single : t1.entries) {
            if (std::find(pair.set.begin(), pair.set.end(), single.set[0]) != pair.set.end())
                CHECK(pair.ce <= single.ce + 1e-10);
        }
        CHECK(pair.avg_cell_count ==
              doctest::Approx(static_cast<double>(t2.n) / static_cast<double>(pair.occupied_cells)));
    }
}

TEST_CASE("enumerate_ce beam mode covers extensions of the top (k-1)-sets") {
    const auto ds = example(SimExample::One, 1.0, 2, 20000);
    ProtocolConfig cfg;
    cfg.exhaustive_budget = 10; // force beam at k=2 (45 pairs > 10)
    cfg.beam_width = 3;
    const auto frame = code_frame(ds, "Y", {}, cfg);
    const auto t2 = enumerate_ce(frame.response, frame.covariate_ptrs(), 2, cfg);
    CHECK(t2.mode == "beam");
    CHECK(t2.entries.size() <= 3u * 9u);
    CHECK(t2.entries.size() >= 9u);
    // k exceeding covariates is an error
    CHECK_THROWS_AS(
        static_cast<void>(enumerate_ce(frame.response, frame.covariate_ptrs(), 99, cfg)),
        ConfigError);
}

TEST_CASE("noise baseline: permuted response-copy collapses to baseline, not to H[Y]") {
    const auto ds = example(SimExample::One, 1.0, 3, 50000);
    ProtocolConfig cfg;
    const auto frame = code_frame(ds, "Y", {}, cfg);
    // candidate = the response itself: permutation must destroy the identity signal
    const auto nb = noise_baseline(frame.response, frame.response, 50, 9, 1);
    CHECK(nb.mean < 0.05);
    std::vector<std::int64_t> ycnt(static_cast<std::size_t>(frame.response.n_cats), 0);
    for (Code c : frame.response.codes) ++ycnt[static_cast<std::size_t>(c)];
    CHECK(nb.mean < entropy(ycnt) / 10);
}

TEST_CASE("noise baseline grows with table dimension (finite-sample bias)") {
    const auto ds = example(SimExample::One, 1.0, 3, 100000);
    ProtocolConfig cfg;
    const auto frame = code_frame(ds, "Y", {}, cfg);
    const auto& x8 = frame.covariate("X8");
    const auto& x9 = frame.covariate("X9");
    const auto nb12 = noise_baseline(frame.response, x8, 50, 5, 1);
    const auto fused = fuse({&x8, &x9}); // 144 categories
    const auto nb144 = noise_baseline(frame.response, fused, 50, 5, 1);
    CHECK(nb144.mean > nb12.mean);
    // 12-category noise vs 12-bin response at N=1e5: CE stays in the plug-in band
    const double drop = ce_drop(build_table(x8, frame.response));
    const double noise_ce = 2.4849066497880004 - drop;
    CHECK(noise_ce > 2.30);
    CHECK(noise_ce <= 2.4849066497880004);
}

TEST_CASE("c1_confirmable thresholds and degenerate sd") {
    NoiseBaseline nb;
    nb.drops = {0.01, 0.012, 0.011, 0.013, 0.009};
    nb.mean = 0.011;
    nb.sd = 0.0015;
    nb.q95 = 0.013;
    CHECK(c1_confirmable(0.5, nb, 3.0).pass);
    CHECK_FALSE(c1_confirmable(0.012, nb, 3.0).pass);
    // above mean+3sd but below q95 fails the dual requirement
    nb.q95 = 0.3;
    CHECK_FALSE(c1_confirmable(0.2, nb, 3.0).pass);
    // sd = 0: compare against max replicate
    nb.drops = {0.01, 0.01, 0.01};
    nb.mean = 0.01;
    nb.sd = 0.0;
    nb.q95 = 0.01;
    CHECK(c1_confirmable(0.02, nb, 3.0).pass);
    CHECK_FALSE(c1_confirmable(0.009, nb, 3.0).pass);
}

TEST_CASE("[C1] with z=3 rejects fresh independent noise in at least 99% of 200 trials") {
    const auto ds = example(SimExample::One, 1.0, 11);
    ProtocolConfig cfg;
    cfg.threads = 2;
    const auto frame = code_frame(ds, "Y", {"X1"}, cfg);
    const std::size_t n = frame.response.size();
    int rejected = 0;
    for (int trial = 0; trial < 200; ++trial) {
        CodedColumn noise;
        noise.name = "noise";
        noise.n_cats = 12;
        noise.codes.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            noise.codes[i] = static_cast<Code>(
                rng::mix(777, static_cast<std::uint64_t>(trial), i) % 12);
        const double drop = ce_drop(build_table(noise, frame.response));
        const auto nb = noise_baseline(frame.response, noise, 50,
                                       1000 + static_cast<std::uint64_t>(trial), 2);
        if (!c1_confirmable(drop, nb, 3.0).pass) ++rejected;
    }
    CHECK(rejected >= 198);
}

TEST_CASE("c2_unreplaceable: xor pair passes, dominated split fails") {
    const auto ds = example(SimExample::Xor, 0, 5, 10000);
    ProtocolConfig cfg;
    const auto frame = code_frame(ds, "Y", {}, cfg);
    const auto covs = frame.covariate_ptrs();
    const auto v = c2_unreplaceable(frame.response, covs, {0, 1}, {});
    CHECK(v.splits_ok);
    CHECK(v.cond_a_ok);
    CHECK(v.cond_b_ok);
    CHECK(v.unreplaceable);
    CHECK(v.drop_B == doctest::Approx(std::log(2)).epsilon(1e-3));

    // a redundant pair: {X1, X3-noise} has no synergy over X1 alone
    const auto ds1 = example(SimExample::One, 1.0, 2, 30000);
    const auto f1 = code_frame(ds1, "Y", {"X7", "X8"}, cfg);
    const auto w = c2_unreplaceable(f1.response, f1.covariate_ptrs(), {0, 1}, {});
    CHECK_FALSE(w.cond_a_ok); // drop({X7,X8}) is nowhere near 3x drop(X7)
}

TEST_CASE("c2 condition (b): joining an identified factor must be superadditive") {
    const auto ds = example(SimExample::One, 0.45, 1, 60000);
    ProtocolConfig cfg;
    const auto frame = code_frame(ds, "Y", {}, cfg);
    const auto covs = frame.covariate_ptrs();
    // B = {X3} against identified {X7}: heavy overlap, fails (b)
    const auto v = c2_unreplaceable(frame.response, covs, {2}, {{6}});
    CHECK_FALSE(v.cond_b_ok);
    CHECK_FALSE(v.unreplaceable);
}

TEST_CASE("run_protocol on a response independent of all covariates returns nothing") {
    SimSpec spec;
    spec.example = SimExample::Custom;
    spec.n = 30000;
    spec.seed = 3;
    spec.custom_covariates = 5;
    spec.coefficients = {};     // Y = eps only
    spec.rho = 0.5;
    const auto ds = generate(spec);
    ProtocolConfig cfg;
    cfg.seed = 3;
    const auto rep = run_protocol(ds, "Y", {}, cfg);
    CHECK(rep.factors.empty());
    CHECK(rep.document["major_factors"].empty());
}

TEST_CASE("run_protocol recovers the xor pair as one order-2 factor") {
    const auto ds = example(SimExample::Xor, 0, 7, 10000);
    ProtocolConfig cfg;
    cfg.seed = 7;
    const auto rep = run_protocol(ds, "Y", {}, cfg);
    REQUIRE(rep.factors.size() == 1);
    CHECK(rep.factors[0].order == 2);
    CHECK(std::set<std::string>(rep.factors[0].features.begin(), rep.factors[0].features.end()) ==
          std::set<std::string>{"X1", "X2"});
    // X3 recorded as non-factor
    bool x3_factor = false;
    for (const auto& f : rep.factors)
        for (const auto& nm : f.features)
            if (nm == "X3") x3_factor = true;
    CHECK_FALSE(x3_factor);
}

TEST_CASE("report document carries config, trail, and factor records") {
    const auto ds = example(SimExample::Xor, 0, 7, 2000);
    ProtocolConfig cfg;
    cfg.seed = 7;
    const auto rep = run_protocol(ds, "Y", {}, cfg);
    CHECK(rep.document.contains("config"));
    CHECK(rep.document.contains("trail"));
    CHECK(rep.document.contains("major_factors"));
    CHECK(rep.document.contains("rejected"));
    CHECK(rep.document["config"]["seed"] == "7");
    CHECK(rep.attachments.count("ce_1.csv") == 1);
    CHECK(rep.attachments.count("mce.csv") == 1);
    // every selected factor has a recorded [C1] pass in the trail
    bool found_pass = false;
    for (const auto& step : rep.document["trail"])
        if (step["step"] == "mfs2_global_c1")
            for (const auto& t : step["tests"])
                if (t["pass"].get<bool>()) found_pass = true;
    CHECK(found_pass);
    // revocation soundness: nothing rejected as revoked appears in a factor
    std::set<std::string> factor_features;
    for (const auto& f : rep.factors) factor_features.insert(f.features.begin(), f.features.end());
    for (const auto& r : rep.document["rejected"]) {
        const std::string reason = r["reason"].get<std::string>();
        if (reason.find("revoked") == std::string::npos) continue;
        for (const auto& nm : r["features"]) CHECK(factor_features.count(nm.get<std::string>()) == 0);
    }
}

TEST_CASE("determinism: same inputs give byte-identical documents across thread counts") {
    const auto ds = example(SimExample::Xor, 0, 9, 4000);
    ProtocolConfig cfg;
    cfg.seed = 9;
    cfg.threads = 1;
    const auto r1 = run_protocol(ds, "Y", {}, cfg);
    cfg.threads = 4;
    const auto r2 = run_protocol(ds, "Y", {}, cfg);
    CHECK(r1.document.dump() == r2.document.dump());
    CHECK(r1.attachments == r2.attachments);
}
