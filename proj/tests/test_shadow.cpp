#include <doctest.h>

#include <cmath>
#include <vector>

#include "recodyn/analysis.hpp"
#include "recodyn/config.hpp"
#include "recodyn/infotheory.hpp"
#include "recodyn/mfs.hpp"
#include "recodyn/shadow.hpp"
#include "recodyn/simgen.hpp"
#include "recodyn/tables.hpp"

using namespace recodyn;

namespace {

struct Ex1Frame {
    Dataset ds;
    CodedFrame frame;
};

Ex1Frame example1(std::size_t n = 100000, double sigma = 0.45) {
    SimSpec spec;
    spec.n = n;
    spec.seed = 1;
    spec.sigma_eps = sigma;
    Dataset ds = generate(spec);
    ProtocolConfig cfg;
    CodedFrame frame = code_frame(ds, "Y", {}, cfg);
    return {std::move(ds), std::move(frame)};
}

double tv_distance(const CodedColumn& a, const CodedColumn& b) {
    std::vector<double> pa(static_cast<std::size_t>(a.n_cats), 0.0);
    std::vector<double> pb(static_cast<std::size_t>(a.n_cats), 0.0);
    for (Code c : a.codes) pa[static_cast<std::size_t>(c)] += 1.0;
    for (Code c : b.codes) pb[static_cast<std::size_t>(c)] += 1.0;
    double tv = 0;
    for (std::size_t i = 0; i < pa.size(); ++i)
        tv += std::abs(pa[i] - pb[i]) / static_cast<double>(a.size());
    return tv / 2;
}

} // namespace

TEST_CASE("shadow of B by itself is B exactly (point-mass rows)") {
    CodedColumn a;
    a.name = "a";
    a.n_cats = 4;
    a.labels = {"0", "1", "2", "3"};
    for (int i = 0; i < 4000; ++i) a.codes.push_back(static_cast<Code>(i % 4));
    const auto s = shadow(a, a, 7);
    CHECK(s.codes == a.codes);
}

TEST_CASE("shadow under constant A is an iid resample of B's marginal") {
    CodedColumn a, b;
    a.name = "a";
    a.n_cats = 1;
    a.labels = {"0"};
    a.codes.assign(50000, 0);
    b.name = "b";
    b.n_cats = 3;
    b.labels = {"0", "1", "2"};
    b.codes.resize(50000);
    for (std::size_t i = 0; i < b.codes.size(); ++i)
        b.codes[i] = static_cast<Code>(i % 10 == 0 ? 2 : (i % 3 == 0 ? 1 : 0));
    const auto s = shadow(a, b, 11);
    CHECK(tv_distance(b, s) < 0.02);
    CHECK(s.codes != b.codes); // actually resampled
}

TEST_CASE("shadow is deterministic in the seed and seed-sensitive") {
    const auto ex = example1(20000);
    const auto& x7 = ex.frame.covariate("X7");
    const auto s1 = shadow(x7, ex.frame.response, 5);
    const auto s2 = shadow(x7, ex.frame.response, 5);
    const auto s3 = shadow(x7, ex.frame.response, 6);
    CHECK(s1.codes == s2.codes);
    CHECK(s1.codes != s3.codes);
}

TEST_CASE("marginal preservation and association preservation at N=1e5") {
    const auto ex = example1();
    const auto& x7 = ex.frame.covariate("X7");
    const auto& y = ex.frame.response;
    const auto ystar = shadow(x7, y, 1);

    CHECK(tv_distance(y, ystar) <= 0.02);

    const auto p0 = row_proportions(build_table(x7, y));
    const auto p1 = row_proportions(build_table(x7, ystar));
    double max_dev = 0;
    for (std::size_t i = 0; i < p0.size(); ++i) max_dev = std::max(max_dev, std::abs(p0[i] - p1[i]));
    CHECK(max_dev <= 0.03);
}

TEST_CASE("shadowing keeps CE[Y*|A] close to CE[Y|A] and cannot add information") {
    const auto ex = example1();
    const auto& x7 = ex.frame.covariate("X7");
    const auto& y = ex.frame.response;
    const auto ystar = shadow(x7, y, 1);

    const double ce_y = cond_entropy(build_table(x7, y));
    const double ce_star = cond_entropy(build_table(x7, ystar));
    CHECK(std::abs(ce_star - ce_y) <= 0.05);

    // information reduction: the shadowed column is a function of (X7 bin,
    // fresh noise), so it can never know more about any W than the X7 bin does
    for (const char* nm : {"X1", "X3", "X4", "X8"}) {
        const auto& w = ex.frame.covariate(nm);
        const double ce_w_given_a = cond_entropy(build_table(x7, w));
        const double ce_w_given_star = cond_entropy(build_table(ystar, w));
        CHECK(ce_w_given_star >= ce_w_given_a - 0.02);
    }
    // for a feature with no suppressor structure the original column also
    // bounds it: the shadow of Y holds nothing extra about pure noise
    const auto& x8 = ex.frame.covariate("X8");
    CHECK(cond_entropy(build_table(ystar, x8)) >=
          cond_entropy(build_table(y, x8)) - 0.02);
}

TEST_CASE("shadow analysis mirrors the conditioning feature's structure") {
    SimSpec spec;
    spec.n = 100000;
    spec.seed = 1;
    spec.sigma_eps = 0.45;
    const Dataset ds = generate(spec);
    ProtocolConfig cfg;
    cfg.seed = 1;
    const auto tables = shadow_analysis(ds, {"X7"}, "Y", {}, 2, cfg);
    REQUIRE(tables.size() == 2);

    // k=1: X7 ranks first under its own shadow; noise features stay at the bottom
    const auto& k1 = tables[0];
    CHECK(k1.entries.front().names == std::vector<std::string>{"X7"});
    std::vector<std::string> tail;
    for (std::size_t i = k1.entries.size() - 3; i < k1.entries.size(); ++i)
        tail.push_back(k1.entries[i].names[0]);
    for (const auto& nm : tail)
        CHECK((nm == "X8" || nm == "X9" || nm == "X10"));

    // pair {X4,X7} under the shadowed response loses its advantage over X7 alone
    const auto frame = code_frame(ds, "Y", {}, cfg);
    const auto fused = fuse({&frame.covariate("X4"), &frame.covariate("X7")});
    const auto ystar = shadow(frame.covariate("X7"), frame.response, cfg.seed);
    const double ce47_star = cond_entropy(build_table(fused, ystar));
    const double ce7_star = cond_entropy(build_table(frame.covariate("X7"), ystar));
    const double ce47_y = cond_entropy(build_table(fused, frame.response));
    CHECK(ce47_star > ce47_y + 0.15);   // the pair's edge comes from beyond X7
    CHECK(std::abs(ce47_star - ce7_star) < 0.02);
}

TEST_CASE("shadowing by pure noise leaves covariates at their noise baselines") {
    SimSpec spec;
    spec.n = 50000;
    spec.seed = 2;
    const Dataset ds = generate(spec);
    ProtocolConfig cfg;
    cfg.seed = 2;
    const auto frame = code_frame(ds, "Y", {}, cfg);
    const auto ystar = shadow(frame.covariate("X10"), frame.response, 3);
    // against every covariate, the shadowed response behaves like dimension-matched noise
    for (const char* nm : {"X1", "X7", "X3"}) {
        const auto& b = frame.covariate(nm);
        const auto t = build_table(b, ystar);
        const double drop = ce_drop(t);
        const auto nb = noise_baseline(ystar, b, 50, 123, 1);
        CHECK(drop < nb.mean + 4 * nb.sd + 1e-9);
    }
}
