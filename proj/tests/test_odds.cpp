#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "recodyn/dataset.hpp"
#include "recodyn/errors.hpp"
#include "recodyn/odds.hpp"
#include "recodyn/rng.hpp"
#include "recodyn/simgen.hpp"

using namespace recodyn;

namespace {

// Synthetic survey shaped like the heart table: two binary risk features and
// a binary response whose odds rise with both, plus one noise feature.
Dataset survey(std::size_t n = 80000, std::uint64_t seed = 13) {
    Feature y, bp, chol, sex, age;
    y.name = "HD";
    bp.name = "HiBP";
    chol.name = "HiChol";
    sex.name = "Sex";
    age.name = "Age";
    for (Feature* f : {&y, &bp, &chol, &sex}) {
        f->kind = FeatureKind::Categorical;
        f->cat_labels = {"0", "1"};
        f->codes.resize(n);
    }
    age.kind = FeatureKind::Categorical;
    age.cat_labels = {"1", "2", "3", "4"};
    age.codes.resize(n);
    y.is_response = true;
    for (std::size_t i = 0; i < n; ++i) {
        const Code b = rng::u01(seed, 0, i) < 0.43 ? 1 : 0;
        const Code c = rng::u01(seed, 1, i) < 0.42 ? 1 : 0;
        const Code s = rng::u01(seed, 2, i) < 0.5 ? 1 : 0;
        const Code a = static_cast<Code>(rng::mix(seed, 3, i) % 4);
        const double p = 0.02 + 0.05 * b + 0.04 * c + 0.03 * a;
        y.codes[i] = rng::u01(seed, 4, i) < p ? 1 : 0;
        bp.codes[i] = b;
        chol.codes[i] = c;
        sex.codes[i] = s;
        age.codes[i] = a;
    }
    return Dataset::from_columns({y, bp, chol, sex, age});
}

} // namespace

TEST_CASE("locality odds with no expansion reproduces the 2x2x2 cell structure") {
    const auto ds = survey();
    ProtocolConfig cfg;
    const auto t = locality_odds(ds, "HD", {"HiBP", "HiChol"}, {}, cfg);
    REQUIRE(t.rows.size() == 4);
    std::int64_t total = 0;
    for (const auto& r : t.rows) {
        total += r.n;
        CHECK(r.odds.p0 + r.odds.p1 == doctest::Approx(1.0).epsilon(1e-12));
        if (!r.odds.infinite)
            CHECK(r.odds.odds ==
                  doctest::Approx(r.odds.p1 / r.odds.p0).epsilon(1e-12));
    }
    CHECK(total == 80000);
    // odds rise along the (0,0) -> (1,1) risk gradient
    CHECK(t.rows.front().odds.odds < t.rows.back().odds.odds);
}

TEST_CASE("expansion axis produces one row per occupied locality x expansion cell") {
    const auto ds = survey(40000);
    ProtocolConfig cfg;
    const auto t = locality_odds(ds, "HD", {"Age"}, {"HiChol"}, cfg);
    CHECK(t.rows.size() == 8);
    for (const auto& r : t.rows) CHECK_FALSE(r.expansion.empty());
}

TEST_CASE("a locality with no positive cases reports odds zero") {
    Feature y, x;
    y.name = "Y";
    y.kind = FeatureKind::Categorical;
    y.cat_labels = {"0", "1"};
    y.codes.assign(100, 0);
    y.codes[0] = 1; // the only positive case sits in locality X=0
    x.name = "X";
    x.kind = FeatureKind::Categorical;
    x.cat_labels = {"0", "1"};
    x.codes.assign(100, 0);
    for (std::size_t i = 50; i < 100; ++i) x.codes[i] = 1;
    const auto ds = Dataset::from_columns({y, x});
    ProtocolConfig cfg;
    const auto t = locality_odds(ds, "Y", {"X"}, {}, cfg);
    CHECK(t.rows[1].odds.odds == doctest::Approx(0.0));
    CHECK(t.rows[0].odds.odds > 0.0);
}

TEST_CASE("best triplet is found exhaustively; small localities report NA") {
    const auto ds = survey(60000, 29);
    ProtocolConfig cfg;
    const auto rows =
        best_triplet_per_locality(ds, "HD", {"Age"}, {"HiBP", "HiChol", "Sex"}, 500, cfg);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        REQUIRE(r.triplet.has_value()); // all age cells are large here
        CHECK(r.triplet->size() == 3);
        CHECK(r.ce_drop >= 0.0);
    }
    // with only one candidate triple, it is the answer
    const auto one = best_triplet_per_locality(ds, "HD", {"Age"}, {"HiBP", "HiChol", "Sex"},
                                               1000000, cfg);
    for (const auto& r : one) CHECK_FALSE(r.triplet.has_value()); // all NA under huge min_n
    CHECK_THROWS_AS(static_cast<void>(best_triplet_per_locality(ds, "HD", {"Age"}, {"HiBP"}, 10, cfg)),
                    ConfigError);
}

TEST_CASE("majority rule never loses to the blind rule and flips on odds > 1") {
    const auto ds = survey(70000, 31);
    ProtocolConfig cfg;
    const auto m = majority_rule_eval(ds, "HD", {"Age", "HiBP"}, cfg);
    CHECK(m.majority_accuracy >= m.blind_accuracy - 1e-12);
    for (const auto& r : m.rules) {
        if (!r.infinite_odds && r.odds > 1.0) CHECK(r.majority_class == 1);
        if (!r.infinite_odds && r.odds < 1.0) CHECK(r.majority_class == 0);
    }
}

TEST_CASE("blind rule accuracy on the BRFSS heart counts") {
    // localities = the four (HiBP,HiChol) rows; majority is non-diseased in each,
    // so majority accuracy equals blind accuracy exactly
    Feature y, loc;
    y.name = "HD";
    y.kind = FeatureKind::Categorical;
    y.cat_labels = {"0", "1"};
    loc.name = "cell";
    loc.kind = FeatureKind::Categorical;
    loc.cat_labels = {"00", "01", "10", "11"};
    const std::int64_t counts[4][2] = {
        {99044, 2876}, {39842, 3089}, {39905, 4264}, {50996, 13664}};
    for (int c = 0; c < 4; ++c)
        for (int v = 0; v < 2; ++v)
            for (std::int64_t i = 0; i < counts[c][v]; ++i) {
                y.codes.push_back(static_cast<Code>(v));
                loc.codes.push_back(static_cast<Code>(c));
            }
    const auto ds = Dataset::from_columns({y, loc});
    ProtocolConfig cfg;
    const auto m = majority_rule_eval(ds, "HD", {"cell"}, cfg);
    CHECK(m.blind_accuracy == doctest::Approx(0.9058144118574583).epsilon(1e-12));
    CHECK(m.majority_accuracy == doctest::Approx(m.blind_accuracy).epsilon(1e-12));
}

TEST_CASE("odds analyses reject non-binary responses") {
    SimSpec spec;
    spec.n = 1000;
    spec.seed = 1;
    const auto ds = generate(spec);
    ProtocolConfig cfg;
    CHECK_THROWS_AS(static_cast<void>(locality_odds(ds, "Y", {"X1"}, {}, cfg)), DataError);
}
