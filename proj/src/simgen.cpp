#include "recodyn/simgen.hpp"

#include <cmath>

#include "recodyn/errors.hpp"
#include "recodyn/rng.hpp"

namespace recodyn {

namespace {

// stream ids: 0 shared factor, 1..6 idiosyncratic X1..X6, 7..10 -> X8..X11, 11 eps,
// 20+j -> custom covariate streams
constexpr std::uint64_t kStreamShared = 0;
constexpr std::uint64_t kStreamEps = 11;

} // namespace

void SimSpec::validate() const {
    if (n == 0) throw ConfigError("simgen: n must be positive");
    if (rho <= -0.2 || rho >= 1.0)
        throw ConfigError("simgen: rho must be in (-0.2, 1) for a positive-definite block");
    if (sigma_eps < 0) throw ConfigError("simgen: sigma_eps must be >= 0");
    if (example == SimExample::Xor && n % 4 != 0)
        throw ConfigError("simgen: xor example needs n divisible by 4 for exact balance");
    if (example == SimExample::Custom) {
        if (custom_covariates == 0)
            throw ConfigError("simgen: custom example needs a covariate count");
        if (coefficients.size() > custom_covariates)
            throw ConfigError("simgen: more coefficients than covariates");
    }
}

Dataset generate(const SimSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n;

    if (spec.example == SimExample::Xor) {
        // exact balanced fair bits: each (X1,X2) combination occurs n/4 times
        Feature y, x1, x2, x3;
        y.name = "Y";
        x1.name = "X1";
        x2.name = "X2";
        x3.name = "X3";
        for (Feature* f : {&y, &x1, &x2, &x3}) {
            f->kind = FeatureKind::Categorical;
            f->cat_labels = {"0", "1"};
            f->codes.resize(n);
        }
        y.is_response = true;
        for (std::size_t i = 0; i < n; ++i) {
            const Code a = static_cast<Code>((i / 2) % 2);
            const Code b = static_cast<Code>(i % 2);
            x1.codes[i] = a;
            x2.codes[i] = b;
            y.codes[i] = a ^ b;
            x3.codes[i] = rng::u01(spec.seed, 20, i) < 0.5 ? 0 : 1; // independent fair bit
        }
        return Dataset::from_columns({y, x1, x2, x3});
    }

    if (spec.example == SimExample::Custom) {
        const std::size_t K = spec.custom_covariates;
        std::vector<Feature> cols(K + 1);
        cols[0].name = "Y";
        cols[0].is_response = true;
        cols[0].numeric.assign(n, 0.0);
        const double sr = std::sqrt(std::max(spec.rho, 0.0));
        const double si = std::sqrt(1.0 - std::max(spec.rho, 0.0));
        for (std::size_t j = 0; j < K; ++j) {
            cols[j + 1].name = "X" + std::to_string(j + 1);
            cols[j + 1].numeric.resize(n);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double shared = rng::normal(spec.seed, kStreamShared, i);
            double yv = rng::normal(spec.seed, kStreamEps, i) * spec.sigma_eps;
            for (std::size_t j = 0; j < K; ++j) {
                const double x = sr * shared + si * rng::normal(spec.seed, 20 + j, i);
                cols[j + 1].numeric[i] = x;
                if (j < spec.coefficients.size()) yv += spec.coefficients[j] * x;
            }
            cols[0].numeric[i] = yv;
        }
        return Dataset::from_columns(std::move(cols));
    }

    // Examples One / Two: X1..X6 equicorrelated via one-factor construction,
    // X7 = (X1+X2+X3+X4+X11)/3.66, X8..X10 independent noise, X11 hidden.
    const double sr = std::sqrt(spec.rho);
    const double si = std::sqrt(1.0 - spec.rho);

    std::vector<Feature> cols(11);
    cols[0].name = "Y";
    cols[0].is_response = true;
    for (int j = 1; j <= 10; ++j) cols[static_cast<std::size_t>(j)].name = "X" + std::to_string(j);
    for (auto& c : cols) c.numeric.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double shared = rng::normal(spec.seed, kStreamShared, i);
        double x[12];
        for (int j = 1; j <= 6; ++j)
            x[j] = sr * shared + si * rng::normal(spec.seed, static_cast<std::uint64_t>(j), i);
        for (int j = 8; j <= 11; ++j)
            x[j] = rng::normal(spec.seed, static_cast<std::uint64_t>(j - 1), i);
        x[7] = (x[1] + x[2] + x[3] + x[4] + x[11]) / 3.66;
        const double eps = rng::normal(spec.seed, kStreamEps, i) * spec.sigma_eps;
        double y = 0.8 * x[1] + x[2] + 1.2 * x[3] + eps;
        if (spec.example == SimExample::One) y += x[11];

        cols[0].numeric[i] = y;
        for (int j = 1; j <= 10; ++j) cols[static_cast<std::size_t>(j)].numeric[i] = x[j];
    }
    return Dataset::from_columns(std::move(cols));
}

} // namespace recodyn
