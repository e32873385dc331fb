#ifndef RECODYN_SIMGEN_HPP
#define RECODYN_SIMGEN_HPP

#include <cstdint>
#include <vector>

#include "recodyn/dataset.hpp"

namespace recodyn {

enum class SimExample { One, Two, Xor, Custom };

// Correlated-Gaussian response-covariate generators. Examples One and Two
// share identical covariate columns under the same seed; only Y changes.
struct SimSpec {
    SimExample example = SimExample::One;
    std::size_t n = 100000;
    std::uint64_t seed = 1;
    double rho = 0.7;         // equicorrelation of X1..X6
    double sigma_eps = 1.0;   // sd of the additive noise in Y
    std::vector<double> coefficients; // Custom: Y = sum coef_i * X_i + eps over K covariates
    std::size_t custom_covariates = 0;

    void validate() const;
};

Dataset generate(const SimSpec& spec);

} // namespace recodyn

#endif
