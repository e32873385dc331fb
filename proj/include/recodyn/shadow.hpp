#ifndef RECODYN_SHADOW_HPP
#define RECODYN_SHADOW_HPP

#include <cstdint>

#include "recodyn/coded.hpp"

namespace recodyn {

// B shadowed by A: each row's B-code is redrawn from the conditional
// proportions of B given that row's A-category (multinomial, plug-in
// proportions from the observed C[A-vs-B]). Keeps the A-B association,
// destroys B's A-orthogonal part. Per-row draws are counter-based on
// (seed, row), so the output is independent of iteration order and
// worker count.
CodedColumn shadow(const CodedColumn& a, const CodedColumn& b, std::uint64_t seed);

} // namespace recodyn

#endif
