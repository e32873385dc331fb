#ifndef RECODYN_CODED_HPP
#define RECODYN_CODED_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace recodyn {

using Code = std::int32_t;

enum class Provenance { Raw, Binned, Fused };

// A length-N sequence of dense category codes in [0, n_cats).
// Every code in [0, n_cats) occurs at least once (empty categories are
// compacted away on construction).
struct CodedColumn {
    std::string name;
    std::vector<Code> codes;
    Code n_cats = 0;
    std::vector<std::string> labels;        // one per category
    Provenance provenance = Provenance::Raw;
    std::vector<double> bin_edges;          // Binned only: n_cats+1 edges
    std::vector<std::string> members;       // Fused only: member column names

    std::size_t size() const { return codes.size(); }
};

} // namespace recodyn

#endif
