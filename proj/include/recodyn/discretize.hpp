#ifndef RECODYN_DISCRETIZE_HPP
#define RECODYN_DISCRETIZE_HPP

#include <span>
#include <string>
#include <vector>

#include "recodyn/coded.hpp"

namespace recodyn {

enum class BinScheme { EqualFrequency, EqualWidth };

// Histogram-bin a continuous column into n_bins categories.
// Equal-frequency: bin populations differ by at most 1 except under ties;
// values equal to a bin edge go to the lower bin. Unoccupied bins are
// compacted away and codes renumbered densely.
CodedColumn bin_feature(const std::string& name, std::span<const double> values,
                        int n_bins, BinScheme scheme);

// Fuse several coded columns into one categorical variable with one
// category per occupied tuple of member codes. Fusing a single column is
// the identity (codes preserved). The induced row partition is invariant
// under permutation of the member list; only labels depend on order.
CodedColumn fuse(const std::vector<const CodedColumn*>& columns);

// CSV rows: feature,bin,lower_edge,upper_edge,count
std::string bin_edges_csv(const CodedColumn& binned);

} // namespace recodyn

#endif
