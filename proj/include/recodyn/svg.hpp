#ifndef RECODYN_SVG_HPP
#define RECODYN_SVG_HPP

#include <string>

#include "recodyn/infotheory.hpp"
#include "recodyn/odds.hpp"

namespace recodyn {

// Grayscale MCE heatmap in leaf order.
std::string mce_heatmap_svg(const MCEMatrix& m);

// Dot plot of odds per locality (expansion categories as columns).
std::string odds_dotplot_svg(const LocalityOddsTable& t);

} // namespace recodyn

#endif
