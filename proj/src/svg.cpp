#include "recodyn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace recodyn {

namespace {
int gray(double v01) {
    const double c = std::clamp(v01, 0.0, 1.0);
    return static_cast<int>(std::lround(255.0 * c));
}
} // namespace

std::string mce_heatmap_svg(const MCEMatrix& m) {
    const std::size_t n = m.names.size();
    const int cell = 18, margin = 110;
    const int size = margin + cell * static_cast<int>(n) + 10;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\">\n";
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t i = static_cast<std::size_t>(m.leaf_order[a]);
        for (std::size_t b = 0; b < n; ++b) {
            const std::size_t j = static_cast<std::size_t>(m.leaf_order[b]);
            const int g = gray(m.at(i, j));
            os << "<rect x=\"" << margin + cell * static_cast<int>(b) << "\" y=\""
               << margin + cell * static_cast<int>(a) << "\" width=\"" << cell << "\" height=\""
               << cell << "\" fill=\"rgb(" << g << "," << g << "," << g << ")\"/>\n";
        }
        os << "<text x=\"" << margin - 4 << "\" y=\"" << margin + cell * static_cast<int>(a) + 13
           << "\" font-size=\"10\" text-anchor=\"end\">" << m.names[i] << "</text>\n";
        os << "<text x=\"" << margin + cell * static_cast<int>(a) + 9 << "\" y=\"" << margin - 4
           << "\" font-size=\"10\" text-anchor=\"start\" transform=\"rotate(-60 "
           << margin + cell * static_cast<int>(a) + 9 << " " << margin - 4 << ")\">" << m.names[i]
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string odds_dotplot_svg(const LocalityOddsTable& t) {
    // x = locality index, y = odds (log-ish scale capped), one dot per row
    std::map<std::string, int> loc_x;
    for (const auto& r : t.rows)
        if (!loc_x.count(r.locality)) {
            const int next = static_cast<int>(loc_x.size());
            loc_x[r.locality] = next;
        }
    const int w = 60 + 26 * static_cast<int>(loc_x.size()) + 20, h = 320;
    double max_odds = 0.0;
    for (const auto& r : t.rows)
        if (!r.odds.infinite) max_odds = std::max(max_odds, r.odds.odds);
    if (max_odds <= 0) max_odds = 1.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    const int y0 = h - 40, y1 = 20;
    if (max_odds >= 1.0) {
        // reference line at odds = 1
        const int yref = y0 - static_cast<int>((y0 - y1) * (1.0 / max_odds));
        os << "<line x1=\"40\" y1=\"" << yref << "\" x2=\"" << w - 10 << "\" y2=\"" << yref
           << "\" stroke=\"#cc3333\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (const auto& r : t.rows) {
        const double v = r.odds.infinite ? max_odds : r.odds.odds;
        const int x = 50 + 26 * loc_x[r.locality];
        const int y = y0 - static_cast<int>((static_cast<double>(y0 - y1)) * (v / max_odds));
        os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3\" fill=\""
           << (r.odds.infinite ? "#cc3333" : "#336699") << "\"/>\n";
    }
    for (const auto& [label, xi] : loc_x)
        os << "<text x=\"" << 50 + 26 * xi << "\" y=\"" << h - 24
           << "\" font-size=\"9\" text-anchor=\"middle\">" << xi << "</text>\n";
    os << "<text x=\"8\" y=\"" << (y0 + y1) / 2 << "\" font-size=\"10\">odds</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace recodyn
