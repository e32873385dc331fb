#include "recodyn/shadow.hpp"

#include <vector>

#include "recodyn/errors.hpp"
#include "recodyn/rng.hpp"
#include "recodyn/tables.hpp"

namespace recodyn {

CodedColumn shadow(const CodedColumn& a, const CodedColumn& b, std::uint64_t seed) {
    if (a.size() != b.size()) throw DataError("shadow: length mismatch");
    const ContingencyTable t = build_table(a, b);

    // per A-category cumulative proportions over B's categories
    const std::size_t nb = static_cast<std::size_t>(b.n_cats);
    std::vector<double> cdf(static_cast<std::size_t>(a.n_cats) * nb, 0.0);
    for (Code r = 0; r < a.n_cats; ++r) {
        const double rs = static_cast<double>(t.row_sums[static_cast<std::size_t>(r)]);
        double acc = 0.0;
        for (Code c = 0; c < b.n_cats; ++c) {
            acc += static_cast<double>(t.at(r, c)) / rs;
            cdf[static_cast<std::size_t>(r) * nb + static_cast<std::size_t>(c)] = acc;
        }
        cdf[static_cast<std::size_t>(r) * nb + nb - 1] = 1.0; // guard rounding
    }

    const std::uint64_t stream =
        rng::fnv1a(a.name.data(), a.name.size(), rng::fnv1a(b.name.data(), b.name.size()));

    CodedColumn out;
    out.name = b.name + "__shadow__" + a.name;
    out.n_cats = b.n_cats;
    out.labels = b.labels;
    out.provenance = b.provenance;
    out.codes.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double u = rng::u01(seed, stream, i);
        const double* row = cdf.data() + static_cast<std::size_t>(a.codes[i]) * nb;
        Code c = 0;
        while (u > row[c] && c + 1 < b.n_cats) ++c;
        out.codes[i] = c;
    }
    return out;
}

} // namespace recodyn
