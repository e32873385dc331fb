#ifndef RECODYN_INFOTHEORY_HPP
#define RECODYN_INFOTHEORY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "recodyn/coded.hpp"
#include "recodyn/tables.hpp"

namespace recodyn {

// Plug-in Shannon entropy of a count vector, in nats. 0*ln 0 = 0.
double entropy(std::span<const std::int64_t> counts);

// H[col | row] = sum_r (n_r/N) H(row r), conditioning on rows.
double cond_entropy(const ContingencyTable& t);

// Mutual information as CE-drop: H[col] - H[col|row].
double ce_drop(const ContingencyTable& t);

// Joint statistics computed straight from code vectors (rows = conditioning).
struct JointStats {
    double ce = 0.0;       // H[col | row]
    double h_col = 0.0;    // marginal H of the column variable
    double h_row = 0.0;
    std::int64_t occupied = 0;    // nonzero cells of the joint table
    std::int64_t table_rows = 0;  // occupied row categories
};
JointStats joint_stats(std::span<const Code> row_codes, Code n_row,
                       std::span<const Code> col_codes, Code n_col,
                       std::vector<std::int64_t>* scratch = nullptr);

// Two-feature decomposition of the joint CE-drop.
struct InfoDecomposition {
    double ce_drop_joint = 0.0;  // I[Y;(A,B)]
    double ce_drop_A = 0.0;      // I[Y;A]
    double ce_drop_B = 0.0;      // I[Y;B]
    double mi_AB = 0.0;          // I[A;B]
    double cmi_AB_given_Y = 0.0; // I[A;B|Y]
    double interaction = 0.0;    // cmi_AB_given_Y - mi_AB
};
InfoDecomposition decompose_pair(const CodedColumn& y, const CodedColumn& a, const CodedColumn& b);

// Symmetrized normalized conditional entropy:
//   MCE(X,Y) = (H[X|Y]/H[X] + H[Y|X]/H[Y]) / 2, 0 if either marginal entropy is 0.
double mce(const CodedColumn& x, const CodedColumn& y);

struct MCEMatrix {
    std::vector<std::string> names;
    std::vector<double> values;      // n x n, row-major, symmetric, zero diagonal
    std::vector<int> leaf_order;     // permutation of [0,n) from average-linkage clustering

    double at(std::size_t i, std::size_t j) const { return values[i * names.size() + j]; }
};

MCEMatrix mce_matrix(const std::vector<const CodedColumn*>& features, int threads = 1);

// Average-linkage agglomerative clustering on a symmetric distance matrix;
// returns the dendrogram leaf order. Ties broken by smallest member index.
std::vector<int> average_linkage_leaf_order(const std::vector<double>& dist, std::size_t n);

std::string mce_csv(const MCEMatrix& m);

} // namespace recodyn

#endif
