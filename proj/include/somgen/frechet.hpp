#pragma once

// Gaussian summaries of feature vectors and the Frechet distance between two
// summaries, used to compare generated ensembles against references.

#include <string>
#include <vector>

namespace somgen {

struct GaussianSummary {
    std::vector<double> mean;      // length d
    std::vector<double> covariance; // row-major d*d, unbiased (ddof = 1)
    int dim() const { return static_cast<int>(mean.size()); }
};

/// Mean and unbiased covariance of a set of feature rows (each of equal
/// length, at least two rows required).
GaussianSummary summarize_features(const std::vector<std::vector<double>>& rows);

/// ||mu_a - mu_b||^2 + Tr(Ca + Cb - 2 (Ca Cb)^{1/2}), computed through a
/// symmetric eigendecomposition so the result is real and stable.
double frechet_distance(const GaussianSummary& a, const GaussianSummary& b);

/// Feature rows from a headerless CSV of doubles (one row per line).
std::vector<std::vector<double>> load_feature_csv(const std::string& path);
void save_feature_csv(const std::string& path,
                      const std::vector<std::vector<double>>& rows);

} // namespace somgen
