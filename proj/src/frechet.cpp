#include "somgen/frechet.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace somgen {

GaussianSummary summarize_features(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) {
        throw std::invalid_argument("need at least two feature rows for a covariance");
    }
    const std::size_t d = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != d) throw std::invalid_argument("ragged feature rows");
    }
    const std::size_t n = rows.size();

    GaussianSummary s;
    s.mean.assign(d, 0.0);
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    }
    for (double& m : s.mean) m /= static_cast<double>(n);

    s.covariance.assign(d * d, 0.0);
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < d; ++i) {
            const double di = r[i] - s.mean[i];
            for (std::size_t j = i; j < d; ++j) {
                s.covariance[i * d + j] += di * (r[j] - s.mean[j]);
            }
        }
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            s.covariance[i * d + j] /= denom;
            s.covariance[j * d + i] = s.covariance[i * d + j];
        }
    }
    return s;
}

double frechet_distance(const GaussianSummary& a, const GaussianSummary& b) {
    if (a.dim() != b.dim() || a.dim() == 0) {
        throw std::invalid_argument("summaries must share a positive dimension");
    }
    const int d = a.dim();
    using Mat = Eigen::MatrixXd;

    Mat Ca(d, d), Cb(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Ca(i, j) = a.covariance[static_cast<std::size_t>(i) * d + j];
            Cb(i, j) = b.covariance[static_cast<std::size_t>(i) * d + j];
        }
    }

    double mean_term = 0.0;
    for (int i = 0; i < d; ++i) {
        const double diff = a.mean[static_cast<std::size_t>(i)] -
                            b.mean[static_cast<std::size_t>(i)];
        mean_term += diff * diff;
    }

    // sqrt(Ca) via symmetric eigendecomposition, then Tr((Ca Cb)^{1/2}) as the
    // trace square root of the symmetric product sqrt(Ca) Cb sqrt(Ca).
    Eigen::SelfAdjointEigenSolver<Mat> es_a(Ca);
    if (es_a.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition of covariance failed");
    }
    Eigen::VectorXd eva = es_a.eigenvalues();
    for (int i = 0; i < d; ++i) eva(i) = eva(i) > 0.0 ? std::sqrt(eva(i)) : 0.0;
    const Mat sqrt_a = es_a.eigenvectors() * eva.asDiagonal() *
                       es_a.eigenvectors().transpose();

    const Mat inner = sqrt_a * Cb * sqrt_a;
    Eigen::SelfAdjointEigenSolver<Mat> es_i(inner);
    if (es_i.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition of product failed");
    }
    double trace_sqrt = 0.0;
    for (int i = 0; i < d; ++i) {
        const double ev = es_i.eigenvalues()(i);
        // Small negatives are numerical noise from the symmetrized product.
        if (ev > 1e-10) trace_sqrt += std::sqrt(ev);
    }

    return mean_term + Ca.trace() + Cb.trace() - 2.0 * trace_sqrt;
}

std::vector<std::vector<double>> load_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature csv: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            row.push_back(std::stod(cell));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void save_feature_csv(const std::string& path,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write feature csv: " + path);
    out.precision(17);
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << row[j];
        }
        out << '\n';
    }
}

} // namespace somgen
