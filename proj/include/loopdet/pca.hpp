#pragma once

#include <Eigen/Core>
#include <string>

namespace loopdet {

/// PCA basis fitted on a descriptor matrix: orthonormal component rows and
/// the variance captured along each of them (non-increasing).
struct PcaModel {
    Eigen::VectorXd mean;                 // dim
    Eigen::MatrixXd components;           // n_components x dim, orthonormal rows
    Eigen::VectorXd explained_variance;   // n_components, sorted non-increasing
    bool rank_deficient = false;          // some requested components carry ~zero variance

    Eigen::Index dim() const { return mean.size(); }
    Eigen::Index n_components() const { return components.rows(); }
};

/// Eigendecomposition of the sample covariance (unbiased, n-1 normalization).
/// Requires n_components <= min(n_rows, dim) and n_rows >= 2.
PcaModel pca_fit(const Eigen::MatrixXd& X, Eigen::Index n_components);

/// Projects rows of X: out_i = components * (X_i - mean).
Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& X);

/// Maps reduced rows back to the original space: out_i = components^T * Y_i + mean.
Eigen::MatrixXd pca_inverse_transform(const PcaModel& model, const Eigen::MatrixXd& Y);

void save_pca(const PcaModel& model, const std::string& path);
PcaModel load_pca(const std::string& path);

}  // namespace loopdet
