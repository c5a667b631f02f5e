#include "loopdet/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "loopdet/binio.hpp"

namespace loopdet {

namespace {
constexpr const char* kPcaMagic = "LPCA1\n";
}

PcaModel pca_fit(const Eigen::MatrixXd& X, Eigen::Index n_components) {
    const Eigen::Index n = X.rows(), dim = X.cols();
    if (n < 2) throw std::invalid_argument("pca_fit: need at least 2 rows");
    if (n_components < 1 || n_components > std::min(n, dim))
        throw std::invalid_argument("pca_fit: n_components must be in [1, min(n_rows, dim)]");

    PcaModel model;
    model.mean = X.colwise().mean();
    const Eigen::MatrixXd centered = X.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(n - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("pca_fit: eigendecomposition failed");

    // Eigen returns eigenvalues in increasing order; take the top ones.
    model.components.resize(n_components, dim);
    model.explained_variance.resize(n_components);
    const double max_eig = std::max(solver.eigenvalues().maxCoeff(), 0.0);
    const double rank_tol = 1e-12 * std::max(max_eig, 1.0);
    for (Eigen::Index c = 0; c < n_components; ++c) {
        const Eigen::Index src = dim - 1 - c;
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        // Deterministic sign: largest-magnitude entry positive.
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        model.components.row(c) = v.transpose();
        model.explained_variance(c) = std::max(solver.eigenvalues()(src), 0.0);
        if (solver.eigenvalues()(src) <= rank_tol) model.rank_deficient = true;
    }
    return model;
}

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.dim())
        throw std::invalid_argument("pca_transform: input has " + std::to_string(X.cols()) +
                                    " columns, model expects " + std::to_string(model.dim()));
    return (X.rowwise() - model.mean.transpose()) * model.components.transpose();
}

Eigen::MatrixXd pca_inverse_transform(const PcaModel& model, const Eigen::MatrixXd& Y) {
    if (Y.cols() != model.n_components())
        throw std::invalid_argument("pca_inverse_transform: input has " +
                                    std::to_string(Y.cols()) + " columns, model expects " +
                                    std::to_string(model.n_components()));
    return (Y * model.components).rowwise() + model.mean.transpose();
}

void save_pca(const PcaModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    binio::write_magic(out, kPcaMagic);
    binio::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(model.dim()));
    binio::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(model.n_components()));
    binio::write_pod<std::uint8_t>(out, model.rank_deficient ? 1 : 0);
    out.write(reinterpret_cast<const char*>(model.mean.data()),
              static_cast<std::streamsize>(model.dim() * sizeof(double)));
    for (Eigen::Index c = 0; c < model.n_components(); ++c) {
        const Eigen::VectorXd row = model.components.row(c);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(model.dim() * sizeof(double)));
    }
    out.write(reinterpret_cast<const char*>(model.explained_variance.data()),
              static_cast<std::streamsize>(model.n_components() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

PcaModel load_pca(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    binio::expect_magic(in, kPcaMagic, "LPCA1 sidecar");
    const auto dim = binio::read_pod<std::uint64_t>(in, "dim");
    const auto ncomp = binio::read_pod<std::uint64_t>(in, "component count");
    const auto flag = binio::read_pod<std::uint8_t>(in, "rank flag");

    PcaModel model;
    model.rank_deficient = flag != 0;
    model.mean.resize(static_cast<Eigen::Index>(dim));
    in.read(reinterpret_cast<char*>(model.mean.data()),
            static_cast<std::streamsize>(dim * sizeof(double)));
    model.components.resize(static_cast<Eigen::Index>(ncomp), static_cast<Eigen::Index>(dim));
    for (std::uint64_t c = 0; c < ncomp; ++c) {
        Eigen::VectorXd row(static_cast<Eigen::Index>(dim));
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(dim * sizeof(double)));
        model.components.row(static_cast<Eigen::Index>(c)) = row.transpose();
    }
    model.explained_variance.resize(static_cast<Eigen::Index>(ncomp));
    in.read(reinterpret_cast<char*>(model.explained_variance.data()),
            static_cast<std::streamsize>(ncomp * sizeof(double)));
    if (!in) throw std::runtime_error("truncated LPCA1 file: " + path);
    return model;
}

}  // namespace loopdet
