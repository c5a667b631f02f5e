#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace loopdet {

using MatrixXfRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixXdRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raw descriptor matrix with a per-row image index (non-decreasing).
struct DescriptorSet {
    MatrixXfRM data;                       // n_features x dim
    std::vector<std::uint32_t> image_of;   // image index per row
    std::size_t n_images = 0;

    std::size_t n_features() const { return static_cast<std::size_t>(data.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(data.cols()); }

    /// Half-open row range [first, last) of one image.
    std::pair<std::size_t, std::size_t> image_range(std::size_t image) const;

    /// Throws std::invalid_argument if any invariant is broken.
    void validate() const;
};

enum class DescriptorFormat { binary, csv };

DescriptorSet load_descriptors(const std::string& path, DescriptorFormat format);
void save_descriptors(const DescriptorSet& set, const std::string& path, DescriptorFormat format);

struct GroundTruthMatrix {
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> entries;  // n_test x n_ref

    std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
};

GroundTruthMatrix load_ground_truth(const std::string& path);
void save_ground_truth(const GroundTruthMatrix& gt, const std::string& path);

/// Configuration for a synthetic descriptor sequence with planted loop closures.
struct SynthConfig {
    std::size_t n_images = 0;
    std::size_t features_per_image = 0;
    std::size_t dim = 0;
    std::size_t n_places = 0;  // 0 = derived (one place per non-revisit image)
    std::vector<std::pair<std::size_t, std::size_t>> loop_spec;  // (revisit, original)
    double noise_sigma = 0.0;
    std::uint64_t rng_seed = 0;
};

/// Deterministic synthetic sequence: each image samples its place's latent
/// prototypes plus Gaussian noise; revisit images reuse the prototypes of
/// their original. Ground truth is the diagonal plus the planted pairs.
std::pair<DescriptorSet, GroundTruthMatrix> synth_sequence(const SynthConfig& cfg);

}  // namespace loopdet
