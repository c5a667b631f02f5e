#include "loopdet/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "loopdet/binio.hpp"

namespace loopdet {

namespace {

constexpr const char* kDescMagic = "LDSC1\n";

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) fields.push_back(cur);
    return fields;
}

// Deterministic normal sampler (Box-Muller over raw mt19937_64 draws), so
// outputs are bit-identical across standard library implementations.
class GaussianGen {
public:
    explicit GaussianGen(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform01() {
        // 53-bit mantissa draw in [0, 1)
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

std::pair<std::size_t, std::size_t> DescriptorSet::image_range(std::size_t image) const {
    const auto key = static_cast<std::uint32_t>(image);
    const auto first = std::lower_bound(image_of.begin(), image_of.end(), key);
    const auto last = std::upper_bound(image_of.begin(), image_of.end(), key);
    return {static_cast<std::size_t>(first - image_of.begin()),
            static_cast<std::size_t>(last - image_of.begin())};
}

void DescriptorSet::validate() const {
    if (data.cols() <= 0) throw std::invalid_argument("descriptor set: dim must be positive");
    if (static_cast<std::size_t>(data.rows()) != image_of.size())
        throw std::invalid_argument("descriptor set: image_of length does not match row count");
    for (std::size_t i = 0; i < image_of.size(); ++i) {
        if (image_of[i] >= n_images)
            throw std::invalid_argument("descriptor set: row " + std::to_string(i) +
                                        ": image index out of range");
        if (i > 0 && image_of[i] < image_of[i - 1])
            throw std::invalid_argument("descriptor set: row " + std::to_string(i) +
                                        ": image indices not non-decreasing");
    }
    if (!data.allFinite()) throw std::invalid_argument("descriptor set: non-finite value present");
}

namespace {

DescriptorSet load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    if (in.tellg() == std::streamoff(0)) fail("empty file: " + path);
    in.seekg(0, std::ios::beg);

    binio::expect_magic(in, kDescMagic, "LDSC1 descriptor");
    const auto n = binio::read_pod<std::uint64_t>(in, "feature count");
    const auto dim = binio::read_pod<std::uint64_t>(in, "dimension");
    const auto n_images = binio::read_pod<std::uint64_t>(in, "image count");
    if (dim == 0) fail("malformed header: dim must be positive");

    DescriptorSet set;
    set.n_images = n_images;
    set.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    in.read(reinterpret_cast<char*>(set.data.data()),
            static_cast<std::streamsize>(n * dim * sizeof(float)));
    if (!in) fail("truncated descriptor data in " + path);
    set.image_of.resize(n);
    in.read(reinterpret_cast<char*>(set.image_of.data()),
            static_cast<std::streamsize>(n * sizeof(std::uint32_t)));
    if (!in) fail("truncated image index block in " + path);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            if (!std::isfinite(set.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))))
                fail("row " + std::to_string(i) + ": non-finite value");
    set.validate();
    return set;
}

DescriptorSet load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file: " + path);

    std::string header;
    if (!std::getline(in, header)) fail("empty file: " + path);
    std::size_t dim = 0, n_images = 0;
    if (std::sscanf(header.c_str(), "dim=%zu images=%zu", &dim, &n_images) != 2 || dim == 0)
        fail("malformed header: expected \"dim=D images=M\", got \"" + header + "\"");

    std::vector<float> values;
    std::vector<std::uint32_t> image_of;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_fields(line);
        if (fields.size() != dim + 1)
            fail("row " + std::to_string(row) + ": expected " + std::to_string(dim) + " values");
        std::size_t pos = 0;
        unsigned long image = 0;
        try {
            image = std::stoul(fields[0], &pos);
        } catch (const std::exception&) {
            fail("row " + std::to_string(row) + ": bad image index \"" + fields[0] + "\"");
        }
        image_of.push_back(static_cast<std::uint32_t>(image));
        for (std::size_t j = 0; j < dim; ++j) {
            float v = 0.0f;
            try {
                v = std::stof(fields[j + 1]);
            } catch (const std::exception&) {
                fail("row " + std::to_string(row) + ": bad value \"" + fields[j + 1] + "\"");
            }
            if (!std::isfinite(v)) fail("row " + std::to_string(row) + ": non-finite value");
            values.push_back(v);
        }
        ++row;
    }

    DescriptorSet set;
    set.n_images = n_images;
    set.image_of = std::move(image_of);
    set.data.resize(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < row; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            set.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                values[i * dim + j];
    set.validate();
    return set;
}

}  // namespace

DescriptorSet load_descriptors(const std::string& path, DescriptorFormat format) {
    return format == DescriptorFormat::binary ? load_binary(path) : load_csv(path);
}

void save_descriptors(const DescriptorSet& set, const std::string& path, DescriptorFormat format) {
    set.validate();
    if (format == DescriptorFormat::binary) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) fail("cannot open file for writing: " + path);
        binio::write_magic(out, kDescMagic);
        binio::write_pod<std::uint64_t>(out, set.n_features());
        binio::write_pod<std::uint64_t>(out, set.dim());
        binio::write_pod<std::uint64_t>(out, set.n_images);
        out.write(reinterpret_cast<const char*>(set.data.data()),
                  static_cast<std::streamsize>(set.n_features() * set.dim() * sizeof(float)));
        out.write(reinterpret_cast<const char*>(set.image_of.data()),
                  static_cast<std::streamsize>(set.n_features() * sizeof(std::uint32_t)));
        if (!out) fail("write failed: " + path);
    } else {
        std::ofstream out(path, std::ios::trunc);
        if (!out) fail("cannot open file for writing: " + path);
        out << "dim=" << set.dim() << " images=" << set.n_images << "\n";
        char buf[64];
        for (std::size_t i = 0; i < set.n_features(); ++i) {
            out << set.image_of[i];
            for (std::size_t j = 0; j < set.dim(); ++j) {
                std::snprintf(buf, sizeof(buf), "%.9g",
                              static_cast<double>(set.data(static_cast<Eigen::Index>(i),
                                                           static_cast<Eigen::Index>(j))));
                out << ',' << buf;
            }
            out << "\n";
        }
        if (!out) fail("write failed: " + path);
    }
}

GroundTruthMatrix load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open file: " + path);
    std::vector<std::vector<std::uint8_t>> rows;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        std::vector<std::uint8_t> entries;
        std::string tok;
        while (ls >> tok) {
            if (tok == "0")
                entries.push_back(0);
            else if (tok == "1")
                entries.push_back(1);
            else
                fail("ground truth: row " + std::to_string(row) + ", col " +
                     std::to_string(entries.size()) + ": non-binary entry \"" + tok + "\"");
        }
        if (!rows.empty() && entries.size() != rows.front().size())
            fail("ground truth: row " + std::to_string(row) + ": ragged row (expected " +
                 std::to_string(rows.front().size()) + " entries, got " +
                 std::to_string(entries.size()) + ")");
        rows.push_back(std::move(entries));
        ++row;
    }
    if (rows.empty()) fail("empty file: " + path);

    GroundTruthMatrix gt;
    gt.entries.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            gt.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return gt;
}

void save_ground_truth(const GroundTruthMatrix& gt, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) fail("cannot open file for writing: " + path);
    for (Eigen::Index i = 0; i < gt.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < gt.entries.cols(); ++j) {
            if (j) out << ' ';
            out << static_cast<int>(gt.entries(i, j));
        }
        out << "\n";
    }
    if (!out) fail("write failed: " + path);
}

std::pair<DescriptorSet, GroundTruthMatrix> synth_sequence(const SynthConfig& cfg) {
    if (cfg.n_images == 0) throw std::invalid_argument("synth: n_images must be positive");
    if (cfg.features_per_image == 0)
        throw std::invalid_argument("synth: features_per_image must be positive");
    if (cfg.dim == 0) throw std::invalid_argument("synth: dim must be positive");
    if (cfg.noise_sigma < 0.0) throw std::invalid_argument("synth: noise_sigma must be >= 0");

    constexpr std::size_t kUnassigned = SIZE_MAX;
    constexpr std::size_t kRevisit = SIZE_MAX - 1;
    std::vector<std::size_t> place_of(cfg.n_images, kUnassigned);
    auto pairs = cfg.loop_spec;
    std::sort(pairs.begin(), pairs.end());  // by revisit index, so chains resolve in order
    for (const auto& [revisit, original] : pairs) {
        if (revisit >= cfg.n_images || original >= cfg.n_images)
            throw std::invalid_argument("synth: loop_spec index out of range");
        if (revisit <= original)
            throw std::invalid_argument("synth: revisit must come after its original");
        place_of[revisit] = kRevisit;
    }
    std::size_t next_place = 0;
    for (std::size_t i = 0; i < cfg.n_images; ++i)
        if (place_of[i] == kUnassigned) place_of[i] = next_place++;
    for (const auto& [revisit, original] : pairs) place_of[revisit] = place_of[original];

    if (cfg.n_places != 0 && cfg.n_places != next_place)
        throw std::invalid_argument("synth: n_places must be " + std::to_string(next_place) +
                                    " for this loop_spec (or 0 to derive)");
    const std::size_t n_places = next_place;

    // Latent prototypes: per place, a well-separated center plus unit-scale
    // per-feature offsets. Images add noise_sigma jitter on top.
    constexpr double kCenterSpread = 6.0;
    GaussianGen gen(cfg.rng_seed);
    std::vector<std::vector<double>> prototypes(n_places);
    for (std::size_t p = 0; p < n_places; ++p) {
        std::vector<double> center(cfg.dim);
        for (auto& c : center) c = kCenterSpread * gen.next();
        prototypes[p].resize(cfg.features_per_image * cfg.dim);
        for (std::size_t f = 0; f < cfg.features_per_image; ++f)
            for (std::size_t d = 0; d < cfg.dim; ++d)
                prototypes[p][f * cfg.dim + d] = center[d] + gen.next();
    }

    DescriptorSet set;
    set.n_images = cfg.n_images;
    const std::size_t n_rows = cfg.n_images * cfg.features_per_image;
    set.data.resize(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(cfg.dim));
    set.image_of.resize(n_rows);
    std::size_t row = 0;
    for (std::size_t i = 0; i < cfg.n_images; ++i) {
        const auto& proto = prototypes[place_of[i]];
        for (std::size_t f = 0; f < cfg.features_per_image; ++f, ++row) {
            set.image_of[row] = static_cast<std::uint32_t>(i);
            for (std::size_t d = 0; d < cfg.dim; ++d)
                set.data(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(d)) =
                    static_cast<float>(proto[f * cfg.dim + d] + cfg.noise_sigma * gen.next());
        }
    }

    GroundTruthMatrix gt;
    gt.entries = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(
        static_cast<Eigen::Index>(cfg.n_images), static_cast<Eigen::Index>(cfg.n_images));
    for (std::size_t i = 0; i < cfg.n_images; ++i)
        gt.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1;
    for (const auto& [revisit, original] : cfg.loop_spec)
        gt.entries(static_cast<Eigen::Index>(revisit), static_cast<Eigen::Index>(original)) = 1;

    set.validate();
    return {std::move(set), std::move(gt)};
}

}  // namespace loopdet
