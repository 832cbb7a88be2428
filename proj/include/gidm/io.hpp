#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gidm/embed.hpp"
#include "gidm/spectral.hpp"

namespace gidm {

/// Round-trip-exact decimal rendering used for every CSV number.
std::string format_double(Real x);

void write_cloud(const std::filesystem::path& prefix, const PointCloud& cloud);
PointCloud load_cloud(const std::filesystem::path& prefix);

/// Stable hash of everything the Fourier blocks depend on; keys the cache.
std::uint64_t content_hash(const PointCloud& cloud, Real eps, int max_freq,
                           int quad_nodes);

void save_blocks_cache(const std::filesystem::path& file,
                       const FourierBlocks& blocks);
std::optional<FourierBlocks> load_blocks_cache(const std::filesystem::path& file);

void save_spectral_cache(const std::filesystem::path& file,
                         const SpectralData& spec);
std::optional<SpectralData> load_spectral_cache(const std::filesystem::path& file);

void write_scree_csv(const std::filesystem::path& file,
                     const std::vector<ScreeEntry>& entries);

/// One row per point; complex coordinates split into re/im columns. The JSON
/// header carries the labels, times, threshold, and the norm-weight
/// convention so external consumers reproduce norms exactly.
void write_embeddings_csv(const std::filesystem::path& csv_file,
                          const std::filesystem::path& header_file,
                          const std::vector<EmbeddingVector>& embeddings);

void write_matrix_csv(const std::filesystem::path& file,
                      const Eigen::Ref<const Matrix>& m);
Matrix load_matrix_csv(const std::filesystem::path& file);

struct AlignmentRow {
  Index i = 0;
  Index j = 0;
  Real angle = 0.0;
  Real value = 0.0;
};
void write_alignment_csv(const std::filesystem::path& file,
                         const std::vector<AlignmentRow>& rows);

/// Point coordinates plus one value column per named series.
void write_heatmap_csv(const std::filesystem::path& file,
                       const PointCloud& cloud,
                       const std::vector<std::string>& column_names,
                       const std::vector<Vector>& columns);

}  // namespace gidm
