#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gidm/data.hpp"
#include "gidm/dist.hpp"
#include "gidm/io.hpp"
#include "gidm/oracle.hpp"

namespace gidm {

/// Everything one end-to-end run depends on. Optional fields left empty are
/// resolved deterministically (median bandwidth, elbow threshold, power-of-two
/// quadrature) and the resolved numbers are echoed into the run manifest.
struct RunConfig {
  std::optional<DatasetSpec> dataset;
  std::optional<std::filesystem::path> input_prefix;

  std::optional<Real> eps;  // empty: median heuristic
  int max_freq = 8;
  int quad_nodes = 0;  // 0: next power of two >= 2L+2

  int t = 3;
  std::optional<int> t2;
  std::optional<Real> delta;  // empty: scree elbow
  std::vector<EmbeddingKind> kinds = {EmbeddingKind::EquivariantWalk,
                                      EmbeddingKind::InvariantWalk};
  long bispectrum_budget = 100000;

  std::optional<Index> source;  // heat-map source; default first injected
  int align_grid = 1024;
  Index pairwise_max = 512;
  bool force_pairwise = false;

  std::filesystem::path out_dir = "run";
  std::optional<std::filesystem::path> cache_dir;  // default out_dir/cache
  std::uint64_t seed = 0;
};

struct PipelineResult {
  std::filesystem::path out_dir;
  std::filesystem::path manifest_file;
  Real eps = 0.0;
  Real delta = 0.0;
  int l_eff = 0;
  int quad_nodes = 0;
  Index n_points = 0;
  Index source = 0;
  std::vector<std::filesystem::path> outputs;
};

PipelineResult run_pipeline(const RunConfig& config, std::ostream* log = nullptr);

/// Reconstructs a fully resolved config from a run manifest; rerunning it
/// reproduces the CSV outputs byte for byte.
RunConfig config_from_manifest(const std::filesystem::path& manifest_file);

/// Loads (or generates), factors and decomposes per the config, reusing the
/// on-disk cache. Shared by the focused CLI subcommands.
struct PreparedSpectral {
  PointCloud cloud;
  SpectralData spec;
  Real eps = 0.0;
  int quad_nodes = 0;
  int l_eff = 0;
};
PreparedSpectral prepare_spectral(const RunConfig& config,
                                  std::ostream* log = nullptr);

struct VerifyConfig {
  GroupSpec group = cyclic(4);
  int quad_nodes = 0;  // SO(2) only; cyclic uses the group order
  Index n_points = 3;
  Shape shape = Shape::Torus;
  std::optional<Real> eps;
  int t = 2;
  std::uint64_t seed = 1;
  bool with_mc = false;
  long mc_samples = 1000000;
};

struct VerifyCheck {
  std::string name;
  Real lhs = 0.0;
  Real rhs = 0.0;
  Real abs_err = 0.0;
  Real rel_err = 0.0;
  Real tol = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
};

/// Runs the oracle identity suite on a small instance of the configured
/// group; every check records both values and its tolerance.
VerifyReport run_verify(const VerifyConfig& config, std::ostream* log = nullptr);

void write_verify_report(const std::filesystem::path& file,
                         const VerifyReport& report);

/// Identity checks against a prebuilt dense walk; split out so tests can
/// corrupt the inputs and watch the right check fail.
void check_stochasticity(DenseWalk& dense, Real tol,
                         std::vector<VerifyCheck>& out);
void check_spectral_union(DenseWalk& dense, const SpectralData& spec, Real tol,
                          std::vector<VerifyCheck>& out);

}  // namespace gidm
