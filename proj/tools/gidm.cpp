// Command line driver: generate clouds, run the factor/embed/export pipeline,
// query distances and alignments, and run the oracle verification suite.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "gidm/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;
constexpr int kExitVerify = 4;

gidm::GroupSpec parse_group(const std::string& name) {
  if (name == "so2") return gidm::so2();
  if (name.size() > 1 && name[0] == 'c') {
    int order = std::stoi(name.substr(1));
    return gidm::cyclic(order);
  }
  throw gidm::ConfigError("unknown group '" + name + "' (use so2 or c<M>)");
}

gidm::InjectedCopy parse_injection(const std::string& text, bool degrees) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw gidm::ConfigError("injection must be <index>:<angle>, got " + text);
  }
  gidm::InjectedCopy copy;
  copy.source = std::stoll(text.substr(0, colon));
  copy.angle = std::stod(text.substr(colon + 1));
  if (degrees) copy.angle *= gidm::kPi / 180.0;
  return copy;
}

struct DatasetFlags {
  std::string shape = "torus";
  gidm::Index n = 2000;
  double torus_R = 2.0;
  double torus_r = 1.0;
  bool area_uniform = false;
  std::uint64_t seed = 0;
  std::vector<std::string> inject;
  std::vector<std::string> inject_deg;
  std::string group = "so2";

  void attach(CLI::App* cmd) {
    cmd->add_option("--shape", shape, "torus or sphere");
    cmd->add_option("--n", n, "number of sampled points");
    cmd->add_option("--torus-major", torus_R, "torus major radius");
    cmd->add_option("--torus-minor", torus_r, "torus minor radius");
    cmd->add_flag("--area-uniform", area_uniform,
                  "torus: sample uniformly in surface area");
    cmd->add_option("--seed", seed, "generator seed");
    cmd->add_option("--inject", inject,
                    "append a rotated copy, <index>:<radians>");
    cmd->add_option("--inject-deg", inject_deg,
                    "append a rotated copy, <index>:<degrees>");
    cmd->add_option("--group", group, "acting group: so2 or c<M>");
  }

  gidm::DatasetSpec to_spec() const {
    gidm::DatasetSpec spec;
    spec.shape = gidm::shape_from_name(shape);
    spec.n_points = n;
    spec.major_radius = torus_R;
    spec.minor_radius = torus_r;
    spec.area_uniform = area_uniform;
    spec.group = parse_group(group);
    spec.seed = seed;
    for (const auto& text : inject) {
      spec.injected.push_back(parse_injection(text, false));
    }
    for (const auto& text : inject_deg) {
      spec.injected.push_back(parse_injection(text, true));
    }
    return spec;
  }
};

struct SpectralFlags {
  std::string input;
  std::string eps = "median";
  int ell_max = 8;
  int quad_nodes = 0;
  int t = 3;
  std::string delta = "elbow";

  void attach(CLI::App* cmd, bool with_input) {
    if (with_input) {
      cmd->add_option("--input", input,
                      "cloud file prefix (expects <prefix>.csv/.json)");
    }
    cmd->add_option("--eps", eps, "kernel bandwidth, or 'median'");
    cmd->add_option("--ell-max", ell_max, "largest stored frequency");
    cmd->add_option("--quad-nodes", quad_nodes,
                    "quadrature nodes (0: power of two >= 2L+2)");
    cmd->add_option("--t", t, "diffusion time");
    cmd->add_option("--delta", delta, "truncation threshold, or 'elbow'");
  }

  void apply(gidm::RunConfig& config) const {
    if (!input.empty()) config.input_prefix = input;
    if (eps != "median") config.eps = std::stod(eps);
    config.max_freq = ell_max;
    config.quad_nodes = quad_nodes;
    config.t = t;
    if (delta != "elbow") config.delta = std::stod(delta);
  }
};

int dispatch(int argc, char** argv) {
  CLI::App app{"group-invariant graph-Laplacian diffusion maps"};
  app.require_subcommand(1);

  // --- gen ---------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "sample a point cloud and write it");
  DatasetFlags gen_data;
  gen_data.attach(gen);
  std::string gen_out = "points";
  gen->add_option("--out", gen_out, "output file prefix");

  // --- pipeline ----------------------------------------------------------
  auto* pipe = app.add_subcommand(
      "pipeline", "generate/load, factor, decompose, embed, export");
  DatasetFlags pipe_data;
  pipe_data.attach(pipe);
  SpectralFlags pipe_spec;
  pipe_spec.attach(pipe, true);
  gidm::RunConfig pipe_config;
  int pipe_t2 = 0;
  std::vector<std::string> pipe_kinds;
  std::string pipe_out_dir = "run";
  std::string pipe_manifest;
  long long pipe_source = -1;
  pipe->add_option("--t2", pipe_t2, "second diffusion time (mixed invariant)");
  pipe->add_option("--kinds", pipe_kinds,
                   "embedding kinds (equivariant-walk, equivariant-sym, "
                   "invariant-walk, invariant-sym, first-moment, bispectrum)");
  pipe->add_option("--source", pipe_source, "heat-map source point");
  pipe->add_option("--align-grid", pipe_config.align_grid,
                   "alignment scan grid size");
  pipe->add_option("--bispectrum-budget", pipe_config.bispectrum_budget,
                   "largest-product triple budget");
  pipe->add_option("--pairwise-max", pipe_config.pairwise_max,
                   "largest N that still gets full distance matrices");
  pipe->add_flag("--force-pairwise", pipe_config.force_pairwise,
                 "write full matrices regardless of N");
  pipe->add_option("--out-dir", pipe_out_dir, "run directory");
  pipe->add_option("--cache-dir", [&pipe_config](const std::vector<std::string>& v) {
    pipe_config.cache_dir = v.back();
    return true;
  }, "cache directory (or set GIDM_CACHE_DIR)");
  pipe->add_option("--from-manifest", pipe_manifest,
                   "rerun a previous run from its manifest");

  // --- scree / embed / dist / align --------------------------------------
  auto* scree_cmd = app.add_subcommand("scree", "export the eigenvalue scree");
  SpectralFlags scree_spec;
  scree_spec.attach(scree_cmd, true);
  std::string scree_out = "scree.csv";
  scree_cmd->add_option("--out", scree_out, "output CSV");
  std::uint64_t scree_seed = 0;
  scree_cmd->add_option("--seed", scree_seed, "seed for bandwidth resolution");

  auto* embed_cmd = app.add_subcommand("embed", "export one embedding kind");
  SpectralFlags embed_spec;
  embed_spec.attach(embed_cmd, true);
  std::string embed_kind = "invariant-walk";
  std::string embed_out = "embedding.csv";
  std::uint64_t embed_seed = 0;
  int embed_t2 = 0;
  embed_cmd->add_option("--kind", embed_kind, "embedding kind");
  embed_cmd->add_option("--t2", embed_t2, "second diffusion time");
  embed_cmd->add_option("--out", embed_out, "output CSV");
  embed_cmd->add_option("--seed", embed_seed, "seed for bandwidth resolution");

  auto* dist_cmd = app.add_subcommand("dist", "export a pairwise matrix");
  SpectralFlags dist_spec;
  dist_spec.attach(dist_cmd, true);
  std::string dist_kind = "invariant-walk";
  std::string dist_out = "matrix.csv";
  std::uint64_t dist_seed = 0;
  int dist_grid = 1024;
  dist_cmd->add_option("--kind", dist_kind, "distance kind");
  dist_cmd->add_option("--align-grid", dist_grid, "alignment grid size");
  dist_cmd->add_option("--out", dist_out, "output CSV");
  dist_cmd->add_option("--seed", dist_seed, "seed for bandwidth resolution");

  auto* align_cmd =
      app.add_subcommand("align", "alignment angles from one source point");
  SpectralFlags align_spec;
  align_spec.attach(align_cmd, true);
  long long align_source = 0;
  int align_grid = 1024;
  std::string align_out = "alignment.csv";
  std::uint64_t align_seed = 0;
  align_cmd->add_option("--source", align_source, "source point");
  align_cmd->add_option("--align-grid", align_grid, "scan grid size");
  align_cmd->add_option("--out", align_out, "output CSV");
  align_cmd->add_option("--seed", align_seed, "seed for bandwidth resolution");

  // --- verify -------------------------------------------------------------
  auto* verify_cmd =
      app.add_subcommand("verify", "run the oracle identity suite");
  std::string verify_group = "c4";
  gidm::VerifyConfig verify_config;
  std::string verify_shape = "torus";
  std::string verify_eps = "median";
  std::string verify_out = "verify-report.json";
  verify_cmd->add_option("--group", verify_group, "so2 or c<M>");
  verify_cmd->add_option("--quad-nodes", verify_config.quad_nodes,
                         "SO(2) quadrature nodes");
  verify_cmd->add_option("--n", verify_config.n_points, "points in the cloud");
  verify_cmd->add_option("--shape", verify_shape, "torus or sphere");
  verify_cmd->add_option("--eps", verify_eps, "bandwidth or 'median'");
  verify_cmd->add_option("--t", verify_config.t, "diffusion time");
  verify_cmd->add_option("--seed", verify_config.seed, "seed");
  verify_cmd->add_flag("--mc", verify_config.with_mc,
                       "include the Monte-Carlo displacement check");
  verify_cmd->add_option("--mc-samples", verify_config.mc_samples,
                         "paired walks to simulate");
  verify_cmd->add_option("--out", verify_out, "JSON report path");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    gidm::PointCloud cloud = gidm::make_cloud(gen_data.to_spec());
    gidm::write_cloud(gen_out, cloud);
    std::cout << "wrote " << gen_out << ".csv and " << gen_out << ".json ("
              << cloud.size() << " points)\n";
    return kExitOk;
  }

  if (pipe->parsed()) {
    gidm::RunConfig config;
    if (!pipe_manifest.empty()) {
      config = gidm::config_from_manifest(pipe_manifest);
    } else {
      config = pipe_config;
      pipe_spec.apply(config);
      if (!config.input_prefix) {
        gidm::DatasetSpec spec = pipe_data.to_spec();
        config.dataset = spec;
        config.seed = spec.seed;
      }
      if (pipe_t2 > 0) config.t2 = pipe_t2;
      if (pipe_source >= 0) config.source = pipe_source;
      if (!pipe_kinds.empty()) {
        config.kinds.clear();
        for (const auto& k : pipe_kinds) {
          config.kinds.push_back(gidm::embedding_kind_from_name(k));
        }
      }
    }
    if (pipe->count("--out-dir") || config.out_dir.empty()) {
      config.out_dir = pipe_out_dir;
    }
    gidm::PipelineResult result = gidm::run_pipeline(config, &std::cout);
    std::cout << "run complete: " << result.manifest_file.string() << "\n";
    return kExitOk;
  }

  auto prepared = [&](const SpectralFlags& flags,
                      std::uint64_t seed) -> gidm::PreparedSpectral {
    gidm::RunConfig config;
    if (flags.input.empty()) {
      throw gidm::ConfigError("--input is required for this subcommand");
    }
    config.input_prefix = flags.input;
    config.seed = seed;
    config.out_dir = ".";
    config.cache_dir = std::filesystem::path(".gidm-cache");
    flags.apply(config);
    return gidm::prepare_spectral(config, &std::cout);
  };
  auto resolve_delta = [](const gidm::PreparedSpectral& prep,
                          const SpectralFlags& flags) {
    if (flags.delta != "elbow") return std::stod(flags.delta);
    return gidm::elbow_threshold(gidm::scree(prep.spec, flags.t));
  };

  if (scree_cmd->parsed()) {
    gidm::PreparedSpectral prep = prepared(scree_spec, scree_seed);
    gidm::write_scree_csv(scree_out, gidm::scree(prep.spec, scree_spec.t));
    std::cout << "wrote " << scree_out << "\n";
    return kExitOk;
  }

  if (embed_cmd->parsed()) {
    gidm::PreparedSpectral prep = prepared(embed_spec, embed_seed);
    double delta = resolve_delta(prep, embed_spec);
    gidm::EmbeddingKind kind = gidm::embedding_kind_from_name(embed_kind);
    const gidm::Index n = prep.spec.n_points();
    if (kind == gidm::EmbeddingKind::FirstMoment) {
      gidm::Matrix moments(n, n);
      for (gidm::Index i = 0; i < n; ++i) {
        moments.row(i) =
            gidm::first_moment(prep.spec, i, embed_spec.t).transpose();
      }
      gidm::write_matrix_csv(embed_out, moments);
    } else {
      std::vector<gidm::EmbeddingVector> rows;
      rows.reserve(static_cast<std::size_t>(n));
      for (gidm::Index i = 0; i < n; ++i) {
        switch (kind) {
          case gidm::EmbeddingKind::EquivariantWalk:
          case gidm::EmbeddingKind::EquivariantSym:
            rows.push_back(gidm::equivariant_embed(
                prep.spec, i, gidm::identity(prep.spec.action.group),
                embed_spec.t, delta,
                kind == gidm::EmbeddingKind::EquivariantWalk));
            break;
          case gidm::EmbeddingKind::InvariantWalk:
            rows.push_back(
                embed_t2 > 0 && embed_t2 != embed_spec.t
                    ? gidm::mixed_time_invariant_embed(prep.spec, i,
                                                       embed_spec.t, embed_t2,
                                                       delta)
                    : gidm::invariant_embed(prep.spec, i, embed_spec.t, delta,
                                            true));
            break;
          case gidm::EmbeddingKind::InvariantSym:
            rows.push_back(gidm::invariant_embed(prep.spec, i, embed_spec.t,
                                                 delta, false));
            break;
          case gidm::EmbeddingKind::Bispectrum:
            rows.push_back(
                gidm::bispectrum_embed(prep.spec, i, embed_spec.t, delta));
            break;
          default:
            break;
        }
      }
      gidm::write_embeddings_csv(
          embed_out, std::filesystem::path(embed_out).replace_extension("json"),
          rows);
    }
    std::cout << "wrote " << embed_out << "\n";
    return kExitOk;
  }

  if (dist_cmd->parsed()) {
    gidm::PreparedSpectral prep = prepared(dist_spec, dist_seed);
    double delta = resolve_delta(prep, dist_spec);
    gidm::DistanceKind kind = gidm::distance_kind_from_name(dist_kind);
    gidm::Matrix m = gidm::pairwise_matrix(prep.spec, kind, dist_spec.t, delta,
                                           dist_grid);
    gidm::write_matrix_csv(dist_out, m);
    std::cout << "wrote " << dist_out << "\n";
    if (kind == gidm::DistanceKind::Aligned) {
      // angles ride alongside the value matrix
      std::vector<gidm::AlignmentRow> rows;
      const gidm::Index n = prep.spec.n_points();
      for (gidm::Index i = 0; i < n; ++i) {
        for (gidm::Index j = i + 1; j < n; ++j) {
          gidm::DistanceReport rep = gidm::aligned_distance(
              prep.spec, i, j, dist_spec.t, delta, true, dist_grid);
          rows.push_back({i, j, rep.alignment->as_angle(), rep.value});
        }
      }
      std::filesystem::path angles =
          std::filesystem::path(dist_out).replace_extension("angles.csv");
      gidm::write_alignment_csv(angles, rows);
      std::cout << "wrote " << angles.string() << "\n";
    }
    return kExitOk;
  }

  if (align_cmd->parsed()) {
    gidm::PreparedSpectral prep = prepared(align_spec, align_seed);
    double delta = resolve_delta(prep, align_spec);
    const gidm::Index n = prep.spec.n_points();
    if (align_source < 0 || align_source >= n) {
      throw gidm::ConfigError("--source out of range");
    }
    std::vector<gidm::AlignmentRow> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (gidm::Index j = 0; j < n; ++j) {
      gidm::DistanceReport rep = gidm::aligned_distance(
          prep.spec, align_source, j, align_spec.t, delta, true, align_grid);
      rows.push_back(
          {align_source, j, rep.alignment->as_angle(), rep.value});
    }
    gidm::write_alignment_csv(align_out, rows);
    std::cout << "wrote " << align_out << "\n";
    return kExitOk;
  }

  if (verify_cmd->parsed()) {
    verify_config.group = parse_group(verify_group);
    verify_config.shape = gidm::shape_from_name(verify_shape);
    if (verify_eps != "median") verify_config.eps = std::stod(verify_eps);
    gidm::VerifyReport report = gidm::run_verify(verify_config, &std::cout);
    gidm::write_verify_report(verify_out, report);
    std::cout << "report: " << verify_out << "\n";
    if (!report.all_pass()) {
      std::cerr << "verification FAILED\n";
      return kExitVerify;
    }
    return kExitOk;
  }

  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const gidm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gidm::GuardViolation& e) {
    std::cerr << "guard violation: " << e.what() << "\n";
    return kExitGuard;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
