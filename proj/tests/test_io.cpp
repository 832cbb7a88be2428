#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "gidm/data.hpp"
#include "gidm/io.hpp"

using namespace gidm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gidm-io-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
};

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (Real v : {0.1, -3.5e-17, 1.0 / 3.0, 2.718281828459045e100, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("cloud round trip preserves points, action and registry") {
  TempDir tmp;
  PointCloud cloud = sample_torus(17, 2.0, 1.0, 5);
  cloud = inject_copy(cloud, 4, 1.25);
  cloud.action.group = cyclic(12);
  write_cloud(tmp.path / "cloud", cloud);
  PointCloud loaded = load_cloud(tmp.path / "cloud");

  CHECK(loaded.size() == cloud.size());
  CHECK((loaded.points - cloud.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loaded.action == cloud.action);
  CHECK(loaded.seed == cloud.seed);
  CHECK(loaded.source_label == cloud.source_label);
  REQUIRE(loaded.injected.size() == 1);
  CHECK(loaded.injected[0].source == 4);
  CHECK(loaded.injected[0].angle == cloud.injected[0].angle);

  // the generating recipe rides along verbatim
  auto find_meta = [&](const std::string& key) -> std::string {
    for (const auto& [k, v] : loaded.metadata) {
      if (k == key) return v;
    }
    return "";
  };
  CHECK(find_meta("shape") == "torus");
  CHECK(find_meta("n") == "17");
  CHECK(find_meta("area_uniform") == "0");
}

TEST_CASE("content hash separates every input") {
  PointCloud cloud = sample_torus(6, 2.0, 1.0, 9);
  std::uint64_t base = content_hash(cloud, 1.5, 4, 16);
  CHECK(base == content_hash(cloud, 1.5, 4, 16));
  CHECK(base != content_hash(cloud, 1.6, 4, 16));
  CHECK(base != content_hash(cloud, 1.5, 5, 16));
  CHECK(base != content_hash(cloud, 1.5, 4, 32));
  PointCloud moved = cloud;
  moved.points(3, 1) += 1e-12;
  CHECK(base != content_hash(moved, 1.5, 4, 16));
  PointCloud relabeled = cloud;
  relabeled.action.group = cyclic(16);
  CHECK(base != content_hash(relabeled, 1.5, 4, 16));
}

TEST_CASE("block and spectral caches round trip bit for bit") {
  TempDir tmp;
  PointCloud cloud = sample_torus(7, 2.0, 1.0, 3);
  FourierBlocks blocks = fourier_blocks(cloud, 2.0, 4, 16);
  save_blocks_cache(tmp.path / "b.bin", blocks);
  auto loaded = load_blocks_cache(tmp.path / "b.bin");
  REQUIRE(loaded.has_value());
  CHECK(loaded->eps == blocks.eps);
  CHECK(loaded->freqs == blocks.freqs);
  CHECK(loaded->implied_conjugates == blocks.implied_conjugates);
  for (std::size_t f = 0; f < blocks.blocks.size(); ++f) {
    CHECK(std::memcmp(loaded->blocks[f].data(), blocks.blocks[f].data(),
                      sizeof(Complex) * blocks.blocks[f].size()) == 0);
  }
  CHECK(std::memcmp(loaded->degrees.data(), blocks.degrees.data(),
                    sizeof(Real) * blocks.degrees.size()) == 0);

  SpectralData spec = eigendecompose(blocks);
  save_spectral_cache(tmp.path / "s.bin", spec);
  auto spec2 = load_spectral_cache(tmp.path / "s.bin");
  REQUIRE(spec2.has_value());
  for (std::size_t f = 0; f < spec.eigenvalues.size(); ++f) {
    CHECK(std::memcmp(spec2->eigenvalues[f].data(), spec.eigenvalues[f].data(),
                      sizeof(Real) * spec.eigenvalues[f].size()) == 0);
    CHECK(std::memcmp(spec2->vectors_sym[f].data(), spec.vectors_sym[f].data(),
                      sizeof(Complex) * spec.vectors_sym[f].size()) == 0);
    CHECK((spec2->vectors_walk[f] - spec.vectors_walk[f]).cwiseAbs().maxCoeff() ==
          0.0);
  }

  // damaged magic is a miss, not an error
  std::ofstream(tmp.path / "junk.bin", std::ios::binary) << "nonsense";
  CHECK_FALSE(load_blocks_cache(tmp.path / "junk.bin").has_value());
  CHECK_FALSE(load_spectral_cache(tmp.path / "nonexistent.bin").has_value());
}

TEST_CASE("matrix csv round trip") {
  TempDir tmp;
  Matrix m(3, 2);
  m << 1.0, -0.5, 1e-30, 2.0 / 3.0, 5.5, -1e20;
  write_matrix_csv(tmp.path / "m.csv", m);
  Matrix back = load_matrix_csv(tmp.path / "m.csv");
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 2);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scree, alignment, heatmap and embedding exports are well formed") {
  TempDir tmp;
  std::vector<ScreeEntry> entries = {{0, 0, 1.0, 1.0}, {1, 0, 0.5, 0.25}};
  write_scree_csv(tmp.path / "scree.csv", entries);
  std::ifstream scree_in(tmp.path / "scree.csv");
  std::string line;
  std::getline(scree_in, line);
  CHECK(line == "rank,ell,n,lambda,lambda_pow_t");
  std::getline(scree_in, line);
  CHECK(line == "0,0,0,1,1");

  write_alignment_csv(tmp.path / "a.csv", {{0, 1, 0.5, 0.25}});
  std::ifstream align_in(tmp.path / "a.csv");
  std::getline(align_in, line);
  CHECK(line == "i,j,angle,value");

  PointCloud cloud = sample_torus(4, 2.0, 1.0, 1);
  Vector col = Vector::LinSpaced(4, 0.0, 3.0);
  write_heatmap_csv(tmp.path / "h.csv", cloud, {"dist"}, {col});
  std::ifstream heat_in(tmp.path / "h.csv");
  std::getline(heat_in, line);
  CHECK(line == "point,x0,x1,x2,dist");

  // embedding export with header json
  cloud.action.group = cyclic(4);
  SpectralData spec = eigendecompose(fourier_blocks(cloud, 2.0, 3, 4));
  std::vector<EmbeddingVector> rows;
  for (Index i = 0; i < 4; ++i) {
    rows.push_back(invariant_embed(spec, i, 2, 0.0, true));
  }
  write_embeddings_csv(tmp.path / "e.csv", tmp.path / "e.json", rows);
  CHECK(fs::file_size(tmp.path / "e.csv") > 0);
  CHECK(fs::file_size(tmp.path / "e.json") > 0);
  std::ifstream embed_in(tmp.path / "e.csv");
  std::getline(embed_in, line);
  CHECK(line.rfind("point,re_0,im_0", 0) == 0);
}
