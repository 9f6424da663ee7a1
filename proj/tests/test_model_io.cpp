#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "ico/model_io.hpp"

namespace fs = std::filesystem;

using ico::Dataset;
using ico::FeatureVector;
using ico::ModelBundle;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "icosched_model_io_test";
  fs::create_directories(dir);
  return dir;
}

Dataset random_dataset(std::size_t n, std::uint64_t seed) {
  Dataset d;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 900.0);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector f;
    for (std::size_t k = 0; k < ico::kFeatureCount; ++k) f[k] = u(rng);
    d.push(f, u(rng));
  }
  return d;
}

}  // namespace

TEST_CASE("model bundles round-trip through json files", "[model_io]") {
  Dataset d = random_dataset(80, 11);
  ico::ForestParams params;
  params.n_trees = 5;
  params.max_depth = 4;
  params.seed = 19;
  ModelBundle bundle;
  bundle.forest = ico::train_forest(d, params);
  bundle.resources["web-search-like"] = {{0.01, 0.5, "qps", "cores"},
                                         {2048.0, 1e6, "qps", "bytes"}};

  const auto path = temp_dir() / "models.json";
  ico::save_models(path, bundle);
  ModelBundle loaded = ico::load_models(path);

  CHECK(loaded.forest == bundle.forest);
  REQUIRE(loaded.resources.count("web-search-like") == 1);
  CHECK(loaded.resources["web-search-like"].cpu.slope == 0.01);
  CHECK(loaded.resources["web-search-like"].mem.intercept == 1e6);

  // Predictions agree bit-for-bit after the round trip.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 900.0);
  for (int i = 0; i < 50; ++i) {
    FeatureVector f;
    for (std::size_t k = 0; k < ico::kFeatureCount; ++k) f[k] = u(rng);
    CHECK(ico::predict_latency(loaded.forest, f) == ico::predict_latency(bundle.forest, f));
  }
}

TEST_CASE("model loading validates the feature manifest", "[model_io]") {
  Dataset d = random_dataset(40, 3);
  ico::ForestParams params;
  params.n_trees = 2;
  ModelBundle bundle;
  bundle.forest = ico::train_forest(d, params);

  auto j = ico::models_to_json(bundle);
  j["feature_names"][3] = "bogus";
  CHECK_THROWS_AS(ico::models_from_json(j), ico::ShapeError);

  j = ico::models_to_json(bundle);
  j["format_version"] = 99;
  CHECK_THROWS_AS(ico::models_from_json(j), ico::ParseError);

  CHECK_THROWS_AS(ico::load_models(temp_dir() / "does_not_exist.json"), ico::NotFound);
}

TEST_CASE("dataset csv round-trips exactly", "[model_io]") {
  Dataset d = random_dataset(25, 29);
  const auto path = temp_dir() / "dataset.csv";
  ico::write_dataset_csv(path, d);
  Dataset back = ico::read_dataset_csv(path);
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.x[i] == d.x[i]);
    CHECK(back.y[i] == d.y[i]);
  }

  // Rewriting parsed data yields identical bytes.
  const auto path2 = temp_dir() / "dataset2.csv";
  ico::write_dataset_csv(path2, back);
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("dataset csv validates header and rows", "[model_io]") {
  const auto dir = temp_dir();
  const auto bad_header = dir / "bad_header.csv";
  {
    std::ofstream out(bad_header);
    out << "a,b,c\n1,2,3\n";
  }
  CHECK_THROWS_AS(ico::read_dataset_csv(bad_header), ico::ParseError);

  Dataset d = random_dataset(2, 5);
  const auto truncated = dir / "truncated.csv";
  ico::write_dataset_csv(truncated, d);
  {
    std::ofstream out(truncated, std::ios::app);
    out << "1,2,3\n";
  }
  try {
    ico::read_dataset_csv(truncated);
    FAIL("expected ParseError");
  } catch (const ico::ParseError& e) {
    CHECK(std::string(e.what()).find(":4:") != std::string::npos);  // line number surfaced
  }
}
