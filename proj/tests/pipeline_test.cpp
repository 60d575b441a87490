#include "mfsi/pipeline.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mfsi;
using namespace mfsi::pipeline;

namespace {

std::string kite_config(const std::string& extra = "", const std::string& angles = "[0.25]") {
  return
      "[experiment]\n"
      "name = kite_strip\n"
      "dim = 2\n"
      "[domain]\n"
      "shape = kite\n"
      "center = [0, 0]\n"
      "scale = 1\n"
      "[source]\n"
      "spatial = constant\n"
      "spatial_coeffs = [3]\n"
      "temporal_coeffs = [1, 1]\n"
      "t_min = 0\n"
      "t_max = 0.1\n"
      "[band]\n"
      "k_min = 0\n"
      "k_max_pi = 2.6666666666666665\n"
      "n = 16\n"
      "[observations]\n"
      "kind = far\n"
      "angles_pi = " + angles + "\n"
      "[simulation]\n"
      "resolution = 96\n"
      "[lattice]\n"
      "lo = [-3, -3]\n"
      "hi = [3, 3]\n"
      "counts = [41, 41]\n" +
      extra;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Sha256, Fips180TestVectors) {
  EXPECT_EQ(mfsi::detail::sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(mfsi::detail::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(mfsi::detail::sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
            "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // Block-boundary padding case.
  EXPECT_EQ(mfsi::detail::sha256_hex(std::string(64, 'a')),
            mfsi::detail::sha256_hex(std::string(64, 'a')));
}

TEST(DoubleFormat, ShortestRoundTrip) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    double v;
    if (i == 0) v = 0.0;
    else if (i == 1) v = -0.0;
    else if (i == 2) v = kPi;
    else if (i == 3) v = 1e-308;
    else {
      const std::uint64_t bits = rng();
      std::memcpy(&v, &bits, 8);
      if (!std::isfinite(v)) continue;
    }
    const std::string s = io::format_double(v);
    const double back = io::parse_double(s, "test");
    EXPECT_EQ(std::signbit(back), std::signbit(v));
    EXPECT_EQ(back, v) << s;
  }
}

TEST(RecordCsv, BitExactRoundTrip) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> ks;
  std::vector<cplx> vals;
  for (int i = 0; i < 31; ++i) {
    ks.push_back(u(rng));
    vals.emplace_back(u(rng) * 1e-7, u(rng) * 1e9);
  }
  const std::string text = io::record_csv(ks, vals);
  const auto back = io::parse_record_csv(text, "round-trip");
  ASSERT_EQ(back.wavenumbers.size(), ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    EXPECT_EQ(back.wavenumbers[i], ks[i]);
    EXPECT_EQ(back.values[i], vals[i]);
  }
  EXPECT_EQ(io::record_csv(back.wavenumbers, back.values), text);

  EXPECT_THROW(io::parse_record_csv("bad header\n1,2,3\n", "x"), std::invalid_argument);
  EXPECT_THROW(io::parse_record_csv("k,re,im\n1,2\n", "x"), std::invalid_argument);
}

TEST(Pgm, HeaderAndNormalization) {
  indicator::IndicatorField field;
  field.lattice = indicator::make_lattice(point2(0, 0), point2(1, 1), {3, 2, 1});
  field.values = {0.0, 0.5, 1.0, 2.0, 0.25, 0.0};  // x fastest, y slow
  const io::Slice slice = io::field_slice(field, 0, 0.0);
  EXPECT_EQ(slice.width, 3);
  EXPECT_EQ(slice.height, 2);
  const std::string pgm = io::pgm16(slice);
  ASSERT_TRUE(pgm.rfind("P5\n3 2\n65535\n", 0) == 0);
  const std::size_t header = std::string("P5\n3 2\n65535\n").size();
  ASSERT_EQ(pgm.size(), header + 12);
  // Top row is the upper lattice row (y = 1): values 2.0, 0.25, 0.0.
  const auto sample = [&](int i) {
    const unsigned char hi = pgm[header + 2 * i];
    const unsigned char lo = pgm[header + 2 * i + 1];
    return (static_cast<unsigned>(hi) << 8) | lo;
  };
  EXPECT_EQ(sample(0), 65535u);  // 2.0 / max
  EXPECT_EQ(sample(1), 8192u);   // 0.25 / 2.0 * 65535 rounded
  EXPECT_EQ(sample(2), 0u);
  EXPECT_EQ(sample(3), 0u);      // bottom row: 0.0, 0.5, 1.0
  EXPECT_EQ(sample(5), 32768u);
}

TEST(Config, ParseSerializeParseIsIdentity) {
  const RunConfig cfg = parse_run_config(kite_config());
  const std::string canonical = to_text(cfg);
  const RunConfig again = parse_run_config(canonical);
  EXPECT_EQ(to_text(again), canonical);
  EXPECT_EQ(cfg.name, "kite_strip");
  EXPECT_NEAR(cfg.k_max, 16 * kPi / 6, 1e-15);
  EXPECT_EQ(cfg.effective_truncation(), 16);
}

TEST(Config, ErrorsNameKeyAndLine) {
  try {
    parse_run_config(kite_config("[noise]\ndelta = abc\n"));
    FAIL() << "expected InvalidConfig";
  } catch (const InvalidConfig& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("noise.delta"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line"), std::string::npos) << msg;
  }

  // Zero-measure lattice is rejected at parse time.
  std::string bad = kite_config();
  const std::size_t pos = bad.find("hi = [3, 3]");
  ASSERT_NE(pos, std::string::npos);
  bad.replace(pos, 11, "hi = [-3, 3]");
  EXPECT_THROW(parse_run_config(bad), InvalidConfig);

  EXPECT_THROW(parse_run_config("[experiment]\nname = x\n"), InvalidConfig);
  EXPECT_THROW(ConfigMap::parse("key = 1\n"), InvalidConfig);        // key outside section
  EXPECT_THROW(ConfigMap::parse("[a]\nk = 1\nk = 2\n"), InvalidConfig);  // duplicate
}

TEST(Simulate, PaperDefaultWritesOneRecordWith31Rows) {
  const auto dir = fresh_dir("sim_single");
  const RunConfig cfg = parse_run_config(kite_config());
  const auto result = run_simulate(cfg, dir);
  ASSERT_EQ(result.files.size(), 1u);
  EXPECT_EQ(result.files[0], "kite_strip_dir0.csv");
  const auto data = io::parse_record_csv(io::read_text_file(dir / result.files[0]), "rec");
  EXPECT_EQ(data.wavenumbers.size(), 31u);
  EXPECT_TRUE(std::filesystem::exists(dir / "kite_strip_manifest.txt"));
}

TEST(Simulate, EightDirectionsWriteEightRecords) {
  const auto dir = fresh_dir("sim_eight");
  const RunConfig cfg = parse_run_config(
      kite_config("", "[0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875]"));
  const auto result = run_simulate(cfg, dir);
  EXPECT_EQ(result.files.size(), 8u);
  for (int j = 0; j < 8; ++j)
    EXPECT_TRUE(std::filesystem::exists(dir / ("kite_strip_dir" + std::to_string(j) + ".csv")));
}

TEST(Reconstruct, EmitsMetricsFieldAndHeatmap) {
  const auto dir = fresh_dir("recon");
  const RunConfig cfg = parse_run_config(kite_config());
  run_simulate(cfg, dir);
  const auto result = run_reconstruct(cfg, dir, dir);
  double contrast = 0.0;
  bool has_contrast = false;
  for (const auto& [key, value] : result.metrics)
    if (key == "strip_contrast") {
      contrast = value;
      has_contrast = true;
    }
  ASSERT_TRUE(has_contrast);
  EXPECT_GE(contrast, 10.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "kite_strip_field.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "kite_strip_field.pgm"));

  // Manifest lists each output with its checksum.
  const std::string manifest =
      io::read_text_file(dir / "kite_strip_reconstruct_manifest.txt");
  EXPECT_NE(manifest.find("kite_strip_field.csv"), std::string::npos);
  const std::string field_text = io::read_text_file(dir / "kite_strip_field.csv");
  EXPECT_NE(manifest.find(mfsi::detail::sha256_hex(field_text)), std::string::npos);
}

TEST(Reconstruct, MissingDataIsReported) {
  const auto dir = fresh_dir("recon_missing");
  const RunConfig cfg = parse_run_config(kite_config());
  EXPECT_THROW(run_reconstruct(cfg, dir, dir), IncompleteRecord);
}

TEST(Determinism, RerunningByteReproducesOutputs) {
  const RunConfig cfg =
      parse_run_config(kite_config("[noise]\ndelta = 0.05\nseed = 42\n", "[0.25, 0.5]"));
  const auto dir_a = fresh_dir("det_a");
  const auto dir_b = fresh_dir("det_b");
  run_simulate(cfg, dir_a);
  run_simulate(cfg, dir_b);
  const auto ra = run_reconstruct(cfg, dir_a, dir_a);
  const auto rb = run_reconstruct(cfg, dir_b, dir_b);
  std::vector<std::string> names;
  for (const auto& f : ra.files) names.push_back(f);
  names.push_back("kite_strip_dir0.csv");
  names.push_back("kite_strip_dir1.csv");
  for (const auto& name : names) {
    EXPECT_EQ(io::read_text_file(dir_a / name), io::read_text_file(dir_b / name)) << name;
  }
  for (std::size_t i = 0; i < ra.metrics.size(); ++i)
    EXPECT_EQ(ra.metrics[i].second, rb.metrics[i].second);
}

TEST(Extents, ReportsGroundTruthGeometry) {
  const RunConfig cfg = parse_run_config(kite_config());
  const auto values = run_extents(cfg);
  ASSERT_EQ(values.size(), 2u);
  EXPECT_EQ(values[0].first, "extent_dir0_low");
  const auto domain = cfg.make_domain();
  const auto e = geometry::directional_extent(domain, direction_from_angle_pi(0.25));
  EXPECT_DOUBLE_EQ(values[0].second, e.low);
  EXPECT_DOUBLE_EQ(values[1].second, e.high);
}

TEST(Reconstruct, NearFieldRunEmitsSlicesAndSurvivesNoise) {
  const auto dir = fresh_dir("recon_near");
  std::string text =
      "[experiment]\nname = cube_near\ndim = 3\n"
      "[domain]\nshape = cube\ncenter = [0, 0, 0]\nhalf_widths = [0.5, 0.5, 0.5]\n"
      "[source]\nspatial = quadratic_radial\nspatial_coeffs = [1, 1]\n"
      "temporal_coeffs = [1, 1]\nt_min = 0\nt_max = 0.1\n"
      "[band]\nk_min = 0\nk_max_pi = 2.6666666666666665\nn = 16\n"
      "[observations]\nkind = near\npoints = [1.5, 0, 0]\n"
      "[simulation]\nresolution = 24\n"
      "[lattice]\nlo = [-1.5, -1.5, -1.5]\nhi = [1.5, 1.5, 1.5]\ncounts = [21, 21, 21]\n"
      "[output]\npgm = 1\nslice_axes = [1]\nslice_coords = [0]\n"
      "[noise]\ndelta = 0.1\nseed = 3\n";
  const RunConfig cfg = parse_run_config(text);
  run_simulate(cfg, dir);
  const auto result = run_reconstruct(cfg, dir, dir);
  // The 10% noise run still completes and reports its (degraded) metrics.
  bool has_contrast = false;
  for (const auto& [key, value] : result.metrics)
    if (key == "annulus_contrast") {
      has_contrast = true;
      EXPECT_GT(value, 0.0);
    }
  EXPECT_TRUE(has_contrast);
  EXPECT_TRUE(std::filesystem::exists(dir / "cube_near_slice_ax1_0.pgm"));
}

TEST(Io, MatrixDebugDump) {
  Eigen::MatrixXcd m(2, 2);
  m << cplx(1, -2), cplx(0.5, 0), cplx(0, 3), cplx(-1, -1);
  EXPECT_EQ(io::matrix_csv(m), "1,-2,0.5,0\n0,3,-1,-1\n");
}

TEST(Config, ShippedConfigsAllParse) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(MFSI_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    SCOPED_TRACE(entry.path().string());
    EXPECT_NO_THROW(load_run_config(entry.path()));
    ++seen;
  }
  EXPECT_GE(seen, 7);
}

TEST(Validate, BuiltinCatalogPassesAndMismatchFails) {
  const auto dir = fresh_dir("validate_quick");
  ValidateOptions fast;
  fast.cases = {"kite_constant", "ball2d_offset_band"};
  const auto ok = run_validate(fast, dir);
  EXPECT_TRUE(ok.all_pass);
  EXPECT_TRUE(std::filesystem::exists(dir / "validation_report.txt"));
  EXPECT_TRUE(std::filesystem::exists(dir / "validation_residuals.csv"));

  ValidateOptions bad = fast;
  bad.inject_mismatch = true;
  const auto broken = run_validate(bad, fresh_dir("validate_broken"));
  EXPECT_FALSE(broken.all_pass);
  bool factorization_named = false;
  for (const auto& c : broken.checks)
    if (!c.pass && c.check == "factorization_residual") factorization_named = true;
  EXPECT_TRUE(factorization_named);

  ValidateOptions none;
  none.cases = {"no_such_case"};
  EXPECT_THROW(run_validate(none, fresh_dir("validate_none")), InvalidConfig);
}
