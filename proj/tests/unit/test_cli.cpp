#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sbinterp/cli.hpp"
#include "sbinterp/image_io.hpp"

namespace fs = std::filesystem;
using sbi::Image;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sbinterp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = sbi::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sbinterp_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Image fixture_crop(const char* name, int x0, int y0, int size) {
  return sbi::crop(sbi::load_image(fs::path(SBI_TEST_DATA_DIR) / "natural" / name), x0, y0, size, size);
}

struct CsvRow {
  std::string image;
  std::string method;
  double psnr;
};

std::vector<CsvRow> data_rows(const std::string& csv) {
  std::vector<CsvRow> rows;
  std::istringstream in(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      CHECK(line == "image,method,psnr_db");
      header_seen = true;
      continue;
    }
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    rows.push_back({line.substr(0, a), line.substr(a + 1, b - a - 1), std::stod(line.substr(b + 1))});
  }
  return rows;
}

}  // namespace

TEST_CASE("config overrides") {
  using sbi::cli::config_from_overrides;
  const auto cfg = config_from_overrides({"--lambda=0.5", "gamma=3", "--ar_layout=-1:0,0:-1", "--nl_group=4",
                                          "--pin_samples=false", "--g_step=literal", "--threads=2"});
  CHECK(cfg.lambda == 0.5);
  CHECK(cfg.gamma == 3.0);
  CHECK(cfg.ar.layout == sbi::NeighborLayout{{{-1, 0}, {0, -1}}});
  CHECK(cfg.nl.max_group == 4);
  CHECK_FALSE(cfg.pin_samples);
  CHECK(cfg.g_step == sbi::GStep::literal);
  CHECK(cfg.threads == 2u);

  CHECK_THROWS_AS(config_from_overrides({"--bogus=1"}), sbi::Error);
  CHECK_THROWS_AS(config_from_overrides({"--lambda"}), sbi::Error);
  CHECK_THROWS_AS(config_from_overrides({"--lambda=abc"}), sbi::Error);
  CHECK_THROWS_AS(config_from_overrides({"--max_iters=2.5"}), sbi::Error);
  CHECK_THROWS_AS(config_from_overrides({"--alpha=0"}), sbi::Error);
  CHECK_THROWS_AS(config_from_overrides({"--ar_layout=0:0"}), sbi::Error);
  CHECK_THROWS_AS(config_from_overrides({"--g_step=other"}), sbi::Error);
}

TEST_CASE("every echoed key round-trips through the override parser") {
  sbi::SolverConfig custom;
  custom.lambda = 0.125;
  custom.nl.epsilon = 123.5;
  custom.ar.window = 5;
  custom.cg.max_iters = 7;
  custom.zero_init = true;
  const auto entries = sbi::cli::config_entries(custom);
  std::vector<std::string> tokens;
  for (const auto& [k, v] : entries) {
    CHECK(k != "threads");
    tokens.push_back("--" + k + "=" + v);
  }
  CHECK(entries.size() == 24);
  const auto rebuilt = sbi::cli::config_from_overrides(tokens);
  CHECK(sbi::cli::config_entries(rebuilt) == entries);
}

TEST_CASE("interpolate command") {
  const fs::path dir = scratch_dir("interpolate");
  sbi::save_pgm(fixture_crop("camera.pgm", 200, 200, 24), dir / "lr.pgm");

  const auto first = run_cli({"interpolate", (dir / "lr.pgm").string(), (dir / "a.pgm").string(), "--max_iters=2"});
  REQUIRE(first.code == 0);
  const Image out = sbi::load_image(dir / "a.pgm");
  CHECK(out.width() == 48);
  CHECK(out.height() == 48);
  CHECK(first.out.find("data_residual") != std::string::npos);

  const auto second = run_cli({"interpolate", (dir / "lr.pgm").string(), (dir / "b.pgm").string(), "--max_iters=2"});
  REQUIRE(second.code == 0);
  CHECK(slurp(dir / "a.pgm") == slurp(dir / "b.pgm"));
  CHECK(first.out.substr(0, first.out.find("wrote")) == second.out.substr(0, second.out.find("wrote")));

  const fs::path missing = dir / "nope.pgm";
  const auto bad = run_cli({"interpolate", missing.string(), (dir / "c.pgm").string()});
  CHECK(bad.code != 0);
  CHECK(bad.err.find(missing.string()) != std::string::npos);

  const auto unknown = run_cli({"interpolate", (dir / "lr.pgm").string(), (dir / "d.pgm").string(), "--sigma=3"});
  CHECK(unknown.code != 0);
  CHECK(unknown.err.find("sigma") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "d.pgm"));

  CHECK(run_cli({"interpolate", (dir / "lr.pgm").string()}).code != 0);
  CHECK(run_cli({}).code != 0);
  CHECK(run_cli({"upscale", "a", "b"}).code != 0);
}

TEST_CASE("evaluate command") {
  const fs::path dir = scratch_dir("evaluate");
  sbi::save_pgm(Image(64, 64, 90.0), dir / "flat.pgm");
  const auto r = run_cli({"evaluate", (dir / "flat.pgm").string(), (dir / "flat.csv").string(), "--save-dir",
                          (dir / "recon").string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(dir / "flat.csv");
  CHECK(csv.rfind("# sbinterp evaluate\n# config: lambda=", 0) == 0);
  const auto rows = data_rows(csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "bicubic");
  CHECK(rows[1].method == "proposed");
  for (const auto& row : rows) {
    CHECK(row.image == "flat.pgm");
    CHECK(row.psnr == 99.0);
  }
  CHECK(fs::exists(dir / "recon" / "flat_bicubic.pgm"));
  CHECK(fs::exists(dir / "recon" / "flat_proposed.pgm"));

  sbi::save_pgm(Image(9, 8, 1.0), dir / "odd.pgm");
  const auto odd = run_cli({"evaluate", (dir / "odd.pgm").string(), (dir / "odd.csv").string()});
  CHECK(odd.code != 0);
  CHECK_FALSE(odd.err.empty());
}

TEST_CASE("benchmark command") {
  const fs::path dir = scratch_dir("benchmark");
  const fs::path images = dir / "images";
  fs::create_directories(images);
  sbi::save_pgm(fixture_crop("moon.pgm", 100, 100, 32), images / "c_moon.pgm");
  sbi::save_pgm(fixture_crop("coins.pgm", 60, 60, 32), images / "a_coins.pgm");
  sbi::save_pgm(fixture_crop("camera.pgm", 180, 220, 32), images / "b_camera.pgm");
  std::ofstream(images / "notes.txt") << "ignored";

  const auto first = run_cli({"benchmark", images.string(), (dir / "one.csv").string(), "--max_iters=2"});
  REQUIRE(first.code == 0);
  const auto second = run_cli({"benchmark", images.string(), (dir / "two.csv").string(), "--max_iters=2", "--threads=3"});
  REQUIRE(second.code == 0);
  CHECK(slurp(dir / "one.csv") == slurp(dir / "two.csv"));

  const auto rows = data_rows(slurp(dir / "one.csv"));
  REQUIRE(rows.size() == 3 * 2 + 2);
  const char* order[] = {"a_coins.pgm", "a_coins.pgm", "b_camera.pgm", "b_camera.pgm", "c_moon.pgm", "c_moon.pgm"};
  for (int i = 0; i < 6; ++i) CHECK(rows[static_cast<std::size_t>(i)].image == order[i]);
  for (const char* method : {"bicubic", "proposed"}) {
    double sum = 0.0;
    int count = 0;
    const CsvRow* avg = nullptr;
    for (const auto& row : rows) {
      if (row.method != method) continue;
      if (row.image == "Average") {
        avg = &row;
      } else {
        sum += row.psnr;
        ++count;
      }
    }
    CHECK(count == 3);
    REQUIRE(avg != nullptr);
    CHECK(std::abs(avg->psnr - sum / count) <= 1e-9);
  }
  CHECK(rows[6].image == "Average");
  CHECK(rows[7].image == "Average");

  const fs::path empty = dir / "empty";
  fs::create_directories(empty);
  const auto none = run_cli({"benchmark", empty.string(), (dir / "none.csv").string()});
  CHECK(none.code != 0);
  CHECK(none.err.find(empty.string()) != std::string::npos);
  CHECK(run_cli({"benchmark", (dir / "absent").string(), (dir / "x.csv").string()}).code != 0);
}

TEST_CASE("append_averages uses first-seen method order") {
  std::vector<sbi::cli::EvaluationRow> rows{{"a", "m2", 10.0}, {"a", "m1", 20.0}, {"b", "m2", 12.0}, {"b", "m1", 21.0}};
  sbi::cli::append_averages(rows);
  REQUIRE(rows.size() == 6);
  CHECK(rows[4].method == "m2");
  CHECK(rows[4].psnr_db == 11.0);
  CHECK(rows[5].method == "m1");
  CHECK(rows[5].psnr_db == 20.5);
}
