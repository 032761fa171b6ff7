#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wavefield/experiments.hpp"

using namespace wavefield;
namespace fs = std::filesystem;

namespace {

const char* kTinyManifest = R"(
# tiny matrix
side = 1
density = 60
seed = 3
train_seed = 3
model_seed = 1
epochs = 2
batch = 32
lr = 1e-3
atoms = 8
t1 = 8
t2 = 4
t3 = 4
t4 = 8
t5 = 4
t6 = 4
width = 8
rff_atoms = 8
scene = d1
antennas = 2
subcarriers = 4
models = mb-psia

[recon]
protocol = reconstruction
models = mb-psia mb-u mlp rff-gaussian rff-mb

[dens]
protocol = density
densities = 0.1 0.5

[freq]
protocol = frequency

[comp]
protocol = compression
atoms_sweep = 4 8

[ant]
protocol = antennas
antennas_sweep = 2 4

[sub]
protocol = subcarriers
subcarriers_sweep = 2 4
)";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wvf_exp_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(WAVEFIELD_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("manifest parsing") {
  const Manifest m = Manifest::parse(kTinyManifest);
  CHECK(m.experiments() == std::vector<std::string>{"recon", "dens", "freq", "comp", "ant", "sub"});
  CHECK(m.get("recon", "protocol") == "reconstruction");
  CHECK(m.get("dens", "models") == "mb-psia");
  CHECK(m.integer("comp", "antennas") == 2);
  CHECK(m.numbers("comp", "atoms_sweep") == std::vector<double>{4, 8});
  CHECK(m.list("recon", "models").size() == 5);
  CHECK(m.number("freq", "lr") == 1e-3);
  CHECK_FALSE(m.has("freq", "sigma"));
  CHECK_THROWS_AS(m.get("freq", "sigma"), ExperimentError);
  CHECK_THROWS_AS(Manifest::parse("[broken\n"), ExperimentError);
  CHECK_THROWS_AS(Manifest::parse("novalue\n"), ExperimentError);

  const ModelConfig mc = model_config_from(m, "recon", ModelKind::MBU);
  CHECK(mc.mb.atoms == 8);
  CHECK(mc.mb.t4 == 8);
  CHECK(mc.kind == ModelKind::MBU);
  const TrainConfig tc = train_config_from(m, "recon");
  CHECK(tc.epochs == 2);
  CHECK(tc.batch_size == 32);
}

TEST_CASE("missing datasets name the generation command") {
  ExperimentContext ctx;
  ctx.manifest = Manifest::parse(kTinyManifest);
  ctx.data_dir = scratch("nodata");
  ctx.out_dir = scratch("noout");
  ctx.generate_missing = false;
  try {
    run_experiment("freq", ctx);
    FAIL("expected MissingDataset");
  } catch (const MissingDataset& e) {
    const std::string msg = e.what();
    CHECK(msg.find("wavefield gen") != std::string::npos);
    CHECK(msg.find("--scene d1") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(ctx.out_dir / "freq"));
  CHECK_FALSE(fs::exists(ctx.out_dir / ".freq.partial"));
  CHECK_THROWS_AS(run_experiment("nope", ctx), ExperimentError);
}

TEST_CASE("every protocol writes its artifacts") {
  ExperimentContext ctx;
  ctx.manifest = Manifest::parse(kTinyManifest);
  ctx.data_dir = scratch("data");
  ctx.out_dir = scratch("out");
  for (const auto& name : ctx.manifest.experiments()) {
    CAPTURE(name);
    const ExperimentOutcome o = run_experiment(name, ctx);
    const fs::path dir = ctx.out_dir / name;
    CHECK(o.artifacts == dir);
    CHECK_FALSE(fs::exists(ctx.out_dir / ("." + name + ".partial")));
    for (const char* f : {"metrics.csv", "per_frequency.csv", "per_antenna.csv", "loss.csv", "report.json"})
      CHECK(fs::exists(dir / f));
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["experiment"] == name);
    CHECK(report["runs"].size() == o.runs.size());
    for (const auto& r : o.runs) {
      CHECK(fs::exists(dir / (r.label + ".wvfp")));
      CHECK(fs::exists(dir / (r.label + ".model")));
      CHECK(r.checkpoint_bytes == r.checkpoint_formula_bytes);
      CHECK(std::isfinite(r.eval.nmse_db));
      CHECK(r.train.loss_curve.size() == 2);
    }
    if (o.protocol == "reconstruction") {
      CHECK(o.runs.size() == 5);
      CHECK(fs::exists(dir / "field_truth.pgm"));
      CHECK(fs::exists(dir / "spectrum_mb-psia.pgm"));
      CHECK(o.summary.count("truth_spectrum_ratio"));
    }
    if (o.protocol == "frequency") {
      CHECK(fs::exists(dir / "frequency_split.csv"));
      CHECK(std::isfinite(o.runs[0].unseen_db));
    }
    if (o.protocol == "compression") {
      CHECK(fs::exists(dir / "rate_distortion.csv"));
      const auto& r = o.runs[0];
      CHECK(r.ratio.numerator * r.eval.param_count == 2 * 2 * 4 * r.test_count * r.ratio.denominator);
    }
    if (o.protocol == "density") CHECK(o.runs[0].train_count < o.runs[1].train_count);
  }
  // cached datasets are reused
  const auto files = std::distance(fs::directory_iterator(ctx.data_dir), fs::directory_iterator{});
  run_experiment("recon", ctx);
  CHECK(std::distance(fs::directory_iterator(ctx.data_dir), fs::directory_iterator{}) == files);
}

TEST_CASE("identical runs give identical tables") {
  ExperimentContext ctx;
  ctx.manifest = Manifest::parse(kTinyManifest);
  ctx.data_dir = scratch("repdata");
  ctx.out_dir = scratch("rep1");
  run_experiment("comp", ctx);
  const std::string first = slurp(ctx.out_dir / "comp" / "rate_distortion.csv");
  ctx.out_dir = scratch("rep2");
  run_experiment("comp", ctx);
  CHECK(slurp(ctx.out_dir / "comp" / "rate_distortion.csv") == first);
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  const fs::path log = dir / "log.txt";
  const std::string d = dir.string();
  CHECK(run_cli("gen --scene d1 --antennas 2 --subcarriers 4 --side 1 --split train --density 40 --seed 2 --out " + d +
                    "/train.wvfd",
                log) == 0);
  CHECK(run_cli("gen --scene d1 --antennas 2 --subcarriers 4 --side 1 --split test --out " + d + "/test.wvfd", log) ==
        0);
  CHECK(run_cli("train --data " + d + "/train.wvfd --model mb-u --atoms 8 --epochs 2 --batch 16 --out " + d + "/m",
                log) == 0);
  CHECK(fs::exists(dir / "m" / "model.wvfp"));
  CHECK(fs::exists(dir / "m" / "model.cfg"));
  CHECK(fs::exists(dir / "m" / "loss.csv"));
  CHECK(run_cli("eval --data " + d + "/test.wvfd --model " + d + "/m --out " + d + "/ev", log) == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "ev" / "report.json"));
  CHECK(report.contains("nmse_db"));
  CHECK(run_cli("omp --data " + d + "/test.wvfd --atoms 16 --sparsity 3 --limit 5 --out " + d + "/omp", log) == 0);
  CHECK(fs::exists(dir / "omp" / "omp_support.csv"));
  CHECK(run_cli("spectrum --data " + d + "/test.wvfd --model " + d + "/m --out " + d + "/sp", log) == 0);
  CHECK(fs::exists(dir / "sp" / "spectrum.pgm"));

  fs::remove(dir / "m" / "model.wvfp");
  CHECK(run_cli("eval --data " + d + "/test.wvfd --model " + d + "/m --out " + d + "/ev2", log) != 0);
  CHECK(run_cli("train --data " + d + "/missing.wvfd --model mlp --out " + d + "/x", log) != 0);
  CHECK(run_cli("frobnicate", log) != 0);

  std::ofstream(dir / "m.ini") << kTinyManifest;
  CHECK(run_cli("experiment freq --config " + d + "/m.ini --data " + d + "/nodata --no-generate --out " + d + "/e",
                log) != 0);
  CHECK(slurp(log).find("wavefield gen") != std::string::npos);
  CHECK(run_cli("experiment freq --config " + d + "/m.ini --data " + d + "/data --out " + d + "/e", log) == 0);
  CHECK(fs::exists(dir / "e" / "freq" / "frequency_split.csv"));
}
