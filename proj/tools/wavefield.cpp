#include <clocale>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <locale>

#include "CLI11.hpp"
#include "json.hpp"
#include "wavefield/dataset.hpp"
#include "wavefield/experiments.hpp"
#include "wavefield/metrics.hpp"
#include "wavefield/models.hpp"
#include "wavefield/nn/checkpoint.hpp"
#include "wavefield/sparse_recovery.hpp"
#include "wavefield/training.hpp"

namespace fs = std::filesystem;
using namespace wavefield;

namespace {

#ifndef WAVEFIELD_MANIFEST_DIR
#define WAVEFIELD_MANIFEST_DIR "manifests"
#endif

std::vector<const nn::ParamBlock*> const_blocks(ChannelModel& m) {
  std::vector<const nn::ParamBlock*> out;
  for (const auto* p : m.parameters()) out.push_back(p);
  return out;
}

// Builds the model described by `dir`/model.cfg and loads its checkpoint.
std::unique_ptr<ChannelModel> load_trained(const fs::path& dir, const DatasetHeader& header, ModelConfig& cfg) {
  cfg = load_model_config((dir / "model.cfg").string());
  auto model = make_model(cfg, header.array(), header.grid());
  nn::load_checkpoint((dir / "model.wvfp").string(), model->parameters());
  return model;
}

struct Common {
  std::string config;
  std::uint64_t seed = 7;
  std::string out;
};

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  std::locale::global(std::locale::classic());
  std::cout.imbue(std::locale::classic());
  std::cerr.imbue(std::locale::classic());

  CLI::App app{"Location-to-channel mapping: data generation, training and evaluation"};
  app.require_subcommand(1);

  // gen
  Common gen_c;
  std::string gen_scene = "d1", gen_split = "train";
  std::size_t gen_na = 8, gen_ns = 8;
  double gen_side = 4.0, gen_density = 175.0, gen_spacing = 0.0;
  auto* gen = app.add_subcommand("gen", "Generate a train or test dataset");
  gen->add_option("--scene", gen_scene, "Built-in scene (d1, d2, d3) or scene file");
  gen->add_option("--config", gen_c.config, "Scene file (alias of --scene)");
  gen->add_option("--antennas", gen_na, "Na for built-in scenes");
  gen->add_option("--subcarriers", gen_ns, "Ns for built-in scenes");
  gen->add_option("--side", gen_side, "Receiver square side L (m) for built-in scenes");
  gen->add_option("--split", gen_split, "train or test")->check(CLI::IsMember({"train", "test"}));
  gen->add_option("--density", gen_density, "Train density (locations per m^2)");
  gen->add_option("--spacing", gen_spacing, "Test grid spacing (m); default lambda_r / 4");
  gen->add_option("--seed", gen_c.seed, "Sampling seed");
  gen->add_option("--out", gen_c.out, "Output dataset file")->required();

  // train
  Common train_c;
  std::string train_data, train_model = "mb-psia";
  TrainConfig tcfg;
  tcfg.seed = 7;
  std::size_t atoms = 0;
  auto* tr = app.add_subcommand("train", "Train a model on a dataset");
  tr->add_option("--data", train_data, "Training dataset")->required();
  tr->add_option("--config", train_c.config, "Model config file (key = value)");
  tr->add_option("--model", train_model, "Model kind when no config is given")
      ->check(CLI::IsMember({"mb-psia", "mb-u", "mlp", "rff-gaussian", "rff-mb"}));
  tr->add_option("--atoms", atoms, "Override the atom count D");
  tr->add_option("--epochs", tcfg.epochs);
  tr->add_option("--batch", tcfg.batch_size);
  tr->add_option("--lr", tcfg.lr);
  tr->add_option("--seed", train_c.seed, "Shuffle and init seed");
  tr->add_option("--out", train_c.out, "Output model directory")->required();

  // eval
  Common eval_c;
  std::string eval_data, eval_model;
  auto* ev = app.add_subcommand("eval", "NMSE of a trained model on a test dataset");
  ev->add_option("--data", eval_data, "Test dataset")->required();
  ev->add_option("--model", eval_model, "Model directory written by train")->required();
  ev->add_option("--config", eval_c.config, "Unused; accepted for a uniform interface");
  ev->add_option("--seed", eval_c.seed, "Unused");
  ev->add_option("--out", eval_c.out, "Report directory")->required();

  // omp
  Common omp_c;
  std::string omp_data;
  std::size_t omp_atoms = 256, omp_sparsity = 8, omp_stride = 1, omp_limit = 0;
  auto* omp = app.add_subcommand("omp", "Sparse decomposition of dataset channels at their own locations");
  omp->add_option("--data", omp_data, "Dataset whose records are used as references")->required();
  omp->add_option("--atoms", omp_atoms, "Dictionary size D");
  omp->add_option("--sparsity", omp_sparsity, "Maximum number of atoms L_p");
  omp->add_option("--stride", omp_stride, "Use every n-th record")->check(CLI::PositiveNumber);
  omp->add_option("--limit", omp_limit, "Maximum number of references (0 = all)");
  omp->add_option("--config", omp_c.config, "Unused");
  omp->add_option("--seed", omp_c.seed, "Unused");
  omp->add_option("--out", omp_c.out, "Output directory")->required();

  // spectrum
  Common spec_c;
  std::string spec_data, spec_model;
  std::size_t spec_antenna = 0, spec_sub = 0;
  bool spec_center = true;
  auto* sp = app.add_subcommand("spectrum", "Field and spatial spectrum maps over a test grid");
  sp->add_option("--data", spec_data, "Test grid dataset")->required();
  sp->add_option("--model", spec_model, "Model directory; ground truth when omitted");
  sp->add_option("--antenna", spec_antenna)->check([&](const std::string&) { spec_center = false; return ""; });
  sp->add_option("--subcarrier", spec_sub)->check([&](const std::string&) { spec_center = false; return ""; });
  sp->add_option("--config", spec_c.config, "Unused");
  sp->add_option("--seed", spec_c.seed, "Unused");
  sp->add_option("--out", spec_c.out, "Output directory")->required();

  // experiment
  Common exp_c;
  std::vector<std::string> exp_names;
  std::string data_dir = "data";
  bool paper_scale = false, no_generate = false, seed_given = false;
  auto* ex = app.add_subcommand("experiment", "Run experiments from the manifest");
  ex->add_option("names", exp_names, "Experiment names, or 'all'")->required();
  ex->add_option("--config", exp_c.config, "Manifest file (default: desk manifest)");
  ex->add_flag("--paper-scale", paper_scale, "Use the full-size manifest");
  ex->add_option("--data", data_dir, "Dataset cache directory");
  ex->add_flag("--no-generate", no_generate, "Fail instead of generating missing datasets");
  ex->add_option("--seed", exp_c.seed, "Override sampling and training seeds")
      ->check([&](const std::string&) { seed_given = true; return ""; });
  ex->add_option("--out", exp_c.out, "Artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const std::string scene = gen_c.config.empty() ? gen_scene : gen_c.config;
      const SceneSpec spec = resolve_scene(scene, gen_na, gen_ns, gen_side);
      const Dataset d = gen_split == "train" ? generate_train_set(spec, gen_density, gen_c.seed)
                                             : generate_test_set(spec, gen_spacing);
      write_dataset(gen_c.out, d);
      std::cout << "wrote " << d.records.size() << " records to " << gen_c.out << "\n";
    } else if (*tr) {
      const Dataset data = read_dataset(train_data);
      ModelConfig cfg;
      if (!train_c.config.empty()) cfg = load_model_config(train_c.config);
      else cfg.kind = parse_model_kind(train_model);
      if (train_c.config.empty()) cfg.seed = train_c.seed;
      if (atoms) cfg.mb.atoms = cfg.baseline.atoms = atoms;
      tcfg.seed = train_c.seed;
      TrainingData td = to_training_data(data, 1.0);
      cfg.output_gain = rms_gain(data);
      td.h /= cfg.output_gain;
      auto model = make_model(cfg, data.header.array(), data.header.grid());
      std::cerr << to_string(cfg.kind) << ": " << model->parameter_count() << " parameters\n";
      const TrainResult r = train(*model, td, tcfg, [](std::size_t e, double loss) {
        std::cerr << "epoch " << e + 1 << " loss " << format_number(loss) << "\n";
      });
      fs::create_directories(train_c.out);
      const fs::path out = train_c.out;
      save_model_config((out / "model.cfg").string(), cfg);
      nn::save_checkpoint((out / "model.wvfp").string(), const_blocks(*model));
      std::vector<std::vector<std::string>> rows;
      for (std::size_t e = 0; e < r.loss_curve.size(); ++e)
        rows.push_back({std::to_string(e + 1), format_number(r.loss_curve[e])});
      write_csv((out / "loss.csv").string(), {"epoch", "loss"}, rows);
      std::cout << "trained in " << format_number(r.seconds) << " s, final loss "
                << format_number(r.loss_curve.empty() ? 0.0 : r.loss_curve.back()) << "\n";
    } else if (*ev) {
      const Dataset test = read_dataset(eval_data);
      ModelConfig cfg;
      auto model = load_trained(eval_model, test.header, cfg);
      const TrainingData td = to_training_data(test, 1.0);
      const auto t0 = std::chrono::steady_clock::now();
      const Eigen::MatrixXcd pred = predict(*model, td.x, cfg.output_gain);
      EvalReport rep = nmse_report(td.h, pred, model->antennas());
      rep.param_count = model->parameter_count();
      const auto ratio = compression_ratio(model->antennas(), model->subcarriers(), td.x.cols(), rep.param_count);
      rep.compression_ratio = ratio.value();
      rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      fs::create_directories(eval_c.out);
      const fs::path out = eval_c.out;
      nlohmann::json j{{"nmse_db", rep.nmse_db},
                       {"per_frequency_db", rep.per_frequency_db},
                       {"per_antenna_db", rep.per_antenna_db},
                       {"params", rep.param_count},
                       {"compression_ratio", {{"numerator", ratio.numerator}, {"denominator", ratio.denominator}}},
                       {"seconds", rep.seconds}};
      std::ofstream(out / "report.json") << j.dump(2) << "\n";
      std::cout << "NMSE " << format_number(rep.nmse_db) << " dB over " << td.x.cols() << " locations\n";
    } else if (*omp) {
      const Dataset data = read_dataset(omp_data);
      const DictionaryBank bank = build_dictionary_bank(data.header.array(), data.header.grid(),
                                                        static_cast<Eigen::Index>(omp_atoms),
                                                        default_delay_range(data.header.side));
      std::vector<std::vector<std::string>> rows, summary;
      std::size_t used = 0;
      for (std::size_t n = 0; n < data.records.size(); n += omp_stride) {
        if (omp_limit && used == omp_limit) break;
        ++used;
        const auto& r = data.records[n];
        const SparseSolution sol = omp_decompose(r.channel, r.location, bank, omp_sparsity);
        const double rel = sol.residual_norm / r.channel.norm();
        for (std::size_t i = 0; i < sol.support.size(); ++i)
          rows.push_back({std::to_string(n), format_number(r.location.x()), format_number(r.location.y()),
                          std::to_string(sol.support[i]), format_number(sol.coefficients[i].real()),
                          format_number(sol.coefficients[i].imag())});
        summary.push_back({std::to_string(n), format_number(r.location.x()), format_number(r.location.y()),
                           std::to_string(sol.support.size()), format_number(rel),
                           std::to_string(sol.dropped.size())});
      }
      fs::create_directories(omp_c.out);
      const fs::path out = omp_c.out;
      write_csv((out / "omp_support.csv").string(), {"record", "x", "y", "atom", "coef_re", "coef_im"}, rows);
      write_csv((out / "omp_residual.csv").string(),
                {"record", "x", "y", "support_size", "relative_residual", "dropped"}, summary);
      std::cout << "decomposed " << used << " reference channels\n";
    } else if (*sp) {
      const Dataset test = read_dataset(spec_data);
      const TrainingData td = to_training_data(test, 1.0);
      const std::size_t na = test.header.antennas, ns = test.header.subcarriers;
      if (spec_center) {
        spec_antenna = na / 2;
        spec_sub = ns / 2;
      }
      Eigen::MatrixXcd field = td.h;
      if (!spec_model.empty()) {
        ModelConfig cfg;
        auto model = load_trained(spec_model, test.header, cfg);
        field = predict(*model, td.x, cfg.output_gain);
      }
      const GridField g = to_grid_field(td.x, field, na, spec_antenna, spec_sub);
      const Spectrum s = spatial_spectrum(g, test.header.grid().reference_wavelength());
      fs::create_directories(spec_c.out);
      const fs::path out = spec_c.out;
      write_pgm((out / "field.pgm").string(), g.field.real());
      write_pgm((out / "spectrum.pgm").string(), s.log_magnitude);
      write_csv((out / "spectrum.csv").string(), {"low_frequency_ratio", "peak_fx", "peak_fy", "bin_x", "bin_y"},
                {{format_number(s.low_frequency_ratio), format_number(s.peak_frequency.x()),
                  format_number(s.peak_frequency.y()), format_number(s.bin_x), format_number(s.bin_y)}});
      std::cout << "low-frequency energy ratio " << format_number(s.low_frequency_ratio) << "\n";
    } else if (*ex) {
      std::string manifest = exp_c.config;
      if (manifest.empty())
        manifest = std::string(WAVEFIELD_MANIFEST_DIR) + (paper_scale ? "/paper.ini" : "/desk.ini");
      ExperimentContext ctx;
      ctx.manifest = Manifest::load(manifest);
      if (seed_given) {
        ctx.manifest.set("common", "seed", std::to_string(exp_c.seed));
        ctx.manifest.set("common", "train_seed", std::to_string(exp_c.seed));
      }
      ctx.data_dir = data_dir;
      ctx.out_dir = exp_c.out;
      ctx.generate_missing = !no_generate;
      ctx.log = &std::cerr;
      if (exp_names.size() == 1 && exp_names[0] == "all") exp_names = ctx.manifest.experiments();
      for (const auto& name : exp_names) {
        const ExperimentOutcome o = run_experiment(name, ctx);
        std::cout << name << ": artifacts in " << o.artifacts.string() << "\n";
        for (const auto& [k, v] : o.summary) std::cout << "  " << k << " = " << format_number(v) << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
