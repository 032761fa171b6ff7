#include "wavefield/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "wavefield/nn/checkpoint.hpp"

namespace wavefield {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

double parse_double(const std::string& what, const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double v = 0.0;
  if (!(in >> v) || !(in >> std::ws).eof()) throw ExperimentError("bad number for " + what + ": " + text);
  return v;
}

void say(const ExperimentContext& ctx, const std::string& msg) {
  if (ctx.log) *ctx.log << msg << std::endl;
}

std::string fmt(double v) { return format_number(v); }

struct TestMatrices {
  Eigen::Matrix2Xd x;
  Eigen::MatrixXcd h;
};

TestMatrices test_matrices(const Dataset& test) {
  auto td = to_training_data(test, 1.0);
  return {std::move(td.x), std::move(td.h)};
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct FitOutput {
  RunRecord record;
  Eigen::MatrixXcd prediction;
};

// Trains one model on `train` (optionally on its lowest `train_subcarriers`
// frequencies) and evaluates it on the full `test` set. Writes the
// checkpoint and model config into `dir`.
FitOutput fit(const std::string& label, ModelConfig mcfg, const Dataset& train, const TestMatrices& test,
              const TrainConfig& tcfg, std::size_t train_subcarriers, const fs::path& dir,
              const ExperimentContext& ctx) {
  FitOutput out;
  RunRecord& rec = out.record;
  rec.label = label;
  rec.kind = mcfg.kind;

  const FrequencyGrid full = train.header.grid();
  const std::size_t ns_train = train_subcarriers ? train_subcarriers : full.size();
  TrainingData td = to_training_data(train, 1.0, ns_train);
  mcfg.output_gain = std::sqrt(td.h.squaredNorm() / static_cast<double>(td.h.size()));
  td.h /= mcfg.output_gain;

  auto model = make_model(mcfg, train.header.array(), full.lower(ns_train));
  const std::size_t params = model->parameter_count();
  say(ctx, "[" + label + "] " + to_string(mcfg.kind) + ", " + std::to_string(params) + " parameters, " +
               std::to_string(td.x.cols()) + " training locations");
  const std::size_t every = std::max<std::size_t>(1, tcfg.epochs / 10);
  rec.train = wavefield::train(*model, td, tcfg, [&](std::size_t epoch, double loss) {
    if ((epoch + 1) % every == 0 || epoch + 1 == tcfg.epochs)
      say(ctx, "[" + label + "] epoch " + std::to_string(epoch + 1) + " loss " + fmt(loss));
  });
  if (ns_train != full.size()) model->set_frequencies(full);

  const auto t0 = std::chrono::steady_clock::now();
  out.prediction = predict(*model, test.x, mcfg.output_gain);
  rec.eval = nmse_report(test.h, out.prediction, model->antennas());
  rec.eval.param_count = params;
  rec.ratio = compression_ratio(model->antennas(), model->subcarriers(), static_cast<std::uint64_t>(test.x.cols()),
                                params);
  rec.eval.compression_ratio = rec.ratio.value();
  rec.eval.seconds =
      rec.train.seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rec.train_count = static_cast<std::size_t>(td.x.cols());
  rec.test_count = static_cast<std::size_t>(test.x.cols());

  if (auto* mb = dynamic_cast<MBModel*>(model.get())) {
    const Eigen::Index n = std::min<Eigen::Index>(256, test.x.cols());
    const Eigen::Index stride = std::max<Eigen::Index>(1, test.x.cols() / n);
    Eigen::Matrix2Xd probe(2, n);
    for (Eigen::Index i = 0; i < n; ++i) probe.col(i) = test.x.col(i * stride);
    mb->forward(probe);
    std::vector<double> support;
    for (Eigen::Index i = 0; i < n; ++i)
      support.push_back(static_cast<double>(effective_support(mb->last_weights().col(i))));
    rec.median_support = median(support);
  }

  std::vector<const nn::ParamBlock*> blocks;
  for (const auto* p : model->parameters()) blocks.push_back(p);
  const fs::path ckpt = dir / (label + ".wvfp");
  nn::save_checkpoint(ckpt.string(), blocks);
  rec.checkpoint_bytes = fs::file_size(ckpt);
  rec.checkpoint_formula_bytes = nn::checkpoint_size(blocks);
  rec.model = mcfg;
  save_model_config((dir / (label + ".model")).string(), mcfg);
  say(ctx, "[" + label + "] test NMSE " + fmt(rec.eval.nmse_db) + " dB");
  return out;
}

Eigen::MatrixXd real_part(const Eigen::MatrixXcd& m) { return m.real(); }

// Field and spectrum maps at the central antenna and frequency. Returns the
// low-frequency ratio, or NaN when the test set is not a full grid.
double write_maps(const std::string& tag, const TestMatrices& test, const Eigen::MatrixXcd& channels,
                  std::size_t antennas, std::size_t subcarriers, double lambda, const fs::path& dir) {
  GridField g;
  try {
    g = to_grid_field(test.x, channels, antennas, antennas / 2, subcarriers / 2);
  } catch (const MetricError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const Spectrum s = spatial_spectrum(g, lambda);
  write_pgm((dir / ("field_" + tag + ".pgm")).string(), real_part(g.field));
  write_pgm((dir / ("spectrum_" + tag + ".pgm")).string(), s.log_magnitude);
  return s.low_frequency_ratio;
}

std::vector<std::string> run_row(const RunRecord& r) {
  return {r.label,
          to_string(r.kind),
          fmt(r.sweep),
          fmt(r.eval.nmse_db),
          std::to_string(r.eval.param_count),
          std::to_string(r.ratio.numerator) + "/" + std::to_string(r.ratio.denominator),
          fmt(r.ratio.value()),
          std::to_string(r.train_count),
          std::to_string(r.test_count),
          fmt(r.train.seconds),
          std::to_string(r.checkpoint_bytes),
          fmt(r.spectrum_ratio),
          fmt(r.median_support)};
}

const std::vector<std::string> kRunHeader{"label",      "model",         "sweep",          "nmse_db", "params",
                                          "ratio_exact", "compression_ratio", "train_count", "test_count",
                                          "train_seconds", "checkpoint_bytes", "spectrum_ratio", "median_support"};

void write_common_tables(const ExperimentOutcome& o, const fs::path& dir) {
  std::vector<std::vector<std::string>> rows, freq, ant, loss;
  for (const auto& r : o.runs) {
    rows.push_back(run_row(r));
    for (std::size_t k = 0; k < r.eval.per_frequency_db.size(); ++k)
      freq.push_back({r.label, std::to_string(k), fmt(r.eval.per_frequency_db[k])});
    for (std::size_t j = 0; j < r.eval.per_antenna_db.size(); ++j)
      ant.push_back({r.label, std::to_string(j), fmt(r.eval.per_antenna_db[j])});
    for (std::size_t e = 0; e < r.train.loss_curve.size(); ++e)
      loss.push_back({r.label, std::to_string(e + 1), fmt(r.train.loss_curve[e])});
  }
  write_csv((dir / "metrics.csv").string(), kRunHeader, rows);
  write_csv((dir / "per_frequency.csv").string(), {"label", "subcarrier", "nmse_db"}, freq);
  write_csv((dir / "per_antenna.csv").string(), {"label", "antenna", "nmse_db"}, ant);
  write_csv((dir / "loss.csv").string(), {"label", "epoch", "loss"}, loss);
}

struct Protocol {
  const ExperimentContext& ctx;
  const Manifest& m;
  std::string name;
  fs::path dir;

  DatasetRequest request(std::size_t na, std::size_t ns, Split split, double density) const {
    DatasetRequest r;
    r.scene = m.get(name, "scene");
    r.antennas = na;
    r.subcarriers = ns;
    r.side = m.number(name, "side");
    r.split = split;
    r.density = density;
    r.seed = m.integer(name, "seed");
    return r;
  }

  std::vector<ModelKind> models() const {
    std::vector<ModelKind> out;
    for (const auto& s : m.list(name, "models")) out.push_back(parse_model_kind(s));
    if (out.empty()) throw ExperimentError(name + ": empty model list");
    return out;
  }
};

ExperimentOutcome reconstruction(const Protocol& p) {
  ExperimentOutcome o;
  const std::size_t na = p.m.integer(p.name, "antennas"), ns = p.m.integer(p.name, "subcarriers");
  const Dataset train = obtain_dataset(p.request(na, ns, Split::Train, p.m.number(p.name, "density")), p.ctx);
  const TestMatrices test = test_matrices(obtain_dataset(p.request(na, ns, Split::Test, 0), p.ctx));
  const double lambda = train.header.grid().reference_wavelength();
  const double truth_ratio = write_maps("truth", test, test.h, na, ns, lambda, p.dir);
  o.summary["truth_spectrum_ratio"] = truth_ratio;
  for (const auto kind : p.models()) {
    const std::string label = to_string(kind);
    auto fitted = fit(label, model_config_from(p.m, p.name, kind), train, test, train_config_from(p.m, p.name), 0,
                      p.dir, p.ctx);
    fitted.record.spectrum_ratio = write_maps(label, test, fitted.prediction, na, ns, lambda, p.dir);
    o.summary["nmse_db." + label] = fitted.record.eval.nmse_db;
    o.summary["spectrum_ratio." + label] = fitted.record.spectrum_ratio;
    o.runs.push_back(std::move(fitted.record));
  }
  return o;
}

ExperimentOutcome density(const Protocol& p) {
  ExperimentOutcome o;
  const std::size_t na = p.m.integer(p.name, "antennas"), ns = p.m.integer(p.name, "subcarriers");
  const TestMatrices test = test_matrices(obtain_dataset(p.request(na, ns, Split::Test, 0), p.ctx));
  const auto kind = p.models().front();
  for (const double per_lambda2 : p.m.numbers(p.name, "densities")) {
    const double lambda = wavelength(p.m.has(p.name, "carrier") ? p.m.number(p.name, "carrier") : 3.5e9);
    const Dataset train = obtain_dataset(p.request(na, ns, Split::Train, density_per_m2(per_lambda2, lambda)), p.ctx);
    auto fitted = fit(to_string(kind) + "_density_" + fmt(per_lambda2), model_config_from(p.m, p.name, kind), train,
                      test, train_config_from(p.m, p.name), 0, p.dir, p.ctx);
    fitted.record.sweep = per_lambda2;
    o.summary["nmse_db@" + fmt(per_lambda2)] = fitted.record.eval.nmse_db;
    o.runs.push_back(std::move(fitted.record));
  }
  return o;
}

ExperimentOutcome frequency(const Protocol& p) {
  ExperimentOutcome o;
  const std::size_t na = p.m.integer(p.name, "antennas"), ns = p.m.integer(p.name, "subcarriers");
  if (ns < 2) throw ExperimentError(p.name + ": frequency generalization needs at least 2 subcarriers");
  const Dataset train = obtain_dataset(p.request(na, ns, Split::Train, p.m.number(p.name, "density")), p.ctx);
  const TestMatrices test = test_matrices(obtain_dataset(p.request(na, ns, Split::Test, 0), p.ctx));
  const std::size_t seen = ns / 2;
  std::vector<std::size_t> seen_idx, unseen_idx;
  for (std::size_t k = 0; k < ns; ++k) (k < seen ? seen_idx : unseen_idx).push_back(k);
  std::vector<std::vector<std::string>> rows;
  for (const auto kind : p.models()) {
    auto fitted = fit(to_string(kind), model_config_from(p.m, p.name, kind), train, test,
                      train_config_from(p.m, p.name), seen, p.dir, p.ctx);
    auto& r = fitted.record;
    r.seen_db = nmse_db(test.h, fitted.prediction, na, seen_idx);
    r.unseen_db = nmse_db(test.h, fitted.prediction, na, unseen_idx);
    for (std::size_t k = 0; k < ns; ++k)
      rows.push_back({r.label, std::to_string(k), fmt(train.header.frequencies[k]), k < seen ? "1" : "0",
                      fmt(nmse_db(test.h, fitted.prediction, na, {k}))});
    o.summary["seen_db." + r.label] = r.seen_db;
    o.summary["unseen_db." + r.label] = r.unseen_db;
    say(p.ctx, "[" + r.label + "] seen " + fmt(r.seen_db) + " dB, unseen " + fmt(r.unseen_db) + " dB");
    o.runs.push_back(std::move(r));
  }
  write_csv((p.dir / "frequency_split.csv").string(), {"label", "subcarrier", "frequency_hz", "seen", "nmse_db"},
            rows);
  return o;
}

ExperimentOutcome compression(const Protocol& p) {
  ExperimentOutcome o;
  const std::size_t na = p.m.integer(p.name, "antennas"), ns = p.m.integer(p.name, "subcarriers");
  const Dataset train = obtain_dataset(p.request(na, ns, Split::Train, p.m.number(p.name, "density")), p.ctx);
  const TestMatrices test = test_matrices(obtain_dataset(p.request(na, ns, Split::Test, 0), p.ctx));
  const auto kind = p.models().front();
  std::vector<std::vector<std::string>> rows;
  for (const double atoms : p.m.numbers(p.name, "atoms_sweep")) {
    ModelConfig cfg = model_config_from(p.m, p.name, kind);
    cfg.mb.atoms = cfg.baseline.atoms = static_cast<std::size_t>(atoms);
    auto fitted = fit(to_string(kind) + "_D" + fmt(atoms), cfg, train, test, train_config_from(p.m, p.name), 0,
                      p.dir, p.ctx);
    auto& r = fitted.record;
    r.sweep = atoms;
    rows.push_back({fmt(atoms), std::to_string(r.eval.param_count), std::to_string(r.test_count),
                    std::to_string(r.ratio.numerator) + "/" + std::to_string(r.ratio.denominator),
                    fmt(r.ratio.value()), fmt(r.eval.nmse_db), std::to_string(r.checkpoint_bytes),
                    std::to_string(r.checkpoint_formula_bytes)});
    o.summary["nmse_db@D" + fmt(atoms)] = r.eval.nmse_db;
    o.runs.push_back(std::move(r));
  }
  write_csv((p.dir / "rate_distortion.csv").string(),
            {"atoms", "params", "locations", "ratio_exact", "compression_ratio", "nmse_db", "checkpoint_bytes",
             "checkpoint_formula_bytes"},
            rows);
  return o;
}

ExperimentOutcome size_sweep(const Protocol& p, bool antennas) {
  ExperimentOutcome o;
  const std::string key = antennas ? "antennas_sweep" : "subcarriers_sweep";
  for (const double v : p.m.numbers(p.name, key)) {
    const std::size_t na = antennas ? static_cast<std::size_t>(v) : p.m.integer(p.name, "antennas");
    const std::size_t ns = antennas ? p.m.integer(p.name, "subcarriers") : static_cast<std::size_t>(v);
    const Dataset train = obtain_dataset(p.request(na, ns, Split::Train, p.m.number(p.name, "density")), p.ctx);
    const TestMatrices test = test_matrices(obtain_dataset(p.request(na, ns, Split::Test, 0), p.ctx));
    for (const auto kind : p.models()) {
      auto fitted = fit(to_string(kind) + (antennas ? "_Na" : "_Ns") + fmt(v), model_config_from(p.m, p.name, kind),
                        train, test, train_config_from(p.m, p.name), 0, p.dir, p.ctx);
      fitted.record.sweep = v;
      o.summary["nmse_db." + fitted.record.label] = fitted.record.eval.nmse_db;
      o.runs.push_back(std::move(fitted.record));
    }
  }
  return o;
}

}  // namespace

Manifest Manifest::parse(const std::string& text) {
  Manifest m;
  std::istringstream in(text);
  std::string line, section = "common";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ExperimentError("manifest line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ExperimentError("manifest line " + std::to_string(lineno) + ": empty section");
      if (!m.sections_.count(section) && section != "common") m.order_.push_back(section);
      m.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ExperimentError("manifest line " + std::to_string(lineno) + ": expected key = value");
    m.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return m;
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExperimentError("cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool Manifest::has(const std::string& section, const std::string& key) const {
  for (const auto& s : {section, std::string("common")}) {
    auto it = sections_.find(s);
    if (it != sections_.end() && it->second.count(key)) return true;
  }
  return false;
}

std::string Manifest::get(const std::string& section, const std::string& key) const {
  for (const auto& s : {section, std::string("common")}) {
    auto it = sections_.find(s);
    if (it == sections_.end()) continue;
    auto kv = it->second.find(key);
    if (kv != it->second.end()) return kv->second;
  }
  throw ExperimentError("manifest: missing key '" + key + "' for [" + section + "]");
}

double Manifest::number(const std::string& section, const std::string& key) const {
  return parse_double(key, get(section, key));
}

std::size_t Manifest::integer(const std::string& section, const std::string& key) const {
  const double v = number(section, key);
  if (v < 0 || v != std::floor(v)) throw ExperimentError("manifest: " + key + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::vector<std::string> Manifest::list(const std::string& section, const std::string& key) const {
  std::istringstream in(get(section, key));
  std::vector<std::string> out;
  for (std::string s; in >> s;) out.push_back(s);
  return out;
}

std::vector<double> Manifest::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : list(section, key)) out.push_back(parse_double(key, s));
  return out;
}

std::vector<std::string> Manifest::experiments() const { return order_; }

void Manifest::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!sections_.count(section) && section != "common") order_.push_back(section);
  sections_[section][key] = value;
}

std::string DatasetRequest::file_name() const {
  const std::string stem = fs::path(scene).stem().string();
  std::string name = stem + "_na" + std::to_string(antennas) + "_ns" + std::to_string(subcarriers) + "_L" +
                     format_number(side);
  if (split == Split::Train) name += "_train_d" + format_number(density) + "_s" + std::to_string(seed);
  else name += "_test";
  return name + ".wvfd";
}

std::string DatasetRequest::gen_command(const std::string& path) const {
  std::string cmd = "wavefield gen --scene " + scene + " --antennas " + std::to_string(antennas) +
                    " --subcarriers " + std::to_string(subcarriers) + " --side " + format_number(side);
  if (split == Split::Train) cmd += " --split train --density " + format_number(density) + " --seed " + std::to_string(seed);
  else cmd += " --split test";
  return cmd + " --out " + path;
}

Dataset obtain_dataset(const DatasetRequest& req, const ExperimentContext& ctx) {
  const fs::path path = ctx.data_dir / req.file_name();
  if (fs::exists(path)) {
    Dataset d = read_dataset(path.string());
    if (d.header.antennas != req.antennas || d.header.subcarriers != req.subcarriers || d.header.split != req.split)
      throw ExperimentError(path.string() + " does not match the requested Na/Ns/split");
    return d;
  }
  if (!ctx.generate_missing)
    throw MissingDataset("missing dataset " + path.string() + "; generate it with: " + req.gen_command(path.string()));
  say(ctx, "generating " + path.string());
  const SceneSpec spec = resolve_scene(req.scene, req.antennas, req.subcarriers, req.side);
  Dataset d = req.split == Split::Train ? generate_train_set(spec, req.density, req.seed) : generate_test_set(spec);
  fs::create_directories(ctx.data_dir);
  const fs::path tmp = path.string() + ".partial";
  write_dataset(tmp.string(), d);
  fs::rename(tmp, path);
  return d;
}

ModelConfig model_config_from(const Manifest& m, const std::string& section, ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.seed = m.integer(section, "model_seed");
  c.mb.atoms = m.integer(section, "atoms");
  c.mb.t1 = m.integer(section, "t1");
  c.mb.t2 = m.integer(section, "t2");
  c.mb.t3 = m.integer(section, "t3");
  c.mb.t4 = m.integer(section, "t4");
  c.mb.t5 = m.integer(section, "t5");
  c.mb.t6 = m.integer(section, "t6");
  if (m.has(section, "ponderation")) c.mb.ponderation = parse_ponderation(m.get(section, "ponderation"));
  c.baseline.width = m.integer(section, "width");
  c.baseline.atoms = m.integer(section, "rff_atoms");
  if (m.has(section, "sigma")) c.baseline.sigma = m.number(section, "sigma");
  return c;
}

TrainConfig train_config_from(const Manifest& m, const std::string& section) {
  TrainConfig t;
  t.epochs = m.integer(section, "epochs");
  t.batch_size = m.integer(section, "batch");
  t.lr = m.number(section, "lr");
  t.seed = m.integer(section, "train_seed");
  return t;
}

ExperimentOutcome run_experiment(const std::string& name, const ExperimentContext& ctx) {
  const auto& exps = ctx.manifest.experiments();
  if (std::find(exps.begin(), exps.end(), name) == exps.end())
    throw ExperimentError("unknown experiment '" + name + "'");
  const std::string protocol = ctx.manifest.get(name, "protocol");

  fs::create_directories(ctx.out_dir);
  const fs::path final_dir = ctx.out_dir / name;
  const fs::path tmp = ctx.out_dir / ("." + name + ".partial");
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  Protocol p{ctx, ctx.manifest, name, tmp};

  ExperimentOutcome o;
  try {
    say(ctx, "== experiment " + name + " (" + protocol + ")");
    if (protocol == "reconstruction") o = reconstruction(p);
    else if (protocol == "density") o = density(p);
    else if (protocol == "frequency") o = frequency(p);
    else if (protocol == "compression") o = compression(p);
    else if (protocol == "antennas") o = size_sweep(p, true);
    else if (protocol == "subcarriers") o = size_sweep(p, false);
    else throw ExperimentError("unknown protocol '" + protocol + "'");
    o.name = name;
    o.protocol = protocol;
    write_common_tables(o, tmp);
    std::ofstream(tmp / "report.json") << outcome_json(o) << "\n";
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  fs::remove_all(final_dir);
  fs::rename(tmp, final_dir);
  o.artifacts = final_dir;
  return o;
}

std::string outcome_json(const ExperimentOutcome& o) {
  using nlohmann::json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["experiment"] = o.name;
  j["protocol"] = o.protocol;
  json summary = json::object();
  for (const auto& [k, v] : o.summary) summary[k] = num(v);
  j["summary"] = summary;
  json runs = json::array();
  for (const auto& r : o.runs) {
    json s;
    s["label"] = r.label;
    s["model"] = to_string(r.kind);
    s["sweep"] = r.sweep;
    s["nmse_db"] = num(r.eval.nmse_db);
    s["per_frequency_db"] = r.eval.per_frequency_db;
    s["per_antenna_db"] = r.eval.per_antenna_db;
    s["params"] = r.eval.param_count;
    s["compression_ratio"] = {{"numerator", r.ratio.numerator}, {"denominator", r.ratio.denominator},
                              {"value", r.ratio.value()}};
    s["train_count"] = r.train_count;
    s["test_count"] = r.test_count;
    s["train_seconds"] = r.train.seconds;
    s["steps"] = r.train.steps;
    s["final_loss"] = r.train.loss_curve.empty() ? json(nullptr) : num(r.train.loss_curve.back());
    s["checkpoint_bytes"] = r.checkpoint_bytes;
    s["checkpoint_formula_bytes"] = r.checkpoint_formula_bytes;
    s["spectrum_ratio"] = num(r.spectrum_ratio);
    s["seen_db"] = num(r.seen_db);
    s["unseen_db"] = num(r.unseen_db);
    s["median_support"] = num(r.median_support);
    runs.push_back(s);
  }
  j["runs"] = runs;
  return j.dump(2);
}

}  // namespace wavefield
