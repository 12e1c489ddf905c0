#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "digest.hpp"
#include "lnop/data/dataset.hpp"
#include "lnop/data/generators.hpp"
#include "lnop/error.hpp"
#include "lnop/io/binary.hpp"
#include "lnop/model/superres.hpp"
#include "lnop/train/bench.hpp"
#include "lnop/train/config.hpp"
#include "lnop/train/evaluate.hpp"
#include "lnop/train/trainer.hpp"
#include "lnop/verify/suites.hpp"

namespace lnop::cli {
namespace {

template <class T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

std::string extents_string(const Shape& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "x" : "") + std::to_string(s[i]);
  return out;
}

void print_table(const EvalTable& table, std::ostream& out) {
  for (const auto& r : table.rows) {
    out << "  res " << std::setw(5) << r.resolution << "  grid " << extents_string(r.extents) << "  "
        << std::setw(16) << std::left << r.pipeline << std::right << "  rel L2 " << std::fixed
        << std::setprecision(4) << r.rel_l2_percent << " %\n";
    out.unsetf(std::ios::fixed);
  }
}

}  // namespace

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) {
    if (*flag == 0) throw ConfigError("--threads must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("LNOP_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string("LNOP_THREADS must be a positive integer, got '") + env + "'");
    return static_cast<unsigned>(v);
  }
  return 1;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const ModeError*>(&e) || dynamic_cast<const ResolutionError*>(&e) ||
      dynamic_cast<const ContractError*>(&e)) {
    return 1;
  }
  if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 3;
  return 2;
}

int run_gen(const GenOptions& o, unsigned threads, std::ostream& out) {
  nlohmann::json j = nlohmann::json::object();
  if (o.config) {
    try {
      j = nlohmann::json::parse(io::read_text(*o.config));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("generator config '" + *o.config + "' is not valid JSON: " + e.what());
    }
  }
  j["family"] = o.family;
  put(j, "resolution", o.res);
  put(j, "count", o.count);
  put(j, "seed", o.seed);
  put(j, "refine", o.refine);
  put(j, "nu", o.nu);
  put(j, "t", o.t);
  put(j, "dt", o.dt);
  put(j, "history", o.history);
  put(j, "horizon", o.horizon);
  put(j, "reynolds", o.reynolds);
  put(j, "kolmogorov_n", o.kolmogorov_n);
  put(j, "burn_in", o.burn_in);
  put(j, "pairs_per_trajectory", o.pairs);
  const GeneratorConfig cfg = GeneratorConfig::from_json(j);
  const PdeDataset ds = generate_dataset(cfg, threads);
  dataset_write(o.out, ds);
  out << "wrote " << ds.samples.size() << " " << ds.name << " samples on grid " << extents_string(ds.grid.extents)
      << " (" << ds.in_channels << " -> " << ds.out_channels << " channels) to " << o.out << "\n";
  out << "sha256 " << sha256_file(o.out) << "  " << o.out << "\n";
  return 0;
}

int run_train(const TrainOptions& o, unsigned threads, std::ostream& out) {
  std::vector<std::string> overrides;
  if (o.data) overrides.push_back("data.train=" + nlohmann::json(*o.data).dump());
  if (o.test) overrides.push_back("data.test=" + nlohmann::json(*o.test).dump());
  if (o.arch) overrides.push_back("model.arch=" + nlohmann::json(*o.arch).dump());
  if (o.out) overrides.push_back("output.dir=" + nlohmann::json(*o.out).dump());
  if (o.epochs) overrides.push_back("optim.epochs=" + std::to_string(*o.epochs));
  if (o.batch_size) overrides.push_back("optim.batch_size=" + std::to_string(*o.batch_size));
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  if (o.lr) {
    std::ostringstream lr;
    lr << std::setprecision(17) << *o.lr;
    overrides.push_back("optim.lr=" + lr.str());
  }
  overrides.insert(overrides.end(), o.set.begin(), o.set.end());
  std::optional<std::filesystem::path> file;
  if (o.config) file = *o.config;
  const TrainConfig cfg = load_train_config(file, overrides);
  const auto result = train(cfg, threads);
  const auto& r = result.report;
  out << "trained " << to_string(cfg.model.arch) << " for " << r.epochs << " epochs: train loss "
      << r.train_loss.front() << " -> " << r.train_loss.back() << ", " << r.total_params << " parameters\n";
  print_table(r.final_eval, out);
  if (cfg.output.dir.empty()) {
    out << r.to_json().dump(2) << "\n";
  } else {
    out << "report: " << (std::filesystem::path(cfg.output.dir) / "report.json").string() << "\n";
  }
  return 0;
}

int run_eval(const EvalOptions& o, bool superres, unsigned threads, std::ostream& out) {
  const OperatorModel model = load_checkpoint(o.model);
  PdeDataset data = dataset_read(o.data);
  if (o.n) data = take(data, 0, o.n);
  std::vector<std::size_t> res = o.resolutions;
  if (res.empty()) {
    if (superres) throw ConfigError("superres needs --resolutions");
    res.push_back(model.config().dims.front());
  }
  const EvalTable table = evaluate(model, data, res, threads);
  print_table(table, out);
  if (superres) out << table.to_csv();
  const nlohmann::json report{{"kind", superres ? "superres" : "eval"},
                              {"model_path", o.model},
                              {"data_path", o.data},
                              {"samples", data.samples.size()},
                              {"model", model.config().to_json()},
                              {"test_rel_l2", table.to_json()},
                              {"version", version_stamp()},
                              {"machine", machine_descriptor()}};
  if (o.out) io::write_text(*o.out, report.dump(2) + "\n");
  if (o.csv) io::write_text(*o.csv, table.to_csv());
  return 0;
}

int run_bench(const BenchOptions& o, std::ostream& out) {
  const PdeDataset data = dataset_read(o.data);
  std::vector<ModelConfig> configs;
  for (const auto& a : o.archs) {
    ModelConfig m;
    m.arch = parse_architecture(a);
    m.in_channels = data.in_channels;
    m.out_channels = data.out_channels;
    m.width = o.width;
    m.dims = data.grid.extents;
    if (o.modes.size() == 1) {
      m.modes.assign(m.dims.size(), o.modes[0]);
    } else {
      m.modes.assign(o.modes.begin(), o.modes.end());
    }
    m.blocks = o.blocks;
    m.seed = o.seed;
    m.validate();
    configs.push_back(m);
  }
  lnop::BenchOptions bo;
  bo.warmup_epochs = o.warmup;
  bo.timed_epochs = o.epochs;
  bo.batch_size = o.batch_size;
  bo.max_samples = o.samples;
  const BenchReport report = bench(configs, data, bo);
  out << "arch        M(forward)  R(mix)   N(inverse)  W      transform  total      median s/epoch\n";
  for (const auto& e : report.entries) {
    out << std::left << std::setw(12) << to_string(e.model.arch) << std::right << std::setw(10) << e.per_block.forward
        << std::setw(10) << e.per_block.mix << std::setw(10) << e.per_block.inverse << std::setw(8)
        << e.per_block.channel << std::setw(11) << e.per_block.transform_total() << std::setw(10) << e.total_params
        << "  " << e.median_epoch_seconds << "\n";
  }
  const auto& m = configs.front();
  out << "fourier - learnable per block (d_v^2 prod k - 2 sum d k): "
      << fourier_minus_learnable(m.width, m.dims, m.modes) << "\n";
  if (o.out) io::write_text(*o.out, report.to_json().dump(2) + "\n");
  return 0;
}

int run_verify(const VerifyOptions& o, std::ostream& out) {
  verify::SuiteOptions so;
  so.negative_control = o.negative_control;
  so.instances = o.instances;
  const auto names = o.suites.empty() ? verify::suite_names() : o.suites;
  bool ok = true;
  for (const auto& n : names) {
    const auto r = verify::run_suite(n, so);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  out << "verify: " << (ok ? "all suites passed" : "FAILED") << "\n";
  return ok ? 0 : 2;
}

int run_report(const ReportOptions& o, std::ostream& out) {
  nlohmann::json r;
  try {
    r = nlohmann::json::parse(io::read_text(o.in));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("report '" + o.in + "' is not valid JSON: " + e.what());
  }
  try {
    if (r.contains("train_loss")) {
      const auto& loss = r.at("train_loss");
      out << "epochs " << r.at("epochs").get<std::size_t>() << ", train loss " << loss.front().get<double>() << " -> "
          << loss.back().get<double>() << ", seed " << r.at("seed").get<std::uint64_t>() << "\n";
      out << "parameters " << r.at("param_counts").at("total").get<std::size_t>() << "\n";
    }
    const auto& rows = r.contains("final_eval") ? r.at("final_eval") : r.at("test_rel_l2");
    EvalTable table;
    for (const auto& row : rows) {
      table.rows.push_back({row.at("resolution").get<std::size_t>(), row.at("extents").get<Shape>(),
                            row.at("ratio").get<Shape>(), row.at("pipeline").get<std::string>(),
                            row.at("rel_l2_percent").get<double>()});
    }
    print_table(table, out);
    if (o.csv) io::write_text(*o.csv, table.to_csv());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("report '" + o.in + "' lacks expected fields: " + e.what());
  }
  return 0;
}

}  // namespace lnop::cli
