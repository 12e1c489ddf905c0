#include "lnop/train/config.hpp"

#include "lnop/error.hpp"
#include "lnop/io/binary.hpp"

namespace lnop {
namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads j[key] into out and records the key as consumed.
template <class T>
void read(const nlohmann::json& j, const std::string& path, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + join(path, key) + "' has the wrong type: " + j.at(key).dump());
  }
}

void reject_unknown(const nlohmann::json& j, const std::string& path, std::initializer_list<const char*> known) {
  if (!j.is_object()) throw ConfigError("config section '" + path + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown config key '" + join(path, key) + "'");
  }
}

}  // namespace

std::string to_string(LossKind loss) { return loss == LossKind::relative_l2 ? "relative_l2" : "mse"; }

LossKind parse_loss_kind(const std::string& name) {
  if (name == "relative_l2") return LossKind::relative_l2;
  if (name == "mse") return LossKind::mse;
  throw ConfigError("unknown loss '" + name + "' (expected relative_l2|mse)");
}

void TrainConfig::validate() const {
  if (data.train.empty()) throw ConfigError("config key 'data.train' must name a dataset");
  if (optim.epochs < 1) throw ConfigError("config key 'optim.epochs' must be >= 1");
  if (!(optim.lr >= 0.0)) throw ConfigError("config key 'optim.lr' must be >= 0");
  if (optim.schedule_period < 1) throw ConfigError("config key 'optim.schedule_period' must be >= 1");
  if (!(optim.schedule_factor > 0.0)) throw ConfigError("config key 'optim.schedule_factor' must be > 0");
  if (optim.eval_every < 1) throw ConfigError("config key 'optim.eval_every' must be >= 1");
  if (model.width < 1) throw ConfigError("config key 'model.width' must be >= 1");
  if (model.blocks < 1) throw ConfigError("config key 'model.blocks' must be >= 1");
  if (model.modes.empty()) throw ConfigError("config key 'model.modes' must list at least one k");
  if (data.test.empty() && data.n_test == 0) {
    throw ConfigError("config needs 'data.test' or a held-out 'data.n_test' > 0");
  }
}

nlohmann::json TrainConfig::to_json() const {
  return {{"data",
           {{"train", data.train},
            {"test", data.test},
            {"n_train", data.n_train},
            {"n_test", data.n_test},
            {"resolution", data.resolution},
            {"eval_resolutions", data.eval_resolutions}}},
          {"model",
           {{"arch", to_string(model.arch)},
            {"width", model.width},
            {"modes", model.modes},
            {"blocks", model.blocks},
            {"positional_encoding", model.positional_encoding},
            {"mix_init", to_string(model.mix_init)}}},
          {"optim",
           {{"epochs", optim.epochs},
            {"batch_size", optim.batch_size},
            {"lr", optim.lr},
            {"schedule_period", optim.schedule_period},
            {"schedule_factor", optim.schedule_factor},
            {"loss", to_string(optim.loss)},
            {"eval_every", optim.eval_every}}},
          {"seed", seed},
          {"output", {{"dir", output.dir}, {"checkpoint", output.checkpoint}}}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  reject_unknown(j, "", {"data", "model", "optim", "seed", "output"});
  if (j.contains("data")) {
    const auto& d = j.at("data");
    reject_unknown(d, "data", {"train", "test", "n_train", "n_test", "resolution", "eval_resolutions"});
    read(d, "data", "train", c.data.train);
    read(d, "data", "test", c.data.test);
    read(d, "data", "n_train", c.data.n_train);
    read(d, "data", "n_test", c.data.n_test);
    read(d, "data", "resolution", c.data.resolution);
    read(d, "data", "eval_resolutions", c.data.eval_resolutions);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    reject_unknown(m, "model", {"arch", "width", "modes", "blocks", "positional_encoding", "mix_init"});
    std::string arch = to_string(c.model.arch), mix = to_string(c.model.mix_init);
    read(m, "model", "arch", arch);
    read(m, "model", "mix_init", mix);
    c.model.arch = parse_architecture(arch);
    c.model.mix_init = parse_mix_init(mix);
    read(m, "model", "width", c.model.width);
    if (m.contains("modes") && m.at("modes").is_number_unsigned()) {
      c.model.modes = {m.at("modes").get<std::size_t>()};
    } else {
      read(m, "model", "modes", c.model.modes);
    }
    read(m, "model", "blocks", c.model.blocks);
    read(m, "model", "positional_encoding", c.model.positional_encoding);
  }
  if (j.contains("optim")) {
    const auto& o = j.at("optim");
    reject_unknown(o, "optim",
                   {"epochs", "batch_size", "lr", "schedule_period", "schedule_factor", "loss", "eval_every"});
    read(o, "optim", "epochs", c.optim.epochs);
    read(o, "optim", "batch_size", c.optim.batch_size);
    read(o, "optim", "lr", c.optim.lr);
    read(o, "optim", "schedule_period", c.optim.schedule_period);
    read(o, "optim", "schedule_factor", c.optim.schedule_factor);
    std::string loss = to_string(c.optim.loss);
    read(o, "optim", "loss", loss);
    c.optim.loss = parse_loss_kind(loss);
    read(o, "optim", "eval_every", c.optim.eval_every);
  }
  read(j, "", "seed", c.seed);
  if (j.contains("output")) {
    const auto& o = j.at("output");
    reject_unknown(o, "output", {"dir", "checkpoint"});
    read(o, "output", "dir", c.output.dir);
    read(o, "output", "checkpoint", c.output.checkpoint);
  }
  return c;
}

std::size_t effective_batch_size(const TrainConfig& config, std::size_t grid_rank) {
  if (config.optim.batch_size > 0) return config.optim.batch_size;
  return grid_rank >= 3 ? 10 : 20;
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) throw ConfigError("unknown config key '" + path + "'");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  auto parsed = nlohmann::json::parse(text, nullptr, false);
  *node = parsed.is_discarded() ? nlohmann::json(text) : parsed;
}

void merge_strict(nlohmann::json& base, const nlohmann::json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError("config section '" + (path.empty() ? "<root>" : path) + "' must be an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string at = join(path, key);
    if (!base.contains(key)) throw ConfigError("unknown config key '" + at + "'");
    if (base[key].is_object()) {
      merge_strict(base[key], value, at);
    } else {
      base[key] = value;
    }
  }
}

TrainConfig load_train_config(const std::optional<std::filesystem::path>& file,
                              const std::vector<std::string>& overrides) {
  nlohmann::json j = TrainConfig{}.to_json();
  if (file) {
    nlohmann::json from_file;
    try {
      from_file = nlohmann::json::parse(io::read_text(*file));
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config file '" + file->string() + "' is not valid JSON: " + e.what());
    }
    merge_strict(j, from_file);
  }
  for (const auto& o : overrides) apply_override(j, o);
  TrainConfig c = TrainConfig::from_json(j);
  c.validate();
  return c;
}

}  // namespace lnop
