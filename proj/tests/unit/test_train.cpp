#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "lnop/data/generators.hpp"
#include "lnop/error.hpp"
#include "lnop/io/binary.hpp"
#include "lnop/tensor/ops.hpp"
#include "lnop/tensor/optim.hpp"
#include "lnop/train/bench.hpp"
#include "lnop/train/config.hpp"
#include "lnop/train/evaluate.hpp"
#include "lnop/train/metrics.hpp"
#include "lnop/train/trainer.hpp"
#include "lnop/verify/oracles.hpp"

using namespace lnop;

namespace {

PdeDataset tiny_burgers(std::size_t count, std::uint64_t seed, std::size_t res = 16) {
  GeneratorConfig g;
  g.family = PdeFamily::burgers;
  g.resolution = res;
  g.count = count;
  g.seed = seed;
  g.refine = 2;
  g.nu = 0.05;
  return generate_dataset(g);
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.data.train = "in-memory";
  c.data.test = "in-memory";
  c.model.width = 4;
  c.model.modes = {4};
  c.model.blocks = 2;
  c.optim.epochs = 3;
  c.optim.batch_size = 2;
  c.seed = 5;
  return c;
}

std::vector<Tensor> snapshot(const OperatorModel& m) {
  std::vector<Tensor> out;
  for (const auto* p : m.parameters()) out.push_back(p->value);
  return out;
}

}  // namespace

TEST_CASE("relative L2 metric") {
  const Tensor t = Tensor::vector({3, 4});
  CHECK(relative_l2_percent(t, t) == 0.0);
  CHECK(relative_l2_percent(Tensor({2}), t) == 100.0);
  CHECK(relative_l2_percent(Tensor::vector({1, 0}), Tensor::vector({0, 1})) ==
        doctest::Approx(141.4213562373095).epsilon(1e-12));
  CHECK_THROWS_AS(relative_l2_percent(t, Tensor({2})), MetricError);
  CHECK_THROWS_AS(relative_l2_percent(t, Tensor({3})), DimensionError);

  std::mt19937_64 rng(1);
  const Tensor p = verify::random_tensor({20}, rng);
  const Tensor q = verify::random_tensor({20}, rng);
  const double base = relative_l2_percent(p, q);
  for (double c : {-3.0, 1e-3, 250.0}) CHECK(std::abs(relative_l2_percent(scale(p, c), scale(q, c)) - base) <= 1e-12 * base);
}

TEST_CASE("config: defaults, overrides and strictness") {
  const auto c = load_train_config(std::nullopt, {"data.train=a.lnop", "data.test=b.lnop", "model.modes=12",
                                                  "optim.lr=0.002", "model.arch=fourier"});
  CHECK(c.data.train == "a.lnop");
  CHECK(c.model.modes == Shape{12});
  CHECK(c.optim.lr == 0.002);
  CHECK(c.model.arch == Architecture::fourier);
  CHECK(c.optim.schedule_period == 100);
  CHECK(c.optim.schedule_factor == 0.5);
  CHECK(c.model.blocks == 4);
  CHECK(effective_batch_size(c, 1) == 20);
  CHECK(effective_batch_size(c, 3) == 10);

  CHECK_THROWS_AS(load_train_config(std::nullopt, {"data.train=a", "data.test=b", "optim.learning_rate=1"}), ConfigError);
  CHECK_THROWS_AS(load_train_config(std::nullopt, {"data.train=a", "data.test=b", "optim.epochs=0"}), ConfigError);
  CHECK_THROWS_AS(load_train_config(std::nullopt, {"data.train=a", "data.test=b", "model.width=\"wide\""}), ConfigError);
  CHECK_THROWS_AS(load_train_config(std::nullopt, {"data.train=a"}), ConfigError);
  CHECK_THROWS_AS(load_train_config(std::nullopt, {"data.train"}), ConfigError);

  const auto file = std::filesystem::temp_directory_path() / "lnop_unit_cfg.json";
  io::write_text(file, R"({"data": {"train": "x", "n_test": 4}, "optim": {"epochs": 7}})");
  const auto f = load_train_config(file, {"optim.epochs=9"});
  CHECK(f.optim.epochs == 9);
  CHECK(f.data.n_test == 4);
  CHECK(TrainConfig::from_json(f.to_json()).to_json() == f.to_json());
  io::write_text(file, R"({"model": {"depth": 3}})");
  CHECK_THROWS_AS(load_train_config(file, {}), ConfigError);
  std::filesystem::remove(file);
}

TEST_CASE("train: lr0 = 0 leaves parameters untouched") {
  const auto data = tiny_burgers(4, 1);
  auto cfg = tiny_config();
  cfg.optim.lr = 0.0;
  const OperatorModel fresh(model_config_for(cfg, data));
  const auto r = train(cfg, data, data);
  CHECK(snapshot(r.model) == snapshot(fresh));
}

TEST_CASE("train: one epoch on two samples matches a hand-stepped trace") {
  const auto data = tiny_burgers(2, 2);
  auto cfg = tiny_config();
  cfg.optim.epochs = 1;
  cfg.optim.batch_size = 1;
  cfg.optim.lr = 1e-2;
  const auto r = train(cfg, data, data);

  OperatorModel m(model_config_for(cfg, data));
  auto params = m.parameters();
  std::vector<std::vector<verify::ScalarAdam>> adam;
  for (auto* p : params) adam.emplace_back(p->value.size(), verify::ScalarAdam{.lr = 1e-2});
  std::vector<std::size_t> order{0, 1};
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);
  double loss_sum = 0.0;
  for (std::size_t i : order) {
    for (auto* p : params) p->grad = Tensor(p->value.shape());
    Tape tape;
    const Var loss = relative_l2_loss(m.forward(tape, data.samples[i].input), data.samples[i].target);
    loss_sum += loss.value().item();
    tape.backward(loss);
    for (std::size_t k = 0; k < params.size(); ++k)
      for (std::size_t e = 0; e < params[k]->value.size(); ++e)
        params[k]->value[e] = adam[k][e].step(params[k]->value[e], params[k]->grad[e]);
  }
  CHECK(std::abs(r.report.train_loss[0] - loss_sum / 2) <= 1e-12);
  const auto got = snapshot(r.model);
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) worst = std::max(worst, max_abs_diff(got[k], params[k]->value));
  CHECK(worst <= 1e-12);
}

TEST_CASE("train: seeded rerun is bit-identical and lr follows the schedule") {
  const auto data = tiny_burgers(4, 3);
  auto cfg = tiny_config();
  cfg.optim.epochs = 5;
  cfg.optim.schedule_period = 2;
  const auto a = train(cfg, data, data);
  const auto b = train(cfg, data, data);
  CHECK(a.report.train_loss == b.report.train_loss);
  CHECK(a.report.test_rel_l2 == b.report.test_rel_l2);
  CHECK(snapshot(a.model) == snapshot(b.model));
  REQUIRE(a.report.lr.size() == 5);
  for (int e = 0; e < 5; ++e) CHECK(a.report.lr[e] == step_lr(e, 1e-3, 2, 0.5));
  CHECK(a.report.train_loss.size() == 5);
  for (double s : a.report.per_epoch_seconds) CHECK(s > 0.0);

  const auto j = a.report.to_json();
  for (const char* key : {"epochs", "train_loss", "test_rel_l2", "per_epoch_seconds", "param_counts", "config", "seed"})
    CHECK(j.contains(key));
}

TEST_CASE("train: overfits two samples") {
  const auto data = tiny_burgers(2, 4);
  auto cfg = tiny_config();
  cfg.model.width = 8;
  cfg.optim.epochs = 600;
  cfg.optim.lr = 3e-3;
  cfg.optim.schedule_period = 200;
  cfg.optim.eval_every = 600;
  const auto r = train(cfg, data, data);
  const auto table = evaluate(r.model, data, {16});
  CHECK(table.rows.at(0).rel_l2_percent < 1.0);
}

TEST_CASE("evaluate: ratio-1 path, idempotence and superres rows") {
  const auto coarse = tiny_burgers(3, 5, 16);
  const auto fine = tiny_burgers(3, 5, 32);
  auto cfg = tiny_config();
  const OperatorModel m(model_config_for(cfg, coarse));

  const auto preds = predict(m, coarse, 2);
  std::vector<Tensor> targets;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(preds[i] == m.forward(coarse.samples[i].input));
    targets.push_back(coarse.samples[i].target);
  }
  const auto t1 = evaluate(m, fine, {16, 32});
  const auto t2 = evaluate(m, fine, {16, 32}, 3);
  CHECK(t1.to_json() == t2.to_json());
  REQUIRE(t1.rows.size() == 2);
  CHECK(t1.rows[0].pipeline == "native");
  CHECK(t1.rows[1].ratio == Shape{2});
  CHECK(evaluate(m, coarse, {16}).rows.at(0).rel_l2_percent == mean_relative_l2_percent(preds, targets));
  CHECK(t1.to_csv().rfind("resolution,extents,ratio,pipeline,rel_l2_percent\n", 0) == 0);
  CHECK_THROWS_AS(evaluate(m, fine, {24}), ResolutionError);
}

TEST_CASE("bench: parameter columns and timing") {
  GeneratorConfig g;
  g.family = PdeFamily::darcy;
  g.resolution = 16;
  g.count = 2;
  g.refine = 1;
  const auto data = generate_dataset(g);
  std::vector<ModelConfig> configs;
  for (auto arch : {Architecture::learnable, Architecture::fourier}) {
    ModelConfig c;
    c.arch = arch;
    c.width = 4;
    c.dims = {16, 16};
    c.modes = {4, 4};
    c.blocks = 1;
    configs.push_back(c);
  }
  const auto rep = bench(configs, data, {.warmup_epochs = 1, .timed_epochs = 3, .batch_size = 2});
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) {
    CHECK(e.per_block.total() == block_param_count(e.model.arch, 4, {16, 16}, {4, 4}).total());
    CHECK(e.epoch_seconds.size() == 3);
    CHECK(e.median_epoch_seconds > 0.0);
  }
  CHECK(rep.time_ratio(0, 1) > 0.0);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(bench({configs[0]}, data, {}), ConfigError);
  CHECK(fourier_minus_learnable(32, {64, 64}, {12, 12}) == 144384);
}
