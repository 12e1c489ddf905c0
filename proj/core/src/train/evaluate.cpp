#include "lnop/train/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "lnop/error.hpp"
#include "lnop/model/superres.hpp"
#include "lnop/train/metrics.hpp"

namespace lnop {
namespace {

std::string join_extents(const Shape& s, char sep) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? std::string(1, sep) : "") + std::to_string(s[i]);
  return out;
}

}  // namespace

nlohmann::json EvalTable::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"resolution", r.resolution},
                         {"extents", r.extents},
                         {"ratio", r.ratio},
                         {"pipeline", r.pipeline},
                         {"rel_l2_percent", r.rel_l2_percent}});
  }
  return rows_json;
}

std::string EvalTable::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "resolution,extents,ratio,pipeline,rel_l2_percent\n";
  for (const auto& r : rows) {
    os << r.resolution << ',' << join_extents(r.extents, 'x') << ',' << join_extents(r.ratio, 'x') << ','
       << r.pipeline << ',' << r.rel_l2_percent << '\n';
  }
  return os.str();
}

std::vector<Tensor> predict(const OperatorModel& model, const PdeDataset& data, unsigned threads) {
  const std::size_t n = data.samples.size();
  std::vector<Tensor> out(n);
  const bool native = data.grid.extents == model.config().dims;
  auto run = [&](std::size_t i) {
    const auto& x = data.samples[i].input;
    out[i] = native ? model.forward(x) : forward_superres(model, x);
  };
  const unsigned workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex m;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            run(i);
          } catch (...) {
            std::lock_guard lock(m);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

EvalTable evaluate(const OperatorModel& model, const PdeDataset& test, const std::vector<std::size_t>& resolutions,
                   unsigned threads) {
  if (test.samples.empty()) throw ConfigError("evaluation needs at least one test sample");
  EvalTable table;
  for (std::size_t r : resolutions) {
    const Shape extents = test.grid.at_resolution(r);
    const PdeDataset at = downsample(test, extents);
    ResolutionResult row;
    row.resolution = r;
    row.extents = extents;
    row.ratio = resolution_factors(model.config(), extents);
    const bool unit = std::all_of(row.ratio.begin(), row.ratio.end(), [](std::size_t f) { return f == 1; });
    row.pipeline = unit ? "native" : to_string(superres_pipeline_for(model.config().arch));
    const auto preds = predict(model, at, threads);
    std::vector<Tensor> targets;
    targets.reserve(at.samples.size());
    for (const auto& s : at.samples) targets.push_back(s.target);
    row.rel_l2_percent = mean_relative_l2_percent(preds, targets);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace lnop
