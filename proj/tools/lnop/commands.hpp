#pragma once

#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lnop::cli {

struct GenOptions {
  std::string family;
  std::string out;
  std::optional<std::string> config;
  std::optional<std::size_t> res, count, refine, history, horizon, pairs;
  std::optional<std::uint64_t> seed;
  std::optional<double> nu, t, dt, reynolds, burn_in;
  std::optional<int> kolmogorov_n;
};

struct TrainOptions {
  std::optional<std::string> config;
  std::vector<std::string> set;
  std::optional<std::string> data, test, arch, out;
  std::optional<std::size_t> epochs, batch_size;
  std::optional<std::uint64_t> seed;
  std::optional<double> lr;
};

struct EvalOptions {
  std::string model;
  std::string data;
  std::vector<std::size_t> resolutions;
  std::size_t n = 0;
  std::optional<std::string> out, csv;
};

struct BenchOptions {
  std::string data;
  std::vector<std::string> archs{"learnable", "fourier"};
  std::size_t width = 32;
  std::vector<std::size_t> modes{12};
  std::size_t blocks = 4;
  std::size_t warmup = 1;
  std::size_t epochs = 5;
  std::size_t batch_size = 20;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
};

struct VerifyOptions {
  std::vector<std::string> suites;
  bool negative_control = false;
  unsigned instances = 50;
};

struct ReportOptions {
  std::string in;
  std::optional<std::string> csv;
};

/// --threads if given, else LNOP_THREADS, else 1.
unsigned resolve_threads(std::optional<unsigned> flag);

/// 1 usage/config, 2 numerical, 3 I/O or format.
int exit_code_for(const std::exception& e);

int run_gen(const GenOptions& o, unsigned threads, std::ostream& out);
int run_train(const TrainOptions& o, unsigned threads, std::ostream& out);
/// superres = eval with an explicit resolution list; the table is also
/// printed as CSV.
int run_eval(const EvalOptions& o, bool superres, unsigned threads, std::ostream& out);
int run_bench(const BenchOptions& o, std::ostream& out);
int run_verify(const VerifyOptions& o, std::ostream& out);
int run_report(const ReportOptions& o, std::ostream& out);

}  // namespace lnop::cli
