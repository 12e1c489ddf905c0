#include <random>

#include <benchmark/benchmark.h>

#include "lnop/blocks/param_count.hpp"
#include "lnop/blocks/spectral.hpp"
#include "lnop/blocks/transform_block.hpp"
#include "lnop/tensor/ops.hpp"

using namespace lnop;

namespace {

Tensor random(const Shape& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(s);
  for (auto& v : t.data()) v = u(rng);
  return t;
}

// Contract the middle axis of (d_v, d, d) with a (d, k) factor.
void BM_ContractAxis(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const Tensor x = random({32, d, d}, 1);
  const Tensor w = random({d, 12}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(contract_axis(x, w, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(32 * d * d * 12));
}
BENCHMARK(BM_ContractAxis)->Arg(32)->Arg(64);

// One forward + backward pass of a 2-D block, d_v=32, k=(12,12).
template <Architecture A>
void BM_BlockStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const BlockShape shape{32, {d, d}, {12, 12}};
  std::mt19937_64 rng(3);
  const Tensor v = random({32, d, d}, 4);
  TransformBlockParams lp;
  SpectralBaselineParams sp;
  if constexpr (A == Architecture::learnable) lp = TransformBlockParams::init(shape, rng, MixInit::random, "");
  else sp = SpectralBaselineParams::init(shape, rng, MixInit::random, "");
  const SpectralBasis basis(shape.dims, shape.modes);
  for (auto _ : state) {
    Tape tape;
    const ParamBinder binder(&tape);
    Var out;
    if constexpr (A == Architecture::learnable) out = block_update(Var::view(v), bind(lp, binder), Activation::relu);
    else out = spectral_block_update(Var::view(v), bind(sp, binder), basis, Activation::relu);
    tape.backward(sum(out));
  }
}
BENCHMARK(BM_BlockStep<Architecture::learnable>)->Name("BM_BlockStep/learnable")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlockStep<Architecture::fourier>)->Name("BM_BlockStep/fourier")->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
