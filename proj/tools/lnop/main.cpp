#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace lnop::cli;

int main(int argc, char** argv) {
  CLI::App app{"lnop: neural operators with learnable transforms"};
  app.require_subcommand(1);
  std::optional<unsigned> threads;

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "generate a PDE dataset");
  g->add_option("family", gen.family, "burgers|advection|darcy|navier_stokes|kolmogorov")->required();
  g->add_option("--out,-o", gen.out, "output container path")->required();
  g->add_option("--config", gen.config, "generator JSON (CLI flags take precedence)");
  g->add_option("--res", gen.res, "spatial resolution");
  g->add_option("--count", gen.count, "number of samples");
  g->add_option("--seed", gen.seed);
  g->add_option("--refine", gen.refine, "solver grid = refine * res");
  g->add_option("--nu", gen.nu, "viscosity");
  g->add_option("--t", gen.t, "burgers end time / advection shift");
  g->add_option("--dt", gen.dt, "snapshot spacing (navier_stokes, kolmogorov)");
  g->add_option("--history", gen.history, "navier_stokes conditioning steps");
  g->add_option("--horizon", gen.horizon, "navier_stokes predicted steps");
  g->add_option("--reynolds", gen.reynolds, "kolmogorov Reynolds number");
  g->add_option("--kolmogorov-n", gen.kolmogorov_n, "kolmogorov forcing wavenumber");
  g->add_option("--burn-in", gen.burn_in, "kolmogorov burn-in time");
  g->add_option("--pairs", gen.pairs, "kolmogorov pairs per trajectory");
  g->add_option("--threads", threads);

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "train an operator model");
  t->add_option("--config", tr.config, "training config JSON");
  t->add_option("--set", tr.set, "dot-path override key.path=value (repeatable)");
  t->add_option("--data", tr.data, "training dataset (data.train)");
  t->add_option("--test", tr.test, "test dataset (data.test)");
  t->add_option("--arch", tr.arch, "learnable|fourier (model.arch)");
  t->add_option("--out", tr.out, "output directory (output.dir)");
  t->add_option("--epochs", tr.epochs);
  t->add_option("--batch-size", tr.batch_size);
  t->add_option("--lr", tr.lr);
  t->add_option("--seed", tr.seed);
  t->add_option("--threads", threads);

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  e->add_option("--model", ev.model, "checkpoint path")->required();
  e->add_option("--data", ev.data, "dataset path")->required();
  e->add_option("--resolutions", ev.resolutions, "spatial resolutions")->delimiter(',');
  e->add_option("--n", ev.n, "use the first n samples");
  e->add_option("--out", ev.out, "report JSON path");
  e->add_option("--csv", ev.csv, "table CSV path");
  e->add_option("--threads", threads);

  EvalOptions sr;
  auto* s = app.add_subcommand("superres", "evaluate at several resolutions");
  s->add_option("--model", sr.model, "checkpoint path")->required();
  s->add_option("--data", sr.data, "dataset path")->required();
  s->add_option("--resolutions", sr.resolutions, "spatial resolutions")->delimiter(',')->required();
  s->add_option("--n", sr.n, "use the first n samples");
  s->add_option("--out", sr.out, "report JSON path");
  s->add_option("--csv", sr.csv, "table CSV path");
  s->add_option("--threads", threads);

  BenchOptions bo;
  auto* b = app.add_subcommand("bench", "time learnable vs fourier training epochs");
  b->add_option("--data", bo.data, "dataset path")->required();
  b->add_option("--archs", bo.archs)->delimiter(',');
  b->add_option("--width", bo.width, "d_v");
  b->add_option("--modes", bo.modes, "k_i (one value applies to every axis)")->delimiter(',');
  b->add_option("--blocks", bo.blocks);
  b->add_option("--warmup", bo.warmup);
  b->add_option("--epochs", bo.epochs, "timed epochs");
  b->add_option("--batch-size", bo.batch_size);
  b->add_option("--samples", bo.samples, "samples per epoch (0: all)");
  b->add_option("--seed", bo.seed);
  b->add_option("--out", bo.out, "report JSON path");

  VerifyOptions vo;
  auto* v = app.add_subcommand("verify", "run the oracle suites");
  v->add_option("--suite", vo.suites, "suite name (repeatable)");
  v->add_flag("--negative-control", vo.negative_control, "use a deliberately wrong backward rule");
  v->add_option("--instances", vo.instances, "random instances per oracle suite");

  ReportOptions ro;
  auto* r = app.add_subcommand("report", "summarise a report JSON");
  r->add_option("--in", ro.in, "report path")->required();
  r->add_option("--csv", ro.csv, "write the evaluation table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    const unsigned n = resolve_threads(threads);
    if (g->parsed()) return run_gen(gen, n, std::cout);
    if (t->parsed()) return run_train(tr, n, std::cout);
    if (e->parsed()) return run_eval(ev, false, n, std::cout);
    if (s->parsed()) return run_eval(sr, true, n, std::cout);
    if (b->parsed()) return run_bench(bo, std::cout);
    if (v->parsed()) return run_verify(vo, std::cout);
    if (r->parsed()) return run_report(ro, std::cout);
  } catch (const std::exception& ex) {
    std::cerr << "lnop: " << ex.what() << "\n";
    return exit_code_for(ex);
  }
  return 1;
}
