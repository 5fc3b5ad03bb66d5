// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gatecut/checkpoint.hpp"
#include "gatecut/complexity.hpp"
#include "gatecut/error.hpp"
#include "gatecut/odelab.hpp"
#include "gatecut/prune.hpp"
#include "gatecut/version.hpp"
#include "svg.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;

namespace gatecut::cli {

std::string header_block(const Config& cfg, const std::string& prefix) {
  std::ostringstream o;
  o << prefix << "gatecut " << kVersion << "\n";
  o << prefix << "config " << hex64(cfg.hash()) << " (" << cfg.source() << ")\n";
  o << prefix << "seed " << cfg.get("run", "seed") << "\n";
  return o.str();
}

namespace {

std::string comment_line(const Config& cfg) {
  return "gatecut " + std::string(kVersion) + " config " + hex64(cfg.hash()) + " seed " + cfg.get("run", "seed");
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  f << text;
  if (!f) throw IoError("failed writing " + p.string());
}

fs::path out_dir(const Config& cfg) {
  fs::path p = cfg.get("run", "out");
  fs::create_directories(p);
  return p;
}

std::uint64_t data_seed(const Config& cfg) {
  return cfg.has_value("data", "seed") ? cfg.get_u64("data", "seed") : cfg.get_u64("run", "seed");
}

}  // namespace

Dataset make_dataset(const Config& cfg) {
  const std::string src = cfg.get("data", "source");
  Rng rng(data_seed(cfg));
  Rng gen = rng.split(1);
  Rng split = rng.split(2);
  Dataset d;
  const std::size_t n = cfg.get_size("data", "n");
  if (src == "teacher_student") {
    MlpShape t;
    t.in = cfg.get_size("data", "in");
    t.width = cfg.get_size("data", "teacher_width");
    t.units = cfg.get_size("data", "teacher_units");
    t.blocks = cfg.get_size("data", "teacher_blocks");
    t.out = cfg.get_size("data", "out");
    t.task = Task::regression;
    t.act = parse_activation(cfg.get("data", "teacher_act"));
    t.input_gates = false;
    d = gen_teacher_student(residual_mlp(t), n, cfg.get_double("data", "noise"), gen);
  } else if (src == "blobs") {
    d = gen_blobs(cfg.get_size("data", "classes"), n, cfg.get_double("data", "separation"), gen,
                  cfg.get_size("data", "dim"));
  } else if (src == "spirals") {
    d = gen_spirals(n, cfg.get_double("data", "turns"), gen, cfg.get_double("data", "noise"));
  } else if (src == "mnist") {
    std::string dir = cfg.get_path("data", "mnist_dir");
    if (dir.empty()) {
      const char* env = std::getenv("GATECUT_MNIST_DIR");
      if (!env) throw IoError("data.mnist_dir is not set (or set GATECUT_MNIST_DIR)");
      dir = env;
    }
    d = load_mnist(dir);
  } else {
    throw DomainError("unknown data.source '" + src + "' (teacher_student|blobs|spirals|mnist)");
  }
  if (src != "mnist") split_train_test(d, cfg.get_double("data", "test_fraction"), split);
  standardize(d, parse_standardize(cfg.get("data", "standardize")));
  check_dataset(d);
  return d;
}

NetworkSpec make_spec(const Config& cfg, const Dataset& d) {
  NetworkSpec spec;
  if (cfg.has_value("model", "arch")) {
    spec = read_arch(cfg.get_path("model", "arch"));
  } else {
    MlpShape s;
    s.in = d.x.cols();
    s.width = cfg.get_size("model", "width");
    s.units = cfg.get_size("model", "units");
    s.blocks = cfg.get_size("model", "blocks");
    s.out = d.task == Task::classification ? d.classes : d.y.cols();
    s.task = d.task;
    s.act = parse_activation(cfg.get("model", "act"));
    s.pre = parse_activation(cfg.get("model", "pre"));
    s.input_gates = cfg.get_bool("model", "input_gates");
    spec = residual_mlp(s);
  }
  return spec;
}

Hyperparams make_hyper(const Config& cfg) {
  Hyperparams hp;
  hp.nu = cfg.get_double("trainer", "nu");
  hp.alpha = cfg.get_double("trainer", "alpha");
  hp.beta = cfg.get_double("trainer", "beta");
  hp.lambda = cfg.get_double("trainer", "lambda");
  hp.theta_tol = cfg.get_double("trainer", "theta_tol");
  hp.batch = cfg.get_size("trainer", "batch");
  hp.epochs = cfg.get_size("trainer", "epochs");
  hp.momentum = cfg.get_double("trainer", "momentum");
  hp.lr_w.kind = parse_schedule(cfg.get("trainer", "schedule"));
  hp.lr_w.base = cfg.get_double("trainer", "lr");
  hp.lr_w.milestones = cfg.get_list("trainer", "milestones");
  hp.lr_w.factor = cfg.get_double("trainer", "lr_factor");
  hp.lr_w.total = static_cast<double>(hp.epochs);
  hp.lr_w.period = cfg.get_double("trainer", "restart_period");
  hp.lr_w.period_mult = cfg.get_double("trainer", "restart_mult");
  hp.lr_theta = cfg.get_double("trainer", "theta_lr");
  hp.adam_beta1 = cfg.get_double("trainer", "adam_beta1");
  hp.adam_beta2 = cfg.get_double("trainer", "adam_beta2");
  hp.adam_eps = cfg.get_double("trainer", "adam_eps");
  hp.theta_init = cfg.get_double("trainer", "theta_init");
  hp.finalize_epoch = cfg.get_size("trainer", "finalize_epoch");
  hp.seed = cfg.get_u64("run", "seed");
  hp.eval_max = cfg.get_size("trainer", "eval_max");
  hp.check_compaction = cfg.get_bool("trainer", "check_compaction");
  hp.validate();
  return hp;
}

namespace {

std::string widths(const std::vector<std::size_t>& h) {
  if (h.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "," : "") + std::to_string(h[i]);
  return s;
}

// Per-block widths, parameters and FLOPS before and after pruning.
std::string arch_report(const NetworkSpec& before, const NetworkSpec& after) {
  ComplexityReport a = analyze_static(before);
  ComplexityReport b = analyze_static(after);
  PruneRatios r = ratios(before, after);
  std::ostringstream o;
  o << std::left << std::setw(12) << "block" << std::right << std::setw(12) << "in" << std::setw(14) << "hidden"
    << std::setw(12) << "out" << std::setw(10) << "path" << std::setw(20) << "params" << std::setw(20) << "flops"
    << "\n";
  auto pair = [](auto x, auto y) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(0) << x << ">" << y;
    return s.str();
  };
  for (std::size_t l = 0; l < a.blocks.size(); ++l) {
    const BlockReport& x = a.blocks[l];
    const BlockReport& y = b.blocks[l];
    o << std::left << std::setw(12) << x.name << std::right << std::setw(12) << pair(x.in, y.in) << std::setw(14)
      << (widths(x.hidden) + ">" + widths(y.hidden)) << std::setw(12) << pair(x.out, y.out) << std::setw(10)
      << y.path << std::setw(20) << pair(x.params, y.params) << std::setw(20) << pair(x.flops, y.flops) << "\n";
  }
  o << std::fixed << std::setprecision(2);
  o << "params " << std::setprecision(0) << a.params << " -> " << b.params << std::setprecision(2) << " (pPR "
    << r.ppr << "%)\n";
  o << "flops  " << std::setprecision(0) << a.flops << " -> " << b.flops << std::setprecision(2) << " (fPR " << r.fpr
    << "%)\n";
  o << "weight layers " << layer_count(before) << " -> " << r.layers_left << "\n";
  return o.str();
}

struct ThetaLog {
  std::vector<double> epochs;
  std::vector<std::vector<double>> theta_b;     // per block
  std::vector<std::vector<double>> theta1_mean;  // per block
};

void log_thetas(ThetaLog& t, double epoch, const GateState& g) {
  t.epochs.push_back(epoch);
  t.theta_b.resize(g.blocks.size());
  t.theta1_mean.resize(g.blocks.size());
  for (std::size_t l = 0; l < g.blocks.size(); ++l) {
    const BlockGates& b = g.blocks[l];
    t.theta_b[l].push_back(b.has_path ? b.theta_b : std::nan(""));
    double s = 0.0;
    for (double v : b.theta_unit) s += v;
    t.theta1_mean[l].push_back(b.theta_unit.empty() ? std::nan("") : s / static_cast<double>(b.theta_unit.size()));
  }
}

void write_plots(const fs::path& dir, const Config& cfg, const NetworkSpec& spec, const ThetaLog& tl,
                 const std::vector<MetricsRecord>& hist) {
  Chart th{"gate parameters", "epoch", "theta", {}, false, 720, 420};
  for (std::size_t l = 0; l < spec.blocks.size(); ++l) {
    if (!spec.blocks[l].has_path()) continue;
    const std::string name = spec.blocks[l].name.empty() ? "b" + std::to_string(l) : spec.blocks[l].name;
    th.series.push_back({name + " theta_B", tl.epochs, tl.theta_b[l]});
    th.series.push_back({name + " mean theta_1", tl.epochs, tl.theta1_mean[l]});
  }
  write_text(dir / "theta.svg", render_svg(th, comment_line(cfg)));

  const bool cls = spec.task == Task::classification;
  Chart acc{cls ? "accuracy" : "loss", "epoch", cls ? "accuracy" : "loss", {}, !cls, 640, 400};
  Series a{cls ? "train" : "train (sampled)", {}, {}}, b{"test", {}, {}};
  for (const auto& r : hist) {
    a.x.push_back(static_cast<double>(r.epoch));
    a.y.push_back(cls ? r.train_acc : r.train_loss);
    b.x.push_back(static_cast<double>(r.epoch));
    b.y.push_back(cls ? r.test_acc : r.test_loss);
  }
  acc.series = {a, b};
  write_text(dir / "accuracy.svg", render_svg(acc, comment_line(cfg)));
}

}  // namespace

int cmd_train(const Config& cfg, std::ostream& log) {
  const fs::path dir = out_dir(cfg);
  Dataset data = make_dataset(cfg);
  NetworkSpec spec = make_spec(cfg, data);
  Hyperparams hp = make_hyper(cfg);
  const bool wall = cfg.get_bool("run", "wall_time");
  const std::string header = header_block(cfg);
  const CheckpointMeta meta = {{"engine", kVersion}, {"config", hex64(cfg.hash())}, {"seed", cfg.get("run", "seed")}};

  for (const auto& w : hp.warnings()) log << "warning: " << w << "\n";
  Trainer trainer(spec, data, hp);
  ThetaLog tl;
  log_thetas(tl, 0.0, trainer.state().gates);

  std::ofstream metrics(dir / "metrics.csv", std::ios::binary);
  std::ofstream events(dir / "prune_events.log", std::ios::binary);
  if (!metrics || !events) throw IoError("cannot write outputs in " + dir.string());
  metrics << header << metrics_csv_header(wall) << "\n";
  events << header;
  log << "train: " << data.provenance << ", " << data.train.size() << " train / " << data.test.size()
      << " test rows, " << spec.blocks.size() << " blocks\n";
  try {
    trainer.run([&](const MetricsRecord& r, const std::vector<PruneEvent>& fresh) {
      metrics << metrics_csv_row(r, wall) << "\n" << std::flush;
      for (const auto& e : fresh) events << format_event(e) << "\n";
      events.flush();
      log_thetas(tl, static_cast<double>(r.epoch), trainer.state().gates);
      log << "epoch " << r.epoch << " loss " << r.train_loss << " test_loss " << r.test_loss;
      if (spec.task == Task::classification) log << " test_acc " << r.test_acc;
      log << " fpr " << r.fpr << " ppr " << r.ppr << " layers " << r.layers_left << " pruned " << r.pruned << "\n";
    });
  } catch (const NumericError& e) {
    save_checkpoint((dir / "checkpoint.json").string(), trainer.state(), meta);
    log << "diverged: " << e.what() << "; last good state saved to " << (dir / "checkpoint.json").string() << "\n";
    throw;
  }
  save_checkpoint((dir / "checkpoint.json").string(), trainer.state(), meta);
  if (cfg.get_bool("run", "plots")) write_plots(dir, cfg, spec, tl, trainer.state().history);
  CompactNet net;
  try {
    net = trainer.result();
  } catch (const ShapeError& e) {
    throw Error(std::string(e.what()) + "; pruning removed every path from input to output (lower trainer.nu)");
  }
  write_text(dir / "final.arch", header + write_arch(net.spec));
  write_text(dir / "report.txt", header + arch_report(spec, net.spec));
  log << arch_report(spec, net.spec);
  return kOk;
}

int cmd_analyze(const Config& cfg, const std::optional<std::string>& arch, std::ostream& log) {
  NetworkSpec spec;
  if (arch) {
    spec = read_arch(*arch);
  } else if (cfg.has_value("model", "arch")) {
    spec = read_arch(cfg.get_path("model", "arch"));
  } else {
    throw IoError("analyze needs an architecture: --arch PATH or model.arch");
  }
  ComplexityReport r = analyze_static(spec);
  const std::string table = report_table(r);
  log << table;
  if (cfg.has_value("run", "out")) {
    const fs::path dir = out_dir(cfg);
    write_text(dir / "report.txt", header_block(cfg) + table);
    write_text(dir / "report.csv", header_block(cfg) + report_csv(r));
  }
  return kOk;
}

namespace {

std::string verdict_line(const std::string& name, const SweepResult& r) {
  std::ostringstream o;
  double worst_inc = 0.0, slack = 0.0, tmax = 0.0;
  for (const auto& c : r.certs) {
    worst_inc = std::max(worst_inc, c.max_increase);
    slack = c.slack;
    tmax = std::max(tmax, c.t_final);
  }
  o << name << ": " << r.passed << "/" << r.certs.size() << " PASS, " << r.failed << " FAIL, " << r.out_of_scope
    << " OUT_OF_SCOPE; max Lyapunov rise " << worst_inc << " (slack " << slack << "); longest run t=" << tmax;
  return o.str();
}

}  // namespace

int cmd_odelab(const Config& cfg, std::ostream& log) {
  const fs::path dir = out_dir(cfg);
  HostShape shape;
  shape.in = cfg.get_size("odelab", "in");
  shape.units = cfg.get_size("odelab", "units");
  shape.out = cfg.get_size("odelab", "out");
  shape.samples = cfg.get_size("odelab", "samples");
  shape.act = parse_activation(cfg.get("odelab", "act"));
  shape.nu = cfg.get_double("odelab", "nu");
  shape.alpha = cfg.get_double("odelab", "alpha");
  shape.beta = cfg.get_double("odelab", "beta");
  shape.lambda = cfg.get_double("odelab", "lambda");
  if (shape.units > kMaxVertexGates)
    throw LimitError("odelab host with " + std::to_string(shape.units) + " units exceeds the gate limit");
  if (shape.act == Activation::relu) log << "warning: relu host is not continuously differentiable\n";
  const std::uint64_t seed = cfg.get_u64("run", "seed");
  Host host = default_host(shape, seed);
  Rng est = Rng(seed).split(10);
  const double w_max = cfg.get_double("odelab", "w_max");
  EtaKappa ek = estimate_eta_kappa(host, cfg.get_size("odelab", "eta_samples"), w_max, est);
  StabilityConsts sc = stability_consts(host, ek);

  CertifyOptions co;
  co.integ.method = parse_method(cfg.get("odelab", "method"));
  co.integ.dt = cfg.get_double("odelab", "dt");
  co.integ.t_end = cfg.has_value("odelab", "t_end") ? cfg.get_double("odelab", "t_end") : 200.0 / shape.lambda;
  co.tol = cfg.get_double("odelab", "tol");
  co.slack_c = cfg.get_double("odelab", "slack_c");

  std::ostringstream sum;
  sum << header_block(cfg);
  sum << std::setprecision(6);
  sum << "R " << sc.r << " R_m " << sc.r_m << " eta " << sc.eta << " kappa " << sc.kappa << " radius " << sc.radius
      << " threshold " << sc.threshold << "\n";
  sum << "integrator " << to_string(co.integ.method) << " dt " << co.integ.dt << " t_end " << co.integ.t_end
      << " tol " << co.tol << "\n";

  const std::string which = cfg.get("odelab", "region");
  if (which != "both" && which != "block" && which != "unit")
    throw DomainError("odelab.region must be block, unit or both");
  const std::size_t unit = cfg.get_size("odelab", "unit");
  const std::size_t starts = cfg.get_size("odelab", "starts");
  const std::size_t dump = cfg.get_size("odelab", "dump");
  bool ok = true;
  Chart lam{"Lyapunov descent", "t", "Lambda", {}, true, 640, 400};
  for (Region reg : {Region::block, Region::unit}) {
    if ((reg == Region::block && which == "unit") || (reg == Region::unit && which == "block")) continue;
    const std::string name = reg == Region::block ? "D_B" : "D_U(" + std::to_string(unit) + ")";
    SweepResult r = certify_sweep(host, sc, reg, unit, starts, w_max, Rng(seed).split(reg == Region::block ? 20 : 21).seed(), co);
    ok = ok && r.passed == r.certs.size();
    const std::string line = verdict_line(name, r);
    sum << line << "\n";
    log << line << "\n";
    for (std::size_t k = 0; k < std::min(dump, r.starts.size()); ++k) {
      IntegrateOptions io = co.integ;
      io.t_end = std::max(r.certs[k].t_final, co.integ.dt);
      io.record_every = std::max<std::size_t>(1, static_cast<std::size_t>(io.t_end / io.dt / 400));
      Trajectory tr = integrate(host, r.starts[k], io);
      const std::string tag = reg == Region::block ? "block" : "unit";
      write_text(dir / ("trajectory_" + tag + "_" + std::to_string(k) + ".csv"),
                 header_block(cfg) + trajectory_csv(tr));
      Series s{tag + " " + std::to_string(k), {}, {}};
      for (const auto& p : tr.points) {
        s.x.push_back(p.t);
        s.y.push_back(reg == Region::block ? p.lambda_b : p.lambda_u[unit]);
      }
      lam.series.push_back(s);
    }
  }

  // E_B invariance: W = 0 with theta_B = 0 stays put exactly.
  {
    SubsystemState s = state_from_host(host, 0.0, 0.5);
    s.w1.fill(0.0);
    s.w2.fill(0.0);
    IntegrateOptions io = co.integ;
    io.t_end = 1.0;
    Trajectory tr = integrate(host, s, io);
    double dev = std::max({norm_w1(tr.final_state), norm_w2(tr.final_state), tr.final_state.theta_b});
    const bool inv = dev <= 1e-12;
    ok = ok && inv;
    sum << "E_B invariance: " << (inv ? "PASS" : "FAIL") << " max deviation " << dev << "\n";
    log << "E_B invariance: " << (inv ? "PASS" : "FAIL") << " max deviation " << dev << "\n";
  }
  if (cfg.get_bool("odelab", "dt_halving")) {
    SubsystemState s = state_from_host(host, 0.9, 0.5);
    for (Method m : {Method::euler, Method::rk4}) {
      ConvergenceReport rep = convergence_order(host, s, m, m == Method::euler ? 0.01 : 0.05, 0.3);
      std::ostringstream l;
      l << "convergence " << to_string(m) << ": dt " << rep.dt[0] << "," << rep.dt[1] << "," << rep.dt[2]
        << " endpoint diffs " << rep.diff[0] << "," << rep.diff[1] << " observed order " << rep.order;
      sum << l.str() << "\n";
      log << l.str() << "\n";
    }
  }
  write_text(dir / "summary.txt", sum.str());
  if (cfg.get_bool("run", "plots")) write_text(dir / "lambda.svg", render_svg(lam, comment_line(cfg)));
  return ok ? kOk : kVerifyFailed;
}

int cmd_verify(const Config& cfg, std::ostream& log, std::ostream& err) {
  VerifyOptions vo;
  vo.instances = cfg.get_size("verify", "instances");
  vo.trials = cfg.get_size("verify", "trials");
  vo.seed = cfg.get_u64("run", "seed");
  vo.fault = parse_fault(cfg.get("verify", "fault"));
  auto checks = run_verify(vo);
  const std::string table = verify_table(checks);
  log << table;
  bool ok = true;
  std::string failing;
  for (const auto& c : checks)
    if (!c.pass) {
      ok = false;
      failing += (failing.empty() ? "" : ", ") + c.name;
    }
  if (!ok) err << "failing properties: " << failing << "\n";
  if (cfg.has_value("run", "out")) write_text(out_dir(cfg) / "verify.txt", header_block(cfg) + table);
  return ok ? kOk : kVerifyFailed;
}

int cmd_export(const Config& cfg, std::ostream& log) {
  const fs::path dir = out_dir(cfg);
  Dataset d = make_dataset(cfg);
  const fs::path csv = dir / "data.csv";
  export_csv(d, csv.string());
  std::ifstream in(csv, std::ios::binary);
  std::ostringstream body;
  body << in.rdbuf();
  in.close();
  write_text(csv, header_block(cfg) + body.str());
  write_text(dir / "model.arch", header_block(cfg) + write_arch(make_spec(cfg, d)));
  log << "exported " << d.size() << " rows to " << csv.string() << "\n";
  return kOk;
}

namespace {

std::vector<std::pair<std::string, std::vector<std::string>>> parse_sweeps(const std::vector<std::string>& sweeps) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& s : sweeps) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw DomainError("--sweep expects KEY=v1,v2,...: '" + s + "'");
    std::vector<std::string> vals;
    std::istringstream in(s.substr(eq + 1));
    std::string v;
    while (std::getline(in, v, ','))
      if (!v.empty()) vals.push_back(v);
    if (vals.empty()) throw DomainError("--sweep " + s.substr(0, eq) + " has no values");
    out.push_back({s.substr(0, eq), vals});
  }
  return out;
}

int dispatch(const Config& cfg, const RunOptions& opt, std::ostream& log, std::ostream& err) {
  if (opt.command == "train") return cmd_train(cfg, log);
  if (opt.command == "analyze") return cmd_analyze(cfg, opt.arch, log);
  if (opt.command == "odelab") return cmd_odelab(cfg, log);
  if (opt.command == "verify") return cmd_verify(cfg, log, err);
  if (opt.command == "export") return cmd_export(cfg, log);
  throw DomainError("unknown command '" + opt.command + "'");
}

}  // namespace

int run(const Config& base, const RunOptions& opt, std::ostream& log, std::ostream& err) {
  try {
    Config cfg = base;
    for (const auto& o : opt.overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw DomainError("--set expects KEY=VALUE: '" + o + "'");
      cfg.set(o.substr(0, eq), o.substr(eq + 1));
    }
    if (opt.seed) cfg.set("run.seed", std::to_string(*opt.seed));
    if (opt.out) cfg.set("run.out", *opt.out);
    if (opt.fault) cfg.set("verify.fault", *opt.fault);
    if (opt.command == "analyze" && !opt.out && base.source() == "<defaults>") cfg.set("run.out", "");

    auto sweeps = parse_sweeps(opt.sweeps);
    if (sweeps.empty()) return dispatch(cfg, opt, log, err);

    // Cartesian product; each run gets its own directory under run.out.
    const fs::path root = cfg.get("run", "out");
    std::vector<std::size_t> idx(sweeps.size(), 0);
    int worst = kOk;
    for (;;) {
      Config c = cfg;
      std::string name;
      for (std::size_t k = 0; k < sweeps.size(); ++k) {
        c.set(sweeps[k].first, sweeps[k].second[idx[k]]);
        const std::string key = sweeps[k].first.substr(sweeps[k].first.find('.') + 1);
        name += (name.empty() ? "" : "_") + key + "=" + sweeps[k].second[idx[k]];
      }
      c.set("run.out", (root / name).string());
      log << "== run " << name << "\n";
      worst = std::max(worst, dispatch(c, opt, log, err));
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] == sweeps[k].second.size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
    return worst;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kDivergence;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const LimitError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace gatecut::cli
