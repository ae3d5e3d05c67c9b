#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "sympl/harness/config.hpp"
#include "sympl/harness/io.hpp"
#include "sympl/harness/suites.hpp"
#include "sympl/maslov.hpp"

using namespace sympl;
using namespace sympl::harness;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config_path;
  bool as_json = false;

  Config config() const {
    Config c = config_path.empty() ? Config{} : load_config(config_path);
    if (seed) c.seed = *seed;
    set_default_tol(c.tol);
    return c;
  }
};

void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.as_json) std::cout << j.dump(2) << "\n";
  else std::cout << text;
}

std::string fmt_mat(const Mat& M) {
  std::ostringstream o;
  o.precision(12);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    o << "  [";
    for (Eigen::Index k = 0; k < M.cols(); ++k) o << (k ? ", " : "") << M(i, k);
    o << "]\n";
  }
  return o.str();
}

json tol_json(const Tolerances& t) {
  return {{"eps_sym", t.eps_sym}, {"eps_rank_rel", t.eps_rank_rel}, {"eps_det", t.eps_det}, {"eps_int", t.eps_int}};
}

std::string summary(const VerificationReport& r, int indent = 0) {
  std::ostringstream o;
  std::string pad(indent, ' ');
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", r.wall_time_s);
  o << pad << r.suite << ": " << (r.pass() ? "PASS" : "FAIL") << "  instances " << r.instances << ", failed "
    << r.failed << ", seed " << r.seed << ", " << buf << " s\n";
  if (r.parts.empty()) {
    for (const auto& [id, s] : r.identities)
      o << pad << "  " << id << ": checks " << s.checks << ", failures " << s.failures << ", max residual "
        << Recorder::fmt(s.max_residual) << " (tol " << Recorder::fmt(s.tolerance) << ")\n";
  } else {
    for (const auto& p : r.parts) o << summary(p, indent + 2);
  }
  for (const auto& m : r.messages) o << pad << "  ! " << m << "\n";
  return o.str();
}

// ---------------------------------------------------------------------------

int cmd_verify(const Globals& g, const std::string& suite, const std::string& out) {
  Config cfg = g.config();
  VerificationReport r = run_suite(suite, cfg, worker_count());
  json j = to_json(r);
  if (!out.empty()) write_text(out, j.dump(2) + "\n");
  emit(g, j, summary(r));
  return r.pass() ? kPass : kFail;
}

int cmd_gen(const Globals& g, const std::string& spec_path, const std::string& out) {
  Config cfg = g.config();
  CorpusSpec spec = spec_path.empty() ? CorpusSpec{} : CorpusSpec::from_json(read_json_file(spec_path));
  json corpus = gen_corpus(spec, cfg.seed);
  if (!out.empty()) {
    write_text(out, corpus.dump(2) + "\n");
    if (!g.as_json) std::cout << "wrote corpus (seed " << cfg.seed << ") to " << out << "\n";
  }
  if (out.empty() || g.as_json) std::cout << corpus.dump(2) << "\n";
  return kPass;
}

int cmd_report(const Globals& g, const std::string& path) {
  VerificationReport r = report_from_json(read_json_file(path));
  emit(g, to_json(r), summary(r));
  return r.pass() ? kPass : kFail;
}

int run_nu(const Globals& g, const std::string& path_file, const std::string& route) {
  Config cfg = g.config();
  SymplecticPathLift p = path_from_json(read_json_file(path_file));
  Rng rng(cfg.seed);
  json j = {{"entity", "nu"}, {"n", p.n}};
  std::ostringstream o;
  if (route == "free" || route == "both") {
    int v = nu_via_free(p, rng).value;
    j["free"] = v;
    o << "nu (free formula) = " << v << "\n";
  }
  if (route == "doubled" || route == "both") {
    int v = nu_via_doubled(p, rng).value;
    j["doubled"] = v;
    o << "nu (doubled space) = " << v << "\n";
  }
  int rc = kPass;
  if (route == "both") {
    bool agree = j["free"] == j["doubled"];
    j["agree"] = agree;
    o << (agree ? "routes agree\n" : "routes DISAGREE\n");
    if (!agree) rc = kFail;
  }
  j["value"] = route == "doubled" ? j["doubled"] : j["free"];
  j["tolerances"] = tol_json(default_tol());
  emit(g, j, o.str());
  return rc;
}

LagLift lift_from_json(const json& j) {
  LagLift l = LagLift::of(frame_from_json(j));
  if (j.contains("theta")) {
    double th = j.at("theta").get<double>();
    if (std::abs(std::exp(I_unit * th) - std::exp(I_unit * l.theta)) > 1e-8)
      fail(ErrorKind::validation, "theta ", th, " is not an argument of det w (", l.theta, " mod 2 pi)");
    l.theta = th;
  }
  if (j.contains("shift")) l = l.shifted(j.at("shift").get<int>());
  return l;
}

int cmd_compute(const Globals& g, const std::string& entity, const std::vector<std::string>& in, int nu,
                const std::string& route) {
  Config cfg = g.config();
  Rng rng(cfg.seed);
  auto need = [&](std::size_t k) {
    if (in.size() != k) fail(ErrorKind::validation, "compute ", entity, " takes ", k, " input file(s), got ", in.size());
  };
  json j = {{"entity", entity}};
  std::ostringstream o;
  if (entity == "tau") {
    need(3);
    LagrangianFrame a = frame_from_json(read_json_file(in[0])), b = frame_from_json(read_json_file(in[1])),
                    c = frame_from_json(read_json_file(in[2]));
    int t = kashiwara_signature(a, b, c);
    j["value"] = t;
    j["route"] = "signature of the quadratic form on l + l' + l''";
    o << "tau = " << t << "\n";
    if (intersection_dim(a, b) == 0 && intersection_dim(b, c) == 0 && intersection_dim(a, c) == 0) {
      int tt = kashiwara_transversal(a, b, c);
      j["transversal"] = tt;
      o << "tau (transversal formula) = " << tt << "\n";
      if (tt != t) {
        emit(g, j, o.str());
        return kFail;
      }
    }
  } else if (entity == "alm") {
    need(2);
    LagLift a = lift_from_json(read_json_file(in[0])), b = lift_from_json(read_json_file(in[1]));
    AlmDetail d = alm_index_detail(a, b, rng);
    j["value"] = d.value;
    j["route"] = d.transversal ? "transversal formula" : "auxiliary plane";
    j["auxiliary_draws"] = d.draws;
    j["raw"] = d.raw;
    o << "mu = " << d.value << " (" << j["route"].get<std::string>() << ")\n";
  } else if (entity == "mu-ell") {
    need(2);
    SymplecticPathLift p = path_from_json(read_json_file(in[0]));
    LagrangianFrame l = frame_from_json(read_json_file(in[1]));
    int mu = maslov_mu_ell(p, l, rng);
    int m = reduced_m_ell(p, l, rng);
    j["value"] = mu;
    j["reduced"] = m;
    o << "mu_l = " << mu << "\nm_l = " << m << "\n";
  } else if (entity == "nu") {
    need(1);
    return run_nu(g, in[0], route);
  } else if (entity == "cayley") {
    need(1);
    SymplecticMatrix S = symplectic_from_json(read_json_file(in[0]));
    Mat M = cayley_transform(S);
    j["value"] = matrix_to_json(M, S.n());
    j["det_minus_identity"] = S.det_minus_identity();
    o << "M_S =\n" << fmt_mat(M);
  } else if (entity == "symbol") {
    need(1);
    SymplecticMatrix S = symplectic_from_json(read_json_file(in[0]));
    GaussianTwistedSymbol a = twisted_symbol(S, nu);
    j["nu"] = a.nu;
    j["amplitude"] = a.amplitude;
    j["M"] = matrix_to_json(a.M, S.n());
    o << "twisted symbol: i^" << a.nu << " * " << a.amplitude << " * exp(i/2 <Mz, z>), M =\n" << fmt_mat(a.M);
    try {
      GaussianWeylSymbol w = plain_weyl_symbol(S, nu);
      j["plain"] = {{"c", {w.c.real(), w.c.imag()}}, {"Q", matrix_to_json(w.Q, S.n())}};
      o << "plain symbol: (" << w.c.real() << ", " << w.c.imag() << ") * exp(i/2 <Qz, z>), Q =\n" << fmt_mat(w.Q);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::domain && e.kind() != ErrorKind::integrality) throw;
      j["plain"] = nullptr;
      o << "plain symbol: not Gaussian (" << e.what() << ")\n";
    }
  } else {
    fail(ErrorKind::validation, "unknown entity '", entity, "' (tau, alm, mu-ell, nu, cayley, symbol)");
  }
  j["tolerances"] = tol_json(default_tol());
  emit(g, j, o.str());
  return kPass;
}

// ---------------------------------------------------------------------------

int cmd_mp_apply(const Globals& g, const std::string& word, const std::string& in, const std::string& out) {
  g.config();
  MetaplecticWord w = word_from_json(read_json_file(word));
  GridFunctionX f = read_grid_x(in);
  GridFunctionX r = apply_word(w, f);
  write_grid(out, r);
  json j = {{"projection", matrix_to_json(w.projection().mat(), w.n())}, {"norm_in", f.norm()}, {"norm_out", r.norm()}};
  std::ostringstream o;
  o << "applied " << w.factors().size() << " factor(s); |f| = " << f.norm() << ", |Sf| = " << r.norm() << "\n";
  emit(g, j, o.str());
  return kPass;
}

int cmd_mp_symbol(const Globals& g, const std::string& matrix, int nu) {
  return cmd_compute(g, "symbol", {matrix}, nu, "both");
}

GridFunctionX state_or_default(const std::string& path, const Axis& ax) {
  if (!path.empty()) return read_grid_x(path);
  return gaussian_phi0(1, ax);
}

int cmd_ps(const Globals& g, const std::string& what, const std::string& in, const std::string& in2,
           const std::string& out, const std::string& word, const std::string& symbol, double tol) {
  Config cfg = g.config();
  const Axis sd = self_dual_axis(cfg.phase_space_N);
  json j = {{"command", what}};
  std::ostringstream o;
  int rc = kPass;
  auto need_out = [&] {
    if (out.empty()) fail(ErrorKind::validation, "ps ", what, " needs --out");
  };
  if (what == "wigner") {
    need_out();
    GridFunctionX f = read_grid_x(in);
    GridFunctionX h = in2.empty() ? f : read_grid_x(in2);
    GridFunctionZ W = wigner_moyal(f, h);
    write_grid(out, W);
    o << "W(f, g) on " << W.nx() << " x " << W.np() << " points\n";
  } else if (what == "uphi") {
    need_out();
    GridFunctionX f = read_grid_x(in);
    WindowState win = in2.empty() ? WindowState::gaussian(f.axis) : WindowState(read_grid_x(in2));
    GridFunctionZ F = u_phi(f, win);
    write_grid(out, F);
    j["norm_in"] = f.norm();
    j["norm_out"] = F.norm();
    o << "|f| = " << f.norm() << ", |U f| = " << F.norm() << "\n";
  } else if (what == "aph") {
    need_out();
    GridFunctionZ F = read_grid_z(in);
    GaussianSymbol s = gaussian_symbol_from_json(read_json_file(symbol));
    GridFunctionZ G = a_ph_apply(sample_twisted(s, F.ax, F.ap), F);
    write_grid(out, G);
    o << "|F| = " << F.norm() << ", |A_ph F| = " << G.norm() << "\n";
  } else if (what == "covariance") {
    MetaplecticWord w = word_from_json(read_json_file(word));
    GaussianSymbol s = gaussian_symbol_from_json(read_json_file(symbol));
    WindowState win = WindowState::gaussian(sd);
    std::vector<GridFunctionX> battery{state_or_default(in, sd)};
    double r = metaplectic_covariance_check(w, s, battery, win);
    j["residual"] = r;
    j["tolerance"] = tol;
    j["pass"] = r <= tol;
    o << "covariance residual " << r << " (tol " << tol << ")\n";
    if (!(r <= tol)) rc = kFail;
  } else if (what == "cr-residual") {
    GridFunctionZ F = read_grid_z(in);
    double r = cr_condition_residual(F);
    j["residual"] = r;
    o << "CR residual " << r << "\n";
  } else {
    fail(ErrorKind::validation, "unknown ps command '", what, "'");
  }
  emit(g, j, o.str());
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symplectic index and metaplectic verification toolkit", "sympl"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--config", g.config_path, "TOML config file")->check(CLI::ExistingFile);
  app.add_flag("--json", g.as_json, "print JSON instead of text");

  std::function<int()> action;

  std::string suite, out;
  auto* verify = app.add_subcommand("verify", "run an identity suite");
  verify->add_option("suite", suite, "kashiwara|alm|maslov|cayley|nu|metaplectic|phase-space|all")->required();
  verify->add_option("--out", out, "write the JSON report here");
  verify->callback([&] { action = [&] { return cmd_verify(g, suite, out); }; });

  std::string spec;
  auto* gen = app.add_subcommand("gen", "generate an instance corpus");
  gen->add_option("spec", spec, "corpus spec JSON (defaults when omitted)");
  gen->add_option("--out", out, "output file");
  gen->callback([&] { action = [&] { return cmd_gen(g, spec, out); }; });

  std::string entity, route = "both";
  std::vector<std::string> inputs;
  int nu = 0;
  auto* compute = app.add_subcommand("compute", "evaluate one quantity from input files");
  compute->add_option("entity", entity, "tau|alm|mu-ell|nu|cayley|symbol")->required();
  compute->add_option("inputs", inputs, "input JSON files");
  compute->add_option("--nu", nu, "nu for symbol");
  compute->add_option("--route", route, "nu route")->check(CLI::IsMember({"free", "doubled", "both"}));
  compute->callback([&] { action = [&] { return cmd_compute(g, entity, inputs, nu, route); }; });

  std::string report_path;
  auto* report = app.add_subcommand("report", "print a saved report; exit code reflects pass/fail");
  report->add_option("path", report_path)->required()->check(CLI::ExistingFile);
  report->callback([&] { action = [&] { return cmd_report(g, report_path); }; });

  std::string path_file;
  auto* nucmd = app.add_subcommand("nu", "index nu of a symplectic path");
  nucmd->add_option("--path", path_file, "path JSON")->required();
  nucmd->add_option("--route", route)->check(CLI::IsMember({"free", "doubled", "both"}));
  nucmd->callback([&] { action = [&] { return run_nu(g, path_file, route); }; });

  std::string word, in, in2, matrix, symbol;
  auto* mp = app.add_subcommand("mp", "metaplectic operators on grids");
  mp->require_subcommand(1);
  auto* mp_apply = mp->add_subcommand("apply", "apply a word to a grid function");
  mp_apply->add_option("--word", word)->required();
  mp_apply->add_option("--in", in)->required();
  mp_apply->add_option("--out", out)->required();
  mp_apply->callback([&] { action = [&] { return cmd_mp_apply(g, word, in, out); }; });
  auto* mp_symbol = mp->add_subcommand("symbol", "Gaussian Weyl symbols of R_nu(S)");
  mp_symbol->add_option("--matrix", matrix)->required();
  mp_symbol->add_option("--nu", nu)->required();
  mp_symbol->callback([&] { action = [&] { return cmd_mp_symbol(g, matrix, nu); }; });

  double tol = 1e-5;
  auto* ps = app.add_subcommand("ps", "phase-space Weyl calculus");
  ps->require_subcommand(1);
  const std::pair<const char*, const char*> ps_cmds[] = {
      {"wigner", "Wigner-Moyal transform W(f, g) of grid functions"},
      {"uphi", "wave-packet transform U_phi f (Gaussian window by default)"},
      {"aph", "apply A_ph for a Gaussian symbol to a phase-space grid"},
      {"covariance", "metaplectic covariance residual for a word and a symbol"},
      {"cr-residual", "Cauchy-Riemann residual (membership in the range of U_phi0)"}};
  for (const auto& [name, help] : ps_cmds) {
    auto* sc = ps->add_subcommand(name, help);
    std::string nm = name;
    sc->add_option("--in", in, "input grid");
    if (nm == "wigner" || nm == "uphi") sc->add_option("--with", in2, nm == "wigner" ? "second function" : "window");
    if (nm != "covariance" && nm != "cr-residual") sc->add_option("--out", out)->required();
    if (nm == "aph" || nm == "covariance") sc->add_option("--symbol", symbol, "Gaussian symbol JSON")->required();
    if (nm == "covariance") {
      sc->add_option("--word", word)->required();
      sc->add_option("--tol", tol);
    } else {
      sc->get_option("--in")->required();
    }
    sc->callback([&, nm] { action = [&, nm] { return cmd_ps(g, nm, in, in2, out, word, symbol, tol); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (seed_opt->count()) g.seed = seed;

  try {
    return action ? action() : kUsage;
  } catch (const Error& e) {
    std::cerr << "sympl: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::validation:
      case ErrorKind::io:
      case ErrorKind::dimension: return kUsage;
      default: return kFail;
    }
  } catch (const std::exception& e) {
    std::cerr << "sympl: " << e.what() << "\n";
    return kUsage;
  }
}
