#include "lowreg/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>
#include <sstream>

#include "lowreg/config.hpp"
#include "lowreg/harness.hpp"
#include "lowreg/trees.hpp"

namespace lowreg {

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value configuration file");
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--out", o.out_path, "output file (default: standard output)");
  cmd->add_option("--override,-O", o.overrides, "key=value override, repeatable");
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig c = o.config_path.empty() ? RunConfig::defaults() : RunConfig::load(o.config_path);
  for (const auto& ov : o.overrides) c.apply_override(ov);
  if (o.seed) c.set("seed", std::to_string(*o.seed));
  return c;
}

int parse_order(const std::string& s) {
  if (s == "1/2") return 1;
  if (s == "1") return 2;
  if (s == "3/2") return 3;
  throw std::invalid_argument("tree_order must be 1/2, 1 or 3/2");
}

void cmd_simulate(const RunConfig& c, std::ostream& os) {
  const auto cfg = ExperimentConfig::from(c);
  const auto n = static_cast<std::size_t>(c.get_int("simulate_steps"));
  if (n == 0) throw std::invalid_argument("simulate_steps must be positive");
  const auto model = cfg.model();
  const auto v = make_initial_data(cfg.grid(), cfg.components(), cfg.data);
  const auto& source = c.get("noise_source");
  Trajectory tr;
  if (source == "path") {
    const auto path = sample_path(cfg, n * cfg.path_substeps, 0);
    tr = evolve(cfg.scheme, v, cfg.horizon, n, path, model, 1);
  } else if (source == "exact") {
    std::mt19937_64 rng(derive_seed(cfg.seed, 0, 2));
    const double t = cfg.horizon / static_cast<double>(n);
    NoiseProvider provider = [&](std::size_t) {
      if (scheme_is_manakov(cfg.scheme)) return sample_scalar_step_noise(3, t, rng);
      return sample_field_step_noise(model.phi, t, scheme_needs_integrals(cfg.scheme), rng);
    };
    tr = evolve(cfg.scheme, v, cfg.horizon, n, provider, model, 1);
  } else {
    throw std::invalid_argument("noise_source must be path or exact");
  }
  const bool spectra = c.get_bool("record_spectra");
  os << cfg.normalized(c).echo();
  os << "step,t,norm_l2,norm_h1,norm_h2";
  if (spectra)
    for (int comp = 0; comp < v.components(); ++comp)
      for (std::size_t m = 0; m < v.mode_count(); ++m)
        os << ",c" << comp << "_m" << m << "_re,c" << comp << "_m" << m << "_im";
  os << '\n';
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const auto& u = tr.states[i];
    os << tr.steps[i] << ',' << format_number(cfg.horizon * tr.steps[i] / static_cast<double>(n));
    for (double s : {0.0, 1.0, 2.0}) os << ',' << format_number(sobolev_norm(u, s));
    if (spectra)
      for (auto z : u.coefficients()) os << ',' << format_number(z.real()) << ',' << format_number(z.imag());
    os << '\n';
  }
}

void cmd_converge(const RunConfig& c, std::ostream& os) {
  const auto cfg = ExperimentConfig::from(c);
  const auto report = run_convergence(cfg);
  write_convergence_csv(os, report, cfg, cfg.normalized(c).echo());
}

void cmd_trees(const RunConfig& c, std::ostream& os) {
  const int order = parse_order(c.get("tree_order"));
  auto list = trees::generate(trees::Rule::cubic_nls(), order);
  std::stable_sort(list.begin(), list.end(), [](const trees::Tree& a, const trees::Tree& b) {
    return trees::named_index(a).value_or(99) < trees::named_index(b).value_or(99);
  });
  os << c.echo();
  os << "name,order,symmetry,upsilon,bracket\n";
  for (const auto& t : list) {
    const auto idx = trees::named_index(t);
    const std::string name = !idx ? "unnamed" : *idx == 0 ? "I(lambda)" : "T" + std::to_string(*idx);
    const std::string sym = idx && *idx == 0 ? "-" : std::to_string(trees::symmetry_factor(t.children.front()));
    os << name << ',' << trees::format_halves(trees::order_halves(t)) << ',' << sym << ','
       << trees::upsilon(t).to_string() << ',' << trees::bracket(t) << '\n';
  }
}

void cmd_probe(const RunConfig& c, std::ostream& os) {
  T4ProbeConfig p;
  const auto ks = c.get_int_list("probe_frequencies");
  if (ks.size() != 4) throw std::invalid_argument("probe_frequencies needs four entries");
  for (int i = 0; i < 4; ++i) p.k[i] = Frequency{static_cast<int>(ks[i]), 0, 0};
  p.exponents.clear();
  for (auto e : c.get_int_list("probe_exponents")) p.exponents.push_back(static_cast<int>(e));
  p.k3_ladder.clear();
  for (auto k : c.get_int_list("probe_k3")) p.k3_ladder.push_back(static_cast<int>(k));
  p.quadrature = static_cast<std::size_t>(c.get_int("probe_quadrature"));
  p.samples = static_cast<std::size_t>(c.get_int("probe_samples"));
  p.order_halves = static_cast<int>(2 * c.get_int("probe_order"));
  p.seed = c.get_uint("seed");
  p.threads = static_cast<unsigned>(c.get_int("threads"));
  const auto r = probe_t4(p);
  os << c.echo();
  os << "series,t,k3,rms_error,std_error\n";
  for (const auto& pt : r.t_series)
    os << "t," << format_number(pt.t) << ',' << pt.k3 << ',' << format_number(pt.rms_error) << ','
       << format_number(pt.se) << '\n';
  for (const auto& pt : r.k3_series)
    os << "k3," << format_number(pt.t) << ',' << pt.k3 << ',' << format_number(pt.rms_error) << ','
       << format_number(pt.se) << '\n';
  os << "# fit t slope=" << format_number(r.t_fit.slope) << " max_residual=" << format_number(r.t_fit.max_residual)
     << '\n';
  os << "# fit k3 slope=" << format_number(r.k3_fit.slope)
     << " max_residual=" << format_number(r.k3_fit.max_residual) << '\n';
}

void cmd_noise_check(const RunConfig& c, std::ostream& os) {
  NoiseCheckConfig n;
  n.samples = static_cast<std::size_t>(c.get_int("check_samples"));
  n.step = c.get_double("check_step");
  n.substeps = static_cast<std::size_t>(c.get_int("check_substeps"));
  n.ladder.clear();
  for (auto s : c.get_int_list("check_ladder")) n.ladder.push_back(static_cast<std::size_t>(s));
  n.seed = c.get_uint("seed");
  const auto r = noise_check(n);
  os << c.echo();
  os << "check,measured,theory,std_error,pass\n";
  for (const auto& row : r.rows)
    os << row.name << ',' << format_number(row.measured) << ',' << format_number(row.theory) << ','
       << format_number(row.std_error) << ',' << (row.pass ? "true" : "false") << '\n';
  for (std::size_t i = 0; i < r.cross_residual.size(); ++i) {
    os << "cross_residual_rms_substeps_" << r.cross_residual[i].first << ','
       << format_number(r.cross_residual[i].second) << ",,,\n";
    os << "real_projection_rms_substeps_" << r.real_projection[i].first << ','
       << format_number(r.real_projection[i].second) << ",,,\n";
  }
  os << "# fit cross_residual slope=" << format_number(r.cross_fit.slope) << '\n';
  os << "# fit real_projection slope=" << format_number(r.real_projection_fit.slope) << '\n';
  os << "# complex_convention_gap = " << format_number(r.complex_convention_gap) << '\n';
}

void cmd_stability(const RunConfig& c, std::ostream& os) {
  const auto cfg = ExperimentConfig::from(c);
  const auto deltas = c.get_double_list("stability_deltas");
  const auto steps = static_cast<std::size_t>(c.get_int("stability_steps"));
  const auto rows = stability_probe(cfg, deltas, steps);
  os << cfg.normalized(c).echo();
  os << "delta,ratio_median,ratio_max,difference_median\n";
  for (const auto& r : rows)
    os << format_number(r.delta) << ',' << format_number(r.ratio_median) << ',' << format_number(r.ratio_max)
       << ',' << format_number(r.difference_median) << '\n';
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-regularity integrators for stochastic Schroedinger equations"};
  app.require_subcommand(1);
  struct Command {
    const char* name;
    const char* help;
    void (*run)(const RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"simulate", "integrate one sample path and report norms per step", cmd_simulate},
      {"converge", "strong and pathwise convergence study", cmd_converge},
      {"trees", "list the decorated trees up to tree_order", cmd_trees},
      {"probe-t4", "local error of the T4 discretisation", cmd_probe},
      {"noise-check", "statistical checks of the noise objects", cmd_noise_check},
      {"stability", "sensitivity of the final state to the initial data", cmd_stability},
  };
  CommonOptions opts;
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    add_common(sub, opts);
    subs.emplace_back(sub, &cmd);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    const RunConfig config = resolve_config(opts);
    for (auto [sub, cmd] : subs) {
      if (!sub->parsed()) continue;
      if (opts.out_path.empty()) {
        cmd->run(config, out);
      } else {
        std::ostringstream buffer;
        cmd->run(config, buffer);
        std::ofstream file(opts.out_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write '" + opts.out_path + "'");
        file << buffer.str();
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace lowreg
