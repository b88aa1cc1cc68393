#include "umps_cli/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "umps/baseline.hpp"
#include "umps/canonical.hpp"
#include "umps/io.hpp"
#include "umps/models.hpp"
#include "umps/observables.hpp"
#include "umps/power_method.hpp"
#include "umps/synthetic.hpp"
#include "umps/vomps.hpp"

namespace umps::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header lines shared by all CSV outputs; `params` in registration order.
struct Header {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;

  void add(const std::string& key, const std::string& value) { params.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

  std::vector<std::string> lines() const {
    std::vector<std::string> out{"umps-csv/1 " + command, "umps " UMPS_VERSION};
    for (const auto& [k, v] : params) out.push_back(k + "=" + v);
    return out;
  }
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IOError("cannot write " + path.string());
  return os;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IOError("cannot create " + dir.string() + ": " + ec.message());
}

void apply_thread_cap() {
  const char* env = std::getenv("UMPS_THREADS");
  if (!env || !*env) return;
  int n = 0;
  const auto [end, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), n);
  if (ec != std::errc() || *end != '\0' || n <= 0) throw UsageError("UMPS_THREADS must be a positive integer");
  Eigen::setNbThreads(n);
}

// ---- truncate ---------------------------------------------------------------

struct TruncateArgs {
  std::string in;
  std::size_t chi = 0;
  double eta = 1e-10;
  std::size_t max_iter = 500;
  std::string init = "schmidt";
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool no_timing = false;
};

int truncate_cmd(const TruncateArgs& a, std::ostream& out) {
  const UniformMPS source = load_state(a.in);
  ensure_dir(a.out_dir);

  VompsConfig vc;
  vc.target_chi = {a.chi};
  vc.eta = a.eta;
  vc.max_iter = a.max_iter;
  vc.seed = a.seed;
  vc.init = a.init == "random" ? InitStrategy::random : InitStrategy::schmidt;
  VompsResult v = vomps_truncate(source, vc);
  const SchmidtTruncation s = schmidt_truncate(source, a.chi);
  if (a.no_timing)
    for (auto& r : v.report.iterations) r.wall_ms = 0.0;

  const double fid_v = fidelity_per_site(v.state, source);
  const double fid_s = fidelity_per_site(s.state, source);
  const double eps_s = epsilon_measure(s.state, source);

  Header h{"truncate", {}};
  h.add("in", fs::path(a.in).filename().string());
  h.add("chi_in", source.max_bond_dim());
  h.add("chi", a.chi);
  h.add("eta", a.eta);
  h.add("max_iter", a.max_iter);
  h.add("init", a.init);
  h.add("seed", std::to_string(a.seed));
  h.add("schmidt_fidelity", fid_s);
  h.add("schmidt_epsilon", eps_s);

  const fs::path dir(a.out_dir);
  save_state(v.state, dir / "truncate_vomps.json");
  save_state(s.state, dir / "truncate_schmidt.json");
  auto csv = open_out(dir / "truncate.csv");
  write_report_csv(csv, v.report, h.lines());

  out << "summary fidelity_vomps=" << format_double(fid_v) << " fidelity_schmidt=" << format_double(fid_s)
      << " epsilon_vomps=" << format_double(v.report.final_epsilon) << " epsilon_schmidt=" << format_double(eps_s)
      << " iterations=" << v.report.iterations.size() << " converged=" << v.report.converged << '\n';
  return v.report.converged ? ok : not_converged;
}

// ---- evolve -----------------------------------------------------------------

struct EvolveArgs {
  double delta = 0.5;
  double dt = 0.05;
  double t_max = 2.0;
  int order = 2;
  std::size_t chi = 64;
  double eta = 1e-10;
  std::size_t max_iter = 100;
  std::size_t sample_every = 1;
  std::string oracle;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

std::size_t parse_ed_oracle(const std::string& text) {
  const std::string prefix = "ed:";
  std::size_t n = 0;
  if (text.rfind(prefix, 0) == 0) {
    const char* b = text.data() + prefix.size();
    const char* e = text.data() + text.size();
    const auto [end, ec] = std::from_chars(b, e, n);
    if (ec == std::errc() && end == e && n >= 2 && n <= 20 && n % 2 == 0) return n;
  }
  throw UsageError("--oracle expects ed:L with even L in 2..20, got '" + text + "'");
}

int evolve_cmd(const EvolveArgs& a, std::ostream& out) {
  EvolveConfig c;
  c.xxz.delta = a.delta;
  c.xxz.dt = a.dt;
  c.xxz.order = a.order;
  c.xxz.validate();
  c.t_max = a.t_max;
  c.chi = a.chi;
  c.eta = a.eta;
  c.max_iter = a.max_iter;
  c.seed = a.seed;
  c.sample_every = a.sample_every;
  if (!(a.t_max >= 0.0) || a.chi == 0 || a.sample_every == 0) throw UsageError("evolve: bad --t-max, --chi or --sample-every");
  const std::size_t ed_len = a.oracle.empty() ? 0 : parse_ed_oracle(a.oracle);
  ensure_dir(a.out_dir);

  const auto rows = evolve_neel(c);
  std::vector<double> ed;
  if (ed_len) {
    const double sample_dt = a.dt * static_cast<double>(a.sample_every);
    ed = ed_evolve(ed_len, a.delta, rows.back().t + 0.5 * sample_dt, sample_dt).offset;
    ed.resize(rows.size());
  }

  Header h{"evolve", {}};
  h.add("delta", a.delta);
  h.add("dt", a.dt);
  h.add("t_max", a.t_max);
  h.add("order", std::to_string(a.order));
  h.add("chi", a.chi);
  h.add("eta", a.eta);
  h.add("max_iter", a.max_iter);
  h.add("sample_every", a.sample_every);
  h.add("oracle", a.oracle.empty() ? "none" : a.oracle);
  h.add("seed", std::to_string(a.seed));

  auto csv = open_out(fs::path(a.out_dir) / "evolve.csv");
  for (const auto& line : h.lines()) csv << "# " << line << '\n';
  csv << "t,staggered_offset,epsilon_last,chi_used" << (ed_len ? ",ed_offset" : "") << '\n';
  bool converged = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    converged = converged && r.converged;
    csv << format_double(r.t) << ',' << format_double(r.offset) << ',' << format_double(r.epsilon_last) << ','
        << r.chi_used;
    if (ed_len) {
      csv << ',' << format_double(ed[i]);
      worst = std::max(worst, std::abs(r.offset - ed[i]));
    }
    csv << '\n';
  }

  out << "summary steps=" << std::llround(rows.back().t / a.dt) << " final_offset=" << format_double(rows.back().offset)
      << " chi_used=" << rows.back().chi_used << " converged=" << converged;
  if (ed_len) out << " max_abs_deviation=" << format_double(worst);
  out << '\n';
  return converged ? ok : not_converged;
}

// ---- fixedpoint -------------------------------------------------------------

struct FixedpointArgs {
  double beta_rel = 1.01;
  std::string coupling = "fm";
  std::size_t chi = 16;
  // observables settle like the square root of this
  double tol = 1e-13;
  std::size_t max_iter = 500;
  double eta = 1e-10;
  std::size_t vomps_max_iter = 100;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool no_timing = false;
};

UniformMPS ising_initial_state(bool afm) {
  // tilted product states; the antiferromagnet needs a two-site cell
  std::vector<Tensor> sites{Tensor({1, 2, 1}, {1.0, 0.3})};
  if (afm) sites.push_back(Tensor({1, 2, 1}, {0.3, 1.0}));
  return mixed_canonical(sites);
}

int fixedpoint_cmd(const FixedpointArgs& a, std::ostream& out) {
  const bool afm = a.coupling == "afm";
  const IsingParams p{a.beta_rel * ising_beta_c(), afm ? -1 : 1};
  p.validate();
  const double f_exact = onsager_free_energy(p.beta);
  const double m_exact = onsager_magnetization(p.beta);
  ensure_dir(a.out_dir);

  PowerConfig c;
  c.chi = a.chi;
  c.max_iter = a.max_iter;
  c.tol = a.tol;
  c.eta = a.eta;
  c.vomps_max_iter = a.vomps_max_iter;
  c.seed = a.seed;
  c.impurity = ising_magnetization_tensor(p);
  c.beta = p.beta;
  c.reference = PowerReference{std::nullopt, m_exact, f_exact};
  PowerResult r = power_method(ising_mpo(p), ising_initial_state(afm), c);
  if (a.no_timing)
    for (auto& rec : r.records) rec.wall_ms = 0.0;

  Header h{"fixedpoint", {}};
  h.add("beta_rel", a.beta_rel);
  h.add("beta", p.beta);
  h.add("coupling", a.coupling);
  h.add("chi", a.chi);
  h.add("tol", a.tol);
  h.add("max_iter", a.max_iter);
  h.add("eta", a.eta);
  h.add("vomps_max_iter", a.vomps_max_iter);
  h.add("seed", std::to_string(a.seed));
  h.add("reference", "exact free energy and |m|; state = final iterate");

  const fs::path dir(a.out_dir);
  auto csv = open_out(dir / "fixedpoint.csv");
  write_power_csv(csv, r, h.lines());
  save_state(r.state, dir / "fixedpoint_state.json");

  out << "summary iterations=" << r.records.size() << " converged=" << r.converged << " period=" << r.period
      << " alternation=" << r.translation_alternation << " free_energy=" << format_double(r.free_energy)
      << " exact_free_energy=" << format_double(f_exact)
      << " free_energy_error=" << format_double(std::abs(r.free_energy - f_exact))
      << " magnetization=" << format_double(r.magnetization) << " exact_magnetization=" << format_double(m_exact)
      << " magnetization_error=" << format_double(std::abs(std::abs(r.magnetization) - m_exact)) << '\n';
  return r.converged ? ok : not_converged;
}

// ---- fidelity / synth -------------------------------------------------------

int fidelity_cmd(const std::string& a, const std::string& b, std::ostream& out) {
  out << format_double(fidelity_per_site(load_state(a), load_state(b))) << '\n';
  return ok;
}

struct SynthArgs {
  std::size_t chi = 16;
  std::size_t d = 2;
  std::size_t length = 1;
  double decay = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int synth_cmd(const SynthArgs& a, std::ostream& out) {
  if (a.chi == 0 || a.d == 0 || a.length == 0 || a.decay < 0.0) throw UsageError("synth: sizes must be positive");
  Rng rng(a.seed);
  const UniformMPS s = random_state(a.chi, a.d, a.length, rng, a.decay);
  const fs::path path(a.out);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  save_state(s, path);
  out << "wrote " << a.out << '\n';
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variational truncation of uniform matrix product states", "umps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", UMPS_VERSION);

  std::function<int()> action;

  TruncateArgs ta;
  auto* tr = app.add_subcommand("truncate", "Truncate a UMPS-JSON state variationally and by Schmidt values");
  tr->add_option("--in", ta.in, "Input UMPS-JSON state")->required();
  tr->add_option("--chi", ta.chi, "Target bond dimension")->required()->check(CLI::PositiveNumber);
  tr->add_option("--eta", ta.eta, "Convergence threshold on epsilon")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--max-iter", ta.max_iter, "Iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--init", ta.init, "Initial guess")->capture_default_str()->check(CLI::IsMember({"random", "schmidt"}));
  tr->add_option("--seed", ta.seed, "RNG seed")->capture_default_str();
  tr->add_option("--out-dir", ta.out_dir, "Output directory")->capture_default_str();
  tr->add_flag("--no-timing", ta.no_timing, "Write 0 in the wall_ms column");
  tr->callback([&] { action = [&] { return truncate_cmd(ta, out); }; });

  EvolveArgs ea;
  auto* ev = app.add_subcommand("evolve", "Neel quench of the XXZ chain by Trotter layers");
  ev->add_option("--delta", ea.delta, "Anisotropy")->capture_default_str();
  ev->add_option("--dt", ea.dt, "Trotter step")->capture_default_str();
  ev->add_option("--t-max", ea.t_max, "Final time")->capture_default_str();
  ev->add_option("--order", ea.order, "Trotter order")->capture_default_str()->check(CLI::IsMember({1, 2}));
  ev->add_option("--chi", ea.chi, "Bond dimension cap")->capture_default_str();
  ev->add_option("--eta", ea.eta, "Convergence threshold per layer")->capture_default_str();
  ev->add_option("--max-iter", ea.max_iter, "Iteration cap per layer")->capture_default_str();
  ev->add_option("--sample-every", ea.sample_every, "Write every n-th step")->capture_default_str();
  ev->add_option("--oracle", ea.oracle, "Exact reference, ed:L for an L-site ring");
  ev->add_option("--seed", ea.seed, "RNG seed")->capture_default_str();
  ev->add_option("--out-dir", ea.out_dir, "Output directory")->capture_default_str();
  ev->callback([&] { action = [&] { return evolve_cmd(ea, out); }; });

  FixedpointArgs fa;
  auto* fp = app.add_subcommand("fixedpoint", "Power method for the 2D Ising transfer MPO");
  fp->add_option("--beta-rel", fa.beta_rel, "Inverse temperature in units of the critical one")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fp->add_option("--coupling", fa.coupling, "Sign of the coupling")
      ->capture_default_str()
      ->check(CLI::IsMember({"fm", "afm"}));
  fp->add_option("--chi", fa.chi, "Bond dimension")->capture_default_str()->check(CLI::PositiveNumber);
  fp->add_option("--tol", fa.tol, "Stop when 1 - fidelity between iterates is below this")->capture_default_str();
  fp->add_option("--max-iter", fa.max_iter, "Power iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  fp->add_option("--eta", fa.eta, "Truncation threshold")->capture_default_str();
  fp->add_option("--vomps-max-iter", fa.vomps_max_iter, "Iteration cap per truncation")->capture_default_str();
  fp->add_option("--seed", fa.seed, "RNG seed")->capture_default_str();
  fp->add_option("--out-dir", fa.out_dir, "Output directory")->capture_default_str();
  fp->add_flag("--no-timing", fa.no_timing, "Write 0 in the wall_ms column");
  fp->callback([&] { action = [&] { return fixedpoint_cmd(fa, out); }; });

  std::string fid_a, fid_b;
  auto* fi = app.add_subcommand("fidelity", "Per-site fidelity of two UMPS-JSON states");
  fi->add_option("a", fid_a, "First state")->required();
  fi->add_option("b", fid_b, "Second state")->required();
  fi->callback([&] { action = [&] { return fidelity_cmd(fid_a, fid_b, out); }; });

  SynthArgs sa;
  auto* sy = app.add_subcommand("synth", "Write a random injective test state");
  sy->add_option("--chi", sa.chi, "Bond dimension")->capture_default_str();
  sy->add_option("--d", sa.d, "Physical dimension")->capture_default_str();
  sy->add_option("--length", sa.length, "Unit cell")->capture_default_str();
  sy->add_option("--decay", sa.decay, "Suppression of large bond indices")->capture_default_str();
  sy->add_option("--seed", sa.seed, "RNG seed")->capture_default_str();
  sy->add_option("--out", sa.out, "Output path")->required();
  sy->callback([&] { action = [&] { return synth_cmd(sa, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << UMPS_VERSION << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "umps: " << e.what() << '\n';
    return usage_or_io;
  }

  try {
    apply_thread_cap();
    return action();
  } catch (const SchemaError& e) {
    err << "umps: schema error at " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "umps: " << e.what() << '\n';
  }
  return usage_or_io;
}

}  // namespace umps::cli
