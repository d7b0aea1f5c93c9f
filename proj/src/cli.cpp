#include "saddle/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "saddle/analysis.hpp"
#include "saddle/extension.hpp"
#include "saddle/layer.hpp"
#include "saddle/maximal.hpp"
#include "saddle/saddle.hpp"
#include "saddle/stability.hpp"

namespace saddle::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

bool parse_real(const std::string& s, double& x) {
  try {
    std::size_t pos = 0;
    x = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(x);
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_int(const std::string& s, int& x) {
  try {
    std::size_t pos = 0;
    x = std::stoi(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool valid_value(const SchemaEntry& e, const std::string& v) {
  double x;
  int n;
  if (e.type == "real") return parse_real(v, x);
  if (e.type == "int") return parse_int(v, n);
  if (e.type == "reals") {
    for (const auto& w : split_list(v))
      if (!parse_real(w, x)) return false;
    return true;
  }
  return true;
}

const SchemaEntry* find_entry(const std::string& section, const std::string& key) {
  for (const auto& e : schema())
    if (e.section == section && e.key == key) return &e;
  return nullptr;
}

// rounds to 12 significant digits so the JSON text matches the CSV formatting
double r12(double x) { return std::isfinite(x) ? std::stod(format_number(x)) : x; }

nlohmann::json jnum(double x) {
  if (!std::isfinite(x)) return format_number(x);
  return r12(x);
}

nlohmann::json jlist(const std::vector<double>& xs) {
  auto a = nlohmann::json::array();
  for (double x : xs) a.push_back(jnum(x));
  return a;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ValidationError("cannot write " + p.string());
  os << text;
}

template <class Fn>
void write_csv(const std::filesystem::path& p, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_file(p, os.str());
}

NonlinearityKind kind_of(const std::string& s) {
  if (s == "allen_cahn") return NonlinearityKind::allen_cahn;
  if (s == "peierls_nabarro") return NonlinearityKind::peierls_nabarro;
  throw ValidationError("unknown nonlinearity '" + s + "'");
}

class Runner {
 public:
  Runner(const Config& c, const std::filesystem::path& out, const RunOptions& o) : cfg_(c), out_(out), opt_(o) {
    nl_ = make_nonlinearity(kind_of(cfg_.str("model", "nonlinearity")));
    m_ = cfg_.integer("model", "m");
    if (m_ < 1) throw ValidationError("model.m must be positive");
    threads_ = opt_.threads > 0 ? opt_.threads : cfg_.integer("run", "threads");
    seed_ = opt_.seed_set ? opt_.seed : std::uint64_t(cfg_.integer("run", "seed"));
  }

  nlohmann::json stage(const std::string& name) {
    if (name == "layer") return layer_stage();
    if (name == "saddle") return saddle_stage();
    if (name == "maximal") return maximal_stage();
    if (name == "asymptotics") return asymptotics_stage();
    if (name == "stability") return stability_stage();
    if (name == "hardy") return hardy_stage();
    throw ValidationError("unknown subcommand '" + name + "'");
  }

  int m() const { return m_; }
  int threads() const { return threads_; }
  std::uint64_t seed() const { return seed_; }

 private:
  GridSpec3 grid() const {
    const double R = cfg_.real("grid", "R");
    double L = cfg_.real("grid", "L");
    if (L <= 0) L = std::pow(R, cfg_.real("grid", "L_exponent"));
    return make_grid3(m_, R, L, cfg_.real("grid", "h"));
  }

  LayerOptions layer_options() const {
    LayerOptions lo;
    lo.damping = cfg_.real("layer", "damping");
    lo.max_iter = cfg_.integer("layer", "max_iter");
    const std::string lat = cfg_.str("layer", "lateral");
    if (lat == "far_field") lo.lateral = LateralClosure::far_field;
    else if (lat == "neumann") lo.lateral = LateralClosure::neumann;
    else throw ValidationError("layer.lateral must be far_field or neumann");
    return lo;
  }

  nlohmann::json layer_stage() {
    const GridSpec2 g{cfg_.real("layer", "x_max"), cfg_.real("layer", "lambda_max"), cfg_.real("layer", "h"),
                      cfg_.real("layer", "h")};
    const LayerProfile p = solve_layer(nl_, g, cfg_.real("layer", "tol"), layer_options());
    write_csv(out_ / "layer.csv", [&](std::ostream& os) { write_layer_csv(os, p); });
    nlohmann::json r;
    r["iterations"] = p.iterations;
    r["slope_at_zero"] = jnum(layer_slope_at_zero(p));
    if (nl_.kind == NonlinearityKind::peierls_nabarro) {
      double err = 0;
      for (int i = 0; i < g.nx(); ++i) err = std::max(err, std::abs(p.u0[i] - pn_closed_form(g.x(i), 0)));
      const double tol = cfg_.real("layer", "closed_form_tol");
      r["closed_form_sup_error"] = jnum(err);
      r["closed_form_tol"] = jnum(tol);
      r["closed_form_pass"] = err <= tol;
      verdicts_["layer_closed_form"] = err <= tol ? "pass" : "fail";
    }
    return r;
  }

  const SaddleState& minimizer() {
    if (!minimizer_) {
      DescentParams dp;
      dp.tol = cfg_.real("saddle", "tol");
      dp.energy_tol = cfg_.real("saddle", "energy_tol");
      dp.max_sweeps = cfg_.integer("saddle", "max_sweeps");
      minimizer_ = minimize_energy(nl_, grid(), dp);
    }
    return *minimizer_;
  }

  nlohmann::json saddle_stage() {
    const SaddleState& st = minimizer();
    const GridSpec3& g = st.v.grid;
    const Field3 full = odd_reflect(st.v);
    write_csv(out_ / "saddle_field.csv", [&](std::ostream& os) { write_field_csv(os, full, "u"); });
    write_csv(out_ / "saddle_energy.csv", [&](std::ostream& os) {
      os << "sweep,energy\n";
      for (std::size_t q = 0; q < st.energy_history.size(); ++q) os << q << "," << format_number(st.energy_history[q]) << "\n";
    });
    const ElResiduals el = euler_lagrange_residuals(st, nl_);
    nlohmann::json r;
    r["sweeps"] = st.sweeps;
    r["energy"] = jnum(st.energy_history.back());
    r["el_interior"] = jnum(el.interior);
    r["el_bottom"] = jnum(el.bottom);
    double lo = 1, hi = 0;
    for (int j = 0; j < g.nt(); ++j)
      for (int i = j + 1; i + 1 < g.ns(); ++i) lo = std::min(lo, st.v.at(i, j, 0)), hi = std::max(hi, st.v.at(i, j, 0));
    r["bottom_min"] = jnum(lo);
    r["bottom_max"] = jnum(hi);
    auto cyl = nlohmann::json::array();
    bool below = true;
    const Field3 zero(g, 0.0);
    for (double S : cfg_.reals("saddle", "cylinders")) {
      const EnergyRegion c{EnergyRegion::cylinder, S, S, false};
      const double e = discrete_energy(full, nl_, c), e0 = discrete_energy(zero, nl_, c);
      cyl.push_back({{"S", jnum(S)}, {"energy", jnum(e)}, {"zero_energy", jnum(e0)}});
      below = below && e < e0;
    }
    r["cylinders"] = cyl;
    verdicts_["saddle_below_zero_energy"] = below ? "pass" : "fail";
    verdicts_["saddle_open_wedge_bounds"] = (lo > 0 && hi < 1) ? "pass" : "fail";
    return r;
  }

  const LayerProfile& matched_layer() {
    if (!layer_) layer_ = std::make_unique<LayerProfile>(
                     solve_layer(nl_, layer_grid_for(grid()), cfg_.real("layer", "tol"), layer_options()));
    return *layer_;
  }

  const MaximalState& maximal() {
    if (!maximal_) {
      const LayerProfile& lay = matched_layer();
      barrier_ = barrier(lay, choose_K(lay, cfg_.real("maximal", "C_grad")));
      MonotoneOptions mo;
      mo.a = cfg_.real("maximal", "a");
      mo.tol = cfg_.real("maximal", "tol");
      mo.max_iter = cfg_.integer("maximal", "max_iter");
      maximal_ = monotone_iterate(nl_, grid(), barrier_, mo);
    }
    return *maximal_;
  }

  static nlohmann::json signed_json(const SignedCheck& c) {
    return {{"name", c.name}, {"worst", jnum(c.worst)}, {"s", jnum(c.s)}, {"t", jnum(c.t)}, {"lambda", jnum(c.lambda)}};
  }

  nlohmann::json maximal_stage() {
    const MaximalState& st = maximal();
    const GridSpec3& g = st.v.grid;
    write_csv(out_ / "maximal_field.csv", [&](std::ostream& os) { write_field_csv(os, odd_reflect(st.v), "v"); });
    write_csv(out_ / "monotone.csv", [&](std::ostream& os) { write_monotone_csv(os, st); });
    nlohmann::json r;
    r["iterations"] = st.iterations;
    r["shift_a"] = jnum(st.a);
    r["K"] = jnum(st.K);
    r["barrier"] = st.barrier_id;
    r["max_violation"] = jnum(st.max_violation);
    r["final_sup_diff"] = jnum(st.sup_diff.empty() ? 0.0 : st.sup_diff.back());
    const Field3 bar = barrier_field(g, barrier_);
    double over = 0;
    for (std::size_t q = 0; q < bar.values.size(); ++q) over = std::max(over, st.v.values[q] - bar.values[q]);
    r["barrier_excess"] = jnum(over);
    const MonotonicityReport mr = monotonicity_report(st.v, cfg_.real("maximal", "bc_lambda_fraction") * g.lambda_max);
    r["monotonicity"] = {signed_json(mr.ds_nonneg), signed_json(mr.dt_nonpos), signed_json(mr.dz_nonneg),
                         signed_json(mr.dy_nonneg)};
    r["dz_min"] = jnum(mr.dz_min);
    r["bc_s0"] = jnum(mr.bc_s0);
    r["bc_t0"] = jnum(mr.bc_t0);
    const double sign_tol = cfg_.real("maximal", "sign_tol");
    const bool mono = mr.ds_nonneg.worst <= sign_tol && mr.dt_nonpos.worst <= sign_tol &&
                      mr.dy_nonneg.worst <= sign_tol && mr.dz_min > 0;
    verdicts_["maximal_monotone_iteration"] = st.max_violation <= 1e-12 && over <= 0 ? "pass" : "fail";
    verdicts_["maximal_monotonicity"] = mono ? "pass" : "fail";
    if (cfg_.str("maximal", "check_minimizer") == "yes") {
      const MaximalityReport mx = maximality_check(st, minimizer().v);
      r["maximality_min_gap"] = jnum(mx.min_gap);
      verdicts_["maximality"] = mx.min_gap >= -1e-6 ? "pass" : "fail";
    }
    return r;
  }

  nlohmann::json asymptotics_stage() {
    const MaximalState& st = maximal();
    const auto rows = asymptotic_report(odd_reflect(st.v), matched_layer(), cfg_.reals("asymptotics", "radii"),
                                        cfg_.real("asymptotics", "band"));
    const GradientProfile gp = gradient_decay_check(st.v);
    write_csv(out_ / "asymptotic.csv", [&](std::ostream& os) { write_asymptotic_csv(os, rows); });
    write_csv(out_ / "gradient.csv", [&](std::ostream& os) { write_gradient_csv(os, gp); });
    nlohmann::json r;
    auto a = nlohmann::json::array();
    bool decreasing = true;
    for (std::size_t q = 0; q < rows.size(); ++q) {
      a.push_back({{"R", jnum(rows[q].R)}, {"sup_u_dev", jnum(rows[q].sup_u_dev)},
                   {"sup_grad_dev", jnum(rows[q].sup_grad_dev)}, {"nodes", rows[q].nodes}});
      if (q > 0) decreasing = decreasing && rows[q].sup_u_dev < rows[q - 1].sup_u_dev;
    }
    r["annuli"] = a;
    r["gradient_C"] = jnum(gp.C);
    r["gradient_decaying"] = gp.decaying;
    verdicts_["asymptotics_decreasing"] = decreasing ? "pass" : "fail";
    return r;
  }

  nlohmann::json stability_stage() {
    const MaximalState& st = maximal();
    const GridSpec3& g = st.v.grid;
    SearchOptions so;
    so.families = cfg_.words("stability", "families");
    so.certificate_margin = cfg_.real("stability", "margin");
    so.threads = threads_;
    const auto w = cfg_.reals("stability", "windows");
    if (w.size() % 2) throw ValidationError("stability.windows needs rho1,rho2 pairs");
    for (std::size_t q = 0; q < w.size(); q += 2) so.windows.push_back({w[q], w[q + 1]});
    const double ymax = g.s_max / std::sqrt(2.0);
    std::vector<double> as, Ns;
    for (double f : cfg_.reals("stability", "a_fractions")) as.push_back(f * ymax);
    for (double f : cfg_.reals("stability", "N_fractions")) Ns.push_back(std::floor(f * (g.lambda_max - 1)));
    const StabilityReport rep = instability_search(st.v, nl_, as, Ns, so);
    write_csv(out_ / "stability.csv", [&](std::ostream& os) { write_stability_csv(os, rep); });
    nlohmann::json r;
    r["rows"] = rep.rows.size();
    r["q_scaled"] = jnum(rep.q_scaled);
    r["best_ratio"] = jnum(rep.norm2 > 0 ? rep.q / rep.norm2 : 0.0);
    r["best"] = {{"phi_id", rep.best.phi_id}, {"a", jnum(rep.best.a)}, {"N", jnum(rep.best.N)},
                 {"rho1", jnum(rep.best.rho1)}, {"rho2", jnum(rep.best.rho2)}, {"q", jnum(rep.best.q)},
                 {"norm2", jnum(rep.best.norm2)}};
    r["verdict"] = to_string(rep.verdict);
    verdicts_["stability"] = to_string(rep.verdict);

    // comparison of the maximal state against its barrier on random perturbations
    const int samples = cfg_.integer("stability", "random_samples");
    if (samples > 0) {
      std::vector<Field3> xs;
      for (int q = 0; q < samples; ++q) xs.push_back(random_test_field(g, seed_ + std::uint64_t(q), false));
      const ComparisonReport cr = comparison_monotonicity(odd_reflect(st.v), odd_reflect(barrier_field(g, barrier_)), nl_, xs);
      r["comparison_worst_excess"] = jnum(cr.worst_excess);
      verdicts_["comparison"] = cr.holds ? "pass" : "fail";
    }
    return r;
  }

  nlohmann::json hardy_stage() {
    const int n = cfg_.integer("hardy", "n");
    if (n < 2 || n % 2) throw ValidationError("hardy.n must be an even integer >= 2");
    const int mh = n / 2;
    const double a = cfg_.real("hardy", "rho_min"), b = cfg_.real("hardy", "rho_max");
    const HardyResult h = hardy_rayleigh(mh, a, b, cfg_.integer("hardy", "nodes"));
    write_csv(out_ / "hardy.csv", [&](std::ostream& os) {
      os << "rho,phi\n";
      for (std::size_t q = 0; q < h.rho.size(); ++q) os << format_number(h.rho[q]) << "," << format_number(h.phi[q]) << "\n";
    });
    const double c = M_PI / std::log(b / a);
    const DimensionVerdict d = dimension_criterion(n);
    nlohmann::json r;
    r["n"] = n;
    r["rayleigh_min"] = jnum(h.value);
    r["hardy_constant"] = jnum((2 * mh - 3) * (2 * mh - 3) / 4.0);
    r["interval_minimum"] = jnum((2 * mh - 3) * (2 * mh - 3) / 4.0 + c * c);
    r["iterations"] = h.iterations;
    r["verdict"] = to_string(d);
    verdicts_["hardy"] = to_string(d);
    return r;
  }

 public:
  nlohmann::json verdicts_ = nlohmann::json::object();

 private:
  const Config& cfg_;
  std::filesystem::path out_;
  RunOptions opt_;
  Nonlinearity nl_;
  int m_ = 1;
  int threads_ = 1;
  std::uint64_t seed_ = 0;
  std::optional<SaddleState> minimizer_;
  std::unique_ptr<LayerProfile> layer_;
  Barrier barrier_;
  std::optional<MaximalState> maximal_;
};

nlohmann::json config_json(const Config& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [sec, kv] : c.values)
    for (const auto& [k, v] : kv) j[sec][k] = v;
  return j;
}

}  // namespace

const std::vector<SchemaEntry>& schema() {
  static const std::vector<SchemaEntry> s = {
      {"run", "threads", "int", "1", "worker threads for the instability search"},
      {"run", "seed", "int", "0", "seed for random perturbations"},
      {"model", "nonlinearity", "word", "allen_cahn", "allen_cahn or peierls_nabarro"},
      {"model", "m", "int", "1", "half dimension, n = 2m"},
      {"layer", "x_max", "real", "20", "layer box half width"},
      {"layer", "lambda_max", "real", "40", "layer box height"},
      {"layer", "h", "real", "0.05", "layer spacing"},
      {"layer", "tol", "real", "1e-10", "sup update tolerance"},
      {"layer", "damping", "real", "1", "fixed point damping"},
      {"layer", "max_iter", "int", "5000", "outer iteration cap"},
      {"layer", "lateral", "word", "far_field", "far_field or neumann"},
      {"layer", "closed_form_tol", "real", "5e-3", "pass level for the closed form comparison"},
      {"grid", "R", "real", "20", "radius of the (s,t) box"},
      {"grid", "L", "real", "0", "height; 0 means R^L_exponent"},
      {"grid", "L_exponent", "real", "0.75", "height exponent when L = 0"},
      {"grid", "h", "real", "0.5", "spacing"},
      {"saddle", "tol", "real", "1e-8", "Euler-Lagrange residual tolerance"},
      {"saddle", "energy_tol", "real", "1e-12", "energy decrease per sweep"},
      {"saddle", "max_sweeps", "int", "200000", "sweep cap"},
      {"saddle", "cylinders", "reals", "5,10", "radii S of the cylinders C_{S,S}"},
      {"maximal", "C_grad", "real", "2", "gradient bound used to pick K"},
      {"maximal", "a", "real", "-1", "shift; negative picks sup|f'| + 0.5"},
      {"maximal", "tol", "real", "1e-10", "sup difference of successive iterates"},
      {"maximal", "max_iter", "int", "5000", "iteration cap"},
      {"maximal", "sign_tol", "real", "1e-8", "tolerance of the sign checks"},
      {"maximal", "bc_lambda_fraction", "real", "0.5", "axis checks use lambda <= fraction * L"},
      {"maximal", "check_minimizer", "word", "no", "yes compares against the energy minimizer"},
      {"asymptotics", "radii", "reals", "5,10", "inner radii of the annuli"},
      {"asymptotics", "band", "real", "0", "annulus width; 0 means two cells"},
      {"stability", "families", "words", "hardy,sin", "profile families"},
      {"stability", "windows", "reals", "0.025,1,0.05,1,0.1,1,0.05,0.5", "rho1,rho2 pairs"},
      {"stability", "a_fractions", "reals", "0.25,0.5,1", "scales a as fractions of R/sqrt2"},
      {"stability", "N_fractions", "reals", "0.25,0.5,0.75", "cutoffs N as fractions of L - 1"},
      {"stability", "margin", "real", "1e-4", "certificate when Q < -margin |xi|^2"},
      {"stability", "random_samples", "int", "0", "random perturbations for the comparison check"},
      {"hardy", "n", "int", "8", "dimension n = 2m"},
      {"hardy", "rho_min", "real", "1e-3", "interval start"},
      {"hardy", "rho_max", "real", "1e3", "interval end"},
      {"hardy", "nodes", "int", "4000", "log-spaced nodes"},
  };
  return s;
}

std::string Config::str(const std::string& section, const std::string& key) const {
  const auto s = values.find(section);
  if (s == values.end() || !s->second.count(key)) throw ValidationError("missing key " + section + "." + key);
  return s->second.at(key);
}

double Config::real(const std::string& section, const std::string& key) const {
  double x;
  if (!parse_real(str(section, key), x)) throw ValidationError(section + "." + key + " is not a number");
  return x;
}

int Config::integer(const std::string& section, const std::string& key) const {
  int x;
  if (!parse_int(str(section, key), x)) throw ValidationError(section + "." + key + " is not an integer");
  return x;
}

std::vector<double> Config::reals(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : split_list(str(section, key))) {
    double x;
    if (!parse_real(w, x)) throw ValidationError(section + "." + key + " has a non-numeric entry");
    out.push_back(x);
  }
  return out;
}

std::vector<std::string> Config::words(const std::string& section, const std::string& key) const {
  return split_list(str(section, key));
}

Config parse_config(const std::string& text, const std::string& origin) {
  Config c;
  for (const auto& e : schema()) c.values[e.section][e.key] = e.default_value;
  std::istringstream is(text);
  std::string line, section;
  int no = 0;
  auto fail = [&](const std::string& msg) { throw ValidationError(origin + ":" + std::to_string(no) + ": " + msg); };
  while (std::getline(is, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!c.values.count(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (section.empty()) fail("key outside of a section");
    if (key.empty()) fail("empty key");
    const SchemaEntry* e = find_entry(section, key);
    if (!e) fail("unknown key " + section + "." + key);
    if (c.lines[section].count(key)) fail("duplicate key " + section + "." + key);
    if (val.empty()) fail("empty value for " + section + "." + key);
    if (!valid_value(*e, val)) fail("bad " + e->type + " value for " + section + "." + key + ": " + val);
    c.values[section][key] = val;
    c.lines[section][key] = no;
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot read config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), path);
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"layer", "saddle", "maximal", "asymptotics", "stability", "hardy", "all"};
  return s;
}

int run(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
        const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json summary;
  summary["subcommand"] = subcommand;
  summary["version"] = kVersion;
  summary["compiler"] = __VERSION__;
  int code = 0;
  std::filesystem::path out(out_dir);
  try {
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
      throw ValidationError("unknown subcommand '" + subcommand + "'");
    const Config cfg = load_config(config_path);
    summary["config"] = config_json(cfg);
    std::filesystem::create_directories(out);
    Runner r(cfg, out, opt);
    summary["threads"] = r.threads();
    summary["seed"] = r.seed();
    if (subcommand == "all") {
      for (const std::string s : {"layer", "saddle", "maximal", "asymptotics", "stability", "hardy"}) {
        if (s == "stability" && r.m() < 2) {
          summary["results"][s] = "skipped for m = 1";
          continue;
        }
        summary["results"][s] = r.stage(s);
      }
    } else {
      summary["results"][subcommand] = r.stage(subcommand);
    }
    summary["verdicts"] = r.verdicts_;
    summary["status"] = "ok";
  } catch (const ConvergenceError& e) {
    summary["status"] = "convergence_error";
    summary["error"] = e.what();
    summary["history"] = jlist(e.history);
    code = 3;
  } catch (const Error& e) {
    summary["status"] = "validation_error";
    summary["error"] = e.what();
    code = 2;
  } catch (const std::filesystem::filesystem_error& e) {
    summary["status"] = "validation_error";
    summary["error"] = e.what();
    code = 2;
  }
  summary["wall_time_s"] = jnum(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  if (code) std::cerr << "error: " << summary["error"].get<std::string>() << "\n";
  std::error_code ec;
  if (std::filesystem::is_directory(out, ec)) write_file(out / "summary.json", summary.dump(2) + "\n");
  return code;
}

}  // namespace saddle::cli
