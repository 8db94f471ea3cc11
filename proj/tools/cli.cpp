#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"
#include "ldpkit/cgf.hpp"
#include "ldpkit/errors.hpp"
#include "ldpkit/format.hpp"
#include "ldpkit/kernel.hpp"
#include "ldpkit/kernel_rate.hpp"
#include "ldpkit/metrics.hpp"
#include "ldpkit/montecarlo.hpp"
#include "ldpkit/path.hpp"
#include "ldpkit/selftest.hpp"

namespace ldp::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Tables

struct Null {};
using Cell = std::variant<Null, std::string, ExtReal, Vec, long>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string csv_cell(const Cell& c) {
  struct {
    std::string operator()(Null) const { return ""; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(ExtReal x) const { return format_ext(x); }
    std::string operator()(long n) const { return std::to_string(n); }
    std::string operator()(const Vec& v) const {
      std::string out;
      for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "/" : "") + format_double(v[i]);
      return out;
    }
  } visit;
  return std::visit(visit, c);
}

json json_number(ExtReal x) {
  if (x.is_finite()) return x.value();
  return x.to_string();
}

json json_cell(const Cell& c) {
  struct {
    json operator()(Null) const { return nullptr; }
    json operator()(const std::string& s) const { return s; }
    json operator()(ExtReal x) const { return json_number(x); }
    json operator()(long n) const { return n; }
    json operator()(const Vec& v) const {
      if (v.size() == 1) return v[0];
      json arr = json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
      return arr;
    }
  } visit;
  return std::visit(visit, c);
}

void emit_table(const Table& t, const std::string& format, std::ostream& out) {
  if (format == "json") {
    json arr = json::array();
    for (const auto& row : t.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
      arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Input helpers

/// A point written as `v` or `v1/v2/...`.
Vec parse_point(const std::string& token) {
  const auto parts = split(token, '/');
  Vec v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(parts[i]);
  return v;
}

std::vector<Vec> parse_points(const std::vector<std::string>& tokens, int dimension, const char* flag) {
  std::vector<Vec> out;
  for (const auto& t : tokens) {
    Vec v = parse_point(t);
    if (v.size() != dimension)
      throw ConfigError(std::string(flag) + " value '" + t + "' does not match the model dimension " +
                        std::to_string(dimension));
    out.push_back(std::move(v));
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Output options shared by every subcommand.
struct Output {
  std::string format = "csv";
  std::string path;
};

void add_output(CLI::App* cmd, Output& o) {
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output,-o", o.path, "Write the result to this file instead of stdout");
}

/// Writes via `write` to the --output file or to `out`.
template <class Write>
void deliver(const Output& o, std::ostream& out, Write write) {
  if (o.path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.path);
  if (!file) throw ConfigError("cannot write '" + o.path + "'");
  write(file);
  if (!file) throw ConfigError("failed writing '" + o.path + "'");
}

struct ModelKernel {
  std::string model;
  std::string kernel;
};

void add_model(CLI::App* cmd, ModelKernel& mk, bool kernel_required = true) {
  cmd->add_option("--model", mk.model, "Increment law, e.g. gaussian:mu=0,sigma=1, cexp, rademacher")->required();
  auto* k = cmd->add_option("--kernel", mk.kernel, "Weight function: affine:a,b, const:c or pwl:t0:v0,...");
  if (kernel_required) k->required();
}

// ---------------------------------------------------------------------------
// Commands

struct RateArgs {
  ModelKernel mk;
  std::vector<std::string> x;
  double tol = 0.0;
  Output out;
};

Table run_rate(const RateArgs& a) {
  const ModelPtr model = parse_model(a.mk.model);
  const Kernel kernel = parse_kernel(a.mk.kernel);
  const auto xs = parse_points(a.x, model->dimension(), "--x");
  Table t{{"x", "i_f_conjugate", "i_f_explicit", "branch", "lambda_star"}, {}};
  for (const Vec& x : xs) {
    const KernelRateResult conj = i_f_conjugate(*model, kernel, x, a.tol);
    std::optional<KernelRateResult> expl;
    try {
      expl = i_f_explicit(*model, kernel, x, a.tol);
    } catch (const UnsupportedError&) {
      // Only the conjugate route is defined there; the cell stays empty.
    }
    const Branch branch = expl ? expl->branch : conj.branch;
    const auto& lambda = conj.lambda_star ? conj.lambda_star : (expl ? expl->lambda_star : std::nullopt);
    t.rows.push_back({x, conj.value, expl ? Cell(expl->value) : Cell(Null{}), to_string(branch),
                      lambda ? Cell(*lambda) : Cell(Null{})});
  }
  return t;
}

struct EfArgs {
  ModelKernel mk;
  std::vector<std::string> lambda;
  Output out;
};

Table run_ef(const EfArgs& a) {
  const ModelPtr model = parse_model(a.mk.model);
  const Kernel kernel = parse_kernel(a.mk.kernel);
  const auto lams = parse_points(a.lambda, model->dimension(), "--lambda");
  Table t{{"lambda", "e_f", "e_f_grad"}, {}};
  for (const Vec& l : lams) {
    const ExtReal v = e_f(*model, kernel, l);
    Cell grad = Null{};
    if (v.is_finite()) {
      const Vec g = e_f_grad(*model, kernel, l);
      if (g.size() == 1) grad = std::isfinite(g[0]) ? ExtReal(g[0]) : (g[0] > 0 ? ExtReal::inf() : ExtReal::neg_inf());
      else grad = g;
    }
    t.rows.push_back({l, v, grad});
  }
  return t;
}

struct MinimizerArgs {
  ModelKernel mk;
  std::string x;
  double tol = 0.0;
  int cells = 4096;
  int plot = 0;
  Output out;
};

void run_minimizer(const MinimizerArgs& a, std::ostream& os) {
  const ModelPtr model = parse_model(a.mk.model);
  const Kernel kernel = parse_kernel(a.mk.kernel);
  const Vec x = parse_points({a.x}, model->dimension(), "--x").front();
  const CadlagPath h = minimizer(*model, kernel, x, a.tol, a.cells);
  if (a.plot > 0) {
    // Plot-ready samples of t -> h(t), with left limits at jumps.
    Table t{{"t", "h"}, {}};
    std::vector<double> ts;
    for (int i = 0; i <= a.plot; ++i) ts.push_back(static_cast<double>(i) / a.plot);
    for (const auto& j : h.jumps()) ts.push_back(j.time);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (double s : ts) {
      if (s > 0 && std::any_of(h.jumps().begin(), h.jumps().end(), [&](const Jump& j) { return j.time == s; }))
        t.rows.push_back({ExtReal(s), h.left_limit(s)});
      t.rows.push_back({ExtReal(s), h.value(s)});
    }
    emit_table(t, a.out.format, os);
    return;
  }
  os << (a.out.format == "json" ? to_json(h) + "\n" : to_text(h));
}

struct IdcostArgs {
  ModelKernel mk;
  std::string path;
  Output out;
};

Table run_idcost(const IdcostArgs& a) {
  const ModelPtr model = parse_model(a.mk.model);
  std::optional<Kernel> kernel;
  if (!a.mk.kernel.empty()) kernel = parse_kernel(a.mk.kernel);
  const CadlagPath h = parse_path(read_file(a.path));
  Table t{{"i_d", "var"}, {}};
  std::vector<Cell> row{i_d(h, *model), ExtReal(var(h))};
  if (kernel) {
    t.columns.push_back("pair");
    row.push_back(pair(*kernel, h));
  }
  t.rows.push_back(std::move(row));
  return t;
}

struct MetricArgs {
  std::string name;
  std::string a;
  std::string b;
  Output out;
};

Table run_metric(const MetricArgs& m) {
  const CadlagPath g = parse_path(read_file(m.a));
  const CadlagPath h = parse_path(read_file(m.b));
  double v = 0.0;
  if (m.name == "rho2") v = rho_2(g, h);
  else if (m.name == "rho2p") v = rho_2_prime(g, h);
  else v = rho_star(g, h);
  return {{"metric", "value"}, {{m.name, ExtReal(v)}}};
}

struct McArgs {
  ModelKernel mk;
  std::vector<int> n;
  std::vector<double> a;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::string l;
  int threads = 0;
  bool plain = false;
  Output out;
};

Table run_mc(const McArgs& m) {
  const ModelPtr model = parse_model(m.mk.model);
  const Kernel kernel = parse_kernel(m.mk.kernel);
  Vec l;
  if (m.l.empty()) {
    if (model->dimension() != 1) throw ConfigError("--l is required when the model dimension exceeds 1");
    l = scalar_vec(1.0);
  } else {
    l = parse_points({m.l}, model->dimension(), "--l").front();
  }
  McOptions opt;
  opt.threads = m.threads;
  opt.tilted = !m.plain;
  const auto rows = empirical_rate_curve(*model, kernel, m.a, m.n, m.samples, m.seed, l, opt);
  Table t{{"n", "a", "rate_estimate", "std_error", "i_f", "exact_rate"}, {}};
  for (const auto& r : rows) {
    const Cell est = r.rate_estimate == std::numeric_limits<double>::infinity() ? Cell(ExtReal::inf())
                                                                               : Cell(ExtReal(r.rate_estimate));
    t.rows.push_back({static_cast<long>(r.n), ExtReal(r.a), est,
                      std::isfinite(r.std_error) ? Cell(ExtReal(r.std_error)) : Cell(Null{}), ExtReal(r.i_f),
                      r.exact_rate ? Cell(ExtReal(*r.exact_rate)) : Cell(Null{})});
  }
  return t;
}

void add_mc_options(CLI::App* cmd, McArgs& m, bool lists) {
  add_model(cmd, m.mk);
  if (lists) {
    cmd->add_option("--n", m.n, "Sample sizes")->required()->delimiter(',')->check(CLI::PositiveNumber);
    cmd->add_option("--a", m.a, "Levels of the event l . W_n >= a")->required()->delimiter(',');
  } else {
    cmd->add_option("--n", m.n, "Sample size")->required()->expected(1)->check(CLI::PositiveNumber);
    cmd->add_option("--a", m.a, "Level of the event l . W_n >= a")->required()->expected(1);
  }
  cmd->add_option("--samples", m.samples, "Monte Carlo samples per row")->check(CLI::Range(100, 1 << 30));
  cmd->add_option("--seed", m.seed, "Random seed");
  cmd->add_option("--l", m.l, "Unit direction l, written v1/v2/... (default 1 in one dimension)");
  cmd->add_option("--threads", m.threads, "Worker threads (default LDPKIT_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--plain", m.plain, "Plain Monte Carlo without tilting");
  add_output(cmd, m.out);
}

Table run_selftest_table(std::uint64_t seed, bool* all_passed) {
  Table t{{"suite", "checks", "failures", "worst", "status"}, {}};
  *all_passed = true;
  for (const auto& r : run_selftest(seed)) {
    *all_passed = *all_passed && r.passed();
    t.rows.push_back({r.name, r.checks, r.failures, ExtReal(r.worst), std::string(r.passed() ? "pass" : "FAIL")});
  }
  return t;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Large-deviation rate functions, path metrics and Monte Carlo checks", "ldpkit"};
  app.require_subcommand(1);

  RateArgs rate;
  auto* c_rate = app.add_subcommand("rate", "I_f(x) by the conjugate and explicit routes");
  add_model(c_rate, rate.mk);
  c_rate->add_option("--x", rate.x, "Points x, comma separated; vectors as v1/v2")->required()->delimiter(',');
  c_rate->add_option("--tol", rate.tol, "Solver tolerance (0 selects the default)")->check(CLI::NonNegativeNumber);
  add_output(c_rate, rate.out);

  EfArgs ef;
  auto* c_ef = app.add_subcommand("ef", "E_f(lambda) and its gradient");
  add_model(c_ef, ef.mk);
  c_ef->add_option("--lambda", ef.lambda, "Points lambda, comma separated")->required()->delimiter(',');
  add_output(c_ef, ef.out);

  MinimizerArgs mz;
  auto* c_min = app.add_subcommand("minimizer", "Minimising path of I_D under the pairing constraint");
  add_model(c_min, mz.mk);
  c_min->add_option("--x", mz.x, "Target x (v1/v2 for vectors)")->required();
  c_min->add_option("--tol", mz.tol, "Solver tolerance (0 selects the default)")->check(CLI::NonNegativeNumber);
  c_min->add_option("--cells", mz.cells, "Uniform cells of the path grid")->check(CLI::Range(1, 1 << 22));
  c_min->add_option("--plot", mz.plot, "Emit t,h samples at this many intervals instead of the path")
      ->check(CLI::NonNegativeNumber);
  add_output(c_min, mz.out);

  IdcostArgs idc;
  auto* c_id = app.add_subcommand("idcost", "Action i_d of a path file (and its pairing with --kernel)");
  add_model(c_id, idc.mk, false);
  c_id->add_option("--path", idc.path, "Path file (text or JSON form)")->required();
  add_output(c_id, idc.out);

  MetricArgs met;
  auto* c_met = app.add_subcommand("metric", "Distance between two path files");
  c_met->add_option("name", met.name, "rho2, rho2p or rhostar")->required()->check(CLI::IsMember({"rho2", "rho2p", "rhostar"}));
  c_met->add_option("a", met.a, "First path file")->required();
  c_met->add_option("b", met.b, "Second path file")->required();
  add_output(c_met, met.out);

  McArgs mc;
  auto* c_mc = app.add_subcommand("mc", "Tilted Monte Carlo estimate of one tail probability");
  add_mc_options(c_mc, mc, false);

  McArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Empirical rate curve over sample sizes and levels");
  add_mc_options(c_sweep, sweep, true);

  std::uint64_t st_seed = 1;
  Output st_out;
  auto* c_self = app.add_subcommand("selftest", "Run the invariant suites and report pass/fail counts");
  c_self->add_option("--seed", st_seed, "Random seed of the property suites");
  add_output(c_self, st_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (c_rate->parsed()) {
      const Table t = run_rate(rate);
      deliver(rate.out, out, [&](std::ostream& os) { emit_table(t, rate.out.format, os); });
    } else if (c_ef->parsed()) {
      const Table t = run_ef(ef);
      deliver(ef.out, out, [&](std::ostream& os) { emit_table(t, ef.out.format, os); });
    } else if (c_min->parsed()) {
      std::ostringstream buf;
      run_minimizer(mz, buf);
      deliver(mz.out, out, [&](std::ostream& os) { os << buf.str(); });
    } else if (c_id->parsed()) {
      const Table t = run_idcost(idc);
      deliver(idc.out, out, [&](std::ostream& os) { emit_table(t, idc.out.format, os); });
    } else if (c_met->parsed()) {
      const Table t = run_metric(met);
      deliver(met.out, out, [&](std::ostream& os) { emit_table(t, met.out.format, os); });
    } else if (c_mc->parsed() || c_sweep->parsed()) {
      const McArgs& m = c_mc->parsed() ? mc : sweep;
      const Table t = run_mc(m);
      deliver(m.out, out, [&](std::ostream& os) { emit_table(t, m.out.format, os); });
    } else if (c_self->parsed()) {
      bool ok = false;
      const Table t = run_selftest_table(st_seed, &ok);
      deliver(st_out, out, [&](std::ostream& os) { emit_table(t, st_out.format, os); });
      long failed = 0;
      for (const auto& row : t.rows) failed += std::get<std::string>(row[4]) == "pass" ? 0 : 1;
      err << "selftest: " << (t.rows.size() - failed) << "/" << t.rows.size() << " suites passed\n";
      return ok ? kOk : kFailure;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kDomain;
  } catch (const ConvergenceError& e) {
    err << "no convergence: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace ldp::cli
