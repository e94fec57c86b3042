// Command-line front end: msle <subcommand> [flags]

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msle/affine.hpp"
#include "msle/algebra.hpp"
#include "msle/dynamics.hpp"
#include "msle/experiments.hpp"
#include "msle/partition.hpp"

using namespace msle;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kCheckFailed = 3 };

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

using Cell = std::variant<std::string, double, long>;

std::string cell_text(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return *s;
  if (auto d = std::get_if<double>(&c)) return fmt(*d);
  return std::to_string(std::get<long>(c));
}

ordered_json cell_json(const Cell& c) {
  if (auto s = std::get_if<std::string>(&c)) return *s;
  if (auto d = std::get_if<double>(&c)) return std::stod(fmt(*d));
  return std::get<long>(c);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// Effective configuration, printed before every result.
using Config = std::vector<std::pair<std::string, Cell>>;

struct Output {
  std::string format = "csv";
  std::string path;

  void emit(const std::string& command, const Config& config, const Table& table) const {
    std::ofstream file;
    if (!path.empty()) {
      file.open(path);
      if (!file) throw UsageError("cannot open output file " + path);
    }
    std::ostream& os = path.empty() ? std::cout : file;
    if (format == "json") {
      ordered_json j;
      j["command"] = command;
      ordered_json cfg = ordered_json::object();
      for (const auto& [k, v] : config) cfg[k] = cell_json(v);
      j["config"] = cfg;
      j["rows"] = ordered_json::array();
      for (const auto& row : table.rows) {
        ordered_json r = ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[table.columns[i]] = cell_json(row[i]);
        j["rows"].push_back(r);
      }
      os << j.dump(2) << '\n';
      return;
    }
    os << "# command=" << command << '\n';
    for (const auto& [k, v] : config) os << "# " << k << '=' << cell_text(v) << '\n';
    if (format == "pretty") {
      std::vector<std::size_t> width(table.columns.size());
      for (std::size_t i = 0; i < width.size(); ++i) width[i] = table.columns[i].size();
      for (const auto& row : table.rows)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], cell_text(row[i]).size());
      auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          os << cells[i] << std::string(width[i] - cells[i].size() + 2, ' ');
        }
        os << '\n';
      };
      line(table.columns);
      for (const auto& row : table.rows) {
        std::vector<std::string> cells;
        for (const auto& c : row) cells.push_back(cell_text(c));
        line(cells);
      }
      return;
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
      os << '\n';
    }
  }
};

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
  return s;
}

std::string list_text(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

void add_format(CLI::App* cmd, Output& out) {
  cmd->add_option("--format", out.format, "csv | json | pretty")
      ->check(CLI::IsMember({"csv", "json", "pretty"}))
      ->capture_default_str();
  cmd->add_option("--out", out.path, "output file (default: standard output)");
}

// ---------------------------------------------------------------- params

int cmd_params(int k, const Output& out) {
  if (k < 1) throw UsageError("--k must be at least 1");
  const ModelParams p = model_params(k);
  Table t{{"k", "kappa", "kappa_value", "tau", "tau_value", "c", "c_value", "h_1", "h_1_value",
           "h_2", "h_2_value", "delta_0", "delta_0_value", "d_eff_0", "delta_2", "delta_2_value",
           "d_eff_2"},
          {}};
  std::vector<Cell> row{static_cast<long>(k),
                        to_string(p.kappa),
                        to_double(p.kappa),
                        to_string(p.tau),
                        to_double(p.tau),
                        to_string(p.central_charge),
                        to_double(p.central_charge),
                        to_string(p.weight_of(1)),
                        to_double(p.weight_of(1)),
                        std::string("NA"),
                        std::string("NA")};
  if (k >= 2) {
    row[9] = to_string(p.weight_of(2));
    row[10] = to_double(p.weight_of(2));
  }
  const BesselReduction b0 = bessel_reduction(p, 0);
  row.insert(row.end(), {to_string(b0.delta), to_double(b0.delta), to_string(b0.d_eff)});
  if (k >= 2) {
    const BesselReduction b2 = bessel_reduction(p, 2);
    row.insert(row.end(), {to_string(b2.delta), to_double(b2.delta), to_string(b2.d_eff)});
  } else {
    row.insert(row.end(), {std::string("NA"), std::string("NA"), std::string("NA")});
  }
  t.rows.push_back(row);
  out.emit("params", {{"k", static_cast<long>(k)}}, t);
  return kOk;
}

// -------------------------------------------------------- crossing-table

int cmd_crossing_table(const std::vector<int>& ks, std::vector<double> xs, const Output& out) {
  if (xs.empty())
    for (int i = 1; i <= 19; ++i) xs.push_back(0.05 * i);
  for (int k : ks)
    if (k < 1) throw UsageError("--k must be at least 1");
  for (double x : xs)
    if (!(x > 0.0 && x < 1.0)) throw UsageError("--x values must lie in (0, 1)");
  Table t{{"k", "x", "P_C1", "P_C2", "Z_C1", "Z_C2"}, {}};
  for (int k : ks) {
    const ModelParams p = model_params(k);
    for (double x : xs) {
      const BlockValues z = triple_blocks(p, {x});
      const CrossingProbability pr = crossing_probability(p, {x});
      t.rows.push_back({static_cast<long>(k), x, pr.p_c1, pr.p_c2, z.z_c1, z.z_c2});
    }
  }
  out.emit("crossing-table", {{"k", list_text(ks)}, {"x", list_text(xs)}}, t);
  return kOk;
}

// ------------------------------------------------------------ simulate

struct SimOptions {
  int k = 2;
  int m = 1;
  std::vector<double> x;
  int channel = 0;
  double dt = 1e-3;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  double delta_collide = 1e-4;
  std::vector<double> rates;
  double epsilon = 1e-6;
  int trace_samples = 100;
  bool zero_noise = false;
};

PartitionFunction simulation_partition(const ModelParams& p, int m, int channel) {
  if (m == 2) return PartitionFunction::double_channel(p, channel);
  if (m == 3) return PartitionFunction::triple(p, TripleBlock::Sum);
  return PartitionFunction::factorized(p, m);
}

int cmd_simulate(SimOptions o, const Output& out) {
  if (o.k < 1) throw UsageError("--k must be at least 1");
  if (o.m < 1) throw UsageError("--m must be at least 1");
  if (o.x.empty())
    for (int i = 0; i < o.m; ++i) o.x.push_back(i);
  if (static_cast<int>(o.x.size()) != o.m) throw UsageError("--x needs one position per driver");
  const ModelParams p = model_params(o.k);
  const PartitionFunction pf = simulation_partition(p, o.m, o.channel);
  const Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(o.x.data(), o.m);
  const Eigen::VectorXd rates = Eigen::Map<const Eigen::VectorXd>(o.rates.data(), o.rates.size());
  const DriverState init = DriverState::initial(x0, rates);
  RunConfig rc;
  rc.dt = o.dt;
  rc.horizon = o.horizon;
  rc.delta_collide = o.delta_collide * (o.m > 1 ? o.x.back() - o.x.front() : 1.0);
  rc.record_history = true;
  SampleStream stream = o.zero_noise ? SampleStream::silent() : SampleStream(o.seed, 0);
  const RunResult run = run_drivers(init, pf, rc, stream);
  const TraceSet traces = extract_traces(run.history, o.m, o.epsilon, o.trace_samples);

  Config cfg{{"k", static_cast<long>(o.k)},
             {"m", static_cast<long>(o.m)},
             {"x", list_text(o.x)},
             {"partition", pf.describe()},
             {"dt", o.dt},
             {"horizon", o.horizon},
             {"seed", static_cast<long>(o.seed)},
             {"delta_collide", rc.delta_collide},
             {"rates", list_text(std::vector<double>(init.rates.data(), init.rates.data() + o.m))},
             {"epsilon", o.epsilon},
             {"zero_noise", std::string(o.zero_noise ? "true" : "false")},
             {"final_time", run.final_state.t},
             {"topology", run.topology.to_string()}};

  Table tr{{"driver", "t", "re", "im"}, {}};
  for (int a = 0; a < o.m; ++a)
    for (const TracePoint& pt : traces.traces[a])
      tr.rows.push_back({static_cast<long>(a + 1), pt.t, pt.gap ? std::nan("") : pt.z.real(),
                         pt.gap ? std::nan("") : pt.z.imag()});
  Table ar{{"time", "first", "second"}, {}};
  for (const ArchEvent& ev : run.final_state.arches)
    ar.rows.push_back({ev.time, static_cast<long>(ev.first), static_cast<long>(ev.second)});

  Output trace_out = out;
  Output arch_out = out;
  if (!out.path.empty()) {
    trace_out.path = out.path + "_traces." + (out.format == "json" ? "json" : "csv");
    arch_out.path = out.path + "_arches." + (out.format == "json" ? "json" : "csv");
  }
  trace_out.emit("simulate/traces", cfg, tr);
  arch_out.emit("simulate/arches", cfg, ar);
  return kOk;
}

// ------------------------------------------------------------------ mc

struct McOptions {
  int k = 2;
  int m = 3;
  double x = 0.3;
  int channel = 0;
  double dt = 1e-3;
  double horizon = 500.0;
  int samples = 2000;
  std::uint64_t seed = 1;
  int workers = 1;
  double delta_collide = 1e-4;
  std::vector<double> rates;
};

int cmd_mc(const McOptions& o, const Output& out) {
  ExperimentConfig c;
  c.level = o.k;
  c.dt = o.dt;
  c.horizon = o.horizon;
  c.samples = o.samples;
  c.seed = o.seed;
  c.workers = o.workers;
  c.delta_collide_factor = o.delta_collide;
  c.rates = o.rates;
  if (o.k < 1) throw UsageError("--k must be at least 1");
  McEstimate e;
  double reference = 0.0;
  std::string reference_kind;
  if (o.m == 2) {
    if (!(o.x > 0.0)) throw UsageError("--x is the initial separation and must be positive");
    c.kind = PartitionKind::Double;
    c.channel = o.channel;
    c.positions = {0.0, o.x};
    c.validate();
    e = mc_double_arch(c);
    const ModelParams p = model_params(o.k);
    reference = bessel_hit_probability(to_double(bessel_reduction(p, o.channel).d_eff), o.x,
                                       p.kappa_value() * o.horizon);
    reference_kind = "bessel_continuum";
  } else if (o.m == 3) {
    if (!(o.x > 0.0 && o.x < 1.0)) throw UsageError("--x must lie in (0, 1)");
    c.kind = PartitionKind::Triple;
    c.positions = {0.0, o.x, 1.0};
    c.validate();
    e = mc_triple_crossing(c);
    reference = crossing_probability(model_params(o.k), {o.x}).p_c1;
    reference_kind = "hypergeometric";
  } else {
    throw UsageError("mc supports --m 2 (double arch) and --m 3 (triple crossing)");
  }
  const bool flagged = e.unresolved_fraction() > 0.02;
  Table t{{"digest", "estimate", "standard_error", "lower", "upper", "successes", "samples",
           "unresolved", "reference", "reference_kind", "z_score"},
          {{e.digest, e.estimate, e.standard_error, e.interval.lower, e.interval.upper, e.successes,
            e.samples, e.unresolved, reference, reference_kind, e.z_score(reference)}}};
  out.emit("mc",
           {{"k", static_cast<long>(o.k)},
            {"m", static_cast<long>(o.m)},
            {"x", o.x},
            {"channel", static_cast<long>(o.channel)},
            {"dt", o.dt},
            {"horizon", o.horizon},
            {"samples", static_cast<long>(o.samples)},
            {"seed", static_cast<long>(o.seed)},
            {"workers", static_cast<long>(o.workers)},
            {"delta_collide", c.delta_collide()},
            {"rates", list_text(o.rates)}},
           t);
  if (flagged) {
    std::cerr << "unresolved fraction " << fmt(e.unresolved_fraction()) << " exceeds 2%\n";
    return kCheckFailed;
  }
  return kOk;
}

// ---------------------------------------------------------- null-check

int cmd_null_check(int k, int j, std::optional<double> kappa, std::optional<double> tau,
                   const Output& out) {
  if (k < 1) throw UsageError("--k must be at least 1");
  if (j < 0 || j > k) throw UsageError("--j must lie in [0, k]");
  const ModelParams p = model_params(k);
  const double kv = kappa.value_or(p.kappa_value());
  const double tv = tau.value_or(p.tau_value());
  const NullResidual r = null_state_residual(k, j, kv, tv);
  const bool null = r.level_one < kNullTolerance && r.level_two < kNullTolerance;
  Table t{{"k", "j", "kappa", "tau", "r1", "r2", "null"},
          {{static_cast<long>(k), static_cast<long>(j), kv, tv, r.level_one, r.level_two,
            std::string(null ? "yes" : "no")}}};
  out.emit("null-check",
           {{"k", static_cast<long>(k)}, {"j", static_cast<long>(j)}, {"kappa", kv}, {"tau", tv},
            {"tolerance", kNullTolerance}},
           t);
  return null ? kOk : kCheckFailed;
}

// -------------------------------------------------------------- fusion

int cmd_fusion(int k, int m, bool list_paths, const Output& out) {
  if (k < 1) throw UsageError("--k must be at least 1");
  if (m < 0) throw UsageError("--m must be non-negative");
  Table t{{"j_final", "arches", "paths", "kostka", "topologies", "path_list"}, {}};
  // final weights above k are forbidden by the level-k fusion rules
  for (int j = m; j >= 0; j -= 2) {
    if (j > k) continue;
    const int n = (m - j) / 2;
    const long kostka_n = kostka(m, n);
    const long topologies = static_cast<long>(enumerate_arch_topologies(m, n).size());
    long paths = 0;
    std::string listing;
    if (j <= k) {
      const auto ps = enumerate_fusion_paths(k, m, j);
      paths = static_cast<long>(ps.size());
      if (list_paths)
        for (std::size_t i = 0; i < ps.size(); ++i) listing += (i ? ";" : "") + list_text(ps[i]);
    }
    t.rows.push_back({static_cast<long>(j), static_cast<long>(n), paths, kostka_n, topologies, listing});
  }
  out.emit("fusion", {{"k", static_cast<long>(k)}, {"m", static_cast<long>(m)}}, t);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple SLE / su(2)_k WZW toolkit"};
  app.require_subcommand(1);
  Output out;

  int k = 2;
  auto* params = app.add_subcommand("params", "SLE and CFT parameters at level k");
  params->add_option("--k", k, "level")->required();
  add_format(params, out);

  std::vector<int> ks{1, 2, 3, 4, 10};
  std::vector<double> xs;
  auto* table = app.add_subcommand("crossing-table", "exact triple-SLE crossing probabilities");
  table->add_option("--k", ks, "levels")->capture_default_str();
  table->add_option("--x", xs, "cross-ratios (default 0.05..0.95)");
  add_format(table, out);

  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "one seeded multiple-SLE realization");
  simulate->add_option("--k", sim.k)->capture_default_str();
  simulate->add_option("--m", sim.m)->capture_default_str();
  simulate->add_option("--x", sim.x, "initial positions (default 0..m-1)");
  simulate->add_option("--channel", sim.channel)->check(CLI::IsMember({0, 2}))->capture_default_str();
  simulate->add_option("--dt", sim.dt)->capture_default_str();
  simulate->add_option("--horizon", sim.horizon)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--delta-collide", sim.delta_collide, "relative to the initial spread")
      ->capture_default_str();
  simulate->add_option("--rates", sim.rates);
  simulate->add_option("--epsilon", sim.epsilon, "tip regularization")->capture_default_str();
  simulate->add_option("--trace-samples", sim.trace_samples)->capture_default_str();
  simulate->add_flag("--zero-noise", sim.zero_noise);
  add_format(simulate, out);

  McOptions mc;
  auto* mcc = app.add_subcommand("mc", "Monte Carlo arch / crossing estimates");
  mcc->add_option("--k", mc.k)->capture_default_str();
  mcc->add_option("--m", mc.m, "2: double arch, 3: triple crossing")->capture_default_str();
  mcc->add_option("--x", mc.x, "cross-ratio (m=3) or separation (m=2)")->capture_default_str();
  mcc->add_option("--channel", mc.channel)->check(CLI::IsMember({0, 2}))->capture_default_str();
  mcc->add_option("--dt", mc.dt)->capture_default_str();
  mcc->add_option("--horizon", mc.horizon)->capture_default_str();
  mcc->add_option("--samples", mc.samples)->capture_default_str();
  mcc->add_option("--seed", mc.seed)->capture_default_str();
  mcc->add_option("--workers", mc.workers)->capture_default_str();
  mcc->add_option("--delta-collide", mc.delta_collide, "relative to the initial spread")
      ->capture_default_str();
  mcc->add_option("--rates", mc.rates);
  add_format(mcc, out);

  int j = 1;
  std::optional<double> kappa, tau;
  auto* null = app.add_subcommand("null-check", "level-2 null vector residuals");
  null->add_option("--k", k)->required();
  null->add_option("--j", j, "spin label")->capture_default_str();
  null->add_option("--kappa", kappa);
  null->add_option("--tau", tau);
  add_format(null, out);

  int m = 4;
  bool list_paths = false;
  auto* fusion = app.add_subcommand("fusion", "fusion paths and arch topologies");
  fusion->add_option("--k", k)->required();
  fusion->add_option("--m", m)->required();
  fusion->add_flag("--paths", list_paths, "list the paths");
  add_format(fusion, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*params) return cmd_params(k, out);
    if (*table) return cmd_crossing_table(ks, xs, out);
    if (*simulate) return cmd_simulate(sim, out);
    if (*mcc) return cmd_mc(mc, out);
    if (*null) return cmd_null_check(k, j, kappa, tau, out);
    if (*fusion) return cmd_fusion(k, m, list_paths, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
