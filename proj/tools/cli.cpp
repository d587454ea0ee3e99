#include "cli.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <string_view>

#include "CLI11.hpp"
#include "json.hpp"
#include "mebd/dynamics.hpp"
#include "mebd/error.hpp"
#include "mebd/parallel.hpp"

#ifndef MEBD_VERSION
#define MEBD_VERSION "unknown"
#endif

namespace mebd::cli {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Calibration {
  int n_sites;
  const char* label;
  double tau;
  double value;
};

constexpr std::array<Calibration, 4> kTable{{
    {3, "010", 1.505, 0.943},
    {4, "1001", 1.819, 1.000},
    {6, "100110", 2.110, 0.992},
    {8, "10011001", 2.193, 0.988},
}};
constexpr double kValueTolerance = 0.01;
constexpr double kTauTolerance = 0.01;

struct Options {
  int n = 0;
  std::string init;
  std::string profile = "all-pairs";
  double tau_min = 0.0;
  double tau_max = 4.0;
  double tau_step = 0.005;
  std::string quantities = "mebd,e1_fixed,e_tilde";
  std::string partition;
  std::string out;
  std::string threads = "auto";
  bool json = false;
  double tau = 0.0;
  std::vector<int> n_list{3, 4, 6, 8};
  std::string csv;
  double min_value = kDefaultMinPeak;
  std::string quantity = "mebd";
  std::string config;
};

std::string number(double v) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

int parse_threads(const std::string& text) {
  if (text == "auto") return 0;
  int value = -1;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0)
    throw UsageError("--threads expects a non-negative integer or 'auto', got '" + text + "'");
  return value;
}

CouplingKind parse_profile(const std::string& text) {
  const auto kind = parse_coupling_kind(text);
  if (!kind) throw UsageError("unknown profile '" + text + "' (all-pairs, nearest-neighbor)");
  return *kind;
}

std::vector<Quantity> parse_quantities(const std::string& text) {
  std::vector<Quantity> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto q = parse_quantity(item);
    if (!q) throw UsageError("unknown quantity '" + std::string(item) + "'");
    if (std::find(out.begin(), out.end(), *q) == out.end()) out.push_back(*q);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) throw UsageError("--quantities is empty");
  return out;
}

SweepConfig sweep_config(const Options& o) {
  if (o.init.empty()) throw UsageError("--init is required");
  SweepConfig cfg;
  cfg.initial_label = BasisLabel(o.init);
  cfg.n_sites = o.n > 0 ? o.n : cfg.initial_label.n_sites();
  cfg.profile = parse_profile(o.profile);
  cfg.tau_start = o.tau_min;
  cfg.tau_end = o.tau_max;
  cfg.tau_step = o.tau_step;
  cfg.quantities = parse_quantities(o.quantities);
  if (!o.partition.empty()) cfg.e1_split = parse_bipartition(o.partition, cfg.n_sites);
  cfg.threads = parse_threads(o.threads);
  validate(cfg);
  return cfg;
}

json config_json(const SweepConfig& cfg) {
  json q = json::array();
  for (Quantity x : cfg.quantities) q.push_back(std::string(to_string(x)));
  return {
      {"n_sites", cfg.n_sites},
      {"initial_label", cfg.initial_label.bits()},
      {"profile", std::string(to_string(cfg.profile))},
      {"tau_start", cfg.tau_start},
      {"tau_end", cfg.tau_end},
      {"tau_step", cfg.tau_step},
      {"quantities", q},
      {"e1_split", cfg.e1_split.value_or(default_e1_split(cfg.n_sites)).to_string()},
      {"threads", cfg.threads},
  };
}

json profile_json(CouplingKind kind) {
  return {{"kind", std::string(to_string(kind))},
          {"coupling", kind == CouplingKind::AllPairsDipolar ? "1/|i-j|^3 for all pairs"
                                                             : "1 for j = i+1, else 0"}};
}

void write_manifest(const std::string& out_path, const std::string& command, json config,
                    CouplingKind profile, int threads, double seconds) {
  const json manifest{
      {"command", command},
      {"config", std::move(config)},
      {"code_version", MEBD_VERSION},
      {"wall_time_seconds", seconds},
      {"profile_used", profile_json(profile)},
      {"threads", resolve_threads(threads)},
  };
  std::ofstream file(out_path + ".manifest.json");
  if (!file) throw UsageError("cannot write '" + out_path + ".manifest.json'");
  file << manifest.dump(2) << '\n';
}

std::string partition_column(const Bipartition& p) {
  return "neg_" + p.part_a().to_string("+") + "|" + p.part_b().to_string("+");
}

void write_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<SweepRecord>& records) {
  const std::array<Quantity, 3> scalars{Quantity::Mebd, Quantity::E1Fixed, Quantity::ETilde};
  os << "tau";
  for (Quantity q : scalars)
    if (cfg.wants(q)) os << ',' << to_string(q);
  if (cfg.wants(Quantity::PerPartition))
    for (const auto& p : enumerate_bipartitions(cfg.n_sites).partitions)
      os << ',' << partition_column(p);
  os << '\n';
  for (const SweepRecord& rec : records) {
    os << number(rec.tau);
    for (Quantity q : scalars)
      if (cfg.wants(q)) os << ',' << number(*rec.value(q));
    for (double v : rec.per_partition) os << ',' << number(v);
    os << '\n';
  }
}

json records_json(const SweepConfig& cfg, const std::vector<SweepRecord>& records) {
  std::vector<std::string> names;
  if (cfg.wants(Quantity::PerPartition))
    for (const auto& p : enumerate_bipartitions(cfg.n_sites).partitions) names.push_back(p.to_string());
  json arr = json::array();
  for (const SweepRecord& rec : records) {
    json j{{"tau", rec.tau},
           {"trace_error", rec.trace_error},
           {"purity_error", rec.purity_error},
           {"sector_leakage", rec.sector_leakage}};
    if (rec.mebd) j["mebd"] = *rec.mebd;
    if (rec.e1_fixed) j["e1_fixed"] = *rec.e1_fixed;
    if (rec.e_tilde) j["e_tilde"] = *rec.e_tilde;
    if (rec.e_part_a) {
      j["e_part_a"] = number_or_null(*rec.e_part_a);
      if (rec.mebd) j["additivity_ratio"] = number_or_null(*rec.mebd / (2.0 * *rec.e_part_a));
    }
    if (!rec.per_partition.empty()) {
      json per = json::object();
      for (std::size_t i = 0; i < names.size(); ++i) per[names[i]] = rec.per_partition[i];
      j["per_partition"] = per;
    }
    arr.push_back(std::move(j));
  }
  return arr;
}

json report_json(const MaximumReport& r) {
  return {{"tau_star", r.tau_star},
          {"value", r.value},
          {"kind", std::string(to_string(r.kind))},
          {"grid_index", r.grid_index},
          {"tau_below_pi", sanity_tau_bound(r)}};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Output goes to --out when given, otherwise to stdout.
template <typename Writer>
void emit(const Options& o, std::ostream& out, Writer&& write) {
  if (o.out.empty()) {
    write(out);
    return;
  }
  std::ofstream file(o.out);
  if (!file) throw UsageError("cannot write '" + o.out + "'");
  write(file);
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const SweepConfig cfg = sweep_config(o);
  const auto start = std::chrono::steady_clock::now();
  const auto records = run_sweep(cfg);
  const double seconds = seconds_since(start);
  emit(o, out, [&](std::ostream& os) {
    if (o.json)
      os << json{{"config", config_json(cfg)}, {"records", records_json(cfg, records)}}.dump(2)
         << '\n';
    else
      write_csv(os, cfg, records);
  });
  if (!o.out.empty()) write_manifest(o.out, "sweep", config_json(cfg), cfg.profile, cfg.threads, seconds);
  return kOk;
}

int cmd_table1(const Options& o, std::ostream& out, std::ostream& err) {
  const CouplingKind profile = parse_profile(o.profile);
  const int threads = parse_threads(o.threads);
  std::vector<Calibration> rows;
  for (int n : o.n_list) {
    const auto it = std::find_if(kTable.begin(), kTable.end(),
                                 [n](const Calibration& c) { return c.n_sites == n; });
    if (it == kTable.end()) throw UsageError("--n-list entries must be among 3, 4, 6, 8");
    rows.push_back(*it);
  }

  const auto start = std::chrono::steady_clock::now();
  json table = json::array();
  bool all_ok = true;
  for (const Calibration& row : rows) {
    SweepConfig cfg;
    cfg.n_sites = row.n_sites;
    cfg.initial_label = BasisLabel(row.label);
    cfg.profile = profile;
    cfg.tau_start = o.tau_min;
    cfg.tau_end = o.tau_max;
    cfg.tau_step = o.tau_step;
    cfg.quantities = {Quantity::Mebd};
    cfg.threads = threads;
    const auto row_start = std::chrono::steady_clock::now();
    const auto records = run_sweep(cfg);
    err << "N=" << row.n_sites << " |" << row.label << ">: " << records.size() << " points in "
        << std::fixed << std::setprecision(1) << seconds_since(row_start) << " s\n"
        << std::defaultfloat;

    json j{{"n_sites", row.n_sites},
           {"initial_label", row.label},
           {"reference_tau", row.tau},
           {"reference_value", row.value}};
    try {
      const MaximumReport r = find_first_maximum(records, Quantity::Mebd, o.min_value);
      const double d_tau = r.tau_star - row.tau;
      const double d_value = r.value - row.value;
      const bool ok = std::abs(d_tau) <= kTauTolerance && std::abs(d_value) <= kValueTolerance;
      j.update(report_json(r));
      j["delta_tau"] = d_tau;
      j["delta_value"] = d_value;
      j["within_tolerance"] = ok;
      all_ok = all_ok && ok;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoMaximumFound) throw;
      j["within_tolerance"] = false;
      j["error"] = e.what();
      all_ok = false;
    }
    table.push_back(std::move(j));
  }
  const double seconds = seconds_since(start);

  const json doc{{"profile", std::string(to_string(profile))},
                 {"tolerance", {{"tau", kTauTolerance}, {"value", kValueTolerance}}},
                 {"rows", table},
                 {"all_within_tolerance", all_ok}};
  emit(o, out, [&](std::ostream& os) {
    if (o.json) {
      os << doc.dump(2) << '\n';
      return;
    }
    os << "profile: " << to_string(profile) << '\n';
    os << " N  tau_N    E(S_N)   ref_tau    ref_E    d_tau    d_E      tau<pi  ok\n";
    for (const json& j : table) {
      os << std::setw(2) << j["n_sites"].get<int>() << "  ";
      if (!j.contains("tau_star")) {
        os << "no maximum found\n";
        continue;
      }
      os << std::fixed << std::setprecision(4) << std::setw(7) << j["tau_star"].get<double>()
         << "  " << std::setw(7) << j["value"].get<double>() << "  " << std::setprecision(3)
         << std::setw(9) << j["reference_tau"].get<double>() << "  " << std::setw(7)
         << j["reference_value"].get<double>() << "  " << std::showpos << std::setprecision(4)
         << std::setw(7) << j["delta_tau"].get<double>() << "  " << std::setw(7)
         << j["delta_value"].get<double>() << std::noshowpos << "  " << std::setw(6)
         << (j["tau_below_pi"].get<bool>() ? "yes" : "no") << "  "
         << (j["within_tolerance"].get<bool>() ? "yes" : "NO") << '\n'
         << std::defaultfloat;
    }
  });
  if (!o.out.empty()) {
    json cfg{{"n_list", o.n_list},      {"profile", std::string(to_string(profile))},
             {"tau_start", o.tau_min},  {"tau_end", o.tau_max},
             {"tau_step", o.tau_step},  {"min_value", o.min_value},
             {"threads", threads}};
    write_manifest(o.out, "table1", std::move(cfg), profile, threads, seconds);
  }
  if (!all_ok) {
    err << "table1: calibration outside tolerance for profile " << to_string(profile) << '\n';
    return kCalibrationFailure;
  }
  return kOk;
}

int cmd_negativity(const Options& o, std::ostream& out) {
  if (o.init.empty()) throw UsageError("--init is required");
  if (o.partition.empty()) throw UsageError("--partition is required");
  const BasisLabel label(o.init);
  const int n = o.n > 0 ? o.n : label.n_sites();
  if (label.n_sites() != n) throw UsageError("--init does not have --n sites");
  const Bipartition p = parse_bipartition(o.partition, n);
  if (!std::isfinite(o.tau) || o.tau < 0.0) throw UsageError("--tau must be finite and >= 0");
  const Evolution ev(build_hdz(n, parse_profile(o.profile)), label);
  const double value = double_negativity(ev.density(o.tau), p);
  emit(o, out, [&](std::ostream& os) {
    if (o.json)
      os << json{{"tau", o.tau}, {"partition", p.to_string()}, {"negativity", value}}.dump(2)
         << '\n';
    else
      os << number(value) << '\n';
  });
  return kOk;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw UsageError("'" + path + "': bad number '" + cell + "'");
  return v;
}

int cmd_first_max(const Options& o, std::ostream& out) {
  std::vector<double> taus, values;
  if (!o.csv.empty()) {
    std::ifstream file(o.csv);
    if (!file) throw UsageError("cannot read '" + o.csv + "'");
    std::string line;
    if (!std::getline(file, line)) throw UsageError("'" + o.csv + "' is empty");
    const auto header = split_csv_line(line);
    const auto col = std::find(header.begin(), header.end(), o.quantity);
    if (header.empty() || header.front() != "tau" || col == header.end())
      throw UsageError("'" + o.csv + "' has no tau/" + o.quantity + " columns");
    const auto index = static_cast<std::size_t>(col - header.begin());
    while (std::getline(file, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv_line(line);
      if (cells.size() != header.size()) throw UsageError("'" + o.csv + "': ragged row");
      taus.push_back(parse_cell(cells.front(), o.csv));
      values.push_back(parse_cell(cells[index], o.csv));
    }
  } else {
    Options sweep = o;
    const auto q = parse_quantity(o.quantity);
    if (!q || *q == Quantity::PerPartition)
      throw UsageError("--quantity must be mebd, e1_fixed or e_tilde without --csv");
    sweep.quantities = std::string(to_string(*q));
    const SweepConfig cfg = sweep_config(sweep);
    for (const SweepRecord& rec : run_sweep(cfg)) {
      taus.push_back(rec.tau);
      values.push_back(*rec.value(*q));
    }
  }
  const MaximumReport r = find_first_maximum(taus, values, o.min_value);
  emit(o, out, [&](std::ostream& os) {
    if (o.json) {
      os << report_json(r).dump(2) << '\n';
      return;
    }
    os << "tau_star,value,kind,grid_index\n"
       << number(r.tau_star) << ',' << number(r.value) << ',' << to_string(r.kind) << ','
       << r.grid_index << '\n';
  });
  return kOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadLabel:
    case ErrorKind::BadPartition:
    case ErrorKind::BadSize:
    case ErrorKind::BadLevel:
    case ErrorKind::BadK:
    case ErrorKind::EmptyKeepSet:
    case ErrorKind::EmptySubset:
    case ErrorKind::GridTooLarge:
    case ErrorKind::InvalidArgument:
      return kBadArguments;
    default:
      return kNumericalFailure;
  }
}

void add_state_flags(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "Chain length (default: length of --init)")->check(CLI::Range(2, 12));
  sub->add_option("--init", o.init, "Initial basis state, site 1 first, e.g. 1001");
  sub->add_option("--profile", o.profile, "Coupling profile: all-pairs or nearest-neighbor")
      ->capture_default_str();
}

void add_grid_flags(CLI::App* sub, Options& o) {
  sub->add_option("--tau-min", o.tau_min, "First grid time")->capture_default_str();
  sub->add_option("--tau-max", o.tau_max, "Last grid time")->capture_default_str();
  sub->add_option("--tau-step", o.tau_step, "Grid spacing")->capture_default_str();
}

void add_common_flags(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "Write results here (and a .manifest.json beside it)");
  sub->add_option("--threads", o.threads, "Worker count or 'auto'")->capture_default_str();
  sub->add_flag("--json", o.json, "Emit JSON instead of text/CSV");
  sub->add_option("--config", o.config, "TOML/INI file of flag values (keys as flags)");
}

struct Parser {
  CLI::App app{"Minimal entanglement of bipartite decompositions for dipolar spin chains", "mebd"};
  CLI::App* sweep = nullptr;
  CLI::App* table1 = nullptr;
  CLI::App* negativity = nullptr;
  CLI::App* first_max = nullptr;

  explicit Parser(Options& o) {
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(MEBD_VERSION));

    sweep = app.add_subcommand("sweep", "Evolve a basis state and write witnesses per tau as CSV");
    add_state_flags(sweep, o);
    add_grid_flags(sweep, o);
    sweep->add_option("--quantities", o.quantities,
                      "Comma list of mebd, e1_fixed, e_tilde, per_partition")
        ->capture_default_str();
    sweep->add_option("--partition", o.partition, "Split used for e1_fixed, e.g. 1,2|3,4");
    add_common_flags(sweep, o);

    table1 = app.add_subcommand("table1", "Locate the first MEBD maxima for the four reference chains");
    table1->add_option("--n-list", o.n_list, "Subset of 3,4,6,8")->delimiter(',');
    table1->add_option("--profile", o.profile, "Coupling profile")->capture_default_str();
    add_grid_flags(table1, o);
    table1->add_option("--min-value", o.min_value, "Smallest peak accepted")->capture_default_str();
    add_common_flags(table1, o);

    negativity = app.add_subcommand("negativity", "Double negativity of one split at one time");
    add_state_flags(negativity, o);
    negativity->add_option("--tau", o.tau, "Time")->capture_default_str();
    negativity->add_option("--partition", o.partition, "Split, e.g. 1,2|3,4");
    add_common_flags(negativity, o);

    first_max = app.add_subcommand("first-max", "First maximum of a sweep or of a CSV column");
    add_state_flags(first_max, o);
    add_grid_flags(first_max, o);
    first_max->add_option("--csv", o.csv, "Read the series from a sweep CSV instead");
    first_max->add_option("--quantity", o.quantity, "Column to search")->capture_default_str();
    first_max->add_option("--partition", o.partition, "Split used for e1_fixed");
    first_max->add_option("--min-value", o.min_value, "Smallest peak accepted")->capture_default_str();
    add_common_flags(first_max, o);
  }

  CLI::App* selected() const {
    for (CLI::App* sub : {sweep, table1, negativity, first_max})
      if (sub->parsed()) return sub;
    return nullptr;
  }
};

// Config keys become flags of the selected subcommand unless already given.
std::vector<std::string> config_args(const CLI::App& sub, const std::string& path) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::FileError& e) {
    throw UsageError(e.what());
  }
  std::vector<std::string> out;
  for (const CLI::ConfigItem& item : items) {
    if (!item.parents.empty() && item.parents != std::vector<std::string>{sub.get_name()})
      continue;
    if (item.name == "++" || item.name == "--") continue;  // section markers
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") continue;
    const CLI::Option* opt = sub.get_option_no_throw("--" + name);
    if (opt == nullptr) throw UsageError("'" + path + "': unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    std::string joined;
    for (const std::string& v : item.inputs) joined += (joined.empty() ? "" : ",") + v;
    out.push_back("--" + name + "=" + joined);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  auto parser = std::make_unique<Parser>(o);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    parser->app.parse(reversed);
    if (!o.config.empty()) {
      // Second pass: config values first, command-line flags (which win) after.
      const CLI::App* sub = parser->selected();
      std::vector<std::string> merged{sub->get_name()};
      for (std::string& a : config_args(*sub, o.config)) merged.push_back(std::move(a));
      const auto at = std::find(args.begin(), args.end(), sub->get_name());
      merged.insert(merged.end(), std::next(at), args.end());
      o = Options{};
      parser = std::make_unique<Parser>(o);
      std::vector<std::string> again(merged.rbegin(), merged.rend());
      parser->app.parse(again);
    }
  } catch (const CLI::ParseError& e) {
    const int code = parser->app.exit(e, out, err);
    return code == 0 ? kOk : kBadArguments;
  } catch (const UsageError& e) {
    err << "mebd: " << e.what() << '\n';
    return kBadArguments;
  }

  try {
    const CLI::App* sub = parser->selected();
    if (sub == parser->sweep) return cmd_sweep(o, out);
    if (sub == parser->table1) return cmd_table1(o, out, err);
    if (sub == parser->negativity) return cmd_negativity(o, out);
    return cmd_first_max(o, out);
  } catch (const UsageError& e) {
    err << "mebd: " << e.what() << '\n';
    return kBadArguments;
  } catch (const Error& e) {
    err << "mebd: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "mebd: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

}  // namespace mebd::cli
