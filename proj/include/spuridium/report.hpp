#ifndef SPURIDIUM_REPORT_HPP
#define SPURIDIUM_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spuridium/basis.hpp"
#include "spuridium/diagnostics.hpp"
#include "spuridium/version.hpp"

namespace spuridium {

// Raised for anything wrong with configs, flags, or report files; the CLI
// maps it to exit code 2 (versus 3 for numerical failures).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { Harmonic, Hydrogen, PoschlTeller, SquareWell, DiracCoulomb };
enum class SolverKind { Dense, Lanczos };
enum class StartKind { Ones, Random };
enum class OutputFormat { Csv, Json };

struct RunConfig {
  ProblemKind problem = ProblemKind::Harmonic;
  // problem parameters (only the ones for the active problem matter)
  double omega = 1.0;
  double z = 1.0;
  unsigned ell = 0;
  double soft_core = 0.0;
  double lambda = 4.0;
  double a = 1.0;
  double v0 = 5.0;
  double width = 2.0;
  int kappa = -1;
  double light_speed = 137.035999;
  // basis
  std::vector<std::size_t> scan{200};
  double box_length = 20.0;
  MapKind map = MapKind::Identity;
  double map_strength = 0.0;
  // solver
  SolverKind solver = SolverKind::Dense;
  std::size_t max_iter = 100;
  StartKind start = StartKind::Ones;
  std::uint64_t seed = 1;
  // diagnostics
  double tol_bound = 1e-6;
  double plateau_factor = 2.0;
  std::size_t oversampling = 6;
  // output
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline const char* to_string(ProblemKind p) {
  switch (p) {
    case ProblemKind::Harmonic: return "harmonic";
    case ProblemKind::Hydrogen: return "hydrogen";
    case ProblemKind::PoschlTeller: return "poschl_teller";
    case ProblemKind::SquareWell: return "square_well";
    case ProblemKind::DiracCoulomb: return "dirac_coulomb";
  }
  return "?";
}

inline ProblemKind problem_from_string(const std::string& s) {
  if (s == "harmonic") return ProblemKind::Harmonic;
  if (s == "hydrogen") return ProblemKind::Hydrogen;
  if (s == "poschl_teller") return ProblemKind::PoschlTeller;
  if (s == "square_well") return ProblemKind::SquareWell;
  if (s == "dirac_coulomb") return ProblemKind::DiracCoulomb;
  throw ConfigError("unknown problem: " + s);
}

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::GenuineBound: return "GenuineBound";
    case Verdict::Spurious: return "Spurious";
    case Verdict::ContinuumLike: return "ContinuumLike";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "GenuineBound") return Verdict::GenuineBound;
  if (s == "Spurious") return Verdict::Spurious;
  if (s == "ContinuumLike") return Verdict::ContinuumLike;
  if (s == "Undecided") return Verdict::Undecided;
  throw ConfigError("unknown verdict: " + s);
}

// Fixed float formatting keeps reports byte-stable: 17 significant digits,
// lowercase scientific.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

}  // namespace detail

inline void validate(const RunConfig& cfg) {
  if (cfg.scan.empty())
    throw ConfigError("config: scan list is empty");
  for (std::size_t i = 0; i < cfg.scan.size(); ++i) {
    if (cfg.scan[i] < 1)
      throw ConfigError("config: basis sizes must be >= 1");
    if (i > 0 && cfg.scan[i] <= cfg.scan[i - 1])
      throw ConfigError("config: scan list must be strictly increasing");
  }
  if (!(cfg.box_length > 0.0))
    throw ConfigError("config: box length must be positive");
  if (cfg.map_strength < 0.0)
    throw ConfigError("config: map strength must be nonnegative");
  if (!(cfg.tol_bound > 0.0) || !(cfg.plateau_factor > 0.0))
    throw ConfigError("config: tolerances must be positive");
  if (cfg.oversampling < 2)
    throw ConfigError("config: oversampling must be >= 2");
  if (cfg.solver == SolverKind::Lanczos) {
    if (cfg.scan.size() != 1)
      throw ConfigError("config: Lanczos runs take a single basis size, not a scan");
    const std::size_t dim =
        (cfg.problem == ProblemKind::DiracCoulomb ? 2 : 1) * cfg.scan.front();
    if (cfg.max_iter < 1 || cfg.max_iter > dim)
      throw ConfigError("config: max_iter must be in [1, matrix dimension]");
  }
  switch (cfg.problem) {
    case ProblemKind::Harmonic:
      if (!(cfg.omega > 0.0))
        throw ConfigError("config: omega must be positive");
      break;
    case ProblemKind::Hydrogen:
      if (!(cfg.z > 0.0))
        throw ConfigError("config: Z must be positive");
      if (cfg.soft_core < 0.0)
        throw ConfigError("config: soft-core radius must be nonnegative");
      break;
    case ProblemKind::PoschlTeller:
      if (!(cfg.lambda > 1.0) || !(cfg.a > 0.0))
        throw ConfigError("config: need lambda > 1 and a > 0");
      break;
    case ProblemKind::SquareWell:
      if (!(cfg.v0 > 0.0) || !(cfg.width > 0.0))
        throw ConfigError("config: need V0 > 0 and width > 0");
      break;
    case ProblemKind::DiracCoulomb:
      try {
        validate(DiracParams{cfg.z, cfg.kappa, cfg.light_speed});
      } catch (const std::exception& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
      }
      break;
  }
}

inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["problem"] = detail::to_string(cfg.problem);
  j["params"] = {{"omega", cfg.omega},   {"z", cfg.z},
                 {"ell", cfg.ell},       {"soft_core", cfg.soft_core},
                 {"lambda", cfg.lambda}, {"a", cfg.a},
                 {"v0", cfg.v0},         {"width", cfg.width},
                 {"kappa", cfg.kappa},   {"light_speed", cfg.light_speed}};
  j["basis"] = {{"scan", cfg.scan},
                {"box_length", cfg.box_length},
                {"map", cfg.map == MapKind::Rational ? "rational" : "identity"},
                {"map_strength", cfg.map_strength}};
  j["solver"] = {{"kind", cfg.solver == SolverKind::Lanczos ? "lanczos" : "dense"},
                 {"max_iter", cfg.max_iter},
                 {"start", cfg.start == StartKind::Random ? "random" : "ones"},
                 {"seed", cfg.seed}};
  j["diagnostics"] = {{"tol_bound", cfg.tol_bound},
                      {"plateau_factor", cfg.plateau_factor},
                      {"oversampling", cfg.oversampling}};
  j["output"] = {{"path", cfg.out_path},
                 {"format", cfg.format == OutputFormat::Json ? "json" : "csv"}};
  return j;
}

inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  try {
    if (j.contains("problem"))
      cfg.problem = detail::problem_from_string(j.at("problem").get<std::string>());
    if (j.contains("params")) {
      const auto& p = j.at("params");
      cfg.omega = p.value("omega", cfg.omega);
      cfg.z = p.value("z", cfg.z);
      cfg.ell = p.value("ell", cfg.ell);
      cfg.soft_core = p.value("soft_core", cfg.soft_core);
      cfg.lambda = p.value("lambda", cfg.lambda);
      cfg.a = p.value("a", cfg.a);
      cfg.v0 = p.value("v0", cfg.v0);
      cfg.width = p.value("width", cfg.width);
      cfg.kappa = p.value("kappa", cfg.kappa);
      cfg.light_speed = p.value("light_speed", cfg.light_speed);
    }
    if (j.contains("basis")) {
      const auto& b = j.at("basis");
      if (b.contains("n_basis") && b.contains("scan"))
        throw ConfigError("config: give n_basis or scan, not both");
      if (b.contains("n_basis"))
        cfg.scan = {b.at("n_basis").get<std::size_t>()};
      if (b.contains("scan"))
        cfg.scan = b.at("scan").get<std::vector<std::size_t>>();
      cfg.box_length = b.value("box_length", cfg.box_length);
      if (b.contains("map")) {
        const std::string m = b.at("map").get<std::string>();
        if (m == "rational")
          cfg.map = MapKind::Rational;
        else if (m == "identity")
          cfg.map = MapKind::Identity;
        else
          throw ConfigError("unknown map kind: " + m);
      }
      cfg.map_strength = b.value("map_strength", cfg.map_strength);
    }
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      if (s.contains("kind")) {
        const std::string k = s.at("kind").get<std::string>();
        if (k == "lanczos")
          cfg.solver = SolverKind::Lanczos;
        else if (k == "dense")
          cfg.solver = SolverKind::Dense;
        else
          throw ConfigError("unknown solver kind: " + k);
      }
      cfg.max_iter = s.value("max_iter", cfg.max_iter);
      if (s.contains("start")) {
        const std::string st = s.at("start").get<std::string>();
        if (st == "random")
          cfg.start = StartKind::Random;
        else if (st == "ones")
          cfg.start = StartKind::Ones;
        else
          throw ConfigError("unknown start kind: " + st);
      }
      cfg.seed = s.value("seed", cfg.seed);
    }
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      cfg.tol_bound = d.value("tol_bound", cfg.tol_bound);
      cfg.plateau_factor = d.value("plateau_factor", cfg.plateau_factor);
      cfg.oversampling = d.value("oversampling", cfg.oversampling);
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      cfg.out_path = o.value("path", cfg.out_path);
      if (o.contains("format")) {
        const std::string f = o.at("format").get<std::string>();
        if (f == "json")
          cfg.format = OutputFormat::Json;
        else if (f == "csv")
          cfg.format = OutputFormat::Csv;
        else
          throw ConfigError("unknown output format: " + f);
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("config parse: ") + ex.what());
  }
  return cfg;
}

struct ReportRow {
  int track_id = -1;
  std::size_t iteration = 0;
  double energy = 0.0;
  double delta = 0.0;
  double delta_rel = 0.0;
  Verdict verdict = Verdict::Undecided;
  std::optional<double> forbidden_fraction;
};

struct AdequacyRow {
  std::size_t n = 0;
  double s = 0.0;
  double deviation = 0.0;
};

struct Report {
  RunConfig config;
  std::vector<ReportRow> rows;        // sorted by (track_id, iteration)
  std::vector<AdequacyRow> adequacy;  // TRK sums where applicable
  std::string version = kVersion;
  double wall_time_ms = 0.0;
};

struct SumruleReport {
  RunConfig config;
  std::vector<AdequacyRow> rows;
  std::string version = kVersion;
  double wall_time_ms = 0.0;
};

inline std::string report_to_csv(const Report& rep) {
  std::ostringstream out;
  out << "# " << kReportSchema << "\n";
  out << "# config " << to_json(rep.config).dump() << "\n";
  out << "track_id,iteration,energy,delta,delta_rel,verdict,forbidden_fraction\n";
  for (const ReportRow& r : rep.rows) {
    out << r.track_id << ',' << r.iteration << ',' << detail::format_double(r.energy) << ','
        << detail::format_double(r.delta) << ',' << detail::format_double(r.delta_rel) << ','
        << detail::to_string(r.verdict) << ',';
    if (r.forbidden_fraction)
      out << detail::format_double(*r.forbidden_fraction);
    out << "\n";
  }
  for (const AdequacyRow& a : rep.adequacy)
    out << "# adequacy n=" << a.n << " s=" << detail::format_double(a.s)
        << " deviation=" << detail::format_double(a.deviation) << "\n";
  return out.str();
}

inline nlohmann::json report_to_json(const Report& rep) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  j["version"] = rep.version;
  j["config"] = to_json(rep.config);
  j["rows"] = nlohmann::json::array();
  for (const ReportRow& r : rep.rows) {
    nlohmann::json row = {{"track_id", r.track_id},   {"iteration", r.iteration},
                          {"energy", r.energy},       {"delta", r.delta},
                          {"delta_rel", r.delta_rel}, {"verdict", detail::to_string(r.verdict)}};
    if (r.forbidden_fraction)
      row["forbidden_fraction"] = *r.forbidden_fraction;
    else
      row["forbidden_fraction"] = nullptr;
    j["rows"].push_back(std::move(row));
  }
  j["adequacy"] = nlohmann::json::array();
  for (const AdequacyRow& a : rep.adequacy)
    j["adequacy"].push_back({{"n", a.n}, {"s", a.s}, {"deviation", a.deviation}});
  j["meta"] = {{"wall_time_ms", rep.wall_time_ms}};
  return j;
}

inline std::string sumrule_to_csv(const SumruleReport& rep) {
  std::ostringstream out;
  out << "# " << kSumruleSchema << "\n";
  out << "# config " << to_json(rep.config).dump() << "\n";
  out << "n,s,deviation\n";
  for (const AdequacyRow& a : rep.rows)
    out << a.n << ',' << detail::format_double(a.s) << ',' << detail::format_double(a.deviation)
        << "\n";
  return out.str();
}

inline nlohmann::json sumrule_to_json(const SumruleReport& rep) {
  nlohmann::json j;
  j["schema"] = kSumruleSchema;
  j["version"] = rep.version;
  j["config"] = to_json(rep.config);
  j["rows"] = nlohmann::json::array();
  for (const AdequacyRow& a : rep.rows)
    j["rows"].push_back({{"n", a.n}, {"s", a.s}, {"deviation", a.deviation}});
  j["meta"] = {{"wall_time_ms", rep.wall_time_ms}};
  return j;
}

inline Report report_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("report parse: ") + ex.what());
  }
  Report rep;
  try {
    if (j.value("schema", "") != kReportSchema)
      throw ConfigError("report parse: unknown schema");
    rep.version = j.value("version", "");
    rep.config = config_from_json(j.at("config"));
    for (const auto& row : j.at("rows")) {
      ReportRow r;
      r.track_id = row.at("track_id").get<int>();
      r.iteration = row.at("iteration").get<std::size_t>();
      r.energy = row.at("energy").get<double>();
      r.delta = row.at("delta").get<double>();
      r.delta_rel = row.at("delta_rel").get<double>();
      r.verdict = detail::verdict_from_string(row.at("verdict").get<std::string>());
      if (row.contains("forbidden_fraction") && !row.at("forbidden_fraction").is_null())
        r.forbidden_fraction = row.at("forbidden_fraction").get<double>();
      rep.rows.push_back(std::move(r));
    }
    if (j.contains("adequacy"))
      for (const auto& a : j.at("adequacy"))
        rep.adequacy.push_back(AdequacyRow{a.at("n").get<std::size_t>(), a.at("s").get<double>(),
                                           a.at("deviation").get<double>()});
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("report parse: ") + ex.what());
  }
  return rep;
}

inline Report report_from_csv_text(const std::string& text) {
  Report rep;
  std::istringstream in(text);
  std::string line;
  bool saw_schema = false, saw_header = false, saw_config = false;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    if (line[0] == '#') {
      if (line == std::string("# ") + kReportSchema) {
        saw_schema = true;
      } else if (line.rfind("# config ", 0) == 0) {
        try {
          rep.config = config_from_json(nlohmann::json::parse(line.substr(9)));
          saw_config = true;
        } catch (const nlohmann::json::exception& ex) {
          throw ConfigError(std::string("report parse: config line: ") + ex.what());
        }
      }
      continue;
    }
    if (!saw_header) {
      if (line.rfind("track_id,", 0) != 0)
        throw ConfigError("report parse: missing csv header");
      saw_header = true;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    ReportRow r;
    try {
      std::getline(ls, field, ',');
      r.track_id = std::stoi(field);
      std::getline(ls, field, ',');
      r.iteration = static_cast<std::size_t>(std::stoull(field));
      std::getline(ls, field, ',');
      r.energy = std::stod(field);
      std::getline(ls, field, ',');
      r.delta = std::stod(field);
      std::getline(ls, field, ',');
      r.delta_rel = std::stod(field);
      std::getline(ls, field, ',');
      r.verdict = detail::verdict_from_string(field);
      if (std::getline(ls, field, ',') && !field.empty())
        r.forbidden_fraction = std::stod(field);
    } catch (const std::invalid_argument&) {
      throw ConfigError("report parse: bad csv row: " + line);
    } catch (const std::out_of_range&) {
      throw ConfigError("report parse: bad csv row: " + line);
    }
    rep.rows.push_back(std::move(r));
  }
  if (!saw_schema || !saw_config || !saw_header)
    throw ConfigError("report parse: not a report csv (missing schema/config/header)");
  return rep;
}

// Reads a report written by either serializer; JSON is recognized by a
// leading '{'.
inline Report read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open report file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos)
    throw ConfigError("report file is empty: " + path);
  if (text[first] == '{')
    return report_from_json_text(text);
  return report_from_csv_text(text);
}

// Write-to-temp plus rename, so a failed run never leaves a partial file.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open output file: " + tmp.string());
    out << content;
    if (!out.flush())
      throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("rename failed for " + target.string() + ": " + ec.message());
  }
}

}  // namespace spuridium

#endif  // SPURIDIUM_REPORT_HPP
