#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crisk/decision.hpp"
#include "crisk/discrepancy.hpp"
#include "crisk/estimators.hpp"
#include "crisk/metrics.hpp"
#include "crisk/sim.hpp"
#include "crisk/types.hpp"

namespace crisk {

using json = nlohmann::ordered_json;

inline constexpr int kModelSchemaVersion = 1;

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, const std::string& what,
                           int line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw DataError("row " + std::to_string(line_no) + ": cannot parse " + what +
                    " value '" + s + "'");
  return v;
}

inline long parse_int(const std::string& s, const std::string& what, int line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw DataError("row " + std::to_string(line_no) + ": cannot parse " + what +
                    " value '" + s + "'");
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset CSV: id,time,event,group,x0..x{p-1}[,w1,w2,ws,wc,latent_time,
// latent_cause,censor_time]. Reals use 17 significant digits for lossless
// roundtrips.
// ---------------------------------------------------------------------------

struct LoadedDataset {
  SurvivalDataset data;
  std::optional<GroundTruth> truth;
};

inline void save_dataset(const SurvivalDataset& data, const GroundTruth* truth,
                         const std::string& path) {
  if (truth && truth->size() != data.subjects.size())
    throw DataError("save_dataset: truth table misaligned with subjects");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "id,time,event,group";
  for (int j = 0; j < data.n_covariates; ++j) out << ",x" << j;
  if (truth) out << ",w1,w2,ws,wc,latent_time,latent_cause,censor_time";
  out << "\n";
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    const Subject& s = data.subjects[i];
    out << s.id << ',' << detail::format_double(s.time) << ',' << s.event << ','
        << s.group;
    for (double x : s.covariates) out << ',' << detail::format_double(x);
    if (truth) {
      const GroundTruthRow& r = (*truth)[i];
      out << ',' << detail::format_double(r.w1) << ',' << detail::format_double(r.w2)
          << ',' << detail::format_double(r.ws) << ',' << detail::format_double(r.wc)
          << ',' << detail::format_double(r.latent_time) << ',' << r.latent_cause
          << ',' << detail::format_double(r.censor_time);
    }
    out << "\n";
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

inline LoadedDataset load_dataset(const std::string& path,
                                  std::optional<int> expected_p = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;

  for (const char* required : {"id", "time", "event", "group"})
    if (!col.count(required))
      throw DataError("'" + path + "': missing required column '" + required + "'");

  int p = 0;
  while (col.count("x" + std::to_string(p))) ++p;
  for (const auto& [name, idx] : col) {
    (void)idx;
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int j = static_cast<int>(std::strtol(name.c_str() + 1, nullptr, 10));
      if (j >= p)
        throw DataError("'" + path + "': covariate columns must be contiguous x0..x" +
                        std::to_string(p - 1) + " but found '" + name + "'");
    }
  }
  if (expected_p && *expected_p != p)
    throw DataError("'" + path + "': expected " + std::to_string(*expected_p) +
                    " covariates, found " + std::to_string(p));

  static const char* kTruthCols[] = {"w1", "w2", "ws", "wc",
                                     "latent_time", "latent_cause", "censor_time"};
  int truth_cols = 0;
  for (const char* name : kTruthCols) truth_cols += col.count(name) ? 1 : 0;
  if (truth_cols != 0 && truth_cols != 7)
    throw DataError("'" + path + "': truth columns must be all present or absent");
  const bool has_truth = truth_cols == 7;

  LoadedDataset out;
  out.data.n_covariates = p;
  if (has_truth) out.truth.emplace();

  int line_no = 1;
  int max_event = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("row " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    Subject s;
    s.id = fields[col["id"]];
    s.time = detail::parse_double(fields[col["time"]], "time", line_no);
    if (!(s.time >= 0))
      throw DataError("row " + std::to_string(line_no) + ": time must be >= 0");
    const long ev = detail::parse_int(fields[col["event"]], "event", line_no);
    if (ev < 0)
      throw DataError("row " + std::to_string(line_no) + ": event code " +
                      std::to_string(ev) + " is negative");
    s.event = static_cast<int>(ev);
    max_event = std::max(max_event, s.event);
    const long g = detail::parse_int(fields[col["group"]], "group", line_no);
    if (g != 0 && g != 1)
      throw DataError("row " + std::to_string(line_no) + ": group must be 0 or 1");
    s.group = static_cast<int>(g);
    s.covariates.resize(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j)
      s.covariates[static_cast<std::size_t>(j)] = detail::parse_double(
          fields[col["x" + std::to_string(j)]], "x" + std::to_string(j), line_no);
    out.data.subjects.push_back(std::move(s));
    if (has_truth) {
      GroundTruthRow r;
      r.w1 = detail::parse_double(fields[col["w1"]], "w1", line_no);
      r.w2 = detail::parse_double(fields[col["w2"]], "w2", line_no);
      r.ws = detail::parse_double(fields[col["ws"]], "ws", line_no);
      r.wc = detail::parse_double(fields[col["wc"]], "wc", line_no);
      r.latent_time =
          detail::parse_double(fields[col["latent_time"]], "latent_time", line_no);
      r.latent_cause = static_cast<int>(
          detail::parse_int(fields[col["latent_cause"]], "latent_cause", line_no));
      r.censor_time =
          detail::parse_double(fields[col["censor_time"]], "censor_time", line_no);
      out.truth->push_back(r);
    }
  }
  if (out.data.subjects.empty())
    throw DataError("'" + path + "' contains no data rows");
  out.data.n_risks = std::max(1, max_event);
  out.data.validate();
  return out;
}

// Ground-truth table as its own CSV, aligned to the dataset by subject id.
inline void save_truth(const GroundTruth& truth, const SurvivalDataset& data,
                       const std::string& path) {
  if (truth.size() != data.subjects.size())
    throw DataError("save_truth: truth table misaligned with subjects");
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << "id,w1,w2,ws,wc,latent_time,latent_cause,censor_time\n";
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const GroundTruthRow& r = truth[i];
    out << data.subjects[i].id << ',' << detail::format_double(r.w1) << ','
        << detail::format_double(r.w2) << ',' << detail::format_double(r.ws) << ','
        << detail::format_double(r.wc) << ',' << detail::format_double(r.latent_time)
        << ',' << r.latent_cause << ',' << detail::format_double(r.censor_time)
        << "\n";
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

inline GroundTruth load_truth(const std::string& path, const SurvivalDataset& data) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required : {"id", "w1", "w2", "ws", "wc", "latent_time",
                               "latent_cause", "censor_time"})
    if (!col.count(required))
      throw DataError("'" + path + "': missing required column '" + required + "'");
  GroundTruth truth;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("row " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    const std::size_t i = truth.size();
    if (i >= data.subjects.size())
      throw DataError("'" + path + "': more truth rows than subjects");
    if (fields[col["id"]] != data.subjects[i].id)
      throw DataError("row " + std::to_string(line_no) + ": truth id '" +
                      fields[col["id"]] + "' does not match subject id '" +
                      data.subjects[i].id + "'");
    GroundTruthRow r;
    r.w1 = detail::parse_double(fields[col["w1"]], "w1", line_no);
    r.w2 = detail::parse_double(fields[col["w2"]], "w2", line_no);
    r.ws = detail::parse_double(fields[col["ws"]], "ws", line_no);
    r.wc = detail::parse_double(fields[col["wc"]], "wc", line_no);
    r.latent_time =
        detail::parse_double(fields[col["latent_time"]], "latent_time", line_no);
    r.latent_cause = static_cast<int>(
        detail::parse_int(fields[col["latent_cause"]], "latent_cause", line_no));
    r.censor_time =
        detail::parse_double(fields[col["censor_time"]], "censor_time", line_no);
    truth.push_back(r);
  }
  if (truth.size() != data.subjects.size())
    throw DataError("'" + path + "': fewer truth rows than subjects");
  return truth;
}

// ---------------------------------------------------------------------------
// Fitted-model JSON. km/aj persist their curve directly; cox/finegray persist
// beta and the Breslow baseline.
// ---------------------------------------------------------------------------

// Nonparametric curve "model": km stores the recoded survival curve, aj the
// CIF; predictions ignore covariates.
struct CurveModel {
  std::string kind;  // "km" or "aj"
  int cause = 1;
  StepFunction curve;
};

using FittedModel = std::variant<FittedCox, FittedFineGray, CurveModel>;

inline std::string model_kind(const FittedModel& m) {
  if (std::holds_alternative<FittedCox>(m)) return "cox";
  if (std::holds_alternative<FittedFineGray>(m)) return "finegray";
  return std::get<CurveModel>(m).kind;
}

inline int model_cause(const FittedModel& m) {
  if (const auto* c = std::get_if<FittedCox>(&m)) return c->cause;
  if (const auto* f = std::get_if<FittedFineGray>(&m)) return f->cause;
  return std::get<CurveModel>(m).cause;
}

inline double predict_cif(const FittedModel& m, const std::vector<double>& x,
                          double t) {
  if (const auto* c = std::get_if<FittedCox>(&m)) return predict_cox_cif(*c, x, t);
  if (const auto* f = std::get_if<FittedFineGray>(&m)) return predict_fg_cif(*f, x, t);
  const CurveModel& cm = std::get<CurveModel>(m);
  return cm.kind == "km" ? 1.0 - step_eval(cm.curve, t) : step_eval(cm.curve, t);
}

namespace detail {

inline json step_to_json(const StepFunction& f) {
  return json{{"initial_value", f.initial_value()},
              {"jump_times", f.jump_times()},
              {"values", f.values()}};
}

inline StepFunction step_from_json(const json& j) {
  return StepFunction(j.at("initial_value").get<double>(),
                      j.at("jump_times").get<std::vector<double>>(),
                      j.at("values").get<std::vector<double>>());
}

}  // namespace detail

inline void save_model(const FittedModel& m, const std::string& path,
                       const json& extra_meta = json::object()) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["model_kind"] = model_kind(m);
  j["cause"] = model_cause(m);
  if (const auto* c = std::get_if<FittedCox>(&m)) {
    j["beta"] = c->beta;
    j["baseline"] = detail::step_to_json(c->baseline_cumhaz);
  } else if (const auto* f = std::get_if<FittedFineGray>(&m)) {
    j["beta"] = f->beta;
    j["baseline"] = detail::step_to_json(f->baseline_cum_subhaz);
    j["censoring_survival"] = detail::step_to_json(f->censoring_survival);
  } else {
    const CurveModel& cm = std::get<CurveModel>(m);
    j["beta"] = std::vector<double>{};
    j["baseline"] = detail::step_to_json(cm.curve);
  }
  json meta = extra_meta;
  if (const auto* c = std::get_if<FittedCox>(&m)) {
    meta["iterations"] = c->convergence.iterations;
    meta["grad_norm"] = c->convergence.grad_norm;
    meta["warnings"] = c->convergence.warnings;
  } else if (const auto* f = std::get_if<FittedFineGray>(&m)) {
    meta["iterations"] = f->convergence.iterations;
    meta["grad_norm"] = f->convergence.grad_norm;
    meta["warnings"] = f->convergence.warnings;
  }
  j["meta"] = meta;
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed for '" + path + "'");
}

struct LoadedModel {
  FittedModel model;
  json meta;
};

inline LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("cannot parse model file '" + path + "': " + e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion)
      throw DataError("model file '" + path + "': unsupported schema_version " +
                      std::to_string(version));
    const std::string kind = j.at("model_kind").get<std::string>();
    const int cause = j.at("cause").get<int>();
    LoadedModel out;
    out.meta = j.value("meta", json::object());
    if (kind == "cox") {
      FittedCox m;
      m.cause = cause;
      m.beta = j.at("beta").get<std::vector<double>>();
      m.baseline_cumhaz = detail::step_from_json(j.at("baseline"));
      out.model = std::move(m);
    } else if (kind == "finegray") {
      FittedFineGray m;
      m.cause = cause;
      m.beta = j.at("beta").get<std::vector<double>>();
      m.baseline_cum_subhaz = detail::step_from_json(j.at("baseline"));
      m.censoring_survival = detail::step_from_json(j.at("censoring_survival"));
      out.model = std::move(m);
    } else if (kind == "km" || kind == "aj") {
      CurveModel m;
      m.kind = kind;
      m.cause = cause;
      m.curve = detail::step_from_json(j.at("baseline"));
      out.model = std::move(m);
    } else {
      throw DataError("model file '" + path + "': unknown model_kind '" + kind + "'");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file '" + path + "' is malformed: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Run configuration: flat INI-style key-value file with [sim], [study] and
// [policy] sections. The grammar is documented in the README.
// ---------------------------------------------------------------------------

struct HorizonSpec {
  bool is_quantile = true;
  double value = 1.0;
  std::string label;
};

inline HorizonSpec parse_horizon_token(const std::string& token) {
  if (token.empty()) throw DataError("empty horizon token");
  HorizonSpec spec;
  std::string num = token;
  if (token[0] == 'q') {
    num = token.substr(1);
  } else if (token[0] == 't') {
    spec.is_quantile = false;
    num = token.substr(1);
  }
  spec.value = detail::parse_double(num, "horizon '" + token + "'", 0);
  if (spec.is_quantile && !(spec.value >= 0 && spec.value <= 1))
    throw DataError("horizon quantile '" + token + "' outside [0, 1]");
  if (!spec.is_quantile && !(spec.value >= 0))
    throw DataError("horizon time '" + token + "' must be >= 0");
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%g", spec.is_quantile ? 'q' : 't', spec.value);
  spec.label = buf;
  return spec;
}

inline std::vector<HorizonSpec> parse_horizon_list(const std::string& list) {
  std::vector<HorizonSpec> out;
  std::stringstream ss(list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(parse_horizon_token(token));
  }
  if (out.empty()) throw DataError("no horizons given");
  return out;
}

struct StudyConfig {
  SimConfig sim;
  int cause = 1;
  std::vector<HorizonSpec> horizons = {parse_horizon_token("q0.5"),
                                       parse_horizon_token("q1")};
  double split_fraction = 0.8;
  std::string group_column = "group";
  // policy section
  double policy_threshold = 0.10;
  HorizonSpec policy_horizon = parse_horizon_token("q1");
  std::string policy_age_col = "x2";
  double policy_min_age = 0;
};

inline StudyConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path + "'");
  StudyConfig cfg;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw DataError("config line " + std::to_string(line_no) + ": bad section");
      section = line.substr(1, line.size() - 2);
      if (section != "sim" && section != "study" && section != "policy")
        throw DataError("config line " + std::to_string(line_no) +
                        ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto as_double = [&](const char* what) {
      return detail::parse_double(value, what, line_no);
    };
    auto as_int = [&](const char* what) {
      return static_cast<int>(detail::parse_int(value, what, line_no));
    };
    if (section == "sim") {
      if (key == "n") cfg.sim.n = as_int("n");
      else if (key == "p") cfg.sim.p = as_int("p");
      else if (key == "sigma_k") cfg.sim.sigma_k = as_double("sigma_k");
      else if (key == "sigma_phi") cfg.sim.sigma_phi = as_double("sigma_phi");
      else if (key == "sigma_z") cfg.sim.sigma_z = as_double("sigma_z");
      else if (key == "group_prob") cfg.sim.group_prob = as_double("group_prob");
      else if (key == "seed")
        cfg.sim.seed = static_cast<std::uint64_t>(
            std::strtoull(value.c_str(), nullptr, 10));
      else if (key == "replications") cfg.sim.replications = as_int("replications");
      else if (key == "group_center") {
        const auto parts = detail::split_csv_line(value);
        if (parts.size() != 2)
          throw DataError("config line " + std::to_string(line_no) +
                          ": group_center needs two comma-separated values");
        cfg.sim.group_center[0] = detail::parse_double(parts[0], "group_center", line_no);
        cfg.sim.group_center[1] = detail::parse_double(parts[1], "group_center", line_no);
      } else
        throw DataError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "' in [sim]");
    } else if (section == "study") {
      if (key == "cause") cfg.cause = as_int("cause");
      else if (key == "horizons") cfg.horizons = parse_horizon_list(value);
      else if (key == "split") cfg.split_fraction = as_double("split");
      else if (key == "group") cfg.group_column = value;
      else
        throw DataError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "' in [study]");
    } else if (section == "policy") {
      if (key == "threshold") cfg.policy_threshold = as_double("threshold");
      else if (key == "horizon") cfg.policy_horizon = parse_horizon_token(value);
      else if (key == "age_col") cfg.policy_age_col = value;
      else if (key == "min_age") cfg.policy_min_age = as_double("min_age");
      else
        throw DataError("config line " + std::to_string(line_no) +
                        ": unknown key '" + key + "' in [policy]");
    } else {
      throw DataError("config line " + std::to_string(line_no) +
                      ": key outside any section");
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Report serialization.
// ---------------------------------------------------------------------------

inline json horizon_to_json(const Horizon& h) {
  return json{{"label", h.label}, {"t", h.t}};
}

inline json discrepancy_report_to_json(const DiscrepancyReport& rep,
                                       bool include_per_subject = true) {
  json j;
  j["horizon"] = horizon_to_json(rep.horizon);
  j["cause"] = rep.cause;
  j["empirical_mean"] = rep.empirical_mean;
  j["theoretical_mean"] = rep.theoretical_mean;
  j["group_empirical"] = rep.group_empirical;
  j["group_theoretical"] = rep.group_theoretical;
  j["gap_empirical"] = rep.gap_empirical;
  j["gap_theoretical"] = rep.gap_theoretical;
  if (include_per_subject) {
    j["empirical_L"] = rep.empirical_L;
    j["theoretical_L"] = rep.theoretical_L;
  }
  return j;
}

inline DiscrepancyReport discrepancy_report_from_json(const json& j) {
  DiscrepancyReport rep;
  rep.horizon.label = j.at("horizon").at("label").get<std::string>();
  rep.horizon.t = j.at("horizon").at("t").get<double>();
  rep.cause = j.at("cause").get<int>();
  rep.empirical_mean = j.at("empirical_mean").get<double>();
  rep.theoretical_mean = j.at("theoretical_mean").get<double>();
  rep.group_empirical = j.at("group_empirical").get<std::array<double, 2>>();
  rep.group_theoretical = j.at("group_theoretical").get<std::array<double, 2>>();
  rep.gap_empirical = j.at("gap_empirical").get<double>();
  rep.gap_theoretical = j.at("gap_theoretical").get<double>();
  if (j.contains("empirical_L"))
    rep.empirical_L = j.at("empirical_L").get<std::vector<double>>();
  if (j.contains("theoretical_L"))
    rep.theoretical_L = j.at("theoretical_L").get<std::vector<double>>();
  return rep;
}

inline json study_summary_to_json(const StudySummary& s) {
  json j;
  j["horizon"] = s.horizon_label;
  j["rmse_L"] = s.rmse_L;
  j["rmse_L_sd"] = s.rmse_L_sd;
  j["rmse_gap"] = s.rmse_gap;
  j["rmse_gap_sd"] = s.rmse_gap_sd;
  j["slope_L"] = s.slope_L;
  j["slope_gap"] = s.slope_gap;
  j["pairs_L"] = s.pairs_L;
  j["pairs_gap"] = s.pairs_gap;
  return j;
}

inline void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed for '" + path + "'");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("cannot parse '" + path + "': " + e.what());
  }
  return j;
}

inline void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw DataError("write failed for '" + path + "'");
}

}  // namespace crisk
