#include "navobs/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "navobs/errors.hpp"
#include "navobs/range.hpp"

namespace navobs {

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) {
        throw ValidationError(field(key), "expected a number");
      }
      out = v->get<double>();
    }
  }

  void optional_number(const std::string& key, std::optional<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) {
        throw ValidationError(field(key), "expected a number");
      }
      out = v->get<double>();
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        throw ValidationError(field(key), "expected a non-negative integer");
      }
      out = v->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) {
        throw ValidationError(field(key), "expected true or false");
      }
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) {
        throw ValidationError(field(key), "expected a string");
      }
      out = v->get<std::string>();
    }
  }

  void vec3(const std::string& key, Vec3& out) {
    if (const json* v = find(key)) {
      out = to_vec3(*v, field(key));
    }
  }

  static Vec3 to_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) {
      throw ValidationError(where, "expected an array of 3 numbers");
    }
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      if (!v[static_cast<std::size_t>(i)].is_number()) {
        throw ValidationError(where, "expected an array of 3 numbers");
      }
      out(i) = v[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.contains(key)) {
        throw ValidationError(field(key), "unknown key");
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_scenario(Reader& r, ScenarioConfig& s) {
  std::string trajectory = s.trajectory == TrajectoryKind::Hover ? "hover" : "accelerating";
  r.string("trajectory", trajectory);
  if (trajectory == "accelerating") {
    s.trajectory = TrajectoryKind::Accelerating;
  } else if (trajectory == "hover") {
    s.trajectory = TrajectoryKind::Hover;
  } else {
    throw ValidationError(r.field("trajectory"), "expected \"accelerating\" or \"hover\"");
  }
  r.number("g", s.g);
  r.vec3("m_I", s.m_I);
  Vec3 bias_deg = s.b_omega / kDegToRad;
  r.vec3("gyro_bias_deg_s", bias_deg);
  s.b_omega = bias_deg * kDegToRad;
  if (const json* a = r.find("anchors")) {
    if (!a->is_array()) {
      throw ValidationError(r.field("anchors"), "expected an array of 3-vectors");
    }
    s.anchors.clear();
    for (std::size_t i = 0; i < a->size(); ++i) {
      s.anchors.push_back(Reader::to_vec3((*a)[i], r.field("anchors") + "[" + std::to_string(i) + "]"));
    }
  }
  r.integer("reference_anchor", s.reference_anchor);
  r.number("t_end", s.t_end);
  r.number("dt", s.dt);
  r.vec3("hover_position", s.hover_position);
  r.vec3("initial_attitude", s.initial_attitude);
  r.finish();
}

void read_poles(const json& v, const std::string& where, std::array<PolePair, 3>& poles) {
  const auto pair_of = [&](const json& p) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ValidationError(where, "expected [l1, l2] or three such pairs");
    }
    return PolePair{p[0].get<double>(), p[1].get<double>()};
  };
  if (v.is_array() && v.size() == 2 && v[0].is_number()) {
    poles.fill(pair_of(v));
    return;
  }
  if (v.is_array() && v.size() == 3) {
    for (std::size_t i = 0; i < 3; ++i) {
      poles[i] = pair_of(v[i]);
    }
    return;
  }
  throw ValidationError(where, "expected [l1, l2] or three such pairs");
}

void read_gains(Reader& r, GainParams& g) {
  r.number("k_R", g.k_R);
  r.number("k_b", g.k_b);
  r.number("rho1", g.rho1);
  r.number("rho2", g.rho2);
  r.number("eps_b", g.eps_b);
  r.number("c_hat2", g.c_hat2);
  r.number("gamma", g.gamma);
  r.number("c5", g.c5);
  if (const json* p = r.find("poles")) {
    read_poles(*p, r.field("poles"), g.poles);
  }
  r.finish();
}

void read_initial(Reader& r, InitialEstimate& e) {
  r.vec3("p", e.p);
  r.vec3("v", e.v);
  r.vec3("attitude", e.attitude);
  r.vec3("b", e.b);
  r.finish();
}

void read_analysis(Reader& r, RunConfig& cfg) {
  r.number("epsilon", cfg.epsilon);
  r.optional_number("mu", cfg.mu);
  r.integer("monitor_decimation", cfg.monitor_decimation);
  r.boolean("strict_theory", cfg.strict_theory);
  r.finish();
}

void require_positive(double value, const std::string& field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(field, "must be a positive finite number");
  }
}

}  // namespace

const char* to_string(ObserverSelection sel) {
  switch (sel) {
    case ObserverSelection::Proposed:
      return "proposed";
    case ObserverSelection::Adhoc:
      return "adhoc";
    case ObserverSelection::Both:
      return "both";
  }
  return "unknown";
}

const char* to_string(SensorMode mode) {
  return mode == SensorMode::Gps ? "gps" : "ranges";
}

std::optional<ObserverSelection> parse_observer_selection(std::string_view s) {
  if (s == "proposed") return ObserverSelection::Proposed;
  if (s == "adhoc") return ObserverSelection::Adhoc;
  if (s == "both") return ObserverSelection::Both;
  return std::nullopt;
}

RunConfig parse_config(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return RunConfig{};
  }
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  Reader root(doc, "");
  if (const json* s = root.find("scenario")) {
    Reader r(*s, "scenario");
    read_scenario(r, cfg.scenario);
  }
  if (const json* g = root.find("gains")) {
    Reader r(*g, "gains");
    read_gains(r, cfg.gains);
  }
  if (const json* i = root.find("initial_estimate")) {
    Reader r(*i, "initial_estimate");
    read_initial(r, cfg.initial);
  }
  if (const json* a = root.find("analysis")) {
    Reader r(*a, "analysis");
    read_analysis(r, cfg);
  }
  std::string observer = to_string(cfg.observers);
  root.string("observer", observer);
  const auto sel = parse_observer_selection(observer);
  if (!sel) {
    throw ValidationError("observer", "expected \"proposed\", \"adhoc\" or \"both\"");
  }
  cfg.observers = *sel;
  std::string mode = to_string(cfg.sensor_mode);
  root.string("sensor_mode", mode);
  if (mode == "ranges") {
    cfg.sensor_mode = SensorMode::Ranges;
  } else if (mode == "gps") {
    cfg.sensor_mode = SensorMode::Gps;
  } else {
    throw ValidationError("sensor_mode", "expected \"ranges\" or \"gps\"");
  }
  root.string("output_dir", cfg.output_dir);
  root.integer("seed", cfg.seed);
  root.finish();
  return cfg;
}

void validate_config(RunConfig& cfg) {
  ScenarioConfig& s = cfg.scenario;
  require_positive(s.dt, "scenario.dt");
  if (!(s.t_end >= 0.0) || !std::isfinite(s.t_end)) {
    throw ValidationError("scenario.t_end", "must be a non-negative finite number");
  }
  require_positive(s.g, "scenario.g");
  if (!s.m_I.allFinite() || s.m_I.norm() == 0.0) {
    throw ValidationError("scenario.m_I", "must be a finite non-zero vector");
  }

  GainParams& g = cfg.gains;
  require_positive(g.k_R, "gains.k_R");
  require_positive(g.k_b, "gains.k_b");
  require_positive(g.rho1, "gains.rho1");
  require_positive(g.rho2, "gains.rho2");
  require_positive(g.eps_b, "gains.eps_b");
  require_positive(g.c_hat2, "gains.c_hat2");
  if (!(g.gamma >= 1.0)) {
    throw ValidationError("gains.gamma", "must be >= 1");
  }
  if (g.c5 == 0.0) {
    g.c5 = 1.05 * s.b_omega.norm();
    if (g.c5 == 0.0) {
      throw ValidationError("gains.c5", "must be given when the gyro bias is zero");
    }
  }
  require_positive(g.c5, "gains.c5");
  if (s.b_omega.norm() > g.c5) {
    throw ValidationError("gains.c5", "is smaller than the norm of the gyro bias");
  }
  for (const PolePair& p : g.poles) {
    if (!(p.first < 0.0) || !(p.second < 0.0)) {
      std::ostringstream os;
      os << "pole pair (" << p.first << ", " << p.second << ") is not strictly in the left half-plane";
      throw ValidationError("gains.poles", os.str());
    }
  }

  OutputMatrix c_p = OutputMatrix::Identity(3, 3);
  if (cfg.sensor_mode == SensorMode::Ranges) {
    try {
      c_p = build_Cp(s.anchors, s.reference_anchor);
    } catch (const DimensionMismatch& e) {
      throw ValidationError("scenario.reference_anchor", e.what());
    } catch (const CoplanarAnchors& e) {
      throw ValidationError("scenario.anchors", e.what());
    }
  }
  try {
    (void)synthesize_gains(c_p, g);
  } catch (const NotHurwitz& e) {
    throw ValidationError("gains.poles", e.what());
  } catch (const SingularKvCp& e) {
    throw ValidationError("gains.poles", e.what());
  }

  if (cfg.initial.b.norm() > g.c5 + g.eps_b) {
    throw ValidationError("initial_estimate.b", "must lie in the ball of radius c5 + eps_b");
  }
  if (!(cfg.epsilon > 0.5 && cfg.epsilon < 1.0)) {
    throw ValidationError("analysis.epsilon", "must lie in (0.5, 1)");
  }
  if (cfg.mu && !(*cfg.mu > 0.0)) {
    throw ValidationError("analysis.mu", "must be positive");
  }
  if (cfg.monitor_decimation == 0) {
    throw ValidationError("analysis.monitor_decimation", "must be >= 1");
  }

  if (cfg.strict_theory) {
    const AssumptionReport rep = validate_assumptions(s, uniform_grid(s.t_end, s.dt), g.c_hat2);
    if (!rep.observability_ok) {
      throw ValidationError("scenario.m_I", rep.violations.front());
    }
    if (!rep.c_hat2_ok) {
      std::ostringstream os;
      os << "must exceed sqrt(8) c2 = " << std::sqrt(8.0) * rep.c2;
      throw ValidationError("gains.c_hat2", os.str());
    }
  }
}

RunConfig load_config(std::string_view text) {
  RunConfig cfg = parse_config(text);
  validate_config(cfg);
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

}  // namespace navobs
