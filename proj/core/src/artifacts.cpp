#include "navobs/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "navobs/errors.hpp"
#include "navobs/plot.hpp"

namespace navobs {

namespace {

using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Every plot uses at most this many points per series.
constexpr std::size_t kPlotPoints = 3000;

void put(std::string& line, double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  line.append(buf, res.ptr);
}

const char* kObserverColors[] = {"#d62728", "#1f77b4"};
const char* kAxisColors[] = {"#d62728", "#2ca02c", "#1f77b4"};

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x(), v.y(), v.z()}); }

ordered_json norms_json(const ErrorNorms& e) {
  return {{"position", e.p}, {"velocity", e.v}, {"attitude_dist", e.R}, {"bias", e.b}};
}

std::size_t plot_stride(const RunLog& log) {
  return std::max<std::size_t>(1, log.rows.size() / kPlotPoints);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
}

plot::LineChart norm_chart(const RunLog& log, const std::string& title, const std::string& y_label,
                           double (*value)(const ObserverRow&)) {
  plot::LineChart chart{title, "t [s]", y_label, {}, false};
  const std::size_t stride = plot_stride(log);
  for (std::size_t i = 0; i < log.observers.size(); ++i) {
    plot::Series s{to_string(log.observers[i]), kObserverColors[i % 2], {}, {}, i == 1};
    for (std::size_t k = 0; k < log.rows.size(); k += stride) {
      s.x.push_back(log.rows[k].truth.t);
      s.y.push_back(value(log.rows[k].obs[i]));
    }
    chart.series.push_back(std::move(s));
  }
  return chart;
}

plot::LineChart component_chart(const RunLog& log, const std::string& title,
                                const std::string& y_label, const char* const names[3],
                                Vec3 (*value)(const ObserverRow&)) {
  plot::LineChart chart{title, "t [s]", y_label, {}, false};
  const std::size_t stride = plot_stride(log);
  for (std::size_t i = 0; i < log.observers.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      plot::Series s{std::string(to_string(log.observers[i])) + " " + names[c], kAxisColors[c],
                     {}, {}, i == 1};
      for (std::size_t k = 0; k < log.rows.size(); k += stride) {
        s.x.push_back(log.rows[k].truth.t);
        s.y.push_back(value(log.rows[k].obs[i])(c));
      }
      chart.series.push_back(std::move(s));
    }
  }
  return chart;
}

plot::LineChart trajectory_chart(const RunLog& log) {
  plot::LineChart chart{"Horizontal trajectory", "x [m]", "y [m]", {}, true};
  const std::size_t stride = plot_stride(log);
  plot::Series truth{"true", "black", {}, {}, false};
  for (std::size_t k = 0; k < log.rows.size(); k += stride) {
    truth.x.push_back(log.rows[k].truth.p.x());
    truth.y.push_back(log.rows[k].truth.p.y());
  }
  chart.series.push_back(std::move(truth));
  for (std::size_t i = 0; i < log.observers.size(); ++i) {
    plot::Series s{to_string(log.observers[i]), kObserverColors[i % 2], {}, {}, i == 1};
    for (std::size_t k = 0; k < log.rows.size(); k += stride) {
      const Vec3 p = log.rows[k].obs[i].state.p_hat();
      s.x.push_back(p.x());
      s.y.push_back(p.y());
    }
    chart.series.push_back(std::move(s));
  }
  return chart;
}

}  // namespace

std::vector<std::string> csv_header(const std::vector<ObserverKind>& observers) {
  std::vector<std::string> h = {"t", "p_x", "p_y", "p_z", "v_x", "v_y", "v_z"};
  static const char* const cols[] = {
      "p_hat_x", "p_hat_y", "p_hat_z", "v_hat_x", "v_hat_y", "v_hat_z",
      "euler_err_roll", "euler_err_pitch", "euler_err_yaw", "dist_R",
      "b_hat_x", "b_hat_y", "b_hat_z", "tilde_b_norm", "sigma_R_norm", "sat_active",
      "zeta_norm", "V", "W"};
  for (const ObserverKind kind : observers) {
    for (const char* c : cols) {
      h.push_back(std::string(to_string(kind)) + "_" + c);
    }
  }
  return h;
}

void write_csv(const RunLog& log, std::ostream& out) {
  const auto header = csv_header(log.observers);
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) {
    line += (i ? "," : "") + header[i];
  }
  out << line << '\n';

  for (const RunRow& row : log.rows) {
    line.clear();
    const auto field = [&](double v) {
      if (!line.empty()) line += ',';
      put(line, v);
    };
    field(row.truth.t);
    for (int i = 0; i < 3; ++i) field(row.truth.p(i));
    for (int i = 0; i < 3; ++i) field(row.truth.v(i));
    for (const ObserverRow& o : row.obs) {
      for (int i = 0; i < 6; ++i) field(o.state.x_hat(i));
      for (int i = 0; i < 3; ++i) field(o.err.euler_err(i));
      field(o.err.dist_R);
      for (int i = 0; i < 3; ++i) field(o.state.b_hat(i));
      field(o.err.tilde_b.norm());
      field(o.sigma_R_norm);
      field(o.sat_active ? 1.0 : 0.0);
      field(o.monitor ? o.monitor->zeta.norm() : kNaN);
      field(o.monitor ? o.monitor->V : kNaN);
      field(o.monitor ? o.monitor->W : kNaN);
    }
    out << line << '\n';
  }
  if (!out) {
    throw IoError("failed writing CSV output");
  }
}

ErrorNorms error_norms(const ObserverRow& row) {
  return {row.err.tilde_x.head<3>().norm(), row.err.tilde_x.tail<3>().norm(), row.err.dist_R,
          row.err.tilde_b.norm()};
}

std::vector<ObserverMetrics> compute_metrics(const RunLog& log, std::optional<double> late_start) {
  std::vector<ObserverMetrics> out;
  if (log.rows.empty()) {
    return out;
  }
  const double t_end = log.rows.back().truth.t;
  const double late = late_start.value_or(std::max(0.0, t_end - 20.0));
  for (std::size_t i = 0; i < log.observers.size(); ++i) {
    ObserverMetrics m;
    m.kind = log.observers[i];
    m.late_start = late;
    m.final_err = error_norms(log.rows.back().obs[i]);
    std::vector<std::pair<double, double>> x_series;
    double late_sum = 0.0;
    std::size_t late_n = 0;
    for (const RunRow& row : log.rows) {
      const ObserverRow& o = row.obs[i];
      const ErrorNorms e = error_norms(o);
      m.peak_err.p = std::max(m.peak_err.p, e.p);
      m.peak_err.v = std::max(m.peak_err.v, e.v);
      m.peak_err.R = std::max(m.peak_err.R, e.R);
      m.peak_err.b = std::max(m.peak_err.b, e.b);
      if (row.truth.t >= late) {
        late_sum += e.R;
        ++late_n;
        m.late_max_p = std::max(m.late_max_p, e.p);
      }
      if (o.sat_active) {
        m.last_saturation_time = row.truth.t;
      }
      if (row.truth.t >= 5.0 && row.truth.t <= 20.0) {
        x_series.emplace_back(row.truth.t, o.err.tilde_x.norm());
      }
    }
    m.late_mean_dist_R = late_n ? late_sum / static_cast<double>(late_n) : 0.0;
    try {
      m.x_rate = fit_exponential_rate(x_series, 5.0);
    } catch (const Error& e) {
      m.x_rate_error = e.what();
    }
    m.max_orthonormality_error = log.summaries[i].max_orthonormality_error;
    m.max_bias_norm = log.summaries[i].max_bias_norm;
    out.push_back(std::move(m));
  }
  return out;
}

void write_summary(const RunLog& log, const RunConfig& cfg, std::ostream& out) {
  ordered_json j;
  const GainSet& g = log.gains;
  j["config"] = {
      {"t_end", cfg.scenario.t_end},
      {"dt", cfg.scenario.dt},
      {"sensor_mode", to_string(cfg.sensor_mode)},
      {"observer", to_string(cfg.observers)},
      {"gains",
       {{"k_R", g.k_R}, {"k_b", g.k_b}, {"rho1", g.rho1}, {"rho2", g.rho2}, {"eps_b", g.eps_b},
        {"c_hat2", g.c_hat2}, {"gamma", g.gamma}, {"c5", g.c5}}},
  };
  j["rows"] = log.rows.size();

  ordered_json observers = ordered_json::object();
  for (const ObserverMetrics& m : compute_metrics(log)) {
    ordered_json o;
    o["final_error"] = norms_json(m.final_err);
    o["peak_error"] = norms_json(m.peak_err);
    o["late_window_start"] = m.late_start;
    o["late_mean_attitude_dist"] = m.late_mean_dist_R;
    o["late_max_position_error"] = m.late_max_p;
    if (m.x_rate) {
      o["x_error_decay"] = {{"window", {5.0, 20.0}},
                            {"rate", m.x_rate->rate},
                            {"r_squared", m.x_rate->r_squared},
                            {"samples", m.x_rate->samples}};
    } else {
      o["x_error_decay"] = {{"error", m.x_rate_error}};
    }
    o["last_saturation_time"] = m.last_saturation_time;
    o["max_orthonormality_error"] = m.max_orthonormality_error;
    o["max_bias_estimate_norm"] = m.max_bias_norm;
    observers[to_string(m.kind)] = std::move(o);
  }
  j["observers"] = std::move(observers);

  const AssumptionReport& a = log.assumptions;
  j["assumptions"] = {{"c0", a.c0}, {"t_c0", a.t_c0}, {"c1", a.c1}, {"c2", a.c2}, {"c3", a.c3},
                      {"c4", a.c4}, {"c5", a.c5}, {"observability_ok", a.observability_ok},
                      {"c_hat2_ok", a.c_hat2_ok}, {"violations", a.violations}};
  j["em_spectrum"] = {{"lambda_min", log.spectrum.lambda_min},
                      {"t_lambda_min", log.spectrum.t_lambda_min},
                      {"lambda_max", log.spectrum.lambda_max},
                      {"positive_definite", log.spectrum.positive_definite}};
  j["lyapunov"] = {{"beta1", log.lyapunov.beta1},
                   {"beta2", log.lyapunov.beta2},
                   {"residual", log.lyapunov.residual}};
  if (log.bounds) {
    const GainBoundReport& b = *log.bounds;
    j["gain_bounds"] = {{"epsilon", b.epsilon}, {"mu", b.mu},         {"mu_max", b.mu_max},
                        {"kR_min", b.kR_min},   {"gamma_min", b.gamma_min},
                        {"alpha", {b.alpha1, b.alpha2, b.alpha3, b.alpha4}},
                        {"c_b", b.c_b},         {"c_omega", b.c_omega}, {"c_g", b.c_g},
                        {"c_R", b.c_R},         {"zeta_threshold", b.zeta_threshold},
                        {"kR_ok", b.kR_ok},     {"gamma_ok", b.gamma_ok}};
  } else {
    j["gain_bounds"] = nullptr;
  }
  j["W_mu"] = log.mu;
  j["scaling_identity_residual"] = log.scaling_residual;
  j["true_gyro_bias"] = vec_json(cfg.scenario.b_omega);
  out << j.dump(2) << '\n';
}

std::vector<std::filesystem::path> emit_artifacts(const RunLog& log, const RunConfig& cfg,
                                                  const std::filesystem::path& dir) {
  if (log.rows.empty()) {
    throw Error("cannot emit artifacts for an empty run log");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;

  {
    const auto path = dir / "run.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw IoError("cannot open " + path.string());
    }
    write_csv(log, out);
    written.push_back(path);
  }
  {
    const auto path = dir / "summary.json";
    std::ofstream out(path, std::ios::binary);
    write_summary(log, cfg, out);
    if (!out) {
      throw IoError("cannot write " + path.string());
    }
    written.push_back(path);
  }

  static const char* const xyz[] = {"x", "y", "z"};
  static const char* const rpy[] = {"roll", "pitch", "yaw"};
  const std::vector<std::pair<std::string, plot::LineChart>> charts = {
      {"trajectory.svg", trajectory_chart(log)},
      {"position_error.svg",
       norm_chart(log, "Position estimation error", "|p - p_hat| [m]",
                  [](const ObserverRow& o) { return o.err.tilde_x.head<3>().norm(); })},
      {"velocity_error.svg",
       norm_chart(log, "Velocity estimation error", "|v - v_hat| [m/s]",
                  [](const ObserverRow& o) { return o.err.tilde_x.tail<3>().norm(); })},
      {"attitude_error.svg",
       component_chart(log, "Euler angles of R R_hat^T", "[deg]", rpy,
                       [](const ObserverRow& o) -> Vec3 { return o.err.euler_err / kDegToRad; })},
      {"bias_error.svg",
       component_chart(log, "Gyro bias estimation error", "[deg/s]", xyz,
                       [](const ObserverRow& o) -> Vec3 { return o.err.tilde_b / kDegToRad; })},
  };
  for (const auto& [name, chart] : charts) {
    const auto path = dir / name;
    write_file(path, plot::render_svg(chart));
    written.push_back(path);
  }
  return written;
}

}  // namespace navobs
