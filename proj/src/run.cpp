#include "pgflow/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pgflow/balayage.hpp"

namespace pgflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::BoundaryCrossing: return "boundary-crossing";
    case EventKind::ZeroCollision: return "zero-collision";
    case EventKind::ReflectionCoincidence: return "reflection-coincidence";
    case EventKind::PoleApproachesCircle: return "pole-approaches-circle";
  }
  return "?";
}

std::vector<std::pair<double, double>> parse_qtable(const std::string& text) {
  std::vector<std::pair<double, double>> pts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ';')) {
    double t, q;
    if (std::sscanf(item.c_str(), " %lf : %lf", &t, &q) != 2)
      throw ConfigError("bad q-table entry: '" + item + "'");
    pts.emplace_back(t, q);
  }
  if (pts.size() < 2) throw ConfigError("q-table needs at least two points");
  for (size_t i = 1; i < pts.size(); ++i)
    if (pts[i].first <= pts[i - 1].first)
      throw ConfigError("q-table times must increase");
  return pts;
}

QSchedule qtable_schedule(std::vector<std::pair<double, double>> pts) {
  return [pts = std::move(pts)](double t) {
    if (t <= pts.front().first) return pts.front().second;
    if (t >= pts.back().first) return pts.back().second;
    for (size_t i = 1; i < pts.size(); ++i)
      if (t <= pts[i].first) {
        double u = (t - pts[i - 1].first) / (pts[i].first - pts[i - 1].first);
        return (1.0 - u) * pts[i - 1].second + u * pts[i].second;
      }
    return pts.back().second;
  };
}

RationalMap map_from_config(const ConfigFile& cfg) {
  RationalMap g;
  g.lead = Complex(cfg.get_double("map", "lead_re", 1.0),
                   cfg.get_double("map", "lead_im", 0.0));
  auto parse_roots = [&](const std::string& key, std::vector<RootEntry>* out) {
    std::string text = cfg.get("map", key, "");
    if (text.empty()) return;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
      double re, im;
      int mult = 1;
      int got = std::sscanf(item.c_str(), " %lf , %lf , %d", &re, &im, &mult);
      if (got < 2) throw ConfigError("bad [map] " + key + " entry: " + item);
      out->push_back({Complex(re, im), mult});
    }
  };
  parse_roots("zeros", &g.zeros);
  parse_roots("poles", &g.poles);
  return g;
}

Grid grid_from_config(const ConfigFile& cfg) {
  Grid g;
  if (!cfg.has("grid", "h")) throw ConfigError("missing [grid] section");
  g.x0 = cfg.get_double("grid", "x0", -2.0);
  g.y0 = cfg.get_double("grid", "y0", -2.0);
  g.h = cfg.get_double("grid", "h", 0.01);
  g.nx = cfg.get_int("grid", "nx", 400);
  g.ny = cfg.get_int("grid", "ny", 400);
  if (g.h <= 0.0 || g.nx < 8 || g.ny < 8) throw ConfigError("bad [grid] spec");
  return g;
}

nlohmann::json config_to_json(const ConfigFile& cfg) {
  nlohmann::json j;
  for (const auto& [sec, kv] : cfg.sections) {
    nlohmann::json s;
    for (const auto& [k, v] : kv) s[k] = v;
    j[sec.empty() ? "(top)" : sec] = s;
  }
  return j;
}

struct TrajWriter {
  std::ofstream out;
  bool header_written = false;

  void open(const std::string& path) {
    if (path.empty()) return;
    out.open(path);
    if (!out) throw ConfigError("cannot write " + path);
  }
  void row(const PGState& s) {
    if (!out.is_open()) return;
    if (!header_written) {
      out << "t,Q,b_re,b_im";
      for (size_t k = 0; k < s.g.zeros.size(); ++k)
        out << ",omega" << k + 1 << "_re,omega" << k + 1 << "_im";
      for (size_t j = 0; j < s.g.poles.size(); ++j)
        out << ",pole" << j + 1 << "_re,pole" << j + 1 << "_im,pole" << j + 1
            << "_mult";
      out << "\n";
      header_written = true;
    }
    out << format_value(s.t) << ',' << format_value(s.Q) << ','
        << format_value(s.g.lead.real()) << ',' << format_value(s.g.lead.imag());
    for (const auto& z : s.g.zeros)
      out << ',' << format_value(z.location.real()) << ','
          << format_value(z.location.imag());
    for (const auto& p : s.g.poles)
      out << ',' << format_value(p.location.real()) << ','
          << format_value(p.location.imag()) << ',' << p.mult;
    out << "\n";
  }
};

struct ObsWriter {
  std::ofstream out;
  int K = 5;

  void open(const std::string& path) {
    if (path.empty()) return;
    out.open(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "t,Q";
    for (int k = 0; k <= K; ++k) out << ",M" << k << "_re,M" << k << "_im";
    out << ",pg_residual\n";
  }
  void row(const PGState& s, double q) {
    if (!out.is_open()) return;
    MomentVector mv = harmonic_moments(s, K);
    out << format_value(s.t) << ',' << format_value(s.Q);
    for (const auto& m : mv.M)
      out << ',' << format_value(m.real()) << ',' << format_value(m.imag());
    out << ',' << format_value(pg_residual(s, q)) << "\n";
  }
};

void write_report(const RunReport& rep, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (out) out << rep.to_json().dump(2) << "\n";
}

}  // namespace

bool RunReport::pass() const {
  if (!error.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void RunReport::add(const std::string& name, double expected, double actual,
                    double tol) {
  checks.push_back({name, expected, actual, tol, std::abs(actual - expected) <= tol});
}

void RunReport::add_flag(const std::string& name, bool ok) {
  checks.push_back({name, 1.0, ok ? 1.0 : 0.0, 0.0, ok});
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["pass"] = pass();
  j["elapsed_seconds"] = elapsed_seconds;
  j["q_went_negative"] = q_went_negative;
  if (!error.empty()) j["error"] = error;
  if (!config_echo.is_null()) j["config"] = config_echo;
  j["events"] = events;
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"expected", c.expected},
                           {"actual", c.actual},
                           {"tol", c.tol},
                           {"pass", c.pass}});
  return j;
}

std::string resolve_out_dir(const ConfigFile& cfg) {
  std::string dir = cfg.get("output", "dir", ".");
  if (const char* env = std::getenv("PGFLOW_OUT"); env && *env) dir = env;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  return dir;
}

RunReport run_simulate(const ConfigFile& cfg, const std::string& out_dir) {
  auto t_start = Clock::now();
  double t0 = cfg.get_double("run", "t0", 0.0);
  double t1 = cfg.get_double("run", "t1", 1.0);
  double dt = cfg.get_double("run", "dt", 1e-3);
  int stride = cfg.get_int("run", "stride", 10);
  bool transitions = cfg.get("run", "transitions", "on") == "on";
  double dt0 = cfg.get_double("run", "restart_dt0", 0.02);
  if (!(t0 < t1) || !(dt > 0.0) || !(dt < t1 - t0) || stride < 1)
    throw ConfigError("need t0 < t1, 0 < dt < t1-t0, stride >= 1");

  RunReport rep;
  rep.config_echo = config_to_json(cfg);

  PGState s;
  QSchedule qs;
  bool has_scenario = cfg.has("scenario", "name");
  ScenarioTag tag;
  if (has_scenario) {
    tag = scenario_from_string(cfg.require("scenario", "name"),
                               cfg.get_double("scenario", "a", 1.0));
    auto [st, q0] = reference_state(tag, t0);
    s = st;
    qs = [tag](double t) { return reference_q(tag, t); };
    (void)q0;
  } else if (cfg.has("map", "lead_re")) {
    s.t = t0;
    s.Q = cfg.get_double("run", "Q0", 0.0);
    s.g = map_from_config(cfg);
    qs = qtable_schedule(parse_qtable(cfg.require("qtable", "points")));
  } else {
    throw ConfigError("need a [scenario] name or an explicit [map]");
  }

  std::string traj_path = cfg.get("output", "trajectory", "");
  std::string obs_path = cfg.get("output", "observables", "");
  std::string report_path = cfg.get("output", "report", "report.json");
  std::string events_path = cfg.get("output", "events", "");
  auto in_dir = [&](const std::string& p) {
    return p.empty() ? p : out_dir + "/" + p;
  };

  TrajWriter traj;
  ObsWriter obs;
  traj.open(in_dir(traj_path));
  obs.K = cfg.get_int("run", "moments", 5);
  obs.open(in_dir(obs_path));

  try {
    // A degenerate initial state (zero on the circle, transition structure)
    // is carried through the starting instant by the constraint solver.
    bool at_crossing = false;
    for (const auto& z : s.g.zeros)
      if (std::abs(std::abs(z.location) - 1.0) < kEpsCircle) at_crossing = true;
    if (at_crossing) {
      if (!transitions)
        throw PreconditionError("initial state at a crossing; transitions off");
      s = restart_after_transition(s, dt0, qs);
    }

    traj.row(s);
    obs.row(s, qs(s.t));
    long istep = 0;
    double max_branch_err = 0.0;
    while (s.t < t1 - 1e-12) {
      double h = std::min(dt, t1 - s.t);
      auto [next, events] = step(s, h, qs);
      s = next;
      ++istep;
      if (qs(s.t) < 0.0) rep.q_went_negative = true;
      bool crossed = false;
      for (const auto& ev : events) {
        rep.events.push_back({{"kind", event_kind_name(ev.kind)},
                              {"t_event", ev.t_event},
                              {"index", ev.index}});
        if (ev.kind == EventKind::BoundaryCrossing) {
          crossed = true;
          if (transitions) {
            s = restart_after_transition(transition_boundary(s, ev.index), dt0,
                                         qs);
          }
        }
      }
      if (crossed && !transitions) break;
      if (istep % stride == 0 || s.t >= t1 - 1e-12) {
        traj.row(s);
        obs.row(s, qs(s.t));
        if (has_scenario && tag.name == Scenario::Sakai) {
          for (const auto& z : s.g.zeros)
            if (std::abs(z.location) < 1.0)
              max_branch_err = std::max(
                  max_branch_err, std::abs(eval_f(s.g, z.location) -
                                           Complex(tag.a, 0.0)));
        }
      }
    }

    // Scenario-specific terminal checks against the closed forms.
    if (has_scenario) {
      switch (tag.name) {
        case Scenario::CardioidUnivalent: {
          double w = std::exp(3.0 * t1);
          rep.add("omega1_final", w, std::abs(s.g.zeros[0].location), 1e-6 * w);
          double b = std::exp(-2.0 * t1);
          rep.add("b_final", -b, s.g.lead.real(), 1e-6 * b);
          break;
        }
        case Scenario::CardioidPG: {
          double w = std::exp(-3.0 * t1);
          rep.add("omega1_final", w, std::abs(s.g.zeros[0].location), 1e-6);
          rep.add("b_final", -std::exp(2.0 * t1), s.g.lead.real(),
                  1e-6 * std::exp(2.0 * t1));
          break;
        }
        case Scenario::Sakai: {
          rep.add("zeta1_final", t1, s.g.poles[0].location.real(), 1e-5);
          double w2 = 2.0 * t1 - 1.0 / t1;
          double actual_w2 = 0.0;
          for (const auto& z : s.g.zeros)
            if (std::abs(z.location) > 1.0) actual_w2 = z.location.real();
          rep.add("omega2_final", w2, actual_w2, 1e-5);
          rep.add("b_final", tag.a * t1 * t1 * t1, s.g.lead.real(), 1e-5);
          rep.add("branch_value_max_err", 0.0, max_branch_err, 1e-6);
          break;
        }
        case Scenario::CardioidLK: {
          LKCoefficients c = reference_coefficients_lk(t1);
          rep.add("zeta1_final", c.zeta1, s.g.poles[0].location.real(), 1e-4);
          rep.add("b3_final", c.b3, -0.5 * s.g.lead.real(), 1e-4);
          Complex sum{0.0, 0.0}, prod{1.0, 0.0};
          for (const auto& z : s.g.zeros) {
            sum += z.location;
            prod *= z.location;
          }
          double b = s.g.lead.real(), z1 = s.g.poles[0].location.real();
          rep.add("b2_final", c.b2,
                  3.0 * (-0.5 * b) * z1 + b * sum.real(), 1e-4);
          rep.add("Q_final", c.Q, s.Q, 1e-4);
          break;
        }
        case Scenario::GrowingDisk: {
          rep.add("b_final", tag.a * t1, s.g.lead.real(), 1e-6);
          break;
        }
      }
    }
  } catch (const Error& e) {
    rep.error = e.what();
  }
  rep.elapsed_seconds = seconds_since(t_start);
  if (!events_path.empty()) {
    std::ofstream out(in_dir(events_path));
    if (out) out << rep.events.dump(2) << "\n";
  }
  write_report(rep, in_dir(report_path));
  return rep;
}

RunReport run_balayage(const ConfigFile& cfg, const std::string& out_dir) {
  auto t_start = Clock::now();
  RunReport rep;
  rep.config_echo = config_to_json(cfg);
  std::string report_path = cfg.get("output", "report", "report.json");
  auto in_dir = [&](const std::string& p) {
    return p.empty() ? p : out_dir + "/" + p;
  };
  try {
    Grid grid = grid_from_config(cfg);
    std::string op = cfg.require("balayage", "op");
    double tol = cfg.get_double("balayage", "tol", 1e-10);
    BalayageOutcome outcome;
    if (op == "point-source") {
      double Q = cfg.get_double("balayage", "Q", 0.5);
      GridField lambda = GridField::zeros(grid);
      lambda.values.setConstant(1.0);
      GridField mu = GridField::zeros(grid);
      int i0, j0;
      if (!grid.locate(0.0, 0.0, &i0, &j0))
        throw ConfigError("origin off-grid");
      mu.values(i0, j0) = 2.0 * M_PI * Q / (grid.h * grid.h);
      outcome = bal(mu, lambda, tol);
      double area = outcome.saturated.mass();
      double expect = 2.0 * M_PI * Q;
      rep.add("saturated_area", expect, area, 0.03 * expect);
    } else if (op == "weak-step") {
      double r0 = cfg.get_double("balayage", "radius", 1.0);
      double dQ = cfg.get_double("balayage", "deltaQ", 0.5);
      GridField lambda = GridField::zeros(grid);
      lambda.values.setConstant(1.0);
      GridField mask = GridField::zeros(grid);
      for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
          if (std::hypot(grid.cx(i), grid.cy(j)) < r0)
            mask.values(i, j) = 1.0;
      double mass0 = mask.mass();
      GridField grown = weak_step(mask, lambda, dQ, tol);
      rep.add("added_mass", 2.0 * M_PI * dQ, grown.mass() - mass0,
              dQ == 0.0 ? 1e-12 : 1e-6 * 2.0 * M_PI * dQ +
                                       4.0 * grid.h * grid.h);
      outcome.saturated = grown;
      outcome.u = GridField::zeros(grid);
      outcome.result = grown;
    } else if (op == "weighted-blowup") {
      double Q = cfg.get_double("balayage", "Q", 0.1);
      RationalMap g = map_from_config(cfg);
      outcome = weighted_blowup(g, Q, grid, tol);
      double added = 0.0;
      for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
          if (outcome.saturated.values(i, j) > 0.5 &&
              std::hypot(grid.cx(i), grid.cy(j)) >= 1.0)
            added += std::norm(eval_g(g, Complex(grid.cx(i), grid.cy(j)))) *
                     grid.h * grid.h;
      // Coarse tolerance: the cell-center sum under-counts where the weight
      // vanishes on the boundary of the seed domain.
      rep.add("weighted_added_mass", 2.0 * M_PI * Q, added,
              0.2 * 2.0 * M_PI * Q);
      if (cfg.get("balayage", "check_star", "on") == "on")
        rep.add_flag("star_shaped_geometric", star_shaped(outcome).geometric);
    } else {
      throw ConfigError("unknown balayage op: " + op);
    }
    std::string mask_path = cfg.get("output", "mask", "");
    std::string u_path = cfg.get("output", "u", "");
    if (!mask_path.empty()) write_gridfield(outcome.saturated, in_dir(mask_path));
    if (!u_path.empty()) write_gridfield(outcome.u, in_dir(u_path));
  } catch (const GridTooSmallError& e) {
    rep.error = std::string(e.what()) + " (suggest enlarging the grid extent)";
  } catch (const Error& e) {
    rep.error = e.what();
  }
  rep.elapsed_seconds = seconds_since(t_start);
  write_report(rep, in_dir(report_path));
  return rep;
}

}  // namespace pgflow
