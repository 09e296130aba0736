#include "varigap/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "varigap/error.hpp"

namespace varigap::io {

using json = nlohmann::ordered_json;

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), r.ptr);
}

namespace {

json num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json ext(const ExtendedValue& v) { return num(v.to_double()); }

json parse_text(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed ") + what + " JSON: " + e.what(),
                e.byte);
  }
}

[[noreturn]] void bad_shape(const char* what, const std::string& detail) {
  throw Error(ErrorCode::Parse, std::string("malformed ") + what + " JSON: " + detail);
}

double number_field(const json& obj, const char* key, const char* what) {
  if (!obj.contains(key) || !obj.at(key).is_number())
    bad_shape(what, std::string("missing numeric field '") + key + "'");
  return obj.at(key).get<double>();
}

}  // namespace

Lagrangian lagrangian_from_json(std::string_view text) {
  const json j = parse_text(text, "Lagrangian");
  if (!j.is_object()) bad_shape("Lagrangian", "expected an object");
  if (j.contains("builtin")) {
    if (!j.at("builtin").is_string()) bad_shape("Lagrangian", "'builtin' must be a string");
    return Lagrangian::builtin(j.at("builtin").get<std::string>());
  }
  if (!j.contains("expr") || !j.at("expr").is_string())
    bad_shape("Lagrangian", "expected 'builtin' or 'expr'");
  std::vector<std::string> vars = {"y", "v"};
  if (j.contains("vars")) {
    const json& vj = j.at("vars");
    if (!vj.is_array() || vj.size() != 2 || !vj[0].is_string() || !vj[1].is_string())
      bad_shape("Lagrangian", "'vars' must be two strings");
    vars = {vj[0].get<std::string>(), vj[1].get<std::string>()};
  }
  return Lagrangian::parse(j.at("expr").get<std::string>(), vars);
}

RhoPair rho_from_json(std::string_view text) {
  const json j = parse_text(text, "rho");
  if (!j.is_object()) bad_shape("rho", "expected an object");
  auto side = [&](const char* key) {
    if (!j.contains(key)) bad_shape("rho", std::string("missing field '") + key + "'");
    const json& s = j.at(key);
    if (s.is_string()) return s.get<std::string>();
    if (s.is_number()) return format_number(s.get<double>());
    bad_shape("rho", std::string("'") + key + "' must be an expression string");
  };
  return RhoPair(side("minus"), side("plus"));
}

Trajectory trajectory_from_json(std::string_view text) {
  const json j = parse_text(text, "trajectory");
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    bad_shape("trajectory", "expected an object with a 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "pl") {
    if (!j.contains("nodes") || !j.at("nodes").is_array())
      bad_shape("trajectory", "'nodes' must be an array of [t, y] pairs");
    std::vector<double> t, y;
    for (const json& node : j.at("nodes")) {
      if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number())
        bad_shape("trajectory", "each node must be a pair of numbers");
      t.push_back(node[0].get<double>());
      y.push_back(node[1].get<double>());
    }
    return PLTrajectory(Partition(std::move(t)), std::move(y));
  }
  if (type != "analytic") bad_shape("trajectory", "unknown type '" + type + "'");
  if (!j.contains("family") || !j.at("family").is_string())
    bad_shape("trajectory", "missing 'family'");
  const std::string family = j.at("family").get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (!params.is_object()) bad_shape("trajectory", "'params' must be an object");
  if (family == "sqrt") return AnalyticTrajectory::sqrt();
  if (family == "power") return AnalyticTrajectory::power(number_field(params, "gamma", "trajectory"));
  if (family == "affine") {
    return AnalyticTrajectory::affine(number_field(params, "intercept", "trajectory"),
                                      number_field(params, "slope", "trajectory"));
  }
  if (family == "constant")
    return AnalyticTrajectory::constant(number_field(params, "value", "trajectory"));
  bad_shape("trajectory", "unknown family '" + family + "'");
}

// ---------------------------------------------------------------------------

namespace {

json nodes_json(std::span<const double> t, std::span<const double> y) {
  json nodes = json::array();
  for (std::size_t i = 0; i < t.size(); ++i) nodes.push_back(json::array({t[i], y[i]}));
  return nodes;
}

json trajectory_json(const Trajectory& y) {
  if (const auto* pl = std::get_if<PLTrajectory>(&y)) {
    return json{{"type", "pl"}, {"nodes", nodes_json(pl->times(), pl->values())}};
  }
  const auto& an = std::get<AnalyticTrajectory>(y);
  json params = json::object();
  switch (an.family()) {
    case AnalyticFamily::Sqrt: break;
    case AnalyticFamily::Power: params["gamma"] = an.gamma(); break;
    case AnalyticFamily::Affine:
      params["intercept"] = an.intercept();
      params["slope"] = an.slope();
      break;
    case AnalyticFamily::Constant: params["value"] = an.constant_value(); break;
  }
  return json{{"type", "analytic"}, {"family", to_string(an.family())}, {"params", params}};
}

json energy_json(const EnergyResult& r) {
  return json{{"value", ext(r.value)},
              {"status", to_string(r.status)},
              {"lower_bound", num(r.lower_bound)},
              {"segments_evaluated", r.segments_evaluated}};
}

json certificate_json(const GapCertificate& c) {
  json bounds = json::array();
  for (std::size_t k = 0; k < c.bounds.size(); ++k) {
    bounds.push_back(json{{"k", k + 1}, {"c", c.c_sequence[k]}, {"bound", num(c.bounds[k])}});
  }
  return json{{"verdict", to_string(c.verdict)},
              {"a", c.a},
              {"b", c.b},
              {"d", c.d},
              {"lipschitz", c.lipschitz},
              {"threshold", c.threshold},
              {"fixed_terms", num(c.fixed_terms)},
              {"bounds", bounds}};
}

json verdict_json(const Verdict& v) {
  json out{{"status", to_string(v.status)}};
  if (v.witness) {
    const Witness& w = *v.witness;
    json wj{{"kind", to_string(w.kind)}};
    if (w.side) {
      wj["z"] = w.y;
      wj["side"] = to_string(*w.side);
      wj["rho"] = num(w.v);
    } else {
      wj["y"] = w.y;
      wj["v"] = w.v;
    }
    wj["value"] = std::isnan(w.value) ? json(nullptr) : num(w.value);
    out["witness"] = wj;
  } else {
    out["witness"] = nullptr;
  }
  json res{{"samples", v.resolution.samples},
           {"interval", json::array({v.resolution.range.lo, v.resolution.range.hi})}};
  if (v.resolution.velocity_range) {
    res["velocity_interval"] =
        json::array({v.resolution.velocity_range->lo, v.resolution.velocity_range->hi});
  }
  res["refinement_points"] = v.resolution.refinement_points;
  out["resolution"] = res;
  out["sup_estimate"] = v.sup_infinite ? json("inf") : json(v.sup_estimate);
  out["message"] = v.message;
  return out;
}

json report_json(const RepairReport& r) {
  json checks = json::array();
  for (const RepairCheck& c : r.checks) {
    checks.push_back(json{{"name", c.name}, {"ok", c.ok}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}});
  }
  return json{{"threshold", r.threshold},
              {"p", r.p},
              {"mode", to_string(r.mode)},
              {"T", r.T},
              {"bad_measure", r.bad_measure},
              {"bad_image_measure", r.bad_image_measure},
              {"bad_variation", r.u_variation},
              {"m", r.m},
              {"tau", r.tau},
              {"lip_constant", r.lip_constant},
              {"sobolev_distance", r.sobolev_distance},
              {"derivative_distance_power", r.derivative_distance_power},
              {"range", json::array({r.range.alpha, r.range.beta})},
              {"rho_min", r.rho.rho_min},
              {"rho_max", r.rho.rho_max},
              {"graph_sup", num(r.graph_sup)},
              {"energy_y", energy_json(r.energy_y)},
              {"energy_w", energy_json(r.energy_w)},
              {"P", json::array({r.P1, r.P2, r.P3})},
              {"Q", json::array({num(r.Q1), num(r.Q2), num(r.Q3)})},
              {"Q2_bound", num(r.Q2_bound)},
              {"Q3_bound", num(r.Q3_bound)},
              {"checks", checks},
              {"all_ok", r.all_ok},
              {"w", json{{"type", "pl"}, {"nodes", nodes_json(r.w.times(), r.w.values())}}}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string to_json(const Trajectory& y) { return dump(trajectory_json(y)); }
std::string to_json(const EnergyResult& r) { return dump(energy_json(r)); }
std::string to_json(const GapCertificate& c) { return dump(certificate_json(c)); }
std::string to_json(const Verdict& v) { return dump(verdict_json(v)); }
std::string to_json(const RepairReport& r) { return dump(report_json(r)); }

std::string to_json(const DivergenceReport& r) {
  return dump(json{{"consistent", r.consistent},
                   {"message", r.message},
                   {"energy", energy_json(r.energy)},
                   {"certificate", certificate_json(r.certificate)}});
}

std::string to_json(const std::vector<RepairReport>& reports) {
  json arr = json::array();
  for (const RepairReport& r : reports) arr.push_back(report_json(r));
  return dump(json{{"reports", arr}});
}

std::string to_csv(const EnergyResult& r) {
  return "value,status,lower_bound,segments_evaluated\n" + format_number(r.value.to_double()) +
         "," + to_string(r.status) + "," + format_number(r.lower_bound) + "," +
         std::to_string(r.segments_evaluated) + "\n";
}

std::string to_csv(const GapCertificate& c) {
  std::string out = "k,c_k,bound\n";
  for (std::size_t k = 0; k < c.bounds.size(); ++k) {
    out += std::to_string(k + 1) + "," + format_number(c.c_sequence[k]) + "," +
           format_number(c.bounds[k]) + "\n";
  }
  return out;
}

std::string to_csv(const std::vector<RepairReport>& reports) {
  std::string out = "M,bad_measure,T,m,dist_W1p,F_y,F_w,Q2,Q3\n";
  for (const RepairReport& r : reports) {
    out += format_number(r.threshold) + "," + format_number(r.bad_measure) + "," +
           format_number(r.T) + "," + std::to_string(r.m) + "," +
           format_number(r.sobolev_distance) + "," +
           format_number(r.energy_y.value.to_double()) + "," +
           format_number(r.energy_w.value.to_double()) + "," + format_number(r.Q2) + "," +
           format_number(r.Q3) + "\n";
  }
  return out;
}

std::string to_csv(const Verdict& v) {
  std::string out = "status,kind,y,v,value,sup_estimate,samples\n";
  out += to_string(v.status);
  if (v.witness) {
    out += std::string(",") + to_string(v.witness->kind) + "," + format_number(v.witness->y) + "," +
           format_number(v.witness->v) + "," + format_number(v.witness->value);
  } else {
    out += ",,,,";
  }
  out += "," + (v.sup_infinite ? std::string("inf") : format_number(v.sup_estimate)) + "," +
         std::to_string(v.resolution.samples) + "\n";
  return out;
}

std::string to_svg(const GapCertificate& c) {
  constexpr double W = 640, H = 400, margin = 50;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < c.bounds.size(); ++k) {
    if (c.bounds[k] > 0.0 && std::isfinite(c.bounds[k]))
      pts.emplace_back(static_cast<double>(k + 1), std::log10(c.bounds[k]));
  }
  double ymin = 0.0, ymax = 1.0;
  if (!pts.empty()) {
    ymin = std::floor(std::min_element(pts.begin(), pts.end(),
                                       [](auto& a, auto& b) { return a.second < b.second; })
                          ->second);
    ymax = std::ceil(std::max_element(pts.begin(), pts.end(),
                                      [](auto& a, auto& b) { return a.second < b.second; })
                         ->second);
    if (ymax <= ymin) ymax = ymin + 1.0;
  }
  const double kmax = std::max<double>(2.0, static_cast<double>(c.bounds.size()));
  auto px = [&](double k) { return margin + (k - 1.0) / (kmax - 1.0) * (W - 2 * margin); };
  auto py = [&](double l) { return H - margin - (l - ymin) / (ymax - ymin) * (H - 2 * margin); };
  char buf[160];
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"black\"/>\n", margin,
                H - margin, W - margin, H - margin);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"black\"/>\n", margin,
                margin, margin, H - margin);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"%.0f\" font-size=\"12\">k</text>\n", W / 2, H - 15);
  out += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"5\" y=\"%.0f\" font-size=\"12\">log10 bound [%.0f, %.0f]</text>\n",
                margin - 15, ymin, ymax);
  out += buf;
  out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", i == 0 ? "" : " ", px(pts[i].first),
                  py(pts[i].second));
    out += buf;
  }
  out += "\"/>\n</svg>\n";
  return out;
}

}  // namespace varigap::io
