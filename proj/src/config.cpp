#include "cubfuzz/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cubfuzz {

using nlohmann::json;

RatingScale resolve_scale(const ScaleSpec& spec) {
  const int lb = spec.lb == 0 ? 1 : spec.lb;
  const int ub = spec.ub == 0 ? spec.m : spec.ub;
  int ip = spec.ip;
  if (ip == 0) {
    if (spec.m % 2 == 0)
      throw std::invalid_argument(
          "no default indifference point for an even-length scale; supply ip explicitly");
    ip = (spec.m + 1) / 2;
  }
  return RatingScale(spec.m, ip, lb, ub, spec.orientation);
}

const char* to_string(FuzzySystem s) {
  switch (s) {
    case FuzzySystem::cub_fuzzy: return "cub_fuzzy";
    case FuzzySystem::spline: return "spline";
    case FuzzySystem::empirical: return "empirical";
  }
  return "?";
}

const char* to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::uncertainty: return "uncertainty";
    case WeightScheme::membership: return "membership";
    case WeightScheme::uniform: return "uniform";
    case WeightScheme::custom: return "custom";
  }
  return "?";
}

const char* to_string(ShelterMode s) {
  switch (s) {
    case ShelterMode::none: return "none";
    case ShelterMode::fixed: return "fixed";
    case ShelterMode::automatic: return "auto";
  }
  return "?";
}

FuzzySystem fuzzy_system_from_string(const std::string& name) {
  if (name == "cub_fuzzy") return FuzzySystem::cub_fuzzy;
  if (name == "spline") return FuzzySystem::spline;
  if (name == "empirical") return FuzzySystem::empirical;
  throw std::invalid_argument("unknown fuzzy system '" + name +
                              "' (expected cub_fuzzy, spline or empirical)");
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : obj.items())
    if (!known.count(item.key()))
      throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
}

}  // namespace

AnalysisConfig load_config(const std::string& path, AnalysisConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config " + path + ": not a JSON object");

  AnalysisConfig cfg = std::move(base);
  reject_unknown_keys(doc, {"scale", "systems", "spline", "shelter", "alpha", "weights",
                            "seed", "em", "simulate"},
                      "config");

  if (doc.contains("scale")) {
    const json& s = doc["scale"];
    reject_unknown_keys(s, {"m", "ip", "lb", "ub", "orientation"}, "scale");
    if (s.contains("m")) cfg.scale.m = s["m"].get<int>();
    if (s.contains("ip")) cfg.scale.ip = s["ip"].get<int>();
    if (s.contains("lb")) cfg.scale.lb = s["lb"].get<int>();
    if (s.contains("ub")) cfg.scale.ub = s["ub"].get<int>();
    if (s.contains("orientation")) {
      const std::string o = s["orientation"].get<std::string>();
      if (o == "positive") cfg.scale.orientation = Orientation::positive;
      else if (o == "negative") cfg.scale.orientation = Orientation::negative;
      else throw std::invalid_argument("orientation must be positive or negative, got '" + o + "'");
    }
  }

  if (doc.contains("systems")) {
    cfg.systems.clear();
    for (const json& name : doc["systems"])
      cfg.systems.push_back(fuzzy_system_from_string(name.get<std::string>()));
    if (cfg.systems.empty()) throw std::invalid_argument("systems list is empty");
  }

  if (doc.contains("spline")) {
    const json& s = doc["spline"];
    reject_unknown_keys(s, {"epsilon", "theta", "eta", "a", "b"}, "spline");
    if (s.contains("epsilon")) cfg.spline.epsilon = s["epsilon"].get<double>();
    if (s.contains("theta")) cfg.spline.theta = s["theta"].get<double>();
    if (s.contains("eta")) cfg.spline.eta = s["eta"].get<double>();
    if (s.contains("a")) cfg.spline.a = s["a"].get<int>();
    if (s.contains("b")) cfg.spline.b = s["b"].get<int>();
  }

  if (doc.contains("shelter")) {
    const json& s = doc["shelter"];
    if (s.is_number_integer()) {
      cfg.shelter = ShelterMode::fixed;
      cfg.shelter_c = s.get<int>();
    } else {
      const std::string mode = s.get<std::string>();
      if (mode == "none") cfg.shelter = ShelterMode::none;
      else if (mode == "auto") cfg.shelter = ShelterMode::automatic;
      else throw std::invalid_argument("shelter must be none, auto or a category number, got '" +
                                       mode + "'");
    }
  }

  if (doc.contains("alpha")) {
    cfg.alpha = doc["alpha"].get<double>();
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
      throw std::invalid_argument("alpha must lie in (0,1)");
  }

  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    if (w.is_object()) {
      reject_unknown_keys(w, {"custom"}, "weights");
      cfg.weights = WeightScheme::custom;
      cfg.weights_path = w["custom"].get<std::string>();
    } else {
      const std::string scheme = w.get<std::string>();
      if (scheme == "uncertainty") cfg.weights = WeightScheme::uncertainty;
      else if (scheme == "membership") cfg.weights = WeightScheme::membership;
      else if (scheme == "uniform") cfg.weights = WeightScheme::uniform;
      else throw std::invalid_argument(
          "weights must be uncertainty, membership, uniform or {\"custom\": path}, got '" +
          scheme + "'");
    }
  }

  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();

  if (doc.contains("em")) {
    const json& e = doc["em"];
    reject_unknown_keys(e, {"max_iter", "tol"}, "em");
    if (e.contains("max_iter")) {
      cfg.em.max_iter = e["max_iter"].get<int>();
      if (cfg.em.max_iter < 1) throw std::invalid_argument("em.max_iter must be >= 1");
    }
    if (e.contains("tol")) {
      cfg.em.tol = e["tol"].get<double>();
      if (!(cfg.em.tol > 0.0)) throw std::invalid_argument("em.tol must be positive");
    }
  }

  if (doc.contains("simulate")) {
    const json& s = doc["simulate"];
    reject_unknown_keys(s, {"pi", "xi", "delta", "c", "n"}, "simulate");
    auto read_list = [](const json& v) {
      std::vector<double> out;
      if (v.is_array())
        for (const json& x : v) out.push_back(x.get<double>());
      else
        out.push_back(v.get<double>());
      if (out.empty()) throw std::invalid_argument("empty parameter list in simulate");
      return out;
    };
    if (s.contains("pi")) cfg.simulate.pi = read_list(s["pi"]);
    if (s.contains("xi")) cfg.simulate.xi = read_list(s["xi"]);
    if (s.contains("delta")) cfg.simulate.delta = s["delta"].get<double>();
    if (s.contains("c")) cfg.simulate.c = s["c"].get<int>();
    if (s.contains("n")) {
      cfg.simulate.n = s["n"].get<long>();
      if (cfg.simulate.n < 1) throw std::invalid_argument("simulate.n must be >= 1");
    }
  }

  return cfg;
}

std::vector<double> load_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight file " + path);
  std::vector<double> w;
  std::string token;
  std::stringstream whole;
  whole << in.rdbuf();
  std::string text = whole.str();
  for (char& ch : text)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
  std::stringstream ss(text);
  while (ss >> token) {
    try {
      size_t pos = 0;
      const double v = std::stod(token, &pos);
      if (pos != token.size()) throw std::invalid_argument(token);
      w.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": '" + token + "' is not a number");
    }
  }
  if (w.empty()) throw std::runtime_error(path + ": no weights found");
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw std::runtime_error(path + ": negative weight " + std::to_string(v));
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::runtime_error(path + ": weights sum to " + std::to_string(sum) + ", expected 1");
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace cubfuzz
