#include "birgn/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "birgn/diffusion.hpp"
#include "birgn/errors.hpp"
#include "birgn/field_csv.hpp"
#include "birgn/noise.hpp"
#include "birgn/presets.hpp"
#include "birgn/reaction.hpp"

namespace birgn::cli {

using nlohmann::json;

json preset_defaults(const std::string& preset) {
  json doc = {
      {"problem", {{"preset", preset}, {"subdivisions", 0}}},
      {"penalty", {{"kind", "l2"}, {"lambda", 0.01}, {"epsilon", 1e-6}, {"p_exponent", 2.0}, {"anchor", nullptr}}},
      {"schedule", {{"alpha0", 1.0}, {"ratio", 0.5}}},
      {"stopping", {{"rule", 1}, {"tau", 1.05}, {"max_outer", 60}}},
      {"noise", {{"delta", 1e-4}, {"seed", 1}}},
      {"residual_exponent", 2.0},
      {"output", "birgn-out"},
  };
  const InnerControls inner;
  doc["inner"] = {{"max_iter", inner.max_iter},
                  {"grad_tol_rel", inner.grad_tol_rel},
                  {"restart_period", inner.restart_period},
                  {"armijo_c1", inner.armijo_c1},
                  {"backtrack", inner.backtrack},
                  {"initial_step", inner.initial_step},
                  {"precondition", inner.precondition},
                  {"precondition_shift", inner.precondition_shift}};
  if (preset == "diffusion1d-paper") doc["penalty"]["kind"] = "sobolev";
  return doc;
}

json unwrap_config(const json& doc) {
  if (doc.is_object() && doc.contains("config")) return doc.at("config");
  return doc;
}

json resolve_config(const json& file_doc, const json& flag_doc) {
  auto pick_preset = [](const json& d) -> std::optional<std::string> {
    if (d.is_object() && d.contains("problem") && d["problem"].is_object() && d["problem"].contains("preset") &&
        d["problem"]["preset"].is_string()) {
      return d["problem"]["preset"].get<std::string>();
    }
    return std::nullopt;
  };
  auto has_custom = [](const json& d) {
    return d.is_object() && d.contains("problem") && d["problem"].is_object() && d["problem"].contains("custom") &&
           !d["problem"]["custom"].is_null();
  };
  std::string preset = pick_preset(flag_doc).value_or(pick_preset(file_doc).value_or(""));
  json merged = preset_defaults(has_custom(flag_doc) || has_custom(file_doc) ? "" : preset);
  if (file_doc.is_object()) merged.merge_patch(file_doc);
  if (flag_doc.is_object()) merged.merge_patch(flag_doc);
  // A preset named on the command line replaces a custom problem from the file.
  if (pick_preset(flag_doc) && !has_custom(flag_doc) && merged["problem"].contains("custom")) {
    merged["problem"].erase("custom");
  }
  return merged;
}

namespace {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& violations) : violations_(violations) {}

  template <typename T>
  void get(const json& obj, const std::string& path, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_null()) return;
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("not a number");
        out = v.get<double>();
      } else if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw std::invalid_argument("not an integer");
        out = v.get<int>();
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
          throw std::invalid_argument("not a nonnegative integer");
        }
        out = v.get<std::uint64_t>();
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("not a boolean");
        out = v.get<bool>();
      } else {
        if (!v.is_string()) throw std::invalid_argument("not a string");
        out = v.get<std::string>();
      }
    } catch (const std::exception& e) {
      violations_.push_back(path + key + ": " + e.what());
    }
  }

  const json* object(const json& parent, const std::string& path, const char* key,
                     std::set<std::string> allowed) {
    if (!parent.contains(key) || parent.at(key).is_null()) return nullptr;
    const json& v = parent.at(key);
    if (!v.is_object()) {
      violations_.push_back(path + key + ": expected an object");
      return nullptr;
    }
    check_keys(v, path + key + ".", allowed);
    return &v;
  }

  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
      if (!allowed.count(item.key())) violations_.push_back(path + item.key() + ": unknown key");
    }
  }

 private:
  std::vector<std::string>& violations_;
};

}  // namespace

RunConfig config_from_json(const json& doc_in, std::vector<std::string>& violations) {
  RunConfig c;
  const json doc = unwrap_config(doc_in);
  if (!doc.is_object()) {
    violations.push_back("config: expected a JSON object");
    return c;
  }
  Reader rd(violations);
  rd.check_keys(doc, "", {"problem", "penalty", "schedule", "stopping", "noise", "inner", "residual_exponent",
                          "output"});

  if (const json* p = rd.object(doc, "", "problem", {"preset", "subdivisions", "custom"})) {
    rd.get(*p, "problem.", "preset", c.preset);
    rd.get(*p, "problem.", "subdivisions", c.subdivisions);
    if (const json* cu = rd.object(*p, "problem.", "custom",
                                   {"operator", "source", "boundary", "truth", "data", "initial_guess",
                                    "lower_bound"})) {
      CustomProblem cp;
      const std::string pre = "problem.custom.";
      rd.get(*cu, pre, "operator", cp.op);
      if (cp.op == "diffusion1d") {
        cp.lower_bound = 0.1;
        cp.initial_guess = 1.0;
      }
      rd.get(*cu, pre, "source", cp.source);
      rd.get(*cu, pre, "boundary", cp.boundary);
      rd.get(*cu, pre, "truth", cp.truth);
      rd.get(*cu, pre, "data", cp.data);
      rd.get(*cu, pre, "initial_guess", cp.initial_guess);
      rd.get(*cu, pre, "lower_bound", cp.lower_bound);
      c.custom = cp;
      c.preset.clear();
    }
  }
  if (const json* p = rd.object(doc, "", "penalty", {"kind", "lambda", "epsilon", "p_exponent", "anchor"})) {
    std::string kind = std::string(to_string(c.penalty));
    rd.get(*p, "penalty.", "kind", kind);
    try {
      c.penalty = parse_penalty_kind(kind);
    } catch (const std::exception& e) {
      violations.push_back(std::string("penalty.kind: ") + e.what());
    }
    rd.get(*p, "penalty.", "lambda", c.lambda);
    rd.get(*p, "penalty.", "epsilon", c.epsilon);
    rd.get(*p, "penalty.", "p_exponent", c.p_exponent);
    if (p->contains("anchor") && !p->at("anchor").is_null()) {
      double a = 0.0;
      rd.get(*p, "penalty.", "anchor", a);
      c.anchor = a;
    }
  }
  if (const json* p = rd.object(doc, "", "schedule", {"alpha0", "ratio"})) {
    rd.get(*p, "schedule.", "alpha0", c.alpha0);
    rd.get(*p, "schedule.", "ratio", c.ratio);
  }
  if (const json* p = rd.object(doc, "", "stopping", {"rule", "tau", "max_outer"})) {
    rd.get(*p, "stopping.", "rule", c.rule);
    rd.get(*p, "stopping.", "tau", c.tau);
    rd.get(*p, "stopping.", "max_outer", c.max_outer);
  }
  if (const json* p = rd.object(doc, "", "noise", {"delta", "seed"})) {
    rd.get(*p, "noise.", "delta", c.delta);
    rd.get(*p, "noise.", "seed", c.seed);
  }
  if (const json* p = rd.object(doc, "", "inner",
                                {"max_iter", "grad_tol_rel", "restart_period", "armijo_c1", "backtrack",
                                 "initial_step", "precondition", "precondition_shift"})) {
    rd.get(*p, "inner.", "max_iter", c.inner.max_iter);
    rd.get(*p, "inner.", "grad_tol_rel", c.inner.grad_tol_rel);
    rd.get(*p, "inner.", "restart_period", c.inner.restart_period);
    rd.get(*p, "inner.", "armijo_c1", c.inner.armijo_c1);
    rd.get(*p, "inner.", "backtrack", c.inner.backtrack);
    rd.get(*p, "inner.", "initial_step", c.inner.initial_step);
    rd.get(*p, "inner.", "precondition", c.inner.precondition);
    rd.get(*p, "inner.", "precondition_shift", c.inner.precondition_shift);
  }
  rd.get(doc, "", "residual_exponent", c.residual_exponent);
  rd.get(doc, "", "output", c.output);
  return c;
}

json config_to_json(const RunConfig& c) {
  json problem = {{"preset", c.preset}, {"subdivisions", c.subdivisions}};
  if (c.custom) {
    const auto& cp = *c.custom;
    problem["preset"] = "";
    problem["custom"] = {{"operator", cp.op},         {"source", cp.source},
                         {"boundary", cp.boundary},   {"truth", cp.truth},
                         {"data", cp.data},           {"initial_guess", cp.initial_guess},
                         {"lower_bound", cp.lower_bound}};
  }
  json doc = {
      {"problem", problem},
      {"penalty",
       {{"kind", std::string(to_string(c.penalty))},
        {"lambda", c.lambda},
        {"epsilon", c.epsilon},
        {"p_exponent", c.p_exponent},
        {"anchor", c.anchor ? json(*c.anchor) : json(nullptr)}}},
      {"schedule", {{"alpha0", c.alpha0}, {"ratio", c.ratio}}},
      {"stopping", {{"rule", c.rule}, {"tau", c.tau}, {"max_outer", c.max_outer}}},
      {"noise", {{"delta", c.delta}, {"seed", c.seed}}},
      {"inner",
       {{"max_iter", c.inner.max_iter},
        {"grad_tol_rel", c.inner.grad_tol_rel},
        {"restart_period", c.inner.restart_period},
        {"armijo_c1", c.inner.armijo_c1},
        {"backtrack", c.inner.backtrack},
        {"initial_step", c.inner.initial_step},
        {"precondition", c.inner.precondition},
        {"precondition_shift", c.inner.precondition_shift}}},
      {"residual_exponent", c.residual_exponent},
      {"output", c.output},
  };
  return doc;
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> v;
  auto need = [&v](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  if (c.custom) {
    const auto& cp = *c.custom;
    need(cp.op == "reaction1d" || cp.op == "reaction2d" || cp.op == "diffusion1d",
         "problem.custom.operator: must be reaction1d, reaction2d or diffusion1d");
    for (const auto& [key, path] : {std::pair<const char*, const std::string&>{"source", cp.source},
                                    {"boundary", cp.boundary}}) {
      need(!path.empty(), std::string("problem.custom.") + key + ": a Field CSV path is required");
      if (!path.empty()) {
        need(std::filesystem::is_regular_file(path), std::string("problem.custom.") + key + ": no such file '" + path + "'");
      }
    }
    need(!cp.truth.empty() || !cp.data.empty(), "problem.custom: needs truth (to synthesize data) or data");
    for (const auto& [key, path] : {std::pair<const char*, const std::string&>{"truth", cp.truth}, {"data", cp.data}}) {
      if (!path.empty()) {
        need(std::filesystem::is_regular_file(path), std::string("problem.custom.") + key + ": no such file '" + path + "'");
      }
    }
    need(std::isfinite(cp.initial_guess), "problem.custom.initial_guess: must be finite");
    need(cp.op != "diffusion1d" || cp.lower_bound > 0.0, "problem.custom.lower_bound: must be positive for diffusion1d");
    need(cp.initial_guess >= cp.lower_bound, "problem.custom.initial_guess: below the domain lower bound");
  } else {
    const auto names = preset_names();
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    need(std::find(names.begin(), names.end(), c.preset) != names.end(),
         "problem.preset: '" + c.preset + "' is not one of " + list);
  }
  need(c.subdivisions >= 0, "problem.subdivisions: must be >= 0 (0 keeps the preset's grid)");
  need(c.lambda >= 0.0 && std::isfinite(c.lambda), "penalty.lambda: must be a nonnegative number");
  need(c.epsilon > 0.0 && std::isfinite(c.epsilon), "penalty.epsilon: must be positive");
  need(c.penalty != PenaltyKind::SobolevWp || (c.p_exponent > 1.0 && std::isfinite(c.p_exponent)),
       "penalty.p_exponent: must exceed 1");
  need(!c.anchor || std::isfinite(*c.anchor), "penalty.anchor: must be finite");
  need(c.alpha0 > 0.0 && std::isfinite(c.alpha0), "schedule.alpha0: must be positive");
  need(c.ratio > 0.0 && c.ratio < 1.0, "schedule.ratio: must lie in (0, 1)");
  need(c.rule >= 1 && c.rule <= 3, "stopping.rule: must be 1, 2 or 3");
  need(c.tau > 1.0 && std::isfinite(c.tau), "stopping.tau: must exceed 1");
  need(c.max_outer >= 0, "stopping.max_outer: must be >= 0");
  need(c.delta >= 0.0 && std::isfinite(c.delta), "noise.delta: must be a nonnegative number");
  need(c.residual_exponent >= 1.0 && std::isfinite(c.residual_exponent), "residual_exponent: must be >= 1");
  need(c.inner.max_iter >= 0, "inner.max_iter: must be >= 0");
  need(c.inner.grad_tol_rel > 0.0, "inner.grad_tol_rel: must be positive");
  need(c.inner.restart_period >= 1, "inner.restart_period: must be >= 1");
  need(c.inner.armijo_c1 > 0.0 && c.inner.armijo_c1 < 1.0, "inner.armijo_c1: must lie in (0, 1)");
  need(c.inner.backtrack > 0.0 && c.inner.backtrack < 1.0, "inner.backtrack: must lie in (0, 1)");
  need(c.inner.initial_step > 0.0, "inner.initial_step: must be positive");
  need(c.inner.precondition_shift >= 0.0, "inner.precondition_shift: must be >= 0");
  need(!c.output.empty(), "output: directory must not be empty");
  return v;
}

namespace {

Field boundary_as_field(const Field& g, const GridPtr& grid) {
  require_same_grid(g, Field(grid), "custom boundary data");
  return g;
}

}  // namespace

Experiment build_experiment(const RunConfig& c) {
  Experiment ex;
  if (!c.custom) {
    Problem p = make_preset(c.preset, c.subdivisions);
    ex.name = p.name;
    ex.op = p.op;
    ex.truth = p.truth;
    ex.initial_guess = p.initial_guess;
  } else {
    const auto& cp = *c.custom;
    ex.name = "custom-" + cp.op;
    const Field source = read_field_csv(cp.source);
    const Field g = boundary_as_field(read_field_csv(cp.boundary), source.grid());
    const auto& grid = *source.grid();
    if (cp.op == "reaction1d") {
      ex.op = std::make_shared<Reaction1D>(source, g[0], g[g.size() - 1], cp.lower_bound);
    } else if (cp.op == "reaction2d") {
      ex.op = std::make_shared<Reaction2D>(source, g, cp.lower_bound);
    } else if (cp.op == "diffusion1d") {
      ex.op = std::make_shared<Diffusion1D>(source, g[0], g[g.size() - 1], cp.lower_bound);
    } else {
      throw std::invalid_argument("unknown custom operator '" + cp.op + "'");
    }
    if (grid.dimension() != ex.op->parameter_grid()->dimension()) {
      throw GridMismatch("custom source grid does not match the operator's dimension");
    }
    if (!cp.truth.empty()) {
      Field t = read_field_csv(cp.truth);
      require_same_grid(t, source, "custom truth");
      ex.truth = std::move(t);
    }
    ex.initial_guess = Field(source.grid(), cp.initial_guess);
    if (!cp.data.empty()) {
      Field d = read_field_csv(cp.data);
      require_same_grid(d, Field(ex.op->observation_grid()), "custom data");
      ex.data = std::move(d);
      return ex;
    }
  }
  const Field exact = ex.op->apply(*ex.truth);
  ex.data = c.delta > 0.0 ? add_noise(exact, c.delta, c.seed) : exact;
  return ex;
}

PenaltyFunctional build_penalty(const RunConfig& c, const Experiment& ex) {
  Field anchor = c.anchor ? Field(ex.initial_guess.grid(), *c.anchor) : ex.initial_guess;
  PenaltyFunctional::Options opts{c.penalty, c.lambda, c.epsilon, c.p_exponent};
  return PenaltyFunctional(opts, std::move(anchor));
}

}  // namespace birgn::cli
