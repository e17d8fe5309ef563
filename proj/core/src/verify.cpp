#include "birgn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "birgn/errors.hpp"
#include "birgn/field_csv.hpp"
#include "birgn/irgn.hpp"
#include "birgn/noise.hpp"
#include "birgn/presets.hpp"
#include "birgn/synthetic.hpp"

namespace birgn {

namespace {

Field random_field(const GridPtr& grid, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Field f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
  return f;
}

Field unit(const GridPtr& grid, std::size_t k) {
  Field e(grid);
  e[k] = 1.0;
  return e;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << v;
  return ss.str();
}

Eigen::MatrixXd fd_jacobian(const ForwardOperator& op, const Field& x, double step) {
  const auto np = x.size();
  const auto no = op.observation_grid()->node_count();
  Eigen::MatrixXd j(static_cast<Eigen::Index>(no), static_cast<Eigen::Index>(np));
  for (std::size_t k = 0; k < np; ++k) {
    Field plus = x, minus = x;
    plus[k] += step;
    minus[k] -= step;
    j.col(static_cast<Eigen::Index>(k)) = (op.apply(plus).values() - op.apply(minus).values()) / (2.0 * step);
  }
  return j;
}

class PerturbedLinearization final : public Linearization {
 public:
  PerturbedLinearization(std::unique_ptr<Linearization> inner, double scale)
      : Linearization(inner->base(), inner->state()), inner_(std::move(inner)), scale_(scale) {}
  Field tangent(const Field& h) const override { return inner_->tangent(h); }
  Field adjoint(const Field& w) const override {
    Field out = inner_->adjoint(w);
    if (same_grid(out.grid(), w.grid())) out.axpy(scale_, w);
    return out;
  }

 private:
  std::unique_ptr<Linearization> inner_;
  double scale_;
};

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void SuiteReport::print(std::ostream& out) const {
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << suite << ": " << c.name << "  value=" << fmt(c.value);
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
}

std::unique_ptr<Linearization> PerturbedAdjointOperator::linearize(const Field& x) const {
  return std::make_unique<PerturbedLinearization>(inner_->linearize(x), scale_);
}

CheckResult adjoint_dot_test(const ForwardOperator& op, const Field& x, int pairs, std::uint64_t seed,
                             double threshold) {
  std::mt19937_64 rng(seed);
  const auto lin = op.linearize(x);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Field h = random_field(op.parameter_grid(), rng);
    const Field w = random_field(op.observation_grid(), rng);
    const Field th = lin->tangent(h);
    const double lhs = inner(th, w);
    const double rhs = inner(h, lin->adjoint(w));
    const double scale = l2_norm(th) * l2_norm(w);
    const double mismatch = scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
    worst = std::max(worst, mismatch);
  }
  return {"adjoint dot-product (" + std::to_string(pairs) + " pairs)", worst < threshold, worst,
          "threshold " + fmt(threshold)};
}

CheckResult taylor_test(const ForwardOperator& op, const Field& x, std::uint64_t seed, double slope_min,
                        double slope_max) {
  std::mt19937_64 rng(seed);
  const Field h = random_field(op.parameter_grid(), rng);
  const auto lin = op.linearize(x);
  const Field th = lin->tangent(h);
  std::vector<double> steps{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> remainders;
  std::ostringstream detail;
  detail << "remainders";
  for (double s : steps) {
    Field xs = x;
    xs.axpy(s, h);
    Field rem = op.apply(xs) - lin->state();
    rem.axpy(-s, th);
    remainders.push_back(l2_norm(rem));
    detail << ' ' << fmt(remainders.back());
  }
  const double slope = loglog_slope(steps, remainders);
  detail << "; band [" << slope_min << ", " << slope_max << "]";
  return {"Taylor remainder slope", slope >= slope_min && slope <= slope_max, slope, detail.str()};
}

CheckResult jacobian_test(const ForwardOperator& op, const Field& x, double tol, double step) {
  const Eigen::MatrixXd j = fd_jacobian(op, x, step);
  const auto lin = op.linearize(x);
  const double scale = std::max(j.cwiseAbs().maxCoeff(), 1e-300);
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Field col = lin->tangent(unit(op.parameter_grid(), k));
    worst = std::max(worst, (col.values() - j.col(static_cast<Eigen::Index>(k))).cwiseAbs().maxCoeff());
  }
  const double rel = worst / scale;
  return {"tangent vs finite-difference Jacobian", rel < tol, rel, "tolerance " + fmt(tol)};
}

CheckResult transpose_test(const ForwardOperator& op, const Field& x, double tol, double step) {
  const Eigen::MatrixXd j = fd_jacobian(op, x, step);
  const auto& wp = op.parameter_grid()->weights();
  const auto& wo = op.observation_grid()->weights();
  Eigen::MatrixXd expected = j.transpose();
  for (Eigen::Index r = 0; r < expected.rows(); ++r) {
    for (Eigen::Index c = 0; c < expected.cols(); ++c) {
      expected(r, c) *= wo[static_cast<std::size_t>(c)] / wp[static_cast<std::size_t>(r)];
    }
  }
  const auto lin = op.linearize(x);
  const double scale = std::max(expected.cwiseAbs().maxCoeff(), 1e-300);
  double worst = 0.0;
  for (std::size_t k = 0; k < op.observation_grid()->node_count(); ++k) {
    const Field col = lin->adjoint(unit(op.observation_grid(), k));
    worst = std::max(worst, (col.values() - expected.col(static_cast<Eigen::Index>(k))).cwiseAbs().maxCoeff());
  }
  const double rel = worst / scale;
  return {"adjoint vs weighted transpose of Jacobian", rel < tol, rel, "tolerance " + fmt(tol)};
}

SuiteReport derivative_suite(const ForwardOperator& op, const Field& x, const ForwardOperator& reduced_op,
                             const Field& reduced_x, std::string label) {
  SuiteReport report{"derivatives/" + label, {}};
  auto guarded = [&](auto&& check) {
    try {
      report.checks.push_back(check());
    } catch (const std::exception& e) {
      report.checks.push_back({"exception", false, 0.0, e.what()});
    }
  };
  guarded([&] { return adjoint_dot_test(op, x); });
  guarded([&] { return taylor_test(op, x); });
  guarded([&] { return jacobian_test(reduced_op, reduced_x); });
  guarded([&] { return transpose_test(reduced_op, reduced_x); });
  return report;
}

SuiteReport derivative_suite(std::string_view preset, DerivativeBase base) {
  const Problem full = make_preset(preset);
  const Problem reduced = make_preset(preset, 10);
  Field x = full.truth;
  Field xr = reduced.truth;
  std::string label(preset);
  if (base == DerivativeBase::Zero) {
    x = Field(full.truth.grid(), 0.0);
    xr = Field(reduced.truth.grid(), 0.0);
    if (full.op->lower_bound() > 0.0) {
      throw std::invalid_argument(label + ": the zero parameter is outside the domain");
    }
    label += "@zero";
  }
  return derivative_suite(*full.op, x, *reduced.op, xr, label);
}

PenaltyProbe make_probe(std::shared_ptr<const PenaltyFunctional> penalty, std::string name) {
  PenaltyProbe probe;
  probe.name = std::move(name);
  probe.grid = penalty->grid();
  probe.value = [penalty](const Field& x) { return penalty->value(x); };
  probe.riesz_gradient = [penalty](const Field& x) { return penalty->riesz_gradient(x); };
  switch (penalty->kind()) {
    case PenaltyKind::SquaredL2:
      probe.convexity_modulus = 1.0;
      probe.squared_norm = true;
      break;
    case PenaltyKind::ElasticNetSmoothed:
    case PenaltyKind::TVSmoothed:
      if (penalty->lambda() > 0.0) probe.convexity_modulus = std::min(1.0, penalty->lambda());
      break;
    case PenaltyKind::SobolevWp:
      break;
  }
  return probe;
}

SuiteReport penalty_suite(const std::vector<PenaltyProbe>& probes, int seeds) {
  SuiteReport report{"penalties", {}};
  for (const auto& pr : probes) {
    double convexity = -1e300, nonneg = 1e300, three_point = 0.0, grad_err = 0.0;
    double modulus_gap = 1e300, identity = 0.0;
    for (int s = 0; s < seeds; ++s) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(1000 + s));
      const Field x = random_field(pr.grid, rng);
      const Field z = random_field(pr.grid, rng);
      const Field x1 = random_field(pr.grid, rng);
      const Field h = random_field(pr.grid, rng);
      const double t = std::uniform_real_distribution<double>(0.05, 0.95)(rng);

      Field mid = t * x;
      mid.axpy(1.0 - t, z);
      convexity = std::max(convexity, pr.value(mid) - (t * pr.value(x) + (1.0 - t) * pr.value(z)));

      const Field xi = pr.riesz_gradient(x);
      const Field xi1 = pr.riesz_gradient(x1);
      auto breg = [&](const Field& a, const Field& b, const Field& g) {
        return pr.value(a) - pr.value(b) - inner(g, a - b);
      };
      const double d_zx = breg(z, x, xi);
      nonneg = std::min(nonneg, d_zx);

      // D(x2,x) - D(x1,x) = D_{xi1}(x2,x1) + <xi1 - xi, x2 - x1> with x2 = z
      const double lhs = breg(z, x, xi) - breg(x1, x, xi);
      const double rhs = breg(z, x1, xi1) + inner(xi1 - xi, z - x1);
      three_point = std::max(three_point, std::abs(lhs - rhs));

      const double eta = 1e-6;
      Field xp = x, xm = x;
      xp.axpy(eta, h);
      xm.axpy(-eta, h);
      const double fd = (pr.value(xp) - pr.value(xm)) / (2.0 * eta);
      const double an = inner(xi, h);
      grad_err = std::max(grad_err, std::abs(fd - an) / std::max(std::abs(an), 1e-12));

      const double dist2 = std::pow(l2_norm(z - x), 2);
      if (pr.convexity_modulus) modulus_gap = std::min(modulus_gap, d_zx - *pr.convexity_modulus * dist2);
      if (pr.squared_norm) identity = std::max(identity, std::abs(d_zx - dist2));
    }
    report.checks.push_back({pr.name + ": midpoint convexity", convexity <= 1e-10, convexity, "max excess"});
    report.checks.push_back({pr.name + ": Bregman nonnegativity", nonneg >= -1e-10, nonneg, "min distance"});
    report.checks.push_back({pr.name + ": three-point identity", three_point <= 1e-10, three_point, "max defect"});
    report.checks.push_back({pr.name + ": gradient vs central difference", grad_err < 1e-6, grad_err,
                             "max relative error"});
    if (pr.convexity_modulus) {
      report.checks.push_back({pr.name + ": 2-convexity witness", modulus_gap >= -1e-10, modulus_gap,
                               "min of D - c||z-x||^2"});
    }
    if (pr.squared_norm) {
      report.checks.push_back({pr.name + ": Bregman equals squared distance", identity <= 1e-12, identity,
                               "max defect"});
    }
  }
  return report;
}

SuiteReport penalty_suite(int seeds) {
  std::vector<PenaltyProbe> probes;
  for (const auto& grid : {Grid::unit_interval(20), Grid::unit_square(6)}) {
    const std::string tag = grid->dimension() == 1 ? "1d" : "2d";
    std::mt19937_64 rng(77);
    const Field anchor = random_field(grid, rng, 0.5, 1.5);
    using Opt = PenaltyFunctional::Options;
    const std::vector<std::pair<std::string, PenaltyFunctional>> kinds{
        {"l2", PenaltyFunctional(Opt{PenaltyKind::SquaredL2, 0.0, 1e-6, 2.0}, Field(grid))},
        {"elasticnet", PenaltyFunctional(Opt{PenaltyKind::ElasticNetSmoothed, 0.01, 1e-6, 2.0}, Field(grid))},
        {"tv", PenaltyFunctional(Opt{PenaltyKind::TVSmoothed, 0.01, 1e-6, 2.0}, Field(grid))},
        {"sobolev-p1.5", PenaltyFunctional(Opt{PenaltyKind::SobolevWp, 0.0, 1e-6, 1.5}, anchor)},
        {"sobolev-p2", PenaltyFunctional(Opt{PenaltyKind::SobolevWp, 0.0, 1e-6, 2.0}, anchor)},
    };
    for (const auto& [name, pen] : kinds) {
      probes.push_back(make_probe(std::make_shared<PenaltyFunctional>(pen), name + "/" + tag));
    }
  }
  return penalty_suite(probes, seeds);
}

std::vector<double> RateTestSpec::default_deltas() {
  std::vector<double> d;
  for (int k = 0; k < 7; ++k) d.push_back(std::pow(10.0, -2.0 - 0.5 * k));
  return d;
}

void RateTestSpec::validate() const {
  if (!(nu > 0.0 && nu <= 1.0)) throw std::invalid_argument("rate test: nu must lie in (0,1]");
  if (rule != 2 && rule != 3) throw std::invalid_argument("rate test: rates hold for rules 2 and 3");
  if (deltas.empty()) throw std::invalid_argument("rate test: no deltas");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] > 0.0)) throw std::invalid_argument("rate test: deltas must be positive");
    if (k > 0 && !(deltas[k] < deltas[k - 1])) throw std::invalid_argument("rate test: deltas must decrease");
  }
  if (seeds < 1 || nodes < 3) throw std::invalid_argument("rate test: need seeds >= 1 and nodes >= 3");
}

double predicted_rate(double nu, double p) { return nu / (p - 1.0 + nu); }

std::pair<double, double> rate_band(double nu) {
  if (std::abs(nu - 1.0) < 1e-12) return {0.4, 0.6};
  if (std::abs(nu - 0.5) < 1e-12) return {0.23, 0.43};
  const double c = predicted_rate(nu);
  return {c - 0.1, c + 0.1};
}

RateReport rate_test(const RateTestSpec& spec) {
  spec.validate();
  const auto op = DiagonalLinearOperator::log_spaced(spec.nodes, spec.decades);
  const auto& grid = op.parameter_grid();
  Field truth(grid);
  for (std::size_t k = 0; k < truth.size(); ++k) truth[k] = std::pow(op.singular_values()[k], spec.nu);
  const Field exact = op.apply(truth);
  const PenaltyFunctional penalty(PenaltyFunctional::Options{PenaltyKind::SquaredL2, 0.0, 1e-6, 2.0},
                                  Field(grid));
  const RegSchedule schedule(1.0, 0.5);
  const StoppingConfig stop{spec.rule, spec.tau, spec.max_outer};

  RateReport report;
  report.predicted = predicted_rate(spec.nu, spec.p);
  report.deltas = spec.deltas;
  for (double delta : spec.deltas) {
    std::vector<double> errors;
    for (int s = 1; s <= spec.seeds; ++s) {
      RateSample sample{delta, s, std::nullopt, 0.0, false};
      try {
        const Field y = add_noise(exact, delta, static_cast<std::uint64_t>(s));
        const RunResult res = run(op, penalty, y, delta, schedule, stop, truth);
        sample.n_delta = res.stop_index;
        sample.error = l2_norm(res.final_iterate - truth);
        sample.ok = res.stop_reason == StopReason::RuleSatisfied;
      } catch (const std::exception&) {
        sample.ok = false;
      }
      if (sample.ok) {
        errors.push_back(sample.error);
      } else {
        report.complete = false;
      }
      report.samples.push_back(sample);
    }
    report.median_errors.push_back(median(errors));
  }
  report.slope = loglog_slope(report.deltas, report.median_errors);
  return report;
}

void write_rates_csv(std::ostream& out, const RateReport& report) {
  out << "delta,seed,n_delta,error\n";
  for (const auto& s : report.samples) {
    out << format_double(s.delta) << ',' << s.seed << ',';
    if (s.n_delta) out << *s.n_delta;
    out << ',' << format_double(s.error) << '\n';
  }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace birgn
