#include "risfd/fris.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "risfd/baselines.hpp"
#include "risfd/transforms.hpp"

namespace risfd {
namespace {

constexpr std::uint64_t kInitPhaseStream = 0x7e7a;

double ul_interference(const ChannelSet& ch, const RisPhase& theta, const Beamformer& w,
                       const PowerConfig& power) {
  return ul_terms(effective_channels(ch, theta), w, power).interference;
}

}  // namespace

void FrisConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("FrisConfig: rho must be positive");
  if (max_outer < 1) throw std::invalid_argument("FrisConfig: max_outer must be >= 1");
  if (!(bs.rho_w > 0.0) || bs.max_iter < 1)
    throw std::invalid_argument("FrisConfig: need rho_w > 0 and T_w >= 1");
  ris.validate();
  if (t_th_u && !(*t_th_u > 0.0)) throw std::invalid_argument("FrisConfig: t_th_U must be positive");
  if (!std::isfinite(gamma_u_db)) throw std::invalid_argument("FrisConfig: gamma_U must be finite");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("FrisConfig: beta must lie in [0, 1]");
  if (!(init_margin > 0.0 && init_margin <= 1.0))
    throw std::invalid_argument("FrisConfig: init_margin must lie in (0, 1]");
  if (!(collapse_drop > 0.0)) throw std::invalid_argument("FrisConfig: collapse_drop must be positive");
}

double FrisConfig::t_bar() const {
  return t_th_u ? threshold_from_rate(*t_th_u) : threshold_from_db(gamma_u_db);
}

std::string_view fris_status_name(FrisStatus s) {
  switch (s) {
    case FrisStatus::Converged: return "converged";
    case FrisStatus::MaxIter: return "max_iter";
    case FrisStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

PowerConfig noise_normalized(const PowerConfig& power) {
  PowerConfig p = power;
  p.p_d = power.p_d / power.sigma2;
  p.p_u = power.p_u / power.sigma2;
  p.sigma2 = 1.0;
  p.sigma2_u = power.sigma2_u / power.sigma2;
  return p;
}

FeasibilityCheck check_feasibility(const Beamformer& w, const RisPhase& theta,
                                   const ChannelSet& ch, const PowerConfig& power,
                                   double t_bar) {
  FeasibilityCheck f;
  f.power_ok = w.power() <= power.p_max * (1.0 + 1e-8);
  f.modulus_ok = true;
  for (const cplx z : theta.unit())
    if (!(std::abs(std::abs(z) - 1.0) <= 1e-12)) f.modulus_ok = false;
  f.qos_ok = ch.U.cols() == 0 || t_bar <= 0.0 ||
             ul_aggregate_sinr(w, theta, ch, power) >= t_bar * (1.0 - 1e-6);
  return f;
}

FrisInit initialize(const ChannelSet& ch, const PowerConfig& power, const FrisConfig& cfg,
                    std::uint64_t seed) {
  FrisInit init;
  const Sizes s = ch.sizes();
  std::mt19937_64 rng(derive_seed(seed, kInitPhaseStream));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  init.theta.beta = cfg.beta;
  for (std::size_t k = 0; k < s.k; ++k) init.theta.theta.push_back(phase(rng));
  init.w = mrt_beamformer(ch, init.theta, power);

  const double t_bar = cfg.t_bar();
  if (s.n == 0 || t_bar <= 0.0) {
    init.feasible = true;
    return init;
  }
  const EffectiveChannels eff = effective_channels(ch, init.theta);
  const double f = eff.ul.frobenius_norm();
  const double xi = qos_budget(power.p_u * f * f, t_bar, power.sigma2_u);
  if (xi < 0.0) return init;
  // U_I is quadratic in a common beam scale, so the largest feasible scale is
  // available in closed form.
  const double ui = ul_interference(ch, init.theta, init.w, power);
  if (ui > xi) {
    const double scale = std::sqrt(xi / ui) * cfg.init_margin;
    init.w.W *= cplx(scale);
  }
  init.feasible = true;
  return init;
}

FrisResult run_fris(const ChannelSet& ch, const PowerConfig& power_in, const FrisConfig& cfg,
                    std::uint64_t seed) {
  cfg.validate();
  power_in.validate();
  ch.validate();
  const PowerConfig power = noise_normalized(power_in);
  const double t_bar = cfg.t_bar();
  // With beta = 0 the phases have no effect and the phase step is skipped.
  const bool has_ris = ch.sizes().k > 0 && cfg.optimize_phases && cfg.beta > 0.0;

  FrisResult res;
  const FrisInit init = initialize(ch, power, cfg, seed);
  res.w = init.w;
  res.theta = init.theta;
  res.rates = rates(res.w, res.theta, ch, power);
  res.initial_dl_sum = res.rates.dl_sum();
  if (!init.feasible || !check_feasibility(init.w, init.theta, ch, power, t_bar).all()) {
    res.status = FrisStatus::Infeasible;
    return res;
  }

  Beamformer w = init.w;
  RisPhase theta = init.theta;
  double prev_rate = res.initial_dl_sum;
  double best_rate = prev_rate;
  res.status = FrisStatus::MaxIter;

  for (int i = 1; i <= cfg.max_outer; ++i) {
    const auto terms = dl_terms(effective_channels(ch, theta), w, power);
    const RVector r = optimal_r(terms, power.sigma2);
    const RVector t = dinkelbach_t(terms, r, power.sigma2);

    OuterRecord rec;
    rec.iteration = i;
    const BsSubproblemData data = build_bs_data(theta, ch, r, t, power, t_bar, w);
    const BsResult bs = solve_bs(data, cfg.bs);
    rec.bs_iterations = bs.iterations;
    rec.bs_status = bs.status;
    Beamformer w_next = bs.status == StepStatus::Infeasible ? w : bs.w;

    RisPhase theta_next = theta;
    if (has_ris) {
      const ThetaQuadratics tq =
          build_theta_quadratics(w_next, ch, r, t, power, t_bar, theta.beta);
      const RisResult rr = solve_ris(tq, theta, cfg.ris);
      theta_next = rr.phase;
      rec.ris_iterations = rr.iterations;
      rec.ris_status = rr.status;
      rec.slack_sum = rr.slack_sum;
      rec.max_modulus_error = rr.max_modulus_error;
      rec.ris_fallback = rr.fallback;
    }

    const RateReport rep = rates(w_next, theta_next, ch, power);
    const auto next_terms = dl_terms(effective_channels(ch, theta_next), w_next, power);
    rec.dl_sum_rate = rep.dl_sum();
    rec.ul_rate = rep.ul_rate;
    rec.ul_sinr = rep.ul_sinr;
    rec.surrogate = dinkelbach_objective(next_terms, r, t, power.sigma2);
    rec.power = w_next.power();
    const FeasibilityCheck fc = check_feasibility(w_next, theta_next, ch, power, t_bar);
    rec.power_ok = fc.power_ok;
    rec.qos_ok = fc.qos_ok;
    rec.modulus_ok = fc.modulus_ok;
    rec.feasible = fc.all();

    if (rec.feasible && rec.dl_sum_rate > best_rate) {
      best_rate = rec.dl_sum_rate;
      res.w = w_next;
      res.theta = theta_next;
    }
    rec.best_so_far = best_rate;
    res.history.push_back(rec);

    if (!rec.feasible) break;  // keep the best feasible iterate
    if (rec.dl_sum_rate < (1.0 - cfg.collapse_drop) * prev_rate) {
      res.collapse = true;
      break;
    }
    if (std::abs(rec.dl_sum_rate - prev_rate) <= cfg.rho) {
      res.status = FrisStatus::Converged;
      break;
    }
    prev_rate = rec.dl_sum_rate;
    w = w_next;
    theta = theta_next;
  }
  res.rates = rates(res.w, res.theta, ch, power);
  return res;
}

std::string FrisResult::to_json() const {
  using nlohmann::json;
  json j;
  j["status"] = fris_status_name(status);
  j["collapse"] = collapse;
  j["initial_dl_sum_rate"] = initial_dl_sum;
  j["dl_sum_rate"] = rates.dl_sum();
  j["dl_rates"] = rates.dl_rate;
  j["dl_sinr"] = rates.dl_sinr;
  j["ul_aggregate_rate"] = rates.ul_rate;
  j["ul_aggregate_sinr"] = rates.ul_sinr;
  j["ul_ue_rates"] = rates.ul_ue_rate;
  j["beta"] = theta.beta;
  j["theta"] = theta.theta;
  json w = json::array();
  for (std::size_t m = 0; m < this->w.users(); ++m) {
    json col = json::array();
    for (const cplx z : this->w.beam(m)) col.push_back({z.real(), z.imag()});
    w.push_back(std::move(col));
  }
  j["beams"] = std::move(w);
  json hist = json::array();
  for (const auto& h : history) {
    hist.push_back({{"iteration", h.iteration},
                    {"dl_sum_rate", h.dl_sum_rate},
                    {"ul_rate", h.ul_rate},
                    {"ul_sinr", h.ul_sinr},
                    {"surrogate", h.surrogate},
                    {"power", h.power},
                    {"power_ok", h.power_ok},
                    {"qos_ok", h.qos_ok},
                    {"modulus_ok", h.modulus_ok},
                    {"feasible", h.feasible},
                    {"best_so_far", h.best_so_far},
                    {"bs_iterations", h.bs_iterations},
                    {"bs_status", step_status_name(h.bs_status)},
                    {"ris_iterations", h.ris_iterations},
                    {"ris_status", step_status_name(h.ris_status)},
                    {"slack_sum", h.slack_sum},
                    {"max_modulus_error", h.max_modulus_error},
                    {"ris_fallback", h.ris_fallback}});
  }
  j["history"] = std::move(hist);
  return j.dump(2);
}

}  // namespace risfd
