#include "pacbayes/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pacbayes/errors.hpp"

namespace pacbayes {

namespace {

void require_m_delta(int m, double delta, const char* who) {
  if (m < 2) throw std::invalid_argument(std::string(who) + ": m must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": delta must lie in (0,1)");
  }
}

BoundReport gap_report(double complexity, BoundInputs inputs) {
  BoundReport report;
  report.complexity = complexity;
  report.bound_value = complexity;
  report.inputs = std::move(inputs);
  return report;
}

}  // namespace

BoundReport klpb_classic(DivergenceValue kl, int m, double delta) {
  require_m_delta(m, delta, "klpb_classic");
  if (kl.kind != DivergenceKind::KL) {
    throw std::invalid_argument("klpb_classic: divergence must be a KL value");
  }
  const double complexity = std::sqrt((kl.value + std::log(m / delta)) / (2.0 * (m - 1)));
  BoundInputs inputs{m, delta, kl, std::nullopt, std::nullopt, {}};
  return gap_report(complexity, std::move(inputs));
}

BoundReport ipm_pb_template(double gamma, int m, double delta) {
  require_m_delta(m, delta, "ipm_pb_template");
  if (!(gamma >= 0.0)) throw std::invalid_argument("ipm_pb_template: gamma must be >= 0");
  const double complexity = std::sqrt((gamma + std::log(m / delta)) / (2.0 * (m - 1)));
  BoundInputs inputs{m, delta, std::nullopt, std::nullopt, std::nullopt, {{"gamma", gamma}}};
  return gap_report(complexity, std::move(inputs));
}

BoundReport tvpb_from_uc(double uc_half_delta, DivergenceValue tv, int m, double delta) {
  require_m_delta(m, delta, "tvpb_from_uc");
  if (tv.kind != DivergenceKind::TV) {
    throw std::invalid_argument("tvpb_from_uc: divergence must be a TV value");
  }
  if (!(uc_half_delta >= 0.0)) throw std::invalid_argument("tvpb_from_uc: uc must be >= 0");
  const double complexity = std::sqrt(uc_half_delta * uc_half_delta * tv.value +
                                      std::log(2.0 * m / delta) / (2.0 * (m - 1)));
  BoundInputs inputs{m, delta, tv, uc_half_delta, std::nullopt, {}};
  return gap_report(complexity, std::move(inputs));
}

BoundReport tvpb_vc(int vc_dim, double c, DivergenceValue tv, int m, double delta) {
  require_m_delta(m, delta, "tvpb_vc");
  if (tv.kind != DivergenceKind::TV) {
    throw std::invalid_argument("tvpb_vc: divergence must be a TV value");
  }
  if (vc_dim < 1) throw std::invalid_argument("tvpb_vc: vc_dim must be >= 1");
  if (!(c > 0.0)) {
    throw std::invalid_argument(
        "tvpb_vc: the universal constant c must be supplied and positive; no explicit "
        "value is known in the literature");
  }
  const double complexity =
      std::sqrt(c * (vc_dim + std::log(1.0 / delta)) / m * tv.value +
                std::log(m / delta) / (2.0 * (m - 1)));
  BoundInputs inputs{
      m, delta, tv, std::nullopt, std::nullopt,
      {{"vc_dim", static_cast<double>(vc_dim)}, {"c", c}}};
  return gap_report(complexity, std::move(inputs));
}

BoundReport wpb_template(double lipschitz_k, DivergenceValue w1, int m, double delta) {
  require_m_delta(m, delta, "wpb_template");
  if (!(lipschitz_k >= 0.0)) throw std::invalid_argument("wpb_template: K must be >= 0");
  const double complexity =
      std::sqrt(lipschitz_k * w1.value + std::log(2.0 * m / delta) / (2.0 * (m - 1)));
  BoundInputs inputs{m, delta, w1, std::nullopt, std::nullopt, {{"lipschitz_k", lipschitz_k}}};
  return gap_report(complexity, std::move(inputs));
}

BoundReport wpb_finite(int class_size, double loss_lipschitz, DivergenceValue w1, int m,
                       double delta) {
  require_m_delta(m, delta, "wpb_finite");
  if (class_size < 1) throw std::invalid_argument("wpb_finite: class size must be >= 1");
  if (!(loss_lipschitz > 0.0)) throw std::invalid_argument("wpb_finite: G must be > 0");
  const double k = 8.0 * loss_lipschitz * std::log(4.0 * class_size / delta) / m;
  BoundReport report = wpb_template(k, w1, m, delta);
  report.inputs.extra.emplace_back("class_size", static_cast<double>(class_size));
  report.inputs.extra.emplace_back("loss_lipschitz", loss_lipschitz);
  return report;
}

BoundReport wpb_grad_uc(double uc_q, double ucg_q, DivergenceValue w1, int m, double delta) {
  require_m_delta(m, delta, "wpb_grad_uc");
  if (!(uc_q >= 0.0) || !(ucg_q >= 0.0)) {
    throw std::invalid_argument("wpb_grad_uc: uc and ucg must be >= 0");
  }
  BoundReport report = wpb_template(2.0 * uc_q * ucg_q, w1, m, delta);
  report.inputs.uc = uc_q;
  report.inputs.ucg = ucg_q;
  return report;
}

BoundReport seeger_tv_finite(double emp_risk, int class_size, DivergenceValue tv, int m,
                             double delta) {
  require_m_delta(m, delta, "seeger_tv_finite");
  if (tv.kind != DivergenceKind::TV) {
    throw std::invalid_argument("seeger_tv_finite: divergence must be a TV value");
  }
  if (!(emp_risk >= 0.0 && emp_risk <= 1.0)) {
    throw std::invalid_argument("seeger_tv_finite: empirical risk must lie in [0,1]");
  }
  if (class_size < 1) throw std::invalid_argument("seeger_tv_finite: class size must be >= 1");
  const double c_term = std::log(4.0 * class_size / delta) * tv.value +
                        std::log(4.0 * std::sqrt(static_cast<double>(m)) / delta);
  const double complexity =
      std::sqrt(2.0 * emp_risk * c_term / m) + 2.0 * c_term / m;
  BoundInputs inputs{m, delta, tv, std::nullopt, std::nullopt,
                     {{"emp_risk", emp_risk},
                      {"class_size", static_cast<double>(class_size)},
                      {"c_term", c_term}}};
  return gap_report(complexity, std::move(inputs));
}

double uc_linreg(int m, double delta, int d) {
  if (m < 1) throw std::invalid_argument("uc_linreg: m must be >= 1");
  if (d < 1) throw std::invalid_argument("uc_linreg: d must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("uc_linreg: delta in (0,1)");
  const double dm = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  const double log6 = std::log(6.0 / delta);
  const double log3 = std::log(3.0 / delta);
  const double term1 = std::sqrt(log6 / (32.0 * dm));
  const double term2 = std::sqrt((dd + 2.0 * dd * std::sqrt(log3) + 2.0 * log3) / (4.0 * dm));
  const double ratio = (5.0 * dd + 2.0 * log6) / dm;
  const double term3 = 8.0 * std::max(std::sqrt(ratio), ratio);
  return term1 + term2 + term3;
}

double ucg_linreg(int m, double delta, int d, double r) {
  if (m < 1) throw std::invalid_argument("ucg_linreg: m must be >= 1");
  if (d < 1) throw std::invalid_argument("ucg_linreg: d must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("ucg_linreg: delta in (0,1)");
  if (!(r > 0.0)) throw std::invalid_argument("ucg_linreg: r must be > 0");
  const double dm = static_cast<double>(m);
  const double dd = static_cast<double>(d);
  const double log4 = std::log(4.0 / delta);
  const double log2 = std::log(2.0 / delta);
  const double ratio = (5.0 * dd + 2.0 * log4) / dm;
  const double term1 = 16.0 * r * std::max(std::sqrt(ratio), ratio);
  const double term2 =
      r * std::sqrt((dd + 2.0 * dd * std::sqrt(log2) + 2.0 * log2) / (4.0 * dm));
  return term1 + term2;
}

BoundReport wpb_linreg(double jhat, DivergenceValue w_bound, int m, double delta, int d,
                       double r) {
  require_m_delta(m, delta, "wpb_linreg");
  const double uc = uc_linreg(m, delta / 4.0, d);
  const double ucg = ucg_linreg(m, delta / 4.0, d, r);
  BoundReport report = wpb_grad_uc(uc, ucg, w_bound, m, delta);
  report.empirical_risk = jhat;
  report.bound_value = jhat + report.complexity;
  report.inputs.extra.emplace_back("d", static_cast<double>(d));
  report.inputs.extra.emplace_back("r", r);
  return report;
}

BoundReport klpb_linreg(double jhat, const GaussianMeasure& q, const GaussianMeasure& p,
                        int m, double delta) {
  require_m_delta(m, delta, "klpb_linreg");
  if (q.sigma == 0.0 || p.sigma == 0.0) {
    throw UndefinedValueError("klpb_linreg: undefined for sigma = 0");
  }
  BoundReport report = klpb_classic(kl_gaussian_isotropic(q, p), m, delta);
  report.empirical_risk = jhat;
  report.bound_value = jhat + report.complexity;
  return report;
}

}  // namespace pacbayes
