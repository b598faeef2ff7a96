#include "ewanet/influence.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ewanet {

namespace {

struct PowerResult {
  double eigenvalue = 0;  // of the original (unshifted) matrix
  Eigen::VectorXd vec;
  double residual = 0;
  bool converged = false;
};

// Power iteration on B = M + shift*I; reports the eigenvalue of M.
PowerResult power_iteration(const Eigen::MatrixXd& M, double shift, double tol, int max_iter) {
  const int n = static_cast<int>(M.rows());
  Eigen::MatrixXd B = M + shift * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  // A deterministic, slightly uneven start avoids landing exactly on an
  // orthogonal invariant subspace of a deflated matrix.
  for (int i = 0; i < n; ++i) v[i] *= 1.0 + 1e-3 * std::sin(1.0 + i);
  v.normalize();
  PowerResult out;
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd bv = B * v;
    const double norm = bv.norm();
    if (!(norm > 0) || !bv.allFinite()) return out;
    v = bv / norm;
    const double mu = v.dot(B * v);
    const double resid = (M * v - (mu - shift) * v).lpNorm<Eigen::Infinity>();
    if (resid <= tol) {
      out.eigenvalue = mu - shift;
      out.vec = v;
      out.residual = resid;
      out.converged = true;
      return out;
    }
  }
  return out;
}

double perron_shift(const Eigen::MatrixXd& J) {
  const int n = static_cast<int>(J.rows());
  double max_diag = 0, max_row = 0;
  for (int i = 0; i < n; ++i) {
    max_diag = std::max(max_diag, std::abs(J(i, i)));
    double row = 0;
    for (int j = 0; j < n; ++j)
      if (j != i) row += std::abs(J(i, j));
    max_row = std::max(max_row, row);
  }
  return max_diag + max_row;
}

void orient_positive(Eigen::VectorXd& v) {
  if (v.sum() < 0) v = -v;
}

}  // namespace

Eigen::MatrixXd neutral_jacobian(const Graph& g, const PayoffMatrix& payoff,
                                 const BehavioralParams& params) {
  if (!payoff.symmetric_choice())
    throw std::invalid_argument("neutral_jacobian: payoff must be in symmetric (h, l) form");
  const double h = payoff.z, l = payoff.y;
  if (!(h > l)) throw std::invalid_argument("neutral_jacobian: requires h > l");
  params.validate(g.size(), payoff);
  const int n = g.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = -params.psi[i] + (1.0 - params.eta[i]) * g.degree(i) * (h + l) *
                                   params.lambda[i] / 4.0;
    for (int j : g.neighbors(i))
      J(i, j) = (1.0 + params.eta[i]) * (h - l) * params.lambda[j] / 4.0;
  }
  return J;
}

InfluenceReport influence_report(const Graph& g, const PayoffMatrix& payoff,
                                 const BehavioralParams& params, const InfluenceOptions& opt) {
  if (!g.connected()) throw std::invalid_argument("influence_report: graph must be connected");
  const Eigen::MatrixXd J = neutral_jacobian(g, payoff, params);
  const int n = static_cast<int>(J.rows());
  const double shift = perron_shift(J);

  const PowerResult right = power_iteration(J, shift, opt.tol, opt.max_iter);
  const PowerResult left = power_iteration(J.transpose(), shift, opt.tol, opt.max_iter);
  if (!right.converged || !left.converged)
    throw std::runtime_error("influence_report: power iteration did not converge");
  if (std::abs(right.eigenvalue - left.eigenvalue) > 1e-6 * (1.0 + std::abs(right.eigenvalue)))
    throw std::runtime_error("influence_report: left/right dominant eigenvalues disagree");

  InfluenceReport rep;
  rep.kappa1 = right.eigenvalue;
  rep.residual_right = right.residual;
  rep.residual_left = left.residual;

  Eigen::VectorXd v1 = right.vec;
  orient_positive(v1);
  rep.v1.assign(v1.data(), v1.data() + n);
  rep.all_positive_v1 = (v1.array() > 0).all();

  Eigen::VectorXd u1 = left.vec;
  orient_positive(u1);
  if ((u1.array() >= 0).all()) {
    u1 /= u1.sum();  // L1 normalization, matching a weights interpretation
  }
  rep.xi.assign(u1.data(), u1.data() + n);
  rep.unstable = rep.kappa1 > 0;

  if (n <= opt.full_spectrum_cap) {
    const EigenDecomposition dec = full_spectrum(J, opt);
    rep.full_spectrum_available = dec.complete;
    if (dec.complete)
      rep.subdominant.assign(dec.eigenvalues.begin() + 1, dec.eigenvalues.end());
  }
  return rep;
}

bool neutral_stability(const InfluenceReport& report) { return report.kappa1 < 0; }

std::string to_string(CoordinationPrediction p) {
  switch (p) {
    case CoordinationPrediction::D: return "D";
    case CoordinationPrediction::C: return "C";
    default: return "indeterminate";
  }
}

CoordinationPrediction predict_coordination(const InfluenceReport& report,
                                            const std::vector<double>& q0) {
  if (!report.unstable)
    throw std::invalid_argument(
        "predict_coordination: neutral state is stable; prediction undefined");
  if (!report.all_positive_v1)
    throw std::invalid_argument(
        "predict_coordination: first right eigenvector is not entrywise positive");
  if (q0.size() != report.xi.size())
    throw std::invalid_argument("predict_coordination: q0 length mismatch");
  double dot = 0, norm = 0;
  for (std::size_t i = 0; i < q0.size(); ++i) {
    dot += report.xi[i] * q0[i];
    norm += q0[i] * q0[i];
  }
  norm = std::sqrt(norm);
  if (std::abs(dot) <= 1e-12 * norm || norm == 0) return CoordinationPrediction::Indeterminate;
  return dot > 0 ? CoordinationPrediction::D : CoordinationPrediction::C;
}

EigenDecomposition full_spectrum(const Eigen::MatrixXd& J, const InfluenceOptions& opt) {
  const int n = static_cast<int>(J.rows());
  EigenDecomposition dec;
  dec.right.resize(n, n);
  dec.left.resize(n, n);
  const double shift = perron_shift(J);

  Eigen::MatrixXd B = J;
  Eigen::MatrixXd Bt = J.transpose();
  for (int r = 0; r < n; ++r) {
    const PowerResult right = power_iteration(B, shift, opt.tol, opt.max_iter);
    const PowerResult left = power_iteration(Bt, shift, opt.tol, opt.max_iter);
    if (!right.converged || !left.converged) return dec;
    if (std::abs(right.eigenvalue - left.eigenvalue) >
        1e-6 * (1.0 + std::abs(right.eigenvalue)))
      return dec;
    // Residual against the original matrix guards deflation drift.
    Eigen::VectorXd v = right.vec;
    Eigen::VectorXd u = left.vec;
    if ((J * v - right.eigenvalue * v).lpNorm<Eigen::Infinity>() > 100 * opt.tol) return dec;
    const double uv = u.dot(v);
    if (std::abs(uv) < 1e-12) return dec;  // near-defective pair
    u /= uv;                               // biorthonormal: u_r . v_r = 1
    dec.eigenvalues.push_back(right.eigenvalue);
    dec.right.col(r) = v;
    dec.left.col(r) = u;
    if (r > 0 && dec.eigenvalues[r - 1] - dec.eigenvalues[r] < opt.eigen_gap_min) {
      dec.eigenvalues.pop_back();
      return dec;  // clustered spectrum: refuse full decomposition
    }
    // Wielandt deflation; remaining eigenpairs are untouched because left and
    // right eigenvectors of distinct eigenvalues are biorthogonal. The found
    // eigenvalue is moved to -shift so it cannot dominate the next sweep.
    B -= (right.eigenvalue + shift) * v * u.transpose();
    Bt -= (right.eigenvalue + shift) * u * v.transpose();
  }
  dec.complete = static_cast<int>(dec.eigenvalues.size()) == n;
  return dec;
}

std::vector<double> linearized_solution(const EigenDecomposition& dec,
                                        const std::vector<double>& q0, double t) {
  const int n = static_cast<int>(q0.size());
  Eigen::Map<const Eigen::VectorXd> q0v(q0.data(), n);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (std::size_t r = 0; r < dec.eigenvalues.size(); ++r) {
    const double weight = dec.left.col(r).dot(q0v) * std::exp(dec.eigenvalues[r] * t);
    acc += weight * dec.right.col(r);
  }
  return {acc.data(), acc.data() + n};
}

std::vector<double> principal_term(const EigenDecomposition& dec, const std::vector<double>& q0,
                                   double t) {
  if (dec.eigenvalues.empty())
    throw std::invalid_argument("principal_term: empty decomposition");
  const int n = static_cast<int>(q0.size());
  Eigen::Map<const Eigen::VectorXd> q0v(q0.data(), n);
  const double weight = dec.left.col(0).dot(q0v) * std::exp(dec.eigenvalues[0] * t);
  Eigen::VectorXd acc = weight * dec.right.col(0);
  return {acc.data(), acc.data() + n};
}

ComparativeStaticsReport comparative_statics_probe(const Graph& g, const PayoffMatrix& payoff,
                                                   const BehavioralParams& params, int agent,
                                                   double delta) {
  if (agent < 0 || agent >= g.size())
    throw std::invalid_argument("comparative_statics_probe: agent out of range");
  ComparativeStaticsReport rep;
  rep.agent = agent;
  rep.delta = delta;
  auto xi_at = [&](const BehavioralParams& p) {
    return influence_report(g, payoff, p).xi[agent];
  };
  {
    BehavioralParams up = params, down = params;
    up.psi[agent] += delta;
    down.psi[agent] = std::max(1e-12, down.psi[agent] - delta);
    rep.dxi_dpsi = (xi_at(up) - xi_at(down)) / (up.psi[agent] - down.psi[agent]);
  }
  {
    BehavioralParams up = params, down = params;
    up.lambda[agent] += delta;
    down.lambda[agent] = std::max(1e-12, down.lambda[agent] - delta);
    rep.dxi_dlambda = (xi_at(up) - xi_at(down)) / (up.lambda[agent] - down.lambda[agent]);
  }
  return rep;
}

std::string influence_csv(const InfluenceReport& report, const Graph& g,
                          const BehavioralParams& params) {
  std::ostringstream os;
  os.precision(17);
  os << "agent,xi,v1,degree,psi,lambda,eta\n";
  for (int i = 0; i < g.size(); ++i)
    os << i << ',' << report.xi[i] << ',' << report.v1[i] << ',' << g.degree(i) << ','
       << params.psi[i] << ',' << params.lambda[i] << ',' << params.eta[i] << '\n';
  os << "\nkappa1,unstable\n" << report.kappa1 << ',' << (report.unstable ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace ewanet
