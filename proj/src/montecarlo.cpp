#include "ewanet/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <omp.h>
#include <sstream>

#include "ewanet/rng.hpp"

namespace ewanet {

namespace {

// Battery-internal RK4 with consensus trap. For the cooperative drift, a
// state with every q_i beyond the trap margin, uniform sign, and drift
// pointing outward can never leave that orthant (monotone flow), so the
// long-run consensus is already decided.
Consensus integrate_consensus(const DriftEvaluator& drift, std::vector<double> q,
                              const ExperimentConfig& cfg) {
  const int n = drift.size();
  const double dt = cfg.dt > 0 ? cfg.dt : drift.suggested_dt();
  const long steps = static_cast<long>(std::ceil(cfg.horizon / dt));
  DriftWorkspace ws;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  int streak = 0;
  double t = 0;
  for (long step = 0; step < steps; ++step) {
    drift.eval(q, t, k1, ws);

    bool trap_d = true, trap_c = true;
    double resid = 0;
    for (int i = 0; i < n; ++i) {
      trap_d = trap_d && q[i] > cfg.trap_margin && k1[i] >= 0;
      trap_c = trap_c && q[i] < -cfg.trap_margin && k1[i] <= 0;
      resid = std::max(resid, std::abs(k1[i]));
    }
    if (trap_d) return Consensus::AllD;
    if (trap_c) return Consensus::AllC;

    if (resid <= cfg.conv_tol) {
      if (++streak >= 10) {
        bool all_d = true, all_c = true;
        for (double v : q) {
          all_d = all_d && v > cfg.consensus_margin;
          all_c = all_c && v < -cfg.consensus_margin;
        }
        if (all_d) return Consensus::AllD;
        if (all_c) return Consensus::AllC;
        return Consensus::Mixed;
      }
    } else {
      streak = 0;
    }

    for (int i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * dt * k1[i];
    drift.eval(tmp, t + 0.5 * dt, k2, ws);
    for (int i = 0; i < n; ++i) tmp[i] = q[i] + 0.5 * dt * k2[i];
    drift.eval(tmp, t + 0.5 * dt, k3, ws);
    for (int i = 0; i < n; ++i) tmp[i] = q[i] + dt * k3[i];
    drift.eval(tmp, t + dt, k4, ws);
    for (int i = 0; i < n; ++i) q[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    t += dt;
    for (double v : q)
      if (!std::isfinite(v)) return Consensus::NonConverged;
  }
  return Consensus::NonConverged;
}

SimRecord run_single(const ExperimentConfig& cfg, int index) {
  SimRecord rec;
  rec.seed = CounterRng::derive(cfg.master_seed, static_cast<std::uint64_t>(index));
  CounterRng rng(rec.seed);

  // Draw order is part of the reproducibility contract; do not reorder.
  const double psi_a = rng.uniform(cfg.psi_bound_lo, cfg.psi_bound_hi);
  const double psi_b = rng.uniform(cfg.psi_bound_lo, cfg.psi_bound_hi);
  const double lam_a = rng.uniform(cfg.lambda_bound_lo, cfg.lambda_bound_hi);
  const double lam_b = rng.uniform(cfg.lambda_bound_lo, cfg.lambda_bound_hi);
  const double eta_a = rng.uniform(cfg.eta_bound_lo, cfg.eta_bound_hi);
  const double eta_b = rng.uniform(cfg.eta_bound_lo, cfg.eta_bound_hi);
  rec.payoff_id = static_cast<int>(rng.next_u64() & 1);
  const double sigma_q = rng.uniform(cfg.sigma_q_lo, cfg.sigma_q_hi);
  const std::uint64_t graph_seed = rng.next_u64();

  const int n = cfg.n;
  BehavioralParams params;
  params.psi.resize(n);
  params.lambda.resize(n);
  params.eta.resize(n);
  for (int i = 0; i < n; ++i) params.psi[i] = rng.uniform(std::min(psi_a, psi_b), std::max(psi_a, psi_b));
  for (int i = 0; i < n; ++i)
    params.lambda[i] = rng.uniform(std::min(lam_a, lam_b), std::max(lam_a, lam_b));
  for (int i = 0; i < n; ++i)
    params.eta[i] = rng.uniform(std::min(eta_a, eta_b), std::max(eta_a, eta_b));
  std::vector<double> q0(n);
  for (int i = 0; i < n; ++i) q0[i] = rng.normal(0.0, sigma_q);

  rec.sigma_q0 = sample_sd(q0);
  rec.cr_lambda = pearson(q0, params.lambda);
  rec.mu_lambda =
      std::accumulate(params.lambda.begin(), params.lambda.end(), 0.0) / params.lambda.size();

  try {
    const Graph g =
        erdos_renyi(n, cfg.p, graph_seed, cfg.require_connected, cfg.max_redraws);
    const auto centrality = eigenvector_centrality(g, 1e-9, 200000);
    rec.cr_centrality = pearson(q0, centrality);

    const auto& pool = cfg.payoff_pool[rec.payoff_id];
    const PayoffMatrix payoff = PayoffMatrix::symmetric(pool[0], pool[1]);
    const InfluenceOptions iopt{.tol = 1e-9, .max_iter = 500000, .full_spectrum_cap = 0};
    const InfluenceReport report = influence_report(g, payoff, params, iopt);
    rec.kappa1 = report.kappa1;
    rec.prediction = (report.unstable && report.all_positive_v1)
                         ? predict_coordination(report, q0)
                         : CoordinationPrediction::Indeterminate;

    const DriftEvaluator drift(g, payoff, params);
    rec.consensus = integrate_consensus(drift, q0, cfg);
  } catch (const std::exception&) {
    rec.failed = true;
    rec.consensus = Consensus::NonConverged;
    rec.prediction = CoordinationPrediction::Indeterminate;
  }
  return rec;
}

double quantile_edge(const std::vector<double>& sorted, double frac) {
  if (sorted.empty()) return 0;
  const double pos = frac * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - lo;
  return sorted[lo] * (1 - w) + sorted[hi] * w;
}

}  // namespace

std::string to_string(Consensus c) {
  switch (c) {
    case Consensus::AllD: return "all_d";
    case Consensus::AllC: return "all_c";
    case Consensus::Mixed: return "mixed";
    default: return "nonconverged";
  }
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa < 1e-300 || sbb < 1e-300) return 0;
  return sab / std::sqrt(saa * sbb);
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

std::vector<SimRecord> run_battery(const ExperimentConfig& cfg) {
  std::vector<SimRecord> records(cfg.n_sims);
#pragma omp parallel for schedule(dynamic) if (cfg.parallel)
  for (int i = 0; i < cfg.n_sims; ++i) records[i] = run_single(cfg, i);
  return records;
}

AccuracyTable accuracy_summary(const std::vector<SimRecord>& records, int bins) {
  AccuracyTable table;
  struct Obs {
    double sigma;
    bool correct;
  };
  std::vector<Obs> curve_obs;
  int pred_d_all = 0, pred_c_all = 0, hit_d = 0, hit_c = 0, cons_d = 0, cons_c = 0;
  for (const auto& r : records) {
    if (!(r.kappa1 > 0) || r.failed) continue;
    ++table.kappa_pos;
    if (r.prediction == CoordinationPrediction::Indeterminate) continue;
    const bool pred_d = r.prediction == CoordinationPrediction::D;
    (pred_d ? pred_d_all : pred_c_all)++;
    if (r.consensus != Consensus::AllD && r.consensus != Consensus::AllC) continue;
    const bool correct = (pred_d && r.consensus == Consensus::AllD) ||
                         (!pred_d && r.consensus == Consensus::AllC);
    (pred_d ? cons_d : cons_c)++;
    if (correct) (pred_d ? hit_d : hit_c)++;
    curve_obs.push_back({r.sigma_q0, correct});
  }
  if (table.kappa_pos == 0) {
    table.empty = true;
    return table;
  }
  table.considered_d = cons_d;
  table.considered_c = cons_c;
  table.acc_d = cons_d ? double(hit_d) / cons_d : 0;
  table.acc_c = cons_c ? double(hit_c) / cons_c : 0;
  table.acc_d_incl = pred_d_all ? double(hit_d) / pred_d_all : 0;
  table.acc_c_incl = pred_c_all ? double(hit_c) / pred_c_all : 0;

  std::vector<double> sigmas;
  sigmas.reserve(curve_obs.size());
  for (const auto& o : curve_obs) sigmas.push_back(o.sigma);
  std::sort(sigmas.begin(), sigmas.end());
  for (int b = 0; b < bins; ++b) {
    AccuracyBin bin;
    bin.sigma_lo = quantile_edge(sigmas, double(b) / bins);
    bin.sigma_hi = quantile_edge(sigmas, double(b + 1) / bins);
    for (const auto& o : curve_obs) {
      const bool inside = b == 0 ? (o.sigma <= bin.sigma_hi)
                                 : (o.sigma > bin.sigma_lo && o.sigma <= bin.sigma_hi);
      if (!inside) continue;
      ++bin.count;
      if (o.correct) ++bin.correct;
    }
    bin.accuracy = bin.count ? double(bin.correct) / bin.count : 0;
    table.bins.push_back(bin);
  }
  table.low_sigma.sigma_lo = 0;
  table.low_sigma.sigma_hi = 0.1;
  for (const auto& o : curve_obs) {
    if (o.sigma < 0.1) {
      ++table.low_sigma.count;
      if (o.correct) ++table.low_sigma.correct;
    }
  }
  table.low_sigma.accuracy =
      table.low_sigma.count ? double(table.low_sigma.correct) / table.low_sigma.count : 0;
  return table;
}

namespace {

PartialDependenceTable pd_impl(const std::vector<SimRecord>& records, PdStatistic stat,
                               int bins) {
  PartialDependenceTable table;
  table.statistic = stat;
  std::vector<std::pair<double, bool>> obs;  // (cr, all_d)
  for (const auto& r : records) {
    if (r.failed) continue;
    const double cr = stat == PdStatistic::CrCentrality ? r.cr_centrality : r.cr_lambda;
    obs.emplace_back(cr, r.consensus == Consensus::AllD);
  }
  std::sort(obs.begin(), obs.end());
  const std::size_t m = obs.size();
  for (int b = 0; b < bins; ++b) {
    const std::size_t lo = m * b / bins;
    const std::size_t hi = m * (b + 1) / bins;
    PdBin bin;
    if (lo < hi) {
      bin.lo = obs[lo].first;
      bin.hi = obs[hi - 1].first;
      double sum = 0;
      for (std::size_t k = lo; k < hi; ++k) {
        sum += obs[k].first;
        ++bin.count;
        if (obs[k].second) ++bin.all_d;
      }
      bin.center = sum / bin.count;
      bin.freq = double(bin.all_d) / bin.count;
    }
    bin.low_confidence = bin.count < 30;
    table.bins.push_back(bin);
  }
  // Least-squares slope of freq against bin centers, weighted by bin counts.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& bin : table.bins) {
    if (!bin.count) continue;
    const double w = bin.count;
    sw += w;
    sx += w * bin.center;
    sy += w * bin.freq;
    sxx += w * bin.center * bin.center;
    sxy += w * bin.center * bin.freq;
  }
  const double denom = sw * sxx - sx * sx;
  table.slope = std::abs(denom) > 1e-300 ? (sw * sxy - sx * sy) / denom : 0;
  return table;
}

}  // namespace

PartialDependenceTable partial_dependence(const std::vector<SimRecord>& records, PdStatistic stat,
                                          int bins) {
  return pd_impl(records, stat, bins);
}

std::vector<PartialDependenceTable> partial_dependence_by_lambda_band(
    const std::vector<SimRecord>& records, int bands, int bins) {
  std::vector<double> mus;
  for (const auto& r : records)
    if (!r.failed) mus.push_back(r.mu_lambda);
  std::sort(mus.begin(), mus.end());
  std::vector<PartialDependenceTable> tables;
  for (int b = 0; b < bands; ++b) {
    const double lo = quantile_edge(mus, double(b) / bands);
    const double hi = quantile_edge(mus, double(b + 1) / bands);
    std::vector<SimRecord> slice;
    for (const auto& r : records) {
      if (r.failed) continue;
      const bool inside = b == 0 ? r.mu_lambda <= hi : (r.mu_lambda > lo && r.mu_lambda <= hi);
      if (inside) slice.push_back(r);
    }
    PartialDependenceTable t = pd_impl(slice, PdStatistic::CrLambda, bins);
    t.band_lo = lo;
    t.band_hi = hi;
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string records_csv(const std::vector<SimRecord>& records) {
  std::ostringstream os;
  os.precision(17);
  os << "sim,seed,kappa1,prediction,consensus,sigma_q0,cr_centrality,cr_lambda,mu_lambda,"
        "payoff_id,failed\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    os << i << ',' << r.seed << ',' << r.kappa1 << ',' << to_string(r.prediction) << ','
       << to_string(r.consensus) << ',' << r.sigma_q0 << ',' << r.cr_centrality << ','
       << r.cr_lambda << ',' << r.mu_lambda << ',' << r.payoff_id << ',' << (r.failed ? 1 : 0)
       << '\n';
  }
  return os.str();
}

std::string accuracy_csv(const AccuracyTable& t) {
  std::ostringstream os;
  os.precision(12);
  os << "metric,value\n";
  os << "empty," << (t.empty ? 1 : 0) << '\n';
  os << "kappa_pos," << t.kappa_pos << '\n';
  os << "acc_d," << t.acc_d << '\n';
  os << "acc_c," << t.acc_c << '\n';
  os << "acc_d_incl_nonconsensus," << t.acc_d_incl << '\n';
  os << "acc_c_incl_nonconsensus," << t.acc_c_incl << '\n';
  os << "low_sigma_count," << t.low_sigma.count << '\n';
  os << "low_sigma_accuracy," << t.low_sigma.accuracy << '\n';
  os << "\nsigma_lo,sigma_hi,count,correct,accuracy\n";
  for (const auto& b : t.bins)
    os << b.sigma_lo << ',' << b.sigma_hi << ',' << b.count << ',' << b.correct << ','
       << b.accuracy << '\n';
  return os.str();
}

std::string partial_dependence_csv(const std::vector<PartialDependenceTable>& tables) {
  std::ostringstream os;
  os.precision(12);
  os << "statistic,band_lo,band_hi,bin_lo,bin_hi,bin_center,count,all_d,freq,low_confidence,"
        "band_slope\n";
  for (const auto& t : tables) {
    const char* name = t.statistic == PdStatistic::CrCentrality ? "cr_centrality" : "cr_lambda";
    for (const auto& b : t.bins)
      os << name << ',' << t.band_lo << ',' << t.band_hi << ',' << b.lo << ',' << b.hi << ','
         << b.center << ',' << b.count << ',' << b.all_d << ',' << b.freq << ','
         << (b.low_confidence ? 1 : 0) << ',' << t.slope << '\n';
  }
  return os.str();
}

}  // namespace ewanet
