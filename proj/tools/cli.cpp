#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace bmtrunc::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Writes to --out when given, else to the supplied stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot open output file '" + path + "'");
      os_ = &file_;
    }
    *os_ << std::setprecision(12);
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

TruncationSpec make_spec(const RunConfig& cfg, Index n) {
  TruncationSpec s;
  s.n = n;
  s.style = parse_truncation_style(cfg.style);
  if (s.style == TruncationStyle::Custom) s.weights = fixed_weights(parse_weight_list(cfg.weights));
  return s;
}

void print_report(std::ostream& out, const std::string& label, const DominanceReport& r) {
  out << label << ": " << yes_no(r.holds) << "\n";
  if (!r.holds)
    out << "  worst violation at " << to_string(r.row) << " -> " << to_string(r.col) << ": " << r.worst_violation
        << "\n";
  if (!r.provenance.empty()) out << "  " << r.provenance << "\n";
}

}  // namespace

std::vector<Index> RunConfig::sweep_levels() const {
  if (!levels.empty()) return levels;
  if (n_min < 1 || n_max < n_min || step < 1) throw InputError("need 1 <= n-min <= n-max and step >= 1");
  std::vector<Index> out;
  for (Index n = n_min; n <= n_max; n += step) out.push_back(n);
  return out;
}

Index RunConfig::reference_level() const {
  const auto lv = sweep_levels();
  const Index top = *std::max_element(lv.begin(), lv.end());
  if (n_ref) {
    if (*n_ref < 4 * top)
      throw InputError("n-ref must be at least 4 times the largest swept level (" + std::to_string(4 * top) + ")");
    return *n_ref;
  }
  return std::max<Index>(4 * top, 200);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CheckFailure*>(&e)) return 1;
  if (dynamic_cast<const InputError*>(&e)) return 2;
  return 3;
}

DriftCertificate certify(const LoadedModel& m, std::optional<double> beta) {
  if (m.bmap) return bound_pipeline(*m.bmap, {}, PipelineMode::Auto, beta).certificate;
  if (m.banded) return find_geometric_certificate(*m.banded, beta);
  throw InputError("no certificate finder for model kind '" + m.kind + "'");
}

int run_validate(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel m = load_model(cfg.model_path);
  const Index d = m.model->phases();
  bool ok = true;
  out << "model: " << m.kind << ", d = " << d << "\n";
  const ValidationReport rep = validate_model(*m.model);
  out << "conservative: " << yes_no(rep.valid()) << "\n";
  for (std::size_t i = 0; i < rep.violations.size() && i < 10; ++i)
    out << "  " << to_string(rep.violations[i]) << "\n";
  ok = ok && rep.valid();
  const DominanceReport bm = generator_is_block_monotone(*m.model);
  print_report(out, "BM_" + std::to_string(d), bm);
  ok = ok && bm.holds;
  if (!cfg.model2_path.empty()) {
    const LoadedModel m2 = load_model(cfg.model2_path);
    const DominanceReport dom = generator_dominates(*m.model, *m2.model);
    print_report(out, "dominated by " + cfg.model2_path, dom);
    ok = ok && dom.holds;
  }
  return ok ? 0 : 1;
}

int run_truncate(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel m = load_model(cfg.model_path);
  const TruncatedGenerator tg = truncate(m.model, make_spec(cfg, cfg.n));
  const Index d = tg.matrix.block_size();
  const ValidationReport rep = validate_q_matrix(tg.matrix);
  const DominanceReport bm = generator_is_block_monotone(tg.matrix);
  const bool open_above = check_no_closed_classes_above(*tg.extended_view());
  Sink sink(cfg.out_path, out);
  auto& os = *sink;
  os << "# style " << cfg.style << ", n = " << cfg.n << ", d = " << d << "\n";
  os << "# conservative: " << yes_no(rep.valid()) << "\n";
  os << "# BM_" << d << " corner: " << yes_no(bm.holds) << "\n";
  os << "# no closed classes above n: " << yes_no(open_above) << "\n";
  const Matrix& e = tg.matrix.entries();
  for (Index r = 0; r < e.rows(); ++r) {
    for (Index c = 0; c < e.cols(); ++c) os << (c ? "," : "") << e(r, c);
    os << "\n";
  }
  return rep.valid() ? 0 : 1;
}

int run_solve(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel m = load_model(cfg.model_path);
  const TruncatedGenerator tg = truncate(m.model, make_spec(cfg, cfg.n));
  const DistributionVector pi = stationary(tg.matrix);
  const Index d = pi.d;
  std::optional<RowVector> pt;
  if (cfg.t) {
    // Transient law from level 0 with the stationary phase law.
    const Matrix xi = phase_generator(*m.model);
    RowVector p0 = RowVector::Zero(pi.values.size());
    p0.head(d) = gth_stationary<double>(xi);
    pt = transient_distribution<double>(p0, tg.matrix.entries(), *cfg.t, cfg.tol);
  }
  Sink sink(cfg.out_path, out);
  auto& os = *sink;
  os << "# residual " << stationary_residual(pi.values.transpose(), tg.matrix.entries()) << "\n";
  os << "level,phase,probability" << (pt ? ",transient" : "") << "\n";
  for (Index k = 0; k < pi.levels(); ++k)
    for (Index i = 0; i < d; ++i) {
      os << k << "," << i + 1 << "," << pi(k, i);
      if (pt) os << "," << (*pt)(k * d + i);
      os << "\n";
    }
  return 0;
}

int run_bound(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel m = load_model(cfg.model_path);
  const auto levels = cfg.sweep_levels();
  const DriftCertificate cert = certify(m, cfg.beta);
  std::optional<DistributionVector> ref;
  if (cfg.n_ref) ref = stationary(lc_truncate(m.model, cfg.reference_level()).matrix, DistributionSource::Reference);
  Sink sink(cfg.out_path, out);
  auto& os = *sink;
  os << "# certificate: beta = " << cert.v.beta << ", c = " << cert.c << ", b = " << cert.b
     << ", shift = " << cert.v.shift << "\n";
  os << "# " << cert.provenance << "\n";
  os << "# irreducibility: window-verified\n";
  os << "n,t_star,bound_min,true_tv,slack,runtime_ms" << (cfg.t ? ",bound_at_t" : "") << "\n";
  for (Index n : levels) {
    const auto t0 = Clock::now();
    BoundReport r = bound_report(cert, *m.model, n);
    if (ref) {
      r.true_tv = tv_distance(stationary(lc_truncate(m.model, n).matrix), *ref);
      r.slack = r.bound_min - *r.true_tv;
    }
    r.runtime_ms = ms_since(t0);
    os << n << "," << r.t_star << "," << r.bound_min << ",";
    if (r.true_tv) os << *r.true_tv;
    os << ",";
    if (r.slack) os << *r.slack;
    os << "," << r.runtime_ms;
    if (cfg.t) os << "," << theorem_bound(cert, *m.model, n, *cfg.t);
    os << "\n";
  }
  return 0;
}

namespace {

struct SweepRow {
  std::string style;
  std::optional<double> t_star, bound_min;
  double true_tv = 0.0;
  bool ordering = false;
  double runtime_ms = 0.0;
};

std::vector<SweepRow> sweep_level(const LoadedModel& m, const RunConfig& cfg, Index n, const DistributionVector& ref,
                                  const std::optional<DriftCertificate>& cert) {
  std::vector<SweepRow> rows;
  const TruncationSpec custom{n, TruncationStyle::Custom, fixed_weights(parse_weight_list(cfg.weights))};
  const std::pair<TruncationSpec, DistributionSource> specs[] = {
      {{n, TruncationStyle::LastColumn, {}}, DistributionSource::LastColumn},
      {{n, TruncationStyle::FirstColumn, {}}, DistributionSource::FirstColumn},
      {custom, DistributionSource::Custom}};
  std::vector<DistributionVector> pis;
  for (const auto& [spec, src] : specs) {
    const auto t0 = Clock::now();
    SweepRow row;
    row.style = to_string(spec.style);
    pis.push_back(stationary(truncate(m.model, spec).matrix, src, n));
    row.true_tv = tv_distance(pis.back(), ref);
    if (spec.style == TruncationStyle::LastColumn && cert) {
      const BoundReport r = bound_report(*cert, *m.model, n);
      row.t_star = r.t_star;
      row.bound_min = r.bound_min;
    }
    row.runtime_ms = ms_since(t0);
    rows.push_back(row);
  }
  const bool ordering = cumulative_ordering(pis[0], pis[2], pis[1], ref).pass;
  for (auto& r : rows) r.ordering = ordering;
  return rows;
}

}  // namespace

int run_sweep(const RunConfig& cfg, std::ostream& out) {
  const LoadedModel m = load_model(cfg.model_path);
  const auto levels = cfg.sweep_levels();
  const Index n_ref = cfg.reference_level();
  parse_weight_list(cfg.weights);
  Sink sink(cfg.out_path, out);
  auto& os = *sink;
  std::optional<DriftCertificate> cert;
  try {
    cert = certify(m, cfg.beta);
    os << "# certificate: beta = " << cert->v.beta << ", c = " << cert->c << ", b = " << cert->b << "\n";
    os << "# " << cert->provenance << "\n";
  } catch (const CheckFailure& e) {
    os << "# no drift certificate (" << e.what() << "); bound columns left empty\n";
  }
  os << "# reference: lc at n_ref = " << n_ref << "\n";
  os << "n,style,t_star,bound_min,true_tv,ordering_pass,runtime_ms\n";
  os.flush();

  const DistributionVector ref =
      stationary(lc_truncate(m.model, n_ref).matrix, DistributionSource::Reference, n_ref);

  const std::size_t count = levels.size();
  std::vector<std::promise<std::vector<SweepRow>>> promises(count);
  std::vector<std::future<std::vector<SweepRow>>> futures;
  for (auto& p : promises) futures.push_back(p.get_future());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        promises[i].set_value(sweep_level(m, cfg, levels[i], ref, cert));
      } catch (...) {
        promises[i].set_exception(std::current_exception());
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);

  std::exception_ptr failure;
  for (std::size_t i = 0; i < count && !failure; ++i) {
    try {
      for (const SweepRow& r : futures[i].get()) {
        os << levels[i] << "," << r.style << ",";
        if (r.t_star) os << *r.t_star;
        os << ",";
        if (r.bound_min) os << *r.bound_min;
        os << "," << r.true_tv << "," << (r.ordering ? "PASS" : "FAIL") << "," << r.runtime_ms << "\n";
        if (r.bound_min)
          os << "# bound_check," << levels[i] << "," << (*r.bound_min >= r.true_tv ? "PASS" : "FAIL") << "\n";
      }
      os.flush();
    } catch (const std::exception& e) {
      os << "# error," << e.what() << "\n";
      os.flush();
      failure = std::current_exception();
    }
  }
  if (failure) next = count;
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return 0;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::Validate: return run_validate(cfg, out);
      case Command::Truncate: return run_truncate(cfg, out);
      case Command::Solve: return run_solve(cfg, out);
      case Command::Bound: return run_bound(cfg, out);
      case Command::Sweep: return run_sweep(cfg, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}

}  // namespace bmtrunc::cli
