#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "clipmu/sweep.hpp"
#include "json.hpp"

namespace clipmu {
namespace {

struct Job {
  SPair s;
  std::pair<double, double> h;
  std::optional<double> x;
};

std::vector<Job> expand(const SweepConfig& cfg) {
  std::vector<Job> jobs;
  const bool per_x = cfg.family == Family::kConditional;
  for (const SPair& s : cfg.s_pairs) {
    for (const auto& h : cfg.h_grid) {
      if (per_x) {
        for (double x : cfg.x_grid) jobs.push_back({s, h, x});
      } else {
        jobs.push_back({s, h, std::nullopt});
      }
    }
  }
  return jobs;
}

void add_flag(std::string& flags, const char* f) {
  if (!flags.empty()) flags += '|';
  flags += f;
}

SweepRow evaluate(const SweepConfig& cfg, const Job& job, const McConfig& mc) {
  SweepRow row;
  row.family = cfg.family;
  row.s1 = job.s.first;
  row.s2 = job.s.second;
  row.h1 = job.h.first;
  row.h2 = job.h.second;
  row.x = job.x;
  const TestPoint tp{row.s1, row.s2, row.h1, row.h2, job.x};

  if (cfg.method != SweepMethod::kMc) {
    const MuResult r = mu_dispatch(cfg.problem, cfg.family, tp, cfg.quadrature);
    row.mu_analytic = r.value;
    row.method_tag = to_string(r.method);
    if (r.diagnostics.clamped) add_flag(row.flags, "clamped");
    if (!r.diagnostics.converged) add_flag(row.flags, "nonconverged");
  } else {
    row.method_tag = to_string(MuMethod::kMc);
  }
  if (cfg.method != SweepMethod::kAnalytic) {
    const McEstimate e = estimate_mu(cfg.problem, cfg.family, tp, mc);
    row.mu_mc = e.mean;
    row.mc_stderr = e.std_err;
  }
  if (row.mu_analytic && row.mu_mc) {
    const double diff = std::abs(*row.mu_analytic - *row.mu_mc);
    row.abs_diff = diff;
    if (*row.mc_stderr > 0.0) {
      row.z_score = diff / *row.mc_stderr;
    } else {
      // A constant MC sample has no spread; agree if within the quadrature target.
      const bool agree = diff <= cfg.quadrature.target_abs_tol;
      row.z_score = agree ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  return row;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

nlohmann::ordered_json json_cell(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (!std::isfinite(*v)) return format_double(*v);
  return *v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

bool SweepTable::regressed(double limit) const {
  return std::any_of(rows.begin(), rows.end(),
                     [&](const SweepRow& r) { return r.z_score && *r.z_score > limit; });
}

SweepTable run_sweep(const SweepConfig& cfg) {
  cfg.mc.validate();
  cfg.quadrature.validate();
  const std::vector<Job> jobs = expand(cfg);
  SweepTable table;
  table.rows.resize(jobs.size());

  const unsigned threads =
      cfg.mc.threads != 0 ? cfg.mc.threads : std::max(1u, std::thread::hardware_concurrency());
  // With enough rows the parallelism goes across rows; otherwise into each MC run.
  // Neither choice can change a value, since every draw is keyed by (seed, i).
  const bool across_rows = threads > 1 && jobs.size() >= threads;
  McConfig mc = cfg.mc;
  if (across_rows) mc.threads = 1;

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        table.rows[j] = evaluate(cfg, jobs[j], mc);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = jobs.size();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    if (across_rows) {
      for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    }
    work();
  }
  if (error) std::rethrow_exception(error);
  return table;
}

void write_csv(const SweepTable& table, std::ostream& out) {
  out << "family,s1,s2,h1,h2,x,mu_analytic,method_tag,mu_mc,mc_stderr,abs_diff,z_score,flags\n";
  for (const SweepRow& r : table.rows) {
    out << to_string(r.family) << ',' << r.s1 << ',' << r.s2 << ',' << format_double(r.h1) << ','
        << format_double(r.h2) << ',' << cell(r.x) << ',' << cell(r.mu_analytic) << ','
        << r.method_tag << ',' << cell(r.mu_mc) << ',' << cell(r.mc_stderr) << ','
        << cell(r.abs_diff) << ',' << cell(r.z_score) << ',' << r.flags << '\n';
  }
}

void write_json(const SweepTable& table, std::ostream& out) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const SweepRow& r : table.rows) {
    nlohmann::ordered_json o;
    o["family"] = to_string(r.family);
    o["s1"] = r.s1;
    o["s2"] = r.s2;
    o["h1"] = r.h1;
    o["h2"] = r.h2;
    o["x"] = json_cell(r.x);
    o["mu_analytic"] = json_cell(r.mu_analytic);
    o["method_tag"] = r.method_tag;
    o["mu_mc"] = json_cell(r.mu_mc);
    o["mc_stderr"] = json_cell(r.mc_stderr);
    o["abs_diff"] = json_cell(r.abs_diff);
    o["z_score"] = json_cell(r.z_score);
    o["flags"] = r.flags;
    rows.push_back(std::move(o));
  }
  out << rows.dump(2) << '\n';
}

}  // namespace clipmu
