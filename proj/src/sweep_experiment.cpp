#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "relaxpath/commands.hpp"
#include "relaxpath/path.hpp"

namespace relaxpath::cli {

SampleGenerator::SampleGenerator(std::uint64_t seed) : engine_(seed) {}

double SampleGenerator::uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

Eigen::VectorXd SampleGenerator::multinomial(const std::vector<double>& cdf, Index draws) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(Index(cdf.size()));
  const double total = cdf.back();
  for (Index k = 0; k < draws; ++k) {
    const double x = uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    if (it == cdf.end()) --it;
    counts[Index(it - cdf.begin())] += 1;
  }
  return counts;
}

std::vector<SweepRow> zipf_sweep(const SweepOptions& opt) {
  if (opt.dist != "zipf") throw Error(Errc::InvalidArgument, "unknown distribution " + opt.dist);
  if (opt.n < 2) throw Error(Errc::InvalidArgument, "n must be at least 2");
  if (opt.repeats < 1) throw Error(Errc::InvalidArgument, "repeats must be at least 1");
  if (!(opt.prior_offset > -1) || !std::isfinite(opt.exponent))
    throw Error(Errc::InvalidArgument, "bad Zipf parameters");
  const Index n = opt.n;
  std::vector<Index> sizes = opt.samples;
  if (sizes.empty()) sizes = {n / 4, n / 2, n, 2 * n};
  for (Index s : sizes)
    if (s < 1) throw Error(Errc::InvalidArgument, "a sample of size 0 cannot be normalized");

  Eigen::VectorXd u(n);
  std::vector<double> cdf(static_cast<std::size_t>(n));
  double acc = 0;
  for (Index j = 0; j < n; ++j) {
    u[j] = 1 / (opt.prior_offset + double(j + 1));
    acc += std::pow(double(j + 1), -opt.exponent);
    cdf[std::size_t(j)] = acc;
  }
  u /= u.sum();
  const Eigen::VectorXd m = Eigen::VectorXd::Ones(n);

  SampleGenerator gen(opt.seed);
  std::vector<SweepRow> rows;
  for (Index size : sizes) {
    double total = 0;
    for (int rep = 0; rep < opt.repeats; ++rep) {
      const Eigen::VectorXd q = gen.multinomial(cdf, size) / double(size);
      const auto inst = validate_instance<double>(u, q, m);
      total += double(track_sparse(inst).kappa());
    }
    const double mean = total / opt.repeats;
    rows.push_back({size, mean, mean / double(n)});
  }
  return rows;
}

std::string sweep_document(const SweepOptions& opt) {
  const auto rows = zipf_sweep(opt);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "# generator=mt19937_64 uniform=53bit sampling=inverse_cdf seed=%llu dist=%s n=%lld "
                "repeats=%d prior_offset=%.17g exponent=%.17g\n",
                static_cast<unsigned long long>(opt.seed), opt.dist.c_str(),
                static_cast<long long>(opt.n), opt.repeats, opt.prior_offset, opt.exponent);
  std::string out = buf;
  out += "sample_size,mean_kappa,kappa_over_n\n";
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(r.sample_size),
                  r.mean_kappa, r.kappa_over_n);
    out += buf;
  }
  return out;
}

}  // namespace relaxpath::cli
