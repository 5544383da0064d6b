#include "ctm/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace ctm {

double gradient_relative_error(double autodiff, double numeric) {
  return std::abs(autodiff - numeric) / std::max(1e-8, std::abs(autodiff) + std::abs(numeric));
}

GradCheckReport finite_diff_check(const std::function<Tensor<double>()>& f,
                                  std::vector<NamedParam> params, double eps) {
  for (auto& [name, p] : params) p.zero_grad();
  backward(f());

  GradCheckReport report;
  for (auto& [name, p] : params) {
    GradCheckEntry entry;
    entry.name = name;
    entry.coordinates = p.size();
    std::vector<double> analytic(p.size(), 0.0);
    std::copy(p.grad().begin(), p.grad().end(), analytic.begin());
    auto values = p.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      double up = 0.0, down = 0.0;
      {
        NoGradGuard guard;
        values[i] = saved + eps;
        up = f().item();
        values[i] = saved - eps;
        down = f().item();
      }
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double err = gradient_relative_error(analytic[i], numeric);
      if (err > entry.worst_error || i == 0) {
        entry.worst_error = std::max(entry.worst_error, err);
        if (err >= entry.worst_error) {
          entry.worst_index = i;
          entry.autodiff = analytic[i];
          entry.numeric = numeric;
        }
      }
    }
    report.worst_error = std::max(report.worst_error, entry.worst_error);
    report.entries.push_back(std::move(entry));
  }
  for (auto& [name, p] : params) p.zero_grad();
  return report;
}

}  // namespace ctm
