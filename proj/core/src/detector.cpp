#include "cpm/detector.hpp"

#include <stdexcept>

namespace cpm {

void DetectorParams::validate() const {
  if (lambda <= 0.0) throw std::domain_error("DetectorParams: lambda must be > 0");
  if (eta < 0.0 || eta > 1.0) throw std::domain_error("DetectorParams: eta outside [0,1]");
  if (dark < 0.0) throw std::domain_error("DetectorParams: dark < 0");
  if (cavity < 0.0) throw std::domain_error("DetectorParams: cavity < 0");
  if (dead_time < 0.0) throw std::domain_error("DetectorParams: dead_time < 0");
}

double CountDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 1; k < probs.size(); ++k) m += k * probs[k];
  return m;
}

double CountDistribution::second_factorial() const {
  double m = 0.0;
  for (std::size_t k = 2; k < probs.size(); ++k) {
    m += static_cast<double>(k) * (static_cast<double>(k) - 1.0) * probs[k];
  }
  return m;
}

double simpson(const std::vector<double>& values, double h) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("simpson: need odd size >= 3");
  double sum = values.front() + values.back();
  for (std::size_t i = 1; i + 1 < n; ++i) sum += values[i] * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace cpm
