#include <array>
#include <cmath>

#include "contact/systems/models.hpp"

namespace contact::systems {

namespace {

constexpr std::array<double, 4> kNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                          0.9602898564975363};
constexpr std::array<double, 4> kWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                            0.1012285362903763};

}  // namespace

double gauss_legendre(const std::function<double(double)>& fn, double a, double b, double panel) {
  if (a == b) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / panel)));
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = a + (k + 0.5) * width;
    const double half = width / 2;
    double sum = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) {
      sum += kWeights[i] * (fn(mid - half * kNodes[i]) + fn(mid + half * kNodes[i]));
    }
    total += half * sum;
  }
  return total;
}

}  // namespace contact::systems
