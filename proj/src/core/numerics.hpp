#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pctv::numerics {

struct Integral {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Adaptive composite Simpson on [a, b] to relative tolerance `rel_tol`.
/// `breaks` are interior points where the integrand may jump; the interval is
/// split there so each piece is integrated separately.
Integral integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   std::span<const double> breaks = {});

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int order);

/// Surface area of the unit sphere S^{k} in R^{k+1}.
double sphere_area(int k);

double median(std::vector<double> v);

/// Neumaier-compensated running sum; order of add() calls fixes the result.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace pctv::numerics
