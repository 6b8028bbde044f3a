#include "periodic_spline.hpp"

#include <cmath>
#include <mutex>
#include <vector>

#include <gsl/gsl_errno.h>

namespace wavesplit::detail {

namespace {

// GSL aborts on errors by default; we check return codes instead.
void disable_gsl_abort() {
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });
}

} // namespace

PeriodicSpline::PeriodicSpline(const Field& f) : period_(f.grid().domain_length()) {
    disable_gsl_abort();
    const std::size_t n = f.size();
    std::vector<double> x(n + 1);
    std::vector<double> y(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = f.grid().x(i);
        y[i] = f[i];
    }
    x[n] = period_;
    y[n] = f[0];

    spline_.reset(gsl_spline_alloc(gsl_interp_cspline_periodic, n + 1));
    if (!spline_ || gsl_spline_init(spline_.get(), x.data(), y.data(), n + 1) != GSL_SUCCESS) {
        throw Error(ErrorCode::SingularFactorization, "periodic spline construction failed");
    }
}

double PeriodicSpline::operator()(double x) const {
    double wrapped = std::fmod(x, period_);
    if (wrapped < 0.0) wrapped += period_;
    if (wrapped >= period_) wrapped = 0.0;
    double value = 0.0;
    // A null accelerator makes evaluation stateless.
    if (gsl_spline_eval_e(spline_.get(), wrapped, nullptr, &value) != GSL_SUCCESS) {
        throw Error(ErrorCode::InvalidArgument, "spline evaluation outside its table");
    }
    return value;
}

} // namespace wavesplit::detail
