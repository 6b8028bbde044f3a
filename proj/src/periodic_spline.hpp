#pragma once

#include <memory>

#include <gsl/gsl_spline.h>

#include "wavesplit/grid.hpp"

namespace wavesplit::detail {

/// Periodic cubic spline through the samples of a field. Evaluation wraps the
/// argument into [0, L) and is safe to call concurrently.
class PeriodicSpline {
public:
    explicit PeriodicSpline(const Field& f);

    double operator()(double x) const;

private:
    struct Deleter {
        void operator()(gsl_spline* s) const { gsl_spline_free(s); }
    };

    double period_;
    std::unique_ptr<gsl_spline, Deleter> spline_;
};

} // namespace wavesplit::detail
