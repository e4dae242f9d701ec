#include "liouville/params.hpp"

#include <cmath>
#include <string>

#include "liouville/error.hpp"

namespace liouville {

void StructureParams::validate() const {
    if (n < 2) {
        throw InvalidParams("dimension n must be >= 2, got " + std::to_string(n));
    }
    if (!std::isfinite(p) || !(p > 1.0)) {
        throw InvalidParams("exponent p must be a finite real > 1");
    }
    if (!std::isfinite(eps) || !(eps > 0.0)) {
        throw InvalidParams("threshold eps must be a finite real > 0");
    }
}

static void require_supercritical(const StructureParams& params) {
    params.validate();
    if (!params.supercritical()) {
        throw UnsupportedRegime(
            "n <= p: every non-negative solution of -div A(x, grad u) >= 0 in R^n "
            "is a constant, so the criterion does not apply (requires n > p)");
    }
}

double critical_exponent(const StructureParams& params) {
    require_supercritical(params);
    const double n = params.n;
    return n * (params.p - 1.0) / (n - params.p);
}

double decay_exponent(const StructureParams& params) {
    require_supercritical(params);
    return (params.n - params.p) / (params.p - 1.0);
}

} // namespace liouville
