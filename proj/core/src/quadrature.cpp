#include "liouville/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "liouville/error.hpp"

namespace liouville {

double Tolerance::bound(double value) const { return std::max(abs, rel * std::fabs(value)); }

namespace {

constexpr int kMaxDepth = 60;
constexpr std::size_t kMaxIntervals = 1'000'000;
constexpr double kGrading = 1.0 / 16.0;

// Kronrod abscissae on [-1, 1] (non-negative half, descending), with the
// 15-point Kronrod weights and the 7-point Gauss weights of the odd-indexed
// nodes (xk[1], xk[3], xk[5], xk[7]).
constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    int depth;
};

double sample(const Integrand& g, double x) {
    const double y = g(x);
    if (!std::isfinite(y)) {
        throw QuadratureError("integrand returned " + std::string(std::isnan(y) ? "NaN" : "inf") +
                                  " at x = " + std::to_string(x),
                              x);
    }
    return y;
}

// Error estimate follows QUADPACK's qk15: the raw Gauss/Kronrod difference is
// rescaled against the integral of |g - mean|, with a round-off floor.
Segment gauss_kronrod(const Integrand& g, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = sample(g, center);

    double resk = kWk[7] * fc;
    double resg = kWg[3] * fc;
    double resabs = std::fabs(resk);
    std::array<double, 7> f1{};
    std::array<double, 7> f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXk[j];
        f1[j] = sample(g, center - dx);
        f2[j] = sample(g, center + dx);
        resk += kWk[j] * (f1[j] + f2[j]);
        resabs += kWk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = 0.5 * resk;
    double resasc = kWk[7] * std::fabs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        resasc += kWk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));
    }

    const double scale = std::fabs(half);
    resk *= half;
    resabs *= scale;
    resasc *= scale;
    double err = std::fabs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double kEpsMach = std::numeric_limits<double>::epsilon();
    constexpr double kUflow = std::numeric_limits<double>::min();
    if (resabs > kUflow / (50.0 * kEpsMach)) err = std::max(50.0 * kEpsMach * resabs, err);
    return Segment{a, b, resk, err, depth};
}

bool by_error(const Segment& x, const Segment& y) { return x.error < y.error; }

} // namespace

QuadratureResult integrate(const Integrand& g, double a, double b, Tolerance tol) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw std::invalid_argument("integrate needs finite a < b");
    }
    if (!(tol.rel >= 0.0) || !(tol.abs >= 0.0)) throw std::invalid_argument("negative tolerance");

    std::vector<Segment> heap;
    heap.push_back(gauss_kronrod(g, a, b, 0));
    double total_value = heap.front().value;
    double total_error = heap.front().error;
    double frozen_value = 0.0;
    double frozen_error = 0.0;
    std::size_t frozen_count = 0;

    QuadratureResult out;
    for (;;) {
        if (total_error <= tol.bound(total_value)) {
            // Re-sum to shed accumulated drift before accepting.
            total_value = frozen_value;
            total_error = frozen_error;
            for (const Segment& s : heap) {
                total_value += s.value;
                total_error += s.error;
            }
            if (total_error <= tol.bound(total_value)) {
                out.converged = true;
                break;
            }
        }
        if (heap.empty()) break;
        if (frozen_error > tol.bound(total_value)) break;
        if (heap.size() + frozen_count >= kMaxIntervals) break;

        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Segment worst = heap.back();
        heap.pop_back();

        // Segments touching an end of [a, b] are split geometrically towards
        // that end, so an endpoint singularity is resolved within the depth cap.
        const double width = worst.b - worst.a;
        const bool at_a = worst.a == a;
        const bool at_b = worst.b == b;
        double mid = 0.5 * (worst.a + worst.b);
        if (at_a && !at_b) mid = worst.a + kGrading * width;
        if (at_b && !at_a) mid = worst.b - kGrading * width;
        if (worst.depth >= kMaxDepth || !(worst.a < mid && mid < worst.b)) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            ++frozen_count;
            continue;
        }
        const Segment left = gauss_kronrod(g, worst.a, mid, worst.depth + 1);
        const Segment right = gauss_kronrod(g, mid, worst.b, worst.depth + 1);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        ++out.subdivisions;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
    }

    if (!out.converged) {
        total_value = frozen_value;
        total_error = frozen_error;
        for (const Segment& s : heap) {
            total_value += s.value;
            total_error += s.error;
        }
    }
    out.value = total_value;
    out.abs_error = total_error;
    return out;
}

QuadratureResult integrate_to_infinity(const Integrand& g, double a, Tolerance tol) {
    if (!std::isfinite(a)) throw std::invalid_argument("integrate_to_infinity needs finite a");
    const Integrand mapped = [&g, a](double t) {
        const double x = a + (1.0 - t) / t;
        const double gx = g(x);
        if (gx == 0.0) return 0.0;
        return gx / (t * t);
    };
    return integrate(mapped, 0.0, 1.0, tol);
}

std::vector<QuadratureResult> dyadic_shell_integrals(const Integrand& g, double eps, int shells,
                                                     Tolerance tol) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("shells need eps > 0");
    if (shells < 1) throw std::invalid_argument("shells need K >= 1");
    std::vector<QuadratureResult> out;
    out.reserve(static_cast<std::size_t>(shells));
    for (int k = 0; k < shells; ++k) {
        const double hi = eps * std::exp2(-k);
        const double lo = eps * std::exp2(-k - 1);
        out.push_back(integrate(g, lo, hi, tol));
    }
    return out;
}

std::vector<QuadratureResult> log_shell_integrals(const Integrand& h, int shells, Tolerance tol) {
    if (shells < 1) throw std::invalid_argument("shells need K >= 1");
    std::vector<QuadratureResult> out;
    out.reserve(static_cast<std::size_t>(shells));
    for (int k = 0; k < shells; ++k) {
        const double lo = k * std::numbers::ln2;
        const double hi = (k + 1) * std::numbers::ln2;
        out.push_back(integrate(h, lo, hi, tol));
    }
    return out;
}

} // namespace liouville
