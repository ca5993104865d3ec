#include <algorithm>
#include <cmath>
#include <limits>

#include "emoscript/analysis.hpp"
#include "emoscript/error.hpp"

namespace emoscript {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEpsilon = 1e-16;

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction (modified Lentz).
double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEpsilon;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi_square_survival(double statistic, double df) {
    if (statistic <= 0.0) return 1.0;
    return regularized_gamma_q(df / 2.0, statistic / 2.0);
}

ChiSquareResult chi_square_2x2(const TwoByTwo& table, bool yates_correction) {
    const double a = static_cast<double>(table.a);
    const double b = static_cast<double>(table.b);
    const double c = static_cast<double>(table.c);
    const double d = static_cast<double>(table.d);
    const double n = a + b + c + d;
    const double rows[2] = {a + b, c + d};
    const double cols[2] = {a + c, b + d};
    if (rows[0] == 0 || rows[1] == 0 || cols[0] == 0 || cols[1] == 0) {
        throw Error(ErrorCode::DegenerateTable, "chi-square needs every row and column marginal to be non-zero");
    }
    const double observed[2][2] = {{a, b}, {c, d}};
    ChiSquareResult result;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double expected = rows[i] * cols[j] / n;
            double diff = std::fabs(observed[i][j] - expected);
            if (yates_correction) diff = std::max(0.0, diff - 0.5);
            result.statistic += diff * diff / expected;
        }
    }
    result.p = chi_square_survival(result.statistic, 1.0);
    return result;
}

}  // namespace emoscript
